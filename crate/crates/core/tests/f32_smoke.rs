use num_complex::Complex;
use pso_core::expfun::{ef_inner, PiecewiseExp};
use pso_core::matops::{cayley, inverse_cayley, op_norm, random_hermitian};
use pso_core::models::{MomentumModel, NonlocalCase, NonlocalModel};
use pso_core::psocheck::{pso_certificate, Grid, Verdict};
use pso_core::triplets::{char_function, Integrator, OperatorModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f32, im: f32) -> Complex<f32> {
    Complex::new(re, im)
}

#[test]
fn single_precision_pipeline() {
    let f = PiecewiseExp::<f32>::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    assert!((ef_inner(&f, &f) - c(0.5, 0.0)).norm() < 1e-6);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_hermitian::<f32, _>(&mut rng, 6, 1.0);
    let back = inverse_cayley(&cayley(&a).unwrap()).unwrap();
    assert!(op_norm(&(back - a)) < 1e-4);

    let model = NonlocalModel::<f32>::new(NonlocalCase::I, c(1.0, 0.0)).unwrap();
    let th = char_function(model.triplet(), &model, c(0.0, 1.0), &Integrator::Exact).unwrap();
    assert!((th[(0, 0)] - c(-0.10820, -0.20984)).norm() < 1e-4);

    let grid = Grid::<f32>::product(&[-1.0, 0.0, 1.0], &[0.5, 2.0]).unwrap();
    let cert = pso_certificate(&MomentumModel::<f32>::new(1).unwrap(), &grid);
    assert_eq!(cert.verdict, Verdict::Pass);
}
