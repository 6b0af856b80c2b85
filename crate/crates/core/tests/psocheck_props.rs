mod common;

use common::c;
use proptest::prelude::*;
use pso_core::expfun::VectorFn;
use pso_core::matops::CMat;
use pso_core::models::{momentum_eigen_test, MomentumModel, NonlocalCase, NonlocalModel};
use pso_core::psocheck::*;
use pso_core::scalar::C;
use pso_core::triplets::{BoundaryTriplet, DefectFamily, OperatorModel};
use pso_core::Result;

/// Same operator, defect bases rescaled by a point-dependent factor.
struct Rescaled<M> {
    inner: M,
    factor: fn(C<f64>) -> C<f64>,
}

impl<M: OperatorModel<f64>> DefectFamily<f64> for Rescaled<M> {
    type Vector = VectorFn<f64>;

    fn basis(&self, z: C<f64>) -> Result<Vec<VectorFn<f64>>> {
        let k = (self.factor)(z);
        Ok(self
            .inner
            .basis(z)?
            .into_iter()
            .map(|v| v.scale(k))
            .collect())
    }
}

impl<M: OperatorModel<f64>> OperatorModel<f64> for Rescaled<M> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn m(&self) -> usize {
        self.inner.m()
    }

    fn apply_adjoint(&self, f: &VectorFn<f64>) -> Result<VectorFn<f64>> {
        self.inner.apply_adjoint(f)
    }

    fn triplet(&self) -> &BoundaryTriplet<f64> {
        self.inner.triplet()
    }
}

fn small_grid() -> Grid<f64> {
    Grid::product(&[-2.0, 0.0, 1.0], &[0.5, 2.0]).unwrap()
}

fn verdicts(cert: &Certificate) -> Vec<Verdict> {
    cert.checks.iter().map(|c| c.verdict).collect()
}

fn factors() -> [fn(C<f64>) -> C<f64>; 3] {
    [
        |_| c(1e-3, 0.0),
        |z| c(0.0, 7.0) * z,
        |z| (z * c(0.3, 1.0)).exp(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_ignore_basis_scale(
        case in prop_oneof![Just(NonlocalCase::I), Just(NonlocalCase::II)],
        pick in 0usize..4,
        which in 0usize..3,
    ) {
        let alphas = [c(1.0, 0.0), c(0.0, 2.0), c(0.0, 4.0), c(3.0, -1.0)];
        let grid = small_grid();
        let plain = NonlocalModel::new(case, alphas[pick]).unwrap();
        let base = pso_certificate(&plain, &grid);
        let scaled = Rescaled { inner: plain, factor: factors()[which] };
        let cert = pso_certificate(&scaled, &grid);
        prop_assert_eq!(verdicts(&base), verdicts(&cert));
        prop_assert!(base.verdict != Verdict::Inconclusive);
    }

    #[test]
    fn classification_with_zero_theta_matches_eigen_test(
        entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4),
        singular in any::<bool>(),
        l in (-3.0..3.0f64, 0.1..3.0f64),
        lower in any::<bool>(),
    ) {
        let mut t = CMat::from_fn(2, 2, |i, j| c(entries[2 * i + j].0, entries[2 * i + j].1));
        if singular {
            let col = t.column(0).into_owned();
            t.set_column(1, &(col * c(0.5, -0.25)));
        }
        let lambda = if lower { c(l.0, -l.1) } else { c(l.0, l.1) };
        let class = classify_spectrum(&CMat::zeros(2, 2), &t).unwrap();
        let in_spectrum = momentum_eigen_test(&t, lambda).unwrap();
        let predicted = match class {
            SpectrumClass::RealLine => false,
            SpectrumClass::RealPlusUpper => !lower,
            SpectrumClass::RealPlusLower => lower,
            SpectrumClass::WholePlane => true,
        };
        prop_assert_eq!(predicted, in_spectrum);
        prop_assert_eq!(class == SpectrumClass::RealLine, !singular);
    }
}

#[test]
fn momentum_certificate_ignores_basis_scale() {
    let grid = small_grid();
    for m in 1..=2 {
        for f in factors() {
            let cert = pso_certificate(
                &Rescaled {
                    inner: MomentumModel::new(m).unwrap(),
                    factor: f,
                },
                &grid,
            );
            assert_eq!(cert.verdict, Verdict::Pass);
        }
    }
}

#[test]
fn case_one_is_constant_only_for_the_special_couplings() {
    let grid = Grid::default_grid();
    let sampled = [
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 1.0),
        c(0.0, 2.0),
        c(0.0, 4.0),
        c(0.0, -4.0),
        c(3.0, 1.0),
    ];
    for alpha in sampled {
        let model = NonlocalModel::new(NonlocalCase::I, alpha).unwrap();
        for &l in grid.upper() {
            let th = pso_core::triplets::char_function(
                model.triplet(),
                &model,
                l,
                &pso_core::triplets::Integrator::Exact,
            )
            .unwrap();
            assert!((th[(0, 0)] - model.theta_closed_form(l).unwrap()).norm() <= 1e-10);
        }
        let scan = constancy_scan(
            &model,
            model.triplet(),
            &grid,
            &pso_core::triplets::Integrator::Exact,
        );
        let special = alpha == c(0.0, 4.0) || alpha == c(0.0, 0.0);
        assert_eq!(scan.verdict == Verdict::Pass, special, "alpha={alpha}");
        assert_ne!(scan.verdict, Verdict::Inconclusive, "alpha={alpha}");
    }
}
