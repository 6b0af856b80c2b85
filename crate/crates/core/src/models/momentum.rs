use crate::error::{Error, Result};
use crate::expfun::{PiecewiseExp, VectorFn};
use crate::matops::{self, CMat, SINGULAR_TOL};
use crate::scalar::{imag_unit, tol, Real, C};
use crate::triplets::{BoundaryMap, BoundaryTriplet, DefectFamily, OperatorModel};

use super::non_real;

/// `i d/dx` on `C^m`-valued functions with the condition `u(0) = 0`; the
/// adjoint acts on functions that may jump at the origin.
#[derive(Clone, Debug)]
pub struct MomentumModel<T: Real> {
    m: usize,
    triplet: BoundaryTriplet<T>,
}

impl<T: Real> MomentumModel<T> {
    /// Reference triplet `Gamma_- f = f(0+)`, `Gamma_+ f = f(0-)`.
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "defect dimension must be positive".into(),
            ));
        }
        let mut witness = momentum_basis(m, C::new(T::zero(), T::one()))?;
        witness.extend(momentum_basis(m, C::new(T::zero(), -T::one()))?);
        let triplet = BoundaryTriplet::new(
            BoundaryMap::right_limit(m),
            BoundaryMap::left_limit(m),
            witness,
        )?;
        Ok(Self { m, triplet })
    }

    /// `chi_(-inf,0) e^{-izx} e_j` above the real axis,
    /// `chi_(0,inf) e^{-izx} e_j` below it.
    pub fn momentum_defect(&self, z: C<T>) -> Result<Vec<VectorFn<T>>> {
        momentum_basis(self.m, z)
    }

    /// Unit-norm copies of [`Self::momentum_defect`].
    pub fn normalized_defect(&self, z: C<T>) -> Result<Vec<VectorFn<T>>> {
        Ok(self
            .momentum_defect(z)?
            .into_iter()
            .map(|v| {
                let n = v.norm();
                v.scale(C::new(T::one() / n, T::zero()))
            })
            .collect())
    }
}

fn momentum_basis<T: Real>(m: usize, z: C<T>) -> Result<Vec<VectorFn<T>>> {
    non_real(z)?;
    let one = C::new(T::one(), T::zero());
    let s = -imag_unit::<T>() * z;
    let f = if z.im > T::zero() {
        PiecewiseExp::left(one, s)?
    } else {
        PiecewiseExp::right(one, s)?
    };
    Ok((0..m).map(|j| VectorFn::unit(m, j, f.clone())).collect())
}

impl<T: Real> DefectFamily<T> for MomentumModel<T> {
    type Vector = VectorFn<T>;

    fn basis(&self, z: C<T>) -> Result<Vec<VectorFn<T>>> {
        self.momentum_defect(z)
    }
}

/// `i f'` away from the origin; other jumps are outside the domain.
pub(crate) fn momentum_action<T: Real>(f: &VectorFn<T>) -> Result<VectorFn<T>> {
    let i = imag_unit::<T>();
    f.try_map(|c| {
        c.derivative_allowing_jumps(&[T::zero()])
            .map(|d| d.scale(i))
            .map_err(|e| Error::OutsideMaximalDomain(e.to_string()))
    })
}

impl<T: Real> OperatorModel<T> for MomentumModel<T> {
    fn name(&self) -> String {
        format!("momentum(m={})", self.m)
    }

    fn m(&self) -> usize {
        self.m
    }

    fn apply_adjoint(&self, f: &VectorFn<T>) -> Result<VectorFn<T>> {
        if f.dim() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "function has {} components, model has {}",
                f.dim(),
                self.m
            )));
        }
        momentum_action(f)
    }

    fn triplet(&self) -> &BoundaryTriplet<T> {
        &self.triplet
    }
}

/// Whether `lambda` is an eigenvalue of the extension `T f(0-) = f(0+)`.
///
/// Above the axis the candidate `chi_(-inf,0) e^{-i lambda x} n` needs
/// `T n = 0`; below the axis the candidate forces `n = 0`.
pub fn momentum_eigen_test<T: Real>(t: &CMat<T>, lambda: C<T>) -> Result<bool> {
    non_real(lambda)?;
    if t.nrows() != t.ncols() {
        return Err(Error::NotSquare {
            rows: t.nrows(),
            cols: t.ncols(),
        });
    }
    Ok(lambda.im > T::zero() && matops::is_singular(t, tol::<T>(SINGULAR_TOL)))
}

/// `||T f(0-) - f(0+)||`
pub fn boundary_condition_residual<T: Real>(t: &CMat<T>, f: &VectorFn<T>) -> T {
    (t * f.at0minus() - f.at0plus()).norm()
}

/// `U_F f`: keeps `f` on the negative half-line and multiplies it by `F` on
/// the positive one.
pub fn similarity_transform<T: Real>(factor: &CMat<T>, f: &VectorFn<T>) -> VectorFn<T> {
    let neg = f.map(|c| c.restrict_negative());
    let pos = f.map(|c| c.restrict_positive()).apply_matrix(factor);
    neg + pos
}

/// Checks that `U_F`, `F = T2 T1^{-1}`, intertwines the extensions `A_T1`
/// and `A_T2` on the given samples of `D(A_T1)`. Returns the largest
/// commutator residual plus the `D(A_T2)` membership residual.
pub fn similarity_conjugation_check<T: Real>(
    t1: &CMat<T>,
    t2: &CMat<T>,
    samples: &[VectorFn<T>],
) -> Result<T> {
    let factor = t2 * matops::inverse(t1, "T1")?;
    let mut worst = T::zero();
    for f in samples {
        let r = boundary_condition_residual(t1, f);
        if r > tol::<T>(1e-12) {
            return Err(Error::BoundaryCondition(r.to_f64_lossy()));
        }
        let uf = similarity_transform(&factor, f);
        let lhs = similarity_transform(&factor, &momentum_action(f)?);
        let rhs = momentum_action(&uf)?;
        let commutator = (lhs - rhs).max_coeff();
        let membership = boundary_condition_residual(t2, &uf);
        worst = worst.max(commutator + membership);
    }
    Ok(worst)
}

/// Distance between `V_t (i d/dx) V_{-t} f` and `(i d/dx - t) f`, where
/// `V_t` is multiplication by `e^{-itx}`.
pub fn weyl_relation_check<T: Real>(t: T, f: &PiecewiseExp<T>) -> Result<T> {
    let i = imag_unit::<T>();
    let direct = f.derivative()?.scale(i) - f.scale(C::new(t, T::zero()));
    let conjugated = f.modulate(-t).derivative()?.scale(i).modulate(t);
    Ok((conjugated - direct).max_coeff())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use crate::triplets::{
        char_function, decompose_mmu, green_residual, triplet_convert, triplet_unconvert, BoundaryMap, Integrator,
    };

    fn c(re: f64, im: f64) -> C<f64> {
        cplx(re, im)
    }

    fn one(z: C<f64>) -> CMat<f64> {
        CMat::from_element(1, 1, z)
    }

    #[test]
    fn defect_examples() {
        let model = MomentumModel::<f64>::new(1).unwrap();
        let f = &model.momentum_defect(c(0.0, 1.0)).unwrap()[0];
        assert!(f
            .component(0)
            .approx_eq(&PiecewiseExp::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap(), 0.0));
        let f = &model.momentum_defect(c(0.0, -1.0)).unwrap()[0];
        assert!(f.component(0).approx_eq(
            &PiecewiseExp::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap(),
            0.0
        ));
        let f = &model.momentum_defect(c(1.0, 2.0)).unwrap()[0];
        assert!(f
            .component(0)
            .approx_eq(&PiecewiseExp::left(c(1.0, 0.0), c(2.0, -1.0)).unwrap(), 0.0));
        assert!(model.momentum_defect(c(1.0, 0.0)).is_err());
        for z in [c(0.3, 1.0), c(-2.0, -0.5)] {
            for v in model.momentum_defect(z).unwrap() {
                assert!(model.defect_residual(&v, z).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn green_identity_on_left_exponential() {
        let model = MomentumModel::<f64>::new(1).unwrap();
        let f = VectorFn::scalar(PiecewiseExp::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap());
        assert!(green_residual(model.triplet(), &model, &f, &f).unwrap() <= 1e-12);
        let z = VectorFn::zero(1);
        assert_eq!(
            green_residual(model.triplet(), &model, &z, &z).unwrap(),
            0.0
        );
    }

    #[test]
    fn characteristic_function_vanishes() {
        let model = MomentumModel::<f64>::new(2).unwrap();
        let th = char_function(model.triplet(), &model, c(1.0, 0.5), &Integrator::Exact).unwrap();
        assert_eq!(matops::op_norm(&th), 0.0);
    }

    #[test]
    fn decomposition_examples() {
        let model = MomentumModel::<f64>::new(1).unwrap();
        let f = model.momentum_defect(c(0.0, 2.0)).unwrap().remove(0);
        let d = decompose_mmu(&model, &f, c(0.0, 1.0)).unwrap();
        assert!((d.a[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(d.b[0].norm() < 1e-15);
        let fbar = model.momentum_defect(c(0.0, -1.0)).unwrap().remove(0);
        let d = decompose_mmu(&model, &fbar, c(0.0, 1.0)).unwrap();
        assert!(d.a[0].norm() < 1e-15);
        assert!((d.b[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigen_test_examples() {
        assert!(!momentum_eigen_test(&one(c(1.0, 0.0)), c(0.0, 2.0)).unwrap());
        assert!(momentum_eigen_test(&one(c(0.0, 0.0)), c(0.0, 2.0)).unwrap());
        assert!(!momentum_eigen_test(&one(c(0.0, 0.0)), c(0.0, -2.0)).unwrap());
    }

    fn sample(t1: C<f64>) -> VectorFn<f64> {
        let a = c(0.4, -1.2);
        let neg = PiecewiseExp::left(a, c(1.5, 0.3)).unwrap();
        let pos = PiecewiseExp::right(t1 * a, c(-0.7, 2.0)).unwrap();
        VectorFn::scalar(neg + pos)
    }

    #[test]
    fn similarity_examples() {
        let th = std::f64::consts::FRAC_PI_3;
        let cases = [
            (c(1.0, 0.0), c(1.0, 0.0)),
            (c(1.0, 0.0), c(th.cos(), th.sin())),
            (c(2.0, 0.0), c(1.0, 0.0)),
        ];
        for (t1, t2) in cases {
            let r = similarity_conjugation_check(&one(t1), &one(t2), &[sample(t1)]).unwrap();
            assert!(r <= 1e-12, "{t1} {t2}: {r}");
        }
        assert!(similarity_conjugation_check(&one(c(0.0, 0.0)), &one(c(1.0, 0.0)), &[]).is_err());
        assert!(matches!(
            similarity_conjugation_check(
                &one(c(1.0, 0.0)),
                &one(c(1.0, 0.0)),
                &[sample(c(3.0, 0.0))]
            ),
            Err(Error::BoundaryCondition(_))
        ));
    }

    #[test]
    fn weyl_relation_examples() {
        let f = PiecewiseExp::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap()
            + PiecewiseExp::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        for t in [1.0, 0.0, -2.0] {
            assert!(weyl_relation_check(t, &f).unwrap() <= 1e-14);
        }
        let jump = PiecewiseExp::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!(weyl_relation_check(1.0, &jump).is_err());
    }

    fn symmetric_pair(k: C<f64>) -> (BoundaryMap<f64>, BoundaryMap<f64>) {
        let jump = BoundaryMap::right_limit(1).add(&BoundaryMap::left_limit(1).scale(c(-1.0, 0.0))).unwrap();
        let sum = BoundaryMap::right_limit(1).add(&BoundaryMap::left_limit(1)).unwrap();
        (jump, sum.scale(k))
    }

    #[test]
    fn symmetric_pair_converts_to_a_triplet() {
        let model = MomentumModel::<f64>::new(1).unwrap();
        let samples: Vec<VectorFn<f64>> = [c(0.5, 1.0), c(-1.0, 2.0), c(0.3, -0.7), c(2.0, -1.5)]
            .iter()
            .map(|&z| model.momentum_defect(z).unwrap().remove(0))
            .chain(std::iter::once(sample(c(0.4, 0.9))))
            .collect();
        let witness = model.triplet().witness().to_vec();
        // Gamma_1 = -(i/2)(f(0+) + f(0-)) is the normalization satisfying the symmetric identity
        let (g0, g1) = symmetric_pair(c(0.0, -0.5));
        let t = triplet_convert(&g0, &g1, &model, &samples, witness.clone()).unwrap();
        for f in &samples {
            for g in &samples {
                assert!(green_residual(&t, &model, f, g).unwrap() <= 1e-10);
            }
        }
        let (b0, b1) = triplet_unconvert(&t).unwrap();
        for f in &samples {
            assert!((b0.apply_exact(f).unwrap() - g0.apply_exact(f).unwrap()).norm() <= 1e-14);
            assert!((b1.apply_exact(f).unwrap() - g1.apply_exact(f).unwrap()).norm() <= 1e-14);
        }
        let (g0, g1) = symmetric_pair(c(0.0, 0.5));
        assert!(matches!(
            triplet_convert(&g0, &g1, &model, &samples, witness),
            Err(Error::GreenIdentity(_))
        ));
    }
}
