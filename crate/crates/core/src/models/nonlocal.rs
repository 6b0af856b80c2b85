use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfun::{ef_free_resolvent, PiecewiseExp, VectorFn};
use crate::scalar::{from_real, imag_unit, modulus, Real, C};
use crate::triplets::{BoundaryMap, BoundaryTriplet, DefectFamily, Integrator, OperatorModel};

use super::momentum::momentum_action;
use super::non_real;

/// Which one-point coupling the rank-one term uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonlocalCase {
    /// `gamma = alpha chi_(0,inf) e^{-x}` coupled to the mean `(f(0+) + f(0-))/2`.
    I,
    /// `gamma = alpha chi_(-inf,0) e^{x}` coupled to the jump `f(0+) - f(0-)`.
    II,
}

/// `S* f = i f' + gamma c(f)` on functions that may jump at the origin,
/// where `c(f)` is the mean (case I) or the jump (case II) at zero.
#[derive(Clone, Debug)]
pub struct NonlocalModel<T: Real> {
    case: NonlocalCase,
    alpha: C<T>,
    gamma: PiecewiseExp<T>,
    triplet: BoundaryTriplet<T>,
}

impl<T: Real> NonlocalModel<T> {
    pub fn new(case: NonlocalCase, alpha: C<T>) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        let one = T::one();
        let gamma = match case {
            NonlocalCase::I => PiecewiseExp::right(alpha, C::new(-one, T::zero()))?,
            NonlocalCase::II => PiecewiseExp::left(alpha, C::new(one, T::zero()))?,
        };
        let i = imag_unit::<T>();
        let half = from_real(T::lit(0.5));
        let (plus_c, minus_c) = match case {
            // Gamma_+ f = f(0-) + (i/2)(f, gamma), Gamma_- f = f(0+) - (i/2)(f, gamma)
            NonlocalCase::I => (i * half, -i * half),
            // Gamma_+ f = f(0-) - i(f, gamma), Gamma_- f = f(0+) - i(f, gamma)
            NonlocalCase::II => (-i, -i),
        };
        let gamma_plus =
            BoundaryMap::left_limit(1).add(&BoundaryMap::diagonal_functional(1, plus_c, &gamma))?;
        let gamma_minus = BoundaryMap::right_limit(1)
            .add(&BoundaryMap::diagonal_functional(1, minus_c, &gamma))?;
        let up = C::new(T::zero(), one);
        let witness = vec![
            VectorFn::scalar(defect_vector(case, &gamma, up)?),
            VectorFn::scalar(defect_vector(case, &gamma, up.conj())?),
        ];
        let triplet = BoundaryTriplet::new(gamma_minus, gamma_plus, witness)?;
        Ok(Self {
            case,
            alpha,
            gamma,
            triplet,
        })
    }

    pub fn case(&self) -> NonlocalCase {
        self.case
    }

    pub fn alpha(&self) -> C<T> {
        self.alpha
    }

    pub fn gamma(&self) -> &PiecewiseExp<T> {
        &self.gamma
    }

    /// Defect vector at `z`, built from the free resolvent `g = (A - z)^{-1} gamma`
    /// and the exponential `G` supported on the half-line where it decays.
    pub fn nonlocal_defect(&self, z: C<T>) -> Result<PiecewiseExp<T>> {
        defect_vector(self.case, &self.gamma, z)
    }

    /// Characteristic function from the closed form
    /// `Theta = -X / (2 + X)`, `X = i alpha (1 - i conj(alpha)/4) / (1 - i lambda)`.
    pub fn theta_closed_form(&self, lambda: C<T>) -> Result<C<T>> {
        self.require_case_one()?;
        let i = imag_unit::<T>();
        let one = C::new(T::one(), T::zero());
        let x = i * self.alpha * (one - i * self.alpha.conj() / from_real(T::lit(4.0)))
            / (one - i * lambda);
        Ok(-x / (from_real(T::lit(2.0)) + x))
    }

    /// `g(0) - (i/2)(f_lambda, gamma)` recomputed from the resolvent and the
    /// defect vector.
    pub fn theta_aggregate(&self, lambda: C<T>, integrator: &Integrator<T>) -> Result<C<T>> {
        self.require_case_one()?;
        non_real(lambda)?;
        let g = ef_free_resolvent(lambda, &self.gamma)?;
        let f = self.nonlocal_defect(lambda)?;
        let half_i = imag_unit::<T>() * from_real(T::lit(0.5));
        Ok(value_at_zero(&g) - half_i * integrator.inner(&f, &self.gamma)?)
    }

    /// `-1 + 2 / (2 + aggregate)`.
    pub fn theta_from_aggregate(&self, lambda: C<T>, integrator: &Integrator<T>) -> Result<C<T>> {
        let x = self.theta_aggregate(lambda, integrator)?;
        let two = from_real(T::lit(2.0));
        Ok(-C::new(T::one(), T::zero()) + two / (two + x))
    }

    /// `conj(alpha)(2i - alpha) / [2(1 - i lambda)(1 - i conj(nu))]`, the
    /// inner product of the case II defect vectors.
    pub fn defect_inner_closed_form(&self, lambda: C<T>, nu: C<T>) -> Result<C<T>> {
        if self.case != NonlocalCase::II {
            return Err(Error::InvalidParameter(
                "closed form exists for case II only".into(),
            ));
        }
        let i = imag_unit::<T>();
        let one = C::new(T::one(), T::zero());
        let two = from_real(T::lit(2.0));
        Ok(self.alpha.conj() * (two * i - self.alpha)
            / (two * (one - i * lambda) * (one - i * nu.conj())))
    }

    /// Facts about the parameter worth surfacing in reports.
    pub fn notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.case == NonlocalCase::I {
            let four_i = C::new(T::zero(), T::lit(4.0));
            if modulus(self.alpha - four_i) <= T::lit(1e-12) {
                notes.push(
                    "alpha = 4i is the unique coupling with Theta = 0 identically \
                     (besides the uncoupled alpha = 0)"
                        .into(),
                );
            }
            if modulus(self.alpha) == T::zero() {
                notes.push(
                    "alpha = 0 removes the coupling and also gives Theta = 0 identically".into(),
                );
            }
        }
        notes
    }

    fn require_case_one(&self) -> Result<()> {
        if self.case != NonlocalCase::I {
            return Err(Error::InvalidParameter(
                "closed form exists for case I only".into(),
            ));
        }
        Ok(())
    }
}

fn value_at_zero<T: Real>(f: &PiecewiseExp<T>) -> C<T> {
    let b = f.boundary();
    (b.at0minus + b.at0plus) * from_real(T::lit(0.5))
}

fn defect_vector<T: Real>(
    case: NonlocalCase,
    gamma: &PiecewiseExp<T>,
    z: C<T>,
) -> Result<PiecewiseExp<T>> {
    non_real(z)?;
    let g = ef_free_resolvent(z, gamma)?;
    let one = C::new(T::one(), T::zero());
    let exponent = -imag_unit::<T>() * z;
    let upper = z.im > T::zero();
    let big_g = if upper {
        PiecewiseExp::left(one, exponent)?
    } else {
        PiecewiseExp::right(one, exponent)?
    };
    Ok(match case {
        NonlocalCase::I => {
            let c = from_real(T::lit(2.0)) * (one + value_at_zero(&g));
            g - big_g.scale(c)
        }
        NonlocalCase::II if upper => g + big_g,
        NonlocalCase::II => g - big_g,
    })
}

impl<T: Real> DefectFamily<T> for NonlocalModel<T> {
    type Vector = VectorFn<T>;

    fn basis(&self, z: C<T>) -> Result<Vec<VectorFn<T>>> {
        Ok(vec![VectorFn::scalar(self.nonlocal_defect(z)?)])
    }
}

impl<T: Real> OperatorModel<T> for NonlocalModel<T> {
    fn name(&self) -> String {
        let a = self.alpha;
        format!("nonlocal-{:?}(alpha={}{:+}i)", self.case, a.re, a.im)
    }

    fn m(&self) -> usize {
        1
    }

    fn apply_adjoint(&self, f: &VectorFn<T>) -> Result<VectorFn<T>> {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "function has {} components, model is scalar",
                f.dim()
            )));
        }
        let b = f.component(0).boundary();
        let coupling = match self.case {
            NonlocalCase::I => (b.at0plus + b.at0minus) * from_real(T::lit(0.5)),
            NonlocalCase::II => b.at0plus - b.at0minus,
        };
        let d = momentum_action(f)?;
        Ok(VectorFn::scalar(
            d.component(0).clone() + self.gamma.scale(coupling),
        ))
    }

    fn triplet(&self) -> &BoundaryTriplet<T> {
        &self.triplet
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;
    use crate::triplets::{char_function, green_residual};

    fn c(re: f64, im: f64) -> C<f64> {
        cplx(re, im)
    }

    #[test]
    fn defect_vectors_solve_the_defect_equation() {
        for case in [NonlocalCase::I, NonlocalCase::II] {
            for alpha in [c(1.0, 0.0), c(0.0, 4.0), c(3.0, -1.0)] {
                let model = NonlocalModel::new(case, alpha).unwrap();
                for z in [c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.5), c(-1.0, -3.0)] {
                    let f = model.basis(z).unwrap().remove(0);
                    let r = model.defect_residual(&f, z).unwrap();
                    assert!(r <= 1e-12, "{case:?} {alpha} {z}: {r}");
                }
            }
        }
    }

    #[test]
    fn case_one_theta_at_i() {
        let model = NonlocalModel::new(NonlocalCase::I, c(1.0, 0.0)).unwrap();
        let th = char_function(model.triplet(), &model, c(0.0, 1.0), &Integrator::Exact).unwrap()
            [(0, 0)];
        assert!((th - c(-0.10820, -0.20984)).norm() < 1e-4);
        assert!((th - model.theta_closed_form(c(0.0, 1.0)).unwrap()).norm() < 1e-13);
        let agg = model
            .theta_from_aggregate(c(0.0, 1.0), &Integrator::Exact)
            .unwrap();
        assert!((th - agg).norm() < 1e-13);
    }

    #[test]
    fn case_one_constant_parameter() {
        let model = NonlocalModel::new(NonlocalCase::I, c(0.0, 4.0)).unwrap();
        let f = model.nonlocal_defect(c(0.0, 1.0)).unwrap();
        let gm = model
            .triplet()
            .gamma_minus()
            .apply_exact(&VectorFn::scalar(f))
            .unwrap()[0];
        assert!(gm.norm() < 1e-14);
        assert_eq!(model.notes().len(), 1);
    }

    #[test]
    fn case_two_inner_products() {
        let model = NonlocalModel::new(NonlocalCase::II, c(0.0, 2.0)).unwrap();
        let fl = model.nonlocal_defect(c(0.0, 1.0)).unwrap();
        let fn_ = model.nonlocal_defect(c(0.0, -1.0)).unwrap();
        assert!(crate::expfun::ef_inner(&fl, &fn_).norm() < 1e-14);
        let model = NonlocalModel::new(NonlocalCase::II, c(1.0, 0.0)).unwrap();
        let fl = model.nonlocal_defect(c(0.0, 1.0)).unwrap();
        let fn_ = model.nonlocal_defect(c(0.0, -1.0)).unwrap();
        let ip = crate::expfun::ef_inner(&fl, &fn_);
        assert!((ip - c(-0.125, 0.25)).norm() < 1e-13, "{ip}");
        let q = crate::expfun::ef_inner_quadrature(&fl, &fn_, 1e-12).unwrap();
        assert!((ip - q).norm() < 1e-10);
    }

    #[test]
    fn green_identity_on_defect_vectors() {
        for case in [NonlocalCase::I, NonlocalCase::II] {
            let model = NonlocalModel::new(case, c(0.5, -1.5)).unwrap();
            let f = model.basis(c(1.0, 2.0)).unwrap().remove(0);
            let g = model.basis(c(-0.5, -1.0)).unwrap().remove(0);
            assert!(green_residual(model.triplet(), &model, &f, &g).unwrap() < 1e-12);
        }
    }
}
