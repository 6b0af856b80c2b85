use nalgebra::ComplexField;
use num_traits::Zero;

use super::inner::antiderivative_coeffs;
use super::{ExpTerm, Ext, PiecewiseExp, DEGENERATE_EXPONENT};
use crate::error::{Error, Result};
use crate::scalar::{from_real, imag_unit, modulus, Real, C};

/// Resolvent `(A - z)^{-1} gamma` of the self-adjoint momentum operator
/// `A = i d/dx` on the whole line.
///
/// For `Im z > 0` the solution is `i e^{-izx} \int_x^\infty e^{iz\tau} gamma(\tau) d\tau`,
/// for `Im z < 0` it is `-i e^{-izx} \int_{-\infty}^x e^{iz\tau} gamma(\tau) d\tau`.
/// Both integrals are done per term, so the result is again piecewise
/// exponential (with a polynomial factor where `s + iz` vanishes).
pub fn ef_free_resolvent<T: Real>(z: C<T>, gamma: &PiecewiseExp<T>) -> Result<PiecewiseExp<T>> {
    if z.im == T::zero() {
        return Err(Error::RealSpectralParameter {
            re: z.re.to_f64_lossy(),
            im: 0.0,
        });
    }
    let i = imag_unit::<T>();
    let upper = z.im > T::zero();
    let free = -i * z; // exponent of e^{-izx}
    let mut out = Vec::new();
    for t in gamma.terms() {
        let k = t.exponent + i * z;
        let p = t.power;
        let c = t.coeff;
        // antiderivative F(x) = e^{kx} P(x) of x^p e^{kx}; in the degenerate
        // case F(x) = x^{p+1}/(p+1) and e^{kx} = 1
        let degenerate = modulus(k) < T::lit(DEGENERATE_EXPONENT);
        let poly: Vec<C<T>> = if degenerate {
            let mut v = vec![C::zero(); p as usize + 2];
            v[p as usize + 1] = from_real(T::one() / T::from_u32(p + 1).unwrap());
            v
        } else {
            antiderivative_coeffs(k, p)
        };
        let big_f = |x: T| -> C<T> {
            let ekx = if degenerate {
                C::new(T::one(), T::zero())
            } else {
                (k * from_real(x)).exp()
            };
            ekx * poly.iter().enumerate().fold(C::zero(), |acc, (d, a)| {
                let xp = if d == 0 { T::one() } else { x.powi(d as i32) };
                acc + *a * from_real(xp)
            })
        };
        // exponent attached to the x-dependent part of F: e^{-izx} e^{kx} = e^{sx}
        let moving_exponent = if degenerate { free } else { t.exponent };
        // both branches read  i F(anchor) e^{-izx} - i e^{sx} P(x)  on (lo, hi),
        // anchored at hi above the real axis and at lo below it
        let anchor = if upper { t.hi } else { t.lo };
        let anchor_coeff = match anchor {
            Ext::Finite(x) => big_f(x),
            _ => C::zero(),
        };
        if !anchor_coeff.is_zero() {
            out.push(ExpTerm::raw(i * c * anchor_coeff, t.lo, t.hi, free, 0));
        }
        for (d, a) in poly.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            out.push(ExpTerm::raw(
                -i * c * *a,
                t.lo,
                t.hi,
                moving_exponent,
                d as u32,
            ));
        }
        // constant tail outside the support
        if upper {
            if let Ext::Finite(lo) = t.lo {
                let f_hi = match t.hi {
                    Ext::Finite(b) => big_f(b),
                    _ => C::zero(),
                };
                let total = f_hi - big_f(lo);
                if !total.is_zero() {
                    out.push(ExpTerm::raw(
                        i * c * total,
                        Ext::NegInf,
                        Ext::Finite(lo),
                        free,
                        0,
                    ));
                }
            }
        } else if let Ext::Finite(hi) = t.hi {
            let f_lo = match t.lo {
                Ext::Finite(a) => big_f(a),
                _ => C::zero(),
            };
            let total = big_f(hi) - f_lo;
            if !total.is_zero() {
                out.push(ExpTerm::raw(
                    -i * c * total,
                    Ext::Finite(hi),
                    Ext::PosInf,
                    free,
                    0,
                ));
            }
        }
    }
    Ok(PiecewiseExp::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type F = PiecewiseExp<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        cplx(re, im)
    }

    fn residual(z: C<f64>, gamma: &F) -> f64 {
        let g = ef_free_resolvent(z, gamma).unwrap();
        let lhs = g.derivative_unchecked() * c(0.0, 1.0) - g.scale(z);
        (lhs - gamma.clone()).max_coeff()
    }

    #[test]
    fn right_half_line_potential() {
        let alpha = c(0.7, -0.3);
        let gamma = F::right(alpha, c(-1.0, 0.0)).unwrap();
        for lambda in [c(0.0, 1.0), c(2.0, 0.5), c(-3.0, 5.0)] {
            let g = ef_free_resolvent(lambda, &gamma).unwrap();
            let amp = c(0.0, 1.0) * alpha / (c(1.0, 0.0) - c(0.0, 1.0) * lambda);
            let expected =
                F::right(amp, c(-1.0, 0.0)).unwrap() + F::left(amp, c(0.0, -1.0) * lambda).unwrap();
            assert!(g.approx_eq(&expected, 1e-14), "lambda = {lambda}");
        }
    }

    #[test]
    fn left_half_line_potential() {
        let alpha = c(1.0, 0.0);
        let gamma = F::left(alpha, c(1.0, 0.0)).unwrap();
        let lambda = c(0.5, 2.0);
        let g = ef_free_resolvent(lambda, &gamma).unwrap();
        let amp = c(0.0, 1.0) * alpha / (c(1.0, 0.0) + c(0.0, 1.0) * lambda);
        let expected = (F::left(c(1.0, 0.0), c(0.0, -1.0) * lambda).unwrap()
            - F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap())
        .scale(amp);
        assert!(g.approx_eq(&expected, 1e-14));
    }

    #[test]
    fn degenerate_point_produces_polynomial_factor() {
        // lambda = i makes 1 + i lambda vanish: g = -i alpha x e^x on x < 0
        let gamma = F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let g = ef_free_resolvent(c(0.0, 1.0), &gamma).unwrap();
        assert!(g.terms().iter().any(|t| t.power() == 1));
        for x in [-0.3, -1.0, -4.0] {
            let expected = c(0.0, -1.0) * x * x.exp();
            assert!((g.eval(x) - expected).norm() < 1e-14);
        }
        assert!(residual(c(0.0, 1.0), &gamma) < 1e-13);
    }

    #[test]
    fn zero_potential_and_real_parameter() {
        assert!(ef_free_resolvent(c(0.0, 1.0), &F::zero())
            .unwrap()
            .is_empty());
        assert!(ef_free_resolvent(c(1.0, 0.0), &F::zero()).is_err());
    }

    #[test]
    fn resolvent_solves_the_differential_equation() {
        let gamma = F::interval(-1.0, 2.0, c(1.0, 2.0), c(0.3, -1.0)).unwrap()
            + F::right(c(-0.5, 0.0), c(-2.0, 1.0)).unwrap()
            + F::left(c(0.25, 0.0), c(1.5, 0.0)).unwrap();
        for z in [c(0.0, 1.0), c(1.0, -1.0), c(-2.0, 0.1), c(3.0, -4.0)] {
            assert!(residual(z, &gamma) < 1e-12, "z = {z}");
            let g = ef_free_resolvent(z, &gamma).unwrap();
            for x in g.breakpoints() {
                assert!(g.jump_at(x).norm() < 1e-13);
            }
        }
    }
}
