//! Restriction conditions `((A - iI)u, gamma) = 0` of the free momentum
//! operator for the one-dimensional subspaces spanned by `chi_(0,inf) e^{-x}`
//! and `chi_(-inf,0) e^{x}`.

use crate::error::Result;
use crate::expfun::{ef_inner, PiecewiseExp};
use crate::scalar::{from_real, imag_unit, modulus, Real, C};

/// `((A - iI)u, gamma)` with `A = i d/dx`; `u` must be continuous.
pub fn restriction_functional<T: Real>(
    u: &PiecewiseExp<T>,
    gamma: &PiecewiseExp<T>,
) -> Result<C<T>> {
    let i = imag_unit::<T>();
    let au = u.derivative()?.scale(i) - u.scale(i);
    Ok(ef_inner(&au, gamma))
}

/// Three continuous functions spanning the witness family: `e^{-|x|}`, a
/// two-rate exponential and the compact bump `e^{1-|x|} - 1` on `[-1, 1]`.
pub fn restriction_witness_family<T: Real>() -> [PiecewiseExp<T>; 3] {
    let c = |re: f64| C::new(T::lit(re), T::zero());
    let two_sided = PiecewiseExp::left(c(1.0), c(1.0)).expect("valid term")
        + PiecewiseExp::right(c(1.0), c(-1.0)).expect("valid term");
    let two_rate = PiecewiseExp::left(c(1.0), c(3.0)).expect("valid term")
        + PiecewiseExp::right(c(1.0), c(-0.5)).expect("valid term");
    let e = T::one().exp();
    let zero = c(0.0);
    let bump = PiecewiseExp::interval(-T::one(), T::zero(), from_real(e), c(1.0))
        .expect("valid term")
        + PiecewiseExp::interval(T::zero(), T::one(), from_real(e), c(-1.0)).expect("valid term")
        - PiecewiseExp::interval(-T::one(), T::one(), c(1.0), zero).expect("valid term");
    [two_sided, two_rate, bump]
}

fn value_at_zero<T: Real>(u: &PiecewiseExp<T>) -> C<T> {
    u.boundary().at0plus
}

fn combinations<T: Real>() -> Vec<PiecewiseExp<T>> {
    let fam = restriction_witness_family::<T>();
    let weights: [[f64; 6]; 4] = [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        [0.7, -0.2, -1.3, 0.4, 2.1, 0.9],
    ];
    let mut out: Vec<PiecewiseExp<T>> = fam.to_vec();
    for w in &weights[3..] {
        let mut u = PiecewiseExp::zero();
        for (k, f) in fam.iter().enumerate() {
            u = u + f.scale(C::new(T::lit(w[2 * k]), T::lit(w[2 * k + 1])));
        }
        out.push(u);
    }
    out
}

/// For `gamma = chi_(0,inf) e^{-x}` the restriction functional equals
/// `-i u(0)`, so the condition reads `u(0) = 0`. Returns the largest
/// mismatch over the witness family.
pub fn point_condition_check<T: Real>() -> Result<T> {
    let gamma = PiecewiseExp::right(C::new(T::one(), T::zero()), C::new(-T::one(), T::zero()))?;
    let i = imag_unit::<T>();
    let mut worst = T::zero();
    for u in combinations::<T>() {
        let lhs = restriction_functional(&u, &gamma)?;
        worst = worst.max(modulus(lhs + i * value_at_zero(&u)));
    }
    Ok(worst)
}

/// For `gamma = chi_(-inf,0) e^{x}` the restriction functional equals
/// `i[u(0) - 2 int_{-inf}^0 u(x) e^x dx]`, so the condition reads
/// `u(0) = 2 int_{-inf}^0 u e^x`. Returns the largest mismatch.
pub fn integral_condition_check<T: Real>() -> Result<T> {
    let one = C::new(T::one(), T::zero());
    let gamma = PiecewiseExp::left(one, one)?;
    let i = imag_unit::<T>();
    let mut worst = T::zero();
    for u in combinations::<T>() {
        let lhs = restriction_functional(&u, &gamma)?;
        let integral = ef_inner(&u.restrict_negative(), &gamma);
        let rhs = i * (value_at_zero(&u) - from_real(T::lit(2.0)) * integral);
        worst = worst.max(modulus(lhs - rhs));
    }
    Ok(worst)
}
