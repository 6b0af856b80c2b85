use nalgebra::ComplexField;
use num_traits::Zero;

use super::{ExpTerm, Ext, PiecewiseExp, DEGENERATE_EXPONENT};
use crate::error::{Error, Result};
use crate::scalar::{expm1, from_real, modulus, Real, C};

/// `(f, g) = \int f(x) conj(g(x)) dx`, evaluated term by term in closed form.
pub fn ef_inner<T: Real>(f: &PiecewiseExp<T>, g: &PiecewiseExp<T>) -> C<T> {
    let mut acc = C::zero();
    for a in f.terms() {
        for b in g.terms() {
            acc += term_pair(a, b);
        }
    }
    acc
}

fn term_pair<T: Real>(a: &ExpTerm<T>, b: &ExpTerm<T>) -> C<T> {
    let lo = a.lo.max_of(b.lo);
    let hi = a.hi.min_of(b.hi);
    if lo >= hi {
        return C::zero();
    }
    let k = a.exponent + b.exponent.conj();
    let n = a.power + b.power;
    a.coeff * b.coeff.conj() * monomial_exp_integral(k, n, lo, hi)
}

/// `\int_lo^hi x^n e^{k x} dx`; the caller guarantees convergence at
/// infinite endpoints.
pub(crate) fn monomial_exp_integral<T: Real>(k: C<T>, n: u32, lo: Ext<T>, hi: Ext<T>) -> C<T> {
    match (lo, hi) {
        (Ext::Finite(a), Ext::Finite(b)) => {
            // substitute x = a + y and expand (a + y)^n
            let len = b - a;
            let mut acc: C<T> = C::zero();
            let mut binom = T::one();
            for r in 0..=n {
                let apow = if n - r == 0 {
                    T::one()
                } else {
                    a.powi((n - r) as i32)
                };
                acc += from_real(binom * apow) * shifted_integral(k, r, len);
                binom = binom * T::from_u32(n - r).unwrap() / T::from_u32(r + 1).unwrap();
            }
            acc * (k * from_real(a)).exp()
        }
        (Ext::Finite(a), Ext::PosInf) => -antiderivative(k, n, a),
        (Ext::NegInf, Ext::Finite(b)) => antiderivative(k, n, b),
        _ => unreachable!("valid terms never cover the whole line"),
    }
}

/// `\int_0^len y^r e^{k y} dy`.
fn shifted_integral<T: Real>(k: C<T>, r: u32, len: T) -> C<T> {
    let kl = modulus(k) * len;
    if modulus(k) < T::lit(DEGENERATE_EXPONENT) {
        return from_real(len.powi(r as i32 + 1) / T::from_u32(r + 1).unwrap());
    }
    if r == 0 {
        return expm1(k * from_real(len)) / k;
    }
    if kl <= T::lit(0.5) {
        // power series of e^{ky}
        let mut acc = C::zero();
        let mut term = from_real(len.powi(r as i32 + 1));
        let mut m = 0u32;
        loop {
            let contrib = term / from_real(T::from_u32(r + m + 1).unwrap());
            acc += contrib;
            if modulus(contrib) <= T::default_epsilon() * modulus(acc) || m > 60 {
                break;
            }
            m += 1;
            term = term * k * from_real(len / T::from_u32(m).unwrap());
        }
        return acc;
    }
    antiderivative(k, r, len) - antiderivative(k, r, T::zero())
}

/// `F(x) = e^{kx} sum_j (-1)^j r!/(r-j)! x^{r-j} / k^{j+1}`, so `F' = x^r e^{kx}`.
pub(crate) fn antiderivative<T: Real>(k: C<T>, r: u32, x: T) -> C<T> {
    (k * from_real(x)).exp() * antiderivative_poly(k, r, x)
}

/// Polynomial factor `P` of the antiderivative `e^{kx} P(x)`.
pub(crate) fn antiderivative_poly<T: Real>(k: C<T>, r: u32, x: T) -> C<T> {
    antiderivative_coeffs(k, r)
        .into_iter()
        .enumerate()
        .fold(C::zero(), |acc, (deg, c)| {
            let xp = if deg == 0 {
                T::one()
            } else {
                x.powi(deg as i32)
            };
            acc + c * from_real(xp)
        })
}

/// Coefficients (by ascending degree) of `P` in `\int x^r e^{kx} = e^{kx} P(x)`.
pub(crate) fn antiderivative_coeffs<T: Real>(k: C<T>, r: u32) -> Vec<C<T>> {
    let mut coeffs = vec![C::zero(); r as usize + 1];
    // j-th term: (-1)^j r!/(r-j)! x^{r-j} / k^{j+1}
    let mut falling = T::one();
    let mut kpow = k;
    for j in 0..=r {
        let sign = if j % 2 == 0 { T::one() } else { -T::one() };
        coeffs[(r - j) as usize] = from_real(sign * falling) / kpow;
        falling *= T::from_u32(r - j).unwrap();
        kpow *= k;
    }
    coeffs
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let mut rule = Vec::with_capacity(n);
    let nf = T::from_usize(n).unwrap();
    for i in 0..n {
        // Chebyshev-like initial guess, refined by Newton on P_n
        let guess =
            (T::pi() * (T::from_usize(i).unwrap() + T::lit(0.75)) / (nf + T::lit(0.5))).cos();
        let mut x = guess;
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::default_epsilon() * T::lit(4.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize(k).unwrap();
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize(n).unwrap();
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

const GL_POINTS: usize = 32;
const PANEL_WIDTH: f64 = 0.5;
const TAIL_ENVELOPE: f64 = 1e-16;
const PANEL_BUDGET: usize = 2_000_000;

/// Independent numerical evaluation of `(f, g)` by composite Gauss-Legendre
/// panels. Panels never straddle a breakpoint of either function; infinite
/// tails are cut where the product envelope drops below `1e-16`. The panel
/// width is halved until two successive estimates agree to `rel_tol`.
pub fn ef_inner_quadrature<T: Real>(
    f: &PiecewiseExp<T>,
    g: &PiecewiseExp<T>,
    rel_tol: T,
) -> Result<C<T>> {
    if rel_tol <= T::zero() {
        return Err(Error::InvalidParameter("rel_tol must be positive".into()));
    }
    let rule = gauss_legendre::<T>(GL_POINTS);
    let mut width = T::lit(PANEL_WIDTH);
    let mut previous = integrate_panels(f, g, width, &rule)?.0;
    let mut used = 0usize;
    loop {
        width /= T::lit(2.0);
        let (value, panels) = integrate_panels(f, g, width, &rule)?;
        used += panels;
        if modulus(value - previous) <= rel_tol * (T::one() + modulus(value)) {
            return Ok(value);
        }
        if used > PANEL_BUDGET {
            return Err(Error::QuadratureFailure { panels: used });
        }
        previous = value;
    }
}

fn integrate_panels<T: Real>(
    f: &PiecewiseExp<T>,
    g: &PiecewiseExp<T>,
    width: T,
    rule: &[(T, T)],
) -> Result<(C<T>, usize)> {
    let mut pts: Vec<T> = f.breakpoints();
    pts.extend(g.breakpoints());
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.is_empty() {
        return Ok((C::zero(), 0));
    }
    let first = pts[0];
    let last = *pts.last().unwrap();

    let left_terms = |h: &PiecewiseExp<T>| -> Vec<ExpTerm<T>> {
        h.terms()
            .iter()
            .copied()
            .filter(|t| t.lo == Ext::NegInf)
            .collect()
    };
    let right_terms = |h: &PiecewiseExp<T>| -> Vec<ExpTerm<T>> {
        h.terms()
            .iter()
            .copied()
            .filter(|t| t.hi == Ext::PosInf)
            .collect()
    };

    let mut segments: Vec<(T, T)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
    let (lf, lg) = (left_terms(f), left_terms(g));
    if !lf.is_empty() && !lg.is_empty() {
        let end = tail_end(&lf, &lg, first, -width)?;
        segments.insert(0, (end, first));
    }
    let (rf, rg) = (right_terms(f), right_terms(g));
    if !rf.is_empty() && !rg.is_empty() {
        let end = tail_end(&rf, &rg, last, width)?;
        segments.push((last, end));
    }

    let mut acc = C::zero();
    let mut panels = 0usize;
    let half = T::lit(0.5);
    for (a, b) in segments {
        let count = ((b - a) / width).ceil().max(T::one());
        let n = count.to_usize().unwrap_or(usize::MAX);
        if panels + n > PANEL_BUDGET {
            return Err(Error::QuadratureFailure { panels: panels + n });
        }
        let h = (b - a) / count;
        for p in 0..n {
            let lo = a + h * T::from_usize(p).unwrap();
            let mid = lo + h * half;
            for &(node, weight) in rule {
                let x = mid + h * half * node;
                acc += f.eval(x) * g.eval(x).conj() * from_real(weight * h * half);
            }
        }
        panels += n;
    }
    Ok((acc, panels))
}

fn envelope<T: Real>(terms: &[ExpTerm<T>], x: T) -> T {
    terms.iter().fold(T::zero(), |acc, t| {
        let poly = if t.power == 0 {
            T::one()
        } else {
            x.abs().powi(t.power as i32)
        };
        acc + modulus(t.coeff) * poly * (t.exponent.re * x).exp()
    })
}

/// Marches away from `start` in steps of `step` until the product envelope
/// is below the cut-off and every polynomial factor is past its maximum.
fn tail_end<T: Real>(fa: &[ExpTerm<T>], fb: &[ExpTerm<T>], start: T, step: T) -> Result<T> {
    let turning = fa
        .iter()
        .chain(fb)
        .filter(|t| t.power > 0)
        .map(|t| (T::from_u32(t.power).unwrap() / t.exponent.re).abs())
        .fold(T::zero(), |a, b| a.max(b));
    let mut x = start;
    for steps in 0..PANEL_BUDGET {
        x += step;
        let past_turning = x.abs() >= turning;
        if past_turning && envelope(fa, x) * envelope(fb, x) < T::lit(TAIL_ENVELOPE) {
            return Ok(x);
        }
        if steps + 1 == PANEL_BUDGET {
            break;
        }
    }
    Err(Error::QuadratureFailure {
        panels: PANEL_BUDGET,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type F = PiecewiseExp<f64>;

    fn c(re: f64, im: f64) -> C<f64> {
        cplx(re, im)
    }

    #[test]
    fn closed_form_examples() {
        let left = F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let right = F::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        let right2 = F::right(c(1.0, 0.0), c(-2.0, 0.0)).unwrap();
        assert!((ef_inner(&left, &left) - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(ef_inner(&left, &right), c(0.0, 0.0));
        assert!((ef_inner(&right, &right2) - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_exponent_uses_interval_length() {
        let f = F::interval(-0.5, 2.0, c(1.0, 0.0), c(0.0, 3.0)).unwrap();
        assert!((ef_inner(&f, &f) - c(2.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn polynomial_terms_integrate_exactly() {
        // \int_0^inf x e^{-x} e^{-x} dx = 1/4
        let t = ExpTerm::with_power(c(1.0, 0.0), Ext::Finite(0.0), Ext::PosInf, c(-1.0, 0.0), 1)
            .unwrap();
        let f = F::from_term(t);
        let g = F::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!((ef_inner(&f, &g) - c(0.25, 0.0)).norm() < 1e-15);
        // \int_1^2 x^2 dx = 7/3
        let t = ExpTerm::with_power(
            c(1.0, 0.0),
            Ext::Finite(1.0),
            Ext::Finite(2.0),
            c(0.0, 0.0),
            2,
        )
        .unwrap();
        let one = F::interval(1.0, 2.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((ef_inner(&F::from_term(t), &one) - c(7.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre::<f64>(32);
        let sum_w: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((sum_w - 2.0).abs() < 1e-14);
        let x62: f64 = rule.iter().map(|(x, w)| w * x.powi(62)).sum();
        assert!((x62 - 2.0 / 63.0).abs() < 1e-14);
    }

    #[test]
    fn quadrature_examples() {
        let tol = 1e-12;
        let left = F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((ef_inner_quadrature(&left, &left, tol).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
        let box_ = F::interval(0.0, 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((ef_inner_quadrature(&box_, &box_, tol).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        let f = F::right(c(1.0, 0.0), c(-1.0, 3.0)).unwrap();
        let g = F::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        let exact = ef_inner(&f, &g);
        assert!((exact - c(1.0, 0.0) / c(2.0, -3.0)).norm() < 1e-15);
        assert!(
            (ef_inner_quadrature(&f, &g, tol).unwrap() - exact).norm() < tol * (1.0 + exact.norm())
        );
    }

    #[test]
    fn quadrature_rejects_non_positive_tolerance() {
        let f = F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(ef_inner_quadrature(&f, &f, 0.0).is_err());
    }
}
