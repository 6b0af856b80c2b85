//! Exact algebra of piecewise exponential functions on the real line.
//!
//! A function is a finite sum of terms `c * x^p * exp(s x)` restricted to an
//! interval `(lo, hi)` whose endpoints may be infinite. Inner products,
//! one-sided limits, derivatives, translations, dilations, modulations and
//! the resolvent of the free momentum operator are all closed-form on this
//! class. The polynomial factor `x^p` only appears when a resolvent hits an
//! exponent that coincides with the spectral parameter.

mod inner;
mod json;
mod resolvent;
mod vector;

use nalgebra::ComplexField;
use std::cmp::Ordering;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{from_real, modulus, Real, C};

pub use inner::{ef_inner, ef_inner_quadrature, gauss_legendre};
pub use json::{BoundRecord, TermRecord};
pub use resolvent::ef_free_resolvent;
pub use vector::VectorFn;

/// Coefficient tolerance used when comparing canonical forms.
pub const COEFF_TOL: f64 = 1e-13;
/// Below this modulus an integration exponent is treated as exactly zero.
pub const DEGENERATE_EXPONENT: f64 = 1e-14;
/// Jumps smaller than this count as continuity.
pub const JUMP_TOL: f64 = 1e-13;

/// A point of the extended real line.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Ext<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Real> Ext<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Ext::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    fn shifted(self, y: T) -> Self {
        match self {
            Ext::Finite(x) => Ext::Finite(x + y),
            other => other,
        }
    }

    fn scaled(self, k: T) -> Self {
        match self {
            Ext::Finite(x) => Ext::Finite(x * k),
            other => other,
        }
    }

    fn max_of(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn min_of(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// `self < x` for a finite `x`.
    fn below(self, x: T) -> bool {
        self < Ext::Finite(x)
    }

    /// `self > x` for a finite `x`.
    fn above(self, x: T) -> bool {
        self > Ext::Finite(x)
    }
}

/// One term `coeff * x^power * exp(exponent * x)` supported on `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpTerm<T: Real> {
    coeff: C<T>,
    lo: Ext<T>,
    hi: Ext<T>,
    exponent: C<T>,
    power: u32,
}

impl<T: Real> ExpTerm<T> {
    pub fn new(coeff: C<T>, lo: Ext<T>, hi: Ext<T>, exponent: C<T>) -> Result<Self> {
        Self::with_power(coeff, lo, hi, exponent, 0)
    }

    pub fn with_power(
        coeff: C<T>,
        lo: Ext<T>,
        hi: Ext<T>,
        exponent: C<T>,
        power: u32,
    ) -> Result<Self> {
        let finite = |z: C<T>| z.re.is_finite() && z.im.is_finite();
        if !finite(coeff) || !finite(exponent) {
            return Err(Error::InvalidTerm(
                "non-finite coefficient or exponent".into(),
            ));
        }
        for b in [lo, hi] {
            if let Ext::Finite(x) = b {
                if !x.is_finite() {
                    return Err(Error::InvalidTerm("non-finite breakpoint".into()));
                }
            }
        }
        if lo == Ext::PosInf || hi == Ext::NegInf || lo >= hi {
            return Err(Error::InvalidTerm(format!(
                "empty interval ({lo:?}, {hi:?})"
            )));
        }
        if lo == Ext::NegInf && exponent.re <= T::zero() {
            return Err(Error::InvalidTerm(
                "term reaching -inf needs Re(exponent) > 0".into(),
            ));
        }
        if hi == Ext::PosInf && exponent.re >= T::zero() {
            return Err(Error::InvalidTerm(
                "term reaching +inf needs Re(exponent) < 0".into(),
            ));
        }
        Ok(Self::raw(coeff, lo, hi, exponent, power))
    }

    pub(crate) fn raw(coeff: C<T>, lo: Ext<T>, hi: Ext<T>, exponent: C<T>, power: u32) -> Self {
        Self {
            coeff,
            lo,
            hi,
            exponent,
            power,
        }
    }

    pub fn coeff(&self) -> C<T> {
        self.coeff
    }

    pub fn lo(&self) -> Ext<T> {
        self.lo
    }

    pub fn hi(&self) -> Ext<T> {
        self.hi
    }

    pub fn exponent(&self) -> C<T> {
        self.exponent
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// Value of the analytic expression at `x`, ignoring the support.
    pub fn expression_at(&self, x: T) -> C<T> {
        let poly = if self.power == 0 {
            T::one()
        } else {
            x.powi(self.power as i32)
        };
        self.coeff * (self.exponent * from_real(x)).exp() * poly
    }

    fn contains_open(&self, x: T) -> bool {
        self.lo.below(x) && self.hi.above(x)
    }
}

/// One-sided limits at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryValues<T: Real> {
    pub at0minus: C<T>,
    pub at0plus: C<T>,
}

/// Operations accepted by [`PiecewiseExp::transform`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Transform<T> {
    /// `x -> f(x - y)`
    Translate(T),
    /// `x -> 2^(j/2) f(2^j x)`; `Dilate(1)` is the unitary dilation by two.
    Dilate(i32),
    /// `x -> exp(-i t x) f(x)`
    Modulate(T),
    /// Piecewise derivative of a continuous function.
    Derivative,
}

/// Finite sum of [`ExpTerm`]s held in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseExp<T: Real> {
    terms: Vec<ExpTerm<T>>,
}

impl<T: Real> Default for PiecewiseExp<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> PiecewiseExp<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn new(terms: Vec<ExpTerm<T>>) -> Self {
        Self {
            terms: canonicalize(terms),
        }
    }

    pub fn from_term(term: ExpTerm<T>) -> Self {
        Self::new(vec![term])
    }

    /// `coeff * exp(s x)` on `(lo, hi)`.
    pub fn on(lo: Ext<T>, hi: Ext<T>, coeff: C<T>, exponent: C<T>) -> Result<Self> {
        Ok(Self::from_term(ExpTerm::new(coeff, lo, hi, exponent)?))
    }

    /// `coeff * exp(s x)` on the negative half-line.
    pub fn left(coeff: C<T>, exponent: C<T>) -> Result<Self> {
        Self::on(Ext::NegInf, Ext::Finite(T::zero()), coeff, exponent)
    }

    /// `coeff * exp(s x)` on the positive half-line.
    pub fn right(coeff: C<T>, exponent: C<T>) -> Result<Self> {
        Self::on(Ext::Finite(T::zero()), Ext::PosInf, coeff, exponent)
    }

    /// `coeff * exp(s x)` on the finite interval `(a, b)`.
    pub fn interval(a: T, b: T, coeff: C<T>, exponent: C<T>) -> Result<Self> {
        Self::on(Ext::Finite(a), Ext::Finite(b), coeff, exponent)
    }

    pub fn terms(&self) -> &[ExpTerm<T>] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient modulus of the canonical form.
    pub fn max_coeff(&self) -> T {
        self.terms
            .iter()
            .map(|t| modulus(t.coeff))
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Coefficient-level comparison of canonical forms.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        (self.clone() - other.clone()).max_coeff() <= tol
    }

    /// Sorted finite endpoints of all terms.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut pts: Vec<T> = self
            .terms
            .iter()
            .flat_map(|t| [t.lo.finite(), t.hi.finite()])
            .flatten()
            .collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        pts.dedup();
        pts
    }

    /// Value at a point that is not a breakpoint.
    pub fn eval(&self, x: T) -> C<T> {
        self.terms
            .iter()
            .filter(|t| t.contains_open(x))
            .fold(C::zero(), |acc, t| acc + t.expression_at(x))
    }

    /// Limit from the left at `x`.
    pub fn limit_left(&self, x: T) -> C<T> {
        self.terms
            .iter()
            .filter(|t| t.lo.below(x) && t.hi >= Ext::Finite(x))
            .fold(C::zero(), |acc, t| acc + t.expression_at(x))
    }

    /// Limit from the right at `x`.
    pub fn limit_right(&self, x: T) -> C<T> {
        self.terms
            .iter()
            .filter(|t| t.lo <= Ext::Finite(x) && t.hi.above(x))
            .fold(C::zero(), |acc, t| acc + t.expression_at(x))
    }

    pub fn jump_at(&self, x: T) -> C<T> {
        self.limit_right(x) - self.limit_left(x)
    }

    /// One-sided limits at the origin.
    pub fn boundary(&self) -> BoundaryValues<T> {
        BoundaryValues {
            at0minus: self.limit_left(T::zero()),
            at0plus: self.limit_right(T::zero()),
        }
    }

    pub fn conj(&self) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| ExpTerm::raw(t.coeff.conj(), t.lo, t.hi, t.exponent.conj(), t.power))
                .collect(),
        )
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| ExpTerm {
                    coeff: t.coeff * k,
                    ..*t
                })
                .collect(),
        )
    }

    /// Restriction to `(lo, hi)`.
    pub fn restrict(&self, lo: Ext<T>, hi: Ext<T>) -> Self {
        Self::new(
            self.terms
                .iter()
                .filter_map(|t| {
                    let a = t.lo.max_of(lo);
                    let b = t.hi.min_of(hi);
                    (a < b).then_some(ExpTerm { lo: a, hi: b, ..*t })
                })
                .collect(),
        )
    }

    pub fn restrict_negative(&self) -> Self {
        self.restrict(Ext::NegInf, Ext::Finite(T::zero()))
    }

    pub fn restrict_positive(&self) -> Self {
        self.restrict(Ext::Finite(T::zero()), Ext::PosInf)
    }

    pub fn norm(&self) -> T {
        ef_inner(self, self).re.max(T::zero()).sqrt()
    }

    /// Applies a translation, dilation, modulation or derivative.
    pub fn transform(&self, kind: Transform<T>) -> Result<Self> {
        match kind {
            Transform::Translate(y) => Ok(self.translate(y)),
            Transform::Dilate(j) => Ok(self.dilate(j)),
            Transform::Modulate(t) => Ok(self.modulate(t)),
            Transform::Derivative => self.derivative(),
        }
    }

    pub fn translate(&self, y: T) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            // c (x-y)^p e^{s(x-y)} = c e^{-sy} sum_r binom(p,r) (-y)^{p-r} x^r e^{sx}
            let base = t.coeff * (-t.exponent * from_real(y)).exp();
            let mut binom = T::one();
            for r in (0..=t.power).rev() {
                let k = t.power - r;
                let factor = if k == 0 {
                    T::one()
                } else {
                    (-y).powi(k as i32)
                };
                out.push(ExpTerm::raw(
                    base * from_real(binom * factor),
                    t.lo.shifted(y),
                    t.hi.shifted(y),
                    t.exponent,
                    r,
                ));
                // binom(p, k+1) from binom(p, k)
                binom = binom * T::from_u32(r).unwrap() / T::from_u32(k + 1).unwrap();
            }
        }
        Self::new(out)
    }

    pub fn dilate(&self, j: i32) -> Self {
        let two = T::lit(2.0);
        let factor = two.powi(j);
        let amplitude = two.powf(T::lit(j as f64 / 2.0));
        Self::new(
            self.terms
                .iter()
                .map(|t| {
                    ExpTerm::raw(
                        t.coeff * from_real(amplitude * factor.powi(t.power as i32)),
                        t.lo.scaled(T::one() / factor),
                        t.hi.scaled(T::one() / factor),
                        t.exponent * from_real(factor),
                        t.power,
                    )
                })
                .collect(),
        )
    }

    pub fn modulate(&self, t: T) -> Self {
        let shift = Complex::new(T::zero(), t);
        Self::new(
            self.terms
                .iter()
                .map(|term| ExpTerm {
                    exponent: term.exponent - shift,
                    ..*term
                })
                .collect(),
        )
    }

    /// Derivative of a function continuous at every finite breakpoint.
    pub fn derivative(&self) -> Result<Self> {
        self.derivative_allowing_jumps(&[])
    }

    /// Piecewise derivative; jumps are permitted only at the listed points.
    pub fn derivative_allowing_jumps(&self, allowed: &[T]) -> Result<Self> {
        for x in self.breakpoints() {
            if allowed.contains(&x) {
                continue;
            }
            let jump = modulus(self.jump_at(x));
            if jump > T::lit(JUMP_TOL) {
                return Err(Error::Discontinuous {
                    at: x.to_f64_lossy(),
                    jump: jump.to_f64_lossy(),
                });
            }
        }
        Ok(self.derivative_unchecked())
    }

    pub(crate) fn derivative_unchecked(&self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() * 2);
        for t in &self.terms {
            out.push(ExpTerm::raw(
                t.coeff * t.exponent,
                t.lo,
                t.hi,
                t.exponent,
                t.power,
            ));
            if t.power > 0 {
                out.push(ExpTerm::raw(
                    t.coeff * from_real(T::from_u32(t.power).unwrap()),
                    t.lo,
                    t.hi,
                    t.exponent,
                    t.power - 1,
                ));
            }
        }
        Self::new(out)
    }
}

impl<T: Real> Add for PiecewiseExp<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.terms.extend(rhs.terms);
        Self::new(self.terms)
    }
}

impl<T: Real> Sub for PiecewiseExp<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for PiecewiseExp<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for t in &mut self.terms {
            t.coeff = -t.coeff;
        }
        self
    }
}

impl<T: Real> Mul<C<T>> for PiecewiseExp<T> {
    type Output = Self;
    fn mul(self, k: C<T>) -> Self {
        self.scale(k)
    }
}

fn exponents_match<T: Real>(a: C<T>, b: C<T>) -> bool {
    modulus(a - b) <= T::lit(COEFF_TOL) * (T::one() + modulus(a))
}

fn coeffs_match<T: Real>(a: C<T>, b: C<T>) -> bool {
    modulus(a - b) <= T::lit(COEFF_TOL) * T::one().max(modulus(a))
}

type Group<T> = (C<T>, u32, C<T>);
/// Interval with its grouped terms.
type Span<T> = (Ext<T>, Ext<T>, Vec<Group<T>>);

/// Splits every term at every breakpoint, merges equal exponents per cell,
/// drops vanishing coefficients and re-joins neighbouring cells with equal
/// content. The result is unique for a given function.
fn canonicalize<T: Real>(terms: Vec<ExpTerm<T>>) -> Vec<ExpTerm<T>> {
    if terms.is_empty() {
        return terms;
    }
    let mut pts: Vec<T> = terms
        .iter()
        .flat_map(|t| [t.lo.finite(), t.hi.finite()])
        .flatten()
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    pts.dedup();

    let mut cells: Vec<(Ext<T>, Ext<T>)> = Vec::with_capacity(pts.len() + 1);
    if terms.iter().any(|t| t.lo == Ext::NegInf) {
        cells.push((Ext::NegInf, Ext::Finite(pts[0])));
    }
    for w in pts.windows(2) {
        cells.push((Ext::Finite(w[0]), Ext::Finite(w[1])));
    }
    if terms.iter().any(|t| t.hi == Ext::PosInf) {
        cells.push((Ext::Finite(*pts.last().unwrap()), Ext::PosInf));
    }

    let mut filled: Vec<Span<T>> = Vec::new();
    for (lo, hi) in cells {
        let mut groups: Vec<Group<T>> = Vec::new();
        for t in terms.iter().filter(|t| t.lo <= lo && hi <= t.hi) {
            match groups
                .iter_mut()
                .find(|g| g.1 == t.power && exponents_match(g.0, t.exponent))
            {
                Some(g) => g.2 += t.coeff,
                None => groups.push((t.exponent, t.power, t.coeff)),
            }
        }
        groups.retain(|g| !g.2.is_zero());
        if groups.is_empty() {
            continue;
        }
        groups.sort_by(|a, b| {
            (a.0.re, a.0.im, a.1)
                .partial_cmp(&(b.0.re, b.0.im, b.1))
                .unwrap_or(Ordering::Equal)
        });
        if let Some(prev) = filled.last_mut() {
            let same = prev.1 == lo
                && prev.2.len() == groups.len()
                && prev.2.iter().zip(&groups).all(|(a, b)| {
                    a.1 == b.1 && exponents_match(a.0, b.0) && coeffs_match(a.2, b.2)
                });
            if same {
                prev.1 = hi;
                continue;
            }
        }
        filled.push((lo, hi, groups));
    }

    filled
        .into_iter()
        .flat_map(|(lo, hi, groups)| {
            groups
                .into_iter()
                .map(move |(s, p, c)| ExpTerm::raw(c, lo, hi, s, p))
        })
        .collect()
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
    fn invalid_terms_are_rejected() {
        assert!(ExpTerm::new(c(1.0, 0.0), Ext::NegInf, Ext::Finite(0.0), c(-1.0, 0.0)).is_err());
        assert!(ExpTerm::new(c(1.0, 0.0), Ext::Finite(0.0), Ext::PosInf, c(0.0, 3.0)).is_err());
        assert!(
            ExpTerm::new(c(1.0, 0.0), Ext::Finite(1.0), Ext::Finite(1.0), c(0.0, 0.0)).is_err()
        );
        assert!(ExpTerm::new(c(1.0, 0.0), Ext::Finite(0.0), Ext::Finite(1.0), c(7.0, 0.0)).is_ok());
    }

    #[test]
    fn boundary_values() {
        let f = F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let b = f.boundary();
        assert_eq!((b.at0minus, b.at0plus), (c(1.0, 0.0), c(0.0, 0.0)));

        let g = F::right(c(5.0, 0.0), c(-2.0, 0.0)).unwrap();
        let b = g.boundary();
        assert_eq!((b.at0minus, b.at0plus), (c(0.0, 0.0), c(5.0, 0.0)));

        let h = f - F::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        let b = h.boundary();
        assert_eq!((b.at0minus, b.at0plus), (c(1.0, 0.0), c(-1.0, 0.0)));
    }

    #[test]
    fn canonical_form_joins_adjacent_pieces() {
        let a = F::interval(0.0, 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let b = F::interval(1.0, 2.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let whole = F::interval(0.0, 2.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(a + b, whole);
    }

    #[test]
    fn difference_of_equal_functions_is_empty() {
        let f = F::left(c(2.0, 1.0), c(1.0, 3.0)).unwrap()
            + F::interval(-1.0, 2.0, c(0.5, 0.0), c(0.3, 0.0)).unwrap();
        assert!((f.clone() - f).is_empty());
    }

    #[test]
    fn dilation_of_indicator() {
        let f = F::interval(0.0, 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let expected = F::interval(0.0, 0.5, c(2f64.sqrt(), 0.0), c(0.0, 0.0)).unwrap();
        assert!(f.dilate(1).approx_eq(&expected, 1e-15));
        assert!(f.dilate(1).dilate(-1).approx_eq(&f, 1e-15));
    }

    #[test]
    fn modulation_shifts_exponent() {
        let f = F::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        let expected = F::right(c(1.0, 0.0), c(-1.0, -1.0)).unwrap();
        assert_eq!(f.modulate(1.0), expected);
    }

    #[test]
    fn derivative_of_two_sided_exponential() {
        let f = F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap()
            + F::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        let d = f.transform(Transform::Derivative).unwrap();
        let expected = F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap()
            - F::right(c(1.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert_eq!(d.terms().len(), 2);
        assert!(d.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn derivative_reports_the_jump_location() {
        let f = F::left(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        match f.derivative() {
            Err(Error::Discontinuous { at, jump }) => {
                assert_eq!(at, 0.0);
                assert!((jump - 1.0).abs() < 1e-15);
            }
            other => panic!("expected discontinuity, got {other:?}"),
        }
        assert!(f.derivative_allowing_jumps(&[0.0]).is_ok());
    }

    #[test]
    fn translation_of_polynomial_term() {
        // x e^{-x} on (0, inf) shifted by 2 is (x-2) e^{-(x-2)} on (2, inf)
        let t = ExpTerm::with_power(c(1.0, 0.0), Ext::Finite(0.0), Ext::PosInf, c(-1.0, 0.0), 1)
            .unwrap();
        let f = F::from_term(t).translate(2.0);
        for x in [2.5, 3.0, 7.25] {
            let expected = (x - 2.0) * (-(x - 2.0f64)).exp();
            assert!((f.eval(x).re - expected).abs() < 1e-14);
            assert!(f.eval(x).im.abs() < 1e-14);
        }
        assert_eq!(f.eval(1.0), c(0.0, 0.0));
    }

    #[test]
    fn restriction_to_half_lines() {
        let f = F::interval(-1.0, 1.0, c(1.0, 0.0), c(0.5, 0.0)).unwrap();
        let left = f.restrict_negative();
        let right = f.restrict_positive();
        assert!((left + right).approx_eq(&f, 1e-15));
        assert_eq!(f.restrict_positive().eval(-0.5), c(0.0, 0.0));
    }
}
