#![allow(dead_code)]

use proptest::prelude::*;
use pso_core::expfun::{Ext, PiecewiseExp};
use pso_core::scalar::{cplx, C};

pub fn c(re: f64, im: f64) -> C<f64> {
    cplx(re, im)
}

pub fn coeff() -> impl Strategy<Value = C<f64>> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

/// One square-integrable term: a left tail, a right tail, or a finite piece.
pub fn term() -> impl Strategy<Value = PiecewiseExp<f64>> {
    let tail_left =
        (coeff(), 0.2..3.0f64, -4.0..4.0f64, -2.0..2.0f64).prop_map(|(k, re, im, at)| {
            PiecewiseExp::on(Ext::NegInf, Ext::Finite(at), k, c(re, im)).unwrap()
        });
    let tail_right =
        (coeff(), -3.0..-0.2f64, -4.0..4.0f64, -2.0..2.0f64).prop_map(|(k, re, im, at)| {
            PiecewiseExp::on(Ext::Finite(at), Ext::PosInf, k, c(-re.abs(), im)).unwrap()
        });
    let piece = (
        coeff(),
        -2.0..2.0f64,
        -4.0..4.0f64,
        -3.0..3.0f64,
        0.1..3.0f64,
    )
        .prop_map(|(k, re, im, a, len)| PiecewiseExp::interval(a, a + len, k, c(re, im)).unwrap());
    prop_oneof![tail_left, tail_right, piece]
}

/// Sum of one to four random terms.
pub fn piecewise() -> impl Strategy<Value = PiecewiseExp<f64>> {
    prop::collection::vec(term(), 1..=4)
        .prop_map(|ts| ts.into_iter().fold(PiecewiseExp::zero(), |a, t| a + t))
}

/// Continuous fixture: `k e^{a x}` left of the origin glued to `k e^{b x}` right of it.
pub fn continuous() -> impl Strategy<Value = PiecewiseExp<f64>> {
    (
        coeff(),
        0.2..3.0f64,
        -3.0..3.0f64,
        -3.0..-0.2f64,
        -3.0..3.0f64,
    )
        .prop_map(|(k, ar, ai, br, bi)| {
            PiecewiseExp::left(k, c(ar, ai)).unwrap() + PiecewiseExp::right(k, c(br, bi)).unwrap()
        })
}
