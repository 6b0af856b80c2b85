//! Boundary triplets, characteristic functions and certification checks for
//! Phillips symmetric operators.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to `f64`.

pub mod error;
pub mod expfun;
pub mod matops;
pub mod models;
pub mod psocheck;
pub mod scalar;
pub mod triplets;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = scalar::C<f64>;
pub type PiecewiseExpF64 = expfun::PiecewiseExp<f64>;
pub type VectorFnF64 = expfun::VectorFn<f64>;
pub type CMatF64 = matops::CMat<f64>;
pub type KreinBlockOperatorF64 = matops::KreinBlockOperator<f64>;
pub type BoundaryTripletF64 = triplets::BoundaryTriplet<f64>;
pub type MomentumModelF64 = models::MomentumModel<f64>;
pub type NonlocalModelF64 = models::NonlocalModel<f64>;
pub type ShiftModelF64 = models::ShiftModel<f64>;
pub type GridF64 = psocheck::Grid<f64>;
