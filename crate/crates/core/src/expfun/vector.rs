use std::ops::{Add, Sub};

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use super::{ef_inner, ef_inner_quadrature, PiecewiseExp};
use crate::error::Result;
use crate::scalar::{Real, C};

/// Function with values in `C^m`, one piecewise exponential per component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFn<T: Real> {
    components: Vec<PiecewiseExp<T>>,
}

impl<T: Real> VectorFn<T> {
    pub fn new(components: Vec<PiecewiseExp<T>>) -> Self {
        Self { components }
    }

    pub fn scalar(f: PiecewiseExp<T>) -> Self {
        Self::new(vec![f])
    }

    pub fn zero(m: usize) -> Self {
        Self::new(vec![PiecewiseExp::zero(); m])
    }

    /// `f` placed in component `j` of an `m`-vector.
    pub fn unit(m: usize, j: usize, f: PiecewiseExp<T>) -> Self {
        let mut v = Self::zero(m);
        v.components[j] = f;
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[PiecewiseExp<T>] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &PiecewiseExp<T> {
        &self.components[j]
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.components
            .iter()
            .zip(&other.components)
            .fold(C::zero(), |acc, (a, b)| acc + ef_inner(a, b))
    }

    pub fn inner_quadrature(&self, other: &Self, rel_tol: T) -> Result<C<T>> {
        let mut acc = C::zero();
        for (a, b) in self.components.iter().zip(&other.components) {
            acc += ef_inner_quadrature(a, b, rel_tol)?;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> T {
        self.inner(self).re.max(T::zero()).sqrt()
    }

    pub fn scale(&self, k: C<T>) -> Self {
        Self::new(self.components.iter().map(|f| f.scale(k)).collect())
    }

    pub fn map(&self, op: impl Fn(&PiecewiseExp<T>) -> PiecewiseExp<T>) -> Self {
        Self::new(self.components.iter().map(op).collect())
    }

    pub fn try_map(
        &self,
        op: impl Fn(&PiecewiseExp<T>) -> Result<PiecewiseExp<T>>,
    ) -> Result<Self> {
        Ok(Self::new(
            self.components.iter().map(op).collect::<Result<_>>()?,
        ))
    }

    /// Vector of left limits at the origin.
    pub fn at0minus(&self) -> DVector<C<T>> {
        DVector::from_iterator(
            self.dim(),
            self.components.iter().map(|f| f.boundary().at0minus),
        )
    }

    /// Vector of right limits at the origin.
    pub fn at0plus(&self) -> DVector<C<T>> {
        DVector::from_iterator(
            self.dim(),
            self.components.iter().map(|f| f.boundary().at0plus),
        )
    }

    /// Pointwise product `M f(x)` with a constant matrix.
    pub fn apply_matrix(&self, m: &DMatrix<C<T>>) -> Self {
        let comps = (0..m.nrows())
            .map(|r| {
                self.components
                    .iter()
                    .enumerate()
                    .fold(PiecewiseExp::zero(), |acc, (c, f)| acc + f.scale(m[(r, c)]))
            })
            .collect();
        Self::new(comps)
    }

    pub fn max_coeff(&self) -> T {
        self.components
            .iter()
            .map(|f| f.max_coeff())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

impl<T: Real> Add for VectorFn<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.components
                .into_iter()
                .zip(rhs.components)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl<T: Real> Sub for VectorFn<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.components
                .into_iter()
                .zip(rhs.components)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}
