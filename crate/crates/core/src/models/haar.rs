use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::expfun::{ef_inner, PiecewiseExp};
use crate::matops::CMat;
use crate::scalar::{Real, C};

/// `psi = chi_[0,1/2) - chi_[1/2,1)`.
pub fn haar_mother<T: Real>() -> PiecewiseExp<T> {
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    let half = T::lit(0.5);
    let up = PiecewiseExp::interval(T::zero(), half, one, zero).expect("valid interval");
    let down = PiecewiseExp::interval(half, T::one(), -one, zero).expect("valid interval");
    up + down
}

/// The family `D^j T^k psi = 2^{j/2} psi(2^j x - k)` over finite index ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaarSystem {
    pub j_range: RangeInclusive<i32>,
    pub k_range: RangeInclusive<i32>,
}

impl HaarSystem {
    pub fn new(j_range: RangeInclusive<i32>, k_range: RangeInclusive<i32>) -> Result<Self> {
        if j_range.is_empty() || k_range.is_empty() {
            return Err(Error::InvalidParameter("empty index range".into()));
        }
        Ok(Self { j_range, k_range })
    }

    /// Index pairs in row-major order (`j` outer, `k` inner).
    pub fn indices(&self) -> Vec<(i32, i32)> {
        self.j_range
            .clone()
            .flat_map(|j| self.k_range.clone().map(move |k| (j, k)))
            .collect()
    }

    pub fn element<T: Real>(&self, j: i32, k: i32) -> PiecewiseExp<T> {
        haar_mother::<T>().translate(T::lit(k as f64)).dilate(j)
    }
}

/// Gram matrix of the system in the order of [`HaarSystem::indices`].
pub fn haar_gram<T: Real>(system: &HaarSystem) -> CMat<T> {
    let elems: Vec<PiecewiseExp<T>> = system
        .indices()
        .into_iter()
        .map(|(j, k)| system.element(j, k))
        .collect();
    CMat::from_fn(elems.len(), elems.len(), |r, c| {
        ef_inner(&elems[r], &elems[c])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_entries() {
        let s = HaarSystem::new(0..=1, 0..=1).unwrap();
        let g = haar_gram::<f64>(&s);
        // order: (0,0), (0,1), (1,0), (1,1)
        assert!((g[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(g[(0, 1)].norm() < 1e-15);
        assert!(g[(0, 2)].norm() < 1e-15);
    }

    #[test]
    fn element_is_rescaled_mother() {
        let s = HaarSystem::new(0..=0, 0..=0).unwrap();
        let e = s.element::<f64>(2, 3);
        // support [3/4, 1), value 2 then -2
        assert!((e.eval(0.8).re - 2.0).abs() < 1e-15);
        assert!((e.eval(0.95).re + 2.0).abs() < 1e-15);
        assert_eq!(e.eval(0.5).re, 0.0);
    }
}
