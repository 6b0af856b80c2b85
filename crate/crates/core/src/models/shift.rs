use crate::error::{Error, Result};
use crate::matops::{self, identity, CMat, CVec, SubspaceBasis, WanderingReport};
use crate::scalar::{from_real, imag_unit, modulus, tol, Real, C};
use crate::triplets::DefectFamily;

/// How [`ShiftModel::shift_defect`] evaluates `T_z e_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefectMethod {
    /// Truncated geometric series in `t U`, valid above the real axis.
    Series,
    /// Direct solve of `(A - z) y = e_0`.
    Direct,
}

/// Cyclic shift on `C^d` with `U e_{d-1} = twist e_0`, its inverse Cayley
/// transform `A`, and the candidate wandering subspace `span{e_0}`.
#[derive(Clone, Debug)]
pub struct ShiftModel<T: Real> {
    d: usize,
    twist: C<T>,
    u: CMat<T>,
    a: CMat<T>,
    l: SubspaceBasis<T>,
}

impl<T: Real> ShiftModel<T> {
    pub fn new(d: usize, twist: C<T>) -> Result<Self> {
        if d < 4 {
            return Err(Error::InvalidParameter(format!("dimension {d} is below 4")));
        }
        if (modulus(twist) - T::one()).abs() > tol::<T>(1e-12) {
            return Err(Error::InvalidParameter("twist must be unimodular".into()));
        }
        let mut u = CMat::zeros(d, d);
        for k in 0..d - 1 {
            u[(k + 1, k)] = C::new(T::one(), T::zero());
        }
        u[(0, d - 1)] = twist;
        let a = matops::inverse_cayley(&u)?;
        let l = SubspaceBasis::coordinates(d, &[0])?;
        Ok(Self { d, twist, u, a, l })
    }

    /// The default surrogate with twist `-1`.
    pub fn with_dimension(d: usize) -> Result<Self> {
        Self::new(d, C::new(-T::one(), T::zero()))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn twist(&self) -> C<T> {
        self.twist
    }

    pub fn u(&self) -> &CMat<T> {
        &self.u
    }

    pub fn a(&self) -> &CMat<T> {
        &self.a
    }

    pub fn l(&self) -> &SubspaceBasis<T> {
        &self.l
    }

    fn e0(&self) -> CVec<T> {
        let mut e = CVec::zeros(self.d);
        e[0] = C::new(T::one(), T::zero());
        e
    }

    /// `t = (iz + 1)/(iz - 1)`.
    pub fn series_ratio(z: C<T>) -> C<T> {
        let one = C::new(T::one(), T::zero());
        let iz = imag_unit::<T>() * z;
        (iz + one) / (iz - one)
    }

    /// `T_z e_0 = (A + iI)(A - zI)^{-1} e_0`.
    pub fn shift_defect(&self, z: C<T>, method: DefectMethod) -> Result<CVec<T>> {
        super::non_real(z)?;
        let i = imag_unit::<T>();
        match method {
            DefectMethod::Direct => {
                let id = identity::<T>(self.d);
                let lhs = &self.a - &id * z;
                let rhs = CMat::from_column_slice(self.d, 1, self.e0().as_slice());
                let y = matops::solve(&lhs, &rhs, "A - zI")?;
                Ok((&self.a + &id * i) * y.column(0))
            }
            DefectMethod::Series => {
                if z.im <= T::zero() {
                    return Err(Error::WrongHalfPlane {
                        expected: "upper",
                        re: z.re.to_f64_lossy(),
                        im: z.im.to_f64_lossy(),
                    });
                }
                let t = Self::series_ratio(z);
                let rt = modulus(t);
                let n_cut = if rt == T::zero() {
                    0
                } else {
                    (T::lit(1e-14).ln() / rt.ln()).ceil().to_f64_lossy() as usize
                };
                let mut term = self.e0();
                let mut acc = term.clone();
                for _ in 0..n_cut {
                    term = &self.u * term * t;
                    acc += &term;
                }
                let one = C::new(T::one(), T::zero());
                let pre = from_real(T::lit(2.0)) / (one - i * z);
                Ok(&self.u * acc * pre)
            }
        }
    }

    /// `||(A - iI)(U - I)x - 2i x||`.
    pub fn shift_cayley_identity(&self, x: &CVec<T>) -> Result<T> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {}",
                x.len()
            )));
        }
        let id = identity::<T>(self.d);
        let i = imag_unit::<T>();
        let u = (&self.u - &id) * x;
        let lhs = (&self.a - &id * i) * u;
        Ok((lhs - x * (i * from_real(T::lit(2.0)))).norm())
    }

    /// [`matops::wandering_check`] for `span{e_0}`.
    pub fn wandering(&self, n_max: usize) -> Result<WanderingReport<T>> {
        matops::wandering_check(&self.u, &self.l, n_max)
    }

    /// `|(T_lambda e_0, e_0)| / ||T_lambda e_0||`; `e_0` spans the defect
    /// subspace at `-i`.
    pub fn orthogonality_defect(&self, lambda: C<T>) -> Result<T> {
        let v = self.shift_defect(lambda, DefectMethod::Direct)?;
        Ok(modulus(v[0]) / v.norm())
    }
}

impl<T: Real> DefectFamily<T> for ShiftModel<T> {
    type Vector = CVec<T>;

    fn basis(&self, z: C<T>) -> Result<Vec<CVec<T>>> {
        Ok(vec![self.shift_defect(z, DefectMethod::Direct)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn c(re: f64, im: f64) -> C<f64> {
        cplx(re, im)
    }

    #[test]
    fn defect_at_i_is_next_basis_vector() {
        let model = ShiftModel::<f64>::with_dimension(8).unwrap();
        for method in [DefectMethod::Series, DefectMethod::Direct] {
            let v = model.shift_defect(c(0.0, 1.0), method).unwrap();
            let mut e1 = CVec::zeros(8);
            e1[1] = c(1.0, 0.0);
            assert!((v - e1).norm() < 1e-13, "{method:?}");
        }
    }

    #[test]
    fn series_and_direct_agree() {
        let model = ShiftModel::<f64>::with_dimension(16).unwrap();
        assert!((ShiftModel::<f64>::series_ratio(c(0.0, 2.0)).norm() - 1.0 / 3.0).abs() < 1e-15);
        for z in [c(0.0, 2.0), c(1.0, 0.7), c(-3.0, 4.0)] {
            let a = model.shift_defect(z, DefectMethod::Series).unwrap();
            let b = model.shift_defect(z, DefectMethod::Direct).unwrap();
            assert!((a - b).norm() <= 1e-12, "{z}");
        }
        assert!(model
            .shift_defect(c(0.0, -1.0), DefectMethod::Series)
            .is_err());
    }

    #[test]
    fn lower_defect_at_minus_i_is_e0() {
        let model = ShiftModel::<f64>::with_dimension(8).unwrap();
        let v = model
            .shift_defect(c(0.0, -1.0), DefectMethod::Direct)
            .unwrap();
        assert!((v[0].norm() - v.norm()).abs() < 1e-12);
    }

    #[test]
    fn cayley_identity() {
        let model = ShiftModel::<f64>::with_dimension(8).unwrap();
        let mut e0 = CVec::zeros(8);
        e0[0] = c(1.0, 0.0);
        assert!(model.shift_cayley_identity(&e0).unwrap() <= 1e-12);
        assert_eq!(model.shift_cayley_identity(&CVec::zeros(8)).unwrap(), 0.0);
    }

    #[test]
    fn rejects_small_or_bad_parameters() {
        assert!(ShiftModel::<f64>::with_dimension(3).is_err());
        assert!(ShiftModel::<f64>::new(8, c(2.0, 0.0)).is_err());
        assert!(matches!(
            ShiftModel::<f64>::new(8, c(1.0, 0.0)),
            Err(Error::EigenvalueOne(_))
        ));
    }
}
