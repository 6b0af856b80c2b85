//! Concrete operator models.

mod haar;
mod momentum;
mod nonlocal;
mod restriction;
mod shift;

pub use haar::{haar_gram, haar_mother, HaarSystem};
pub use momentum::{
    boundary_condition_residual, momentum_eigen_test, similarity_conjugation_check,
    similarity_transform, weyl_relation_check, MomentumModel,
};
pub use nonlocal::{NonlocalCase, NonlocalModel};
pub use restriction::{
    integral_condition_check, point_condition_check, restriction_functional,
    restriction_witness_family,
};
pub use shift::{DefectMethod, ShiftModel};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

pub(crate) fn non_real<T: Real>(z: C<T>) -> Result<()> {
    if z.im == T::zero() || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::RealSpectralParameter {
            re: z.re.to_f64_lossy(),
            im: z.im.to_f64_lossy(),
        });
    }
    Ok(())
}
