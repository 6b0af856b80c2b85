//! Finite-dimensional complex matrix kernel: Cayley transforms, block
//! operators on the indefinite space `C^m (+) C^m`, the interspherical
//! linear fractional map, wandering-subspace detection and singularity tests.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{from_real, imag_unit, tol, Real, C};

pub type CMat<T> = DMatrix<C<T>>;
pub type CVec<T> = DVector<C<T>>;

/// Relative threshold shared by every singularity decision.
pub const SINGULAR_TOL: f64 = 1e-10;
/// A power `U^n L` counts as non-orthogonal to `L` above this defect.
pub const WANDERING_TOL: f64 = 1e-10;

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

fn singular_values<T: Real>(m: &CMat<T>) -> DVector<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(0);
    }
    m.clone().svd(false, false).singular_values
}

/// Largest singular value.
pub fn op_norm<T: Real>(m: &CMat<T>) -> T {
    singular_values(m).iter().fold(T::zero(), |a, &b| a.max(b))
}

/// Smallest singular value; `+inf` stand-in for an empty matrix.
pub fn min_singular<T: Real>(m: &CMat<T>) -> T {
    singular_values(m).iter().fold(
        T::max_value().unwrap_or(T::one() / T::default_epsilon()),
        |a, &b| a.min(b),
    )
}

/// Numerical rank with relative threshold `rel`.
pub fn rank<T: Real>(m: &CMat<T>, rel: T) -> usize {
    let sv = singular_values(m);
    let top = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    sv.iter().filter(|&&s| s > rel * (T::one() + top)).count()
}

/// `||A - A*||`
pub fn hermitian_residual<T: Real>(a: &CMat<T>) -> T {
    op_norm(&(a - a.adjoint()))
}

/// `||U*U - I||`
pub fn unitary_residual<T: Real>(u: &CMat<T>) -> T {
    op_norm(&(u.adjoint() * u - identity::<T>(u.ncols())))
}

fn require_square<T: Real>(m: &CMat<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// Solves `lhs * X = rhs`, rejecting numerically singular `lhs`.
pub fn solve<T: Real>(lhs: &CMat<T>, rhs: &CMat<T>, context: &'static str) -> Result<CMat<T>> {
    require_square(lhs)?;
    let sigma = min_singular(lhs);
    if sigma <= tol::<T>(1e-14) * (T::one() + op_norm(lhs)) {
        return Err(Error::Singular {
            context,
            sigma_min: sigma.to_f64_lossy(),
        });
    }
    lhs.clone().lu().solve(rhs).ok_or(Error::Singular {
        context,
        sigma_min: sigma.to_f64_lossy(),
    })
}

/// Matrix inverse with the same singularity guard as [`solve`].
pub fn inverse<T: Real>(m: &CMat<T>, context: &'static str) -> Result<CMat<T>> {
    solve(m, &identity(m.nrows()), context)
}

/// True iff the smallest singular value is at most `tol * (1 + ||M||)`.
pub fn is_singular<T: Real>(m: &CMat<T>, tol: T) -> bool {
    min_singular(m) <= tol * (T::one() + op_norm(m))
}

/// `U = (A + iI)(A - iI)^{-1}` for hermitian `A`.
pub fn cayley<T: Real>(a: &CMat<T>) -> Result<CMat<T>> {
    let n = require_square(a)?;
    let herm = hermitian_residual(a);
    if herm > tol::<T>(1e-12) * (T::one() + op_norm(a)) {
        return Err(Error::NotHermitian(herm.to_f64_lossy()));
    }
    let i = imag_unit::<T>();
    let id = identity::<T>(n);
    // the two factors commute, so the inverse may be applied on the left
    solve(&(a - &id * i), &(a + &id * i), "A - iI")
}

/// `A = i(U + I)(U - I)^{-1}` for unitary `U` without eigenvalue 1.
pub fn inverse_cayley<T: Real>(u: &CMat<T>) -> Result<CMat<T>> {
    let n = require_square(u)?;
    let res = unitary_residual(u);
    if res > tol::<T>(1e-10) {
        return Err(Error::NotUnitary(res.to_f64_lossy()));
    }
    let id = identity::<T>(n);
    let shifted = u - &id;
    let sigma = min_singular(&shifted);
    if sigma <= tol::<T>(1e-10) {
        return Err(Error::EigenvalueOne(sigma.to_f64_lossy()));
    }
    let x = solve(&shifted, &(u + &id), "U - I")?;
    Ok(x * imag_unit::<T>())
}

/// Block operator `[[K11, K12], [K21, K22]]` on `C^m (+) C^m` with the
/// indefinite form `[x, y] = (x0, y0) - (x1, y1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KreinBlockOperator<T: Real> {
    k11: CMat<T>,
    k12: CMat<T>,
    k21: CMat<T>,
    k22: CMat<T>,
}

impl<T: Real> KreinBlockOperator<T> {
    pub fn from_blocks(k11: CMat<T>, k12: CMat<T>, k21: CMat<T>, k22: CMat<T>) -> Result<Self> {
        let m = require_square(&k11)?;
        for b in [&k12, &k21, &k22] {
            if b.nrows() != m || b.ncols() != m {
                return Err(Error::DimensionMismatch(format!(
                    "block of size {}x{}, expected {m}x{m}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { k11, k12, k21, k22 })
    }

    /// Splits a `2m x 2m` matrix into its four blocks.
    pub fn from_matrix(k: &CMat<T>) -> Result<Self> {
        let n = require_square(k)?;
        if n % 2 != 0 || n == 0 {
            return Err(Error::DimensionMismatch(format!("odd or empty size {n}")));
        }
        let m = n / 2;
        Self::from_blocks(
            k.view((0, 0), (m, m)).into_owned(),
            k.view((0, m), (m, m)).into_owned(),
            k.view((m, 0), (m, m)).into_owned(),
            k.view((m, m), (m, m)).into_owned(),
        )
    }

    pub fn identity(m: usize) -> Self {
        Self {
            k11: identity(m),
            k12: CMat::zeros(m, m),
            k21: CMat::zeros(m, m),
            k22: identity(m),
        }
    }

    /// The fundamental symmetry `J = diag(I, -I)` of size `2m`.
    pub fn signature(m: usize) -> CMat<T> {
        let mut j = identity::<T>(2 * m);
        for k in m..2 * m {
            j[(k, k)] = -j[(k, k)];
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.k11.nrows()
    }

    pub fn k11(&self) -> &CMat<T> {
        &self.k11
    }

    pub fn k12(&self) -> &CMat<T> {
        &self.k12
    }

    pub fn k21(&self) -> &CMat<T> {
        &self.k21
    }

    pub fn k22(&self) -> &CMat<T> {
        &self.k22
    }

    pub fn to_matrix(&self) -> CMat<T> {
        let m = self.dim();
        let mut k = CMat::zeros(2 * m, 2 * m);
        k.view_mut((0, 0), (m, m)).copy_from(&self.k11);
        k.view_mut((0, m), (m, m)).copy_from(&self.k12);
        k.view_mut((m, 0), (m, m)).copy_from(&self.k21);
        k.view_mut((m, m), (m, m)).copy_from(&self.k22);
        k
    }

    /// `max(||K*JK - J||, ||KJK* - J||)`.
    pub fn krein_residual(&self) -> T {
        let k = self.to_matrix();
        let j = Self::signature(self.dim());
        let a = op_norm(&(k.adjoint() * &j * &k - &j));
        let b = op_norm(&(&k * &j * k.adjoint() - &j));
        a.max(b)
    }

    pub fn is_krein_unitary(&self, tol: T) -> bool {
        self.krein_residual() <= tol
    }

    /// Block product `self * other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "block sizes {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Self::from_matrix(&(self.to_matrix() * other.to_matrix()))
    }

    /// `J K* J`, the inverse of a Krein-unitary operator.
    pub fn krein_inverse(&self) -> Self {
        let j = Self::signature(self.dim());
        Self::from_matrix(&(&j * self.to_matrix().adjoint() * &j)).expect("even square size")
    }
}

/// `Phi_K(Z) = (K21 + K22 Z)(K11 + K12 Z)^{-1}` on contractions `Z`.
pub fn interspherical<T: Real>(k: &KreinBlockOperator<T>, z: &CMat<T>) -> Result<CMat<T>> {
    let m = k.dim();
    if z.nrows() != m || z.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "argument is {}x{}, blocks are {m}x{m}",
            z.nrows(),
            z.ncols()
        )));
    }
    let norm = op_norm(z);
    if norm > T::one() + tol::<T>(1e-10) {
        return Err(Error::NotContraction(norm.to_f64_lossy()));
    }
    let den = k.k11() + k.k12() * z;
    let num = k.k21() + k.k22() * z;
    let sigma = min_singular(&den);
    if sigma <= tol::<T>(1e-12) {
        return Err(Error::Singular {
            context: "K11 + K12 Z",
            sigma_min: sigma.to_f64_lossy(),
        });
    }
    // X den = num  <=>  den* X* = num*
    let xt = solve(&den.adjoint(), &num.adjoint(), "K11 + K12 Z")?;
    Ok(xt.adjoint())
}

/// Orthonormal columns spanning a subspace of `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis<T: Real> {
    vectors: CMat<T>,
}

impl<T: Real> SubspaceBasis<T> {
    /// Accepts columns that are already orthonormal.
    pub fn new(vectors: CMat<T>) -> Result<Self> {
        if vectors.ncols() == 0 || vectors.nrows() == 0 {
            return Err(Error::InvalidParameter("empty subspace basis".into()));
        }
        let gram = vectors.adjoint() * &vectors;
        let res = op_norm(&(gram - identity::<T>(vectors.ncols())));
        if res > tol::<T>(1e-12) {
            return Err(Error::InvalidParameter(format!(
                "basis is not orthonormal (residual {:e})",
                res.to_f64_lossy()
            )));
        }
        Ok(Self { vectors })
    }

    /// Orthonormalizes arbitrary spanning columns.
    pub fn span(vectors: &CMat<T>) -> Result<Self> {
        let k = vectors.ncols();
        if k == 0 || vectors.nrows() < k {
            return Err(Error::InvalidParameter(
                "cannot span: too few rows or no columns".into(),
            ));
        }
        if rank(vectors, tol::<T>(1e-12)) < k {
            return Err(Error::InvalidParameter(
                "spanning columns are dependent".into(),
            ));
        }
        let q = vectors.clone().qr().q();
        Self::new(q.columns(0, k).into_owned())
    }

    /// `span{e_j}` for the listed coordinate indices.
    pub fn coordinates(n: usize, idx: &[usize]) -> Result<Self> {
        let mut v = CMat::zeros(n, idx.len());
        for (c, &j) in idx.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidParameter(format!(
                    "index {j} outside dimension {n}"
                )));
            }
            v[(j, c)] = C::new(T::one(), T::zero());
        }
        Self::new(v)
    }

    pub fn ambient_dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn vectors(&self) -> &CMat<T> {
        &self.vectors
    }

    /// Image under a unitary `W`.
    pub fn mapped(&self, w: &CMat<T>) -> Result<Self> {
        Self::new(w * &self.vectors)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WanderingReport<T> {
    /// Least `n` with `||L* U^n L|| > WANDERING_TOL`.
    pub first_violation: Option<usize>,
    /// Entry `k` holds `||L* U^(k+1) L||`.
    pub defect_per_n: Vec<T>,
}

/// Measures `||L* U^n L||` for `n = 1..=n_max`.
pub fn wandering_check<T: Real>(
    u: &CMat<T>,
    l: &SubspaceBasis<T>,
    n_max: usize,
) -> Result<WanderingReport<T>> {
    let n = require_square(u)?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    if l.ambient_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "subspace lives in C^{}, operator acts on C^{n}",
            l.ambient_dim()
        )));
    }
    let res = unitary_residual(u);
    if res > tol::<T>(1e-10) {
        return Err(Error::NotUnitary(res.to_f64_lossy()));
    }
    let basis = l.vectors();
    let mut power = basis.clone();
    let mut defect_per_n = Vec::with_capacity(n_max);
    let mut first_violation = None;
    for k in 1..=n_max {
        power = u * power;
        let d = op_norm(&(basis.adjoint() * &power));
        if first_violation.is_none() && d > tol::<T>(WANDERING_TOL) {
            first_violation = Some(k);
        }
        defect_per_n.push(d);
    }
    Ok(WanderingReport {
        first_violation,
        defect_per_n,
    })
}

fn random_entry<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    C::new(
        T::lit(rng.random_range(-1.0..1.0)),
        T::lit(rng.random_range(-1.0..1.0)),
    )
}

/// Entries uniform in the unit square of the complex plane.
pub fn random_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat<T> {
    CMat::from_fn(rows, cols, |_, _| random_entry(rng))
}

/// `scale * (X + X*) / 2` with `X` from [`random_matrix`].
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, scale: T) -> CMat<T> {
    let x = random_matrix::<T, R>(rng, n, n);
    (&x + x.adjoint()) * from_real(scale / T::lit(2.0))
}

/// `exp(iH)` for a random hermitian `H`.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat<T> {
    let h = random_hermitian::<T, R>(rng, n, T::lit(3.0));
    (h * imag_unit::<T>()).exp()
}

/// Random matrix rescaled to operator norm `norm`.
pub fn random_contraction<T: Real, R: Rng + ?Sized>(rng: &mut R, m: usize, norm: T) -> CMat<T> {
    let x = random_matrix::<T, R>(rng, m, m);
    let s = op_norm(&x);
    if s == T::zero() {
        return x;
    }
    x * from_real(norm / s)
}

/// `exp(J H)` with `H` skew-hermitian, which is Krein-unitary by
/// construction; `scale` bounds the generator entries.
pub fn random_krein_unitary<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    scale: T,
) -> KreinBlockOperator<T> {
    let h = random_hermitian::<T, R>(rng, 2 * m, scale) * imag_unit::<T>();
    let x = KreinBlockOperator::<T>::signature(m) * h;
    KreinBlockOperator::from_matrix(&x.exp()).expect("even square size")
}
