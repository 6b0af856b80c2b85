//! Boundary triplets over piecewise exponential domains.
//!
//! A boundary map is a finite combination of one-sided limits at the origin
//! and inner products against fixed kernels. Stacking `Gamma_+` over
//! `Gamma_-` gives the map `Psi` into the indefinite space on which
//! change-of-triplet operators act.

use nalgebra::Cholesky;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::expfun::{PiecewiseExp, VectorFn};
use crate::matops::{self, identity, op_norm, CMat, CVec, KreinBlockOperator};
use crate::scalar::{from_real, imag_unit, modulus, tol, Real, C};

/// How inner products against boundary kernels are evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrator<T> {
    Exact,
    Quadrature { rel_tol: T },
}

impl<T: Real> Integrator<T> {
    pub fn inner(&self, f: &PiecewiseExp<T>, g: &PiecewiseExp<T>) -> Result<C<T>> {
        match *self {
            Integrator::Exact => Ok(crate::expfun::ef_inner(f, g)),
            Integrator::Quadrature { rel_tol } => crate::expfun::ef_inner_quadrature(f, g, rel_tol),
        }
    }
}

/// Linear map `f -> left f(0-) + right f(0+) + [sum_j (f_j, kernel_ij)]_i`
/// from `C^m`-valued functions to `C^rows`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMap<T: Real> {
    left: CMat<T>,
    right: CMat<T>,
    kernels: Vec<Vec<PiecewiseExp<T>>>,
}

impl<T: Real> BoundaryMap<T> {
    pub fn new(left: CMat<T>, right: CMat<T>, kernels: Vec<Vec<PiecewiseExp<T>>>) -> Result<Self> {
        let (rows, m) = left.shape();
        if right.shape() != (rows, m) {
            return Err(Error::DimensionMismatch(format!(
                "left block {rows}x{m}, right block {}x{}",
                right.nrows(),
                right.ncols()
            )));
        }
        if kernels.len() != rows || kernels.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch(
                "kernel table does not match the blocks".into(),
            ));
        }
        Ok(Self {
            left,
            right,
            kernels,
        })
    }

    pub fn zero(rows: usize, m: usize) -> Self {
        Self {
            left: CMat::zeros(rows, m),
            right: CMat::zeros(rows, m),
            kernels: vec![vec![PiecewiseExp::zero(); m]; rows],
        }
    }

    /// `f -> f(0-)`
    pub fn left_limit(m: usize) -> Self {
        Self {
            left: identity(m),
            ..Self::zero(m, m)
        }
    }

    /// `f -> f(0+)`
    pub fn right_limit(m: usize) -> Self {
        Self {
            right: identity(m),
            ..Self::zero(m, m)
        }
    }

    /// `f -> c (f, w)` in every diagonal slot, i.e. kernel `conj(c) w`.
    pub fn diagonal_functional(m: usize, c: C<T>, w: &PiecewiseExp<T>) -> Self {
        let mut map = Self::zero(m, m);
        for j in 0..m {
            map.kernels[j][j] = w.scale(c.conj());
        }
        map
    }

    pub fn rows(&self) -> usize {
        self.left.nrows()
    }

    /// Dimension of the function values.
    pub fn dim(&self) -> usize {
        self.left.ncols()
    }

    pub fn left(&self) -> &CMat<T> {
        &self.left
    }

    pub fn right(&self) -> &CMat<T> {
        &self.right
    }

    pub fn kernels(&self) -> &[Vec<PiecewiseExp<T>>] {
        &self.kernels
    }

    pub fn apply(&self, f: &VectorFn<T>, integrator: &Integrator<T>) -> Result<CVec<T>> {
        if f.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "function has {} components, map expects {}",
                f.dim(),
                self.dim()
            )));
        }
        let mut out = &self.left * f.at0minus() + &self.right * f.at0plus();
        for (i, row) in self.kernels.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                if !w.is_empty() {
                    out[i] += integrator.inner(f.component(j), w)?;
                }
            }
        }
        Ok(out)
    }

    /// Closed-form evaluation.
    pub fn apply_exact(&self, f: &VectorFn<T>) -> Result<CVec<T>> {
        self.apply(f, &Integrator::Exact)
    }

    /// Columns are the images of the given functions.
    pub fn image_matrix(&self, fs: &[VectorFn<T>], integrator: &Integrator<T>) -> Result<CMat<T>> {
        let mut out = CMat::zeros(self.rows(), fs.len());
        for (c, f) in fs.iter().enumerate() {
            out.set_column(c, &self.apply(f, integrator)?);
        }
        Ok(out)
    }

    /// The map `f -> M (self f)`.
    pub fn premultiply(&self, mtx: &CMat<T>) -> Result<Self> {
        if mtx.ncols() != self.rows() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} columns, map has {} rows",
                mtx.ncols(),
                self.rows()
            )));
        }
        let m = self.dim();
        let kernels = (0..mtx.nrows())
            .map(|i| {
                (0..m)
                    .map(|j| {
                        // c (f, w) = (f, conj(c) w)
                        (0..self.rows()).fold(PiecewiseExp::zero(), |acc, k| {
                            if mtx[(i, k)].is_zero() {
                                acc
                            } else {
                                acc + self.kernels[k][j].scale(mtx[(i, k)].conj())
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            left: mtx * &self.left,
            right: mtx * &self.right,
            kernels,
        })
    }

    pub fn scale(&self, c: C<T>) -> Self {
        self.premultiply(&(identity::<T>(self.rows()) * c))
            .expect("square scaling matrix")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.left.shape() != other.left.shape() {
            return Err(Error::DimensionMismatch(
                "boundary maps of different shapes".into(),
            ));
        }
        let kernels = self
            .kernels
            .iter()
            .zip(&other.kernels)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x.clone() + y.clone())
                    .collect()
            })
            .collect();
        Ok(Self {
            left: &self.left + &other.left,
            right: &self.right + &other.right,
            kernels,
        })
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "stacked maps act on different dimensions".into(),
            ));
        }
        let (r1, r2, m) = (self.rows(), other.rows(), self.dim());
        let mut left = CMat::zeros(r1 + r2, m);
        let mut right = CMat::zeros(r1 + r2, m);
        left.view_mut((0, 0), (r1, m)).copy_from(&self.left);
        left.view_mut((r1, 0), (r2, m)).copy_from(&other.left);
        right.view_mut((0, 0), (r1, m)).copy_from(&self.right);
        right.view_mut((r1, 0), (r2, m)).copy_from(&other.right);
        let mut kernels = self.kernels.clone();
        kernels.extend(other.kernels.iter().cloned());
        Ok(Self {
            left,
            right,
            kernels,
        })
    }

    /// Splits into the first `at` rows and the rest.
    pub fn split(&self, at: usize) -> (Self, Self) {
        let (r, m) = (self.rows(), self.dim());
        let top = Self {
            left: self.left.view((0, 0), (at, m)).into_owned(),
            right: self.right.view((0, 0), (at, m)).into_owned(),
            kernels: self.kernels[..at].to_vec(),
        };
        let bottom = Self {
            left: self.left.view((at, 0), (r - at, m)).into_owned(),
            right: self.right.view((at, 0), (r - at, m)).into_owned(),
            kernels: self.kernels[at..].to_vec(),
        };
        (top, bottom)
    }
}

/// Pair `(Gamma_-, Gamma_+)` with a stored surjectivity witness.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryTriplet<T: Real> {
    gamma_minus: BoundaryMap<T>,
    gamma_plus: BoundaryMap<T>,
    witness: Vec<VectorFn<T>>,
}

impl<T: Real> BoundaryTriplet<T> {
    /// Checks shapes and that `Psi` maps the witness functions onto `C^{2m}`.
    pub fn new(
        gamma_minus: BoundaryMap<T>,
        gamma_plus: BoundaryMap<T>,
        witness: Vec<VectorFn<T>>,
    ) -> Result<Self> {
        let m = gamma_minus.dim();
        for g in [&gamma_minus, &gamma_plus] {
            if g.rows() != m || g.dim() != m {
                return Err(Error::DimensionMismatch(format!(
                    "boundary map is {}x{}, expected {m}x{m}",
                    g.rows(),
                    g.dim()
                )));
            }
        }
        let triplet = Self {
            gamma_minus,
            gamma_plus,
            witness,
        };
        let image = triplet
            .psi_map()?
            .image_matrix(&triplet.witness, &Integrator::Exact)?;
        let rank = if image.ncols() == 0 {
            0
        } else {
            matops::rank(&image, tol::<T>(1e-10))
        };
        if rank < 2 * m {
            return Err(Error::NotSurjective {
                rank,
                needed: 2 * m,
            });
        }
        Ok(triplet)
    }

    /// Splits a stacked `Psi = [Gamma_+; Gamma_-]`.
    pub fn from_psi(psi: &BoundaryMap<T>, witness: Vec<VectorFn<T>>) -> Result<Self> {
        if psi.rows() != 2 * psi.dim() {
            return Err(Error::DimensionMismatch("Psi must have 2m rows".into()));
        }
        let (plus, minus) = psi.split(psi.dim());
        Self::new(minus, plus, witness)
    }

    pub fn m(&self) -> usize {
        self.gamma_minus.dim()
    }

    pub fn gamma_minus(&self) -> &BoundaryMap<T> {
        &self.gamma_minus
    }

    pub fn gamma_plus(&self) -> &BoundaryMap<T> {
        &self.gamma_plus
    }

    pub fn witness(&self) -> &[VectorFn<T>] {
        &self.witness
    }

    /// `Psi = [Gamma_+; Gamma_-]`.
    pub fn psi_map(&self) -> Result<BoundaryMap<T>> {
        self.gamma_plus.stack(&self.gamma_minus)
    }

    pub fn psi(&self, f: &VectorFn<T>, integrator: &Integrator<T>) -> Result<CVec<T>> {
        let p = self.gamma_plus.apply(f, integrator)?;
        let q = self.gamma_minus.apply(f, integrator)?;
        Ok(CVec::from_iterator(
            2 * self.m(),
            p.iter().chain(q.iter()).copied(),
        ))
    }
}

/// Map `z -> basis of the defect subspace at z`.
pub trait DefectFamily<T: Real> {
    type Vector;
    fn basis(&self, z: C<T>) -> Result<Vec<Self::Vector>>;
}

/// Vectors with an inner product linear in the first argument.
pub trait HilbertVector<T: Real> {
    fn inner(&self, other: &Self) -> C<T>;
}

impl<T: Real> HilbertVector<T> for VectorFn<T> {
    fn inner(&self, other: &Self) -> C<T> {
        VectorFn::inner(self, other)
    }
}

impl<T: Real> HilbertVector<T> for CVec<T> {
    fn inner(&self, other: &Self) -> C<T> {
        other.dotc(self)
    }
}

/// Gram matrix `G_ij = (v_j, v_i)`, so that `||sum a_j v_j||^2 = a* G a`.
pub fn gram<T: Real, V: HilbertVector<T>>(vs: &[V]) -> CMat<T> {
    CMat::from_fn(vs.len(), vs.len(), |i, j| vs[j].inner(&vs[i]))
}

/// Cross Gram `X_ij = (w_j, v_i)`.
pub fn cross_gram<T: Real, V: HilbertVector<T>>(vs: &[V], ws: &[V]) -> CMat<T> {
    CMat::from_fn(vs.len(), ws.len(), |i, j| ws[j].inner(&vs[i]))
}

/// Largest cosine of the principal angles between two spans.
pub fn principal_cosine<T: Real, V: HilbertVector<T>>(vs: &[V], ws: &[V]) -> Result<T> {
    let lv = gram_factor(&gram(vs))?;
    let lw = gram_factor(&gram(ws))?;
    // coordinates of orthonormalized bases: V L_v^{-*}, W L_w^{-*}
    let x = cross_gram(vs, ws);
    let left = matops::solve(&lv, &x, "Gram factor")?;
    let both = matops::solve(&lw, &left.adjoint(), "Gram factor")?;
    Ok(op_norm(&both))
}

/// Lower factor `L` with `G = L L*`.
pub fn gram_factor<T: Real>(g: &CMat<T>) -> Result<CMat<T>> {
    let herm = (g + g.adjoint()) * from_real(T::lit(0.5));
    Cholesky::new(herm.clone())
        .map(|c| c.l())
        .ok_or(Error::Singular {
            context: "Gram matrix",
            sigma_min: matops::min_singular(&herm).to_f64_lossy(),
        })
}

/// A symmetric operator given through its adjoint, its defect subspaces and
/// a reference boundary triplet.
pub trait OperatorModel<T: Real>: DefectFamily<T, Vector = VectorFn<T>> {
    fn name(&self) -> String;

    fn m(&self) -> usize;

    /// Action of the adjoint; rejects functions outside its domain.
    fn apply_adjoint(&self, f: &VectorFn<T>) -> Result<VectorFn<T>>;

    fn triplet(&self) -> &BoundaryTriplet<T>;

    /// `||(S* - z) f||` at coefficient level.
    fn defect_residual(&self, f: &VectorFn<T>, z: C<T>) -> Result<T> {
        Ok((self.apply_adjoint(f)? - f.scale(z)).max_coeff())
    }
}

fn upper<T: Real>(z: C<T>) -> Result<()> {
    if z.im > T::zero() {
        Ok(())
    } else {
        Err(Error::WrongHalfPlane {
            expected: "upper",
            re: z.re.to_f64_lossy(),
            im: z.im.to_f64_lossy(),
        })
    }
}

fn lower<T: Real>(z: C<T>) -> Result<()> {
    if z.im < T::zero() {
        Ok(())
    } else {
        Err(Error::WrongHalfPlane {
            expected: "lower",
            re: z.re.to_f64_lossy(),
            im: z.im.to_f64_lossy(),
        })
    }
}

/// `|(S*f, g) - (f, S*g) - i[(G+f, G+g) - (G-f, G-g)]|`.
pub fn green_residual<T: Real, M: OperatorModel<T>>(
    triplet: &BoundaryTriplet<T>,
    model: &M,
    f: &VectorFn<T>,
    g: &VectorFn<T>,
) -> Result<T> {
    let sf = model.apply_adjoint(f)?;
    let sg = model.apply_adjoint(g)?;
    let lhs = sf.inner(g) - f.inner(&sg);
    let (pf, pg) = (
        triplet.gamma_plus().apply_exact(f)?,
        triplet.gamma_plus().apply_exact(g)?,
    );
    let (mf, mg) = (
        triplet.gamma_minus().apply_exact(f)?,
        triplet.gamma_minus().apply_exact(g)?,
    );
    let rhs = imag_unit::<T>() * (pg.dotc(&pf) - mg.dotc(&mf));
    Ok(modulus(lhs - rhs))
}

/// `|(S*f, g) - (f, S*g) - [(G1 f, G0 g) - (G0 f, G1 g)]|` for a pair
/// `(G0, G1)` in the symmetric convention.
pub fn green_residual_symmetric<T: Real, M: OperatorModel<T>>(
    g0: &BoundaryMap<T>,
    g1: &BoundaryMap<T>,
    model: &M,
    f: &VectorFn<T>,
    g: &VectorFn<T>,
) -> Result<T> {
    let sf = model.apply_adjoint(f)?;
    let sg = model.apply_adjoint(g)?;
    let lhs = sf.inner(g) - f.inner(&sg);
    let (a0, a1) = (g0.apply_exact(f)?, g1.apply_exact(f)?);
    let (b0, b1) = (g0.apply_exact(g)?, g1.apply_exact(g)?);
    let rhs = b0.dotc(&a1) - b1.dotc(&a0);
    Ok(modulus(lhs - rhs))
}

/// Images `(Gamma_+ Phi, Gamma_- Phi)` of a defect basis.
fn defect_images<T: Real, M: OperatorModel<T>>(
    triplet: &BoundaryTriplet<T>,
    model: &M,
    z: C<T>,
    integrator: &Integrator<T>,
) -> Result<(CMat<T>, CMat<T>)> {
    let basis = model.basis(z)?;
    let p = triplet.gamma_plus().image_matrix(&basis, integrator)?;
    let q = triplet.gamma_minus().image_matrix(&basis, integrator)?;
    Ok((p, q))
}

fn ratio<T: Real>(num: &CMat<T>, den: &CMat<T>, context: &'static str) -> Result<CMat<T>> {
    // X den = num  <=>  den* X* = num*
    Ok(matops::solve(&den.adjoint(), &num.adjoint(), context)?.adjoint())
}

/// `Theta(lambda) = [Gamma_- Phi][Gamma_+ Phi]^{-1}` for `lambda` in the upper
/// half-plane.
pub fn char_function<T: Real, M: OperatorModel<T>>(
    triplet: &BoundaryTriplet<T>,
    model: &M,
    lambda: C<T>,
    integrator: &Integrator<T>,
) -> Result<CMat<T>> {
    upper(lambda)?;
    let (p, q) = defect_images(triplet, model, lambda, integrator)?;
    ratio(&q, &p, "Gamma_+ on the defect basis")
}

/// `Theta(nu) = [Gamma_+ Phi][Gamma_- Phi]^{-1}` for `nu` in the lower
/// half-plane; equals `Theta(conj nu)*`.
pub fn char_function_lower<T: Real, M: OperatorModel<T>>(
    triplet: &BoundaryTriplet<T>,
    model: &M,
    nu: C<T>,
    integrator: &Integrator<T>,
) -> Result<CMat<T>> {
    lower(nu)?;
    let (p, q) = defect_images(triplet, model, nu, integrator)?;
    ratio(&p, &q, "Gamma_- on the defect basis")
}

/// Defect bases at `mu` and `conj(mu)`, in that order.
pub fn mmu_basis<T: Real, M: DefectFamily<T>>(model: &M, mu: C<T>) -> Result<Vec<M::Vector>> {
    let mut b = model.basis(mu)?;
    b.extend(model.basis(mu.conj())?);
    Ok(b)
}

/// `f = u + Phi_mu a + Phi_conj(mu) b` with `u` in the kernel of `Psi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T: Real> {
    pub a: CVec<T>,
    pub b: CVec<T>,
    pub u: VectorFn<T>,
    /// Residual of the `2m x 2m` linear solve.
    pub solve_residual: T,
    /// `||Psi u||`, zero when `u` lies in the minimal domain.
    pub domain_residual: T,
}

fn decompose_with<T: Real>(
    psi: &BoundaryMap<T>,
    basis: &[VectorFn<T>],
    f: &VectorFn<T>,
) -> Result<Decomposition<T>> {
    let m = psi.dim();
    let mtx = psi.image_matrix(basis, &Integrator::Exact)?;
    let rhs = psi.apply_exact(f)?;
    let rhs_m = CMat::from_column_slice(2 * m, 1, rhs.as_slice());
    let x = matops::solve(&mtx, &rhs_m, "decomposition system")?;
    let solve_residual = op_norm(&(&mtx * &x - &rhs_m));
    let coeffs = x.column(0).into_owned();
    let mut u = f.clone();
    for (k, v) in basis.iter().enumerate() {
        u = u - v.scale(coeffs[k]);
    }
    let domain_residual = psi.apply_exact(&u)?.norm();
    Ok(Decomposition {
        a: coeffs.rows(0, m).into_owned(),
        b: coeffs.rows(m, m).into_owned(),
        u,
        solve_residual,
        domain_residual,
    })
}

/// Decomposes `f` over the minimal domain and the defect subspaces at `mu`
/// and `conj(mu)`; the minimal domain is the common kernel of the triplet.
pub fn decompose_mmu<T: Real, M: OperatorModel<T>>(
    model: &M,
    f: &VectorFn<T>,
    mu: C<T>,
) -> Result<Decomposition<T>> {
    upper(mu)?;
    let basis = mmu_basis(model, mu)?;
    decompose_with(&model.triplet().psi_map()?, &basis, f)
}

/// `Gamma_+- = (Gamma_1 +- i Gamma_0) / sqrt 2` after checking the symmetric
/// Green identity on the sample pairs.
pub fn triplet_convert<T: Real, M: OperatorModel<T>>(
    g0: &BoundaryMap<T>,
    g1: &BoundaryMap<T>,
    model: &M,
    samples: &[VectorFn<T>],
    witness: Vec<VectorFn<T>>,
) -> Result<BoundaryTriplet<T>> {
    let limit = tol::<T>(1e-10);
    for f in samples {
        for g in samples {
            let r = green_residual_symmetric(g0, g1, model, f, g)?;
            if r > limit {
                return Err(Error::GreenIdentity(r.to_f64_lossy()));
            }
        }
    }
    let s = from_real(T::one() / T::lit(2.0).sqrt());
    let i = imag_unit::<T>();
    let plus = g1.add(&g0.scale(i))?.scale(s);
    let minus = g1.add(&g0.scale(-i))?.scale(s);
    BoundaryTriplet::new(minus, plus, witness)
}

/// Inverse combination: `Gamma_0 = (Gamma_+ - Gamma_-)/(i sqrt 2)`,
/// `Gamma_1 = (Gamma_+ + Gamma_-)/sqrt 2`.
pub fn triplet_unconvert<T: Real>(
    t: &BoundaryTriplet<T>,
) -> Result<(BoundaryMap<T>, BoundaryMap<T>)> {
    let s = from_real(T::one() / T::lit(2.0).sqrt());
    let i = imag_unit::<T>();
    let g0 = t
        .gamma_plus()
        .add(&t.gamma_minus().scale(-C::new(T::one(), T::zero())))?
        .scale(s / i);
    let g1 = t.gamma_plus().add(t.gamma_minus())?.scale(s);
    Ok((g0, g1))
}

/// Triplet `Gamma_+ f = sqrt(2 Im mu) f_mu`, `Gamma_- f = sqrt(2 Im mu) V f_conj(mu)`
/// in orthonormal coordinates of the defect subspace at `mu`; `V` sends the
/// orthonormalized basis at `conj(mu)` to the orthonormalized basis at `mu`.
pub fn von_neumann_triplet<T: Real, M: OperatorModel<T>>(
    model: &M,
    mu: C<T>,
) -> Result<BoundaryTriplet<T>> {
    upper(mu)?;
    let m = model.m();
    let phi_mu = model.basis(mu)?;
    let phi_bar = model.basis(mu.conj())?;
    let l_mu = gram_factor(&gram(&phi_mu))?;
    let l_bar = gram_factor(&gram(&phi_bar))?;
    let psi = model.triplet().psi_map()?;
    let mut basis = phi_mu;
    basis.extend(phi_bar);
    // (a; b) = M^{-1} Psi_ref f
    let mtx = psi.image_matrix(&basis, &Integrator::Exact)?;
    let minv = matops::inverse(&mtx, "decomposition system")?;
    let s = from_real((T::lit(2.0) * mu.im).sqrt());
    let mut scale = CMat::zeros(2 * m, 2 * m);
    scale
        .view_mut((0, 0), (m, m))
        .copy_from(&(l_mu.adjoint() * s));
    scale
        .view_mut((m, m), (m, m))
        .copy_from(&(l_bar.adjoint() * s));
    let new_psi = psi.premultiply(&(scale * minv))?;
    BoundaryTriplet::from_psi(&new_psi, model.triplet().witness().to_vec())
}

/// `K` with `Psi_2 = K Psi_1`, read off from a basis of the defect subspaces
/// at `mu` and `conj(mu)`.
pub fn change_of_basis_k<T: Real, M: OperatorModel<T>>(
    t1: &BoundaryTriplet<T>,
    t2: &BoundaryTriplet<T>,
    model: &M,
    mu: C<T>,
) -> Result<KreinBlockOperator<T>> {
    upper(mu)?;
    let basis = mmu_basis(model, mu)?;
    let x1 = t1.psi_map()?.image_matrix(&basis, &Integrator::Exact)?;
    let x2 = t2.psi_map()?.image_matrix(&basis, &Integrator::Exact)?;
    let need = 2 * model.m();
    let r = matops::rank(&x1, tol::<T>(1e-12));
    if r < need {
        return Err(Error::NotSurjective {
            rank: r,
            needed: need,
        });
    }
    KreinBlockOperator::from_matrix(&ratio(&x2, &x1, "image of the defect basis")?)
}
