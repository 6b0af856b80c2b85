//! Certification battery: orthogonality, constancy and inclusion scans,
//! spectrum classification of extensions, and aggregated certificates.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfun::{PiecewiseExp, VectorFn};
use crate::matops::{self, identity, op_norm, CMat, SINGULAR_TOL};
use crate::models::ShiftModel;
use crate::scalar::{format_complex, modulus, tol, Real, C};
use crate::triplets::{
    change_of_basis_k, char_function, gram, gram_factor, green_residual, principal_cosine,
    von_neumann_triplet, BoundaryTriplet, DefectFamily, HilbertVector, Integrator, OperatorModel,
};

/// Residuals at or below this pass.
pub const PASS_TOL: f64 = 1e-10;
/// Residuals at or above this fail; the gap is inconclusive.
pub const FAIL_TOL: f64 = 1e-2;
/// Pass threshold for the pairwise deviation of characteristic-function values.
pub const CONSTANCY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// `pass` if `residual <= pass`, `fail` if `residual >= fail`,
    /// otherwise (or for NaN) inconclusive.
    pub fn decide(residual: f64, pass: f64, fail: f64) -> Self {
        if residual <= pass {
            Verdict::Pass
        } else if residual >= fail {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Sample points in the upper and lower half-planes.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T: Real> {
    upper: Vec<C<T>>,
    lower: Vec<C<T>>,
}

impl<T: Real> Grid<T> {
    pub fn new(upper: Vec<C<T>>, lower: Vec<C<T>>) -> Result<Self> {
        if upper.is_empty() || lower.is_empty() {
            return Err(Error::InvalidParameter(
                "grid halves must be nonempty".into(),
            ));
        }
        let side = |z: &C<T>| z.im.partial_cmp(&T::zero());
        if upper.iter().any(|z| side(z) != Some(Ordering::Greater))
            || lower.iter().any(|z| side(z) != Some(Ordering::Less))
        {
            return Err(Error::InvalidParameter(
                "grid point on the wrong side of the real axis".into(),
            ));
        }
        Ok(Self { upper, lower })
    }

    /// Product grid `re x im` above the axis and its mirror image below.
    pub fn product(re: &[f64], im: &[f64]) -> Result<Self> {
        let upper: Vec<C<T>> = re
            .iter()
            .flat_map(|&r| im.iter().map(move |&i| C::new(T::lit(r), T::lit(i))))
            .collect();
        let lower = upper.iter().map(|z| z.conj()).collect();
        Self::new(upper, lower)
    }

    /// `Re in {-5, ..., 5}`, `Im in {0.1, 0.5, 1, 2, 5, 10}`: 66 points per half.
    pub fn default_grid() -> Self {
        let re: Vec<f64> = (-5..=5).map(f64::from).collect();
        Self::product(&re, &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0]).expect("static grid is valid")
    }

    pub fn upper(&self) -> &[C<T>] {
        &self.upper
    }

    pub fn lower(&self) -> &[C<T>] {
        &self.lower
    }
}

/// One check of a certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub id: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Grid point (or other parameter) attaining `max_residual`.
    pub witness: Option<String>,
    /// Points where the computation itself failed; the scan continued.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl CheckEntry {
    pub fn new(
        id: &str,
        max_residual: f64,
        tolerance: f64,
        verdict: Verdict,
        witness: Option<String>,
    ) -> Self {
        Self {
            id: id.to_string(),
            max_residual,
            tolerance,
            verdict,
            witness,
            failures: Vec::new(),
        }
    }

    /// Standard rule: pass at `<= tolerance`, fail at `>= FAIL_TOL`.
    pub fn graded(id: &str, max_residual: f64, tolerance: f64, witness: Option<String>) -> Self {
        Self::new(
            id,
            max_residual,
            tolerance,
            Verdict::decide(max_residual, tolerance, FAIL_TOL),
            witness,
        )
    }

    fn with_failures(mut self, failures: Vec<String>) -> Self {
        if !failures.is_empty() && self.verdict == Verdict::Pass {
            self.verdict = Verdict::Inconclusive;
        }
        self.failures = failures;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub model: String,
    pub checks: Vec<CheckEntry>,
    /// `pass` means the operator is certified as Phillips symmetric.
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn check(&self, id: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.id == id)
    }
}

fn point<T: Real>(z: C<T>) -> String {
    format_complex(C::new(z.re.to_f64_lossy(), z.im.to_f64_lossy()))
}

fn track<T: Real>(best: &mut (T, Option<String>), value: T, witness: impl FnOnce() -> String) {
    // a NaN residual sticks so the verdict ends up inconclusive
    if best.1.is_none() || value > best.0 || value.to_f64_lossy().is_nan() {
        *best = (value, Some(witness()));
    }
}

fn bases<T: Real, F: DefectFamily<T>>(
    model: &F,
    points: &[C<T>],
    failures: &mut Vec<String>,
) -> Vec<(C<T>, Vec<F::Vector>)> {
    let mut out = Vec::with_capacity(points.len());
    for &z in points {
        match model.basis(z) {
            Ok(b) => out.push((z, b)),
            Err(e) => failures.push(format!("{}: {e}", point(z))),
        }
    }
    out
}

/// Largest principal cosine between the defect subspaces at `lambda` (upper
/// grid) and `nu` (lower grid).
pub fn orthogonality_scan<T: Real, F>(model: &F, grid: &Grid<T>) -> CheckEntry
where
    F: DefectFamily<T>,
    F::Vector: HilbertVector<T>,
{
    let mut failures = Vec::new();
    let up = bases(model, grid.upper(), &mut failures);
    let down = bases(model, grid.lower(), &mut failures);
    let mut best = (T::zero(), None);
    for (l, bl) in &up {
        for (n, bn) in &down {
            match principal_cosine(bl, bn) {
                Ok(c) => track(&mut best, c, || {
                    format!("lambda={}, nu={}", point(*l), point(*n))
                }),
                Err(e) => failures.push(format!("lambda={}, nu={}: {e}", point(*l), point(*n))),
            }
        }
    }
    CheckEntry::graded("orthogonality", best.0.to_f64_lossy(), PASS_TOL, best.1)
        .with_failures(failures)
}

/// Largest pairwise deviation `||Theta(lambda) - Theta(mu)||` over the upper grid.
pub fn constancy_scan<T: Real, M: OperatorModel<T>>(
    model: &M,
    triplet: &BoundaryTriplet<T>,
    grid: &Grid<T>,
    integrator: &Integrator<T>,
) -> CheckEntry {
    let mut failures = Vec::new();
    let mut values = Vec::new();
    for &l in grid.upper() {
        match char_function(triplet, model, l, integrator) {
            Ok(th) => values.push((l, th)),
            Err(e) => failures.push(format!("{}: {e}", point(l))),
        }
    }
    let mut best = (T::zero(), None);
    for (a, (la, ta)) in values.iter().enumerate() {
        for (lb, tb) in &values[a + 1..] {
            let d = op_norm(&(ta - tb));
            track(&mut best, d, || {
                format!("lambda={}, mu={}", point(*la), point(*lb))
            });
        }
    }
    CheckEntry::new(
        "constancy",
        best.0.to_f64_lossy(),
        CONSTANCY_TOL,
        Verdict::decide(best.0.to_f64_lossy(), CONSTANCY_TOL, FAIL_TOL),
        best.1,
    )
    .with_failures(failures)
}

fn normalized<T: Real>(vs: Vec<VectorFn<T>>) -> Result<Vec<VectorFn<T>>> {
    // orthonormalize so coefficient sizes do not depend on the basis scale
    let l = gram_factor(&gram(&vs))?;
    let linv = matops::inverse(&l, "Gram factor")?;
    let coeffs = linv.adjoint();
    Ok((0..vs.len())
        .map(|k| {
            vs.iter()
                .enumerate()
                .fold(VectorFn::zero(vs[0].dim()), |acc, (j, v)| {
                    acc + v.scale(coeffs[(j, k)])
                })
        })
        .collect())
}

/// Largest size of the component along the defect subspace at `conj(mu)`
/// when the defect subspace at `lambda` is decomposed over the minimal
/// domain and the defect subspaces at `mu` and `conj(mu)`, for all
/// `lambda, mu` on the upper grid. All bases are orthonormalized first.
pub fn inclusion_scan<T: Real, M: OperatorModel<T>>(model: &M, grid: &Grid<T>) -> CheckEntry {
    let mut failures = Vec::new();
    let psi = match model.triplet().psi_map() {
        Ok(p) => p,
        Err(e) => {
            let mut entry =
                CheckEntry::new("inclusion", f64::NAN, PASS_TOL, Verdict::Inconclusive, None);
            entry.failures.push(e.to_string());
            return entry;
        }
    };
    let m = model.m();
    let image = |z: C<T>| -> Result<CMat<T>> {
        let b = normalized(model.basis(z)?)?;
        psi.image_matrix(&b, &Integrator::Exact)
    };
    let mut upper_images = Vec::new();
    let mut systems = Vec::new();
    for &z in grid.upper() {
        let res = image(z).and_then(|p| {
            let q = image(z.conj())?;
            let mut sys = CMat::zeros(2 * m, 2 * m);
            sys.view_mut((0, 0), (2 * m, m)).copy_from(&p);
            sys.view_mut((0, m), (2 * m, m)).copy_from(&q);
            Ok((p, sys))
        });
        match res {
            Ok((p, sys)) => {
                upper_images.push((z, p));
                systems.push((z, sys));
            }
            Err(e) => failures.push(format!("{}: {e}", point(z))),
        }
    }
    let mut best = (T::zero(), None);
    for (mu, sys) in &systems {
        for (l, p) in &upper_images {
            match matops::solve(sys, p, "decomposition system") {
                Ok(x) => {
                    let b = x.rows(m, m).into_owned();
                    track(&mut best, op_norm(&b), || {
                        format!("lambda={}, mu={}", point(*l), point(*mu))
                    });
                }
                Err(e) => failures.push(format!("lambda={}, mu={}: {e}", point(*l), point(*mu))),
            }
        }
    }
    CheckEntry::graded("inclusion", best.0.to_f64_lossy(), PASS_TOL, best.1).with_failures(failures)
}

/// Spectrum of an extension of a Phillips symmetric operator besides the
/// real line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumClass {
    RealLine,
    RealPlusUpper,
    RealPlusLower,
    WholePlane,
}

/// Classifies the extension `T Gamma_+ f = Gamma_- f` of an operator with
/// constant characteristic function `theta`: the upper half-plane belongs
/// to the spectrum iff `theta - T` is singular, the lower one iff
/// `I - theta* T` is singular.
pub fn classify_spectrum<T: Real>(theta: &CMat<T>, t: &CMat<T>) -> Result<SpectrumClass> {
    if theta.shape() != t.shape() || theta.nrows() != theta.ncols() {
        return Err(Error::DimensionMismatch(
            "theta and T must be square of equal size".into(),
        ));
    }
    let norm = op_norm(theta);
    if norm > T::one() + tol::<T>(1e-12) {
        return Err(Error::NotContraction(norm.to_f64_lossy()));
    }
    let limit = tol::<T>(SINGULAR_TOL);
    let upper = matops::is_singular(&(theta - t), limit);
    let lower = matops::is_singular(&(identity::<T>(t.nrows()) - theta.adjoint() * t), limit);
    Ok(match (upper, lower) {
        (false, false) => SpectrumClass::RealLine,
        (true, false) => SpectrumClass::RealPlusUpper,
        (false, true) => SpectrumClass::RealPlusLower,
        (true, true) => SpectrumClass::WholePlane,
    })
}

/// Runs the three criteria on `grid` and cross-checks that they agree.
pub fn pso_certificate<T: Real, M: OperatorModel<T>>(model: &M, grid: &Grid<T>) -> Certificate {
    let ortho = orthogonality_scan(model, grid);
    let constancy = constancy_scan(model, model.triplet(), grid, &Integrator::Exact);
    let inclusion = inclusion_scan(model, grid);
    let verdicts = [ortho.verdict, constancy.verdict, inclusion.verdict];
    let agree = verdicts.iter().all(|v| *v == verdicts[0]) && verdicts[0] != Verdict::Inconclusive;
    let equivalence = CheckEntry::new(
        "equivalence",
        if agree { 0.0 } else { 1.0 },
        0.0,
        if agree {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        },
        (!agree).then(|| {
            format!(
                "orthogonality={}, constancy={}, inclusion={}",
                ortho.verdict, constancy.verdict, inclusion.verdict
            )
        }),
    );
    let verdict = if !agree {
        Verdict::Inconclusive
    } else {
        verdicts[0]
    };
    Certificate {
        model: model.name(),
        checks: vec![ortho, constancy, inclusion, equivalence],
        verdict,
        notes: Vec::new(),
    }
}

/// Checks that the normalized orthogonality defect of the shift surrogate at
/// `lambda` follows `|t|^{d-1}` within a factor of ten for each dimension.
/// The residual is the largest `|log10(defect / |t|^{d-1})|`.
pub fn shift_decay_scan<T: Real>(dims: &[usize], lambda: C<T>) -> Result<CheckEntry> {
    let t = modulus(ShiftModel::<T>::series_ratio(lambda));
    let mut best = (T::zero(), None);
    for &d in dims {
        let model = ShiftModel::<T>::with_dimension(d)?;
        let defect = model.orthogonality_defect(lambda)?;
        let law = t.powi(d as i32 - 1);
        let dev = (defect / law).log10().abs();
        track(&mut best, dev, || {
            format!("d={d}, defect={:e}", defect.to_f64_lossy())
        });
    }
    let r = best.0.to_f64_lossy();
    Ok(CheckEntry::new(
        "shift-decay",
        r,
        1.0,
        if r <= 1.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        best.1,
    ))
}

/// Random element of the maximal domain: defect vectors at two random points
/// plus exponential tails that may jump at the origin.
pub fn maximal_domain_sample<M: OperatorModel<f64>, R: Rng + ?Sized>(
    model: &M,
    rng: &mut R,
) -> Result<VectorFn<f64>> {
    let m = model.m();
    let coeff = |r: &mut R| C::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
    let z1 = C::new(rng.random_range(-4.0..4.0), rng.random_range(0.2..4.0));
    let z2 = C::new(rng.random_range(-4.0..4.0), -rng.random_range(0.2..4.0));
    let (k1, k2) = (coeff(rng), coeff(rng));
    let (j1, j2) = (rng.random_range(0..m), rng.random_range(0..m));
    let mut f = model.basis(z1)?[j1].scale(k1) + model.basis(z2)?[j2].scale(k2);
    let mut tails = Vec::with_capacity(m);
    for _ in 0..m {
        let left = C::new(rng.random_range(0.3..2.0), rng.random_range(-2.0..2.0));
        let right = C::new(-rng.random_range(0.3..2.0), rng.random_range(-2.0..2.0));
        let (a, b) = (coeff(rng), coeff(rng));
        tails.push(PiecewiseExp::left(a, left)? + PiecewiseExp::right(b, right)?);
    }
    f = f + VectorFn::new(tails);
    Ok(f)
}

/// Largest Green-identity residual of the model's triplet over `pairs`
/// random pairs from [`maximal_domain_sample`].
pub fn green_scan<M: OperatorModel<f64>, R: Rng + ?Sized>(
    model: &M,
    pairs: usize,
    rng: &mut R,
) -> Result<CheckEntry> {
    let mut best = (0.0, None);
    for k in 0..pairs {
        let f = maximal_domain_sample(model, rng)?;
        let g = maximal_domain_sample(model, rng)?;
        let r = green_residual(model.triplet(), model, &f, &g)?;
        track(&mut best, r, || format!("pair {k}"));
    }
    Ok(CheckEntry::graded("green", best.0, PASS_TOL, best.1))
}

/// Builds the triplet attached to the defect subspaces at `mu`, the
/// Krein-unitary `K` relating it to the model's triplet, and measures
/// `||Theta_2(lambda) - Phi_K(Theta_1(lambda))||` over the upper grid. The
/// residual also absorbs the Krein-unitarity defect of `K`.
pub fn moebius_scan<T: Real, M: OperatorModel<T>>(
    model: &M,
    mu: C<T>,
    grid: &Grid<T>,
) -> Result<CheckEntry> {
    let vn = von_neumann_triplet(model, mu)?;
    let k = change_of_basis_k(model.triplet(), &vn, model, mu)?;
    let mut best = (k.krein_residual(), Some("Krein residual".to_string()));
    for &l in grid.upper() {
        let t1 = char_function(model.triplet(), model, l, &Integrator::Exact)?;
        let t2 = char_function(&vn, model, l, &Integrator::Exact)?;
        let d = op_norm(&(t2 - matops::interspherical(&k, &t1)?));
        track(&mut best, d, || format!("lambda={}", point(l)));
    }
    Ok(CheckEntry::graded(
        "moebius",
        best.0.to_f64_lossy(),
        1e-8,
        best.1,
    ))
}

/// `Theta(i)` of a model, as the constant used by [`classify_spectrum`].
pub fn constant_theta<T: Real, M: OperatorModel<T>>(model: &M) -> Result<CMat<T>> {
    char_function(
        model.triplet(),
        model,
        C::new(T::zero(), T::one()),
        &Integrator::Exact,
    )
}

/// `Theta(conj nu)*` for `nu` below the axis.
pub fn lower_theta<T: Real, M: OperatorModel<T>>(model: &M, nu: C<T>) -> Result<CMat<T>> {
    Ok(char_function(model.triplet(), model, nu.conj(), &Integrator::Exact)?.adjoint())
}
