//! Check registry and dispatch over the scenario models.

use std::fmt;

use num_complex::Complex64;
use pso_core::expfun::ef_inner;
use pso_core::matops::{CMat, CVec, WANDERING_TOL};
use pso_core::models::{
    haar_gram, HaarSystem, MomentumModel, NonlocalCase, NonlocalModel, ShiftModel,
};
use pso_core::psocheck::{
    classify_spectrum, constancy_scan, constant_theta, green_scan, inclusion_scan, moebius_scan,
    orthogonality_scan, pso_certificate, shift_decay_scan, CheckEntry, Grid, Verdict,
    CONSTANCY_TOL, PASS_TOL,
};
use pso_core::triplets::{char_function, Integrator, OperatorModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scenario::{ExtensionSpec, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    Orthogonality,
    Constancy,
    Inclusion,
    Pso,
    Green,
    ClosedForm,
    Moebius,
    Spectrum,
    Gram,
    Wandering,
    ShiftDecay,
    CayleyIdentity,
}

const OPERATORS: &[&str] = &["momentum", "nonlocal"];

impl CheckId {
    pub const ALL: [CheckId; 12] = [
        CheckId::Orthogonality,
        CheckId::Constancy,
        CheckId::Inclusion,
        CheckId::Pso,
        CheckId::Green,
        CheckId::ClosedForm,
        CheckId::Moebius,
        CheckId::Spectrum,
        CheckId::Gram,
        CheckId::Wandering,
        CheckId::ShiftDecay,
        CheckId::CayleyIdentity,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Orthogonality => "orthogonality",
            CheckId::Constancy => "constancy",
            CheckId::Inclusion => "inclusion",
            CheckId::Pso => "pso",
            CheckId::Green => "green",
            CheckId::ClosedForm => "closed-form",
            CheckId::Moebius => "moebius",
            CheckId::Spectrum => "spectrum",
            CheckId::Gram => "gram",
            CheckId::Wandering => "wandering",
            CheckId::ShiftDecay => "shift-decay",
            CheckId::CayleyIdentity => "cayley-identity",
        }
    }

    /// Model kinds the check applies to.
    pub fn models(self) -> &'static [&'static str] {
        match self {
            CheckId::Orthogonality => &["momentum", "nonlocal", "shift"],
            CheckId::Constancy
            | CheckId::Inclusion
            | CheckId::Pso
            | CheckId::Green
            | CheckId::Moebius
            | CheckId::Spectrum => OPERATORS,
            CheckId::ClosedForm => &["nonlocal"],
            CheckId::Gram => &["haar"],
            CheckId::Wandering | CheckId::ShiftDecay | CheckId::CayleyIdentity => &["shift"],
        }
    }

    /// The mathematical statement a passing check certifies.
    pub fn certifies(self) -> &'static str {
        match self {
            CheckId::Orthogonality => {
                "defect subspaces at every lambda above and every nu below the real axis are mutually orthogonal"
            }
            CheckId::Constancy => "the characteristic function is constant on the upper half-plane",
            CheckId::Inclusion => {
                "for all lambda, mu above the axis the defect subspace at lambda lies in the sum of the minimal \
                 domain and the defect subspace at mu"
            }
            CheckId::Pso => {
                "the operator is Phillips symmetric: orthogonality, constancy and inclusion hold and agree"
            }
            CheckId::Green => "the boundary maps satisfy the Green identity on the maximal domain",
            CheckId::ClosedForm => {
                "the computed characteristic function (case I) or defect inner products (case II) match their \
                 closed forms"
            }
            CheckId::Moebius => {
                "characteristic functions of two boundary triplets differ by the linear fractional transform of \
                 a Krein-unitary K"
            }
            CheckId::Spectrum => {
                "the non-real spectrum of the extension T Gamma_+ f = Gamma_- f is read off from the constant \
                 characteristic function"
            }
            CheckId::Gram => "the dilated and translated Haar functions form an orthonormal system",
            CheckId::Wandering => "span{e_0} is wandering for the cyclic shift up to n = d - 1",
            CheckId::ShiftDecay => {
                "the orthogonality defect of the shift surrogate at 2i decays like |t|^(d-1) within a factor 10 \
                 over d in {10, 16, 22, 28} and the scenario dimension"
            }
            CheckId::CayleyIdentity => "(A - iI)(U - I) = 2iI for the inverse Cayley transform A of U",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub enum Built {
    Momentum(MomentumModel<f64>),
    Nonlocal(NonlocalModel<f64>),
    Shift(ShiftModel<f64>),
    Haar(HaarSystem),
}

impl Built {
    pub fn new(model: &ModelSpec) -> pso_core::Result<Self> {
        Ok(match model {
            ModelSpec::Momentum { m } => Built::Momentum(MomentumModel::new(*m)?),
            ModelSpec::Nonlocal { case, alpha } => {
                Built::Nonlocal(NonlocalModel::new(*case, *alpha)?)
            }
            ModelSpec::Shift { d, twist } => Built::Shift(ShiftModel::new(*d, *twist)?),
            ModelSpec::Haar { j_range, k_range } => Built::Haar(HaarSystem::new(
                j_range[0]..=j_range[1],
                k_range[0]..=k_range[1],
            )?),
        })
    }

    pub fn name(&self) -> String {
        match self {
            Built::Momentum(m) => m.name(),
            Built::Nonlocal(m) => m.name(),
            Built::Shift(m) => format!("shift(d={}, twist={})", m.d(), m.twist()),
            Built::Haar(h) => format!(
                "haar(j={}..={}, k={}..={})",
                h.j_range.start(),
                h.j_range.end(),
                h.k_range.start(),
                h.k_range.end()
            ),
        }
    }

    pub fn notes(&self) -> Vec<String> {
        match self {
            Built::Nonlocal(m) => m.notes(),
            _ => Vec::new(),
        }
    }
}

/// Inputs shared by all checks of a scenario.
pub struct Context {
    pub grid: Grid<f64>,
    pub extension: Option<ExtensionSpec>,
    pub seed: u64,
}

fn point(z: Complex64) -> String {
    pso_core::scalar::format_complex(z)
}

fn matrix(rows: &[Vec<Complex64>]) -> CMat<f64> {
    CMat::from_fn(rows.len(), rows.len(), |r, c| rows[r][c])
}

pub fn run(id: CheckId, built: &Built, ctx: &Context) -> Result<CheckEntry, String> {
    let entry = match (id, built) {
        (_, Built::Momentum(m)) if CheckId::models(id).contains(&"momentum") => {
            operator_check(id, m, ctx)
        }
        (CheckId::ClosedForm, Built::Nonlocal(m)) => closed_form(m, &ctx.grid),
        (_, Built::Nonlocal(m)) if CheckId::models(id).contains(&"nonlocal") => {
            operator_check(id, m, ctx)
        }
        (CheckId::Orthogonality, Built::Shift(m)) => Ok(orthogonality_scan(m, &ctx.grid)),
        (CheckId::Wandering, Built::Shift(m)) => wandering(m),
        (CheckId::ShiftDecay, Built::Shift(m)) => {
            let mut dims = vec![10, 16, 22, 28, m.d()];
            dims.sort_unstable();
            dims.dedup();
            shift_decay_scan(&dims, Complex64::new(0.0, 2.0)).map_err(|e| e.to_string())
        }
        (CheckId::CayleyIdentity, Built::Shift(m)) => cayley_identity(m, ctx.seed),
        (CheckId::Gram, Built::Haar(h)) => Ok(gram(h)),
        _ => Err(format!("check {id} does not apply to {}", built.name())),
    }?;
    Ok(CheckEntry {
        id: id.as_str().to_string(),
        ..entry
    })
}

fn operator_check<M: OperatorModel<f64>>(
    id: CheckId,
    model: &M,
    ctx: &Context,
) -> Result<CheckEntry, String> {
    let grid = &ctx.grid;
    match id {
        CheckId::Orthogonality => Ok(orthogonality_scan(model, grid)),
        CheckId::Constancy => Ok(constancy_scan(
            model,
            model.triplet(),
            grid,
            &Integrator::Exact,
        )),
        CheckId::Inclusion => Ok(inclusion_scan(model, grid)),
        CheckId::Pso => Ok(pso(model, grid)),
        CheckId::Green => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            green_scan(model, 20, &mut rng).map_err(|e| e.to_string())
        }
        CheckId::Moebius => {
            moebius_scan(model, Complex64::new(0.0, 1.0), grid).map_err(|e| e.to_string())
        }
        CheckId::Spectrum => spectrum(model, ctx),
        _ => Err(format!("check {id} does not apply to {}", model.name())),
    }
}

fn pso<M: OperatorModel<f64>>(model: &M, grid: &Grid<f64>) -> CheckEntry {
    let cert = pso_certificate(model, grid);
    let worst = cert
        .checks
        .iter()
        .filter(|c| c.id != "equivalence")
        .max_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
        .expect("three criteria");
    let summary = cert
        .checks
        .iter()
        .map(|c| format!("{}={}", c.id, c.verdict))
        .collect::<Vec<_>>()
        .join(", ");
    CheckEntry::new(
        "pso",
        worst.max_residual,
        worst.tolerance,
        cert.verdict,
        Some(format!(
            "{summary}; worst {}: {}",
            worst.id,
            worst.witness.clone().unwrap_or_default()
        )),
    )
}

/// Classification is only meaningful for a constant characteristic
/// function, so it is refused unless the operator is certified or the
/// constant is supplied.
fn spectrum<M: OperatorModel<f64>>(model: &M, ctx: &Context) -> Result<CheckEntry, String> {
    let ext = ctx
        .extension
        .as_ref()
        .ok_or("the spectrum check needs an \"extension\" entry with the matrix t")?;
    let t = matrix(&ext.t);
    if t.nrows() != model.m() {
        return Err(format!(
            "t is {0}x{0} but the defect dimension is {1}",
            t.nrows(),
            model.m()
        ));
    }
    let (theta, residual, source) = match &ext.theta {
        Some(rows) => (matrix(rows), 0.0, "supplied Theta"),
        None => {
            let cert = pso_certificate(model, &ctx.grid);
            if cert.verdict != Verdict::Pass {
                return Err(format!(
                    "refusing to classify: {} is not certified Phillips symmetric ({}); supply extension.theta \
                     to classify anyway",
                    model.name(),
                    cert.verdict
                ));
            }
            let dev = cert.check("constancy").map_or(0.0, |c| c.max_residual);
            (
                constant_theta(model).map_err(|e| e.to_string())?,
                dev,
                "Theta(i) of a certified operator",
            )
        }
    };
    if theta.shape() != t.shape() {
        return Err("theta and t must have the same size".into());
    }
    let class = classify_spectrum(&theta, &t).map_err(|e| e.to_string())?;
    Ok(CheckEntry::new(
        "spectrum",
        residual,
        CONSTANCY_TOL,
        Verdict::Pass,
        Some(format!("{class:?} ({source})")),
    ))
}

fn closed_form(model: &NonlocalModel<f64>, grid: &Grid<f64>) -> Result<CheckEntry, String> {
    let err = |e: pso_core::Error| e.to_string();
    let mut worst = (0.0f64, None);
    match model.case() {
        NonlocalCase::I => {
            for &l in grid.upper() {
                let th = char_function(model.triplet(), model, l, &Integrator::Exact)
                    .map_err(err)?[(0, 0)];
                let d = (th - model.theta_closed_form(l).map_err(err)?).norm();
                if d >= worst.0 {
                    worst = (d, Some(format!("lambda={}", point(l))));
                }
            }
        }
        NonlocalCase::II => {
            let downs = grid
                .lower()
                .iter()
                .map(|&n| model.nonlocal_defect(n).map(|f| (n, f)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            for &l in grid.upper() {
                let fl = model.nonlocal_defect(l).map_err(err)?;
                for (n, fnu) in &downs {
                    let d = (ef_inner(&fl, fnu)
                        - model.defect_inner_closed_form(l, *n).map_err(err)?)
                    .norm();
                    if d >= worst.0 {
                        worst = (d, Some(format!("lambda={}, nu={}", point(l), point(*n))));
                    }
                }
            }
        }
    }
    Ok(CheckEntry::graded(
        "closed-form",
        worst.0,
        PASS_TOL,
        worst.1,
    ))
}

fn wandering(model: &ShiftModel<f64>) -> Result<CheckEntry, String> {
    let d = model.d();
    let report = model.wandering(d).map_err(|e| e.to_string())?;
    let (worst, at) =
        report.defect_per_n[..d - 1]
            .iter()
            .enumerate()
            .fold(
                (0.0f64, 1),
                |acc, (k, &v)| if v > acc.0 { (v, k + 1) } else { acc },
            );
    let witness = format!(
        "largest defect at n={at}; first violation at n={}, defect there {:.6}",
        report
            .first_violation
            .map_or("none".to_string(), |n| n.to_string()),
        report.defect_per_n[d - 1]
    );
    Ok(CheckEntry::graded(
        "wandering",
        worst,
        WANDERING_TOL,
        Some(witness),
    ))
}

fn cayley_identity(model: &ShiftModel<f64>, seed: u64) -> Result<CheckEntry, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, None);
    for k in 0..20 {
        let x = CVec::<f64>::from_fn(model.d(), |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let r = model.shift_cayley_identity(&x).map_err(|e| e.to_string())?;
        if r >= worst.0 {
            worst = (r, Some(format!("sample {k}")));
        }
    }
    Ok(CheckEntry::graded(
        "cayley-identity",
        worst.0,
        1e-11,
        worst.1,
    ))
}

fn gram(system: &HaarSystem) -> CheckEntry {
    let g = haar_gram::<f64>(system);
    let n = g.nrows();
    let idx = system.indices();
    let mut worst = (0.0f64, None);
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            let d = (g[(r, c)] - Complex64::new(target, 0.0)).norm();
            if d > worst.0 {
                worst = (d, Some(format!("(j,k)={:?} vs {:?}", idx[r], idx[c])));
            }
        }
    }
    if worst.1.is_none() {
        worst.1 = Some(format!("{n} elements"));
    }
    CheckEntry::graded("gram", worst.0, 1e-12, worst.1)
}

/// Characteristic function of an operator model over the upper grid.
pub fn theta_rows<M: OperatorModel<f64>>(
    model: &M,
    grid: &Grid<f64>,
) -> pso_core::Result<Vec<(Complex64, CMat<f64>)>> {
    grid.upper()
        .iter()
        .map(|&l| char_function(model.triplet(), model, l, &Integrator::Exact).map(|t| (l, t)))
        .collect()
}
