//! Report builders for the numerical subcommands.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use yamabe_core::bubble::Bubble;
use yamabe_core::corrections::CorrectionParams;
use yamabe_core::expansions::{compare_with_maximum, total_polynomial};
use yamabe_core::linsolve::{solve_reduced, validate_solution, ReducedField, SolveConfig, SolveReport};
use yamabe_core::pohozaev::{
    constant_regular_part, mass_flux, mass_flux_a_part_mc, poho_identity_residual, random_conformal_jet,
    FieldOnHalfSpace, GaussianBump, IdentityData, IdentityReport, MassFluxReport, MassRelation, McEstimate,
    NormalConvention, SumField, SurfaceQuadrature,
};
use yamabe_core::scalars::{parse_rat, rat_to_f64};
use yamabe_core::tensors::{MetricJet, TraceFreePi};
use yamabe_core::{Exec, ExactScalar};

#[derive(Serialize)]
pub struct Coefficient {
    pub monomial: &'static str,
    pub value: ExactScalar,
    pub display: String,
}

#[derive(Serialize)]
pub struct PointValue {
    pub a1: String,
    pub a2: String,
    pub value: String,
    pub is_maximizer: bool,
}

#[derive(Serialize)]
pub struct OptimizeReport {
    pub dim: usize,
    /// `k` in the unit `|S^k|` of every value.
    pub unit_sphere: u32,
    pub polynomial: String,
    pub coefficients: Vec<Coefficient>,
    pub argmax: (String, String),
    pub value: String,
    pub value_f64: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_point: Option<PointValue>,
}

pub fn optimize(dim: usize) -> Result<OptimizeReport> {
    if !(dim == 5 || dim == 6) {
        bail!("optimize needs --dim 5 or 6; the four-dimensional bound is linear in delta (see verify-constants --dim 4)");
    }
    let poly = total_polynomial(dim)?;
    let max = poly.maximize()?;
    let reference_point = if dim == 6 {
        let (a1, a2) = (parse_rat("-128/7")?, parse_rat("544/35")?);
        let cmp = compare_with_maximum(&poly, a1.clone(), a2.clone())?;
        Some(PointValue {
            a1: a1.to_string(),
            a2: a2.to_string(),
            value: cmp.point_value.to_string(),
            is_maximizer: cmp.is_maximizer,
        })
    } else {
        None
    };
    Ok(OptimizeReport {
        dim,
        unit_sphere: max.unit_sphere,
        polynomial: poly.to_string(),
        coefficients: poly
            .coeffs()
            .map(|(m, c)| Coefficient {
                monomial: m.label(),
                value: c.clone(),
                display: c.to_string(),
            })
            .collect(),
        argmax: (max.argmax.0.to_string(), max.argmax.1.to_string()),
        value: max.value.to_string(),
        value_f64: max.value.to_f64(),
        reference_point,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// The standard bubble; the identity must hold.
    Bubble,
    /// Bubble plus a Gaussian bump; the identity must fail (negative control).
    Perturbed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normal {
    Inward,
    Outward,
}

impl From<Normal> for NormalConvention {
    fn from(n: Normal) -> Self {
        match n {
            Normal::Inward => NormalConvention::Inward,
            Normal::Outward => NormalConvention::Outward,
        }
    }
}

#[derive(Serialize)]
pub struct PohozaevRow {
    pub rho: f64,
    pub report: IdentityReport,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct PohozaevReport {
    pub dim: usize,
    pub profile: Profile,
    pub normal: Normal,
    /// Bubble: `|residual| ≤ tolerance`. Perturbed: `|residual| > tolerance`.
    pub tolerance: f64,
    pub rows: Vec<PohozaevRow>,
}

pub fn pohozaev(dim: usize, profile: Profile, rhos: &[f64], normal: Normal, tol: f64) -> Result<(PohozaevReport, bool)> {
    let q = SurfaceQuadrature::default();
    let data = IdentityData::bubble(dim);
    let w = Bubble::standard(dim)?;
    let field: Box<dyn FieldOnHalfSpace> = match profile {
        Profile::Bubble => Box::new(w),
        Profile::Perturbed => Box::new(SumField::new(w, GaussianBump { dim, amplitude: 0.1 })),
    };
    let mut rows = Vec::new();
    for &rho in rhos {
        let report = poho_identity_residual(field.as_ref(), &data, rho, normal.into(), &q)?;
        let passed = match profile {
            Profile::Bubble => report.residual.abs() <= tol,
            Profile::Perturbed => report.residual.abs() > tol,
        };
        rows.push(PohozaevRow { rho, report, passed });
    }
    let ok = rows.iter().all(|r| r.passed);
    Ok((
        PohozaevReport {
            dim,
            profile,
            normal,
            tolerance: tol,
            rows,
        },
        ok,
    ))
}

#[derive(Serialize)]
pub struct MassFluxOutput {
    pub jet_source: String,
    pub sff_second_trace: String,
    pub flux: MassFluxReport,
    pub monte_carlo: Option<McEstimate>,
    /// `|MC − exact| / max(|exact|, L¹ scale)`.
    pub monte_carlo_gap: Option<f64>,
    pub tolerance: f64,
    /// `lim P′` implied by the flux through the exact relation.
    pub p_prime: Option<f64>,
    pub mass: Option<f64>,
}

pub struct MassFluxArgs<'a> {
    pub dim: usize,
    pub jet: Option<&'a Path>,
    pub seed: u64,
    pub rho: f64,
    pub phi_constant: Option<f64>,
    pub samples: usize,
    pub replicates: usize,
    pub tol: f64,
}

pub fn mass_flux_cmd(a: &MassFluxArgs<'_>) -> Result<(MassFluxOutput, bool)> {
    if !(4..=7).contains(&a.dim) {
        bail!("mass-flux supports --dim 4 to 7, got {}", a.dim);
    }
    let (jet, jet_source) = match a.jet {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let jet = MetricJet::from_json_str(&text, false)?;
            if jet.n + 1 != a.dim {
                bail!("jet file has n = {} but --dim is {}", jet.n, a.dim);
            }
            (jet, path.display().to_string())
        }
        None => (random_conformal_jet(a.dim - 1, a.seed), format!("random conformal jet, seed {}", a.seed)),
    };
    let q = SurfaceQuadrature::default();
    let phi = a.phi_constant.map(|c| constant_regular_part(a.dim, c));
    let flux = mass_flux(&jet, phi.as_ref().map(|p| p as &dyn FieldOnHalfSpace), a.rho, &q)?;
    let (monte_carlo, gap) = if a.samples > 0 {
        let mc = mass_flux_a_part_mc(&jet, a.rho, a.samples, a.replicates, a.seed, Exec::default())?;
        let gap = (mc.mean - flux.a_part).abs() / flux.a_part.abs().max(mc.l1_scale).max(f64::MIN_POSITIVE);
        (Some(mc), Some(gap))
    } else {
        (None, None)
    };
    let trace = jet.sff_second_trace();
    let (p_prime, mass) = match MassRelation::new(a.dim) {
        Ok(rel) => {
            let pp = rel.p_prime(flux.total, rat_to_f64(&trace));
            (Some(pp), Some(rel.mass(pp, rat_to_f64(&trace))))
        }
        Err(_) => (None, None),
    };
    let ok = gap.map_or(true, |g| g < a.tol);
    Ok((
        MassFluxOutput {
            jet_source,
            sff_second_trace: trace.to_string(),
            flux,
            monte_carlo,
            monte_carlo_gap: gap,
            tolerance: a.tol,
            p_prime,
            mass,
        },
        ok,
    ))
}

pub struct SolveArgs {
    pub dim: usize,
    pub eps: f64,
    pub r_max: f64,
    pub t_max: f64,
    pub nr: usize,
    pub nt: usize,
    pub a1: Option<f64>,
    pub a2: Option<f64>,
    pub stretch: f64,
    pub pi_diag: Option<Vec<i64>>,
}

#[derive(Serialize)]
pub struct SolveOutput {
    pub config: SolveConfig,
    pub a1: f64,
    pub a2: f64,
    pub pi_diag: Vec<i64>,
    pub report: SolveReport,
    pub checks: SolveChecks,
}

#[derive(Serialize)]
pub struct SolveChecks {
    pub residual_ok: bool,
    pub decay_ok: bool,
    pub energy_ok: bool,
}

/// Default parameters: the optimal point for `N = 5, 6`, zero for `N = 4`.
fn default_params(dim: usize) -> (f64, f64) {
    match dim {
        5 => (-63.0 / 4.0, 105.0 / 8.0),
        6 => (-128.0 / 7.0, 544.0 / 35.0),
        _ => (0.0, 0.0),
    }
}

pub fn solve(a: &SolveArgs) -> Result<(SolveOutput, ReducedField, bool)> {
    let cfg = SolveConfig {
        dim: a.dim,
        eps: a.eps,
        r_max: a.r_max,
        t_max: a.t_max,
        nr: a.nr,
        nt: a.nt,
        stretch: a.stretch,
        exec: Exec::default(),
    };
    cfg.validate()?;
    let (d1, d2) = default_params(a.dim);
    let (a1, a2) = (a.a1.unwrap_or(d1), a.a2.unwrap_or(d2));
    let pi_diag = match &a.pi_diag {
        Some(d) if d.len() != a.dim - 1 => bail!("--pi needs {} diagonal entries, got {}", a.dim - 1, d.len()),
        Some(d) => d.clone(),
        None => {
            let mut d = vec![0i64; a.dim - 1];
            d[0] = 1;
            d[1] = -1;
            d
        }
    };
    let pi = TraceFreePi::diag(&pi_diag)?;
    let params = CorrectionParams::new(a.dim, a.eps, pi, a1, a2)?;
    let field = solve_reduced(&cfg)?;
    let report = validate_solution(&field, &params)?;
    let checks = SolveChecks {
        residual_ok: report.residual <= 1e-8,
        decay_ok: (report.decay.exponent - report.decay.expected).abs() <= 0.2,
        energy_ok: !report.energy.violation,
    };
    let ok = checks.residual_ok && checks.decay_ok && checks.energy_ok;
    Ok((
        SolveOutput {
            config: cfg,
            a1,
            a2,
            pi_diag,
            report,
            checks,
        },
        field,
        ok,
    ))
}

pub fn write_field_csv(field: &ReducedField, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["r", "t", "u"])?;
    for (i, r) in field.r.iter().enumerate() {
        for (j, t) in field.t.iter().enumerate() {
            w.write_record([format!("{r:.12e}"), format!("{t:.12e}"), format!("{:.12e}", field.at(i, j))])?;
        }
    }
    w.flush()?;
    Ok(())
}
