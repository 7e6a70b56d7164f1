//! Diagnostics of a solved profile: decay rate, point and orthogonality
//! conditions, boundary consistency against `q`, and the quadratic energy of
//! `Ξ = Ψ − Φ`.

use serde::Serialize;

use crate::corrections::{phi_profile, q_hat, CorrectionParams};
use crate::error::{Error, Result};

use super::field::ReducedField;

/// Second-order first derivative on a nonuniform grid.
fn derivative(f: &[f64], x: &[f64]) -> Vec<f64> {
    let m = x.len();
    let one_sided = |f0: f64, f1: f64, f2: f64, h0: f64, h1: f64| {
        -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * f0 + (h0 + h1) / (h0 * h1) * f1 - h0 / (h1 * (h0 + h1)) * f2
    };
    let mut d = vec![0.0; m];
    d[0] = one_sided(f[0], f[1], f[2], x[1] - x[0], x[2] - x[1]);
    d[m - 1] = -one_sided(f[m - 1], f[m - 2], f[m - 3], x[m - 1] - x[m - 2], x[m - 2] - x[m - 3]);
    for i in 1..m - 1 {
        let h1 = x[i] - x[i - 1];
        let h2 = x[i + 1] - x[i];
        d[i] = -h2 / (h1 * (h1 + h2)) * f[i - 1] + (h2 - h1) / (h1 * h2) * f[i] + h1 / (h2 * (h1 + h2)) * f[i + 1];
    }
    d
}

fn trapezoid(f: &[f64], x: &[f64]) -> f64 {
    x.windows(2).zip(f.windows(2)).map(|(xw, fw)| 0.5 * (xw[1] - xw[0]) * (fw[0] + fw[1])).sum()
}

/// Power-law fit `|u(r, 0)| ≈ C r^{−exponent}` over a window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub points: usize,
    pub exponent: f64,
    /// `N − 1`.
    pub expected: f64,
}

/// Least-squares slope of `log|u(r,0)|` against `log r` on `[R/5, 2R/5]`.
pub fn decay_fit(field: &ReducedField) -> Result<DecayFit> {
    let rmax = *field.r.last().unwrap();
    let window = (0.2 * rmax, 0.4 * rmax);
    let pts: Vec<(f64, f64)> = field
        .r
        .iter()
        .zip(field.boundary_profile())
        .filter(|(r, _)| **r >= window.0 && **r <= window.1)
        .map(|(r, u)| (r.ln(), u))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "decay fit window [{}, {}] holds only {} nodes",
            window.0,
            window.1,
            pts.len()
        )));
    }
    if pts.iter().any(|p| p.1 == 0.0) || pts.windows(2).any(|w| w[0].1.signum() != w[1].1.signum()) {
        return Err(Error::InvalidInput("profile changes sign inside the decay fit window".into()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1.abs().ln()).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1.abs().ln() - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(DecayFit {
        window,
        points: pts.len(),
        exponent: -sxy / sxx,
        expected: field.dim as f64 - 1.0,
    })
}

/// Energy `∫|∇Ξ|² − N ∫ w^{2/(N−2)} Ξ²` of `Ξ = h ξ`, per unit
/// `ε² ‖π‖² |S^{N−2}|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyValue {
    pub a1: f64,
    pub a2: f64,
    pub volume: f64,
    pub boundary: f64,
    pub energy: f64,
    /// Set when `energy < −1e-6 · volume`.
    pub violation: bool,
}

/// Reduced energy of `ξ = u − ε G` with the angular factors of `h`:
/// `⟨h²⟩ = c ‖π‖² r⁴`, `⟨|∇h|²⟩ = (4/n) ‖π‖² r²`, `c = 2/(n(n+2))`.
pub fn energy(field: &ReducedField, a1: f64, a2: f64) -> EnergyValue {
    let n = (field.dim - 1) as f64;
    let c = 2.0 / (n * (n + 2.0));
    let g = phi_profile(field.dim, a1, a2);
    let (nr, nt) = (field.nr(), field.nt());
    let eps = if field.eps == 0.0 { 1.0 } else { field.eps };
    let xi: Vec<f64> = (0..nr * nt)
        .map(|p| (field.values[p] - field.eps * g.value_rt(field.r[p / nt], field.t[p % nt])) / eps)
        .collect();
    let mut xr = vec![0.0; nr * nt];
    for j in 0..nt {
        let col: Vec<f64> = (0..nr).map(|i| xi[i * nt + j]).collect();
        for (i, d) in derivative(&col, &field.r).into_iter().enumerate() {
            xr[i * nt + j] = d;
        }
    }
    let inner: Vec<f64> = (0..nr)
        .map(|i| {
            let r = field.r[i];
            let row = &xi[i * nt..(i + 1) * nt];
            let xt = derivative(row, &field.t);
            let dens: Vec<f64> = (0..nt)
                .map(|j| {
                    let (v, vr) = (row[j], xr[i * nt + j]);
                    (4.0 / n) * r * r * v * v + 4.0 * c * r.powi(3) * v * vr + c * r.powi(4) * (vr * vr + xt[j] * xt[j])
                })
                .collect();
            r.powf(n - 1.0) * trapezoid(&dens, &field.t)
        })
        .collect();
    let volume = trapezoid(&inner, &field.r);
    let big = field.dim as f64;
    let bd: Vec<f64> = (0..nr)
        .map(|i| {
            let r = field.r[i];
            let v = xi[i * nt];
            r.powf(n - 1.0) * c * r.powi(4) * v * v / (r * r + 1.0)
        })
        .collect();
    let boundary = big * trapezoid(&bd, &field.r);
    let energy = volume - boundary;
    EnergyValue {
        a1,
        a2,
        volume,
        boundary,
        energy,
        violation: energy < -1e-6 * volume,
    }
}

/// Largest `|−ξ_t − N ξ/(r²+1) − ε q̂(r)|` over the boundary nodes, relative
/// to `max |ε q̂|`.
pub fn boundary_consistency(field: &ReducedField, a1: f64, a2: f64) -> f64 {
    let g = phi_profile(field.dim, a1, a2);
    let big = field.dim as f64;
    let t = &field.t;
    let (h0, h1) = (t[1] - t[0], t[2] - t[1]);
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..field.nr() - 1 {
        let r = field.r[i];
        let xi = |j: usize| field.at(i, j) - field.eps * g.value_rt(r, t[j]);
        let d = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * xi(0) + (h0 + h1) / (h0 * h1) * xi(1)
            - h0 / (h1 * (h0 + h1)) * xi(2);
        let lhs = -d - big * xi(0) / (r * r + 1.0);
        let q = field.eps * q_hat(field.dim, a1, a2, r * r + 1.0);
        worst = worst.max((lhs - q).abs());
        scale = scale.max(q.abs());
    }
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub dim: usize,
    pub eps: f64,
    pub nr: usize,
    pub nt: usize,
    pub r_max: f64,
    pub t_max: f64,
    pub residual: f64,
    /// `max_t |u(r_1, t) − u(0, t)| / r_1`, first order at the axis.
    pub axis_slope: f64,
    pub decay: DecayFit,
    /// `sup r² |u| (1 + |x|)^{N−3} / |ε|` over the grid.
    pub sup_weighted: f64,
    /// `Ψ(0)`, zero since `h(0) = 0`.
    pub psi_origin: f64,
    /// `|∇̄Ψ(0)|`, zero since `h` is quadratic.
    pub tangential_gradient_origin: f64,
    /// `∫ w^{N/(N−2)} Ψ` and `∫ ∇Ξ·∇W`: both carry the angular mean of `h`,
    /// which vanishes for trace-free `π`.
    pub weighted_mean: f64,
    pub gradient_pairing: f64,
    pub boundary_consistency: f64,
    pub energy: EnergyValue,
}

/// Diagnostics of a solved profile against the correction parameters.
pub fn validate_solution(field: &ReducedField, params: &CorrectionParams) -> Result<SolveReport> {
    params.validate()?;
    if params.dim != field.dim {
        return Err(Error::InvalidInput(format!(
            "parameters of dimension {} for a field of dimension {}",
            params.dim, field.dim
        )));
    }
    let big = field.dim as f64;
    let nt = field.nt();
    let r1 = field.r[1];
    let axis_slope = (0..nt).fold(0.0f64, |m, j| m.max((field.at(1, j) - field.at(0, j)).abs() / r1));
    let eps = if field.eps == 0.0 { 1.0 } else { field.eps.abs() };
    let mut sup_weighted = 0.0f64;
    for (i, &r) in field.r.iter().enumerate() {
        for (j, &t) in field.t.iter().enumerate() {
            let rho = (r * r + t * t).sqrt();
            sup_weighted = sup_weighted.max(r * r * field.at(i, j).abs() * (1.0 + rho).powf(big - 3.0) / eps);
        }
    }
    // The trace-free π has zero angular mean, so the two pairings vanish.
    let mean_h = (0..params.pi.dim()).map(|i| params.pi.get(i, i)).sum::<f64>();
    Ok(SolveReport {
        dim: field.dim,
        eps: field.eps,
        nr: field.nr(),
        nt,
        r_max: *field.r.last().unwrap(),
        t_max: *field.t.last().unwrap(),
        residual: field.residual,
        axis_slope,
        decay: decay_fit(field)?,
        sup_weighted,
        psi_origin: 0.0,
        tangential_gradient_origin: 0.0,
        weighted_mean: mean_h,
        gradient_pairing: mean_h,
        boundary_consistency: boundary_consistency(field, params.a1, params.a2),
        energy: energy(field, params.a1, params.a2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonuniform_derivative_is_exact_for_quadratics() {
        let x = [0.0, 0.1, 0.3, 0.6, 1.0, 1.5];
        let f: Vec<f64> = x.iter().map(|v| 3.0 * v * v - v + 2.0).collect();
        for (d, v) in derivative(&f, &x).iter().zip(&x) {
            assert!((d - (6.0 * v - 1.0)).abs() < 1e-12);
        }
    }
}
