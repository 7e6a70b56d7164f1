//! Linearized boundary problem in the `π_ij x_i x_j` symmetry sector.
//!
//! With `Ψ = h u(r, t)`, `h = π_ij x_i x_j` harmonic and homogeneous of
//! degree two, `Δ(h u) = h (u_rr + ((n+3)/r) u_r + u_tt)`, so the problem
//! reduces to
//! `−(u_rr + ((n+3)/r) u_r + u_tt) = 2εN(N−2) t (r² + (t+1)²)^{−(N+2)/2}`,
//! `−u_t(r, 0) = N u(r, 0)/(r² + 1)`, `u_r(0, t) = 0`, `u = 0` at `r = R`
//! and `t = T`.
//!
//! Discretization: vertex-centred finite volumes with the exact `r^{n+3}`
//! dual-cell weights on sinh-stretched grids. The matrix is symmetric and is
//! factored by a banded `L D Lᵀ`.

pub mod banded;
pub mod field;
pub mod mms;
pub mod validate;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;

pub use banded::{BandedLdlt, SymmetricBand};
pub use field::{PsiField, ReducedField};
pub use mms::{manufactured_solution, manufactured_study, MmsReport};
pub use validate::{energy, validate_solution, DecayFit, EnergyValue, SolveReport};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveConfig {
    pub dim: usize,
    pub eps: f64,
    pub r_max: f64,
    pub t_max: f64,
    pub nr: usize,
    pub nt: usize,
    /// `α` in `x_i = L sinh(α ξ_i)/sinh(α)`; zero gives a uniform grid.
    pub stretch: f64,
    #[serde(skip)]
    pub exec: Exec,
}

impl SolveConfig {
    /// `R = T = 40`, `129 × 129` nodes, stretch `4.5`.
    pub fn new(dim: usize, eps: f64) -> Result<Self> {
        let c = Self {
            dim,
            eps,
            r_max: 40.0,
            t_max: 40.0,
            nr: 129,
            nt: 129,
            stretch: 4.5,
            exec: Exec::default(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(4..=6).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if !self.eps.is_finite() {
            return Err(Error::InvalidInput(format!("eps must be finite, got {}", self.eps)));
        }
        if !(self.r_max >= 20.0 && self.t_max >= 20.0) || !self.r_max.is_finite() || !self.t_max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "domain [0, {}] x [0, {}] is too small; R and T must be at least 20",
                self.r_max, self.t_max
            )));
        }
        if self.nr < 65 || self.nt < 65 {
            return Err(Error::InvalidInput(format!(
                "grid {} x {} is too coarse; use at least 65 nodes per axis",
                self.nr, self.nt
            )));
        }
        if !(self.stretch >= 0.0 && self.stretch.is_finite()) {
            return Err(Error::InvalidInput(format!("stretch must be nonnegative, got {}", self.stretch)));
        }
        Ok(())
    }

    pub fn with_grid(mut self, nr: usize, nt: usize) -> Self {
        self.nr = nr;
        self.nt = nt;
        self
    }

    pub fn with_domain(mut self, r_max: f64, t_max: f64) -> Self {
        self.r_max = r_max;
        self.t_max = t_max;
        self
    }

    pub fn with_stretch(mut self, stretch: f64) -> Self {
        self.stretch = stretch;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

/// `m` nodes on `[0, l]`, clustered at the origin when `alpha > 0`.
pub fn stretched_grid(l: f64, m: usize, alpha: f64) -> Vec<f64> {
    (0..m)
        .map(|i| {
            let xi = i as f64 / (m - 1) as f64;
            if alpha == 0.0 {
                l * xi
            } else {
                l * (alpha * xi).sinh() / alpha.sinh()
            }
        })
        .collect()
}

/// Dual-cell midpoints and `∫ x^k` over each dual cell.
fn dual_cells(x: &[f64], k: i32) -> (Vec<f64>, Vec<f64>) {
    let m = x.len();
    let mut mid = Vec::with_capacity(m + 1);
    mid.push(x[0]);
    for w in x.windows(2) {
        mid.push(0.5 * (w[0] + w[1]));
    }
    mid.push(x[m - 1]);
    let vol = (0..m)
        .map(|i| (mid[i + 1].powi(k + 1) - mid[i].powi(k + 1)) / (k + 1) as f64)
        .collect();
    (mid, vol)
}

/// `u_rr + (k/r) u_r`, with its axis limit `(k+1) u_rr` at `r = 0`.
pub fn radial_operator(u_r: f64, u_rr: f64, r: f64, k: f64) -> f64 {
    if r == 0.0 {
        (k + 1.0) * u_rr
    } else {
        u_rr + k / r * u_r
    }
}

/// Data of a reduced problem: interior source, boundary data `g` in
/// `−u_t − N u/(r²+1) = g`, and far-field Dirichlet values.
pub struct ReducedProblem<'a> {
    pub source: &'a (dyn Fn(f64, f64) -> f64 + Sync),
    pub boundary: &'a (dyn Fn(f64) -> f64 + Sync),
    pub far_field: &'a (dyn Fn(f64, f64) -> f64 + Sync),
}

/// `2εN(N−2) t (r² + (t+1)²)^{−(N+2)/2}`.
pub fn linearized_source(dim: usize, eps: f64, r: f64, t: f64) -> f64 {
    let big = dim as f64;
    let s = r * r + (t + 1.0) * (t + 1.0);
    2.0 * eps * big * (big - 2.0) * t * s.powf(-0.5 * (big + 2.0))
}

/// Solves the reduced problem for general data.
pub fn solve_problem(cfg: &SolveConfig, problem: &ReducedProblem<'_>) -> Result<ReducedField> {
    cfg.validate()?;
    let big = cfg.dim as f64;
    let k = cfg.dim as i32 + 2;
    let r = stretched_grid(cfg.r_max, cfg.nr, cfg.stretch);
    let t = stretched_grid(cfg.t_max, cfg.nt, cfg.stretch);
    let (rm, vr) = dual_cells(&r, k);
    let (_, vt) = dual_cells(&t, 0);
    let (nr, nt) = (cfg.nr, cfg.nt);
    let mi = nr - 1;
    let mj = nt - 1;
    let unknowns = mi * mj;
    let bw = mj;

    // Face conductances.
    let cr = |i: usize, j: usize| rm[i + 1].powi(k) / (r[i + 1] - r[i]) * vt[j];
    let ct = |i: usize, j: usize| vr[i] / (t[j + 1] - t[j]);

    struct Row {
        diag: f64,
        left_r: f64,
        left_t: f64,
        rhs: f64,
    }
    let rows: Vec<Row> = cfg.exec.map(unknowns, |p| {
        let (i, j) = (p / mj, p % mj);
        let mut diag = 0.0;
        let mut rhs = vr[i] * vt[j] * (problem.source)(r[i], t[j]);
        let c = cr(i, j);
        diag += c;
        if i + 1 == mi {
            rhs += c * (problem.far_field)(r[i + 1], t[j]);
        }
        let mut left_r = 0.0;
        if i > 0 {
            let c = cr(i - 1, j);
            diag += c;
            left_r = -c;
        }
        let c = ct(i, j);
        diag += c;
        if j + 1 == mj {
            rhs += c * (problem.far_field)(r[i], t[j + 1]);
        }
        let mut left_t = 0.0;
        if j > 0 {
            let c = ct(i, j - 1);
            diag += c;
            left_t = -c;
        }
        if j == 0 {
            diag -= big * vr[i] / (r[i] * r[i] + 1.0);
            rhs += vr[i] * (problem.boundary)(r[i]);
        }
        Row {
            diag,
            left_r,
            left_t,
            rhs,
        }
    });
    let mut a = SymmetricBand::zeros(unknowns, bw);
    let mut b = Vec::with_capacity(unknowns);
    for (p, row) in rows.iter().enumerate() {
        let band = a.row_mut(p);
        band[bw] = row.diag;
        band[bw - 1] += row.left_t;
        band[0] += row.left_r;
        b.push(row.rhs);
    }
    let mut x = b.clone();
    let ldlt = BandedLdlt::factor(a.clone())?;
    ldlt.solve(&mut x);
    // One step of iterative refinement.
    let ax = a.mul(&x);
    let mut d: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    ldlt.solve(&mut d);
    for (xi, di) in x.iter_mut().zip(&d) {
        *xi += di;
    }
    let ax = a.mul(&x);
    let bnorm = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rnorm = b.iter().zip(&ax).fold(0.0f64, |m, (bi, ai)| m.max((bi - ai).abs()));
    let residual = if bnorm > 0.0 { rnorm / bnorm } else { rnorm };
    if !residual.is_finite() || residual > 1e-8 {
        return Err(Error::Solver(format!("relative residual {residual:e} after refinement")));
    }

    let mut values = vec![0.0; nr * nt];
    for i in 0..nr {
        for j in 0..nt {
            values[i * nt + j] = if i < mi && j < mj {
                x[i * mj + j]
            } else {
                (problem.far_field)(r[i], t[j])
            };
        }
    }
    Ok(ReducedField {
        dim: cfg.dim,
        eps: cfg.eps,
        r,
        t,
        values,
        residual,
    })
}

/// The profile `u` of `Ψ = π_ij x_i x_j u`.
pub fn solve_reduced(cfg: &SolveConfig) -> Result<ReducedField> {
    let (dim, eps) = (cfg.dim, cfg.eps);
    let source = move |r: f64, t: f64| linearized_source(dim, eps, r, t);
    let zero1 = |_: f64| 0.0;
    let zero2 = |_: f64, _: f64| 0.0;
    solve_problem(
        cfg,
        &ReducedProblem {
            source: &source,
            boundary: &zero1,
            far_field: &zero2,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::fd_laplacian;

    #[test]
    fn config_validation() {
        assert!(SolveConfig::new(7, 1.0).is_err());
        assert!(SolveConfig::new(5, 1.0).unwrap().with_grid(33, 129).validate().is_err());
        assert!(SolveConfig::new(5, 1.0).unwrap().with_domain(10.0, 40.0).validate().is_err());
    }

    #[test]
    fn axis_limit_matches_off_axis_extrapolation() {
        // u = cos r: u_r = −sin r, u_rr = −cos r.
        let k = 7.0;
        let op = |r: f64| radial_operator(-r.sin(), -r.cos(), r, k);
        let extrap = 2.0 * op(1e-3) - op(2e-3);
        assert!((op(0.0) - extrap).abs() < 1e-5);
        assert_eq!(op(0.0), -8.0);
    }

    #[test]
    fn reduction_identity() {
        // Δ(h u) = h (u_rr + ((n+3)/r) u_r + u_tt) for harmonic quadratic h.
        let dim = 5;
        let n = dim - 1;
        let u = |r: f64, t: f64| t * (r * r + (t + 1.0).powi(2)).powf(-2.0);
        let h = |x: &[f64]| x[0] * x[0] - 2.0 * x[1] * x[1] + x[2] * x[2] + 0.5 * x[0] * x[3];
        let full = |x: &[f64]| {
            let r = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
            h(x) * u(r, x[n])
        };
        let x = [0.3, -0.2, 0.5, 0.4, 0.7];
        let r = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        let e = 1e-4;
        let ur = (u(r + e, x[n]) - u(r - e, x[n])) / (2.0 * e);
        let urr = (u(r + e, x[n]) - 2.0 * u(r, x[n]) + u(r - e, x[n])) / (e * e);
        let utt = (u(r, x[n] + e) - 2.0 * u(r, x[n]) + u(r, x[n] - e)) / (e * e);
        let reduced = h(&x) * (radial_operator(ur, urr, r, (n + 3) as f64) + utt);
        let lap = fd_laplacian(full, &x, 1e-3);
        assert!((lap - reduced).abs() < 1e-4 * (1.0 + lap.abs()), "{lap} {reduced}");
    }

    #[test]
    fn linear_in_eps_and_zero_source_gives_zero() {
        let cfg = SolveConfig::new(5, 0.3).unwrap().with_grid(65, 65);
        let a = solve_reduced(&cfg).unwrap();
        let b = solve_reduced(&cfg.clone().with_eps(0.6)).unwrap();
        let scale = a.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, v) in a.values.iter().zip(&b.values) {
            assert!((2.0 * u - v).abs() <= 1e-10 * 2.0 * scale);
        }
        let z = solve_reduced(&cfg.with_eps(0.0)).unwrap();
        assert!(z.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let cfg = SolveConfig::new(4, 1.0).unwrap().with_grid(65, 65);
        let a = solve_reduced(&cfg.clone().with_exec(Exec::Sequential)).unwrap();
        let b = solve_reduced(&cfg.with_exec(Exec::Parallel)).unwrap();
        assert_eq!(a.values, b.values);
    }
}
