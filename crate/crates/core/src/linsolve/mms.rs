//! Manufactured-solution study of the reduced solver.

use serde::Serialize;

use crate::error::{Error, Result};

use super::{solve_problem, ReducedProblem, SolveConfig};

/// Planted profile `u* = t (r² + (t+1)²)^{−(N−1)/2}` with its source
/// `−(u_rr + ((N+2)/r) u_r + u_tt)` and boundary data `−u_t − N u/(r²+1)` at
/// `t = 0`.
#[derive(Clone, Copy, Debug)]
pub struct ManufacturedSolution {
    dim: usize,
}

pub fn manufactured_solution(dim: usize) -> ManufacturedSolution {
    ManufacturedSolution { dim }
}

impl ManufacturedSolution {
    fn a(&self) -> f64 {
        0.5 * (self.dim as f64 - 1.0)
    }

    pub fn value(&self, r: f64, t: f64) -> f64 {
        t * (r * r + (t + 1.0).powi(2)).powf(-self.a())
    }

    pub fn source(&self, r: f64, t: f64) -> f64 {
        let a = self.a();
        let k = self.dim as f64 + 2.0;
        let s = r * r + (t + 1.0).powi(2);
        let bracket = -2.0 * a * t * (1.0 + k) - 2.0 * a * (3.0 * t + 2.0) + 4.0 * a * (a + 1.0) * t;
        -s.powf(-a - 1.0) * bracket
    }

    pub fn boundary(&self, r: f64) -> f64 {
        -(r * r + 1.0).powf(-self.a())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MmsReport {
    pub dim: usize,
    pub sizes: Vec<usize>,
    pub linf: Vec<f64>,
    /// Root mean square over nodes, weighted by `r^{N+2}` cell volumes.
    pub l2: Vec<f64>,
    pub order_linf: Vec<f64>,
    pub order_l2: Vec<f64>,
}

/// Solves the manufactured problem on `m × m` grids for each size.
pub fn manufactured_study(base: &SolveConfig, sizes: &[usize]) -> Result<MmsReport> {
    if sizes.len() < 2 {
        return Err(Error::InvalidInput("a refinement study needs at least two grids".into()));
    }
    let ms = manufactured_solution(base.dim);
    let source = |r: f64, t: f64| ms.source(r, t);
    let boundary = |r: f64| ms.boundary(r);
    let far = |r: f64, t: f64| ms.value(r, t);
    let mut linf = Vec::new();
    let mut l2 = Vec::new();
    for &m in sizes {
        let cfg = base.clone().with_grid(m, m);
        let f = solve_problem(
            &cfg,
            &ReducedProblem {
                source: &source,
                boundary: &boundary,
                far_field: &far,
            },
        )?;
        let k = base.dim as i32 + 2;
        let mut emax = 0.0f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &r) in f.r.iter().enumerate() {
            let wr = cell_width(&f.r, i) * r.powi(k).max(f.r[1].powi(k));
            for (j, &t) in f.t.iter().enumerate() {
                let e = f.at(i, j) - ms.value(r, t);
                emax = emax.max(e.abs());
                let w = wr * cell_width(&f.t, j);
                num += w * e * e;
                den += w;
            }
        }
        linf.push(emax);
        l2.push((num / den).sqrt());
    }
    let order = |e: &[f64]| -> Vec<f64> {
        (1..sizes.len())
            .map(|i| (e[i - 1] / e[i]).ln() / ((sizes[i] - 1) as f64 / (sizes[i - 1] - 1) as f64).ln())
            .collect()
    };
    Ok(MmsReport {
        dim: base.dim,
        sizes: sizes.to_vec(),
        order_linf: order(&linf),
        order_l2: order(&l2),
        linf,
        l2,
    })
}

fn cell_width(x: &[f64], i: usize) -> f64 {
    let lo = if i == 0 { x[0] } else { 0.5 * (x[i - 1] + x[i]) };
    let hi = if i + 1 == x.len() { x[i] } else { 0.5 * (x[i] + x[i + 1]) };
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linsolve::radial_operator;

    #[test]
    fn planted_source_matches_finite_differences() {
        for dim in 4..=6 {
            let ms = manufactured_solution(dim);
            let k = dim as f64 + 2.0;
            let h = 1e-4;
            for (r, t) in [(0.3, 0.7), (2.0, 0.1), (0.0, 1.5)] {
                let u = |r: f64, t: f64| ms.value(r, t);
                let ur = if r == 0.0 { 0.0 } else { (u(r + h, t) - u(r - h, t)) / (2.0 * h) };
                let urr = (u(r + h, t) - 2.0 * u(r, t) + u((r - h).abs(), t)) / (h * h);
                let utt = (u(r, t + h) - 2.0 * u(r, t) + u(r, t - h)) / (h * h);
                let fd = -(radial_operator(ur, urr, r, k) + utt);
                assert!((fd - ms.source(r, t)).abs() < 1e-5 * (1.0 + fd.abs()), "{dim} {r} {t}");
            }
            let g = (u0(&ms, 0.8, h) - u0(&ms, 0.8, -h)) / (2.0 * h);
            assert!((-g - ms.boundary(0.8)).abs() < 1e-7);
        }
    }

    fn u0(ms: &ManufacturedSolution, r: f64, t: f64) -> f64 {
        ms.value(r, t)
    }
}
