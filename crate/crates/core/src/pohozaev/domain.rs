//! Product quadrature on half-balls, their curved boundary, boundary disks
//! and rings: Gauss–Legendre in radius and polar angle, a [`SphereRule`] in
//! the tangential directions.

use crate::exec::Exec;
use crate::point::MAX_DIM;
use crate::quadrature::{gauss_legendre, SphereRule};
use crate::scalars::sphere_area;

/// Node counts for the product rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceQuadrature {
    /// Gauss–Legendre nodes in the polar angle on `[0, π/2]`.
    pub polar_nodes: usize,
    /// Gauss–Legendre nodes per radial panel.
    pub radial_nodes: usize,
    /// Nodes per angle of the tangential product rule for general fields.
    pub product_nodes: usize,
    pub exec: Exec,
}

impl Default for SurfaceQuadrature {
    fn default() -> Self {
        Self {
            polar_nodes: 48,
            radial_nodes: 24,
            product_nodes: 16,
            exec: Exec::default(),
        }
    }
}

impl SurfaceQuadrature {
    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    fn coarse(&self) -> Self {
        Self {
            polar_nodes: (self.polar_nodes / 2).max(2),
            radial_nodes: (self.radial_nodes / 2).max(2),
            ..*self
        }
    }
}

/// An integral with the gap to a half-resolution evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gl_on(a: f64, b: f64, m: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(m);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(&w).map(|(xi, wi)| (c + h * xi, h * wi)).collect()
}

/// Radial panels `[0, 1], [1, 2], [2, 4], …` clipped to `[0, radius]`.
fn panels(radius: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut lo = 0.0;
    let mut hi = radius.min(1.0);
    loop {
        out.push((lo, hi));
        if hi >= radius {
            break;
        }
        lo = hi;
        hi = (2.0 * hi).min(radius);
    }
    out
}

fn tangential_area(dim: usize) -> f64 {
    if dim == 2 {
        2.0
    } else {
        sphere_area(dim as u32 - 2).value
    }
}

fn embed(dim: usize, r: f64, theta: f64, omega: &[f64]) -> [f64; MAX_DIM] {
    let mut x = [0.0; MAX_DIM];
    let (s, c) = theta.sin_cos();
    for (i, w) in omega.iter().enumerate() {
        x[i] = r * s * w;
    }
    x[dim - 1] = r * c;
    x
}

fn sphere_sum<F>(dim: usize, rho: f64, rule: &SphereRule, m: usize, exec: Exec, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let nodes = gl_on(0.0, 0.5 * std::f64::consts::PI, m);
    let area = tangential_area(dim);
    let jac = rho.powi(dim as i32 - 1);
    exec.sum(nodes.len(), |k| {
        let (theta, w) = nodes[k];
        let avg = rule.average(|om| f(&embed(dim, rho, theta, om)[..dim]));
        w * theta.sin().powi(dim as i32 - 2) * avg
    }) * area
        * jac
}

/// `∫ f dS` over `{|x| = ρ, x_N > 0}`.
pub fn half_sphere_integral<F>(dim: usize, rho: f64, rule: &SphereRule, q: &SurfaceQuadrature, f: F) -> Estimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let fine = sphere_sum(dim, rho, rule, q.polar_nodes, q.exec, &f);
    let coarse = sphere_sum(dim, rho, rule, q.coarse().polar_nodes, q.exec, &f);
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

fn ball_sum<F>(dim: usize, radius: f64, rule: &SphereRule, q: &SurfaceQuadrature, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let radial: Vec<(f64, f64)> = panels(radius)
        .into_iter()
        .flat_map(|(a, b)| gl_on(a, b, q.radial_nodes))
        .collect();
    let polar = gl_on(0.0, 0.5 * std::f64::consts::PI, q.polar_nodes);
    let area = tangential_area(dim);
    q.exec.sum(radial.len(), |k| {
        let (r, wr) = radial[k];
        let mut acc = 0.0;
        for &(theta, wt) in &polar {
            let avg = rule.average(|om| f(&embed(dim, r, theta, om)[..dim]));
            acc += wt * theta.sin().powi(dim as i32 - 2) * avg;
        }
        wr * r.powi(dim as i32 - 1) * acc
    }) * area
}

/// `∫ f dx` over `B⁺(0, radius)`.
pub fn half_ball_integral<F>(dim: usize, radius: f64, rule: &SphereRule, q: &SurfaceQuadrature, f: F) -> Estimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let fine = ball_sum(dim, radius, rule, q, &f);
    let coarse = ball_sum(dim, radius, rule, &q.coarse(), &f);
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

fn disk_sum<F>(dim: usize, radius: f64, rule: &SphereRule, q: &SurfaceQuadrature, f: &F) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = dim - 1;
    let radial: Vec<(f64, f64)> = panels(radius)
        .into_iter()
        .flat_map(|(a, b)| gl_on(a, b, q.radial_nodes))
        .collect();
    let area = tangential_area(dim);
    q.exec.sum(radial.len(), |k| {
        let (r, wr) = radial[k];
        let avg = rule.average(|om| {
            let mut x = [0.0; MAX_DIM];
            for (i, w) in om.iter().enumerate() {
                x[i] = r * w;
            }
            f(&x[..dim])
        });
        wr * r.powi(n as i32 - 1) * avg
    }) * area
}

/// `∫ f dx̄` over the boundary disk `B^n(0, radius)`; `f` receives points
/// of `R^N` with `x_N = 0`.
pub fn disk_integral<F>(dim: usize, radius: f64, rule: &SphereRule, q: &SurfaceQuadrature, f: F) -> Estimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let fine = disk_sum(dim, radius, rule, q, &f);
    let coarse = disk_sum(dim, radius, rule, &q.coarse(), &f);
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

/// `∫ f dS` over the boundary sphere `{|x̄| = ρ, x_N = 0}`.
pub fn ring_integral<F>(dim: usize, rho: f64, rule: &SphereRule, f: F) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let n = dim - 1;
    let avg = rule.average(|om| {
        let mut x = [0.0; MAX_DIM];
        for (i, w) in om.iter().enumerate() {
            x[i] = rho * w;
        }
        f(&x[..dim])
    });
    avg * tangential_area(dim) * rho.powi(n as i32 - 1)
}
