//! Grid-backed profile `u(r, t)` and the full field `Ψ = π_ij x_i x_j u`.

use serde::Serialize;

use crate::point::{Vector, ZERO_VECTOR};
use crate::pohozaev::FieldOnHalfSpace;
use crate::quadrature::SymmetryClass;
use crate::tensors::TraceFreePi;

/// Nodal values of `u` on the tensor grid `r × t`, stored `i * nt + j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReducedField {
    pub dim: usize,
    pub eps: f64,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// `‖b − A u‖∞ / ‖b‖∞` of the discrete system (absolute when `b = 0`).
    pub residual: f64,
}

/// Weights of the 4-point Lagrange interpolant and its derivative.
fn lagrange(nodes: &[f64], x: f64) -> (usize, [f64; 4], [f64; 4]) {
    let k = nodes.partition_point(|&v| v <= x);
    let start = k.saturating_sub(2).min(nodes.len() - 4);
    let p = &nodes[start..start + 4];
    let mut w = [0.0; 4];
    let mut dw = [0.0; 4];
    for a in 0..4 {
        let mut num = 1.0;
        let mut den = 1.0;
        for b in 0..4 {
            if b != a {
                num *= x - p[b];
                den *= p[a] - p[b];
            }
        }
        w[a] = num / den;
        let mut d = 0.0;
        for c in 0..4 {
            if c == a {
                continue;
            }
            let mut prod = 1.0;
            for b in 0..4 {
                if b != a && b != c {
                    prod *= x - p[b];
                }
            }
            d += prod;
        }
        dw[a] = d / den;
    }
    (start, w, dw)
}

impl ReducedField {
    pub fn nr(&self) -> usize {
        self.r.len()
    }

    pub fn nt(&self) -> usize {
        self.t.len()
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.t.len() + j]
    }

    /// `u(r, 0)` at the radial nodes.
    pub fn boundary_profile(&self) -> Vec<f64> {
        (0..self.nr()).map(|i| self.at(i, 0)).collect()
    }

    pub fn contains(&self, r: f64, t: f64) -> bool {
        r >= 0.0 && t >= 0.0 && r <= *self.r.last().unwrap() && t <= *self.t.last().unwrap()
    }

    /// `(u, u_r, u_t)` by tensor-product cubic interpolation; zero outside
    /// the grid.
    pub fn interpolate(&self, r: f64, t: f64) -> (f64, f64, f64) {
        if !self.contains(r, t) {
            return (0.0, 0.0, 0.0);
        }
        let (si, wr, dwr) = lagrange(&self.r, r);
        let (sj, wt, dwt) = lagrange(&self.t, t);
        let mut out = (0.0, 0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                let v = self.at(si + a, sj + b);
                out.0 += wr[a] * wt[b] * v;
                out.1 += dwr[a] * wt[b] * v;
                out.2 += wr[a] * dwt[b] * v;
            }
        }
        out
    }

    /// `Ψ = π_ij x_i x_j u(|x̄|, x_N)` for a given `π`.
    pub fn psi(&self, pi: TraceFreePi) -> PsiField<'_> {
        assert_eq!(pi.dim(), self.dim - 1);
        PsiField { field: self, pi }
    }
}

/// Full-dimensional view of a [`ReducedField`].
pub struct PsiField<'a> {
    field: &'a ReducedField,
    pi: TraceFreePi,
}

impl FieldOnHalfSpace for PsiField<'_> {
    fn dim(&self) -> usize {
        self.field.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = self.field.dim - 1;
        let r = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        self.pi.quad_form(&x[..n]) * self.field.interpolate(r, x[n]).0
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let n = self.field.dim - 1;
        let r = x[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        let (u, ur, ut) = self.field.interpolate(r, x[n]);
        let h = self.pi.quad_form(&x[..n]);
        let px = self.pi.apply(&x[..n]);
        let mut g = ZERO_VECTOR;
        for a in 0..n {
            g[a] = 2.0 * px[a] * u + if r > 0.0 { h * ur * x[a] / r } else { 0.0 };
        }
        g[n] = h * ut;
        g
    }

    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::Quadratic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pohozaev::field::gradient_probe_error;

    fn smooth_field() -> ReducedField {
        let r: Vec<f64> = (0..41).map(|i| 0.1 * i as f64).collect();
        let t: Vec<f64> = (0..41).map(|j| 0.1 * j as f64).collect();
        let mut values = Vec::new();
        for &ri in &r {
            for &tj in &t {
                values.push((-(ri * ri) - tj).exp());
            }
        }
        ReducedField {
            dim: 4,
            eps: 1.0,
            r,
            t,
            values,
            residual: 0.0,
        }
    }

    #[test]
    fn interpolation_reproduces_smooth_profile() {
        let f = smooth_field();
        let (u, ur, ut) = f.interpolate(1.234, 0.567);
        let e = (-(1.234f64 * 1.234) - 0.567).exp();
        assert!((u - e).abs() < 1e-5);
        assert!((ur + 2.0 * 1.234 * e).abs() < 1e-3);
        assert!((ut + e).abs() < 1e-3);
        assert_eq!(f.interpolate(5.0, 0.0), (0.0, 0.0, 0.0));
    }

    #[test]
    fn psi_gradient_is_consistent() {
        let f = smooth_field();
        let pi = TraceFreePi::diag(&[1, -2, 1]).unwrap();
        let psi = f.psi(pi);
        let err = gradient_probe_error(&psi, &[0.3, -0.4, 0.5, 0.6], 1e-3);
        assert!(err < 1e-3, "{err}");
        assert_eq!(psi.value(&[0.0, 0.0, 0.0, 0.7]), 0.0);
    }
}
