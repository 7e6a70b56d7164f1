//! The half-space bubble `W_{λ,ξ}(x) = λ^m / (|x̄−ξ|² + (x_N+λ)²)^m`,
//! `m = (N−2)/2`, its derivatives and the kernel fields of the linearized
//! boundary problem.

use crate::error::{Error, Result};
use crate::point::{trace, Matrix, Vector, MAX_DIM, ZERO_MATRIX, ZERO_VECTOR};

/// Scaling and centre of a bubble.
#[derive(Clone, Debug, PartialEq)]
pub struct BubbleParams {
    dim: usize,
    lambda: f64,
    center: Vector,
}

impl BubbleParams {
    pub fn new(dim: usize, lambda: f64, center: &[f64]) -> Result<Self> {
        if !(3..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("bubble scale must be positive, got {lambda}")));
        }
        if center.len() != dim - 1 {
            return Err(Error::InvalidInput(format!(
                "bubble centre has {} coordinates, expected {}",
                center.len(),
                dim - 1
            )));
        }
        let mut c = ZERO_VECTOR;
        c[..dim - 1].copy_from_slice(center);
        Ok(Self {
            dim,
            lambda,
            center: c,
        })
    }

    /// `λ = 1`, `ξ = 0`.
    pub fn standard(dim: usize) -> Result<Self> {
        Self::new(dim, 1.0, &vec![0.0; dim.saturating_sub(1)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim - 1]
    }
}

/// Closed-form evaluator for `W_{λ,ξ}` and its kernel fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Bubble {
    p: BubbleParams,
    m: f64,
}

impl Bubble {
    pub fn new(p: BubbleParams) -> Self {
        let m = 0.5 * (p.dim as f64 - 2.0);
        Self { p, m }
    }

    pub fn standard(dim: usize) -> Result<Self> {
        Ok(Self::new(BubbleParams::standard(dim)?))
    }

    pub fn params(&self) -> &BubbleParams {
        &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.dim
    }

    /// Shifted point `y = (x̄ − ξ, x_N + λ)` and `s = |y|²`.
    fn shifted(&self, x: &[f64]) -> (Vector, f64) {
        let n = self.p.dim - 1;
        debug_assert_eq!(x.len(), self.p.dim);
        let mut y = ZERO_VECTOR;
        for i in 0..n {
            y[i] = x[i] - self.p.center[i];
        }
        y[n] = x[n] + self.p.lambda;
        let s = y[..=n].iter().map(|v| v * v).sum();
        (y, s)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let (_, s) = self.shifted(x);
        self.p.lambda.powf(self.m) * s.powf(-self.m)
    }

    pub fn gradient(&self, x: &[f64]) -> Vector {
        let (y, s) = self.shifted(x);
        let c = -2.0 * self.m * self.p.lambda.powf(self.m) * s.powf(-self.m - 1.0);
        let mut g = ZERO_VECTOR;
        for a in 0..self.p.dim {
            g[a] = c * y[a];
        }
        g
    }

    pub fn hessian(&self, x: &[f64]) -> Matrix {
        let (y, s) = self.shifted(x);
        let lm = self.p.lambda.powf(self.m);
        let c1 = -2.0 * self.m * lm * s.powf(-self.m - 1.0);
        let c2 = 4.0 * self.m * (self.m + 1.0) * lm * s.powf(-self.m - 2.0);
        let mut h = ZERO_MATRIX;
        for a in 0..self.p.dim {
            for b in 0..self.p.dim {
                h[a][b] = c2 * y[a] * y[b];
            }
            h[a][a] += c1;
        }
        h
    }

    /// Derivative selected by a list of coordinate indices of length ≤ 2.
    pub fn eval_w(&self, x: &[f64], deriv: &[usize]) -> Result<f64> {
        match deriv {
            [] => Ok(self.value(x)),
            [a] => Ok(self.gradient(x)[*a]),
            [a, b] => Ok(self.hessian(x)[*a][*b]),
            _ => Err(Error::InvalidInput("derivatives above order 2 are not provided".into())),
        }
    }

    /// Boundary trace `w(x̄) = W(x̄, 0)`.
    pub fn trace_value(&self, xbar: &[f64]) -> f64 {
        let mut x = [0.0; MAX_DIM];
        x[..xbar.len()].copy_from_slice(xbar);
        self.value(&x[..self.p.dim])
    }

    /// Kernel field `Z⁰ = −∂_λ W` (`index = 0`) or `Zⁱ = ∂_{ξ_i} W`
    /// (`index = i ∈ 1..=n`).
    pub fn z(&self, index: usize, x: &[f64]) -> Result<f64> {
        let n = self.p.dim - 1;
        if index > n {
            return Err(Error::InvalidInput(format!("kernel index {index} exceeds {n}")));
        }
        let (y, s) = self.shifted(x);
        let (l, m) = (self.p.lambda, self.m);
        if index == 0 {
            Ok(-m * l.powf(m - 1.0) * s.powf(-m) + 2.0 * m * l.powf(m) * s.powf(-m - 1.0) * y[n])
        } else {
            Ok(2.0 * m * l.powf(m) * s.powf(-m - 1.0) * y[index - 1])
        }
    }

    /// Gradient of the kernel field `Z^index`.
    pub fn z_gradient(&self, index: usize, x: &[f64]) -> Result<Vector> {
        let n = self.p.dim - 1;
        if index > n {
            return Err(Error::InvalidInput(format!("kernel index {index} exceeds {n}")));
        }
        let mut g = ZERO_VECTOR;
        if index == 0 {
            let (y, s) = self.shifted(x);
            let (l, m) = (self.p.lambda, self.m);
            let a0 = 2.0 * m * m * l.powf(m - 1.0) * s.powf(-m - 1.0);
            let a1 = -4.0 * m * (m + 1.0) * l.powf(m) * s.powf(-m - 2.0) * y[n];
            for a in 0..=n {
                g[a] = (a0 + a1) * y[a];
            }
            g[n] += 2.0 * m * l.powf(m) * s.powf(-m - 1.0);
        } else {
            let h = self.hessian(x);
            for a in 0..=n {
                g[a] = -h[index - 1][a];
            }
        }
        Ok(g)
    }

    /// Closed-form Laplacian (zero up to rounding).
    pub fn laplacian(&self, x: &[f64]) -> f64 {
        trace(&self.hessian(x), self.p.dim)
    }

    /// `(ΔW, −∂_N W − (N−2) W^{N/(N−2)})`, the second evaluated at `(x̄, 0)`.
    pub fn residual(&self, x: &[f64]) -> (f64, f64) {
        let n = self.p.dim - 1;
        let interior = self.laplacian(x);
        let mut xb = [0.0; MAX_DIM];
        xb[..n].copy_from_slice(&x[..n]);
        let xb = &xb[..=n];
        let big = self.p.dim as f64;
        let boundary = -self.gradient(xb)[n] - (big - 2.0) * self.value(xb).powf(big / (big - 2.0));
        (interior, boundary)
    }

    /// `−∂_N Z − N w^{2/(N−2)} Z` at `(x̄, 0)`.
    pub fn kernel_boundary_residual(&self, index: usize, xbar: &[f64]) -> Result<f64> {
        let n = self.p.dim - 1;
        let mut x = [0.0; MAX_DIM];
        x[..n].copy_from_slice(xbar);
        let x = &x[..=n];
        let big = self.p.dim as f64;
        let w = self.value(x);
        Ok(-self.z_gradient(index, x)?[n] - big * w.powf(2.0 / (big - 2.0)) * self.z(index, x)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{fd_laplacian, fd_partial, fd_second};

    #[test]
    fn reference_examples() {
        for dim in 3..=7 {
            let b = Bubble::standard(dim).unwrap();
            assert_eq!(b.value(&vec![0.0; dim]), 1.0);
        }
        let b = Bubble::standard(5).unwrap();
        assert!((b.value(&[0.0, 0.0, 0.0, 0.0, 1.0]) - 0.125).abs() < 1e-16);
        assert!((b.z(0, &[0.0; 5]).unwrap() - 1.5).abs() < 1e-15);
        let (_, bd) = b.residual(&[0.0; 5]);
        assert!(bd.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(BubbleParams::new(5, 0.0, &[0.0; 4]).is_err());
        assert!(BubbleParams::new(5, 1.0, &[0.0; 3]).is_err());
        assert!(BubbleParams::new(2, 1.0, &[0.0]).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = Bubble::new(BubbleParams::new(5, 1.3, &[0.2, -0.4, 0.1, 0.3]).unwrap());
        let x = [0.5, 0.1, -0.7, 0.2, 0.4];
        let f = |y: &[f64]| b.value(y);
        let g = b.gradient(&x);
        let h = b.hessian(&x);
        for a in 0..5 {
            assert!((g[a] - fd_partial(f, &x, a, 1e-5)).abs() < 1e-8);
            for c in 0..5 {
                let e1 = (h[a][c] - fd_second(f, &x, a, c, 1e-2)).abs();
                let e2 = (h[a][c] - fd_second(f, &x, a, c, 5e-3)).abs();
                assert!(e2 < 1e-4 && (e1 < 1e-12 || e1 / e2 > 3.0), "{a}{c} {e1} {e2}");
            }
        }
    }

    #[test]
    fn kernel_fields_match_parameter_differences() {
        let xi = [0.2, -0.4, 0.1, 0.3];
        let x = [0.5, 0.1, -0.7, 0.2, 0.4];
        let at = |l: f64, c: &[f64]| Bubble::new(BubbleParams::new(5, l, c).unwrap()).value(&x);
        let b = Bubble::new(BubbleParams::new(5, 1.3, &xi).unwrap());
        let h = 1e-5;
        let z0 = -(at(1.3 + h, &xi) - at(1.3 - h, &xi)) / (2.0 * h);
        assert!((b.z(0, &x).unwrap() - z0).abs() < 1e-9);
        for i in 0..4 {
            let mut p = xi;
            let mut m = xi;
            p[i] += h;
            m[i] -= h;
            let zi = (at(1.3, &p) - at(1.3, &m)) / (2.0 * h);
            assert!((b.z(i + 1, &x).unwrap() - zi).abs() < 1e-9);
        }
        for k in 0..=4 {
            let g = b.z_gradient(k, &x).unwrap();
            for a in 0..5 {
                let fd = fd_partial(|y| b.z(k, y).unwrap(), &x, a, 1e-5);
                assert!((g[a] - fd).abs() < 1e-8, "Z{k} d{a}");
            }
        }
    }

    #[test]
    fn kernel_vanishes_on_axis() {
        let b = Bubble::new(BubbleParams::new(4, 0.8, &[0.3, -0.2, 0.5]).unwrap());
        for t in [0.0, 0.5, 3.0] {
            for i in 1..=3 {
                assert_eq!(b.z(i, &[0.3, -0.2, 0.5, t]).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn fd_interior_residual_is_second_order() {
        let b = Bubble::standard(5).unwrap();
        let x = [0.3, -0.2, 0.4, 0.1, 0.6];
        let e1 = fd_laplacian(|y| b.value(y), &x, 2e-2).abs();
        let e2 = fd_laplacian(|y| b.value(y), &x, 1e-2).abs();
        assert!((e1 / e2 - 4.0).abs() < 0.3, "{e1} {e2}");
    }
}
