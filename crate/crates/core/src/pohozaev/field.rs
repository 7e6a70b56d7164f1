//! Scalar fields on the closed half-space with value, gradient and Hessian.

use crate::bubble::Bubble;
use crate::corrections::Correction;
use crate::point::{norm_sq, Matrix, Vector, MAX_DIM, ZERO_MATRIX, ZERO_VECTOR};
use crate::quadrature::SymmetryClass;

/// A field evaluated pointwise on `R^N_+`.
pub trait FieldOnHalfSpace: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vector;

    /// Central differences of the gradient unless overridden.
    fn hessian(&self, x: &[f64]) -> Matrix {
        let dim = self.dim();
        let mut out = ZERO_MATRIX;
        let mut y = [0.0; MAX_DIM];
        y[..dim].copy_from_slice(x);
        for b in 0..dim {
            let h = 1e-5 * (1.0 + x[b].abs());
            y[b] = x[b] + h;
            let gp = self.gradient(&y[..dim]);
            y[b] = x[b] - h;
            let gm = self.gradient(&y[..dim]);
            y[b] = x[b];
            for a in 0..dim {
                out[a][b] = (gp[a] - gm[a]) / (2.0 * h);
            }
        }
        for a in 0..dim {
            for b in 0..a {
                let m = 0.5 * (out[a][b] + out[b][a]);
                out[a][b] = m;
                out[b][a] = m;
            }
        }
        out
    }

    /// Angular dependence in `x̄` at fixed `(|x̄|, x_N)`.
    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::General
    }
}

impl FieldOnHalfSpace for Bubble {
    fn dim(&self) -> usize {
        Bubble::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        Bubble::value(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        Bubble::gradient(self, x)
    }

    fn hessian(&self, x: &[f64]) -> Matrix {
        Bubble::hessian(self, x)
    }

    fn symmetry(&self) -> SymmetryClass {
        if self.params().center().iter().all(|&c| c == 0.0) {
            SymmetryClass::Radial
        } else {
            SymmetryClass::General
        }
    }
}

impl FieldOnHalfSpace for Correction {
    fn dim(&self) -> usize {
        Correction::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        Correction::value(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        Correction::gradient(self, x)
    }

    fn hessian(&self, x: &[f64]) -> Matrix {
        Correction::hessian(self, x)
    }

    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::Quadratic
    }
}

/// `|x|^{2−N} + shift`, the leading part of a Green's function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerField {
    pub dim: usize,
    pub shift: f64,
}

impl PowerField {
    pub fn new(dim: usize, shift: f64) -> Self {
        Self { dim, shift }
    }
}

impl FieldOnHalfSpace for PowerField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        norm_sq(x).powf(1.0 - 0.5 * self.dim as f64) + self.shift
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let big = self.dim as f64;
        let c = (2.0 - big) * norm_sq(x).powf(-0.5 * big);
        let mut g = ZERO_VECTOR;
        for a in 0..self.dim {
            g[a] = c * x[a];
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> Matrix {
        let big = self.dim as f64;
        let r2 = norm_sq(x);
        let c1 = (2.0 - big) * r2.powf(-0.5 * big);
        let c2 = -big * c1 / r2;
        let mut h = ZERO_MATRIX;
        for a in 0..self.dim {
            for b in 0..self.dim {
                h[a][b] = c2 * x[a] * x[b];
            }
            h[a][a] += c1;
        }
        h
    }

    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::Radial
    }
}

/// `amplitude · exp(−|x|²)`, a perturbation that solves nothing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBump {
    pub dim: usize,
    pub amplitude: f64,
}

impl FieldOnHalfSpace for GaussianBump {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * (-norm_sq(x)).exp()
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let v = self.value(x);
        let mut g = ZERO_VECTOR;
        for a in 0..self.dim {
            g[a] = -2.0 * x[a] * v;
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> Matrix {
        let v = self.value(x);
        let mut h = ZERO_MATRIX;
        for a in 0..self.dim {
            for b in 0..self.dim {
                h[a][b] = 4.0 * x[a] * x[b] * v;
            }
            h[a][a] -= 2.0 * v;
        }
        h
    }

    fn symmetry(&self) -> SymmetryClass {
        SymmetryClass::Radial
    }
}

fn combine(a: SymmetryClass, b: SymmetryClass) -> SymmetryClass {
    match (a.angular_degree(), b.angular_degree()) {
        (Some(x), Some(y)) if x.max(y) == 0 => SymmetryClass::Radial,
        (Some(x), Some(y)) if x.max(y) <= 2 => SymmetryClass::Quadratic,
        _ => SymmetryClass::General,
    }
}

/// Pointwise sum of two fields.
pub struct SumField<A, B> {
    pub first: A,
    pub second: B,
}

impl<A: FieldOnHalfSpace, B: FieldOnHalfSpace> SumField<A, B> {
    pub fn new(first: A, second: B) -> Self {
        assert_eq!(first.dim(), second.dim());
        Self { first, second }
    }
}

impl<A: FieldOnHalfSpace, B: FieldOnHalfSpace> FieldOnHalfSpace for SumField<A, B> {
    fn dim(&self) -> usize {
        self.first.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.first.value(x) + self.second.value(x)
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let mut g = self.first.gradient(x);
        let h = self.second.gradient(x);
        for (a, b) in g.iter_mut().zip(h) {
            *a += b;
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> Matrix {
        let mut g = self.first.hessian(x);
        let h = self.second.hessian(x);
        for (ra, rb) in g.iter_mut().zip(h) {
            for (a, b) in ra.iter_mut().zip(rb) {
                *a += b;
            }
        }
        g
    }

    fn symmetry(&self) -> SymmetryClass {
        combine(self.first.symmetry(), self.second.symmetry())
    }
}

/// A field given by a closure, differentiated by central differences.
pub struct FnField<F> {
    dim: usize,
    f: F,
    symmetry: SymmetryClass,
    step: f64,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnField<F> {
    pub fn new(dim: usize, symmetry: SymmetryClass, f: F) -> Self {
        Self {
            dim,
            f,
            symmetry,
            step: 1e-5,
        }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> FieldOnHalfSpace for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vector {
        let mut g = ZERO_VECTOR;
        let mut y = [0.0; MAX_DIM];
        y[..self.dim].copy_from_slice(x);
        for a in 0..self.dim {
            let h = self.step * (1.0 + x[a].abs());
            y[a] = x[a] + h;
            let fp = (self.f)(&y[..self.dim]);
            y[a] = x[a] - h;
            let fm = (self.f)(&y[..self.dim]);
            y[a] = x[a];
            g[a] = (fp - fm) / (2.0 * h);
        }
        g
    }

    fn symmetry(&self) -> SymmetryClass {
        self.symmetry
    }
}

/// Largest `|∇f − D_h f|` over the coordinates, `D_h` the central
/// difference with step `h`.
pub fn gradient_probe_error<F: FieldOnHalfSpace + ?Sized>(field: &F, x: &[f64], h: f64) -> f64 {
    let dim = field.dim();
    let g = field.gradient(x);
    let mut y = [0.0; MAX_DIM];
    y[..dim].copy_from_slice(x);
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        y[a] = x[a] + h;
        let fp = field.value(&y[..dim]);
        y[a] = x[a] - h;
        let fm = field.value(&y[..dim]);
        y[a] = x[a];
        worst = worst.max((g[a] - (fp - fm) / (2.0 * h)).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrections::CorrectionParams;
    use crate::tensors::TraceFreePi;

    #[test]
    fn closed_form_gradients_pass_probe() {
        let x = [0.3, -0.5, 0.2, 0.7, 0.4];
        let w = Bubble::standard(5).unwrap();
        assert!(gradient_probe_error(&w, &x, 1e-3) < 1e-4);
        let pi = TraceFreePi::diag(&[1, -1, 2, -2]).unwrap();
        let c = Correction::phi(CorrectionParams::new(5, 0.1, pi, -2.0, 3.0).unwrap()).unwrap();
        assert!(gradient_probe_error(&c, &x, 1e-3) < 1e-4);
        assert!(gradient_probe_error(&PowerField::new(5, 0.3), &x, 1e-3) < 1e-4);
        let g = GaussianBump { dim: 5, amplitude: 0.1 };
        assert!(gradient_probe_error(&g, &x, 1e-3) < 1e-4);
    }

    #[test]
    fn default_hessian_matches_closed_form() {
        let w = Bubble::standard(4).unwrap();
        let f = FnField::new(4, SymmetryClass::Radial, |x: &[f64]| w.value(x));
        let x = [0.2, 0.1, -0.3, 0.5];
        let a = FieldOnHalfSpace::hessian(&w, &x);
        struct GradOnly<'a>(&'a Bubble);
        impl FieldOnHalfSpace for GradOnly<'_> {
            fn dim(&self) -> usize {
                4
            }
            fn value(&self, x: &[f64]) -> f64 {
                self.0.value(x)
            }
            fn gradient(&self, x: &[f64]) -> Vector {
                self.0.gradient(x)
            }
        }
        let b = GradOnly(&w).hessian(&x);
        for i in 0..4 {
            for j in 0..4 {
                assert!((a[i][j] - b[i][j]).abs() < 1e-8);
            }
            assert!((f.gradient(&x)[i] - w.gradient(&x)[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn sum_symmetry() {
        let w = Bubble::standard(4).unwrap();
        let g = GaussianBump { dim: 4, amplitude: 1.0 };
        assert_eq!(SumField::new(w.clone(), g).symmetry(), SymmetryClass::Radial);
        let pi = TraceFreePi::diag(&[1, -1, 0]).unwrap();
        let c = Correction::phi(CorrectionParams::new(4, 0.1, pi, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(SumField::new(w, c).symmetry(), SymmetryClass::Quadratic);
    }
}
