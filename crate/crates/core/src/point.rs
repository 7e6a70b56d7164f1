//! Fixed-size vectors for pointwise field evaluation without allocation.

/// Largest ambient dimension supported by the pointwise evaluators.
pub const MAX_DIM: usize = 8;

pub type Vector = [f64; MAX_DIM];
pub type Matrix = [[f64; MAX_DIM]; MAX_DIM];

pub const ZERO_VECTOR: Vector = [0.0; MAX_DIM];
pub const ZERO_MATRIX: Matrix = [[0.0; MAX_DIM]; MAX_DIM];

/// Copies a slice into a [`Vector`], zero-padding the tail.
pub fn to_vector(x: &[f64]) -> Vector {
    assert!(x.len() <= MAX_DIM, "dimension {} exceeds {MAX_DIM}", x.len());
    let mut v = ZERO_VECTOR;
    v[..x.len()].copy_from_slice(x);
    v
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn trace(m: &Matrix, dim: usize) -> f64 {
    (0..dim).map(|a| m[a][a]).sum()
}

/// Second-order central difference `∂_a f` with step `h`.
pub fn fd_partial<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], a: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    let mut m = x.to_vec();
    p[a] += h;
    m[a] -= h;
    (f(&p) - f(&m)) / (2.0 * h)
}

/// Second-order central difference `∂_ab f` with step `h`.
pub fn fd_second<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], a: usize, b: usize, h: f64) -> f64 {
    if a == b {
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[a] += h;
        m[a] -= h;
        return (f(&p) - 2.0 * f(x) + f(&m)) / (h * h);
    }
    let shifted = |da: f64, db: f64| {
        let mut y = x.to_vec();
        y[a] += da;
        y[b] += db;
        f(&y)
    };
    (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (4.0 * h * h)
}

/// Standard `2N+1`-point Laplacian stencil.
pub fn fd_laplacian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> f64 {
    (0..x.len()).map(|a| fd_second(&f, x, a, a, h)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_are_second_order() {
        let f = |x: &[f64]| (x[0] * 1.3).sin() * (x[1] * 0.7).exp() + x[2].powi(3);
        let x = [0.4, -0.2, 0.9];
        // Δf = -1.69 sin e + 0.49 sin e + 6 z
        let exact = (-1.69 + 0.49) * (0.4f64 * 1.3).sin() * (-0.2f64 * 0.7).exp() + 6.0 * 0.9;
        let e1 = (fd_laplacian(f, &x, 1e-2) - exact).abs();
        let e2 = (fd_laplacian(f, &x, 5e-3) - exact).abs();
        assert!((e1 / e2 - 4.0).abs() < 0.2, "{e1} {e2}");
        let mixed = fd_second(f, &x, 0, 1, 1e-3);
        let exact = 1.3 * 0.7 * (0.4f64 * 1.3).cos() * (-0.2f64 * 0.7).exp();
        assert!((mixed - exact).abs() < 1e-6);
    }
}
