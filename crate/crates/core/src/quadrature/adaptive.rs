use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::exec::Exec;

// Gauss–Kronrod 10/21 abscissae on [-1, 1] (non-negative half, descending).
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208932054775,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain1D {
    Finite(f64, f64),
    /// `[a, inf)`, mapped by `x = a + tan(theta)`.
    SemiInfinite(f64),
}

/// The 21 abscissae of the Kronrod rule on `[a, b]`, center last.
fn gk_nodes(a: f64, b: f64) -> [f64; 21] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut x = [0.0; 21];
    for j in 0..10 {
        x[2 * j] = c - h * XGK[j];
        x[2 * j + 1] = c + h * XGK[j];
    }
    x[20] = c;
    x
}

/// Combines function values at [`gk_nodes`] into `(kronrod, error, |f| integral)`.
fn gk_combine(a: f64, b: f64, fv: &[f64; 21]) -> (f64, f64, f64) {
    let h = 0.5 * (b - a);
    let fc = fv[20];
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = (fc * WGK[10]).abs();
    for j in 0..10 {
        let s = fv[2 * j] + fv[2 * j + 1];
        res_k += WGK[j] * s;
        res_abs += WGK[j] * (fv[2 * j].abs() + fv[2 * j + 1].abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * s;
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let result = res_k * h;
    let res_abs = res_abs * h.abs();
    let res_asc = res_asc * h.abs();
    let mut err = ((res_k - res_g) * h).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (result, err, res_abs)
}

/// One Gauss–Kronrod 21-point panel: `(value, error estimate)`.
pub fn gk21<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    let x = gk_nodes(a, b);
    let mut fv = [0.0; 21];
    for i in 0..21 {
        fv[i] = f(x[i]);
    }
    let (v, e, _) = gk_combine(a, b, &fv);
    (v, e)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Globally adaptive bisection over `[a, b]` with a batch evaluator that maps
/// 21 abscissae to 21 values.
fn adaptive_core<E>(eval: E, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    E: Fn(&[f64; 21]) -> Result<[f64; 21]>,
{
    let panel = |lo: f64, hi: f64| -> Result<Panel> {
        let fv = eval(&gk_nodes(lo, hi))?;
        let (value, error, _) = gk_combine(lo, hi, &fv);
        if !value.is_finite() {
            return Err(Error::InvalidInput(format!(
                "integrand not finite on [{lo:e}, {hi:e}]"
            )));
        }
        Ok(Panel {
            a: lo,
            b: hi,
            value,
            error,
        })
    };
    let mut heap = BinaryHeap::new();
    let first = panel(a, b)?;
    let mut total = first.value;
    let mut total_err = first.error;
    heap.push(first);
    let mut evaluations = 21;
    let mut subdivisions = 0;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::NoConvergence {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval collapsed to machine resolution; accept what we have.
            heap.push(worst);
            break;
        }
        let left = panel(worst.a, mid)?;
        let right = panel(mid, worst.b)?;
        evaluations += 42;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if subdivisions % 64 == 0 {
            // Re-sum to shed accumulated cancellation in the running totals.
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
        subdivisions,
    })
}

fn map_domain(dom: Domain1D) -> (f64, f64, Option<f64>) {
    match dom {
        Domain1D::Finite(a, b) => (a, b, None),
        Domain1D::SemiInfinite(a) => (0.0, FRAC_PI_2, Some(a)),
    }
}

#[inline]
fn pullback<F: Fn(f64) -> f64>(f: &F, shift: Option<f64>, x: f64) -> f64 {
    match shift {
        None => f(x),
        Some(a) => {
            let c = x.cos();
            let y = f(a + x.tan()) / (c * c);
            if y.is_finite() {
                y
            } else {
                0.0
            }
        }
    }
}

/// Adaptive Gauss–Kronrod quadrature of `f` over a 1-D domain.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, dom: Domain1D, opts: &QuadOptions) -> Result<QuadResult> {
    let (a, b, shift) = map_domain(dom);
    adaptive_core(
        |xs| {
            let mut out = [0.0; 21];
            for i in 0..21 {
                out[i] = pullback(&f, shift, xs[i]);
            }
            Ok(out)
        },
        a,
        b,
        opts,
    )
}

/// Nested adaptive quadrature of `f(x, y)` over `dx × dy` (x inner).
///
/// The 21 inner integrals of each outer panel are evaluated under `exec`.
pub fn adaptive_2d<F>(
    f: F,
    dx: Domain1D,
    dy: Domain1D,
    opts: &QuadOptions,
    exec: Exec,
) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> f64 + Sync + Send,
{
    let (ya, yb, yshift) = map_domain(dy);
    let inner_opts = QuadOptions {
        abs_tol: opts.abs_tol * 0.1,
        rel_tol: opts.rel_tol * 0.1,
        max_subdivisions: opts.max_subdivisions,
    };
    let inner = |y: f64| -> Result<f64> {
        let g = |x: f64| f(x, y);
        Ok(adaptive(g, dx, &inner_opts)?.value)
    };
    adaptive_core(
        |ys| {
            let vals = exec.map(21, |i| -> Result<f64> {
                match yshift {
                    None => inner(ys[i]),
                    Some(a) => {
                        let c = ys[i].cos();
                        let y = a + ys[i].tan();
                        let v = inner(y)? / (c * c);
                        Ok(if v.is_finite() { v } else { 0.0 })
                    }
                }
            });
            let mut out = [0.0; 21];
            for (o, v) in out.iter_mut().zip(vals) {
                *o = v?;
            }
            Ok(out)
        },
        ya,
        yb,
        opts,
    )
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { z } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (z * pm - pm1) / (z * z - 1.0);
            let dz = pm / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}


#[cfg(test)]
mod gl_tests {
    use super::gauss_legendre;

    #[test]
    fn gauss_legendre_exact_to_degree_2m_minus_1() {
        for m in [1usize, 2, 5, 10, 16, 24] {
            let (x, w) = gauss_legendre(m);
            for d in 0..(2 * m) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-14, "m={m} d={d} {got} {exact}");
            }
        }
    }
}
