//! The reduced bilinear form
//! `F(V1, V2) = ∫_{B⁺(0, L)} ℒV1 · (x·∇V2 + m V2) dx`, with
//! `ℒV = −(N−2)/(4(N−1)) ε²‖π‖² V − 2ε π_ij x_N ∂_ij V + ε² x_N² M_ij ∂_ij V`
//! and `M = (‖π‖²/n) δ − 3π²`.

use serde::Serialize;

use crate::bubble::Bubble;
use crate::corrections::{Correction, CorrectionParams};
use crate::error::{Error, Result};
use crate::point::dot;
use crate::quadrature::{log_cutoff_fit, FitModel, LogFit, SphereRule};
use crate::scalars::sphere_area;

use super::domain::{half_ball_integral, SurfaceQuadrature};
use super::field::FieldOnHalfSpace;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FFormValue {
    pub rho_over_eps: f64,
    pub value: f64,
    /// `value / (ε² ‖π‖² |S^{N−2}|)`; zero when `π = 0`.
    pub normalized: f64,
    pub error_estimate: f64,
}

/// `F(V1, V2)` over `B⁺(0, rho_over_eps)`.
pub fn f_form<V1, V2>(
    v1: &V1,
    v2: &V2,
    params: &CorrectionParams,
    rho_over_eps: f64,
    q: &SurfaceQuadrature,
) -> Result<FFormValue>
where
    V1: FieldOnHalfSpace + ?Sized,
    V2: FieldOnHalfSpace + ?Sized,
{
    params.validate()?;
    let dim = params.dim;
    if v1.dim() != dim || v2.dim() != dim {
        return Err(Error::InvalidInput(format!(
            "fields of dimension {} and {} paired with parameters of dimension {dim}",
            v1.dim(),
            v2.dim()
        )));
    }
    if !(rho_over_eps > 0.0 && rho_over_eps.is_finite()) {
        return Err(Error::InvalidInput(format!("cutoff must be positive, got {rho_over_eps}")));
    }
    let zero = FFormValue {
        rho_over_eps,
        value: 0.0,
        normalized: 0.0,
        error_estimate: 0.0,
    };
    let pi = &params.pi;
    if pi.is_zero() {
        return Ok(zero);
    }
    let n = dim - 1;
    let rule = SphereRule::for_classes(
        n,
        &[v1.symmetry().angular_degree(), v2.symmetry().angular_degree(), Some(2)],
        q.product_nodes,
    )?;
    let big = dim as f64;
    let m = 0.5 * (big - 2.0);
    let eps = params.eps;
    let pn = pi.norm_sq();
    let pi2 = pi.square();
    let mut pim = vec![0.0; n * n];
    let mut mm = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            pim[i * n + j] = pi.get(i, j);
            mm[i * n + j] = -3.0 * pi2[i * n + j] + if i == j { pn / n as f64 } else { 0.0 };
        }
    }
    let curvature = -(big - 2.0) / (4.0 * (big - 1.0)) * eps * eps * pn;
    let integrand = |x: &[f64]| {
        let h = v1.hessian(x);
        let xn = x[dim - 1];
        let mut first = 0.0;
        let mut second = 0.0;
        for i in 0..n {
            for j in 0..n {
                first += pim[i * n + j] * h[i][j];
                second += mm[i * n + j] * h[i][j];
            }
        }
        let lv = curvature * v1.value(x) - 2.0 * eps * xn * first + eps * eps * xn * xn * second;
        lv * (dot(&v2.gradient(x)[..dim], x) + m * v2.value(x))
    };
    let e = half_ball_integral(dim, rho_over_eps, &rule, q, integrand);
    let unit = eps * eps * pn * sphere_area(dim as u32 - 2).value;
    Ok(FFormValue {
        value: e.value,
        normalized: e.value / unit,
        error_estimate: e.error,
        ..zero
    })
}

/// `F(W, W)` normalized, as a function of the cutoff.
fn fww_normalized(params: &CorrectionParams, cutoff: f64, q: &SurfaceQuadrature) -> Result<f64> {
    let w = Bubble::standard(params.dim)?;
    Ok(f_form(&w, &w, params, cutoff, q)?.normalized)
}

/// Richardson extrapolation of `F(W, W)/(ε²‖π‖²|S^{N−2}|)` along a
/// geometric sequence of `ε` at fixed `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RichardsonReport {
    pub rho: f64,
    pub eps: Vec<f64>,
    pub normalized: Vec<f64>,
    pub extrapolated: f64,
    /// `log_{ratio}` of successive difference ratios.
    pub observed_order: f64,
}

/// First-order Richardson on the last two points of `eps` (constant ratio).
pub fn fww_richardson(params: &CorrectionParams, rho: f64, eps: &[f64], q: &SurfaceQuadrature) -> Result<RichardsonReport> {
    if eps.len() < 3 {
        return Err(Error::InvalidInput("Richardson extrapolation needs three step sizes".into()));
    }
    let ratio = eps[0] / eps[1];
    if eps.windows(2).any(|w| ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-9) || ratio <= 1.0 {
        return Err(Error::InvalidInput("step sizes must decrease by a constant ratio".into()));
    }
    let values = eps
        .iter()
        .map(|&e| {
            let mut p = params.clone();
            p.eps = e;
            fww_normalized(&p, rho / e, q)
        })
        .collect::<Result<Vec<_>>>()?;
    let k = values.len();
    let extrapolated = (ratio * values[k - 1] - values[k - 2]) / (ratio - 1.0);
    let d1 = values[k - 3] - values[k - 2];
    let d2 = values[k - 2] - values[k - 1];
    Ok(RichardsonReport {
        rho,
        eps: eps.to_vec(),
        normalized: values,
        extrapolated,
        observed_order: (d1 / d2).abs().ln() / ratio.ln(),
    })
}

/// Log-coefficient fit of the normalized `F(W, W)` over cutoffs `L`.
pub fn fww_log_fit(params: &CorrectionParams, cutoffs: &[f64], q: &SurfaceQuadrature) -> Result<LogFit> {
    log_cutoff_fit(|l| fww_normalized(params, l, q), cutoffs, FitModel::LogConstInverse)
}

/// Normalized `F(W, Φ) + F(Φ, W)` over `B⁺(0, L)`.
pub fn cross_symmetric_sum(params: &CorrectionParams, cutoff: f64, q: &SurfaceQuadrature) -> Result<f64> {
    let w = Bubble::standard(params.dim)?;
    let phi = Correction::phi(params.clone())?;
    let a = f_form(&w, &phi, params, cutoff, q)?;
    let b = f_form(&phi, &w, params, cutoff, q)?;
    Ok(a.normalized + b.normalized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansions::cross_polynomial;
    use crate::tensors::TraceFreePi;

    fn params(dim: usize, eps: f64, a1: f64, a2: f64) -> CorrectionParams {
        let mut d = vec![0i64; dim - 1];
        d[0] = 1;
        d[1] = -2;
        d[2] = 1;
        CorrectionParams::new(dim, eps, TraceFreePi::diag(&d).unwrap(), a1, a2).unwrap()
    }

    #[test]
    fn zero_pi_gives_zero() {
        let p = CorrectionParams::new(5, 0.1, TraceFreePi::diag(&[0, 0, 0, 0]).unwrap(), 1.0, 1.0).unwrap();
        let w = Bubble::standard(5).unwrap();
        let f = f_form(&w, &w, &p, 10.0, &SurfaceQuadrature::default()).unwrap();
        assert_eq!(f.value, 0.0);
    }

    #[test]
    fn quadratic_pair_rejected() {
        let p = params(5, 0.1, 1.0, 1.0);
        let phi = Correction::phi(p.clone()).unwrap();
        let err = f_form(&phi, &phi, &p, 10.0, &SurfaceQuadrature::default()).unwrap_err();
        assert!(matches!(err, Error::UnsupportedSymmetry(_)));
    }

    #[test]
    fn fww_converges_in_five_dimensions() {
        let q = SurfaceQuadrature::default();
        let r = fww_richardson(&params(5, 0.1, 0.0, 0.0), 1.0, &[1e-1, 1e-2, 1e-3], &q).unwrap();
        assert!((r.extrapolated + 1.0 / 64.0).abs() < 0.02 / 64.0, "{r:?}");
        let r = fww_richardson(&params(5, 0.1, 0.0, 0.0), 1.0, &[1e-2, 1e-3, 1e-4], &q).unwrap();
        assert!((r.observed_order - 1.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn fww_log_coefficient_in_four_dimensions() {
        let q = SurfaceQuadrature::default();
        let fit = fww_log_fit(&params(4, 0.1, 0.0, 0.0), &[1e2, 1e3, 1e4, 1e5, 1e6], &q).unwrap();
        let target = -std::f64::consts::PI / 24.0;
        assert!((fit.c_log - target).abs() < 1e-3 * target.abs(), "{fit:?}");
    }

    #[test]
    fn cross_sum_matches_bulk_polynomial() {
        let q = SurfaceQuadrature::default();
        let poly = cross_polynomial(5).unwrap().bulk;
        for (a1, a2) in [(-63.0 / 4.0, 105.0 / 8.0), (2.0, -1.0)] {
            let v = cross_symmetric_sum(&params(5, 1e-10, a1, a2), 1e9, &q).unwrap();
            let e = poly.eval_f64(a1, a2);
            assert!((v - e).abs() < 1e-6 * e.abs(), "{a1} {a2}: {v} vs {e}");
        }
    }
}
