use crate::error::{Error, Result};

use super::adaptive::{adaptive, Domain1D, QuadOptions};

/// Basis used by [`log_cutoff_fit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FitModel {
    /// `c_log * log R + c0`.
    LogConst,
    /// `c_log * log R + c0 + c1 / R`, absorbing the leading tail correction.
    #[default]
    LogConstInverse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogFit {
    pub c_log: f64,
    pub c0: f64,
    pub c_inv: Option<f64>,
    pub cutoffs: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest absolute residual of the fit.
    pub max_residual: f64,
    /// Set when `max_residual` exceeds `1e-4 * max |I(R)|`.
    pub poor_fit: bool,
}

/// Householder least squares for a tall `rows × cols` system.
fn least_squares(mut a: Vec<Vec<f64>>, mut y: Vec<f64>) -> Vec<f64> {
    let m = a.len();
    let n = a[0].len();
    for k in 0..n {
        let norm: f64 = (k..m).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|x| x * x).sum();
        if vn == 0.0 {
            continue;
        }
        for j in k..n {
            let d: f64 = (k..m).map(|i| v[i - k] * a[i][j]).sum::<f64>() * 2.0 / vn;
            for i in k..m {
                a[i][j] -= d * v[i - k];
            }
        }
        let d: f64 = (k..m).map(|i| v[i - k] * y[i]).sum::<f64>() * 2.0 / vn;
        for i in k..m {
            y[i] -= d * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = ((k + 1)..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (y[k] - s) / a[k][k];
    }
    x
}

/// Fits `I(R) ≈ c_log log R + c0 (+ c1/R)` to cumulative values `I(R_k)`.
pub fn log_cutoff_fit<F>(cumulative: F, cutoffs: &[f64], model: FitModel) -> Result<LogFit>
where
    F: Fn(f64) -> Result<f64>,
{
    let ncol = match model {
        FitModel::LogConst => 2,
        FitModel::LogConstInverse => 3,
    };
    if cutoffs.len() < ncol + 1 {
        return Err(Error::InvalidInput(format!(
            "{} cutoffs cannot determine {ncol} fit parameters with a residual",
            cutoffs.len()
        )));
    }
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) || cutoffs[0] <= 0.0 {
        return Err(Error::InvalidInput("cutoffs must be positive and increasing".into()));
    }
    let values = cutoffs
        .iter()
        .map(|&r| cumulative(r))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<f64>> = cutoffs
        .iter()
        .map(|&r| {
            let mut row = vec![r.ln(), 1.0];
            if ncol == 3 {
                row.push(1.0 / r);
            }
            row
        })
        .collect();
    let coef = least_squares(rows.clone(), values.clone());
    let max_residual = rows
        .iter()
        .zip(&values)
        .map(|(row, v)| (row.iter().zip(&coef).map(|(a, c)| a * c).sum::<f64>() - v).abs())
        .fold(0.0, f64::max);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    Ok(LogFit {
        c_log: coef[0],
        c0: coef[1],
        c_inv: coef.get(2).copied(),
        cutoffs: cutoffs.to_vec(),
        values,
        max_residual,
        poor_fit: max_residual > 1e-4 * scale,
    })
}

/// Log fit of `int_0^R f` for a 1-D integrand; the integral is accumulated
/// panel by panel, in `log x` beyond `x = 1`.
pub fn log_cutoff_fit_integrand<F>(
    f: F,
    cutoffs: &[f64],
    model: FitModel,
    opts: &QuadOptions,
) -> Result<LogFit>
where
    F: Fn(f64) -> f64,
{
    let mut partial = Vec::with_capacity(cutoffs.len());
    let mut acc = 0.0;
    let mut lo = 0.0f64;
    for &r in cutoffs {
        if lo < 1.0 {
            let hi = r.min(1.0);
            acc += adaptive(&f, Domain1D::Finite(lo, hi), opts)?.value;
            lo = hi;
        }
        if r > lo {
            acc += adaptive(
                |u: f64| {
                    let x = u.exp();
                    f(x) * x
                },
                Domain1D::Finite(lo.ln(), r.ln()),
                opts,
            )?
            .value;
            lo = r;
        }
        partial.push(acc);
    }
    log_cutoff_fit(
        |r| {
            let k = cutoffs.iter().position(|&c| c == r).expect("cutoff in list");
            Ok(partial[k])
        },
        cutoffs,
        model,
    )
}

/// Cutoffs `10² … 10⁵` for log-coefficient fits.
pub const DEFAULT_CUTOFFS: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axial_log_fit_matches_antiderivative() {
        let fit = log_cutoff_fit_integrand(
            |x| x / (x + 1.0).powi(2),
            &DEFAULT_CUTOFFS,
            FitModel::default(),
            &QuadOptions::default(),
        )
        .unwrap();
        assert!((fit.c_log - 1.0).abs() < 1e-4, "{fit:?}");
        assert!((fit.c0 + 1.0).abs() < 1e-3);
        let oracle = log_cutoff_fit(
            |r| Ok((r + 1.0).ln() + 1.0 / (r + 1.0) - 1.0),
            &DEFAULT_CUTOFFS,
            FitModel::default(),
        )
        .unwrap();
        assert!((oracle.c_log - fit.c_log).abs() < 1e-9);
    }

    #[test]
    fn convergent_integrand_has_no_log() {
        let fit = log_cutoff_fit_integrand(
            |x| 1.0 / (x + 1.0).powi(3),
            &DEFAULT_CUTOFFS,
            FitModel::default(),
            &QuadOptions::default(),
        )
        .unwrap();
        assert!(fit.c_log.abs() < 1e-5 && !fit.poor_fit, "{fit:?}");
        assert!((fit.c0 - 0.5).abs() < 1e-4);
    }

    #[test]
    fn two_column_model_is_biased_by_tails() {
        let f = |r: f64| Ok((r + 1.0).ln() + 1.0 / (r + 1.0) - 1.0);
        let plain = log_cutoff_fit(f, &DEFAULT_CUTOFFS, FitModel::LogConst).unwrap();
        assert!((plain.c_log - 1.0).abs() > 1e-4);
        assert!((plain.c_log - 1.0).abs() < 1e-2);
    }

    #[test]
    fn poor_fit_is_flagged() {
        let fit = log_cutoff_fit(|r| Ok(r.sqrt()), &DEFAULT_CUTOFFS, FitModel::default()).unwrap();
        assert!(fit.poor_fit);
    }
}
