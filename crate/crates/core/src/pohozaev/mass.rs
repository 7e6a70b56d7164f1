//! Mass flux integral `ℐ(ρ)` and its affine relation to the limit of `P′`.

use num::rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::point::{dot, MAX_DIM, ZERO_MATRIX};
use crate::quadrature::qmc::{halton_shifted, to_sphere};
use crate::quadrature::{SphereRule, SymmetryClass};
use crate::scalars::{rat, rat_int, rat_to_f64, sphere_area};
use crate::tensors::{jet_flux_exact, jet_flux_value, sff_second_flux_factor, MetricJet, NumericJet};

use super::domain::{half_sphere_integral, SurfaceQuadrature};
use super::field::FieldOnHalfSpace;

/// One homogeneous degree of the exact metric-jet flux.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxDegreeReport {
    pub degree: u32,
    pub rho_power: i32,
    /// Coefficient of `ρ^{rho_power} |S^{N−2}|`.
    pub coeff: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassFluxReport {
    pub dim: usize,
    pub rho: f64,
    /// `∫ (|x|^{2−N} ∂_r G − ∂_r|x|^{2−N} G) dS` with `G = |x|^{2−N} + φ`.
    pub g_part: f64,
    pub g_error: f64,
    /// `∫ (ρ^{3−2N} x_a ∂_b A_ab − 2N ρ^{1−2N} x_a x_b A_ab) dS`, exact by degree.
    pub a_part: f64,
    pub a_degrees: Vec<FluxDegreeReport>,
    /// `4(N−1)/(N−2) · g_part − a_part`.
    pub total: f64,
}

/// `ℐ(ρ)` for a metric jet and an optional regular part `φ` of `G`.
pub fn mass_flux(
    jet: &MetricJet,
    phi: Option<&dyn FieldOnHalfSpace>,
    rho: f64,
    q: &SurfaceQuadrature,
) -> Result<MassFluxReport> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {rho}")));
    }
    let dim = jet.dim();
    if let Some(f) = phi {
        if f.dim() != dim {
            return Err(Error::InvalidInput(format!(
                "regular part has dimension {}, jet has dimension {dim}",
                f.dim()
            )));
        }
    }
    let big = dim as f64;
    let (g_part, g_error) = match phi {
        Some(f) => {
            let deg = f.symmetry().angular_degree();
            let rule = SphereRule::for_degree(dim - 1, deg, q.product_nodes);
            // The |x|^{2−N} parts cancel; only φ contributes.
            let e = half_sphere_integral(dim, rho, &rule, q, |x| {
                let dr = dot(&f.gradient(x)[..dim], x) / rho;
                rho.powf(2.0 - big) * dr + (big - 2.0) * rho.powf(1.0 - big) * f.value(x)
            });
            (e.value, e.error)
        }
        None => (0.0, 0.0),
    };
    let parts = jet_flux_exact(jet)?;
    let area = sphere_area(dim as u32 - 2).value;
    let a_degrees: Vec<FluxDegreeReport> = parts
        .iter()
        .map(|p| FluxDegreeReport {
            degree: p.degree,
            rho_power: p.rho_power,
            coeff: p.coeff.to_string(),
            value: p.coeff.to_f64() * rho.powi(p.rho_power) * area,
        })
        .collect();
    let a_part = jet_flux_value(&parts, rho, dim);
    Ok(MassFluxReport {
        dim,
        rho,
        g_part,
        g_error,
        a_part,
        a_degrees,
        total: 4.0 * (big - 1.0) / (big - 2.0) * g_part - a_part,
    })
}

/// Randomized quasi-Monte Carlo estimate with its replicate standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// `∫ |integrand| dS`, the natural scale of the estimate.
    pub l1_scale: f64,
    pub samples: usize,
    pub replicates: usize,
}

/// A-part of `ℐ(ρ)` by shifted-Halton sampling of the upper half-sphere with
/// central differences for `∂_b A_ab`; independent of the exact moment path.
pub fn mass_flux_a_part_mc(
    jet: &MetricJet,
    rho: f64,
    samples: usize,
    replicates: usize,
    seed: u64,
    exec: Exec,
) -> Result<McEstimate> {
    if samples == 0 || replicates < 2 {
        return Err(Error::InvalidInput("need samples > 0 and at least two replicates".into()));
    }
    let dim = jet.dim();
    let n = jet.n;
    let big = dim as f64;
    let coords = 2 * dim.div_ceil(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<Vec<f64>> = (0..replicates)
        .map(|_| (0..coords).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let h = 1e-4 * rho;
    let numeric = NumericJet::new(jet);
    let integrand = |x: &[f64]| {
        let mut a = ZERO_MATRIX;
        let mut ap = ZERO_MATRIX;
        let mut am = ZERO_MATRIX;
        numeric.a_into(x, &mut a);
        let mut div = 0.0;
        let mut y = [0.0; MAX_DIM];
        y[..dim].copy_from_slice(x);
        for b in 0..n {
            y[b] = x[b] + h;
            numeric.a_into(&y[..dim], &mut ap);
            y[b] = x[b] - h;
            numeric.a_into(&y[..dim], &mut am);
            y[b] = x[b];
            for i in 0..n {
                div += x[i] * (ap[i][b] - am[i][b]) / (2.0 * h);
            }
        }
        let mut quad = 0.0;
        for i in 0..n {
            for j in 0..n {
                quad += x[i] * x[j] * a[i][j];
            }
        }
        rho.powf(3.0 - 2.0 * big) * div - 2.0 * big * rho.powf(1.0 - 2.0 * big) * quad
    };
    let half_area = 0.5 * sphere_area(dim as u32 - 1).value * rho.powi(dim as i32 - 1);
    let runs: Vec<(f64, f64)> = exec.map(replicates, |k| {
        let mut sum = 0.0;
        let mut abs = 0.0;
        for i in 0..samples {
            let u = halton_shifted(i as u64, &shifts[k]);
            let w = to_sphere(&u, dim);
            let mut x = [0.0; MAX_DIM];
            for a in 0..dim {
                x[a] = rho * w[a];
            }
            x[dim - 1] = x[dim - 1].abs();
            let v = integrand(&x[..dim]);
            sum += v;
            abs += v.abs();
        }
        (sum / samples as f64 * half_area, abs / samples as f64 * half_area)
    });
    let r = replicates as f64;
    let mean = runs.iter().map(|p| p.0).sum::<f64>() / r;
    let var = runs.iter().map(|p| (p.0 - mean).powi(2)).sum::<f64>() / (r - 1.0);
    Ok(McEstimate {
        mean,
        std_error: (var / r).sqrt(),
        l1_scale: runs.iter().map(|p| p.1).sum::<f64>() / r,
        samples,
        replicates,
    })
}

/// Conformally normalized jet with flat boundary curvature and entries drawn
/// uniformly from `{−2, −7/4, …, 2}`.
pub fn random_conformal_jet(n: usize, seed: u64) -> MetricJet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MetricJet::conformal_from_source(n, || rat(rng.gen_range(-8..=8), 4))
}

/// Exact constants linking `lim P′`, `ℐ` and the mass in dimensions four
/// and five.
#[derive(Clone, Debug, PartialEq)]
pub struct MassRelation {
    pub dim: usize,
    /// `−(N−2)²/(8(N−1))`: `lim P′ = flux_slope · ℐ + flux_offset · |S³| Σ π_ij,ij`.
    pub flux_slope: BigRational,
    pub flux_offset: BigRational,
    /// `m₀ = mass_slope · lim P′ + mass_offset · |S³| Σ π_ij,ij`.
    pub mass_slope: BigRational,
    pub mass_offset: BigRational,
}

impl MassRelation {
    pub fn new(dim: usize) -> Result<Self> {
        if !(4..=5).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let big = dim as i64;
        let flux_slope = rat(-(big - 2) * (big - 2), 8 * (big - 1));
        let flux_offset = if dim == 5 {
            &flux_slope * sff_second_flux_factor(dim)
        } else {
            rat_int(0)
        };
        let mass_slope = rat_int(1) / &flux_slope;
        let mass_offset = -&flux_offset * &mass_slope;
        Ok(Self {
            dim,
            flux_slope,
            flux_offset,
            mass_slope,
            mass_offset,
        })
    }

    /// `m₀` from `lim P′` and `Σ π_ij,ij`.
    pub fn mass(&self, p_prime_limit: f64, pi_second_trace: f64) -> f64 {
        rat_to_f64(&self.mass_slope) * p_prime_limit
            + rat_to_f64(&self.mass_offset) * sphere_area(3).value * pi_second_trace
    }

    /// `lim P′` from `ℐ` and `Σ π_ij,ij`.
    pub fn p_prime(&self, flux: f64, pi_second_trace: f64) -> f64 {
        rat_to_f64(&self.flux_slope) * flux + rat_to_f64(&self.flux_offset) * sphere_area(3).value * pi_second_trace
    }
}

/// `m₀ = −6 lim P′` for `N = 4`; `m₀ = −32/9 lim P′ − |S³|/48 Σ π_ij,ij` for `N = 5`.
pub fn p_prime_mass_relation(dim: usize, pi_second_trace: f64, p_prime_limit: f64) -> Result<f64> {
    Ok(MassRelation::new(dim)?.mass(p_prime_limit, pi_second_trace))
}

/// A radial regular part `φ ≡ c`, so that `G = |x|^{2−N} + c`.
pub fn constant_regular_part(dim: usize, c: f64) -> impl FieldOnHalfSpace {
    super::field::FnField::new(dim, SymmetryClass::Radial, move |_: &[f64]| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pohozaev::field::PowerField;
    use crate::pohozaev::flux::{eval_p_prime, NormalConvention};

    #[test]
    fn zero_jet_zero_phi() {
        let r = mass_flux(&MetricJet::zero(4), None, 1.0, &SurfaceQuadrature::default()).unwrap();
        assert_eq!((r.g_part, r.a_part, r.total), (0.0, 0.0, 0.0));
    }

    #[test]
    fn relation_constants() {
        let four = MassRelation::new(4).unwrap();
        assert_eq!(four.flux_slope, rat(-1, 6));
        assert_eq!(four.mass_slope, rat_int(-6));
        let five = MassRelation::new(5).unwrap();
        assert_eq!(five.flux_slope, rat(-9, 32));
        assert_eq!(five.flux_offset, rat(-3, 512));
        assert_eq!(five.mass_slope, rat(-32, 9));
        assert_eq!(five.mass_offset, rat(-1, 48));
        assert!(MassRelation::new(6).is_err());
        assert_eq!(p_prime_mass_relation(4, 0.0, -1.0).unwrap(), 6.0);
        assert_eq!(p_prime_mass_relation(5, 0.0, 0.0).unwrap(), 0.0);
        // affine with the exact slopes: two-point evaluation
        let a = p_prime_mass_relation(5, 0.7, 1.0).unwrap();
        let b = p_prime_mass_relation(5, 0.7, 3.0).unwrap();
        assert!(((b - a) / 2.0 + 32.0 / 9.0).abs() < 1e-14);
        let c = p_prime_mass_relation(5, 1.7, 1.0).unwrap();
        assert!((c - a + sphere_area(3).value / 48.0).abs() < 1e-14);
        // round trip between the two forms
        let m = five.mass(five.p_prime(0.3, 0.2), 0.2);
        assert!((m - 0.3).abs() < 1e-14);
    }

    #[test]
    fn p_prime_matches_flux_for_power_fields() {
        let q = SurfaceQuadrature::default();
        for dim in 4..=5 {
            let rel = MassRelation::new(dim).unwrap();
            let c = 0.37;
            let pp = eval_p_prime(&PowerField::new(dim, c), 0.8, NormalConvention::Inward, &q).unwrap().p_prime;
            let phi = constant_regular_part(dim, c);
            let flux = mass_flux(&MetricJet::zero(dim - 1), Some(&phi), 0.8, &q).unwrap().total;
            assert!((pp - rel.p_prime(flux, 0.0)).abs() < 1e-12, "{pp} {flux}");
        }
    }

    #[test]
    fn a_part_is_linear_and_homogeneous() {
        // With II = 0 the jet enters A linearly.
        let mut jet = random_conformal_jet(4, 3);
        jet.sff = jet.sff.scaled(&rat_int(0));
        let c = rat(-5, 3);
        let p0 = jet_flux_exact(&jet).unwrap();
        let p1 = jet_flux_exact(&jet.scaled(&c)).unwrap();
        for (a, b) in p0.iter().zip(&p1) {
            assert_eq!(a.coeff.scale(&c), b.coeff);
            assert_eq!(a.rho_power, a.degree as i32 + 2 - 5);
        }
        let q = SurfaceQuadrature::default();
        let r1 = mass_flux(&jet, None, 1.0, &q).unwrap();
        let r2 = mass_flux(&jet, None, 3.0, &q).unwrap();
        for (a, b) in r1.a_degrees.iter().zip(&r2.a_degrees) {
            assert!((b.value - a.value * 3f64.powi(a.rho_power)).abs() < 1e-12 * (1.0 + b.value.abs()));
        }
    }

    #[test]
    fn exact_a_part_matches_monte_carlo() {
        for (seed, n) in [(0u64, 4usize), (1, 4), (2, 3)] {
            let jet = random_conformal_jet(n, seed);
            for rho in [0.5, 2.0] {
                let exact = mass_flux(&jet, None, rho, &SurfaceQuadrature::default()).unwrap().a_part;
                let mc = mass_flux_a_part_mc(&jet, rho, 1 << 16, 8, seed, Exec::default()).unwrap();
                let scale = exact.abs().max(mc.l1_scale);
                assert!((mc.mean - exact).abs() < 1e-3 * scale, "n={n} rho={rho}: {exact} vs {mc:?}");
            }
        }
    }
}
