//! Randomized invariants across the library.

use num::rational::BigRational;
use num::Zero;
use proptest::prelude::*;

use yamabe_core::bubble::Bubble;
use yamabe_core::corrections::{Correction, CorrectionParams};
use yamabe_core::expansions::{ExpansionOrder, ExpansionPolynomial, ParamMonomial};
use yamabe_core::linsolve::{solve_reduced, BandedLdlt, SolveConfig, SymmetricBand};
use yamabe_core::pohozaev::{mass_flux, random_conformal_jet, MassRelation, SurfaceQuadrature};
use yamabe_core::quadrature::{
    adaptive, axial_exact, log_cutoff_fit, radial_closed, Domain1D, FitModel, QuadOptions, RadialIntegral,
    SphereRule,
};
use yamabe_core::scalars::{rat, rat_int};
use yamabe_core::tensors::{jet_flux_exact, metric_jet_a, moment, quartic_contraction_f64, TraceFreePi};
use yamabe_core::ExactScalar;

fn trace_free(n: usize, entries: &[f64]) -> TraceFreePi {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (entries[i * n + j] + entries[j * n + i])).collect())
        .collect();
    TraceFreePi::project_f64(rows).unwrap()
}

fn pi_strategy() -> impl Strategy<Value = TraceFreePi> {
    (3usize..=5).prop_flat_map(|n| prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |e| trace_free(n, &e)))
}

fn half_space_point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, dim).prop_map(move |mut x| {
        x[dim - 1] = x[dim - 1].abs();
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quartic_contraction_matches_degree_five_rule(pi in pi_strategy()) {
        let n = pi.dim();
        let rule = SphereRule::design5(n);
        let avg = rule.average(|y| pi.quad_form(y).powi(2));
        let exact = quartic_contraction_f64(&pi);
        prop_assert!((avg - exact).abs() <= 1e-8 * exact.abs().max(1e-12), "{avg} vs {exact}");
    }

    #[test]
    fn sphere_moments_satisfy_unit_constraint(
        dim in 2usize..=6,
        raw in prop::collection::vec(0u32..=2, 6),
    ) {
        let mut alpha: Vec<u32> = raw[..dim].to_vec();
        while alpha.iter().sum::<u32>() > 4 {
            let k = alpha.iter().position(|&a| a > 0).unwrap();
            alpha[k] -= 1;
        }
        let base = moment(&alpha, false, dim).unwrap();
        let mut sum = BigRational::zero();
        for i in 0..dim {
            let mut a = alpha.clone();
            a[i] += 2;
            let m = moment(&a, false, dim).unwrap();
            prop_assert_eq!(m.unit, base.unit);
            sum += m.coeff;
        }
        prop_assert_eq!(sum, base.coeff);
    }

    #[test]
    fn metric_jet_is_symmetric_with_zero_normal_row(
        n in 3usize..=4,
        seed in 0u64..1000,
        x in prop::collection::vec(-1.0f64..1.0, 5),
    ) {
        let jet = random_conformal_jet(n, seed);
        let mut pt = x[..=n].to_vec();
        pt[n] = pt[n].abs();
        let a = metric_jet_a(&jet, &pt);
        for i in 0..=n {
            prop_assert_eq!(a[i][n], 0.0);
            prop_assert_eq!(a[n][i], 0.0);
            for j in 0..=n {
                prop_assert!((a[i][j] - a[j][i]).abs() <= 1e-14 * (1.0 + a[i][j].abs()));
            }
        }
    }

    #[test]
    fn bubble_is_harmonic_with_critical_boundary_law(dim in 4usize..=6, seed in any::<u64>()) {
        let w = Bubble::standard(dim).unwrap();
        let x: Vec<f64> = (0..dim)
            .map(|k| {
                let u = ((seed.rotate_left(k as u32 * 11) % 20_001) as f64) / 1000.0 - 10.0;
                if k + 1 == dim { u.abs() } else { u }
            })
            .collect();
        let (interior, boundary) = w.residual(&x);
        let h = w.hessian(&x);
        let scale: f64 = (0..dim).map(|a| h[a][a].abs()).sum::<f64>().max(f64::MIN_POSITIVE);
        prop_assert!(interior.abs() <= 1e-12 * scale.max(1.0), "{interior}");
        let xb = &x[..dim - 1];
        let on_boundary = [xb, &[0.0]].concat();
        let wb = w.value(&on_boundary);
        let big = dim as f64;
        let cancel = w.gradient(&on_boundary)[dim - 1].abs() + (big - 2.0) * wb.powf(big / (big - 2.0));
        prop_assert!(boundary.abs() <= 1e-12 * cancel, "{boundary} of {cancel}");
        for k in 0..dim {
            let r = w.kernel_boundary_residual(k, xb).unwrap();
            let z = w.z(k, &on_boundary).unwrap().abs();
            prop_assert!(r.abs() <= 1e-10 * (z * dim as f64 + wb).max(1e-300), "Z{k}: {r}");
        }
    }

    #[test]
    fn correction_is_linear_in_eps_and_pi(
        dim in 4usize..=6,
        eps in 0.01f64..2.0,
        c in -3.0f64..3.0,
        a in (-20.0f64..20.0, -20.0f64..20.0),
        x in half_space_point(6),
    ) {
        let n = dim - 1;
        let mut d = vec![0i64; n];
        d[0] = 2;
        d[1] = -1;
        d[2] = -1;
        let pi = TraceFreePi::diag(&d).unwrap();
        let x = &x[..dim];
        let base = Correction::phi(CorrectionParams::new(dim, 1.0, pi.clone(), a.0, a.1).unwrap()).unwrap();
        let scaled = Correction::phi(CorrectionParams::new(dim, eps, pi.scaled(c), a.0, a.1).unwrap()).unwrap();
        let (u, v) = (base.value(x), scaled.value(x));
        prop_assert!((v - eps * c * u).abs() <= 1e-12 * (eps * c * u).abs().max(1e-300));
    }

    #[test]
    fn radial_closed_matches_adaptive(p in 0i64..=9, extra in 2i64..=14) {
        let twice_q = p + 1 + extra;
        prop_assume!(twice_q <= 24);
        let exact = radial_closed(p, twice_q).unwrap().to_f64();
        let num = RadialIntegral { p, twice_q }.numeric(None, &QuadOptions::with_tol(0.0, 1e-13)).unwrap();
        prop_assert!((num - exact).abs() <= 1e-10 * exact.abs(), "{p} {twice_q}: {num} vs {exact}");
    }

    #[test]
    fn beta_recursion(p in 0i64..=9, q2 in 0i64..=12) {
        let twice_q = p + 4 + q2;
        let lhs = radial_closed(p, twice_q).unwrap();
        let rhs = &radial_closed(p, twice_q - 2).unwrap() - &radial_closed(p + 2, twice_q).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn axial_closed_matches_adaptive(a in 0u32..=6, gap in 2i64..=8) {
        let b = a as i64 + gap;
        let exact = yamabe_core::scalars::rat_to_f64(&axial_exact(a, b).unwrap());
        let f = |x: f64| x.powi(a as i32) * (x + 1.0).powi(-(b as i32));
        let num = adaptive(f, Domain1D::SemiInfinite(0.0), &QuadOptions::with_tol(0.0, 1e-13)).unwrap().value;
        prop_assert!((num - exact).abs() <= 1e-10 * exact.abs(), "{a} {b}: {num} vs {exact}");
    }

    #[test]
    fn log_fit_recovers_known_coefficient(c in -5.0f64..5.0, d in -5.0f64..5.0, e in -5.0f64..5.0) {
        let fit = log_cutoff_fit(|r| Ok(c * r.ln() + d + e / r), &[1e2, 1e3, 1e4, 1e5, 1e6], FitModel::LogConstInverse)
            .unwrap();
        prop_assert!((fit.c_log - c).abs() <= 1e-4 * c.abs().max(1e-2), "{} vs {c}", fit.c_log);
    }

    #[test]
    fn maximum_beats_unit_perturbations(
        h in (1i64..50, 1i64..50, -20i64..20),
        g in (-100i64..100, -100i64..100),
        c0 in -10i64..10,
    ) {
        // Negative definite when h11 h22 > h12².
        prop_assume!(4 * h.0 * h.1 > h.2 * h.2);
        use ParamMonomial::*;
        let p = ExpansionPolynomial::from_coeffs(
            5,
            ExpansionOrder::EpsSquared,
            [
                (One, ExactScalar::frac(c0, 7)),
                (A1, ExactScalar::frac(g.0, 3)),
                (A2, ExactScalar::frac(g.1, 5)),
                (A1Sq, ExactScalar::frac(-h.0, 11)),
                (A2Sq, ExactScalar::frac(-h.1, 11)),
                (A1A2, ExactScalar::frac(h.2, 11)),
            ],
        );
        let m = p.maximize().unwrap();
        prop_assert_eq!(p.eval_exact(&m.argmax.0, &m.argmax.1), m.value.clone());
        let e = rat(1, 1000);
        for (d1, d2) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let v = p.eval_exact(&(&m.argmax.0 + &e * rat_int(d1)), &(&m.argmax.1 + &e * rat_int(d2)));
            prop_assert!(v.rat_part() < m.value.rat_part());
        }
    }

    #[test]
    fn mass_relation_is_affine(dim in 4usize..=5, pp in -10.0f64..10.0, tr in -10.0f64..10.0, dp in 0.1f64..5.0) {
        let rel = MassRelation::new(dim).unwrap();
        let slope = (rel.mass(pp + dp, tr) - rel.mass(pp, tr)) / dp;
        let want = yamabe_core::scalars::rat_to_f64(&rel.mass_slope);
        prop_assert!((slope - want).abs() <= 1e-9 * want.abs());
        prop_assert!((rel.mass(rel.p_prime(pp, tr), tr) - pp).abs() <= 1e-12 * (1.0 + pp.abs() + tr.abs()) * 100.0);
    }

    #[test]
    fn banded_ldlt_solves_spd_systems(
        n in 1usize..60,
        bw in 0usize..8,
        seed in any::<u64>(),
    ) {
        let bw = bw.min(n.saturating_sub(1));
        let mut a = SymmetricBand::zeros(n, bw);
        let v = |i: usize, j: usize| (((seed ^ (i as u64 * 31 + j as u64 * 17)).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40) as f64 / (1u64 << 24) as f64) - 0.5;
        for i in 0..n {
            for j in i.saturating_sub(bw)..i {
                a.set(i, j, v(i, j));
            }
            a.set(i, i, 2.0 * bw as f64 + 1.0);
        }
        let x: Vec<f64> = (0..n).map(|i| v(i, i + 1000)).collect();
        let mut b = a.mul(&x);
        BandedLdlt::factor(a).unwrap().solve(&mut b);
        for (u, w) in b.iter().zip(&x) {
            prop_assert!((u - w).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn jet_flux_is_linear_without_second_fundamental_form(n in 3usize..=4, seed in 0u64..100, c in (-9i64..9, 1i64..5)) {
        prop_assume!(c.0 != 0);
        let mut jet = random_conformal_jet(n, seed);
        jet.sff = jet.sff.scaled(&rat_int(0));
        let k = rat(c.0, c.1);
        let p0 = jet_flux_exact(&jet).unwrap();
        let p1 = jet_flux_exact(&jet.scaled(&k)).unwrap();
        for (a, b) in p0.iter().zip(&p1) {
            prop_assert_eq!(a.coeff.scale(&k), b.coeff.clone());
        }
        let q = SurfaceQuadrature::default();
        let r1 = mass_flux(&jet, None, 1.0, &q).unwrap();
        let r2 = mass_flux(&jet, None, 2.5, &q).unwrap();
        for (a, b) in r1.a_degrees.iter().zip(&r2.a_degrees) {
            let want = a.value * 2.5f64.powi(a.rho_power);
            prop_assert!((b.value - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn solver_is_linear_in_eps(dim in 4usize..=6, eps in 1e-3f64..10.0) {
        let cfg = SolveConfig::new(dim, 1.0).unwrap().with_grid(65, 65);
        let one = solve_reduced(&cfg).unwrap();
        let scaled = solve_reduced(&cfg.clone().with_eps(eps)).unwrap();
        let top = one.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (u, v) in one.values.iter().zip(&scaled.values) {
            prop_assert!((v - eps * u).abs() <= 1e-10 * eps * top);
        }
    }
}
