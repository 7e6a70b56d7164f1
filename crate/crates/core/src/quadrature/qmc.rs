//! Low-discrepancy points for randomized quasi-Monte Carlo oracles.

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `i` in the given base.
pub fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton point `i` in `[0,1)^dim` with a Cranley–Patterson shift.
pub fn halton_shifted(i: u64, shift: &[f64]) -> Vec<f64> {
    assert!(shift.len() <= PRIMES.len());
    shift
        .iter()
        .zip(PRIMES)
        .map(|(s, p)| (radical_inverse(i + 1, p) + s).fract())
        .collect()
}

/// Maps a point of `[0,1)^{2⌈d/2⌉}` to `S^{d-1}` via Box–Muller and
/// normalization.
pub fn to_sphere(u: &[f64], d: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(d + 1);
    for pair in u.chunks(2) {
        let r = (-2.0 * (1.0 - pair[0]).ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * pair[1];
        g.push(r * th.cos());
        g.push(r * th.sin());
    }
    g.truncate(d);
    let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    g.iter().map(|v| v / n).collect()
}

/// Unshifted Halton points scaled into the box `[-half, half]^dim`.
pub fn halton_box(count: usize, dim: usize, half: f64) -> Vec<Vec<f64>> {
    let zero = vec![0.0; dim];
    (0..count as u64)
        .map(|i| {
            halton_shifted(i, &zero)
                .into_iter()
                .map(|u| (2.0 * u - 1.0) * half)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(radical_inverse(4, 2), 0.125);
    }

    #[test]
    fn sphere_points_have_unit_norm_and_zero_mean() {
        let shift = [0.1, 0.7, 0.3, 0.9];
        let n = 20000;
        let mut mean = [0.0; 3];
        let mut second = 0.0;
        for i in 0..n {
            let p = to_sphere(&halton_shifted(i, &shift), 3);
            assert!((p.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
            for k in 0..3 {
                mean[k] += p[k] / n as f64;
            }
            second += p[0] * p[0] / n as f64;
        }
        assert!(mean.iter().all(|m| m.abs() < 2e-3), "{mean:?}");
        assert!((second - 1.0 / 3.0).abs() < 2e-3);
    }
}
