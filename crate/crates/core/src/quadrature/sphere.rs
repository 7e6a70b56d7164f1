use crate::error::{Error, Result};

use super::adaptive::gauss_legendre;

/// Angular dependence of a field on `S^{n-1}` at fixed `(|x̄|, x_N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryClass {
    /// Depends on `x̄` through `|x̄|` only.
    Radial,
    /// `π_ij x_i x_j · u(|x̄|, x_N)` for a trace-free symmetric `π`.
    Quadratic,
    /// No declared structure.
    General,
}

impl SymmetryClass {
    /// Polynomial degree in the angular variable, if finite.
    pub fn angular_degree(self) -> Option<u32> {
        match self {
            SymmetryClass::Radial => Some(0),
            SymmetryClass::Quadratic => Some(2),
            SymmetryClass::General => None,
        }
    }
}

/// Weighted points on `S^{n-1}` whose weights sum to one, so `average`
/// returns the mean over the sphere.
#[derive(Clone, Debug)]
pub struct SphereRule {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly (`None`: approximate rule).
    pub exact_degree: Option<u32>,
}

impl SphereRule {
    /// A single point; exact for functions constant on the sphere.
    pub fn single(n: usize) -> Self {
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        Self {
            n,
            points: vec![p],
            weights: vec![1.0],
            exact_degree: Some(0),
        }
    }

    /// Degree-5 rule on the points `±e_i` and `(±e_i ± e_j)/√2`.
    pub fn design5(n: usize) -> Self {
        assert!(n >= 2);
        let nf = n as f64;
        let wa = (4.0 - nf) / (2.0 * nf * (nf + 2.0));
        let wb = 1.0 / (nf * (nf + 2.0));
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if wa != 0.0 {
            for i in 0..n {
                for s in [1.0, -1.0] {
                    let mut p = vec![0.0; n];
                    p[i] = s;
                    points.push(p);
                    weights.push(wa);
                }
            }
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n {
            for j in (i + 1)..n {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut p = vec![0.0; n];
                    p[i] = si * h;
                    p[j] = sj * h;
                    points.push(p);
                    weights.push(wb);
                }
            }
        }
        Self {
            n,
            points,
            weights,
            exact_degree: Some(5),
        }
    }

    /// Hyperspherical product rule: Gauss–Legendre in each polar angle and
    /// the trapezoid rule in the azimuth, `m` polar nodes per angle.
    pub fn product(n: usize, m: usize) -> Self {
        assert!(n >= 2 && m >= 1);
        let (gx, gw) = gauss_legendre(m);
        let polar: Vec<(f64, f64)> = gx
            .iter()
            .zip(&gw)
            .map(|(x, w)| (0.5 * std::f64::consts::PI * (x + 1.0), *w))
            .collect();
        let naz = 2 * m;
        let mut points = vec![Vec::<f64>::new()];
        let mut weights = vec![1.0];
        // Angles phi_1 .. phi_{n-2} in [0, pi] with density sin^{n-1-k}.
        let mut prefix_sin = vec![1.0];
        for k in 1..=(n - 2) {
            let mut np = Vec::new();
            let mut nw = Vec::new();
            let mut ns = Vec::new();
            for ((p, w), s) in points.iter().zip(&weights).zip(&prefix_sin) {
                for &(phi, wphi) in &polar {
                    let mut q = p.clone();
                    q.push(s * phi.cos());
                    np.push(q);
                    nw.push(w * wphi * phi.sin().powi((n - 1 - k) as i32));
                    ns.push(s * phi.sin());
                }
            }
            points = np;
            weights = nw;
            prefix_sin = ns;
        }
        let mut np = Vec::new();
        let mut nw = Vec::new();
        for ((p, w), s) in points.iter().zip(&weights).zip(&prefix_sin) {
            for a in 0..naz {
                let phi = 2.0 * std::f64::consts::PI * a as f64 / naz as f64;
                let mut q = p.clone();
                q.push(s * phi.cos());
                q.push(s * phi.sin());
                np.push(q);
                nw.push(*w);
            }
        }
        let total: f64 = nw.iter().sum();
        Self {
            n,
            points: np,
            weights: nw.iter().map(|w| w / total).collect(),
            exact_degree: None,
        }
    }

    /// Rule for an integrand of the given angular degree (`None`: general).
    pub fn for_degree(n: usize, degree: Option<u32>, product_nodes: usize) -> Self {
        match degree {
            Some(0) => Self::single(n),
            Some(d) if d <= 5 => Self::design5(n),
            _ => Self::product(n, product_nodes),
        }
    }

    /// Rule for a product of declared symmetry classes, rejecting degree
    /// budgets the degree-5 rule cannot honour.
    pub fn for_classes(n: usize, degrees: &[Option<u32>], product_nodes: usize) -> Result<Self> {
        let mut total = 0;
        for d in degrees {
            match d {
                None => return Ok(Self::product(n, product_nodes)),
                Some(d) => total += d,
            }
        }
        if total > 5 {
            return Err(Error::UnsupportedSymmetry(format!(
                "angular degree {total} exceeds the exact degree-5 sphere rule"
            )));
        }
        Ok(Self::for_degree(n, Some(total), product_nodes))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn average<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moment_avg(n: usize, alpha: &[u32]) -> f64 {
        // Mean of x^alpha over S^{n-1}: prod (a_i-1)!! / (n (n+2) ... (n+|a|-2)).
        if alpha.iter().any(|a| a % 2 == 1) {
            return 0.0;
        }
        let dfact = |k: u32| -> f64 { (1..=k).rev().step_by(2).map(|x| x as f64).product() };
        let num: f64 = alpha.iter().map(|&a| if a == 0 { 1.0 } else { dfact(a - 1) }).product();
        let deg: u32 = alpha.iter().sum();
        let den: f64 = (0..deg / 2).map(|j| (n as u32 + 2 * j) as f64).product();
        num / den
    }

    fn all_alphas(n: usize, deg: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return if deg == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for a in 0..=deg {
            for mut rest in all_alphas(n - 1, deg - a) {
                rest.insert(0, a);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn design5_is_exact_through_degree_five() {
        for n in 2..=6 {
            let rule = SphereRule::design5(n);
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            for deg in 0..=5 {
                for alpha in all_alphas(n, deg) {
                    let got = rule.average(|p| {
                        p.iter().zip(&alpha).map(|(x, &a)| x.powi(a as i32)).product()
                    });
                    assert!((got - moment_avg(n, &alpha)).abs() < 1e-14, "n={n} {alpha:?}");
                }
            }
        }
    }

    #[test]
    fn design5_misses_degree_six() {
        let rule = SphereRule::design5(4);
        let got = rule.average(|p| p[0].powi(6));
        assert!((got - moment_avg(4, &[6, 0, 0, 0])).abs() > 1e-4);
    }

    #[test]
    fn product_rule_converges() {
        for n in 3..=5 {
            let rule = SphereRule::product(n, if n == 5 { 20 } else { 24 });
            let degs: &[u32] = if n == 5 { &[0, 2, 4] } else { &[0, 2, 4, 6, 8] };
            for &deg in degs {
                for alpha in all_alphas(n, deg) {
                    let got = rule.average(|p| {
                        p.iter().zip(&alpha).map(|(x, &a)| x.powi(a as i32)).product()
                    });
                    assert!((got - moment_avg(n, &alpha)).abs() < 1e-12, "n={n} {alpha:?} {got} {}", moment_avg(n, &alpha));
                }
            }
            assert!(rule.points.iter().all(|p| (p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn class_budget() {
        assert!(SphereRule::for_classes(4, &[Some(2), Some(2), Some(2)], 8).is_err());
        assert_eq!(SphereRule::for_classes(4, &[Some(0), Some(0)], 8).unwrap().len(), 1);
        assert_eq!(SphereRule::for_classes(4, &[Some(2), Some(2)], 8).unwrap().exact_degree, Some(5));
    }
}
