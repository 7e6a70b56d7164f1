//! `L D Lᵀ` factorization of symmetric banded matrices without pivoting.

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix, stored by rows: row `i` holds columns
/// `i − bw ..= i` in slots `0 ..= bw`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricBand {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymmetricBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + j + self.bw - i
    }

    /// Entry `(i, j)` with `j ≤ i`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.slot(i, j)]
    }

    /// Sets entry `(i, j)` with `j ≤ i`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j);
        self.data[s] = v;
    }

    /// Row `i` of the lower band, starting at column `i − bw`.
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.bw + 1;
        &mut self.data[i * w..(i + 1) * w]
    }

    /// `y = A x` using both triangles.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            y[i] += self.get(i, i) * x[i];
            for j in lo..i {
                let a = self.get(i, j);
                y[i] += a * x[j];
                y[j] += a * x[i];
            }
        }
        y
    }
}

/// Factor `A = L D Lᵀ` with unit lower-triangular `L` of the same bandwidth.
#[derive(Clone, Debug)]
pub struct BandedLdlt {
    /// Strict lower part holds `L`, the diagonal slot holds `D`.
    factor: SymmetricBand,
}

impl BandedLdlt {
    pub fn factor(a: SymmetricBand) -> Result<Self> {
        let n = a.n;
        let bw = a.bw;
        let w = bw + 1;
        let mut f = a;
        let mut tmp = vec![0.0; w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let off = bw + lo - i;
            tmp.iter_mut().for_each(|v| *v = 0.0);
            for j in lo..i {
                let mlo = lo.max(j.saturating_sub(bw));
                let row_i = &tmp[mlo + bw - i..j + bw - i];
                let base_j = j * w + bw - j;
                let row_j = &f.data[base_j + mlo..base_j + j];
                let dot: f64 = row_i.iter().zip(row_j).map(|(a, b)| a * b).sum();
                let d = f.data[j * w + bw];
                let s = i * w + j + bw - i;
                let l = (f.data[s] - dot) / d;
                f.data[s] = l;
                tmp[j + bw - i] = l * d;
            }
            let s = i * w + bw;
            let orig = f.data[s];
            let dot: f64 = tmp[off..bw]
                .iter()
                .zip(&f.data[i * w + off..i * w + bw])
                .map(|(a, b)| a * b)
                .sum();
            let d = orig - dot;
            if !d.is_finite() || d.abs() <= 1e-14 * orig.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::Solver(format!("zero pivot at row {i} (d = {d:e})")));
            }
            f.data[s] = d;
        }
        Ok(Self { factor: f })
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let f = &self.factor;
        let (n, bw) = (f.n, f.bw);
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = b[i];
            for j in lo..i {
                s -= f.get(i, j) * b[j];
            }
            b[i] = s;
        }
        for i in 0..n {
            b[i] /= f.get(i, i);
        }
        for i in (0..n).rev() {
            let x = b[i];
            let lo = i.saturating_sub(bw);
            for j in lo..i {
                b[j] -= f.get(i, j) * x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, bw: usize) -> SymmetricBand {
        let mut a = SymmetricBand::zeros(n, bw);
        for i in 0..n {
            for j in i.saturating_sub(bw)..i {
                a.set(i, j, ((i * 7 + j * 3) % 5) as f64 - 2.0);
            }
            // indefinite diagonal, still nonsingular
            a.set(i, i, if i % 3 == 0 { -9.0 } else { 11.0 });
        }
        a
    }

    #[test]
    fn solves_indefinite_banded_systems() {
        for (n, bw) in [(1, 0), (5, 1), (40, 6), (100, 13)] {
            let a = sample(n, bw);
            let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
            let mut b = a.mul(&x);
            BandedLdlt::factor(a).unwrap().solve(&mut b);
            for (u, v) in b.iter().zip(&x) {
                assert!((u - v).abs() < 1e-10, "n={n} bw={bw}");
            }
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let mut a = SymmetricBand::zeros(3, 1);
        a.set(0, 0, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 1.0);
        a.set(2, 2, 1.0);
        assert!(matches!(BandedLdlt::factor(a), Err(Error::Solver(_))));
    }
}
