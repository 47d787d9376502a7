//! Banded LU with partial pivoting for complex matrices, and an LDLᵀ
//! inertia count for real symmetric band matrices.
//!
//! The LU follows the LAPACK `gbtrf` layout: row swaps are interleaved with
//! the elimination steps and the multipliers are never permuted afterwards,
//! so the factors are applied column by column in the solves.

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// General complex band matrix stored by rows.
///
/// Row `i` keeps columns `i - kl ..= i + kl + ku`; the extra `kl` columns on
/// the right are room for pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![ZERO; n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> usize {
        self.kl
    }

    pub fn upper(&self) -> usize {
        self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            ZERO
        }
    }

    /// Set an entry inside the declared band. Panics outside it.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(self.in_band(i, j), "({i}, {j}) outside the band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![ZERO; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            let mut acc = ZERO;
            for j in lo..=hi {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            *yi = acc;
        }
    }

    /// Conjugate transpose, same storage layout.
    pub fn adjoint(&self) -> BandMatrix {
        let mut out = BandMatrix::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku).min(self.n - 1);
            for j in lo..=hi {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Factor in place. A zero pivot column is reported as singular.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].norm_sqr();
            for r in k + 1..=last_row {
                let v = self.data[self.idx(r, k)].norm_sqr();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular { pivot: k });
            }
            pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let inv = 1.0 / self.data[self.idx(k, k)];
            for r in k + 1..=last_row {
                let ir = self.idx(r, k);
                let l = self.data[ir] * inv;
                self.data[ir] = l;
                if l == ZERO {
                    continue;
                }
                for j in k + 1..=last_col {
                    let src = self.data[self.idx(k, j)];
                    let dst = self.idx(r, j);
                    self.data[dst] -= l * src;
                }
            }
        }
        Ok(BandLu { lu: self, pivots })
    }
}

/// Factors from [`BandMatrix::factor`].
#[derive(Debug, Clone)]
pub struct BandLu {
    lu: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) {
        let a = &self.lu;
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        assert_eq!(x.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk == ZERO {
                continue;
            }
            for r in k + 1..=(k + kl).min(n - 1) {
                x[r] -= a.data[a.idx(r, k)] * xk;
            }
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..=(i + kl + ku).min(n - 1) {
                acc -= a.data[a.idx(i, j)] * x[j];
            }
            x[i] = acc / a.data[a.idx(i, i)];
        }
    }

    /// Solve `Aᴴ x = b` with the factors of `A`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        self.solve_adjoint_in_place(&mut x);
        x
    }

    pub fn solve_adjoint_in_place(&self, x: &mut [Complex64]) {
        let a = &self.lu;
        let (n, kl, ku) = (a.n, a.kl, a.ku);
        assert_eq!(x.len(), n);
        // Uᴴ y = b, forward
        for i in 0..n {
            let mut acc = x[i];
            for j in i.saturating_sub(kl + ku)..i {
                acc -= a.data[a.idx(j, i)].conj() * x[j];
            }
            x[i] = acc / a.data[a.idx(i, i)].conj();
        }
        // then (L_k⁻ᴴ, P_k) from the last step back to the first
        for k in (0..n).rev() {
            let mut acc = x[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                acc -= a.data[a.idx(r, k)].conj() * x[r];
            }
            x[k] = acc;
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
        }
    }
}

/// Number of eigenvalues of the real symmetric band matrix below `shift`,
/// from the signs of the LDLᵀ pivots of `A - shift·I` (Sylvester's law of
/// inertia).
///
/// `rows[i][d]` holds `A[i][i + d]` for `d = 0..=bandwidth`.
pub fn count_eigenvalues_below(rows: &[Vec<f64>], bandwidth: usize, shift: f64) -> usize {
    let n = rows.len();
    // l[i][d] = L[i][i - 1 - d]
    let mut l = vec![vec![0.0; bandwidth]; n];
    let mut d = vec![0.0; n];
    let mut negatives = 0;
    let scale = rows.iter().map(|r| r[0].abs()).fold(shift.abs(), f64::max).max(1e-300);
    for i in 0..n {
        let lo = i.saturating_sub(bandwidth);
        for j in lo..i {
            // A[j][i] with j < i
            let mut v = rows[j][i - j];
            let lo_k = i.saturating_sub(bandwidth).max(j.saturating_sub(bandwidth));
            for k in lo_k..j {
                v -= l[i][i - 1 - k] * l[j][j - 1 - k] * d[k];
            }
            l[i][i - 1 - j] = v / d[j];
        }
        let mut v = rows[i][0] - shift;
        for k in lo..i {
            let lik = l[i][i - 1 - k];
            v -= lik * lik * d[k];
        }
        if v == 0.0 {
            v = -f64::EPSILON * scale;
        }
        if v < 0.0 {
            negatives += 1;
        }
        d[i] = v;
    }
    negatives
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, rng: &mut ChaCha8Rng) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                // weak diagonal so that pivoting actually happens
                a.set(i, j, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            }
        }
        a
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn solve_and_adjoint_solve_against_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, kl, ku) in &[(1usize, 0usize, 0usize), (5, 1, 1), (40, 2, 2), (300, 2, 2), (60, 3, 1)] {
            let a = random_band(n, kl, ku, &mut rng);
            let b = random_vec(n, &mut rng);
            let lu = a.clone().factor().unwrap();
            let x = lu.solve(&b);
            let r = a.matvec(&x);
            let scale = x.iter().map(|v| v.norm()).fold(1.0, f64::max);
            assert!(max_diff(&r, &b) < 1e-10 * scale, "n={n}");
            let y = lu.solve_adjoint(&b);
            let ry = a.adjoint().matvec(&y);
            let scale = y.iter().map(|v| v.norm()).fold(1.0, f64::max);
            assert!(max_diff(&ry, &b) < 1e-10 * scale, "adjoint n={n}");
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // [[0, 1], [1, 0]]
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.set(0, 1, Complex64::new(1.0, 0.0));
        a.set(1, 0, Complex64::new(1.0, 0.0));
        let x = a.factor().unwrap().solve(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)]);
        assert_eq!(x, vec![Complex64::new(3.0, 0.0), Complex64::new(2.0, 0.0)]);
    }

    #[test]
    fn singular_is_reported() {
        let a = BandMatrix::zeros(4, 1, 1);
        assert!(matches!(a.factor(), Err(Error::Singular { pivot: 0 })));
    }

    #[test]
    fn inertia_matches_dense_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 50;
        let bw = 2;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..=bw)
                    .map(|d| if i + d < n { rng.random_range(-2.0..2.0) } else { 0.0 })
                    .collect()
            })
            .collect();
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            if b - a <= bw { rows[a][b - a] } else { 0.0 }
        });
        let mut eig: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for &shift in &[-10.0, -1.3, 0.0, 0.7, 2.2, 10.0] {
            let expected = eig.iter().filter(|&&e| e < shift).count();
            assert_eq!(count_eigenvalues_below(&rows, bw, shift), expected, "shift {shift}");
        }
    }
}
