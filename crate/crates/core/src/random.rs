//! Seeded generators for the randomized verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::Matrix;

/// Deterministic, platform-independent generator.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1]`.
pub fn uniform_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..=1.0))
}

/// Uniform entries with each one zeroed with probability `zero_fraction`.
pub fn sparse_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, zero_fraction: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        if rng.gen_bool(zero_fraction) {
            0.0
        } else {
            rng.gen_range(-1.0..=1.0)
        }
    })
}

/// Orthonormal matrix from Gram-Schmidt on a Gaussian-ish draw, with a
/// second orthogonalization pass for stability.
pub fn orthonormal<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut ok = true;
        for _ in 0..n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            for _ in 0..2 {
                for c in &cols {
                    let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(c).for_each(|(x, y)| *x -= dot * y);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        if ok {
            return Matrix::from_fn(n, n, |i, j| cols[j][i]);
        }
    }
}

/// Strictly positive values with `log10` uniform in `[lo_exp, hi_exp]`.
pub fn log_uniform_scales<R: Rng>(rng: &mut R, n: usize, lo_exp: f64, hi_exp: f64) -> Vec<f64> {
    (0..n)
        .map(|_| 10f64.powf(rng.gen_range(lo_exp..=hi_exp)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inverse::orthonormality_defect;

    #[test]
    fn orthonormal_is_orthonormal() {
        let mut rng = seeded(7);
        for n in 1..8 {
            assert!(orthonormality_defect(&orthonormal(&mut rng, n)) < 1e-12);
        }
    }

    #[test]
    fn seeded_is_reproducible() {
        let a = uniform_matrix(&mut seeded(3), 3, 4);
        let b = uniform_matrix(&mut seeded(3), 3, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn scales_in_range() {
        let s = log_uniform_scales(&mut seeded(1), 100, -3.0, 3.0);
        assert!(s.iter().all(|&x| (1e-3..=1e3).contains(&x)));
    }
}
