//! Diagonal scale decomposition `A = diag(d) · S · diag(e)`.
//!
//! `S` keeps the zero pattern and signs of `A`; the product of the nonzero
//! magnitudes in every row and every column of `S` is 1. The factors are
//! found by alternating column-mean and row-mean subtraction on the matrix
//! of log-magnitudes, accumulating the removed means as log scale offsets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceSettings {
    /// Stop once the variance of the log-matrix column sums changes by no
    /// more than this between sweeps.
    pub convergence_tolerance: f64,
    pub max_iterations: usize,
    /// Entries with magnitude at or below this do not participate.
    pub zero_threshold: f64,
}

impl Default for BalanceSettings {
    fn default() -> Self {
        Self {
            convergence_tolerance: 1e-22,
            max_iterations: 1000,
            zero_threshold: 0.0,
        }
    }
}

impl BalanceSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.convergence_tolerance > 0.0) || !self.convergence_tolerance.is_finite() {
            return Err(Error::InvalidInput(format!(
                "convergence tolerance must be positive, got {}",
                self.convergence_tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.zero_threshold >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "zero threshold must be non-negative, got {}",
                self.zero_threshold
            )));
        }
        Ok(())
    }
}

/// Convergence diagnostics of one balancing run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BalanceReport {
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct ScaleDecomposition {
    /// Row scales, all strictly positive.
    pub d: Vec<f64>,
    /// Column scales, all strictly positive.
    pub e: Vec<f64>,
    /// Balanced core.
    pub s: Matrix,
    pub report: BalanceReport,
}

impl ScaleDecomposition {
    pub fn reconstruct(&self) -> Matrix {
        self.s
            .scale_rows(&self.d)
            .and_then(|m| m.scale_cols(&self.e))
            .expect("decomposition factors conform")
    }
}

/// Sample variance (n - 1 denominator), zero for fewer than two values.
fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

pub fn scale_decompose(a: &Matrix, settings: &BalanceSettings) -> Result<ScaleDecomposition> {
    a.ensure_finite("scale decomposition input")?;
    settings.validate()?;

    let (m, n) = a.shape();
    let support: Vec<bool> = a
        .as_slice()
        .iter()
        .map(|x| x.abs() > settings.zero_threshold)
        .collect();
    let mut log = Matrix::from_fn(m, n, |i, j| {
        if support[i * n + j] {
            a[(i, j)].abs().ln()
        } else {
            0.0
        }
    });
    let row_count: Vec<usize> = (0..m)
        .map(|i| (0..n).filter(|&j| support[i * n + j]).count())
        .collect();
    let col_count: Vec<usize> = (0..n)
        .map(|j| (0..m).filter(|&i| support[i * n + j]).count())
        .collect();

    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let mut current = 0.0_f64;
    let mut previous = 1.0_f64;
    let mut iterations = 0;

    while (previous - current).abs() > settings.convergence_tolerance {
        if iterations == settings.max_iterations {
            break;
        }
        iterations += 1;

        for j in 0..n {
            if col_count[j] == 0 {
                continue;
            }
            let mean = (0..m).map(|i| log[(i, j)]).sum::<f64>() / col_count[j] as f64;
            for i in 0..m {
                if support[i * n + j] {
                    log[(i, j)] -= mean;
                }
            }
            v[j] -= mean;
        }

        for i in 0..m {
            if row_count[i] == 0 {
                continue;
            }
            let mean = log.row(i).iter().sum::<f64>() / row_count[i] as f64;
            for j in 0..n {
                if support[i * n + j] {
                    log[(i, j)] -= mean;
                }
            }
            u[i] -= mean;
        }

        previous = current;
        let col_sums: Vec<f64> = (0..n).map(|j| (0..m).map(|i| log[(i, j)]).sum()).collect();
        current = sample_variance(&col_sums);
    }

    let converged = (previous - current).abs() <= settings.convergence_tolerance;
    let s = Matrix::from_fn(m, n, |i, j| {
        if support[i * n + j] {
            a[(i, j)].signum() * log[(i, j)].exp()
        } else {
            0.0
        }
    });

    Ok(ScaleDecomposition {
        d: u.iter().map(|x| (-x).exp()).collect(),
        e: v.iter().map(|x| (-x).exp()).collect(),
        s,
        report: BalanceReport {
            converged,
            iterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decompose(rows: &[&[f64]]) -> ScaleDecomposition {
        scale_decompose(
            &Matrix::from_rows(rows).unwrap(),
            &BalanceSettings::default(),
        )
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn already_balanced() {
        let dec = decompose(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(close(&dec.d, &[1.0, 1.0], 1e-15));
        assert!(close(&dec.e, &[1.0, 1.0], 1e-15));
        assert_eq!(dec.s, Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap());
        assert!(dec.report.converged);
    }

    #[test]
    fn diagonal_input() {
        let dec = decompose(&[&[2.0, 0.0], &[0.0, 8.0]]);
        assert!(dec.s.max_abs_diff(&Matrix::identity(2)) < 1e-15);
        assert!(close(&dec.d, &[1.0, 1.0], 1e-15));
        assert!(close(&dec.e, &[2.0, 8.0], 1e-14));
    }

    #[test]
    fn rank_one_input() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [4.0, 8.0]]).unwrap();
        let dec = scale_decompose(&a, &BalanceSettings::default()).unwrap();
        assert!(
            dec.s
                .max_abs_diff(&Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap())
                < 1e-14
        );
        assert!(close(&dec.d, &[0.5, 2.0], 1e-14));
        assert!(close(&dec.e, &[2.0, 4.0], 1e-14));
        assert!(dec.reconstruct().max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn zero_row_survives() {
        // shape of the planar arm Jacobian: last row identically zero
        let a =
            Matrix::from_rows(&[[-1.1, -0.6, 0.87], [2.0, 1.16, -0.5], [0.0, 0.0, 0.0]]).unwrap();
        let dec = scale_decompose(&a, &BalanceSettings::default()).unwrap();
        assert_eq!(dec.s.row(2), &[0.0, 0.0, 0.0]);
        assert_eq!(dec.d[2], 1.0);
        assert!(dec.reconstruct().max_abs_diff(&a) < 1e-14);
    }

    #[test]
    fn all_zero_matrix() {
        let dec = decompose(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(dec.d, vec![1.0, 1.0]);
        assert_eq!(dec.e, vec![1.0, 1.0, 1.0]);
        assert_eq!(dec.s, Matrix::zeros(2, 3));
    }

    #[test]
    fn signs_preserved() {
        let dec = decompose(&[&[-3.0, 0.5], &[2.0, -7.0]]);
        assert!(dec.s[(0, 0)] < 0.0 && dec.s[(0, 1)] > 0.0);
        assert!(dec.s[(1, 0)] > 0.0 && dec.s[(1, 1)] < 0.0);
    }

    #[test]
    fn zero_threshold_drops_small_entries() {
        let settings = BalanceSettings {
            zero_threshold: 1e-3,
            ..BalanceSettings::default()
        };
        let a = Matrix::from_rows(&[[1.0, 1e-9], [0.0, 4.0]]).unwrap();
        let dec = scale_decompose(&a, &settings).unwrap();
        assert_eq!(dec.s[(0, 1)], 0.0);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let settings = BalanceSettings {
            max_iterations: 1,
            ..BalanceSettings::default()
        };
        let a = Matrix::from_rows(&[[1.0, 2.0, 0.0], [3.0, 0.0, 5.0], [0.0, 7.0, 11.0]]).unwrap();
        let dec = scale_decompose(&a, &settings).unwrap();
        assert_eq!(dec.report.iterations, 1);
        assert!(!dec.report.converged);
        // reconstruction holds at every iterate
        assert!(dec.reconstruct().max_abs_diff(&a) < 1e-13);
    }

    #[test]
    fn invalid_settings_and_input() {
        let a = Matrix::identity(2);
        let bad = BalanceSettings {
            convergence_tolerance: 0.0,
            ..BalanceSettings::default()
        };
        assert!(matches!(
            scale_decompose(&a, &bad),
            Err(Error::InvalidInput(_))
        ));
        let bad = BalanceSettings {
            max_iterations: 0,
            ..BalanceSettings::default()
        };
        assert!(matches!(
            scale_decompose(&a, &bad),
            Err(Error::InvalidInput(_))
        ));
        let mut nan = Matrix::identity(2);
        nan[(1, 1)] = f64::NAN;
        assert!(matches!(
            scale_decompose(&nan, &BalanceSettings::default()),
            Err(Error::NonFinite(_))
        ));
    }
}
