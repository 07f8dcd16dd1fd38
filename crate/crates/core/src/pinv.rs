//! Singular value decomposition and the Moore-Penrose inverse.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Thin SVD `A = U · diag(σ) · Vᵀ` with `σ` sorted non-increasing.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// `m × k` with orthonormal columns, `k = min(m, n)`.
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    /// `n × k` with orthonormal columns.
    pub v: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let us = self
            .u
            .scale_cols(&self.singular_values)
            .expect("u has one column per singular value");
        &us * &self.v.transpose()
    }
}

/// Rank cutoff used when discarding small singular values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RankTolerance {
    /// `max(m, n) · σ_max · ε`.
    #[default]
    Auto,
    /// Singular values at or below this absolute threshold are treated as zero.
    Absolute(f64),
}

impl RankTolerance {
    fn threshold(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            RankTolerance::Auto => rows.max(cols) as f64 * sigma_max * f64::EPSILON,
            RankTolerance::Absolute(t) => t,
        }
    }
}

pub fn svd(a: &Matrix) -> Result<SvdResult> {
    a.ensure_finite("svd input")?;
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return Ok(SvdResult {
            u: Matrix::zeros(m, 0),
            singular_values: Vec::new(),
            v: Matrix::zeros(n, 0),
        });
    }

    let raw = a
        .to_faer()
        .thin_svd()
        .map_err(|_| Error::NoConvergence("SVD"))?;
    let (left, right) = (raw.U(), raw.V());
    let sigma = raw.S().column_vector();

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    Ok(SvdResult {
        u: Matrix::from_fn(m, k, |i, c| left[(i, order[c])]),
        singular_values: order.iter().map(|&c| sigma[c].max(0.0)).collect(),
        v: Matrix::from_fn(n, k, |i, c| right[(i, order[c])]),
    })
}

/// Moore-Penrose pseudoinverse of an `m × n` matrix (result is `n × m`).
pub fn pinv(a: &Matrix, tolerance: RankTolerance) -> Result<Matrix> {
    let (m, n) = a.shape();
    let dec = svd(a)?;
    let sigma_max = dec.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = tolerance.threshold(m, n, sigma_max);

    let mut out = Matrix::zeros(n, m);
    for (c, &s) in dec.singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        for i in 0..n {
            let vi = dec.v[(i, c)] * inv;
            if vi == 0.0 {
                continue;
            }
            for j in 0..m {
                out[(i, j)] += vi * dec.u[(j, c)];
            }
        }
    }
    Ok(out)
}

/// Residuals of the four Penrose conditions for a candidate inverse `p` of
/// `a`, each measured in Frobenius norm relative to `max(1, ‖reference‖)`.
#[derive(Debug, Clone, Copy)]
pub struct PenroseResiduals {
    /// `A·P·A = A`
    pub apa: f64,
    /// `P·A·P = P`
    pub pap: f64,
    /// `(A·P)ᵀ = A·P`
    pub ap_symmetric: f64,
    /// `(P·A)ᵀ = P·A`
    pub pa_symmetric: f64,
}

impl PenroseResiduals {
    pub fn of(a: &Matrix, p: &Matrix) -> Result<Self> {
        let ap = a.matmul(p)?;
        let pa = p.matmul(a)?;
        let rel = |x: &Matrix, reference: &Matrix| {
            x.frobenius_diff(reference) / reference.frobenius_norm().max(1.0)
        };
        Ok(Self {
            apa: rel(&ap.matmul(a)?, a),
            pap: rel(&pa.matmul(p)?, p),
            ap_symmetric: rel(&ap.transpose(), &ap),
            pa_symmetric: rel(&pa.transpose(), &pa),
        })
    }

    /// Residual of the two generalized-inverse conditions only.
    pub fn generalized(&self) -> f64 {
        self.apa.max(self.pap)
    }

    pub fn max(&self) -> f64 {
        self.generalized()
            .max(self.ap_symmetric)
            .max(self.pa_symmetric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero() {
        let i3 = Matrix::identity(3);
        assert!(pinv(&i3, RankTolerance::Auto).unwrap().max_abs_diff(&i3) < 1e-15);

        let z = pinv(&Matrix::zeros(2, 3), RankTolerance::Auto).unwrap();
        assert_eq!(z, Matrix::zeros(3, 2));
    }

    #[test]
    fn rank_one_all_ones() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let p = pinv(&a, RankTolerance::Auto).unwrap();
        let expected = Matrix::from_rows(&[[0.25, 0.25], [0.25, 0.25]]).unwrap();
        assert!(p.max_abs_diff(&expected) < 1e-14);
        assert!(PenroseResiduals::of(&a, &p).unwrap().max() < 1e-14);
    }

    #[test]
    fn rectangular_shapes() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let p = pinv(&a, RankTolerance::Auto).unwrap();
        assert_eq!(p.shape(), (3, 2));
        assert!(PenroseResiduals::of(&a, &p).unwrap().max() < 1e-12);
        let pt = pinv(&a.transpose(), RankTolerance::Auto).unwrap();
        assert!(pt.max_abs_diff(&p.transpose()) < 1e-12);
    }

    #[test]
    fn svd_sorted_and_reconstructs() {
        let a = Matrix::from_rows(&[[0.1, 3.0], [2.0, -1.0], [0.0, 0.5]]).unwrap();
        let dec = svd(&a).unwrap();
        assert!(dec.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(dec.reconstruct().frobenius_diff(&a) < 1e-13);
        let utu = &dec.u.transpose() * &dec.u;
        assert!(utu.max_abs_diff(&Matrix::identity(2)) < 1e-13);
    }

    #[test]
    fn wide_rank_deficient_reconstructs() {
        // rank 2, 3x8, with repeated columns up to sign
        let s = Matrix::from_rows(&[
            [-0.8343582631115621, 1.1985259141207665],
            [-2.553208860867479, -0.39166400184755734],
            [0.4694194558425413, -2.1302909105144394],
        ])
        .unwrap();
        let a = crate::matrix::kron(&s, &Matrix::from_rows(&[[-1.0, 1.0, -1.0, -1.0]]).unwrap())
            .unwrap();
        let dec = svd(&a).unwrap();
        assert!(dec.reconstruct().max_abs_diff(&a) < 1e-13);
        let p = pinv(&a, RankTolerance::Auto).unwrap();
        assert!(PenroseResiduals::of(&a, &p).unwrap().max() < 1e-13);
    }

    #[test]
    fn absolute_tolerance_truncates() {
        let a = crate::matrix::diag_from(&[1.0, 1e-6]);
        let p = pinv(&a, RankTolerance::Absolute(1e-3)).unwrap();
        assert_eq!(p, crate::matrix::diag_from(&[1.0, 0.0]));
        let p = pinv(&a, RankTolerance::Auto).unwrap();
        assert!((p[(1, 1)] - 1e6).abs() < 1e-6);
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = Matrix::identity(2);
        a[(0, 1)] = f64::INFINITY;
        assert_eq!(
            pinv(&a, RankTolerance::Auto).unwrap_err(),
            Error::NonFinite("svd input")
        );
    }
}
