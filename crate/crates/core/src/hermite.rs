//! Hermite function basis, least-squares expansion of beats, and reconstruction.
//!
//! The n-th Hermite function of width `delta` is
//!
//! ```text
//! phi_n(t) = exp(-t^2 / (2 delta^2)) H_n(t / delta) / sqrt(delta 2^n n! sqrt(pi))
//! ```
//!
//! with `H_n` the physicists' Hermite polynomial. Evaluating that literally
//! overflows `2^n n!` well before order 200, so the basis is built with the
//! equivalent normalized three-term recurrence
//!
//! ```text
//! phi_0 = pi^(-1/4) delta^(-1/2) exp(-t^2 / (2 delta^2))
//! phi_1 = sqrt(2) (t/delta) phi_0
//! phi_n = sqrt(2/n) (t/delta) phi_{n-1} - sqrt((n-1)/n) phi_{n-2}
//! ```
//!
//! The grid is `t = -M..=M` in samples. Coefficients are the least-squares
//! solution through a QR factorization of the basis matrix, which is computed
//! once per basis and shared by all fits.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Physicists' Hermite polynomial `H_n(x)` by the three-term recurrence.
///
/// Grows like `2^n n!`; meant for low orders only.
pub fn hermite_polynomial(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    for k in 2..=n {
        let next = 2.0 * x * cur - 2.0 * (k as f64 - 1.0) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluate the first `order_count` Hermite functions at the points `ts`.
/// Column `n` of the result holds `phi_n`.
pub fn hermite_functions(order_count: usize, delta: f64, ts: &[f64]) -> DMatrix<f64> {
    let mut phi = DMatrix::zeros(ts.len(), order_count);
    let c0 = PI.powf(-0.25) / delta.sqrt();
    for (row, &t) in ts.iter().enumerate() {
        let u = t / delta;
        let mut prev = c0 * (-0.5 * u * u).exp();
        if order_count == 0 {
            continue;
        }
        phi[(row, 0)] = prev;
        if order_count == 1 {
            continue;
        }
        let mut cur = 2f64.sqrt() * u * prev;
        phi[(row, 1)] = cur;
        for n in 2..order_count {
            let nf = n as f64;
            let next = (2.0 / nf).sqrt() * u * cur - ((nf - 1.0) / nf).sqrt() * prev;
            phi[(row, n)] = next;
            prev = cur;
            cur = next;
        }
    }
    phi
}

/// Thin QR of the basis matrix: `phi = q r`.
#[derive(Debug, Clone)]
struct Factorization {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

/// Hermite basis sampled on `t = -M..=M`. Immutable once built.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    order_count: usize,
    delta: f64,
    half_width: usize,
    phi: DMatrix<f64>,
    factor: Option<Factorization>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteCoeffs {
    pub coefficients: Vec<f64>,
    /// `|a - phi c| / |a|`, 0 for an all-zero beat.
    pub residual_nrmse: f64,
}

pub fn build_basis(order_count: usize, delta: f64, half_width: usize) -> Result<HermiteBasis> {
    if order_count == 0 {
        return Err(Error::InvalidParameter("basis order count L must be >= 1".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    if half_width == 0 {
        return Err(Error::InvalidParameter("half-width M must be >= 1".into()));
    }
    let ts: Vec<f64> = (-(half_width as isize)..=half_width as isize)
        .map(|t| t as f64)
        .collect();
    let phi = hermite_functions(order_count, delta, &ts);

    // more columns than grid points can never have full column rank
    let factor = (order_count <= ts.len()).then(|| {
        let qr = phi.clone().qr();
        Factorization { q: qr.q(), r: qr.r() }
    });
    Ok(HermiteBasis {
        order_count,
        delta,
        half_width,
        phi,
        factor,
    })
}

impl HermiteBasis {
    pub fn order_count(&self) -> usize {
        self.order_count
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Number of grid points, `2M + 1`.
    pub fn len(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `(2M + 1) x L` basis matrix.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.phi
    }

    /// `phi_n` sampled on the grid.
    pub fn column(&self, n: usize) -> Vec<f64> {
        self.phi.column(n).iter().copied().collect()
    }

    /// Least-squares expansion coefficients of a beat of length `2M + 1`.
    pub fn fit(&self, beat: &[f64]) -> Result<HermiteCoeffs> {
        if beat.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: beat.len(),
            });
        }
        let Factorization { q, r } = self.factor.as_ref().ok_or(Error::RankDeficient)?;
        let diag_max = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if r.diagonal().iter().any(|v| v.abs() <= diag_max * 1e-12) {
            return Err(Error::RankDeficient);
        }

        let a = DVector::from_column_slice(beat);
        let qta = q.tr_mul(&a);
        let c = r.solve_upper_triangular(&qta).ok_or(Error::RankDeficient)?;

        let a_norm = a.norm();
        let residual_nrmse = if a_norm == 0.0 {
            0.0
        } else {
            (&a - &self.phi * &c).norm() / a_norm
        };
        Ok(HermiteCoeffs {
            coefficients: c.iter().copied().collect(),
            residual_nrmse,
        })
    }

    /// `phi c` on the grid.
    pub fn reconstruct(&self, coefficients: &[f64]) -> Result<Vec<f64>> {
        if coefficients.len() != self.order_count {
            return Err(Error::DimensionMismatch {
                expected: self.order_count,
                got: coefficients.len(),
            });
        }
        let c = DVector::from_column_slice(coefficients);
        Ok((&self.phi * c).iter().copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_basis() -> HermiteBasis {
        build_basis(60, 10.0, 100).unwrap()
    }

    #[test]
    fn polynomial_anchors() {
        assert_eq!(hermite_polynomial(0, 17.5), 1.0);
        assert_eq!(hermite_polynomial(1, 3.0), 6.0);
        assert_eq!(hermite_polynomial(2, 1.0), 2.0);
        assert_eq!(hermite_polynomial(3, 1.0), -4.0);
        // H4 = 16x^4 - 48x^2 + 12
        assert_eq!(hermite_polynomial(4, 2.0), 16.0 * 16.0 - 48.0 * 4.0 + 12.0);
    }

    #[test]
    fn phi0_at_origin() {
        let b = default_basis();
        let expected = 1.0 / (PI.sqrt() * 10.0).sqrt();
        assert!((b.matrix()[(100, 0)] - expected).abs() < 1e-15);
        assert!((expected - 0.237_526_752_9).abs() < 1e-10);
    }

    #[test]
    fn parity() {
        let b = default_basis();
        for n in 0..60 {
            for k in 1..=100 {
                let pos = b.matrix()[(100 + k, n)];
                let neg = b.matrix()[(100 - k, n)];
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((neg - sign * pos).abs() <= 1e-14 * pos.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn sign_changes_match_order() {
        let b = default_basis();
        for n in 0..=20 {
            let col = b.column(n);
            let nonzero: Vec<f64> = col.into_iter().filter(|v| v.abs() > 1e-12).collect();
            let changes = nonzero.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            assert_eq!(changes, n, "order {n}");
        }
    }

    #[test]
    fn low_orders_orthonormal_on_grid() {
        let b = default_basis();
        let g = b.matrix().tr_mul(b.matrix());
        for m in 0..40 {
            for n in 0..40 {
                let target = if m == n { 1.0 } else { 0.0 };
                assert!((g[(m, n)] - target).abs() <= 1e-3, "({m},{n}) = {}", g[(m, n)]);
            }
        }
    }

    #[test]
    fn large_order_is_finite() {
        let b = build_basis(200, 10.0, 100).unwrap();
        assert!(b.matrix().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_basis(0, 10.0, 100).is_err());
        assert!(build_basis(60, 0.0, 100).is_err());
        assert!(build_basis(60, -1.0, 100).is_err());
        assert!(build_basis(60, 10.0, 0).is_err());
    }

    #[test]
    fn fits_a_basis_column() {
        let b = default_basis();
        let c = b.fit(&b.column(3)).unwrap();
        for (n, v) in c.coefficients.iter().enumerate() {
            let target = if n == 3 { 1.0 } else { 0.0 };
            assert!((v - target).abs() <= 1e-3);
        }
        assert!(c.residual_nrmse <= 1e-3);
    }

    #[test]
    fn fits_a_combination() {
        let b = default_basis();
        let a: Vec<f64> = b
            .column(0)
            .iter()
            .zip(b.column(7))
            .map(|(x, y)| 0.5 * x + 0.25 * y)
            .collect();
        let c = b.fit(&a).unwrap();
        assert!((c.coefficients[0] - 0.5).abs() <= 1e-3);
        assert!((c.coefficients[7] - 0.25).abs() <= 1e-3);
        for (n, v) in c.coefficients.iter().enumerate() {
            if n != 0 && n != 7 {
                assert!(v.abs() <= 1e-3);
            }
        }
    }

    #[test]
    fn zero_beat() {
        let b = default_basis();
        let c = b.fit(&[0.0; 201]).unwrap();
        assert!(c.coefficients.iter().all(|&v| v == 0.0));
        assert_eq!(c.residual_nrmse, 0.0);
        assert!(b.reconstruct(&c.coefficients).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn length_mismatches() {
        let b = default_basis();
        assert!(matches!(b.fit(&[0.0; 200]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(b.reconstruct(&[0.0; 59]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn too_many_orders_for_the_grid() {
        let b = build_basis(5, 1.0, 1).unwrap();
        assert!(matches!(b.fit(&[1.0, 2.0, 3.0]), Err(Error::RankDeficient)));
    }

    #[test]
    fn reconstructs_span_members() {
        let b = default_basis();
        let c: Vec<f64> = (0..60).map(|n| ((n * 7 % 11) as f64 - 5.0) / 10.0).collect();
        let x = b.reconstruct(&c).unwrap();
        let y = b.reconstruct(&b.fit(&x).unwrap().coefficients).unwrap();
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-9);
        }
    }
}
