//! Least-squares polynomial fits used to read curvature and dispersion off sampled curves.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Coefficients `c_0..=c_degree` minimising `Σ (y − Σ c_k x^k)²`.
pub fn poly_fit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    fit_basis(x, y, degree, |x, k| x.powi(k as i32))
}

/// Same as [`poly_fit`] in the Taylor basis `x^k / k!`.
pub fn taylor_fit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    fit_basis(x, y, degree, |x, k| {
        (1..=k).fold(1.0, |acc, i| acc * x / i as f64)
    })
}

fn fit_basis(x: &[f64], y: &[f64], degree: usize, basis: impl Fn(f64, usize) -> f64) -> Result<Vec<f64>> {
    if x.len() != y.len() || x.len() <= degree {
        return Err(Error::InvalidParameter {
            name: "fit",
            reason: format!(
                "need more than {degree} paired samples, got {} x and {} y",
                x.len(),
                y.len()
            ),
        });
    }
    let design = DMatrix::from_fn(x.len(), degree + 1, |i, k| basis(x[i], k));
    let rhs = DVector::from_column_slice(y);
    let solution = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::InvalidParameter {
            name: "fit",
            reason: e.to_string(),
        })?;
    Ok(solution.iter().copied().collect())
}

/// Unwraps a phase sequence so that consecutive samples differ by less than π.
pub fn unwrap_phase(phase: &[f64]) -> Vec<f64> {
    use std::f64::consts::PI;
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    for (i, &p) in phase.iter().enumerate() {
        if i > 0 {
            let step = p - phase[i - 1];
            offset -= (step / (2.0 * PI)).round() * 2.0 * PI;
        }
        out.push(p + offset);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_quadratic() {
        let x: Vec<f64> = (0..21).map(|i| -2.0 + 0.2 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 1.5 - 0.25 * x + 3.0 * x * x).collect();
        let c = poly_fit(&x, &y, 2).unwrap();
        assert!((c[0] - 1.5).abs() < 1e-12);
        assert!((c[1] + 0.25).abs() < 1e-12);
        assert!((c[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn taylor_basis_scaling() {
        let x: Vec<f64> = (0..41).map(|i| -4.0 + 0.2 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|x| 0.7 * x.powi(4) / 24.0 + 2.0 * x * x / 2.0).collect();
        let c = taylor_fit(&x, &y, 5).unwrap();
        assert!((c[2] - 2.0).abs() < 1e-10);
        assert!((c[4] - 0.7).abs() < 1e-10);
        assert!(c[3].abs() < 1e-10);
    }

    #[test]
    fn unwrap_removes_jumps() {
        let truth: Vec<f64> = (0..100).map(|i| 0.3 * i as f64).collect();
        let wrapped: Vec<f64> = truth
            .iter()
            .map(|p| (p + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI) - std::f64::consts::PI)
            .collect();
        let un = unwrap_phase(&wrapped);
        for (a, b) in un.iter().zip(&truth) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_points() {
        assert!(poly_fit(&[1.0, 2.0], &[1.0, 2.0], 2).is_err());
    }
}
