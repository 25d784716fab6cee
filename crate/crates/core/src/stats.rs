//! Ensemble estimators. Reductions run in a fixed order so results do not depend
//! on how trials were scheduled.

use serde::Serialize;

/// Two-sided 95% standard-normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let count = values.len();
        if count == 0 {
            return Moments {
                count,
                mean: f64::NAN,
                variance: f64::NAN,
            };
        }
        if values.iter().all(|&v| v == values[0]) {
            return Moments {
                count,
                mean: values[0],
                variance: if count > 1 { 0.0 } else { f64::NAN },
            };
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let variance = if count > 1 {
            values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            f64::NAN
        };
        Moments {
            count,
            mean,
            variance,
        }
    }

    pub fn std_error(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrEstimate {
    pub mean: f64,
    pub variance: f64,
    /// `mean²/variance`; infinite when the variance vanishes.
    pub snr: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SnrEstimate {
    /// Half-width of the confidence interval relative to the estimate.
    pub fn relative_half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low) / self.snr.abs()
    }
}

/// `mean²/variance` with a leave-one-out jackknife 95% interval. Needs at least three values.
pub fn jackknife_snr(values: &[f64]) -> Option<SnrEstimate> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let m = Moments::of(values);
    let nf = n as f64;
    let ss = m.variance * (nf - 1.0);
    if ss == 0.0 {
        return Some(SnrEstimate {
            mean: m.mean,
            variance: 0.0,
            snr: f64::INFINITY,
            std_error: 0.0,
            ci_low: f64::INFINITY,
            ci_high: f64::INFINITY,
        });
    }
    let snr = m.mean * m.mean / m.variance;
    let loo: Vec<f64> = values
        .iter()
        .map(|&x| {
            let mean_i = (nf * m.mean - x) / (nf - 1.0);
            let ss_i = (ss - (x - m.mean).powi(2) * nf / (nf - 1.0)).max(0.0);
            mean_i * mean_i / (ss_i / (nf - 2.0))
        })
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / nf;
    let spread = loo.iter().map(|t| (t - loo_mean).powi(2)).sum::<f64>();
    let std_error = ((nf - 1.0) / nf * spread).sqrt();
    Some(SnrEstimate {
        mean: m.mean,
        variance: m.variance,
        snr,
        std_error,
        ci_low: snr - Z_95 * std_error,
        ci_high: snr + Z_95 * std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_basic() {
        let m = Moments::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.variance - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn jackknife_matches_brute_force() {
        let values: Vec<f64> = (0..40).map(|i| 3.0 + ((i * 7919) % 13) as f64 * 0.1).collect();
        let est = jackknife_snr(&values).unwrap();
        let n = values.len();
        let loo: Vec<f64> = (0..n)
            .map(|i| {
                let rest: Vec<f64> = values.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
                let m = Moments::of(&rest);
                m.mean * m.mean / m.variance
            })
            .collect();
        let mean = loo.iter().sum::<f64>() / n as f64;
        let se = ((n as f64 - 1.0) / n as f64 * loo.iter().map(|t| (t - mean).powi(2)).sum::<f64>()).sqrt();
        assert!((est.std_error / se - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_variance_is_infinite() {
        let est = jackknife_snr(&[2.0, 2.0, 2.0]).unwrap();
        assert!(est.snr.is_infinite());
        assert!(jackknife_snr(&[1.0, 2.0]).is_none());
    }
}
