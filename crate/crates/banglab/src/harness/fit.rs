//! Scaling-law fits: least squares in each model's linearizing transform,
//! with goodness-of-fit for trend classification.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// y = alpha ln x + beta
    Log,
    /// y = e^beta x^alpha (linear in ln x / ln y)
    Power,
    /// y = e^beta e^(alpha x) (linear in x / ln y)
    Exp,
}

impl std::str::FromStr for FitModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log" => Ok(FitModel::Log),
            "power" => Ok(FitModel::Power),
            "exp" => Ok(FitModel::Exp),
            other => Err(Error::Fit(format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub model: FitModel,
    pub alpha: f64,
    pub beta: f64,
    /// R² in the transformed (linear) coordinates.
    pub r_squared: f64,
    /// Residual sum of squares in the transformed coordinates.
    pub rss: f64,
    pub residuals: Vec<f64>,
}

impl FitResult {
    /// Model prediction at x in original coordinates.
    pub fn predict(&self, x: f64) -> f64 {
        match self.model {
            FitModel::Log => self.alpha * x.ln() + self.beta,
            FitModel::Power => self.beta.exp() * x.powf(self.alpha),
            FitModel::Exp => (self.beta + self.alpha * x).exp(),
        }
    }
}

/// Least-squares fit of the model to (x, y) pairs.
pub fn fit_scaling(xs: &[f64], ys: &[f64], model: FitModel) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::Fit("x and y lengths differ".into()));
    }
    if xs.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", xs.len())));
    }
    let transform = |x: f64, y: f64| -> Result<(f64, f64)> {
        let tx = match model {
            FitModel::Log | FitModel::Power => {
                if x <= 0.0 {
                    return Err(Error::Fit(format!("x = {x} not positive under log transform")));
                }
                x.ln()
            }
            FitModel::Exp => x,
        };
        let ty = match model {
            FitModel::Log => y,
            FitModel::Power | FitModel::Exp => {
                if y <= 0.0 {
                    return Err(Error::Fit(format!("y = {y} not positive under log transform")));
                }
                y.ln()
            }
        };
        Ok((tx, ty))
    };
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| transform(x, y))
        .collect::<Result<_>>()?;
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("x values are all equal".into()));
    }
    let alpha = sxy / sxx;
    let beta = my - alpha * mx;
    let residuals: Vec<f64> = pts.iter().map(|&(x, y)| y - (alpha * x + beta)).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let tss: f64 = pts.iter().map(|&(_, y)| (y - my).powi(2)).sum();
    let r_squared = if tss == 0.0 { 1.0 } else { 1.0 - rss / tss };
    Ok(FitResult {
        model,
        alpha,
        beta,
        r_squared,
        rss,
        residuals,
    })
}

/// Compare power-law vs exponential decay for positive y: both regress ln y,
/// so their residual sums are directly comparable. Returns (winner, power
/// fit, exp fit).
pub fn compare_power_exp(xs: &[f64], ys: &[f64]) -> Result<(FitModel, FitResult, FitResult)> {
    let power = fit_scaling(xs, ys, FitModel::Power)?;
    let exp = fit_scaling(xs, ys, FitModel::Exp)?;
    let winner = if power.rss <= exp.rss {
        FitModel::Power
    } else {
        FitModel::Exp
    };
    Ok((winner, power, exp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn recovers_exact_log_law() {
        let xs: Vec<f64> = (1..=20).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.ln() - 1.2).collect();
        let fit = fit_scaling(&xs, &ys, FitModel::Log).unwrap();
        assert_abs_diff_eq!(fit.alpha, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.beta, -1.2, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exp_beats_power_on_exponential_data() {
        let xs: Vec<f64> = (4..=64).step_by(4).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (2f64).powf(-0.3 * x)).collect();
        let (winner, power, exp) = compare_power_exp(&xs, &ys).unwrap();
        assert_eq!(winner, FitModel::Exp);
        assert!(exp.rss < power.rss);
        assert_abs_diff_eq!(exp.alpha, -0.3 * (2f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn power_beats_exp_on_power_data() {
        let xs: Vec<f64> = (4..=64).step_by(4).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 5.0 * x.powf(-1.7)).collect();
        let (winner, power, _) = compare_power_exp(&xs, &ys).unwrap();
        assert_eq!(winner, FitModel::Power);
        assert_abs_diff_eq!(power.alpha, -1.7, epsilon = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fit_scaling(&[1.0, 2.0], &[1.0, 2.0], FitModel::Log).is_err());
        assert!(fit_scaling(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0], FitModel::Power).is_err());
        assert!(fit_scaling(&[1.0, 2.0, 3.0], &[1.0, -1.0, 1.0], FitModel::Exp).is_err());
        assert!(fit_scaling(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0], FitModel::Log).is_err());
    }
}
