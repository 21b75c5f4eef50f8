//! Desk-scale comparison table: trend verdicts per (instance regime,
//! algorithm). Sizes this small cannot prove asymptotics; the verdicts
//! classify which scaling model explains the sweep best.

use crate::classical::{descent_generator, time_to_mass_threshold, ProbDist};
use crate::control::QaoaAngles;
use crate::error::{Error, Result};
use crate::harness::config::{AlgorithmSpec, Budgets, ExperimentConfig, InstanceSpec};
use crate::harness::fit::{compare_power_exp, fit_scaling, FitModel};
use crate::landscape::{cond_index, make_spike, BushCost, Instance};
use crate::quantum::{default_mixer, mixer_lambda, qaoa_run, spectral_gap_scan};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SucceedsFlat,
    SucceedsPoly,
    FailsExpTrend,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::SucceedsFlat => "succeeds-flat",
            Verdict::SucceedsPoly => "succeeds-poly",
            Verdict::FailsExpTrend => "fails-exp-trend",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictRow {
    pub regime: String,
    pub algorithm: String,
    pub verdict: Verdict,
    pub detail: String,
}

/// Thresholds and sweep sizes for the comparison table.
#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Flat verdict: min success at least this...
    pub flat_threshold: f64,
    /// ...and |success(n_max) - success(n_min)| at most this.
    pub flat_drift: f64,
    /// Log-fit quality demanded of the BBSA bush sweep.
    pub r2_threshold: f64,
    pub qaoa_sizes: Vec<usize>,
    pub gap_sizes: Vec<usize>,
    /// The exponentially-closing bush gap hits the f64 noise floor quickly;
    /// its sweep stays small.
    pub gap_sizes_bush_small_lambda: Vec<usize>,
    pub bbsa_sizes: Vec<usize>,
    pub sa_sizes: Vec<usize>,
    pub gap_grid_points: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            flat_threshold: 0.2,
            flat_drift: 0.1,
            r2_threshold: 0.95,
            qaoa_sizes: vec![16, 32, 64, 128, 256],
            gap_sizes: vec![32, 48, 64, 96, 128, 192, 256],
            gap_sizes_bush_small_lambda: vec![32, 40, 48, 56, 64],
            bbsa_sizes: vec![16, 32, 64, 128, 256, 512, 1024],
            sa_sizes: vec![16, 32, 64],
            gap_grid_points: 201,
        }
    }
}

fn classify_success(ns: &[f64], successes: &[f64], opts: &ReportOptions) -> (Verdict, String) {
    let min = successes.iter().copied().fold(f64::INFINITY, f64::min);
    let drift = (successes[successes.len() - 1] - successes[0]).abs();
    if min >= opts.flat_threshold && drift <= opts.flat_drift {
        return (
            Verdict::SucceedsFlat,
            format!("min success {min:.3}, drift {drift:.3}"),
        );
    }
    match compare_power_exp(ns, successes) {
        Ok((FitModel::Power, power, _)) => (
            Verdict::SucceedsPoly,
            format!("power law wins, exponent {:.2}", power.alpha),
        ),
        Ok((_, _, exp)) => (
            Verdict::FailsExpTrend,
            format!("exponential wins, rate {:.3}", exp.alpha),
        ),
        Err(_) => (
            Verdict::FailsExpTrend,
            "success collapsed to 0 within the sweep".into(),
        ),
    }
}

fn classify_gaps(ns: &[f64], gaps: &[f64]) -> (Verdict, String) {
    match compare_power_exp(ns, gaps) {
        Ok((FitModel::Power, power, _)) => (
            Verdict::SucceedsPoly,
            format!("min gap power law, exponent {:.2}", power.alpha),
        ),
        Ok((_, _, exp)) => (
            Verdict::FailsExpTrend,
            format!("min gap exponential, rate {:.3}", exp.alpha),
        ),
        Err(_) => (Verdict::FailsExpTrend, "gap underflowed".into()),
    }
}

fn gap_sweep(
    sizes: &[usize],
    grid_points: usize,
    make: impl Fn(usize) -> Result<(Instance, crate::quantum::HermitianOperator)>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid: Vec<f64> = (0..grid_points)
        .map(|k| k as f64 / (grid_points - 1) as f64)
        .collect();
    let mut ns = Vec::new();
    let mut gaps = Vec::new();
    for &n in sizes {
        let (inst, mixer) = make(n)?;
        let scan = spectral_gap_scan(&inst, &mixer, &grid)?;
        ns.push(n as f64);
        gaps.push(scan.min_gap);
    }
    Ok((ns, gaps))
}

/// Build the comparison table. Every row runs its own sweep; expect a minute
/// or two with default options.
pub fn table1_report(opts: &ReportOptions) -> Result<Vec<VerdictRow>> {
    let mut rows = Vec::new();

    // QAOA1 on a sub-extensive spike: success stays put
    {
        let angles = QaoaAngles::one(FRAC_PI_4, FRAC_PI_2);
        let mut ns = Vec::new();
        let mut succ = Vec::new();
        for &n in &opts.qaoa_sizes {
            let inst = Instance::Symmetric(make_spike(n, 0.5, 0.75)?);
            let out = qaoa_run(&inst, &angles, &default_mixer(&inst))?;
            ns.push(n as f64);
            succ.push(out.success);
        }
        let (verdict, detail) = classify_success(&ns, &succ, opts);
        rows.push(VerdictRow {
            regime: "spike a<1".into(),
            algorithm: "qaoa1".into(),
            verdict,
            detail,
        });
    }

    // QAOA1 on the bush: success converges to 1/4
    {
        let angles = QaoaAngles::one(FRAC_PI_4, FRAC_PI_2);
        let mut ns = Vec::new();
        let mut succ = Vec::new();
        for &n in &opts.qaoa_sizes {
            let inst = Instance::Bush(BushCost::new(n));
            let out = qaoa_run(&inst, &angles, &default_mixer(&inst))?;
            ns.push(n as f64);
            succ.push(out.success);
        }
        let (verdict, detail) = classify_success(&ns, &succ, opts);
        rows.push(VerdictRow {
            regime: "bush".into(),
            algorithm: "qaoa1".into(),
            verdict,
            detail,
        });
    }

    // QAO gap regimes
    {
        let (ns, gaps) = gap_sweep(&opts.gap_sizes, opts.gap_grid_points, |n| {
            let inst = Instance::Symmetric(make_spike(n, 0.1, 0.2)?);
            let mixer = default_mixer(&inst);
            Ok((inst, mixer))
        })?;
        let (verdict, detail) = classify_gaps(&ns, &gaps);
        rows.push(VerdictRow {
            regime: "spike 2a+b<1".into(),
            algorithm: "qao".into(),
            verdict,
            detail,
        });
    }
    {
        let (ns, gaps) = gap_sweep(&opts.gap_sizes, opts.gap_grid_points, |n| {
            let inst = Instance::Symmetric(make_spike(n, 0.6, 0.4)?);
            let mixer = default_mixer(&inst);
            Ok((inst, mixer))
        })?;
        let (verdict, detail) = classify_gaps(&ns, &gaps);
        rows.push(VerdictRow {
            regime: "spike 2a+b>1".into(),
            algorithm: "qao".into(),
            verdict,
            detail,
        });
    }
    {
        let (ns, gaps) = gap_sweep(&opts.gap_sizes, opts.gap_grid_points, |n| {
            let inst = Instance::Bush(BushCost::new(n));
            let mixer = mixer_lambda(n, 1.0)?;
            Ok((inst, mixer))
        })?;
        let (verdict, detail) = classify_gaps(&ns, &gaps);
        rows.push(VerdictRow {
            regime: "bush lambda>=1".into(),
            algorithm: "qao".into(),
            verdict,
            detail,
        });
    }
    {
        let (ns, gaps) = gap_sweep(
            &opts.gap_sizes_bush_small_lambda,
            opts.gap_grid_points,
            |n| {
                let inst = Instance::Bush(BushCost::new(n));
                let mixer = mixer_lambda(n, 1.0 / (n as f64 + 1.0))?;
                Ok((inst, mixer))
            },
        )?;
        let (verdict, detail) = classify_gaps(&ns, &gaps);
        rows.push(VerdictRow {
            regime: "bush lambda=1/(n+1)".into(),
            algorithm: "qao".into(),
            verdict,
            detail,
        });
    }

    // BBSA on the bush: time to threshold mass scales as log n
    {
        let mut ns = Vec::new();
        let mut times = Vec::new();
        for &n in &opts.bbsa_sizes {
            ns.push(n as f64);
            times.push(bbsa_bush_time(n)?);
        }
        let fit = fit_scaling(&ns, &times, FitModel::Log)?;
        let verdict = if fit.r_squared >= opts.r2_threshold {
            Verdict::SucceedsPoly
        } else {
            Verdict::FailsExpTrend
        };
        rows.push(VerdictRow {
            regime: "bush".into(),
            algorithm: "bbsa".into(),
            verdict,
            detail: format!(
                "time = {:.2} ln n + {:.2}, R² = {:.4}",
                fit.alpha, fit.beta, fit.r_squared
            ),
        });
    }

    // SA with geometric cooling on an extensive spike: exact success decays
    {
        let mut ns = Vec::new();
        let mut succ = Vec::new();
        for &n in &opts.sa_sizes {
            let config = sa_spike_config(n);
            let rows = crate::harness::run(&config)?;
            ns.push(n as f64);
            succ.push(rows[0].success);
        }
        let (verdict, detail) = classify_success(&ns, &succ, opts);
        rows.push(VerdictRow {
            regime: "spike 2a+b>1".into(),
            algorithm: "sa".into(),
            verdict,
            detail,
        });
    }

    Ok(rows)
}

/// Exact evolution time until the bush minimum holds mass n^(-2.503) under
/// pure descent from the uniform start.
pub fn bbsa_bush_time(n: usize) -> Result<f64> {
    let inst = Instance::Bush(BushCost::new(n));
    let basis = inst.reduced_basis();
    let gen = descent_generator(&inst, basis)?;
    let p0 = ProbDist::uniform_strings(basis);
    let dt = 1.0 / (n as f64 + 2.0);
    let threshold = (n as f64).powf(-2.503);
    let max_time = 10.0 + 3.0 * (n as f64).ln();
    time_to_mass_threshold(&p0, &gen, cond_index(n, 0, 0), threshold, dt, max_time)?
        .ok_or_else(|| Error::Fit(format!("threshold not reached within {max_time} at n = {n}")))
}

fn sa_spike_config(n: usize) -> ExperimentConfig {
    ExperimentConfig {
        instance: InstanceSpec {
            kind: "spike".into(),
            a: Some(0.5),
            b: Some(1.0),
            table: None,
        },
        algorithm: AlgorithmSpec {
            kind: "sa".into(),
            angles: None,
            lambda: None,
            t1: None,
            td: None,
            t2: None,
            tau0: None,
            ratio: 0.7,
            rounds: 20,
            exact: true,
        },
        sizes: vec![n],
        seeds: vec![0],
        budgets: Budgets::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bbsa_bush_time_grows_slowly() {
        let t16 = bbsa_bush_time(16).unwrap();
        let t128 = bbsa_bush_time(128).unwrap();
        assert!(t16 > 0.0);
        assert!(t128 > t16);
        // log-like growth: an 8x size increase should well under 8x the time
        assert!(t128 < 4.0 * t16, "t16 = {t16}, t128 = {t128}");
    }
}
