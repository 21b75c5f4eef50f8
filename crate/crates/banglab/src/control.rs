//! Schedule types driving both dynamics modules: temperature schedules for
//! SA, piecewise-constant control paths `u(t)` for linear-update SA / BBSA /
//! QAO, and QAOA angle sequences.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A `p`-round annealing schedule: temperature and step count per round.
/// `tau = +inf` is the accept-always (diffusion) sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSchedule {
    pub rounds: Vec<(f64, u64)>,
}

impl TemperatureSchedule {
    pub fn new(rounds: Vec<(f64, u64)>) -> Result<Self> {
        for (tau, _) in &rounds {
            if !(*tau >= 0.0) {
                return Err(Error::invalid(format!("temperature {tau} must be >= 0 (inf allowed)")));
            }
        }
        Ok(Self { rounds })
    }

    pub fn total_steps(&self) -> u64 {
        self.rounds.iter().map(|(_, t)| t).sum()
    }
}

/// Geometric cooling: `tau_i = tau0 * ratio^i`, fixed steps per round.
pub fn geometric_cooling(tau0: f64, ratio: f64, p: usize, steps_per: u64) -> Result<TemperatureSchedule> {
    if !(tau0 > 0.0) {
        return Err(Error::invalid("tau0 must be positive"));
    }
    if !(0.0 < ratio && ratio < 1.0) {
        return Err(Error::invalid("cooling ratio must lie in (0, 1)"));
    }
    let rounds = (0..p).map(|i| (tau0 * ratio.powi(i as i32), steps_per)).collect();
    TemperatureSchedule::new(rounds)
}

/// Piecewise-constant control path: pieces `(u, duration)` with `u in [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPath {
    pieces: Vec<(f64, f64)>,
}

impl ControlPath {
    pub fn new(pieces: Vec<(f64, f64)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("control path needs at least one piece"));
        }
        for (u, dur) in &pieces {
            if !(0.0..=1.0).contains(u) {
                return Err(Error::invalid(format!("control value {u} outside [0, 1]")));
            }
            if !(*dur > 0.0) {
                return Err(Error::invalid(format!("piece duration {dur} must be positive")));
            }
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn total_time(&self) -> f64 {
        self.pieces.iter().map(|(_, d)| d).sum()
    }

    /// True iff every control value is extremal (0 or 1).
    pub fn is_bang_bang(&self) -> bool {
        self.pieces.iter().all(|(u, _)| *u == 0.0 || *u == 1.0)
    }

    /// Constant-u path.
    pub fn constant(u: f64, duration: f64) -> Result<Self> {
        Self::new(vec![(u, duration)])
    }
}

/// Midpoint-rule discretization of the linear schedule `u(s) = 1 - s`
/// over `s in [0, 1]`, scaled to total duration `T`.
pub fn linear_anneal_path(total_time: f64, steps: usize) -> Result<ControlPath> {
    if !(total_time > 0.0) {
        return Err(Error::invalid("total time must be positive"));
    }
    if steps < 1 {
        return Err(Error::invalid("need at least one step"));
    }
    let dur = total_time / steps as f64;
    let pieces = (0..steps)
        .map(|k| (1.0 - (k as f64 + 0.5) / steps as f64, dur))
        .collect();
    ControlPath::new(pieces)
}

/// The two-phase bang-bang SA path for barrier hopping: descend, briefly
/// diffuse, descend again. Zero-duration phases are dropped.
pub fn bbsa_two_phase(t_descent1: f64, t_diffuse: f64, t_descent2: f64) -> Result<ControlPath> {
    for d in [t_descent1, t_diffuse, t_descent2] {
        if d < 0.0 {
            return Err(Error::invalid("phase durations must be >= 0"));
        }
    }
    let pieces: Vec<(f64, f64)> = [(0.0, t_descent1), (1.0, t_diffuse), (0.0, t_descent2)]
        .into_iter()
        .filter(|(_, d)| *d > 0.0)
        .collect();
    if pieces.is_empty() {
        return Err(Error::invalid("all phase durations are zero"));
    }
    ControlPath::new(pieces)
}

/// QAOA angle schedule: `p` rounds of `(gamma_i, beta_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaAngles {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl QaoaAngles {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.len() != gammas.len() {
            return Err(Error::invalid("beta and gamma lists must have equal length"));
        }
        Ok(Self { betas, gammas })
    }

    /// Single round.
    pub fn one(beta: f64, gamma: f64) -> Self {
        Self {
            betas: vec![beta],
            gammas: vec![gamma],
        }
    }

    pub fn rounds(&self) -> usize {
        self.betas.len()
    }
}
