//! Classical Markov dynamics in reduced bases: Metropolis generators H(tau),
//! diffusion D, randomized gradient descent G, the linear-update family
//! H(u) = u D + (1-u) G, exact distribution evolution, and seeded Monte Carlo
//! walker ensembles.
//!
//! Convention: generators Q have nonnegative off-diagonals (rate into the row
//! state from the column state), zero column sums, evolution `P' = Q P`, and
//! stochastic steps `I + Q dt`.

use crate::control::{ControlPath, TemperatureSchedule};
use crate::error::{Error, Result};
use crate::landscape::{cond_label, BasisKind, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// One lumped transition out of a basis state: `multiplicity` hypercube edges
/// with common cost increase `delta` into `target`.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub target: usize,
    pub multiplicity: f64,
    pub delta: f64,
}

/// All transitions out of label `j` in the given basis. Lumped bases carry
/// edge multiplicities (a weight-w string has n-w up and w down neighbors;
/// the bush adds one central-flip edge).
pub fn neighbor_edges(inst: &Instance, basis: BasisKind, j: usize) -> Vec<Edge> {
    let cost = |i: usize| inst.cost_label(basis, i);
    let mut edges = Vec::with_capacity(4);
    match (inst, basis) {
        (Instance::Symmetric(c), BasisKind::Hamming(n)) => {
            debug_assert_eq!(c.n(), n);
            let w = j;
            if w < n {
                edges.push(Edge {
                    target: w + 1,
                    multiplicity: (n - w) as f64,
                    delta: cost(w + 1) - cost(w),
                });
            }
            if w > 0 {
                edges.push(Edge {
                    target: w - 1,
                    multiplicity: w as f64,
                    delta: cost(w - 1) - cost(w),
                });
            }
        }
        (Instance::Bush(b), BasisKind::ConditionalHamming(n)) => {
            debug_assert_eq!(b.n(), n);
            let (z0, w) = cond_label(n, j);
            if w < n {
                let t = j + 1;
                edges.push(Edge {
                    target: t,
                    multiplicity: (n - w) as f64,
                    delta: cost(t) - cost(j),
                });
            }
            if w > 0 {
                let t = j - 1;
                edges.push(Edge {
                    target: t,
                    multiplicity: w as f64,
                    delta: cost(t) - cost(j),
                });
            }
            let t = if z0 == 0 { j + (n + 1) } else { j - (n + 1) };
            edges.push(Edge {
                target: t,
                multiplicity: 1.0,
                delta: cost(t) - cost(j),
            });
        }
        (_, BasisKind::Full(nbits)) => {
            let z = j as u64;
            for bit in 0..nbits {
                let t = (z ^ (1u64 << bit)) as usize;
                edges.push(Edge {
                    target: t,
                    multiplicity: 1.0,
                    delta: cost(t) - cost(j),
                });
            }
        }
        _ => panic!("basis {} does not fit instance", basis.describe()),
    }
    edges
}

/// Number of single-bit directions out of any state in the basis.
pub fn direction_count(basis: BasisKind) -> usize {
    match basis {
        BasisKind::Hamming(n) => n,
        BasisKind::ConditionalHamming(n) => n + 1,
        BasisKind::Full(n) => n,
    }
}

/// Per-edge acceptance rule.
#[derive(Debug, Clone, Copy)]
pub enum MoveRule {
    /// min{1, e^(-delta/tau)}; tau = 0 is descent, tau = inf is diffusion.
    Metropolis { tau: f64 },
    /// 1 downhill/flat, `u` uphill.
    LinearUpdate { u: f64 },
}

impl MoveRule {
    pub fn acceptance(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 1.0;
        }
        match *self {
            MoveRule::Metropolis { tau } => {
                if tau == 0.0 {
                    0.0
                } else if tau.is_infinite() {
                    1.0
                } else {
                    (-delta / tau).exp()
                }
            }
            MoveRule::LinearUpdate { u } => u,
        }
    }
}

/// Continuous-time Markov generator in sparse column form.
#[derive(Debug, Clone)]
pub struct MarkovGenerator {
    basis: BasisKind,
    /// cols[j] = transitions out of state j: (target row, rate).
    cols: Vec<Vec<(usize, f64)>>,
}

impl MarkovGenerator {
    fn build(inst: &Instance, basis: BasisKind, rule: MoveRule) -> Self {
        let dim = basis.dimension();
        let cols = (0..dim)
            .map(|j| {
                neighbor_edges(inst, basis, j)
                    .into_iter()
                    .filter_map(|e| {
                        let r = e.multiplicity * rule.acceptance(e.delta);
                        (r > 0.0).then_some((e.target, r))
                    })
                    .collect()
            })
            .collect();
        Self { basis, cols }
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn dimension(&self) -> usize {
        self.cols.len()
    }

    /// Total outflow rate of column j (the negated diagonal).
    pub fn out_rate(&self, j: usize) -> f64 {
        self.cols[j].iter().map(|(_, r)| r).sum()
    }

    pub fn max_out_rate(&self) -> f64 {
        (0..self.dimension()).map(|j| self.out_rate(j)).fold(0.0, f64::max)
    }

    /// Matrix entry (i, j): off-diagonal rate, or negative column sum on the diagonal.
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return -self.out_rate(j);
        }
        self.cols[j]
            .iter()
            .find(|(t, _)| *t == i)
            .map_or(0.0, |(_, r)| *r)
    }

    pub fn transitions_from(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    /// `out += Q * p`
    pub fn apply_into(&self, p: &[f64], out: &mut [f64]) {
        for (j, col) in self.cols.iter().enumerate() {
            let pj = p[j];
            if pj == 0.0 {
                continue;
            }
            for &(i, r) in col {
                let flow = r * pj;
                out[i] += flow;
                out[j] -= flow;
            }
        }
    }

    /// Entrywise affine combination `a * self + b * other` (same sparsity basis).
    pub fn affine(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.basis, other.basis);
        let dim = self.dimension();
        let cols = (0..dim)
            .map(|j| {
                let mut merged: Vec<(usize, f64)> = Vec::new();
                for &(t, r) in &self.cols[j] {
                    merged.push((t, a * r));
                }
                for &(t, r) in &other.cols[j] {
                    if let Some(e) = merged.iter_mut().find(|(m, _)| *m == t) {
                        e.1 += b * r;
                    } else {
                        merged.push((t, b * r));
                    }
                }
                merged.retain(|(_, r)| *r != 0.0);
                merged
            })
            .collect();
        Self { basis: self.basis, cols }
    }
}

fn check_basis(inst: &Instance, basis: BasisKind) -> Result<()> {
    let ok = match (inst, basis) {
        (Instance::Symmetric(_), BasisKind::Hamming(_)) => basis == inst.reduced_basis(),
        (Instance::Bush(_), BasisKind::ConditionalHamming(_)) => basis == inst.reduced_basis(),
        (_, BasisKind::Full(nbits)) => basis == inst.full_basis() && nbits <= 12,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::BasisMismatch {
            expected: format!("{} or {}", inst.reduced_basis().describe(), inst.full_basis().describe()),
            got: basis.describe(),
        })
    }
}

/// Metropolis generator H(tau): per-edge rate min{1, e^(-delta/tau)} times
/// edge multiplicity. `tau = inf` gives diffusion D, `tau = 0` descent G.
pub fn metropolis_generator(inst: &Instance, basis: BasisKind, tau: f64) -> Result<MarkovGenerator> {
    if tau < 0.0 {
        return Err(Error::invalid("temperature must be >= 0"));
    }
    check_basis(inst, basis)?;
    Ok(MarkovGenerator::build(inst, basis, MoveRule::Metropolis { tau }))
}

/// Diffusion D = H(tau = inf): every neighbor move accepted.
pub fn diffusion_generator(inst: &Instance, basis: BasisKind) -> Result<MarkovGenerator> {
    metropolis_generator(inst, basis, f64::INFINITY)
}

/// Randomized gradient descent G = H(tau = 0): only non-uphill moves.
pub fn descent_generator(inst: &Instance, basis: BasisKind) -> Result<MarkovGenerator> {
    metropolis_generator(inst, basis, 0.0)
}

/// Linear-update generator H(u) = u D + (1 - u) G: uphill rate u, downhill 1.
pub fn linear_update_generator(inst: &Instance, basis: BasisKind, u: f64) -> Result<MarkovGenerator> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::invalid("control u must lie in [0, 1]"));
    }
    check_basis(inst, basis)?;
    Ok(MarkovGenerator::build(inst, basis, MoveRule::LinearUpdate { u }))
}

/// A 1-normalized classical probability distribution over a basis.
#[derive(Debug, Clone)]
pub struct ProbDist {
    pub basis: BasisKind,
    pub probs: Vec<f64>,
}

impl ProbDist {
    pub fn new(basis: BasisKind, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != basis.dimension() {
            return Err(Error::invalid("probability vector length must equal basis dimension"));
        }
        if probs.iter().any(|p| *p < 0.0) {
            return Err(Error::invalid("probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(Self { basis, probs })
    }

    /// Point mass on one label.
    pub fn delta(basis: BasisKind, label: usize) -> Self {
        let mut probs = vec![0.0; basis.dimension()];
        probs[label] = 1.0;
        Self { basis, probs }
    }

    /// Image of the uniform distribution over all bit strings in this basis:
    /// binomial weights for lumped bases, flat for the full basis.
    pub fn uniform_strings(basis: BasisKind) -> Self {
        let probs = match basis {
            BasisKind::Hamming(n) => (0..=n).map(|w| (ln_choose(n, w) - n as f64 * LN2).exp()).collect(),
            BasisKind::ConditionalHamming(n) => {
                let mut p: Vec<f64> = (0..=n)
                    .map(|w| (ln_choose(n, w) - (n + 1) as f64 * LN2).exp())
                    .collect();
                p.extend_from_slice(&p.clone());
                p
            }
            BasisKind::Full(n) => vec![1.0 / (1u64 << n) as f64; 1 << n],
        };
        Self { basis, probs }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mass_on(&self, labels: &[usize]) -> f64 {
        labels.iter().map(|&l| self.probs[l]).sum()
    }
}

const LN2: f64 = std::f64::consts::LN_2;

/// ln C(n, k) via ln Gamma.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: usize) -> f64 {
    // Stirling series with exact values for small n
    const EXACT: [f64; 21] = [
        0.0,
        0.0,
        0.6931471805599453,
        1.791759469228055,
        3.1780538303479458,
        4.787491742782046,
        6.579251212010101,
        8.525161361065415,
        10.60460290274525,
        12.801827480081469,
        15.104412573075516,
        17.502307845873887,
        19.987214495661885,
        22.552163853123425,
        25.19122118273868,
        27.89927138384089,
        30.671860106080672,
        33.50507345013689,
        36.39544520803305,
        39.339884187199495,
        42.335616460753485,
    ];
    if n < EXACT.len() {
        return EXACT[n];
    }
    let x = (n + 1) as f64;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x * x)
}

/// Evolve a distribution for `time` under a generator with stochastic Euler
/// steps `I + Q dt` (each step requires `dt * max_outflow < 1`).
/// The result is renormalized.
pub fn evolve_dist(p0: &ProbDist, gen: &MarkovGenerator, time: f64, dt: f64) -> Result<ProbDist> {
    if p0.basis != gen.basis() {
        return Err(Error::BasisMismatch {
            expected: gen.basis().describe(),
            got: p0.basis.describe(),
        });
    }
    if time == 0.0 {
        return Ok(p0.clone());
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt must be positive"));
    }
    let steps = (time / dt).ceil().max(1.0) as u64;
    let dt_eff = time / steps as f64;
    let stoch = dt_eff * gen.max_out_rate();
    if stoch >= 1.0 {
        return Err(Error::StepTooLarge(stoch));
    }
    let mut p = p0.probs.clone();
    let mut dp = vec![0.0; p.len()];
    for _ in 0..steps {
        dp.iter_mut().for_each(|x| *x = 0.0);
        gen.apply_into(&p, &mut dp);
        for (pi, di) in p.iter_mut().zip(&dp) {
            *pi += dt_eff * di;
        }
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(ProbDist { basis: p0.basis, probs: p })
}

/// Maximum dimension accepted by [`evolve_exact`].
pub const EXACT_MODE_MAX_DIM: usize = 4096;

/// Exact `exp(Q t) P` via uniformization (Poisson-weighted powers of the
/// stochastic matrix `I + Q / rate`), accurate to ~1e-14 tail truncation.
pub fn evolve_exact(p0: &ProbDist, gen: &MarkovGenerator, time: f64) -> Result<ProbDist> {
    if p0.basis != gen.basis() {
        return Err(Error::BasisMismatch {
            expected: gen.basis().describe(),
            got: p0.basis.describe(),
        });
    }
    let dim = gen.dimension();
    if dim > EXACT_MODE_MAX_DIM {
        return Err(Error::DimensionOverflow(dim, EXACT_MODE_MAX_DIM));
    }
    let rate = gen.max_out_rate().max(1e-300);
    let lt = rate * time;
    // accumulate sum_k Poisson(lt, k) M^k p in log-safe form
    let mut term = p0.probs.clone();
    let mut acc = vec![0.0; dim];
    let kmax = (lt + 12.0 * (lt.sqrt() + 1.0)).ceil() as u64;
    let mut ln_weight = -lt; // ln Poisson(0)
    let mut tail = 0.0f64;
    for k in 0..=kmax {
        let wgt = ln_weight.exp();
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += wgt * t;
        }
        tail += wgt;
        if tail > 1.0 - 1e-15 && k as f64 > lt {
            break;
        }
        // term <- (I + Q/rate) term
        let mut dp = vec![0.0; dim];
        gen.apply_into(&term, &mut dp);
        for (t, d) in term.iter_mut().zip(&dp) {
            *t += d / rate;
        }
        ln_weight += lt.ln() - ((k + 1) as f64).ln();
    }
    let total: f64 = acc.iter().sum();
    acc.iter_mut().for_each(|x| *x /= total);
    Ok(ProbDist { basis: p0.basis, probs: acc })
}

/// First time at which `probs[target] >= threshold` under Euler stepping.
/// Returns `None` if not reached within `max_time`.
pub fn time_to_mass_threshold(
    p0: &ProbDist,
    gen: &MarkovGenerator,
    target: usize,
    threshold: f64,
    dt: f64,
    max_time: f64,
) -> Result<Option<f64>> {
    let stoch = dt * gen.max_out_rate();
    if stoch >= 1.0 {
        return Err(Error::StepTooLarge(stoch));
    }
    if p0.probs[target] >= threshold {
        return Ok(Some(0.0));
    }
    let mut p = p0.probs.clone();
    let mut dp = vec![0.0; p.len()];
    let steps = (max_time / dt).ceil() as u64;
    for k in 1..=steps {
        dp.iter_mut().for_each(|x| *x = 0.0);
        gen.apply_into(&p, &mut dp);
        for (pi, di) in p.iter_mut().zip(&dp) {
            *pi += dt * di;
        }
        if p[target] >= threshold {
            return Ok(Some(k as f64 * dt));
        }
    }
    Ok(None)
}

/// Evolve a distribution along a piecewise-constant control path under the
/// linear-update dynamics H(u), Euler-stepped at `dt`.
pub fn evolve_path(
    p0: &ProbDist,
    inst: &Instance,
    path: &ControlPath,
    dt: f64,
) -> Result<ProbDist> {
    let mut p = p0.clone();
    for &(u, duration) in path.pieces() {
        let gen = linear_update_generator(inst, p0.basis, u)?;
        p = evolve_dist(&p, &gen, duration, dt)?;
    }
    Ok(p)
}

/// Exact success probability of the discrete Metropolis chain under a
/// temperature schedule, from the uniform-over-strings start: pushes the full
/// distribution through every step and returns the final mass on the global
/// minima.
pub fn schedule_exact_success(
    inst: &Instance,
    basis: BasisKind,
    sched: &TemperatureSchedule,
) -> Result<f64> {
    check_basis(inst, basis)?;
    let dirs = direction_count(basis);
    let mut p = ProbDist::uniform_strings(basis).probs;
    let mut next = vec![0.0; p.len()];
    for &(tau, steps) in &sched.rounds {
        let table = step_table(
            inst,
            basis,
            MoveRule::Metropolis { tau },
            ProbScale::Direction(dirs),
            1.0,
            steps,
        )?;
        // move probabilities from the cumulative table
        let rows: Vec<Vec<(usize, f64)>> = table
            .rows
            .iter()
            .map(|row| {
                let mut prev = 0.0;
                row.iter()
                    .map(|&(cum, t)| {
                        let pr = cum - prev;
                        prev = cum;
                        (t, pr)
                    })
                    .collect()
            })
            .collect();
        for _ in 0..steps {
            next.copy_from_slice(&p);
            for (j, row) in rows.iter().enumerate() {
                let pj = p[j];
                if pj == 0.0 {
                    continue;
                }
                for &(t, pr) in row {
                    let flow = pr * pj;
                    next[t] += flow;
                    next[j] -= flow;
                }
            }
            std::mem::swap(&mut p, &mut next);
        }
    }
    let minima = inst.global_minima(basis);
    Ok(minima.iter().map(|&m| p[m]).sum())
}

/// Bound on expected moves of a surviving bush walker:
/// `(2.503 / dt) * ln n`.
pub fn bush_moves_bound(n: usize, dt: f64) -> f64 {
    2.503 / dt * (n as f64).ln()
}

/// What drives a walker ensemble.
#[derive(Debug, Clone)]
pub enum Drive {
    /// Continuous-time linear-update dynamics H(u) along a control path,
    /// discretized with steps of at most `dt`.
    Path(ControlPath),
    /// Discrete Metropolis random walk under a temperature schedule.
    Schedule(TemperatureSchedule),
}

/// Options for walker runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct WalkerOptions {
    /// Bush analysis mode: walkers that start in or enter z0 = 1 are frozen
    /// and counted dead.
    pub bush_analysis: bool,
}

/// Ensemble statistics from a walker run.
#[derive(Debug, Clone)]
pub struct WalkerStats {
    pub n_walkers: usize,
    pub final_labels: Vec<usize>,
    /// Walkers whose final position is a global minimum.
    pub success_count: usize,
    pub success_fraction: f64,
    /// Lowest cost sampled over all walkers and steps.
    pub min_cost: f64,
    /// Bush analysis mode: fraction never frozen.
    pub survival_fraction: Option<f64>,
    /// Mean steps to first reach the global minimum, over walkers that did.
    pub mean_moves_to_min: Option<f64>,
}

struct StepTable {
    /// rows[label] = cumulative (threshold, target) move table for one step.
    rows: Vec<Vec<(f64, usize)>>,
    steps: u64,
}

fn step_table(
    inst: &Instance,
    basis: BasisKind,
    rule: MoveRule,
    scale: ProbScale,
    dt: f64,
    steps: u64,
) -> Result<StepTable> {
    let dim = basis.dimension();
    let mut rows = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut cum = 0.0;
        let mut row = Vec::new();
        for e in neighbor_edges(inst, basis, j) {
            let p = match scale {
                // continuous-time rates scaled by dt
                ProbScale::Rate => e.multiplicity * rule.acceptance(e.delta) * dt,
                // uniform direction choice, then acceptance
                ProbScale::Direction(dirs) => {
                    e.multiplicity / dirs as f64 * rule.acceptance(e.delta)
                }
            };
            if p > 0.0 {
                cum += p;
                row.push((cum, e.target));
            }
        }
        if cum > 1.0 + 1e-12 {
            return Err(Error::StepTooLarge(cum));
        }
        rows.push(row);
    }
    Ok(StepTable { rows, steps })
}

enum ProbScale {
    Rate,
    Direction(usize),
}

/// Run a seeded walker ensemble. Each walker gets an independent stream
/// derived from `(seed, walker index)` by counter-based splitting, so results
/// are reproducible and thread-count independent.
pub fn run_walkers(
    inst: &Instance,
    basis: BasisKind,
    drive: &Drive,
    n_walkers: usize,
    dt: f64,
    seed: u64,
    opts: WalkerOptions,
) -> Result<WalkerStats> {
    check_basis(inst, basis)?;
    if opts.bush_analysis && !matches!(basis, BasisKind::ConditionalHamming(_)) {
        return Err(Error::invalid("bush analysis mode needs the conditional Hamming basis"));
    }

    // phase tables: one per control piece or temperature round
    let phases: Vec<StepTable> = match drive {
        Drive::Path(path) => {
            if !(dt > 0.0) {
                return Err(Error::invalid("dt must be positive"));
            }
            path.pieces()
                .iter()
                .map(|&(u, duration)| {
                    let steps = (duration / dt).ceil().max(1.0) as u64;
                    let dt_eff = duration / steps as f64;
                    step_table(inst, basis, MoveRule::LinearUpdate { u }, ProbScale::Rate, dt_eff, steps)
                })
                .collect::<Result<_>>()?
        }
        Drive::Schedule(sched) => {
            let dirs = direction_count(basis);
            sched
                .rounds
                .iter()
                .map(|&(tau, steps)| {
                    step_table(inst, basis, MoveRule::Metropolis { tau }, ProbScale::Direction(dirs), 1.0, steps)
                })
                .collect::<Result<_>>()?
        }
    };

    let minima = inst.global_minima(basis);
    let is_min: Vec<bool> = {
        let mut v = vec![false; basis.dimension()];
        for &m in &minima {
            v[m] = true;
        }
        v
    };
    let init = ProbDist::uniform_strings(basis);
    let init_cum: Vec<f64> = init
        .probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let n_cond = match basis {
        BasisKind::ConditionalHamming(n) => n,
        _ => 0,
    };

    struct Acc {
        success: usize,
        min_cost: f64,
        survived: usize,
        moves_sum: f64,
        moves_count: usize,
        labels: Vec<(usize, usize)>,
    }

    let acc = (0..n_walkers)
        .into_par_iter()
        .map(|widx| {
            let mut rng = walker_rng(seed, widx as u64);
            // initial position from the uniform-over-strings image
            let x: f64 = rng.random();
            let mut pos = init_cum.partition_point(|&c| c < x).min(init_cum.len() - 1);
            let mut dead = opts.bush_analysis && cond_label(n_cond, pos).0 == 1;
            let mut min_cost = inst.cost_label(basis, pos);
            let mut moves: u64 = 0;
            let mut hit_min: Option<u64> = if is_min[pos] { Some(0) } else { None };

            'phases: for phase in &phases {
                for _ in 0..phase.steps {
                    if dead {
                        break 'phases;
                    }
                    moves += 1;
                    let x: f64 = rng.random();
                    let row = &phase.rows[pos];
                    for &(threshold, target) in row {
                        if x < threshold {
                            pos = target;
                            break;
                        }
                    }
                    if opts.bush_analysis && cond_label(n_cond, pos).0 == 1 {
                        dead = true;
                    }
                    let c = inst.cost_label(basis, pos);
                    if c < min_cost {
                        min_cost = c;
                    }
                    if hit_min.is_none() && is_min[pos] {
                        hit_min = Some(moves);
                    }
                }
            }

            let success = !dead && is_min[pos];
            (widx, pos, success, min_cost, !dead, hit_min)
        })
        .fold(
            || Acc {
                success: 0,
                min_cost: f64::INFINITY,
                survived: 0,
                moves_sum: 0.0,
                moves_count: 0,
                labels: Vec::new(),
            },
            |mut a, (widx, pos, success, min_cost, alive, hit)| {
                if success {
                    a.success += 1;
                }
                if alive {
                    a.survived += 1;
                }
                if min_cost < a.min_cost {
                    a.min_cost = min_cost;
                }
                if let Some(m) = hit {
                    a.moves_sum += m as f64;
                    a.moves_count += 1;
                }
                a.labels.push((widx, pos));
                a
            },
        )
        .reduce(
            || Acc {
                success: 0,
                min_cost: f64::INFINITY,
                survived: 0,
                moves_sum: 0.0,
                moves_count: 0,
                labels: Vec::new(),
            },
            |mut a, b| {
                a.success += b.success;
                a.survived += b.survived;
                a.min_cost = a.min_cost.min(b.min_cost);
                a.moves_sum += b.moves_sum;
                a.moves_count += b.moves_count;
                a.labels.extend(b.labels);
                a
            },
        );

    let mut labels = acc.labels;
    labels.sort_unstable_by_key(|(w, _)| *w);
    let final_labels = labels.into_iter().map(|(_, p)| p).collect();

    Ok(WalkerStats {
        n_walkers,
        final_labels,
        success_count: acc.success,
        success_fraction: if n_walkers == 0 {
            0.0
        } else {
            acc.success as f64 / n_walkers as f64
        },
        min_cost: acc.min_cost,
        survival_fraction: opts
            .bush_analysis
            .then(|| if n_walkers == 0 { 0.0 } else { acc.survived as f64 / n_walkers as f64 }),
        mean_moves_to_min: (acc.moves_count > 0).then(|| acc.moves_sum / acc.moves_count as f64),
    })
}

/// Counter-based stream splitting: one independent ChaCha stream per walker.
pub fn walker_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{bbsa_two_phase, TemperatureSchedule};
    use crate::landscape::{cond_index, make_ramp, make_spike, BushCost};
    use approx::assert_abs_diff_eq;

    fn ramp_inst(n: usize) -> Instance {
        Instance::Symmetric(make_ramp(n))
    }

    #[test]
    fn descent_on_ramp_rates() {
        let n = 6;
        let inst = ramp_inst(n);
        let g = descent_generator(&inst, BasisKind::Hamming(n)).unwrap();
        for w in 1..=n {
            assert_eq!(g.rate(w - 1, w), w as f64);
            if w < n {
                assert_eq!(g.rate(w + 1, w), 0.0);
            }
        }
    }

    #[test]
    fn diffusion_rates_count_neighbors() {
        let n = 9;
        let inst = Instance::Symmetric(make_spike(n.max(4), 0.5, 0.5).unwrap());
        let d = diffusion_generator(&inst, BasisKind::Hamming(n)).unwrap();
        for w in 0..=n {
            if w < n {
                assert_eq!(d.rate(w + 1, w), (n - w) as f64);
            }
            if w > 0 {
                assert_eq!(d.rate(w - 1, w), w as f64);
            }
        }
    }

    #[test]
    fn bush_minimum_absorbing_under_descent() {
        let n = 8;
        let inst = Instance::Bush(BushCost::new(n));
        let g = descent_generator(&inst, BasisKind::ConditionalHamming(n)).unwrap();
        assert_eq!(g.out_rate(cond_index(n, 0, 0)), 0.0);
        // descent transitions: (0,w)->(1,w) for w>0, down moves, (1,0)->(0,0)
        for w in 1..=n {
            assert!(g.rate(cond_index(n, 1, w), cond_index(n, 0, w)) > 0.0);
            assert!(g.rate(cond_index(n, 0, w - 1), cond_index(n, 0, w)) > 0.0);
            assert!(g.rate(cond_index(n, 1, w - 1), cond_index(n, 1, w)) > 0.0);
        }
        assert!(g.rate(cond_index(n, 0, 0), cond_index(n, 1, 0)) > 0.0);
        // flat moves within the constant sector are also non-uphill (delta = 0)
        assert!(g.rate(cond_index(n, 1, 2), cond_index(n, 1, 1)) > 0.0);
    }

    #[test]
    fn linear_update_endpoints_and_affinity() {
        let n = 8;
        let inst = Instance::Symmetric(make_spike(n, 0.5, 1.0).unwrap());
        let basis = BasisKind::Hamming(n);
        let d = diffusion_generator(&inst, basis).unwrap();
        let g = descent_generator(&inst, basis).unwrap();
        let h1 = linear_update_generator(&inst, basis, 1.0).unwrap();
        let h0 = linear_update_generator(&inst, basis, 0.0).unwrap();
        let hu = linear_update_generator(&inst, basis, 0.37).unwrap();
        for i in 0..basis.dimension() {
            for j in 0..basis.dimension() {
                assert_eq!(h1.rate(i, j), d.rate(i, j));
                assert_eq!(h0.rate(i, j), g.rate(i, j));
                let expect = 0.37 * d.rate(i, j) + 0.63 * g.rate(i, j);
                assert_abs_diff_eq!(hu.rate(i, j), expect, epsilon = 1e-15);
            }
        }
        // ramp at u = 0.5: uphill rate 0.5 (n - w)
        let inst = ramp_inst(n);
        let h = linear_update_generator(&inst, basis, 0.5).unwrap();
        for w in 0..n {
            assert_abs_diff_eq!(h.rate(w + 1, w), 0.5 * (n - w) as f64, epsilon = 1e-15);
        }
    }

    #[test]
    fn column_sums_are_zero() {
        let n = 8;
        for inst in [ramp_inst(n), Instance::Bush(BushCost::new(n))] {
            let basis = inst.reduced_basis();
            for tau in [0.0, 0.7, f64::INFINITY] {
                let g = metropolis_generator(&inst, basis, tau).unwrap();
                for j in 0..basis.dimension() {
                    let col_sum: f64 = (0..basis.dimension()).map(|i| g.rate(i, j)).sum();
                    assert!(col_sum.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn diffusion_reaches_uniform_on_full_basis() {
        let inst = ramp_inst(2);
        let basis = BasisKind::Full(2);
        let d = diffusion_generator(&inst, basis).unwrap();
        let p0 = ProbDist::delta(basis, 3);
        let p = evolve_exact(&p0, &d, 40.0).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(p.probs[i], 0.25, epsilon = 1e-9);
        }
        // Euler stepping agrees
        let p2 = evolve_dist(&p0, &d, 40.0, 0.01).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(p2.probs[i], 0.25, epsilon = 1e-6);
        }
    }

    #[test]
    fn zero_time_keeps_distribution() {
        let inst = ramp_inst(5);
        let basis = inst.reduced_basis();
        let g = descent_generator(&inst, basis).unwrap();
        let p0 = ProbDist::uniform_strings(basis);
        let p = evolve_dist(&p0, &g, 0.0, 0.1).unwrap();
        assert_eq!(p.probs, p0.probs);
    }

    #[test]
    fn bush_minimum_mass_monotone_under_descent() {
        let n = 8;
        let inst = Instance::Bush(BushCost::new(n));
        let basis = inst.reduced_basis();
        let g = descent_generator(&inst, basis).unwrap();
        let mut p = ProbDist::uniform_strings(basis);
        let mut last = p.probs[cond_index(n, 0, 0)];
        for _ in 0..30 {
            p = evolve_dist(&p, &g, 0.5, 0.05).unwrap();
            let m = p.probs[cond_index(n, 0, 0)];
            assert!(m >= last - 1e-12);
            last = m;
        }
    }

    #[test]
    fn step_too_large_rejected() {
        let n = 8;
        let inst = ramp_inst(n);
        let d = diffusion_generator(&inst, BasisKind::Hamming(n)).unwrap();
        let p0 = ProbDist::uniform_strings(BasisKind::Hamming(n));
        assert!(matches!(
            evolve_dist(&p0, &d, 1.0, 0.5),
            Err(Error::StepTooLarge(_))
        ));
    }

    #[test]
    fn infinite_temperature_schedule_matches_diffusion_dynamics() {
        // all tau = inf schedule (discrete walk) has the same stationary
        // behavior as the diffusion generator: uniform over strings
        let n = 6;
        let inst = ramp_inst(n);
        let basis = BasisKind::Hamming(n);
        let sched = Drive::Schedule(TemperatureSchedule::new(vec![(f64::INFINITY, 400)]).unwrap());
        let stats = run_walkers(&inst, basis, &sched, 20000, 1.0, 42, WalkerOptions::default()).unwrap();
        // empirical distribution close to binomial
        let mut counts = vec![0usize; n + 1];
        for &l in &stats.final_labels {
            counts[l] += 1;
        }
        let expect = ProbDist::uniform_strings(basis);
        for w in 0..=n {
            let obs = counts[w] as f64 / 20000.0;
            assert!((obs - expect.probs[w]).abs() < 0.02, "w={w} obs={obs}");
        }
    }

    #[test]
    fn walkers_reproducible_and_empty_ok() {
        let n = 16;
        let inst = Instance::Bush(BushCost::new(n));
        let basis = inst.reduced_basis();
        let drive = Drive::Path(bbsa_two_phase(6.0, 0.0, 0.0).unwrap());
        let opts = WalkerOptions { bush_analysis: true };
        let a = run_walkers(&inst, basis, &drive, 4000, 1.0 / (n as f64 + 2.0), 7, opts).unwrap();
        let b = run_walkers(&inst, basis, &drive, 4000, 1.0 / (n as f64 + 2.0), 7, opts).unwrap();
        assert_eq!(a.final_labels, b.final_labels);
        assert_eq!(a.success_count, b.success_count);
        assert!(a.survival_fraction.unwrap() > 0.0);

        let empty =
            run_walkers(&inst, basis, &drive, 0, 1.0 / (n as f64 + 2.0), 7, opts).unwrap();
        assert_eq!(empty.n_walkers, 0);
        assert_eq!(empty.success_count, 0);
        assert!(empty.final_labels.is_empty());
    }

    #[test]
    fn exact_schedule_evolution() {
        let n = 10;
        let inst = ramp_inst(n);
        let basis = BasisKind::Hamming(n);
        // infinite temperature: uniform over strings is stationary
        let hot = TemperatureSchedule::new(vec![(f64::INFINITY, 500)]).unwrap();
        let s = schedule_exact_success(&inst, basis, &hot).unwrap();
        assert_abs_diff_eq!(s, 1.0 / 1024.0, epsilon = 1e-12);
        // zero temperature long enough: descent drains to w = 0
        let cold = TemperatureSchedule::new(vec![(0.0, 2000)]).unwrap();
        let s = schedule_exact_success(&inst, basis, &cold).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn path_evolution_composes() {
        let n = 8;
        let inst = ramp_inst(n);
        let basis = BasisKind::Hamming(n);
        let p0 = ProbDist::uniform_strings(basis);
        let path = bbsa_two_phase(6.0, 0.0, 6.0).unwrap();
        let dt = 1.0 / (n as f64 + 2.0);
        let whole = evolve_path(&p0, &inst, &path, dt).unwrap();
        let g = descent_generator(&inst, basis).unwrap();
        let direct = evolve_dist(&p0, &g, 12.0, dt).unwrap();
        for w in 0..=n {
            assert_abs_diff_eq!(whole.probs[w], direct.probs[w], epsilon = 1e-12);
        }
    }

    #[test]
    fn moves_bound_values() {
        assert_abs_diff_eq!(bush_moves_bound(3, 1.0), 2.503 * 3f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(bush_moves_bound(64, 0.25), 4.0 * 2.503 * 64f64.ln(), epsilon = 1e-9);
    }
}
