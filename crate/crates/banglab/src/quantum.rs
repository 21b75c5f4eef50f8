//! Exact quantum simulation in reduced symmetric bases: mixer and cost
//! operators, QAOA(p) evolution, closed-form one-round protocols, Schrödinger
//! evolution under piecewise-constant control, and spectral-gap scans.
//!
//! Conventions: the mixer is B = -sum_i X_i, phase rotations multiply
//! amplitudes by e^(-i gamma c), mixer rotations apply e^(-i beta B).

use crate::classical::ln_choose;
use crate::control::{ControlPath, QaoaAngles};
use crate::error::{Error, Result};
use crate::landscape::{BasisKind, Instance, SymmetricCost};
use crate::linalg::{symmetric_eigen, symmetric_lowest_two, tridiag_eigen, tridiag_lowest_two};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, LN_2};
use std::sync::OnceLock;

/// A normalized state vector over a reduced (or full) basis.
#[derive(Debug, Clone)]
pub struct ReducedState {
    pub basis: BasisKind,
    pub amps: Vec<Complex64>,
}

impl ReducedState {
    pub fn new(basis: BasisKind, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dimension() {
            return Err(Error::BasisMismatch {
                expected: basis.describe(),
                got: format!("vector of length {}", amps.len()),
            });
        }
        let state = Self { basis, amps };
        if (state.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("state is not normalized"));
        }
        Ok(state)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probability(&self, label: usize) -> f64 {
        self.amps[label].norm_sqr()
    }

    pub fn mass_on(&self, labels: &[usize]) -> f64 {
        labels.iter().map(|&l| self.probability(l)).sum()
    }

    /// Overlap ⟨self|other⟩.
    pub fn overlap(&self, other: &ReducedState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// The uniform superposition over all bit strings, expressed in the basis.
/// This is the exact ground state of both mixer families.
pub fn plus_state(basis: BasisKind) -> ReducedState {
    let amps = match basis {
        BasisKind::Hamming(n) => (0..=n)
            .map(|w| Complex64::new((0.5 * (ln_choose(n, w) - n as f64 * LN_2)).exp(), 0.0))
            .collect(),
        BasisKind::ConditionalHamming(n) => {
            let sector: Vec<Complex64> = (0..=n)
                .map(|w| {
                    Complex64::new(
                        (0.5 * (ln_choose(n, w) - (n + 1) as f64 * LN_2)).exp(),
                        0.0,
                    )
                })
                .collect();
            let mut amps = sector.clone();
            amps.extend(sector);
            amps
        }
        BasisKind::Full(n) => {
            let a = Complex64::new((0.5f64).powi(n as i32 / 2) * if n % 2 == 1 { 0.5f64.sqrt() } else { 1.0 }, 0.0);
            vec![a; 1 << n]
        }
    };
    ReducedState { basis, amps }
}

enum Repr {
    Diagonal(Vec<f64>),
    Tridiagonal { diag: Vec<f64>, off: Vec<f64> },
    /// Two identical tridiagonal sector blocks plus a constant cross-sector
    /// coupling on matching labels (the B_lambda family).
    Block { diag: Vec<f64>, off: Vec<f64>, coupling: f64 },
    Dense(DMatrix<f64>),
}

/// A real-symmetric operator with a cached eigendecomposition.
pub struct HermitianOperator {
    basis: BasisKind,
    repr: Repr,
    eigen: OnceLock<(DVector<f64>, DMatrix<f64>)>,
}

impl HermitianOperator {
    pub fn diagonal(basis: BasisKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != basis.dimension() {
            return Err(Error::invalid("diagonal length must equal basis dimension"));
        }
        Ok(Self {
            basis,
            repr: Repr::Diagonal(values),
            eigen: OnceLock::new(),
        })
    }

    pub fn dense(basis: BasisKind, mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != basis.dimension() || !mat.is_square() {
            return Err(Error::invalid("matrix shape must match basis dimension"));
        }
        for i in 0..mat.nrows() {
            for j in 0..i {
                if (mat[(i, j)] - mat[(j, i)]).abs() > 1e-12 {
                    return Err(Error::invalid("matrix is not symmetric"));
                }
            }
        }
        Ok(Self {
            basis,
            repr: Repr::Dense(mat),
            eigen: OnceLock::new(),
        })
    }

    pub fn basis(&self) -> BasisKind {
        self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    /// Matrix entry (i, j).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    0.0
                }
            }
            Repr::Tridiagonal { diag, off } => {
                if i == j {
                    diag[i]
                } else if i.abs_diff(j) == 1 {
                    off[i.min(j)]
                } else {
                    0.0
                }
            }
            Repr::Block { diag, off, coupling } => {
                let m = diag.len();
                let (si, wi) = (i / m, i % m);
                let (sj, wj) = (j / m, j % m);
                if si == sj {
                    if wi == wj {
                        diag[wi]
                    } else if wi.abs_diff(wj) == 1 {
                        off[wi.min(wj)]
                    } else {
                        0.0
                    }
                } else if wi == wj {
                    *coupling
                } else {
                    0.0
                }
            }
            Repr::Dense(m) => m[(i, j)],
        }
    }

    fn eigen(&self) -> &(DVector<f64>, DMatrix<f64>) {
        self.eigen.get_or_init(|| match &self.repr {
            Repr::Diagonal(d) => {
                let dim = d.len();
                let mut order: Vec<usize> = (0..dim).collect();
                order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
                let vals = DVector::from_iterator(dim, order.iter().map(|&i| d[i]));
                let mut vecs = DMatrix::zeros(dim, dim);
                for (k, &i) in order.iter().enumerate() {
                    vecs[(i, k)] = 1.0;
                }
                (vals, vecs)
            }
            Repr::Tridiagonal { diag, off } => tridiag_eigen(diag, off),
            Repr::Block { diag, off, coupling } => {
                // T (x) I + g * (X on the sector bit): eigenpairs are sector
                // (anti)symmetric copies of the tridiagonal eigenvectors with
                // eigenvalues e_k +- g.
                let m = diag.len();
                let (e, v) = tridiag_eigen(diag, off);
                let mut pairs: Vec<(f64, usize, f64)> = Vec::with_capacity(2 * m);
                for k in 0..m {
                    for s in [1.0f64, -1.0] {
                        pairs.push((e[k] + s * coupling, k, s));
                    }
                }
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let vals = DVector::from_iterator(2 * m, pairs.iter().map(|p| p.0));
                let mut vecs = DMatrix::zeros(2 * m, 2 * m);
                let inv_sqrt2 = 0.5f64.sqrt();
                for (col, &(_, k, s)) in pairs.iter().enumerate() {
                    for w in 0..m {
                        vecs[(w, col)] = inv_sqrt2 * v[(w, k)];
                        vecs[(m + w, col)] = s * inv_sqrt2 * v[(w, k)];
                    }
                }
                (vals, vecs)
            }
            Repr::Dense(mat) => symmetric_eigen(mat),
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigen().0
    }

    /// Two lowest eigenvalues without a full decomposition.
    pub fn lowest_two(&self) -> (f64, f64) {
        match &self.repr {
            Repr::Diagonal(d) => {
                let mut lo = (f64::INFINITY, f64::INFINITY);
                for &x in d {
                    if x < lo.0 {
                        lo = (x, lo.0);
                    } else if x < lo.1 {
                        lo.1 = x;
                    }
                }
                lo
            }
            Repr::Tridiagonal { diag, off } => tridiag_lowest_two(diag, off),
            Repr::Block { .. } | Repr::Dense(_) => {
                if let Repr::Dense(m) = &self.repr {
                    symmetric_lowest_two(m)
                } else {
                    let dim = self.dimension();
                    let m = DMatrix::from_fn(dim, dim, |i, j| self.entry(i, j));
                    symmetric_lowest_two(&m)
                }
            }
        }
    }

    /// exp(-i t H) |psi⟩ via the cached eigendecomposition
    /// (diagonal operators are rotated directly).
    pub fn apply_exp(&self, state: &ReducedState, t: f64) -> Result<ReducedState> {
        if state.basis != self.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis.describe(),
                got: state.basis.describe(),
            });
        }
        if let Repr::Diagonal(d) = &self.repr {
            let amps = state
                .amps
                .iter()
                .zip(d)
                .map(|(a, &c)| a * Complex64::from_polar(1.0, -t * c))
                .collect();
            return Ok(ReducedState { basis: state.basis, amps });
        }
        let (vals, vecs) = self.eigen();
        let dim = self.dimension();
        // y = V^T psi
        let mut y = vec![Complex64::ZERO; dim];
        for k in 0..dim {
            let mut acc = Complex64::ZERO;
            for i in 0..dim {
                acc += vecs[(i, k)] * state.amps[i];
            }
            y[k] = acc * Complex64::from_polar(1.0, -t * vals[k]);
        }
        // psi' = V y
        let mut amps = vec![Complex64::ZERO; dim];
        for k in 0..dim {
            let yk = y[k];
            for i in 0..dim {
                amps[i] += vecs[(i, k)] * yk;
            }
        }
        Ok(ReducedState { basis: state.basis, amps })
    }

    /// Lowest-eigenvalue eigenvector, with a sign convention making its
    /// largest-magnitude component positive.
    pub fn ground_state(&self) -> ReducedState {
        let (_, vecs) = self.eigen();
        let dim = self.dimension();
        let col = vecs.column(0);
        let mut best = 0;
        for i in 1..dim {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        let sign = if col[best] < 0.0 { -1.0 } else { 1.0 };
        let amps = (0..dim).map(|i| Complex64::new(sign * col[i], 0.0)).collect();
        ReducedState { basis: self.basis, amps }
    }

    pub fn expectation(&self, state: &ReducedState) -> f64 {
        match &self.repr {
            Repr::Diagonal(d) => state
                .amps
                .iter()
                .zip(d)
                .map(|(a, &c)| c * a.norm_sqr())
                .sum(),
            _ => {
                let dim = self.dimension();
                let mut acc = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        let h = self.entry(i, j);
                        if h != 0.0 {
                            acc += h * (state.amps[i].conj() * state.amps[j]).re;
                        }
                    }
                }
                acc
            }
        }
    }
}

/// The mixer B = -sum X_i restricted to the symmetric subspace:
/// tridiagonal with ⟨w+1|B|w⟩ = -√((w+1)(n-w)).
pub fn mixer_hamming(n: usize) -> HermitianOperator {
    assert!(n >= 1);
    let off = (0..n)
        .map(|w| -(((w + 1) * (n - w)) as f64).sqrt())
        .collect();
    HermitianOperator {
        basis: BasisKind::Hamming(n),
        repr: Repr::Tridiagonal {
            diag: vec![0.0; n + 1],
            off,
        },
        eigen: OnceLock::new(),
    }
}

/// The mixer family B_lambda on the conditional Hamming basis: the peripheral
/// tridiagonal B within each central-bit sector, plus a central-flip coupling
/// -lambda (n+1) between (0, w) and (1, w). lambda = 1/(n+1) recovers the
/// canonical mixer.
pub fn mixer_lambda(n: usize, lambda: f64) -> Result<HermitianOperator> {
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda must be positive"));
    }
    let off = (0..n)
        .map(|w| -(((w + 1) * (n - w)) as f64).sqrt())
        .collect();
    Ok(HermitianOperator {
        basis: BasisKind::ConditionalHamming(n),
        repr: Repr::Block {
            diag: vec![0.0; n + 1],
            off,
            coupling: -lambda * (n as f64 + 1.0),
        },
        eigen: OnceLock::new(),
    })
}

/// e^(-i gamma C) with C diagonal in the computational basis.
pub fn phase_rotation(state: &ReducedState, cost: &[f64], gamma: f64) -> Result<ReducedState> {
    if cost.len() != state.basis.dimension() {
        return Err(Error::BasisMismatch {
            expected: state.basis.describe(),
            got: format!("cost vector of length {}", cost.len()),
        });
    }
    let amps = state
        .amps
        .iter()
        .zip(cost)
        .map(|(a, &c)| a * Complex64::from_polar(1.0, -gamma * c))
        .collect();
    Ok(ReducedState { basis: state.basis, amps })
}

/// e^(-i beta B).
pub fn mixer_rotation(
    state: &ReducedState,
    mixer: &HermitianOperator,
    beta: f64,
) -> Result<ReducedState> {
    mixer.apply_exp(state, beta)
}

/// Outcome of a QAOA run.
#[derive(Debug, Clone)]
pub struct QaoaOutcome {
    pub state: ReducedState,
    /// Probability mass on the instance's global minima.
    pub success: f64,
    /// ⟨C⟩ in the final state.
    pub energy: f64,
}

/// Cost values of the instance in its reduced basis.
pub fn cost_vector(inst: &Instance) -> Vec<f64> {
    let basis = inst.reduced_basis();
    (0..basis.dimension())
        .map(|j| inst.cost_label(basis, j))
        .collect()
}

/// The canonical mixer for the instance's reduced basis.
pub fn default_mixer(inst: &Instance) -> HermitianOperator {
    match inst {
        Instance::Symmetric(c) => mixer_hamming(c.n()),
        Instance::Bush(b) => mixer_lambda(b.n(), 1.0 / (b.n() as f64 + 1.0)).unwrap(),
    }
}

/// Alternating evolution B(beta_i) C(gamma_i) for i = 1..p from the uniform
/// superposition.
pub fn qaoa_run(
    inst: &Instance,
    angles: &QaoaAngles,
    mixer: &HermitianOperator,
) -> Result<QaoaOutcome> {
    let basis = inst.reduced_basis();
    if mixer.basis() != basis {
        return Err(Error::BasisMismatch {
            expected: basis.describe(),
            got: mixer.basis().describe(),
        });
    }
    let cost = cost_vector(inst);
    let mut state = plus_state(basis);
    for round in 0..angles.rounds() {
        state = phase_rotation(&state, &cost, angles.gammas[round])?;
        state = mixer_rotation(&state, mixer, angles.betas[round])?;
    }
    let success = state.mass_on(&inst.global_minima(basis));
    let energy = cost
        .iter()
        .zip(&state.amps)
        .map(|(&c, a)| c * a.norm_sqr())
        .sum();
    Ok(QaoaOutcome { state, success, energy })
}

/// gamma* = arccos √(w*/n).
pub fn gamma_star(w_star: usize, n: usize) -> Result<f64> {
    if w_star > n {
        return Err(Error::invalid("w* must lie in [0, n]"));
    }
    Ok((w_star as f64 / n as f64).sqrt().acos())
}

/// Outcome of the one-round protocol targeting Hamming weight w* on a cost
/// with a linear ramp part.
#[derive(Debug, Clone)]
pub struct TargetWeightOutcome {
    /// Simulated probability of measuring weight w*.
    pub simulated: f64,
    /// Closed form (w*)^w* (n-w*)^(n-w*) / n^n * C(n, w*).
    pub closed_form: f64,
    pub gamma: f64,
    pub beta: f64,
}

/// Closed-form concentration probability at weight w* for the one-round
/// ramp protocol.
pub fn target_weight_closed_form(w_star: usize, n: usize) -> f64 {
    let mut ln_p = ln_choose(n, w_star) - n as f64 * (n as f64).ln();
    if w_star > 0 {
        ln_p += w_star as f64 * (w_star as f64).ln();
    }
    if w_star < n {
        ln_p += (n - w_star) as f64 * ((n - w_star) as f64).ln();
    }
    ln_p.exp()
}

/// One-round protocol for a cost whose ramp part is linear with slope c1:
/// beta = pi/4, gamma = arcsin(1 - 2 w*/n) / c1. On a purely linear cost the
/// final distribution is Binomial(n, w*/n), concentrated at w*.
pub fn target_weight_protocol(cost: &SymmetricCost, w_star: usize) -> Result<TargetWeightOutcome> {
    let n = cost.n();
    if w_star > n {
        return Err(Error::invalid("w* must lie in [0, n]"));
    }
    let (_, c1) = cost
        .linear_ramp_coefficients()
        .ok_or_else(|| Error::invalid("ramp part must be linear in w"))?;
    if c1 == 0.0 {
        return Err(Error::invalid("ramp slope must be nonzero"));
    }
    let gamma = (1.0 - 2.0 * w_star as f64 / n as f64).asin() / c1;
    let beta = FRAC_PI_4;
    let inst = Instance::Symmetric(cost.clone());
    let angles = QaoaAngles::one(beta, gamma);
    let outcome = qaoa_run(&inst, &angles, &mixer_hamming(n))?;
    Ok(TargetWeightOutcome {
        simulated: outcome.state.probability(w_star),
        closed_form: target_weight_closed_form(w_star, n),
        gamma,
        beta,
    })
}

/// Unknown-w* mode: run the protocol for every candidate w* in 0..=n and
/// report the probability each run places on its own target.
pub fn target_weight_scan(cost: &SymmetricCost) -> Result<Vec<TargetWeightOutcome>> {
    (0..=cost.n()).map(|w| target_weight_protocol(cost, w)).collect()
}

/// Weak-overlap figure q = Σ_w 4 |A_w|² sin²(gamma s(w) / 2) measuring how
/// strongly the perturbation phase moves the initial state.
pub fn weak_overlap_q(psi0: &ReducedState, pert: &[f64], gamma: f64) -> Result<f64> {
    if pert.len() != psi0.amps.len() {
        return Err(Error::BasisMismatch {
            expected: psi0.basis.describe(),
            got: format!("perturbation vector of length {}", pert.len()),
        });
    }
    Ok(psi0
        .amps
        .iter()
        .zip(pert)
        .map(|(a, &s)| 4.0 * a.norm_sqr() * (gamma * s / 2.0).sin().powi(2))
        .sum())
}

/// Success floor p (1 - √(q/p))² for a protocol that succeeds with
/// probability p on the unperturbed cost. Vacuous (0) when q > p.
pub fn overlap_floor(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid("p must lie in (0, 1]"));
    }
    if q < 0.0 {
        return Err(Error::invalid("q must be nonnegative"));
    }
    if q > p {
        return Ok(0.0);
    }
    Ok(p * (1.0 - (q / p).sqrt()).powi(2))
}

/// Bush one-round success probability closed form,
/// ¼ |1 + e^(i n pi / 4) 2^(-n/2)|²; converges to 1/4 as n grows.
pub fn bush_qaoa1_closed_form(n: usize) -> f64 {
    let omega = Complex64::from_polar(1.0, n as f64 * FRAC_PI_4);
    0.25 * (Complex64::ONE + omega * (0.5f64).powf(n as f64 / 2.0)).norm_sqr()
}

/// Quasistatic Hamiltonian H(u) = u B + (1 - u) C in the reduced basis.
pub fn hamiltonian_u(inst: &Instance, mixer: &HermitianOperator, u: f64) -> Result<HermitianOperator> {
    let basis = inst.reduced_basis();
    if mixer.basis() != basis {
        return Err(Error::BasisMismatch {
            expected: basis.describe(),
            got: mixer.basis().describe(),
        });
    }
    let cost = cost_vector(inst);
    let repr = match &mixer.repr {
        Repr::Tridiagonal { diag, off } => Repr::Tridiagonal {
            diag: diag
                .iter()
                .zip(&cost)
                .map(|(&b, &c)| u * b + (1.0 - u) * c)
                .collect(),
            off: off.iter().map(|&b| u * b).collect(),
        },
        Repr::Block { diag, off, coupling } => {
            let dim = basis.dimension();
            let scaled = HermitianOperator {
                basis,
                repr: Repr::Block {
                    diag: diag.clone(),
                    off: off.clone(),
                    coupling: *coupling,
                },
                eigen: OnceLock::new(),
            };
            let mut m = DMatrix::from_fn(dim, dim, |i, j| u * scaled.entry(i, j));
            for (i, &c) in cost.iter().enumerate() {
                m[(i, i)] += (1.0 - u) * c;
            }
            Repr::Dense(m)
        }
        _ => return Err(Error::invalid("mixer must be tridiagonal or block form")),
    };
    Ok(HermitianOperator {
        basis,
        repr,
        eigen: OnceLock::new(),
    })
}

/// Schrödinger evolution from the mixer ground state under a piecewise-
/// constant control path, with exact exponentials per piece. Pieces longer
/// than `dt` are split (the exact exponential makes the splits equivalent;
/// the cap bounds per-application phase arguments).
pub fn qao_evolve(
    inst: &Instance,
    mixer: &HermitianOperator,
    path: &ControlPath,
    dt: f64,
) -> Result<(ReducedState, f64)> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt must be positive"));
    }
    let basis = inst.reduced_basis();
    let mut state = plus_state(basis);
    for &(u, duration) in path.pieces() {
        let h = hamiltonian_u(inst, mixer, u)?;
        let chunks = (duration / dt).ceil().max(1.0);
        let step = duration / chunks;
        for _ in 0..chunks as u64 {
            state = h.apply_exp(&state, step)?;
        }
    }
    let success = state.mass_on(&inst.global_minima(basis));
    Ok((state, success))
}

/// Result of a spectral-gap scan over quasistatic controls.
#[derive(Debug, Clone)]
pub struct GapScan {
    /// (u, E1 - E0) over the requested grid.
    pub gaps: Vec<(f64, f64)>,
    /// Minimum gap after local golden-section refinement around the grid argmin.
    pub min_gap: f64,
    pub argmin_u: f64,
    /// Ground state degenerate (gap below 1e-12) at the minimum.
    pub degenerate: bool,
}

/// Gap E1(u) - E0(u) of H(u) = u B + (1 - u) C for each u in the grid, with
/// one golden-section refinement pass around the coarse minimum.
pub fn spectral_gap_scan(
    inst: &Instance,
    mixer: &HermitianOperator,
    grid: &[f64],
) -> Result<GapScan> {
    if grid.is_empty() {
        return Err(Error::invalid("u grid must be nonempty"));
    }
    if grid.iter().any(|&u| !(0.0..=1.0).contains(&u)) {
        return Err(Error::invalid("u grid must lie within [0, 1]"));
    }
    let gap_at = |u: f64| -> Result<f64> {
        let h = hamiltonian_u(inst, mixer, u)?;
        let (e0, e1) = h.lowest_two();
        Ok(e1 - e0)
    };
    let mut gaps = Vec::with_capacity(grid.len());
    for &u in grid {
        gaps.push((u, gap_at(u)?));
    }
    let (mut argmin, _) = gaps
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, g)| (i, g.1))
        .unwrap();
    // golden-section refinement in the bracket around the coarse argmin
    let lo = if argmin == 0 { gaps[0].0 } else { gaps[argmin - 1].0 };
    let hi = if argmin + 1 == gaps.len() {
        gaps[argmin].0
    } else {
        gaps[argmin + 1].0
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = gap_at(x1)?;
    let mut f2 = gap_at(x2)?;
    for _ in 0..80 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = gap_at(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = gap_at(x2)?;
        }
    }
    let (mut min_gap, mut argmin_u) = if f1 < f2 { (f1, x1) } else { (f2, x2) };
    if gaps[argmin].1 < min_gap {
        min_gap = gaps[argmin].1;
        argmin_u = gaps[argmin].0;
    }
    let _ = &mut argmin;
    Ok(GapScan {
        gaps,
        min_gap,
        argmin_u,
        degenerate: min_gap <= 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{cond_index, make_linear, make_ramp, make_spike, BushCost};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn mixer_hamming_elements_and_spectrum() {
        let b = mixer_hamming(2);
        assert_abs_diff_eq!(b.entry(1, 0), -(2f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(b.entry(0, 0), 0.0);
        for n in [1usize, 2, 5, 9] {
            let b = mixer_hamming(n);
            let vals = b.eigenvalues();
            for (k, &v) in vals.iter().enumerate() {
                let expect = -(n as f64) + 2.0 * k as f64;
                assert_abs_diff_eq!(v, expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn mixer_ground_state_is_plus() {
        for n in [3usize, 8] {
            let b = mixer_hamming(n);
            let g = b.ground_state();
            let plus = plus_state(BasisKind::Hamming(n));
            for w in 0..=n {
                assert_abs_diff_eq!(g.amps[w].re, plus.amps[w].re, epsilon = 1e-10);
                assert_abs_diff_eq!(g.amps[w].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mixer_lambda_coupling_and_ground_state() {
        let n = 2;
        let b = mixer_lambda(n, 1.0).unwrap();
        for w in 0..=n {
            assert_abs_diff_eq!(
                b.entry(cond_index(n, 0, w), cond_index(n, 1, w)),
                -3.0,
                epsilon = 1e-15
            );
        }
        // canonical lambda: coupling -1
        let n = 7;
        let b = mixer_lambda(n, 1.0 / (n as f64 + 1.0)).unwrap();
        assert_abs_diff_eq!(
            b.entry(cond_index(n, 0, 3), cond_index(n, 1, 3)),
            -1.0,
            epsilon = 1e-15
        );
        // ground state is uniform over all n+1 bits for any lambda
        for lambda in [0.2, 1.0 / 8.0, 1.0, 3.0] {
            let b = mixer_lambda(n, lambda).unwrap();
            let g = b.ground_state();
            let plus = plus_state(BasisKind::ConditionalHamming(n));
            for j in 0..2 * (n + 1) {
                assert_abs_diff_eq!(g.amps[j].re, plus.amps[j].re, epsilon = 1e-10);
            }
        }
        assert!(mixer_lambda(4, 0.0).is_err());
    }

    #[test]
    fn phase_rotation_examples() {
        let n = 6;
        let plus = plus_state(BasisKind::Hamming(n));
        let cost: Vec<f64> = (0..=n).map(|w| w as f64).collect();
        // gamma = 0: identity
        let s = phase_rotation(&plus, &cost, 0.0).unwrap();
        for w in 0..=n {
            assert_eq!(s.amps[w], plus.amps[w]);
        }
        // constant cost: global phase, probabilities unchanged
        let flat = vec![2.5; n + 1];
        let s = phase_rotation(&plus, &flat, 0.9).unwrap();
        for w in 0..=n {
            assert_abs_diff_eq!(s.probability(w), plus.probability(w), epsilon = 1e-14);
        }
        // ramp, gamma = pi/2: amplitude picks up (-i)^w
        let s = phase_rotation(&plus, &cost, FRAC_PI_2).unwrap();
        for w in 0..=n {
            let expect = plus.amps[w] * Complex64::new(0.0, -1.0).powu(w as u32);
            assert_abs_diff_eq!(s.amps[w].re, expect.re, epsilon = 1e-12);
            assert_abs_diff_eq!(s.amps[w].im, expect.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn mixer_rotation_identity_and_unitarity() {
        let n = 9;
        let b = mixer_hamming(n);
        let plus = plus_state(BasisKind::Hamming(n));
        let s = mixer_rotation(&plus, &b, 0.0).unwrap();
        for w in 0..=n {
            assert_abs_diff_eq!(s.amps[w].re, plus.amps[w].re, epsilon = 1e-12);
        }
        let cost: Vec<f64> = (0..=n).map(|w| (w as f64).sin()).collect();
        let mut state = phase_rotation(&plus, &cost, 1.3).unwrap();
        for beta in [0.3, 1.1, 2.9] {
            state = mixer_rotation(&state, &b, beta).unwrap();
            assert_abs_diff_eq!(state.norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn qaoa_ramp_succeeds_exactly() {
        for n in [4usize, 11, 40, 129] {
            let inst = Instance::Symmetric(make_ramp(n));
            let angles = QaoaAngles::one(FRAC_PI_4, FRAC_PI_2);
            let out = qaoa_run(&inst, &angles, &mixer_hamming(n)).unwrap();
            assert_abs_diff_eq!(out.success, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(out.energy, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn qaoa_bush_closed_form() {
        for n in [6usize, 8, 10, 13, 16, 21] {
            let inst = Instance::Bush(BushCost::new(n));
            let angles = QaoaAngles::one(FRAC_PI_4, FRAC_PI_2);
            let mixer = mixer_lambda(n, 1.0 / (n as f64 + 1.0)).unwrap();
            let out = qaoa_run(&inst, &angles, &mixer).unwrap();
            let expect = bush_qaoa1_closed_form(n);
            assert_abs_diff_eq!(out.success, expect, epsilon = 1e-10);
            assert!((out.success - 0.25).abs() <= 2.0 * (0.5f64).powf(n as f64 / 2.0));
        }
        assert_abs_diff_eq!(bush_qaoa1_closed_form(10), 0.250244140625, epsilon = 1e-9);
    }

    #[test]
    fn qaoa_zero_rounds_gives_initial_overlap() {
        let n = 12;
        let inst = Instance::Symmetric(make_spike(n, 0.5, 1.0).unwrap());
        let angles = QaoaAngles::new(vec![], vec![]).unwrap();
        let out = qaoa_run(&inst, &angles, &mixer_hamming(n)).unwrap();
        // global minimum at w = 0 for the spiked ramp
        let expect = 1.0 / (1u64 << n) as f64;
        assert_abs_diff_eq!(out.success, expect, epsilon = 1e-14);
    }

    #[test]
    fn gamma_star_values() {
        let n = 16;
        assert_abs_diff_eq!(gamma_star(0, n).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma_star(n, n).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gamma_star(n / 2, n).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        assert!(gamma_star(n + 1, n).is_err());
    }

    #[test]
    fn target_weight_matches_closed_form() {
        // w* = 0 on the pure ramp: probability 1
        let out = target_weight_protocol(&make_ramp(20), 0).unwrap();
        assert_abs_diff_eq!(out.simulated, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(out.closed_form, 1.0, epsilon = 1e-15);
        // general w*, including a non-unit slope and offset
        let cost = make_linear(24, 3.0, -0.7);
        for w_star in [0usize, 5, 12, 17, 24] {
            let out = target_weight_protocol(&cost, w_star).unwrap();
            assert_abs_diff_eq!(out.simulated, out.closed_form, epsilon = 1e-9);
        }
        let scan = target_weight_scan(&make_ramp(10)).unwrap();
        assert_eq!(scan.len(), 11);
        assert_abs_diff_eq!(scan[0].simulated, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn weak_overlap_examples() {
        let n = 16;
        let plus = plus_state(BasisKind::Hamming(n));
        let zero = vec![0.0; n + 1];
        assert_eq!(weak_overlap_q(&plus, &zero, 1.7).unwrap(), 0.0);

        // b = 1 at gamma = pi/2: gamma n^b / 2 = 4 pi, resonant, q = 0
        let spike = make_spike(n, 0.5, 1.0).unwrap();
        let q = weak_overlap_q(&plus, spike.pert_part(), FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(q, 0.0, epsilon = 1e-12);

        // b = 0.75: strictly positive, below the window envelope
        let spike = make_spike(n, 0.5, 0.75).unwrap();
        let q = weak_overlap_q(&plus, spike.pert_part(), FRAC_PI_2).unwrap();
        assert!(q > 0.0);
        let envelope: f64 = (0..=n)
            .filter(|&w| spike.pert_part()[w] != 0.0)
            .map(|w| 4.0 * plus.probability(w))
            .sum();
        assert!(q <= envelope);
    }

    #[test]
    fn overlap_floor_values() {
        assert_abs_diff_eq!(overlap_floor(0.37, 0.0).unwrap(), 0.37, epsilon = 1e-15);
        assert_abs_diff_eq!(overlap_floor(1.0, 0.01).unwrap(), 0.81, epsilon = 1e-12);
        assert_eq!(overlap_floor(0.1, 0.2).unwrap(), 0.0);
        assert!(overlap_floor(0.0, 0.1).is_err());
    }

    #[test]
    fn qao_eigenstate_stays_put() {
        let n = 10;
        let inst = Instance::Symmetric(make_ramp(n));
        let mixer = mixer_hamming(n);
        let path = ControlPath::constant(1.0, 5.0).unwrap();
        let (state, _) = qao_evolve(&inst, &mixer, &path, 0.5).unwrap();
        let plus = plus_state(BasisKind::Hamming(n));
        // |overlap| = 1: unchanged up to global phase
        assert_abs_diff_eq!(state.overlap(&plus).norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn qao_slow_ramp_anneals_the_ramp_cost() {
        let n = 8;
        let inst = Instance::Symmetric(make_ramp(n));
        let mixer = mixer_hamming(n);
        let path = crate::control::linear_anneal_path(60.0, 120).unwrap();
        let (_, success) = qao_evolve(&inst, &mixer, &path, 0.5).unwrap();
        assert!(success > 0.9, "success = {success}");
    }

    #[test]
    fn gap_scan_endpoints() {
        let n = 12;
        let inst = Instance::Symmetric(make_ramp(n));
        let mixer = mixer_hamming(n);
        let grid: Vec<f64> = (0..=40).map(|k| k as f64 / 40.0).collect();
        let scan = spectral_gap_scan(&inst, &mixer, &grid).unwrap();
        assert_abs_diff_eq!(scan.gaps.last().unwrap().1, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(scan.gaps[0].1, 1.0, epsilon = 1e-9);
        assert!(scan.min_gap <= scan.gaps.iter().map(|g| g.1).fold(f64::INFINITY, f64::min));
        assert!(!scan.degenerate);
        assert!(spectral_gap_scan(&inst, &mixer, &[]).is_err());
        assert!(spectral_gap_scan(&inst, &mixer, &[1.5]).is_err());
    }

    #[test]
    fn reduced_state_validation() {
        let bad = vec![Complex64::new(0.5, 0.0); 3];
        assert!(ReducedState::new(BasisKind::Hamming(2), bad).is_err());
        let good = vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::ZERO,
        ];
        let s = ReducedState::new(BasisKind::Hamming(2), good).unwrap();
        assert_abs_diff_eq!(s.probability(1), 0.64, epsilon = 1e-15);
    }
}
