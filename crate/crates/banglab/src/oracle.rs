//! Brute-force reference implementations over all 2^nbits strings, used to
//! validate the reduced-basis fast paths at small n. Nothing here is clever:
//! per-qubit rotations, matrix-free operator application, and an RK4
//! integrator that shares no code with the production evolution.

use crate::control::{ControlPath, QaoaAngles};
use crate::error::{Error, Result};
use crate::landscape::{BasisKind, Instance};
use num_complex::Complex64;

/// Largest brute-force register we allow (dimension 4096).
pub const ORACLE_MAX_BITS: usize = 12;

fn nbits_of(inst: &Instance) -> Result<usize> {
    match inst.full_basis() {
        BasisKind::Full(nbits) if nbits <= ORACLE_MAX_BITS => Ok(nbits),
        BasisKind::Full(nbits) => Err(Error::DimensionOverflow(1 << nbits, 1 << ORACLE_MAX_BITS)),
        _ => unreachable!(),
    }
}

/// Per-bit mixer weights w_b in B = -Σ_b w_b X_b: all ones for symmetric
/// instances; for the bush, weight lambda (n+1) on the central bit (bit 0).
pub fn mixer_weights(inst: &Instance, lambda: Option<f64>) -> Result<Vec<f64>> {
    let nbits = nbits_of(inst)?;
    match inst {
        Instance::Symmetric(_) => Ok(vec![1.0; nbits]),
        Instance::Bush(b) => {
            let lambda = lambda.unwrap_or(1.0 / (b.n() as f64 + 1.0));
            let mut w = vec![1.0; nbits];
            w[0] = lambda * (b.n() as f64 + 1.0);
            Ok(w)
        }
    }
}

/// |+⟩^⊗nbits as a full amplitude vector.
pub fn full_plus(nbits: usize) -> Vec<Complex64> {
    let dim = 1usize << nbits;
    vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim]
}

/// In-place e^(-i gamma C) on the full register.
pub fn full_phase(amps: &mut [Complex64], inst: &Instance, gamma: f64) {
    for (z, a) in amps.iter_mut().enumerate() {
        *a *= Complex64::from_polar(1.0, -gamma * inst.cost_string(z as u64));
    }
}

/// In-place e^(-i beta B) with B = -Σ_b w_b X_b, applied as commuting
/// per-qubit rotations e^(+i beta w_b X_b).
pub fn full_mixer_rotation(amps: &mut [Complex64], nbits: usize, beta: f64, weights: &[f64]) {
    assert_eq!(weights.len(), nbits);
    for (bit, &w) in weights.iter().enumerate() {
        let (c, s) = ((beta * w).cos(), (beta * w).sin());
        let is = Complex64::new(0.0, s);
        let mask = 1usize << bit;
        for z in 0..amps.len() {
            if z & mask == 0 {
                let z1 = z | mask;
                let (a0, a1) = (amps[z], amps[z1]);
                amps[z] = c * a0 + is * a1;
                amps[z1] = is * a0 + c * a1;
            }
        }
    }
}

/// Matrix-free y = B x with B = -Σ_b w_b X_b.
pub fn apply_mixer(x: &[Complex64], y: &mut [Complex64], nbits: usize, weights: &[f64]) {
    y.iter_mut().for_each(|v| *v = Complex64::ZERO);
    for (bit, &w) in weights.iter().enumerate() {
        let mask = 1usize << bit;
        for z in 0..x.len() {
            y[z] -= w * x[z ^ mask];
        }
    }
    let _ = nbits;
}

/// Full-register QAOA: measurement probabilities over all strings.
pub fn full_qaoa_probs(
    inst: &Instance,
    angles: &QaoaAngles,
    lambda: Option<f64>,
) -> Result<Vec<f64>> {
    let nbits = nbits_of(inst)?;
    let weights = mixer_weights(inst, lambda)?;
    let mut amps = full_plus(nbits);
    for round in 0..angles.rounds() {
        full_phase(&mut amps, inst, angles.gammas[round]);
        full_mixer_rotation(&mut amps, nbits, angles.betas[round], &weights);
    }
    Ok(amps.iter().map(|a| a.norm_sqr()).collect())
}

/// Aggregate full-register probabilities into the reduced basis.
pub fn reduce_probs(inst: &Instance, full: &[f64]) -> Vec<f64> {
    let dim = inst.reduced_basis().dimension();
    let mut out = vec![0.0; dim];
    for (z, &p) in full.iter().enumerate() {
        out[inst.reduce_string(z as u64)] += p;
    }
    out
}

/// ⟨i| P B P† |j⟩: the mixer element between normalized uniform
/// superpositions over the strings of reduced labels i and j, computed
/// against the full operator. Validates the closed-form reduced matrix
/// elements.
pub fn projected_mixer_element(
    inst: &Instance,
    lambda: Option<f64>,
    label_i: usize,
    label_j: usize,
) -> Result<f64> {
    let nbits = nbits_of(inst)?;
    let weights = mixer_weights(inst, lambda)?;
    let dim = 1usize << nbits;
    let basis_vec = |label: usize| -> Vec<Complex64> {
        let members: Vec<usize> = (0..dim)
            .filter(|&z| inst.reduce_string(z as u64) == label)
            .collect();
        let a = 1.0 / (members.len() as f64).sqrt();
        let mut v = vec![Complex64::ZERO; dim];
        for z in members {
            v[z] = Complex64::new(a, 0.0);
        }
        v
    };
    let vi = basis_vec(label_i);
    let vj = basis_vec(label_j);
    let mut bvj = vec![Complex64::ZERO; dim];
    apply_mixer(&vj, &mut bvj, nbits, &weights);
    Ok(vi
        .iter()
        .zip(&bvj)
        .map(|(a, b)| (a.conj() * b).re)
        .sum())
}

/// Full-register Schrödinger evolution under H(u) = u B + (1-u) C along a
/// piecewise-constant path, integrated with classic RK4 at step `dt`.
/// Starts from |+⟩^⊗nbits and returns measurement probabilities.
pub fn full_qao_probs(
    inst: &Instance,
    lambda: Option<f64>,
    path: &ControlPath,
    dt: f64,
) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt must be positive"));
    }
    let nbits = nbits_of(inst)?;
    let weights = mixer_weights(inst, lambda)?;
    let dim = 1usize << nbits;
    let cost: Vec<f64> = (0..dim).map(|z| inst.cost_string(z as u64)).collect();
    let mut psi = full_plus(nbits);
    let mut scratch = vec![Complex64::ZERO; dim];
    // dpsi/dt = -i (u B + (1-u) C) psi
    let rhs = |u: f64, x: &[Complex64], out: &mut Vec<Complex64>, tmp: &mut Vec<Complex64>| {
        apply_mixer(x, tmp, nbits, &weights);
        for z in 0..dim {
            let h = u * tmp[z] + (1.0 - u) * cost[z] * x[z];
            out[z] = Complex64::new(h.im, -h.re); // -i * h
        }
    };
    let mut k1 = vec![Complex64::ZERO; dim];
    let mut k2 = vec![Complex64::ZERO; dim];
    let mut k3 = vec![Complex64::ZERO; dim];
    let mut k4 = vec![Complex64::ZERO; dim];
    let mut stage = vec![Complex64::ZERO; dim];
    for &(u, duration) in path.pieces() {
        let steps = (duration / dt).ceil().max(1.0);
        let h = duration / steps;
        for _ in 0..steps as u64 {
            rhs(u, &psi, &mut k1, &mut scratch);
            for z in 0..dim {
                stage[z] = psi[z] + 0.5 * h * k1[z];
            }
            rhs(u, &stage, &mut k2, &mut scratch);
            for z in 0..dim {
                stage[z] = psi[z] + 0.5 * h * k2[z];
            }
            rhs(u, &stage, &mut k3, &mut scratch);
            for z in 0..dim {
                stage[z] = psi[z] + h * k3[z];
            }
            rhs(u, &stage, &mut k4, &mut scratch);
            for z in 0..dim {
                psi[z] += h / 6.0 * (k1[z] + 2.0 * k2[z] + 2.0 * k3[z] + k4[z]);
            }
        }
    }
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!("RK4 norm drift {:.2e}", norm - 1.0)));
    }
    Ok(psi.iter().map(|a| a.norm_sqr() / norm).collect())
}

/// One named equivalence check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn random_symmetric_instance(rng: &mut impl rand::Rng) -> Instance {
    let n = rng.random_range(4..=10usize);
    let values: Vec<f64> = (0..=n).map(|_| rng.random_range(0.0..5.0)).collect();
    let zeros = vec![0.0; n + 1];
    Instance::Symmetric(
        crate::landscape::SymmetricCost::from_parts(
            values,
            zeros,
            crate::landscape::CostKind::Custom,
        )
        .expect("valid cost"),
    )
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// The full brute-force equivalence suite: lumped classical generators,
/// reduced-basis QAOA, and QAO evolution against their Full-basis
/// counterparts, on random symmetric costs plus the bush. Used by the
/// `oracle-check` subcommand and the acceptance tests.
pub fn run_oracle_suite(seed: u64) -> Vec<CheckOutcome> {
    use crate::classical::{evolve_exact, linear_update_generator, metropolis_generator, ProbDist};
    use crate::control::linear_anneal_path;
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut instances: Vec<Instance> = (0..20).map(|_| random_symmetric_instance(&mut rng)).collect();
    instances.push(Instance::Bush(crate::landscape::BushCost::new(5)));
    instances.push(Instance::Bush(crate::landscape::BushCost::new(8)));

    let mut outcomes = Vec::new();
    fn record(outcomes: &mut Vec<CheckOutcome>, name: &str, max_err: f64, tol: f64) {
        outcomes.push(CheckOutcome {
            passed: max_err <= tol,
            detail: format!("max |Δ| = {max_err:.3e} (tolerance {tol:.0e})"),
            name: name.to_string(),
        });
    }

    // (i) classical lumping: Metropolis and linear-update generators
    let mut worst_classical = 0.0f64;
    let mut classical_err: Option<String> = None;
    for inst in &instances {
        let p0_full = ProbDist::uniform_strings(inst.full_basis());
        let p0_red = ProbDist::uniform_strings(inst.reduced_basis());
        let gens: Vec<(String, _, _)> = [0.0, 0.7, f64::INFINITY]
            .iter()
            .map(|&tau| {
                (
                    format!("tau={tau}"),
                    metropolis_generator(inst, inst.full_basis(), tau),
                    metropolis_generator(inst, inst.reduced_basis(), tau),
                )
            })
            .chain([0.0, 0.5, 1.0].iter().map(|&u| {
                (
                    format!("u={u}"),
                    linear_update_generator(inst, inst.full_basis(), u),
                    linear_update_generator(inst, inst.reduced_basis(), u),
                )
            }))
            .collect();
        for (label, full_gen, red_gen) in gens {
            let result = (|| -> crate::error::Result<f64> {
                let pf = evolve_exact(&p0_full, &full_gen?, 2.0)?;
                let pr = evolve_exact(&p0_red, &red_gen?, 2.0)?;
                Ok(max_abs_diff(&reduce_probs(inst, &pf.probs), &pr.probs))
            })();
            match result {
                Ok(d) => worst_classical = worst_classical.max(d),
                Err(e) => classical_err = Some(format!("{label}: {e}")),
            }
        }
    }
    if let Some(e) = classical_err {
        outcomes.push(CheckOutcome {
            name: "classical generator lumping".into(),
            passed: false,
            detail: e,
        });
    } else {
        record(&mut outcomes, "classical generator lumping", worst_classical, 1e-9);
    }

    // (ii) QAOA p <= 3 with random angles
    let mut worst_qaoa = 0.0f64;
    for inst in &instances {
        let p = rng.random_range(1..=3usize);
        let betas: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
        let gammas: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect();
        let angles = QaoaAngles::new(betas, gammas).expect("equal lengths");
        let lambda = match inst {
            Instance::Bush(b) => Some(if rng.random_range(0..2) == 0 {
                1.0
            } else {
                1.0 / (b.n() as f64 + 1.0)
            }),
            _ => None,
        };
        let full = full_qaoa_probs(inst, &angles, lambda).expect("small register");
        let agg = reduce_probs(inst, &full);
        let mixer = match (inst, lambda) {
            (Instance::Bush(b), Some(l)) => crate::quantum::mixer_lambda(b.n(), l).unwrap(),
            (Instance::Symmetric(c), _) => crate::quantum::mixer_hamming(c.n()),
            _ => unreachable!(),
        };
        let out = crate::quantum::qaoa_run(inst, &angles, &mixer).expect("reduced run");
        let reduced: Vec<f64> = (0..agg.len()).map(|j| out.state.probability(j)).collect();
        worst_qaoa = worst_qaoa.max(max_abs_diff(&agg, &reduced));
    }
    record(&mut outcomes, "reduced-basis QAOA", worst_qaoa, 1e-9);

    // (iii) QAO evolution
    let mut worst_qao = 0.0f64;
    for inst in instances.iter().step_by(3) {
        let path = linear_anneal_path(5.0, 10).expect("valid path");
        let lambda = matches!(inst, Instance::Bush(_)).then(|| 1.0);
        let full = full_qao_probs(inst, lambda, &path, 5e-4).expect("RK4");
        let agg = reduce_probs(inst, &full);
        let mixer = match (inst, lambda) {
            (Instance::Bush(b), Some(l)) => crate::quantum::mixer_lambda(b.n(), l).unwrap(),
            (Instance::Symmetric(c), _) => crate::quantum::mixer_hamming(c.n()),
            _ => unreachable!(),
        };
        let (state, _) = crate::quantum::qao_evolve(inst, &mixer, &path, 1.0).expect("reduced");
        let reduced: Vec<f64> = (0..agg.len()).map(|j| state.probability(j)).collect();
        worst_qao = worst_qao.max(max_abs_diff(&agg, &reduced));
    }
    record(&mut outcomes, "QAO Schrödinger evolution", worst_qao, 1e-7);

    outcomes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{cond_index, make_spike, BushCost};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn projected_mixer_matches_closed_form_symmetric() {
        for n in [2usize, 5, 9] {
            let inst = Instance::Symmetric(crate::landscape::make_ramp(n));
            let b = crate::quantum::mixer_hamming(n);
            for w1 in 0..=n {
                for w2 in 0..=n {
                    let full = projected_mixer_element(&inst, None, w1, w2).unwrap();
                    assert_abs_diff_eq!(full, b.entry(w1, w2), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn projected_mixer_matches_closed_form_bush() {
        let n = 5;
        let inst = Instance::Bush(BushCost::new(n));
        for lambda in [1.0, 1.0 / (n as f64 + 1.0), 0.3] {
            let b = crate::quantum::mixer_lambda(n, lambda).unwrap();
            let dim = 2 * (n + 1);
            for i in 0..dim {
                for j in 0..dim {
                    let full = projected_mixer_element(&inst, Some(lambda), i, j).unwrap();
                    assert_abs_diff_eq!(full, b.entry(i, j), epsilon = 1e-12);
                }
            }
        }
        // sanity: the n=2, lambda=1 central coupling really is -3
        let inst = Instance::Bush(BushCost::new(2));
        let e = projected_mixer_element(&inst, Some(1.0), cond_index(2, 0, 1), cond_index(2, 1, 1))
            .unwrap();
        assert_abs_diff_eq!(e, -3.0, epsilon = 1e-12);
    }

    #[test]
    fn full_qaoa_matches_reduced_symmetric() {
        let n = 8;
        let cost = make_spike(n, 0.5, 0.75).unwrap();
        let inst = Instance::Symmetric(cost);
        let angles = QaoaAngles::new(vec![FRAC_PI_4, 0.3], vec![FRAC_PI_2, 1.1]).unwrap();
        let full = full_qaoa_probs(&inst, &angles, None).unwrap();
        let agg = reduce_probs(&inst, &full);
        let out = crate::quantum::qaoa_run(&inst, &angles, &crate::quantum::mixer_hamming(n)).unwrap();
        for w in 0..=n {
            assert_abs_diff_eq!(agg[w], out.state.probability(w), epsilon = 1e-9);
        }
    }

    #[test]
    fn full_qaoa_matches_reduced_bush() {
        let n = 7;
        let inst = Instance::Bush(BushCost::new(n));
        for lambda in [1.0 / (n as f64 + 1.0), 1.0] {
            let angles = QaoaAngles::one(FRAC_PI_4, FRAC_PI_2);
            let full = full_qaoa_probs(&inst, &angles, Some(lambda)).unwrap();
            let agg = reduce_probs(&inst, &full);
            let mixer = crate::quantum::mixer_lambda(n, lambda).unwrap();
            let out = crate::quantum::qaoa_run(&inst, &angles, &mixer).unwrap();
            for j in 0..2 * (n + 1) {
                assert_abs_diff_eq!(agg[j], out.state.probability(j), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn full_qao_matches_reduced() {
        let n = 6;
        let inst = Instance::Symmetric(make_spike(n, 0.5, 1.0).unwrap());
        let path = crate::control::linear_anneal_path(8.0, 16).unwrap();
        let full = full_qao_probs(&inst, None, &path, 1e-3).unwrap();
        let agg = reduce_probs(&inst, &full);
        let mixer = crate::quantum::mixer_hamming(n);
        let (state, _) = crate::quantum::qao_evolve(&inst, &mixer, &path, 0.5).unwrap();
        for w in 0..=n {
            assert_abs_diff_eq!(agg[w], state.probability(w), epsilon = 1e-7);
        }
    }

    #[test]
    fn full_classical_evolution_matches_reduced() {
        use crate::classical::{evolve_exact, metropolis_generator, ProbDist};
        let cases = [
            Instance::Symmetric(make_spike(7, 0.5, 0.75).unwrap()),
            Instance::Bush(BushCost::new(5)),
        ];
        for inst in &cases {
            for tau in [0.0, 0.8, f64::INFINITY] {
                let full_gen = metropolis_generator(inst, inst.full_basis(), tau).unwrap();
                let red_gen = metropolis_generator(inst, inst.reduced_basis(), tau).unwrap();
                let t = 2.7;
                let pf = evolve_exact(
                    &ProbDist::uniform_strings(inst.full_basis()),
                    &full_gen,
                    t,
                )
                .unwrap();
                let pr = evolve_exact(
                    &ProbDist::uniform_strings(inst.reduced_basis()),
                    &red_gen,
                    t,
                )
                .unwrap();
                let agg = reduce_probs(inst, &pf.probs);
                for (j, &p) in pr.probs.iter().enumerate() {
                    assert_abs_diff_eq!(agg[j], p, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn oracle_rejects_large_registers() {
        let inst = Instance::Symmetric(crate::landscape::make_ramp(20));
        assert!(matches!(
            full_qaoa_probs(&inst, &QaoaAngles::one(0.1, 0.1), None),
            Err(Error::DimensionOverflow(_, _))
        ));
    }
}
