//! Cost landscapes over Hamming weights, the quasi-symmetric bush instance,
//! and the reduced bases both dynamics modules run in.

use crate::error::{Error, Result};
use std::fs;
use std::path::Path;

/// Hamming weight of a bit sequence (entries treated as 0 / nonzero).
pub fn hamming_weight(bits: &[u8]) -> usize {
    bits.iter().filter(|&&b| b != 0).count()
}

/// Hamming weight of the low `n` bits of a packed string.
pub fn string_weight(z: u64, n: usize) -> usize {
    (z & mask(n)).count_ones() as usize
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// How a symmetric cost was constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostKind {
    PureRamp,
    Spike { a: f64, b: f64 },
    Custom,
}

/// A permutation-symmetric cost on `w in 0..=n`, stored with its
/// ramp + perturbation decomposition `c(w) = r(w) + s(w)`.
#[derive(Debug, Clone)]
pub struct SymmetricCost {
    n: usize,
    values: Vec<f64>,
    ramp_part: Vec<f64>,
    pert_part: Vec<f64>,
    kind: CostKind,
}

impl SymmetricCost {
    /// Build from an explicit decomposition; `values` is their sum.
    pub fn from_parts(ramp_part: Vec<f64>, pert_part: Vec<f64>, kind: CostKind) -> Result<Self> {
        if ramp_part.is_empty() || ramp_part.len() != pert_part.len() {
            return Err(Error::invalid("ramp and perturbation lengths must match and be >= 1"));
        }
        let n = ramp_part.len() - 1;
        let values = ramp_part
            .iter()
            .zip(&pert_part)
            .map(|(r, s)| r + s)
            .collect();
        Ok(Self {
            n,
            values,
            ramp_part,
            pert_part,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> CostKind {
        self.kind
    }

    /// c(w)
    pub fn value(&self, w: usize) -> f64 {
        self.values[w]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// r(w)
    pub fn ramp_part(&self) -> &[f64] {
        &self.ramp_part
    }

    /// s(w)
    pub fn pert_part(&self) -> &[f64] {
        &self.pert_part
    }

    /// All weights attaining the minimum cost (ties included).
    pub fn global_minima(&self) -> Vec<usize> {
        global_minima_of(&self.values)
    }

    /// Slope and offset if the ramp part is exactly linear in `w`.
    pub fn linear_ramp_coefficients(&self) -> Option<(f64, f64)> {
        let c0 = self.ramp_part[0];
        if self.n == 0 {
            return Some((c0, 0.0));
        }
        let c1 = self.ramp_part[1] - c0;
        for (w, r) in self.ramp_part.iter().enumerate() {
            if (r - (c0 + c1 * w as f64)).abs() > 1e-9 {
                return None;
            }
        }
        Some((c0, c1))
    }

    /// Load a custom cost from a plain-text table: one line per `w`, columns
    /// `w c(w) [r(w) s(w)]`, whitespace separated. A missing decomposition
    /// defaults to `r = c`, `s = 0`. Lines starting with `#` are skipped.
    pub fn from_table_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_table_str(&text)
    }

    pub fn from_table_str(text: &str) -> Result<Self> {
        let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 && cols.len() != 4 {
                return Err(Error::invalid(format!(
                    "table line {}: expected `w c` or `w c r s`, got {} columns",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| Error::invalid(format!("table line {}: bad number `{s}`", lineno + 1)))
            };
            let w: usize = cols[0]
                .parse()
                .map_err(|_| Error::invalid(format!("table line {}: bad weight `{}`", lineno + 1, cols[0])))?;
            let c = parse(cols[1])?;
            let (r, s) = if cols.len() == 4 {
                (parse(cols[2])?, parse(cols[3])?)
            } else {
                (c, 0.0)
            };
            if (r + s - c).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "table line {}: r + s = {} does not equal c = {}",
                    lineno + 1,
                    r + s,
                    c
                )));
            }
            rows.push((w, c, r, s));
        }
        if rows.is_empty() {
            return Err(Error::invalid("empty cost table"));
        }
        rows.sort_by_key(|r| r.0);
        let n = rows.len() - 1;
        for (i, row) in rows.iter().enumerate() {
            if row.0 != i {
                return Err(Error::invalid(format!(
                    "table must cover every w in 0..={n} exactly once (missing or duplicate w = {i})"
                )));
            }
        }
        let ramp = rows.iter().map(|r| r.2).collect();
        let pert = rows.iter().map(|r| r.3).collect();
        Self::from_parts(ramp, pert, CostKind::Custom)
    }
}

/// The pure Hamming ramp `c(w) = w`.
pub fn make_ramp(n: usize) -> SymmetricCost {
    assert!(n >= 1, "ramp needs n >= 1");
    let ramp = (0..=n).map(|w| w as f64).collect();
    let pert = vec![0.0; n + 1];
    SymmetricCost::from_parts(ramp, pert, CostKind::PureRamp).expect("lengths match")
}

/// A linear ramp `c(w) = c0 + c1 * w` with zero perturbation.
pub fn make_linear(n: usize, c0: f64, c1: f64) -> SymmetricCost {
    let ramp = (0..=n).map(|w| c0 + c1 * w as f64).collect();
    let pert = vec![0.0; n + 1];
    SymmetricCost::from_parts(ramp, pert, CostKind::Custom).expect("lengths match")
}

/// Hamming ramp with a rectangular spike of height `n^b` on the window
/// `|w - n/4| <= n^a / 2` (real-valued bounds, both ends inclusive).
pub fn make_spike(n: usize, a: f64, b: f64) -> Result<SymmetricCost> {
    if n < 4 {
        return Err(Error::invalid("spike needs n >= 4"));
    }
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(Error::invalid("spike exponents a, b must lie in [0, 1]"));
    }
    let center = n as f64 / 4.0;
    let half_width = (n as f64).powf(a) / 2.0;
    let height = (n as f64).powf(b);
    let ramp: Vec<f64> = (0..=n).map(|w| w as f64).collect();
    let pert: Vec<f64> = (0..=n)
        .map(|w| {
            if (w as f64 - center).abs() <= half_width {
                height
            } else {
                0.0
            }
        })
        .collect();
    SymmetricCost::from_parts(ramp, pert, CostKind::Spike { a, b })
}

/// The bush-of-implications instance: one central bit `z0` plus `n`
/// peripheral bits; constant cost 1 when `z0 = 1`, Hamming ramp when `z0 = 0`.
#[derive(Debug, Clone, Copy)]
pub struct BushCost {
    n: usize,
}

impl BushCost {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        Self { n }
    }

    /// Number of peripheral bits (total bits = n + 1).
    pub fn n(&self) -> usize {
        self.n
    }

    /// `c(z0, w) = z0 + w (1 - z0)`
    pub fn cost(&self, z0: u8, w: usize) -> Result<f64> {
        if w > self.n {
            return Err(Error::invalid(format!("peripheral weight {w} > n = {}", self.n)));
        }
        let z0 = f64::from(z0.min(1));
        Ok(z0 + w as f64 * (1.0 - z0))
    }
}

/// Reduced (or full) basis a distribution / state lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `n + 1` states labeled by Hamming weight.
    Hamming(usize),
    /// `2 (n + 1)` states labeled `(z0, w)`; index = `z0 * (n + 1) + w`.
    ConditionalHamming(usize),
    /// All `2^n` bit strings; brute-force oracle use only (n <= 12).
    Full(usize),
}

impl BasisKind {
    pub fn dimension(&self) -> usize {
        match *self {
            BasisKind::Hamming(n) => n + 1,
            BasisKind::ConditionalHamming(n) => 2 * (n + 1),
            BasisKind::Full(n) => 1usize << n,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            BasisKind::Hamming(n) => format!("Hamming({n})"),
            BasisKind::ConditionalHamming(n) => format!("ConditionalHamming({n})"),
            BasisKind::Full(n) => format!("Full({n})"),
        }
    }
}

/// Index of `(z0, w)` in the conditional Hamming basis.
pub fn cond_index(n: usize, z0: u8, w: usize) -> usize {
    usize::from(z0.min(1)) * (n + 1) + w
}

/// Inverse of [`cond_index`].
pub fn cond_label(n: usize, idx: usize) -> (u8, usize) {
    if idx <= n {
        (0, idx)
    } else {
        (1, idx - (n + 1))
    }
}

/// Any instance the lab can run: a symmetric cost or the bush.
#[derive(Debug, Clone)]
pub enum Instance {
    Symmetric(SymmetricCost),
    Bush(BushCost),
}

impl Instance {
    /// The natural reduced basis for this instance.
    pub fn reduced_basis(&self) -> BasisKind {
        match self {
            Instance::Symmetric(c) => BasisKind::Hamming(c.n()),
            Instance::Bush(b) => BasisKind::ConditionalHamming(b.n()),
        }
    }

    /// The brute-force basis: all bit strings (n + 1 bits for the bush,
    /// central bit stored at bit 0).
    pub fn full_basis(&self) -> BasisKind {
        match self {
            Instance::Symmetric(c) => BasisKind::Full(c.n()),
            Instance::Bush(b) => BasisKind::Full(b.n() + 1),
        }
    }

    /// Cost of a reduced-basis label.
    pub fn cost_label(&self, basis: BasisKind, idx: usize) -> f64 {
        match (self, basis) {
            (Instance::Symmetric(c), BasisKind::Hamming(_)) => c.value(idx),
            (Instance::Bush(b), BasisKind::ConditionalHamming(n)) => {
                let (z0, w) = cond_label(n, idx);
                b.cost(z0, w).expect("label in range")
            }
            (_, BasisKind::Full(_)) => self.cost_string(idx as u64),
            _ => panic!("basis {} does not fit instance", basis.describe()),
        }
    }

    /// Cost of a packed bit string in the full basis.
    pub fn cost_string(&self, z: u64) -> f64 {
        match self {
            Instance::Symmetric(c) => c.value(string_weight(z, c.n())),
            Instance::Bush(b) => {
                let z0 = (z & 1) as u8;
                let w = string_weight(z >> 1, b.n());
                b.cost(z0, w).expect("in range")
            }
        }
    }

    /// Reduced-basis label a full-basis string aggregates into.
    pub fn reduce_string(&self, z: u64) -> usize {
        match self {
            Instance::Symmetric(c) => string_weight(z, c.n()),
            Instance::Bush(b) => {
                let z0 = (z & 1) as u8;
                let w = string_weight(z >> 1, b.n());
                cond_index(b.n(), z0, w)
            }
        }
    }

    /// Labels attaining minimum cost in the given basis; ties all reported.
    pub fn global_minima(&self, basis: BasisKind) -> Vec<usize> {
        let dim = basis.dimension();
        let costs: Vec<f64> = (0..dim).map(|i| self.cost_label(basis, i)).collect();
        global_minima_of(&costs)
    }
}

fn global_minima_of(values: &[f64]) -> Vec<usize> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == min)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hamming_weight_examples() {
        assert_eq!(hamming_weight(&[0, 0, 0, 0]), 0);
        assert_eq!(hamming_weight(&[1, 0, 1, 1]), 3);
        assert_eq!(hamming_weight(&[1; 17]), 17);
    }

    #[test]
    fn spike_window_and_values() {
        // n = 16, a = 0.5, b = 1: window w in {2..6}, c(4) = 4 + 16 = 20
        let c = make_spike(16, 0.5, 1.0).unwrap();
        for w in 0..=16 {
            let expected = if (2..=6).contains(&w) { w as f64 + 16.0 } else { w as f64 };
            assert_eq!(c.value(w), expected, "w = {w}");
        }
        assert_eq!(c.value(0), 0.0);
        assert_eq!(c.value(16), 16.0);

        // n = 16, a = 0, b = 0: window width 1, c(4) = 4 + 1 = 5
        let c = make_spike(16, 0.0, 0.0).unwrap();
        assert_eq!(c.value(4), 5.0);
        assert_eq!(c.value(3), 3.0);
        assert_eq!(c.value(5), 5.0);
    }

    #[test]
    fn spike_rejects_bad_exponents() {
        assert!(make_spike(16, -0.1, 0.5).is_err());
        assert!(make_spike(16, 0.5, 1.5).is_err());
        assert!(make_spike(2, 0.5, 0.5).is_err());
    }

    #[test]
    fn ramp_values() {
        let c = make_ramp(4);
        assert_eq!(c.values(), &[0.0, 1.0, 2.0, 3.0, 4.0]);
        let c = make_ramp(1);
        assert_eq!(c.values(), &[0.0, 1.0]);
        assert_eq!(c.global_minima(), vec![0]);
    }

    #[test]
    fn bush_cost_values() {
        let b = BushCost::new(8);
        assert_eq!(b.cost(1, 7).unwrap(), 1.0);
        assert_eq!(b.cost(0, 0).unwrap(), 0.0);
        assert_eq!(b.cost(0, 5).unwrap(), 5.0);
        assert!(b.cost(0, 9).is_err());
    }

    #[test]
    fn global_minima_examples() {
        assert_eq!(make_ramp(8).global_minima(), vec![0]);
        let bush = Instance::Bush(BushCost::new(8));
        assert_eq!(bush.global_minima(bush.reduced_basis()), vec![cond_index(8, 0, 0)]);
        let spike = make_spike(16, 0.5, 1.0).unwrap();
        assert_eq!(spike.global_minima(), vec![0]);
    }

    #[test]
    fn table_roundtrip() {
        let text = "# custom\n0 1.5 1.0 0.5\n1 2.0 2.0 0.0\n2 0.5\n";
        let c = SymmetricCost::from_table_str(text).unwrap();
        assert_eq!(c.n(), 2);
        assert_eq!(c.value(0), 1.5);
        assert_eq!(c.ramp_part()[0], 1.0);
        assert_eq!(c.pert_part()[0], 0.5);
        assert_eq!(c.value(2), 0.5);
        assert_eq!(c.ramp_part()[2], 0.5);
        assert_eq!(c.global_minima(), vec![2]);
        assert!(SymmetricCost::from_table_str("0 1\n2 3\n").is_err());
        assert!(SymmetricCost::from_table_str("0 1 2 3\n").is_err());
    }

    #[test]
    fn basis_dimensions() {
        assert_eq!(BasisKind::Hamming(8).dimension(), 9);
        assert_eq!(BasisKind::ConditionalHamming(8).dimension(), 18);
        assert_eq!(BasisKind::Full(10).dimension(), 1024);
    }

    #[test]
    fn bush_sector_comparison() {
        // cost(0, w) < cost(1, w) iff w < 1; (0,0) is the unique minimum
        let b = BushCost::new(12);
        for w in 0..=12 {
            let lower = b.cost(0, w).unwrap() < b.cost(1, w).unwrap();
            assert_eq!(lower, w < 1);
        }
    }

    proptest! {
        #[test]
        fn decomposition_is_exact(n in 1usize..40, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let n = n.max(4);
            let c = make_spike(n, a, b).unwrap();
            for w in 0..=n {
                prop_assert_eq!(c.value(w), c.ramp_part()[w] + c.pert_part()[w]);
            }
        }

        #[test]
        fn complement_weight(bits in proptest::collection::vec(0u8..2, 0..64)) {
            let n = bits.len();
            let comp: Vec<u8> = bits.iter().map(|b| 1 - b).collect();
            prop_assert_eq!(hamming_weight(&bits) + hamming_weight(&comp), n);
        }

        #[test]
        fn spike_keeps_argmin_when_window_excludes_zero(n in 8usize..80, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            // window excludes w = 0 whenever n/4 - n^a/2 > 0
            if n as f64 / 4.0 - (n as f64).powf(a) / 2.0 > 0.0 {
                let c = make_spike(n, a, b).unwrap();
                prop_assert_eq!(c.global_minima(), make_ramp(n).global_minima());
            }
        }
    }
}
