//! Evolution of Fock states through lossless linear-optical networks.
//!
//! A [`Transform`] is an M×M unitary acting on creation operators: input mode
//! `i` maps to `Σ_j matrix[(j, i)] · (output mode j)`. Applying it to a state
//! expands each basis term symbolically, with the exact multinomial
//! combinatorics and factorial normalization of Fock states. An independent
//! permanent-based amplitude ([`Transform::transition_amplitude`]) serves as
//! an oracle for that expansion, and [`FockState::post_select`] implements
//! conditioning on photon counts at detector modes.

use std::collections::BTreeMap;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeId, ModeRegistry, Occupation};

/// Constructors reject matrices whose unitarity deviation exceeds this.
pub const UNITARITY_TOL: f64 = 1e-12;

fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// A lossless linear-optical network over a mode registry.
#[derive(Clone, Debug)]
pub struct Transform {
    matrix: Array2<C64>,
    registry: ModeRegistry,
}

impl Transform {
    /// Wrap a creation-operator matrix, rejecting non-unitary input rather
    /// than repairing it.
    pub fn new(matrix: Array2<C64>, registry: ModeRegistry) -> Result<Self> {
        if matrix.nrows() != registry.len() || matrix.ncols() != registry.len() {
            return Err(Error::LengthMismatch {
                expected: registry.len(),
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation > UNITARITY_TOL {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(Self { matrix, registry })
    }

    pub fn identity(registry: ModeRegistry) -> Self {
        let n = registry.len();
        Self {
            matrix: Array2::from_shape_fn((n, n), |(i, j)| {
                if i == j {
                    C64::ONE
                } else {
                    C64::ZERO
                }
            }),
            registry,
        }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    /// Matrix entry (output mode row, input mode column).
    pub fn entry(&self, out: usize, input: usize) -> C64 {
        self.matrix[(out, input)]
    }

    /// Composition: apply `self` first, then `later`.
    pub fn then(&self, later: &Self) -> Result<Self> {
        if self.registry != later.registry {
            return Err(Error::RegistryMismatch);
        }
        Self::new(later.matrix.dot(&self.matrix), self.registry.clone())
    }

    /// Largest entry-wise difference against another transform.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Evolve a state through the network by symbolic multinomial expansion.
    /// Photon number per sector and the squared norm are preserved.
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        if state.registry() != &self.registry {
            return Err(Error::RegistryMismatch);
        }
        let m = self.registry.len();
        // Nonzero rows per column, so sparse elements stay cheap to expand.
        let nonzero_rows: Vec<Vec<usize>> = (0..m)
            .map(|col| {
                (0..m)
                    .filter(|&row| self.matrix[(row, col)] != C64::ZERO)
                    .collect()
            })
            .collect();

        let mut accum: BTreeMap<Occupation, C64> = BTreeMap::new();
        let mut out_counts = vec![0u32; m];
        for (occ, amp) in state.terms() {
            let input_norm: f64 = occ.0.iter().map(|&n| factorial(n)).product();
            let seed = amp / input_norm.sqrt();
            expand_input_modes(
                &self.matrix,
                &nonzero_rows,
                &occ.0,
                0,
                seed,
                &mut out_counts,
                &mut accum,
            );
        }
        let terms = accum.into_iter().map(|(occ, coeff)| {
            let output_norm: f64 = occ.0.iter().map(|&n| factorial(n)).product();
            (occ, coeff * output_norm.sqrt())
        });
        FockState::new(self.registry.clone(), terms)
    }

    /// Multi-photon transition amplitude `⟨output| U |input⟩` computed from a
    /// matrix permanent — an independent check on [`Transform::apply`].
    ///
    /// Returns exactly zero when the photon totals differ.
    pub fn transition_amplitude(&self, input: &Occupation, output: &Occupation) -> Result<C64> {
        let m = self.registry.len();
        for occ in [input, output] {
            if occ.len() != m {
                return Err(Error::LengthMismatch { expected: m, found: occ.len() });
            }
        }
        if input.total() != output.total() {
            return Ok(C64::ZERO);
        }
        let cols: Vec<usize> = repeat_indices(&input.0);
        let rows: Vec<usize> = repeat_indices(&output.0);
        let n = cols.len();
        let sub = Array2::from_shape_fn((n, n), |(r, c)| self.matrix[(rows[r], cols[c])]);
        let norm: f64 = input
            .0
            .iter()
            .chain(output.0.iter())
            .map(|&k| factorial(k))
            .product();
        Ok(permanent(&sub) / norm.sqrt())
    }
}

/// Index `j` repeated `counts[j]` times, in mode order.
fn repeat_indices(counts: &[u32]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(j, &n)| std::iter::repeat_n(j, n as usize))
        .collect()
}

fn unitarity_deviation(matrix: &Array2<C64>) -> f64 {
    let n = matrix.nrows();
    let mut max = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let mut dot = C64::ZERO;
            for k in 0..n {
                dot += matrix[(k, i)].conj() * matrix[(k, j)];
            }
            let target = if i == j { C64::ONE } else { C64::ZERO };
            max = max.max((dot - target).norm());
        }
    }
    max
}

/// Walk input modes left to right; for each, distribute its photons over the
/// nonzero rows of its matrix column, tracking the multinomial coefficient.
fn expand_input_modes(
    matrix: &Array2<C64>,
    nonzero_rows: &[Vec<usize>],
    in_counts: &[u32],
    mode: usize,
    coeff: C64,
    out_counts: &mut Vec<u32>,
    accum: &mut BTreeMap<Occupation, C64>,
) {
    if mode == in_counts.len() {
        *accum
            .entry(Occupation(out_counts.clone()))
            .or_insert(C64::ZERO) += coeff;
        return;
    }
    let n = in_counts[mode];
    if n == 0 {
        expand_input_modes(matrix, nonzero_rows, in_counts, mode + 1, coeff, out_counts, accum);
        return;
    }
    let rows = &nonzero_rows[mode];
    distribute(
        matrix,
        nonzero_rows,
        in_counts,
        mode,
        rows,
        0,
        n,
        coeff * factorial(n),
        out_counts,
        accum,
    );
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    matrix: &Array2<C64>,
    nonzero_rows: &[Vec<usize>],
    in_counts: &[u32],
    mode: usize,
    rows: &[usize],
    slot: usize,
    left: u32,
    coeff: C64,
    out_counts: &mut Vec<u32>,
    accum: &mut BTreeMap<Occupation, C64>,
) {
    if slot == rows.len() {
        if left == 0 {
            expand_input_modes(matrix, nonzero_rows, in_counts, mode + 1, coeff, out_counts, accum);
        }
        return;
    }
    let row = rows[slot];
    let entry = matrix[(row, mode)];
    let mut power = C64::ONE;
    for k in 0..=left {
        if k > 0 {
            power *= entry;
        }
        out_counts[row] += k;
        distribute(
            matrix,
            nonzero_rows,
            in_counts,
            mode,
            rows,
            slot + 1,
            left - k,
            coeff * power / factorial(k),
            out_counts,
            accum,
        );
        out_counts[row] -= k;
    }
}

/// Permanent by naive expansion along the first row; fine for the ≤ 6×6
/// matrices that occur here.
pub(crate) fn permanent(matrix: &Array2<C64>) -> C64 {
    let n = matrix.nrows();
    debug_assert_eq!(n, matrix.ncols());
    debug_assert!(n < 32, "permanent expansion limited to small matrices");
    fn expand(matrix: &Array2<C64>, row: usize, cols_left: u32) -> C64 {
        if row == matrix.nrows() {
            return C64::ONE;
        }
        let mut sum = C64::ZERO;
        for j in 0..matrix.ncols() {
            if cols_left & (1 << j) != 0 {
                let a = matrix[(row, j)];
                if a != C64::ZERO {
                    sum += a * expand(matrix, row + 1, cols_left & !(1 << j));
                }
            }
        }
        sum
    }
    expand(matrix, 0, (1u32 << n) - 1)
}

/// Required photon counts at a set of detector modes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DetectionPattern {
    required: BTreeMap<ModeId, u32>,
}

impl DetectionPattern {
    pub fn new(required: impl IntoIterator<Item = (ModeId, u32)>) -> Self {
        Self { required: required.into_iter().collect() }
    }

    pub fn required(&self) -> impl Iterator<Item = (&ModeId, u32)> {
        self.required.iter().map(|(m, &n)| (m, n))
    }

    pub fn to_json_value(&self) -> Value {
        let mut obj = serde_json::Map::new();
        for (mode, count) in self.required() {
            obj.insert(mode.to_string(), json!(count));
        }
        Value::Object(obj)
    }
}

/// Result of conditioning on a detection pattern: the surviving state over
/// the non-detected modes, deliberately left unnormalized so that its squared
/// norm is the probability of the branch.
#[derive(Clone, Debug)]
pub struct ConditionalOutcome {
    pub state: FockState,
    pub success_probability: f64,
    pub pattern: DetectionPattern,
}

impl ConditionalOutcome {
    /// JSON form: `{"pattern": {...}, "probability": x, "state": {...}}`.
    pub fn to_json_value(&self) -> Value {
        json!({
            "pattern": self.pattern.to_json_value(),
            "probability": self.success_probability,
            "state": self.state.to_json_value(),
        })
    }
}

impl FockState {
    /// Keep exactly the terms whose counts on the pattern modes match, strip
    /// those modes, and report the branch probability. No renormalization.
    pub fn post_select(&self, pattern: &DetectionPattern) -> Result<ConditionalOutcome> {
        let mut required = Vec::new();
        for (mode, count) in pattern.required() {
            required.push((self.registry().index_of(mode)?, count));
        }
        let kept_modes: Vec<ModeId> = self
            .registry()
            .modes()
            .iter()
            .enumerate()
            .filter(|(i, _)| !required.iter().any(|(ri, _)| ri == i))
            .map(|(_, m)| m.clone())
            .collect();
        let kept_idx: Vec<usize> = self
            .registry()
            .modes()
            .iter()
            .enumerate()
            .filter(|(i, _)| !required.iter().any(|(ri, _)| ri == i))
            .map(|(i, _)| i)
            .collect();
        let reduced_registry = ModeRegistry::new(kept_modes)?;
        let mut terms = Vec::new();
        for (occ, amp) in self.terms() {
            if required.iter().all(|&(i, count)| occ.0[i] == count) {
                let reduced: Vec<u32> = kept_idx.iter().map(|&i| occ.0[i]).collect();
                terms.push((Occupation(reduced), amp));
            }
        }
        let state = FockState::new(reduced_registry, terms)?;
        let success_probability = state.squared_norm();
        Ok(ConditionalOutcome { state, success_probability, pattern: pattern.clone() })
    }

    /// Probability of every photon-count pattern occurring on the detector
    /// modes. Values sum to the squared norm of the state.
    pub fn outcome_probabilities(
        &self,
        detectors: &[ModeId],
    ) -> Result<BTreeMap<DetectionPattern, f64>> {
        let idx: Vec<usize> = detectors
            .iter()
            .map(|m| self.registry().index_of(m))
            .collect::<Result<_>>()?;
        let mut out: BTreeMap<DetectionPattern, f64> = BTreeMap::new();
        for (occ, amp) in self.terms() {
            let pattern = DetectionPattern::new(
                detectors
                    .iter()
                    .cloned()
                    .zip(idx.iter().map(|&i| occ.0[i])),
            );
            *out.entry(pattern).or_insert(0.0) += amp.norm_sqr();
        }
        Ok(out)
    }
}
