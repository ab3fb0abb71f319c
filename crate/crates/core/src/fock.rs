//! Modes, occupation vectors, and sparse Fock states.
//!
//! A [`ModeRegistry`] fixes an ordered set of polarization-resolved optical
//! modes; an [`Occupation`] assigns a photon count to each of them; a
//! [`FockState`] is a sparse complex superposition of occupations. States are
//! allowed to be sub-normalized: after post-selection the squared norm of a
//! state is the success probability of the branch it survived.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Amplitudes with |amp| below this are dropped during canonicalization.
pub const PRUNE_TOL: f64 = 1e-12;

/// Default tolerance for term-wise state comparison.
pub const DEFAULT_CLOSE_TOL: f64 = 1e-9;

/// Polarization of a single optical mode.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pol {
    V,
    H,
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pol::V => write!(f, "V"),
            Pol::H => write!(f, "H"),
        }
    }
}

/// One polarization-resolved optical mode: a spatial port label plus `V`/`H`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeId {
    pub spatial: String,
    pub pol: Pol,
}

impl ModeId {
    pub fn new(spatial: impl Into<String>, pol: Pol) -> Self {
        Self { spatial: spatial.into(), pol }
    }

    /// Vertical mode of a spatial port.
    pub fn v(spatial: impl Into<String>) -> Self {
        Self::new(spatial, Pol::V)
    }

    /// Horizontal mode of a spatial port.
    pub fn h(spatial: impl Into<String>) -> Self {
        Self::new(spatial, Pol::H)
    }

    /// Parse the `"port:V"` / `"port:H"` text form.
    pub fn parse(s: &str) -> Result<Self> {
        let (spatial, pol) = s
            .rsplit_once(':')
            .ok_or_else(|| Error::Decode(format!("mode label `{s}` has no `:`")))?;
        let pol = match pol {
            "V" => Pol::V,
            "H" => Pol::H,
            other => {
                return Err(Error::Decode(format!("unknown polarization `{other}`")));
            }
        };
        if spatial.is_empty() {
            return Err(Error::Decode(format!("empty spatial label in `{s}`")));
        }
        Ok(Self::new(spatial, pol))
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.spatial, self.pol)
    }
}

/// Ordered, duplicate-free set of modes. The order is the basis order of every
/// occupation vector and transform matrix built over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeRegistry {
    modes: Vec<ModeId>,
}

impl ModeRegistry {
    /// Build a registry from an explicit mode order.
    pub fn new(modes: impl IntoIterator<Item = ModeId>) -> Result<Self> {
        let modes: Vec<ModeId> = modes.into_iter().collect();
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::DuplicateMode(m.clone()));
            }
        }
        Ok(Self { modes })
    }

    /// Registry with a (V, H) pair per spatial port, in the given port order.
    pub fn polarized(spatials: impl IntoIterator<Item = impl Into<String>>) -> Result<Self> {
        let mut modes = Vec::new();
        for s in spatials {
            let s = s.into();
            modes.push(ModeId::v(s.clone()));
            modes.push(ModeId::h(s));
        }
        Self::new(modes)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    /// Position of a mode in the basis order.
    pub fn index_of(&self, mode: &ModeId) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m == mode)
            .ok_or_else(|| Error::UnknownMode(mode.clone()))
    }

    pub fn contains(&self, mode: &ModeId) -> bool {
        self.modes.contains(mode)
    }
}

/// Photon count per registry mode; the Fock basis label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(pub Vec<u32>);

impl Occupation {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    /// Total photon number.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[u32; N]> for Occupation {
    fn from(v: [u32; N]) -> Self {
        Self(v.to_vec())
    }
}

/// Sparse Fock state: a map from occupation vectors to complex amplitudes.
///
/// Terms are kept canonical: amplitudes with |amp| < [`PRUNE_TOL`] are pruned
/// and duplicate occupations are merged on construction. Mixed photon-number
/// sectors are allowed; nothing here projects onto a fixed total.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    registry: ModeRegistry,
    terms: BTreeMap<Occupation, C64>,
}

impl FockState {
    /// Build a state from (occupation, amplitude) terms. Duplicate occupations
    /// have their amplitudes summed; near-zero amplitudes are pruned.
    pub fn new(
        registry: ModeRegistry,
        terms: impl IntoIterator<Item = (Occupation, C64)>,
    ) -> Result<Self> {
        let mut map: BTreeMap<Occupation, C64> = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != registry.len() {
                return Err(Error::LengthMismatch {
                    expected: registry.len(),
                    found: occ.len(),
                });
            }
            *map.entry(occ).or_insert(C64::ZERO) += amp;
        }
        let mut state = Self { registry, terms: map };
        state.prune();
        Ok(state)
    }

    /// The vacuum over a registry.
    pub fn vacuum(registry: ModeRegistry) -> Self {
        let occ = Occupation::zeros(registry.len());
        Self::new(registry, [(occ, C64::ONE)]).expect("vacuum occupation matches registry")
    }

    /// A single Fock basis state with amplitude 1.
    pub fn basis(registry: ModeRegistry, occ: impl Into<Occupation>) -> Result<Self> {
        Self::new(registry, [(occ.into(), C64::ONE)])
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    /// Iterate over (occupation, amplitude) terms in canonical basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, C64)> {
        self.terms.iter().map(|(o, a)| (o, *a))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_vacuous(&self) -> bool {
        self.terms.is_empty()
    }

    /// Amplitude of one occupation (zero if absent).
    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.terms.get(occ).copied().unwrap_or(C64::ZERO)
    }

    /// Σ |amplitude|². For an unnormalized post-selected state this is the
    /// success probability of that branch.
    pub fn squared_norm(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// Multiply every amplitude by a scalar.
    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for amp in out.terms.values_mut() {
            *amp *= factor;
        }
        out.prune();
        out
    }

    /// Term-wise sum of two states over the same registry.
    pub fn superpose(&self, other: &Self) -> Result<Self> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        Self::new(
            self.registry.clone(),
            self.terms().chain(other.terms()).map(|(o, a)| (o.clone(), a)),
        )
    }

    /// Tensor product; the combined registry is `self`'s modes followed by
    /// `other`'s. Fails if the registries share a mode.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let registry = ModeRegistry::new(
            self.registry
                .modes()
                .iter()
                .chain(other.registry.modes())
                .cloned(),
        )?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (o1, a1) in self.terms() {
            for (o2, a2) in other.terms() {
                let mut occ = o1.0.clone();
                occ.extend_from_slice(&o2.0);
                terms.push((Occupation(occ), a1 * a2));
            }
        }
        Self::new(registry, terms)
    }

    /// Reinterpret the same amplitudes over a registry of equal size. Used to
    /// relabel spatial ports (for instance when two ports merge into one).
    pub fn with_registry(&self, registry: ModeRegistry) -> Result<Self> {
        if registry.len() != self.registry.len() {
            return Err(Error::LengthMismatch {
                expected: self.registry.len(),
                found: registry.len(),
            });
        }
        Ok(Self { registry, terms: self.terms.clone() })
    }

    /// True iff the largest term-wise amplitude difference is within `tol`
    /// ([`DEFAULT_CLOSE_TOL`] is a sensible default). The comparison is
    /// exact-phase; see [`FockState::close_to_up_to_phase`].
    pub fn close_to(&self, other: &Self, tol: f64) -> Result<bool> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        Ok(self.max_term_distance(other) <= tol)
    }

    /// Like [`FockState::close_to`] but quotients out one global phase,
    /// chosen to align the largest term of `self` with its partner in `other`.
    pub fn close_to_up_to_phase(&self, other: &Self, tol: f64) -> Result<bool> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        let Some((occ, amp)) = self
            .terms()
            .max_by(|(_, a), (_, b)| a.norm().total_cmp(&b.norm()))
        else {
            return Ok(other.max_term_distance(self) <= tol);
        };
        let partner = other.amplitude(occ);
        if partner.norm() <= PRUNE_TOL {
            return Ok(self.max_term_distance(other) <= tol);
        }
        let phase = (partner / amp) / (partner / amp).norm();
        Ok(self.scaled(phase).max_term_distance(other) <= tol)
    }

    fn max_term_distance(&self, other: &Self) -> f64 {
        let mut max = 0.0_f64;
        for (occ, amp) in self.terms() {
            max = max.max((amp - other.amplitude(occ)).norm());
        }
        for (occ, amp) in other.terms() {
            if !self.terms.contains_key(occ) {
                max = max.max(amp.norm());
            }
        }
        max
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm() >= PRUNE_TOL);
    }

    /// JSON form: `{"modes": ["C:V", ...], "terms": [{"occ": [...], "re": x, "im": y}, ...]}`.
    pub fn to_json_value(&self) -> Value {
        let modes: Vec<Value> = self
            .registry
            .modes()
            .iter()
            .map(|m| Value::String(m.to_string()))
            .collect();
        let terms: Vec<Value> = self
            .terms()
            .map(|(occ, amp)| {
                json!({
                    "occ": occ.0,
                    "re": amp.re,
                    "im": amp.im,
                })
            })
            .collect();
        json!({ "modes": modes, "terms": terms })
    }

    /// Decode the [`FockState::to_json_value`] form.
    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Decode("state is not a JSON object".into()))?;
        let modes = obj
            .get("modes")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Decode("missing `modes` array".into()))?;
        let mode_ids: Vec<ModeId> = modes
            .iter()
            .map(|m| {
                m.as_str()
                    .ok_or_else(|| Error::Decode("mode label is not a string".into()))
                    .and_then(ModeId::parse)
            })
            .collect::<Result<_>>()?;
        let registry = ModeRegistry::new(mode_ids)?;
        let terms = obj
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Decode("missing `terms` array".into()))?;
        let mut decoded = Vec::with_capacity(terms.len());
        for term in terms {
            let occ = term
                .get("occ")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Decode("term missing `occ`".into()))?
                .iter()
                .map(|n| {
                    n.as_u64()
                        .map(|n| n as u32)
                        .ok_or_else(|| Error::Decode("occupation entry is not a count".into()))
                })
                .collect::<Result<Vec<u32>>>()?;
            let re = term
                .get("re")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Decode("term missing `re`".into()))?;
            let im = term
                .get("im")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Decode("term missing `im`".into()))?;
            decoded.push((Occupation(occ), C64::new(re, im)));
        }
        Self::new(registry, decoded)
    }
}

/// Amplitudes of the four two-qubit computational basis states
/// |00⟩, |01⟩, |10⟩, |11⟩.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct QubitAmplitudes {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl QubitAmplitudes {
    pub fn new(a: impl Into<C64>, b: impl Into<C64>, c: impl Into<C64>, d: impl Into<C64>) -> Self {
        Self { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    /// |a|² + |b|² + |c|² + |d|².
    pub fn squared_norm(&self) -> f64 {
        self.as_array().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.squared_norm() - 1.0).abs() <= tol
    }

    pub fn as_array(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// The uniform superposition (1/2, 1/2, 1/2, 1/2).
    pub fn uniform() -> Self {
        Self::new(0.5, 0.5, 0.5, 0.5)
    }

    pub fn to_json_value(&self) -> Value {
        let c = |z: C64| json!({ "re": z.re, "im": z.im });
        json!({ "a": c(self.a), "b": c(self.b), "c": c(self.c), "d": c(self.d) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c_reg() -> ModeRegistry {
        ModeRegistry::polarized(["C"]).unwrap()
    }

    #[test]
    fn single_term_state() {
        let s = FockState::new(c_reg(), [(Occupation::from([0, 1]), C64::ONE)]).unwrap();
        assert_eq!(s.num_terms(), 1);
        assert!((s.squared_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn duplicate_terms_merge() {
        let half = C64::new(0.5, 0.0);
        let s = FockState::new(
            c_reg(),
            [
                (Occupation::from([0, 1]), half),
                (Occupation::from([0, 1]), half),
            ],
        )
        .unwrap();
        assert_eq!(s.num_terms(), 1);
        assert!((s.amplitude(&Occupation::from([0, 1])) - C64::ONE).norm() < 1e-15);
    }

    #[test]
    fn computational_superposition_over_two_h_modes() {
        // (a, b, c, d) = (1/2, 1/2, 1/2, 1/2) over registry {A:H, B:H}
        let reg = ModeRegistry::new([ModeId::h("A"), ModeId::h("B")]).unwrap();
        let half = C64::new(0.5, 0.0);
        let s = FockState::new(
            reg,
            [
                (Occupation::from([0, 0]), half),
                (Occupation::from([0, 1]), half),
                (Occupation::from([1, 0]), half),
                (Occupation::from([1, 1]), half),
            ],
        )
        .unwrap();
        assert_eq!(s.num_terms(), 4);
        for (_, amp) in s.terms() {
            assert!((amp - half).norm() < 1e-15);
        }
        assert!((s.squared_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_state_has_zero_norm() {
        let s = FockState::new(c_reg(), []).unwrap();
        assert_eq!(s.squared_norm(), 0.0);
        assert!(s.is_vacuous());
    }

    #[test]
    fn length_mismatch_rejected() {
        let err = FockState::new(c_reg(), [(Occupation::from([0, 1, 0]), C64::ONE)]);
        assert!(matches!(
            err,
            Err(Error::LengthMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn duplicate_mode_rejected() {
        let err = ModeRegistry::new([ModeId::v("A"), ModeId::v("A")]);
        assert!(matches!(err, Err(Error::DuplicateMode(_))));
    }

    #[test]
    fn close_to_is_reflexive_and_phase_sensitive() {
        let s = FockState::new(
            c_reg(),
            [
                (Occupation::from([1, 0]), C64::new(0.6, 0.0)),
                (Occupation::from([0, 1]), C64::new(0.0, 0.8)),
            ],
        )
        .unwrap();
        assert!(s.close_to(&s, 0.0).unwrap());
        let flipped = s.scaled(C64::new(-1.0, 0.0));
        assert!(!s.close_to(&flipped, 1e-9).unwrap());
        assert!(s.close_to_up_to_phase(&flipped, 1e-12).unwrap());
    }

    #[test]
    fn close_to_rejects_registry_mismatch() {
        let s1 = FockState::vacuum(c_reg());
        let s2 = FockState::vacuum(ModeRegistry::polarized(["D"]).unwrap());
        assert!(matches!(s1.close_to(&s2, 1e-9), Err(Error::RegistryMismatch)));
    }

    #[test]
    fn tensor_concatenates_modes() {
        let a = FockState::basis(c_reg(), [0, 1]).unwrap();
        let b = FockState::basis(ModeRegistry::polarized(["D"]).unwrap(), [1, 0]).unwrap();
        let t = a.tensor(&b).unwrap();
        assert_eq!(t.registry().len(), 4);
        assert!((t.amplitude(&Occupation::from([0, 1, 1, 0])) - C64::ONE).norm() < 1e-15);
    }

    #[test]
    fn tensor_rejects_shared_modes() {
        let a = FockState::vacuum(c_reg());
        assert!(matches!(a.tensor(&a), Err(Error::DuplicateMode(_))));
    }

    #[test]
    fn json_schema_is_exact() {
        let s = FockState::basis(c_reg(), [0, 1]).unwrap();
        let v = s.to_json_value();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"modes":["C:V","C:H"],"terms":[{"occ":[0,1],"re":1.0,"im":0.0}]}"#
        );
    }

    #[test]
    fn json_round_trip() {
        let s = FockState::new(
            c_reg(),
            [
                (Occupation::from([2, 0]), C64::new(0.25, -0.5)),
                (Occupation::from([0, 0]), C64::new(-0.125, 0.0)),
            ],
        )
        .unwrap();
        let back = FockState::from_json_value(&s.to_json_value()).unwrap();
        assert!(back.close_to(&s, 0.0).unwrap());
        assert_eq!(back.registry(), s.registry());
    }

    #[test]
    fn mode_id_parse_round_trip() {
        let m = ModeId::h("anc2");
        assert_eq!(ModeId::parse(&m.to_string()).unwrap(), m);
        assert!(ModeId::parse("nocolon").is_err());
        assert!(ModeId::parse("x:Q").is_err());
    }
}
