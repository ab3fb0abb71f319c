//! Simulation toolkit for polarization-encoded linear-optics quantum
//! computing at desk scale.
//!
//! The crate evolves small multi-photon Fock states through arbitrary
//! lossless linear-optical networks, post-selects on photon counts at
//! detector modes, and uses those pieces to build the post-selected
//! nonlinear sign-shift (NS) gate and the two-qubit conditional-sign (CS)
//! gate realized entirely with polarization optics — polarizing beam
//! splitters, wave plates, and a beam splitter with polarization-sensitive
//! reflectivities.
//!
//! Everything is computed twice, by deliberately independent routes: state
//! evolution by exact multinomial expansion is checked against
//! permanent-based transition amplitudes, and the simulated gates are checked
//! against their closed forms. The [`verify`] module bundles those
//! cross-checks into a reproducible report.
//!
//! ```
//! use linoptics::{beam_splitter, FockState, ModeId, ModeRegistry};
//!
//! // Two photons meeting at a balanced beam splitter bunch: the
//! // coincidence amplitude vanishes.
//! let registry = ModeRegistry::new([ModeId::h("1"), ModeId::h("2")])?;
//! let splitter = beam_splitter(&registry, 0.5, &ModeId::h("1"), &ModeId::h("2"))?;
//! let out = splitter.apply(&FockState::basis(registry, [1, 1])?)?;
//! assert!(out.amplitude(&[1, 1].into()).norm() < 1e-12);
//! # Ok::<(), linoptics::Error>(())
//! ```

pub mod analysis;
pub mod elements;
pub mod engine;
pub mod error;
pub mod fock;
pub mod gates;
pub mod numfmt;
pub mod verify;

pub use analysis::{
    equality_residuals, magic_reflectivities, phase_sensitivity, process_fidelity,
    reflectivity_to_angles, solve_magic_reflectivities, sweep, sweep_to_csv, SweepRow,
};
pub use elements::{
    beam_splitter, composite_pol_bs, hwp, pbs, phase_shifter, pol_beam_splitter, JonesMatrix,
};
pub use engine::{ConditionalOutcome, DetectionPattern, Transform};
pub use error::{Error, Result};
pub use fock::{FockState, ModeId, ModeRegistry, Occupation, Pol, QubitAmplitudes};
pub use gates::{
    cs_closed_form, cs_gate, embed_qubits, extract_qubits, ns_closed_form, ns_gate, CsReport,
    NsConfig,
};

// The guide in book/ is compiled here so `cargo test --doc` runs every code
// block in it; mdbook itself cannot execute snippets against the crate.
#[cfg(doctest)]
pub mod booktest {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/fock-states.md")]
    pub mod fock_states {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    pub mod evolution {}
    #[doc = include_str!("../../../book/src/elements.md")]
    pub mod elements {}
    #[doc = include_str!("../../../book/src/ns-gate.md")]
    pub mod ns_gate {}
    #[doc = include_str!("../../../book/src/cs-gate.md")]
    pub mod cs_gate {}
    #[doc = include_str!("../../../book/src/magic-point.md")]
    pub mod magic_point {}
    #[doc = include_str!("../../../book/src/composite-splitter.md")]
    pub mod composite_splitter {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
}
