//! Constructors for the optical elements the simulator is built from:
//! beam splitters, polarization-sensitive beam splitters, wave plates,
//! polarizing beam splitters, phase shifters, and the two-interferometer
//! composite that realizes a polarization-sensitive splitter from standard
//! polarization optics.
//!
//! All constructors return a [`Transform`] over the full registry, acting as
//! the identity on every mode they do not touch.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::engine::Transform;
use crate::error::{Error, Result};
use crate::fock::{ModeId, ModeRegistry};

/// 2×2 unitary acting on the (V, H) creation-operator pair of one spatial
/// mode. Entry `(row, col)` is the coefficient of output polarization `row`
/// in the image of input polarization `col`, with V before H.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct JonesMatrix {
    entries: [[C64; 2]; 2],
}

impl JonesMatrix {
    pub fn new(entries: [[C64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    pub fn identity() -> Self {
        Self::rotation(0.0)
    }

    /// Proper rotation (determinant +1): V → cosθ·V + sinθ·H,
    /// H → −sinθ·V + cosθ·H.
    pub fn rotation(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self::new([
            [C64::new(cos, 0.0), C64::new(-sin, 0.0)],
            [C64::new(sin, 0.0), C64::new(cos, 0.0)],
        ])
    }

    /// Reflection (determinant −1): V → cosθ·V + sinθ·H,
    /// H → sinθ·V − cosθ·H. This is the Jones matrix of a physical half-wave
    /// plate with its fast axis at θ/2.
    pub fn reflection(theta: f64) -> Self {
        let (sin, cos) = theta.sin_cos();
        Self::new([
            [C64::new(cos, 0.0), C64::new(sin, 0.0)],
            [C64::new(sin, 0.0), C64::new(-cos, 0.0)],
        ])
    }

    /// The 45° reflection (V+H)/√2, (V−H)/√2.
    pub fn h45() -> Self {
        Self::reflection(std::f64::consts::FRAC_PI_4)
    }

    /// The 45° proper rotation.
    pub fn r45() -> Self {
        Self::rotation(std::f64::consts::FRAC_PI_4)
    }

    /// Rotation by −90°: V → −H, H → V.
    pub fn rm90() -> Self {
        Self::rotation(-std::f64::consts::FRAC_PI_2)
    }

    /// Rotation by +90°: V → H, H → −V. Inverse of [`JonesMatrix::rm90`].
    pub fn rp90() -> Self {
        Self::rotation(std::f64::consts::FRAC_PI_2)
    }

    /// Largest deviation of J†J from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut max = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                let mut dot = C64::ZERO;
                for k in 0..2 {
                    dot += self.entries[k][i].conj() * self.entries[k][j];
                }
                let target = if i == j { C64::ONE } else { C64::ZERO };
                max = max.max((dot - target).norm());
            }
        }
        max
    }
}

fn identity_matrix(n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { C64::ONE } else { C64::ZERO })
}

fn check_reflectivity(name: &'static str, r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) || !r.is_finite() {
        return Err(Error::OutOfRange { name, value: r, min: 0.0, max: 1.0 });
    }
    Ok(())
}

/// Non-polarizing beam splitter with reflection probability `r` between two
/// modes: input1 → √R·out1 + √(1−R)·out2, input2 → −√(1−R)·out1 + √R·out2.
pub fn beam_splitter(
    registry: &ModeRegistry,
    r: f64,
    input1: &ModeId,
    input2: &ModeId,
) -> Result<Transform> {
    check_reflectivity("reflectivity", r)?;
    let i1 = registry.index_of(input1)?;
    let i2 = registry.index_of(input2)?;
    let (rr, tt) = (r.sqrt(), (1.0 - r).sqrt());
    let mut m = identity_matrix(registry.len());
    m[(i1, i1)] = C64::new(rr, 0.0);
    m[(i2, i1)] = C64::new(tt, 0.0);
    m[(i1, i2)] = C64::new(-tt, 0.0);
    m[(i2, i2)] = C64::new(rr, 0.0);
    Transform::new(m, registry.clone())
}

/// Beam splitter with polarization-sensitive reflectivities: acts as
/// [`beam_splitter`] with `r_v` on the two V modes and `r_h` on the two H
/// modes of the given spatial ports, with the same sign convention.
pub fn pol_beam_splitter(
    registry: &ModeRegistry,
    r_v: f64,
    r_h: f64,
    spatial1: &str,
    spatial2: &str,
) -> Result<Transform> {
    check_reflectivity("r_v", r_v)?;
    check_reflectivity("r_h", r_h)?;
    let v = beam_splitter(registry, r_v, &ModeId::v(spatial1), &ModeId::v(spatial2))?;
    let h = beam_splitter(registry, r_h, &ModeId::h(spatial1), &ModeId::h(spatial2))?;
    v.then(&h)
}

/// Wave plate: applies a Jones matrix to the (V, H) pair of one spatial mode.
pub fn hwp(registry: &ModeRegistry, jones: &JonesMatrix, spatial: &str) -> Result<Transform> {
    let deviation = jones.unitarity_deviation();
    if deviation > crate::engine::UNITARITY_TOL {
        return Err(Error::NonUnitary { deviation });
    }
    let iv = registry.index_of(&ModeId::v(spatial))?;
    let ih = registry.index_of(&ModeId::h(spatial))?;
    let idx = [iv, ih];
    let mut m = identity_matrix(registry.len());
    for row in 0..2 {
        for col in 0..2 {
            m[(idx[row], idx[col])] = jones.entry(row, col);
        }
    }
    Transform::new(m, registry.clone())
}

/// Polarizing beam splitter between two spatial ports: H passes straight
/// through, V swaps ports, every nonzero coefficient +1.
pub fn pbs(registry: &ModeRegistry, spatial1: &str, spatial2: &str) -> Result<Transform> {
    let v1 = registry.index_of(&ModeId::v(spatial1))?;
    let v2 = registry.index_of(&ModeId::v(spatial2))?;
    // H modes must exist even though they map to themselves.
    registry.index_of(&ModeId::h(spatial1))?;
    registry.index_of(&ModeId::h(spatial2))?;
    let mut m = identity_matrix(registry.len());
    m[(v1, v1)] = C64::ZERO;
    m[(v2, v2)] = C64::ZERO;
    m[(v2, v1)] = C64::ONE;
    m[(v1, v2)] = C64::ONE;
    Transform::new(m, registry.clone())
}

/// Multiplies one mode's creation operator by e^{iφ}.
pub fn phase_shifter(registry: &ModeRegistry, phi: f64, mode: &ModeId) -> Result<Transform> {
    let i = registry.index_of(mode)?;
    let mut m = identity_matrix(registry.len());
    m[(i, i)] = C64::from_polar(1.0, phi);
    Transform::new(m, registry.clone())
}

/// Polarization-sensitive variable beam splitter built from two polarizing
/// beam splitters and four wave plates.
///
/// Port 2 is rotated by +90° so that every input-V photon travels the port-2
/// arm of the interferometer and every input-H photon the port-1 arm; the
/// arm plates are proper rotations by `alpha` (V arm) and `beta` (H arm); a
/// final −90° rotation on port 2 restores the polarizations. At `phi = 0`
/// the result equals `pol_beam_splitter(cos²α, cos²β, ...)` exactly. `phi`
/// is a path phase on the V arm, modelling interferometer misalignment; only
/// the relative phase between the arms is observable.
pub fn composite_pol_bs(
    registry: &ModeRegistry,
    alpha: f64,
    beta: f64,
    phi: f64,
    spatial1: &str,
    spatial2: &str,
) -> Result<Transform> {
    let stages = [
        hwp(registry, &JonesMatrix::rp90(), spatial2)?,
        pbs(registry, spatial1, spatial2)?,
        hwp(registry, &JonesMatrix::rotation(alpha), spatial2)?,
        hwp(registry, &JonesMatrix::rotation(beta), spatial1)?,
        phase_shifter(registry, phi, &ModeId::v(spatial2))?,
        phase_shifter(registry, phi, &ModeId::h(spatial2))?,
        pbs(registry, spatial1, spatial2)?,
        hwp(registry, &JonesMatrix::rm90(), spatial2)?,
    ];
    let mut t = Transform::identity(registry.clone());
    for stage in &stages {
        t = t.then(stage)?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockState, Occupation};

    fn reg12() -> ModeRegistry {
        ModeRegistry::polarized(["1", "2"]).unwrap()
    }

    fn max_dev_from_identity(t: &Transform) -> f64 {
        t.max_entry_distance(&Transform::identity(t.registry().clone()))
    }

    #[test]
    fn full_reflection_is_identity() {
        let reg = reg12();
        let t = beam_splitter(&reg, 1.0, &ModeId::h("1"), &ModeId::h("2")).unwrap();
        assert!(max_dev_from_identity(&t) < 1e-15);
    }

    #[test]
    fn balanced_splitter_entries() {
        let reg = ModeRegistry::new([ModeId::h("1"), ModeId::h("2")]).unwrap();
        let t = beam_splitter(&reg, 0.5, &ModeId::h("1"), &ModeId::h("2")).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((t.entry(0, 0) - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((t.entry(1, 0) - C64::new(s, 0.0)).norm() < 1e-15);
        assert!((t.entry(0, 1) - C64::new(-s, 0.0)).norm() < 1e-15);
        assert!((t.entry(1, 1) - C64::new(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reflectivity_out_of_range_rejected() {
        let reg = reg12();
        for bad in [-0.1, 1.1, f64::NAN] {
            assert!(matches!(
                beam_splitter(&reg, bad, &ModeId::h("1"), &ModeId::h("2")),
                Err(Error::OutOfRange { .. })
            ));
        }
    }

    #[test]
    fn pol_splitter_factorizes_per_polarization() {
        let reg = reg12();
        let t = pol_beam_splitter(&reg, 0.5, 0.5, "1", "2").unwrap();
        let v = beam_splitter(&reg, 0.5, &ModeId::v("1"), &ModeId::v("2")).unwrap();
        let h = beam_splitter(&reg, 0.5, &ModeId::h("1"), &ModeId::h("2")).unwrap();
        assert!(t.max_entry_distance(&v.then(&h).unwrap()) < 1e-15);
    }

    #[test]
    fn pol_splitter_limiting_case() {
        let reg = reg12();
        let t = pol_beam_splitter(&reg, 1.0, 0.0, "1", "2").unwrap();
        // V fully reflected (stays in its port), H fully swapped.
        let iv1 = reg.index_of(&ModeId::v("1")).unwrap();
        let ih1 = reg.index_of(&ModeId::h("1")).unwrap();
        let ih2 = reg.index_of(&ModeId::h("2")).unwrap();
        assert!((t.entry(iv1, iv1) - C64::ONE).norm() < 1e-15);
        assert!((t.entry(ih2, ih1) - C64::ONE).norm() < 1e-15);
        assert!(t.entry(ih1, ih1).norm() < 1e-15);
    }

    #[test]
    fn jones_presets() {
        assert!(JonesMatrix::rotation(0.0).unitarity_deviation() < 1e-15);
        // H45 is an involution.
        let h45 = hwp(&reg12(), &JonesMatrix::h45(), "1").unwrap();
        assert!(max_dev_from_identity(&h45.then(&h45).unwrap()) < 1e-15);
        // Two −90° rotations give a sign per photon on that port.
        let rm90 = hwp(&reg12(), &JonesMatrix::rm90(), "1").unwrap();
        let twice = rm90.then(&rm90).unwrap();
        let iv1 = reg12().index_of(&ModeId::v("1")).unwrap();
        let ih1 = reg12().index_of(&ModeId::h("1")).unwrap();
        assert!((twice.entry(iv1, iv1) + C64::ONE).norm() < 1e-15);
        assert!((twice.entry(ih1, ih1) + C64::ONE).norm() < 1e-15);
    }

    #[test]
    fn hwp_rejects_non_unitary_jones() {
        let j = JonesMatrix::new([
            [C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ]);
        assert!(matches!(
            hwp(&reg12(), &j, "1"),
            Err(Error::NonUnitary { .. })
        ));
    }

    #[test]
    fn pbs_routing() {
        let reg = reg12();
        let t = pbs(&reg, "1", "2").unwrap();
        // |1_H⟩ at port 1 passes through.
        let s = FockState::basis(reg.clone(), [0, 1, 0, 0]).unwrap();
        let out = t.apply(&s).unwrap();
        assert!((out.amplitude(&[0, 1, 0, 0].into()) - C64::ONE).norm() < 1e-15);
        // |1_V⟩ at port 2 reflects into port 1.
        let s = FockState::basis(reg.clone(), [0, 0, 1, 0]).unwrap();
        let out = t.apply(&s).unwrap();
        assert!((out.amplitude(&[1, 0, 0, 0].into()) - C64::ONE).norm() < 1e-15);
        // |1_H⟩₁|1_V⟩₂ combine into port 1.
        let s = FockState::basis(reg, [0, 1, 1, 0]).unwrap();
        let out = t.apply(&s).unwrap();
        assert!((out.amplitude(&[1, 1, 0, 0].into()) - C64::ONE).norm() < 1e-15);
    }

    #[test]
    fn phase_shifter_group_properties() {
        let reg = reg12();
        let mode = ModeId::h("1");
        assert!(max_dev_from_identity(&phase_shifter(&reg, 0.0, &mode).unwrap()) < 1e-15);

        let pi = phase_shifter(&reg, std::f64::consts::PI, &mode).unwrap();
        let s = FockState::basis(reg.clone(), [0, 1, 0, 0]).unwrap();
        let out = pi.apply(&s).unwrap();
        assert!((out.amplitude(&Occupation::from([0, 1, 0, 0])) + C64::ONE).norm() < 1e-15);

        let quarter = phase_shifter(&reg, std::f64::consts::FRAC_PI_2, &mode).unwrap();
        assert!(quarter.then(&quarter).unwrap().max_entry_distance(&pi) < 1e-15);
    }

    #[test]
    fn all_constructors_are_unitary() {
        let reg = reg12();
        let transforms = [
            beam_splitter(&reg, 0.3, &ModeId::h("1"), &ModeId::h("2")).unwrap(),
            pol_beam_splitter(&reg, 0.7, 0.2, "1", "2").unwrap(),
            hwp(&reg, &JonesMatrix::reflection(0.3), "2").unwrap(),
            pbs(&reg, "1", "2").unwrap(),
            phase_shifter(&reg, 1.234, &ModeId::v("2")).unwrap(),
            composite_pol_bs(&reg, 0.5, 1.1, 0.7, "1", "2").unwrap(),
        ];
        // Transform::new would have rejected them otherwise; double-check via
        // norm preservation on a multi-photon state.
        let s = FockState::new(
            reg,
            [
                ([1, 1, 0, 0].into(), C64::new(0.6, 0.0)),
                ([0, 0, 2, 0].into(), C64::new(0.0, 0.8)),
            ],
        )
        .unwrap();
        for t in &transforms {
            let out = t.apply(&s).unwrap();
            assert!((out.squared_norm() - s.squared_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn composite_at_zero_angles_fully_reflects() {
        let reg = reg12();
        let t = composite_pol_bs(&reg, 0.0, 0.0, 0.0, "1", "2").unwrap();
        let ideal = pol_beam_splitter(&reg, 1.0, 1.0, "1", "2").unwrap();
        assert!(t.max_entry_distance(&ideal) < 1e-12);
    }

    #[test]
    fn composite_matches_ideal_splitter_on_angle_grid() {
        let reg = reg12();
        let angles: Vec<f64> = [0.0_f64, 15.0, 30.0, 45.0, 61.6, 90.0]
            .iter()
            .map(|d| d.to_radians())
            .collect();
        for &alpha in &angles {
            for &beta in &angles {
                let t = composite_pol_bs(&reg, alpha, beta, 0.0, "1", "2").unwrap();
                let ideal = pol_beam_splitter(
                    &reg,
                    alpha.cos().powi(2),
                    beta.cos().powi(2),
                    "1",
                    "2",
                )
                .unwrap();
                let d = t.max_entry_distance(&ideal);
                assert!(d < 1e-12, "deviation {d} at alpha={alpha}, beta={beta}");
            }
        }
    }

    #[test]
    fn composite_mode_map_columns() {
        // Input-V column is (cosα, sinα) onto the output V modes; input-H is
        // (cosβ, sinβ) onto the output H modes; second-port columns carry the
        // −sin entries.
        let reg = reg12();
        let (alpha, beta) = (0.4_f64, 1.0_f64);
        let t = composite_pol_bs(&reg, alpha, beta, 0.0, "1", "2").unwrap();
        let idx = |m: &ModeId| reg.index_of(m).unwrap();
        let (v1, h1) = (idx(&ModeId::v("1")), idx(&ModeId::h("1")));
        let (v2, h2) = (idx(&ModeId::v("2")), idx(&ModeId::h("2")));
        let close = |x: C64, y: f64| (x - C64::new(y, 0.0)).norm() < 1e-12;
        assert!(close(t.entry(v1, v1), alpha.cos()));
        assert!(close(t.entry(v2, v1), alpha.sin()));
        assert!(close(t.entry(v1, v2), -alpha.sin()));
        assert!(close(t.entry(v2, v2), alpha.cos()));
        assert!(close(t.entry(h1, h1), beta.cos()));
        assert!(close(t.entry(h2, h1), beta.sin()));
        assert!(close(t.entry(h1, h2), -beta.sin()));
        assert!(close(t.entry(h2, h2), beta.cos()));
    }

    #[test]
    fn composite_is_phase_sensitive() {
        let reg = reg12();
        let alpha = 29.5106753_f64.to_radians();
        let beta = 61.5779209_f64.to_radians();
        let aligned = composite_pol_bs(&reg, alpha, beta, 0.0, "1", "2").unwrap();
        let detuned = composite_pol_bs(&reg, alpha, beta, std::f64::consts::PI, "1", "2").unwrap();
        assert!(aligned.max_entry_distance(&detuned) > 0.1);
    }
}
