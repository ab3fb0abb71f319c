//! Numerical analysis of the CS gate: solving for the reflectivities that
//! make its diagonal uniform, converting reflectivities to wave-plate angles,
//! process fidelity against the ideal conditional sign flip, landscape sweeps
//! over the reflectivity square, and the phase sensitivity of the composite
//! splitter.

use num_complex::Complex64 as C64;

use crate::elements::{composite_pol_bs, pol_beam_splitter};
use crate::error::{Error, Result};
use crate::fock::{ModeRegistry, QubitAmplitudes};
use crate::gates::{cs_closed_form, NsConfig};
use crate::numfmt::sig12;

/// The two defining equalities of the gate's working point, as residuals:
/// √(R_V R_H)(1−2R_H) − R_H and R_H R_V (2−3R_H) − R_H.
pub fn equality_residuals(r_v: f64, r_h: f64) -> (f64, f64) {
    (
        (r_v * r_h).sqrt() * (1.0 - 2.0 * r_h) - r_h,
        r_h * r_v * (2.0 - 3.0 * r_h) - r_h,
    )
}

/// The algebraic solution (5−3√2, (3−√2)/7), used as the oracle for
/// [`solve_magic_reflectivities`] and by consumers that want the working
/// point without running the solver.
pub fn magic_reflectivities() -> (f64, f64) {
    let s2 = std::f64::consts::SQRT_2;
    (5.0 - 3.0 * s2, (3.0 - s2) / 7.0)
}

/// Solve the two equality constraints on (0,1)² numerically.
///
/// The second equality pins R_V = 1/(2−3R_H) wherever that value is a valid
/// reflectivity (R_H < 1/3; larger R_H would need R_V > 1 and is rejected).
/// The remaining one-dimensional residual is bracketed by a scan and driven
/// to machine precision by bisection. Both residuals at the returned point
/// are checked against `tol`.
pub fn solve_magic_reflectivities(tol: f64) -> Result<(f64, f64)> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::OutOfRange { name: "tol", value: tol, min: f64::MIN_POSITIVE, max: f64::MAX });
    }
    let r_v_of = |r_h: f64| 1.0 / (2.0 - 3.0 * r_h);
    let residual = |r_h: f64| {
        let r_v = r_v_of(r_h);
        (r_v * r_h).sqrt() * (1.0 - 2.0 * r_h) - r_h
    };

    // Valid domain for the eliminated variable. R_H = 0 satisfies both
    // equalities but trivially (the gate never succeeds), so the scan starts
    // strictly inside.
    let (lo_edge, hi_edge) = (1e-9, 1.0 / 3.0 - 1e-12);
    let steps = 3000;
    let mut bracket = None;
    let mut prev = (lo_edge, residual(lo_edge));
    for k in 1..=steps {
        let x = lo_edge + (hi_edge - lo_edge) * k as f64 / steps as f64;
        let f = residual(x);
        if prev.1 == 0.0 {
            bracket = Some((prev.0, prev.0));
            break;
        }
        if prev.1.signum() != f.signum() {
            bracket = Some((prev.0, x));
            break;
        }
        prev = (x, f);
    }
    let (mut lo, mut hi) =
        bracket.ok_or_else(|| Error::NoRoot("no sign change inside the valid domain".into()))?;

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if residual(lo).signum() == residual(mid).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_h = 0.5 * (lo + hi);
    let r_v = r_v_of(r_h);
    if !(0.0 < r_v && r_v < 1.0) {
        return Err(Error::NoRoot(format!("eliminated variable {r_v} is not a reflectivity")));
    }
    let (res1, res2) = equality_residuals(r_v, r_h);
    if res1.abs() > tol || res2.abs() > tol {
        return Err(Error::NoRoot(format!(
            "residuals {} / {} exceed tolerance {}",
            sig12(res1),
            sig12(res2),
            sig12(tol)
        )));
    }
    Ok((r_v, r_h))
}

/// Wave-plate angles (radians, principal branch in [0, π/2]) realizing the
/// given reflectivities: α = arccos√R_V, β = arccos√R_H.
pub fn reflectivity_to_angles(r_v: f64, r_h: f64) -> Result<(f64, f64)> {
    for (name, value) in [("r_v", r_v), ("r_h", r_h)] {
        if !(0.0..=1.0).contains(&value) || !value.is_finite() {
            return Err(Error::OutOfRange { name, value, min: 0.0, max: 1.0 });
        }
    }
    Ok((r_v.sqrt().acos(), r_h.sqrt().acos()))
}

/// Process fidelity of a diagonal gate against the conditional sign flip
/// diag(1, 1, 1, −1): F = |Σ conj(dᵢ)·zᵢ|² / (4·Σ|dᵢ|²).
///
/// Scale-invariant; equals 1 exactly iff the diagonal is proportional to the
/// target up to a global phase.
pub fn process_fidelity(diag: &[C64; 4]) -> Result<f64> {
    let weight: f64 = diag.iter().map(|z| z.norm_sqr()).sum();
    if weight == 0.0 {
        return Err(Error::ZeroDiagonal);
    }
    let target = [C64::ONE, C64::ONE, C64::ONE, -C64::ONE];
    let overlap: C64 = diag
        .iter()
        .zip(target.iter())
        .map(|(d, z)| d.conj() * z)
        .sum();
    Ok(overlap.norm_sqr() / (4.0 * weight))
}

/// One point of the reflectivity landscape, evaluated on the uniform
/// normalized input (1/2, 1/2, 1/2, 1/2).
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub r_v: f64,
    pub r_h: f64,
    /// Output amplitudes on |00⟩, |01⟩, |10⟩, |11⟩.
    pub amps: [C64; 4],
    pub success_probability: f64,
    /// Zero when the gate diagonal vanishes identically (the gate never
    /// fires, so there is nothing to grade).
    pub process_fidelity: f64,
}

/// Evaluate the closed-form gate on the uniform input over a reflectivity
/// grid. Output order is input order.
pub fn sweep(grid: &[(f64, f64)]) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&(r_v, r_h)| {
            let cfg = NsConfig::new(r_v, r_h)?;
            let out = cs_closed_form(&QubitAmplitudes::uniform(), &cfg);
            let amps = out.as_array();
            let fidelity = process_fidelity(&amps).unwrap_or(0.0);
            Ok(SweepRow {
                r_v,
                r_h,
                amps,
                success_probability: out.squared_norm(),
                process_fidelity: fidelity,
            })
        })
        .collect()
}

/// Exact CSV header of the sweep report.
pub const SWEEP_CSV_HEADER: &str = "r_v,r_h,amp00_re,amp00_im,amp01_re,amp01_im,amp10_re,amp10_im,amp11_re,amp11_im,success_prob,fidelity";

/// Render sweep rows as CSV with 12-significant-digit reals.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let mut fields = vec![sig12(row.r_v), sig12(row.r_h)];
        for amp in &row.amps {
            fields.push(sig12(amp.re));
            fields.push(sig12(amp.im));
        }
        fields.push(sig12(row.success_probability));
        fields.push(sig12(row.process_fidelity));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Deviation of the composite splitter from its aligned (φ = 0) form, as the
/// max-entry distance between the two transforms, for each sampled phase.
pub fn phase_sensitivity(alpha: f64, beta: f64, phi_samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    let registry = ModeRegistry::polarized(["1", "2"])?;
    let aligned = composite_pol_bs(&registry, alpha, beta, 0.0, "1", "2")?;
    phi_samples
        .iter()
        .map(|&phi| {
            let detuned = composite_pol_bs(&registry, alpha, beta, phi, "1", "2")?;
            Ok((phi, aligned.max_entry_distance(&detuned)))
        })
        .collect()
}

/// Max-entry distance between the composite splitter at angles (α, β, φ) and
/// the ideal polarization-sensitive splitter with R_V = cos²α, R_H = cos²β.
pub fn composite_deviation_from_ideal(alpha: f64, beta: f64, phi: f64) -> Result<f64> {
    let registry = ModeRegistry::polarized(["1", "2"])?;
    let composite = composite_pol_bs(&registry, alpha, beta, phi, "1", "2")?;
    let ideal = pol_beam_splitter(
        &registry,
        alpha.cos().powi(2),
        beta.cos().powi(2),
        "1",
        "2",
    )?;
    Ok(composite.max_entry_distance(&ideal))
}
