//! Deflection angle Δθ = φ − π of the grazing ray, by two routes:
//! the closed-form branch formula and direct root-finding on the
//! transcendental deflection condition. (The third route, trajectory
//! integration, lives in [`crate::ode`].)
//!
//! The deflection condition u(φ) = 0 factors as
//! 2 sin(kφ/2)·[−A sin(kφ/2) + B cos(kφ/2)] = 0; discarding the trivial
//! roots sin(kφ/2) = 0 leaves tan(kφ/2) = −k/(RD), whence
//!
//!   φ = (2m−1)π/k + (2/k)·arctan(RD/k),   m integer.
//!
//! This is the published arctan(−k/(RD)) form rewritten away from the
//! principal-value edge: the published argument is ≈ −4.7e5 while RD/k is
//! ≈ +2.1e-6, which is where arctan actually carries digits. The π/k terms
//! are assembled in two-word arithmetic so the returned φ is correctly
//! rounded, leaving orbit_u(φ) at the representability floor of φ itself.

use serde::{Deserialize, Serialize};

use crate::constants::arcsec_per_rad;
use crate::error::Error;
use crate::fp::TwoFloat;
use crate::model::DerivedQuantities;
use crate::root::brent;
use crate::scalar::{lit, Scalar};

/// How a [`DeflectionResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    RootFind,
    OdeLinearized,
    OdeExact,
}

/// Deflection of the outgoing ray on one branch of the condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflectionResult<T> {
    /// Branch index; m = 1 is the physical branch.
    pub branch_m: i32,
    /// Final polar angle φ where the ray reaches u = 0 (rad).
    pub phi: T,
    /// Deflection Δθ = φ − π (rad); always the literal subtraction of the
    /// stored φ, so the two fields can never disagree.
    pub delta_theta: T,
    /// Δθ in arcseconds.
    pub delta_theta_arcsec: T,
    /// Route that produced this result.
    pub method: Method,
}

impl<T: Scalar> DeflectionResult<T> {
    /// Build from a φ already rounded to the working precision.
    pub(crate) fn from_phi(phi: T, branch_m: i32, method: Method) -> Self {
        let delta_theta = phi - T::PI();
        Self {
            branch_m,
            phi,
            delta_theta,
            delta_theta_arcsec: delta_theta * arcsec_per_rad::<T>(),
            method,
        }
    }

    /// Build from a two-word φ, rounding it once.
    fn from_phi_words(phi: TwoFloat<T>, branch_m: i32, method: Method) -> Self {
        Self::from_phi(phi.value(), branch_m, method)
    }
}

/// Closed-form deflection on branch `m`.
pub fn deflection_closed_form<T: Scalar>(dq: &DerivedQuantities<T>, m: i32) -> DeflectionResult<T> {
    let rd = dq.d / (dq.k * dq.coeff_b);
    let y = (rd / dq.k).atan();
    let odd = lit::<T>(2.0 * f64::from(m) - 1.0);
    let phi = TwoFloat::pi()
        .mul_scalar(odd)
        .add_scalar(y + y)
        .div_scalar(dq.k);
    DeflectionResult::from_phi_words(phi, m, Method::ClosedForm)
}

/// Deflection on branch `m` by bracketed root-finding on the condition
/// tan(kφ/2) + k/(RD) = 0.
///
/// The bracket ((2m−1)π/k, 2mπ/k) contains exactly one nontrivial root and
/// excludes the trivial roots φ = 2jπ/k of the unfactored condition, where
/// a sign change would be masked by the double zero. Branches m ≤ 0 mirror
/// the m = 1 root through the exact 2π/k branch spacing.
pub fn deflection_root_find<T: Scalar>(
    dq: &DerivedQuantities<T>,
    m: i32,
    tol: T,
) -> Result<DeflectionResult<T>, Error> {
    if tol <= T::zero() || !tol.is_finite() {
        return Err(Error::domain(format!(
            "root-find tolerance must be > 0, got {tol}"
        )));
    }
    if m < 1 {
        let base = deflection_root_find(dq, 1, tol)?;
        let spacing = (T::PI() + T::PI()) / dq.k;
        let phi = base.phi + lit::<T>(f64::from(m - 1)) * spacing;
        return Ok(DeflectionResult::from_phi(phi, m, Method::RootFind));
    }

    let k = dq.k;
    let rd = dq.d / (k * dq.coeff_b);
    let ratio = k / rd;
    let half = lit::<T>(0.5);
    let condition = move |phi: T| (k * phi * half).tan() + ratio;

    let pi_over_k = T::PI() / k;
    let lo_exact = lit::<T>(2.0 * f64::from(m) - 1.0) * pi_over_k;
    let hi_exact = lit::<T>(2.0 * f64::from(m)) * pi_over_k;
    // keep the endpoints off the tangent pole / trivial root without
    // stepping over the nontrivial root at lo + (2/k)·arctan(RD/k)
    let nudge = lit::<T>(1e-9).max(hi_exact.abs() * T::epsilon() * lit::<T>(4.0));
    let (lo, hi) = (lo_exact + nudge, hi_exact - nudge);
    let straddles = condition(lo) < T::zero() && condition(hi) > T::zero();
    if !straddles {
        return Err(Error::Bracket {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
        });
    }

    let phi = brent(condition, lo, hi, tol)?;
    Ok(DeflectionResult::from_phi(phi, m, Method::RootFind))
}

/// Closed-form deflection for every branch in `m_min..=m_max`, in order.
/// Angles are reported as-is, without modular reduction.
pub fn branch_sweep<T: Scalar>(
    dq: &DerivedQuantities<T>,
    m_min: i32,
    m_max: i32,
) -> Vec<DeflectionResult<T>> {
    (m_min..=m_max)
        .map(|m| deflection_closed_form(dq, m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::PhysicalConstants;
    use crate::model::{derive, orbit_u, ModelParams};
    use num_traits::FloatConst;

    fn dq_for(multiple: f64) -> DerivedQuantities<f64> {
        let params =
            ModelParams::with_delta_multiple(multiple, PhysicalConstants::iau_nominal()).unwrap();
        derive(&params).unwrap()
    }

    fn ulp(x: f64) -> f64 {
        f64::from_bits(x.abs().to_bits() + 1) - x.abs()
    }

    // ── the published table, m = 1 ──────────────────────────────────

    #[test]
    fn published_deflections_at_the_limb() {
        // (multiple, printed value, independently recomputed value)
        let cases = [
            (1.0, 1.563, 1.5632889489),
            (1.3, 1.769, 1.7695975116),
            (2.0, 2.250, 2.2509849244),
        ];
        for (mult, printed, recomputed) in cases {
            let r = deflection_closed_form(&dq_for(mult), 1);
            assert!(
                (r.delta_theta_arcsec - printed).abs() <= 0.002,
                "delta = {mult}R: {} vs printed {printed}",
                r.delta_theta_arcsec
            );
            assert!(
                (r.delta_theta_arcsec - recomputed).abs() <= 1e-6,
                "delta = {mult}R: {} vs recomputed {recomputed}",
                r.delta_theta_arcsec
            );
        }
    }

    #[test]
    fn newtonian_limit_is_twice_arctan_rd() {
        let dq = dq_for(0.0);
        let rd = dq.d / dq.coeff_b; // k = 1
        let r = deflection_closed_form(&dq, 1);
        assert!((r.delta_theta - 2.0 * rd.atan()).abs() < 1e-15);
        // 0.8756 arcsec: the classical "half of the observed" value
        assert!((r.delta_theta_arcsec - 0.8755951629).abs() < 1e-6);
    }

    #[test]
    fn physical_branch_radian_value() {
        let r = deflection_closed_form(&dq_for(1.3), 1);
        assert!((r.delta_theta - 8.579250837000326e-6).abs() < 1e-12);
    }

    // ── other branches (the second published table) ─────────────────

    #[test]
    fn branch_two_and_zero_are_one_revolution_apart() {
        let dq = dq_for(1.3);
        let m2 = deflection_closed_form(&dq, 2);
        let m0 = deflection_closed_form(&dq, 0);
        assert!((m2.delta_theta_arcsec - 1_296_003.558).abs() < 0.5);
        assert!((m0.delta_theta_arcsec + 1_296_000.018).abs() < 0.5);
        // both within the printed 1.3a
        assert!((m2.delta_theta_arcsec - 1.3e6).abs() <= 0.05 * 1.3e6);
        assert!((m0.delta_theta_arcsec + 1.3e6).abs() <= 0.05 * 1.3e6);
    }

    #[test]
    fn branch_minus_three_matches_print() {
        let r = deflection_closed_form(&dq_for(1.3), -3);
        assert!((r.delta_theta_arcsec + 5.184005e6).abs() < 1.0);
        assert!((r.delta_theta_arcsec + 5.2e6).abs() <= 0.05 * 5.2e6);
    }

    #[test]
    fn branch_nine_exceeds_the_rounded_print() {
        // the print says 10.0a; eight extra revolutions give 10.368a —
        // inside the 5% band that covers the publication's rounding
        let r = deflection_closed_form(&dq_for(1.3), 9);
        assert!((r.delta_theta_arcsec - 1.0368016e7).abs() < 10.0);
        assert!((r.delta_theta_arcsec - 1.0e7).abs() <= 0.05 * 1.0e7);
    }

    // ── the stable arctan rewrite against the published form ────────

    #[test]
    fn naive_arctan_form_agrees_to_one_ulp() {
        // φ = (2/k)[arctan(−k/(RD)) + mπ], evaluated exactly as printed
        for mult in [0.0, 0.5, 1.0, 1.3, 2.0] {
            let dq = dq_for(mult);
            let rd = dq.d / (dq.k * dq.coeff_b);
            let naive = 2.0 / dq.k * ((-dq.k / rd).atan() + f64::PI());
            let stable = deflection_closed_form(&dq, 1).phi;
            assert!(
                (naive - stable).abs() <= ulp(stable),
                "delta = {mult}R: naive {naive:e} vs stable {stable:e}"
            );
        }
    }

    // ── root-finding route ──────────────────────────────────────────

    #[test]
    fn root_find_agrees_with_closed_form() {
        let tol = 1e-15;
        for mult in [0.0, 0.5, 1.0, 1.3, 2.0] {
            let dq = dq_for(mult);
            for m in [1, 2, 3] {
                let cf = deflection_closed_form(&dq, m);
                let rf = deflection_root_find(&dq, m, tol).unwrap();
                assert!(
                    (cf.delta_theta - rf.delta_theta).abs() <= 1e-12,
                    "delta = {mult}R m = {m}: gap {:e}",
                    (cf.delta_theta - rf.delta_theta).abs()
                );
                assert_eq!(rf.method, Method::RootFind);
            }
        }
    }

    #[test]
    fn root_find_physical_branch_value() {
        let rf = deflection_root_find(&dq_for(1.3), 1, 1e-15).unwrap();
        assert!((rf.delta_theta - 8.579250837000326e-6).abs() <= 1e-12);
        assert!((rf.delta_theta_arcsec - 1.7696).abs() < 1e-3);
    }

    #[test]
    fn root_find_newtonian_limit() {
        let dq = dq_for(0.0);
        let rd = dq.d / dq.coeff_b;
        let rf = deflection_root_find(&dq, 1, 1e-15).unwrap();
        assert!((rf.delta_theta - 2.0 * rd.atan()).abs() <= 1e-12);
    }

    #[test]
    fn root_find_branch_spacing_identity() {
        let dq = dq_for(1.3);
        let m1 = deflection_root_find(&dq, 1, 1e-15).unwrap();
        let m3 = deflection_root_find(&dq, 3, 1e-15).unwrap();
        let spacing = m3.delta_theta - m1.delta_theta;
        let expected = 4.0 * f64::PI() / dq.k;
        assert!(((spacing - expected) / expected).abs() <= 1e-12);
    }

    #[test]
    fn root_find_mirrors_nonpositive_branches() {
        let dq = dq_for(1.3);
        for m in [0, -1, -4] {
            let rf = deflection_root_find(&dq, m, 1e-15).unwrap();
            let cf = deflection_closed_form(&dq, m);
            assert!(
                (rf.delta_theta - cf.delta_theta).abs() <= 1e-11,
                "m = {m}: {:e}",
                (rf.delta_theta - cf.delta_theta).abs()
            );
        }
    }

    #[test]
    fn root_find_residual_at_returned_phi() {
        for mult in [0.0, 1.3] {
            let dq = dq_for(mult);
            let tol = 1e-15;
            let rf = deflection_root_find(&dq, 1, tol).unwrap();
            // condition residual translated to u-space: |u| <= |u'|·(tol + a few ulp)
            let slope = dq.coeff_b * dq.k;
            let bound = slope * (tol + 8.0 * ulp(rf.phi)) * 2.0;
            assert!(orbit_u(rf.phi, &dq).abs() <= bound);
        }
    }

    #[test]
    fn root_find_rejects_bad_tolerance() {
        assert!(deflection_root_find(&dq_for(1.3), 1, 0.0).is_err());
        assert!(deflection_root_find(&dq_for(1.3), 1, -1e-9).is_err());
    }

    #[test]
    fn inconsistent_quantities_fail_the_bracket() {
        // a negative D flips the sign of the condition at both ends
        let dq = DerivedQuantities {
            h: 2.0856e17,
            d: -3.05e-15,
            k: 1.0,
            coeff_a: 3.05e-15,
            coeff_b: 1.4374e-9,
        };
        assert!(matches!(
            deflection_root_find(&dq, 1, 1e-12),
            Err(Error::Bracket { .. })
        ));
    }

    // ── cross-module: the returned φ really is the orbit's zero ─────

    #[test]
    fn orbit_vanishes_at_physical_phi() {
        for mult in [0.0, 0.5, 1.0, 1.3, 2.0] {
            let dq = dq_for(mult);
            let phi = deflection_closed_form(&dq, 1).phi;
            let u = orbit_u(phi, &dq).abs();
            assert!(
                u <= 1e-10 * dq.d,
                "delta = {mult}R: |u(phi)| = {u:e} vs {:e}",
                1e-10 * dq.d
            );
        }
    }

    #[test]
    fn orbit_vanishes_at_higher_branches_within_representability() {
        // for m >= 2 the roots sit where one ulp of φ spans more than
        // 1e-10·D/|u'|, so the bound is the ulp floor, not a fixed multiple
        for mult in [0.0, 0.5, 1.0, 1.3, 2.0] {
            let dq = dq_for(mult);
            for m in [2, 3] {
                let phi = deflection_closed_form(&dq, m).phi;
                let u = orbit_u(phi, &dq).abs();
                let floor = 0.5 * ulp(phi) * dq.coeff_b * dq.k * 1.1 + 1e-12 * dq.d;
                assert!(
                    u <= floor,
                    "delta = {mult}R m = {m}: |u| = {u:e} vs {floor:e}"
                );
            }
        }
    }

    // ── structural invariants ───────────────────────────────────────

    #[test]
    fn result_fields_are_consistent() {
        for mult in [0.0, 1.3] {
            for m in [-2, 1, 5] {
                let r = deflection_closed_form(&dq_for(mult), m);
                assert_eq!(r.delta_theta, r.phi - f64::PI());
                assert_eq!(
                    r.delta_theta_arcsec,
                    r.delta_theta * crate::constants::arcsec_per_rad::<f64>()
                );
                assert_eq!(r.branch_m, m);
            }
        }
    }

    #[test]
    fn sweep_is_ordered_and_linear_in_m() {
        let dq = dq_for(1.3);
        let sweep = branch_sweep(&dq, -7, 9);
        assert_eq!(sweep.len(), 17);
        let d1 = sweep[8].delta_theta; // m = 1
        for j in 1..=8 {
            let plus = sweep[(8 + j) as usize].delta_theta;
            let minus = sweep[(8 - j) as usize].delta_theta;
            assert!(
                (plus + minus - 2.0 * d1).abs() <= 1e-12,
                "j = {j}: asymmetry {:e}",
                (plus + minus - 2.0 * d1).abs()
            );
        }
        assert!(branch_sweep(&dq, 3, 2).is_empty());
    }

    #[test]
    fn branch_spacing_constant_across_sweep() {
        let dq = dq_for(1.3);
        let expected = 2.0 * f64::PI() / dq.k;
        let sweep = branch_sweep(&dq, -10, 10);
        for pair in sweep.windows(2) {
            let spacing = pair[1].delta_theta - pair[0].delta_theta;
            assert!(((spacing - expected) / expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn deflection_monotone_in_delta() {
        let mut last = -1.0;
        for i in 0..20 {
            let mult = 2.0 * i as f64 / 19.0;
            let r = deflection_closed_form(&dq_for(mult), 1);
            assert!(r.delta_theta > last, "not increasing at delta = {mult}R");
            last = r.delta_theta;
        }
    }

    #[test]
    fn first_order_expansion_holds_to_a_part_in_a_thousand() {
        // Δθ ≈ 2RD + πDδ/2 for small Dδ
        for mult in [0.0, 0.3, 0.7, 1.0, 1.3, 1.6, 2.0] {
            let params =
                ModelParams::with_delta_multiple(mult, PhysicalConstants::iau_nominal()).unwrap();
            let dq = derive(&params).unwrap();
            let rd = dq.d / (dq.k * dq.coeff_b) * dq.k; // R·D from stored fields
            let approx = 2.0 * rd + f64::PI() * dq.d * params.delta / 2.0;
            let r = deflection_closed_form(&dq, 1);
            assert!(
                (r.delta_theta - approx).abs() <= 1e-3 * r.delta_theta,
                "delta = {mult}R"
            );
        }
    }

    #[test]
    fn method_names_serialize_as_snake_case() {
        assert_eq!(
            serde_json::to_string(&Method::ClosedForm).unwrap(),
            "\"closed_form\""
        );
        assert_eq!(
            serde_json::to_string(&Method::OdeLinearized).unwrap(),
            "\"ode_linearized\""
        );
    }

    // ── f32 smoke: pipeline survives single precision ───────────────

    #[test]
    fn closed_form_in_f32_reaches_phi_representability() {
        let constants = PhysicalConstants::<f32>::iau_nominal();
        let params = ModelParams::with_delta_multiple(1.3_f32, constants).unwrap();
        let dq = derive(&params).unwrap();
        let r = deflection_closed_form(&dq, 1);
        // Δθ is recovered from an f32 φ near π, so one ulp of φ (≈2.4e-7 rad,
        // ≈0.025 arcsec) is the attainable resolution
        assert!(
            (r.delta_theta_arcsec - 1.7696).abs() < 0.05,
            "{}",
            r.delta_theta_arcsec
        );
    }
}
