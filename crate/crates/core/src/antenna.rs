//! 3D pyramidal-plus-sphere sectored antenna model.
//!
//! The main lobe is a rectangular pyramid with horizontal/vertical
//! beamwidths; everything else radiates at the side-lobe level. Gains
//! follow from the solid-angle split and the side-lobe power ratio `k`, and
//! conserve total radiated power exactly.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AntennaError {
    #[error("beamwidths {phi_h} x {phi_v} rad: tan(phi_h/2)*tan(phi_v/2) > 1, pyramid exceeds hemisphere")]
    BeamTooWide { phi_h: f64, phi_v: f64 },
    #[error("beamwidth {0} rad outside (0, pi)")]
    BeamwidthRange(f64),
    #[error("side-lobe ratio {0} outside (0, 1)")]
    SideLobeRatio(f64),
    #[error("gain {0} must be positive")]
    GainRange(f64),
}

/// Solid angle of the rectangular-pyramid main lobe,
/// `4 asin(tan(phi_h/2) tan(phi_v/2))`.
pub fn main_lobe_solid_angle(phi_h: f64, phi_v: f64) -> Result<f64, AntennaError> {
    for &p in &[phi_h, phi_v] {
        if !(p > 0.0 && p < std::f64::consts::PI) {
            return Err(AntennaError::BeamwidthRange(p));
        }
    }
    let arg = (phi_h / 2.0).tan() * (phi_v / 2.0).tan();
    if arg > 1.0 {
        return Err(AntennaError::BeamTooWide { phi_h, phi_v });
    }
    Ok(4.0 * arg.asin())
}

/// Main/side-lobe gains from the side-lobe power ratio and main-lobe solid
/// angle: `G^m = 4pi / ((k+1) Om)`, `G^s = 4pi k / ((k+1)(4pi - Om))`.
pub fn sectored_gains(k: f64, omega_main: f64) -> (f64, f64) {
    let four_pi = 4.0 * std::f64::consts::PI;
    let g_main = four_pi / ((k + 1.0) * omega_main);
    let g_side = four_pi * k / ((k + 1.0) * (four_pi - omega_main));
    (g_main, g_side)
}

/// A pointing direction: azimuth in [0, 2pi), elevation in [-pi/2, pi/2]
/// (positive above horizontal; APs point down, UEs point up).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boresight {
    pub azimuth: f64,
    pub elevation: f64,
}

impl Boresight {
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Self { azimuth, elevation }
    }
}

/// Sectored pattern of one side (AP or UE).
#[derive(Debug, Clone, Copy)]
pub struct AntennaPattern {
    pub phi_h: f64,
    pub phi_v: f64,
    pub side_lobe_ratio: f64,
    pub omega_main: f64,
    pub omega_side: f64,
    pub gain_main: f64,
    pub gain_side: f64,
}

impl AntennaPattern {
    /// Pattern with gains computed from the beamwidths and `k`.
    pub fn from_beamwidths(phi_h: f64, phi_v: f64, k: f64) -> Result<Self, AntennaError> {
        if !(k > 0.0 && k < 1.0) {
            return Err(AntennaError::SideLobeRatio(k));
        }
        let omega_main = main_lobe_solid_angle(phi_h, phi_v)?;
        let (gain_main, gain_side) = sectored_gains(k, omega_main);
        Ok(Self {
            phi_h,
            phi_v,
            side_lobe_ratio: k,
            omega_main,
            omega_side: 4.0 * std::f64::consts::PI - omega_main,
            gain_main,
            gain_side,
        })
    }

    /// Pattern with explicitly overridden gains; beamwidths still define the
    /// geometric lobe extent.
    pub fn with_gain_overrides(
        phi_h: f64,
        phi_v: f64,
        k: f64,
        gain_main: f64,
        gain_side: f64,
    ) -> Result<Self, AntennaError> {
        let mut p = Self::from_beamwidths(phi_h, phi_v, k)?;
        if gain_main <= 0.0 {
            return Err(AntennaError::GainRange(gain_main));
        }
        if gain_side <= 0.0 {
            return Err(AntennaError::GainRange(gain_side));
        }
        p.gain_main = gain_main;
        p.gain_side = gain_side;
        Ok(p)
    }

    /// True when `dir` falls inside the main-lobe pyramid around `bore`.
    /// Boundaries are inclusive; azimuth and elevation are tested
    /// independently.
    pub fn contains(&self, bore: Boresight, dir: Boresight) -> bool {
        wrap_angle(dir.azimuth - bore.azimuth).abs() <= self.phi_h / 2.0
            && (dir.elevation - bore.elevation).abs() <= self.phi_v / 2.0
    }

    /// Gain seen along `dir` for an antenna whose main lobe points along
    /// `bore`.
    pub fn gain_towards(&self, bore: Boresight, dir: Boresight) -> f64 {
        if self.contains(bore, dir) {
            self.gain_main
        } else {
            self.gain_side
        }
    }
}

/// Map an angle difference into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn solid_angle_anchors() {
        // arithmetic re-evaluation of 4 asin(tan^2(phi/2))
        assert_relative_eq!(
            main_lobe_solid_angle(deg(10.0), deg(10.0)).unwrap(),
            0.030_617_364_0,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            main_lobe_solid_angle(deg(33.0), deg(33.0)).unwrap(),
            0.351_421_642_9,
            max_relative = 1e-8
        );
        // hemisphere at phi = pi/2
        assert_relative_eq!(
            main_lobe_solid_angle(PI / 2.0, PI / 2.0).unwrap(),
            2.0 * PI,
            max_relative = 1e-12
        );
    }

    #[test]
    fn solid_angle_domain_error() {
        assert!(main_lobe_solid_angle(deg(120.0), deg(120.0)).is_err());
        assert!(main_lobe_solid_angle(0.0, deg(10.0)).is_err());
    }

    #[test]
    fn gains_match_table_within_1db() {
        let to_db = |g: f64| 10.0 * g.log10();
        let ap = AntennaPattern::from_beamwidths(deg(10.0), deg(10.0), 0.1).unwrap();
        assert!((to_db(ap.gain_main) - 25.0).abs() < 1.0, "{}", to_db(ap.gain_main));
        assert!((to_db(ap.gain_side) + 10.0).abs() < 1.0, "{}", to_db(ap.gain_side));
        let ue = AntennaPattern::from_beamwidths(deg(33.0), deg(33.0), 0.1).unwrap();
        assert!((to_db(ue.gain_main) - 15.0).abs() < 1.0, "{}", to_db(ue.gain_main));
        assert!((to_db(ue.gain_side) + 10.0).abs() < 1.0, "{}", to_db(ue.gain_side));
    }

    #[test]
    fn power_conservation_identity() {
        let p = AntennaPattern::from_beamwidths(deg(10.0), deg(10.0), 0.1).unwrap();
        let tot = p.gain_main * p.omega_main + p.gain_side * p.omega_side;
        assert_relative_eq!(tot, 4.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn gain_towards_boundaries() {
        let p = AntennaPattern::from_beamwidths(deg(10.0), deg(20.0), 0.1).unwrap();
        let b = Boresight::new(1.0, -0.3);
        assert_eq!(p.gain_towards(b, b), p.gain_main);
        // back lobe
        assert_eq!(
            p.gain_towards(b, Boresight::new(1.0 + PI, -0.3)),
            p.gain_side
        );
        // exactly on the horizontal edge: inclusive
        assert_eq!(
            p.gain_towards(b, Boresight::new(1.0 + deg(5.0), -0.3)),
            p.gain_main
        );
        // just beyond it
        assert_eq!(
            p.gain_towards(b, Boresight::new(1.0 + deg(5.0) + 1e-9, -0.3)),
            p.gain_side
        );
    }

    #[test]
    fn narrow_beam_limit() {
        // Om / phi^2 -> 1 as phi -> 0
        for &phi in &[1e-2, 1e-3, 1e-4] {
            let om = main_lobe_solid_angle(phi, phi).unwrap();
            assert_relative_eq!(om / (phi * phi), 1.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_relative_eq!(wrap_angle(3.0 * PI), PI);
        assert_relative_eq!(wrap_angle(-PI), PI);
        assert_relative_eq!(wrap_angle(0.1 - 2.0 * PI), 0.1, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn conservation_random(k in 0.01f64..0.99, ph in 0.02f64..1.4, pv in 0.02f64..1.4) {
            prop_assume!((ph / 2.0).tan() * (pv / 2.0).tan() <= 1.0);
            let p = AntennaPattern::from_beamwidths(ph, pv, k).unwrap();
            let tot = p.gain_main * p.omega_main + p.gain_side * p.omega_side;
            prop_assert!((tot / (4.0 * PI) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rotation_invariance(offset in -10.0f64..10.0, az in 0.0f64..6.28, el in -1.5f64..1.5) {
            let p = AntennaPattern::from_beamwidths(0.3, 0.3, 0.1).unwrap();
            let b = Boresight::new(1.2, 0.1);
            let d = Boresight::new(az, el);
            let b2 = Boresight::new(b.azimuth + offset, b.elevation);
            let d2 = Boresight::new(d.azimuth + offset, d.elevation);
            prop_assert_eq!(p.gain_towards(b, d) == p.gain_main,
                            p.gain_towards(b2, d2) == p.gain_main);
        }
    }
}
