//! Probability that an interfering AP's main lobe illuminates the typical
//! user.
//!
//! Horizontally the probability is the beam fraction `phi_AH / 2pi`.
//! Vertically it is the probability that the interferer's depression angle
//! towards its own UE falls within half a beamwidth of its depression angle
//! towards the typical user, driven by the association-distance PDF. The
//! closed form is piecewise in the horizontal distance with knees at `x_mu`
//! (peak) and `x_nu` (outer support edge).

use crate::scenario::{assoc_pdf_normalizer, DerivedParams, Environment, Scenario, ScenarioError};
use crate::specfun::one_minus_exp1p;
use std::f64::consts::FRAC_PI_2;

/// `x_mu = hbar cot(min(pi/2, psi_bar + phi_av/2))` and
/// `x_nu = hbar cot(max(0, psi_bar - phi_av/2))`, the knees of the vertical
/// hitting probability. `x_nu` is infinite when the beam's lower edge
/// reaches the horizon (`psi_bar <= phi_av/2`).
pub fn elevation_window(psi_bar: f64, phi_av: f64, hbar: f64) -> (f64, f64) {
    let upper = psi_bar + phi_av / 2.0;
    let x_mu = if upper >= FRAC_PI_2 { 0.0 } else { hbar / upper.tan() };
    let lower = psi_bar - phi_av / 2.0;
    let x_nu = if lower <= 0.0 {
        f64::INFINITY
    } else {
        hbar / lower.tan()
    };
    (x_mu, x_nu)
}

/// Evaluation context for the hitting probability at a fixed association
/// radius.
#[derive(Debug, Clone)]
pub struct HittingModel {
    pub phi_ah: f64,
    pub phi_av: f64,
    pub hbar: f64,
    pub r_t: f64,
    pub environment: Environment,
    /// Wall blockage rate shaping the association PDF (typical indoor only).
    pub eta_w: f64,
    pub psi_bar: f64,
    pub x_mu: f64,
    pub x_nu: f64,
    pub rho: f64,
}

impl HittingModel {
    pub fn new(
        phi_ah: f64,
        phi_av: f64,
        hbar: f64,
        r_t: f64,
        eta_w: f64,
        environment: Environment,
    ) -> Self {
        let eta_w = match environment {
            Environment::TypicalIndoor => eta_w,
            Environment::OpenOffice => 0.0,
        };
        let psi_bar = (hbar / r_t).atan();
        let (x_mu, x_nu) = elevation_window(psi_bar, phi_av, hbar);
        let rho = assoc_pdf_normalizer(eta_w, r_t);
        Self {
            phi_ah,
            phi_av,
            hbar,
            r_t,
            environment,
            eta_w,
            psi_bar,
            x_mu,
            x_nu,
            rho,
        }
    }

    pub fn from_scenario(s: &Scenario, environment: Environment) -> Result<Self, ScenarioError> {
        Ok(Self::from_derived(s, &s.derive()?, environment))
    }

    pub fn from_derived(s: &Scenario, d: &DerivedParams, environment: Environment) -> Self {
        Self::new(
            s.ap_antenna.phi_h,
            s.ap_antenna.phi_v,
            d.hbar,
            d.r_t,
            d.eta_w,
            environment,
        )
    }

    /// CDF of the association distance, clamped to its [0, R_T] support.
    fn assoc_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.r_t {
            return 1.0;
        }
        if self.eta_w == 0.0 {
            (t / self.r_t) * (t / self.r_t)
        } else {
            one_minus_exp1p(self.eta_w * t) / one_minus_exp1p(self.eta_w * self.r_t)
        }
    }

    /// Which of the three closed-form branches `x` falls in (boundary
    /// convention: inclusive left, exclusive right).
    pub fn branch(&self, x: f64) -> u8 {
        if x >= self.x_nu {
            3
        } else if x <= self.x_mu {
            1
        } else {
            2
        }
    }

    /// Horizontal hitting probability `phi_AH / 2pi`, distance-free.
    pub fn hitting_prob_horizontal(&self) -> f64 {
        self.phi_ah / (2.0 * std::f64::consts::PI)
    }

    /// Vertical hitting probability at horizontal distance `x`.
    ///
    /// All branches reduce to a difference of the association CDF at the
    /// distances subtended by the beam's elevation edges; the window is
    /// clipped to the PDF support so the value agrees with the defining
    /// integral of the elevation PDF everywhere (including `x = 0`, where
    /// the upper beam edge passes the vertical).
    pub fn hitting_prob_vertical(&self, x: f64) -> f64 {
        if self.branch(x) == 3 {
            return 0.0;
        }
        let psi = self.hbar.atan2(x); // x = 0 -> pi/2
        let upper = psi + self.phi_av / 2.0;
        let lower = psi - self.phi_av / 2.0;
        // cot is decreasing: the beam's upper elevation edge is the inner
        // distance bound and the lower edge the outer one
        let x_inner = if upper >= FRAC_PI_2 { 0.0 } else { self.hbar / upper.tan() };
        let x_outer = if lower <= 0.0 {
            f64::INFINITY
        } else {
            self.hbar / lower.tan()
        };
        (self.assoc_cdf(x_outer) - self.assoc_cdf(x_inner)).max(0.0)
    }

    /// Product of the horizontal and vertical hitting probabilities.
    pub fn hitting_prob(&self, x: f64) -> f64 {
        self.hitting_prob_horizontal() * self.hitting_prob_vertical(x)
    }

    /// PDF of the elevation angle of an interferer's own link, supported on
    /// `[psi_bar, pi/2]`.
    pub fn elevation_pdf(&self, psi: f64) -> f64 {
        if psi < self.psi_bar || psi > FRAC_PI_2 {
            return 0.0;
        }
        let cot = 1.0 / psi.tan();
        let csc2 = 1.0 / (psi.sin() * psi.sin());
        let h2 = self.hbar * self.hbar;
        match self.environment {
            Environment::TypicalIndoor => {
                self.rho * h2 * cot * csc2 * (-self.eta_w * self.hbar * cot).exp()
            }
            Environment::OpenOffice => 2.0 * h2 / (self.r_t * self.r_t) * cot * csc2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadratureSpec};
    use approx::assert_relative_eq;

    // Table II blockage constants with the R_T = 12.2 m of the reference
    // figure
    const ETA_W: f64 = 0.076_394_372_684_109_8;
    const HBAR: f64 = 1.7;
    const RT: f64 = 12.2;

    fn indoor() -> HittingModel {
        HittingModel::new(
            10f64.to_radians(),
            10f64.to_radians(),
            HBAR,
            RT,
            ETA_W,
            Environment::TypicalIndoor,
        )
    }

    fn open_office() -> HittingModel {
        HittingModel::new(
            10f64.to_radians(),
            10f64.to_radians(),
            HBAR,
            RT,
            0.0,
            Environment::OpenOffice,
        )
    }

    #[test]
    fn window_anchors() {
        let m = indoor();
        assert_relative_eq!(m.x_mu, 7.403_137_002_0, max_relative = 1e-9);
        assert_relative_eq!(m.x_nu, 33.183_008_477_7, max_relative = 1e-9);
        assert_relative_eq!(m.rho, 0.024_393_371_529, max_relative = 1e-9);
        assert_relative_eq!(m.psi_bar, (HBAR / RT).atan());
    }

    #[test]
    fn window_infinite_when_beam_reaches_horizon() {
        // psi_bar <= phi_av/2 makes the outer edge infinite
        let (x_mu, x_nu) = elevation_window(0.05, 0.2, HBAR);
        assert!(x_nu.is_infinite());
        assert!(x_mu > 0.0);
        // and a beam past vertical pins x_mu at 0
        let (x_mu, _) = elevation_window(1.5, 0.2, HBAR);
        assert_eq!(x_mu, 0.0);
    }

    #[test]
    fn horizontal_variants() {
        let m = indoor();
        assert_relative_eq!(m.hitting_prob_horizontal(), 1.0 / 36.0, max_relative = 1e-12);
        let omni = HittingModel::new(
            2.0 * std::f64::consts::PI,
            10f64.to_radians(),
            HBAR,
            RT,
            ETA_W,
            Environment::TypicalIndoor,
        );
        assert_relative_eq!(omni.hitting_prob_horizontal(), 1.0);
        let zero = HittingModel::new(0.0, 10f64.to_radians(), HBAR, RT, ETA_W, Environment::TypicalIndoor);
        assert_eq!(zero.hitting_prob_horizontal(), 0.0);
    }

    #[test]
    fn vertical_anchors_frozen_from_quadrature() {
        // quadrature of the elevation PDF over the clipped window froze these
        let m = indoor();
        assert_relative_eq!(m.hitting_prob_vertical(2.0), 0.030_436_430_596, max_relative = 1e-9);
        assert_relative_eq!(m.hitting_prob_vertical(10.0), 0.626_929_804_915, max_relative = 1e-9);
        assert_relative_eq!(m.hitting_prob_vertical(15.0), 0.434_332_554_139, max_relative = 1e-9);
        let oo = open_office();
        assert_relative_eq!(oo.hitting_prob_vertical(2.0), 0.019_618_012_190, max_relative = 1e-9);
        assert_relative_eq!(oo.hitting_prob_vertical(10.0), 0.715_785_431_556, max_relative = 1e-9);
    }

    #[test]
    fn vertical_vanishes_beyond_outer_edge() {
        let m = indoor();
        assert_eq!(m.hitting_prob_vertical(m.x_nu), 0.0);
        assert_eq!(m.hitting_prob_vertical(m.x_nu + 5.0), 0.0);
        assert_eq!(m.branch(m.x_nu), 3);
    }

    #[test]
    fn open_office_branch_formulas() {
        // Corollary expressions: branch 2 is 1 - (hbar/R_T)^2 cot^2(psi + phi/2)
        let m = open_office();
        let x = 15.0;
        assert_eq!(m.branch(x), 2);
        let psi = (HBAR / x).atan();
        let want = 1.0
            - (HBAR / RT).powi(2) * (1.0 / (psi + m.phi_av / 2.0).tan()).powi(2);
        assert_relative_eq!(m.hitting_prob_vertical(x), want, max_relative = 1e-12);
        // branch 1: difference of cot^2 terms
        let x = 3.0;
        assert_eq!(m.branch(x), 1);
        let psi = (HBAR / x).atan();
        let c = |a: f64| (1.0 / a.tan()).powi(2);
        let want = (HBAR / RT).powi(2) * (c(psi - m.phi_av / 2.0) - c(psi + m.phi_av / 2.0));
        assert_relative_eq!(m.hitting_prob_vertical(x), want, max_relative = 1e-12);
    }

    #[test]
    fn typical_indoor_branch_formulas() {
        // Proposition branch 2 with the e^{-eta_W R_T}(1 + eta_W R_T) tail term
        let m = indoor();
        let x = 15.0;
        let psi = (HBAR / x).atan();
        let t = HBAR / (psi + m.phi_av / 2.0).tan();
        let g = |u: f64| (-ETA_W * u).exp() * (1.0 + ETA_W * u);
        let want = m.rho / (ETA_W * ETA_W) * (g(t) - g(RT));
        assert_relative_eq!(m.hitting_prob_vertical(x), want, max_relative = 1e-10);
    }

    fn vertical_by_quadrature(m: &HittingModel, x: f64) -> f64 {
        let psi = m.hbar.atan2(x);
        let a = (psi - m.phi_av / 2.0).max(m.psi_bar);
        let b = (psi + m.phi_av / 2.0).min(FRAC_PI_2);
        if b <= a {
            return 0.0;
        }
        let spec = QuadratureSpec {
            rel_tol: 1e-12,
            ..Default::default()
        };
        integrate(|u| m.elevation_pdf(u), a, b, &spec).unwrap()
    }

    #[test]
    fn direct_integral_equivalence() {
        // the defining integral of the elevation PDF, clipped to support,
        // must reproduce the closed form everywhere
        for m in [indoor(), open_office()] {
            let mut x = 0.0;
            while x < 40.0 {
                let closed = m.hitting_prob_vertical(x);
                let quad = vertical_by_quadrature(&m, x);
                assert!(
                    (closed - quad).abs() <= 1e-8,
                    "x = {x}: closed {closed} vs quad {quad}"
                );
                x += 0.37;
            }
        }
    }

    #[test]
    fn elevation_pdf_normalizes() {
        let spec = QuadratureSpec {
            rel_tol: 1e-12,
            ..Default::default()
        };
        for m in [indoor(), open_office()] {
            let total = integrate(|u| m.elevation_pdf(u), m.psi_bar, FRAC_PI_2, &spec).unwrap();
            assert_relative_eq!(total, 1.0, epsilon = 1e-9);
            assert_eq!(m.elevation_pdf(m.psi_bar - 1e-3), 0.0);
        }
    }

    #[test]
    fn change_of_variables_against_assoc_pdf() {
        // integral of the elevation PDF over [atan(h/b), atan(h/a)] equals
        // the association-PDF mass on [a, b]
        let m = indoor();
        let (a, b) = (2.0, 8.0);
        let spec = QuadratureSpec {
            rel_tol: 1e-12,
            ..Default::default()
        };
        let lhs = integrate(
            |u| m.elevation_pdf(u),
            (HBAR / b).atan(),
            (HBAR / a).atan(),
            &spec,
        )
        .unwrap();
        let rhs = integrate(
            |x| m.rho * x * (-ETA_W * x).exp(),
            a,
            b,
            &spec,
        )
        .unwrap();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-9);
    }

    #[test]
    fn unimodal_with_peak_at_x_mu() {
        let m = indoor();
        let v_peak = m.hitting_prob_vertical(m.x_mu);
        let mut x = 0.0;
        let mut prev = m.hitting_prob_vertical(0.0);
        while x <= m.x_mu {
            let v = m.hitting_prob_vertical(x);
            assert!(v + 1e-12 >= prev, "not nondecreasing at {x}");
            assert!(v <= v_peak + 1e-12);
            prev = v;
            x += 0.05;
        }
        let mut x = m.x_mu;
        let mut prev = v_peak;
        while x <= m.x_nu + 1.0 {
            let v = m.hitting_prob_vertical(x);
            assert!(v <= prev + 1e-12, "not nonincreasing at {x}");
            prev = v;
            x += 0.05;
        }
    }

    #[test]
    fn continuity_at_knees() {
        let m = indoor();
        let eps = 1e-9;
        let at = |x: f64| m.hitting_prob_vertical(x);
        assert!((at(m.x_mu - eps) - at(m.x_mu + eps)).abs() < 1e-7);
        assert!(at(m.x_nu - 1e-6) < 1e-5);
        assert_eq!(at(m.x_nu), 0.0);
    }

    #[test]
    fn two_d_value_dominates() {
        let m = indoor();
        let h = m.hitting_prob_horizontal();
        let mut strict = false;
        let mut x = 0.0;
        while x < 40.0 {
            let p = m.hitting_prob(x);
            assert!(p <= h + 1e-15);
            if p < h - 1e-12 {
                strict = true;
            }
            x += 0.5;
        }
        assert!(strict);
    }

    #[test]
    fn wide_vertical_beam_reduces_to_2d() {
        // phi_AV close to pi saturates the vertical factor over the support
        let m = HittingModel::new(
            10f64.to_radians(),
            3.1,
            HBAR,
            RT,
            ETA_W,
            Environment::TypicalIndoor,
        );
        for &x in &[0.0, 1.0, 5.0, 20.0, 100.0] {
            assert_relative_eq!(m.hitting_prob_vertical(x), 1.0, epsilon = 1e-12);
            assert_relative_eq!(m.hitting_prob(x), m.hitting_prob_horizontal());
        }
    }

    #[test]
    fn vertical_at_zero_evaluates_branch_one() {
        let m = indoor();
        assert_eq!(m.branch(0.0), 1);
        let v = m.hitting_prob_vertical(0.0);
        assert!(v > 0.0 && v < 1.0);
        // window [pi/2 - phi/2, pi/2] maps to distances [0, hbar tan(phi/2)]
        let want = m.assoc_cdf(HBAR * (m.phi_av / 2.0).tan());
        assert_relative_eq!(v, want, max_relative = 1e-12);
    }
}
