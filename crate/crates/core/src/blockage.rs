//! LoS probabilities under human, wall and combined blockage, and the
//! wall-conditioned association-distance PDF.

use crate::scenario::{DerivedParams, Scenario, ScenarioError};

/// Blockage-rate bundle for a scenario: the `zeta e^{-eta x}` family plus
/// the association PDF on `[0, R_T]`.
#[derive(Debug, Clone)]
pub struct LosModel {
    pub zeta: f64,
    pub eta_b: f64,
    pub eta_w: f64,
    pub eta: f64,
    pub rho: f64,
    pub r_t: f64,
    blocker_w1: f64,
    blocker_w2: f64,
    blocker_density: f64,
    /// `(h_B - h_U) / hbar`: fraction of a link's 2D projection low enough
    /// to be cut by a blocker.
    height_frac: f64,
    wall_density: f64,
    wall_mean_length: f64,
}

impl LosModel {
    pub fn from_scenario(s: &Scenario) -> Result<Self, ScenarioError> {
        Ok(Self::from_derived(s, &s.derive()?))
    }

    pub fn from_derived(s: &Scenario, d: &DerivedParams) -> Self {
        Self {
            zeta: d.zeta,
            eta_b: d.eta_b,
            eta_w: d.eta_w,
            eta: d.eta,
            rho: d.rho,
            r_t: d.r_t,
            blocker_w1: s.blockage.blocker_w1,
            blocker_w2: s.blockage.blocker_w2,
            blocker_density: s.blockage.blocker_density,
            height_frac: (s.blockage.blocker_height - s.network.ue_height) / d.hbar,
            wall_density: s.blockage.wall_density,
            wall_mean_length: s.blockage.wall_mean_length,
        }
    }

    /// LoS probability under dynamic human blockers only:
    /// `zeta e^{-eta_B x}`.
    pub fn p_los_human(&self, x: f64) -> f64 {
        self.zeta * (-self.eta_b * x).exp()
    }

    /// Mean number of human blockers intersecting a link of horizontal
    /// length `x`: `(w1 w2 + (2/pi)(w1 + w2) xbar) lambda_B` with
    /// `xbar = ((h_B - h_U)/hbar) x`.
    pub fn mean_intersecting_humans(&self, x: f64) -> f64 {
        let xbar = self.height_frac * x;
        (self.blocker_w1 * self.blocker_w2
            + std::f64::consts::FRAC_2_PI * (self.blocker_w1 + self.blocker_w2) * xbar)
            * self.blocker_density
    }

    /// LoS probability under wall blockers only, orientation-averaged:
    /// `e^{-eta_W x}`.
    pub fn p_los_wall(&self, x: f64) -> f64 {
        (-self.eta_w * x).exp()
    }

    /// Exact per-azimuth wall LoS `e^{-lambda_W E[L_W] xi(phi) x}` with
    /// `xi(phi) = (|sin phi| + |cos phi|)/2`. The analysis only uses the
    /// orientation average; this form backs the simulator-agreement tests.
    pub(crate) fn p_los_wall_azimuth(&self, x: f64, phi: f64) -> f64 {
        let xi = 0.5 * (phi.sin().abs() + phi.cos().abs());
        (-self.wall_density * self.wall_mean_length * xi * x).exp()
    }

    /// Joint LoS probability `zeta e^{-eta x}` (human-wall independence).
    pub fn p_los(&self, x: f64) -> f64 {
        self.zeta * (-self.eta * x).exp()
    }

    /// Association-distance PDF `rho x e^{-eta_W x}` on `[0, R_T]`.
    pub fn assoc_distance_pdf(&self, x: f64) -> f64 {
        if !(0.0..=self.r_t).contains(&x) {
            return 0.0;
        }
        self.rho * x * (-self.eta_w * x).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::load_scenario;
    use crate::specfun::{integrate, QuadratureSpec};
    use approx::assert_relative_eq;

    fn table_model() -> LosModel {
        LosModel::from_scenario(&Scenario::default()).unwrap()
    }

    #[test]
    fn human_los_anchors() {
        let m = table_model();
        // arithmetic re-evaluation of zeta and zeta e^{-eta_B x}
        assert_relative_eq!(m.p_los_human(0.0), 0.964_640_293_483, max_relative = 1e-10);
        assert_relative_eq!(m.p_los_human(10.0), 0.842_979, epsilon = 1e-5);
    }

    #[test]
    fn human_los_no_blockers() {
        let s = load_scenario("lambda_b_per_m2 = 0\n").unwrap();
        let m = LosModel::from_scenario(&s).unwrap();
        for &x in &[0.0, 3.0, 50.0] {
            assert_eq!(m.p_los_human(x), 1.0);
            assert_eq!(m.mean_intersecting_humans(x), 0.0);
        }
    }

    #[test]
    fn mean_humans_anchor_and_consistency() {
        let m = table_model();
        assert_relative_eq!(m.mean_intersecting_humans(0.0), 0.018, max_relative = 1e-12);
        // void probability: p_LoS,B(x) = e^{-varpi(x)} e^{-w1 w2 lambda_B},
        // an exact identity of the closed form
        let extra = (-0.018f64).exp();
        for &x in &[0.0, 2.0, 7.3, 15.0] {
            let lhs = m.p_los_human(x);
            let rhs = (-m.mean_intersecting_humans(x)).exp() * extra;
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }

    #[test]
    fn wall_los_anchors() {
        let m = table_model();
        assert_eq!(m.p_los_wall(0.0), 1.0);
        assert_relative_eq!(m.p_los_wall(10.0), 0.465_826, epsilon = 1e-5);
        let s = load_scenario("lambda_w_per_m2 = 0\n").unwrap();
        let m0 = LosModel::from_scenario(&s).unwrap();
        assert_eq!(m0.p_los_wall(25.0), 1.0);
    }

    #[test]
    fn joint_los_product_form() {
        let m = table_model();
        assert_relative_eq!(m.p_los(6.0), 0.562_562, epsilon = 1e-5);
        for i in 0..30 {
            let x = i as f64 * 0.73;
            assert_relative_eq!(
                m.p_los(x),
                m.p_los_human(x) * m.p_los_wall(x),
                max_relative = 1e-13
            );
        }
        assert!(m.p_los(1e6) < 1e-300 || m.p_los(1e6) == 0.0);
    }

    #[test]
    fn los_monotone_and_bounded() {
        let m = table_model();
        let mut prev = 1.0 + 1e-12;
        for i in 0..200 {
            let p = m.p_los(i as f64 * 0.25);
            assert!(p >= 0.0 && p <= 1.0);
            assert!(p < prev);
            prev = p;
        }
    }

    #[test]
    fn assoc_pdf_normalizes_and_truncates() {
        let m = table_model();
        let spec = QuadratureSpec {
            rel_tol: 1e-12,
            ..Default::default()
        };
        let total = integrate(|x| m.assoc_distance_pdf(x), 0.0, m.r_t, &spec).unwrap();
        assert_relative_eq!(total, 1.0, epsilon = 1e-9);
        assert_eq!(m.assoc_distance_pdf(m.r_t + 1e-9), 0.0);
        assert_eq!(m.assoc_distance_pdf(-0.1), 0.0);
    }

    #[test]
    fn assoc_pdf_open_office_limit() {
        let s = load_scenario("lambda_w_per_m2 = 0\n").unwrap();
        let m = LosModel::from_scenario(&s).unwrap();
        for &x in &[0.5, 3.0, 7.0] {
            assert_relative_eq!(
                m.assoc_distance_pdf(x),
                2.0 * x / (m.r_t * m.r_t),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn per_azimuth_wall_form_brackets_the_average() {
        let m = table_model();
        // xi ranges over [1/2, sqrt(2)/2]; the average sits between the
        // axis-aligned and diagonal extremes
        for &x in &[2.0, 6.0, 10.0] {
            let lo = m.p_los_wall_azimuth(x, std::f64::consts::FRAC_PI_4);
            let hi = m.p_los_wall_azimuth(x, 0.0);
            let avg = m.p_los_wall(x);
            assert!(lo < avg && avg < hi, "x = {x}: {lo} {avg} {hi}");
        }
    }
}
