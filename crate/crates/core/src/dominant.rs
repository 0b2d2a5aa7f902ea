//! Dominant-interferer region geometry and the mean counts of near and far
//! dominant interferers.
//!
//! A dominant interferer forces outage on its own. Near ones do so even
//! through side lobes; far ones only when their main lobe hits the user.
//! Around the typical user the candidate locations split into a truncated
//! annulus seen by the user's main lobe (radial window `[x_check, x_hat]`,
//! azimuth width `phi_UH`) and the side-lobe remainder outside the
//! self-blockage zone (width `2pi - phi_UH - omega`). Mean counts follow by
//! thinning the AP process with the LoS and hitting probabilities over
//! those regions.

use crate::hitting::HittingModel;
use crate::propagation::{dominant_distance, LinkBudget, Lobe};
use crate::scenario::{Environment, Scenario, ScenarioError};
use crate::specfun::{expint_ei, integrate, seg_x_exp, QuadratureSpec, SpecFunError};

/// Radial window of the user's main lobe at serving distance `x00`.
#[derive(Debug, Clone, Copy)]
pub struct RegionBounds {
    /// Inner edge `x_check_00` (0 when the beam's upper edge passes vertical).
    pub inner: f64,
    /// Outer edge `x_hat_00` (infinite when the lower edge reaches horizontal).
    pub outer: f64,
    /// Serving-link elevation `psi_00`.
    pub elevation: f64,
}

/// `x_check`/`x_hat` from the serving elevation and the UE vertical
/// beamwidth.
pub fn region_bounds(x00: f64, phi_uv: f64, hbar: f64) -> RegionBounds {
    let psi00 = hbar.atan2(x00);
    let t = (phi_uv / 2.0).tan();
    let inner = if psi00 <= (std::f64::consts::PI - phi_uv) / 2.0 {
        hbar * (x00 - hbar * t) / (hbar + x00 * t)
    } else {
        0.0
    };
    let outer = if psi00 >= phi_uv / 2.0 {
        let den = hbar - x00 * t;
        if den > 0.0 {
            hbar * (x00 + hbar * t) / den
        } else {
            f64::INFINITY
        }
    } else {
        f64::INFINITY
    };
    RegionBounds {
        inner,
        outer,
        elevation: psi00,
    }
}

/// The four dominant-distance boundaries and the radial thresholds of the
/// dominant regions.
#[derive(Debug, Clone, Copy)]
pub struct DominantRegions {
    pub d_mm: f64,
    pub d_ms: f64,
    pub d_sm: f64,
    pub d_ss: f64,
    pub v_mm: f64,
    pub v_ms: f64,
    pub v_sm1: f64,
    pub v_sm2: f64,
    pub v_ss1: f64,
    pub v_ss2: f64,
    pub bounds: RegionBounds,
    /// False when the desired signal alone misses the threshold; every
    /// dominant distance is infinite and coverage is zero outright.
    pub feasible: bool,
}

pub fn dominant_regions(x00: f64, lb: &LinkBudget, hbar: f64, phi_uv: f64) -> DominantRegions {
    let d = |k, i| dominant_distance(x00, k, i, lb, hbar);
    let d_mm = d(Lobe::Main, Lobe::Main);
    let d_ms = d(Lobe::Main, Lobe::Side);
    let d_sm = d(Lobe::Side, Lobe::Main);
    let d_ss = d(Lobe::Side, Lobe::Side);
    let bounds = region_bounds(x00, phi_uv, hbar);
    let (xc, xh) = (bounds.inner, bounds.outer);
    DominantRegions {
        d_mm,
        d_ms,
        d_sm,
        d_ss,
        v_mm: xh.min(d_mm),
        v_ms: xc.max(xh.min(d_ms)),
        v_sm1: xc.min(d_sm),
        v_sm2: xh.max(d_sm),
        v_ss1: xc.min(d_ss),
        v_ss2: xh.max(d_ss),
        bounds,
        feasible: d_mm.is_finite(),
    }
}

/// Vertical hitting factor inside the far-interferer thinning integral.
#[derive(Debug, Clone)]
pub enum VerticalProb {
    Hitting(HittingModel),
    /// The 2D baseline's `p_hp,V = 1`.
    Unity,
}

/// Assembled analytic context: link budget plus the effective LoS factors
/// and hitting model the region integrals run with.
#[derive(Debug, Clone)]
pub struct DominantModel {
    pub lambda_a: f64,
    pub phi_ah: f64,
    pub phi_uh: f64,
    pub phi_uv: f64,
    pub omega: f64,
    pub hbar: f64,
    pub budget: LinkBudget,
    /// LoS prefactor inside the region integrals.
    pub zeta_eff: f64,
    /// LoS decay rate inside the region integrals.
    pub eta_eff: f64,
    pub vertical: VerticalProb,
    pub quad: QuadratureSpec,
}

impl DominantModel {
    pub fn typical_indoor(s: &Scenario) -> Result<Self, ScenarioError> {
        let d = s.derive()?;
        Ok(Self {
            lambda_a: s.network.ap_density,
            phi_ah: s.ap_antenna.phi_h,
            phi_uh: s.ue_antenna.phi_h,
            phi_uv: s.ue_antenna.phi_v,
            omega: s.blockage.self_block_angle,
            hbar: d.hbar,
            budget: d.budget,
            zeta_eff: d.zeta,
            eta_eff: d.eta,
            vertical: VerticalProb::Hitting(HittingModel::from_derived(
                s,
                &d,
                Environment::TypicalIndoor,
            )),
            quad: QuadratureSpec::default(),
        })
    }

    /// Walls dropped everywhere: `eta -> eta_B` and the uniform-disk
    /// association PDF.
    pub fn open_office(s: &Scenario) -> Result<Self, ScenarioError> {
        let d = s.derive()?;
        Ok(Self {
            lambda_a: s.network.ap_density,
            phi_ah: s.ap_antenna.phi_h,
            phi_uh: s.ue_antenna.phi_h,
            phi_uv: s.ue_antenna.phi_v,
            omega: s.blockage.self_block_angle,
            hbar: d.hbar,
            budget: d.budget,
            zeta_eff: d.zeta,
            eta_eff: d.eta_b,
            vertical: VerticalProb::Hitting(HittingModel::from_derived(
                s,
                &d,
                Environment::OpenOffice,
            )),
            quad: QuadratureSpec::default(),
        })
    }

    /// 2D-baseline substitutions: the human blockage exponent loses its
    /// height scaling and gains the blocker radius offset, and the vertical
    /// hitting probability saturates at one.
    pub fn two_d_baseline(s: &Scenario, r_b: f64) -> Result<Self, ScenarioError> {
        let d = s.derive()?;
        let eta_b_2d = eta_b_flat(s);
        Ok(Self {
            lambda_a: s.network.ap_density,
            phi_ah: s.ap_antenna.phi_h,
            phi_uh: s.ue_antenna.phi_h,
            phi_uv: s.ue_antenna.phi_v,
            omega: s.blockage.self_block_angle,
            hbar: d.hbar,
            budget: d.budget,
            zeta_eff: d.zeta * (-eta_b_2d * r_b).exp(),
            eta_eff: eta_b_2d + d.eta_w,
            vertical: VerticalProb::Unity,
            quad: QuadratureSpec::default(),
        })
    }

    pub fn regions(&self, x00: f64) -> DominantRegions {
        dominant_regions(x00, &self.budget, self.hbar, self.phi_uv)
    }

    /// Mean number of near dominant interferers (infinite when the desired
    /// signal alone cannot make the threshold).
    pub fn lambda_near(&self, x00: f64) -> f64 {
        let r = self.regions(x00);
        self.lambda_near_at(&r)
    }

    pub fn lambda_near_at(&self, r: &DominantRegions) -> f64 {
        if !r.feasible {
            return f64::INFINITY;
        }
        let eta = self.eta_eff;
        let seg = |a: f64, b: f64| seg_x_exp(eta, a, b);
        let theta_m = self.phi_uh
            * (seg(0.0, r.v_ss1) + seg(r.bounds.inner, r.v_ms) + seg(r.bounds.outer, r.v_ss2));
        let theta_s = (2.0 * std::f64::consts::PI - self.omega - self.phi_uh) * seg(0.0, r.d_ss);
        self.lambda_a * self.zeta_eff * (theta_m + theta_s)
    }

    /// `digamma(a, b) = int_a^b p_hp,V(x) e^{-eta x} x dx`. Quadrature with
    /// breakpoints at the hitting-probability knees; the integrand vanishes
    /// past `x_nu`, so infinite uppers truncate exactly. Empty or reversed
    /// intervals integrate to zero.
    pub fn digamma(&self, a: f64, b: f64) -> Result<f64, SpecFunError> {
        match &self.vertical {
            VerticalProb::Unity => Ok(seg_x_exp(self.eta_eff, a, b)),
            VerticalProb::Hitting(m) => {
                let upper = b.min(m.x_nu);
                if !(upper > a) || a.is_infinite() {
                    return Ok(0.0);
                }
                if upper.is_infinite() {
                    return Err(SpecFunError::Domain {
                        func: "digamma",
                        arg: b,
                        constraint: "finite upper limit (x_nu infinite)",
                    });
                }
                let eta = self.eta_eff;
                let spec = self.quad.clone().with_breakpoints(&[m.x_mu]);
                integrate(
                    |x| m.hitting_prob_vertical(x) * (-eta * x).exp() * x,
                    a,
                    upper,
                    &spec,
                )
            }
        }
    }

    /// Mean number of far dominant interferers, thinning by the hitting
    /// probability over the far regions.
    pub fn lambda_far(&self, x00: f64) -> Result<f64, SpecFunError> {
        let r = self.regions(x00);
        self.lambda_far_at(&r)
    }

    pub fn lambda_far_at(&self, r: &DominantRegions) -> Result<f64, SpecFunError> {
        if !r.feasible {
            return Ok(f64::INFINITY);
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        // A_mm \ A_ms is empty when v_mm <= v_ms (digamma yields 0 then)
        let main_window = self.digamma(r.v_ss1, r.v_sm1)?
            + self.digamma(r.v_ms, r.v_mm)?
            + self.digamma(r.v_ss2, r.v_sm2)?
            - self.digamma(r.d_ss, r.d_sm)?;
        let side_window = self.digamma(r.d_ss, r.d_sm)?;
        Ok(self.lambda_a * self.zeta_eff * self.phi_ah / two_pi
            * (self.phi_uh * main_window + (two_pi - self.omega) * side_window))
    }
}

/// Flat-world human blockage rate `2 (w1 + w2) lambda_B / pi` (no height
/// scaling), used by the 2D baseline.
pub fn eta_b_flat(s: &Scenario) -> f64 {
    2.0 * (s.blockage.blocker_w1 + s.blockage.blocker_w2) * s.blockage.blocker_density
        / std::f64::consts::PI
}

/// Spec-level wrappers building the typical-indoor model per call.
pub fn lambda_near(x00: f64, s: &Scenario) -> Result<f64, ScenarioError> {
    Ok(DominantModel::typical_indoor(s)?.lambda_near(x00))
}

pub fn lambda_far(x00: f64, s: &Scenario) -> Result<f64, ScenarioError> {
    DominantModel::typical_indoor(s)?
        .lambda_far(x00)
        .map_err(ScenarioError::from)
}

pub fn lambda_near_open_office(x00: f64, s: &Scenario) -> Result<f64, ScenarioError> {
    Ok(DominantModel::open_office(s)?.lambda_near(x00))
}

/// Far count for the open office through the Ei-based closed form.
pub fn lambda_far_open_office(x00: f64, s: &Scenario) -> Result<f64, ScenarioError> {
    let m = DominantModel::open_office(s)?;
    m.lambda_far_closed(x00).map_err(ScenarioError::from)
}

pub fn digamma_integral(a: f64, b: f64, x00_model: &DominantModel) -> Result<f64, SpecFunError> {
    x00_model.digamma(a, b)
}

impl DominantModel {
    /// Far count via the closed-form open-office digamma.
    pub fn lambda_far_closed(&self, x00: f64) -> Result<f64, SpecFunError> {
        let r = self.regions(x00);
        self.lambda_far_closed_at(&r)
    }

    pub fn lambda_far_closed_at(&self, r: &DominantRegions) -> Result<f64, SpecFunError> {
        if !r.feasible {
            return Ok(f64::INFINITY);
        }
        let m = match &self.vertical {
            VerticalProb::Hitting(m) => m,
            VerticalProb::Unity => {
                return Err(SpecFunError::Domain {
                    func: "lambda_far_closed",
                    arg: f64::NAN,
                    constraint: "requires a hitting model",
                })
            }
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let f = |a: f64, b: f64| digamma_open_office_parts(a, b, m, self.eta_eff);
        let main_window =
            f(r.v_ss1, r.v_sm1)? + f(r.v_ms, r.v_mm)? + f(r.v_ss2, r.v_sm2)? - f(r.d_ss, r.d_sm)?;
        let side_window = f(r.d_ss, r.d_sm)?;
        Ok(self.lambda_a * self.zeta_eff * self.phi_ah / two_pi
            * (self.phi_uh * main_window + (two_pi - self.omega) * side_window))
    }
}

/// Spec-level wrapper for the closed-form open-office digamma.
pub fn digamma_open_office(a: f64, b: f64, s: &Scenario) -> Result<f64, ScenarioError> {
    let d = s.derive()?;
    let m = HittingModel::from_derived(s, &d, Environment::OpenOffice);
    digamma_open_office_parts(a, b, &m, d.eta_b).map_err(ScenarioError::from)
}

/// Closed-form `digamma_o(a, b)` for the open office, assembled from the
/// antiderivatives `I1^+/-` (Ei-based when `eta_B != 0`) and `I2` over the
/// three branches of the vertical hitting probability. Integration
/// constants cancel in the differences and are fixed to zero.
pub fn digamma_open_office_parts(
    a: f64,
    b: f64,
    m: &HittingModel,
    eta_b: f64,
) -> Result<f64, SpecFunError> {
    let (x_mu, x_nu) = (m.x_mu, m.x_nu);
    if !(b > a) || a >= x_nu || a.is_infinite() {
        return Ok(0.0);
    }
    // below x_t the upper beam edge passes vertical and the I1^+ term's
    // share of the integrand clamps to zero
    let x_t = m.hbar * (m.phi_av / 2.0).tan();
    let i1p = |x: f64| i1_antideriv(x.max(x_t), 1.0, m, eta_b);
    let i1m = |x: f64| i1_antideriv(x, -1.0, m, eta_b);
    let i2 = |x: f64| i2_antideriv(x, eta_b);
    if b <= x_mu {
        Ok(i1m(b)? - i1m(a)? + i1p(a)? - i1p(b)?)
    } else if a <= x_mu && b <= x_nu {
        Ok(i1m(x_mu)? - i1m(a)? + i1p(a)? - i1p(b)? + i2(b) - i2(x_mu))
    } else if a <= x_mu {
        Ok(i1m(x_mu)? - i1m(a)? + i1p(a)? - i1p(x_nu)? + i2(x_nu) - i2(x_mu))
    } else if b <= x_nu {
        Ok(i2(b) - i2(a) + i1p(a)? - i1p(b)?)
    } else {
        Ok(i2(x_nu) - i2(a) + i1p(a)? - i1p(x_nu)?)
    }
}

/// Antiderivative of `(hbar^2/R_T^2) cot^2(phi_AV/2 +/- arctan(hbar/x))
/// e^{-eta_B x} x`; `sign` selects the branch.
fn i1_antideriv(x: f64, sign: f64, m: &HittingModel, eta_b: f64) -> Result<f64, SpecFunError> {
    let h = m.phi_av / 2.0;
    let hb = m.hbar;
    let r2 = m.r_t * m.r_t;
    let ct = 1.0 / h.tan();
    let cs = 1.0 / h.sin();
    if eta_b != 0.0 {
        if x.is_infinite() {
            return Ok(0.0);
        }
        let e = (-eta_b * x).exp();
        let t1 = 2.0
            * e
            * ct
            * (-(1.0 + eta_b * x) * ct / (eta_b * eta_b)
                + sign * 2.0 * hb * cs * cs / eta_b
                + sign * hb.powi(3) * cs.powi(4) / (x + sign * hb * ct));
        let ei = expint_ei(-eta_b * x - sign * eta_b * hb * ct)?;
        let t2 = hb * hb
            * (sign * eta_b * hb * ct).exp()
            * cs.powi(5)
            * ei
            * (sign * 2.0 * eta_b * hb * h.cos() + 3.0 * h.sin() + (3.0 * h).sin());
        Ok(hb * hb / (2.0 * r2) * (t1 + t2))
    } else {
        let sin_full = (2.0 * h).sin();
        let t = 0.5 * ct * ct * x * x - sign * hb * cs.powi(4) * sin_full * x
            + sign * hb.powi(3) * cs.powi(6) * sin_full / (2.0 * (x + sign * hb * ct))
            + hb * hb * (2.0 + (2.0 * h).cos()) * cs.powi(4) * (hb * h.cos() + sign * x * h.sin()).ln();
        Ok(hb * hb / r2 * t)
    }
}

/// Antiderivative of `e^{-eta_B x} x`.
fn i2_antideriv(x: f64, eta_b: f64) -> f64 {
    if eta_b != 0.0 {
        if x.is_infinite() {
            return 0.0;
        }
        -(1.0 + eta_b * x) * (-eta_b * x).exp() / (eta_b * eta_b)
    } else {
        x * x / 2.0
    }
}
