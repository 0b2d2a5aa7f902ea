//! Coverage probability assembly, the 2D baseline and parameter sweeps.
//!
//! Coverage factorizes as the serving link's human-LoS probability times
//! the void probability of dominant interferers,
//! `p_c = zeta e^{-eta_B x00} e^{-Lambda_N - Lambda_F}`.

use crate::dominant::{eta_b_flat, DominantModel};
use crate::montecarlo::{estimate_coverage_with_model, Estimate, SimError};
use crate::scenario::{db_to_linear, Absorption, Environment, Scenario, ScenarioError};
use crate::specfun::SpecFunError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoverageError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("frequency sweep requires an absorption table (k_abs_table)")]
    KTableRequired,
    #[error("gain split of {shift_db} dB: {reason}")]
    GainSplit { shift_db: f64, reason: String },
}

/// Which analytic pipeline produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    TypicalIndoor,
    OpenOffice,
    TwoDBaseline,
}

#[derive(Debug, Clone, Copy)]
pub struct CoverageResult {
    pub x00: f64,
    pub p_c: f64,
    pub p_c_los: f64,
    pub lambda_near: f64,
    pub lambda_far: f64,
    pub kind: ModelKind,
}

/// Assembled analytic pipeline for one environment; reusable across sweep
/// points.
#[derive(Debug, Clone)]
pub struct CoverageModel {
    dominant: DominantModel,
    /// Serving-link human-LoS factor `zeta_s e^{-eta_s (x00 + offset)}`.
    serving_zeta: f64,
    serving_eta: f64,
    serving_offset: f64,
    kind: ModelKind,
}

impl CoverageModel {
    pub fn typical_indoor(s: &Scenario) -> Result<Self, ScenarioError> {
        let d = s.derive()?;
        Ok(Self {
            dominant: DominantModel::typical_indoor(s)?,
            serving_zeta: d.zeta,
            serving_eta: d.eta_b,
            serving_offset: 0.0,
            kind: ModelKind::TypicalIndoor,
        })
    }

    pub fn open_office(s: &Scenario) -> Result<Self, ScenarioError> {
        let d = s.derive()?;
        Ok(Self {
            dominant: DominantModel::open_office(s)?,
            serving_zeta: d.zeta,
            serving_eta: d.eta_b,
            serving_offset: 0.0,
            kind: ModelKind::OpenOffice,
        })
    }

    pub fn for_environment(s: &Scenario, env: Environment) -> Result<Self, ScenarioError> {
        match env {
            Environment::TypicalIndoor => Self::typical_indoor(s),
            Environment::OpenOffice => Self::open_office(s),
        }
    }

    /// 2D baseline: the blockage exponent runs over `x00 + r_b` without the
    /// height scaling and the vertical hitting probability is one.
    pub fn two_d_baseline(s: &Scenario, r_b: f64) -> Result<Self, ScenarioError> {
        let d = s.derive()?;
        Ok(Self {
            dominant: DominantModel::two_d_baseline(s, r_b)?,
            serving_zeta: d.zeta,
            serving_eta: eta_b_flat(s),
            serving_offset: r_b,
            kind: ModelKind::TwoDBaseline,
        })
    }

    pub fn dominant(&self) -> &DominantModel {
        &self.dominant
    }

    /// Serving-link LoS probability under human blockers.
    pub fn p_los_serving(&self, x00: f64) -> f64 {
        self.serving_zeta * (-self.serving_eta * (x00 + self.serving_offset)).exp()
    }

    pub fn coverage(&self, x00: f64) -> Result<CoverageResult, SpecFunError> {
        let r = self.dominant.regions(x00);
        if !r.feasible {
            return Ok(CoverageResult {
                x00,
                p_c: 0.0,
                p_c_los: 0.0,
                lambda_near: f64::INFINITY,
                lambda_far: f64::INFINITY,
                kind: self.kind,
            });
        }
        let lambda_near = self.dominant.lambda_near_at(&r);
        let lambda_far = match self.kind {
            ModelKind::OpenOffice => self.dominant.lambda_far_closed_at(&r)?,
            _ => self.dominant.lambda_far_at(&r)?,
        };
        let p_c_los = (-lambda_near - lambda_far).exp();
        Ok(CoverageResult {
            x00,
            p_c: self.p_los_serving(x00) * p_c_los,
            p_c_los,
            lambda_near,
            lambda_far,
            kind: self.kind,
        })
    }
}

/// Theorem-level entry point for the typical indoor environment.
pub fn coverage(x00: f64, s: &Scenario) -> Result<CoverageResult, CoverageError> {
    Ok(CoverageModel::typical_indoor(s)?.coverage(x00)?)
}

/// Theorem-level entry point for the open office (walls ignored, Ei-based
/// closed-form far count).
pub fn coverage_open_office(x00: f64, s: &Scenario) -> Result<CoverageResult, CoverageError> {
    Ok(CoverageModel::open_office(s)?.coverage(x00)?)
}

/// 2D-baseline coverage with blocker radius `r_b`.
pub fn coverage_2d_baseline(
    x00: f64,
    s: &Scenario,
    r_b: f64,
) -> Result<CoverageResult, CoverageError> {
    Ok(CoverageModel::two_d_baseline(s, r_b)?.coverage(x00)?)
}

/// Sweepable parameter families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    X00,
    TauDb,
    FrequencyThz,
    LambdaA,
    LambdaB,
    GainSplitDb,
}

impl SweepVar {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "x00" => Some(Self::X00),
            "tau_db" => Some(Self::TauDb),
            "f_thz" => Some(Self::FrequencyThz),
            "lambda_a" | "lambda_a_per_m2" => Some(Self::LambdaA),
            "lambda_b" | "lambda_b_per_m2" => Some(Self::LambdaB),
            "gain_split_db" | "gain-split" => Some(Self::GainSplitDb),
            _ => None,
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            Self::X00 => "x00",
            Self::TauDb => "tau_db",
            Self::FrequencyThz => "f_thz",
            Self::LambdaA => "lambda_a_per_m2",
            Self::LambdaB => "lambda_b_per_m2",
            Self::GainSplitDb => "gain_split_db",
        }
    }
}

/// Scenario with one sweep variable applied.
pub fn apply_sweep_value(
    base: &Scenario,
    var: SweepVar,
    value: f64,
) -> Result<Scenario, CoverageError> {
    let mut s = base.clone();
    match var {
        SweepVar::X00 => {}
        SweepVar::TauDb => s.propagation.sinr_threshold = db_to_linear(value),
        SweepVar::FrequencyThz => {
            if matches!(s.propagation.absorption, Absorption::Scalar(_)) {
                return Err(CoverageError::KTableRequired);
            }
            s.propagation.frequency = value * 1e12;
        }
        SweepVar::LambdaA => s.network.ap_density = value,
        SweepVar::LambdaB => s.blockage.blocker_density = value,
        SweepVar::GainSplitDb => return apply_gain_split(base, value),
    }
    s.validate()?;
    Ok(s)
}

/// Move `shift_db` of main-lobe gain from the UE to the AP while keeping
/// `P_T G_A^m G_U^m` fixed.
///
/// Each side's main-lobe solid angle scales inversely with its gain factor
/// and the beamwidths follow (aspect ratio preserved), so the geometry
/// tracks the directivity change. Side lobes are recomputed from `k` and the
/// implied solid angle when gains are computed; explicit side-gain
/// overrides stay at their configured values.
pub fn apply_gain_split(s: &Scenario, shift_db: f64) -> Result<Scenario, CoverageError> {
    let mut out = s.clone();
    for (cfg, factor) in [
        (&mut out.ap_antenna, db_to_linear(shift_db)),
        (&mut out.ue_antenna, db_to_linear(-shift_db)),
    ] {
        let omega_old = crate::antenna::main_lobe_solid_angle(cfg.phi_h, cfg.phi_v)
            .map_err(ScenarioError::from)?;
        let omega_new = omega_old / factor;
        if omega_new >= 2.0 * std::f64::consts::PI {
            return Err(CoverageError::GainSplit {
                shift_db,
                reason: format!(
                    "implied main-lobe solid angle {omega_new:.3} sr exceeds the hemisphere"
                ),
            });
        }
        let q = (omega_new / 4.0).sin();
        let ratio = (cfg.phi_v / 2.0).tan() / (cfg.phi_h / 2.0).tan();
        let tan_h = (q / ratio).sqrt();
        cfg.phi_h = 2.0 * tan_h.atan();
        cfg.phi_v = 2.0 * (q / tan_h).atan();
        if let Some(g) = cfg.gain_main_override {
            cfg.gain_main_override = Some(g * factor);
        }
    }
    out.validate()?;
    Ok(out)
}

/// Monte Carlo companion settings for a sweep.
#[derive(Debug, Clone, Copy)]
pub struct McSettings {
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub sweep_value: f64,
    pub analytic: CoverageResult,
    pub mc: Option<Estimate>,
}

/// One coverage curve: analytic values and optional MC estimates over a
/// sweep grid, sorted by sweep value.
#[derive(Debug, Clone)]
pub struct Curve {
    pub var: SweepVar,
    pub points: Vec<CurvePoint>,
}

/// Evaluate a sweep; `x00` is the fixed serving distance for non-`x00`
/// variables.
pub fn sweep(
    var: SweepVar,
    values: &[f64],
    base: &Scenario,
    env: Environment,
    x00: f64,
    mc: Option<McSettings>,
) -> Result<Curve, CoverageError> {
    let mut grid: Vec<f64> = values.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut points = Vec::with_capacity(grid.len());
    for &value in &grid {
        let s = apply_sweep_value(base, var, value)?;
        let point_x00 = if var == SweepVar::X00 { value } else { x00 };
        let model = CoverageModel::for_environment(&s, env)?;
        let analytic = model.coverage(point_x00)?;
        let mc_est = match mc {
            Some(cfg) => Some(estimate_coverage_with_model(
                &s,
                env,
                point_x00,
                cfg.trials,
                cfg.seed,
            )?),
            None => None,
        };
        points.push(CurvePoint {
            sweep_value: value,
            analytic,
            mc: mc_est,
        });
    }
    Ok(Curve { var, points })
}
