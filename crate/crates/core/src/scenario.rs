//! Scenario parameters: deployment geometry, blockage, antennas and
//! propagation, with config-file loading, validation, serialization and the
//! derived constants every other module consumes.
//!
//! The config format is flat `key = value` text with `#` comments. Values
//! carry the units of their key suffix (`_dbm`, `_dbi`, `_deg`, `_thz`) and
//! are converted to SI/linear at the parse boundary; everything downstream
//! is unit-consistent.

use crate::antenna::{AntennaError, AntennaPattern};
use crate::hitting::elevation_window;
use crate::propagation::{max_association_radius, LinkBudget, PropagationError};
use crate::specfun::one_minus_exp1p;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invariant violated: {invariant}")]
    Validation { invariant: String },
    #[error("absorption table: {0}")]
    KTable(String),
    #[error("frequency {freq:.4e} Hz outside absorption table range [{lo:.4e}, {hi:.4e}]")]
    KTableRange { freq: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Antenna(#[from] AntennaError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
}

/// Which analytic environment the model runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Environment {
    /// Walls and humans both present; association is wall-conditioned.
    TypicalIndoor,
    /// Humans only; association is the plain uniform disk.
    OpenOffice,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub ap_height: f64,
    pub ue_height: f64,
    pub ap_density: f64,
    pub room_length: f64,
    pub room_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallLengthLaw {
    /// Every wall has exactly the mean length (analysis depends only on the mean).
    Fixed,
    /// Exponential lengths with the configured mean, for the simulator.
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockageParams {
    pub self_block_angle: f64,
    pub blocker_height: f64,
    pub blocker_w1: f64,
    pub blocker_w2: f64,
    pub blocker_density: f64,
    /// Carried for completeness; snapshot sampling makes it inert.
    pub blocker_speed: f64,
    pub wall_mean_length: f64,
    pub wall_density: f64,
    pub wall_length_law: WallLengthLaw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntennaConfig {
    pub phi_h: f64,
    pub phi_v: f64,
    pub side_lobe_ratio: f64,
    pub gain_main_override: Option<f64>,
    pub gain_side_override: Option<f64>,
}

impl AntennaConfig {
    pub fn pattern(&self) -> Result<AntennaPattern, AntennaError> {
        match (self.gain_main_override, self.gain_side_override) {
            (Some(gm), Some(gs)) => {
                AntennaPattern::with_gain_overrides(self.phi_h, self.phi_v, self.side_lobe_ratio, gm, gs)
            }
            (None, None) => AntennaPattern::from_beamwidths(self.phi_h, self.phi_v, self.side_lobe_ratio),
            (Some(gm), None) => {
                let base = AntennaPattern::from_beamwidths(self.phi_h, self.phi_v, self.side_lobe_ratio)?;
                AntennaPattern::with_gain_overrides(
                    self.phi_h,
                    self.phi_v,
                    self.side_lobe_ratio,
                    gm,
                    base.gain_side,
                )
            }
            (None, Some(gs)) => {
                let base = AntennaPattern::from_beamwidths(self.phi_h, self.phi_v, self.side_lobe_ratio)?;
                AntennaPattern::with_gain_overrides(
                    self.phi_h,
                    self.phi_v,
                    self.side_lobe_ratio,
                    base.gain_main,
                    gs,
                )
            }
        }
    }
}

/// Two-column absorption table `(frequency_hz, K_per_m)` with linear
/// interpolation, for frequency sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct KTable {
    pub source: String,
    points: Vec<(f64, f64)>,
}

impl KTable {
    pub fn from_points(source: impl Into<String>, mut points: Vec<(f64, f64)>) -> Result<Self, ScenarioError> {
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if points.len() < 2 {
            return Err(ScenarioError::KTable("need at least two rows".into()));
        }
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(ScenarioError::KTable("duplicate frequency".into()));
        }
        if points.iter().any(|&(f, k)| !(f > 0.0) || !(k > 0.0)) {
            return Err(ScenarioError::KTable("frequencies and coefficients must be positive".into()));
        }
        Ok(Self { source: source.into(), points })
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, b) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(f), Ok(k)) => points.push((f, k)),
                // tolerate a single header row
                _ if i == 0 => continue,
                _ => {
                    return Err(ScenarioError::KTable(format!(
                        "{}: line {} is not `frequency_hz,K_per_m`",
                        path.display(),
                        i + 1
                    )))
                }
            }
        }
        Self::from_points(path.to_string_lossy(), points)
    }

    /// Linear interpolation; frequencies outside the table are an error.
    pub fn at(&self, freq: f64) -> Result<f64, ScenarioError> {
        let (lo, hi) = (self.points[0].0, self.points[self.points.len() - 1].0);
        if freq < lo || freq > hi {
            return Err(ScenarioError::KTableRange { freq, lo, hi });
        }
        let idx = self.points.partition_point(|&(f, _)| f <= freq);
        if idx == 0 {
            return Ok(self.points[0].1);
        }
        if idx == self.points.len() {
            return Ok(self.points[idx - 1].1);
        }
        let (f0, k0) = self.points[idx - 1];
        let (f1, k1) = self.points[idx];
        Ok(k0 + (k1 - k0) * (freq - f0) / (f1 - f0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Absorption {
    Scalar(f64),
    Table(KTable),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationParams {
    pub transmit_power: f64,
    pub noise_power: f64,
    pub frequency: f64,
    pub absorption: Absorption,
    pub sinr_threshold: f64,
}

/// Full validated parameter record.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: NetworkParams,
    pub blockage: BlockageParams,
    pub ap_antenna: AntennaConfig,
    pub ue_antenna: AntennaConfig,
    pub propagation: PropagationParams,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

impl Default for Scenario {
    /// Table II of the system-parameter set: 3.0/1.3 m heights, 0.1 APs/m^2,
    /// 60 x 50 m room, 1.05 THz, K = 0.07512 1/m, 5 dBm, -77 dBm noise,
    /// 3 dB threshold, 60 deg self-blockage, 10H/10V deg AP and 33/33 deg UE
    /// beams with k = 0.1 (gains computed from the beamwidths).
    fn default() -> Self {
        Self {
            network: NetworkParams {
                ap_height: 3.0,
                ue_height: 1.3,
                ap_density: 0.1,
                room_length: 60.0,
                room_width: 50.0,
            },
            blockage: BlockageParams {
                self_block_angle: 60f64.to_radians(),
                blocker_height: 1.7,
                blocker_w1: 0.6,
                blocker_w2: 0.3,
                blocker_density: 0.1,
                blocker_speed: 1.0,
                wall_mean_length: 3.0,
                wall_density: 0.04,
                wall_length_law: WallLengthLaw::Fixed,
            },
            ap_antenna: AntennaConfig {
                phi_h: 10f64.to_radians(),
                phi_v: 10f64.to_radians(),
                side_lobe_ratio: 0.1,
                gain_main_override: None,
                gain_side_override: None,
            },
            ue_antenna: AntennaConfig {
                phi_h: 33f64.to_radians(),
                phi_v: 33f64.to_radians(),
                side_lobe_ratio: 0.1,
                gain_main_override: None,
                gain_side_override: None,
            },
            propagation: PropagationParams {
                transmit_power: dbm_to_watts(5.0),
                noise_power: dbm_to_watts(-77.0),
                frequency: 1.05e12,
                absorption: Absorption::Scalar(0.07512),
                sinr_threshold: db_to_linear(3.0),
            },
        }
    }
}

impl Scenario {
    /// Parse a config document; absent keys keep their defaults. Paths in
    /// `k_abs_table` are resolved against `base_dir` when given.
    pub fn from_config_str(source: &str) -> Result<Self, ScenarioError> {
        Self::parse(source, None)
    }

    pub fn from_config_file(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent())
    }

    fn parse(source: &str, base_dir: Option<&Path>) -> Result<Self, ScenarioError> {
        let mut s = Scenario::default();
        for (i, raw) in source.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ScenarioError::Parse {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let num = || -> Result<f64, ScenarioError> {
                value.parse::<f64>().map_err(|_| ScenarioError::Parse {
                    line: line_no,
                    msg: format!("`{key}`: `{value}` is not a number"),
                })
            };
            match key {
                "h_a_m" => s.network.ap_height = num()?,
                "h_u_m" => s.network.ue_height = num()?,
                "lambda_a_per_m2" => s.network.ap_density = num()?,
                "room_l1_m" => s.network.room_length = num()?,
                "room_l2_m" => s.network.room_width = num()?,
                "omega_deg" => s.blockage.self_block_angle = num()?.to_radians(),
                "h_b_m" => s.blockage.blocker_height = num()?,
                "w1_m" => s.blockage.blocker_w1 = num()?,
                "w2_m" => s.blockage.blocker_w2 = num()?,
                "lambda_b_per_m2" => s.blockage.blocker_density = num()?,
                "v_b_mps" => s.blockage.blocker_speed = num()?,
                "wall_mean_len_m" => s.blockage.wall_mean_length = num()?,
                "lambda_w_per_m2" => s.blockage.wall_density = num()?,
                "wall_len_law" => {
                    s.blockage.wall_length_law = match value {
                        "fixed" => WallLengthLaw::Fixed,
                        "exp" | "exponential" => WallLengthLaw::Exponential,
                        other => {
                            return Err(ScenarioError::Parse {
                                line: line_no,
                                msg: format!("`wall_len_law`: `{other}` is not `fixed` or `exp`"),
                            })
                        }
                    }
                }
                "phi_ah_deg" => s.ap_antenna.phi_h = num()?.to_radians(),
                "phi_av_deg" => s.ap_antenna.phi_v = num()?.to_radians(),
                "phi_uh_deg" => s.ue_antenna.phi_h = num()?.to_radians(),
                "phi_uv_deg" => s.ue_antenna.phi_v = num()?.to_radians(),
                "k_a" => s.ap_antenna.side_lobe_ratio = num()?,
                "k_u" => s.ue_antenna.side_lobe_ratio = num()?,
                "g_am_dbi" => s.ap_antenna.gain_main_override = Some(db_to_linear(num()?)),
                "g_as_dbi" => s.ap_antenna.gain_side_override = Some(db_to_linear(num()?)),
                "g_um_dbi" => s.ue_antenna.gain_main_override = Some(db_to_linear(num()?)),
                "g_us_dbi" => s.ue_antenna.gain_side_override = Some(db_to_linear(num()?)),
                "p_t_dbm" => s.propagation.transmit_power = dbm_to_watts(num()?),
                "sigma2_dbm" => s.propagation.noise_power = dbm_to_watts(num()?),
                "f_thz" => s.propagation.frequency = num()? * 1e12,
                "k_abs_per_m" => s.propagation.absorption = Absorption::Scalar(num()?),
                "k_abs_table" => {
                    let p = Path::new(value);
                    let resolved = match base_dir {
                        Some(dir) if p.is_relative() => dir.join(p),
                        _ => p.to_path_buf(),
                    };
                    s.propagation.absorption = Absorption::Table(KTable::load(&resolved)?);
                }
                "tau_db" => s.propagation.sinr_threshold = db_to_linear(num()?),
                other => {
                    return Err(ScenarioError::Parse {
                        line: line_no,
                        msg: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        s.validate()?;
        Ok(s)
    }

    /// Re-emit the scenario in the config format (dB/deg units restored).
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: f64| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("h_a_m", self.network.ap_height);
        kv("h_u_m", self.network.ue_height);
        kv("lambda_a_per_m2", self.network.ap_density);
        kv("room_l1_m", self.network.room_length);
        kv("room_l2_m", self.network.room_width);
        kv("omega_deg", self.blockage.self_block_angle.to_degrees());
        kv("h_b_m", self.blockage.blocker_height);
        kv("w1_m", self.blockage.blocker_w1);
        kv("w2_m", self.blockage.blocker_w2);
        kv("lambda_b_per_m2", self.blockage.blocker_density);
        kv("v_b_mps", self.blockage.blocker_speed);
        kv("wall_mean_len_m", self.blockage.wall_mean_length);
        kv("lambda_w_per_m2", self.blockage.wall_density);
        let _ = writeln!(
            out,
            "wall_len_law = {}",
            match self.blockage.wall_length_law {
                WallLengthLaw::Fixed => "fixed",
                WallLengthLaw::Exponential => "exp",
            }
        );
        kv("phi_ah_deg", self.ap_antenna.phi_h.to_degrees());
        kv("phi_av_deg", self.ap_antenna.phi_v.to_degrees());
        kv("phi_uh_deg", self.ue_antenna.phi_h.to_degrees());
        kv("phi_uv_deg", self.ue_antenna.phi_v.to_degrees());
        kv("k_a", self.ap_antenna.side_lobe_ratio);
        kv("k_u", self.ue_antenna.side_lobe_ratio);
        if let Some(g) = self.ap_antenna.gain_main_override {
            kv("g_am_dbi", linear_to_db(g));
        }
        if let Some(g) = self.ap_antenna.gain_side_override {
            kv("g_as_dbi", linear_to_db(g));
        }
        if let Some(g) = self.ue_antenna.gain_main_override {
            kv("g_um_dbi", linear_to_db(g));
        }
        if let Some(g) = self.ue_antenna.gain_side_override {
            kv("g_us_dbi", linear_to_db(g));
        }
        kv("p_t_dbm", watts_to_dbm(self.propagation.transmit_power));
        kv("sigma2_dbm", watts_to_dbm(self.propagation.noise_power));
        kv("f_thz", self.propagation.frequency / 1e12);
        match &self.propagation.absorption {
            Absorption::Scalar(k) => kv("k_abs_per_m", *k),
            Absorption::Table(t) => {
                let _ = writeln!(out, "k_abs_table = {}", t.source);
            }
        }
        kv("tau_db", linear_to_db(self.propagation.sinr_threshold));
        out
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |invariant: &str| {
            Err(ScenarioError::Validation {
                invariant: invariant.to_string(),
            })
        };
        let n = &self.network;
        if !(n.ue_height > 0.0) {
            return fail("h_U > 0");
        }
        if !(n.ap_height > n.ue_height) {
            return fail("h_A > h_U");
        }
        if !(n.ap_density >= 0.0) {
            return fail("lambda_A >= 0");
        }
        if !(n.room_length > 0.0 && n.room_width > 0.0) {
            return fail("l1, l2 > 0");
        }
        let b = &self.blockage;
        if !(b.self_block_angle >= 0.0 && b.self_block_angle < 2.0 * std::f64::consts::PI) {
            return fail("0 <= omega < 2 pi");
        }
        if !(b.blocker_height > n.ue_height && b.blocker_height < n.ap_height) {
            return fail("h_U < h_B < h_A");
        }
        if !(b.blocker_w1 > 0.0 && b.blocker_w2 > 0.0) {
            return fail("w1, w2 > 0");
        }
        if !(b.blocker_density >= 0.0 && b.wall_density >= 0.0) {
            return fail("densities >= 0");
        }
        if !(b.blocker_speed >= 0.0) {
            return fail("v_B >= 0");
        }
        if !(b.wall_mean_length > 0.0) {
            return fail("E[L_W] > 0");
        }
        for (label, a) in [("AP", &self.ap_antenna), ("UE", &self.ue_antenna)] {
            if !(a.phi_h > 0.0 && a.phi_h < std::f64::consts::PI)
                || !(a.phi_v > 0.0 && a.phi_v < std::f64::consts::PI)
            {
                return Err(ScenarioError::Validation {
                    invariant: format!("0 < phi_{label} < pi"),
                });
            }
            if !(a.side_lobe_ratio > 0.0 && a.side_lobe_ratio < 1.0) {
                return Err(ScenarioError::Validation {
                    invariant: format!("k_{label} in (0,1)"),
                });
            }
        }
        let p = &self.propagation;
        if !(p.transmit_power > 0.0) {
            return fail("P_T > 0");
        }
        if !(p.noise_power > 0.0) {
            return fail("sigma^2 > 0");
        }
        if !(p.frequency > 0.0) {
            return fail("f > 0");
        }
        if !(p.sinr_threshold > 0.0) {
            return fail("tau > 0");
        }
        if let Absorption::Scalar(k) = p.absorption {
            if !(k > 0.0) {
                return fail("K(f) > 0");
            }
        }
        Ok(())
    }

    pub fn hbar(&self) -> f64 {
        self.network.ap_height - self.network.ue_height
    }

    pub fn ap_pattern(&self) -> Result<AntennaPattern, AntennaError> {
        self.ap_antenna.pattern()
    }

    pub fn ue_pattern(&self) -> Result<AntennaPattern, AntennaError> {
        self.ue_antenna.pattern()
    }

    /// Absorption coefficient at the scenario's configured frequency.
    pub fn absorption(&self) -> Result<f64, ScenarioError> {
        self.absorption_at(self.propagation.frequency)
    }

    pub fn absorption_at(&self, freq: f64) -> Result<f64, ScenarioError> {
        match &self.propagation.absorption {
            Absorption::Scalar(k) => Ok(*k),
            Absorption::Table(t) => t.at(freq),
        }
    }

    pub fn link_budget(&self) -> Result<LinkBudget, ScenarioError> {
        let ap = self.ap_pattern()?;
        let ue = self.ue_pattern()?;
        Ok(LinkBudget::new(
            self.propagation.transmit_power,
            (ap.gain_main, ap.gain_side),
            (ue.gain_main, ue.gain_side),
            self.propagation.frequency,
            self.absorption()?,
            self.propagation.noise_power,
            self.propagation.sinr_threshold,
        ))
    }

    pub fn derive(&self) -> Result<DerivedParams, ScenarioError> {
        derive_constants(self)
    }
}

/// Constants derived from a validated scenario: blockage exponents, the
/// four gain products, the association radius and the elevation-window
/// geometry of the interfering beams.
#[derive(Debug, Clone)]
pub struct DerivedParams {
    /// Height gap `h_A - h_U`.
    pub hbar: f64,
    /// Distance-free human LoS factor `e^{-2 w1 w2 lambda_B}`.
    pub zeta: f64,
    /// Human blockage rate `2 (w1+w2) lambda_B (h_B - h_U) / (pi hbar)`.
    pub eta_b: f64,
    /// Wall blockage rate `lambda_W (2/pi) E[L_W]`.
    pub eta_w: f64,
    /// Combined rate `eta_b + eta_w`.
    pub eta: f64,
    /// Link budget carrying the four `g_{kappa,iota}` products.
    pub budget: LinkBudget,
    /// Maximum association radius.
    pub r_t: f64,
    /// Association-PDF normalizer.
    pub rho: f64,
    /// `arctan(hbar / R_T)`.
    pub psi_bar: f64,
    /// Peak of the vertical hitting probability.
    pub x_mu: f64,
    /// Outer support edge of the vertical hitting probability (may be inf).
    pub x_nu: f64,
}

pub fn derive_constants(s: &Scenario) -> Result<DerivedParams, ScenarioError> {
    s.validate()?;
    let hbar = s.hbar();
    let b = &s.blockage;
    let zeta = (-2.0 * b.blocker_w1 * b.blocker_w2 * b.blocker_density).exp();
    let eta_b = 2.0 * (b.blocker_w1 + b.blocker_w2) * b.blocker_density
        * (b.blocker_height - s.network.ue_height)
        / (std::f64::consts::PI * hbar);
    let eta_w = b.wall_density * std::f64::consts::FRAC_2_PI * b.wall_mean_length;
    let budget = s.link_budget()?;
    let r_t = max_association_radius(&budget, hbar)?;
    let rho = assoc_pdf_normalizer(eta_w, r_t);
    let psi_bar = (hbar / r_t).atan();
    let (x_mu, x_nu) = elevation_window(psi_bar, s.ap_antenna.phi_v, hbar);
    Ok(DerivedParams {
        hbar,
        zeta,
        eta_b,
        eta_w,
        eta: eta_b + eta_w,
        budget,
        r_t,
        rho,
        psi_bar,
        x_mu,
        x_nu,
    })
}

/// `rho = eta_W^2 / (1 - e^{-eta_W R_T}(1 + eta_W R_T))`, with the
/// `eta_W -> 0` limit `2 / R_T^2`.
pub fn assoc_pdf_normalizer(eta_w: f64, r_t: f64) -> f64 {
    if eta_w < 1e-100 {
        return 2.0 / (r_t * r_t);
    }
    eta_w * eta_w / one_minus_exp1p(eta_w * r_t)
}

/// Spec-name alias for [`Scenario::from_config_str`].
pub fn load_scenario(source: &str) -> Result<Scenario, ScenarioError> {
    Scenario::from_config_str(source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn empty_document_is_table_defaults() {
        let s = load_scenario("").unwrap();
        assert_eq!(s, Scenario::default());
        assert_relative_eq!(s.propagation.transmit_power, dbm_to_watts(5.0));
        assert_relative_eq!(s.network.ap_height, 3.0);
    }

    #[test]
    fn parse_overrides_and_units() {
        let s = load_scenario(
            "# comment\n\
             tau_db = 0\n\
             g_am_dbi = 25\n\
             f_thz = 1.0
             omega_deg = 90 # trailing comment\n",
        )
        .unwrap();
        assert_relative_eq!(s.propagation.sinr_threshold, 1.0);
        assert_relative_eq!(s.ap_antenna.gain_main_override.unwrap(), db_to_linear(25.0));
        assert_relative_eq!(s.propagation.frequency, 1.0e12);
        assert_relative_eq!(s.blockage.self_block_angle, std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = load_scenario("h_a_m = 3\nbogus_key = 1\n").unwrap_err();
        match err {
            ScenarioError::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("bogus_key"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_scenario("h_a_m three\n").is_err());
        assert!(load_scenario("h_a_m = three\n").is_err());
    }

    #[test]
    fn validation_names_the_invariant() {
        let err = load_scenario("h_u_m = 3.5\n").unwrap_err();
        match err {
            ScenarioError::Validation { invariant } => assert_eq!(invariant, "h_A > h_U"),
            other => panic!("unexpected {other:?}"),
        }
        // h_B must sit between the UE and AP heights
        assert!(load_scenario("h_b_m = 3.5\n").is_err());
        assert!(load_scenario("k_a = 1.5\n").is_err());
        assert!(load_scenario("tau_db = 0\nroom_l1_m = 0\n").is_err());
    }

    #[test]
    fn derived_constants_table_values() {
        let d = Scenario::default().derive().unwrap();
        assert_relative_eq!(d.hbar, 1.7);
        // independent arithmetic re-evaluation of the zeta / eta formulas
        assert_relative_eq!(d.zeta, 0.964_640_293_483_123, max_relative = 1e-12);
        assert_relative_eq!(d.eta_b, 0.013_481_359_885_431_1, max_relative = 1e-12);
        assert_relative_eq!(d.eta_w, 0.076_394_372_684_109_8, max_relative = 1e-12);
        assert_relative_eq!(d.eta, d.eta_b + d.eta_w);
    }

    #[test]
    fn derived_no_blockers() {
        let s = load_scenario("lambda_b_per_m2 = 0\nlambda_w_per_m2 = 0\n").unwrap();
        let d = s.derive().unwrap();
        assert_eq!(d.zeta, 1.0);
        assert_eq!(d.eta, 0.0);
        // rho falls back to the open-office normalizer
        assert_relative_eq!(d.rho, 2.0 / (d.r_t * d.r_t));
    }

    #[test]
    fn derived_with_exact_db_overrides() {
        let s = load_scenario("g_am_dbi = 25\ng_as_dbi = -10\ng_um_dbi = 15\ng_us_dbi = -10\n")
            .unwrap();
        let d = s.derive().unwrap();
        assert_relative_eq!(d.r_t, 12.495_098_962_7, max_relative = 1e-9);
        assert_relative_eq!(d.x_mu, 7.514, epsilon = 2e-3);
    }

    #[test]
    fn zeta_eta_monotone_in_blocker_density() {
        let mut prev_zeta = f64::INFINITY;
        let mut prev_eta_b = -1.0;
        for lb in [0.0, 0.05, 0.1, 0.2, 0.4] {
            let s = load_scenario(&format!("lambda_b_per_m2 = {lb}\n")).unwrap();
            let d = s.derive().unwrap();
            assert!(d.zeta < prev_zeta || lb == 0.0);
            assert!(d.eta_b > prev_eta_b);
            prev_zeta = d.zeta;
            prev_eta_b = d.eta_b;
        }
    }

    #[test]
    fn ktable_interpolation() {
        let t = KTable::from_points(
            "test",
            vec![(1.0e12, 0.05), (1.1e12, 0.07), (1.05e12, 0.06)],
        )
        .unwrap();
        assert_relative_eq!(t.at(1.0e12).unwrap(), 0.05);
        assert_relative_eq!(t.at(1.025e12).unwrap(), 0.055);
        assert_relative_eq!(t.at(1.1e12).unwrap(), 0.07);
        assert!(t.at(0.9e12).is_err());
    }

    #[test]
    fn round_trip_defaults() {
        let s = Scenario::default();
        let s2 = load_scenario(&s.to_config_string()).unwrap();
        assert!(scenarios_close(&s, &s2, 1e-12));
    }

    fn scenarios_close(a: &Scenario, b: &Scenario, rel: f64) -> bool {
        let close = |x: f64, y: f64| (x - y).abs() <= rel * x.abs().max(y.abs()).max(1e-300);
        close(a.network.ap_height, b.network.ap_height)
            && close(a.network.ue_height, b.network.ue_height)
            && close(a.network.ap_density, b.network.ap_density)
            && close(a.network.room_length, b.network.room_length)
            && close(a.network.room_width, b.network.room_width)
            && close(a.blockage.self_block_angle, b.blockage.self_block_angle)
            && close(a.blockage.blocker_height, b.blockage.blocker_height)
            && close(a.blockage.blocker_w1, b.blockage.blocker_w1)
            && close(a.blockage.blocker_w2, b.blockage.blocker_w2)
            && close(a.blockage.blocker_density, b.blockage.blocker_density)
            && close(a.blockage.blocker_speed, b.blockage.blocker_speed)
            && close(a.blockage.wall_mean_length, b.blockage.wall_mean_length)
            && close(a.blockage.wall_density, b.blockage.wall_density)
            && a.blockage.wall_length_law == b.blockage.wall_length_law
            && close(a.ap_antenna.phi_h, b.ap_antenna.phi_h)
            && close(a.ap_antenna.phi_v, b.ap_antenna.phi_v)
            && close(a.ue_antenna.phi_h, b.ue_antenna.phi_h)
            && close(a.ue_antenna.phi_v, b.ue_antenna.phi_v)
            && close(a.ap_antenna.side_lobe_ratio, b.ap_antenna.side_lobe_ratio)
            && close(a.ue_antenna.side_lobe_ratio, b.ue_antenna.side_lobe_ratio)
            && match (a.ap_antenna.gain_main_override, b.ap_antenna.gain_main_override) {
                (Some(x), Some(y)) => close(x, y),
                (None, None) => true,
                _ => false,
            }
            && close(a.propagation.transmit_power, b.propagation.transmit_power)
            && close(a.propagation.noise_power, b.propagation.noise_power)
            && close(a.propagation.frequency, b.propagation.frequency)
            && close(a.propagation.sinr_threshold, b.propagation.sinr_threshold)
            && match (&a.propagation.absorption, &b.propagation.absorption) {
                (Absorption::Scalar(x), Absorption::Scalar(y)) => close(*x, *y),
                (Absorption::Table(x), Absorption::Table(y)) => x.source == y.source,
                _ => false,
            }
    }

    proptest! {
        // round trip: serialize(load(x)) parses to an equal scenario
        // (equality up to dB<->linear conversion precision)
        #[test]
        fn round_trip_random(
            p_t in -10.0f64..30.0,
            sigma in -110.0f64..-40.0,
            tau in -5.0f64..10.0,
            lam_b in 0.0f64..0.5,
            lam_w in 0.0f64..0.2,
            phi in 5.0f64..60.0,
            h_b in 1.4f64..2.9,
        ) {
            let text = format!(
                "p_t_dbm = {p_t}\nsigma2_dbm = {sigma}\ntau_db = {tau}\n\
                 lambda_b_per_m2 = {lam_b}\nlambda_w_per_m2 = {lam_w}\n\
                 phi_uh_deg = {phi}\nphi_uv_deg = {phi}\nh_b_m = {h_b}\n"
            );
            let s1 = load_scenario(&text).unwrap();
            let s2 = load_scenario(&s1.to_config_string()).unwrap();
            prop_assert!(scenarios_close(&s1, &s2, 1e-12));
        }
    }
}
