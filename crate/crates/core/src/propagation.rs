//! THz link budget: spreading plus molecular-absorption loss, the maximum
//! association radius, and the dominant-interferer boundary distance.

use crate::specfun::{lambert_w0, SpecFunError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PropagationError {
    #[error("zenith SNR below threshold: association radius undefined (g_mm/(sigma^2 tau) = {snr_margin:.3e} <= hbar^2 e^(K hbar))")]
    Infeasible { snr_margin: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Antenna lobe selector for the four gain combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lobe {
    Main,
    Side,
}

impl Lobe {
    fn idx(self) -> usize {
        match self {
            Lobe::Main => 0,
            Lobe::Side => 1,
        }
    }
}

/// The four `g_{kappa,iota} = P_T G_A^kappa G_U^iota (c / 4 pi f)^2`
/// products plus the scalar channel constants.
#[derive(Debug, Clone, Copy)]
pub struct LinkBudget {
    g: [[f64; 2]; 2],
    pub absorption: f64,
    pub noise_power: f64,
    pub sinr_threshold: f64,
}

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

impl LinkBudget {
    pub fn new(
        transmit_power: f64,
        ap_gains: (f64, f64),
        ue_gains: (f64, f64),
        frequency: f64,
        absorption: f64,
        noise_power: f64,
        sinr_threshold: f64,
    ) -> Self {
        let spread = (SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * frequency)).powi(2);
        let (gam, gas) = ap_gains;
        let (gum, gus) = ue_gains;
        let gp = |a: f64, u: f64| transmit_power * a * u * spread;
        Self {
            g: [[gp(gam, gum), gp(gam, gus)], [gp(gas, gum), gp(gas, gus)]],
            absorption,
            noise_power,
            sinr_threshold,
        }
    }

    /// `g_{kappa,iota}` in W m^2; `kappa` is the AP lobe, `iota` the UE lobe.
    pub fn gain_product(&self, kappa: Lobe, iota: Lobe) -> f64 {
        self.g[kappa.idx()][iota.idx()]
    }
}

/// Received power over a link of horizontal distance `x` and height gap
/// `hbar`: `g d^-2 e^(-K d)` with `d = sqrt(hbar^2 + x^2)`.
pub fn received_power(x: f64, kappa: Lobe, iota: Lobe, lb: &LinkBudget, hbar: f64) -> f64 {
    let d2 = hbar * hbar + x * x;
    let d = d2.sqrt();
    lb.gain_product(kappa, iota) / d2 * (-lb.absorption * d).exp()
}

/// Largest horizontal distance at which the blockage-free main-main SNR
/// still meets the threshold:
/// `R_T = sqrt((2/K W[K/2 sqrt(g_mm / sigma^2 tau)])^2 - hbar^2)`.
pub fn max_association_radius(lb: &LinkBudget, hbar: f64) -> Result<f64, PropagationError> {
    let ratio = lb.gain_product(Lobe::Main, Lobe::Main) / (lb.noise_power * lb.sinr_threshold);
    let k = lb.absorption;
    let d_max = if k == 0.0 {
        ratio.sqrt()
    } else {
        2.0 / k * lambert_w0(k / 2.0 * ratio.sqrt())?
    };
    if d_max < hbar {
        return Err(PropagationError::Infeasible {
            snr_margin: ratio / (hbar * hbar * (k * hbar).exp()),
        });
    }
    Ok((d_max * d_max - hbar * hbar).sqrt())
}

/// Boundary of the region where a lone interferer with gains
/// `(kappa, iota)` forces SINR below threshold at a user served from
/// horizontal distance `x00`.
///
/// Returns `f64::INFINITY` when the desired signal alone cannot meet the
/// threshold (outage regardless of interference) and `0.0` when even a
/// co-located interferer is too weak to dominate.
pub fn dominant_distance(x00: f64, kappa: Lobe, iota: Lobe, lb: &LinkBudget, hbar: f64) -> f64 {
    let desired = received_power(x00, Lobe::Main, Lobe::Main, lb, hbar);
    let margin = desired - lb.sinr_threshold * lb.noise_power;
    if margin <= 0.0 {
        return f64::INFINITY;
    }
    let g = lb.gain_product(kappa, iota);
    if g == 0.0 {
        return 0.0;
    }
    let ratio = (g * lb.sinr_threshold / margin).sqrt();
    let k = lb.absorption;
    let d_max = if k == 0.0 {
        ratio
    } else {
        match lambert_w0(k / 2.0 * ratio) {
            Ok(w) => 2.0 / k * w,
            Err(_) => return 0.0,
        }
    };
    if d_max <= hbar {
        0.0
    } else {
        (d_max * d_max - hbar * hbar).sqrt()
    }
}
