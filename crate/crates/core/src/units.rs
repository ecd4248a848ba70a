//! Unit conversions and bath thermodynamics.
//!
//! All decibel conversions are power-style (factor 10), with squeezing
//! expressed so that S dB changes a quadrature variance by 10^(S/10).

use crate::error::{Error, Result};

/// Reduced Planck constant, J s (2018 CODATA exact-h value).
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant, J/K (2019 SI exact).
pub const KB: f64 = 1.380649e-23;

/// Power gain or ratio from decibels: 10^(db/10).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Inverse of [`db_to_linear`].
pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Parameter(format!("cannot take dB of {x}")));
    }
    Ok(10.0 * x.log10())
}

/// Squeezing parameter r from a squeezing level in dB:
/// r = S ln(10) / 20, so the squeezed variance shrinks by 10^(-S/10).
pub fn squeezing_db_to_r(s_db: f64) -> f64 {
    s_db * std::f64::consts::LN_10 / 20.0
}

/// Inverse of [`squeezing_db_to_r`].
pub fn r_to_squeezing_db(r: f64) -> f64 {
    20.0 * r / std::f64::consts::LN_10
}

/// Loss fraction from an attenuation in dB: eps = 1 - 10^(-db/10).
/// 0 dB is lossless, +inf dB is full loss; negative attenuation is rejected.
pub fn loss_db_to_eps(db: f64) -> Result<f64> {
    if db < 0.0 {
        return Err(Error::Parameter(format!(
            "attenuation {db} dB is negative (would be gain)"
        )));
    }
    Ok(1.0 - 10f64.powf(-db / 10.0))
}

/// Efficiency from a (negative or zero) gain figure in dB: eta = 10^(db/10),
/// rejected above unity.
pub fn efficiency_db_to_eta(db: f64) -> Result<f64> {
    if db > 0.0 {
        return Err(Error::Parameter(format!(
            "efficiency {db} dB exceeds unity"
        )));
    }
    Ok(db_to_linear(db))
}

/// Bose-Einstein mean occupation of a mode at `freq_hz` against a bath at
/// `temp_k`; exactly 0 at zero temperature.
pub fn thermal_occupation(freq_hz: f64, temp_k: f64) -> Result<f64> {
    if !(freq_hz > 0.0) {
        return Err(Error::Parameter(format!(
            "frequency {freq_hz} Hz must be positive"
        )));
    }
    if temp_k < 0.0 || !temp_k.is_finite() {
        return Err(Error::Parameter(format!(
            "temperature {temp_k} K must be finite and >= 0"
        )));
    }
    if temp_k == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * 2.0 * std::f64::consts::PI * freq_hz / (KB * temp_k);
    Ok(1.0 / x.exp_m1())
}

/// Noise factor W = 2 n + 1 of a bath occupation.
pub fn noise_factor(n: f64) -> f64 {
    2.0 * n + 1.0
}

/// Noise factor of a bath at `temp_k` seen by a mode at `freq_hz`.
pub fn bath_noise_factor(freq_hz: f64, temp_k: f64) -> Result<f64> {
    Ok(noise_factor(thermal_occupation(freq_hz, temp_k)?))
}

/// Inverse of [`bath_noise_factor`]: the temperature at which a mode at
/// `freq_hz` sees noise factor `w`. Returns 0 for w = 1.
pub fn bath_temperature_for_noise_factor(freq_hz: f64, w: f64) -> Result<f64> {
    if !(freq_hz > 0.0) {
        return Err(Error::Parameter(format!(
            "frequency {freq_hz} Hz must be positive"
        )));
    }
    if !(w >= 1.0) {
        return Err(Error::Parameter(format!(
            "noise factor {w} must be >= 1"
        )));
    }
    let n = (w - 1.0) / 2.0;
    if n == 0.0 {
        return Ok(0.0);
    }
    let x = (1.0 + 1.0 / n).ln();
    Ok(HBAR * 2.0 * std::f64::consts::PI * freq_hz / (KB * x))
}
