//! Flat key=value run configuration.
//!
//! Config files are plain text: one `key = value` per line, `#` starts a
//! comment, blank lines ignored. The same keys work as `--set key=value`
//! overrides on the command line. Recognized keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `squeezing_db` | resource squeezing S in dB |
//! | `gamma1`..`gamma4` | squeezer/amplifier angles in radians |
//! | `gain_db` | amplifier gain in dB (disables matched gain) |
//! | `matched_gain` | `true`/`false`: derive gain from the matching condition |
//! | `eta_db` (alias `coupling_db`) | output coupler transmissivity in dB (<= 0) |
//! | `eps1`..`eps21`, `eps1_db`.. | per-segment loss as fraction or dB |
//! | `eps_ent`, `eps_ff` (+`_db`) | shorthands for segments 16 and 17 |
//! | `bath_temp1`..`bath_temp21` | per-segment bath temperature in kelvin |
//! | `bath_temp` | all segments at once |
//! | `t_ent`, `t_ff` | shorthands for bath temps of segments 16 and 17 |
//! | `n1`, `n2`, `n3` | initial thermal occupations of the three modes |
//! | `carrier_frequency` | carrier in Hz (`frequency_ghz` for GHz) |
//! | `alpha_re`, `alpha_im`, `alpha2` | coherent input amplitude (or \|alpha\|^2) |
//! | `input` | `coherent` or `ensemble` |
//! | `input_sigma2` | ensemble-input variance (switches input to ensemble) |

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::teleport::{InputKind, TeleportConfig, N_SEGMENTS, SEG_ENT, SEG_FF};
use crate::units;

/// Named starting points for a run.
pub fn preset(name: &str) -> Result<TeleportConfig> {
    match name {
        "ideal" => Ok(TeleportConfig::ideal()),
        "realistic" => Ok(TeleportConfig::realistic()),
        other => Err(Error::Config(format!(
            "unknown preset '{other}' (expected 'ideal' or 'realistic')"
        ))),
    }
}

/// Parse a whole config file into ordered (key, value) pairs.
pub fn parse_lines(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected 'key = value', got '{raw}'", i + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config(format!(
                "line {}: empty key or value in '{raw}'",
                i + 1
            )));
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

/// Parse one `key=value` override (the `--set` argument form).
pub fn parse_pair(s: &str) -> Result<(String, String)> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{s}' must look like key=value")))?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() || value.is_empty() {
        return Err(Error::Config(format!("override '{s}' has an empty side")));
    }
    Ok((key.to_string(), value.to_string()))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key '{key}': '{value}' is not a number")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!(
            "key '{key}': '{value}' is not a boolean"
        ))),
    }
}

/// "eps7" with prefix "eps" -> segment index 6. One-based in keys, like the
/// segment labels.
fn segment_index(key: &str, prefix: &str) -> Option<usize> {
    let digits = key.strip_prefix(prefix)?;
    let j: usize = digits.parse().ok()?;
    (1..=N_SEGMENTS).contains(&j).then(|| j - 1)
}

fn set_alpha(cfg: &mut TeleportConfig, update: impl FnOnce(Complex64) -> Complex64) {
    let current = match cfg.input {
        InputKind::Coherent { alpha } => alpha,
        InputKind::Ensemble { .. } => Complex64::new(0.0, 0.0),
    };
    cfg.input = InputKind::Coherent {
        alpha: update(current),
    };
}

/// Apply one key to a teleportation config. `Ok(true)` when the key was
/// recognized; `Ok(false)` when it belongs to some other layer (the caller
/// decides whether that is an error); `Err` for a recognized key with a bad
/// value. Values are range-checked later by `TeleportConfig::validate`.
pub fn apply(cfg: &mut TeleportConfig, key: &str, value: &str) -> Result<bool> {
    match key {
        "squeezing_db" => cfg.squeezing_db = parse_f64(key, value)?,
        "gamma1" => cfg.gamma1 = parse_f64(key, value)?,
        "gamma2" => cfg.gamma2 = parse_f64(key, value)?,
        "gamma3" => cfg.gamma3 = Some(parse_f64(key, value)?),
        "gamma4" => cfg.gamma4 = Some(parse_f64(key, value)?),
        "gain_db" => {
            cfg.gain_db = parse_f64(key, value)?;
            cfg.matched_gain = false;
        }
        "matched_gain" => cfg.matched_gain = parse_bool(key, value)?,
        "eta_db" | "coupling_db" => cfg.coupling_db = parse_f64(key, value)?,
        "eps_ent" => cfg.segment_losses[SEG_ENT] = parse_f64(key, value)?,
        "eps_ff" => cfg.segment_losses[SEG_FF] = parse_f64(key, value)?,
        "eps_ent_db" => {
            cfg.segment_losses[SEG_ENT] = units::loss_db_to_eps(parse_f64(key, value)?)?;
        }
        "eps_ff_db" => {
            cfg.segment_losses[SEG_FF] = units::loss_db_to_eps(parse_f64(key, value)?)?;
        }
        "bath_temp" => {
            let t = parse_f64(key, value)?;
            cfg.bath_temps = [t; N_SEGMENTS];
        }
        "t_ent" => cfg.bath_temps[SEG_ENT] = parse_f64(key, value)?,
        "t_ff" => cfg.bath_temps[SEG_FF] = parse_f64(key, value)?,
        "n1" => cfg.input_noise[0] = parse_f64(key, value)?,
        "n2" => cfg.input_noise[1] = parse_f64(key, value)?,
        "n3" => cfg.input_noise[2] = parse_f64(key, value)?,
        "carrier_frequency" => cfg.carrier_frequency = parse_f64(key, value)?,
        "frequency_ghz" => cfg.carrier_frequency = parse_f64(key, value)? * 1e9,
        "alpha_re" => {
            let re = parse_f64(key, value)?;
            set_alpha(cfg, |a| Complex64::new(re, a.im));
        }
        "alpha_im" => {
            let im = parse_f64(key, value)?;
            set_alpha(cfg, |a| Complex64::new(a.re, im));
        }
        "alpha2" => {
            let x = parse_f64(key, value)?;
            if x < 0.0 {
                return Err(Error::Config(format!("key 'alpha2': {x} must be >= 0")));
            }
            set_alpha(cfg, |_| Complex64::new(x.sqrt(), 0.0));
        }
        "input" => match value {
            "coherent" => set_alpha(cfg, |a| a),
            "ensemble" => {
                if !matches!(cfg.input, InputKind::Ensemble { .. }) {
                    cfg.input = InputKind::Ensemble { sigma2: 1.0 };
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "key 'input': '{other}' is not 'coherent' or 'ensemble'"
                )))
            }
        },
        "input_sigma2" => {
            cfg.input = InputKind::Ensemble {
                sigma2: parse_f64(key, value)?,
            };
        }
        _ => {
            if let Some(idx) = segment_index(key, "eps") {
                cfg.segment_losses[idx] = parse_f64(key, value)?;
            } else if let Some(stripped) = key.strip_suffix("_db") {
                if let Some(idx) = segment_index(stripped, "eps") {
                    cfg.segment_losses[idx] = units::loss_db_to_eps(parse_f64(key, value)?)?;
                } else {
                    return Ok(false);
                }
            } else if let Some(idx) = segment_index(key, "bath_temp") {
                cfg.bath_temps[idx] = parse_f64(key, value)?;
            } else {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Apply a batch of pairs, treating unrecognized keys as errors. `preset`
/// keys switch the base config in place, so later lines override it.
pub fn apply_all(cfg: &mut TeleportConfig, pairs: &[(String, String)]) -> Result<()> {
    for (key, value) in pairs {
        if key == "preset" {
            *cfg = preset(value)?;
            continue;
        }
        if !apply(cfg, key, value)? {
            return Err(Error::Config(format!("unknown configuration key '{key}'")));
        }
    }
    Ok(())
}
