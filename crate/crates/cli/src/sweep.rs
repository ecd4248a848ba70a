//! Two-dimensional parameter sweeps: axis specifications, per-point quantity
//! evaluation, and deterministic CSV assembly.

use std::io;
use std::str::FromStr;

use rayon::prelude::*;

use cvqt_core::codebook::Codebook;
use cvqt_core::teleport::{self, TeleportConfig, SEG_FF};
use cvqt_core::{config, nocloning, security, units, Error, Result};

use crate::gformat::g9;

/// Value a secure-fidelity grid records where no information advantage exists
/// at any scanned temperature (no crossing, hence no fidelity to report).
pub const NEVER_SECURE_SENTINEL: f64 = -1.0;

/// Grid spacing of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Uniform steps from min to max.
    Linear,
    /// Geometric steps; endpoints must be positive.
    Log,
    /// Endpoints given in decibels, uniform steps in dB; the parameter (and
    /// the CSV column) receives the linear power ratio 10^(x/10).
    Db,
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
            Scale::Db => "db",
        }
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scale::Linear),
            "log" => Ok(Scale::Log),
            "db" | "dB" => Ok(Scale::Db),
            other => Err(Error::Config(format!(
                "unknown axis scale '{other}' (expected linear, log, or db)"
            ))),
        }
    }
}

/// One swept parameter: which key it sets and the grid along it.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    /// Parse the compact CLI form `name:min:max:count[:scale]`.
    pub fn parse(spec: &str) -> Result<Axis> {
        let bad = |msg: &str| {
            Error::Config(format!(
                "axis '{spec}': {msg} (expected name:min:max:count[:linear|log|db])"
            ))
        };
        let parts: Vec<&str> = spec.split(':').collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(bad("wrong number of fields"));
        }
        let name = parts[0].trim();
        if name.is_empty() {
            return Err(bad("empty parameter name"));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("'{s}' is not a number")))
        };
        let axis = Axis {
            name: name.to_string(),
            min: num(parts[1])?,
            max: num(parts[2])?,
            count: parts[3]
                .trim()
                .parse()
                .map_err(|_| bad(&format!("'{}' is not a count", parts[3])))?,
            scale: match parts.get(4) {
                Some(s) => s.trim().parse()?,
                None => Scale::Linear,
            },
        };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::Config(format!(
                "axis '{}': endpoints must be finite",
                self.name
            )));
        }
        if self.count < 2 {
            return Err(Error::Config(format!(
                "axis '{}': count {} must be >= 2",
                self.name, self.count
            )));
        }
        if self.scale == Scale::Log && !(self.min > 0.0 && self.max > 0.0) {
            return Err(Error::Config(format!(
                "axis '{}': log spacing needs positive endpoints",
                self.name
            )));
        }
        Ok(())
    }

    /// Grid points along the axis. Endpoints are exact, not accumulated.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let mut vals = Vec::with_capacity(n);
        match self.scale {
            Scale::Linear => {
                let step = (self.max - self.min) / (n - 1) as f64;
                for i in 0..n {
                    vals.push(self.min + step * i as f64);
                }
                vals[0] = self.min;
                vals[n - 1] = self.max;
            }
            Scale::Log => {
                let (a, b) = (self.min.ln(), self.max.ln());
                let step = (b - a) / (n - 1) as f64;
                for i in 0..n {
                    vals.push((a + step * i as f64).exp());
                }
                vals[0] = self.min;
                vals[n - 1] = self.max;
            }
            Scale::Db => {
                let step = (self.max - self.min) / (n - 1) as f64;
                for i in 0..n {
                    vals.push(units::db_to_linear(self.min + step * i as f64));
                }
            }
        }
        vals
    }
}

/// What a grid cell evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Fidelity,
    Fnc,
    MutualInformation,
    Holevo,
    SecureFidelity,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Fidelity => "fidelity",
            Quantity::Fnc => "f_nc",
            Quantity::MutualInformation => "mutual_information",
            Quantity::Holevo => "holevo",
            Quantity::SecureFidelity => "secure_fidelity",
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fidelity" => Ok(Quantity::Fidelity),
            "f_nc" => Ok(Quantity::Fnc),
            "mutual_information" => Ok(Quantity::MutualInformation),
            "holevo" => Ok(Quantity::Holevo),
            "secure_fidelity" => Ok(Quantity::SecureFidelity),
            other => Err(Error::Config(format!(
                "unknown quantity '{other}' (expected fidelity, f_nc, \
                 mutual_information, holevo, or secure_fidelity)"
            ))),
        }
    }
}

/// Everything a point evaluation starts from: the chain configuration plus
/// the frontend-level knobs that live outside `TeleportConfig`.
#[derive(Debug, Clone)]
pub struct Scene {
    pub cfg: TeleportConfig,
    pub codebook: Codebook,
    /// Derive the coupler transmissivity from the matching condition,
    /// eta = 4 / (G (1 - eps_ff)), instead of reading it from the config.
    /// Security quantities only; needs an explicit gain_db.
    pub matched_eta: bool,
    /// Upper edge of the cloner amplification scan.
    pub a_max: f64,
}

impl Default for Scene {
    fn default() -> Self {
        Scene {
            cfg: TeleportConfig::ideal(),
            codebook: Codebook::Gaussian { sigma2: 1.0 },
            matched_eta: false,
            a_max: nocloning::A_MAX_DEFAULT,
        }
    }
}

impl Scene {
    /// Apply one key=value pair: frontend keys first (preset, codebook,
    /// matched_eta, a_max, sigma2, n_cut), chain-config keys second. Unknown
    /// keys are errors, so sweeps reject typos instead of running constants.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "preset" => self.cfg = config::preset(value)?,
            "codebook" => self.codebook = value.parse()?,
            "matched_eta" => {
                self.matched_eta = match value {
                    "true" | "1" | "yes" | "on" => true,
                    "false" | "0" | "no" | "off" => false,
                    _ => {
                        return Err(Error::Config(format!(
                            "key 'matched_eta': '{value}' is not a boolean"
                        )))
                    }
                }
            }
            "a_max" => {
                self.a_max = value.parse().map_err(|_| {
                    Error::Config(format!("key 'a_max': '{value}' is not a number"))
                })?;
            }
            "sigma2" => {
                let x = parse_num(key, value)?;
                self.codebook = match self.codebook {
                    Codebook::Gaussian { .. } => Codebook::Gaussian { sigma2: x },
                    Codebook::TruncatedGaussian { n_cut, .. } => {
                        Codebook::TruncatedGaussian { sigma2: x, n_cut }
                    }
                    Codebook::TruncatedUniform { .. } => {
                        return Err(Error::Config(format!(
                            "codebook '{}' has no sigma2 parameter",
                            self.codebook
                        )))
                    }
                };
            }
            "n_cut" => {
                let x = parse_num(key, value)?;
                self.codebook = match self.codebook {
                    Codebook::TruncatedUniform { .. } => Codebook::TruncatedUniform { n_cut: x },
                    Codebook::TruncatedGaussian { sigma2, .. } => {
                        Codebook::TruncatedGaussian { sigma2, n_cut: x }
                    }
                    Codebook::Gaussian { .. } => {
                        return Err(Error::Config(format!(
                            "codebook '{}' has no n_cut parameter",
                            self.codebook
                        )))
                    }
                };
            }
            _ => {
                if !config::apply(&mut self.cfg, key, value)? {
                    return Err(Error::Config(format!("unknown configuration key '{key}'")));
                }
            }
        }
        Ok(())
    }

    pub fn apply_pairs(&mut self, pairs: &[(String, String)]) -> Result<()> {
        for (k, v) in pairs {
            self.apply(k, v)?;
        }
        Ok(())
    }

    /// Security operating point implied by the chain configuration.
    pub fn security_params(&self) -> Result<security::SecurityParams> {
        let cfg = &self.cfg;
        let eps_ff = cfg.eps_ff();
        let (gain, eta);
        if self.matched_eta {
            if cfg.matched_gain {
                return Err(Error::Config(
                    "matched_eta needs an explicit gain_db; matched_gain and matched_eta \
                     together are circular"
                        .into(),
                ));
            }
            gain = cfg.gain()?;
            eta = 4.0 / (gain * (1.0 - eps_ff));
        } else {
            gain = cfg.gain()?;
            eta = cfg.eta();
        }
        Ok(security::SecurityParams {
            squeezing_db: cfg.squeezing_db,
            gain,
            eta,
            eps_ff,
            t_ff: cfg.bath_temps[SEG_FF],
            carrier_frequency: cfg.carrier_frequency,
            codebook: self.codebook,
        })
    }
}

fn parse_num(key: &str, value: &str) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("key '{key}': '{value}' is not a number")))
}

fn security_point(p: &security::SecurityParams) -> Result<security::SecurityPoint> {
    security::finite_parameter_point(
        p.squeezing_db,
        p.gain,
        p.eta,
        p.eps_ff,
        p.t_ff,
        p.carrier_frequency,
        &p.codebook,
    )
}

/// Evaluate one quantity at the scene's operating point.
pub fn evaluate(scene: &Scene, quantity: Quantity) -> Result<f64> {
    match quantity {
        Quantity::Fidelity => Ok(teleport::run_chain(&scene.cfg)?.fidelity),
        Quantity::Fnc => {
            Ok(nocloning::threshold_with_amax(&scene.codebook, scene.a_max)?.f_nc)
        }
        Quantity::MutualInformation => {
            Ok(security_point(&scene.security_params()?)?.mutual_information)
        }
        Quantity::Holevo => Ok(security_point(&scene.security_params()?)?.holevo),
        Quantity::SecureFidelity => {
            let p = scene.security_params()?;
            let outcome = security::secure_fidelity(
                p.squeezing_db,
                p.gain,
                p.eta,
                p.eps_ff,
                p.carrier_frequency,
                &p.codebook,
            )?;
            Ok(match outcome {
                security::SecureOutcome::Crossing { fidelity, .. } => fidelity,
                security::SecureOutcome::AlwaysSecure { fidelity } => fidelity,
                security::SecureOutcome::NeverSecure => NEVER_SECURE_SENTINEL,
            })
        }
    }
}

/// A full grid: two axes, one quantity, one base scene.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub axis1: Axis,
    pub axis2: Axis,
    pub quantity: Quantity,
    pub scene: Scene,
}

impl SweepGrid {
    /// Evaluate every point, axis1 outer. Points run on the rayon pool;
    /// results land by index, so the output is deterministic regardless of
    /// scheduling.
    pub fn run(&self) -> Result<Vec<f64>> {
        let v1 = self.axis1.values();
        let v2 = self.axis2.values();
        let indices: Vec<(usize, usize)> = (0..v1.len())
            .flat_map(|i| (0..v2.len()).map(move |j| (i, j)))
            .collect();
        indices
            .par_iter()
            .map(|&(i, j)| {
                let mut scene = self.scene.clone();
                // f64 Display round-trips exactly, so threading axis values
                // through the string config path loses nothing.
                scene.apply(&self.axis1.name, &v1[i].to_string())?;
                scene.apply(&self.axis2.name, &v2[j].to_string())?;
                evaluate(&scene, self.quantity)
            })
            .collect()
    }

    /// Stream the grid as CSV: header line `axis1,axis2,quantity`, one row per
    /// point with axis1 slowest, LF endings, values in %.9g.
    pub fn write_csv<W: io::Write>(&self, w: &mut W, values: &[f64]) -> io::Result<()> {
        let v1 = self.axis1.values();
        let v2 = self.axis2.values();
        debug_assert_eq!(values.len(), v1.len() * v2.len());
        w.write_all(b"axis1,axis2,quantity\n")?;
        for (i, a) in v1.iter().enumerate() {
            for (j, b) in v2.iter().enumerate() {
                let q = values[i * v2.len() + j];
                writeln!(w, "{},{},{}", g9(*a), g9(*b), g9(q))?;
            }
        }
        Ok(())
    }
}

/// Parse the `--grid AxB` override.
pub fn parse_grid_counts(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("grid '{s}' must look like 101x101"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a < 2 || b < 2 {
        return Err(Error::Config(format!("grid '{s}': counts must be >= 2")));
    }
    Ok((a, b))
}
