//! Input-ensemble distributions over coherent-state amplitudes: a Gaussian
//! codebook, a uniform disk in photon-number space, and a Gaussian truncated
//! at a cutoff photon number.
//!
//! All three are isotropic, so averages reduce to radial integrals in
//! x = |alpha|^2, where the Gaussian weight becomes a plain exponential.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quad;

/// Relative tolerance for codebook averages.
const AVG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Codebook {
    /// exp(-|a|^2 / 2 s2) / (2 pi s2).
    Gaussian { sigma2: f64 },
    /// Uniform over the disk |a|^2 <= n_cut.
    TruncatedUniform { n_cut: f64 },
    /// Gaussian restricted to |a|^2 <= n_cut, renormalized by
    /// 1 - exp(-n_cut / 2 s2).
    TruncatedGaussian { sigma2: f64, n_cut: f64 },
}

impl Codebook {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Codebook::Gaussian { sigma2 } => sigma2 > 0.0,
            Codebook::TruncatedUniform { n_cut } => n_cut > 0.0,
            Codebook::TruncatedGaussian { sigma2, n_cut } => sigma2 > 0.0 && n_cut > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "codebook parameters must be positive: {self}"
            )))
        }
    }

    /// Probability density over the complex plane at amplitude `alpha`.
    pub fn density(&self, alpha: Complex64) -> f64 {
        self.density_radial(alpha.norm_sqr())
    }

    /// Density as a function of x = |alpha|^2 (still per unit area of the
    /// complex plane).
    pub fn density_radial(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            Codebook::Gaussian { sigma2 } => {
                (-x / (2.0 * sigma2)).exp() / (2.0 * std::f64::consts::PI * sigma2)
            }
            Codebook::TruncatedUniform { n_cut } => {
                if x <= n_cut {
                    1.0 / (std::f64::consts::PI * n_cut)
                } else {
                    0.0
                }
            }
            Codebook::TruncatedGaussian { sigma2, n_cut } => {
                if x <= n_cut {
                    let norm = 1.0 - (-n_cut / (2.0 * sigma2)).exp();
                    (-x / (2.0 * sigma2)).exp() / (2.0 * std::f64::consts::PI * sigma2 * norm)
                } else {
                    0.0
                }
            }
        }
    }

    /// Upper end of the radial support in x = |alpha|^2; `None` means
    /// unbounded (integration cuts the Gaussian tail far out).
    pub fn support_upper(&self) -> Option<f64> {
        match *self {
            Codebook::Gaussian { .. } => None,
            Codebook::TruncatedUniform { n_cut } | Codebook::TruncatedGaussian { n_cut, .. } => {
                Some(n_cut)
            }
        }
    }

    /// Integration cutoff in x: the support edge, or deep in the Gaussian
    /// tail where the weight is below 1e-22. A truncation far beyond the
    /// Gaussian tail is ignored so the quadrature domain stays proportional
    /// to where the weight actually lives.
    pub(crate) fn radial_cutoff(&self) -> f64 {
        match *self {
            Codebook::Gaussian { sigma2 } => 100.0 * sigma2,
            Codebook::TruncatedUniform { n_cut } => n_cut,
            Codebook::TruncatedGaussian { sigma2, n_cut } => n_cut.min(100.0 * sigma2),
        }
    }

    /// Average of an isotropic observable given as a function of
    /// x = |alpha|^2: integral of f(x) times the radial weight.
    pub fn average_isotropic<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        self.average_isotropic_damped(0.0, f)
    }

    /// Same, for an observable known to decay at least as fast as
    /// exp(-decay_rate x): the integration window shrinks to where the
    /// observable falls below e^-60 of its peak, which keeps the panel count
    /// bounded when the weight is much wider than the observable.
    pub(crate) fn average_isotropic_damped<F: Fn(f64) -> f64>(
        &self,
        decay_rate: f64,
        f: F,
    ) -> Result<f64> {
        self.validate()?;
        let mut hi = self.radial_cutoff();
        if decay_rate > 0.0 {
            hi = hi.min(60.0 / decay_rate);
        }
        // d^2 alpha = pi dx on isotropic densities.
        let g = |x: f64| f(x) * self.density_radial(x) * std::f64::consts::PI;
        quad::integrate(&g, 0.0, hi, AVG_TOL)
    }

    /// Average of a general observable of alpha by polar quadrature: a fixed
    /// angular rule (doubled until stable) inside the adaptive radial one.
    pub fn average<F: Fn(Complex64) -> f64>(&self, f: F) -> Result<f64> {
        self.validate()?;
        let hi = self.radial_cutoff();
        let radial = |x: f64, n_ang: usize| -> f64 {
            let w = self.density_radial(x) / 2.0; // d^2 alpha = (1/2) dx dtheta
            let r = x.sqrt();
            let mut acc = 0.0;
            for k in 0..n_ang {
                let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n_ang as f64;
                acc += f(Complex64::from_polar(r, theta));
            }
            acc * w * 2.0 * std::f64::consts::PI / n_ang as f64
        };
        let mut n_ang = 16;
        let mut prev = quad::integrate(&|x| radial(x, n_ang), 0.0, hi, AVG_TOL)?;
        loop {
            n_ang *= 2;
            let next = quad::integrate(&|x| radial(x, n_ang), 0.0, hi, AVG_TOL)?;
            let scale = next.abs().max(1.0);
            if (next - prev).abs() <= 1e-8 * scale {
                return Ok(next);
            }
            if n_ang > 4096 {
                return Err(Error::NonConvergence {
                    context: "angular refinement in codebook average",
                    evals: n_ang,
                    last: next,
                });
            }
            prev = next;
        }
    }

    /// Draw one amplitude. Truncated variants reject against the support;
    /// very tight truncations (n_cut / sigma2 < 0.1) switch to inverting the
    /// radial CDF to keep the acceptance rate off the floor.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match *self {
            Codebook::Gaussian { sigma2 } => {
                let s = sigma2.sqrt();
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(s * re, s * im)
            }
            Codebook::TruncatedUniform { n_cut } => {
                let x = n_cut * rng.gen::<f64>();
                let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                Complex64::from_polar(x.sqrt(), theta)
            }
            Codebook::TruncatedGaussian { sigma2, n_cut } => {
                if n_cut / sigma2 >= 0.1 {
                    let proposal = Codebook::Gaussian { sigma2 };
                    loop {
                        let alpha = proposal.sample(rng);
                        if alpha.norm_sqr() <= n_cut {
                            return alpha;
                        }
                    }
                } else {
                    // Radial CDF in x is a truncated exponential; invert it.
                    let u: f64 = rng.gen();
                    let tail = 1.0 - (-n_cut / (2.0 * sigma2)).exp();
                    let x = -2.0 * sigma2 * (1.0 - u * tail).ln();
                    let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
                    Complex64::from_polar(x.sqrt(), theta)
                }
            }
        }
    }
}

impl fmt::Display for Codebook {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Codebook::Gaussian { sigma2 } => write!(f, "gaussian:sigma2={sigma2}"),
            Codebook::TruncatedUniform { n_cut } => write!(f, "truncuniform:N={n_cut}"),
            Codebook::TruncatedGaussian { sigma2, n_cut } => {
                write!(f, "truncgaussian:sigma2={sigma2},N={n_cut}")
            }
        }
    }
}

impl FromStr for Codebook {
    type Err = Error;

    /// Parses the CLI spec strings "gaussian:sigma2=1", "truncuniform:N=10",
    /// "truncgaussian:sigma2=1,N=10".
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("codebook spec '{s}': {msg}"));
        let (name, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected name:key=value[,key=value]"))?;
        let mut sigma2 = None;
        let mut n_cut = None;
        for part in rest.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| bad("value is not a number"))?;
            match key.trim() {
                "sigma2" => sigma2 = Some(value),
                "N" | "n" => n_cut = Some(value),
                other => return Err(bad(&format!("unknown key '{other}'"))),
            }
        }
        let cb = match name.trim() {
            "gaussian" => Codebook::Gaussian {
                sigma2: sigma2.ok_or_else(|| bad("missing sigma2"))?,
            },
            "truncuniform" => Codebook::TruncatedUniform {
                n_cut: n_cut.ok_or_else(|| bad("missing N"))?,
            },
            "truncgaussian" => Codebook::TruncatedGaussian {
                sigma2: sigma2.ok_or_else(|| bad("missing sigma2"))?,
                n_cut: n_cut.ok_or_else(|| bad("missing N"))?,
            },
            other => return Err(bad(&format!("unknown codebook '{other}'"))),
        };
        cb.validate()?;
        Ok(cb)
    }
}
