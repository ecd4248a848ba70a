//! Public-channel security of the teleportation link: the legitimate pair's
//! mutual information, the eavesdropper's Holevo bound, and the secure
//! fidelity where the two meet.
//!
//! The receiver sees a Gaussian channel beta = sqrt(k) alpha + noise(v_out).
//! An eavesdropper siphoning a fraction eps_ff of the amplified feedforward
//! sees the same symbol buried in the resource state's anti-squeezed noise;
//! rescaling her amplification away leaves an effective thermal kernel, so
//! both sides reduce to entropy differences of smeared codebooks. All
//! information quantities are in nats.

use num_complex::Complex64;

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::gaussian::von_neumann_entropy;
use crate::optim::bisect;
use crate::quad;
use crate::special::{humbert_phi3, ln_i0, PHI3_MAX_ARG_SUM};
use crate::teleport::{self, InputKind, TeleportConfig};
use crate::units;

/// Temperature bracket scanned for the information crossing, in kelvin.
pub const T_BRACKET_MIN_K: f64 = 1e-3;
pub const T_BRACKET_MAX_K: f64 = 1e6;
/// Geometric step of the bracket scan.
pub const T_BRACKET_FACTOR: f64 = 10.0;

/// "Hot feedforward bath": W_ff above this counts as saturated.
pub const EVE_SATURATION_W: f64 = 1e3;
/// "Gain outruns the bath": G * eps_ff / W_ff above this counts as saturated.
pub const EVE_SATURATION_GAIN_FACTOR: f64 = 1e2;

/// Outer relative tolerance of the entropy quadratures.
const ENTROPY_REL_TOL: f64 = 1e-7;
/// Inner relative tolerance when evaluating a smeared density.
const DENSITY_REL_TOL: f64 = 1e-9;
/// Half-width, in standard deviations, of the Gaussian windows used to
/// localize quadrature domains. exp(-13^2/2) ~ 2e-37.
const WINDOW_SIGMAS: f64 = 13.0;

/// Probability of a received symbol beta given a sent symbol alpha:
/// an isotropic Gaussian of per-quadrature variance v_out around sqrt(k) alpha.
pub fn conditional_density(
    beta: Complex64,
    alpha: Complex64,
    k: f64,
    v_out: f64,
) -> Result<f64> {
    check_channel(k, v_out)?;
    let d = beta - alpha * k.sqrt();
    Ok((-d.norm_sqr() / (2.0 * v_out)).exp() / (std::f64::consts::TAU * v_out))
}

fn check_channel(k: f64, v_out: f64) -> Result<()> {
    if !(k >= 0.0) {
        return Err(Error::Parameter(format!(
            "channel amplification k = {k} must be >= 0"
        )));
    }
    if !(v_out > 0.0) {
        return Err(Error::Parameter(format!(
            "output variance v_out = {v_out} must be > 0"
        )));
    }
    Ok(())
}

/// Mutual information of the Gaussian codebook in closed form:
/// I = ln(1 + k sigma^2 / v_out).
pub fn mutual_information_gaussian(sigma2: f64, k: f64, v_out: f64) -> Result<f64> {
    check_channel(k, v_out)?;
    if !(sigma2 >= 0.0) {
        return Err(Error::Parameter(format!(
            "codebook variance sigma2 = {sigma2} must be >= 0"
        )));
    }
    Ok((1.0 + k * sigma2 / v_out).ln())
}

/// Output ensemble density at |beta|^2 = y: the codebook pushed through the
/// channel, P(y) = integral of P_in(x) P_cond over the symbol plane. The
/// angular part collapses to a Bessel factor; the radial integral runs in
/// u = sqrt(x), where the integrand is a plain Gaussian window.
fn smeared_density(cb: &Codebook, k: f64, v: f64, y: f64) -> Result<f64> {
    if k <= 0.0 {
        // Nothing of the symbol survives: the output is the bare kernel.
        return Ok((-y / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v));
    }
    let u_cut = cb.radial_cutoff().sqrt();
    let half_width = WINDOW_SIGMAS * (v / k).sqrt();
    let center = (y / k).sqrt();
    let mut lo = (center - half_width).max(0.0);
    let mut hi = (center + half_width).min(u_cut);
    if lo >= hi {
        // beta sits past anything the codebook can reach; the integral is
        // dominated by the codebook edge.
        lo = (u_cut - 2.0 * half_width).max(0.0);
        hi = u_cut;
    }
    let norm = 1.0 / v;
    let f = |u: f64| {
        let x = u * u;
        let expo = -(y + k * x) / (2.0 * v) + ln_i0((k * x * y).sqrt() / v);
        u * cb.density_radial(x) * expo.exp()
    };
    Ok(norm * quad::integrate(&f, lo, hi, DENSITY_REL_TOL)?)
}

/// Differential entropy of the smeared codebook, -integral P ln P over the
/// output plane, by radial quadrature in w = |beta|. Split at the image of
/// the codebook edge so the quadrature never straddles a kink.
fn smeared_entropy(cb: &Codebook, k: f64, v: f64) -> Result<f64> {
    let edge = k.max(0.0).sqrt() * cb.radial_cutoff().sqrt();
    let tail = WINDOW_SIGMAS * v.sqrt();
    let w_max = edge + tail;
    let f = |w: f64| -> f64 {
        let p = match smeared_density(cb, k, v, w * w) {
            Ok(p) => p,
            Err(_) => return f64::NAN,
        };
        if p < 1e-300 {
            0.0
        } else {
            -2.0 * std::f64::consts::PI * w * p * p.ln()
        }
    };
    let split = (edge - 0.77 * tail).max(0.0);
    let mut total = 0.0;
    if split > 0.0 {
        total += quad::integrate(&f, 0.0, split, ENTROPY_REL_TOL)?;
    }
    total += quad::integrate(&f, split, w_max, ENTROPY_REL_TOL)?;
    if !total.is_finite() {
        return Err(Error::NonConvergence {
            context: "smeared entropy integrand",
            evals: 0,
            last: total,
        });
    }
    Ok(total)
}

/// Differential entropy of the isotropic Gaussian kernel of per-quadrature
/// variance v, by radial quadrature: the mean-energy integral plus ln(2 pi v).
fn kernel_entropy(v: f64) -> Result<f64> {
    let g = |y: f64| (-y / (2.0 * v)).exp() / (2.0 * v) * (y / (2.0 * v));
    let mean_term = quad::integrate(&g, 0.0, 200.0 * v, ENTROPY_REL_TOL)?;
    Ok(mean_term + (2.0 * std::f64::consts::PI * v).ln())
}

/// Information carried (in nats) by a codebook through a channel that scales
/// symbols by sqrt(k) and adds isotropic Gaussian noise v: the entropy of the
/// smeared ensemble minus the kernel entropy.
fn information_excess(cb: &Codebook, k: f64, v: f64) -> Result<f64> {
    let h_out = smeared_entropy(cb, k, v)?;
    let h_kernel = kernel_entropy(v)?;
    Ok((h_out - h_kernel).max(0.0))
}

/// Mutual information for any codebook by direct quadrature of the channel
/// integrals. The Gaussian closed form above is its oracle.
pub fn mutual_information_numeric(cb: &Codebook, k: f64, v_out: f64) -> Result<f64> {
    cb.validate()?;
    check_channel(k, v_out)?;
    information_excess(cb, k, v_out)
}

/// Output ensemble density at a point, by direct convolution quadrature.
/// Shares its machinery with the numeric information quantities; serves as
/// the independent check of [`truncated_output_density`].
pub fn output_density_convolution(
    cb: &Codebook,
    k: f64,
    v_out: f64,
    beta: Complex64,
) -> Result<f64> {
    cb.validate()?;
    check_channel(k, v_out)?;
    smeared_density(cb, k, v_out, beta.norm_sqr())
}

/// Output ensemble density for the truncated Gaussian codebook in closed
/// form: a Gaussian envelope corrected by a confluent double series,
///
///   P(beta) = exp(-|beta|^2/2(v+k s2)) / (2 pi (v+k s2)(1-e^(-N/2s2)))
///             * { 1 - exp(-zeta N - x) Phi3(1,1; x, zeta N x) },
///
/// with zeta = 1/2s2 + k/2v, xi = k/(4 zeta v^2), x = xi |beta|^2. Falls back
/// to the convolution quadrature when the series arguments would overflow.
pub fn truncated_output_density(
    beta: Complex64,
    sigma2: f64,
    n_cut: f64,
    k: f64,
    v_out: f64,
) -> Result<f64> {
    check_channel(k, v_out)?;
    let cb = Codebook::TruncatedGaussian { sigma2, n_cut };
    cb.validate()?;
    let zeta = 1.0 / (2.0 * sigma2) + k / (2.0 * v_out);
    let xi = k / (4.0 * zeta * v_out * v_out);
    let b2 = beta.norm_sqr();
    let x = xi * b2;
    let y = xi * zeta * n_cut * b2;
    if x + y > PHI3_MAX_ARG_SUM {
        return smeared_density(&cb, k, v_out, b2);
    }
    let envelope_var = v_out + k * sigma2;
    let envelope = (-b2 / (2.0 * envelope_var)).exp()
        / (2.0 * std::f64::consts::PI * envelope_var * (1.0 - (-n_cut / (2.0 * sigma2)).exp()));
    let brace = 1.0 - (-zeta * n_cut - x).exp() * humbert_phi3(x, y)?;
    Ok(envelope * brace)
}

/// Per-quadrature variance of the thermal kernel an eavesdropper cannot
/// remove from a captured feedforward symbol: (1 + cosh 2r)/4.
pub fn eve_kernel_variance(r: f64) -> f64 {
    (1.0 + (2.0 * r).cosh()) / 4.0
}

/// Eavesdropper's Holevo bound for the Gaussian codebook in closed form:
/// chi = ln(1 + 4 sigma^2 / (1 + cosh 2r)), written as the difference of the
/// smeared and bare kernel entropies.
pub fn holevo_gaussian(sigma2: f64, r: f64) -> Result<f64> {
    if !(sigma2 >= 0.0) {
        return Err(Error::Parameter(format!(
            "codebook variance sigma2 = {sigma2} must be >= 0"
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::Parameter(format!(
            "squeezing parameter r = {r} must be >= 0"
        )));
    }
    let v_eve = eve_kernel_variance(r);
    Ok(crate::gaussian::differential_entropy_gaussian(v_eve + sigma2)?
        - crate::gaussian::differential_entropy_gaussian(v_eve)?)
}

/// Holevo bound for any codebook: entropy of the codebook convolved with the
/// eavesdropper's thermal kernel, minus the kernel entropy.
pub fn holevo_numeric(cb: &Codebook, r: f64) -> Result<f64> {
    cb.validate()?;
    if !(r >= 0.0) {
        return Err(Error::Parameter(format!(
            "squeezing parameter r = {r} must be >= 0"
        )));
    }
    information_excess(cb, 1.0, eve_kernel_variance(r))
}

/// Saturation classification with explicit thresholds.
pub fn is_eve_saturated_with(
    gain: f64,
    eps_ff: f64,
    w_ff: f64,
    w_min: f64,
    gain_factor_min: f64,
) -> bool {
    w_ff > w_min && gain * eps_ff / w_ff > gain_factor_min
}

/// True when the feedforward bath is hot enough, and the amplification far
/// enough ahead of it, that the eavesdropper effectively holds a clean copy
/// of the feedforward signal.
pub fn is_eve_saturated(gain: f64, eps_ff: f64, w_ff: f64) -> bool {
    is_eve_saturated_with(gain, eps_ff, w_ff, EVE_SATURATION_W, EVE_SATURATION_GAIN_FACTOR)
}

/// How the eavesdropper's Holevo quantity is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HolevoPipeline {
    /// Classical differential entropies of the siphoned mode's symbol
    /// distribution (the default; matches the feedforward's classical role).
    DifferentialEntropy,
    /// Von Neumann entropies of the eavesdropper's two-mode Gaussian states,
    /// ensemble minus conditional. Gaussian codebooks only.
    VonNeumann,
}

/// Operating point of the security analysis.
#[derive(Debug, Clone, Copy)]
pub struct SecurityParams {
    pub squeezing_db: f64,
    pub gain: f64,
    pub eta: f64,
    pub eps_ff: f64,
    pub t_ff: f64,
    pub carrier_frequency: f64,
    pub codebook: Codebook,
}

/// Information balance at one operating point.
#[derive(Debug, Clone, Copy)]
pub struct SecurityPoint {
    /// Sender-receiver mutual information, nats.
    pub mutual_information: f64,
    /// Eavesdropper's Holevo bound, nats.
    pub holevo: f64,
    /// Teleportation fidelity at this point.
    pub fidelity: f64,
    /// Channel amplification seen by the receiver.
    pub k: f64,
    /// Receiver's per-quadrature output variance.
    pub v_out: f64,
    /// Eavesdropper's irreducible kernel variance (saturation limit).
    pub v_eve: f64,
    /// Kernel variance actually used for the eavesdropper, after the
    /// finite-gain bath contribution (never below `v_eve`).
    pub eve_kernel: f64,
    /// Feedforward bath noise factor W at this temperature.
    pub w_ff: f64,
    pub eve_saturated: bool,
    pub params: SecurityParams,
}

impl SecurityPoint {
    /// Positive when the legitimate pair out-informs the eavesdropper.
    pub fn margin(&self) -> f64 {
        self.mutual_information - self.holevo
    }
}

fn check_point_params(s_db: f64, gain: f64, eta: f64, eps_ff: f64) -> Result<()> {
    if !(s_db >= 0.0) {
        return Err(Error::Parameter(format!(
            "squeezing {s_db} dB must be >= 0"
        )));
    }
    if !(gain >= 1.0) {
        return Err(Error::Parameter(format!("gain {gain} must be >= 1")));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Parameter(format!(
            "coupler transmissivity {eta} must lie in (0, 1]"
        )));
    }
    if !(0.0..=1.0).contains(&eps_ff) {
        return Err(Error::Parameter(format!(
            "feedforward loss {eps_ff} must lie in [0, 1]"
        )));
    }
    Ok(())
}

/// Evaluate the information balance at one operating point. The displacement
/// gain is taken as given (callers wanting matched output pass the matching
/// gain); the receiver sees amplification k and variance v_out from the
/// closed-form output, the eavesdropper a thermal kernel obtained by
/// rescaling her siphoned mode by its amplification.
pub fn finite_parameter_point(
    s_db: f64,
    gain: f64,
    eta: f64,
    eps_ff: f64,
    t_ff: f64,
    carrier_frequency: f64,
    cb: &Codebook,
) -> Result<SecurityPoint> {
    finite_parameter_point_with(
        s_db,
        gain,
        eta,
        eps_ff,
        t_ff,
        carrier_frequency,
        cb,
        HolevoPipeline::DifferentialEntropy,
    )
}

pub fn finite_parameter_point_with(
    s_db: f64,
    gain: f64,
    eta: f64,
    eps_ff: f64,
    t_ff: f64,
    carrier_frequency: f64,
    cb: &Codebook,
    pipeline: HolevoPipeline,
) -> Result<SecurityPoint> {
    check_point_params(s_db, gain, eta, eps_ff)?;
    cb.validate()?;
    let r = units::squeezing_db_to_r(s_db);
    let w_ff = units::bath_noise_factor(carrier_frequency, t_ff)?;
    let out = teleport::closed_form_output(s_db, gain, eta, 0.0, eps_ff, 1.0, w_ff)?;
    let v_out = out.v_out;
    let k = out.d_scale * out.d_scale;
    let v_eve = eve_kernel_variance(r);

    let mutual_information = match *cb {
        Codebook::Gaussian { sigma2 } => mutual_information_gaussian(sigma2, k, v_out)?,
        _ => mutual_information_numeric(cb, k, v_out)?,
    };

    let g_plus = gain + 1.0 / gain + 2.0;
    let g_minus = gain + 1.0 / gain - 2.0;
    // Siphoned-mode variance over its amplification: the kernel the
    // eavesdropper is left with after rescaling. Clamped at the saturation
    // kernel so finite gain never credits her with less noise than the
    // resource state enforces.
    let eve_kernel = if eps_ff > 0.0 {
        let raw = (1.0 + g_minus / g_plus * (2.0 * r).cosh()) / 4.0
            + (1.0 - eps_ff) * w_ff / (eps_ff * g_plus);
        raw.max(v_eve)
    } else {
        f64::INFINITY
    };

    let holevo = match pipeline {
        HolevoPipeline::DifferentialEntropy => {
            if eps_ff == 0.0 {
                0.0
            } else {
                match *cb {
                    Codebook::Gaussian { sigma2 } => {
                        mutual_information_gaussian(sigma2, 1.0, eve_kernel)?
                    }
                    _ => information_excess(cb, 1.0, eve_kernel)?,
                }
            }
        }
        HolevoPipeline::VonNeumann => {
            holevo_von_neumann(s_db, gain, eta, eps_ff, w_ff, carrier_frequency, cb)?
        }
    };

    Ok(SecurityPoint {
        mutual_information,
        holevo,
        fidelity: teleport::fidelity_from_variance(v_out)?,
        k,
        v_out,
        v_eve,
        eve_kernel,
        w_ff,
        eve_saturated: is_eve_saturated(gain, eps_ff, w_ff),
        params: SecurityParams {
            squeezing_db: s_db,
            gain,
            eta,
            eps_ff,
            t_ff,
            carrier_frequency,
            codebook: *cb,
        },
    })
}

/// Holevo bound from von Neumann entropies of the eavesdropper's two-mode
/// Gaussian states: S(ensemble) - S(conditional). The ensemble state exists
/// in Gaussian form only for the Gaussian codebook.
fn holevo_von_neumann(
    s_db: f64,
    gain: f64,
    eta: f64,
    eps_ff: f64,
    w_ff: f64,
    carrier_frequency: f64,
    cb: &Codebook,
) -> Result<f64> {
    let sigma2 = match *cb {
        Codebook::Gaussian { sigma2 } => sigma2,
        _ => {
            return Err(Error::Parameter(
                "the von Neumann pipeline supports Gaussian codebooks only".into(),
            ))
        }
    };
    if eps_ff == 0.0 {
        return Ok(0.0);
    }
    let mut cfg = TeleportConfig::ideal();
    cfg.squeezing_db = s_db;
    cfg.matched_gain = false;
    cfg.gain_db = units::linear_to_db(gain)?;
    cfg.coupling_db = units::linear_to_db(eta)?;
    cfg.carrier_frequency = carrier_frequency;

    cfg.input = InputKind::Coherent {
        alpha: Complex64::new(0.0, 0.0),
    };
    let ff_cond = teleport::transfer_tap(&cfg)?;
    let (eve_cond, _) = teleport::eve_attack(&ff_cond, eps_ff, w_ff)?;
    let s_cond = von_neumann_entropy(&eve_cond)?;

    cfg.input = InputKind::Ensemble { sigma2 };
    let ff_ens = teleport::transfer_tap(&cfg)?;
    let (eve_ens, _) = teleport::eve_attack(&ff_ens, eps_ff, w_ff)?;
    let s_ens = von_neumann_entropy(&eve_ens)?;

    Ok((s_ens - s_cond).max(0.0))
}

/// Outcome of the secure-fidelity search over the feedforward temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SecureOutcome {
    /// The information balance changes sign at `t_ff`; `fidelity` is the
    /// teleportation fidelity on that boundary.
    Crossing { fidelity: f64, t_ff: f64 },
    /// Secure across the whole scanned range; `fidelity` is the value at the
    /// hot end (the worst secure point found).
    AlwaysSecure { fidelity: f64 },
    /// The eavesdropper's bound dominates everywhere in the scanned range.
    NeverSecure,
}

/// Find the feedforward temperature where the legitimate pair's information
/// advantage vanishes, and report the fidelity there. Scans a geometric
/// temperature ladder and bisects the bracketed sign change.
pub fn secure_fidelity(
    s_db: f64,
    gain: f64,
    eta: f64,
    eps_ff: f64,
    carrier_frequency: f64,
    cb: &Codebook,
) -> Result<SecureOutcome> {
    let point = |t: f64| finite_parameter_point(s_db, gain, eta, eps_ff, t, carrier_frequency, cb);

    let mut ladder = Vec::new();
    let mut t = T_BRACKET_MIN_K;
    while t <= T_BRACKET_MAX_K * (1.0 + 1e-12) {
        ladder.push((t, point(t)?.margin()));
        t *= T_BRACKET_FACTOR;
    }
    let first = ladder.first().expect("ladder is never empty");
    let bracket = ladder.windows(2).find(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0));
    let Some(bracket) = bracket else {
        return if first.1 > 0.0 {
            let hot = point(T_BRACKET_MAX_K)?;
            Ok(SecureOutcome::AlwaysSecure {
                fidelity: hot.fidelity,
            })
        } else {
            Ok(SecureOutcome::NeverSecure)
        };
    };

    // Bisect on ln T; the information margin is smooth and monotone through
    // the bracket.
    let (mut lo, mut f_lo) = (bracket[0].0.ln(), bracket[0].1);
    let mut hi = bracket[1].0.ln();
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let f_mid = point(mid.exp())?.margin();
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-6 {
            break;
        }
    }
    let t_star = (0.5 * (lo + hi)).exp();
    let at = point(t_star)?;
    Ok(SecureOutcome::Crossing {
        fidelity: at.fidelity,
        t_ff: t_star,
    })
}

/// Secure fidelity in the infinite-amplification limit: F_s = 2/(2 + cosh 2r).
/// The second value reports whether that boundary is actually reachable,
/// which requires the squeezing to clear the security onset ln(3)/4.
pub fn secure_fidelity_asymptotic(s_db: f64) -> Result<(f64, bool)> {
    if !(s_db >= 0.0) {
        return Err(Error::Parameter(format!(
            "squeezing {s_db} dB must be >= 0"
        )));
    }
    let r = units::squeezing_db_to_r(s_db);
    let fidelity = 2.0 / (2.0 + (2.0 * r).cosh());
    Ok((fidelity, r >= 3f64.ln() / 4.0 - 1e-12))
}

/// Least squeezing (dB) at which a security window opens against a saturated
/// eavesdropper, for a lossless exactly-matched link at this amplification.
/// Bob's output variance is then (1 + 2 (G-/G+) e^(-2r))/4, so the onset
/// solves 2 (G-/G+) e^(-2r) = cosh 2r; infinite gain gives r = ln(3)/4,
/// about 2.39 dB, and finite gain opens the window earlier.
pub fn minimum_secure_squeezing(gain: f64) -> Result<f64> {
    if !(gain >= 1.0) {
        return Err(Error::Parameter(format!("gain {gain} must be >= 1")));
    }
    let ratio = if gain.is_infinite() {
        1.0
    } else {
        (gain + 1.0 / gain - 2.0) / (gain + 1.0 / gain + 2.0)
    };
    let margin = |s_db: f64| {
        let r = units::squeezing_db_to_r(s_db);
        2.0 * ratio * (-2.0 * r).exp() - (2.0 * r).cosh()
    };
    if margin(0.0) <= 0.0 {
        // Secure already at zero squeezing.
        return Ok(0.0);
    }
    bisect(&margin, 0.0, 20.0, 1e-9)
}
