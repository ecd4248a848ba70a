//! Entangling-cloner fidelities and no-cloning thresholds.
//!
//! The attacker clones a code state with an amplification A >= 1; the clone
//! fidelity decays in |alpha|^2 unless A = 2. Maximizing the codebook-averaged
//! clone fidelity over A gives the threshold a receiver must beat to be sure
//! no better copy exists elsewhere.

use num_complex::Complex64;

use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::optim::golden_section_max;

/// Upper end of the amplification search window. Past this the 2/(1+A)
/// prefactor has already crushed the objective.
pub const A_MAX_DEFAULT: f64 = 50.0;

/// Points in the coarse bracketing scan over A.
const SCAN_POINTS: usize = 200;

/// Threshold search result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClonerResult {
    /// The no-cloning threshold: best average clone fidelity.
    pub f_nc: f64,
    /// The amplification achieving it.
    pub a_opt: f64,
    pub codebook: Codebook,
}

/// Clone fidelity for one code state:
/// F = 2/(1+A) exp[-2 (1 - sqrt(A/2))^2 |alpha|^2 / (1+A)].
pub fn cloner_fidelity(alpha: Complex64, a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(Error::Parameter(format!(
            "cloner amplification A = {a} must be >= 1"
        )));
    }
    Ok(cloner_fidelity_radial(alpha.norm_sqr(), a))
}

/// Same, as a function of x = |alpha|^2.
pub fn cloner_fidelity_radial(x: f64, a: f64) -> f64 {
    let u = (a / 2.0).sqrt();
    let coeff = 2.0 * (1.0 - u) * (1.0 - u) / (1.0 + a);
    2.0 / (1.0 + a) * (-coeff * x).exp()
}

/// Codebook-averaged clone fidelity at fixed amplification.
pub fn average_cloner_fidelity(cb: &Codebook, a: f64) -> Result<f64> {
    if !(a >= 1.0) {
        return Err(Error::Parameter(format!(
            "cloner amplification A = {a} must be >= 1"
        )));
    }
    // The clone fidelity decays like exp(-coeff x); telling the average so
    // keeps the quadrature window commensurate with the integrand even for
    // very wide codebooks.
    let u = (a / 2.0).sqrt();
    let coeff = 2.0 * (1.0 - u) * (1.0 - u) / (1.0 + a);
    cb.average_isotropic_damped(coeff, |x| cloner_fidelity_radial(x, a))
}

/// Optimal average cloning fidelity for a Gaussian codebook, in closed form:
///
///   (4 s2 + 2) / (6 s2 + 1)        for s2 >= 1/2 + 1/sqrt(2),
///   1 / ((3 - 2 sqrt 2) s2 + 1)    otherwise.
///
/// The branch point is where the unconstrained optimum hits the A >= 1 wall.
pub fn gaussian_threshold_closed_form(sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::Parameter(format!(
            "codebook variance sigma2 = {sigma2} must be > 0"
        )));
    }
    let breakpoint = 0.5 + std::f64::consts::FRAC_1_SQRT_2;
    if sigma2 >= breakpoint {
        Ok((4.0 * sigma2 + 2.0) / (6.0 * sigma2 + 1.0))
    } else {
        Ok(1.0 / ((3.0 - 2.0 * std::f64::consts::SQRT_2) * sigma2 + 1.0))
    }
}

/// No-cloning threshold for any codebook: coarse log-spaced scan over
/// A in [1, a_max], then golden-section refinement around the best bracket.
pub fn threshold_with_amax(cb: &Codebook, a_max: f64) -> Result<ClonerResult> {
    cb.validate()?;
    if !(a_max > 1.0) {
        return Err(Error::Parameter(format!(
            "search window a_max = {a_max} must exceed 1"
        )));
    }
    let objective = |a: f64| -> Result<f64> { average_cloner_fidelity(cb, a) };
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut grid = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        let t = i as f64 / (SCAN_POINTS - 1) as f64;
        let a = (t * a_max.ln()).exp();
        let f = objective(a)?;
        if f > best.1 {
            best = (i, f);
        }
        grid.push((a, f));
    }
    let lo = grid[best.0.saturating_sub(1)].0;
    let hi = grid[(best.0 + 1).min(SCAN_POINTS - 1)].0;
    // The averages inside golden section are deterministic, so any quadrature
    // failure surfaces on the scan above first; unwrapping here keeps the
    // closure signature plain.
    let (a_opt, f_ref) = golden_section_max(
        &|a: f64| average_cloner_fidelity(cb, a).unwrap_or(f64::NEG_INFINITY),
        lo,
        hi,
        1e-8,
    )?;
    // If refinement somehow lost to the scan (multimodal surprise), keep the
    // scan's answer.
    let (f_nc, a_opt) = if f_ref >= best.1 {
        (f_ref, a_opt)
    } else {
        (best.1, grid[best.0].0)
    };
    Ok(ClonerResult {
        f_nc,
        a_opt,
        codebook: *cb,
    })
}

/// [`threshold_with_amax`] with the default window.
pub fn threshold(cb: &Codebook) -> Result<ClonerResult> {
    threshold_with_amax(cb, A_MAX_DEFAULT)
}
