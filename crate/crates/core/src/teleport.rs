//! Three-mode teleportation chain: two-mode squeezed resource, Bell-type
//! measurement by strong phase-sensitive amplification, directional-coupler
//! reconstruction, and per-segment thermal loss.
//!
//! Mode layout: mode 1 holds Bob's half of the squeezed resource, mode 2
//! Alice's half, mode 3 the input state. The chain applies, in order,
//! S12, L1, B12, L2, B23, L3, G34, L4, B23, L5, L6, D, L7; loss station L_i
//! covers segments 3(i-1)+1 .. 3(i-1)+3, one per mode, so the entanglement
//! and feedforward channel losses are segments 16 and 17.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{
    apply, extract_modes, thermal_loss_noise, uhlmann_fidelity, GaussianState, SymplecticOp,
    VACUUM_VARIANCE,
};
use crate::units;

/// Number of loss segments (7 stations of 3 modes).
pub const N_SEGMENTS: usize = 21;

/// Segment index (0-based) of the entanglement distribution channel loss.
pub const SEG_ENT: usize = 15;

/// Segment index (0-based) of the feedforward channel loss.
pub const SEG_FF: usize = 16;

/// What rides in mode 3: a single coherent state or a zero-mean Gaussian
/// ensemble of them with per-quadrature displacement variance sigma^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputKind {
    Coherent { alpha: Complex64 },
    Ensemble { sigma2: f64 },
}

/// Full parameterization of the chain. Decibel fields are converted once at
/// the accessors; everything downstream is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportConfig {
    /// Resource squeezing level S in dB, both squeezers.
    pub squeezing_db: f64,
    /// Squeezer angles; the defaults (0, pi/2) squeeze orthogonal quadratures.
    pub gamma1: f64,
    pub gamma2: f64,
    /// Measurement gain G in dB, both amplifier arms. Ignored when
    /// `matched_gain` is set.
    pub gain_db: f64,
    /// When set, G is recomputed as 4 / (eta (1 - eps_ff)) on every use.
    pub matched_gain: bool,
    /// Measurement angles; `None` locks them to the squeezer angles.
    pub gamma3: Option<f64>,
    pub gamma4: Option<f64>,
    /// Directional coupler strength eta in dB (<= 0).
    pub coupling_db: f64,
    /// Per-segment power loss fractions.
    pub segment_losses: [f64; N_SEGMENTS],
    /// Per-segment bath temperatures in kelvin.
    pub bath_temps: [f64; N_SEGMENTS],
    /// Input noise photons on modes 1..3.
    pub input_noise: [f64; 3],
    /// Carrier frequency in hertz (sets bath occupations).
    pub carrier_frequency: f64,
    pub input: InputKind,
}

impl TeleportConfig {
    /// Lossless baseline: 5 GHz carrier, 10-photon input, 10 dB squeezing,
    /// -20 dB coupling, gain matched; the channel segments 16/17 are the only
    /// knobs expected to move.
    pub fn ideal() -> Self {
        Self {
            squeezing_db: 10.0,
            gamma1: 0.0,
            gamma2: std::f64::consts::FRAC_PI_2,
            gain_db: 0.0,
            matched_gain: true,
            gamma3: None,
            gamma4: None,
            coupling_db: -20.0,
            segment_losses: [0.0; N_SEGMENTS],
            bath_temps: [0.0; N_SEGMENTS],
            input_noise: [0.0; 3],
            carrier_frequency: 5e9,
            input: InputKind::Coherent {
                alpha: Complex64::new(10f64.sqrt(), 0.0),
            },
        }
    }

    /// Experimentally grounded baseline: 5.35 GHz carrier, 1.3-photon input,
    /// 5 dB squeezing, fixed eta = -15 dB and G = 21 dB (matching not
    /// enforced), 1.6 dB of loss spread uniformly over segments 1..15, all
    /// baths at 50 mK.
    pub fn realistic() -> Self {
        let per_segment = units::loss_db_to_eps(1.6 / 15.0).expect("positive attenuation");
        let mut segment_losses = [0.0; N_SEGMENTS];
        for e in segment_losses.iter_mut().take(15) {
            *e = per_segment;
        }
        Self {
            squeezing_db: 5.0,
            gamma1: 0.0,
            gamma2: std::f64::consts::FRAC_PI_2,
            gain_db: 21.0,
            matched_gain: false,
            gamma3: None,
            gamma4: None,
            coupling_db: -15.0,
            segment_losses,
            bath_temps: [0.050; N_SEGMENTS],
            input_noise: [0.0; 3],
            carrier_frequency: 5.35e9,
            input: InputKind::Coherent {
                alpha: Complex64::new(1.3f64.sqrt(), 0.0),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.squeezing_db < 0.0 {
            return Err(Error::Parameter(format!(
                "squeezing_db = {} must be >= 0",
                self.squeezing_db
            )));
        }
        if !self.matched_gain && self.gain_db < 0.0 {
            return Err(Error::Parameter(format!(
                "gain_db = {} must be >= 0 (G >= 1)",
                self.gain_db
            )));
        }
        if self.coupling_db > 0.0 {
            return Err(Error::Parameter(format!(
                "coupling_db = {} must be <= 0 (eta <= 1)",
                self.coupling_db
            )));
        }
        for (j, &e) in self.segment_losses.iter().enumerate() {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Parameter(format!(
                    "segment loss {} is {e}, outside [0, 1]",
                    j + 1
                )));
            }
        }
        for (j, &t) in self.bath_temps.iter().enumerate() {
            if t < 0.0 || !t.is_finite() {
                return Err(Error::Parameter(format!(
                    "bath temperature {} is {t} K",
                    j + 1
                )));
            }
        }
        for (i, &n) in self.input_noise.iter().enumerate() {
            if !(n >= 0.0) {
                return Err(Error::Parameter(format!(
                    "input noise photons on mode {} is {n}",
                    i + 1
                )));
            }
        }
        if !(self.carrier_frequency > 0.0) {
            return Err(Error::Parameter(format!(
                "carrier_frequency = {} Hz",
                self.carrier_frequency
            )));
        }
        if let InputKind::Ensemble { sigma2 } = self.input {
            if !(sigma2 > 0.0) {
                return Err(Error::Parameter(format!("ensemble sigma2 = {sigma2}")));
            }
        }
        Ok(())
    }

    /// Squeeze factor r from the squeezing level.
    pub fn r(&self) -> f64 {
        units::squeezing_db_to_r(self.squeezing_db)
    }

    /// Linear coupler strength eta.
    pub fn eta(&self) -> f64 {
        units::db_to_linear(self.coupling_db)
    }

    /// Linear measurement gain, recomputed from the matching condition when
    /// `matched_gain` is set.
    pub fn gain(&self) -> Result<f64> {
        if self.matched_gain {
            displacement_matching_gain(self.eta(), self.segment_losses[SEG_FF])
        } else {
            Ok(units::db_to_linear(self.gain_db))
        }
    }

    pub fn eps_ent(&self) -> f64 {
        self.segment_losses[SEG_ENT]
    }

    pub fn eps_ff(&self) -> f64 {
        self.segment_losses[SEG_FF]
    }

    /// Set the entanglement distribution channel (segment 16) loss and bath.
    pub fn with_entanglement_channel(mut self, eps: f64, temp_k: f64) -> Self {
        self.segment_losses[SEG_ENT] = eps;
        self.bath_temps[SEG_ENT] = temp_k;
        self
    }

    /// Set the feedforward channel (segment 17) loss and bath.
    pub fn with_feedforward_channel(mut self, eps: f64, temp_k: f64) -> Self {
        self.segment_losses[SEG_FF] = eps;
        self.bath_temps[SEG_FF] = temp_k;
        self
    }

    /// Mean input amplitude: the coherent amplitude, or zero for an ensemble.
    pub fn alpha(&self) -> Complex64 {
        match self.input {
            InputKind::Coherent { alpha } => alpha,
            InputKind::Ensemble { .. } => Complex64::new(0.0, 0.0),
        }
    }

    /// Noise factor W of segment j (0-based).
    pub fn noise_factor(&self, j: usize) -> Result<f64> {
        units::bath_noise_factor(self.carrier_frequency, self.bath_temps[j])
    }
}

/// One step of the chain: the operator plus the bath noise injected right
/// after it (loss steps only).
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub op: SymplecticOp,
    pub noise: Option<DMatrix<f64>>,
    pub label: &'static str,
    /// 1-based segment numbers covered by a loss station, empty otherwise.
    pub segments: std::ops::Range<usize>,
}

/// Outcome of a full chain evaluation.
#[derive(Debug, Clone)]
pub struct ChainResult {
    /// Bob's single-mode output state.
    pub bob_state: GaussianState,
    /// The feedforward signal tapped after loss station L5 (mode 2).
    pub feedforward_state: GaussianState,
    /// Overlap with the pure coherent input of the configured amplitude.
    pub fidelity: f64,
    /// Input-to-output displacement power gain k; the amplitude map is
    /// d_out = sqrt(k) d_in.
    pub displacement_gain: f64,
}

/// Gain fulfilling the displacement-matching condition G eta (1 - eps_ff) = 4.
pub fn displacement_matching_gain(eta: f64, eps_ff: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::Parameter(format!(
            "matching gain undefined for eta = {eta}"
        )));
    }
    if eps_ff >= 1.0 {
        return Err(Error::Parameter(format!(
            "matching gain undefined for eps_ff = {eps_ff}"
        )));
    }
    Ok(4.0 / (eta * (1.0 - eps_ff)))
}

/// Gain that makes the finite-G displacement map exactly the identity,
/// G_+ eta (1 - eps_ff) = 4 with G_+ = (sqrt(G) + 1/sqrt(G))^2. The plain
/// matching condition leaves a residual amplitude factor 1 + 1/G.
pub fn exact_matching_gain(eta: f64, eps_ff: f64) -> Result<f64> {
    let c = displacement_matching_gain(eta, eps_ff)?;
    if c < 4.0 {
        return Err(Error::Parameter(format!(
            "exact matching needs eta (1 - eps_ff) <= 1, got target G+ = {c}"
        )));
    }
    // G + 2 + 1/G = c, the larger root.
    let b = c - 2.0;
    Ok(0.5 * (b + (b * b - 4.0).sqrt()))
}

/// Initial three-mode state: squeezer seeds on modes 1,2 (noise photons
/// n1, n2), the input on mode 3.
pub fn build_initial(config: &TeleportConfig) -> Result<GaussianState> {
    config.validate()?;
    let [n1, n2, n3] = config.input_noise;
    let mut state = GaussianState::thermal(&[n1, n2, n3])?;
    let mut d = state.d().clone();
    let alpha = config.alpha();
    d[4] = alpha.re;
    d[5] = alpha.im;
    let mut v = state.v().clone();
    if let InputKind::Ensemble { sigma2 } = config.input {
        let var = (4.0 * sigma2 + 1.0 + 2.0 * n3) * VACUUM_VARIANCE;
        v[(4, 4)] = var;
        v[(5, 5)] = var;
    }
    state = GaussianState::new(d, v)?;
    Ok(state)
}

fn loss_station(config: &TeleportConfig, station: usize) -> Result<ChainStep> {
    let lo = 3 * (station - 1);
    let eps = &config.segment_losses[lo..lo + 3];
    let mut w = [0.0; 3];
    for (k, wk) in w.iter_mut().enumerate() {
        *wk = config.noise_factor(lo + k)?;
    }
    let op = SymplecticOp::loss(eps)?;
    let noise = thermal_loss_noise(eps, &w)?;
    let labels = ["L1", "L2", "L3", "L4", "L5", "L6", "L7"];
    Ok(ChainStep {
        op,
        noise: Some(noise),
        label: labels[station - 1],
        segments: lo + 1..lo + 4,
    })
}

fn unitary_step(op: SymplecticOp, label: &'static str) -> ChainStep {
    ChainStep {
        op,
        noise: None,
        label,
        segments: 0..0,
    }
}

/// The thirteen chain steps in application order.
pub fn build_operators(config: &TeleportConfig) -> Result<Vec<ChainStep>> {
    config.validate()?;
    let r = config.r();
    let g = config.gain()?;
    let eta = config.eta();
    let (g1, g2) = (config.gamma1, config.gamma2);
    let (g3, g4) = (config.gamma3.unwrap_or(g1), config.gamma4.unwrap_or(g2));
    let r_amp = 0.5 * g.ln();

    let squeeze = SymplecticOp::squeezer(3, &[(0, r, g1), (1, r, g2)]);
    let amplify = SymplecticOp::squeezer(3, &[(1, r_amp, g3), (2, r_amp, g4)]);
    let coupler = SymplecticOp::coupler(3, 0, 1, eta)?;

    Ok(vec![
        unitary_step(squeeze, "S12"),
        loss_station(config, 1)?,
        unitary_step(SymplecticOp::balanced_beamsplitter(3, 0, 1)?, "B12"),
        loss_station(config, 2)?,
        unitary_step(SymplecticOp::balanced_beamsplitter(3, 1, 2)?, "B23"),
        loss_station(config, 3)?,
        unitary_step(amplify, "G34"),
        loss_station(config, 4)?,
        unitary_step(SymplecticOp::balanced_beamsplitter(3, 1, 2)?, "B23"),
        loss_station(config, 5)?,
        loss_station(config, 6)?,
        unitary_step(coupler, "D"),
        loss_station(config, 7)?,
    ])
}

/// Index of the step after which the feedforward signal is tapped (L5).
const TAP_AFTER: usize = 9;

fn run_steps(config: &TeleportConfig, upto: usize) -> Result<(GaussianState, Option<GaussianState>)> {
    let steps = build_operators(config)?;
    let mut state = build_initial(config)?;
    let mut tapped = None;
    for (idx, step) in steps.iter().enumerate().take(upto) {
        state = apply(&step.op, &state, step.noise.as_ref())?;
        if !state.is_physical(crate::gaussian::PHYSICALITY_TOL) {
            return Err(Error::Unphysical(format!(
                "state unphysical after step {} (segments {:?})",
                step.label, step.segments
            )));
        }
        if idx == TAP_AFTER {
            tapped = Some(extract_modes(&state, &[1])?);
        }
    }
    Ok((state, tapped))
}

/// Displacement power gain of the full chain, read off the input-to-Bob
/// block of the composed matrix. Errors if the block is not isotropic.
fn chain_displacement_gain(steps: &[ChainStep]) -> Result<f64> {
    let mut total = DMatrix::identity(6, 6);
    for step in steps {
        total = step.op.matrix() * total;
    }
    let c00 = total[(0, 4)];
    let c11 = total[(1, 5)];
    let off = total[(0, 5)].abs().max(total[(1, 4)].abs());
    if (c00 - c11).abs() > 1e-9 || off > 1e-9 {
        return Err(Error::Unphysical(format!(
            "input-to-output displacement map is anisotropic: diag ({c00}, {c11}), off {off}"
        )));
    }
    Ok(c00 * c00)
}

/// Evaluate the full chain: Bob's state, the feedforward tap, the fidelity
/// against the configured pure coherent input, and the displacement gain.
pub fn run_chain(config: &TeleportConfig) -> Result<ChainResult> {
    let (final_state, tapped) = run_steps(config, 13)?;
    let bob_state = extract_modes(&final_state, &[0])?;
    let feedforward_state = tapped.expect("tap point lies before the end of the chain");
    let reference = GaussianState::coherent(config.alpha());
    let fidelity = uhlmann_fidelity(&bob_state, &reference)?;
    let displacement_gain = chain_displacement_gain(&build_operators(config)?)?;
    Ok(ChainResult {
        bob_state,
        feedforward_state,
        fidelity,
        displacement_gain,
    })
}

/// Run the chain through loss station L5 only and hand back the feedforward
/// signal (mode 2).
pub fn transfer_tap(config: &TeleportConfig) -> Result<GaussianState> {
    let (_, tapped) = run_steps(config, TAP_AFTER + 1)?;
    Ok(tapped.expect("tap point included in the truncated run"))
}

/// Closed-form output of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormOutput {
    /// Amplitude factor: d_out = d_scale * d_in.
    pub d_scale: f64,
    /// Per-quadrature output variance.
    pub v_out: f64,
    /// False when G < 100, where the lossy branch's large-gain assumption
    /// starts to bite.
    pub large_gain: bool,
}

/// Closed-form Bob output for the two analytically tractable regimes: exact
/// at arbitrary G when both channels are lossless, and the large-G matched
/// form otherwise. `w_ent`, `w_ff` are the channel noise factors.
pub fn closed_form_output(
    squeezing_db: f64,
    gain: f64,
    eta: f64,
    eps_ent: f64,
    eps_ff: f64,
    w_ent: f64,
    w_ff: f64,
) -> Result<ClosedFormOutput> {
    if gain < 1.0 {
        return Err(Error::Parameter(format!("gain {gain} must be >= 1")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Parameter(format!("eta {eta} outside [0, 1]")));
    }
    for (name, e) in [("eps_ent", eps_ent), ("eps_ff", eps_ff)] {
        if !(0.0..=1.0).contains(&e) {
            return Err(Error::Parameter(format!("{name} {e} outside [0, 1]")));
        }
    }
    for (name, w) in [("w_ent", w_ent), ("w_ff", w_ff)] {
        if !(w >= 1.0) {
            return Err(Error::Parameter(format!("{name} {w} must be >= 1")));
        }
    }
    let r = units::squeezing_db_to_r(squeezing_db);
    let (c, s) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let g_plus = (gain.sqrt() + 1.0 / gain.sqrt()).powi(2);
    let g_minus = (gain.sqrt() - 1.0 / gain.sqrt()).powi(2);
    let d_scale = (g_plus * eta * (1.0 - eps_ff)).sqrt() / 2.0;
    let v_out = if eps_ent == 0.0 && eps_ff == 0.0 {
        (g_plus * eta + (g_minus * eta + 4.0 * (1.0 - eta)) * c
            - 4.0 * (g_minus * eta * (1.0 - eta)).sqrt() * s)
            / 16.0
    } else {
        (1.0 + eps_ent * w_ent
            + eta * eps_ff * w_ff
            + (2.0 - eps_ent) * c
            - 2.0 * (1.0 - eps_ent).sqrt() * s)
            / 4.0
    };
    Ok(ClosedFormOutput {
        d_scale,
        v_out,
        large_gain: gain >= 100.0,
    })
}

/// Fidelity of a variance-v isotropic single-mode output against the pure
/// coherent input it is centered on: F = 2 / (1 + 4 v).
pub fn fidelity_from_variance(v_out: f64) -> Result<f64> {
    if !(v_out > 0.0) {
        return Err(Error::Parameter(format!("v_out = {v_out} must be > 0")));
    }
    Ok(2.0 / (1.0 + 4.0 * v_out))
}

/// Entangling-cloner tap on the feedforward channel: mixes the signal with
/// half of a strength-W two-mode squeezed resource on an eps_ff coupler.
/// Returns (Eve's two-mode state, the surviving feedforward mode).
pub fn eve_attack(
    feedforward: &GaussianState,
    eps_ff: f64,
    w_ff: f64,
) -> Result<(GaussianState, GaussianState)> {
    if feedforward.n_modes() != 1 {
        return Err(Error::Dimension(format!(
            "feedforward state has {} modes, expected 1",
            feedforward.n_modes()
        )));
    }
    if !(w_ff >= 1.0) {
        return Err(Error::Parameter(format!(
            "Eve's resource strength W = {w_ff} must be >= 1"
        )));
    }
    if !(0.0..=1.0).contains(&eps_ff) {
        return Err(Error::Parameter(format!("eps_ff {eps_ff} outside [0, 1]")));
    }
    // Eve's TMS pair: W/4 on the diagonal, sqrt(W^2-1)/4 sigma_z across.
    let w4 = w_ff * VACUUM_VARIANCE;
    let x4 = (w_ff * w_ff - 1.0).sqrt() * VACUUM_VARIANCE;
    let mut v = DMatrix::zeros(4, 4);
    for i in 0..4 {
        v[(i, i)] = w4;
    }
    v[(0, 2)] = x4;
    v[(2, 0)] = x4;
    v[(1, 3)] = -x4;
    v[(3, 1)] = -x4;
    let tms = GaussianState::new(nalgebra::DVector::zeros(4), v)?;
    let joint = feedforward.tensor(&tms);
    let coupler = SymplecticOp::coupler(3, 0, 1, eps_ff)?;
    let out = apply(&coupler, &joint, None)?;
    out.check_physical("eavesdropper coupling")?;
    let eve = extract_modes(&out, &[1, 2])?;
    let bob_ff = extract_modes(&out, &[0])?;
    Ok((eve, bob_ff))
}
