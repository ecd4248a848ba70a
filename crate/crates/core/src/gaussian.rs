//! Gaussian states and operations in the covariance-matrix picture.
//!
//! Conventions: quadrature ordering {p1, q1, p2, q2, ...}, vacuum variance
//! 1/4 per quadrature, coherent amplitude alpha mapped to displacement
//! d = (Re alpha, Im alpha) in the (p, q) slots of its mode. Physicality is
//! the uncertainty condition V + (i/4) Omega >= 0.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Vacuum variance per quadrature.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Tolerance below which a symplectic eigenvalue may dip under 1/4 before the
/// state is rejected as unphysical.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// A Gaussian state: displacement vector `d` (length 2n) and covariance
/// matrix `v` (2n x 2n, symmetric).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    d: DVector<f64>,
    v: DMatrix<f64>,
}

impl GaussianState {
    /// Build a state from displacement and covariance. The covariance is
    /// symmetrized; asymmetry beyond 1e-9 is rejected as a construction bug
    /// rather than silently averaged away.
    pub fn new(d: DVector<f64>, v: DMatrix<f64>) -> Result<Self> {
        let dim = d.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::Dimension(format!(
                "displacement length {dim} is not a positive even number"
            )));
        }
        if v.nrows() != dim || v.ncols() != dim {
            return Err(Error::Dimension(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                v.nrows(),
                v.ncols()
            )));
        }
        let asym = (&v - v.transpose()).abs().max();
        if asym > 1e-9 {
            return Err(Error::Parameter(format!(
                "covariance asymmetry {asym:e} exceeds 1e-9"
            )));
        }
        let sym = (&v + v.transpose()) * 0.5;
        Ok(Self {
            n_modes: dim / 2,
            d,
            v: sym,
        })
    }

    /// n-mode vacuum.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            d: DVector::zeros(2 * n_modes),
            v: DMatrix::identity(2 * n_modes, 2 * n_modes) * VACUUM_VARIANCE,
        }
    }

    /// Product of thermal modes with the given mean photon occupations;
    /// per-quadrature variance (2 n_k + 1) / 4.
    pub fn thermal(occupations: &[f64]) -> Result<Self> {
        if occupations.is_empty() {
            return Err(Error::Dimension("no modes given".into()));
        }
        for (k, &n) in occupations.iter().enumerate() {
            if !(n >= 0.0) {
                return Err(Error::Parameter(format!(
                    "occupation of mode {k} is {n}, must be >= 0"
                )));
            }
        }
        let dim = 2 * occupations.len();
        let mut v = DMatrix::zeros(dim, dim);
        for (k, &n) in occupations.iter().enumerate() {
            let var = (2.0 * n + 1.0) * VACUUM_VARIANCE;
            v[(2 * k, 2 * k)] = var;
            v[(2 * k + 1, 2 * k + 1)] = var;
        }
        Ok(Self {
            n_modes: occupations.len(),
            d: DVector::zeros(dim),
            v,
        })
    }

    /// Single-mode coherent state of amplitude alpha.
    pub fn coherent(alpha: Complex64) -> Self {
        let mut s = Self::vacuum(1);
        s.d[0] = alpha.re;
        s.d[1] = alpha.im;
        s
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn d(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Mean amplitude of one mode read back from the displacement slots.
    pub fn mean_alpha(&self, mode: usize) -> Result<Complex64> {
        if mode >= self.n_modes {
            return Err(Error::Dimension(format!(
                "mode {mode} out of range for {} modes",
                self.n_modes
            )));
        }
        Ok(Complex64::new(self.d[2 * mode], self.d[2 * mode + 1]))
    }

    /// Tensor product, `self` taking the lower mode indices.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n_modes + other.n_modes;
        let mut d = DVector::zeros(2 * n);
        d.rows_mut(0, 2 * self.n_modes).copy_from(&self.d);
        d.rows_mut(2 * self.n_modes, 2 * other.n_modes)
            .copy_from(&other.d);
        let mut v = DMatrix::zeros(2 * n, 2 * n);
        v.view_mut((0, 0), (2 * self.n_modes, 2 * self.n_modes))
            .copy_from(&self.v);
        v.view_mut(
            (2 * self.n_modes, 2 * self.n_modes),
            (2 * other.n_modes, 2 * other.n_modes),
        )
        .copy_from(&other.v);
        Self { n_modes: n, d, v }
    }

    /// True when `V + (i/4) Omega >= 0` up to `tol` relative to the matrix
    /// scale, checked through the equivalent real embedding
    /// [[V, -Omega/4], [Omega/4, V]]. The scale factor keeps the check
    /// meaningful for strongly amplified states, where eigensolver roundoff
    /// grows with the covariance norm.
    pub fn is_physical(&self, tol: f64) -> bool {
        let dim = 2 * self.n_modes;
        let omega = symplectic_form(self.n_modes);
        let mut big = DMatrix::zeros(2 * dim, 2 * dim);
        big.view_mut((0, 0), (dim, dim)).copy_from(&self.v);
        big.view_mut((dim, dim), (dim, dim)).copy_from(&self.v);
        big.view_mut((0, dim), (dim, dim)).copy_from(&(-0.25 * &omega));
        big.view_mut((dim, 0), (dim, dim)).copy_from(&(0.25 * &omega));
        let scale = big.amax().max(1.0);
        let eig = big.symmetric_eigen();
        eig.eigenvalues.iter().all(|&e| e >= -tol * scale)
    }

    /// Error unless [`is_physical`](Self::is_physical) at [`PHYSICALITY_TOL`].
    pub fn check_physical(&self, context: &str) -> Result<()> {
        if self.is_physical(PHYSICALITY_TOL) {
            Ok(())
        } else {
            Err(Error::Unphysical(format!(
                "{context}: V + i/4 Omega has a negative eigenvalue"
            )))
        }
    }
}

/// Symplectic form Omega = direct sum of [[0, -1], [1, 0]] in (p, q) ordering.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = -1.0;
        omega[(2 * k + 1, 2 * k)] = 1.0;
    }
    omega
}

/// Whether a mode map is trace-preserving-unitary (symplectic) or a
/// contraction (loss); loss matrices do not satisfy M Omega M^T = Omega and
/// must carry added noise to stay physical.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Symplectic,
    Lossy,
}

/// A linear mode transformation d -> M d, V -> M V M^T (+ optional noise).
#[derive(Debug, Clone)]
pub struct SymplecticOp {
    m: DMatrix<f64>,
    kind: OpKind,
    label: String,
}

fn rotation2(theta: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
}

impl SymplecticOp {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn kind(&self) -> OpKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            m: DMatrix::identity(2 * n_modes, 2 * n_modes),
            kind: OpKind::Symplectic,
            label: "identity".into(),
        }
    }

    /// Phase rotation of one mode by `theta`.
    pub fn rotation(n_modes: usize, mode: usize, theta: f64) -> Self {
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        m.view_mut((2 * mode, 2 * mode), (2, 2)).copy_from(&rotation2(theta));
        Self {
            m,
            kind: OpKind::Symplectic,
            label: format!("rotation(mode {mode})"),
        }
    }

    /// Phase-sensitive squeeze of selected modes: each block is
    /// R(gamma) diag(e^-r, e^r) R(gamma)^T. A phase-insensitive amplifier of
    /// power gain g is the same block with r = ln(g) / 2.
    pub fn squeezer(n_modes: usize, specs: &[(usize, f64, f64)]) -> Self {
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for &(mode, r, gamma) in specs {
            let rot = rotation2(gamma);
            let j = DMatrix::from_row_slice(2, 2, &[(-r).exp(), 0.0, 0.0, r.exp()]);
            let block = &rot * j * rot.transpose();
            m.view_mut((2 * mode, 2 * mode), (2, 2)).copy_from(&block);
        }
        Self {
            m,
            kind: OpKind::Symplectic,
            label: "squeezer".into(),
        }
    }

    /// Two-mode coupler of transmissivity split eta:
    /// out_a = sqrt(1-eta) a + sqrt(eta) b, out_b = -sqrt(eta) a + sqrt(1-eta) b.
    pub fn coupler(n_modes: usize, mode_a: usize, mode_b: usize, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Parameter(format!("coupler eta = {eta} outside [0, 1]")));
        }
        if mode_a == mode_b || mode_a >= n_modes || mode_b >= n_modes {
            return Err(Error::Dimension(format!(
                "coupler modes ({mode_a}, {mode_b}) invalid for {n_modes} modes"
            )));
        }
        let t = (1.0 - eta).sqrt();
        let r = eta.sqrt();
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for k in 0..2 {
            let a = 2 * mode_a + k;
            let b = 2 * mode_b + k;
            m[(a, a)] = t;
            m[(a, b)] = r;
            m[(b, a)] = -r;
            m[(b, b)] = t;
        }
        Ok(Self {
            m,
            kind: OpKind::Symplectic,
            label: format!("coupler(modes {mode_a},{mode_b})"),
        })
    }

    /// Balanced beam splitter, a coupler at eta = 1/2.
    pub fn balanced_beamsplitter(n_modes: usize, mode_a: usize, mode_b: usize) -> Result<Self> {
        let mut op = Self::coupler(n_modes, mode_a, mode_b, 0.5)?;
        op.label = format!("beamsplitter(modes {mode_a},{mode_b})");
        Ok(op)
    }

    /// Pure-loss contraction: each mode amplitude scaled by sqrt(1 - eps_k).
    /// Flagged non-symplectic; pair with thermal noise via
    /// [`thermal_loss_noise`] to keep states physical.
    pub fn loss(eps: &[f64]) -> Result<Self> {
        for (k, &e) in eps.iter().enumerate() {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Parameter(format!(
                    "loss fraction of mode {k} is {e}, outside [0, 1]"
                )));
            }
        }
        let dim = 2 * eps.len();
        let mut m = DMatrix::zeros(dim, dim);
        for (k, &e) in eps.iter().enumerate() {
            let amp = (1.0 - e).sqrt();
            m[(2 * k, 2 * k)] = amp;
            m[(2 * k + 1, 2 * k + 1)] = amp;
        }
        Ok(Self {
            m,
            kind: OpKind::Lossy,
            label: "loss".into(),
        })
    }

    /// M Omega M^T = Omega within `tol`.
    pub fn is_symplectic(&self, tol: f64) -> bool {
        let n = self.m.nrows() / 2;
        let omega = symplectic_form(n);
        let res = &self.m * &omega * self.m.transpose() - &omega;
        res.abs().max() <= tol
    }
}

/// Thermal noise matrix for a loss step: eps_k W_k / 4 per quadrature of each
/// mode, with W = 2 n_bath + 1 the bath noise factor.
pub fn thermal_loss_noise(eps: &[f64], w: &[f64]) -> Result<DMatrix<f64>> {
    if eps.len() != w.len() {
        return Err(Error::Dimension(format!(
            "{} loss fractions but {} noise factors",
            eps.len(),
            w.len()
        )));
    }
    for (k, &wk) in w.iter().enumerate() {
        if !(wk >= 1.0) {
            return Err(Error::Parameter(format!(
                "noise factor of mode {k} is {wk}, must be >= 1"
            )));
        }
    }
    let dim = 2 * eps.len();
    let mut n = DMatrix::zeros(dim, dim);
    for (k, (&e, &wk)) in eps.iter().zip(w.iter()).enumerate() {
        let add = e * wk * VACUUM_VARIANCE;
        n[(2 * k, 2 * k)] = add;
        n[(2 * k + 1, 2 * k + 1)] = add;
    }
    Ok(n)
}

/// Apply `op` to `state`: d -> M d, V -> M V M^T + N.
pub fn apply(op: &SymplecticOp, state: &GaussianState, noise: Option<&DMatrix<f64>>) -> Result<GaussianState> {
    let dim = 2 * state.n_modes;
    if op.m.nrows() != dim || op.m.ncols() != dim {
        return Err(Error::Dimension(format!(
            "operator {} is {}x{}, state has dimension {dim}",
            op.label,
            op.m.nrows(),
            op.m.ncols()
        )));
    }
    let d = &op.m * &state.d;
    let mut v = &op.m * &state.v * op.m.transpose();
    if let Some(n) = noise {
        if n.nrows() != dim || n.ncols() != dim {
            return Err(Error::Dimension(format!(
                "noise matrix is {}x{}, state has dimension {dim}",
                n.nrows(),
                n.ncols()
            )));
        }
        if (n - n.transpose()).abs().max() > 1e-12 {
            return Err(Error::Parameter("noise matrix is not symmetric".into()));
        }
        v += n;
    }
    GaussianState::new(d, v)
}

/// Partial trace down to `modes`, in the order given (so [1, 0] also swaps).
pub fn extract_modes(state: &GaussianState, modes: &[usize]) -> Result<GaussianState> {
    if modes.is_empty() {
        return Err(Error::Dimension("cannot extract zero modes".into()));
    }
    let mut seen = vec![false; state.n_modes];
    for &m in modes {
        if m >= state.n_modes {
            return Err(Error::Dimension(format!(
                "mode {m} out of range for {} modes",
                state.n_modes
            )));
        }
        if seen[m] {
            return Err(Error::Dimension(format!("mode {m} listed twice")));
        }
        seen[m] = true;
    }
    let k = modes.len();
    let mut d = DVector::zeros(2 * k);
    let mut v = DMatrix::zeros(2 * k, 2 * k);
    for (i, &mi) in modes.iter().enumerate() {
        for a in 0..2 {
            d[2 * i + a] = state.d[2 * mi + a];
        }
        for (j, &mj) in modes.iter().enumerate() {
            for a in 0..2 {
                for b in 0..2 {
                    v[(2 * i + a, 2 * j + b)] = state.v[(2 * mi + a, 2 * mj + b)];
                }
            }
        }
    }
    GaussianState::new(d, v)
}

/// Uhlmann fidelity of two single-mode Gaussian states,
///
/// F = exp(-(1/2) d^T (V1+V2)^-1 d) / (2 (sqrt(L + D) - sqrt(D))),
/// L = det(V1+V2), D = 16 (det V1 - 1/16)(det V2 - 1/16), d = d1 - d2.
pub fn uhlmann_fidelity(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if a.n_modes != 1 || b.n_modes != 1 {
        return Err(Error::Dimension(format!(
            "fidelity defined for single-mode states, got {} and {} modes",
            a.n_modes, b.n_modes
        )));
    }
    a.check_physical("fidelity input 1")?;
    b.check_physical("fidelity input 2")?;
    let vsum = &a.v + &b.v;
    let lambda = vsum.determinant();
    let mut delta = 16.0 * (a.v.determinant() - 0.0625) * (b.v.determinant() - 0.0625);
    if delta < 0.0 {
        if delta < -PHYSICALITY_TOL {
            return Err(Error::Unphysical(format!(
                "fidelity purity excess Delta = {delta:e} below -1e-9"
            )));
        }
        delta = 0.0;
    }
    let inv = vsum.clone().try_inverse().ok_or_else(|| {
        Error::Unphysical("V1 + V2 is singular in fidelity".into())
    })?;
    let d = &a.d - &b.d;
    let quad = (d.transpose() * inv * &d)[(0, 0)];
    let f = (-0.5 * quad).exp() / (2.0 * ((lambda + delta).sqrt() - delta.sqrt()));
    if f > 1.0 + PHYSICALITY_TOL || f < 0.0 {
        return Err(Error::Unphysical(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.min(1.0))
}

/// Symplectic eigenvalues of the covariance matrix: the n distinct moduli of
/// eig(i Omega V), each >= 1/4 for a physical state.
pub fn symplectic_eigenvalues(state: &GaussianState) -> Result<Vec<f64>> {
    let omega = symplectic_form(state.n_modes);
    let m = &omega * &state.v;
    let eig = m.complex_eigenvalues();
    let mut mods: Vec<f64> = eig.iter().map(|z| z.norm()).collect();
    mods.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out = Vec::with_capacity(state.n_modes);
    for k in 0..state.n_modes {
        let lo = mods[2 * k];
        let hi = mods[2 * k + 1];
        if hi - lo > 1e-6 * hi.max(1.0) {
            return Err(Error::Unphysical(format!(
                "symplectic spectrum does not pair up: {lo} vs {hi}"
            )));
        }
        let nu = 0.5 * (lo + hi);
        if nu < 0.25 - PHYSICALITY_TOL {
            return Err(Error::Unphysical(format!(
                "symplectic eigenvalue {nu} below vacuum floor 1/4"
            )));
        }
        out.push(nu);
    }
    Ok(out)
}

/// Bosonic entropy function g(n) = (n+1) ln(n+1) - n ln n, g(0) = 0.
fn g_entropy(n: f64) -> f64 {
    if n <= 0.0 {
        0.0
    } else {
        (n + 1.0) * (n + 1.0).ln() - n * n.ln()
    }
}

/// Von Neumann entropy in nats: sum of g((4 nu_k - 1) / 2) over the
/// symplectic spectrum. Zero for pure states.
pub fn von_neumann_entropy(state: &GaussianState) -> Result<f64> {
    let nus = symplectic_eigenvalues(state)?;
    Ok(nus
        .iter()
        .map(|&nu| g_entropy(((4.0 * nu - 1.0) / 2.0).max(0.0)))
        .sum())
}

/// Differential (Shannon) entropy ln(2 pi e v) of an isotropic two-quadrature
/// Gaussian density with per-quadrature variance v.
pub fn differential_entropy_gaussian(v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Parameter(format!(
            "differential entropy needs positive variance, got {v}"
        )));
    }
    Ok((2.0 * std::f64::consts::PI * std::f64::consts::E * v).ln())
}

/// Analytic two-mode squeezed vacuum covariance used as a test anchor:
/// (1/4) [[cosh(2r) I, sinh(2r) Z], [sinh(2r) Z, cosh(2r) I]], Z = diag(1, -1).
pub fn tms_covariance(r: f64) -> DMatrix<f64> {
    let c = (2.0 * r).cosh() * VACUUM_VARIANCE;
    let s = (2.0 * r).sinh() * VACUUM_VARIANCE;
    DMatrix::from_row_slice(
        4,
        4,
        &[
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, -s, //
            s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ln2() -> f64 {
        std::f64::consts::LN_2
    }

    #[test]
    fn vacuum_is_physical_and_pure() {
        let s = GaussianState::vacuum(3);
        assert!(s.is_physical(1e-12));
        let nus = symplectic_eigenvalues(&s).unwrap();
        for nu in nus {
            assert_relative_eq!(nu, 0.25, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(von_neumann_entropy(&s).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn thermal_entropy_matches_g() {
        let s = GaussianState::thermal(&[1.0]).unwrap();
        let nus = symplectic_eigenvalues(&s).unwrap();
        assert_relative_eq!(nus[0], 0.75, epsilon = 1e-12);
        // g(1) = 2 ln 2 - 0 = 2 ln 2.
        assert_relative_eq!(von_neumann_entropy(&s).unwrap(), 2.0 * ln2(), epsilon = 1e-12);
    }

    #[test]
    fn coherent_displacement_slots() {
        let s = GaussianState::coherent(Complex64::new(1.0, -2.0));
        assert_eq!(s.d()[0], 1.0);
        assert_eq!(s.d()[1], -2.0);
        assert_eq!(s.mean_alpha(0).unwrap(), Complex64::new(1.0, -2.0));
    }

    #[test]
    fn double_beamsplitter_swaps_and_flips() {
        // B^2 = [[0, I], [-I, 0]]: modes swap, displacement signs flip once.
        let a = GaussianState::thermal(&[0.5]).unwrap();
        let b = GaussianState::coherent(Complex64::new(2.0, 0.0));
        let joint = a.tensor(&b);
        let bs = SymplecticOp::balanced_beamsplitter(2, 0, 1).unwrap();
        let once = apply(&bs, &joint, None).unwrap();
        let twice = apply(&bs, &once, None).unwrap();
        let m0 = extract_modes(&twice, &[0]).unwrap();
        let m1 = extract_modes(&twice, &[1]).unwrap();
        assert_relative_eq!(m0.v()[(0, 0)], 0.25, epsilon = 1e-12); // coherent moved up
        assert_relative_eq!(m1.v()[(0, 0)], 0.5, epsilon = 1e-12); // thermal n=0.5 moved down
        assert_relative_eq!(m0.d()[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(m1.d()[0], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn squeezer_with_quarter_pi_rotations() {
        // gamma = pi/2 swaps which quadrature is squeezed.
        let op = SymplecticOp::squeezer(1, &[(0, 0.7, std::f64::consts::FRAC_PI_2)]);
        let s = apply(&op, &GaussianState::vacuum(1), None).unwrap();
        assert_relative_eq!(s.v()[(0, 0)], 0.25 * (1.4f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(s.v()[(1, 1)], 0.25 * (-1.4f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn tms_from_squeezers_and_beamsplitter() {
        // Two orthogonally squeezed vacua on a balanced beam splitter give the
        // standard two-mode squeezed covariance.
        let r = 0.9;
        let sq = SymplecticOp::squeezer(2, &[(0, r, 0.0), (1, r, std::f64::consts::FRAC_PI_2)]);
        let bs = SymplecticOp::balanced_beamsplitter(2, 0, 1).unwrap();
        let s = apply(&bs, &apply(&sq, &GaussianState::vacuum(2), None).unwrap(), None).unwrap();
        let want = tms_covariance(r);
        assert_abs_diff_eq!((s.v() - want).abs().max(), 0.0, epsilon = 1e-12);
        // The pair is pure.
        assert_abs_diff_eq!(von_neumann_entropy(&s).unwrap(), 0.0, epsilon = 1e-9);
        let nus = symplectic_eigenvalues(&s).unwrap();
        assert_relative_eq!(nus[0], 0.25, epsilon = 1e-9);
        assert_relative_eq!(nus[1], 0.25, epsilon = 1e-9);
    }

    #[test]
    fn full_loss_replaces_mode_with_bath() {
        let s = GaussianState::coherent(Complex64::new(3.0, 1.0));
        let loss = SymplecticOp::loss(&[1.0]).unwrap();
        let noise = thermal_loss_noise(&[1.0], &[5.0]).unwrap();
        let out = apply(&loss, &s, Some(&noise)).unwrap();
        assert_relative_eq!(out.v()[(0, 0)], 1.25, epsilon = 1e-12); // W/4 = 5/4
        assert_abs_diff_eq!(out.d()[0], 0.0, epsilon = 1e-12);
        assert!(!loss.is_symplectic(1e-9));
        assert_eq!(loss.kind(), OpKind::Lossy);
    }

    #[test]
    fn unitary_ops_are_symplectic() {
        for op in [
            SymplecticOp::rotation(2, 1, 0.3),
            SymplecticOp::squeezer(2, &[(0, 0.5, 0.2), (1, 1.1, 1.3)]),
            SymplecticOp::coupler(3, 0, 2, 0.25).unwrap(),
            SymplecticOp::balanced_beamsplitter(2, 0, 1).unwrap(),
        ] {
            assert!(op.is_symplectic(1e-12), "{} not symplectic", op.label());
        }
    }

    #[test]
    fn fidelity_identical_pure_states_is_one() {
        let s = GaussianState::coherent(Complex64::new(0.3, -1.2));
        assert_relative_eq!(uhlmann_fidelity(&s, &s).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_vacuum_thermal() {
        // F(vacuum, thermal n) = 1 / (n + 1).
        let v = GaussianState::vacuum(1);
        let t = GaussianState::thermal(&[1.0]).unwrap();
        assert_relative_eq!(uhlmann_fidelity(&v, &t).unwrap(), 0.5, epsilon = 1e-12);
        let t3 = GaussianState::thermal(&[3.0]).unwrap();
        assert_relative_eq!(uhlmann_fidelity(&v, &t3).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_displaced_vacua_is_coherent_overlap() {
        // Direct evaluation gives F = exp(-|d|^2) for two displaced vacua, the
        // squared coherent-state overlap; F = 1/2 exactly at |d|^2 = ln 2.
        let a = GaussianState::coherent(Complex64::new(ln2().sqrt(), 0.0));
        let b = GaussianState::vacuum(1);
        assert_relative_eq!(uhlmann_fidelity(&a, &b).unwrap(), 0.5, epsilon = 1e-12);
        let c = GaussianState::coherent(Complex64::new((ln2() / 2.0).sqrt(), 0.0));
        assert_relative_eq!(
            uhlmann_fidelity(&c, &b).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn fidelity_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_single_mode(&mut rng);
            let b = random_single_mode(&mut rng);
            let fab = uhlmann_fidelity(&a, &b).unwrap();
            let fba = uhlmann_fidelity(&b, &a).unwrap();
            assert_relative_eq!(fab, fba, epsilon = 1e-12);
            assert!((0.0..=1.0).contains(&fab));
        }
    }

    #[test]
    fn extract_then_embed_roundtrip() {
        let a = GaussianState::thermal(&[0.3]).unwrap();
        let b = GaussianState::coherent(Complex64::new(1.0, 1.0));
        let joint = a.tensor(&b);
        let back = extract_modes(&joint, &[0]).unwrap();
        assert_eq!(back, a);
        let swapped = extract_modes(&joint, &[1, 0]).unwrap();
        assert_eq!(extract_modes(&swapped, &[1]).unwrap(), a);
    }

    #[test]
    fn extraction_keeps_correlations() {
        let r = 0.6;
        let v = tms_covariance(r);
        let s = GaussianState::new(DVector::zeros(4), v).unwrap();
        let one = extract_modes(&s, &[1]).unwrap();
        // Marginal of a TMS half is thermal with variance cosh(2r)/4.
        assert_relative_eq!(one.v()[(0, 0)], 0.25 * (2.0 * r).cosh(), epsilon = 1e-12);
        let pair = extract_modes(&s, &[0, 1]).unwrap();
        assert_abs_diff_eq!((pair.v() - s.v()).abs().max(), 0.0, epsilon = 1e-15);
    }

    fn random_symplectic(rng: &mut ChaCha8Rng, n_modes: usize) -> SymplecticOp {
        let mut op = SymplecticOp::identity(n_modes);
        for _ in 0..4 {
            let mode = rng.gen_range(0..n_modes);
            let theta = rng.gen_range(-3.0..3.0);
            let r = rng.gen_range(-0.8..0.8);
            // Couplers need a partner mode, so single-mode draws skip them.
            let kinds = if n_modes > 1 { 3 } else { 2 };
            let step = match rng.gen_range(0..kinds) {
                0 => SymplecticOp::rotation(n_modes, mode, theta),
                1 => SymplecticOp::squeezer(n_modes, &[(mode, r, theta)]),
                _ => {
                    let other = (mode + 1 + rng.gen_range(0..n_modes - 1)) % n_modes;
                    SymplecticOp::coupler(n_modes, mode, other, rng.gen_range(0.0..1.0)).unwrap()
                }
            };
            op = SymplecticOp {
                m: step.matrix() * op.matrix(),
                kind: OpKind::Symplectic,
                label: "random".into(),
            };
        }
        op
    }

    fn random_single_mode(rng: &mut ChaCha8Rng) -> GaussianState {
        let base = GaussianState::thermal(&[rng.gen_range(0.0..2.0)]).unwrap();
        let op = random_symplectic(rng, 1);
        let mut s = apply(&op, &base, None).unwrap();
        s.d[0] = rng.gen_range(-2.0..2.0);
        s.d[1] = rng.gen_range(-2.0..2.0);
        s
    }

    #[test]
    fn symplectic_spectrum_is_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let occ: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..3.0)).collect();
            let s = GaussianState::thermal(&occ).unwrap();
            let mut want = symplectic_eigenvalues(&s).unwrap();
            let op = random_symplectic(&mut rng, 3);
            assert!(op.is_symplectic(1e-9));
            let t = apply(&op, &s, None).unwrap();
            let mut got = symplectic_eigenvalues(&t).unwrap();
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (g, w) in got.iter().zip(want.iter()) {
                assert_relative_eq!(g, w, epsilon = 1e-9, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn squeezing_preserves_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let s = random_single_mode(&mut rng);
            let det0 = s.v().determinant();
            let op = SymplecticOp::squeezer(1, &[(0, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..3.0))]);
            let t = apply(&op, &s, None).unwrap();
            assert_relative_eq!(t.v().determinant(), det0, max_relative = 1e-12);
        }
    }

    #[test]
    fn unphysical_covariance_detected() {
        // Variance below vacuum in both quadratures violates uncertainty.
        let v = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 0.1]));
        let s = GaussianState::new(DVector::zeros(2), v).unwrap();
        assert!(!s.is_physical(1e-9));
        assert!(s.check_physical("test").is_err());
        assert!(symplectic_eigenvalues(&s).is_err());
    }

    #[test]
    fn differential_entropy_values() {
        let v = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E);
        assert_abs_diff_eq!(differential_entropy_gaussian(v).unwrap(), 0.0, epsilon = 1e-12);
        let a = differential_entropy_gaussian(1.5).unwrap();
        let b = differential_entropy_gaussian(0.5).unwrap();
        assert_relative_eq!(a - b, 3.0f64.ln(), epsilon = 1e-12);
        assert!(differential_entropy_gaussian(0.0).is_err());
    }

    #[test]
    fn entropy_monotone_in_occupation() {
        let mut prev = -1.0;
        for k in 0..20 {
            let n = 0.3 * k as f64;
            let s = GaussianState::thermal(&[n]).unwrap();
            let h = von_neumann_entropy(&s).unwrap();
            assert!(h > prev);
            prev = h;
        }
    }

    #[test]
    fn dimension_errors_are_reported() {
        let s = GaussianState::vacuum(2);
        let op = SymplecticOp::identity(3);
        assert!(apply(&op, &s, None).is_err());
        assert!(extract_modes(&s, &[5]).is_err());
        assert!(extract_modes(&s, &[0, 0]).is_err());
        let bad_noise = DMatrix::zeros(2, 2);
        assert!(apply(&SymplecticOp::identity(2), &s, Some(&bad_noise)).is_err());
    }
}
