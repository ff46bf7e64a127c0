//! Adaptive code-matrix optimizers: stochastic-gradient updates, the
//! closed-form least-squares estimate, the RLS recursion, power
//! normalization, and the Hessian positive-semidefiniteness check.

use num_complex::Complex64;

use crate::numerics::{frobenius_norm, hermitian_eig, CMatrix};
use crate::receivers::ReceiveFilterBank;
use crate::system::{AdjustableCodeBank, ReceivedFrame, SystemConfig};
use crate::{Error, Result};

/// Joint receive-filter / code-matrix stochastic-gradient state.
#[derive(Clone, Debug)]
pub struct SgState {
    pub filters: ReceiveFilterBank,
    pub codes: AdjustableCodeBank,
    pub beta: f64,
    pub mu: f64,
}

impl SgState {
    /// Zero filters, identity code bank at the power budget.
    pub fn new(cfg: &SystemConfig, beta: f64, mu: f64) -> Self {
        SgState {
            filters: ReceiveFilterBank::zeros(cfg.n_antennas, cfg.recv_len()),
            codes: AdjustableCodeBank::identity(cfg),
            beta,
            mu,
        }
    }
}

/// Scale each relay's bank so sum_j Tr(Phi_{k,j} Phi_{k,j}^H) = P_R exactly.
pub fn normalize_codes(codes: &mut AdjustableCodeBank, p_r: f64) -> Result<()> {
    for bank in codes.mats.iter_mut() {
        let power: f64 = bank.iter().map(|m| frobenius_norm(m).powi(2)).sum();
        if power < 1e-300 {
            return Err(Error::Degenerate("all-zero code bank".into()));
        }
        let scale = (p_r / power).sqrt();
        for m in bank.iter_mut() {
            *m = m.scaled_re(scale);
        }
    }
    Ok(())
}

/// One joint SG update on a frame:
/// e_j = s_j - w_j^H r, w_j += beta e_j* r,
/// Phi_{k,j} += mu e_j s_j* w_j d_{k,j}^H (relay segment of w_j when a
/// direct link is present), followed by power normalization.
pub fn sg_step(
    state: &mut SgState,
    cfg: &SystemConfig,
    frame: &ReceivedFrame,
    s_ref: &[Complex64],
) -> Result<()> {
    if s_ref.len() != cfg.n_antennas {
        return Err(Error::Dimension("reference symbol length mismatch".into()));
    }
    let off = frame.relay_offset(cfg);
    let nt = cfg.nt();
    for j in 0..cfg.n_antennas {
        let w = &state.filters.filters[j];
        let e = s_ref[j] - w.inner(&frame.r);
        let w_new = w.add(&frame.r.scaled(state.beta * e.conj()));

        let w_relay = CMatrix::from_fn(nt, 1, |i, _| w_new[(i + off, 0)]);
        let coeff = e * s_ref[j].conj() * state.mu;
        for k in 0..cfg.n_relays {
            let grad = w_relay.outer(&frame.d_columns[k][j]);
            state.codes.mats[k][j] = state.codes.mats[k][j].add(&grad.scaled(coeff));
        }
        state.filters.filters[j] = w_new;
    }
    normalize_codes(&mut state.codes, cfg.relay_power)
}

/// Closed-form LS code matrix Phi = s^* r_e d^H (|s|^2 d d^H)^+, which for
/// the rank-1 Gram reduces to (s^* / (|s|^2 |d|^2)) r_e d^H.
pub fn ls_code_matrix(r_e: &CMatrix, d: &CMatrix, s_hat: Complex64) -> Result<CMatrix> {
    let d_norm_sq = frobenius_norm(d).powi(2);
    if s_hat.norm() == 0.0 {
        return Err(Error::Degenerate("zero symbol estimate".into()));
    }
    if d_norm_sq == 0.0 {
        return Err(Error::Degenerate("zero channel column".into()));
    }
    let scale = s_hat.conj() / (s_hat.norm_sqr() * d_norm_sq);
    Ok(r_e.outer(d).scaled(scale))
}

/// RLS recursion state for one (relay, symbol-index) stream.
#[derive(Clone, Debug)]
pub struct RlsState {
    pub p: CMatrix,
    pub z: CMatrix,
    pub phi: CMatrix,
    pub lambda: f64,
    pub delta: f64,
}

impl RlsState {
    /// P[0] = delta^-1 I, Z[0] = I, Phi[0] = Z[0] P[0] = delta^-1 I.
    pub fn new(nt: usize, lambda: f64, delta: f64) -> Self {
        RlsState {
            p: CMatrix::identity(nt).scaled_re(1.0 / delta),
            z: CMatrix::identity(nt),
            phi: CMatrix::identity(nt).scaled_re(1.0 / delta),
            lambda,
            delta,
        }
    }

    /// delta per the SNR regime: small at high SNR, large at low SNR.
    pub fn delta_for_snr(snr_db: f64) -> f64 {
        if snr_db >= 10.0 {
            0.01
        } else {
            10.0
        }
    }
}

/// One RLS update. `r_e` is the interference-cancelled observation and
/// `r_kj = d_{k,j} s_j` the regressor. Maintains Phi = Z P exactly for
/// lambda = 1 (batch equivalence).
pub fn rls_step(state: &mut RlsState, r_e: &CMatrix, r_kj: &CMatrix) {
    let il = 1.0 / state.lambda;
    let pr = state.p.mul(r_kj);
    let denom = 1.0 + il * r_kj.inner(&pr).re;
    let k = pr.scaled_re(il / denom);

    state.z = state.z.scaled_re(state.lambda).add(&r_e.outer(r_kj));
    let rhp = r_kj.hermitian().mul(&state.p);
    let innov = r_e.sub(&state.z.mul(&k)).scaled_re(il);
    state.phi = state.phi.add(&innov.mul(&rhp));
    state.p = state.p.sub(&k.mul(&rhp)).scaled_re(il);
    // symmetrize against rounding drift
    state.p = state.p.add(&state.p.hermitian()).scaled_re(0.5);
}

/// Eigenvalue check of the rank-1 Hessian |s|^2 d d^H.
pub fn hessian_psd_check(d: &CMatrix, s: Complex64) -> bool {
    let h = d.outer(d).scaled_re(s.norm_sqr());
    match hermitian_eig(&h) {
        Ok(eig) => eig.eigenvalues.iter().all(|&l| l >= -1e-10),
        Err(_) => false,
    }
}
