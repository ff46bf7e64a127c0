//! Linear MMSE reception, closed-form MMSE code-matrix design, and
//! exhaustive maximum-likelihood detection.

use num_complex::Complex64;

use crate::numerics::{frobenius_norm, pseudo_inverse, solve_hermitian_pd, CMatrix};
use crate::system::{AdjustableCodeBank, ChannelRealization, Constellation, ReceivedFrame, SystemConfig};
use crate::{Error, Result};

/// Ridge added to the code-matrix normal equations for invertibility.
pub const CODE_MATRIX_RIDGE: f64 = 1e-6;

/// One receive filter per symbol index.
#[derive(Clone, Debug)]
pub struct ReceiveFilterBank {
    pub filters: Vec<CMatrix>,
}

impl ReceiveFilterBank {
    /// Zero-initialized bank of `n` filters of length `len`.
    pub fn zeros(n: usize, len: usize) -> Self {
        ReceiveFilterBank {
            filters: (0..n).map(|_| CMatrix::zeros(len, 1)).collect(),
        }
    }

    /// Filter outputs w_j^H r for every j.
    pub fn apply(&self, r: &CMatrix) -> Vec<Complex64> {
        self.filters.iter().map(|w| w.inner(r)).collect()
    }
}

/// Every candidate transmit vector as columns, lexicographic by point index
/// (first symbol most significant).
#[derive(Clone, Debug)]
pub struct CandidateBook {
    pub s: CMatrix,
}

impl CandidateBook {
    pub fn enumerate(c: &Constellation, n: usize) -> Self {
        let m = c.size();
        let d = m.pow(n as u32);
        let s = CMatrix::from_fn(n, d, |row, col| {
            let idx = (col / m.pow((n - 1 - row) as u32)) % m;
            c.points[idx]
        });
        CandidateBook { s }
    }

    pub fn len(&self) -> usize {
        self.s.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn candidate(&self, col: usize) -> Vec<Complex64> {
        (0..self.s.rows()).map(|i| self.s[(i, col)]).collect()
    }
}

/// Sample auto-correlation R = mean r r^H and cross-correlation
/// p = mean r s_j* over pilot pairs.
pub fn estimate_correlations(
    pairs: &[(CMatrix, Vec<Complex64>)],
    j: usize,
) -> Result<(CMatrix, CMatrix)> {
    if pairs.is_empty() {
        return Err(Error::Empty("no pilot pairs".into()));
    }
    let len = pairs[0].0.rows();
    let mut r = CMatrix::zeros(len, len);
    let mut p = CMatrix::zeros(len, 1);
    for (obs, s) in pairs {
        if obs.rows() != len || j >= s.len() {
            return Err(Error::Dimension("pilot pair dimensions differ".into()));
        }
        r = r.add(&obs.outer(obs));
        p = p.add(&obs.scaled(s[j].conj()));
    }
    let inv = 1.0 / pairs.len() as f64;
    Ok((r.scaled_re(inv), p.scaled_re(inv)))
}

/// Wiener solution w = R^-1 p.
pub fn mmse_filter(r: &CMatrix, p: &CMatrix) -> Result<CMatrix> {
    solve_hermitian_pd(r, p)
}

/// Model-implied correlations for a fixed channel and code bank:
/// R = sum_j c_j c_j^H + noise covariance, p_j = c_j, with c_j the
/// effective column of symbol j and unit symbol power.
pub fn model_correlations(
    cfg: &SystemConfig,
    chan: &ChannelRealization,
    codes: &AdjustableCodeBank,
    frame: &ReceivedFrame,
) -> (CMatrix, Vec<CMatrix>) {
    let len = cfg.recv_len();
    let mut r = CMatrix::zeros(len, len);
    let mut cols = Vec::with_capacity(cfg.n_antennas);
    for j in 0..cfg.n_antennas {
        let c = frame.effective_column(cfg, chan, codes, j);
        r = r.add(&c.outer(&c));
        cols.push(c);
    }
    let off = frame.relay_offset(cfg);
    for i in 0..len {
        let nv = if i < off { cfg.noise_var } else { frame.noise_var_eq };
        r[(i, i)] += Complex64::new(nv, 0.0);
    }
    (r, cols)
}

/// Raw normal-equations solve Phi = (Rt + ridge*I)^-1 Pt for the
/// code-matrix design; no power normalization.
pub fn mmse_code_matrix_raw(rt: &CMatrix, pt: &CMatrix) -> Result<CMatrix> {
    if !rt.is_square() || rt.rows() != pt.rows() {
        return Err(Error::Dimension("normal equations dimension mismatch".into()));
    }
    let mut reg = rt.clone();
    for i in 0..reg.rows() {
        reg[(i, i)] += Complex64::new(CODE_MATRIX_RIDGE, 0.0);
    }
    Ok(pseudo_inverse(&reg).mul(pt))
}

/// Closed-form MMSE code matrix scaled to Frobenius power `power`.
pub fn mmse_code_matrix(rt: &CMatrix, pt: &CMatrix, power: f64) -> Result<CMatrix> {
    let phi = mmse_code_matrix_raw(rt, pt)?;
    let norm = frobenius_norm(&phi);
    if norm < 1e-300 {
        return Err(Error::Degenerate("zero code matrix".into()));
    }
    Ok(phi.scaled_re(power.sqrt() / norm))
}

/// ML metric of candidate column `col`: |r - sum_j c_j s_j|^2 given the
/// effective per-symbol columns.
fn ml_metric(r: &CMatrix, cols: &[CMatrix], book: &CandidateBook, col: usize) -> f64 {
    let mut resid = r.clone();
    for (j, c) in cols.iter().enumerate() {
        resid = resid.sub(&c.scaled(book.s[(j, col)]));
    }
    frobenius_norm(&resid).powi(2)
}

/// Exhaustive ML detection over the candidate book; ties broken by lowest
/// column index.
pub fn ml_detect(
    cfg: &SystemConfig,
    chan: &ChannelRealization,
    codes: &AdjustableCodeBank,
    frame: &ReceivedFrame,
    book: &CandidateBook,
) -> Result<(usize, Vec<Complex64>)> {
    if book.is_empty() {
        return Err(Error::Empty("empty candidate book".into()));
    }
    let cols: Vec<CMatrix> = (0..cfg.n_antennas)
        .map(|j| frame.effective_column(cfg, chan, codes, j))
        .collect();
    let mut best = 0usize;
    let mut best_metric = f64::INFINITY;
    for col in 0..book.len() {
        let m = ml_metric(&frame.r, &cols, book, col);
        if m < best_metric {
            best_metric = m;
            best = col;
        }
    }
    Ok((best, book.candidate(best)))
}
