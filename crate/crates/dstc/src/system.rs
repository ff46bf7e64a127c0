//! Physical-layer model: constellations, quasi-static Rayleigh channels,
//! relay amplification, Alamouti re-encoding with adjustable code matrices,
//! and assembly of the destination received vector.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numerics::{frobenius_norm, CMatrix};
use crate::{Error, Result};

/// Unit-energy symbol alphabet with a Gray bit mapping.
///
/// The point at index `i` is labelled by the bit pattern `i` read MSB-first,
/// so `points[0b01]` is the symbol carrying bits `01`.
#[derive(Clone, Debug)]
pub struct Constellation {
    pub points: Vec<Complex64>,
    pub bits_per_symbol: usize,
}

impl Constellation {
    /// Gray-mapped QPSK: 00 -> (1+j)/sqrt(2), 01 -> (-1+j)/sqrt(2),
    /// 11 -> (-1-j)/sqrt(2), 10 -> (1-j)/sqrt(2).
    pub fn qpsk() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        Constellation {
            points: vec![
                Complex64::new(a, a),
                Complex64::new(-a, a),
                Complex64::new(a, -a),
                Complex64::new(-a, -a),
            ],
            bits_per_symbol: 2,
        }
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    /// Bits labelling point `index`, MSB first.
    pub fn index_bits(&self, index: usize) -> Vec<u8> {
        (0..self.bits_per_symbol)
            .rev()
            .map(|b| ((index >> b) & 1) as u8)
            .collect()
    }
}

/// Map a bit sequence to symbols; `bits.len()` must be a multiple of
/// `bits_per_symbol`.
pub fn modulate(bits: &[u8], c: &Constellation) -> Result<Vec<Complex64>> {
    if bits.len() % c.bits_per_symbol != 0 {
        return Err(Error::Dimension(format!(
            "bit count {} not divisible by {}",
            bits.len(),
            c.bits_per_symbol
        )));
    }
    Ok(bits
        .chunks(c.bits_per_symbol)
        .map(|group| {
            let idx = group.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            c.points[idx]
        })
        .collect())
}

/// Hard decision: nearest constellation point, ties broken by lowest index.
pub fn slice(y: Complex64, c: &Constellation) -> usize {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (i, p) in c.points.iter().enumerate() {
        let d = (y - p).norm_sqr();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Nearest-point hard decision returning the symbol value.
pub fn slice_symbol(y: Complex64, c: &Constellation) -> Complex64 {
    c.points[slice(y, c)]
}

/// Recover the bit sequence from hard-sliced symbols.
pub fn demodulate(symbols: &[Complex64], c: &Constellation) -> Vec<u8> {
    let mut bits = Vec::with_capacity(symbols.len() * c.bits_per_symbol);
    for &y in symbols {
        bits.extend(c.index_bits(slice(y, c)));
    }
    bits
}

/// Static link parameters. `noise_var` is the per-component-pair complex
/// noise variance at every receiver; signal power is 1 by convention.
#[derive(Clone, Debug)]
pub struct SystemConfig {
    pub n_antennas: usize,
    pub n_relays: usize,
    pub n_slots: usize,
    pub noise_var: f64,
    pub relay_power: f64,
    pub direct_link: bool,
}

impl SystemConfig {
    /// N = 2 antennas, T = 2 slots, one relay, unit relay power budget.
    /// The unit budget keeps received power at O(1), which the default
    /// adaptation step sizes assume.
    pub fn alamouti(noise_var: f64, direct_link: bool) -> Self {
        SystemConfig {
            n_antennas: 2,
            n_relays: 1,
            n_slots: 2,
            noise_var,
            relay_power: 1.0,
            direct_link,
        }
    }

    pub fn nt(&self) -> usize {
        self.n_antennas * self.n_slots
    }

    /// Length of the assembled received vector.
    pub fn recv_len(&self) -> usize {
        if self.direct_link {
            self.nt() + self.n_antennas
        } else {
            self.nt()
        }
    }

    /// AF gain fixing the expected relay transmit power to `relay_power`:
    /// sqrt(P_R / (N * (1 + noise_var))).
    pub fn amp_gain(&self) -> f64 {
        (self.relay_power / (self.n_antennas as f64 * (1.0 + self.noise_var))).sqrt()
    }
}

/// One quasi-static fading block: source-destination, source-relay and
/// relay-destination matrices plus the diagonal amplification matrices.
#[derive(Clone, Debug)]
pub struct ChannelRealization {
    pub h_sd: CMatrix,
    pub f_sr: Vec<CMatrix>,
    pub g_rd: Vec<CMatrix>,
    pub a_rd: Vec<CMatrix>,
}

/// One CN(0, 1) sample.
pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn gaussian_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// Draw all channel matrices i.i.d. CN(0, 1); amplification matrices are
/// `amp_gain * I`.
pub fn draw_channels(cfg: &SystemConfig, rng: &mut impl Rng) -> ChannelRealization {
    let n = cfg.n_antennas;
    let h_sd = gaussian_matrix(n, rng);
    let f_sr: Vec<_> = (0..cfg.n_relays).map(|_| gaussian_matrix(n, rng)).collect();
    let g_rd: Vec<_> = (0..cfg.n_relays).map(|_| gaussian_matrix(n, rng)).collect();
    let a = cfg.amp_gain();
    let a_rd: Vec<_> = (0..cfg.n_relays)
        .map(|_| CMatrix::identity(n).scaled_re(a))
        .collect();
    ChannelRealization { h_sd, f_sr, g_rd, a_rd }
}

/// Scale the relay's received vector by its diagonal amplification matrix.
pub fn amplify(r_sr: &CMatrix, a: &CMatrix) -> CMatrix {
    a.mul(r_sr)
}

/// Alamouti codeword M(s) = [[s1, -s2*], [s2, s1*]]; columns are slots.
pub fn alamouti_encode(s: &[Complex64]) -> CMatrix {
    assert_eq!(s.len(), 2, "Alamouti encoder takes a length-2 vector");
    CMatrix::from_slice(2, 2, &[s[0], -s[1].conj(), s[1], s[0].conj()])
}

/// Equivalent channel for the Alamouti code over `g`: the destination
/// conjugates its slot-2 observations before stacking, which makes the
/// codeword relation linear in s. G_eq = [g; conj(g)*J], J = [[0,-1],[1,0]],
/// so that G_eq*s = [g*m1; conj(g*m2)] with m_t the slot-t codeword column.
pub fn build_equivalent_channel(g: &CMatrix) -> CMatrix {
    assert_eq!(g.rows(), 2);
    assert_eq!(g.cols(), 2);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let j = CMatrix::from_slice(2, 2, &[zero, -one, one, zero]);
    g.vstack(&g.conjugate().mul(&j))
}

/// Apply the slot-2 conjugation and stack an N x T slot-wise observation
/// into the NT x 1 vectorized form.
pub fn vectorize_slots(obs: &CMatrix) -> CMatrix {
    let n = obs.rows();
    let t = obs.cols();
    let mut v = CMatrix::zeros(n * t, 1);
    for slot in 0..t {
        for i in 0..n {
            let x = obs[(i, slot)];
            v[(slot * n + i, 0)] = if slot % 2 == 1 { x.conj() } else { x };
        }
    }
    v
}

/// Random matrix uniform on the surface of the Frobenius sphere of radius
/// `rho`: i.i.d. complex Gaussian entries renormalized to norm `rho`.
pub fn generate_sphere_matrix(dim: usize, rho: f64, rng: &mut impl Rng) -> CMatrix {
    assert!(dim >= 1 && rho > 0.0);
    loop {
        let m = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
        let norm = frobenius_norm(&m);
        if norm > 1e-30 {
            return m.scaled_re(rho / norm);
        }
    }
}

/// Adjustable code matrices, one NT x NT matrix per (relay, symbol index).
#[derive(Clone, Debug)]
pub struct AdjustableCodeBank {
    /// mats[k][j] multiplies the contribution of symbol j at relay k.
    pub mats: Vec<Vec<CMatrix>>,
}

impl AdjustableCodeBank {
    /// Identity bank scaled so each relay meets the power budget exactly:
    /// sum_j Tr(Phi_j Phi_j^H) = P_R.
    pub fn identity(cfg: &SystemConfig) -> Self {
        let nt = cfg.nt();
        let n = cfg.n_antennas;
        let scale = (cfg.relay_power / (n as f64 * nt as f64)).sqrt();
        let mats = (0..cfg.n_relays)
            .map(|_| (0..n).map(|_| CMatrix::identity(nt).scaled_re(scale)).collect())
            .collect();
        AdjustableCodeBank { mats }
    }

    /// sum_j Tr(Phi_{k,j} Phi_{k,j}^H) for relay `k`.
    pub fn relay_power(&self, k: usize) -> f64 {
        self.mats[k]
            .iter()
            .map(|m| frobenius_norm(m).powi(2))
            .sum()
    }
}

/// Received vector plus the per-symbol combined-channel columns needed by
/// the receivers and optimizers.
#[derive(Clone, Debug)]
pub struct ReceivedFrame {
    /// Direct-link part (N entries) first when present, then the relay part
    /// (NT entries, slot-2 conjugated).
    pub r: CMatrix,
    /// d_columns[k][j]: NT x 1 column j of D_k = G_eq_k * A_k * F_SR_k.
    pub d_columns: Vec<Vec<CMatrix>>,
    /// Effective white-noise variance on the relay part of `r`.
    pub noise_var_eq: f64,
}

impl ReceivedFrame {
    /// Relay-part offset within `r`.
    pub fn relay_offset(&self, cfg: &SystemConfig) -> usize {
        if cfg.direct_link {
            cfg.n_antennas
        } else {
            0
        }
    }

    /// Full-length effective column for symbol `j`: direct-link column (when
    /// present) stacked over sum_k Phi_{k,j} d_{k,j}.
    pub fn effective_column(
        &self,
        cfg: &SystemConfig,
        chan: &ChannelRealization,
        codes: &AdjustableCodeBank,
        j: usize,
    ) -> CMatrix {
        let nt = cfg.nt();
        let mut relay = CMatrix::zeros(nt, 1);
        for k in 0..cfg.n_relays {
            relay = relay.add(&codes.mats[k][j].mul(&self.d_columns[k][j]));
        }
        if cfg.direct_link {
            chan.h_sd.col(j).vstack(&relay)
        } else {
            relay
        }
    }
}

/// Combined second-hop channel D_k and its columns for relay `k`.
pub fn combined_channel(cfg: &SystemConfig, chan: &ChannelRealization, k: usize) -> CMatrix {
    let g_eq = build_equivalent_channel(&chan.g_rd[k]);
    let f_r = chan.a_rd[k].mul(&chan.f_sr[k]);
    let _ = cfg;
    g_eq.mul(&f_r)
}

/// Per-relay matrix whose column j is Phi_{k,j} applied to column j of
/// G_eq_k * A_k; its Frobenius norm fixes the amplified-noise power.
fn noise_shaping(cfg: &SystemConfig, chan: &ChannelRealization, codes: &AdjustableCodeBank, k: usize) -> CMatrix {
    let ga = build_equivalent_channel(&chan.g_rd[k]).mul(&chan.a_rd[k]);
    let mut m = CMatrix::zeros(cfg.nt(), cfg.n_antennas);
    for j in 0..cfg.n_antennas {
        m.set_col(j, &codes.mats[k][j].mul(&ga.col(j)));
    }
    m
}

/// Signal and noise Frobenius powers of the relay link:
/// (|sum_k Phi_k D_k|_F^2, 1 + |sum_k M_k|_F^2) with M_k the amplified-noise
/// shaping matrix.
pub fn link_powers(
    cfg: &SystemConfig,
    chan: &ChannelRealization,
    codes: &AdjustableCodeBank,
) -> (f64, f64) {
    let nt = cfg.nt();
    let n = cfg.n_antennas;
    let mut sig = CMatrix::zeros(nt, n);
    let mut noi = CMatrix::zeros(nt, n);
    for k in 0..cfg.n_relays {
        let d = combined_channel(cfg, chan, k);
        let mut phid = CMatrix::zeros(nt, n);
        for j in 0..n {
            phid.set_col(j, &codes.mats[k][j].mul(&d.col(j)));
        }
        sig = sig.add(&phid);
        noi = noi.add(&noise_shaping(cfg, chan, codes, k));
    }
    (
        frobenius_norm(&sig).powi(2),
        1.0 + frobenius_norm(&noi).powi(2),
    )
}

/// Effective white-noise variance at the destination relay part:
/// noise_var * (1 + |sum_k M_k|_F^2).
pub fn effective_noise_var(
    cfg: &SystemConfig,
    chan: &ChannelRealization,
    codes: &AdjustableCodeBank,
) -> f64 {
    let (_, den) = link_powers(cfg, chan, codes);
    cfg.noise_var * den
}

/// Assemble the destination observation for one symbol vector:
/// r = sum_k sum_j Phi_{k,j} d_{k,j} s_j + n, with the direct-link part
/// H_SD s + n_SD prepended when configured.
pub fn assemble_received(
    cfg: &SystemConfig,
    chan: &ChannelRealization,
    codes: &AdjustableCodeBank,
    s: &[Complex64],
    rng: &mut impl Rng,
) -> Result<ReceivedFrame> {
    let n = cfg.n_antennas;
    let nt = cfg.nt();
    if s.len() != n {
        return Err(Error::Dimension(format!(
            "symbol vector length {} != {}",
            s.len(),
            n
        )));
    }
    if codes.mats.len() != cfg.n_relays {
        return Err(Error::Dimension("code bank relay count mismatch".into()));
    }

    let mut d_columns = Vec::with_capacity(cfg.n_relays);
    let mut relay = CMatrix::zeros(nt, 1);
    for k in 0..cfg.n_relays {
        let d = combined_channel(cfg, chan, k);
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let dj = d.col(j);
            relay = relay.add(&codes.mats[k][j].mul(&dj).scaled(s[j]));
            cols.push(dj);
        }
        d_columns.push(cols);
    }

    let noise_var_eq = effective_noise_var(cfg, chan, codes);
    if cfg.noise_var > 0.0 {
        let sigma = (noise_var_eq / 2.0).sqrt();
        for i in 0..nt {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            relay[(i, 0)] += Complex64::new(sigma * re, sigma * im);
        }
    }

    let r = if cfg.direct_link {
        let mut direct = chan.h_sd.mul(&CMatrix::col_vec(s));
        if cfg.noise_var > 0.0 {
            let sigma = (cfg.noise_var / 2.0).sqrt();
            for i in 0..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                direct[(i, 0)] += Complex64::new(sigma * re, sigma * im);
            }
        }
        direct.vstack(&relay)
    } else {
        relay
    };

    Ok(ReceivedFrame { r, d_columns, noise_var_eq })
}

/// Received SNR in dB per the ratio
/// |sum_k Phi_k D_k|_F^2 / (1 + |sum_k Phi_k G_eq_k A_k|_F^2);
/// zero numerator reports negative infinity.
pub fn received_snr(cfg: &SystemConfig, chan: &ChannelRealization, codes: &AdjustableCodeBank) -> f64 {
    let (num, den) = link_powers(cfg, chan, codes);
    if num == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (num / den).log10()
    }
}
