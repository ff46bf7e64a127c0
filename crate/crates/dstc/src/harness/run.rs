use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

use super::config::{ExperimentConfig, FeedbackSchedule, Scheme};
use super::csv::{fmt_f64, CsvRecord};
use super::seed::derive_seed;
use crate::analysis::{fd_armo_select, pep_bound_adaptive, pep_bound_traditional, CodewordPair};
use crate::armo::{normalize_codes, rls_step, sg_step, RlsState, SgState};
use crate::feedback::{transmit_bank, FeedbackModel};
use crate::numerics::{determinant, frobenius_norm, hermitian_eig, solve_hermitian_pd, CMatrix};
use crate::receivers::model_correlations;
use crate::system::{
    alamouti_encode, assemble_received, combined_channel, draw_channels, generate_sphere_matrix,
    link_powers, modulate, slice, AdjustableCodeBank, ChannelRealization, Constellation,
    SystemConfig,
};
use crate::{Error, Result};

/// BER at one SNR point.
#[derive(Clone, Debug)]
pub struct BerRecord {
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits_total: u64,
    pub ber: f64,
    pub wall_seconds: f64,
}

impl CsvRecord for BerRecord {
    fn header() -> &'static str {
        "snr_db,bit_errors,bits_total,ber,wall_seconds"
    }
    fn row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_f64(self.snr_db),
            self.bit_errors,
            self.bits_total,
            fmt_f64(self.ber),
            fmt_f64(self.wall_seconds)
        )
    }
}

/// Windowed error statistics at one symbol index.
#[derive(Clone, Debug)]
pub struct ConvergenceRecord {
    pub index: usize,
    pub ber: f64,
    pub mse: f64,
}

impl CsvRecord for ConvergenceRecord {
    fn header() -> &'static str {
        "index,ber,mse"
    }
    fn row(&self) -> String {
        format!("{},{},{}", self.index, fmt_f64(self.ber), fmt_f64(self.mse))
    }
}

/// Monte Carlo pairwise error against the analytical bounds.
#[derive(Clone, Debug)]
pub struct BoundRecord {
    pub snr_db: f64,
    pub mc_pep: f64,
    pub bound_adaptive: f64,
    pub bound_traditional: f64,
}

impl CsvRecord for BoundRecord {
    fn header() -> &'static str {
        "snr_db,mc_pep,bound_adaptive,bound_traditional"
    }
    fn row(&self) -> String {
        format!(
            "{},{},{},{}",
            fmt_f64(self.snr_db),
            fmt_f64(self.mc_pep),
            fmt_f64(self.bound_adaptive),
            fmt_f64(self.bound_traditional)
        )
    }
}

/// One distributed selection trial.
#[derive(Clone, Debug)]
pub struct FdSelectionRecord {
    pub trial: usize,
    pub selected_index: usize,
    pub det_modulus: f64,
}

impl CsvRecord for FdSelectionRecord {
    fn header() -> &'static str {
        "trial,selected_index,det_modulus"
    }
    fn row(&self) -> String {
        format!(
            "{},{},{}",
            self.trial,
            self.selected_index,
            fmt_f64(self.det_modulus)
        )
    }
}

/// Minimum-distance Alamouti pair (codewords differing in one QPSK symbol);
/// the fixture behind the bound comparison and the distributed selection.
pub(crate) fn min_distance_pair() -> CodewordPair {
    let q = Constellation::qpsk();
    let c1 = alamouti_encode(&[q.points[0], q.points[0]]);
    let c2 = alamouti_encode(&[q.points[1], q.points[0]]);
    CodewordPair::new(c1, c2).expect("fixture pair")
}

/// Evaluation constant for the distributed determinant criterion.
pub(crate) fn fd_constant() -> Complex64 {
    Complex64::new(0.25, 0.25)
}

const CALIBRATION_SEED: u64 = 0x5eed_ca11_b000_0001;
const CALIBRATION_DRAWS: usize = 400;

/// Mean received SNR (linear) over the calibration channel ensemble with
/// the identity code bank at noise level `noise_var`. The signal and
/// amplified-noise powers come from the quoted Frobenius ratio; the
/// destination noise floor scales it by 1/noise_var.
fn mean_true_snr(cfg: &ExperimentConfig, noise_var: f64) -> f64 {
    let sys = cfg.system(noise_var);
    let codes = AdjustableCodeBank::identity(&sys);
    let mut rng = ChaCha8Rng::seed_from_u64(CALIBRATION_SEED);
    let mut acc = 0.0;
    for _ in 0..CALIBRATION_DRAWS {
        let chan = draw_channels(&sys, &mut rng);
        let (num, den) = link_powers(&sys, &chan, &codes);
        acc += num / (noise_var * den);
    }
    acc / CALIBRATION_DRAWS as f64
}

/// Solve for the noise variance that puts the ensemble-average received SNR
/// at `target_db` (bisection; the mean SNR is decreasing in the noise).
pub fn calibrate_noise_var(cfg: &ExperimentConfig, target_db: f64) -> f64 {
    let target = 10f64.powf(target_db / 10.0);
    let mut lo = 1e-9f64;
    let mut hi = 1e6f64;
    for _ in 0..80 {
        let mid = (lo.ln() + hi.ln()).exp() / 2.0;
        let mid = (lo * hi).sqrt().max(mid.min(f64::MAX)); // geometric midpoint
        if mean_true_snr(cfg, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

#[derive(Clone, Default)]
struct FrameOutcome {
    bit_errors: u64,
    bits_total: u64,
}

/// Per-index error accumulators for convergence traces.
#[derive(Clone)]
struct Trace {
    errs: Vec<u64>,
    bits: Vec<u64>,
    mse: Vec<f64>,
}

impl Trace {
    fn new(len: usize) -> Self {
        Trace {
            errs: vec![0; len],
            bits: vec![0; len],
            mse: vec![0.0; len],
        }
    }

    fn merge(&mut self, other: &Trace) {
        for i in 0..self.errs.len() {
            self.errs[i] += other.errs[i];
            self.bits[i] += other.bits[i];
            self.mse[i] += other.mse[i];
        }
    }
}

fn random_bits(n: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..2u8)).collect()
}

fn bit_errors(q: &Constellation, tx: &[u8], detected: &[usize]) -> u64 {
    let mut errs = 0u64;
    for (j, &idx) in detected.iter().enumerate() {
        let want = &tx[j * q.bits_per_symbol..(j + 1) * q.bits_per_symbol];
        let got = q.index_bits(idx);
        errs += want.iter().zip(&got).filter(|(a, b)| a != b).count() as u64;
    }
    errs
}

/// Analytic MMSE filter bank for a fixed channel and code bank.
fn model_filters(
    sys: &SystemConfig,
    chan: &ChannelRealization,
    codes: &AdjustableCodeBank,
    frame: &crate::system::ReceivedFrame,
) -> Result<Vec<CMatrix>> {
    let (r, cols) = model_correlations(sys, chan, codes, frame);
    cols.iter().map(|p| solve_hermitian_pd(&r, p)).collect()
}

/// Spatial multiplexing through the relay without a space-time code:
/// one slot, per-stream analytic MMSE.
fn frame_sm(cfg: &ExperimentConfig, sys: &SystemConfig, rng: &mut ChaCha8Rng) -> Result<FrameOutcome> {
    let q = Constellation::qpsk();
    let n = sys.n_antennas;
    let chan = draw_channels(sys, rng);
    let a = chan.a_rd[0][(0, 0)].re;
    let heff = chan.g_rd[0].mul(&chan.a_rd[0]).mul(&chan.f_sr[0]);
    // noise covariance sigma^2 (a^2 g g^H + I)
    // same white-noise convention as the space-time frames: variance
    // sigma^2 (1 + ||a g||_F^2) per receive dimension
    let amp = chan.g_rd[0].scaled_re(a);
    let noise_var_eq = sys.noise_var * (1.0 + frobenius_norm(&amp).powi(2));
    let mut r = heff.mul(&heff.hermitian());
    for i in 0..n {
        r[(i, i)] += Complex64::new(noise_var_eq, 0.0);
    }
    let filters: Vec<CMatrix> = (0..n)
        .map(|j| solve_hermitian_pd(&r, &heff.col(j)))
        .collect::<Result<_>>()?;

    let mut out = FrameOutcome::default();
    let sigma = (noise_var_eq / 2.0).sqrt();
    for _ in 0..cfg.frame_len {
        let bits = random_bits(n * q.bits_per_symbol, rng);
        let s = modulate(&bits, &q)?;
        let mut y = heff.mul(&CMatrix::col_vec(&s));
        for i in 0..n {
            let nd = Complex64::new(
                rng.sample::<f64, _>(rand_distr::StandardNormal),
                rng.sample::<f64, _>(rand_distr::StandardNormal),
            ) * sigma;
            y[(i, 0)] += nd;
        }
        let detected: Vec<usize> = filters.iter().map(|w| slice(w.inner(&y), &q)).collect();
        out.bit_errors += bit_errors(&q, &bits, &detected);
        out.bits_total += (n * q.bits_per_symbol) as u64;
    }
    Ok(out)
}

/// Code bank for the non-adaptive Alamouti schemes.
fn build_fixed_bank(
    cfg: &ExperimentConfig,
    sys: &SystemConfig,
    chan: &ChannelRealization,
    rng: &mut ChaCha8Rng,
) -> Result<AdjustableCodeBank> {
    match cfg.scheme {
        Scheme::DAlamouti => Ok(AdjustableCodeBank::identity(sys)),
        Scheme::RAlamouti => {
            let mut bank = AdjustableCodeBank::identity(sys);
            for k in 0..sys.n_relays {
                for j in 0..sys.n_antennas {
                    bank.mats[k][j] = generate_sphere_matrix(sys.nt(), 1.0, rng);
                }
            }
            normalize_codes(&mut bank, sys.relay_power)?;
            Ok(bank)
        }
        Scheme::FdArmo => {
            // each relay screens its candidates against the minimum
            // codeword distance carried through its local channel, D_k *
            // Delta: no feedback link, local CSI only. The lifted spectrum
            // is diagonal, so candidates are expressed in the eigenbasis
            // of the local distance Gram matrix.
            let pair = min_distance_pair();
            let radius = (sys.relay_power / sys.n_antennas as f64).sqrt();
            let mut bank = AdjustableCodeBank::identity(sys);
            for k in 0..sys.n_relays {
                let delta = combined_channel(sys, chan, k).mul(&pair.delta);
                let basis = hermitian_eig(&delta.mul(&delta.hermitian()))?.eigenvectors;
                for j in 0..sys.n_antennas {
                    let cands: Vec<CMatrix> = (0..cfg.candidates)
                        .map(|_| generate_sphere_matrix(sys.nt(), radius, rng))
                        .collect();
                    let rotated: Vec<CMatrix> = cands.iter().map(|c| c.mul(&basis)).collect();
                    let (idx, _) = fd_armo_select(&rotated, &delta, sys.noise_var, fd_constant())?;
                    bank.mats[k][j] = cands[idx].clone();
                }
            }
            normalize_codes(&mut bank, sys.relay_power)?;
            Ok(bank)
        }
        _ => Err(Error::Config("not a fixed-bank scheme".into())),
    }
}

/// Non-adaptive Alamouti transmission with an analytic MMSE receiver.
fn frame_fixed_bank(
    cfg: &ExperimentConfig,
    sys: &SystemConfig,
    rng: &mut ChaCha8Rng,
) -> Result<FrameOutcome> {
    let q = Constellation::qpsk();
    let n = sys.n_antennas;
    let chan = draw_channels(sys, rng);
    let codes = build_fixed_bank(cfg, sys, &chan, rng)?;
    let probe = assemble_received(sys, &chan, &codes, &vec![q.points[0]; n], rng)?;
    let filters = model_filters(sys, &chan, &codes, &probe)?;

    let mut out = FrameOutcome::default();
    for _ in 0..cfg.frame_len {
        let bits = random_bits(n * q.bits_per_symbol, rng);
        let s = modulate(&bits, &q)?;
        let frame = assemble_received(sys, &chan, &codes, &s, rng)?;
        let detected: Vec<usize> = filters.iter().map(|w| slice(w.inner(&frame.r), &q)).collect();
        out.bit_errors += bit_errors(&q, &bits, &detected);
        out.bits_total += (n * q.bits_per_symbol) as u64;
    }
    Ok(out)
}

/// Total predicted MMSE over the streams for a candidate bank: residual
/// sigma_s^2 - p^H R^{-1} p per stream from the model correlations.
fn predicted_mse(
    sys: &SystemConfig,
    chan: &ChannelRealization,
    codes: &AdjustableCodeBank,
    frame: &crate::system::ReceivedFrame,
) -> Result<f64> {
    let (r, cols) = model_correlations(sys, chan, codes, frame);
    let mut total = 0.0;
    for p in &cols {
        let w = solve_hermitian_pd(&r, p)?;
        total += 1.0 - p.inner(&w).re;
    }
    Ok(total)
}

/// Dense deterministic starting bank for the adaptive optimizers: phase
/// rotated scaled-Hadamard matrices. A sparse (identity-like) start sits
/// near a poor stationary structure; spreading the energy over all
/// entries is a strictly better launch point for the gradient search.
fn dense_initial_bank(sys: &SystemConfig) -> Result<AdjustableCodeBank> {
    let nt = sys.nt();
    let h = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    // phases off the axes and off 45 degrees keep every quantizer input
    // away from zero and from cell boundaries
    let phase: Vec<Complex64> = (0..4)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::PI * (1.0 / 6.0 + 0.5 * k as f64)))
        .collect();
    let mut bank = AdjustableCodeBank::identity(sys);
    for (k, row) in bank.mats.iter_mut().enumerate() {
        for (j, m) in row.iter_mut().enumerate() {
            *m = CMatrix::from_fn(nt, nt, |r, c| {
                phase[(r * (k + j) + j) % 4] * (h[r % 4][c % 4] / 2.0)
            });
        }
    }
    normalize_codes(&mut bank, sys.relay_power)?;
    Ok(bank)
}

/// Relay-side copy of the destination's bank, possibly through the
/// quantized BSC feedback path.
fn feed_back(
    codes: &AdjustableCodeBank,
    fb: &Option<FeedbackModel>,
    p_r: f64,
    rng: &mut ChaCha8Rng,
) -> Result<AdjustableCodeBank> {
    match fb {
        Some(model) => transmit_bank(codes, model, p_r, rng),
        None => Ok(codes.clone()),
    }
}

/// Adaptive stochastic-gradient frame: pilot preamble, then
/// decision-directed operation; errors counted after the preamble.
fn frame_sg(
    cfg: &ExperimentConfig,
    sys: &SystemConfig,
    rng: &mut ChaCha8Rng,
    mut trace: Option<&mut Trace>,
) -> Result<FrameOutcome> {
    let q = Constellation::qpsk();
    let n = sys.n_antennas;
    let chan = draw_channels(sys, rng);
    let fb = cfg.feedback_p.map(|p| FeedbackModel::new(p, sys.relay_power));
    let mut state = SgState::new(sys, cfg.beta, cfg.mu);
    state.codes = dense_initial_bank(sys)?;
    let mut tx = state.codes.clone();
    // warm-start the filters at the analytic MMSE solution for the initial
    // bank; the recursion then tracks the code adaptation instead of paying
    // a cold-start penalty the fixed-code baselines never pay
    let probe = assemble_received(sys, &chan, &tx, &vec![q.points[0]; n], rng)?;
    state.filters.filters = model_filters(sys, &chan, &tx, &probe)?;

    // averaged-iterate bank over the settled half of the preamble; the
    // instantaneous iterates jitter around the optimum and a single
    // snapshot would leave an error floor
    let avg_from = cfg.pilot_len / 2;
    let mut avg = AdjustableCodeBank::identity(sys);
    let mut avg_count = 0usize;
    let mut data_filters: Vec<CMatrix> = Vec::new();

    let mut out = FrameOutcome::default();
    for i in 0..cfg.frame_len {
        let bits = random_bits(n * q.bits_per_symbol, rng);
        let s = modulate(&bits, &q)?;

        if i == cfg.pilot_len {
            // settle on the averaged codes for the data section
            let mut settled = avg.clone();
            let inv = 1.0 / avg_count.max(1) as f64;
            for row in settled.mats.iter_mut() {
                for m in row.iter_mut() {
                    *m = m.scaled_re(inv);
                }
            }
            normalize_codes(&mut settled, sys.relay_power)?;
            // rare heavy-tailed frames can blow the recursion up; never
            // deploy a bank that predicts worse than the starting point
            let pilots = vec![q.points[0]; n];
            let probe_s = assemble_received(sys, &chan, &settled, &pilots, rng)?;
            let initial = dense_initial_bank(sys)?;
            let probe_i = assemble_received(sys, &chan, &initial, &pilots, rng)?;
            if predicted_mse(sys, &chan, &settled, &probe_s)?
                > predicted_mse(sys, &chan, &initial, &probe_i)?
            {
                settled = initial;
            }
            tx = feed_back(&settled, &fb, sys.relay_power, rng)?;
            let probe = assemble_received(sys, &chan, &tx, &pilots, rng)?;
            data_filters = model_filters(sys, &chan, &tx, &probe)?;
        }

        let frame = assemble_received(sys, &chan, &tx, &s, rng)?;
        let outputs: Vec<Complex64> = if i < cfg.pilot_len {
            state.filters.apply(&frame.r)
        } else {
            data_filters.iter().map(|w| w.inner(&frame.r)).collect()
        };
        let detected: Vec<usize> = outputs.iter().map(|&y| slice(y, &q)).collect();
        let errs = bit_errors(&q, &bits, &detected);
        if i >= cfg.pilot_len {
            out.bit_errors += errs;
            out.bits_total += (n * q.bits_per_symbol) as u64;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.errs[i] += errs;
            t.bits[i] += (n * q.bits_per_symbol) as u64;
            t.mse[i] += outputs
                .iter()
                .zip(&s)
                .map(|(&y, &sj)| (sj - y).norm_sqr())
                .sum::<f64>();
        }

        // train on the pilot preamble only; decision-directed updates at
        // realistic error rates poison the code gradients
        if i >= cfg.pilot_len {
            continue;
        }
        sg_step(&mut state, sys, &frame, &s)?;
        if i >= avg_from {
            if avg_count == 0 {
                avg = state.codes.clone();
            } else {
                for (arow, srow) in avg.mats.iter_mut().zip(&state.codes.mats) {
                    for (am, sm) in arow.iter_mut().zip(srow) {
                        *am = am.add(sm);
                    }
                }
            }
            avg_count += 1;
        }

        match cfg.feedback_schedule {
            FeedbackSchedule::PerIteration => {
                tx = feed_back(&state.codes, &fb, sys.relay_power, rng)?;
            }
            FeedbackSchedule::PerFrame => {}
        }
    }
    Ok(out)
}

/// Adaptive RLS frame: per-(relay, symbol) recursions on the
/// interference-cancelled observation, transmission with the normalized
/// bank, analytic MMSE detection.
fn frame_rls(
    cfg: &ExperimentConfig,
    sys: &SystemConfig,
    snr_db: f64,
    rng: &mut ChaCha8Rng,
    mut trace: Option<&mut Trace>,
) -> Result<FrameOutcome> {
    let q = Constellation::qpsk();
    let n = sys.n_antennas;
    let nt = sys.nt();
    let chan = draw_channels(sys, rng);
    let fb = cfg.feedback_p.map(|p| FeedbackModel::new(p, sys.relay_power));
    let delta = RlsState::delta_for_snr(snr_db);
    let mut states: Vec<Vec<RlsState>> = (0..sys.n_relays)
        .map(|_| (0..n).map(|_| RlsState::new(nt, cfg.lambda, delta)).collect())
        .collect();

    // Phi = Z P carries the identity initializer of Z forever in channel
    // directions the rank-1 regressors never excite; after normalization
    // that unlearned mass would swamp the estimate. Deploy (Z - lambda^i I) P
    // instead: zero where nothing was learned, the LS estimate elsewhere.
    let dest_bank = |states: &Vec<Vec<RlsState>>, steps: i32| -> Result<AdjustableCodeBank> {
        let prior = CMatrix::identity(nt).scaled_re(cfg.lambda.powi(steps));
        let mut bank = AdjustableCodeBank {
            mats: states
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|st| st.z.sub(&prior).mul(&st.p))
                        .collect()
                })
                .collect(),
        };
        let power: f64 = bank.mats.iter().flatten().map(|m| frobenius_norm(m).powi(2)).sum();
        if power < 1e-12 {
            return Ok(AdjustableCodeBank::identity(sys));
        }
        normalize_codes(&mut bank, sys.relay_power)?;
        Ok(bank)
    };

    // the relay starts from the agreed default bank; nothing has been fed
    // back yet
    let mut tx = AdjustableCodeBank::identity(sys);
    let mut out = FrameOutcome::default();
    for i in 0..cfg.frame_len {
        let bits = random_bits(n * q.bits_per_symbol, rng);
        let s = modulate(&bits, &q)?;
        let frame = assemble_received(sys, &chan, &tx, &s, rng)?;
        let filters = model_filters(sys, &chan, &tx, &frame)?;
        let outputs: Vec<Complex64> = filters.iter().map(|w| w.inner(&frame.r)).collect();
        let detected: Vec<usize> = outputs.iter().map(|&y| slice(y, &q)).collect();
        let errs = bit_errors(&q, &bits, &detected);
        if i >= cfg.pilot_len {
            out.bit_errors += errs;
            out.bits_total += (n * q.bits_per_symbol) as u64;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.errs[i] += errs;
            t.bits[i] += (n * q.bits_per_symbol) as u64;
            t.mse[i] += outputs
                .iter()
                .zip(&s)
                .map(|(&y, &sj)| (sj - y).norm_sqr())
                .sum::<f64>();
        }

        // pilot-trained only, as in the stochastic-gradient frames
        if i >= cfg.pilot_len {
            continue;
        }
        let s_ref = &s;

        // relay-part observation
        let off = frame.relay_offset(sys);
        let r_rel = CMatrix::from_fn(nt, 1, |r, _| frame.r[(r + off, 0)]);
        for k in 0..sys.n_relays {
            for j in 0..n {
                // cancel the other symbols with the current estimates
                let mut r_e = r_rel.clone();
                for jj in 0..n {
                    if jj != j {
                        r_e = r_e.sub(&tx.mats[k][jj].mul(&frame.d_columns[k][jj]).scaled(s_ref[jj]));
                    }
                }
                let r_kj = frame.d_columns[k][j].scaled(s_ref[j]);
                rls_step(&mut states[k][j], &r_e, &r_kj);
            }
        }

        match cfg.feedback_schedule {
            FeedbackSchedule::PerIteration => {
                tx = feed_back(&dest_bank(&states, i as i32 + 1)?, &fb, sys.relay_power, rng)?;
            }
            FeedbackSchedule::PerFrame => {
                if i + 1 == cfg.pilot_len {
                    tx = feed_back(&dest_bank(&states, i as i32 + 1)?, &fb, sys.relay_power, rng)?;
                }
            }
        }
    }
    Ok(out)
}

fn simulate_frame(
    cfg: &ExperimentConfig,
    sys: &SystemConfig,
    snr_db: f64,
    seed: u64,
    trace: Option<&mut Trace>,
) -> Result<FrameOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match cfg.scheme {
        Scheme::Sm => frame_sm(cfg, sys, &mut rng),
        Scheme::DAlamouti | Scheme::RAlamouti | Scheme::FdArmo => {
            frame_fixed_bank(cfg, sys, &mut rng)
        }
        Scheme::CArmoSg => frame_sg(cfg, sys, &mut rng, trace),
        Scheme::CArmoRls => frame_rls(cfg, sys, snr_db, &mut rng, trace),
    }
}

/// Monte Carlo BER sweep over the configured SNR grid. Fully determined by
/// (config, master_seed); frame-level parallelism with an order-fixed
/// reduction.
pub fn run_ber(cfg: &ExperimentConfig) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.snr_grid_db.len());
    for (si, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let start = Instant::now();
        let noise_var = calibrate_noise_var(cfg, snr_db);
        let sys = cfg.system(noise_var);
        let outcomes: Vec<Result<FrameOutcome>> = (0..cfg.frames)
            .into_par_iter()
            .map(|fi| {
                let seed = derive_seed(cfg.master_seed, &[si as u64, fi as u64]);
                simulate_frame(cfg, &sys, snr_db, seed, None)
            })
            .collect();
        let mut errors = 0u64;
        let mut bits = 0u64;
        for o in outcomes {
            let o = o?;
            errors += o.bit_errors;
            bits += o.bits_total;
        }
        records.push(BerRecord {
            snr_db,
            bit_errors: errors,
            bits_total: bits,
            ber: if bits > 0 { errors as f64 / bits as f64 } else { 0.0 },
            wall_seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(records)
}

/// Per-symbol-index convergence trace at the first SNR grid point,
/// averaged over frames and smoothed with a trailing window.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRecord>> {
    cfg.validate()?;
    if !cfg.scheme.is_adaptive() {
        return Err(Error::Config(
            "convergence traces require an adaptive scheme".into(),
        ));
    }
    let snr_db = cfg.snr_grid_db[0];
    let noise_var = calibrate_noise_var(cfg, snr_db);
    let sys = cfg.system(noise_var);
    let traces: Vec<Result<Trace>> = (0..cfg.frames)
        .into_par_iter()
        .map(|fi| {
            let seed = derive_seed(cfg.master_seed, &[0, fi as u64]);
            let mut t = Trace::new(cfg.frame_len);
            simulate_frame(cfg, &sys, snr_db, seed, Some(&mut t))?;
            Ok(t)
        })
        .collect();
    let mut total = Trace::new(cfg.frame_len);
    for t in traces {
        total.merge(&t?);
    }

    let w = cfg.window.max(1);
    let mut records = Vec::with_capacity(cfg.frame_len);
    for i in 0..cfg.frame_len {
        let lo = (i + 1).saturating_sub(w);
        let errs: u64 = total.errs[lo..=i].iter().sum();
        let bits: u64 = total.bits[lo..=i].iter().sum();
        let mse: f64 = total.mse[lo..=i].iter().sum::<f64>()
            / ((i - lo + 1) * cfg.frames * sys.n_antennas) as f64;
        records.push(ConvergenceRecord {
            index: i,
            ber: if bits > 0 { errs as f64 / bits as f64 } else { 0.0 },
            mse,
        });
    }
    Ok(records)
}

/// Deterministic sqrt(2)-scaled unitary fixture (scaled Hadamard), the
/// adaptive code matrix used in the bound comparison.
pub(crate) fn bound_fixture_phi() -> CMatrix {
    let h = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    CMatrix::from_fn(4, 4, |i, j| Complex64::new(h[i][j] / 2.0, 0.0)).scaled_re(2f64.sqrt())
}

/// Channel-averaged Monte Carlo pairwise error against the adaptive and
/// traditional bounds, per SNR point. Trials = frames * frame_len.
pub fn run_bound_comparison(cfg: &ExperimentConfig) -> Result<Vec<BoundRecord>> {
    cfg.validate()?;
    let pair = min_distance_pair();
    let phi = bound_fixture_phi();
    let lambda_phi = vec![2.0; pair.lambda_c.len()];
    let trials_per_frame = cfg.frame_len;
    let mut records = Vec::new();
    for (si, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let gamma = 10f64.powf(snr_db / 10.0);
        let n0 = 1.0 / gamma;
        let errs: u64 = (0..cfg.frames)
            .into_par_iter()
            .map(|fi| {
                let seed = derive_seed(cfg.master_seed, &[si as u64, fi as u64]);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut e = 0u64;
                for _ in 0..trials_per_frame {
                    let d = CMatrix::from_fn(4, 2, |_, _| crate::system::complex_gaussian(&mut rng));
                    let dist = frobenius_norm(&phi.mul(&d).mul(&pair.delta));
                    // binary ML decision reduces to one Gaussian threshold
                    let noise: f64 =
                        rng.sample::<f64, _>(rand_distr::StandardNormal) * (n0 / 2.0).sqrt();
                    if noise > dist / 2.0 {
                        e += 1;
                    }
                }
                e
            })
            .sum();
        let trials = (cfg.frames * trials_per_frame) as f64;
        records.push(BoundRecord {
            snr_db,
            mc_pep: errs as f64 / trials,
            bound_adaptive: pep_bound_adaptive(&lambda_phi, &pair.lambda_c, gamma, 2, 2)?,
            bound_traditional: pep_bound_traditional(&pair.lambda_c, gamma, 2, 2)?,
        });
    }
    Ok(records)
}

/// Repeated distributed selection trials: draw `candidates` sphere
/// matrices, pick the determinant maximizer, record index and modulus.
pub fn run_fd_selection(cfg: &ExperimentConfig) -> Result<Vec<FdSelectionRecord>> {
    cfg.validate()?;
    let snr_db = cfg.snr_grid_db[0];
    let noise_var = calibrate_noise_var(cfg, snr_db);
    let sys = cfg.system(noise_var);
    let radius = (sys.relay_power / sys.n_antennas as f64).sqrt();
    let scale = fd_constant() / (2.0 * (2.0 * sys.noise_var).sqrt());
    let records: Vec<Result<FdSelectionRecord>> = (0..cfg.frames)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.master_seed, &[t as u64]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let chan = draw_channels(&sys, &mut rng);
            let delta = combined_channel(&sys, &chan, 0).mul(&min_distance_pair().delta);
            let basis = hermitian_eig(&delta.mul(&delta.hermitian()))?.eigenvectors;
            let lam = crate::analysis::lifted_distance_eigs(&delta, sys.nt())?;
            let cands: Vec<CMatrix> = (0..cfg.candidates)
                .map(|_| generate_sphere_matrix(sys.nt(), radius, &mut rng))
                .collect();
            let rotated: Vec<CMatrix> = cands.iter().map(|c| c.mul(&basis)).collect();
            let (idx, best) = fd_armo_select(&rotated, &delta, sys.noise_var, fd_constant())?;
            let arg = CMatrix::identity(sys.nt())
                .add(&best.mul(&lam).mul(&best.hermitian()).scaled(scale));
            Ok(FdSelectionRecord {
                trial: t,
                selected_index: idx,
                det_modulus: determinant(&arg)?.norm(),
            })
        })
        .collect();
    records.into_iter().collect()
}
