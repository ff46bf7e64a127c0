//! Destination-to-relay feedback path: per-component uniform quantization
//! of code matrices and a binary symmetric channel.
//!
//! Bit layout is normative: matrix entries row-major, real part before
//! imaginary part, most-significant bit first within each component.

use num_complex::Complex64;
use rand::Rng;

use crate::armo::normalize_codes;
use crate::numerics::CMatrix;
use crate::system::AdjustableCodeBank;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct FeedbackModel {
    pub bits_per_component: u32,
    pub crossover_prob: f64,
    pub clip_range: f64,
}

impl FeedbackModel {
    /// 4-bit midrise quantizer clipped to [-sqrt(P_R), sqrt(P_R)]; no
    /// single component of a power-constrained bank can exceed that range.
    pub fn new(crossover_prob: f64, relay_power: f64) -> Self {
        FeedbackModel {
            bits_per_component: 4,
            crossover_prob,
            clip_range: relay_power.sqrt(),
        }
    }

    fn levels(&self) -> u32 {
        1 << self.bits_per_component
    }

    fn step(&self) -> f64 {
        2.0 * self.clip_range / self.levels() as f64
    }

    /// Midrise cell index of one real component; an input exactly on a cell
    /// boundary takes the lower cell.
    fn cell(&self, v: f64) -> u32 {
        let clipped = v.clamp(-self.clip_range, self.clip_range);
        let raw = ((clipped + self.clip_range) / self.step()).ceil() - 1.0;
        (raw.max(0.0) as u32).min(self.levels() - 1)
    }

    /// Midpoint of cell `idx`.
    fn midpoint(&self, idx: u32) -> f64 {
        -self.clip_range + (idx as f64 + 0.5) * self.step()
    }
}

fn push_bits(out: &mut Vec<u8>, idx: u32, b: u32) {
    for shift in (0..b).rev() {
        out.push(((idx >> shift) & 1) as u8);
    }
}

/// Quantize every component of `m` to `2 * b * rows * cols` bits.
pub fn quantize(m: &CMatrix, fb: &FeedbackModel) -> Vec<u8> {
    let b = fb.bits_per_component;
    let mut bits = Vec::with_capacity(2 * b as usize * m.rows() * m.cols());
    for &e in m.entries() {
        push_bits(&mut bits, fb.cell(e.re), b);
        push_bits(&mut bits, fb.cell(e.im), b);
    }
    bits
}

/// Flip each bit independently with probability `p`.
pub fn bsc_transmit(bits: &[u8], p: f64, rng: &mut impl Rng) -> Vec<u8> {
    bits.iter()
        .map(|&b| if rng.gen::<f64>() < p { b ^ 1 } else { b })
        .collect()
}

/// Reconstruct a rows x cols matrix of cell midpoints.
pub fn dequantize(bits: &[u8], fb: &FeedbackModel, rows: usize, cols: usize) -> Result<CMatrix> {
    let b = fb.bits_per_component as usize;
    if bits.len() != 2 * b * rows * cols {
        return Err(Error::Dimension(format!(
            "bit sequence length {} != {}",
            bits.len(),
            2 * b * rows * cols
        )));
    }
    let take = |offset: usize| -> u32 {
        bits[offset..offset + b]
            .iter()
            .fold(0u32, |acc, &bit| (acc << 1) | bit as u32)
    };
    let mut entries = Vec::with_capacity(rows * cols);
    for i in 0..rows * cols {
        let re = fb.midpoint(take(2 * b * i));
        let im = fb.midpoint(take(2 * b * i + b));
        entries.push(Complex64::new(re, im));
    }
    Ok(CMatrix::from_slice(rows, cols, &entries))
}

/// Send a full code bank over the feedback path: quantize, pass through the
/// BSC, dequantize, then renormalize the reconstructed bank to `p_r` so the
/// relay never violates its power budget.
pub fn transmit_bank(
    codes: &AdjustableCodeBank,
    fb: &FeedbackModel,
    p_r: f64,
    rng: &mut impl Rng,
) -> Result<AdjustableCodeBank> {
    let mut out = codes.clone();
    for bank in out.mats.iter_mut() {
        for m in bank.iter_mut() {
            let bits = quantize(m, fb);
            let recv = bsc_transmit(&bits, fb.crossover_prob, rng);
            *m = dequantize(&recv, fb, m.rows(), m.cols())?;
        }
    }
    normalize_codes(&mut out, p_r)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{complex_gaussian, SystemConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn payload_size_and_layout() {
        let fb = FeedbackModel::new(0.0, 1.0);
        let m = CMatrix::from_slice(1, 1, &[Complex64::new(0.99, -0.99)]);
        let bits = quantize(&m, &fb);
        assert_eq!(bits.len(), 8);
        // real part near +clip -> top cell 15 = 1111; imag near -clip -> 0000
        assert_eq!(&bits[..4], &[1, 1, 1, 1]);
        assert_eq!(&bits[4..], &[0, 0, 0, 0]);
    }

    #[test]
    fn zero_component_takes_lower_cell() {
        let fb = FeedbackModel::new(0.0, 1.0);
        // 0 sits exactly on the boundary between cells 7 and 8
        assert_eq!(fb.cell(0.0), 7);
        assert!((fb.midpoint(7) + fb.step() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn round_trip_error_bounded_by_half_step() {
        let fb = FeedbackModel {
            bits_per_component: 4,
            crossover_prob: 0.0,
            clip_range: 2.0,
        };
        let half = fb.step() / 2.0;
        // dense scan across the full range, including cell boundaries
        let n = 4001;
        for i in 0..n {
            let v = -2.0 + 4.0 * i as f64 / (n - 1) as f64;
            let m = CMatrix::from_slice(1, 1, &[Complex64::new(v, -v)]);
            let bits = quantize(&m, &fb);
            let back = dequantize(&bits, &fb, 1, 1).unwrap();
            assert!((back[(0, 0)].re - v).abs() <= half + 1e-12, "v = {v}");
            assert!((back[(0, 0)].im + v).abs() <= half + 1e-12, "v = {v}");
        }
    }

    #[test]
    fn bsc_identity_and_flip_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let bits: Vec<u8> = (0..1_000_000).map(|_| rng.gen_range(0..2u8)).collect();
        assert_eq!(bsc_transmit(&bits, 0.0, &mut rng), bits);

        let flipped = bsc_transmit(&bits, 0.5, &mut rng);
        let rate = bits
            .iter()
            .zip(&flipped)
            .filter(|(a, b)| a != b)
            .count() as f64
            / bits.len() as f64;
        assert!((rate - 0.5).abs() < 0.002, "rate = {rate}");

        let flipped = bsc_transmit(&bits, 1e-3, &mut rng);
        let rate = bits
            .iter()
            .zip(&flipped)
            .filter(|(a, b)| a != b)
            .count() as f64
            / bits.len() as f64;
        assert!((rate - 1e-3).abs() < 3e-4, "rate = {rate}");
    }

    #[test]
    fn all_zero_bits_give_lowest_midpoint() {
        let fb = FeedbackModel::new(0.0, 1.0);
        let m = dequantize(&vec![0u8; 8], &fb, 1, 1).unwrap();
        let lowest = -1.0 + fb.step() / 2.0;
        assert!((m[(0, 0)].re - lowest).abs() < 1e-15);
        assert!((m[(0, 0)].im - lowest).abs() < 1e-15);
    }

    #[test]
    fn dequantize_rejects_bad_length() {
        let fb = FeedbackModel::new(0.0, 1.0);
        assert!(dequantize(&[0u8; 15], &fb, 1, 1).is_err());
    }

    #[test]
    fn quantize_dequantize_row_major_order() {
        let fb = FeedbackModel::new(0.0, 1.0);
        let m = CMatrix::from_fn(2, 2, |i, j| {
            Complex64::new(0.2 * (2 * i + j) as f64 - 0.3, 0.1)
        });
        let back = dequantize(&quantize(&m, &fb), &fb, 2, 2).unwrap();
        let half = fb.step() / 2.0;
        assert!(m.max_abs_diff(&back) <= half * 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn relay_bank_renormalized_exactly() {
        let cfg = SystemConfig::alamouti(0.1, false);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut codes = AdjustableCodeBank::identity(&cfg);
        for j in 0..2 {
            codes.mats[0][j] = CMatrix::from_fn(4, 4, |_, _| complex_gaussian(&mut rng));
        }
        normalize_codes(&mut codes, cfg.relay_power).unwrap();
        let fb = FeedbackModel::new(1e-3, cfg.relay_power);
        let recv = transmit_bank(&codes, &fb, cfg.relay_power, &mut rng).unwrap();
        assert!((recv.relay_power(0) - cfg.relay_power).abs() < 1e-12);
    }

    #[test]
    fn perfect_feedback_is_close_to_original() {
        let cfg = SystemConfig::alamouti(0.1, false);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut codes = AdjustableCodeBank::identity(&cfg);
        for j in 0..2 {
            codes.mats[0][j] = CMatrix::from_fn(4, 4, |_, _| complex_gaussian(&mut rng));
        }
        normalize_codes(&mut codes, cfg.relay_power).unwrap();
        let fb = FeedbackModel::new(0.0, cfg.relay_power);
        let recv = transmit_bank(&codes, &fb, cfg.relay_power, &mut rng).unwrap();
        // per-component error bounded by a half step before renormalization
        let half = fb.step() / 2.0;
        for j in 0..2 {
            assert!(codes.mats[0][j].max_abs_diff(&recv.mats[0][j]) < 4.0 * half);
        }
    }
}
