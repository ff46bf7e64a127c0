//! Analytical error-probability machinery: pairwise error probability
//! bounds for adaptive and traditional space-time codes, the MGF-based
//! exact PEP via Gauss-Chebyshev quadrature, and the fully distributed
//! determinant-based code selection rule.

use num_complex::Complex64;

use crate::numerics::{determinant, hermitian_eig, CMatrix};
use crate::{Error, Result};

/// Quadrature real part a of the node constant c = a + jb.
pub const QUAD_A: f64 = 0.25;

/// A codeword pair with its distance spectrum.
#[derive(Clone, Debug)]
pub struct CodewordPair {
    pub c1: CMatrix,
    pub c2: CMatrix,
    pub delta: CMatrix,
    /// Eigenvalues of Delta Delta^H, non-increasing, all >= 0.
    pub lambda_c: Vec<f64>,
}

impl CodewordPair {
    pub fn new(c1: CMatrix, c2: CMatrix) -> Result<Self> {
        if c1.rows() != c2.rows() || c1.cols() != c2.cols() {
            return Err(Error::Dimension("codeword shapes differ".into()));
        }
        let delta = c1.sub(&c2);
        let gram = delta.mul(&delta.hermitian());
        let eig = hermitian_eig(&gram)?;
        let lambda_c = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        Ok(CodewordPair { c1, c2, delta, lambda_c })
    }
}

fn check_eigs(l: &[f64]) -> Result<()> {
    if l.iter().any(|&x| x < 0.0) {
        return Err(Error::Degenerate("negative eigenvalue".into()));
    }
    Ok(())
}

/// Adaptive-code PEP upper bound
/// 1 / prod_n (1 + (gamma/4) lambda_Phi_n lambda_C_n)^(N T).
pub fn pep_bound_adaptive(
    lambda_phi: &[f64],
    lambda_c: &[f64],
    gamma: f64,
    n: usize,
    t: usize,
) -> Result<f64> {
    if lambda_phi.len() != lambda_c.len() {
        return Err(Error::Dimension("eigenvalue lists differ in length".into()));
    }
    check_eigs(lambda_phi)?;
    check_eigs(lambda_c)?;
    let nt = (n * t) as i32;
    let mut prod = 1.0;
    for (lp, lc) in lambda_phi.iter().zip(lambda_c) {
        prod *= (1.0 + 0.25 * gamma * lp * lc).powi(nt);
    }
    Ok(1.0 / prod)
}

/// Traditional-code PEP upper bound: the adaptive bound with unit
/// code-matrix eigenvalues.
pub fn pep_bound_traditional(lambda_c: &[f64], gamma: f64, n: usize, t: usize) -> Result<f64> {
    let ones = vec![1.0; lambda_c.len()];
    pep_bound_adaptive(&ones, lambda_c, gamma, n, t)
}

/// MGF kernel Theta(c) = det(I + c/(2 sqrt(2 N0)) Phi Lambda Phi^H)^-1.
pub fn mgf_theta(phi: &CMatrix, lambda: &CMatrix, c: Complex64, n0: f64) -> Result<Complex64> {
    if n0 <= 0.0 {
        return Err(Error::Config("N0 must be positive".into()));
    }
    if phi.cols() != lambda.rows() || !lambda.is_square() {
        return Err(Error::Dimension("eigenvalue matrix dimension mismatch".into()));
    }
    let scale = c / (2.0 * (2.0 * n0).sqrt());
    let arg = CMatrix::identity(phi.rows()).add(&phi.mul(lambda).mul(&phi.hermitian()).scaled(scale));
    let det = determinant(&arg)?;
    if det.norm() == 0.0 {
        return Err(Error::Numerical("singular MGF argument".into()));
    }
    Ok(det.inv())
}

/// Eigenvalues of Delta Delta^H lifted to the code-matrix dimension `dim`:
/// each of the N values is repeated dim/N times (one copy per slot).
pub fn lifted_distance_eigs(delta: &CMatrix, dim: usize) -> Result<CMatrix> {
    let gram = delta.mul(&delta.hermitian());
    let eig = hermitian_eig(&gram)?;
    let n = eig.eigenvalues.len();
    if dim % n != 0 {
        return Err(Error::Dimension(format!(
            "code dimension {dim} not a multiple of codeword rows {n}"
        )));
    }
    let reps = dim / n;
    let mut diag = Vec::with_capacity(dim);
    for &l in &eig.eigenvalues {
        diag.extend(std::iter::repeat(l.max(0.0)).take(reps));
    }
    Ok(CMatrix::diag_real(&diag))
}

/// Gauss-Chebyshev nodes for the MGF quadrature: theta_i = (2i-1)pi/(4J),
/// c_i = a (1 + j tan theta_i) with a = 1/4.
fn quad_nodes(j_terms: usize) -> impl Iterator<Item = (Complex64, f64)> {
    (1..=j_terms).map(move |i| {
        let theta = (2 * i - 1) as f64 * std::f64::consts::PI / (4.0 * j_terms as f64);
        let tan = theta.tan();
        (Complex64::new(QUAD_A, QUAD_A * tan), tan)
    })
}

/// Exact PEP by quadrature:
/// P = (1/2J) sum_i [Re Theta(c_i) + tan(theta_i) Im Theta(c_i)],
/// clamped to [0, 1]. Identical codewords give 1/2.
pub fn exact_pep(phi: &CMatrix, delta: &CMatrix, n0: f64, j_terms: usize) -> Result<f64> {
    if j_terms == 0 {
        return Err(Error::Config("quadrature needs at least one term".into()));
    }
    let lambda = lifted_distance_eigs(delta, phi.cols())?;
    let mut sum = 0.0;
    for (c, tan) in quad_nodes(j_terms) {
        let theta = mgf_theta(phi, &lambda, c, n0)?;
        sum += theta.re + tan * theta.im;
    }
    let p = sum / (2.0 * j_terms as f64);
    // small negative residue is quadrature noise; anything larger means
    // J is too small for this N0 regime
    if p < -1e-3 {
        return Err(Error::Numerical(format!(
            "quadrature residue {p}; increase the term count"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// FD-ARMO selection: the candidate maximizing the determinant modulus
/// |det(I + c/(2 sqrt(2 N0)) Phi Lambda Phi^H)| (equivalently minimizing
/// |Theta|); ties broken by lowest index.
pub fn fd_armo_select(
    candidates: &[CMatrix],
    delta: &CMatrix,
    n0: f64,
    c: Complex64,
) -> Result<(usize, CMatrix)> {
    if candidates.is_empty() {
        return Err(Error::Empty("no candidate code matrices".into()));
    }
    let lambda = lifted_distance_eigs(delta, candidates[0].cols())?;
    let scale = c / (2.0 * (2.0 * n0).sqrt());
    let mut best = 0usize;
    let mut best_det = f64::NEG_INFINITY;
    for (l, phi) in candidates.iter().enumerate() {
        let arg =
            CMatrix::identity(phi.rows()).add(&phi.mul(&lambda).mul(&phi.hermitian()).scaled(scale));
        let det = determinant(&arg)?.norm();
        if det > best_det {
            best_det = det;
            best = l;
        }
    }
    Ok((best, candidates[best].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{alamouti_encode, complex_gaussian, generate_sphere_matrix, Constellation};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Alamouti pair differing in the first symbol only.
    fn alamouti_pair() -> CodewordPair {
        let q = Constellation::qpsk();
        let c1 = alamouti_encode(&[q.points[0], q.points[0]]);
        let c2 = alamouti_encode(&[q.points[1], q.points[0]]);
        CodewordPair::new(c1, c2).unwrap()
    }

    #[test]
    fn codeword_pair_spectrum() {
        let pair = alamouti_pair();
        // single-symbol Alamouti difference: Delta Delta^H = |d|^2 I = 2 I
        assert_eq!(pair.lambda_c.len(), 2);
        for &l in &pair.lambda_c {
            assert!((l - 2.0).abs() < 1e-12);
        }
        assert!(pair.lambda_c[0] >= pair.lambda_c[1]);
    }

    #[test]
    fn collapse_identity() {
        let lc = [3.0, 0.4];
        for gamma in [0.1, 1.0, 10.0, 100.0] {
            let a = pep_bound_adaptive(&[1.0, 1.0], &lc, gamma, 2, 2).unwrap();
            let t = pep_bound_traditional(&lc, gamma, 2, 2).unwrap();
            assert!((a - t).abs() <= 1e-12 * t);
        }
    }

    #[test]
    fn bound_limits_and_closed_form() {
        // zero SNR and zero distance both give 1
        assert!((pep_bound_adaptive(&[2.0, 2.0], &[2.0, 2.0], 0.0, 2, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((pep_bound_traditional(&[0.0, 0.0], 10.0, 2, 2).unwrap() - 1.0).abs() < 1e-15);
        // single eigenvalue 4/gamma: (1/2)^(NT)
        let gamma = 7.3;
        let b = pep_bound_traditional(&[4.0 / gamma], gamma, 2, 2).unwrap();
        assert!((b - 0.5f64.powi(4)).abs() < 1e-14);
        // negative eigenvalues rejected
        assert!(pep_bound_traditional(&[-1.0], 1.0, 2, 2).is_err());
    }

    #[test]
    fn bound_monotone_in_snr() {
        let lc = [2.0, 2.0];
        let lp = [1.5, 0.5];
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let gamma = 0.1 * 2f64.powi(k);
            let b = pep_bound_adaptive(&lp, &lc, gamma, 2, 2).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn adaptive_bound_dominated_by_traditional_on_premise_profiles() {
        // profiles with one eigenvalue below 1 and the rest well above it
        let gamma = 10.0;
        for lp in [[6.0, 0.8], [10.0, 0.5], [4.0, 0.9]] {
            let a = pep_bound_adaptive(&lp, &[2.0, 2.0], gamma, 2, 2).unwrap();
            let t = pep_bound_traditional(&[2.0, 2.0], gamma, 2, 2).unwrap();
            assert!(a <= t, "{lp:?}: {a} > {t}");
        }
    }

    #[test]
    fn bound_dominates_monte_carlo() {
        // channel-averaged pairwise error for Y = Phi D C + noise, D iid
        // CN(0,1), Phi = sqrt(2) * unitary so both code eigenvalues are 2
        let pair = alamouti_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = unitary_from_random(&mut rng);
        let phi = q.scaled_re(2f64.sqrt());
        let gamma = 10f64.powf(0.0); // 0 dB keeps the error rate measurable
        let n0 = 1.0 / gamma;
        let trials = 100_000;
        let mut errs = 0usize;
        for _ in 0..trials {
            let d = CMatrix::from_fn(4, 2, |_, _| complex_gaussian(&mut rng));
            let dist = crate::numerics::frobenius_norm(&phi.mul(&d).mul(&pair.delta));
            // ML binary decision reduces to one Gaussian threshold test
            let noise: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * (n0 / 2.0).sqrt();
            if noise > dist / 2.0 {
                errs += 1;
            }
        }
        let p_hat = errs as f64 / trials as f64;
        let se = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        let bound = pep_bound_adaptive(&[2.0, 2.0], &pair.lambda_c, gamma, 2, 2).unwrap();
        assert!(p_hat - 3.0 * se <= bound, "{p_hat} +/- {se} vs {bound}");
    }

    fn unitary_from_random(rng: &mut impl Rng) -> CMatrix {
        // Gram-Schmidt on a random Gaussian matrix
        let a = CMatrix::from_fn(4, 4, |_, _| complex_gaussian(rng));
        let mut q = CMatrix::zeros(4, 4);
        for j in 0..4 {
            let mut v = a.col(j);
            for k in 0..j {
                let qk = q.col(k);
                v = v.sub(&qk.scaled(qk.inner(&v)));
            }
            let norm = crate::numerics::frobenius_norm(&v);
            q.set_col(j, &v.scaled_re(1.0 / norm));
        }
        q
    }

    #[test]
    fn mgf_theta_trivial_cases() {
        let phi = CMatrix::identity(1);
        let zero = CMatrix::diag_real(&[0.0]);
        let theta = mgf_theta(&phi, &zero, c(0.25, 0.5), 1.0).unwrap();
        assert!((theta - c(1.0, 0.0)).norm() < 1e-15);

        // 1x1: 1 / (1 + c lambda / (2 sqrt(2 N0)))
        let lam = CMatrix::diag_real(&[3.0]);
        let n0 = 2.0;
        let cc = c(0.25, -0.7);
        let theta = mgf_theta(&phi, &lam, cc, n0).unwrap();
        let want = (c(1.0, 0.0) + cc * 3.0 / (2.0 * (2.0 * n0).sqrt())).inv();
        assert!((theta - want).norm() < 1e-14);
    }

    #[test]
    fn mgf_theta_matches_cofactor_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi = generate_sphere_matrix(4, 1.5, &mut rng);
        let lam = CMatrix::diag_real(&[2.0, 2.0, 0.5, 0.5]);
        let cc = c(0.25, 0.4);
        let n0 = 0.5;
        let theta = mgf_theta(&phi, &lam, cc, n0).unwrap();

        let scale = cc / (2.0 * (2.0 * n0).sqrt());
        let arg = CMatrix::identity(4).add(&phi.mul(&lam).mul(&phi.hermitian()).scaled(scale));
        let det = cofactor_det(&arg);
        assert!((theta - det.inv()).norm() / theta.norm() < 1e-10);
    }

    fn cofactor_det(m: &CMatrix) -> Complex64 {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        let mut det = c(0.0, 0.0);
        for j in 0..n {
            let minor = CMatrix::from_fn(n - 1, n - 1, |r, col| {
                m[(r + 1, if col < j { col } else { col + 1 })]
            });
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            det += m[(0, j)] * cofactor_det(&minor) * sign;
        }
        det
    }

    #[test]
    fn exact_pep_identical_codewords_is_half() {
        let phi = CMatrix::identity(4);
        let delta = CMatrix::zeros(2, 2);
        let p = exact_pep(&phi, &delta, 1.0, 32).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_pep_vanishing_snr_approaches_half() {
        let pair = alamouti_pair();
        let phi = CMatrix::identity(4).scaled_re(0.5);
        let p = exact_pep(&phi, &pair.delta, 1e8, 64).unwrap();
        assert!(p < 0.5 && p > 0.45, "p = {p}");
    }

    #[test]
    fn exact_pep_quadrature_self_convergence() {
        let pair = alamouti_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let phi = generate_sphere_matrix(4, 2.0 * 2f64.sqrt(), &mut rng);
        for n0 in [0.05, 0.2, 1.0] {
            let p64 = exact_pep(&phi, &pair.delta, n0, 64).unwrap();
            let p128 = exact_pep(&phi, &pair.delta, n0, 128).unwrap();
            assert!((p64 - p128).abs() <= 1e-4, "N0 = {n0}: {p64} vs {p128}");
        }
    }

    #[test]
    fn exact_pep_monotone_in_n0() {
        // non-strict: at converged J the low-N0 values all collapse to 0
        let pair = alamouti_pair();
        let phi = CMatrix::identity(4);
        let mut prev = 0.0;
        for n0 in [0.05, 0.2, 1.0, 1e7, 1e8, 1e9] {
            let p = exact_pep(&phi, &pair.delta, n0, 64).unwrap();
            assert!(p + 1e-9 >= prev, "N0 = {n0}: {p} < {prev}");
            prev = p;
        }
    }

    #[test]
    fn fd_select_singleton_and_tie_break() {
        let pair = alamouti_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let phi = generate_sphere_matrix(4, 1.0, &mut rng);
        let (idx, best) = fd_armo_select(&[phi.clone()], &pair.delta, 0.5, c(0.25, 0.25)).unwrap();
        assert_eq!(idx, 0);
        assert_eq!(best.max_abs_diff(&phi), 0.0);

        // duplicated strongest candidate: lowest index wins
        let weak = generate_sphere_matrix(4, 0.1, &mut rng);
        let cands = vec![weak.clone(), weak.clone(), weak.clone(), phi.clone(), weak, phi];
        let (idx, _) = fd_armo_select(&cands, &pair.delta, 0.5, c(0.25, 0.25)).unwrap();
        assert_eq!(idx, 3);
    }

    #[test]
    fn fd_select_matches_exhaustive_rescan() {
        let pair = alamouti_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let cc = c(0.25, 0.25);
        let n0 = 0.4;
        for _ in 0..5 {
            let cands: Vec<CMatrix> = (0..500)
                .map(|_| generate_sphere_matrix(4, 1.0, &mut rng))
                .collect();
            let (idx, _) = fd_armo_select(&cands, &pair.delta, n0, cc).unwrap();

            // independent scan straight from the determinant definition
            let lam = lifted_distance_eigs(&pair.delta, 4).unwrap();
            let scale = cc / (2.0 * (2.0 * n0).sqrt());
            let mut best = 0;
            let mut best_v = f64::NEG_INFINITY;
            for (l, phi) in cands.iter().enumerate() {
                let arg = CMatrix::identity(4)
                    .add(&phi.mul(&lam).mul(&phi.hermitian()).scaled(scale));
                let v = determinant(&arg).unwrap().norm();
                if v > best_v {
                    best_v = v;
                    best = l;
                }
            }
            assert_eq!(idx, best);
        }
    }

    #[test]
    fn fd_select_permutation_invariant() {
        let pair = alamouti_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let cands: Vec<CMatrix> = (0..50)
            .map(|_| generate_sphere_matrix(4, 1.0, &mut rng))
            .collect();
        let (idx, best) = fd_armo_select(&cands, &pair.delta, 0.3, c(0.25, 0.25)).unwrap();
        let mut rev: Vec<CMatrix> = cands.clone();
        rev.reverse();
        let (ridx, rbest) = fd_armo_select(&rev, &pair.delta, 0.3, c(0.25, 0.25)).unwrap();
        assert_eq!(ridx, cands.len() - 1 - idx);
        assert_eq!(best.max_abs_diff(&rbest), 0.0);
    }

    #[test]
    fn fd_select_rejects_empty() {
        let pair = alamouti_pair();
        assert!(fd_armo_select(&[], &pair.delta, 0.5, c(0.25, 0.25)).is_err());
    }
}
