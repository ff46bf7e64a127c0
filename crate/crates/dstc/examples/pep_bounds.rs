//! Pairwise error probability: adaptive and traditional upper bounds next
//! to the exact quadrature value, for the minimum-distance Alamouti pair.

use dstc::analysis::{exact_pep, pep_bound_adaptive, pep_bound_traditional, CodewordPair};
use dstc::numerics::CMatrix;
use dstc::system::{alamouti_encode, Constellation};
use num_complex::Complex64;

fn main() -> dstc::Result<()> {
    let q = Constellation::qpsk();
    let pair = CodewordPair::new(
        alamouti_encode(&[q.points[0], q.points[0]]),
        alamouti_encode(&[q.points[1], q.points[0]]),
    )?;
    // sqrt(2)-scaled Hadamard: unitary shape, both code eigenvalues 2
    let h = [[1.0, 1.0, 1.0, 1.0], [1.0, -1.0, 1.0, -1.0], [1.0, 1.0, -1.0, -1.0], [1.0, -1.0, -1.0, 1.0]];
    let phi = CMatrix::from_fn(4, 4, |i, j| Complex64::new(h[i][j] / 2.0, 0.0))
        .scaled_re(2f64.sqrt());
    let lambda_phi = vec![2.0; pair.lambda_c.len()];

    println!("{:>8} {:>12} {:>14} {:>16}", "snr_db", "exact_pep", "bound_adaptive", "bound_traditional");
    for snr_db in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let gamma = 10f64.powf(snr_db / 10.0);
        let exact = exact_pep(&phi, &pair.delta, 1.0 / gamma, 64)?;
        let adaptive = pep_bound_adaptive(&lambda_phi, &pair.lambda_c, gamma, 2, 2)?;
        let traditional = pep_bound_traditional(&pair.lambda_c, gamma, 2, 2)?;
        println!("{snr_db:>8.1} {exact:>12.4e} {adaptive:>14.4e} {traditional:>16.4e}");
    }
    Ok(())
}
