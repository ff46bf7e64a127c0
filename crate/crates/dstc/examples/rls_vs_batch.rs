//! The RLS recursion against the batch least-squares solution it tracks:
//! with unit forgetting factor the two stay within numerical noise of each
//! other at every step.

use dstc::armo::{rls_step, RlsState};
use dstc::numerics::{solve_hermitian_pd, CMatrix};
use dstc::system::complex_gaussian;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dstc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let delta = 1e-4;
    let mut st = RlsState::new(4, 1.0, delta);
    let mut psi = CMatrix::identity(4).scaled_re(delta);
    let mut z = CMatrix::identity(4);
    println!("{:>6} {:>16}", "step", "max_abs_dev");
    for step in 1..=60 {
        let r_kj = CMatrix::from_fn(4, 1, |_, _| complex_gaussian(&mut rng));
        let r_e = CMatrix::from_fn(4, 1, |_, _| complex_gaussian(&mut rng));
        rls_step(&mut st, &r_e, &r_kj);
        psi = psi.add(&r_kj.outer(&r_kj));
        z = z.add(&r_e.outer(&r_kj));
        let batch = solve_hermitian_pd(&psi, &z.hermitian())?.hermitian();
        if step % 10 == 0 {
            println!("{step:>6} {:>16.4e}", st.phi.max_abs_diff(&batch));
        }
    }
    Ok(())
}
