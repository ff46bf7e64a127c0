//! Link-level simulator and analysis toolkit for adaptive distributed
//! space-time coding (DSTC) over two-hop amplify-and-forward MIMO relay
//! channels.
//!
//! The crate covers the full chain: QPSK modulation, quasi-static Rayleigh
//! channels, Alamouti re-encoding at the relay with adjustable code matrices,
//! MMSE and ML receivers, stochastic-gradient / least-squares / RLS code-matrix
//! optimizers, a quantized binary-symmetric feedback path, analytical pairwise
//! error probability bounds, and a fully distributed determinant-based code
//! selection rule. The `harness` module orchestrates seeded, reproducible
//! Monte Carlo experiments and writes CSV artifacts.

pub mod analysis;
pub mod armo;
mod error;
pub mod feedback;
pub mod harness;
pub mod numerics;
pub mod receivers;
pub mod system;

pub use error::{Error, Result};
