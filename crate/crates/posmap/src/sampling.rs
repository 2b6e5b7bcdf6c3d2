//! Seeded random sampling of vectors, matrices and unitaries.
//!
//! All randomness in the crate flows through a `ChaCha8Rng` seeded from a
//! caller-supplied 64-bit seed, so every report is reproducible. Independent
//! sampling stages derive disjoint sub-seeds from the master seed with a
//! SplitMix64 step, which keeps results independent of evaluation order.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{C64, CMatrix, CVector};

/// Deterministic sub-seed for stream `stream` of master seed `master`.
pub fn subseed(master: u64, stream: u64) -> u64 {
    // SplitMix64 finalizer over master + odd stream offset.
    let mut z = master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Vector of i.i.d. standard complex Gaussians.
pub fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    DVector::from_fn(d, |_, _| gaussian(rng))
}

/// Uniformly random unit vector in `C^d`.
pub fn random_unit_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    loop {
        let v = gaussian_vector(rng, d);
        let n = v.norm();
        if n > 1e-6 {
            return v / C64::new(n, 0.0);
        }
    }
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Random Hermitian matrix with Gaussian entries.
pub fn gaussian_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, d);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

/// Haar-distributed random unitary, obtained from the QR decomposition of a
/// Ginibre matrix with the phase convention fixed on the diagonal of R.
pub fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, d);
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / C64::new(rjj.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Random invertible matrix (Ginibre, redrawn in the unlikely event of
/// numerical singularity).
pub fn random_invertible(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    loop {
        let g = gaussian_matrix(rng, d, d);
        if crate::matrix::is_numerically_invertible(&g, 1e-8) {
            return g;
        }
    }
}
