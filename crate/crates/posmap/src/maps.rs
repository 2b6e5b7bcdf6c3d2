//! The reduction map, the block map family `Phi_n` on `B(C^{2n})`, its
//! GL-conjugates, and the associated Choi-matrix witness.
//!
//! `C^{2n}` is split as `C^n (+) C^n`; a vector `x` decomposes as
//! `x = phi_1 (+) phi_2` with global index `g = alpha*n + i` for block
//! `alpha` in `{0, 1}` and intra-block index `i` in `{0, ..., n-1}`.
//! Every module of the crate shares this convention.

use crate::error::{Error, Result};
use crate::matrix::{
    C64, CMatrix, CVector, cone, is_numerically_invertible, max_abs_diff,
};

/// Relative singular-value threshold below which a conjugator counts as
/// numerically singular.
pub const INVERTIBILITY_REL_TOL: f64 = 1e-10;

/// Reduction map `R_n(X) = I_n Tr(X) - X` on square matrices.
pub fn reduction_map(x: &CMatrix) -> Result<CMatrix> {
    if !x.is_square() {
        return Err(Error::Dimension(format!(
            "reduction map needs a square input, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let n = x.nrows();
    let tr = x.trace();
    let mut out = -x.clone();
    for i in 0..n {
        out[(i, i)] += tr;
    }
    Ok(out)
}

/// Anything that acts linearly on `d x d` complex matrices.
///
/// Certification routines (positivity search, commutant computation) are
/// generic over this trait so that control maps used in tests plug in next
/// to [`BlockMap`].
pub trait MatrixMap {
    /// Side length of the matrices the map acts on.
    fn dim(&self) -> usize;

    /// Applies the map. Callers must pass a `dim() x dim()` matrix.
    fn apply_matrix(&self, x: &CMatrix) -> CMatrix;
}

/// The block positive map on `B(C^{2n})` built from the reduction map,
/// optionally conjugated by an invertible pair `(A, B)`:
/// `X -> A^dagger Phi_n(B X B^dagger) A`.
#[derive(Debug, Clone)]
pub struct BlockMap {
    n: usize,
    conjugators: Option<(CMatrix, CMatrix)>,
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "block size n must be at least 2, got {n}"
        )));
    }
    Ok(())
}

fn check_conjugator(name: &str, m: &CMatrix, dim: usize) -> Result<()> {
    if m.shape() != (dim, dim) {
        return Err(Error::InvalidConjugator(format!(
            "{name} must be {dim}x{dim}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !is_numerically_invertible(m, INVERTIBILITY_REL_TOL) {
        return Err(Error::InvalidConjugator(format!(
            "{name} is numerically singular"
        )));
    }
    Ok(())
}

impl BlockMap {
    /// The plain map for block size `n >= 2`.
    pub fn new(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(BlockMap { n, conjugators: None })
    }

    /// Block size `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `2n` of the carrier space.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn conjugators(&self) -> Option<(&CMatrix, &CMatrix)> {
        self.conjugators.as_ref().map(|(a, b)| (a, b))
    }

    /// Conjugated family member `X -> A^dagger self(B X B^dagger) A`.
    ///
    /// Conjugating an already conjugated map composes the pairs.
    pub fn conjugate(&self, a: &CMatrix, b: &CMatrix) -> Result<BlockMap> {
        let d = self.dim();
        check_conjugator("A", a, d)?;
        check_conjugator("B", b, d)?;
        let conjugators = match &self.conjugators {
            None => (a.clone(), b.clone()),
            // (A0, B0) then (A, B): X -> A^+ A0^+ Phi(B0 B X B^+ B0^+) A0 A.
            Some((a0, b0)) => (a0 * a, b0 * b),
        };
        Ok(BlockMap {
            n: self.n,
            conjugators: Some(conjugators),
        })
    }

    /// Applies the map to a `2n x 2n` matrix.
    ///
    /// Blockwise, with `Y = n * Phi(X)`:
    /// `Y_11 = I_n Tr X_22`, `Y_22 = I_n Tr X_11`,
    /// `Y_12 = -X_12 - R_n(X_21)`, `Y_21 = -X_21 - R_n(X_12)`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        let d = self.dim();
        if x.shape() != (d, d) {
            return Err(Error::Dimension(format!(
                "map acts on {d}x{d} matrices, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        match &self.conjugators {
            None => Ok(base_phi(self.n, x)),
            Some((a, b)) => {
                let inner = b * x * b.adjoint();
                Ok(a.adjoint() * base_phi(self.n, &inner) * a)
            }
        }
    }

    /// Applies the map to the rank-one projector `|x><x|`.
    ///
    /// Uses the closed block form for pure inputs; agrees entrywise with
    /// `apply(|x><x|)`.
    pub fn apply_to_pure(&self, x: &CVector) -> Result<CMatrix> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::Dimension(format!(
                "pure state must live in C^{d}, got length {}",
                x.len()
            )));
        }
        if x.norm() == 0.0 {
            return Err(Error::Domain("pure state must be nonzero".into()));
        }
        match &self.conjugators {
            None => Ok(base_phi_pure(self.n, x)),
            Some((a, b)) => {
                let bx = b * x;
                Ok(a.adjoint() * base_phi_pure(self.n, &bx) * a)
            }
        }
    }
}

impl MatrixMap for BlockMap {
    fn dim(&self) -> usize {
        2 * self.n
    }

    fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        self.apply(x).expect("dimension contract of MatrixMap")
    }
}

fn base_phi(n: usize, x: &CMatrix) -> CMatrix {
    let x11 = x.view((0, 0), (n, n));
    let x12 = x.view((0, n), (n, n));
    let x21 = x.view((n, 0), (n, n));
    let x22 = x.view((n, n), (n, n));

    let tr11 = x11.trace();
    let tr22 = x22.trace();

    // R_n(M) = I Tr M - M for the off-diagonal blocks.
    let r21 = {
        let mut m = -x21.clone_owned();
        let tr = x21.trace();
        for i in 0..n {
            m[(i, i)] += tr;
        }
        m
    };
    let r12 = {
        let mut m = -x12.clone_owned();
        let tr = x12.trace();
        for i in 0..n {
            m[(i, i)] += tr;
        }
        m
    };

    let mut y = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        y[(i, i)] = tr22;
        y[(n + i, n + i)] = tr11;
    }
    let y12 = -x12.clone_owned() - r21;
    let y21 = -x21.clone_owned() - r12;
    y.view_mut((0, n), (n, n)).copy_from(&y12);
    y.view_mut((n, 0), (n, n)).copy_from(&y21);
    y * C64::new(1.0 / n as f64, 0.0)
}

fn base_phi_pure(n: usize, x: &CVector) -> CMatrix {
    let phi1 = x.rows(0, n).clone_owned();
    let phi2 = x.rows(n, n).clone_owned();
    let n1 = phi1.norm_squared();
    let n2 = phi2.norm_squared();
    let ip12 = phi1.dotc(&phi2); // <phi_1 | phi_2>

    // Y_12 = -|phi_1><phi_2| + |phi_2><phi_1| - <phi_1|phi_2> I.
    let mut y12 = &phi2 * phi1.adjoint() - &phi1 * phi2.adjoint();
    for i in 0..n {
        y12[(i, i)] -= ip12;
    }
    let mut y21 = &phi1 * phi2.adjoint() - &phi2 * phi1.adjoint();
    for i in 0..n {
        y21[(i, i)] -= ip12.conj();
    }

    let mut y = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        y[(i, i)] = C64::new(n2, 0.0);
        y[(n + i, n + i)] = C64::new(n1, 0.0);
    }
    y.view_mut((0, n), (n, n)).copy_from(&y12);
    y.view_mut((n, 0), (n, n)).copy_from(&y21);
    y * C64::new(1.0 / n as f64, 0.0)
}

/// The Choi-matrix entanglement witness of the block map: the map applied
/// to the second factor of the projector onto the maximally entangled unit
/// vector `(1/sqrt(2n)) sum_i |ii>`.
#[derive(Debug, Clone)]
pub struct Witness {
    n: usize,
    matrix: CMatrix,
}

impl Witness {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The `(2n)^2 x (2n)^2` Hermitian witness matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }
}

/// Builds the witness `(1 (x) Phi_n)` of the maximally entangled projector.
///
/// Block `(i, j)` of the result is `Phi_n(E_ij) / (2n)`; the trace is 1
/// because the map is trace preserving.
pub fn choi_witness(n: usize) -> Result<Witness> {
    check_n(n)?;
    let map = BlockMap::new(n)?;
    let d = map.dim();
    let scale = C64::new(1.0 / d as f64, 0.0);
    let mut w = CMatrix::zeros(d * d, d * d);
    let mut e = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            e[(i, j)] = cone();
            let block = map.apply(&e)? * scale;
            w.view_mut((i * d, j * d), (d, d)).copy_from(&block);
            e[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    debug_assert!(max_abs_diff(&w, &w.adjoint()) <= 1e-12);
    Ok(Witness { n, matrix: w })
}
