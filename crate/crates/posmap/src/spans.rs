//! Kernel pairs of the block map, the tensor vectors they span, and numeric
//! rank measurements of the spanned subspaces against closed-form targets.
//!
//! A kernel pair is `(x, y)` with `Phi(|x><x|) y = 0`. Three constructions
//! feed the samplers:
//! * parallel: `x = sigma (x) phi`, kernel spanned by `sigma (x) phi` and
//!   `conj(sigma) (x) phi_perp`;
//! * orthogonal: `x = u (+) v` with `u _|_ v`, kernel parametrised by two
//!   complex coefficients;
//! * generic: eigenvectors of `Phi(|x><x|)` at numerically zero eigenvalue
//!   for arbitrary `x`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::BlockMap;
use crate::matrix::{C64, CMatrix, CVector, outer};
use crate::sampling::{gaussian_vector, random_unit_vector, rng_from, subseed};
use crate::subspaces::{Tensor3, v_perp_basis, w_perp_basis};

/// Residual tolerance `||Phi(|x><x|) y||` accepted for a kernel pair.
pub const KERNEL_RESIDUAL_TOL: f64 = 1e-10;

/// Relative eigenvalue threshold below which an eigenvector of
/// `Phi(|x><x|)` counts as a kernel vector.
pub const EIGEN_KERNEL_REL_TOL: f64 = 1e-10;

/// Tolerance for the unit-norm preconditions of the parallel construction.
pub const UNIT_NORM_TOL: f64 = 1e-8;

/// Default scaling factor of the numeric-rank cutoff.
pub const RANK_TOL_FACTOR: f64 = 1e-12;

/// Which construction produced a kernel pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Parallel,
    Orthogonal,
    Generic,
}

/// A validated pair `(x, y)` of unit vectors with `Phi(|x><x|) y = 0`.
#[derive(Debug, Clone)]
pub struct KernelPair {
    x: CVector,
    y: CVector,
    family: KernelFamily,
}

impl KernelPair {
    /// Normalizes both vectors and checks the kernel residual against the
    /// given map.
    pub fn new(map: &BlockMap, x: CVector, y: CVector, family: KernelFamily) -> Result<Self> {
        let (nx, ny) = (x.norm(), y.norm());
        if nx == 0.0 || ny == 0.0 {
            return Err(Error::Domain("kernel pair vectors must be nonzero".into()));
        }
        let x = x / C64::new(nx, 0.0);
        let y = y / C64::new(ny, 0.0);
        let pair = KernelPair { x, y, family };
        let res = pair.residual(map)?;
        if res > KERNEL_RESIDUAL_TOL {
            return Err(Error::Precondition(format!(
                "kernel residual {res:.3e} exceeds {KERNEL_RESIDUAL_TOL:.0e}"
            )));
        }
        Ok(pair)
    }

    pub fn x(&self) -> &CVector {
        &self.x
    }

    pub fn y(&self) -> &CVector {
        &self.y
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// `||Phi(|x><x|) y||` for this pair under `map`.
    pub fn residual(&self, map: &BlockMap) -> Result<f64> {
        let m = map.apply(&outer(&self.x, &self.x))?;
        Ok((m * &self.y).norm())
    }

    /// The span tensor `conj(x) (x) x (x) y` of this pair.
    pub fn span_tensor(&self) -> Tensor3 {
        span_vector(&self.x, &self.y).expect("pair vectors have equal length")
    }

    /// The plain product `x (x) y`, used for the optimality span.
    pub fn pair_vector(&self) -> CVector {
        kron_vec(&self.x, &self.y)
    }
}

/// `a (x) b` with index `(i, j) -> i * len(b) + j`.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let (la, lb) = (a.len(), b.len());
    CVector::from_fn(la * lb, |k, _| a[k / lb] * b[k % lb])
}

/// Span tensor `conj(x) (x) x (x) y`: entry `(a, b, c)` equals
/// `conj(x_a) x_b y_c`.
pub fn span_vector(x: &CVector, y: &CVector) -> Result<Tensor3> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "span vector needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    Tensor3::product(&x.conjugate(), x, y)
}

/// Kernel pairs of the parallel construction for unit `sigma` in `C^2` and
/// unit `varphi` in `C^n`: the pair `(x, x)` with `x = sigma (x) varphi`,
/// plus `(x, conj(sigma) (x) e)` for an orthonormal basis `{e}` of the
/// orthocomplement of `varphi`. Returns exactly `n` pairs.
pub fn kernel_parallel(sigma: &CVector, varphi: &CVector) -> Result<Vec<KernelPair>> {
    if sigma.len() != 2 {
        return Err(Error::Dimension(format!(
            "sigma must live in C^2, got length {}",
            sigma.len()
        )));
    }
    let n = varphi.len();
    if n < 2 {
        return Err(Error::Dimension(format!(
            "varphi must live in C^n with n >= 2, got length {n}"
        )));
    }
    if (sigma.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::Domain(format!(
            "sigma must be a unit vector, norm = {}",
            sigma.norm()
        )));
    }
    if (varphi.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::Domain(format!(
            "varphi must be a unit vector, norm = {}",
            varphi.norm()
        )));
    }

    let map = BlockMap::new(n)?;
    let x = kron_vec(sigma, varphi);
    let sigma_conj = sigma.conjugate();

    let mut pairs = Vec::with_capacity(n);
    pairs.push(KernelPair::new(&map, x.clone(), x.clone(), KernelFamily::Parallel)?);
    for e in orthocomplement_basis(varphi) {
        let y = kron_vec(&sigma_conj, &e);
        pairs.push(KernelPair::new(&map, x.clone(), y, KernelFamily::Parallel)?);
    }
    Ok(pairs)
}

/// Orthonormal basis of the orthocomplement of a unit vector, from the QR
/// factorization of `[v | I]`.
fn orthocomplement_basis(v: &CVector) -> Vec<CVector> {
    let n = v.len();
    let mut m = CMatrix::zeros(n, n + 1);
    m.column_mut(0).copy_from(v);
    for i in 0..n {
        m[(i, i + 1)] = C64::new(1.0, 0.0);
    }
    let q = m.qr().q();
    (1..n).map(|j| q.column(j).into_owned()).collect()
}

/// Kernel pair of the orthogonal construction.
///
/// With `u = x_part`, `v = y_part`, `<u|v> = 0` and `u != 0`, the first
/// vector is `u (+) v` and the second is the normalization of
/// `(z1 |u|^2 u + z2 |u|^2 v) (+) (z1 |u|^2 v - z2 |v|^2 u)`,
/// with the norm weights applied to the inputs as given (no renormalization
/// of the parts).
pub fn kernel_orthogonal(
    x_part: &CVector,
    y_part: &CVector,
    z1: C64,
    z2: C64,
) -> Result<KernelPair> {
    let n = x_part.len();
    if y_part.len() != n {
        return Err(Error::Dimension(format!(
            "parts must have equal length, got {} and {}",
            n,
            y_part.len()
        )));
    }
    if n < 2 {
        return Err(Error::Dimension(format!(
            "parts must live in C^n with n >= 2, got length {n}"
        )));
    }
    let nx = x_part.norm();
    let ny = y_part.norm();
    if nx == 0.0 {
        return Err(Error::Precondition("x_part must be nonzero".into()));
    }
    let ip = x_part.dotc(y_part);
    if ip.norm() > 1e-12 * (nx * ny).max(1.0) {
        return Err(Error::Precondition(format!(
            "parts must be orthogonal, |<x|y>| = {:.3e}",
            ip.norm()
        )));
    }
    if z1.norm() == 0.0 && z2.norm() == 0.0 {
        return Err(Error::Domain("(z1, z2) must not both vanish".into()));
    }

    let nx2 = C64::new(nx * nx, 0.0);
    let ny2 = C64::new(ny * ny, 0.0);
    let upper = x_part * (z1 * nx2) + y_part * (z2 * nx2);
    let lower = y_part * (z1 * nx2) - x_part * (z2 * ny2);

    let mut phi = CVector::zeros(2 * n);
    phi.rows_mut(0, n).copy_from(x_part);
    phi.rows_mut(n, n).copy_from(y_part);
    let mut z = CVector::zeros(2 * n);
    z.rows_mut(0, n).copy_from(&upper);
    z.rows_mut(n, n).copy_from(&lower);

    if z.norm() <= 1e-300 {
        return Err(Error::Domain(
            "construction degenerates to the zero vector for this input".into(),
        ));
    }
    let map = BlockMap::new(n)?;
    KernelPair::new(&map, phi, z, KernelFamily::Orthogonal)
}

/// Kernel pairs of `Phi(|x><x|)` found numerically: eigenvectors whose
/// eigenvalue is at most `EIGEN_KERNEL_REL_TOL` times the largest one.
pub fn kernel_generic(map: &BlockMap, x: &CVector) -> Result<Vec<KernelPair>> {
    let d = map.dim();
    if x.len() != d {
        return Err(Error::Dimension(format!(
            "x must live in C^{d}, got length {}",
            x.len()
        )));
    }
    if x.norm() == 0.0 {
        return Err(Error::Domain("x must be nonzero".into()));
    }
    let xn = x / C64::new(x.norm(), 0.0);
    let m = map.apply_to_pure(&xn)?;
    let eig = m.symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cutoff = EIGEN_KERNEL_REL_TOL * lambda_max.max(1e-300);
    let mut pairs = Vec::new();
    for k in 0..eig.eigenvalues.len() {
        if eig.eigenvalues[k] <= cutoff {
            let y = eig.eigenvectors.column(k).into_owned();
            pairs.push(KernelPair::new(map, xn.clone(), y, KernelFamily::Generic)?);
        }
    }
    Ok(pairs)
}

/// How the rank cutoff is derived from the singular spectrum.
#[derive(Debug, Clone, Copy)]
pub enum RankTolerance {
    /// `cutoff = max_sv * max(rows, len) * factor`.
    Scaled(f64),
    /// Fixed cutoff.
    Absolute(f64),
}

impl Default for RankTolerance {
    fn default() -> Self {
        RankTolerance::Scaled(RANK_TOL_FACTOR)
    }
}

/// A family of vectors with its measured singular spectrum and numeric rank.
#[derive(Debug, Clone)]
pub struct SpanSet {
    pub vectors: Vec<CVector>,
    pub singular_values: Vec<f64>,
    pub tolerance: f64,
    pub rank: usize,
}

/// Stacks the vectors as matrix rows and counts singular values above the
/// tolerance cutoff.
pub fn numeric_rank(vectors: Vec<CVector>, tol: RankTolerance) -> Result<SpanSet> {
    let refs: Vec<&CVector> = vectors.iter().collect();
    let (rank, singular_values, tolerance) = rank_of_rows(&refs, tol)?;
    Ok(SpanSet {
        vectors,
        singular_values,
        tolerance,
        rank,
    })
}

/// Rank of a set of row vectors. Tall stacks are first reduced by QR; the
/// singular values of the triangular factor equal those of the stack.
pub fn rank_of_rows(rows: &[&CVector], tol: RankTolerance) -> Result<(usize, Vec<f64>, f64)> {
    if rows.is_empty() {
        return Err(Error::Domain("rank of an empty vector family".into()));
    }
    let len = rows[0].len();
    if rows.iter().any(|r| r.len() != len) {
        return Err(Error::Dimension("vectors must have equal length".into()));
    }
    let m = rows.len();
    let mat = CMatrix::from_fn(m, len, |i, j| rows[i][j]);
    let sv = if m > len {
        let r = mat.qr().r();
        crate::matrix::singular_values_desc(&r)
    } else {
        crate::matrix::singular_values_desc(&mat)
    };
    let max_sv = sv.first().copied().unwrap_or(0.0);
    let cutoff = match tol {
        RankTolerance::Scaled(factor) => max_sv * (m.max(len) as f64) * factor,
        RankTolerance::Absolute(t) => t,
    };
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    Ok((rank, sv, cutoff))
}

/// Measured-vs-target verdict for one dimension item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Inconclusive,
}

/// One group of dimension values. `w_plus_v` and `perp_union` carry
/// lower-bound targets; everything else is an exact target.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DimValues {
    pub w: usize,
    pub v: usize,
    pub w_plus_v: usize,
    pub n_phi: usize,
    pub p_phi: usize,
    pub w_perp: usize,
    pub v_perp: usize,
    pub perp_union: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DimVerdicts {
    pub w: Verdict,
    pub v: Verdict,
    pub w_plus_v: Verdict,
    pub n_phi: Verdict,
    pub p_phi: Verdict,
    pub w_perp: Verdict,
    pub v_perp: Verdict,
    pub perp_union: Verdict,
}

/// Measured numeric dimensions of the kernel-span subspaces against their
/// closed-form targets.
#[derive(Debug, Clone, Serialize)]
pub struct DimReport {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub measured: DimValues,
    pub targets: DimValues,
    pub verdicts: DimVerdicts,
}

impl DimReport {
    /// True when every item matched its target (or bound).
    pub fn all_match(&self) -> bool {
        let v = &self.verdicts;
        [
            v.w, v.v, v.w_plus_v, v.n_phi, v.p_phi, v.w_perp, v.v_perp, v.perp_union,
        ]
        .iter()
        .all(|x| *x == Verdict::Match)
    }

    /// True if a measured value exceeds an exact target, which would mean
    /// the rank tolerance admitted spurious directions.
    pub fn any_overshoot(&self) -> bool {
        let m = &self.measured;
        let t = &self.targets;
        m.w > t.w
            || m.v > t.v
            || m.n_phi > t.n_phi
            || m.p_phi > t.p_phi
            || m.w_perp > t.w_perp
            || m.v_perp > t.v_perp
    }
}

/// Closed-form dimension targets at block size `n`.
pub fn dim_targets(n: usize) -> DimValues {
    let n3 = n * n * n;
    DimValues {
        w: 7 * n3 + n * n - 2 * n,
        v: 7 * n3 + n * n - 6 * n,
        w_plus_v: 8 * n3 - 2 * n,
        n_phi: 2 * n * (4 * n * n - 1),
        p_phi: 4 * n * n,
        w_perp: n3 - n * n + 2 * n,
        v_perp: n3 - n * n + 6 * n,
        perp_union: 2 * (n3 - n * n) + 6 * n,
    }
}

/// Default sample count per family: `4 (2n)^3`.
pub fn default_samples(n: usize) -> usize {
    4 * (2 * n).pow(3)
}

/// Dimension report for the plain block map.
pub fn dim_report(n: usize, samples: usize, seed: u64) -> Result<DimReport> {
    dim_report_for_map(&BlockMap::new(n)?, samples, seed)
}

/// Dimension report for an arbitrary member of the family (kernel pairs of
/// conjugated maps are obtained by transforming the base constructions).
pub fn dim_report_for_map(map: &BlockMap, samples: usize, seed: u64) -> Result<DimReport> {
    if samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    let n = map.n();
    let transform = PairTransform::for_map(map)?;

    // Parallel-family span vectors.
    let mut rng_w = rng_from(subseed(seed, 0));
    let mut w_pairs: Vec<KernelPair> = Vec::with_capacity(samples);
    while w_pairs.len() < samples {
        let sigma = random_unit_vector(&mut rng_w, 2);
        let phi = random_unit_vector(&mut rng_w, n);
        for pair in kernel_parallel(&sigma, &phi)? {
            if w_pairs.len() == samples {
                break;
            }
            w_pairs.push(transform.apply(map, pair)?);
        }
    }

    // Orthogonal-family span vectors, with unnormalized parts so that the
    // norm weights of the construction are exercised.
    let mut rng_v = rng_from(subseed(seed, 1));
    let mut v_pairs: Vec<KernelPair> = Vec::with_capacity(samples);
    while v_pairs.len() < samples {
        let u = gaussian_vector(&mut rng_v, n);
        let mut v = gaussian_vector(&mut rng_v, n);
        let nu2 = u.norm_squared();
        if nu2 < 1e-12 {
            continue;
        }
        let overlap = u.dotc(&v) / C64::new(nu2, 0.0);
        v -= &u * overlap;
        let z1 = C64::new(
            rand::Rng::random::<f64>(&mut rng_v) - 0.5,
            rand::Rng::random::<f64>(&mut rng_v) - 0.5,
        );
        let z2 = C64::new(
            rand::Rng::random::<f64>(&mut rng_v) - 0.5,
            rand::Rng::random::<f64>(&mut rng_v) - 0.5,
        );
        if z1.norm() == 0.0 && z2.norm() == 0.0 {
            continue;
        }
        let pair = kernel_orthogonal(&u, &v, z1, z2)?;
        v_pairs.push(transform.apply(map, pair)?);
    }

    // Generic-family pairs: arbitrary x, numerically solved kernels. These
    // guard against span directions missed by the two constructions.
    let mut rng_g = rng_from(subseed(seed, 2));
    let mut g_pairs: Vec<KernelPair> = Vec::new();
    let attempts = (samples / 4).max(16);
    for _ in 0..attempts {
        if g_pairs.len() >= samples {
            break;
        }
        let x = random_unit_vector(&mut rng_g, map.dim());
        g_pairs.extend(kernel_generic(map, &x)?);
    }

    let w_tensors: Vec<Tensor3> = w_pairs.iter().map(|p| p.span_tensor()).collect();
    let v_tensors: Vec<Tensor3> = v_pairs.iter().map(|p| p.span_tensor()).collect();
    let g_tensors: Vec<Tensor3> = g_pairs.iter().map(|p| p.span_tensor()).collect();

    let tol = RankTolerance::default();
    let rank_of = |sets: &[&[Tensor3]]| -> Result<usize> {
        let rows: Vec<&CVector> = sets
            .iter()
            .flat_map(|s| s.iter().map(|t| t.as_vector()))
            .collect();
        Ok(rank_of_rows(&rows, tol)?.0)
    };

    let w_rank = rank_of(&[&w_tensors])?;
    let v_rank = rank_of(&[&v_tensors])?;
    let w_plus_v_rank = rank_of(&[&w_tensors, &v_tensors])?;
    let n_phi_rank = rank_of(&[&w_tensors, &v_tensors, &g_tensors])?;

    // Optimality span: plain x (x) y over every collected pair.
    let p_vectors: Vec<CVector> = w_pairs
        .iter()
        .chain(v_pairs.iter())
        .chain(g_pairs.iter())
        .map(|p| p.pair_vector())
        .collect();
    let p_refs: Vec<&CVector> = p_vectors.iter().collect();
    let p_phi_rank = rank_of_rows(&p_refs, tol)?.0;

    // Orthocomplement bases.
    let w_perp = w_perp_basis(n)?;
    let v_perp = v_perp_basis(n)?;
    let w_perp_rank = rank_of(&[&w_perp])?;
    let v_perp_rank = rank_of(&[&v_perp])?;
    let perp_union_rank = rank_of(&[&w_perp, &v_perp])?;

    let measured = DimValues {
        w: w_rank,
        v: v_rank,
        w_plus_v: w_plus_v_rank,
        n_phi: n_phi_rank,
        p_phi: p_phi_rank,
        w_perp: w_perp_rank,
        v_perp: v_perp_rank,
        perp_union: perp_union_rank,
    };
    let targets = dim_targets(n);
    let exact = |m: usize, t: usize| {
        if m == t {
            Verdict::Match
        } else {
            Verdict::Inconclusive
        }
    };
    let bound = |m: usize, t: usize| {
        if m >= t {
            Verdict::Match
        } else {
            Verdict::Inconclusive
        }
    };
    let verdicts = DimVerdicts {
        w: exact(measured.w, targets.w),
        v: exact(measured.v, targets.v),
        w_plus_v: bound(measured.w_plus_v, targets.w_plus_v),
        n_phi: exact(measured.n_phi, targets.n_phi),
        p_phi: exact(measured.p_phi, targets.p_phi),
        w_perp: exact(measured.w_perp, targets.w_perp),
        v_perp: exact(measured.v_perp, targets.v_perp),
        perp_union: bound(measured.perp_union, targets.perp_union),
    };

    Ok(DimReport {
        n,
        seed,
        samples,
        measured,
        targets,
        verdicts,
    })
}

/// Carries the inverse conjugators needed to turn kernel pairs of the base
/// map into kernel pairs of a conjugated map.
struct PairTransform {
    inverses: Option<(CMatrix, CMatrix)>, // (A^-1, B^-1)
}

impl PairTransform {
    fn for_map(map: &BlockMap) -> Result<Self> {
        match map.conjugators() {
            None => Ok(PairTransform { inverses: None }),
            Some((a, b)) => {
                let a_inv = a.clone().try_inverse().ok_or_else(|| {
                    Error::InvalidConjugator("A is not invertible".into())
                })?;
                let b_inv = b.clone().try_inverse().ok_or_else(|| {
                    Error::InvalidConjugator("B is not invertible".into())
                })?;
                Ok(PairTransform {
                    inverses: Some((a_inv, b_inv)),
                })
            }
        }
    }

    /// Base pair `(x, y)` becomes `(B^-1 x, A^-1 y)` for the conjugated map.
    fn apply(&self, map: &BlockMap, pair: KernelPair) -> Result<KernelPair> {
        match &self.inverses {
            None => Ok(pair),
            Some((a_inv, b_inv)) => {
                let x = b_inv * pair.x();
                let y = a_inv * pair.y();
                KernelPair::new(map, x, y, pair.family())
            }
        }
    }
}
