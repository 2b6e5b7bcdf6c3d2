//! Numerical certificates: positivity of the map, irreducibility via the
//! commutant, the spanning dimensions, and a search for states with
//! positive partial transpose that the witness still detects.
//!
//! Every routine here is deterministic given its seed; reports embed the
//! seeds and tolerances they were produced with.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::maps::{BlockMap, MatrixMap};
use crate::matrix::{
    C64, CMatrix, CVector, elementary, hermitian_eigenvalues, hermitian_part, max_abs_diff,
    min_eigenpair, outer, partial_transpose, singular_values_desc, unvec_row_major,
    vec_row_major, MatrixJson,
};
use crate::sampling::{gaussian_matrix, random_unit_vector, rng_from, subseed};
use crate::spans::{default_samples, dim_report_for_map, RANK_TOL_FACTOR};

/// Unitality deviation accepted as exact.
pub const UNITALITY_TOL: f64 = 1e-12;

/// Relative trace-preservation deviation accepted as exact.
pub const TRACE_TOL: f64 = 1e-10;

/// Half-width of the window around zero in which the estimated positivity
/// minimum of a positive map with kernels must land.
pub const POSITIVITY_WINDOW: f64 = 1e-9;

/// Matrix representation `L` of a linear map on `d x d` matrices acting on
/// row-major vectorizations: `vec(Phi(X)) = L vec(X)`.
pub fn map_matrix_representation(map: &impl MatrixMap) -> CMatrix {
    let d = map.dim();
    let mut l = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let col = vec_row_major(&map.apply_matrix(&elementary(d, i, j)));
            l.column_mut(i * d + j).copy_from(&col);
        }
    }
    l
}

/// `lambda_min(Phi(|x><x|))` for a unit-normalized `x`.
pub fn lambda_min_on_pure(map: &impl MatrixMap, x: &CVector) -> f64 {
    let n = x.norm();
    assert!(n > 0.0, "x must be nonzero");
    let xn = x / C64::new(n, 0.0);
    min_eigenpair(&map.apply_matrix(&outer(&xn, &xn))).0
}

/// Estimates the global minimum of `lambda_min(Phi(|x><x|))` over the unit
/// sphere by multistart projected gradient descent.
///
/// The descent direction comes from eigenvector sensitivity: with `v` the
/// lowest eigenvector, the Euclidean gradient is `2 Phi^dagger(|v><v|) x`,
/// projected onto the sphere tangent. At degenerate lowest eigenvalues this
/// is a subgradient; multistart covers the nonsmooth set.
pub fn positivity_min(map: &impl MatrixMap, restarts: usize, seed: u64) -> Result<f64> {
    if restarts == 0 {
        return Err(Error::Domain("restarts must be at least 1".into()));
    }
    let d = map.dim();
    let l_adj = map_matrix_representation(map).adjoint();

    let objective = |x: &CVector| -> (f64, CVector) {
        min_eigenpair(&map.apply_matrix(&outer(x, x)))
    };

    let mut best = f64::INFINITY;
    for r in 0..restarts {
        let mut rng = rng_from(subseed(seed, 1000 + r as u64));
        let mut x = random_unit_vector(&mut rng, d);
        let (mut fx, mut v) = objective(&x);
        best = best.min(fx);

        for _ in 0..400 {
            // Gradient of the quadratic form x -> <v| Phi(x x^+) |v>.
            let a = hermitian_part(&unvec_row_major(&(&l_adj * vec_row_major(&outer(&v, &v))), d, d));
            let grad = (&a * &x) * C64::new(2.0, 0.0);
            let radial = x.dotc(&grad).re;
            let tangent = &grad - &x * C64::new(radial, 0.0);
            let gnorm = tangent.norm();
            if gnorm <= 1e-13 {
                break;
            }

            // Backtracking step on the sphere.
            let mut eta = 0.5;
            let mut moved = false;
            while eta > 1e-14 {
                let cand = &x - &tangent * C64::new(eta, 0.0);
                let cn = cand.norm();
                if cn > 0.0 {
                    let cand = cand / C64::new(cn, 0.0);
                    let (fc, vc) = objective(&cand);
                    if fc < fx - 1e-4 * eta * gnorm * gnorm {
                        x = cand;
                        fx = fc;
                        v = vc;
                        moved = true;
                        break;
                    }
                }
                eta *= 0.5;
            }
            best = best.min(fx);
            if !moved {
                break;
            }
        }
    }
    Ok(best)
}

/// Dimension of the commutant of the map's image: the nullity of the linear
/// system `[Phi(B_k), Z] = 0` over a Hermitian basis `{B_k}` of the matrix
/// algebra. The map is irreducible exactly when this is 1.
pub fn commutant_dim(map: &impl MatrixMap) -> usize {
    let d = map.dim();
    let d2 = d * d;
    let basis = hermitian_basis(d);
    let id = CMatrix::identity(d, d);

    // Row-major vec turns [Y, Z] = 0 into (Y (x) I - I (x) Y^T) vec(Z) = 0.
    let mut system = CMatrix::zeros(d2 * basis.len(), d2);
    for (k, b) in basis.iter().enumerate() {
        let y = map.apply_matrix(b);
        let block = y.kronecker(&id) - id.kronecker(&y.transpose());
        system.view_mut((k * d2, 0), (d2, d2)).copy_from(&block);
    }

    let (rows, cols) = system.shape();
    let sv = if rows > cols {
        singular_values_desc(&system.qr().r())
    } else {
        singular_values_desc(&system)
    };
    let max_sv = sv.first().copied().unwrap_or(0.0);
    let cutoff = max_sv * (rows.max(cols) as f64) * RANK_TOL_FACTOR;
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    d2 - rank
}

/// The `d^2` elementary Hermitian matrices: diagonal units, symmetrized
/// pairs and antisymmetrized imaginary pairs.
fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        basis.push(elementary(d, i, i));
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(i, j)] = C64::new(1.0, 0.0);
            sym[(j, i)] = C64::new(1.0, 0.0);
            basis.push(sym);
            let mut asym = CMatrix::zeros(d, d);
            asym[(i, j)] = C64::new(0.0, 1.0);
            asym[(j, i)] = C64::new(0.0, -1.0);
            basis.push(asym);
        }
    }
    basis
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeviationCheck {
    pub ok: bool,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DimCheck {
    pub measured: usize,
    pub target: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExposednessVerdict {
    Supported,
    Inconclusive,
}

/// Tolerances a certificate was produced with, embedded for auditability.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ToleranceTable {
    pub unitality: f64,
    pub trace: f64,
    pub kernel_residual: f64,
    pub rank_factor: f64,
    pub positivity_window: f64,
}

impl Default for ToleranceTable {
    fn default() -> Self {
        ToleranceTable {
            unitality: UNITALITY_TOL,
            trace: TRACE_TOL,
            kernel_residual: crate::spans::KERNEL_RESIDUAL_TOL,
            rank_factor: RANK_TOL_FACTOR,
            positivity_window: POSITIVITY_WINDOW,
        }
    }
}

/// Aggregate numerical certificate.
///
/// The verdict is `supported` exactly when unitality holds, the commutant
/// is one-dimensional and the strong spanning dimension reaches its target.
/// It records that the hypotheses of the exposedness criterion were
/// verified numerically; it is evidence, not a proof.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub n: usize,
    pub seed: u64,
    pub unital: DeviationCheck,
    pub trace_preserving: DeviationCheck,
    pub positivity_min: f64,
    pub commutant_dim: usize,
    pub spanning_dim: DimCheck,
    pub strong_spanning_dim: DimCheck,
    pub exposedness_verdict: ExposednessVerdict,
    pub restarts: usize,
    pub samples: usize,
    pub tolerances: ToleranceTable,
}

/// Certificate for the plain map with default effort (200 restarts,
/// `4 (2n)^3` samples per family).
pub fn exposedness_certificate(n: usize, seed: u64) -> Result<CertificateReport> {
    let map = BlockMap::new(n)?;
    certificate_for_map(&map, seed, 200, default_samples(n))
}

/// Certificate for an arbitrary member of the family.
pub fn certificate_for_map(
    map: &BlockMap,
    seed: u64,
    restarts: usize,
    samples: usize,
) -> Result<CertificateReport> {
    let d = map.dim();
    let id = CMatrix::identity(d, d);

    let unital_dev = max_abs_diff(&map.apply(&id)?, &id);
    let unital = DeviationCheck {
        ok: unital_dev <= UNITALITY_TOL,
        max_deviation: unital_dev,
    };

    // Trace preservation over random inputs (holds for the plain map and
    // for unitarily conjugated ones; a general GL conjugate may break it).
    let mut rng = rng_from(subseed(seed, 2));
    let mut trace_dev: f64 = 0.0;
    for _ in 0..100 {
        let x = gaussian_matrix(&mut rng, d, d);
        let y = map.apply(&x)?;
        let dev = (y.trace() - x.trace()).norm() / x.trace().norm().max(1.0);
        trace_dev = trace_dev.max(dev);
    }
    let trace_preserving = DeviationCheck {
        ok: trace_dev <= TRACE_TOL,
        max_deviation: trace_dev,
    };

    let positivity = positivity_min(map, restarts, subseed(seed, 3))?;
    let commutant = commutant_dim(map);

    let dims = dim_report_for_map(map, samples, subseed(seed, 4))?;
    let spanning_dim = DimCheck {
        measured: dims.measured.p_phi,
        target: dims.targets.p_phi,
    };
    let strong_spanning_dim = DimCheck {
        measured: dims.measured.n_phi,
        target: dims.targets.n_phi,
    };

    let verdict = if unital.ok
        && commutant == 1
        && strong_spanning_dim.measured == strong_spanning_dim.target
    {
        ExposednessVerdict::Supported
    } else {
        ExposednessVerdict::Inconclusive
    };

    Ok(CertificateReport {
        n: map.n(),
        seed,
        unital,
        trace_preserving,
        positivity_min: positivity,
        commutant_dim: commutant,
        spanning_dim,
        strong_spanning_dim,
        exposedness_verdict: verdict,
        restarts,
        samples,
        tolerances: ToleranceTable::default(),
    })
}

fn serialize_state<S: Serializer>(
    state: &Option<CMatrix>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    match state {
        None => serializer.serialize_none(),
        Some(m) => MatrixJson::from_matrix(m).serialize(serializer),
    }
}

/// Outcome of the PPT violation search.
///
/// `found = false` means the search was inconclusive; it is never evidence
/// that no detectable state with positive partial transpose exists.
#[derive(Debug, Clone, Serialize)]
pub struct PptSearchResult {
    pub found: bool,
    #[serde(serialize_with = "serialize_state")]
    pub state: Option<CMatrix>,
    pub witness_value: f64,
    pub ppt_min_eigenvalue: f64,
}

/// Witness-value threshold below which a state counts as detected.
pub const PPT_DETECTION_TOL: f64 = -1e-8;

/// Eigenvalue slack allowed on the partial transpose of a candidate.
pub const PPT_EIGEN_SLACK: f64 = -1e-8;

/// Searches for a state with positive partial transpose on which the
/// witness is negative, by gradient steps on `Tr(W rho)` alternated with
/// projections onto the trace-one positive cone and onto the PPT cone.
///
/// Step size is `0.05 / ||W||_2` with geometric decay `0.999` per step.
/// Candidates are cleaned by pure alternating projections before they are
/// evaluated, so a reported state satisfies the cone constraints to within
/// the stated slacks.
pub fn ppt_violation_search(
    witness: &CMatrix,
    iterations: usize,
    seed: u64,
) -> Result<PptSearchResult> {
    if iterations == 0 {
        return Err(Error::Domain("iterations must be at least 1".into()));
    }
    if !witness.is_square() {
        return Err(Error::Dimension("witness must be square".into()));
    }
    let size = witness.nrows();
    let d = (size as f64).sqrt().round() as usize;
    if d * d != size {
        return Err(Error::Dimension(format!(
            "witness side {size} is not a perfect square"
        )));
    }

    let w = hermitian_part(witness);
    let ev = hermitian_eigenvalues(&w);
    let w_norm = ev.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if w_norm == 0.0 {
        return Ok(PptSearchResult {
            found: false,
            state: None,
            witness_value: 0.0,
            ppt_min_eigenvalue: 0.0,
        });
    }

    let mut rng = rng_from(subseed(seed, 5));
    let mut rho = CMatrix::identity(size, size) * C64::new(1.0 / size as f64, 0.0);
    rho += crate::sampling::gaussian_hermitian(&mut rng, size) * C64::new(0.05 / size as f64, 0.0);
    rho = project_density(&rho);
    rho = project_ppt(&rho, d);

    let eta0 = 0.05 / w_norm;
    let mut eta = eta0;
    let snapshot_every = 1000;

    let mut best_value = f64::INFINITY;
    let mut best_state: Option<CMatrix> = None;
    let mut best_ppt_min = 0.0;

    let evaluate = |rho: &CMatrix,
                        best_value: &mut f64,
                        best_state: &mut Option<CMatrix>,
                        best_ppt_min: &mut f64| {
        let mut c = rho.clone();
        for _ in 0..50 {
            c = project_density(&c);
            c = project_ppt(&c, d);
        }
        c = project_density(&c);
        let value = (&w * &c).trace().re;
        let ppt_min = hermitian_eigenvalues(&partial_transpose(&c, d))[0];
        if value < *best_value && ppt_min >= PPT_EIGEN_SLACK {
            *best_value = value;
            *best_ppt_min = ppt_min;
            *best_state = Some(c);
        }
    };

    for t in 0..iterations {
        rho -= &w * C64::new(eta, 0.0);
        rho = project_density(&rho);
        rho = project_ppt(&rho, d);
        eta *= 0.999;
        if (t + 1) % snapshot_every == 0 {
            evaluate(&rho, &mut best_value, &mut best_state, &mut best_ppt_min);
        }
    }
    evaluate(&rho, &mut best_value, &mut best_state, &mut best_ppt_min);

    let found = best_value < PPT_DETECTION_TOL && best_state.is_some();
    Ok(PptSearchResult {
        found,
        state: if found { best_state } else { None },
        witness_value: if best_value.is_finite() { best_value } else { 0.0 },
        ppt_min_eigenvalue: best_ppt_min,
    })
}

/// Nearest density matrix: clip negative eigenvalues, renormalize trace.
fn project_density(m: &CMatrix) -> CMatrix {
    let h = hermitian_part(m);
    let size = h.nrows();
    let eig = h.symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 1e-300 {
        return CMatrix::identity(size, size) * C64::new(1.0 / size as f64, 0.0);
    }
    reassemble(&eig.eigenvectors, clipped.iter().map(|l| l / total))
}

/// Projection onto the PPT cone: clip the eigenvalues of the partial
/// transpose and transpose back.
fn project_ppt(m: &CMatrix, d: usize) -> CMatrix {
    let g = hermitian_part(&partial_transpose(m, d));
    let eig = g.symmetric_eigen();
    let clipped = reassemble(&eig.eigenvectors, eig.eigenvalues.iter().map(|l| l.max(0.0)));
    partial_transpose(&clipped, d)
}

fn reassemble(vectors: &CMatrix, values: impl Iterator<Item = f64>) -> CMatrix {
    let diag = CVector::from_iterator(vectors.ncols(), values.map(|l| C64::new(l, 0.0)));
    vectors * CMatrix::from_diagonal(&diag) * vectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::choi_witness;
    use crate::sampling::random_unitary;
    use crate::spans::kernel_parallel;

    /// `X -> I Tr(X) / d`: everything commutes with the image.
    struct Depolarizing {
        d: usize,
    }

    impl MatrixMap for Depolarizing {
        fn dim(&self) -> usize {
            self.d
        }
        fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
            CMatrix::identity(self.d, self.d) * (x.trace() / C64::new(self.d as f64, 0.0))
        }
    }

    struct IdentityMap {
        d: usize,
    }

    impl MatrixMap for IdentityMap {
        fn dim(&self) -> usize {
            self.d
        }
        fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
            x.clone()
        }
    }

    /// The map minus a completely positive multiple of the depolarizer;
    /// no longer positive, used as a detection control.
    struct CpSubtracted {
        inner: BlockMap,
        epsilon: f64,
    }

    impl MatrixMap for CpSubtracted {
        fn dim(&self) -> usize {
            self.inner.dim()
        }
        fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
            let d = self.dim();
            self.inner.apply(x).unwrap()
                - CMatrix::identity(d, d) * (x.trace() * C64::new(self.epsilon, 0.0))
        }
    }

    #[test]
    fn commutant_of_the_block_map_is_scalar() {
        for n in [2, 3] {
            let map = BlockMap::new(n).unwrap();
            assert_eq!(commutant_dim(&map), 1, "n={n}");
        }
    }

    #[test]
    fn commutant_of_depolarizing_is_everything() {
        for d in [4, 6] {
            assert_eq!(commutant_dim(&Depolarizing { d }), d * d);
        }
    }

    #[test]
    fn commutant_of_identity_is_scalar() {
        assert_eq!(commutant_dim(&IdentityMap { d: 4 }), 1);
    }

    #[test]
    fn commutant_invariant_under_unitary_conjugation() {
        let mut rng = rng_from(23);
        let map = BlockMap::new(2).unwrap();
        for _ in 0..10 {
            let u = random_unitary(&mut rng, 4);
            let conj = map.conjugate(&u, &u).unwrap();
            assert_eq!(commutant_dim(&conj), 1);
        }
    }

    #[test]
    fn positivity_min_is_near_zero_for_the_map() {
        let map = BlockMap::new(2).unwrap();
        let min = positivity_min(&map, 200, 42).unwrap();
        assert!(
            (-POSITIVITY_WINDOW..=POSITIVITY_WINDOW).contains(&min),
            "positivity minimum {min:.3e} outside window"
        );
    }

    #[test]
    fn positivity_min_detects_a_broken_map() {
        let broken = CpSubtracted {
            inner: BlockMap::new(2).unwrap(),
            epsilon: 0.1,
        };
        let min = positivity_min(&broken, 20, 1).unwrap();
        assert!(min < -1e-3, "broken map minimum {min:.3e} not detected");
    }

    #[test]
    fn objective_vanishes_at_constructed_kernel_points() {
        let map = BlockMap::new(2).unwrap();
        let sigma = crate::matrix::basis_vector(2, 0);
        let phi = crate::matrix::basis_vector(2, 0);
        for pair in kernel_parallel(&sigma, &phi).unwrap() {
            let val = lambda_min_on_pure(&map, pair.x());
            assert!(val.abs() <= 1e-12, "objective at kernel x is {val:.3e}");
        }
    }

    #[test]
    fn positivity_min_rejects_zero_restarts() {
        let map = BlockMap::new(2).unwrap();
        assert!(matches!(
            positivity_min(&map, 0, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn certificate_n2_supported() {
        let report = exposedness_certificate(2, 42).unwrap();
        assert!(report.unital.ok);
        assert!(report.trace_preserving.ok);
        assert_eq!(report.commutant_dim, 1);
        assert_eq!(report.strong_spanning_dim.measured, 60);
        assert_eq!(report.strong_spanning_dim.target, 60);
        assert_eq!(report.spanning_dim.measured, 16);
        assert_eq!(report.exposedness_verdict, ExposednessVerdict::Supported);
    }

    #[test]
    fn certificate_n3_supported() {
        let report = exposedness_certificate(3, 1).unwrap();
        assert_eq!(report.strong_spanning_dim.measured, 210);
        assert_eq!(report.spanning_dim.measured, 36);
        assert_eq!(report.commutant_dim, 1);
        assert_eq!(report.exposedness_verdict, ExposednessVerdict::Supported);
    }

    #[test]
    fn certificate_is_deterministic() {
        let a = exposedness_certificate(2, 42).unwrap();
        let b = exposedness_certificate(2, 42).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn certificate_for_unitarily_conjugated_map() {
        let mut rng = rng_from(29);
        let map = BlockMap::new(2).unwrap();
        let u = random_unitary(&mut rng, 4);
        let v = random_unitary(&mut rng, 4);
        let conj = map.conjugate(&v, &u).unwrap();
        let report = certificate_for_map(&conj, 5, 50, default_samples(2)).unwrap();
        assert!(report.unital.ok);
        assert_eq!(report.commutant_dim, 1);
        assert_eq!(report.exposedness_verdict, ExposednessVerdict::Supported);
    }

    #[test]
    fn ppt_search_on_a_psd_witness_finds_nothing() {
        // A positive semidefinite "witness" has nonnegative expectation on
        // every state, so no violation can exist.
        let d = 4;
        let psd = CMatrix::identity(d * d, d * d) * C64::new(1.0 / (d * d) as f64, 0.0);
        let result = ppt_violation_search(&psd, 2000, 3).unwrap();
        assert!(!result.found);
        assert!(result.state.is_none());
        assert!(result.witness_value >= 0.0 - 1e-12);
    }

    #[test]
    fn ppt_search_validates_inputs() {
        let rect = CMatrix::zeros(3, 4);
        assert!(ppt_violation_search(&rect, 10, 0).is_err());
        let not_square_side = CMatrix::zeros(5, 5);
        assert!(ppt_violation_search(&not_square_side, 10, 0).is_err());
        let ok = CMatrix::zeros(4, 4);
        assert!(matches!(
            ppt_violation_search(&ok, 0, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn ppt_search_detects_for_the_n2_witness_briefly() {
        // Short-budget version of the full search; the acceptance suite
        // runs the stated 50k iterations.
        let w = choi_witness(2).unwrap();
        let result = ppt_violation_search(w.matrix(), 5000, 7).unwrap();
        if result.found {
            let rho = result.state.as_ref().unwrap();
            assert!((rho.trace().re - 1.0).abs() <= 1e-10);
            assert!(hermitian_eigenvalues(rho)[0] >= -1e-10);
            assert!(result.ppt_min_eigenvalue >= PPT_EIGEN_SLACK);
            assert!(result.witness_value < PPT_DETECTION_TOL);
        }
    }
}
