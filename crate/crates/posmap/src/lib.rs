//! Construction and numerical certification of a family of positive maps
//! on the algebra of `2n x 2n` complex matrices (`n >= 2`), built from the
//! reduction map; the `n = 2` member is the Robertson map.
//!
//! The crate provides:
//! * the map family, its GL-conjugates and the Choi-matrix witness
//!   ([`maps`]);
//! * the order-3 tensor subspaces and explicit orthocomplement bases that
//!   control the geometry of the kernel spans ([`subspaces`]);
//! * kernel-pair generators, span tensors and numeric-rank measurements of
//!   the spanned subspaces against closed-form targets ([`spans`]);
//! * certificates for positivity, irreducibility, the spanning properties,
//!   and a search for PPT states the witness detects ([`certify`]).
//!
//! # Index conventions
//!
//! `C^{2n}` is treated as `C^2 (x) C^n` with global index `g = alpha*n + i`
//! (block `alpha` in `{0, 1}`, intra-block `i` in `{0, ..., n-1}`). Order-3
//! tensors over `C^D` store entry `(a, b, c)` at flat index
//! `a*D^2 + b*D + c`. All indices are zero-based; displayed formulas in the
//! docs use the same zero-based convention.
//!
//! # Numerical contract
//!
//! All certificates are floating-point evidence at documented tolerances,
//! not proofs. Every randomized routine takes an explicit 64-bit seed and
//! is deterministic given it.
//!
//! The accepted block sizes are `n >= 2`: at `n = 1` the reduction map on
//! `C^1` is identically zero and the construction degenerates.

pub mod certify;
pub mod error;
pub mod maps;
pub mod matrix;
pub mod sampling;
pub mod spans;
pub mod subspaces;

pub use certify::{
    certificate_for_map, commutant_dim, exposedness_certificate, lambda_min_on_pure,
    positivity_min, ppt_violation_search, CertificateReport, ExposednessVerdict,
    PptSearchResult,
};
pub use error::{Error, Result};
pub use maps::{choi_witness, reduction_map, BlockMap, MatrixMap, Witness};
pub use matrix::{CMatrix, CVector, MatrixJson, C64};
pub use spans::{
    default_samples, dim_report, dim_report_for_map, dim_targets, kernel_generic,
    kernel_orthogonal, kernel_parallel, numeric_rank, span_vector, DimReport, KernelFamily,
    KernelPair, RankTolerance, SpanSet, Verdict,
};
pub use subspaces::{
    decompose_st, f_basis, subspace_projector, v_perp_basis, w_perp_basis, SubspaceLabel,
    SubspaceSpec, Tensor3,
};
