//! Property-based checks of the algebraic invariants: linearity, trace and
//! hermiticity preservation, the pure-state shortcut, the symmetric/trace
//! split, span-tensor identities and rank monotonicity.

use nalgebra::DVector;
use proptest::prelude::*;

use posmap::matrix::{hermitian_part, is_hermitian, max_abs, max_abs_diff, outer, partial_transpose};
use posmap::spans::{kron_vec, rank_of_rows};
use posmap::{
    decompose_st, numeric_rank, reduction_map, span_vector, BlockMap, CMatrix, CVector,
    RankTolerance, Tensor3, C64,
};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn cvector(len: usize) -> impl Strategy<Value = CVector> {
    prop::collection::vec(complex(), len).prop_map(DVector::from_vec)
}

fn cmatrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), rows * cols)
        .prop_map(move |v| CMatrix::from_vec(rows, cols, v))
}

proptest! {
    #[test]
    fn reduction_map_closed_form_2x2(a in complex(), b in complex(), c in complex(), d in complex()) {
        let m = CMatrix::from_row_slice(2, 2, &[a, b, c, d]);
        let r = reduction_map(&m).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[d, -b, -c, a]);
        prop_assert!(max_abs_diff(&r, &expected) <= 1e-14);
    }

    #[test]
    fn map_is_linear(x in cmatrix(4, 4), y in cmatrix(4, 4), alpha in complex(), beta in complex()) {
        let map = BlockMap::new(2).unwrap();
        let lhs = map.apply(&(&x * alpha + &y * beta)).unwrap();
        let rhs = map.apply(&x).unwrap() * alpha + map.apply(&y).unwrap() * beta;
        prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-12 * max_abs(&lhs).max(1.0));
    }

    #[test]
    fn map_preserves_trace(n in 2usize..=4, entries in prop::collection::vec(complex(), 64)) {
        let d = 2 * n;
        let x = CMatrix::from_fn(d, d, |i, j| entries[(i * d + j) % entries.len()]);
        let map = BlockMap::new(n).unwrap();
        let y = map.apply(&x).unwrap();
        let dev = (y.trace() - x.trace()).norm();
        prop_assert!(dev <= 1e-10 * x.trace().norm().max(1.0));
    }

    #[test]
    fn map_preserves_hermiticity(x in cmatrix(6, 6)) {
        let h = hermitian_part(&x);
        let map = BlockMap::new(3).unwrap();
        let y = map.apply(&h).unwrap();
        prop_assert!(is_hermitian(&y, 1e-12));
    }

    #[test]
    fn pure_shortcut_matches_matrix_path(x in cvector(6)) {
        prop_assume!(x.norm() > 1e-3);
        let map = BlockMap::new(3).unwrap();
        let via_pure = map.apply_to_pure(&x).unwrap();
        let via_matrix = map.apply(&outer(&x, &x)).unwrap();
        prop_assert!(max_abs_diff(&via_pure, &via_matrix) <= 1e-12 * max_abs(&via_matrix).max(1.0));
    }

    #[test]
    fn symmetric_trace_split_is_exact(entries in prop::collection::vec(complex(), 27)) {
        let psi = Tensor3::from_vector(3, DVector::from_vec(entries)).unwrap();
        let (a, b) = decompose_st(&psi);
        let sum = &a + &b;
        prop_assert!((&sum - &psi).norm() <= 1e-12 * psi.norm().max(1.0));
        // The symmetric part lives on the diagonal only.
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    if !(i == j && j == k) {
                        prop_assert!(a.get(i, j, k).norm() == 0.0);
                    }
                }
            }
        }
        // The remainder has vanishing 1-3 partial trace.
        for j in 0..3 {
            let mut tr = C64::new(0.0, 0.0);
            for i in 0..3 {
                tr += b.get(i, j, i);
            }
            prop_assert!(tr.norm() <= 1e-12 * psi.norm().max(1.0));
        }
    }

    #[test]
    fn span_tensor_norm_and_phase(x in cvector(4), y in cvector(4), theta in 0.0..std::f64::consts::TAU) {
        prop_assume!(x.norm() > 1e-3 && y.norm() > 1e-3);
        let t = span_vector(&x, &y).unwrap();
        let expected = x.norm() * x.norm() * y.norm();
        prop_assert!((t.norm() - expected).abs() <= 1e-10 * expected);

        let phase = C64::new(theta.cos(), theta.sin());
        let t2 = span_vector(&(&x * phase), &y).unwrap();
        prop_assert!((&t2 - &t).norm() <= 1e-10 * t.norm());
    }

    #[test]
    fn rank_is_monotone_under_more_vectors(
        head in prop::collection::vec(cvector(8), 1..5),
        tail in prop::collection::vec(cvector(8), 1..5),
    ) {
        let tol = RankTolerance::default();
        let head_refs: Vec<&CVector> = head.iter().collect();
        let (rank_head, _, _) = rank_of_rows(&head_refs, tol).unwrap();
        let all_refs: Vec<&CVector> = head.iter().chain(tail.iter()).collect();
        let (rank_all, _, _) = rank_of_rows(&all_refs, tol).unwrap();
        prop_assert!(rank_all >= rank_head);
        prop_assert!(rank_all <= all_refs.len().min(8));
    }

    #[test]
    fn rank_bounded_by_count_and_length(vectors in prop::collection::vec(cvector(8), 1..12)) {
        let set = numeric_rank(vectors.clone(), RankTolerance::default()).unwrap();
        prop_assert!(set.rank <= vectors.len().min(8));
        prop_assert_eq!(
            set.rank,
            set.singular_values.iter().filter(|&&s| s > set.tolerance).count()
        );
    }

    #[test]
    fn kron_indexing(a in cvector(3), b in cvector(4)) {
        let k = kron_vec(&a, &b);
        prop_assert_eq!(k.len(), 12);
        for i in 0..3 {
            for j in 0..4 {
                prop_assert!((k[i * 4 + j] - a[i] * b[j]).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn partial_transpose_is_a_trace_preserving_involution(x in cmatrix(9, 9)) {
        let t = partial_transpose(&x, 3);
        prop_assert!((t.trace() - x.trace()).norm() <= 1e-13);
        let back = partial_transpose(&t, 3);
        prop_assert!(max_abs_diff(&back, &x) == 0.0);
    }
}
