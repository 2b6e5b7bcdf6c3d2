//! Order-3 tensor vectors, the named subspaces of `(C^n)^{(x)3}`, and the
//! explicit orthocomplement bases of the two kernel-span families.
//!
//! Index conventions, used everywhere:
//! * a tensor over `C^D` stores entry `(a, b, c)` at flat index
//!   `a*D^2 + b*D + c`;
//! * `C^{2n}` splits as `C^2 (x) C^n` with global index `g = alpha*n + i`,
//!   so `(C^{2n})^{(x)3}` regroups as `(C^2)^{(x)3} (x) (C^n)^{(x)3}`.
//!
//! All indices are zero-based.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{C64, CMatrix, CVector, cone};

/// A vector in `(C^D)^{(x)3}` tagged with its factor dimension `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    factor_dim: usize,
    data: CVector,
}

impl Tensor3 {
    pub fn zeros(factor_dim: usize) -> Self {
        Tensor3 {
            factor_dim,
            data: CVector::zeros(factor_dim.pow(3)),
        }
    }

    /// Wraps a flat vector of length `D^3`; entries must be finite.
    pub fn from_vector(factor_dim: usize, data: CVector) -> Result<Self> {
        if data.len() != factor_dim.pow(3) {
            return Err(Error::Dimension(format!(
                "tensor over C^{factor_dim} needs {} entries, got {}",
                factor_dim.pow(3),
                data.len()
            )));
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("tensor entries must be finite".into()));
        }
        Ok(Tensor3 { factor_dim, data })
    }

    /// Basis tensor `e_a (x) e_b (x) e_c`.
    pub fn basis(factor_dim: usize, a: usize, b: usize, c: usize) -> Self {
        let mut t = Tensor3::zeros(factor_dim);
        let idx = t.flat(a, b, c);
        t.data[idx] = cone();
        t
    }

    /// Product tensor `u (x) v (x) w` of three equal-length vectors.
    pub fn product(u: &CVector, v: &CVector, w: &CVector) -> Result<Self> {
        let d = u.len();
        if v.len() != d || w.len() != d {
            return Err(Error::Dimension(format!(
                "product tensor needs equal factor lengths, got {}, {}, {}",
                u.len(),
                v.len(),
                w.len()
            )));
        }
        let mut t = Tensor3::zeros(d);
        for a in 0..d {
            if u[a] == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..d {
                let ab = u[a] * v[b];
                if ab == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    t.data[a * d * d + b * d + c] = ab * w[c];
                }
            }
        }
        Ok(t)
    }

    pub fn factor_dim(&self) -> usize {
        self.factor_dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.len() == 0
    }

    pub fn flat(&self, a: usize, b: usize, c: usize) -> usize {
        let d = self.factor_dim;
        a * d * d + b * d + c
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> C64 {
        self.data[self.flat(a, b, c)]
    }

    pub fn add_at(&mut self, a: usize, b: usize, c: usize, value: C64) {
        let idx = self.flat(a, b, c);
        self.data[idx] += value;
    }

    pub fn as_vector(&self) -> &CVector {
        &self.data
    }

    pub fn into_vector(self) -> CVector {
        self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// Hermitian inner product `<self | other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Tensor3) -> C64 {
        assert_eq!(self.factor_dim, other.factor_dim, "factor dim mismatch");
        self.data.dotc(&other.data)
    }

    pub fn normalized(&self) -> Tensor3 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero tensor");
        Tensor3 {
            factor_dim: self.factor_dim,
            data: &self.data / C64::new(n, 0.0),
        }
    }
}

impl std::ops::Add for &Tensor3 {
    type Output = Tensor3;
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.factor_dim, rhs.factor_dim, "factor dim mismatch");
        Tensor3 {
            factor_dim: self.factor_dim,
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &Tensor3 {
    type Output = Tensor3;
    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        assert_eq!(self.factor_dim, rhs.factor_dim, "factor dim mismatch");
        Tensor3 {
            factor_dim: self.factor_dim,
            data: &self.data - &rhs.data,
        }
    }
}

/// The named subspaces of `(C^n)^{(x)3}`.
///
/// Membership conditions on coordinates `Psi_ijk`:
/// * `S123`: invariant under every permutation of `(i, j, k)`;
/// * `S23`:  `Psi_ijk =  Psi_ikj`;
/// * `A23`:  `Psi_ijk = -Psi_ikj`;
/// * `T13`:  `sum_i Psi_iji = 0` for every `j`;
/// * `I13`:  `Psi_ijk = lambda_j delta_ik`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceLabel {
    S123,
    S23,
    A23,
    T13,
    I13,
}

impl FromStr for SubspaceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S123" => Ok(SubspaceLabel::S123),
            "S23" => Ok(SubspaceLabel::S23),
            "A23" => Ok(SubspaceLabel::A23),
            "T13" => Ok(SubspaceLabel::T13),
            "I13" => Ok(SubspaceLabel::I13),
            other => Err(Error::Domain(format!("unknown subspace label: {other}"))),
        }
    }
}

/// A named subspace at a given `n`, with its closed-form dimension.
#[derive(Debug, Clone, Copy)]
pub struct SubspaceSpec {
    pub label: SubspaceLabel,
    pub n: usize,
    pub expected_dim: usize,
}

impl SubspaceSpec {
    pub fn new(label: SubspaceLabel, n: usize) -> Self {
        let expected_dim = match label {
            SubspaceLabel::S123 => n * (n + 1) * (n + 2) / 6,
            SubspaceLabel::S23 => n * n * (n + 1) / 2,
            SubspaceLabel::A23 => n * n * (n - 1) / 2,
            SubspaceLabel::T13 => n * (n * n - 1),
            SubspaceLabel::I13 => n,
        };
        SubspaceSpec { label, n, expected_dim }
    }
}

/// Permutation operator on `(C^n)^{(x)3}` sending
/// `e_{a_0} (x) e_{a_1} (x) e_{a_2}` to the basis tensor whose factor at
/// position `p` is `e_{a_{sigma[p]}}`.
fn permutation_operator(n: usize, sigma: [usize; 3]) -> CMatrix {
    let dim = n.pow(3);
    let mut m = CMatrix::zeros(dim, dim);
    for a0 in 0..n {
        for a1 in 0..n {
            for a2 in 0..n {
                let src = a0 * n * n + a1 * n + a2;
                let idx = [a0, a1, a2];
                let dst = idx[sigma[0]] * n * n + idx[sigma[1]] * n + idx[sigma[2]];
                m[(dst, src)] += cone();
            }
        }
    }
    m
}

/// Orthogonal projector of `(C^n)^{(x)3}` onto the named subspace.
pub fn subspace_projector(spec: &SubspaceSpec) -> CMatrix {
    let n = spec.n;
    let dim = n.pow(3);
    match spec.label {
        SubspaceLabel::S123 => {
            let perms: [[usize; 3]; 6] = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            let mut p = CMatrix::zeros(dim, dim);
            for sigma in perms {
                p += permutation_operator(n, sigma);
            }
            p * C64::new(1.0 / 6.0, 0.0)
        }
        SubspaceLabel::S23 => {
            let swap = permutation_operator(n, [0, 2, 1]);
            (CMatrix::identity(dim, dim) + swap) * C64::new(0.5, 0.0)
        }
        SubspaceLabel::A23 => {
            let swap = permutation_operator(n, [0, 2, 1]);
            (CMatrix::identity(dim, dim) - swap) * C64::new(0.5, 0.0)
        }
        SubspaceLabel::I13 => i13_projector(n),
        SubspaceLabel::T13 => CMatrix::identity(dim, dim) - i13_projector(n),
    }
}

fn i13_projector(n: usize) -> CMatrix {
    // Spanned by t_j = sum_i e_i (x) e_j (x) e_i, each of norm sqrt(n).
    let dim = n.pow(3);
    let mut p = CMatrix::zeros(dim, dim);
    let scale = C64::new(1.0 / n as f64, 0.0);
    for j in 0..n {
        let mut t = CVector::zeros(dim);
        for i in 0..n {
            t[i * n * n + j * n + i] = cone();
        }
        p += &t * t.adjoint() * scale;
    }
    p
}

/// Splits a tensor over `C^n` into a totally symmetric part and a part with
/// vanishing 1-3 partial trace.
///
/// The symmetric part is diagonal: `A_iii = sum_m Psi_mim`, zero elsewhere.
/// The remainder `B = Psi - A` then satisfies `sum_i B_iji = 0` for every
/// `j`, and `A + B = Psi` exactly. The split is not unique; this is the
/// canonical one used throughout the crate.
pub fn decompose_st(psi: &Tensor3) -> (Tensor3, Tensor3) {
    let n = psi.factor_dim();
    let mut a = Tensor3::zeros(n);
    for i in 0..n {
        let mut sum = C64::new(0.0, 0.0);
        for m in 0..n {
            sum += psi.get(m, i, m);
        }
        a.add_at(i, i, i, sum);
    }
    let b = psi - &a;
    (a, b)
}

/// The eight-vector basis of `(C^2)^{(x)3}` and its (unnormalized-duality)
/// dual family, satisfying `<f*_k | f_l> = 0` for `k != l`.
///
/// Kets `|abc>` sit at flat index `4a + 2b + c`.
pub fn f_basis() -> (Vec<Tensor3>, Vec<Tensor3>) {
    let ket = |bits: [usize; 3]| Tensor3::basis(2, bits[0], bits[1], bits[2]);
    let lin = |terms: &[(f64, [usize; 3])], scale: f64| {
        let mut t = Tensor3::zeros(2);
        for (coeff, bits) in terms {
            t.add_at(bits[0], bits[1], bits[2], C64::new(coeff * scale, 0.0));
        }
        t
    };
    let s3 = 1.0 / 3f64.sqrt();
    let s6 = 1.0 / 6f64.sqrt();
    let s2 = 1.0 / 2f64.sqrt();

    let f = vec![
        ket([0, 0, 0]),
        ket([1, 1, 1]),
        lin(&[(1.0, [0, 0, 1]), (1.0, [1, 0, 0]), (1.0, [0, 1, 0])], s3),
        lin(&[(1.0, [1, 1, 0]), (1.0, [0, 1, 1]), (1.0, [1, 0, 1])], s3),
        lin(&[(1.0, [0, 1, 0]), (1.0, [0, 0, 1]), (-2.0, [1, 0, 0])], s6),
        lin(&[(1.0, [1, 0, 1]), (1.0, [1, 1, 0]), (-2.0, [0, 1, 1])], s6),
        lin(&[(1.0, [0, 0, 1]), (1.0, [1, 0, 0]), (-2.0, [0, 1, 0])], s6),
        lin(&[(1.0, [1, 1, 0]), (1.0, [0, 1, 1]), (-2.0, [1, 0, 1])], s6),
    ];
    let f_dual = vec![
        ket([0, 0, 0]),
        ket([1, 1, 1]),
        lin(&[(1.0, [0, 0, 1]), (1.0, [1, 0, 0]), (1.0, [0, 1, 0])], s3),
        lin(&[(1.0, [1, 1, 0]), (1.0, [0, 1, 1]), (1.0, [1, 0, 1])], s3),
        lin(&[(1.0, [0, 0, 1]), (-1.0, [1, 0, 0])], s2),
        lin(&[(1.0, [1, 1, 0]), (-1.0, [0, 1, 1])], s2),
        lin(&[(1.0, [0, 1, 0]), (-1.0, [0, 0, 1])], s2),
        lin(&[(1.0, [1, 0, 1]), (-1.0, [1, 1, 0])], s2),
    ];
    (f, f_dual)
}

/// Global index of `e_i` placed in block `alpha` of `C^{2n} = C^n (+) C^n`.
pub fn block_index(n: usize, alpha: usize, i: usize) -> usize {
    debug_assert!(alpha < 2 && i < n);
    alpha * n + i
}

/// Embeds `f (x) t` with `f` over `C^2` and `t` over `C^n` into a tensor
/// over `C^{2n}`, realizing the regrouping
/// `(C^2)^{(x)3} (x) (C^n)^{(x)3} = (C^{2n})^{(x)3}`.
pub fn embed_block_tensor(n: usize, f: &Tensor3, t: &Tensor3) -> Result<Tensor3> {
    if f.factor_dim() != 2 || t.factor_dim() != n {
        return Err(Error::Dimension(format!(
            "expected factor dims (2, {n}), got ({}, {})",
            f.factor_dim(),
            t.factor_dim()
        )));
    }
    let mut out = Tensor3::zeros(2 * n);
    for a1 in 0..2 {
        for a2 in 0..2 {
            for a3 in 0..2 {
                let fv = f.get(a1, a2, a3);
                if fv == C64::new(0.0, 0.0) {
                    continue;
                }
                for i1 in 0..n {
                    for i2 in 0..n {
                        for i3 in 0..n {
                            let tv = t.get(i1, i2, i3);
                            if tv == C64::new(0.0, 0.0) {
                                continue;
                            }
                            out.add_at(
                                block_index(n, a1, i1),
                                block_index(n, a2, i2),
                                block_index(n, a3, i3),
                                fv * tv,
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Orthocomplement basis of the parallel-family span in `(C^{2n})^{(x)3}`:
/// `n^2(n-1)` four-term signed vectors plus `2n` summed vectors, in total
/// `n^3 - n^2 + 2n` elements.
pub fn w_perp_basis(n: usize) -> Result<Vec<Tensor3>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "orthocomplement basis needs n >= 2, got {n}"
        )));
    }
    let one = cone();
    let b = |alpha: usize, i: usize| block_index(n, alpha, i);
    let mut out = Vec::with_capacity(n * n * (n - 1) + 2 * n);

    // u_ijk: first factor alternates between the blocks, last two factors
    // antisymmetrized over (j, k).
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                let mut u = Tensor3::zeros(2 * n);
                u.add_at(b(0, i), b(0, j), b(1, k), one);
                u.add_at(b(0, i), b(0, k), b(1, j), -one);
                u.add_at(b(1, i), b(0, j), b(0, k), -one);
                u.add_at(b(1, i), b(0, k), b(0, j), one);
                out.push(u);
            }
        }
    }
    // v_ijk: the block-swapped counterpart.
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                let mut v = Tensor3::zeros(2 * n);
                v.add_at(b(1, i), b(1, j), b(0, k), one);
                v.add_at(b(1, i), b(1, k), b(0, j), -one);
                v.add_at(b(0, i), b(1, j), b(1, k), -one);
                v.add_at(b(0, i), b(1, k), b(1, j), one);
                out.push(v);
            }
        }
    }
    // r_i and s_i: traced over the repeated factor.
    for i in 0..n {
        let mut r = Tensor3::zeros(2 * n);
        for j in 0..n {
            r.add_at(b(0, j), b(1, i), b(0, j), one);
            r.add_at(b(0, j), b(0, i), b(1, j), -one);
        }
        out.push(r);
    }
    for i in 0..n {
        let mut s = Tensor3::zeros(2 * n);
        for j in 0..n {
            s.add_at(b(1, j), b(0, i), b(1, j), one);
            s.add_at(b(1, j), b(1, i), b(0, j), -one);
        }
        out.push(s);
    }
    Ok(out)
}

/// Orthocomplement basis of the orthogonal-family span in
/// `(C^{2n})^{(x)3}`: `n^3 - n^2 + 6n` linearly independent vectors.
///
/// Two further candidate families are linear combinations of these and are
/// deliberately not returned.
pub fn v_perp_basis(n: usize) -> Result<Vec<Tensor3>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "orthocomplement basis needs n >= 2, got {n}"
        )));
    }
    let one = cone();
    let b = |alpha: usize, i: usize| block_index(n, alpha, i);
    let mut out = Vec::with_capacity(n * n * (n - 1) + 6 * n);

    // a_ijk = e_i^(1) (x) [antisymmetrized mixed-block pair over (j, k)].
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                let mut a = Tensor3::zeros(2 * n);
                a.add_at(b(0, i), b(0, j), b(1, k), one);
                a.add_at(b(0, i), b(0, k), b(1, j), -one);
                a.add_at(b(0, i), b(1, j), b(0, k), one);
                a.add_at(b(0, i), b(1, k), b(0, j), -one);
                out.push(a);
            }
        }
    }
    // b_ijk: same bracket with the first factor in the second block.
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                let mut v = Tensor3::zeros(2 * n);
                v.add_at(b(1, i), b(0, j), b(1, k), one);
                v.add_at(b(1, i), b(0, k), b(1, j), -one);
                v.add_at(b(1, i), b(1, j), b(0, k), one);
                v.add_at(b(1, i), b(1, k), b(0, j), -one);
                out.push(v);
            }
        }
    }
    // c^(1..4)_k: diagonal sums over mixed block pairs.
    for (alpha, beta, gamma) in [(0, 1, 0), (1, 0, 0), (0, 1, 1), (1, 0, 1)] {
        for k in 0..n {
            let mut c = Tensor3::zeros(2 * n);
            for j in 0..n {
                c.add_at(b(alpha, j), b(beta, j), b(gamma, k), one);
            }
            out.push(c);
        }
    }
    // d^(1)_k and d^(2)_k: symmetrized repeated-index sums.
    for gamma in [0, 1] {
        for k in 0..n {
            let mut d = Tensor3::zeros(2 * n);
            for j in 0..n {
                d.add_at(b(1, j), b(gamma, k), b(0, j), one);
                d.add_at(b(0, j), b(gamma, k), b(1, j), one);
            }
            out.push(d);
        }
    }
    Ok(out)
}
