//! Canonical forms: the orthonormal eigenbasis of the swap operator (and of
//! the quaternionic signature), basis change to diagonal signature matrices,
//! block extraction, semidirect structure, dimension formulas, invertibility
//! and structured random sampling.
//!
//! For an n x n complex or real block the basis is, in order: the normalized
//! diagonal sum, the Helmert completion of the diagonal, the symmetric
//! off-diagonal pairs, the antisymmetric pairs. The swap operator then
//! becomes `diag(+1 ... +1, -1 ... -1)` with multiplicities n(n+1)/2 and
//! n(n-1)/2. Quaternionic blocks tensor this n-side basis with the four
//! 2x2-side vectors and reorder into the four joint sign classes
//! `(+,-), (-,+), (-,-), (+,+)` of sizes n^2, n(n-1), n^2, n(n+1), the
//! fixed vector first.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::algebra::AlgebraDescriptor;
use crate::error::{PertError, Result};
use crate::matalg::{FieldTag, Matrix};
use crate::pert::PertMatrix;

/// Ordered real orthonormal eigenbasis for a single-block algebra.
#[derive(Clone, Debug)]
pub struct CanonicalBasis {
    algebra: AlgebraDescriptor,
    /// Columns are the basis vectors; real orthogonal.
    q: Matrix,
    /// Swap-operator eigenvalue of each column.
    omega_diag: Vec<f64>,
    /// Quaternionic signature eigenvalue per column (H blocks only).
    extra_diag: Option<Vec<f64>>,
}

impl CanonicalBasis {
    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn omega_diag(&self) -> &[f64] {
        &self.omega_diag
    }

    pub fn extra_diag(&self) -> Option<&[f64]> {
        self.extra_diag.as_deref()
    }

    /// `Q^T m Q`.
    pub fn to_canonical(&self, m: &Matrix) -> Matrix {
        self.q.transpose().matmul(m).matmul(&self.q)
    }

    /// `Q a Q^T`.
    pub fn from_canonical(&self, a: &Matrix) -> Matrix {
        self.q.matmul(a).matmul(&self.q.transpose())
    }
}

/// Builds (and memoizes) the canonical basis of a single-block algebra.
pub fn build_basis(algebra: &AlgebraDescriptor) -> Result<Arc<CanonicalBasis>> {
    if !algebra.is_single_block() {
        return Err(PertError::UnsupportedAlgebra(format!(
            "canonical bases are per block; split {algebra} first"
        )));
    }
    static CACHE: OnceLock<Mutex<HashMap<AlgebraDescriptor, Arc<CanonicalBasis>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(found) = cache.lock().unwrap().get(algebra) {
        return Ok(Arc::clone(found));
    }
    let block = algebra.blocks()[0];
    let basis = match block.field {
        FieldTag::C | FieldTag::R => build_basis_cr(algebra.clone(), block.n),
        FieldTag::H => build_basis_h(algebra.clone(), block.n),
    };
    let arc = Arc::new(basis);
    Ok(cache
        .lock()
        .unwrap()
        .entry(algebra.clone())
        .or_insert(arc)
        .clone())
}

/// Real basis columns for the n-side: diagonal sum, Helmert vectors,
/// symmetric pairs, antisymmetric pairs. Returned as real column vectors of
/// length n^2 with their swap eigenvalues.
fn side_columns(n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut cols = Vec::with_capacity(n * n);
    let mut omega = Vec::with_capacity(n * n);

    let mut u1 = vec![0.0; n * n];
    let inv = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        u1[i * n + i] = inv;
    }
    cols.push(u1);
    omega.push(1.0);

    for k in 2..=n {
        let mut h = vec![0.0; n * n];
        let norm = ((k * (k - 1)) as f64).sqrt();
        for i in 0..k - 1 {
            h[i * n + i] = 1.0 / norm;
        }
        h[(k - 1) * n + (k - 1)] = -((k - 1) as f64) / norm;
        cols.push(h);
        omega.push(1.0);
    }

    let inv2 = 1.0 / 2f64.sqrt();
    for i in 0..n {
        for j in i + 1..n {
            let mut s = vec![0.0; n * n];
            s[i * n + j] = inv2;
            s[j * n + i] = inv2;
            cols.push(s);
            omega.push(1.0);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut s = vec![0.0; n * n];
            s[i * n + j] = inv2;
            s[j * n + i] = -inv2;
            cols.push(s);
            omega.push(-1.0);
        }
    }
    (cols, omega)
}

fn build_basis_cr(algebra: AlgebraDescriptor, n: usize) -> CanonicalBasis {
    let (cols, omega) = side_columns(n);
    let d2 = n * n;
    let q = Matrix::from_fn(d2, d2, |i, j| Complex64::new(cols[j][i], 0.0));
    CanonicalBasis {
        algebra,
        q,
        omega_diag: omega,
        extra_diag: None,
    }
}

/// The 2x2-side vectors of a quaternionic block with their
/// (swap, signature) eigenvalue pairs.
fn two_side_columns() -> ([[f64; 4]; 4], [f64; 4], [f64; 4]) {
    let r = 1.0 / 2f64.sqrt();
    let f = [
        [r, 0.0, 0.0, r],  // e1(x)e1 + e2(x)e2
        [r, 0.0, 0.0, -r], // e1(x)e1 - e2(x)e2
        [0.0, r, r, 0.0],  // e1(x)e2 + e2(x)e1
        [0.0, r, -r, 0.0], // e1(x)e2 - e2(x)e1
    ];
    let omega2 = [1.0, 1.0, 1.0, -1.0];
    let l2 = [-1.0, 1.0, 1.0, -1.0];
    (f, omega2, l2)
}

fn build_basis_h(algebra: AlgebraDescriptor, n: usize) -> CanonicalBasis {
    let d = 2 * n;
    let d2 = d * d;
    let (side, omega_n) = side_columns(n);
    let (f, omega2, l2) = two_side_columns();

    // joint sign classes in the canonical order
    let classes = [(1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, 1.0)];
    let mut buckets: [Vec<Vec<f64>>; 4] = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for (w_idx, w) in side.iter().enumerate() {
        for m in 0..4 {
            // natural pair index p = (2i+s)*d + (2k+t); the column is the
            // un-shuffled tensor of the n-side vector with the 2-side vector
            let mut col = vec![0.0; d2];
            for i in 0..n {
                for k in 0..n {
                    let wv = w[i * n + k];
                    if wv == 0.0 {
                        continue;
                    }
                    for s in 0..2 {
                        for t in 0..2 {
                            let p = (2 * i + s) * d + (2 * k + t);
                            col[p] = wv * f[m][s * 2 + t];
                        }
                    }
                }
            }
            let key = (omega_n[w_idx] * omega2[m], l2[m]);
            let class = classes.iter().position(|&c| c == key).expect("sign class");
            buckets[class].push(col);
        }
    }
    let sizes = [n * n, n * (n - 1), n * n, n * (n + 1)];
    debug_assert!(buckets.iter().zip(sizes).all(|(b, s)| b.len() == s));

    let mut cols = Vec::with_capacity(d2);
    let mut omega_diag = Vec::with_capacity(d2);
    let mut l_diag = Vec::with_capacity(d2);
    for (class, bucket) in buckets.iter().enumerate() {
        for col in bucket {
            cols.push(col.clone());
            omega_diag.push(classes[class].0);
            l_diag.push(classes[class].1);
        }
    }
    let q = Matrix::from_fn(d2, d2, |i, j| Complex64::new(cols[j][i], 0.0));
    CanonicalBasis {
        algebra,
        q,
        omega_diag,
        extra_diag: Some(l_diag),
    }
}

/// Signature of the vector/matrix factor of a complex block: +1 on the
/// symmetric part without the fixed direction, -1 on the antisymmetric part.
pub fn omega_prime_signs(n: usize) -> Vec<f64> {
    let plus = (n + 2) * (n - 1) / 2;
    let minus = n * (n - 1) / 2;
    std::iter::repeat_n(1.0, plus)
        .chain(std::iter::repeat_n(-1.0, minus))
        .collect()
}

/// Signature of the vector/matrix factor of a quaternionic block.
pub fn psi_prime_signs(n: usize) -> Vec<f64> {
    let plus = n * n - 1;
    let minus = n * (n - 1);
    std::iter::repeat_n(1.0, plus)
        .chain(std::iter::repeat_n(-1.0, minus))
        .collect()
}

/// Signature of the square factor of a quaternionic block. Sizes n^2 and
/// n(n+1) are forced by the joint sign classes.
pub fn theta_prime_signs(n: usize) -> Vec<f64> {
    let minus = n * n;
    let plus = n * (n + 1);
    std::iter::repeat_n(-1.0, minus)
        .chain(std::iter::repeat_n(1.0, plus))
        .collect()
}

/// Extracted blocks of a canonical form.
#[derive(Clone, Debug)]
pub enum CanonicalBlocks {
    Complex { v: Vec<Complex64>, b: Matrix },
    Real { v1: Vec<f64>, b1: Matrix, b2: Matrix },
    Quaternionic { v: Vec<Complex64>, b: Matrix, c: Matrix },
}

impl CanonicalBlocks {
    pub fn case(&self) -> FieldTag {
        match self {
            CanonicalBlocks::Complex { .. } => FieldTag::C,
            CanonicalBlocks::Real { .. } => FieldTag::R,
            CanonicalBlocks::Quaternionic { .. } => FieldTag::H,
        }
    }
}

/// Basis-changed member with extracted blocks.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    algebra: AlgebraDescriptor,
    basis: Arc<CanonicalBasis>,
    a_canonical: Matrix,
    blocks: CanonicalBlocks,
    pattern_residual: f64,
}

impl CanonicalForm {
    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn basis(&self) -> &CanonicalBasis {
        &self.basis
    }

    pub fn a_canonical(&self) -> &Matrix {
        &self.a_canonical
    }

    pub fn blocks(&self) -> &CanonicalBlocks {
        &self.blocks
    }

    /// Max deviation from the canonical zero/reality pattern.
    pub fn pattern_residual(&self) -> f64 {
        self.pattern_residual
    }
}

/// Brings a member into the canonical basis and extracts its blocks.
pub fn canonicalize(m: &PertMatrix, tol: f64) -> Result<CanonicalForm> {
    let algebra = m.algebra().clone();
    if !algebra.is_single_block() {
        return Err(PertError::UnsupportedAlgebra(format!(
            "canonical forms are per block; split {algebra} first"
        )));
    }
    let res = m.membership_residual();
    if res > tol {
        return Err(PertError::NotAMember { residual: res });
    }
    let basis = build_basis(&algebra)?;
    let a = basis.to_canonical(m.mat());
    let n = algebra.blocks()[0].n;
    let field = algebra.blocks()[0].field;

    let mut pat = 0.0f64;
    // first column must be e1 in every case
    pat = pat.max((a.get(0, 0) - Complex64::new(1.0, 0.0)).norm());
    for i in 1..a.rows() {
        pat = pat.max(a.get(i, 0).norm());
    }

    let blocks = match field {
        FieldTag::C => {
            let k = n * n - 1;
            let signs = omega_prime_signs(n);
            let v: Vec<Complex64> = (0..k).map(|j| a.get(0, 1 + j)).collect();
            let b = a.block(1, 1 + k, 1, 1 + k);
            for (j, &s) in signs.iter().enumerate() {
                pat = pat.max(reality_violation(v[j], s > 0.0));
            }
            for r in 0..k {
                for c in 0..k {
                    pat = pat.max(reality_violation(b.get(r, c), signs[r] * signs[c] > 0.0));
                }
            }
            CanonicalBlocks::Complex { v, b }
        }
        FieldTag::R => {
            let s = (n + 2) * (n - 1) / 2;
            let anti = n * (n - 1) / 2;
            let v1: Vec<f64> = (0..s).map(|j| a.get(0, 1 + j).re).collect();
            let b1 = a.block(1, 1 + s, 1, 1 + s);
            let b2 = a.block(1 + s, 1 + s + anti, 1 + s, 1 + s + anti);
            // everything is real
            for z in a.entries() {
                pat = pat.max(z.im.abs());
            }
            // zero blocks: v over the antisymmetric part, both off-diagonal
            // couplings of B1 and B2
            for j in 0..anti {
                pat = pat.max(a.get(0, 1 + s + j).norm());
            }
            for r in 0..s {
                for c in 0..anti {
                    pat = pat.max(a.get(1 + r, 1 + s + c).norm());
                    pat = pat.max(a.get(1 + s + c, 1 + r).norm());
                }
            }
            CanonicalBlocks::Real { v1, b1, b2 }
        }
        FieldTag::H => {
            let k = (2 * n + 1) * (n - 1);
            let t = n * (2 * n + 1);
            let psi = psi_prime_signs(n);
            let theta = theta_prime_signs(n);
            let v: Vec<Complex64> = (0..k).map(|j| a.get(0, 1 + j)).collect();
            let b = a.block(1, 1 + k, 1, 1 + k);
            let c = a.block(1 + k, 1 + k + t, 1 + k, 1 + k + t);
            for (j, &s) in psi.iter().enumerate() {
                pat = pat.max(reality_violation(v[j], s > 0.0));
            }
            for r in 0..k {
                for cc in 0..k {
                    pat = pat.max(reality_violation(b.get(r, cc), psi[r] * psi[cc] > 0.0));
                }
            }
            for r in 0..t {
                for cc in 0..t {
                    pat = pat.max(reality_violation(c.get(r, cc), theta[r] * theta[cc] > 0.0));
                }
            }
            // zero couplings between the (1, v, B) sector and the C sector
            for j in 0..t {
                pat = pat.max(a.get(0, 1 + k + j).norm());
            }
            for r in 0..k {
                for cc in 0..t {
                    pat = pat.max(a.get(1 + r, 1 + k + cc).norm());
                    pat = pat.max(a.get(1 + k + cc, 1 + r).norm());
                }
            }
            CanonicalBlocks::Quaternionic { v, b, c }
        }
    };
    if pat > tol {
        return Err(PertError::CanonicalStructureViolated { residual: pat });
    }
    Ok(CanonicalForm {
        algebra,
        basis,
        a_canonical: a,
        blocks,
        pattern_residual: pat,
    })
}

/// Real entries must have zero imaginary part, imaginary entries zero real
/// part.
fn reality_violation(z: Complex64, real: bool) -> f64 {
    if real {
        z.im.abs()
    } else {
        z.re.abs()
    }
}

/// One named factor of a decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct Factor {
    pub name: String,
    pub real_dim: usize,
}

/// Structure report of a canonical form.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub case: String,
    pub algebra: String,
    pub factors: Vec<Factor>,
    /// Real/imaginary split of the vector factor (complex and quaternionic
    /// cases).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_split: Option<(usize, usize)>,
    pub total_real_dim: usize,
    pub invertible: bool,
    pub block_abs_dets: Vec<f64>,
    /// Multiplication on (v, B) pairs as forced by block multiplication of
    /// matrices (1 v; 0 B).
    pub semidirect_law: &'static str,
    pub pattern_residual: f64,
}

pub const SEMIDIRECT_LAW: &str = "(v,B)*(v',B') = (v' + v B', B B')";

/// Names the factors and reports dimensions and invertibility.
pub fn decomposition_report(c: &CanonicalForm) -> DecompositionReport {
    let n = c.algebra.blocks()[0].n;
    let (case, factors, v_split, dets) = match &c.blocks {
        CanonicalBlocks::Complex { b, .. } => {
            let k = n * n - 1;
            (
                "C",
                vec![
                    Factor { name: "V".into(), real_dim: k },
                    Factor { name: "S".into(), real_dim: k * k },
                ],
                Some(((n + 2) * (n - 1) / 2, n * (n - 1) / 2)),
                vec![("B", b.det().norm(), b)],
            )
        }
        CanonicalBlocks::Real { b1, b2, .. } => {
            let s = (n + 2) * (n - 1) / 2;
            let a = n * (n - 1) / 2;
            (
                "R",
                vec![
                    Factor { name: "V".into(), real_dim: s },
                    Factor { name: "S".into(), real_dim: s * s },
                    Factor { name: "T".into(), real_dim: a * a },
                ],
                None,
                vec![("B1", b1.det().norm(), b1), ("B2", b2.det().norm(), b2)],
            )
        }
        CanonicalBlocks::Quaternionic { b, c: cm, .. } => {
            let k = (2 * n + 1) * (n - 1);
            let t = n * (2 * n + 1);
            (
                "H",
                vec![
                    Factor { name: "V".into(), real_dim: k },
                    Factor { name: "S".into(), real_dim: k * k },
                    Factor { name: "T".into(), real_dim: t * t },
                ],
                Some((n * n - 1, n * (n - 1))),
                vec![("B", b.det().norm(), b), ("C", cm.det().norm(), cm)],
            )
        }
    };
    let total = factors.iter().map(|f| f.real_dim).sum();
    let invertible = dets
        .iter()
        .all(|(_, det, m)| *det > invertibility_threshold(m));
    DecompositionReport {
        case: case.to_string(),
        algebra: c.algebra.to_string(),
        factors,
        v_split,
        total_real_dim: total,
        invertible,
        block_abs_dets: dets.iter().map(|(_, d, _)| *d).collect(),
        semidirect_law: SEMIDIRECT_LAW,
        pattern_residual: c.pattern_residual,
    }
}

/// Heuristic threshold `1e-9 * max_norm^size` for treating a determinant as
/// nonzero.
fn invertibility_threshold(m: &Matrix) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    1e-9 * m.max_abs().powi(m.rows() as i32)
}

/// True when every square block of the canonical form is invertible.
pub fn is_invertible(c: &CanonicalForm) -> bool {
    decomposition_report(c).invertible
}

/// The (v, B) product `(v' + v B', B B')`. Both displayed variants of the
/// law differ in the translation term; block multiplication of
/// `(1 v; 0 B)(1 v'; 0 B')` gives `v' + v B'`, which is what realized
/// products reproduce.
pub fn semidirect_multiply(
    v1: &[Complex64],
    b1: &Matrix,
    v2: &[Complex64],
    b2: &Matrix,
) -> (Vec<Complex64>, Matrix) {
    let k = v1.len();
    assert_eq!(v2.len(), k);
    assert_eq!((b1.rows(), b1.cols()), (k, k));
    assert_eq!((b2.rows(), b2.cols()), (k, k));
    let mut v = v2.to_vec();
    for (c, out) in v.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, x) in v1.iter().enumerate() {
            acc += x * b2.get(r, c);
        }
        *out += acc;
    }
    (v, b1.matmul(b2))
}

/// Closed-form dimension data of one block.
#[derive(Clone, Debug, Serialize)]
pub struct BlockDims {
    pub case: String,
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub total: usize,
}

/// Closed-form dimension of one block semigroup.
pub fn block_dims(field: FieldTag, n: usize) -> BlockDims {
    match field {
        FieldTag::C => {
            let k = n * n - 1;
            BlockDims { case: "C".into(), v: k, s: k * k, t: None, total: k + k * k }
        }
        FieldTag::R => {
            let s = (n + 2) * (n - 1) / 2;
            let a = n * (n - 1) / 2;
            BlockDims {
                case: "R".into(),
                v: s,
                s: s * s,
                t: Some(a * a),
                total: s + s * s + a * a,
            }
        }
        FieldTag::H => {
            let k = (2 * n + 1) * (n - 1);
            let t = n * (2 * n + 1);
            BlockDims {
                case: "H".into(),
                v: k,
                s: k * k,
                t: Some(t * t),
                total: k + k * k + t * t,
            }
        }
    }
}

/// Real dimension of the self-adjoint cross component between two blocks:
/// the (r, s) content determines its mirror, so this is the real dimension
/// of the (r, s) tensor block alone. Pairs involving a complex block are
/// unconstrained; pairs of R/H blocks are cut in half by the field
/// constraint.
pub fn cross_dim(fr: FieldTag, dr: usize, fs: FieldTag, ds: usize) -> usize {
    let full = (dr * ds) * (dr * ds);
    if fr == FieldTag::C || fs == FieldTag::C {
        2 * full
    } else {
        full
    }
}

/// Closed-form dimension table of a (possibly direct-sum) algebra.
#[derive(Clone, Debug, Serialize)]
pub struct DimensionTable {
    pub algebra: String,
    pub blocks: Vec<BlockDims>,
    pub cross: Vec<CrossDims>,
    pub total: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossDims {
    pub row_block: usize,
    pub col_block: usize,
    pub real_dim: usize,
}

pub fn dimension_table(algebra: &AlgebraDescriptor) -> DimensionTable {
    let blocks: Vec<BlockDims> = algebra
        .blocks()
        .iter()
        .map(|b| block_dims(b.field, b.n))
        .collect();
    let mut cross = Vec::new();
    for r in 0..algebra.num_blocks() {
        for s in r + 1..algebra.num_blocks() {
            cross.push(CrossDims {
                row_block: r,
                col_block: s,
                real_dim: cross_dim(
                    algebra.blocks()[r].field,
                    algebra.block_rep_dim(r),
                    algebra.blocks()[s].field,
                    algebra.block_rep_dim(s),
                ),
            });
        }
    }
    let total =
        blocks.iter().map(|b| b.total).sum::<usize>() + cross.iter().map(|c| c.real_dim).sum::<usize>();
    DimensionTable {
        algebra: algebra.to_string(),
        blocks,
        cross,
        total,
    }
}

/// Draws a random member: free block parameters from a centered normal of
/// the given scale, assembled in canonical coordinates, transformed back.
/// Direct sums get independent per-block draws plus linked cross parts.
pub fn sample_member(algebra: &AlgebraDescriptor, seed: u64, scale: f64) -> PertMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_member_with(algebra, &mut rng, scale)
}

pub fn sample_member_with(
    algebra: &AlgebraDescriptor,
    rng: &mut impl Rng,
    scale: f64,
) -> PertMatrix {
    let d = algebra.rep_dim();
    let d2 = d * d;
    if algebra.is_single_block() {
        let m = sample_single_block(algebra, rng, scale);
        return PertMatrix::new(algebra.clone(), m).expect("dims by construction");
    }
    let mut mat = Matrix::zeros(d2, d2);
    let nb = algebra.num_blocks();
    for r in 0..nb {
        let sub_alg = AlgebraDescriptor::new(vec![algebra.blocks()[r]]).expect("nonempty");
        let sub = sample_single_block(&sub_alg, rng, scale);
        scatter(&mut mat, &sub, &algebra.pair_indices(r, r));
    }
    for r in 0..nb {
        for s in r + 1..nb {
            let (dr, ds) = (algebra.block_rep_dim(r), algebra.block_rep_dim(s));
            let size = dr * ds;
            let mut upper = Matrix::from_fn(size, size, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * scale, im * scale)
            });
            if let (Some(fr), Some(fs)) = (algebra.field_matrix(r), algebra.field_matrix(s)) {
                // project onto the field-compatible subspace:
                // X -> (X + S conj(X) S^T)/2 with S = kron(F_r, F_s^T)
                let smat = Matrix::kron(&fr, &fs.transpose());
                let tau = smat.matmul(&upper.conj()).matmul(&smat.transpose());
                upper = (&upper + &tau).scale(Complex64::new(0.5, 0.0));
            }
            // mirror block forced by self-adjointness
            let lower = Matrix::from_fn(size, size, |row, col| {
                let (k, i) = (row / dr, row % dr);
                let (l, j) = (col / dr, col % dr);
                upper.get(i * ds + k, j * ds + l).conj()
            });
            scatter(&mut mat, &upper, &algebra.pair_indices(r, s));
            scatter(&mut mat, &lower, &algebra.pair_indices(s, r));
        }
    }
    PertMatrix::new(algebra.clone(), mat).expect("dims by construction")
}

fn scatter(mat: &mut Matrix, sub: &Matrix, idx: &[usize]) {
    for (a, &p) in idx.iter().enumerate() {
        for (b, &q) in idx.iter().enumerate() {
            mat.set(p, q, sub.get(a, b));
        }
    }
}

/// Draws canonical coordinates of a single-block member and maps them back.
fn sample_single_block(algebra: &AlgebraDescriptor, rng: &mut impl Rng, scale: f64) -> Matrix {
    let block = algebra.blocks()[0];
    let n = block.n;
    let basis = build_basis(algebra).expect("single block");
    let d2 = algebra.rep_dim() * algebra.rep_dim();
    let mut a = Matrix::zeros(d2, d2);
    a.set(0, 0, Complex64::new(1.0, 0.0));
    let mut draw = |real: bool| -> Complex64 {
        let g: f64 = rng.sample(StandardNormal);
        if real {
            Complex64::new(g * scale, 0.0)
        } else {
            Complex64::new(0.0, g * scale)
        }
    };
    match block.field {
        FieldTag::C => {
            let signs = omega_prime_signs(n);
            let k = n * n - 1;
            for (j, &sj) in signs.iter().enumerate() {
                let z = draw(sj > 0.0);
                a.set(0, 1 + j, z);
            }
            debug_assert_eq!(signs.len(), k);
            for r in 0..k {
                for c in 0..k {
                    let z = draw(signs[r] * signs[c] > 0.0);
                    a.set(1 + r, 1 + c, z);
                }
            }
        }
        FieldTag::R => {
            let s = (n + 2) * (n - 1) / 2;
            let anti = n * (n - 1) / 2;
            for j in 0..s {
                let z = draw(true);
                a.set(0, 1 + j, z);
            }
            for r in 0..s {
                for c in 0..s {
                    let z = draw(true);
                    a.set(1 + r, 1 + c, z);
                }
            }
            for r in 0..anti {
                for c in 0..anti {
                    let z = draw(true);
                    a.set(1 + s + r, 1 + s + c, z);
                }
            }
        }
        FieldTag::H => {
            let k = (2 * n + 1) * (n - 1);
            let t = n * (2 * n + 1);
            let psi = psi_prime_signs(n);
            let theta = theta_prime_signs(n);
            for (j, &pj) in psi.iter().enumerate() {
                let z = draw(pj > 0.0);
                a.set(0, 1 + j, z);
            }
            for r in 0..k {
                for c in 0..k {
                    let z = draw(psi[r] * psi[c] > 0.0);
                    a.set(1 + r, 1 + c, z);
                }
            }
            for r in 0..t {
                for c in 0..t {
                    let z = draw(theta[r] * theta[c] > 0.0);
                    a.set(1 + k + r, 1 + k + c, z);
                }
            }
        }
    }
    basis.from_canonical(&a)
}
