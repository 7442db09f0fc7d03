//! The perturbation semigroup: tensor-form elements, the two defining
//! conditions, multiplication, realization and direct-sum structure.
//!
//! An element is a finite sum of pairs `(a_j, b_j)` of algebra elements,
//! standing for `sum_j a_j (x) b_j^o`. It belongs to the semigroup when it
//! is normalized (`sum_j a_j b_j = 1`) and self-adjoint
//! (`sum_j a_j (x) b_j^o = sum_j b_j* (x) a_j*^o`). Realization sends the
//! opposite leg through transposition, `sum_j kron(a_j, b_j^T)`, after which
//! normalization becomes the fixed-vector condition on `sum_i e_i (x) e_i`
//! and self-adjointness becomes conjugation-commutation with the swap
//! operator. Field structure adds one signed-permutation constraint per
//! pair of non-complex blocks, and direct sums confine the matrix to the
//! diagonal tensor blocks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::algebra::AlgebraDescriptor;
use crate::error::{PertError, Result};
use crate::matalg::Matrix;

/// Validation tolerance for algebra-element structure of term lists.
pub const ELEMENT_TOL: f64 = 1e-9;

/// Default membership tolerance.
pub const MEMBER_TOL: f64 = 1e-9;

/// A finite sum `sum_j a_j (x) b_j^o` with both legs in the algebra.
#[derive(Clone, Debug)]
pub struct TensorElement {
    algebra: AlgebraDescriptor,
    terms: Vec<(Matrix, Matrix)>,
}

impl TensorElement {
    /// Builds an element, checking every leg against the algebra structure.
    pub fn new(algebra: AlgebraDescriptor, terms: Vec<(Matrix, Matrix)>) -> Result<Self> {
        for (idx, (a, b)) in terms.iter().enumerate() {
            algebra.check_element(a, idx, ELEMENT_TOL)?;
            algebra.check_element(b, idx, ELEMENT_TOL)?;
        }
        Ok(TensorElement { algebra, terms })
    }

    /// The unit `1 (x) 1^o`.
    pub fn identity(algebra: AlgebraDescriptor) -> Self {
        let d = algebra.rep_dim();
        TensorElement {
            algebra,
            terms: vec![(Matrix::identity(d), Matrix::identity(d))],
        }
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn terms(&self) -> &[(Matrix, Matrix)] {
        &self.terms
    }

    /// `||sum_j a_j b_j - 1||_F`.
    pub fn normalization_residual(&self) -> f64 {
        let d = self.algebra.rep_dim();
        let mut acc = Matrix::zeros(d, d);
        for (a, b) in &self.terms {
            acc = &acc + &a.matmul(b);
        }
        acc.diff_norm(&Matrix::identity(d))
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.normalization_residual() <= tol
    }

    /// The element `sum_j b_j* (x) a_j*^o`.
    pub fn star_image(&self) -> TensorElement {
        TensorElement {
            algebra: self.algebra.clone(),
            terms: self
                .terms
                .iter()
                .map(|(a, b)| (b.adjoint(), a.adjoint()))
                .collect(),
        }
    }

    /// Distance between the realizations of the element and its star image.
    /// Compared on realizations because sum representations are not unique.
    pub fn self_adjointness_residual(&self) -> f64 {
        self.realize().mat().diff_norm(self.star_image().realize().mat())
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.self_adjointness_residual() <= tol
    }

    /// Semigroup product: all pairwise terms `(a_j b_k, btilde_k atilde_j)`.
    pub fn multiply(&self, other: &TensorElement) -> Result<TensorElement> {
        if self.algebra != other.algebra {
            return Err(PertError::AlgebraMismatch);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, at) in &self.terms {
            for (b, bt) in &other.terms {
                terms.push((a.matmul(b), bt.matmul(at)));
            }
        }
        Ok(TensorElement { algebra: self.algebra.clone(), terms })
    }

    /// Realizes the element as the d^2 x d^2 matrix `sum_j kron(a_j, b_j^T)`.
    pub fn realize(&self) -> PertMatrix {
        let d = self.algebra.rep_dim();
        let mut mat = Matrix::zeros(d * d, d * d);
        for (a, b) in &self.terms {
            mat = &mat + &Matrix::kron(a, &b.transpose());
        }
        PertMatrix { algebra: self.algebra.clone(), mat }
    }
}

/// A realized element: a d^2 x d^2 complex matrix tagged with its algebra.
#[derive(Clone, Debug)]
pub struct PertMatrix {
    algebra: AlgebraDescriptor,
    mat: Matrix,
}

impl PertMatrix {
    pub fn new(algebra: AlgebraDescriptor, mat: Matrix) -> Result<Self> {
        let d2 = algebra.rep_dim() * algebra.rep_dim();
        if mat.rows() != d2 || mat.cols() != d2 {
            return Err(PertError::ShapeMismatch(format!(
                "expected {d2}x{d2} for {algebra}, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(PertMatrix { algebra, mat })
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn mat(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_mat(self) -> Matrix {
        self.mat
    }

    /// Max violation of the fixed-vector condition, the conjugation
    /// constraints and the tensor-block support.
    pub fn membership_residual(&self) -> f64 {
        let sd = structure_data(&self.algebra);
        let mut res = 0.0f64;

        // fixed vector
        let mv = self.mat.mul_vec(&sd.fixed_vector);
        let fv: f64 = mv
            .iter()
            .zip(&sd.fixed_vector)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        res = res.max(fv);

        // conjugation constraints
        let conj = self.mat.conj();
        for c in &sd.constraints {
            let lhs = c.matrix.matmul(&conj);
            let rhs = self.mat.matmul(&c.matrix);
            res = res.max(lhs.diff_norm(&rhs));
        }

        // support
        res = res.max(sd.off_support_norm(&self.mat));
        res
    }

    pub fn is_member(&self, tol: f64) -> bool {
        self.membership_residual() <= tol
    }

    /// Product of realized elements (same algebra).
    pub fn multiply(&self, other: &PertMatrix) -> Result<PertMatrix> {
        if self.algebra != other.algebra {
            return Err(PertError::AlgebraMismatch);
        }
        Ok(PertMatrix {
            algebra: self.algebra.clone(),
            mat: self.mat.matmul(&other.mat),
        })
    }

    /// Rewrites the realized matrix as a term list. Inverse of `realize` up
    /// to representation: the opposite leg runs over a fixed spanning set of
    /// the algebra and the coefficients land on the first leg.
    ///
    /// Requires the matrix to lie in the realized span of the tensor square;
    /// anything outside (support or field violations) is rejected.
    pub fn to_element(&self, tol: f64) -> Result<TensorElement> {
        let d = self.algebra.rep_dim();
        let reduced = complex_basis_units(&self.algebra);
        let mut terms = Vec::new();
        let mut recon = Matrix::zeros(d * d, d * d);
        for (e, in_complex_block, norm_sqr) in &reduced {
            // Coefficient matrix A[i][j] = <E, M^{ij}>_F / ||E||_F^2 where
            // M^{ij}[p][q] = mat[(i,p),(j,q)]; the reduced units are
            // Frobenius-orthogonal so this is a plain projection.
            let mut a = Matrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    let mut c = Complex64::new(0.0, 0.0);
                    for p in 0..d {
                        for q in 0..d {
                            let w = e.get(q, p);
                            if w.re == 0.0 && w.im == 0.0 {
                                continue;
                            }
                            c += w.conj() * self.mat.get(i * d + p, j * d + q);
                        }
                    }
                    a.set(i, j, c / *norm_sqr);
                }
            }
            // A may leave the algebra on R and H blocks of the first leg;
            // split A = A_in + i * A_cof with both parts algebra elements.
            // When the opposite leg sits in a C block, the stray i moves
            // across the tensor sign: kron(i*A_cof, E^T) = kron(A_cof, (iE)^T).
            let (a_in, a_cof) = self.algebra.project_element(&a);
            if a_in.max_abs() > 1e-14 {
                recon = &recon + &Matrix::kron(&a_in, &e.transpose());
                terms.push((a_in, e.clone()));
            }
            if a_cof.max_abs() > 1e-14 && *in_complex_block {
                let ie = e.scale(Complex64::new(0.0, 1.0));
                recon = &recon + &Matrix::kron(&a_cof, &ie.transpose());
                terms.push((a_cof, ie));
            }
        }
        let err = recon.diff_norm(&self.mat);
        if err > tol {
            return Err(PertError::NotAMember { residual: err });
        }
        TensorElement::new(self.algebra.clone(), terms)
    }
}

/// Spanning units for the opposite leg, complex-linearly independent:
/// matrix units for R and C blocks, the four quaternion units per cell for
/// H blocks. Returns (unit, owning block is complex, Frobenius norm^2).
fn complex_basis_units(algebra: &AlgebraDescriptor) -> Vec<(Matrix, bool, f64)> {
    use crate::matalg::FieldTag;
    let d = algebra.rep_dim();
    let offs = algebra.block_offsets();
    let mut out = Vec::new();
    for (r, b) in algebra.blocks().iter().enumerate() {
        let o = offs[r];
        match b.field {
            FieldTag::R | FieldTag::C => {
                for i in 0..b.n {
                    for j in 0..b.n {
                        out.push((Matrix::unit(d, o + i, o + j), b.field == FieldTag::C, 1.0));
                    }
                }
            }
            FieldTag::H => {
                let units = crate::algebra::quaternion_units();
                for i in 0..b.n {
                    for j in 0..b.n {
                        for u in &units {
                            let mut m = Matrix::zeros(d, d);
                            m.set_block(o + 2 * i, o + 2 * j, u);
                            out.push((m, false, 2.0));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Kind of a structure constraint; all are of the conjugation-commutation
/// form `S * conj(m) = m * S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    CommuteWithConjugation,
}

#[derive(Clone, Debug)]
pub struct StructureConstraint {
    pub matrix: Matrix,
    pub kind: ConstraintKind,
    /// Human-readable origin, e.g. "swap" or "field(1,2)".
    pub label: String,
}

/// Per-algebra constraint set for membership checks.
#[derive(Clone, Debug)]
pub struct StructureData {
    /// `sum_i e_i (x) e_i` as a length-d^2 complex vector.
    pub fixed_vector: Vec<Complex64>,
    pub constraints: Vec<StructureConstraint>,
    /// Pair indices belonging to diagonal tensor blocks; entries outside the
    /// induced rows x columns pattern must vanish.
    pub support: SupportMask,
}

/// Support pattern of the tensor square: an entry (p, q) is admissible when
/// p and q carry the same block pair.
#[derive(Clone, Debug)]
pub struct SupportMask {
    /// Block pair of each pair index.
    pair_block: Vec<(usize, usize)>,
}

impl SupportMask {
    pub fn admissible(&self, p: usize, q: usize) -> bool {
        self.pair_block[p] == self.pair_block[q]
    }

    /// Frobenius mass of the entries outside the admissible pattern.
    pub fn off_support_norm(&self, m: &Matrix) -> f64 {
        let n = self.pair_block.len();
        let mut acc = 0.0;
        for p in 0..n {
            for q in 0..n {
                if self.pair_block[p] != self.pair_block[q] {
                    acc += m.get(p, q).norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

impl StructureData {
    fn off_support_norm(&self, m: &Matrix) -> f64 {
        self.support.off_support_norm(m)
    }
}

/// Builds (and memoizes) the structure data of an algebra: the fixed vector,
/// the global swap constraint, one field constraint per ordered pair of
/// non-complex blocks, and the support mask.
pub fn structure_data(algebra: &AlgebraDescriptor) -> Arc<StructureData> {
    static CACHE: OnceLock<Mutex<HashMap<AlgebraDescriptor, Arc<StructureData>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(found) = cache.lock().unwrap().get(algebra) {
        return Arc::clone(found);
    }
    let built = Arc::new(build_structure_data(algebra));
    cache
        .lock()
        .unwrap()
        .entry(algebra.clone())
        .or_insert(built)
        .clone()
}

fn build_structure_data(algebra: &AlgebraDescriptor) -> StructureData {
    let d = algebra.rep_dim();
    let d2 = d * d;

    let mut fixed_vector = vec![Complex64::new(0.0, 0.0); d2];
    for i in 0..d {
        fixed_vector[i * d + i] = Complex64::new(1.0, 0.0);
    }

    let mut constraints = Vec::new();

    // swap: realization of sum e_ij (x) e_ij^o over the full matrix algebra;
    // encodes self-adjointness for any block structure.
    let mut swap = Matrix::zeros(d2, d2);
    for i in 0..d {
        for k in 0..d {
            swap.set(i * d + k, k * d + i, Complex64::new(1.0, 0.0));
        }
    }
    constraints.push(StructureConstraint {
        matrix: swap,
        kind: ConstraintKind::CommuteWithConjugation,
        label: "swap".to_string(),
    });

    // field constraints: kron(F_r, F_s^T) supported on the (r, s) pair block
    let nb = algebra.num_blocks();
    for r in 0..nb {
        let fr = match algebra.field_matrix(r) {
            Some(f) => f,
            None => continue,
        };
        for s in 0..nb {
            let fs = match algebra.field_matrix(s) {
                Some(f) => f,
                None => continue,
            };
            let local = Matrix::kron(&fr, &fs.transpose());
            let idx = algebra.pair_indices(r, s);
            let mut padded = Matrix::zeros(d2, d2);
            for (a, &p) in idx.iter().enumerate() {
                for (b, &q) in idx.iter().enumerate() {
                    let v = local.get(a, b);
                    if v.re != 0.0 || v.im != 0.0 {
                        padded.set(p, q, v);
                    }
                }
            }
            constraints.push(StructureConstraint {
                matrix: padded,
                kind: ConstraintKind::CommuteWithConjugation,
                label: format!("field({r},{s})"),
            });
        }
    }

    let pair_block = (0..d2).map(|p| algebra.pair_block_of(p)).collect();
    StructureData {
        fixed_vector,
        constraints,
        support: SupportMask { pair_block },
    }
}

/// One off-diagonal direct-sum component: the tensor blocks (r, s) and
/// (s, r), linked by self-adjointness.
#[derive(Clone, Debug)]
pub struct CrossPart {
    pub row_block: usize,
    pub col_block: usize,
    /// Content of the (row_block, col_block) diagonal tensor block.
    pub upper: Matrix,
    /// Content of the mirrored (col_block, row_block) block.
    pub lower: Matrix,
}

impl CrossPart {
    /// Residual of the self-adjointness linkage between the two halves:
    /// lower[(k,i),(l,j)] must equal conj(upper[(i,k),(j,l)]).
    pub fn linkage_residual(&self, algebra: &AlgebraDescriptor) -> f64 {
        cross_linkage_residual(algebra, self.row_block, self.col_block, &self.upper, &self.lower)
    }

    /// Builds the linked partner automatically.
    pub fn from_upper(
        algebra: &AlgebraDescriptor,
        row_block: usize,
        col_block: usize,
        upper: Matrix,
    ) -> Self {
        let lower = linked_partner(algebra, row_block, col_block, &upper);
        CrossPart { row_block, col_block, upper, lower }
    }
}

fn block_slice_dims(algebra: &AlgebraDescriptor, r: usize, s: usize) -> (usize, usize) {
    (algebra.block_rep_dim(r), algebra.block_rep_dim(s))
}

/// (s, r)-block induced from the (r, s) content by the self-adjointness
/// linkage.
fn linked_partner(algebra: &AlgebraDescriptor, r: usize, s: usize, upper: &Matrix) -> Matrix {
    let (dr, ds) = block_slice_dims(algebra, r, s);
    // upper rows are (i, k) with i over d_r, k over d_s; lower rows are (k, i).
    Matrix::from_fn(ds * dr, ds * dr, |row, col| {
        let (k, i) = (row / dr, row % dr);
        let (l, j) = (col / dr, col % dr);
        upper.get(i * ds + k, j * ds + l).conj()
    })
}

fn cross_linkage_residual(
    algebra: &AlgebraDescriptor,
    r: usize,
    s: usize,
    upper: &Matrix,
    lower: &Matrix,
) -> f64 {
    linked_partner(algebra, r, s, upper).diff_norm(lower)
}

/// Splits a member over a direct sum into its per-block members and the
/// linked cross parts.
pub fn split_direct_sum(m: &PertMatrix, tol: f64) -> Result<(Vec<PertMatrix>, Vec<CrossPart>)> {
    let algebra = m.algebra();
    if algebra.num_blocks() < 2 {
        return Err(PertError::UnsupportedAlgebra(
            "split_direct_sum needs at least two blocks".into(),
        ));
    }
    let res = m.membership_residual();
    if res > tol {
        return Err(PertError::NotAMember { residual: res });
    }
    let nb = algebra.num_blocks();
    let mut parts = Vec::with_capacity(nb);
    for r in 0..nb {
        let idx = algebra.pair_indices(r, r);
        let sub = extract_pair_block(m.mat(), &idx);
        let block_alg = AlgebraDescriptor::new(vec![algebra.blocks()[r]]).expect("nonempty");
        parts.push(PertMatrix::new(block_alg, sub)?);
    }
    let mut cross = Vec::new();
    for r in 0..nb {
        for s in r + 1..nb {
            let upper = extract_pair_block(m.mat(), &algebra.pair_indices(r, s));
            let lower = extract_pair_block(m.mat(), &algebra.pair_indices(s, r));
            let part = CrossPart { row_block: r, col_block: s, upper, lower };
            let link = part.linkage_residual(algebra);
            if link > tol {
                return Err(PertError::CrossLinkageViolated { residual: link });
            }
            cross.push(part);
        }
    }
    Ok((parts, cross))
}

fn extract_pair_block(m: &Matrix, idx: &[usize]) -> Matrix {
    Matrix::from_fn(idx.len(), idx.len(), |a, b| m.get(idx[a], idx[b]))
}

/// Reassembles a member of the direct-sum semigroup from per-block members
/// and cross parts. Inverse of `split_direct_sum`.
pub fn merge_direct_sum(
    parts: &[PertMatrix],
    cross: &[CrossPart],
    algebra: &AlgebraDescriptor,
    tol: f64,
) -> Result<PertMatrix> {
    let nb = algebra.num_blocks();
    if parts.len() != nb {
        return Err(PertError::InvalidInput(format!(
            "expected {nb} block parts, got {}",
            parts.len()
        )));
    }
    let d = algebra.rep_dim();
    let mut mat = Matrix::zeros(d * d, d * d);
    for (r, part) in parts.iter().enumerate() {
        let expected = AlgebraDescriptor::new(vec![algebra.blocks()[r]]).expect("nonempty");
        if part.algebra() != &expected {
            return Err(PertError::AlgebraMismatch);
        }
        let res = part.membership_residual();
        if res > tol {
            return Err(PertError::NotAMember { residual: res });
        }
        scatter_pair_block(&mut mat, part.mat(), &algebra.pair_indices(r, r));
    }
    for part in cross {
        let (r, s) = (part.row_block, part.col_block);
        if r >= s || s >= nb {
            return Err(PertError::InvalidInput(format!(
                "cross part blocks ({r},{s}) out of range or not upper",
            )));
        }
        let link = part.linkage_residual(algebra);
        if link > tol {
            return Err(PertError::CrossLinkageViolated { residual: link });
        }
        scatter_pair_block(&mut mat, &part.upper, &algebra.pair_indices(r, s));
        scatter_pair_block(&mut mat, &part.lower, &algebra.pair_indices(s, r));
    }
    let out = PertMatrix::new(algebra.clone(), mat)?;
    let res = out.membership_residual();
    if res > tol {
        return Err(PertError::NotAMember { residual: res });
    }
    Ok(out)
}

fn scatter_pair_block(mat: &mut Matrix, sub: &Matrix, idx: &[usize]) {
    for (a, &p) in idx.iter().enumerate() {
        for (b, &q) in idx.iter().enumerate() {
            mat.set(p, q, sub.get(a, b));
        }
    }
}

/// Coordinates of a member over the algebra of N diagonal complex entries:
/// the strictly upper values `C_ij` (i < j, row-major). The diagonal is
/// pinned to one and the lower triangle is conjugate-determined.
pub fn pert_cn_coordinates(m: &PertMatrix, tol: f64) -> Result<Vec<Complex64>> {
    let algebra = m.algebra();
    if !algebra.is_diagonal_complex() {
        return Err(PertError::UnsupportedAlgebra(format!(
            "{algebra} is not a sum of 1x1 complex blocks"
        )));
    }
    let res = m.membership_residual();
    if res > tol {
        return Err(PertError::NotAMember { residual: res });
    }
    let n = algebra.num_blocks();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push(m.mat().get(i * n + j, i * n + j));
        }
    }
    Ok(out)
}

/// Inverse of `pert_cn_coordinates`.
pub fn pert_cn_from_coordinates(
    algebra: &AlgebraDescriptor,
    coords: &[Complex64],
) -> Result<PertMatrix> {
    if !algebra.is_diagonal_complex() {
        return Err(PertError::UnsupportedAlgebra(format!(
            "{algebra} is not a sum of 1x1 complex blocks"
        )));
    }
    let n = algebra.num_blocks();
    if coords.len() != n * (n - 1) / 2 {
        return Err(PertError::InvalidInput(format!(
            "expected {} coordinates, got {}",
            n * (n - 1) / 2,
            coords.len()
        )));
    }
    let mut mat = Matrix::zeros(n * n, n * n);
    let mut it = coords.iter();
    for i in 0..n {
        mat.set(i * n + i, i * n + i, Complex64::new(1.0, 0.0));
    }
    for i in 0..n {
        for j in i + 1..n {
            let z = *it.next().unwrap();
            mat.set(i * n + j, i * n + j, z);
            mat.set(j * n + i, j * n + i, z.conj());
        }
    }
    PertMatrix::new(algebra.clone(), mat)
}
