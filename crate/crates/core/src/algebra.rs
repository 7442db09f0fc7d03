//! Direct sums of matrix blocks over R, C, H and their defining complex
//! representation.
//!
//! A descriptor lists blocks `(field, n)`. Each block acts on a complex
//! slice of dimension n (R, C) or 2n (H, through the 2x2 quaternion image);
//! the whole algebra acts block-diagonally on dimension `d`, the sum of the
//! slices. Tensor-square data (indices, supports, field constraints) is
//! phrased on pair indices `(i, k) -> i * d + k`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PertError, Result};
use crate::matalg::{j_hat, FieldTag, Matrix};

/// One direct summand: n x n matrices over `field`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub field: FieldTag,
    pub n: usize,
}

/// The algebra as an ordered list of blocks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraDescriptor {
    blocks: Vec<Block>,
}

impl AlgebraDescriptor {
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(PertError::InvalidInput("algebra needs at least one block".into()));
        }
        if blocks.iter().any(|b| b.n == 0) {
            return Err(PertError::InvalidInput("block sizes must be at least 1".into()));
        }
        Ok(AlgebraDescriptor { blocks })
    }

    pub fn single(field: FieldTag, n: usize) -> Self {
        AlgebraDescriptor::new(vec![Block { field, n }]).expect("n >= 1")
    }

    /// The algebra of N diagonal complex entries.
    pub fn diagonal_complex(n: usize) -> Self {
        AlgebraDescriptor::new(vec![Block { field: FieldTag::C, n: 1 }; n]).expect("n >= 1")
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_single_block(&self) -> bool {
        self.blocks.len() == 1
    }

    /// True when the algebra is a sum of 1x1 complex blocks.
    pub fn is_diagonal_complex(&self) -> bool {
        self.blocks.iter().all(|b| b.field == FieldTag::C && b.n == 1)
    }

    /// Complex dimension of the slice block `r` acts on: n for R and C, 2n for H.
    pub fn block_rep_dim(&self, r: usize) -> usize {
        let b = self.blocks[r];
        match b.field {
            FieldTag::H => 2 * b.n,
            _ => b.n,
        }
    }

    /// Dimension d of the defining representation.
    pub fn rep_dim(&self) -> usize {
        (0..self.blocks.len()).map(|r| self.block_rep_dim(r)).sum()
    }

    /// Start offsets of each block slice, with the total appended.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut offs = Vec::with_capacity(self.blocks.len() + 1);
        let mut acc = 0;
        offs.push(0);
        for r in 0..self.blocks.len() {
            acc += self.block_rep_dim(r);
            offs.push(acc);
        }
        offs
    }

    /// Restricts a d x d matrix to the slice of block `r`.
    pub fn restrict(&self, m: &Matrix, r: usize) -> Matrix {
        let offs = self.block_offsets();
        m.block(offs[r], offs[r + 1], offs[r], offs[r + 1])
    }

    /// Per-block structure matrix for the conjugation constraint:
    /// identity for R, `I_n (x) Jhat` for H, none for C.
    pub fn field_matrix(&self, r: usize) -> Option<Matrix> {
        let b = self.blocks[r];
        match b.field {
            FieldTag::C => None,
            FieldTag::R => Some(Matrix::identity(b.n)),
            FieldTag::H => Some(Matrix::kron(&Matrix::identity(b.n), &j_hat())),
        }
    }

    /// How far a d x d matrix is from being an element of the algebra:
    /// max-abs violation of block support, reality (R blocks) and the
    /// quaternion cell structure (H blocks).
    pub fn element_residual(&self, m: &Matrix) -> f64 {
        let d = self.rep_dim();
        if m.rows() != d || m.cols() != d {
            return f64::INFINITY;
        }
        let offs = self.block_offsets();
        let nb = self.blocks.len();
        let mut res = 0.0f64;
        // support: zero off the diagonal blocks
        for i in 0..d {
            let bi = block_of(&offs, i);
            for j in 0..d {
                if block_of(&offs, j) != bi {
                    res = res.max(m.get(i, j).norm());
                }
            }
        }
        for r in 0..nb {
            let sub = self.restrict(m, r);
            match self.blocks[r].field {
                FieldTag::C => {}
                FieldTag::R => {
                    for z in sub.entries() {
                        res = res.max(z.im.abs());
                    }
                }
                FieldTag::H => {
                    // each 2x2 cell must have the shape [[a, b], [-conj(b), conj(a)]]
                    let n = self.blocks[r].n;
                    for ci in 0..n {
                        for cj in 0..n {
                            let a = sub.get(2 * ci, 2 * cj);
                            let b = sub.get(2 * ci, 2 * cj + 1);
                            let c = sub.get(2 * ci + 1, 2 * cj);
                            let dd = sub.get(2 * ci + 1, 2 * cj + 1);
                            res = res.max((dd - a.conj()).norm());
                            res = res.max((c + b.conj()).norm());
                        }
                    }
                }
            }
        }
        res
    }

    /// Checks a d x d matrix against the algebra structure.
    pub fn check_element(&self, m: &Matrix, term: usize, tol: f64) -> Result<()> {
        let d = self.rep_dim();
        if m.rows() != d || m.cols() != d {
            return Err(PertError::ShapeMismatch(format!(
                "term {term}: expected {d}x{d}, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let res = self.element_residual(m);
        if res > tol {
            return Err(PertError::InvalidAlgebraElement { term, residual: res });
        }
        Ok(())
    }

    /// Embeds a single-block matrix into the full block-diagonal algebra,
    /// identity on the other blocks.
    pub fn extend_block(&self, r: usize, sub: &Matrix) -> Matrix {
        let offs = self.block_offsets();
        let mut out = Matrix::identity(self.rep_dim());
        out.set_block(offs[r], offs[r], sub);
        out
    }

    /// Real spanning set of the algebra inside its complex representation:
    /// matrix units for R, units and i*units for C, quaternion units per
    /// cell for H. Real linear combinations of these are exactly the
    /// algebra elements.
    pub fn real_basis(&self) -> Vec<Matrix> {
        let d = self.rep_dim();
        let offs = self.block_offsets();
        let mut out = Vec::new();
        for (r, b) in self.blocks.iter().enumerate() {
            let o = offs[r];
            match b.field {
                FieldTag::R => {
                    for i in 0..b.n {
                        for j in 0..b.n {
                            out.push(Matrix::unit(d, o + i, o + j));
                        }
                    }
                }
                FieldTag::C => {
                    for i in 0..b.n {
                        for j in 0..b.n {
                            out.push(Matrix::unit(d, o + i, o + j));
                            let mut m = Matrix::zeros(d, d);
                            m.set(o + i, o + j, Complex64::new(0.0, 1.0));
                            out.push(m);
                        }
                    }
                }
                FieldTag::H => {
                    let units = quaternion_units();
                    for i in 0..b.n {
                        for j in 0..b.n {
                            for u in &units {
                                let mut m = Matrix::zeros(d, d);
                                m.set_block(o + 2 * i, o + 2 * j, u);
                                out.push(m);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Splits a d x d matrix as `in + i * cof` with both parts algebra
    /// elements, dropping anything off the block-diagonal support.
    ///
    /// Per block: C keeps everything in `in`; R puts real parts in `in` and
    /// imaginary parts in `cof`; H projects each 2x2 cell onto the
    /// quaternion image (the complement is i times the image).
    pub fn project_element(&self, m: &Matrix) -> (Matrix, Matrix) {
        let d = self.rep_dim();
        assert_eq!((m.rows(), m.cols()), (d, d));
        let offs = self.block_offsets();
        let mut part_in = Matrix::zeros(d, d);
        let mut part_cof = Matrix::zeros(d, d);
        let i_unit = Complex64::new(0.0, 1.0);
        for (r, b) in self.blocks.iter().enumerate() {
            let o = offs[r];
            let w = self.block_rep_dim(r);
            match b.field {
                FieldTag::C => {
                    for i in 0..w {
                        for j in 0..w {
                            part_in.set(o + i, o + j, m.get(o + i, o + j));
                        }
                    }
                }
                FieldTag::R => {
                    for i in 0..w {
                        for j in 0..w {
                            let z = m.get(o + i, o + j);
                            part_in.set(o + i, o + j, Complex64::new(z.re, 0.0));
                            part_cof.set(o + i, o + j, Complex64::new(z.im, 0.0));
                        }
                    }
                }
                FieldTag::H => {
                    let j_mat = j_hat();
                    for ci in 0..b.n {
                        for cj in 0..b.n {
                            let cell = m.block(o + 2 * ci, o + 2 * ci + 2, o + 2 * cj, o + 2 * cj + 2);
                            // tau(X) = -Jhat conj(X) Jhat fixes the quaternion image
                            let tau = j_mat.matmul(&cell.conj()).matmul(&j_mat).scale(-Complex64::new(1.0, 0.0));
                            let fixed = (&cell + &tau).scale(Complex64::new(0.5, 0.0));
                            let anti = (&cell - &tau).scale(Complex64::new(0.5, 0.0));
                            part_in.set_block(o + 2 * ci, o + 2 * cj, &fixed);
                            // anti lies in i * H; divide out the i
                            part_cof.set_block(o + 2 * ci, o + 2 * cj, &anti.scale(-i_unit));
                        }
                    }
                }
            }
        }
        (part_in, part_cof)
    }

    /// Pair-block layout of the tensor square: for blocks (r, s) the list of
    /// pair indices `i*d + k` with i in slice r and k in slice s, in
    /// row-major order.
    pub fn pair_indices(&self, r: usize, s: usize) -> Vec<usize> {
        let d = self.rep_dim();
        let offs = self.block_offsets();
        let mut out = Vec::with_capacity((offs[r + 1] - offs[r]) * (offs[s + 1] - offs[s]));
        for i in offs[r]..offs[r + 1] {
            for k in offs[s]..offs[s + 1] {
                out.push(i * d + k);
            }
        }
        out
    }

    /// Block pair `(r, s)` of a pair index, i.e. the blocks of its two legs.
    pub fn pair_block_of(&self, pair: usize) -> (usize, usize) {
        let d = self.rep_dim();
        let offs = self.block_offsets();
        (block_of(&offs, pair / d), block_of(&offs, pair % d))
    }
}

fn block_of(offs: &[usize], idx: usize) -> usize {
    debug_assert!(idx < *offs.last().unwrap());
    offs.iter().take_while(|&&o| o <= idx).count() - 1
}

/// The four quaternion units 1, i, j, k in the 2x2 complex image.
pub fn quaternion_units() -> [Matrix; 4] {
    use crate::matalg::{embed_quaternion, Quaternion};
    [
        embed_quaternion(&Quaternion::new(1.0, 0.0, 0.0, 0.0)),
        embed_quaternion(&Quaternion::new(0.0, 1.0, 0.0, 0.0)),
        embed_quaternion(&Quaternion::new(0.0, 0.0, 1.0, 0.0)),
        embed_quaternion(&Quaternion::new(0.0, 0.0, 0.0, 1.0)),
    ]
}

impl std::fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                if b.n == 1 && b.field != FieldTag::H {
                    b.field.to_string()
                } else {
                    format!("M{}({})", b.n, b.field)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
