//! Unitary groups of the three block types, their embedding into the
//! semigroup, and numerical verification of the representation-theoretic
//! block decomposition of embedded elements.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::algebra::AlgebraDescriptor;
use crate::canonical::{build_basis, canonicalize};
use crate::error::{PertError, Result};
use crate::matalg::{embed_quaternion, FieldTag, Matrix, Quaternion};
use crate::pert::TensorElement;

/// A unitary element of one matrix block, kept in its complex realization:
/// U(n) for C, O(n) for R, Sp(n) (2n x 2n, quaternion-structured) for H.
#[derive(Clone, Debug)]
pub struct UnitaryElement {
    pub field: FieldTag,
    pub n: usize,
    mat: Matrix,
}

impl UnitaryElement {
    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    /// `||u u* - 1||_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let d = self.mat.rows();
        self.mat.matmul(&self.mat.adjoint()).diff_norm(&Matrix::identity(d))
    }

    /// Violation of the field structure (reality, quaternion cells).
    pub fn structure_residual(&self) -> f64 {
        AlgebraDescriptor::single(self.field, self.n).element_residual(&self.mat)
    }

    pub fn from_matrix(field: FieldTag, n: usize, mat: Matrix) -> Result<Self> {
        let u = UnitaryElement { field, n, mat };
        let res = u.unitarity_residual().max(u.structure_residual());
        if res > 1e-10 {
            return Err(PertError::InvalidInput(format!(
                "matrix is not a structured unitary (residual {res:.3e})"
            )));
        }
        Ok(u)
    }
}

/// Draws an approximately Haar-distributed unitary by Gram-Schmidt
/// orthonormalization of a Gaussian matrix in the appropriate field; the
/// positive-diagonal normalization fixes the phase. Deterministic per seed.
pub fn random_unitary(field: FieldTag, n: usize, seed: u64) -> UnitaryElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(field, n, &mut rng)
}

pub fn random_unitary_with(field: FieldTag, n: usize, rng: &mut impl Rng) -> UnitaryElement {
    let mat = match field {
        FieldTag::C => {
            let g = Matrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            gram_schmidt_complex(&g)
        }
        FieldTag::R => {
            let g = Matrix::from_fn(n, n, |_, _| {
                Complex64::new(rng.sample::<f64, _>(StandardNormal), 0.0)
            });
            gram_schmidt_complex(&g)
        }
        FieldTag::H => {
            let g: Vec<Vec<Quaternion>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            Quaternion::new(
                                rng.sample(StandardNormal),
                                rng.sample(StandardNormal),
                                rng.sample(StandardNormal),
                                rng.sample(StandardNormal),
                            )
                        })
                        .collect()
                })
                .collect();
            let q = gram_schmidt_quaternion(&g);
            // embed the n x n quaternion unitary as 2n x 2n complex
            let mut m = Matrix::zeros(2 * n, 2 * n);
            for (i, row) in q.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    m.set_block(2 * i, 2 * j, &embed_quaternion(cell));
                }
            }
            m
        }
    };
    UnitaryElement { field, n, mat }
}

/// Modified Gram-Schmidt on columns with a re-orthogonalization pass.
fn gram_schmidt_complex(g: &Matrix) -> Matrix {
    let n = g.rows();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| g.get(i, j)).collect())
        .collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..n {
                    let v = cols[j][i] - proj * cols[k][i];
                    cols[j][i] = v;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Gram-Schmidt over quaternion column vectors (right module convention:
/// coefficients multiply from the right).
fn gram_schmidt_quaternion(g: &[Vec<Quaternion>]) -> Vec<Vec<Quaternion>> {
    let n = g.len();
    // columns of the matrix g[i][j] (i row, j column)
    let mut cols: Vec<Vec<Quaternion>> = (0..n)
        .map(|j| (0..n).map(|i| g[i][j]).collect())
        .collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let mut proj = Quaternion::zero();
                for i in 0..n {
                    proj = proj.add(&cols[k][i].conj().mul(&cols[j][i]));
                }
                for i in 0..n {
                    let sub = cols[k][i].mul(&proj);
                    cols[j][i] = cols[j][i].sub(&sub);
                }
            }
        }
        let norm = cols[j].iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        for q in cols[j].iter_mut() {
            *q = q.scale(1.0 / norm);
        }
    }
    // back to row-major
    (0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect()
}

/// The semigroup embedding `u -> u (x) u*^o` as a single-term element.
pub fn embed_unitary(u: &UnitaryElement) -> TensorElement {
    let algebra = AlgebraDescriptor::single(u.field, u.n);
    TensorElement::new(algebra, vec![(u.mat.clone(), u.mat.adjoint())])
        .expect("unitary legs are algebra elements")
}

/// Block-structure report of embedded unitaries.
#[derive(Clone, Debug, Serialize)]
pub struct RepReport {
    pub field: String,
    pub n: usize,
    pub samples: usize,
    /// Sizes of the invariant blocks: trivial line plus per-case factors.
    pub invariant_block_sizes: Vec<usize>,
    /// The four joint sign-class sizes (H only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint_block_sizes: Option<Vec<usize>>,
    /// Max |A[0,0] - 1| and first row/column mass over all samples.
    pub max_trivial_residual: f64,
    /// Max magnitude outside the invariant diagonal blocks.
    pub max_off_block_residual: f64,
    /// H only: max magnitude between the joint sign classes inside the
    /// invariant blocks. Not expected to vanish (those classes are not
    /// invariant under the group), reported as data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_joint_mixing: Option<f64>,
}

/// Embeds `samples` random unitaries, canonicalizes each, and checks that
/// only the predicted representation blocks are populated.
pub fn verify_rep_decomposition(
    field: FieldTag,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<RepReport> {
    if samples == 0 {
        return Err(PertError::InvalidInput("samples must be at least 1".into()));
    }
    let algebra = AlgebraDescriptor::single(field, n);
    let basis = build_basis(&algebra)?;
    let d2 = algebra.rep_dim() * algebra.rep_dim();

    // invariant block boundaries within the canonical ordering
    let sizes_full: Vec<usize> = match field {
        FieldTag::C => vec![1, n * n - 1],
        FieldTag::R => vec![1, (n + 2) * (n - 1) / 2, n * (n - 1) / 2],
        FieldTag::H => vec![1, (2 * n + 1) * (n - 1), n * (2 * n + 1)],
    };
    debug_assert_eq!(sizes_full.iter().sum::<usize>(), d2);
    let sizes: Vec<usize> = sizes_full.iter().copied().filter(|&s| s > 0).collect();
    let mut bounds = vec![0usize];
    for s in &sizes_full {
        bounds.push(bounds.last().unwrap() + s);
    }
    let joint = match field {
        FieldTag::H => Some(vec![n * n, n * (n - 1), n * n, n * (n + 1)]),
        _ => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_trivial = 0.0f64;
    let mut max_off = 0.0f64;
    let mut max_mixing = 0.0f64;
    for _ in 0..samples {
        let u = random_unitary_with(field, n, &mut rng);
        let m = embed_unitary(&u).realize();
        let a = basis.to_canonical(m.mat());
        max_trivial = max_trivial.max((a.get(0, 0) - Complex64::new(1.0, 0.0)).norm());
        for i in 1..d2 {
            max_trivial = max_trivial.max(a.get(i, 0).norm()).max(a.get(0, i).norm());
        }
        let block_of = |idx: usize| bounds.iter().take_while(|&&b| b <= idx).count() - 1;
        for r in 0..d2 {
            for c in 0..d2 {
                if block_of(r) != block_of(c) {
                    max_off = max_off.max(a.get(r, c).norm());
                }
            }
        }
        if field == FieldTag::H {
            // joint sign classes partition the canonical order; measure the
            // coupling between classes inside the invariant blocks
            let mut jb = vec![0usize];
            for s in joint.as_ref().unwrap() {
                jb.push(jb.last().unwrap() + s);
            }
            let joint_of = |idx: usize| jb.iter().take_while(|&&b| b <= idx).count() - 1;
            for r in 1..d2 {
                for c in 1..d2 {
                    if block_of(r) == block_of(c) && joint_of(r) != joint_of(c) {
                        max_mixing = max_mixing.max(a.get(r, c).norm());
                    }
                }
            }
        }
    }
    Ok(RepReport {
        field: field.to_string(),
        n,
        samples,
        invariant_block_sizes: sizes,
        joint_block_sizes: joint,
        max_trivial_residual: max_trivial,
        max_off_block_residual: max_off,
        max_joint_mixing: if field == FieldTag::H { Some(max_mixing) } else { None },
    })
}

/// Full check of one embedded unitary: membership, invertibility,
/// canonical pattern. Used by tests and the CLI.
pub fn embedded_member_checks(u: &UnitaryElement, tol: f64) -> Result<(f64, bool)> {
    let e = embed_unitary(u);
    let m = e.realize();
    let res = m.membership_residual();
    if res > tol {
        return Err(PertError::NotAMember { residual: res });
    }
    let form = canonicalize(&m, tol)?;
    Ok((res, crate::canonical::is_invertible(&form)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_reproducibility() {
        let a = random_unitary(FieldTag::C, 3, 42);
        let b = random_unitary(FieldTag::C, 3, 42);
        assert_eq!(a.matrix(), b.matrix());
        let c = random_unitary(FieldTag::C, 3, 43);
        assert!(a.matrix().diff_norm(c.matrix()) > 1e-3);
    }

    #[test]
    fn orthogonal_has_unit_determinant_magnitude() {
        for seed in 0..8 {
            let u = random_unitary(FieldTag::R, 2, seed);
            assert!(u.unitarity_residual() < 1e-10);
            assert!(u.matrix().is_real());
            let det = u.matrix().det().re;
            assert!((det.abs() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn both_orthogonal_components_occur() {
        let mut signs = [false, false];
        for seed in 0..32 {
            let det = random_unitary(FieldTag::R, 2, seed).matrix().det().re;
            signs[if det > 0.0 { 0 } else { 1 }] = true;
        }
        assert!(signs[0] && signs[1]);
    }

    #[test]
    fn unit_quaternion_embeds_into_su2() {
        for seed in 0..8 {
            let u = random_unitary(FieldTag::H, 1, seed);
            assert!(u.unitarity_residual() < 1e-10);
            assert!(u.structure_residual() < 1e-12);
            let det = u.matrix().det();
            assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn sp2_structure() {
        let u = random_unitary(FieldTag::H, 2, 7);
        assert!(u.unitarity_residual() < 1e-10);
        assert!(u.structure_residual() < 1e-12);
    }

    #[test]
    fn embedding_identity_is_unit() {
        let u = UnitaryElement::from_matrix(FieldTag::C, 2, Matrix::identity(2)).unwrap();
        let e = embed_unitary(&u);
        let m = e.realize();
        assert!(m.mat().diff_norm(&Matrix::identity(4)) < 1e-14);
    }

    #[test]
    fn embedding_is_homomorphism() {
        for seed in 0..4 {
            let u = random_unitary(FieldTag::C, 2, seed);
            let v = random_unitary(FieldTag::C, 2, seed + 100);
            let uv = UnitaryElement {
                field: FieldTag::C,
                n: 2,
                mat: u.matrix().matmul(v.matrix()),
            };
            let lhs = embed_unitary(&u)
                .multiply(&embed_unitary(&v))
                .unwrap()
                .realize();
            let rhs = embed_unitary(&uv).realize();
            assert!(lhs.mat().diff_norm(rhs.mat()) < 1e-10);
        }
    }

    #[test]
    fn embedded_pass_membership_and_invertibility() {
        for (field, n) in [(FieldTag::C, 2), (FieldTag::R, 3), (FieldTag::H, 1), (FieldTag::H, 2)] {
            for seed in 0..4 {
                let u = random_unitary(field, n, seed);
                let (res, inv) = embedded_member_checks(&u, 1e-9).unwrap();
                assert!(res < 1e-10, "{field} {n}: residual {res}");
                assert!(inv, "{field} {n}: embedded unitary must be invertible");
            }
        }
    }

    #[test]
    fn rep_blocks_u2() {
        let rep = verify_rep_decomposition(FieldTag::C, 2, 10, 5).unwrap();
        assert_eq!(rep.invariant_block_sizes, vec![1, 3]);
        assert!(rep.max_trivial_residual < 1e-10);
        assert!(rep.max_off_block_residual < 1e-10);
    }

    #[test]
    fn rep_blocks_o3() {
        let rep = verify_rep_decomposition(FieldTag::R, 3, 10, 6).unwrap();
        assert_eq!(rep.invariant_block_sizes, vec![1, 5, 3]);
        assert!(rep.max_off_block_residual < 1e-10);
    }

    #[test]
    fn rep_blocks_sp1() {
        let rep = verify_rep_decomposition(FieldTag::H, 1, 10, 7).unwrap();
        assert_eq!(rep.invariant_block_sizes, vec![1, 3]);
        assert_eq!(rep.joint_block_sizes, Some(vec![1, 0, 1, 2]));
        assert!(rep.max_off_block_residual < 1e-10);
    }
}
