//! Independent verifier: rebuilds the defining linear constraints of the
//! semigroup entrywise, measures membership residuals against them, and
//! computes the real dimension of the solution variety by rank elimination.
//!
//! Nothing here reuses the constraint assembly of the main path. The rows
//! are derived directly from the definition applied to basis tensors: the
//! unit acts as the fixed vector, conjugate-symmetry exchanges the tensor
//! legs entrywise, block structure confines support, and the R/H field
//! structure pairs entries through signed index maps read off the
//! quaternion cells.

use num_complex::Complex64;

use crate::algebra::AlgebraDescriptor;
use crate::error::{PertError, Result};
use crate::matalg::{FieldTag, Matrix};
use crate::pert::PertMatrix;

const MAX_ORACLE_DIM: usize = 8;
const RANK_TOL: f64 = 1e-8;

/// One real-linear equation over the entries of the realized matrix,
/// unknowns indexed as `2*(p*n + q)` for the real part and
/// `2*(p*n + q) + 1` for the imaginary part of entry (p, q).
#[derive(Clone, Debug)]
struct SparseRow {
    coeffs: Vec<(usize, f64)>,
    rhs: f64,
}

/// Real-linear constraint system whose solution set is the realized
/// semigroup variety.
#[derive(Debug)]
pub struct ConstraintSystem {
    /// Number of real unknowns, `2 d^4`.
    pub unknowns: usize,
    side: usize,
    rows: Vec<SparseRow>,
}

impl ConstraintSystem {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Max violation of the rows at a concrete matrix.
    pub fn residual_at(&self, m: &Matrix) -> f64 {
        let n = self.side;
        assert_eq!((m.rows(), m.cols()), (n, n));
        let coord = |idx: usize| {
            let z = m.get(idx / 2 / n, (idx / 2) % n);
            if idx.is_multiple_of(2) {
                z.re
            } else {
                z.im
            }
        };
        let mut worst = 0.0f64;
        for row in &self.rows {
            let v: f64 = row.coeffs.iter().map(|&(i, c)| c * coord(i)).sum();
            worst = worst.max((v - row.rhs).abs());
        }
        worst
    }

    /// Rank of the homogeneous part: trivial one-term rows are substituted
    /// away first (each distinct zeroed unknown is one pivot), then dense
    /// elimination with partial pivoting on the rest at tolerance 1e-8.
    fn homogeneous_rank(&self) -> usize {
        let mut zeroed = vec![false; self.unknowns];
        let mut pending: Vec<Vec<(usize, f64)>> =
            self.rows.iter().map(|r| r.coeffs.clone()).collect();
        let mut rank = 0usize;
        loop {
            let mut changed = false;
            for coeffs in pending.iter_mut() {
                if coeffs.is_empty() {
                    continue;
                }
                coeffs.retain(|&(i, _)| !zeroed[i]);
                if coeffs.len() == 1 {
                    let var = coeffs[0].0;
                    zeroed[var] = true;
                    rank += 1;
                    coeffs.clear();
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        // remap the free unknowns and densify what is left
        let mut remap = vec![usize::MAX; self.unknowns];
        let mut free = 0usize;
        for i in 0..self.unknowns {
            if !zeroed[i] {
                remap[i] = free;
                free += 1;
            }
        }
        let mut dense: Vec<Vec<f64>> = Vec::new();
        for coeffs in &pending {
            if coeffs.is_empty() {
                continue;
            }
            let mut row = vec![0.0; free];
            for &(i, c) in coeffs {
                row[remap[i]] += c;
            }
            let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                for x in row.iter_mut() {
                    *x /= norm;
                }
                dense.push(row);
            }
        }
        rank + dense_rank(&mut dense, free)
    }
}

fn dense_rank(rows: &mut [Vec<f64>], cols: usize) -> usize {
    let mut rank = 0usize;
    let nrows = rows.len();
    for col in 0..cols {
        let mut best = RANK_TOL;
        let mut pivot = None;
        for r in rank..nrows {
            let v = rows[r][col].abs();
            if v > best {
                best = v;
                pivot = Some(r);
            }
        }
        let Some(p) = pivot else { continue };
        rows.swap(rank, p);
        let pv = rows[rank][col];
        for r in rank + 1..nrows {
            let f = rows[r][col] / pv;
            if f != 0.0 {
                for c in col..cols {
                    let sub = f * rows[rank][c];
                    rows[r][c] -= sub;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Signed index map of the quaternionic structure on one slice:
/// `Jhat` sends basis index 2a to -(2a+1) and 2a+1 to +(2a); the transpose
/// flips the signs. Identity for real slices.
fn signed_map(field: FieldTag, transposed: bool) -> impl Fn(usize) -> (usize, f64) {
    move |i: usize| match field {
        FieldTag::H => {
            if i.is_multiple_of(2) {
                (i + 1, if transposed { 1.0 } else { -1.0 })
            } else {
                (i - 1, if transposed { -1.0 } else { 1.0 })
            }
        }
        _ => (i, 1.0),
    }
}

/// Builds the constraint system of an algebra from scratch.
pub fn constraint_system(algebra: &AlgebraDescriptor) -> ConstraintSystem {
    let d = algebra.rep_dim();
    let n = d * d;
    let re = |p: usize, q: usize| 2 * (p * n + q);
    let im = |p: usize, q: usize| 2 * (p * n + q) + 1;
    let mut rows: Vec<SparseRow> = Vec::new();

    // (i) unit condition: row p = (i,k) of m applied to the diagonal vector
    // must reproduce it: sum_l m[(i,k),(l,l)] = delta_{ik}
    for i in 0..d {
        for k in 0..d {
            let p = i * d + k;
            let rhs = if i == k { 1.0 } else { 0.0 };
            let re_row: Vec<(usize, f64)> = (0..d).map(|l| (re(p, l * d + l), 1.0)).collect();
            let im_row: Vec<(usize, f64)> = (0..d).map(|l| (im(p, l * d + l), 1.0)).collect();
            rows.push(SparseRow { coeffs: re_row, rhs });
            rows.push(SparseRow { coeffs: im_row, rhs: 0.0 });
        }
    }

    // (ii) conjugate-symmetry: exchanging both tensor legs and conjugating
    // reproduces the matrix, m[(i,k),(j,l)] = conj(m[(k,i),(l,j)])
    let tau = |p: usize| (p % d) * d + p / d;
    for p in 0..n {
        for q in 0..n {
            let (p2, q2) = (tau(p), tau(q));
            if (p2, q2) < (p, q) {
                continue;
            }
            if (p2, q2) == (p, q) {
                rows.push(SparseRow { coeffs: vec![(im(p, q), 1.0)], rhs: 0.0 });
            } else {
                rows.push(SparseRow {
                    coeffs: vec![(re(p, q), 1.0), (re(p2, q2), -1.0)],
                    rhs: 0.0,
                });
                rows.push(SparseRow {
                    coeffs: vec![(im(p, q), 1.0), (im(p2, q2), 1.0)],
                    rhs: 0.0,
                });
            }
        }
    }

    // (iii) support: both legs of a row index and of a column index must
    // carry the same block pair
    for p in 0..n {
        for q in 0..n {
            if algebra.pair_block_of(p) != algebra.pair_block_of(q) {
                rows.push(SparseRow { coeffs: vec![(re(p, q), 1.0)], rhs: 0.0 });
                rows.push(SparseRow { coeffs: vec![(im(p, q), 1.0)], rhs: 0.0 });
            }
        }
    }

    // (iv) field structure per diagonal pair block with both legs non-complex:
    // sigma_p conj(m[P,Q]) = sigma_q m[P',Q'] with the signed index maps of
    // the two legs
    let offs = algebra.block_offsets();
    let nb = algebra.num_blocks();
    for r in 0..nb {
        let fr = algebra.blocks()[r].field;
        if fr == FieldTag::C {
            continue;
        }
        for s in 0..nb {
            let fs = algebra.blocks()[s].field;
            if fs == FieldTag::C {
                continue;
            }
            let (dr, ds) = (algebra.block_rep_dim(r), algebra.block_rep_dim(s));
            let map_a = signed_map(fr, false);
            let map_b = signed_map(fs, true);
            // local pair (u, w) -> global pair index
            let glob = |u: usize, w: usize| (offs[r] + u) * d + (offs[s] + w);
            for u in 0..dr {
                for w in 0..ds {
                    for u2 in 0..dr {
                        for w2 in 0..ds {
                            let p = glob(u, w);
                            let q = glob(u2, w2);
                            let (pu, sgn_pu) = map_a(u);
                            let (pw, sgn_pw) = map_b(w);
                            let (qu, sgn_qu) = map_a(u2);
                            let (qw, sgn_qw) = map_b(w2);
                            let p2 = glob(pu, pw);
                            let q2 = glob(qu, qw);
                            let sp = sgn_pu * sgn_pw;
                            let sq = sgn_qu * sgn_qw;
                            if (p2, q2) < (p, q) {
                                continue;
                            }
                            if (p2, q2) == (p, q) {
                                if (sp - sq).abs() > 0.5 {
                                    rows.push(SparseRow {
                                        coeffs: vec![(re(p, q), 1.0)],
                                        rhs: 0.0,
                                    });
                                }
                                if (sp + sq).abs() > 0.5 {
                                    rows.push(SparseRow {
                                        coeffs: vec![(im(p, q), 1.0)],
                                        rhs: 0.0,
                                    });
                                }
                            } else {
                                rows.push(SparseRow {
                                    coeffs: vec![(re(p, q), sp), (re(p2, q2), -sq)],
                                    rhs: 0.0,
                                });
                                rows.push(SparseRow {
                                    coeffs: vec![(im(p, q), -sp), (im(p2, q2), -sq)],
                                    rhs: 0.0,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    ConstraintSystem { unknowns: 2 * n * n, side: n, rows }
}

/// Real dimension of the solution variety, by rank of the homogeneous part.
/// Guarded to representation dimension at most 8.
pub fn affine_dimension(algebra: &AlgebraDescriptor) -> Result<usize> {
    let d = algebra.rep_dim();
    if d > MAX_ORACLE_DIM {
        return Err(PertError::CostGuard { dim: d, max: MAX_ORACLE_DIM });
    }
    let sys = constraint_system(algebra);
    Ok(sys.unknowns - sys.homogeneous_rank())
}

/// Max violation of all constraint rows at the given matrix.
pub fn residual(m: &PertMatrix) -> f64 {
    constraint_system(m.algebra()).residual_at(m.mat())
}

/// Eigenvalues of a hermitian matrix by bisection on the characteristic
/// polynomial `det(m - lambda I)`, independent of the Jacobi path. Needs
/// distinct roots to bracket; refines the scan grid a few times before
/// giving up.
pub fn charpoly_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(PertError::ShapeMismatch("square matrix required".into()));
    }
    let herm = m.hermitian_residual();
    if herm > 1e-8 * m.frobenius_norm().max(1.0) {
        return Err(PertError::NotHermitian { residual: herm });
    }
    let nn = m.rows();
    let bound = (0..nn)
        .map(|i| (0..nn).map(|j| m.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let charpoly = |lambda: f64| {
        let shifted = Matrix::from_fn(nn, nn, |i, j| {
            m.get(i, j)
                - if i == j {
                    Complex64::new(lambda, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
        });
        shifted.det().re
    };
    for grid in [1024usize, 4096, 16384, 65536] {
        let mut xs = Vec::with_capacity(grid + 1);
        let mut fs = Vec::with_capacity(grid + 1);
        for g in 0..=grid {
            let x = -bound + 2.0 * bound * (g as f64) / (grid as f64);
            xs.push(x);
            fs.push(charpoly(x));
        }
        let mut roots = Vec::new();
        for g in 0..grid {
            if fs[g] == 0.0 {
                roots.push(xs[g]);
            } else if fs[g] * fs[g + 1] < 0.0 {
                let (mut lo, mut hi) = (xs[g], xs[g + 1]);
                let (mut flo, _fhi) = (fs[g], fs[g + 1]);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = charpoly(mid);
                    if fm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if flo * fm < 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        if fs[grid] == 0.0 {
            roots.push(xs[grid]);
        }
        if roots.len() == nn {
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            return Ok(roots);
        }
    }
    Err(PertError::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraDescriptor, Block};
    use crate::canonical::sample_member;
    use crate::matalg::hermitian_eigenvalues;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn alg(blocks: &[(FieldTag, usize)]) -> AlgebraDescriptor {
        AlgebraDescriptor::new(
            blocks.iter().map(|&(field, n)| Block { field, n }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn dimensions_small() {
        assert_eq!(affine_dimension(&alg(&[(FieldTag::C, 1), (FieldTag::C, 1)])).unwrap(), 2);
        assert_eq!(affine_dimension(&AlgebraDescriptor::diagonal_complex(3)).unwrap(), 6);
        assert_eq!(affine_dimension(&alg(&[(FieldTag::C, 2)])).unwrap(), 12);
        assert_eq!(affine_dimension(&alg(&[(FieldTag::R, 2)])).unwrap(), 7);
        assert_eq!(affine_dimension(&alg(&[(FieldTag::H, 1)])).unwrap(), 9);
    }

    #[test]
    fn dimensions_of_mixed_sums_match_closed_forms() {
        for blocks in [
            vec![(FieldTag::R, 2), (FieldTag::H, 1)],
            vec![(FieldTag::C, 2), (FieldTag::C, 1)],
            vec![(FieldTag::C, 1), (FieldTag::H, 1)],
            vec![(FieldTag::R, 1), (FieldTag::C, 1)],
            vec![(FieldTag::R, 2), (FieldTag::R, 2)],
            vec![(FieldTag::C, 1), (FieldTag::R, 1), (FieldTag::H, 1)],
        ] {
            let a = alg(&blocks);
            let closed = crate::canonical::dimension_table(&a).total;
            assert_eq!(affine_dimension(&a).unwrap(), closed, "{a}");
        }
    }

    #[test]
    fn cost_guard() {
        let a = alg(&[(FieldTag::C, 9)]);
        assert!(matches!(
            affine_dimension(&a),
            Err(PertError::CostGuard { .. })
        ));
    }

    #[test]
    fn identity_residual_zero() {
        let a = alg(&[(FieldTag::C, 2)]);
        let m = crate::pert::TensorElement::identity(a).realize();
        assert_eq!(residual(&m), 0.0);
    }

    #[test]
    fn sampled_members_have_tiny_residual() {
        for a in [
            alg(&[(FieldTag::C, 2)]),
            alg(&[(FieldTag::R, 2)]),
            alg(&[(FieldTag::H, 1)]),
            alg(&[(FieldTag::R, 2), (FieldTag::H, 1)]),
        ] {
            for seed in 0..5 {
                let m = sample_member(&a, seed, 1.0);
                assert!(residual(&m) < 1e-10, "{a}: residual {}", residual(&m));
            }
        }
    }

    #[test]
    fn residual_is_linear_in_perturbation() {
        let a = alg(&[(FieldTag::C, 2)]);
        let id = crate::pert::TensorElement::identity(a.clone()).realize();
        // hermitian perturbation with a known symmetry violation of size one
        let mut h = Matrix::zeros(4, 4);
        h.set(1, 0, Complex64::new(1.0, 0.0));
        h.set(0, 1, Complex64::new(1.0, 0.0));
        for eps in [1e-2, 1e-6] {
            let m = PertMatrix::new(a.clone(), &id.mat().clone() + &h.scale(Complex64::new(eps, 0.0)))
                .unwrap();
            let r = residual(&m);
            assert!(r > 0.4 * eps && r < 4.0 * eps, "eps {eps}: residual {r}");
        }
    }

    #[test]
    fn agreement_with_membership() {
        // 500 random matrices: members and perturbed non-members, across
        // single blocks and a mixed direct sum
        let algebras = [
            alg(&[(FieldTag::C, 2)]),
            alg(&[(FieldTag::R, 2)]),
            alg(&[(FieldTag::H, 1)]),
            alg(&[(FieldTag::C, 1), (FieldTag::C, 1)]),
            alg(&[(FieldTag::R, 2), (FieldTag::H, 1)]),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0usize;
        for a in &algebras {
            let sys = constraint_system(a);
            let d2 = a.rep_dim() * a.rep_dim();
            for seed in 0..100u64 {
                let m = sample_member(a, seed, 1.0);
                let perturb: f64 = if rng.gen_bool(0.5) { 0.0 } else { 1e-4 };
                let noisy = Matrix::from_fn(d2, d2, |i, j| {
                    m.mat().get(i, j)
                        + Complex64::new(
                            perturb * rng.gen_range(-1.0..1.0),
                            perturb * rng.gen_range(-1.0..1.0),
                        )
                });
                let pm = PertMatrix::new(a.clone(), noisy).unwrap();
                let by_member = pm.is_member(1e-9);
                let by_oracle = sys.residual_at(pm.mat()) <= 1e-9;
                assert_eq!(by_member, by_oracle, "{a} seed {seed} perturb {perturb}");
                checked += 1;
            }
        }
        assert_eq!(checked, 500);
    }

    #[test]
    fn charpoly_matches_jacobi_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 5;
        let g = Matrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = Matrix::from_fn(n, n, |i, j| (g.get(i, j) + g.get(j, i).conj()) * 0.5);
        let jac = hermitian_eigenvalues(&h).unwrap();
        let cp = charpoly_eigenvalues(&h).unwrap();
        assert_eq!(jac.len(), cp.len());
        for (a, b) in jac.iter().zip(&cp) {
            assert!((a - b).abs() < 1e-9, "jacobi {a} vs charpoly {b}");
        }
    }
}
