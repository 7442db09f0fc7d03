//! Action of semigroup elements on hermitian operators:
//! `D -> sum_j a_j D b_j = D + sum_j a_j [D, b_j]`.
//!
//! The algebra acts in its defining block-diagonal representation; a
//! representation of multiplicity m (operator size m * d) is handled by
//! letting each leg act as `a (x) 1_m`.

use crate::error::{PertError, Result};
use crate::matalg::{hermitian_eigenvalues, Matrix};
use crate::pert::TensorElement;

/// A finite hermitian operator.
#[derive(Clone, Debug)]
pub struct DiracOperator {
    mat: Matrix,
}

impl DiracOperator {
    /// Wraps a matrix, requiring `||D - D*||_F <= 1e-10`.
    pub fn new(mat: Matrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(PertError::ShapeMismatch(format!(
                "operator must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let res = mat.hermitian_residual();
        if res > 1e-10 {
            return Err(PertError::NotHermitian { residual: res });
        }
        Ok(DiracOperator { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn spectrum(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.mat)
    }
}

/// Applies the raw action `sum_j a_j D b_j` without any membership check.
/// The result need not be hermitian when `e` is not a member.
pub fn fluctuate_unchecked(e: &TensorElement, d: &Matrix) -> Result<Matrix> {
    let rep = e.algebra().rep_dim();
    if !d.rows().is_multiple_of(rep) || !d.is_square() {
        return Err(PertError::ShapeMismatch(format!(
            "operator size {} is not a multiple of the representation dimension {rep}",
            d.rows()
        )));
    }
    let mult = d.rows() / rep;
    let mut out = Matrix::zeros(d.rows(), d.cols());
    for (a, b) in e.terms() {
        let (al, bl);
        let (aa, bb) = if mult == 1 {
            (a, b)
        } else {
            let im = Matrix::identity(mult);
            al = Matrix::kron(a, &im);
            bl = Matrix::kron(b, &im);
            (&al, &bl)
        };
        out = &out + &aa.matmul(d).matmul(bb);
    }
    Ok(out)
}

/// The fluctuation `D -> sum_j a_j D b_j`. Requires `e` to pass membership
/// at the given tolerance (the self-adjointness condition is what makes the
/// result hermitian).
pub fn fluctuate(e: &TensorElement, d: &DiracOperator, tol: f64) -> Result<DiracOperator> {
    let m = e.realize();
    let res = m.membership_residual();
    if res > tol {
        return Err(PertError::NotAMember { residual: res });
    }
    let out = fluctuate_unchecked(e, d.matrix())?;
    DiracOperator::new(out)
}

/// Checks the left-action law
/// `fluctuate(x * y, D) = fluctuate(x, fluctuate(y, D))` at tolerance `tol`.
pub fn action_composition_check(
    x: &TensorElement,
    y: &TensorElement,
    d: &DiracOperator,
    tol: f64,
) -> Result<bool> {
    let xy = x.multiply(y)?;
    let lhs = fluctuate(&xy, d, tol)?;
    let inner = fluctuate(y, d, tol)?;
    let rhs = fluctuate(x, &inner, tol)?;
    Ok(lhs.matrix().diff_norm(rhs.matrix()) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;
    use crate::canonical::sample_member;
    use crate::matalg::FieldTag;
    use crate::unitary::{embed_unitary, random_unitary};
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_dirac(n: usize, seed: u64) -> DiracOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = Matrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = Matrix::from_fn(n, n, |i, j| (g.get(i, j) + g.get(j, i).conj()) * 0.5);
        DiracOperator::new(h).unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        let alg = AlgebraDescriptor::single(FieldTag::C, 2);
        let e = TensorElement::identity(alg);
        let d = random_dirac(2, 1);
        let out = fluctuate(&e, &d, 1e-9).unwrap();
        assert!(out.matrix().diff_norm(d.matrix()) < 1e-13);
    }

    #[test]
    fn diagonal_projectors_extract_diagonal() {
        let alg = AlgebraDescriptor::single(FieldTag::C, 2);
        let e11 = Matrix::unit(2, 0, 0);
        let e22 = Matrix::unit(2, 1, 1);
        let e = TensorElement::new(alg, vec![(e11.clone(), e11), (e22.clone(), e22)]).unwrap();
        let d = random_dirac(2, 2);
        let out = fluctuate(&e, &d, 1e-9).unwrap();
        let diag = Matrix::from_fn(2, 2, |i, j| if i == j { d.matrix().get(i, i) } else { c(0.0, 0.0) });
        assert!(out.matrix().diff_norm(&diag) < 1e-13);
    }

    #[test]
    fn unitary_fluctuation_is_conjugation_and_isospectral() {
        let u = random_unitary(FieldTag::C, 3, 9);
        let e = embed_unitary(&u);
        let d = random_dirac(3, 3);
        let out = fluctuate(&e, &d, 1e-9).unwrap();
        let conj = u.matrix().matmul(d.matrix()).matmul(&u.matrix().adjoint());
        assert!(out.matrix().diff_norm(&conj) < 1e-12);
        let s1 = d.spectrum().unwrap();
        let s2 = out.spectrum().unwrap();
        let dev = s1
            .iter()
            .zip(&s2)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(dev < 1e-9);
    }

    #[test]
    fn action_composition_on_random_members() {
        let alg = AlgebraDescriptor::single(FieldTag::C, 2);
        for seed in 0..10 {
            let x = sample_member(&alg, seed, 0.7).to_element(1e-9).unwrap();
            let y = sample_member(&alg, seed + 1000, 0.7).to_element(1e-9).unwrap();
            let d = random_dirac(2, seed + 2000);
            assert!(action_composition_check(&x, &y, &d, 1e-9).unwrap());
        }
    }

    #[test]
    fn hermiticity_preserved_and_linearity() {
        let alg = AlgebraDescriptor::single(FieldTag::H, 1);
        let e = sample_member(&alg, 5, 0.8).to_element(1e-9).unwrap();
        let d1 = random_dirac(2, 11);
        let d2 = random_dirac(2, 12);
        let f1 = fluctuate(&e, &d1, 1e-9).unwrap();
        let f2 = fluctuate(&e, &d2, 1e-9).unwrap();
        assert!(f1.matrix().hermitian_residual() < 1e-9);
        let (alpha, beta) = (0.3, -1.7);
        let comb = DiracOperator::new(
            &d1.matrix().scale(c(alpha, 0.0)) + &d2.matrix().scale(c(beta, 0.0)),
        )
        .unwrap();
        let fc = fluctuate(&e, &comb, 1e-9).unwrap();
        let expect = &f1.matrix().scale(c(alpha, 0.0)) + &f2.matrix().scale(c(beta, 0.0));
        assert!(fc.matrix().diff_norm(&expect) < 1e-11);
    }

    #[test]
    fn non_member_rejected_but_unchecked_applies() {
        let alg = AlgebraDescriptor::single(FieldTag::C, 2);
        let e = TensorElement::new(
            alg,
            vec![(Matrix::identity(2).scale(c(2.0, 0.0)), Matrix::identity(2))],
        )
        .unwrap();
        let d = random_dirac(2, 21);
        assert!(matches!(
            fluctuate(&e, &d, 1e-9),
            Err(PertError::NotAMember { .. })
        ));
        let raw = fluctuate_unchecked(&e, d.matrix()).unwrap();
        assert!(raw.diff_norm(&d.matrix().scale(c(2.0, 0.0))) < 1e-13);
    }

    #[test]
    fn multiplicity_two_blockwise_action() {
        let alg = AlgebraDescriptor::single(FieldTag::C, 2);
        let u = random_unitary(FieldTag::C, 2, 31);
        let e = embed_unitary(&u);
        let d = random_dirac(4, 32);
        let out = fluctuate(&e, &d, 1e-9).unwrap();
        let big = Matrix::kron(u.matrix(), &Matrix::identity(2));
        let conj = big.matmul(d.matrix()).matmul(&big.adjoint());
        assert!(out.matrix().diff_norm(&conj) < 1e-12);
        let _ = alg;
    }
}
