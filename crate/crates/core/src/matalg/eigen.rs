//! Hermitian eigenvalues by cyclic Jacobi rotations.

use num_complex::Complex64;

use super::matrix::Matrix;
use crate::error::{PertError, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a hermitian matrix, ascending.
///
/// Each Jacobi step phases the off-diagonal pivot to a real value and then
/// applies the classical symmetric rotation; the off-diagonal mass decreases
/// monotonically. Input is rejected when `||m - m*||_F` exceeds
/// `1e-9 * max(1, ||m||_F)`.
pub fn hermitian_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(PertError::ShapeMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let scale = m.frobenius_norm().max(1.0);
    let herm = m.hermitian_residual();
    if herm > 1e-9 * scale {
        return Err(PertError::NotHermitian { residual: herm });
    }

    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    // Work on the exactly hermitian part so roundoff in the input cannot bias
    // the iteration.
    let mut a = Matrix::from_fn(n, n, |i, j| (m.get(i, j) + m.get(j, i).conj()) * 0.5);

    let tol = 1e-14 * scale;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += a.get(i, j).norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(eig);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let abs = apq.norm();
                if abs <= 1e-300 {
                    continue;
                }
                // a_pq = |a_pq| e^{i phi}; D = diag(1, e^{-i phi}) makes the
                // pivot real, then the classical rotation R = [[c, s], [-s, c]]
                // annihilates it. Combined: V = D R with columns
                //   V = [[c, s], [-e^{-i phi} s, e^{-i phi} c]].
                let phase_conj = apq.conj() / abs;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * abs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let v11 = Complex64::new(c, 0.0);
                let v12 = Complex64::new(s, 0.0);
                let v21 = phase_conj * (-s);
                let v22 = phase_conj * c;
                // a <- V* a V
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * v11 + akq * v21);
                    a.set(k, q, akp * v12 + akq * v22);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, v11.conj() * apk + v21.conj() * aqk);
                    a.set(q, k, v12.conj() * apk + v22.conj() * aqk);
                }
            }
        }
    }
    Err(PertError::NoConvergence)
}
