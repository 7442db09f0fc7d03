//! Quaternions and their 2x2 complex image.
//!
//! All quaternionic linear algebra in this crate is done inside the complex
//! image: a quaternion `a + bi + cj + dk` becomes the matrix
//! `[[alpha, beta], [-conj(beta), conj(alpha)]]` with `alpha = a + bi`,
//! `beta = c + di`. The image is exactly the set of 2x2 complex matrices `A`
//! with `Jhat * conj(A) = A * Jhat`, where `Jhat = e12 - e21`.

use num_complex::Complex64;

use super::matrix::Matrix;

/// Quaternion with real coefficients of 1, i, j, k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    pub fn one() -> Self {
        Quaternion::new(1.0, 0.0, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        Quaternion::new(0.0, 0.0, 0.0, 0.0)
    }

    /// Conjugate: fixes the real part, negates i, j, k parts.
    pub fn conj(&self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Quaternion::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn add(&self, o: &Quaternion) -> Self {
        Quaternion::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn sub(&self, o: &Quaternion) -> Self {
        Quaternion::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    /// Hamilton product with ij = k, jk = i, ki = j.
    pub fn mul(&self, o: &Quaternion) -> Self {
        Quaternion::new(
            self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        )
    }
}

/// The matrix `Jhat = e12 - e21` whose conjugation commutant inside
/// 2x2 complex matrices is the quaternion image.
pub fn j_hat() -> Matrix {
    let mut j = Matrix::zeros(2, 2);
    j.set(0, 1, Complex64::new(1.0, 0.0));
    j.set(1, 0, Complex64::new(-1.0, 0.0));
    j
}

/// Embeds a quaternion as a 2x2 complex matrix. A real-algebra
/// *-homomorphism: products map to products and conjugation to the adjoint.
pub fn embed_quaternion(q: &Quaternion) -> Matrix {
    let alpha = Complex64::new(q.a, q.b);
    let beta = Complex64::new(q.c, q.d);
    let mut m = Matrix::zeros(2, 2);
    m.set(0, 0, alpha);
    m.set(0, 1, beta);
    m.set(1, 0, -beta.conj());
    m.set(1, 1, alpha.conj());
    m
}
