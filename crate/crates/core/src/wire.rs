//! JSON wire formats.
//!
//! Complex entries are two-element arrays `[re, im]`, matrices arrays of
//! rows, quaternions four-element arrays `[a, b, c, d]`. Algebras are block
//! lists `[{"field": "C", "n": 2}]`. Elements are
//! `{"algebra": ..., "terms": [{"a": ..., "b": ...}]}` and realized members
//! `{"algebra": ..., "mat": ...}`. Values are IEEE doubles; bit-exactness
//! is not promised.

use num_complex::Complex64;
use serde::de::Error as DeError;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{AlgebraDescriptor, Block};
use crate::fluctuation::DiracOperator;
use crate::matalg::{Matrix, Quaternion};
use crate::pert::{PertMatrix, TensorElement};

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut rows = ser.serialize_seq(Some(self.rows()))?;
        for i in 0..self.rows() {
            let row: Vec<[f64; 2]> = (0..self.cols())
                .map(|j| {
                    let z = self.get(i, j);
                    [z.re, z.im]
                })
                .collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(de)?;
        let complex_rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Matrix::from_rows(&complex_rows).map_err(D::Error::custom)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        [self.a, self.b, self.c, self.d].serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let [a, b, c, d] = <[f64; 4]>::deserialize(de)?;
        Ok(Quaternion::new(a, b, c, d))
    }
}

impl Serialize for AlgebraDescriptor {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.blocks().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AlgebraDescriptor {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let blocks: Vec<Block> = Vec::deserialize(de)?;
        AlgebraDescriptor::new(blocks).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    a: Matrix,
    b: Matrix,
}

#[derive(Serialize, Deserialize)]
struct TensorElementWire {
    algebra: AlgebraDescriptor,
    terms: Vec<TermWire>,
}

impl Serialize for TensorElement {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let wire = TensorElementWire {
            algebra: self.algebra().clone(),
            terms: self
                .terms()
                .iter()
                .map(|(a, b)| TermWire { a: a.clone(), b: b.clone() })
                .collect(),
        };
        wire.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TensorElement {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = TensorElementWire::deserialize(de)?;
        TensorElement::new(
            wire.algebra,
            wire.terms.into_iter().map(|t| (t.a, t.b)).collect(),
        )
        .map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PertMatrixWire {
    algebra: AlgebraDescriptor,
    mat: Matrix,
}

impl Serialize for PertMatrix {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let wire = PertMatrixWire {
            algebra: self.algebra().clone(),
            mat: self.mat().clone(),
        };
        wire.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PertMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = PertMatrixWire::deserialize(de)?;
        PertMatrix::new(wire.algebra, wire.mat).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct DiracWire {
    dim: usize,
    mat: Matrix,
}

impl Serialize for DiracOperator {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        DiracWire { dim: self.dim(), mat: self.matrix().clone() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DiracOperator {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let wire = DiracWire::deserialize(de)?;
        if wire.mat.rows() != wire.dim {
            return Err(D::Error::custom(format!(
                "dim field {} does not match matrix size {}",
                wire.dim,
                wire.mat.rows()
            )));
        }
        DiracOperator::new(wire.mat).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::FieldTag;

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::from_fn(2, 3, |i, j| Complex64::new(i as f64, j as f64 - 1.0));
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[[0.0,-1.0],[0.0,0.0],[0.0,1.0]],[[1.0,-1.0],[1.0,0.0],[1.0,1.0]]]");
        let back: Matrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn element_round_trip_and_validation() {
        let alg = AlgebraDescriptor::single(FieldTag::C, 2);
        let e = TensorElement::identity(alg);
        let json = serde_json::to_string(&e).unwrap();
        let back: TensorElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back.terms().len(), 1);

        // a real block with an imaginary entry must be rejected
        let bad = r#"{"algebra":[{"field":"R","n":1}],"terms":[{"a":[[[0.0,1.0]]],"b":[[[1.0,0.0]]]}]}"#;
        assert!(serde_json::from_str::<TensorElement>(bad).is_err());
    }

    #[test]
    fn algebra_rejects_empty() {
        assert!(serde_json::from_str::<AlgebraDescriptor>("[]").is_err());
    }

    #[test]
    fn dirac_requires_hermitian() {
        let bad = r#"{"dim":2,"mat":[[[0.0,0.0],[1.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#;
        assert!(serde_json::from_str::<DiracOperator>(bad).is_err());
        let good = r#"{"dim":2,"mat":[[[0.0,0.0],[0.0,1.0]],[[0.0,-1.0],[0.0,0.0]]]}"#;
        let d: DiracOperator = serde_json::from_str(good).unwrap();
        assert_eq!(d.dim(), 2);
    }
}
