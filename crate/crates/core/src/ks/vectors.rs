use std::collections::HashSet;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::quantum::ComplexMatrix;

/// A named set of rays in `R^dim`.
///
/// Exact sets keep their integer components (over a common denominator) and
/// are tested for orthogonality in integer arithmetic. Real sets hold unit
/// vectors and use a tolerance. Antiparallel or repeated entries are rejected
/// at construction: colourings belong to projectors, not signed vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSet {
    name: String,
    dim: usize,
    denominator: Option<u64>,
    integer: Option<Vec<Vec<i64>>>,
    unit: Vec<Vec<f64>>,
}

/// Primitive, sign-normalized form of an integer vector.
pub(crate) fn canonical_ray(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    let mut out: Vec<i64> = v.iter().map(|&x| x / g).collect();
    if out.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        out.iter_mut().for_each(|x| *x = -*x);
    }
    out
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

impl VectorSet {
    pub fn from_integer(name: impl Into<String>, dim: usize, denominator: u64, vectors: Vec<Vec<i64>>) -> Result<Self> {
        let name = name.into();
        if denominator == 0 {
            return Err(Error::InvalidVectorSet("denominator must be positive".into()));
        }
        Self::check_shape(dim, vectors.iter().map(Vec::len))?;
        let mut seen = HashSet::new();
        for (i, v) in vectors.iter().enumerate() {
            if v.iter().all(|&x| x == 0) {
                return Err(Error::InvalidVectorSet(format!("vector {i} is zero")));
            }
            if !seen.insert(canonical_ray(v)) {
                return Err(Error::InvalidVectorSet(format!(
                    "vector {i} duplicates an earlier ray (equal or antiparallel)"
                )));
            }
        }
        let unit = vectors.iter().map(|v| normalized(&v.iter().map(|&x| x as f64).collect::<Vec<_>>())).collect();
        Ok(Self { name, dim, denominator: Some(denominator), integer: Some(vectors), unit })
    }

    pub fn from_real(name: impl Into<String>, dim: usize, vectors: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let name = name.into();
        Self::check_shape(dim, vectors.iter().map(Vec::len))?;
        for (i, v) in vectors.iter().enumerate() {
            let n2: f64 = v.iter().map(|x| x * x).sum();
            if (n2 - 1.0).abs() > tol {
                return Err(Error::InvalidVectorSet(format!("vector {i} has squared norm {n2}, not 1")));
            }
        }
        for i in 0..vectors.len() {
            for j in 0..i {
                let d: f64 = vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
                if (d.abs() - 1.0).abs() <= tol {
                    return Err(Error::InvalidVectorSet(format!(
                        "vectors {j} and {i} are the same ray (equal or antiparallel)"
                    )));
                }
            }
        }
        Ok(Self { name, dim, denominator: None, integer: None, unit: vectors })
    }

    fn check_shape(dim: usize, lens: impl Iterator<Item = usize>) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidVectorSet("dimension must be positive".into()));
        }
        let mut any = false;
        for (i, len) in lens.enumerate() {
            any = true;
            if len != dim {
                return Err(Error::InvalidVectorSet(format!("vector {i} has {len} components, expected {dim}")));
            }
        }
        if !any {
            return Err(Error::Empty("vector set"));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.unit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unit.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.integer.is_some()
    }

    pub fn denominator(&self) -> Option<u64> {
        self.denominator
    }

    pub fn unit_vector(&self, i: usize) -> &[f64] {
        &self.unit[i]
    }

    pub fn integer_vector(&self, i: usize) -> Option<&[i64]> {
        self.integer.as_ref().map(|v| v[i].as_slice())
    }

    /// Exact integer test for exact sets, `|<u,v>| <= tol` otherwise.
    pub fn orthogonal(&self, i: usize, j: usize, tol: f64) -> bool {
        match &self.integer {
            Some(int) => int[i].iter().zip(&int[j]).map(|(a, b)| a * b).sum::<i64>() == 0,
            None => {
                let d: f64 = self.unit[i].iter().zip(&self.unit[j]).map(|(a, b)| a * b).sum();
                d.abs() <= tol
            }
        }
    }

    pub fn projector(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::projector_onto_real(&self.unit[i]).expect("vectors are nonzero")
    }

    /// The sub-collection at `indices`, in that order.
    pub fn subset(&self, indices: &[usize], name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            dim: self.dim,
            denominator: self.denominator,
            integer: self.integer.as_ref().map(|v| indices.iter().map(|&i| v[i].clone()).collect()),
            unit: indices.iter().map(|&i| self.unit[i].clone()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antiparallel_integer_vectors_are_rejected() {
        let r = VectorSet::from_integer("x", 3, 1, vec![vec![1, 0, 0], vec![-2, 0, 0]]);
        assert!(r.is_err());
    }

    #[test]
    fn antiparallel_real_vectors_are_rejected() {
        let r = VectorSet::from_real("x", 2, vec![vec![1.0, 0.0], vec![-1.0, 0.0]], 1e-9);
        assert!(r.is_err());
    }

    #[test]
    fn non_unit_real_vectors_are_rejected() {
        assert!(VectorSet::from_real("x", 2, vec![vec![1.0, 1.0]], 1e-9).is_err());
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(VectorSet::from_integer("x", 3, 1, vec![vec![1, 0]]).is_err());
    }

    #[test]
    fn canonical_form() {
        assert_eq!(canonical_ray(&[0, -2, 4]), vec![0, 1, -2]);
        assert_eq!(canonical_ray(&[3, 6, 0]), vec![1, 2, 0]);
    }
}
