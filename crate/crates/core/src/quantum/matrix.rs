use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        if self.dim() <= 4 {
            write!(f, "{}", self.0)?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: rows.first().map_or(0, Vec::len) });
        }
        Ok(Self(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// `|v><v| / <v|v>`.
    pub fn projector_onto(v: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(v);
        let norm2 = v.norm_squared();
        if norm2 == 0.0 || v.is_empty() {
            return Err(Error::InvalidArgument("projector onto zero vector".into()));
        }
        Ok(Self(&v * v.adjoint() / C64::new(norm2, 0.0)))
    }

    pub fn projector_onto_real(v: &[f64]) -> Result<Self> {
        let c: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::projector_onto(&c)
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn pauli_y() -> Self {
        let i = C64::i();
        Self::from_rows(&[vec![C64::ZERO, -i], vec![i, C64::ZERO]]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// `U A U†`
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        self.check_dim(u)?;
        Ok(Self(&u.0 * &self.0 * u.0.adjoint()))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Frobenius norm of `self - other` without allocating.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.as_slice().iter().zip(other.0.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(other.0.iter()).all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (i..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (&self.0 * &self.0).iter().zip(self.0.iter()).all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Eigenvalues and eigenvectors of the Hermitian part, eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, DMatrix<C64>) {
        let h = (&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |i, j| eig.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        self.hermitian_eigen().0
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.eigenvalues_hermitian().iter().all(|&l| l >= -tol)
    }

    /// Spectral norm of a Hermitian matrix.
    pub fn operator_norm_hermitian(&self) -> f64 {
        self.eigenvalues_hermitian().iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Principal square root of a positive semidefinite matrix.
    pub fn psd_sqrt(&self) -> Self {
        let (values, vecs) = self.hermitian_eigen();
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            values.len(),
            values.iter().map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
        ));
        Self(&vecs * d * vecs.adjoint())
    }

    /// Unit eigenvector of the largest eigenvalue (Hermitian part).
    pub fn top_eigenvector(&self) -> Vec<C64> {
        let (_, vecs) = self.hermitian_eigen();
        let n = self.dim();
        vecs.column(n - 1).iter().copied().collect()
    }

    /// Cayley transform `(I - i t H/2)^{-1} (I + i t H/2)`, a unitary for Hermitian `H`.
    pub fn cayley_unitary(generator: &Self, t: f64) -> Self {
        let n = generator.dim();
        let half = C64::new(0.0, 0.5 * t);
        let id = DMatrix::<C64>::identity(n, n);
        let plus = &id + &generator.0 * half;
        let minus = &id - &generator.0 * half;
        let u = minus.lu().solve(&plus).expect("I - i t H / 2 is invertible for Hermitian H");
        Self(u)
    }
}

/// Kronecker product.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// True iff every entry of `AB - BA` has magnitude at most `tol`.
pub fn commutes(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    a.check_dim(b)?;
    let comm = &a.0 * &b.0 - &b.0 * &a.0;
    Ok(comm.iter().all(|z| z.norm() <= tol))
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows: Vec<Vec<[f64; 2]>> =
            (0..n).map(|i| (0..n).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let rows: Vec<Vec<C64>> =
            rows.into_iter().map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect()).collect();
        ComplexMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Serializes complex vectors as `[re, im]` pairs.
pub(crate) mod complex_vec {
    use super::C64;
    use serde::{Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id2() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    #[test]
    fn identity_tensor_identity() {
        assert!(tensor(&id2(), &id2()).approx_eq(&ComplexMatrix::identity(4), 0.0));
    }

    #[test]
    fn mixed_product_property() {
        let z = ComplexMatrix::pauli_z();
        let x = ComplexMatrix::pauli_x();
        let lhs = tensor(&z, &id2()).matmul(&tensor(&id2(), &x)).unwrap();
        assert!(lhs.approx_eq(&tensor(&z, &x), 1e-12));
    }

    #[test]
    fn zx_spectrum_matches_explicit_diagonalization() {
        // Oracle: Z⊗X is block diagonal diag(X, -X); X has eigenvectors (1,±1)/√2.
        let zx = tensor(&ComplexMatrix::pauli_z(), &ComplexMatrix::pauli_x());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let basis =
            [([s, s, 0.0, 0.0], 1.0), ([s, -s, 0.0, 0.0], -1.0), ([0.0, 0.0, s, s], -1.0), ([0.0, 0.0, s, -s], 1.0)];
        for (v, lambda) in basis {
            let vc = DVector::from_iterator(4, v.iter().map(|&x| C64::new(x, 0.0)));
            let av = zx.as_dmatrix() * &vc;
            assert!((av - vc * C64::new(lambda, 0.0)).norm() < 1e-12);
        }
        let ev = zx.eigenvalues_hermitian();
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn commutation_examples() {
        let z = ComplexMatrix::pauli_z();
        let x = ComplexMatrix::pauli_x();
        let tol = crate::DEFAULT_TOL;
        assert!(commutes(&tensor(&z, &id2()), &tensor(&id2(), &x), tol).unwrap());
        assert!(!commutes(&z, &x, tol).unwrap());
        assert!(commutes(&tensor(&z, &x), &tensor(&x, &z), tol).unwrap());
        assert!(commutes(&z, &ComplexMatrix::identity(4), tol).is_err());
    }

    #[test]
    fn cayley_is_unitary() {
        let h = ComplexMatrix::pauli_y().add(&ComplexMatrix::pauli_z()).unwrap();
        let u = ComplexMatrix::cayley_unitary(&h, 0.3);
        let uu = u.matmul(&u.adjoint()).unwrap();
        assert!(uu.approx_eq(&ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let p = ComplexMatrix::projector_onto_real(&[1.0, 2.0]).unwrap().scale(C64::new(0.7, 0.0));
        let r = p.psd_sqrt();
        assert!(r.matmul(&r).unwrap().approx_eq(&p, 1e-12));
    }

    #[test]
    fn serde_uses_re_im_pairs() {
        let y = ComplexMatrix::pauli_y();
        let s = serde_json::to_string(&y).unwrap();
        assert_eq!(s, "[[[0.0,0.0],[-0.0,-1.0]],[[0.0,1.0],[0.0,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, y);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0],[0,0]]]").is_err());
    }
}
