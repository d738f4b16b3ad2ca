//! Dense complex linear algebra, states, decompositions of the identity and
//! the exact Born-rule oracle.

mod born;
mod decomposition;
mod matrix;
mod state;

pub use born::{born_probabilities, collapse, collapse_luders};
pub(crate) use decomposition::DecompositionDocument;
pub use decomposition::{
    Decomposition, DecompositionKind, Label, PovmDecomposition, ProjectiveDecomposition, Resolution,
};
pub use matrix::{commutes, tensor, ComplexMatrix, C64};
pub use state::QuantumState;
pub(crate) use state::StateDocument;

use rand::Rng;
use rand_distr::StandardNormal;

/// Hermitian matrix with i.i.d. standard normal real and imaginary parts, scaled to unit Frobenius norm.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
    for i in 0..dim {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = C64::new(d, 0.0);
        for j in (i + 1)..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
        }
    }
    let norm = m.norm();
    ComplexMatrix::new(m / C64::new(norm, 0.0)).expect("square")
}

/// Random unitary `cayley(sigma * H)` with `H` from [`random_hermitian`].
pub fn random_unitary_near_identity<R: Rng + ?Sized>(dim: usize, sigma: f64, rng: &mut R) -> ComplexMatrix {
    let h = random_hermitian(dim, rng);
    ComplexMatrix::cayley_unitary(&h, sigma)
}
