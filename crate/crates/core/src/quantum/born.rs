use super::decomposition::{ProjectiveDecomposition, Resolution};
use super::matrix::{ComplexMatrix, C64};
use super::state::{trace_of_product, QuantumState};
use crate::error::{Error, Result};

/// `p_j = Tr(rho P_j)` for each operator of the decomposition.
///
/// Values within floating-point noise of the unit interval are clamped into it.
pub fn born_probabilities<R: Resolution + ?Sized>(state: &QuantumState, decomposition: &R) -> Result<Vec<f64>> {
    if state.dim() != decomposition.dim() {
        return Err(Error::DimensionMismatch { expected: decomposition.dim(), found: state.dim() });
    }
    let rho = state.density_matrix();
    Ok(decomposition.operators().iter().map(|p| trace_of_product(rho, p).clamp(0.0, 1.0)).collect())
}

/// Post-measurement state `P_j rho P_j / Tr(rho P_j)`.
pub fn collapse(
    state: &QuantumState,
    decomposition: &ProjectiveDecomposition,
    outcome_index: usize,
) -> Result<QuantumState> {
    let p = checked_operator(state, decomposition, outcome_index)?;
    conditioned(state, p, outcome_index)
}

/// Lüders update `sqrt(E) rho sqrt(E) / Tr(rho E)`; equals [`collapse`] for projectors.
pub fn collapse_luders<R: Resolution + ?Sized>(
    state: &QuantumState,
    decomposition: &R,
    outcome_index: usize,
) -> Result<QuantumState> {
    let e = checked_operator(state, decomposition, outcome_index)?;
    conditioned(state, &e.psd_sqrt(), outcome_index)
}

fn checked_operator<'a, R: Resolution + ?Sized>(
    state: &QuantumState,
    decomposition: &'a R,
    outcome_index: usize,
) -> Result<&'a ComplexMatrix> {
    if state.dim() != decomposition.dim() {
        return Err(Error::DimensionMismatch { expected: decomposition.dim(), found: state.dim() });
    }
    decomposition
        .operators()
        .get(outcome_index)
        .ok_or(Error::OutcomeOutOfRange { index: outcome_index, len: decomposition.len() })
}

// Conditions on Kraus operator `k` (Hermitian here).
fn conditioned(state: &QuantumState, k: &ComplexMatrix, outcome: usize) -> Result<QuantumState> {
    let kk = k.matmul(k)?;
    let prob = state.expectation(&kk)?;
    if prob <= crate::DEFAULT_TOL {
        return Err(Error::ZeroProbability { outcome, probability: prob });
    }
    if let Some(amps) = state.amplitudes() {
        let m = k.as_dmatrix();
        let v = nalgebra::DVector::from_column_slice(amps);
        let w = m * v / C64::new(prob.sqrt(), 0.0);
        return Ok(QuantumState::from_amplitudes_unchecked(w.iter().copied().collect()));
    }
    let rho = state.density_matrix();
    let out = k.matmul(rho)?.matmul(k)?.scale(C64::new(1.0 / prob, 0.0));
    Ok(QuantumState::from_density_unchecked(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::decomposition::Label;
    use crate::quantum::matrix::tensor;

    fn z_basis() -> ProjectiveDecomposition {
        ProjectiveDecomposition::computational(2)
    }

    fn phi_plus() -> QuantumState {
        QuantumState::pure_real(&[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn product_eigenspaces(a: &ComplexMatrix, b: &ComplexMatrix) -> ProjectiveDecomposition {
        let ab = tensor(a, b);
        let id = ComplexMatrix::identity(4);
        let half = C64::new(0.5, 0.0);
        let plus = id.add(&ab).unwrap().scale(half);
        let minus = id.sub(&ab).unwrap().scale(half);
        ProjectiveDecomposition::new(vec![plus, minus], vec![Label::Real(1.0), Label::Real(-1.0)]).unwrap()
    }

    #[test]
    fn phi_plus_zz_product_is_plus_one() {
        let z = ComplexMatrix::pauli_z();
        let p = born_probabilities(&phi_plus(), &product_eigenspaces(&z, &z)).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1].abs() < 1e-12);
    }

    #[test]
    fn eigenstate_gives_certain_outcome() {
        let p = born_probabilities(&QuantumState::basis(2, 0), &z_basis()).unwrap();
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn maximally_mixed_is_uniform_on_any_triad() {
        let s = 1.0 / 2f64.sqrt();
        let triad =
            ProjectiveDecomposition::from_real_basis(&[vec![s, s, 0.0], vec![s, -s, 0.0], vec![0.0, 0.0, 1.0]], None)
                .unwrap();
        let p = born_probabilities(&QuantumState::maximally_mixed(3), &triad).unwrap();
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(born_probabilities(&QuantumState::basis(3, 0), &z_basis()).is_err());
    }

    #[test]
    fn povm_of_projectors_matches_projective_exactly() {
        let s = QuantumState::pure_real(&[0.3, 0.9]).unwrap();
        let d = z_basis();
        assert_eq!(born_probabilities(&s, &d).unwrap(), born_probabilities(&s, &d.as_povm()).unwrap());
    }

    #[test]
    fn collapse_of_eigenstate_is_unchanged() {
        let s = QuantumState::basis(2, 0);
        let c = collapse(&s, &z_basis(), 0).unwrap();
        assert!(c.approx_eq(&s, 1e-15));
        assert!(collapse(&s, &z_basis(), 1).is_err());
    }

    #[test]
    fn collapse_phi_plus_keeps_xx_correlation() {
        let z = ComplexMatrix::pauli_z();
        let x = ComplexMatrix::pauli_x();
        let c = collapse(&phi_plus(), &product_eigenspaces(&z, &z), 0).unwrap();
        let p = born_probabilities(&c, &product_eigenspaces(&x, &x)).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_collapse_yields_projected_vector() {
        let v = [0.6, 0.8];
        let d = ProjectiveDecomposition::from_real_basis(&[v.to_vec(), vec![0.8, -0.6]], None).unwrap();
        let mixed = QuantumState::maximally_mixed(2);
        let c = collapse(&mixed, &d, 0).unwrap();
        assert!(c.approx_eq(&QuantumState::pure_real(&v).unwrap(), 1e-12));
    }

    #[test]
    fn luders_equals_projective_collapse_on_projectors() {
        let s = QuantumState::pure_real(&[0.3, 0.9]).unwrap();
        let d = z_basis();
        let a = collapse(&s, &d, 1).unwrap();
        let b = collapse_luders(&s, &d.as_povm(), 1).unwrap();
        assert!(a.approx_eq(&b, 1e-12));
    }
}
