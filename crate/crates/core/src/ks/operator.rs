use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{commutes, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Sum,
    Product,
}

/// First failure of `V(A+B) = V(A)+V(B)` or `V(AB) = V(A)V(B)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorViolation {
    pub rule: Rule,
    pub a: usize,
    pub b: usize,
    /// Index of the family member equal to `A+B` or `AB`.
    pub result: usize,
    pub expected: f64,
    pub found: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "violation", rename_all = "snake_case")]
pub enum OperatorVerdict {
    Valid,
    Violation(OperatorViolation),
}

impl OperatorVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, OperatorVerdict::Valid)
    }
}

/// Checks the KS criteria on a family of Hermitian operators.
///
/// For every commuting pair `(A, B)` (including `A = B`) whose sum or product
/// is itself a member of the family, the assigned values must satisfy the sum
/// and product rules within `tol`. Pairs whose sum/product lies outside the
/// family impose no constraint.
pub fn validate_operator_colouring(operators: &[ComplexMatrix], values: &[f64], tol: f64) -> Result<OperatorVerdict> {
    if operators.len() != values.len() {
        return Err(Error::InvalidArgument(format!("{} values for {} operators", values.len(), operators.len())));
    }
    let Some(first) = operators.first() else {
        return Ok(OperatorVerdict::Valid);
    };
    let dim = first.dim();
    for (i, (op, &v)) in operators.iter().zip(values).enumerate() {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: op.dim() });
        }
        if !op.is_hermitian(tol) {
            return Err(Error::NotHermitian { index: i });
        }
        if !op.eigenvalues_hermitian().iter().any(|l| (l - v).abs() <= tol) {
            return Err(Error::ValueOutsideSpectrum { index: i, value: v });
        }
    }

    let member = |m: &ComplexMatrix| operators.iter().position(|o| o.approx_eq(m, tol));

    for i in 0..operators.len() {
        for j in i..operators.len() {
            let (a, b) = (&operators[i], &operators[j]);
            if !commutes(a, b, tol)? {
                continue;
            }
            if let Some(k) = member(&a.add(b)?) {
                let expected = values[i] + values[j];
                if (values[k] - expected).abs() > tol {
                    return Ok(OperatorVerdict::Violation(OperatorViolation {
                        rule: Rule::Sum,
                        a: i,
                        b: j,
                        result: k,
                        expected,
                        found: values[k],
                    }));
                }
            }
            if let Some(k) = member(&a.matmul(b)?) {
                let expected = values[i] * values[j];
                if (values[k] - expected).abs() > tol {
                    return Ok(OperatorVerdict::Violation(OperatorViolation {
                        rule: Rule::Product,
                        a: i,
                        b: j,
                        result: k,
                        expected,
                        found: values[k],
                    }));
                }
            }
        }
    }
    Ok(OperatorVerdict::Valid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::tensor;

    fn id2() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    #[test]
    fn identity_with_value_one_is_valid() {
        let v = validate_operator_colouring(&[ComplexMatrix::identity(3)], &[1.0], 1e-9).unwrap();
        assert!(v.is_valid());
    }

    #[test]
    fn identity_value_outside_spectrum_is_error() {
        let r = validate_operator_colouring(&[ComplexMatrix::identity(3)], &[0.0], 1e-9);
        assert!(matches!(r, Err(Error::ValueOutsideSpectrum { index: 0, .. })));
    }

    #[test]
    fn non_hermitian_is_error() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(validate_operator_colouring(&[m], &[0.0], 1e-9), Err(Error::NotHermitian { index: 0 })));
    }

    #[test]
    fn product_rule_violation_detected() {
        let z = ComplexMatrix::pauli_z();
        let x = ComplexMatrix::pauli_x();
        let ops = [tensor(&z, &id2()), tensor(&id2(), &x), tensor(&z, &x)];
        let v = validate_operator_colouring(&ops, &[1.0, 1.0, -1.0], 1e-9).unwrap();
        let OperatorVerdict::Violation(viol) = v else { panic!("expected violation") };
        assert_eq!(viol.rule, Rule::Product);
        assert_eq!((viol.a, viol.b, viol.result), (0, 1, 2));
        assert!(validate_operator_colouring(&ops, &[1.0, -1.0, -1.0], 1e-9).unwrap().is_valid());
    }

    #[test]
    fn sum_rule_on_projector_pair() {
        let p = ComplexMatrix::projector_onto_real(&[1.0, 0.0]).unwrap();
        let q = ComplexMatrix::projector_onto_real(&[0.0, 1.0]).unwrap();
        let ops = [p, q, id2()];
        assert!(validate_operator_colouring(&ops, &[1.0, 0.0, 1.0], 1e-9).unwrap().is_valid());
        let bad = validate_operator_colouring(&ops, &[1.0, 1.0, 1.0], 1e-9).unwrap();
        assert!(matches!(bad, OperatorVerdict::Violation(OperatorViolation { rule: Rule::Sum, .. })));
    }
}
