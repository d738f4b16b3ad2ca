use std::fmt;

use serde::{Deserialize, Serialize};

use crate::quantum::{tensor, ComplexMatrix, Label, ProjectiveDecomposition, QuantumState, Resolution, C64};

/// The eight ±1-valued observables of the two-qubit scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Observable {
    Z1,
    X1,
    Z2,
    X2,
    Z1Z2,
    Z1X2,
    X1Z2,
    X1X2,
}

impl Observable {
    pub const ALL: [Observable; 8] = [
        Observable::Z1,
        Observable::X1,
        Observable::Z2,
        Observable::X2,
        Observable::Z1Z2,
        Observable::Z1X2,
        Observable::X1Z2,
        Observable::X1X2,
    ];

    pub fn operator(self) -> ComplexMatrix {
        let (z, x, i) = (ComplexMatrix::pauli_z(), ComplexMatrix::pauli_x(), ComplexMatrix::identity(2));
        match self {
            Observable::Z1 => tensor(&z, &i),
            Observable::X1 => tensor(&x, &i),
            Observable::Z2 => tensor(&i, &z),
            Observable::X2 => tensor(&i, &x),
            Observable::Z1Z2 => tensor(&z, &z),
            Observable::Z1X2 => tensor(&z, &x),
            Observable::X1Z2 => tensor(&x, &z),
            Observable::X1X2 => tensor(&x, &x),
        }
    }

    /// Single-qubit factors of a product observable.
    pub fn factors(self) -> Option<(Observable, Observable)> {
        match self {
            Observable::Z1Z2 => Some((Observable::Z1, Observable::Z2)),
            Observable::Z1X2 => Some((Observable::Z1, Observable::X2)),
            Observable::X1Z2 => Some((Observable::X1, Observable::Z2)),
            Observable::X1X2 => Some((Observable::X1, Observable::X2)),
            _ => None,
        }
    }

    fn product_of(a: Observable, b: Observable) -> Option<Observable> {
        Observable::ALL.into_iter().find(|o| o.factors() == Some((a, b)))
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A joint measurement of two commuting observables.
#[derive(Clone, Debug)]
pub struct Context {
    pub name: String,
    pub pair: (Observable, Observable),
    /// Observables whose values an outcome of this context fixes.
    pub observables: Vec<Observable>,
    /// Joint eigenprojectors `(I + aA)(I + bB)/4`, ordered `(+,+), (+,−), (−,+), (−,−)`.
    pub decomposition: ProjectiveDecomposition,
    /// `values[j][k]`: value of `observables[k]` on outcome `j`.
    pub values: Vec<Vec<i8>>,
}

impl Context {
    fn new(a: Observable, b: Observable) -> Self {
        let id = ComplexMatrix::identity(4);
        let (oa, ob) = (a.operator(), b.operator());
        let signs = [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)];
        let half = |sign: i8, o: &ComplexMatrix| {
            id.add(&o.scale(C64::new(sign as f64, 0.0))).expect("same dimension").scale(C64::new(0.5, 0.0))
        };
        let projectors =
            signs.iter().map(|&(sa, sb)| half(sa, &oa).matmul(&half(sb, &ob)).expect("same dimension")).collect();
        let labels = signs.iter().map(|&(sa, sb)| Label::Tuple(vec![sa as f64, sb as f64])).collect();
        let decomposition = ProjectiveDecomposition::new(projectors, labels).expect("commuting ±1 observables");

        let mut observables = vec![a, b];
        let product = Observable::product_of(a, b);
        observables.extend(product);
        let values = signs
            .iter()
            .map(|&(sa, sb)| {
                let mut v = vec![sa, sb];
                if product.is_some() {
                    v.push(sa * sb);
                }
                v
            })
            .collect();
        Self { name: format!("({a},{b})"), pair: (a, b), observables, decomposition, values }
    }

    pub fn value(&self, outcome: usize, observable: Observable) -> Option<i8> {
        let k = self.observables.iter().position(|&o| o == observable)?;
        Some(self.values[outcome][k])
    }

    pub fn len(&self) -> usize {
        self.decomposition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decomposition.is_empty()
    }
}

/// `(Z1,Z2), (Z1,X2), (X1,Z2), (X1,X2), (Z1X2,X1Z2)`.
pub fn build_contexts() -> Vec<Context> {
    use Observable::*;
    [(Z1, Z2), (Z1, X2), (X1, Z2), (X1, X2), (Z1X2, X1Z2)].into_iter().map(|(a, b)| Context::new(a, b)).collect()
}

/// `(|00⟩ + |11⟩)/√2` in the `Z` product basis.
pub fn phi_plus() -> QuantumState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    QuantumState::pure_real(&[h, 0.0, 0.0, h]).expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{born_probabilities, commutes};
    use crate::DEFAULT_TOL;

    #[test]
    fn five_contexts_with_four_outcomes() {
        let cs = build_contexts();
        assert_eq!(cs.len(), 5);
        for c in &cs {
            assert_eq!(c.len(), 4);
            let (a, b) = c.pair;
            assert!(commutes(&a.operator(), &b.operator(), DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn projectors_are_rank_one() {
        for c in build_contexts() {
            for p in c.decomposition.projectors() {
                assert!((p.trace().re - 1.0).abs() < 1e-12, "{}", c.name);
            }
        }
    }

    #[test]
    fn tabulated_values_are_eigenvalues() {
        for c in build_contexts() {
            for (j, p) in c.decomposition.projectors().iter().enumerate() {
                for (k, o) in c.observables.iter().enumerate() {
                    let op = o.operator();
                    let lhs = op.matmul(p).unwrap();
                    let rhs = p.scale(C64::new(c.values[j][k] as f64, 0.0));
                    assert!(lhs.approx_eq(&rhs, 1e-12), "{} outcome {j} {o}", c.name);
                }
            }
        }
    }

    #[test]
    fn phi_plus_has_both_forms() {
        let h = 0.5;
        // (|++⟩ + |−−⟩)/√2 expanded in the Z basis.
        let plus_plus = [h, h, h, h];
        let minus_minus = [h, -h, -h, h];
        let amps: Vec<f64> =
            (0..4).map(|i| (plus_plus[i] + minus_minus[i]) * std::f64::consts::FRAC_1_SQRT_2).collect();
        let x_form = QuantumState::pure_real(&amps).unwrap();
        assert!(x_form.approx_eq(&phi_plus(), 1e-12));
    }

    #[test]
    fn phi_plus_correlations_are_certain() {
        let s = phi_plus();
        let cs = build_contexts();
        let p0 = born_probabilities(&s, &cs[0].decomposition).unwrap();
        assert!((p0[0] + p0[3] - 1.0).abs() < 1e-12);
        let p3 = born_probabilities(&s, &cs[3].decomposition).unwrap();
        assert!((p3[0] + p3[3] - 1.0).abs() < 1e-12);
        let p4 = born_probabilities(&s, &cs[4].decomposition).unwrap();
        assert!((p4[1] + p4[2] - 1.0).abs() < 1e-12);
    }
}
