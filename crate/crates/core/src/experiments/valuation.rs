use serde::{Deserialize, Serialize};

use super::contexts::{Context, Observable};
use crate::error::Result;
use crate::quantum::QuantumState;

/// Values of `Z1, X1, Z2, X2`; product observables follow by multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalValuation {
    pub z1: i8,
    pub x1: i8,
    pub z2: i8,
    pub x2: i8,
}

impl GlobalValuation {
    /// All 16 assignments, `+1` before `−1` in each slot.
    pub fn all() -> impl Iterator<Item = GlobalValuation> {
        (0..16u8).map(|bits| {
            let v = |k: u8| if bits >> (3 - k) & 1 == 0 { 1 } else { -1 };
            GlobalValuation { z1: v(0), x1: v(1), z2: v(2), x2: v(3) }
        })
    }

    pub fn value(&self, o: Observable) -> i8 {
        use Observable::*;
        match o {
            Z1 => self.z1,
            X1 => self.x1,
            Z2 => self.z2,
            X2 => self.x2,
            _ => {
                let (a, b) = o.factors().expect("product observable");
                self.value(a) * self.value(b)
            }
        }
    }

    /// Outcome index this valuation selects in `context`.
    pub fn outcome_in(&self, context: &Context) -> usize {
        let (a, b) = context.pair;
        let bit = |o| usize::from(self.value(o) < 0);
        2 * bit(a) + bit(b)
    }
}

/// A certain relation: the product of the listed observables' values is `sign`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub observables: Vec<Observable>,
    pub sign: i8,
}

impl Constraint {
    pub fn holds(&self, v: &GlobalValuation) -> bool {
        self.observables.iter().map(|&o| v.value(o)).product::<i8>() == self.sign
    }
}

/// The perfect correlations a state exhibits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub constraints: Vec<Constraint>,
}

impl CorrelationTable {
    /// `V(Z1Z2) = 1`, `V(X1X2) = 1`, `V(Z1X2) V(X1Z2) = −1`.
    pub fn ideal() -> Self {
        use Observable::*;
        Self {
            constraints: vec![
                Constraint { observables: vec![Z1Z2], sign: 1 },
                Constraint { observables: vec![X1X2], sign: 1 },
                Constraint { observables: vec![Z1X2, X1Z2], sign: -1 },
            ],
        }
    }

    /// Every pair product within a context whose expectation is `±1` within `tol`,
    /// together with every certain single observable.
    pub fn from_state(state: &QuantumState, contexts: &[Context], tol: f64) -> Result<Self> {
        let mut constraints: Vec<Constraint> = Vec::new();
        let mut push = |c: Constraint| {
            if !constraints.contains(&c) {
                constraints.push(c);
            }
        };
        for ctx in contexts {
            let obs = &ctx.observables;
            for i in 0..obs.len() {
                let e = state.expectation(&obs[i].operator())?;
                if (e.abs() - 1.0).abs() <= tol {
                    push(Constraint { observables: vec![obs[i]], sign: e.signum() as i8 });
                }
                for j in (i + 1)..obs.len() {
                    let op = obs[i].operator().matmul(&obs[j].operator())?;
                    let e = state.expectation(&op)?;
                    if (e.abs() - 1.0).abs() <= tol {
                        push(Constraint { observables: vec![obs[i], obs[j]], sign: e.signum() as i8 });
                    }
                }
            }
        }
        Ok(Self { constraints })
    }

    /// Global valuations satisfying every constraint.
    pub fn consistent_valuations(&self) -> Vec<GlobalValuation> {
        GlobalValuation::all().filter(|v| self.constraints.iter().all(|c| c.holds(v))).collect()
    }
}

/// Whether per-context outcomes (None for contexts not run) extend to one global valuation.
pub fn extends_to_global(contexts: &[Context], outcomes: &[Option<usize>]) -> bool {
    GlobalValuation::all().any(|v| contexts.iter().zip(outcomes).all(|(c, o)| o.is_none_or(|j| v.outcome_in(c) == j)))
}
