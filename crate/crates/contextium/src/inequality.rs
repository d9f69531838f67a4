//! Noncontextuality inequalities: a signed list of contexts, the
//! noncontextual bound `b`, and the quantum value (which always equals the
//! number of contexts).
//!
//! Positive contexts enter with coefficient +1 and negative contexts with
//! -1, so quantum mechanics saturates every term regardless of the state.

use serde::{Deserialize, Serialize};

use crate::context::{
    self, count_contexts_closed_form, count_positive_closed_form, enumerate_contexts, Context,
    MAX_ENUMERATION_QUBITS,
};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub context: Context,
    pub coeff: i8,
}

/// `sum(coeff_i * <C_i>) <= bound` for every noncontextual hidden-variable
/// model; quantum mechanics reaches `quantum_value = N` for any state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub n: usize,
    pub terms: Vec<Term>,
    pub bound: i64,
    pub quantum_value: i64,
}

impl Inequality {
    /// Build an inequality from contexts, taking each coefficient equal to
    /// the context sign. The bound must come from a solver or a counting
    /// argument; it is the caller's claim and is re-checked by tests.
    pub fn from_contexts(
        n: usize,
        contexts: impl IntoIterator<Item = Context>,
        bound: i64,
    ) -> Result<Self, Error> {
        let terms: Vec<Term> = contexts
            .into_iter()
            .map(|context| Term {
                context,
                coeff: context.sign(),
            })
            .collect();
        for term in &terms {
            if term.context.n() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: term.context.n(),
                });
            }
        }
        let quantum_value = terms.len() as i64;
        Ok(Inequality {
            n,
            terms,
            bound,
            quantum_value,
        })
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Distinct observables appearing in the terms, in canonical order.
    pub fn observables(&self) -> Vec<crate::PauliString> {
        let mut obs: Vec<_> = self
            .terms
            .iter()
            .flat_map(|t| t.context.members().iter().copied())
            .collect();
        obs.sort();
        obs.dedup();
        obs
    }

    /// Tolerated error per correlation, `(quantum_value - bound) / N`.
    pub fn tolerated_error(&self) -> f64 {
        (self.quantum_value - self.bound) as f64 / self.num_terms() as f64
    }
}

impl<'de> Deserialize<'de> for Inequality {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            terms: Vec<Term>,
            bound: i64,
            quantum_value: i64,
        }
        let raw = Raw::deserialize(deserializer)?;
        for term in &raw.terms {
            if term.context.n() != raw.n {
                return Err(serde::de::Error::custom(format!(
                    "term on {} qubits in an n={} inequality",
                    term.context.n(),
                    raw.n
                )));
            }
            if term.coeff != term.context.sign() {
                return Err(serde::de::Error::custom(
                    "coefficient does not match context sign",
                ));
            }
        }
        if raw.quantum_value != raw.terms.len() as i64 {
            return Err(serde::de::Error::custom(
                "quantum value does not equal the number of terms",
            ));
        }
        Ok(Inequality {
            n: raw.n,
            terms: raw.terms,
            bound: raw.bound,
            quantum_value: raw.quantum_value,
        })
    }
}

/// The six-context Peres-Mermin inequality: rows positive, columns negative,
/// noncontextual bound 4, quantum value 6.
pub fn peres_mermin_inequality() -> Inequality {
    let lines = context::peres_mermin_table()
        .line_contexts()
        .expect("canonical table");
    Inequality::from_contexts(2, lines, 4).expect("canonical inequality")
}

/// The tested single-negative-column variant: five positive lines and the
/// {XX, YY, ZZ} column, bound 4.
pub fn table2_inequality() -> Inequality {
    let lines = context::table2_table()
        .line_contexts()
        .expect("canonical table");
    Inequality::from_contexts(2, lines, 4).expect("canonical inequality")
}

/// The optimal two-qubit inequality over all 15 contexts, bound 9.
pub fn two_qubit_15_inequality() -> Inequality {
    full_inequality(2).expect("n=2 is in range")
}

/// The full inequality over every context on `n` qubits, carrying the
/// counting-argument bound `2 S(n) - N(n)` (S = number of positive
/// contexts).
///
/// That value is proven exact only at n = 2 (brute force gives s = 12). At
/// n = 3 the crate's stochastic solver finds verified assignments
/// satisfying 252 > S(3) = 225 contexts, so for n >= 3 `bound` is a claimed
/// value, not the true noncontextual maximum; see the solver module docs.
pub fn full_inequality(n: usize) -> Result<Inequality, Error> {
    if !(2..=MAX_ENUMERATION_QUBITS).contains(&n) {
        return Err(Error::Capability {
            operation: "full inequality construction",
            n,
            min: 2,
            max: MAX_ENUMERATION_QUBITS,
        });
    }
    let contexts = enumerate_contexts(n)?;
    let total = count_contexts_closed_form(n)? as i64;
    let positive = count_positive_closed_form(n)? as i64;
    let bound = 2 * positive - total;
    Inequality::from_contexts(n, contexts, bound)
}
