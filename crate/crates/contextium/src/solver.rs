//! Noncontextual hidden-variable solvers.
//!
//! A noncontextual model assigns a fixed +-1 outcome to every observable.
//! Finding the noncontextual bound of an inequality is MAX-XOR: maximize the
//! number of terms whose outcome product matches the context sign. Exact
//! brute force and branch-and-bound cover the two-qubit instances; a
//! WalkSAT-style local search provides evidence-grade results where
//! exhaustive solving is infeasible.
//!
//! The counting argument for the full-context inequality claims that at most
//! S(n) (the number of positive contexts) predictions are simultaneously
//! satisfiable, giving the bound 2 S(n) - N(n). Brute force confirms the
//! claim at n = 2 (s = 12 of 15). At n = 3 it is false: local search
//! reproducibly finds assignments satisfying 252 of the 315 contexts,
//! exceeding S(3) = 225 (witnesses re-verify through [`satisfied_count`] and
//! against dense matrix products). Every solver therefore reports whether
//! its result exceeds the claimed ceiling instead of trusting it; see
//! [`SolveReport::exceeds_counting_ceiling`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::context::{count_contexts_closed_form, count_positive_closed_form, KSTable};
use crate::inequality::Inequality;
use crate::pauli::PauliString;
use crate::Error;

/// Exhaustive enumeration cap: at most 2^24 assignments.
pub const BRUTE_FORCE_VAR_CAP: usize = 24;

/// A +-1 value for every observable in scope.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Assignment {
    values: BTreeMap<PauliString, i8>,
}

impl Assignment {
    pub fn new(values: BTreeMap<PauliString, i8>) -> Result<Self, Error> {
        if values.values().any(|v| *v != 1 && *v != -1) {
            return Err(Error::Invariant("assignment values must be +-1".into()));
        }
        Ok(Assignment { values })
    }

    /// Every observable of the inequality set to +1. Satisfies all positive
    /// contexts by construction.
    pub fn all_plus(ineq: &Inequality) -> Self {
        Assignment {
            values: ineq.observables().into_iter().map(|o| (o, 1)).collect(),
        }
    }

    pub fn get(&self, observable: &PauliString) -> Option<i8> {
        self.values.get(observable).copied()
    }

    pub fn values(&self) -> &BTreeMap<PauliString, i8> {
        &self.values
    }

    fn from_bits(vars: &[PauliString], bits: &[bool]) -> Self {
        Assignment {
            values: vars
                .iter()
                .zip(bits)
                .map(|(v, negated)| (*v, if *negated { -1 } else { 1 }))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveMethod {
    #[serde(rename = "exact-bruteforce")]
    ExactBruteForce,
    #[serde(rename = "branch-and-bound")]
    BranchAndBound,
    #[serde(rename = "local-search")]
    LocalSearch,
}

/// Outcome of a bound computation. `optimal` is true only for exact methods;
/// `effort` counts enumerated assignments, explored nodes, or flips.
///
/// For the full-context inequality, `counting_ceiling` carries the claimed
/// maximum S(n) and `exceeds_counting_ceiling` is set when the found s beats
/// it — a counterexample to the claimed bound 2 S(n) - N(n), which happens
/// reproducibly for n >= 3. Callers should surface the flag loudly.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub s: usize,
    pub optimal: bool,
    pub method: SolveMethod,
    pub bound: i64,
    pub witness: Assignment,
    pub effort: u64,
    pub seed: Option<u64>,
    pub counting_ceiling: Option<u64>,
    pub exceeds_counting_ceiling: bool,
}

impl SolveReport {
    fn new(
        ineq: &Inequality,
        s: usize,
        optimal: bool,
        method: SolveMethod,
        witness: Assignment,
        effort: u64,
        seed: Option<u64>,
    ) -> Result<Self, Error> {
        // the witness must reproduce the claimed s through the public path
        let check = satisfied_count(ineq, &witness)?;
        if check != s {
            return Err(Error::Invariant(format!(
                "witness satisfies {check} terms, solver claimed {s}"
            )));
        }
        let counting_ceiling = counting_ceiling(ineq);
        Ok(SolveReport {
            s,
            optimal,
            method,
            bound: 2 * s as i64 - ineq.num_terms() as i64,
            witness,
            effort,
            seed,
            counting_ceiling,
            exceeds_counting_ceiling: counting_ceiling.is_some_and(|cap| s as u64 > cap),
        })
    }
}

/// Term representation over densely indexed observables: three variable
/// indices and the required outcome-product parity (true = product -1).
struct Compiled {
    vars: Vec<PauliString>,
    terms: Vec<([usize; 3], bool)>,
}

impl Compiled {
    fn build(ineq: &Inequality) -> Self {
        let vars = ineq.observables();
        let index: BTreeMap<PauliString, usize> =
            vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let terms = ineq
            .terms
            .iter()
            .map(|t| {
                let m = t.context.members();
                (
                    [index[&m[0]], index[&m[1]], index[&m[2]]],
                    t.context.sign() < 0,
                )
            })
            .collect();
        Compiled { vars, terms }
    }

}

/// Number of terms whose outcome product matches the context sign.
pub fn satisfied_count(ineq: &Inequality, assignment: &Assignment) -> Result<usize, Error> {
    let mut satisfied = 0;
    for term in &ineq.terms {
        let mut product = 1i8;
        for member in term.context.members() {
            product *= assignment
                .get(member)
                .ok_or_else(|| Error::IncompleteAssignment {
                    observable: member.to_string(),
                })?;
        }
        if product == term.context.sign() {
            satisfied += 1;
        }
    }
    Ok(satisfied)
}

/// Inequality value `chi = satisfied - unsatisfied = 2 s - N` under a model.
pub fn chi_value(ineq: &Inequality, assignment: &Assignment) -> Result<i64, Error> {
    let s = satisfied_count(ineq, assignment)? as i64;
    Ok(2 * s - ineq.num_terms() as i64)
}

/// Claimed satisfiability ceiling S(n) when the inequality is the full
/// context set, else None. Every solver compares its result against this so
/// a counterexample to the 2 S(n) - N(n) bound is flagged, never hidden.
fn counting_ceiling(ineq: &Inequality) -> Option<u64> {
    let total = count_contexts_closed_form(ineq.n).ok()?;
    let positive = count_positive_closed_form(ineq.n).ok()?;
    let observables = 4usize.pow(ineq.n as u32) - 1;
    let is_full = ineq.num_terms() as u128 == total && ineq.observables().len() == observables;
    is_full.then_some(positive as u64)
}

/// Exhaustive scan over all 2^m assignments of the m observables in the
/// inequality. Exact, but capped at m = 24.
pub fn solve_exact(ineq: &Inequality) -> Result<SolveReport, Error> {
    let compiled = Compiled::build(ineq);
    let m = compiled.vars.len();
    if m > BRUTE_FORCE_VAR_CAP {
        return Err(Error::ExactTooLarge {
            variables: m,
            cap: BRUTE_FORCE_VAR_CAP,
        });
    }
    // parity masks: term satisfied iff popcount(assignment & mask) has the
    // required parity
    let masks: Vec<(u32, u32)> = compiled
        .terms
        .iter()
        .map(|(vars, want_negative)| {
            let mask = vars.iter().fold(0u32, |acc, v| acc | (1 << v));
            (mask, u32::from(*want_negative))
        })
        .collect();
    let mut best_s = 0usize;
    let mut best_mask = 0u32;
    let total = 1u64 << m;
    for assignment in 0..total {
        let assignment = assignment as u32;
        let s = masks
            .iter()
            .filter(|(mask, want)| (assignment & mask).count_ones() % 2 == *want)
            .count();
        if s > best_s {
            best_s = s;
            best_mask = assignment;
        }
    }
    let bits: Vec<bool> = (0..m).map(|i| best_mask >> i & 1 != 0).collect();
    SolveReport::new(
        ineq,
        best_s,
        true,
        SolveMethod::ExactBruteForce,
        Assignment::from_bits(&compiled.vars, &bits),
        total,
        None,
    )
}

/// Exact branch-and-bound. Variables are branched in descending
/// term-occurrence order; a node is pruned when even satisfying every still
/// undecided term cannot beat the incumbent.
pub fn solve_branch_and_bound(ineq: &Inequality, node_budget: u64) -> Result<SolveReport, Error> {
    let compiled = Compiled::build(ineq);
    let m = compiled.vars.len();

    let mut occurrence = vec![0usize; m];
    for (vars, _) in &compiled.terms {
        for &v in vars {
            occurrence[v] += 1;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(occurrence[v]), v));

    let mut occur: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (t, (vars, _)) in compiled.terms.iter().enumerate() {
        for &v in vars {
            occur[v].push(t);
        }
    }

    struct Search<'a> {
        compiled: &'a Compiled,
        occur: &'a [Vec<usize>],
        order: &'a [usize],
        undecided: Vec<u8>,
        parity: Vec<bool>,
        assigned: Vec<bool>,
        satisfied: usize,
        open_terms: usize,
        best_s: usize,
        best_bits: Vec<bool>,
        nodes: u64,
        budget: u64,
    }

    impl Search<'_> {
        fn run(&mut self, depth: usize) -> Result<(), Error> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::ExactTooLarge {
                    variables: self.order.len(),
                    cap: BRUTE_FORCE_VAR_CAP,
                });
            }
            if self.satisfied + self.open_terms <= self.best_s {
                return Ok(());
            }
            if depth == self.order.len() {
                if self.satisfied > self.best_s {
                    self.best_s = self.satisfied;
                    self.best_bits = self.assigned.clone();
                }
                return Ok(());
            }
            let var = self.order[depth];
            for value in [false, true] {
                let mut decided = Vec::new();
                self.assigned[var] = value;
                for &t in &self.occur[var] {
                    if value {
                        self.parity[t] = !self.parity[t];
                    }
                    self.undecided[t] -= 1;
                    if self.undecided[t] == 0 {
                        let sat = self.parity[t] == self.compiled.terms[t].1;
                        self.open_terms -= 1;
                        if sat {
                            self.satisfied += 1;
                        }
                        decided.push((t, sat));
                    }
                }
                self.run(depth + 1)?;
                for &(_t, sat) in &decided {
                    self.open_terms += 1;
                    if sat {
                        self.satisfied -= 1;
                    }
                }
                for &t in &self.occur[var] {
                    self.undecided[t] += 1;
                    if value {
                        self.parity[t] = !self.parity[t];
                    }
                }
            }
            Ok(())
        }
    }

    let mut search = Search {
        compiled: &compiled,
        occur: &occur,
        order: &order,
        undecided: vec![3u8; compiled.terms.len()],
        parity: vec![false; compiled.terms.len()],
        assigned: vec![false; m],
        satisfied: 0,
        open_terms: compiled.terms.len(),
        best_s: 0,
        best_bits: vec![false; m],
        nodes: 0,
        budget: node_budget,
    };
    search.run(0)?;
    let (best_s, best_bits, nodes) = (search.best_s, search.best_bits.clone(), search.nodes);
    SolveReport::new(
        ineq,
        best_s,
        true,
        SolveMethod::BranchAndBound,
        Assignment::from_bits(&compiled.vars, &best_bits),
        nodes,
        None,
    )
}

/// WalkSAT-style local search parameters. `max_flips = 0` means the default
/// of 20 flips per term.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LocalSearchConfig {
    pub restarts: u32,
    pub max_flips: u32,
    pub noise: f64,
    pub seed: u64,
}

impl LocalSearchConfig {
    pub fn new(restarts: u32, max_flips: u32, seed: u64) -> Self {
        LocalSearchConfig {
            restarts,
            max_flips,
            noise: 0.3,
            seed,
        }
    }
}

/// Stochastic search for a good assignment: repeatedly pick a random
/// unsatisfied term and flip one of its variables, either at random (with
/// probability `noise`) or the one with the best net gain. The first restart
/// starts from all-+1 (which already satisfies every positive context), the
/// rest from random assignments. Deterministic under a fixed seed; each
/// restart draws from its own stream, so restarts may run in any order.
pub fn solve_local_search(
    ineq: &Inequality,
    config: LocalSearchConfig,
) -> Result<SolveReport, Error> {
    let compiled = Compiled::build(ineq);
    let m = compiled.vars.len();
    let num_terms = compiled.terms.len();
    let max_flips = if config.max_flips == 0 {
        20 * num_terms as u32
    } else {
        config.max_flips
    };

    let mut occur: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (t, (vars, _)) in compiled.terms.iter().enumerate() {
        for &v in vars {
            occur[v].push(t);
        }
    }

    let mut best_s = 0usize;
    let mut best_bits = vec![false; m];
    let mut total_flips = 0u64;

    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(restart as u64 + 1);

        let mut bits: Vec<bool> = if restart == 0 {
            vec![false; m]
        } else {
            (0..m).map(|_| rng.gen()).collect()
        };

        // per-term satisfaction state plus an index of unsatisfied terms
        let mut sat = vec![false; num_terms];
        let mut unsat: Vec<usize> = Vec::new();
        let mut unsat_pos = vec![usize::MAX; num_terms];
        let mut num_sat = 0usize;
        for (t, (vars, want_negative)) in compiled.terms.iter().enumerate() {
            let parity = bits[vars[0]] ^ bits[vars[1]] ^ bits[vars[2]];
            if parity == *want_negative {
                sat[t] = true;
                num_sat += 1;
            } else {
                unsat_pos[t] = unsat.len();
                unsat.push(t);
            }
        }

        macro_rules! flip {
            ($var:expr) => {{
                let var = $var;
                bits[var] = !bits[var];
                for &t in &occur[var] {
                    if sat[t] {
                        sat[t] = false;
                        num_sat -= 1;
                        unsat_pos[t] = unsat.len();
                        unsat.push(t);
                    } else {
                        sat[t] = true;
                        num_sat += 1;
                        let pos = unsat_pos[t];
                        let last = *unsat.last().unwrap();
                        unsat.swap_remove(pos);
                        if pos < unsat.len() {
                            unsat_pos[last] = pos;
                        }
                        unsat_pos[t] = usize::MAX;
                    }
                }
            }};
        }

        if num_sat > best_s {
            best_s = num_sat;
            best_bits = bits.clone();
        }

        for _ in 0..max_flips {
            if unsat.is_empty() {
                break;
            }
            total_flips += 1;
            let term = unsat[rng.gen_range(0..unsat.len())];
            let vars = compiled.terms[term].0;
            let var = if rng.gen_bool(config.noise) {
                vars[rng.gen_range(0..3)]
            } else {
                // net gain of flipping: unsatisfied terms become satisfied
                // and vice versa for every term the variable occurs in
                *vars
                    .iter()
                    .max_by_key(|&&v| {
                        let gain: i64 = occur[v]
                            .iter()
                            .map(|&t| if sat[t] { -1i64 } else { 1 })
                            .sum();
                        (gain, std::cmp::Reverse(v))
                    })
                    .unwrap()
            };
            flip!(var);
            if num_sat > best_s {
                best_s = num_sat;
                best_bits = bits.clone();
            }
        }
    }

    SolveReport::new(
        ineq,
        best_s,
        false,
        SolveMethod::LocalSearch,
        Assignment::from_bits(&compiled.vars, &best_bits),
        total_flips,
        Some(config.seed),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSource {
    /// `2 S(n) - N(n)` from the counting theorem for the full context set.
    CountingTheorem,
    #[serde(rename = "exact-solve")]
    ExactSolve,
    #[serde(rename = "local-search")]
    LocalSearchEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundInfo {
    pub bound: i64,
    pub optimal: bool,
    pub source: BoundSource,
}

/// Noncontextual bound of an inequality. The full-context inequality gets
/// the closed-form `2 S(n) - N(n)`; anything else is solved exactly when
/// small enough, otherwise estimated by local search (flagged non-optimal).
///
/// The counting value is only marked optimal at n = 2, where brute force
/// confirms it. For n >= 3 local search exceeds it (see the module docs), so
/// it is reported as the claimed bound with `optimal: false`.
pub fn noncontextual_bound(ineq: &Inequality) -> Result<BoundInfo, Error> {
    let total = count_contexts_closed_form(ineq.n)?;
    let observables = 4u128.pow(ineq.n as u32) - 1;
    if ineq.num_terms() as u128 == total && ineq.observables().len() as u128 == observables {
        let positive = count_positive_closed_form(ineq.n)? as i64;
        return Ok(BoundInfo {
            bound: 2 * positive - total as i64,
            optimal: ineq.n == 2,
            source: BoundSource::CountingTheorem,
        });
    }
    if ineq.observables().len() <= BRUTE_FORCE_VAR_CAP {
        let report = solve_exact(ineq)?;
        return Ok(BoundInfo {
            bound: report.bound,
            optimal: true,
            source: BoundSource::ExactSolve,
        });
    }
    let report = solve_local_search(ineq, LocalSearchConfig::new(200, 0, 42))?;
    Ok(BoundInfo {
        bound: report.bound,
        optimal: false,
        source: BoundSource::LocalSearchEstimate,
    })
}

/// The parity argument that a KS table admits no model: every observable
/// sits in exactly one row and one column, so any assignment gives the six
/// line products an overall value +1, while the line signs multiply to -1.
/// At most five of the six predictions can hold.
#[derive(Debug, Clone, Serialize)]
pub struct ParityWitness {
    pub sign_product: i8,
    pub max_satisfiable: usize,
}

pub fn table_parity_witness(table: &KSTable) -> Result<ParityWitness, Error> {
    let rows = table.row_contexts()?;
    let cols = table.col_contexts()?;
    for entry in table.grid().iter().flatten() {
        let in_rows = rows
            .iter()
            .filter(|c| c.members().contains(entry))
            .count();
        let in_cols = cols
            .iter()
            .filter(|c| c.members().contains(entry))
            .count();
        if in_rows != 1 || in_cols != 1 {
            return Err(Error::Invariant(format!(
                "observable {entry} appears in {in_rows} rows and {in_cols} columns"
            )));
        }
    }
    let sign_product: i8 = rows
        .iter()
        .chain(cols.iter())
        .map(|c| c.sign())
        .product();
    if sign_product != -1 {
        return Err(Error::Invariant(
            "sign product is +1; the table admits a noncontextual model".into(),
        ));
    }
    Ok(ParityWitness {
        sign_product,
        max_satisfiable: 5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{enumerate_tables, peres_mermin_table, table2_table, Context};
    use crate::inequality::{
        full_inequality, peres_mermin_inequality, table2_inequality, two_qubit_15_inequality,
    };

    #[test]
    fn satisfied_count_examples() {
        let full = two_qubit_15_inequality();
        let all_plus = Assignment::all_plus(&full);
        assert_eq!(satisfied_count(&full, &all_plus).unwrap(), 12);
        assert_eq!(chi_value(&full, &all_plus).unwrap(), 9);

        let pm = peres_mermin_inequality();
        let all_plus = Assignment::all_plus(&pm);
        assert_eq!(satisfied_count(&pm, &all_plus).unwrap(), 3);

        // single positive context with all values -1: product -1, unsatisfied
        let ctx = Context::from_strs(["XI", "IX", "XX"]).unwrap();
        let single = Inequality::from_contexts(2, [ctx], 1).unwrap();
        let all_minus =
            Assignment::new(single.observables().into_iter().map(|o| (o, -1)).collect())
                .unwrap();
        assert_eq!(satisfied_count(&single, &all_minus).unwrap(), 0);
    }

    #[test]
    fn incomplete_assignment_named() {
        let pm = peres_mermin_inequality();
        let empty = Assignment::new(BTreeMap::new()).unwrap();
        match satisfied_count(&pm, &empty) {
            Err(Error::IncompleteAssignment { observable }) => {
                assert!(!observable.is_empty());
            }
            other => panic!("expected incomplete-assignment error, got {other:?}"),
        }
    }

    #[test]
    fn exact_bounds() {
        let report = solve_exact(&two_qubit_15_inequality()).unwrap();
        assert_eq!(report.s, 12);
        assert_eq!(report.bound, 9);
        assert!(report.optimal);

        let report = solve_exact(&peres_mermin_inequality()).unwrap();
        assert_eq!(report.s, 5);
        assert_eq!(report.bound, 4);

        let report = solve_exact(&table2_inequality()).unwrap();
        assert_eq!(report.s, 5);
        assert_eq!(report.bound, 4);

        let ctx = Context::from_strs(["XI", "IX", "XX"]).unwrap();
        let single = Inequality::from_contexts(2, [ctx], 1).unwrap();
        let report = solve_exact(&single).unwrap();
        assert_eq!(report.s, 1);
        assert_eq!(report.bound, 1);
    }

    #[test]
    fn exact_cap() {
        let full3 = full_inequality(3).unwrap(); // 63 observables
        assert!(matches!(
            solve_exact(&full3),
            Err(Error::ExactTooLarge { variables: 63, .. })
        ));
    }

    #[test]
    fn branch_and_bound_matches_brute_force() {
        for ineq in [
            peres_mermin_inequality(),
            table2_inequality(),
            two_qubit_15_inequality(),
        ] {
            let brute = solve_exact(&ineq).unwrap();
            let bnb = solve_branch_and_bound(&ineq, 10_000_000).unwrap();
            assert_eq!(bnb.s, brute.s);
        }
        // random sub-inequalities of the full n=2 set
        let full = two_qubit_15_inequality();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let contexts: Vec<Context> = full
                .terms
                .iter()
                .filter(|_| rng.gen_bool(0.6))
                .map(|t| t.context)
                .collect();
            if contexts.is_empty() {
                continue;
            }
            let sub = Inequality::from_contexts(2, contexts, 0).unwrap();
            let brute = solve_exact(&sub).unwrap();
            let bnb = solve_branch_and_bound(&sub, 10_000_000).unwrap();
            assert_eq!(bnb.s, brute.s);
        }
    }

    #[test]
    fn local_search_finds_optimum_n2() {
        let full = two_qubit_15_inequality();
        let report =
            solve_local_search(&full, LocalSearchConfig::new(100, 0, 42)).unwrap();
        assert_eq!(report.s, 12);
        assert!(!report.optimal);
        assert_eq!(report.seed, Some(42));
    }

    #[test]
    fn local_search_deterministic() {
        let pm = peres_mermin_inequality();
        let a = solve_local_search(&pm, LocalSearchConfig::new(20, 50, 9)).unwrap();
        let b = solve_local_search(&pm, LocalSearchConfig::new(20, 50, 9)).unwrap();
        assert_eq!(a.s, b.s);
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn deleting_a_term_lowers_tolerated_error() {
        let full = two_qubit_15_inequality();
        let full_eps = full.tolerated_error();
        for skip in 0..full.num_terms() {
            let contexts: Vec<Context> = full
                .terms
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, t)| t.context)
                .collect();
            let report =
                solve_exact(&Inequality::from_contexts(2, contexts.clone(), 0).unwrap()).unwrap();
            let sub = Inequality::from_contexts(2, contexts, report.bound).unwrap();
            assert!(sub.tolerated_error() < full_eps, "dropping term {skip}");
        }
    }

    #[test]
    fn adding_a_term_changes_s_by_at_most_one() {
        let full = two_qubit_15_inequality();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let mut contexts: Vec<Context> = full
                .terms
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|t| t.context)
                .collect();
            if contexts.len() == full.num_terms() || contexts.is_empty() {
                continue;
            }
            let before =
                solve_exact(&Inequality::from_contexts(2, contexts.clone(), 0).unwrap())
                    .unwrap()
                    .s;
            let extra = full
                .terms
                .iter()
                .map(|t| t.context)
                .find(|c| !contexts.contains(c))
                .unwrap();
            contexts.push(extra);
            let after = solve_exact(&Inequality::from_contexts(2, contexts, 0).unwrap())
                .unwrap()
                .s;
            assert!(after >= before && after <= before + 1);
        }
    }

    #[test]
    fn bound_info_sources() {
        let info = noncontextual_bound(&two_qubit_15_inequality()).unwrap();
        assert_eq!(info.bound, 9);
        assert_eq!(info.source, BoundSource::CountingTheorem);

        let info = noncontextual_bound(&peres_mermin_inequality()).unwrap();
        assert_eq!(info.bound, 4);
        assert_eq!(info.source, BoundSource::ExactSolve);

        // the counting value at n=3 is the claimed bound, not a proven one
        let info = noncontextual_bound(&full_inequality(3).unwrap()).unwrap();
        assert_eq!(info.bound, 135);
        assert!(!info.optimal);
    }

    #[test]
    fn exact_solve_confirms_ceiling_n2() {
        let report = solve_exact(&two_qubit_15_inequality()).unwrap();
        assert_eq!(report.counting_ceiling, Some(12));
        assert!(!report.exceeds_counting_ceiling);
        // sub-inequalities carry no ceiling claim
        let report = solve_exact(&peres_mermin_inequality()).unwrap();
        assert_eq!(report.counting_ceiling, None);
    }

    #[test]
    fn local_search_exceeds_ceiling_n3() {
        // the claimed ceiling S(3) = 225 is not the true maximum: random
        // restarts reliably find better assignments, and the report says so
        let full3 = full_inequality(3).unwrap();
        let report = solve_local_search(&full3, LocalSearchConfig::new(200, 0, 42)).unwrap();
        assert_eq!(report.counting_ceiling, Some(225));
        assert!(report.s > 225, "best s = {}", report.s);
        assert!(report.exceeds_counting_ceiling);
        // the witness counts the same through the public path
        assert_eq!(satisfied_count(&full3, &report.witness).unwrap(), report.s);
        // restart 0 is all-plus, which satisfies exactly the positive contexts
        let all_plus = Assignment::all_plus(&full3);
        assert_eq!(satisfied_count(&full3, &all_plus).unwrap(), 225);
    }

    #[test]
    fn parity_witnesses() {
        let w = table_parity_witness(&peres_mermin_table()).unwrap();
        assert_eq!(w.sign_product, -1);
        assert_eq!(w.max_satisfiable, 5);
        let w = table_parity_witness(&table2_table()).unwrap();
        assert_eq!(w.sign_product, -1);
        // exact solve agrees with the parity bound on every table
        for table in enumerate_tables().unwrap() {
            let lines = table.line_contexts().unwrap();
            let ineq = Inequality::from_contexts(2, lines, 4).unwrap();
            assert_eq!(solve_exact(&ineq).unwrap().s, 5);
        }
    }

    #[test]
    fn report_json_shape() {
        let report = solve_exact(&two_qubit_15_inequality()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["s"], 12);
        assert_eq!(json["bound"], 9);
        assert_eq!(json["method"], "exact-bruteforce");
        assert_eq!(json["witness"]["XI"], 1);
    }
}
