//! Scaling reports: per-n context counts, the counting-argument bound
//! 2S - N, tolerated error per correlation, and degree of violation, with
//! exact rational arithmetic so the canonical fractions are reproduced
//! verbatim.
//!
//! The `bound`, `epsilon`, and `degree` columns are derived from the claim
//! that at most S(n) predictions are simultaneously satisfiable. That claim
//! is proven at n = 2 but falsified by the solver at n = 3 (see the solver
//! module docs), so for n >= 3 these columns report the counting-argument
//! values, not proven optima. The count columns (N, negatives, S) are exact
//! combinatorics and unaffected.

use std::fmt;
use std::io::Write;

use num_rational::Ratio;
use serde::Serialize;

use crate::context::{
    context_counts, count_contexts_closed_form, count_negative_closed_form,
    MAX_ENUMERATION_QUBITS,
};
use crate::pauli::MAX_QUBITS;
use crate::Error;

/// Exact nonnegative rational with a 6-significant-digit decimal rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational(Ratio<u128>);

impl Rational {
    pub fn new(numer: u128, denom: u128) -> Self {
        Rational(Ratio::new(numer, denom))
    }

    pub fn numer(&self) -> u128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u128 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Decimal form with 6 significant digits, derived from the exact
    /// fraction rather than an independently computed float.
    pub fn decimal(&self) -> String {
        let value = self.to_f64();
        if value == 0.0 {
            return "0.00000".to_string();
        }
        let magnitude = value.abs().log10().floor() as i32;
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{value:.decimals$}")
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            fraction: String,
            decimal: &'a str,
        }
        Repr {
            fraction: self.to_string(),
            decimal: &self.decimal(),
        }
        .serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountSource {
    /// Closed-form evaluation only.
    ClosedForm,
    /// Closed form cross-checked against full enumeration.
    Enumeration,
}

/// Per-n summary row: counts, bound, tolerated error, degree of violation.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub total: u128,
    pub negatives: u128,
    #[serde(rename = "S")]
    pub satisfiable: u128,
    pub bound: u128,
    pub epsilon: Rational,
    #[serde(rename = "D")]
    pub degree: Rational,
    pub source: CountSource,
}

impl ScalingRow {
    fn build(n: usize, total: u128, negatives: u128, source: CountSource) -> Result<Self, Error> {
        let satisfiable = total - negatives;
        if 2 * negatives >= total {
            return Err(Error::Invariant(format!(
                "negative contexts ({negatives}) reach half the total ({total}) at n={n}"
            )));
        }
        let bound = total - 2 * negatives; // = 2 S - N
        let epsilon = Rational::new(2 * negatives, total);
        let degree = Rational::new(total, bound);
        Ok(ScalingRow {
            n,
            total,
            negatives,
            satisfiable,
            bound,
            epsilon,
            degree,
            source,
        })
    }
}

/// Scaling rows for n = 2..=n_max from the closed forms, with rows up to
/// `verify_up_to` additionally cross-checked against full enumeration.
pub fn report_scaling(n_max: usize, verify_up_to: usize) -> Result<Vec<ScalingRow>, Error> {
    if !(2..=MAX_QUBITS).contains(&n_max) {
        return Err(Error::Capability {
            operation: "scaling report",
            n: n_max,
            min: 2,
            max: MAX_QUBITS,
        });
    }
    if verify_up_to > MAX_ENUMERATION_QUBITS {
        return Err(Error::Capability {
            operation: "enumeration cross-check",
            n: verify_up_to,
            min: 0,
            max: MAX_ENUMERATION_QUBITS,
        });
    }
    let mut rows = Vec::with_capacity(n_max - 1);
    for n in 2..=n_max {
        let total = count_contexts_closed_form(n)?;
        let negatives = count_negative_closed_form(n)?;
        let source = if n <= verify_up_to {
            let (enum_total, enum_negatives) = context_counts(n)?;
            if enum_total != total || enum_negatives != negatives {
                return Err(Error::Invariant(format!(
                    "enumeration ({enum_total}, {enum_negatives}) disagrees with closed forms \
                     ({total}, {negatives}) at n={n}"
                )));
            }
            CountSource::Enumeration
        } else {
            CountSource::ClosedForm
        };
        rows.push(ScalingRow::build(n, total, negatives, source)?);
    }
    Ok(rows)
}

/// Monotonicity evidence for the large-n behavior: epsilon strictly grows,
/// the negative fraction stays below one half while growing toward it, and
/// the degree of violation grows strictly (exponential-growth evidence).
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub n_max: usize,
    pub epsilon_strictly_increasing: bool,
    pub negative_fraction_below_half: bool,
    pub negative_fraction_increasing: bool,
    pub degree_ratios: Vec<f64>,
    pub degree_ratios_above_one: bool,
}

impl MonotonicityReport {
    pub fn ok(&self) -> bool {
        self.epsilon_strictly_increasing
            && self.negative_fraction_below_half
            && self.negative_fraction_increasing
            && self.degree_ratios_above_one
    }
}

pub fn epsilon_limit_check(n_max: usize) -> Result<MonotonicityReport, Error> {
    if n_max < 4 {
        return Err(Error::Capability {
            operation: "limit check",
            n: n_max,
            min: 4,
            max: MAX_QUBITS,
        });
    }
    let rows = report_scaling(n_max, 0)?;
    let epsilon_strictly_increasing = rows
        .windows(2)
        .all(|w| w[0].epsilon.to_f64() < w[1].epsilon.to_f64());
    // exact comparison: neg/N < 1/2 iff 2 neg < N
    let negative_fraction_below_half = rows.iter().all(|r| 2 * r.negatives < r.total);
    let negative_fraction_increasing = rows.windows(2).all(|w| {
        // neg_a / N_a < neg_b / N_b as exact cross-multiplication
        w[0].negatives * w[1].total < w[1].negatives * w[0].total
    });
    let degree_ratios: Vec<f64> = rows
        .windows(2)
        .map(|w| w[1].degree.to_f64() / w[0].degree.to_f64())
        .collect();
    let degree_ratios_above_one = degree_ratios.iter().all(|r| *r > 1.0);
    Ok(MonotonicityReport {
        n_max,
        epsilon_strictly_increasing,
        negative_fraction_below_half,
        negative_fraction_increasing,
        degree_ratios,
        degree_ratios_above_one,
    })
}

/// Count table CSV: columns n, N, negatives, S.
pub fn write_counts_csv<W: Write>(rows: &[ScalingRow], mut out: W) -> Result<(), Error> {
    writeln!(out, "n,N,negatives,S")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.n, row.total, row.negatives, row.satisfiable
        )?;
    }
    Ok(())
}

/// Scaling-figure CSV: columns n, epsilon, D (6-significant-digit decimals
/// of the exact rationals).
pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], mut out: W) -> Result<(), Error> {
    writeln!(out, "n,epsilon,D")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{}",
            row.n,
            row.epsilon.decimal(),
            row.degree.decimal()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_fractions() {
        let rows = report_scaling(5, 4).unwrap();
        let eps: Vec<String> = rows.iter().map(|r| r.epsilon.to_string()).collect();
        assert_eq!(eps, vec!["2/5", "4/7", "424/595", "4720/5797"]);
        assert_eq!(rows[0].epsilon.decimal(), "0.400000");
        assert_eq!(rows[1].epsilon.decimal(), "0.571429");
        assert_eq!(rows[2].epsilon.decimal(), "0.712605");
        assert_eq!(rows[3].epsilon.decimal(), "0.814214");
    }

    #[test]
    fn bounds_and_degrees() {
        let rows = report_scaling(5, 0).unwrap();
        let bounds: Vec<u128> = rows.iter().map(|r| r.bound).collect();
        assert_eq!(bounds, vec![9, 135, 1539, 16155]);
        assert_eq!(rows[0].degree.to_string(), "5/3");
        assert_eq!(rows[1].degree.to_string(), "7/3");
        // D(3)/D(2) = (7/3)/(5/3) = 1.4
        let ratio = rows[1].degree.to_f64() / rows[0].degree.to_f64();
        assert!((ratio - 1.4).abs() < 1e-12);
    }

    #[test]
    fn sources_marked() {
        let rows = report_scaling(6, 3).unwrap();
        assert_eq!(rows[0].source, CountSource::Enumeration);
        assert_eq!(rows[1].source, CountSource::Enumeration);
        assert_eq!(rows[2].source, CountSource::ClosedForm);
        assert_eq!(rows.last().unwrap().source, CountSource::ClosedForm);
    }

    #[test]
    fn limit_check() {
        let report = epsilon_limit_check(10).unwrap();
        assert!(report.ok());
        assert_eq!(report.degree_ratios.len(), 8);
        // neg/N at n=5 is 35400/86955, comfortably below one half
        let rows = report_scaling(5, 0).unwrap();
        let frac = rows[3].negatives as f64 / rows[3].total as f64;
        assert!((frac - 0.40711).abs() < 1e-4);
        assert!(matches!(epsilon_limit_check(3), Err(Error::Capability { .. })));
    }

    #[test]
    fn full_range_no_overflow() {
        let rows = report_scaling(16, 0).unwrap();
        assert_eq!(rows.len(), 15);
        for row in &rows {
            assert_eq!(row.bound, row.total - 2 * row.negatives);
            let eps = row.epsilon.to_f64();
            assert!(eps > 0.0 && eps < 1.0);
        }
    }

    #[test]
    fn csv_output_stable() {
        let rows = report_scaling(4, 0).unwrap();
        let mut counts = Vec::new();
        write_counts_csv(&rows, &mut counts).unwrap();
        assert_eq!(
            String::from_utf8(counts).unwrap(),
            "n,N,negatives,S\n2,15,3,12\n3,315,90,225\n4,5355,1908,3447\n"
        );
        let mut fig = Vec::new();
        write_scaling_csv(&rows, &mut fig).unwrap();
        let text = String::from_utf8(fig).unwrap();
        assert!(text.starts_with("n,epsilon,D\n2,0.400000,1.66667\n"));
    }
}
