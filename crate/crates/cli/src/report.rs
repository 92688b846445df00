//! Report structures shared by every subcommand.
//!
//! Machine output (`--format json`) carries exact values as strings plus
//! their six-decimal renderings, never floats, so parse-and-reformat is
//! idempotent. Human output prints the same values aligned.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use nsleak_core::fileio::{AttributeFile, RelationFile};
use nsleak_core::measures::BoundValue;
use nsleak_core::value::LeakageValue;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCell {
    pub exact: String,
    pub decimal: String,
}

impl ValueCell {
    pub fn from_value(v: &LeakageValue) -> Self {
        ValueCell {
            exact: v.to_string(),
            decimal: v.decimal(),
        }
    }

    pub fn from_bound(b: &BoundValue) -> Self {
        ValueCell {
            exact: b.exact_string(),
            decimal: b.decimal(),
        }
    }

    pub fn from_rational(r: &num::BigRational) -> Self {
        ValueCell {
            exact: nsleak_core::value::rational_string(r),
            decimal: format!("{:.6}", rational_to_f64(r)),
        }
    }
}

fn rational_to_f64(r: &num::BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    #[serde(flatten)]
    pub value: ValueCell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub variables: BTreeMap<String, usize>,
    pub tuples: usize,
    #[serde(skip_serializing_if = "is_zero", default)]
    pub duplicates_dropped: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessBlock {
    /// The most revealing observation (smallest conditional range).
    pub argmin_observation: String,
    pub worst_attribute: AttributeFile,
    pub overlap_partition: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditBlock {
    pub epsilon: String,
    pub identifiable: bool,
    pub ceiling: ValueCell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StochasticBlock {
    pub guessing_entropy: ValueCell,
    pub conditional_guessing_entropy: Vec<NamedValue>,
    pub expected_posterior_guessing_entropy: ValueCell,
    pub bf_leakage: ValueCell,
    pub sibson_infinity: ValueCell,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub instance: InstanceSummary,
    pub measures: Vec<NamedValue>,
    pub min_epsilon_open_bound: bool,
    pub witnesses: WitnessBlock,
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub audit: Option<AuditBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub stochastic: Option<StochasticBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximinReport {
    pub instance: InstanceSummary,
    pub forward: ValueCell,
    pub backward: ValueCell,
    pub symmetric: bool,
    pub partition: Vec<Vec<String>>,
    pub common_variable: BTreeMap<String, String>,
    pub one_shot_supremum: ValueCell,
    pub maximal_leakage: ValueCell,
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub alphabet: Vec<String>,
    pub bound: ValueCell,
    pub witness: Vec<String>,
    pub sup_maximal_leakage: ValueCell,
    pub leakage_dominates: bool,
    pub min_epsilon: ValueCell,
    pub min_epsilon_open_bound: bool,
    pub ceiling: ValueCell,
    pub ceiling_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignFinding {
    pub description: String,
    pub counterexample_file: Option<String>,
    pub relation: RelationFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub campaign: String,
    pub claim: String,
    pub trials: usize,
    pub instances: usize,
    pub checks: usize,
    pub violations: Vec<CampaignFinding>,
    pub notes: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub epsilon: String,
    pub identifiable: bool,
    pub min_epsilon: ValueCell,
    pub min_epsilon_open_bound: bool,
    pub ceiling: ValueCell,
}

fn render_named(lines: &mut String, items: &[NamedValue]) {
    let width = items.iter().map(|v| v.name.len()).max().unwrap_or(0);
    let exact_width = items.iter().map(|v| v.value.exact.len()).max().unwrap_or(0);
    for item in items {
        lines.push_str(&format!(
            "  {:<width$}  {:<exact_width$}  = {}\n",
            item.name,
            item.value.exact,
            item.value.decimal,
            width = width,
            exact_width = exact_width
        ));
    }
}

fn render_partition(blocks: &[Vec<String>]) -> String {
    blocks
        .iter()
        .map(|b| format!("{{{}}}", b.join(", ")))
        .collect::<Vec<_>>()
        .join(" | ")
}

fn render_checks(lines: &mut String, checks: &[CheckLine]) {
    for c in checks {
        lines.push_str(&format!(
            "  {}  [{} vs {}]  {}\n",
            if c.holds { "pass" } else { "FAIL" },
            c.lhs,
            c.rhs,
            c.name
        ));
    }
}

impl MeasureReport {
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let vars: Vec<String> = self
            .instance
            .variables
            .iter()
            .map(|(v, n)| format!("{v}({n})"))
            .collect();
        out.push_str(&format!(
            "instance: {}, {} tuples",
            vars.join(" "),
            self.instance.tuples
        ));
        if self.instance.duplicates_dropped > 0 {
            out.push_str(&format!(
                " ({} duplicate tuples dropped)",
                self.instance.duplicates_dropped
            ));
        }
        out.push('\n');
        render_named(&mut out, &self.measures);
        if self.min_epsilon_open_bound {
            out.push_str("  (min epsilon is an open bound: every positive budget qualifies)\n");
        }
        out.push_str(&format!(
            "  argmin observation: {}\n",
            self.witnesses.argmin_observation
        ));
        let mapping: Vec<String> = self
            .witnesses
            .worst_attribute
            .map
            .iter()
            .map(|(x, u)| format!("{x}->{u}"))
            .collect();
        out.push_str(&format!("  worst attribute: {}", mapping.join(", ")));
        if let Some(achieved) = &self.witnesses.worst_attribute.achieved_leakage {
            out.push_str(&format!(" (achieves {achieved})"));
        }
        out.push('\n');
        out.push_str(&format!(
            "  overlap partition: {}\n",
            render_partition(&self.witnesses.overlap_partition)
        ));
        out.push_str("checks:\n");
        render_checks(&mut out, &self.checks);
        if let Some(audit) = &self.audit {
            out.push_str(&format!(
                "audit: epsilon = {} -> {} (ceiling {} = {})\n",
                audit.epsilon,
                if audit.identifiable {
                    "identifiable"
                } else {
                    "NOT identifiable"
                },
                audit.ceiling.exact,
                audit.ceiling.decimal
            ));
        }
        if let Some(st) = &self.stochastic {
            out.push_str("stochastic:\n");
            out.push_str(&format!(
                "  guessing entropy        {} = {}\n",
                st.guessing_entropy.exact, st.guessing_entropy.decimal
            ));
            for c in &st.conditional_guessing_entropy {
                out.push_str(&format!(
                    "  guessing entropy | {}  {} = {}\n",
                    c.name, c.value.exact, c.value.decimal
                ));
            }
            out.push_str(&format!(
                "  expected posterior      {} = {}\n",
                st.expected_posterior_guessing_entropy.exact,
                st.expected_posterior_guessing_entropy.decimal
            ));
            out.push_str(&format!(
                "  bf guessing leakage     {} = {}\n",
                st.bf_leakage.exact, st.bf_leakage.decimal
            ));
            out.push_str(&format!(
                "  sibson (order inf)      {} = {}\n",
                st.sibson_infinity.exact, st.sibson_infinity.decimal
            ));
        }
        out
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

impl MaximinReport {
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let vars: Vec<String> = self
            .instance
            .variables
            .iter()
            .map(|(v, n)| format!("{v}({n})"))
            .collect();
        out.push_str(&format!(
            "instance: {}, {} tuples\n",
            vars.join(" "),
            self.instance.tuples
        ));
        out.push_str(&format!(
            "  maximin info     {} = {}\n",
            self.forward.exact, self.forward.decimal
        ));
        out.push_str(&format!(
            "  reverse count    {} = {} ({})\n",
            self.backward.exact,
            self.backward.decimal,
            if self.symmetric {
                "symmetric"
            } else {
                "ASYMMETRIC"
            }
        ));
        out.push_str(&format!(
            "  overlap partition: {}\n",
            render_partition(&self.partition)
        ));
        let labels: Vec<String> = self
            .common_variable
            .iter()
            .map(|(x, b)| format!("{x}->{b}"))
            .collect();
        out.push_str(&format!("  common variable: {}\n", labels.join(", ")));
        out.push_str(&format!(
            "  one-shot supremum {} <= maximal leakage {} ({})\n",
            self.one_shot_supremum.exact,
            self.maximal_leakage.exact,
            if self.dominated { "pass" } else { "FAIL" }
        ));
        out
    }
}

impl CapacityReport {
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "alphabet ({}): {}\n",
            self.alphabet.len(),
            self.alphabet.join(", ")
        ));
        out.push_str(&format!(
            "  capacity bound   {} = {}\n",
            self.bound.exact, self.bound.decimal
        ));
        out.push_str(&format!(
            "  witness subset   {{{}}}\n",
            self.witness.join(", ")
        ));
        out.push_str(&format!(
            "  sup maximal leakage {} = {} ({})\n",
            self.sup_maximal_leakage.exact,
            self.sup_maximal_leakage.decimal,
            if self.leakage_dominates {
                "dominates"
            } else {
                "FAIL"
            }
        ));
        out.push_str(&format!(
            "  min epsilon      {} = {}{}\n",
            self.min_epsilon.exact,
            self.min_epsilon.decimal,
            if self.min_epsilon_open_bound {
                " (open bound)"
            } else {
                ""
            }
        ));
        out.push_str(&format!(
            "  ceiling          {} = {} ({})\n",
            self.ceiling.exact,
            self.ceiling.decimal,
            if self.ceiling_holds { "holds" } else { "FAIL" }
        ));
        out
    }
}

impl OracleReport {
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("campaign {}: {}\n", self.campaign, self.claim));
        out.push_str(&format!(
            "  instances {}  checks {}  violations {}\n",
            self.instances,
            self.checks,
            self.violations.len()
        ));
        for v in &self.violations {
            out.push_str(&format!("  VIOLATION: {}\n", v.description));
            if let Some(path) = &v.counterexample_file {
                out.push_str(&format!("    counterexample written to {path}\n"));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out.push_str(if self.passed {
            "  result: pass\n"
        } else {
            "  result: FAIL\n"
        });
        out
    }
}

impl AuditReport {
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "epsilon {} -> {}\n",
            self.epsilon,
            if self.identifiable {
                "identifiable"
            } else {
                "NOT identifiable"
            }
        ));
        out.push_str(&format!(
            "  min epsilon  {} = {}{}\n",
            self.min_epsilon.exact,
            self.min_epsilon.decimal,
            if self.min_epsilon_open_bound {
                " (open bound)"
            } else {
                ""
            }
        ));
        out.push_str(&format!(
            "  leakage ceiling at epsilon  {} = {}\n",
            self.ceiling.exact, self.ceiling.decimal
        ));
        out
    }
}
