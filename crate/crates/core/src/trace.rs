//! Elimination records, traces and run reports.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, Value, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Ac,
    Ns,
    Ss,
    Cns,
    Scss,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::Ac, Rule::Ns, Rule::Ss, Rule::Cns, Rule::Scss];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Ac => "ac",
            Rule::Ns => "ns",
            Rule::Ss => "ss",
            Rule::Cns => "cns",
            Rule::Scss => "scss",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rule> {
        Rule::ALL
            .into_iter()
            .find(|r| r.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownRule(s.to_string()))
    }
}

/// Replacement `d -> e` in `D(x_k)` used by a snake substitution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sub {
    pub variable: Var,
    pub from: Value,
    pub to: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cover {
    pub c: Value,
    pub a: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnakeCover {
    pub c: Value,
    pub a: Value,
    pub g: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subs: Vec<Sub>,
}

/// Why a value was removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// No support left in `D(x_j)`.
    Ac {
        unsupported_at: Var,
    },
    Ns {
        by: Value,
    },
    /// `subs` lists the replacements for values compatible with the
    /// eliminated value but not with `by`.
    Ss {
        by: Value,
        subs: Vec<Sub>,
    },
    /// `conditioning` is `None` only when every choice of conditioning
    /// variable is vacuous (a single-variable instance).
    Cns {
        conditioning: Option<Var>,
        covers: Vec<Cover>,
    },
    Scss {
        conditioning: Option<Var>,
        covers: Vec<SnakeCover>,
    },
}

impl Witness {
    pub fn rule(&self) -> Rule {
        match self {
            Witness::Ac { .. } => Rule::Ac,
            Witness::Ns { .. } => Rule::Ns,
            Witness::Ss { .. } => Rule::Ss,
            Witness::Cns { .. } => Rule::Cns,
            Witness::Scss { .. } => Rule::Scss,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationRecord {
    pub step: usize,
    pub variable: Var,
    pub value: Value,
    pub witness: Witness,
}

impl EliminationRecord {
    pub fn rule(&self) -> Rule {
        self.witness.rule()
    }
}

/// Flat JSON form of a witness. Every field is optional so that hand
/// written traces may leave the witness out.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessHint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unsupported_at: Option<Var>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subs: Option<Vec<Sub>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditioning: Option<Var>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers: Option<serde_json::Value>,
}

impl From<&Witness> for WitnessHint {
    fn from(w: &Witness) -> Self {
        let mut h = WitnessHint::default();
        match w {
            Witness::Ac { unsupported_at } => h.unsupported_at = Some(*unsupported_at),
            Witness::Ns { by } => h.by = Some(*by),
            Witness::Ss { by, subs } => {
                h.by = Some(*by);
                h.subs = Some(subs.clone());
            }
            Witness::Cns {
                conditioning,
                covers,
            } => {
                h.conditioning = *conditioning;
                h.covers = Some(serde_json::to_value(covers).expect("covers serialise"));
            }
            Witness::Scss {
                conditioning,
                covers,
            } => {
                h.conditioning = *conditioning;
                h.covers = Some(serde_json::to_value(covers).expect("covers serialise"));
            }
        }
        h
    }
}

/// One step of a trace as read from disk: the claimed rule plus whatever
/// part of the witness was supplied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub rule: Rule,
    pub variable: Var,
    pub value: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessHint>,
}

impl From<&EliminationRecord> for TraceStep {
    fn from(r: &EliminationRecord) -> Self {
        TraceStep {
            step: r.step,
            rule: r.rule(),
            variable: r.variable,
            value: r.value,
            witness: Some((&r.witness).into()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub instance: String,
    pub steps: Vec<EliminationRecord>,
}

#[derive(Serialize, Deserialize)]
struct TraceFile {
    instance: String,
    steps: Vec<TraceStep>,
}

impl Trace {
    pub fn new(instance: impl Into<String>) -> Self {
        Trace {
            instance: instance.into(),
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, variable: Var, value: Value, witness: Witness) {
        let step = self.steps.len() + 1;
        self.steps.push(EliminationRecord {
            step,
            variable,
            value,
            witness,
        });
    }

    /// Appends `other`, renumbering its steps.
    pub fn extend(&mut self, other: Trace) {
        for r in other.steps {
            self.push(r.variable, r.value, r.witness);
        }
    }

    pub fn count(&self, rule: Rule) -> usize {
        self.steps.iter().filter(|r| r.rule() == rule).count()
    }

    pub fn to_json(&self) -> String {
        let file = TraceFile {
            instance: self.instance.clone(),
            steps: self.steps.iter().map(TraceStep::from).collect(),
        };
        serde_json::to_string_pretty(&file).expect("trace serialises")
    }
}

/// Parses a trace file into its claimed steps.
pub fn parse_trace(text: &str) -> Result<(String, Vec<TraceStep>)> {
    let file: TraceFile = serde_json::from_str(text)?;
    Ok((file.instance, file.steps))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub ac: usize,
    pub ns: usize,
    pub ss: usize,
    pub cns: usize,
    pub scss: usize,
    /// Elementary updates: counter increments and decrements plus set
    /// membership changes, initialisation included.
    pub updates: u64,
    pub micros: u128,
    pub initial_size: usize,
    pub final_size: usize,
    pub unsatisfiable: bool,
    /// Mismatches found by the debug recomputation check.
    pub integrity_violations: usize,
    pub first_violation: Option<String>,
}

impl ReductionReport {
    pub fn eliminations(&self) -> usize {
        self.ac + self.ns + self.ss + self.cns + self.scss
    }

    pub fn tally(&mut self, rule: Rule) {
        match rule {
            Rule::Ac => self.ac += 1,
            Rule::Ns => self.ns += 1,
            Rule::Ss => self.ss += 1,
            Rule::Cns => self.cns += 1,
            Rule::Scss => self.scss += 1,
        }
    }

    pub fn absorb(&mut self, other: &ReductionReport) {
        self.ac += other.ac;
        self.ns += other.ns;
        self.ss += other.ss;
        self.cns += other.cns;
        self.scss += other.scss;
        self.updates += other.updates;
        self.micros += other.micros;
        self.final_size = other.final_size;
        self.unsatisfiable |= other.unsatisfiable;
        self.integrity_violations += other.integrity_violations;
        if self.first_violation.is_none() {
            self.first_violation.clone_from(&other.first_violation);
        }
    }
}

/// Outcome of running an engine.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub instance: Instance,
    pub trace: Trace,
    pub report: ReductionReport,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_names_round_trip() {
        for r in Rule::ALL {
            assert_eq!(r.as_str().parse::<Rule>().unwrap(), r);
        }
        assert!("xyz".parse::<Rule>().is_err());
        assert_eq!("SCSS".parse::<Rule>().unwrap(), Rule::Scss);
    }

    #[test]
    fn trace_json_round_trip() {
        let mut t = Trace::new("demo");
        t.push(0, 3, Witness::Ns { by: 1 });
        t.push(
            2,
            0,
            Witness::Ss {
                by: 1,
                subs: vec![Sub {
                    variable: 1,
                    from: 0,
                    to: 1,
                }],
            },
        );
        t.push(
            1,
            2,
            Witness::Cns {
                conditioning: Some(0),
                covers: vec![Cover { c: 1, a: 2 }],
            },
        );
        let (name, steps) = parse_trace(&t.to_json()).unwrap();
        assert_eq!(name, "demo");
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[1].rule, Rule::Ss);
        assert_eq!(steps[1].witness.as_ref().unwrap().by, Some(1));
        assert_eq!(steps[2].witness.as_ref().unwrap().conditioning, Some(0));
        assert_eq!(steps[2].step, 3);
    }

    #[test]
    fn witness_is_optional_on_input() {
        let text = r#"{"instance": "x", "steps": [{"step": 1, "rule": "scss", "variable": 0, "value": 3}]}"#;
        let (_, steps) = parse_trace(text).unwrap();
        assert_eq!(steps[0].witness, None);
    }
}
