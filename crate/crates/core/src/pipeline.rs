//! Running rule sequences and replaying claimed ones.

use crate::engine::{self, EngineOptions};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle;
use crate::trace::{Reduction, ReductionReport, Rule, Trace, TraceStep};

/// Parses a comma separated rule list such as `ss,cns`.
pub fn parse_rules(s: &str) -> Result<Vec<Rule>> {
    let rules = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Rule>>>()?;
    if rules.is_empty() {
        return Err(Error::UnknownRule(s.to_string()));
    }
    Ok(rules)
}

pub fn run_rule(inst: &Instance, rule: Rule, opts: &EngineOptions) -> Reduction {
    match rule {
        Rule::Ac => engine::establish_ac(inst),
        Rule::Ns => engine::ns_to_convergence_with(inst, opts),
        Rule::Ss => engine::ss_to_convergence_with(inst, opts),
        Rule::Cns => engine::cns_to_convergence_with(inst, opts),
        Rule::Scss => engine::scss_to_convergence_with(inst, opts),
    }
}

/// Runs each rule's engine to convergence in the given order, repeating
/// the whole sequence until a pass removes nothing. Arc consistency is
/// re-established before every rule that expects it.
pub fn reduce(inst: &Instance, rules: &[Rule], opts: &EngineOptions) -> Reduction {
    let mut cur = inst.clone();
    let mut trace = Trace::new(inst.name());
    let mut report = ReductionReport {
        initial_size: inst.total_size(),
        final_size: inst.total_size(),
        unsatisfiable: inst.is_wiped_out(),
        ..ReductionReport::default()
    };
    let absorb =
        |r: Reduction, cur: &mut Instance, trace: &mut Trace, report: &mut ReductionReport| {
            trace.extend(r.trace);
            report.absorb(&r.report);
            *cur = r.instance;
        };

    'passes: while !report.unsatisfiable {
        let before = report.eliminations();
        for &rule in rules {
            if matches!(rule, Rule::Ns | Rule::Ss | Rule::Cns) {
                let r = engine::establish_ac(&cur);
                absorb(r, &mut cur, &mut trace, &mut report);
                if report.unsatisfiable {
                    break 'passes;
                }
            }
            let r = run_rule(&cur, rule, opts);
            absorb(r, &mut cur, &mut trace, &mut report);
            if report.unsatisfiable {
                break 'passes;
            }
        }
        if report.eliminations() == before {
            break;
        }
    }
    Reduction {
        instance: cur,
        trace,
        report,
    }
}

/// Applies a claimed elimination sequence, certifying every step with the
/// reference checker of its rule at the moment it is applied. Witness
/// fields present in a step (`by`, `conditioning`) are checked as given.
/// Either every step is certified or nothing is returned.
pub fn replay_sequence(inst: &Instance, steps: &[TraceStep]) -> Result<(Instance, Trace)> {
    let mut cur = inst.clone();
    let mut trace = Trace::new(inst.name());
    for (k, step) in steps.iter().enumerate() {
        let n = k + 1;
        let fail = |reason: String| Error::Uncertified {
            step: n,
            rule: step.rule.to_string(),
            var: step.variable,
            value: step.value,
            reason,
        };
        if step.variable >= cur.num_vars() || !cur.contains(step.variable, step.value) {
            return Err(fail("value is not in the current domain".into()));
        }
        let by = step.witness.as_ref().and_then(|w| w.by);
        let cond = step.witness.as_ref().and_then(|w| w.conditioning).map(Some);
        if !oracle::certify(&cur, step.variable, step.value, step.rule, by, cond)? {
            return Err(fail("the rule does not hold".into()));
        }
        let w = witness_for(&cur, step, by, cond)?;
        trace.push(step.variable, step.value, w);
        cur = cur.remove_value(step.variable, step.value)?;
    }
    Ok((cur, trace))
}

fn witness_for(
    inst: &Instance,
    step: &TraceStep,
    by: Option<u32>,
    cond: Option<Option<usize>>,
) -> Result<crate::trace::Witness> {
    use crate::trace::Witness;
    let (i, b) = (step.variable, step.value);
    let w = match step.rule {
        Rule::Ac => oracle::unsupported_at(inst, i, b)?.map(|j| Witness::Ac { unsupported_at: j }),
        Rule::Ns => match by {
            Some(a) => Some(Witness::Ns { by: a }),
            None => oracle::is_ns(inst, i, b)?,
        },
        Rule::Ss => match by {
            Some(a) => oracle::ss_by(inst, i, b, a)?.map(|subs| Witness::Ss { by: a, subs }),
            None => oracle::is_ss(inst, i, b)?,
        },
        Rule::Cns => match cond {
            Some(j) => oracle::cns_at(inst, i, b, j)?,
            None => oracle::is_cns(inst, i, b)?,
        },
        Rule::Scss => match cond {
            Some(j) => oracle::scss_at(inst, i, b, j)?,
            None => oracle::is_scss(inst, i, b)?,
        },
    };
    Ok(w.expect("certified steps have witnesses"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::trace::WitnessHint;

    fn claim(rule: Rule, variable: usize, value: u32) -> TraceStep {
        TraceStep {
            step: 0,
            rule,
            variable,
            value,
            witness: None,
        }
    }

    #[test]
    fn parses_rule_lists() {
        assert_eq!(parse_rules("ss,cns").unwrap(), vec![Rule::Ss, Rule::Cns]);
        assert!(parse_rules("ss,foo").is_err());
        assert!(parse_rules("").is_err());
    }

    #[test]
    fn figure1b_cns_then_ss() {
        let inst = generators::figure1b();
        let r = reduce(&inst, &[Rule::Cns], &EngineOptions::checked());
        assert_eq!(r.report.eliminations(), 2);
        let r = reduce(&r.instance, &[Rule::Ss], &EngineOptions::checked());
        assert!((0..3).all(|i| r.instance.domain_len(i) == 1));
    }

    #[test]
    fn replay_rejects_wrong_claims() {
        let inst = generators::figure1b();
        let err = replay_sequence(&inst, &[claim(Rule::Ns, 1, 0)]).unwrap_err();
        assert!(matches!(err, Error::Uncertified { step: 1, .. }));
        let ok = replay_sequence(&inst, &[claim(Rule::Cns, 1, 0), claim(Rule::Cns, 2, 2)]).unwrap();
        assert_eq!(ok.0.domain(1), vec![1, 2]);
        assert_eq!(ok.1.len(), 2);
        let twice = replay_sequence(&inst, &[claim(Rule::Cns, 1, 0), claim(Rule::Cns, 1, 0)]);
        assert!(matches!(twice, Err(Error::Uncertified { step: 2, .. })));
    }

    #[test]
    fn replay_checks_given_conditioning() {
        let inst = generators::figure1b();
        let mut step = claim(Rule::Cns, 1, 0);
        step.witness = Some(WitnessHint {
            conditioning: Some(2),
            ..WitnessHint::default()
        });
        assert!(replay_sequence(&inst, &[step]).is_err());
    }
}
