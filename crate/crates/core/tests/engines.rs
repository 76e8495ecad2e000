mod common;

use subsense::engine::{self, check_scss, EngineOptions};
use subsense::oracle;
use subsense::{Instance, Rule, Witness};

fn run(inst: &Instance, rule: Rule) -> subsense::Reduction {
    let opts = EngineOptions::checked();
    match rule {
        Rule::Ac => engine::establish_ac(inst),
        Rule::Ns => engine::ns_to_convergence_with(inst, &opts),
        Rule::Ss => engine::ss_to_convergence_with(inst, &opts),
        Rule::Cns => engine::cns_to_convergence_with(inst, &opts),
        Rule::Scss => engine::scss_to_convergence_with(inst, &opts),
    }
}

fn input_for(inst: &Instance, rule: Rule) -> Instance {
    match rule {
        Rule::Ns | Rule::Ss | Rule::Cns => engine::establish_ac(inst).instance,
        _ => inst.clone(),
    }
}

#[test]
fn counters_match_recomputation() {
    for inst in common::corpus(2) {
        for rule in [Rule::Ns, Rule::Ss, Rule::Cns, Rule::Scss] {
            let r = run(&input_for(&inst, rule), rule);
            assert_eq!(
                r.report.integrity_violations,
                0,
                "{} {rule}: {:?}",
                inst.name(),
                r.report.first_violation
            );
        }
    }
}

#[test]
fn steps_are_certified_and_converged() {
    for inst in common::corpus(1) {
        for rule in [Rule::Ns, Rule::Ss, Rule::Cns, Rule::Scss] {
            let start = input_for(&inst, rule);
            let r = run(&start, rule);
            let mut cur = start.clone();
            for s in &r.trace.steps {
                let by = match &s.witness {
                    Witness::Ns { by } | Witness::Ss { by, .. } => Some(*by),
                    _ => None,
                };
                let cond = match &s.witness {
                    Witness::Cns { conditioning, .. } | Witness::Scss { conditioning, .. } => {
                        Some(*conditioning)
                    }
                    _ => None,
                };
                assert!(
                    oracle::certify(&cur, s.variable, s.value, s.rule(), by, cond).unwrap(),
                    "{} {rule} step {}",
                    inst.name(),
                    s.step
                );
                cur = cur.remove_value(s.variable, s.value).unwrap();
            }
            assert_eq!(cur, r.instance);
            if r.report.unsatisfiable {
                continue;
            }
            for i in 0..cur.num_vars() {
                for b in cur.domain(i) {
                    let left = match rule {
                        Rule::Ns => oracle::is_ns(&cur, i, b).unwrap(),
                        Rule::Ss => oracle::is_ss(&cur, i, b).unwrap(),
                        Rule::Cns => oracle::is_cns(&cur, i, b).unwrap(),
                        _ => oracle::is_scss(&cur, i, b).unwrap(),
                    };
                    assert!(
                        left.is_none(),
                        "{} {rule}: ({i},{b}) left: {left:?}",
                        inst.name()
                    );
                }
            }
        }
    }
}

#[test]
fn check_scss_matches_oracle() {
    for inst in common::corpus(1) {
        let mut want = Vec::new();
        for i in 0..inst.num_vars() {
            for b in inst.domain(i) {
                for j in oracle::scss_conditions(&inst, i, b).unwrap() {
                    want.push((i, b, j));
                }
            }
        }
        assert_eq!(check_scss(&inst), want, "{}", inst.name());
    }
}

#[test]
#[ignore]
fn corpus_stats() {
    let corpus = common::corpus(2);
    for rule in [Rule::Ns, Rule::Ss, Rule::Cns, Rule::Scss] {
        let (mut elim, mut unsat, mut nonzero) = (0, 0, 0);
        for inst in &corpus {
            let r = run(&input_for(inst, rule), rule);
            elim += r.report.eliminations();
            unsat += r.report.unsatisfiable as usize;
            nonzero += (r.report.eliminations() > 0) as usize;
        }
        println!(
            "{rule}: {} instances, {elim} eliminations, {nonzero} reduced, {unsat} unsat",
            corpus.len()
        );
    }
}

#[test]
#[ignore]
fn stress_larger_instances() {
    use subsense::generators::{random_instance, RandomParams};
    let mut checked = 0;
    for seed in 0..400u64 {
        let p = RandomParams {
            n: 5 + (seed % 5) as usize,
            d: 3 + (seed % 4) as usize,
            density: [0.3, 0.5, 0.8][(seed % 3) as usize],
            tightness: [0.4, 0.6, 0.75, 0.85][(seed % 4) as usize],
            seed,
        };
        let inst = random_instance(&p).unwrap();
        for rule in [Rule::Ns, Rule::Ss, Rule::Cns, Rule::Scss] {
            let r = run(&input_for(&inst, rule), rule);
            assert_eq!(
                r.report.integrity_violations,
                0,
                "{} {rule}: {:?}",
                inst.name(),
                r.report.first_violation
            );
            checked += r.report.eliminations();
        }
    }
    println!("{checked} eliminations checked");
}

#[test]
fn engines_accept_inputs_that_are_not_arc_consistent() {
    for inst in common::corpus(1) {
        for rule in [Rule::Ns, Rule::Ss, Rule::Cns, Rule::Scss] {
            let r = run(&inst, rule);
            assert_eq!(
                r.report.integrity_violations,
                0,
                "{} {rule}: {:?}",
                inst.name(),
                r.report.first_violation
            );
            let mut cur = inst.clone();
            for s in &r.trace.steps {
                assert!(
                    oracle::certify(&cur, s.variable, s.value, s.rule(), None, None).unwrap(),
                    "{} {rule} step {}",
                    inst.name(),
                    s.step
                );
                cur = cur.remove_value(s.variable, s.value).unwrap();
            }
        }
    }
}

/// SS removes at least as many values as NS from the same input unless
/// one of the runs stops early at a wiped out domain.
#[test]
fn ns_never_outlasts_ss() {
    use subsense::generators::{random_instance, RandomParams};
    for n in [3, 5, 8, 12] {
        for d in [2, 3, 4, 6] {
            for density in [0.2, 0.5, 1.0] {
                for tightness in [0.3, 0.5, 0.7, 0.85] {
                    for seed in 0..4 {
                        let inst = random_instance(&RandomParams {
                            n,
                            d,
                            density,
                            tightness,
                            seed,
                        })
                        .unwrap();
                        let ns = engine::ns_to_convergence(&inst);
                        let ss = engine::ss_to_convergence(&inst);
                        if ns.report.unsatisfiable || ss.report.unsatisfiable {
                            continue;
                        }
                        assert!(
                            ns.report.eliminations() <= ss.report.eliminations(),
                            "{}",
                            inst.name()
                        );
                    }
                }
            }
        }
    }
}
