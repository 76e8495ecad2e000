//! Arc consistency, AC-3 style over the edge set.

use std::collections::VecDeque;

use super::{Live, Run};
use crate::instance::{Instance, Var};
use crate::trace::{Reduction, Witness};

pub fn establish_ac(inst: &Instance) -> Reduction {
    let n = inst.num_vars();
    let mut run = Run::start(inst);
    let mut live = Live::of(inst);
    let mut updates = 0u64;

    let mut queue: VecDeque<(Var, Var)> = VecDeque::new();
    let mut queued = vec![false; n * n];
    for i in 0..n {
        for &j in inst.neighbours(i) {
            queue.push_back((i, j));
            queued[i * n + j] = true;
        }
    }

    if inst.is_wiped_out() {
        return run.finish(inst, &live, updates);
    }
    'outer: while let Some((i, j)) = queue.pop_front() {
        queued[i * n + j] = false;
        let rel = inst.relation(i, j).expect("edge has a relation");
        let mut changed = false;
        for a in 0..inst.original_len(i) {
            if !live.has(i, a) || live.positions(j).any(|c| rel.get(a, c)) {
                continue;
            }
            live.remove(i, a);
            updates += 1;
            changed = true;
            run.trace
                .push(i, inst.value_at(i, a), Witness::Ac { unsupported_at: j });
            if live.len(i) == 0 {
                break 'outer;
            }
        }
        if changed {
            for &k in inst.neighbours(i) {
                if k != j && !queued[k * n + i] {
                    queued[k * n + i] = true;
                    queue.push_back((k, i));
                    updates += 1;
                }
            }
        }
    }
    run.finish(inst, &live, updates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::InstanceBuilder;
    use crate::trace::Rule;

    #[test]
    fn removes_unsupported_values() {
        // x < y < z over {0,1,2} forces x=0, y=1, z=2
        let mut b = InstanceBuilder::new("lt");
        for v in ["x", "y", "z"] {
            b.variable(v, vec![0, 1, 2]);
        }
        b.predicate(0, 1, |p, q| p < q);
        b.predicate(1, 2, |p, q| p < q);
        let r = establish_ac(&b.build().unwrap());
        assert_eq!(r.instance.domain(0), vec![0]);
        assert_eq!(r.instance.domain(1), vec![1]);
        assert_eq!(r.instance.domain(2), vec![2]);
        assert_eq!(r.report.ac, 6);
        assert!(r.trace.steps.iter().all(|s| s.rule() == Rule::Ac));
        assert!(!r.report.unsatisfiable);
    }

    #[test]
    fn reports_wipe_out() {
        let mut b = InstanceBuilder::new("w");
        b.variable("x", vec![0, 1]);
        b.variable("y", vec![0, 1]);
        b.allowed(0, 1, vec![]);
        let r = establish_ac(&b.build().unwrap());
        assert!(r.report.unsatisfiable);
    }
}
