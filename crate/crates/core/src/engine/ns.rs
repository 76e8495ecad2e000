//! Neighbourhood substitution to convergence.

use std::collections::VecDeque;

use super::blocks::{BlockChange, Blocks};
use super::{EngineOptions, Live, Run};
use crate::instance::{Instance, Var};
use crate::trace::{Reduction, Witness};

pub fn ns_to_convergence(inst: &Instance) -> Reduction {
    ns_to_convergence_with(inst, &EngineOptions::from_env())
}

/// Removes neighbourhood substitutable values until none remain. Among
/// interchangeable values the lower ones go first.
pub fn ns_to_convergence_with(inst: &Instance, opts: &EngineOptions) -> Reduction {
    let mut run = Run::start(inst);
    let mut live = Live::of(inst);
    let mut updates = 0u64;
    let mut blocks = Blocks::new(inst, &live, &mut updates);

    let mut list: VecDeque<(Var, usize, usize)> = VecDeque::new();
    for k in 0..inst.num_vars() {
        for d in live.positions(k) {
            for e in live.positions(k) {
                if d != e && blocks.is_empty(k, d, e) {
                    list.push_back((k, d, e));
                }
            }
        }
    }

    while let Some((p, u, v)) = list.pop_front() {
        if !live.has(p, u) || !live.has(p, v) {
            continue;
        }
        let by = live
            .positions(p)
            .find(|&a| a != u && blocks.is_empty(p, u, a))
            .expect("v qualifies");
        run.trace.push(
            p,
            inst.value_at(p, u),
            Witness::Ns {
                by: inst.value_at(p, by),
            },
        );
        live.remove(p, u);

        for &k in inst.neighbours(p) {
            let slot = inst.slot(k, p).expect("symmetric adjacency");
            let rel = inst.relation(k, p).expect("edge has a relation");
            for d in 0..inst.original_len(k) {
                if !live.has(k, d) || !rel.get(d, u) {
                    continue;
                }
                for e in 0..inst.original_len(k) {
                    if !live.has(k, e) || rel.get(e, u) {
                        continue;
                    }
                    if blocks.decrement(k, slot, p, d, e, &mut updates)
                        == Some(BlockChange::Emptied)
                    {
                        list.push_back((k, d, e));
                        updates += 1;
                    }
                }
            }
        }

        if opts.debug_recompute {
            let mut scratch = 0;
            let fresh = Blocks::new(inst, &live, &mut scratch);
            let mut msgs = Vec::new();
            blocks.diff(&fresh, inst, &live, &mut msgs);
            run.violation(msgs);
        }
    }
    run.finish(inst, &live, updates)
}
