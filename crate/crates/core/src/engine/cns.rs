//! Conditioned neighbourhood substitution to convergence.
//!
//! For an edge `{i,j}`, `NbCovers(i,b,j,c)` counts the live `a != b`
//! compatible with `c` such that `BlockVars(i,b,a)` is inside `{j}`, and
//! `Uncovered(i,b,j)` holds the live `c` compatible with `b` whose count
//! is zero. `b` is eliminable conditioned on `x_j` once `Uncovered` is
//! empty. Neighbourhood substitutable values go first.

use std::collections::VecDeque;

use super::blocks::{BlockChange, Blocks};
use super::{diff_into, EngineOptions, Live, Run};
use crate::error::{Error, Result};
use crate::instance::{Instance, Value, Var};
use crate::trace::{Cover, Reduction, Witness};

pub fn cns_to_convergence(inst: &Instance) -> Reduction {
    cns_to_convergence_with(inst, &EngineOptions::from_env())
}

/// Accepts any instance. When the input is arc consistent, so is the
/// result.
pub fn cns_to_convergence_with(inst: &Instance, opts: &EngineOptions) -> Reduction {
    CnsCounters::new(inst).run(opts)
}

struct Tables {
    blocks: Blocks,
    // [i][slot of j][b * m_j + c]
    nb_covers: Vec<Vec<Vec<u32>>>,
    uncovered: Vec<Vec<Vec<bool>>>,
    // [i][slot of j][b]
    uncovered_len: Vec<Vec<Vec<u32>>>,
}

impl Tables {
    fn fresh(inst: &Instance, live: &Live, updates: &mut u64) -> Tables {
        let n = inst.num_vars();
        let blocks = Blocks::new(inst, live, updates);
        let mut nb_covers = Vec::with_capacity(n);
        let mut uncovered = Vec::with_capacity(n);
        let mut uncovered_len = Vec::with_capacity(n);
        for i in 0..n {
            let mi = inst.original_len(i);
            let (mut cov, mut unc, mut len) = (Vec::new(), Vec::new(), Vec::new());
            for &j in inst.neighbours(i) {
                let mj = inst.original_len(j);
                let rel = inst.relation(i, j).expect("edge");
                let mut t = vec![0u32; mi * mj];
                let mut u = vec![false; mi * mj];
                let mut l = vec![0u32; mi];
                for b in live.positions(i) {
                    for c in live.positions(j) {
                        let k = live
                            .positions(i)
                            .filter(|&a| a != b && rel.get(a, c) && blocks.within(i, b, a, j))
                            .count() as u32;
                        t[b * mj + c] = k;
                        *updates += k as u64;
                        if k == 0 && rel.get(b, c) {
                            u[b * mj + c] = true;
                            l[b] += 1;
                            *updates += 1;
                        }
                    }
                }
                cov.push(t);
                unc.push(u);
                len.push(l);
            }
            nb_covers.push(cov);
            uncovered.push(unc);
            uncovered_len.push(len);
        }
        Tables {
            blocks,
            nb_covers,
            uncovered,
            uncovered_len,
        }
    }

    fn diff(&self, fresh: &Tables, inst: &Instance, live: &Live) -> Vec<String> {
        let mut out = Vec::new();
        self.blocks.diff(&fresh.blocks, inst, live, &mut out);
        for i in 0..inst.num_vars() {
            for (s, &j) in inst.neighbours(i).iter().enumerate() {
                let mj = inst.original_len(j);
                for b in live.positions(i) {
                    for c in live.positions(j) {
                        diff_into(
                            &mut out,
                            || format!("NbCovers({i},{b},{j},{c})"),
                            self.nb_covers[i][s][b * mj + c],
                            fresh.nb_covers[i][s][b * mj + c],
                        );
                        diff_into(
                            &mut out,
                            || format!("Uncovered({i},{b},{j}) has {c}"),
                            self.uncovered[i][s][b * mj + c],
                            fresh.uncovered[i][s][b * mj + c],
                        );
                    }
                    diff_into(
                        &mut out,
                        || format!("|Uncovered({i},{b},{j})|"),
                        self.uncovered_len[i][s][b],
                        fresh.uncovered_len[i][s][b],
                    );
                }
            }
        }
        out
    }
}

pub struct CnsCounters<'a> {
    inst: &'a Instance,
    live: Live,
    updates: u64,
    run: Run,
    t: Tables,
    ns_list: VecDeque<(Var, usize, usize)>,
    cns_list: VecDeque<(Var, usize, Var)>,
}

impl<'a> CnsCounters<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let run = Run::start(inst);
        let live = Live::of(inst);
        let mut updates = 0;
        let t = Tables::fresh(inst, &live, &mut updates);
        let mut ns_list = VecDeque::new();
        let mut cns_list = VecDeque::new();
        for i in 0..inst.num_vars() {
            for b in live.positions(i) {
                for a in live.positions(i) {
                    if a != b && t.blocks.is_empty(i, b, a) {
                        ns_list.push_back((i, b, a));
                    }
                }
                for (s, &j) in inst.neighbours(i).iter().enumerate() {
                    if t.uncovered_len[i][s][b] == 0 {
                        cns_list.push_back((i, b, j));
                    }
                }
            }
        }
        CnsCounters {
            inst,
            live,
            updates,
            run,
            t,
            ns_list,
            cns_list,
        }
    }

    fn slot(&self, i: Var, j: Var) -> Result<usize> {
        self.inst.require_var(j)?;
        self.inst
            .slot(i, j)
            .ok_or_else(|| Error::Invalid(format!("{i} and {j} are not constrained")))
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn nb_covers(&self, i: Var, b: Value, j: Var, c: Value) -> Result<u32> {
        let s = self.slot(i, j)?;
        let (pb, pc) = (
            self.inst.require_value(i, b)?,
            self.inst.require_value(j, c)?,
        );
        Ok(self.t.nb_covers[i][s][pb * self.inst.original_len(j) + pc])
    }

    pub fn uncovered(&self, i: Var, b: Value, j: Var) -> Result<Vec<Value>> {
        let s = self.slot(i, j)?;
        let pb = self.inst.require_value(i, b)?;
        let mj = self.inst.original_len(j);
        Ok(self
            .live
            .positions(j)
            .filter(|&c| self.t.uncovered[i][s][pb * mj + c])
            .map(|c| self.inst.value_at(j, c))
            .collect())
    }

    pub fn violations(&self) -> Vec<String> {
        let mut scratch = 0;
        let fresh = Tables::fresh(self.inst, &self.live, &mut scratch);
        self.t.diff(&fresh, self.inst, &self.live)
    }

    /// `a` now covers `b` for every `c` compatible with it, conditioned
    /// on `x_j`.
    fn covers_gained(&mut self, i: Var, b: usize, a: usize, j: Var) {
        let inst = self.inst;
        let s = inst.slot(i, j).expect("edge");
        let rel = inst.relation(i, j).expect("edge");
        let mj = inst.original_len(j);
        for c in 0..mj {
            if !self.live.has(j, c) || !rel.get(a, c) {
                continue;
            }
            let at = b * mj + c;
            self.t.nb_covers[i][s][at] += 1;
            self.updates += 1;
            if self.t.uncovered[i][s][at] {
                self.t.uncovered[i][s][at] = false;
                self.updates += 1;
                let len = &mut self.t.uncovered_len[i][s][b];
                *len -= 1;
                if *len == 0 {
                    self.cns_list.push_back((i, b, j));
                }
            }
        }
    }

    fn propagate(&mut self, p: Var, u: usize) {
        let inst = self.inst;
        let mp = inst.original_len(p);

        // u was blocking (b, a) for neighbours i
        for &i in inst.neighbours(p) {
            let slot = inst.slot(i, p).expect("edge");
            let rel = inst.relation(i, p).expect("edge");
            let mi = inst.original_len(i);
            for b in 0..mi {
                if !self.live.has(i, b) || !rel.get(b, u) {
                    continue;
                }
                for a in 0..mi {
                    if !self.live.has(i, a) || rel.get(a, u) {
                        continue;
                    }
                    match self.t.blocks.decrement(i, slot, p, b, a, &mut self.updates) {
                        Some(BlockChange::Emptied) => {
                            self.ns_list.push_back((i, b, a));
                            for &j in inst.neighbours(i) {
                                if j != p {
                                    self.covers_gained(i, b, a, j);
                                }
                            }
                        }
                        Some(BlockChange::Singleton(j)) => self.covers_gained(i, b, a, j),
                        None => {}
                    }
                }
            }
        }

        // u no longer covers its siblings
        for b in 0..mp {
            if !self.live.has(p, b) {
                continue;
            }
            for (s, &j) in inst.neighbours(p).iter().enumerate() {
                if !self.t.blocks.within(p, b, u, j) {
                    continue;
                }
                let rel = inst.relation(p, j).expect("edge");
                let mj = inst.original_len(j);
                for c in 0..mj {
                    if !self.live.has(j, c) || !rel.get(u, c) {
                        continue;
                    }
                    let at = b * mj + c;
                    self.t.nb_covers[p][s][at] -= 1;
                    self.updates += 1;
                    if self.t.nb_covers[p][s][at] == 0 && rel.get(b, c) {
                        self.t.uncovered[p][s][at] = true;
                        self.t.uncovered_len[p][s][b] += 1;
                        self.updates += 1;
                    }
                }
            }
        }

        // u no longer needs covering
        for &i in inst.neighbours(p) {
            let s = inst.slot(i, p).expect("edge");
            for b in 0..inst.original_len(i) {
                let at = b * mp + u;
                if !self.live.has(i, b) || !self.t.uncovered[i][s][at] {
                    continue;
                }
                self.t.uncovered[i][s][at] = false;
                self.updates += 1;
                let len = &mut self.t.uncovered_len[i][s][b];
                *len -= 1;
                if *len == 0 {
                    self.cns_list.push_back((i, b, p));
                }
            }
        }
    }

    fn cns_witness(&self, p: Var, u: usize, q: Var) -> Witness {
        let inst = self.inst;
        let rel = inst.relation(p, q).expect("edge");
        let covers = self
            .live
            .positions(q)
            .filter(|&c| rel.get(u, c))
            .map(|c| {
                let a = self
                    .live
                    .positions(p)
                    .find(|&a| a != u && rel.get(a, c) && self.t.blocks.within(p, u, a, q))
                    .expect("every compatible value is covered");
                Cover {
                    c: inst.value_at(q, c),
                    a: inst.value_at(p, a),
                }
            })
            .collect();
        Witness::Cns {
            conditioning: Some(q),
            covers,
        }
    }

    pub fn run(mut self, opts: &EngineOptions) -> Reduction {
        loop {
            let (p, u, w) = if let Some((p, u, v)) = self.ns_list.pop_front() {
                if !self.live.has(p, u) || !self.live.has(p, v) {
                    continue;
                }
                let a = self
                    .live
                    .positions(p)
                    .find(|&a| a != u && self.t.blocks.is_empty(p, u, a))
                    .expect("v qualifies");
                (
                    p,
                    u,
                    Witness::Ns {
                        by: self.inst.value_at(p, a),
                    },
                )
            } else if let Some((p, u, q)) = self.cns_list.pop_front() {
                let s = self.inst.slot(p, q).expect("edge");
                if !self.live.has(p, u) || self.t.uncovered_len[p][s][u] != 0 {
                    continue;
                }
                (p, u, self.cns_witness(p, u, q))
            } else {
                break;
            };
            self.run.trace.push(p, self.inst.value_at(p, u), w);
            self.live.remove(p, u);
            if self.live.len(p) == 0 {
                self.run.report.unsatisfiable = true;
                break;
            }
            self.propagate(p, u);
            if opts.debug_recompute {
                let v = self.violations();
                self.run.violation(v);
            }
        }
        self.run.finish(self.inst, &self.live, self.updates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::oracle;

    #[test]
    fn figure1b_initial_covers() {
        let inst = generators::figure1b();
        let c = CnsCounters::new(&inst);
        assert_eq!(c.uncovered(1, 0, 0).unwrap(), Vec::<Value>::new());
        assert_eq!(c.nb_covers(1, 0, 0, 1).unwrap(), 1);
        assert!(c.violations().is_empty());
    }

    #[test]
    fn figure1b_removes_two_values() {
        let r = cns_to_convergence_with(&generators::figure1b(), &EngineOptions::checked());
        assert_eq!(
            r.report.integrity_violations, 0,
            "{:?}",
            r.report.first_violation
        );
        let removed: Vec<(Var, Value)> = r
            .trace
            .steps
            .iter()
            .map(|s| (s.variable, s.value))
            .collect();
        assert_eq!(removed, vec![(1, 0), (2, 2)]);
    }

    #[test]
    fn cns_first_blocks_ns() {
        let inst = generators::two_var_cns_vs_ns(4).unwrap();
        let after = inst.remove_value(1, 0).unwrap();
        assert!(oracle::is_cns(&inst, 1, 0).unwrap().is_some());
        let r = cns_to_convergence_with(&after, &EngineOptions::checked());
        assert_eq!(r.report.eliminations(), 0);
        let r = cns_to_convergence_with(&inst, &EngineOptions::checked());
        assert_eq!(r.report.eliminations(), 5);
    }
}
