//! Snake substitution to convergence.
//!
//! Counters, for `{i,k}` an edge:
//!
//! * `NbSubs(i,a,k,d)`, for `(a,d)` not allowed: live `e` in `D(x_k)`
//!   compatible with `a` such that `BlockVars(k,d,e)` is inside `{i}`.
//! * `NbStops(i,a,b,k)`: live `d` compatible with `b` but not with `a`
//!   that have no such `e`. Zero iff `b` is snake substitutable by `a`
//!   at `k`.
//! * `NbStopVars(i,a,b)`: neighbours `k` with non-zero `NbStops`.
//! * `NbSnake(i,b)`: live `a != b` with `NbStopVars(i,a,b) = 0`.
//! * `Inconsistent(i,b)`: `b` has lost all support at some neighbour.
//!
//! Arc-inconsistent and neighbourhood substitutable values are queued at
//! the front of the work list, snake substitutable ones at the back.

use std::collections::VecDeque;

use super::blocks::{BlockChange, Blocks};
use super::{diff_into, EngineOptions, Live, Run};
use crate::error::{Error, Result};
use crate::instance::{Instance, Value, Var};
use crate::trace::{Reduction, Sub, Witness};

pub fn ss_to_convergence(inst: &Instance) -> Reduction {
    ss_to_convergence_with(inst, &EngineOptions::from_env())
}

/// Expects an arc consistent instance. Values that are not arc
/// consistent to begin with are removed as such, but no arc consistency
/// propagation beyond the immediate neighbours of an eliminated value is
/// attempted.
pub fn ss_to_convergence_with(inst: &Instance, opts: &EngineOptions) -> Reduction {
    SsCounters::new(inst).run(opts)
}

pub fn init_ss_counters(inst: &Instance) -> SsCounters<'_> {
    SsCounters::new(inst)
}

struct Tables {
    blocks: Blocks,
    // [i][slot of k][a * m_k + d]
    nb_subs: Vec<Vec<Vec<u32>>>,
    // [i][slot of k][a * m_i + b]
    nb_stops: Vec<Vec<Vec<u32>>>,
    // [i][a * m_i + b]
    nb_stop_vars: Vec<Vec<u32>>,
    nb_snake: Vec<Vec<u32>>,
    inconsistent: Vec<Vec<bool>>,
}

impl Tables {
    fn fresh(inst: &Instance, live: &Live, updates: &mut u64) -> Tables {
        let n = inst.num_vars();
        let m: Vec<usize> = (0..n).map(|i| inst.original_len(i)).collect();
        let blocks = Blocks::new(inst, live, updates);

        let mut nb_subs = Vec::with_capacity(n);
        for i in 0..n {
            let mut per = Vec::new();
            for &k in inst.neighbours(i) {
                let rel = inst.relation(i, k).expect("edge");
                let mut t = vec![0u32; m[i] * m[k]];
                for a in live.positions(i) {
                    for d in live.positions(k) {
                        if rel.get(a, d) {
                            continue;
                        }
                        let c = live
                            .positions(k)
                            .filter(|&e| rel.get(a, e) && blocks.within(k, d, e, i))
                            .count() as u32;
                        t[a * m[k] + d] = c;
                        *updates += c as u64;
                    }
                }
                per.push(t);
            }
            nb_subs.push(per);
        }

        let mut nb_stops = Vec::with_capacity(n);
        let mut nb_stop_vars = Vec::with_capacity(n);
        let mut nb_snake = Vec::with_capacity(n);
        let mut inconsistent = Vec::with_capacity(n);
        for i in 0..n {
            let mi = m[i];
            let mut per = Vec::new();
            let mut vars = vec![0u32; mi * mi];
            for (s, &k) in inst.neighbours(i).iter().enumerate() {
                let rel = inst.relation(i, k).expect("edge");
                let mut t = vec![0u32; mi * mi];
                for a in live.positions(i) {
                    for b in live.positions(i) {
                        let c = live
                            .positions(k)
                            .filter(|&d| {
                                rel.get(b, d) && !rel.get(a, d) && nb_subs[i][s][a * m[k] + d] == 0
                            })
                            .count() as u32;
                        t[a * mi + b] = c;
                        *updates += c as u64;
                        if c > 0 {
                            vars[a * mi + b] += 1;
                            *updates += 1;
                        }
                    }
                }
                per.push(t);
            }
            let mut snake = vec![0u32; mi];
            for b in live.positions(i) {
                for a in live.positions(i) {
                    if a != b && vars[a * mi + b] == 0 {
                        snake[b] += 1;
                        *updates += 1;
                    }
                }
            }
            let mut inc = vec![false; mi];
            for b in live.positions(i) {
                inc[b] = inst.neighbours(i).iter().any(|&k| {
                    let rel = inst.relation(i, k).expect("edge");
                    !live.positions(k).any(|c| rel.get(b, c))
                });
            }
            nb_stops.push(per);
            nb_stop_vars.push(vars);
            nb_snake.push(snake);
            inconsistent.push(inc);
        }

        Tables {
            blocks,
            nb_subs,
            nb_stops,
            nb_stop_vars,
            nb_snake,
            inconsistent,
        }
    }

    fn diff(&self, fresh: &Tables, inst: &Instance, live: &Live) -> Vec<String> {
        let mut out = Vec::new();
        self.blocks.diff(&fresh.blocks, inst, live, &mut out);
        for i in 0..inst.num_vars() {
            let mi = inst.original_len(i);
            for (s, &k) in inst.neighbours(i).iter().enumerate() {
                let mk = inst.original_len(k);
                let rel = inst.relation(i, k).expect("edge");
                for a in live.positions(i) {
                    for d in live.positions(k) {
                        if !rel.get(a, d) {
                            diff_into(
                                &mut out,
                                || format!("NbSubs({i},{a},{k},{d})"),
                                self.nb_subs[i][s][a * mk + d],
                                fresh.nb_subs[i][s][a * mk + d],
                            );
                        }
                    }
                    for b in live.positions(i) {
                        diff_into(
                            &mut out,
                            || format!("NbStops({i},{a},{b},{k})"),
                            self.nb_stops[i][s][a * mi + b],
                            fresh.nb_stops[i][s][a * mi + b],
                        );
                    }
                }
            }
            for b in live.positions(i) {
                for a in live.positions(i) {
                    diff_into(
                        &mut out,
                        || format!("NbStopVars({i},{a},{b})"),
                        self.nb_stop_vars[i][a * mi + b],
                        fresh.nb_stop_vars[i][a * mi + b],
                    );
                }
                diff_into(
                    &mut out,
                    || format!("NbSnake({i},{b})"),
                    self.nb_snake[i][b],
                    fresh.nb_snake[i][b],
                );
                diff_into(
                    &mut out,
                    || format!("Inconsistent({i},{b})"),
                    self.inconsistent[i][b],
                    fresh.inconsistent[i][b],
                );
            }
        }
        out
    }
}

/// Engine state: the counters plus the work list.
pub struct SsCounters<'a> {
    inst: &'a Instance,
    live: Live,
    updates: u64,
    run: Run,
    t: Tables,
    head: VecDeque<(Var, usize)>,
    tail: VecDeque<(Var, usize)>,
    started_ac: bool,
    lost_support: u64,
}

impl<'a> SsCounters<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let run = Run::start(inst);
        let live = Live::of(inst);
        let mut updates = 0;
        let t = Tables::fresh(inst, &live, &mut updates);
        let mut head = VecDeque::new();
        let mut tail = VecDeque::new();
        for i in 0..inst.num_vars() {
            for b in live.positions(i) {
                if t.inconsistent[i][b]
                    || live
                        .positions(i)
                        .any(|a| a != b && t.blocks.is_empty(i, b, a))
                {
                    head.push_back((i, b));
                } else if t.nb_snake[i][b] > 0 {
                    tail.push_back((i, b));
                }
            }
        }
        let started_ac = t.inconsistent.iter().flatten().all(|&x| !x);
        SsCounters {
            inst,
            live,
            updates,
            run,
            t,
            head,
            tail,
            started_ac,
            lost_support: 0,
        }
    }

    fn pos(&self, i: Var, v: Value) -> Result<usize> {
        self.inst.require_value(i, v)
    }

    fn slot(&self, i: Var, k: Var) -> Result<usize> {
        self.inst.require_var(k)?;
        self.inst
            .slot(i, k)
            .ok_or_else(|| Error::Invalid(format!("{i} and {k} are not constrained")))
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn nb_blocks(&self, k: Var, d: Value, e: Value, l: Var) -> Result<u32> {
        self.slot(k, l)?;
        let (pd, pe) = (self.pos(k, d)?, self.pos(k, e)?);
        Ok(self.t.blocks.nb_blocks(self.inst, k, pd, pe, l))
    }

    pub fn block_vars(&self, k: Var, d: Value, e: Value) -> Result<Vec<Var>> {
        Ok(self
            .t
            .blocks
            .members(self.inst, k, self.pos(k, d)?, self.pos(k, e)?))
    }

    pub fn nb_subs(&self, i: Var, a: Value, k: Var, d: Value) -> Result<u32> {
        let s = self.slot(i, k)?;
        let (pa, pd) = (self.pos(i, a)?, self.pos(k, d)?);
        Ok(self.t.nb_subs[i][s][pa * self.inst.original_len(k) + pd])
    }

    pub fn nb_stops(&self, i: Var, a: Value, b: Value, k: Var) -> Result<u32> {
        let s = self.slot(i, k)?;
        let (pa, pb) = (self.pos(i, a)?, self.pos(i, b)?);
        Ok(self.t.nb_stops[i][s][pa * self.inst.original_len(i) + pb])
    }

    pub fn nb_stop_vars(&self, i: Var, a: Value, b: Value) -> Result<u32> {
        let (pa, pb) = (self.pos(i, a)?, self.pos(i, b)?);
        Ok(self.t.nb_stop_vars[i][pa * self.inst.original_len(i) + pb])
    }

    pub fn nb_snake(&self, i: Var, b: Value) -> Result<u32> {
        Ok(self.t.nb_snake[i][self.pos(i, b)?])
    }

    pub fn inconsistent(&self, i: Var, b: Value) -> Result<bool> {
        Ok(self.t.inconsistent[i][self.pos(i, b)?])
    }

    /// Queued values, front part first.
    pub fn pending(&self) -> Vec<(Var, Value)> {
        self.head
            .iter()
            .chain(self.tail.iter())
            .map(|&(i, p)| (i, self.inst.value_at(i, p)))
            .collect()
    }

    /// `d` in `D(x_k)` stopped being a stop for `(a, b)`.
    pub fn dec_stops(&mut self, i: Var, a: Value, b: Value, k: Var) -> Result<()> {
        let s = self.slot(i, k)?;
        let (pa, pb) = (self.pos(i, a)?, self.pos(i, b)?);
        self.dec_stops_at(i, pa, pb, s);
        Ok(())
    }

    /// `d` in `D(x_k)` became a stop for `(a, b)`.
    pub fn inc_stops(&mut self, i: Var, a: Value, b: Value, k: Var) -> Result<()> {
        let s = self.slot(i, k)?;
        let (pa, pb) = (self.pos(i, a)?, self.pos(i, b)?);
        self.inc_stops_at(i, pa, pb, s);
        Ok(())
    }

    fn dec_stops_at(&mut self, i: Var, a: usize, b: usize, s: usize) {
        debug_assert_ne!(a, b);
        let mi = self.inst.original_len(i);
        let c = &mut self.t.nb_stops[i][s][a * mi + b];
        *c -= 1;
        self.updates += 1;
        if *c > 0 {
            return;
        }
        let v = &mut self.t.nb_stop_vars[i][a * mi + b];
        *v -= 1;
        self.updates += 1;
        if *v > 0 {
            return;
        }
        let sn = &mut self.t.nb_snake[i][b];
        *sn += 1;
        self.updates += 1;
        if *sn == 1 {
            self.tail.push_back((i, b));
        }
    }

    fn inc_stops_at(&mut self, i: Var, a: usize, b: usize, s: usize) {
        debug_assert_ne!(a, b);
        let mi = self.inst.original_len(i);
        let c = &mut self.t.nb_stops[i][s][a * mi + b];
        *c += 1;
        self.updates += 1;
        if *c > 1 {
            return;
        }
        let v = &mut self.t.nb_stop_vars[i][a * mi + b];
        *v += 1;
        self.updates += 1;
        if *v > 1 {
            return;
        }
        self.t.nb_snake[i][b] -= 1;
        self.updates += 1;
    }

    /// `e` became a replacement for `d` in `D(x_k)` as seen from `x_i`.
    fn sub_gained(&mut self, i: Var, k: Var, d: usize, e: usize) {
        let inst = self.inst;
        let s = inst.slot(i, k).expect("edge");
        let rel = inst.relation(i, k).expect("edge");
        let mk = inst.original_len(k);
        for a in 0..inst.original_len(i) {
            if !self.live.has(i, a) || rel.get(a, d) || !rel.get(a, e) {
                continue;
            }
            let c = &mut self.t.nb_subs[i][s][a * mk + d];
            *c += 1;
            self.updates += 1;
            if *c == 1 {
                for b in 0..inst.original_len(i) {
                    if self.live.has(i, b) && rel.get(b, d) {
                        self.dec_stops_at(i, a, b, s);
                    }
                }
            }
        }
    }

    fn propagate(&mut self, r: Var, u: usize) {
        let inst = self.inst;

        // values of neighbours k that u was blocking
        for &k in inst.neighbours(r) {
            let slot = inst.slot(k, r).expect("edge");
            let rel = inst.relation(k, r).expect("edge");
            let mk = inst.original_len(k);
            for d in 0..mk {
                if !self.live.has(k, d) || !rel.get(d, u) {
                    continue;
                }
                for e in 0..mk {
                    if !self.live.has(k, e) || rel.get(e, u) {
                        continue;
                    }
                    match self.t.blocks.decrement(k, slot, r, d, e, &mut self.updates) {
                        Some(BlockChange::Emptied) => {
                            self.head.push_back((k, d));
                            for &i in inst.neighbours(k) {
                                if i != r {
                                    self.sub_gained(i, k, d, e);
                                }
                            }
                        }
                        Some(BlockChange::Singleton(i)) => self.sub_gained(i, k, d, e),
                        None => {}
                    }
                }
            }
        }

        let mr = inst.original_len(r);
        for &i in inst.neighbours(r) {
            let s = inst.slot(i, r).expect("edge");
            let rel = inst.relation(i, r).expect("edge");
            let mi = inst.original_len(i);

            // u no longer replaces anything
            for a in 0..mi {
                if !self.live.has(i, a) || !rel.get(a, u) {
                    continue;
                }
                for d in 0..mr {
                    if !self.live.has(r, d) || rel.get(a, d) || !self.t.blocks.within(r, d, u, i) {
                        continue;
                    }
                    let c = &mut self.t.nb_subs[i][s][a * mr + d];
                    *c -= 1;
                    self.updates += 1;
                    if *c == 0 {
                        for b in 0..mi {
                            if self.live.has(i, b) && rel.get(b, d) {
                                self.inc_stops_at(i, a, b, s);
                            }
                        }
                    }
                }
            }

            // u no longer stops anything
            for a in 0..mi {
                if !self.live.has(i, a) || rel.get(a, u) || self.t.nb_subs[i][s][a * mr + u] != 0 {
                    continue;
                }
                for b in 0..mi {
                    if self.live.has(i, b) && rel.get(b, u) {
                        self.dec_stops_at(i, a, b, s);
                    }
                }
            }

            // values that just lost their last support
            for v in 0..mi {
                if !self.live.has(i, v) || !rel.get(v, u) || self.t.inconsistent[i][v] {
                    continue;
                }
                if !self.live.positions(r).any(|c| rel.get(v, c)) {
                    self.t.inconsistent[i][v] = true;
                    self.updates += 1;
                    self.lost_support += 1;
                    self.head.push_back((i, v));
                }
            }
        }

        // u no longer substitutes for its siblings
        for b in 0..mr {
            if self.live.has(r, b) && self.t.nb_stop_vars[r][u * mr + b] == 0 {
                self.t.nb_snake[r][b] -= 1;
                self.updates += 1;
            }
        }
    }

    fn witness(&self, r: Var, u: usize) -> Witness {
        let inst = self.inst;
        if self.t.inconsistent[r][u] {
            let j = inst
                .neighbours(r)
                .iter()
                .copied()
                .find(|&k| {
                    let rel = inst.relation(r, k).expect("edge");
                    !self.live.positions(k).any(|c| rel.get(u, c))
                })
                .expect("inconsistent values lack support somewhere");
            return Witness::Ac { unsupported_at: j };
        }
        if let Some(a) = self
            .live
            .positions(r)
            .find(|&a| a != u && self.t.blocks.is_empty(r, u, a))
        {
            return Witness::Ns {
                by: inst.value_at(r, a),
            };
        }
        let mr = inst.original_len(r);
        let a = self
            .live
            .positions(r)
            .find(|&a| a != u && self.t.nb_stop_vars[r][a * mr + u] == 0)
            .expect("validated entry has a snake substitute");
        let mut subs = Vec::new();
        for &k in inst.neighbours(r) {
            let rel = inst.relation(r, k).expect("edge");
            for d in self.live.positions(k) {
                if !rel.get(u, d) || rel.get(a, d) {
                    continue;
                }
                let e = self
                    .live
                    .positions(k)
                    .find(|&e| rel.get(a, e) && self.t.blocks.within(k, d, e, r))
                    .expect("no stops left");
                subs.push(Sub {
                    variable: k,
                    from: inst.value_at(k, d),
                    to: inst.value_at(k, e),
                });
            }
        }
        Witness::Ss {
            by: inst.value_at(r, a),
            subs,
        }
    }

    /// Rebuilds every counter from the current domains and lists the
    /// entries that differ.
    pub fn violations(&self) -> Vec<String> {
        let mut scratch = 0;
        let fresh = Tables::fresh(self.inst, &self.live, &mut scratch);
        self.t.diff(&fresh, self.inst, &self.live)
    }

    pub fn run(mut self, opts: &EngineOptions) -> Reduction {
        while let Some((r, u)) = self.head.pop_front().or_else(|| self.tail.pop_front()) {
            if !self.live.has(r, u) || (self.t.nb_snake[r][u] == 0 && !self.t.inconsistent[r][u]) {
                continue;
            }
            let w = self.witness(r, u);
            let by_ac = matches!(w, Witness::Ac { .. });
            self.run.trace.push(r, self.inst.value_at(r, u), w);
            self.live.remove(r, u);
            if self.live.len(r) == 0 {
                self.run.report.unsatisfiable = true;
                break;
            }
            let lost = self.lost_support;
            self.propagate(r, u);
            if opts.debug_recompute {
                let mut v = self.violations();
                // From an arc consistent start, removing an unsupported
                // value never leaves another one unsupported.
                if self.started_ac && by_ac && self.lost_support > lost {
                    v.push(format!(
                        "second-level arc inconsistency after removing ({r},{u})"
                    ));
                }
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
    use crate::trace::Rule;

    #[test]
    fn figure1a_initial_counters() {
        let inst = generators::figure1a();
        let c = init_ss_counters(&inst);
        assert_eq!(c.nb_blocks(1, 0, 1, 0).unwrap(), 1);
        assert_eq!(c.block_vars(1, 0, 1).unwrap(), vec![0]);
        // 0 at x1 is snake substitutable by 1 at x2 via d = 0 -> e = 1
        assert_eq!(c.nb_subs(0, 1, 1, 0).unwrap(), 1);
        assert_eq!(c.nb_stops(0, 1, 0, 1).unwrap(), 0);
        assert_eq!(c.nb_stop_vars(0, 1, 0).unwrap(), 0);
        assert_eq!(c.nb_snake(0, 0).unwrap(), 1);
        assert_eq!(c.nb_snake(0, 1).unwrap(), 0);
        assert!(c.violations().is_empty());
        assert_eq!(c.pending(), vec![(0, 0), (1, 0), (2, 0), (3, 0)]);
    }

    #[test]
    fn figure1a_reduces_to_ones() {
        let r = ss_to_convergence_with(&generators::figure1a(), &EngineOptions::checked());
        assert_eq!(
            r.report.integrity_violations, 0,
            "{:?}",
            r.report.first_violation
        );
        for i in 0..4 {
            assert_eq!(r.instance.domain(i), vec![1]);
        }
        assert_eq!(r.report.eliminations(), 4);
        assert_eq!(r.trace.steps[0].rule(), Rule::Ss);
    }

    #[test]
    fn stops_round_trip() {
        let inst = generators::figure1a();
        let mut c = init_ss_counters(&inst);
        let before = c.nb_snake(0, 0).unwrap();
        c.inc_stops(0, 1, 0, 1).unwrap();
        assert_eq!(c.nb_snake(0, 0).unwrap(), before - 1);
        c.dec_stops(0, 1, 0, 1).unwrap();
        assert_eq!(c.nb_snake(0, 0).unwrap(), before);
        assert!(c.dec_stops(0, 1, 0, 2).is_err());
    }

    #[test]
    fn witnesses_match_oracle() {
        let inst = generators::figure1c();
        let r = ss_to_convergence_with(
            &crate::engine::establish_ac(&inst).instance,
            &EngineOptions::checked(),
        );
        let mut cur = inst.clone();
        for s in &r.trace.steps {
            match &s.witness {
                Witness::Ss { .. } => assert_eq!(
                    oracle::is_ss(&cur, s.variable, s.value).unwrap(),
                    Some(s.witness.clone())
                ),
                Witness::Ns { .. } => assert_eq!(
                    oracle::is_ns(&cur, s.variable, s.value).unwrap(),
                    Some(s.witness.clone())
                ),
                _ => {}
            }
            cur = cur.remove_value(s.variable, s.value).unwrap();
        }
    }
}
