//! Snake-conditioned snake substitution to convergence.
//!
//! On top of `NbSubs` and `NbStops` (see the snake engine), for an edge
//! `{i,j}`:
//!
//! * `StopVars(i,a,b)`: neighbours `k` with non-zero `NbStops(i,a,b,k)`,
//!   kept as size and member sum.
//! * `NbSnakeCovers(i,b,j,c)`: live `a != b` with `StopVars(i,a,b)`
//!   inside `{j}` and either `(a,c)` allowed or `NbSubs(i,a,j,c) > 0`.
//! * `NotSnakeCovered(i,b,j)`: live `c` compatible with `b` whose count
//!   is zero.

use std::collections::VecDeque;

use super::blocks::{BlockChange, Blocks};
use super::{diff_into, EngineOptions, Live, Run};
use crate::error::{Error, Result};
use crate::instance::{Instance, Value, Var};
use crate::trace::{Reduction, SnakeCover, Sub, Witness};

pub fn scss_to_convergence(inst: &Instance) -> Reduction {
    scss_to_convergence_with(inst, &EngineOptions::from_env())
}

pub fn scss_to_convergence_with(inst: &Instance, opts: &EngineOptions) -> Reduction {
    ScssCounters::new(inst).run(opts)
}

/// Every `(i, b, j)` such that `b` in `D(x_i)` is snake-conditioned
/// snake substitutable conditioned on `x_j`, computed from freshly built
/// counters. For a variable without neighbours `j` is the smallest other
/// variable, or `None` if there is none.
pub fn check_scss(inst: &Instance) -> Vec<(Var, Value, Option<Var>)> {
    let c = ScssCounters::new(inst);
    let mut out = Vec::new();
    for i in 0..inst.num_vars() {
        for b in c.live.positions(i) {
            for (s, &j) in inst.neighbours(i).iter().enumerate() {
                if c.t.nsc_len[i][s][b] == 0 {
                    out.push((i, inst.value_at(i, b), Some(j)));
                }
            }
            if inst.neighbours(i).is_empty() && c.live.len(i) >= 2 {
                out.push((i, inst.value_at(i, b), free_conditioning(inst, i)));
            }
        }
    }
    out
}

fn free_conditioning(inst: &Instance, i: Var) -> Option<Var> {
    (0..inst.num_vars()).find(|&j| j != i)
}

struct Tables {
    blocks: Blocks,
    // [i][slot of k][a * m_k + d]
    nb_subs: Vec<Vec<Vec<u32>>>,
    // [i][slot of k][a * m_i + b]
    nb_stops: Vec<Vec<Vec<u32>>>,
    // [i][a * m_i + b]
    stop_count: Vec<Vec<u32>>,
    stop_sum: Vec<Vec<usize>>,
    // [i][slot of j][b * m_j + c]
    nsc: Vec<Vec<Vec<u32>>>,
    nsc_member: Vec<Vec<Vec<bool>>>,
    // [i][slot of j][b]
    nsc_len: Vec<Vec<Vec<u32>>>,
}

impl Tables {
    fn stop_within(&self, inst: &Instance, i: Var, a: usize, b: usize, j: Var) -> bool {
        let at = a * inst.original_len(i) + b;
        match self.stop_count[i][at] {
            0 => true,
            1 => self.stop_sum[i][at] == j,
            _ => false,
        }
    }

    /// `a` reaches some `g` compatible with `c` through `x_j`.
    #[inline]
    fn reaches(&self, inst: &Instance, i: Var, a: usize, s: usize, j: Var, c: usize) -> bool {
        inst.relation(i, j).expect("edge").get(a, c)
            || self.nb_subs[i][s][a * inst.original_len(j) + c] > 0
    }

    fn fresh(inst: &Instance, live: &Live, updates: &mut u64) -> Tables {
        let n = inst.num_vars();
        let blocks = Blocks::new(inst, live, updates);

        let mut nb_subs = Vec::with_capacity(n);
        for i in 0..n {
            let mut per = Vec::new();
            for &k in inst.neighbours(i) {
                let mk = inst.original_len(k);
                let rel = inst.relation(i, k).expect("edge");
                let mut t = vec![0u32; inst.original_len(i) * mk];
                for a in live.positions(i) {
                    for d in live.positions(k) {
                        if rel.get(a, d) {
                            continue;
                        }
                        let c = live
                            .positions(k)
                            .filter(|&e| rel.get(a, e) && blocks.within(k, d, e, i))
                            .count() as u32;
                        t[a * mk + d] = c;
                        *updates += c as u64;
                    }
                }
                per.push(t);
            }
            nb_subs.push(per);
        }

        let mut nb_stops = Vec::with_capacity(n);
        let mut stop_count = Vec::with_capacity(n);
        let mut stop_sum = Vec::with_capacity(n);
        for (i, subs_i) in nb_subs.iter().enumerate() {
            let mi = inst.original_len(i);
            let mut per = Vec::new();
            let mut cnt = vec![0u32; mi * mi];
            let mut sum = vec![0usize; mi * mi];
            for (s, &k) in inst.neighbours(i).iter().enumerate() {
                let mk = inst.original_len(k);
                let rel = inst.relation(i, k).expect("edge");
                let mut t = vec![0u32; mi * mi];
                for a in live.positions(i) {
                    for b in live.positions(i) {
                        let c = live
                            .positions(k)
                            .filter(|&d| {
                                rel.get(b, d) && !rel.get(a, d) && subs_i[s][a * mk + d] == 0
                            })
                            .count() as u32;
                        t[a * mi + b] = c;
                        *updates += c as u64;
                        if c > 0 {
                            cnt[a * mi + b] += 1;
                            sum[a * mi + b] += k;
                            *updates += 1;
                        }
                    }
                }
                per.push(t);
            }
            nb_stops.push(per);
            stop_count.push(cnt);
            stop_sum.push(sum);
        }

        let mut t = Tables {
            blocks,
            nb_subs,
            nb_stops,
            stop_count,
            stop_sum,
            nsc: Vec::new(),
            nsc_member: Vec::new(),
            nsc_len: Vec::new(),
        };

        for i in 0..n {
            let mi = inst.original_len(i);
            let (mut cov, mut mem, mut len) = (Vec::new(), Vec::new(), Vec::new());
            for (s, &j) in inst.neighbours(i).iter().enumerate() {
                let mj = inst.original_len(j);
                let rel = inst.relation(i, j).expect("edge");
                let mut c_t = vec![0u32; mi * mj];
                let mut m_t = vec![false; mi * mj];
                let mut l_t = vec![0u32; mi];
                for b in live.positions(i) {
                    for c in live.positions(j) {
                        let k = live
                            .positions(i)
                            .filter(|&a| {
                                a != b
                                    && t.reaches(inst, i, a, s, j, c)
                                    && t.stop_within(inst, i, a, b, j)
                            })
                            .count() as u32;
                        c_t[b * mj + c] = k;
                        *updates += k as u64;
                        if k == 0 && rel.get(b, c) {
                            m_t[b * mj + c] = true;
                            l_t[b] += 1;
                            *updates += 1;
                        }
                    }
                }
                cov.push(c_t);
                mem.push(m_t);
                len.push(l_t);
            }
            t.nsc.push(cov);
            t.nsc_member.push(mem);
            t.nsc_len.push(len);
        }
        t
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
                for b in live.positions(i) {
                    for c in live.positions(k) {
                        diff_into(
                            &mut out,
                            || format!("NbSnakeCovers({i},{b},{k},{c})"),
                            self.nsc[i][s][b * mk + c],
                            fresh.nsc[i][s][b * mk + c],
                        );
                        diff_into(
                            &mut out,
                            || format!("NotSnakeCovered({i},{b},{k}) has {c}"),
                            self.nsc_member[i][s][b * mk + c],
                            fresh.nsc_member[i][s][b * mk + c],
                        );
                    }
                    diff_into(
                        &mut out,
                        || format!("|NotSnakeCovered({i},{b},{k})|"),
                        self.nsc_len[i][s][b],
                        fresh.nsc_len[i][s][b],
                    );
                }
            }
            for a in live.positions(i) {
                for b in live.positions(i) {
                    diff_into(
                        &mut out,
                        || format!("StopVars({i},{a},{b})"),
                        (self.stop_count[i][a * mi + b], self.stop_sum[i][a * mi + b]),
                        (
                            fresh.stop_count[i][a * mi + b],
                            fresh.stop_sum[i][a * mi + b],
                        ),
                    );
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
enum Cond {
    Edge(Var),
    /// `x_i` has no neighbours.
    Free,
}

pub struct ScssCounters<'a> {
    inst: &'a Instance,
    live: Live,
    updates: u64,
    run: Run,
    t: Tables,
    list: VecDeque<(Var, usize, Cond)>,
}

impl<'a> ScssCounters<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let run = Run::start(inst);
        let live = Live::of(inst);
        let mut updates = 0;
        let t = Tables::fresh(inst, &live, &mut updates);
        let mut list = VecDeque::new();
        for i in 0..inst.num_vars() {
            for b in live.positions(i) {
                for (s, &j) in inst.neighbours(i).iter().enumerate() {
                    if t.nsc_len[i][s][b] == 0 {
                        list.push_back((i, b, Cond::Edge(j)));
                    }
                }
                if inst.neighbours(i).is_empty() {
                    list.push_back((i, b, Cond::Free));
                }
            }
        }
        ScssCounters {
            inst,
            live,
            updates,
            run,
            t,
            list,
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

    pub fn stop_vars(&self, i: Var, a: Value, b: Value) -> Result<Vec<Var>> {
        let (pa, pb) = (
            self.inst.require_value(i, a)?,
            self.inst.require_value(i, b)?,
        );
        let mi = self.inst.original_len(i);
        Ok(self
            .inst
            .neighbours(i)
            .iter()
            .enumerate()
            .filter(|&(s, _)| self.t.nb_stops[i][s][pa * mi + pb] > 0)
            .map(|(_, &k)| k)
            .collect())
    }

    pub fn nb_snake_covers(&self, i: Var, b: Value, j: Var, c: Value) -> Result<u32> {
        let s = self.slot(i, j)?;
        let (pb, pc) = (
            self.inst.require_value(i, b)?,
            self.inst.require_value(j, c)?,
        );
        Ok(self.t.nsc[i][s][pb * self.inst.original_len(j) + pc])
    }

    pub fn not_snake_covered(&self, i: Var, b: Value, j: Var) -> Result<Vec<Value>> {
        let s = self.slot(i, j)?;
        let pb = self.inst.require_value(i, b)?;
        let mj = self.inst.original_len(j);
        Ok(self
            .live
            .positions(j)
            .filter(|&c| self.t.nsc_member[i][s][pb * mj + c])
            .map(|c| self.inst.value_at(j, c))
            .collect())
    }

    pub fn violations(&self) -> Vec<String> {
        let mut scratch = 0;
        let fresh = Tables::fresh(self.inst, &self.live, &mut scratch);
        self.t.diff(&fresh, self.inst, &self.live)
    }

    fn inc_nsc(&mut self, i: Var, b: usize, s: usize, j: Var, c: usize) {
        let at = b * self.inst.original_len(j) + c;
        self.t.nsc[i][s][at] += 1;
        self.updates += 1;
        if self.t.nsc_member[i][s][at] {
            self.t.nsc_member[i][s][at] = false;
            self.updates += 1;
            let len = &mut self.t.nsc_len[i][s][b];
            *len -= 1;
            if *len == 0 {
                self.list.push_back((i, b, Cond::Edge(j)));
            }
        }
    }

    fn dec_nsc(&mut self, i: Var, b: usize, s: usize, j: Var, c: usize) {
        let at = b * self.inst.original_len(j) + c;
        let k = &mut self.t.nsc[i][s][at];
        debug_assert!(*k > 0, "NbSnakeCovers underflow at ({i},{b},{j},{c})");
        *k -= 1;
        self.updates += 1;
        if *k == 0 && self.inst.relation(i, j).expect("edge").get(b, c) {
            self.t.nsc_member[i][s][at] = true;
            self.t.nsc_len[i][s][b] += 1;
            self.updates += 1;
        }
    }

    /// Adds or withdraws `a` as a snake cover of `b`, conditioned on `x_j`,
    /// for every `c` that `a` reaches.
    fn shift_covers(&mut self, i: Var, a: usize, b: usize, j: Var, up: bool) {
        let inst = self.inst;
        let s = inst.slot(i, j).expect("edge");
        for c in 0..inst.original_len(j) {
            if self.live.has(j, c) && self.t.reaches(inst, i, a, s, j, c) {
                if up {
                    self.inc_nsc(i, b, s, j, c);
                } else {
                    self.dec_nsc(i, b, s, j, c);
                }
            }
        }
    }

    /// `StopVars(i,a,b)` gained (`up`) or lost `k`; adjust the covers
    /// whose inclusion test changed.
    fn stop_vars_changed(&mut self, i: Var, a: usize, b: usize, k: Var, up: bool) {
        let inst = self.inst;
        let at = a * inst.original_len(i) + b;
        if up {
            let before = self.t.stop_count[i][at];
            let other = self.t.stop_sum[i][at];
            self.t.stop_count[i][at] += 1;
            self.t.stop_sum[i][at] += k;
            self.updates += 1;
            match before {
                0 => {
                    for &j in inst.neighbours(i) {
                        if j != k {
                            self.shift_covers(i, a, b, j, false);
                        }
                    }
                }
                1 => self.shift_covers(i, a, b, other, false),
                _ => {}
            }
        } else {
            self.t.stop_count[i][at] -= 1;
            self.t.stop_sum[i][at] -= k;
            self.updates += 1;
            match self.t.stop_count[i][at] {
                0 => {
                    for &j in inst.neighbours(i) {
                        if j != k {
                            self.shift_covers(i, a, b, j, true);
                        }
                    }
                }
                1 => {
                    let other = self.t.stop_sum[i][at];
                    self.shift_covers(i, a, b, other, true);
                }
                _ => {}
            }
        }
    }

    fn inc_nb_stops(&mut self, i: Var, a: usize, b: usize, s: usize, k: Var) {
        let mi = self.inst.original_len(i);
        let c = &mut self.t.nb_stops[i][s][a * mi + b];
        *c += 1;
        self.updates += 1;
        if *c == 1 {
            self.stop_vars_changed(i, a, b, k, true);
        }
    }

    fn dec_nb_stops(&mut self, i: Var, a: usize, b: usize, s: usize, k: Var) {
        let mi = self.inst.original_len(i);
        let c = &mut self.t.nb_stops[i][s][a * mi + b];
        debug_assert!(*c > 0, "NbStops underflow at ({i},{a},{b},{k})");
        *c -= 1;
        self.updates += 1;
        if *c == 0 {
            self.stop_vars_changed(i, a, b, k, false);
        }
    }

    fn inc_nb_subs(&mut self, i: Var, a: usize, s: usize, k: Var, d: usize) {
        let inst = self.inst;
        let mk = inst.original_len(k);
        let c = &mut self.t.nb_subs[i][s][a * mk + d];
        *c += 1;
        self.updates += 1;
        if *c != 1 {
            return;
        }
        let rel = inst.relation(i, k).expect("edge");
        for b in 0..inst.original_len(i) {
            if self.live.has(i, b) && rel.get(b, d) {
                self.dec_nb_stops(i, a, b, s, k);
            }
        }
        for b in 0..inst.original_len(i) {
            if b != a && self.live.has(i, b) && self.t.stop_within(inst, i, a, b, k) {
                self.inc_nsc(i, b, s, k, d);
            }
        }
    }

    fn dec_nb_subs(&mut self, i: Var, a: usize, s: usize, k: Var, d: usize) {
        let inst = self.inst;
        let mk = inst.original_len(k);
        let c = &mut self.t.nb_subs[i][s][a * mk + d];
        debug_assert!(*c > 0, "NbSubs underflow at ({i},{a},{k},{d})");
        *c -= 1;
        self.updates += 1;
        if *c != 0 {
            return;
        }
        let rel = inst.relation(i, k).expect("edge");
        for b in 0..inst.original_len(i) {
            if self.live.has(i, b) && rel.get(b, d) {
                self.inc_nb_stops(i, a, b, s, k);
            }
        }
        for b in 0..inst.original_len(i) {
            if b != a && self.live.has(i, b) && self.t.stop_within(inst, i, a, b, k) {
                self.dec_nsc(i, b, s, k, d);
            }
        }
    }

    /// `e` became a replacement for `d` in `D(x_k)` as seen from `x_i`.
    fn subs_gained(&mut self, i: Var, k: Var, d: usize, e: usize) {
        let inst = self.inst;
        let s = inst.slot(i, k).expect("edge");
        let rel = inst.relation(i, k).expect("edge");
        for a in 0..inst.original_len(i) {
            if self.live.has(i, a) && !rel.get(a, d) && rel.get(a, e) {
                self.inc_nb_subs(i, a, s, k, d);
            }
        }
    }

    fn propagate(&mut self, r: Var, u: usize) {
        let inst = self.inst;
        let mr = inst.original_len(r);

        // u was blocking (d, e) for neighbours k
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
                            for &i in inst.neighbours(k) {
                                if i != r {
                                    self.subs_gained(i, k, d, e);
                                }
                            }
                        }
                        Some(BlockChange::Singleton(i)) => self.subs_gained(i, k, d, e),
                        None => {}
                    }
                }
            }
        }

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
                    if self.live.has(r, d) && !rel.get(a, d) && self.t.blocks.within(r, d, u, i) {
                        self.dec_nb_subs(i, a, s, r, d);
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
                        self.dec_nb_stops(i, a, b, s, r);
                    }
                }
            }

            // u no longer needs a snake cover
            for b in 0..mi {
                let at = b * mr + u;
                if !self.live.has(i, b) || !self.t.nsc_member[i][s][at] {
                    continue;
                }
                self.t.nsc_member[i][s][at] = false;
                self.updates += 1;
                let len = &mut self.t.nsc_len[i][s][b];
                *len -= 1;
                if *len == 0 {
                    self.list.push_back((i, b, Cond::Edge(r)));
                }
            }
        }

        // u no longer snake-covers its siblings
        for (s, &j) in inst.neighbours(r).iter().enumerate() {
            for c in 0..inst.original_len(j) {
                if !self.live.has(j, c) || !self.t.reaches(inst, r, u, s, j, c) {
                    continue;
                }
                for b in 0..mr {
                    if self.live.has(r, b) && self.t.stop_within(inst, r, u, b, j) {
                        self.dec_nsc(r, b, s, j, c);
                    }
                }
            }
        }
    }

    fn witness(&self, p: Var, u: usize, cond: Cond) -> Witness {
        let inst = self.inst;
        let Cond::Edge(q) = cond else {
            let Some(q) = free_conditioning(inst, p) else {
                return Witness::Scss {
                    conditioning: None,
                    covers: Vec::new(),
                };
            };
            let a = self
                .live
                .positions(p)
                .find(|&a| a != u)
                .expect("two live values");
            let covers = self
                .live
                .positions(q)
                .map(|c| {
                    let g = self
                        .live
                        .positions(q)
                        .find(|&g| self.t.blocks.is_empty(q, c, g))
                        .expect("c replaces itself");
                    SnakeCover {
                        c: inst.value_at(q, c),
                        a: inst.value_at(p, a),
                        g: inst.value_at(q, g),
                        subs: Vec::new(),
                    }
                })
                .collect();
            return Witness::Scss {
                conditioning: Some(q),
                covers,
            };
        };

        let s = inst.slot(p, q).expect("edge");
        let rel = inst.relation(p, q).expect("edge");
        let mut covers = Vec::new();
        for c in self.live.positions(q) {
            if !rel.get(u, c) {
                continue;
            }
            let a = self
                .live
                .positions(p)
                .find(|&a| {
                    a != u
                        && self.t.reaches(inst, p, a, s, q, c)
                        && self.t.stop_within(inst, p, a, u, q)
                })
                .expect("every compatible value is snake covered");
            let g = self
                .live
                .positions(q)
                .find(|&g| rel.get(a, g) && self.t.blocks.within(q, c, g, p))
                .expect("a reaches c");
            let mut subs = Vec::new();
            for &k in inst.neighbours(p) {
                if k == q {
                    continue;
                }
                let rk = inst.relation(p, k).expect("edge");
                for d in self.live.positions(k) {
                    if !rk.get(u, d) || rk.get(a, d) {
                        continue;
                    }
                    let e = self
                        .live
                        .positions(k)
                        .find(|&e| rk.get(a, e) && self.t.blocks.within(k, d, e, p))
                        .expect("no stops outside x_j");
                    subs.push(Sub {
                        variable: k,
                        from: inst.value_at(k, d),
                        to: inst.value_at(k, e),
                    });
                }
            }
            covers.push(SnakeCover {
                c: inst.value_at(q, c),
                a: inst.value_at(p, a),
                g: inst.value_at(q, g),
                subs,
            });
        }
        Witness::Scss {
            conditioning: Some(q),
            covers,
        }
    }

    pub fn run(mut self, opts: &EngineOptions) -> Reduction {
        while let Some((p, u, cond)) = self.list.pop_front() {
            if !self.live.has(p, u) {
                continue;
            }
            let valid = match cond {
                Cond::Edge(q) => {
                    let s = self.inst.slot(p, q).expect("edge");
                    self.t.nsc_len[p][s][u] == 0
                }
                Cond::Free => self.live.len(p) >= 2,
            };
            if !valid {
                continue;
            }
            let w = self.witness(p, u, cond);
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
    fn figure1c_reduces_to_a_solution() {
        let inst = generators::figure1c();
        let r = scss_to_convergence_with(&inst, &EngineOptions::checked());
        assert_eq!(
            r.report.integrity_violations, 0,
            "{:?}",
            r.report.first_violation
        );
        let sol: Vec<Value> = (0..4)
            .map(|i| {
                let d = r.instance.domain(i);
                assert_eq!(d.len(), 1, "x{} = {:?}", i + 1, d);
                d[0]
            })
            .collect();
        assert!(oracle::solve(&inst, None).unwrap().contains(&sol));
    }

    #[test]
    fn witnesses_match_oracle() {
        let inst = generators::figure1c();
        let r = scss_to_convergence_with(&inst, &EngineOptions::default());
        let mut cur = inst.clone();
        for s in &r.trace.steps {
            let Witness::Scss { conditioning, .. } = &s.witness else {
                panic!("unexpected rule");
            };
            let want = oracle::scss_at(&cur, s.variable, s.value, *conditioning).unwrap();
            assert_eq!(want.as_ref(), Some(&s.witness));
            cur = cur.remove_value(s.variable, s.value).unwrap();
        }
    }

    #[test]
    fn check_matches_oracle_on_fixtures() {
        for inst in [
            generators::figure1a(),
            generators::figure1b(),
            generators::figure1c(),
        ] {
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
}
