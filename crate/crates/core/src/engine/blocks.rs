//! NbBlocks and BlockVars.
//!
//! `NbBlocks(k,d,e,l)` counts the values `f` of `x_l` compatible with `d`
//! but not with `e`, so `d` is substitutable by `e` at `l` iff it is zero.
//! `BlockVars(k,d,e)` is the set of neighbours `l` with a non-zero count.
//! The set is kept as its size and the sum of its members, which is all
//! that is needed to test emptiness and inclusion in a singleton.

use super::{diff_into, Live};
use crate::instance::{Instance, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum BlockChange {
    /// The last blocking neighbour left.
    Emptied,
    /// One blocking neighbour remains.
    Singleton(Var),
}

pub(crate) struct Blocks {
    m: Vec<usize>,
    // [k][slot of l][d * m_k + e]
    nb: Vec<Vec<Vec<u32>>>,
    count: Vec<Vec<u32>>,
    sum: Vec<Vec<usize>>,
}

impl Blocks {
    pub(crate) fn new(inst: &Instance, live: &Live, updates: &mut u64) -> Blocks {
        let n = inst.num_vars();
        let mut nb = Vec::with_capacity(n);
        let mut count = Vec::with_capacity(n);
        let mut sum = Vec::with_capacity(n);
        for k in 0..n {
            let mk = inst.original_len(k);
            let mut cnt = vec![0u32; mk * mk];
            let mut sm = vec![0usize; mk * mk];
            let mut per = Vec::with_capacity(inst.neighbours(k).len());
            for &l in inst.neighbours(k) {
                let rel = inst.relation(k, l).expect("edge has a relation");
                let mut t = vec![0u32; mk * mk];
                for d in live.positions(k) {
                    for e in live.positions(k) {
                        let mut c = 0;
                        for f in live.positions(l) {
                            if rel.get(d, f) && !rel.get(e, f) {
                                c += 1;
                            }
                        }
                        t[d * mk + e] = c;
                        *updates += c as u64;
                        if c > 0 {
                            cnt[d * mk + e] += 1;
                            sm[d * mk + e] += l;
                            *updates += 1;
                        }
                    }
                }
                per.push(t);
            }
            nb.push(per);
            count.push(cnt);
            sum.push(sm);
        }
        let m = (0..n).map(|k| inst.original_len(k)).collect();
        Blocks { m, nb, count, sum }
    }

    #[inline]
    pub(crate) fn is_empty(&self, k: Var, d: usize, e: usize) -> bool {
        self.count[k][d * self.m[k] + e] == 0
    }

    /// `BlockVars(k,d,e)` is empty or equal to `{i}`.
    #[inline]
    pub(crate) fn within(&self, k: Var, d: usize, e: usize, i: Var) -> bool {
        let at = d * self.m[k] + e;
        match self.count[k][at] {
            0 => true,
            1 => self.sum[k][at] == i,
            _ => false,
        }
    }

    pub(crate) fn members(&self, inst: &Instance, k: Var, d: usize, e: usize) -> Vec<Var> {
        let at = d * self.m[k] + e;
        inst.neighbours(k)
            .iter()
            .enumerate()
            .filter(|&(s, _)| self.nb[k][s][at] > 0)
            .map(|(_, &l)| l)
            .collect()
    }

    /// One fewer blocking value of `x_l` for `(d, e)` in `x_k`, where `l`
    /// sits at `slot` in the neighbour list of `k`.
    #[inline]
    pub(crate) fn decrement(
        &mut self,
        k: Var,
        slot: usize,
        l: Var,
        d: usize,
        e: usize,
        updates: &mut u64,
    ) -> Option<BlockChange> {
        let at = d * self.m[k] + e;
        let c = &mut self.nb[k][slot][at];
        debug_assert!(*c > 0, "NbBlocks underflow at ({k},{d},{e},{l})");
        *c -= 1;
        *updates += 1;
        if *c > 0 {
            return None;
        }
        self.count[k][at] -= 1;
        self.sum[k][at] -= l;
        *updates += 1;
        match self.count[k][at] {
            0 => Some(BlockChange::Emptied),
            1 => Some(BlockChange::Singleton(self.sum[k][at])),
            _ => None,
        }
    }

    pub(crate) fn diff(&self, fresh: &Blocks, inst: &Instance, live: &Live, out: &mut Vec<String>) {
        for k in 0..inst.num_vars() {
            let mk = self.m[k];
            for d in live.positions(k) {
                for e in live.positions(k) {
                    let at = d * mk + e;
                    for (s, &l) in inst.neighbours(k).iter().enumerate() {
                        diff_into(
                            out,
                            || format!("NbBlocks({k},{d},{e},{l})"),
                            self.nb[k][s][at],
                            fresh.nb[k][s][at],
                        );
                    }
                    diff_into(
                        out,
                        || format!("BlockVars({k},{d},{e})"),
                        (self.count[k][at], self.sum[k][at]),
                        (fresh.count[k][at], fresh.sum[k][at]),
                    );
                }
            }
        }
    }

    pub(crate) fn nb_blocks(&self, inst: &Instance, k: Var, d: usize, e: usize, l: Var) -> u32 {
        let s = inst.slot(k, l).expect("l is a neighbour of k");
        self.nb[k][s][d * self.m[k] + e]
    }
}
