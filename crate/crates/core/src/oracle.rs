//! Brute-force reference implementations.
//!
//! Everything here evaluates the definitions directly on the current
//! domains and is meant for small instances and for checking the engines.
//! Witnesses follow the same tie-breaks as the engines: smallest
//! replacement value, then smallest conditioning variable, then smallest
//! `e` or `g`.
//!
//! Conditioning variables range over the edge neighbours of `x_i`. When
//! `x_i` has none, the smallest other variable is used, and with a single
//! variable the condition degenerates to the unconditioned one
//! (`conditioning: None`).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, Value, Var};
use crate::trace::{Cover, Rule, SnakeCover, Sub, Witness};

pub const DEFAULT_NODE_CAP: u64 = 100_000_000;

pub type Solution = Vec<Value>;

/// All solutions, in lexicographic order, up to `limit` of them.
pub fn solve(inst: &Instance, limit: Option<usize>) -> Result<Vec<Solution>> {
    solve_capped(inst, limit, DEFAULT_NODE_CAP)
}

pub fn solve_capped(inst: &Instance, limit: Option<usize>, cap: u64) -> Result<Vec<Solution>> {
    let n = inst.num_vars();
    let mut out = Vec::new();
    if limit == Some(0) || inst.is_wiped_out() {
        return Ok(out);
    }
    let doms: Vec<Vec<usize>> = (0..n).map(|i| inst.live_positions(i).collect()).collect();
    let mut assign = vec![0usize; n];
    let mut nodes = 0u64;
    let limit = limit.unwrap_or(usize::MAX);

    // explicit stack of next candidate index per depth
    let mut next = vec![0usize; n + 1];
    let mut depth = 0;
    if n == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    loop {
        if next[depth] == doms[depth].len() {
            if depth == 0 {
                break;
            }
            depth -= 1;
            continue;
        }
        let p = doms[depth][next[depth]];
        next[depth] += 1;
        nodes += 1;
        if nodes > cap {
            return Err(Error::SearchCap(cap));
        }
        if !(0..depth).all(|k| inst.allows_pos(k, assign[k], depth, p)) {
            continue;
        }
        assign[depth] = p;
        if depth + 1 == n {
            out.push((0..n).map(|k| inst.value_at(k, assign[k])).collect());
            if out.len() >= limit {
                break;
            }
        } else {
            depth += 1;
            next[depth] = 0;
        }
    }
    Ok(out)
}

pub fn is_satisfiable(inst: &Instance) -> Result<bool> {
    Ok(!solve(inst, Some(1))?.is_empty())
}

/// Removing `b` from `D(x_i)` keeps a satisfiable instance satisfiable.
pub fn preserves_satisfiability(inst: &Instance, i: Var, b: Value) -> Result<bool> {
    let after = inst.remove_value(i, b)?;
    Ok(!is_satisfiable(inst)? || is_satisfiable(&after)?)
}

/// Smallest edge neighbour of `x_i` in which `b` has no support.
pub fn unsupported_at(inst: &Instance, i: Var, b: Value) -> Result<Option<Var>> {
    let pb = live(inst, i, b)?;
    Ok(unsupported_at_pos(inst, i, pb))
}

pub(crate) fn unsupported_at_pos(inst: &Instance, i: Var, b: usize) -> Option<Var> {
    inst.neighbours(i)
        .iter()
        .copied()
        .find(|&j| !inst.live_positions(j).any(|c| inst.allows_pos(i, b, j, c)))
}

fn live(inst: &Instance, i: Var, v: Value) -> Result<usize> {
    let p = inst.require_value(i, v)?;
    if inst.is_live(i, p) {
        Ok(p)
    } else {
        Err(Error::ValueAbsent { var: i, value: v })
    }
}

fn others(inst: &Instance, skip: &[Var]) -> impl Iterator<Item = Var> {
    let skip = skip.to_vec();
    (0..inst.num_vars()).filter(move |k| !skip.contains(k))
}

fn ns_holds(inst: &Instance, i: Var, b: usize, a: usize) -> bool {
    a != b && others(inst, &[i]).all(|j| inst.arrow_pos(i, j, b, a))
}

fn ss_subs(inst: &Instance, i: Var, b: usize, a: usize, skip: Option<Var>) -> Option<Vec<Sub>> {
    if a == b {
        return None;
    }
    let mut subs = Vec::new();
    for k in others(inst, &[i]) {
        if Some(k) == skip {
            continue;
        }
        for (d, e) in inst.snake_arrow_pos(i, k, b, a)? {
            if !inst.allows_pos(i, a, k, d) {
                subs.push(Sub {
                    variable: k,
                    from: inst.value_at(k, d),
                    to: inst.value_at(k, e),
                });
            }
        }
    }
    Some(subs)
}

pub fn ns_by(inst: &Instance, i: Var, b: Value, a: Value) -> Result<bool> {
    let (pb, pa) = (live(inst, i, b)?, live(inst, i, a)?);
    Ok(ns_holds(inst, i, pb, pa))
}

pub fn is_ns(inst: &Instance, i: Var, b: Value) -> Result<Option<Witness>> {
    let pb = live(inst, i, b)?;
    Ok(inst
        .live_positions(i)
        .find(|&a| ns_holds(inst, i, pb, a))
        .map(|a| Witness::Ns {
            by: inst.value_at(i, a),
        }))
}

pub fn ss_by(inst: &Instance, i: Var, b: Value, a: Value) -> Result<Option<Vec<Sub>>> {
    let (pb, pa) = (live(inst, i, b)?, live(inst, i, a)?);
    Ok(ss_subs(inst, i, pb, pa, None))
}

pub fn is_ss(inst: &Instance, i: Var, b: Value) -> Result<Option<Witness>> {
    let pb = live(inst, i, b)?;
    for a in inst.live_positions(i) {
        if let Some(subs) = ss_subs(inst, i, pb, a, None) {
            return Ok(Some(Witness::Ss {
                by: inst.value_at(i, a),
                subs,
            }));
        }
    }
    Ok(None)
}

/// Conditioning variables tried for values of `x_i`, in order.
pub fn conditioning_candidates(inst: &Instance, i: Var) -> Vec<Option<Var>> {
    if !inst.neighbours(i).is_empty() {
        return inst.neighbours(i).iter().map(|&j| Some(j)).collect();
    }
    match others(inst, &[i]).next() {
        Some(j) => vec![Some(j)],
        None => vec![None],
    }
}

/// Conditioned neighbourhood substitutability with a fixed conditioning
/// variable.
pub fn cns_at(inst: &Instance, i: Var, b: Value, j: Option<Var>) -> Result<Option<Witness>> {
    let pb = live(inst, i, b)?;
    let Some(j) = j else {
        let ok = inst.live_positions(i).any(|a| ns_holds(inst, i, pb, a));
        return Ok(ok.then_some(Witness::Cns {
            conditioning: None,
            covers: Vec::new(),
        }));
    };
    inst.require_var(j)?;
    if j == i {
        return Err(Error::SameVariable(i));
    }
    let cands: Vec<usize> = inst
        .live_positions(i)
        .filter(|&a| a != pb && others(inst, &[i, j]).all(|k| inst.arrow_pos(i, k, pb, a)))
        .collect();
    let mut covers = Vec::new();
    for c in inst.live_positions(j) {
        if !inst.allows_pos(i, pb, j, c) {
            continue;
        }
        match cands.iter().find(|&&a| inst.allows_pos(i, a, j, c)) {
            Some(&a) => covers.push(Cover {
                c: inst.value_at(j, c),
                a: inst.value_at(i, a),
            }),
            None => return Ok(None),
        }
    }
    Ok(Some(Witness::Cns {
        conditioning: Some(j),
        covers,
    }))
}

pub fn is_cns(inst: &Instance, i: Var, b: Value) -> Result<Option<Witness>> {
    live(inst, i, b)?;
    for j in conditioning_candidates(inst, i) {
        if let Some(w) = cns_at(inst, i, b, j)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Snake-conditioned snake substitutability with a fixed conditioning
/// variable.
pub fn scss_at(inst: &Instance, i: Var, b: Value, j: Option<Var>) -> Result<Option<Witness>> {
    let pb = live(inst, i, b)?;
    let Some(j) = j else {
        let ok = inst
            .live_positions(i)
            .any(|a| ss_subs(inst, i, pb, a, None).is_some());
        return Ok(ok.then_some(Witness::Scss {
            conditioning: None,
            covers: Vec::new(),
        }));
    };
    inst.require_var(j)?;
    if j == i {
        return Err(Error::SameVariable(i));
    }
    let cands: Vec<(usize, Vec<Sub>)> = inst
        .live_positions(i)
        .filter_map(|a| ss_subs(inst, i, pb, a, Some(j)).map(|s| (a, s)))
        .collect();
    let mut covers = Vec::new();
    for c in inst.live_positions(j) {
        if !inst.allows_pos(i, pb, j, c) {
            continue;
        }
        let found = cands.iter().find_map(|(a, subs)| {
            inst.live_positions(j)
                .find(|&g| {
                    inst.allows_pos(i, *a, j, g)
                        && others(inst, &[i, j]).all(|m| inst.arrow_pos(j, m, c, g))
                })
                .map(|g| SnakeCover {
                    c: inst.value_at(j, c),
                    a: inst.value_at(i, *a),
                    g: inst.value_at(j, g),
                    subs: subs.clone(),
                })
        });
        match found {
            Some(sc) => covers.push(sc),
            None => return Ok(None),
        }
    }
    Ok(Some(Witness::Scss {
        conditioning: Some(j),
        covers,
    }))
}

pub fn is_scss(inst: &Instance, i: Var, b: Value) -> Result<Option<Witness>> {
    live(inst, i, b)?;
    for j in conditioning_candidates(inst, i) {
        if let Some(w) = scss_at(inst, i, b, j)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Every conditioning variable under which `b` is snake-conditioned
/// snake substitutable.
pub fn scss_conditions(inst: &Instance, i: Var, b: Value) -> Result<Vec<Option<Var>>> {
    let mut out = Vec::new();
    for j in conditioning_candidates(inst, i) {
        if scss_at(inst, i, b, j)?.is_some() {
            out.push(j);
        }
    }
    Ok(out)
}

/// Checks a single claimed elimination against the definition of `rule`.
/// A `by` value or a conditioning variable, when given, is checked as
/// stated instead of searched for.
pub fn certify(
    inst: &Instance,
    i: Var,
    b: Value,
    rule: Rule,
    by: Option<Value>,
    conditioning: Option<Option<Var>>,
) -> Result<bool> {
    live(inst, i, b)?;
    Ok(match rule {
        Rule::Ac => unsupported_at(inst, i, b)?.is_some(),
        Rule::Ns => match by {
            Some(a) => ns_by(inst, i, b, a)?,
            None => is_ns(inst, i, b)?.is_some(),
        },
        Rule::Ss => match by {
            Some(a) => ss_by(inst, i, b, a)?.is_some(),
            None => is_ss(inst, i, b)?.is_some(),
        },
        Rule::Cns => match conditioning {
            Some(j) => cns_at(inst, i, b, j)?.is_some(),
            None => is_cns(inst, i, b)?.is_some(),
        },
        Rule::Scss => match conditioning {
            Some(j) => scss_at(inst, i, b, j)?.is_some(),
            None => is_scss(inst, i, b)?.is_some(),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceRule {
    Ns,
    Ss,
    Cns,
    Scss,
    /// CNS moves are only allowed while no NS move exists.
    CnsWithNsPriority,
}

#[derive(Clone, Debug)]
pub struct SearchLimits {
    pub node_cap: u64,
    /// Only count and explore eliminations from this variable.
    pub only_variable: Option<Var>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_cap: 1_000_000,
            only_variable: None,
        }
    }
}

/// Length of the longest sequence of eliminations allowed by `rule`,
/// found by exhaustive search over orders.
pub fn longest_elimination_sequence(inst: &Instance, rule: SequenceRule) -> Result<usize> {
    longest_elimination_sequence_with(inst, rule, &SearchLimits::default())
}

pub fn longest_elimination_sequence_with(
    inst: &Instance,
    rule: SequenceRule,
    limits: &SearchLimits,
) -> Result<usize> {
    let mut search = Longest {
        rule,
        limits,
        memo: HashMap::new(),
        nodes: 0,
    };
    search.run(inst)
}

struct Longest<'a> {
    rule: SequenceRule,
    limits: &'a SearchLimits,
    memo: HashMap<Vec<bool>, usize>,
    nodes: u64,
}

impl Longest<'_> {
    fn key(inst: &Instance) -> Vec<bool> {
        (0..inst.num_vars())
            .flat_map(|i| inst.live_mask(i).iter().copied())
            .collect()
    }

    fn moves(&self, inst: &Instance, rule: Rule) -> Result<Vec<(Var, Value)>> {
        let vars: Vec<Var> = match self.limits.only_variable {
            Some(i) => vec![i],
            None => (0..inst.num_vars()).collect(),
        };
        let mut out = Vec::new();
        for i in vars {
            for b in inst.domain(i) {
                if certify(inst, i, b, rule, None, None)? {
                    out.push((i, b));
                }
            }
        }
        Ok(out)
    }

    fn run(&mut self, inst: &Instance) -> Result<usize> {
        let key = Self::key(inst);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.nodes += 1;
        if self.nodes > self.limits.node_cap {
            return Err(Error::SearchCap(self.limits.node_cap));
        }
        let moves = match self.rule {
            SequenceRule::Ns => self.moves(inst, Rule::Ns)?,
            SequenceRule::Ss => self.moves(inst, Rule::Ss)?,
            SequenceRule::Cns => self.moves(inst, Rule::Cns)?,
            SequenceRule::Scss => self.moves(inst, Rule::Scss)?,
            SequenceRule::CnsWithNsPriority => {
                let ns = self.moves(inst, Rule::Ns)?;
                if ns.is_empty() {
                    self.moves(inst, Rule::Cns)?
                } else {
                    ns
                }
            }
        };
        let mut best = 0;
        for (i, b) in moves {
            best = best.max(1 + self.run(&inst.remove_value(i, b)?)?);
        }
        self.memo.insert(key, best);
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn figure1a_solutions() {
        let sols = solve(&generators::figure1a(), None).unwrap();
        assert_eq!(
            sols,
            vec![vec![0, 0, 1, 1], vec![1, 1, 0, 0], vec![1, 1, 1, 1]]
        );
    }

    #[test]
    fn figure1b_has_nine_solutions() {
        assert_eq!(solve(&generators::figure1b(), None).unwrap().len(), 9);
    }

    #[test]
    fn solve_respects_limit_and_cap() {
        let inst = generators::figure1b();
        assert_eq!(solve(&inst, Some(2)).unwrap().len(), 2);
        assert!(matches!(
            solve_capped(&inst, None, 3),
            Err(Error::SearchCap(3))
        ));
    }

    #[test]
    fn figure1a_substitutions() {
        let inst = generators::figure1a();
        for i in 0..4 {
            assert_eq!(is_ns(&inst, i, 0).unwrap(), None);
            assert_eq!(is_ns(&inst, i, 1).unwrap(), None);
        }
        let w = is_ss(&inst, 0, 0).unwrap().unwrap();
        assert_eq!(
            w,
            Witness::Ss {
                by: 1,
                subs: vec![Sub {
                    variable: 1,
                    from: 0,
                    to: 1
                }]
            }
        );
        assert_eq!(inst.snake_arrow(0, 1, 0, 1).unwrap(), Some(vec![(0, 1)]));
    }

    #[test]
    fn figure1b_cns_witness() {
        let inst = generators::figure1b();
        // x2 = 0 is conditioned on x1; c = 0 is incompatible with b = 0
        let w = is_cns(&inst, 1, 0).unwrap().unwrap();
        assert_eq!(
            w,
            Witness::Cns {
                conditioning: Some(0),
                covers: vec![Cover { c: 1, a: 2 }, Cover { c: 2, a: 1 }],
            }
        );
        assert!(is_cns(&inst, 2, 2).unwrap().is_some());
        assert!(is_ss(&inst, 1, 0).unwrap().is_none());
    }

    #[test]
    fn figure1c_scss_on_x2() {
        let inst = generators::figure1c();
        let w = is_scss(&inst, 0, 3).unwrap().unwrap();
        match w {
            Witness::Scss { conditioning, .. } => assert_eq!(conditioning, Some(1)),
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(is_ss(&inst, 0, 3).unwrap().is_none());
        assert!(is_cns(&inst, 0, 3).unwrap().is_none());
    }

    #[test]
    fn preserves_satisfiability_on_unsat_is_true() {
        let mut b = crate::instance::InstanceBuilder::new("u");
        b.variable("x", vec![0]);
        b.variable("y", vec![0]);
        b.allowed(0, 1, vec![]);
        let inst = b.build().unwrap();
        assert!(preserves_satisfiability(&inst, 0, 0).unwrap());
    }

    #[test]
    fn single_variable_degenerates() {
        let mut b = crate::instance::InstanceBuilder::new("one");
        b.variable("x", vec![0, 1, 2]);
        let inst = b.build().unwrap();
        assert_eq!(conditioning_candidates(&inst, 0), vec![None]);
        assert!(is_cns(&inst, 0, 1).unwrap().is_some());
        assert!(is_scss(&inst, 0, 1).unwrap().is_some());
        let single = inst.remove_value(0, 0).unwrap().remove_value(0, 1).unwrap();
        assert!(is_scss(&single, 0, 2).unwrap().is_none());
    }

    #[test]
    fn cns_versus_ns_sequences() {
        let inst = generators::two_var_cns_vs_ns(4).unwrap();
        assert_eq!(
            longest_elimination_sequence(&inst, SequenceRule::CnsWithNsPriority).unwrap(),
            5
        );
        assert_eq!(
            longest_elimination_sequence(&inst, SequenceRule::Ns).unwrap(),
            5
        );
    }

    #[test]
    fn setcover_example() {
        let inst =
            generators::set_cover_instance(&[1, 2, 3], &[vec![1, 2], vec![2, 3], vec![1, 3]])
                .unwrap();
        let limits = SearchLimits {
            only_variable: Some(0),
            ..SearchLimits::default()
        };
        assert_eq!(
            longest_elimination_sequence_with(&inst, SequenceRule::Cns, &limits).unwrap(),
            1
        );
    }
}
