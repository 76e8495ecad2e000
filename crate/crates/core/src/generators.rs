//! Fixture instances and seeded random instances.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceBuilder, Value, Var};

fn named(b: &mut InstanceBuilder, n: usize, domain: &[Value]) -> Vec<Var> {
    (1..=n)
        .map(|k| b.variable(format!("x{k}"), domain.to_vec()))
        .collect()
}

/// Boolean instance: x1 = x2, x3 = x4, x2 or x3, x1 or x4.
pub fn figure1a() -> Instance {
    let mut b = InstanceBuilder::new("figure1a");
    let x = named(&mut b, 4, &[0, 1]);
    b.predicate(x[0], x[1], |p, q| p == q);
    b.predicate(x[2], x[3], |p, q| p == q);
    b.predicate(x[1], x[2], |p, q| p == 1 || q == 1);
    b.predicate(x[0], x[3], |p, q| p == 1 || q == 1);
    b.build().expect("fixture is valid")
}

/// Over {0,1,2}: x1 != x2, x1 != x3, x2 >= x3.
pub fn figure1b() -> Instance {
    let mut b = InstanceBuilder::new("figure1b");
    let x = named(&mut b, 3, &[0, 1, 2]);
    b.predicate(x[0], x[1], |p, q| p != q);
    b.predicate(x[0], x[2], |p, q| p != q);
    b.predicate(x[1], x[2], |p, q| p >= q);
    b.build().expect("fixture is valid")
}

/// Over {0,1,2,3}: x1 differs from x2, x3, x4; x2 <= x3, x2 >= x4, x4 <= x3.
pub fn figure1c() -> Instance {
    let mut b = InstanceBuilder::new("figure1c");
    let x = named(&mut b, 4, &[0, 1, 2, 3]);
    b.predicate(x[0], x[1], |p, q| p != q);
    b.predicate(x[0], x[2], |p, q| p != q);
    b.predicate(x[0], x[3], |p, q| p != q);
    b.predicate(x[1], x[2], |p, q| p <= q);
    b.predicate(x[1], x[3], |p, q| p >= q);
    b.predicate(x[2], x[3], |p, q| p >= q);
    b.build().expect("fixture is valid")
}

/// D(x1) = {1..d-1}, D(x2) = {0..d-1}, constraint (x1 = x2) or (x2 = 0).
pub fn two_var_cns_vs_ns(d: u32) -> Result<Instance> {
    if d < 2 {
        return Err(Error::Invalid("two_var_cns_vs_ns needs d >= 2".into()));
    }
    let mut b = InstanceBuilder::new(format!("cnsvsns-d{d}"));
    let x1 = b.variable("x1", (1..d).collect());
    let x2 = b.variable("x2", (0..d).collect());
    b.predicate(x1, x2, |p, q| p == q || q == 0);
    b.build()
}

/// Set cover as value elimination. `D(x1)` indexes the sets, `D(x2)`,
/// `D(x3)`, `D(x4)` hold the universe renumbered 1..|U| in sorted order.
/// `x1 = i` is compatible with `x2 = u` iff `u` belongs to set `i`; the
/// three copies of the universe are tied by an equality triangle.
pub fn set_cover_instance(universe: &[Value], sets: &[Vec<Value>]) -> Result<Instance> {
    let u: BTreeSet<Value> = universe.iter().copied().collect();
    if u.is_empty() || sets.is_empty() {
        return Err(Error::Invalid(
            "set cover needs a non-empty universe and at least one set".into(),
        ));
    }
    let rank = |v: Value| u.iter().position(|&w| w == v).map(|p| p as Value + 1);
    let mut ranked: Vec<BTreeSet<Value>> = Vec::with_capacity(sets.len());
    for s in sets {
        let mut r = BTreeSet::new();
        for &v in s {
            r.insert(
                rank(v)
                    .ok_or_else(|| Error::Invalid(format!("element {v} is not in the universe")))?,
            );
        }
        ranked.push(r);
    }
    let covered: BTreeSet<Value> = ranked.iter().flatten().copied().collect();
    if covered.len() != u.len() {
        return Err(Error::Invalid("the sets do not cover the universe".into()));
    }

    let size = u.len() as Value;
    let mut b = InstanceBuilder::new(format!("setcover-u{}-m{}", u.len(), sets.len()));
    let x1 = b.variable("x1", (1..=sets.len() as Value).collect());
    let x2 = b.variable("x2", (1..=size).collect());
    let x3 = b.variable("x3", (1..=size).collect());
    let x4 = b.variable("x4", (1..=size).collect());
    b.predicate(x1, x2, |i, e| ranked[i as usize - 1].contains(&e));
    b.predicate(x2, x3, |p, q| p == q);
    b.predicate(x3, x4, |p, q| p == q);
    b.predicate(x2, x4, |p, q| p == q);
    b.build()
}

/// x1 >= x2 >= ... >= x_len over {1,2,3}.
pub fn geq_chain(len: usize) -> Result<Instance> {
    if len == 0 {
        return Err(Error::Invalid("geq_chain needs len >= 1".into()));
    }
    let mut b = InstanceBuilder::new(format!("geqchain-{len}"));
    let x = named(&mut b, len, &[1, 2, 3]);
    for w in x.windows(2) {
        b.predicate(w[0], w[1], |p, q| p >= q);
    }
    b.build()
}

/// `geq_chain` whose two ends are held in place. Each end gets a triangle
/// of equal variables p = q = r over {1,2,3}, attached by `p >= x1` at
/// the head and `x_len >= p` at the tail. Without them the free ends are
/// neighbourhood substitutable and the whole chain collapses.
///
/// The chain variables come first (`x1..x_len`, ids `0..len`).
pub fn anchored_geq_chain(len: usize) -> Result<Instance> {
    if len == 0 {
        return Err(Error::Invalid("anchored_geq_chain needs len >= 1".into()));
    }
    let mut b = InstanceBuilder::new(format!("anchored-geqchain-{len}"));
    let x = named(&mut b, len, &[1, 2, 3]);
    for w in x.windows(2) {
        b.predicate(w[0], w[1], |p, q| p >= q);
    }
    let mut triangle = |tag: &str| {
        let t: Vec<Var> = ["p", "q", "r"]
            .iter()
            .map(|s| b.variable(format!("{tag}{s}"), vec![1, 2, 3]))
            .collect();
        b.predicate(t[0], t[1], |p, q| p == q);
        b.predicate(t[1], t[2], |p, q| p == q);
        b.predicate(t[0], t[2], |p, q| p == q);
        t[0]
    };
    let head = triangle("head_");
    let tail = triangle("tail_");
    b.predicate(x[0], head, |v, p| p >= v);
    b.predicate(x[len - 1], tail, |v, p| v >= p);
    b.build()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomParams {
    pub n: usize,
    pub d: usize,
    /// Fraction of variable pairs that carry a constraint.
    pub density: f64,
    /// Fraction of value pairs a constraint allows.
    pub tightness: f64,
    pub seed: u64,
}

/// Uniform random instance with exact counts: `round(density * n(n-1)/2)`
/// constrained pairs, each allowing `round(tightness * d^2)` value pairs.
/// Every domain is `{0..d-1}`.
pub fn random_instance(p: &RandomParams) -> Result<Instance> {
    if p.n == 0 || p.d == 0 {
        return Err(Error::Invalid(
            "random instances need n >= 1 and d >= 1".into(),
        ));
    }
    for (what, x) in [("density", p.density), ("tightness", p.tightness)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Invalid(format!(
                "{what} must lie in [0, 1], got {x}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut b = InstanceBuilder::new(format!(
        "random-n{}-d{}-p{}-t{}-s{}",
        p.n, p.d, p.density, p.tightness, p.seed
    ));
    let domain: Vec<Value> = (0..p.d as Value).collect();
    named(&mut b, p.n, &domain);

    let mut pairs: Vec<(Var, Var)> = (0..p.n)
        .flat_map(|i| (i + 1..p.n).map(move |j| (i, j)))
        .collect();
    let m = (p.density * pairs.len() as f64).round() as usize;
    pairs.shuffle(&mut rng);
    pairs.truncate(m);
    pairs.sort_unstable();

    let mut tuples: Vec<(Value, Value)> = domain
        .iter()
        .flat_map(|&a| domain.iter().map(move |&c| (a, c)))
        .collect();
    let t = (p.tightness * tuples.len() as f64).round() as usize;
    for (i, j) in pairs {
        tuples.shuffle(&mut rng);
        let mut allowed = tuples[..t].to_vec();
        allowed.sort_unstable();
        b.allowed(i, j, allowed);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{instance_to_json, parse_instance};

    #[test]
    fn fixtures_have_expected_shape() {
        assert_eq!(figure1a().edge_count(), 4);
        assert_eq!(figure1b().edge_count(), 3);
        assert_eq!(figure1c().edge_count(), 6);
        let g = geq_chain(5).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(geq_chain(1).unwrap().num_vars(), 1);
        let a = anchored_geq_chain(5).unwrap();
        assert_eq!(a.num_vars(), 11);
        assert_eq!(a.edge_count(), 4 + 6 + 2);
    }

    #[test]
    fn cns_vs_ns_domains() {
        let inst = two_var_cns_vs_ns(4).unwrap();
        assert_eq!(inst.domain(0), vec![1, 2, 3]);
        assert_eq!(inst.domain(1), vec![0, 1, 2, 3]);
        assert!(inst.allows(0, 3, 1, 0).unwrap());
        assert!(!inst.allows(0, 3, 1, 2).unwrap());
        assert!(two_var_cns_vs_ns(1).is_err());
    }

    #[test]
    fn set_cover_canonicalises_universe() {
        let inst = set_cover_instance(&[10, 20, 30], &[vec![10, 20], vec![30]]).unwrap();
        assert_eq!(inst.domain(0), vec![1, 2]);
        assert_eq!(inst.domain(1), vec![1, 2, 3]);
        assert!(inst.allows(0, 2, 1, 3).unwrap());
        assert!(!inst.allows(0, 2, 1, 1).unwrap());
        assert!(set_cover_instance(&[1, 2], &[vec![1]]).is_err());
        assert!(set_cover_instance(&[1, 2], &[vec![1, 5]]).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        let p = RandomParams {
            n: 8,
            d: 4,
            density: 0.5,
            tightness: 0.6,
            seed: 7,
        };
        let a = random_instance(&p).unwrap();
        let b = random_instance(&p).unwrap();
        assert_eq!(instance_to_json(&a), instance_to_json(&b));
        assert_eq!(a.stored_pairs().len(), 14);
        assert_eq!(parse_instance(&instance_to_json(&a)).unwrap(), a);
        let c = random_instance(&RandomParams { seed: 8, ..p }).unwrap();
        assert_ne!(instance_to_json(&a), instance_to_json(&c));
    }

    #[test]
    fn random_extremes() {
        let full = random_instance(&RandomParams {
            n: 5,
            d: 3,
            density: 1.0,
            tightness: 1.0,
            seed: 1,
        })
        .unwrap();
        assert_eq!(full.stored_pairs().len(), 10);
        assert_eq!(full.edge_count(), 0);
        let empty = random_instance(&RandomParams {
            n: 3,
            d: 3,
            density: 1.0,
            tightness: 0.0,
            seed: 1,
        })
        .unwrap();
        assert!(!empty.allows(0, 0, 1, 0).unwrap());
        assert!(random_instance(&RandomParams {
            n: 3,
            d: 3,
            density: 1.5,
            tightness: 0.5,
            seed: 1
        })
        .is_err());
    }
}
