//! Binary CSP instances with shrinking domains.
//!
//! Values are stored by position in each variable's original domain. The
//! public operations take values; the `*_pos` variants take positions and
//! are what the engines and the oracle use in their inner loops.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Var = usize;
pub type Value = u32;

/// Dense boolean matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, on: bool) {
        self.bits[r * self.cols + c] = on;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Relations {
    n: usize,
    // oriented: index i * n + j holds the matrix with rows over D(x_i)
    oriented: Vec<Option<Arc<BitMatrix>>>,
    // pairs i < j carrying a stored constraint, trivial or not
    stored: Vec<(Var, Var)>,
    // non-trivial pairs on the original domains
    edges: Vec<(Var, Var)>,
    neighbours: Vec<Vec<Var>>,
    // slot[i * n + j] = position of j in neighbours[i]
    slot: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Domain {
    live: Vec<bool>,
    len: usize,
}

/// A binary CSP. Cloning is cheap: everything except the current domains
/// is shared, and domains are copied on write.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    name: String,
    names: Arc<Vec<String>>,
    values: Arc<Vec<Vec<Value>>>,
    relations: Arc<Relations>,
    domains: Vec<Arc<Domain>>,
}

impl Instance {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn var_name(&self, i: Var) -> &str {
        &self.names[i]
    }

    /// The domain the instance was loaded with.
    pub fn original_values(&self, i: Var) -> &[Value] {
        &self.values[i]
    }

    pub fn original_len(&self, i: Var) -> usize {
        self.values[i].len()
    }

    pub fn domain(&self, i: Var) -> Vec<Value> {
        self.live_positions(i).map(|p| self.values[i][p]).collect()
    }

    pub fn domain_len(&self, i: Var) -> usize {
        self.domains[i].len
    }

    pub fn domain_sizes(&self) -> Vec<usize> {
        self.domains.iter().map(|d| d.len).collect()
    }

    pub fn total_size(&self) -> usize {
        self.domains.iter().map(|d| d.len).sum()
    }

    /// Largest current domain size.
    pub fn max_domain_size(&self) -> usize {
        self.domains.iter().map(|d| d.len).max().unwrap_or(0)
    }

    pub fn position(&self, i: Var, v: Value) -> Option<usize> {
        self.values.get(i)?.binary_search(&v).ok()
    }

    #[inline]
    pub fn value_at(&self, i: Var, p: usize) -> Value {
        self.values[i][p]
    }

    #[inline]
    pub fn is_live(&self, i: Var, p: usize) -> bool {
        self.domains[i].live[p]
    }

    pub fn contains(&self, i: Var, v: Value) -> bool {
        self.position(i, v).is_some_and(|p| self.is_live(i, p))
    }

    pub fn live_positions(&self, i: Var) -> impl Iterator<Item = usize> + '_ {
        let d = &self.domains[i];
        (0..d.live.len()).filter(move |&p| d.live[p])
    }

    pub fn live_mask(&self, i: Var) -> &[bool] {
        &self.domains[i].live
    }

    pub fn is_wiped_out(&self) -> bool {
        self.domains.iter().any(|d| d.len == 0)
    }

    /// Oriented relation between `i` and `j`, if a constraint is stored.
    #[inline]
    pub fn relation(&self, i: Var, j: Var) -> Option<&BitMatrix> {
        self.relations.oriented[i * self.relations.n + j].as_deref()
    }

    /// Pairs `(i, j)` with `i < j` that carry a stored constraint.
    pub fn stored_pairs(&self) -> &[(Var, Var)] {
        &self.relations.stored
    }

    /// Pairs `(i, j)` with `i < j` whose relation is non-trivial on the
    /// original domains. Fixed for the lifetime of the instance.
    pub fn edges(&self) -> &[(Var, Var)] {
        &self.relations.edges
    }

    pub fn edge_count(&self) -> usize {
        self.relations.edges.len()
    }

    pub fn is_edge(&self, i: Var, j: Var) -> bool {
        self.slot(i, j).is_some()
    }

    pub fn neighbours(&self, i: Var) -> &[Var] {
        &self.relations.neighbours[i]
    }

    /// Index of `j` in `neighbours(i)`.
    #[inline]
    pub fn slot(&self, i: Var, j: Var) -> Option<usize> {
        self.relations.slot[i * self.relations.n + j]
    }

    #[inline]
    pub fn allows_pos(&self, i: Var, a: usize, j: Var, b: usize) -> bool {
        match self.relation(i, j) {
            Some(r) => r.get(a, b),
            None => true,
        }
    }

    pub fn allows(&self, i: Var, a: Value, j: Var, b: Value) -> Result<bool> {
        let pa = self.require_value(i, a)?;
        let pb = self.require_value(j, b)?;
        if i == j {
            return Err(Error::SameVariable(i));
        }
        Ok(self.allows_pos(i, pa, j, pb))
    }

    /// `b` is substitutable by `a` at `j`: every live value of `x_j`
    /// compatible with `b` is compatible with `a`.
    pub fn arrow_pos(&self, i: Var, j: Var, b: usize, a: usize) -> bool {
        let Some(r) = self.relation(i, j) else {
            return true;
        };
        self.live_positions(j).all(|c| !r.get(b, c) || r.get(a, c))
    }

    pub fn arrow(&self, i: Var, j: Var, b: Value, a: Value) -> Result<bool> {
        let (pb, pa) = (self.require_value(i, b)?, self.require_value(i, a)?);
        self.require_var(j)?;
        if i == j {
            return Err(Error::SameVariable(i));
        }
        Ok(self.arrow_pos(i, j, pb, pa))
    }

    /// Smallest live `e` such that `(a, e)` is allowed and `d` is
    /// substitutable by `e` at every variable other than `i` and `k`.
    pub fn snake_sub_pos(&self, i: Var, k: Var, a: usize, d: usize) -> Option<usize> {
        self.live_positions(k).find(|&e| {
            self.allows_pos(i, a, k, e)
                && (0..self.num_vars())
                    .filter(|&l| l != i && l != k)
                    .all(|l| self.arrow_pos(k, l, d, e))
        })
    }

    /// Snake substitutability of `b` by `a` at `k`. Returns, for every live
    /// `d` compatible with `b`, the smallest qualifying `e`; `None` if some
    /// `d` has no such `e`.
    pub fn snake_arrow_pos(
        &self,
        i: Var,
        k: Var,
        b: usize,
        a: usize,
    ) -> Option<Vec<(usize, usize)>> {
        let mut map = Vec::new();
        for d in self.live_positions(k) {
            if !self.allows_pos(i, b, k, d) {
                continue;
            }
            map.push((d, self.snake_sub_pos(i, k, a, d)?));
        }
        Some(map)
    }

    pub fn snake_arrow(
        &self,
        i: Var,
        k: Var,
        b: Value,
        a: Value,
    ) -> Result<Option<Vec<(Value, Value)>>> {
        let (pb, pa) = (self.require_value(i, b)?, self.require_value(i, a)?);
        self.require_var(k)?;
        if i == k {
            return Err(Error::SameVariable(i));
        }
        Ok(self.snake_arrow_pos(i, k, pb, pa).map(|m| {
            m.into_iter()
                .map(|(d, e)| (self.value_at(k, d), self.value_at(k, e)))
                .collect()
        }))
    }

    pub fn remove_value(&self, i: Var, v: Value) -> Result<Instance> {
        let p = self.require_value(i, v)?;
        if !self.is_live(i, p) {
            return Err(Error::ValueAbsent { var: i, value: v });
        }
        Ok(self.remove_pos(i, p))
    }

    pub fn remove_pos(&self, i: Var, p: usize) -> Instance {
        let mut out = self.clone();
        let d = Arc::make_mut(&mut out.domains[i]);
        debug_assert!(d.live[p]);
        d.live[p] = false;
        d.len -= 1;
        out
    }

    /// Same instance with the given live masks.
    pub fn with_live(&self, live: &[Vec<bool>]) -> Instance {
        let mut out = self.clone();
        for (i, mask) in live.iter().enumerate() {
            if mask != &self.domains[i].live {
                out.domains[i] = Arc::new(Domain {
                    live: mask.clone(),
                    len: mask.iter().filter(|&&b| b).count(),
                });
            }
        }
        out
    }

    /// Restricts every domain to its current values, forgetting the
    /// original ones. The edge set is recomputed on the new domains.
    pub fn compacted(&self) -> Instance {
        let mut b = InstanceBuilder::new(self.name.clone());
        for i in 0..self.num_vars() {
            b.variable(self.names[i].clone(), self.domain(i));
        }
        for &(i, j) in self.stored_pairs() {
            let mut pairs = Vec::new();
            for a in self.live_positions(i) {
                for c in self.live_positions(j) {
                    if self.allows_pos(i, a, j, c) {
                        pairs.push((self.value_at(i, a), self.value_at(j, c)));
                    }
                }
            }
            b.allowed(i, j, pairs);
        }
        b.build()
            .expect("a restriction of a valid instance is valid")
    }

    pub(crate) fn require_var(&self, i: Var) -> Result<()> {
        if i < self.num_vars() {
            Ok(())
        } else {
            Err(Error::UnknownVariable(i))
        }
    }

    pub(crate) fn require_value(&self, i: Var, v: Value) -> Result<usize> {
        self.require_var(i)?;
        self.position(i, v)
            .ok_or(Error::UnknownValue { var: i, value: v })
    }
}

enum Source {
    Pairs(Vec<(Value, Value)>),
    Matrix(BitMatrix),
}

/// Incremental construction with validation at `build`.
pub struct InstanceBuilder {
    name: String,
    vars: Vec<(String, Vec<Value>)>,
    constraints: Vec<(Var, Var, Source)>,
}

impl InstanceBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        InstanceBuilder {
            name: name.into(),
            vars: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn variable(&mut self, name: impl Into<String>, domain: Vec<Value>) -> Var {
        self.vars.push((name.into(), domain));
        self.vars.len() - 1
    }

    /// Constraint given by its allowed value pairs, oriented `(x_i, x_j)`.
    pub fn allowed(&mut self, i: Var, j: Var, pairs: Vec<(Value, Value)>) -> &mut Self {
        self.constraints.push((i, j, Source::Pairs(pairs)));
        self
    }

    /// Constraint given by a predicate on values. Requires `i` and `j` to
    /// have been declared already.
    pub fn predicate(&mut self, i: Var, j: Var, f: impl Fn(Value, Value) -> bool) -> &mut Self {
        let (di, dj) = (&self.vars[i].1, &self.vars[j].1);
        let mut m = BitMatrix::new(di.len(), dj.len());
        for (p, &a) in di.iter().enumerate() {
            for (q, &b) in dj.iter().enumerate() {
                m.set(p, q, f(a, b));
            }
        }
        self.constraints.push((i, j, Source::Matrix(m)));
        self
    }

    pub fn build(self) -> Result<Instance> {
        let n = self.vars.len();
        let mut names = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for (k, (name, dom)) in self.vars.into_iter().enumerate() {
            if dom.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Invalid(format!(
                    "domain of variable {k} is not strictly increasing"
                )));
            }
            names.push(name);
            values.push(dom);
        }

        let pos = |i: Var, v: Value| -> Result<usize> {
            values[i].binary_search(&v).map_err(|_| {
                Error::Invalid(format!("value {v} is not in the domain of variable {i}"))
            })
        };

        let mut by_pair: BTreeMap<(Var, Var), BitMatrix> = BTreeMap::new();
        for (i, j, source) in self.constraints {
            if i >= n || j >= n {
                return Err(Error::Invalid(format!(
                    "constraint scope ({i}, {j}) out of range"
                )));
            }
            if i == j {
                return Err(Error::SameVariable(i));
            }
            let mut m = match source {
                Source::Matrix(m) => m,
                Source::Pairs(pairs) => {
                    let mut m = BitMatrix::new(values[i].len(), values[j].len());
                    for (a, b) in pairs {
                        m.set(pos(i, a)?, pos(j, b)?, true);
                    }
                    m
                }
            };
            let key = if i < j {
                (i, j)
            } else {
                m = m.transpose();
                (j, i)
            };
            if by_pair.insert(key, m).is_some() {
                return Err(Error::Invalid(format!(
                    "duplicate constraint on scope ({}, {})",
                    key.0, key.1
                )));
            }
        }

        let mut oriented = vec![None; n * n];
        let mut stored = Vec::new();
        let mut edges = Vec::new();
        let mut neighbours = vec![Vec::new(); n];
        for ((i, j), m) in by_pair {
            stored.push((i, j));
            if !m.is_full() {
                edges.push((i, j));
                neighbours[i].push(j);
                neighbours[j].push(i);
            }
            oriented[j * n + i] = Some(Arc::new(m.transpose()));
            oriented[i * n + j] = Some(Arc::new(m));
        }
        let mut slot = vec![None; n * n];
        for (i, ns) in neighbours.iter_mut().enumerate() {
            ns.sort_unstable();
            for (s, &j) in ns.iter().enumerate() {
                slot[i * n + j] = Some(s);
            }
        }

        let domains = values
            .iter()
            .map(|d| {
                Arc::new(Domain {
                    live: vec![true; d.len()],
                    len: d.len(),
                })
            })
            .collect();

        Ok(Instance {
            name: self.name,
            names: Arc::new(names),
            values: Arc::new(values),
            relations: Arc::new(Relations {
                n,
                oriented,
                stored,
                edges,
                neighbours,
                slot,
            }),
            domains,
        })
    }
}
