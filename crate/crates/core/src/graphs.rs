//! Directed sub-multigraphs of the complete multigraph `K_k(R)`.
//!
//! Vertices are stored 0-based (`0` is the distinguished root vertex); every
//! serialized or displayed form uses 1-based labels. Parallel copies of an edge
//! are never labelled individually: a sub-multigraph is a count per ordered pair,
//! and labelled counts are recovered with binomial weights.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::IntPoly;
use crate::Budget;

/// Largest supported vertex count (supports are `u16` adjacency rows).
pub const MAX_K: usize = 16;

/// Symmetric positive multiplicities `r_ij` on the complete graph with `k` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultMatrix {
    k: usize,
    r: Vec<u32>,
}

impl MultMatrix {
    /// Builds from the upper triangle in lexicographic pair order
    /// `(1,2), (1,3), ..., (k-1,k)`.
    pub fn from_upper(k: usize, upper: &[u32]) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("k must be at least 1".into()));
        }
        if k > MAX_K {
            return Err(Error::InvalidInput(format!("k = {k} exceeds the limit {MAX_K}")));
        }
        let pairs = k * (k - 1) / 2;
        if upper.len() != pairs {
            return Err(Error::InvalidInput(format!(
                "expected {pairs} multiplicities for k = {k}, got {}",
                upper.len()
            )));
        }
        if let Some(bad) = upper.iter().position(|&x| x == 0) {
            return Err(Error::InvalidInput(format!(
                "multiplicity #{} is zero; all multiplicities must be positive",
                bad + 1
            )));
        }
        if upper.iter().any(|&x| x > 255) {
            return Err(Error::InvalidInput("multiplicities above 255 are not supported".into()));
        }
        let mut r = vec![0; k * k];
        let mut it = upper.iter();
        for i in 0..k {
            for j in i + 1..k {
                let v = *it.next().expect("length checked");
                r[i * k + j] = v;
                r[j * k + i] = v;
            }
        }
        Ok(MultMatrix { k, r })
    }

    pub fn all_ones(k: usize) -> Self {
        Self::uniform(k, 1)
    }

    pub fn uniform(k: usize, value: u32) -> Self {
        Self::from_upper(k, &vec![value; k * (k - 1) / 2]).expect("valid uniform instance")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Multiplicity of the pair `{i, j}` (0-based, `i != j`).
    pub fn r(&self, i: usize, j: usize) -> u32 {
        self.r[i * self.k + j]
    }

    pub fn upper(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k * (self.k - 1) / 2);
        for i in 0..self.k {
            for j in i + 1..self.k {
                out.push(self.r(i, j));
            }
        }
        out
    }

    /// Total number of edge copies `2 * sum r_ij`.
    pub fn n(&self) -> usize {
        self.r.iter().map(|&x| x as usize).sum()
    }

    /// Dimension `n - k` of the polytope.
    pub fn dim(&self) -> i64 {
        self.n() as i64 - self.k as i64
    }

    /// `r_i = sum_{j != i} r_ij`.
    pub fn degree(&self, i: usize) -> u32 {
        (0..self.k).filter(|&j| j != i).map(|j| self.r(i, j)).sum()
    }

    pub fn is_all_ones(&self) -> bool {
        self.upper().iter().all(|&x| x == 1)
    }

    /// Induced instance on the given vertices, relabelled in the given order.
    pub fn restrict(&self, vertices: &[usize]) -> Self {
        let m = vertices.len();
        let mut r = vec![0; m * m];
        for (a, &u) in vertices.iter().enumerate() {
            for (b, &v) in vertices.iter().enumerate() {
                if a != b {
                    r[a * m + b] = self.r(u, v);
                }
            }
        }
        MultMatrix { k: m, r }
    }

    /// Contracts each block to one vertex; the new multiplicity between two
    /// blocks is the sum of the multiplicities across them.
    pub fn quotient(&self, blocks: &[Vec<usize>]) -> Self {
        let m = blocks.len();
        let mut r = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                r[a * m + b] = blocks[a]
                    .iter()
                    .flat_map(|&u| blocks[b].iter().map(move |&v| (u, v)))
                    .map(|(u, v)| self.r(u, v))
                    .sum();
            }
        }
        MultMatrix { k: m, r }
    }
}

impl fmt::Display for MultMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let upper: Vec<String> = self.upper().iter().map(ToString::to_string).collect();
        write!(f, "k={} r=[{}]", self.k, upper.join(","))
    }
}

/// Simple directed graph on at most 16 vertices: `out[u]` has bit `v` set
/// iff the edge `u -> v` is present.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    k: u8,
    out: [u16; MAX_K],
}

impl Support {
    pub fn empty(k: usize) -> Self {
        assert!(k <= MAX_K, "k = {k} exceeds {MAX_K}");
        Support { k: k as u8, out: [0; MAX_K] }
    }

    /// All ordered pairs.
    pub fn complete(k: usize) -> Self {
        let mut s = Self::empty(k);
        let all = Self::full_mask(k);
        for u in 0..k {
            s.out[u] = all & !(1 << u);
        }
        s
    }

    pub fn from_edges(k: usize, edges: &[(usize, usize)]) -> Self {
        let mut s = Self::empty(k);
        for &(u, v) in edges {
            s.insert(u, v);
        }
        s
    }

    fn full_mask(k: usize) -> u16 {
        if k == 16 {
            u16::MAX
        } else {
            (1u16 << k) - 1
        }
    }

    pub fn k(&self) -> usize {
        self.k as usize
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.out[u] >> v & 1 == 1
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.out[u] |= 1 << v;
    }

    pub fn remove(&mut self, u: usize, v: usize) {
        self.out[u] &= !(1 << v);
    }

    pub fn out_row(&self, u: usize) -> u16 {
        self.out[u]
    }

    pub fn edge_count(&self) -> usize {
        self.out[..self.k()].iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.k()).flat_map(move |u| bits(self.out[u]).map(move |v| (u, v)))
    }

    pub fn is_subset_of(&self, other: &Support) -> bool {
        (0..self.k()).all(|u| self.out[u] & !other.out[u] == 0)
    }

    pub fn union(&self, other: &Support) -> Support {
        let mut s = *self;
        for u in 0..self.k() {
            s.out[u] |= other.out[u];
        }
        s
    }

    pub fn intersection(&self, other: &Support) -> Support {
        let mut s = *self;
        for u in 0..self.k() {
            s.out[u] &= other.out[u];
        }
        s
    }

    fn in_rows(&self) -> [u16; MAX_K] {
        let mut inn = [0u16; MAX_K];
        for (u, v) in self.edges() {
            inn[v] |= 1 << u;
        }
        inn
    }

    /// Vertices reachable from `v` (including `v`) along rows of `adj`.
    fn closure(adj: &[u16; MAX_K], v: usize) -> u16 {
        let mut seen = 1u16 << v;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            for u in bits(frontier) {
                next |= adj[u];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen
    }

    /// Strongly connected components via iterative Tarjan; returns the
    /// component index of every vertex, components numbered in order of
    /// their smallest vertex.
    pub fn scc_labels(&self) -> Vec<usize> {
        let k = self.k();
        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; k];
        let mut low = vec![0usize; k];
        let mut on_stack = vec![false; k];
        let mut stack = Vec::with_capacity(k);
        let mut comp = vec![UNSEEN; k];
        let mut ncomp = 0;
        let mut next_index = 0;
        // call stack of (vertex, remaining successors)
        let mut calls: Vec<(usize, u16)> = Vec::with_capacity(k);
        for root in 0..k {
            if index[root] != UNSEEN {
                continue;
            }
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root] = true;
            calls.push((root, self.out[root]));
            while let Some(&mut (v, ref mut rest)) = calls.last_mut() {
                if *rest != 0 {
                    let w = rest.trailing_zeros() as usize;
                    *rest &= *rest - 1;
                    if index[w] == UNSEEN {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        calls.push((w, self.out[w]));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                calls.pop();
                if let Some(&(parent, _)) = calls.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
        // renumber by smallest vertex
        let mut remap = vec![UNSEEN; ncomp];
        let mut next = 0;
        for c in comp.iter_mut() {
            if remap[*c] == UNSEEN {
                remap[*c] = next;
                next += 1;
            }
            *c = remap[*c];
        }
        comp
    }

    /// Strongly connected components as sorted vertex lists, ordered by
    /// smallest vertex.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        blocks_from_labels(&self.scc_labels())
    }

    /// Edges whose endpoints share a strongly connected component.
    pub fn naked_part(&self) -> Support {
        let labels = self.scc_labels();
        let mut s = Support::empty(self.k());
        for (u, v) in self.edges() {
            if labels[u] == labels[v] {
                s.insert(u, v);
            }
        }
        s
    }

    /// Every edge lies on a directed cycle.
    pub fn is_naked(&self) -> bool {
        self.naked_part() == *self
    }

    pub fn is_acyclic(&self) -> bool {
        let k = self.k();
        let mut alive = Self::full_mask(k);
        loop {
            let mut removed = false;
            for u in bits(alive) {
                if self.out[u] & alive == 0 {
                    alive &= !(1 << u);
                    removed = true;
                }
            }
            if alive == 0 {
                return true;
            }
            if !removed {
                return false;
            }
        }
    }

    pub fn has_cycle(&self) -> bool {
        !self.is_acyclic()
    }

    /// Every vertex reaches `v` by a directed path.
    pub fn is_rooted_at(&self, v: usize) -> bool {
        Self::closure(&self.in_rows(), v) == Self::full_mask(self.k())
    }

    /// Weakly connected components on the full vertex set.
    pub fn component_count(&self) -> usize {
        let k = self.k();
        let inn = self.in_rows();
        let mut und = [0u16; MAX_K];
        for u in 0..k {
            und[u] = self.out[u] | inn[u];
        }
        let mut seen = 0u16;
        let mut count = 0;
        for v in 0..k {
            if seen >> v & 1 == 0 {
                seen |= Self::closure(&und, v);
                count += 1;
            }
        }
        count
    }

    /// Contracts the blocks given by `labels` (vertex -> block index) and
    /// reports whether the quotient graph, ignoring loops, is acyclic.
    pub fn is_quotient_acyclic(&self, labels: &[usize], nblocks: usize) -> bool {
        self.quotient_support(labels, nblocks).is_acyclic()
    }

    pub fn quotient_support(&self, labels: &[usize], nblocks: usize) -> Support {
        let mut q = Support::empty(nblocks);
        for (u, v) in self.edges() {
            if labels[u] != labels[v] {
                q.insert(labels[u], labels[v]);
            }
        }
        q
    }
}

/// Groups vertices by label; blocks are sorted and ordered by label.
pub fn blocks_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let n = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); n];
    for (v, &l) in labels.iter().enumerate() {
        blocks[l].push(v);
    }
    blocks
}

/// Iterates the set bits of a `u16` from lowest to highest.
pub fn bits(mut m: u16) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// Edge counts per ordered pair of a sub-multigraph of `K_k(R)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubMultigraph {
    k: usize,
    c: Vec<u8>,
}

impl SubMultigraph {
    pub fn empty(k: usize) -> Self {
        SubMultigraph { k, c: vec![0; k * k] }
    }

    /// `K_k(R)` itself.
    pub fn full(r: &MultMatrix) -> Self {
        let k = r.k();
        let mut g = Self::empty(k);
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    g.c[i * k + j] = r.r(i, j) as u8;
                }
            }
        }
        g
    }

    /// One copy of every edge of `s`.
    pub fn from_support(s: &Support) -> Self {
        let mut g = Self::empty(s.k());
        for (u, v) in s.edges() {
            g.set(u, v, 1);
        }
        g
    }

    pub fn from_edges(k: usize, edges: &[(usize, usize, u8)]) -> Self {
        let mut g = Self::empty(k);
        for &(u, v, c) in edges {
            g.set(u, v, c);
        }
        g
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, u: usize, v: usize) -> u8 {
        self.c[u * self.k + v]
    }

    pub fn set(&mut self, u: usize, v: usize, copies: u8) {
        assert!(u != v, "loops are not edges");
        self.c[u * self.k + v] = copies;
    }

    /// `0 <= c_ij <= r_ij` for every ordered pair.
    pub fn fits(&self, r: &MultMatrix) -> bool {
        self.k == r.k()
            && (0..self.k).all(|u| {
                (0..self.k).all(|v| u == v || self.get(u, v) as u32 <= r.r(u, v))
            })
    }

    pub fn support(&self) -> Support {
        let mut s = Support::empty(self.k);
        for u in 0..self.k {
            for v in 0..self.k {
                if u != v && self.get(u, v) > 0 {
                    s.insert(u, v);
                }
            }
        }
        s
    }

    /// Total number of edge copies.
    pub fn edge_count(&self) -> usize {
        self.c.iter().map(|&x| x as usize).sum()
    }

    /// `(from, to, copies)` for every present ordered pair, lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize, u8)> {
        let mut out = Vec::new();
        for u in 0..self.k {
            for v in 0..self.k {
                if u != v && self.get(u, v) > 0 {
                    out.push((u, v, self.get(u, v)));
                }
            }
        }
        out
    }

    pub fn support_scc(&self) -> Vec<Vec<usize>> {
        self.support().sccs()
    }

    /// Maximal naked sub-multigraph: keeps the edges inside strongly
    /// connected components, with their full counts.
    pub fn naked_core(&self) -> Self {
        let labels = self.support().scc_labels();
        let mut g = self.clone();
        for u in 0..self.k {
            for v in 0..self.k {
                if u != v && labels[u] != labels[v] {
                    g.set(u, v, 0);
                }
            }
        }
        g
    }

    pub fn is_acyclic(&self) -> bool {
        self.support().is_acyclic()
    }

    pub fn is_rooted_at(&self, v: usize) -> bool {
        self.support().is_rooted_at(v)
    }

    pub fn component_count(&self) -> usize {
        self.support().component_count()
    }

    pub fn is_subgraph_of(&self, other: &SubMultigraph) -> bool {
        self.k == other.k && self.c.iter().zip(&other.c).all(|(a, b)| a <= b)
    }

    /// Compact key: counts per ordered pair `(i, j)`, `i != j`, in
    /// lexicographic order, joined by `.`.
    pub fn key(&self) -> String {
        let mut parts = Vec::with_capacity(self.k * self.k);
        for u in 0..self.k {
            for v in 0..self.k {
                if u != v {
                    parts.push(self.get(u, v).to_string());
                }
            }
        }
        parts.join(".")
    }

    pub fn from_key(k: usize, key: &str) -> Result<Self> {
        let parts: Vec<&str> = if key.is_empty() { Vec::new() } else { key.split('.').collect() };
        if parts.len() != k * (k - 1) {
            return Err(Error::InvalidInput(format!(
                "key {key:?} must list {} counts for k = {k}",
                k * (k - 1)
            )));
        }
        let mut g = Self::empty(k);
        let mut it = parts.into_iter();
        for u in 0..k {
            for v in 0..k {
                if u != v {
                    let s = it.next().expect("length checked");
                    let c = s
                        .parse::<u8>()
                        .map_err(|_| Error::InvalidInput(format!("bad count {s:?} in key")))?;
                    g.set(u, v, c);
                }
            }
        }
        Ok(g)
    }

    /// Labelled copies represented by this count vector: `prod C(r_ij, c_ij)`.
    pub fn orbit_weight(&self, r: &MultMatrix) -> BigInt {
        let mut w = BigInt::one();
        for (u, v, c) in self.edges() {
            w *= binomial(r.r(u, v) as u64, c as u64);
        }
        w
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    from: usize,
    to: usize,
    copies: u8,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    k: usize,
    edges: Vec<EdgeRepr>,
}

impl Serialize for SubMultigraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            k: self.k,
            edges: self
                .edges()
                .into_iter()
                .map(|(u, v, c)| EdgeRepr { from: u + 1, to: v + 1, copies: c })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SubMultigraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        if repr.k == 0 || repr.k > MAX_K {
            return Err(D::Error::custom(format!("unsupported vertex count {}", repr.k)));
        }
        let mut g = SubMultigraph::empty(repr.k);
        for e in repr.edges {
            if e.from == 0 || e.to == 0 || e.from > repr.k || e.to > repr.k || e.from == e.to {
                return Err(D::Error::custom(format!("bad edge {} -> {}", e.from, e.to)));
            }
            g.set(e.from - 1, e.to - 1, e.copies);
        }
        Ok(g)
    }
}

impl fmt::Display for SubMultigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(u, v, c)| {
                if c == 1 {
                    format!("{}->{}", u + 1, v + 1)
                } else {
                    format!("{}->{}x{c}", u + 1, v + 1)
                }
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Labelled generating polynomial of one ordered pair with `r` parallel copies
/// when at least `floor` copies are taken: `sum_{c = floor..r} C(r, c) t^c`.
pub fn pair_weight(r: u32, floor: u32) -> IntPoly {
    IntPoly::new(
        (0..=r as u64)
            .map(|c| if c < floor as u64 { BigInt::zero() } else { binomial(r as u64, c) })
            .collect(),
    )
}

/// Per ordered pair weight polynomials for [`count_weighted`]; pairs without a
/// weight can never be chosen.
#[derive(Clone, Debug)]
pub struct PairWeights {
    k: usize,
    classes: Vec<IntPoly>,
    class_of: Vec<Option<u8>>,
}

impl PairWeights {
    pub fn new(k: usize) -> Self {
        PairWeights { k, classes: Vec::new(), class_of: vec![None; k * k] }
    }

    /// Every ordered pair of `allowed` gets `pair_weight(r_ij, floor)`.
    pub fn with_floor(r: &MultMatrix, allowed: &Support, floor: u32) -> Self {
        let mut w = Self::new(r.k());
        for (u, v) in allowed.edges() {
            w.set(u, v, pair_weight(r.r(u, v), floor));
        }
        w
    }

    pub fn set(&mut self, u: usize, v: usize, weight: IntPoly) {
        let class = match self.classes.iter().position(|c| *c == weight) {
            Some(i) => i,
            None => {
                self.classes.push(weight);
                self.classes.len() - 1
            }
        };
        self.class_of[u * self.k + v] = Some(class as u8);
    }

    pub fn get(&self, u: usize, v: usize) -> Option<&IntPoly> {
        self.class_of[u * self.k + v].map(|c| &self.classes[c as usize])
    }

    pub fn allowed(&self) -> Support {
        let mut s = Support::empty(self.k);
        for u in 0..self.k {
            for v in 0..self.k {
                if self.class_of[u * self.k + v].is_some() {
                    s.insert(u, v);
                }
            }
        }
        s
    }
}

const MAX_CLASSES: usize = 16;
/// Searches with fewer unordered pairs than this run on the calling thread.
const PARALLEL_SLOTS: usize = 10;

/// Sum over supports `S` (subsets of the allowed pairs) satisfying `pred` of
/// the product of the pair weights over `S`.
///
/// `dead` must be monotone: if it holds for a partial support it must hold for
/// every superset, and no such superset may satisfy `pred`; it is used to cut
/// the search. The search walks unordered pairs in lexicographic order,
/// choosing none, either direction or both for each.
pub fn count_weighted<P, Q>(weights: &PairWeights, pred: P, dead: Q, budget: Budget) -> Result<IntPoly>
where
    P: Fn(&Support) -> bool + Sync,
    Q: Fn(&Support) -> bool + Sync,
{
    let k = weights.k;
    if weights.classes.len() > MAX_CLASSES {
        return Err(Error::InvalidInput(format!(
            "at most {MAX_CLASSES} distinct pair weights are supported"
        )));
    }
    // Each slot is an unordered pair with its admissible orientations.
    let mut slots: Vec<Vec<(Support, u128)>> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let key_of = |u: usize, v: usize| -> Option<u128> {
                weights.class_of[u * k + v].map(|c| 1u128 << (8 * c as u32))
            };
            let mut opts = vec![(Support::empty(k), 0u128)];
            let fwd = key_of(i, j);
            let back = key_of(j, i);
            if let Some(f) = fwd {
                opts.push((Support::from_edges(k, &[(i, j)]), f));
            }
            if let Some(b) = back {
                opts.push((Support::from_edges(k, &[(j, i)]), b));
            }
            if let (Some(f), Some(b)) = (fwd, back) {
                opts.push((Support::from_edges(k, &[(i, j), (j, i)]), f + b));
            }
            if opts.len() > 1 {
                slots.push(opts);
            }
        }
    }

    // Expand a few levels sequentially to get independent prefixes.
    let mut prefixes: Vec<(Support, u128)> = vec![(Support::empty(k), 0)];
    let mut depth = 0;
    let target = if slots.len() > PARALLEL_SLOTS { 256 } else { 1 };
    while depth < slots.len() && prefixes.len() < target {
        let mut next = Vec::with_capacity(prefixes.len() * slots[depth].len());
        for (s, key) in &prefixes {
            for (add, dk) in &slots[depth] {
                let t = s.union(add);
                if !dead(&t) {
                    next.push((t, key + dk));
                }
            }
        }
        prefixes = next;
        depth += 1;
    }

    let steps = std::sync::atomic::AtomicU64::new(0);
    let partial: Vec<Result<HashMap<u128, u64>>> = prefixes
        .par_iter()
        .map(|(s, key)| {
            let mut hist = HashMap::new();
            let mut local_steps = 0u64;
            walk(&slots[depth..], *s, *key, &pred, &dead, &mut hist, &mut local_steps, &steps, budget)?;
            Ok(hist)
        })
        .collect();
    let mut hist: HashMap<u128, BigInt> = HashMap::new();
    for h in partial {
        for (key, count) in h? {
            *hist.entry(key).or_default() += count;
        }
    }

    // Combine: sum over histogram keys of count * prod_c weight_c^{n_c}.
    let mut powers: Vec<Vec<IntPoly>> = weights.classes.iter().map(|w| vec![IntPoly::one(), w.clone()]).collect();
    let mut keys: Vec<_> = hist.into_iter().collect();
    keys.sort_by_key(|a| a.0);
    let mut total = IntPoly::zero();
    for (key, count) in keys {
        let mut term = IntPoly::constant(count);
        for (c, pw) in powers.iter_mut().enumerate() {
            let e = ((key >> (8 * c)) & 0xff) as usize;
            while pw.len() <= e {
                let next = &pw[pw.len() - 1] * &pw[1];
                pw.push(next);
            }
            if e > 0 {
                term = &term * &pw[e];
            }
        }
        total += &term;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn walk<P, Q>(
    slots: &[Vec<(Support, u128)>],
    s: Support,
    key: u128,
    pred: &P,
    dead: &Q,
    hist: &mut HashMap<u128, u64>,
    local_steps: &mut u64,
    steps: &std::sync::atomic::AtomicU64,
    budget: Budget,
) -> Result<()>
where
    P: Fn(&Support) -> bool,
    Q: Fn(&Support) -> bool,
{
    *local_steps += 1;
    if *local_steps >= 4096 {
        let total = steps.fetch_add(*local_steps, std::sync::atomic::Ordering::Relaxed) + *local_steps;
        *local_steps = 0;
        budget.check(total)?;
    }
    let Some((first, rest)) = slots.split_first() else {
        if pred(&s) {
            *hist.entry(key).or_insert(0) += 1;
        }
        return Ok(());
    };
    for (add, dk) in first {
        let t = if dk == &0 { s } else { s.union(add) };
        if dk != &0 && dead(&t) {
            continue;
        }
        walk(rest, t, key + dk, pred, dead, hist, local_steps, steps, budget)?;
    }
    Ok(())
}

/// Reference implementation of [`count_weighted`]: every subset of allowed
/// ordered pairs, multiplied out explicitly.
pub fn count_weighted_brute<P>(weights: &PairWeights, pred: P) -> IntPoly
where
    P: Fn(&Support) -> bool,
{
    let k = weights.k;
    let allowed: Vec<(usize, usize)> = weights.allowed().edges().collect();
    assert!(allowed.len() <= 24, "brute force limited to 24 ordered pairs");
    let mut total = IntPoly::zero();
    for mask in 0u32..(1u32 << allowed.len()) {
        let mut s = Support::empty(k);
        let mut w = IntPoly::one();
        for (b, &(u, v)) in allowed.iter().enumerate() {
            if mask >> b & 1 == 1 {
                s.insert(u, v);
                w = &w * weights.get(u, v).expect("allowed pair");
            }
        }
        if pred(&s) {
            total += &w;
        }
    }
    total
}

/// Ordered pairs `(u, v)` with `u != 0`: the complete graph without the
/// out-edges of the root vertex.
pub fn without_root_out_edges(k: usize) -> Support {
    let mut s = Support::complete(k);
    s.out[0] = 0;
    s
}

/// Calls `f` on every count vector with the given support and counts bounded
/// by the multiplicities.
pub fn for_each_count_vector(r: &MultMatrix, support: &Support, mut f: impl FnMut(&SubMultigraph)) {
    let edges: Vec<(usize, usize)> = support.edges().collect();
    let mut g = SubMultigraph::from_support(support);
    loop {
        f(&g);
        // odometer increment
        let mut i = 0;
        loop {
            if i == edges.len() {
                return;
            }
            let (u, v) = edges[i];
            if (g.get(u, v) as u32) < r.r(u, v) {
                g.set(u, v, g.get(u, v) + 1);
                break;
            }
            g.set(u, v, 1);
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sup(k: usize, e: &[(usize, usize)]) -> Support {
        Support::from_edges(k, e)
    }

    #[test]
    fn from_upper_validates() {
        assert!(MultMatrix::from_upper(3, &[1, 1]).is_err());
        assert!(MultMatrix::from_upper(3, &[1, 0, 1]).is_err());
        assert!(MultMatrix::from_upper(0, &[]).is_err());
        let r = MultMatrix::from_upper(3, &[1, 2, 3]).unwrap();
        assert_eq!((r.r(0, 1), r.r(0, 2), r.r(1, 2), r.r(2, 1)), (1, 2, 3, 3));
        assert_eq!(r.n(), 12);
        assert_eq!(r.dim(), 9);
        assert_eq!(r.upper(), vec![1, 2, 3]);
        assert_eq!(MultMatrix::all_ones(4).dim(), 8);
    }

    #[test]
    fn quotient_sums_cross_multiplicities() {
        let r = MultMatrix::from_upper(3, &[1, 2, 3]).unwrap();
        let q = r.quotient(&[vec![0, 1], vec![2]]);
        assert_eq!(q.k(), 2);
        assert_eq!(q.r(0, 1), 5);
        let s = r.restrict(&[0, 2]);
        assert_eq!(s.r(0, 1), 2);
    }

    #[test]
    fn scc_examples() {
        assert_eq!(sup(3, &[(0, 1), (1, 0), (1, 2)]).sccs(), vec![vec![0, 1], vec![2]]);
        assert_eq!(Support::empty(3).sccs(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(Support::complete(3).sccs(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn naked_core_examples() {
        let r = MultMatrix::all_ones(3);
        let acyclic = SubMultigraph::from_edges(3, &[(1, 0, 1), (2, 0, 1)]);
        assert_eq!(acyclic.naked_core(), SubMultigraph::empty(3));
        let g = SubMultigraph::from_edges(3, &[(0, 1, 1), (1, 0, 1), (1, 2, 1)]);
        assert_eq!(g.naked_core(), SubMultigraph::from_edges(3, &[(0, 1, 1), (1, 0, 1)]));
        let full = SubMultigraph::full(&r);
        assert_eq!(full.naked_core(), full);
    }

    #[test]
    fn acyclicity_examples() {
        assert!(SubMultigraph::from_edges(2, &[(0, 1, 2)]).is_acyclic());
        assert!(!sup(2, &[(0, 1), (1, 0)]).is_acyclic());
        assert!(Support::empty(4).is_acyclic());
    }

    #[test]
    fn rooted_examples() {
        assert!(sup(3, &[(1, 0), (2, 0)]).is_rooted_at(0));
        assert!(!sup(3, &[(1, 0)]).is_rooted_at(0));
        assert!(Support::empty(1).is_rooted_at(0));
    }

    #[test]
    fn component_examples() {
        assert_eq!(Support::empty(3).component_count(), 3);
        assert_eq!(sup(3, &[(0, 1), (1, 0)]).component_count(), 2);
        assert_eq!(Support::complete(3).component_count(), 1);
    }

    #[test]
    fn key_and_json_roundtrip() {
        let g = SubMultigraph::from_edges(3, &[(1, 0, 1), (2, 1, 2)]);
        let key = g.key();
        assert_eq!(key, "0.0.1.0.0.2");
        assert_eq!(SubMultigraph::from_key(3, &key).unwrap(), g);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(
            json,
            r#"{"k":3,"edges":[{"from":2,"to":1,"copies":1},{"from":3,"to":2,"copies":2}]}"#
        );
        let back: SubMultigraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 4), BigInt::zero());
        assert_eq!(pair_weight(2, 1), IntPoly::from_i64s(&[0, 2, 1]));
        assert_eq!(pair_weight(2, 0), IntPoly::from_i64s(&[1, 2, 1]));
    }

    #[test]
    fn count_vectors_cover_the_box() {
        let r = MultMatrix::from_upper(3, &[2, 3, 1]).unwrap();
        let s = sup(3, &[(0, 1), (2, 0), (1, 2)]);
        let mut n = 0;
        for_each_count_vector(&r, &s, |g| {
            assert!(g.fits(&r));
            assert_eq!(g.support(), s);
            n += 1;
        });
        assert_eq!(n, 2 * 3);
    }

    fn rooted_acyclic(s: &Support) -> bool {
        s.is_acyclic() && s.is_rooted_at(0)
    }

    #[test]
    fn count_weighted_examples() {
        let r = MultMatrix::all_ones(3);
        let w = PairWeights::with_floor(&r, &without_root_out_edges(3), 1);
        let c = count_weighted(&w, rooted_acyclic, Support::has_cycle, Budget::DEFAULT).unwrap();
        assert_eq!(c, IntPoly::from_i64s(&[0, 0, 3, 2]));
        let none = count_weighted(&w, |_| false, |_| false, Budget::DEFAULT).unwrap();
        assert!(none.is_zero());
        let r2 = MultMatrix::all_ones(2);
        let w2 = PairWeights::with_floor(&r2, &Support::complete(2), 1);
        let c2 = count_weighted(&w2, rooted_acyclic, Support::has_cycle, Budget::DEFAULT).unwrap();
        assert_eq!(c2, IntPoly::from_i64s(&[0, 1]));
    }

    #[test]
    fn budget_is_enforced() {
        let r = MultMatrix::all_ones(5);
        let w = PairWeights::with_floor(&r, &Support::complete(5), 1);
        let res = count_weighted(&w, |_| true, |_| false, Budget(1000));
        assert_eq!(res, Err(Error::BudgetExceeded { budget: 1000 }));
    }

    /// Independent cycle test: depth-first search for a back edge.
    fn has_cycle_dfs(s: &Support) -> bool {
        fn visit(s: &Support, v: usize, state: &mut [u8]) -> bool {
            state[v] = 1;
            for w in 0..s.k() {
                if s.contains(v, w) {
                    if state[w] == 1 || (state[w] == 0 && visit(s, w, state)) {
                        return true;
                    }
                }
            }
            state[v] = 2;
            false
        }
        let mut state = vec![0u8; s.k()];
        (0..s.k()).any(|v| state[v] == 0 && visit(s, v, &mut state))
    }

    /// Independent naked test: every edge u->v has a path back v ~> u.
    fn naked_by_paths(s: &Support) -> bool {
        s.edges().all(|(u, v)| {
            let mut seen = vec![false; s.k()];
            let mut stack = vec![v];
            seen[v] = true;
            while let Some(x) = stack.pop() {
                for y in 0..s.k() {
                    if s.contains(x, y) && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            seen[u]
        })
    }

    #[test]
    fn exhaustive_small_supports() {
        for k in 1..=4 {
            let pairs: Vec<(usize, usize)> = Support::complete(k).edges().collect();
            for mask in 0u32..(1 << pairs.len()) {
                let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
                let s = Support::from_edges(k, &edges);
                assert_eq!(s.is_acyclic(), !has_cycle_dfs(&s), "{edges:?}");
                assert_eq!(s.is_naked(), naked_by_paths(&s), "{edges:?}");
                let core = s.naked_part();
                assert_eq!(core.naked_part(), core);
                if s.is_rooted_at(0) {
                    assert_eq!(s.component_count(), 1);
                }
            }
        }
    }

    #[test]
    fn fast_path_matches_brute_force() {
        let preds: Vec<(&str, Box<dyn Fn(&Support) -> bool + Sync>, Box<dyn Fn(&Support) -> bool + Sync>)> = vec![
            ("rooted acyclic", Box::new(rooted_acyclic), Box::new(has_cycle_dfs)),
            ("rooted cyclic", Box::new(|s: &Support| s.is_rooted_at(0) && has_cycle_dfs(s)), Box::new(|_: &Support| false)),
            ("naked", Box::new(naked_by_paths), Box::new(|_: &Support| false)),
            ("anything", Box::new(|_: &Support| true), Box::new(|_: &Support| false)),
        ];
        for k in 2..=4 {
            let pairs = k * (k - 1) / 2;
            for code in 0..(1u32 << pairs) {
                let upper: Vec<u32> = (0..pairs).map(|b| 1 + (code >> b & 1)).collect();
                let r = MultMatrix::from_upper(k, &upper).unwrap();
                for allowed in [Support::complete(k), without_root_out_edges(k)] {
                    for floor in [0, 1] {
                        let w = PairWeights::with_floor(&r, &allowed, floor);
                        for (name, pred, dead) in &preds {
                            let fast = count_weighted(&w, pred, dead, Budget::DEFAULT).unwrap();
                            let slow = count_weighted_brute(&w, pred);
                            assert_eq!(fast, slow, "{name} on {r} floor {floor}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unit_multiplicities_count_edge_subsets() {
        let r = MultMatrix::all_ones(4);
        let w = PairWeights::with_floor(&r, &Support::complete(4), 1);
        let c = count_weighted(&w, |s| s.is_rooted_at(0), |_| false, Budget::DEFAULT).unwrap();
        let mut direct = vec![0i64; 13];
        let pairs: Vec<(usize, usize)> = Support::complete(4).edges().collect();
        for mask in 0u32..(1 << 12) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &e)| e).collect();
            if Support::from_edges(4, &edges).is_rooted_at(0) {
                direct[edges.len()] += 1;
            }
        }
        assert_eq!(c, IntPoly::from_i64s(&direct));
    }

    proptest! {
        #[test]
        fn naked_core_is_idempotent(k in 2usize..7, seed in any::<u64>()) {
            let mut s = Support::empty(k);
            let mut x = seed;
            for u in 0..k {
                for v in 0..k {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if u != v && x >> 62 == 0 {
                        s.insert(u, v);
                    }
                }
            }
            let core = s.naked_part();
            prop_assert_eq!(core.naked_part(), core);
            prop_assert!(core.is_subset_of(&s));
            prop_assert_eq!(core.is_naked(), naked_by_paths(&core));
            prop_assert_eq!(s.is_acyclic(), !has_cycle_dfs(&s));
        }
    }
}
