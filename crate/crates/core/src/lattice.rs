//! Face lattice of the polytope, Stanley's g/h calculus on it, fibers of the
//! resolution attached to a GIT parameter, smallness certificates and the
//! irreducible components of the central fiber.
//!
//! A face is stored by its naked core: the edge copies *not* spanning the
//! face. The polytope itself has the empty core, the empty face has the full
//! core, and `dim = n - e(core) - s(core)` with `s` counting weak components.

use std::collections::{HashMap, HashSet};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{
    binomial, blocks_from_labels, count_weighted, for_each_count_vector, pair_weight, MultMatrix,
    PairWeights, SubMultigraph, Support,
};
use crate::poly::{g_from_h, linear_power, IntPoly};
use crate::Budget;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    core: SubMultigraph,
    dim: i64,
}

impl Face {
    pub fn new(r: &MultMatrix, core: SubMultigraph) -> Result<Self> {
        if !core.fits(r) {
            return Err(Error::InvalidInput(format!("{core} does not fit in {r}")));
        }
        if !core.support().is_naked() {
            return Err(Error::InvalidInput(format!("{core} is not naked, so it is not a face")));
        }
        let dim = face_dim(r, &core);
        Ok(Face { core, dim })
    }

    pub fn core(&self) -> &SubMultigraph {
        &self.core
    }

    pub fn dim(&self) -> i64 {
        self.dim
    }

    pub fn id(&self) -> String {
        self.core.key()
    }
}

impl Serialize for Face {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            id: String,
            dim: i64,
            core: &'a SubMultigraph,
        }
        Repr { id: self.id(), dim: self.dim, core: &self.core }.serialize(s)
    }
}

/// `n - e(core) - s(core)`.
pub fn face_dim(r: &MultMatrix, core: &SubMultigraph) -> i64 {
    r.n() as i64 - core.edge_count() as i64 - core.component_count() as i64
}

/// Every naked simple directed graph on `k` vertices, in a fixed order.
pub fn naked_supports(k: usize, budget: Budget) -> Result<Vec<Support>> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let total = 4u64.checked_pow(pairs.len() as u32).unwrap_or(u64::MAX);
    budget.check(total)?;
    let mut out = Vec::new();
    for code in 0..total {
        let mut s = Support::empty(k);
        for (b, &(i, j)) in pairs.iter().enumerate() {
            let opt = code >> (2 * b) & 3;
            if opt & 1 == 1 {
                s.insert(i, j);
            }
            if opt & 2 == 2 {
                s.insert(j, i);
            }
        }
        if s.is_naked() {
            out.push(s);
        }
    }
    out.sort();
    Ok(out)
}

/// Labelled faces containing a fixed labelled face with count vector `lower`
/// among those with count vector `upper`: `prod C(r - c, c' - c)`.
pub fn upper_multiplicity(r: &MultMatrix, lower: &SubMultigraph, upper: &SubMultigraph) -> BigInt {
    let k = r.k();
    let mut w = BigInt::one();
    for u in 0..k {
        for v in 0..k {
            if u == v {
                continue;
            }
            let (a, b) = (lower.get(u, v), upper.get(u, v));
            if a > b {
                return BigInt::zero();
            }
            if b > a {
                w *= binomial((r.r(u, v) - a as u32) as u64, (b - a) as u64);
            }
        }
    }
    w
}

/// All faces of the polytope as count-vector classes; each class stands for
/// `orbit_weight` labelled faces.
#[derive(Clone, Debug)]
pub struct FaceLattice {
    r: MultMatrix,
    faces: Vec<Face>,
    index: HashMap<SubMultigraph, usize>,
}

impl FaceLattice {
    /// Faces are ordered by decreasing dimension (the polytope first, the
    /// empty face last), ties broken by core.
    pub fn enumerate(r: &MultMatrix, budget: Budget) -> Result<Self> {
        let k = r.k();
        if k < 2 {
            return Err(Error::InvalidInput("the face lattice needs at least two vertices".into()));
        }
        let supports = naked_supports(k, budget)?;
        let mut faces = Vec::new();
        let mut used = 4u64.saturating_pow((k * (k - 1) / 2) as u32);
        for s in &supports {
            let comps = s.component_count() as i64;
            let mut overflow = false;
            for_each_count_vector(r, s, |c| {
                used += 1;
                if used > budget.0 {
                    overflow = true;
                    return;
                }
                let dim = r.n() as i64 - c.edge_count() as i64 - comps;
                faces.push(Face { core: c.clone(), dim });
            });
            if overflow {
                return Err(Error::BudgetExceeded { budget: budget.0 });
            }
        }
        faces.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.core.cmp(&b.core)));
        let index = faces.iter().enumerate().map(|(i, f)| (f.core.clone(), i)).collect();
        Ok(FaceLattice { r: r.clone(), faces, index })
    }

    pub fn instance(&self) -> &MultMatrix {
        &self.r
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn position(&self, core: &SubMultigraph) -> Option<usize> {
        self.index.get(core).copied()
    }

    pub fn find_by_id(&self, id: &str) -> Option<&Face> {
        let core = SubMultigraph::from_key(self.r.k(), id).ok()?;
        self.position(&core).map(|i| &self.faces[i])
    }

    pub fn polytope(&self) -> &Face {
        &self.faces[0]
    }

    pub fn empty_face(&self) -> &Face {
        self.faces.last().expect("lattice has the empty face")
    }

    /// Labelled face counts for dimensions `-1 ..= D`.
    pub fn f_vector_full(&self) -> Vec<BigInt> {
        let top = self.r.dim();
        let mut f = vec![BigInt::zero(); (top + 2) as usize];
        for face in &self.faces {
            f[(face.dim + 1) as usize] += face.core.orbit_weight(&self.r);
        }
        f
    }

    /// Labelled counts of the proper nonempty faces, dimensions `0 .. D-1`.
    pub fn f_vector(&self) -> Vec<BigInt> {
        let full = self.f_vector_full();
        full[1..full.len() - 1].to_vec()
    }

    /// Number of labelled vertices of the face at `idx`.
    pub fn vertex_count(&self, idx: usize) -> BigInt {
        let lower = &self.faces[idx].core;
        self.faces
            .iter()
            .filter(|f| f.dim == 0)
            .map(|f| upper_multiplicity(&self.r, lower, &f.core))
            .sum()
    }

    /// Cover relations `(lower, upper)` between count-vector classes: the
    /// lower face's core is obtained from the upper one by adding one copy
    /// inside a component, or a directed cycle of single new edges through
    /// two or more components.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let k = self.r.k();
        let mut out = Vec::new();
        for (up, face) in self.faces.iter().enumerate() {
            let core = &face.core;
            let labels = core.support().scc_labels();
            let blocks = blocks_from_labels(&labels);
            let mut push = |c: SubMultigraph| {
                let low = self.index[&c];
                debug_assert_eq!(self.faces[low].dim + 1, face.dim);
                out.push((low, up));
            };
            for u in 0..k {
                for v in 0..k {
                    if u != v && labels[u] == labels[v] && (core.get(u, v) as u32) < self.r.r(u, v) {
                        let mut c = core.clone();
                        c.set(u, v, core.get(u, v) + 1);
                        push(c);
                    }
                }
            }
            for_each_block_cycle(&blocks, |edges| {
                let mut c = core.clone();
                for &(u, v) in edges {
                    c.set(u, v, 1);
                }
                push(c);
            });
        }
        out.sort_unstable();
        out
    }
}

/// Directed cycles visiting two or more blocks once each, with one edge
/// between consecutive blocks; each cycle is reported once.
fn for_each_block_cycle(blocks: &[Vec<usize>], mut f: impl FnMut(&[(usize, usize)])) {
    let m = blocks.len();
    let mut order = Vec::new();
    for start in 0..m {
        order.clear();
        order.push(start);
        extend_block_cycle(blocks, start, &mut order, &mut f);
    }
}

fn extend_block_cycle(
    blocks: &[Vec<usize>],
    start: usize,
    order: &mut Vec<usize>,
    f: &mut impl FnMut(&[(usize, usize)]),
) {
    if order.len() >= 2 {
        // close the cycle back to `start`, choosing vertices for every hop
        let mut hops = Vec::with_capacity(order.len());
        for w in 0..order.len() {
            hops.push((order[w], order[(w + 1) % order.len()]));
        }
        let mut edges = Vec::with_capacity(hops.len());
        choose_hop_edges(blocks, &hops, &mut edges, f);
    }
    for next in start + 1..blocks.len() {
        if !order.contains(&next) {
            order.push(next);
            extend_block_cycle(blocks, start, order, f);
            order.pop();
        }
    }
}

fn choose_hop_edges(
    blocks: &[Vec<usize>],
    hops: &[(usize, usize)],
    edges: &mut Vec<(usize, usize)>,
    f: &mut impl FnMut(&[(usize, usize)]),
) {
    let Some(&(a, b)) = hops.get(edges.len()) else {
        f(edges);
        return;
    };
    for &u in &blocks[a] {
        for &v in &blocks[b] {
            edges.push((u, v));
            choose_hop_edges(blocks, hops, edges, f);
            edges.pop();
        }
    }
}

/// Stanley's recursion evaluated literally on the explicit lattice:
/// `h(F) = sum_{G < F} g(G) (t - 1)^{dim F - 1 - dim G}` over labelled faces.
/// Returns `(h, g)` per face index. Quadratic in the number of faces.
pub fn stanley_explicit(lat: &FaceLattice) -> Result<Vec<(IntPoly, IntPoly)>> {
    let r = &lat.r;
    let top = r.dim().max(0) as u32;
    let powers: Vec<IntPoly> = (0..=top + 1).map(|e| linear_power(-1, e)).collect();
    let n = lat.faces.len();
    let mut out: Vec<Option<(IntPoly, IntPoly)>> = vec![None; n];
    for i in (0..n).rev() {
        let face = &lat.faces[i];
        if face.dim < 0 {
            out[i] = Some((IntPoly::one(), IntPoly::one()));
            continue;
        }
        let mut h = IntPoly::zero();
        for j in i + 1..n {
            let lower = &lat.faces[j];
            if lower.dim >= face.dim {
                continue;
            }
            let mult = upper_multiplicity(r, &face.core, &lower.core);
            if mult.is_zero() {
                continue;
            }
            let g = &out[j].as_ref().expect("lower faces first").1;
            let term = g * &powers[(face.dim - 1 - lower.dim) as usize];
            h += &term.scale(&mult);
        }
        let g = g_from_h(&h, face.dim)?;
        out[i] = Some((h, g));
    }
    Ok(out.into_iter().map(|x| x.expect("filled")).collect())
}

struct NakedInfo {
    support: Support,
    labels: [u8; 16],
}

/// Stanley's recursion using that a face with core `c` is an iterated
/// pyramid over the polytope of the instance obtained by contracting the
/// strongly connected components of `c`. The sum over faces above a given
/// face is grouped by naked support and evaluated in closed form per
/// support, so only naked supports (not count vectors) are visited.
pub struct StanleyEngine {
    budget: Budget,
    naked: Mutex<HashMap<usize, Arc<Vec<NakedInfo>>>>,
    g_memo: Mutex<HashMap<MultMatrix, IntPoly>>,
}

impl StanleyEngine {
    pub fn new(budget: Budget) -> Self {
        StanleyEngine { budget, naked: Mutex::default(), g_memo: Mutex::default() }
    }

    fn naked_info(&self, k: usize) -> Result<Arc<Vec<NakedInfo>>> {
        if let Some(v) = self.naked.lock().expect("naked cache").get(&k) {
            return Ok(v.clone());
        }
        let infos: Vec<NakedInfo> = naked_supports(k, self.budget)?
            .into_iter()
            .map(|support| {
                let l = support.scc_labels();
                let mut labels = [0u8; 16];
                for (v, &b) in l.iter().enumerate() {
                    labels[v] = b as u8;
                }
                NakedInfo { support, labels }
            })
            .collect();
        let infos = Arc::new(infos);
        self.naked.lock().expect("naked cache").insert(k, infos.clone());
        Ok(infos)
    }

    /// g-polynomial of the whole polytope of `r`.
    pub fn g_instance(&self, r: &MultMatrix) -> Result<IntPoly> {
        if r.k() == 1 {
            return Ok(IntPoly::one());
        }
        if let Some(g) = self.g_memo.lock().expect("g cache").get(r) {
            return Ok(g.clone());
        }
        let h = self.h_face(r, &SubMultigraph::empty(r.k()))?;
        let g = g_from_h(&h, r.dim())?;
        self.g_memo.lock().expect("g cache").insert(r.clone(), g.clone());
        Ok(g)
    }

    pub fn h_instance(&self, r: &MultMatrix) -> Result<IntPoly> {
        if r.k() == 1 {
            return Ok(IntPoly::one());
        }
        self.h_face(r, &SubMultigraph::empty(r.k()))
    }

    pub fn g_face(&self, r: &MultMatrix, core: &SubMultigraph) -> Result<IntPoly> {
        let face = Face::new(r, core.clone())?;
        if face.dim < 0 {
            return Ok(IntPoly::one());
        }
        g_from_h(&self.h_face(r, core)?, face.dim)
    }

    pub fn h_face(&self, r: &MultMatrix, core: &SubMultigraph) -> Result<IntPoly> {
        let k = r.k();
        let face = Face::new(r, core.clone())?;
        if face.dim < 0 {
            return Ok(IntPoly::one());
        }
        let base = core.support();
        let base_blocks = base.component_count() as i64;
        // key: (component labels, sorted factor tags); tag (0, m) is (1+x)^m for
        // a pair already in the core, (1, m) is (1+x)^m - 1 for a new pair
        type Key = ([u8; 16], Vec<(u8, u8)>);
        let mut hist: HashMap<Key, u64> = HashMap::new();
        for info in self.naked_info(k)?.iter() {
            if !base.is_subset_of(&info.support) {
                continue;
            }
            let mut tags: Vec<(u8, u8)> = Vec::new();
            for (u, v) in info.support.edges() {
                let rp = r.r(u, v) as u8;
                if base.contains(u, v) {
                    let rest = rp - core.get(u, v);
                    if rest > 0 {
                        tags.push((0, rest));
                    }
                } else {
                    tags.push((1, rp));
                }
            }
            tags.sort_unstable();
            *hist.entry((info.labels, tags)).or_insert(0) += 1;
        }
        let mut keys: Vec<_> = hist.into_iter().collect();
        keys.sort();
        let x_plus_1 = IntPoly::from_i64s(&[1, 1]);
        // accumulated as a polynomial in x = t - 1
        let mut total = IntPoly::zero();
        for ((labels, tags), count) in keys {
            let mut prod = IntPoly::one();
            let mut any_new = false;
            for &(kind, m) in &tags {
                let mut f = x_plus_1.pow(m as u32);
                if kind == 1 {
                    any_new = true;
                    f = &f - &IntPoly::one();
                }
                prod = &prod * &f;
            }
            if !any_new {
                // the face itself is not below itself
                prod = &prod - &IntPoly::one();
            }
            if prod.is_zero() {
                continue;
            }
            let labels: Vec<usize> = labels[..k].iter().map(|&b| b as usize).collect();
            let blocks = blocks_from_labels(&labels);
            let shift = blocks.len() as i64 - base_blocks - 1;
            let term = if shift >= 0 {
                prod.mul_t_power(shift as usize)
            } else {
                prod.div_t_power((-shift) as usize)?
            };
            // g is a polynomial in t = x + 1
            let g = self.g_instance(&r.quotient(&blocks))?.shift(1);
            total += &(&term * &g).scale(&BigInt::from(count));
        }
        Ok(total.shift(-1))
    }
}

/// g-polynomial of a face from rooted graphs whose naked core is the face's
/// core: the core plus edges between its components that keep the
/// components acyclic and make everything reach vertex 1.
pub fn face_g_graphical(r: &MultMatrix, core: &SubMultigraph, budget: Budget) -> Result<IntPoly> {
    Face::new(r, core.clone())?;
    let base = core.support();
    let labels = base.scc_labels();
    let nb = labels.iter().max().map_or(0, |m| m + 1);
    let weights = inter_block_weights(r, &labels);
    let counts = count_weighted(
        &weights,
        |h| h.quotient_support(&labels, nb).is_acyclic() && base.union(h).is_rooted_at(0),
        |h| !h.quotient_support(&labels, nb).is_acyclic(),
        budget,
    )?;
    Ok(counts.div_t_power(nb - 1)?.shift(-1))
}

fn inter_block_weights(r: &MultMatrix, labels: &[usize]) -> PairWeights {
    let k = r.k();
    let mut w = PairWeights::new(k);
    for u in 0..k {
        for v in 0..k {
            if u != v && labels[u] != labels[v] {
                w.set(u, v, pair_weight(r.r(u, v), 1));
            }
        }
    }
    w
}

/// Largest vertex count for which spanning trees are enumerated.
pub const MAX_TREE_K: usize = 9;

/// A GIT parameter with its genericity verdict and the spanning trees whose
/// root cones contain it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaParam {
    theta: Vec<i64>,
    generic: bool,
    trees: Vec<Support>,
}

impl ThetaParam {
    pub fn theta(&self) -> &[i64] {
        &self.theta
    }

    pub fn is_generic(&self) -> bool {
        self.generic
    }

    /// Directed spanning trees (one copy per pair) with all coordinates positive.
    pub fn trees(&self) -> &[Support] {
        &self.trees
    }

    pub fn contains_tree(&self, s: &Support) -> bool {
        self.trees.iter().any(|t| t.is_subset_of(s))
    }

    fn require_generic(&self) -> Result<()> {
        if self.generic {
            Ok(())
        } else {
            Err(Error::NonGeneric(self.theta.clone()))
        }
    }
}

impl Serialize for ThetaParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            theta: &'a [i64],
            generic: bool,
            trees: Vec<Vec<[usize; 2]>>,
        }
        let trees = self
            .trees
            .iter()
            .map(|t| t.edges().map(|(u, v)| [u + 1, v + 1]).collect())
            .collect();
        Repr { theta: &self.theta, generic: self.generic, trees }.serialize(s)
    }
}

/// The parameter `(k-1, -1, ..., -1)`.
pub fn theta1(k: usize) -> Vec<i64> {
    let mut t = vec![-1; k];
    t[0] = k as i64 - 1;
    t
}

/// Every labelled tree on `k` vertices as an undirected edge list, decoded
/// from Prüfer sequences.
pub fn labelled_trees(k: usize) -> Vec<Vec<(usize, usize)>> {
    if k <= 1 {
        return vec![Vec::new()];
    }
    if k == 2 {
        return vec![vec![(0, 1)]];
    }
    let len = k - 2;
    let total = k.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    let mut seq = vec![0usize; len];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % k;
            c /= k;
        }
        let mut degree = vec![1usize; k];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(k - 1);
        for &s in &seq {
            let leaf = (0..k).find(|&v| degree[v] == 1).expect("a leaf exists");
            edges.push((leaf.min(s), leaf.max(s)));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        edges.sort_unstable();
        out.push(edges);
    }
    out
}

/// Sum of `theta` over the side of the tree containing `v` after deleting
/// the edge `{u, v}`.
fn side_sum(edges: &[(usize, usize)], theta: &[i64], u: usize, v: usize) -> i64 {
    let k = theta.len();
    let mut seen = vec![false; k];
    seen[u] = true;
    seen[v] = true;
    let mut stack = vec![v];
    let mut sum = 0;
    while let Some(x) = stack.pop() {
        sum += theta[x];
        for &(a, b) in edges {
            let y = if a == x { b } else if b == x { a } else { continue };
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    sum
}

/// Classifies `theta`. In a tree basis the coordinate of the root attached to
/// the edge `u -> v` is the sum of `theta` over the side containing `v`, so
/// each undirected tree has at most one orientation with all coordinates
/// positive, and a zero coordinate anywhere means `theta` lies on a wall.
pub fn is_generic(r: &MultMatrix, theta: &[i64]) -> Result<ThetaParam> {
    let k = r.k();
    if theta.len() != k {
        return Err(Error::InvalidInput(format!("theta has {} entries, expected {k}", theta.len())));
    }
    if theta.iter().sum::<i64>() != 0 {
        return Err(Error::InvalidInput("theta must sum to zero".into()));
    }
    if k > MAX_TREE_K {
        return Err(Error::InvalidInput(format!(
            "spanning-tree enumeration is limited to k <= {MAX_TREE_K}"
        )));
    }
    let mut generic = true;
    let mut trees = Vec::new();
    for tree in labelled_trees(k) {
        let mut directed = Support::empty(k);
        let mut ok = true;
        for &(u, v) in &tree {
            match side_sum(&tree, theta, u, v) {
                0 => {
                    ok = false;
                    generic = false;
                }
                s if s > 0 => directed.insert(u, v),
                _ => directed.insert(v, u),
            }
        }
        if ok {
            trees.push(directed);
        }
    }
    trees.sort();
    Ok(ThetaParam { theta: theta.to_vec(), generic, trees })
}

/// Draws integer parameters with entries in `[-bound, bound]` until a generic
/// one is found.
pub fn random_generic_theta(r: &MultMatrix, bound: i64, rng: &mut impl Rng) -> ThetaParam {
    let k = r.k();
    loop {
        let mut t: Vec<i64> = (0..k - 1).map(|_| rng.gen_range(-bound..=bound)).collect();
        t.push(-t.iter().sum::<i64>());
        let p = is_generic(r, &t).expect("well-formed parameter");
        if p.generic {
            return p;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub face_id: String,
    pub poincare: Arc<IntPoly>,
    pub fiber_dim: usize,
    pub stratum_codim: i64,
    pub small_ok: bool,
}

/// Fibers of the resolution over the strata of one instance; the
/// Poincaré polynomial depends only on the support of the face's core and is
/// cached per support.
pub struct FiberEngine<'a> {
    r: &'a MultMatrix,
    theta: &'a ThetaParam,
    budget: Budget,
    memo: Mutex<HashMap<Support, Arc<IntPoly>>>,
}

impl<'a> FiberEngine<'a> {
    pub fn new(r: &'a MultMatrix, theta: &'a ThetaParam, budget: Budget) -> Result<Self> {
        theta.require_generic()?;
        if theta.theta.len() != r.k() {
            return Err(Error::InvalidInput("theta does not match the instance".into()));
        }
        Ok(FiberEngine { r, theta, budget, memo: Mutex::default() })
    }

    /// `sum_l d_l x^l`, where `d_l` counts labelled graphs made of the core
    /// plus `s - 1 + l` edges between its components, acyclic between
    /// components and containing a tree of the parameter.
    pub fn fiber_counts(&self, base: &Support) -> Result<IntPoly> {
        let labels = base.scc_labels();
        let nb = labels.iter().max().map_or(0, |m| m + 1);
        let weights = inter_block_weights(self.r, &labels);
        let counts = count_weighted(
            &weights,
            |h| h.quotient_support(&labels, nb).is_acyclic() && self.theta.contains_tree(&base.union(h)),
            |h| !h.quotient_support(&labels, nb).is_acyclic(),
            self.budget,
        )?;
        counts.div_t_power(nb - 1)
    }

    pub fn poincare(&self, base: &Support) -> Result<Arc<IntPoly>> {
        if let Some(p) = self.memo.lock().expect("fiber cache").get(base) {
            return Ok(p.clone());
        }
        let counts = self.fiber_counts(base)?;
        if counts.is_zero() {
            return Err(Error::Internal(format!("empty fiber over the stratum of {base:?}")));
        }
        let p = Arc::new(counts.shift(-1).in_t_squared());
        self.memo.lock().expect("fiber cache").insert(*base, p.clone());
        Ok(p)
    }

    pub fn report(&self, core: &SubMultigraph) -> Result<FiberReport> {
        let face = Face::new(self.r, core.clone())?;
        let poincare = self.poincare(&core.support())?;
        let fiber_dim = poincare.degree().expect("nonzero") / 2;
        let stratum_codim = face.dim + 1;
        // the empty face is the dense open stratum, where the map is an isomorphism
        let dense = face.dim < 0;
        Ok(FiberReport {
            face_id: face.id(),
            poincare,
            fiber_dim,
            stratum_codim,
            small_ok: dense || stratum_codim > 2 * fiber_dim as i64,
        })
    }
}

pub fn fiber_poincare(r: &MultMatrix, core: &SubMultigraph, theta: &ThetaParam, budget: Budget) -> Result<FiberReport> {
    FiberEngine::new(r, theta, budget)?.report(core)
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallnessCertificate {
    pub theta: Vec<i64>,
    pub generic: bool,
    pub reports: Vec<FiberReport>,
    pub small: bool,
}

pub fn certify_small(r: &MultMatrix, theta: &ThetaParam, budget: Budget) -> Result<SmallnessCertificate> {
    theta.require_generic()?;
    let lat = FaceLattice::enumerate(r, budget)?;
    certify_small_on(&lat, theta, budget)
}

/// One report per face of `lat`, in lattice order.
pub fn certify_small_on(lat: &FaceLattice, theta: &ThetaParam, budget: Budget) -> Result<SmallnessCertificate> {
    let engine = FiberEngine::new(&lat.r, theta, budget)?;
    let mut seen = HashSet::new();
    let supports: Vec<Support> =
        lat.faces.iter().map(|f| f.core.support()).filter(|s| seen.insert(*s)).collect();
    supports.par_iter().map(|s| engine.poincare(s).map(drop)).collect::<Result<Vec<()>>>()?;
    let reports = lat.faces.iter().map(|f| engine.report(&f.core)).collect::<Result<Vec<_>>>()?;
    let small = reports.iter().all(|r| r.small_ok);
    Ok(SmallnessCertificate { theta: theta.theta.clone(), generic: true, reports, small })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    pub graph: SubMultigraph,
    pub dim: i64,
    pub poincare: IntPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Intersection {
    pub a: usize,
    pub b: usize,
    pub common: SubMultigraph,
    /// `None` when the common graph contains no tree of the parameter, so
    /// the two components are disjoint.
    pub dim: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TopComponents {
    pub theta: Vec<i64>,
    pub components: Vec<Component>,
    pub intersections: Vec<Intersection>,
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                go(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Irreducible components of the central fiber: acyclic graphs with the
/// maximal number of edges (all copies of every pair, oriented along a total
/// order) that contain a tree of the parameter.
pub fn top_components(r: &MultMatrix, theta: &ThetaParam, budget: Budget) -> Result<TopComponents> {
    theta.require_generic()?;
    let k = r.k();
    if k > MAX_TREE_K {
        return Err(Error::InvalidInput(format!("components are limited to k <= {MAX_TREE_K}")));
    }
    let half: i64 = r.upper().iter().map(|&x| x as i64).sum();
    let mut components = Vec::new();
    for order in permutations(k) {
        // every vertex points to all vertices earlier in the order
        let mut g = SubMultigraph::empty(k);
        for (pos, &u) in order.iter().enumerate() {
            for &v in &order[..pos] {
                g.set(u, v, r.r(u, v) as u8);
            }
        }
        if !theta.contains_tree(&g.support()) {
            continue;
        }
        let mut weights_exact = PairWeights::new(k);
        for (u, v, c) in g.edges() {
            weights_exact.set(u, v, pair_weight(c as u32, 1));
        }
        let counts = count_weighted(&weights_exact, |s| theta.contains_tree(s), |_| false, budget)?;
        let poincare = counts.div_t_power(k - 1)?.shift(-1).in_t_squared();
        components.push(Component { graph: g, dim: half - k as i64 + 1, poincare });
    }
    let mut intersections = Vec::new();
    for a in 0..components.len() {
        for b in a + 1..components.len() {
            let (ga, gb) = (&components[a].graph, &components[b].graph);
            let mut common = SubMultigraph::empty(k);
            for u in 0..k {
                for v in 0..k {
                    if u != v {
                        common.set(u, v, ga.get(u, v).min(gb.get(u, v)));
                    }
                }
            }
            let dim = theta
                .contains_tree(&common.support())
                .then(|| common.edge_count() as i64 - k as i64 + 1);
            intersections.push(Intersection { a, b, common, dim });
        }
    }
    Ok(TopComponents { theta: theta.theta.clone(), components, intersections })
}
