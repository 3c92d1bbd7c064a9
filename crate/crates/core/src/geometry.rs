//! Explicit Gale dual of the root configuration, used as an independent
//! oracle for the combinatorial modules. Slow and simple on purpose.
//!
//! The edge copy `u -> v` carries the root `e_v - e_u`. Roots are listed
//! pair by pair in lexicographic order `(1,2), (1,3), ...`: first the copies of
//! `e_1 - e_2` (edges `2 -> 1`), then those of `e_2 - e_1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{MultMatrix, SubMultigraph, Support};
use crate::lattice::FaceLattice;
use crate::linalg::{det_bigint, primitive_integer, rank_i64, RationalMatrix};

#[derive(Clone, Debug)]
pub struct GaleData {
    k: usize,
    /// Edge `(u, v)` of every root copy, when the configuration comes from an instance.
    edges: Option<Vec<(usize, usize)>>,
    alphas: Vec<Vec<i64>>,
    betas: Vec<Vec<i64>>,
}

impl GaleData {
    /// Gale dual of an arbitrary integer configuration in `Z^k`.
    pub fn from_alphas(k: usize, alphas: Vec<Vec<i64>>) -> Result<Self> {
        if alphas.iter().any(|a| a.len() != k) {
            return Err(Error::InvalidInput(format!("every vector must have {k} entries")));
        }
        let betas = gale_betas(k, &alphas)?;
        Ok(GaleData { k, edges: None, alphas, betas })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphas(&self) -> &[Vec<i64>] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Vec<i64>] {
        &self.betas
    }

    pub fn edges(&self) -> Option<&[(usize, usize)]> {
        self.edges.as_deref()
    }

    /// Dimension of the space spanned by the betas.
    pub fn beta_rank(&self) -> usize {
        let rows: Vec<&[i64]> = self.betas.iter().map(Vec::as_slice).collect();
        rank_i64(&rows)
    }

    /// `sum m_i alpha_i`.
    pub fn alpha_combination(&self, m: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.k];
        for (a, &c) in self.alphas.iter().zip(m) {
            for (o, &x) in out.iter_mut().zip(a) {
                *o += c * x;
            }
        }
        out
    }

    /// A linear functional `l` with `l(beta_i) = m_i` for all `i`, if one exists.
    pub fn functional(&self, m: &[i64]) -> Option<Vec<BigRational>> {
        let b = RationalMatrix::from_i64_rows(&self.betas);
        let rhs: Vec<BigRational> = m.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        b.solve(&rhs)
    }
}

/// Kernel of `x -> sum x_i alpha_i` with one integer basis vector per free
/// column; `beta_i` collects the `i`-th entries of the basis vectors.
fn gale_betas(k: usize, alphas: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = alphas.len();
    let rows: Vec<Vec<i64>> = (0..k).map(|c| alphas.iter().map(|a| a[c]).collect()).collect();
    let a = RationalMatrix::from_i64_rows(&rows);
    let basis: Vec<Vec<BigInt>> = a.nullspace().iter().map(|v| primitive_integer(v)).collect();
    let mut betas = vec![Vec::with_capacity(basis.len()); n];
    for v in &basis {
        for (i, x) in v.iter().enumerate() {
            let x = x
                .to_i64()
                .ok_or_else(|| Error::Internal("kernel entry does not fit in 64 bits".into()))?;
            betas[i].push(x);
        }
    }
    Ok(betas)
}

/// Roots in the fixed order with their Gale dual.
pub fn build_gale(r: &MultMatrix) -> Result<GaleData> {
    let k = r.k();
    if k < 2 {
        return Err(Error::InvalidInput("the configuration needs at least two vertices".into()));
    }
    let mut edges = Vec::with_capacity(r.n());
    for i in 0..k {
        for j in i + 1..k {
            // e_i - e_j is the edge j -> i
            edges.extend(std::iter::repeat_n((j, i), r.r(i, j) as usize));
            edges.extend(std::iter::repeat_n((i, j), r.r(i, j) as usize));
        }
    }
    let alphas = edges.iter().map(|&(u, v)| root(k, u, v)).collect();
    let mut gd = GaleData::from_alphas(k, alphas)?;
    gd.edges = Some(edges);
    Ok(gd)
}

/// `e_v - e_u`, the root of the edge `u -> v`.
pub fn root(k: usize, u: usize, v: usize) -> Vec<i64> {
    let mut a = vec![0; k];
    a[v] += 1;
    a[u] -= 1;
    a
}

/// Random directed cycles (with random copies and integer weights) must have
/// a functional, random non-circulations must not.
pub fn verify_gale(gd: &GaleData, trials: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = gd.alphas.len();
    let b = RationalMatrix::from_i64_rows(&gd.betas);
    let check = |m: &[i64]| -> bool {
        match gd.functional(m) {
            Some(l) => {
                let got = b.mul_vec(&l);
                got.iter().zip(m).all(|(g, &x)| *g == BigRational::from_integer(x.into()))
            }
            None => false,
        }
    };
    for _ in 0..trials {
        let m = random_circulation(gd, &mut rng);
        if gd.alpha_combination(&m).iter().any(|&x| x != 0) || !check(&m) {
            return false;
        }
        let bad = loop {
            let m: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
            if gd.alpha_combination(&m).iter().any(|&x| x != 0) {
                break m;
            }
        };
        if gd.functional(&bad).is_some() {
            return false;
        }
    }
    true
}

/// Integer combination of root copies summing to zero.
fn random_circulation(gd: &GaleData, rng: &mut ChaCha8Rng) -> Vec<i64> {
    let n = gd.alphas.len();
    let mut m = vec![0i64; n];
    match &gd.edges {
        Some(edges) => {
            let k = gd.k;
            for _ in 0..rng.gen_range(1..=3) {
                let len = rng.gen_range(2..=k);
                let mut verts: Vec<usize> = (0..k).collect();
                for i in 0..len {
                    let j = rng.gen_range(i..k);
                    verts.swap(i, j);
                }
                let weight = rng.gen_range(-4..=4);
                for w in 0..len {
                    let (u, v) = (verts[w], verts[(w + 1) % len]);
                    let copies: Vec<usize> = (0..n).filter(|&i| edges[i] == (u, v)).collect();
                    m[copies[rng.gen_range(0..copies.len())]] += weight;
                }
            }
        }
        None => {
            // dependencies among the vectors themselves: combine kernel columns
            let rows: Vec<Vec<i64>> = (0..gd.k).map(|c| gd.alphas.iter().map(|a| a[c]).collect()).collect();
            for v in RationalMatrix::from_i64_rows(&rows).nullspace() {
                let w = rng.gen_range(-4..=4i64);
                for (mi, x) in m.iter_mut().zip(primitive_integer(&v)) {
                    *mi += w * x.to_i64().expect("small kernel entry");
                }
            }
        }
    }
    m
}

/// All nonzero maximal minors (last coordinate dropped, which is a lattice
/// isomorphism of the sum-zero hyperplane) have the same absolute value.
pub fn verify_unimodular(gd: &GaleData) -> bool {
    let k = gd.k;
    let mut distinct: Vec<Vec<i64>> = Vec::new();
    for a in &gd.alphas {
        if !distinct.contains(a) {
            distinct.push(a.clone());
        }
    }
    let d = k - 1;
    let mut common: Option<BigInt> = None;
    let mut idx: Vec<usize> = (0..d).collect();
    if distinct.len() < d {
        return false;
    }
    loop {
        let m: Vec<Vec<BigInt>> =
            idx.iter().map(|&i| distinct[i][..d].iter().map(|&x| BigInt::from(x)).collect()).collect();
        let det = det_bigint(m).abs();
        if !det.is_zero() {
            match &common {
                None => common = Some(det),
                Some(c) if *c != det => return false,
                _ => {}
            }
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return common.is_some();
            }
            i -= 1;
            if idx[i] < distinct.len() - d + i {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Coordinates of `theta` in the basis of roots of a spanning tree given by
/// directed edges.
pub fn theta_coords(gd: &GaleData, tree: &[(usize, usize)], theta: &[i64]) -> Result<Vec<i64>> {
    let k = gd.k;
    if theta.len() != k || tree.len() + 1 != k {
        return Err(Error::InvalidInput("a spanning tree has k - 1 edges".into()));
    }
    let cols: Vec<Vec<i64>> = tree.iter().map(|&(u, v)| root(k, u, v)).collect();
    if let Some(edges) = &gd.edges {
        if let Some(e) = tree.iter().find(|e| !edges.contains(e)) {
            return Err(Error::InvalidInput(format!("edge {:?} is not in the configuration", e)));
        }
    }
    let rows: Vec<Vec<i64>> = (0..k).map(|c| cols.iter().map(|a| a[c]).collect()).collect();
    let a = RationalMatrix::from_i64_rows(&rows);
    if a.rank() != k - 1 {
        return Err(Error::InvalidInput("edges do not form a spanning tree".into()));
    }
    let rhs: Vec<BigRational> = theta.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    let x = a
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidInput("theta is not in the span of the tree".into()))?;
    x.iter()
        .map(|c| {
            if c.is_integer() {
                c.to_integer().to_i64().ok_or_else(|| Error::NotIntegral("coordinate overflow".into()))
            } else {
                Err(Error::NotIntegral(format!("coordinate {c}")))
            }
        })
        .collect()
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct FaceVerification {
    pub faces_checked: usize,
    pub nonfaces_checked: usize,
    pub failures: Vec<String>,
}

impl FaceVerification {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Integer left inverse of the beta matrix on a set of independent rows:
/// `l = inv * m[rows] / den` solves `l(beta_i) = m_i` whenever a solution exists.
struct LeftInverse {
    rows: Vec<usize>,
    inv: Vec<Vec<i128>>,
    den: i128,
}

impl LeftInverse {
    fn new(betas: &[Vec<i64>]) -> Result<Self> {
        let bt = RationalMatrix::from_i64_rows(betas).transpose();
        let (_, rows) = bt.rref();
        let square: Vec<Vec<i64>> = rows.iter().map(|&i| betas[i].clone()).collect();
        let m = square.len();
        let sq = RationalMatrix::from_i64_rows(&square);
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(m);
        for j in 0..m {
            let e: Vec<BigRational> =
                (0..m).map(|i| if i == j { BigRational::one() } else { BigRational::zero() }).collect();
            cols.push(sq.solve(&e).ok_or_else(|| Error::Internal("singular beta basis".into()))?);
        }
        let den = cols
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
        let to_i128 = |x: BigInt| x.to_i128().ok_or_else(|| Error::Internal("inverse overflow".into()));
        let mut inv = vec![vec![0i128; m]; m];
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                inv[i][j] = to_i128((x * &den).to_integer())?;
            }
        }
        Ok(LeftInverse { rows, inv, den: to_i128(den)? })
    }

    /// `den * l` with `l(beta_i) = m_i` on the chosen rows.
    fn apply(&self, m: &[i64]) -> Vec<i128> {
        self.inv
            .iter()
            .map(|row| row.iter().zip(&self.rows).map(|(&a, &r)| a * m[r] as i128).sum())
            .collect()
    }
}

/// Checks every face of `lat` geometrically: a positive circulation on the
/// core (built from directed cycles) gives a functional vanishing exactly off
/// the core and positive on it, and the affine rank of the off-core betas is
/// the claimed dimension. Random non-naked cores are refuted with a Farkas
/// certificate.
pub fn verify_faces(gd: &GaleData, lat: &FaceLattice, samples: usize, seed: u64) -> Result<FaceVerification> {
    let r = lat.instance();
    let edges = gd
        .edges
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("face verification needs an instance configuration".into()))?;
    if edges.len() != r.n() || gd.k != r.k() {
        return Err(Error::InvalidInput("configuration and lattice disagree".into()));
    }
    let k = r.k();
    let mut copies = vec![Vec::new(); k * k];
    for (i, &(u, v)) in edges.iter().enumerate() {
        copies[u * k + v].push(i);
    }
    let mut report = FaceVerification::default();
    let n = edges.len();

    // all betas lie on the affine hyperplane l(beta) = 1
    if gd.functional(&vec![1; n]).is_none() {
        report.failures.push("betas are not on an affine hyperplane".into());
        return Ok(report);
    }
    let left = LeftInverse::new(&gd.betas)?;

    for face in lat.faces() {
        report.faces_checked += 1;
        let core = face.core();
        let support = core.support();
        let mut in_core = vec![false; n];
        for (u, v, c) in core.edges() {
            for &i in &copies[u * k + v][..c as usize] {
                in_core[i] = true;
            }
        }
        // positive circulation: one cycle through every core copy
        let mut m = vec![0i64; n];
        let mut ok = true;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if !in_core[i] {
                continue;
            }
            match path(&support, v, u) {
                Some(p) => {
                    m[i] += 1;
                    for w in p.windows(2) {
                        m[copies[w[0] * k + w[1]][0]] += 1;
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || gd.alpha_combination(&m).iter().any(|&x| x != 0) {
            report.failures.push(format!("face {}: no positive circulation on the core", face.id()));
            continue;
        }
        let l = left.apply(&m);
        let exact = gd.betas.iter().zip(&m).all(|(b, &mi)| {
            let val: i128 = b.iter().zip(&l).map(|(&x, &y)| x as i128 * y).sum();
            val == left.den * mi as i128
        });
        if !exact {
            report.failures.push(format!("face {}: circulation has no supporting functional", face.id()));
            continue;
        }
        let off: Vec<&[i64]> = (0..n).filter(|&i| !in_core[i]).map(|i| gd.betas[i].as_slice()).collect();
        let affine = rank_i64(&off) as i64 - 1;
        if affine != face.dim() {
            report
                .failures
                .push(format!("face {}: dimension {} but affine rank {affine}", face.id(), face.dim()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut attempts = 0;
    while report.nonfaces_checked < samples && attempts < samples * 1000 {
        attempts += 1;
        let mut c = SubMultigraph::empty(k);
        for u in 0..k {
            for v in 0..k {
                if u != v {
                    c.set(u, v, rng.gen_range(0..=r.r(u, v)) as u8);
                }
            }
        }
        let s = c.support();
        let Some((u, v)) = s.edges().find(|&(u, v)| path(&s, v, u).is_none()) else {
            continue;
        };
        report.nonfaces_checked += 1;
        // indicator of everything reachable from v: nonnegative on every core
        // root and positive on u -> v, so no positive circulation exists
        let reach = reachable(&s, v);
        let y: Vec<i64> = (0..k).map(|x| reach >> x & 1).map(i64::from).collect();
        let pairing = |i: usize| -> i64 { gd.alphas[i].iter().zip(&y).map(|(a, b)| a * b).sum() };
        let mut certified = pairing(copies[u * k + v][0]) > 0;
        for (a, b, cnt) in c.edges() {
            for &i in &copies[a * k + b][..cnt as usize] {
                certified &= pairing(i) >= 0;
            }
        }
        if !certified {
            report.failures.push(format!("non-face {}: Farkas certificate failed", c.key()));
        }
    }
    Ok(report)
}

/// Shortest directed path from `from` to `to` as a vertex list.
fn path(s: &Support, from: usize, to: usize) -> Option<Vec<usize>> {
    let k = s.k();
    let mut parent = vec![usize::MAX; k];
    parent[from] = from;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut p = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[cur];
                p.push(cur);
            }
            p.reverse();
            return Some(p);
        }
        for y in crate::graphs::bits(s.out_row(x)) {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

fn reachable(s: &Support, from: usize) -> u16 {
    let mut seen = 1u16 << from;
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for y in crate::graphs::bits(s.out_row(x)) {
            if seen >> y & 1 == 0 {
                seen |= 1 << y;
                stack.push(y);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{is_generic, labelled_trees, theta1};
    use crate::Budget;

    #[test]
    fn build_examples() {
        let gd = build_gale(&MultMatrix::all_ones(2)).unwrap();
        assert_eq!(gd.alphas(), &[vec![1, -1], vec![-1, 1]]);
        assert_eq!(gd.beta_rank(), 1);
        let gd = build_gale(&MultMatrix::all_ones(3)).unwrap();
        assert_eq!(gd.betas().len(), 6);
        assert_eq!(gd.beta_rank(), 6 - 3 + 1);
        for r in [MultMatrix::uniform(3, 2), MultMatrix::from_upper(4, &[1, 2, 1, 2, 1, 2]).unwrap()] {
            let gd = build_gale(&r).unwrap();
            assert_eq!(gd.beta_rank(), r.n() - r.k() + 1);
        }
    }

    #[test]
    fn gale_functional_examples() {
        let gd = build_gale(&MultMatrix::all_ones(3)).unwrap();
        assert!(gd.functional(&[0; 6]).is_some());
        // copies: (2->1), (1->2), (3->1), (1->3), (3->2), (2->3); cycle 1->2->3->1
        let cycle = [0, 1, 1, 0, 0, 1];
        assert_eq!(gd.alpha_combination(&cycle), vec![0, 0, 0]);
        assert!(gd.functional(&cycle).is_some());
        assert!(gd.functional(&[1, 0, 0, 0, 0, 0]).is_none());
        assert!(verify_gale(&gd, 100, 1));
    }

    #[test]
    fn unimodularity() {
        assert!(verify_unimodular(&build_gale(&MultMatrix::all_ones(3)).unwrap()));
        assert!(verify_unimodular(&build_gale(&MultMatrix::all_ones(4)).unwrap()));
        let mut alphas = build_gale(&MultMatrix::all_ones(3)).unwrap().alphas().to_vec();
        alphas.push(vec![2, -2, 0]);
        assert!(!verify_unimodular(&GaleData::from_alphas(3, alphas).unwrap()));
    }

    #[test]
    fn generic_configuration_gale_check() {
        let gd = GaleData::from_alphas(3, vec![vec![1, -1, 0], vec![2, -2, 0], vec![0, 1, -1], vec![-1, 0, 1]])
            .unwrap();
        assert!(verify_gale(&gd, 50, 3));
    }

    #[test]
    fn coordinates_examples() {
        let gd = build_gale(&MultMatrix::all_ones(3)).unwrap();
        assert_eq!(theta_coords(&gd, &[(1, 0), (2, 0)], &[2, -1, -1]).unwrap(), vec![1, 1]);
        let c = theta_coords(&gd, &[(1, 0), (1, 2)], &[2, -1, -1]).unwrap();
        assert!(c.iter().any(|&x| x <= 0));
        let gd2 = build_gale(&MultMatrix::all_ones(2)).unwrap();
        assert_eq!(theta_coords(&gd2, &[(1, 0)], &[1, -1]).unwrap(), vec![1]);
        assert!(theta_coords(&gd, &[(1, 0), (0, 1)], &[2, -1, -1]).is_err());
    }

    #[test]
    fn tree_sets_agree_with_exact_solves() {
        for k in 2..=5 {
            let r = MultMatrix::all_ones(k);
            let gd = build_gale(&r).unwrap();
            for theta in [theta1(k), (0..k as i64).map(|i| if i == 0 { 0 } else { i }).collect::<Vec<_>>()] {
                let mut theta = theta;
                let s: i64 = theta.iter().sum();
                theta[0] -= s;
                let param = is_generic(&r, &theta).unwrap();
                let mut expected = Vec::new();
                for tree in labelled_trees(k) {
                    // every orientation of the undirected tree
                    for mask in 0u32..(1 << tree.len()) {
                        let directed: Vec<(usize, usize)> = tree
                            .iter()
                            .enumerate()
                            .map(|(b, &(u, v))| if mask >> b & 1 == 1 { (v, u) } else { (u, v) })
                            .collect();
                        let coords = theta_coords(&gd, &directed, &theta).unwrap();
                        if coords.iter().all(|&c| c > 0) {
                            expected.push(Support::from_edges(k, &directed));
                        }
                    }
                }
                expected.sort();
                assert_eq!(param.trees(), expected.as_slice(), "k={k} theta={theta:?}");
            }
        }
    }

    #[test]
    fn faces_verified() {
        for r in [
            MultMatrix::all_ones(2),
            MultMatrix::uniform(2, 2),
            MultMatrix::all_ones(3),
            MultMatrix::from_upper(3, &[2, 1, 2]).unwrap(),
            MultMatrix::all_ones(4),
        ] {
            let gd = build_gale(&r).unwrap();
            let lat = FaceLattice::enumerate(&r, Budget::DEFAULT).unwrap();
            let rep = verify_faces(&gd, &lat, 50, 9).unwrap();
            assert!(rep.ok(), "{r}: {:?}", rep.failures);
            assert_eq!(rep.faces_checked, lat.len());
            assert_eq!(rep.nonfaces_checked, 50);
        }
    }

    /// Bounded search for `m` with entries in `1..=bound` on the chosen copies
    /// and `sum m_i alpha_i = 0`.
    fn positive_relation(gd: &GaleData, chosen: &[usize], bound: i64) -> bool {
        if chosen.is_empty() {
            return true;
        }
        let n = gd.alphas().len();
        let mut digits = vec![1i64; chosen.len()];
        loop {
            let mut m = vec![0i64; n];
            for (d, &i) in digits.iter().zip(chosen) {
                m[i] = *d;
            }
            if gd.alpha_combination(&m).iter().all(|&x| x == 0) {
                return true;
            }
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return false;
                }
                if digits[pos] < bound {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 1;
                pos += 1;
            }
        }
    }

    #[test]
    fn labelled_subsets_match_lattice() {
        for r in [MultMatrix::all_ones(3), MultMatrix::uniform(2, 2), MultMatrix::from_upper(3, &[2, 1, 1]).unwrap()] {
            let gd = build_gale(&r).unwrap();
            let edges = gd.edges().unwrap().to_vec();
            let n = edges.len();
            let top = r.dim();
            let mut f = vec![0i64; (top + 2) as usize];
            for mask in 0u32..(1 << n) {
                let chosen: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let s = Support::from_edges(r.k(), &chosen.iter().map(|&i| edges[i]).collect::<Vec<_>>());
                let is_face = positive_relation(&gd, &chosen, n as i64);
                assert_eq!(is_face, s.is_naked(), "{r} subset {chosen:?}");
                if is_face {
                    let off: Vec<&[i64]> =
                        (0..n).filter(|i| mask >> i & 1 == 0).map(|i| gd.betas()[i].as_slice()).collect();
                    let dim = rank_i64(&off) as i64 - 1;
                    f[(dim + 1) as usize] += 1;
                }
            }
            let lat = FaceLattice::enumerate(&r, Budget::DEFAULT).unwrap();
            let expected: Vec<i64> = lat.f_vector_full().iter().map(|x| x.try_into().unwrap()).collect();
            assert_eq!(f, expected, "{r}");
        }
    }
}
