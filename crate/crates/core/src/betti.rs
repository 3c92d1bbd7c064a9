//! g- and h-polynomials of the polytope of an instance, by counting rooted
//! sub-multigraphs and by the two subset/partition recursions.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::graphs::{binomial, count_weighted, without_root_out_edges, MultMatrix, PairWeights, Support};
use crate::poly::{p_poly, IntPoly};
use crate::Budget;

/// `ĝ_i` = number of labelled acyclic spanning sub-multigraphs of `K_k(R)`
/// without out-edges of vertex 1, rooted at vertex 1, with `k - 1 + i` edges.
pub fn g_hat(r: &MultMatrix, budget: Budget) -> Result<IntPoly> {
    let k = r.k();
    let weights = PairWeights::with_floor(r, &without_root_out_edges(k), 1);
    let counts = count_weighted(
        &weights,
        |s| s.is_rooted_at(0) && s.is_acyclic(),
        Support::has_cycle,
        budget,
    )?;
    counts.div_t_power(k - 1)
}

pub fn g_poly(r: &MultMatrix, budget: Budget) -> Result<IntPoly> {
    Ok(g_hat(r, budget)?.shift(-1))
}

/// `ĥ_i` = number of labelled spanning sub-multigraphs of `K_k(R)` rooted at
/// vertex 1 that contain a directed cycle, with `k + i` edges.
pub fn h_hat(r: &MultMatrix, budget: Budget) -> Result<IntPoly> {
    let k = r.k();
    if k < 2 {
        return Err(Error::InvalidInput("h_hat needs at least two vertices".into()));
    }
    let weights = PairWeights::with_floor(r, &Support::complete(k), 1);
    let counts = count_weighted(&weights, |s| s.is_rooted_at(0) && s.has_cycle(), |_| false, budget)?;
    counts.div_t_power(k)
}

/// For a single vertex the h-polynomial is `1` by convention.
pub fn h_poly(r: &MultMatrix, budget: Budget) -> Result<IntPoly> {
    if r.k() == 1 {
        return Ok(IntPoly::one());
    }
    Ok(h_hat(r, budget)?.shift(-1))
}

/// Inclusion–exclusion over the set `J` of vertices whose every out-edge
/// leaves the remaining set, memoized by vertex subset.
pub fn g_poly_recursive(r: &MultMatrix) -> IntPoly {
    let mut memo = HashMap::new();
    let all = ((1u32 << r.k()) - 1) as u16;
    g_rec(r, all, &mut memo)
}

fn g_rec(r: &MultMatrix, set: u16, memo: &mut HashMap<u16, IntPoly>) -> IntPoly {
    if set.count_ones() == 1 {
        return IntPoly::one();
    }
    if let Some(p) = memo.get(&set) {
        return p.clone();
    }
    let others = set & !1;
    let mut total = IntPoly::zero();
    // nonempty submasks of `others`
    let mut sub = others;
    while sub != 0 {
        let rest = set & !sub;
        let mut term = g_rec(r, rest, memo);
        for j in mask_bits(sub) {
            let into_rest: u32 = mask_bits(rest).map(|i| r.r(i, j)).sum();
            term = &term * &p_poly(into_rest as usize);
        }
        if sub.count_ones() % 2 == 1 {
            total += &term;
        } else {
            total = &total - &term;
        }
        sub = (sub - 1) & others;
    }
    memo.insert(set, total.clone());
    total
}

/// `prod_i p(r_i, t)` minus the contributions of all set partitions into at
/// least two blocks of size at least two, memoized by vertex subset.
pub fn h_poly_recursive(r: &MultMatrix) -> IntPoly {
    let mut memo = HashMap::new();
    let all = ((1u32 << r.k()) - 1) as u16;
    h_rec(r, all, &mut memo)
}

fn h_rec(r: &MultMatrix, set: u16, memo: &mut HashMap<u16, IntPoly>) -> IntPoly {
    if set.count_ones() == 1 {
        return IntPoly::one();
    }
    if let Some(p) = memo.get(&set) {
        return p.clone();
    }
    let verts: Vec<usize> = mask_bits(set).collect();
    let mut total = IntPoly::one();
    for &i in &verts {
        let ri: u32 = verts.iter().filter(|&&j| j != i).map(|&j| r.r(i, j)).sum();
        total = &total * &p_poly(ri as usize);
    }
    let mut blocks_list: Vec<Vec<u16>> = Vec::new();
    for_each_partition_min_block(verts.len(), 2, |labels, nblocks| {
        if nblocks < 2 {
            return;
        }
        let mut blocks = vec![0u16; nblocks];
        for (pos, &b) in labels.iter().enumerate() {
            blocks[b] |= 1 << verts[pos];
        }
        blocks_list.push(blocks);
    });
    for blocks in blocks_list {
        let mut cross = 0usize;
        for (a, &ba) in blocks.iter().enumerate() {
            for &bb in &blocks[a + 1..] {
                for i in mask_bits(ba) {
                    for j in mask_bits(bb) {
                        cross += r.r(i, j) as usize;
                    }
                }
            }
        }
        let mut term = IntPoly::monomial(1, cross);
        for b in blocks {
            term = &term * &h_rec(r, b, memo);
        }
        total = &total - &term;
    }
    memo.insert(set, total.clone());
    total
}

fn mask_bits(m: u16) -> impl Iterator<Item = usize> {
    crate::graphs::bits(m)
}

/// Calls `f(labels, block_count)` for every set partition of `{0..m}` whose
/// blocks all have at least `min_block` elements, as restricted growth strings.
pub fn for_each_partition_min_block(m: usize, min_block: usize, mut f: impl FnMut(&[usize], usize)) {
    if m == 0 {
        f(&[], 0);
        return;
    }
    let mut labels = vec![0usize; m];
    let mut sizes = vec![0usize; m];
    rgs(0, 0, m, min_block, &mut labels, &mut sizes, &mut f);
}

fn rgs(
    pos: usize,
    nblocks: usize,
    m: usize,
    min_block: usize,
    labels: &mut [usize],
    sizes: &mut [usize],
    f: &mut impl FnMut(&[usize], usize),
) {
    // elements still needed to bring every open block up to the minimum
    let deficit: usize = sizes[..nblocks].iter().map(|&s| min_block.saturating_sub(s)).sum();
    if deficit > m - pos {
        return;
    }
    if pos == m {
        f(labels, nblocks);
        return;
    }
    for b in 0..=nblocks {
        labels[pos] = b;
        sizes[b] += 1;
        rgs(pos + 1, nblocks.max(b + 1), m, min_block, labels, sizes, f);
        sizes[b] -= 1;
    }
}

/// The g-polynomial of the all-ones instance on `k` vertices, from the
/// binomial recursion over the size of the removed set.
pub fn intro_g(k: usize) -> IntPoly {
    assert!(k >= 1);
    let mut g: Vec<IntPoly> = vec![IntPoly::zero(), IntPoly::one()];
    for m in 2..=k {
        let mut total = IntPoly::zero();
        for j in 1..m {
            let term = p_poly(m - j).pow(j as u32).scale(&binomial((m - 1) as u64, j as u64));
            let term = &term * &g[m - j];
            if j % 2 == 1 {
                total += &term;
            } else {
                total = &total - &term;
            }
        }
        g.push(total);
    }
    g[k].clone()
}

/// The h-polynomial of the all-ones instance on `k` vertices, from the
/// recursion over integer partitions of `k` into parts of size at least two.
pub fn intro_h(k: usize) -> IntPoly {
    assert!(k >= 1);
    let mut h: Vec<IntPoly> = vec![IntPoly::zero(), IntPoly::one()];
    for m in 2..=k {
        let mut total = p_poly(m - 1).pow(m as u32);
        for parts in integer_partitions(m, 2) {
            if parts.len() < 2 {
                continue;
            }
            // number of set partitions with these block sizes
            let mut count = factorial(m);
            for &p in &parts {
                count /= factorial(p);
            }
            let mut runs: HashMap<usize, usize> = HashMap::new();
            for &p in &parts {
                *runs.entry(p).or_default() += 1;
            }
            for &mult in runs.values() {
                count /= factorial(mult);
            }
            let mut cross = 0;
            for a in 0..parts.len() {
                for b in a + 1..parts.len() {
                    cross += parts[a] * parts[b];
                }
            }
            let mut term = IntPoly::monomial(count, cross);
            for &p in &parts {
                term = &term * &h[p];
            }
            total = &total - &term;
        }
        h.push(total);
    }
    h[k].clone()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Non-increasing integer partitions of `n` with all parts at least `min`.
fn integer_partitions(n: usize, min: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (min..=max.min(n)).rev() {
            cur.push(p);
            go(n - p, p, min, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, min, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64s(c)
    }

    fn ones(k: usize) -> MultMatrix {
        MultMatrix::all_ones(k)
    }

    #[test]
    fn g_hat_examples() {
        let b = Budget::DEFAULT;
        assert_eq!(g_hat(&ones(3), b).unwrap(), p(&[3, 2]));
        assert_eq!(g_hat(&ones(2), b).unwrap(), p(&[1]));
        assert_eq!(g_hat(&ones(1), b).unwrap(), p(&[1]));
    }

    #[test]
    fn g_poly_examples() {
        let b = Budget::DEFAULT;
        assert_eq!(g_poly(&ones(3), b).unwrap(), p(&[1, 2]));
        assert_eq!(g_poly(&MultMatrix::uniform(2, 2), b).unwrap(), p(&[1, 1]));
        assert_eq!(g_poly(&ones(1), b).unwrap(), p(&[1]));
    }

    #[test]
    fn h_hat_examples() {
        let b = Budget::DEFAULT;
        assert_eq!(h_hat(&ones(3), b).unwrap().shift(-1), p(&[1, 3, 3, 1]));
        assert_eq!(h_hat(&ones(2), b).unwrap(), p(&[1]));
        assert!(h_hat(&ones(1), b).is_err());
    }

    #[test]
    fn h_poly_small_cases() {
        let b = Budget::DEFAULT;
        for r in 1..=5u32 {
            let h = h_poly(&MultMatrix::uniform(2, r), b).unwrap();
            assert_eq!(h, p_poly(r as usize).pow(2));
        }
        let r = MultMatrix::from_upper(3, &[2, 1, 3]).unwrap();
        let expected = &(&p_poly(3) * &p_poly(5)) * &p_poly(4);
        assert_eq!(h_poly(&r, b).unwrap(), expected);
    }

    #[test]
    fn recursions_match_counts() {
        let b = Budget::DEFAULT;
        assert_eq!(g_poly_recursive(&ones(3)), p(&[1, 2]));
        assert_eq!(g_poly_recursive(&ones(1)), p(&[1]));
        assert_eq!(h_poly_recursive(&ones(3)), p(&[1, 3, 3, 1]));
        for k in 2..=4 {
            let pairs = k * (k - 1) / 2;
            for code in 0..(1u32 << pairs) {
                let upper: Vec<u32> = (0..pairs).map(|i| 1 + (code >> i & 1)).collect();
                let r = MultMatrix::from_upper(k, &upper).unwrap();
                assert_eq!(g_poly_recursive(&r), g_poly(&r, b).unwrap(), "{r}");
                assert_eq!(h_poly_recursive(&r), h_poly(&r, b).unwrap(), "{r}");
            }
        }
    }

    #[test]
    fn all_ones_closed_forms() {
        assert_eq!(intro_g(1), p(&[1]));
        assert_eq!(intro_g(3), p(&[1, 2]));
        assert_eq!(intro_h(3), p(&[1, 3, 3, 1]));
        for k in 1..=8 {
            assert_eq!(intro_g(k), g_poly_recursive(&ones(k)), "k={k}");
            assert_eq!(intro_h(k), h_poly_recursive(&ones(k)), "k={k}");
        }
    }

    fn bell_oracle(m: usize, min: usize) -> usize {
        // brute force over all label functions, keeping canonical ones
        let mut count = 0;
        let total = m.pow(m as u32);
        for code in 0..total {
            let labels: Vec<usize> = (0..m).map(|i| code / m.pow(i as u32) % m).collect();
            let mut next = 0;
            let canonical = labels.iter().all(|&l| {
                if l == next {
                    next += 1;
                    true
                } else {
                    l < next
                }
            });
            if canonical && (0..next).all(|b| labels.iter().filter(|&&l| l == b).count() >= min) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn partition_enumeration() {
        for m in 1..=6 {
            for min in 1..=3 {
                let mut n = 0;
                for_each_partition_min_block(m, min, |labels, nb| {
                    assert_eq!(labels.len(), m);
                    assert_eq!(*labels.iter().max().unwrap() + 1, nb);
                    n += 1;
                });
                assert_eq!(n, bell_oracle(m, min), "m={m} min={min}");
            }
        }
        // no partition of a 3-set into at least two blocks of size at least two
        let mut found = false;
        for_each_partition_min_block(3, 2, |_, nb| found |= nb >= 2);
        assert!(!found);
    }

    #[test]
    fn h_is_palindromic_of_full_degree() {
        for k in 2..=6 {
            let h = intro_h(k);
            assert!(h.is_palindromic());
            assert_eq!(h.degree(), Some(k * (k - 2)));
        }
    }
}
