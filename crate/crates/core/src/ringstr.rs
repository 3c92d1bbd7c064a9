//! Graded presentation of the fiber cohomology ring by products of roots over
//! two-block partitions, and its Hilbert function by degreewise exact ranks.
//!
//! Coordinates are `x_i = e_i - e_k` for `i < k`, so `e_i - e_j = x_i - x_j`
//! with `x_k = 0`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::betti::g_poly_recursive;
use crate::error::Result;
use crate::graphs::MultMatrix;
use crate::linalg::{rank_bigint, rank_mod_p, MERSENNE_61};
use crate::poly::IntPoly;
use crate::Budget;

/// Homogeneous polynomial in `x_1..x_{k-1}`: exponent vector to coefficient.
pub type MultiPoly = BTreeMap<Vec<u32>, BigInt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    /// Block containing the first vertex, then its complement (0-based).
    pub partition: (Vec<usize>, Vec<usize>),
    pub degree: usize,
    pub poly: MultiPoly,
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let one_based = |b: &[usize]| b.iter().map(|v| v + 1).collect::<Vec<_>>();
        let mut st = s.serialize_struct("Relation", 2)?;
        st.serialize_field("partition", &[one_based(&self.partition.0), one_based(&self.partition.1)])?;
        st.serialize_field("degree", &self.degree)?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedPresentation {
    pub num_vars: usize,
    pub relations: Vec<Relation>,
}

fn multiply(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            let entry = out.entry(e).or_insert_with(BigInt::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `e_i - e_j` in the x coordinates.
fn root_form(vars: usize, i: usize, j: usize) -> MultiPoly {
    let mut p = MultiPoly::new();
    let unit = |v: usize| {
        let mut e = vec![0u32; vars];
        e[v] = 1;
        e
    };
    if i < vars {
        p.insert(unit(i), BigInt::one());
    }
    if j < vars {
        p.insert(unit(j), -BigInt::one());
    }
    p
}

/// One relation per unordered partition of the vertices into two nonempty
/// blocks: the product of `(e_i - e_j)^{r_ij}` over pairs across the cut.
pub fn build_relations(r: &MultMatrix) -> GradedPresentation {
    let k = r.k();
    let vars = k.saturating_sub(1);
    let mut relations = Vec::new();
    for mask in 1u32..(1 << (k - 1)) {
        let second: Vec<usize> = (1..k).filter(|v| mask >> (v - 1) & 1 == 1).collect();
        let first: Vec<usize> = (0..k).filter(|v| !second.contains(v)).collect();
        let mut poly = MultiPoly::from([(vec![0u32; vars], BigInt::one())]);
        let mut degree = 0;
        for &i in &first {
            for &j in &second {
                let form = root_form(vars, i, j);
                for _ in 0..r.r(i, j) {
                    poly = multiply(&poly, &form);
                }
                degree += r.r(i, j) as usize;
            }
        }
        relations.push(Relation { partition: (first, second), degree, poly });
    }
    GradedPresentation { num_vars: vars, relations }
}

/// Exponent vectors of all monomials of degree `m` in `vars` variables.
pub fn monomials(vars: usize, m: usize) -> Vec<Vec<u32>> {
    fn rec(vars: usize, m: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == vars {
            prefix.push(m);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=m).rev() {
            prefix.push(e);
            rec(vars, m - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if vars == 0 {
        if m == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(vars, m as u32, &mut Vec::new(), &mut out);
    out
}

/// Matrix whose rows are the degree-`m` multiples `u * p` of the relations.
fn degree_matrix(gp: &GradedPresentation, m: usize) -> (Vec<Vec<BigInt>>, usize) {
    let cols = monomials(gp.num_vars, m);
    let index: HashMap<&[u32], usize> = cols.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
    let mut rows = Vec::new();
    for rel in gp.relations.iter().filter(|rel| rel.degree <= m) {
        for u in monomials(gp.num_vars, m - rel.degree) {
            let mut row = vec![BigInt::zero(); cols.len()];
            for (e, c) in &rel.poly {
                let prod: Vec<u32> = e.iter().zip(&u).map(|(a, b)| a + b).collect();
                row[index[prod.as_slice()]] = c.clone();
            }
            rows.push(row);
        }
    }
    (rows, cols.len())
}

const FAST_PRIMES: [u64; 2] = [MERSENNE_61, 4_611_686_018_427_387_847];

/// Exact rank. A modular rank never exceeds the rational one, so a full rank
/// modulo a prime is conclusive; anything else is settled by Bareiss.
pub fn exact_rank(rows: &[Vec<BigInt>], cols: usize) -> usize {
    let full = rows.len().min(cols);
    if full == 0 {
        return 0;
    }
    if FAST_PRIMES.iter().any(|&p| rank_mod_p(rows, p) == full) {
        return full;
    }
    rank_bigint(rows.to_vec())
}

/// `sum_m (dim Sym^m - rank of the relation multiples in degree m) t^m` for
/// `m <= max_deg`.
pub fn hilbert_function(gp: &GradedPresentation, max_deg: usize, budget: Budget) -> Result<IntPoly> {
    let dims: Vec<Result<u64>> = (0..=max_deg)
        .into_par_iter()
        .map(|m| {
            let ncols = monomials(gp.num_vars, m).len() as u64;
            let nrows: u64 = gp
                .relations
                .iter()
                .filter(|rel| rel.degree <= m)
                .map(|rel| monomials(gp.num_vars, m - rel.degree).len() as u64)
                .sum();
            budget.check(ncols.saturating_mul(nrows))?;
            let (rows, cols) = degree_matrix(gp, m);
            Ok((cols - exact_rank(&rows, cols)) as u64)
        })
        .collect();
    let dims = dims.into_iter().collect::<Result<Vec<u64>>>()?;
    Ok(IntPoly::from_u64s(&dims))
}

#[derive(Clone, Debug, Serialize)]
pub struct RingReport {
    pub relations: Vec<Relation>,
    pub hilbert: IntPoly,
    pub g: IntPoly,
    pub matches_g: bool,
}

impl RingReport {
    /// Degreewise differences `hilbert - g`, listed where nonzero.
    pub fn diff(&self) -> Vec<(usize, BigInt)> {
        let top = self.hilbert.coeffs().len().max(self.g.coeffs().len());
        (0..top)
            .map(|i| (i, self.hilbert.coeff(i) - self.g.coeff(i)))
            .filter(|(_, d)| !d.is_zero())
            .collect()
    }
}

/// Hilbert function up to one past the degree of g, compared with g.
pub fn compare_to_g(r: &MultMatrix, budget: Budget) -> Result<RingReport> {
    let g = g_poly_recursive(r);
    let gp = build_relations(r);
    let max_deg = g.degree().unwrap_or(0) + 1;
    let hilbert = hilbert_function(&gp, max_deg, budget)?;
    let matches_g = hilbert == g;
    Ok(RingReport { relations: gp.relations, hilbert, g, matches_g })
}
