//! Exact linear algebra: rational row reduction, fraction-free (Bareiss)
//! elimination over big integers, a machine-integer rank with overflow
//! fallback, and ranks modulo a prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Dense matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, BigRational::from_integer(x.into()));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row || m.get(i, col).is_zero() {
                    continue;
                }
                let f = m.get(i, col).clone();
                for j in col..m.cols {
                    let v = m.get(i, j) - &f * m.get(row, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column, with a 1 in
    /// that column and zeros in the other free columns.
    pub fn nullspace(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `self * x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect()
    }
}

/// Rank by fraction-free Gaussian elimination over the integers.
pub fn rank_bigint(mut rows: Vec<Vec<BigInt>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            for j in col + 1..ncols {
                let v = &rows[rank][col] * &rows[i][j] - &rows[i][col] * &rows[rank][j];
                rows[i][j] = v / &prev;
            }
            rows[i][col] = BigInt::zero();
        }
        prev = rows[rank][col].clone();
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Determinant by Bareiss elimination.
pub fn det_bigint(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return BigInt::zero();
        };
        if p != col {
            m.swap(p, col);
            sign = -sign;
        }
        for i in col + 1..n {
            for j in col + 1..n {
                let v = &m[col][col] * &m[i][j] - &m[i][col] * &m[col][j];
                m[i][j] = v / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[col][col].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `2^61 - 1`.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Rank of an integer matrix reduced modulo the prime `p`. It never exceeds
/// the rational rank.
pub fn rank_mod_p(rows: &[Vec<BigInt>], p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|row| row.iter().map(|x| x.mod_floor(&pb).to_u64().expect("reduced")).collect())
        .collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for j in col..ncols {
            m[rank][j] = mul(m[rank][j], inv);
        }
        for i in rank + 1..m.len() {
            let f = m[i][col];
            if f == 0 {
                continue;
            }
            for j in col..ncols {
                let sub = mul(f, m[rank][j]);
                m[i][j] = (m[i][j] + p - sub) % p;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Exact rank of small integer rows. Rows that are unit vectors are taken
/// out first (their coordinates are then ignored in the remaining rows); the
/// rest is eliminated fraction-free in `i128`, falling back to big integers
/// on overflow.
pub fn rank_i64(rows: &[&[i64]]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut covered = vec![false; ncols];
    let mut unit_rank = 0;
    let mut dense: Vec<&[i64]> = Vec::new();
    for row in rows {
        let mut nz = row.iter().enumerate().filter(|(_, &x)| x != 0);
        match (nz.next(), nz.next()) {
            (None, _) => {}
            (Some((j, _)), None) => {
                if !covered[j] {
                    covered[j] = true;
                    unit_rank += 1;
                }
            }
            _ => dense.push(row),
        }
    }
    let keep: Vec<usize> = (0..ncols).filter(|&j| !covered[j]).collect();
    let reduced: Vec<Vec<i128>> =
        dense.iter().map(|row| keep.iter().map(|&j| row[j] as i128).collect()).collect();
    let rest = match rank_i128(reduced.clone()) {
        Some(r) => r,
        None => rank_bigint(
            reduced.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect(),
        ),
    };
    unit_rank + rest
}

/// Bareiss in `i128`; `None` on overflow.
fn rank_i128(mut rows: Vec<Vec<i128>>) -> Option<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev: i128 = 1;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            for j in col + 1..ncols {
                let a = rows[rank][col].checked_mul(rows[i][j])?;
                let b = rows[i][col].checked_mul(rows[rank][j])?;
                rows[i][j] = a.checked_sub(b)? / prev;
            }
            rows[i][col] = 0;
        }
        prev = rows[rank][col];
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Some(rank)
}

/// Rational vector scaled to the primitive integer vector with the same
/// direction (the sign of the first nonzero entry is kept).
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn is_integral(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(det_bigint(big(&[vec![2, 1], vec![1, 3]])), BigInt::from(5));
        assert_eq!(det_bigint(big(&[vec![0, 1], vec![1, 0]])), BigInt::from(-1));
        assert_eq!(det_bigint(big(&[vec![1, 2], vec![2, 4]])), BigInt::zero());
    }

    #[test]
    fn nullspace_and_solve() {
        let m = RationalMatrix::from_i64_rows(&[vec![1, -1, 0], vec![0, 1, -1]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(Zero::is_zero));
        let b: Vec<BigRational> = [1, 1].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
        let bad = RationalMatrix::from_i64_rows(&[vec![1, 1], vec![2, 2]]);
        let rhs: Vec<BigRational> = [1, 3].iter().map(|&x| BigRational::from_integer(x.into())).collect();
        assert!(bad.solve(&rhs).is_none());
    }

    #[test]
    fn overflow_falls_back() {
        let huge = 1i64 << 62;
        let rows: Vec<Vec<i64>> =
            vec![vec![huge, huge - 1, 3], vec![huge - 1, huge, 5], vec![7, huge, huge - 3]];
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        assert_eq!(rank_i64(&refs), RationalMatrix::from_i64_rows(&rows).rank());
    }

    fn arb_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-3i64..4, c), r)
        })
    }

    proptest! {
        #[test]
        fn ranks_agree(rows in arb_matrix()) {
            let exact = RationalMatrix::from_i64_rows(&rows).rank();
            prop_assert_eq!(rank_bigint(big(&rows)), exact);
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            prop_assert_eq!(rank_i64(&refs), exact);
            for p in [MERSENNE_61, 1_000_000_007, 998_244_353] {
                prop_assert_eq!(rank_mod_p(&big(&rows), p), exact);
            }
        }

        #[test]
        fn square_determinant_matches_rank(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 4)) {
            let singular = det_bigint(big(&rows)).is_zero();
            prop_assert_eq!(singular, RationalMatrix::from_i64_rows(&rows).rank() < 4);
        }
    }
}
