//! Exact combinatorics of Gale dual type-A root polytopes with multiplicities.
//!
//! The instance is a symmetric matrix of positive multiplicities `r_ij` on the
//! complete graph with `k` vertices. Everything (faces, g/h-polynomials, fibers of
//! the resolution, the ring of root products) is computed from sub-multigraphs of
//! the complete directed multigraph, with exact integer arithmetic throughout.

pub mod betti;
pub mod error;
pub mod geometry;
pub mod graphs;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod ringstr;

pub use error::{Error, Result};
pub use graphs::{MultMatrix, SubMultigraph};
pub use poly::IntPoly;

/// Cap on the number of enumeration steps a single computation may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Budget {
    pub const DEFAULT: Budget = Budget(1 << 30);
    pub const UNLIMITED: Budget = Budget(u64::MAX);

    pub fn check(self, used: u64) -> Result<()> {
        if used > self.0 {
            Err(Error::BudgetExceeded { budget: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}
