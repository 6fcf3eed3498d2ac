use crate::error::{invalid, Result};

/// Which factor of a bipartite space to keep or address.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Bijection between a composite index `k` and a pair `(a, b)`, with
/// `k = a * dim_b + b`, matching the Kronecker product `A ⊗ B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BipartiteIndexer {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteIndexer {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(invalid(format!(
                "bipartite dimensions must be positive, got {dim_a}x{dim_b}"
            )));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn side_dim(&self, side: Side) -> usize {
        match side {
            Side::A => self.dim_a,
            Side::B => self.dim_b,
        }
    }

    #[inline]
    pub fn index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.dim_a && b < self.dim_b);
        a * self.dim_b + b
    }

    #[inline]
    pub fn split(&self, k: usize) -> (usize, usize) {
        debug_assert!(k < self.dim());
        (k / self.dim_b, k % self.dim_b)
    }
}
