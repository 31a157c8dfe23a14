//! The pair `(d, n)` and its derived constants.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest dimension accepted; `2^d` corners per cell must stay addressable.
pub const MAX_DIMENSION: u32 = 16;

/// Dimension `d >= 2` and branch length `n >= 2` of the Vicsek set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    d: u32,
    n: u32,
}

impl Params {
    pub fn new(d: u32, n: u32) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParams(format!("d must satisfy d >= 2 (got d = {d})")));
        }
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must satisfy n >= 2 (got n = {n})")));
        }
        if d > MAX_DIMENSION {
            return Err(Error::InvalidParams(format!(
                "d must satisfy d <= {MAX_DIMENSION} (got d = {d})"
            )));
        }
        if n > 1 << 20 {
            return Err(Error::InvalidParams(format!("n = {n} is too large")));
        }
        Ok(Params { d, n })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of cube corners, `2^d`.
    pub fn corners(&self) -> usize {
        1usize << self.d
    }

    /// `N = 2^d - 1`, the degree of a nonjunction vertex.
    pub fn big_n(&self) -> u64 {
        (1u64 << self.d) - 1
    }

    /// Number of distinct contractions, `2^d n - 2^d + 1`.
    pub fn cell_count(&self) -> usize {
        self.corners() * (self.n as usize - 1) + 1
    }

    /// Inverse contraction ratio `2n - 1`.
    pub fn ratio(&self) -> u64 {
        2 * self.n as u64 - 1
    }

    /// `2^d / (2^d - 1)`.
    pub fn top_value(&self) -> f64 {
        self.corners() as f64 / self.big_n() as f64
    }

    pub fn top_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.corners()), BigInt::from(self.big_n()))
    }

    /// `#V_m = K^m (2^d - 1) + 1`, or `None` on overflow.
    pub fn vertex_count(&self, m: u32) -> Option<u128> {
        (self.cell_count() as u128)
            .checked_pow(m)?
            .checked_mul(self.big_n() as u128)?
            .checked_add(1)
    }

    /// `#E_m = C(2^d, 2) K^m`, or `None` on overflow.
    pub fn edge_count(&self, m: u32) -> Option<u128> {
        let c = self.corners() as u128;
        (self.cell_count() as u128).checked_pow(m)?.checked_mul(c * (c - 1) / 2)
    }

    /// `#(V_m \ V_0)`.
    pub fn interior_count(&self, m: u32) -> Option<u128> {
        self.vertex_count(m)?.checked_sub(self.corners() as u128)
    }

    /// `t = 1 - N lambda`.
    pub fn t_of(&self, lambda: f64) -> f64 {
        1.0 - self.big_n() as f64 * lambda
    }
}

impl std::fmt::Display for Params {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(d={}, n={})", self.d, self.n)
    }
}
