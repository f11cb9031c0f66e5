//! Vertex-label groups.
//!
//! Labels live in `Z2` (spins, written multiplicatively as ±1) or a cyclic
//! group `Z/kZ`. Edge observations depend on the difference of the endpoint
//! labels; for `Z2` the difference is the spin product. The information
//! bounds apply to `Z2` only; larger groups exist for counterexample models.

use alloc::string::String;
use alloc::{format, vec::Vec};
use core::fmt;

/// The label group of a synchronization model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupSpec {
    /// Spins in {+1, -1}; element 0 is +1, element 1 is -1.
    Z2,
    /// The cyclic group Z/kZ, k >= 2, elements 0..k.
    Zk(u32),
}

impl GroupSpec {
    pub fn order(&self) -> usize {
        match self {
            GroupSpec::Z2 => 2,
            GroupSpec::Zk(k) => *k as usize,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.order() == 2
    }

    /// Difference of elements `a - b` mod k. For `Z2` this is the product of
    /// the corresponding spins (0 <-> +1, 1 <-> -1).
    #[inline]
    pub fn diff(&self, a: usize, b: usize) -> usize {
        let k = self.order();
        (a + k - b) % k
    }

    /// Display name of an element, `+1`/`-1` for spins.
    pub fn element_name(&self, g: usize) -> String {
        match self {
            GroupSpec::Z2 => String::from(if g == 0 { "+1" } else { "-1" }),
            GroupSpec::Zk(_) => format!("{g}"),
        }
    }

    /// Spin value ±1 of an element; only meaningful for binary groups.
    #[inline]
    pub fn spin_sign(&self, g: usize) -> i64 {
        if g == 0 {
            1
        } else {
            -1
        }
    }

    /// Parses "Z2", "Z4", ... as written in model files.
    pub fn parse(s: &str) -> Option<GroupSpec> {
        let rest = s.strip_prefix('Z')?;
        let k: u32 = rest.parse().ok()?;
        if k < 2 {
            return None;
        }
        Some(if k == 2 { GroupSpec::Z2 } else { GroupSpec::Zk(k) })
    }

    /// Row keys for the model file format, in canonical order.
    pub fn row_keys(&self) -> Vec<String> {
        (0..self.order()).map(|g| self.element_name(g)).collect()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Z2 => write!(f, "Z2"),
            GroupSpec::Zk(k) => write!(f, "Z{k}"),
        }
    }
}
