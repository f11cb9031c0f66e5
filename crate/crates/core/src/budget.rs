//! Resource caps for the exact paths.
//!
//! Exact enumeration, path listing and subset percolation are all
//! exponential; each refuses inputs beyond a configurable cap instead of
//! silently taking unbounded time.

use alloc::string::String;
use core::fmt;

/// Caps for enumeration-backed operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budgets {
    /// Cap on k^|V| * prod_e |alphabet_e| for exact enumeration.
    pub max_states: u128,
    /// Cap on the number of enumerated self-avoiding paths.
    pub max_paths: u64,
    /// Cap on |E| for exact subset percolation (2^|E| patterns).
    pub max_subset_edges: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            max_states: 1 << 26,
            max_paths: 1_000_000,
            max_subset_edges: 24,
        }
    }
}

/// A cap was exceeded; carries what was requested vs. allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetExceeded {
    pub what: String,
    pub needed: u128,
    pub allowed: u128,
}

impl fmt::Display for BudgetExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "budget exceeded for {}: needs {} but cap is {}",
            self.what, self.needed, self.allowed
        )
    }
}

impl core::error::Error for BudgetExceeded {}
