//! Edge observation channels and their algebra.
//!
//! A [`Channel`] is a finite-output conditional law: one probability row per
//! group element, giving the law of the observation when the endpoint-label
//! difference equals that element. For spins the two rows are the laws given
//! product +1 and product -1.
//!
//! The algebra mirrors how observations combine in a two-terminal model:
//!
//! - series composition marginalizes a shared uniform middle spin, so the
//!   chi-squared information of the composite is the product of the factors;
//! - parallel product is two conditionally independent observations of the
//!   same spin;
//! - output merging collapses symbols with proportional likelihood columns
//!   (a sufficient-statistic reduction that preserves every f-information).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_traits::{One, Zero};

use crate::group::GroupSpec;
use crate::rational::{check_distribution, is_probability, rat, DistributionError, Rational};

/// Finite-output channel on a group-valued input difference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    input: GroupSpec,
    alphabet: Vec<String>,
    /// rows[g][y] = P(observation = alphabet[y] | input difference = g)
    rows: Vec<Vec<Rational>>,
}

/// Channel construction / combination failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChannelError {
    RowCountMismatch { expected: usize, got: usize },
    RowLengthMismatch { row: usize },
    DuplicateSymbol(String),
    BadRow { row: usize, err: DistributionError },
    ProbabilityOutOfRange(String),
    GroupMismatch,
    NotBinaryInput,
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::RowCountMismatch { expected, got } => {
                write!(f, "channel needs {expected} rows, got {got}")
            }
            ChannelError::RowLengthMismatch { row } => {
                write!(f, "row {row} length differs from alphabet size")
            }
            ChannelError::DuplicateSymbol(s) => write!(f, "duplicate output symbol `{s}`"),
            ChannelError::BadRow { row, err } => write!(f, "row {row}: {err}"),
            ChannelError::ProbabilityOutOfRange(what) => {
                write!(f, "probability out of [0,1]: {what}")
            }
            ChannelError::GroupMismatch => write!(f, "channels have different input groups"),
            ChannelError::NotBinaryInput => write!(f, "operation requires a binary-input channel"),
        }
    }
}

impl core::error::Error for ChannelError {}

impl Channel {
    /// Validates and builds a channel. Rows are indexed by group element.
    pub fn new(
        input: GroupSpec,
        alphabet: Vec<String>,
        rows: Vec<Vec<Rational>>,
    ) -> Result<Channel, ChannelError> {
        let k = input.order();
        if rows.len() != k {
            return Err(ChannelError::RowCountMismatch {
                expected: k,
                got: rows.len(),
            });
        }
        let mut seen = BTreeMap::new();
        for (i, s) in alphabet.iter().enumerate() {
            if seen.insert(s.clone(), i).is_some() {
                return Err(ChannelError::DuplicateSymbol(s.clone()));
            }
        }
        for (g, row) in rows.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(ChannelError::RowLengthMismatch { row: g });
            }
            check_distribution(row).map_err(|err| ChannelError::BadRow { row: g, err })?;
        }
        Ok(Channel {
            input,
            alphabet,
            rows,
        })
    }

    pub fn input_group(&self) -> GroupSpec {
        self.input
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn alphabet_len(&self) -> usize {
        self.alphabet.len()
    }

    /// P(symbol index `y` | group element `g`).
    #[inline]
    pub fn prob(&self, g: usize, y: usize) -> &Rational {
        &self.rows[g][y]
    }

    pub fn row(&self, g: usize) -> &[Rational] {
        &self.rows[g]
    }

    /// Likelihood column of symbol `y`: (P(y|g))_g.
    pub fn column(&self, y: usize) -> Vec<Rational> {
        self.rows.iter().map(|r| r[y].clone()).collect()
    }

    /// Output law under a uniform input.
    pub fn output_law_uniform(&self, y: usize) -> Rational {
        let k = Rational::from_integer(self.input.order().into());
        let mut s = Rational::zero();
        for row in &self.rows {
            s += &row[y];
        }
        s / k
    }

    /// True iff the output law does not depend on the input.
    pub fn is_independent(&self) -> bool {
        self.rows.iter().skip(1).all(|row| *row == self.rows[0])
    }

    /// Series composition of binary-input channels: the joint law of the two
    /// observations given the product of the outer spins, the shared middle
    /// spin marginalized uniformly.
    ///
    /// Q'((a,b) | s) = 1/2 * sum_w q1(a | s*w) * q2(b | w).
    pub fn compose_series(&self, other: &Channel) -> Result<Channel, ChannelError> {
        if !self.input.is_binary() || !other.input.is_binary() {
            return Err(ChannelError::NotBinaryInput);
        }
        if self.input != other.input {
            return Err(ChannelError::GroupMismatch);
        }
        let half = rat(1, 2);
        let mut alphabet = Vec::with_capacity(self.alphabet.len() * other.alphabet.len());
        let mut rows = vec![Vec::new(), Vec::new()];
        for (a, sa) in self.alphabet.iter().enumerate() {
            for (b, sb) in other.alphabet.iter().enumerate() {
                alphabet.push(format!("({sa},{sb})"));
                for s in 0..2usize {
                    // w ranges over {+1,-1} = elements {0,1}; s*w in group terms is s xor w
                    let mut p = Rational::zero();
                    for w in 0..2usize {
                        p += self.prob(s ^ w, a) * other.prob(w, b);
                    }
                    rows[s].push(p * &half);
                }
            }
        }
        Channel::new(self.input, alphabet, rows)
    }

    /// Parallel product: two conditionally independent observations of the
    /// same input. Works for any shared input group.
    ///
    /// Q'((a,b) | g) = q1(a | g) * q2(b | g).
    pub fn product_parallel(&self, other: &Channel) -> Result<Channel, ChannelError> {
        if self.input != other.input {
            return Err(ChannelError::GroupMismatch);
        }
        let k = self.input.order();
        let mut alphabet = Vec::with_capacity(self.alphabet.len() * other.alphabet.len());
        let mut rows = vec![Vec::new(); k];
        for (a, sa) in self.alphabet.iter().enumerate() {
            for (b, sb) in other.alphabet.iter().enumerate() {
                alphabet.push(format!("({sa},{sb})"));
                for (g, row) in rows.iter_mut().enumerate() {
                    row.push(self.prob(g, a) * other.prob(g, b));
                }
            }
        }
        Channel::new(self.input, alphabet, rows)
    }

    /// Sufficient-statistic reduction: merges outputs whose likelihood
    /// columns are proportional, dropping symbols of zero mass. Preserves
    /// every f-mutual information computed downstream; idempotent.
    pub fn merge_equivalent_outputs(&self) -> Channel {
        let k = self.input.order();
        // class key = column normalized to sum 1; first-occurrence order kept
        let mut class_of: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
        let mut order: Vec<(String, Vec<Rational>)> = Vec::new();
        for y in 0..self.alphabet.len() {
            let col = self.column(y);
            let mass: Rational = col.iter().cloned().sum();
            if mass.is_zero() {
                continue;
            }
            let key: Vec<Rational> = col.iter().map(|p| p / &mass).collect();
            match class_of.get(&key) {
                Some(&idx) => {
                    for (g, p) in col.iter().enumerate() {
                        order[idx].1[g] += p;
                    }
                }
                None => {
                    class_of.insert(key, order.len());
                    order.push((self.alphabet[y].clone(), col));
                }
            }
        }
        let alphabet: Vec<String> = order.iter().map(|(s, _)| s.clone()).collect();
        let mut rows = vec![Vec::with_capacity(alphabet.len()); k];
        for (_, col) in &order {
            for (g, row) in rows.iter_mut().enumerate() {
                row.push(col[g].clone());
            }
        }
        Channel::new(self.input, alphabet, rows).expect("merge preserves validity")
    }

    /// Canonical representative up to output relabeling: merge, then sort
    /// symbols by likelihood column and rename them 0, 1, ...
    pub fn canonical_form(&self) -> Channel {
        let merged = self.merge_equivalent_outputs();
        let mut cols: Vec<Vec<Rational>> = (0..merged.alphabet.len())
            .map(|y| merged.column(y))
            .collect();
        cols.sort();
        let alphabet = (0..cols.len()).map(|i| format!("{i}")).collect();
        let mut rows = vec![Vec::with_capacity(cols.len()); merged.input.order()];
        for col in &cols {
            for (g, row) in rows.iter_mut().enumerate() {
                row.push(col[g].clone());
            }
        }
        Channel::new(merged.input, alphabet, rows).expect("relabeling preserves validity")
    }

    /// Searches for an output involution T with Q(T(y)|+1) = Q(y|-1) for all
    /// y. Returns the permutation as an index map, or None if no involution
    /// exists. Binary-input channels only.
    ///
    /// A symbol with column (p,q) must map to one with column (q,p), so the
    /// involution exists iff the multiset of columns is swap-symmetric;
    /// pairing i-th against i-th within matching groups is then always valid.
    pub fn detect_symmetry(&self) -> Result<Option<Vec<usize>>, ChannelError> {
        if !self.input.is_binary() {
            return Err(ChannelError::NotBinaryInput);
        }
        let m = self.alphabet.len();
        let mut groups: BTreeMap<(Rational, Rational), Vec<usize>> = BTreeMap::new();
        for y in 0..m {
            let key = (self.rows[0][y].clone(), self.rows[1][y].clone());
            groups.entry(key).or_default().push(y);
        }
        let mut perm = vec![usize::MAX; m];
        for ((p, q), ys) in &groups {
            if p == q {
                for &y in ys {
                    perm[y] = y;
                }
                continue;
            }
            if p > q {
                continue; // handled from the (q,p) side
            }
            let swapped = match groups.get(&(q.clone(), p.clone())) {
                Some(v) => v,
                None => return Ok(None),
            };
            if swapped.len() != ys.len() {
                return Ok(None);
            }
            for (&y, &z) in ys.iter().zip(swapped.iter()) {
                perm[y] = z;
                perm[z] = y;
            }
        }
        debug_assert!(perm.iter().all(|&i| i != usize::MAX));
        Ok(Some(perm))
    }

    /// Relabels/reorders outputs by a permutation (for tests of relabeling
    /// invariance): new symbol i is old symbol perm[i].
    pub fn permute_outputs(&self, perm: &[usize]) -> Channel {
        assert_eq!(perm.len(), self.alphabet.len());
        let alphabet: Vec<String> = perm.iter().map(|&i| self.alphabet[i].clone()).collect();
        let rows: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .map(|row| perm.iter().map(|&i| row[i].clone()).collect())
            .collect();
        Channel::new(self.input, alphabet, rows).expect("permutation preserves validity")
    }
}

/// Binary symmetric channel with flip probability `epsilon`, outputs named
/// after the observed product: Q(-1 | +1) = epsilon.
pub fn make_bsc(epsilon: &Rational) -> Result<Channel, ChannelError> {
    if !is_probability(epsilon) {
        return Err(ChannelError::ProbabilityOutOfRange(format!(
            "epsilon = {epsilon}"
        )));
    }
    let keep = Rational::one() - epsilon;
    Channel::new(
        GroupSpec::Z2,
        vec![String::from("+1"), String::from("-1")],
        vec![
            vec![keep.clone(), epsilon.clone()],
            vec![epsilon.clone(), keep],
        ],
    )
}

/// The noiseless spin channel (a BSC that never flips).
pub fn noiseless() -> Channel {
    make_bsc(&Rational::zero()).expect("0 is a probability")
}

/// Asymmetric Bernoulli observation: P(1 | +1) = a/n, P(1 | -1) = b/n, on
/// the alphabet ("0", "1").
pub fn make_bernoulli_pair(
    a: &Rational,
    b: &Rational,
    n: u64,
) -> Result<Channel, ChannelError> {
    let n = Rational::from_integer(n.into());
    let pa = a / &n;
    let pb = b / &n;
    for (name, p) in [("a/n", &pa), ("b/n", &pb)] {
        if !is_probability(p) {
            return Err(ChannelError::ProbabilityOutOfRange(format!(
                "{name} = {p}"
            )));
        }
    }
    Channel::new(
        GroupSpec::Z2,
        vec![String::from("0"), String::from("1")],
        vec![
            vec![Rational::one() - &pa, pa],
            vec![Rational::one() - &pb, pb],
        ],
    )
}
