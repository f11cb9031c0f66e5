//! Exact f-informations by enumeration.
//!
//! The chi-squared mutual information of a table is rational-closed, so every
//! chi-squared quantity here is an exact `Rational`. KL values are irrational
//! and are computed as dyadic high-precision approximants (see [`crate::logfix`]),
//! rounded to f64 only for reporting.
//!
//! Conditional informations are computed by streaming over observation
//! outcomes: for each joint outcome of the observed edges, the k x k posterior
//! table of the queried vertex tuples is accumulated by summing over spin
//! configurations, and the outcome's weighted f-divergence is added to the
//! running total. Memory per outcome is one small table; exact rational
//! addition makes the result independent of enumeration order.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::budget::{BudgetExceeded, Budgets};
use crate::channel::{Channel, ChannelError};
use crate::graph::GraphError;
use crate::logfix::Log2Cache;
use crate::model::{ModelError, SyncModel};
use crate::rational::{
    check_distribution, rat, ratio_from_f64, ratio_to_f64, DistributionError, ExactSum, Rational,
};

/// Which f-divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FKind {
    /// f(t) = (t-1)^2
    Chi2,
    /// f(t) = t log2 t, value in bits
    Kl,
}

/// An information value: exact rational for chi-squared, dyadic
/// high-precision approximant (160 fractional bits) for KL in bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfoValue {
    Chi2(Rational),
    KlBits(Rational),
}

impl InfoValue {
    pub fn kind(&self) -> FKind {
        match self {
            InfoValue::Chi2(_) => FKind::Chi2,
            InfoValue::KlBits(_) => FKind::Kl,
        }
    }

    pub fn as_rational(&self) -> &Rational {
        match self {
            InfoValue::Chi2(r) | InfoValue::KlBits(r) => r,
        }
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(self.as_rational())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfoError {
    Model(ModelError),
    Graph(GraphError),
    Channel(ChannelError),
    Budget(BudgetExceeded),
    SameVertex(String),
    OverlappingTuples,
    EmptyTuple,
    LengthMismatch,
    BadDistribution(DistributionError),
    NotAbsolutelyContinuous { index: usize },
    DegeneratePrior,
    NotBinaryInput,
    BadTable(String),
    SandwichViolation { half_i2: String, ikl: String, i2: String },
}

impl fmt::Display for InfoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfoError::Model(e) => write!(f, "{e}"),
            InfoError::Graph(e) => write!(f, "{e}"),
            InfoError::Channel(e) => write!(f, "{e}"),
            InfoError::Budget(e) => write!(f, "{e}"),
            InfoError::SameVertex(v) => write!(f, "query vertices coincide (`{v}`)"),
            InfoError::OverlappingTuples => write!(f, "query vertex tuples overlap"),
            InfoError::EmptyTuple => write!(f, "query vertex tuple is empty"),
            InfoError::LengthMismatch => write!(f, "distributions have different lengths"),
            InfoError::BadDistribution(e) => write!(f, "{e}"),
            InfoError::NotAbsolutelyContinuous { index } => {
                write!(f, "p is not absolutely continuous w.r.t. q (index {index})")
            }
            InfoError::DegeneratePrior => write!(f, "prior must lie strictly inside (0,1)"),
            InfoError::NotBinaryInput => write!(f, "operation requires binary input"),
            InfoError::BadTable(s) => write!(f, "invalid joint table: {s}"),
            InfoError::SandwichViolation { half_i2, ikl, i2 } => write!(
                f,
                "sandwich violated: I2/2 = {half_i2}, IKL = {ikl}, I2 = {i2}"
            ),
        }
    }
}

impl core::error::Error for InfoError {}

impl From<ModelError> for InfoError {
    fn from(e: ModelError) -> Self {
        InfoError::Model(e)
    }
}
impl From<GraphError> for InfoError {
    fn from(e: GraphError) -> Self {
        InfoError::Graph(e)
    }
}
impl From<ChannelError> for InfoError {
    fn from(e: ChannelError) -> Self {
        InfoError::Channel(e)
    }
}
impl From<BudgetExceeded> for InfoError {
    fn from(e: BudgetExceeded) -> Self {
        InfoError::Budget(e)
    }
}
impl From<DistributionError> for InfoError {
    fn from(e: DistributionError) -> Self {
        InfoError::BadDistribution(e)
    }
}

// ---------------------------------------------------------------------------
// f-divergence on flat distributions
// ---------------------------------------------------------------------------

/// D_f(p || q) = sum_x q(x) f(p(x)/q(x)). Requires p << q.
pub fn f_divergence(p: &[Rational], q: &[Rational], f: FKind) -> Result<InfoValue, InfoError> {
    if p.len() != q.len() {
        return Err(InfoError::LengthMismatch);
    }
    check_distribution(p)?;
    check_distribution(q)?;
    for (i, (pi, qi)) in p.iter().zip(q.iter()).enumerate() {
        if qi.is_zero() && !pi.is_zero() {
            return Err(InfoError::NotAbsolutelyContinuous { index: i });
        }
    }
    match f {
        FKind::Chi2 => {
            let mut acc = ExactSum::new();
            for (pi, qi) in p.iter().zip(q.iter()) {
                if qi.is_zero() {
                    continue;
                }
                let d = pi - qi;
                acc.push(&d * &d / qi);
            }
            Ok(InfoValue::Chi2(acc.finish()))
        }
        FKind::Kl => {
            let mut cache = Log2Cache::new();
            let mut acc = ExactSum::new();
            for (pi, qi) in p.iter().zip(q.iter()) {
                if pi.is_zero() {
                    continue;
                }
                acc.push(pi * cache.log2(&(pi / qi)));
            }
            Ok(InfoValue::KlBits(acc.finish()))
        }
    }
}

// ---------------------------------------------------------------------------
// Joint tables
// ---------------------------------------------------------------------------

/// A finite joint distribution with labeled axes. Total mass is 1, or the
/// conditioning-outcome weight when the table is one branch of a conditional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub p: Vec<Vec<Rational>>,
    pub weight: Option<Rational>,
}

impl JointTable {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        p: Vec<Vec<Rational>>,
        weight: Option<Rational>,
    ) -> Result<JointTable, InfoError> {
        if p.len() != row_labels.len() {
            return Err(InfoError::BadTable(String::from("row count mismatch")));
        }
        let mut total = Rational::zero();
        for row in &p {
            if row.len() != col_labels.len() {
                return Err(InfoError::BadTable(String::from("column count mismatch")));
            }
            for x in row {
                if x.is_negative() {
                    return Err(InfoError::BadTable(String::from("negative entry")));
                }
                total += x;
            }
        }
        let expected = weight.clone().unwrap_or_else(Rational::one);
        if total != expected {
            return Err(InfoError::BadTable(format!(
                "total mass {total} differs from expected {expected}"
            )));
        }
        Ok(JointTable {
            row_labels,
            col_labels,
            p,
            weight,
        })
    }

    pub fn total(&self) -> Rational {
        self.weight.clone().unwrap_or_else(Rational::one)
    }

    pub fn row_marginals(&self) -> Vec<Rational> {
        self.p
            .iter()
            .map(|row| row.iter().cloned().sum())
            .collect()
    }

    pub fn col_marginals(&self) -> Vec<Rational> {
        let mut cols = vec![Rational::zero(); self.col_labels.len()];
        for row in &self.p {
            for (j, x) in row.iter().enumerate() {
                cols[j] += x;
            }
        }
        cols
    }

    /// Chi-squared mutual information of the (normalized) table.
    pub fn chi2_mi(&self) -> Rational {
        let w = self.total();
        if w.is_zero() {
            return Rational::zero();
        }
        chi2_of_masses(&self.p, &self.row_marginals(), &self.col_marginals(), &w) / &w
    }

    /// KL mutual information in bits, dyadic high-precision approximant.
    pub fn kl_mi_bits_hp(&self) -> Rational {
        let w = self.total();
        if w.is_zero() {
            return Rational::zero();
        }
        let mut cache = Log2Cache::new();
        kl_of_masses(
            &self.p,
            &self.row_marginals(),
            &self.col_marginals(),
            &w,
            &mut cache,
        ) / &w
    }

    pub fn f_mi(&self, f: FKind) -> InfoValue {
        match f {
            FKind::Chi2 => InfoValue::Chi2(self.chi2_mi()),
            FKind::Kl => InfoValue::KlBits(self.kl_mi_bits_hp()),
        }
    }
}

/// w * chi2 of an unnormalized mass table with given marginals and total w.
/// Homogeneous of degree one in a global scale of the masses.
fn chi2_of_masses(
    t: &[Vec<Rational>],
    rows: &[Rational],
    cols: &[Rational],
    w: &Rational,
) -> Rational {
    let mut acc = ExactSum::new();
    for (i, row) in t.iter().enumerate() {
        if rows[i].is_zero() {
            continue;
        }
        for (j, tij) in row.iter().enumerate() {
            if cols[j].is_zero() {
                continue;
            }
            let rc = &rows[i] * &cols[j];
            let d = tij * w - &rc;
            if d.is_zero() {
                continue;
            }
            acc.push(&d * &d / (w * rc));
        }
    }
    acc.finish()
}

/// w * KL (bits) of an unnormalized mass table. Same scaling property.
fn kl_of_masses(
    t: &[Vec<Rational>],
    rows: &[Rational],
    cols: &[Rational],
    w: &Rational,
    cache: &mut Log2Cache,
) -> Rational {
    let mut acc = ExactSum::new();
    for row in t {
        for tij in row {
            acc.push(cache.xlog2x(tij));
        }
    }
    acc.push(cache.xlog2x(w));
    for r in rows {
        acc.push(-cache.xlog2x(r));
    }
    for c in cols {
        acc.push(-cache.xlog2x(c));
    }
    acc.finish()
}

// ---------------------------------------------------------------------------
// Binary-input channel informations
// ---------------------------------------------------------------------------

/// I2(A; U) for binary U with P[U=+1] = prior_plus, observed through the
/// channel: Var[E[U|A]] / Var[U], computed exactly as
/// pi(1-pi) * sum_y (Q(y|+) - Q(y|-))^2 / P(y).
pub fn chi2_mi_binary(prior_plus: &Rational, q: &Channel) -> Result<Rational, InfoError> {
    if !q.input_group().is_binary() {
        return Err(InfoError::NotBinaryInput);
    }
    if prior_plus.is_zero() || prior_plus.is_one() || prior_plus.is_negative() || *prior_plus > Rational::one()
    {
        return Err(InfoError::DegeneratePrior);
    }
    let pi = prior_plus;
    let co = Rational::one() - pi;
    let mut acc = Rational::zero();
    for y in 0..q.alphabet_len() {
        let py = pi * q.prob(0, y) + &co * q.prob(1, y);
        if py.is_zero() {
            continue;
        }
        let d = q.prob(0, y) - q.prob(1, y);
        acc += &d * &d / py;
    }
    Ok(pi * co * acc)
}

/// The per-edge percolation weight gamma(e) = I2 at uniform input.
pub fn edge_gamma(q: &Channel) -> Result<Rational, InfoError> {
    chi2_mi_binary(&rat(1, 2), q)
}

/// Explicit joint of (U, A) for the definitional route: rows are U = ±1.
pub fn binary_input_joint(prior_plus: &Rational, q: &Channel) -> Result<JointTable, InfoError> {
    if !q.input_group().is_binary() {
        return Err(InfoError::NotBinaryInput);
    }
    let co = Rational::one() - prior_plus;
    let p = vec![
        q.row(0).iter().map(|x| x * prior_plus).collect::<Vec<_>>(),
        q.row(1).iter().map(|x| x * &co).collect::<Vec<_>>(),
    ];
    JointTable::new(
        vec![String::from("+1"), String::from("-1")],
        q.alphabet().to_vec(),
        p,
        None,
    )
}

// ---------------------------------------------------------------------------
// Enumeration engine
// ---------------------------------------------------------------------------

struct XRec {
    /// Spin assignment of the active vertices, k-ary digits.
    spins: Vec<u8>,
    /// Group difference per observed edge under this assignment.
    diffs: Vec<u8>,
    /// Prior mass; None for uniform priors (global factor applied at the end).
    mass: Option<Rational>,
}

/// Streaming enumerator over observation outcomes of a model.
pub struct Enumerator<'a> {
    model: &'a SyncModel,
    observed: Vec<usize>,
    active: Vec<usize>,
    xrecs: Vec<XRec>,
    /// (1/k)^|active| for uniform priors, 1 otherwise.
    global_prior: Rational,
}

impl<'a> Enumerator<'a> {
    /// Builds the enumerator, enforcing the state budget
    /// k^|V| * prod_{e observed} |alphabet_e| <= max_states.
    pub fn new(
        model: &'a SyncModel,
        observed: &[usize],
        query_vertices: &[usize],
        budgets: &Budgets,
    ) -> Result<Enumerator<'a>, InfoError> {
        let g = model.graph();
        let k = model.group().order() as u128;
        let mut states: u128 = 1;
        for _ in 0..g.vertex_count() {
            states = states
                .checked_mul(k)
                .ok_or_else(|| budget_err(budgets, u128::MAX))?;
        }
        for &e in observed {
            states = states
                .checked_mul(model.channel(e).alphabet_len() as u128)
                .ok_or_else(|| budget_err(budgets, u128::MAX))?;
        }
        if states > budgets.max_states {
            return Err(budget_err(budgets, states));
        }

        // active vertices: endpoints of observed edges plus the query tuples
        let mut active: Vec<usize> = Vec::new();
        let mut mark = vec![false; g.vertex_count()];
        let add = |v: usize, active: &mut Vec<usize>, mark: &mut Vec<bool>| {
            if !mark[v] {
                mark[v] = true;
                active.push(v);
            }
        };
        for &v in query_vertices {
            add(v, &mut active, &mut mark);
        }
        for &e in observed {
            let ed = g.edge(e);
            add(ed.from, &mut active, &mut mark);
            add(ed.to, &mut active, &mut mark);
        }
        active.sort_unstable();
        let mut pos = vec![usize::MAX; g.vertex_count()];
        for (i, &v) in active.iter().enumerate() {
            pos[v] = i;
        }

        let uniform = matches!(model.prior(), crate::model::Prior::Uniform);
        let korder = model.group().order();
        let mut xrecs = Vec::new();
        let mut spins = vec![0u8; active.len()];
        loop {
            let diffs: Vec<u8> = observed
                .iter()
                .map(|&e| {
                    let ed = g.edge(e);
                    model
                        .group()
                        .diff(spins[pos[ed.from]] as usize, spins[pos[ed.to]] as usize)
                        as u8
                })
                .collect();
            let mass = if uniform {
                None
            } else {
                let mut m = Rational::one();
                for (i, &v) in active.iter().enumerate() {
                    m *= model.vertex_prior(v, spins[i] as usize);
                }
                Some(m)
            };
            xrecs.push(XRec {
                spins: spins.clone(),
                diffs,
                mass,
            });
            // odometer
            let mut i = 0;
            loop {
                if i == spins.len() {
                    break;
                }
                spins[i] += 1;
                if (spins[i] as usize) < korder {
                    break;
                }
                spins[i] = 0;
                i += 1;
            }
            if i == spins.len() {
                break;
            }
        }

        let global_prior = if uniform {
            let mut p = Rational::one();
            let k = rat(korder as i64, 1);
            for _ in 0..active.len() {
                p /= &k;
            }
            p
        } else {
            Rational::one()
        };

        Ok(Enumerator {
            model,
            observed: observed.to_vec(),
            active,
            xrecs,
            global_prior,
        })
    }

    pub fn active_vertices(&self) -> &[usize] {
        &self.active
    }

    /// Position of a vertex inside the active spin assignment.
    pub fn position(&self, v: usize) -> usize {
        self.active
            .iter()
            .position(|&a| a == v)
            .expect("vertex is active")
    }

    /// Overall factor every emitted mass must be multiplied by.
    pub fn prior_factor(&self) -> &Rational {
        &self.global_prior
    }

    /// Streams per-outcome unnormalized mass tables.
    ///
    /// For every joint outcome y of the observed edges, builds the
    /// nrows x ncols table T with T[row_of(x)][col_of(x)] += mass(x, y) and
    /// hands (y, T, w = total) to the sink. Zero-mass outcomes are skipped.
    /// Emitted masses exclude the global prior factor.
    pub fn for_each_outcome(
        &self,
        nrows: usize,
        ncols: usize,
        row_of: impl Fn(&[u8]) -> usize,
        col_of: impl Fn(&[u8]) -> usize,
        mut sink: impl FnMut(&[usize], &[Vec<Rational>], &Rational),
    ) {
        let mapped: Vec<(u32, u32)> = self
            .xrecs
            .iter()
            .map(|x| (row_of(&x.spins) as u32, col_of(&x.spins) as u32))
            .collect();
        let alpha_sizes: Vec<usize> = self
            .observed
            .iter()
            .map(|&e| self.model.channel(e).alphabet_len())
            .collect();
        let mut y = vec![0usize; self.observed.len()];
        let mut table = vec![vec![Rational::zero(); ncols]; nrows];
        loop {
            for row in table.iter_mut() {
                for cell in row.iter_mut() {
                    *cell = Rational::zero();
                }
            }
            let mut w = Rational::zero();
            for (x, &(ri, ci)) in self.xrecs.iter().zip(mapped.iter()) {
                let mut m = match &x.mass {
                    Some(m) => m.clone(),
                    None => Rational::one(),
                };
                let mut dead = false;
                for (j, &e) in self.observed.iter().enumerate() {
                    let p = self.model.channel(e).prob(x.diffs[j] as usize, y[j]);
                    if p.is_zero() {
                        dead = true;
                        break;
                    }
                    m *= p;
                }
                if dead || m.is_zero() {
                    continue;
                }
                w += &m;
                table[ri as usize][ci as usize] += m;
            }
            if !w.is_zero() {
                sink(&y, &table, &w);
            }
            // odometer over outcomes
            let mut j = 0;
            loop {
                if j == y.len() {
                    break;
                }
                y[j] += 1;
                if y[j] < alpha_sizes[j] {
                    break;
                }
                y[j] = 0;
                j += 1;
            }
            if j == y.len() {
                break;
            }
        }
    }
}

fn budget_err(budgets: &Budgets, needed: u128) -> InfoError {
    InfoError::Budget(BudgetExceeded {
        what: String::from("exact enumeration states"),
        needed,
        allowed: budgets.max_states,
    })
}

fn tuple_index(spins: &[u8], positions: &[usize], k: usize) -> usize {
    let mut idx = 0usize;
    for &p in positions {
        idx = idx * k + spins[p] as usize;
    }
    idx
}

fn resolve_vertices(model: &SyncModel, names: &[&str]) -> Result<Vec<usize>, InfoError> {
    names
        .iter()
        .map(|n| model.graph().vertex_id(n).map_err(InfoError::from))
        .collect()
}

fn resolve_edges(model: &SyncModel, observed: Option<&[&str]>) -> Result<Vec<usize>, InfoError> {
    match observed {
        None => Ok(model.all_edges()),
        Some(ids) => ids
            .iter()
            .map(|id| model.graph().edge_id(id).map_err(InfoError::from))
            .collect(),
    }
}

/// Conditional f-information I_f(X_left; X_right | Y_observed) between
/// vertex tuples, by outcome enumeration. Chi-squared values are exact;
/// KL values are dyadic high-precision approximants in bits.
pub fn conditional_tuple_info(
    model: &SyncModel,
    left: &[&str],
    right: &[&str],
    observed: Option<&[&str]>,
    f: FKind,
    budgets: &Budgets,
) -> Result<InfoValue, InfoError> {
    let lv = resolve_vertices(model, left)?;
    let rv = resolve_vertices(model, right)?;
    if lv.is_empty() || rv.is_empty() {
        return Err(InfoError::EmptyTuple);
    }
    for a in &lv {
        if rv.contains(a) {
            return Err(InfoError::SameVertex(String::from(
                model.graph().vertex_name(*a),
            )));
        }
    }
    let obs = resolve_edges(model, observed)?;
    let mut query: Vec<usize> = lv.iter().chain(rv.iter()).copied().collect();
    query.dedup();
    let en = Enumerator::new(model, &obs, &query, budgets)?;
    let k = model.group().order();
    let lpos: Vec<usize> = lv.iter().map(|&v| en.position(v)).collect();
    let rpos: Vec<usize> = rv.iter().map(|&v| en.position(v)).collect();
    let nrows = k.pow(lv.len() as u32);
    let ncols = k.pow(rv.len() as u32);

    let mut acc = ExactSum::new();
    let mut cache = Log2Cache::new();
    en.for_each_outcome(
        nrows,
        ncols,
        |spins| tuple_index(spins, &lpos, k),
        |spins| tuple_index(spins, &rpos, k),
        |_y, table, w| {
            let rows: Vec<Rational> = table
                .iter()
                .map(|r| r.iter().cloned().sum::<Rational>())
                .collect();
            let mut cols = vec![Rational::zero(); ncols];
            for row in table {
                for (j, x) in row.iter().enumerate() {
                    cols[j] += x;
                }
            }
            acc.push(match f {
                FKind::Chi2 => chi2_of_masses(table, &rows, &cols, w),
                FKind::Kl => kl_of_masses(table, &rows, &cols, w, &mut cache),
            });
        },
    );
    let total = acc.finish() * en.prior_factor();
    Ok(match f {
        FKind::Chi2 => InfoValue::Chi2(total),
        FKind::Kl => InfoValue::KlBits(total),
    })
}

/// Exact I2(X_u; X_v | Y_observed). `observed = None` means all edges.
pub fn exact_i2_conditional(
    model: &SyncModel,
    u: &str,
    v: &str,
    observed: Option<&[&str]>,
    budgets: &Budgets,
) -> Result<Rational, InfoError> {
    match conditional_tuple_info(model, &[u], &[v], observed, FKind::Chi2, budgets)? {
        InfoValue::Chi2(r) => Ok(r),
        InfoValue::KlBits(_) => unreachable!(),
    }
}

/// Exact I2(X_u; X_W | Y_observed) for a vertex set W.
pub fn exact_i2_conditional_set(
    model: &SyncModel,
    u: &str,
    w: &[&str],
    observed: Option<&[&str]>,
    budgets: &Budgets,
) -> Result<Rational, InfoError> {
    match conditional_tuple_info(model, &[u], w, observed, FKind::Chi2, budgets)? {
        InfoValue::Chi2(r) => Ok(r),
        InfoValue::KlBits(_) => unreachable!(),
    }
}

/// I_KL(X_u; X_v | Y_observed) in bits (high-precision dyadic value).
pub fn exact_ikl_conditional(
    model: &SyncModel,
    u: &str,
    v: &str,
    observed: Option<&[&str]>,
    budgets: &Budgets,
) -> Result<InfoValue, InfoError> {
    conditional_tuple_info(model, &[u], &[v], observed, FKind::Kl, budgets)
}

/// Set version of [`exact_ikl_conditional`].
pub fn exact_ikl_conditional_set(
    model: &SyncModel,
    u: &str,
    w: &[&str],
    observed: Option<&[&str]>,
    budgets: &Budgets,
) -> Result<InfoValue, InfoError> {
    conditional_tuple_info(model, &[u], w, observed, FKind::Kl, budgets)
}

/// Joint table of the product spin U = X_u X_v against the observation
/// tuple Y: the definitional route for I2(X_u X_v; Y). Uniform binary only.
pub fn product_spin_observation_joint(
    model: &SyncModel,
    u: &str,
    v: &str,
    observed: Option<&[&str]>,
    budgets: &Budgets,
) -> Result<JointTable, InfoError> {
    model.require_uniform_binary()?;
    let ui = model.graph().vertex_id(u)?;
    let vi = model.graph().vertex_id(v)?;
    if ui == vi {
        return Err(InfoError::SameVertex(String::from(u)));
    }
    let obs = resolve_edges(model, observed)?;
    let en = Enumerator::new(model, &obs, &[ui, vi], budgets)?;
    let (pu, pv) = (en.position(ui), en.position(vi));
    let mut cols: Vec<(String, Rational, Rational)> = Vec::new();
    en.for_each_outcome(
        2,
        1,
        |spins| (spins[pu] ^ spins[pv]) as usize,
        |_| 0,
        |y, table, _w| {
            let label = format!("{y:?}");
            cols.push((label, table[0][0].clone(), table[1][0].clone()));
        },
    );
    let pf = en.prior_factor();
    let col_labels: Vec<String> = cols.iter().map(|(l, _, _)| l.clone()).collect();
    let p = vec![
        cols.iter().map(|(_, a, _)| a * pf).collect::<Vec<_>>(),
        cols.iter().map(|(_, _, b)| b * pf).collect::<Vec<_>>(),
    ];
    JointTable::new(
        vec![String::from("+1"), String::from("-1")],
        col_labels,
        p,
        None,
    )
}

/// Joint table of X_left against the pair (X_right, Y_observed): the
/// definitional route for I(X_u; X_W, Y).
pub fn spins_vs_spins_and_observations_joint(
    model: &SyncModel,
    left: &[&str],
    right: &[&str],
    observed: Option<&[&str]>,
    budgets: &Budgets,
) -> Result<JointTable, InfoError> {
    let lv = resolve_vertices(model, left)?;
    let rv = resolve_vertices(model, right)?;
    if lv.is_empty() {
        return Err(InfoError::EmptyTuple);
    }
    for a in &lv {
        if rv.contains(a) {
            return Err(InfoError::SameVertex(String::from(
                model.graph().vertex_name(*a),
            )));
        }
    }
    let obs = resolve_edges(model, observed)?;
    let mut query: Vec<usize> = lv.iter().chain(rv.iter()).copied().collect();
    query.dedup();
    let en = Enumerator::new(model, &obs, &query, budgets)?;
    let k = model.group().order();
    let lpos: Vec<usize> = lv.iter().map(|&v| en.position(v)).collect();
    let rpos: Vec<usize> = rv.iter().map(|&v| en.position(v)).collect();
    let nrows = k.pow(lv.len() as u32);
    let nrcols = k.pow(rv.len() as u32);
    let mut col_labels: Vec<String> = Vec::new();
    let mut matrix: Vec<Vec<Rational>> = vec![Vec::new(); nrows];
    en.for_each_outcome(
        nrows,
        nrcols,
        |spins| tuple_index(spins, &lpos, k),
        |spins| tuple_index(spins, &rpos, k),
        |y, table, _w| {
            for xr in 0..nrcols {
                col_labels.push(format!("x={xr} y={y:?}"));
                for (i, row) in table.iter().enumerate() {
                    matrix[i].push(row[xr].clone());
                }
            }
        },
    );
    let pf = en.prior_factor();
    for row in matrix.iter_mut() {
        for cell in row.iter_mut() {
            *cell *= pf;
        }
    }
    let row_labels = (0..nrows).map(|i| format!("{i}")).collect();
    JointTable::new(row_labels, col_labels, matrix, None)
}

// ---------------------------------------------------------------------------
// SDPI constant
// ---------------------------------------------------------------------------

/// SDPI search output: the golden-section refinement, the dense-grid
/// validation, and their maximum (the reported constant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpiEstimate {
    pub eta: f64,
    pub golden: f64,
    pub grid: f64,
    pub argmax: f64,
}

/// The chi-squared SDPI constant of a binary-input channel, realized as the
/// supremum over input priors of the chi-squared information ratio
/// (for binary inputs this is the maximal-correlation characterization).
///
/// Golden-section search on [1/256, 255/256] to 1e-12 width, validated
/// against a 10^4-point grid; the uniform-prior value is always included, so
/// eta >= I2 at prior 1/2.
pub fn sdpi_chi2(q: &Channel) -> Result<SdpiEstimate, InfoError> {
    if !q.input_group().is_binary() {
        return Err(InfoError::NotBinaryInput);
    }
    let qp: Vec<f64> = q.row(0).iter().map(ratio_to_f64).collect();
    let qm: Vec<f64> = q.row(1).iter().map(ratio_to_f64).collect();
    let obj = |pi: f64| -> f64 {
        let mut s = 0.0;
        for (a, b) in qp.iter().zip(qm.iter()) {
            let py = pi * a + (1.0 - pi) * b;
            if py > 0.0 {
                let d = a - b;
                s += d * d / py;
            }
        }
        pi * (1.0 - pi) * s
    };
    let (lo, hi) = (1.0 / 256.0, 255.0 / 256.0);

    // golden-section (maximization)
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (obj(c), obj(d));
    while b - a > 1e-12 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = obj(d);
        }
    }
    let golden_arg = 0.5 * (a + b);
    let golden = obj(golden_arg);

    let mut grid = f64::NEG_INFINITY;
    let mut grid_arg = lo;
    let n = 10_000;
    for i in 0..n {
        let pi = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let v = obj(pi);
        if v > grid {
            grid = v;
            grid_arg = pi;
        }
    }

    // exact uniform-prior floor
    let uniform = ratio_to_f64(&chi2_mi_binary(&rat(1, 2), q)?);

    let mut eta = golden.max(grid).max(uniform).max(obj(0.5));
    let argmax = if golden >= grid { golden_arg } else { grid_arg };
    eta = eta.clamp(0.0, 1.0);
    Ok(SdpiEstimate {
        eta,
        golden,
        grid,
        argmax,
    })
}

// ---------------------------------------------------------------------------
// Sandwich check
// ---------------------------------------------------------------------------

/// Both informations of a pair query plus the sandwich verdict
/// I2/2 <= IKL <= I2 (uniform binary spins).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandwichReport {
    pub half_i2: Rational,
    pub ikl_bits_hp: Rational,
    pub i2: Rational,
}

impl SandwichReport {
    pub fn ikl_bits(&self) -> f64 {
        ratio_to_f64(&self.ikl_bits_hp)
    }
}

/// Computes I2 and IKL and asserts the sandwich. A violation beyond the
/// numerical slack signals a numerics bug and is returned as an error.
pub fn sandwich_check(
    model: &SyncModel,
    u: &str,
    v: &str,
    observed: Option<&[&str]>,
    budgets: &Budgets,
) -> Result<SandwichReport, InfoError> {
    model.require_uniform_binary()?;
    let i2 = exact_i2_conditional(model, u, v, observed, budgets)?;
    let ikl = match exact_ikl_conditional(model, u, v, observed, budgets)? {
        InfoValue::KlBits(r) => r,
        InfoValue::Chi2(_) => unreachable!(),
    };
    let half = &i2 / rat(2, 1);
    let slack = ratio_from_f64(1e-12).expect("finite");
    if &half - &slack > ikl || ikl > &i2 + &slack {
        return Err(InfoError::SandwichViolation {
            half_i2: format!("{}", ratio_to_f64(&half)),
            ikl: format!("{}", ratio_to_f64(&ikl)),
            i2: format!("{}", ratio_to_f64(&i2)),
        });
    }
    Ok(SandwichReport {
        half_i2: half,
        ikl_bits_hp: ikl,
        i2,
    })
}

/// Rounds an f64 via rational conversion, for reporting uses.
pub fn info_to_f64(v: &InfoValue) -> f64 {
    v.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{make_bernoulli_pair, make_bsc, noiseless};
    use crate::graph::MultiGraph;
    use crate::model::{Prior, SyncModel};
    use alloc::collections::BTreeMap;

    fn budgets() -> Budgets {
        Budgets::default()
    }

    fn single_edge_model(ch: crate::channel::Channel) -> SyncModel {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), ch);
        SyncModel::uniform_z2(g, chans).unwrap()
    }

    fn parallel_pair_model(
        c1: crate::channel::Channel,
        c2: crate::channel::Channel,
    ) -> SyncModel {
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![
                ("e".into(), "u".into(), "v".into()),
                ("f".into(), "u".into(), "v".into()),
            ],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), c1);
        chans.insert("f".into(), c2);
        SyncModel::uniform_z2(g, chans).unwrap()
    }

    #[test]
    fn f_divergence_basics() {
        let p = [rat(1, 1), rat(0, 1)];
        let q = [rat(1, 2), rat(1, 2)];
        match f_divergence(&p, &q, FKind::Chi2).unwrap() {
            InfoValue::Chi2(v) => assert_eq!(v, rat(1, 1)),
            _ => unreachable!(),
        }
        match f_divergence(&p, &q, FKind::Kl).unwrap() {
            InfoValue::KlBits(v) => assert_eq!(v, rat(1, 1)), // exactly 1 bit
            _ => unreachable!(),
        }
        // p = q gives 0 for both
        for f in [FKind::Chi2, FKind::Kl] {
            assert!(f_divergence(&q, &q, f).unwrap().as_rational().is_zero());
        }
        assert!(matches!(
            f_divergence(&q, &p, FKind::Chi2),
            Err(InfoError::NotAbsolutelyContinuous { index: 1 })
        ));
    }

    #[test]
    fn chi2_mi_binary_bsc_values() {
        // I2(BSC(eps)) = (1-2 eps)^2 at uniform prior
        for (num, den) in [(0i64, 1i64), (1, 10), (1, 4), (1, 2)] {
            let eps = rat(num, den);
            let q = make_bsc(&eps).unwrap();
            let expect = {
                let d = rat(1, 1) - rat(2, 1) * &eps;
                &d * &d
            };
            assert_eq!(chi2_mi_binary(&rat(1, 2), &q).unwrap(), expect);
        }
        // independent channel: zero at any prior
        let flat = make_bsc(&rat(1, 2)).unwrap();
        assert_eq!(chi2_mi_binary(&rat(1, 7), &flat).unwrap(), rat(0, 1));
        assert!(matches!(
            chi2_mi_binary(&rat(0, 1), &flat),
            Err(InfoError::DegeneratePrior)
        ));
    }

    #[test]
    fn chi2_mi_matches_definitional_f_divergence() {
        // Var-form equals chi2 of the explicit joint vs product, exactly
        let q = make_bernoulli_pair(&rat(3, 1), &rat(1, 1), 10).unwrap();
        for prior in [rat(1, 2), rat(1, 3), rat(2, 7)] {
            let fast = chi2_mi_binary(&prior, &q).unwrap();
            let table = binary_input_joint(&prior, &q).unwrap();
            assert_eq!(fast, table.chi2_mi());
        }
    }

    #[test]
    fn single_edge_conditional_is_edge_gamma() {
        let eps = rat(1, 4);
        let m = single_edge_model(make_bsc(&eps).unwrap());
        let i2 = exact_i2_conditional(&m, "u", "v", None, &budgets()).unwrap();
        assert_eq!(i2, rat(1, 4)); // (1 - 2*1/4)^2
        // empty observation set: independent spins
        let i2_none = exact_i2_conditional(&m, "u", "v", Some(&[]), &budgets()).unwrap();
        assert_eq!(i2_none, rat(0, 1));
    }

    #[test]
    fn two_parallel_bsc_quarter_edges() {
        // independent hand computation: outcomes (y_e, y_f) with
        // P(++)=P(--)=5/16, P(+-)=P(-+)=3/16; E[U|y]^2 = (4/5)^2 on equal,
        // 0 on mixed; I2 = 2 * 5/16 * 16/25 = 2/5.
        let m = parallel_pair_model(
            make_bsc(&rat(1, 4)).unwrap(),
            make_bsc(&rat(1, 4)).unwrap(),
        );
        let i2 = exact_i2_conditional(&m, "u", "v", None, &budgets()).unwrap();
        assert_eq!(i2, rat(2, 5));
    }

    #[test]
    fn two_edge_path_multiplies() {
        let g = MultiGraph::new(
            vec!["u".into(), "w".into(), "v".into()],
            vec![
                ("e1".into(), "u".into(), "w".into()),
                ("e2".into(), "w".into(), "v".into()),
            ],
            Some(("u".into(), "v".into())),
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e1".into(), make_bsc(&rat(1, 4)).unwrap());
        chans.insert("e2".into(), make_bsc(&rat(1, 10)).unwrap());
        let m = SyncModel::uniform_z2(g, chans).unwrap();
        let i2 = exact_i2_conditional(&m, "u", "v", None, &budgets()).unwrap();
        // (1-2/4)^2 * (1-2/10)^2 = 1/4 * 16/25
        assert_eq!(i2, rat(1, 4) * rat(16, 25));
    }

    #[test]
    fn ikl_noiseless_is_one_bit_and_independent_is_zero() {
        let m = single_edge_model(noiseless());
        match exact_ikl_conditional(&m, "u", "v", None, &budgets()).unwrap() {
            InfoValue::KlBits(v) => assert_eq!(v, rat(1, 1)),
            _ => unreachable!(),
        }
        let m0 = single_edge_model(make_bsc(&rat(1, 2)).unwrap());
        match exact_ikl_conditional(&m0, "u", "v", None, &budgets()).unwrap() {
            InfoValue::KlBits(v) => assert!(v.is_zero()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn sandwich_on_bsc() {
        let m = single_edge_model(make_bsc(&rat(11, 100)).unwrap());
        let rep = sandwich_check(&m, "u", "v", None, &budgets()).unwrap();
        assert!(rep.half_i2 <= rep.ikl_bits_hp);
        assert!(rep.ikl_bits_hp <= rep.i2);
        // noiseless: equality at the top of the sandwich
        let m1 = single_edge_model(noiseless());
        let rep1 = sandwich_check(&m1, "u", "v", None, &budgets()).unwrap();
        assert_eq!(rep1.i2, rat(1, 1));
        assert_eq!(rep1.ikl_bits_hp, rat(1, 1));
    }

    #[test]
    fn sdpi_bsc_attained_at_half() {
        let q = make_bsc(&rat(1, 5)).unwrap();
        let est = sdpi_chi2(&q).unwrap();
        let expect = ratio_to_f64(&rat(9, 25)); // (1-2/5)^2
        assert!((est.eta - expect).abs() < 1e-9, "eta = {}", est.eta);
        assert!((est.argmax - 0.5).abs() < 1e-3);
        let nl = sdpi_chi2(&noiseless()).unwrap();
        assert!((nl.eta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sdpi_bernoulli_pair_approaches_hellinger_form() {
        // eta ~ (sqrt a - sqrt b)^2 / n within 10/n^2
        use num_traits::Float;
        let (a, b) = (3.0f64, 1.0f64);
        for n in [50u64, 100, 200] {
            let q = make_bernoulli_pair(&rat(3, 1), &rat(1, 1), n).unwrap();
            let est = sdpi_chi2(&q).unwrap();
            let target = (Float::sqrt(a) - Float::sqrt(b)).powi(2) / n as f64;
            let tol = 10.0 / (n as f64 * n as f64);
            assert!(
                (est.eta - target).abs() < tol,
                "n={n}: eta={} target={target}",
                est.eta
            );
        }
    }

    #[test]
    fn sdpi_at_least_uniform_value() {
        let q = make_bernoulli_pair(&rat(5, 1), &rat(2, 1), 16).unwrap();
        let est = sdpi_chi2(&q).unwrap();
        let uni = ratio_to_f64(&chi2_mi_binary(&rat(1, 2), &q).unwrap());
        assert!(est.eta >= uni - 1e-15);
        // asymmetric channel: the supremum beats the uniform prior strictly
        assert!(est.eta > uni + 1e-6);
    }

    #[test]
    fn budget_is_enforced() {
        let m = single_edge_model(make_bsc(&rat(1, 4)).unwrap());
        let tight = Budgets {
            max_states: 4,
            ..Budgets::default()
        };
        assert!(matches!(
            exact_i2_conditional(&m, "u", "v", None, &tight),
            Err(InfoError::Budget(_))
        ));
    }

    #[test]
    fn same_vertex_rejected() {
        let m = single_edge_model(make_bsc(&rat(1, 4)).unwrap());
        assert!(matches!(
            exact_i2_conditional(&m, "u", "u", None, &budgets()),
            Err(InfoError::SameVertex(_))
        ));
    }

    #[test]
    fn nonuniform_prior_conditional_runs() {
        // biased prior goes through the general table path
        let g = MultiGraph::new(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            None,
        )
        .unwrap();
        let mut chans = BTreeMap::new();
        chans.insert("e".into(), make_bsc(&rat(1, 5)).unwrap());
        let m = SyncModel::new(
            g,
            chans,
            crate::group::GroupSpec::Z2,
            Prior::Biased(alloc::vec![rat(4, 5), rat(4, 5)]),
        )
        .unwrap();
        let i2 = exact_i2_conditional(&m, "u", "v", None, &budgets()).unwrap();
        // frozen from the closed form delta^2 (1-delta)^2 (1-2 eps)^2 / D^2
        // verified symbolically; delta = eps = 1/5
        assert_eq!(i2, rat(225, 1156));
    }
}
