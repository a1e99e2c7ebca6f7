//! Partial-sum witness checks at desk scale.
//!
//! These routines check, by exhaustive search, that an optimal solution can
//! be laid out with the bounded partial sums the layered solver relies on:
//! each block's columns admit an ordering whose prefixes track their
//! proportional share of the block total within `2Δr`, and interleaving those
//! orderings along the balanced schedule keeps every prefix within
//! `[-nΔ(n+2r), nΔ(1+2r)]` of `(j/q)·b_top`.

use num_rational::Ratio;
use serde::Serialize;

use crate::balancer::{balance_counts, verify_balance, BalancedSchedule};
use crate::dag::{matrix_delta, window_slack};
use crate::error::{Error, Result};
use crate::model::{NFoldInstance, Solution};

/// Largest sequence [`find_bounded_reordering`] will search exhaustively.
pub const MAX_EXHAUSTIVE_COLUMNS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSequence {
    dim: usize,
    columns: Vec<Vec<i64>>,
    total: Vec<i64>,
    delta: i64,
}

impl ColumnSequence {
    pub fn new(dim: usize, columns: Vec<Vec<i64>>) -> Result<Self> {
        let mut total = vec![0i64; dim];
        let mut delta = 0i64;
        for (idx, col) in columns.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "column {} has length {}, expected {dim}",
                    idx + 1,
                    col.len()
                )));
            }
            for (t, &v) in total.iter_mut().zip(col) {
                *t = t.checked_add(v).ok_or(Error::Overflow)?;
                delta = delta.max(v.checked_abs().ok_or(Error::Overflow)?);
            }
        }
        Ok(ColumnSequence {
            dim,
            columns,
            total,
            delta,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn columns(&self) -> &[Vec<i64>] {
        &self.columns
    }
    pub fn total(&self) -> &[i64] {
        &self.total
    }
    /// Largest max-norm over the columns.
    pub fn delta(&self) -> i64 {
        self.delta
    }
    pub fn len(&self) -> usize {
        self.columns.len()
    }
    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn reordered(&self, order: &[usize]) -> ColumnSequence {
        ColumnSequence {
            dim: self.dim,
            columns: order.iter().map(|&i| self.columns[i].clone()).collect(),
            total: self.total.clone(),
            delta: self.delta,
        }
    }
}

/// Whether `slack_lo ≤ psum(j)[k] - center(j)[k] ≤ slack_hi` for every
/// prefix length `j ≥ 1` and coordinate `k`.
pub fn partial_sum_check<F>(cols: &ColumnSequence, center: F, slack_lo: i64, slack_hi: i64) -> bool
where
    F: Fn(usize) -> Vec<Ratio<i128>>,
{
    let mut psum = vec![0i128; cols.dim];
    for (j, col) in cols.columns.iter().enumerate() {
        for (p, &v) in psum.iter_mut().zip(col) {
            *p += v as i128;
        }
        let c = center(j + 1);
        for k in 0..cols.dim {
            let dev = Ratio::from_integer(psum[k]) - c[k];
            if dev < Ratio::from_integer(slack_lo as i128) || dev > Ratio::from_integer(slack_hi as i128) {
                return false;
            }
        }
    }
    true
}

/// `j ↦ (j/q)·b`, the proportional share of `b` after `j` of `q` columns.
pub fn proportional_center(b: &[i64], q: usize) -> impl Fn(usize) -> Vec<Ratio<i128>> + '_ {
    move |j| {
        b.iter()
            .map(|&x| Ratio::new(j as i128 * x as i128, q.max(1) as i128))
            .collect()
    }
}

/// An ordering of `cols` whose prefixes satisfy
/// `‖psum(j) - (j/m)·s‖∞ ≤ bound`, if one exists.
///
/// Exhaustive over distinct orderings with prefix pruning; `m` is capped at
/// [`MAX_EXHAUSTIVE_COLUMNS`].
pub fn find_bounded_reordering(cols: &ColumnSequence, bound: i64) -> Result<Option<Vec<usize>>> {
    let m = cols.len();
    if m > MAX_EXHAUSTIVE_COLUMNS {
        return Err(Error::SizeLimit {
            what: "columns for exhaustive reordering",
            actual: m as u128,
            limit: MAX_EXHAUSTIVE_COLUMNS as u128,
        });
    }
    if m == 0 {
        return Ok(Some(Vec::new()));
    }
    let search = Search {
        cols,
        m: m as i128,
        limit: bound as i128 * m as i128,
    };
    let mut order = Vec::with_capacity(m);
    let mut used = vec![false; m];
    let mut psum = vec![0i128; cols.dim];
    Ok(search.dfs(&mut order, &mut used, &mut psum).then_some(order))
}

pub fn exists_bounded_reordering(cols: &ColumnSequence, bound: i64) -> Result<bool> {
    Ok(find_bounded_reordering(cols, bound)?.is_some())
}

struct Search<'a> {
    cols: &'a ColumnSequence,
    m: i128,
    /// `bound·m`; deviations are compared scaled by `m`.
    limit: i128,
}

impl Search<'_> {
    fn dfs(&self, order: &mut Vec<usize>, used: &mut [bool], psum: &mut [i128]) -> bool {
        let m = self.m as usize;
        if order.len() == m {
            return true;
        }
        let j = order.len() as i128 + 1;
        for c in 0..m {
            if used[c] {
                continue;
            }
            // identical unused columns lead to identical subtrees
            if (0..c).any(|p| !used[p] && self.cols.columns[p] == self.cols.columns[c]) {
                continue;
            }
            let col = &self.cols.columns[c];
            let ok = (0..self.cols.dim).all(|k| {
                let dev = self.m * (psum[k] + col[k] as i128) - j * self.cols.total[k] as i128;
                dev.abs() <= self.limit
            });
            if !ok {
                continue;
            }
            used[c] = true;
            order.push(c);
            for k in 0..self.cols.dim {
                psum[k] += col[k] as i128;
            }
            if self.dfs(order, used, psum) {
                return true;
            }
            for k in 0..self.cols.dim {
                psum[k] -= col[k] as i128;
            }
            order.pop();
            used[c] = false;
        }
        false
    }
}

/// Places the `w`-th column of block `e` at the `w`-th occurrence of `e` in
/// the schedule.
pub fn interleave_by_schedule(schedule: &BalancedSchedule, per_block: &[ColumnSequence]) -> Result<ColumnSequence> {
    if per_block.len() != schedule.symbols() {
        return Err(Error::DimensionMismatch(format!(
            "{} column sequences for {} symbols",
            per_block.len(),
            schedule.symbols()
        )));
    }
    for (e, seq) in per_block.iter().enumerate() {
        if seq.len() as u64 != schedule.counts()[e] {
            return Err(Error::DimensionMismatch(format!(
                "block {} has {} columns, schedule expects {}",
                e + 1,
                seq.len(),
                schedule.counts()[e]
            )));
        }
    }
    let dim = per_block.first().map_or(0, |s| s.dim);
    let mut next = vec![0usize; per_block.len()];
    let mut out = Vec::with_capacity(schedule.len());
    for &e in schedule.entries() {
        out.push(per_block[e].columns[next[e]].clone());
        next[e] += 1;
    }
    ColumnSequence::new(dim, out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    /// The balanced schedule meets its imbalance bounds.
    pub schedule_balanced: bool,
    /// Per block: a `2Δr`-bounded ordering of the solution's columns exists
    /// (`None` when the block is too large to search).
    pub block_reorderings: Vec<Option<bool>>,
    /// The interleaved sequence stays within the layer windows (`None` when
    /// some block was skipped).
    pub partial_sums_bounded: Option<bool>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.schedule_balanced
            && self.block_reorderings.iter().all(|b| b.unwrap_or(true))
            && self.partial_sums_bounded.unwrap_or(true)
    }
}

/// Audits a solution of an equality-form instance.
pub fn audit_solution(inst: &NFoldInstance, sol: &Solution) -> Result<AuditReport> {
    let counts: Vec<u64> = inst.b_local().iter().map(|&b| b.max(0) as u64).collect();
    let schedule = balance_counts(&counts);
    let schedule_balanced = verify_balance(&schedule);
    let r = inst.r();
    let delta = matrix_delta(inst);
    let bound = 2 * delta * r as i64;

    let mut block_reorderings = Vec::with_capacity(inst.n());
    let mut ordered = Vec::with_capacity(inst.n());
    for i in 0..inst.n() {
        let mut cols = Vec::new();
        for (k, &count) in sol.bricks[i].iter().enumerate() {
            for _ in 0..count {
                cols.push(inst.column(i, k));
            }
        }
        let seq = ColumnSequence::new(r, cols)?;
        if seq.len() > MAX_EXHAUSTIVE_COLUMNS {
            block_reorderings.push(None);
            continue;
        }
        match find_bounded_reordering(&seq, bound)? {
            Some(order) => {
                block_reorderings.push(Some(true));
                ordered.push(seq.reordered(&order));
            }
            None => block_reorderings.push(Some(false)),
        }
    }

    let partial_sums_bounded = if ordered.len() == inst.n() {
        let mixed = interleave_by_schedule(&schedule, &ordered)?;
        let (below, above) = window_slack(inst)?;
        let center = proportional_center(inst.b_top(), schedule.len());
        Some(partial_sum_check(&mixed, center, -below, above))
    } else {
        None
    };

    Ok(AuditReport {
        schedule_balanced,
        block_reorderings,
        partial_sums_bounded,
    })
}
