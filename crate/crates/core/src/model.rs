//! Instance and solution data model.
//!
//! An [`NFoldInstance`] describes the program
//!
//! ```text
//! min  Σᵢ cᵢᵀ xᵢ
//! s.t. Σᵢ Tᵢ xᵢ  ⋄  b_top          (r global rows)
//!      1ᵀ xᵢ     ⋄  b_local[i]     (one local row per block)
//!      xᵢ ∈ Z^t, xᵢ ≥ 0
//! ```
//!
//! The all-ones diagonal block is implicit. When every relation is `=` the
//! instance is in equality form and can be handed to [`crate::dag::solve`]
//! directly; otherwise it goes through [`crate::reduction`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Checked, Error, Result};

/// Row-major integer matrix.
pub type Matrix = Vec<Vec<i64>>;

/// Brick-structured assignment: `x[i][j]` is variable `j` of block `i`.
pub type Bricks = Vec<Vec<i64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: i128, rhs: i128) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Raw program data, also the on-disk instance schema.
///
/// Relations may be omitted, in which case every row is an equality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceParts {
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub blocks: Vec<Matrix>,
    pub b_top: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global_relations: Option<Vec<Relation>>,
    pub b_local: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_relations: Option<Vec<Relation>>,
    pub cost: Matrix,
}

/// A combinatorial n-fold program.
///
/// Construction never rejects malformed shapes, so that [`validate`] can
/// report them; every solver validates before doing any work.
///
/// [`validate`]: NFoldInstance::validate
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NFoldInstance {
    n: usize,
    t: usize,
    r: usize,
    blocks: Vec<Matrix>,
    b_top: Vec<i64>,
    b_local: Vec<i64>,
    cost: Matrix,
    global_relations: Vec<Relation>,
    local_relations: Vec<Relation>,
    delta: i64,
    q: i64,
}

impl NFoldInstance {
    pub fn from_parts(parts: InstanceParts) -> Result<Self> {
        let InstanceParts {
            n,
            t,
            r,
            blocks,
            b_top,
            global_relations,
            b_local,
            local_relations,
            cost,
        } = parts;

        let mut delta: u64 = 0;
        for value in blocks.iter().flatten().flatten() {
            delta = delta.max(value.unsigned_abs());
        }
        let delta = i64::try_from(delta).map_err(|_| Error::Overflow)?;

        let mut q: i64 = 0;
        for &b in &b_local {
            q = q.add_c(b)?;
        }

        Ok(NFoldInstance {
            global_relations: global_relations.unwrap_or_else(|| vec![Relation::Eq; r]),
            local_relations: local_relations.unwrap_or_else(|| vec![Relation::Eq; n]),
            n,
            t,
            r,
            blocks,
            b_top,
            b_local,
            cost,
            delta,
            q,
        })
    }

    /// Equality-form instance; `n`, `t` and `r` are read off the data.
    pub fn equality(blocks: Vec<Matrix>, b_top: Vec<i64>, b_local: Vec<i64>, cost: Matrix) -> Result<Self> {
        let n = blocks.len();
        let t = cost.first().map_or(0, Vec::len);
        let r = b_top.len();
        Self::from_parts(InstanceParts {
            n,
            t,
            r,
            blocks,
            b_top,
            global_relations: None,
            b_local,
            local_relations: None,
            cost,
        })
    }

    /// Same as [`equality`](Self::equality) but with explicit relations.
    pub fn with_relations(
        blocks: Vec<Matrix>,
        b_top: Vec<i64>,
        global_relations: Vec<Relation>,
        b_local: Vec<i64>,
        local_relations: Vec<Relation>,
        cost: Matrix,
    ) -> Result<Self> {
        let n = blocks.len();
        let t = cost.first().map_or(0, Vec::len);
        let r = b_top.len();
        Self::from_parts(InstanceParts {
            n,
            t,
            r,
            blocks,
            b_top,
            global_relations: Some(global_relations),
            b_local,
            local_relations: Some(local_relations),
            cost,
        })
    }

    pub fn to_parts(&self) -> InstanceParts {
        InstanceParts {
            n: self.n,
            t: self.t,
            r: self.r,
            blocks: self.blocks.clone(),
            b_top: self.b_top.clone(),
            global_relations: Some(self.global_relations.clone()),
            b_local: self.b_local.clone(),
            local_relations: Some(self.local_relations.clone()),
            cost: self.cost.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn t(&self) -> usize {
        self.t
    }
    pub fn r(&self) -> usize {
        self.r
    }
    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }
    pub fn block(&self, i: usize) -> &Matrix {
        &self.blocks[i]
    }
    pub fn b_top(&self) -> &[i64] {
        &self.b_top
    }
    pub fn b_local(&self) -> &[i64] {
        &self.b_local
    }
    pub fn cost(&self) -> &Matrix {
        &self.cost
    }
    pub fn global_relations(&self) -> &[Relation] {
        &self.global_relations
    }
    pub fn local_relations(&self) -> &[Relation] {
        &self.local_relations
    }

    /// Largest absolute entry over all top blocks.
    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// Sum of the local right-hand sides.
    pub fn q(&self) -> i64 {
        self.q
    }

    /// Largest absolute cost entry.
    pub fn cost_norm(&self) -> i64 {
        let m = self
            .cost
            .iter()
            .flatten()
            .map(|c| c.unsigned_abs())
            .max()
            .unwrap_or(0);
        i64::try_from(m).unwrap_or(i64::MAX)
    }

    /// True iff every relation is an equality.
    pub fn is_equality_form(&self) -> bool {
        self.global_relations.iter().all(|&r| r == Relation::Eq)
            && self.local_relations.iter().all(|&r| r == Relation::Eq)
    }

    /// Column `k` of block `i`. Assumes a validated instance.
    pub fn column(&self, i: usize, k: usize) -> Vec<i64> {
        self.blocks[i].iter().map(|row| row[k]).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let dim = |v: &mut Vec<Violation>, msg: String| v.push(Violation::DimensionMismatch(msg));

        if self.n == 0 {
            dim(&mut v, "n must be positive".into());
        }
        if self.t == 0 {
            dim(&mut v, "t must be positive".into());
        }
        if self.blocks.len() != self.n {
            dim(&mut v, format!("{} blocks given, n = {}", self.blocks.len(), self.n));
        }
        for (i, block) in self.blocks.iter().enumerate() {
            if block.len() != self.r {
                dim(&mut v, format!("block {} has {} rows, r = {}", i + 1, block.len(), self.r));
            }
            for (k, row) in block.iter().enumerate() {
                if row.len() != self.t {
                    dim(
                        &mut v,
                        format!("block {} row {} has {} columns, t = {}", i + 1, k + 1, row.len(), self.t),
                    );
                }
            }
        }
        if self.b_top.len() != self.r {
            dim(&mut v, format!("b_top has length {}, r = {}", self.b_top.len(), self.r));
        }
        if self.b_local.len() != self.n {
            dim(&mut v, format!("b_local has length {}, n = {}", self.b_local.len(), self.n));
        }
        if self.cost.len() != self.n {
            dim(&mut v, format!("{} cost bricks given, n = {}", self.cost.len(), self.n));
        }
        for (i, c) in self.cost.iter().enumerate() {
            if c.len() != self.t {
                dim(&mut v, format!("cost brick {} has length {}, t = {}", i + 1, c.len(), self.t));
            }
        }
        if self.global_relations.len() != self.r {
            dim(
                &mut v,
                format!("{} global relations given, r = {}", self.global_relations.len(), self.r),
            );
        }
        if self.local_relations.len() != self.n {
            dim(
                &mut v,
                format!("{} local relations given, n = {}", self.local_relations.len(), self.n),
            );
        }
        for (i, rel) in self.local_relations.iter().enumerate() {
            if *rel == Relation::Ge {
                v.push(Violation::UnsupportedRelation { block: i });
            }
        }
        for (i, &b) in self.b_local.iter().enumerate() {
            if b < 0 {
                v.push(Violation::LocallyInfeasible { block: i, rhs: b });
            }
        }
        ValidationReport { violations: v }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::Invalid(report))
        }
    }

    fn check_dims(&self, x: &[Vec<i64>]) -> Result<()> {
        if x.len() != self.n || x.iter().any(|b| b.len() != self.t) {
            return Err(Error::DimensionMismatch(format!(
                "assignment is not {}x{}",
                self.n, self.t
            )));
        }
        Ok(())
    }

    /// `Σᵢ Σⱼ c[i][j]·x[i][j]` with overflow checking.
    pub fn objective_value(&self, x: &[Vec<i64>]) -> Result<i64> {
        self.check_dims(x)?;
        let mut total: i64 = 0;
        for (c, xi) in self.cost.iter().zip(x) {
            for (&cj, &xj) in c.iter().zip(xi) {
                total = total.add_c(cj.mul_c(xj)?)?;
            }
        }
        Ok(total)
    }

    /// Whether `x` is non-negative and satisfies every global and local row.
    pub fn check_feasible(&self, x: &[Vec<i64>]) -> Result<bool> {
        self.check_dims(x)?;
        if x.iter().flatten().any(|&v| v < 0) {
            return Ok(false);
        }
        for (i, xi) in x.iter().enumerate() {
            let mut sum: i128 = 0;
            for &v in xi {
                sum = sum.add_c(v as i128)?;
            }
            if !self.local_relations[i].holds(sum, self.b_local[i] as i128) {
                return Ok(false);
            }
        }
        for k in 0..self.r {
            let mut row: i128 = 0;
            for (block, xi) in self.blocks.iter().zip(x) {
                for (&a, &v) in block[k].iter().zip(xi) {
                    row = row.add_c((a as i128).mul_c(v as i128)?)?;
                }
            }
            if !self.global_relations[k].holds(row, self.b_top[k] as i128) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The all-zero assignment.
    pub fn zero_bricks(&self) -> Bricks {
        vec![vec![0; self.t]; self.n]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DimensionMismatch(String),
    LocallyInfeasible { block: usize, rhs: i64 },
    UnsupportedRelation { block: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            Violation::LocallyInfeasible { block, rhs } => write!(
                f,
                "locally infeasible: block {} has right-hand side {rhs} < 0",
                block + 1
            ),
            Violation::UnsupportedRelation { block } => {
                write!(f, "unsupported relation: local row {} uses >=", block + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("OK");
        }
        for (idx, v) in self.violations.iter().enumerate() {
            if idx > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub bricks: Bricks,
    pub objective: i64,
}

impl Solution {
    /// Wraps `bricks`, computing the objective from the instance costs.
    pub fn evaluate(inst: &NFoldInstance, bricks: Bricks) -> Result<Self> {
        let objective = inst.objective_value(&bricks)?;
        Ok(Solution { bricks, objective })
    }
}

/// Result of a solve: an optimal solution or a proof-free "no solution".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Optimal(Solution),
    Infeasible,
}

impl Outcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            Outcome::Optimal(s) => Some(s),
            Outcome::Infeasible => None,
        }
    }

    pub fn into_solution(self) -> Option<Solution> {
        match self {
            Outcome::Optimal(s) => Some(s),
            Outcome::Infeasible => None,
        }
    }

    pub fn objective(&self) -> Option<i64> {
        self.solution().map(|s| s.objective)
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Optimal(_))
    }
}
