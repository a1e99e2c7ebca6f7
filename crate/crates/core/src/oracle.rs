//! Exhaustive reference solvers.
//!
//! Every brick is enumerated as a composition of its local right-hand side
//! (or of every value up to it, for `<=` local rows) in lexicographic order;
//! the first optimum found is kept, so ties resolve to the lexicographically
//! smallest assignment. Nothing here touches the balancing or layered-graph
//! code.

use crate::error::{Checked, Error, Result};
use crate::model::{NFoldInstance, Outcome, Relation, Solution};

/// Default cap on enumerated candidates.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Solves an equality-form instance by enumeration.
pub fn brute_force_solve(inst: &NFoldInstance) -> Result<Outcome> {
    brute_force_solve_with_budget(inst, DEFAULT_BUDGET)
}

pub fn brute_force_solve_with_budget(inst: &NFoldInstance, budget: u128) -> Result<Outcome> {
    if !inst.is_equality_form() {
        return Err(Error::Precondition("expected an equality-form instance".into()));
    }
    brute_force_solve_p2_with_budget(inst, budget)
}

/// Solves an instance with arbitrary supported relations by enumeration.
pub fn brute_force_solve_p2(inst: &NFoldInstance) -> Result<Outcome> {
    brute_force_solve_p2_with_budget(inst, DEFAULT_BUDGET)
}

pub fn brute_force_solve_p2_with_budget(inst: &NFoldInstance, budget: u128) -> Result<Outcome> {
    inst.ensure_valid()?;
    let size = enumeration_size(inst);
    if size > budget {
        return Err(Error::SizeLimit {
            what: "oracle candidates",
            actual: size,
            limit: budget,
        });
    }

    let n = inst.n();
    let mut mass_after = vec![0i64; n + 1];
    for i in (0..n).rev() {
        mass_after[i] = mass_after[i + 1] + inst.b_local()[i];
    }
    let mut e = Enumerator {
        inst,
        mass_after,
        x: inst.zero_bricks(),
        acc: vec![0i128; inst.r()],
        best: None,
    };
    e.block(0, 0)?;
    Ok(match e.best {
        Some((bricks, objective)) => Outcome::Optimal(Solution { bricks, objective }),
        None => Outcome::Infeasible,
    })
}

/// Number of candidate assignments the oracle would visit without pruning.
pub fn enumeration_size(inst: &NFoldInstance) -> u128 {
    let t = inst.t() as u128;
    let mut total: u128 = 1;
    for (&b, &rel) in inst.b_local().iter().zip(inst.local_relations()) {
        let b = b.max(0) as u128;
        // compositions of b into t parts, or of every value ≤ b
        let count = match rel {
            Relation::Le => binomial(b + t, t),
            _ => binomial(b + t.saturating_sub(1), t.saturating_sub(1)),
        };
        total = total.saturating_mul(count);
    }
    total
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

struct Enumerator<'a> {
    inst: &'a NFoldInstance,
    /// `mass_after[i]`: total local right-hand side of blocks `i..n`.
    mass_after: Vec<i64>,
    x: Vec<Vec<i64>>,
    acc: Vec<i128>,
    best: Option<(Vec<Vec<i64>>, i64)>,
}

impl Enumerator<'_> {
    fn block(&mut self, i: usize, cost: i64) -> Result<()> {
        if i == self.inst.n() {
            return self.leaf(cost);
        }
        self.var(i, 0, self.inst.b_local()[i], cost)
    }

    fn var(&mut self, i: usize, j: usize, rem: i64, cost: i64) -> Result<()> {
        if self.cannot_close(rem + self.mass_after[i + 1]) {
            return Ok(());
        }
        let t = self.inst.t();
        let last = j + 1 == t;
        let forced = last && self.inst.local_relations()[i] == Relation::Eq;
        let from = if forced { rem } else { 0 };
        for v in from..=rem {
            self.x[i][j] = v;
            self.shift(i, j, v);
            let c = cost.add_c(self.inst.cost()[i][j].mul_c(v)?)?;
            let res = if last {
                self.block(i + 1, c)
            } else {
                self.var(i, j + 1, rem - v, c)
            };
            self.shift(i, j, -v);
            res?;
        }
        self.x[i][j] = 0;
        Ok(())
    }

    fn shift(&mut self, i: usize, j: usize, v: i64) {
        if v == 0 {
            return;
        }
        let block = self.inst.block(i);
        for (k, a) in self.acc.iter_mut().enumerate() {
            *a += block[k][j] as i128 * v as i128;
        }
    }

    /// An equality row whose gap exceeds `Δ·remaining` can no longer be met.
    fn cannot_close(&self, remaining: i64) -> bool {
        let reach = self.inst.delta() as i128 * remaining as i128;
        self.inst
            .global_relations()
            .iter()
            .zip(self.inst.b_top())
            .zip(&self.acc)
            .any(|((&rel, &b), &a)| rel == Relation::Eq && (b as i128 - a).abs() > reach)
    }

    fn leaf(&mut self, cost: i64) -> Result<()> {
        let ok = self
            .inst
            .global_relations()
            .iter()
            .zip(self.inst.b_top())
            .zip(&self.acc)
            .all(|((&rel, &b), &a)| rel.holds(a, b as i128));
        if ok && self.best.as_ref().is_none_or(|(_, c)| cost < *c) {
            self.best = Some((self.x.clone(), cost));
        }
        Ok(())
    }
}
