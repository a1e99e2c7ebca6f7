//! Rewriting programs with inequalities into equality form.
//!
//! Global `>=` rows are negated into `<=` rows. Every block then gains a
//! zero top column acting as slack for its local row and `r` identity
//! columns, and one extra block `(0 | 0 | I_r)` collects the slack of the
//! global rows. Slack that is not allowed (local `=` rows, global `=` rows)
//! costs the penalty `ψ`, large enough that any solution paying it once is
//! recognisably worse than every genuine solution.

use crate::dag::{self, SolveOptions, SolveStats};
use crate::error::{Checked, Error, Result};
use crate::model::{Bricks, InstanceParts, NFoldInstance, Outcome, Relation, Solution};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionMap {
    /// Penalty cost of forbidden slack.
    pub psi: i64,
    /// `(n, t, r)` of the original program.
    pub original_dims: (usize, usize, usize),
    /// Global rows that were `>=` and got negated.
    pub negated_rows: Vec<usize>,
    /// Right-hand side of the appended block.
    pub extra_mass: i64,
}

impl ReductionMap {
    /// Column of the local slack variable inside each block; in the appended
    /// block it is the filler that absorbs unused mass.
    pub fn local_slack_column(&self) -> usize {
        self.original_dims.1
    }

    /// Column of the slack variable for global row `k`.
    pub fn global_slack_column(&self, k: usize) -> usize {
        self.original_dims.1 + 1 + k
    }

    /// Index of the appended block.
    pub fn extra_block(&self) -> usize {
        self.original_dims.0
    }
}

/// `ψ = 2 + 2·‖c‖∞·q`.
///
/// Any genuine solution costs at most `‖c‖∞·q < ψ/2`; any solution that uses
/// a penalised slack unit costs at least `ψ - ‖c‖∞·q > ψ/2`.
pub fn penalty(inst: &NFoldInstance) -> Result<i64> {
    2i64.add_c(2i64.mul_c(inst.cost_norm())?.mul_c(inst.q().max(0))?)
}

pub fn reduce_to_equality(inst: &NFoldInstance) -> Result<(NFoldInstance, ReductionMap)> {
    if let Some(i) = inst.local_relations().iter().position(|&r| r == Relation::Ge) {
        return Err(Error::UnsupportedRelation(format!("local row {} uses >=", i + 1)));
    }
    inst.ensure_valid()?;

    let (n, t, r) = (inst.n(), inst.t(), inst.r());
    let psi = penalty(inst)?;
    let q = inst.q();

    let mut blocks: Vec<Vec<Vec<i64>>> = inst.blocks().to_vec();
    let mut b_top = inst.b_top().to_vec();
    let mut negated_rows = Vec::new();
    for (k, &rel) in inst.global_relations().iter().enumerate() {
        if rel == Relation::Ge {
            negated_rows.push(k);
            for block in &mut blocks {
                for v in &mut block[k] {
                    *v = v.checked_neg().ok_or(Error::Overflow)?;
                }
            }
            b_top[k] = b_top[k].checked_neg().ok_or(Error::Overflow)?;
        }
    }
    let row_is_eq: Vec<bool> = inst.global_relations().iter().map(|&r| r == Relation::Eq).collect();

    let widen = |row: &[i64], k: usize| -> Vec<i64> {
        let mut out = Vec::with_capacity(t + r + 1);
        out.extend_from_slice(row);
        out.push(0);
        out.extend((0..r).map(|e| i64::from(e == k)));
        out
    };

    let mut new_blocks = Vec::with_capacity(n + 1);
    let mut new_cost = Vec::with_capacity(n + 1);
    for (i, block) in blocks.iter().enumerate() {
        new_blocks.push(block.iter().enumerate().map(|(k, row)| widen(row, k)).collect::<Vec<_>>());
        let mut c = inst.cost()[i].clone();
        c.push(if inst.local_relations()[i] == Relation::Le { 0 } else { psi });
        c.extend(std::iter::repeat_n(psi, r));
        new_cost.push(c);
    }
    let zeros = vec![0i64; t];
    new_blocks.push((0..r).map(|k| widen(&zeros, k)).collect());
    let mut extra_cost = vec![0i64; t + 1];
    extra_cost.extend(row_is_eq.iter().map(|&eq| if eq { psi } else { 0 }));
    new_cost.push(extra_cost);

    // Slack of row k is b_top[k] - A[k]·y ≤ b_top[k] + Δ·q.
    let mut extra_mass = 0i64;
    let dq = inst.delta().mul_c(q)?;
    for &b in &b_top {
        extra_mass = extra_mass.add_c(b.add_c(dq)?.max(0))?;
    }
    let mut b_local = inst.b_local().to_vec();
    b_local.push(extra_mass);

    let reduced = NFoldInstance::from_parts(InstanceParts {
        n: n + 1,
        t: t + r + 1,
        r,
        blocks: new_blocks,
        b_top,
        global_relations: None,
        b_local,
        local_relations: None,
        cost: new_cost,
    })?;
    let map = ReductionMap {
        psi,
        original_dims: (n, t, r),
        negated_rows,
        extra_mass,
    };
    Ok((reduced, map))
}

/// Recovers a solution of the original program from one of the reduced program.
pub fn lift_solution(map: &ReductionMap, sol: &Solution) -> Result<Outcome> {
    let (n, t, r) = map.original_dims;
    if sol.bricks.len() != n + 1 || sol.bricks.iter().any(|b| b.len() != t + r + 1) {
        return Err(Error::DimensionMismatch(format!(
            "reduced solution is not {}x{}",
            n + 1,
            t + r + 1
        )));
    }
    if sol.objective >= map.psi / 2 {
        return Ok(Outcome::Infeasible);
    }
    let bricks: Bricks = sol.bricks[..n].iter().map(|b| b[..t].to_vec()).collect();
    Ok(Outcome::Optimal(Solution {
        bricks,
        objective: sol.objective,
    }))
}

/// Extends a feasible solution of the original program to the reduced one,
/// setting every slack to what the solution leaves over.
pub fn embed_solution(original: &NFoldInstance, map: &ReductionMap, y: &[Vec<i64>]) -> Result<Bricks> {
    let (n, t, r) = map.original_dims;
    if y.len() != n || y.iter().any(|b| b.len() != t) {
        return Err(Error::DimensionMismatch(format!("solution is not {n}x{t}")));
    }
    let mut x = vec![vec![0i64; t + r + 1]; n + 1];
    for i in 0..n {
        x[i][..t].copy_from_slice(&y[i]);
        let used = y[i].iter().try_fold(0i64, |acc, &v| acc.add_c(v))?;
        x[i][t] = original.b_local()[i] - used;
    }
    let mut slack_total = 0i64;
    for k in 0..r {
        let sign = if map.negated_rows.contains(&k) { -1 } else { 1 };
        let mut row = 0i64;
        for (i, brick) in y.iter().enumerate() {
            for (&a, &v) in original.block(i)[k].iter().zip(brick) {
                row = row.add_c(a.mul_c(v)?)?;
            }
        }
        let slack = sign * (original.b_top()[k] - row);
        x[n][t + 1 + k] = slack;
        slack_total = slack_total.add_c(slack)?;
    }
    x[n][t] = map.extra_mass - slack_total;
    Ok(x)
}

/// Solves any supported program: equality form goes straight to the layered
/// solver, anything else through [`reduce_to_equality`] and back.
pub fn solve_program(inst: &NFoldInstance, opts: &SolveOptions) -> Result<(Outcome, SolveStats)> {
    if inst.is_equality_form() {
        return dag::solve_with_options(inst, opts);
    }
    let (reduced, map) = reduce_to_equality(inst)?;
    let (outcome, stats) = dag::solve_with_options(&reduced, opts)?;
    let lifted = match outcome {
        Outcome::Optimal(sol) => lift_solution(&map, &sol)?,
        Outcome::Infeasible => Outcome::Infeasible,
    };
    Ok((lifted, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn toy() -> NFoldInstance {
        NFoldInstance::equality(vec![vec![vec![1, 0]]], vec![1], vec![2], vec![vec![5, 1]]).unwrap()
    }

    #[test]
    fn dimensions_grow_as_expected() {
        let inst = NFoldInstance::with_relations(
            vec![vec![vec![1, 0, 2], vec![0, 1, 1]]; 2],
            vec![2, 1],
            vec![Relation::Le, Relation::Ge],
            vec![1, 2],
            vec![Relation::Eq, Relation::Le],
            vec![vec![1, 2, 3]; 2],
        )
        .unwrap();
        let (red, map) = reduce_to_equality(&inst).unwrap();
        assert_eq!((red.n(), red.t(), red.r()), (3, 6, 2));
        assert!(red.is_equality_form());
        assert!(red.validate().is_ok());
        assert_eq!(red.delta(), inst.delta());
        assert_eq!(red.q(), inst.q() + map.extra_mass);
        assert_eq!(map.negated_rows, vec![1]);
        assert_eq!(red.b_top(), &[2, -1]);
    }

    #[test]
    fn penalty_value() {
        let inst = NFoldInstance::equality(vec![vec![vec![0, 1]]], vec![0], vec![2], vec![vec![5, -3]]).unwrap();
        assert_eq!(penalty(&inst).unwrap(), 22);
    }

    #[test]
    fn equality_input_keeps_optimum() {
        let inst = toy();
        let (red, map) = reduce_to_equality(&inst).unwrap();
        assert_eq!(map.psi, 22);
        let direct = oracle::brute_force_solve(&inst).unwrap();
        let via = oracle::brute_force_solve(&red).unwrap();
        assert_eq!(direct.objective(), Some(6));
        assert_eq!(via.objective(), Some(6));
        let lifted = lift_solution(&map, via.solution().unwrap()).unwrap();
        assert_eq!(lifted.objective(), Some(6));
        assert_eq!(lifted.solution().unwrap().bricks, vec![vec![1, 1]]);
    }

    #[test]
    fn penalised_solution_lifts_to_infeasible() {
        let (_, map) = reduce_to_equality(&toy()).unwrap();
        let mut bricks = vec![vec![0i64; 4]; 2];
        bricks[0][2] = 2;
        let sol = Solution {
            bricks,
            objective: map.psi,
        };
        assert_eq!(lift_solution(&map, &sol).unwrap(), Outcome::Infeasible);
    }

    #[test]
    fn zero_slack_projection() {
        let (red, map) = reduce_to_equality(&toy()).unwrap();
        let x = embed_solution(&toy(), &map, &[vec![1, 1]]).unwrap();
        assert!(red.check_feasible(&x).unwrap());
        let sol = Solution::evaluate(&red, x).unwrap();
        let lifted = lift_solution(&map, &sol).unwrap();
        assert_eq!(lifted.solution().unwrap().bricks, vec![vec![1, 1]]);
    }

    #[test]
    fn local_ge_is_rejected() {
        let inst = NFoldInstance::with_relations(
            vec![vec![vec![1]]],
            vec![0],
            vec![Relation::Eq],
            vec![1],
            vec![Relation::Ge],
            vec![vec![0]],
        )
        .unwrap();
        assert!(matches!(reduce_to_equality(&inst), Err(Error::UnsupportedRelation(_))));
    }

    #[test]
    fn lift_checks_dimensions() {
        let (_, map) = reduce_to_equality(&toy()).unwrap();
        let sol = Solution {
            bricks: vec![vec![0; 2]],
            objective: 0,
        };
        assert!(matches!(lift_solution(&map, &sol), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn negative_costs_do_not_hide_penalties() {
        // Two blocks with cheap negative columns; the global = row is
        // satisfiable only with zero mass in block 2's second column.
        let inst = NFoldInstance::with_relations(
            vec![vec![vec![1, 0]], vec![vec![0, 1]]],
            vec![1],
            vec![Relation::Eq],
            vec![1, 2],
            vec![Relation::Eq, Relation::Le],
            vec![vec![0, -5], vec![0, -5]],
        )
        .unwrap();
        let expected = oracle::brute_force_solve_p2(&inst).unwrap();
        let (got, _) = solve_program(&inst, &SolveOptions::sequential()).unwrap();
        assert_eq!(got.objective(), expected.objective());
    }
}
