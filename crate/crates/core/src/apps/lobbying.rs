//! Lobbying: flip the fewest rows of a binary matrix to all ones so that
//! every column ends up with a strict majority of ones.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{NFoldInstance, Outcome, Relation};
use crate::reduction::solve_program;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LobbyingInstance {
    matrix: Vec<Vec<u8>>,
    columns: usize,
    k: u64,
}

impl LobbyingInstance {
    /// `matrix` is row-major with entries 0 or 1; every row needs the same
    /// length. `columns` is only consulted when the matrix has no rows.
    pub fn new(matrix: Vec<Vec<u8>>, columns: usize, k: u64) -> Result<Self> {
        let m = matrix.first().map_or(columns, Vec::len);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {m}",
                    i + 1,
                    row.len()
                )));
            }
            if row.iter().any(|&v| v > 1) {
                return Err(Error::Precondition(format!("row {} is not binary", i + 1)));
            }
        }
        Ok(LobbyingInstance { matrix, columns: m, k })
    }

    pub fn matrix(&self) -> &[Vec<u8>] {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn budget(&self) -> u64 {
        self.k
    }

    /// Distinct rows in lexicographic order with their multiplicities.
    pub fn row_types(&self) -> Vec<(Vec<u8>, u64)> {
        let mut types: BTreeMap<&[u8], u64> = BTreeMap::new();
        for row in &self.matrix {
            *types.entry(row).or_default() += 1;
        }
        types.into_iter().map(|(row, c)| (row.to_vec(), c)).collect()
    }

    /// Ones still missing per column for a strict majority.
    pub fn deficits(&self) -> Vec<i64> {
        let need = (self.rows() / 2 + 1) as i64;
        (0..self.columns)
            .map(|j| {
                let ones = self.matrix.iter().filter(|row| row[j] == 1).count() as i64;
                (need - ones).max(0)
            })
            .collect()
    }
}

/// Minimise the number of flipped rows subject to covering every deficit.
///
/// One block per row type with a single variable (how many rows of that
/// type get flipped); the global rows read `-Σ B_j·b ≤ -g_j` where `B_j`
/// marks a zero in column `j`.
pub fn lobbying_to_ilp(inst: &LobbyingInstance) -> Result<NFoldInstance> {
    let types = inst.row_types();
    let m = inst.columns();
    let mut blocks: Vec<Vec<Vec<i64>>> = types
        .iter()
        .map(|(row, _)| row.iter().map(|&v| vec![-i64::from(v == 0)]).collect())
        .collect();
    let mut b_local: Vec<i64> = types.iter().map(|&(_, c)| c as i64).collect();
    let mut cost = vec![vec![1i64]; types.len()];
    if blocks.is_empty() {
        blocks.push(vec![vec![0]; m]);
        b_local.push(0);
        cost.push(vec![0]);
    }
    let n = blocks.len();
    NFoldInstance::with_relations(
        blocks,
        inst.deficits().into_iter().map(|g| -g).collect(),
        vec![Relation::Le; m],
        b_local,
        vec![Relation::Le; n],
        cost,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LobbyingAnswer {
    /// Whether `k` flips suffice.
    pub yes: bool,
    /// Fewest flips that reach a majority everywhere, if any number does.
    pub optimum: Option<i64>,
    /// Flips per row type, in [`LobbyingInstance::row_types`] order.
    pub flips_per_type: Vec<i64>,
    /// Concrete zero-based rows to flip: the first rows of each type.
    pub flipped_rows: Vec<usize>,
}

pub fn lobbying_solve(inst: &LobbyingInstance) -> Result<LobbyingAnswer> {
    let program = lobbying_to_ilp(inst)?;
    let (outcome, _) = solve_program(&program, &super::options())?;
    let types = inst.row_types();
    let Outcome::Optimal(sol) = outcome else {
        return Ok(LobbyingAnswer {
            yes: false,
            optimum: None,
            flips_per_type: vec![0; types.len()],
            flipped_rows: Vec::new(),
        });
    };
    let flips_per_type: Vec<i64> = sol.bricks.iter().take(types.len()).map(|b| b[0]).collect();

    let mut flipped_rows = Vec::new();
    for ((row, _), &f) in types.iter().zip(&flips_per_type) {
        let same = inst.matrix().iter().enumerate().filter(|(_, r)| *r == row);
        flipped_rows.extend(same.take(f as usize).map(|(i, _)| i));
    }
    flipped_rows.sort_unstable();

    Ok(LobbyingAnswer {
        yes: sol.objective <= inst.budget() as i64,
        optimum: Some(sol.objective),
        flips_per_type,
        flipped_rows,
    })
}
