//! Instance generators and exhaustive domain checkers shared by the
//! integration tests.

#![allow(dead_code)]

use nfold::apps::{EquitableColoringInstance, LobbyingInstance, MultiStringsInstance};
use nfold::{NFoldInstance, Relation};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for random programs.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub n: usize,
    pub t: usize,
    pub r: usize,
    pub delta: i64,
    pub b: i64,
    pub cost: i64,
}

pub const SMALL: Limits = Limits {
    n: 3,
    t: 3,
    r: 2,
    delta: 2,
    b: 4,
    cost: 5,
};

struct Shape {
    blocks: Vec<Vec<Vec<i64>>>,
    b_local: Vec<i64>,
    cost: Vec<Vec<i64>>,
}

fn shape(rng: &mut ChaCha8Rng, lim: Limits, r: usize) -> Shape {
    let n = rng.gen_range(1..=lim.n);
    let t = rng.gen_range(1..=lim.t);
    let blocks = (0..n)
        .map(|_| {
            (0..r)
                .map(|_| (0..t).map(|_| rng.gen_range(-lim.delta..=lim.delta)).collect())
                .collect()
        })
        .collect();
    let b_local = (0..n).map(|_| rng.gen_range(0..=lim.b)).collect();
    let cost = (0..n)
        .map(|_| (0..t).map(|_| rng.gen_range(-lim.cost..=lim.cost)).collect())
        .collect();
    Shape { blocks, b_local, cost }
}

/// Random brick assignment whose local sums are at most (or, with `exact`,
/// equal to) the local right-hand sides.
fn random_bricks(rng: &mut ChaCha8Rng, s: &Shape, exact: &[bool]) -> Vec<Vec<i64>> {
    s.b_local
        .iter()
        .zip(exact)
        .map(|(&b, &eq)| {
            let t = s.cost[0].len();
            let mass = if eq { b } else { rng.gen_range(0..=b) };
            let mut x = vec![0i64; t];
            for _ in 0..mass {
                x[rng.gen_range(0..t)] += 1;
            }
            x
        })
        .collect()
}

fn row_sums(s: &Shape, x: &[Vec<i64>], r: usize) -> Vec<i64> {
    (0..r)
        .map(|k| {
            s.blocks
                .iter()
                .zip(x)
                .map(|(block, brick)| block[k].iter().zip(brick).map(|(a, v)| a * v).sum::<i64>())
                .sum()
        })
        .collect()
}

/// Equality-form program; about two thirds are built around a planted
/// feasible point so that both outcomes are common.
pub fn random_p1(rng: &mut ChaCha8Rng, lim: Limits) -> NFoldInstance {
    let r = rng.gen_range(0..=lim.r);
    let s = shape(rng, lim, r);
    let b_top = if rng.gen_bool(2.0 / 3.0) {
        let x = random_bricks(rng, &s, &vec![true; s.b_local.len()]);
        row_sums(&s, &x, r)
    } else {
        (0..r).map(|_| rng.gen_range(-lim.delta * lim.b..=lim.delta * lim.b)).collect()
    };
    NFoldInstance::equality(s.blocks, b_top, s.b_local, s.cost).unwrap()
}

/// Program with mixed global relations and `<=`/`=` local rows.
pub fn random_p2(rng: &mut ChaCha8Rng, lim: Limits) -> NFoldInstance {
    let r = rng.gen_range(0..=lim.r);
    let s = shape(rng, lim, r);
    let n = s.b_local.len();
    let local: Vec<Relation> = (0..n)
        .map(|_| *[Relation::Le, Relation::Eq].choose(rng).unwrap())
        .collect();
    let global: Vec<Relation> = (0..r)
        .map(|_| *[Relation::Le, Relation::Eq, Relation::Ge].choose(rng).unwrap())
        .collect();
    let b_top = if rng.gen_bool(2.0 / 3.0) {
        let exact: Vec<bool> = local.iter().map(|&l| l == Relation::Eq).collect();
        let x = random_bricks(rng, &s, &exact);
        let sums = row_sums(&s, &x, r);
        sums.iter()
            .zip(&global)
            .map(|(&v, rel)| match rel {
                Relation::Le => v + rng.gen_range(0..=2),
                Relation::Ge => v - rng.gen_range(0..=2),
                Relation::Eq => v,
            })
            .collect()
    } else {
        (0..r).map(|_| rng.gen_range(-lim.delta * lim.b..=lim.delta * lim.b)).collect()
    };
    NFoldInstance::with_relations(s.blocks, b_top, global, s.b_local, local, s.cost).unwrap()
}

/// Random multiset of `m` columns in `[-delta, delta]^r` summing to zero.
pub fn zero_sum_columns(rng: &mut ChaCha8Rng, r: usize, m: usize, delta: i64) -> Vec<Vec<i64>> {
    loop {
        let mut cols: Vec<Vec<i64>> = (0..m.saturating_sub(1))
            .map(|_| (0..r).map(|_| rng.gen_range(-delta..=delta)).collect())
            .collect();
        let last: Vec<i64> = (0..r).map(|k| -cols.iter().map(|c| c[k]).sum::<i64>()).collect();
        if last.iter().all(|v| v.abs() <= delta) {
            cols.push(last);
            cols.shuffle(rng);
            return cols;
        }
    }
}

/// Fewest rows whose flip gives every column a strict majority of ones.
pub fn lobbying_by_exhaustion(inst: &LobbyingInstance) -> Option<usize> {
    let a = inst.matrix();
    let w = a.len();
    let m = inst.columns();
    (0u32..1 << w)
        .filter(|mask| {
            (0..m).all(|j| {
                let ones = (0..w).filter(|&i| mask >> i & 1 == 1 || a[i][j] == 1).count();
                2 * ones > w
            })
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
}

/// Best objective over all output strings meeting the bounds.
pub fn multistrings_by_exhaustion(inst: &MultiStringsInstance) -> Option<i64> {
    let sigma = inst.delta().alphabet();
    let len = inst.len();
    let total = sigma.len().pow(len as u32);
    let mut best: Option<i64> = None;
    for code in 0..total {
        let mut c = code;
        let y: Vec<char> = (0..len)
            .map(|_| {
                let ch = sigma[c % sigma.len()];
                c /= sigma.len();
                ch
            })
            .collect();
        if inst.accepts(&y).unwrap() {
            let v = inst.objective(&y).unwrap();
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    best
}

/// Whether any assignment of `h` colors is proper with class sizes within one.
pub fn equitable_by_exhaustion(inst: &EquitableColoringInstance) -> bool {
    let v = inst.vertices();
    let h = inst.colors();
    let total = h.pow(v as u32);
    (0..total).any(|code| {
        let mut c = code;
        let coloring: Vec<usize> = (0..v)
            .map(|_| {
                let col = c % h;
                c /= h;
                col
            })
            .collect();
        inst.is_equitable(&coloring)
    })
}

/// Every simple graph on `v` labelled vertices, as edge lists.
pub fn all_graphs(v: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect()
        })
        .collect()
}

/// Every binary matrix with `w` rows and `m` columns.
pub fn all_matrices(w: usize, m: usize) -> Vec<Vec<Vec<u8>>> {
    (0u32..1 << (w * m))
        .map(|mask| {
            (0..w)
                .map(|i| (0..m).map(|j| (mask >> (i * m + j) & 1) as u8).collect())
                .collect()
        })
        .collect()
}

/// Every string over `sigma` of length `len`.
pub fn all_strings(sigma: &[char], len: usize) -> Vec<Vec<char>> {
    let total = sigma.len().pow(len as u32);
    (0..total)
        .map(|code| {
            let mut c = code;
            (0..len)
                .map(|_| {
                    let ch = sigma[c % sigma.len()];
                    c /= sigma.len();
                    ch
                })
                .collect()
        })
        .collect()
}
