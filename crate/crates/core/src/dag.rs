//! Layered shortest-path solver for equality-form programs.
//!
//! The balanced schedule fixes which block contributes the column placed at
//! each position `j = 1..q`. A vertex of layer `j` is a partial-sum vector
//! `v ∈ Z^r` inside the layer window
//!
//! ```text
//! (j/q)·b_top[k] - nΔ(n+2r)  ≤  v[k]  ≤  (j/q)·b_top[k] + nΔ(1+2r)
//! ```
//!
//! and an arc from layer `j-1` adds one column of the scheduled block, weighted
//! by that column's cost. Every optimal solution has an ordering whose partial
//! sums stay inside the windows, so the cheapest path from the origin to
//! `b_top` at layer `q` is an optimal solution.
//!
//! Layers are kept sparse: only vertices reachable from the origin are
//! stored, as a sorted list of packed window offsets. With
//! [`SolveOptions::prune_to_target`] vertices that cannot reach `b_top` with
//! the remaining scheduled blocks are dropped as well; this never removes a
//! vertex of an origin-to-target path.

use std::time::{Duration, Instant};

use crate::balancer::{balance_counts, BalancedSchedule};
use crate::error::{Checked, Error, Result};
use crate::model::{NFoldInstance, Outcome, Solution};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sources per work unit when a layer is expanded in parallel.
#[cfg(feature = "parallel")]
const PAR_CHUNK: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    /// Extra slack added to both sides of every window.
    pub window_padding: i64,
    /// Drop vertices from which `b_top` is unreachable.
    pub prune_to_target: bool,
    /// Expand layers on the rayon pool. Ignored without the `parallel` feature.
    pub parallel: bool,
    /// Upper bound on stored vertices over all layers.
    pub max_vertices: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            window_padding: 0,
            prune_to_target: true,
            parallel: cfg!(feature = "parallel"),
            max_vertices: 100_000_000,
        }
    }
}

impl SolveOptions {
    pub fn sequential() -> Self {
        SolveOptions {
            parallel: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Layers processed, `q + 1`.
    pub layers: usize,
    /// Vertices stored over all layers, the origin included.
    pub vertices: u64,
    /// Arcs relaxed into an in-window vertex.
    pub relaxations: u64,
    pub wall_time: Duration,
}

/// Window constants `(nΔ(n+2r), nΔ(1+2r))`.
///
/// `Δ` here is the largest entry of the whole constraint matrix; the implicit
/// diagonal ones make it at least 1.
pub fn window_slack(inst: &NFoldInstance) -> Result<(i64, i64)> {
    let n = inst.n() as i64;
    let r = inst.r() as i64;
    let nd = n.mul_c(matrix_delta(inst))?;
    let below = nd.mul_c(n.add_c(2i64.mul_c(r)?)?)?;
    let above = nd.mul_c(1i64.add_c(2i64.mul_c(r)?)?)?;
    Ok((below, above))
}

pub(crate) fn matrix_delta(inst: &NFoldInstance) -> i64 {
    inst.delta().max(1)
}

/// Integer interval of coordinate `k` (zero-based) at layer `j ∈ [0, q]`.
pub fn window_bounds(inst: &NFoldInstance, j: u64, k: usize) -> Result<(i64, i64)> {
    window_bounds_padded(inst, j, k, 0)
}

pub fn window_bounds_padded(inst: &NFoldInstance, j: u64, k: usize, padding: i64) -> Result<(i64, i64)> {
    let q = inst.q();
    if q <= 0 {
        return Err(Error::Precondition("window bounds need q ≥ 1".into()));
    }
    if j > q as u64 || k >= inst.r() {
        return Err(Error::Precondition(format!("layer {j}, coordinate {k} out of range")));
    }
    let (below, above) = window_slack(inst)?;
    let scaled = (j as i128).mul_c(inst.b_top()[k] as i128)?;
    let q = q as i128;
    let floor = scaled.div_euclid(q);
    let ceil = -(-scaled).div_euclid(q);
    let lo = ceil - below as i128 - padding as i128;
    let hi = floor + above as i128 + padding as i128;
    let lo = i64::try_from(lo).map_err(|_| Error::Overflow)?;
    let hi = i64::try_from(hi).map_err(|_| Error::Overflow)?;
    Ok((lo, hi))
}

/// `1 + q·(nΔ(n+1+4r))^r`, the vertex bound of the layered graph.
pub fn vertex_bound(inst: &NFoldInstance) -> Option<u128> {
    let n = inst.n() as u128;
    let r = inst.r() as u32;
    let width = n
        .checked_mul(matrix_delta(inst) as u128)?
        .checked_mul(n + 1 + 4 * r as u128)?;
    let per_layer = width.checked_pow(r)?;
    (inst.q().max(0) as u128).checked_mul(per_layer)?.checked_add(1)
}

pub fn solve(inst: &NFoldInstance) -> Result<Outcome> {
    solve_with_options(inst, &SolveOptions::default()).map(|(o, _)| o)
}

pub fn solve_with_stats(inst: &NFoldInstance) -> Result<(Outcome, SolveStats)> {
    solve_with_options(inst, &SolveOptions::default())
}

/// Solves a batch of independent instances, in parallel when available.
pub fn solve_batch(instances: &[NFoldInstance], opts: &SolveOptions) -> Vec<Result<(Outcome, SolveStats)>> {
    let inner = SolveOptions {
        parallel: false,
        ..opts.clone()
    };
    #[cfg(feature = "parallel")]
    if opts.parallel {
        return instances.par_iter().map(|i| solve_with_options(i, &inner)).collect();
    }
    instances.iter().map(|i| solve_with_options(i, &inner)).collect()
}

pub fn solve_with_options(inst: &NFoldInstance, opts: &SolveOptions) -> Result<(Outcome, SolveStats)> {
    let started = Instant::now();
    inst.ensure_valid()?;
    if !inst.is_equality_form() {
        return Err(Error::Precondition(
            "layered solver needs an equality-form instance; reduce it first".into(),
        ));
    }

    if inst.q() == 0 {
        let outcome = if inst.b_top().iter().all(|&b| b == 0) {
            Outcome::Optimal(Solution::evaluate(inst, inst.zero_bricks())?)
        } else {
            Outcome::Infeasible
        };
        let stats = SolveStats {
            layers: 1,
            vertices: 1,
            relaxations: 0,
            wall_time: started.elapsed(),
        };
        return Ok((outcome, stats));
    }

    let counts: Vec<u64> = inst.b_local().iter().map(|&b| b as u64).collect();
    let schedule = balance_counts(&counts);
    let mut graph = Graph::new(inst, &schedule, opts)?;
    let outcome = graph.run()?;
    let stats = SolveStats {
        layers: graph.layers.len(),
        vertices: graph.vertices,
        relaxations: graph.relaxations,
        wall_time: started.elapsed(),
    };
    Ok((outcome, stats))
}

struct Layer {
    lo: Vec<i64>,
    hi: Vec<i64>,
    keys: Vec<u128>,
    coords: Vec<i64>,
    costs: Vec<i64>,
    /// `(source index in previous layer, column)` of the best incoming arc.
    preds: Vec<(u32, u32)>,
}

impl Layer {
    fn len(&self) -> usize {
        self.keys.len()
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    key: u128,
    cost: i64,
    src: u32,
    col: u32,
}

struct Graph<'a> {
    inst: &'a NFoldInstance,
    schedule: &'a BalancedSchedule,
    opts: &'a SolveOptions,
    r: usize,
    q: usize,
    /// `columns[i]` holds block `i`'s columns, `r` entries each.
    columns: Vec<Vec<i64>>,
    /// Per-coordinate packing extent shared by every layer.
    extent: u128,
    /// `reach_lo/hi[j*r + k]`: range of coordinate `k` still addable after layer `j`.
    reach_lo: Vec<i64>,
    reach_hi: Vec<i64>,
    layers: Vec<Layer>,
    vertices: u64,
    relaxations: u64,
}

impl<'a> Graph<'a> {
    fn new(inst: &'a NFoldInstance, schedule: &'a BalancedSchedule, opts: &'a SolveOptions) -> Result<Self> {
        let r = inst.r();
        let q = schedule.len();
        let columns: Vec<Vec<i64>> = (0..inst.n())
            .map(|i| (0..inst.t()).flat_map(|k| inst.column(i, k)).collect())
            .collect();

        let (below, above) = window_slack(inst)?;
        let width = below
            .add_c(above)?
            .add_c(2)?
            .add_c(2i64.mul_c(opts.window_padding.max(0))?)?;
        let extent = width as u128;
        if r > 0 {
            let fits = extent.checked_pow(r as u32).is_some();
            if !fits {
                return Err(Error::SizeLimit {
                    what: "window volume",
                    actual: u128::MAX,
                    limit: u128::MAX,
                });
            }
        }

        let mut reach_lo = vec![0i64; (q + 1) * r];
        let mut reach_hi = vec![0i64; (q + 1) * r];
        for j in (0..q).rev() {
            let block = schedule.entries()[j];
            for k in 0..r {
                let (mut mn, mut mx) = (i64::MAX, i64::MIN);
                for row_val in &inst.block(block)[k] {
                    mn = mn.min(*row_val);
                    mx = mx.max(*row_val);
                }
                reach_lo[j * r + k] = reach_lo[(j + 1) * r + k].add_c(mn)?;
                reach_hi[j * r + k] = reach_hi[(j + 1) * r + k].add_c(mx)?;
            }
        }

        Ok(Graph {
            inst,
            schedule,
            opts,
            r,
            q,
            columns,
            extent,
            reach_lo,
            reach_hi,
            layers: Vec::with_capacity(q + 1),
            vertices: 0,
            relaxations: 0,
        })
    }

    fn window(&self, j: usize) -> Result<(Vec<i64>, Vec<i64>)> {
        let mut lo = Vec::with_capacity(self.r);
        let mut hi = Vec::with_capacity(self.r);
        for k in 0..self.r {
            let (l, h) = window_bounds_padded(self.inst, j as u64, k, self.opts.window_padding)?;
            lo.push(l);
            hi.push(h);
        }
        Ok((lo, hi))
    }

    /// Whether `v` at layer `j` can still end at `b_top`.
    fn can_reach_target(&self, j: usize, v: &[i64]) -> bool {
        let b = self.inst.b_top();
        (0..self.r).all(|k| {
            let gap = b[k] as i128 - v[k] as i128;
            gap >= self.reach_lo[j * self.r + k] as i128 && gap <= self.reach_hi[j * self.r + k] as i128
        })
    }

    fn pack(&self, v: &[i64], lo: &[i64]) -> u128 {
        let mut key = 0u128;
        for k in 0..self.r {
            key = key * self.extent + (v[k] - lo[k]) as u128;
        }
        key
    }

    fn run(&mut self) -> Result<Outcome> {
        let origin = vec![0i64; self.r];
        let keep_origin = !self.opts.prune_to_target || self.can_reach_target(0, &origin);
        self.layers.push(Layer {
            lo: origin.clone(),
            hi: origin.clone(),
            keys: if keep_origin { vec![0] } else { Vec::new() },
            coords: if keep_origin { origin.clone() } else { Vec::new() },
            costs: if keep_origin { vec![0] } else { Vec::new() },
            preds: if keep_origin { vec![(u32::MAX, u32::MAX)] } else { Vec::new() },
        });
        self.vertices = 1;

        for j in 1..=self.q {
            let layer = self.expand(j)?;
            self.vertices += layer.len() as u64;
            if self.vertices > self.opts.max_vertices {
                return Err(Error::SizeLimit {
                    what: "stored vertices",
                    actual: self.vertices as u128,
                    limit: self.opts.max_vertices as u128,
                });
            }
            // Costs of older layers are no longer needed.
            if let Some(prev) = self.layers.last_mut() {
                prev.costs = Vec::new();
            }
            self.layers.push(layer);
        }

        let last = self.layers.last().expect("layer q");
        let target = self.inst.b_top();
        let in_window = (0..self.r).all(|k| last.lo[k] <= target[k] && target[k] <= last.hi[k]);
        if !in_window {
            return Ok(Outcome::Infeasible);
        }
        let key = self.pack(target, &last.lo);
        let Ok(mut idx) = last.keys.binary_search(&key) else {
            return Ok(Outcome::Infeasible);
        };

        let mut bricks = self.inst.zero_bricks();
        for j in (1..=self.q).rev() {
            let layer = &self.layers[j];
            debug_assert!((0..self.r).all(|k| {
                let x = layer.coords[idx * self.r + k];
                layer.lo[k] <= x && x <= layer.hi[k]
            }));
            let (src, col) = layer.preds[idx];
            bricks[self.schedule.entries()[j - 1]][col as usize] += 1;
            idx = src as usize;
        }
        debug_assert_eq!(idx, 0);

        let solution = Solution::evaluate(self.inst, bricks)?;
        Ok(Outcome::Optimal(solution))
    }

    fn expand(&mut self, j: usize) -> Result<Layer> {
        let (lo, hi) = self.window(j)?;
        let block = self.schedule.entries()[j - 1];
        let prev = &self.layers[j - 1];
        let this = &*self;

        let emit = |range: std::ops::Range<usize>| -> Result<Vec<Candidate>> {
            let r = this.r;
            let cols = &this.columns[block];
            let costs = &this.inst.cost()[block];
            let mut out = Vec::new();
            let mut v2 = vec![0i64; r];
            for s in range {
                let v1 = &prev.coords[s * r..(s + 1) * r];
                let base = prev.costs[s];
                'col: for (c, &cost) in costs.iter().enumerate() {
                    let col = &cols[c * r..(c + 1) * r];
                    for k in 0..r {
                        let x = v1[k].add_c(col[k])?;
                        if x < lo[k] || x > hi[k] {
                            continue 'col;
                        }
                        v2[k] = x;
                    }
                    if this.opts.prune_to_target && !this.can_reach_target(j, &v2) {
                        continue;
                    }
                    out.push(Candidate {
                        key: this.pack(&v2, &lo),
                        cost: base.add_c(cost)?,
                        src: s as u32,
                        col: c as u32,
                    });
                }
            }
            Ok(out)
        };

        let mut candidates = self.collect_candidates(prev.len(), &emit)?;
        self.relaxations += candidates.len() as u64;
        self.sort_candidates(&mut candidates);

        // Stable sort keeps emission order within a key, so the first
        // minimum is the first relaxed.
        let r = self.r;
        let mut layer = Layer {
            lo,
            hi,
            keys: Vec::new(),
            coords: Vec::new(),
            costs: Vec::new(),
            preds: Vec::new(),
        };
        let mut i = 0;
        while i < candidates.len() {
            let key = candidates[i].key;
            let mut best = candidates[i];
            i += 1;
            while i < candidates.len() && candidates[i].key == key {
                if candidates[i].cost < best.cost {
                    best = candidates[i];
                }
                i += 1;
            }
            let src = best.src as usize;
            let col = &self.columns[block][best.col as usize * r..(best.col as usize + 1) * r];
            let base = &prev.coords[src * r..(src + 1) * r];
            layer.coords.extend(base.iter().zip(col).map(|(a, b)| a + b));
            layer.keys.push(key);
            layer.costs.push(best.cost);
            layer.preds.push((best.src, best.col));
        }
        Ok(layer)
    }

    fn collect_candidates<F>(&self, sources: usize, emit: &F) -> Result<Vec<Candidate>>
    where
        F: Fn(std::ops::Range<usize>) -> Result<Vec<Candidate>> + Sync,
    {
        #[cfg(feature = "parallel")]
        if self.opts.parallel && sources > PAR_CHUNK {
            let chunks: Vec<Vec<Candidate>> = (0..sources.div_ceil(PAR_CHUNK))
                .into_par_iter()
                .map(|c| emit(c * PAR_CHUNK..((c + 1) * PAR_CHUNK).min(sources)))
                .collect::<Result<_>>()?;
            return Ok(chunks.concat());
        }
        emit(0..sources)
    }

    fn sort_candidates(&self, candidates: &mut [Candidate]) {
        #[cfg(feature = "parallel")]
        if self.opts.parallel && candidates.len() > 4 * PAR_CHUNK {
            candidates.par_sort_by_key(|c| c.key);
            return;
        }
        candidates.sort_by_key(|c| c.key);
    }
}
