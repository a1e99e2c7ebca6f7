//! Equitable coloring with a small vertex cover and at most one color more
//! than there are cover vertices.
//!
//! Every proper coloring of the cover fixes which colors each neighborhood
//! class of the independent remainder may use; what is left is a program
//! distributing class members over colors so that every color class reaches
//! its target size.

use std::collections::BTreeMap;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::dag;
use crate::error::{Error, Result};
use crate::model::{NFoldInstance, Outcome};

/// Largest graph [`minimum_vertex_cover`] will search exhaustively.
pub const MAX_COVER_SEARCH_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquitableColoringInstance {
    vertices: usize,
    adjacency: Vec<Vec<bool>>,
    edges: Vec<(usize, usize)>,
    colors: usize,
    cover: Vec<usize>,
}

impl EquitableColoringInstance {
    /// Vertices are `0..vertices`. `cover` must touch every edge, and the
    /// number of colors may exceed the cover size by at most one.
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>, colors: usize, cover: Vec<usize>) -> Result<Self> {
        let mut adjacency = vec![vec![false; vertices]; vertices];
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(Error::Precondition(format!("edge ({u}, {v}) leaves the vertex set")));
            }
            if u == v {
                return Err(Error::Precondition(format!("self-loop at vertex {u}")));
            }
            adjacency[u][v] = true;
            adjacency[v][u] = true;
        }
        let mut cover = cover;
        cover.sort_unstable();
        cover.dedup();
        if let Some(&w) = cover.iter().find(|&&w| w >= vertices) {
            return Err(Error::Precondition(format!("cover vertex {w} leaves the vertex set")));
        }
        let mut in_cover = vec![false; vertices];
        for &w in &cover {
            in_cover[w] = true;
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| !in_cover[u] && !in_cover[v]) {
            return Err(Error::Precondition(format!("edge ({u}, {v}) is not covered")));
        }
        if colors == 0 {
            return Err(Error::Precondition("at least one color is required".into()));
        }
        if colors > cover.len() + 1 {
            return Err(Error::UnsupportedCase(format!(
                "{colors} colors for a cover of size {}",
                cover.len()
            )));
        }
        Ok(EquitableColoringInstance {
            vertices,
            adjacency,
            edges,
            colors,
            cover,
        })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn cover(&self) -> &[usize] {
        &self.cover
    }

    /// Vertices outside the cover grouped by neighborhood, ordered by
    /// neighborhood; members are in increasing order.
    pub fn neighborhood_classes(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for v in (0..self.vertices).filter(|v| self.cover.binary_search(v).is_err()) {
            let nbrs: Vec<usize> = self.cover.iter().copied().filter(|&w| self.adjacency[v][w]).collect();
            classes.entry(nbrs).or_default().push(v);
        }
        classes.into_iter().collect()
    }

    /// Whether `coloring` is proper and its `h` classes differ in size by at most one.
    pub fn is_equitable(&self, coloring: &[usize]) -> bool {
        if coloring.len() != self.vertices || coloring.iter().any(|&c| c >= self.colors) {
            return false;
        }
        if self.edges.iter().any(|&(u, v)| coloring[u] == coloring[v]) {
            return false;
        }
        let mut sizes = vec![0usize; self.colors];
        for &c in coloring {
            sizes[c] += 1;
        }
        sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringAnswer {
    pub yes: bool,
    /// Zero-based color per vertex.
    pub coloring: Option<Vec<usize>>,
}

/// One candidate program: a cover coloring plus the set of colors that get
/// the larger class size.
struct Candidate {
    cover_colors: Vec<usize>,
    program: NFoldInstance,
}

pub fn equitable_coloring_solve(inst: &EquitableColoringInstance) -> Result<ColoringAnswer> {
    let candidates = candidate_programs(inst)?;
    let opts = super::options();
    let attempt = |c: &Candidate| match dag::solve_with_options(&c.program, &opts) {
        Ok((Outcome::Optimal(sol), _)) => Some(Ok((c.cover_colors.clone(), sol))),
        Ok((Outcome::Infeasible, _)) => None,
        Err(e) => Some(Err(e)),
    };

    #[cfg(feature = "parallel")]
    let found = candidates.par_iter().find_map_first(attempt);
    #[cfg(not(feature = "parallel"))]
    let found = candidates.iter().find_map(attempt);

    let Some(found) = found else {
        return Ok(ColoringAnswer {
            yes: false,
            coloring: None,
        });
    };
    let (cover_colors, sol) = found?;

    let mut coloring = vec![0usize; inst.vertices];
    for (&w, &c) in inst.cover.iter().zip(&cover_colors) {
        coloring[w] = c;
    }
    for ((_, members), counts) in inst.neighborhood_classes().iter().zip(&sol.bricks) {
        let mut slots = members.iter();
        for (color, &count) in counts.iter().enumerate() {
            for &v in slots.by_ref().take(count as usize) {
                coloring[v] = color;
            }
        }
    }
    debug_assert!(inst.is_equitable(&coloring));
    Ok(ColoringAnswer {
        yes: true,
        coloring: Some(coloring),
    })
}

fn candidate_programs(inst: &EquitableColoringInstance) -> Result<Vec<Candidate>> {
    let h = inst.colors;
    let small = inst.vertices / h;
    let big_count = inst.vertices - h * small;
    let classes = inst.neighborhood_classes();

    let mut out = Vec::new();
    for cover_colors in canonical_colorings(inst) {
        let used = cover_colors.iter().max().map_or(0, |&c| c + 1);
        let mut on_cover = vec![0i64; h];
        for &c in &cover_colors {
            on_cover[c] += 1;
        }
        // Colors left unused on the cover are interchangeable, so only the
        // choice of big colors among the used ones matters.
        for big_used in subsets(used, big_count) {
            let fill = big_count - big_used.len();
            if fill > h - used {
                continue;
            }
            let mut big = vec![false; h];
            for &c in &big_used {
                big[c] = true;
            }
            for flag in big.iter_mut().skip(used).take(fill) {
                *flag = true;
            }
            let rhs: Vec<i64> = (0..h)
                .map(|j| small as i64 + i64::from(big[j]) - on_cover[j])
                .collect();
            if rhs.iter().any(|&v| v < 0) {
                continue;
            }
            out.push(Candidate {
                program: class_program(inst, &classes, &cover_colors, &rhs)?,
                cover_colors: cover_colors.clone(),
            });
        }
    }
    Ok(out)
}

/// Row 0 forces zero mass on colors a class sees on its neighbors; row
/// `1 + j` fixes how many remainder vertices take color `j`.
fn class_program(
    inst: &EquitableColoringInstance,
    classes: &[(Vec<usize>, Vec<usize>)],
    cover_colors: &[usize],
    rhs: &[i64],
) -> Result<NFoldInstance> {
    let h = inst.colors;
    let color_of = |w: usize| cover_colors[inst.cover.binary_search(&w).unwrap()];
    let mut blocks = Vec::with_capacity(classes.len().max(1));
    let mut b_local = Vec::with_capacity(classes.len().max(1));
    for (nbrs, members) in classes {
        let mut block = vec![vec![0i64; h]; h + 1];
        for &w in nbrs {
            block[0][color_of(w)] = 1;
        }
        for (j, row) in block.iter_mut().skip(1).enumerate() {
            row[j] = 1;
        }
        blocks.push(block);
        b_local.push(members.len() as i64);
    }
    if blocks.is_empty() {
        blocks.push(vec![vec![0; h]; h + 1]);
        b_local.push(0);
    }
    let mut b_top = vec![0i64];
    b_top.extend_from_slice(rhs);
    let n = blocks.len();
    NFoldInstance::equality(blocks, b_top, b_local, vec![vec![0; h]; n])
}

/// Proper colorings of the cover (in cover order) with at most `h` colors,
/// where color `c + 1` appears only after color `c`.
fn canonical_colorings(inst: &EquitableColoringInstance) -> Vec<Vec<usize>> {
    fn extend(inst: &EquitableColoringInstance, cur: &mut Vec<usize>, used: usize, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == inst.cover.len() {
            out.push(cur.clone());
            return;
        }
        let v = inst.cover[i];
        for c in 0..(used + 1).min(inst.colors) {
            let clash = (0..i).any(|p| cur[p] == c && inst.adjacency[v][inst.cover[p]]);
            if !clash {
                cur.push(c);
                extend(inst, cur, used.max(c + 1), out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(inst, &mut Vec::new(), 0, &mut out);
    out
}

/// All subsets of `0..n` with at most `max` elements, in lexicographic order.
fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, max: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == max {
            return;
        }
        for e in start..n {
            cur.push(e);
            extend(n, max, e + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    extend(n, max, 0, &mut Vec::new(), &mut out);
    out
}

/// Smallest vertex cover by exhaustive search over subsets of increasing
/// size; the lexicographically first one of minimum size is returned.
pub fn minimum_vertex_cover(vertices: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    if vertices > MAX_COVER_SEARCH_VERTICES {
        return Err(Error::SizeLimit {
            what: "vertices for cover search",
            actual: vertices as u128,
            limit: MAX_COVER_SEARCH_VERTICES as u128,
        });
    }
    if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
        return Err(Error::Precondition(format!("edge ({u}, {v}) leaves the vertex set")));
    }
    for size in 0..=vertices {
        for set in subsets(vertices, size).into_iter().filter(|s| s.len() == size) {
            let mut mark = vec![false; vertices];
            for &v in &set {
                mark[v] = true;
            }
            if edges.iter().all(|&(u, v)| mark[u] || mark[v]) {
                return Ok(set);
            }
        }
    }
    unreachable!("the full vertex set is a cover")
}
