//! δ-Multi Strings and its Closest String special case.
//!
//! Columns of the input string matrix are grouped into types; one block per
//! type holds a variable per output character, counting how many positions of
//! that type receive it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{NFoldInstance, Outcome, Relation};
use crate::reduction::solve_program;

/// Character matching every output character at distance zero.
pub const WILDCARD: char = '*';

/// Character-wise distance `δ(input, output)` for input characters in
/// `Σ ∪ {*}` and output characters in `Σ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    alphabet: Vec<char>,
    entries: BTreeMap<(char, char), i64>,
}

impl DistanceTable {
    pub fn hamming(alphabet: &[char]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for &a in alphabet {
            for &b in alphabet {
                entries.insert((a, b), i64::from(a != b));
            }
        }
        Self::from_entries(alphabet, entries)
    }

    /// Builds a table from explicit entries; every pair over `Σ × Σ` must be
    /// present and non-negative. Wildcard entries are implied.
    pub fn from_entries(alphabet: &[char], entries: BTreeMap<(char, char), i64>) -> Result<Self> {
        let set: BTreeSet<char> = alphabet.iter().copied().collect();
        if alphabet.is_empty() {
            return Err(Error::MalformedDistance("empty alphabet".into()));
        }
        if set.len() != alphabet.len() {
            return Err(Error::MalformedDistance("alphabet repeats a character".into()));
        }
        if set.contains(&WILDCARD) {
            return Err(Error::MalformedDistance(format!("{WILDCARD} cannot be a letter")));
        }
        for (&(a, b), &d) in &entries {
            if !set.contains(&a) || !set.contains(&b) {
                return Err(Error::MalformedDistance(format!("entry ({a}, {b}) outside the alphabet")));
            }
            if d < 0 {
                return Err(Error::MalformedDistance(format!("negative entry ({a}, {b}) = {d}")));
            }
        }
        for &a in alphabet {
            for &b in alphabet {
                if !entries.contains_key(&(a, b)) {
                    return Err(Error::MalformedDistance(format!("missing entry ({a}, {b})")));
                }
            }
        }
        Ok(DistanceTable {
            alphabet: alphabet.to_vec(),
            entries,
        })
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn get(&self, input: char, output: char) -> Result<i64> {
        if input == WILDCARD && self.alphabet.contains(&output) {
            return Ok(0);
        }
        self.entries
            .get(&(input, output))
            .copied()
            .ok_or_else(|| Error::MalformedDistance(format!("no entry for ({input}, {output})")))
    }

    /// Distance between an input string and an output string of equal length.
    pub fn distance(&self, input: &[char], output: &[char]) -> Result<i64> {
        input
            .iter()
            .zip(output)
            .try_fold(0i64, |acc, (&a, &b)| Ok(acc + self.get(a, b)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiStringsInstance {
    strings: Vec<Vec<char>>,
    lower: Vec<i64>,
    upper: Vec<i64>,
    delta: DistanceTable,
    minimize: bool,
}

impl MultiStringsInstance {
    /// `minimize` switches the objective between zero and the total distance.
    pub fn new(
        strings: Vec<Vec<char>>,
        lower: Vec<i64>,
        upper: Vec<i64>,
        delta: DistanceTable,
        minimize: bool,
    ) -> Result<Self> {
        let k = strings.len();
        if lower.len() != k || upper.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{k} strings but {} lower and {} upper bounds",
                lower.len(),
                upper.len()
            )));
        }
        let len = strings.first().map_or(0, Vec::len);
        for (h, s) in strings.iter().enumerate() {
            if s.len() != len {
                return Err(Error::DimensionMismatch(format!(
                    "string {} has length {}, expected {len}",
                    h + 1,
                    s.len()
                )));
            }
            if let Some(&c) = s.iter().find(|&&c| c != WILDCARD && !delta.alphabet().contains(&c)) {
                return Err(Error::MalformedDistance(format!("string {} uses {c:?} outside the alphabet", h + 1)));
            }
        }
        Ok(MultiStringsInstance {
            strings,
            lower,
            upper,
            delta,
            minimize,
        })
    }

    pub fn strings(&self) -> &[Vec<char>] {
        &self.strings
    }

    pub fn delta(&self) -> &DistanceTable {
        &self.delta
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn minimize(&self) -> bool {
        self.minimize
    }

    pub fn len(&self) -> usize {
        self.strings.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distinct columns in lexicographic order with the positions holding them.
    pub fn column_types(&self) -> Vec<(Vec<char>, Vec<usize>)> {
        let mut types: BTreeMap<Vec<char>, Vec<usize>> = BTreeMap::new();
        for pos in 0..self.len() {
            let col: Vec<char> = self.strings.iter().map(|s| s[pos]).collect();
            types.entry(col).or_default().push(pos);
        }
        types.into_iter().collect()
    }

    /// Checks an output string against every bound.
    pub fn accepts(&self, y: &[char]) -> Result<bool> {
        if y.len() != self.len() {
            return Ok(false);
        }
        for (h, s) in self.strings.iter().enumerate() {
            let d = self.delta.distance(s, y)?;
            if d < self.lower[h] || d > self.upper[h] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Objective value of an output string.
    pub fn objective(&self, y: &[char]) -> Result<i64> {
        if !self.minimize {
            return Ok(0);
        }
        self.strings.iter().try_fold(0i64, |acc, s| Ok(acc + self.delta.distance(s, y)?))
    }
}

/// One block per column type; rows `0..k` carry the lower bounds as `>=`
/// and rows `k..2k` the upper bounds as `<=`.
pub fn multistrings_to_ilp(inst: &MultiStringsInstance) -> Result<NFoldInstance> {
    let sigma = inst.delta.alphabet();
    let k = inst.strings.len();
    let types = inst.column_types();

    let mut blocks = Vec::with_capacity(types.len().max(1));
    let mut cost = Vec::with_capacity(types.len().max(1));
    let mut b_local = Vec::with_capacity(types.len().max(1));
    for (col, positions) in &types {
        let dist: Vec<Vec<i64>> = col
            .iter()
            .map(|&s| sigma.iter().map(|&c| inst.delta.get(s, c)).collect())
            .collect::<Result<_>>()?;
        let mut rows = dist.clone();
        rows.extend(dist.iter().cloned());
        blocks.push(rows);
        cost.push(
            (0..sigma.len())
                .map(|c| if inst.minimize { dist.iter().map(|d| d[c]).sum() } else { 0 })
                .collect(),
        );
        b_local.push(positions.len() as i64);
    }
    if blocks.is_empty() {
        blocks.push(vec![vec![0; sigma.len()]; 2 * k]);
        cost.push(vec![0; sigma.len()]);
        b_local.push(0);
    }

    let mut b_top = inst.lower.clone();
    b_top.extend_from_slice(&inst.upper);
    let mut relations = vec![Relation::Ge; k];
    relations.extend(std::iter::repeat_n(Relation::Le, k));
    let n = blocks.len();
    NFoldInstance::with_relations(blocks, b_top, relations, b_local, vec![Relation::Eq; n], cost)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiStringsAnswer {
    /// Output string, or `None` if no string meets the bounds.
    pub output: Option<String>,
    pub objective: Option<i64>,
    /// Distance from each input string to the output.
    pub distances: Vec<i64>,
}

pub fn multistrings_solve(inst: &MultiStringsInstance) -> Result<MultiStringsAnswer> {
    let program = multistrings_to_ilp(inst)?;
    let (outcome, _) = solve_program(&program, &super::options())?;
    let Outcome::Optimal(sol) = outcome else {
        return Ok(MultiStringsAnswer {
            output: None,
            objective: None,
            distances: Vec::new(),
        });
    };

    let sigma = inst.delta.alphabet();
    let mut y = vec![sigma[0]; inst.len()];
    for ((_, positions), counts) in inst.column_types().iter().zip(&sol.bricks) {
        let mut slots = positions.iter();
        for (&c, &count) in sigma.iter().zip(counts) {
            for &pos in slots.by_ref().take(count as usize) {
                y[pos] = c;
            }
        }
    }
    let distances = inst
        .strings
        .iter()
        .map(|s| inst.delta.distance(s, &y))
        .collect::<Result<Vec<_>>>()?;
    debug_assert!(inst.accepts(&y)?);
    debug_assert_eq!(inst.objective(&y)?, sol.objective);
    Ok(MultiStringsAnswer {
        output: Some(y.into_iter().collect()),
        objective: Some(sol.objective),
        distances,
    })
}

/// Closest String: Hamming distance, no lower bounds, every upper bound `d`.
pub fn closest_string(strings: Vec<Vec<char>>, alphabet: &[char], d: i64) -> Result<MultiStringsInstance> {
    let k = strings.len();
    MultiStringsInstance::new(strings, vec![0; k], vec![d; k], DistanceTable::hamming(alphabet)?, false)
}

/// Parses the plain-text string format.
///
/// One input string per line, then a line `---`, then keyword lines:
/// `alphabet <letters>`, `lower <k ints>`, `upper <k ints>`, `minimize 0|1`
/// and any number of `delta <input> <output> <value>` entries. Without
/// `delta` lines the distance is Hamming; the alphabet defaults to the
/// sorted letters of the strings. Blank lines and `#` comments are skipped.
pub fn parse_strings_file(text: &str) -> Result<StringsFile> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let mut strings = Vec::new();
    for line in lines.by_ref() {
        if line == "---" {
            break;
        }
        strings.push(line.chars().collect::<Vec<char>>());
    }

    let mut file = StringsFile {
        strings,
        ..StringsFile::default()
    };
    let ints = |rest: &[&str], key: &str| -> Result<Vec<i64>> {
        rest.iter()
            .map(|v| v.parse().map_err(|_| Error::Parse(format!("{key}: {v:?} is not an integer"))))
            .collect()
    };
    for line in lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["alphabet", letters] => file.alphabet = Some(letters.chars().collect()),
            ["lower", rest @ ..] => file.lower = Some(ints(rest, "lower")?),
            ["upper", rest @ ..] => file.upper = Some(ints(rest, "upper")?),
            ["minimize", v @ ("0" | "1")] => file.minimize = *v == "1",
            ["delta", a, b, v] => {
                let (Some(a), Some(b)) = (single_char(a), single_char(b)) else {
                    return Err(Error::Parse(format!("delta entry {line:?} needs single characters")));
                };
                let v = v
                    .parse()
                    .map_err(|_| Error::Parse(format!("delta value {v:?} is not an integer")))?;
                if file.delta.insert((a, b), v).is_some() {
                    return Err(Error::Parse(format!("duplicate delta entry ({a}, {b})")));
                }
            }
            _ => return Err(Error::Parse(format!("unrecognised line {line:?}"))),
        }
    }
    Ok(file)
}

fn single_char(s: &str) -> Option<char> {
    let mut it = s.chars();
    let c = it.next()?;
    it.next().is_none().then_some(c)
}

/// Raw contents of a strings file; see [`parse_strings_file`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StringsFile {
    pub strings: Vec<Vec<char>>,
    pub alphabet: Option<Vec<char>>,
    pub lower: Option<Vec<i64>>,
    pub upper: Option<Vec<i64>>,
    pub minimize: bool,
    pub delta: BTreeMap<(char, char), i64>,
}

impl StringsFile {
    pub fn alphabet(&self) -> Vec<char> {
        match &self.alphabet {
            Some(a) => a.clone(),
            None => {
                let set: BTreeSet<char> = self.strings.iter().flatten().copied().filter(|&c| c != WILDCARD).collect();
                set.into_iter().collect()
            }
        }
    }

    pub fn distance_table(&self) -> Result<DistanceTable> {
        let alphabet = self.alphabet();
        if self.delta.is_empty() {
            DistanceTable::hamming(&alphabet)
        } else {
            DistanceTable::from_entries(&alphabet, self.delta.clone())
        }
    }

    /// Full δ-Multi Strings instance; both bound lines are required.
    pub fn multistrings(&self) -> Result<MultiStringsInstance> {
        let (Some(lower), Some(upper)) = (&self.lower, &self.upper) else {
            return Err(Error::Parse("lower and upper bound lines are required".into()));
        };
        MultiStringsInstance::new(
            self.strings.clone(),
            lower.clone(),
            upper.clone(),
            self.distance_table()?,
            self.minimize,
        )
    }

    /// Closest String instance with radius `d`; bound lines are ignored.
    pub fn closest_string(&self, d: i64) -> Result<MultiStringsInstance> {
        let k = self.strings.len();
        MultiStringsInstance::new(self.strings.clone(), vec![0; k], vec![d; k], self.distance_table()?, false)
    }
}

/// Renders an output string with one line per input distance; used by the CLI.
pub fn describe(inst: &MultiStringsInstance, ans: &MultiStringsAnswer) -> String {
    let mut out = String::new();
    match &ans.output {
        Some(y) => {
            let _ = writeln!(out, "{y}");
            for (s, d) in inst.strings.iter().zip(&ans.distances) {
                let _ = writeln!(out, "  {} at {d}", s.iter().collect::<String>());
            }
        }
        None => out.push_str("infeasible\n"),
    }
    out
}
