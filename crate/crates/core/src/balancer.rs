//! Greedy balancing of a one-row symbol sequence.
//!
//! Given how often each block index must appear, [`balance_counts`] lays the
//! symbols out so that every prefix holds close to its proportional share of
//! every symbol. With `q` symbols in total and `m_e` copies of symbol `e`,
//! the imbalance after `j` columns is `occ(e, j) - (j/q)·m_e`, and the greedy
//! layout keeps it in `[-n, 1]` for all `e` and `j`.
//!
//! Symbols are zero-based throughout the library.

use num_rational::Ratio;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedSchedule {
    entries: Vec<usize>,
    counts: Vec<u64>,
}

impl BalancedSchedule {
    /// Wraps an arbitrary sequence without checking it; see [`verify_balance`].
    pub fn from_parts(entries: Vec<usize>, counts: Vec<u64>) -> Self {
        BalancedSchedule { entries, counts }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of symbols `n`.
    pub fn symbols(&self) -> usize {
        self.counts.len()
    }

    /// Schedule length `q`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Occurrences of `e` among the first `j` entries.
    pub fn occ(&self, e: usize, j: usize) -> u64 {
        self.entries[..j].iter().filter(|&&s| s == e).count() as u64
    }

    /// Imbalance of symbol `e` after `j` columns (`1 ≤ j ≤ q`), exactly.
    pub fn imbalance(&self, e: usize, j: usize) -> Result<Ratio<i128>> {
        let q = self.entries.len();
        if q == 0 {
            return Err(Error::EmptySchedule);
        }
        if j == 0 || j > q || e >= self.counts.len() {
            return Err(Error::Precondition(format!(
                "imbalance({e}, {j}) outside {} symbols x {q} columns",
                self.counts.len()
            )));
        }
        Ok(Ratio::new(self.scaled_imbalance(e, j, self.occ(e, j)), q as i128))
    }

    /// `q·occ - j·m_e`, the imbalance scaled by `q`.
    fn scaled_imbalance(&self, e: usize, j: usize, occ: u64) -> i128 {
        let q = self.entries.len() as i128;
        q * occ as i128 - j as i128 * self.counts[e] as i128
    }
}

/// Builds the balanced schedule for the given symbol counts.
///
/// At column `j` the symbol with the smallest `q·occ - j·m_e` (occurrences
/// counted over the first `j-1` columns) is placed; ties go to the smallest
/// index. Symbols with `m_e = 0` never win because the scaled imbalances
/// over all symbols sum to `-q < 0` at selection time.
pub fn balance_counts(counts: &[u64]) -> BalancedSchedule {
    let q: u64 = counts.iter().sum();
    let live: Vec<usize> = (0..counts.len()).filter(|&e| counts[e] > 0).collect();
    let mut occ = vec![0u64; counts.len()];
    let mut entries = Vec::with_capacity(q as usize);
    let qi = q as i128;

    for j in 1..=q {
        let ji = j as i128;
        let mut best = live[0];
        let mut best_key = qi * occ[best] as i128 - ji * counts[best] as i128;
        for &e in &live[1..] {
            let key = qi * occ[e] as i128 - ji * counts[e] as i128;
            if key < best_key {
                best = e;
                best_key = key;
            }
        }
        debug_assert!(occ[best] < counts[best]);
        occ[best] += 1;
        entries.push(best);
    }

    BalancedSchedule {
        entries,
        counts: counts.to_vec(),
    }
}

/// Checks the count bookkeeping and the `[-n, 1]` imbalance bounds at every column.
pub fn verify_balance(sched: &BalancedSchedule) -> bool {
    let n = sched.counts.len();
    let q = sched.entries.len();
    if sched.counts.iter().sum::<u64>() != q as u64 {
        return false;
    }
    if sched.entries.iter().any(|&e| e >= n) {
        return false;
    }
    let qi = q as i128;
    let mut occ = vec![0u64; n];
    for j in 1..=q {
        occ[sched.entries[j - 1]] += 1;
        for (e, &o) in occ.iter().enumerate() {
            let scaled = sched.scaled_imbalance(e, j, o);
            if scaled > qi || scaled < -(n as i128) * qi {
                return false;
            }
        }
    }
    occ == sched.counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_by_two_alternates() {
        let s = balance_counts(&[2, 2]);
        assert_eq!(s.entries(), &[0, 1, 0, 1]);
        assert!(verify_balance(&s));
    }

    #[test]
    fn single_live_symbol() {
        assert_eq!(balance_counts(&[3, 0]).entries(), &[0, 0, 0]);
    }

    #[test]
    fn empty_counts_give_empty_schedule() {
        let s = balance_counts(&[0, 0, 0]);
        assert!(s.is_empty());
        assert!(verify_balance(&s));
        assert!(matches!(s.imbalance(0, 1), Err(Error::EmptySchedule)));
    }

    #[test]
    fn imbalance_examples() {
        let s = BalancedSchedule::from_parts(vec![0, 1, 0, 1], vec![2, 2]);
        assert_eq!(s.imbalance(0, 1).unwrap(), Ratio::new(1, 2));
        assert_eq!(s.imbalance(1, 4).unwrap(), Ratio::from_integer(0));

        let with_absent = BalancedSchedule::from_parts(vec![0, 0], vec![2, 0]);
        assert_eq!(with_absent.imbalance(1, 1).unwrap(), Ratio::from_integer(0));
        assert_eq!(with_absent.imbalance(1, 2).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn verify_accepts_non_greedy_schedule_within_bounds() {
        let s = BalancedSchedule::from_parts(vec![0, 0, 1, 1], vec![2, 2]);
        assert!(verify_balance(&s));
    }

    #[test]
    fn verify_rejects_front_loaded_schedule() {
        // imbalance(1, 3) = 3 - 3/2 = 3/2 > 1
        let s = BalancedSchedule::from_parts(vec![0, 0, 0, 1, 1, 1], vec![3, 3]);
        assert_eq!(s.imbalance(0, 3).unwrap(), Ratio::new(3, 2));
        assert!(!verify_balance(&s));
    }

    #[test]
    fn verify_rejects_wrong_counts() {
        let s = BalancedSchedule::from_parts(vec![0, 0, 0, 1], vec![2, 2]);
        assert!(!verify_balance(&s));
    }

    proptest! {
        #[test]
        fn greedy_schedule_is_balanced(counts in prop::collection::vec(0u64..30, 1..8)) {
            let s = balance_counts(&counts);
            prop_assert!(verify_balance(&s));
            let q = s.len();
            // imbalances sum to zero at every column
            for j in 1..=q {
                let total: Ratio<i128> = (0..counts.len()).map(|e| s.imbalance(e, j).unwrap()).sum();
                prop_assert_eq!(total, Ratio::from_integer(0));
            }
        }

        #[test]
        fn balancing_is_deterministic(counts in prop::collection::vec(0u64..20, 1..6)) {
            prop_assert_eq!(balance_counts(&counts), balance_counts(&counts));
        }
    }
}
