//! Tabular Q-learning over feature masks.
//!
//! States are masks, actions toggle one attribute. The table is sparse:
//! only visited `(state, action)` cells are stored and every other cell
//! reads as zero.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::mask::FeatureMask;

/// Learning rate, discount and exploration rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlParams {
    pub lr: f64,
    /// Discount applied to the best next-state value.
    pub alpha: f64,
    /// Probability of a uniformly random action.
    pub beta: f64,
}

impl Default for RlParams {
    fn default() -> Self {
        Self {
            lr: 0.9,
            alpha: 0.2,
            beta: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RlError {
    #[error("no legal action: the only selected attribute cannot be removed")]
    NoLegalAction,
    #[error("toggling attribute {0} would leave the mask empty")]
    EmptyMaskResult(usize),
    #[error("action {action} out of range for {n} attributes")]
    ActionOutOfRange { action: usize, n: usize },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QTable {
    entries: HashMap<FeatureMask, HashMap<usize, f64>>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, state: &FeatureMask, action: usize) -> f64 {
        self.entries
            .get(state)
            .and_then(|row| row.get(&action))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, state: &FeatureMask, action: usize, q: f64) {
        self.entries
            .entry(state.clone())
            .or_default()
            .insert(action, q);
    }

    /// Largest value over all actions of `state`, counting unvisited cells
    /// as 0.
    pub fn max_value(&self, state: &FeatureMask) -> f64 {
        let Some(row) = self.entries.get(state) else {
            return 0.0;
        };
        let stored = row.values().copied().fold(f64::NEG_INFINITY, f64::max);
        if row.len() < state.len() {
            stored.max(0.0)
        } else {
            stored
        }
    }

    /// Number of stored cells.
    pub fn len(&self) -> usize {
        self.entries.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_states(&self) -> usize {
        self.entries.len()
    }

    /// `state_bits,action_index,q_value` lines sorted lexicographically.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .entries
            .iter()
            .flat_map(|(s, row)| row.iter().map(move |(a, q)| format!("{s},{a},{q}")))
            .collect();
        lines.sort();
        let mut out = String::new();
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}

/// Accuracy and subset size before and after a move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardInputs {
    pub acc_t: f64,
    pub acc_next: f64,
    pub num_t: usize,
    pub num_next: usize,
}

/// Piecewise reward for a move from `x_t` to `x_{t+1}`.
///
/// Accuracy changes take priority. On an accuracy tie, shrinking the subset
/// earns `acc_t / 2` and growing it costs the same; no change at all earns 0.
pub fn reward(r: RewardInputs) -> f64 {
    if r.acc_t < r.acc_next {
        r.acc_t
    } else if r.acc_t > r.acc_next {
        r.acc_next - r.acc_t
    } else if r.num_t > r.num_next {
        r.acc_t / 2.0
    } else if r.num_t < r.num_next {
        -r.acc_t / 2.0
    } else {
        0.0
    }
}

/// `Q(s,a) ← lr·r + (1 − lr)·Q(s,a) + alpha·max_a' Q(s',a')`.
///
/// The discounted term sits outside the `lr` blend, so values may exceed
/// the reward range.
pub fn q_update(
    table: &mut QTable,
    state: &FeatureMask,
    action: usize,
    r: f64,
    next_state: &FeatureMask,
    params: &RlParams,
) -> Result<f64, RlError> {
    if action >= state.len() {
        return Err(RlError::ActionOutOfRange {
            action,
            n: state.len(),
        });
    }
    let prior = table.get(state, action);
    let future = table.max_value(next_state);
    let q = params.lr * r + (1.0 - params.lr) * prior + params.alpha * future;
    table.set(state, action, q);
    Ok(q)
}

fn is_legal(state: &FeatureMask, action: usize) -> bool {
    !(state.get(action) && state.count_ones() == 1)
}

/// Epsilon-greedy action choice with exploration rate `beta`.
///
/// Actions that would empty the mask are never chosen. Greedy ties go to
/// the lowest index. One uniform draw decides explore vs exploit; a second
/// picks the action when exploring.
pub fn select_action<R: Rng + ?Sized>(
    table: &QTable,
    state: &FeatureMask,
    beta: f64,
    rng: &mut R,
) -> Result<usize, RlError> {
    let legal: Vec<usize> = (0..state.len()).filter(|&a| is_legal(state, a)).collect();
    if legal.is_empty() {
        return Err(RlError::NoLegalAction);
    }
    if rng.random::<f64>() < beta {
        return Ok(legal[rng.random_range(0..legal.len())]);
    }
    let mut best = legal[0];
    let mut best_q = table.get(state, best);
    for &a in &legal[1..] {
        let q = table.get(state, a);
        if q > best_q {
            best = a;
            best_q = q;
        }
    }
    Ok(best)
}

/// Toggles one attribute.
pub fn apply_action(state: &FeatureMask, action: usize) -> Result<FeatureMask, RlError> {
    if action >= state.len() {
        return Err(RlError::ActionOutOfRange {
            action,
            n: state.len(),
        });
    }
    if !is_legal(state, action) {
        return Err(RlError::EmptyMaskResult(action));
    }
    let mut next = state.clone();
    next.toggle(action);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m(s: &str) -> FeatureMask {
        s.parse().unwrap()
    }

    fn inputs(acc_t: f64, acc_next: f64, num_t: usize, num_next: usize) -> RewardInputs {
        RewardInputs {
            acc_t,
            acc_next,
            num_t,
            num_next,
        }
    }

    #[test]
    fn reward_cases() {
        assert_eq!(reward(inputs(0.8, 0.9, 3, 7)), 0.8);
        assert!((reward(inputs(0.9, 0.8, 3, 7)) - -0.1).abs() < 1e-12);
        assert_eq!(reward(inputs(0.8, 0.8, 5, 4)), 0.4);
        assert_eq!(reward(inputs(0.8, 0.8, 4, 5)), -0.4);
        assert_eq!(reward(inputs(0.8, 0.8, 4, 4)), 0.0);
    }

    #[test]
    fn accuracy_case_beats_count_case() {
        // Fewer features would earn +acc/2 on a tie, but accuracy dropped.
        assert!(reward(inputs(0.9, 0.7, 5, 2)) < 0.0);
    }

    #[test]
    fn q_update_from_empty_table() {
        let mut t = QTable::new();
        let p = RlParams::default();
        let q = q_update(&mut t, &m("0101"), 0, 1.0, &m("1101"), &p).unwrap();
        assert!((q - 0.9).abs() < 1e-15);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn q_update_with_prior_and_future() {
        let mut t = QTable::new();
        let (s, next) = (m("0110"), m("1110"));
        t.set(&s, 0, 0.5);
        t.set(&next, 2, 1.0);
        let q = q_update(&mut t, &s, 0, 0.0, &next, &RlParams::default()).unwrap();
        assert!((q - 0.25).abs() < 1e-12);
    }

    #[test]
    fn q_update_collapses_to_reward() {
        let mut t = QTable::new();
        let s = m("011");
        t.set(&s, 1, 7.5);
        let p = RlParams {
            lr: 1.0,
            alpha: 0.0,
            beta: 0.0,
        };
        assert_eq!(q_update(&mut t, &s, 1, -0.3, &m("001"), &p).unwrap(), -0.3);
    }

    #[test]
    fn max_value_counts_unvisited_as_zero() {
        let mut t = QTable::new();
        let s = m("11");
        t.set(&s, 0, -1.0);
        assert_eq!(t.max_value(&s), 0.0);
        t.set(&s, 1, -0.5);
        assert_eq!(t.max_value(&s), -0.5);
        assert_eq!(t.max_value(&m("01")), 0.0);
    }

    #[test]
    fn greedy_selection() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = QTable::new();
        let s = m("11");
        t.set(&s, 0, 0.1);
        t.set(&s, 1, 0.9);
        assert_eq!(select_action(&t, &s, 0.0, &mut rng).unwrap(), 1);

        let empty = QTable::new();
        assert_eq!(select_action(&empty, &m("0110"), 0.0, &mut rng).unwrap(), 0);
        // Removing bit 0 would empty the mask.
        assert_eq!(select_action(&empty, &m("1000"), 0.0, &mut rng).unwrap(), 1);
    }

    #[test]
    fn no_legal_action_on_single_set_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            select_action(&QTable::new(), &m("1"), 0.5, &mut rng),
            Err(RlError::NoLegalAction)
        );
    }

    #[test]
    fn apply_action_toggles() {
        assert_eq!(apply_action(&m("0101"), 0).unwrap(), m("1101"));
        assert_eq!(apply_action(&m("0101"), 1).unwrap(), m("0001"));
        assert_eq!(
            apply_action(&m("0100"), 1),
            Err(RlError::EmptyMaskResult(1))
        );
        assert!(matches!(
            apply_action(&m("01"), 2),
            Err(RlError::ActionOutOfRange { .. })
        ));
    }

    #[test]
    fn dump_is_sorted() {
        let mut t = QTable::new();
        t.set(&m("10"), 1, 0.5);
        t.set(&m("01"), 0, 0.25);
        t.set(&m("01"), 1, -1.0);
        assert_eq!(t.dump(), "01,0,0.25\n01,1,-1\n10,1,0.5\n");
    }
}
