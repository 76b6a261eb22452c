//! Simulation of a user turning a recommended order into their target order
//! with selection- and insertion-sort steps, and the time model built on the
//! resulting drag distances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::LinearOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Promote the target-best alternative of the unsorted suffix.
    Sel,
    /// Promote the first alternative of the unsorted suffix.
    Ins,
}

/// The kind of each sorting step. Step `k` (1-based) uses entry `k - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortStrategy {
    steps: Vec<StepKind>,
}

impl SortStrategy {
    pub fn new(steps: Vec<StepKind>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::invalid("sorting strategy has no steps"));
        }
        Ok(SortStrategy { steps })
    }

    pub fn all_insertion(m: usize) -> Self {
        SortStrategy { steps: vec![StepKind::Ins; m.max(1)] }
    }

    pub fn all_selection(m: usize) -> Self {
        SortStrategy { steps: vec![StepKind::Sel; m.max(1)] }
    }

    /// Strategy of `len` steps whose bit `k` selects SEL (1) or INS (0) for step `k + 1`.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        let steps = (0..len.max(1)).map(|k| if bits >> k & 1 == 1 { StepKind::Sel } else { StepKind::Ins }).collect();
        SortStrategy { steps }
    }

    pub fn steps(&self) -> &[StepKind] {
        &self.steps
    }
}

/// `f[l - 1]` counts the moves that lifted an alternative by `l` positions,
/// for `l` in `1..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountFunction {
    counts: Vec<u64>,
}

impl CountFunction {
    pub fn zeros(m: usize) -> Self {
        CountFunction { counts: vec![0; m.saturating_sub(1)] }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        CountFunction { counts }
    }

    /// Number of moves of distance `l` (1-based); zero outside `1..m`.
    pub fn get(&self, l: usize) -> u64 {
        l.checked_sub(1).and_then(|i| self.counts.get(i)).copied().unwrap_or(0)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    /// The `m` this count function was built for.
    pub fn m(&self) -> usize {
        self.counts.len() + 1
    }

    /// Total number of drag-and-drop operations.
    pub fn num_moves(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Total number of positions moved, `sum_l l * f(l)`.
    pub fn total_distance(&self) -> u64 {
        self.counts.iter().enumerate().map(|(i, c)| (i as u64 + 1) * c).sum()
    }
}

pub fn num_moves(f: &CountFunction) -> u64 {
    f.num_moves()
}

/// Time cost of a single move as a function of its distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightFunction {
    /// `w(l) = l`
    Linear,
    /// `w(l) = c * l + d`
    Affine { c: f64, d: f64 },
    /// `w(l) = w[l - 1]`
    Table { w: Vec<f64> },
}

impl WeightFunction {
    pub fn affine(c: f64, d: f64) -> Result<Self> {
        if !(c.is_finite() && c >= 0.0 && d.is_finite() && d >= 0.0) {
            return Err(Error::invalid(format!("affine weights need c, d >= 0 (got c = {c}, d = {d})")));
        }
        Ok(WeightFunction::Affine { c, d })
    }

    pub fn table(w: Vec<f64>) -> Result<Self> {
        if let Some(x) = w.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::invalid(format!("weight table entry {x} is negative or not finite")));
        }
        Ok(WeightFunction::Table { w })
    }

    /// Checks the variant's invariants; used after deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFunction::Linear => Ok(()),
            WeightFunction::Affine { c, d } => Self::affine(*c, *d).map(|_| ()),
            WeightFunction::Table { w } => Self::table(w.clone()).map(|_| ()),
        }
    }

    /// Cost of moving up by `l >= 1` positions. Table lookups past the end return 0.
    pub fn weight(&self, l: usize) -> f64 {
        match self {
            WeightFunction::Linear => l as f64,
            WeightFunction::Affine { c, d } => c * l as f64 + d,
            WeightFunction::Table { w } => w.get(l.wrapping_sub(1)).copied().unwrap_or(0.0),
        }
    }

    /// The explicit table `w(1..m-1)`.
    pub fn to_table(&self, m: usize) -> Result<Vec<f64>> {
        self.check_dim(m)?;
        Ok((1..m).map(|l| self.weight(l)).collect())
    }

    pub(crate) fn check_dim(&self, m: usize) -> Result<()> {
        if let WeightFunction::Table { w } = self {
            if w.len() != m.saturating_sub(1) {
                return Err(Error::invalid(format!(
                    "weight table has {} entries, expected m - 1 = {}",
                    w.len(),
                    m.saturating_sub(1)
                )));
            }
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, WeightFunction::Linear)
    }
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightFunction::Linear => f.write_str("linear"),
            WeightFunction::Affine { c, d } => write!(f, "affine:{c},{d}"),
            WeightFunction::Table { w } => {
                f.write_str("table:")?;
                for (i, x) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `linear`, `affine:C,D` or `table:W1,W2,...`.
impl FromStr for WeightFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let nums = |body: &str| -> Result<Vec<f64>> {
            body.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|e| Error::invalid(format!("bad weight `{x}`: {e}"))))
                .collect()
        };
        match s.split_once(':') {
            None if s == "linear" => Ok(WeightFunction::Linear),
            Some(("affine", body)) => match nums(body)?.as_slice() {
                [c, d] => WeightFunction::affine(*c, *d),
                _ => Err(Error::invalid("affine weights take exactly two numbers: affine:C,D")),
            },
            Some(("table", body)) => WeightFunction::table(nums(body)?),
            _ => Err(Error::invalid(format!(
                "unknown weight function `{s}` (expected linear, affine:C,D or table:W1,...)"
            ))),
        }
    }
}

/// One executed step of a simulated sort. Positions are 0-based; a move
/// always goes up, so `to <= from` and `distance = from - to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveRecord {
    pub step: usize,
    pub kind: StepKind,
    pub alternative: usize,
    pub from: usize,
    pub to: usize,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortTrace {
    pub moves: Vec<MoveRecord>,
    pub final_order: LinearOrder,
}

/// Sorts `source` into `target`, executing one step per position.
///
/// Step `k` takes its kind from the strategy. The last step has a single
/// unsorted alternative left, so selection and insertion coincide there and
/// the strategy only needs `m - 1` entries; a missing final entry is treated
/// as insertion.
pub fn run_sort(
    source: &LinearOrder,
    target: &LinearOrder,
    strategy: &SortStrategy,
) -> Result<(CountFunction, SortTrace)> {
    source.check_same_size(target)?;
    let m = source.len();
    if strategy.steps.len() < m.saturating_sub(1) {
        return Err(Error::invalid(format!(
            "strategy has {} steps, sorting {m} alternatives needs at least {}",
            strategy.steps.len(),
            m - 1
        )));
    }

    let mut current = source.as_slice().to_vec();
    let mut counts = CountFunction::zeros(m);
    let mut moves = Vec::with_capacity(m);
    for k in 0..m {
        let kind = strategy.steps.get(k).copied().unwrap_or(StepKind::Ins);
        // current[..k] is sorted by target; current[k..] is the suffix set.
        let from = match kind {
            StepKind::Ins => k,
            StepKind::Sel => (k..m).min_by_key(|&p| target.position(current[p])).expect("non-empty suffix"),
        };
        let a = current[from];
        let to = current[..k].partition_point(|&b| target.position(b) < target.position(a));
        current[to..=from].rotate_right(1);
        let distance = from - to;
        if distance > 0 {
            counts.counts[distance - 1] += 1;
        }
        moves.push(MoveRecord { step: k + 1, kind, alternative: a, from, to, distance });
        assert!(
            current[..=k].windows(2).all(|w| target.position(w[0]) < target.position(w[1])),
            "sorted-prefix property violated after step {}",
            k + 1
        );
    }

    let final_order = LinearOrder::new(current).expect("sorting preserves the permutation");
    debug_assert_eq!(&final_order, target);
    Ok((counts, SortTrace { moves, final_order }))
}

/// `time_w = <f, w>`.
pub fn time_of(f: &CountFunction, w: &WeightFunction) -> Result<f64> {
    w.check_dim(f.m())?;
    Ok(f.as_slice().iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| c as f64 * w.weight(i + 1)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dcab() -> LinearOrder {
        LinearOrder::new(vec![3, 2, 0, 1]).unwrap()
    }

    #[test]
    fn insertion_sort_worked_example() {
        let (f, trace) = run_sort(&dcab(), &LinearOrder::identity(4), &SortStrategy::all_insertion(4)).unwrap();
        assert_eq!(f.as_slice(), &[1, 2, 0]);
        assert_eq!(trace.final_order, LinearOrder::identity(4));
        let dists: Vec<_> = trace.moves.iter().map(|r| r.distance).collect();
        assert_eq!(dists, vec![0, 1, 2, 2]);
        assert_eq!(trace.moves[1].alternative, 2);
    }

    #[test]
    fn selection_sort_worked_example() {
        let (f, _) = run_sort(&dcab(), &LinearOrder::identity(4), &SortStrategy::all_selection(4)).unwrap();
        assert_eq!(f.as_slice(), &[1, 2, 0]);
    }

    #[test]
    fn identical_orders_need_no_moves() {
        let s = dcab();
        let (f, trace) = run_sort(&s, &s, &SortStrategy::all_selection(4)).unwrap();
        assert_eq!(f.num_moves(), 0);
        assert!(trace.moves.iter().all(|r| r.distance == 0));
    }

    #[test]
    fn strategy_length_checks() {
        let s = dcab();
        let t = LinearOrder::identity(4);
        assert!(run_sort(&s, &t, &SortStrategy::new(vec![StepKind::Ins; 2]).unwrap()).is_err());
        assert!(run_sort(&s, &t, &SortStrategy::new(vec![StepKind::Sel; 3]).unwrap()).is_ok());
        assert!(SortStrategy::new(vec![]).is_err());
        assert!(run_sort(&s, &LinearOrder::identity(3), &SortStrategy::all_insertion(4)).is_err());
    }

    #[test]
    fn num_moves_examples() {
        assert_eq!(num_moves(&CountFunction::from_counts(vec![1, 2, 0])), 3);
        assert_eq!(num_moves(&CountFunction::zeros(5)), 0);
        assert_eq!(num_moves(&CountFunction::from_counts(vec![0, 0, 0, 1])), 1);
    }

    #[test]
    fn time_examples() {
        let f = CountFunction::from_counts(vec![1, 2, 0]);
        assert_eq!(time_of(&f, &WeightFunction::Linear).unwrap(), 5.0);
        assert_eq!(time_of(&f, &WeightFunction::affine(1.0, 1.0).unwrap()).unwrap(), 8.0);
        assert_eq!(time_of(&f, &WeightFunction::table(vec![0.0; 3]).unwrap()).unwrap(), 0.0);
        assert!(time_of(&f, &WeightFunction::table(vec![1.0; 2]).unwrap()).is_err());
    }

    #[test]
    fn weight_parsing() {
        assert_eq!("linear".parse::<WeightFunction>().unwrap(), WeightFunction::Linear);
        assert_eq!("affine:2,0.5".parse::<WeightFunction>().unwrap(), WeightFunction::Affine { c: 2.0, d: 0.5 });
        assert_eq!("table:1,3,4".parse::<WeightFunction>().unwrap(), WeightFunction::Table { w: vec![1.0, 3.0, 4.0] });
        assert!("affine:1".parse::<WeightFunction>().is_err());
        assert!("table:1,-2".parse::<WeightFunction>().is_err());
        assert!("cubic".parse::<WeightFunction>().is_err());
        let w: WeightFunction = "table:1,3,4".parse().unwrap();
        assert_eq!(w.to_string().parse::<WeightFunction>().unwrap(), w);
    }
}
