//! Alternatives, linear orders and the Kendall's tau distance.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// One of the `m` alternatives being ranked, identified by a dense index in `[0, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alternative(pub usize);

impl Alternative {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// A strict total order over alternatives `0..m`, stored as position -> alternative
/// together with the inverse map alternative -> position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearOrder {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl LinearOrder {
    /// Builds an order from a sequence, rejecting anything that is not a
    /// permutation of `0..len`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        let mut position = vec![usize::MAX; m];
        for (pos, &a) in order.iter().enumerate() {
            if a >= m {
                return Err(Error::invalid(format!("alternative {a} out of range for {m} alternatives")));
            }
            if position[a] != usize::MAX {
                return Err(Error::invalid(format!("alternative {a} appears twice")));
            }
            position[a] = pos;
        }
        Ok(LinearOrder { order, position })
    }

    /// The order `(a_0, a_1, ..., a_{m-1})`.
    pub fn identity(m: usize) -> Self {
        let order: Vec<usize> = (0..m).collect();
        LinearOrder { position: order.clone(), order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.order
    }

    /// Alternative at 0-based position `pos`.
    pub fn at(&self, pos: usize) -> Alternative {
        Alternative(self.order[pos])
    }

    /// 0-based position of alternative index `a`. Panics if `a >= m`.
    #[inline]
    pub fn position(&self, a: usize) -> usize {
        self.position[a]
    }

    /// 1-based rank of `a`, so that `at(rank_of(a) - 1) == a`.
    pub fn rank_of(&self, a: Alternative) -> Result<usize> {
        self.position
            .get(a.0)
            .map(|p| p + 1)
            .ok_or_else(|| Error::invalid(format!("unknown alternative {a} for m = {}", self.len())))
    }

    /// True when `a` is ranked above `b`.
    #[inline]
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        LinearOrder::new(order).expect("reversal of a permutation")
    }

    /// The set of the first `k` alternatives.
    pub fn prefix(&self, k: usize) -> Result<PrefixSet> {
        if k > self.len() {
            return Err(Error::invalid(format!("prefix length {k} exceeds m = {}", self.len())));
        }
        Ok(PrefixSet { members: self.order[..k].iter().copied().map(Alternative).collect(), k })
    }

    /// Complement of [`prefix`](Self::prefix): every alternative after position `k`.
    pub fn suffix(&self, k: usize) -> Result<BTreeSet<Alternative>> {
        if k > self.len() {
            return Err(Error::invalid(format!("suffix start {k} exceeds m = {}", self.len())));
        }
        Ok(self.order[k..].iter().copied().map(Alternative).collect())
    }

    pub(crate) fn check_same_size(&self, other: &LinearOrder) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::invalid(format!("orders have different lengths ({} vs {})", self.len(), other.len())));
        }
        Ok(())
    }
}

impl fmt::Display for LinearOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// The set `P_k` of the top `k` alternatives of some order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixSet {
    pub members: BTreeSet<Alternative>,
    pub k: usize,
}

impl PrefixSet {
    pub fn contains(&self, a: Alternative) -> bool {
        self.members.contains(&a)
    }
}

/// Number of pairs ranked in opposite order by `s` and `t`.
///
/// Runs in `O(m log m)` by counting inversions of `t` read in `s`-positions.
pub fn kendall_tau(s: &LinearOrder, t: &LinearOrder) -> Result<u64> {
    s.check_same_size(t)?;
    let mut seq: Vec<usize> = t.order.iter().map(|&a| s.position[a]).collect();
    let mut buf = vec![0usize; seq.len()];
    Ok(count_inversions(&mut seq, &mut buf))
}

fn count_inversions(seq: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = seq.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (left, right) = seq.split_at_mut(mid);
        let (lbuf, rbuf) = buf.split_at_mut(mid);
        count_inversions(left, lbuf) + count_inversions(right, rbuf)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if seq[i] <= seq[j] {
            buf[k] = seq[i];
            i += 1;
        } else {
            buf[k] = seq[j];
            inv += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&seq[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&seq[j..n]);
    seq.copy_from_slice(&buf[..n]);
    inv
}

/// Iterator over all `m!` orders of `0..m` in lexicographic order of their sequences.
pub struct AllOrders {
    current: Option<Vec<usize>>,
}

pub fn all_orders(m: usize) -> AllOrders {
    AllOrders { current: Some((0..m).collect()) }
}

impl Iterator for AllOrders {
    type Item = LinearOrder;

    fn next(&mut self) -> Option<LinearOrder> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        if next_permutation(&mut next) {
            self.current = Some(next);
        }
        Some(LinearOrder::new(cur).expect("enumerated permutation"))
    }
}

/// Advances `v` to its lexicographic successor; returns false after the last one.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
