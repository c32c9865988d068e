//! Exact output distributions of randomized procedures by walking every
//! branch of their choice tree.
//!
//! The procedure is rerun from scratch once per tree node with a
//! [`Coins`] source that replays a fixed prefix of choices. When it asks
//! for a choice past the prefix the run stops and the node branches over
//! every value.
//!
//! Resampling loops are handled analytically. A loop that throws a draw
//! away calls [`Coins::discard`]; at the frontier that marks the branch as
//! rejected instead of exploring an unbounded retry tree. With `A` the
//! accepted branches, `R₀` the rejections that leave the state untouched
//! and `R₁` the rejections that also set a bad-event flag, the loop ends in
//! accepted branch `a` with probability `1/|A|`, of which
//! `1/(n − |R₀|)` is reached without passing through `R₁`.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::coins::Coins;
use crate::error::{Error, Result};

/// Upper limit on procedure reruns per enumeration.
pub const NODE_CAP: u64 = 20_000_000;

pub type Distribution<O> = BTreeMap<O, BigRational>;

/// Outcome of an enumerated run. `mark_bad` records that a flagged
/// resampling loop was passed on the way to this outcome; outcome types
/// without a flag ignore it.
pub trait Outcome: Ord + Clone + Send {
    fn mark_bad(&mut self);
}

impl Outcome for bool {
    fn mark_bad(&mut self) {}
}

impl Outcome for () {
    fn mark_bad(&mut self) {}
}

/// A value paired with a monotone bad flag.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flagged<T> {
    pub value: T,
    pub bad: bool,
}

impl<T: Ord + Clone + Send> Outcome for Flagged<T> {
    fn mark_bad(&mut self) {
        self.bad = true;
    }
}

#[derive(Debug)]
struct ReplayState {
    prefix: Vec<u128>,
    cursor: usize,
}

/// Coins that replay a prefix of choices, shared by every oracle of one run.
#[derive(Clone, Debug)]
pub struct ReplayCoins(Arc<Mutex<ReplayState>>);

impl ReplayCoins {
    fn new(prefix: Vec<u128>) -> Self {
        ReplayCoins(Arc::new(Mutex::new(ReplayState { prefix, cursor: 0 })))
    }
}

impl Coins for ReplayCoins {
    fn below(&mut self, n: u128) -> Result<u128> {
        if n == 0 {
            return Err(Error::Precondition("cannot draw below 0".into()));
        }
        let mut st = self.0.lock().expect("replay state poisoned");
        if st.cursor < st.prefix.len() {
            let v = st.prefix[st.cursor];
            st.cursor += 1;
            if v >= n {
                return Err(Error::Precondition(
                    "procedure is not deterministic given its choices".into(),
                ));
            }
            Ok(v)
        } else {
            Err(Error::ChoicePending(n))
        }
    }

    fn discard(&mut self, raises_flag: bool) -> Result<()> {
        let st = self.0.lock().expect("replay state poisoned");
        if st.cursor == st.prefix.len() && st.cursor > 0 {
            Err(Error::Discarded { raises_flag })
        } else {
            Err(Error::Precondition(
                "discard of a choice that was not the latest".into(),
            ))
        }
    }

    fn fork(&mut self) -> Box<dyn Coins> {
        Box::new(self.clone())
    }
}

enum Node<O> {
    Leaf(Distribution<O>),
    Rejected { raises_flag: bool },
}

struct Walker<'a, F> {
    run: &'a F,
    visits: AtomicU64,
    cap: u64,
}

impl<O, F> Walker<'_, F>
where
    O: Outcome,
    F: Fn(&mut dyn Coins) -> Result<O> + Sync,
{
    fn step(&self, prefix: &[u128]) -> Result<std::result::Result<O, Step>> {
        if self.visits.fetch_add(1, Ordering::Relaxed) >= self.cap {
            return Err(Error::Capacity {
                what: "choice-tree nodes".into(),
                size: self.cap as u128 + 1,
                limit: self.cap as u128,
            });
        }
        let mut coins = ReplayCoins::new(prefix.to_vec());
        match (self.run)(&mut coins) {
            Ok(o) => Ok(Ok(o)),
            Err(Error::ChoicePending(n)) => Ok(Err(Step::Branch(n))),
            Err(Error::Discarded { raises_flag }) => Ok(Err(Step::Rejected(raises_flag))),
            Err(e) => Err(e),
        }
    }

    fn explore(&self, prefix: &mut Vec<u128>) -> Result<Node<O>> {
        match self.step(prefix)? {
            Ok(o) => Ok(Node::Leaf(BTreeMap::from([(o, BigRational::one())]))),
            Err(Step::Rejected(raises_flag)) => Ok(Node::Rejected { raises_flag }),
            Err(Step::Branch(n)) => {
                let mut children = Vec::new();
                for i in 0..n {
                    prefix.push(i);
                    let child = self.explore(prefix);
                    prefix.pop();
                    children.push(child?);
                }
                combine(n, children).map(Node::Leaf)
            }
        }
    }

    fn explore_root(&self) -> Result<Distribution<O>> {
        match self.step(&[])? {
            Ok(o) => Ok(BTreeMap::from([(o, BigRational::one())])),
            Err(Step::Rejected(_)) => Err(Error::Precondition(
                "discard before any choice was made".into(),
            )),
            Err(Step::Branch(n)) => {
                let children = (0..n)
                    .into_par_iter()
                    .map(|i| self.explore(&mut vec![i]))
                    .collect::<Result<Vec<_>>>()?;
                combine(n, children)
            }
        }
    }
}

enum Step {
    Branch(u128),
    Rejected(bool),
}

fn combine<O: Outcome>(n: u128, children: Vec<Node<O>>) -> Result<Distribution<O>> {
    let mut accepted = Vec::new();
    let mut quiet_rejects = 0u128;
    let mut flagged_rejects = 0u128;
    for child in children {
        match child {
            Node::Leaf(d) => accepted.push(d),
            Node::Rejected { raises_flag: false } => quiet_rejects += 1,
            Node::Rejected { raises_flag: true } => flagged_rejects += 1,
        }
    }
    if accepted.is_empty() {
        return Err(Error::Precondition(
            "resampling loop rejects every value".into(),
        ));
    }
    let frac = |num: u128, den: u128| BigRational::new(BigInt::from(num), BigInt::from(den));
    let mut out: Distribution<O> = BTreeMap::new();
    let mut add = |o: O, p: BigRational| {
        let slot = out.entry(o).or_insert_with(BigRational::zero);
        *slot += p;
    };
    if quiet_rejects == 0 && flagged_rejects == 0 {
        let w = frac(1, n);
        for d in accepted {
            for (o, p) in d {
                add(o, p * &w);
            }
        }
        return Ok(out);
    }
    let a = accepted.len() as u128;
    let clean = frac(1, n - quiet_rejects);
    let dirty = frac(1, a) - &clean;
    for d in accepted {
        for (o, p) in d {
            if !dirty.is_zero() {
                let mut bad = o.clone();
                bad.mark_bad();
                add(bad, &p * &dirty);
            }
            add(o, p * &clean);
        }
    }
    Ok(out)
}

/// Exact output distribution of `run` over all of its random choices.
pub fn exact_distribution<O, F>(run: F) -> Result<Distribution<O>>
where
    O: Outcome,
    F: Fn(&mut dyn Coins) -> Result<O> + Sync,
{
    exact_distribution_capped(run, NODE_CAP)
}

pub fn exact_distribution_capped<O, F>(run: F, cap: u64) -> Result<Distribution<O>>
where
    O: Outcome,
    F: Fn(&mut dyn Coins) -> Result<O> + Sync,
{
    let walker = Walker {
        run: &run,
        visits: AtomicU64::new(0),
        cap,
    };
    walker.explore_root()
}

/// Total probability of the outcomes satisfying `pred`.
pub fn probability<O>(dist: &Distribution<O>, pred: impl Fn(&O) -> bool) -> BigRational {
    dist.iter()
        .filter(|(o, _)| pred(o))
        .fold(BigRational::zero(), |acc, (_, p)| acc + p)
}

/// Pushes a distribution forward through `map`.
pub fn marginal<O, K: Ord>(dist: &Distribution<O>, map: impl Fn(&O) -> K) -> BTreeMap<K, BigRational> {
    let mut out = BTreeMap::new();
    for (o, p) in dist {
        *out.entry(map(o)).or_insert_with(BigRational::zero) += p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn two_dice_sum() {
        let dist = exact_distribution(|c: &mut dyn Coins| {
            Ok(c.below(6)? + c.below(6)? + 2 == 7)
        })
        .unwrap();
        assert_eq!(dist[&true], r(1, 6));
        assert_eq!(dist[&false], r(5, 6));
    }

    #[test]
    fn quiet_rejection_renormalizes() {
        // uniform on {0,1,2} by rejecting 3 from a draw below 4
        let dist = exact_distribution(|c: &mut dyn Coins| loop {
            let v = c.below(4)?;
            if v < 3 {
                return Ok(Flagged { value: v, bad: false });
            }
            c.discard(false)?;
        })
        .unwrap();
        assert_eq!(dist.len(), 3);
        for p in dist.values() {
            assert_eq!(p, &r(1, 3));
        }
    }

    #[test]
    fn flagged_rejection_splits_mass() {
        // draw below 4; 3 sets the flag and retries, 2 retries quietly
        let dist = exact_distribution(|c: &mut dyn Coins| loop {
            let v = c.below(4)?;
            match v {
                3 => c.discard(true)?,
                2 => c.discard(false)?,
                _ => return Ok(Flagged { value: v, bad: false }),
            }
        })
        .unwrap();
        // first effective draw is uniform on {0,1,3}
        assert_eq!(dist[&Flagged { value: 0, bad: false }], r(1, 3));
        assert_eq!(dist[&Flagged { value: 0, bad: true }], r(1, 6));
        assert_eq!(probability(&dist, |o| o.bad), r(1, 3));
    }

    #[test]
    fn cap_is_enforced() {
        let res = exact_distribution_capped(|c: &mut dyn Coins| Ok(c.below(100)? == 0), 10);
        assert!(matches!(res, Err(Error::Capacity { .. })));
    }
}
