//! Lazily sampled random permutations and random functions.

use std::collections::HashMap;
use std::fmt;

use crate::coins::Coins;
use crate::error::{Error, Result};
use crate::group::{Element, Group};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn reverse(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// A uniformly random permutation of a group, defined point by point as it
/// is queried.
///
/// A fresh point is answered with a uniform draw from the group, redrawn
/// while it lands on an already used value, so fresh answers are uniform
/// over the unused part of the other side.
pub struct LazyPermutation {
    domain: Group,
    forward: HashMap<Element, Element>,
    backward: HashMap<Element, Element>,
    coins: Box<dyn Coins>,
}

impl fmt::Debug for LazyPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyPermutation")
            .field("domain", &self.domain)
            .field("defined", &self.forward.len())
            .finish()
    }
}

impl LazyPermutation {
    pub fn new(domain: Group, coins: Box<dyn Coins>) -> Self {
        LazyPermutation {
            domain,
            forward: HashMap::new(),
            backward: HashMap::new(),
            coins,
        }
    }

    /// A permutation with every point defined, uniform over all |G|!
    /// permutations (Fisher–Yates over the enumerated group).
    pub fn fully_sampled(domain: Group, mut coins: Box<dyn Coins>) -> Result<Self> {
        let xs = domain.elements()?;
        let mut ys = xs.clone();
        for i in (1..ys.len()).rev() {
            let j = coins.below(i as u128 + 1)? as usize;
            ys.swap(i, j);
        }
        let mut perm = LazyPermutation::new(domain, coins);
        for (x, y) in xs.into_iter().zip(ys) {
            perm.define(x, y);
        }
        Ok(perm)
    }

    /// A permutation pre-seeded with `pairs`; other points stay lazy.
    pub fn with_pairs(
        domain: Group,
        pairs: impl IntoIterator<Item = (Element, Element)>,
        coins: Box<dyn Coins>,
    ) -> Result<Self> {
        let mut perm = LazyPermutation::new(domain, coins);
        for (x, y) in pairs {
            perm.domain.validate(&x)?;
            perm.domain.validate(&y)?;
            if perm.forward.contains_key(&x) || perm.backward.contains_key(&y) {
                return Err(Error::Precondition(
                    "seed pairs do not form a partial bijection".into(),
                ));
            }
            perm.define(x, y);
        }
        Ok(perm)
    }

    pub fn domain(&self) -> &Group {
        &self.domain
    }

    pub fn query(&mut self, direction: Direction, v: &Element) -> Result<Element> {
        match direction {
            Direction::Forward => self.forward(v),
            Direction::Backward => self.backward(v),
        }
    }

    pub fn forward(&mut self, x: &Element) -> Result<Element> {
        self.domain.validate(x)?;
        if let Some(y) = self.forward.get(x) {
            return Ok(y.clone());
        }
        let y = fresh(&self.domain, &self.backward, &mut self.coins)?;
        self.define(x.clone(), y.clone());
        Ok(y)
    }

    pub fn backward(&mut self, y: &Element) -> Result<Element> {
        self.domain.validate(y)?;
        if let Some(x) = self.backward.get(y) {
            return Ok(x.clone());
        }
        let x = fresh(&self.domain, &self.forward, &mut self.coins)?;
        self.define(x.clone(), y.clone());
        Ok(x)
    }

    /// Image of `x` if it is already defined.
    pub fn peek_forward(&self, x: &Element) -> Option<&Element> {
        self.forward.get(x)
    }

    /// Preimage of `y` if it is already defined.
    pub fn peek_backward(&self, y: &Element) -> Option<&Element> {
        self.backward.get(y)
    }

    pub fn defined(&self) -> usize {
        self.forward.len()
    }

    /// Defined pairs, sorted by input.
    pub fn pairs(&self) -> Vec<(Element, Element)> {
        let mut out: Vec<_> = self
            .forward
            .iter()
            .map(|(x, y)| (x.clone(), y.clone()))
            .collect();
        out.sort();
        out
    }

    fn define(&mut self, x: Element, y: Element) {
        debug_assert!(!self.forward.contains_key(&x), "redefining a point");
        debug_assert!(!self.backward.contains_key(&y), "reusing an image");
        self.forward.insert(x.clone(), y.clone());
        self.backward.insert(y, x);
    }

    /// Full check that the two maps are mutually inverse partial bijections.
    pub fn check_invariants(&self) -> bool {
        self.forward.len() == self.backward.len()
            && self
                .forward
                .iter()
                .all(|(x, y)| self.backward.get(y) == Some(x))
    }
}

fn fresh(
    domain: &Group,
    used: &HashMap<Element, Element>,
    coins: &mut Box<dyn Coins>,
) -> Result<Element> {
    // Unreachable when called on an undefined point, by pigeonhole.
    if used.len() as u128 >= domain.order() {
        return Err(Error::Precondition("permutation is fully defined".into()));
    }
    loop {
        let v = domain.sample(coins.as_mut())?;
        if !used.contains_key(&v) {
            return Ok(v);
        }
        coins.discard(false)?;
    }
}

/// A uniformly random function from a group to itself, defined lazily.
pub struct LazyFunction {
    domain: Group,
    table: HashMap<Element, Element>,
    coins: Box<dyn Coins>,
}

impl fmt::Debug for LazyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyFunction")
            .field("domain", &self.domain)
            .field("defined", &self.table.len())
            .finish()
    }
}

impl LazyFunction {
    pub fn new(domain: Group, coins: Box<dyn Coins>) -> Self {
        LazyFunction {
            domain,
            table: HashMap::new(),
            coins,
        }
    }

    pub fn domain(&self) -> &Group {
        &self.domain
    }

    pub fn query(&mut self, v: &Element) -> Result<Element> {
        self.domain.validate(v)?;
        if let Some(y) = self.table.get(v) {
            return Ok(y.clone());
        }
        let y = self.domain.sample(self.coins.as_mut())?;
        self.table.insert(v.clone(), y.clone());
        Ok(y)
    }

    pub fn peek(&self, v: &Element) -> Option<&Element> {
        self.table.get(v)
    }

    pub fn defined(&self) -> usize {
        self.table.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::SeededCoins;

    fn coins(seed: u64) -> Box<dyn Coins> {
        Box::new(SeededCoins::from_seed(seed))
    }

    #[test]
    fn forward_is_deterministic_and_invertible() {
        let z = Group::parse("zmod:257").unwrap();
        let mut p = LazyPermutation::new(z.clone(), coins(1));
        let mut draw = SeededCoins::from_seed(2);
        for _ in 0..100 {
            let x = z.sample(&mut draw).unwrap();
            let y = p.forward(&x).unwrap();
            assert_eq!(p.forward(&x).unwrap(), y);
            assert_eq!(p.backward(&y).unwrap(), x);
        }
        assert!(p.check_invariants());
    }

    #[test]
    fn mixed_directions_stay_bijective() {
        let z = Group::parse("dihedral:4").unwrap();
        let mut p = LazyPermutation::new(z.clone(), coins(9));
        for (i, e) in z.elements().unwrap().iter().enumerate() {
            let dir = if i % 3 == 0 { Direction::Backward } else { Direction::Forward };
            p.query(dir, e).unwrap();
            assert!(p.check_invariants());
        }
        assert!(p.defined() <= 8);
    }

    #[test]
    fn fully_sampled_defines_everything() {
        let z = Group::parse("zmod:7").unwrap();
        let p = LazyPermutation::fully_sampled(z.clone(), coins(4)).unwrap();
        for e in z.elements().unwrap() {
            let y = p.peek_forward(&e).unwrap();
            assert_eq!(p.peek_backward(y), Some(&e));
        }
        assert!(matches!(
            LazyPermutation::fully_sampled(Group::parse("xor:21").unwrap(), coins(0)),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn function_repeats() {
        let z = Group::parse("zmod:2").unwrap();
        let mut f = LazyFunction::new(z.clone(), coins(5));
        let a = f.query(&z.identity()).unwrap();
        assert_eq!(f.query(&z.identity()).unwrap(), a);
        assert_eq!(f.defined(), 1);
    }
}
