//! Group Feistel networks on `G × G` and the keyed construction Ψ.
//!
//! One round maps `(x, y) ↦ (y, x·f(y))` and is inverted by
//! `(L, R) ↦ (R·f(L)⁻¹, L)`, whatever `f` is.

use std::fmt;
use std::sync::Arc;

use crate::coins::Coins;
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::oracle::{Direction, LazyFunction, LazyPermutation};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeistelPair {
    pub left: Element,
    pub right: Element,
}

impl FeistelPair {
    pub fn new(left: Element, right: Element) -> Self {
        FeistelPair { left, right }
    }

    pub fn validate(&self, group: &Group) -> Result<()> {
        group.validate(&self.left)?;
        group.validate(&self.right)
    }

    /// Coordinate-wise `self · k`.
    pub fn mul(&self, group: &Group, k: &FeistelPair) -> Result<FeistelPair> {
        Ok(FeistelPair {
            left: group.op(&self.left, &k.left)?,
            right: group.op(&self.right, &k.right)?,
        })
    }

    /// Coordinate-wise inverse.
    pub fn inv(&self, group: &Group) -> Result<FeistelPair> {
        Ok(FeistelPair {
            left: group.inv(&self.left)?,
            right: group.inv(&self.right)?,
        })
    }

    pub fn format(&self, group: &Group) -> String {
        format!("({},{})", group.format(&self.left), group.format(&self.right))
    }
}

pub type FixedFn = Arc<dyn Fn(&Element) -> Result<Element> + Send + Sync>;

/// A round function: lazily sampled random, or a fixed map.
pub enum RoundFunction {
    Random(LazyFunction),
    Fixed(FixedFn),
}

impl fmt::Debug for RoundFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundFunction::Random(l) => f.debug_tuple("Random").field(l).finish(),
            RoundFunction::Fixed(_) => f.write_str("Fixed(..)"),
        }
    }
}

impl RoundFunction {
    pub fn random(group: &Group, coins: &mut dyn Coins) -> Self {
        RoundFunction::Random(LazyFunction::new(group.clone(), coins.fork()))
    }

    pub fn fixed(f: impl Fn(&Element) -> Result<Element> + Send + Sync + 'static) -> Self {
        RoundFunction::Fixed(Arc::new(f))
    }

    /// The constant map to `c`.
    pub fn constant(c: Element) -> Self {
        RoundFunction::fixed(move |_| Ok(c.clone()))
    }

    pub fn eval(&mut self, x: &Element) -> Result<Element> {
        match self {
            RoundFunction::Random(l) => l.query(x),
            RoundFunction::Fixed(f) => f(x),
        }
    }

    /// Number of points defined so far; `None` for fixed maps.
    pub fn defined(&self) -> Option<usize> {
        match self {
            RoundFunction::Random(l) => Some(l.defined()),
            RoundFunction::Fixed(_) => None,
        }
    }
}

/// `(x, y) ↦ (y, x·f(y))`
pub fn round(group: &Group, f: &mut RoundFunction, p: &FeistelPair) -> Result<FeistelPair> {
    p.validate(group)?;
    let fy = f.eval(&p.right)?;
    Ok(FeistelPair {
        left: p.right.clone(),
        right: group.op(&p.left, &fy)?,
    })
}

/// `(L, R) ↦ (R·f(L)⁻¹, L)`
pub fn unround(group: &Group, f: &mut RoundFunction, p: &FeistelPair) -> Result<FeistelPair> {
    p.validate(group)?;
    let prev_right = p.left.clone();
    let f_val = f.eval(&prev_right)?;
    Ok(FeistelPair {
        left: group.div(&p.right, &f_val)?,
        right: prev_right,
    })
}

/// Keyed permutation of `G × G`.
pub trait PairCipher {
    fn group(&self) -> &Group;
    fn apply(&mut self, direction: Direction, p: &FeistelPair) -> Result<FeistelPair>;
}

impl<T: PairCipher + ?Sized> PairCipher for &mut T {
    fn group(&self) -> &Group {
        (**self).group()
    }
    fn apply(&mut self, direction: Direction, p: &FeistelPair) -> Result<FeistelPair> {
        (**self).apply(direction, p)
    }
}

impl<T: PairCipher + ?Sized> PairCipher for Box<T> {
    fn group(&self) -> &Group {
        (**self).group()
    }
    fn apply(&mut self, direction: Direction, p: &FeistelPair) -> Result<FeistelPair> {
        (**self).apply(direction, p)
    }
}

/// An r-round Feistel cipher. Round `i` uses `functions[schedule[i]]`, so
/// several rounds can share one function and see a single lazy table.
#[derive(Debug)]
pub struct RoundFunctionChain {
    group: Group,
    functions: Vec<RoundFunction>,
    schedule: Vec<usize>,
}

impl RoundFunctionChain {
    /// Rounds use `functions` in order.
    pub fn new(group: &Group, functions: Vec<RoundFunction>) -> Result<Self> {
        let schedule = (0..functions.len()).collect();
        RoundFunctionChain::with_schedule(group, functions, schedule)
    }

    pub fn with_schedule(
        group: &Group,
        functions: Vec<RoundFunction>,
        schedule: Vec<usize>,
    ) -> Result<Self> {
        if schedule.is_empty() {
            return Err(Error::Config("a Feistel cipher needs at least one round".into()));
        }
        if let Some(bad) = schedule.iter().find(|&&i| i >= functions.len()) {
            return Err(Error::Config(format!(
                "round schedule refers to function {bad} of {}",
                functions.len()
            )));
        }
        Ok(RoundFunctionChain {
            group: group.clone(),
            functions,
            schedule,
        })
    }

    /// `rounds` independent random round functions.
    pub fn random(group: &Group, rounds: usize, coins: &mut dyn Coins) -> Result<Self> {
        let fs = (0..rounds).map(|_| RoundFunction::random(group, coins)).collect();
        RoundFunctionChain::new(group, fs)
    }

    /// `F_{g,f,f,g}`: slot 0 is `g`, slot 1 is `f`.
    pub fn gffg(group: &Group, f: RoundFunction, g: RoundFunction) -> Self {
        RoundFunctionChain::with_schedule(group, vec![g, f], vec![0, 1, 1, 0])
            .expect("schedule is valid")
    }

    pub fn rounds(&self) -> usize {
        self.schedule.len()
    }

    pub fn function_mut(&mut self, slot: usize) -> Option<&mut RoundFunction> {
        self.functions.get_mut(slot)
    }

    pub fn function(&self, slot: usize) -> Option<&RoundFunction> {
        self.functions.get(slot)
    }

    pub fn encrypt(&mut self, p: &FeistelPair) -> Result<FeistelPair> {
        let mut cur = p.clone();
        for &i in &self.schedule {
            cur = round(&self.group, &mut self.functions[i], &cur)?;
        }
        Ok(cur)
    }

    pub fn decrypt(&mut self, p: &FeistelPair) -> Result<FeistelPair> {
        let mut cur = p.clone();
        for &i in self.schedule.iter().rev() {
            cur = unround(&self.group, &mut self.functions[i], &cur)?;
        }
        Ok(cur)
    }
}

impl PairCipher for RoundFunctionChain {
    fn group(&self) -> &Group {
        &self.group
    }
    fn apply(&mut self, direction: Direction, p: &FeistelPair) -> Result<FeistelPair> {
        match direction {
            Direction::Forward => self.encrypt(p),
            Direction::Backward => self.decrypt(p),
        }
    }
}

/// `Ψ_k(x) = F_{g,f,f,g}(x·k)·k` with the key acting coordinate-wise.
#[derive(Debug)]
pub struct PsiInstance {
    group: Group,
    key: FeistelPair,
    chain: RoundFunctionChain,
}

const G_SLOT: usize = 0;
const F_SLOT: usize = 1;

impl PsiInstance {
    pub fn new(
        group: &Group,
        key_left: Element,
        key_right: Element,
        f: RoundFunction,
        g: RoundFunction,
    ) -> Result<Self> {
        let key = FeistelPair::new(key_left, key_right);
        key.validate(group)?;
        Ok(PsiInstance {
            group: group.clone(),
            key,
            chain: RoundFunctionChain::gffg(group, f, g),
        })
    }

    /// Independent uniform subkeys and fresh random `f`, `g`.
    pub fn generate(group: &Group, coins: &mut dyn Coins) -> Result<Self> {
        let kl = group.sample(coins)?;
        let kr = group.sample(coins)?;
        let f = RoundFunction::random(group, coins);
        let g = RoundFunction::random(group, coins);
        PsiInstance::new(group, kl, kr, f, g)
    }

    pub fn key(&self) -> &FeistelPair {
        &self.key
    }

    pub fn f(&mut self, x: &Element) -> Result<Element> {
        self.chain.functions[F_SLOT].eval(x)
    }

    pub fn g(&mut self, x: &Element) -> Result<Element> {
        self.chain.functions[G_SLOT].eval(x)
    }

    pub fn f_defined(&self) -> Option<usize> {
        self.chain.functions[F_SLOT].defined()
    }

    pub fn g_defined(&self) -> Option<usize> {
        self.chain.functions[G_SLOT].defined()
    }

    pub fn encrypt(&mut self, x: &FeistelPair) -> Result<FeistelPair> {
        let inner = self.chain.encrypt(&x.mul(&self.group, &self.key)?)?;
        inner.mul(&self.group, &self.key)
    }

    pub fn decrypt(&mut self, y: &FeistelPair) -> Result<FeistelPair> {
        let k_inv = self.key.inv(&self.group)?;
        let inner = self.chain.decrypt(&y.mul(&self.group, &k_inv)?)?;
        inner.mul(&self.group, &k_inv)
    }
}

impl PairCipher for PsiInstance {
    fn group(&self) -> &Group {
        &self.group
    }
    fn apply(&mut self, direction: Direction, p: &FeistelPair) -> Result<FeistelPair> {
        match direction {
            Direction::Forward => self.encrypt(p),
            Direction::Backward => self.decrypt(p),
        }
    }
}

/// A uniformly random permutation of `G × G`.
#[derive(Debug)]
pub struct PairPermutation {
    group: Group,
    square: Group,
    perm: LazyPermutation,
}

impl PairPermutation {
    pub fn new(group: &Group, coins: &mut dyn Coins) -> Result<Self> {
        let square = group.square()?;
        Ok(PairPermutation {
            group: group.clone(),
            perm: LazyPermutation::new(square.clone(), coins.fork()),
            square,
        })
    }
}

impl PairCipher for PairPermutation {
    fn group(&self) -> &Group {
        &self.group
    }
    fn apply(&mut self, direction: Direction, p: &FeistelPair) -> Result<FeistelPair> {
        let v = self.square.pair(&p.left, &p.right)?;
        let (left, right) = self.square.unpair(&self.perm.query(direction, &v)?)?;
        Ok(FeistelPair { left, right })
    }
}
