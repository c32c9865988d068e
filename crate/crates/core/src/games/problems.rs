//! The existential forgery (EFP) and cracking (CP) experiments.

use std::collections::HashSet;

use super::{charge, QueryBudget};
use crate::attacks::{slide_attack, SlideConfig};
use crate::coins::Coins;
use crate::em::{EmInstance, EmOracles};
use crate::error::{Error, Result};
use crate::group::{Element, Group};

/// Charges the budget and remembers every `(m, c)` pair the adversary has
/// seen through the cipher oracles.
struct Tracked<'a> {
    inner: &'a mut EmInstance,
    budget: QueryBudget,
    s_used: u64,
    t_used: u64,
    established: HashSet<(Element, Element)>,
    challenge: Option<Element>,
}

impl<'a> Tracked<'a> {
    fn new(inner: &'a mut EmInstance, budget: QueryBudget, challenge: Option<Element>) -> Self {
        Tracked {
            inner,
            budget,
            s_used: 0,
            t_used: 0,
            established: HashSet::new(),
            challenge,
        }
    }
}

impl EmOracles for Tracked<'_> {
    fn group(&self) -> &Group {
        self.inner.group()
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        charge(&mut self.s_used, self.budget.s, "cipher")?;
        let c = self.inner.encrypt(m)?;
        self.established.insert((m.clone(), c.clone()));
        Ok(c)
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        if self.challenge.as_ref() == Some(c) {
            return Err(Error::Refused);
        }
        charge(&mut self.s_used, self.budget.s, "cipher")?;
        let m = self.inner.decrypt(c)?;
        self.established.insert((m.clone(), c.clone()));
        Ok(m)
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        charge(&mut self.t_used, self.budget.t, "permutation")?;
        self.inner.perm_mut().forward(x)
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        charge(&mut self.t_used, self.budget.t, "permutation")?;
        self.inner.perm_mut().backward(y)
    }
}

/// EFP on a fresh instance.
pub fn run_efp(
    adversary: impl FnOnce(&mut dyn EmOracles) -> Result<(Element, Element)>,
    g: &Group,
    budget: QueryBudget,
    coins: &mut dyn Coins,
) -> Result<bool> {
    let mut inst = EmInstance::generate(g, coins)?;
    run_efp_on(&mut inst, adversary, budget)
}

/// EFP on a given instance: the adversary wins with a valid pair it did
/// not obtain from the cipher oracles.
pub fn run_efp_on(
    inst: &mut EmInstance,
    adversary: impl FnOnce(&mut dyn EmOracles) -> Result<(Element, Element)>,
    budget: QueryBudget,
) -> Result<bool> {
    let mut tracked = Tracked::new(inst, budget, None);
    let (m, c) = adversary(&mut tracked)?;
    let g = tracked.group().clone();
    g.validate(&m)?;
    g.validate(&c)?;
    if tracked.established.contains(&(m.clone(), c.clone())) {
        return Ok(false);
    }
    Ok(tracked.inner.encrypt(&m)? == c)
}

/// Answer of the CP decryption oracle. `Refused` is the `⊥` returned for
/// the challenge ciphertext and is never a group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decryption {
    Plain(Element),
    Refused,
}

impl Decryption {
    /// Reads a decryption result, mapping [`Error::Refused`] to `Refused`.
    pub fn from_result(r: Result<Element>) -> Result<Decryption> {
        match r {
            Ok(m) => Ok(Decryption::Plain(m)),
            Err(Error::Refused) => Ok(Decryption::Refused),
            Err(e) => Err(e),
        }
    }
}

/// CP on a fresh instance with a uniform challenge plaintext `m₀`.
pub fn run_cp(
    adversary: impl FnOnce(&mut dyn EmOracles, &Element) -> Result<Element>,
    g: &Group,
    budget: QueryBudget,
    coins: &mut dyn Coins,
) -> Result<bool> {
    let mut inst = EmInstance::generate(g, coins)?;
    let m0 = g.sample(coins)?;
    run_cp_on(&mut inst, &m0, adversary, budget)
}

/// CP on a given instance and challenge: the adversary sees
/// `c₀ = E_k(m₀)`, may query anything except `D(c₀)`, and wins by
/// returning `m₀`.
pub fn run_cp_on(
    inst: &mut EmInstance,
    m0: &Element,
    adversary: impl FnOnce(&mut dyn EmOracles, &Element) -> Result<Element>,
    budget: QueryBudget,
) -> Result<bool> {
    let c0 = inst.encrypt(m0)?;
    let mut tracked = Tracked::new(inst, budget, Some(c0.clone()));
    let guess = adversary(&mut tracked, &c0)?;
    Ok(guess == *m0)
}

/// Tracks cipher inputs so a forgery can avoid them.
struct SeenInputs<'a> {
    inner: &'a mut dyn EmOracles,
    seen: HashSet<Element>,
}

impl EmOracles for SeenInputs<'_> {
    fn group(&self) -> &Group {
        self.inner.group()
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        self.seen.insert(m.clone());
        self.inner.encrypt(m)
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        let m = self.inner.decrypt(c)?;
        self.seen.insert(m.clone());
        Ok(m)
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        self.inner.permute(x)
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        self.inner.permute_inverse(y)
    }
}

/// Forger: runs the slide attack and, with a key in hand, computes
/// `P(m·k)·k` for a plaintext it never sent to the cipher. Without a key
/// it guesses.
pub fn slide_forgery(
    oracles: &mut dyn EmOracles,
    cfg: &SlideConfig,
    coins: &mut dyn Coins,
) -> Result<(Element, Element)> {
    let g = oracles.group().clone();
    let mut tracked = SeenInputs {
        inner: oracles,
        seen: HashSet::new(),
    };
    let key = slide_attack(&mut tracked, cfg, coins)?.key;
    if tracked.seen.len() as u128 >= g.order() {
        return Ok((g.identity(), g.sample(coins)?));
    }
    let m = loop {
        let m = g.sample(coins)?;
        if !tracked.seen.contains(&m) {
            break m;
        }
        coins.discard(false)?;
    };
    let c = match key {
        Some(k) => g.op(&tracked.permute(&g.op(&m, &k)?)?, &k)?,
        None => g.sample(coins)?,
    };
    Ok((m, c))
}

/// Cracker: runs the slide attack and decrypts `c₀` locally as
/// `P⁻¹(c₀·k⁻¹)·k⁻¹`. Without a key it guesses.
pub fn slide_crack(
    oracles: &mut dyn EmOracles,
    c0: &Element,
    cfg: &SlideConfig,
    coins: &mut dyn Coins,
) -> Result<Element> {
    let g = oracles.group().clone();
    match slide_attack(oracles, cfg, coins)?.key {
        Some(k) => {
            let k_inv = g.inv(&k)?;
            let x = oracles.permute_inverse(&g.op(c0, &k_inv)?)?;
            g.op(&x, &k_inv)
        }
        None => g.sample(coins),
    }
}
