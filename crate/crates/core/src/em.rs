//! The one-key group Even-Mansour scheme `E_k(m) = P(m·k)·k`.

use crate::coins::Coins;
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::oracle::LazyPermutation;

/// Oracle access in the Even-Mansour setting: the keyed cipher in both
/// directions and the public permutation in both directions.
pub trait EmOracles {
    fn group(&self) -> &Group;
    fn encrypt(&mut self, m: &Element) -> Result<Element>;
    fn decrypt(&mut self, c: &Element) -> Result<Element>;
    fn permute(&mut self, x: &Element) -> Result<Element>;
    fn permute_inverse(&mut self, y: &Element) -> Result<Element>;
}

impl<T: EmOracles + ?Sized> EmOracles for &mut T {
    fn group(&self) -> &Group {
        (**self).group()
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        (**self).encrypt(m)
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        (**self).decrypt(c)
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        (**self).permute(x)
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        (**self).permute_inverse(y)
    }
}

impl<T: EmOracles + ?Sized> EmOracles for Box<T> {
    fn group(&self) -> &Group {
        (**self).group()
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        (**self).encrypt(m)
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        (**self).decrypt(c)
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        (**self).permute(x)
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        (**self).permute_inverse(y)
    }
}

/// Uniform key.
pub fn keygen(group: &Group, coins: &mut dyn Coins) -> Result<Element> {
    group.sample(coins)
}

#[derive(Debug)]
pub struct EmInstance {
    group: Group,
    key: Element,
    perm: LazyPermutation,
}

impl EmInstance {
    pub fn new(group: Group, key: Element, perm: LazyPermutation) -> Result<Self> {
        group.validate(&key)?;
        if perm.domain() != &group {
            return Err(Error::domain(&group));
        }
        Ok(EmInstance { group, key, perm })
    }

    /// Uniform key and a fresh lazy public permutation.
    pub fn generate(group: &Group, coins: &mut dyn Coins) -> Result<Self> {
        let key = keygen(group, coins)?;
        let perm = LazyPermutation::new(group.clone(), coins.fork());
        EmInstance::new(group.clone(), key, perm)
    }

    pub fn key(&self) -> &Element {
        &self.key
    }

    pub fn perm(&self) -> &LazyPermutation {
        &self.perm
    }

    pub fn perm_mut(&mut self) -> &mut LazyPermutation {
        &mut self.perm
    }

    /// `P(m·k)·k`
    pub fn encrypt(&mut self, m: &Element) -> Result<Element> {
        let g = &self.group;
        let y = self.perm.forward(&g.op(m, &self.key)?)?;
        g.op(&y, &self.key)
    }

    /// `P⁻¹(c·k⁻¹)·k⁻¹`
    pub fn decrypt(&mut self, c: &Element) -> Result<Element> {
        let g = &self.group;
        let k_inv = g.inv(&self.key)?;
        let x = self.perm.backward(&g.op(c, &k_inv)?)?;
        g.op(&x, &k_inv)
    }
}

impl EmOracles for EmInstance {
    fn group(&self) -> &Group {
        &self.group
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        EmInstance::encrypt(self, m)
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        EmInstance::decrypt(self, c)
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        self.perm.forward(x)
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        self.perm.backward(y)
    }
}

/// The ideal world: an independent random permutation π in place of the
/// cipher, next to the same kind of public permutation P.
#[derive(Debug)]
pub struct IdealCipher {
    group: Group,
    pi: LazyPermutation,
    perm: LazyPermutation,
}

impl IdealCipher {
    pub fn generate(group: &Group, coins: &mut dyn Coins) -> Self {
        IdealCipher {
            group: group.clone(),
            pi: LazyPermutation::new(group.clone(), coins.fork()),
            perm: LazyPermutation::new(group.clone(), coins.fork()),
        }
    }
}

impl EmOracles for IdealCipher {
    fn group(&self) -> &Group {
        &self.group
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        self.pi.forward(m)
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        self.pi.backward(c)
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        self.perm.forward(x)
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        self.perm.backward(y)
    }
}
