//! Distinguishers for few-round group Feistel ciphers and the slide attack
//! on one-key Even-Mansour.

use std::collections::HashMap;

use crate::coins::Coins;
use crate::em::EmOracles;
use crate::error::{Error, Result};
use crate::feistel::{FeistelPair, PairCipher};
use crate::group::{Element, Group};
use crate::oracle::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Guess {
    Cipher,
    Random,
}

/// Outcome of a repeated one-sided test. `hits` counts the trials on which
/// the tested relation held.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub guess: Guess,
    pub trials: u64,
    pub hits: u64,
}

impl Verdict {
    fn all_or_nothing(trials: u64, hits: u64) -> Verdict {
        Verdict {
            guess: if hits == trials { Guess::Cipher } else { Guess::Random },
            trials,
            hits,
        }
    }

    /// Fraction of trials on which the relation held.
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.hits as f64 / self.trials as f64
        }
    }
}

fn random_pair(g: &Group, coins: &mut dyn Coins) -> Result<FeistelPair> {
    Ok(FeistelPair::new(g.sample(coins)?, g.sample(coins)?))
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        Err(Error::Config("trials must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// One round leaks its input: the output's left half is the input's
/// right half.
pub fn f1_trial(oracle: &mut dyn PairCipher, coins: &mut dyn Coins) -> Result<bool> {
    let g = oracle.group().clone();
    let x = random_pair(&g, coins)?;
    let y = oracle.apply(Direction::Forward, &x)?;
    Ok(y.left == x.right)
}

pub fn distinguish_f1(
    oracle: &mut dyn PairCipher,
    trials: u64,
    coins: &mut dyn Coins,
) -> Result<Verdict> {
    require_trials(trials)?;
    let mut hits = 0;
    for _ in 0..trials {
        hits += f1_trial(oracle, coins)? as u64;
    }
    Ok(Verdict::all_or_nothing(trials, hits))
}

/// Queries `(1, probe)` and `(L₀, probe)` for a uniform `L₀ ≠ 1`; two
/// rounds satisfy `L₂′·L₂⁻¹ = L₀`.
pub fn f2_trial(
    oracle: &mut dyn PairCipher,
    probe: &Element,
    coins: &mut dyn Coins,
) -> Result<bool> {
    let g = oracle.group().clone();
    g.validate(probe)?;
    if *probe == g.identity() {
        return Err(Error::Precondition("probe must not be the identity".into()));
    }
    let l0 = g.sample_non_identity(coins)?;
    let first = oracle.apply(Direction::Forward, &FeistelPair::new(g.identity(), probe.clone()))?;
    let second = oracle.apply(Direction::Forward, &FeistelPair::new(l0.clone(), probe.clone()))?;
    Ok(g.div(&second.left, &first.left)? == l0)
}

/// Guesses cipher only if the relation holds for every probe.
pub fn distinguish_f2(
    oracle: &mut dyn PairCipher,
    probes: &[Element],
    coins: &mut dyn Coins,
) -> Result<Verdict> {
    require_trials(probes.len() as u64)?;
    let mut hits = 0;
    for p in probes {
        hits += f2_trial(oracle, p, coins)? as u64;
    }
    Ok(Verdict::all_or_nothing(probes.len() as u64, hits))
}

/// `n` uniform non-identity probes.
pub fn random_probes(g: &Group, n: usize, coins: &mut dyn Coins) -> Result<Vec<Element>> {
    (0..n).map(|_| g.sample_non_identity(coins)).collect()
}

/// One trial of the three-round chosen-ciphertext test. Encrypts
/// `(L₀, R₀)` and `(L₀′, R₀)`, decrypts `(L₃′, L₀·L₀′⁻¹·R₃′)` and checks
/// `R₀″ = L₃′·L₃⁻¹·R₀`. A decryption query whose answer is already known
/// is answered locally instead of being repeated.
pub fn f3_trial(oracle: &mut dyn PairCipher, coins: &mut dyn Coins) -> Result<bool> {
    let g = oracle.group().clone();
    let l0 = g.sample(coins)?;
    let l0_alt = loop {
        let v = g.sample(coins)?;
        if v != l0 {
            break v;
        }
        coins.discard(false)?;
    };
    let r0 = g.sample(coins)?;
    let x1 = FeistelPair::new(l0.clone(), r0.clone());
    let y1 = oracle.apply(Direction::Forward, &x1)?;
    let x2 = FeistelPair::new(l0_alt.clone(), r0.clone());
    let y2 = oracle.apply(Direction::Forward, &x2)?;
    let shift = g.div(&l0, &l0_alt)?;
    let query = FeistelPair::new(y2.left.clone(), g.op(&shift, &y2.right)?);
    let answer = if query == y1 {
        x1
    } else if query == y2 {
        x2
    } else {
        oracle.apply(Direction::Backward, &query)?
    };
    let expected = g.op(&g.div(&y2.left, &y1.left)?, &r0)?;
    Ok(answer.right == expected)
}

/// Guesses cipher only if every trial passes.
pub fn distinguish_f3_sprp(
    oracle: &mut dyn PairCipher,
    trials: u64,
    coins: &mut dyn Coins,
) -> Result<Verdict> {
    require_trials(trials)?;
    let mut hits = 0;
    for _ in 0..trials {
        hits += f3_trial(oracle, coins)? as u64;
    }
    Ok(Verdict::all_or_nothing(trials, hits))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlideConfig {
    pub d: u128,
    pub verify_checks: u32,
}

impl SlideConfig {
    /// `d = ⌈√|G|⌉`, eight verification checks.
    pub fn for_group(g: &Group) -> SlideConfig {
        SlideConfig {
            d: ceil_sqrt(g.order()),
            verify_checks: 8,
        }
    }
}

pub fn ceil_sqrt(n: u128) -> u128 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlideOutcome {
    /// First candidate that passed verification.
    pub key: Option<Element>,
    /// Cross matches found in the collection phase.
    pub candidates: usize,
    /// Distinct candidate keys that passed verification.
    pub verified: usize,
    /// Queries made while collecting; always `d` each.
    pub enc_queries: u64,
    pub perm_queries: u64,
    /// Queries made by `verify_key`.
    pub verify_enc_queries: u64,
    pub verify_perm_queries: u64,
}

/// Counts queries passing through to an inner oracle set.
pub struct Counting<'a> {
    inner: &'a mut dyn EmOracles,
    pub enc: u64,
    pub dec: u64,
    pub perm: u64,
    pub perm_inv: u64,
}

impl<'a> Counting<'a> {
    pub fn new(inner: &'a mut dyn EmOracles) -> Self {
        Counting {
            inner,
            enc: 0,
            dec: 0,
            perm: 0,
            perm_inv: 0,
        }
    }
}

impl EmOracles for Counting<'_> {
    fn group(&self) -> &Group {
        self.inner.group()
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        self.enc += 1;
        self.inner.encrypt(m)
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        self.dec += 1;
        self.inner.decrypt(c)
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        self.perm += 1;
        self.inner.permute(x)
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        self.perm_inv += 1;
        self.inner.permute_inverse(y)
    }
}

/// True iff `E(x) = P(x·k)·k` for `n_checks` fresh uniform `x`.
pub fn verify_key(
    oracles: &mut dyn EmOracles,
    k: &Element,
    n_checks: u32,
    coins: &mut dyn Coins,
) -> Result<bool> {
    if n_checks == 0 {
        return Err(Error::Precondition("n_checks must be at least 1".into()));
    }
    let g = oracles.group().clone();
    g.validate(k)?;
    for _ in 0..n_checks {
        let x = g.sample(coins)?;
        let c = oracles.encrypt(&x)?;
        let y = oracles.permute(&g.op(&x, k)?)?;
        if g.op(&y, k)? != c {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Slide attack: `d` distinct `x` to the cipher, `d` distinct `y` to the
/// public permutation, and every pair `(i, j)` with
/// `E(x_i)·y_j⁻¹ = P(y_j)·x_i⁻¹` proposes the key `x_i⁻¹·y_j`.
///
/// In an abelian group the relation separates into
/// `E(x_i)·x_i = P(y_j)·y_j`, so matches come from a hash join; otherwise
/// all `d²` pairs are tested.
pub fn slide_attack(
    oracles: &mut dyn EmOracles,
    cfg: &SlideConfig,
    coins: &mut dyn Coins,
) -> Result<SlideOutcome> {
    let g = oracles.group().clone();
    if cfg.d == 0 {
        return Err(Error::Config("d must be at least 1".into()));
    }
    if cfg.d > g.order() {
        return Err(Error::Config(format!(
            "d = {} exceeds the group order {}",
            cfg.d,
            g.order()
        )));
    }
    if cfg.verify_checks == 0 {
        return Err(Error::Config("verify_checks must be at least 1".into()));
    }
    let xs = g.sample_distinct(cfg.d, coins)?;
    let ys = g.sample_distinct(cfg.d, coins)?;

    let mut counter = Counting::new(oracles);
    let ex: Vec<Element> = xs.iter().map(|x| counter.encrypt(x)).collect::<Result<_>>()?;
    let py: Vec<Element> = ys.iter().map(|y| counter.permute(y)).collect::<Result<_>>()?;
    let (enc_queries, perm_queries) = (counter.enc, counter.perm);

    let mut matches: Vec<(usize, usize)> = Vec::new();
    if g.is_abelian() {
        let mut table: HashMap<Element, Vec<usize>> = HashMap::new();
        for (i, (x, e)) in xs.iter().zip(&ex).enumerate() {
            table.entry(g.op(e, x)?).or_default().push(i);
        }
        for (j, (y, p)) in ys.iter().zip(&py).enumerate() {
            if let Some(is) = table.get(&g.op(p, y)?) {
                matches.extend(is.iter().map(|&i| (i, j)));
            }
        }
        matches.sort_unstable();
    } else {
        let ys_inv: Vec<Element> = ys.iter().map(|y| g.inv(y)).collect::<Result<_>>()?;
        let lhs_for = |i: usize, j: usize| g.op(&ex[i], &ys_inv[j]);
        for i in 0..xs.len() {
            let x_inv = g.inv(&xs[i])?;
            for j in 0..ys.len() {
                if lhs_for(i, j)? == g.op(&py[j], &x_inv)? {
                    matches.push((i, j));
                }
            }
        }
    }

    let mut key = None;
    let mut verified = 0;
    let mut tried: Vec<Element> = Vec::new();
    for &(i, j) in &matches {
        let k = g.op(&g.inv(&xs[i])?, &ys[j])?;
        if tried.contains(&k) {
            continue;
        }
        if verify_key(&mut counter, &k, cfg.verify_checks, coins)? {
            verified += 1;
            key.get_or_insert(k.clone());
        }
        tried.push(k);
    }
    Ok(SlideOutcome {
        key,
        candidates: matches.len(),
        verified,
        enc_queries,
        perm_queries,
        verify_enc_queries: counter.enc - enc_queries,
        verify_perm_queries: counter.perm - perm_queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::SeededCoins;
    use crate::em::EmInstance;
    use crate::feistel::{PairPermutation, RoundFunctionChain};

    #[test]
    fn f1_against_one_round() {
        let g = Group::zmod(64).unwrap();
        let mut c = SeededCoins::from_seed(1);
        let mut cipher = RoundFunctionChain::random(&g, 1, &mut c).unwrap();
        let v = distinguish_f1(&mut cipher, 50, &mut c).unwrap();
        assert_eq!(v.guess, Guess::Cipher);
        assert_eq!(v.success_rate(), 1.0);
        assert!(matches!(
            distinguish_f1(&mut cipher, 0, &mut c),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn f2_against_two_rounds_in_dihedral() {
        let g = Group::dihedral(5).unwrap();
        let mut c = SeededCoins::from_seed(2);
        let mut cipher = RoundFunctionChain::random(&g, 2, &mut c).unwrap();
        let probes = random_probes(&g, 20, &mut c).unwrap();
        let v = distinguish_f2(&mut cipher, &probes, &mut c).unwrap();
        assert_eq!((v.guess, v.hits), (Guess::Cipher, 20));
        assert!(matches!(
            distinguish_f2(&mut cipher, &[g.identity()], &mut c),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn f3_against_three_rounds_in_sym4() {
        let g = Group::sym(4).unwrap();
        let mut c = SeededCoins::from_seed(3);
        let mut cipher = RoundFunctionChain::random(&g, 3, &mut c).unwrap();
        let v = distinguish_f3_sprp(&mut cipher, 200, &mut c).unwrap();
        assert_eq!(v.hits, 200);
    }

    #[test]
    fn f3_against_random_permutation() {
        let g = Group::zmod(32).unwrap();
        let mut c = SeededCoins::from_seed(4);
        let mut perm = PairPermutation::new(&g, &mut c).unwrap();
        let v = distinguish_f3_sprp(&mut perm, 100, &mut c).unwrap();
        assert_eq!(v.guess, Guess::Random);
    }

    #[test]
    fn slide_full_cover_recovers_key() {
        let g = Group::zmod(16).unwrap();
        let mut c = SeededCoins::from_seed(5);
        let perm = crate::oracle::LazyPermutation::new(g.clone(), c.fork());
        let mut inst = EmInstance::new(g.clone(), g.from_int(5).unwrap(), perm).unwrap();
        let cfg = SlideConfig { d: 16, verify_checks: 8 };
        let out = slide_attack(&mut inst, &cfg, &mut c).unwrap();
        assert_eq!(out.key, Some(g.from_int(5).unwrap()));
        assert_eq!((out.enc_queries, out.perm_queries), (16, 16));
    }

    #[test]
    fn slide_on_nonabelian_group() {
        let g = Group::sym(4).unwrap();
        let mut c = SeededCoins::from_seed(6);
        let mut inst = EmInstance::generate(&g, &mut c).unwrap();
        let k = inst.key().clone();
        let cfg = SlideConfig { d: 24, verify_checks: 4 };
        let out = slide_attack(&mut inst, &cfg, &mut c).unwrap();
        assert_eq!(out.key, Some(k));
    }

    #[test]
    fn slide_config_errors() {
        let g = Group::zmod(9).unwrap();
        let mut c = SeededCoins::from_seed(7);
        let mut inst = EmInstance::generate(&g, &mut c).unwrap();
        for d in [0, 10] {
            let cfg = SlideConfig { d, verify_checks: 8 };
            assert!(matches!(
                slide_attack(&mut inst, &cfg, &mut c),
                Err(Error::Config(_))
            ));
        }
        assert_eq!(SlideConfig::for_group(&g).d, 3);
        assert_eq!(SlideConfig::for_group(&Group::zmod(10).unwrap()).d, 4);
    }

    #[test]
    fn verify_key_contract() {
        let g = Group::zmod(64).unwrap();
        let mut c = SeededCoins::from_seed(8);
        let mut inst = EmInstance::generate(&g, &mut c).unwrap();
        let k = inst.key().clone();
        assert!(verify_key(&mut inst, &k, 8, &mut c).unwrap());
        let wrong = g.op(&k, &g.from_int(1).unwrap()).unwrap();
        assert!(!verify_key(&mut inst, &wrong, 8, &mut c).unwrap());
        assert!(matches!(
            verify_key(&mut inst, &k, 0, &mut c),
            Err(Error::Precondition(_))
        ));
    }
}
