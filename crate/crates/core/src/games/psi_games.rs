//! Oracle worlds for the Ψ construction and the bad events between them.
//!
//! Each world exposes a cipher on `G²` in both directions together with
//! the round-function oracles `f` and `g`:
//!
//! * `Psi`: the keyed cipher built on `f` and `g`.
//! * `PsiTilde`: the same cipher, but the `g` oracle answers from an
//!   independent random function `h`.
//! * `RTilde`: cipher answers are fresh uniform pairs, except that a
//!   repeated input (or output, backwards) returns the earlier partner.
//! * `Random`: a uniformly random permutation of `G²`.

use rayon::prelude::*;

use super::transcript::{detect_bad, detect_badg, CipherPair, Transcript};
use super::{charge, GameFlag, QueryBudget};
use crate::coins::{Coins, SeededCoins};
use crate::error::{Error, Result};
use crate::exhaustive::{exact_distribution, Distribution, Outcome};
use crate::feistel::{FeistelPair, PairCipher, PairPermutation, PsiInstance, RoundFunction};
use crate::group::{Element, Group};
use crate::oracle::{Direction, LazyFunction};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PsiWorld {
    Psi,
    PsiTilde,
    RTilde,
    Random,
}

/// Cipher access on `G²` plus the two round-function oracles.
pub trait PsiOracles: PairCipher {
    fn f(&mut self, x: &Element) -> Result<Element>;
    fn g(&mut self, x: &Element) -> Result<Element>;
}

impl<T: PsiOracles + ?Sized> PsiOracles for &mut T {
    fn f(&mut self, x: &Element) -> Result<Element> {
        (**self).f(x)
    }
    fn g(&mut self, x: &Element) -> Result<Element> {
        (**self).g(x)
    }
}

impl<T: PsiOracles + ?Sized> PsiOracles for Box<T> {
    fn f(&mut self, x: &Element) -> Result<Element> {
        (**self).f(x)
    }
    fn g(&mut self, x: &Element) -> Result<Element> {
        (**self).g(x)
    }
}

enum State {
    Keyed {
        inst: PsiInstance,
        h: Option<LazyFunction>,
    },
    RTilde {
        f: LazyFunction,
        g: LazyFunction,
        coins: Box<dyn Coins>,
        history: Vec<(FeistelPair, FeistelPair)>,
    },
    Random {
        perm: PairPermutation,
        f: LazyFunction,
        g: LazyFunction,
    },
}

pub struct PsiWorldOracles {
    world: PsiWorld,
    group: Group,
    state: State,
}

impl std::fmt::Debug for PsiWorldOracles {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PsiWorldOracles")
            .field("world", &self.world)
            .field("group", &self.group)
            .finish()
    }
}

impl PsiWorldOracles {
    /// A fresh world. Keyed worlds draw `k^L`, `k^R` first.
    pub fn new(world: PsiWorld, group: &Group, coins: &mut dyn Coins) -> Result<Self> {
        let state = match world {
            PsiWorld::Psi | PsiWorld::PsiTilde => {
                let inst = PsiInstance::generate(group, coins)?;
                Self::keyed_state(world, group, inst, coins)
            }
            PsiWorld::RTilde => State::RTilde {
                f: LazyFunction::new(group.clone(), coins.fork()),
                g: LazyFunction::new(group.clone(), coins.fork()),
                coins: coins.fork(),
                history: Vec::new(),
            },
            PsiWorld::Random => State::Random {
                perm: PairPermutation::new(group, coins)?,
                f: LazyFunction::new(group.clone(), coins.fork()),
                g: LazyFunction::new(group.clone(), coins.fork()),
            },
        };
        Ok(PsiWorldOracles {
            world,
            group: group.clone(),
            state,
        })
    }

    /// `Psi` or `PsiTilde` with a chosen key and fresh random functions.
    pub fn with_key(
        world: PsiWorld,
        group: &Group,
        key: &FeistelPair,
        coins: &mut dyn Coins,
    ) -> Result<Self> {
        if !matches!(world, PsiWorld::Psi | PsiWorld::PsiTilde) {
            return Err(Error::Precondition(format!("{world:?} has no key")));
        }
        let f = RoundFunction::random(group, coins);
        let g = RoundFunction::random(group, coins);
        let inst = PsiInstance::new(group, key.left.clone(), key.right.clone(), f, g)?;
        Ok(PsiWorldOracles {
            world,
            group: group.clone(),
            state: Self::keyed_state(world, group, inst, coins),
        })
    }

    fn keyed_state(world: PsiWorld, group: &Group, inst: PsiInstance, coins: &mut dyn Coins) -> State {
        let h = (world == PsiWorld::PsiTilde).then(|| LazyFunction::new(group.clone(), coins.fork()));
        State::Keyed { inst, h }
    }

    pub fn world(&self) -> PsiWorld {
        self.world
    }

    pub fn key(&self) -> Option<&FeistelPair> {
        match &self.state {
            State::Keyed { inst, .. } => Some(inst.key()),
            _ => None,
        }
    }

    /// The function used by the cipher's outer rounds; in `PsiTilde` this
    /// is not the function behind the `g` oracle.
    pub fn cipher_g(&mut self, x: &Element) -> Result<Element> {
        match &mut self.state {
            State::Keyed { inst, .. } => inst.g(x),
            State::RTilde { g, .. } | State::Random { g, .. } => g.query(x),
        }
    }

    /// The world's bad event on a finished transcript: `BadG(k)` for
    /// `Psi`, `Bad(k, g)` for `PsiTilde`, inconsistency for `RTilde`,
    /// never for `Random`.
    pub fn flag_for(&mut self, tr: &Transcript) -> Result<GameFlag> {
        let group = self.group.clone();
        let bad = match self.world {
            PsiWorld::Psi => detect_badg(&group, tr, self.key().expect("keyed"))?,
            PsiWorld::PsiTilde => {
                let key = self.key().expect("keyed").clone();
                detect_bad(&group, tr, &key, &mut |x| self.cipher_g(x))?
            }
            PsiWorld::RTilde => !tr.is_consistent(),
            PsiWorld::Random => false,
        };
        let mut flag = GameFlag::default();
        if bad {
            flag.raise();
        }
        Ok(flag)
    }
}

impl PairCipher for PsiWorldOracles {
    fn group(&self) -> &Group {
        &self.group
    }

    fn apply(&mut self, direction: Direction, p: &FeistelPair) -> Result<FeistelPair> {
        p.validate(&self.group)?;
        match &mut self.state {
            State::Keyed { inst, .. } => inst.apply(direction, p),
            State::Random { perm, .. } => perm.apply(direction, p),
            State::RTilde { coins, history, .. } => {
                let known = history.iter().find_map(|(x, y)| match direction {
                    Direction::Forward => (x == p).then(|| y.clone()),
                    Direction::Backward => (y == p).then(|| x.clone()),
                });
                let out = match known {
                    Some(v) => v,
                    None => FeistelPair::new(
                        self.group.sample(coins.as_mut())?,
                        self.group.sample(coins.as_mut())?,
                    ),
                };
                let pair = match direction {
                    Direction::Forward => (p.clone(), out.clone()),
                    Direction::Backward => (out.clone(), p.clone()),
                };
                history.push(pair);
                Ok(out)
            }
        }
    }
}

impl PsiOracles for PsiWorldOracles {
    fn f(&mut self, x: &Element) -> Result<Element> {
        match &mut self.state {
            State::Keyed { inst, .. } => inst.f(x),
            State::RTilde { f, .. } | State::Random { f, .. } => f.query(x),
        }
    }

    fn g(&mut self, x: &Element) -> Result<Element> {
        match &mut self.state {
            State::Keyed { h: Some(h), .. } => h.query(x),
            State::Keyed { inst, h: None } => inst.g(x),
            State::RTilde { g, .. } | State::Random { g, .. } => g.query(x),
        }
    }
}

/// Records the transcript of everything passing through, charges the
/// budget and rejects queries whose answer is already determined.
pub struct PsiRecorder<O> {
    inner: O,
    budget: QueryBudget,
    used: (u64, u64, u64),
    transcript: Transcript,
}

impl<O: PsiOracles> PsiRecorder<O> {
    pub fn new(inner: O, budget: QueryBudget) -> Self {
        PsiRecorder {
            inner,
            budget,
            used: (0, 0, 0),
            transcript: Transcript::default(),
        }
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn inner_mut(&mut self) -> &mut O {
        &mut self.inner
    }

    pub fn into_parts(self) -> (O, Transcript) {
        (self.inner, self.transcript)
    }
}

fn repeat(what: &str) -> Error {
    Error::ProtocolViolation(format!("{what} query with a known answer"))
}

impl<O: PsiOracles> PairCipher for PsiRecorder<O> {
    fn group(&self) -> &Group {
        self.inner.group()
    }

    fn apply(&mut self, direction: Direction, p: &FeistelPair) -> Result<FeistelPair> {
        let known = self.transcript.cipher.iter().any(|c| match direction {
            Direction::Forward => c.x == *p,
            Direction::Backward => c.y == *p,
        });
        if known {
            return Err(repeat("cipher"));
        }
        charge(&mut self.used.0, self.budget.qc, "cipher")?;
        let out = self.inner.apply(direction, p)?;
        let (x, y) = match direction {
            Direction::Forward => (p.clone(), out.clone()),
            Direction::Backward => (out.clone(), p.clone()),
        };
        self.transcript.cipher.push(CipherPair { direction, x, y });
        Ok(out)
    }
}

impl<O: PsiOracles> PsiOracles for PsiRecorder<O> {
    fn f(&mut self, x: &Element) -> Result<Element> {
        if self.transcript.f_pairs.iter().any(|(a, _)| a == x) {
            return Err(repeat("f"));
        }
        charge(&mut self.used.1, self.budget.qf, "f")?;
        let y = self.inner.f(x)?;
        self.transcript.f_pairs.push((x.clone(), y.clone()));
        Ok(y)
    }

    fn g(&mut self, x: &Element) -> Result<Element> {
        if self.transcript.g_pairs.iter().any(|(a, _)| a == x) {
            return Err(repeat("g"));
        }
        charge(&mut self.used.2, self.budget.qg, "g")?;
        let y = self.inner.g(x)?;
        self.transcript.g_pairs.push((x.clone(), y.clone()));
        Ok(y)
    }
}

#[derive(Clone, Debug)]
pub struct PsiGameResult {
    pub output: bool,
    pub transcript: Transcript,
    pub flag: GameFlag,
}

/// Plays `adversary` against a fresh `world` and reports its bit, the
/// transcript and the world's bad event.
pub fn run_psi_game(
    world: PsiWorld,
    adversary: impl FnOnce(&mut dyn PsiOracles) -> Result<bool>,
    g: &Group,
    budget: QueryBudget,
    coins: &mut dyn Coins,
) -> Result<PsiGameResult> {
    let oracles = PsiWorldOracles::new(world, g, coins)?;
    let mut rec = PsiRecorder::new(oracles, budget);
    let output = adversary(&mut rec)?;
    let (mut oracles, transcript) = rec.into_parts();
    let flag = oracles.flag_for(&transcript)?;
    Ok(PsiGameResult { output, transcript, flag })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PsiQuery {
    Encrypt(FeistelPair),
    Decrypt(FeistelPair),
    F(Element),
    G(Element),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PsiScriptRun {
    pub transcript: Transcript,
    pub violation: bool,
}

impl Outcome for PsiScriptRun {
    fn mark_bad(&mut self) {}
}

/// Runs a fixed script; a repeated query ends the run early.
pub fn run_psi_script(oracles: &mut dyn PsiOracles, script: &[PsiQuery]) -> Result<PsiScriptRun> {
    let mut rec = PsiRecorder::new(oracles, QueryBudget::unlimited());
    let mut violation = false;
    for q in script {
        let r = match q {
            PsiQuery::Encrypt(x) => rec.apply(Direction::Forward, x).map(drop),
            PsiQuery::Decrypt(y) => rec.apply(Direction::Backward, y).map(drop),
            PsiQuery::F(x) => rec.f(x).map(drop),
            PsiQuery::G(x) => rec.g(x).map(drop),
        };
        match r {
            Ok(()) => {}
            Err(Error::ProtocolViolation(_)) => {
                violation = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(PsiScriptRun {
        transcript: rec.into_parts().1,
        violation,
    })
}

/// Exact transcript distribution of a script against `Psi` or `PsiTilde`
/// with the key held fixed.
pub fn fixed_key_distribution(
    world: PsiWorld,
    g: &Group,
    key: &FeistelPair,
    script: &[PsiQuery],
) -> Result<Distribution<PsiScriptRun>> {
    exact_distribution(|coins: &mut dyn Coins| {
        let mut oracles = PsiWorldOracles::with_key(world, g, key, coins)?;
        run_psi_script(&mut oracles, script)
    })
}

/// For a fixed key, every transcript outside `BadG(k)` is exactly as
/// likely under `Psi` as under `PsiTilde`. Checked by full enumeration.
pub fn badg_free_agreement(g: &Group, key: &FeistelPair, script: &[PsiQuery]) -> Result<bool> {
    let psi = fixed_key_distribution(PsiWorld::Psi, g, key, script)?;
    let tilde = fixed_key_distribution(PsiWorld::PsiTilde, g, key, script)?;
    for run in psi.keys().chain(tilde.keys()) {
        if detect_badg(g, &run.transcript, key)? {
            continue;
        }
        if psi.get(run) != tilde.get(run) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A transcript with distinct cipher inputs, distinct cipher outputs and
/// distinct `f` and `g` inputs; every other value is uniform.
pub fn random_transcript(
    g: &Group,
    qc: u64,
    qf: u64,
    qg: u64,
    coins: &mut dyn Coins,
) -> Result<Transcript> {
    let square = g.square()?;
    let pairs = |coins: &mut dyn Coins| -> Result<Vec<FeistelPair>> {
        square
            .sample_distinct(qc as u128, coins)?
            .iter()
            .map(|v| square.unpair(v).map(|(l, r)| FeistelPair::new(l, r)))
            .collect()
    };
    let xs = pairs(coins)?;
    let ys = pairs(coins)?;
    let mut cipher = Vec::with_capacity(xs.len());
    for (x, y) in xs.into_iter().zip(ys) {
        let direction = if coins.below(2)? == 0 {
            Direction::Forward
        } else {
            Direction::Backward
        };
        cipher.push(CipherPair { direction, x, y });
    }
    let table = |n: u64, coins: &mut dyn Coins| -> Result<Vec<(Element, Element)>> {
        g.sample_distinct(n as u128, coins)?
            .into_iter()
            .map(|x| Ok((x, g.sample(coins)?)))
            .collect()
    };
    let f_pairs = table(qf, coins)?;
    let g_pairs = table(qg, coins)?;
    Ok(Transcript { cipher, f_pairs, g_pairs })
}

/// A Monte Carlo frequency with its 99% Clopper–Pearson halfwidth.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub hits: u64,
    pub samples: u64,
    pub rate: f64,
    pub ci_halfwidth: f64,
}

/// Runs `trial` on `samples` independent coin streams in parallel.
pub fn estimate_rate(
    samples: u64,
    seed: u64,
    trial: impl Fn(&mut dyn Coins) -> Result<bool> + Sync,
) -> Result<RateEstimate> {
    if samples == 0 {
        return Err(Error::Config("samples must be at least 1".into()));
    }
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| trial(&mut SeededCoins::for_trial(seed, i)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(RateEstimate {
        hits,
        samples,
        rate: hits as f64 / samples as f64,
        ci_halfwidth: stats::halfwidth(hits, samples, stats::CONFIDENCE)?,
    })
}

/// One draw of `BadG(k)`: a fresh random transcript and a uniform key.
pub fn badg_trial(g: &Group, qc: u64, qg: u64, coins: &mut dyn Coins) -> Result<bool> {
    let tr = random_transcript(g, qc, 0, qg, coins)?;
    let key = FeistelPair::new(g.sample(coins)?, g.sample(coins)?);
    detect_badg(g, &tr, &key)
}

/// One draw of `Bad(k, g)`: a fresh random transcript, a uniform key and a
/// random `g`.
pub fn bad_trial(g: &Group, qc: u64, qf: u64, coins: &mut dyn Coins) -> Result<bool> {
    let tr = random_transcript(g, qc, qf, 0, coins)?;
    let key = FeistelPair::new(g.sample(coins)?, g.sample(coins)?);
    let mut func = LazyFunction::new(g.clone(), coins.fork());
    detect_bad(g, &tr, &key, &mut |x| func.query(x))
}

/// Frequency of `BadG(k)` over `samples` independent draws.
pub fn badg_rate(g: &Group, qc: u64, qg: u64, samples: u64, seed: u64) -> Result<RateEstimate> {
    estimate_rate(samples, seed, |coins| badg_trial(g, qc, qg, coins))
}

/// Frequency of `Bad(k, g)` over `samples` independent draws.
pub fn bad_rate(g: &Group, qc: u64, qf: u64, samples: u64, seed: u64) -> Result<RateEstimate> {
    estimate_rate(samples, seed, |coins| bad_trial(g, qc, qf, coins))
}

/// Frequency with which `RTilde` produces an inconsistent transcript for
/// an adversary making `qc` forward queries at distinct random inputs.
pub fn inconsistency_rate(g: &Group, qc: u64, samples: u64, seed: u64) -> Result<RateEstimate> {
    let square = g.square()?;
    estimate_rate(samples, seed, |coins| {
        let inputs = square.sample_distinct(qc as u128, coins)?;
        let mut world_coins = coins.fork();
        let res = run_psi_game(
            PsiWorld::RTilde,
            |o| {
                for v in &inputs {
                    let (l, r) = square.unpair(v)?;
                    o.apply(Direction::Forward, &FeistelPair::new(l, r))?;
                }
                Ok(false)
            },
            g,
            QueryBudget::psi(qc, 0, 0),
            world_coins.as_mut(),
        )?;
        Ok(res.flag.is_bad())
    })
}
