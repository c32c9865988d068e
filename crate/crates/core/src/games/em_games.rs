//! The four oracle games used to bound the Even-Mansour advantage.
//!
//! All games keep the adversary's view as two partial bijections: `S`
//! for cipher pairs `(m, c)` and `T` for public-permutation pairs
//! `(x, y)`. `S¹`/`S²` and `T¹`/`T²` are their domains and ranges.
//!
//! * `R`: every answer is a fresh uniform value outside the used range;
//!   the flag notes when the key becomes bad.
//! * `X`: like `R`, but answers are kept consistent with the real scheme.
//!   A known permutation value is reused, and a draw that would clash is
//!   thrown away and redrawn.
//! * `X′`: the real scheme with a lazily sampled permutation.
//! * `R′`: like `R` without a key; the key is drawn after the last query
//!   and the flag is raised if it is bad for the final tables.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{charge, GameFlag, QueryBudget};
use crate::coins::Coins;
use crate::em::{EmInstance, EmOracles};
use crate::error::{Error, Result};
use crate::exhaustive::{exact_distribution, marginal, probability, Outcome};
use crate::group::{Element, Group};

/// Redraws allowed in one Game X answer before giving up.
pub const REDRAW_CAP: u64 = 1 << 20;

/// Largest group accepted by [`exhaustive_game_equivalence`].
pub const EQUIVALENCE_MAX_ORDER: u128 = 5;
/// Longest script accepted by [`exhaustive_game_equivalence`].
pub const EQUIVALENCE_MAX_SCRIPT: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EmGame {
    R,
    X,
    XPrime,
    RPrime,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EmQuery {
    Encrypt(Element),
    Decrypt(Element),
    Permute(Element),
    PermuteInverse(Element),
}

/// Oracle backend for one run of an [`EmGame`].
pub struct EmGameOracles {
    variant: EmGame,
    group: Group,
    key: Option<Element>,
    real: Option<EmInstance>,
    coins: Box<dyn Coins>,
    e: HashMap<Element, Element>,
    d: HashMap<Element, Element>,
    p: HashMap<Element, Element>,
    pinv: HashMap<Element, Element>,
    flag: GameFlag,
    budget: QueryBudget,
    s_used: u64,
    t_used: u64,
    skip_redefine: bool,
}

impl std::fmt::Debug for EmGameOracles {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EmGameOracles")
            .field("variant", &self.variant)
            .field("group", &self.group)
            .field("s_used", &self.s_used)
            .field("t_used", &self.t_used)
            .field("flag", &self.flag)
            .finish()
    }
}

impl EmGameOracles {
    /// Sets up a game. Every variant except `R′` draws its key here, before
    /// any other choice.
    pub fn new(
        variant: EmGame,
        group: &Group,
        budget: QueryBudget,
        mut coins: Box<dyn Coins>,
    ) -> Result<Self> {
        let (key, real) = match variant {
            EmGame::R | EmGame::X => (Some(group.sample(coins.as_mut())?), None),
            EmGame::XPrime => {
                let inst = EmInstance::generate(group, coins.as_mut())?;
                (Some(inst.key().clone()), Some(inst))
            }
            EmGame::RPrime => (None, None),
        };
        Ok(EmGameOracles {
            variant,
            group: group.clone(),
            key,
            real,
            coins,
            e: HashMap::new(),
            d: HashMap::new(),
            p: HashMap::new(),
            pinv: HashMap::new(),
            flag: GameFlag::default(),
            budget,
            s_used: 0,
            t_used: 0,
            skip_redefine: false,
        })
    }

    /// Game X with the reuse step removed from every oracle, so known
    /// permutation values are ignored. Only useful to show that the
    /// equivalence check can fail.
    pub fn corrupted_x(group: &Group, budget: QueryBudget, coins: Box<dyn Coins>) -> Result<Self> {
        let mut game = EmGameOracles::new(EmGame::X, group, budget, coins)?;
        game.skip_redefine = true;
        Ok(game)
    }

    pub fn variant(&self) -> EmGame {
        self.variant
    }

    /// `None` in `R′` until [`EmGameOracles::finish`].
    pub fn key(&self) -> Option<&Element> {
        self.key.as_ref()
    }

    pub fn flag(&self) -> GameFlag {
        self.flag
    }

    /// `S` as `(m, c)` pairs, sorted.
    pub fn cipher_pairs(&self) -> Vec<(Element, Element)> {
        sorted_pairs(&self.e)
    }

    /// `T` as `(x, y)` pairs, sorted.
    pub fn perm_pairs(&self) -> Vec<(Element, Element)> {
        sorted_pairs(&self.p)
    }

    pub fn answer(&mut self, q: &EmQuery) -> Result<Element> {
        self.guard(q)?;
        let g = self.group.clone();
        let out = match self.variant {
            EmGame::XPrime => {
                let inst = self.real.as_mut().expect("X′ holds an instance");
                match q {
                    EmQuery::Encrypt(m) => inst.encrypt(m)?,
                    EmQuery::Decrypt(c) => inst.decrypt(c)?,
                    EmQuery::Permute(x) => inst.perm_mut().forward(x)?,
                    EmQuery::PermuteInverse(y) => inst.perm_mut().backward(y)?,
                }
            }
            EmGame::RPrime => match q {
                EmQuery::Encrypt(_) => draw_outside(&g, self.coins.as_mut(), &self.d)?,
                EmQuery::Decrypt(_) => draw_outside(&g, self.coins.as_mut(), &self.e)?,
                EmQuery::Permute(_) => draw_outside(&g, self.coins.as_mut(), &self.pinv)?,
                EmQuery::PermuteInverse(_) => draw_outside(&g, self.coins.as_mut(), &self.p)?,
            },
            EmGame::R => self.answer_r(&g, q)?,
            EmGame::X => self.answer_x(&g, q)?,
        };
        self.record(q, out.clone());
        Ok(out)
    }

    fn guard(&mut self, q: &EmQuery) -> Result<()> {
        let (v, seen) = match q {
            EmQuery::Encrypt(m) => (m, &self.e),
            EmQuery::Decrypt(c) => (c, &self.d),
            EmQuery::Permute(x) => (x, &self.p),
            EmQuery::PermuteInverse(y) => (y, &self.pinv),
        };
        self.group.validate(v)?;
        if seen.contains_key(v) {
            return Err(Error::ProtocolViolation(format!(
                "{q:?} repeats a known pair"
            )));
        }
        match q {
            EmQuery::Encrypt(_) | EmQuery::Decrypt(_) => {
                charge(&mut self.s_used, self.budget.s, "cipher")
            }
            _ => charge(&mut self.t_used, self.budget.t, "permutation"),
        }
    }

    fn record(&mut self, q: &EmQuery, out: Element) {
        let (map, inv, a, b) = match q {
            EmQuery::Encrypt(m) => (&mut self.e, &mut self.d, m.clone(), out),
            EmQuery::Decrypt(c) => (&mut self.e, &mut self.d, out, c.clone()),
            EmQuery::Permute(x) => (&mut self.p, &mut self.pinv, x.clone(), out),
            EmQuery::PermuteInverse(y) => (&mut self.p, &mut self.pinv, out, y.clone()),
        };
        map.insert(a.clone(), b.clone());
        inv.insert(b, a);
    }

    fn keys(&self, g: &Group) -> Result<(Element, Element)> {
        let k = self.key.clone().expect("keyed variant");
        let k_inv = g.inv(&k)?;
        Ok((k, k_inv))
    }

    fn answer_r(&mut self, g: &Group, q: &EmQuery) -> Result<Element> {
        let (k, k_inv) = self.keys(g)?;
        let coins = self.coins.as_mut();
        let (out, bad) = match q {
            EmQuery::Encrypt(m) => {
                let c = draw_outside(g, coins, &self.d)?;
                let bad = self.p.contains_key(&g.op(m, &k)?)
                    || self.pinv.contains_key(&g.op(&c, &k_inv)?);
                (c, bad)
            }
            EmQuery::Decrypt(c) => {
                let m = draw_outside(g, coins, &self.e)?;
                let bad = self.pinv.contains_key(&g.op(c, &k_inv)?)
                    || self.p.contains_key(&g.op(&m, &k)?);
                (m, bad)
            }
            EmQuery::Permute(x) => {
                let y = draw_outside(g, coins, &self.pinv)?;
                let bad = self.e.contains_key(&g.op(x, &k_inv)?)
                    || self.d.contains_key(&g.op(&y, &k)?);
                (y, bad)
            }
            EmQuery::PermuteInverse(y) => {
                let x = draw_outside(g, coins, &self.p)?;
                let bad = self.d.contains_key(&g.op(y, &k)?)
                    || self.e.contains_key(&g.op(&x, &k_inv)?);
                (x, bad)
            }
        };
        if bad {
            self.flag.raise();
        }
        Ok(out)
    }

    fn answer_x(&mut self, g: &Group, q: &EmQuery) -> Result<Element> {
        let (k, k_inv) = self.keys(g)?;
        // (table to draw outside of, known value to reuse, table that
        // rejects a draw, multiplier applied to a draw before that check,
        // multiplier applied to a reused value)
        let (avoid, reuse, reject, draw_mul, reuse_mul) = match q {
            EmQuery::Encrypt(m) => (&self.d, self.p.get(&g.op(m, &k)?), &self.pinv, &k_inv, &k),
            EmQuery::Decrypt(c) => (&self.e, self.pinv.get(&g.op(c, &k_inv)?), &self.p, &k, &k_inv),
            EmQuery::Permute(x) => (&self.pinv, self.e.get(&g.op(x, &k_inv)?), &self.d, &k, &k_inv),
            EmQuery::PermuteInverse(y) => (&self.p, self.d.get(&g.op(y, &k)?), &self.e, &k_inv, &k),
        };
        let reuse = if self.skip_redefine { None } else { reuse.cloned() };
        let mut redraws = 0u64;
        loop {
            let v = draw_outside(g, self.coins.as_mut(), avoid)?;
            if let Some(known) = &reuse {
                self.flag.raise();
                return g.op(known, reuse_mul);
            }
            if reject.contains_key(&g.op(&v, draw_mul)?) {
                self.flag.raise();
                self.coins.discard(true)?;
                redraws += 1;
                if redraws >= REDRAW_CAP {
                    return Err(Error::Precondition(format!(
                        "Game X answer still clashing after {REDRAW_CAP} redraws"
                    )));
                }
                continue;
            }
            return Ok(v);
        }
    }

    /// Ends the run. `R′` draws its key here and raises the flag if the
    /// key is bad for the final tables.
    pub fn finish(mut self) -> Result<GameFlag> {
        if self.variant == EmGame::RPrime {
            let (s, t) = (self.cipher_pairs(), self.perm_pairs());
            if rprime_flag(&self.group, &s, &t, self.coins.as_mut())? {
                self.flag.raise();
            }
        }
        Ok(self.flag)
    }
}

impl EmOracles for EmGameOracles {
    fn group(&self) -> &Group {
        &self.group
    }
    fn encrypt(&mut self, m: &Element) -> Result<Element> {
        self.answer(&EmQuery::Encrypt(m.clone()))
    }
    fn decrypt(&mut self, c: &Element) -> Result<Element> {
        self.answer(&EmQuery::Decrypt(c.clone()))
    }
    fn permute(&mut self, x: &Element) -> Result<Element> {
        self.answer(&EmQuery::Permute(x.clone()))
    }
    fn permute_inverse(&mut self, y: &Element) -> Result<Element> {
        self.answer(&EmQuery::PermuteInverse(y.clone()))
    }
}

fn sorted_pairs(map: &HashMap<Element, Element>) -> Vec<(Element, Element)> {
    let mut v: Vec<_> = map.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
    v.sort();
    v
}

/// Uniform element outside the keys of `used`.
fn draw_outside(
    g: &Group,
    coins: &mut dyn Coins,
    used: &HashMap<Element, Element>,
) -> Result<Element> {
    if used.len() as u128 >= g.order() {
        return Err(Error::Precondition("no unused value left".into()));
    }
    loop {
        let v = g.sample(coins)?;
        if !used.contains_key(&v) {
            return Ok(v);
        }
        coins.discard(false)?;
    }
}

/// Plays one game with `adversary` and returns its bit and the final flag.
/// A repeated query aborts with a protocol-violation error.
pub fn run_game(
    variant: EmGame,
    adversary: impl FnOnce(&mut dyn EmOracles) -> Result<bool>,
    g: &Group,
    budget: QueryBudget,
    coins: Box<dyn Coins>,
) -> Result<(bool, GameFlag)> {
    let mut game = EmGameOracles::new(variant, g, budget, coins)?;
    let bit = adversary(&mut game)?;
    Ok((bit, game.finish()?))
}

/// `k` is bad for `S` and `T` when `m·k = x` or `c·k⁻¹ = y` for some
/// `(m, c) ∈ S` and `(x, y) ∈ T`.
pub fn is_bad_key(
    g: &Group,
    s: &[(Element, Element)],
    t: &[(Element, Element)],
    k: &Element,
) -> Result<bool> {
    let k_inv = g.inv(k)?;
    for (m, c) in s {
        let mk = g.op(m, k)?;
        let ck = g.op(c, &k_inv)?;
        if t.iter().any(|(x, y)| *x == mk || *y == ck) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Number of bad keys, by checking every element of `g`.
pub fn count_bad_keys(
    g: &Group,
    s: &[(Element, Element)],
    t: &[(Element, Element)],
) -> Result<u128> {
    let mut n = 0;
    for k in g.elements()? {
        n += is_bad_key(g, s, t, &k)? as u128;
    }
    Ok(n)
}

/// The post-hoc step of `R′`: a uniform key, tested against the tables.
pub fn rprime_flag(
    g: &Group,
    s: &[(Element, Element)],
    t: &[(Element, Element)],
    coins: &mut dyn Coins,
) -> Result<bool> {
    let k = g.sample(coins)?;
    is_bad_key(g, s, t, &k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EmPairing {
    /// Answer distributions of X and X′.
    XXPrime,
    /// Flag probabilities of R and R′.
    RRPrime,
    /// X with the reuse step removed against X′; expected to differ.
    CorruptedXXPrime,
}

/// What a scripted run shows: answers in order, whether the script broke
/// the no-repeat rule (the run stops there), and the flag.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScriptRun {
    pub answers: Vec<Element>,
    pub violation: bool,
    pub bad: bool,
}

impl Outcome for ScriptRun {
    fn mark_bad(&mut self) {
        self.bad = true;
    }
}

/// Runs a fixed query script against a fresh game.
pub fn run_script(
    game: EmGameOracles,
    script: &[EmQuery],
) -> Result<ScriptRun> {
    let mut game = game;
    let mut answers = Vec::with_capacity(script.len());
    let mut violation = false;
    for q in script {
        match game.answer(q) {
            Ok(a) => answers.push(a),
            Err(Error::ProtocolViolation(_)) => {
                violation = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let bad = game.finish()?.is_bad();
    Ok(ScriptRun { answers, violation, bad })
}

/// Exact distribution of a scripted run of `variant`.
pub fn script_distribution(
    variant: EmGame,
    corrupted: bool,
    g: &Group,
    script: &[EmQuery],
) -> Result<crate::exhaustive::Distribution<ScriptRun>> {
    exact_distribution(|coins: &mut dyn Coins| {
        let boxed = coins.fork();
        let game = if corrupted {
            EmGameOracles::corrupted_x(g, QueryBudget::unlimited(), boxed)?
        } else {
            EmGameOracles::new(variant, g, QueryBudget::unlimited(), boxed)?
        };
        run_script(game, script)
    })
}

/// Enumerates every random choice of both games of `pairing` on `script`
/// and compares answer distributions (X pairings) or flag probabilities
/// (R pairing) exactly.
pub fn exhaustive_game_equivalence(
    pairing: EmPairing,
    g: &Group,
    script: &[EmQuery],
) -> Result<bool> {
    if g.order() > EQUIVALENCE_MAX_ORDER {
        return Err(Error::Capacity {
            what: "group order for exhaustive game equivalence".into(),
            size: g.order(),
            limit: EQUIVALENCE_MAX_ORDER,
        });
    }
    if script.len() > EQUIVALENCE_MAX_SCRIPT {
        return Err(Error::Capacity {
            what: "script length for exhaustive game equivalence".into(),
            size: script.len() as u128,
            limit: EQUIVALENCE_MAX_SCRIPT as u128,
        });
    }
    let view = |r: &ScriptRun| (r.answers.clone(), r.violation);
    match pairing {
        EmPairing::XXPrime | EmPairing::CorruptedXXPrime => {
            let corrupted = pairing == EmPairing::CorruptedXXPrime;
            let x = script_distribution(EmGame::X, corrupted, g, script)?;
            let xp = script_distribution(EmGame::XPrime, false, g, script)?;
            Ok(marginal(&x, view) == marginal(&xp, view))
        }
        EmPairing::RRPrime => {
            let r = script_distribution(EmGame::R, false, g, script)?;
            let rp = script_distribution(EmGame::RPrime, false, g, script)?;
            Ok(probability(&r, |o| o.bad) == probability(&rp, |o| o.bad))
        }
    }
}

/// Exact fraction of bad keys, `count_bad_keys / |G|`.
pub fn bad_key_fraction(
    g: &Group,
    s: &[(Element, Element)],
    t: &[(Element, Element)],
) -> Result<BigRational> {
    Ok(BigRational::new(
        BigInt::from(count_bad_keys(g, s, t)?),
        BigInt::from(g.order()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::SeededCoins;

    fn z(n: u64) -> Group {
        Group::zmod(n).unwrap()
    }

    fn el(g: &Group, v: u128) -> Element {
        g.from_int(v).unwrap()
    }

    fn seeded(seed: u64) -> Box<dyn Coins> {
        Box::new(SeededCoins::from_seed(seed))
    }

    #[test]
    fn game_r_without_queries_stays_good() {
        let g = z(64);
        for seed in 0..20 {
            let (bit, flag) =
                run_game(EmGame::R, |_| Ok(true), &g, QueryBudget::em(0, 0), seeded(seed)).unwrap();
            assert!(bit);
            assert!(!flag.is_bad());
        }
    }

    #[test]
    fn xprime_matches_direct_evaluation() {
        let g = z(97);
        let script = [
            EmQuery::Encrypt(el(&g, 3)),
            EmQuery::Permute(el(&g, 10)),
            EmQuery::Decrypt(el(&g, 40)),
            EmQuery::PermuteInverse(el(&g, 7)),
        ];
        for seed in 0..10 {
            let game = EmGameOracles::new(EmGame::XPrime, &g, QueryBudget::unlimited(), seeded(seed))
                .unwrap();
            let run = run_script(game, &script).unwrap();
            let mut direct = EmInstance::generate(&g, &mut SeededCoins::from_seed(seed)).unwrap();
            let expected = vec![
                direct.encrypt(&el(&g, 3)).unwrap(),
                direct.perm_mut().forward(&el(&g, 10)).unwrap(),
                direct.decrypt(&el(&g, 40)).unwrap(),
                direct.perm_mut().backward(&el(&g, 7)).unwrap(),
            ];
            // a script can collide with an earlier answer and stop early
            assert_eq!(run.answers[..], expected[..run.answers.len()]);
            assert_eq!(run.violation, run.answers.len() < expected.len());
        }
    }

    #[test]
    fn repeats_and_budget_are_enforced() {
        let g = z(16);
        let mut game =
            EmGameOracles::new(EmGame::R, &g, QueryBudget::em(2, 1), seeded(1)).unwrap();
        let c = game.encrypt(&el(&g, 1)).unwrap();
        assert!(matches!(game.decrypt(&c), Err(Error::ProtocolViolation(_))));
        assert!(matches!(game.encrypt(&el(&g, 1)), Err(Error::ProtocolViolation(_))));
        game.encrypt(&el(&g, 2)).unwrap();
        assert!(matches!(game.encrypt(&el(&g, 3)), Err(Error::Budget(_))));
        game.permute(&el(&g, 0)).unwrap();
        assert!(matches!(game.permute_inverse(&el(&g, 0)), Err(Error::Budget(_))));
    }

    #[test]
    fn small_equivalences() {
        let g2 = z(2);
        let one = [EmQuery::Encrypt(el(&g2, 0))];
        assert!(exhaustive_game_equivalence(EmPairing::XXPrime, &g2, &one).unwrap());
        assert!(exhaustive_game_equivalence(EmPairing::RRPrime, &g2, &one).unwrap());
        let g3 = z(3);
        let two = [EmQuery::Encrypt(el(&g3, 0)), EmQuery::Permute(el(&g3, 0))];
        assert!(exhaustive_game_equivalence(EmPairing::XXPrime, &g3, &two).unwrap());
        assert!(exhaustive_game_equivalence(EmPairing::RRPrime, &g3, &two).unwrap());
    }

    #[test]
    fn corrupted_game_x_is_caught() {
        let g = z(2);
        let script = [EmQuery::Encrypt(el(&g, 0)), EmQuery::Permute(el(&g, 0))];
        assert!(!exhaustive_game_equivalence(EmPairing::CorruptedXXPrime, &g, &script).unwrap());
    }

    #[test]
    fn equivalence_capacity() {
        let g = z(6);
        assert!(matches!(
            exhaustive_game_equivalence(EmPairing::XXPrime, &g, &[]),
            Err(Error::Capacity { .. })
        ));
        let g = z(2);
        let long = vec![EmQuery::Encrypt(el(&g, 0)); 4];
        assert!(matches!(
            exhaustive_game_equivalence(EmPairing::RRPrime, &g, &long),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn rprime_flag_probability_is_bad_key_fraction() {
        let g = z(64);
        let mut game =
            EmGameOracles::new(EmGame::RPrime, &g, QueryBudget::em(4, 4), seeded(11)).unwrap();
        for v in 0..4 {
            game.encrypt(&el(&g, v)).unwrap();
            game.permute(&el(&g, 10 * v + 5)).unwrap();
        }
        let (s, t) = (game.cipher_pairs(), game.perm_pairs());
        let dist = exact_distribution(|c: &mut dyn Coins| rprime_flag(&g, &s, &t, c)).unwrap();
        let p = probability(&dist, |b| *b);
        assert_eq!(p, bad_key_fraction(&g, &s, &t).unwrap());
        assert!(count_bad_keys(&g, &s, &t).unwrap() <= 32);
    }

    #[test]
    fn bad_key_definition() {
        let g = z(10);
        let s = [(el(&g, 1), el(&g, 5))];
        let t = [(el(&g, 4), el(&g, 9))];
        // m·k = x at k = 3; c·k⁻¹ = y at k = 6
        let bad: Vec<u128> = g
            .elements()
            .unwrap()
            .iter()
            .filter(|k| is_bad_key(&g, &s, &t, k).unwrap())
            .map(|k| g.to_int(k).unwrap())
            .collect();
        assert_eq!(bad, vec![3, 6]);
    }
}
