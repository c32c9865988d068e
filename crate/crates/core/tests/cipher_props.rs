use proptest::prelude::*;

use grouplab::em::EmInstance;
use grouplab::feistel::{FeistelPair, PsiInstance, RoundFunction, RoundFunctionChain};
use grouplab::{Coins, Group, SeededCoins};

const SPECS: [&str; 8] = [
    "zmod:2",
    "zmod:1000",
    "xor:16",
    "sym:3",
    "sym:7",
    "dihedral:9",
    "prod:(sym:3,zmod:4)",
    "prod:(dihedral:5,xor:4)",
];

fn group(i: usize) -> Group {
    Group::parse(SPECS[i % SPECS.len()]).unwrap()
}

fn pair(g: &Group, c: &mut dyn Coins) -> FeistelPair {
    FeistelPair::new(g.sample(c).unwrap(), g.sample(c).unwrap())
}

/// A round function from a small menu of deliberately non-injective ones.
fn nasty(g: &Group, kind: u8, c: &mut dyn Coins) -> RoundFunction {
    match kind % 4 {
        0 => RoundFunction::constant(g.identity()),
        1 => RoundFunction::constant(g.sample(c).unwrap()),
        2 => {
            let g = g.clone();
            RoundFunction::fixed(move |x| g.element_at(g.index_of(x)? % 2))
        }
        _ => RoundFunction::random(g, c),
    }
}

proptest! {
    #[test]
    fn em_round_trips(seed in any::<u64>(), which in 0usize..8) {
        let g = group(which);
        let mut c = SeededCoins::from_seed(seed);
        let mut inst = EmInstance::generate(&g, &mut c).unwrap();
        for _ in 0..20 {
            let m = g.sample(&mut c).unwrap();
            let e = inst.encrypt(&m).unwrap();
            prop_assert_eq!(inst.decrypt(&e).unwrap(), m.clone());
            let d = inst.decrypt(&m).unwrap();
            prop_assert_eq!(inst.encrypt(&d).unwrap(), m);
        }
    }

    #[test]
    fn feistel_inverts_with_any_round_functions(
        seed in any::<u64>(),
        which in 0usize..8,
        kinds in proptest::collection::vec(any::<u8>(), 1..7),
    ) {
        let g = group(which);
        let mut c = SeededCoins::from_seed(seed);
        let fs = kinds.iter().map(|&k| nasty(&g, k, &mut c)).collect();
        let mut chain = RoundFunctionChain::new(&g, fs).unwrap();
        for _ in 0..20 {
            let p = pair(&g, &mut c);
            let e = chain.encrypt(&p).unwrap();
            prop_assert_eq!(chain.decrypt(&e).unwrap(), p.clone());
            let d = chain.decrypt(&p).unwrap();
            prop_assert_eq!(chain.encrypt(&d).unwrap(), p);
        }
    }

    #[test]
    fn one_round_leaks_right_half(seed in any::<u64>(), which in 0usize..8) {
        let g = group(which);
        let mut c = SeededCoins::from_seed(seed);
        let mut chain = RoundFunctionChain::random(&g, 1, &mut c).unwrap();
        let p = pair(&g, &mut c);
        prop_assert_eq!(chain.encrypt(&p).unwrap().left, p.right);
    }

    #[test]
    fn two_round_relation(seed in any::<u64>(), which in 0usize..8) {
        let g = group(which);
        let mut c = SeededCoins::from_seed(seed);
        let mut chain = RoundFunctionChain::random(&g, 2, &mut c).unwrap();
        let probe = g.sample(&mut c).unwrap();
        let l0 = g.sample(&mut c).unwrap();
        let a = chain.encrypt(&FeistelPair::new(g.identity(), probe.clone())).unwrap();
        let b = chain.encrypt(&FeistelPair::new(l0.clone(), probe)).unwrap();
        prop_assert_eq!(g.div(&b.left, &a.left).unwrap(), l0);
    }

    #[test]
    fn psi_round_trips(seed in any::<u64>(), which in 0usize..8) {
        let g = group(which);
        let mut c = SeededCoins::from_seed(seed);
        let mut psi = PsiInstance::generate(&g, &mut c).unwrap();
        for _ in 0..10 {
            let x = pair(&g, &mut c);
            let y = psi.encrypt(&x).unwrap();
            prop_assert_eq!(psi.decrypt(&y).unwrap(), x);
        }
    }
}

#[test]
fn em_exhaustive_on_small_groups() {
    for spec in ["zmod:512", "sym:5", "dihedral:100", "prod:(sym:3,xor:4)"] {
        let g = Group::parse(spec).unwrap();
        for seed in 0..3 {
            let mut inst = EmInstance::generate(&g, &mut SeededCoins::from_seed(seed)).unwrap();
            for m in g.elements().unwrap() {
                let e = inst.encrypt(&m).unwrap();
                assert_eq!(inst.decrypt(&e).unwrap(), m, "{spec}");
            }
        }
    }
}

#[test]
fn psi_with_identity_key_is_gffg_exhaustively() {
    for spec in ["zmod:8", "dihedral:4", "sym:3", "xor:3"] {
        let g = Group::parse(spec).unwrap();
        let mut c = SeededCoins::from_seed(9);
        let table = |c: &mut SeededCoins| -> Vec<usize> {
            (0..g.order()).map(|_| c.below(g.order()).unwrap() as usize).collect()
        };
        let (tf, tg) = (table(&mut c), table(&mut c));
        let mk = |t: &Vec<usize>| {
            let (g, t) = (g.clone(), t.clone());
            RoundFunction::fixed(move |x| g.element_at(t[g.index_of(x)? as usize] as u128))
        };
        let mut psi = PsiInstance::new(&g, g.identity(), g.identity(), mk(&tf), mk(&tg)).unwrap();
        let mut chain = RoundFunctionChain::new(&g, vec![mk(&tg), mk(&tf), mk(&tf), mk(&tg)]).unwrap();
        for l in g.elements().unwrap() {
            for r in g.elements().unwrap() {
                let p = FeistelPair::new(l.clone(), r);
                assert_eq!(psi.encrypt(&p).unwrap(), chain.encrypt(&p).unwrap(), "{spec}");
            }
        }
    }
}

#[test]
fn psi_key_acts_coordinatewise() {
    let g = Group::sym(3).unwrap();
    let mut c = SeededCoins::from_seed(11);
    let [kl, kr, fv, gv] = [(); 4].map(|_| g.sample(&mut c).unwrap());
    let mut psi = PsiInstance::new(
        &g,
        kl.clone(),
        kr.clone(),
        RoundFunction::constant(fv.clone()),
        RoundFunction::constant(gv.clone()),
    )
    .unwrap();
    let mut chain = RoundFunctionChain::new(
        &g,
        [&gv, &fv, &fv, &gv].map(|v| RoundFunction::constant(v.clone())).into(),
    )
    .unwrap();
    let key = FeistelPair::new(kl, kr);
    for l in g.elements().unwrap() {
        for r in g.elements().unwrap() {
            let x = FeistelPair::new(l.clone(), r);
            let inner = chain.encrypt(&x.mul(&g, &key).unwrap()).unwrap();
            assert_eq!(psi.encrypt(&x).unwrap(), inner.mul(&g, &key).unwrap());
        }
    }
}
