use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mumford_core::examples::{g2p, g2p2, BetaExponents};
use mumford_core::scalar::rat_padic_val;
use mumford_core::valtower::GaloisAuto;
use mumford_core::{FieldElement, FieldTower, Rat, Val};

fn l4() -> &'static (Arc<FieldTower>, Vec<GaloisAuto>) {
    static T: OnceLock<(Arc<FieldTower>, Vec<GaloisAuto>)> = OnceLock::new();
    T.get_or_init(|| {
        let d = g2p2();
        (d.figure.tower().clone(), d.galois)
    })
}

fn l18() -> &'static (Arc<FieldTower>, Vec<GaloisAuto>) {
    static T: OnceLock<(Arc<FieldTower>, Vec<GaloisAuto>)> = OnceLock::new();
    T.get_or_init(|| {
        let d = g2p(3, BetaExponents::default()).unwrap();
        (d.figure.tower().clone(), d.galois)
    })
}

/// Random element with a forced valuation component: `p^k · θ^j · u` for a
/// random `u`, sometimes restricted to a lower level.
fn element(t: &Arc<FieldTower>, seed: u64) -> FieldElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = FieldElement::random(t, &mut rng, 6);
    let level = rng.gen_range(0..=t.num_levels());
    if level < t.num_levels() {
        let n = t.level_degree(level);
        let mut c = x.coords().to_vec();
        c[n..]
            .iter_mut()
            .for_each(|a| *a = Rat::from_integer(0.into()));
        x = FieldElement::from_coords(t, c).unwrap();
    }
    if x.is_zero() {
        x = FieldElement::one(t);
    }
    let p = FieldElement::from_int(t, t.prime() as i64);
    x = &x * &p.pow(rng.gen_range(0..3));
    if t.num_levels() > 0 {
        let g = FieldElement::generator(t, rng.gen_range(0..t.num_levels()));
        x = &x * &g.pow(rng.gen_range(0..4));
    }
    x
}

/// `v_p(N_{L/Q}(x)) / [L : Q]` from the full multiplication matrix.
fn norm_oracle(x: &FieldElement) -> Rat {
    let t = x.tower();
    let v = rat_padic_val(&x.norm(), t.prime()).expect("nonzero norm");
    Rat::from_integer(v.into()) / Rat::from_integer((t.degree() as i64).into())
}

fn fin(x: &FieldElement) -> Rat {
    x.v().fin().cloned().expect("nonzero")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn multiplicative_and_ultrametric_small(a in any::<u64>(), b in any::<u64>()) {
        let t = &l4().0;
        let (x, y) = (element(t, a), element(t, b));
        prop_assert_eq!(fin(&(&x * &y)), fin(&x) + fin(&y));
        let s = &x + &y;
        if !s.is_zero() {
            prop_assert!(fin(&s) >= fin(&x).min(fin(&y)));
        }
        prop_assert_eq!(fin(&x), norm_oracle(&x));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn large_tower_matches_norm_oracle(a in any::<u64>(), b in any::<u64>()) {
        let t = &l18().0;
        let (x, y) = (element(t, a), element(t, b));
        prop_assert_eq!(fin(&x), norm_oracle(&x));
        prop_assert_eq!(fin(&(&x * &y)), fin(&x) + fin(&y));
        prop_assert_eq!(x.norm() * y.norm(), (&x * &y).norm());
    }

    #[test]
    fn galois_preserves_valuation(a in any::<u64>()) {
        for (t, autos) in [l4(), l18()] {
            let x = element(t, a);
            for g in autos {
                prop_assert_eq!(g.apply(&x).v(), x.v());
                prop_assert_eq!(g.apply(&x).norm(), x.norm());
            }
        }
    }

    #[test]
    fn inverse_is_exact(a in any::<u64>()) {
        for (t, _) in [l4(), l18()] {
            let x = element(t, a);
            let y = x.inv().unwrap();
            prop_assert!((&x * &y).is_one());
            prop_assert_eq!(fin(&y), -fin(&x));
        }
    }
}

#[test]
fn zero_has_infinite_valuation() {
    for (t, _) in [l4(), l18()] {
        assert_eq!(FieldElement::zero(t).v(), Val::Inf);
        assert!(FieldElement::zero(t).inv().is_err());
    }
}

#[test]
fn generator_valuations_of_the_large_tower() {
    let t = &l18().0;
    let v: Vec<Rat> = (0..t.num_levels())
        .map(|k| fin(&FieldElement::generator(t, k)))
        .collect();
    let oracle: Vec<Rat> = (0..t.num_levels())
        .map(|k| norm_oracle(&FieldElement::generator(t, k)))
        .collect();
    assert_eq!(v, oracle);
}
