//! Property tests for canonical forms, relations, the sl2 weight system and the series layer.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wheelkit::coeff::factorial;
use wheelkit::diagram::{
    canonicalize, enumerate_diagrams, generate_relations, vacuum_classes, wheel, Component, Dart, RelationKind, Sign,
};
use wheelkit::ops::{coproduct, disjoint_union};
use wheelkit::series::{appendix_f, modified_bernoulli, Series};
use wheelkit::sl2::{seeded_rng, Sl2};
use wheelkit::wheels::{log_omega, omega};
use wheelkit::{Diagram, DiagramBuilder, Element, Engine, Signature, SkeletonKind, Q};

fn signatures() -> Vec<Signature> {
    vec![
        Signature::star("x"),
        Signature::single(SkeletonKind::Interval, "z"),
        Signature::single(SkeletonKind::Circle, "c"),
        Signature::new(vec![Component::new(SkeletonKind::Interval, "z"), Component::new(SkeletonKind::Star, "x")])
            .unwrap(),
    ]
}

/// All nonzero canonical diagrams of degree <= 4 on each test signature.
fn corpus() -> &'static Vec<Vec<Diagram>> {
    static CORPUS: OnceLock<Vec<Vec<Diagram>>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        signatures().iter().map(|s| (0..=4).flat_map(|n| enumerate_diagrams(n, s)).collect()).collect()
    })
}

fn vacuum(max_degree: usize) -> Vec<Diagram> {
    (1..=max_degree).flat_map(vacuum_classes).filter(|c| !c.zero).map(|c| c.diagram).collect()
}

/// Rebuilds `d` with vertices in random order, random rotations, random reversals of cyclic
/// order and legs shuffled where the skeleton allows it. Returns the copy and the number of
/// reversals.
fn scramble(d: &Diagram, rng: &mut ChaCha8Rng) -> (Diagram, usize) {
    let mut b = DiagramBuilder::with_sig(d.sig().clone());
    let max_dart = d
        .vertices()
        .iter()
        .flatten()
        .chain((0..d.sig().len()).flat_map(|c| d.attach(c).iter()))
        .copied()
        .max()
        .map_or(0, |m| m as usize + 1);
    let mut map: Vec<Option<Dart>> = vec![None; max_dart];
    let mut order: Vec<usize> = (0..d.vertices().len()).collect();
    order.shuffle(rng);
    let mut reversals = 0;
    for &v in &order {
        let mut rot = d.vertices()[v];
        rot.rotate_left(rng.gen_range(0..3));
        if rng.gen_bool(0.5) {
            rot.swap(1, 2);
            reversals += 1;
        }
        for (old, new) in rot.iter().zip(b.vertex()) {
            map[*old as usize] = Some(new);
        }
    }
    for (c, comp) in d.sig().comps().iter().enumerate() {
        let mut legs = d.attach(c).to_vec();
        match comp.kind {
            SkeletonKind::Star | SkeletonKind::CircledStar => legs.shuffle(rng),
            SkeletonKind::Circle if !legs.is_empty() => {
                let k = rng.gen_range(0..legs.len());
                legs.rotate_left(k)
            }
            _ => {}
        }
        for old in legs {
            map[old as usize] = Some(b.leg(&comp.label).unwrap());
        }
    }
    for old in 0..map.len() {
        let Some(new) = map[old] else { continue };
        let p = d.partner(old as Dart) as usize;
        if old < p {
            b.edge(new, map[p].unwrap());
        }
    }
    b.add_loops(d.loops());
    (b.finish().unwrap(), reversals)
}

fn flip(s: Sign, times: usize) -> Sign {
    if times.is_multiple_of(2) {
        s
    } else {
        s.mul(Sign::Neg)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_ignores_presentation(sig in 0usize..4, pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let d = pick.get(&corpus()[sig]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (e, reversals) = scramble(d, &mut rng);
        let a = canonicalize(d);
        let b = canonicalize(&e);
        prop_assert_eq!(&a.diagram, &b.diagram);
        prop_assert_eq!(a.sign, Sign::Pos);
        prop_assert_eq!(b.sign, flip(Sign::Pos, reversals));
    }

    #[test]
    fn canonicalization_is_idempotent(sig in 0usize..4, pick in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let (e, _) = scramble(pick.get(&corpus()[sig]), &mut ChaCha8Rng::seed_from_u64(seed));
        let c = canonicalize(&e);
        let again = canonicalize(&c.diagram);
        prop_assert_eq!(again.diagram, c.diagram);
        prop_assert_eq!(again.sign, Sign::Pos);
    }

    #[test]
    fn union_adds_degrees(a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let (a, b) = (a.get(&corpus()[0]), b.get(&corpus()[0]));
        let u = disjoint_union::<Q>(&Element::from_diagram(a), &Element::from_diagram(b)).unwrap();
        for (d, _) in u.terms() {
            prop_assert_eq!(d.degree(), a.degree() + b.degree());
        }
    }

    #[test]
    fn union_is_commutative_and_associative(
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
        c in any::<prop::sample::Index>(),
    ) {
        let [a, b, c] = [a, b, c].map(|i| Element::from_diagram(i.get(&corpus()[0])));
        let u = |x: &Element, y: &Element| disjoint_union(x, y).unwrap();
        prop_assert_eq!(u(&a, &b), u(&b, &a));
        prop_assert_eq!(u(&u(&a, &b), &c), u(&a, &u(&b, &c)));
    }

    #[test]
    fn coproduct_is_coassociative_and_cocommutative(pick in any::<prop::sample::Index>()) {
        let e: Element = Element::from_diagram(pick.get(&corpus()[0]));
        let left = coproduct(&coproduct(&e, "x", &["p", "c"]).unwrap(), "p", &["a", "b"]).unwrap();
        let right = coproduct(&coproduct(&e, "x", &["a", "q"]).unwrap(), "q", &["b", "c"]).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(coproduct(&e, "x", &["a", "b"]).unwrap(), coproduct(&e, "x", &["b", "a"]).unwrap());
    }

    #[test]
    fn sl2_is_multiplicative(a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        static VAC: OnceLock<Vec<Diagram>> = OnceLock::new();
        let vac = VAC.get_or_init(|| vacuum(3));
        let (a, b) = (a.get(vac), b.get(vac));
        let sl2 = Sl2::new();
        let u = a.union(b).unwrap();
        prop_assert_eq!(sl2.diagram_value(&u).unwrap(), sl2.diagram_value(a).unwrap() * sl2.diagram_value(b).unwrap());
    }
}

#[test]
fn sl2_rewrite_order_is_irrelevant() {
    let sl2 = Sl2::new();
    let mut rng = seeded_rng(7);
    let mut checked = 0;
    for d in vacuum(6) {
        assert_eq!(sl2.diagram_value_random(&d, &mut rng).unwrap(), sl2.diagram_value(&d).unwrap(), "{d:?}");
        checked += 1;
    }
    assert!(checked > 50, "{checked}");
}

#[test]
fn sl2_kills_vacuum_relations() {
    let sl2 = Sl2::new();
    for degree in 1..=5 {
        let rels = generate_relations(degree, &Signature::empty());
        assert!(degree < 2 || !rels.is_empty());
        for r in rels {
            assert!(sl2.reduce(&r.element).unwrap().is_zero(), "{} at degree {degree}", r.site);
        }
    }
}

#[test]
fn relation_vectors_reduce_to_zero() {
    let engine = Engine::new(4, None).unwrap();
    let mut sigs = signatures();
    sigs.push(Signature::single(SkeletonKind::CircledStar, "x"));
    let mut checked = 0;
    for sig in sigs {
        let arc = Arc::new(sig.clone());
        for degree in 0..=3 {
            for r in generate_relations(degree, &sig) {
                checked += 1;
                let check = engine.equal_mod_relations(&r.element, &Element::zero(arc.clone()), degree).unwrap();
                assert!(check.equal, "{:?} {} on {sig}", r.kind, r.site);
            }
        }
    }
    assert!(checked > 100, "{checked}");
    let link = generate_relations(3, &Signature::single(SkeletonKind::CircledStar, "x"));
    assert!(link.iter().any(|r| r.kind == RelationKind::Link));
}

#[test]
fn bernoulli_generating_identity() {
    for n in [1usize, 4, 8] {
        let b = modified_bernoulli(n);
        let s = Series::from_fn(2 * n, |k| if k % 2 == 0 { b[k / 2].clone() * Q::from_integer(2.into()) } else { Q::zero() });
        let direct = Series::from_fn(2 * n, |k| {
            if k % 2 == 1 {
                return Q::zero();
            }
            let m = (k / 2) as u32;
            Q::new(1.into(), num_bigint::BigInt::from(4).pow(m) * factorial(k as u64 + 1))
        });
        assert_eq!(s.exp().unwrap(), direct);
        assert_eq!(appendix_f(n).substitute_power(2), direct);
    }
}

#[test]
fn log_omega_is_a_sum_of_wheels() {
    let l = log_omega("x", 8);
    assert!(!l.is_zero());
    for (d, _) in l.terms() {
        let k = d.legs_on("x");
        assert_eq!(k % 2, 0);
        let w: Element = Element::from_diagram(&wheel("x", k));
        assert_eq!(w.terms().next().unwrap().0, d);
    }
    let o = omega("x", 8).unwrap();
    assert_eq!(o.coeff(&Diagram::empty(o.sig().clone())), Q::one());
}
