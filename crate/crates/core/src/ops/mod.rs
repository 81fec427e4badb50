//! Operations on elements: products, exponentials, cabling, framing and projections.

mod cover;
mod glue;
mod symmetrize;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::coeff::{Coeff, Laurent, Q};
use crate::diagram::{canonicalize, Diagram, Sign, Signature, SkeletonKind};
use crate::element::Element;
use crate::error::{Error, Result};

pub use cover::{pullback_cover, Cover};
pub use glue::{apply_diffop, coproduct, inner_product, inner_product_labels, pair};
pub use symmetrize::{chi, chi_circle, ChiInverter};

/// Runs a state expansion with canonical merging: every state is replaced by the sum of its
/// successors, `steps` times.
pub(crate) fn expand(
    start: BTreeMap<Diagram, Q>,
    steps: usize,
    mut successors: impl FnMut(&Diagram) -> Vec<Diagram>,
) -> BTreeMap<Diagram, Q> {
    let mut states = start;
    for _ in 0..steps {
        let mut next: BTreeMap<Diagram, Q> = BTreeMap::new();
        for (d, c) in &states {
            for s in successors(d) {
                add_canon(&mut next, &s, c);
            }
        }
        states = next;
    }
    states
}

pub(crate) fn add_canon(map: &mut BTreeMap<Diagram, Q>, d: &Diagram, c: &Q) {
    let can = canonicalize(d);
    let c = match can.sign {
        Sign::Zero => return,
        Sign::Pos => c.clone(),
        Sign::Neg => -c.clone(),
    };
    match map.entry(can.diagram) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if num_traits::Zero::is_zero(o.get()) {
                o.remove();
            }
        }
    }
}

pub(crate) fn single(d: &Diagram) -> BTreeMap<Diagram, Q> {
    let mut m = BTreeMap::new();
    add_canon(&mut m, d, &Q::from_integer(1.into()));
    m
}

/// Disjoint union, extended bilinearly; shared labels must be star-like.
pub fn disjoint_union<C: Coeff>(a: &Element<C>, b: &Element<C>) -> Result<Element<C>> {
    let sig = if a.sig() == b.sig() { a.sig().clone() } else { Arc::new(a.sig().merge(b.sig())?) };
    a.bilinear(b, sig.clone(), |x, y| {
        let u = x.union(y)?.embed(&sig)?;
        Ok(Element::from_diagram(&u))
    })
}

/// Places `a` on top of `b` along every interval and circle (for circles this is the connected
/// sum at the base point); star legs are united.
pub fn stack_diagrams(a: &Diagram, b: &Diagram) -> Result<Diagram> {
    if a.sig() != b.sig() {
        return Err(Error::Signature(format!("stacking {} on {}", a.sig(), b.sig())));
    }
    let shifted = a.shifted(b.partner.len() as u32);
    let mut out = b.clone();
    for (i, c) in a.sig().comps().iter().enumerate() {
        let _ = c;
        out.attach[i].extend_from_slice(&shifted.attach[i]);
    }
    out.vertices.extend(shifted.vertices);
    out.partner.extend_from_slice(&shifted.partner[b.partner.len()..]);
    out.loops += a.loops;
    Ok(out)
}

pub fn stack<C: Coeff>(a: &Element<C>, b: &Element<C>) -> Result<Element<C>> {
    if a.sig() != b.sig() {
        return Err(Error::Signature(format!("stacking {} on {}", a.sig(), b.sig())));
    }
    a.bilinear(b, a.sig().clone(), |x, y| Ok(Element::from_diagram(&stack_diagrams(x, y)?)))
}

/// `exp(e) = sum e^k / k!` for a product, truncated at `max_degree`. `e` must have no degree-0
/// part.
pub fn exp_with<C: Coeff>(
    e: &Element<C>,
    max_degree: usize,
    mut product: impl FnMut(&Element<C>, &Element<C>) -> Result<Element<C>>,
) -> Result<Element<C>> {
    if e.terms().any(|(d, _)| d.degree() == 0) {
        return Err(Error::Precondition("exponential of an element with a degree-0 part".into()));
    }
    let e = e.truncated(max_degree);
    let one = Element::<C>::one(e.sig().clone()).with_truncation(Some(max_degree));
    let mut total = one.clone();
    let mut power = one;
    for k in 1..=max_degree {
        power = product(&power, &e)?.truncated(max_degree);
        if power.is_zero() {
            break;
        }
        let inv = Q::new(1.into(), crate::coeff::factorial(k as u64));
        total.add_scaled(&power.scale_q(&inv), &C::one());
    }
    Ok(total.with_truncation(Some(max_degree)))
}

pub fn exp_union<C: Coeff>(e: &Element<C>, max_degree: usize) -> Result<Element<C>> {
    exp_with(e, max_degree, disjoint_union)
}

pub fn exp_stack<C: Coeff>(e: &Element<C>, max_degree: usize) -> Result<Element<C>> {
    exp_with(e, max_degree, stack)
}

/// Multiplies every term by `n^k`, `k` the number of legs on `label`.
pub fn psi_star<C: Coeff>(e: &Element<C>, label: &str, n: &Q) -> Element<C> {
    let mut out = Element::zero(e.sig().clone()).with_truncation(e.truncation());
    for (d, c) in e.terms() {
        let k = d.legs_on(label);
        out.add_canonical(d.clone(), c.scale(&num_traits::pow(n.clone(), k)));
    }
    out
}

/// Same with the formal variable `n`: the result has Laurent coefficients.
pub fn psi_star_formal(e: &Element<Laurent>, label: &str) -> Element<Laurent> {
    let mut out = Element::zero(e.sig().clone()).with_truncation(e.truncation());
    for (d, c) in e.terms() {
        let k = d.legs_on(label) as i32;
        out.add_canonical(d.clone(), c.clone() * Laurent::pow_var(k));
    }
    out
}

pub fn to_laurent(e: &Element<Q>) -> Element<Laurent> {
    let mut out = Element::zero(e.sig().clone()).with_truncation(e.truncation());
    for (d, c) in e.terms() {
        out.add_canonical(d.clone(), Laurent::from_q(c.clone()));
    }
    out
}

/// Kills every term with a component that does not reach the skeleton.
pub fn pi_bc<C: Coeff>(e: &Element<C>) -> Element<C> {
    e.filter(|d| !d.has_vacuum_component())
}

/// Degree minus the number of legs on `label`.
pub fn mapping_degree(d: &Diagram, label: &str) -> i64 {
    d.degree() as i64 - d.legs_on(label) as i64
}

/// The single chord on an interval or circle component of `sig`.
pub fn isolated_chord(sig: &Arc<Signature>, label: &str) -> Result<Diagram> {
    let i = sig.require(label)?;
    if !sig.comps()[i].kind.is_one_manifold() {
        return Err(Error::Precondition(format!("{label:?} is not an interval or circle")));
    }
    let mut d = Diagram::empty(sig.clone());
    let a = d.fresh_dart();
    let b = d.fresh_dart();
    d.attach[i].extend([a, b]);
    d.connect(a, b);
    Ok(d)
}

/// Connected sum with `exp(k/2 * chord)` on the circle `label`.
pub fn framing_change<C: Coeff>(e: &Element<C>, label: &str, k: i64, max_degree: usize) -> Result<Element<C>> {
    let i = e.sig().require(label)?;
    if e.sig().comps()[i].kind != SkeletonKind::Circle {
        return Err(Error::Precondition(format!("{label:?} is not a circle")));
    }
    let chord = Element::<C>::from_diagram(&isolated_chord(e.sig(), label)?).scale_q(&Q::new(k.into(), 2.into()));
    let ex = exp_stack(&chord, max_degree)?;
    stack(e, &ex).map(|x| x.truncated(max_degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};
    use crate::diagram::{chords, strut, theta, wheel};

    #[test]
    fn union_is_commutative_with_unit() {
        let a: Element = Element::from_diagram(&wheel("x", 2));
        let b: Element = Element::from_diagram(&strut("x"));
        assert_eq!(disjoint_union(&a, &b).unwrap(), disjoint_union(&b, &a).unwrap());
        let one = Element::one(a.sig().clone());
        assert_eq!(disjoint_union(&one, &a).unwrap(), a);
        let sq = disjoint_union(&a, &a).unwrap();
        assert_eq!(sq.len(), 1);
        assert_eq!(sq.terms().next().unwrap().1, &qi(1));
    }

    #[test]
    fn stacking_two_chords() {
        let c: Element = Element::from_diagram(&chords(SkeletonKind::Interval, "z", 1));
        let s = stack(&c, &c).unwrap();
        let expected: Element = Element::from_diagram(&chords(SkeletonKind::Interval, "z", 2));
        assert_eq!(s, expected);
    }

    #[test]
    fn psi_composes() {
        let mut e: Element = Element::from_diagram(&wheel("x", 2));
        e.add_diagram(&wheel("x", 4), q(1, 3));
        let a = psi_star(&psi_star(&e, "x", &qi(2)), "x", &qi(3));
        assert_eq!(a, psi_star(&e, "x", &qi(6)));
        let w: Element = Element::from_diagram(&wheel("x", 2));
        assert_eq!(psi_star(&w, "x", &qi(3)), w.scale_q(&qi(9)));
    }

    #[test]
    fn framing_group_law() {
        let sig = Arc::new(Signature::single(SkeletonKind::Circle, "c"));
        let unknot: Element = Element::one(sig);
        let f = framing_change(&unknot, "c", 1, 4).unwrap();
        let chord: Element = Element::from_diagram(&chords(SkeletonKind::Circle, "c", 1));
        assert_eq!(f.degree_part(1), chord.scale_q(&q(1, 2)).with_truncation(Some(4)));
        let back = framing_change(&f, "c", -1, 4).unwrap();
        assert_eq!(back, unknot.truncated(4));
    }

    #[test]
    fn projection_kills_vacuum() {
        let t = theta().embed(&Arc::new(Signature::star("x"))).unwrap();
        let d = t.union(&strut("x")).unwrap();
        let e: Element = Element::from_diagram(&d);
        assert!(pi_bc(&e).is_zero());
        let s: Element = Element::from_diagram(&strut("x"));
        assert_eq!(pi_bc(&s), s);
    }
}
