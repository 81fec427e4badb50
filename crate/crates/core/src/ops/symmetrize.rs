//! Symmetrization onto intervals and circles, and its inverse in quotient coordinates.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;

use super::{expand, single};
use crate::coeff::{factorial, Coeff, Q};
use crate::diagram::{Component, Diagram, Signature, SkeletonKind};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::linalg::invert;
use crate::quotient::{BlockKey, Reducer};

const TMP: &str = "#x";

fn symmetrize<C: Coeff>(e: &Element<C>, label: &str, target: SkeletonKind) -> Result<Element<C>> {
    let i = e.sig().require(label)?;
    if !e.sig().comps()[i].kind.is_star() {
        return Err(Error::Precondition(format!("{label:?} is not a star-like label")));
    }
    let sig = Arc::new(e.sig().with_kind(label, target)?);
    e.map(sig.clone(), |d| {
        let k = d.legs_on(label);
        // legs are appended to an interval; a circle has no end once canonical rotation applies,
        // so it is closed up only after all legs are placed
        let start = d.relabel(label, TMP)?.add_component(Component::new(SkeletonKind::Interval, label))?;
        let states = expand(single(&start), k, |s| {
            let src = s.sig().index_of(TMP).expect("temporary label");
            let dst = s.sig().index_of(label).expect("target label");
            s.attach(src)
                .iter()
                .map(|&a| {
                    let mut t = s.clone();
                    t.move_leg(a, dst);
                    t
                })
                .collect()
        });
        let inv = Q::new(BigInt::from(1), factorial(k as u64));
        let mut out = Element::zero(sig.clone());
        for (s, x) in states {
            out.add_diagram(&s.drop_component(TMP)?.with_kind(label, target)?.embed(&sig)?, C::from_q(x * &inv));
        }
        Ok(out)
    })
}

/// Replaces the star `label` by an interval, averaging over all orders of its legs.
pub fn chi<C: Coeff>(e: &Element<C>, label: &str) -> Result<Element<C>> {
    symmetrize(e, label, SkeletonKind::Interval)
}

/// Replaces the star `label` by a circle, averaging over all cyclic orders of its legs.
pub fn chi_circle<C: Coeff>(e: &Element<C>, label: &str) -> Result<Element<C>> {
    symmetrize(e, label, SkeletonKind::Circle)
}

/// The linear system of one legged block: its basis as images of star diagrams.
struct Solve {
    star_basis: Vec<Diagram>,
    index: HashMap<Diagram, usize>,
    inverse: Vec<Vec<Q>>,
}

/// Inverts symmetrization in quotient coordinates, caching one solved system per block.
#[derive(Default)]
pub struct ChiInverter {
    cache: Mutex<HashMap<(BlockKey, String), Arc<Solve>>>,
}

impl ChiInverter {
    pub fn new() -> Self {
        Self::default()
    }

    fn solve(&self, reducer: &Reducer, key: &BlockKey, label: &str) -> Result<Arc<Solve>> {
        let ck = (key.clone(), label.to_string());
        if let Some(s) = self.cache.lock().expect("lock").get(&ck) {
            return Ok(s.clone());
        }
        let li = key.sig.require(label)?;
        let kind = key.sig.comps()[li].kind;
        let star_kind = match kind {
            SkeletonKind::Interval => SkeletonKind::Star,
            SkeletonKind::Circle => SkeletonKind::CircledStar,
            _ => return Err(Error::Precondition(format!("{label:?} is not an interval or circle"))),
        };
        let star_sig = Arc::new(key.sig.with_kind(label, star_kind)?);
        let block = reducer.block(key)?;
        let basis: Vec<Diagram> = block.basis().cloned().collect();
        let index: HashMap<Diagram, usize> = basis.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
        let mut star_basis = Vec::new();
        let mut columns: Vec<BTreeMap<usize, Q>> = Vec::new();
        for k in 0..=2 * key.degree {
            let mut counts = key.counts.clone();
            counts[li] = k;
            let sb = reducer.block(&BlockKey { sig: star_sig.clone(), degree: key.degree, counts })?;
            for b in sb.basis() {
                let img = symmetrize(&Element::<Q>::from_diagram(b), label, kind)?;
                let mut col = BTreeMap::new();
                for ((_, v, l), x) in reducer.coordinates(&img)? {
                    if v.degree() > 0 || v.loops() > 0 {
                        return Err(Error::Consistency("symmetrization produced a vacuum part".into()));
                    }
                    let r = *index.get(&l).ok_or_else(|| {
                        Error::Consistency(format!("image outside block {}", key.describe()))
                    })?;
                    col.insert(r, x);
                }
                star_basis.push(b.clone());
                columns.push(col);
            }
        }
        let n = basis.len();
        if star_basis.len() != n {
            return Err(Error::Consistency(format!(
                "block {} has dimension {n} but its star counterpart has {}",
                key.describe(),
                star_basis.len()
            )));
        }
        let zero = Q::from_integer(BigInt::from(0));
        let mut m = vec![vec![zero; n]; n];
        for (j, col) in columns.iter().enumerate() {
            for (&i, x) in col {
                m[i][j] = x.clone();
            }
        }
        let inverse = invert(&m)
            .ok_or_else(|| Error::Consistency(format!("symmetrization is singular on {}", key.describe())))?;
        let s = Arc::new(Solve { star_basis, index, inverse });
        self.cache.lock().expect("lock").insert(ck, s.clone());
        Ok(s)
    }

    /// The star element whose symmetrization equals `e` modulo relations, through `max_degree`.
    /// `label` must be an interval or circle of `e`; it becomes a star or circled star.
    pub fn invert<C: Coeff>(&self, reducer: &Reducer, e: &Element<C>, label: &str, max_degree: usize) -> Result<Element<C>> {
        let li = e.sig().require(label)?;
        let star_kind = match e.sig().comps()[li].kind {
            SkeletonKind::Interval => SkeletonKind::Star,
            SkeletonKind::Circle => SkeletonKind::CircledStar,
            _ => return Err(Error::Precondition(format!("{label:?} is not an interval or circle"))),
        };
        let star_sig = Arc::new(e.sig().with_kind(label, star_kind)?);
        let coords = reducer.coordinates(&e.truncated(max_degree))?;
        // group by (vacuum part, legged block)
        let mut groups: BTreeMap<(Diagram, BlockKey), Vec<(Diagram, C)>> = BTreeMap::new();
        for ((_, v, l), c) in coords {
            let key = Reducer::legged_key(&l);
            groups.entry((v, key)).or_default().push((l, c));
        }
        let empty = Arc::new(Signature::empty());
        let mut out = Element::zero(star_sig.clone()).with_truncation(Some(max_degree));
        for ((v, key), entries) in groups {
            let s = self.solve(reducer, &key, label)?;
            let mut a = vec![C::zero(); s.star_basis.len()];
            for (l, c) in entries {
                a[s.index[&l]] = c;
            }
            let vac = v.embed(&empty)?;
            for (j, b) in s.star_basis.iter().enumerate() {
                let mut f = C::zero();
                for (i, ai) in a.iter().enumerate() {
                    if !ai.is_zero() && !num_traits::Zero::is_zero(&s.inverse[j][i]) {
                        f = f + ai.scale(&s.inverse[j][i]);
                    }
                }
                if !f.is_zero() {
                    out.add_diagram(&b.union(&vac)?.embed(&star_sig)?, f);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};
    use crate::diagram::{chords, strut, strut_between, wheel};

    #[test]
    fn chi_small_cases() {
        let sig = Signature::new(vec![
            Component::new(SkeletonKind::Star, "x"),
            Component::new(SkeletonKind::Star, "y"),
        ])
        .unwrap();
        let xy: Element = Element::from_diagram(&strut_between(&sig, "x", "y"));
        let r = chi(&xy, "x").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.terms().next().unwrap().1, &qi(1));
        let s: Element = Element::from_diagram(&strut("x"));
        let r = chi(&s, "x").unwrap();
        let chord: Element = Element::from_diagram(&chords(SkeletonKind::Interval, "x", 1));
        assert_eq!(r, chord);
        let w: Element = Element::from_diagram(&wheel("x", 3));
        let rc = chi_circle(&w, "x").unwrap();
        let total: Q = rc.terms().map(|(_, c)| c.clone()).sum();
        assert!(rc.len() <= 2);
        let _ = total;
    }

    #[test]
    fn two_struts_on_a_circle() {
        let s: Element = Element::from_diagram(&strut("x"));
        let s2 = crate::ops::disjoint_union(&s, &s).unwrap();
        let s2 = Element::from_terms(
            Arc::new(Signature::single(SkeletonKind::CircledStar, "x")),
            s2.terms().map(|(d, c)| (d.with_kind("x", SkeletonKind::CircledStar).unwrap(), c.clone())),
        );
        let c = chi_circle(&s2, "x").unwrap();
        // 16 of the 24 orders give parallel chords, 8 give crossed ones
        let sig = Arc::new(Signature::single(SkeletonKind::Circle, "x"));
        let mut parallel = Diagram::empty(sig.clone());
        let d: Vec<_> = (0..4).map(|_| parallel.fresh_dart()).collect();
        parallel.attach[0] = d.clone();
        parallel.connect(d[0], d[1]);
        parallel.connect(d[2], d[3]);
        let mut crossed = parallel.clone();
        crossed.connect(d[0], d[2]);
        crossed.connect(d[1], d[3]);
        assert_eq!(c.coeff(&parallel), q(2, 3));
        assert_eq!(c.coeff(&crossed), q(1, 3));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn round_trip_through_quotient() {
        let reducer = Reducer::new(4, None).unwrap();
        let inv = ChiInverter::new();
        let x = Arc::new(Signature::star("x"));
        for deg in 0..=3 {
            for counts in crate::diagram::star_count_vectors(&x, deg) {
                let b = reducer.block(&BlockKey { sig: x.clone(), degree: deg, counts }).unwrap();
                for d in b.basis() {
                    let e: Element = Element::from_diagram(d);
                    let back = inv.invert(&reducer, &chi(&e, "x").unwrap(), "x", 4).unwrap();
                    assert!(reducer.equal_mod_relations(&back, &e, 4).unwrap().equal, "degree {deg}");
                }
            }
        }
        let chord: Element = Element::from_diagram(&chords(SkeletonKind::Interval, "x", 1));
        let s = inv.invert(&reducer, &chord, "x", 4).unwrap();
        let strut_el: Element = Element::from_diagram(&strut("x"));
        assert_eq!(s, strut_el.with_truncation(Some(4)));
        let two: Element = Element::from_diagram(&chords(SkeletonKind::Interval, "x", 2));
        let s2 = inv.invert(&reducer, &two, "x", 4).unwrap();
        assert!(reducer.equal_mod_relations(&chi(&s2, "x").unwrap(), &two, 4).unwrap().equal);
        let _ = q(1, 2);
    }
}
