//! Pull-back of skeleton diagrams along coverings of an interval or circle.

use std::sync::Arc;

use crate::coeff::Coeff;
use crate::diagram::{Component, Diagram, SkeletonKind};
use crate::element::Element;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cover {
    /// `x` is replaced by copies with these labels, each carrying its legs in the old order
    Disconnected(Vec<String>),
    /// the connected `n`-fold cover of a circle; the label is kept
    Connected(usize),
}

/// Sum over all lifts of the `label` legs along the covering.
pub fn pullback_cover<C: Coeff>(e: &Element<C>, label: &str, cover: &Cover) -> Result<Element<C>> {
    let li = e.sig().require(label)?;
    let kind = e.sig().comps()[li].kind;
    if !kind.is_one_manifold() {
        return Err(Error::Precondition(format!("{label:?} is not an interval or circle")));
    }
    match cover {
        Cover::Disconnected(labels) => {
            let mut sig = e.sig().without(label);
            for l in labels {
                sig = sig.with_component(Component::new(kind, l.as_str()))?;
            }
            let sig = Arc::new(sig);
            e.map(sig.clone(), |d| {
                let mut out = Element::zero(sig.clone());
                let legs = d.attach(li).to_vec();
                for choice in assignments(legs.len(), labels.len()) {
                    let mut t = Diagram::empty(sig.clone());
                    t.vertices = d.vertices.clone();
                    t.partner = d.partner.clone();
                    t.loops = d.loops;
                    for (i, c) in d.sig().comps().iter().enumerate() {
                        if i != li {
                            t.attach[sig.require(&c.label)?] = d.attach(i).to_vec();
                        }
                    }
                    for (leg, &s) in legs.iter().zip(&choice) {
                        t.attach[sig.require(&labels[s])?].push(*leg);
                    }
                    out.add_diagram(&t, C::one());
                }
                Ok(out)
            })
        }
        Cover::Connected(n) => {
            if kind != SkeletonKind::Circle {
                return Err(Error::Precondition("a connected cover needs a circle".into()));
            }
            let n = *n;
            e.map(e.sig().clone(), |d| {
                let mut out = Element::zero(d.sig().clone());
                let legs = d.attach(li).to_vec();
                for choice in assignments(legs.len(), n) {
                    let mut order: Vec<(usize, usize)> = choice.iter().copied().zip(0..legs.len()).collect();
                    order.sort();
                    let mut t = d.clone();
                    t.attach[li] = order.iter().map(|&(_, p)| legs[p]).collect();
                    out.add_diagram(&t, C::one());
                }
                Ok(out)
            })
        }
    }
}

/// All maps from `k` items to `n` choices, in lexicographic order.
fn assignments(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(k)];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..n).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qi;
    use crate::diagram::chords;

    #[test]
    fn chord_on_circle_lifts_four_ways() {
        let c: Element = Element::from_diagram(&chords(SkeletonKind::Circle, "c", 1));
        let r = pullback_cover(&c, "c", &Cover::Disconnected(vec!["c1".into(), "c2".into()])).unwrap();
        let total: crate::coeff::Q = r.terms().map(|(_, x)| x.clone()).sum();
        assert_eq!(total, qi(4));
        // two chords on single copies plus the chord joining them, twice
        assert_eq!(r.len(), 3);
        let conn = pullback_cover(&c, "c", &Cover::Connected(2)).unwrap();
        let total: crate::coeff::Q = conn.terms().map(|(_, x)| x.clone()).sum();
        assert_eq!(total, qi(4));
    }

    #[test]
    fn connected_cover_needs_circle() {
        let c: Element = Element::from_diagram(&chords(SkeletonKind::Interval, "z", 1));
        assert!(pullback_cover(&c, "z", &Cover::Connected(2)).is_err());
    }
}
