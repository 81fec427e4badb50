//! Gluing legs: differential operators, the inner product, and the coproduct.
//!
//! All of these are sums over leg matchings. They are expanded one leg at a time with the
//! partial results canonicalized and merged after every step, so symmetric choices are
//! counted once with a multiplicity instead of being enumerated separately.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{add_canon, expand, single};
use crate::coeff::{Coeff, Q};
use crate::diagram::{Component, Diagram, Signature};
use crate::element::Element;
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// all legs of `c` to some legs of `d`; the rest of `d` keeps its label
    Diffop,
    /// all legs to all legs; the label disappears
    Inner,
}

fn with_label(d: &Diagram, label: &str) -> Result<Diagram> {
    if d.sig().index_of(label).is_some() {
        Ok(d.clone())
    } else {
        d.add_component(Component::new(crate::diagram::SkeletonKind::Star, label))
    }
}

fn glue_diagrams(c: &Diagram, d: &Diagram, labels: &[&str], mode: Mode) -> Result<BTreeMap<Diagram, Q>> {
    let mut c = c.clone();
    let mut d = d.clone();
    let mut names = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        let (kc, kd) = (c.legs_on(l), d.legs_on(l));
        if (mode == Mode::Inner && kc != kd) || kc > kd {
            return Ok(BTreeMap::new());
        }
        let (nc, nd) = (format!("#c{i}"), format!("#d{i}"));
        c = with_label(&c, l)?.relabel(l, &nc)?;
        d = with_label(&d, l)?.relabel(l, &nd)?;
        names.push((nc, nd, kc));
    }
    let mut states = single(&c.union(&d)?);
    for (nc, nd, k) in &names {
        states = expand(states, *k, |s| {
            let ci = s.sig().index_of(nc).expect("glue label");
            let di = s.sig().index_of(nd).expect("glue label");
            let a = s.attach(ci)[0];
            s.attach(di)
                .iter()
                .map(|&b| {
                    let mut t = s.clone();
                    t.join_legs(a, b);
                    t
                })
                .collect()
        });
    }
    let mut out = BTreeMap::new();
    for (s, x) in states {
        let mut t = s;
        for ((nc, nd, _), l) in names.iter().zip(labels) {
            t = t.drop_component(nc)?;
            t = match mode {
                Mode::Inner => t.drop_component(nd)?,
                Mode::Diffop => t.relabel(nd, l)?,
            };
        }
        add_canon(&mut out, &t, &x);
    }
    Ok(out)
}

fn glue<C: Coeff>(c: &Element<C>, d: &Element<C>, labels: &[&str], mode: Mode) -> Result<Element<C>> {
    let mut cs: Signature = (**c.sig()).clone();
    let mut ds: Signature = (**d.sig()).clone();
    for l in labels {
        cs = cs.without(l);
        if mode == Mode::Inner {
            ds = ds.without(l);
        }
    }
    let sig = Arc::new(cs.merge(&ds)?);
    // gluing lowers degrees, so truncations of the inputs do not bound the output
    c.untruncated().bilinear(&d.untruncated(), sig.clone(), |a, b| {
        let m = glue_diagrams(a, b, labels, mode)?;
        let mut e = Element::zero(sig.clone());
        for (t, x) in m {
            e.add_diagram(&t.embed(&sig)?, C::from_q(x));
        }
        Ok(e)
    })
}

fn require_strutless<C: Coeff>(c: &Element<C>, label: &str) -> Result<()> {
    if let Some((d, _)) = c.terms().find(|(d, _)| d.has_strut_on(label)) {
        return Err(Error::Precondition(format!(
            "gluing along {label:?} requires a strutless element, found {}",
            d.to_json_string()
        )));
    }
    Ok(())
}

/// The diagrammatic differential operator of `c` applied to `d`: the sum over all ways of
/// gluing every `label` leg of `c` to a distinct `label` leg of `d`.
pub fn apply_diffop<C: Coeff>(c: &Element<C>, d: &Element<C>, label: &str) -> Result<Element<C>> {
    require_strutless(c, label)?;
    glue(c, d, &[label], Mode::Diffop)
}

/// The sum over all bijections between the `label` legs of `c` and of `d`; zero when the
/// counts differ. The label is removed.
pub fn inner_product<C: Coeff>(c: &Element<C>, d: &Element<C>, label: &str) -> Result<Element<C>> {
    require_strutless(c, label)?;
    glue(c, d, &[label], Mode::Inner)
}

/// The inner product along several labels at once.
pub fn inner_product_labels<C: Coeff>(c: &Element<C>, d: &Element<C>, labels: &[&str]) -> Result<Element<C>> {
    for l in labels {
        require_strutless(c, l)?;
    }
    glue(c, d, labels, Mode::Inner)
}

/// The same full gluing with no strut restriction on either side. Glued struts close up into
/// free loops.
pub fn pair<C: Coeff>(c: &Element<C>, d: &Element<C>, label: &str) -> Result<Element<C>> {
    glue(c, d, &[label], Mode::Inner)
}

/// Replaces every `label` leg by a leg on one of `new_labels`, summed over all choices.
pub fn coproduct<C: Coeff>(e: &Element<C>, label: &str, new_labels: &[&str]) -> Result<Element<C>> {
    let i = e.sig().require(label)?;
    let kind = e.sig().comps()[i].kind;
    if !kind.is_star() {
        return Err(Error::Precondition(format!("coproduct along non-star label {label:?}")));
    }
    let mut sig = e.sig().without(label);
    for l in new_labels {
        sig = sig.with_component(Component::new(kind, *l))?;
    }
    let sig = Arc::new(sig);
    let tmp = "#x";
    e.map(sig.clone(), |d| {
        let mut start = d.relabel(label, tmp)?;
        for l in new_labels {
            start = start.add_component(Component::new(kind, *l))?;
        }
        let k = d.legs_on(label);
        let states = expand(single(&start), k, |s| {
            let src = s.sig().index_of(tmp).expect("coproduct label");
            let a = s.attach(src)[0];
            new_labels
                .iter()
                .map(|l| {
                    let mut t = s.clone();
                    t.move_leg(a, t.sig().index_of(l).expect("new label"));
                    t
                })
                .collect()
        });
        let mut out = Element::zero(sig.clone());
        for (s, x) in states {
            out.add_diagram(&s.drop_component(tmp)?.embed(&sig)?, C::from_q(x));
        }
        Ok(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qi;
    use crate::diagram::{strut, wheel, DiagramBuilder};
    use crate::ops::disjoint_union;
    use num_traits::Signed;

    fn el(d: &Diagram) -> Element {
        Element::from_diagram(d)
    }

    #[test]
    fn diffop_examples() {
        assert!(apply_diffop(&el(&wheel("x", 4)), &el(&wheel("x", 2)), "x").unwrap().is_zero());
        let one: Element = Element::one(Arc::new(Signature::star("x")));
        let w = el(&wheel("x", 4));
        assert_eq!(apply_diffop(&one, &w, "x").unwrap(), w);
        assert!(apply_diffop(&el(&strut("x")), &w, "x").is_err());
    }

    #[test]
    fn wheel_on_wheel_multiplicities() {
        let r = apply_diffop(&el(&wheel("x", 2)), &el(&wheel("x", 4)), "x").unwrap();
        let mut coeffs: Vec<Q> = r.terms().map(|(_, c)| c.clone().abs()).collect();
        coeffs.sort();
        assert_eq!(coeffs, vec![qi(4), qi(8)]);
        for (d, _) in r.terms() {
            assert_eq!(d.legs_on("x"), 2);
            assert_eq!(d.num_vertices(), 6);
        }
    }

    #[test]
    fn inner_products() {
        let s = el(&strut("x"));
        assert!(inner_product(&el(&wheel("x", 4)), &s, "x").unwrap().is_zero());
        let ss = pair(&s, &s, "x").unwrap();
        assert_eq!(ss.len(), 1);
        let (d, c) = ss.terms().next().unwrap();
        assert_eq!(c, &qi(2));
        assert_eq!(d.loops(), 1);
        assert!(d.sig().is_empty());
        let ww = inner_product(&el(&wheel("x", 2)), &el(&wheel("x", 2)), "x").unwrap();
        assert_eq!(ww.len(), 1);
        let (d, c) = ww.terms().next().unwrap();
        assert_eq!(c.abs(), qi(2));
        assert_eq!(d.degree(), 2);
    }

    #[test]
    fn coproduct_of_strut() {
        let s = el(&strut("x"));
        let r = coproduct(&s, "x", &["x1", "x2"]).unwrap();
        assert_eq!(r.len(), 3);
        let sig = r.sig().clone();
        let mut b = DiagramBuilder::with_sig(sig);
        let a = b.leg("x1").unwrap();
        let c = b.leg("x2").unwrap();
        b.edge(a, c);
        assert_eq!(r.coeff(&b.finish().unwrap()), qi(2));
        let one: Element = Element::one(s.sig().clone());
        assert_eq!(coproduct(&one, "x", &["x1", "x2"]).unwrap().len(), 1);
    }

    #[test]
    fn composition_law() {
        let c1 = el(&wheel("x", 2));
        let c2 = el(&wheel("x", 2));
        let mut d = el(&wheel("x", 4));
        d.add_scaled(&disjoint_union(&el(&wheel("x", 2)), &el(&wheel("x", 2))).unwrap(), &qi(3));
        let lhs = apply_diffop(&disjoint_union(&c1, &c2).unwrap(), &d, "x").unwrap();
        let rhs = apply_diffop(&c1, &apply_diffop(&c2, &d, "x").unwrap(), "x").unwrap();
        assert_eq!(lhs, rhs);
    }
}
