//! Local relations. Antisymmetry is absorbed by canonical signs, so the generated vectors are
//! IHX (in Jacobi form), STU and link relations.

use std::sync::Arc;

use super::enumerate::{enumerate_classes, star_count_vectors, vacuum_classes, DiagramClass};
use super::{Dart, Diagram, Role, Signature, SkeletonKind};
use crate::coeff::{qi, Q};
use crate::element::Element;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    As,
    Ihx,
    Stu,
    Link,
}

impl RelationKind {
    pub fn name(self) -> &'static str {
        match self {
            RelationKind::As => "AS",
            RelationKind::Ihx => "IHX",
            RelationKind::Stu => "STU",
            RelationKind::Link => "LINK",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RelationVector {
    pub kind: RelationKind,
    pub element: Element<Q>,
    pub site: String,
}

/// The three terms of the Jacobi form of IHX at the internal edge `(du, dv)`; they sum to zero.
pub(crate) fn ihx_terms(d: &Diagram, du: Dart, dv: Dart) -> Option<[Diagram; 3]> {
    let roles = d.roles();
    let (u, su) = match roles[du as usize] {
        Role::Vertex { vertex, slot } => (vertex, slot),
        _ => return None,
    };
    let (v, sv) = match roles[dv as usize] {
        Role::Vertex { vertex, slot } => (vertex, slot),
        _ => return None,
    };
    if u == v {
        return None;
    }
    let ru = d.vertices[u];
    let rv = d.vertices[v];
    let p = ru[(su + 1) % 3];
    let outer = [ru[(su + 2) % 3], rv[(sv + 1) % 3], rv[(sv + 2) % 3]];
    let term = |k: usize| {
        let mut t = d.clone();
        t.vertices[u] = [du, p, outer[k]];
        t.vertices[v] = [dv, outer[(k + 1) % 3], outer[(k + 2) % 3]];
        t
    };
    Some([term(0), term(1), term(2)])
}

/// Resolves the vertex whose slot `stem` joins a leg on an interval or circle. Returns
/// `(T, U)` with `S = T - U`, where for the rotation `(stem, a, b)` the diagram `T` has the
/// `a` leg before the `b` leg.
pub(crate) fn stu_resolve(d: &Diagram, w: usize, slot: usize) -> Option<(Diagram, Diagram)> {
    let rot = d.vertices[w];
    let stem = rot[slot];
    let leg = d.partner(stem);
    let roles = d.roles();
    let (comp, pos) = match roles[leg as usize] {
        Role::Leg { comp, pos } if d.sig.comps()[comp].kind.is_one_manifold() => (comp, pos),
        _ => return None,
    };
    let a = rot[(slot + 1) % 3];
    let b = rot[(slot + 2) % 3];
    let make = |first: Dart, second: Dart| {
        let mut t = d.clone();
        t.vertices.remove(w);
        let legs = &mut t.attach[comp];
        legs.splice(pos..=pos, [first, second]);
        t
    };
    Some((make(a, b), make(b, a)))
}

/// Attaches leg `l` (on a circled star) to the edge ending at leg `m` through a new vertex
/// oriented (inner side, attached edge, leg side).
pub(crate) fn link_attach(d: &Diagram, comp: usize, l: Dart, m: Dart) -> Diagram {
    let mut t = d.clone();
    let e = t.partner(l);
    let pm = t.partner(m);
    t.attach[comp].retain(|&x| x != l);
    let w = [t.fresh_dart(), t.fresh_dart(), t.fresh_dart()];
    t.vertices.push(w);
    t.connect(w[0], pm);
    t.connect(w[1], e);
    t.connect(w[2], m);
    t
}

fn relation(kind: RelationKind, sig: &Arc<Signature>, site: String, terms: Vec<(Diagram, Q)>) -> Option<RelationVector> {
    let element = Element::from_terms(sig.clone(), terms);
    if element.is_zero() {
        None
    } else {
        Some(RelationVector { kind, element, site })
    }
}

/// IHX and STU relations whose terms are the given diagrams' neighbors.
pub(crate) fn local_relations(d: &Diagram, out: &mut Vec<RelationVector>) {
    let sig = d.sig.clone();
    let roles = d.roles();
    for (u, rot) in d.vertices.iter().enumerate() {
        for (slot, &du) in rot.iter().enumerate() {
            let dv = d.partner(du);
            match roles[dv as usize] {
                Role::Vertex { vertex, .. } if vertex != u && du < dv => {
                    if let Some([a, b, c]) = ihx_terms(d, du, dv) {
                        let site = format!("IHX at edge ({du},{dv})");
                        out.extend(relation(
                            RelationKind::Ihx,
                            &sig,
                            site,
                            vec![(a, qi(1)), (b, qi(1)), (c, qi(1))],
                        ));
                    }
                }
                Role::Leg { comp, .. } if sig.comps()[comp].kind.is_one_manifold() => {
                    if let Some((t, uu)) = stu_resolve(d, u, slot) {
                        let site = format!("STU at vertex {u}");
                        out.extend(relation(
                            RelationKind::Stu,
                            &sig,
                            site,
                            vec![(d.clone(), qi(1)), (t, qi(-1)), (uu, qi(1))],
                        ));
                    }
                }
                _ => {}
            }
        }
    }
}

/// Link relations with distinguished legs taken from `d` on each circled-star component.
pub(crate) fn link_relations(d: &Diagram, out: &mut Vec<RelationVector>) {
    let sig = d.sig.clone();
    for (comp, c) in sig.comps().iter().enumerate() {
        if c.kind != SkeletonKind::CircledStar {
            continue;
        }
        let legs = d.attach[comp].clone();
        for &l in &legs {
            let terms: Vec<(Diagram, Q)> = legs
                .iter()
                .filter(|&&m| m != l && m != d.partner(l))
                .map(|&m| (link_attach(d, comp, l, m), qi(1)))
                .collect();
            if terms.is_empty() {
                continue;
            }
            let site = format!("LINK on {} at leg {l}", c.label);
            out.extend(relation(RelationKind::Link, &sig, site, terms));
        }
    }
}

/// Relations of one block: all classes with these star leg counts (plus link parameter
/// diagrams with one more leg on a circled star).
pub(crate) fn block_relations(
    sig: &Arc<Signature>,
    degree: usize,
    counts: &[usize],
    classes: &[DiagramClass],
) -> Vec<RelationVector> {
    let mut out = Vec::new();
    for c in classes {
        local_relations(&c.diagram, &mut out);
    }
    for (comp, c) in sig.comps().iter().enumerate() {
        if c.kind != SkeletonKind::CircledStar {
            continue;
        }
        let mut up = counts.to_vec();
        up[comp] += 1;
        // zero classes still carry valid link relations
        for p in enumerate_classes(sig, degree, &up) {
            let mut rels = Vec::new();
            link_relations(&p.diagram, &mut rels);
            // only the vectors coming from this component land in this block
            out.extend(rels.into_iter().filter(|r| r.site.starts_with(&format!("LINK on {} ", c.label))));
        }
    }
    out
}

/// Every relation vector of the given degree on `sig` (legged diagrams; vacuum diagrams when the
/// signature is empty).
pub fn generate_relations(degree: usize, sig: &Signature) -> Vec<RelationVector> {
    let sig = Arc::new(sig.clone());
    if sig.is_empty() {
        let classes = vacuum_classes(degree);
        let mut out = Vec::new();
        for c in &classes {
            local_relations(&c.diagram, &mut out);
        }
        return out;
    }
    let mut out = Vec::new();
    for counts in star_count_vectors(&sig, degree) {
        let classes = enumerate_classes(&sig, degree, &counts);
        out.extend(block_relations(&sig, degree, &counts, &classes));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{chords, DiagramBuilder};

    #[test]
    fn stu_on_single_chord_interval() {
        // a Y with its stem on the interval and two legs on the interval
        let sig = Signature::single(SkeletonKind::Interval, "z");
        let mut b = DiagramBuilder::new(sig);
        let l0 = b.leg("z").unwrap();
        let l1 = b.leg("z").unwrap();
        let l2 = b.leg("z").unwrap();
        let w = b.vertex();
        b.edge(w[0], l0);
        b.edge(w[1], l1);
        b.edge(w[2], l2);
        let y = b.finish().unwrap();
        let (t, u) = stu_resolve(&y, 0, 0).unwrap();
        assert_eq!(t.num_legs(), 4);
        assert_eq!(u.num_legs(), 4);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn link_omitted_with_single_leg() {
        let sig = Signature::new(vec![
            super::super::Component::new(SkeletonKind::CircledStar, "y"),
            super::super::Component::new(SkeletonKind::Star, "x"),
        ])
        .unwrap();
        let d = super::super::strut_between(&sig, "x", "y");
        let mut out = Vec::new();
        link_relations(&d, &mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn chords_have_no_relations_of_their_own() {
        let mut out = Vec::new();
        local_relations(&chords(SkeletonKind::Interval, "z", 2), &mut out);
        assert!(out.is_empty());
    }
}
