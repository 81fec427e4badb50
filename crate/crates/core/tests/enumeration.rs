//! Enumeration against an independent generator: every perfect matching of the darts of a fixed
//! set of vertices and legs, canonicalized and deduplicated.

use std::collections::BTreeSet;
use std::sync::Arc;

use wheelkit::diagram::{canonicalize, enumerate_classes, star_count_vectors, Component, Dart, Sign};
use wheelkit::{Diagram, DiagramBuilder, Signature, SkeletonKind};

fn matchings(darts: &[Dart], acc: &mut Vec<(Dart, Dart)>, visit: &mut impl FnMut(&[(Dart, Dart)])) {
    let Some((&first, rest)) = darts.split_first() else {
        visit(acc);
        return;
    };
    for i in 0..rest.len() {
        let mut remaining = rest.to_vec();
        let other = remaining.remove(i);
        acc.push((first, other));
        matchings(&remaining, acc, visit);
        acc.pop();
    }
}

/// Union-find over darts; every component must reach a leg.
fn every_component_has_a_leg(n_vertices: usize, legs: &[Dart], edges: &[(Dart, Dart)]) -> bool {
    let n = 3 * n_vertices + legs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    fn join(a: usize, b: usize, p: &mut [usize]) {
        let (ra, rb) = (find(p, a), find(p, b));
        p[ra] = rb;
    }
    for v in 0..n_vertices {
        join(3 * v, 3 * v + 1, &mut parent);
        join(3 * v, 3 * v + 2, &mut parent);
    }
    for &(a, b) in edges {
        join(a as usize, b as usize, &mut parent);
    }
    let leg_roots: BTreeSet<usize> = legs.iter().map(|&l| find(&mut parent, l as usize)).collect();
    (0..n).all(|x| leg_roots.contains(&find(&mut parent, x)))
}

/// All classes with `n_vertices` internal vertices and `legs[i]` legs on component `i`.
fn oracle(sig: &Signature, n_vertices: usize, legs: &[usize]) -> BTreeSet<(Diagram, bool)> {
    // darts 0..3v are vertex darts, then legs in component order
    let mut leg_darts = Vec::new();
    let mut next = 3 * n_vertices as Dart;
    let mut owner = Vec::new();
    for (c, &k) in legs.iter().enumerate() {
        for _ in 0..k {
            leg_darts.push(next);
            owner.push(c);
            next += 1;
        }
    }
    let all: Vec<Dart> = (0..next).collect();
    let mut out = BTreeSet::new();
    matchings(&all, &mut Vec::new(), &mut |m| {
        if !every_component_has_a_leg(n_vertices, &leg_darts, m) {
            return;
        }
        let mut b = DiagramBuilder::new(sig.clone());
        let mut map = Vec::new();
        for _ in 0..n_vertices {
            map.extend(b.vertex());
        }
        for &c in &owner {
            map.push(b.leg(&sig.comps()[c].label).unwrap());
        }
        for &(a, c) in m {
            b.edge(map[a as usize], map[c as usize]);
        }
        let s = canonicalize(&b.finish().unwrap());
        out.insert((s.diagram, s.sign == Sign::Zero));
    });
    out
}

fn check(sig: Signature, max_degree: usize) {
    let arc = Arc::new(sig.clone());
    for degree in 0..=max_degree {
        for counts in star_count_vectors(&sig, degree) {
            let enumerated: BTreeSet<(Diagram, bool)> =
                enumerate_classes(&arc, degree, &counts).into_iter().map(|c| (c.diagram, c.zero)).collect();
            let star_legs: usize = counts.iter().sum();
            let mut expected = BTreeSet::new();
            // legs on one-manifold components range freely
            let free: Vec<usize> = (0..sig.len()).filter(|&i| !sig.comps()[i].kind.is_star()).collect();
            // degree is half the number of vertices and legs
            for extra in 0..=2 * degree - star_legs {
                let n_vertices = 2 * degree - star_legs - extra;
                for dist in distributions(extra, free.len()) {
                    let mut legs = counts.clone();
                    for (j, &i) in free.iter().enumerate() {
                        legs[i] = dist[j];
                    }
                    expected.extend(oracle(&sig, n_vertices, &legs));
                }
            }
            assert_eq!(enumerated, expected, "{sig} degree {degree} counts {counts:?}");
        }
    }
}

fn distributions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in distributions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn star_through_degree_3() {
    check(Signature::star("x"), 3);
}

#[test]
fn interval_through_degree_3() {
    check(Signature::single(SkeletonKind::Interval, "z"), 3);
}

#[test]
fn circle_through_degree_3() {
    check(Signature::single(SkeletonKind::Circle, "c"), 3);
}

#[test]
fn two_stars_through_degree_2() {
    let sig = Signature::new(vec![Component::new(SkeletonKind::Star, "x"), Component::new(SkeletonKind::Star, "y")]);
    check(sig.unwrap(), 2);
}
