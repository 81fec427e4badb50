//! Enumeration of diagrams by degree.
//!
//! Graphs are generated node by node: legs first, then internal vertices, each node filling
//! its free slots with partners of equal or larger index in nondecreasing order. Among nodes
//! that are still untouched and interchangeable (legs of one star label, internal vertices)
//! only the first may be chosen. Results are deduplicated by canonical form.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{canonicalize, Dart, Diagram, Signature, Sign, UnionFind};

/// A canonical diagram together with whether antisymmetry kills it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramClass {
    pub diagram: Diagram,
    pub zero: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Want {
    /// every connected component has at least one leg
    Legged,
    /// no legs at all
    Vacuum,
}

struct Layout {
    /// per node: (comp, is_vertex)
    valence: Vec<u8>,
    class: Vec<usize>,
    interchangeable: Vec<bool>,
    /// comp of each leg node, in attachment order
    leg_comp: Vec<usize>,
}

struct Gen<'a> {
    layout: &'a Layout,
    rem: Vec<u8>,
    touched: Vec<bool>,
    edges: Vec<(usize, usize)>,
    emit: &'a mut dyn FnMut(&[(usize, usize)]),
}

impl Gen<'_> {
    fn run(&mut self, u: usize, min_w: usize) {
        let n = self.rem.len();
        if u == n {
            let edges = self.edges.clone();
            (self.emit)(&edges);
            return;
        }
        if self.rem[u] == 0 {
            self.run(u + 1, u + 1);
            return;
        }
        let start = min_w.max(u);
        for w in start..n {
            if w == u {
                if self.layout.valence[u] != 3 || self.rem[u] < 2 {
                    continue;
                }
            } else if self.rem[w] == 0 {
                continue;
            }
            if w != u && !self.touched[w] && self.layout.interchangeable[w] {
                let cls = self.layout.class[w];
                if (u + 1..w).any(|x| self.layout.class[x] == cls && !self.touched[x]) {
                    continue;
                }
            }
            let saved = (self.touched[u], self.touched[w]);
            self.rem[u] -= 1;
            self.rem[w] -= 1;
            self.touched[u] = true;
            self.touched[w] = true;
            self.edges.push((u, w));
            self.run(u, w);
            self.edges.pop();
            self.touched[u] = saved.0;
            self.touched[w] = saved.1;
            self.rem[u] += 1;
            self.rem[w] += 1;
        }
    }
}

fn build(sig: &Arc<Signature>, layout: &Layout, edges: &[(usize, usize)]) -> Diagram {
    let n_legs = layout.leg_comp.len();
    let n_nodes = layout.valence.len();
    let mut d = Diagram::empty(sig.clone());
    let mut slots: Vec<Vec<Dart>> = Vec::with_capacity(n_nodes);
    for &comp in &layout.leg_comp {
        let dart = d.fresh_dart();
        d.attach[comp].push(dart);
        slots.push(vec![dart]);
    }
    for _ in n_legs..n_nodes {
        let rot = [d.fresh_dart(), d.fresh_dart(), d.fresh_dart()];
        d.vertices.push(rot);
        slots.push(rot.to_vec());
    }
    let mut next = vec![0usize; n_nodes];
    for &(a, b) in edges {
        let da = slots[a][next[a]];
        next[a] += 1;
        let db = slots[b][next[b]];
        next[b] += 1;
        d.connect(da, db);
    }
    d
}

fn components_ok(layout: &Layout, edges: &[(usize, usize)], want: Want) -> bool {
    let n = layout.valence.len();
    let n_legs = layout.leg_comp.len();
    match want {
        Want::Vacuum => n_legs == 0,
        Want::Legged => {
            let mut uf = UnionFind::new(n);
            for &(a, b) in edges {
                uf.union(a, b);
            }
            let mut has_leg = vec![false; n];
            for i in 0..n_legs {
                has_leg[uf.find(i)] = true;
            }
            (0..n).all(|i| has_leg[uf.find(i)])
        }
    }
}

fn generate(
    sig: &Arc<Signature>,
    leg_comp: Vec<usize>,
    n_vertices: usize,
    want: Want,
    prune: bool,
    out: &mut BTreeMap<Diagram, bool>,
) {
    let n_legs = leg_comp.len();
    let mut valence = vec![1u8; n_legs];
    valence.extend(std::iter::repeat_n(3, n_vertices));
    let mut class = Vec::new();
    let mut interchangeable = Vec::new();
    for (i, &c) in leg_comp.iter().enumerate() {
        if sig.comps()[c].kind.is_star() {
            class.push(c);
            interchangeable.push(prune);
        } else {
            class.push(usize::MAX - 1 - i);
            interchangeable.push(false);
        }
    }
    for _ in 0..n_vertices {
        class.push(usize::MAX);
        interchangeable.push(prune);
    }
    let layout = Layout { valence: valence.clone(), class, interchangeable, leg_comp };
    let mut emit = |edges: &[(usize, usize)]| {
        if !components_ok(&layout, edges, want) {
            return;
        }
        let d = build(sig, &layout, edges);
        let c = canonicalize(&d);
        out.entry(c.diagram).or_insert(c.sign == Sign::Zero);
    };
    let mut g = Gen {
        layout: &layout,
        rem: valence,
        touched: vec![false; layout.valence.len()],
        edges: Vec::new(),
        emit: &mut emit,
    };
    g.run(0, 0);
}

/// All ways to distribute `total` legs over `slots` ordered components.
fn compositions(total: usize, slots: usize) -> Vec<Vec<usize>> {
    if slots == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, slots - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn classes_impl(
    sig: &Arc<Signature>,
    degree: usize,
    star_counts: &[usize],
    want: Want,
    prune: bool,
) -> Vec<DiagramClass> {
    let comps = sig.comps();
    assert_eq!(star_counts.len(), comps.len());
    let star_total: usize =
        comps.iter().zip(star_counts).filter(|(c, _)| c.kind.is_star()).map(|(_, &k)| k).sum();
    let manifold: Vec<usize> = (0..comps.len()).filter(|&i| comps[i].kind.is_one_manifold()).collect();
    let mut out = BTreeMap::new();
    if want == Want::Vacuum && (!sig.is_empty() || degree == 0) {
        if degree == 0 {
            out.insert(Diagram::empty(sig.clone()), false);
        }
    } else {
        for legs in star_total..=2 * degree {
            let n_vertices = 2 * degree - legs;
            for dist in compositions(legs - star_total, manifold.len()) {
                let mut leg_comp = Vec::with_capacity(legs);
                for (i, c) in comps.iter().enumerate() {
                    let k = if c.kind.is_star() {
                        star_counts[i]
                    } else {
                        dist[manifold.iter().position(|&m| m == i).expect("manifold comp")]
                    };
                    leg_comp.extend(std::iter::repeat_n(i, k));
                }
                generate(sig, leg_comp, n_vertices, want, prune, &mut out);
            }
        }
    }
    let mut v: Vec<DiagramClass> =
        out.into_iter().map(|(diagram, zero)| DiagramClass { diagram, zero }).collect();
    // more internal vertices first, so that such diagrams are eliminated in favor of legged ones
    v.sort_by(|a, b| {
        b.diagram.num_vertices().cmp(&a.diagram.num_vertices()).then_with(|| a.diagram.cmp(&b.diagram))
    });
    v
}

/// Canonical classes of degree `degree` on `sig` whose components all carry legs, with the given
/// leg count on each star-like component (entries for intervals and circles are ignored).
/// Classes killed by antisymmetry are included and flagged.
pub fn enumerate_classes(sig: &Arc<Signature>, degree: usize, star_counts: &[usize]) -> Vec<DiagramClass> {
    classes_impl(sig, degree, star_counts, Want::Legged, true)
}

/// Canonical classes of vacuum diagrams (empty skeleton) of the given degree.
pub fn vacuum_classes(degree: usize) -> Vec<DiagramClass> {
    let sig = Arc::new(Signature::empty());
    classes_impl(&sig, degree, &[], Want::Vacuum, true)
}

/// The same classes as [`enumerate_classes`], generated without symmetry pruning.
pub fn brute_force_classes(sig: &Arc<Signature>, degree: usize, star_counts: &[usize]) -> Vec<DiagramClass> {
    classes_impl(sig, degree, star_counts, Want::Legged, false)
}

/// Every star-leg count vector compatible with the degree.
pub fn star_count_vectors(sig: &Signature, degree: usize) -> Vec<Vec<usize>> {
    let stars: Vec<usize> = (0..sig.len()).filter(|&i| sig.comps()[i].kind.is_star()).collect();
    let mut out = Vec::new();
    for total in 0..=2 * degree {
        for dist in compositions(total, stars.len()) {
            let mut v = vec![0; sig.len()];
            for (k, &i) in stars.iter().enumerate() {
                v[i] = dist[k];
            }
            out.push(v);
        }
    }
    out
}

/// All nonzero canonical diagrams of exactly this degree on `sig`, including those with vacuum
/// components.
pub fn enumerate_diagrams(degree: usize, sig: &Signature) -> Vec<Diagram> {
    let sig = Arc::new(sig.clone());
    let mut out = BTreeMap::new();
    for vac_deg in 0..=degree {
        let vac: Vec<Diagram> =
            vacuum_classes(vac_deg).into_iter().filter(|c| !c.zero).map(|c| c.diagram).collect();
        if vac.is_empty() {
            continue;
        }
        let legged_deg = degree - vac_deg;
        for counts in star_count_vectors(&sig, legged_deg) {
            for c in enumerate_classes(&sig, legged_deg, &counts) {
                if c.zero {
                    continue;
                }
                for v in &vac {
                    let u = c.diagram.union(v).expect("vacuum part has no labels");
                    let cu = canonicalize(&u);
                    if cu.sign != Sign::Zero {
                        out.insert(cu.diagram, ());
                    }
                }
            }
        }
    }
    out.into_keys().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{SkeletonKind, Component};

    fn nonzero(v: &[DiagramClass]) -> usize {
        v.iter().filter(|c| !c.zero).count()
    }

    #[test]
    fn low_degree_counts() {
        let x = Arc::new(Signature::star("x"));
        assert_eq!(nonzero(&enumerate_classes(&x, 0, &[0])), 1);
        assert_eq!(nonzero(&enumerate_classes(&x, 1, &[2])), 1);
        assert_eq!(nonzero(&enumerate_classes(&x, 1, &[1])), 0);
        // degree 2: strut^2 and the wheel with two spokes
        assert_eq!(nonzero(&enumerate_classes(&x, 2, &[4])), 1);
        assert_eq!(nonzero(&enumerate_classes(&x, 2, &[2])), 1);
        assert_eq!(nonzero(&vacuum_classes(1)), 1);
    }

    #[test]
    fn pruned_matches_unpruned() {
        let sigs = [
            Signature::star("x"),
            Signature::single(SkeletonKind::Interval, "z"),
            Signature::new(vec![
                Component::new(SkeletonKind::Interval, "z"),
                Component::new(SkeletonKind::Star, "x"),
            ])
            .unwrap(),
        ];
        for sig in sigs {
            let sig = Arc::new(sig);
            for deg in 0..=3 {
                for counts in star_count_vectors(&sig, deg) {
                    let a = enumerate_classes(&sig, deg, &counts);
                    let b = brute_force_classes(&sig, deg, &counts);
                    assert_eq!(a, b, "{sig} degree {deg} counts {counts:?}");
                }
            }
        }
    }

    #[test]
    fn full_enumeration_includes_vacuum_products() {
        let x = Signature::star("x");
        let d1 = enumerate_diagrams(1, &x);
        // strut and theta
        assert_eq!(d1.len(), 2);
    }
}
