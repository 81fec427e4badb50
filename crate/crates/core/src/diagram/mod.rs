//! Jacobi diagrams: uni-trivalent graphs with vertex orientations, glued to a skeleton of
//! intervals, circles and (circled) asterisks.
//!
//! A diagram is stored at the level of darts (half-edges). Every dart belongs to exactly one
//! internal vertex slot or is a leg attached to one skeleton component, and every dart has
//! exactly one partner. The cyclic orientation of an internal vertex is the order of its
//! stored triple.

mod canon;
mod enumerate;
mod json;
pub(crate) mod relations;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use canon::{canonicalize, Sign, SignedDiagram};
pub use enumerate::{
    brute_force_classes, enumerate_classes, enumerate_diagrams, star_count_vectors, vacuum_classes, DiagramClass,
};
pub use relations::{generate_relations, RelationKind, RelationVector};

pub type Dart = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SkeletonKind {
    Interval,
    Circle,
    Star,
    CircledStar,
}

impl SkeletonKind {
    pub fn name(self) -> &'static str {
        match self {
            SkeletonKind::Interval => "interval",
            SkeletonKind::Circle => "circle",
            SkeletonKind::Star => "star",
            SkeletonKind::CircledStar => "circledstar",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "interval" => SkeletonKind::Interval,
            "circle" => SkeletonKind::Circle,
            "star" => SkeletonKind::Star,
            "circledstar" => SkeletonKind::CircledStar,
            other => return Err(Error::Parse(format!("unknown skeleton kind {other:?}"))),
        })
    }

    /// Legs on a star-like component carry no order.
    pub fn is_star(self) -> bool {
        matches!(self, SkeletonKind::Star | SkeletonKind::CircledStar)
    }

    pub fn is_one_manifold(self) -> bool {
        !self.is_star()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    pub kind: SkeletonKind,
    pub label: String,
}

impl Component {
    pub fn new(kind: SkeletonKind, label: impl Into<String>) -> Self {
        Component { kind, label: label.into() }
    }
}

/// The skeleton of a diagram space: components sorted by label, labels unique.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Signature {
    comps: Vec<Component>,
}

impl Signature {
    pub fn new(mut comps: Vec<Component>) -> Result<Self> {
        comps.sort_by(|a, b| a.label.cmp(&b.label));
        for w in comps.windows(2) {
            if w[0].label == w[1].label {
                return Err(Error::Signature(format!("repeated label {:?}", w[0].label)));
            }
        }
        Ok(Signature { comps })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn star(label: &str) -> Self {
        Signature { comps: vec![Component::new(SkeletonKind::Star, label)] }
    }

    pub fn single(kind: SkeletonKind, label: &str) -> Self {
        Signature { comps: vec![Component::new(kind, label)] }
    }

    pub fn comps(&self) -> &[Component] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.comps.binary_search_by(|c| c.label.as_str().cmp(label)).ok()
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn kind_of(&self, label: &str) -> Option<SkeletonKind> {
        self.index_of(label).map(|i| self.comps[i].kind)
    }

    /// Union of two signatures; a label present in both must have the same star-like kind.
    pub fn merge(&self, other: &Signature) -> Result<Signature> {
        let mut comps = self.comps.clone();
        for c in &other.comps {
            match self.index_of(&c.label) {
                Some(i) => {
                    let mine = &self.comps[i];
                    if mine.kind != c.kind || !c.kind.is_star() {
                        return Err(Error::Signature(format!(
                            "cannot merge component {:?} of kinds {} and {}",
                            c.label,
                            mine.kind.name(),
                            c.kind.name()
                        )));
                    }
                }
                None => comps.push(c.clone()),
            }
        }
        Signature::new(comps)
    }

    pub fn with_component(&self, comp: Component) -> Result<Signature> {
        let mut comps = self.comps.clone();
        comps.push(comp);
        Signature::new(comps)
    }

    pub fn without(&self, label: &str) -> Signature {
        Signature { comps: self.comps.iter().filter(|c| c.label != label).cloned().collect() }
    }

    pub fn with_kind(&self, label: &str, kind: SkeletonKind) -> Result<Signature> {
        let i = self.require(label)?;
        let mut comps = self.comps.clone();
        comps[i].kind = kind;
        Ok(Signature { comps })
    }

    pub fn labels_of_kind(&self, kind: SkeletonKind) -> Vec<String> {
        self.comps.iter().filter(|c| c.kind == kind).map(|c| c.label.clone()).collect()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.comps.iter().map(|c| format!("{}:{}", c.kind.name(), c.label)).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// The signature after renaming `from` to `to`, merging into an existing star-like `to`.
pub fn relabeled_signature(sig: &Signature, from: &str, to: &str) -> Result<Signature> {
    if from == to {
        return Ok(sig.clone());
    }
    let i = sig.require(from)?;
    let kind = sig.comps[i].kind;
    let rest = sig.without(from);
    match rest.kind_of(to) {
        Some(k) if k == kind && kind.is_star() => Ok(rest),
        Some(_) => Err(Error::Signature(format!("cannot relabel {from:?} onto existing {to:?}"))),
        None => rest.with_component(Component::new(kind, to)),
    }
}

/// Where a dart lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Leg { comp: usize, pos: usize },
    Vertex { vertex: usize, slot: usize },
    Unused,
}

/// A Jacobi diagram. Dart ids of a non-canonical diagram may have gaps; canonical diagrams are
/// compact, list legs first and store every rotation in ascending order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    pub(crate) sig: Arc<Signature>,
    pub(crate) attach: Vec<Vec<Dart>>,
    pub(crate) vertices: Vec<[Dart; 3]>,
    pub(crate) partner: Vec<Dart>,
    /// Closed loops without vertices (only produced by gluing struts together).
    pub(crate) loops: u32,
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json_string())
    }
}

impl Diagram {
    pub fn empty(sig: Arc<Signature>) -> Self {
        let n = sig.len();
        Diagram { sig, attach: vec![Vec::new(); n], vertices: Vec::new(), partner: Vec::new(), loops: 0 }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn vertices(&self) -> &[[Dart; 3]] {
        &self.vertices
    }

    pub fn attach(&self, comp: usize) -> &[Dart] {
        &self.attach[comp]
    }

    pub fn partner(&self, d: Dart) -> Dart {
        self.partner[d as usize]
    }

    pub fn loops(&self) -> u32 {
        self.loops
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_legs(&self) -> usize {
        self.attach.iter().map(Vec::len).sum()
    }

    pub fn legs_on(&self, label: &str) -> usize {
        self.sig.index_of(label).map_or(0, |i| self.attach[i].len())
    }

    /// Half the number of trivalent and univalent vertices.
    pub fn degree(&self) -> usize {
        (self.num_vertices() + self.num_legs()) / 2
    }

    pub fn roles(&self) -> Vec<Role> {
        let mut roles = vec![Role::Unused; self.partner.len()];
        for (comp, legs) in self.attach.iter().enumerate() {
            for (pos, &d) in legs.iter().enumerate() {
                roles[d as usize] = Role::Leg { comp, pos };
            }
        }
        for (v, rot) in self.vertices.iter().enumerate() {
            for (slot, &d) in rot.iter().enumerate() {
                roles[d as usize] = Role::Vertex { vertex: v, slot };
            }
        }
        roles
    }

    /// Checks the incidence invariants: every used dart sits in exactly one place and has a
    /// partner that points back.
    pub fn validate(&self) -> Result<()> {
        if self.attach.len() != self.sig.len() {
            return Err(Error::Structure("attachment lists do not match the skeleton".into()));
        }
        let n = self.partner.len();
        let mut seen = vec![false; n];
        let mut mark = |d: Dart| -> Result<()> {
            let i = d as usize;
            if i >= n {
                return Err(Error::Structure(format!("dart {d} out of range")));
            }
            if seen[i] {
                return Err(Error::Structure(format!("dart {d} incident to two places")));
            }
            seen[i] = true;
            Ok(())
        };
        for legs in &self.attach {
            for &d in legs {
                mark(d)?;
            }
        }
        for rot in &self.vertices {
            for &d in rot {
                mark(d)?;
            }
        }
        for (i, used) in seen.iter().enumerate() {
            if !used {
                continue;
            }
            let p = self.partner[i] as usize;
            if p >= n || !seen[p] {
                return Err(Error::Structure(format!("dart {i} has no valid partner")));
            }
            if p == i {
                return Err(Error::Structure(format!("dart {i} is paired with itself")));
            }
            if self.partner[p] as usize != i {
                return Err(Error::Structure(format!("edge pairing at dart {i} is not symmetric")));
            }
        }
        Ok(())
    }

    /// True if some connected component has no legs at all (a vacuum component), or if the
    /// diagram carries vertexless loops.
    pub fn has_vacuum_component(&self) -> bool {
        if self.loops > 0 {
            return true;
        }
        let comps = self.connected_components();
        comps.iter().any(|c| c.legs == 0)
    }

    /// A strut component: one edge joining two legs.
    pub fn strut_components(&self) -> Vec<(Dart, Dart)> {
        let roles = self.roles();
        let mut out = Vec::new();
        for legs in &self.attach {
            for &d in legs {
                let p = self.partner(d);
                if d < p && matches!(roles[p as usize], Role::Leg { .. }) {
                    out.push((d, p));
                }
            }
        }
        out
    }

    pub(crate) fn connected_components(&self) -> Vec<ComponentInfo> {
        let n = self.partner.len();
        let roles = self.roles();
        let mut uf = UnionFind::new(n);
        for rot in &self.vertices {
            uf.union(rot[0] as usize, rot[1] as usize);
            uf.union(rot[0] as usize, rot[2] as usize);
        }
        for (i, r) in roles.iter().enumerate() {
            if !matches!(r, Role::Unused) {
                uf.union(i, self.partner[i] as usize);
            }
        }
        let mut by_root: BTreeMap<usize, ComponentInfo> = BTreeMap::new();
        for (i, r) in roles.iter().enumerate() {
            match r {
                Role::Unused => {}
                Role::Leg { comp, .. } => {
                    let e = by_root.entry(uf.find(i)).or_default();
                    e.legs += 1;
                    e.darts.push(i as Dart);
                    if self.sig.comps[*comp].kind.is_one_manifold() {
                        e.anchored = true;
                    }
                }
                Role::Vertex { .. } => {
                    let e = by_root.entry(uf.find(i)).or_default();
                    e.darts.push(i as Dart);
                }
            }
        }
        by_root.into_values().collect()
    }

    /// Relabels every dart through `map`, keeping the same structure. Used when embedding
    /// one diagram into a larger dart space.
    pub(crate) fn shifted(&self, offset: Dart) -> Diagram {
        Diagram {
            sig: self.sig.clone(),
            attach: self.attach.iter().map(|l| l.iter().map(|d| d + offset).collect()).collect(),
            vertices: self.vertices.iter().map(|r| [r[0] + offset, r[1] + offset, r[2] + offset]).collect(),
            partner: {
                let mut p = vec![0; offset as usize];
                p.extend(self.partner.iter().map(|d| d + offset));
                p
            },
            loops: self.loops,
        }
    }

    /// Moves this diagram onto a larger signature containing all of its labels.
    pub fn embed(&self, sig: &Arc<Signature>) -> Result<Diagram> {
        let mut attach = vec![Vec::new(); sig.len()];
        for (i, c) in self.sig.comps.iter().enumerate() {
            let j = sig.require(&c.label)?;
            if sig.comps[j].kind != c.kind {
                return Err(Error::Signature(format!("kind mismatch for label {:?}", c.label)));
            }
            attach[j] = self.attach[i].clone();
        }
        Ok(Diagram {
            sig: sig.clone(),
            attach,
            vertices: self.vertices.clone(),
            partner: self.partner.clone(),
            loops: self.loops,
        })
    }

    /// Renames a label, merging into an existing star-like component of the same kind.
    pub fn relabel(&self, from: &str, to: &str) -> Result<Diagram> {
        if from == to {
            return Ok(self.clone());
        }
        let i = self.sig.require(from)?;
        let new_sig = Arc::new(relabeled_signature(&self.sig, from, to)?);
        let mut attach = vec![Vec::new(); new_sig.len()];
        for (k, c) in self.sig.comps.iter().enumerate() {
            let target = if k == i { to } else { c.label.as_str() };
            let j = new_sig.require(target)?;
            attach[j].extend_from_slice(&self.attach[k]);
        }
        Ok(Diagram {
            sig: new_sig,
            attach,
            vertices: self.vertices.clone(),
            partner: self.partner.clone(),
            loops: self.loops,
        })
    }

    /// Changes the kind of a component, keeping the leg order.
    pub fn with_kind(&self, label: &str, kind: SkeletonKind) -> Result<Diagram> {
        let sig = Arc::new(self.sig.with_kind(label, kind)?);
        Ok(Diagram { sig, ..self.clone() })
    }

    /// Removes two legs and joins their edges; returns false if they formed a strut (which
    /// then closes into a vertexless loop).
    pub(crate) fn join_legs(&mut self, a: Dart, b: Dart) {
        for legs in self.attach.iter_mut() {
            legs.retain(|&d| d != a && d != b);
        }
        let pa = self.partner[a as usize];
        let pb = self.partner[b as usize];
        if pa == b {
            self.loops += 1;
        } else {
            self.partner[pa as usize] = pb;
            self.partner[pb as usize] = pa;
        }
    }

    /// Disjoint union; star-like labels present in both are shared.
    pub fn union(&self, other: &Diagram) -> Result<Diagram> {
        let sig = if self.sig == other.sig { self.sig.clone() } else { Arc::new(self.sig.merge(&other.sig)?) };
        let a = self.embed_loose(&sig)?;
        let b = other.shifted(self.partner.len() as Dart).embed_loose(&sig)?;
        let mut out = a;
        for (la, lb) in out.attach.iter_mut().zip(b.attach) {
            la.extend(lb);
        }
        out.vertices.extend(b.vertices);
        out.partner.extend_from_slice(&b.partner[self.partner.len()..]);
        out.loops += b.loops;
        Ok(out)
    }

    fn embed_loose(&self, sig: &Arc<Signature>) -> Result<Diagram> {
        if Arc::ptr_eq(sig, &self.sig) || **sig == *self.sig {
            let mut d = self.clone();
            d.sig = sig.clone();
            return Ok(d);
        }
        self.embed(sig)
    }

    /// Splits off the components without legs (and the free loops). Returns the legged part on
    /// the same skeleton and the vacuum part on the empty skeleton; neither is canonicalized.
    pub fn split_vacuum(&self) -> (Diagram, Diagram) {
        let mut vac_darts = vec![false; self.partner.len()];
        for c in self.connected_components() {
            if c.legs == 0 {
                for d in c.darts {
                    vac_darts[d as usize] = true;
                }
            }
        }
        let is_vac = |r: &[Dart; 3]| vac_darts[r[0] as usize];
        let legged = Diagram {
            sig: self.sig.clone(),
            attach: self.attach.clone(),
            vertices: self.vertices.iter().filter(|r| !is_vac(r)).copied().collect(),
            partner: self.partner.clone(),
            loops: 0,
        };
        let vacuum = Diagram {
            sig: Arc::new(Signature::empty()),
            attach: Vec::new(),
            vertices: self.vertices.iter().filter(|r| is_vac(r)).copied().collect(),
            partner: self.partner.clone(),
            loops: self.loops,
        };
        (legged, vacuum)
    }

    pub fn with_loops(&self, loops: u32) -> Diagram {
        Diagram { loops, ..self.clone() }
    }

    /// Adds a component with no legs.
    pub fn add_component(&self, comp: Component) -> Result<Diagram> {
        let sig = Arc::new(self.sig.with_component(comp.clone())?);
        let mut attach = vec![Vec::new(); sig.len()];
        for (i, c) in self.sig.comps.iter().enumerate() {
            attach[sig.require(&c.label)?] = self.attach[i].clone();
        }
        Ok(Diagram { sig, attach, vertices: self.vertices.clone(), partner: self.partner.clone(), loops: self.loops })
    }

    /// Removes a component that carries no legs.
    pub fn drop_component(&self, label: &str) -> Result<Diagram> {
        let i = self.sig.require(label)?;
        if !self.attach[i].is_empty() {
            return Err(Error::Precondition(format!("component {label:?} still has legs")));
        }
        let sig = Arc::new(self.sig.without(label));
        let mut attach = self.attach.clone();
        attach.remove(i);
        Ok(Diagram { sig, attach, vertices: self.vertices.clone(), partner: self.partner.clone(), loops: self.loops })
    }

    /// Moves leg `dart` to the end of component `to`.
    pub(crate) fn move_leg(&mut self, dart: Dart, to: usize) {
        for legs in self.attach.iter_mut() {
            legs.retain(|&d| d != dart);
        }
        self.attach[to].push(dart);
    }

    /// True if some strut has an end on `label`.
    pub fn has_strut_on(&self, label: &str) -> bool {
        let Some(i) = self.sig.index_of(label) else { return false };
        let roles = self.roles();
        self.attach[i].iter().any(|&d| matches!(roles[self.partner(d) as usize], Role::Leg { .. }))
    }

    pub(crate) fn fresh_dart(&mut self) -> Dart {
        self.partner.push(Dart::MAX);
        (self.partner.len() - 1) as Dart
    }

    pub(crate) fn connect(&mut self, a: Dart, b: Dart) {
        self.partner[a as usize] = b;
        self.partner[b as usize] = a;
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct ComponentInfo {
    pub legs: usize,
    pub anchored: bool,
    pub darts: Vec<Dart>,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Incremental construction of diagrams by hand.
pub struct DiagramBuilder {
    d: Diagram,
}

impl DiagramBuilder {
    pub fn new(sig: Signature) -> Self {
        DiagramBuilder { d: Diagram::empty(Arc::new(sig)) }
    }

    pub fn with_sig(sig: Arc<Signature>) -> Self {
        DiagramBuilder { d: Diagram::empty(sig) }
    }

    /// A new internal vertex; the returned darts are in its cyclic order.
    pub fn vertex(&mut self) -> [Dart; 3] {
        let rot = [self.d.fresh_dart(), self.d.fresh_dart(), self.d.fresh_dart()];
        self.d.vertices.push(rot);
        rot
    }

    /// A new leg appended at the end of the component's attachment order.
    pub fn leg(&mut self, label: &str) -> Result<Dart> {
        let c = self.d.sig.require(label)?;
        let dart = self.d.fresh_dart();
        self.d.attach[c].push(dart);
        Ok(dart)
    }

    pub fn edge(&mut self, a: Dart, b: Dart) {
        self.d.connect(a, b);
    }

    pub fn add_loops(&mut self, k: u32) {
        self.d.loops += k;
    }

    pub fn finish(self) -> Result<Diagram> {
        self.d.validate()?;
        Ok(self.d)
    }
}

/// The wheel with `k` spokes on the star `label`: a `k`-gon whose vertices each carry one
/// leg, every vertex oriented as (leg, incoming rim, outgoing rim).
pub fn wheel(label: &str, k: usize) -> Diagram {
    assert!(k >= 1);
    let mut b = DiagramBuilder::new(Signature::star(label));
    let verts: Vec<[Dart; 3]> = (0..k).map(|_| b.vertex()).collect();
    for (i, v) in verts.iter().enumerate() {
        let leg = b.leg(label).expect("label exists");
        b.edge(v[0], leg);
        let next = &verts[(i + 1) % k];
        b.edge(v[2], next[1]);
    }
    b.finish().expect("wheel is well formed")
}

/// The strut: two legs on `label` joined by an edge.
pub fn strut(label: &str) -> Diagram {
    strut_between(&Signature::star(label), label, label)
}

/// A strut between two (possibly equal) components of `sig`.
pub fn strut_between(sig: &Signature, a: &str, b: &str) -> Diagram {
    let mut bld = DiagramBuilder::new(sig.clone());
    let x = bld.leg(a).expect("label exists");
    let y = bld.leg(b).expect("label exists");
    bld.edge(x, y);
    bld.finish().expect("strut is well formed")
}

/// `k` isolated chords one after another on the interval or circle `label`.
pub fn chords(kind: SkeletonKind, label: &str, k: usize) -> Diagram {
    let mut b = DiagramBuilder::new(Signature::single(kind, label));
    for _ in 0..k {
        let x = b.leg(label).expect("label exists");
        let y = b.leg(label).expect("label exists");
        b.edge(x, y);
    }
    b.finish().expect("chords are well formed")
}

/// The theta graph: two vertices joined by three edges, with opposite cyclic orders when the
/// edges are identified (the planar drawing).
pub fn theta() -> Diagram {
    let mut b = DiagramBuilder::new(Signature::empty());
    let u = b.vertex();
    let v = b.vertex();
    b.edge(u[0], v[2]);
    b.edge(u[1], v[1]);
    b.edge(u[2], v[0]);
    b.finish().expect("theta is well formed")
}
