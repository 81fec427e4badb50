//! Canonical labeling of diagrams with antisymmetry signs.
//!
//! Nodes (legs and internal vertices) are colored by skeleton data, refined by neighbor
//! colors, and the remaining symmetry is resolved by individualize-and-refine backtracking.
//! Each leaf numbers the darts and yields an integer encoding; the smallest encoding wins.
//! The sign compares each input cyclic order against the canonical one. Two minimal leaves
//! with different signs witness an odd automorphism and the diagram is zero.

use std::sync::Arc;

use super::{Dart, Diagram, SkeletonKind, UnionFind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
    Zero,
}

impl Sign {
    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
            Sign::Zero => 0,
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        }
    }

    fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Neg
        } else {
            Sign::Pos
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedDiagram {
    pub diagram: Diagram,
    pub sign: Sign,
}

#[derive(Clone, Copy, Debug)]
enum Node {
    Leg { dart: Dart, comp: usize, pos: usize },
    Vertex { v: usize },
}

struct Part<'a> {
    d: &'a Diagram,
    nodes: Vec<Node>,
    adj: Vec<Vec<usize>>,
    /// dart -> local node index
    owner: &'a [usize],
    n_legs: usize,
    /// (comp, number of legs) for circle components with legs here
    circles: Vec<(usize, usize)>,
    has_self_loop: bool,
}

struct Best {
    enc: Vec<u32>,
    odd: bool,
    zero: bool,
}

/// Canonical form and sign of a diagram: `d = sign * canonical`.
pub fn canonicalize(d: &Diagram) -> SignedDiagram {
    debug_assert!(d.validate().is_ok(), "canonicalize on malformed diagram");
    let n_darts = d.partner.len();

    let mut nodes: Vec<Node> = Vec::new();
    let mut owner = vec![usize::MAX; n_darts];
    for (comp, legs) in d.attach.iter().enumerate() {
        for (pos, &dart) in legs.iter().enumerate() {
            owner[dart as usize] = nodes.len();
            nodes.push(Node::Leg { dart, comp, pos });
        }
    }
    for (v, rot) in d.vertices.iter().enumerate() {
        for &dart in rot {
            owner[dart as usize] = nodes.len();
        }
        nodes.push(Node::Vertex { v });
    }

    let mut uf = UnionFind::new(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        for dart in node_darts(d, node) {
            uf.union(i, owner[d.partner(dart) as usize]);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..nodes.len() {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut anchored: Vec<usize> = Vec::new();
    let mut free: Vec<Vec<usize>> = Vec::new();
    for (_, members) in groups {
        let is_anchored = members.iter().any(|&i| match nodes[i] {
            Node::Leg { comp, .. } => d.sig.comps[comp].kind.is_one_manifold(),
            Node::Vertex { .. } => false,
        });
        if is_anchored {
            anchored.extend(members);
        } else {
            free.push(members);
        }
    }
    anchored.sort_unstable();

    let mut local_owner = vec![usize::MAX; n_darts];
    let mut results: Vec<(bool, Best)> = Vec::new();
    if !anchored.is_empty() {
        results.push((true, canon_part(d, &nodes, &anchored, &mut local_owner)));
    }
    let mut free_results: Vec<Best> =
        free.iter().map(|m| canon_part(d, &nodes, m, &mut local_owner)).collect();
    free_results.sort_by(|a, b| a.enc.cmp(&b.enc));
    results.extend(free_results.into_iter().map(|b| (false, b)));

    let mut sign = Sign::Pos;
    for (_, b) in &results {
        sign = if b.zero { Sign::Zero } else { sign.mul(Sign::from_parity(b.odd)) };
    }
    let diagram = assemble(d, results.iter().map(|(_, b)| b.enc.as_slice()));
    SignedDiagram { diagram, sign }
}

fn node_darts(d: &Diagram, node: &Node) -> Vec<Dart> {
    match *node {
        Node::Leg { dart, .. } => vec![dart],
        Node::Vertex { v } => d.vertices[v].to_vec(),
    }
}

fn canon_part(d: &Diagram, all: &[Node], members: &[usize], owner: &mut [usize]) -> Best {
    // legs first (in skeleton order), then vertices
    let mut nodes: Vec<Node> = members.iter().map(|&i| all[i]).collect();
    nodes.sort_by_key(|n| match *n {
        Node::Leg { comp, pos, .. } => (0, comp, pos),
        Node::Vertex { v } => (1, v, 0),
    });
    for (i, n) in nodes.iter().enumerate() {
        for dart in node_darts(d, n) {
            owner[dart as usize] = i;
        }
    }
    let mut has_self_loop = false;
    let adj: Vec<Vec<usize>> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            node_darts(d, n)
                .into_iter()
                .map(|dart| {
                    let j = owner[d.partner(dart) as usize];
                    if j == i {
                        has_self_loop = true;
                    }
                    j
                })
                .collect()
        })
        .collect();
    let n_legs = nodes.iter().filter(|n| matches!(n, Node::Leg { .. })).count();
    let mut circles: Vec<(usize, usize)> = Vec::new();
    for n in &nodes {
        if let Node::Leg { comp, .. } = *n {
            if d.sig.comps[comp].kind == SkeletonKind::Circle && !circles.iter().any(|c| c.0 == comp) {
                circles.push((comp, d.attach[comp].len()));
            }
        }
    }
    let part = Part { d, nodes, adj, owner, n_legs, circles, has_self_loop };

    let mut best: Option<Best> = None;
    let mut rot = vec![0usize; part.circles.len()];
    loop {
        let colors = initial_colors(&part, &rot);
        search(&part, colors, &rot, &mut best);
        // next rotation tuple
        let mut i = 0;
        loop {
            if i == rot.len() {
                let mut b = best.expect("search visits at least one leaf");
                if part.has_self_loop {
                    b.zero = true;
                }
                return b;
            }
            rot[i] += 1;
            if rot[i] < part.circles[i].1 {
                break;
            }
            rot[i] = 0;
            i += 1;
        }
    }
}

fn leg_key(part: &Part, rot: &[usize], comp: usize, pos: usize) -> (usize, usize) {
    let kind = part.d.sig.comps[comp].kind;
    match kind {
        SkeletonKind::Interval => (comp, pos),
        SkeletonKind::Circle => {
            let (i, &(_, k)) =
                part.circles.iter().enumerate().find(|(_, c)| c.0 == comp).expect("circle listed");
            (comp, (pos + k - rot[i]) % k)
        }
        SkeletonKind::Star | SkeletonKind::CircledStar => (comp, 0),
    }
}

fn initial_colors(part: &Part, rot: &[usize]) -> Vec<u32> {
    let keys: Vec<(u8, usize, usize)> = part
        .nodes
        .iter()
        .map(|n| match *n {
            Node::Leg { comp, pos, .. } => {
                let (c, p) = leg_key(part, rot, comp, pos);
                (0, c, p)
            }
            Node::Vertex { .. } => (1, 0, 0),
        })
        .collect();
    rank_by(&keys)
}

/// Color of each item = number of items with a strictly smaller key.
fn rank_by<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut sorted: Vec<&K> = keys.iter().collect();
    sorted.sort();
    keys.iter().map(|k| sorted.partition_point(|s| *s < k) as u32).collect()
}

fn count_cells(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn refine(adj: &[Vec<usize>], colors: &mut Vec<u32>) {
    let mut cells = count_cells(colors);
    loop {
        if cells == colors.len() {
            return;
        }
        let keys: Vec<(u32, Vec<u32>)> = adj
            .iter()
            .enumerate()
            .map(|(i, nb)| {
                let mut c: Vec<u32> = nb.iter().map(|&j| colors[j]).collect();
                c.sort_unstable();
                (colors[i], c)
            })
            .collect();
        let next = rank_by(&keys);
        let n = count_cells(&next);
        *colors = next;
        if n == cells {
            return;
        }
        cells = n;
    }
}

fn search(part: &Part, mut colors: Vec<u32>, rot: &[usize], best: &mut Option<Best>) {
    refine(&part.adj, &mut colors);
    let m = colors.len();
    let mut size = vec![0usize; m];
    for &c in &colors {
        size[c as usize] += 1;
    }
    let target = (0..m).filter(|&c| size[c] > 1).min_by_key(|&c| (size[c], c));
    match target {
        None => leaf(part, &colors, rot, best),
        Some(c) => {
            for v in 0..m {
                if colors[v] as usize != c {
                    continue;
                }
                let mut next = colors.clone();
                for (u, col) in next.iter_mut().enumerate() {
                    if *col as usize == c && u != v {
                        *col += 1;
                    }
                }
                search(part, next, rot, best);
            }
        }
    }
}

fn leaf(part: &Part, colors: &[u32], rot: &[usize], best: &mut Option<Best>) {
    let d = part.d;
    let m = colors.len();
    let mut order = vec![0usize; m];
    for (i, &c) in colors.iter().enumerate() {
        order[c as usize] = i;
    }
    let nl = part.n_legs;
    let nv = m - nl;
    let total = nl + 3 * nv;
    // local dart numbers, keyed by position in `darts`
    let mut local: std::collections::HashMap<Dart, u32> = std::collections::HashMap::with_capacity(total);
    let mut enc: Vec<u32> = Vec::with_capacity(2 + 2 * nl + total);
    enc.push(nl as u32);
    enc.push(nv as u32);
    for (r, &node) in order.iter().enumerate().take(nl) {
        match part.nodes[node] {
            Node::Leg { dart, comp, pos } => {
                local.insert(dart, r as u32);
                let (c, p) = leg_key(part, rot, comp, pos);
                enc.push(c as u32);
                enc.push(p as u32);
            }
            Node::Vertex { .. } => unreachable!("legs sort before vertices"),
        }
    }
    let mut odd = false;
    for (r, &node) in order.iter().enumerate().skip(nl) {
        let v = match part.nodes[node] {
            Node::Vertex { v } => v,
            Node::Leg { .. } => unreachable!("legs sort before vertices"),
        };
        let rot3 = d.vertices[v];
        let mut slots: [(u32, u32, usize); 3] = [(0, 0, 0); 3];
        for (j, &dart) in rot3.iter().enumerate() {
            let p = d.partner(dart);
            let nb = part.owner[p as usize];
            slots[j] = (colors[nb], local.get(&p).copied().unwrap_or(u32::MAX), j);
        }
        slots.sort_unstable();
        let base = (nl + 3 * (r - nl)) as u32;
        let mut assigned = [0u32; 3];
        for (k, s) in slots.iter().enumerate() {
            local.insert(rot3[s.2], base + k as u32);
            assigned[s.2] = base + k as u32;
        }
        let [a, b, c] = assigned;
        let cyclic = (a < b && b < c) || (b < c && c < a) || (c < a && a < b);
        odd ^= !cyclic;
    }
    let mut partners = vec![0u32; total];
    for (&dart, &l) in &local {
        partners[l as usize] = local[&d.partner(dart)];
    }
    enc.extend(partners);

    match best {
        None => *best = Some(Best { enc, odd, zero: false }),
        Some(b) => match enc.cmp(&b.enc) {
            std::cmp::Ordering::Less => *b = Best { enc, odd, zero: false },
            std::cmp::Ordering::Equal => {
                if b.odd != odd {
                    b.zero = true;
                }
            }
            std::cmp::Ordering::Greater => {}
        },
    }
}

fn assemble<'a>(d: &Diagram, parts: impl Iterator<Item = &'a [u32]>) -> Diagram {
    let mut attach_keyed: Vec<Vec<(u32, Dart)>> = vec![Vec::new(); d.sig.len()];
    let mut vertices = Vec::new();
    let mut partner = Vec::new();
    let mut offset: u32 = 0;
    for enc in parts {
        let nl = enc[0] as usize;
        let nv = enc[1] as usize;
        for i in 0..nl {
            let comp = enc[2 + 2 * i] as usize;
            let pos = enc[3 + 2 * i];
            attach_keyed[comp].push((pos, offset + i as u32));
        }
        for k in 0..nv {
            let b = offset + (nl + 3 * k) as u32;
            vertices.push([b, b + 1, b + 2]);
        }
        let pstart = 2 + 2 * nl;
        partner.extend(enc[pstart..].iter().map(|p| p + offset));
        offset += (nl + 3 * nv) as u32;
    }
    let attach = attach_keyed
        .into_iter()
        .map(|mut l| {
            l.sort_unstable();
            l.into_iter().map(|(_, dart)| dart).collect()
        })
        .collect();
    Diagram { sig: Arc::clone(&d.sig), attach, vertices, partner, loops: d.loops }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{chords, strut, theta, wheel, DiagramBuilder, Signature};

    /// Applies a dart permutation and optionally reverses some vertex orders.
    fn relabel(d: &Diagram, perm: &[Dart], flips: &[bool]) -> Diagram {
        let n = d.partner.len();
        let mut partner = vec![0; n];
        for i in 0..n {
            partner[perm[i] as usize] = perm[d.partner[i] as usize];
        }
        let vertices = d
            .vertices
            .iter()
            .zip(flips)
            .map(|(r, &f)| {
                let r = [perm[r[0] as usize], perm[r[1] as usize], perm[r[2] as usize]];
                if f {
                    [r[0], r[2], r[1]]
                } else {
                    r
                }
            })
            .collect();
        let attach =
            d.attach.iter().map(|l| l.iter().map(|&x| perm[x as usize]).collect()).collect();
        Diagram { sig: d.sig.clone(), attach, vertices, partner, loops: d.loops }
    }

    fn shuffle(n: usize, seed: u64) -> Vec<Dart> {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut p: Vec<Dart> = (0..n as Dart).collect();
        p.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        p
    }

    #[test]
    fn wheel_two_relabeling_invariant() {
        let w = wheel("x", 2);
        let c0 = canonicalize(&w);
        assert_ne!(c0.sign, Sign::Zero);
        for seed in 0..20 {
            let p = shuffle(w.partner.len(), seed);
            let c = canonicalize(&relabel(&w, &p, &[false, false]));
            assert_eq!(c.diagram, c0.diagram);
            assert_eq!(c.sign, c0.sign);
        }
        let flipped = canonicalize(&relabel(&w, &shuffle(8, 99), &[true, false]));
        assert_eq!(flipped.diagram, c0.diagram);
        assert_eq!(flipped.sign, c0.sign.mul(Sign::Neg));
    }

    #[test]
    fn odd_wheels_vanish() {
        assert_eq!(canonicalize(&wheel("x", 1)).sign, Sign::Zero);
        assert_eq!(canonicalize(&wheel("x", 3)).sign, Sign::Zero);
        assert_eq!(canonicalize(&wheel("x", 4)).sign, Sign::Pos);
    }

    #[test]
    fn tadpole_is_zero() {
        let mut b = DiagramBuilder::new(Signature::star("x"));
        let v = b.vertex();
        let l = b.leg("x").unwrap();
        b.edge(v[0], l);
        b.edge(v[1], v[2]);
        let t = b.finish().unwrap();
        assert_eq!(canonicalize(&t).sign, Sign::Zero);
    }

    #[test]
    fn theta_is_nonzero_and_idempotent() {
        let c = canonicalize(&theta());
        assert_ne!(c.sign, Sign::Zero);
        let again = canonicalize(&c.diagram);
        assert_eq!(again.diagram, c.diagram);
        assert_eq!(again.sign, Sign::Pos);
    }

    #[test]
    fn chord_orders_on_interval_differ() {
        let two = chords(SkeletonKind::Interval, "z", 2);
        let mut b = DiagramBuilder::new(Signature::single(SkeletonKind::Interval, "z"));
        let l: Vec<Dart> = (0..4).map(|_| b.leg("z").unwrap()).collect();
        b.edge(l[0], l[2]);
        b.edge(l[1], l[3]);
        let crossed = b.finish().unwrap();
        assert_ne!(canonicalize(&two).diagram, canonicalize(&crossed).diagram);
    }

    #[test]
    fn circle_rotation_invariance() {
        let mut b = DiagramBuilder::new(Signature::single(SkeletonKind::Circle, "c"));
        let l: Vec<Dart> = (0..4).map(|_| b.leg("c").unwrap()).collect();
        b.edge(l[0], l[1]);
        b.edge(l[2], l[3]);
        let a = b.finish().unwrap();
        let mut b = DiagramBuilder::new(Signature::single(SkeletonKind::Circle, "c"));
        let l: Vec<Dart> = (0..4).map(|_| b.leg("c").unwrap()).collect();
        b.edge(l[1], l[2]);
        b.edge(l[3], l[0]);
        let rotated = b.finish().unwrap();
        assert_eq!(canonicalize(&a).diagram, canonicalize(&rotated).diagram);
    }

    #[test]
    fn strut_products_are_canonical() {
        let s = canonicalize(&strut("x"));
        assert_eq!(s.sign, Sign::Pos);
        assert_eq!(canonicalize(&s.diagram).diagram, s.diagram);
    }
}
