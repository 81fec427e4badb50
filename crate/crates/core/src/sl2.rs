//! The sl2 weight system on closed diagrams.
//!
//! A free loop is worth 3. An edge joining two distinct trivalent vertices `u = (e, a, b)` and
//! `v = (e', c, d)` is removed together with both vertices and replaced by the difference of
//! two smoothings: `(a-d, b-c) - (a-c, b-d)`. Every rewrite removes two vertices, so the
//! recursion ends on unions of loops.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::{Coeff, Q};
use crate::diagram::{canonicalize, Dart, Diagram, Sign};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::ops::pair;

#[derive(Default)]
pub struct Sl2 {
    memo: Mutex<HashMap<Diagram, Q>>,
}

fn three_pow(k: u32) -> Q {
    Q::from_integer(BigInt::from(3).pow(k))
}

/// The two smoothings of the edge leaving `vertices[vi][slot]`.
fn smoothings(d: &Diagram, vi: usize, slot: usize) -> Option<[Diagram; 2]> {
    let u = d.vertices[vi];
    let e = u[slot];
    let (a, b) = (u[(slot + 1) % 3], u[(slot + 2) % 3]);
    let f = d.partner(e);
    let wi = d.vertices.iter().position(|r| r.contains(&f))?;
    if wi == vi {
        return None;
    }
    let w = d.vertices[wi];
    let s = w.iter().position(|&x| x == f).expect("dart at vertex");
    let (c, dd) = (w[(s + 1) % 3], w[(s + 2) % 3]);
    let mut base = d.clone();
    base.vertices.retain(|r| *r != u && *r != w);
    let join = |pairs: [(Dart, Dart); 2]| {
        let mut t = base.clone();
        for (x, y) in pairs {
            t.join_legs(x, y);
        }
        t
    };
    Some([join([(a, dd), (b, c)]), join([(a, c), (b, dd)])])
}

fn has_tadpole(d: &Diagram) -> bool {
    d.vertices.iter().any(|r| r.iter().any(|&x| r.contains(&d.partner(x))))
}

impl Sl2 {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_closed(d: &Diagram) -> Result<()> {
        if d.num_legs() > 0 {
            return Err(Error::Precondition("the sl2 reduction takes closed diagrams only".into()));
        }
        Ok(())
    }

    /// Value of one closed diagram, rewriting at the first edge of the canonical form and
    /// memoizing canonical shapes.
    pub fn diagram_value(&self, d: &Diagram) -> Result<Q> {
        Self::check_closed(d)?;
        Ok(self.value(d))
    }

    fn value(&self, d: &Diagram) -> Q {
        let loops = d.loops();
        let c = canonicalize(&d.with_loops(0));
        let sign = match c.sign {
            Sign::Zero => return <Q as Zero>::zero(),
            Sign::Pos => <Q as One>::one(),
            Sign::Neg => -<Q as One>::one(),
        };
        sign * three_pow(loops) * self.core_value(&c.diagram)
    }

    fn core_value(&self, d: &Diagram) -> Q {
        if d.num_vertices() == 0 {
            return <Q as One>::one();
        }
        if has_tadpole(d) {
            return <Q as Zero>::zero();
        }
        if let Some(v) = self.memo.lock().expect("lock").get(d) {
            return v.clone();
        }
        let [s, t] = smoothings(d, 0, 0).expect("no tadpoles");
        let v = self.value(&s) - self.value(&t);
        self.memo.lock().expect("lock").insert(d.clone(), v.clone());
        v
    }

    /// Same value with rewrite sites chosen at random and no memo table.
    pub fn diagram_value_random(&self, d: &Diagram, rng: &mut ChaCha8Rng) -> Result<Q> {
        Self::check_closed(d)?;
        Ok(random_value(d, rng))
    }

    pub fn reduce<C: Coeff>(&self, e: &Element<C>) -> Result<C> {
        let mut total = C::zero();
        for (d, c) in e.terms() {
            total = total + c.scale(&self.diagram_value(d)?);
        }
        Ok(total)
    }

    /// Full gluing along `label` followed by the reduction.
    pub fn pair(&self, c: &Element, d: &Element, label: &str) -> Result<Q> {
        self.reduce(&pair(c, d, label)?)
    }

    pub fn memo_size(&self) -> usize {
        self.memo.lock().expect("lock").len()
    }
}

fn random_value(d: &Diagram, rng: &mut ChaCha8Rng) -> Q {
    if d.num_vertices() == 0 {
        return three_pow(d.loops());
    }
    if has_tadpole(d) {
        return <Q as Zero>::zero();
    }
    let vi = rng.gen_range(0..d.num_vertices());
    let slot = rng.gen_range(0..3);
    let [s, t] = smoothings(d, vi, slot).expect("no tadpoles");
    random_value(&s, rng) - random_value(&t, rng)
}

/// A seeded generator for the randomized mode.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qi;
    use crate::diagram::{theta, DiagramBuilder, Signature};

    #[test]
    fn loops_and_theta() {
        let s = Sl2::new();
        let mut b = DiagramBuilder::new(Signature::empty());
        b.add_loops(1);
        assert_eq!(s.diagram_value(&b.finish().unwrap()).unwrap(), qi(3));
        let mut b = DiagramBuilder::new(Signature::empty());
        b.add_loops(2);
        assert_eq!(s.diagram_value(&b.finish().unwrap()).unwrap(), qi(9));
        assert_eq!(s.diagram_value(&theta()).unwrap(), qi(6));
        let mut rng = seeded_rng(1);
        assert_eq!(s.diagram_value_random(&theta(), &mut rng).unwrap(), qi(6));
    }

    #[test]
    fn rejects_legs() {
        let s = Sl2::new();
        assert!(s.diagram_value(&crate::diagram::strut("x")).is_err());
    }
}
