//! Finite linear combinations of canonical diagrams.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::coeff::{Coeff, Q};
use crate::diagram::{canonicalize, Diagram, Sign, Signature};
use crate::error::{Error, Result};

/// A linear combination of canonical diagrams over one signature. Stored coefficients are
/// never zero and no term exceeds the truncation degree.
#[derive(Clone, PartialEq)]
pub struct Element<C: Coeff = Q> {
    sig: Arc<Signature>,
    terms: BTreeMap<Diagram, C>,
    truncation: Option<usize>,
}

impl<C: Coeff> std::fmt::Debug for Element<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl<C: Coeff> Element<C> {
    pub fn zero(sig: Arc<Signature>) -> Self {
        Element { sig, terms: BTreeMap::new(), truncation: None }
    }

    /// The empty diagram with coefficient one.
    pub fn one(sig: Arc<Signature>) -> Self {
        let d = Diagram::empty(sig.clone());
        Self::from_diagram(&d)
    }

    pub fn from_diagram(d: &Diagram) -> Self {
        let mut e = Self::zero(d.sig().clone());
        e.add_diagram(d, C::one());
        e
    }

    pub fn from_terms(sig: Arc<Signature>, terms: impl IntoIterator<Item = (Diagram, C)>) -> Self {
        let mut e = Self::zero(sig);
        for (d, c) in terms {
            e.add_diagram(&d, c);
        }
        e
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Diagram, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, d: &Diagram) -> C {
        let c = canonicalize(d);
        match c.sign {
            Sign::Zero => C::zero(),
            s => {
                let v = self.terms.get(&c.diagram).cloned().unwrap_or_else(C::zero);
                if s == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(Diagram::degree).max()
    }

    /// Adds `c * d` after canonicalizing `d`.
    pub fn add_diagram(&mut self, d: &Diagram, c: C) {
        if c.is_zero() {
            return;
        }
        if let Some(t) = self.truncation {
            if d.degree() > t {
                return;
            }
        }
        let can = canonicalize(d);
        let c = match can.sign {
            Sign::Zero => return,
            Sign::Pos => c,
            Sign::Neg => -c,
        };
        self.add_canonical(can.diagram, c);
    }

    /// Adds a term whose diagram is already canonical with sign +1.
    pub(crate) fn add_canonical(&mut self, d: Diagram, c: C) {
        if c.is_zero() {
            return;
        }
        if let Some(t) = self.truncation {
            if d.degree() > t {
                return;
            }
        }
        debug_assert!(*d.sig() == self.sig, "signature mismatch in element");
        match self.terms.entry(d) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element<C>, c: &C) {
        for (d, x) in &other.terms {
            self.add_canonical(d.clone(), x.clone() * c.clone());
        }
        self.truncation = min_trunc(self.truncation, other.truncation);
        self.apply_truncation();
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.sig.clone());
        out.truncation = self.truncation;
        for (d, x) in &self.terms {
            out.add_canonical(d.clone(), x.clone() * c.clone());
        }
        out
    }

    pub fn scale_q(&self, q: &Q) -> Self {
        self.scale(&C::from_q(q.clone()))
    }

    pub fn with_truncation(mut self, t: Option<usize>) -> Self {
        self.truncation = min_trunc(self.truncation, t);
        self.apply_truncation();
        self
    }

    /// The same terms with no truncation degree.
    pub fn untruncated(&self) -> Self {
        Element { truncation: None, ..self.clone() }
    }

    pub fn truncated(&self, t: usize) -> Self {
        self.clone().with_truncation(Some(t))
    }

    fn apply_truncation(&mut self) {
        if let Some(t) = self.truncation {
            self.terms.retain(|d, _| d.degree() <= t);
        }
    }

    /// Homogeneous component of one degree.
    pub fn degree_part(&self, deg: usize) -> Self {
        self.filter(|d| d.degree() == deg)
    }

    pub fn filter(&self, keep: impl Fn(&Diagram) -> bool) -> Self {
        Element {
            sig: self.sig.clone(),
            terms: self.terms.iter().filter(|(d, _)| keep(d)).map(|(d, c)| (d.clone(), c.clone())).collect(),
            truncation: self.truncation,
        }
    }

    /// Applies a linear map defined on diagrams. The map's results are summed with the
    /// coefficients of `self`; the output signature is `sig`.
    pub fn map_linear<D: Coeff>(
        &self,
        sig: Arc<Signature>,
        mut f: impl FnMut(&Diagram) -> Result<Element<D>>,
        lift: impl Fn(&C) -> D,
    ) -> Result<Element<D>> {
        let mut out = Element::<D>::zero(sig);
        for (d, c) in &self.terms {
            let img = f(d)?;
            if img.sig != out.sig && !img.is_zero() {
                return Err(Error::Signature(format!(
                    "linear map produced signature {} instead of {}",
                    img.sig, out.sig
                )));
            }
            let lc = lift(c);
            for (e, x) in img.terms {
                out.add_canonical(e, x * lc.clone());
            }
        }
        out.truncation = self.truncation;
        out.apply_truncation();
        Ok(out)
    }

    /// Same map on the same coefficient ring.
    pub fn map(&self, sig: Arc<Signature>, f: impl FnMut(&Diagram) -> Result<Element<C>>) -> Result<Element<C>> {
        self.map_linear(sig, f, |c| c.clone())
    }

    /// Bilinear extension of a product on diagrams.
    pub fn bilinear(
        &self,
        other: &Element<C>,
        sig: Arc<Signature>,
        mut f: impl FnMut(&Diagram, &Diagram) -> Result<Element<C>>,
    ) -> Result<Element<C>> {
        let trunc = min_trunc(self.truncation, other.truncation);
        let mut out = Element::<C>::zero(sig);
        out.truncation = trunc;
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some(t) = trunc {
                    if a.degree() + b.degree() > t {
                        continue;
                    }
                }
                let img = f(a, b)?;
                let k = ca.clone() * cb.clone();
                for (e, x) in img.terms {
                    out.add_canonical(e, x * k.clone());
                }
            }
        }
        Ok(out)
    }

    /// Moves every term onto a larger signature.
    pub fn embed(&self, sig: &Arc<Signature>) -> Result<Self> {
        let mut out = Self::zero(sig.clone());
        out.truncation = self.truncation;
        for (d, c) in &self.terms {
            out.add_diagram(&d.embed(sig)?, c.clone());
        }
        Ok(out)
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        let sig = Arc::new(crate::diagram::relabeled_signature(&self.sig, from, to)?);
        let mut out = Self::zero(sig);
        out.truncation = self.truncation;
        for (d, c) in &self.terms {
            let r = d.relabel(from, to)?;
            out.add_diagram(&r.embed(&out.sig)?, c.clone());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(d, c)| json!({"diagram": d.to_json(), "coeff": c.to_json()}))
            .collect();
        json!({"ring": C::ring_name(), "truncation": self.truncation, "terms": terms})
    }

    /// Parses an element; `sig` fixes the signature when the term list is empty.
    pub fn from_json(v: &Value, sig: Option<Arc<Signature>>) -> Result<Self> {
        let ring = v.get("ring").and_then(Value::as_str).ok_or_else(|| Error::Parse("missing ring".into()))?;
        if ring != C::ring_name() {
            return Err(Error::Parse(format!("expected ring {}, found {ring}", C::ring_name())));
        }
        let truncation = match v.get("truncation") {
            None | Some(Value::Null) => None,
            Some(t) => Some(t.as_u64().ok_or_else(|| Error::Parse("bad truncation".into()))? as usize),
        };
        let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing terms".into()))?;
        let mut parsed = Vec::new();
        for t in terms {
            let d = Diagram::from_json(t.get("diagram").ok_or_else(|| Error::Parse("term without diagram".into()))?)?;
            let c = C::from_json(t.get("coeff").ok_or_else(|| Error::Parse("term without coeff".into()))?)?;
            parsed.push((d, c));
        }
        let sig = match (sig, parsed.first()) {
            (Some(s), _) => s,
            (None, Some((d, _))) => d.sig().clone(),
            (None, None) => Arc::new(Signature::empty()),
        };
        let mut out = Self::zero(sig.clone());
        for (d, c) in parsed {
            if **d.sig() != *sig {
                return Err(Error::Signature(format!("term on {} in element on {}", d.sig(), sig)));
            }
            out.add_diagram(&d.embed(&sig)?, c);
        }
        Ok(out.with_truncation(truncation))
    }
}

fn min_trunc(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coeff> std::ops::Add for &Element<C> {
    type Output = Element<C>;
    fn add(self, rhs: &Element<C>) -> Element<C> {
        let mut out = self.clone();
        out.add_scaled(rhs, &C::one());
        out
    }
}

impl<C: Coeff> std::ops::Sub for &Element<C> {
    type Output = Element<C>;
    fn sub(self, rhs: &Element<C>) -> Element<C> {
        let mut out = self.clone();
        out.add_scaled(rhs, &(-C::one()));
        out
    }
}

impl<C: Coeff> std::ops::Neg for &Element<C> {
    type Output = Element<C>;
    fn neg(self) -> Element<C> {
        self.scale(&(-C::one()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qi;
    use crate::diagram::{strut, wheel};

    #[test]
    fn cancellation_removes_terms() {
        let w = wheel("x", 2);
        let a: Element = Element::from_diagram(&w);
        let z = &a - &a;
        assert!(z.is_zero());
        let b = &a + &Element::from_diagram(&strut("x"));
        assert_eq!(b.len(), 2);
    }

    #[test]
    fn zero_diagrams_vanish() {
        let e: Element = Element::from_diagram(&wheel("x", 3));
        assert!(e.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let mut e: Element = Element::from_diagram(&wheel("x", 2));
        e.add_diagram(&wheel("x", 4), qi(-3));
        let e = e.with_truncation(Some(4));
        let back = Element::<Q>::from_json(&e.to_json(), None).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn truncation_drops_high_terms() {
        let mut e: Element = Element::from_diagram(&wheel("x", 2));
        e.add_diagram(&wheel("x", 4), qi(1));
        assert_eq!(e.truncated(3).len(), 1);
    }
}
