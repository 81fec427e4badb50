//! The wheels element and its relatives.

use std::sync::Arc;

use crate::coeff::Q;
use crate::diagram::{wheel, Signature, SkeletonKind};
use crate::element::Element;
use crate::error::Result;
use crate::ops::{apply_diffop, chi, exp_union};
use crate::series::modified_bernoulli;

/// `sum_{1 <= k, 2k <= max_degree} b[k] * w_{2k}` on the star `label`.
pub fn log_omega_with(label: &str, b: &[Q], max_degree: usize) -> Element {
    let mut e = Element::zero(Arc::new(Signature::star(label))).with_truncation(Some(max_degree));
    for k in 1..=max_degree / 2 {
        if let Some(c) = b.get(k) {
            e.add_diagram(&wheel(label, 2 * k), c.clone());
        }
    }
    e
}

pub fn log_omega(label: &str, max_degree: usize) -> Element {
    log_omega_with(label, &modified_bernoulli(max_degree / 2), max_degree)
}

/// `exp` (disjoint union) of `log_omega`.
pub fn omega(label: &str, max_degree: usize) -> Result<Element> {
    exp_union(&log_omega(label, max_degree), max_degree)
}

/// Same with prescribed coefficients in place of the modified Bernoulli numbers.
pub fn omega_with(label: &str, b: &[Q], max_degree: usize) -> Result<Element> {
    exp_union(&log_omega_with(label, b, max_degree), max_degree)
}

pub fn omega_inverse(label: &str, max_degree: usize) -> Result<Element> {
    exp_union(&log_omega(label, max_degree).scale_q(&Q::from_integer((-1).into())), max_degree)
}

/// The wheeling map: symmetrization after the differential operator of the wheels element,
/// both along `label`.
pub fn upsilon(e: &Element, label: &str, max_degree: usize) -> Result<Element> {
    // a wheel can only glue into as many legs as a term has
    let legs = e.terms().map(|(d, _)| d.legs_on(label)).max().unwrap_or(0);
    let o = omega(label, legs.max(2))?;
    chi(&apply_diffop(&o, e, label)?.truncated(max_degree), label)
}

/// Changes the kind of one label in every term.
pub fn with_kind(e: &Element, label: &str, kind: SkeletonKind) -> Result<Element> {
    let sig = Arc::new(e.sig().with_kind(label, kind)?);
    e.map(sig, |d| Ok(Element::from_diagram(&d.with_kind(label, kind)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};
    use crate::ops::disjoint_union;

    #[test]
    fn low_degree_parts() {
        let o = omega("x", 4).unwrap();
        assert_eq!(o.degree_part(0).len(), 1);
        assert!(o.degree_part(1).is_zero());
        let w2: Element = Element::from_diagram(&wheel("x", 2));
        assert_eq!(o.degree_part(2), w2.scale_q(&q(1, 48)).with_truncation(Some(4)));
        let w4: Element = Element::from_diagram(&wheel("x", 4));
        let mut expect = w4.scale_q(&q(-1, 5760));
        expect.add_scaled(&disjoint_union(&w2, &w2).unwrap().scale_q(&q(1, 4608)), &qi(1));
        assert_eq!(o.degree_part(4), expect.with_truncation(Some(4)));
    }

    #[test]
    fn inverse() {
        let o = omega("x", 6).unwrap();
        let oi = omega_inverse("x", 6).unwrap();
        assert_eq!(disjoint_union(&o, &oi).unwrap(), Element::one(o.sig().clone()).with_truncation(Some(6)));
    }
}
