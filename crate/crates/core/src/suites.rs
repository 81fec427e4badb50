//! Identity suites and their reports.
//!
//! Every suite is a list of checks. A check records what was expected (control experiments
//! expect a failure) and what was observed; it passes when the two agree. Reports contain no
//! timings so that equal configurations give byte-identical output.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::coeff::{factorial, fmt_q, q, qi, Coeff, Laurent, Q};
use crate::diagram::{
    enumerate_classes, generate_relations, star_count_vectors, strut, strut_between, theta, wheel, Component, Diagram,
    RelationKind, Signature, SkeletonKind,
};
use crate::element::Element;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::ops::{
    apply_diffop, chi, chi_circle, coproduct, disjoint_union, exp_stack, exp_union, inner_product,
    inner_product_labels, isolated_chord, mapping_degree, pair, pi_bc, psi_star_formal, stack, to_laurent,
};
use crate::quotient::{BlockKey, DEFAULT_CUTOFF, FORMAT_VERSION, HARD_CAP, RELGEN_VERSION};
use crate::series::{appendix_f, modified_bernoulli, Series};
use crate::sl2::seeded_rng;
use crate::wheels::{omega, omega_with, upsilon, with_kind};

pub const SCHEMA: &str = "wheelkit-report/1";

/// Suite names in run order.
pub const SUITES: &[&str] =
    &["wheeling", "wheels-n0", "delta-omega", "pseudo-linearity", "one-plus-one", "appendix", "exercise", "structure"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suites: Vec<String>,
    pub max_degree: usize,
    pub cache_dir: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// random samples per structural property
    pub samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            max_degree: DEFAULT_CUTOFF,
            cache_dir: None,
            output: None,
            seed: 0,
            samples: 200,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_degree > HARD_CAP {
            return Err(Error::DegreeCutoff { requested: self.max_degree, cutoff: HARD_CAP });
        }
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(Error::Precondition(format!("unknown suite {s:?}")));
            }
        }
        Ok(())
    }

    /// The fields that determine the results (paths excluded).
    fn to_json(&self) -> Value {
        json!({"suites": self.suites, "max_degree": self.max_degree, "seed": self.seed, "samples": self.samples})
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub degree: Option<usize>,
    pub expected: Status,
    pub observed: Status,
    pub detail: Value,
    pub witness: Option<Value>,
}

impl Check {
    fn new(name: impl Into<String>, degree: Option<usize>, observed: bool) -> Self {
        Check {
            name: name.into(),
            degree,
            expected: Status::Pass,
            observed: Status::of(observed),
            detail: Value::Null,
            witness: None,
        }
    }

    fn expect_fail(mut self) -> Self {
        self.expected = Status::Fail;
        self
    }

    fn detail(mut self, v: Value) -> Self {
        self.detail = v;
        self
    }

    fn witness(mut self, w: Option<Value>) -> Self {
        self.witness = w;
        self
    }

    pub fn ok(&self) -> bool {
        self.expected == self.observed
    }

    fn to_json(&self) -> Value {
        json!({
            "check": self.name,
            "degree": self.degree,
            "expect": self.expected.name(),
            "observed": self.observed.name(),
            "status": Status::of(self.ok()).name(),
            "detail": self.detail,
            "witness": self.witness,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: String,
    pub identity: String,
    pub checks: Vec<Check>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::ok)
    }

    pub fn check(&self, name: &str, degree: Option<usize>) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name && c.degree == degree)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub suites: Vec<SuiteResult>,
    pub blocks: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config.to_json(),
            "status": Status::of(self.passed()).name(),
            "suites": self.suites.iter().map(|s| json!({
                "suite": s.name,
                "identity": s.identity,
                "status": Status::of(s.passed()).name(),
                "checks": s.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "quotients": {
                "format": FORMAT_VERSION,
                "relations": RELGEN_VERSION,
                "blocks": self.blocks,
            },
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("suite,check,degree,expect,observed,status\n");
        for s in &self.suites {
            for c in &s.checks {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    s.name,
                    csv_field(&c.name),
                    c.degree.map(|d| d.to_string()).unwrap_or_default(),
                    c.expected.name(),
                    c.observed.name(),
                    Status::of(c.ok()).name()
                ));
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Runs the configured suites on a fresh engine.
pub fn run(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let engine = Engine::new(config.max_degree.clamp(DEFAULT_CUTOFF, HARD_CAP), config.cache_dir.clone())?;
    let mut suites = Vec::new();
    for name in SUITES {
        if config.suites.iter().any(|s| s == name) {
            log::info!("running suite {name}");
            suites.push(run_suite(&engine, name, config)?);
        }
    }
    Ok(SuiteReport { config: config.clone(), suites, blocks: engine.reducer().block_log() })
}

pub fn run_suite(engine: &Engine, name: &str, config: &SuiteConfig) -> Result<SuiteResult> {
    let m = config.max_degree;
    let (identity, checks) = match name {
        "wheeling" => ("the wheeling map, symmetrization after the differential operator of the wheels element, is multiplicative and bijective", suite_wheeling(engine, m)?),
        "wheels-n0" => ("n-fold cabling of the framed unknot: psi_n(nu # exp(chord/2n)) = nu # exp(n chord/2) as Laurent polynomials in n", suite_wheels_n0(engine, m)?),
        "delta-omega" => ("the coproduct of the wheels element is Omega tensor Omega once link relations are imposed", suite_delta_omega(engine, m)?),
        "pseudo-linearity" => ("the differential operator of D applied to Omega is <D, Omega> Omega, and its boundary-connected part vanishes unless D is empty", suite_pseudo_linearity(engine, m)?),
        "one-plus-one" => ("doubling H0 = exp(strut) Omega along x equals stacking two copies along z", suite_one_plus_one(engine, m)?),
        "appendix" => ("sl2 weights: theta, strut pairings, wheels against struts, the pairing of Omega with strut powers, coefficient chain", suite_appendix(engine)?),
        "exercise" => ("inverse symmetrization of exp(chord/2) on an interval is Omega times exp(strut/2)", suite_exercise(engine, m)?),
        "structure" => ("duality, adjointness, composition, link descent, doubling against differential operators, leg bound, dimensions, mapping degree 0", suite_structure(engine, m, config.seed, config.samples)?),
        other => return Err(Error::Precondition(format!("unknown suite {other:?}"))),
    };
    Ok(SuiteResult { name: name.to_string(), identity: identity.to_string(), checks })
}

// ---------------------------------------------------------------------------------------------
// helpers

fn star_sig(kind: SkeletonKind, labels: &[&str]) -> Arc<Signature> {
    Arc::new(Signature::new(labels.iter().map(|l| Component::new(kind, *l)).collect()).expect("distinct labels"))
}

fn witness_json<C: Coeff>(sig: &Arc<Signature>, terms: &[(Diagram, C)]) -> Value {
    let e = Element::from_terms(sig.clone(), terms.iter().map(|(d, c)| (d.embed(sig).expect("same labels"), c.clone())));
    e.to_json()
}

/// One check per degree `0..=max` comparing `a` and `b` modulo relations.
fn per_degree<C: Coeff>(engine: &Engine, name: &str, a: &Element<C>, b: &Element<C>, max: usize) -> Result<Vec<Check>> {
    let diffs = engine.reducer().differences(a, b, max)?;
    Ok((0..=max)
        .map(|d| {
            let w = diffs.get(&d);
            Check::new(name, Some(d), w.is_none()).witness(w.map(|w| witness_json(a.sig(), w)))
        })
        .collect())
}

/// Control: equal below `degree`, different at `degree`.
fn control<C: Coeff>(engine: &Engine, name: &str, a: &Element<C>, b: &Element<C>, degree: usize) -> Result<Check> {
    let diffs = engine.reducer().differences(a, b, degree)?;
    let first = diffs.keys().next().copied();
    let w = diffs.get(&degree).map(|w| witness_json(a.sig(), w));
    Ok(Check::new(name, Some(degree), first != Some(degree))
        .expect_fail()
        .detail(json!({"first_failing_degree": first}))
        .witness(w))
}

/// Basis diagrams of the legged quotient of one degree, over all leg counts.
fn basis(engine: &Engine, sig: &Arc<Signature>, degree: usize) -> Result<Vec<Diagram>> {
    let mut out = Vec::new();
    for counts in star_count_vectors(sig, degree) {
        out.extend(engine.reducer().block(&BlockKey { sig: sig.clone(), degree, counts })?.basis().cloned());
    }
    Ok(out)
}

/// Nonzero canonical legged diagrams of degree `0..=max`.
fn classes_upto(sig: &Arc<Signature>, max: usize) -> Vec<Diagram> {
    let mut out = Vec::new();
    for degree in 0..=max {
        for counts in star_count_vectors(sig, degree) {
            out.extend(enumerate_classes(sig, degree, &counts).into_iter().filter(|c| !c.zero).map(|c| c.diagram));
        }
    }
    out
}

fn el(d: &Diagram) -> Element {
    Element::from_diagram(d)
}

fn omega_on(label: &str, kind: SkeletonKind, max: usize) -> Result<Element> {
    let o = omega(label, max)?;
    if kind == SkeletonKind::Star {
        Ok(o)
    } else {
        with_kind(&o, label, kind)
    }
}

// ---------------------------------------------------------------------------------------------
// wheeling

fn suite_wheeling(engine: &Engine, m: usize) -> Result<Vec<Check>> {
    let x = star_sig(SkeletonKind::Star, &["x"]);
    let bases: Vec<Vec<Diagram>> = (0..=m).map(|n| basis(engine, &x, n)).collect::<Result<_>>()?;
    let mut ups: BTreeMap<Diagram, Element> = BTreeMap::new();
    for (n, b) in bases.iter().enumerate() {
        for d in b {
            ups.insert(d.clone(), upsilon(&el(d), "x", n)?);
        }
    }
    let mut checks = Vec::new();
    for n in 0..=m {
        let mut pairs = 0;
        let mut witness = None;
        for n1 in 0..=n {
            for d1 in &bases[n1] {
                for d2 in &bases[n - n1] {
                    pairs += 1;
                    let lhs = upsilon(&disjoint_union(&el(d1), &el(d2))?, "x", n)?;
                    let rhs = stack(&ups[d1], &ups[d2])?;
                    if witness.is_none() {
                        if let Some(w) = engine.reducer().differences(&lhs, &rhs, n)?.remove(&n) {
                            witness = Some(witness_json(lhs.sig(), &w));
                        }
                    }
                }
            }
        }
        checks.push(
            Check::new("multiplicative on basis pairs", Some(n), witness.is_none())
                .detail(json!({"pairs": pairs}))
                .witness(witness),
        );
    }
    let z = star_sig(SkeletonKind::Interval, &["x"]);
    for (n, b) in bases.iter().enumerate() {
        let mut rows = Vec::new();
        let mut keys: BTreeMap<_, usize> = BTreeMap::new();
        for d in b {
            let mut row = BTreeMap::new();
            for (k, v) in engine.reducer().coordinates(&ups[d])? {
                let next = keys.len();
                row.insert(*keys.entry(k).or_insert(next), v);
            }
            rows.push(row);
        }
        let r = rank(&rows);
        let dim = engine.reducer().legged_dimension(&z, n)?;
        checks.push(
            Check::new("bijective on a basis", Some(n), r == dim && b.len() == dim)
                .detail(json!({"rank": r, "dim_source": b.len(), "dim_target": dim})),
        );
    }
    // control: symmetrization alone
    let top = m.min(2);
    for n in 0..=top {
        let mut witness = None;
        for n1 in 0..=n {
            for d1 in &bases[n1] {
                for d2 in &bases[n - n1] {
                    let lhs = chi(&disjoint_union(&el(d1), &el(d2))?, "x")?;
                    let rhs = stack(&chi(&el(d1), "x")?, &chi(&el(d2), "x")?)?;
                    if witness.is_none() {
                        if let Some(w) = engine.reducer().differences(&lhs, &rhs, n)?.remove(&n) {
                            witness = Some(witness_json(lhs.sig(), &w));
                        }
                    }
                }
            }
        }
        let c = Check::new("control: symmetrization alone is multiplicative", Some(n), witness.is_none()).witness(witness);
        checks.push(if n == 2 { c.expect_fail() } else { c });
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------------------------
// n-fold cabling

/// `(lhs, rhs)` in Laurent coefficients over the circled star `x`.
fn cabling_sides(engine: &Engine, nu: &Element, m: usize) -> Result<(Element<Laurent>, Element<Laurent>)> {
    let sig = nu.sig().clone();
    let chord = el(&isolated_chord(&sig, "x")?);
    let star = Arc::new(sig.with_kind("x", SkeletonKind::CircledStar)?);
    let mut lhs = Element::<Laurent>::zero(star.clone());
    let mut rhs = Element::<Laurent>::zero(star);
    let mut power = Element::one(sig.clone());
    for j in 0..=m {
        let xj = engine.chi_inverse(&stack(nu, &power)?.truncated(m), "x", m)?;
        let c = Q::new(BigInt::one(), BigInt::from(2).pow(j as u32) * factorial(j as u64));
        let xl = to_laurent(&xj);
        lhs.add_scaled(&psi_star_formal(&xl, "x"), &Laurent::monomial(c.clone(), -(j as i32)));
        rhs.add_scaled(&xl, &Laurent::monomial(c, j as i32));
        power = stack(&power, &chord)?;
    }
    Ok((lhs, rhs))
}

fn suite_wheels_n0(engine: &Engine, m: usize) -> Result<Vec<Check>> {
    let nu = chi_circle(&omega_on("x", SkeletonKind::CircledStar, m)?, "x")?;
    let (lhs, rhs) = cabling_sides(engine, &nu, m)?;
    let mut checks = per_degree(engine, "both sides agree", &lhs, &rhs, m)?;
    let mut negative = Vec::new();
    for ((d, v, l), c) in engine.reducer().coordinates(&lhs)? {
        if d <= m && c.min_power().is_some_and(|p| p < 0) {
            negative.push((l.union(&v)?, c));
        }
    }
    checks.push(
        Check::new("left side has no negative powers of n", None, negative.is_empty())
            .witness((!negative.is_empty()).then(|| witness_json(lhs.sig(), &negative))),
    );
    let unit = Element::one(nu.sig().clone());
    let (l0, r0) = cabling_sides(engine, &unit, m.min(2))?;
    let diffs = engine.reducer().differences(&l0, &r0, m.min(2))?;
    let first = diffs.keys().next().copied();
    checks.push(
        Check::new("control: nu replaced by the unit", None, first.is_none())
            .expect_fail()
            .detail(json!({"first_failing_degree": first}))
            .witness(first.map(|d| witness_json(l0.sig(), &diffs[&d]))),
    );
    Ok(checks)
}

// ---------------------------------------------------------------------------------------------
// coproduct of the wheels element

fn delta_omega_sides(kind: SkeletonKind, m: usize) -> Result<(Element, Element)> {
    let o = omega_on("x", kind, m)?;
    let lhs = coproduct(&o, "x", &["x1", "x2"])?;
    let sig = lhs.sig().clone();
    let rhs = disjoint_union(&o.relabel("x", "x1")?.embed(&sig)?, &o.relabel("x", "x2")?.embed(&sig)?)?.truncated(m);
    Ok((lhs, rhs))
}

fn suite_delta_omega(engine: &Engine, m: usize) -> Result<Vec<Check>> {
    let (lhs, rhs) = delta_omega_sides(SkeletonKind::CircledStar, m)?;
    let mut checks = per_degree(engine, "with link relations", &lhs, &rhs, m)?;
    if m >= 2 {
        let (lhs, rhs) = delta_omega_sides(SkeletonKind::Star, 2)?;
        checks.push(control(engine, "without link relations", &lhs, &rhs, 2)?);
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------------------------
// pseudo-linearity

fn suite_pseudo_linearity(engine: &Engine, m: usize) -> Result<Vec<Check>> {
    let x = star_sig(SkeletonKind::Star, &["x"]);
    let mut checks = Vec::new();
    let o = omega_on("x", SkeletonKind::CircledStar, m)?;
    checks.push(Check::new("empty operator", Some(0), apply_diffop(&Element::one(x.clone()), &o, "x")? == o.untruncated()));
    checks.push(Check::new(
        "a strut is not an admissible operator",
        Some(1),
        apply_diffop(&el(&strut("x")), &o, "x").is_err(),
    ));
    for n in 1..=m {
        let out = m;
        let mut tried = 0;
        let mut witness = None;
        let mut bc_witness = None;
        for d in basis(engine, &x, n)? {
            if d.has_strut_on("x") {
                continue;
            }
            tried += 1;
            let d = el(&d);
            let o = omega_on("x", SkeletonKind::CircledStar, out + d.terms().map(|(t, _)| t.legs_on("x")).max().unwrap_or(0))?;
            let lhs = apply_diffop(&d, &o, "x")?.truncated(out);
            let scalar = inner_product(&d, &o, "x")?;
            let rhs = disjoint_union(&scalar, &o)?.truncated(out);
            if witness.is_none() {
                if let Some((_, w)) = engine.reducer().differences(&lhs, &rhs, out)?.into_iter().next() {
                    witness = Some(witness_json(lhs.sig(), &w));
                }
            }
            if bc_witness.is_none() {
                let zero = Element::zero(lhs.sig().clone());
                if let Some((_, w)) = engine.reducer().differences(&pi_bc(&lhs), &zero, out)?.into_iter().next() {
                    bc_witness = Some(witness_json(lhs.sig(), &w));
                }
            }
        }
        checks.push(
            Check::new("operator of D on Omega is <D, Omega> Omega", Some(n), witness.is_none())
                .detail(json!({"operators": tried, "output_degree": out}))
                .witness(witness),
        );
        checks.push(
            Check::new("boundary-connected part vanishes", Some(n), bc_witness.is_none())
                .detail(json!({"operators": tried, "output_degree": out}))
                .witness(bc_witness),
        );
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------------------------
// 1+1=2

fn doubling_sides(m: usize, with_omega: bool) -> Result<(Element, Element)> {
    let sig = Arc::new(Signature::new(vec![
        Component::new(SkeletonKind::Interval, "z"),
        Component::new(SkeletonKind::CircledStar, "x"),
    ])?);
    let es = exp_union(&el(&strut_between(&sig, "x", "z")), m)?;
    let h0 = if with_omega {
        disjoint_union(&omega_on("x", SkeletonKind::CircledStar, m)?.embed(&sig)?, &es)?.truncated(m)
    } else {
        es
    };
    let lhs = coproduct(&h0, "x", &["x1", "x2"])?;
    let s3 = lhs.sig().clone();
    let rhs = stack(&h0.relabel("x", "x1")?.embed(&s3)?, &h0.relabel("x", "x2")?.embed(&s3)?)?.truncated(m);
    Ok((lhs, rhs))
}

fn suite_one_plus_one(engine: &Engine, m: usize) -> Result<Vec<Check>> {
    let (lhs, rhs) = doubling_sides(m, true)?;
    let mut checks = per_degree(engine, "doubling equals stacking", &lhs, &rhs, m)?;
    // the mixed wheel already vanishes modulo link relations, so the wheels first matter in degree 4
    if m >= 4 {
        let (lhs, rhs) = doubling_sides(4, false)?;
        checks.push(control(engine, "control: without the wheels element", &lhs, &rhs, 4)?);
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------------------------
// sl2

fn strut_power(n: usize) -> Result<Element> {
    let s = el(&strut("x"));
    let mut p = Element::one(s.sig().clone());
    for _ in 0..n {
        p = disjoint_union(&p, &s)?;
    }
    Ok(p)
}

fn sawon(engine: &Engine, o: &Element, n: usize) -> Result<Q> {
    engine.sl2().pair(o, &strut_power(n)?, "x")
}

fn suite_appendix(engine: &Engine) -> Result<Vec<Check>> {
    let sl2 = engine.sl2();
    let mut checks = Vec::new();
    let t = sl2.diagram_value(&theta())?;
    checks.push(Check::new("theta", None, t == qi(6)).detail(json!({"value": fmt_q(&t)})));
    for n in 0..=6 {
        let v = sl2.pair(&strut_power(n)?, &strut_power(n)?, "x")?;
        let want = Q::from_integer(factorial(2 * n as u64 + 1));
        checks.push(
            Check::new("strut power paired with itself is (2n+1)!", Some(n), v == want)
                .detail(json!({"value": fmt_q(&v)})),
        );
    }
    for n in 1..=4 {
        let s = strut_power(n)?;
        let w = sl2.pair(&s, &el(&wheel("x", 2 * n)), "x")?;
        let two = sl2.pair(&s, &s, "x")? * qi(2);
        checks.push(
            Check::new("wheel equals twice the strut power", Some(n), w == two)
                .detail(json!({"wheel": fmt_q(&w), "struts": fmt_q(&two)})),
        );
    }
    let o = omega("x", 8)?;
    for n in 0..=4 {
        let v = sawon(engine, &o, n)?;
        checks.push(
            Check::new("Omega paired with a strut power is 4^-n", Some(n), v == q(1, 4i64.pow(n as u32)))
                .detail(json!({"value": fmt_q(&v)})),
        );
    }
    let f = appendix_f(4);
    let b = modified_bernoulli(4);
    let g = Series::from_fn(4, |k| &b[k] * qi(2)).exp()?;
    for n in 0..=4 {
        let v = f.coeff(n) * Q::from_integer(factorial(2 * n as u64 + 1));
        checks.push(
            Check::new("f_n (2n+1)! is 4^-n", Some(n), v == q(1, 4i64.pow(n as u32)) && g.coeff(n) == f.coeff(n))
                .detail(json!({"value": fmt_q(&v), "f_n": fmt_q(&f.coeff(n)), "f_n_from_bernoulli": fmt_q(&g.coeff(n))})),
        );
    }
    // control: perturb b_4
    let mut bp = modified_bernoulli(4);
    bp[2] += q(1, 5760);
    let op = omega_with("x", &bp, 8)?;
    for n in 1..=2 {
        let v = sawon(engine, &op, n)?;
        let c = Check::new("control: perturbed b_4", Some(n), v == q(1, 4i64.pow(n as u32))).detail(json!({"value": fmt_q(&v)}));
        checks.push(if n == 2 { c.expect_fail() } else { c });
    }
    Ok(checks)
}

// ---------------------------------------------------------------------------------------------
// exercise

fn suite_exercise(engine: &Engine, m: usize) -> Result<Vec<Check>> {
    let z = star_sig(SkeletonKind::Interval, &["x"]);
    let half = q(1, 2);
    let chord = el(&isolated_chord(&z, "x")?).scale_q(&half);
    let lhs = engine.chi_inverse(&exp_stack(&chord, m)?, "x", m)?;
    let rhs = disjoint_union(&omega("x", m)?, &exp_union(&el(&strut("x")).scale_q(&half), m)?)?.truncated(m);
    per_degree(engine, "inverse symmetrization", &lhs, &rhs, m)
}

// ---------------------------------------------------------------------------------------------
// structure

struct Tally {
    cases: usize,
    nonzero: usize,
    witness: Option<Value>,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, nonzero: 0, witness: None }
    }

    fn record(&mut self, lhs: &Element, rhs: &Element, inputs: impl FnOnce() -> Value) {
        self.cases += 1;
        if !lhs.is_zero() {
            self.nonzero += 1;
        }
        if self.witness.is_none() && lhs != rhs {
            self.witness = Some(json!({"inputs": inputs(), "lhs": lhs.to_json(), "rhs": rhs.to_json()}));
        }
    }

    fn check(self, name: &str, exhaustive: usize) -> Check {
        Check::new(name, None, self.witness.is_none())
            .detail(json!({"exhaustive": exhaustive, "sampled": self.cases - exhaustive, "nonzero": self.nonzero}))
            .witness(self.witness)
    }
}

fn legs(d: &Diagram) -> usize {
    d.legs_on("x")
}

/// A combination of one to three diagrams from `pool` with small nonzero coefficients.
fn random_combination(rng: &mut ChaCha8Rng, pool: &[&Diagram]) -> Element {
    let sig = pool[0].sig().clone();
    let mut e = Element::zero(sig);
    for _ in 0..rng.gen_range(1..=3) {
        let d = pool.choose(rng).expect("nonempty pool");
        let mut c = rng.gen_range(1..=3i64);
        if rng.gen_bool(0.5) {
            c = -c;
        }
        e.add_diagram(d, qi(c));
    }
    e
}

fn by_legs(pool: &[Diagram], k: usize, max_degree: usize) -> Vec<&Diagram> {
    pool.iter().filter(|d| legs(d) == k && d.degree() <= max_degree).collect()
}

fn suite_structure(engine: &Engine, m: usize, seed: u64, samples: usize) -> Result<Vec<Check>> {
    let x = star_sig(SkeletonKind::Star, &["x"]);
    let pool = classes_upto(&x, m);
    let strutless: Vec<Diagram> = pool.iter().filter(|d| !d.has_strut_on("x")).cloned().collect();
    let mut rng = seeded_rng(seed);
    let mut checks = Vec::new();
    let e2 = || -> Result<Arc<Signature>> { Ok(star_sig(SkeletonKind::Star, &["x1", "x2"])) };

    // duality
    let s12 = e2()?;
    let duality = |c: &Element, d1: &Element, d2: &Element| -> Result<(Element, Element)> {
        let lhs = inner_product(c, &disjoint_union(d1, d2)?, "x")?;
        let cc = coproduct(c, "x", &["x1", "x2"])?;
        let dd = disjoint_union(&d1.relabel("x", "x1")?.embed(&s12)?, &d2.relabel("x", "x2")?.embed(&s12)?)?;
        Ok((lhs, inner_product_labels(&cc, &dd, &["x1", "x2"])?))
    };
    let mut t = Tally::new();
    for c in &strutless {
        for d1 in &pool {
            for d2 in &pool {
                if legs(d1) + legs(d2) == legs(c) && c.degree() + d1.degree() + d2.degree() <= m {
                    let (l, r) = duality(&el(c), &el(d1), &el(d2))?;
                    t.record(&l, &r, || json!([c.to_json(), d1.to_json(), d2.to_json()]));
                }
            }
        }
    }
    let ex = t.cases;
    for _ in 0..samples {
        let c = strutless.choose(&mut rng).expect("pool");
        let k = legs(c);
        let k1 = rng.gen_range(0..=k);
        let (p1, p2) = (by_legs(&pool, k1, m), by_legs(&pool, k - k1, m));
        if p1.is_empty() || p2.is_empty() {
            t.record(&Element::zero(x.clone()), &Element::zero(x.clone()), || Value::Null);
            continue;
        }
        let cc = random_combination(&mut rng, &strutless.iter().filter(|d| legs(d) == k).collect::<Vec<_>>());
        let (d1, d2) = (random_combination(&mut rng, &p1), random_combination(&mut rng, &p2));
        let (l, r) = duality(&cc, &d1, &d2)?;
        t.record(&l, &r, || json!([cc.to_json(), d1.to_json(), d2.to_json()]));
    }
    checks.push(t.check("duality of union and coproduct", ex));

    // adjointness
    let adjoint = |a: &Element, b: &Element, c: &Element| -> Result<(Element, Element)> {
        Ok((inner_product(&disjoint_union(a, b)?, c, "x")?, inner_product(a, &apply_diffop(b, c, "x")?, "x")?))
    };
    let mut t = Tally::new();
    for a in &strutless {
        for b in &strutless {
            for c in &pool {
                if legs(a) + legs(b) == legs(c) && a.degree() + b.degree() + c.degree() <= m {
                    let (l, r) = adjoint(&el(a), &el(b), &el(c))?;
                    t.record(&l, &r, || json!([a.to_json(), b.to_json(), c.to_json()]));
                }
            }
        }
    }
    let ex = t.cases;
    for _ in 0..samples {
        let a = random_combination(&mut rng, &strutless.iter().collect::<Vec<_>>());
        let b = random_combination(&mut rng, &strutless.iter().collect::<Vec<_>>());
        let k: usize = [&a, &b].iter().map(|e| e.terms().map(|(d, _)| legs(d)).max().unwrap_or(0)).sum();
        let pc = by_legs(&pool, k, m);
        let c = if pc.is_empty() { random_combination(&mut rng, &pool.iter().collect::<Vec<_>>()) } else { random_combination(&mut rng, &pc) };
        let (l, r) = adjoint(&a, &b, &c)?;
        t.record(&l, &r, || json!([a.to_json(), b.to_json(), c.to_json()]));
    }
    checks.push(t.check("adjointness of union and differential operators", ex));

    // composition
    let compose = |c1: &Element, c2: &Element, d: &Element| -> Result<(Element, Element)> {
        Ok((apply_diffop(&disjoint_union(c1, c2)?, d, "x")?, apply_diffop(c1, &apply_diffop(c2, d, "x")?, "x")?))
    };
    let mut t = Tally::new();
    for c1 in &strutless {
        for c2 in &strutless {
            for d in &pool {
                if legs(c1) + legs(c2) <= legs(d) && c1.degree() + c2.degree() + d.degree() <= m {
                    let (l, r) = compose(&el(c1), &el(c2), &el(d))?;
                    t.record(&l, &r, || json!([c1.to_json(), c2.to_json(), d.to_json()]));
                }
            }
        }
    }
    let ex = t.cases;
    let all: Vec<&Diagram> = pool.iter().collect();
    let sl: Vec<&Diagram> = strutless.iter().collect();
    for _ in 0..samples {
        let (c1, c2, d) = (random_combination(&mut rng, &sl), random_combination(&mut rng, &sl), random_combination(&mut rng, &all));
        let (l, r) = compose(&c1, &c2, &d)?;
        t.record(&l, &r, || json!([c1.to_json(), c2.to_json(), d.to_json()]));
    }
    checks.push(t.check("composition of differential operators", ex));

    // link descent
    let cs = star_sig(SkeletonKind::CircledStar, &["x"]);
    let mut t = Tally::new();
    let mut vectors = Vec::new();
    for n in 1..=m {
        for r in generate_relations(n, &cs) {
            if r.kind == RelationKind::Link {
                let k = r.element.terms().next().map(|(d, _)| legs(d)).unwrap_or(0);
                vectors.push((n, k, with_kind(&r.element, "x", SkeletonKind::Star)?));
            }
        }
    }
    let empty = Arc::new(Signature::empty());
    let descent = |rv: &Element, d: &Element, t: &mut Tally| -> Result<()> {
        let p = pair(rv, d, "x")?;
        let zero = Element::zero(empty.clone());
        let diffs = engine.reducer().differences(&p, &zero, engine.cutoff())?;
        t.cases += 1;
        if !p.is_zero() {
            t.nonzero += 1;
        }
        if t.witness.is_none() {
            if let Some((_, w)) = diffs.into_iter().next() {
                t.witness = Some(json!({"relation": rv.to_json(), "diagram": d.to_json(), "pairing": witness_json(&empty, &w)}));
            }
        }
        Ok(())
    };
    for (n, k, rv) in &vectors {
        for d in &pool {
            if legs(d) == *k && n + d.degree() - k <= m {
                descent(rv, &el(d), &mut t)?;
            }
        }
    }
    let ex = t.cases;
    for _ in 0..samples {
        let (n, k, rv) = vectors.choose(&mut rng).expect("link vectors");
        let pd: Vec<&Diagram> = pool.iter().filter(|d| legs(d) == *k && n + d.degree() - k <= m).collect();
        if pd.is_empty() {
            continue;
        }
        let d = random_combination(&mut rng, &pd);
        descent(rv, &d, &mut t)?;
    }
    checks.push(
        Check::new("pairing descends through link relations", None, t.witness.is_none())
            .detail(json!({"exhaustive": ex, "sampled": t.cases - ex, "vectors": vectors.len(), "nonzero_before_reduction": t.nonzero}))
            .witness(t.witness),
    );

    // doubling against differential operators
    let double = |c: &Element, d: &Element| -> Result<(Element, Element, Element)> {
        let lhs = coproduct(&apply_diffop(c, d, "x")?, "x", &["x1", "x2"])?;
        let dd = coproduct(d, "x", &["x1", "x2"])?;
        let r1 = apply_diffop(&c.relabel("x", "x1")?, &dd, "x1")?;
        let r2 = apply_diffop(&c.relabel("x", "x2")?, &dd, "x2")?;
        Ok((lhs, r1, r2))
    };
    let mut t = Tally::new();
    for c in &strutless {
        for d in &pool {
            if legs(c) <= legs(d) && c.degree() + d.degree() <= m {
                let (l, r1, r2) = double(&el(c), &el(d))?;
                t.record(&l, &r1, || json!([c.to_json(), d.to_json()]));
                t.record(&l, &r2, || json!([c.to_json(), d.to_json()]));
            }
        }
    }
    let ex = t.cases;
    for _ in 0..samples {
        let (c, d) = (random_combination(&mut rng, &sl), random_combination(&mut rng, &all));
        let (l, r1, r2) = double(&c, &d)?;
        t.record(&l, &r1, || json!([c.to_json(), d.to_json()]));
        t.record(&l, &r2, || json!([c.to_json(), d.to_json()]));
    }
    checks.push(t.check("doubling commutes with differential operators", ex));

    // leg bound
    let z = star_sig(SkeletonKind::Interval, &["x"]);
    let zpool: Vec<Diagram> = classes_upto(&z, m).into_iter().filter(|d| d.degree() >= 1).collect();
    let mut cases = 0;
    let mut witness = None;
    let bound = |xs: &[Element], cases: &mut usize, witness: &mut Option<Value>| -> Result<()> {
        let mut prod = Element::one(z.clone());
        for e in xs {
            prod = stack(&prod, e)?;
        }
        let y = engine.chi_inverse(&prod, "x", m)?;
        *cases += 1;
        if witness.is_none() && y.terms().any(|(d, _)| legs(d) < xs.len()) {
            *witness = Some(json!({"inputs": xs.iter().map(Element::to_json).collect::<Vec<_>>(), "inverse": y.to_json()}));
        }
        Ok(())
    };
    let mut tuples: Vec<Vec<&Diagram>> = vec![Vec::new()];
    let mut all_tuples = Vec::new();
    while !tuples.is_empty() {
        let mut next = Vec::new();
        for t in &tuples {
            let used: usize = t.iter().map(|d| d.degree()).sum();
            for d in &zpool {
                if used + d.degree() <= m {
                    let mut u = t.clone();
                    u.push(d);
                    next.push(u);
                }
            }
        }
        all_tuples.extend(next.iter().cloned());
        tuples = next;
    }
    for tup in &all_tuples {
        bound(&tup.iter().map(|d| el(d)).collect::<Vec<_>>(), &mut cases, &mut witness)?;
    }
    let ex = cases;
    for _ in 0..samples {
        let k = rng.gen_range(1..=m.max(1));
        let mut budget = m;
        let mut xs = Vec::new();
        for i in 0..k {
            let hi = budget - (k - 1 - i);
            let deg = rng.gen_range(1..=hi.max(1));
            let pd: Vec<&Diagram> = zpool.iter().filter(|d| d.degree() == deg).collect();
            if pd.is_empty() || hi == 0 {
                break;
            }
            budget -= deg;
            xs.push(random_combination(&mut rng, &pd));
        }
        if !xs.is_empty() {
            bound(&xs, &mut cases, &mut witness)?;
        }
    }
    checks.push(
        Check::new("inverse symmetrization of a k-fold product has at least k legs", None, witness.is_none())
            .detail(json!({"exhaustive": ex, "sampled": cases - ex}))
            .witness(witness),
    );

    // dimensions
    for n in 0..=m {
        let b = engine.reducer().legged_dimension(&x, n)?;
        let a = engine.reducer().legged_dimension(&z, n)?;
        let mut tb = 0;
        let mut ta = 0;
        for k in 0..=n {
            let v = engine.reducer().vacuum_dimension(n - k)?;
            tb += v * engine.reducer().legged_dimension(&x, k)?;
            ta += v * engine.reducer().legged_dimension(&z, k)?;
        }
        checks.push(
            Check::new("dimensions of star and interval quotients agree", Some(n), a == b && ta == tb)
                .detail(json!({"legged_star": b, "legged_interval": a, "total_star": tb, "total_interval": ta})),
        );
    }

    // mapping degree 0
    let zx = Arc::new(Signature::new(vec![
        Component::new(SkeletonKind::Interval, "z"),
        Component::new(SkeletonKind::Star, "x"),
    ])?);
    let mut seen = 0;
    let mut witness = None;
    for d in classes_upto(&zx, m) {
        if mapping_degree(&d, "x") != 0 || has_strut_between(&d, "x", "x") {
            continue;
        }
        seen += 1;
        if witness.is_none() && !wheels_and_struts(&d) {
            witness = Some(d.to_json());
        }
    }
    checks.push(
        Check::new("mapping degree 0 means wheels and x-z struts", None, witness.is_none())
            .detail(json!({"diagrams": seen}))
            .witness(witness),
    );
    Ok(checks)
}

fn has_strut_between(d: &Diagram, a: &str, b: &str) -> bool {
    let (Some(ia), Some(ib)) = (d.sig().index_of(a), d.sig().index_of(b)) else { return false };
    d.strut_components().iter().any(|&(p, q)| {
        let on = |dart, i: usize| d.attach(i).contains(&dart);
        (on(p, ia) && on(q, ib)) || (on(p, ib) && on(q, ia))
    })
}

/// Every component is an x-z strut or a wheel with all spokes on x.
fn wheels_and_struts(d: &Diagram) -> bool {
    if d.loops() > 0 {
        return false;
    }
    let (Some(ix), Some(iz)) = (d.sig().index_of("x"), d.sig().index_of("z")) else { return false };
    let leg_of = |dart| {
        if d.attach(ix).contains(&dart) {
            Some(ix)
        } else if d.attach(iz).contains(&dart) {
            Some(iz)
        } else {
            None
        }
    };
    d.connected_components().iter().all(|c| {
        let vertex_darts = c.darts.iter().filter(|&&x| leg_of(x).is_none()).count();
        let x_legs = c.darts.iter().filter(|&&x| leg_of(x) == Some(ix)).count();
        let z_legs = c.darts.iter().filter(|&&x| leg_of(x) == Some(iz)).count();
        if vertex_darts == 0 {
            return x_legs == 1 && z_legs == 1;
        }
        // k vertices, each with one x spoke and two rim edges to other vertices
        let k = vertex_darts / 3;
        z_legs == 0
            && x_legs == k
            && d.vertices().iter().filter(|r| c.darts.contains(&r[0])).all(|r| {
                let spokes = r.iter().filter(|&&s| leg_of(d.partner(s)) == Some(ix)).count();
                let self_edge = r.iter().any(|&s| r.contains(&d.partner(s)));
                spokes == 1 && !self_edge
            })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = SuiteConfig::default();
        assert!(c.validate().is_ok());
        c.max_degree = 7;
        assert!(c.validate().is_err());
        c.max_degree = 2;
        c.suites = vec!["nope".into()];
        assert!(c.validate().is_err());
    }

    #[test]
    fn wheels_and_struts_shapes() {
        let zx = Arc::new(
            Signature::new(vec![Component::new(SkeletonKind::Interval, "z"), Component::new(SkeletonKind::Star, "x")])
                .unwrap(),
        );
        assert!(wheels_and_struts(&strut_between(&zx, "x", "z")));
        assert!(wheels_and_struts(&wheel("x", 3).embed(&zx).unwrap()));
        assert!(!wheels_and_struts(&strut_between(&zx, "z", "z")));
        assert!(has_strut_between(&strut("x").embed(&zx).unwrap(), "x", "x"));
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("ab"), "ab");
    }
}
