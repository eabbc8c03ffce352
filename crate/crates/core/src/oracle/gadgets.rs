//! Hard instances for approximation sets, given as explicit lists, with
//! machine checks of the facts they are built to exhibit.
//!
//! * `section3`: `K+2` solutions where `{x}` alone is a β-approximation set
//!   but an exact solver never returns `x`, so any set assembled from exact
//!   answers needs all `K+1` others.
//! * `appendix-example`: two instances showing that adding slightly cheaper
//!   copies of three mutually separated solutions does not force all copies
//!   into a smallest approximation set.
//! * `appendix-proof`: the repaired construction in which the copies are
//!   forced, so the smallest set grows from 1 to `L+1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Encoding, ProblemInstance, Sense, SolutionRecord};
use crate::oracle::brute::dot;
use crate::oracle::cover::{minimum_cover, MAX_COVER_SOLUTIONS};
use crate::oracle::sampling::{random_simplex_point, rng, sample_simplex, Probe, Strategy};
use crate::oracle::verify::{verify_set, weight_samples};
use crate::rational::{fmt_q, pow_q, q, Q};
use crate::solvers::explicit::{best_index, ExplicitList, ExplicitSolution};
use crate::weights::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetKind {
    Section3,
    AppendixExample,
    AppendixProof,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 3] = [GadgetKind::Section3, GadgetKind::AppendixExample, GadgetKind::AppendixProof];

    pub fn name(&self) -> &'static str {
        match self {
            GadgetKind::Section3 => "section3",
            GadgetKind::AppendixExample => "appendix-example",
            GadgetKind::AppendixProof => "appendix-proof",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            GadgetKind::Section3 => "K+1 solutions forced when the single best-compromise solution is never optimal",
            GadgetKind::AppendixExample => "cheaper copies of separated solutions need not all be kept",
            GadgetKind::AppendixProof => "repaired construction forcing L+1 solutions instead of 1",
        }
    }
}

impl fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GadgetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GadgetKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown fixture {s:?}")))
    }
}

/// One checked claim about a gadget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Fact {
    fn new(name: &str, holds: bool, detail: impl Into<String>) -> Self {
        Fact { name: name.into(), holds, detail: detail.into() }
    }
}

/// A labelled explicit minimization instance.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub beta: Q,
    pub labels: Vec<String>,
    pub instance: ProblemInstance,
}

impl Gadget {
    fn build(kind: GadgetKind, beta: &Q, solutions: Vec<(String, Vec<Q>)>) -> Result<Self> {
        let labels = solutions.iter().map(|(l, _)| l.clone()).collect();
        let list = ExplicitList {
            solutions: solutions.into_iter().map(|(l, f)| ExplicitSolution { label: Some(l), f }).collect(),
        };
        let instance = ProblemInstance::explicit(Sense::Minimize, list)?;
        Ok(Gadget { kind, beta: beta.clone(), labels, instance })
    }

    pub fn index(&self, label: &str) -> usize {
        self.labels.iter().position(|l| l == label).unwrap_or_else(|| panic!("no solution labelled {label}"))
    }

    pub fn f(&self, label: &str) -> &[Q] {
        let crate::model::Payload::Explicit(list) = self.instance.payload() else { unreachable!() };
        &list.solutions[self.index(label)].f
    }

    /// `wᵀF(x)` for the labelled solution.
    pub fn value(&self, label: &str, w: &[Q]) -> Q {
        dot(self.f(label), w)
    }

    pub fn record(&self, label: &str) -> SolutionRecord {
        SolutionRecord { encoding: Encoding::Index { index: self.index(label) }, f: self.f(label).to_vec() }
    }

    pub fn records(&self, labels: &[&str]) -> Vec<SolutionRecord> {
        labels.iter().map(|l| self.record(l)).collect()
    }

    /// The gadget restricted to the listed solutions, in that order.
    pub fn restricted(&self, labels: &[&str]) -> Result<Gadget> {
        let sols = labels.iter().map(|l| (l.to_string(), self.f(l).to_vec())).collect();
        Gadget::build(self.kind, &self.beta, sols)
    }
}

fn check_beta(beta: &Q) -> Result<()> {
    if *beta <= Q::one() {
        return Err(Error::InvalidArgument(format!("beta must exceed 1, got {}", fmt_q(beta))));
    }
    Ok(())
}

fn probes(ws: &[Vec<Q>]) -> Vec<Probe> {
    ws.iter().map(|w| Probe::Weight(Weight(w.clone()))).collect()
}

/// `F(x) ≤ β·F(y)` in every component.
fn componentwise_within(x: &[Q], y: &[Q], beta: &Q) -> bool {
    x.iter().zip(y).all(|(a, b)| *a <= beta * b)
}

/// Every solution other than those in `allowed` is worse than `β` times
/// `target` at `w` (strictly).
fn only_these_approximate(g: &Gadget, w: &[Q], target: &str, allowed: &[&str]) -> bool {
    let bound = &g.beta * g.value(target, w);
    g.labels.iter().filter(|l| !allowed.contains(&l.as_str())).all(|l| g.value(l, w) > bound)
}

fn sorted_labels(set: &[usize], g: &Gadget) -> String {
    set.iter().map(|i| g.labels[*i].as_str()).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------------------
// K+1 lower bound

/// `X = {x, x0, …, xK}` with `F(x) = (K+1)β·1`, `F_i(x^i) = K+1` and
/// `F_j(x^i) = (K+2)β − 1` for `j ≠ i`.
#[derive(Clone, Debug)]
pub struct Section3 {
    pub gadget: Gadget,
    pub k: usize,
    /// `w^i`: weight `1 − K·t/(K+1)` on component `i`, `t/(K+1)` elsewhere,
    /// with `t` halved from `1/2` until only `x^i` is β-approximate among
    /// `x0, …, xK`.
    pub witnesses: Vec<Vec<Q>>,
}

pub fn section3(beta: &Q, k: usize) -> Result<Section3> {
    check_beta(beta)?;
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    let kk = q(k as i64);
    let top = (&kk + q(1)) * beta;
    let own = &kk + q(1);
    let other = (&kk + q(2)) * beta - q(1);
    let mut sols = vec![("x".to_string(), vec![top; k + 1])];
    for i in 0..=k {
        let f = (0..=k).map(|j| if j == i { own.clone() } else { other.clone() }).collect();
        sols.push((format!("x{i}"), f));
    }
    let gadget = Gadget::build(GadgetKind::Section3, beta, sols)?;
    let others: Vec<String> = (0..=k).map(|i| format!("x{i}")).collect();

    let mut witnesses = Vec::new();
    for i in 0..=k {
        let mut t = Q::new(1.into(), 2.into());
        let w = loop {
            let small = &t / (&kk + q(1));
            let w: Vec<Q> = (0..=k).map(|j| if j == i { q(1) - &kk * &small } else { small.clone() }).collect();
            let target = format!("x{i}");
            let bound = beta * gadget.value(&target, &w);
            if others.iter().filter(|l| **l != target).all(|l| gadget.value(l, &w) > bound) {
                break w;
            }
            t /= q(2);
            if t < Q::new(1.into(), BigInt::from(2).pow(200)) {
                return Err(Error::Internal("no separating witness weight found".into()));
            }
        };
        witnesses.push(w);
    }
    Ok(Section3 { gadget, k, witnesses })
}

pub fn section3_facts(s: &Section3, samples: usize, seed: u64) -> Result<Vec<Fact>> {
    let g = &s.gadget;
    let beta = &g.beta;
    let crate::model::Payload::Explicit(list) = g.instance.payload() else { unreachable!() };
    let mut weights = sample_simplex(s.k + 1, samples, seed);
    weights.extend(s.witnesses.iter().cloned());

    let mut returned_x = 0;
    let mut tied_x = 0;
    for w in &weights {
        if best_index(list, Sense::Minimize, w) == 0 {
            returned_x += 1;
        }
        let vx = g.value("x", w);
        if (0..=s.k).all(|i| g.value(&format!("x{i}"), w) >= vx) {
            tied_x += 1;
        }
    }
    let mut facts = vec![Fact::new(
        "exact oracle never returns x",
        returned_x == 0 && tied_x == 0,
        format!(
            "{} weights in W1; x returned {returned_x} times, x optimal (even with ties) {tied_x} times",
            weights.len()
        ),
    )];

    let componentwise = (0..=s.k).all(|i| componentwise_within(g.f("x"), g.f(&format!("x{i}")), beta));
    let report = verify_set(
        &g.instance,
        &g.records(&["x"]),
        beta,
        &weight_samples(weights.iter().cloned(), Strategy::Simplex),
    )?;
    facts.push(Fact::new(
        "{x} is a beta-approximation set",
        componentwise && report.passed,
        format!(
            "F(x) <= beta*F(x^i) componentwise: {componentwise}; sampled worst ratio {} over {} weights",
            report.worst_ratio, report.samples_tested
        ),
    ));

    let labels: Vec<String> = (0..=s.k).map(|i| format!("x{i}")).collect();
    let without_x = g.restricted(&labels.iter().map(String::as_str).collect::<Vec<_>>())?;
    let cover = minimum_cover(&without_x.instance, beta, &probes(&s.witnesses))?;
    facts.push(Fact::new(
        "without x, every approximation set needs all K+1 solutions",
        cover.len() == s.k + 1,
        format!("minimum cover at the witness weights: {{{}}}", sorted_labels(&cover, &without_x)),
    ));
    Ok(facts)
}

// ---------------------------------------------------------------------------
// Appendix example

/// `A¹ = {x, x1, x2, x3}` and `A² = A¹ ∪ {xbar1, xbar2, xbar3}` (K = 2).
#[derive(Clone, Debug)]
pub struct AppendixExample {
    pub a1: Gadget,
    pub a2: Gadget,
    pub z0: Q,
    /// Separating weights of `x1, x2, x3`, with zero weight on `F_0`.
    pub witnesses: [Vec<Q>; 3],
}

/// `(β⁵ − 1)/β`, the slope separating the regions of the second statement.
fn region_slope(beta: &Q) -> Q {
    (pow_q(beta, 5) - q(1)) / beta
}

pub fn appendix_example(beta: &Q, z0: &Q) -> Result<AppendixExample> {
    check_beta(beta)?;
    let floor = beta * beta / (beta - q(1)) + q(1);
    if *z0 < floor {
        return Err(Error::InvalidArgument(format!(
            "z0 must be at least beta^2/(beta-1) + 1 = {}, got {}",
            fmt_q(&floor),
            fmt_q(z0)
        )));
    }
    let b = |e: i64| pow_q(beta, e);
    let far = q(2) * b(6) - b(2);
    let q_vectors = [
        vec![b(2), far.clone()],
        vec![b(4), b(4)],
        vec![far.clone(), b(2)],
    ];
    let mut sols = vec![("x".to_string(), vec![beta * z0, q(1), q(1)])];
    for (l, v) in q_vectors.iter().enumerate() {
        sols.push((format!("x{}", l + 1), vec![z0.clone(), v[0].clone(), v[1].clone()]));
    }
    for (l, v) in q_vectors.iter().enumerate() {
        sols.push((format!("xbar{}", l + 1), vec![z0 - q(1), v[0].clone(), v[1].clone()]));
    }
    let a2 = Gadget::build(GadgetKind::AppendixExample, beta, sols)?;
    let a1 = a2.restricted(&["x", "x1", "x2", "x3"])?;
    let big = q(2) * b(7) - b(3) - b(4) + q(1);
    let small = b(4) - b(3);
    let witnesses = [
        vec![q(0), big.clone(), small.clone()],
        vec![q(0), q(1), q(1)],
        vec![q(0), small, big],
    ];
    Ok(AppendixExample { a1, a2, z0: z0.clone(), witnesses })
}

/// Random weights concentrated on the three regions of the second statement
/// and their boundaries.
fn region_weights(beta: &Q, n: usize, seed: u64) -> Vec<Vec<Q>> {
    let mut r = rng(seed);
    let slope = region_slope(beta);
    let res = 1u64 << 20;
    let unit = |r: &mut rand_chacha::ChaCha8Rng| Q::new(BigInt::from(r.gen_range(0..=res)), BigInt::from(res));
    (0..n)
        .map(|i| {
            let (mut w1, mut w2) = (unit(&mut r), unit(&mut r));
            if w1.is_zero() && w2.is_zero() {
                w1 = q(1);
            }
            let s = &slope * (&w1 + &w2);
            let w0 = match i % 4 {
                0 => s.clone(),
                1 => &s * unit(&mut r),
                _ => &s * (q(1) + unit(&mut r) * q(r.gen_range(1..=8))),
            };
            if i % 8 == 3 {
                w2 = w1.clone();
            }
            vec![w0, w1, w2]
        })
        .collect()
}

pub fn appendix_example_facts(e: &AppendixExample, samples: usize, seed: u64) -> Result<Vec<Fact>> {
    let g = &e.a2;
    let beta = &g.beta;
    let mut facts = Vec::new();

    let dominated = (1..=3).all(|l| {
        let f = g.f(&format!("x{l}"));
        (1..=2).all(|i| beta * &g.f("x")[i] < f[i])
    });
    facts.push(Fact::new("beta*F_i(x) < F_i(x^l) for i = 1, 2", dominated, "exact"));

    let mut separated = Vec::new();
    for (l, w) in e.witnesses.iter().enumerate() {
        let me = format!("x{}", l + 1);
        let bound = beta * g.value(&me, w);
        for m in 1..=3 {
            if m != l + 1 {
                let other = g.value(&format!("x{m}"), w);
                separated.push((format!("w{}: beta*{me} = {} < x{m} = {}", l + 1, fmt_q(&bound), fmt_q(&other)), bound < other));
            }
        }
    }
    facts.push(Fact::new(
        "statement 1: x1, x2, x3 are mutually separated",
        separated.iter().all(|(_, ok)| *ok),
        separated.iter().map(|(s, _)| s.as_str()).collect::<Vec<_>>().join("; "),
    ));

    let slope = region_slope(beta);
    let mut region_counts = [0usize; 3];
    let mut region_ok = true;
    let weights = region_weights(beta, samples, seed);
    for w in &weights {
        let low = w[0] <= &slope * (&w[1] + &w[2]);
        let bound = beta * g.value("xbar2", w);
        if low {
            region_counts[0] += 1;
            region_ok &= g.value("x", w) <= bound;
        }
        if w[0] >= &slope * (&w[1] + &w[2]) {
            if w[1] >= w[2] {
                region_counts[1] += 1;
                region_ok &= g.value("xbar1", w) <= bound;
            }
            if w[1] <= w[2] {
                region_counts[2] += 1;
                region_ok &= g.value("xbar3", w) <= bound;
            }
        }
    }
    let edge = vec![slope.clone(), Q::new(1.into(), 2.into()), Q::new(1.into(), 2.into())];
    let (lhs, rhs) = (g.value("x", &edge), beta * g.value("xbar2", &edge));
    facts.push(Fact::new(
        "statement 2: x, xbar1 or xbar3 is within beta of xbar2 in every region",
        region_ok && lhs <= rhs,
        format!(
            "region samples {:?}; boundary weight ({}, 1/2, 1/2): {} <= {}",
            region_counts,
            fmt_q(&slope),
            fmt_q(&lhs),
            fmt_q(&rhs)
        ),
    ));

    let mut all_weights = sample_simplex(3, samples, seed ^ 0x5eed);
    all_weights.extend(weights);
    let report = verify_set(
        &g.instance,
        &g.records(&["x", "xbar1", "xbar3"]),
        beta,
        &weight_samples(all_weights, Strategy::Simplex),
    )?;
    facts.push(Fact::new(
        "{x, xbar1, xbar3} is a beta-approximation set for A2",
        report.passed,
        format!("worst ratio {} over {} weights", report.worst_ratio, report.samples_tested),
    ));

    let copies = g.restricted(&["x1", "x2", "x3", "xbar1", "xbar2", "xbar3"])?;
    let mut drops = Vec::new();
    for l in 1..=3 {
        let keep: Vec<String> = (1..=3).filter(|m| *m != l).map(|m| format!("xbar{m}")).collect();
        let keep: Vec<&str> = keep.iter().map(String::as_str).collect();
        let at = weight_samples([e.witnesses[l - 1].clone()], Strategy::Witness);
        let r = verify_set(&copies.instance, &copies.records(&keep), beta, &at)?;
        drops.push((l, r.passed, r.worst_ratio));
    }
    facts.push(Fact::new(
        "dropping any xbar^l from {xbar1, xbar2, xbar3} fails at w^l",
        drops.iter().all(|(_, passed, _)| !passed),
        drops.iter().map(|(l, _, r)| format!("without xbar{l}: ratio {r}")).collect::<Vec<_>>().join("; "),
    ));

    let plain = g.restricted(&["x1", "x2", "x3"])?;
    let cover = minimum_cover(&plain.instance, beta, &probes(&e.witnesses))?;
    facts.push(Fact::new(
        "{x1, x2, x3} is a smallest approximation set of itself",
        cover.len() == 3,
        format!("minimum cover at w1, w2, w3: {{{}}}", sorted_labels(&cover, &plain)),
    ));
    Ok(facts)
}

// ---------------------------------------------------------------------------
// Repaired construction

/// Solutions `x*`, `x1…xL`, `xbar1…xbarL` with `q = 2·z0·β`,
/// `F(x*) = (β·z0, q^{−2−L}, q^{−2−L})`, `F(x^l) = (z0, q^{l−L}, q^{1−l})`
/// and `F(xbar^l) = (z0 − 1, q^{l−L}, q^{1−l})`.
#[derive(Clone, Debug)]
pub struct AppendixProof {
    pub a1: Gadget,
    pub a2: Gadget,
    pub z0: Q,
    pub l: usize,
    /// `(·, q^{L−l}, q^{l−1})` for `l = 1…L`, zero on `F_0`.
    pub weights: Vec<Vec<Q>>,
    /// The same weights with `F_0` weighted so that `xbar^l` beats `x^l` by
    /// more than β over every other solution.
    pub copy_witnesses: Vec<Vec<Q>>,
    /// `(w0, 1/2, 1/2)` with `w0` small enough that only `x*` is
    /// β-approximate.
    pub star_witness: Vec<Q>,
}

pub fn appendix_proof(beta: &Q, z0: &Q, l: usize) -> Result<AppendixProof> {
    check_beta(beta)?;
    if z0 < beta {
        return Err(Error::InvalidArgument(format!("z0 must be at least beta, got {}", fmt_q(z0))));
    }
    if l < 2 {
        return Err(Error::InvalidArgument("L must be at least 2".into()));
    }
    let ll = l as i64;
    let base = q(2) * z0 * beta;
    let p = |e: i64| pow_q(&base, e);
    let mut sols = vec![("x*".to_string(), vec![beta * z0, p(-2 - ll), p(-2 - ll)])];
    for j in 1..=ll {
        sols.push((format!("x{j}"), vec![z0.clone(), p(j - ll), p(1 - j)]));
    }
    for j in 1..=ll {
        sols.push((format!("xbar{j}"), vec![z0 - q(1), p(j - ll), p(1 - j)]));
    }
    let a2 = Gadget::build(GadgetKind::AppendixProof, beta, sols)?;
    let a1_labels: Vec<String> = std::iter::once("x*".to_string()).chain((1..=l).map(|j| format!("x{j}"))).collect();
    let a1 = a2.restricted(&a1_labels.iter().map(String::as_str).collect::<Vec<_>>())?;

    let weights: Vec<Vec<Q>> = (1..=ll).map(|j| vec![q(0), p(ll - j), p(j - 1)]).collect();
    let copy_witnesses = weights
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let s = a2.value(&format!("xbar{}", j + 1), w);
            let mut w = w.clone();
            w[0] = z0 / (z0 - q(1)) * s;
            w
        })
        .collect();
    // F_1(x*) = F_2(x*), so one margin d covers both components.
    let star = a2.f("x*")[1].clone();
    let d = (1..=l)
        .flat_map(|j| a2.f(&format!("xbar{j}"))[1..].to_vec())
        .map(|f| f - beta * &star)
        .min()
        .expect("L >= 2")
        / q(2);
    let half = Q::new(1.into(), 2.into());
    let star_witness = vec![d / (q(2) * beta * beta * z0), half.clone(), half];
    Ok(AppendixProof { a1, a2, z0: z0.clone(), l, weights, copy_witnesses, star_witness })
}

pub fn appendix_proof_facts(p: &AppendixProof, samples: usize, seed: u64) -> Result<Vec<Fact>> {
    let g = &p.a2;
    let beta = &g.beta;
    let z0 = &p.z0;
    let mut facts = Vec::new();

    let factor = (beta - q(1)) * z0 + beta;
    let mut worst: Option<Q> = None;
    let mut chain = true;
    for (j, w) in p.weights.iter().enumerate() {
        let lhs = &factor * g.value(&format!("x{}", j + 1), w);
        for m in 1..=p.l {
            if m != j + 1 {
                let rhs = g.value(&format!("x{m}"), w);
                chain &= lhs < rhs;
                let slack = &rhs / &lhs;
                if worst.as_ref().is_none_or(|s| slack < *s) {
                    worst = Some(slack);
                }
            }
        }
    }
    facts.push(Fact::new(
        "((beta-1)*z0 + beta)*(w^l . F(x^l)) < w^l . F(x^m) for all l != m",
        chain,
        format!("smallest rhs/lhs {}", worst.map(|s| fmt_q(&s)).unwrap_or_default()),
    ));

    let below = (1..=p.l).all(|j| {
        let f = g.f(&format!("x{j}"));
        (1..=2).all(|i| beta * &g.f("x*")[i] < f[i])
    });
    facts.push(Fact::new("beta*F_i(x*) < F_i(x^l) for i = 1, 2", below, "exact"));

    let mut at_one = Vec::new();
    let mut above = false;
    for j in 1..=p.l {
        for i in 1..=2 {
            let v = &g.f(&format!("x{j}"))[i];
            if *v == q(1) {
                at_one.push(format!("F_{i}(x{j})"));
            }
            above |= *v > q(1);
        }
    }
    let mut expected = vec![format!("F_1(x{})", p.l), "F_2(x1)".to_string()];
    expected.sort();
    at_one.sort();
    facts.push(Fact::new(
        "F_i(x^l) < 1 except F_1(x^L) = F_2(x^1) = 1",
        !above && at_one == expected,
        format!("components equal to 1: {}", at_one.join(", ")),
    ));

    let componentwise = (1..=p.l).all(|j| componentwise_within(g.f("x*"), g.f(&format!("x{j}")), beta));
    let report = verify_set(
        &p.a1.instance,
        &p.a1.records(&["x*"]),
        beta,
        &weight_samples(sample_simplex(3, samples, seed), Strategy::Simplex),
    )?;
    facts.push(Fact::new(
        "{x*} is a beta-approximation set for A1",
        componentwise && report.passed,
        format!("componentwise: {componentwise}; sampled worst ratio {}", report.worst_ratio),
    ));

    let star_forced = only_these_approximate(g, &p.star_witness, "x*", &["x*"]);
    facts.push(Fact::new(
        "x* is the only beta-approximate solution at (w0, 1/2, 1/2)",
        star_forced,
        format!("w0 = {}", fmt_q(&p.star_witness[0])),
    ));

    let copies_forced = p.copy_witnesses.iter().enumerate().all(|(j, w)| {
        let (x, xbar) = (format!("x{}", j + 1), format!("xbar{}", j + 1));
        only_these_approximate(g, w, &xbar, &[x.as_str(), xbar.as_str()])
    });
    facts.push(Fact::new(
        "at wbar^l only x^l and xbar^l are beta-approximate",
        copies_forced,
        format!("{} witness weights", p.copy_witnesses.len()),
    ));

    let mut rand_weights = sample_simplex(3, samples, seed ^ 0xa2);
    let mut r = rng(seed);
    rand_weights.extend((0..samples / 4).map(|_| {
        let mut w = random_simplex_point(3, &mut r);
        w[0] /= q(1000);
        w
    }));
    let mut set = vec!["x*".to_string()];
    set.extend((1..=p.l).map(|j| format!("xbar{j}")));
    let set: Vec<&str> = set.iter().map(String::as_str).collect();
    let mut at = weight_samples(rand_weights, Strategy::Simplex);
    at.extend(weight_samples(p.copy_witnesses.iter().cloned(), Strategy::Witness));
    let report = verify_set(&g.instance, &g.records(&set), beta, &at)?;
    facts.push(Fact::new(
        "{x*} with all xbar^l is a beta-approximation set for A2",
        report.passed,
        format!("worst ratio {} over {} weights", report.worst_ratio, report.samples_tested),
    ));

    if g.labels.len() <= MAX_COVER_SOLUTIONS {
        let mut witnesses = p.copy_witnesses.clone();
        witnesses.push(p.star_witness.clone());
        let cover = minimum_cover(&g.instance, beta, &probes(&witnesses))?;
        facts.push(Fact::new(
            "a smallest approximation set of A2 has L+1 solutions",
            cover.len() == p.l + 1,
            format!("minimum cover at the witnesses: {{{}}}", sorted_labels(&cover, g)),
        ));
    }
    Ok(facts)
}

// ---------------------------------------------------------------------------
// Named fixtures

#[derive(Clone, Debug)]
pub struct FixtureParams {
    pub beta: Q,
    pub k: usize,
    pub z0: Q,
    pub l: usize,
}

impl Default for FixtureParams {
    fn default() -> Self {
        FixtureParams { beta: q(2), k: 1, z0: q(5), l: 4 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixtureReport {
    pub fixture: GadgetKind,
    pub parameters: BTreeMap<String, String>,
    pub solutions: Vec<LabelledVector>,
    pub facts: Vec<Fact>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelledVector {
    pub label: String,
    #[serde(rename = "F", with = "crate::rational::serde_q_vec")]
    pub f: Vec<Q>,
}

fn listing(g: &Gadget) -> Vec<LabelledVector> {
    g.labels.iter().map(|l| LabelledVector { label: l.clone(), f: g.f(l).to_vec() }).collect()
}

/// Builds the named fixture and checks all its facts, using `samples`
/// random weights per sampled check.
pub fn run_fixture(kind: GadgetKind, params: &FixtureParams, samples: usize, seed: u64) -> Result<FixtureReport> {
    let mut parameters = BTreeMap::new();
    parameters.insert("beta".to_string(), fmt_q(&params.beta));
    let (solutions, facts) = match kind {
        GadgetKind::Section3 => {
            parameters.insert("K".into(), params.k.to_string());
            let s = section3(&params.beta, params.k)?;
            (listing(&s.gadget), section3_facts(&s, samples, seed)?)
        }
        GadgetKind::AppendixExample => {
            parameters.insert("z0".into(), fmt_q(&params.z0));
            let e = appendix_example(&params.beta, &params.z0)?;
            (listing(&e.a2), appendix_example_facts(&e, samples, seed)?)
        }
        GadgetKind::AppendixProof => {
            parameters.insert("z0".into(), fmt_q(&params.z0));
            parameters.insert("L".into(), params.l.to_string());
            let p = appendix_proof(&params.beta, &params.z0, params.l)?;
            (listing(&p.a2), appendix_proof_facts(&p, samples, seed)?)
        }
    };
    let passed = facts.iter().all(|f| f.holds);
    Ok(FixtureReport { fixture: kind, parameters, solutions, facts, passed })
}
