//! The core operator layer: maps `R: V -> G` satisfying the weight-zero
//! relation `R(u)R(v) = R(u + Phi(R(u))v)`, their verification, the graph
//! characterization inside `V ⋊ G`, and the derived structures (descendent
//! group, brace, gamma action, 1-cocycles).

use crate::domain::VerifyDomain;
use crate::error::CoreError;
use crate::groups::action::{Action, GElem, Semidirect};
use crate::groups::group::Group;
use crate::groups::intvec::{AbSignature, IntVec};
use crate::report::{combine, Report};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use std::sync::Arc;

/// A candidate relative Rota-Baxter operator of weight zero: a map from the
/// module of `action()` into its acting group. Verification is separate;
/// holding a `RelRbOp` asserts nothing.
pub trait RelRbOp: Send + Sync {
    type A: Action;

    fn action(&self) -> &Self::A;

    /// Value at `v`. Panics if the operator is partial and `v` is uncovered;
    /// verifiers use [`RelRbOp::try_eval`].
    fn eval(&self, v: &IntVec) -> GElem<Self::A> {
        self.try_eval(v)
            .expect("operator is not defined at the requested vector")
    }

    /// `None` when the operator is partial and `v` is uncovered.
    fn try_eval(&self, v: &IntVec) -> Option<GElem<Self::A>>;
}

/// The constant map onto the group identity. Always an operator: both sides
/// of the defining relation collapse to the identity.
#[derive(Clone, Debug)]
pub struct ConstIdentityOp<A: Action> {
    action: A,
}

impl<A: Action> ConstIdentityOp<A> {
    pub fn new(action: A) -> Self {
        ConstIdentityOp { action }
    }
}

impl<A: Action> RelRbOp for ConstIdentityOp<A> {
    type A = A;

    fn action(&self) -> &A {
        &self.action
    }

    fn try_eval(&self, _v: &IntVec) -> Option<GElem<A>> {
        Some(self.action.group().identity())
    }
}

/// Operator backed by an arbitrary total function.
pub struct FnOp<A: Action, F> {
    action: A,
    f: F,
}

impl<A, F> FnOp<A, F>
where
    A: Action,
    F: Fn(&IntVec) -> GElem<A> + Send + Sync,
{
    pub fn new(action: A, f: F) -> Self {
        FnOp { action, f }
    }
}

impl<A, F> RelRbOp for FnOp<A, F>
where
    A: Action,
    F: Fn(&IntVec) -> GElem<A> + Send + Sync,
{
    type A = A;

    fn action(&self) -> &A {
        &self.action
    }

    fn try_eval(&self, v: &IntVec) -> Option<GElem<A>> {
        Some((self.f)(v))
    }
}

/// Partial operator backed by a finite table (e.g. read off an enumerated
/// structure group). Uncovered vectors yield `None` and verifiers count them
/// as skipped.
#[derive(Clone, Debug)]
pub struct TableOp<A: Action> {
    action: A,
    table: std::collections::HashMap<IntVec, GElem<A>>,
}

impl<A: Action> TableOp<A> {
    pub fn new(action: A, table: std::collections::HashMap<IntVec, GElem<A>>) -> Self {
        TableOp { action, table }
    }

    pub fn covers(&self, v: &IntVec) -> bool {
        self.table.contains_key(v)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl<A: Action> RelRbOp for TableOp<A> {
    type A = A;

    fn action(&self) -> &A {
        &self.action
    }

    fn try_eval(&self, v: &IntVec) -> Option<GElem<A>> {
        self.table.get(v).cloned()
    }
}

pub(crate) enum Verdict {
    Pass,
    Skip,
    Fail(serde_json::Value),
}

/// Outcome of scanning one row: skips seen before a failure, and the failure
/// itself if the row has one. Rows stop at their first failure.
enum RowScan {
    Clean { skips: u64 },
    Fail { at: u64, counterexample: serde_json::Value },
}

/// Merges row outcomes keeping the earliest failure in index order.
fn merge_rows(a: RowScan, b: RowScan) -> RowScan {
    match (a, b) {
        (RowScan::Clean { skips: s1 }, RowScan::Clean { skips: s2 }) => {
            RowScan::Clean { skips: s1 + s2 }
        }
        (f @ RowScan::Fail { .. }, RowScan::Clean { .. }) => f,
        (RowScan::Clean { .. }, f @ RowScan::Fail { .. }) => f,
        (
            RowScan::Fail { at: a1, counterexample: c1 },
            RowScan::Fail { at: a2, counterexample: c2 },
        ) => {
            if a1 <= a2 {
                RowScan::Fail { at: a1, counterexample: c1 }
            } else {
                RowScan::Fail { at: a2, counterexample: c2 }
            }
        }
    }
}

fn row_report(check: &str, total: u64, scan: RowScan) -> Report {
    match scan {
        RowScan::Clean { skips } => Report::pass(check, total).with_skipped(skips),
        RowScan::Fail { at, counterexample } => Report::fail(check, at + 1, counterexample),
    }
}

/// Scans `f` over `xs × ys` in lexicographic index order (parallel over rows)
/// and reports the first failure in that order, or pass with skip count.
/// Single pass: each row counts its skips and stops at its first failure.
pub(crate) fn scan_pairs<X, Y, F>(check: &str, xs: &[X], ys: &[Y], f: F) -> Report
where
    X: Sync,
    Y: Sync,
    F: Fn(&X, &Y) -> Verdict + Send + Sync,
{
    let merged = xs
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut skips = 0u64;
            for (j, y) in ys.iter().enumerate() {
                match f(x, y) {
                    Verdict::Pass => {}
                    Verdict::Skip => skips += 1,
                    Verdict::Fail(cx) => {
                        return RowScan::Fail {
                            at: (i * ys.len() + j) as u64,
                            counterexample: cx,
                        }
                    }
                }
            }
            RowScan::Clean { skips }
        })
        .reduce(|| RowScan::Clean { skips: 0 }, merge_rows);
    row_report(check, (xs.len() * ys.len()) as u64, merged)
}

pub(crate) fn scan_single<X, F>(check: &str, xs: &[X], f: F) -> Report
where
    X: Sync,
    F: Fn(&X) -> Verdict + Send + Sync,
{
    let merged = xs
        .par_iter()
        .enumerate()
        .map(|(i, x)| match f(x) {
            Verdict::Pass => RowScan::Clean { skips: 0 },
            Verdict::Skip => RowScan::Clean { skips: 1 },
            Verdict::Fail(cx) => RowScan::Fail {
                at: i as u64,
                counterexample: cx,
            },
        })
        .reduce(|| RowScan::Clean { skips: 0 }, merge_rows);
    row_report(check, xs.len() as u64, merged)
}

/// Checks the defining relation `R(u)R(v) = R(u + Phi(R(u))v)` on every pair
/// the domain yields. First counterexample in domain order.
pub fn verify_rrb<R: RelRbOp>(op: &R, domain: &VerifyDomain) -> Result<Report, CoreError> {
    if domain.is_empty() {
        return Err(CoreError::EmptyDomain);
    }
    let all: Vec<IntVec> = domain.all().cloned().collect();
    let g = op.action().group();
    Ok(scan_pairs("rrb_law", &all, &all, |u, v| {
        let (ru, rv) = match (op.try_eval(u), op.try_eval(v)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Verdict::Skip,
        };
        let w = u.add(&op.action().act(&ru, v));
        let rw = match op.try_eval(&w) {
            Some(c) => c,
            None => return Verdict::Skip,
        };
        if g.op(&ru, &rv) == rw {
            Verdict::Pass
        } else {
            Verdict::Fail(json!({
                "u": u, "v": v,
                "lhs": g.op(&ru, &rv),
                "rhs": rw,
            }))
        }
    })
    .with_seed(domain.seed))
}

/// Checks the four consequences of the defining relation: the unit value,
/// the negation identity, the inverse identity, and the commutation relation.
pub fn verify_derived_identities<R: RelRbOp>(
    op: &R,
    domain: &VerifyDomain,
) -> Result<Report, CoreError> {
    if domain.is_empty() {
        return Err(CoreError::EmptyDomain);
    }
    let all: Vec<IntVec> = domain.all().cloned().collect();
    let act = op.action();
    let g = act.group();
    let zero = IntVec::zero(act.signature().clone());

    let unit = match op.try_eval(&zero) {
        None => Report::pass("derived/unit", 0).with_skipped(1),
        Some(r0) if r0 == g.identity() => Report::pass("derived/unit", 1),
        Some(r0) => Report::fail("derived/unit", 1, json!({"value_at_zero": r0})),
    };

    // R(-u) = R(Phi(R(u)^{-1})u)^{-1}
    let negation = scan_single("derived/negation", &all, |u| {
        let ru = match op.try_eval(u) {
            Some(r) => r,
            None => return Verdict::Skip,
        };
        let w = act.act(&g.inv(&ru), u);
        match (op.try_eval(&u.neg()), op.try_eval(&w)) {
            (Some(lhs), Some(rw)) => {
                if lhs == g.inv(&rw) {
                    Verdict::Pass
                } else {
                    Verdict::Fail(json!({"u": u, "lhs": lhs, "rhs": g.inv(&rw)}))
                }
            }
            _ => Verdict::Skip,
        }
    });

    // R(u)^{-1} = R(-Phi(R(u)^{-1})u)
    let inverse = scan_single("derived/inverse", &all, |u| {
        let ru = match op.try_eval(u) {
            Some(r) => r,
            None => return Verdict::Skip,
        };
        let w = act.act(&g.inv(&ru), u).neg();
        match op.try_eval(&w) {
            Some(rw) => {
                if g.inv(&ru) == rw {
                    Verdict::Pass
                } else {
                    Verdict::Fail(json!({"u": u, "lhs": g.inv(&ru), "rhs": rw}))
                }
            }
            None => Verdict::Skip,
        }
    });

    // R(u)R(Phi(R(u)^{-1})v) = R(v)R(Phi(R(v)^{-1})u)
    let commutation = scan_pairs("derived/commutation", &all, &all, |u, v| {
        let (ru, rv) = match (op.try_eval(u), op.try_eval(v)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Verdict::Skip,
        };
        let uv = act.act(&g.inv(&ru), v);
        let vu = act.act(&g.inv(&rv), u);
        match (op.try_eval(&uv), op.try_eval(&vu)) {
            (Some(ruv), Some(rvu)) => {
                let lhs = g.op(&ru, &ruv);
                let rhs = g.op(&rv, &rvu);
                if lhs == rhs {
                    Verdict::Pass
                } else {
                    Verdict::Fail(json!({"u": u, "v": v, "lhs": lhs, "rhs": rhs}))
                }
            }
            _ => Verdict::Skip,
        }
    });

    Ok(combine("derived_identities", &[unit, negation, inverse, commutation])
        .with_seed(domain.seed))
}

/// Checks that the graph `{(u, R(u))}` is closed under multiplication and
/// inversion inside the semidirect product. Pointwise this is the defining
/// relation again, but computed through the semidirect product API, so the
/// two verdicts cross-validate each other.
pub fn graph_subgroup_check<R>(op: &R, domain: &VerifyDomain) -> Result<Report, CoreError>
where
    R: RelRbOp,
    R::A: Clone,
{
    if domain.is_empty() {
        return Err(CoreError::EmptyDomain);
    }
    let all: Vec<IntVec> = domain.all().cloned().collect();
    let semi = Semidirect::new(op.action().clone());

    let closure = scan_pairs("graph/closure", &all, &all, |u, v| {
        let (ru, rv) = match (op.try_eval(u), op.try_eval(v)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Verdict::Skip,
        };
        let prod = semi.op(&semi.pair(u.clone(), ru), &semi.pair(v.clone(), rv));
        match op.try_eval(&prod.vec) {
            Some(r) if r == prod.grp => Verdict::Pass,
            Some(r) => Verdict::Fail(json!({
                "u": u, "v": v, "product": prod, "graph_value": r,
            })),
            None => Verdict::Skip,
        }
    });

    let inversion = scan_single("graph/inverse", &all, |u| {
        let ru = match op.try_eval(u) {
            Some(r) => r,
            None => return Verdict::Skip,
        };
        let inv = semi.inv(&semi.pair(u.clone(), ru));
        match op.try_eval(&inv.vec) {
            Some(r) if r == inv.grp => Verdict::Pass,
            Some(r) => Verdict::Fail(json!({"u": u, "inverse": inv, "graph_value": r})),
            None => Verdict::Skip,
        }
    });

    Ok(combine("graph_subgroup", &[closure, inversion]).with_seed(domain.seed))
}

/// The group `(V, *)` with `u * v = u + Phi(R(u))v`, unit `0`, and
/// `dagger(u) = -Phi(R(u)^{-1})u`.
pub struct DescendentGroup<R: RelRbOp> {
    op: Arc<R>,
}

impl<R: RelRbOp> Clone for DescendentGroup<R> {
    fn clone(&self) -> Self {
        DescendentGroup { op: self.op.clone() }
    }
}

impl<R: RelRbOp> DescendentGroup<R> {
    pub fn new(op: Arc<R>) -> Self {
        DescendentGroup { op }
    }

    pub fn operator(&self) -> &R {
        &self.op
    }

    pub fn star(&self, u: &IntVec, v: &IntVec) -> IntVec {
        u.add(&self.op.action().act(&self.op.eval(u), v))
    }

    pub fn dagger(&self, u: &IntVec) -> IntVec {
        let g = self.op.action().group();
        self.op
            .action()
            .act(&g.inv(&self.op.eval(u)), u)
            .neg()
    }

    pub fn signature(&self) -> &AbSignature {
        self.op.action().signature()
    }
}

impl<R: RelRbOp> Group for DescendentGroup<R> {
    type Elem = IntVec;

    fn identity(&self) -> IntVec {
        IntVec::zero(self.signature().clone())
    }

    fn op(&self, a: &IntVec, b: &IntVec) -> IntVec {
        self.star(a, b)
    }

    fn inv(&self, a: &IntVec) -> IntVec {
        self.dagger(a)
    }

    fn enumerate(&self) -> Option<Vec<IntVec>> {
        self.signature().elements(100_000).ok()
    }
}

/// Builds the descendent group after re-verifying the defining relation on
/// the domain; fails if verification fails.
pub fn descendent<R: RelRbOp>(
    op: Arc<R>,
    domain: &VerifyDomain,
) -> Result<DescendentGroup<R>, CoreError> {
    let rep = verify_rrb(op.as_ref(), domain)?;
    if !rep.holds {
        return Err(CoreError::check_failed(
            "rrb_law",
            format!("counterexample: {:?}", rep.counterexample),
        ));
    }
    Ok(DescendentGroup::new(op))
}

/// Budget for laws quantified over triples: the inner box scanned
/// exhaustively, plus a band of seeded random triples from the full domain.
#[derive(Clone, Copy, Debug)]
pub struct TripleBudget {
    pub box_k: i64,
    pub raw_triples: usize,
    pub seed: u64,
}

impl Default for TripleBudget {
    fn default() -> Self {
        TripleBudget {
            box_k: 1,
            raw_triples: 512,
            seed: 42,
        }
    }
}

fn seeded_triples(all: &[IntVec], count: usize, seed: u64) -> Vec<(IntVec, IntVec, IntVec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                all[rng.gen_range(0..all.len())].clone(),
                all[rng.gen_range(0..all.len())].clone(),
                all[rng.gen_range(0..all.len())].clone(),
            )
        })
        .collect()
}

fn triple_box(sig: &AbSignature, all: &[IntVec], k: i64) -> Vec<IntVec> {
    crate::domain::box_elements(sig, k).unwrap_or_else(|_| all.to_vec())
}

/// Checks the two laws of the operation `x > y = Phi(R(x))y`:
/// left distributivity `x > (y+z) = x>y + x>z` and the twisted
/// associativity `x > (y > z) = (x + x>y) > z`.
///
/// Distributivity is checked exactly in factored form: for every distinct
/// value `R(x)` over the domain, `Phi(R(x))` is checked additive on all
/// element pairs. Twisted associativity in factored form reduces to the
/// defining relation (equal group elements act identically), so it is
/// additionally checked raw on the budgeted triples.
pub fn pregroup_check<R: RelRbOp>(
    op: &R,
    domain: &VerifyDomain,
    budget: TripleBudget,
) -> Result<Report, CoreError> {
    if domain.is_empty() {
        return Err(CoreError::EmptyDomain);
    }
    let all: Vec<IntVec> = domain.all().cloned().collect();
    let act = op.action();
    let g = act.group();

    // Distinct operator values over the domain, with a witness x each.
    let mut values: Vec<(GElem<R::A>, IntVec)> = Vec::new();
    let mut skipped = 0u64;
    for x in &all {
        match op.try_eval(x) {
            Some(rx) => {
                if !values.iter().any(|(v, _)| *v == rx) {
                    values.push((rx, x.clone()));
                }
            }
            None => skipped += 1,
        }
    }

    let elements = &domain.elements;
    let distributive = scan_pairs("pregroup/distributive", &values, elements, |(rx, wx), y| {
        // Additivity of Phi(rx) against every z, for this y.
        for z in elements {
            let lhs = act.act(rx, &y.add(z));
            let rhs = act.act(rx, y).add(&act.act(rx, z));
            if lhs != rhs {
                return Verdict::Fail(json!({"x": wx, "y": y, "z": z}));
            }
        }
        Verdict::Pass
    })
    .with_skipped(skipped);

    // Factored twisted associativity: Phi(R(x))Phi(R(y)) = Phi(R(x*y)) as
    // maps. Group-element equality (the defining relation) settles it; when
    // the group elements differ the maps are compared on the element list.
    let assoc_factored = scan_pairs("pregroup/assoc_factored", &all, &all, |x, y| {
        let (rx, ry) = match (op.try_eval(x), op.try_eval(y)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Verdict::Skip,
        };
        let xy = x.add(&act.act(&rx, y));
        let rxy = match op.try_eval(&xy) {
            Some(r) => r,
            None => return Verdict::Skip,
        };
        if g.op(&rx, &ry) == rxy {
            return Verdict::Pass;
        }
        for z in elements {
            if act.act(&rx, &act.act(&ry, z)) != act.act(&rxy, z) {
                return Verdict::Fail(json!({"x": x, "y": y, "z": z}));
            }
        }
        Verdict::Pass
    });

    // Raw triples: the two laws verbatim on the inner box and a seeded band.
    let box_els = triple_box(act.signature(), &all, budget.box_k);
    let mut triples: Vec<(IntVec, IntVec, IntVec)> = Vec::new();
    for x in &box_els {
        for y in &box_els {
            for z in &box_els {
                triples.push((x.clone(), y.clone(), z.clone()));
            }
        }
    }
    triples.extend(seeded_triples(&all, budget.raw_triples, budget.seed));
    let assoc_direct = scan_single("pregroup/raw_triples", &triples, |(x, y, z)| {
        let rx = match op.try_eval(x) {
            Some(r) => r,
            None => return Verdict::Skip,
        };
        let xy = act.act(&rx, y);
        // x > (y + z) = x>y + x>z
        if act.act(&rx, &y.add(z)) != xy.add(&act.act(&rx, z)) {
            return Verdict::Fail(json!({"law": "distributive", "x": x, "y": y, "z": z}));
        }
        // x > (y > z) = (x + x>y) > z
        let ry = match op.try_eval(y) {
            Some(r) => r,
            None => return Verdict::Skip,
        };
        let lhs = act.act(&rx, &act.act(&ry, z));
        let rw = match op.try_eval(&x.add(&xy)) {
            Some(r) => r,
            None => return Verdict::Skip,
        };
        if lhs != act.act(&rw, z) {
            return Verdict::Fail(json!({"law": "associative", "x": x, "y": y, "z": z}));
        }
        Verdict::Pass
    });

    Ok(combine(
        "pregroup",
        &[distributive, assoc_factored, assoc_direct],
    )
    .with_seed(Some(budget.seed)))
}

/// A brace structure on the vectors of a signature: addition inherited, a
/// multiplicative product `star` with inverse `star_inv`.
#[derive(Clone)]
pub struct BraceView {
    pub sig: AbSignature,
    star: Arc<dyn Fn(&IntVec, &IntVec) -> IntVec + Send + Sync>,
    star_inv: Arc<dyn Fn(&IntVec) -> IntVec + Send + Sync>,
}

impl BraceView {
    pub fn new(
        sig: AbSignature,
        star: Arc<dyn Fn(&IntVec, &IntVec) -> IntVec + Send + Sync>,
        star_inv: Arc<dyn Fn(&IntVec) -> IntVec + Send + Sync>,
    ) -> Self {
        BraceView { sig, star, star_inv }
    }

    /// The trivial brace: `*` is `+`.
    pub fn trivial(sig: AbSignature) -> Self {
        BraceView {
            sig,
            star: Arc::new(|u: &IntVec, v: &IntVec| u.add(v)),
            star_inv: Arc::new(|u: &IntVec| u.neg()),
        }
    }

    pub fn star(&self, u: &IntVec, v: &IntVec) -> IntVec {
        (self.star)(u, v)
    }

    pub fn star_inv(&self, u: &IntVec) -> IntVec {
        (self.star_inv)(u)
    }

    /// True when `*` equals `+` on all given elements.
    pub fn is_trivial_on(&self, elements: &[IntVec]) -> bool {
        elements
            .iter()
            .all(|u| elements.iter().all(|v| self.star(u, v) == u.add(v)))
    }
}

/// The multiplicative group `(V, *)` of a brace.
#[derive(Clone)]
pub struct BraceGroup {
    pub view: BraceView,
}

impl Group for BraceGroup {
    type Elem = IntVec;

    fn identity(&self) -> IntVec {
        IntVec::zero(self.view.sig.clone())
    }

    fn op(&self, a: &IntVec, b: &IntVec) -> IntVec {
        self.view.star(a, b)
    }

    fn inv(&self, a: &IntVec) -> IntVec {
        self.view.star_inv(a)
    }

    fn enumerate(&self) -> Option<Vec<IntVec>> {
        self.view.sig.elements(100_000).ok()
    }
}

/// Builds the brace `(V, +, *)` from a verified operator and checks the
/// compatibility law `x*(y+z) = x*y + x*z - x` on the domain.
///
/// The law factors exactly: it is equivalent to additivity of `Phi(R(x))`,
/// which `pregroup_check` establishes per distinct operator value. Here the
/// law is additionally checked verbatim on budgeted triples.
pub fn brace_from_rrb<R: RelRbOp + 'static>(
    op: Arc<R>,
    domain: &VerifyDomain,
    budget: TripleBudget,
) -> Result<(BraceView, Report), CoreError> {
    let desc = descendent(op.clone(), domain)?;
    let desc2 = desc.clone();
    let view = BraceView::new(
        desc.signature().clone(),
        Arc::new(move |u: &IntVec, v: &IntVec| desc.star(u, v)),
        Arc::new(move |u: &IntVec| desc2.dagger(u)),
    );
    let pre = pregroup_check(op.as_ref(), domain, budget)?;
    let direct = brace_law_direct(&view, domain, budget);
    let rep = combine("brace_law", &[pre, direct]);
    Ok((view, rep))
}

fn brace_law_direct(b: &BraceView, domain: &VerifyDomain, budget: TripleBudget) -> Report {
    let all: Vec<IntVec> = domain.all().cloned().collect();
    let box_els = triple_box(&b.sig, &all, budget.box_k);
    let mut triples: Vec<(IntVec, IntVec, IntVec)> = Vec::new();
    for x in &box_els {
        for y in &box_els {
            for z in &box_els {
                triples.push((x.clone(), y.clone(), z.clone()));
            }
        }
    }
    triples.extend(seeded_triples(&all, budget.raw_triples, budget.seed));
    scan_single("brace/compat_raw", &triples, |(x, y, z)| {
        let lhs = b.star(x, &y.add(z));
        let rhs = b.star(x, y).add(&b.star(x, z)).sub(x);
        if lhs == rhs {
            Verdict::Pass
        } else {
            Verdict::Fail(json!({"x": x, "y": y, "z": z, "lhs": lhs, "rhs": rhs}))
        }
    })
    .with_seed(Some(budget.seed))
}

/// Direct brace verification for a bare [`BraceView`] (no operator behind
/// it): multiplicative group axioms on the elements, compatibility law on
/// budgeted triples (exhaustive when the element count allows).
pub fn brace_check(b: &BraceView, elements: &[IntVec], max_triples: u64, seed: u64) -> Report {
    let grp = BraceGroup { view: b.clone() };
    let axioms = crate::groups::group::check_group_axioms(&grp, elements, max_triples, seed);
    let axioms = Report {
        check: "brace/multiplicative_group".into(),
        ..axioms
    };

    let n = elements.len() as u64;
    let compat = if n.saturating_mul(n).saturating_mul(n) <= max_triples {
        let mut count = 0u64;
        let mut fail = None;
        'outer: for x in elements {
            for y in elements {
                for z in elements {
                    count += 1;
                    let lhs = b.star(x, &y.add(z));
                    let rhs = b.star(x, y).add(&b.star(x, z)).sub(x);
                    if lhs != rhs {
                        fail = Some(json!({"x": x, "y": y, "z": z}));
                        break 'outer;
                    }
                }
            }
        }
        match fail {
            Some(cx) => Report::fail("brace/compat", count, cx),
            None => Report::pass("brace/compat", count),
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fail = None;
        for i in 0..max_triples {
            let x = &elements[rng.gen_range(0..elements.len())];
            let y = &elements[rng.gen_range(0..elements.len())];
            let z = &elements[rng.gen_range(0..elements.len())];
            let lhs = b.star(x, &y.add(z));
            let rhs = b.star(x, y).add(&b.star(x, z)).sub(x);
            if lhs != rhs {
                fail = Some((i + 1, json!({"x": x, "y": y, "z": z})));
                break;
            }
        }
        match fail {
            Some((count, cx)) => Report::fail("brace/compat", count, cx).with_seed(Some(seed)),
            None => Report::pass("brace/compat", max_triples).with_seed(Some(seed)),
        }
    };

    combine("brace", &[axioms, compat])
}

/// The action `gamma(x) y = -x + x*y` of the multiplicative group of a brace
/// on its additive group.
#[derive(Clone)]
pub struct GammaAction {
    grp: BraceGroup,
}

impl GammaAction {
    pub fn new(view: BraceView) -> Self {
        GammaAction {
            grp: BraceGroup { view },
        }
    }

    pub fn brace(&self) -> &BraceView {
        &self.grp.view
    }
}

impl Action for GammaAction {
    type G = BraceGroup;

    fn group(&self) -> &BraceGroup {
        &self.grp
    }

    fn signature(&self) -> &AbSignature {
        &self.grp.view.sig
    }

    fn act(&self, x: &IntVec, y: &IntVec) -> IntVec {
        self.grp.view.star(x, y).sub(x)
    }
}

/// Builds the gamma action of a brace.
pub fn gamma_function(b: &BraceView) -> GammaAction {
    GammaAction::new(b.clone())
}

/// Verifies gamma is an action by automorphisms: `gamma(x*y) = gamma(x) o
/// gamma(y)` with arguments from `elements` applied to `probes`, and
/// additivity of each `gamma(x)` on probe pairs.
pub fn gamma_check(gamma: &GammaAction, elements: &[IntVec], probes: &[IntVec]) -> Report {
    let b = gamma.brace();
    let homo = scan_pairs("gamma/homomorphism", elements, elements, |x, y| {
        let xy = b.star(x, y);
        for w in probes {
            if gamma.act(&xy, w) != gamma.act(x, &gamma.act(y, w)) {
                return Verdict::Fail(json!({"x": x, "y": y, "w": w}));
            }
        }
        Verdict::Pass
    });
    let additive = scan_pairs("gamma/additive", elements, probes, |x, y| {
        for z in probes {
            if gamma.act(x, &y.add(z)) != gamma.act(x, y).add(&gamma.act(x, z)) {
                return Verdict::Fail(json!({"x": x, "y": y, "z": z}));
            }
        }
        Verdict::Pass
    });
    combine("gamma", &[homo, additive])
}

/// Checks `gamma(x) y = Phi(R(x)) y` pointwise on element pairs: the gamma
/// action of the brace built from an operator is the operator's own action.
pub fn gamma_matches_operator<R: RelRbOp>(
    op: &R,
    gamma: &GammaAction,
    elements: &[IntVec],
) -> Report {
    scan_pairs("gamma/matches_operator", elements, elements, |x, y| {
        let rx = match op.try_eval(x) {
            Some(r) => r,
            None => return Verdict::Skip,
        };
        let lhs = gamma.act(x, y);
        let rhs = op.action().act(&rx, y);
        if lhs == rhs {
            Verdict::Pass
        } else {
            Verdict::Fail(json!({"x": x, "y": y, "gamma": lhs, "phi": rhs}))
        }
    })
}

/// Checks left multiplication in the descendent group is an action:
/// `L_{u*v} = L_u o L_v` on element pairs applied to probes, and
/// `L_u^{-1} = L_{dagger(u)}` on element/probe pairs.
pub fn lmult_action_check<R: RelRbOp>(
    desc: &DescendentGroup<R>,
    elements: &[IntVec],
    probes: &[IntVec],
) -> Report {
    let homo = scan_pairs("lmult/homomorphism", elements, elements, |u, v| {
        let uv = desc.star(u, v);
        for w in probes {
            if desc.star(&uv, w) != desc.star(u, &desc.star(v, w)) {
                return Verdict::Fail(json!({"u": u, "v": v, "w": w}));
            }
        }
        Verdict::Pass
    });
    let inverse = scan_pairs("lmult/inverse", elements, probes, |u, w| {
        let ud = desc.dagger(u);
        if desc.star(u, &desc.star(&ud, w)) != *w || desc.star(&ud, &desc.star(u, w)) != *w {
            Verdict::Fail(json!({"u": u, "w": w}))
        } else {
            Verdict::Pass
        }
    });
    combine("lmult_action", &[homo, inverse])
}

/// A 1-cocycle `pi: G -> V` for the action: `pi(xy) = pi(x) + Phi(x)pi(y)`,
/// optionally with a stored inverse witnessing bijectivity.
pub struct OneCocycle<A: Action> {
    pub action: A,
    pi: Arc<dyn Fn(&GElem<A>) -> IntVec + Send + Sync>,
    pi_inv: Option<Arc<dyn Fn(&IntVec) -> GElem<A> + Send + Sync>>,
}

impl<A: Action> OneCocycle<A> {
    pub fn new(
        action: A,
        pi: Arc<dyn Fn(&GElem<A>) -> IntVec + Send + Sync>,
        pi_inv: Option<Arc<dyn Fn(&IntVec) -> GElem<A> + Send + Sync>>,
    ) -> Self {
        OneCocycle { action, pi, pi_inv }
    }

    /// The identity cocycle of a brace: `G = (V,*)` acting through gamma,
    /// `pi = id`. Always bijective.
    pub fn identity_of_brace(b: &BraceView) -> OneCocycle<GammaAction> {
        OneCocycle {
            action: gamma_function(b),
            pi: Arc::new(|x: &IntVec| x.clone()),
            pi_inv: Some(Arc::new(|v: &IntVec| v.clone())),
        }
    }

    pub fn pi(&self, x: &GElem<A>) -> IntVec {
        (self.pi)(x)
    }

    pub fn pi_inv(&self, v: &IntVec) -> Option<GElem<A>> {
        self.pi_inv.as_ref().map(|f| f(v))
    }

    pub fn is_bijective(&self) -> bool {
        self.pi_inv.is_some()
    }
}

/// Checks the cocycle law on pairs from `gs`, and, when an inverse is stored,
/// that it inverts `pi` on `gs` and on `vs`.
pub fn cocycle_check<A: Action>(
    coc: &OneCocycle<A>,
    gs: &[GElem<A>],
    vs: &[IntVec],
) -> Report {
    let g0 = coc.action.group();
    let law = scan_pairs("cocycle/law", gs, gs, |x, y| {
        let lhs = coc.pi(&g0.op(x, y));
        let rhs = coc.pi(x).add(&coc.action.act(x, &coc.pi(y)));
        if lhs == rhs {
            Verdict::Pass
        } else {
            Verdict::Fail(json!({"x": x, "y": y, "lhs": lhs, "rhs": rhs}))
        }
    });
    let mut parts = vec![law];
    if coc.is_bijective() {
        let left = scan_single("cocycle/inverse_left", gs, |x| {
            match coc.pi_inv(&coc.pi(x)) {
                Some(back) if back == *x => Verdict::Pass,
                Some(back) => Verdict::Fail(json!({"x": x, "roundtrip": back})),
                None => Verdict::Skip,
            }
        });
        let right = scan_single("cocycle/inverse_right", vs, |v| {
            match coc.pi_inv(v) {
                Some(x) => {
                    let back = coc.pi(&x);
                    if back == *v {
                        Verdict::Pass
                    } else {
                        Verdict::Fail(json!({"v": v, "roundtrip": back}))
                    }
                }
                None => Verdict::Skip,
            }
        });
        parts.push(left);
        parts.push(right);
    }
    combine("cocycle", &parts)
}

/// Operator obtained by inverting a bijective 1-cocycle.
pub struct CocycleOp<A: Action> {
    action: A,
    pi_inv: Arc<dyn Fn(&IntVec) -> GElem<A> + Send + Sync>,
}

impl<A: Action> RelRbOp for CocycleOp<A> {
    type A = A;

    fn action(&self) -> &A {
        &self.action
    }

    fn try_eval(&self, v: &IntVec) -> Option<GElem<A>> {
        Some((self.pi_inv)(v))
    }
}

/// Inverts a bijective cocycle into an operator and verifies the defining
/// relation on the domain.
pub fn rrb_from_cocycle<A: Action + Clone>(
    coc: &OneCocycle<A>,
    domain: &VerifyDomain,
) -> Result<CocycleOp<A>, CoreError> {
    let pi_inv = coc
        .pi_inv
        .clone()
        .ok_or_else(|| CoreError::NonBijective("cocycle has no stored inverse".into()))?;
    let op = CocycleOp {
        action: coc.action.clone(),
        pi_inv,
    };
    let rep = verify_rrb(&op, domain)?;
    if !rep.holds {
        return Err(CoreError::check_failed(
            "rrb_law",
            format!(
                "inverted cocycle is not an operator: {:?}",
                rep.counterexample
            ),
        ));
    }
    Ok(op)
}
