//! T-structures on abelian groups: bijections `T` satisfying
//! `T(k a) = k T^k(a)`, their construction from operators and from bijective
//! 1-cocycles, and the reconstruction of a full brace datum on a cyclic
//! group from `T` alone.

use crate::domain::ball_elements;
use crate::error::CoreError;
use crate::groups::action::Action;
use crate::groups::group::Group;
use crate::groups::intvec::{AbSignature, IntVec};
use crate::rbops::{
    brace_check, cocycle_check, scan_pairs, scan_single, BraceView, OneCocycle, RelRbOp, Verdict,
};
use crate::report::{combine, Report};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::HashMap;
use std::sync::Arc;

/// Default validation window for the defining law.
pub const DEFAULT_K_RANGE: (i64, i64) = (-6, 6);

/// Cap on materialized finite domains.
const MAX_ELEMENTS: u128 = 200_000;

enum TImpl {
    /// Explicit value table, possibly covering only a window of an infinite
    /// group; `total` records whether every group element is covered.
    Table {
        forward: HashMap<IntVec, IntVec>,
        backward: HashMap<IntVec, IntVec>,
        total: bool,
    },
    /// Closed-form map with its inverse, total on the group; the stored
    /// domain only bounds where checks quantify.
    Formula {
        f: Arc<dyn Fn(&IntVec) -> IntVec + Send + Sync>,
        f_inv: Arc<dyn Fn(&IntVec) -> IntVec + Send + Sync>,
    },
}

/// A candidate T-structure: a bijection of an abelian group together with
/// the set of represented elements the checks quantify over.
pub struct TStructure {
    sig: AbSignature,
    domain: Vec<IntVec>,
    imp: TImpl,
}

fn window_domain(sig: &AbSignature, window: u64) -> Result<Vec<IntVec>, CoreError> {
    if sig.is_finite() {
        sig.elements(MAX_ELEMENTS)
    } else {
        ball_elements(sig, window)
    }
}

impl TStructure {
    /// The identity map.
    pub fn identity(sig: AbSignature, window: u64) -> Result<Self, CoreError> {
        let domain = window_domain(&sig, window)?;
        Ok(TStructure {
            sig,
            domain,
            imp: TImpl::Formula {
                f: Arc::new(|v: &IntVec| v.clone()),
                f_inv: Arc::new(|v: &IntVec| v.clone()),
            },
        })
    }

    /// Negation `a -> -a`.
    pub fn negation(sig: AbSignature, window: u64) -> Result<Self, CoreError> {
        let domain = window_domain(&sig, window)?;
        Ok(TStructure {
            sig,
            domain,
            imp: TImpl::Formula {
                f: Arc::new(|v: &IntVec| v.neg()),
                f_inv: Arc::new(|v: &IntVec| v.neg()),
            },
        })
    }

    /// Builds from an explicit table. The table must be injective; it is
    /// total when it covers the whole (finite) group.
    pub fn from_table(
        sig: AbSignature,
        forward: HashMap<IntVec, IntVec>,
    ) -> Result<Self, CoreError> {
        let mut backward = HashMap::with_capacity(forward.len());
        for (k, v) in &forward {
            if backward.insert(v.clone(), k.clone()).is_some() {
                return Err(CoreError::NonBijective(format!(
                    "two table entries share the image {:?}",
                    v
                )));
            }
        }
        let total = match sig.order() {
            Some(ord) => forward.len() as u128 == ord,
            None => false,
        };
        if total {
            // Injective + same cardinality makes it bijective; make sure the
            // images stay inside the group (IntVec canonicalizes, so any
            // mismatch would have shown as a duplicate key).
            for v in forward.values() {
                if v.signature() != &sig {
                    return Err(CoreError::Precondition(
                        "table image has a different signature".into(),
                    ));
                }
            }
        }
        let mut domain: Vec<IntVec> = forward.keys().cloned().collect();
        domain.sort();
        Ok(TStructure {
            sig,
            domain,
            imp: TImpl::Table {
                forward,
                backward,
                total,
            },
        })
    }

    /// Builds from closed forms, validating that the two maps invert each
    /// other on the represented window.
    pub fn from_formula(
        sig: AbSignature,
        f: Arc<dyn Fn(&IntVec) -> IntVec + Send + Sync>,
        f_inv: Arc<dyn Fn(&IntVec) -> IntVec + Send + Sync>,
        window: u64,
    ) -> Result<Self, CoreError> {
        let domain = window_domain(&sig, window)?;
        for v in &domain {
            if f_inv(&f(v)) != *v || f(&f_inv(v)) != *v {
                return Err(CoreError::NonBijective(format!(
                    "maps do not invert each other at {:?}",
                    v
                )));
            }
        }
        Ok(TStructure {
            sig,
            domain,
            imp: TImpl::Formula { f, f_inv },
        })
    }

    /// Table on `Z_m` given by the list of images of `0..m`.
    pub fn from_cyclic_images(m: u64, images: &[i64]) -> Result<Self, CoreError> {
        if m == 0 || images.len() != m as usize {
            return Err(CoreError::Precondition(
                "need exactly m images for Z_m".into(),
            ));
        }
        let sig = AbSignature(vec![m]);
        let forward: HashMap<IntVec, IntVec> = images
            .iter()
            .enumerate()
            .map(|(i, &im)| {
                (
                    IntVec::from_coords(sig.clone(), &[i as i64]),
                    IntVec::from_coords(sig.clone(), &[im]),
                )
            })
            .collect();
        TStructure::from_table(sig, forward)
    }

    pub fn signature(&self) -> &AbSignature {
        &self.sig
    }

    /// Elements the checks quantify over, sorted.
    pub fn domain(&self) -> &[IntVec] {
        &self.domain
    }

    pub fn is_total(&self) -> bool {
        match &self.imp {
            TImpl::Table { total, .. } => *total,
            TImpl::Formula { .. } => true,
        }
    }

    pub fn try_apply(&self, v: &IntVec) -> Option<IntVec> {
        match &self.imp {
            TImpl::Table { forward, .. } => forward.get(v).cloned(),
            TImpl::Formula { f, .. } => Some(f(v)),
        }
    }

    pub fn try_apply_inv(&self, v: &IntVec) -> Option<IntVec> {
        match &self.imp {
            TImpl::Table { backward, .. } => backward.get(v).cloned(),
            TImpl::Formula { f_inv, .. } => Some(f_inv(v)),
        }
    }

    pub fn apply(&self, v: &IntVec) -> IntVec {
        self.try_apply(v).expect("value not represented")
    }

    /// `T^k`, with negative `k` through the inverse; `None` as soon as an
    /// intermediate value leaves the represented table.
    pub fn try_power(&self, v: &IntVec, k: i64) -> Option<IntVec> {
        let mut cur = v.clone();
        for _ in 0..k.unsigned_abs() {
            cur = if k >= 0 {
                self.try_apply(&cur)?
            } else {
                self.try_apply_inv(&cur)?
            };
        }
        Some(cur)
    }
}

#[derive(Serialize, Deserialize)]
struct TStructureJson {
    moduli: Vec<u64>,
    map: Vec<(Vec<i64>, Vec<i64>)>,
    total: bool,
}

impl Serialize for TStructure {
    /// Serializes as the materialized table over the represented domain
    /// (closed forms are sampled on their window).
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map = self
            .domain
            .iter()
            .filter_map(|v| self.try_apply(v).map(|w| (v.coords(), w.coords())))
            .collect();
        TStructureJson {
            moduli: self.sig.0.clone(),
            map,
            total: self.is_total(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = TStructureJson::deserialize(d)?;
        let sig = AbSignature(raw.moduli);
        let forward = raw
            .map
            .into_iter()
            .map(|(a, b)| {
                (
                    IntVec::from_coords(sig.clone(), &a),
                    IntVec::from_coords(sig.clone(), &b),
                )
            })
            .collect();
        TStructure::from_table(sig, forward).map_err(serde::de::Error::custom)
    }
}

/// Verifies bijectivity on the represented domain and the defining law
/// `T(k a) = k T^k(a)` for `k` in the inclusive range. Pairs that leave a
/// windowed table are skipped and counted.
pub fn tstruct_check(t: &TStructure, k_range: (i64, i64)) -> Report {
    let bijective = scan_single("tstruct/bijective", t.domain(), |v| {
        match t.try_apply(v).and_then(|w| t.try_apply_inv(&w)) {
            Some(back) if back == *v => Verdict::Pass,
            Some(back) => Verdict::Fail(json!({"v": v, "roundtrip": back})),
            None => Verdict::Skip,
        }
    });

    let ks: Vec<i64> = (k_range.0..=k_range.1).collect();
    let law = scan_pairs("tstruct/law", &ks, t.domain(), |&k, a| {
        let lhs = t.try_apply(&a.scale(k));
        let rhs = t.try_power(a, k).map(|w| w.scale(k));
        match (lhs, rhs) {
            (Some(l), Some(r)) if l == r => Verdict::Pass,
            (Some(l), Some(r)) => Verdict::Fail(json!({"k": k, "a": a, "lhs": l, "rhs": r})),
            _ => Verdict::Skip,
        }
    });

    combine("tstruct_check", &[bijective, law])
}

/// The scaling identity tying an operator to its T-structure:
/// `Phi(R(n v)^{-1}) (m v) = m T^n(v)` for `m, n` in `[0, max_mn]`, with
/// `T(w) = Phi(R(w)^{-1}) w`. Pairs with unrepresented values are skipped.
pub fn t_scaling_check<R: RelRbOp>(op: &R, elements: &[IntVec], max_mn: i64) -> Report {
    let act = op.action();
    let g = act.group();
    let t_once = |w: &IntVec| -> Option<IntVec> {
        let r = op.try_eval(w)?;
        Some(act.act(&g.inv(&r), w))
    };
    let mns: Vec<(i64, i64)> = (0..=max_mn)
        .flat_map(|m| (0..=max_mn).map(move |n| (m, n)))
        .collect();
    scan_pairs("t_scaling_check", elements, &mns, |v, &(m, n)| {
        let lhs = match op.try_eval(&v.scale(n)) {
            Some(rnv) => act.act(&g.inv(&rnv), &v.scale(m)),
            None => return Verdict::Skip,
        };
        let mut tn = v.clone();
        for _ in 0..n {
            tn = match t_once(&tn) {
                Some(w) => w,
                None => return Verdict::Skip,
            };
        }
        if lhs == tn.scale(m) {
            Verdict::Pass
        } else {
            Verdict::Fail(json!({"v": v, "m": m, "n": n, "lhs": lhs, "rhs": tn.scale(m)}))
        }
    })
}

/// The T-structure of an operator: `T(v) = Phi(R(v)^{-1}) v`, with inverse
/// `T^{-1}(w) = Phi(R(-w)^{-1}) w`. Finite groups are tabulated; infinite
/// ones keep the closed form when the operator is total and fall back to a
/// windowed table otherwise. The report combines the defining law on the
/// default range with the scaling identity.
pub fn t_from_rrb<R: RelRbOp + 'static>(
    op: Arc<R>,
    window: u64,
) -> Result<(TStructure, Report), CoreError> {
    let sig = op.action().signature().clone();
    let forward_of = |o: &R, v: &IntVec| -> Option<IntVec> {
        let r = o.try_eval(v)?;
        Some(o.action().act(&o.action().group().inv(&r), v))
    };

    let total = window_domain(&sig, window)?
        .iter()
        .all(|v| op.try_eval(v).is_some());
    let t = if sig.is_finite() || !total {
        let domain = window_domain(&sig, window)?;
        let forward: HashMap<IntVec, IntVec> = domain
            .iter()
            .filter_map(|v| forward_of(&op, v).map(|w| (v.clone(), w)))
            .collect();
        TStructure::from_table(sig, forward)?
    } else {
        let op_f = Arc::clone(&op);
        let op_b = Arc::clone(&op);
        TStructure::from_formula(
            sig,
            Arc::new(move |v: &IntVec| {
                let r = op_f.eval(v);
                op_f.action().act(&op_f.action().group().inv(&r), v)
            }),
            Arc::new(move |w: &IntVec| {
                let r = op_b.eval(&w.neg());
                op_b.action().act(&op_b.action().group().inv(&r), w)
            }),
            window,
        )?
    };

    let domain = t.domain().to_vec();
    let rep = combine(
        "t_from_rrb",
        &[
            tstruct_check(&t, DEFAULT_K_RANGE),
            t_scaling_check(op.as_ref(), &domain, 4),
        ],
    );
    Ok((t, rep))
}

/// The T-structure of a bijective 1-cocycle: `T(a) = rho(pi^{-1}(a)^{-1}) a`,
/// with inverse `T^{-1}(b) = pi(pi^{-1}(-b)^{-1})`. Values are materialized
/// as a table over the represented window (total on finite groups).
pub fn t_from_cocycle<A: Action>(
    coc: &OneCocycle<A>,
    window: u64,
) -> Result<(TStructure, Report), CoreError> {
    if !coc.is_bijective() {
        return Err(CoreError::NonBijective(
            "cocycle has no stored inverse".into(),
        ));
    }
    let sig = coc.action.signature().clone();
    let g = coc.action.group();
    let domain = window_domain(&sig, window)?;
    let forward: HashMap<IntVec, IntVec> = domain
        .iter()
        .map(|a| {
            let x = coc.pi_inv(a).expect("bijectivity checked above");
            (a.clone(), coc.action.act(&g.inv(&x), a))
        })
        .collect();
    let t = TStructure::from_table(sig, forward)?;
    let rep = tstruct_check(&t, DEFAULT_K_RANGE);
    Ok((t, rep))
}

/// Multiplicative group on `0..m` with `x * y = x + u(x) y mod m`.
#[derive(Clone, Debug)]
struct CyclicStarGroup {
    m: i64,
    mult: Vec<i64>,
    inv: Vec<i64>,
}

impl Group for CyclicStarGroup {
    type Elem = i64;

    fn identity(&self) -> i64 {
        0
    }

    fn op(&self, a: &i64, b: &i64) -> i64 {
        (a + self.mult[*a as usize] * b).rem_euclid(self.m)
    }

    fn inv(&self, a: &i64) -> i64 {
        self.inv[*a as usize]
    }

    fn enumerate(&self) -> Option<Vec<i64>> {
        Some((0..self.m).collect())
    }
}

/// `Z_m` acted on by the star group through the multipliers.
#[derive(Clone)]
struct RhoAction {
    sig: AbSignature,
    group: CyclicStarGroup,
}

impl Action for RhoAction {
    type G = CyclicStarGroup;

    fn group(&self) -> &CyclicStarGroup {
        &self.group
    }

    fn signature(&self) -> &AbSignature {
        &self.sig
    }

    fn act(&self, g: &i64, v: &IntVec) -> IntVec {
        v.scale(self.group.mult[*g as usize])
    }
}

/// The brace datum reconstructed from a T-structure on `Z_m`: the action is
/// by the multipliers `rho[x]`, and `star[x][y] = x + rho[x] y mod m`.
#[derive(Serialize)]
pub struct CyclicBraceDatum {
    pub modulus: u64,
    pub rho: Vec<i64>,
    pub star: Vec<Vec<i64>>,
    /// Whether replacing the canonical exponent lift in `[0, m)` by another
    /// representative would change any multiplier (it cannot when the order
    /// of `T` divides `m`).
    pub lift_sensitive: bool,
    pub report: Report,
}

impl CyclicBraceDatum {
    pub fn star_of(&self, x: i64, y: i64) -> i64 {
        let m = self.modulus as i64;
        self.star[x.rem_euclid(m) as usize][y.rem_euclid(m) as usize]
    }

    /// The reconstructed multiplication as a brace view on `Z_m`.
    pub fn brace_view(&self) -> BraceView {
        let sig = AbSignature(vec![self.modulus]);
        let m = self.modulus as i64;
        let rho = self.rho.clone();
        let star_sig = sig.clone();
        let g = star_group(m, &self.rho);
        BraceView::new(
            sig,
            Arc::new(move |x: &IntVec, y: &IntVec| {
                let xv = x.get(0);
                IntVec::from_coords(
                    star_sig.clone(),
                    &[(xv + rho[xv.rem_euclid(m) as usize] * y.get(0)).rem_euclid(m)],
                )
            }),
            Arc::new(move |x: &IntVec| {
                IntVec::from_coords(
                    AbSignature(vec![m as u64]),
                    &[g.inv(&x.get(0).rem_euclid(m))],
                )
            }),
        )
    }
}

fn star_group(m: i64, mult: &[i64]) -> CyclicStarGroup {
    // x * y = 0 has the unique solution y = -x / u(x) mod m; brute force the
    // division since m stays desk-sized here.
    let inv: Vec<i64> = (0..m)
        .map(|x| {
            (0..m)
                .find(|y| (x + mult[x as usize] * y).rem_euclid(m) == 0)
                .expect("multiplier is a unit")
        })
        .collect();
    CyclicStarGroup {
        m,
        mult: mult.to_vec(),
        inv,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Reconstructs the full brace datum on `Z_m` from a total T-structure:
/// multipliers `rho[x] = T^{-lift(T(x))}(1)` with the canonical lift in
/// `[0, m)`, `star[x][y] = x + rho[x] y`, followed by exhaustive
/// verification of the group, module, cocycle, and compatibility laws.
pub fn cyclic_reconstruct(t: &TStructure) -> Result<CyclicBraceDatum, CoreError> {
    let sig = t.signature().clone();
    if sig.0.len() != 1 || !sig.is_finite() {
        return Err(CoreError::Precondition(
            "reconstruction needs a single finite cyclic factor".into(),
        ));
    }
    if !t.is_total() {
        return Err(CoreError::Precondition(
            "reconstruction needs the full value table".into(),
        ));
    }
    let m = sig.0[0] as i64;

    let gate = tstruct_check(t, (0, m - 1));
    if !gate.holds {
        return Err(CoreError::check_failed(
            "tstruct_check",
            format!("not a T-structure on Z_{}: {:?}", m, gate.counterexample),
        ));
    }

    let elem = |x: i64| IntVec::from_coords(sig.clone(), &[x]);
    let one = elem(1 % m);
    let power_at_one = |e: i64| -> i64 {
        t.try_power(&one, e)
            .expect("total table cannot lose values")
            .get(0)
    };

    let mut rho = Vec::with_capacity(m as usize);
    let mut lift_sensitive = false;
    for x in 0..m {
        let lift = t.apply(&elem(x)).get(0); // canonical representative in [0, m)
        let u = power_at_one(-lift);
        if power_at_one(-(lift + m)) != u {
            lift_sensitive = true;
        }
        if gcd(u.rem_euclid(m) as u64, m as u64) != 1 {
            return Err(CoreError::check_failed(
                "cyclic_reconstruct/unit",
                format!("multiplier {} at x = {} is not a unit mod {}", u, x, m),
            ));
        }
        rho.push(u);
    }

    let star: Vec<Vec<i64>> = (0..m)
        .map(|x| (0..m).map(|y| (x + rho[x as usize] * y).rem_euclid(m)).collect())
        .collect();

    let group = star_group(m, &rho);
    let action = RhoAction {
        sig: sig.clone(),
        group: group.clone(),
    };
    let gelems: Vec<i64> = (0..m).collect();
    let vecs: Vec<IntVec> = (0..m).map(elem).collect();

    let datum = CyclicBraceDatum {
        modulus: m as u64,
        rho,
        star,
        lift_sensitive,
        report: Report::pass("pending", 0),
    };
    let view = datum.brace_view();

    let triples = (m as u64).pow(3).max(1);
    let brace = brace_check(&view, &vecs, triples, 42);
    let module = crate::groups::action::check_module_axioms(
        &action,
        &gelems,
        &vecs,
        triples,
        42,
    );
    let pi: OneCocycle<RhoAction> = OneCocycle::new(
        action,
        Arc::new(move |x: &i64| IntVec::from_coords(AbSignature(vec![m as u64]), &[*x])),
        Some(Arc::new(move |v: &IntVec| v.get(0).rem_euclid(m))),
    );
    let cocycle = cocycle_check(&pi, &gelems, &vecs);

    let mut report = combine("cyclic_reconstruct", &[gate, brace, module, cocycle]);
    if lift_sensitive {
        report = report.with_note(
            "exponent lift in [0, m) is not canonical: the order of T does not divide m",
        );
    }
    if !report.holds {
        return Err(CoreError::check_failed(
            "cyclic_reconstruct",
            format!("axiom failure: {:?}", report.counterexample),
        ));
    }
    Ok(CyclicBraceDatum { report, ..datum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_domain, DomainPolicy};
    use crate::groups::action::{PermAction, ScaledProjAction};
    use crate::groups::perm::Perm;
    use crate::perm_rb::{sign_rep_operator, RecursiveRbOp, SigmaTuple};
    use crate::rbops::{brace_from_rrb, ConstIdentityOp, FnOp, TripleBudget};
    use crate::ybe::{restrict_to_basis, structure_group};

    fn p(s: &str, n: usize) -> Perm {
        Perm::parse_cycles(s, n).unwrap()
    }

    #[test]
    fn identity_is_a_t_structure() {
        let t = TStructure::identity(AbSignature(vec![5]), 0).unwrap();
        assert!(tstruct_check(&t, DEFAULT_K_RANGE).holds);
        let t = TStructure::identity(AbSignature::free(2), 3).unwrap();
        assert!(tstruct_check(&t, DEFAULT_K_RANGE).holds);
    }

    #[test]
    fn negation_depends_on_the_modulus() {
        let t5 = TStructure::negation(AbSignature(vec![5]), 0).unwrap();
        let rep = tstruct_check(&t5, DEFAULT_K_RANGE);
        assert!(!rep.holds);
        // k = 2, a = 1 is a concrete violation: T(2) = 3 but 2 T^2(1) = 2.
        let a = IntVec::from_coords(AbSignature(vec![5]), &[1]);
        assert_eq!(t5.apply(&a.scale(2)).get(0), 3);
        assert_eq!(t5.try_power(&a, 2).unwrap().scale(2).get(0), 2);

        let t4 = TStructure::negation(AbSignature(vec![4]), 0).unwrap();
        assert!(tstruct_check(&t4, DEFAULT_K_RANGE).holds);
    }

    #[test]
    fn constant_identity_operator_gives_identity_t() {
        let op = Arc::new(ConstIdentityOp::new(PermAction::new(3)));
        let (t, rep) = t_from_rrb(op, 3).unwrap();
        assert!(rep.holds, "{:?}", rep);
        for v in t.domain() {
            assert_eq!(t.apply(v), *v);
        }
    }

    #[test]
    fn recursive_operator_t_structure() {
        let tuple =
            SigmaTuple::single(vec![p("(2 3)", 3), p("(2 3)", 3), p("(2 3)", 3)]).unwrap();
        let op = Arc::new(RecursiveRbOp::new(tuple).unwrap());
        let sig = op.action().signature().clone();
        let (t, rep) = t_from_rrb(Arc::clone(&op), 4).unwrap();
        assert!(rep.holds, "{:?}", rep);
        // T(e_i) lands on the coordinate the inverse generator points at.
        let e = |i: usize| IntVec::basis(sig.clone(), i);
        assert_eq!(t.apply(&e(0)), e(0));
        assert_eq!(t.apply(&e(1)), e(2));
        assert_eq!(t.apply(&e(2)), e(1));
    }

    #[test]
    fn semidirect_projection_t_matches_closed_form() {
        // Z_3 scaled by 2^x for x in Z_2; the operator projects onto x.
        let action = ScaledProjAction::new(3, 2, 2).unwrap();
        let sig = action.signature().clone();
        let op = Arc::new(FnOp::new(action, |v: &IntVec| v.get(1)));
        let (t, rep) = t_from_rrb(op, 0).unwrap();
        assert!(rep.holds, "{:?}", rep);
        // T(a, x) = (2^{-x} a, x); the inverse of 2 mod 3 is 2.
        for a in 0..3i64 {
            for x in 0..2i64 {
                let v = IntVec::from_coords(sig.clone(), &[a, x]);
                let scaled = if x == 0 { a } else { (2 * a).rem_euclid(3) };
                let expect = IntVec::from_coords(sig.clone(), &[scaled, x]);
                assert_eq!(t.apply(&v), expect, "at ({}, {})", a, x);
            }
        }
    }

    #[test]
    fn scaling_identity_for_sign_representation() {
        let op = sign_rep_operator(3, p("(1 2)", 3), p("(1 3)", 3)).unwrap();
        let sig = op.action().signature().clone();
        let elements = ball_elements(&sig, 4).unwrap();
        let rep = t_scaling_check(&op, &elements, 4);
        assert!(rep.holds, "{:?}", rep);
    }

    #[test]
    fn cocycle_t_equals_operator_t() {
        let tuple =
            SigmaTuple::single(vec![p("(1 2)", 3), p("(1 2)", 3), p("()", 3)]).unwrap();
        let op = Arc::new(RecursiveRbOp::new(tuple).unwrap());
        let domain = build_domain(
            op.action().signature(),
            &DomainPolicy::Bounded {
                k: 2,
                extra_pairs: 64,
                seed: 42,
            },
        )
        .unwrap();
        let (brace, rep) = brace_from_rrb(Arc::clone(&op), &domain, TripleBudget::default())
            .unwrap();
        assert!(rep.holds);
        let coc = OneCocycle::<crate::rbops::GammaAction>::identity_of_brace(&brace);
        let (tc, rep_c) = t_from_cocycle(&coc, 3).unwrap();
        assert!(rep_c.holds, "{:?}", rep_c);
        let (tr, _) = t_from_rrb(Arc::clone(&op), 3).unwrap();
        for v in tc.domain() {
            assert_eq!(tc.apply(v), tr.apply(v), "at {:?}", v);
        }
    }

    #[test]
    fn structure_group_cocycle_t() {
        let tuple =
            SigmaTuple::single(vec![p("(2 3)", 3), p("()", 3), p("()", 3)]).unwrap();
        let op = RecursiveRbOp::new(tuple).unwrap();
        let r = restrict_to_basis(&op).unwrap();
        let h = structure_group(&r, 4).unwrap();
        let semi = h.group.clone();
        let rr = Arc::new(h.rr_map.clone());
        let adjoint = crate::groups::action::AdjointAction::new(PermAction::new(3));
        let coc = OneCocycle::new(
            adjoint,
            Arc::new(|e: &crate::groups::action::SemidirectElem<Perm>| e.vec.clone()),
            Some(Arc::new(move |v: &IntVec| {
                semi.pair(v.clone(), rr.get(v).expect("inside the window").clone())
            })),
        );
        let (t, rep) = t_from_cocycle(&coc, 3).unwrap();
        assert!(rep.holds, "{:?}", rep);
        // T agrees with the operator form on the window.
        for v in t.domain() {
            let g = h.rr_map.get(v).unwrap();
            assert_eq!(
                t.apply(v),
                crate::groups::action::perm_act(&g.inv(), v),
                "at {:?}",
                v
            );
        }
    }

    #[test]
    fn identity_reconstruction_is_the_trivial_brace() {
        for m in 1..=12u64 {
            let t = TStructure::identity(AbSignature(vec![m]), 0).unwrap();
            let datum = cyclic_reconstruct(&t).unwrap();
            assert!(datum.report.holds);
            assert!(!datum.lift_sensitive);
            assert!(datum.rho.iter().all(|&u| u == 1 % m as i64));
            for x in 0..m as i64 {
                for y in 0..m as i64 {
                    assert_eq!(datum.star_of(x, y), (x + y).rem_euclid(m as i64));
                }
            }
        }
    }

    #[test]
    fn transposition_on_z6_reconstructs_the_crt_brace() {
        let t = TStructure::from_cyclic_images(6, &[0, 5, 2, 3, 4, 1]).unwrap();
        assert!(tstruct_check(&t, (0, 5)).holds);
        let datum = cyclic_reconstruct(&t).unwrap();
        assert_eq!(datum.rho, vec![1, 5, 1, 5, 1, 5]);
        assert!(datum.report.holds);
        assert!(!datum.lift_sensitive);
        assert_eq!(datum.star_of(1, 1), 0);

        // Round trip: the datum's brace, read back through its identity
        // cocycle, reproduces T and hence the same star table.
        let view = datum.brace_view();
        let coc = OneCocycle::<crate::rbops::GammaAction>::identity_of_brace(&view);
        let (t2, rep2) = t_from_cocycle(&coc, 0).unwrap();
        assert!(rep2.holds);
        for v in t.domain() {
            assert_eq!(t2.apply(v), t.apply(v));
        }
        let datum2 = cyclic_reconstruct(&t2).unwrap();
        assert_eq!(datum2.star, datum.star);
    }

    #[test]
    fn negation_reconstruction_follows_the_check() {
        let t5 = TStructure::negation(AbSignature(vec![5]), 0).unwrap();
        assert!(cyclic_reconstruct(&t5).is_err());
        let t4 = TStructure::negation(AbSignature(vec![4]), 0).unwrap();
        let datum = cyclic_reconstruct(&t4).unwrap();
        assert_eq!(datum.rho, vec![1, 3, 1, 3]);
        assert!(datum.report.holds);
    }

    #[test]
    fn serde_roundtrip() {
        let t = TStructure::from_cyclic_images(6, &[0, 5, 2, 3, 4, 1]).unwrap();
        let j = serde_json::to_string(&t).unwrap();
        let back: TStructure = serde_json::from_str(&j).unwrap();
        assert!(back.is_total());
        for v in t.domain() {
            assert_eq!(back.apply(v), t.apply(v));
        }
        // A non-injective table is rejected.
        let bad = json!({"moduli": [3], "map": [[[0], [1]], [[1], [1]], [[2], [2]]], "total": true});
        assert!(serde_json::from_value::<TStructure>(bad).is_err());
    }
}
