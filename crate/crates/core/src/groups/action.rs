//! Module actions `Phi: G -> Aut(V)` and the semidirect product `V ⋊_Phi G`.

use crate::error::CoreError;
use crate::groups::group::{Group, IntGroup, Symmetric};
use crate::groups::intvec::{AbSignature, IntVec};
use crate::groups::perm::Perm;
use crate::report::Report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// A left action of a group on the abelian group of a signature, by
/// automorphisms.
pub trait Action: Send + Sync {
    type G: Group;

    fn group(&self) -> &Self::G;
    fn signature(&self) -> &AbSignature;
    fn act(&self, g: &<Self::G as Group>::Elem, v: &IntVec) -> IntVec;
}

/// Element type of the acting group of `A`.
pub type GElem<A> = <<A as Action>::G as Group>::Elem;

/// Coordinate-permuting action of `S_n` on `Z^n`: `w` sends `e_i` to `e_{w(i)}`.
#[derive(Clone, Debug)]
pub struct PermAction {
    group: Symmetric,
    sig: AbSignature,
}

impl PermAction {
    pub fn new(n: usize) -> Self {
        PermAction {
            group: Symmetric { n },
            sig: AbSignature::free(n),
        }
    }

    pub fn n(&self) -> usize {
        self.group.n
    }
}

/// `w . v` with `(w . v)_{w(i)} = v_i`.
pub fn perm_act(w: &Perm, v: &IntVec) -> IntVec {
    let mut coords = vec![0i64; v.signature().len()];
    for (i, c) in v.support() {
        coords[w.apply(i)] = c;
    }
    IntVec::from_owned(v.signature().clone(), coords)
}

impl Action for PermAction {
    type G = Symmetric;

    fn group(&self) -> &Symmetric {
        &self.group
    }

    fn signature(&self) -> &AbSignature {
        &self.sig
    }

    fn act(&self, g: &Perm, v: &IntVec) -> IntVec {
        perm_act(g, v)
    }
}

/// Sign action of `S_n` on `Z`: even permutations fix, odd permutations negate.
#[derive(Clone, Debug)]
pub struct SignAction {
    group: Symmetric,
    sig: AbSignature,
}

impl SignAction {
    pub fn new(n: usize) -> Self {
        SignAction {
            group: Symmetric { n },
            sig: AbSignature::free(1),
        }
    }
}

impl Action for SignAction {
    type G = Symmetric;

    fn group(&self) -> &Symmetric {
        &self.group
    }

    fn signature(&self) -> &AbSignature {
        &self.sig
    }

    fn act(&self, g: &Perm, v: &IntVec) -> IntVec {
        v.scale(g.sign())
    }
}

/// Action of `Z` on `Z` through a character with values in `{±1}`:
/// the trivial character, or the parity character `g -> (-1)^g`.
#[derive(Clone, Debug)]
pub struct ZCharAction {
    group: IntGroup,
    sig: AbSignature,
    /// False: trivial character. True: parity character.
    pub parity: bool,
}

impl ZCharAction {
    pub fn new(parity: bool) -> Self {
        ZCharAction {
            group: IntGroup { modulus: 0 },
            sig: AbSignature::free(1),
            parity,
        }
    }
}

impl Action for ZCharAction {
    type G = IntGroup;

    fn group(&self) -> &IntGroup {
        &self.group
    }

    fn signature(&self) -> &AbSignature {
        &self.sig
    }

    fn act(&self, g: &i64, v: &IntVec) -> IntVec {
        if self.parity && g.rem_euclid(2) == 1 {
            v.neg()
        } else {
            v.clone()
        }
    }
}

/// Action of `Z_q` on `Z_m x Z_q` scaling the first coordinate:
/// `x . (a, y) = (r^x a, y)`. Requires `gcd(r, m) = 1` and `r^q = 1 (mod m)`,
/// so each `r^x` is an automorphism and the exponent only matters mod q.
#[derive(Clone, Debug)]
pub struct ScaledProjAction {
    group: IntGroup,
    sig: AbSignature,
    pub m: u64,
    pub q: u64,
    pub r: i64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn pow_mod(base: i64, mut exp: u64, m: u64) -> i64 {
    let m = m as i64;
    let mut base = base.rem_euclid(m);
    let mut acc = 1i64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

impl ScaledProjAction {
    pub fn new(m: u64, q: u64, r: i64) -> Result<Self, CoreError> {
        if m == 0 || q == 0 {
            return Err(CoreError::Precondition("moduli must be finite".into()));
        }
        let r_red = r.rem_euclid(m as i64) as u64;
        if gcd(r_red, m) != 1 {
            return Err(CoreError::Precondition(format!(
                "scale {} is not a unit mod {}",
                r, m
            )));
        }
        if pow_mod(r, q, m) != 1 % m as i64 {
            return Err(CoreError::Precondition(format!(
                "{}^{} != 1 (mod {}), exponent is not well defined mod {}",
                r, q, m, q
            )));
        }
        Ok(ScaledProjAction {
            group: IntGroup { modulus: q },
            sig: AbSignature(vec![m, q]),
            m,
            q,
            r,
        })
    }
}

impl Action for ScaledProjAction {
    type G = IntGroup;

    fn group(&self) -> &IntGroup {
        &self.group
    }

    fn signature(&self) -> &AbSignature {
        &self.sig
    }

    fn act(&self, g: &i64, v: &IntVec) -> IntVec {
        let scale = pow_mod(self.r, g.rem_euclid(self.q as i64) as u64, self.m);
        v.with_entry(0, v.get(0) * scale)
    }
}

/// The trivial action of any group on a signature.
#[derive(Clone, Debug)]
pub struct TrivialAction<G: Group> {
    group: G,
    sig: AbSignature,
}

impl<G: Group> TrivialAction<G> {
    pub fn new(group: G, sig: AbSignature) -> Self {
        TrivialAction { group, sig }
    }
}

impl<G: Group> Action for TrivialAction<G> {
    type G = G;

    fn group(&self) -> &G {
        &self.group
    }

    fn signature(&self) -> &AbSignature {
        &self.sig
    }

    fn act(&self, _g: &G::Elem, v: &IntVec) -> IntVec {
        v.clone()
    }
}

/// Element `(v, g)` of a semidirect product `V ⋊_Phi G`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct SemidirectElem<E> {
    pub vec: IntVec,
    pub grp: E,
}

/// Semidirect product `V ⋊_Phi G` for the action `Phi` of `G` on `V`:
/// `(u, g)(v, h) = (u + Phi(g)v, gh)`.
#[derive(Clone, Debug)]
pub struct Semidirect<A: Action> {
    pub action: A,
}

impl<A: Action> Semidirect<A> {
    pub fn new(action: A) -> Self {
        Semidirect { action }
    }

    pub fn pair(&self, vec: IntVec, grp: GElem<A>) -> SemidirectElem<GElem<A>> {
        SemidirectElem { vec, grp }
    }
}

impl<A: Action> Group for Semidirect<A> {
    type Elem = SemidirectElem<GElem<A>>;

    fn identity(&self) -> Self::Elem {
        SemidirectElem {
            vec: IntVec::zero(self.action.signature().clone()),
            grp: self.action.group().identity(),
        }
    }

    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        SemidirectElem {
            vec: a.vec.add(&self.action.act(&a.grp, &b.vec)),
            grp: self.action.group().op(&a.grp, &b.grp),
        }
    }

    fn inv(&self, a: &Self::Elem) -> Self::Elem {
        let gi = self.action.group().inv(&a.grp);
        SemidirectElem {
            vec: self.action.act(&gi, &a.vec).neg(),
            grp: gi,
        }
    }

    fn enumerate(&self) -> Option<Vec<Self::Elem>> {
        let gs = self.action.group().enumerate()?;
        let vs = self.action.signature().elements(100_000).ok()?;
        if gs.len().checked_mul(vs.len())? > 1_000_000 {
            return None;
        }
        let mut out = Vec::with_capacity(gs.len() * vs.len());
        for v in &vs {
            for g in &gs {
                out.push(SemidirectElem {
                    vec: v.clone(),
                    grp: g.clone(),
                });
            }
        }
        Some(out)
    }
}

/// Conjugation action of `V ⋊_Phi G` on `V`: `(u, g)` acts as `Phi(g)`,
/// since `(u, g)(b, e)(u, g)^{-1} = (Phi(g)b, e)`.
#[derive(Clone, Debug)]
pub struct AdjointAction<A: Action + Clone> {
    semi: Semidirect<A>,
}

impl<A: Action + Clone> AdjointAction<A> {
    pub fn new(action: A) -> Self {
        AdjointAction {
            semi: Semidirect::new(action),
        }
    }

    pub fn semidirect(&self) -> &Semidirect<A> {
        &self.semi
    }
}

impl<A: Action + Clone> Action for AdjointAction<A> {
    type G = Semidirect<A>;

    fn group(&self) -> &Semidirect<A> {
        &self.semi
    }

    fn signature(&self) -> &AbSignature {
        self.semi.action.signature()
    }

    fn act(&self, g: &SemidirectElem<GElem<A>>, v: &IntVec) -> IntVec {
        self.semi.action.act(&g.grp, v)
    }
}

/// Checks the module-action laws on the given group elements and vectors:
/// `Phi(e) = id`, `Phi(gh) = Phi(g)Phi(h)`, and additivity of each `Phi(g)`.
/// Caps the number of examined combinations at `max_checks` per law, sampling
/// with `seed` past the cap.
pub fn check_module_axioms<A: Action>(
    action: &A,
    gs: &[GElem<A>],
    vs: &[IntVec],
    max_checks: u64,
    seed: u64,
) -> Report {
    let g0 = action.group();
    let id = g0.identity();
    let mut checked = 0u64;

    for v in vs {
        checked += 1;
        if action.act(&id, v) != *v {
            return Report::fail("module_axioms/identity", checked, serde_json::json!({"v": v}));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seed_used = None;

    // Phi(gh) = Phi(g) after Phi(h), on (g, h, v) combinations.
    let total = (gs.len() as u64)
        .saturating_mul(gs.len() as u64)
        .saturating_mul(vs.len() as u64);
    if total <= max_checks {
        for g in gs {
            for h in gs {
                let gh = g0.op(g, h);
                for v in vs {
                    checked += 1;
                    if action.act(&gh, v) != action.act(g, &action.act(h, v)) {
                        return Report::fail(
                            "module_axioms/compose",
                            checked,
                            serde_json::json!({"g": g, "h": h, "v": v}),
                        );
                    }
                }
            }
        }
    } else {
        seed_used = Some(seed);
        for _ in 0..max_checks {
            let g = &gs[rng.gen_range(0..gs.len())];
            let h = &gs[rng.gen_range(0..gs.len())];
            let v = &vs[rng.gen_range(0..vs.len())];
            checked += 1;
            if action.act(&g0.op(g, h), v) != action.act(g, &action.act(h, v)) {
                return Report::fail(
                    "module_axioms/compose",
                    checked,
                    serde_json::json!({"g": g, "h": h, "v": v}),
                )
                .with_seed(seed_used);
            }
        }
    }

    // Additivity of each Phi(g), on (g, u, v) combinations.
    let total = (gs.len() as u64)
        .saturating_mul(vs.len() as u64)
        .saturating_mul(vs.len() as u64);
    if total <= max_checks {
        for g in gs {
            for u in vs {
                let gu = action.act(g, u);
                for v in vs {
                    checked += 1;
                    if action.act(g, &u.add(v)) != gu.add(&action.act(g, v)) {
                        return Report::fail(
                            "module_axioms/additive",
                            checked,
                            serde_json::json!({"g": g, "u": u, "v": v}),
                        )
                        .with_seed(seed_used);
                    }
                }
            }
        }
    } else {
        seed_used = Some(seed);
        for _ in 0..max_checks {
            let g = &gs[rng.gen_range(0..gs.len())];
            let u = &vs[rng.gen_range(0..vs.len())];
            let v = &vs[rng.gen_range(0..vs.len())];
            checked += 1;
            if action.act(g, &u.add(v)) != action.act(g, u).add(&action.act(g, v)) {
                return Report::fail(
                    "module_axioms/additive",
                    checked,
                    serde_json::json!({"g": g, "u": u, "v": v}),
                )
                .with_seed(seed_used);
            }
        }
    }

    Report::pass("module_axioms", checked).with_seed(seed_used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::group::check_group_axioms;

    fn e(sig: &AbSignature, i: usize) -> IntVec {
        IntVec::basis(sig.clone(), i)
    }

    #[test]
    fn perm_action_moves_basis_vectors() {
        let a = PermAction::new(3);
        let w = Perm::parse_cycles("(1 2 3)", 3).unwrap();
        let sig = a.signature().clone();
        assert_eq!(a.act(&w, &e(&sig, 0)), e(&sig, 1));
        assert_eq!(a.act(&w, &e(&sig, 1)), e(&sig, 2));
        let v = IntVec::from_coords(sig.clone(), &[1, 2, 3]);
        assert_eq!(a.act(&w, &v), IntVec::from_coords(sig, &[3, 1, 2]));
    }

    #[test]
    fn semidirect_product_example() {
        let a = PermAction::new(3);
        let sig = a.signature().clone();
        let semi = Semidirect::new(a);
        let t = Perm::parse_cycles("(1 2)", 3).unwrap();
        let x = semi.pair(e(&sig, 0), t.clone());
        let y = semi.pair(e(&sig, 0), Perm::identity(3));
        let xy = semi.op(&x, &y);
        // (e1, (1 2)) (e1, id) = (e1 + e2, (1 2))
        assert_eq!(xy.vec, e(&sig, 0).add(&e(&sig, 1)));
        assert_eq!(xy.grp, t);
    }

    #[test]
    fn semidirect_inverse_formula() {
        let a = PermAction::new(3);
        let sig = a.signature().clone();
        let semi = Semidirect::new(a);
        let x = semi.pair(
            IntVec::from_coords(sig, &[2, -1, 0]),
            Perm::parse_cycles("(1 3 2)", 3).unwrap(),
        );
        let xi = semi.inv(&x);
        assert_eq!(semi.op(&x, &xi), semi.identity());
        assert_eq!(semi.op(&xi, &x), semi.identity());
    }

    #[test]
    fn semidirect_group_axioms_sampled() {
        let a = PermAction::new(3);
        let sig = a.signature().clone();
        let semi = Semidirect::new(a);
        let mut elems = Vec::new();
        for w in crate::groups::perm::all_perms(3) {
            for c0 in -1..=1 {
                for c1 in -1..=1 {
                    elems.push(semi.pair(IntVec::from_coords(sig.clone(), &[c0, c1, 0]), w.clone()));
                }
            }
        }
        let rep = check_group_axioms(&semi, &elems, 5_000, 42);
        assert!(rep.holds, "{:?}", rep);
    }

    #[test]
    fn scaled_projection_action_is_a_module() {
        let a = ScaledProjAction::new(3, 2, 2).unwrap();
        let gs: Vec<i64> = vec![0, 1];
        let vs = a.signature().elements(100).unwrap();
        let rep = check_module_axioms(&a, &gs, &vs, 100_000, 42);
        assert!(rep.holds, "{:?}", rep);
        // x = 1 scales the first coordinate by 2 = -1 mod 3.
        let v = IntVec::from_coords(a.signature().clone(), &[1, 1]);
        assert_eq!(a.act(&1, &v).get(0), 2);
        assert_eq!(a.act(&1, &v).get(1), 1);
    }

    #[test]
    fn scaled_projection_rejects_bad_parameters() {
        assert!(ScaledProjAction::new(4, 2, 2).is_err()); // gcd(2,4) != 1
        assert!(ScaledProjAction::new(5, 2, 2).is_err()); // 2^2 = 4 != 1 mod 5
        assert!(ScaledProjAction::new(3, 2, 2).is_ok());
    }

    #[test]
    fn sign_and_character_actions() {
        let s = SignAction::new(3);
        let sig = s.signature().clone();
        let v = IntVec::from_coords(sig.clone(), &[5]);
        assert_eq!(s.act(&Perm::parse_cycles("(1 2)", 3).unwrap(), &v), v.neg());
        assert_eq!(s.act(&Perm::parse_cycles("(1 2 3)", 3).unwrap(), &v), v);

        let chi2 = ZCharAction::new(true);
        assert_eq!(chi2.act(&3, &v), v.neg());
        assert_eq!(chi2.act(&-2, &v), v);
        let chi1 = ZCharAction::new(false);
        assert_eq!(chi1.act(&3, &v), v);
    }

    #[test]
    fn adjoint_action_is_conjugation() {
        let a = PermAction::new(3);
        let sig = a.signature().clone();
        let adj = AdjointAction::new(a.clone());
        let semi = adj.semidirect().clone();
        let g = semi.pair(
            IntVec::from_coords(sig.clone(), &[1, -2, 0]),
            Perm::parse_cycles("(1 3)", 3).unwrap(),
        );
        let b = IntVec::from_coords(sig.clone(), &[0, 1, 1]);
        // Conjugation computed in the semidirect product directly.
        let bg = semi.pair(b.clone(), Perm::identity(3));
        let conj = semi.op(&semi.op(&g, &bg), &semi.inv(&g));
        assert_eq!(conj.grp, Perm::identity(3));
        assert_eq!(adj.act(&g, &b), conj.vec);
    }

    #[test]
    fn module_axioms_hold_for_perm_action() {
        let a = PermAction::new(3);
        let sig = a.signature().clone();
        let gs = crate::groups::perm::all_perms(3);
        let mut vs = Vec::new();
        for c0 in -2..=2 {
            for c1 in -2..=2 {
                vs.push(IntVec::from_coords(sig.clone(), &[c0, c1, 1]));
            }
        }
        assert!(check_module_axioms(&a, &gs, &vs, 200_000, 42).holds);
    }
}
