//! Operators into `Sym(n)` acting on `Z^n` by permuting coordinates:
//! the compatibility conditions a generating tuple must satisfy, the
//! recursive extension of a tuple to the whole module, exhaustive
//! enumeration of valid tuples, and the sign-representation operators
//! `Z -> Sym(n)`.

use crate::domain::ball_elements;
use crate::error::CoreError;
use crate::groups::action::{perm_act, Action, PermAction, SignAction};
use crate::groups::intvec::{AbSignature, IntVec};
use crate::groups::perm::{all_perms, Perm};
use crate::rbops::RelRbOp;
use crate::report::Report;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::HashMap;
use std::sync::RwLock;

/// A generating tuple: `sigma[i]` is the prescribed value at `+e_i`,
/// `sigma_bar[i]` the value at `-e_i`. Single tuples have `sigma_bar ==
/// sigma`. Indices are 0-based internally; the letter moved by `e_i` is
/// `i + 1` in cycle notation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaTuple {
    pub n: usize,
    pub sigma: Vec<Perm>,
    pub sigma_bar: Vec<Perm>,
}

impl SigmaTuple {
    pub fn single(sigma: Vec<Perm>) -> Result<Self, CoreError> {
        let n = sigma.len();
        if sigma.iter().any(|p| p.degree() != n) {
            return Err(CoreError::InvalidPerm(
                "tuple entries must have degree equal to the tuple length".into(),
            ));
        }
        Ok(SigmaTuple {
            n,
            sigma_bar: sigma.clone(),
            sigma,
        })
    }

    pub fn pair(sigma: Vec<Perm>, sigma_bar: Vec<Perm>) -> Result<Self, CoreError> {
        let n = sigma.len();
        if sigma_bar.len() != n {
            return Err(CoreError::InvalidPerm(
                "the two tuples must have equal length".into(),
            ));
        }
        if sigma.iter().chain(&sigma_bar).any(|p| p.degree() != n) {
            return Err(CoreError::InvalidPerm(
                "tuple entries must have degree equal to the tuple length".into(),
            ));
        }
        Ok(SigmaTuple { n, sigma, sigma_bar })
    }

    pub fn is_single(&self) -> bool {
        self.sigma == self.sigma_bar
    }
}

#[derive(Serialize, Deserialize)]
struct SigmaTupleJson {
    n: usize,
    sigma: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_bar: Option<Vec<Vec<usize>>>,
}

impl Serialize for SigmaTuple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SigmaTupleJson {
            n: self.n,
            sigma: self.sigma.iter().map(|p| p.one_indexed_images()).collect(),
            sigma_bar: if self.is_single() {
                None
            } else {
                Some(
                    self.sigma_bar
                        .iter()
                        .map(|p| p.one_indexed_images())
                        .collect(),
                )
            },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SigmaTuple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = SigmaTupleJson::deserialize(d)?;
        let parse = |imgs: &[Vec<usize>]| -> Result<Vec<Perm>, D::Error> {
            imgs.iter()
                .map(|v| Perm::from_one_indexed(v).map_err(serde::de::Error::custom))
                .collect()
        };
        let sigma = parse(&raw.sigma)?;
        let t = match raw.sigma_bar {
            Some(ref bar) => SigmaTuple::pair(sigma, parse(bar)?),
            None => SigmaTuple::single(sigma),
        }
        .map_err(serde::de::Error::custom)?;
        if t.n != raw.n {
            return Err(serde::de::Error::custom("tuple length differs from n"));
        }
        Ok(t)
    }
}

/// The single-tuple conditions: `s_i s_{s_i^{-1}(i)} = 1` for all `i`, and
/// `s_j s_{s_j^{-1}(k)} = s_k s_{s_k^{-1}(j)}` for all `j < k`.
pub fn check_single_conditions(sigma: &[Perm]) -> bool {
    let n = sigma.len();
    for i in 0..n {
        let p = sigma[i].inv().apply(i);
        if !sigma[i].compose(&sigma[p]).is_identity() {
            return false;
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let a = sigma[j].inv().apply(k);
            let b = sigma[k].inv().apply(j);
            if sigma[j].compose(&sigma[a]) != sigma[k].compose(&sigma[b]) {
                return false;
            }
        }
    }
    true
}

/// The four condition families for a pair of tuples: unit pairing
/// `s_i sb_{s_i^{-1}(i)} = sb_i s_{sb_i^{-1}(i)} = 1`, compatibility inside
/// each tuple for `j < k`, and the mixed family
/// `s_j sb_{s_j^{-1}(k)} = sb_k s_{sb_k^{-1}(j)}` for all `j, k`.
pub fn check_pair_conditions(sigma: &[Perm], sigma_bar: &[Perm]) -> bool {
    let n = sigma.len();
    if sigma_bar.len() != n {
        return false;
    }
    for i in 0..n {
        let p = sigma[i].inv().apply(i);
        let q = sigma_bar[i].inv().apply(i);
        if !sigma[i].compose(&sigma_bar[p]).is_identity()
            || !sigma_bar[i].compose(&sigma[q]).is_identity()
        {
            return false;
        }
    }
    let compat = |s: &[Perm]| {
        for j in 0..n {
            for k in (j + 1)..n {
                let a = s[j].inv().apply(k);
                let b = s[k].inv().apply(j);
                if s[j].compose(&s[a]) != s[k].compose(&s[b]) {
                    return false;
                }
            }
        }
        true
    };
    if !compat(sigma) || !compat(sigma_bar) {
        return false;
    }
    for j in 0..n {
        for k in 0..n {
            let a = sigma[j].inv().apply(k);
            let b = sigma_bar[k].inv().apply(j);
            if sigma[j].compose(&sigma_bar[a]) != sigma_bar[k].compose(&sigma[b]) {
                return false;
            }
        }
    }
    true
}

impl SigmaTuple {
    pub fn satisfies_conditions(&self) -> bool {
        if self.is_single() {
            check_single_conditions(&self.sigma)
        } else {
            check_pair_conditions(&self.sigma, &self.sigma_bar)
        }
    }
}

/// FNV-1a. Hash-flooding resistance buys nothing for internal keys, and the
/// default hasher's per-lookup cost dominates the hot verification scans.
#[derive(Clone, Copy, Default)]
struct FnvBuild;

struct FnvHasher(u64);

impl std::hash::BuildHasher for FnvBuild {
    type Hasher = FnvHasher;
    fn build_hasher(&self) -> FnvHasher {
        FnvHasher(0xcbf2_9ce4_8422_2325)
    }
}

impl std::hash::Hasher for FnvHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}

const MEMO_SHARDS: usize = 32;

/// Hash-sharded concurrent map. Parallel scans over a saturated memo are
/// read-only; spreading them over independent locks keeps the shards'
/// cache lines from serializing the threads.
struct ShardedMemo {
    shards: Vec<RwLock<HashMap<IntVec, Perm, FnvBuild>>>,
}

impl ShardedMemo {
    fn new() -> Self {
        ShardedMemo {
            shards: (0..MEMO_SHARDS)
                .map(|_| RwLock::new(HashMap::default()))
                .collect(),
        }
    }

    fn shard(&self, v: &IntVec) -> &RwLock<HashMap<IntVec, Perm, FnvBuild>> {
        use std::hash::{BuildHasher, Hash, Hasher};
        let mut h = FnvBuild.build_hasher();
        v.hash(&mut h);
        // Shard on the high bits; the maps bucket on the low bits of the
        // same function.
        &self.shards[(h.finish() >> 58) as usize % MEMO_SHARDS]
    }

    fn get(&self, v: &IntVec) -> Option<Perm> {
        self.shard(v).read().unwrap().get(v).cloned()
    }

    fn insert(&self, v: IntVec, p: Perm) {
        self.shard(&v).write().unwrap().insert(v, p);
    }
}

/// The operator determined by a valid tuple, extended from the basis by the
/// reduction `R(v' + e_i) = s_i R(s_i^{-1} v')`, `R(v' - e_i) =
/// sb_i R(sb_i^{-1} v')`, reducing at the smallest nonzero coordinate.
/// Values are memoized; the memo is safe to share across threads.
pub struct RecursiveRbOp {
    tuple: SigmaTuple,
    action: PermAction,
    sigma_inv: Vec<Perm>,
    sigma_bar_inv: Vec<Perm>,
    memo: ShardedMemo,
}

impl RecursiveRbOp {
    pub fn new(tuple: SigmaTuple) -> Result<Self, CoreError> {
        if !tuple.satisfies_conditions() {
            return Err(CoreError::Precondition(
                "tuple does not satisfy the compatibility conditions".into(),
            ));
        }
        Ok(Self::new_unchecked(tuple))
    }

    /// Skips the compatibility check (used to exhibit how invalid tuples
    /// fail downstream verification).
    pub fn new_unchecked(tuple: SigmaTuple) -> Self {
        let action = PermAction::new(tuple.n);
        let memo = ShardedMemo::new();
        let sig = action.signature().clone();
        memo.insert(IntVec::zero(sig.clone()), Perm::identity(tuple.n));
        for i in 0..tuple.n {
            memo.insert(IntVec::basis(sig.clone(), i), tuple.sigma[i].clone());
            memo.insert(IntVec::basis(sig.clone(), i).neg(), tuple.sigma_bar[i].clone());
        }
        let sigma_inv = tuple.sigma.iter().map(Perm::inv).collect();
        let sigma_bar_inv = tuple.sigma_bar.iter().map(Perm::inv).collect();
        RecursiveRbOp {
            tuple,
            action,
            sigma_inv,
            sigma_bar_inv,
            memo,
        }
    }

    pub fn tuple(&self) -> &SigmaTuple {
        &self.tuple
    }

    pub fn n(&self) -> usize {
        self.tuple.n
    }

    fn eval_rec(&self, v: &IntVec) -> Perm {
        if let Some(p) = self.memo.get(v) {
            return p;
        }
        let (i, c) = v
            .first_nonzero()
            .expect("zero vector is seeded in the memo");
        let (s, s_inv) = if c > 0 {
            (&self.tuple.sigma[i], &self.sigma_inv[i])
        } else {
            (&self.tuple.sigma_bar[i], &self.sigma_bar_inv[i])
        };
        // v = v' ± e_i with |v'| = |v| - 1.
        let vp = v.with_entry(i, if c > 0 { c - 1 } else { c + 1 });
        let inner = self.eval_rec(&perm_act(s_inv, &vp));
        let result = s.compose(&inner);
        self.memo.insert(v.clone(), result.clone());
        result
    }

    /// Value computed by reducing first at coordinate `i` (which must be
    /// nonzero in `v`), then by the standard order. Used by the
    /// well-definedness certification.
    fn eval_reducing_at(&self, v: &IntVec, i: usize) -> Perm {
        let c = v.get(i);
        assert!(c != 0, "reduction coordinate must be nonzero");
        let (s, s_inv) = if c > 0 {
            (&self.tuple.sigma[i], &self.sigma_inv[i])
        } else {
            (&self.tuple.sigma_bar[i], &self.sigma_bar_inv[i])
        };
        let vp = v.with_entry(i, if c > 0 { c - 1 } else { c + 1 });
        s.compose(&self.eval_rec(&perm_act(s_inv, &vp)))
    }
}

impl RelRbOp for RecursiveRbOp {
    type A = PermAction;

    fn action(&self) -> &PermAction {
        &self.action
    }

    fn try_eval(&self, v: &IntVec) -> Option<Perm> {
        Some(self.eval_rec(v))
    }
}

/// Certifies the recursion is independent of the reduction order on the ball
/// `|v| <= max_norm`: at every vector, reducing first at any nonzero
/// coordinate gives the same value. Single-step agreement everywhere in the
/// ball extends to arbitrary reduction sequences by induction on `|v|`, since
/// deeper steps happen at smaller norm where agreement is already certified.
pub fn well_defined_check(op: &RecursiveRbOp, max_norm: u64) -> Report {
    let sig = op.action().signature().clone();
    let ball = match ball_elements(&sig, max_norm) {
        Ok(b) => b,
        Err(e) => {
            return Report::fail("well_defined", 0, json!({"error": e.to_string()}));
        }
    };
    let hit = ball.par_iter().find_map_first(|v| {
        let support: Vec<(usize, i64)> = v.support().collect();
        if support.len() < 2 {
            return None;
        }
        let vals: Vec<Perm> = support
            .iter()
            .map(|&(i, _)| op.eval_reducing_at(v, i))
            .collect();
        if vals.windows(2).all(|w| w[0] == w[1]) {
            None
        } else {
            Some(json!({
                "v": v,
                "values": vals.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            }))
        }
    });
    match hit {
        Some(cx) => Report::fail("well_defined", ball.len() as u64, cx),
        None => Report::pass("well_defined", ball.len() as u64),
    }
}

/// Index-arithmetic tables for one symmetric group, used by the enumerators:
/// perm indices are positions in the lexicographic listing of image arrays.
struct PermTables {
    n: usize,
    perms: Vec<Perm>,
    mul: Vec<u16>,     // mul[p * len + q] = index of perms[p] o perms[q]
    inv: Vec<u16>,
    apply: Vec<u8>,    // apply[p * n + x] = image of x under perms[p]
    id: u16,
}

impl PermTables {
    fn new(n: usize) -> Self {
        let perms = all_perms(n);
        let len = perms.len();
        let index: HashMap<&Perm, u16> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i as u16))
            .collect();
        let mut mul = vec![0u16; len * len];
        let mut inv = vec![0u16; len];
        let mut apply = vec![0u8; len * n];
        for (p, pp) in perms.iter().enumerate() {
            inv[p] = index[&pp.inv()];
            for x in 0..n {
                apply[p * n + x] = pp.apply(x) as u8;
            }
            for (q, qq) in perms.iter().enumerate() {
                mul[p * len + q] = index[&pp.compose(qq)];
            }
        }
        let id = index[&Perm::identity(n)];
        PermTables {
            n,
            perms,
            mul,
            inv,
            apply,
            id,
        }
    }

    #[inline]
    fn mul(&self, p: u16, q: u16) -> u16 {
        self.mul[p as usize * self.perms.len() + q as usize]
    }

    #[inline]
    fn apply_inv(&self, p: u16, x: usize) -> usize {
        self.apply[self.inv[p as usize] as usize * self.n + x] as usize
    }
}

/// Checks, over the prefix `s[0..=m]`, every condition of the single system
/// whose subscripts are all determined and whose largest subscript is `m`
/// (so each condition is checked exactly once as the prefix grows).
fn single_prefix_ok(t: &PermTables, s: &[u16], m: usize) -> bool {
    for i in 0..=m {
        let p = t.apply_inv(s[i], i);
        if p.max(i) == m && t.mul(s[i], s[p]) != t.id {
            return false;
        }
    }
    for j in 0..=m {
        for k in (j + 1)..=m {
            let a = t.apply_inv(s[j], k);
            let b = t.apply_inv(s[k], j);
            if a.max(b).max(k) == m && t.mul(s[j], s[a]) != t.mul(s[k], s[b]) {
                return false;
            }
        }
    }
    true
}

/// Same, for the compatibility family alone (no unit conditions) — the part
/// of the pair system internal to one tuple.
fn compat_prefix_ok(t: &PermTables, s: &[u16], m: usize) -> bool {
    for j in 0..=m {
        for k in (j + 1)..=m {
            let a = t.apply_inv(s[j], k);
            let b = t.apply_inv(s[k], j);
            if a.max(b).max(k) == m && t.mul(s[j], s[a]) != t.mul(s[k], s[b]) {
                return false;
            }
        }
    }
    true
}

fn backtrack<F: FnMut(&[u16])>(
    t: &PermTables,
    prefix_ok: &dyn Fn(&PermTables, &[u16], usize) -> bool,
    s: &mut Vec<u16>,
    emit: &mut F,
) {
    let m = s.len();
    if m == t.n {
        emit(s);
        return;
    }
    for cand in 0..t.perms.len() as u16 {
        s.push(cand);
        if prefix_ok(t, s, m) {
            backtrack(t, prefix_ok, s, emit);
        }
        s.pop();
    }
}

fn decode(t: &PermTables, s: &[u16]) -> Vec<Perm> {
    s.iter().map(|&i| t.perms[i as usize].clone()).collect()
}

/// All single tuples over `Sym(n)^n` satisfying the conditions, in
/// lexicographic order of concatenated image arrays. Backtracking with
/// prefix pruning; n is capped at 5.
pub fn enumerate_single(n: usize) -> Result<Vec<SigmaTuple>, CoreError> {
    if n == 0 || n > 5 {
        return Err(CoreError::DegreeTooLarge(n, 5));
    }
    let t = PermTables::new(n);
    let mut out = Vec::new();
    let mut s = Vec::with_capacity(n);
    backtrack(&t, &single_prefix_ok, &mut s, &mut |s: &[u16]| {
        out.push(SigmaTuple::single(decode(&t, s)).unwrap());
    });
    Ok(out)
}

/// All ordered pairs of distinct tuples satisfying the pair conditions, in
/// lexicographic order. The scan enumerates `sigma` under its internal
/// compatibility family; the unit conditions then pin `sigma_bar` at the
/// positions `{sigma_i^{-1}(i)}` to `sigma_i^{-1}`, remaining positions are
/// brute-forced, and the full system is re-checked.
pub fn enumerate_pairs(n: usize) -> Result<Vec<SigmaTuple>, CoreError> {
    if n == 0 || n > 4 {
        return Err(CoreError::DegreeTooLarge(n, 4));
    }
    let t = PermTables::new(n);
    let mut out = Vec::new();
    let mut s = Vec::with_capacity(n);
    backtrack(&t, &compat_prefix_ok, &mut s, &mut |s: &[u16]| {
        // Pin sigma_bar values forced by the first unit family.
        let mut sbar: Vec<Option<u16>> = vec![None; n];
        for i in 0..n {
            let pos = t.apply_inv(s[i], i);
            let val = t.inv[s[i] as usize];
            match sbar[pos] {
                Some(existing) if existing != val => return,
                _ => sbar[pos] = Some(val),
            }
        }
        let holes: Vec<usize> = (0..n).filter(|&i| sbar[i].is_none()).collect();
        let mut fill = |assignment: &[u16]| {
            let mut bar: Vec<u16> = Vec::with_capacity(n);
            let mut h = 0;
            for i in 0..n {
                match sbar[i] {
                    Some(v) => bar.push(v),
                    None => {
                        bar.push(assignment[h]);
                        h += 1;
                    }
                }
            }
            if bar == s {
                return;
            }
            let sigma = decode(&t, s);
            let sigma_bar = decode(&t, &bar);
            if check_pair_conditions(&sigma, &sigma_bar) {
                out.push(SigmaTuple::pair(sigma, sigma_bar).unwrap());
            }
        };
        let mut assignment = vec![0u16; holes.len()];
        fn rec(
            idx: usize,
            len: usize,
            count: u16,
            assignment: &mut Vec<u16>,
            fill: &mut dyn FnMut(&[u16]),
        ) {
            if idx == len {
                fill(assignment);
                return;
            }
            for c in 0..count {
                assignment[idx] = c;
                rec(idx + 1, len, count, assignment, fill);
            }
        }
        rec(
            0,
            holes.len(),
            t.perms.len() as u16,
            &mut assignment,
            &mut fill,
        );
    });
    out.sort_by_key(|p| {
        let key = |ps: &[Perm]| -> Vec<usize> {
            ps.iter().flat_map(|q| q.one_indexed_images()).collect()
        };
        (key(&p.sigma), key(&p.sigma_bar))
    });
    Ok(out)
}

/// The number of unordered pairs behind an ordered-pair listing (the
/// condition system is symmetric under swapping the tuples).
pub fn unordered_pair_count(pairs: &[SigmaTuple]) -> usize {
    pairs.len() / 2
}

/// Operator `Z -> Sym(n)` for the sign action. Two shapes exist:
/// alternating products of two odd involutions, and powers of a single even
/// permutation.
pub struct SignRepOp {
    action: SignAction,
    r1: Perm,
    rm1: Perm,
    kind: SignRepKind,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SignRepKind {
    /// `R(1)`, `R(-1)` odd involutions; `R(k)` alternates between them.
    Alternating,
    /// `R(1)` even; `R(k) = R(1)^k`, a homomorphism through the even
    /// permutations.
    Power,
}

/// Builds the sign-representation operator. `r1` odd selects the
/// alternating case and requires both `r1` and `rm1` to be odd involutions;
/// `r1` even selects the power case and ignores `rm1`.
pub fn sign_rep_operator(n: usize, r1: Perm, rm1: Perm) -> Result<SignRepOp, CoreError> {
    if r1.degree() != n || rm1.degree() != n {
        return Err(CoreError::InvalidPerm("degree mismatch".into()));
    }
    let kind = if r1.is_odd() {
        if !r1.is_involution() || !rm1.is_involution() {
            return Err(CoreError::Precondition(
                "odd case requires both values at ±1 to be involutions".into(),
            ));
        }
        if !rm1.is_odd() {
            return Err(CoreError::Precondition(
                "odd case requires the value at -1 to be odd as well".into(),
            ));
        }
        SignRepKind::Alternating
    } else {
        SignRepKind::Power
    };
    let rm1 = match kind {
        SignRepKind::Alternating => rm1,
        SignRepKind::Power => r1.inv(),
    };
    Ok(SignRepOp {
        action: SignAction::new(n),
        r1,
        rm1,
        kind,
    })
}

impl SignRepOp {
    pub fn kind(&self) -> SignRepKind {
        self.kind
    }

    pub fn at(&self, k: i64) -> Perm {
        let n = self.r1.degree();
        match self.kind {
            SignRepKind::Alternating => {
                // |k| alternating factors, starting with the value at sign(k).
                let (first, second) = if k >= 0 {
                    (&self.r1, &self.rm1)
                } else {
                    (&self.rm1, &self.r1)
                };
                let mut acc = Perm::identity(n);
                for step in 0..k.unsigned_abs() {
                    acc = acc.compose(if step % 2 == 0 { first } else { second });
                }
                acc
            }
            SignRepKind::Power => {
                let base = if k >= 0 { self.r1.clone() } else { self.r1.inv() };
                let mut acc = Perm::identity(n);
                for _ in 0..k.unsigned_abs() {
                    acc = acc.compose(&base);
                }
                acc
            }
        }
    }
}

impl RelRbOp for SignRepOp {
    type A = SignAction;

    fn action(&self) -> &SignAction {
        &self.action
    }

    fn try_eval(&self, v: &IntVec) -> Option<Perm> {
        Some(self.at(v.get(0)))
    }
}

/// Signature of the sign-representation module: a single free coordinate.
pub fn sign_rep_signature() -> AbSignature {
    AbSignature::free(1)
}
