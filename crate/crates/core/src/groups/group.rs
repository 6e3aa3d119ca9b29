//! Abstract groups, generated closures, and order fingerprints.

use crate::groups::intvec::{AbSignature, IntVec};
use crate::groups::perm::{all_perms, Perm};
use crate::report::Report;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

/// A group presented by its operations. Elements are plain values; the group
/// object carries whatever context the operations need.
pub trait Group: Send + Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync + Serialize;

    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    /// All elements when the group is finite and small enough to list.
    fn enumerate(&self) -> Option<Vec<Self::Elem>> {
        None
    }
}

/// The symmetric group on `{1, ..., n}`.
#[derive(Clone, Debug)]
pub struct Symmetric {
    pub n: usize,
}

impl Group for Symmetric {
    type Elem = Perm;

    fn identity(&self) -> Perm {
        Perm::identity(self.n)
    }

    fn op(&self, a: &Perm, b: &Perm) -> Perm {
        a.compose(b)
    }

    fn inv(&self, a: &Perm) -> Perm {
        a.inv()
    }

    fn enumerate(&self) -> Option<Vec<Perm>> {
        if self.n <= 8 {
            Some(all_perms(self.n))
        } else {
            None
        }
    }
}

/// `Z` (modulus 0) or `Z_m`, written additively; elements are canonical
/// representatives in `[0, m)` when finite.
#[derive(Clone, Debug)]
pub struct IntGroup {
    pub modulus: u64,
}

impl IntGroup {
    pub fn reduce(&self, a: i64) -> i64 {
        if self.modulus == 0 {
            a
        } else {
            a.rem_euclid(self.modulus as i64)
        }
    }
}

impl Group for IntGroup {
    type Elem = i64;

    fn identity(&self) -> i64 {
        0
    }

    fn op(&self, a: &i64, b: &i64) -> i64 {
        self.reduce(a + b)
    }

    fn inv(&self, a: &i64) -> i64 {
        self.reduce(-a)
    }

    fn enumerate(&self) -> Option<Vec<i64>> {
        if self.modulus > 0 && self.modulus <= 1_000_000 {
            Some((0..self.modulus as i64).collect())
        } else {
            None
        }
    }
}

/// The additive group of a signature, with [`IntVec`] elements.
#[derive(Clone, Debug)]
pub struct AddGroup {
    pub sig: AbSignature,
}

impl Group for AddGroup {
    type Elem = IntVec;

    fn identity(&self) -> IntVec {
        IntVec::zero(self.sig.clone())
    }

    fn op(&self, a: &IntVec, b: &IntVec) -> IntVec {
        a.add(b)
    }

    fn inv(&self, a: &IntVec) -> IntVec {
        a.neg()
    }

    fn enumerate(&self) -> Option<Vec<IntVec>> {
        self.sig.elements(1_000_000).ok()
    }
}

/// Result of closing a generating set under multiplication.
#[derive(Clone, Debug)]
pub struct Closure<E> {
    /// Discovery (breadth-first) order; the identity is first.
    pub elements: Vec<E>,
    /// Element counts after each word-length level.
    pub levels: Vec<usize>,
    /// True when some level added nothing, i.e. the closure is complete.
    pub stabilized: bool,
}

/// Products of at most `bound` generators and inverses, deduplicated.
pub fn closure<G: Group>(g: &G, gens: &[G::Elem], bound: usize) -> Closure<G::Elem> {
    let mut step = Vec::new();
    for x in gens {
        if !step.contains(x) {
            step.push(x.clone());
        }
        let ix = g.inv(x);
        if !step.contains(&ix) {
            step.push(ix);
        }
    }

    let mut elements = vec![g.identity()];
    let mut seen: HashSet<G::Elem> = elements.iter().cloned().collect();
    let mut frontier = elements.clone();
    let mut levels = vec![1];
    let mut stabilized = false;

    for _ in 0..bound {
        let mut next = Vec::new();
        for a in &frontier {
            for s in &step {
                let b = g.op(a, s);
                if seen.insert(b.clone()) {
                    next.push(b);
                }
            }
        }
        if next.is_empty() {
            stabilized = true;
            break;
        }
        elements.extend(next.iter().cloned());
        levels.push(elements.len());
        frontier = next;
    }

    Closure {
        elements,
        levels,
        stabilized,
    }
}

/// Multiplicative order of `e`, or None if it exceeds `cap`.
pub fn element_order<G: Group>(g: &G, e: &G::Elem, cap: usize) -> Option<usize> {
    let id = g.identity();
    let mut acc = e.clone();
    for k in 1..=cap {
        if acc == id {
            return Some(k);
        }
        acc = g.op(&acc, e);
    }
    None
}

/// Order, commutativity, and the multiset of element orders. Distinguishes
/// all pairs of non-isomorphic groups of order at most 8.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupFingerprint {
    pub order: usize,
    pub abelian: bool,
    pub order_multiset: BTreeMap<usize, usize>,
}

pub fn fingerprint<G: Group>(g: &G, elements: &[G::Elem]) -> GroupFingerprint {
    let mut order_multiset = BTreeMap::new();
    for e in elements {
        let ord = element_order(g, e, elements.len().max(1)).unwrap_or(0);
        *order_multiset.entry(ord).or_insert(0) += 1;
    }
    let abelian = elements.iter().enumerate().all(|(i, a)| {
        elements[i + 1..]
            .iter()
            .all(|b| g.op(a, b) == g.op(b, a))
    });
    GroupFingerprint {
        order: elements.len(),
        abelian,
        order_multiset,
    }
}

/// Checks identity and inverse laws on every listed element, and
/// associativity on all triples when there are at most `max_triples`,
/// otherwise on `max_triples` seeded random triples.
pub fn check_group_axioms<G: Group>(
    g: &G,
    elements: &[G::Elem],
    max_triples: u64,
    seed: u64,
) -> Report {
    let id = g.identity();
    let mut checked = 0u64;
    for a in elements {
        checked += 1;
        if g.op(&id, a) != *a || g.op(a, &id) != *a {
            return Report::fail(
                "group_axioms/identity",
                checked,
                serde_json::json!({ "a": a }),
            );
        }
        let ai = g.inv(a);
        if g.op(a, &ai) != id || g.op(&ai, a) != id {
            return Report::fail(
                "group_axioms/inverse",
                checked,
                serde_json::json!({ "a": a }),
            );
        }
    }

    let n = elements.len() as u64;
    let total = n.saturating_mul(n).saturating_mul(n);
    let assoc = |a: &G::Elem, b: &G::Elem, c: &G::Elem| -> bool {
        g.op(&g.op(a, b), c) == g.op(a, &g.op(b, c))
    };
    let mut seed_used = None;
    if total <= max_triples {
        for a in elements {
            for b in elements {
                for c in elements {
                    checked += 1;
                    if !assoc(a, b, c) {
                        return Report::fail(
                            "group_axioms/assoc",
                            checked,
                            serde_json::json!({ "a": a, "b": b, "c": c }),
                        );
                    }
                }
            }
        }
    } else {
        seed_used = Some(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..max_triples {
            let a = &elements[rng.gen_range(0..elements.len())];
            let b = &elements[rng.gen_range(0..elements.len())];
            let c = &elements[rng.gen_range(0..elements.len())];
            checked += 1;
            if !assoc(a, b, c) {
                return Report::fail(
                    "group_axioms/assoc",
                    checked,
                    serde_json::json!({ "a": a, "b": b, "c": c }),
                )
                .with_seed(seed_used);
            }
        }
    }
    Report::pass("group_axioms", checked).with_seed(seed_used)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_transposition() {
        let s3 = Symmetric { n: 3 };
        let t = Perm::parse_cycles("(1 2)", 3).unwrap();
        let c = closure(&s3, &[t], 6);
        assert_eq!(c.elements.len(), 2);
        assert!(c.stabilized);
    }

    #[test]
    fn closure_generates_s3() {
        let s3 = Symmetric { n: 3 };
        let gens = vec![
            Perm::parse_cycles("(1 2)", 3).unwrap(),
            Perm::parse_cycles("(1 2 3)", 3).unwrap(),
        ];
        let c = closure(&s3, &gens, 8);
        assert_eq!(c.elements.len(), 6);
        assert!(c.stabilized);
        let fp = fingerprint(&s3, &c.elements);
        assert!(!fp.abelian);
        assert_eq!(
            fp.order_multiset,
            BTreeMap::from([(1, 1), (2, 3), (3, 2)])
        );
    }

    #[test]
    fn fingerprint_separates_z6_from_s3() {
        let z6 = IntGroup { modulus: 6 };
        let fp6 = fingerprint(&z6, &z6.enumerate().unwrap());
        assert!(fp6.abelian);
        assert_eq!(
            fp6.order_multiset,
            BTreeMap::from([(1, 1), (2, 1), (3, 2), (6, 2)])
        );
        let s3 = Symmetric { n: 3 };
        let fp3 = fingerprint(&s3, &s3.enumerate().unwrap());
        assert_ne!(fp6, fp3);
    }

    #[test]
    fn axioms_hold_for_small_groups() {
        let s3 = Symmetric { n: 3 };
        assert!(check_group_axioms(&s3, &s3.enumerate().unwrap(), 10_000, 42).holds);
        let z = IntGroup { modulus: 0 };
        let window: Vec<i64> = (-20..=20).collect();
        assert!(check_group_axioms(&z, &window, 1_000, 42).holds);
        let add = AddGroup {
            sig: AbSignature(vec![3, 2]),
        };
        assert!(check_group_axioms(&add, &add.enumerate().unwrap(), 10_000, 42).holds);
    }

    #[test]
    fn int_group_reduces_canonically() {
        let z5 = IntGroup { modulus: 5 };
        assert_eq!(z5.op(&3, &4), 2);
        assert_eq!(z5.inv(&2), 3);
        assert_eq!(z5.enumerate().unwrap().len(), 5);
        let z = IntGroup { modulus: 0 };
        assert_eq!(z.op(&3, &-7), -4);
        assert!(z.enumerate().is_none());
    }

    #[test]
    fn element_order_caps() {
        let z = IntGroup { modulus: 0 };
        assert_eq!(element_order(&z, &0, 10), Some(1));
        assert_eq!(element_order(&z, &1, 10), None);
    }
}
