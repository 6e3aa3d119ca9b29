//! Verification domains: which vectors a law is checked on.
//!
//! Free coordinates make most modules infinite, so exhaustive verification is
//! impossible in general. The default policy checks every vector in a
//! coordinate box plus a band of random vectors outside it, which in practice
//! pins down the recursively defined operators completely (their values on the
//! box determine them).

use crate::error::CoreError;
use crate::groups::intvec::{AbSignature, IntVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How to pick the vectors a verification pass runs over.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum DomainPolicy {
    /// Every element. Only valid for finite signatures.
    Exhaustive,
    /// All vectors with every free coordinate in `[-k, k]` (finite coordinates
    /// range fully), plus `extra_pairs` random vectors drawn from the wider
    /// box `[-2k, 2k]` but outside the inner box.
    Bounded { k: i64, extra_pairs: usize, seed: u64 },
    /// `count` random vectors with free coordinates in `[-bound, bound]`.
    Sampled { count: usize, bound: i64, seed: u64 },
}

impl Default for DomainPolicy {
    fn default() -> Self {
        DomainPolicy::Bounded {
            k: 3,
            extra_pairs: 256,
            seed: 42,
        }
    }
}

/// Materialized verification domain: a core element list (laws quantified over
/// pairs or triples iterate over this), extra single vectors appended for
/// unary identities, and the seed used for any sampling.
#[derive(Clone, Debug)]
pub struct VerifyDomain {
    pub elements: Vec<IntVec>,
    pub extras: Vec<IntVec>,
    pub seed: Option<u64>,
}

impl VerifyDomain {
    /// Core elements and extras chained, for unary checks.
    pub fn all(&self) -> impl Iterator<Item = &IntVec> {
        self.elements.iter().chain(self.extras.iter())
    }

    pub fn len(&self) -> usize {
        self.elements.len() + self.extras.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty() && self.extras.is_empty()
    }
}

const MAX_DOMAIN: u128 = 2_000_000;

/// All vectors whose free coordinates lie in `[-k, k]`; finite coordinates
/// range over their full cyclic group. Lexicographic in coordinate order.
pub fn box_elements(sig: &AbSignature, k: i64) -> Result<Vec<IntVec>, CoreError> {
    if sig.is_empty() {
        return Ok(vec![IntVec::zero(sig.clone())]);
    }
    let k = k.max(0);
    let mut total: u128 = 1;
    for &m in &sig.0 {
        let width = if m == 0 { 2 * k as u128 + 1 } else { m as u128 };
        total = total.saturating_mul(width);
        if total > MAX_DOMAIN {
            return Err(CoreError::DomainTooLarge(total, MAX_DOMAIN));
        }
    }
    let n = sig.len();
    let lo: Vec<i64> = sig.0.iter().map(|&m| if m == 0 { -k } else { 0 }).collect();
    let hi: Vec<i64> = sig
        .0
        .iter()
        .map(|&m| if m == 0 { k } else { m as i64 - 1 })
        .collect();
    let mut cur = lo.clone();
    let mut out = Vec::with_capacity(total as usize);
    loop {
        out.push(IntVec::from_coords(sig.clone(), &cur));
        // Odometer with the last coordinate moving fastest.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
        }
    }
}

/// All vectors with taxicab norm at most `bound` (free coordinates only;
/// finite coordinates range fully). Lexicographic in coordinate order.
pub fn ball_elements(sig: &AbSignature, bound: u64) -> Result<Vec<IntVec>, CoreError> {
    let mut out = Vec::new();
    let mut coords = vec![0i64; sig.len()];
    fn rec(
        sig: &AbSignature,
        idx: usize,
        budget: u64,
        coords: &mut Vec<i64>,
        out: &mut Vec<IntVec>,
    ) -> Result<(), CoreError> {
        if out.len() as u128 > MAX_DOMAIN {
            return Err(CoreError::DomainTooLarge(out.len() as u128, MAX_DOMAIN));
        }
        if idx == sig.len() {
            out.push(IntVec::from_coords(sig.clone(), coords));
            return Ok(());
        }
        if sig.0[idx] != 0 {
            for c in 0..sig.0[idx] as i64 {
                coords[idx] = c;
                rec(sig, idx + 1, budget, coords, out)?;
            }
        } else {
            for c in -(budget as i64)..=(budget as i64) {
                coords[idx] = c;
                rec(sig, idx + 1, budget - c.unsigned_abs(), coords, out)?;
            }
        }
        coords[idx] = 0;
        Ok(())
    }
    rec(sig, 0, bound, &mut coords, &mut out)?;
    Ok(out)
}

fn random_vector(sig: &AbSignature, bound: i64, rng: &mut ChaCha8Rng) -> IntVec {
    let coords: Vec<i64> = sig
        .0
        .iter()
        .map(|&m| {
            if m == 0 {
                rng.gen_range(-bound..=bound)
            } else {
                rng.gen_range(0..m as i64)
            }
        })
        .collect();
    IntVec::from_coords(sig.clone(), &coords)
}

/// Builds the domain for a signature under a policy.
pub fn build_domain(sig: &AbSignature, policy: &DomainPolicy) -> Result<VerifyDomain, CoreError> {
    match policy {
        DomainPolicy::Exhaustive => {
            let order = sig
                .order()
                .ok_or_else(|| CoreError::Precondition("exhaustive domain needs a finite signature".into()))?;
            if order > MAX_DOMAIN {
                return Err(CoreError::DomainTooLarge(order, MAX_DOMAIN));
            }
            Ok(VerifyDomain {
                elements: sig.elements(MAX_DOMAIN)?,
                extras: Vec::new(),
                seed: None,
            })
        }
        DomainPolicy::Bounded { k, extra_pairs, seed } => {
            let elements = box_elements(sig, *k)?;
            if sig.is_finite() {
                // The box already is the whole group.
                return Ok(VerifyDomain {
                    elements,
                    extras: Vec::new(),
                    seed: None,
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut extras = Vec::with_capacity(*extra_pairs);
            let inside = |v: &IntVec| v.coords().iter().zip(&sig.0).all(|(&c, &m)| m != 0 || c.abs() <= *k);
            let mut attempts = 0usize;
            while extras.len() < *extra_pairs && attempts < extra_pairs * 64 + 64 {
                attempts += 1;
                let v = random_vector(sig, 2 * (*k).max(1), &mut rng);
                if !inside(&v) {
                    extras.push(v);
                }
            }
            Ok(VerifyDomain {
                elements,
                extras,
                seed: Some(*seed),
            })
        }
        DomainPolicy::Sampled { count, bound, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let elements = (0..*count).map(|_| random_vector(sig, *bound, &mut rng)).collect();
            Ok(VerifyDomain {
                elements,
                extras: Vec::new(),
                seed: Some(*seed),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_counts() {
        let sig = AbSignature::free(3);
        assert_eq!(box_elements(&sig, 1).unwrap().len(), 27);
        assert_eq!(box_elements(&sig, 2).unwrap().len(), 125);
        let mixed = AbSignature(vec![0, 3]);
        assert_eq!(box_elements(&mixed, 1).unwrap().len(), 9);
    }

    #[test]
    fn box_is_lexicographic_and_complete() {
        let sig = AbSignature::free(2);
        let els = box_elements(&sig, 1).unwrap();
        assert_eq!(els[0], IntVec::from_coords(sig.clone(), &[-1, -1]));
        assert_eq!(els[1], IntVec::from_coords(sig.clone(), &[-1, 0]));
        assert_eq!(els[8], IntVec::from_coords(sig.clone(), &[1, 1]));
        assert_eq!(els.len(), 9);
    }

    #[test]
    fn finite_signature_is_exhausted_without_extras() {
        let sig = AbSignature(vec![3, 2]);
        let d = build_domain(&sig, &DomainPolicy::default()).unwrap();
        assert_eq!(d.elements.len(), 6);
        assert!(d.extras.is_empty());
        assert_eq!(d.seed, None);
    }

    #[test]
    fn bounded_domain_extras_lie_outside_box() {
        let sig = AbSignature::free(2);
        let d = build_domain(
            &sig,
            &DomainPolicy::Bounded {
                k: 2,
                extra_pairs: 50,
                seed: 7,
            },
        )
        .unwrap();
        assert_eq!(d.elements.len(), 25);
        assert_eq!(d.extras.len(), 50);
        for v in &d.extras {
            assert!(v.coords().iter().any(|&c| c.abs() > 2), "{:?}", v);
            assert!(v.coords().iter().all(|&c| c.abs() <= 4));
        }
    }

    #[test]
    fn sampled_domain_is_deterministic() {
        let sig = AbSignature::free(3);
        let p = DomainPolicy::Sampled {
            count: 20,
            bound: 5,
            seed: 42,
        };
        let a = build_domain(&sig, &p).unwrap();
        let b = build_domain(&sig, &p).unwrap();
        assert_eq!(a.elements, b.elements);
        assert_eq!(a.elements.len(), 20);
    }

    #[test]
    fn ball_counts_and_order() {
        let sig = AbSignature::free(3);
        // Vectors in Z^3 with |v| <= 4: 1 + 6 + 24 + 62 + ... known count 129.
        assert_eq!(ball_elements(&sig, 4).unwrap().len(), 129);
        assert_eq!(ball_elements(&sig, 0).unwrap().len(), 1);
        let b1 = ball_elements(&sig, 1).unwrap();
        assert_eq!(b1.len(), 7);
        assert_eq!(b1[0], IntVec::from_coords(sig.clone(), &[-1, 0, 0]));
        assert!(b1.contains(&IntVec::zero(sig.clone())));
    }

    #[test]
    fn oversized_domain_is_rejected() {
        let sig = AbSignature::free(12);
        assert!(matches!(
            box_elements(&sig, 3),
            Err(CoreError::DomainTooLarge(_, _))
        ));
    }
}
