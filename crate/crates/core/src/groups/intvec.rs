//! Finitely supported integer vectors over a product of cyclic groups.
//!
//! A signature `[m_1, ..., m_n]` denotes `Z_{m_1} x ... x Z_{m_n}`, where
//! modulus 0 stands for a copy of `Z`. Vectors are kept canonical: entries at
//! a finite-modulus coordinate are reduced into `[0, m)`, and zero entries are
//! dropped, so structural equality is semantic equality.

use crate::error::CoreError;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// Moduli of a finitely generated abelian group; 0 means a free factor.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AbSignature(pub Vec<u64>);

impl AbSignature {
    pub fn free(n: usize) -> Self {
        AbSignature(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|&m| m > 0)
    }

    /// Group order when finite.
    pub fn order(&self) -> Option<u128> {
        self.0
            .iter()
            .try_fold(1u128, |acc, &m| {
                if m == 0 {
                    None
                } else {
                    acc.checked_mul(m as u128)
                }
            })
    }

    /// Every element, in lexicographic coordinate order. Errors when a factor
    /// is infinite or the total count exceeds `cap`.
    pub fn elements(&self, cap: u128) -> Result<Vec<IntVec>, CoreError> {
        let order = self
            .order()
            .ok_or_else(|| CoreError::Precondition("signature has an infinite factor".into()))?;
        if order > cap {
            return Err(CoreError::DomainTooLarge(order, cap));
        }
        let mut out = Vec::with_capacity(order as usize);
        let mut coords = vec![0i64; self.len()];
        loop {
            out.push(IntVec::from_coords(self.clone(), &coords));
            let mut i = self.len();
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                coords[i] += 1;
                if (coords[i] as u64) < self.0[i] {
                    break;
                }
                coords[i] = 0;
            }
        }
    }
}

/// Element of the abelian group described by an [`AbSignature`].
///
/// Coordinates are stored densely (the signatures in play are short), kept
/// canonical at all times: reduced into `[0, m)` at finite factors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVec {
    sig: AbSignature,
    coords: Vec<i64>,
}

fn reduce_at(sig: &AbSignature, i: usize, val: i64) -> i64 {
    let m = sig.0[i];
    if m == 0 {
        val
    } else {
        val.rem_euclid(m as i64)
    }
}

impl IntVec {
    pub fn zero(sig: AbSignature) -> Self {
        let n = sig.len();
        IntVec {
            sig,
            coords: vec![0; n],
        }
    }

    /// `e_i` (0-indexed coordinate).
    pub fn basis(sig: AbSignature, i: usize) -> Self {
        assert!(i < sig.len(), "basis index out of range");
        IntVec::zero(sig).with_entry(i, 1)
    }

    pub fn from_coords(sig: AbSignature, coords: &[i64]) -> Self {
        IntVec::from_owned(sig, coords.to_vec())
    }

    /// Takes ownership of the buffer and canonicalizes it in place.
    pub(crate) fn from_owned(sig: AbSignature, mut coords: Vec<i64>) -> Self {
        assert_eq!(sig.len(), coords.len(), "coordinate count mismatch");
        for (i, c) in coords.iter_mut().enumerate() {
            *c = reduce_at(&sig, i, *c);
        }
        IntVec { sig, coords }
    }

    pub fn signature(&self) -> &AbSignature {
        &self.sig
    }

    /// Returns a copy with coordinate `i` set to `val` (canonicalized).
    pub fn with_entry(&self, i: usize, val: i64) -> Self {
        assert!(i < self.sig.len(), "coordinate out of range");
        let mut out = self.clone();
        out.coords[i] = reduce_at(&out.sig, i, val);
        out
    }

    pub fn get(&self, i: usize) -> i64 {
        self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coords
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
    }

    /// Least coordinate with a nonzero entry.
    pub fn first_nonzero(&self) -> Option<(usize, i64)> {
        self.coords.iter().position(|&c| c != 0).map(|i| (i, self.coords[i]))
    }

    pub fn add(&self, other: &IntVec) -> IntVec {
        assert_eq!(self.sig, other.sig, "signature mismatch");
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .enumerate()
            .map(|(i, (&a, &b))| reduce_at(&self.sig, i, a + b))
            .collect();
        IntVec {
            sig: self.sig.clone(),
            coords,
        }
    }

    pub fn neg(&self) -> IntVec {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, &c)| reduce_at(&self.sig, i, -c))
            .collect();
        IntVec {
            sig: self.sig.clone(),
            coords,
        }
    }

    pub fn sub(&self, other: &IntVec) -> IntVec {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> IntVec {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, &c)| reduce_at(&self.sig, i, c.checked_mul(k).expect("scale overflow")))
            .collect();
        IntVec {
            sig: self.sig.clone(),
            coords,
        }
    }

    /// Taxicab norm of the stored canonical representatives.
    pub fn taxicab(&self) -> u64 {
        self.coords.iter().map(|v| v.unsigned_abs()).sum()
    }

    pub fn coords(&self) -> Vec<i64> {
        self.coords.clone()
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Debug for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Serialize, Deserialize)]
struct IntVecJson {
    moduli: Vec<u64>,
    entries: BTreeMap<String, i64>,
}

impl Serialize for IntVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntVecJson {
            moduli: self.sig.0.clone(),
            entries: self
                .support()
                .map(|(i, v)| ((i + 1).to_string(), v))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = IntVecJson::deserialize(d)?;
        let sig = AbSignature(j.moduli);
        let mut v = IntVec::zero(sig.clone());
        for (key, val) in j.entries {
            let i: usize = key
                .parse()
                .map_err(|_| D::Error::custom(format!("bad coordinate key {:?}", key)))?;
            if i == 0 || i > sig.len() {
                return Err(D::Error::custom(format!(
                    "coordinate {} out of range 1..={}",
                    i,
                    sig.len()
                )));
            }
            v = v.with_entry(i - 1, val);
        }
        Ok(v)
    }
}
