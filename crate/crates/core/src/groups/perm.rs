//! Permutations of `{1, ..., n}`.
//!
//! Stored 0-indexed internally; all serialized forms (JSON image arrays,
//! cycle strings) are 1-indexed.

use crate::error::CoreError;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A permutation of `{0, ..., n-1}` in one-line notation: `images[i] = p(i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    /// Builds a permutation from 0-indexed images, validating bijectivity.
    pub fn new(images: Vec<usize>) -> Result<Self, CoreError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(CoreError::InvalidPerm(format!(
                    "images {:?} are not a bijection of 0..{}",
                    images, n
                )));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation from 1-indexed images.
    pub fn from_one_indexed(images: &[usize]) -> Result<Self, CoreError> {
        if images.iter().any(|&i| i == 0) {
            return Err(CoreError::InvalidPerm(
                "1-indexed image array contains 0".into(),
            ));
        }
        Perm::new(images.iter().map(|&i| i - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Applies the permutation to a 0-indexed point.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn one_indexed_images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }

    /// Composition `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(
            self.degree(),
            other.degree(),
            "compose requires equal degrees"
        );
        Perm {
            images: (0..self.degree())
                .map(|i| self.images[other.images[i]])
                .collect(),
        }
    }

    pub fn inv(&self) -> Perm {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_involution(&self) -> bool {
        (0..self.degree()).all(|i| self.images[self.images[i]] == i)
    }

    /// Disjoint cycles of length >= 2, each rotated to start at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut j = self.images[start];
            while j != start {
                seen[j] = true;
                cyc.push(j);
                j = self.images[j];
            }
            out.push(cyc);
        }
        out
    }

    /// Sign of the permutation: +1 for even, -1 for odd.
    pub fn sign(&self) -> i64 {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_odd(&self) -> bool {
        self.sign() == -1
    }

    /// Multiplicative order.
    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }

    /// Parses cycle notation such as `"(1 2)(3 4)"`; `"(1)"`, `"()"`, and `""`
    /// all denote the identity. Points are 1-indexed and must lie in `1..=n`.
    /// Overlapping cycles compose right-to-left.
    pub fn parse_cycles(s: &str, n: usize) -> Result<Self, CoreError> {
        let s = s.trim();
        if s.is_empty() || s == "id" || s == "e" {
            return Ok(Perm::identity(n));
        }
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| CoreError::Parse(format!("expected '(' in {:?}", s)))?;
            if rest[..open].trim() != "" {
                return Err(CoreError::Parse(format!("stray text in {:?}", s)));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| CoreError::Parse(format!("unclosed '(' in {:?}", s)))?;
            let body = &rest[open + 1..close];
            let mut cyc = Vec::new();
            for tok in body.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let p: usize = tok
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad point {:?} in {:?}", tok, s)))?;
                if p == 0 || p > n {
                    return Err(CoreError::Parse(format!(
                        "point {} out of range 1..={}",
                        p, n
                    )));
                }
                if cyc.contains(&(p - 1)) {
                    return Err(CoreError::Parse(format!("repeated point {} in {:?}", p, s)));
                }
                cyc.push(p - 1);
            }
            if cyc.len() > 1 {
                cycles.push(cyc);
            }
            rest = &rest[close + 1..];
        }
        // Rightmost cycle acts first.
        let mut perm = Perm::identity(n);
        for cyc in cycles.iter().rev() {
            let mut images: Vec<usize> = (0..n).collect();
            for w in 0..cyc.len() {
                images[cyc[w]] = cyc[(w + 1) % cyc.len()];
            }
            perm = Perm { images }.compose(&perm);
        }
        Ok(perm)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "(1)");
        }
        for cyc in cycles {
            write!(f, "(")?;
            for (k, &p) in cyc.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Serialize, Deserialize)]
struct PermJson {
    n: usize,
    images: Vec<usize>,
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PermJson {
            n: self.degree(),
            images: self.one_indexed_images(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PermJson::deserialize(d)?;
        if j.images.len() != j.n {
            return Err(D::Error::custom("image array length differs from n"));
        }
        Perm::from_one_indexed(&j.images).map_err(D::Error::custom)
    }
}

/// All permutations of degree `n` in lexicographic order of their image arrays.
pub fn all_perms(n: usize) -> Vec<Perm> {
    assert!(n <= 8, "refusing to materialize S_n beyond n = 8");
    let mut out = Vec::new();
    let mut images: Vec<usize> = (0..n).collect();
    loop {
        out.push(Perm {
            images: images.clone(),
        });
        // next_permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| images[i] < images[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| images[j] > images[i]).unwrap();
        images.swap(i, j);
        images[i + 1..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_applies_right_factor_first() {
        let p = Perm::parse_cycles("(1 2)", 3).unwrap();
        let q = Perm::parse_cycles("(2 3)", 3).unwrap();
        // p(q(1)) = p(1) = 2, p(q(2)) = p(3) = 3, p(q(3)) = p(2) = 1
        let r = p.compose(&q);
        assert_eq!(r.one_indexed_images(), vec![2, 3, 1]);
        assert_eq!(r, Perm::parse_cycles("(1 2 3)", 3).unwrap());
    }

    #[test]
    fn inverse_and_identity() {
        let p = Perm::parse_cycles("(1 4 2)(3 5)", 5).unwrap();
        assert!(p.compose(&p.inv()).is_identity());
        assert!(p.inv().compose(&p).is_identity());
        assert!(Perm::identity(4).is_identity());
    }

    #[test]
    fn parity_and_order() {
        assert_eq!(Perm::parse_cycles("(1 2)", 4).unwrap().sign(), -1);
        assert_eq!(Perm::parse_cycles("(1 2 3)", 4).unwrap().sign(), 1);
        assert_eq!(Perm::parse_cycles("(1 2)(3 4)", 4).unwrap().sign(), 1);
        assert_eq!(Perm::identity(4).sign(), 1);
        assert_eq!(Perm::parse_cycles("(1 2 3 4)", 4).unwrap().order(), 4);
        assert_eq!(Perm::parse_cycles("(1 2)", 4).unwrap().order(), 2);
        assert_eq!(Perm::identity(4).order(), 1);
    }

    #[test]
    fn cycle_parse_and_display_roundtrip() {
        for s in ["(1)", "(1 2)", "(1 2 3)", "(1 3)(2 4)", "(1 4 2)"] {
            let p = Perm::parse_cycles(s, 4).unwrap();
            let q = Perm::parse_cycles(&p.to_string(), 4).unwrap();
            assert_eq!(p, q);
        }
        assert_eq!(Perm::identity(3).to_string(), "(1)");
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(Perm::parse_cycles("(0 1)", 3).is_err());
        assert!(Perm::parse_cycles("(1 4)", 3).is_err());
        assert!(Perm::parse_cycles("(1 1)", 3).is_err());
        assert!(Perm::parse_cycles("(1 2", 3).is_err());
        assert!(Perm::new(vec![0, 0, 1]).is_err());
        assert!(Perm::from_one_indexed(&[0, 1, 2]).is_err());
    }

    #[test]
    fn overlapping_cycles_compose_right_to_left() {
        // (1 2)(2 3): apply (2 3) first => 1->2, 2->?; (2 3): 2->3, then (1 2): 3->3.
        let p = Perm::parse_cycles("(1 2)(2 3)", 3).unwrap();
        assert_eq!(p.one_indexed_images(), vec![2, 3, 1]);
    }

    #[test]
    fn serde_is_one_indexed() {
        let p = Perm::parse_cycles("(1 2)", 3).unwrap();
        let js = serde_json::to_value(&p).unwrap();
        assert_eq!(js, serde_json::json!({"n": 3, "images": [2, 1, 3]}));
        let q: Perm = serde_json::from_value(js).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn all_perms_is_lexicographic_and_complete() {
        let ps = all_perms(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0], Perm::identity(3));
        for w in ps.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}
