//! Exact truncated free associative algebra over rational scalars:
//! noncommutative polynomials, exp/log, the Baker-Campbell-Hausdorff
//! product, the Dynkin primitivity criterion, Lyndon-basis decomposition,
//! and the weight-0 check for linear maps on the truncated free Lie algebra.
//!
//! Everything here is exact — no floating point enters this module.

use crate::error::CoreError;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Exact scalar for the truncated series engine: a field of characteristic
/// zero with exact arithmetic, reachable from the integers.
pub trait BchScalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    fn from_int(n: i64) -> Self;

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_int(num) / Self::from_int(den)
    }
}

impl<I> BchScalar for Ratio<I>
where
    I: Integer + Signed + Clone + From<i64> + Debug + Display + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(I::from(n))
    }
}

/// Truncated noncommutative polynomial: words over `gens` letters, length at
/// most `degree`, with exact coefficients. Letters are stored zero-based;
/// they render one-based (`x1`, `x2`, ...). Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPoly<C> {
    gens: u8,
    degree: usize,
    terms: BTreeMap<Vec<u8>, C>,
}

impl<C: BchScalar> NcPoly<C> {
    pub fn zero(gens: u8, degree: usize) -> Self {
        NcPoly {
            gens,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The constant polynomial 1.
    pub fn one(gens: u8, degree: usize) -> Self {
        let mut p = NcPoly::zero(gens, degree);
        p.terms.insert(Vec::new(), C::one());
        p
    }

    /// The `i`-th generator (zero-based).
    pub fn generator(gens: u8, degree: usize, i: u8) -> Self {
        assert!(i < gens, "generator index {} out of range {}", i, gens);
        assert!(degree >= 1, "truncation degree must admit words");
        let mut p = NcPoly::zero(gens, degree);
        p.terms.insert(vec![i], C::one());
        p
    }

    pub fn gens(&self) -> u8 {
        self.gens
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, word: &[u8]) -> C {
        self.terms.get(word).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&[])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest word length carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).min()
    }

    fn assert_compatible(&self, o: &Self) {
        assert_eq!(self.gens, o.gens, "mixed generator counts");
        assert_eq!(self.degree, o.degree, "mixed truncation degrees");
    }

    fn insert_add(&mut self, word: Vec<u8>, c: C) {
        if c.is_zero() || word.len() > self.degree {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.assert_compatible(o);
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.insert_add(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = NcPoly::zero(self.gens, self.degree);
        for (w, c) in &self.terms {
            out.terms.insert(w.clone(), -(c.clone()));
        }
        out
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut out = NcPoly::zero(self.gens, self.degree);
        if k.is_zero() {
            return out;
        }
        for (w, c) in &self.terms {
            out.terms.insert(w.clone(), c.clone() * k.clone());
        }
        out
    }

    /// Product in the truncated free associative algebra: concatenation of
    /// words, discarding anything past the truncation degree.
    pub fn nc_mul(&self, o: &Self) -> Self {
        self.assert_compatible(o);
        let mut out = NcPoly::zero(self.gens, self.degree);
        for (w1, c1) in &self.terms {
            if w1.len() > self.degree {
                continue;
            }
            for (w2, c2) in &o.terms {
                if w1.len() + w2.len() > self.degree {
                    continue;
                }
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.insert_add(w, c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn bracket(&self, o: &Self) -> Self {
        self.nc_mul(o).sub(&o.nc_mul(self))
    }

    /// The part of word length exactly `k`.
    pub fn homogeneous(&self, k: usize) -> Self {
        let mut out = NcPoly::zero(self.gens, self.degree);
        for (w, c) in &self.terms {
            if w.len() == k {
                out.terms.insert(w.clone(), c.clone());
            }
        }
        out
    }

    /// Exponential series, exact at the truncation degree. Requires zero
    /// constant term.
    pub fn nc_exp(&self) -> Result<Self, CoreError> {
        if !self.constant_term().is_zero() {
            return Err(CoreError::Precondition(
                "exponential needs a zero constant term".into(),
            ));
        }
        let mut acc = NcPoly::one(self.gens, self.degree);
        let mut pow = NcPoly::one(self.gens, self.degree);
        for k in 1..=self.degree {
            pow = pow.nc_mul(self).scale(&C::ratio(1, k as i64));
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        Ok(acc)
    }

    /// Logarithm series, exact at the truncation degree. Requires constant
    /// term 1.
    pub fn nc_log(&self) -> Result<Self, CoreError> {
        if !self.constant_term().is_one() {
            return Err(CoreError::Precondition(
                "logarithm needs constant term one".into(),
            ));
        }
        let u = self.sub(&NcPoly::one(self.gens, self.degree));
        let mut acc = NcPoly::zero(self.gens, self.degree);
        let mut pow = NcPoly::one(self.gens, self.degree);
        for k in 1..=self.degree {
            pow = pow.nc_mul(&u);
            if pow.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&pow.scale(&C::ratio(sign, k as i64)));
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a series with constant term 1.
    pub fn nc_inv(&self) -> Result<Self, CoreError> {
        if !self.constant_term().is_one() {
            return Err(CoreError::Precondition(
                "inversion needs constant term one".into(),
            ));
        }
        let neg_u = NcPoly::one(self.gens, self.degree).sub(self);
        let mut acc = NcPoly::one(self.gens, self.degree);
        let mut pow = NcPoly::one(self.gens, self.degree);
        for _ in 1..=self.degree {
            pow = pow.nc_mul(&neg_u);
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        Ok(acc)
    }

    /// Left-to-right nested bracketing of one word:
    /// `a1 a2 ... ak -> [a1,[a2,[...,ak]...]]`.
    pub fn word_bracketing(gens: u8, degree: usize, word: &[u8]) -> Self {
        assert!(!word.is_empty(), "bracketing needs a nonempty word");
        let mut acc = NcPoly::generator(gens, degree, *word.last().unwrap());
        for &letter in word[..word.len() - 1].iter().rev() {
            acc = NcPoly::generator(gens, degree, letter).bracket(&acc);
        }
        acc
    }

    /// The Dynkin map: each word is replaced by its left-to-right nested
    /// bracketing; the constant term is dropped.
    pub fn dynkin_delta(&self) -> Self {
        let mut acc = NcPoly::zero(self.gens, self.degree);
        for (w, c) in &self.terms {
            if w.is_empty() {
                continue;
            }
            acc = acc.add(&NcPoly::word_bracketing(self.gens, self.degree, w).scale(c));
        }
        acc
    }

    /// Dynkin criterion: the polynomial lies in the free Lie algebra iff its
    /// constant term vanishes and every homogeneous component of word length
    /// `k` is multiplied by `k` under the Dynkin map.
    pub fn is_lie(&self) -> bool {
        if !self.constant_term().is_zero() {
            return false;
        }
        for k in 1..=self.degree {
            let pk = self.homogeneous(k);
            if pk.is_zero() {
                continue;
            }
            if pk.dynkin_delta() != pk.scale(&C::from_int(k as i64)) {
                return false;
            }
        }
        true
    }

    /// Deterministic JSON rendering: words as one-based letter arrays with
    /// coefficients as exact-rational strings, in word order.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(w, c)| {
                json!({
                    "word": w.iter().map(|&l| l as u16 + 1).collect::<Vec<u16>>(),
                    "coeff": c.to_string(),
                })
            })
            .collect();
        json!({
            "gens": self.gens,
            "degree": self.degree,
            "terms": terms,
        })
    }
}

impl<C: BchScalar> Display for NcPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let word = w
                    .iter()
                    .map(|&l| format!("x{}", l as u16 + 1))
                    .collect::<Vec<_>>()
                    .join("*");
                if w.is_empty() {
                    format!("({})", c)
                } else {
                    format!("({})*{}", c, word)
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

/// Truncated product on the free Lie algebra: `log(exp(x) exp(y))`, exact at
/// the common truncation degree. Both inputs need zero constant term.
pub fn bch<C: BchScalar>(x: &NcPoly<C>, y: &NcPoly<C>) -> Result<NcPoly<C>, CoreError> {
    x.nc_exp()?.nc_mul(&y.nc_exp()?).nc_log()
}

/// `g y g^{-1}` for a group-like `g` (constant term 1).
pub fn conjugate<C: BchScalar>(g: &NcPoly<C>, y: &NcPoly<C>) -> Result<NcPoly<C>, CoreError> {
    Ok(g.nc_mul(y).nc_mul(&g.nc_inv()?))
}

/// Outcome of the weight-0 identity check on the truncated free Lie algebra.
#[derive(Clone, Debug)]
pub struct FreeRbReport<C> {
    pub holds: bool,
    /// `bch(B(x), B(y)) - B(x + exp(B(x)) y exp(-B(x)))`.
    pub residual: NcPoly<C>,
    /// Smallest word carrying a nonzero residual coefficient.
    pub first_discrepancy: Option<(Vec<u8>, C)>,
}

/// Checks the weight-0 relation for a linear map `B` on the truncated free
/// Lie algebra: the series product of `B(x)` and `B(y)` must equal `B` of
/// `x + exp(B(x)) y exp(-B(x))`, exactly at the truncation degree.
pub fn free_rb_check<C: BchScalar>(
    b: &dyn Fn(&NcPoly<C>) -> NcPoly<C>,
    x: &NcPoly<C>,
    y: &NcPoly<C>,
) -> Result<FreeRbReport<C>, CoreError> {
    let bx = b(x);
    let by = b(y);
    let lhs = bch(&bx, &by)?;
    let moved = x.add(&conjugate(&bx.nc_exp()?, y)?);
    let residual = lhs.sub(&b(&moved));
    let first_discrepancy = residual
        .terms()
        .min_by_key(|(w, _)| (w.len(), (*w).clone()))
        .map(|(w, c)| (w.clone(), c.clone()));
    Ok(FreeRbReport {
        holds: residual.is_zero(),
        residual,
        first_discrepancy,
    })
}

/// A word is Lyndon iff it is nonempty and strictly smaller than each of its
/// proper suffixes.
pub fn is_lyndon(word: &[u8]) -> bool {
    if word.is_empty() {
        return false;
    }
    (1..word.len()).all(|i| word < &word[i..])
}

/// All Lyndon words over `gens` letters of length at most `max_len`, in
/// lexicographic order (Duval's generation).
pub fn lyndon_words(gens: u8, max_len: usize) -> Vec<Vec<u8>> {
    assert!(gens >= 1, "need at least one letter");
    if max_len == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut w: Vec<u8> = vec![0];
    loop {
        out.push(w.clone());
        // Extend periodically to the cap, then increment the last
        // non-maximal letter.
        let prefix = w.clone();
        w = (0..max_len).map(|i| prefix[i % prefix.len()]).collect();
        while w.last() == Some(&(gens - 1)) {
            w.pop();
        }
        match w.last_mut() {
            None => break,
            Some(last) => *last += 1,
        }
    }
    out
}

/// Binary bracketing tree over generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LyndonBracket {
    Leaf(u8),
    Node(Box<LyndonBracket>, Box<LyndonBracket>),
}

impl Display for LyndonBracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LyndonBracket::Leaf(l) => write!(f, "x{}", *l as u16 + 1),
            LyndonBracket::Node(a, b) => write!(f, "[{},{}]", a, b),
        }
    }
}

impl LyndonBracket {
    /// Expansion in the free associative algebra.
    pub fn expand<C: BchScalar>(&self, gens: u8, degree: usize) -> NcPoly<C> {
        match self {
            LyndonBracket::Leaf(l) => NcPoly::generator(gens, degree, *l),
            LyndonBracket::Node(a, b) => {
                a.expand(gens, degree).bracket(&b.expand(gens, degree))
            }
        }
    }
}

/// Standard bracketing of a Lyndon word: split off the lexicographically
/// least proper suffix and recurse on both halves.
pub fn lyndon_bracketing(word: &[u8]) -> LyndonBracket {
    assert!(is_lyndon(word), "not a Lyndon word: {:?}", word);
    if word.len() == 1 {
        return LyndonBracket::Leaf(word[0]);
    }
    let split = (1..word.len())
        .min_by(|&i, &j| word[i..].cmp(&word[j..]))
        .expect("length at least two");
    LyndonBracket::Node(
        Box::new(lyndon_bracketing(&word[..split])),
        Box::new(lyndon_bracketing(&word[split..])),
    )
}

/// Decomposes a Lie element into the Lyndon bracket basis, degree by degree.
/// Relies on triangularity: the expansion of the standard bracketing of a
/// Lyndon word is that word plus lexicographically larger words.
pub fn lie_to_lyndon<C: BchScalar>(
    p: &NcPoly<C>,
) -> Result<Vec<(LyndonBracket, C)>, CoreError> {
    if !p.constant_term().is_zero() {
        return Err(CoreError::check_failed(
            "lyndon_decomposition",
            "nonzero constant term",
        ));
    }
    let mut out = Vec::new();
    for k in 1..=p.degree() {
        let mut rem = p.homogeneous(k);
        loop {
            let leading = rem.terms().next().map(|(w, c)| (w.clone(), c.clone()));
            let (w, c) = match leading {
                Some(pair) => pair,
                None => break,
            };
            if !is_lyndon(&w) {
                return Err(CoreError::check_failed(
                    "lyndon_decomposition",
                    format!("leading word {:?} is not Lyndon; not a Lie element", w),
                ));
            }
            let bracket = lyndon_bracketing(&w);
            let expanded: NcPoly<C> = bracket.expand(p.gens(), p.degree());
            debug_assert!(expanded.coeff(&w).is_one());
            rem = rem.sub(&expanded.scale(&c));
            if !rem.coeff(&w).is_zero() {
                return Err(CoreError::check_failed(
                    "lyndon_decomposition",
                    "leading word did not cancel",
                ));
            }
            out.push((bracket, c));
        }
    }
    Ok(out)
}
