//! Truncated formal power series in (z_1..z_n, zbar_1..zbar_n).
//!
//! A [`Jet`] stores complex-rational coefficients up to an explicit validity
//! order. Coefficients above that order are unknown, not zero, and reading
//! them is an error. Variable indices in the public API are 1-based.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{cmul, creal, fmt_rat, parse_rat, rat_int, CNum, Rat};
use crate::error::{Error, Result};

/// Exponents of the monomial z^alpha zbar^beta.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex {
    deg: u32,
    exps: Vec<u32>,
}

impl MultiIndex {
    /// Panics if the two parts differ in length.
    pub fn new(alpha: &[u32], beta: &[u32]) -> Self {
        assert_eq!(alpha.len(), beta.len(), "alpha and beta lengths differ");
        let mut exps = Vec::with_capacity(2 * alpha.len());
        exps.extend_from_slice(alpha);
        exps.extend_from_slice(beta);
        Self::from_exps(exps)
    }

    fn from_exps(exps: Vec<u32>) -> Self {
        MultiIndex {
            deg: exps.iter().sum(),
            exps,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::from_exps(vec![0; 2 * n])
    }

    pub fn n(&self) -> usize {
        self.exps.len() / 2
    }

    pub fn alpha(&self) -> &[u32] {
        &self.exps[..self.n()]
    }

    pub fn beta(&self) -> &[u32] {
        &self.exps[self.n()..]
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    /// The index of the conjugate monomial, (beta, alpha).
    pub fn swapped(&self) -> Self {
        MultiIndex::new(self.beta(), self.alpha())
    }

    pub fn is_diagonal(&self) -> bool {
        self.alpha() == self.beta()
    }

    pub fn plus(&self, other: &MultiIndex) -> Self {
        MultiIndex {
            deg: self.deg + other.deg,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    /// Exponent of z_i (barred = false) or zbar_i (barred = true), 1-based.
    pub fn exp(&self, i: usize, barred: bool) -> u32 {
        self.exps[slot(self.n(), i, barred)]
    }

    /// Relabel variables: new variable i is old variable perm[i] (0-based).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n();
        let a: Vec<u32> = perm.iter().map(|&p| self.exps[p]).collect();
        let b: Vec<u32> = perm.iter().map(|&p| self.exps[n + p]).collect();
        MultiIndex::new(&a, &b)
    }
}

fn slot(n: usize, i: usize, barred: bool) -> usize {
    assert!(i >= 1 && i <= n, "variable index {i} out of 1..={n}");
    if barred {
        n + i - 1
    } else {
        i - 1
    }
}

/// Graded: total degree first, then lexicographic on (alpha, beta).
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg
            .cmp(&other.deg)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of length `n` summing to `d`, in lexicographic order.
pub fn compositions(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 1 {
            cur.push(d);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=d {
            cur.push(k);
            rec(n - 1, d - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Every index (alpha, beta) of total degree `d` in `n` variables.
pub fn indices_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
    let mut out: Vec<MultiIndex> = compositions(2 * n, d)
        .into_iter()
        .map(MultiIndex::from_exps)
        .collect();
    out.sort();
    out
}

/// Least degree carrying a nonzero coefficient.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

/// Truncated series with validity order `order`.
#[derive(Clone, PartialEq, Debug)]
pub struct Jet {
    n: usize,
    order: u32,
    coeffs: BTreeMap<MultiIndex, CNum>,
}

impl Jet {
    pub fn zero(n: usize, order: u32) -> Self {
        Jet {
            n,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, order: u32, c: CNum) -> Self {
        let mut j = Self::zero(n, order);
        j.add_term(MultiIndex::zero(n), c);
        j
    }

    /// c z^alpha zbar^beta; dropped if its degree exceeds `order`.
    pub fn monomial(n: usize, order: u32, alpha: &[u32], beta: &[u32], c: CNum) -> Self {
        let mut j = Self::zero(n, order);
        let idx = MultiIndex::new(alpha, beta);
        if idx.degree() <= order {
            j.add_term(idx, c);
        }
        j
    }

    /// The coordinate z_i (or zbar_i), 1-based.
    pub fn var(n: usize, order: u32, i: usize, barred: bool) -> Self {
        let mut exps = vec![0; 2 * n];
        exps[slot(n, i, barred)] = 1;
        let mut j = Self::zero(n, order);
        if order >= 1 {
            j.add_term(MultiIndex::from_exps(exps), CNum::one());
        }
        j
    }

    /// Errors if a term lies above `order` or has the wrong variable count.
    pub fn from_terms(
        n: usize,
        order: u32,
        terms: impl IntoIterator<Item = (MultiIndex, CNum)>,
    ) -> Result<Self> {
        let mut j = Self::zero(n, order);
        for (idx, c) in terms {
            if idx.n() != n {
                return Err(Error::VariableCountMismatch {
                    left: n,
                    right: idx.n(),
                });
            }
            if idx.degree() > order {
                return Err(Error::OrderExceeded {
                    degree: idx.degree(),
                    order,
                });
            }
            j.add_term(idx, c);
        }
        Ok(j)
    }

    fn add_term(&mut self, idx: MultiIndex, c: CNum) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(idx) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &CNum)> {
        self.coeffs.iter()
    }

    /// Coefficient of z^alpha zbar^beta; errors above the validity order.
    pub fn coeff(&self, idx: &MultiIndex) -> Result<CNum> {
        if idx.degree() > self.order {
            return Err(Error::OrderExceeded {
                degree: idx.degree(),
                order: self.order,
            });
        }
        Ok(self.coeffs.get(idx).cloned().unwrap_or_else(CNum::zero))
    }

    /// Same as `coeff` for callers that already checked the degree.
    pub fn coeff_or_zero(&self, idx: &MultiIndex) -> CNum {
        debug_assert!(idx.degree() <= self.order);
        self.coeffs.get(idx).cloned().unwrap_or_else(CNum::zero)
    }

    fn check_n(&self, other: &Jet) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VariableCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Drop everything above `order` (only ever lowers the order).
    pub fn truncate(&self, order: u32) -> Jet {
        let order = order.min(self.order);
        Jet {
            n: self.n,
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.degree() <= order)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Raise the validity order of an exact polynomial. Sound only when the
    /// jet is known to have no terms above its current order, e.g. a
    /// homogeneous component used as a polynomial in its own right.
    pub fn exact_to(&self, order: u32) -> Jet {
        let mut j = self.clone();
        j.order = j.order.max(order);
        j
    }

    pub fn add_jet(&self, other: &Jet) -> Result<Jet> {
        self.check_n(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (k, v) in &other.coeffs {
            if k.degree() <= order {
                out.add_term(k.clone(), v.clone());
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CNum) -> Jet {
        let mut out = Jet::zero(self.n, self.order);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.coeffs {
            out.coeffs.insert(k.clone(), cmul(v, c));
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> Jet {
        self.scale(&creal(c.clone()))
    }

    /// Product truncated at min(a.order, b.order).
    pub fn mul_trunc(&self, other: &Jet) -> Result<Jet> {
        self.check_n(other)?;
        let order = self.order.min(other.order);
        let mut out: BTreeMap<MultiIndex, CNum> = BTreeMap::new();
        for (ia, ca) in &self.coeffs {
            if ia.degree() > order {
                break;
            }
            let room = order - ia.degree();
            for (ib, cb) in &other.coeffs {
                if ib.degree() > room {
                    break;
                }
                let v = cmul(ca, cb);
                match out.entry(ia.plus(ib)) {
                    Entry::Vacant(e) => {
                        e.insert(v);
                    }
                    Entry::Occupied(mut e) => *e.get_mut() += v,
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(Jet {
            n: self.n,
            order,
            coeffs: out,
        })
    }

    /// Multiply by c z^alpha zbar^beta, keeping the validity order.
    pub fn mul_monomial(&self, idx: &MultiIndex, c: &CNum) -> Jet {
        let mut out = Jet::zero(self.n, self.order);
        for (k, v) in &self.coeffs {
            let m = k.plus(idx);
            if m.degree() <= self.order {
                out.add_term(m, cmul(v, c));
            }
        }
        out
    }

    /// Bar operation: coefficient of (alpha, beta) becomes the conjugate of
    /// the coefficient of (beta, alpha).
    pub fn conj(&self) -> Jet {
        Jet {
            n: self.n,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.swapped(), v.conj()))
                .collect(),
        }
    }

    /// Partial derivative in z_i or zbar_i (1-based). The validity order
    /// drops by one.
    pub fn diff(&self, i: usize, barred: bool) -> Jet {
        let s = slot(self.n, i, barred);
        let mut out = Jet::zero(self.n, self.order.saturating_sub(1));
        for (k, v) in &self.coeffs {
            let e = k.exps[s];
            if e == 0 {
                continue;
            }
            let mut exps = k.exps.clone();
            exps[s] -= 1;
            let idx = MultiIndex::from_exps(exps);
            if idx.degree() <= out.order {
                out.add_term(idx, v * rat_int(e as i64));
            }
        }
        out
    }

    /// Total-degree-m component, with validity order kept.
    pub fn homog(&self, m: u32) -> Result<Jet> {
        if m > self.order {
            return Err(Error::OrderExceeded {
                degree: m,
                order: self.order,
            });
        }
        Ok(Jet {
            n: self.n,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| k.degree() == m)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        })
    }

    /// (a + conj a) / 2, a real jet.
    pub fn re_part(&self) -> Jet {
        let half = CNum::new(Rat::new(1.into(), 2.into()), Rat::zero());
        (self + &self.conj()).scale(&half)
    }

    /// (a - conj a) / (2i), a real jet.
    pub fn im_part(&self) -> Jet {
        let c = CNum::new(Rat::zero(), Rat::new((-1).into(), 2.into()));
        (self - &self.conj()).scale(&c)
    }

    pub fn ord(&self) -> Valuation {
        self.coeffs
            .keys()
            .next()
            .map_or(Valuation::Infinite, |k| Valuation::Finite(k.degree()))
    }

    /// coeff(beta, alpha) = conj(coeff(alpha, beta)) for every stored term.
    pub fn is_real(&self) -> bool {
        self.first_non_real().is_none()
    }

    /// First index whose conjugate partner does not match.
    pub fn first_non_real(&self) -> Option<&MultiIndex> {
        self.coeffs.iter().find_map(|(k, v)| {
            let partner = self.coeffs.get(&k.swapped());
            match partner {
                Some(p) if *p == v.conj() => None,
                _ => Some(k),
            }
        })
    }

    pub fn permuted(&self, perm: &[usize]) -> Jet {
        Jet {
            n: self.n,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.permuted(perm), v.clone()))
                .collect(),
        }
    }

    /// Least degree whose coefficient is nonzero, with that term.
    pub fn first_term(&self) -> Option<(&MultiIndex, &CNum)> {
        self.coeffs.iter().next()
    }

    pub fn to_terms_json(&self) -> Vec<TermJson> {
        self.coeffs
            .iter()
            .map(|(k, v)| TermJson {
                alpha: k.alpha().to_vec(),
                beta: k.beta().to_vec(),
                re: fmt_rat(&v.re),
                im: fmt_rat(&v.im),
            })
            .collect()
    }

    pub fn from_terms_json(n: usize, order: u32, terms: &[TermJson]) -> Result<Jet> {
        let mut parsed = Vec::with_capacity(terms.len());
        for t in terms {
            if t.alpha.len() != n || t.beta.len() != n {
                return Err(Error::Parse(format!(
                    "term exponents must have length {n}"
                )));
            }
            parsed.push((
                MultiIndex::new(&t.alpha, &t.beta),
                CNum::new(parse_rat(&t.re)?, parse_rat(&t.im)?),
            ));
        }
        Jet::from_terms(n, order, parsed)
    }
}

/// Wire form of one jet term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub re: String,
    pub im: String,
}

impl Add for &Jet {
    type Output = Jet;
    /// Panics on differing variable counts; `add_jet` is the checked form.
    fn add(self, rhs: &Jet) -> Jet {
        self.add_jet(rhs).expect("jet variable counts differ")
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.add_jet(&-rhs).expect("jet variable counts differ")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    /// Panics on differing variable counts; `mul_trunc` is the checked form.
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_trunc(rhs).expect("jet variable counts differ")
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            n: self.n,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), -v.clone())).collect(),
        }
    }
}

/// Weighted-homogeneous holomorphic polynomial
/// B(z, w) = sum b_(I,j) z^I w^j with |I| + 2j = m0.
#[derive(Clone, PartialEq, Debug)]
pub struct HoloCorrection {
    n: usize,
    m0: u32,
    terms: BTreeMap<(Vec<u32>, u32), CNum>,
}

impl HoloCorrection {
    pub fn new(n: usize, m0: u32) -> Self {
        HoloCorrection {
            n,
            m0,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m0(&self) -> u32 {
        self.m0
    }

    /// Errors unless |I| + 2j = m0 and I has length n.
    pub fn set(&mut self, i: &[u32], j: u32, c: CNum) -> Result<()> {
        if i.len() != self.n {
            return Err(Error::VariableCountMismatch {
                left: self.n,
                right: i.len(),
            });
        }
        let w = i.iter().sum::<u32>() + 2 * j;
        if w != self.m0 {
            return Err(Error::DimensionMismatch(format!(
                "term of weight {w} in a correction of weight {}",
                self.m0
            )));
        }
        if c.is_zero() {
            self.terms.remove(&(i.to_vec(), j));
        } else {
            self.terms.insert((i.to_vec(), j), c);
        }
        Ok(())
    }

    pub fn get(&self, i: &[u32], j: u32) -> CNum {
        self.terms
            .get(&(i.to_vec(), j))
            .cloned()
            .unwrap_or_else(CNum::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u32, &CNum)> {
        self.terms.iter().map(|((i, j), c)| (i.as_slice(), *j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// For even m0 the coefficient of the pure power w^{m0/2} has zero
    /// real part.
    pub fn is_normalized(&self) -> bool {
        if !self.m0.is_multiple_of(2) {
            return true;
        }
        self.get(&vec![0; self.n], self.m0 / 2).re.is_zero()
    }

    pub fn to_json(&self) -> Vec<CorrectionTermJson> {
        self.terms
            .iter()
            .map(|((i, j), c)| CorrectionTermJson {
                i: i.clone(),
                j: *j,
                re: fmt_rat(&c.re),
                im: fmt_rat(&c.im),
            })
            .collect()
    }
}

/// Wire form of one correction term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionTermJson {
    #[serde(rename = "I")]
    pub i: Vec<u32>,
    pub j: u32,
    pub re: String,
    pub im: String,
}

/// B(z, W) expanded and truncated at W's validity order. W should have no
/// constant term.
pub fn substitute_w(b: &HoloCorrection, w: &Jet) -> Result<Jet> {
    if b.n != w.n {
        return Err(Error::VariableCountMismatch {
            left: b.n,
            right: w.n,
        });
    }
    let n = w.n;
    let order = w.order;
    let max_j = b.terms.keys().map(|(_, j)| *j).max().unwrap_or(0);
    let mut powers = vec![Jet::constant(n, order, CNum::one())];
    for k in 1..=max_j as usize {
        let next = &powers[k - 1] * w;
        powers.push(next);
    }
    let mut out = Jet::zero(n, order);
    for ((i, j), c) in &b.terms {
        let idx = MultiIndex::new(i, &vec![0; n]);
        let term = powers[*j as usize].mul_monomial(&idx, c);
        out = &out + &term;
    }
    Ok(out)
}
