//! The manifold w = q + p + iE, its Bishop invariants and built-in fixtures.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{creal, fmt_rat, i_unit, parse_rat, rat, CNum, Rat};
use crate::error::{Error, Result};
use crate::series::{indices_of_degree, Jet, MultiIndex, TermJson, Valuation};

/// w = q + p + iE with q = sum |z_i|^2 + lambda_i (z_i^2 + zbar_i^2).
#[derive(Clone, PartialEq, Debug)]
pub struct ManifoldJet {
    n: usize,
    order: u32,
    lambda: Vec<Rat>,
    p: Jet,
    e: Jet,
}

/// First failing invariant found by [`ManifoldJet::validate`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monomial: Option<TermJson>,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)?;
        if let Some(m) = &self.monomial {
            write!(f, " at alpha={:?} beta={:?}", m.alpha, m.beta)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum BishopClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl BishopClass {
    pub fn of(lambda: &Rat) -> Self {
        let half = rat(1, 2);
        match lambda.cmp(&half) {
            std::cmp::Ordering::Less => BishopClass::Elliptic,
            std::cmp::Ordering::Equal => BishopClass::Parabolic,
            std::cmp::Ordering::Greater => BishopClass::Hyperbolic,
        }
    }
}

/// Result of moving the smallest non-parabolic invariant to position n.
#[derive(Clone, PartialEq, Debug)]
pub enum Reindex {
    /// `perm[i]` is the original (0-based) index of new variable i.
    Permuted { manifold: ManifoldJet, perm: Vec<usize> },
    NotApplicable,
}

/// Lowest-degree part of E.
#[derive(Clone, PartialEq, Debug)]
pub enum EOrder {
    FlatAlready,
    Order { m: u32, h: Jet },
}

fn term_json(idx: &MultiIndex, c: &CNum) -> TermJson {
    TermJson {
        alpha: idx.alpha().to_vec(),
        beta: idx.beta().to_vec(),
        re: fmt_rat(&c.re),
        im: fmt_rat(&c.im),
    }
}

impl ManifoldJet {
    /// Builds and validates. `p` and `e` are truncated to `order`; they must
    /// be valid at least that far.
    pub fn new(order: u32, lambda: Vec<Rat>, p: Jet, e: Jet) -> Result<Self> {
        for (name, j) in [("p", &p), ("E", &e)] {
            if j.order() < order {
                return Err(Error::Invalid(format!(
                    "{name} is valid to order {} but the manifold needs {order}",
                    j.order()
                )));
            }
        }
        let m = Self::raw(order, lambda, p.truncate(order), e.truncate(order));
        m.validate().map_err(|v| Error::Invalid(v.to_string()))?;
        Ok(m)
    }

    /// No validation; meant for callers that run [`Self::validate`] themselves.
    pub fn raw(order: u32, lambda: Vec<Rat>, p: Jet, e: Jet) -> Self {
        ManifoldJet {
            n: lambda.len(),
            order,
            lambda,
            p,
            e,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let bad = |field: &str, message: String, monomial| {
            Err(Violation {
                field: field.into(),
                message,
                monomial,
            })
        };
        if self.n < 2 {
            return bad("n", format!("need n >= 2, got {}", self.n), None);
        }
        if let Some(l) = self.lambda.iter().find(|l| l.is_negative()) {
            return bad("lambda", format!("negative invariant {l}"), None);
        }
        for (name, j) in [("p", &self.p), ("E", &self.e)] {
            if j.n() != self.n {
                return bad(
                    name,
                    format!("has {} variables, expected {}", j.n(), self.n),
                    None,
                );
            }
            if let Some((idx, c)) = j.first_term() {
                if idx.degree() < 3 {
                    return bad(name, format!("Ord({name}) < 3"), Some(term_json(idx, c)));
                }
            }
            if let Some(idx) = j.first_non_real() {
                let c = j.coeff_or_zero(idx);
                return bad(name, "not real".into(), Some(term_json(idx, &c)));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn lambda(&self) -> &[Rat] {
        &self.lambda
    }

    pub fn p(&self) -> &Jet {
        &self.p
    }

    pub fn e(&self) -> &Jet {
        &self.e
    }

    pub fn classify(&self) -> Vec<(Rat, BishopClass)> {
        self.lambda
            .iter()
            .map(|l| (l.clone(), BishopClass::of(l)))
            .collect()
    }

    /// The quadratic part q at the manifold's order.
    pub fn q(&self) -> Jet {
        quadric(&self.lambda, self.order)
    }

    /// G = q + p.
    pub fn g(&self) -> Jet {
        &self.q() + &self.p
    }

    /// G + iE.
    pub fn defining_series(&self) -> Jet {
        &self.g() + &self.e.scale(&i_unit())
    }

    pub fn order_of_e(&self) -> EOrder {
        match self.e.ord() {
            Valuation::Infinite => EOrder::FlatAlready,
            Valuation::Finite(m) => EOrder::Order {
                m,
                h: self.e.homog(m).expect("ord is within the validity order"),
            },
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> ManifoldJet {
        ManifoldJet {
            n: self.n,
            order: self.order,
            lambda: perm.iter().map(|&i| self.lambda[i].clone()).collect(),
            p: self.p.permuted(perm),
            e: self.e.permuted(perm),
        }
    }

    pub fn reindex_smallest_nonparabolic(&self) -> Reindex {
        let half = rat(1, 2);
        let pick = self
            .lambda
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != half)
            .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)));
        let Some((idx, _)) = pick else {
            return Reindex::NotApplicable;
        };
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.swap(idx, self.n - 1);
        Reindex::Permuted {
            manifold: self.permuted(&perm),
            perm,
        }
    }

    /// Same manifold with new p and E, keeping n, lambda and order.
    pub fn with_parts(&self, p: Jet, e: Jet) -> ManifoldJet {
        ManifoldJet {
            n: self.n,
            order: self.order,
            lambda: self.lambda.clone(),
            p: p.truncate(self.order),
            e: e.truncate(self.order),
        }
    }

    pub fn to_manifest(&self) -> Manifest {
        Manifest {
            n: self.n,
            order: self.order,
            lambda: self.lambda.iter().map(fmt_rat).collect(),
            p: self.p.to_terms_json(),
            e: self.e.to_terms_json(),
        }
    }

    pub fn from_manifest(m: &Manifest) -> Result<Self> {
        if m.lambda.len() != m.n {
            return Err(Error::Invalid(format!(
                "manifest lists {} invariants for n = {}",
                m.lambda.len(),
                m.n
            )));
        }
        let lambda = m.lambda.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>>>()?;
        let p = Jet::from_terms_json(m.n, m.order, &m.p)?;
        let e = Jet::from_terms_json(m.n, m.order, &m.e)?;
        Self::new(m.order, lambda, p, e)
    }
}

/// q = sum_i |z_i|^2 + lambda_i (z_i^2 + zbar_i^2).
pub fn quadric(lambda: &[Rat], order: u32) -> Jet {
    let n = lambda.len();
    let mut terms = Vec::new();
    if order >= 2 {
        for (i, l) in lambda.iter().enumerate() {
            let mut a = vec![0; n];
            a[i] = 1;
            terms.push((MultiIndex::new(&a, &a), CNum::one()));
            let mut two = vec![0; n];
            two[i] = 2;
            let zero = vec![0; n];
            terms.push((MultiIndex::new(&two, &zero), creal(l.clone())));
            terms.push((MultiIndex::new(&zero, &two), creal(l.clone())));
        }
    }
    Jet::from_terms(n, order, terms).expect("quadric terms fit")
}

/// w_j = z_j + 2 lambda_j zbar_j (1-based j).
pub fn w_jet(lambda: &[Rat], order: u32, j: usize) -> Jet {
    let n = lambda.len();
    let two_l = creal(&lambda[j - 1] * Rat::from_integer(2.into()));
    &Jet::var(n, order, j, false) + &Jet::var(n, order, j, true).scale(&two_l)
}

/// Wire form of a manifold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub n: usize,
    pub order: u32,
    pub lambda: Vec<String>,
    pub p: Vec<TermJson>,
    #[serde(rename = "E")]
    pub e: Vec<TermJson>,
}

/// The cubic non-minimal family in two variables:
/// p + iE = mu1|z1|^2(z1 + l1 zbar1) + mu2|z2|^2(z2 + l2 zbar2)
///        + mu1 z1(|z2|^2 + l2 zbar2^2) + mu2 z2(|z1|^2 + l1 zbar1^2).
pub fn cubic_nonminimal(l1: Rat, l2: Rat, mu1: CNum, mu2: CNum, order: u32) -> Result<ManifoldJet> {
    let f = cubic_f(&l1, &l2, &mu1, &mu2, order);
    ManifoldJet::new(order, vec![l1, l2], f.re_part(), f.im_part())
}

fn cubic_f(l1: &Rat, l2: &Rat, mu1: &CNum, mu2: &CNum, order: u32) -> Jet {
    let mono = |a: [u32; 2], b: [u32; 2], c: CNum| Jet::monomial(2, order, &a, &b, c);
    let one = CNum::one;
    let l1c = creal(l1.clone());
    let l2c = creal(l2.clone());
    let part1 = &mono([2, 0], [1, 0], one()) + &mono([1, 0], [2, 0], l1c.clone());
    let part2 = &mono([0, 2], [0, 1], one()) + &mono([0, 1], [0, 2], l2c.clone());
    let part3 = &mono([1, 1], [0, 1], one()) + &mono([1, 0], [0, 2], l2c);
    let part4 = &mono([1, 1], [1, 0], one()) + &mono([0, 1], [2, 0], l1c);
    let mut f = part1.scale(mu1);
    f = &f + &part2.scale(mu2);
    f = &f + &part3.scale(mu1);
    &f + &part4.scale(mu2)
}

/// E = sum b_(j,l) z1^j zbar2^l + conj, with j, l >= 2, lambda = (0, 0)
/// and p = 0. Adding the conjugate makes E real.
pub fn hy2_obstruction(b: &BTreeMap<(u32, u32), CNum>, order: u32) -> Result<ManifoldJet> {
    let mut e = Jet::zero(2, order);
    for (&(j, l), c) in b {
        if j < 2 || l < 2 {
            return Err(Error::Invalid(format!(
                "b table index ({j}, {l}) needs both entries >= 2"
            )));
        }
        let t = Jet::monomial(2, order, &[j, 0], &[0, l], c.clone());
        e = &e + &t;
        e = &e + &t.conj();
    }
    ManifoldJet::new(order, vec![Rat::zero(), Rat::zero()], Jet::zero(2, order), e)
}

/// Seeded random real homogeneous degree-m E with small rational
/// coefficients and p = 0.
pub fn appendix_random(seed: u64, m: u32, lambda: Vec<Rat>, order: u32) -> Result<ManifoldJet> {
    let n = lambda.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-6..=6), rng.gen_range(1..=4));
    let mut terms = Vec::new();
    for idx in indices_of_degree(n, m) {
        let sw = idx.swapped();
        match idx.cmp(&sw) {
            std::cmp::Ordering::Less => {
                let c = CNum::new(draw(&mut rng), draw(&mut rng));
                terms.push((sw, c.conj()));
                terms.push((idx, c));
            }
            std::cmp::Ordering::Equal => terms.push((idx, creal(draw(&mut rng)))),
            std::cmp::Ordering::Greater => {}
        }
    }
    let e = Jet::from_terms(n, order.max(m), terms)?;
    ManifoldJet::new(order, lambda, Jet::zero(n, order), e.truncate(order))
}

/// Named fixture with string parameters, as used by the command line.
pub fn fixture(name: &str, params: &BTreeMap<String, String>) -> Result<ManifoldJet> {
    let get = |k: &str| params.get(k).map(String::as_str);
    let rat_or = |k: &str, d: Rat| get(k).map_or(Ok(d), parse_rat);
    let u32_or = |k: &str, d: u32| {
        get(k).map_or(Ok(d), |s| {
            s.parse::<u32>()
                .map_err(|_| Error::Parse(format!("{k}: not a nonnegative integer: {s:?}")))
        })
    };
    match name {
        "cubic_nonminimal" => {
            let mu1 = get("mu1").map_or(Ok(CNum::one()), parse_complex)?;
            let mu2 = get("mu2").map_or(Ok(creal(rat(2, 1))), parse_complex)?;
            cubic_nonminimal(
                rat_or("lambda1", Rat::zero())?,
                rat_or("lambda2", rat(1, 4))?,
                mu1,
                mu2,
                u32_or("order", 9)?,
            )
        }
        "hy2_obstruction" => {
            let mut b = BTreeMap::new();
            match get("b") {
                None => {
                    b.insert((2, 2), CNum::one());
                }
                Some(spec) => {
                    for entry in spec.split(';').filter(|s| !s.trim().is_empty()) {
                        let parts: Vec<&str> = entry.split(',').map(str::trim).collect();
                        if parts.len() < 3 || parts.len() > 4 {
                            return Err(Error::Parse(format!(
                                "b entry must be j,l,re[,im]: {entry:?}"
                            )));
                        }
                        let j = parts[0].parse::<u32>().map_err(|_| Error::Parse(entry.into()))?;
                        let l = parts[1].parse::<u32>().map_err(|_| Error::Parse(entry.into()))?;
                        let im = parts.get(3).map_or(Ok(Rat::zero()), |s| parse_rat(s))?;
                        b.insert((j, l), CNum::new(parse_rat(parts[2])?, im));
                    }
                }
            }
            hy2_obstruction(&b, u32_or("order", 10)?)
        }
        "appendix_random" => {
            let m = u32_or("m", 3)?;
            let lambda = match get("lambda") {
                None => vec![Rat::zero(), rat(1, 4)],
                Some(s) => s.split(',').map(parse_rat).collect::<Result<Vec<_>>>()?,
            };
            let seed = get("seed").map_or(Ok(0u64), |s| {
                s.parse::<u64>()
                    .map_err(|_| Error::Parse(format!("seed: {s:?}")))
            })?;
            appendix_random(seed, m, lambda, u32_or("order", m + 4)?)
        }
        other => Err(Error::UnknownFixture(other.into())),
    }
}

/// "re" or "re,im".
pub fn parse_complex(s: &str) -> Result<CNum> {
    match s.split_once(',') {
        None => Ok(creal(parse_rat(s)?)),
        Some((re, im)) => Ok(CNum::new(parse_rat(re)?, parse_rat(im)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(v: &[(i64, i64)]) -> Vec<Rat> {
        v.iter().map(|&(a, b)| rat(a, b)).collect()
    }

    #[test]
    fn validation_reports() {
        let ok = ManifoldJet::new(5, lam(&[(0, 1), (1, 4)]), Jet::zero(2, 5), Jet::zero(2, 5));
        assert!(ok.is_ok());
        let sq = Jet::monomial(2, 5, &[2, 0], &[0, 0], CNum::one());
        let e = &sq + &sq.conj();
        let m = ManifoldJet::raw(5, lam(&[(0, 1), (0, 1)]), Jet::zero(2, 5), e);
        let v = m.validate().unwrap_err();
        assert!(v.message.contains("Ord(E) < 3"));
        let e = Jet::monomial(2, 5, &[3, 0], &[0, 0], CNum::one());
        let m = ManifoldJet::raw(5, lam(&[(0, 1), (0, 1)]), Jet::zero(2, 5), e);
        assert_eq!(m.validate().unwrap_err().message, "not real");
    }

    #[test]
    fn classes() {
        assert_eq!(BishopClass::of(&rat(0, 1)), BishopClass::Elliptic);
        assert_eq!(BishopClass::of(&rat(1, 2)), BishopClass::Parabolic);
        assert_eq!(BishopClass::of(&rat(3, 4)), BishopClass::Hyperbolic);
    }

    #[test]
    fn reindexing() {
        let z = || Jet::zero(2, 4);
        let m = ManifoldJet::new(4, lam(&[(0, 1), (1, 4)]), z(), z()).unwrap();
        let Reindex::Permuted { manifold, perm } = m.reindex_smallest_nonparabolic() else {
            panic!()
        };
        assert_eq!(manifold.lambda(), &lam(&[(1, 4), (0, 1)])[..]);
        assert_eq!(perm, vec![1, 0]);
        let m = ManifoldJet::new(4, lam(&[(1, 2), (1, 2)]), z(), z()).unwrap();
        assert_eq!(m.reindex_smallest_nonparabolic(), Reindex::NotApplicable);
        let m = ManifoldJet::new(4, lam(&[(1, 3), (1, 3)]), z(), z()).unwrap();
        let Reindex::Permuted { perm, .. } = m.reindex_smallest_nonparabolic() else {
            panic!()
        };
        assert_eq!(perm, vec![1, 0]);
    }

    #[test]
    fn hy2_fixture_shape() {
        let m = fixture("hy2_obstruction", &BTreeMap::new()).unwrap();
        let EOrder::Order { m: deg, h } = m.order_of_e() else { panic!() };
        assert_eq!(deg, 4);
        assert_eq!(h.len(), 2);
        assert_eq!(
            h.coeff(&MultiIndex::new(&[2, 0], &[0, 2])).unwrap(),
            CNum::one()
        );
        assert!(matches!(
            fixture("nope", &BTreeMap::new()),
            Err(Error::UnknownFixture(_))
        ));
    }

    #[test]
    fn flat_and_manifest_round_trip() {
        let z = || Jet::zero(3, 5);
        let m = ManifoldJet::new(5, lam(&[(0, 1), (1, 4), (2, 1)]), z(), z()).unwrap();
        assert_eq!(m.order_of_e(), EOrder::FlatAlready);
        let r = appendix_random(7, 3, lam(&[(0, 1), (1, 4)]), 6).unwrap();
        let back = ManifoldJet::from_manifest(&r.to_manifest()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.defining_series().im_part(), *r.e());
    }
}
