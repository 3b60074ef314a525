//! Leading-order objects built from H = E^(m): Phi_(j), Psi_(jk), the
//! reduced non-minimality system, and the slice coefficient tables with
//! their recursions.
//!
//! Table indices [t s r h] address the coefficient of
//! z_n^t z_1^s zbar_n^r zbar_1^h; any negative index reads as zero.

use std::collections::BTreeMap;

use num_integer::binomial;
use num_traits::{One, Zero};

use crate::algebra::{creal, rat_int, CNum, Rat};
use crate::error::{Error, Result};
use crate::manifold::w_jet;
use crate::series::{Jet, MultiIndex};

/// Extra validity headroom given to exact polynomials so that the degree
/// m+3 residuals stay inside the bookkeeping order.
const HEADROOM: u32 = 3;

fn top_degree(h: &Jet) -> u32 {
    h.terms().map(|(k, _)| k.degree()).max().unwrap_or(0)
}

/// Derivative of an exact polynomial, keeping its bookkeeping order.
fn d(x: &Jet, i: usize, barred: bool) -> Jet {
    x.diff(i, barred).exact_to(x.order())
}

/// Shared w_j, conj(w_j) for one H degree.
struct Ws {
    n: usize,
    w: Vec<Jet>,
    wb: Vec<Jet>,
}

impl Ws {
    fn new(lambda: &[Rat], order: u32) -> Self {
        let w: Vec<Jet> = (1..=lambda.len()).map(|j| w_jet(lambda, order, j)).collect();
        let wb = w.iter().map(Jet::conj).collect();
        Ws {
            n: lambda.len(),
            w,
            wb,
        }
    }

    fn w(&self, j: usize) -> &Jet {
        &self.w[j - 1]
    }

    fn wb(&self, j: usize) -> &Jet {
        &self.wb[j - 1]
    }

    /// |w_j|^2.
    fn abs2(&self, j: usize) -> Jet {
        self.w(j) * self.wb(j)
    }

    fn phi(&self, h: &Jet, j: usize) -> Jet {
        let n = self.n;
        &(self.w(n) * &d(h, j, true)) - &(self.w(j) * &d(h, n, true))
    }

    fn psi(&self, phi_j: &Jet, k: usize) -> Jet {
        let n = self.n;
        let a = &(self.w(n) * self.wb(n)) * &d(phi_j, k, false);
        let b = &(self.w(n) * self.wb(k)) * &d(phi_j, n, false);
        &(&a - &b) + &(self.wb(k) * phi_j)
    }
}

fn working(h: &Jet) -> (Jet, u32) {
    let order = top_degree(h) + HEADROOM;
    (h.exact_to(order), order)
}

/// Phi_(j) = w_n H_jbar - w_j H_nbar.
pub fn phi_of(h: &Jet, lambda: &[Rat], j: usize) -> Jet {
    let (h, order) = working(h);
    Ws::new(lambda, order).phi(&h, j)
}

/// Psi_(jk) = w_n wbar_n (Phi_j)_k - w_n wbar_k (Phi_j)_n + wbar_k Phi_j.
pub fn psi_of(h: &Jet, lambda: &[Rat], j: usize, k: usize) -> Jet {
    let (h, order) = working(h);
    let ws = Ws::new(lambda, order);
    ws.psi(&ws.phi(&h, j), k)
}

/// Residuals of the reduced system. `family` holds the (j,k) equations for
/// 1 <= j <= n-1, 2 <= k <= n-1 (the j = 1 rows are the first displayed
/// equation); `third` is the equation that survives for n = 2.
#[derive(Clone, Debug)]
pub struct AddNewResiduals {
    pub family: Vec<((usize, usize), Jet)>,
    pub third: Jet,
}

impl AddNewResiduals {
    pub fn all(&self) -> impl Iterator<Item = &Jet> {
        self.family.iter().map(|(_, j)| j).chain(std::iter::once(&self.third))
    }
}

pub fn addnew_residuals(h: &Jet, lambda: &[Rat]) -> AddNewResiduals {
    let n = lambda.len();
    let (h, order) = working(h);
    let ws = Ws::new(lambda, order);
    let phis: Vec<Jet> = (1..n).map(|j| ws.phi(&h, j)).collect();
    let psi11 = ws.psi(&phis[0], 1);
    let psi11_bar = psi11.conj();
    let abs_n = ws.abs2(n);
    let both = &abs_n + &ws.abs2(1);
    let mut family = Vec::new();
    for j in 1..n {
        for k in 2..n {
            let mut lhs = ws.wb(j) * ws.w(k);
            if j == k {
                lhs = &lhs + &abs_n;
            }
            let psi_jk = ws.psi(&phis[j - 1], k);
            family.push(((j, k), &(&lhs * &psi11_bar) - &(&both * &psi_jk.conj())));
        }
    }
    let cross = &(ws.wb(n) * &d(&psi11, 1, false)) - &(ws.wb(1) * &d(&psi11, n, false));
    let two = |j: usize| creal(&lambda[j - 1] * rat_int(2));
    let mix_n = (ws.w(n) * ws.wb(1)).scale(&two(n));
    let mix_1 = (ws.w(1) * ws.wb(n)).scale(&two(1));
    let mix = &mix_n - &mix_1;
    let third = &(&both * &cross) + &(&mix * &psi11);
    AddNewResiduals { family, third }
}

/// Which object a table describes; fixes its index total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    H,
    Phi,
    Psi,
}

impl TableKind {
    fn name(self) -> &'static str {
        match self {
            TableKind::H => "H",
            TableKind::Phi => "Phi",
            TableKind::Psi => "Psi",
        }
    }
}

/// Slice coefficients of H, Phi = Phi_(1) or Psi = Psi_(11).
#[derive(Clone, Debug)]
pub struct CoeffTable {
    kind: TableKind,
    m: u32,
    xi: Rat,
    eta: Rat,
    values: BTreeMap<[i64; 4], CNum>,
}

/// Wraps a coefficient read so recursions can be transcribed literally.
type Idx = [i64; 4];

impl CoeffTable {
    /// Reads the (z_1, z_n) slice of a homogeneous degree-m H.
    pub fn h_from_jet(h: &Jet, lambda: &[Rat], m: u32) -> Result<Self> {
        let n = lambda.len();
        if h.n() != n {
            return Err(Error::VariableCountMismatch {
                left: n,
                right: h.n(),
            });
        }
        let mut values = BTreeMap::new();
        for (idx, c) in h.terms() {
            if idx.degree() != m {
                return Err(Error::BadIndexTotal {
                    got: idx.degree() as i64,
                    want: m as i64,
                });
            }
            if let Some(key) = slice_key(idx) {
                values.insert(key, c.clone());
            }
        }
        Ok(Self::with_values(TableKind::H, m, lambda, values))
    }

    fn with_values(kind: TableKind, m: u32, lambda: &[Rat], values: BTreeMap<Idx, CNum>) -> Self {
        let two = rat_int(2);
        CoeffTable {
            kind,
            m,
            xi: &lambda[lambda.len() - 1] * &two,
            eta: &lambda[0] * &two,
            values,
        }
    }

    /// Table assembled from explicit entries (for building test inputs).
    pub fn from_entries(
        kind: TableKind,
        m: u32,
        lambda: &[Rat],
        entries: impl IntoIterator<Item = (Idx, CNum)>,
    ) -> Result<Self> {
        let mut t = Self::with_values(kind, m, lambda, BTreeMap::new());
        for (k, v) in entries {
            t.check_total(k)?;
            if !v.is_zero() {
                t.values.insert(k, v);
            }
        }
        Ok(t)
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn xi(&self) -> &Rat {
        &self.xi
    }

    pub fn eta(&self) -> &Rat {
        &self.eta
    }

    pub fn theta(&self) -> Rat {
        Rat::one() - &self.xi * &self.xi
    }

    /// Index total: m for H and Phi, m+1 for Psi.
    pub fn total(&self) -> i64 {
        match self.kind {
            TableKind::Psi => self.m as i64 + 1,
            _ => self.m as i64,
        }
    }

    fn check_total(&self, idx: Idx) -> Result<()> {
        let got: i64 = idx.iter().sum();
        if got != self.total() {
            return Err(Error::BadIndexTotal {
                got,
                want: self.total(),
            });
        }
        Ok(())
    }

    /// Zero for negative indices and absent entries.
    pub fn get(&self, idx: Idx) -> CNum {
        if idx.iter().any(|&x| x < 0) {
            return CNum::zero();
        }
        self.values.get(&idx).cloned().unwrap_or_else(CNum::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Idx, &CNum)> {
        self.values.iter()
    }

    /// Every nonnegative index with the right total.
    pub fn all_indices(&self) -> Vec<Idx> {
        let tot = self.total();
        let mut out = Vec::new();
        for t in 0..=tot {
            for s in 0..=tot - t {
                for r in 0..=tot - t - s {
                    out.push([t, s, r, tot - t - s - r]);
                }
            }
        }
        out
    }

    fn lambda_pair(&self) -> Vec<Rat> {
        let half = Rat::new(1.into(), 2.into());
        vec![&self.eta * &half, &self.xi * &half]
    }

    /// Phi table from an H table.
    pub fn phi_table(&self) -> Result<CoeffTable> {
        self.expect(TableKind::H)?;
        let mut t = Self::with_values(TableKind::Phi, self.m, &self.lambda_pair(), BTreeMap::new());
        for idx in t.all_indices() {
            let v = phi_value(self, idx);
            if !v.is_zero() {
                t.values.insert(idx, v);
            }
        }
        Ok(t)
    }

    /// Psi table from a Phi table.
    pub fn psi_table(&self) -> Result<CoeffTable> {
        self.expect(TableKind::Phi)?;
        let mut t = Self::with_values(TableKind::Psi, self.m, &self.lambda_pair(), BTreeMap::new());
        for idx in t.all_indices() {
            let v = psi_value(self, idx);
            if !v.is_zero() {
                t.values.insert(idx, v);
            }
        }
        Ok(t)
    }

    fn expect(&self, kind: TableKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Invalid(format!(
                "expected a {} table, got {}",
                kind.name(),
                self.kind.name()
            )));
        }
        Ok(())
    }
}

/// Slice index of a monomial, or None if it involves z_2..z_{n-1}.
pub fn slice_key(idx: &MultiIndex) -> Option<Idx> {
    let n = idx.n();
    let (a, b) = (idx.alpha(), idx.beta());
    if (1..n - 1).any(|i| a[i] != 0 || b[i] != 0) {
        return None;
    }
    Some([a[n - 1] as i64, a[0] as i64, b[n - 1] as i64, b[0] as i64])
}

/// Monomial for slice index [t s r h] in n variables.
pub fn slice_index(n: usize, [t, s, r, h]: Idx) -> MultiIndex {
    let mut a = vec![0u32; n];
    let mut b = vec![0u32; n];
    a[n - 1] = t as u32;
    a[0] = s as u32;
    b[n - 1] = r as u32;
    b[0] = h as u32;
    MultiIndex::new(&a, &b)
}

/// Accumulates c * value terms.
struct Acc(CNum);

impl Acc {
    fn new() -> Self {
        Acc(CNum::zero())
    }

    fn add(&mut self, c: Rat, v: CNum) {
        if !c.is_zero() && !v.is_zero() {
            self.0 += v * c;
        }
    }
}

fn ri(x: i64) -> Rat {
    rat_int(x)
}

fn phi_value(h: &CoeffTable, [t, s, r, hh]: Idx) -> CNum {
    let xi = h.xi.clone();
    let eta = h.eta.clone();
    let mut a = Acc::new();
    a.add(&xi * ri(hh + 1), h.get([t, s, r - 1, hh + 1]));
    a.add(ri(hh + 1), h.get([t - 1, s, r, hh + 1]));
    a.add(-ri(r + 1), h.get([t, s - 1, r + 1, hh]));
    a.add(-(&eta * ri(r + 1)), h.get([t, s, r + 1, hh - 1]));
    a.0
}

fn psi_value(phi: &CoeffTable, [t, s, r, h]: Idx) -> CNum {
    let xi = phi.xi.clone();
    let eta = phi.eta.clone();
    let one = Rat::one();
    let mut a = Acc::new();
    let s1 = ri(s + 1);
    a.add(&s1 * &xi, phi.get([t, s + 1, r - 2, h]));
    a.add(&s1 * (&one + &xi * &xi), phi.get([t - 1, s + 1, r - 1, h]));
    a.add(&s1 * &xi, phi.get([t - 2, s + 1, r, h]));
    a.add(-(&xi * ri(t + 1)), phi.get([t + 1, s, r - 1, h - 1]));
    a.add(-ri(t), phi.get([t, s, r, h - 1]));
    a.add(-(&xi * &eta * ri(t + 1)), phi.get([t + 1, s - 1, r - 1, h]));
    a.add(-(&eta * ri(t)), phi.get([t, s - 1, r, h]));
    a.add(one, phi.get([t, s, r, h - 1]));
    a.add(eta.clone(), phi.get([t, s - 1, r, h]));
    a.0
}

fn check_total(got: i64, want: i64) -> Result<()> {
    if got != want {
        return Err(Error::BadIndexTotal { got, want });
    }
    Ok(())
}

/// Phi_[tsrh] from the H table by the closed recursion.
pub fn phi_coeff(h: &CoeffTable, t: i64, s: i64, r: i64, hh: i64) -> Result<CNum> {
    h.expect(TableKind::H)?;
    check_total(t + s + r + hh, h.m as i64)?;
    Ok(phi_value(h, [t, s, r, hh]))
}

/// Psi_[tsrh] from the H table, through Phi.
pub fn psi_coeff(h: &CoeffTable, t: i64, s: i64, r: i64, hh: i64) -> Result<CNum> {
    check_total(t + s + r + hh, h.m as i64 + 1)?;
    Ok(psi_value(&h.phi_table()?, [t, s, r, hh]))
}

/// The combination of Psi values obtained by collecting the coefficient of
/// z_n^t z_1^(s-1) zbar_n^(r+3) zbar_1^h in the third reduced equation.
/// Requires t >= 0, s >= 1, r >= -3, h >= 0 with t + s + r + h = m + 1.
pub fn master_coeff_residual(h: &CoeffTable, t: i64, s: i64, r: i64, hh: i64) -> Result<CNum> {
    check_total(t + s + r + hh, h.m as i64 + 1)?;
    if t < 0 || s < 1 || r < -3 || hh < 0 {
        return Err(Error::Invalid(format!(
            "index [{t} {s} {r} {hh}] outside t>=0, s>=1, r>=-3, h>=0"
        )));
    }
    let psi = h.phi_table()?.psi_table()?;
    Ok(master_value(&psi, [t, s, r, hh]))
}

/// Same as [`master_coeff_residual`] on a precomputed Psi table.
pub fn master_value(psi: &CoeffTable, [t, s, r, h]: Idx) -> CNum {
    let p = |i: Idx| psi.get(i);
    let xi = psi.xi.clone();
    let eta = psi.eta.clone();
    let one = Rat::one();
    let two = ri(2);
    let xi2 = &xi * &xi;
    let eta2 = &eta * &eta;
    let (sr, tr) = (ri(s), ri(t));
    let mut a = Acc::new();

    a.add(&sr * &xi, p([t, s, r, h]));
    a.add(&sr * (&two * &xi2 + &one), p([t - 1, s, r + 1, h]));
    a.add(&sr * (&xi2 * &xi + &two * &xi), p([t - 2, s, r + 2, h]));
    a.add(&sr * &xi2, p([t - 3, s, r + 3, h]));

    a.add(&sr * &eta, p([t, s, r + 2, h - 2]));
    a.add(&sr * &eta * &xi, p([t - 1, s, r + 3, h - 2]));

    let c3 = (&one + &eta2) * ri(s - 1);
    a.add(c3.clone(), p([t, s - 1, r + 2, h - 1]));
    a.add(&c3 * &xi, p([t - 1, s - 1, r + 3, h - 1]));

    let c4 = ri(s - 2) * &eta;
    a.add(c4.clone(), p([t, s - 2, r + 2, h]));
    a.add(&c4 * &xi, p([t - 1, s - 2, r + 3, h]));

    a.add(-(ri(t + 1) * &xi), p([t + 1, s - 1, r + 1, h - 1]));
    a.add(-(&tr * (&one + &xi2)), p([t, s - 1, r + 2, h - 1]));
    a.add(-(ri(t - 1) * &xi), p([t - 1, s - 1, r + 3, h - 1]));

    a.add(-(&eta * ri(t + 1) * &xi), p([t + 1, s - 2, r + 1, h]));
    a.add(-(&eta * &tr * (&one + &xi2)), p([t, s - 2, r + 2, h]));
    a.add(-(&eta * ri(t - 1) * &xi), p([t - 1, s - 2, r + 3, h]));

    let t1 = ri(t + 1);
    a.add(-(&t1 * &eta), p([t + 1, s - 1, r + 3, h - 3]));
    a.add(-(&t1 * (&two * &eta2 + &one)), p([t + 1, s - 2, r + 3, h - 2]));
    a.add(-(&t1 * (&eta2 * &eta + &two * &eta)), p([t + 1, s - 3, r + 3, h - 1]));
    a.add(-(&t1 * &eta2), p([t + 1, s - 4, r + 3, h]));

    a.add(xi2.clone(), p([t, s - 1, r + 2, h - 1]));
    a.add(xi.clone(), p([t - 1, s - 1, r + 3, h - 1]));

    a.add(&xi * &eta * &xi, p([t, s - 2, r + 2, h]));
    a.add(&xi * &eta, p([t - 1, s - 2, r + 3, h]));

    a.add(-(&eta * &eta), p([t, s - 1, r + 2, h - 1]));
    a.add(-(&eta * &xi * &eta), p([t - 1, s - 1, r + 3, h - 1]));
    a.add(-eta.clone(), p([t, s - 2, r + 2, h]));
    a.add(-(&eta * &xi), p([t - 1, s - 2, r + 3, h]));
    a.0
}

fn binom(t: i64, k: i64) -> Rat {
    if k < 0 || t < 0 || k > t {
        return Rat::zero();
    }
    Rat::from_integer(binomial(num_bigint::BigInt::from(t), num_bigint::BigInt::from(k)))
}

/// X^(k)_[sh] = sum_{t=k}^{T-s-h} (-xi)^(T-t-s-h) C(t,k) X_[t s (T-t-s-h) h],
/// T the table's index total. Zero for negative k, s or h.
pub fn k_weighted(table: &CoeffTable, k: i64, s: i64, h: i64) -> CNum {
    if k < 0 || s < 0 || h < 0 {
        return CNum::zero();
    }
    let tot = table.total();
    let neg_xi = -table.xi.clone();
    let mut acc = CNum::zero();
    for t in k..=tot - s - h {
        let r = tot - t - s - h;
        let v = table.get([t, s, r, h]);
        if v.is_zero() {
            continue;
        }
        let w = num_traits::pow(neg_xi.clone(), r as usize) * binom(t, k);
        acc += v * w;
    }
    acc
}

/// Residuals of the three k-weighted identities that hold once the
/// vanishing premise is met at level h0 (h0 >= -1).
pub fn lemk_residuals(h: &Jet, lambda: &[Rat], h0: i64, k: i64, s: i64) -> Result<[CNum; 3]> {
    let m = top_degree(h);
    let ht = CoeffTable::h_from_jet(h, lambda, m)?;
    lemk_residuals_tables(&ht, h0, k, s)
}

/// Table form of [`lemk_residuals`].
pub fn lemk_residuals_tables(ht: &CoeffTable, h0: i64, k: i64, s: i64) -> Result<[CNum; 3]> {
    if ht.xi.is_zero() {
        return Err(Error::ZeroXi);
    }
    let phi = ht.phi_table()?;
    let psi = phi.psi_table()?;
    for (name, tab) in [("Psi", &psi), ("Phi", &phi)] {
        if let Some((idx, _)) = tab.entries().find(|(i, _)| i[3] <= h0) {
            return Err(premise(name, *idx));
        }
    }
    if let Some((idx, _)) = ht.entries().find(|(i, _)| i[1].max(i[3]) <= h0) {
        return Err(premise("H", *idx));
    }

    let m = ht.m as i64;
    let xi = ht.xi.clone();
    let eta = ht.eta.clone();
    let theta = ht.theta();
    let hk = |k: i64, s: i64, hh: i64| k_weighted(ht, k, s, hh);
    let fk = |k: i64, s: i64, hh: i64| k_weighted(&phi, k, s, hh);
    let pk = |k: i64, s: i64, hh: i64| k_weighted(&psi, k, s, hh);
    let g = h0 + 1;

    let mut rhs = Acc::new();
    rhs.add(ri(h0 + 2) * &theta, hk(k, s, h0 + 2));
    rhs.add(ri(h0 + 2), hk(k - 1, s, h0 + 2));
    let inv = Rat::one() / &xi;
    rhs.add(ri(m - s - h0 - k) * &inv, hk(k, s - 1, g));
    rhs.add(-(ri(k + 1) * &inv), hk(k + 1, s - 1, g));
    let ahexp = fk(k, s, g) - rhs.0;

    let mut rhs = Acc::new();
    rhs.add(ri(s + 1) * &xi * &theta, fk(k - 1, s + 1, g));
    rhs.add(ri(s + 1) * &xi, fk(k - 2, s + 1, g));
    rhs.add(-(&eta * ri(k + 1) * &theta), fk(k + 1, s - 1, g));
    rhs.add(-(&eta * ri(k - 1)), fk(k, s - 1, g));
    let baexp = pk(k, s, g) - rhs.0;

    let xi2 = &xi * &xi;
    let mut acc = Acc::new();
    acc.add(ri(s) * &xi2 * &theta, pk(k - 2, s, g));
    acc.add(ri(s) * &xi2, pk(k - 3, s, g));
    acc.add(-(&xi * &eta * ri(k - 1) * &theta), pk(k, s - 2, g));
    acc.add(-(&xi * &eta * ri(k + 1 - s)), pk(k - 1, s - 2, g));
    acc.add(-(ri(k + 1) * &eta * &eta), pk(k + 1, s - 4, g));
    Ok([ahexp, baexp, acc.0])
}

fn premise(table: &'static str, [t, s, r, h]: Idx) -> Error {
    Error::PremiseViolated { table, t, s, r, h }
}
