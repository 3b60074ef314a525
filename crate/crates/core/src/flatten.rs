//! Order-by-order normal form, the formal flattening driver, and the exact
//! rigidity kernel of the normal form combined with the reduced system.
//!
//! Case table for lambda_n != 0, with m0 = 6 mhat + delta:
//!
//! | m0 mod 6 | delta |
//! |----------|-------|
//! | 3        | -3    |
//! | 4        | -2    |
//! | 5        | -1    |
//! | 0        | 0     |
//! | 1        | 1     |
//! | 2        | 2     |

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{creal, fmt_rat, i_unit, rat, solve_linear, CNum, Matrix, Rat, RowEchelon};
use crate::error::{Error, Result};
use crate::leading::addnew_residuals;
use crate::manifold::{quadric, ManifoldJet};
use crate::series::{
    compositions, indices_of_degree, substitute_w, CorrectionTermJson, HoloCorrection, Jet,
    MultiIndex, TermJson,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormalCase {
    LambdaZero,
    Delta(i8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ConstraintKind {
    Zero,
    RealPart,
}

/// A condition on the coefficient of z^alpha zbar^beta in E^(m0). Stored
/// with (alpha, beta) not above its swap, since E is real.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub index: MultiIndex,
}

impl Constraint {
    fn new(kind: ConstraintKind, alpha: &[u32], beta: &[u32]) -> Self {
        let idx = MultiIndex::new(alpha, beta);
        let sw = idx.swapped();
        Constraint {
            kind,
            index: if sw < idx { sw } else { idx },
        }
    }

    /// Real conditions this constraint imposes.
    pub fn real_rows(&self) -> usize {
        match self.kind {
            ConstraintKind::Zero if !self.index.is_diagonal() => 2,
            _ => 1,
        }
    }

    fn values(&self, c: &CNum) -> Vec<Rat> {
        match self.kind {
            ConstraintKind::Zero if !self.index.is_diagonal() => vec![c.re.clone(), c.im.clone()],
            _ => vec![c.re.clone()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormSpec {
    pub n: usize,
    pub m0: u32,
    pub case: NormalCase,
    pub constraints: Vec<Constraint>,
}

impl NormalFormSpec {
    pub fn real_rows(&self) -> usize {
        self.constraints.iter().map(Constraint::real_rows).sum()
    }

    /// The constrained real quantities of a jet's degree-m0 coefficients.
    pub fn values(&self, e: &Jet) -> Vec<Rat> {
        self.constraints
            .iter()
            .flat_map(|c| c.values(&e.coeff_or_zero(&c.index)))
            .collect()
    }

    /// True if every condition holds exactly.
    pub fn is_satisfied_by(&self, e: &Jet) -> bool {
        self.values(e).iter().all(Zero::is_zero)
    }
}

/// delta and mhat with m0 = 6 mhat + delta, delta in -3..=2.
pub fn case_split(m0: u32) -> (i8, i64) {
    let delta: i8 = match m0 % 6 {
        3 => -3,
        4 => -2,
        5 => -1,
        r => r as i8,
    };
    (delta, (m0 as i64 - delta as i64) / 6)
}

fn en(n: usize, k: usize, times: i64) -> Vec<u32> {
    let mut v = vec![0; n];
    v[k] = times as u32;
    v
}

fn add(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Conditions on E^(m0) that fix the correction of weight m0 uniquely.
pub fn normal_target(n: usize, m0: u32, lambda_n_is_zero: bool) -> NormalFormSpec {
    let mut set: BTreeSet<Constraint> = BTreeSet::new();
    let zero = vec![0u32; n];
    let last = n - 1;
    for i in compositions(n, m0) {
        set.insert(Constraint::new(ConstraintKind::Zero, &i, &zero));
    }
    // E_(t e_n + J, s e_n) = 0 for t >= s, J != 0 in the first n-1 variables
    for s in 0..=m0 {
        for t in s..=m0 - s {
            let jdeg = m0 - s - t;
            if jdeg == 0 {
                continue;
            }
            for j in compositions(n - 1, jdeg) {
                let mut alpha = j.clone();
                alpha.push(t);
                set.insert(Constraint::new(ConstraintKind::Zero, &alpha, &en(n, last, s as i64)));
            }
        }
    }
    let pure = |t: i64| (en(n, last, t), en(n, last, m0 as i64 - t));
    let case = if lambda_n_is_zero {
        for t in 0..=m0 as i64 {
            if t >= m0 as i64 - t {
                let (a, b) = pure(t);
                set.insert(Constraint::new(ConstraintKind::Zero, &a, &b));
            }
        }
        NormalCase::LambdaZero
    } else {
        let (delta, mh) = case_split(m0);
        let m0i = m0 as i64;
        let (first_lo, second_lo, second_hi) = match delta {
            -3 => (4 * mh - 1, 2 * mh - 2, 3 * mh - 3),
            -2 => (4 * mh - 1, 2 * mh - 1, 3 * mh - 3),
            -1 => (4 * mh, 2 * mh - 1, 3 * mh - 2),
            0 => (4 * mh + 1, 2 * mh - 1, 3 * mh - 2),
            1 => (4 * mh + 1, 2 * mh, 3 * mh - 1),
            _ => (4 * mh + 2, 2 * mh, 3 * mh - 1),
        };
        for t in first_lo.max(0)..=m0i - 1 {
            let (a, b) = pure(t);
            set.insert(Constraint::new(ConstraintKind::Zero, &a, &b));
        }
        let e1 = en(n, 0, 1);
        for t in second_lo.max(0)..=second_hi {
            let b_exp = m0i - 2 * t - 3;
            if b_exp < 0 {
                continue;
            }
            let a = add(&en(n, last, 2 * t + 1), &e1);
            let b = add(&en(n, last, b_exp), &e1);
            set.insert(Constraint::new(ConstraintKind::Zero, &a, &b));
        }
        let re = match delta {
            -2 => Some((
                add(&en(n, last, 4 * mh - 3), &e1),
                add(&en(n, last, 2 * mh - 1), &e1),
            )),
            0 => Some(pure(4 * mh)),
            2 => Some(pure(4 * mh + 1)),
            _ => None,
        };
        if let Some((a, b)) = re {
            let c = Constraint::new(ConstraintKind::RealPart, &a, &b);
            let stronger = Constraint {
                kind: ConstraintKind::Zero,
                index: c.index.clone(),
            };
            if !set.contains(&stronger) {
                set.insert(c);
            }
        }
        NormalCase::Delta(delta)
    };
    NormalFormSpec {
        n,
        m0,
        case,
        constraints: set.into_iter().collect(),
    }
}

/// Real dimension of the weight-m0 corrections with Re b_(0, m0/2) = 0.
pub fn correction_dim(n: usize, m0: u32) -> usize {
    let count: usize = (0..=m0 / 2)
        .map(|j| compositions(n, m0 - 2 * j).len())
        .sum();
    2 * count - usize::from(m0.is_multiple_of(2))
}

/// Real coordinates of a correction: (I, j, imaginary?) in a fixed order.
fn correction_coords(n: usize, m0: u32) -> Vec<(Vec<u32>, u32, bool)> {
    let mut out = Vec::new();
    for j in 0..=m0 / 2 {
        for i in compositions(n, m0 - 2 * j) {
            if 2 * j != m0 {
                out.push((i.clone(), j, false));
            }
            out.push((i, j, true));
        }
    }
    out
}

/// Linear map from correction coordinates to the constrained coefficients
/// of Im B(z, q) in degree m0.
pub fn normalization_map(m: &ManifoldJet, m0: u32) -> Matrix<Rat> {
    normalization_map_for(m.lambda(), m0).0
}

fn normalization_map_for(lambda: &[Rat], m0: u32) -> (Matrix<Rat>, NormalFormSpec) {
    let n = lambda.len();
    let spec = normal_target(n, m0, lambda[n - 1].is_zero());
    let q = quadric(lambda, m0);
    let coords = correction_coords(n, m0);
    let mut qpow = vec![Jet::constant(n, m0, CNum::one())];
    for j in 1..=m0 / 2 {
        let next = &qpow[j as usize - 1] * &q;
        qpow.push(next);
    }
    let zero = vec![0; n];
    let cols: Vec<Vec<Rat>> = coords
        .iter()
        .map(|(i, j, imag)| {
            let p = qpow[*j as usize].mul_monomial(&MultiIndex::new(i, &zero), &CNum::one());
            let im = if *imag { p.re_part() } else { p.im_part() };
            spec.values(&im)
        })
        .collect();
    let rows = spec.real_rows();
    let map = Matrix::from_fn(rows, cols.len(), |r, c| cols[c][r].clone());
    (map, spec)
}

/// Removes the constrained part of E^(m0) with w' = w + B(z, w).
pub fn normalize_order(m: &ManifoldJet, m0: u32) -> Result<(ManifoldJet, HoloCorrection)> {
    if m0 > m.order() {
        return Err(Error::OrderExceeded {
            degree: m0,
            order: m.order(),
        });
    }
    let n = m.n();
    let (map, spec) = normalization_map_for(m.lambda(), m0);
    let target = m.e().homog(m0)?;
    let rhs: Vec<Rat> = spec.values(&target).into_iter().map(|v| -v).collect();
    let mut b = HoloCorrection::new(n, m0);
    if rhs.iter().all(Zero::is_zero) {
        return Ok((m.clone(), b));
    }
    let x = solve_linear(&map, &rhs)?.ok_or(Error::SingularSystem(m0))?;
    let coords = correction_coords(n, m0);
    let mut acc: BTreeMap<(Vec<u32>, u32), CNum> = BTreeMap::new();
    for ((i, j, imag), v) in coords.into_iter().zip(x) {
        let c = acc.entry((i, j)).or_insert_with(CNum::zero);
        if imag {
            c.im = v;
        } else {
            c.re = v;
        }
    }
    for ((i, j), c) in acc {
        b.set(&i, j, c)?;
    }
    Ok((apply_correction(m, &b)?, b))
}

/// New manifold after w' = w + B(z, w): D' = D + B(z, D) with D = G + iE.
pub fn apply_correction(m: &ManifoldJet, b: &HoloCorrection) -> Result<ManifoldJet> {
    if b.is_zero() {
        return Ok(m.clone());
    }
    if b.m0() < 3 {
        return Err(Error::Invalid(format!(
            "correction weight {} is below 3",
            b.m0()
        )));
    }
    let d = m.defining_series();
    let d2 = &d + &substitute_w(b, &d)?;
    let p = &d2.re_part() - &m.q();
    Ok(m.with_parts(p, d2.im_part()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Flattened(u32),
    Obstructed { m: u32, h: Jet },
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlattenReport {
    pub reached: u32,
    pub corrections: Vec<HoloCorrection>,
    pub outcome: Outcome,
    pub manifold: ManifoldJet,
}

#[derive(Serialize)]
struct CorrectionJson {
    m0: u32,
    terms: Vec<CorrectionTermJson>,
}

#[derive(Serialize)]
struct FlattenJson {
    outcome: &'static str,
    order: u32,
    corrections: Vec<CorrectionJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    obstruction: Option<Vec<TermJson>>,
}

impl FlattenReport {
    pub fn to_json(&self) -> serde_json::Value {
        let (outcome, order, obstruction) = match &self.outcome {
            Outcome::Flattened(n) => ("Flattened", *n, None),
            Outcome::Obstructed { m, h } => ("Obstructed", *m, Some(h.to_terms_json())),
            Outcome::NotApplicable => ("NotApplicable", self.reached, None),
        };
        serde_json::to_value(FlattenJson {
            outcome,
            order,
            corrections: self
                .corrections
                .iter()
                .map(|b| CorrectionJson {
                    m0: b.m0(),
                    terms: b.to_json(),
                })
                .collect(),
            obstruction,
        })
        .expect("report serializes")
    }
}

/// Normalizes orders 3..=to in turn and stops at the first order whose
/// normalized E^(m) is nonzero.
pub fn flatten_to_order(m: &ManifoldJet, to: u32) -> Result<FlattenReport> {
    if to > m.order() {
        return Err(Error::OrderExceeded {
            degree: to,
            order: m.order(),
        });
    }
    let half = rat(1, 2);
    if m.lambda().iter().all(|l| *l == half) {
        return Ok(FlattenReport {
            reached: 2,
            corrections: Vec::new(),
            outcome: Outcome::NotApplicable,
            manifold: m.clone(),
        });
    }
    let mut cur = m.clone();
    let mut corrections = Vec::new();
    for deg in 3..=to {
        let (next, b) = normalize_order(&cur, deg)?;
        cur = next;
        corrections.push(b);
        let h = cur.e().homog(deg)?;
        if !h.is_zero() {
            return Ok(FlattenReport {
                reached: deg - 1,
                corrections,
                outcome: Outcome::Obstructed { m: deg, h },
                manifold: cur,
            });
        }
    }
    Ok(FlattenReport {
        reached: to,
        corrections,
        outcome: Outcome::Flattened(to),
        manifold: cur,
    })
}

/// Real basis of the real homogeneous degree-m polynomials: for each
/// monomial below its swap, m + conj(m) and i m - i conj(m); diagonal
/// monomials alone.
pub fn real_basis(n: usize, m: u32) -> Vec<Jet> {
    let mut out = Vec::new();
    for idx in indices_of_degree(n, m) {
        let sw = idx.swapped();
        if idx == sw {
            out.push(Jet::from_terms(n, m, [(idx, CNum::one())]).expect("fits"));
        } else if idx < sw {
            let one = CNum::one();
            out.push(Jet::from_terms(n, m, [(idx.clone(), one.clone()), (sw.clone(), one)]).expect("fits"));
            let i = i_unit();
            out.push(Jet::from_terms(n, m, [(idx, i.clone()), (sw, -i)]).expect("fits"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityReport {
    pub n: usize,
    pub lambda: Vec<Rat>,
    pub m: u32,
    pub unknowns: usize,
    pub rows_examined: usize,
    pub rank: usize,
    pub basis: Vec<Jet>,
}

impl RigidityReport {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "lambda": self.lambda.iter().map(fmt_rat).collect::<Vec<_>>(),
            "degree": self.m,
            "unknowns": self.unknowns,
            "rows_examined": self.rows_examined,
            "rank": self.rank,
            "dimension": self.dimension(),
            "basis": self.basis.iter().map(Jet::to_terms_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum RowKey {
    Residual(usize, MultiIndex, bool),
}

/// Exact kernel of {normal-form conditions at degree m} together with the
/// reduced non-minimality system on real homogeneous degree-m H.
pub fn rigidity_kernel(lambda: &[Rat], m: u32) -> Result<RigidityReport> {
    let n = lambda.len();
    if n < 2 {
        return Err(Error::Invalid(format!("need n >= 2, got {n}")));
    }
    let half = rat(1, 2);
    if lambda.iter().all(|l| *l == half) {
        return Err(Error::NotApplicable("every invariant is parabolic".into()));
    }
    let ln = &lambda[n - 1];
    if *ln == half || lambda.iter().any(|l| *l != half && l < ln) {
        return Err(Error::Invalid(
            "lambda_n must be the smallest non-parabolic invariant; reindex first".into(),
        ));
    }
    let spec = normal_target(n, m, ln.is_zero());
    let basis = real_basis(n, m);
    let cols = basis.len();
    let mut ech: RowEchelon<Rat> = RowEchelon::new(cols);
    let mut examined = 0;

    let nf_cols: Vec<Vec<Rat>> = basis.iter().map(|h| spec.values(h)).collect();
    for r in 0..spec.real_rows() {
        examined += 1;
        ech.push((0..cols).map(|c| nf_cols[c][r].clone()).collect())?;
        if ech.is_full_rank() {
            break;
        }
    }
    if !ech.is_full_rank() {
        let mut rows: BTreeMap<RowKey, Vec<Rat>> = BTreeMap::new();
        for (c, h) in basis.iter().enumerate() {
            let res = addnew_residuals(h, lambda);
            for (ri, jet) in res.all().enumerate() {
                for (idx, v) in jet.terms() {
                    for (imag, part) in [(false, &v.re), (true, &v.im)] {
                        if part.is_zero() {
                            continue;
                        }
                        rows.entry(RowKey::Residual(ri, idx.clone(), imag))
                            .or_insert_with(|| vec![Rat::zero(); cols])[c] = part.clone();
                    }
                }
            }
        }
        for row in rows.into_values() {
            examined += 1;
            ech.push(row)?;
            if ech.is_full_rank() {
                break;
            }
        }
    }
    let kernel = ech
        .kernel_basis()
        .into_iter()
        .map(|v| {
            let mut h = Jet::zero(n, m);
            for (c, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    h = &h + &basis[c].scale(&creal(x.clone()));
                }
            }
            h
        })
        .collect();
    Ok(RigidityReport {
        n,
        lambda: lambda.to_vec(),
        m,
        unknowns: cols,
        rows_examined: examined,
        rank: ech.rank(),
        basis: kernel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(a: [u32; 2], b: [u32; 2]) -> MultiIndex {
        let i = MultiIndex::new(&a, &b);
        let s = i.swapped();
        if s < i {
            s
        } else {
            i
        }
    }

    #[test]
    fn cubic_targets_two_variables() {
        // variable 1 is z_1, variable 2 is z_n
        let want_common = [
            idx([0, 3], [0, 0]),
            idx([1, 2], [0, 0]),
            idx([2, 1], [0, 0]),
            idx([3, 0], [0, 0]),
            idx([1, 1], [0, 1]),
        ];
        let spec = normal_target(2, 3, false);
        let mut want: Vec<MultiIndex> = want_common.to_vec();
        want.push(idx([1, 1], [1, 0]));
        want.sort();
        let got: Vec<MultiIndex> = spec.constraints.iter().map(|c| c.index.clone()).collect();
        assert_eq!(got, want);
        let spec0 = normal_target(2, 3, true);
        let mut want0: Vec<MultiIndex> = want_common.to_vec();
        want0.push(idx([0, 2], [0, 1]));
        want0.sort();
        let got0: Vec<MultiIndex> = spec0.constraints.iter().map(|c| c.index.clone()).collect();
        assert_eq!(got0, want0);
    }

    #[test]
    fn counts_match_dimension() {
        assert_eq!(correction_dim(2, 3), 12);
        assert_eq!(correction_dim(2, 4), 17);
        assert_eq!(normal_target(2, 3, false).real_rows(), 12);
        assert_eq!(normal_target(2, 4, false).real_rows(), 17);
    }

    #[test]
    fn case_table() {
        assert_eq!(case_split(3), (-3, 1));
        assert_eq!(case_split(6), (0, 1));
        assert_eq!(case_split(8), (2, 1));
        assert_eq!(case_split(9), (-3, 2));
    }
}
