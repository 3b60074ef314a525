//! Structured binomial matrices whose nonsingularity closes the rigidity
//! argument, with exact determinants and their factored forms.
//!
//! All indices i, j are 1-based. Binomials C(a, b) are zero for b < 0 or
//! b > a, negative a included.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{det_exact, det_poly, fmt_rat, rat_int, Matrix, Rat, UniPoly};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MatrixKind {
    D,
    S,
    Rplus,
    Rminus,
    N,
    T,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for MatrixKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "D" => MatrixKind::D,
            "S" => MatrixKind::S,
            "Rplus" => MatrixKind::Rplus,
            "Rminus" => MatrixKind::Rminus,
            "N" => MatrixKind::N,
            "T" => MatrixKind::T,
            _ => return Err(Error::Parse(format!("unknown matrix kind {s:?}"))),
        })
    }
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 6] = [
        MatrixKind::D,
        MatrixKind::S,
        MatrixKind::Rplus,
        MatrixKind::Rminus,
        MatrixKind::N,
        MatrixKind::T,
    ];

    fn min_mhat(self) -> usize {
        match self {
            MatrixKind::D | MatrixKind::S => 1,
            _ => 2,
        }
    }

    pub fn size(self, mhat: usize) -> usize {
        match self {
            MatrixKind::D | MatrixKind::S => mhat,
            MatrixKind::T => 2 * mhat - 2,
            _ => 2 * mhat - 1,
        }
    }
}

pub fn binom(a: i64, b: i64) -> Rat {
    if b < 0 || b > a {
        return Rat::zero();
    }
    let b = b.min(a - b);
    let mut acc = num_bigint::BigInt::one();
    for k in 0..b {
        acc = acc * (a - k) / (k + 1);
    }
    Rat::from_integer(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructuredMatrix {
    pub kind: MatrixKind,
    pub mhat: usize,
    pub entries: Matrix<UniPoly>,
}

fn c(v: Rat) -> UniPoly {
    UniPoly::constant(v)
}

/// (sign xi)^e as a polynomial.
fn xi_pow(e: i64, negate: bool) -> UniPoly {
    let sign = if negate && e % 2 == 1 { -Rat::one() } else { Rat::one() };
    UniPoly::monomial(sign, e as usize)
}

fn entry(kind: MatrixKind, mh: i64, i: i64, j: i64) -> UniPoly {
    let xi2 = UniPoly::monomial(Rat::one(), 2);
    let b = binom;
    match kind {
        MatrixKind::D => c(b(2 * mh - j, 2 * i - 2)),
        MatrixKind::S => c(b(2 * mh + 1 - j, 2 * i - 1)),
        MatrixKind::Rplus | MatrixKind::Rminus => {
            let sign = if kind == MatrixKind::Rplus { Rat::one() } else { -Rat::one() };
            let k = 2 * i - 1;
            if j <= mh - 1 {
                let head = &c(b(4 * mh - 2 - j, k)) - &xi2.scale(&b(4 * mh - 3 - j, k));
                let tail = &c(b(2 * mh - 1 + j, k)) - &xi2.scale(&b(2 * mh - 2 + j, k));
                &head + &(&xi_pow(2 * mh - 1 - 2 * j, true) * &tail).scale(&sign)
            } else {
                let head = c(rat_int(mh - 1 + j) * b(5 * mh - 2 - j, k));
                let tail = c(rat_int(5 * mh - 2 - j) * b(mh - 1 + j, k));
                &head + &(&xi_pow(4 * mh - 1 - 2 * j, true) * &tail).scale(&sign)
            }
        }
        MatrixKind::N => {
            let k = 2 * i - 1;
            if j <= mh - 2 {
                let head = &c(b(4 * mh - 2 - j, k)) - &xi2.scale(&b(4 * mh - 3 - j, k));
                let tail = &c(b(2 * mh + j, k)) - &xi2.scale(&b(2 * mh - 1 + j, k));
                &head + &(&xi_pow(2 * mh - 2 - 2 * j, false) * &tail)
            } else if j == mh - 1 {
                &c(b(3 * mh - 1, k)) - &xi2.scale(&b(3 * mh - 2, k))
            } else if j <= 2 * mh - 2 {
                let head = c(rat_int(mh + j) * b(5 * mh - 2 - j, k));
                let tail = c(rat_int(5 * mh - 2 - j) * b(mh + j, k));
                &head + &(&xi_pow(4 * mh - 2 - 2 * j, false) * &tail)
            } else {
                c(rat_int(3 * mh - 1) * b(3 * mh - 1, k))
            }
        }
        MatrixKind::T => {
            let k = 2 * i + 1;
            if j <= mh - 1 {
                let head = &c(b(4 * mh - 1 - j, k)) - &xi2.scale(&b(4 * mh - 2 - j, k));
                let tail = &c(b(2 * mh - 1 + j, k)) - &xi2.scale(&b(2 * mh - 2 + j, k));
                &head - &(&xi_pow(2 * mh - 2 * j, false) * &tail)
            } else {
                let head = c(rat_int(mh + j) * b(5 * mh - 2 - j, k));
                let tail = c(rat_int(5 * mh - 2 - j) * b(mh + j, k));
                &head - &(&xi_pow(4 * mh - 2 - 2 * j, false) * &tail)
            }
        }
    }
}

pub fn build_matrix(kind: MatrixKind, mhat: usize) -> Result<StructuredMatrix> {
    if mhat < kind.min_mhat() {
        return Err(Error::BadSize {
            kind: kind.to_string(),
            mhat,
        });
    }
    let size = kind.size(mhat);
    let mh = mhat as i64;
    let entries = Matrix::from_fn(size, size, |i, j| entry(kind, mh, i as i64 + 1, j as i64 + 1));
    Ok(StructuredMatrix {
        kind,
        mhat,
        entries,
    })
}

/// Exact determinant; constant for D and S.
pub fn det_structured(kind: MatrixKind, mhat: usize) -> Result<UniPoly> {
    let m = build_matrix(kind, mhat)?;
    match kind {
        MatrixKind::D | MatrixKind::S => {
            let q = m.entries.map(|p| p.as_constant().expect("constant entries"));
            Ok(UniPoly::constant(det_exact(&q)?))
        }
        _ => det_poly(&m.entries),
    }
}

/// det = c * xi^xi_exp * (1 -+ xi)^one_minus_xi_exp * cofactor; the root
/// tracked is 1 for Rplus and -1 for Rminus, absent otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factored {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<String>,
    pub xi_exp: usize,
    pub one_minus_xi_exp: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cofactor: Option<String>,
}

pub fn factor(kind: MatrixKind, det: &UniPoly) -> Factored {
    let (a, rest) = det.split_root(&Rat::zero());
    let (b, rest, sign) = match kind {
        MatrixKind::Rplus => {
            let (b, r) = rest.split_root(&Rat::one());
            // (xi - 1)^b = (-1)^b (1 - xi)^b
            let s = if b % 2 == 1 { -Rat::one() } else { Rat::one() };
            (b, r, s)
        }
        MatrixKind::Rminus => {
            let (b, r) = rest.split_root(&-Rat::one());
            (b, r, Rat::one())
        }
        _ => (0, rest, Rat::one()),
    };
    match rest.as_constant() {
        Some(k) => Factored {
            c: Some(fmt_rat(&(k * sign))),
            xi_exp: a,
            one_minus_xi_exp: b,
            cofactor: None,
        },
        None => Factored {
            c: None,
            xi_exp: a,
            one_minus_xi_exp: b,
            cofactor: Some(rest.scale(&sign).to_string()),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetReport {
    pub kind: MatrixKind,
    pub mhat: usize,
    pub det: String,
    pub factored: Factored,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at_xi: Option<EvalReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvalReport {
    pub xi: String,
    pub value: String,
    pub nonsingular: bool,
}

pub fn det_report(kind: MatrixKind, mhat: usize, xi0: Option<&Rat>) -> Result<DetReport> {
    let det = det_structured(kind, mhat)?;
    let at_xi = xi0.map(|x| {
        let v = det.eval(x);
        EvalReport {
            xi: fmt_rat(x),
            nonsingular: !v.is_zero(),
            value: fmt_rat(&v),
        }
    });
    Ok(DetReport {
        kind,
        mhat,
        factored: factor(kind, &det),
        det: det.to_string(),
        at_xi,
    })
}

/// Outcome of dividing det R-+ by xi^((mhat-1)^2) (1 -+ xi)^(3 mhat - 2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedFormReport {
    pub kind: MatrixKind,
    pub mhat: usize,
    pub xi_exp: usize,
    pub one_minus_xi_exp: usize,
    /// The constant quotient, when the division is exact and constant.
    pub c1: Option<String>,
    pub exponents_ok: bool,
    /// Quotient or remainder left over when the check fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

pub fn verify_closed_form_r(kind: MatrixKind, mhat: usize) -> Result<ClosedFormReport> {
    let sign = match kind {
        MatrixKind::Rplus => -Rat::one(),
        MatrixKind::Rminus => Rat::one(),
        _ => {
            return Err(Error::Invalid(format!(
                "closed form applies to Rplus and Rminus, not {kind}"
            )))
        }
    };
    let det = det_structured(kind, mhat)?;
    let a = (mhat - 1) * (mhat - 1);
    let b = 3 * mhat - 2;
    // 1 - xi for Rplus, 1 + xi for Rminus
    let lin = UniPoly::new(vec![Rat::one(), sign]);
    let denom = &UniPoly::monomial(Rat::one(), a) * &lin.pow(b as u32);
    let (q, r) = det.div_rem(&denom);
    let (c1, failure) = match (r.is_zero(), q.as_constant()) {
        (true, Some(k)) if !k.is_zero() => (Some(fmt_rat(&k)), None),
        (true, _) => (None, Some(format!("quotient {q}"))),
        (false, _) => (None, Some(format!("remainder {r}"))),
    };
    Ok(ClosedFormReport {
        kind,
        mhat,
        xi_exp: a,
        one_minus_xi_exp: b,
        exponents_ok: c1.is_some(),
        c1,
        failure,
    })
}

/// det N or det T at xi0 is nonzero.
pub fn verify_nonsingular(kind: MatrixKind, mhat: usize, xi0: &Rat) -> Result<bool> {
    if xi0.is_zero() {
        return Err(Error::ZeroXi);
    }
    if !matches!(kind, MatrixKind::N | MatrixKind::T) {
        return Err(Error::Invalid(format!(
            "pointwise check applies to N and T, not {kind}"
        )));
    }
    Ok(!det_structured(kind, mhat)?.eval(xi0).is_zero())
}

/// LHS minus RHS of the alpha identity at split point k0, as a polynomial
/// in alpha; zero when the identity holds.
pub fn alpha_identity(mhat: usize, k0: usize) -> Result<UniPoly> {
    if mhat == 0 || k0 > 3 * mhat / 2 {
        return Err(Error::Invalid(format!(
            "need mhat >= 1 and 0 <= k0 <= {}",
            3 * mhat / 2
        )));
    }
    let mh = mhat as i64;
    let k0i = k0 as i64;
    let a = UniPoly::xi();
    let am1 = &a - &UniPoly::one();
    let mut lhs = &a.pow(3 * mhat as u32 - 2) - &a;
    for k in 1..=k0i {
        let inner = &c(binom(3 * mh - 3 - k, k - 1)) + &a.scale(&binom(3 * mh - 3 - k, k));
        let term = &(&am1.pow(k as u32) * &a.pow(k as u32)) * &inner;
        lhs = &lhs - &term;
    }
    let mut sum = UniPoly::zero();
    for t in k0i..=3 * mh - 4 - k0i {
        sum = &sum + &UniPoly::monomial(binom(t, k0i), (3 * mh - 4 - k0i - t) as usize);
    }
    let rhs = &(&am1.pow(k0 as u32 + 1) * &a.pow(k0 as u32 + 1)) * &sum;
    Ok(&lhs - &rhs)
}

/// det of the column-differenced, row-scaled S against the smaller S:
/// returns (det S-check at mhat, (-1)^(mhat+1) det S at mhat - 1).
pub fn s_recursion(mhat: usize) -> Result<(Rat, Rat)> {
    if mhat == 0 {
        return Err(Error::BadSize {
            kind: "S".into(),
            mhat,
        });
    }
    let s = build_matrix(MatrixKind::S, mhat)?
        .entries
        .map(|p| p.as_constant().expect("constant"));
    let mh = mhat as i64;
    let tilde = Matrix::from_fn(mhat, mhat, |i, j| {
        s.get(i, j) * Rat::new((2 * i as i64 + 1).into(), (2 * mh - j as i64).into())
    });
    let check = Matrix::from_fn(mhat, mhat, |i, j| {
        if j + 1 < mhat {
            tilde.get(i, j) - tilde.get(i, j + 1)
        } else {
            tilde.get(i, j).clone()
        }
    });
    let smaller = if mhat == 1 {
        Rat::one()
    } else {
        det_structured(MatrixKind::S, mhat - 1)?
            .as_constant()
            .expect("constant")
    };
    let sign = if mhat.is_multiple_of(2) { -Rat::one() } else { Rat::one() };
    Ok((det_exact(&check)?, smaller * sign))
}

/// The row-scaled S equals D entrywise.
pub fn scaled_s_is_d(mhat: usize) -> Result<bool> {
    let s = build_matrix(MatrixKind::S, mhat)?.entries;
    let d = build_matrix(MatrixKind::D, mhat)?.entries;
    let mh = mhat as i64;
    Ok((0..mhat).all(|i| {
        (0..mhat).all(|j| {
            let f = Rat::new((2 * i as i64 + 1).into(), (2 * mh - j as i64).into());
            s.get(i, j).scale(&f) == *d.get(i, j)
        })
    }))
}
