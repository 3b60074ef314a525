use std::fmt::Debug;
use std::ops::{Div, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rat = BigRational;
pub type CNum = Complex<Rat>;

/// Ring element that fraction-free elimination can work with.
pub trait Scalar:
    Clone + PartialEq + Debug + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
    /// Exact quotient `self / rhs`; the caller guarantees it exists.
    fn div_exact(&self, rhs: &Self) -> Self;
}

impl<T> Scalar for T
where
    T: Num + Clone + Debug + Neg<Output = T>,
{
    fn div_exact(&self, rhs: &Self) -> Self {
        self.clone() / rhs.clone()
    }
}

/// Scalars with a true division: what kernel and solve need.
pub trait Field: Scalar + Div<Output = Self> {}

impl<T: Scalar + Div<Output = T>> Field for T {}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    BigRational::from_str(s.trim()).map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
}

/// "p/q", or "p" when q = 1.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

pub fn cnum(re: Rat, im: Rat) -> CNum {
    Complex::new(re, im)
}

pub fn creal(re: Rat) -> CNum {
    Complex::new(re, Rat::zero())
}

pub fn cint(re: i64, im: i64) -> CNum {
    Complex::new(rat_int(re), rat_int(im))
}

pub fn i_unit() -> CNum {
    Complex::new(Rat::zero(), Rat::one())
}

/// Product with shortcuts for the (common) purely real factors.
pub fn cmul(a: &CNum, b: &CNum) -> CNum {
    match (a.im.is_zero(), b.im.is_zero()) {
        (true, true) => creal(&a.re * &b.re),
        (true, false) => Complex::new(&a.re * &b.re, &a.re * &b.im),
        (false, true) => Complex::new(&a.re * &b.re, &a.im * &b.re),
        (false, false) => Complex::new(
            &a.re * &b.re - &a.im * &b.im,
            &a.re * &b.im + &a.im * &b.re,
        ),
    }
}

/// Wire form of a complex rational.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CNumJson {
    pub re: String,
    pub im: String,
}

impl From<&CNum> for CNumJson {
    fn from(c: &CNum) -> Self {
        CNumJson {
            re: fmt_rat(&c.re),
            im: fmt_rat(&c.im),
        }
    }
}

impl CNumJson {
    pub fn parse(&self) -> Result<CNum> {
        Ok(cnum(parse_rat(&self.re)?, parse_rat(&self.im)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rat_roundtrip() {
        for s in ["3/4", "-7", "0", "12/5"] {
            assert_eq!(fmt_rat(&parse_rat(s).unwrap()), s);
        }
        assert_eq!(fmt_rat(&parse_rat("6/8").unwrap()), "3/4");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn cmul_matches_generic_product() {
        let a = cnum(rat(1, 2), rat(-3, 4));
        let b = cnum(rat(5, 3), rat(0, 1));
        let c = cnum(rat(0, 1), rat(2, 7));
        for (x, y) in [(&a, &b), (&b, &a), (&a, &c), (&b, &b), (&c, &c)] {
            assert_eq!(cmul(x, y), x.clone() * y.clone());
        }
    }
}
