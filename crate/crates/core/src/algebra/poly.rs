use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::scalar::{rat_int, Rat, Scalar};

/// Polynomial in one variable (printed as `xi`) over the rationals.
/// Coefficients are stored by ascending degree with trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// The variable itself.
    pub fn xi() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    /// Constant value if the polynomial has degree 0 (or is zero).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.coeffs.len() {
            0 => Some(Rat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// p(-xi).
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    rem[k + i] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Number of times `(xi - root)` divides the polynomial, and the cofactor.
    /// The zero polynomial is reported with multiplicity 0.
    pub fn split_root(&self, root: &Rat) -> (usize, UniPoly) {
        if self.is_zero() {
            return (0, self.clone());
        }
        let lin = UniPoly::new(vec![-root.clone(), Rat::one()]);
        let mut k = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.div_rem(&lin);
            if !r.is_zero() {
                return (k, cur);
            }
            k += 1;
            cur = q;
        }
    }
}

impl Zero for UniPoly {
    fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for UniPoly {
    fn one() -> Self {
        UniPoly::from_ints(&[1])
    }
}

impl Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl Add for UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: UniPoly) -> UniPoly {
        &self + &rhs
    }
}

impl Sub for UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: UniPoly) -> UniPoly {
        &self - &rhs
    }
}

impl Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: UniPoly) -> UniPoly {
        &self * &rhs
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Scalar for UniPoly {
    /// Panics if the division leaves a remainder.
    fn div_exact(&self, rhs: &Self) -> Self {
        let (q, r) = self.div_rem(rhs);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let unit = mag.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "xi")?,
                (1, false) => write!(f, "{mag}*xi")?,
                (_, true) => write!(f, "xi^{k}")?,
                (_, false) => write!(f, "{mag}*xi^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::rat;

    #[test]
    fn arithmetic_and_display() {
        let x = UniPoly::xi();
        let p = &(&x * &x) - &UniPoly::one();
        assert_eq!(p.to_string(), "xi^2 - 1");
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval(&rat(3, 1)), rat(8, 1));
        let q = UniPoly::from_ints(&[0, -2, 0, 3]);
        assert_eq!(q.to_string(), "3*xi^3 - 2*xi");
        assert_eq!(UniPoly::zero().to_string(), "0");
    }

    #[test]
    fn division_and_roots() {
        let one_minus = UniPoly::from_ints(&[1, -1]);
        let p = &one_minus.pow(4) * &UniPoly::monomial(rat(-192, 1), 1);
        let (k, rest) = p.split_root(&rat(1, 1));
        assert_eq!(k, 4);
        assert_eq!(rest, UniPoly::monomial(rat(-192, 1), 1));
        let (q, r) = p.div_rem(&UniPoly::xi());
        assert!(r.is_zero());
        assert_eq!(q.degree(), Some(4));
        assert_eq!(p.reflect().eval(&rat(2, 1)), p.eval(&rat(-2, 1)));
    }
}
