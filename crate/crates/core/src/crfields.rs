//! Tangent vector fields L_j, bracket and Gamma coefficients, and the three
//! eliminated identities that characterize formal non-minimality.
//!
//! L_j = A d/dz_j - B_j d/dz_n + C_j d/dw with
//! A = G_n - iE_n, B_j = G_j - iE_j, C_j = 2i(G_n E_j - G_j E_n).

use serde::Serialize;

use crate::algebra::{cint, creal, i_unit, rat_int};
use crate::error::{Error, Result};
use crate::manifold::ManifoldJet;
use crate::series::{Jet, TermJson};

/// A, B_j and C_j for j = 1..n-1, valid to M.order - 1.
#[derive(Clone, Debug)]
pub struct FieldCoeffs {
    pub a: Jet,
    pub b: Vec<Jet>,
    pub c: Vec<Jet>,
}

impl FieldCoeffs {
    /// B_j, 1-based.
    pub fn b(&self, j: usize) -> &Jet {
        &self.b[j - 1]
    }

    /// C_j, 1-based.
    pub fn c(&self, j: usize) -> &Jet {
        &self.c[j - 1]
    }
}

pub fn field_coeffs(m: &ManifoldJet) -> FieldCoeffs {
    let n = m.n();
    let g = m.g();
    let e = m.e();
    let i = i_unit();
    let gd: Vec<Jet> = (1..=n).map(|j| g.diff(j, false)).collect();
    let ed: Vec<Jet> = (1..=n).map(|j| e.diff(j, false)).collect();
    let a = &gd[n - 1] - &ed[n - 1].scale(&i);
    let b = (0..n - 1).map(|j| &gd[j] - &ed[j].scale(&i)).collect();
    let two_i = cint(0, 2);
    let c = (0..n - 1)
        .map(|j| (&(&gd[n - 1] * &ed[j]) - &(&gd[j] * &ed[n - 1])).scale(&two_i))
        .collect();
    FieldCoeffs { a, b, c }
}

/// The six lambda_(i j k) coefficients of [L_j, conj L_k].
#[derive(Clone, Debug)]
pub struct BracketCoeffs {
    pub j: usize,
    pub k: usize,
    lam: [Jet; 6],
}

impl BracketCoeffs {
    /// lambda_(i j k) for i in 1..=6.
    pub fn lam(&self, i: usize) -> &Jet {
        &self.lam[i - 1]
    }
}

/// Gamma_(1)..Gamma_(6) from [L_1, T].
#[derive(Clone, Debug)]
pub struct GammaCoeffs {
    gamma: [Jet; 6],
}

impl GammaCoeffs {
    pub fn gamma(&self, i: usize) -> &Jet {
        &self.gamma[i - 1]
    }
}

/// Field coefficients with conjugates, shared by every derived quantity.
#[derive(Clone, Debug)]
pub struct CrFields {
    n: usize,
    f: FieldCoeffs,
    a_bar: Jet,
    b_bar: Vec<Jet>,
    c_bar: Vec<Jet>,
}

impl CrFields {
    pub fn new(m: &ManifoldJet) -> Self {
        let f = field_coeffs(m);
        CrFields {
            n: m.n(),
            a_bar: f.a.conj(),
            b_bar: f.b.iter().map(Jet::conj).collect(),
            c_bar: f.c.iter().map(Jet::conj).collect(),
            f,
        }
    }

    pub fn coeffs(&self) -> &FieldCoeffs {
        &self.f
    }

    fn check(&self, j: usize) -> Result<()> {
        if j == 0 || j >= self.n {
            return Err(Error::IndexOutOfRange(format!(
                "index {j} outside 1..={}",
                self.n - 1
            )));
        }
        Ok(())
    }

    /// A (X)_j - B_j (X)_n.
    fn along(&self, x: &Jet, j: usize) -> Jet {
        &(&self.f.a * &x.diff(j, false)) - &(self.f.b(j) * &x.diff(self.n, false))
    }

    /// conj(A) (X)_kbar - conj(B_k) (X)_nbar.
    fn along_bar(&self, x: &Jet, k: usize) -> Jet {
        &(&self.a_bar * &x.diff(k, true)) - &(&self.b_bar[k - 1] * &x.diff(self.n, true))
    }

    fn lam_i(&self, i: usize, j: usize, k: usize) -> Jet {
        match i {
            1 => self.along(&self.a_bar, j),
            2 => -&self.along(&self.b_bar[k - 1], j),
            3 => self.along(&self.c_bar[k - 1], j),
            4 => -&self.along_bar(&self.f.a, k),
            5 => self.along_bar(self.f.b(j), k),
            6 => -&self.along_bar(self.f.c(j), k),
            _ => unreachable!("bracket coefficient index {i}"),
        }
    }

    pub fn bracket(&self, j: usize, k: usize) -> Result<BracketCoeffs> {
        self.check(j)?;
        self.check(k)?;
        Ok(BracketCoeffs {
            j,
            k,
            lam: std::array::from_fn(|i| self.lam_i(i + 1, j, k)),
        })
    }

    pub fn gamma(&self) -> GammaCoeffs {
        let l = self.bracket(1, 1).expect("n >= 2");
        let n = self.n;
        let a = &self.f.a;
        let b1 = self.f.b(1);
        let c1 = self.f.c(1);
        // lam_111 X_1bar + lam_211 X_nbar + lam_411 X_1 + lam_511 X_n
        let sweep = |x: &Jet| {
            let mut s = l.lam(1) * &x.diff(1, true);
            s = &s + &(l.lam(2) * &x.diff(n, true));
            s = &s + &(l.lam(4) * &x.diff(1, false));
            &s + &(l.lam(5) * &x.diff(n, false))
        };
        let g1 = self.along(l.lam(1), 1);
        let g2 = self.along(l.lam(2), 1);
        let g3 = self.along(l.lam(3), 1);
        let g4 = &self.along(l.lam(4), 1) - &sweep(a);
        let g5 = &self.along(l.lam(5), 1) + &sweep(b1);
        let g6 = &self.along(l.lam(6), 1) - &sweep(c1);
        GammaCoeffs {
            gamma: [g1, g2, g3, g4, g5, g6],
        }
    }

    /// (Abar l2jk + Bbar_k l1jk)(A l611 - C_1 l411)
    ///   - (Abar l211 + Bbar_1 l111)(A l6jk - C_j l4jk).
    fn pair_residual(&self, j: usize, k: usize) -> Result<Jet> {
        let l = self.bracket(j, k)?;
        let l11 = self.bracket(1, 1)?;
        let a = &self.f.a;
        let left1 = &(&self.a_bar * l.lam(2)) + &(&self.b_bar[k - 1] * l.lam(1));
        let left2 = &(a * l11.lam(6)) - &(self.f.c(1) * l11.lam(4));
        let right1 = &(&self.a_bar * l11.lam(2)) + &(&self.b_bar[0] * l11.lam(1));
        let right2 = &(a * l.lam(6)) - &(self.f.c(j) * l.lam(4));
        Ok(&(&left1 * &left2) - &(&right1 * &right2))
    }

    fn need_interior(&self, idx: &[usize]) -> Result<()> {
        if self.n == 2 {
            return Err(Error::NotApplicable(
                "the (j,k) identities are vacuous for n = 2".into(),
            ));
        }
        for &x in idx {
            if x < 2 || x > self.n - 1 {
                return Err(Error::IndexOutOfRange(format!(
                    "index {x} outside 2..={}",
                    self.n - 1
                )));
            }
        }
        Ok(())
    }

    pub fn residual_i(&self, j: usize, k: usize) -> Result<Jet> {
        self.need_interior(&[j, k])?;
        self.pair_residual(j, k)
    }

    /// The j = 1 instance of the (j,k) identity.
    pub fn residual_ii(&self, k: usize) -> Result<Jet> {
        self.need_interior(&[k])?;
        self.pair_residual(1, k)
    }

    pub fn residual_iii(&self) -> Jet {
        let l = self.bracket(1, 1).expect("n >= 2");
        let g1 = self.along(l.lam(1), 1);
        let g2 = self.along(l.lam(2), 1);
        let g3 = self.along(l.lam(3), 1);
        let ab = &self.a_bar;
        let b1 = &self.b_bar[0];
        let c1 = &self.c_bar[0];
        let x1 = &(ab * &g2) + &(&g1 * b1);
        let x2 = &(ab * l.lam(3)) - &(l.lam(1) * c1);
        let y1 = &(ab * &g3) - &(&g1 * c1);
        let y2 = &(ab * l.lam(2)) + &(l.lam(1) * b1);
        &(&x1 * &x2) - &(&y1 * &y2)
    }
}

pub fn bracket_coeffs(m: &ManifoldJet, j: usize, k: usize) -> Result<BracketCoeffs> {
    CrFields::new(m).bracket(j, k)
}

pub fn gamma_coeffs(m: &ManifoldJet) -> GammaCoeffs {
    CrFields::new(m).gamma()
}

pub fn residual_i(m: &ManifoldJet, j: usize, k: usize) -> Result<Jet> {
    CrFields::new(m).residual_i(j, k)
}

pub fn residual_ii(m: &ManifoldJet, k: usize) -> Result<Jet> {
    CrFields::new(m).residual_ii(k)
}

pub fn residual_iii(m: &ManifoldJet) -> Jet {
    CrFields::new(m).residual_iii()
}

/// First nonzero residual coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub residual: String,
    pub term: TermJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonminimalReport {
    pub nonminimal: bool,
    pub upto: u32,
    /// Validity order of each residual that was checked.
    pub residual_orders: Vec<(String, u32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Checks every applicable residual through total degree `upto`.
pub fn is_formally_nonminimal(m: &ManifoldJet, upto: u32) -> Result<NonminimalReport> {
    let cr = CrFields::new(m);
    let n = m.n();
    let mut named = vec![("III".to_string(), cr.residual_iii())];
    for k in 2..n {
        named.push((format!("II(k={k})"), cr.residual_ii(k)?));
        for j in 2..n {
            named.push((format!("I(j={j},k={k})"), cr.residual_i(j, k)?));
        }
    }
    let max_ok = named.iter().map(|(_, r)| r.order()).min().unwrap_or(0);
    if upto > max_ok {
        return Err(Error::OrderExceeded {
            degree: upto,
            order: max_ok,
        });
    }
    let mut witness = None;
    for (name, r) in &named {
        if let Some((idx, c)) = r.terms().find(|(idx, _)| idx.degree() <= upto) {
            witness = Some(Witness {
                residual: name.clone(),
                term: TermJson {
                    alpha: idx.alpha().to_vec(),
                    beta: idx.beta().to_vec(),
                    re: c.re.to_string(),
                    im: c.im.to_string(),
                },
            });
            break;
        }
    }
    Ok(NonminimalReport {
        nonminimal: witness.is_none(),
        upto,
        residual_orders: named.iter().map(|(s, r)| (s.clone(), r.order())).collect(),
        witness,
    })
}

/// Two-variable slice test: Psi_2 (zbar_1 + 2 l_1 z_1) - Psi_1 (zbar_2 + 2 l_2 z_2)
/// with Psi = p - iE and subscripts holomorphic derivatives.
pub fn slice_residual_n2(m: &ManifoldJet) -> Result<Jet> {
    if m.n() != 2 {
        return Err(Error::NotApplicable(format!(
            "slice residual needs n = 2, got {}",
            m.n()
        )));
    }
    let psi = m.p() - &m.e().scale(&i_unit());
    let order = m.order();
    let lam = m.lambda();
    let factor = |j: usize| {
        let l = creal(&lam[j - 1] * rat_int(2));
        &Jet::var(2, order, j, true) + &Jet::var(2, order, j, false).scale(&l)
    };
    Ok(&(&psi.diff(2, false) * &factor(1)) - &(&psi.diff(1, false) * &factor(2)))
}
