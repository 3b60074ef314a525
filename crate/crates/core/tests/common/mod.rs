#![allow(dead_code)]

use std::cmp::Ordering;

use crsing::algebra::{cnum, creal, rat, CNum, Rat};
use crsing::manifold::ManifoldJet;
use crsing::series::indices_of_degree;
use crsing::{Jet, Valuation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

/// Random jet (not necessarily real) with terms in degrees lo..=hi.
pub fn random_jet(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32, order: u32, density: f64) -> Jet {
    let mut terms = Vec::new();
    for d in lo..=hi.min(order) {
        for idx in indices_of_degree(n, d) {
            if rng.gen_bool(density) {
                terms.push((idx, cnum(small_rat(rng), small_rat(rng))));
            }
        }
    }
    Jet::from_terms(n, order, terms).unwrap()
}

/// Random real jet (coefficient of the swapped index is the conjugate).
pub fn random_real(rng: &mut ChaCha8Rng, n: usize, lo: u32, hi: u32, order: u32, density: f64) -> Jet {
    let mut terms = Vec::new();
    for d in lo..=hi.min(order) {
        for idx in indices_of_degree(n, d) {
            let sw = idx.swapped();
            match idx.cmp(&sw) {
                Ordering::Less if rng.gen_bool(density) => {
                    let c = cnum(small_rat(rng), small_rat(rng));
                    terms.push((sw, c.conj()));
                    terms.push((idx, c));
                }
                Ordering::Equal if rng.gen_bool(density) => terms.push((idx, creal(small_rat(rng)))),
                _ => {}
            }
        }
    }
    Jet::from_terms(n, order, terms).unwrap()
}

/// Random valid manifold: real p of degrees 3..=order and real E with
/// Ord(E) = m (degree-m part forced nonzero when possible).
pub fn random_manifold(seed: u64, lambda: Vec<Rat>, m: u32, order: u32, density: f64) -> ManifoldJet {
    let n = lambda.len();
    let mut r = rng(seed);
    let p = random_real(&mut r, n, 3, order, order, density);
    let mut e = random_real(&mut r, n, m, order, order, density);
    let lead = indices_of_degree(n, m).into_iter().find(|i| i.is_diagonal());
    if let Some(idx) = lead {
        e = &e + &Jet::monomial(n, order, idx.alpha(), idx.beta(), creal(rat(1, 1)));
    }
    ManifoldJet::new(order, lambda, p, e).unwrap()
}

/// ord(j) >= k, and the jet is known at least through degree k - 1 so the
/// statement is not vacuous.
pub fn ord_at_least(j: &Jet, k: u32) -> bool {
    assert!(j.order() + 1 >= k, "jet valid to {} cannot certify ord >= {k}", j.order());
    match j.ord() {
        Valuation::Infinite => true,
        Valuation::Finite(d) => d >= k,
    }
}

pub fn lam(v: &[(i64, i64)]) -> Vec<Rat> {
    v.iter().map(|&(a, b)| rat(a, b)).collect()
}

pub fn cone() -> CNum {
    creal(rat(1, 1))
}
