mod common;

use common::{lam, random_jet, random_real, rng};
use crsing::algebra::{cint, rat, Rat};
use crsing::flatten::rigidity_kernel;
use crsing::leading::{
    addnew_residuals, lemk_residuals, lemk_residuals_tables, master_coeff_residual, phi_coeff,
    phi_of, psi_coeff, psi_of, slice_index, CoeffTable,
};
use crsing::manifold::quadric;
use crsing::series::{compositions, indices_of_degree, substitute_w};
use crsing::{Error, HoloCorrection, Jet};
use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const LAMBDAS: [[(i64, i64); 2]; 4] = [[(0, 1), (1, 4)], [(1, 3), (1, 8)], [(3, 4), (2, 5)], [(1, 6), (0, 1)]];

/// Im B(z, q) for a random weighted-homogeneous holomorphic B of weight m:
/// flat to order m after w -> w - B, so it solves the reduced system.
fn flattenable_h(r: &mut ChaCha8Rng, lambda: &[Rat], m: u32) -> Jet {
    let n = lambda.len();
    let mut b = HoloCorrection::new(n, m);
    for j in 0..=m / 2 {
        for i in compositions(n, m - 2 * j) {
            b.set(&i, j, cint(r.gen_range(-3..=3), r.gen_range(-3..=3))).unwrap();
        }
    }
    substitute_w(&b, &quadric(lambda, m)).unwrap().im_part().homog(m).unwrap()
}

#[test]
fn table_and_series_agree_exhaustively() {
    for m in 3..=6u32 {
        for (li, l) in LAMBDAS.iter().enumerate() {
            let lambda = lam(l);
            let mut r = rng(100 * m as u64 + li as u64);
            for h in [random_real(&mut r, 2, m, m, m, 0.7), random_jet(&mut r, 2, m, m, m, 0.7)] {
                let table = CoeffTable::h_from_jet(&h, &lambda, m).unwrap();
                let phi = phi_of(&h, &lambda, 1);
                let psi = psi_of(&h, &lambda, 1, 1);
                let third = addnew_residuals(&h, &lambda).third;
                for idx in indices_of_degree(2, m) {
                    let [t, s, rr, hh] = key(&idx);
                    assert_eq!(phi_coeff(&table, t, s, rr, hh).unwrap(), phi.coeff_or_zero(&idx));
                }
                for idx in indices_of_degree(2, m + 1) {
                    let [t, s, rr, hh] = key(&idx);
                    assert_eq!(psi_coeff(&table, t, s, rr, hh).unwrap(), psi.coeff_or_zero(&idx));
                }
                // Every degree m+3 monomial z_n^t z_1^(s-1) zbar_n^(r+3) zbar_1^h.
                for idx in indices_of_degree(2, m + 3) {
                    let [t, s1, r3, hh] = key(&idx);
                    let want = third.coeff_or_zero(&idx);
                    assert_eq!(master_coeff_residual(&table, t, s1 + 1, r3 - 3, hh).unwrap(), want);
                }
                assert!(third.terms().all(|(i, _)| i.degree() == m + 3));
            }
        }
    }
}

fn key(idx: &crsing::MultiIndex) -> [i64; 4] {
    let k = crsing::leading::slice_key(idx).unwrap();
    assert_eq!(&slice_index(2, k), idx);
    k
}

#[test]
fn real_h_tables_are_hermitian() {
    let lambda = lam(&[(1, 3), (1, 4), (1, 8)]);
    for seed in 0..8 {
        let m = 3 + (seed % 4) as u32;
        let h = random_real(&mut rng(seed), 3, m, m, m, 0.6);
        let t = CoeffTable::h_from_jet(&h, &lambda, m).unwrap();
        for [a, b, c, d] in t.all_indices() {
            assert_eq!(t.get([a, b, c, d]), t.get([c, d, a, b]).conj());
        }
    }
}

#[test]
fn k_weighted_identities_at_the_bottom_level() {
    for m in 3..=7u32 {
        for l in LAMBDAS.iter().filter(|l| l[1].0 != 0) {
            let lambda = lam(l);
            let mut r = rng(m as u64);
            let any_h = random_real(&mut r, 2, m, m, m, 0.8);
            let flat_h = flattenable_h(&mut r, &lambda, m);
            assert!(addnew_residuals(&flat_h, &lambda).third.is_zero());
            let mut bkh0_nonzero = false;
            for k in -1..=m as i64 + 2 {
                for s in -1..=m as i64 + 2 {
                    let [a, b, c] = lemk_residuals(&any_h, &lambda, -1, k, s).unwrap();
                    assert!(a.is_zero() && b.is_zero(), "m={m} k={k} s={s}");
                    bkh0_nonzero |= !c.is_zero();
                    let all = lemk_residuals(&flat_h, &lambda, -1, k, s).unwrap();
                    assert!(all.iter().all(|x| x.is_zero()), "m={m} k={k} s={s}");
                }
            }
            // The third identity needs the reduced system; a generic H breaks it.
            assert!(bkh0_nonzero);
        }
    }
}

#[test]
fn k_weighted_premise_and_zero_xi() {
    let lambda = lam(&[(1, 3), (1, 4)]);
    let h = random_real(&mut rng(5), 2, 4, 4, 4, 1.0);
    assert!(matches!(lemk_residuals(&h, &lambda, 0, 1, 1), Err(Error::PremiseViolated { .. })));
    let t = CoeffTable::h_from_jet(&h, &lam(&[(1, 3), (0, 1)]), 4).unwrap();
    assert_eq!(lemk_residuals_tables(&t, -1, 0, 0).unwrap_err(), Error::ZeroXi);
}

#[test]
fn both_invariants_zero_forces_h_zero_in_normal_form() {
    let zero = vec![rat(0, 1), rat(0, 1)];
    for m in 3..=8 {
        let r = rigidity_kernel(&zero, m).unwrap();
        assert_eq!(r.dimension(), 0, "m = {m}");
        assert_eq!(r.rank, r.unknowns);
    }
}
