use crsing::algebra::{det_exact, det_poly, kernel_basis, rat, solve_linear, Matrix, Rat, UniPoly};
use num_traits::Zero;
use proptest::prelude::*;

fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| rat(a, b))
}

fn square(n: usize) -> impl Strategy<Value = Matrix<Rat>> {
    prop::collection::vec(rat_strategy(), n * n)
        .prop_map(move |v| Matrix::from_fn(n, n, |i, j| v[i * n + j].clone()))
}

fn rect(r: usize, c: usize) -> impl Strategy<Value = Matrix<Rat>> {
    // Small integer entries with many zeros so kernels are common.
    prop::collection::vec(prop_oneof![Just(0i64), -2i64..=2], r * c)
        .prop_map(move |v| Matrix::from_fn(r, c, |i, j| rat(v[i * c + j], 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn det_is_multiplicative((a, b) in (1usize..=4).prop_flat_map(|n| (square(n), square(n)))) {
        let ab = a.mul_mat(&b).unwrap();
        prop_assert_eq!(det_exact(&ab).unwrap(), det_exact(&a).unwrap() * det_exact(&b).unwrap());
    }

    #[test]
    fn kernel_vectors_are_annihilated(m in (1usize..=5, 1usize..=6).prop_flat_map(|(r, c)| rect(r, c))) {
        let ker = kernel_basis(&m);
        for v in &ker {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
        prop_assert_eq!(m.rank() + ker.len(), m.cols());
    }

    #[test]
    fn poly_det_commutes_with_evaluation(
        entries in prop::collection::vec(prop::collection::vec(-3i64..=3, 0..=3), 9),
        x in rat_strategy(),
    ) {
        let m = Matrix::from_fn(3, 3, |i, j| UniPoly::from_ints(&entries[i * 3 + j]));
        let d = det_poly(&m).unwrap();
        let at = m.map(|p| p.eval(&x));
        prop_assert_eq!(d.eval(&x), det_exact(&at).unwrap());
    }

    #[test]
    fn solve_returns_a_solution(m in square(3), x in prop::collection::vec(rat_strategy(), 3)) {
        let rhs = m.mul_vec(&x).unwrap();
        let sol = solve_linear(&m, &rhs).unwrap().expect("consistent system");
        prop_assert_eq!(m.mul_vec(&sol).unwrap(), rhs);
    }
}

#[test]
fn singular_and_identity() {
    let id: Matrix<Rat> = Matrix::identity(4);
    assert_eq!(det_exact(&id).unwrap(), rat(1, 1));
    let sing = Matrix::from_rows(vec![
        vec![rat(1, 1), rat(2, 1)],
        vec![rat(2, 1), rat(4, 1)],
    ])
    .unwrap();
    assert!(det_exact(&sing).unwrap().is_zero());
    assert_eq!(kernel_basis(&sing).len(), 1);
    assert!(solve_linear(&sing, &[rat(1, 1), rat(0, 1)]).unwrap().is_none());
    assert!(det_exact(&Matrix::<Rat>::zeros(2, 3)).is_err());
}
