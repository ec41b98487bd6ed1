//! Property tests for the exact-arithmetic substrate.

use gysin_core::matrix::{solve_combination, SparseMatrix, SparseVec};
use gysin_core::rational::Rational;
use proptest::prelude::*;

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-200i64..=200, 1i64..=60).prop_map(|(n, d)| Rational::new(n, d))
}

fn arb_matrix() -> impl Strategy<Value = SparseMatrix> {
    (1usize..=5, 1usize..=5)
        .prop_flat_map(|(nrows, ncols)| {
            proptest::collection::vec(
                proptest::collection::vec(proptest::option::weighted(0.4, arb_rational()), ncols),
                nrows,
            )
        })
        .prop_map(|rows| {
            let ncols = rows[0].len();
            let rows = rows
                .into_iter()
                .map(|row| {
                    SparseVec::from_entries(
                        row.into_iter()
                            .enumerate()
                            .filter_map(|(j, c)| c.map(|c| (j, c))),
                    )
                })
                .collect();
            SparseMatrix::from_rows(rows, ncols)
        })
}

proptest! {
    #[test]
    fn rational_display_round_trips(r in arb_rational()) {
        let shown = r.to_string();
        prop_assert_eq!(shown.parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn rational_field_axioms_hold(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !b.is_zero() {
            prop_assert_eq!(&(&a / &b) * &b, a.clone());
        }
    }

    #[test]
    fn markowitz_rank_equals_rref_rank(m in arb_matrix()) {
        prop_assert_eq!(m.rank(), m.rref().dim());
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn kernel_vectors_are_annihilated(m in arb_matrix()) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(kernel.len(), m.ncols() - m.rank());
        for k in &kernel {
            prop_assert!(m.apply(k).is_zero());
        }
    }

    #[test]
    fn row_combinations_are_recovered(m in arb_matrix(), coeffs in proptest::collection::vec(arb_rational(), 5)) {
        let rows = m.rows();
        let mut target = SparseVec::new();
        for (row, c) in rows.iter().zip(&coeffs) {
            target = target.add_scaled(row, c);
        }
        let solved = solve_combination(rows, &target).expect("target lies in the span");
        let mut rebuilt = SparseVec::new();
        for (row, c) in rows.iter().zip(&solved) {
            rebuilt = rebuilt.add_scaled(row, c);
        }
        prop_assert_eq!(rebuilt, target);
    }
}
