//! Convergence and splicing over random two-line filtered complexes: the
//! anti-diagonal sums of the stable page must reproduce total homology, the
//! spliced sequence must certify exact, and the splitting must re-sum to
//! the original differential.

use gysin_core::complex::Window;
use gysin_core::gysin::{extract_les, verify_exactness};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const CASES: usize = 200;

#[test]
fn anti_diagonal_sums_equal_homology_on_200_random_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0117);
    for case in 0..CASES {
        let fc = gysin_core::testing::random_two_line_filtered(&mut rng, 10);
        let einf = fc.e_infinity().expect("two-line by construction");
        assert!(einf.certificate.verdict, "case {case}: {:?}", einf.certificate.rows);
        for row in &einf.certificate.rows {
            assert_eq!(row.e_infinity_sum, row.homology_dim, "case {case} degree {}", row.degree);
        }
    }
}

#[test]
fn spliced_sequences_verify_exact_on_200_random_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5011ce);
    for case in 0..CASES {
        let fc = gysin_core::testing::random_two_line_filtered(&mut rng, 10);
        let range = fc.complex().degree_range().unwrap();
        // One degree of slack on both ends makes every inner node certifiable.
        let window = Window::new(range.lo, range.hi + 1);
        let les = extract_les(&fc, 0, window, None).expect("extraction succeeds");
        let cert = verify_exactness(&les);
        assert!(cert.verdict, "case {case}: {cert}");
    }
}

#[test]
fn page_dims_never_increase_with_r() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a9e5);
    for _ in 0..100 {
        let fc = gysin_core::testing::random_two_line_filtered(&mut rng, 10);
        let pages = fc.pages(4).unwrap();
        for pair in pages.windows(2) {
            for ((p, q), sq) in pair[0].slots() {
                assert!(pair[1].slot_dim(p, q) <= sq.dim());
            }
        }
        // Two-line supports stabilize at the third page.
        assert_eq!(pages[3].slot_dims(), pages[4].slot_dims());
    }
}

#[test]
fn splitting_resums_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4e5);
    for _ in 0..100 {
        let fc = gysin_core::testing::random_two_line_filtered(&mut rng, 10);
        let mut original: Vec<(String, String, gysin_core::Rational)> = fc
            .complex()
            .entries()
            .map(|(f, t, c)| {
                (
                    fc.complex().generator(f).name.clone(),
                    fc.complex().generator(t).name.clone(),
                    c.clone(),
                )
            })
            .collect();
        original.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        assert_eq!(fc.split_differential().total(), original);
    }
}
