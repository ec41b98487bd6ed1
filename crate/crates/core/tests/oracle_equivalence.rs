//! Sparse-elimination homology against the dense brute-force oracle, plus
//! the enumeration-order and counting invariants, over a large randomized
//! corpus.

use gysin_core::complex::{ChainComplex, Window};
use gysin_core::oracle;
use rand::prelude::*;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

const CASES: usize = 500;

fn window_of(c: &ChainComplex) -> Window {
    c.degree_range().unwrap_or(Window::new(0, 0))
}

#[test]
fn sparse_homology_matches_dense_oracle_on_500_random_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bea7);
    for case in 0..CASES {
        let complex = gysin_core::testing::random_complex(&mut rng, 8);
        assert!(complex.validate().is_valid(), "case {case} must be valid by construction");
        let window = window_of(&complex);
        let sparse = complex.homology(window).expect("valid complex").dims;
        let dense = oracle::homology_dims(&complex, window);
        assert_eq!(sparse, dense, "case {case} disagrees with the oracle");
    }
}

#[test]
fn homology_dims_do_not_depend_on_generator_enumeration_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let complex = gysin_core::testing::random_complex(&mut rng, 8);
        let window = window_of(&complex);
        let reference = complex.homology(window).unwrap();

        // Rebuild with the generator and entry lists shuffled.
        let mut gens: Vec<_> = complex.generators().to_vec();
        gens.shuffle(&mut rng);
        let mut entries: Vec<_> = complex
            .entries()
            .map(|(f, t, c)| {
                (
                    complex.generator(f).name.clone(),
                    complex.generator(t).name.clone(),
                    c.clone(),
                )
            })
            .collect();
        entries.shuffle(&mut rng);
        let mut builder = ChainComplex::builder();
        for g in gens {
            builder.add_generator(g);
        }
        for (f, t, c) in entries {
            builder.add_entry(f, t, c);
        }
        let shuffled = builder.build().unwrap().homology(window).unwrap();
        assert_eq!(reference.dims, shuffled.dims);
        assert_eq!(reference.representatives, shuffled.representatives);
    }
}

#[test]
fn homology_is_bounded_by_chain_dims() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1b5);
    for _ in 0..200 {
        let complex = gysin_core::testing::random_complex(&mut rng, 8);
        let window = window_of(&complex);
        let h = complex.homology(window).unwrap().dims;
        let c = complex.chain_dims();
        for (degree, dim) in h.support() {
            assert!(dim <= c.dim(degree));
        }
    }
}

#[test]
fn alternating_sums_agree_on_leak_free_windows() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa17e);
    for _ in 0..200 {
        let complex = gysin_core::testing::random_complex(&mut rng, 8);
        let window = window_of(&complex);
        // The full degree range never leaks.
        let chi = complex.euler_characteristic(window).unwrap();
        let h = complex.homology(window).unwrap().dims;
        assert_eq!(chi, h.alternating_sum(window));
    }
}
