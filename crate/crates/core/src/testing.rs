//! Random-data generators for test suites (behind the `testgen` feature).
//!
//! Valid complexes with vanishing square are produced in split form (each
//! generator is matched to at most one partner one degree below) and then
//! mixed by random change-of-basis shears, which preserve both the square
//! and the homology.

use rand::prelude::*;

use crate::complex::{ChainComplex, Generator};
use crate::filtration::FilteredComplex;
use crate::orbits::{OrbitSet, ReebOrbit};
use crate::rational::Rational;

pub fn coeff_pool() -> Vec<Rational> {
    vec![
        Rational::from_int(1),
        Rational::from_int(-1),
        Rational::from_int(2),
        Rational::from_int(-2),
        Rational::from_int(3),
        Rational::new(1, 2),
        Rational::new(-1, 2),
        Rational::new(5, 3),
    ]
}

/// A generator with its position data before matrix assembly.
#[derive(Clone)]
pub struct GenSpec {
    pub degree: i64,
    pub filtration: i64,
}

pub struct RandomComplex {
    pub specs: Vec<GenSpec>,
    /// Dense differential entries (from index, to index, coeff).
    pub entries: Vec<Vec<Rational>>,
}

/// Builds a random valid complex: `specs` fixes degrees (and filtrations),
/// `pair_ok(source, target)` limits which matchings are allowed.
#[allow(clippy::needless_range_loop)]
pub fn random_split_complex(
    rng: &mut impl Rng,
    specs: Vec<GenSpec>,
    pair_ok: impl Fn(&GenSpec, &GenSpec) -> bool,
) -> RandomComplex {
    let n = specs.len();
    let pool = coeff_pool();
    let mut matrix = vec![vec![Rational::zero(); n]; n];
    let mut used = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &source in &order {
        if used[source] || rng.gen_bool(0.35) {
            continue;
        }
        let candidates: Vec<usize> = (0..n)
            .filter(|&t| {
                !used[t]
                    && t != source
                    && specs[t].degree == specs[source].degree - 1
                    && pair_ok(&specs[source], &specs[t])
            })
            .collect();
        if let Some(&target) = candidates.choose(rng) {
            used[source] = true;
            used[target] = true;
            matrix[source][target] = pool.choose(rng).unwrap().clone();
        }
    }
    // Random shears within a (degree, filtration) group: e_i <- e_i + c e_j
    // rewrites column i of the outgoing block and row j of the incoming one.
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n.max(1));
        let j = rng.gen_range(0..n.max(1));
        if n == 0
            || i == j
            || specs[i].degree != specs[j].degree
            || specs[i].filtration != specs[j].filtration
        {
            continue;
        }
        let c = pool.choose(rng).unwrap().clone();
        for t in 0..n {
            let add = &c * &matrix[j][t];
            matrix[i][t] = &matrix[i][t] + &add;
        }
        for s in 0..n {
            let sub = &c * &matrix[s][i];
            matrix[s][j] = &matrix[s][j] - &sub;
        }
    }
    RandomComplex { specs, entries: matrix }
}

pub fn to_chain_complex(rc: &RandomComplex, names: impl Fn(usize) -> String) -> ChainComplex {
    let mut builder = ChainComplex::builder();
    for (i, spec) in rc.specs.iter().enumerate() {
        builder.add_generator(
            Generator::new(names(i), spec.degree).with_filtration(spec.filtration),
        );
    }
    for (s, row) in rc.entries.iter().enumerate() {
        for (t, c) in row.iter().enumerate() {
            if !c.is_zero() {
                builder.add_entry(names(s), names(t), c.clone());
            }
        }
    }
    builder.build().expect("random complex builds")
}

/// Random complex with at most `max_gens` generators in degrees 0..=3,
/// trivial filtration data.
pub fn random_complex(rng: &mut impl Rng, max_gens: usize) -> ChainComplex {
    let n = rng.gen_range(0..=max_gens);
    let specs: Vec<GenSpec> = (0..n)
        .map(|_| {
            let degree = rng.gen_range(0..=3);
            GenSpec { degree, filtration: degree }
        })
        .collect();
    let rc = random_split_complex(rng, specs, |_, _| true);
    to_chain_complex(&rc, |i| format!("x{i}"))
}

/// Random filtered complex supported in the two lines q = 0, 1 with
/// differential shifts at most 2.
pub fn random_two_line_filtered(rng: &mut impl Rng, max_gens: usize) -> FilteredComplex {
    let n = rng.gen_range(1..=max_gens);
    let specs: Vec<GenSpec> = (0..n)
        .map(|_| {
            let p = rng.gen_range(0..=4);
            let q = rng.gen_range(0..=1);
            GenSpec { degree: p + q, filtration: p }
        })
        .collect();
    let rc = random_split_complex(rng, specs, |s, t| {
        let shift = s.filtration - t.filtration;
        (0..=2).contains(&shift)
    });
    let complex = to_chain_complex(&rc, |i| format!("y{i}"));
    FilteredComplex::new(complex, 2).expect("shifts were constrained")
}

/// Random orbit set with at least one bad orbit: even iterates carry parity
/// evidence, actions are pairwise distinct.
pub fn random_orbit_set(rng: &mut impl Rng) -> OrbitSet {
    let n_orbits = rng.gen_range(2..=7);
    let mut orbits = Vec::new();
    for i in 0..n_orbits {
        let mu = rng.gen_range(0..=5);
        let mut orbit = ReebOrbit::new(format!("o{i}"), Rational::new(2 * (i as i64) + 1, 2), mu);
        let make_bad = i == 0 || rng.gen_bool(0.4);
        if make_bad {
            orbit = orbit
                .iterate_of(format!("base{i}"), 2)
                .with_multiplicity(2)
                .with_parity_evidence(1, 2);
        } else if rng.gen_bool(0.5) {
            orbit = orbit
                .iterate_of(format!("base{i}"), 2)
                .with_multiplicity(2)
                .with_parity_evidence(2, 4);
        }
        orbits.push(orbit);
    }
    OrbitSet::new(1, Rational::from_int(100), orbits).expect("generated orbit data is consistent")
}
