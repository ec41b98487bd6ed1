//! Acceptance suite: every criterion runs end to end at its stated
//! tolerance (exact equality throughout) and prints one pass/fail line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use gysin_core::complex::Window;
use gysin_core::gysin::{extract_les, verify_exactness};
use gysin_core::matrix::{SparseMatrix, SparseVec};
use gysin_core::orbits::{
    build_contact_complex, classify, theta, theta_inv, OrbitClass, S1Crit, TensorChain,
};
use gysin_core::rational::Rational;
use gysin_core::scenarios::{
    connecting_map_ranks, disc_bundle, randomized_betti, riemann_les, riemann_surface,
    run_riemann_scenario, scenario_filtered_complex, subcritical_stein, AssembledLes, BettiInput,
    MorseComplexData,
};
use gysin_core::{oracle, testing};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn criterion(label: &str, pass: bool) {
    println!("{}: {label}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "acceptance criterion failed: {label}");
}

fn under_a_second(start: Instant) -> bool {
    start.elapsed() < Duration::from_secs(1)
}

#[test]
fn criterion_1_disc_example() {
    let start = Instant::now();
    let scenario = riemann_surface(0, 5).unwrap();
    let mut pass = run_riemann_scenario(&scenario).unwrap().pass;

    // SH+ = Q in degree 2 and nothing else on uncontaminated degrees.
    let (os, fc) = scenario_filtered_complex(&scenario, None).unwrap();
    let einf = fc.e_infinity().unwrap();
    let contaminated = fc.contaminated_degrees();
    for k in 0..=11 {
        if !contaminated.contains(&k) {
            pass &= einf.homology.dim(k) == usize::from(k == 2);
        }
    }
    // HC_{2b-2} = Q for b = 1..5.
    let contact = build_contact_complex(&os, None, &[]).unwrap();
    let hc = contact.homology(Window::new(0, 8)).unwrap().dims;
    for b in 1..=5i64 {
        pass &= hc.dim(2 * b - 2) == 1;
    }
    // D has rank 1 on HC_{2b-2} for b >= 2 and rank 0 for b = 1.
    let ranks = connecting_map_ranks(&scenario, &scenario.orbit_set, None).unwrap();
    for b in 1..=5i64 {
        let expected = usize::from(b >= 2);
        pass &= ranks.get(&(2 * b - 2)).copied().unwrap_or(0) == expected;
    }
    // Full spliced sequence certifies exact.
    let (les, _) = riemann_les(&scenario, None).unwrap();
    pass &= verify_exactness(&les.sequence).verdict;
    pass &= under_a_second(start);
    criterion("criterion 1: disc example reproduces SH+, HC, D and exactness", pass);
}

#[test]
fn criterion_2_genus_one() {
    let start = Instant::now();
    let scenario = riemann_surface(1, 4).unwrap();
    let mut pass = run_riemann_scenario(&scenario).unwrap().pass;
    for b in 1..=4i64 {
        let class = format!("b{b}");
        let (os, fc) = scenario_filtered_complex(&scenario, Some(&class)).unwrap();
        let einf = fc.e_infinity().unwrap();
        pass &= einf.homology.dim(2 * b) == 1;
        pass &= einf.homology.dim(2 * b + 1) == 1;
        let contact = build_contact_complex(&os, Some(&class), &[]).unwrap();
        let hc = contact.homology(Window::new(2 * b - 2, 2 * b - 2)).unwrap().dims;
        pass &= hc.dim(2 * b - 2) == 1;
        // D vanishes identically.
        let ranks = connecting_map_ranks(&scenario, &scenario.orbit_set, Some(&class)).unwrap();
        pass &= ranks.values().all(|&r| r == 0);
        let (les, _) = riemann_les(&scenario, Some(&class)).unwrap();
        pass &= verify_exactness(&les.sequence).verdict;
    }
    pass &= under_a_second(start);
    criterion("criterion 2: genus-one classes give SH at 2b, 2b+1 with vanishing D", pass);
}

/// Connecting-map ranks into SH: every third map of the assembled pattern.
fn connecting_ranks_into_sh(les: &AssembledLes) -> Vec<usize> {
    les.sequence.maps.iter().skip(2).step_by(3).map(SparseMatrix::rank).collect()
}

#[test]
fn criterion_3_subcritical_stein() {
    let start = Instant::now();
    let window = Window::new(0, 10);
    let inputs: Vec<BettiInput> = vec![
        BettiInput::from_pairs([(4, 1)]),
        randomized_betti(1, 2),
        randomized_betti(2, 2),
    ];
    let mut pass = true;
    for betti in &inputs {
        let result = subcritical_stein(betti, 2, window).unwrap();
        pass &= result.report.pass;
        pass &= verify_exactness(&result.sequence).verdict;
        pass &= connecting_ranks_into_sh(&result).iter().all(|&r| r == 0);
        // Node dimensions against the closed form, recomputed here.
        let formula = |k: i64| -> usize {
            (0..=k / 2 + 1).map(|m| betti.dim(k - 2 * m + 2)).sum::<usize>()
        };
        for node in &result.sequence.nodes {
            if let gysin_core::gysin::LesNodeKind::Hc { hc_degree, .. } = node.kind {
                pass &= node.dim == formula(hc_degree);
            }
        }
    }
    pass &= under_a_second(start);
    criterion(
        "criterion 3: subcritical fillings split with zero connecting maps and formula dims",
        pass,
    );
}

#[test]
fn criterion_4_disc_bundles() {
    let start = Instant::now();
    let bases = [
        ("T2", BettiInput::from_pairs([(0, 1), (1, 2), (2, 1)])),
        ("S2", BettiInput::from_pairs([(0, 1), (2, 1)])),
    ];
    let mut pass = true;
    for (_, betti) in &bases {
        let result = disc_bundle(&MorseComplexData::perfect(betti), 2, 4).unwrap();
        pass &= result.report.pass;
        pass &= verify_exactness(&result.sequence).verdict;
        pass &= connecting_ranks_into_sh(&result).iter().all(|&r| r == 0);
        // Engine HC against the closed form on uncontaminated degrees.
        let closed_form =
            |k: i64| -> usize { (0..=3).map(|m| betti.dim(k - 2 * m)).sum::<usize>() };
        for check in &result.report.checks {
            if let Some(stripped) = check.label.strip_prefix("HC_") {
                let degree: i64 = stripped.parse().unwrap();
                pass &= check.pass && check.got == format!("{}", closed_form(degree));
            }
        }
    }
    pass &= under_a_second(start);
    criterion("criterion 4: disc bundles match the multiplicity-sum formula", pass);
}

#[test]
fn criterion_5_bad_orbit_cancellation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce5);
    let mut pass = true;
    for _ in 0..200 {
        let os = testing::random_orbit_set(&mut rng);
        let fc = gysin_core::orbits::build_morse_bott_complex(
            &os,
            gysin_core::orbits::MorseBottSide::Symplectic,
            &[],
        )
        .unwrap();
        let pages = fc.pages(1).unwrap();
        let mut good_per_level: BTreeMap<i64, usize> = BTreeMap::new();
        let mut has_bad = false;
        for orbit in os.orbits() {
            match classify(orbit).unwrap() {
                OrbitClass::Good => *good_per_level.entry(orbit.mu).or_default() += 1,
                OrbitClass::Bad => has_bad = true,
            }
        }
        pass &= has_bad;
        for orbit in os.orbits() {
            let p = orbit.mu;
            let expected = good_per_level.get(&p).copied().unwrap_or(0);
            pass &= pages[1].slot_dim(p, 0) == expected;
            pass &= pages[1].slot_dim(p, 1) == expected;
        }
    }
    criterion("criterion 5: bad orbits cancel at E^1 on 200 random orbit sets", pass);
}

#[test]
fn criterion_6_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x06ac1e);
    let mut pass = true;
    for _ in 0..500 {
        let complex = testing::random_complex(&mut rng, 8);
        let window = complex.degree_range().unwrap_or(Window::new(0, 0));
        let sparse = complex.homology(window).unwrap().dims;
        let dense = oracle::homology_dims(&complex, window);
        pass &= sparse == dense;
    }
    criterion("criterion 6: sparse homology equals the dense oracle on 500 random complexes", pass);
}

#[test]
fn criterion_7_convergence_certificates() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc09e6e);
    let mut pass = true;
    for _ in 0..200 {
        let fc = testing::random_two_line_filtered(&mut rng, 10);
        let einf = fc.e_infinity().unwrap();
        pass &= einf.certificate.verdict;
        pass &= einf
            .certificate
            .rows
            .iter()
            .all(|row| row.e_infinity_sum == row.homology_dim);
        let range = fc.complex().degree_range().unwrap();
        let les =
            extract_les(&fc, 0, Window::new(range.lo, range.hi + 1), None).unwrap();
        pass &= verify_exactness(&les).verdict;
    }
    criterion("criterion 7: anti-diagonal sums converge and splices verify on 200 cases", pass);
}

#[test]
fn criterion_8_theta_conjugation() {
    let mut pass = true;
    // D and the page map have equal rank on every pipeline scenario.
    let to_sparse = |dense: &Vec<Vec<Rational>>| -> SparseMatrix {
        let ncols = dense.first().map_or(0, Vec::len);
        SparseMatrix::from_rows(
            dense
                .iter()
                .map(|row| SparseVec::from_entries(row.iter().cloned().enumerate()))
                .collect(),
            ncols,
        )
    };
    let disc = riemann_surface(0, 5).unwrap();
    let genus1 = riemann_surface(1, 4).unwrap();
    let mut tables = Vec::new();
    tables.push(riemann_les(&disc, None).unwrap().1);
    for class in genus1.per_class.clone().unwrap() {
        tables.push(riemann_les(&genus1, Some(&class)).unwrap().1);
    }
    for table in tables.iter().flatten() {
        let d2 = to_sparse(&table.d2);
        let d = to_sparse(&table.d);
        pass &= d2.rank() == d.rank() && d.rank() == table.rank;
    }
    // theta_inv after theta is the identity on random elements.
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e7a);
    for _ in 0..50 {
        let os = testing::random_orbit_set(&mut rng);
        let mut v = TensorChain::default();
        for orbit in os.orbits() {
            if rng.gen_bool(0.6) {
                let point = if rng.gen_bool(0.5) { S1Crit::Min } else { S1Crit::Max };
                v.insert(
                    orbit.name.clone(),
                    point,
                    Rational::new(rng.gen_range(-9..=9), rng.gen_range(1..=9)),
                );
            }
        }
        pass &= theta_inv(&theta(&v, &os).unwrap(), &os).unwrap() == v;
    }
    criterion("criterion 8: conjugation preserves ranks and round-trips", pass);
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn criterion_9_deterministic_verify_all() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_gysin"))
            .args(["verify-all", "--json"])
            .env("GYSIN_CORPUS_DIR", corpus_dir())
            .output()
            .expect("binary runs")
    };
    let first = run();
    let second = run();
    let pass = first.status.success()
        && second.status.success()
        && first.stdout == second.stdout
        && !first.stdout.is_empty();
    criterion("criterion 9: verify-all is byte-identical across runs", pass);
}
