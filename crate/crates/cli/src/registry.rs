//! The built-in scenario corpus: names, expected blocks and runners.

use std::collections::BTreeMap;

use anyhow::{anyhow, Result};
use gysin_core::complex::Window;
use gysin_core::scenarios::{
    cotangent_gysin, disc_bundle, randomized_betti, riemann_les, riemann_surface,
    run_riemann_scenario, subcritical_stein, AssembledLes, BettiInput, DTableRow,
    MorseComplexData, ScenarioReport,
};

pub const SCENARIO_NAMES: [&str; 8] = [
    "ball",
    "cotangent-split",
    "disc",
    "discbundle-S2",
    "discbundle-T2",
    "genus1",
    "subcritical-rand1",
    "subcritical-rand2",
];

fn t2_betti() -> BettiInput {
    BettiInput::from_pairs([(0, 1), (1, 2), (2, 1)])
}

fn s2_betti() -> BettiInput {
    BettiInput::from_pairs([(0, 1), (2, 1)])
}

fn split_cotangent() -> AssembledLes {
    let s1 = BettiInput::from_pairs([(0, 1), (2, 1), (4, 1)]);
    let lambda = BettiInput::from_pairs(
        (0..=5).map(|k| (k, s1.dim(k) + s1.dim(k - 1))).collect::<Vec<_>>(),
    );
    cotangent_gysin(&lambda, &s1, &BTreeMap::new(), Window::new(0, 6), false)
}

/// Runs a named scenario and returns its check report.
pub fn run_scenario(name: &str) -> Result<ScenarioReport> {
    let report = match name {
        "disc" => run_riemann_scenario(&riemann_surface(0, 5)?)?,
        "genus1" => run_riemann_scenario(&riemann_surface(1, 4)?)?,
        "ball" => {
            let betti = BettiInput::from_pairs([(4, 1)]);
            let mut result = subcritical_stein(&betti, 2, Window::new(0, 8))?;
            result.report.name = "ball".into();
            result.report
        }
        "subcritical-rand1" | "subcritical-rand2" => {
            let seed = if name.ends_with('1') { 1 } else { 2 };
            let betti = randomized_betti(seed, 2);
            let mut result = subcritical_stein(&betti, 2, Window::new(0, 10))?;
            result.report.name = name.into();
            result.report
        }
        "discbundle-T2" => {
            let mut result = disc_bundle(&MorseComplexData::perfect(&t2_betti()), 2, 4)?;
            result.report.name = "discbundle-T2".into();
            result.report
        }
        "discbundle-S2" => {
            let mut result = disc_bundle(&MorseComplexData::perfect(&s2_betti()), 2, 4)?;
            result.report.name = "discbundle-S2".into();
            result.report
        }
        "cotangent-split" => {
            let mut result = split_cotangent();
            result.report.name = "cotangent-split".into();
            result.report
        }
        other => return Err(anyhow!("unknown scenario {other:?} (expected one of {SCENARIO_NAMES:?})")),
    };
    Ok(report)
}

/// The sequences a named scenario certifies, with connecting-map tables
/// where the pipeline produces them.
pub fn scenario_sequences(name: &str) -> Result<Vec<(AssembledLes, Vec<DTableRow>, i64)>> {
    match name {
        "disc" => {
            let scenario = riemann_surface(0, 5)?;
            let (les, table) = riemann_les(&scenario, None)?;
            Ok(vec![(les, table, 1)])
        }
        "genus1" => {
            let scenario = riemann_surface(1, 4)?;
            let mut out = Vec::new();
            for class in scenario.per_class.clone().unwrap_or_default() {
                let (les, table) = riemann_les(&scenario, Some(&class))?;
                out.push((les, table, 1));
            }
            Ok(out)
        }
        "ball" => Ok(vec![(
            subcritical_stein(&BettiInput::from_pairs([(4, 1)]), 2, Window::new(0, 8))?,
            Vec::new(),
            2,
        )]),
        "subcritical-rand1" | "subcritical-rand2" => {
            let seed = if name.ends_with('1') { 1 } else { 2 };
            Ok(vec![(
                subcritical_stein(&randomized_betti(seed, 2), 2, Window::new(0, 10))?,
                Vec::new(),
                2,
            )])
        }
        "discbundle-T2" => Ok(vec![(
            disc_bundle(&MorseComplexData::perfect(&t2_betti()), 2, 4)?,
            Vec::new(),
            2,
        )]),
        "discbundle-S2" => Ok(vec![(
            disc_bundle(&MorseComplexData::perfect(&s2_betti()), 2, 4)?,
            Vec::new(),
            2,
        )]),
        "cotangent-split" => Ok(vec![(split_cotangent(), Vec::new(), 3)]),
        other => Err(anyhow!("unknown scenario {other:?} (expected one of {SCENARIO_NAMES:?})")),
    }
}
