//! Regenerates the golden report files in `corpus/`.
//!
//! Run from the workspace root after an intentional change to scenario
//! output:
//!
//! ```text
//! cargo run -p gysin-cli --example gen_corpus
//! ```

use std::fs;
use std::path::Path;

#[path = "../src/registry.rs"]
#[allow(dead_code)]
mod registry;

fn main() -> anyhow::Result<()> {
    let dir = Path::new("corpus");
    fs::create_dir_all(dir)?;
    for name in registry::SCENARIO_NAMES {
        let report = registry::run_scenario(name)?;
        let path = dir.join(format!("{name}.golden.json"));
        fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&report)?))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
