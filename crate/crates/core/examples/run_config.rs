//! Runs a pipeline from a JSON configuration, as the binary does.

use timelike::config::{Pipeline, RunConfig};

fn main() -> timelike::Result<()> {
    let cfg: RunConfig = serde_json::from_str(
        r#"{
            "spacetime": {"kind": "minkowski", "dim": 2},
            "region": [[0, 1], [0, 1]],
            "V": {"kind": "coordinate_slice", "params": {"value": 0.0}},
            "S": {"kind": "coordinate_slice", "params": {"value": 0.5}},
            "n_samples": 20000,
            "seed": 5
        }"#,
    )?;
    let out = Pipeline::Content.run(&cfg)?;
    println!("{}", out.csv);
    println!("content {:.4} (exact 1)", out.json["value"]);
    Ok(())
}
