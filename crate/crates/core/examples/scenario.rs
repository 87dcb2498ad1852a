// Runs verification suites from an inline scenario and prints the text report.

use std::path::Path;

use lpfiber::scenario::{run_scenario, ScenarioConfig};

const SCENARIO: &str = r#"
seed = 7
suites = ["resolvent-identity", "semigroup-law", "fd-generator"]

[grid]
topology = "interval"
a = 0.0
b = 2.0
nodes = 41

[bundle]
kind = "matrix_profile"
coefficients = [ [[-1.0, 0.5], [0.0, -2.0]], [[0.0, 0.0], [0.25, -0.5]] ]
"#;

pub fn run_example() -> lpfiber::Result<()> {
    let config = ScenarioConfig::from_toml_str(SCENARIO)?;
    let report = run_scenario(&config, Path::new("."))?;
    print!("{}", report.to_text());
    Ok(())
}

fn main() -> lpfiber::Result<()> {
    run_example()
}
