//! Loads a scenario from TOML, overrides a field and runs the same
//! dispatcher the command-line tool uses.

use clap::Parser;
use mmwave_d2d::cli::{run, Cli};
use mmwave_d2d::ScenarioConfig;

const SCENARIO: &str = r#"
[region]
r_in_m = 0.3
r_out_m = 2.1

[antennas]
nt = 4
nr = 4

[link]
p_t = 0.5
sigma2_db = -20.0

[analysis]
level = "A4"
"#;

fn main() -> mmwave_d2d::Result<()> {
    let cfg = ScenarioConfig::parse(SCENARIO)?;
    let spatial = cfg.spatial()?;
    let se = spatial.ergodic(&cfg.ergodic_options())?;
    println!("LOS ball radius {:.4} m, ergodic SE {:.4}", spatial.los_ball().radius, se.value);

    let path = std::env::temp_dir().join("mmwave_d2d_scenario.toml");
    std::fs::write(&path, SCENARIO).map_err(|e| mmwave_d2d::Error::Io(e.to_string()))?;
    let cli = Cli::parse_from(["mmwave-d2d", "ergodic", "--config", path.to_str().unwrap(), "--nt", "16"]);
    let out = run(&cli)?;
    print!("{}", out.body);
    println!("hash {}", out.manifest["scenario_hash"]);
    Ok(())
}
