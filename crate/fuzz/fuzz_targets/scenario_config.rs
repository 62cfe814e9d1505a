#![no_main]

use hybridloc_cli::{AngleUnit, ScenarioConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let Ok(cfg) = ScenarioConfig::from_json(text) else { return };
    let again = ScenarioConfig::from_json(&cfg.to_json()).expect("written config re-parses");
    assert_eq!(again, cfg);
    for unit in [AngleUnit::Degrees, AngleUnit::Radians] {
        let _ = cfg.scenario(unit, true);
    }
});
