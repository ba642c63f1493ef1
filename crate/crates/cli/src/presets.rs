//! Worked exponent sets and shipped run configurations.

use gns_core::estimates::HypothesisInput;

pub const WORKED_SETS: [(&str, f64, usize, f64, f64, f64); 6] = [
    ("h0", 1.0, 3, 2.0, 1.0, 4.0),
    ("h1", 1.5, 3, 3.0, 1.0, 7.0),
    ("h2", 2.0, 3, 3.0, 1.0, 6.0),
    ("h0-plane", 1.0, 2, 2.0, 1.0, 3.0),
    ("h1-plane", 1.5, 2, 3.0, 1.0, 4.75),
    ("h2-plane", 2.0, 2, 3.0, 1.0, 4.5),
];

pub fn worked_set(name: &str) -> Result<HypothesisInput, String> {
    let key = name.trim().to_ascii_lowercase();
    WORKED_SETS
        .iter()
        .find(|w| w.0 == key)
        .map(|&(_, m, n, p, alpha, rho)| HypothesisInput::new(m, n, p, alpha, rho))
        .ok_or_else(|| {
            let names: Vec<&str> = WORKED_SETS.iter().map(|w| w.0).collect();
            format!("unknown exponent set {name:?} (known: {})", names.join(", "))
        })
}

pub const RUNS: [(&str, &str); 5] = [
    ("taylor-green", include_str!("../presets/taylor-green.json")),
    ("zero-data", include_str!("../presets/zero-data.json")),
    ("h1-small-data", include_str!("../presets/h1-small-data.json")),
    ("h2-small-data", include_str!("../presets/h2-small-data.json")),
    ("large-amplitude", include_str!("../presets/large-amplitude.json")),
];

pub fn run(name: &str) -> Result<&'static str, String> {
    RUNS.iter()
        .find(|r| r.0 == name)
        .map(|r| r.1)
        .ok_or_else(|| {
            let names: Vec<&str> = RUNS.iter().map(|r| r.0).collect();
            format!("unknown preset {name:?} (known: {})", names.join(", "))
        })
}
