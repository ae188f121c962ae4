//! Configs compiled into the binary, addressed as `preset:NAME`.

macro_rules! preset {
    ($name:literal) => {
        ($name, include_str!(concat!("../presets/", $name, ".toml")))
    };
}

/// `(name, toml)` of every embedded preset.
pub const PRESETS: &[(&str, &str)] = &[
    preset!("gamma_sweep"),
    preset!("error_prob_sweep"),
    preset!("sp_sweep"),
    preset!("pmepr_ccdf"),
    preset!("detector_validation"),
    preset!("training_ring_hp"),
    preset!("training_ring_hpa"),
    preset!("training_ring_sp"),
    preset!("training_obda_sync"),
];

pub fn get(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// First comment line of a preset.
pub fn description(text: &str) -> &str {
    text.lines()
        .next()
        .and_then(|l| l.strip_prefix("# "))
        .unwrap_or("")
}
