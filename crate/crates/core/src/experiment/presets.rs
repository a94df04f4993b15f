//! Sweep definitions shipped with the crate, one per reproduced figure.

use super::ExperimentSpec;
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

pub fn preset_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1" => include_str!("../../presets/fig1.toml"),
        "fig2" => include_str!("../../presets/fig2.toml"),
        "fig3" => include_str!("../../presets/fig3.toml"),
        "fig4" => include_str!("../../presets/fig4.toml"),
        "fig5" => include_str!("../../presets/fig5.toml"),
        _ => return None,
    })
}

pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let src = preset_source(name).ok_or_else(|| {
        Error::Config(format!("unknown preset {name:?}; expected one of {}", PRESET_NAMES.join(", ")))
    })?;
    ExperimentSpec::from_toml_str(src)
}
