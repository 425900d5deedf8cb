//! The three device models that ship with the toolkit, compiled in so the
//! command-line tools work without any files on disk. Each is stored in
//! canonical form under `models/`.

use crate::lower::{parse_model, FormatError, ParsedModel};

/// Names accepted wherever a model reference may be a bundled id instead of
/// a file path.
pub const BUNDLED_MODELS: [&str; 3] = ["motion_sensor", "ultrasonic", "rfid"];

/// The canonical document text of a bundled model.
pub fn bundled_source(name: &str) -> Option<&'static str> {
    match name {
        "motion_sensor" => Some(include_str!("../models/motion_sensor.tfsm.json")),
        "ultrasonic" => Some(include_str!("../models/ultrasonic.tfsm.json")),
        "rfid" => Some(include_str!("../models/rfid.tfsm.json")),
        _ => None,
    }
}

/// Load a bundled model by name.
pub fn load_bundled(name: &str) -> Result<ParsedModel, FormatError> {
    let src = bundled_source(name).ok_or_else(|| FormatError::Schema {
        at: "model".to_string(),
        message: format!("no bundled model named {name:?} (have motion_sensor, ultrasonic, rfid)"),
    })?;
    parse_model(src)
}
