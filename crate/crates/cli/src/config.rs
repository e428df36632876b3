//! Run configuration files.

use std::path::Path;

use serde::Deserialize;
use tzo_core::ModelConfig;

use crate::Failure;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McBlock {
    pub paths: Option<usize>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub mc: Option<McBlock>,
    #[serde(default)]
    pub domestic_df: Option<f64>,
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T, Failure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        Failure::input(format!("{}: invalid config at `{at}`: {}", path.display(), e.inner()))
    })
}

/// Reads either a full run configuration or a bare model block.
pub fn load(path: &Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: malformed JSON: {e}", path.display())))?;
    if value.get("model").is_some() {
        parse(&text, path)
    } else {
        Ok(RunConfig {
            model: parse(&text, path)?,
            mc: None,
            domestic_df: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_key_path() {
        let err = parse::<RunConfig>(
            r#"{"model": {"kind": "cos", "s_mid": 7.8, "gamma": "x", "sigma": 0.1}}"#,
            Path::new("m.json"),
        )
        .unwrap_err();
        assert!(err.message.contains("model.gamma"), "{}", err.message);
        assert_eq!(err.code, 2);
    }

    #[test]
    fn rejects_unknown_mc_key() {
        let err = parse::<RunConfig>(
            r#"{"model": {"kind": "cos", "s_mid": 7.8, "gamma": 0.004, "sigma": 0.1}, "mc": {"pathz": 3}}"#,
            Path::new("m.json"),
        )
        .unwrap_err();
        assert!(err.message.contains("mc.pathz") || err.message.contains("pathz"), "{}", err.message);
    }
}
