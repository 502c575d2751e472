use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Provenance of one invocation, written next to the main output so that the
/// output itself stays deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after expansion of `--config`.
    pub args: Vec<String>,
    /// Parsed inputs of the subcommand.
    pub inputs: Value,
    /// SHA-256 of the canonical JSON of `command` and `inputs`.
    pub config_hash: String,
    pub wall_time_s: f64,
    pub exit_code: i32,
    /// Standard output of the run, or the output path when one was given.
    pub output: Value,
}

pub fn config_hash(command: &str, inputs: &Value) -> String {
    let canonical = serde_json::json!({ "command": command, "inputs": inputs });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let inputs = serde_json::json!({ "xi": 0.1, "v": 0.30000000000000004, "kappa": null });
        let rec = RunRecord {
            tool: "pullin-dyn".into(),
            version: "0.1.0".into(),
            command: "classify".into(),
            args: vec!["classify".into(), "--xi".into(), "0.1".into()],
            config_hash: config_hash("classify", &inputs),
            inputs,
            wall_time_s: 1.25e-4,
            exit_code: 0,
            output: Value::String("{}\n".into()),
        };
        let text = serde_json::to_string(&rec).unwrap();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(rec.config_hash.len(), 64);
    }

    #[test]
    fn hash_depends_on_inputs() {
        let a = config_hash("pullin", &serde_json::json!({ "xi": 0.0 }));
        let b = config_hash("pullin", &serde_json::json!({ "xi": 0.5 }));
        assert_ne!(a, b);
        assert_eq!(a, config_hash("pullin", &serde_json::json!({ "xi": 0.0 })));
    }
}
