//! Flat CSV projections of JSON reports for external plotting.

use serde_json::Value;

use crate::error::{Error, Result};

const VIEWS: &[&str] = &["entropy", "desnowflake_band", "cube_fuzz"];

/// Project a report (the JSON envelope written by `save_report` or a
/// campaign stage) onto a named flat CSV view.
pub fn emit_plot_data(report: &Value, view: &str) -> Result<String> {
    let schema = report.get("schema").and_then(Value::as_u64).unwrap_or(0);
    if schema != crate::io::SCHEMA_VERSION as u64 {
        return Err(Error::parameter(format!(
            "unsupported report schema {schema}"
        )));
    }
    let payload = report
        .get("payload")
        .ok_or_else(|| Error::Parse("report has no payload".into()))?;
    match view {
        "entropy" => {
            let grid = payload
                .get("grid")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("entropy view needs payload.grid".into()))?;
            let mut out = String::from("R,log_N\n");
            for row in grid {
                let r = row[0].as_f64().unwrap_or(f64::NAN);
                let n = row[1].as_u64().unwrap_or(0);
                if n > 0 {
                    out.push_str(&format!("{r},{}\n", (n as f64).ln()));
                }
            }
            Ok(out)
        }
        "desnowflake_band" => {
            let bands = payload
                .get("per_k_bands")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("view needs payload.per_k_bands".into()))?;
            let mut out = String::from("k,c_low,c_high\n");
            for b in bands {
                out.push_str(&format!(
                    "{},{},{}\n",
                    b["k"], b["c_low"], b["c_high"]
                ));
            }
            Ok(out)
        }
        "cube_fuzz" => {
            let instances = payload
                .get("instances")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("view needs payload.instances".into()))?;
            let mut out = String::from("instance,n_sets,product\n");
            for (i, inst) in instances.iter().enumerate() {
                out.push_str(&format!(
                    "{i},{},{}\n",
                    inst["n_sets"], inst["product"]
                ));
            }
            Ok(out)
        }
        other => Err(Error::UnknownView {
            view: other.to_string(),
            available: VIEWS.join(", "),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn entropy_view() {
        let report = json!({
            "schema": 1,
            "kind": "entropy",
            "payload": { "grid": [[0.0, 1], [1.0, 3], [2.0, 9]] }
        });
        let csv = emit_plot_data(&report, "entropy").unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "R,log_N");
        assert!(lines[2].starts_with("1,"));
    }

    #[test]
    fn unknown_view_lists_available() {
        let report = json!({ "schema": 1, "payload": {} });
        let err = emit_plot_data(&report, "nope").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("entropy") && msg.contains("cube_fuzz"), "{msg}");
    }

    #[test]
    fn desnowflake_view() {
        let report = json!({
            "schema": 1,
            "payload": { "per_k_bands": [ {"k": 2, "c_low": 0.5, "c_high": 1.5, "pairs": 10} ] }
        });
        let csv = emit_plot_data(&report, "desnowflake_band").unwrap();
        assert!(csv.contains("2,0.5,1.5"));
    }
}
