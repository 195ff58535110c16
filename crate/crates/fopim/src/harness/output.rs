//! Result tables and their byte-stable CSV / JSON emission.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::experiment::ExperimentSpec;
use super::HarnessError;

/// One (sweep value, metric) measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub metric: String,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// All rows of one experiment plus provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub sweep_name: &'static str,
    pub rows: Vec<ResultRow>,
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
    pub spec: ExperimentSpec,
}

/// First 16 hex digits of the SHA-256 over the canonical JSON encoding of
/// the resolved spec.
pub fn config_hash(spec: &ExperimentSpec) -> String {
    let canonical = serde_json::to_string(spec).expect("spec serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    hex::encode(&digest[..8])
}

impl ResultTable {
    pub fn new(spec: &ExperimentSpec, rows: Vec<ResultRow>) -> Self {
        ResultTable {
            sweep_name: spec.sweep.axis.name(),
            rows,
            seed: spec.seed,
            config_hash: config_hash(spec),
            version: env!("CARGO_PKG_VERSION").to_string(),
            spec: spec.clone(),
        }
    }

    /// CSV with the fixed header
    /// `sweep_name,sweep_value,metric,estimate,stderr,trials,seed,config_hash`.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("sweep_name,sweep_value,metric,estimate,stderr,trials,seed,config_hash\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:e},{:e},{},{},{}\n",
                self.sweep_name,
                row.sweep_value,
                row.metric,
                row.estimate,
                row.stderr,
                row.trials,
                self.seed,
                self.config_hash
            ));
        }
        out
    }

    /// Provenance sidecar: the full resolved spec plus seed, hash and
    /// version.
    pub fn to_provenance_json(&self) -> String {
        #[derive(Serialize)]
        struct Sidecar<'a> {
            version: &'a str,
            seed: u64,
            config_hash: &'a str,
            sweep_name: &'a str,
            spec: &'a ExperimentSpec,
        }
        serde_json::to_string_pretty(&Sidecar {
            version: &self.version,
            seed: self.seed,
            config_hash: &self.config_hash,
            sweep_name: self.sweep_name,
            spec: &self.spec,
        })
        .expect("sidecar serializes")
    }

    /// Write the CSV to `path` and the JSON sidecar next to it.
    pub fn write_files(&self, path: &std::path::Path) -> Result<(), HarnessError> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        std::fs::write(path, self.to_csv())?;
        let sidecar = path.with_extension("json");
        std::fs::write(sidecar, self.to_provenance_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_shape() {
        let spec = ExperimentSpec::preset("fig6a").unwrap();
        let table = ResultTable::new(
            &spec,
            vec![ResultRow {
                sweep_value: 7.0,
                metric: "bits_fopim".into(),
                estimate: 23.0,
                stderr: 0.0,
                trials: 0,
            }],
        );
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "sweep_name,sweep_value,metric,estimate,stderr,trials,seed,config_hash"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("pool_size,7,bits_fopim,"));
        assert!(row.contains(&table.config_hash));
    }

    #[test]
    fn hash_tracks_spec_content() {
        let a = ExperimentSpec::preset("fig3b").unwrap();
        let mut b = a.clone();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.system.pool_size = 9;
        assert_ne!(config_hash(&a), config_hash(&b));
    }
}
