//! Experiment specifications: TOML schema, validation and named presets.

use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BerSweep,
    RmseVsSnr,
    RmseVsSnapshots,
    RateTable,
    BoundValidation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SnrDb,
    Snapshots,
    PoolSize,
    TxAntennas,
    Point,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Snapshots => "snapshots",
            SweepAxis::PoolSize => "pool_size",
            SweepAxis::TxAntennas => "tx_antennas",
            SweepAxis::Point => "point",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// Monte Carlo execution knobs. `chunk` fixes the scheduling granularity so
/// early stopping decisions do not depend on the worker count. `noiseless`
/// disables receiver noise entirely (an infinite-SNR run).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonteCarlo {
    pub max_frames: u64,
    pub min_frames: u64,
    pub target_bit_errors: u64,
    pub ml_max_frames: u64,
    pub trials: u64,
    pub oracle_draws: u64,
    pub chunk: u64,
    pub noiseless: bool,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        MonteCarlo {
            max_frames: 50_000,
            min_frames: 10_000,
            target_bit_errors: 100,
            ml_max_frames: 4_000,
            trials: 400,
            oracle_draws: 4_000_000,
            chunk: 512,
            noiseless: false,
        }
    }
}

/// Random-scenario settings for the sensing experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSettings {
    /// Target angles drawn uniformly in +-span.
    pub angle_span_deg: f64,
    /// Coarse range bin center.
    pub coarse_range_m: f64,
    /// Sensing SNR used when the sweep axis is the snapshot count.
    pub fixed_snr_db: f64,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        ScenarioSettings {
            angle_span_deg: 60.0,
            coarse_range_m: 3000.0,
            fixed_snr_db: 0.0,
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub system: SystemConfig,
    pub sweep: Sweep,
    pub monte_carlo: MonteCarlo,
    pub scenario: ScenarioSettings,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.system
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.sweep.values.is_empty() {
            return Err(HarnessError::Config("sweep has no values".into()));
        }
        if self.sweep.values.iter().any(|v| !v.is_finite()) {
            return Err(HarnessError::Config("sweep values must be finite".into()));
        }
        if self
            .sweep
            .values
            .windows(2)
            .any(|w| w[0] >= w[1])
        {
            return Err(HarnessError::Config(
                "sweep values must be strictly increasing".into(),
            ));
        }
        if self.monte_carlo.trials == 0 || self.monte_carlo.chunk == 0 {
            return Err(HarnessError::Config(
                "trial and chunk counts must be at least 1".into(),
            ));
        }
        let axis_ok = matches!(
            (self.kind, self.sweep.axis),
            (ExperimentKind::BerSweep, SweepAxis::SnrDb)
                | (ExperimentKind::RmseVsSnr, SweepAxis::SnrDb)
                | (ExperimentKind::RmseVsSnapshots, SweepAxis::Snapshots)
                | (ExperimentKind::RateTable, SweepAxis::PoolSize)
                | (ExperimentKind::RateTable, SweepAxis::TxAntennas)
                | (ExperimentKind::BoundValidation, SweepAxis::Point)
        );
        if !axis_ok {
            return Err(HarnessError::Config(format!(
                "sweep axis {:?} does not fit experiment kind {:?}",
                self.sweep.axis, self.kind
            )));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let raw: RawSpec =
            toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let spec = raw.build()?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_toml_file(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Named presets mirroring the shipped experiment configurations.
    pub fn preset(name: &str) -> Result<Self, HarnessError> {
        let spec = match name {
            "fig3b" => Self::ber_preset(6, 3, 7),
            "fig4" => Self::ber_preset(4, 3, 7),
            "fig5" => Self::ber_preset(4, 3, 6),
            "fig6a" => ExperimentSpec {
                kind: ExperimentKind::RateTable,
                seed: 1,
                system: SystemConfig::new(6, 6, 3, 7, 4),
                sweep: Sweep {
                    axis: SweepAxis::PoolSize,
                    values: (7..=12).map(|p| p as f64).collect(),
                },
                monte_carlo: MonteCarlo::default(),
                scenario: ScenarioSettings::default(),
            },
            "fig6b" => ExperimentSpec {
                kind: ExperimentKind::RateTable,
                seed: 1,
                system: SystemConfig::new(6, 6, 3, 7, 4),
                sweep: Sweep {
                    axis: SweepAxis::TxAntennas,
                    values: (2..=8).map(|n| n as f64).collect(),
                },
                monte_carlo: MonteCarlo::default(),
                scenario: ScenarioSettings::default(),
            },
            "fig7" => ExperimentSpec {
                kind: ExperimentKind::RmseVsSnapshots,
                seed: 1,
                system: SystemConfig::new(6, 6, 3, 7, 4),
                sweep: Sweep {
                    axis: SweepAxis::Snapshots,
                    values: vec![50.0, 100.0, 200.0, 350.0, 500.0],
                },
                monte_carlo: MonteCarlo::default(),
                scenario: ScenarioSettings::default(),
            },
            "fig8" => Self::rmse_preset(6, 7),
            "fig9" => Self::rmse_preset(8, 9),
            "fig10" => Self::rmse_preset(6, 9),
            other => {
                return Err(HarnessError::Config(format!(
                    "unknown preset '{other}' (expected fig3b|fig4|fig5|fig6a|fig6b|fig7|fig8|fig9|fig10)"
                )))
            }
        };
        Ok(spec)
    }

    fn ber_preset(tx: usize, rx: usize, pool: usize) -> Self {
        ExperimentSpec {
            kind: ExperimentKind::BerSweep,
            seed: 1,
            system: SystemConfig::new(tx, tx, rx, pool, 4),
            sweep: Sweep {
                axis: SweepAxis::SnrDb,
                values: vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0],
            },
            monte_carlo: MonteCarlo::default(),
            scenario: ScenarioSettings::default(),
        }
    }

    fn rmse_preset(tx: usize, pool: usize) -> Self {
        ExperimentSpec {
            kind: ExperimentKind::RmseVsSnr,
            seed: 1,
            system: SystemConfig::new(tx, tx, 3, pool, 4),
            sweep: Sweep {
                axis: SweepAxis::SnrDb,
                values: vec![0.0, 5.0, 10.0],
            },
            monte_carlo: MonteCarlo::default(),
            scenario: ScenarioSettings::default(),
        }
    }

    /// Built-in bound-validation run: five random parameter points per
    /// closed form.
    pub fn bound_validation(seed: u64) -> Self {
        ExperimentSpec {
            kind: ExperimentKind::BoundValidation,
            seed,
            system: SystemConfig::new(6, 6, 3, 7, 4),
            sweep: Sweep {
                axis: SweepAxis::Point,
                values: (0..5).map(|i| i as f64).collect(),
            },
            monte_carlo: MonteCarlo::default(),
            scenario: ScenarioSettings::default(),
        }
    }
}

/// TOML-facing schema: `kind`/`seed` at the top, `[system]`, `[sweep]` and
/// optional `[monte_carlo]`/`[scenario]` sections; key = value per line.
#[derive(Debug, Deserialize)]
struct RawSpec {
    kind: ExperimentKind,
    #[serde(default = "default_seed")]
    seed: u64,
    system: RawSystem,
    sweep: Sweep,
    #[serde(default)]
    monte_carlo: MonteCarlo,
    #[serde(default)]
    scenario: ScenarioSettings,
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Deserialize)]
struct RawSystem {
    tx_antennas: usize,
    #[serde(default)]
    sensing_rx_antennas: Option<usize>,
    comm_rx_antennas: usize,
    pool_size: usize,
    qam_order: usize,
    #[serde(default)]
    freq_increment_hz: Option<f64>,
    #[serde(default)]
    carrier_hz: Option<f64>,
    #[serde(default)]
    total_power: Option<f64>,
    #[serde(default)]
    tap_variance: Option<f64>,
    #[serde(default)]
    tx_spacing_m: Option<f64>,
    #[serde(default)]
    sensing_rx_spacing_m: Option<f64>,
    #[serde(default)]
    user_range_m: Option<f64>,
    #[serde(default)]
    user_angle_deg: Option<f64>,
    #[serde(default)]
    pulses_per_cpi: Option<usize>,
}

impl RawSpec {
    fn build(self) -> Result<ExperimentSpec, HarnessError> {
        let r = self.system;
        let mut system = SystemConfig::new(
            r.tx_antennas,
            r.sensing_rx_antennas.unwrap_or(r.tx_antennas),
            r.comm_rx_antennas,
            r.pool_size,
            r.qam_order,
        );
        if let Some(v) = r.freq_increment_hz {
            system.freq_increment_hz = v;
        }
        if let Some(v) = r.carrier_hz {
            system.carrier_hz = v;
            let half = 0.5 * crate::config::SPEED_OF_LIGHT / v;
            system.tx_spacing_m = half;
            system.sensing_rx_spacing_m = half;
        }
        if let Some(v) = r.total_power {
            system.total_power = v;
        }
        if let Some(v) = r.tap_variance {
            system.tap_variance = v;
        }
        if let Some(v) = r.tx_spacing_m {
            system.tx_spacing_m = v;
        }
        if let Some(v) = r.sensing_rx_spacing_m {
            system.sensing_rx_spacing_m = v;
        }
        if let Some(v) = r.user_range_m {
            system.user_range_m = v;
        }
        if let Some(v) = r.user_angle_deg {
            system.user_angle_rad = v.to_radians();
        }
        if let Some(v) = r.pulses_per_cpi {
            system.pulses_per_cpi = v;
        }
        Ok(ExperimentSpec {
            kind: self.kind,
            seed: self.seed,
            system,
            sweep: self.sweep,
            monte_carlo: self.monte_carlo,
            scenario: self.scenario,
        })
    }
}
