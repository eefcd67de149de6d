//! Experiment configuration.
//!
//! Files are TOML; every key is optional and falls back to the reference
//! setup, so an empty file is a complete configuration. Keys may be written
//! as sections (`[array]` then `n_tx = 8`) or as dotted keys
//! (`array.n_tx = 8`). Powers are given in dBm, the radar cross section in
//! dBsm and angles in degrees; they are converted once when the numerical
//! configuration is built.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ArrayConfig, PolarPosition};
use crate::objective::LinkBudget;
use crate::optimizer::SolverSettings;
use crate::sensing::SensingConfig;
use crate::units::{dbm_to_watts, dbsm_to_m2, wavelength_from_ghz};

use super::scheme::SchemeTag;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArraySection {
    pub n_tx: usize,
    pub n_rx: usize,
    pub carrier_ghz: f64,
    pub directivity_p: f64,
    pub phi_arr_max_deg: f64,
    pub varphi_max_deg: f64,
}

impl Default for ArraySection {
    fn default() -> Self {
        Self {
            n_tx: 8,
            n_rx: 16,
            carrier_ghz: 28.0,
            directivity_p: 1.0,
            phi_arr_max_deg: 15.0,
            varphi_max_deg: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub tx_power_dbm: f64,
    pub noise_power_dbm: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            tx_power_dbm: 10.0,
            noise_power_dbm: -107.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensingSection {
    /// Number of DFT probing beams `L`.
    pub n_beams: usize,
    pub power_dbm: f64,
    pub noise_power_dbm: f64,
    pub rcs_dbsm: f64,
    /// Size of the sine-uniform estimator grid.
    pub grid_points: usize,
    pub refine: bool,
    /// Number of sampled directions `M` in the uncertainty region.
    pub n_samples: usize,
    /// Replaces the computed bound (rad²) when building the uncertainty
    /// region. Meant for controlled experiments.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crb_override: Option<f64>,
}

impl Default for SensingSection {
    fn default() -> Self {
        Self {
            n_beams: 128,
            power_dbm: 10.0,
            noise_power_dbm: -107.0,
            rcs_dbsm: 7.0,
            grid_points: 2048,
            refine: true,
            n_samples: 21,
            crb_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSection {
    pub n_users: usize,
    pub user_range_m: [f64; 2],
    pub user_azimuth_deg: [f64; 2],
    pub eav_range_m: f64,
    pub eav_azimuth_deg: f64,
}

impl Default for SceneSection {
    fn default() -> Self {
        Self {
            n_users: 3,
            user_range_m: [30.0, 50.0],
            user_azimuth_deg: [-80.0, 80.0],
            eav_range_m: 30.0,
            eav_azimuth_deg: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub n_trials: usize,
    pub master_seed: u64,
    pub schemes: Vec<SchemeTag>,
    /// Grid size of the exhaustive array-rotation benchmark.
    pub es_grid_points: usize,
    /// Execution-error bounds (degrees) for the rotation-error study.
    pub rotation_error_bounds_deg: Vec<f64>,
    pub beam_pattern_resolution_deg: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            n_trials: 200,
            master_seed: 20_240_601,
            schemes: SchemeTag::IMPLEMENTED.to_vec(),
            es_grid_points: 61,
            rotation_error_bounds_deg: Vec::new(),
            beam_pattern_resolution_deg: 1.0,
        }
    }
}

/// One swept parameter, addressed by its dotted key (for example
/// `link.tx_power_dbm` or `sensing.n_samples`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub array: ArraySection,
    pub link: LinkSection,
    pub sensing: SensingSection,
    pub solver: SolverSettings,
    pub scene: SceneSection,
    pub experiment: ExperimentSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; the name `defaults` yields the reference setup.
    pub fn load(path: &Path) -> Result<Self> {
        if path.as_os_str() == "defaults" {
            return Ok(Self::default());
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Fully resolved configuration as TOML.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let array = self.array_config()?;
        self.sensing_config()?.validate(&array)?;
        self.link_budget()?;
        self.solver.validate()?;
        let sc = &self.scene;
        if sc.n_users == 0 {
            return Err(Error::Config("scene.n_users must be positive".into()));
        }
        let [r0, r1] = sc.user_range_m;
        if !(r0 > 0.0 && r1 >= r0) {
            return Err(Error::Config(format!(
                "scene.user_range_m = [{r0}, {r1}] must satisfy 0 < lo <= hi"
            )));
        }
        let [a0, a1] = sc.user_azimuth_deg;
        if !(a0 > -90.0 && a1 < 90.0 && a1 >= a0) {
            return Err(Error::Config(format!(
                "scene.user_azimuth_deg = [{a0}, {a1}] must lie inside (-90, 90) with lo <= hi"
            )));
        }
        self.eavesdropper()?;
        if self.sensing.n_samples < 2 {
            return Err(Error::Config("sensing.n_samples must be at least 2".into()));
        }
        if let Some(c) = self.sensing.crb_override {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Config("sensing.crb_override must be > 0".into()));
            }
        }
        let ex = &self.experiment;
        if ex.n_trials == 0 {
            return Err(Error::Config("experiment.n_trials must be positive".into()));
        }
        if ex.schemes.is_empty() {
            return Err(Error::Config("experiment.schemes must not be empty".into()));
        }
        if ex.es_grid_points == 0 {
            return Err(Error::Config("experiment.es_grid_points must be positive".into()));
        }
        if ex.rotation_error_bounds_deg.iter().any(|b| !(*b >= 0.0)) {
            return Err(Error::Config(
                "experiment.rotation_error_bounds_deg must be nonnegative".into(),
            ));
        }
        if !(ex.beam_pattern_resolution_deg > 0.0) {
            return Err(Error::Config(
                "experiment.beam_pattern_resolution_deg must be > 0".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep.values must not be empty".into()));
            }
            for v in &sweep.values {
                self.with_parameter(&sweep.parameter, *v)?;
            }
        }
        Ok(())
    }

    pub fn array_config(&self) -> Result<ArrayConfig> {
        let a = &self.array;
        ArrayConfig::new(
            a.n_tx,
            a.n_rx,
            wavelength_from_ghz(a.carrier_ghz),
            a.directivity_p,
            a.phi_arr_max_deg.to_radians(),
            a.varphi_max_deg.to_radians(),
        )
    }

    pub fn sensing_config(&self) -> Result<SensingConfig> {
        let s = &self.sensing;
        Ok(SensingConfig {
            n_beams: s.n_beams,
            sensing_power: dbm_to_watts(s.power_dbm),
            noise_power: dbm_to_watts(s.noise_power_dbm),
            rcs: dbsm_to_m2(s.rcs_dbsm),
            search_grid: SensingConfig::sine_uniform_grid(s.grid_points),
            refine: s.refine,
        })
    }

    pub fn link_budget(&self) -> Result<LinkBudget> {
        LinkBudget::new(
            dbm_to_watts(self.link.tx_power_dbm),
            dbm_to_watts(self.link.noise_power_dbm),
        )
    }

    pub fn eavesdropper(&self) -> Result<PolarPosition> {
        PolarPosition::new(
            self.scene.eav_range_m,
            self.scene.eav_azimuth_deg.to_radians(),
        )
    }

    /// Copy with the dotted key `name` set to `value`. Integer-valued keys
    /// require an integral value.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        let mut root = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        let mut slot = &mut root;
        for part in name.split('.') {
            slot = slot
                .get_mut(part)
                .ok_or_else(|| Error::Config(format!("unknown sweep parameter `{name}`")))?;
        }
        *slot = match slot {
            toml::Value::Integer(_) => {
                if value.fract() != 0.0 || value < 0.0 {
                    return Err(Error::Config(format!(
                        "sweep parameter `{name}` takes nonnegative integers, got {value}"
                    )));
                }
                toml::Value::Integer(value as i64)
            }
            toml::Value::Float(_) => toml::Value::Float(value),
            _ => {
                return Err(Error::Config(format!(
                    "sweep parameter `{name}` is not a scalar number"
                )))
            }
        };
        let mut cfg: Self = root
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.sweep = None;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_reference_setup() {
        let cfg = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.experiment.n_trials, 200);
        assert_eq!(cfg.sensing.n_samples, 21);
    }

    #[test]
    fn dotted_and_sectioned_keys_agree() {
        let a = ExperimentConfig::from_toml_str("array.n_tx = 6\nlink.tx_power_dbm = 5").unwrap();
        let b = ExperimentConfig::from_toml_str("[array]\nn_tx = 6\n[link]\ntx_power_dbm = 5.0")
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.array.n_tx, 6);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = ExperimentConfig::from_toml_str("array.n_elements = 6").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn power_units_convert_once() {
        let cfg = ExperimentConfig::default();
        let lb = cfg.link_budget().unwrap();
        assert!((lb.tx_power() - 0.01).abs() < 1e-15);
        let s = cfg.sensing_config().unwrap();
        assert!((s.rcs - 10f64.powf(0.7)).abs() < 1e-12);
    }

    #[test]
    fn parameter_setter_handles_both_number_kinds() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.with_parameter("link.tx_power_dbm", 20.0).unwrap().link.tx_power_dbm, 20.0);
        assert_eq!(cfg.with_parameter("sensing.n_samples", 7.0).unwrap().sensing.n_samples, 7);
        assert!(cfg.with_parameter("sensing.n_samples", 7.5).is_err());
        assert!(cfg.with_parameter("link.nope", 1.0).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.sweep = Some(SweepSpec {
            parameter: "link.tx_power_dbm".into(),
            values: vec![0.0, 10.0],
        });
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }
}
