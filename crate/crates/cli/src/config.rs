//! Scenario files: strict JSON, defaults made explicit on validation.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use nlwitness_core::dynamics::DephasingModel;
use nlwitness_core::model::{
    build_dimer, build_general, gibbs_populations, ClassicalMixture, DimerParams, ExcitonModel,
};
use nlwitness_core::operator::{validate_density, Operator, DEFAULT_TOLERANCE};
use nlwitness_core::pulse::{PulseEvent, PulseMode};
use nlwitness_core::response::SignPattern;
use nlwitness_core::scan::{ScanRequest, UniformAxis};
use nlwitness_core::witness::{
    ControlSource, Detection, ExperimentSpec, InputState, ProtocolConfig, SignalMode,
    DEFAULT_WITNESS_TOLERANCE,
};
use nlwitness_core::Complex64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("missing `{0}` block")]
    Missing(&'static str),
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Maps a core error to the config field it came from.
fn at(field: &str) -> impl Fn(nlwitness_core::Error) -> ConfigError + '_ {
    move |e| match e {
        nlwitness_core::Error::InvalidParameter { name, reason } => {
            invalid(format!("{field}.{name}"), reason)
        }
        other => invalid(field, other.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    pub pulses: Vec<PulseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Dimer {
        omega_a: f64,
        omega_b: f64,
        j_coupling: f64,
        #[serde(default = "one")]
        mu_a: f64,
        #[serde(default = "one")]
        mu_b: f64,
    },
    /// Coupled two-level sites; `couplings` defaults to zeros and `dipoles`
    /// to ones.
    Sites {
        site_energies: Vec<f64>,
        #[serde(default)]
        couplings: Vec<Vec<f64>>,
        #[serde(default)]
        dipoles: Vec<f64>,
        #[serde(default = "yes")]
        two_exciton: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    Uniform {
        #[serde(default)]
        gamma: f64,
        #[serde(default)]
        population_decay: bool,
    },
    Matrix {
        rates: Vec<Vec<f64>>,
        #[serde(default)]
        population_decay: bool,
    },
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig::Uniform {
            gamma: 0.0,
            population_decay: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub arrival: f64,
    #[serde(default = "impulsive")]
    pub mode: PulseMode,
    #[serde(default = "one")]
    pub area: f64,
    #[serde(default)]
    pub width: f64,
    #[serde(default)]
    pub carrier: f64,
    /// Defaults to the pulse's position (1, 2, 3).
    #[serde(default)]
    pub wavevector: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputConfig {
    Eigenstate {
        label: String,
    },
    Mixture {
        populations: Vec<f64>,
    },
    Gibbs {
        beta: f64,
    },
    /// Density matrix in the exciton basis; `imag` defaults to zeros.
    Density {
        real: Vec<Vec<f64>>,
        #[serde(default)]
        imag: Vec<Vec<f64>>,
    },
    /// Normalized state vector `re + i im` in the exciton basis.
    Pure {
        re: Vec<f64>,
        #[serde(default)]
        im: Vec<f64>,
    },
}

impl Default for InputConfig {
    fn default() -> Self {
        InputConfig::Eigenstate { label: "g".into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    Protocol,
    Main,
    Control,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub kind: ExperimentKind,
    #[serde(default)]
    pub input: InputConfig,
    #[serde(default = "rephasing")]
    pub pattern: String,
    #[serde(default = "impulsive_signal")]
    pub mode: SignalMode,
    #[serde(default)]
    pub semi_impulsive: bool,
    #[serde(default)]
    pub detection: Detection,
    pub detection_time: f64,
    #[serde(default)]
    pub skip_first_pulse: bool,
    #[serde(default = "eigenstate_controls")]
    pub controls: ControlSource,
    #[serde(default = "witness_tolerance")]
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default = "three")]
    pub order: usize,
    /// Defaults by order: `-++`, `-+`, `+`.
    #[serde(default)]
    pub pattern: Option<String>,
    #[serde(default = "zero_axis")]
    pub t1: UniformAxis,
    #[serde(default = "zero_axis")]
    pub t2: UniformAxis,
    pub t3: UniformAxis,
    #[serde(default)]
    pub input: InputConfig,
    #[serde(default = "impulsive_signal")]
    pub mode: SignalMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "scan_csv")]
    pub scan_csv: String,
    #[serde(default = "witness_json")]
    pub witness_json: String,
    #[serde(default = "spectrum_csv")]
    pub spectrum_csv: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            scan_csv: scan_csv(),
            witness_json: witness_json(),
            spectrum_csv: spectrum_csv(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn three() -> usize {
    3
}
fn impulsive() -> PulseMode {
    PulseMode::Impulsive
}
fn impulsive_signal() -> SignalMode {
    SignalMode::Impulsive
}
fn rephasing() -> String {
    "-++".into()
}
fn eigenstate_controls() -> ControlSource {
    ControlSource::Eigenstates
}
fn witness_tolerance() -> f64 {
    DEFAULT_WITNESS_TOLERANCE
}
fn zero_axis() -> UniformAxis {
    UniformAxis::single(0.0)
}
fn scan_csv() -> String {
    "scan.csv".into()
}
fn witness_json() -> String {
    "witness.json".into()
}
fn spectrum_csv() -> String {
    "spectrum.csv".into()
}

/// Reads, parses and validates a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })?;
    raw.normalized()
}

/// serde_json appends " at line L column C"; the position is reported separately.
fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(k) => message[..k].to_string(),
        None => message.to_string(),
    }
}

fn finite(field: &str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, "must be finite"))
    }
}

fn parse_pattern(field: &str, text: &str) -> Result<SignPattern, ConfigError> {
    text.parse()
        .map_err(|e: nlwitness_core::Error| invalid(field, e.to_string()))
}

impl ScenarioConfig {
    /// Checks every block and fills in defaults that depend on other fields.
    pub fn normalized(mut self) -> Result<Self, ConfigError> {
        if let SystemConfig::Sites {
            site_energies,
            couplings,
            dipoles,
            ..
        } = &mut self.system
        {
            let n = site_energies.len();
            if couplings.is_empty() {
                *couplings = vec![vec![0.0; n]; n];
            }
            if dipoles.is_empty() {
                *dipoles = vec![1.0; n];
            }
        }
        for (k, p) in self.pulses.iter_mut().enumerate() {
            p.wavevector.get_or_insert(k + 1);
        }
        if let Some(scan) = &mut self.scan {
            if scan.pattern.is_none() {
                scan.pattern = Some(
                    match scan.order {
                        1 => "+",
                        2 => "-+",
                        _ => "-++",
                    }
                    .into(),
                );
            }
        }
        if let Some(exp) = &mut self.experiment {
            if let InputConfig::Density { real, imag } = &mut exp.input {
                if imag.is_empty() {
                    *imag = vec![vec![0.0; real.len()]; real.len()];
                }
            }
            if let InputConfig::Pure { re, im } = &mut exp.input {
                if im.is_empty() {
                    *im = vec![0.0; re.len()];
                }
            }
        }
        self.build()?;
        Ok(self)
    }

    pub fn model(&self) -> Result<ExcitonModel, ConfigError> {
        match &self.system {
            SystemConfig::Dimer {
                omega_a,
                omega_b,
                j_coupling,
                mu_a,
                mu_b,
            } => {
                for (name, v) in [
                    ("omega_a", omega_a),
                    ("omega_b", omega_b),
                    ("j_coupling", j_coupling),
                    ("mu_a", mu_a),
                    ("mu_b", mu_b),
                ] {
                    finite(&format!("system.{name}"), *v)?;
                }
                let params = DimerParams::new(*omega_a, *omega_b, *j_coupling).with_dipoles(*mu_a, *mu_b);
                build_dimer(&params).map_err(at("system"))
            }
            SystemConfig::Sites {
                site_energies,
                couplings,
                dipoles,
                two_exciton,
            } => {
                if site_energies.is_empty() {
                    return Err(invalid("system.site_energies", "needs at least one site"));
                }
                build_general(site_energies, couplings, dipoles, *two_exciton).map_err(at("system"))
            }
        }
    }

    pub fn noise_model(&self, dim: usize) -> Result<DephasingModel, ConfigError> {
        match &self.noise {
            NoiseConfig::Uniform {
                gamma,
                population_decay,
            } => {
                if !(gamma.is_finite() && *gamma >= 0.0) {
                    return Err(invalid("noise.gamma", format!("must be non-negative, got {gamma}")));
                }
                let m = if *population_decay {
                    DephasingModel::uniform_with_population_decay(dim, *gamma)
                } else {
                    DephasingModel::uniform(dim, *gamma)
                };
                m.map_err(at("noise"))
            }
            NoiseConfig::Matrix {
                rates,
                population_decay,
            } => {
                if rates.len() != dim {
                    return Err(invalid(
                        "noise.rates",
                        format!("expected a {dim}x{dim} matrix, got {} rows", rates.len()),
                    ));
                }
                DephasingModel::from_matrix(rates.clone(), *population_decay).map_err(at("noise"))
            }
        }
    }

    pub fn pulse_events(&self) -> Result<Vec<PulseEvent>, ConfigError> {
        if self.pulses.len() != 3 {
            return Err(invalid(
                "pulses",
                format!("expected 3 pulses, got {}", self.pulses.len()),
            ));
        }
        self.pulses
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let field = format!("pulses[{k}]");
                let event = PulseEvent {
                    arrival: p.arrival,
                    mode: p.mode,
                    area: p.area,
                    width: p.width,
                    carrier: p.carrier,
                    wavevector: p.wavevector.unwrap_or(k + 1),
                };
                event.validate().map_err(|e| match e {
                    nlwitness_core::Error::InvalidParameter { name, reason } => invalid(
                        format!("{field}.{}", name.trim_start_matches("pulse.")),
                        reason,
                    ),
                    other => invalid(field.clone(), other.to_string()),
                })?;
                Ok(event)
            })
            .collect()
    }

    /// Everything the subcommands need, built from a validated config.
    pub fn build(&self) -> Result<Scenario, ConfigError> {
        let model = self.model()?;
        let noise = self.noise_model(model.dim())?;
        let pulses = self.pulse_events()?;
        let protocol = match &self.experiment {
            Some(exp) => Some(build_protocol(exp, &model, &noise, &pulses)?),
            None => None,
        };
        let scan = match &self.scan {
            Some(scan) => Some(build_scan(scan, &model, &noise, &pulses)?),
            None => None,
        };
        Ok(Scenario {
            experiment_kind: self.experiment.as_ref().map(|e| e.kind),
            protocol,
            scan,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub experiment_kind: Option<ExperimentKind>,
    pub protocol: Option<ProtocolConfig>,
    pub scan: Option<ScanRequest>,
}

fn build_input(
    field: &str,
    input: &InputConfig,
    model: &ExcitonModel,
) -> Result<InputState, ConfigError> {
    let n = model.dim();
    match input {
        InputConfig::Eigenstate { label } => {
            model.index_of(label).map_err(|_| {
                invalid(
                    format!("{field}.label"),
                    format!("unknown label `{label}`, expected one of {:?}", model.labels()),
                )
            })?;
            Ok(InputState::Eigenstate(label.clone()))
        }
        InputConfig::Mixture { populations } => {
            if populations.len() != n {
                return Err(invalid(
                    format!("{field}.populations"),
                    format!("expected {n} entries, got {}", populations.len()),
                ));
            }
            ClassicalMixture::new(populations.clone())
                .map(InputState::Mixture)
                .map_err(|e| invalid(format!("{field}.populations"), e.to_string()))
        }
        InputConfig::Gibbs { beta } => gibbs_populations(model, *beta)
            .map(InputState::Mixture)
            .map_err(|e| invalid(format!("{field}.beta"), e.to_string())),
        InputConfig::Density { real, imag } => {
            let shape_ok = real.len() == n
                && imag.len() == n
                && real.iter().chain(imag).all(|r| r.len() == n);
            if !shape_ok {
                return Err(invalid(field, format!("real and imag must be {n}x{n}")));
            }
            let entries = Operator::new(ndarray_from(real, imag))
                .map_err(|e| invalid(field, e.to_string()))?;
            validate_density(&entries, DEFAULT_TOLERANCE)
                .map(InputState::Density)
                .map_err(|e| invalid(field, e.to_string()))
        }
        InputConfig::Pure { re, im } => {
            if re.len() != n || im.len() != n {
                return Err(invalid(field, format!("re and im need {n} entries")));
            }
            let psi: Vec<Complex64> = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            if !((norm - 1.0).abs() <= 1e-9) {
                return Err(invalid(field, format!("state vector has norm^2 {norm}, expected 1")));
            }
            let rho = ndarray::Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj());
            let op = Operator::new(rho).map_err(|e| invalid(field, e.to_string()))?;
            validate_density(&op, DEFAULT_TOLERANCE)
                .map(InputState::Density)
                .map_err(|e| invalid(field, e.to_string()))
        }
    }
}

fn ndarray_from(real: &[Vec<f64>], imag: &[Vec<f64>]) -> ndarray::Array2<Complex64> {
    let n = real.len();
    ndarray::Array2::from_shape_fn((n, n), |(i, j)| Complex64::new(real[i][j], imag[i][j]))
}

fn check_mode(field: &str, mode: &SignalMode, pulses: &[PulseEvent]) -> Result<(), ConfigError> {
    if let SignalMode::Convolved { step } = mode {
        if !(step.is_finite() && *step > 0.0) {
            return Err(invalid(format!("{field}.step"), format!("must be positive, got {step}")));
        }
        if let Some(k) = pulses.iter().position(|p| p.mode == PulseMode::Impulsive) {
            return Err(invalid(
                format!("pulses[{k}].mode"),
                "convolved mode needs finite pulses",
            ));
        }
    }
    Ok(())
}

fn build_protocol(
    exp: &ExperimentConfig,
    model: &ExcitonModel,
    noise: &DephasingModel,
    pulses: &[PulseEvent],
) -> Result<ProtocolConfig, ConfigError> {
    let pattern = parse_pattern("experiment.pattern", &exp.pattern)?;
    if pattern.order() != 3 {
        return Err(invalid("experiment.pattern", "needs three signs"));
    }
    if pulses.windows(2).any(|w| w[1].arrival <= w[0].arrival) {
        return Err(invalid("pulses", "arrival times must be strictly increasing"));
    }
    finite("experiment.detection_time", exp.detection_time)?;
    if exp.detection_time < pulses[2].arrival {
        return Err(invalid(
            "experiment.detection_time",
            format!("must not precede the last pulse at {}", pulses[2].arrival),
        ));
    }
    check_mode("experiment.mode", &exp.mode, pulses)?;
    if !(exp.tolerance >= 0.0) {
        return Err(invalid("experiment.tolerance", "must be non-negative"));
    }
    if let ControlSource::Gibbs { betas } = &exp.controls {
        if betas.len() < model.dim() {
            return Err(invalid(
                "experiment.controls.betas",
                format!("need at least {} temperatures, got {}", model.dim(), betas.len()),
            ));
        }
        if let Some(b) = betas.iter().find(|b| b.is_nan() || **b < 0.0) {
            return Err(invalid("experiment.controls.betas", format!("must be non-negative, got {b}")));
        }
    }
    let input = build_input("experiment.input", &exp.input, model)?;
    if exp.kind == ExperimentKind::Control {
        if let InputState::Density(rho) = &input {
            ClassicalMixture::from_density(rho, DEFAULT_TOLERANCE)
                .map_err(|e| invalid("experiment.input", e.to_string()))?;
        }
    }
    Ok(ProtocolConfig {
        experiment: ExperimentSpec {
            model: model.clone(),
            noise: noise.clone(),
            pulses: pulses.to_vec(),
            detection_time: exp.detection_time,
            pattern,
            input,
            mode: exp.mode,
            semi_impulsive: exp.semi_impulsive,
            detection: exp.detection,
            skip_first_pulse: exp.skip_first_pulse,
        },
        controls: exp.controls.clone(),
        tolerance: exp.tolerance,
    })
}

fn build_scan(
    scan: &ScanConfig,
    model: &ExcitonModel,
    noise: &DephasingModel,
    pulses: &[PulseEvent],
) -> Result<ScanRequest, ConfigError> {
    if !(1..=3).contains(&scan.order) {
        return Err(invalid("scan.order", format!("must be 1, 2 or 3, got {}", scan.order)));
    }
    let pattern = parse_pattern("scan.pattern", scan.pattern.as_deref().unwrap_or("-++"))?;
    if pattern.order() != scan.order {
        return Err(invalid(
            "scan.pattern",
            format!("needs {} signs for order {}", scan.order, scan.order),
        ));
    }
    for (name, axis) in [("scan.t1", &scan.t1), ("scan.t2", &scan.t2), ("scan.t3", &scan.t3)] {
        axis.validate("axis").map_err(|e| match e {
            nlwitness_core::Error::InvalidParameter { reason, .. } => invalid(name, reason),
            other => invalid(name, other.to_string()),
        })?;
    }
    check_mode("scan.mode", &scan.mode, pulses)?;
    let input = match build_input("scan.input", &scan.input, model)? {
        InputState::Density(rho) => rho,
        InputState::Eigenstate(label) => nlwitness_core::model::eigenstate(model, &label)
            .map_err(|e| invalid("scan.input", e.to_string()))?,
        InputState::Mixture(m) => m.to_density(),
    };
    Ok(ScanRequest {
        model: model.clone(),
        noise: noise.clone(),
        input,
        pulses: [pulses[0], pulses[1], pulses[2]],
        order: scan.order,
        pattern,
        t1: scan.t1,
        t2: scan.t2,
        t3: scan.t3,
        mode: scan.mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "system": {"kind": "dimer", "omega_a": 10.0, "omega_b": 9.0, "j_coupling": 0.5},
        "pulses": [{"arrival": 0.0}, {"arrival": 1.0}, {"arrival": 2.0}],
        "experiment": {"detection_time": 3.0},
        "scan": {"t3": {"start": 0.0, "step": 0.1, "count": 4}}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(
            cfg.noise,
            NoiseConfig::Uniform {
                gamma: 0.0,
                population_decay: false
            }
        );
        assert_eq!(cfg.pulses[2].wavevector, Some(3));
        assert_eq!(cfg.pulses[0].area, 1.0);
        let exp = cfg.experiment.as_ref().unwrap();
        assert_eq!(exp.pattern, "-++");
        assert_eq!(exp.tolerance, 1e-9);
        assert_eq!(exp.controls, ControlSource::Eigenstates);
        assert_eq!(cfg.scan.as_ref().unwrap().pattern.as_deref(), Some("-++"));
        let echoed = serde_json::to_string(&cfg).unwrap();
        assert!(echoed.contains("\"mu_a\":1.0"));
        assert!(echoed.contains("\"witness_json\":\"witness.json\""));
    }

    #[test]
    fn validated_config_round_trips() {
        let cfg = parse_config(MINIMAL).unwrap();
        let again = parse_config(&serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn negative_gamma_names_the_field() {
        let text = MINIMAL.replace(
            r#""pulses""#,
            r#""noise": {"kind": "uniform", "gamma": -0.1}, "pulses""#,
        );
        match parse_config(&text) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "noise.gamma"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected_with_position() {
        let text = MINIMAL.replace(r#""detection_time": 3.0"#, r#""detection_time": 3.0, "gama": 1"#);
        match parse_config(&text) {
            Err(ConfigError::Parse { line, message, .. }) => {
                assert!(message.contains("gama"), "{message}");
                assert_eq!(line, 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_label_and_bad_width_are_reported() {
        let text = MINIMAL.replace(
            r#""detection_time": 3.0"#,
            r#""detection_time": 3.0, "input": {"kind": "eigenstate", "label": "e7"}"#,
        );
        match parse_config(&text) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "experiment.input.label"),
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace(
            r#"{"arrival": 1.0}"#,
            r#"{"arrival": 1.0, "mode": "finite", "width": -1.0}"#,
        );
        match parse_config(&text) {
            Err(ConfigError::Invalid { field, .. }) => assert_eq!(field, "pulses[1].width"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_line() {
        match parse_config("{\n  \"system\": \n}") {
            Err(ConfigError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
