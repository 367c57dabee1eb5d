//! Line-based `key = value` scenario files.
//!
//! ```text
//! # closed evolution from the vacuum
//! scenario = closed_zero_t
//! omega = 0.5
//! kappa = 3
//! ```
//!
//! Everything after `#` is a comment. Keys may appear once. Unset keys take
//! their defaults: `dt = 0.01`, `t_max = 30`, `Omega = 0.05`, trap
//! frequencies on resonance (`nu = omega + Omega`), `alpha = 1`, no bath.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use nems_entangle::analysis::{linear_grid, StudyPlan, SweepVariable};
use nems_entangle::closed::InitialState;
use nems_entangle::model::SystemParams;
use nems_entangle::open::BathParams;

pub const KEYS: [&str; 18] = [
    "scenario",
    "omega",
    "kappa",
    "Omega",
    "nu1",
    "nu2",
    "kappa1",
    "kappa2",
    "alpha",
    "zeta",
    "n_bar",
    "t_max",
    "dt",
    "sweep_var",
    "sweep_min",
    "sweep_max",
    "sweep_steps",
    "output_path",
];

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_MAX: f64 = 30.0;
pub const DEFAULT_ION_COUPLING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line the problem was found on, if it belongs to one.
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    ClosedZeroT,
    ClosedThermal,
    Open,
    SweepKappa,
    SweepAlpha,
    SweepNbar,
    SweepZeta,
    FitReport,
    Spectrum,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::ClosedZeroT,
        Scenario::ClosedThermal,
        Scenario::Open,
        Scenario::SweepKappa,
        Scenario::SweepAlpha,
        Scenario::SweepNbar,
        Scenario::SweepZeta,
        Scenario::FitReport,
        Scenario::Spectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::ClosedZeroT => "closed_zero_t",
            Scenario::ClosedThermal => "closed_thermal",
            Scenario::Open => "open",
            Scenario::SweepKappa => "sweep_kappa",
            Scenario::SweepAlpha => "sweep_alpha",
            Scenario::SweepNbar => "sweep_nbar",
            Scenario::SweepZeta => "sweep_zeta",
            Scenario::FitReport => "fit_report",
            Scenario::Spectrum => "spectrum",
        }
    }

    pub fn sweep_variable(self) -> Option<SweepVariable> {
        match self {
            Scenario::SweepKappa => Some(SweepVariable::Kappa),
            Scenario::SweepAlpha => Some(SweepVariable::Alpha),
            Scenario::SweepNbar => Some(SweepVariable::NBar),
            Scenario::SweepZeta => Some(SweepVariable::Zeta),
            _ => None,
        }
    }

    /// Sweeps and the fit report run on the symmetric resonant system.
    fn needs_resonance(self) -> bool {
        self.sweep_variable().is_some() || self == Scenario::FitReport
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|c| c.name()).collect();
            format!("unknown scenario `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub system: SystemParams,
    pub initial: InitialState,
    pub bath: BathParams,
    pub t_max: f64,
    pub dt: f64,
    pub sweep: Option<SweepGrid>,
    pub output_path: PathBuf,
}

impl ScenarioConfig {
    /// Thermal parameter of the initial resonator state.
    pub fn alpha(&self) -> f64 {
        match self.initial {
            InitialState::CoherentProduct => 1.0,
            InitialState::NemsThermal { alpha } => alpha,
        }
    }
}

struct Entries {
    map: HashMap<&'static str, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> Option<usize> {
        self.map.get(key).map(|e| e.0)
    }

    fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<(usize, T)>, ConfigError> {
        let Some((line, raw)) = self.map.get(key) else {
            return Ok(None);
        };
        raw.parse::<T>()
            .map(|v| Some((*line, v)))
            .map_err(|_| ConfigError::at(*line, format!("cannot parse `{raw}` as a value for {key}")))
    }

    fn real(&self, key: &str) -> Result<Option<(usize, f64)>, ConfigError> {
        let v = self.get::<f64>(key)?;
        if let Some((line, x)) = v {
            if !x.is_finite() {
                return Err(ConfigError::at(line, format!("{key} must be finite")));
            }
        }
        Ok(v)
    }
}

fn require(ok: bool, line: Option<usize>, message: impl Into<String>) -> Result<(), ConfigError> {
    if ok {
        return Ok(());
    }
    let message = message.into();
    Err(match line {
        Some(l) => ConfigError::at(l, message),
        None => ConfigError::global(message),
    })
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::at(line, format!("expected key = value, got `{body}`")));
        };
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::at(line, format!("unknown key `{key}`")));
        };
        if let Some((first, _)) = map.get(known) {
            return Err(ConfigError::at(line, format!("{key} already set on line {first}")));
        }
        map.insert(known, (line, value.trim().to_string()));
    }
    Ok(Entries { map })
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let e = tokenize(text)?;

    let scenario = match e.map.get("scenario") {
        Some((line, raw)) => raw.parse::<Scenario>().map_err(|m| ConfigError::at(*line, m))?,
        None => return Err(ConfigError::global("missing required key `scenario`")),
    };
    let Some((omega_line, omega)) = e.real("omega")? else {
        return Err(ConfigError::global("missing required key `omega`"));
    };
    require(omega > 0.0, Some(omega_line), "omega must be positive")?;

    let (ion_line, ion_coupling) = match e.real("Omega")? {
        Some((l, v)) => (Some(l), v),
        None => (None, DEFAULT_ION_COUPLING),
    };
    require(ion_coupling >= 0.0, ion_line, "Omega must be nonnegative")?;

    if scenario.needs_resonance() {
        for key in ["nu1", "nu2", "kappa1", "kappa2"] {
            require(
                !e.has(key),
                e.line(key),
                format!("{} runs on the symmetric resonant system; remove {key}", scenario.name()),
            )?;
        }
    }

    let kappa = e.real("kappa")?;
    if let Some((l, k)) = kappa {
        require(k >= 0.0, Some(l), "kappa must be nonnegative")?;
    }
    let coupling = |key: &str| -> Result<f64, ConfigError> {
        if let Some((l, k)) = e.real(key)? {
            require(k >= 0.0, Some(l), format!("{key} must be nonnegative"))?;
            return Ok(k);
        }
        match kappa {
            Some((_, k)) => Ok(k),
            // The swept or study-defined coupling replaces this one.
            None if scenario.needs_resonance() => Ok(1.0),
            None => Err(ConfigError::global(format!("missing required key `kappa` (or `{key}`)"))),
        }
    };
    let kappa1 = coupling("kappa1")?;
    let kappa2 = coupling("kappa2")?;

    let trap = |key: &str| -> Result<f64, ConfigError> {
        match e.real(key)? {
            Some((l, nu)) => {
                require(nu > 0.0, Some(l), format!("{key} must be positive"))?;
                require(
                    ion_coupling < nu,
                    ion_line.or(Some(l)),
                    format!("Omega must be smaller than {key}"),
                )?;
                Ok(nu)
            }
            None => Ok(omega + ion_coupling),
        }
    };
    let nu1 = trap("nu1")?;
    let nu2 = trap("nu2")?;
    let system = SystemParams::new(omega, nu1, nu2, ion_coupling, kappa1, kappa2)
        .map_err(|err| ConfigError::global(err.to_string()))?;

    let alpha = e.real("alpha")?;
    if let Some((l, a)) = alpha {
        require(a >= 1.0, Some(l), "alpha must be at least 1")?;
        require(
            scenario != Scenario::ClosedZeroT || a == 1.0,
            Some(l),
            "closed_zero_t starts from the vacuum; use closed_thermal for alpha > 1",
        )?;
    }
    let initial = match scenario {
        Scenario::ClosedZeroT => InitialState::CoherentProduct,
        _ => InitialState::NemsThermal {
            alpha: alpha.map_or(1.0, |a| a.1),
        },
    };

    let zeta = e.real("zeta")?;
    let n_bar = e.real("n_bar")?;
    for (key, v) in [("zeta", zeta), ("n_bar", n_bar)] {
        if let Some((l, x)) = v {
            require(x >= 0.0, Some(l), format!("{key} must be nonnegative"))?;
        }
    }
    let bath = BathParams::new(zeta.map_or(0.0, |v| v.1), n_bar.map_or(0.0, |v| v.1))
        .map_err(|err| ConfigError::global(err.to_string()))?;

    let (dt_line, dt) = match e.real("dt")? {
        Some((l, v)) => (Some(l), v),
        None => (None, DEFAULT_DT),
    };
    require(dt > 0.0, dt_line, "dt must be positive")?;
    let (t_line, t_max) = match e.real("t_max")? {
        Some((l, v)) => (Some(l), v),
        None => (None, DEFAULT_T_MAX),
    };
    require(t_max > dt, t_line.or(dt_line), "t_max must exceed dt")?;

    let sweep = parse_sweep(&e, scenario)?;

    let output_path = match e.map.get("output_path") {
        Some((l, p)) => {
            require(!p.is_empty(), Some(*l), "output_path is empty")?;
            PathBuf::from(p)
        }
        None => PathBuf::from(format!("{}.csv", scenario.name())),
    };

    Ok(ScenarioConfig {
        scenario,
        system,
        initial,
        bath,
        t_max,
        dt,
        sweep,
        output_path,
    })
}

/// Grid of the standard study for each swept variable.
fn default_grid(var: SweepVariable) -> Vec<f64> {
    let plan = StudyPlan::default();
    match var {
        SweepVariable::Kappa => plan.kappa_grid,
        SweepVariable::Alpha => plan.alpha_grid,
        SweepVariable::NBar => plan.n_bar_grid,
        SweepVariable::Zeta => plan.zeta_grid,
    }
}

fn parse_sweep(e: &Entries, scenario: Scenario) -> Result<Option<SweepGrid>, ConfigError> {
    let keys = ["sweep_var", "sweep_min", "sweep_max", "sweep_steps"];
    let Some(variable) = scenario.sweep_variable() else {
        for key in keys {
            require(
                !e.has(key),
                e.line(key),
                format!("{key} only applies to sweep scenarios"),
            )?;
        }
        return Ok(None);
    };
    if let Some((l, name)) = e.get::<String>("sweep_var")? {
        require(
            SweepVariable::from_name(&name) == Some(variable),
            Some(l),
            format!("{} sweeps {}, not `{name}`", scenario.name(), variable.name()),
        )?;
    }

    let lo = e.real("sweep_min")?;
    let hi = e.real("sweep_max")?;
    let steps = e.get::<usize>("sweep_steps")?;
    if lo.is_none() && hi.is_none() && steps.is_none() {
        return Ok(Some(SweepGrid {
            variable,
            values: default_grid(variable),
        }));
    }
    let missing: Vec<&str> = [("sweep_min", lo.is_none()), ("sweep_max", hi.is_none()), ("sweep_steps", steps.is_none())]
        .iter()
        .filter(|m| m.1)
        .map(|m| m.0)
        .collect();
    require(
        missing.is_empty(),
        None,
        format!("incomplete sweep grid: missing {}", missing.join(", ")),
    )?;
    let ((lo_line, lo), (hi_line, hi), (steps_line, steps)) = (lo.unwrap(), hi.unwrap(), steps.unwrap());
    require(steps >= 1, Some(steps_line), "sweep_steps must be at least 1")?;
    if steps == 1 {
        require(hi == lo, Some(hi_line), "a single-point sweep needs sweep_max == sweep_min")?;
    } else {
        require(hi > lo, Some(hi_line), "sweep_max must exceed sweep_min")?;
    }
    let floor = if variable == SweepVariable::Alpha { 1.0 } else { 0.0 };
    require(
        lo >= floor,
        Some(lo_line),
        format!("{} must be at least {floor}", variable.name()),
    )?;
    let values = linear_grid(lo, hi, steps).map_err(|err| ConfigError::at(steps_line, err.to_string()))?;
    Ok(Some(SweepGrid { variable, values }))
}
