//! Scenario configuration: TOML files, presets, and validation.

use std::fmt;
use std::path::Path;

use redris_core::baselines::DEFAULT_REFLECTIVE_GAMMA0_SCALE;
use redris_core::channel::{AngleSpread, ChannelScenario, DftOperator, LosMode};
use redris_core::perm_opt::{Regularization, DEFAULT_GAMMA0_SCALE};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown preset `{0}` (see `redris list-presets`)")]
    UnknownPreset(String),
}

fn field(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    RedrisFull,
    RedrisPartial,
    RedrisTwoPort,
    RedrisRandom,
    Reflective,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::RedrisFull,
        Scheme::RedrisPartial,
        Scheme::RedrisTwoPort,
        Scheme::RedrisRandom,
        Scheme::Reflective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::RedrisFull => "redris_full",
            Scheme::RedrisPartial => "redris_partial",
            Scheme::RedrisTwoPort => "redris_two_port",
            Scheme::RedrisRandom => "redris_random",
            Scheme::Reflective => "reflective",
        }
    }

    /// Fixed sub-stream id, independent of which schemes a config requests.
    pub(crate) fn stream(self) -> u64 {
        match self {
            Scheme::RedrisFull | Scheme::RedrisPartial => 2,
            Scheme::RedrisTwoPort => 3,
            Scheme::RedrisRandom => 4,
            Scheme::Reflective => 5,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LosSetting {
    BsRisOnly,
    BsRisAndRisUser,
}

impl From<LosSetting> for LosMode {
    fn from(l: LosSetting) -> Self {
        match l {
            LosSetting::BsRisOnly => LosMode::BsRisOnly,
            LosSetting::BsRisAndRisUser => LosMode::BsRisAndRisUser,
        }
    }
}

/// A scalar or a list in the TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

impl<T> From<Vec<T>> for OneOrMany<T> {
    fn from(v: Vec<T>) -> Self {
        OneOrMany::Many(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub eps: f64,
    pub max_iter: usize,
    /// Fixed R-LS regularization. When absent, `γ₀ = gamma0_scale · tr(AᴴA) tr(BBᴴ) / K²`
    /// is recomputed every step.
    pub gamma0: Option<f64>,
    pub gamma0_scale: f64,
    /// Relative ridge weight of the reflective baseline's phase update.
    pub reflective_gamma0_scale: f64,
}

impl OptimizerConfig {
    pub fn regularization(&self) -> Regularization {
        match self.gamma0 {
            Some(g) => Regularization::Fixed(g),
            None => Regularization::Relative(self.gamma0_scale),
        }
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            eps: 1e-4,
            max_iter: 50,
            gamma0: None,
            gamma0_scale: DEFAULT_GAMMA0_SCALE,
            reflective_gamma0_scale: DEFAULT_REFLECTIVE_GAMMA0_SCALE,
        }
    }
}

/// Propagation constants. Defaults follow the single-cell or multi-cell layout.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub d_bs_ris: Option<[f64; 2]>,
    pub d_ris_user: Option<[f64; 2]>,
    pub d_bs_user: Option<f64>,
    pub d0: Option<f64>,
    pub c0_db: Option<f64>,
    pub noise_dbm: Option<f64>,
    pub eta_bs_ris: Option<f64>,
    pub eta_ris_user: Option<f64>,
    pub eta_bs_user: Option<f64>,
    pub paths_bs_ris: Option<usize>,
    pub paths_ris_user: Option<usize>,
    pub paths_bs_user: Option<usize>,
    pub direct_link: Option<bool>,
    pub azimuth_max: Option<f64>,
    pub elevation_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    /// `M`: users, or single-antenna BSs in the multi-cell model.
    pub users: OneOrMany<usize>,
    /// `N`: BS antennas (single-cell only).
    #[serde(default = "one")]
    pub bs_antennas: usize,
    /// `K`: surface ports.
    pub ports: OneOrMany<usize>,
    /// Connection budget of the partial scheme; `K/4` (rounded down to even) when absent.
    #[serde(default)]
    pub np: Option<usize>,
    pub p_dbm: OneOrMany<f64>,
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_los")]
    pub los: LosSetting,
    #[serde(default)]
    pub multi_cell: bool,
    #[serde(default = "default_kappa")]
    pub kappa: OneOrMany<f64>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
}

fn one() -> usize {
    1
}

fn default_los() -> LosSetting {
    LosSetting::BsRisOnly
}

fn default_kappa() -> OneOrMany<f64> {
    OneOrMany::One(1.0)
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn port_values(&self) -> Vec<usize> {
        self.ports.to_vec()
    }

    pub fn user_values(&self) -> Vec<usize> {
        self.users.to_vec()
    }

    pub fn power_values(&self) -> Vec<f64> {
        self.p_dbm.to_vec()
    }

    pub fn kappa_values(&self) -> Vec<f64> {
        self.kappa.to_vec()
    }

    /// Connection budget used for `K` ports.
    pub fn budget_for(&self, ports: usize) -> usize {
        self.np.unwrap_or((ports / 4) & !1)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(field("trials", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(field("schemes", "list at least one scheme"));
        }
        let ports = self.port_values();
        let users = self.user_values();
        if ports.is_empty() {
            return Err(field("ports", "empty list"));
        }
        if users.is_empty() {
            return Err(field("users", "empty list"));
        }
        for &k in &ports {
            if DftOperator::new(k).is_err() {
                return Err(field("ports", format!("{k} is not an even perfect square")));
            }
            let np = self.budget_for(k);
            if np < 2 || !np.is_multiple_of(2) || np > k {
                return Err(field("np", format!("{np} must be even with 2 <= np <= {k}")));
            }
        }
        for &m in &users {
            if m == 0 {
                return Err(field("users", "must be at least 1"));
            }
            if self.multi_cell && ports.iter().any(|&k| k <= m) {
                return Err(field("users", format!("{m} cells need more than {m} ports")));
            }
        }
        if !self.multi_cell && self.bs_antennas == 0 {
            return Err(field("bs_antennas", "must be at least 1"));
        }
        let powers = self.power_values();
        if powers.is_empty() || powers.iter().any(|p| !p.is_finite()) {
            return Err(field("p_dbm", "list finite transmit powers"));
        }
        let kappas = self.kappa_values();
        if kappas.is_empty() || kappas.iter().any(|&k| !(k > 0.0 && k <= 1.0)) {
            return Err(field("kappa", "values must lie in (0, 1]"));
        }
        if self.schemes.contains(&Scheme::RedrisTwoPort) && users.iter().any(|&m| m != 1) {
            return Err(field("schemes", "redris_two_port needs users = 1"));
        }
        if !(self.optimizer.eps > 0.0) {
            return Err(field("optimizer.eps", "must be positive"));
        }
        if !(self.optimizer.gamma0_scale > 0.0) {
            return Err(field("optimizer.gamma0_scale", "must be positive"));
        }
        if !(self.optimizer.reflective_gamma0_scale > 0.0) {
            return Err(field("optimizer.reflective_gamma0_scale", "must be positive"));
        }
        if let Some(g) = self.optimizer.gamma0 {
            if !(g > 0.0) {
                return Err(field("optimizer.gamma0", "must be positive"));
            }
        }
        for &k in &ports {
            for &m in &users {
                self.channel_scenario(k, m)
                    .validate()
                    .map_err(|e| field("channel", e.to_string()))?;
            }
        }
        Ok(())
    }

    /// Channel scenario for one `(K, M)` point of the sweep.
    pub fn channel_scenario(&self, ports: usize, users: usize) -> ChannelScenario {
        let mut s = if self.multi_cell {
            ChannelScenario::multi_cell(users, ports)
        } else {
            ChannelScenario::single_cell(users, self.bs_antennas, ports)
        };
        s.los = self.los.into();
        let c = &self.channel;
        if let Some([lo, hi]) = c.d_bs_ris {
            s.d_bs_ris = (lo, hi);
        }
        if let Some([lo, hi]) = c.d_ris_user {
            s.d_ris_user = (lo, hi);
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = c.$f { s.$f = v; } )* };
        }
        set!(
            d_bs_user,
            d0,
            c0_db,
            noise_dbm,
            eta_bs_ris,
            eta_ris_user,
            eta_bs_user,
            paths_bs_ris,
            paths_ris_user,
            paths_bs_user,
            direct_link
        );
        let default = AngleSpread::default();
        s.angles = AngleSpread {
            az_max: c.azimuth_max.unwrap_or(default.az_max),
            el_max: c.elevation_max.unwrap_or(default.el_max),
        };
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
users = 4
bs_antennas = 16
ports = 64
p_dbm = [10, 20, 30]
schemes = ["redris_full", "reflective"]
trials = 3
"#;

    #[test]
    fn minimal_file_parses_with_defaults() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(cfg.port_values(), vec![64]);
        assert_eq!(cfg.budget_for(64), 16);
        assert_eq!(cfg.kappa_values(), vec![1.0]);
        assert_eq!(cfg.los, LosSetting::BsRisOnly);
        assert_eq!(cfg.optimizer.max_iter, 50);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = MINIMAL.replace("ports = 64", "ports = 60");
        let err = ScenarioConfig::from_toml_str(&bad).unwrap_err().to_string();
        assert!(err.contains("`ports`"), "{err}");
        let bad = MINIMAL.replace("trials = 3", "trials = 0");
        assert!(ScenarioConfig::from_toml_str(&bad)
            .unwrap_err()
            .to_string()
            .contains("`trials`"));
        let bad = MINIMAL.replace("\"reflective\"", "\"redris_two_port\"");
        assert!(ScenarioConfig::from_toml_str(&bad)
            .unwrap_err()
            .to_string()
            .contains("`schemes`"));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ScenarioConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn channel_overrides_apply() {
        let text = format!("{MINIMAL}\n[channel]\nd_bs_ris = [100, 200]\ndirect_link = false\n");
        let cfg = ScenarioConfig::from_toml_str(&text).unwrap();
        let s = cfg.channel_scenario(64, 4);
        assert_eq!(s.d_bs_ris, (100.0, 200.0));
        assert!(!s.direct_link);
        assert_eq!(s.d_ris_user, (10.0, 50.0));
    }
}
