//! Named scenarios. The `-desk` presets are sized to finish in minutes; the `-large`
//! presets use the full surface (K = 256, N = 32) and take much longer.

use crate::config::{
    ChannelConfig, ConfigError, LosSetting, OneOrMany, OptimizerConfig, ScenarioConfig, Scheme,
};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    build: fn() -> ScenarioConfig,
}

impl Preset {
    pub fn config(&self) -> ScenarioConfig {
        let mut cfg = (self.build)();
        cfg.name = self.name.to_string();
        cfg
    }
}

use Scheme::*;

fn base(users: usize, n: usize, k: usize, schemes: &[Scheme]) -> ScenarioConfig {
    ScenarioConfig {
        name: String::new(),
        users: OneOrMany::One(users),
        bs_antennas: n,
        ports: OneOrMany::One(k),
        np: None,
        p_dbm: vec![10.0, 20.0, 30.0].into(),
        schemes: schemes.to_vec(),
        los: LosSetting::BsRisOnly,
        multi_cell: false,
        kappa: OneOrMany::One(1.0),
        trials: 50,
        seed: 1,
        optimizer: OptimizerConfig::default(),
        channel: ChannelConfig::default(),
    }
}

const SINGLE_CELL: &[Scheme] = &[RedrisFull, RedrisPartial, RedrisRandom, Reflective];
const SINGLE_USER: &[Scheme] = &[RedrisFull, RedrisPartial, RedrisTwoPort, RedrisRandom, Reflective];
const MULTI_CELL: &[Scheme] = &[RedrisFull, RedrisPartial, RedrisRandom, Reflective];

fn multi(users: Vec<usize>, ports: Vec<usize>) -> ScenarioConfig {
    ScenarioConfig {
        users: users.into(),
        ports: ports.into(),
        multi_cell: true,
        ..base(1, 1, 64, MULTI_CELL)
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig5a-desk",
        summary: "M=4, N=16, K=64, sum rate vs P, NLOS RIS-user links",
        build: || base(4, 16, 64, SINGLE_CELL),
    },
    Preset {
        name: "fig5b-desk",
        summary: "single user, N=16, K=64, sum rate vs P including the two-port solution",
        build: || base(1, 16, 64, SINGLE_USER),
    },
    Preset {
        name: "fig5c-desk",
        summary: "M=4, N=16, sum rate vs K in {16, 36, 64} at P=30 dBm",
        build: || ScenarioConfig {
            ports: vec![16, 36, 64].into(),
            p_dbm: OneOrMany::One(30.0),
            ..base(4, 16, 64, SINGLE_CELL)
        },
    },
    Preset {
        name: "fig6-desk",
        summary: "fig5a-desk with LOS on the RIS-user links",
        build: || ScenarioConfig {
            los: LosSetting::BsRisAndRisUser,
            ..base(4, 16, 64, SINGLE_CELL)
        },
    },
    Preset {
        name: "fig7-desk",
        summary: "M=4, N=16, K=64, imperfect CSI with kappa in {1, 0.99, 0.95}",
        build: || ScenarioConfig {
            kappa: vec![1.0, 0.99, 0.95].into(),
            ..base(4, 16, 64, &[RedrisFull, RedrisPartial, Reflective])
        },
    },
    Preset {
        name: "fig8a-desk",
        summary: "multi-cell, M=8 single-antenna BSs, K in {36, 64}, Np=16",
        build: || ScenarioConfig {
            p_dbm: OneOrMany::One(30.0),
            np: Some(16),
            ..multi(vec![8], vec![36, 64])
        },
    },
    Preset {
        name: "fig8b-desk",
        summary: "multi-cell, K=64, sum rate vs M in {2, 4, 8, 12}",
        build: || ScenarioConfig {
            p_dbm: OneOrMany::One(30.0),
            schemes: vec![RedrisFull, Reflective],
            ..multi(vec![2, 4, 8, 12], vec![64])
        },
    },
    Preset {
        name: "smoke",
        summary: "tiny single-cell run for quick checks",
        build: || ScenarioConfig {
            trials: 3,
            p_dbm: OneOrMany::One(20.0),
            ..base(2, 4, 16, SINGLE_CELL)
        },
    },
    Preset {
        name: "fig5a-large",
        summary: "M=4, N=32, K=256, sum rate vs P (slow)",
        build: || ScenarioConfig {
            p_dbm: vec![0.0, 10.0, 20.0, 30.0, 40.0].into(),
            ..base(4, 32, 256, SINGLE_CELL)
        },
    },
    Preset {
        name: "fig5c-large",
        summary: "M=4, N=32, sum rate vs K up to 256 (slow)",
        build: || ScenarioConfig {
            ports: vec![16, 64, 144, 256].into(),
            p_dbm: OneOrMany::One(30.0),
            ..base(4, 32, 256, SINGLE_CELL)
        },
    },
    Preset {
        name: "fig8b-large",
        summary: "multi-cell, K=256, sum rate vs M (slow)",
        build: || ScenarioConfig {
            p_dbm: OneOrMany::One(30.0),
            ..multi(vec![2, 4, 8, 12, 16], vec![256])
        },
    },
];

pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .map(Preset::config)
        .ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))
}
