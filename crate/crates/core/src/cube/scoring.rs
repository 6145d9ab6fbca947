use serde::{Deserialize, Serialize};

/// Look-ahead scoring presets. `a` and `b` are the propagation counts of the
/// two polarities of a candidate variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scoring {
    /// `min(a,b) + 1e-9 (a+b)`
    #[default]
    Default,
    /// `a + b + ab`
    March,
    /// `8 min + 2 min/(max+1) + a + b`
    Ks,
    /// `min + 10 (min/(max+1))^2`
    Tf,
    /// `ab + a + b`
    Smc,
}

pub const EPSILON: f64 = 1e-9;

impl Scoring {
    pub const ALL: [Scoring; 5] = [Scoring::Default, Scoring::March, Scoring::Ks, Scoring::Tf, Scoring::Smc];

    pub fn name(self) -> &'static str {
        match self {
            Scoring::Default => "default",
            Scoring::March => "march",
            Scoring::Ks => "ks",
            Scoring::Tf => "tf",
            Scoring::Smc => "smc",
        }
    }

    pub fn eval(self, a: f64, b: f64) -> f64 {
        let (lo, hi) = (a.min(b), a.max(b));
        match self {
            Scoring::Default => lo + EPSILON * (a + b),
            Scoring::March => a + b + a * b,
            Scoring::Ks => 8.0 * lo + 2.0 * lo / (hi + 1.0) + a + b,
            Scoring::Tf => lo + 10.0 * (lo / (hi + 1.0)).powi(2),
            Scoring::Smc => a * b + a + b,
        }
    }
}

pub fn score_presets() -> Vec<Scoring> {
    Scoring::ALL.to_vec()
}
