use serde::{Deserialize, Serialize};

use crate::analysis::{
    Dominance, Scenario, ValueEnumeration, DEFAULT_BUDGET, DEFAULT_GRID_STEP, DEFAULT_TOLERANCE,
};
use crate::auction::{AgentType, Setting, SettingKind};
use crate::error::{Error, Result};
use crate::strongtruth::{DescriptorKind, MechanismDescriptor};

/// On-disk scenario document. Every field is validated by [`ScenarioFile::build`]
/// before anything is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub setting: SettingSpec,
    pub agents: Vec<AgentSpec>,
    pub ervcg: ErvcgSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingSpec {
    pub kind: SettingKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Custom settings only: each outcome lists served agents (0-based).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub value: f64,
    pub gamma: Vec<f64>,
    /// Bid used by `run`; defaults to the value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErvcgSpec {
    pub delta: f64,
    #[serde(default = "unit_linear")]
    pub te: MechanismDescriptor,
}

fn unit_linear() -> MechanismDescriptor {
    MechanismDescriptor {
        kind: DescriptorKind::Linear,
        k: None,
        low: 0.0,
        high: 1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSpec {
    pub grid_step: f64,
    pub epsilon: f64,
    pub tolerance: f64,
    pub budget: u64,
    pub dominance: Dominance,
    pub values: ValueEnumeration,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            grid_step: DEFAULT_GRID_STEP,
            epsilon: 0.05,
            tolerance: DEFAULT_TOLERANCE,
            budget: DEFAULT_BUDGET,
            dominance: Dominance::Strict,
            values: ValueEnumeration::Corners,
        }
    }
}

pub(crate) fn nest(prefix: &str, e: Error) -> Error {
    match e {
        Error::Validation { path, message } => Error::Validation {
            path: format!("{prefix}.{path}"),
            message,
        },
        other => Error::validation(prefix, other.to_string()),
    }
}

impl ScenarioFile {
    /// Parses JSON, reporting the field path of the first problem.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::validation(if path == "." { String::new() } else { path }, e.into_inner().to_string())
        })?;
        file.build()?;
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn setting(&self) -> Result<Setting> {
        let s = &self.setting;
        let setting = match s.kind {
            SettingKind::SingleItem => {
                if s.k.is_some() {
                    return Err(Error::validation("setting.k", "only k-winners settings take k"));
                }
                Setting::single_item(s.n)
            }
            SettingKind::KWinners => {
                let k = s.k.ok_or_else(|| Error::validation("setting.k", "k-winners needs k"))?;
                Setting::k_winners(s.n, k)
            }
            SettingKind::Custom => {
                let outcomes = s
                    .outcomes
                    .as_ref()
                    .ok_or_else(|| Error::validation("setting.outcomes", "custom settings list their outcomes"))?;
                Setting::custom(s.n, outcomes)
            }
        };
        if s.kind != SettingKind::Custom && s.outcomes.is_some() {
            return Err(Error::validation("setting.outcomes", "only custom settings list outcomes"));
        }
        setting.map_err(|e| nest("setting", e))
    }

    /// Validated analysis scenario.
    pub fn build(&self) -> Result<Scenario> {
        let setting = self.setting()?;
        for (i, a) in self.agents.iter().enumerate() {
            if let Some(b) = a.bid {
                if !b.is_finite() {
                    return Err(Error::validation(format!("agents[{i}].bid"), "must be finite"));
                }
            }
        }
        let te = self.ervcg.te.build().map_err(|e| nest("ervcg.te", e))?;
        let scenario = Scenario {
            setting,
            agents: self
                .agents
                .iter()
                .map(|a| AgentType {
                    value: a.value,
                    gamma: a.gamma.clone(),
                })
                .collect(),
            delta: self.ervcg.delta,
            te,
            epsilon: self.analysis.epsilon,
            grid_step: self.analysis.grid_step,
            tolerance: self.analysis.tolerance,
            budget: self.analysis.budget,
            dominance: self.analysis.dominance,
            values: self.analysis.values,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn bids(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.bid.unwrap_or(a.value)).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.agents.iter().map(|a| a.value).collect()
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let compact = serde_json::to_string(self).expect("scenario serializes");
        format!("{:x}", Sha256::digest(compact.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{
        "setting": {"kind": "single-item", "n": 2},
        "agents": [{"value": 0.9, "gamma": [0, 0.0014]}, {"value": 0.5, "gamma": [0.0014, 0]}],
        "ervcg": {"delta": 0.5, "te": {"kind": "linear", "L": 0, "H": 1}},
        "analysis": {"grid_step": 0.005, "epsilon": 0.05},
        "seed": 7
    }"#;

    fn path_of(text: &str) -> String {
        match ScenarioFile::parse(text) {
            Err(Error::Validation { path, .. }) => path,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_and_round_trips() {
        let f = ScenarioFile::parse(TWO).unwrap();
        assert_eq!(f.analysis.budget, DEFAULT_BUDGET);
        assert_eq!(ScenarioFile::parse(&f.to_json()).unwrap(), f);
        assert_eq!(f.hash(), ScenarioFile::parse(&f.to_json()).unwrap().hash());
        assert_eq!(f.hash().len(), 64);
    }

    #[test]
    fn field_paths() {
        assert_eq!(path_of(&TWO.replace("[0.0014, 0]", "[0.0014]")), "agents[1].gamma");
        assert_eq!(path_of(&TWO.replace("\"seed\": 7", "\"seed\": 7, \"extra\": 1")), "extra");
        assert_eq!(path_of(&TWO.replace("\"delta\": 0.5", "\"delta\": \"x\"")), "ervcg.delta");
        assert_eq!(path_of(&TWO.replace("\"delta\": 0.5", "\"delta\": 1.5")), "ervcg.delta");
        assert_eq!(path_of(&TWO.replace("\"H\": 1", "\"H\": 0")), "ervcg.te");
        assert_eq!(path_of(&TWO.replace("\"n\": 2", "\"n\": 2, \"k\": 1")), "setting.k");
        assert_eq!(path_of(&TWO.replace("\"epsilon\": 0.05", "\"epsilon\": 0.05, \"eps\": 1")), "analysis.eps");
    }
}
