use std::sync::Arc;

use serde::Serialize;

use super::scenario_file::ScenarioFile;
use crate::analysis::{eta_bound, gamma_threshold, verify_predicate, PredicateReport, Scenario};
use crate::auction::{
    ervcg_expected, ext_modified_utility, AgentType, Branch, ErvcgExpectation, ErvcgSampler,
    Setting, SettingKind,
};
use crate::error::{Error, Result};
use crate::grid;
use crate::scoring::{
    mechanism_simplex_modulus, rule_to_mechanism, strong_properness_modulus, AlternativesMechanism,
    BoundingConstants, RuleKind, ScoringRule,
};
use crate::strongtruth::{
    check_monotone, envelope_check, relative_gap_profile, strong_truth_modulus, EnvelopeCheck,
    MechanismDescriptor, MechanismKind, Modulus, MonotoneViolation, RelativeGapProfile,
};

/// Largest node count per axis for the all-pairs modulus scan.
const MODULUS_MAX_NODES: f64 = 2000.0;
const MYERSON_TOL: f64 = 1e-6;
const TRANSPORT_TOL: f64 = 1e-6;
const ENVELOPE_POINTS: usize = 100;
const RELATIVE_ALPHAS: [f64; 3] = [0.1, 0.25, 0.5];
const RELATIVE_POINTS: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct MonotoneReport {
    pub pass: bool,
    pub violation: Option<MonotoneViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MyersonReport {
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusReport {
    pub grid_step: f64,
    pub measured: Modulus,
    /// `1 / (H - L)`.
    pub optimal: f64,
    pub ratio_to_optimal: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelativeRow {
    #[serde(flatten)]
    pub profile: RelativeGapProfile,
    /// `f ln²v / α²`, flat when the loss decays like `α² / ln²v`.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MechReport {
    pub descriptor: MechanismDescriptor,
    pub grid_step: f64,
    pub monotone: MonotoneReport,
    pub myerson: MyersonReport,
    pub envelope: EnvelopeCheck,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<ModulusReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub relative_gap: Vec<RelativeRow>,
}

pub fn analyze_mech(descriptor: &MechanismDescriptor, grid_step: f64) -> Result<MechReport> {
    let mech = descriptor.build()?;
    grid::panel_count(0.0, 1.0, grid_step)?;
    let violation = check_monotone(&mech, grid_step)?;
    let residual = mech.myerson_residual(grid_step, grid_step / 10.0)?;
    let envelope = envelope_check(&mech, ENVELOPE_POINTS)?;
    let modulus = if mech.is_bounded() {
        let width = mech.high() - mech.low();
        let step = grid_step.max(width / MODULUS_MAX_NODES);
        let measured = strong_truth_modulus(&mech, step)?;
        Some(ModulusReport {
            grid_step: step,
            measured,
            optimal: 1.0 / width,
            ratio_to_optimal: measured.m * width,
        })
    } else {
        None
    };
    let mut relative_gap = Vec::new();
    if let MechanismKind::LogFamily { .. } = mech.kind() {
        for alpha in RELATIVE_ALPHAS {
            let top = mech.horizon() / (1.0 + alpha);
            if top <= mech.low() {
                continue;
            }
            let ratio = (top / mech.low()).powf(1.0 / (RELATIVE_POINTS - 1) as f64);
            for i in 0..RELATIVE_POINTS {
                let v = if i + 1 == RELATIVE_POINTS { top } else { mech.low() * ratio.powi(i as i32) };
                let profile = relative_gap_profile(&mech, v, alpha, grid_step)?;
                relative_gap.push(RelativeRow {
                    normalized: profile.f * v.ln().powi(2) / (alpha * alpha),
                    profile,
                });
            }
        }
    }
    Ok(MechReport {
        descriptor: descriptor.clone(),
        grid_step,
        monotone: MonotoneReport {
            pass: violation.is_none(),
            violation,
        },
        myerson: MyersonReport {
            max_residual: residual,
            tolerance: MYERSON_TOL,
            pass: residual <= MYERSON_TOL,
        },
        envelope,
        modulus,
        relative_gap,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvertedPoint {
    pub report: Vec<f64>,
    pub allocation: Vec<f64>,
    pub payment: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportCheck {
    pub rule_modulus: f64,
    pub mechanism_modulus: f64,
    /// `rule_modulus / C`.
    pub expected: f64,
    pub abs_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvertReport {
    pub rule: RuleKind,
    pub n: usize,
    pub grid_step: f64,
    pub constants: BoundingConstants,
    pub table: Vec<ConvertedPoint>,
    pub transport: TransportCheck,
}

pub fn convert(kind: RuleKind, n: usize, grid_step: f64) -> Result<ConvertReport> {
    let rule = ScoringRule::standard(kind, n)?;
    let conv = Arc::new(rule_to_mechanism(&rule, grid_step)?);
    let constants = conv.constants();
    let table = grid::simplex_points(n, grid_step)?
        .into_iter()
        .map(|x| ConvertedPoint {
            allocation: conv.allocation(&x),
            payment: conv.payment(&x),
            report: x,
        })
        .collect();
    let rule_m = strong_properness_modulus(&rule, grid_step)?.summary;
    let mech_m = mechanism_simplex_modulus(conv.as_ref(), grid_step)?.summary;
    let expected = rule_m / constants.c;
    let abs_error = (mech_m - expected).abs();
    Ok(ConvertReport {
        rule: kind,
        n,
        grid_step,
        constants,
        table,
        transport: TransportCheck {
            rule_modulus: rule_m,
            mechanism_modulus: mech_m,
            expected,
            abs_error,
            pass: abs_error <= TRANSPORT_TOL,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectedRun {
    pub bids: Vec<f64>,
    pub values: Vec<f64>,
    pub expectation: ErvcgExpectation,
    pub ext_modified_utility: Vec<f64>,
}

pub fn run_expected(file: &ScenarioFile) -> Result<ExpectedRun> {
    let scenario = file.build()?;
    let (bids, values) = (file.bids(), file.values());
    let expectation = ervcg_expected(&scenario.setting, &bids, &values, scenario.delta, &scenario.te)?;
    let ext = (0..scenario.n())
        .map(|i| ext_modified_utility(&expectation, &scenario.agents, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpectedRun {
        bids,
        values,
        expectation,
        ext_modified_utility: ext,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleStat {
    pub mean: f64,
    pub std_error: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleRun {
    pub seed: u64,
    pub samples: usize,
    pub vcg_draws: usize,
    pub te_draws: Vec<usize>,
    pub utility: Vec<SampleStat>,
    pub payment: Vec<SampleStat>,
    pub allocation: Vec<SampleStat>,
}

#[derive(Default, Clone)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn stat(&self, count: usize, expected: f64) -> SampleStat {
        let n = count as f64;
        let mean = self.sum / n;
        let var = if count > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        SampleStat {
            mean,
            std_error: (var / n).sqrt(),
            expected,
        }
    }
}

pub fn run_sample(file: &ScenarioFile, samples: usize) -> Result<SampleRun> {
    if samples == 0 {
        return Err(Error::validation("samples", "sample mode needs at least one draw"));
    }
    let scenario = file.build()?;
    let n = scenario.n();
    let (bids, values) = (file.bids(), file.values());
    let mut sampler = ErvcgSampler::new(&scenario.setting, &bids, &values, scenario.delta, &scenario.te, file.seed)?;
    let clamped = crate::auction::clamp_bids(&bids);
    let expected = ervcg_expected(&scenario.setting, &clamped, &values, scenario.delta, &scenario.te)?;
    let mut m = vec![[Moments::default(), Moments::default(), Moments::default()]; n];
    let mut vcg_draws = 0;
    let mut te_draws = vec![0; n];
    for _ in 0..samples {
        let d = sampler.draw();
        match d.branch {
            Branch::Vcg => vcg_draws += 1,
            Branch::Te { agent } => te_draws[agent] += 1,
        }
        for i in 0..n {
            m[i][0].push(d.utilities[i]);
            m[i][1].push(d.payments[i]);
            m[i][2].push(d.allocation[i]);
        }
    }
    let column = |k: usize, exp: &[f64]| (0..n).map(|i| m[i][k].stat(samples, exp[i])).collect();
    Ok(SampleRun {
        seed: file.seed,
        samples,
        vcg_draws,
        te_draws,
        utility: column(0, &expected.expected_utility),
        payment: column(1, &expected.expected_payment),
        allocation: column(2, &expected.expected_allocation),
    })
}

pub fn verify(file: &ScenarioFile) -> Result<PredicateReport> {
    verify_predicate(&file.build()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Delta,
    Gamma,
    Epsilon,
    N,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Delta => "delta",
            SweepParam::Gamma => "gamma",
            SweepParam::Epsilon => "epsilon",
            SweepParam::N => "n",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: &'static str,
    pub value: f64,
    pub n: usize,
    pub delta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub gamma_threshold: Option<f64>,
    pub hypothesis_holds: bool,
    pub eta_bound: Option<f64>,
    pub eta_observed: f64,
    pub margin: f64,
    pub pass: bool,
    pub welfare_gap: f64,
    pub revenue_gap: f64,
}

/// Sweep points `a + (b - a) t / (steps - 1)`.
pub fn sweep_points(range: (f64, f64), steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::validation("steps", "must be at least 1"));
    }
    if !range.0.is_finite() || !range.1.is_finite() {
        return Err(Error::validation("range", "endpoints must be finite"));
    }
    if steps == 1 {
        return Ok(vec![range.0]);
    }
    Ok((0..steps)
        .map(|t| {
            if t + 1 == steps {
                range.1
            } else {
                range.0 + (range.1 - range.0) * t as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

fn uniform_gamma(agents: &mut [AgentType], gamma: f64) {
    for (i, a) in agents.iter_mut().enumerate() {
        for (j, g) in a.gamma.iter_mut().enumerate() {
            *g = if i == j { 0.0 } else { gamma };
        }
    }
}

/// Scenario at one sweep point. For `n`, agents cycle through the file's
/// values and share the file's `γ` uniformly.
fn sweep_scenario(base: &Scenario, file: &ScenarioFile, param: SweepParam, value: f64) -> Result<Scenario> {
    let mut s = base.clone();
    match param {
        SweepParam::Delta => s.delta = value,
        SweepParam::Epsilon => s.epsilon = value,
        SweepParam::Gamma => {
            if value < 0.0 {
                return Err(Error::validation("range", "gamma sweeps take non-negative levels"));
            }
            uniform_gamma(&mut s.agents, value);
        }
        SweepParam::N => {
            if value.fract() != 0.0 || value < 1.0 {
                return Err(Error::validation("range", format!("agent counts must be positive integers, got {value}")));
            }
            let n = value as usize;
            s.setting = match base.setting.kind() {
                SettingKind::SingleItem => Setting::single_item(n),
                SettingKind::KWinners => Setting::k_winners(n, base.setting.k().unwrap_or(1)),
                SettingKind::Custom => {
                    return Err(Error::validation("setting.kind", "n sweeps need a single-item or k-winners setting"))
                }
            }?;
            let template = file.values();
            s.agents = (0..n).map(|j| AgentType::standard(template[j % template.len()], n)).collect();
            uniform_gamma(&mut s.agents, base.gamma());
        }
    }
    s.validate()?;
    Ok(s)
}

pub fn sweep(file: &ScenarioFile, param: SweepParam, range: (f64, f64), steps: usize) -> Result<Vec<SweepRow>> {
    let base = file.build()?;
    sweep_points(range, steps)?
        .into_iter()
        .map(|value| {
            let s = sweep_scenario(&base, file, param, value)?;
            let r = verify_predicate(&s)?;
            Ok(SweepRow {
                param: param.name(),
                value,
                n: s.n(),
                delta: s.delta,
                gamma: r.gamma,
                epsilon: s.epsilon,
                gamma_threshold: gamma_threshold(s.n(), s.delta, s.epsilon).ok(),
                hypothesis_holds: r.hypothesis_holds,
                eta_bound: eta_bound(s.n(), s.delta, r.gamma).ok(),
                eta_observed: r.eta_observed,
                margin: r.margin,
                pass: r.pass,
                welfare_gap: r.welfare.gap,
                revenue_gap: r.revenue.gap,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::domain(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::domain(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strongtruth::DescriptorKind;

    fn linear(low: f64, high: f64) -> MechanismDescriptor {
        MechanismDescriptor { kind: DescriptorKind::Linear, k: None, low, high }
    }

    #[test]
    fn linear_analysis() {
        let r = analyze_mech(&linear(0.0, 1.0), 0.01).unwrap();
        assert!(r.monotone.pass && r.myerson.pass && r.envelope.pass);
        let m = r.modulus.unwrap();
        assert!((m.measured.m - 1.0).abs() < 1e-9);
        assert!(r.relative_gap.is_empty());
        assert!(analyze_mech(&linear(1.0, 1.0), 0.01).is_err());
    }

    #[test]
    fn log_analysis_has_relative_table() {
        let d = MechanismDescriptor {
            kind: DescriptorKind::Log,
            k: Some(2),
            low: 2f64.exp(),
            high: 200.0,
        };
        let r = analyze_mech(&d, 0.05).unwrap();
        assert!(r.monotone.pass && r.envelope.pass && r.myerson.pass);
        assert_eq!(r.relative_gap.len(), 3 * RELATIVE_POINTS);
        assert!(r.relative_gap.iter().all(|row| row.profile.f > 0.0));
    }

    #[test]
    fn convert_quadratic_and_log() {
        let r = convert(RuleKind::Quadratic, 1, 0.01).unwrap();
        assert_eq!((r.constants.c0, r.constants.c), (2.0, 4.0));
        assert!(r.transport.pass);
        assert!(r.table.iter().all(|p| (p.allocation[0] - p.report[0]).abs() < 1e-12));
        assert!(matches!(convert(RuleKind::Logarithmic, 1, 0.01), Err(Error::UnboundedScore(_))));
    }

    #[test]
    fn sweep_points_are_inclusive() {
        assert_eq!(sweep_points((0.1, 0.9), 9).unwrap().len(), 9);
        assert_eq!(sweep_points((0.1, 0.9), 9).unwrap()[8], 0.9);
        assert!(sweep_points((0.0, 1.0), 0).is_err());
    }
}
