//! Single-agent direct-revelation mechanisms over a valuation interval.

use std::fmt;
use std::io;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{AlternativesMechanism, ConvertedMechanism, RuleKind};

/// Slack used when checking that tabulated or computed allocations stay in `[0, 1]`.
pub(crate) const RANGE_TOL: f64 = 1e-12;

/// Allocation, payment and truthful utility at one valuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub allocation: f64,
    pub payment: f64,
    pub utility: f64,
}

/// A `(v, a, p)` table; allocations and payments are linearly interpolated
/// between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    values: Vec<f64>,
    allocations: Vec<f64>,
    payments: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TableRow {
    v: f64,
    a: f64,
    p: f64,
}

impl Table {
    pub fn new(values: Vec<f64>, allocations: Vec<f64>, payments: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain("a tabulated mechanism needs at least two nodes"));
        }
        if values.len() != allocations.len() || values.len() != payments.len() {
            return Err(Error::domain("table columns v, a, p differ in length"));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("table valuations must be strictly increasing"));
        }
        for (v, (a, p)) in values.iter().zip(allocations.iter().zip(&payments)) {
            if !v.is_finite() || !a.is_finite() || !p.is_finite() {
                return Err(Error::domain("table entries must be finite"));
            }
            if *a < -RANGE_TOL || *a > 1.0 + RANGE_TOL {
                return Err(Error::domain(format!("allocation {a} at v={v} is outside [0, 1]")));
            }
        }
        Ok(Table {
            values,
            allocations,
            payments,
        })
    }

    /// Tabulates `allocations` at `values` with Myerson payments, `p(v_0) = 0`.
    ///
    /// The integral uses the trapezoid rule on the nodes, which is exact for
    /// the piecewise-linear interpolant, so the table is exactly truthful.
    pub fn from_allocation(values: Vec<f64>, allocations: Vec<f64>) -> Result<Self> {
        if values.len() != allocations.len() {
            return Err(Error::domain("table columns v, a differ in length"));
        }
        let mut payments = Vec::with_capacity(values.len());
        let mut integral = 0.0;
        for i in 0..values.len() {
            if i > 0 {
                integral +=
                    0.5 * (allocations[i] + allocations[i - 1]) * (values[i] - values[i - 1]);
            }
            payments.push(values[i] * allocations[i] - integral - values[0] * allocations[0]);
        }
        Table::new(values, allocations, payments)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn allocations(&self) -> &[f64] {
        &self.allocations
    }

    pub fn payments(&self) -> &[f64] {
        &self.payments
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn segment(&self, v: f64) -> (usize, f64) {
        let last = self.values.len() - 2;
        let idx = self.values.partition_point(|&x| x <= v).saturating_sub(1).min(last);
        let (x0, x1) = (self.values[idx], self.values[idx + 1]);
        (idx, (v - x0) / (x1 - x0))
    }

    fn interpolate(column: &[f64], idx: usize, t: f64) -> f64 {
        if t == 0.0 {
            column[idx]
        } else if t == 1.0 {
            column[idx + 1]
        } else {
            column[idx] + t * (column[idx + 1] - column[idx])
        }
    }

    fn allocation(&self, v: f64) -> f64 {
        let (i, t) = self.segment(v);
        Self::interpolate(&self.allocations, i, t)
    }

    fn payment(&self, v: f64) -> f64 {
        let (i, t) = self.segment(v);
        Self::interpolate(&self.payments, i, t)
    }

    /// Exact integral of the interpolated allocation from the first node to `v`.
    fn allocation_integral(&self, v: f64) -> f64 {
        let (idx, t) = self.segment(v);
        let mut acc = 0.0;
        for i in 1..=idx {
            acc += 0.5
                * (self.allocations[i] + self.allocations[i - 1])
                * (self.values[i] - self.values[i - 1]);
        }
        let a_v = Self::interpolate(&self.allocations, idx, t);
        acc + 0.5 * (self.allocations[idx] + a_v) * (v - self.values[idx])
    }

    /// Writes the table as CSV with header `v,a,p`, plus a leading
    /// `alternative` column when `alternative` is given.
    pub fn write_csv<W: io::Write>(&self, writer: W, alternative: Option<usize>) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        match alternative {
            Some(_) => out.write_record(["alternative", "v", "a", "p"])?,
            None => out.write_record(["v", "a", "p"])?,
        }
        for i in 0..self.values.len() {
            let mut row = Vec::with_capacity(4);
            if let Some(alt) = alternative {
                row.push(alt.to_string());
            }
            row.push(format_float(self.values[i]));
            row.push(format_float(self.allocations[i]));
            row.push(format_float(self.payments[i]));
            out.write_record(&row)?;
        }
        out.flush()
    }

    pub fn read_csv<R: io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut values = Vec::new();
        let mut allocations = Vec::new();
        let mut payments = Vec::new();
        for (line, row) in rdr.deserialize::<TableRow>().enumerate() {
            let row = row.map_err(|e| Error::validation(format!("table[{line}]"), e.to_string()))?;
            values.push(row.v);
            allocations.push(row.a);
            payments.push(row.p);
        }
        Table::new(values, allocations, payments)
    }
}

fn format_float(x: f64) -> String {
    // `{}` on f64 prints the shortest representation that round-trips.
    format!("{x}")
}

#[derive(Debug, Clone)]
pub enum MechanismKind {
    /// `a(v) = (v - L) / (H - L)`.
    Linear,
    /// `a(v) = 1 - 1/((k-1) ln^{k-1} v) + 1/ln^k v`, `p(v) = v / ln^k v`.
    LogFamily { k: u32 },
    /// Scalar mechanism obtained from a one-event scoring rule.
    FromScoringRule(Arc<ConvertedMechanism>),
    Tabulated(Table),
}

/// A single-parameter mechanism: allocation and payment over `[low, high]`.
///
/// `high` may be `f64::INFINITY` for the log family.
#[derive(Debug, Clone)]
pub struct Mechanism {
    kind: MechanismKind,
    low: f64,
    high: f64,
}

/// Serializable record for the parametric mechanism kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismDescriptor {
    pub kind: DescriptorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(rename = "L")]
    pub low: f64,
    /// `null` means an unbounded domain.
    #[serde(rename = "H", with = "infinite_as_null")]
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescriptorKind {
    Linear,
    Log,
}

mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_f64(*x)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

impl MechanismDescriptor {
    pub fn build(&self) -> Result<Mechanism> {
        match self.kind {
            DescriptorKind::Linear => {
                if self.k.is_some() {
                    return Err(Error::validation("k", "only the log kind takes k"));
                }
                Mechanism::linear(self.low, self.high)
            }
            DescriptorKind::Log => Mechanism::log_family(self.k.unwrap_or(2), self.low, self.high),
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MechanismKind::Linear => write!(f, "Linear({}, {})", self.low, self.high),
            MechanismKind::LogFamily { k } => {
                write!(f, "LogFamily(k={k}, {}, {})", self.low, self.high)
            }
            MechanismKind::FromScoringRule(c) => write!(f, "FromScoringRule({})", c.rule()),
            MechanismKind::Tabulated(t) => write!(f, "Tabulated({} nodes)", t.len()),
        }
    }
}

impl Mechanism {
    /// The linear mechanism on `[low, high]`, with `p(low) = 0`.
    pub fn linear(low: f64, high: f64) -> Result<Self> {
        if !low.is_finite() || !high.is_finite() {
            return Err(Error::domain("linear mechanism needs finite L and H"));
        }
        if !(low < high) {
            return Err(Error::domain(format!("linear mechanism needs L < H, got L={low}, H={high}")));
        }
        Ok(Mechanism {
            kind: MechanismKind::Linear,
            low,
            high,
        })
    }

    /// Member `k` of the logarithmic family on `[low, high]`.
    ///
    /// The allocation is only monotone where `ln v >= k`; the constructor
    /// validates range and monotonicity on a grid and rejects otherwise.
    pub fn log_family(k: u32, low: f64, high: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("log family needs k >= 2, got {k}")));
        }
        if !low.is_finite() || !(low > 1.0) {
            return Err(Error::domain(format!("log family needs finite L > 1, got {low}")));
        }
        if !(high > low) {
            return Err(Error::domain(format!("log family needs H > L, got L={low}, H={high}")));
        }
        let mech = Mechanism {
            kind: MechanismKind::LogFamily { k },
            low,
            high,
        };
        mech.validate_log_grid(k)?;
        Ok(mech)
    }

    fn validate_log_grid(&self, k: u32) -> Result<()> {
        const NODES: usize = 4096;
        let top = self.horizon();
        let (l0, l1) = (self.low.ln(), top.ln());
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..=NODES {
            let v = if i == 0 {
                self.low
            } else if i == NODES {
                top
            } else {
                (l0 + (l1 - l0) * i as f64 / NODES as f64).exp()
            };
            let a = self.alloc_at(v);
            if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&a) {
                return Err(Error::domain(format!(
                    "log mechanism (k={k}) allocation {a} at v={v} is outside [0, 1]"
                )));
            }
            if let Some((pv, pa)) = prev {
                if pa > a + RANGE_TOL {
                    return Err(Error::domain(format!(
                        "log mechanism (k={k}) allocation decreases between v={pv} and v={v}"
                    )));
                }
            }
            prev = Some((v, a));
        }
        // Past the grid, a'(v) = (ln v - k) / (v ln^{k+1} v) keeps its sign.
        if self.high.is_infinite() && top.ln() < k as f64 {
            return Err(Error::domain("log mechanism is not monotone on its unbounded tail"));
        }
        Ok(())
    }

    /// Tabulated mechanism; the table must have allocations in `[0, 1]`.
    pub fn tabulated(table: Table) -> Self {
        let low = table.values[0];
        let high = *table.values.last().expect("non-empty table");
        Mechanism {
            kind: MechanismKind::Tabulated(table),
            low,
            high,
        }
    }

    /// Wraps a single-event converted scoring rule as a scalar mechanism on `[0, 1]`.
    pub fn from_converted(converted: Arc<ConvertedMechanism>) -> Result<Self> {
        if converted.alternatives() != 1 {
            return Err(Error::domain(
                "only single-event converted rules form a scalar mechanism",
            ));
        }
        Ok(Mechanism {
            kind: MechanismKind::FromScoringRule(converted),
            low: 0.0,
            high: 1.0,
        })
    }

    pub fn kind(&self) -> &MechanismKind {
        &self.kind
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.high
    }

    pub fn is_bounded(&self) -> bool {
        self.high.is_finite()
    }

    /// Upper end of finite scans: `H`, or a point far enough into an
    /// unbounded domain that the log family's allocation is monotone beyond it.
    pub fn horizon(&self) -> f64 {
        if self.high.is_finite() {
            return self.high;
        }
        match self.kind {
            MechanismKind::LogFamily { k } => (64.0 * self.low).max((k as f64 + 1.0).exp()),
            _ => 64.0 * self.low.abs().max(1.0),
        }
    }

    pub fn descriptor(&self) -> Option<MechanismDescriptor> {
        match self.kind {
            MechanismKind::Linear => Some(MechanismDescriptor {
                kind: DescriptorKind::Linear,
                k: None,
                low: self.low,
                high: self.high,
            }),
            MechanismKind::LogFamily { k } => Some(MechanismDescriptor {
                kind: DescriptorKind::Log,
                k: Some(k),
                low: self.low,
                high: self.high,
            }),
            _ => None,
        }
    }

    /// The standard scoring rule a `FromScoringRule` mechanism came from.
    pub fn source_rule(&self) -> Option<RuleKind> {
        match &self.kind {
            MechanismKind::FromScoringRule(c) => c.rule().standard_kind(),
            _ => None,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.low && v <= self.high
    }

    pub(crate) fn check_domain(&self, v: f64) -> Result<()> {
        if v.is_nan() || !self.contains(v) {
            return Err(Error::domain(format!(
                "valuation {v} is outside the domain [{}, {}] of {self}",
                self.low, self.high
            )));
        }
        Ok(())
    }

    /// Allocation without a domain check. Callers guarantee `v` is in range.
    pub(crate) fn alloc_at(&self, v: f64) -> f64 {
        match &self.kind {
            MechanismKind::Linear => (v - self.low) / (self.high - self.low),
            MechanismKind::LogFamily { k } => {
                let l = v.ln();
                let k = *k as i32;
                1.0 - 1.0 / ((k - 1) as f64 * l.powi(k - 1)) + 1.0 / l.powi(k)
            }
            MechanismKind::FromScoringRule(c) => c.allocation(&[v])[0],
            MechanismKind::Tabulated(t) => t.allocation(v),
        }
    }

    /// Payment without a domain check.
    pub(crate) fn pay_at(&self, v: f64) -> f64 {
        match &self.kind {
            MechanismKind::Linear => {
                (v * v - self.low * self.low) / (2.0 * (self.high - self.low))
            }
            MechanismKind::LogFamily { k } => v / v.ln().powi(*k as i32),
            MechanismKind::FromScoringRule(c) => c.payment(&[v]),
            MechanismKind::Tabulated(t) => t.payment(v),
        }
    }

    /// `u_v(report)` without domain checks.
    pub(crate) fn utility_at(&self, value: f64, report: f64) -> f64 {
        value * self.alloc_at(report) - self.pay_at(report)
    }

    /// Truthful utility without a domain check, in closed form where available.
    pub(crate) fn truthful_utility_at(&self, v: f64) -> f64 {
        match &self.kind {
            MechanismKind::Linear => {
                let d = v - self.low;
                d * d / (2.0 * (self.high - self.low))
            }
            MechanismKind::LogFamily { k } => {
                let l = v.ln();
                let k = *k as i32;
                v - v / ((k - 1) as f64 * l.powi(k - 1))
            }
            _ => self.utility_at(v, v),
        }
    }

    pub fn allocation(&self, v: f64) -> Result<f64> {
        self.check_domain(v)?;
        Ok(self.alloc_at(v))
    }

    pub fn payment(&self, v: f64) -> Result<f64> {
        self.check_domain(v)?;
        Ok(self.pay_at(v))
    }

    /// Allocation, payment and truthful utility `u = v a(v) - p(v)` at `v`.
    pub fn evaluate(&self, v: f64) -> Result<Evaluation> {
        self.check_domain(v)?;
        Ok(Evaluation {
            allocation: self.alloc_at(v),
            payment: self.pay_at(v),
            utility: self.truthful_utility_at(v),
        })
    }

    /// `u_v(ṽ) = v a(ṽ) - p(ṽ)`: utility of an agent with value `value`
    /// who reports `report`.
    pub fn misreport_utility(&self, value: f64, report: f64) -> Result<f64> {
        self.check_domain(value)?;
        self.check_domain(report)?;
        if value == report {
            return Ok(self.truthful_utility_at(value));
        }
        Ok(self.utility_at(value, report))
    }

    /// `∫_L^v a(x) dx`, in closed form where the kind provides one.
    pub fn allocation_integral(&self, v: f64, step: f64) -> Result<f64> {
        self.check_domain(v)?;
        Ok(match &self.kind {
            MechanismKind::Linear => self.truthful_utility_at(v),
            MechanismKind::LogFamily { .. } => {
                self.truthful_utility_at(v) - self.truthful_utility_at(self.low)
            }
            MechanismKind::Tabulated(t) => t.allocation_integral(v),
            MechanismKind::FromScoringRule(_) => {
                super::myerson::trapezoid(|x| self.alloc_at(x), self.low, v, step)?
            }
        })
    }

    /// Payment at the lower end of the domain.
    pub fn base_payment(&self) -> f64 {
        self.pay_at(self.low)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn linear_unit_interval_closed_forms() {
        let m = Mechanism::linear(0.0, 1.0).unwrap();
        let e = m.evaluate(0.6).unwrap();
        assert_abs_diff_eq!(e.allocation, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(e.payment, 0.18, epsilon = 1e-12);
        assert_abs_diff_eq!(e.utility, 0.18, epsilon = 1e-12);

        let e = m.evaluate(0.9).unwrap();
        assert_abs_diff_eq!(e.allocation, 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(e.payment, 0.405, epsilon = 1e-12);
        assert_abs_diff_eq!(e.utility, 0.405, epsilon = 1e-12);

        let e = m.evaluate(0.0).unwrap();
        assert_eq!((e.allocation, e.payment, e.utility), (0.0, 0.0, 0.0));
    }

    #[test]
    fn linear_shifted_interval() {
        let m = Mechanism::linear(1.0, 3.0).unwrap();
        let e = m.evaluate(2.0).unwrap();
        assert_abs_diff_eq!(e.allocation, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(e.payment, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(e.utility, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn linear_rejects_bad_domains() {
        assert!(matches!(Mechanism::linear(1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(Mechanism::linear(2.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(Mechanism::linear(0.0, f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(Mechanism::linear(f64::NAN, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_family_at_lower_end() {
        let low = E * E;
        let m = Mechanism::log_family(2, low, f64::INFINITY).unwrap();
        let e = m.evaluate(low).unwrap();
        assert_abs_diff_eq!(e.allocation, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(e.payment, low / 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.payment, 1.8473, epsilon = 1e-4);
        assert_abs_diff_eq!(e.utility, low / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.utility, 3.6945, epsilon = 1e-4);
    }

    #[test]
    fn log_family_at_e4() {
        let m = Mechanism::log_family(2, E * E, f64::INFINITY).unwrap();
        let v = 4f64.exp();
        let e = m.evaluate(v).unwrap();
        assert_abs_diff_eq!(e.allocation, 0.8125, epsilon = 1e-12);
        assert_abs_diff_eq!(e.payment, v / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.payment, 3.412, epsilon = 1e-3);
        assert_abs_diff_eq!(e.utility, 0.75 * v, epsilon = 1e-10);
        assert_abs_diff_eq!(e.utility, 40.948, epsilon = 1e-3);
        // closed-form utility agrees with v a - p
        assert_abs_diff_eq!(e.utility, v * e.allocation - e.payment, epsilon = 1e-10);
    }

    #[test]
    fn log_family_envelope_at_20() {
        let m = Mechanism::log_family(2, E * E, f64::INFINITY).unwrap();
        let h = 1e-4;
        let u = |v: f64| v - v / v.ln();
        let fd = (u(20.0 + h) - u(20.0 - h)) / (2.0 * h);
        assert_abs_diff_eq!(fd, m.allocation(20.0).unwrap(), epsilon = 1e-6);
    }

    #[test]
    fn log_family_rejects_non_monotone_low_end() {
        assert!(matches!(Mechanism::log_family(2, 2.0, 100.0), Err(Error::Domain(_))));
        assert!(matches!(Mechanism::log_family(2, 7.0, 100.0), Err(Error::Domain(_))));
        assert!(matches!(Mechanism::log_family(1, 10.0, 100.0), Err(Error::Domain(_))));
        // k = 3 needs ln L >= 3
        assert!(Mechanism::log_family(3, 3f64.exp(), f64::INFINITY).is_ok());
        assert!(Mechanism::log_family(3, 10.0, f64::INFINITY).is_err());
    }

    #[test]
    fn out_of_domain_evaluation_fails() {
        let m = Mechanism::linear(0.0, 1.0).unwrap();
        assert!(matches!(m.evaluate(1.5), Err(Error::Domain(_))));
        assert!(matches!(m.misreport_utility(0.5, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn misreport_examples() {
        let m = Mechanism::linear(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(m.misreport_utility(0.8, 0.5).unwrap(), 0.275, epsilon = 1e-12);
        assert_abs_diff_eq!(m.misreport_utility(0.8, 0.8).unwrap(), 0.32, epsilon = 1e-12);
        assert_abs_diff_eq!(m.misreport_utility(0.3, 0.7).unwrap(), -0.035, epsilon = 1e-12);
    }

    #[test]
    fn table_interpolation_and_integral() {
        let t = Table::from_allocation(vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 1.0]).unwrap();
        let m = Mechanism::tabulated(t);
        // the interpolant is a(v) = v, so every closed form of Linear(0,1) holds
        for v in [0.0, 0.1, 0.5, 0.75, 1.0] {
            assert_abs_diff_eq!(m.allocation(v).unwrap(), v, epsilon = 1e-15);
            assert_abs_diff_eq!(m.allocation_integral(v, 0.01).unwrap(), v * v / 2.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(m.payment(0.5).unwrap(), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn table_rejects_bad_rows() {
        assert!(Table::new(vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(Table::new(vec![0.0, 1.0], vec![0.0, 1.5], vec![0.0, 0.0]).is_err());
        assert!(Table::new(vec![0.0], vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let t = Table::from_allocation(vec![0.0, 0.25, 1.0], vec![0.0, 0.3, 0.9]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("v,a,p\n"));
        assert_eq!(Table::read_csv(&buf[..]).unwrap(), t);
    }

    #[test]
    fn descriptor_round_trip() {
        let m = Mechanism::log_family(2, E * E, f64::INFINITY).unwrap();
        let d = m.descriptor().unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert!(json.contains("\"H\":null"));
        let back: MechanismDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(back.build().is_ok());

        let bad = r#"{"kind":"linear","L":0,"H":1,"extra":3}"#;
        assert!(serde_json::from_str::<MechanismDescriptor>(bad).is_err());
    }
}
