//! Contract-level corruption risk indicators and settlement aggregates.
//!
//! Eight binary (one ternary) red flags are scored per contract. Two
//! composites are built from them: `C_csb`, the larger of the single-bidder
//! and closed-procedure flags, and `CRI`, the mean of all eight.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::exec::{self, Exec};
use crate::graph::SettlementId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcedureKind {
    OpenCall,
    DirectAward,
    InviteOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AwardCriteria {
    PriceOnly,
    NonPrice,
}

/// Metadata of one public contract. `None` marks a missing field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractRecord {
    pub contract_id: String,
    pub settlement_id: SettlementId,
    pub cpv_code: String,
    pub n_bidders: Option<u32>,
    pub procedure_kind: Option<ProcedureKind>,
    pub call_published: Option<bool>,
    pub call_date: Option<NaiveDate>,
    pub submission_deadline: Option<NaiveDate>,
    pub decision_date: Option<NaiveDate>,
    pub eligibility_criteria_len: Option<u32>,
    pub award_criteria: Option<AwardCriteria>,
    pub call_modified: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    SingleBid,
    ClosedProc,
    NoCall,
    EligCrit,
    DecideTime,
    BidTime,
    NonPrice,
    CallMod,
}

impl Indicator {
    pub const ALL: [Indicator; 8] = [
        Indicator::SingleBid,
        Indicator::ClosedProc,
        Indicator::NoCall,
        Indicator::EligCrit,
        Indicator::DecideTime,
        Indicator::BidTime,
        Indicator::NonPrice,
        Indicator::CallMod,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Indicator::SingleBid => "c_singlebid",
            Indicator::ClosedProc => "c_closedproc",
            Indicator::NoCall => "c_nocall",
            Indicator::EligCrit => "c_eligcrit",
            Indicator::DecideTime => "c_decidetime",
            Indicator::BidTime => "c_bidtime",
            Indicator::NonPrice => "c_nonprice",
            Indicator::CallMod => "c_callmod",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Indicator values; `None` when an input was missing.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IndicatorVector {
    values: [Option<f64>; 8],
}

impl IndicatorVector {
    pub fn from_values(values: [Option<f64>; 8]) -> Self {
        Self { values }
    }

    pub fn get(&self, ind: Indicator) -> Option<f64> {
        self.values[ind.slot()]
    }

    pub fn values(&self) -> &[Option<f64>; 8] {
        &self.values
    }

    pub fn is_masked(&self, ind: Indicator) -> bool {
        self.values[ind.slot()].is_none()
    }

    fn set(&mut self, ind: Indicator, v: Option<f64>) {
        self.values[ind.slot()] = v;
    }
}

/// How contracts are grouped into markets for the eligibility-length norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarketGranularity {
    /// The full CPV code string.
    #[default]
    ExactCode,
    /// The first `n` characters of the code (2 = CPV division).
    Prefix(usize),
}

impl MarketGranularity {
    pub fn market_of<'a>(&self, cpv: &'a str) -> &'a str {
        match *self {
            MarketGranularity::ExactCode => cpv,
            MarketGranularity::Prefix(n) => {
                let end = cpv.char_indices().nth(n).map_or(cpv.len(), |(i, _)| i);
                &cpv[..end]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketMean {
    pub mean_len: f64,
    pub n_with_len: usize,
}

/// Per-market mean length of the eligibility criteria.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MarketStats {
    pub granularity: MarketGranularity,
    pub markets: BTreeMap<String, MarketMean>,
}

impl MarketStats {
    pub fn mean_for(&self, cpv: &str) -> Option<f64> {
        self.markets
            .get(self.granularity.market_of(cpv))
            .map(|m| m.mean_len)
    }
}

/// Means are taken over contracts that report a length; markets where none do
/// get no entry.
pub fn market_averages<'a>(
    contracts: impl IntoIterator<Item = &'a ContractRecord>,
    granularity: MarketGranularity,
) -> MarketStats {
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for c in contracts {
        if let Some(len) = c.eligibility_criteria_len {
            let e = acc
                .entry(granularity.market_of(&c.cpv_code).to_owned())
                .or_default();
            e.0 += f64::from(len);
            e.1 += 1;
        }
    }
    MarketStats {
        granularity,
        markets: acc
            .into_iter()
            .map(|(k, (sum, n))| {
                (
                    k,
                    MarketMean {
                        mean_len: sum / n as f64,
                        n_with_len: n,
                    },
                )
            })
            .collect(),
    }
}

/// Day thresholds for the two timing indicators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRules {
    /// Decision within this many days of the deadline is flagged.
    pub fast_decision_days: i64,
    pub fast_decision_inclusive: bool,
    /// Decision later than this many days after the deadline is flagged.
    pub slow_decision_days: i64,
    pub slow_decision_inclusive: bool,
    /// Bid windows shorter than this score 1.
    pub short_bid_days: i64,
    /// Bid windows from `short_bid_days` up to this (inclusive) score 0.5.
    pub medium_bid_days: i64,
}

impl Default for IndicatorRules {
    fn default() -> Self {
        Self {
            fast_decision_days: 5,
            fast_decision_inclusive: true,
            slow_decision_days: 100,
            slow_decision_inclusive: false,
            short_bid_days: 5,
            medium_bid_days: 15,
        }
    }
}

/// Why a contract could not be scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ContractIssue {
    DateInversion {
        earlier: &'static str,
        later: &'static str,
    },
}

impl ContractIssue {
    pub fn reason_code(&self) -> &'static str {
        match self {
            ContractIssue::DateInversion { .. } => "DATE_INVERSION",
        }
    }
}

impl fmt::Display for ContractIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContractIssue::DateInversion { earlier, later } => {
                write!(f, "{earlier} falls after {later}")
            }
        }
    }
}

/// Checks that the dates present are ordered call <= deadline <= decision.
pub fn validate(c: &ContractRecord) -> Result<(), ContractIssue> {
    let dates = [
        ("call_date", c.call_date),
        ("submission_deadline", c.submission_deadline),
        ("decision_date", c.decision_date),
    ];
    for i in 0..dates.len() {
        for j in i + 1..dates.len() {
            if let (Some(a), Some(b)) = (dates[i].1, dates[j].1) {
                if a > b {
                    return Err(ContractIssue::DateInversion {
                        earlier: dates[i].0,
                        later: dates[j].0,
                    });
                }
            }
        }
    }
    Ok(())
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn decide_time_flag(gap_days: i64, rules: &IndicatorRules) -> f64 {
    let fast = if rules.fast_decision_inclusive {
        gap_days <= rules.fast_decision_days
    } else {
        gap_days < rules.fast_decision_days
    };
    let slow = if rules.slow_decision_inclusive {
        gap_days >= rules.slow_decision_days
    } else {
        gap_days > rules.slow_decision_days
    };
    flag((gap_days >= 0 && fast) || slow)
}

pub fn bid_time_score(window_days: i64, rules: &IndicatorRules) -> f64 {
    if window_days < rules.short_bid_days {
        1.0
    } else if window_days <= rules.medium_bid_days {
        0.5
    } else {
        0.0
    }
}

/// Scores the eight indicators of one contract.
pub fn elementary_indicators(
    c: &ContractRecord,
    markets: &MarketStats,
    rules: &IndicatorRules,
) -> Result<IndicatorVector, ContractIssue> {
    validate(c)?;
    let mut v = IndicatorVector::default();
    v.set(Indicator::SingleBid, c.n_bidders.map(|n| flag(n == 1)));
    v.set(
        Indicator::ClosedProc,
        c.procedure_kind.map(|k| flag(k != ProcedureKind::OpenCall)),
    );
    v.set(Indicator::NoCall, c.call_published.map(|p| flag(!p)));
    v.set(
        Indicator::EligCrit,
        c.eligibility_criteria_len
            .zip(markets.mean_for(&c.cpv_code))
            .map(|(len, mean)| flag(f64::from(len) > mean)),
    );
    v.set(
        Indicator::DecideTime,
        c.submission_deadline
            .zip(c.decision_date)
            .map(|(dl, dd)| decide_time_flag((dd - dl).num_days(), rules)),
    );
    v.set(
        Indicator::BidTime,
        c.call_date
            .zip(c.submission_deadline)
            .map(|(cd, dl)| bid_time_score((dl - cd).num_days(), rules)),
    );
    v.set(
        Indicator::NonPrice,
        c.award_criteria.map(|a| flag(a == AwardCriteria::NonPrice)),
    );
    v.set(Indicator::CallMod, c.call_modified.map(flag));
    Ok(v)
}

/// Closed procedure or single bidder; masked if either input is masked.
pub fn c_csb(v: &IndicatorVector) -> Option<f64> {
    Some(
        v.get(Indicator::SingleBid)?
            .max(v.get(Indicator::ClosedProc)?),
    )
}

/// Treatment of masked indicators in the CRI mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingMode {
    /// Masked indicators count as 0 and the denominator stays 8.
    #[default]
    Impute0,
    /// Average over unmasked indicators only.
    Strict,
}

impl std::str::FromStr for MissingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "impute0" => Ok(MissingMode::Impute0),
            "strict" => Ok(MissingMode::Strict),
            other => Err(format!(
                "unknown missing-data mode `{other}` (expected impute0 or strict)"
            )),
        }
    }
}

/// Corruption risk index; `None` when every indicator is masked.
pub fn cri(v: &IndicatorVector, mode: MissingMode) -> Option<f64> {
    let present: Vec<f64> = v.values.iter().flatten().copied().collect();
    if present.is_empty() {
        return None;
    }
    let sum: f64 = present.iter().sum();
    Some(match mode {
        MissingMode::Impute0 => sum / 8.0,
        MissingMode::Strict => sum / present.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractScore {
    pub contract_id: String,
    pub settlement_id: SettlementId,
    pub indicators: IndicatorVector,
    pub csb: Option<f64>,
    pub cri: Option<f64>,
    pub cri_strict: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedContract {
    pub contract_id: String,
    pub settlement_id: SettlementId,
    pub issue: ContractIssue,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredCorpus {
    pub markets: MarketStats,
    pub scores: Vec<ContractScore>,
    pub rejected: Vec<RejectedContract>,
}

/// Validates, computes market norms on the valid contracts, then scores each.
pub fn score_contracts(
    contracts: &[ContractRecord],
    rules: &IndicatorRules,
    granularity: MarketGranularity,
    exec: Exec,
) -> ScoredCorpus {
    let mut valid = Vec::with_capacity(contracts.len());
    let mut rejected = Vec::new();
    for c in contracts {
        match validate(c) {
            Ok(()) => valid.push(c),
            Err(issue) => {
                log::warn!("reason=DATE_INVERSION contract={} {issue}", c.contract_id);
                rejected.push(RejectedContract {
                    contract_id: c.contract_id.clone(),
                    settlement_id: c.settlement_id.clone(),
                    issue,
                });
            }
        }
    }
    let markets = market_averages(valid.iter().copied(), granularity);
    let scores = exec::map(exec, &valid, |c| {
        let v = elementary_indicators(c, &markets, rules).expect("validated above");
        ContractScore {
            contract_id: c.contract_id.clone(),
            settlement_id: c.settlement_id.clone(),
            indicators: v,
            csb: c_csb(&v),
            cri: cri(&v, MissingMode::Impute0),
            cri_strict: cri(&v, MissingMode::Strict),
        }
    });
    ScoredCorpus {
        markets,
        scores,
        rejected,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettlementRisk {
    pub settlement_id: SettlementId,
    /// Share of contracts that were closed-procedure or single-bid.
    pub mean_csb: Option<f64>,
    pub mean_cri: Option<f64>,
    pub mean_cri_strict: Option<f64>,
    pub n_contracts: usize,
}

impl SettlementRisk {
    pub fn mean_cri_for(&self, mode: MissingMode) -> Option<f64> {
        match mode {
            MissingMode::Impute0 => self.mean_cri,
            MissingMode::Strict => self.mean_cri_strict,
        }
    }
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, n) = values
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Averages scores per settlement; settlements appear in order of first contract.
pub fn aggregate_settlements(scores: &[ContractScore]) -> Vec<SettlementRisk> {
    let mut order: Vec<&SettlementId> = Vec::new();
    let mut groups: HashMap<&SettlementId, Vec<&ContractScore>> = HashMap::new();
    for s in scores {
        groups
            .entry(&s.settlement_id)
            .or_insert_with(|| {
                order.push(&s.settlement_id);
                Vec::new()
            })
            .push(s);
    }
    order
        .into_iter()
        .map(|sid| {
            let g = &groups[sid];
            SettlementRisk {
                settlement_id: sid.clone(),
                mean_csb: mean_of(g.iter().map(|s| s.csb)),
                mean_cri: mean_of(g.iter().map(|s| s.cri)),
                mean_cri_strict: mean_of(g.iter().map(|s| s.cri_strict)),
                n_contracts: g.len(),
            }
        })
        .collect()
}

/// Settlements awarding on average at least `min_rate` contracts per year over
/// `years` years, minus the `excluded` set.
pub fn eligibility_filter<'a>(
    contracts: impl IntoIterator<Item = &'a ContractRecord>,
    years: u32,
    min_rate: f64,
    excluded: &BTreeSet<SettlementId>,
) -> BTreeSet<SettlementId> {
    assert!(
        years >= 1,
        "observation window must cover at least one year"
    );
    let mut counts: BTreeMap<&SettlementId, usize> = BTreeMap::new();
    for c in contracts {
        *counts.entry(&c.settlement_id).or_default() += 1;
    }
    counts
        .into_iter()
        .filter(|(s, n)| *n as f64 / f64::from(years) >= min_rate && !excluded.contains(*s))
        .map(|(s, _)| s.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn base() -> ContractRecord {
        ContractRecord {
            contract_id: "c1".into(),
            settlement_id: "S1".into(),
            cpv_code: "45000000".into(),
            n_bidders: Some(1),
            procedure_kind: Some(ProcedureKind::OpenCall),
            call_published: Some(true),
            call_date: Some(d("2010-01-01")),
            submission_deadline: Some(d("2010-01-21")),
            decision_date: Some(d("2010-02-20")),
            eligibility_criteria_len: Some(100),
            award_criteria: Some(AwardCriteria::PriceOnly),
            call_modified: Some(false),
        }
    }

    fn market(mean: f64) -> MarketStats {
        let mut m = MarketStats::default();
        m.markets.insert(
            "45000000".into(),
            MarketMean {
                mean_len: mean,
                n_with_len: 2,
            },
        );
        m
    }

    #[test]
    fn single_bid_only() {
        let v = elementary_indicators(&base(), &market(200.0), &IndicatorRules::default()).unwrap();
        let vals: Vec<f64> = v.values().iter().map(|x| x.unwrap()).collect();
        assert_eq!(vals, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(cri(&v, MissingMode::Impute0), Some(0.125));
        assert_eq!(c_csb(&v), Some(1.0));
    }

    #[test]
    fn bid_window_bands() {
        let r = IndicatorRules::default();
        assert_eq!(bid_time_score(4, &r), 1.0);
        assert_eq!(bid_time_score(5, &r), 0.5);
        assert_eq!(bid_time_score(10, &r), 0.5);
        assert_eq!(bid_time_score(15, &r), 0.5);
        assert_eq!(bid_time_score(16, &r), 0.0);
        let mut c = base();
        c.submission_deadline = Some(d("2010-01-11"));
        let v = elementary_indicators(&c, &market(200.0), &r).unwrap();
        assert_eq!(v.get(Indicator::BidTime), Some(0.5));
    }

    #[test]
    fn decision_period_bands() {
        let r = IndicatorRules::default();
        assert_eq!(decide_time_flag(0, &r), 1.0);
        assert_eq!(decide_time_flag(3, &r), 1.0);
        assert_eq!(decide_time_flag(5, &r), 1.0);
        assert_eq!(decide_time_flag(6, &r), 0.0);
        assert_eq!(decide_time_flag(100, &r), 0.0);
        assert_eq!(decide_time_flag(101, &r), 1.0);
        let mut c = base();
        c.decision_date = Some(d("2010-01-24"));
        let v = elementary_indicators(&c, &market(200.0), &r).unwrap();
        assert_eq!(v.get(Indicator::DecideTime), Some(1.0));
        let flipped = IndicatorRules {
            fast_decision_inclusive: false,
            slow_decision_inclusive: true,
            ..r
        };
        assert_eq!(decide_time_flag(5, &flipped), 0.0);
        assert_eq!(decide_time_flag(100, &flipped), 1.0);
    }

    #[test]
    fn date_inversion_rejected() {
        let mut c = base();
        c.decision_date = Some(d("2010-01-10"));
        let err =
            elementary_indicators(&c, &market(200.0), &IndicatorRules::default()).unwrap_err();
        assert_eq!(err.reason_code(), "DATE_INVERSION");
        let corpus = score_contracts(
            &[c, base()],
            &IndicatorRules::default(),
            MarketGranularity::ExactCode,
            Exec::Sequential,
        );
        assert_eq!(corpus.rejected.len(), 1);
        assert_eq!(corpus.scores.len(), 1);
    }

    #[test]
    fn composites() {
        let mk = |a: f64, b: f64| {
            IndicatorVector::from_values([
                Some(a),
                Some(b),
                Some(0.0),
                Some(0.0),
                Some(0.0),
                Some(0.0),
                Some(0.0),
                Some(0.0),
            ])
        };
        assert_eq!(c_csb(&mk(1.0, 0.0)), Some(1.0));
        assert_eq!(c_csb(&mk(0.0, 0.0)), Some(0.0));
        assert_eq!(c_csb(&mk(1.0, 1.0)), Some(1.0));
        let mut masked = mk(1.0, 0.0);
        masked.set(Indicator::ClosedProc, None);
        assert_eq!(c_csb(&masked), None);

        let zeros = IndicatorVector::from_values([Some(0.0); 8]);
        let ones = IndicatorVector::from_values([Some(1.0); 8]);
        assert_eq!(cri(&zeros, MissingMode::Impute0), Some(0.0));
        assert_eq!(cri(&ones, MissingMode::Impute0), Some(1.0));
        let mixed =
            IndicatorVector::from_values([1.0, 1.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0].map(Some));
        assert_eq!(cri(&mixed, MissingMode::Impute0), Some(0.3125));
        assert_eq!(cri(&IndicatorVector::default(), MissingMode::Impute0), None);
    }

    #[test]
    fn missing_modes() {
        let mut v = IndicatorVector::from_values([Some(1.0); 8]);
        v.set(Indicator::EligCrit, None);
        v.set(Indicator::CallMod, None);
        assert_eq!(cri(&v, MissingMode::Impute0), Some(6.0 / 8.0));
        assert_eq!(cri(&v, MissingMode::Strict), Some(1.0));
    }

    #[test]
    fn market_means() {
        let mut a = base();
        a.eligibility_criteria_len = Some(100);
        let mut b = base();
        b.eligibility_criteria_len = Some(300);
        let mut c = base();
        c.eligibility_criteria_len = None;
        let mut other = base();
        other.cpv_code = "33000000".into();
        other.eligibility_criteria_len = Some(50);
        let m = market_averages([&a, &b, &c, &other], MarketGranularity::ExactCode);
        assert_eq!(m.mean_for("45000000"), Some(200.0));
        assert_eq!(m.markets["45000000"].n_with_len, 2);
        assert_eq!(m.mean_for("33000000"), Some(50.0));
        // a contract alone in its market is never above its own mean
        let v = elementary_indicators(&other, &m, &IndicatorRules::default()).unwrap();
        assert_eq!(v.get(Indicator::EligCrit), Some(0.0));
        let by_division = market_averages([&a, &b, &other], MarketGranularity::Prefix(2));
        assert_eq!(by_division.mean_for("45111111"), Some(200.0));
    }

    #[test]
    fn settlement_means() {
        let mk = |sid: &str, csb: f64, cri: f64| ContractScore {
            contract_id: "x".into(),
            settlement_id: sid.into(),
            indicators: IndicatorVector::default(),
            csb: Some(csb),
            cri: Some(cri),
            cri_strict: Some(cri),
        };
        let rows = aggregate_settlements(&[
            mk("A", 1.0, 0.25),
            mk("A", 0.0, 0.25),
            mk("A", 0.0, 0.5),
            mk("B", 1.0, 0.4),
        ]);
        assert_eq!(rows[0].settlement_id.as_str(), "A");
        assert!((rows[0].mean_cri.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((rows[0].mean_csb.unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(rows[1].mean_cri, Some(0.4));
        assert_eq!(rows[1].n_contracts, 1);
    }

    #[test]
    fn eligibility() {
        let mut corpus = Vec::new();
        for i in 0..45 {
            let mut c = base();
            c.contract_id = format!("a{i}");
            c.settlement_id = "A".into();
            corpus.push(c);
        }
        for i in 0..44 {
            let mut c = base();
            c.contract_id = format!("b{i}");
            c.settlement_id = "B".into();
            corpus.push(c);
        }
        for i in 0..90 {
            let mut c = base();
            c.contract_id = format!("cap{i}");
            c.settlement_id = "Capital".into();
            corpus.push(c);
        }
        let excluded: BTreeSet<SettlementId> = ["Capital".into()].into();
        let ok = eligibility_filter(&corpus, 9, 5.0, &excluded);
        assert_eq!(
            ok.into_iter().collect::<Vec<_>>(),
            vec![SettlementId::from("A")]
        );
    }
}
