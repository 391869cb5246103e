//! Contract red flags and settlement risk averages.

use std::collections::HashSet;
use std::path::Path;

use anyhow::Result;
use log::info;
use serde::{Deserialize, Serialize};
use socrisk::procurement::{
    aggregate_settlements, score_contracts, ContractRecord, Indicator, IndicatorRules, MissingMode,
    ScoredCorpus,
};
use socrisk::Exec;

use crate::config::RunConfig;
use crate::table::{
    num, opt_num, read_rows, write_records, write_table, AuditLog, ErrorLog, Schema,
};

pub const CONTRACT_SCHEMA: Schema = &[
    ("contract_id", "string"),
    ("settlement_id", "string"),
    ("cpv_code", "string"),
    ("n_bidders", "integer?"),
    (
        "procedure_kind",
        "enum(open_call,direct_award,invite_only)?",
    ),
    ("call_published", "bool?"),
    ("call_date", "date?"),
    ("submission_deadline", "date?"),
    ("decision_date", "date?"),
    ("eligibility_criteria_len", "integer?"),
    ("award_criteria", "enum(price_only,non_price)?"),
    ("call_modified", "bool?"),
];

pub const RISK_SCHEMA: Schema = &[
    ("settlement_id", "string"),
    ("n_contracts", "integer"),
    ("mean_csb", "float?"),
    ("mean_cri_impute0", "float?"),
    ("mean_cri_strict", "float?"),
];

/// One row of `settlement_risk.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub settlement_id: String,
    pub n_contracts: usize,
    pub mean_csb: Option<f64>,
    pub mean_cri_impute0: Option<f64>,
    pub mean_cri_strict: Option<f64>,
}

impl RiskRow {
    pub fn mean_cri(&self, mode: MissingMode) -> Option<f64> {
        match mode {
            MissingMode::Impute0 => self.mean_cri_impute0,
            MissingMode::Strict => self.mean_cri_strict,
        }
    }
}

/// Reads the contract file; duplicate ids count as malformed rows.
pub fn load_contracts(
    path: &Path,
    has_headers: bool,
    errors: &mut ErrorLog,
) -> Result<Vec<ContractRecord>> {
    let rows: Vec<(u64, ContractRecord)> = read_rows(path, has_headers, errors)?;
    let mut seen = HashSet::with_capacity(rows.len());
    let mut out = Vec::with_capacity(rows.len());
    for (line, c) in rows {
        if c.contract_id.is_empty() || c.settlement_id.as_str().is_empty() {
            errors.record(path, line, "empty contract or settlement id");
        } else if !seen.insert(c.contract_id.clone()) {
            errors.record(
                path,
                line,
                format!("duplicate contract id {}", c.contract_id),
            );
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

pub fn write_contracts(path: &Path, contracts: &[ContractRecord]) -> Result<()> {
    write_records(path, CONTRACT_SCHEMA, contracts)
}

pub fn risk_rows(scored: &ScoredCorpus) -> Vec<RiskRow> {
    aggregate_settlements(&scored.scores)
        .into_iter()
        .map(|r| RiskRow {
            settlement_id: r.settlement_id.to_string(),
            n_contracts: r.n_contracts,
            mean_csb: r.mean_csb,
            mean_cri_impute0: r.mean_cri,
            mean_cri_strict: r.mean_cri_strict,
        })
        .collect()
}

pub fn run(cfg: &RunConfig, exec: Exec) -> Result<ScoredCorpus> {
    let path = cfg.input(&cfg.contracts, "contracts")?;
    let mut errors = ErrorLog::default();
    let contracts = load_contracts(&path, cfg.has_headers, &mut errors)?;
    errors.check("score", cfg.max_error_rate)?;
    errors.write(&cfg.out_path("errors_score.csv"))?;

    let scored = score_contracts(
        &contracts,
        &IndicatorRules::default(),
        cfg.granularity(),
        exec,
    );
    let mut audit = AuditLog::default();
    for r in &scored.rejected {
        audit.drop(
            "contract",
            r.contract_id.clone(),
            r.issue.reason_code(),
            r.issue.to_string(),
        );
    }
    audit.write(&cfg.out_path("audit_score.csv"))?;

    let mut schema: Vec<(&'static str, &'static str)> =
        vec![("contract_id", "string"), ("settlement_id", "string")];
    schema.extend(Indicator::ALL.iter().map(|i| (i.name(), "float?")));
    schema.extend([
        ("c_csb", "float?"),
        ("cri_impute0", "float?"),
        ("cri_strict", "float?"),
    ]);
    write_table(
        &cfg.out_path("contract_scores.csv"),
        &schema,
        scored.scores.iter().map(|s| {
            let mut row = vec![s.contract_id.clone(), s.settlement_id.to_string()];
            row.extend(s.indicators.values().iter().map(|v| opt_num(*v)));
            row.extend([opt_num(s.csb), opt_num(s.cri), opt_num(s.cri_strict)]);
            row
        }),
    )?;
    let risk = risk_rows(&scored);
    write_table(
        &cfg.out_path("settlement_risk.csv"),
        RISK_SCHEMA,
        risk.iter().map(|r| {
            vec![
                r.settlement_id.clone(),
                r.n_contracts.to_string(),
                opt_num(r.mean_csb),
                opt_num(r.mean_cri_impute0),
                opt_num(r.mean_cri_strict),
            ]
        }),
    )?;
    write_table(
        &cfg.out_path("markets.csv"),
        &[
            ("market", "string"),
            ("mean_eligibility_len", "float"),
            ("n_with_len", "integer"),
        ],
        scored
            .markets
            .markets
            .iter()
            .map(|(k, m)| vec![k.clone(), num(m.mean_len), m.n_with_len.to_string()]),
    )?;
    info!(
        "score: {} contracts scored, {} rejected, {} settlements",
        scored.scores.len(),
        scored.rejected.len(),
        risk.len()
    );
    Ok(scored)
}
