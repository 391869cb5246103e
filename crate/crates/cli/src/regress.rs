//! Joins measures, risk and controls, then fits and reports the model suite.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use serde::{Deserialize, Serialize};
use socrisk::stats::{
    anova_f_importance, grid, marginal_effects, model_suite, outcome, render_suite, vif, Dependent,
    DependentSuite, ModelSpec, SettlementRow, StandardizedPredictors, SuiteOptions, CONTROL_NAMES,
    DIVERSITY, FRAGMENTATION, VIF_WARN,
};
use socrisk::SettlementId;

use crate::config::RunConfig;
use crate::measures::{DiversityRecord, FragmentationRecord};
use crate::score::RiskRow;
use crate::table::{num, read_own, read_rows, write_table, write_text, AuditLog, ErrorLog};

pub const UNDEFINED_FRAGMENTATION: &str = "UNDEFINED_FRAGMENTATION";
pub const UNDEFINED_DIVERSITY: &str = "UNDEFINED_DIVERSITY";
pub const MISSING_RISK: &str = "MISSING_RISK";
pub const MISSING_CONTROLS: &str = "MISSING_CONTROLS";

/// One row of the controls file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlsRecord {
    pub settlement_id: String,
    pub income_per_capita: f64,
    pub log_n_contracts: f64,
    pub log_population: f64,
    pub iwiw_use_rate: f64,
    pub mayor_victory_margin: f64,
    pub pct_hs_grads: f64,
    pub distance_to_capital_minutes: f64,
    pub share_inactive: f64,
    pub unemployment_rate: f64,
    pub share_over_60: f64,
    pub has_university: f64,
}

impl ControlsRecord {
    pub fn values(&self) -> [f64; 11] {
        [
            self.income_per_capita,
            self.log_n_contracts,
            self.log_population,
            self.iwiw_use_rate,
            self.mayor_victory_margin,
            self.pct_hs_grads,
            self.distance_to_capital_minutes,
            self.share_inactive,
            self.unemployment_rate,
            self.share_over_60,
            self.has_university,
        ]
    }

    pub fn from_values(settlement_id: String, v: [f64; 11]) -> Self {
        Self {
            settlement_id,
            income_per_capita: v[0],
            log_n_contracts: v[1],
            log_population: v[2],
            iwiw_use_rate: v[3],
            mayor_victory_margin: v[4],
            pct_hs_grads: v[5],
            distance_to_capital_minutes: v[6],
            share_inactive: v[7],
            unemployment_rate: v[8],
            share_over_60: v[9],
            has_university: v[10],
        }
    }
}

pub fn controls_schema() -> Vec<(&'static str, &'static str)> {
    let mut s = vec![("settlement_id", "string")];
    s.extend(CONTROL_NAMES.iter().map(|n| (*n, "float")));
    s
}

pub fn load_controls(
    path: &Path,
    has_headers: bool,
    max_error_rate: f64,
) -> Result<HashMap<String, [f64; 11]>> {
    let mut errors = ErrorLog::default();
    let rows: Vec<(u64, ControlsRecord)> = read_rows(path, has_headers, &mut errors)?;
    let mut out = HashMap::with_capacity(rows.len());
    for (line, r) in rows {
        if out.insert(r.settlement_id.clone(), r.values()).is_some() {
            errors.record(
                path,
                line,
                format!("duplicate settlement {}", r.settlement_id),
            );
        }
    }
    errors.check("controls", max_error_rate)?;
    Ok(out)
}

/// Joins the stage outputs for the settlements that have network measures.
pub fn join(cfg: &RunConfig, audit: &mut AuditLog) -> Result<Vec<SettlementRow>> {
    let frag: Vec<FragmentationRecord> = read_own(&cfg.out_path("fragmentation.csv"))?;
    let div: HashMap<String, DiversityRecord> =
        read_own::<DiversityRecord>(&cfg.out_path("diversity.csv"))?
            .into_iter()
            .map(|r| (r.settlement_id.clone(), r))
            .collect();
    let risk: HashMap<String, RiskRow> = read_own::<RiskRow>(&cfg.out_path("settlement_risk.csv"))?
        .into_iter()
        .map(|r| (r.settlement_id.clone(), r))
        .collect();
    let controls = load_controls(
        &cfg.input(&cfg.controls, "controls")?,
        cfg.has_headers,
        cfg.max_error_rate,
    )?;

    let mut rows = Vec::with_capacity(frag.len());
    for f in &frag {
        let id = &f.settlement_id;
        let d = div.get(id).and_then(|d| d.d);
        let r = risk.get(id);
        let csb = r.and_then(|r| r.mean_csb);
        let cri = r.and_then(|r| r.mean_cri(cfg.missing_mode));
        let ctl = controls.get(id);
        match (f.f, d, csb.zip(cri), ctl) {
            (None, ..) => audit.drop(
                "settlement",
                id.clone(),
                UNDEFINED_FRAGMENTATION,
                "no internal edges",
            ),
            (_, None, ..) => audit.drop(
                "settlement",
                id.clone(),
                UNDEFINED_DIVERSITY,
                "no user with connected alters",
            ),
            (_, _, None, _) => audit.drop(
                "settlement",
                id.clone(),
                MISSING_RISK,
                "no scored contracts",
            ),
            (_, _, _, None) => audit.drop(
                "settlement",
                id.clone(),
                MISSING_CONTROLS,
                "absent from controls file",
            ),
            (Some(f), Some(d), Some((csb, cri)), Some(ctl)) => rows.push(SettlementRow {
                settlement_id: SettlementId(id.clone()),
                mean_csb: csb,
                mean_cri: cri,
                fragmentation: f,
                diversity: d,
                controls: *ctl,
            }),
        }
    }
    if !audit.entries.is_empty() {
        let names: Vec<&str> = audit.entries.iter().map(|e| e.entity_id.as_str()).collect();
        warn!(
            "regress: dropped {} settlements at join: {}",
            names.len(),
            names.join(", ")
        );
    }
    Ok(rows)
}

pub struct RegressOutput {
    pub rows: Vec<SettlementRow>,
    pub suites: Vec<DependentSuite>,
    /// All model tables as aligned text.
    pub text: String,
}

pub fn run(cfg: &RunConfig) -> Result<RegressOutput> {
    let mut audit = AuditLog::default();
    let rows = join(cfg, &mut audit)?;
    audit.write(&cfg.out_path("audit_regress.csv"))?;
    if rows.is_empty() {
        bail!("no settlement survived the join");
    }

    let mut table_schema = vec![
        ("settlement_id", "string"),
        ("mean_csb", "float"),
        ("mean_cri", "float"),
        (FRAGMENTATION, "float"),
        (DIVERSITY, "float"),
    ];
    table_schema.extend(CONTROL_NAMES.iter().map(|n| (*n, "float")));
    write_table(
        &cfg.out_path("settlement_table.csv"),
        &table_schema,
        rows.iter().map(|r| {
            let mut v = vec![
                r.settlement_id.to_string(),
                num(r.mean_csb),
                num(r.mean_cri),
                num(r.fragmentation),
                num(r.diversity),
            ];
            v.extend(r.controls.iter().map(|&c| num(c)));
            v
        }),
    )?;

    let opts = SuiteOptions {
        standardize_dv: cfg.standardize_dv,
    };
    let suites = model_suite(&rows, &opts).context("fitting the model suite")?;
    let predictors = StandardizedPredictors::from_rows(&rows)?;

    let report = vif(&predictors.names, &predictors.columns)?;
    write_table(
        &cfg.out_path("vif.csv"),
        &[
            ("feature", "string"),
            ("vif", "float"),
            ("above_warn", "bool"),
        ],
        report
            .names
            .iter()
            .zip(&report.values)
            .map(|(n, &v)| vec![n.clone(), num(v), (v >= VIF_WARN).to_string()]),
    )?;

    let full = predictors.design(ModelSpec::Full)?;
    let xs = grid(-2.0, 2.0, cfg.marginal_points);
    let mut text = String::new();
    for suite in &suites {
        let dv = suite.dependent.name();
        text.push_str(&render_suite(suite));
        text.push('\n');
        write_text(
            &cfg.out_path(&format!("models_{dv}.txt")),
            &render_suite(suite),
        )?;

        let y = outcome(&rows, suite.dependent, &opts)?;
        let importance = anova_f_importance(&y, &full, cfg.alpha)?;
        write_table(
            &cfg.out_path(&format!("anova_{dv}.csv")),
            &[
                ("rank", "integer"),
                ("feature", "string"),
                ("F", "float"),
                ("p_value", "float"),
                ("significant", "bool"),
            ],
            importance.iter().enumerate().map(|(i, f)| {
                vec![
                    (i + 1).to_string(),
                    f.name.clone(),
                    num(f.f),
                    num(f.p_value),
                    f.significant.to_string(),
                ]
            }),
        )?;

        for feature in [FRAGMENTATION, DIVERSITY] {
            let pts =
                marginal_effects(suite.fit(ModelSpec::Full), feature, &xs, cfg.marginal_level)?;
            write_table(
                &cfg.out_path(&format!("marginal_{dv}_{feature}.csv")),
                &[
                    ("x", "float"),
                    ("prediction", "float"),
                    ("se", "float"),
                    ("lower", "float"),
                    ("upper", "float"),
                ],
                pts.iter().map(|p| {
                    vec![
                        num(p.x),
                        num(p.prediction),
                        num(p.se),
                        num(p.lower),
                        num(p.upper),
                    ]
                }),
            )?;
        }
    }
    let json = serde_json::json!({
        "n_settlements": rows.len(),
        "standardize_dv": cfg.standardize_dv,
        "missing_mode": cfg.missing_mode,
        "suites": suites,
        "vif": report,
    });
    write_text(
        &cfg.out_path("models.json"),
        &(serde_json::to_string_pretty(&json)? + "\n"),
    )?;
    info!("regress: {} settlements in the model sample", rows.len());
    Ok(RegressOutput { rows, suites, text })
}

/// One outcome's suite.
pub fn suite_for(suites: &[DependentSuite], dv: Dependent) -> Option<&DependentSuite> {
    suites.iter().find(|s| s.dependent == dv)
}
