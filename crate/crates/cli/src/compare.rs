//! Two-group comparison of settlement risk averages.

use std::collections::{BTreeMap, HashMap};

use anyhow::{bail, Result};
use log::{info, warn};
use serde::Deserialize;
use socrisk::procurement::MissingMode;
use socrisk::stats::{mann_whitney_u, simulated_power, MwuMethod, MwuResult};

use crate::config::RunConfig;
use crate::score::RiskRow;
use crate::table::{num, read_own, read_rows, write_table, ErrorLog};

pub const MEASURES: [&str; 2] = ["mean_csb", "mean_cri"];

/// One row of the group membership file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct GroupRow {
    pub settlement_id: String,
    pub group: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureComparison {
    pub measure: &'static str,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub test: MwuResult,
    /// Rejection share under the configured mean shift.
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub measure: &'static str,
    pub group: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    /// The two labels in sorted order; the first is sample `a`.
    pub groups: [String; 2],
    pub measures: Vec<MeasureComparison>,
    pub histogram: Vec<HistogramBin>,
}

pub struct CompareOptions {
    pub missing_mode: MissingMode,
    pub bins: usize,
    pub alpha: f64,
    pub power_shift: f64,
    pub power_sims: usize,
    pub seed: u64,
}

impl CompareOptions {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self {
            missing_mode: cfg.missing_mode,
            bins: cfg.histogram_bins,
            alpha: cfg.alpha,
            power_shift: cfg.power_shift,
            power_sims: cfg.power_sims,
            seed: cfg.seed,
        }
    }
}

fn value(r: &RiskRow, measure: &str, mode: MissingMode) -> Option<f64> {
    match measure {
        "mean_csb" => r.mean_csb,
        _ => r.mean_cri(mode),
    }
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Standard deviation of both groups around their own means.
fn pooled_sd(a: &[f64], b: &[f64]) -> f64 {
    let ss = |v: &[f64]| {
        let m = mean(v);
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>()
    };
    ((ss(a) + ss(b)) / (a.len() + b.len() - 2) as f64).sqrt()
}

fn histogram(
    measure: &'static str,
    groups: &[String; 2],
    samples: [&[f64]; 2],
    bins: usize,
) -> Vec<HistogramBin> {
    let all = samples.iter().flat_map(|s| s.iter().copied());
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| {
        (l.min(x), h.max(x))
    });
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        1.0
    };
    let mut out = Vec::with_capacity(2 * bins);
    for (group, sample) in groups.iter().zip(samples) {
        let mut counts = vec![0usize; bins];
        for &x in sample {
            let i = (((x - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        for (i, count) in counts.into_iter().enumerate() {
            out.push(HistogramBin {
                measure,
                group: group.clone(),
                lo: lo + i as f64 * width,
                hi: if i + 1 == bins {
                    hi.max(lo + width)
                } else {
                    lo + (i + 1) as f64 * width
                },
                count,
            });
        }
    }
    out
}

/// Compares the two labelled groups on both risk averages.
///
/// Settlements without a value for a measure are left out of that measure.
pub fn compare_groups(
    risk: &[RiskRow],
    membership: &[GroupRow],
    opts: &CompareOptions,
) -> Result<CompareReport> {
    let by_id: HashMap<&str, &RiskRow> =
        risk.iter().map(|r| (r.settlement_id.as_str(), r)).collect();
    let mut members: BTreeMap<&str, Vec<&RiskRow>> = BTreeMap::new();
    for m in membership {
        let Some(r) = by_id.get(m.settlement_id.as_str()) else {
            bail!(
                "group file references unknown settlement {}",
                m.settlement_id
            );
        };
        members.entry(m.group.as_str()).or_default().push(r);
    }
    if members.len() != 2 {
        let labels: Vec<&str> = members.keys().copied().collect();
        bail!(
            "group file must carry exactly two labels, found {}: {}",
            labels.len(),
            labels.join(", ")
        );
    }
    let groups: [String; 2] =
        [0, 1].map(|i| members.keys().nth(i).expect("two labels").to_string());

    let mut measures = Vec::with_capacity(MEASURES.len());
    let mut hist = Vec::new();
    for (k, measure) in MEASURES.into_iter().enumerate() {
        let [a, b] = [0, 1].map(|i| {
            members[groups[i].as_str()]
                .iter()
                .filter_map(|r| value(r, measure, opts.missing_mode))
                .collect::<Vec<f64>>()
        });
        for (g, s) in groups.iter().zip([&a, &b]) {
            if s.len() < 2 {
                bail!(
                    "group {g} has {} settlements with {measure}, need at least 2",
                    s.len()
                );
            }
        }
        let skipped = members[groups[0].as_str()].len() + members[groups[1].as_str()].len()
            - a.len()
            - b.len();
        if skipped > 0 {
            warn!("compare: {skipped} settlements lack {measure} and are left out of it");
        }
        let test = mann_whitney_u(&a, &b);
        let sd = pooled_sd(&a, &b);
        let power = if sd > 0.0 {
            simulated_power(
                a.len(),
                b.len(),
                opts.power_shift,
                sd,
                opts.alpha,
                opts.power_sims,
                opts.seed + k as u64,
            )
        } else {
            f64::NAN
        };
        hist.extend(histogram(measure, &groups, [&a, &b], opts.bins));
        measures.push(MeasureComparison {
            measure,
            a,
            b,
            test,
            power,
        });
    }
    Ok(CompareReport {
        groups,
        measures,
        histogram: hist,
    })
}

pub fn load_groups(cfg: &RunConfig) -> Result<Vec<GroupRow>> {
    let path = cfg.input(&cfg.groups, "groups")?;
    let mut errors = ErrorLog::default();
    let rows: Vec<(u64, GroupRow)> = read_rows(&path, cfg.has_headers, &mut errors)?;
    errors.check("compare", cfg.max_error_rate)?;
    let mut seen: HashMap<String, String> = HashMap::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, r) in rows {
        match seen.get(&r.settlement_id) {
            Some(g) if *g != r.group => {
                bail!(
                    "{}:{line}: settlement {} listed in groups {g} and {}",
                    path.display(),
                    r.settlement_id,
                    r.group
                )
            }
            Some(_) => {}
            None => {
                seen.insert(r.settlement_id.clone(), r.group.clone());
                out.push(r);
            }
        }
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig) -> Result<CompareReport> {
    let risk: Vec<RiskRow> = read_own(&cfg.out_path("settlement_risk.csv"))?;
    let groups = load_groups(cfg)?;
    let report = compare_groups(&risk, &groups, &CompareOptions::from_config(cfg))?;
    let [ga, gb] = &report.groups;
    write_table(
        &cfg.out_path("compare.csv"),
        &[
            ("measure", "string"),
            ("group_a", "string"),
            ("group_b", "string"),
            ("n_a", "integer"),
            ("n_b", "integer"),
            ("median_a", "float"),
            ("median_b", "float"),
            ("mean_a", "float"),
            ("mean_b", "float"),
            ("u", "float"),
            ("p_value", "float"),
            ("method", "enum(exact,normal_approx)"),
            ("power_shift", "float"),
            ("power", "float"),
        ],
        report.measures.iter().map(|m| {
            vec![
                m.measure.to_owned(),
                ga.clone(),
                gb.clone(),
                m.a.len().to_string(),
                m.b.len().to_string(),
                num(median(&m.a)),
                num(median(&m.b)),
                num(mean(&m.a)),
                num(mean(&m.b)),
                num(m.test.u),
                num(m.test.p_value),
                match m.test.method {
                    MwuMethod::Exact => "exact",
                    MwuMethod::NormalApprox => "normal_approx",
                }
                .to_owned(),
                num(cfg.power_shift),
                num(m.power),
            ]
        }),
    )?;
    write_table(
        &cfg.out_path("compare_hist.csv"),
        &[
            ("measure", "string"),
            ("group", "string"),
            ("bin_lo", "float"),
            ("bin_hi", "float"),
            ("count", "integer"),
        ],
        report.histogram.iter().map(|h| {
            vec![
                h.measure.to_owned(),
                h.group.clone(),
                num(h.lo),
                num(h.hi),
                h.count.to_string(),
            ]
        }),
    )?;
    for m in &report.measures {
        info!(
            "compare: {} {ga} vs {gb}: U={} p={:.4} power={:.3}",
            m.measure, m.test.u, m.test.p_value, m.power
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn risk(id: &str, csb: f64) -> RiskRow {
        RiskRow {
            settlement_id: id.into(),
            n_contracts: 10,
            mean_csb: Some(csb),
            mean_cri_impute0: Some(csb / 2.0),
            mean_cri_strict: None,
        }
    }

    fn member(id: &str, g: &str) -> GroupRow {
        GroupRow {
            settlement_id: id.into(),
            group: g.into(),
        }
    }

    fn opts() -> CompareOptions {
        CompareOptions {
            missing_mode: MissingMode::Impute0,
            bins: 4,
            alpha: 0.05,
            power_shift: 0.06,
            power_sims: 50,
            seed: 1,
        }
    }

    #[test]
    fn separated_groups() {
        let rows: Vec<RiskRow> = (0..8).map(|i| risk(&format!("s{i}"), i as f64)).collect();
        let m: Vec<GroupRow> = (0..8)
            .map(|i| member(&format!("s{i}"), if i < 4 { "low" } else { "high" }))
            .collect();
        let r = compare_groups(&rows, &m, &opts()).unwrap();
        assert_eq!(r.groups, ["high".to_string(), "low".to_string()]);
        assert_eq!(r.measures[0].test.u, 16.0);
        assert_eq!(r.measures[0].test.method, MwuMethod::Exact);
        let counts: usize = r.histogram.iter().map(|h| h.count).sum();
        assert_eq!(counts, 16);
        assert_eq!(r.histogram.len(), 2 * 2 * 4);
    }

    #[test]
    fn bad_group_files() {
        let rows: Vec<RiskRow> = (0..4).map(|i| risk(&format!("s{i}"), i as f64)).collect();
        let err = compare_groups(&rows, &[member("s0", "a"), member("nowhere", "b")], &opts())
            .unwrap_err();
        assert!(err.to_string().contains("nowhere"));
        let small = [member("s0", "a"), member("s1", "b"), member("s2", "b")];
        assert!(compare_groups(&rows, &small, &opts())
            .unwrap_err()
            .to_string()
            .contains("at least 2"));
        let three = [member("s0", "a"), member("s1", "b"), member("s2", "c")];
        assert!(compare_groups(&rows, &three, &opts()).is_err());
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
