#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn socrisk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_socrisk"))
        .args(args)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn ok(o: &Output) -> Result<(), String> {
    if o.status.success() {
        Ok(())
    } else {
        Err(format!("command failed: {}", stderr(o)))
    }
}

/// Rows of a CSV file keyed by column name.
pub fn read_csv(path: &Path) -> Vec<HashMap<String, String>> {
    let mut rdr =
        csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let headers = rdr.headers().unwrap().clone();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            headers
                .iter()
                .zip(r.iter())
                .map(|(h, v)| (h.to_owned(), v.to_owned()))
                .collect()
        })
        .collect()
}

/// Parses `a/b` or a plain number; empty is `None`.
pub fn frac(s: &str) -> Option<f64> {
    if s.is_empty() {
        return None;
    }
    Some(match s.split_once('/') {
        Some((a, b)) => a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    })
}

fn num(s: &str) -> Option<f64> {
    (!s.is_empty()).then(|| s.parse().unwrap())
}

/// Compares a `score` output directory with the hand-scored worksheet.
/// Contract scores must match bit for bit, settlement means to 1e-12.
pub fn check_worksheet(out: &Path) -> Result<(), String> {
    let dir = fixture("worksheet");
    let got: HashMap<String, HashMap<String, String>> = read_csv(&out.join("contract_scores.csv"))
        .into_iter()
        .map(|r| (r["contract_id"].clone(), r))
        .collect();
    let expected = read_csv(&dir.join("expected_scores.csv"));
    if got.len() != expected.len() {
        return Err(format!(
            "{} scored contracts, expected {}",
            got.len(),
            expected.len()
        ));
    }
    for e in &expected {
        let id = &e["contract_id"];
        let g = got
            .get(id)
            .ok_or_else(|| format!("{id} missing from output"))?;
        for (col, want) in e {
            if col == "contract_id" {
                continue;
            }
            let have = num(&g[col]);
            if have != frac(want) {
                return Err(format!("{id} {col}: got {have:?}, worksheet {want}"));
            }
        }
    }
    let risk: HashMap<String, HashMap<String, String>> = read_csv(&out.join("settlement_risk.csv"))
        .into_iter()
        .map(|r| (r["settlement_id"].clone(), r))
        .collect();
    for e in read_csv(&dir.join("expected_settlements.csv")) {
        let id = &e["settlement_id"];
        let g = risk
            .get(id)
            .ok_or_else(|| format!("settlement {id} missing"))?;
        if g["n_contracts"] != e["n_contracts"] {
            return Err(format!(
                "{id} n_contracts {} vs {}",
                g["n_contracts"], e["n_contracts"]
            ));
        }
        for col in ["mean_csb", "mean_cri_impute0", "mean_cri_strict"] {
            let (have, want) = (num(&g[col]).unwrap(), frac(&e[col]).unwrap());
            if (have - want).abs() > 1e-12 {
                return Err(format!("{id} {col}: got {have}, worksheet {want}"));
            }
        }
    }
    let audit = read_csv(&out.join("audit_score.csv"));
    if audit.len() != 1
        || audit[0]["entity_id"] != "C06"
        || audit[0]["reason_code"] != "DATE_INVERSION"
    {
        return Err(format!(
            "expected only C06 rejected for date inversion, audit has {audit:?}"
        ));
    }
    Ok(())
}

/// Runs `score` on the worksheet into `out`.
pub fn score_worksheet(out: &Path) -> Result<(), String> {
    let cfg = out.join("worksheet.toml");
    std::fs::create_dir_all(out).unwrap();
    std::fs::write(
        &cfg,
        format!(
            "contracts = {:?}\nout = {:?}\n",
            fixture("worksheet/contracts.csv").display().to_string(),
            out.display().to_string()
        ),
    )
    .unwrap();
    ok(&socrisk(&["score", "--config", cfg.to_str().unwrap()]))
}

/// Every file under `a` exists under `b` with identical bytes.
pub fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let mut n = 0;
    for entry in std::fs::read_dir(a).unwrap() {
        let p = entry.unwrap().path();
        let q = b.join(p.file_name().unwrap());
        if p.is_dir() {
            n += same_tree(&p, &q)?;
        } else {
            let (x, y) = (
                std::fs::read(&p).unwrap(),
                std::fs::read(&q).map_err(|e| format!("{}: {e}", q.display()))?,
            );
            if x != y {
                return Err(format!("{} differs between runs", p.display()));
            }
            n += 1;
        }
    }
    Ok(n)
}
