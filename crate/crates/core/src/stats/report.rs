//! Aligned-text rendering of a model comparison table.

use std::fmt::Write;

use super::ols::{RegressionResult, INTERCEPT};
use super::suite::DependentSuite;

type StatCell = Box<dyn Fn(&RegressionResult) -> String>;

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

/// Side-by-side coefficient table: estimate with stars, standard error in
/// parentheses underneath, fit statistics and any `extra` rows at the bottom.
pub fn render_table(
    title: &str,
    columns: &[(&str, &RegressionResult)],
    extra: &[(&str, Vec<String>)],
) -> String {
    let mut vars: Vec<&str> = Vec::new();
    for (_, r) in columns {
        for n in &r.names {
            if n != INTERCEPT && !vars.contains(&n.as_str()) {
                vars.push(n);
            }
        }
    }
    vars.push(INTERCEPT);

    let label_w = vars.iter().map(|v| v.len()).max().unwrap_or(0).max(18);
    let col_w = 16;
    let mut out = String::new();
    let rule = "=".repeat(label_w + col_w * columns.len());
    let thin = "-".repeat(label_w + col_w * columns.len());
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{rule}");
    let _ = write!(out, "{:<label_w$}", "");
    for (i, (name, _)) in columns.iter().enumerate() {
        let _ = write!(out, "{:>col_w$}", format!("({}) {name}", i + 1));
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{thin}");
    for v in &vars {
        let _ = write!(out, "{v:<label_w$}");
        for (_, r) in columns {
            let cell = r
                .index_of(v)
                .map(|j| format!("{:.3}{}", r.coefficients[j], stars(r.p_values[j])))
                .unwrap_or_default();
            let _ = write!(out, "{cell:>col_w$}");
        }
        let _ = writeln!(out);
        let _ = write!(out, "{:<label_w$}", "");
        for (_, r) in columns {
            let cell = r
                .index_of(v)
                .map(|j| format!("({:.3})", r.std_errors[j]))
                .unwrap_or_default();
            let _ = write!(out, "{cell:>col_w$}");
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "{thin}");
    let stat_rows: [(&str, StatCell); 4] = [
        ("Observations", Box::new(|r| r.n.to_string())),
        ("R2", Box::new(|r| format!("{:.3}", r.r_squared))),
        (
            "Adjusted R2",
            Box::new(|r| format!("{:.3}", r.adj_r_squared)),
        ),
        (
            "F Statistic",
            Box::new(|r| match (r.f_statistic, r.f_p_value) {
                (Some(f), Some(p)) => format!("{f:.3}{}", stars(p)),
                _ => String::new(),
            }),
        ),
    ];
    for (label, f) in &stat_rows {
        let _ = write!(out, "{label:<label_w$}");
        for (_, r) in columns {
            let _ = write!(out, "{:>col_w$}", f(r));
        }
        let _ = writeln!(out);
    }
    for (label, cells) in extra {
        let _ = write!(out, "{label:<label_w$}");
        for cell in cells {
            let _ = write!(out, "{cell:>col_w$}");
        }
        let _ = writeln!(out);
    }
    let _ = write!(out, "{:<label_w$}", "(df)");
    for (_, r) in columns {
        let _ = write!(
            out,
            "{:>col_w$}",
            format!("({}; {})", r.n_predictors(), r.df_resid)
        );
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "Note: *p<0.1; **p<0.05; ***p<0.01");
    out
}

/// One table per outcome with all four models.
pub fn render_suite(suite: &DependentSuite) -> String {
    let cols: Vec<(&str, &RegressionResult)> = suite
        .fits
        .iter()
        .map(|f| (f.spec.label(), &f.result))
        .collect();
    let delta = suite
        .fits
        .iter()
        .map(|f| format!("{:+.3}", f.adj_r_squared_delta))
        .collect();
    render_table(
        &format!("Dependent variable: {}", suite.dependent.name()),
        &cols,
        &[("Adjusted R2 vs (1)", delta)],
    )
}
