//! Text, JSON, CSV and Markdown renderings.
//!
//! Every format carries the same numbers; list fields are written as
//! comma-separated values in text and Markdown and space-separated in CSV.

use std::fmt::Write as _;

use k3maps::{AdmissibilityTable, BetaPartition, FeasibilityVerdict, TableReport, TreeReport};
use serde::Serialize;

#[derive(Clone, Copy)]
pub enum Format {
    Text,
    Json,
    Csv,
    Markdown,
}

pub type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string(value)? + "\n")
}

fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn markdown(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!(
        "| {} |\n|{}\n",
        headers.join(" | "),
        "---|".repeat(headers.len())
    );
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out
}

#[derive(Serialize)]
struct VerdictRow<'a> {
    g: u64,
    deg: u64,
    l: u64,
    profile: &'a str,
    admissible: bool,
    reason: String,
    lambda: String,
    #[serde(rename = "N")]
    n: String,
    witness_partition: String,
    witness_shape: String,
}

const VERDICT_FIELDS: [&str; 10] = [
    "g",
    "deg",
    "l",
    "profile",
    "admissible",
    "reason",
    "lambda",
    "N",
    "witness_partition",
    "witness_shape",
];

fn partition_list(p: &Option<BetaPartition>, sep: &str) -> String {
    p.as_ref().map(|p| join(p.parts(), sep)).unwrap_or_default()
}

fn verdict_row<'a>(v: &'a FeasibilityVerdict, sep: &str) -> VerdictRow<'a> {
    VerdictRow {
        g: v.g,
        deg: v.deg,
        l: v.l,
        profile: &v.profile,
        admissible: v.admissible,
        reason: v.reason.map(|r| r.to_string()).unwrap_or_default(),
        lambda: join(&v.lambda, sep),
        n: v.n_value.map(|n| n.to_string()).unwrap_or_default(),
        witness_partition: partition_list(&v.witness_partition, sep),
        witness_shape: v
            .witness_shape
            .as_ref()
            .map(ToString::to_string)
            .unwrap_or_default(),
    }
}

fn verdict_cells(v: &FeasibilityVerdict) -> Vec<String> {
    let r = verdict_row(v, ", ");
    vec![
        r.g.to_string(),
        r.deg.to_string(),
        r.l.to_string(),
        r.profile.to_string(),
        r.admissible.to_string(),
        r.reason,
        r.lambda,
        r.n,
        r.witness_partition,
        r.witness_shape,
    ]
}

pub fn verdict(v: &FeasibilityVerdict, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => json(v)?,
        Format::Csv => csv_rows([verdict_row(v, " ")])?,
        Format::Markdown => markdown(&VERDICT_FIELDS, &[verdict_cells(v)]),
        Format::Text => {
            let mut s = format!("g={} deg={} l={} profile={}\n", v.g, v.deg, v.l, v.profile);
            match v.reason {
                None => s.push_str("admissible\n"),
                Some(r) => {
                    let _ = writeln!(s, "inadmissible: {r}");
                }
            }
            if !v.lambda.is_empty() {
                let _ = writeln!(s, "lambda: {}", join(&v.lambda, ", "));
            }
            if let Some(n) = v.n_value {
                let _ = writeln!(s, "N: {n}");
            }
            if let Some(p) = &v.witness_partition {
                let _ = writeln!(s, "witness partition: {p}");
            }
            if let Some(shape) = &v.witness_shape {
                let _ = writeln!(s, "witness shape: {shape}");
            }
            s
        }
    })
}

pub fn table(t: &AdmissibilityTable, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => json(t)?,
        Format::Csv => csv_rows(t.verdicts.iter().map(|v| verdict_row(v, " ")))?,
        Format::Markdown => {
            let rows: Vec<_> = t.verdicts.iter().map(verdict_cells).collect();
            format!(
                "admissible l: {}\n\n{}",
                join(&t.admissible_l, ", "),
                markdown(&VERDICT_FIELDS, &rows)
            )
        }
        Format::Text => format!(
            "g={} deg={} l_max={} profile={}\nadmissible l: {}\n",
            t.g,
            t.deg,
            t.l_max,
            t.profile,
            join(&t.admissible_l, ", ")
        ),
    })
}

#[derive(Serialize)]
struct ReportCsvRow<'a> {
    deg: u64,
    g: u64,
    profile: &'a str,
    designated: bool,
    table: String,
    computed: String,
    status: String,
}

pub fn report(r: &TableReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => json(r)?,
        Format::Csv => csv_rows(r.rows.iter().flat_map(|row| {
            row.outcomes.iter().map(move |o| ReportCsvRow {
                deg: row.deg,
                g: row.g,
                profile: &o.profile,
                designated: o.profile == row.designated_profile,
                table: join(&row.published, " "),
                computed: join(&o.computed, " "),
                status: o.status.to_string(),
            })
        }))?,
        Format::Markdown => {
            let mut headers = vec!["deg", "g", "table"];
            let profiles: Vec<String> = r
                .rows
                .first()
                .map(|row| row.outcomes.iter().map(|o| o.profile.clone()).collect())
                .unwrap_or_default();
            headers.extend(profiles.iter().map(String::as_str));
            headers.extend(["designated", "status"]);
            let rows: Vec<Vec<String>> = r
                .rows
                .iter()
                .map(|row| {
                    let mut cells = vec![
                        row.deg.to_string(),
                        row.g.to_string(),
                        join(&row.published, ", "),
                    ];
                    cells.extend(
                        row.outcomes
                            .iter()
                            .map(|o| format!("{} ({})", join(&o.computed, ", "), o.status)),
                    );
                    cells.push(row.designated_profile.clone());
                    cells.push(row.status.to_string());
                    cells
                })
                .collect();
            let mut s = markdown(&headers, &rows);
            s.push('\n');
            for line in &r.narrative {
                let _ = writeln!(s, "{line}");
            }
            s
        }
        Format::Text => r.narrative.iter().map(|l| format!("{l}\n")).collect(),
    })
}

#[derive(Serialize)]
struct PartitionRow {
    parts: String,
    len: usize,
    sum: u64,
    sum_sq: u64,
}

pub fn partitions(n: u64, parts: &[BetaPartition], format: Format) -> Result<String> {
    let row = |p: &BetaPartition, sep| PartitionRow {
        parts: join(p.parts(), sep),
        len: p.len(),
        sum: p.sum(),
        sum_sq: p.sum_sq(),
    };
    Ok(match format {
        Format::Json => json(&parts)?,
        Format::Csv => csv_rows(parts.iter().map(|p| row(p, " ")))?,
        Format::Markdown => {
            let rows: Vec<_> = parts
                .iter()
                .map(|p| {
                    let r = row(p, ", ");
                    vec![
                        r.parts,
                        r.len.to_string(),
                        r.sum.to_string(),
                        r.sum_sq.to_string(),
                    ]
                })
                .collect();
            format!(
                "N = {n}: {} partitions\n\n{}",
                parts.len(),
                markdown(&["parts", "len", "sum", "sum_sq"], &rows)
            )
        }
        Format::Text => parts.iter().map(|p| format!("{p}\n")).collect(),
    })
}

#[derive(Serialize)]
struct TreeJson<'a> {
    deg: u64,
    #[serde(flatten)]
    report: &'a TreeReport,
    passes: bool,
}

#[derive(Serialize)]
struct TreeRow {
    deg: u64,
    depths: String,
    tree_depth: usize,
    betas: String,
    minimal: String,
    depth_ok: bool,
    leaf_pair_ok: bool,
    width_ok: bool,
    passes: bool,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn tree_report(deg: u64, r: &TreeReport, format: Format) -> Result<String> {
    let row = |sep| TreeRow {
        deg,
        depths: join(&r.depths, sep),
        tree_depth: r.tree_depth,
        betas: r.betas.as_ref().map(|b| join(b, sep)).unwrap_or_default(),
        minimal: opt(r.minimal),
        depth_ok: r.depth_ok,
        leaf_pair_ok: r.leaf_pair_ok,
        width_ok: r.width_ok,
        passes: r.passes(),
    };
    Ok(match format {
        Format::Json => json(&TreeJson {
            deg,
            report: r,
            passes: r.passes(),
        })?,
        Format::Csv => csv_rows([row(" ")])?,
        Format::Markdown => {
            let t = row(", ");
            let cells = vec![
                ("deg", t.deg.to_string()),
                ("depths", t.depths),
                ("tree depth", t.tree_depth.to_string()),
                ("betas", t.betas),
                ("minimal", t.minimal),
                ("depth", t.depth_ok.to_string()),
                ("leaf pairs", t.leaf_pair_ok.to_string()),
                ("width", t.width_ok.to_string()),
                ("passes", t.passes.to_string()),
            ];
            let rows: Vec<_> = cells
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), v])
                .collect();
            markdown(&["field", "value"], &rows)
        }
        Format::Text => {
            let t = row(", ");
            let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
            let mut s = format!(
                "deg: {deg}\ndepths: ({})\ntree depth: {}\n",
                t.depths, t.tree_depth
            );
            if r.betas.is_some() {
                let _ = writeln!(s, "betas: ({})", t.betas);
            }
            if let Some(m) = r.minimal {
                let _ = writeln!(s, "minimal: {}", if m { "yes" } else { "no" });
            }
            let _ = writeln!(s, "depth: {}", mark(r.depth_ok));
            let _ = writeln!(s, "leaf pairs: {}", mark(r.leaf_pair_ok));
            let _ = writeln!(s, "width: {}", mark(r.width_ok));
            let _ = writeln!(s, "{}", if r.passes() { "PASS" } else { "FAIL" });
            s
        }
    })
}
