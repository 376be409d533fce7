use std::fmt::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::{Cell, CombinedScore, Format, RunConfig, VariableRow};
use crate::error::{Error, Result};
use crate::simgen::TableRow;

const CONFIG_PREFIX: &str = "# config: ";
const TIME_PREFIX: &str = "# generated-unix: ";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ReportBody {
    Evaluate { rows: Vec<VariableRow>, custom: Option<String>, notices: Vec<String> },
    Combine { variables: Vec<String>, scores: Vec<CombinedScore>, notices: Vec<String> },
    Simulate { rows: Vec<TableRow> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub body: ReportBody,
}

impl Report {
    /// Full report text; `unix_time` only appears on the timestamp line.
    pub fn render(&self, unix_time: u64) -> String {
        match self.config.format {
            Format::Delimited => self.render_delimited(unix_time),
            Format::Records => self.render_records(unix_time),
        }
    }

    fn config_json(&self) -> String {
        serde_json::to_string(&self.config).expect("config serializes")
    }

    fn notices(&self) -> &[String] {
        match &self.body {
            ReportBody::Evaluate { notices, .. } | ReportBody::Combine { notices, .. } => notices,
            ReportBody::Simulate { .. } => &[],
        }
    }

    fn render_delimited(&self, unix_time: u64) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# iauc {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "{CONFIG_PREFIX}{}", self.config_json());
        let _ = writeln!(s, "{TIME_PREFIX}{unix_time}");
        for n in self.notices() {
            let _ = writeln!(s, "# notice: {n}");
        }
        match &self.body {
            ReportBody::Evaluate { rows, custom, .. } => {
                let mut head =
                    vec!["variable".to_string(), "A_I1".into(), "A_I2".into(), "A_I3".into(), "theta".into()];
                if let Some(c) = custom {
                    head.push(format!("A[{c}]"));
                }
                head.extend(["p_A_I1", "p_A_I2", "p_A_I3", "p_theta"].map(String::from));
                if let Some(c) = custom {
                    head.push(format!("p_A[{c}]"));
                }
                head.push("direction".into());
                let _ = writeln!(s, "{}", head.join("\t"));
                for r in rows {
                    let cells: Vec<&Cell> =
                        [&r.a_i1, &r.a_i2, &r.a_i3, &r.theta].into_iter().chain(r.custom.as_ref()).collect();
                    let mut line = vec![r.variable.clone()];
                    line.extend(cells.iter().map(|c| value_sd(c)));
                    line.extend(cells.iter().map(|c| p_text(c.p_value)));
                    line.push(if r.reversed { "reversed" } else { "+" }.into());
                    let _ = writeln!(s, "{}", line.join("\t"));
                }
            }
            ReportBody::Combine { variables, scores, .. } => {
                let names: Vec<&str> = scores.iter().map(|c| c.method.as_str()).collect();
                let _ = writeln!(s, "variable\t{}", names.join("\t"));
                for (j, v) in variables.iter().enumerate() {
                    let coefs: Vec<String> = scores.iter().map(|c| format!("{:.3}", c.coefficients[j])).collect();
                    let _ = writeln!(s, "{v}\t{}", coefs.join("\t"));
                }
                let _ = writeln!(s);
                let _ = writeln!(s, "method\tA_I3\ttheta\tp_A_I3\tp_theta\titerations\tconverged\tanchor");
                for c in scores {
                    let _ = writeln!(
                        s,
                        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                        c.method,
                        value_sd(&c.a_i3),
                        value_sd(&c.theta),
                        p_text(c.a_i3.p_value),
                        p_text(c.theta.p_value),
                        c.iterations,
                        c.converged,
                        c.anchor.as_deref().unwrap_or("-"),
                    );
                }
            }
            ReportBody::Simulate { rows } => {
                let _ = writeln!(
                    s,
                    "cell\tsource\tmeasure\treplicates\tfailures\tmean\temp_sd\tboot_sd\tq25\tq50\tq75\treject_rate\tmean_p"
                );
                for r in rows {
                    let _ = writeln!(
                        s,
                        "{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{}\t{:.4}\t{:.4}\t{:.4}\t{}\t{}",
                        r.cell,
                        r.source,
                        r.measure,
                        r.replicates,
                        r.failures,
                        r.mean,
                        r.emp_sd,
                        opt4(r.boot_sd),
                        r.q25,
                        r.q50,
                        r.q75,
                        opt4(r.reject_rate),
                        opt4(r.mean_p),
                    );
                }
            }
        }
        s
    }

    fn render_records(&self, unix_time: u64) -> String {
        let mut lines: Vec<Value> = vec![
            json!({"record": "config", "version": env!("CARGO_PKG_VERSION"), "config": self.config}),
            json!({"record": "generated", "unix": unix_time}),
        ];
        for n in self.notices() {
            lines.push(json!({"record": "notice", "text": n}));
        }
        match &self.body {
            ReportBody::Evaluate { rows, .. } => lines.extend(rows.iter().map(|r| tagged("variable", r))),
            ReportBody::Combine { variables, scores, .. } => {
                for (j, v) in variables.iter().enumerate() {
                    let mut rec = json!({"record": "coefficient", "variable": v});
                    for c in scores {
                        rec[c.method.as_str()] = json!(c.coefficients[j]);
                    }
                    lines.push(rec);
                }
                lines.extend(scores.iter().map(|c| tagged("combination", c)));
            }
            ReportBody::Simulate { rows } => lines.extend(rows.iter().map(|r| tagged("cell", r))),
        }
        let mut s = String::new();
        for l in lines {
            let _ = writeln!(s, "{l}");
        }
        s
    }
}

fn tagged<T: Serialize>(kind: &str, v: &T) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("record".into(), json!(kind));
    if let Value::Object(m) = serde_json::to_value(v).expect("row serializes") {
        obj.extend(m);
    }
    Value::Object(obj)
}

fn value_sd(c: &Cell) -> String {
    match c.sd {
        Some(sd) => format!("{:.3}({:.3})", c.value, sd),
        None => format!("{:.3}", c.value),
    }
}

fn p_text(p: Option<f64>) -> String {
    p.map_or_else(|| "NA".into(), |p| format!("{p:.3e}"))
}

fn opt4(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |v| format!("{v:.4}"))
}

/// Recovers the configuration from a rendered report in either format.
pub fn config_from_header(text: &str, path: &Path) -> Result<RunConfig> {
    let parse_err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line: line as u64, msg };
    for (i, line) in text.lines().enumerate().take(4) {
        if let Some(js) = line.strip_prefix(CONFIG_PREFIX) {
            return serde_json::from_str(js).map_err(|e| parse_err(i + 1, e.to_string()));
        }
        if let Ok(v) = serde_json::from_str::<Value>(line) {
            if v["record"] == "config" {
                return serde_json::from_value(v["config"].clone()).map_err(|e| parse_err(i + 1, e.to_string()));
            }
        }
    }
    Err(parse_err(1, "no configuration header found".into()))
}

/// Drops the timestamp line so two reports can be compared.
pub fn strip_timestamp(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.starts_with(TIME_PREFIX) && !l.starts_with("{\"record\":\"generated\""))
        .map(|l| format!("{l}\n"))
        .collect()
}
