use std::fmt::Write as _;
use std::io::Write;

use pullin_dyn::analysis::{self, Regime};
use pullin_dyn::model::ModelParams;
use pullin_dyn::quadrature;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use super::{emit_text, Context};
use crate::args::{SweepArgs, TableFormat};
use crate::error::CliError;
use crate::format::Precision;

/// A grid axis: a single value or `start:end:steps` (inclusive).
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Axis {
    pub fn parse(name: &str, text: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Usage(format!("--{name} `{text}`: {why}"));
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let parts: Vec<&str> = text.split(':').collect();
        let axis = match parts[..] {
            [v] => {
                let v = num(v)?;
                Axis { start: v, end: v, steps: 1 }
            }
            [a, b, n] => {
                let steps = n.trim().parse::<usize>().map_err(|_| bad("steps must be a positive integer"))?;
                let axis = Axis { start: num(a)?, end: num(b)?, steps };
                if steps < 2 {
                    return Err(bad("a range needs at least 2 steps"));
                }
                if !(axis.start < axis.end) {
                    return Err(bad("range start must be below its end"));
                }
                axis
            }
            _ => return Err(bad("expected a value or start:end:steps")),
        };
        if !(axis.start.is_finite() && axis.end.is_finite()) {
            return Err(bad("values must be finite"));
        }
        Ok(axis)
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.end } else { self.start + (self.end - self.start) * i as f64 / n })
            .collect()
    }

    pub fn describe(&self) -> String {
        if self.steps == 1 {
            format!("{:?}", self.start)
        } else {
            format!("{:?}:{:?}:{}", self.start, self.end, self.steps)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    XS,
    TP,
    TC,
    Regime,
    VDpi,
    XDpi,
}

impl Column {
    const ALL: [Column; 6] = [Column::XS, Column::TP, Column::TC, Column::Regime, Column::VDpi, Column::XDpi];

    fn name(self) -> &'static str {
        match self {
            Column::XS => "x_s",
            Column::TP => "t_p",
            Column::TC => "t_c",
            Column::Regime => "regime",
            Column::VDpi => "v_dpi",
            Column::XDpi => "x_dpi",
        }
    }

    pub fn parse_list(text: &str) -> Result<Vec<Column>, CliError> {
        let mut cols = Vec::new();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let col = Column::ALL
                .into_iter()
                .find(|c| c.name() == part)
                .ok_or_else(|| CliError::Usage(format!("unknown column `{part}`")))?;
            if !cols.contains(&col) {
                cols.push(col);
            }
        }
        if cols.is_empty() {
            return Err(CliError::Usage("at least one column is required".into()));
        }
        Ok(cols)
    }
}

#[derive(Debug, Clone, Default)]
struct Row {
    xi: f64,
    kappa: f64,
    v: f64,
    x_s: Option<f64>,
    t_p: Option<f64>,
    t_c: Option<f64>,
    regime: Option<&'static str>,
    v_dpi: Option<f64>,
    x_dpi: Option<f64>,
    error: Option<String>,
}

fn compute(xi: f64, kappa: f64, v: f64, cols: &[Column]) -> Row {
    let mut row = Row { xi, kappa, v, ..Default::default() };
    let m = ModelParams::cubic(xi, v, kappa);
    let class = match m.validate().and_then(|_| analysis::classify_regime(&m)) {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.regime = Some(class.regime.name());
    row.v_dpi = Some(class.threshold.v_dpi);
    row.x_dpi = Some(class.threshold.x_dpi);
    let result = match class.regime {
        Regime::Periodic { x_s } => {
            row.x_s = Some(x_s);
            if cols.contains(&Column::TP) {
                quadrature::period_by_quadrature(&m).map(|t| row.t_p = Some(t.t_p))
            } else {
                Ok(())
            }
        }
        Regime::TouchDown { .. } if cols.contains(&Column::TC) => {
            quadrature::contact_time_by_quadrature(&m).map(|t| row.t_c = Some(t))
        }
        _ => Ok(()),
    };
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(p: Precision, v: Option<f64>) -> String {
    v.map(|v| p.fmt(v)).unwrap_or_default()
}

pub fn sweep(args: &SweepArgs, ctx: &Context<'_>, out: &mut dyn Write) -> Result<Option<String>, CliError> {
    let p = ctx.table_precision()?;
    let xi = Axis::parse("xi", &args.xi)?;
    let kappa = Axis::parse("kappa", &args.kappa)?;
    let v = match (&args.v, args.v_min, args.v_max, args.v_steps) {
        (Some(text), ..) => Axis::parse("v", text)?,
        (None, Some(start), Some(end), Some(steps)) => Axis::parse("v", &format!("{start:?}:{end:?}:{steps}"))?,
        _ => return Err(CliError::Usage("give --v, or all of --v-min, --v-max and --v-steps".into())),
    };
    let cols = Column::parse_list(&args.columns)?;

    let grid: Vec<(f64, f64, f64)> = xi
        .values()
        .into_iter()
        .flat_map(|x| {
            let vs = v.values();
            kappa.values().into_iter().flat_map(move |k| vs.clone().into_iter().map(move |vv| (x, k, vv)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", args.jobs)))?;
    let rows: Vec<Row> = pool.install(|| grid.par_iter().map(|&(x, k, vv)| compute(x, k, vv, &cols)).collect());

    let precision_text = match p {
        Precision::Full => "full".to_string(),
        Precision::Digits(d) => d.to_string(),
    };
    let col_names: Vec<&str> = cols.iter().map(|c| c.name()).collect();
    let text = match args.format {
        TableFormat::Csv => {
            let mut csv = String::new();
            let _ = writeln!(
                csv,
                "# sweep xi={} kappa={} v={} columns={} precision={}",
                xi.describe(),
                kappa.describe(),
                v.describe(),
                col_names.join(","),
                precision_text
            );
            let _ = writeln!(csv, "xi,kappa,v,{},error", col_names.join(","));
            for r in &rows {
                let _ = write!(csv, "{},{},{}", p.fmt(r.xi), p.fmt(r.kappa), p.fmt(r.v));
                for c in &cols {
                    let cell = match c {
                        Column::XS => opt(p, r.x_s),
                        Column::TP => opt(p, r.t_p),
                        Column::TC => opt(p, r.t_c),
                        Column::Regime => r.regime.unwrap_or_default().to_string(),
                        Column::VDpi => opt(p, r.v_dpi),
                        Column::XDpi => opt(p, r.x_dpi),
                    };
                    let _ = write!(csv, ",{cell}");
                }
                let _ = writeln!(csv, ",{}", csv_quote(r.error.as_deref().unwrap_or("")));
            }
            csv
        }
        TableFormat::Json => {
            let spec = json!({
                "xi": xi.describe(),
                "kappa": kappa.describe(),
                "v": v.describe(),
                "columns": col_names,
                "precision": precision_text,
            });
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut obj = Map::new();
                    obj.insert("xi".into(), p.json(r.xi));
                    obj.insert("kappa".into(), p.json(r.kappa));
                    obj.insert("v".into(), p.json(r.v));
                    for c in &cols {
                        let val = match c {
                            Column::XS => p.json_opt(r.x_s),
                            Column::TP => p.json_opt(r.t_p),
                            Column::TC => p.json_opt(r.t_c),
                            Column::Regime => r.regime.map_or(Value::Null, |s| Value::String(s.into())),
                            Column::VDpi => p.json_opt(r.v_dpi),
                            Column::XDpi => p.json_opt(r.x_dpi),
                        };
                        obj.insert(c.name().into(), val);
                    }
                    obj.insert("error".into(), r.error.clone().map_or(Value::Null, Value::String));
                    Value::Object(obj)
                })
                .collect();
            format!("{}\n", json!({ "spec": spec, "rows": rows }))
        }
    };
    emit_text(out, args.output.as_deref(), &text)
}
