//! CSV persistence of closed-loop and identification traces.
//!
//! Trajectory files have one row per time index `t = 0..=M`:
//!
//! ```text
//! t,x,y,psi,v,omega,R,M,alpha_v_hat,beta_v_hat,alpha_w_hat,beta_w_hat,eps_v,eps_w,cost,iters,converged
//! ```
//!
//! `t` is in seconds. The estimate columns hold the model used at that row;
//! `eps_*` is the one-step prediction error of the transition that ended at
//! that row (empty on the first row). Input and solver columns are empty on
//! the last row. Numbers are written in shortest round-trip form so that a
//! re-read trace reproduces the logged values exactly.

use std::collections::HashMap;
use std::path::Path;

use crate::controller::TrajectoryLog;
use crate::error::{Error, Result};
use crate::estimator::EstimatorState;
use crate::model::{from_proxy, Input, ProxyParams, State};

pub const TRAJECTORY_COLUMNS: [&str; 17] = [
    "t",
    "x",
    "y",
    "psi",
    "v",
    "omega",
    "R",
    "M",
    "alpha_v_hat",
    "beta_v_hat",
    "alpha_w_hat",
    "beta_w_hat",
    "eps_v",
    "eps_w",
    "cost",
    "iters",
    "converged",
];

pub const ESTIMATOR_COLUMNS: [&str; 11] = [
    "t",
    "alpha_v_hat",
    "beta_v_hat",
    "alpha_w_hat",
    "beta_w_hat",
    "eps_v",
    "eps_w",
    "mass_hat",
    "drag_linear_hat",
    "inertia_hat",
    "drag_angular_hat",
];

/// Columns a trace must carry to be replayed through the estimator.
pub const REQUIRED_TRACE_COLUMNS: [&str; 8] = ["t", "x", "y", "psi", "v", "omega", "R", "M"];

/// One parsed row of a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub state: State,
    pub input: Option<Input>,
    pub estimate: Option<ProxyParams>,
    pub eps: Option<[f64; 2]>,
    pub cost: Option<f64>,
    pub iters: Option<usize>,
    pub converged: Option<bool>,
}

/// One row of an estimator trace.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub t: f64,
    pub estimate: ProxyParams,
    pub eps: Option<[f64; 2]>,
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Converts a log into rows, in file order.
pub fn log_rows(log: &TrajectoryLog) -> Vec<TraceRow> {
    log.states
        .iter()
        .enumerate()
        .map(|(t, state)| {
            let solve = log.solves.get(t);
            TraceRow {
                t: t as f64 * log.dt,
                state: *state,
                input: log.inputs.get(t).copied(),
                estimate: log.estimates.get(t).copied(),
                eps: t
                    .checked_sub(1)
                    .and_then(|i| log.prediction_errors.get(i))
                    .copied(),
                cost: solve.map(|s| s.cost),
                iters: solve.map(|s| s.iterations),
                converged: solve.map(|s| s.converged),
            }
        })
        .collect()
}

pub fn write_trajectory_csv(path: &Path, log: &TrajectoryLog) -> Result<()> {
    write_trajectory_rows(path, &log_rows(log))
}

pub fn write_trajectory_rows(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(TRAJECTORY_COLUMNS)
        .map_err(|e| Error::csv(path, e))?;
    for r in rows {
        let s = r.state;
        let th = r.estimate.map(|e| e.to_array());
        let record = [
            num(r.t),
            num(s.x),
            num(s.y),
            num(s.psi),
            num(s.v),
            num(s.omega),
            opt(r.input.map(|u| u.thrust)),
            opt(r.input.map(|u| u.moment)),
            opt(th.map(|a| a[0])),
            opt(th.map(|a| a[1])),
            opt(th.map(|a| a[2])),
            opt(th.map(|a| a[3])),
            opt(r.eps.map(|e| e[0])),
            opt(r.eps.map(|e| e[1])),
            opt(r.cost),
            opt(r.iters),
            opt(r.converged),
        ];
        w.write_record(&record).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes the estimate history with physical parameters recovered where the
/// estimate is invertible.
pub fn write_estimator_csv(path: &Path, rows: &[EstimateRow], dt: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(ESTIMATOR_COLUMNS)
        .map_err(|e| Error::csv(path, e))?;
    for r in rows {
        let th = r.estimate.to_array();
        let phys = from_proxy(&r.estimate, dt).ok();
        let record = [
            num(r.t),
            num(th[0]),
            num(th[1]),
            num(th[2]),
            num(th[3]),
            opt(r.eps.map(|e| e[0])),
            opt(r.eps.map(|e| e[1])),
            opt(phys.map(|p| p.mass)),
            opt(phys.map(|p| p.drag_linear)),
            opt(phys.map(|p| p.inertia)),
            opt(phys.map(|p| p.drag_angular)),
        ];
        w.write_record(&record).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn estimate_rows(log: &TrajectoryLog) -> Vec<EstimateRow> {
    log_rows(log)
        .into_iter()
        .filter_map(|r| {
            Some(EstimateRow {
                t: r.t,
                estimate: r.estimate?,
                eps: r.eps,
            })
        })
        .collect()
}

struct Columns {
    path: String,
    index: HashMap<String, usize>,
}

impl Columns {
    fn field<'r>(&self, rec: &'r csv::StringRecord, name: &str) -> Option<&'r str> {
        let i = *self.index.get(name)?;
        rec.get(i).map(str::trim).filter(|s| !s.is_empty())
    }

    fn schema(&self, row: usize, column: &str, reason: impl Into<String>) -> Error {
        Error::Schema {
            path: self.path.clone(),
            row,
            column: column.to_string(),
            reason: reason.into(),
        }
    }

    fn parse<T: std::str::FromStr>(
        &self,
        rec: &csv::StringRecord,
        row: usize,
        name: &str,
    ) -> Result<Option<T>> {
        match self.field(rec, name) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|_| self.schema(row, name, format!("cannot parse `{s}`"))),
        }
    }

    fn required_f64(&self, rec: &csv::StringRecord, row: usize, name: &str) -> Result<f64> {
        let v: f64 = self
            .parse(rec, row, name)?
            .ok_or_else(|| self.schema(row, name, "missing value"))?;
        if !v.is_finite() {
            return Err(self.schema(row, name, "value is not finite"));
        }
        Ok(v)
    }
}

/// Reads a trajectory CSV. Only [`REQUIRED_TRACE_COLUMNS`] are mandatory;
/// the remaining columns are picked up when present. Rows are numbered from
/// 1 (the header is row 0) in errors.
pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    let cols = Columns {
        path: path.display().to_string(),
        index: headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect(),
    };
    for name in REQUIRED_TRACE_COLUMNS {
        if !cols.index.contains_key(name) {
            return Err(cols.schema(0, name, "column missing from header"));
        }
    }

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let state = State::new(
            cols.required_f64(&rec, row, "x")?,
            cols.required_f64(&rec, row, "y")?,
            cols.required_f64(&rec, row, "psi")?,
            cols.required_f64(&rec, row, "v")?,
            cols.required_f64(&rec, row, "omega")?,
        );
        let thrust: Option<f64> = cols.parse(&rec, row, "R")?;
        let moment: Option<f64> = cols.parse(&rec, row, "M")?;
        let input = match (thrust, moment) {
            (Some(r), Some(m)) => Some(Input::new(r, m)),
            (None, None) => None,
            (Some(_), None) => return Err(cols.schema(row, "M", "missing value")),
            (None, Some(_)) => return Err(cols.schema(row, "R", "missing value")),
        };
        let th: [Option<f64>; 4] = [
            cols.parse(&rec, row, "alpha_v_hat")?,
            cols.parse(&rec, row, "beta_v_hat")?,
            cols.parse(&rec, row, "alpha_w_hat")?,
            cols.parse(&rec, row, "beta_w_hat")?,
        ];
        let estimate = match th {
            [Some(a), Some(b), Some(c), Some(d)] => Some(ProxyParams::new(a, b, c, d)),
            _ => None,
        };
        let eps = match (
            cols.parse::<f64>(&rec, row, "eps_v")?,
            cols.parse::<f64>(&rec, row, "eps_w")?,
        ) {
            (Some(a), Some(b)) => Some([a, b]),
            _ => None,
        };
        rows.push(TraceRow {
            t: cols.required_f64(&rec, row, "t")?,
            state,
            input,
            estimate,
            eps,
            cost: cols.parse(&rec, row, "cost")?,
            iters: cols.parse(&rec, row, "iters")?,
            converged: cols.parse(&rec, row, "converged")?,
        });
    }
    Ok(rows)
}

/// Replays the estimator over every recorded transition of a trace.
///
/// Every row except the last must carry an input. Returns one row per time
/// index, starting with the initial estimate.
pub fn replay_estimator(
    rows: &[TraceRow],
    init: &EstimatorState,
    origin: &str,
) -> Result<Vec<EstimateRow>> {
    let mut est = *init;
    let mut out = Vec::with_capacity(rows.len());
    let Some(first) = rows.first() else {
        return Ok(out);
    };
    out.push(EstimateRow {
        t: first.t,
        estimate: est.proxy(),
        eps: None,
    });
    for (i, pair) in rows.windows(2).enumerate() {
        let (cur, next) = (&pair[0], &pair[1]);
        let u = cur.input.ok_or_else(|| Error::Schema {
            path: origin.to_string(),
            row: i + 1,
            column: "R".into(),
            reason: "input required on every row but the last".into(),
        })?;
        let eps = est.prediction_errors(&cur.state, &u, &next.state);
        est = est.update(&cur.state, &u, &next.state)?;
        out.push(EstimateRow {
            t: next.t,
            estimate: est.proxy(),
            eps: Some(eps),
        });
    }
    Ok(out)
}
