use std::io::Write;

use crate::error::{Error, Result};
use crate::rational::{norm1_on, parse_rational, support, to_f64, Rational};
use crate::solver::SolverStep;
use crate::walk::{DiameterWalk, WalkTrace};

pub const TRACE_HEADER: [&str; 8] = [
    "run_id",
    "algorithm",
    "iteration",
    "phase",
    "oracle",
    "step_size",
    "potential",
    "set_sizes",
];

/// One augmentation. `potential` depends on the algorithm: `‖x_N‖₁` for
/// walks and feasibility, `⟨c̃,x⟩` for variable fixing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub run_id: String,
    pub algorithm: String,
    pub iteration: usize,
    pub phase: usize,
    pub oracle: String,
    pub step_size: Rational,
    pub potential: Rational,
    /// `key=value` pairs joined by `;`.
    pub set_sizes: String,
}

pub fn walk_rows(
    run_id: &str,
    algorithm: &str,
    trace: &WalkTrace,
    potential: impl Fn(&[Rational]) -> Rational,
) -> Vec<TraceRow> {
    trace
        .steps
        .iter()
        .enumerate()
        .map(|(t, st)| TraceRow {
            run_id: run_id.into(),
            algorithm: algorithm.into(),
            iteration: t + 1,
            phase: st.phase,
            oracle: st.oracle.to_string(),
            step_size: st.alpha.clone(),
            potential: potential(&st.iterate_after),
            set_sizes: format!("supp={}", support(&st.iterate_after).len()),
        })
        .collect()
}

/// Potential `‖x_N‖₁`, sets `L_t`, `T_t`, `R_t` after each step.
pub fn diameter_rows(run_id: &str, walk: &DiameterWalk) -> Vec<TraceRow> {
    let mut rows = walk_rows(run_id, "diameter-walk", &walk.trace, |x| norm1_on(x, &walk.nonbasic));
    for (t, row) in rows.iter_mut().enumerate() {
        if let Some(s) = walk.analysis.get(t + 1) {
            row.set_sizes = format!("L={};T={};R={}", s.l.len(), s.t.len(), s.r.len());
        }
    }
    rows
}

pub fn solver_rows(run_id: &str, algorithm: &str, steps: &[SolverStep]) -> Vec<TraceRow> {
    steps
        .iter()
        .map(|st| TraceRow {
            run_id: run_id.into(),
            algorithm: algorithm.into(),
            iteration: st.iteration,
            phase: st.phase,
            oracle: st.oracle.to_string(),
            step_size: st.alpha.clone(),
            potential: st.potential.clone(),
            set_sizes: format!("L={};rkL={}", st.l_size, st.l_rank),
        })
        .collect()
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Writes the header and rows. `approx` appends decimal columns for
/// reading by eye; the exact columns are unchanged.
pub fn write_trace<W: Write>(out: W, rows: &[TraceRow], approx: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = TRACE_HEADER.to_vec();
    if approx {
        header.extend(["step_size_approx", "potential_approx"]);
    }
    w.write_record(&header).map_err(io_err)?;
    for r in rows {
        let mut rec = vec![
            r.run_id.clone(),
            r.algorithm.clone(),
            r.iteration.to_string(),
            r.phase.to_string(),
            r.oracle.clone(),
            r.step_size.to_string(),
            r.potential.to_string(),
            r.set_sizes.clone(),
        ];
        if approx {
            rec.push(format!("{:.6}", to_f64(&r.step_size)));
            rec.push(format!("{:.6}", to_f64(&r.potential)));
        }
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_trace_string(rows: &[TraceRow], approx: bool) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, rows, approx).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Reads the exact columns back; extra columns are ignored.
pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(io_err)?.clone();
    if header.iter().take(TRACE_HEADER.len()).ne(TRACE_HEADER.iter().copied()) {
        return Err(Error::InvalidInput("unexpected trace header".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let bad = |what: &str| Error::Parse {
            line: i + 2,
            column: 1,
            message: format!("bad {what}"),
        };
        rows.push(TraceRow {
            run_id: field(0).into(),
            algorithm: field(1).into(),
            iteration: field(2).parse().map_err(|_| bad("iteration"))?,
            phase: field(3).parse().map_err(|_| bad("phase"))?,
            oracle: field(4).into(),
            step_size: parse_rational(field(5)).ok_or_else(|| bad("step_size"))?,
            potential: parse_rational(field(6)).ok_or_else(|| bad("potential"))?,
            set_sizes: field(7).into(),
        });
    }
    Ok(rows)
}
