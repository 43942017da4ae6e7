//! Output formats: the JSON solve report, per-iteration CSV traces and the
//! comparison table.

use std::io::Write;

use serde::{Deserialize, Serialize};
use simroots::driver::{self, IterationTrace, StudyRow};
use simroots::{CoordFlag, MethodSpec};

use crate::problem::to_pairs;

pub const TRACE_HEADER: [&str; 4] = ["iter", "max_residual", "max_step", "max_error"];
pub const COMPARE_HEADER: [&str; 5] = [
    "method",
    "iterations",
    "final_residual",
    "estimated_order",
    "termination",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodDescriptor {
    pub kind: String,
    /// `m` or `d`, for the parametrised families.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parameter: Option<usize>,
}

impl From<MethodSpec> for MethodDescriptor {
    fn from(m: MethodSpec) -> Self {
        Self {
            kind: m.name().to_owned(),
            parameter: m.parameter(),
        }
    }
}

/// How the coordinates fared in the final sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FlagSummary {
    pub updated: usize,
    pub already_converged: usize,
    pub singular_denominator: usize,
    pub collision_perturbed: usize,
}

impl FlagSummary {
    pub fn from_flags(flags: &[CoordFlag]) -> Self {
        let mut s = Self::default();
        for f in flags {
            match f {
                CoordFlag::Updated => s.updated += 1,
                CoordFlag::AlreadyConverged => s.already_converged += 1,
                CoordFlag::SingularDenominator => s.singular_denominator += 1,
                CoordFlag::CollisionPerturbed => s.collision_perturbed += 1,
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub order: f64,
    pub points_used: usize,
    pub reliable: bool,
}

/// One solve, as written by `simroots solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub label: Option<String>,
    pub method: MethodDescriptor,
    pub degree: usize,
    pub termination: String,
    pub iterations: usize,
    pub approximations: Vec<[f64; 2]>,
    pub max_residual: f64,
    /// Present when the problem file carries known roots and enough
    /// iterations fell inside the fitting window.
    pub estimated_order: Option<OrderReport>,
    pub final_max_error: Option<f64>,
    pub flags: FlagSummary,
}

impl SolveReport {
    pub fn from_trace(label: Option<String>, trace: &IterationTrace) -> Self {
        let last = trace.last();
        let estimated_order = last
            .max_error
            .and_then(|_| driver::estimate_order(trace).ok())
            .map(|o| OrderReport {
                order: o.order,
                points_used: o.points_used,
                reliable: o.reliable,
            });
        Self {
            label,
            method: trace.method.into(),
            degree: last.approximations.len(),
            termination: trace.termination.name().to_owned(),
            iterations: trace.iterations(),
            approximations: to_pairs(&last.approximations),
            max_residual: last.max_residual,
            estimated_order,
            final_max_error: last.max_error,
            flags: FlagSummary::from_flags(&trace.last_flags),
        }
    }
}

/// 17 significant digits: enough to reproduce any binary64 exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn optional(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// `iter,max_residual,max_step,max_error`, one row per recorded iteration
/// (row 0 is the starting vector). Absent values are empty fields.
pub fn write_trace_csv<W: Write>(trace: &IterationTrace, out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &trace.per_iteration {
        w.write_record([
            r.iteration.to_string(),
            format_float(r.max_residual),
            optional(r.max_step),
            optional(r.max_error),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row of `simroots compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: String,
    pub iterations: Option<usize>,
    pub final_residual: Option<f64>,
    pub estimated_order: Option<f64>,
    pub order_reliable: bool,
    pub termination: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl From<&StudyRow> for CompareRow {
    fn from(r: &StudyRow) -> Self {
        Self {
            method: r.method.to_string(),
            iterations: r.iterations,
            final_residual: r.final_residual,
            estimated_order: r.estimated_order,
            order_reliable: r.order_reliable,
            termination: r.termination.map(|t| t.name().to_owned()),
            error: r.error.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub label: Option<String>,
    pub degree: usize,
    pub init_error: f64,
    pub seed: u64,
    pub rows: Vec<CompareRow>,
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], out: W) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(COMPARE_HEADER)?;
    for r in rows {
        w.write_record([
            r.method.clone(),
            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
            optional(r.final_residual),
            optional(r.estimated_order),
            r.termination.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
