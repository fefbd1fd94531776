//! Linear relaxation of the covering tour model.
//!
//! [`LpModel`] is plain data. [`LpEngine`] keeps a HiGHS instance alive so that
//! cut rows and bound changes are applied incrementally and every re-solve is
//! warm-started from the previous basis. [`solve_lp`] is the cold path.

use std::collections::HashSet;
use std::ffi::{c_void, CString};
use std::fmt::Write as _;

use highs_sys::*;
use thiserror::Error;

use crate::instance::{CoverageModel, Instance};

/// Row and bound feasibility tolerance handed to the simplex.
pub const PRIMAL_TOL: f64 = 1e-9;
/// Reduced-cost tolerance handed to the simplex.
pub const DUAL_TOL: f64 = 1e-7;
/// A value is integral when it lies this close to an integer.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("row references variable {var} but the model has {count}")]
    UnknownVariable { var: usize, count: usize },
    #[error("bounds [{lower}, {upper}] on variable {var} are inverted")]
    InvertedBounds { var: usize, lower: f64, upper: f64 },
    #[error("simplex returned status {0}")]
    Solver(i32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Sparse row `Σ coef·var (relation) rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub coefs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl LpRow {
    pub fn new(mut coefs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> Self {
        coefs.sort_by_key(|&(var, _)| var);
        coefs.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        coefs.retain(|&(_, c)| c != 0.0);
        LpRow { coefs, relation, rhs }
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coefs.iter().map(|&(var, c)| c * values[var]).sum()
    }

    /// Amount by which `values` breaks the row (zero when satisfied).
    pub fn infeasibility(&self, values: &[f64]) -> f64 {
        let a = self.activity(values);
        match self.relation {
            Relation::Le => (a - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - a).max(0.0),
            Relation::Eq => (a - self.rhs).abs(),
        }
    }

    fn bounds(&self) -> (f64, f64) {
        match self.relation {
            Relation::Le => (f64::NEG_INFINITY, self.rhs),
            Relation::Ge => (self.rhs, f64::INFINITY),
            Relation::Eq => (self.rhs, self.rhs),
        }
    }

    fn signature(&self) -> Vec<u64> {
        let rel = match self.relation {
            Relation::Le => 0,
            Relation::Ge => 1,
            Relation::Eq => 2,
        };
        let mut key = Vec::with_capacity(2 * self.coefs.len() + 2);
        key.push(rel);
        key.push(self.rhs.to_bits());
        for &(var, c) in &self.coefs {
            key.push(var as u64);
            key.push(c.to_bits());
        }
        key
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AddRowsStats {
    pub added: usize,
    pub duplicates: usize,
}

#[derive(Clone, Debug)]
pub struct LpModel {
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<LpRow>,
    signatures: HashSet<Vec<u64>>,
    duplicates_skipped: usize,
}

impl LpModel {
    /// A model with the given costs, every variable in `[0, 1]` and no rows.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpModel {
            objective,
            lower: vec![0.0; n],
            upper: vec![1.0; n],
            rows: Vec::new(),
            signatures: HashSet::new(),
            duplicates_skipped: 0,
        }
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn duplicates_skipped(&self) -> usize {
        self.duplicates_skipped
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        if var >= self.var_count() {
            return Err(LpError::UnknownVariable { var, count: self.var_count() });
        }
        if lower > upper {
            return Err(LpError::InvertedBounds { var, lower, upper });
        }
        self.lower[var] = lower;
        self.upper[var] = upper;
        Ok(())
    }

    /// Appends rows, skipping any whose sparse signature is already present.
    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = LpRow>) -> Result<AddRowsStats, LpError> {
        let mut stats = AddRowsStats::default();
        for row in rows {
            if let Some(&(var, _)) = row.coefs.iter().find(|&&(v, _)| v >= self.var_count()) {
                return Err(LpError::UnknownVariable { var, count: self.var_count() });
            }
            if self.signatures.insert(row.signature()) {
                self.rows.push(row);
                stats.added += 1;
            } else {
                stats.duplicates += 1;
            }
        }
        self.duplicates_skipped += stats.duplicates;
        Ok(stats)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Largest row or bound infeasibility of `values`.
    pub fn max_infeasibility(&self, values: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.infeasibility(values));
        let bounds = values
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.lower[j] - v).max(v - self.upper[j]).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// Writes the model in CPLEX LP text layout.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::from("Minimize\n obj:");
        let mut any = false;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                write_term(&mut out, c, j, !any);
                any = true;
            }
        }
        if !any {
            out.push_str(" 0 v0");
        }
        out.push_str("\nSubject To\n");
        for (r, row) in self.rows.iter().enumerate() {
            let _ = write!(out, " r{r}:");
            for (t, &(j, c)) in row.coefs.iter().enumerate() {
                write_term(&mut out, c, j, t == 0);
            }
            if row.coefs.is_empty() {
                out.push_str(" 0 v0");
            }
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            let _ = writeln!(out, " {rel} {}", row.rhs);
        }
        out.push_str("Bounds\n");
        for j in 0..self.var_count() {
            let _ = writeln!(out, " {} <= v{j} <= {}", self.lower[j], self.upper[j]);
        }
        out.push_str("End\n");
        out
    }
}

fn write_term(out: &mut String, c: f64, j: usize, first: bool) {
    if c < 0.0 {
        let _ = write!(out, " - {} v{j}", -c);
    } else if first {
        let _ = write!(out, " {c} v{j}");
    } else {
        let _ = write!(out, " + {c} v{j}");
    }
}

/// Column layout of the covering tour model: `|E|` edge variables, then `|V|`
/// vertex variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VarLayout {
    pub edges: usize,
    pub vertices: usize,
}

impl VarLayout {
    pub fn of(inst: &Instance) -> Self {
        VarLayout {
            edges: inst.edge_count(),
            vertices: inst.n(),
        }
    }

    pub fn x(&self, e: usize) -> usize {
        e
    }

    pub fn y(&self, v: usize) -> usize {
        self.edges + v
    }

    pub fn total(&self) -> usize {
        self.edges + self.vertices
    }

    /// Splits a column vector into `(x, y)`.
    pub fn split<'a>(&self, values: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        values.split_at(self.edges)
    }
}

/// Relaxation without connectivity rows: edge costs, degree equations
/// `Σ_{δ(v)} x − 2y_v = 0`, cover rows `Σ_{i∈C(v)} y_i ≥ 1`, all variables in `[0,1]`.
pub fn build_root_model(inst: &Instance, cov: &CoverageModel) -> LpModel {
    assert_eq!(inst.n(), cov.n(), "coverage model does not match instance");
    let layout = VarLayout::of(inst);
    let mut objective = vec![0.0; layout.total()];
    for e in 0..layout.edges {
        objective[layout.x(e)] = inst.edge_cost(e) as f64;
    }
    let mut model = LpModel::new(objective);
    let n = inst.n();
    let mut incident: Vec<Vec<(usize, f64)>> = (0..n).map(|v| vec![(layout.y(v), -2.0)]).collect();
    for (e, &(i, j)) in inst.edges().iter().enumerate() {
        incident[i].push((layout.x(e), 1.0));
        incident[j].push((layout.x(e), 1.0));
    }
    let degree = incident.into_iter().map(|coefs| LpRow::new(coefs, Relation::Eq, 0.0));
    let cover = (0..n).map(|v| {
        let coefs = cov.cover_of(v).iter().map(|i| (layout.y(i), 1.0)).collect();
        LpRow::new(coefs, Relation::Ge, 1.0)
    });
    let rows: Vec<LpRow> = degree.chain(cover).collect();
    model.add_rows(rows).expect("root rows reference model variables");
    model
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

/// Simplex basis: one status code per column, then per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    pub cols: Vec<i32>,
    pub rows: Vec<i32>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub basis: Option<Basis>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn is_integral(v: f64) -> bool {
    (v - v.round()).abs() <= INTEGRALITY_TOL
}

/// Solves `model` from scratch, optionally seeding the simplex with `warm`.
pub fn solve_lp(model: &LpModel, warm: Option<&Basis>) -> Result<LpSolution, LpError> {
    let mut engine = LpEngine::new(model)?;
    if let Some(basis) = warm {
        engine.set_basis(basis);
    }
    engine.solve()
}

/// Owned HiGHS instance mirroring an [`LpModel`].
pub struct LpEngine {
    handle: *mut c_void,
    model: LpModel,
    solves: usize,
}

// The handle is owned exclusively by this value and HiGHS keeps no thread-local state.
unsafe impl Send for LpEngine {}

impl Drop for LpEngine {
    fn drop(&mut self) {
        unsafe { Highs_destroy(self.handle) }
    }
}

fn to_highs_bound(v: f64) -> f64 {
    if v.is_infinite() {
        v.signum() * 1e30
    } else {
        v
    }
}

impl LpEngine {
    pub fn new(model: &LpModel) -> Result<Self, LpError> {
        let handle = unsafe { Highs_create() };
        assert!(!handle.is_null(), "HiGHS allocation failed");
        let mut engine = LpEngine {
            handle,
            model: LpModel::new(model.objective.clone()),
            solves: 0,
        };
        engine.configure();
        engine.model.lower = model.lower.clone();
        engine.model.upper = model.upper.clone();
        let ncol = model.var_count();
        let zeros: Vec<i32> = vec![0; ncol + 1];
        let status = unsafe {
            Highs_passLp(
                handle,
                ncol as HighsInt,
                0,
                0,
                kHighsMatrixFormatRowwise,
                kHighsObjSenseMinimize,
                0.0,
                model.objective.as_ptr(),
                model.lower.as_ptr(),
                model.upper.as_ptr(),
                std::ptr::null(),
                std::ptr::null(),
                zeros.as_ptr(),
                std::ptr::null(),
                std::ptr::null(),
            )
        };
        if status == kHighsStatusError {
            return Err(LpError::Solver(status));
        }
        engine.add_rows(model.rows.iter().cloned())?;
        Ok(engine)
    }

    fn configure(&mut self) {
        self.set_bool("output_flag", false);
        self.set_int("threads", 1);
        self.set_string("presolve", "off");
        self.set_string("solver", "simplex");
        self.set_double("primal_feasibility_tolerance", PRIMAL_TOL);
        self.set_double("dual_feasibility_tolerance", DUAL_TOL);
    }

    fn set_bool(&mut self, name: &str, value: bool) {
        let key = CString::new(name).unwrap();
        unsafe { Highs_setBoolOptionValue(self.handle, key.as_ptr(), value as HighsInt) };
    }

    fn set_int(&mut self, name: &str, value: i32) {
        let key = CString::new(name).unwrap();
        unsafe { Highs_setIntOptionValue(self.handle, key.as_ptr(), value) };
    }

    fn set_double(&mut self, name: &str, value: f64) {
        let key = CString::new(name).unwrap();
        unsafe { Highs_setDoubleOptionValue(self.handle, key.as_ptr(), value) };
    }

    fn set_string(&mut self, name: &str, value: &str) {
        let key = CString::new(name).unwrap();
        let val = CString::new(value).unwrap();
        unsafe { Highs_setStringOptionValue(self.handle, key.as_ptr(), val.as_ptr()) };
    }

    pub fn model(&self) -> &LpModel {
        &self.model
    }

    pub fn row_count(&self) -> usize {
        self.model.rows.len()
    }

    pub fn solve_count(&self) -> usize {
        self.solves
    }

    /// Adds rows to both the mirror model and the live simplex, skipping duplicates.
    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = LpRow>) -> Result<AddRowsStats, LpError> {
        let before = self.model.rows.len();
        let stats = self.model.add_rows(rows)?;
        let fresh = &self.model.rows[before..];
        if fresh.is_empty() {
            return Ok(stats);
        }
        let mut lower = Vec::with_capacity(fresh.len());
        let mut upper = Vec::with_capacity(fresh.len());
        let mut starts = Vec::with_capacity(fresh.len());
        let mut index = Vec::new();
        let mut value = Vec::new();
        for row in fresh {
            let (lo, hi) = row.bounds();
            lower.push(to_highs_bound(lo));
            upper.push(to_highs_bound(hi));
            starts.push(index.len() as HighsInt);
            for &(var, c) in &row.coefs {
                index.push(var as HighsInt);
                value.push(c);
            }
        }
        let status = unsafe {
            Highs_addRows(
                self.handle,
                fresh.len() as HighsInt,
                lower.as_ptr(),
                upper.as_ptr(),
                index.len() as HighsInt,
                starts.as_ptr(),
                index.as_ptr(),
                value.as_ptr(),
            )
        };
        if status == kHighsStatusError {
            return Err(LpError::Solver(status));
        }
        Ok(stats)
    }

    /// Removes the rows at the given positions; later rows shift down.
    pub fn remove_rows(&mut self, positions: &[usize]) -> Result<(), LpError> {
        if positions.is_empty() {
            return Ok(());
        }
        let mut set: Vec<HighsInt> = positions.iter().map(|&p| p as HighsInt).collect();
        set.sort_unstable();
        set.dedup();
        let status = unsafe { Highs_deleteRowsBySet(self.handle, set.len() as HighsInt, set.as_ptr()) };
        if status == kHighsStatusError {
            return Err(LpError::Solver(status));
        }
        let mut keep = vec![true; self.model.rows.len()];
        for &p in &set {
            keep[p as usize] = false;
        }
        let mut idx = 0;
        let model = &mut self.model;
        model.rows.retain(|row| {
            let k = keep[idx];
            idx += 1;
            if !k {
                model.signatures.remove(&row.signature());
            }
            k
        });
        Ok(())
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        if self.model.lower[var] == lower && self.model.upper[var] == upper {
            return Ok(());
        }
        self.model.set_bounds(var, lower, upper)?;
        let status = unsafe { Highs_changeColBounds(self.handle, var as HighsInt, lower, upper) };
        if status == kHighsStatusError {
            return Err(LpError::Solver(status));
        }
        Ok(())
    }

    pub fn set_basis(&mut self, basis: &Basis) {
        if basis.cols.len() == self.model.var_count() && basis.rows.len() == self.row_count() {
            unsafe { Highs_setBasis(self.handle, basis.cols.as_ptr(), basis.rows.as_ptr()) };
        }
    }

    pub fn basis(&self) -> Basis {
        let mut cols = vec![0; self.model.var_count()];
        let mut rows = vec![0; self.row_count()];
        unsafe { Highs_getBasis(self.handle, cols.as_mut_ptr(), rows.as_mut_ptr()) };
        Basis { cols, rows }
    }

    pub fn solve(&mut self) -> Result<LpSolution, LpError> {
        self.solves += 1;
        match self.run() {
            Ok(sol) => Ok(sol),
            Err(_) => {
                // Retry once from a fresh factorization.
                unsafe { Highs_clearSolver(self.handle) };
                self.run()
            }
        }
    }

    fn run(&mut self) -> Result<LpSolution, LpError> {
        let ncol = self.model.var_count();
        if self.model.rows.is_empty() {
            let values: Vec<f64> = (0..ncol)
                .map(|j| if self.model.objective[j] >= 0.0 { self.model.lower[j] } else { self.model.upper[j] })
                .collect();
            let objective_value = self.model.objective_value(&values);
            return Ok(LpSolution {
                status: LpStatus::Optimal,
                values,
                objective_value,
                basis: None,
            });
        }
        let run_status = unsafe { Highs_run(self.handle) };
        let model_status = unsafe { Highs_getModelStatus(self.handle) };
        if run_status == kHighsStatusError {
            return Err(LpError::Solver(model_status));
        }
        match model_status {
            s if s == kHighsModelStatusOptimal => {
                let mut values = vec![0.0; ncol];
                let mut row_values = vec![0.0; self.row_count()];
                unsafe {
                    Highs_getSolution(
                        self.handle,
                        values.as_mut_ptr(),
                        std::ptr::null_mut(),
                        row_values.as_mut_ptr(),
                        std::ptr::null_mut(),
                    )
                };
                for (j, v) in values.iter_mut().enumerate() {
                    *v = v.clamp(self.model.lower[j], self.model.upper[j]);
                }
                let objective_value = self.model.objective_value(&values);
                Ok(LpSolution {
                    status: LpStatus::Optimal,
                    values,
                    objective_value,
                    basis: Some(self.basis()),
                })
            }
            s if s == kHighsModelStatusInfeasible => Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective_value: f64::INFINITY,
                basis: None,
            }),
            s => Err(LpError::Solver(s)),
        }
    }
}
