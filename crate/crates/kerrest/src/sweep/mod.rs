//! Parameter sweeps over channel grids with CSV emission.
//!
//! A [`SweepSpec`] names the scenario, the three grid axes (noise, delta,
//! nbar with `alpha = sqrt(nbar)` real) and the set of quantities to
//! tabulate. Points are evaluated in parallel; output ordering is
//! lexicographic in the grid axes and re-running a sweep is bit-identical
//! since nothing on the production path draws randomness. Failed points are
//! kept out of the table and recorded in a separate error log so the two
//! jointly cover the grid.

mod presets;

pub use presets::{reproduce, FigureId, Panel};

use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    DephasingKerrParams, LossyKerrParams, StatisticalModel, DEFAULT_EPS_TRUNC,
};
use crate::error::{KerrError, Result};
use crate::estimation::{self, DEFAULT_EPS_EIG};
use crate::measurements::{MeasurementFIM, PhaseCriterion, QuadSettings};
use crate::resources;

/// Which channel family a sweep runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Lossy,
    Dephasing,
}

impl Scenario {
    /// Name of the noise axis for this scenario.
    pub fn noise_label(self) -> &'static str {
        match self {
            Scenario::Lossy => "tau",
            Scenario::Dephasing => "sigma",
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::Lossy => "lossy",
            Scenario::Dephasing => "dephasing",
        })
    }
}

/// A quantity that can be tabulated at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Qfim,
    Uhlmann,
    Quantumness,
    FimHomodyne(PhaseCriterion),
    FimDh,
    FiDirect,
    ScalarBounds,
    Ng,
    Coherence,
}

impl Quantity {
    fn rank(self) -> u8 {
        match self {
            Quantity::Qfim => 0,
            Quantity::Uhlmann => 1,
            Quantity::Quantumness => 2,
            Quantity::FimHomodyne(PhaseCriterion::A) => 3,
            Quantity::FimHomodyne(PhaseCriterion::B) => 4,
            Quantity::FimHomodyne(PhaseCriterion::C) => 5,
            Quantity::FimDh => 6,
            Quantity::FiDirect => 7,
            Quantity::ScalarBounds => 8,
            Quantity::Ng => 9,
            Quantity::Coherence => 10,
        }
    }
}

/// Numerical tolerances of a sweep; defaults follow the module settings.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub epsilon_trunc: f64,
    pub epsilon_eig: f64,
    pub quad: QuadSettings,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            epsilon_trunc: DEFAULT_EPS_TRUNC,
            epsilon_eig: DEFAULT_EPS_EIG,
            quad: QuadSettings::default(),
        }
    }
}

/// Grid and quantity selection for one sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub scenario: Scenario,
    /// Noise axis: `tau` (lossy) or `sigma` (dephasing).
    pub noise: Vec<f64>,
    pub delta: Vec<f64>,
    pub nbar: Vec<f64>,
    pub quantities: Vec<Quantity>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl SweepSpec {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| KerrError::invalid(format!("cannot parse sweep config: {e}")))
    }

    /// Sort and deduplicate the axes, verify every precondition.
    pub fn normalized(mut self) -> Result<Self> {
        if self.quantities.is_empty() {
            return Err(KerrError::invalid("sweep requests no quantities"));
        }
        for (name, axis) in
            [("noise", &mut self.noise), ("delta", &mut self.delta), ("nbar", &mut self.nbar)]
        {
            if axis.is_empty() {
                return Err(KerrError::invalid(format!("{name} axis is empty")));
            }
            if axis.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(KerrError::invalid(format!(
                    "{name} axis must contain finite nonnegative values"
                )));
            }
            axis.sort_by(f64::total_cmp);
            axis.dedup();
        }
        self.quantities.sort_by_key(|q| q.rank());
        self.quantities.dedup();
        Ok(self)
    }

    fn columns(&self) -> Vec<String> {
        let mut cols = Vec::new();
        let has = |q: Quantity| self.quantities.contains(&q);
        for q in &self.quantities {
            match q {
                Quantity::Qfim => cols.extend(["H_11", "H_22", "H_12"].map(String::from)),
                Quantity::Uhlmann => cols.push("U_12".into()),
                Quantity::Quantumness => cols.push("R".into()),
                Quantity::FimHomodyne(c) => {
                    let l = c.label();
                    cols.push(format!("Fh_{l}_11"));
                    cols.push(format!("Fh_{l}_22"));
                    cols.push(format!("Fh_{l}_12"));
                    cols.push(format!("theta_{l}"));
                }
                Quantity::FimDh => {
                    cols.extend(["Fdh_11", "Fdh_22", "Fdh_12"].map(String::from));
                    if has(Quantity::Qfim) {
                        cols.extend(["Rdh_1", "Rdh_2"].map(String::from));
                    }
                }
                Quantity::FiDirect => cols.push("Fdir_11".into()),
                Quantity::ScalarBounds => {
                    cols.push("C_H".into());
                    for c in [PhaseCriterion::A, PhaseCriterion::B, PhaseCriterion::C] {
                        if has(Quantity::FimHomodyne(c)) {
                            cols.push(format!("C_h_{}", c.label()));
                        }
                    }
                    if has(Quantity::FimDh) {
                        cols.push("C_dh".into());
                    }
                }
                Quantity::Ng => cols.push("nG".into()),
                Quantity::Coherence => cols.push("C_l1".into()),
            }
        }
        cols
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub noise: f64,
    pub delta: f64,
    pub nbar: f64,
    pub values: Vec<f64>,
}

/// A grid point that failed, with the error kind.
#[derive(Debug, Clone, Serialize)]
pub struct PointError {
    pub noise: f64,
    pub delta: f64,
    pub nbar: f64,
    pub kind: String,
}

/// Reproducibility metadata carried next to the table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub tool_version: String,
    pub scenario: Scenario,
    pub columns: Vec<String>,
    pub tolerances: Tolerances,
    /// Fock dimension per swept probe energy.
    pub truncation_dims: Vec<DimRecord>,
    /// Largest quadrature refinement depth any point needed.
    pub max_grid_refinements: u32,
    /// Free-form notes, e.g. the axis ranges a preset chose.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimRecord {
    pub nbar: f64,
    pub dim: usize,
}

/// Tabulated sweep output.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub scenario: Scenario,
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub errors: Vec<PointError>,
    pub metadata: SweepMetadata,
}

struct PointOutput {
    values: Vec<f64>,
    dim: usize,
    refinements: u32,
}

fn evaluate_point(spec: &SweepSpec, noise: f64, delta: f64, nbar: f64) -> Result<PointOutput> {
    let tol = &spec.tolerances;
    let alpha = C64::new(nbar.sqrt(), 0.0);
    let model = match spec.scenario {
        Scenario::Lossy => StatisticalModel::lossy(
            LossyKerrParams::new(noise, delta, alpha)?,
            tol.epsilon_trunc,
        )?,
        Scenario::Dephasing => StatisticalModel::dephasing(
            DephasingKerrParams::new(noise, delta, alpha)?,
            tol.epsilon_trunc,
        )?,
    };

    let has = |q: Quantity| spec.quantities.contains(&q);
    let need_h = has(Quantity::Qfim) || has(Quantity::Quantumness) || has(Quantity::ScalarBounds);
    let need_u = has(Quantity::Uhlmann) || has(Quantity::Quantumness);

    let h: Option<Matrix2<f64>> =
        if need_h { Some(estimation::qfim(&model, tol.epsilon_eig)?) } else { None };
    let u: Option<Matrix2<f64>> =
        if need_u { Some(estimation::uhlmann(&model, tol.epsilon_eig)?) } else { None };

    let mut refinements = 0u32;
    let mut homodyne: Vec<(PhaseCriterion, MeasurementFIM)> = Vec::new();
    let mut dh: Option<MeasurementFIM> = None;

    let mut values = Vec::new();
    for q in &spec.quantities {
        match q {
            Quantity::Qfim => {
                let h = h.as_ref().unwrap();
                values.extend([h[(0, 0)], h[(1, 1)], h[(0, 1)]]);
            }
            Quantity::Uhlmann => values.push(u.as_ref().unwrap()[(0, 1)]),
            Quantity::Quantumness => {
                values.push(estimation::quantumness(h.as_ref().unwrap(), u.as_ref().unwrap())?)
            }
            Quantity::FimHomodyne(c) => {
                let m = MeasurementFIM::homodyne_optimized(&model, *c, &tol.quad)?;
                refinements = refinements.max(m.refinements);
                values.extend([m.fim[(0, 0)], m.fim[(1, 1)], m.fim[(0, 1)]]);
                values.push(m.theta_opt.unwrap_or(0.0));
                homodyne.push((*c, m));
            }
            Quantity::FimDh => {
                let m = MeasurementFIM::double_homodyne(&model, &tol.quad)?;
                refinements = refinements.max(m.refinements);
                values.extend([m.fim[(0, 0)], m.fim[(1, 1)], m.fim[(0, 1)]]);
                if let Some(h) = h.as_ref().filter(|_| has(Quantity::Qfim)) {
                    let (r1, r2) = crate::measurements::fim_ratios(&m.fim, h)?;
                    values.extend([r1, r2]);
                }
                dh = Some(m);
            }
            Quantity::FiDirect => {
                values.push(crate::measurements::fi_direct(&model)[(0, 0)]);
            }
            Quantity::ScalarBounds => {
                values.push(estimation::scalar_bound(h.as_ref().unwrap())?);
                for (_, m) in &homodyne {
                    values.push(m.scalar_bound.ok_or_else(|| {
                        KerrError::DegenerateModel("homodyne FIM is singular".into())
                    })?);
                }
                if let Some(m) = &dh {
                    values.push(m.scalar_bound.ok_or_else(|| {
                        KerrError::DegenerateModel("double-homodyne FIM is singular".into())
                    })?);
                }
            }
            Quantity::Ng => values.push(resources::non_gaussianity(model.rho())?),
            Quantity::Coherence => values.push(resources::coherence_l1(model.rho())),
        }
    }

    if values.iter().any(|v| !v.is_finite()) {
        return Err(KerrError::Numerical {
            context: "sweep point produced a non-finite value".into(),
            residual: f64::NAN,
        });
    }
    Ok(PointOutput { values, dim: model.dim(), refinements })
}

/// Evaluate every requested quantity on the full grid, in parallel across
/// points. Fails only if every point fails.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let spec = spec.clone().normalized()?;
    let columns = spec.columns();

    let mut grid = Vec::new();
    for &noise in &spec.noise {
        for &delta in &spec.delta {
            for &nbar in &spec.nbar {
                grid.push((noise, delta, nbar));
            }
        }
    }

    let outcomes: Vec<(f64, f64, f64, Result<PointOutput>)> = grid
        .par_iter()
        .map(|&(noise, delta, nbar)| (noise, delta, nbar, evaluate_point(&spec, noise, delta, nbar)))
        .collect();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut dims: Vec<DimRecord> = Vec::new();
    let mut max_ref = 0;
    for (noise, delta, nbar, out) in outcomes {
        match out {
            Ok(p) => {
                if !dims.iter().any(|d| d.nbar == nbar) {
                    dims.push(DimRecord { nbar, dim: p.dim });
                }
                max_ref = max_ref.max(p.refinements);
                rows.push(SweepRow { noise, delta, nbar, values: p.values });
            }
            Err(e) => errors.push(PointError { noise, delta, nbar, kind: e.to_string() }),
        }
    }
    if rows.is_empty() {
        return Err(errors
            .first()
            .map(|e| KerrError::Numerical {
                context: format!("all {} sweep points failed; first: {}", errors.len(), e.kind),
                residual: f64::NAN,
            })
            .unwrap_or_else(|| KerrError::invalid("sweep grid is empty")));
    }
    dims.sort_by(|a, b| a.nbar.total_cmp(&b.nbar));

    Ok(SweepTable {
        scenario: spec.scenario,
        columns: columns.clone(),
        rows,
        errors,
        metadata: SweepMetadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: spec.scenario,
            columns,
            tolerances: spec.tolerances,
            truncation_dims: dims,
            max_grid_refinements: max_ref,
            notes: Vec::new(),
        },
    })
}

fn sci9(v: f64) -> String {
    format!("{v:.9e}")
}

impl SweepTable {
    /// Keep only the named quantity columns (grid axes always stay).
    pub fn project(&self, keep: &[&str]) -> SweepTable {
        let idx: Vec<usize> = keep
            .iter()
            .filter_map(|name| self.columns.iter().position(|c| c == name))
            .collect();
        let columns: Vec<String> = idx.iter().map(|&i| self.columns[i].clone()).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| SweepRow {
                noise: r.noise,
                delta: r.delta,
                nbar: r.nbar,
                values: idx.iter().map(|&i| r.values[i]).collect(),
            })
            .collect();
        let mut metadata = self.metadata.clone();
        metadata.columns = columns.clone();
        SweepTable { scenario: self.scenario, columns, rows, errors: self.errors.clone(), metadata }
    }

    /// Write the table as UTF-8 CSV: header row, '.' decimal separator,
    /// scientific notation with nine digits after the point.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec![
            "scenario".to_string(),
            self.scenario.noise_label().to_string(),
            "delta".to_string(),
            "nbar".to_string(),
        ];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record = vec![
                self.scenario.to_string(),
                sci9(row.noise),
                sci9(row.delta),
                sci9(row.nbar),
            ];
            record.extend(row.values.iter().map(|&v| sci9(v)));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Write metadata JSON next to the table and, when any point failed, the
    /// error log covering the rest of the grid.
    pub fn write_sidecars(&self, csv_path: &Path) -> Result<()> {
        let meta_path = csv_path.with_extension("meta.json");
        let json = serde_json::to_string_pretty(&self.metadata)
            .map_err(|e| KerrError::Io(e.to_string()))?;
        std::fs::write(meta_path, json)?;
        if !self.errors.is_empty() {
            let log_path = csv_path.with_extension("errors.log");
            let mut f = std::fs::File::create(log_path)?;
            for e in &self.errors {
                writeln!(
                    f,
                    "noise={} delta={} nbar={} kind={}",
                    sci9(e.noise),
                    sci9(e.delta),
                    sci9(e.nbar),
                    e.kind
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_point_spec() -> SweepSpec {
        SweepSpec {
            scenario: Scenario::Lossy,
            noise: vec![0.5],
            delta: vec![0.0],
            nbar: vec![1.0],
            quantities: vec![Quantity::Qfim],
            tolerances: Tolerances::default(),
            output_path: None,
        }
    }

    #[test]
    fn single_point_loss_qfi() {
        let table = run_sweep(&one_point_spec()).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.columns[0], "H_11");
        assert_relative_eq!(table.rows[0].values[0], (-0.5f64).exp(), max_relative = 1e-4);
    }

    #[test]
    fn empty_quantities_rejected() {
        let mut spec = one_point_spec();
        spec.quantities.clear();
        assert!(matches!(run_sweep(&spec), Err(KerrError::InvalidInput(_))));
    }

    #[test]
    fn grid_is_lexicographic() {
        let mut spec = one_point_spec();
        spec.noise = vec![0.5, 0.1, 0.3];
        spec.delta = vec![0.2, 0.0, 0.1];
        spec.nbar = vec![1.0];
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 9);
        let keys: Vec<(f64, f64)> = table.rows.iter().map(|r| (r.noise, r.delta)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
    }

    #[test]
    fn rerun_is_bit_identical() {
        let mut spec = one_point_spec();
        spec.quantities = vec![Quantity::Qfim, Quantity::Uhlmann, Quantity::Quantumness];
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert!(ra.values.iter().zip(&rb.values).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn failed_points_go_to_error_log() {
        // quantumness at sigma = 0 has singular QFIM: the point must land in
        // the error log while the healthy point stays in the table
        let spec = SweepSpec {
            scenario: Scenario::Dephasing,
            noise: vec![0.0, 0.3],
            delta: vec![0.1],
            nbar: vec![1.0],
            quantities: vec![Quantity::Qfim, Quantity::Uhlmann, Quantity::Quantumness],
            tolerances: Tolerances::default(),
            output_path: None,
        };
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len() + table.errors.len(), 2);
        assert_eq!(table.errors.len(), 1);
        assert_eq!(table.errors[0].noise, 0.0);
        assert!(table.errors[0].kind.contains("degenerate"));
    }

    #[test]
    fn csv_emission_format() {
        let dir = std::env::temp_dir().join("kerrest-sweep-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("one.csv");
        let table = run_sweep(&one_point_spec()).unwrap();
        table.write_csv(&path).unwrap();
        table.write_sidecars(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "scenario,tau,delta,nbar,H_11,H_22,H_12");
        let row = lines.next().unwrap();
        assert!(row.starts_with("lossy,5.000000000e-1,0.000000000e0,1.000000000e0,"));
        assert!(dir.join("one.meta.json").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn scalar_bounds_columns_follow_requests() {
        let mut spec = one_point_spec();
        spec.delta = vec![0.1];
        spec.quantities = vec![
            Quantity::Qfim,
            Quantity::FimHomodyne(PhaseCriterion::A),
            Quantity::FimDh,
            Quantity::ScalarBounds,
        ];
        let table = run_sweep(&spec).unwrap();
        for col in ["C_H", "C_h_a", "C_dh", "Rdh_1", "Rdh_2", "theta_a"] {
            assert!(table.columns.iter().any(|c| c == col), "missing column {col}");
        }
        let projected = table.project(&["C_H", "C_dh"]);
        assert_eq!(projected.columns, vec!["C_H", "C_dh"]);
        assert_eq!(projected.rows[0].values.len(), 2);
    }
}
