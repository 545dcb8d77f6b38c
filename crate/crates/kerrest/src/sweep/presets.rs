//! Canned sweeps reproducing the channel-characterization figure set, one
//! preset per figure with one CSV table per panel.
//!
//! Axis ranges are not normative; each panel documents its chosen ranges in
//! the metadata notes emitted next to the CSV.

use std::path::{Path, PathBuf};

use super::{run_sweep, Quantity, Scenario, SweepSpec, SweepTable, Tolerances};
use crate::error::{KerrError, Result};
use crate::measurements::PhaseCriterion;

/// Identifier of a reproducible figure preset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig01,
    Fig02,
    Fig03,
    Fig04,
    Fig05,
    Fig06,
    Fig07,
    Fig08,
    Fig09,
    Fig10,
    Fig11,
    Fig12,
    Fig13,
    Fig14,
}

impl FigureId {
    pub const ALL: [FigureId; 14] = [
        FigureId::Fig01,
        FigureId::Fig02,
        FigureId::Fig03,
        FigureId::Fig04,
        FigureId::Fig05,
        FigureId::Fig06,
        FigureId::Fig07,
        FigureId::Fig08,
        FigureId::Fig09,
        FigureId::Fig10,
        FigureId::Fig11,
        FigureId::Fig12,
        FigureId::Fig13,
        FigureId::Fig14,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig01 => "fig01",
            FigureId::Fig02 => "fig02",
            FigureId::Fig03 => "fig03",
            FigureId::Fig04 => "fig04",
            FigureId::Fig05 => "fig05",
            FigureId::Fig06 => "fig06",
            FigureId::Fig07 => "fig07",
            FigureId::Fig08 => "fig08",
            FigureId::Fig09 => "fig09",
            FigureId::Fig10 => "fig10",
            FigureId::Fig11 => "fig11",
            FigureId::Fig12 => "fig12",
            FigureId::Fig13 => "fig13",
            FigureId::Fig14 => "fig14",
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = KerrError;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase();
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| KerrError::invalid(format!("unknown figure id '{s}' (fig01..fig14)")))
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One emitted table of a figure preset.
#[derive(Debug, Clone)]
pub struct Panel {
    /// File stem, e.g. `fig03b`.
    pub name: String,
    pub table: SweepTable,
}

impl Panel {
    /// Write `<out_dir>/<name>.csv` plus metadata sidecars.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(out_dir)?;
        let path = out_dir.join(format!("{}.csv", self.name));
        self.table.write_csv(&path)?;
        self.table.write_sidecars(&path)?;
        Ok(path)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}

const N: usize = 41;

fn spec(
    scenario: Scenario,
    noise: Vec<f64>,
    delta: Vec<f64>,
    nbar: Vec<f64>,
    quantities: Vec<Quantity>,
) -> SweepSpec {
    SweepSpec {
        scenario,
        noise,
        delta,
        nbar,
        quantities,
        tolerances: Tolerances::default(),
        output_path: None,
    }
}

struct PanelPlan {
    name: &'static str,
    sweep: usize,
    columns: &'static [&'static str],
    note: &'static str,
}

struct FigurePlan {
    sweeps: Vec<SweepSpec>,
    panels: Vec<PanelPlan>,
}

fn plan(fig: FigureId) -> FigurePlan {
    use PhaseCriterion::{A, B, C};
    use Quantity::*;
    use Scenario::{Dephasing, Lossy};
    match fig {
        FigureId::Fig01 => FigurePlan {
            sweeps: vec![spec(
                Lossy,
                linspace(0.0, 2.0, N),
                linspace(0.0, 2.0, N),
                vec![1.0],
                vec![Qfim],
            )],
            panels: vec![
                PanelPlan {
                    name: "fig01a",
                    sweep: 0,
                    columns: &["H_11"],
                    note: "loss QFI over tau, delta in [0,2]^2 at nbar=1",
                },
                PanelPlan {
                    name: "fig01b",
                    sweep: 0,
                    columns: &["H_22"],
                    note: "nonlinearity QFI over tau, delta in [0,2]^2 at nbar=1",
                },
            ],
        },
        FigureId::Fig02 => FigurePlan {
            sweeps: vec![
                spec(
                    Lossy,
                    vec![0.5],
                    vec![0.0, 0.05, 0.1, 0.2, 0.5],
                    linspace(0.1, 10.0, N),
                    vec![Qfim],
                ),
                spec(
                    Lossy,
                    vec![0.0, 0.25, 0.5, 1.0, 2.0],
                    vec![0.1],
                    geomspace(0.05, 10.0, N),
                    vec![Qfim],
                ),
            ],
            panels: vec![
                PanelPlan {
                    name: "fig02a",
                    sweep: 0,
                    columns: &["H_11"],
                    note: "loss QFI vs nbar in [0.1,10] at tau=0.5 for several delta",
                },
                PanelPlan {
                    name: "fig02b",
                    sweep: 1,
                    columns: &["H_22"],
                    note: "nonlinearity QFI vs nbar (log axis 0.05..10) at delta=0.1 for several tau",
                },
            ],
        },
        FigureId::Fig03 => FigurePlan {
            sweeps: vec![
                spec(Lossy, vec![0.5], linspace(0.0, 2.5, N), linspace(0.1, 5.0, N), vec![Qfim]),
                spec(
                    Lossy,
                    linspace(0.05, 3.0, N),
                    linspace(0.0, 2.0, N),
                    vec![1.0],
                    vec![Qfim, Uhlmann, Quantumness],
                ),
            ],
            panels: vec![
                PanelPlan {
                    name: "fig03a",
                    sweep: 0,
                    columns: &["H_11"],
                    note: "loss QFI over delta in [0,2.5], nbar in [0.1,5] at tau=0.5",
                },
                PanelPlan {
                    name: "fig03b",
                    sweep: 1,
                    columns: &["R"],
                    note: "quantumness over tau in [0.05,3], delta in [0,2] at nbar=1",
                },
            ],
        },
        FigureId::Fig04 => FigurePlan {
            sweeps: vec![spec(
                Lossy,
                vec![0.5],
                vec![0.1],
                geomspace(0.05, 10.0, N),
                vec![Qfim, FimHomodyne(A), FimHomodyne(B), FimHomodyne(C), FiDirect],
            )],
            panels: vec![
                PanelPlan {
                    name: "fig04a",
                    sweep: 0,
                    columns: &["H_11", "Fh_a_11", "Fh_b_11", "Fh_c_11", "Fdir_11"],
                    note: "loss FI of optimized homodyne and direct detection vs nbar in [0.05,10] at (tau,delta)=(0.5,0.1)",
                },
                PanelPlan {
                    name: "fig04b",
                    sweep: 0,
                    columns: &["H_22", "Fh_a_22", "Fh_b_22", "Fh_c_22"],
                    note: "nonlinearity FI of optimized homodyne vs nbar in [0.05,10] at (tau,delta)=(0.5,0.1)",
                },
            ],
        },
        FigureId::Fig05 => FigurePlan {
            sweeps: vec![spec(
                Lossy,
                vec![0.5],
                vec![0.1],
                geomspace(0.05, 5.0, N),
                vec![FimHomodyne(A), FimHomodyne(B), FimHomodyne(C)],
            )],
            panels: vec![PanelPlan {
                name: "fig05",
                sweep: 0,
                columns: &["theta_a", "theta_b", "theta_c"],
                note: "optimized quadrature phases vs nbar in [0.05,5] at (tau,delta)=(0.5,0.1); phases fold into [0,pi)",
            }],
        },
        FigureId::Fig06 => FigurePlan {
            sweeps: vec![
                spec(
                    Lossy,
                    vec![0.5],
                    vec![0.0, 0.1, 0.3, 0.5],
                    geomspace(0.05, 10.0, N),
                    vec![Qfim, FimDh],
                ),
                spec(
                    Lossy,
                    vec![0.1, 0.5, 1.0, 2.0],
                    vec![0.1],
                    geomspace(0.05, 10.0, N),
                    vec![Qfim, FimDh],
                ),
            ],
            panels: vec![
                PanelPlan {
                    name: "fig06a",
                    sweep: 0,
                    columns: &["Fdh_11", "Rdh_1", "H_11"],
                    note: "double-homodyne loss FI and ratio vs nbar at tau=0.5 for several delta",
                },
                PanelPlan {
                    name: "fig06b",
                    sweep: 1,
                    columns: &["Fdh_22", "Rdh_2", "H_22"],
                    note: "double-homodyne nonlinearity FI and ratio vs nbar at delta=0.1 for several tau",
                },
            ],
        },
        FigureId::Fig07 => FigurePlan {
            sweeps: vec![spec(
                Lossy,
                vec![0.5],
                vec![0.1],
                geomspace(0.05, 10.0, N),
                vec![
                    Qfim,
                    FimHomodyne(A),
                    FimHomodyne(B),
                    FimHomodyne(C),
                    FimDh,
                    ScalarBounds,
                ],
            )],
            panels: vec![PanelPlan {
                name: "fig07",
                sweep: 0,
                columns: &["C_H", "C_h_a", "C_h_b", "C_h_c", "C_dh"],
                note: "trace scalar bounds vs nbar in [0.05,10] at (tau,delta)=(0.5,0.1)",
            }],
        },
        FigureId::Fig08 => FigurePlan {
            sweeps: vec![spec(
                Dephasing,
                geomspace(0.02, 3.0, N),
                vec![0.1],
                vec![0.5, 1.0, 2.0, 4.0],
                vec![Qfim],
            )],
            panels: vec![
                PanelPlan {
                    name: "fig08a",
                    sweep: 0,
                    columns: &["H_11"],
                    note: "dephasing QFI vs sigma in [0.02,3] for several nbar; delta irrelevant by covariance",
                },
                PanelPlan {
                    name: "fig08b",
                    sweep: 0,
                    columns: &["H_22"],
                    note: "nonlinearity QFI vs sigma in [0.02,3] for several nbar",
                },
            ],
        },
        FigureId::Fig09 => FigurePlan {
            sweeps: vec![spec(
                Dephasing,
                geomspace(0.02, 3.0, N),
                vec![0.1],
                vec![0.5, 1.0, 2.0, 4.0],
                vec![Qfim, Uhlmann, Quantumness],
            )],
            panels: vec![
                PanelPlan {
                    name: "fig09a",
                    sweep: 0,
                    columns: &["U_12"],
                    note: "Uhlmann curvature vs sigma in [0.02,3] for several nbar",
                },
                PanelPlan {
                    name: "fig09b",
                    sweep: 0,
                    columns: &["R"],
                    note: "quantumness vs sigma in [0.02,3] for several nbar",
                },
            ],
        },
        FigureId::Fig10 => FigurePlan {
            sweeps: vec![spec(
                Dephasing,
                vec![0.1],
                vec![0.1],
                geomspace(0.05, 10.0, N),
                vec![Qfim, FimHomodyne(A), FimHomodyne(B)],
            )],
            panels: vec![
                PanelPlan {
                    name: "fig10a",
                    sweep: 0,
                    columns: &["H_11", "Fh_a_11", "Fh_b_11"],
                    note: "dephasing FI of optimized homodyne vs nbar at (sigma,delta)=(0.1,0.1)",
                },
                PanelPlan {
                    name: "fig10b",
                    sweep: 0,
                    columns: &["H_22", "Fh_a_22", "Fh_b_22"],
                    note: "nonlinearity FI of optimized homodyne vs nbar at (sigma,delta)=(0.1,0.1)",
                },
            ],
        },
        FigureId::Fig11 => FigurePlan {
            sweeps: vec![spec(
                Dephasing,
                vec![0.1],
                vec![0.1],
                geomspace(0.05, 10.0, N),
                vec![FimHomodyne(A), FimHomodyne(B)],
            )],
            panels: vec![PanelPlan {
                name: "fig11",
                sweep: 0,
                columns: &["theta_a", "theta_b"],
                note: "optimized quadrature phases vs nbar at (sigma,delta)=(0.1,0.1)",
            }],
        },
        FigureId::Fig12 => FigurePlan {
            sweeps: vec![
                spec(
                    Dephasing,
                    vec![0.1],
                    vec![0.0, 0.1, 0.3],
                    geomspace(0.05, 10.0, N),
                    vec![Qfim, FimDh],
                ),
                spec(
                    Dephasing,
                    vec![0.05, 0.1, 0.3, 0.5],
                    vec![0.1],
                    geomspace(0.05, 10.0, N),
                    vec![Qfim, FimDh],
                ),
            ],
            panels: vec![
                PanelPlan {
                    name: "fig12a",
                    sweep: 0,
                    columns: &["Fdh_11", "H_11"],
                    note: "double-homodyne dephasing FI vs nbar at sigma=0.1 for several delta",
                },
                PanelPlan {
                    name: "fig12b",
                    sweep: 1,
                    columns: &["Fdh_22", "Rdh_2", "H_22"],
                    note: "double-homodyne nonlinearity FI and ratio vs nbar at delta=0.1 for several sigma",
                },
            ],
        },
        FigureId::Fig13 => FigurePlan {
            sweeps: vec![spec(
                Dephasing,
                vec![0.1],
                vec![0.1],
                geomspace(0.05, 10.0, N),
                vec![Qfim, FimHomodyne(A), FimHomodyne(B), FimDh, ScalarBounds],
            )],
            panels: vec![PanelPlan {
                name: "fig13",
                sweep: 0,
                columns: &["C_H", "C_h_a", "C_h_b", "C_dh"],
                note: "trace scalar bounds vs nbar in [0.05,10] at (sigma,delta)=(0.1,0.1)",
            }],
        },
        FigureId::Fig14 => FigurePlan {
            sweeps: vec![
                spec(Lossy, vec![0.5], linspace(0.0, 3.0, N), linspace(0.1, 4.0, N), vec![Ng]),
                spec(
                    Lossy,
                    vec![0.5],
                    linspace(0.0, 2.0, N),
                    vec![0.5, 1.0, 2.0],
                    vec![Qfim, Ng],
                ),
            ],
            panels: vec![
                PanelPlan {
                    name: "fig14a",
                    sweep: 0,
                    columns: &["nG"],
                    note: "non-Gaussianity over delta in [0,3], nbar in [0.1,4] at tau=0.5",
                },
                PanelPlan {
                    name: "fig14b",
                    sweep: 1,
                    columns: &["nG", "H_11"],
                    note: "loss QFI against non-Gaussianity, delta swept over [0,2] at tau=0.5",
                },
            ],
        },
    }
}

/// Run the preset grids for one figure and return its panels, each carrying
/// the projected table and the notes describing the chosen axis ranges.
pub fn reproduce(fig: FigureId) -> Result<Vec<Panel>> {
    let plan = plan(fig);
    let tables: Vec<SweepTable> =
        plan.sweeps.iter().map(run_sweep).collect::<Result<_>>()?;
    Ok(plan
        .panels
        .into_iter()
        .map(|p| {
            let mut table = tables[p.sweep].project(p.columns);
            table.metadata.notes.push(p.note.to_string());
            Panel { name: p.name.to_string(), table }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_ids_round_trip() {
        for f in FigureId::ALL {
            assert_eq!(f.name().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig15".parse::<FigureId>().is_err());
        assert!("plot3".parse::<FigureId>().is_err());
    }

    #[test]
    fn spacing_helpers() {
        let l = linspace(0.0, 2.0, 5);
        assert_eq!(l, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let g = geomspace(0.1, 10.0, 3);
        assert!((g[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn every_panel_requests_existing_columns() {
        // the projection must never silently drop a requested column
        for fig in FigureId::ALL {
            let plan = plan(fig);
            for panel in &plan.panels {
                let spec = plan.sweeps[panel.sweep].clone().normalized().unwrap();
                let cols = spec.columns();
                for want in panel.columns {
                    assert!(
                        cols.iter().any(|c| c == want),
                        "{}/{}: column {want} not produced by its sweep",
                        fig.name(),
                        panel.name
                    );
                }
            }
        }
    }
}
