//! Quality-factor sweeps over cavity geometries and modes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::CavityScenario;
use crate::cavity::{q_factors, quadrature, wall_loss, CavitySpec, FieldSolution, ModeIndices, QosReport};
use crate::error::{config_err, Error, Result};

pub const QOS_SCHEMA: &str = "emglink.qos.v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QosRow {
    pub spec_index: usize,
    pub spec: CavitySpec<f64>,
    pub report: QosReport<f64>,
    /// Six-wall quadrature of the conductor loss.
    pub p_wall_quadrature: f64,
    /// |closed form − quadrature| / quadrature; zero for lossless walls.
    pub oracle_rel_err: f64,
    /// `Q_total ≤ min(Q_tx, Q_rx)`, re-checked at emission.
    pub bound_ok: bool,
}

/// TE01l of an `a × c × b` box is TE10l of the `c × a × b` box.
fn canonical(mode: ModeIndices, spec: &CavitySpec<f64>) -> Result<(ModeIndices, CavitySpec<f64>)> {
    match (mode.m, mode.n) {
        (1, 0) => Ok((mode, *spec)),
        (0, 1) => Ok((
            ModeIndices { m: 1, n: 0, l: mode.l },
            CavitySpec {
                a: spec.c,
                c: spec.a,
                ..*spec
            },
        )),
        _ => Err(Error::Domain(format!(
            "closed-form Q is available for TE10l and TE01l modes, got {mode}"
        ))),
    }
}

pub fn qos_cell(spec_index: usize, spec: &CavitySpec<f64>, mode: ModeIndices, sc: &CavityScenario) -> Result<QosRow> {
    let (m, s) = canonical(mode, spec)?;
    let sol = FieldSolution::resonant(m, &s, sc.e0)?;
    let mut report = q_factors(&sol, &s, m, sol.omega(&s))?;
    report.mode = mode;
    let closed = wall_loss(&sol, &s, m)?;
    let numeric = quadrature::wall_loss(&sol, &s, m, sc.quadrature_points)?;
    let oracle_rel_err = if numeric > 0.0 {
        (closed - numeric).abs() / numeric
    } else {
        (closed - numeric).abs()
    };
    let bound_ok = report.q_total <= report.q_tx.min(report.q_rx);
    Ok(QosRow {
        spec_index,
        spec: *spec,
        report,
        p_wall_quadrature: numeric,
        oracle_rel_err,
        bound_ok,
    })
}

/// Every (geometry, mode) cell, geometry-major.
pub fn qos_sweep(sc: &CavityScenario) -> Result<Vec<QosRow>> {
    let modes = sc.mode_indices()?;
    if sc.specs.is_empty() || modes.is_empty() {
        return Err(config_err("cavity.specs and cavity.modes must both be non-empty"));
    }
    let cells: Vec<(usize, ModeIndices)> = (0..sc.specs.len())
        .flat_map(|i| modes.iter().map(move |&m| (i, m)))
        .collect();
    cells
        .par_iter()
        .map(|&(i, m)| qos_cell(i, &sc.specs[i], m, sc))
        .collect()
}

pub fn qos_csv(rows: &[QosRow], meta: &str) -> String {
    let mut out = format!(
        "{meta}\nspec_index,{},p_wall_quadrature,oracle_rel_err,bound_ok\n",
        QosReport::<f64>::CSV_HEADER
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{:e},{:e},{}\n",
            r.spec_index,
            r.report.csv_row(&r.spec),
            r.p_wall_quadrature,
            r.oracle_rel_err,
            r.bound_ok
        ));
    }
    out
}
