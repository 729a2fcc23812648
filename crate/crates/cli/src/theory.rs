use serde::{Deserialize, Serialize};
use wavechaos::io::Table;
use wavechaos::quadrature::Tolerance;
use wavechaos::theory_density::{
    gaussian_baseline, gaussian_sup_distance, joint_normalization, marginal_normalization, matched_sigma,
    DensityGrid,
};
use wavechaos::{Error, Result, TheoryParams64};

use crate::commands::{to_json, Outcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryRun {
    pub gammas: Vec<f64>,
    /// Nodes of the marginal curve on `[−U, U]`.
    pub points: usize,
    /// Side of the joint grid; no joint file when absent.
    pub joint_points: Option<usize>,
}

pub(crate) fn curve_name(gamma: f64) -> String {
    format!("marginal_gamma{gamma}.csv")
}

impl TheoryRun {
    pub fn validate(&self) -> Result<()> {
        if self.gammas.is_empty() {
            return Err(Error::invalid("gammas", "need at least one γ"));
        }
        for &g in &self.gammas {
            TheoryParams64::from_gamma(g)?;
        }
        let mut seen = self.gammas.clone();
        seen.sort_by(f64::total_cmp);
        seen.dedup();
        if seen.len() != self.gammas.len() {
            return Err(Error::invalid("gammas", "duplicate γ values"));
        }
        if self.points < 3 || self.joint_points.is_some_and(|n| n < 3) {
            return Err(Error::invalid("points", "grids need at least 3 nodes"));
        }
        Ok(())
    }

    pub(crate) fn execute(&self) -> Result<Outcome> {
        let mut out = Outcome::default();
        let tol = Tolerance::default();
        let mut summary = Vec::new();
        for &g in &self.gammas {
            let params = TheoryParams64::from_gamma(g)?;
            let sigma = matched_sigma(&params)?;
            let grid = DensityGrid::new(&params, self.points, false)?;
            let mut table = Table::new(&["u", "density", "gaussian"]);
            for (&u, &p) in grid.nodes.iter().zip(&grid.marginal) {
                table.push(vec![u, p, gaussian_baseline(u, sigma)?]);
            }
            out.outputs.add(curve_name(g), table.to_csv()?);
            let marginal_residual = marginal_normalization(&params)? - 1.0;
            let joint_residual = joint_normalization(&params)? - 1.0;
            if marginal_residual.abs() >= 1e-6 || joint_residual.abs() >= 1e-6 {
                out.warnings.push(format!(
                    "γ = {g}: normalization residuals {marginal_residual:e} (marginal), {joint_residual:e} (joint)"
                ));
            }
            if let Some(n) = self.joint_points {
                let jg = DensityGrid::new(&params, n, true)?;
                let mut t = Table::new(&["u1", "u2", "density"]);
                for (i, &a) in jg.nodes.iter().enumerate() {
                    for (j, &b) in jg.nodes.iter().enumerate() {
                        t.push(vec![a, b, jg.joint[i * n + j]]);
                    }
                }
                out.outputs.add(format!("joint_gamma{g}.csv"), t.to_csv()?);
            }
            summary.push(serde_json::json!({
                "gamma": g,
                "alpha": params.alpha,
                "x": params.x,
                "gamma_over_delta": params.gamma_over_delta(),
                "half_width": grid.half_width,
                "normalization_residual": marginal_residual,
                "joint_normalization_residual": joint_residual,
                "matched_sigma": sigma,
                "gaussian_sup_distance": gaussian_sup_distance(&params, 801)?,
                "quadrature_abs_tol": tol.abs,
                "quadrature_rel_tol": tol.rel,
            }));
        }
        out.results = serde_json::json!({ "curves": summary });
        out.outputs.add("theory.json", to_json(&out.results)?);
        Ok(out)
    }
}
