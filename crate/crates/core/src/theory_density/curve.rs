use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::density::{grid_half_width, joint_density, marginal_density, tail_radius};
use super::params::TheoryParams;

/// Marginal density tabulated on `[0, R]` (mirrored for `u < 0`) with its
/// cumulative distribution, for fast CDF evaluation in goodness-of-fit loops.
#[derive(Debug, Clone)]
pub struct MarginalCurve<T> {
    pub params: TheoryParams<T>,
    step: T,
    nodes: Vec<T>,
    mids: Vec<T>,
    // mass in [0, u_i]
    cumulative: Vec<T>,
}

impl<T: Real> MarginalCurve<T> {
    pub const DEFAULT_CELLS: usize = 2000;

    pub fn new(params: TheoryParams<T>) -> Result<Self> {
        Self::with_cells(params, Self::DEFAULT_CELLS)
    }

    pub fn with_cells(params: TheoryParams<T>, cells: usize) -> Result<Self> {
        if cells < 8 {
            return Err(Error::invalid("cells", "need at least 8 cells"));
        }
        let big_r = tail_radius(&params);
        let step = big_r / T::lit(cells as f64);
        let half = T::lit(0.5);
        let mut nodes = Vec::with_capacity(cells + 1);
        for i in 0..=cells {
            nodes.push(marginal_density(step * T::lit(i as f64), &params)?);
        }
        let mut mids = Vec::with_capacity(cells);
        for i in 0..cells {
            mids.push(marginal_density(step * (T::lit(i as f64) + half), &params)?);
        }
        let six = T::lit(6.0);
        let four = T::lit(4.0);
        let mut cumulative = Vec::with_capacity(cells + 1);
        let mut acc = T::zero();
        cumulative.push(acc);
        for i in 0..cells {
            acc = acc + step * (nodes[i] + four * mids[i] + nodes[i + 1]) / six;
            cumulative.push(acc);
        }
        Ok(Self {
            params,
            step,
            nodes,
            mids,
            cumulative,
        })
    }

    pub fn support_radius(&self) -> T {
        self.step * T::lit((self.nodes.len() - 1) as f64)
    }

    /// `∫ P(u) du − 1` over the tabulated support.
    pub fn normalization_residual(&self) -> T {
        T::lit(2.0) * *self.cumulative.last().unwrap() - T::one()
    }

    fn locate(&self, a: T) -> Option<(usize, T)> {
        let cells = self.mids.len();
        let pos = a / self.step;
        if !(pos < T::lit(cells as f64)) {
            return None;
        }
        let i = pos.floor().to_usize().unwrap_or(0).min(cells - 1);
        Some((i, pos - T::lit(i as f64)))
    }

    /// Quadratic interpolation through node, midpoint, node.
    pub fn density(&self, u: T) -> T {
        match self.locate(u.abs()) {
            None => T::zero(),
            Some((i, t)) => {
                let (p0, pm, p1) = (self.nodes[i], self.mids[i], self.nodes[i + 1]);
                let two = T::lit(2.0);
                let half = T::lit(0.5);
                let l0 = two * (t - half) * (t - T::one());
                let lm = -T::lit(4.0) * t * (t - T::one());
                let l1 = two * t * (t - half);
                (p0 * l0 + pm * lm + p1 * l1).max(T::zero())
            }
        }
    }

    fn half_mass(&self, a: T) -> T {
        match self.locate(a) {
            None => *self.cumulative.last().unwrap(),
            Some((i, t)) => {
                // integrate the quadratic interpolant from the cell start
                let (p0, pm, p1) = (self.nodes[i], self.mids[i], self.nodes[i + 1]);
                let t2 = t * t;
                let t3 = t2 * t;
                let two = T::lit(2.0);
                let three = T::lit(3.0);
                let four = T::lit(4.0);
                let i0 = two * (t3 / three) - T::lit(1.5) * t2 + t;
                let im = -four * (t3 / three - t2 / two);
                let i1 = two * (t3 / three) - t2 / two;
                self.cumulative[i] + self.step * (p0 * i0 + pm * im + p1 * i1)
            }
        }
    }

    /// Cumulative distribution, symmetric about zero and rescaled so the
    /// tabulated mass is exactly one.
    pub fn cdf(&self, u: T) -> T {
        let total = T::lit(2.0) * *self.cumulative.last().unwrap();
        let half = T::lit(0.5);
        let m = self.half_mass(u.abs()) / total;
        if u >= T::zero() {
            half + m
        } else {
            half - m
        }
    }

    /// Inverse CDF by bisection; `q` must lie in `(0, 1)`.
    pub fn quantile(&self, q: T) -> T {
        let mut lo = -self.support_radius();
        let mut hi = self.support_radius();
        for _ in 0..200 {
            let mid = T::lit(0.5) * (lo + hi);
            if self.cdf(mid) < q {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= T::epsilon() * hi.abs().max(T::one()) {
                break;
            }
        }
        T::lit(0.5) * (lo + hi)
    }
}

/// Density tables exported for plotting: the marginal on a symmetric grid and
/// the joint on the tensor grid.
#[derive(Debug, Clone, Serialize)]
pub struct DensityGrid<T> {
    pub half_width: T,
    pub nodes: Vec<T>,
    pub marginal: Vec<T>,
    /// Row-major `joint[i * n + j] = P(nodes[i], nodes[j])`.
    pub joint: Vec<T>,
    /// Riemann sum of the joint on the grid minus one.
    pub joint_grid_residual: T,
}

impl<T: Real> DensityGrid<T> {
    pub fn new(params: &TheoryParams<T>, points: usize, with_joint: bool) -> Result<Self> {
        if points < 3 {
            return Err(Error::invalid("points", "need at least 3 grid points"));
        }
        let u_max = grid_half_width(params);
        let h = T::lit(2.0) * u_max / T::lit((points - 1) as f64);
        let nodes: Vec<T> = (0..points)
            .map(|i| -u_max + h * T::lit(i as f64))
            .collect();
        let marginal = nodes
            .iter()
            .map(|&u| marginal_density(u, params))
            .collect::<Result<Vec<_>>>()?;
        let mut joint = Vec::new();
        let mut residual = T::zero();
        if with_joint {
            joint.reserve(points * points);
            let mut sum = T::zero();
            for &a in &nodes {
                for &b in &nodes {
                    let v = joint_density(a, b, params)?;
                    sum = sum + v;
                    joint.push(v);
                }
            }
            residual = sum * h * h - T::one();
        }
        Ok(Self {
            half_width: u_max,
            nodes,
            marginal,
            joint,
            joint_grid_residual: residual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_matches_direct_marginal() {
        let q = TheoryParams::from_gamma(5.39f64).unwrap();
        let c = MarginalCurve::new(q).unwrap();
        assert!(c.normalization_residual().abs() < 1e-8);
        for u in [0.0, 0.013, 0.5, 1.7, -2.2] {
            let d = marginal_density(u, &q).unwrap();
            assert!((c.density(u) - d).abs() < 1e-7 * d.max(1e-3), "u={u}");
        }
        assert_eq!(c.cdf(0.0), 0.5);
        assert!((c.cdf(1.0) + c.cdf(-1.0) - 1.0).abs() < 1e-15);
        assert!(c.cdf(-100.0) == 0.0 && c.cdf(100.0) == 1.0);
    }

    #[test]
    fn cdf_is_monotone_and_quantile_inverts() {
        let q = TheoryParams::from_gamma(27.18f64).unwrap();
        let c = MarginalCurve::new(q).unwrap();
        let mut prev = 0.0;
        for i in 0..=400 {
            let u = -1.5 + 3.0 * i as f64 / 400.0;
            let f = c.cdf(u);
            assert!(f >= prev);
            prev = f;
        }
        for p in [0.01, 0.3, 0.5, 0.9, 0.999] {
            assert!((c.cdf(c.quantile(p)) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_covers_mass() {
        let q = TheoryParams::from_gamma(5.39f64).unwrap();
        let g = DensityGrid::new(&q, 201, true).unwrap();
        assert_eq!(g.half_width, 40.0 / 5.39);
        assert!(g.joint_grid_residual.abs() < 1e-3, "{}", g.joint_grid_residual);
        let q = TheoryParams::from_gamma(27.18f64).unwrap();
        let g = DensityGrid::new(&q, 11, false).unwrap();
        assert_eq!(g.half_width, 5.0);
        assert!(g.joint.is_empty());
    }
}
