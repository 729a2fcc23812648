//! Bond-scattering assembly of the two-port S-matrix.

use std::collections::VecDeque;
use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering_stats::{SampleTag, Source, TwoPort};

use super::spec::{NetworkSpec, VertexKind, VertexSpec};

/// Relative wavenumber offset applied when a solve lands on a pole.
pub const POLE_JITTER: f64 = 1e-9;
const MAX_JITTERS: usize = 4;

/// Neumann matrix `2/v − δ_ij`.
pub fn neumann_matrix(valency: usize) -> Mat<c64> {
    let v = valency as f64;
    Mat::from_fn(valency, valency, |i, j| {
        c64::new(2.0 / v - if i == j { 1.0 } else { 0.0 }, 0.0)
    })
}

/// Cyclic router, column in and row out: end 1 → 2, 2 → 3, 3 → 1.
pub fn circulator_matrix() -> Mat<c64> {
    Mat::from_fn(3, 3, |i, j| {
        if i == (j + 1) % 3 {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    })
}

/// Internal scattering matrix of a joint or circulator.
pub fn vertex_scattering_matrix(v: &VertexSpec) -> Result<Mat<c64>> {
    match v.kind {
        VertexKind::Joint if v.valency >= 1 => Ok(neumann_matrix(v.valency)),
        VertexKind::Joint => Err(Error::invalid("valency", format!("joint {} has no ends", v.id))),
        VertexKind::Circulator if v.valency == 3 => Ok(circulator_matrix()),
        VertexKind::Circulator => Err(Error::invalid(
            "valency",
            format!("circulator {} must have valency 3", v.id),
        )),
        VertexKind::Port => Err(Error::invalid(
            "vertex",
            format!("port vertex {} has no internal scattering matrix", v.id),
        )),
    }
}

#[derive(Debug, Clone)]
struct VertexTable {
    sigma: Mat<c64>,
    /// Outgoing bond for each end; `None` marks the lead.
    out_bond: Vec<Option<usize>>,
    /// Incoming bond for each end; `None` marks the lead.
    in_bond: Vec<Option<usize>>,
}

/// A validated network with precomputed bond bookkeeping.
///
/// Bond `2e` runs along edge `e` from its first endpoint to its second, bond
/// `2e + 1` the other way.
#[derive(Debug, Clone)]
pub struct CompiledNetwork {
    pub spec: Arc<NetworkSpec>,
    vertices: Vec<VertexTable>,
    /// Vertex table index and end slot where each port lead attaches.
    ports: [(usize, usize); 2],
}

impl CompiledNetwork {
    pub fn new(spec: NetworkSpec) -> Result<Self> {
        spec.validate()?;
        let spec = Arc::new(spec);
        let mut vertices = Vec::with_capacity(spec.vertices.len());
        let mut ports = [(usize::MAX, 0); 2];
        for (vi, v) in spec.vertices.iter().enumerate() {
            let order: Vec<usize> = match &v.ends {
                Some(o) => o.iter().map(|id| spec.edge_index(*id).unwrap()).collect(),
                None => spec
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| e.endpoints.0 == v.id || e.endpoints.1 == v.id)
                    .map(|(i, _)| i)
                    .collect(),
            };
            let mut out_bond = Vec::with_capacity(v.valency);
            let mut in_bond = Vec::with_capacity(v.valency);
            for &e in &order {
                let first = spec.edges[e].endpoints.0 == v.id;
                out_bond.push(Some(if first { 2 * e } else { 2 * e + 1 }));
                in_bond.push(Some(if first { 2 * e + 1 } else { 2 * e }));
            }
            let sigma = match v.kind {
                VertexKind::Port => {
                    out_bond.push(None);
                    in_bond.push(None);
                    let which = usize::from(v.id == spec.port_vertices.1);
                    ports[which] = (vi, v.valency - 1);
                    neumann_matrix(v.valency)
                }
                _ => vertex_scattering_matrix(v)?,
            };
            vertices.push(VertexTable {
                sigma,
                out_bond,
                in_bond,
            });
        }
        let net = Self {
            spec,
            vertices,
            ports,
        };
        net.check_connected()?;
        Ok(net)
    }

    fn check_connected(&self) -> Result<()> {
        let spec = &self.spec;
        let (a, b) = spec.port_vertices;
        let mut seen = vec![false; spec.vertices.len()];
        let index = |id: usize| spec.vertices.iter().position(|v| v.id == id).unwrap();
        let mut queue = VecDeque::from([index(a)]);
        seen[index(a)] = true;
        while let Some(vi) = queue.pop_front() {
            let id = spec.vertices[vi].id;
            for e in &spec.edges {
                let next = if e.endpoints.0 == id {
                    e.endpoints.1
                } else if e.endpoints.1 == id {
                    e.endpoints.0
                } else {
                    continue;
                };
                let ni = index(next);
                if !seen[ni] {
                    seen[ni] = true;
                    queue.push_back(ni);
                }
            }
        }
        if !seen[index(b)] {
            return Err(Error::Topology(format!("port vertices {a} and {b} are not connected")));
        }
        Ok(())
    }

    pub fn bond_count(&self) -> usize {
        2 * self.spec.edges.len()
    }

    /// Edge propagation factors `e^{(ik − η)L}·10^(−dB/20)` for the given
    /// lengths.
    fn propagators(&self, lengths: &[f64], k: f64) -> Vec<c64> {
        self.spec
            .edges
            .iter()
            .zip(lengths)
            .map(|(e, &l)| {
                let amp = (-e.per_length_loss * l).exp() * 10f64.powf(-e.lumped_attenuation / 20.0);
                c64::from_polar(amp, k * l)
            })
            .collect()
    }

    fn solve_at(&self, lengths: &[f64], k: f64) -> Option<[[c64; 2]; 2]> {
        let nb = self.bond_count();
        let t = self.propagators(lengths, k);
        // (I − U) o = injection, U[out, in] = σ[out_end, in_end]·t(in)
        let mut a = Mat::<c64>::identity(nb, nb);
        let mut rhs = Mat::<c64>::zeros(nb, 2);
        for (vi, v) in self.vertices.iter().enumerate() {
            for (oe, ob) in v.out_bond.iter().enumerate() {
                let Some(ob) = *ob else { continue };
                for (ie, ib) in v.in_bond.iter().enumerate() {
                    let s = v.sigma[(oe, ie)];
                    if s == c64::new(0.0, 0.0) {
                        continue;
                    }
                    match ib {
                        Some(ib) => a[(ob, *ib)] -= s * t[ib / 2],
                        None => {
                            let p = if self.ports[0].0 == vi { 0 } else { 1 };
                            rhs[(ob, p)] += s;
                        }
                    }
                }
            }
        }
        let o = a.partial_piv_lu().solve(&rhs);
        // residual guards against a singular system at a lossless pole
        let scale = 1.0 + (0..nb).map(|i| o[(i, 0)].norm() + o[(i, 1)].norm()).fold(0.0, f64::max);
        let r = &a * &o - &rhs;
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            for i in 0..nb {
                let x = r[(i, j)].norm();
                if !x.is_finite() {
                    return None;
                }
                worst = worst.max(x);
            }
        }
        if worst > 1e-9 * scale || scale > 1e12 {
            return None;
        }
        let mut s = [[c64::new(0.0, 0.0); 2]; 2];
        for (p_out, &(vi, lead)) in self.ports.iter().enumerate() {
            let v = &self.vertices[vi];
            for p_in in 0..2 {
                let mut acc = if self.ports[p_in].0 == vi { v.sigma[(lead, lead)] } else { c64::new(0.0, 0.0) };
                for (ie, ib) in v.in_bond.iter().enumerate() {
                    if let Some(ib) = ib {
                        acc += v.sigma[(lead, ie)] * t[ib / 2] * o[(*ib, p_in)];
                    }
                }
                s[p_out][p_in] = acc;
            }
        }
        Some(s)
    }

    /// `S` at wavenumber `k` for the given edge lengths, with pole retries.
    pub fn s_matrix(&self, lengths: &[f64], k: f64) -> Result<(TwoPortSolve, [[c64; 2]; 2])> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid("k", format!("must be positive, got {k}")));
        }
        if let Some(c) = &self.spec.coax {
            if k >= c.cutoff_wavenumber() {
                return Err(Error::invalid(
                    "k",
                    format!("{k} 1/m is above the coax cutoff {} 1/m", c.cutoff_wavenumber()),
                ));
            }
        }
        let mut kk = k;
        for retry in 0..=MAX_JITTERS {
            if let Some(s) = self.solve_at(lengths, kk) {
                return Ok((
                    TwoPortSolve {
                        k_requested: k,
                        k_used: kk,
                        retries: retry,
                    },
                    s,
                ));
            }
            kk *= 1.0 + POLE_JITTER;
        }
        Err(Error::Singular(format!("bond system singular near k = {k}")))
    }
}

/// Solve diagnostics: a nonzero retry count means the wavenumber was
/// jittered off a pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPortSolve {
    pub k_requested: f64,
    pub k_used: f64,
    pub retries: usize,
}

/// A network with one set of phase-shifter offsets applied.
#[derive(Debug, Clone)]
pub struct Realization {
    pub base: Arc<CompiledNetwork>,
    pub id: u64,
    /// Offsets for each `shifter_edges` entry, meters; sums to zero.
    pub length_deltas: Vec<f64>,
}

impl Realization {
    pub fn base_of(net: Arc<CompiledNetwork>) -> Self {
        let n = net.spec.shifter_edges.len();
        Self {
            base: net,
            id: 0,
            length_deltas: vec![0.0; n],
        }
    }

    pub fn lengths(&self) -> Vec<f64> {
        let spec = &self.base.spec;
        let mut l: Vec<f64> = spec.edges.iter().map(|e| e.optical_length).collect();
        for (s, d) in spec.shifter_edges.iter().zip(&self.length_deltas) {
            l[spec.edge_index(*s).unwrap()] += d;
        }
        l
    }
}

pub fn two_port_s_with_diagnostics(r: &Realization, k: f64) -> Result<(TwoPort<f64>, TwoPortSolve)> {
    let (diag, s) = r.base.s_matrix(&r.lengths(), k)?;
    Ok((
        TwoPort::new(
            s,
            k,
            SampleTag {
                source: Source::Graph,
                realization: r.id,
                index: 0,
            },
        ),
        diag,
    ))
}

pub fn two_port_s(r: &Realization, k: f64) -> Result<TwoPort<f64>> {
    two_port_s_with_diagnostics(r, k).map(|x| x.0)
}
