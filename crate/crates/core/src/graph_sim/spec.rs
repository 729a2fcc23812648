use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    /// Neumann junction.
    Joint,
    /// Three-port cyclic router 1→2→3→1.
    Circulator,
    /// Junction carrying one measurement lead; the lead counts towards the
    /// valency and couples with the same Neumann rule.
    Port,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: usize,
    pub kind: VertexKind,
    pub valency: usize,
    /// Explicit order of incident edges (by edge id), which fixes circulator
    /// port numbering. Defaults to edge-list order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ends: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: usize,
    pub endpoints: (usize, usize),
    /// Physical length times `√ε`, meters.
    pub optical_length: f64,
    /// Lumped attenuator, dB.
    #[serde(default)]
    pub lumped_attenuation: f64,
    /// Nepers per meter.
    #[serde(default)]
    pub per_length_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoaxParams {
    /// Inner conductor radius, cm.
    pub r1: f64,
    /// Outer conductor radius, cm.
    pub r2: f64,
    pub epsilon: f64,
}

impl CoaxParams {
    /// SMA-RG402 cable with Teflon dielectric.
    pub const RG402: CoaxParams = CoaxParams {
        r1: 0.05,
        r2: 0.15,
        epsilon: 2.06,
    };

    /// TE11 cutoff `c/(π(r1 + r2)√ε)`, GHz.
    pub fn cutoff_ghz(&self) -> f64 {
        SPEED_OF_LIGHT / (std::f64::consts::PI * (self.r1 + self.r2) * 1e-2 * self.epsilon.sqrt()) * 1e-9
    }

    /// Vacuum wavenumber at the cutoff, 1/m. Applies to optical lengths.
    pub fn cutoff_wavenumber(&self) -> f64 {
        ghz_to_wavenumber(self.cutoff_ghz())
    }
}

/// `k = 2πν/c`, the wavenumber conjugate to optical length.
pub fn ghz_to_wavenumber(ghz: f64) -> f64 {
    2.0 * std::f64::consts::PI * ghz * 1e9 / SPEED_OF_LIGHT
}

pub fn wavenumber_to_ghz(k: f64) -> f64 {
    k * SPEED_OF_LIGHT / (2.0 * std::f64::consts::PI) * 1e-9
}

fn default_delta_max() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    #[serde(default)]
    pub name: String,
    #[serde(rename = "vertex")]
    pub vertices: Vec<VertexSpec>,
    #[serde(rename = "edge")]
    pub edges: Vec<EdgeSpec>,
    pub port_vertices: (usize, usize),
    #[serde(default)]
    pub shifter_edges: Vec<usize>,
    pub total_optical_length: f64,
    /// Largest phase-shifter offset before the zero-sum projection, meters.
    #[serde(default = "default_delta_max")]
    pub delta_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coax: Option<CoaxParams>,
}

fn cfg_err(location: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        location: location.into(),
        reason: reason.into(),
    }
}

impl NetworkSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: NetworkSpec = toml::from_str(text).map_err(|e| {
            let location = match e.span() {
                Some(span) => {
                    let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
                    format!("line {line}")
                }
                None => "network config".into(),
            };
            cfg_err(location, e.message().to_string())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| cfg_err("network config", e.to_string()))
    }

    pub fn vertex(&self, id: usize) -> Option<&VertexSpec> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn edge_index(&self, id: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    pub fn sum_of_lengths(&self) -> f64 {
        self.edges.iter().map(|e| e.optical_length).sum()
    }

    pub fn has_circulators(&self) -> bool {
        self.vertices.iter().any(|v| v.kind == VertexKind::Circulator)
    }

    /// The same graph with every circulator replaced by a 3-joint.
    pub fn without_circulators(&self) -> Self {
        let mut s = self.clone();
        for v in &mut s.vertices {
            if v.kind == VertexKind::Circulator {
                v.kind = VertexKind::Joint;
            }
        }
        s.name = format!("{}-reciprocal", self.name);
        s
    }

    /// Sets the per-length loss of every edge.
    pub fn with_uniform_loss(mut self, eta: f64) -> Self {
        for e in &mut self.edges {
            e.per_length_loss = eta;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !ids.insert(v.id) {
                return Err(cfg_err(format!("vertex[{i}].id"), format!("duplicate vertex id {}", v.id)));
            }
            if v.kind == VertexKind::Circulator && v.valency != 3 {
                return Err(cfg_err(
                    format!("vertex[{i}].valency"),
                    format!("circulator {} must have valency 3, got {}", v.id, v.valency),
                ));
            }
        }
        let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut edge_ids = BTreeSet::new();
        for (i, e) in self.edges.iter().enumerate() {
            if !edge_ids.insert(e.id) {
                return Err(cfg_err(format!("edge[{i}].id"), format!("duplicate edge id {}", e.id)));
            }
            let (a, b) = e.endpoints;
            for end in [a, b] {
                if !ids.contains(&end) {
                    return Err(cfg_err(
                        format!("edge[{i}].endpoints"),
                        format!("edge {} references missing vertex {end}", e.id),
                    ));
                }
            }
            if a == b {
                return Err(cfg_err(format!("edge[{i}].endpoints"), format!("edge {} is a self-loop", e.id)));
            }
            if !(e.optical_length > 0.0 && e.optical_length.is_finite()) {
                return Err(cfg_err(
                    format!("edge[{i}].optical_length"),
                    format!("must be positive, got {}", e.optical_length),
                ));
            }
            for (field, val) in [
                ("lumped_attenuation", e.lumped_attenuation),
                ("per_length_loss", e.per_length_loss),
            ] {
                if !(val >= 0.0 && val.is_finite()) {
                    return Err(cfg_err(
                        format!("edge[{i}].{field}"),
                        format!("must be finite and non-negative, got {val}"),
                    ));
                }
            }
            incident.entry(a).or_default().push(e.id);
            incident.entry(b).or_default().push(e.id);
        }
        let (pa, pb) = self.port_vertices;
        if pa == pb {
            return Err(cfg_err("port_vertices", "the two ports must differ"));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            let is_port = v.id == pa || v.id == pb;
            if is_port != (v.kind == VertexKind::Port) {
                return Err(cfg_err(
                    format!("vertex[{i}].kind"),
                    format!("vertex {} must be of kind port exactly when listed in port_vertices", v.id),
                ));
            }
            let edges = incident.get(&v.id).map_or(&[][..], |x| &x[..]);
            let expected = edges.len() + usize::from(is_port);
            if v.valency != expected {
                return Err(cfg_err(
                    format!("vertex[{i}].valency"),
                    format!(
                        "vertex {} declares valency {} but has {} edge ends{}",
                        v.id,
                        v.valency,
                        edges.len(),
                        if is_port { " plus a lead" } else { "" }
                    ),
                ));
            }
            if let Some(order) = &v.ends {
                let mut a = order.clone();
                let mut b = edges.to_vec();
                a.sort_unstable();
                b.sort_unstable();
                if a != b {
                    return Err(cfg_err(
                        format!("vertex[{i}].ends"),
                        format!("must list the incident edges of vertex {} exactly once", v.id),
                    ));
                }
            }
        }
        for p in [pa, pb] {
            if !ids.contains(&p) {
                return Err(cfg_err("port_vertices", format!("missing vertex {p}")));
            }
        }
        let mut seen = BTreeSet::new();
        for (i, s) in self.shifter_edges.iter().enumerate() {
            if !edge_ids.contains(s) || !seen.insert(*s) {
                return Err(cfg_err(
                    format!("shifter_edges[{i}]"),
                    format!("unknown or repeated edge {s}"),
                ));
            }
        }
        let sum = self.sum_of_lengths();
        if ((sum - self.total_optical_length) / self.total_optical_length).abs() > 1e-12 {
            return Err(cfg_err(
                "total_optical_length",
                format!("edges sum to {sum} m, declared {}", self.total_optical_length),
            ));
        }
        if !(self.delta_max >= 0.0 && self.delta_max.is_finite()) {
            return Err(cfg_err("delta_max", "must be finite and non-negative"));
        }
        if let Some(c) = &self.coax {
            if !(c.r1 > 0.0 && c.r2 > c.r1 && c.epsilon >= 1.0) {
                return Err(cfg_err("coax", "need 0 < r1 < r2 and epsilon ≥ 1"));
            }
        }
        Ok(())
    }
}
