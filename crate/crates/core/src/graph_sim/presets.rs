//! Default layouts for the two measured networks. Only the total optical
//! lengths are known, so individual edge lengths are fixed incommensurate
//! choices.

use super::spec::{CoaxParams, EdgeSpec, NetworkSpec, VertexKind, VertexSpec};

pub const NETWORK_PRESETS: [&str; 2] = ["nine-vertex", "hexagon"];

/// Default per-length loss of the nine-vertex network, nepers per meter.
pub const NINE_VERTEX_LOSS: f64 = 0.1;
/// Default per-length loss of the hexagon network, nepers per meter.
pub const HEXAGON_LOSS: f64 = 0.1;

/// Lengths proportional to `√p` for successive primes, scaled to `total`.
fn incommensurate(count: usize, total: f64) -> Vec<f64> {
    const PRIMES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];
    let raw: Vec<f64> = PRIMES[..count].iter().map(|&p| (p as f64).sqrt()).collect();
    // interleave long and short edges so neighbours differ
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by_key(|&i| (i % 3, i));
    let sum: f64 = raw.iter().sum();
    let mut out: Vec<f64> = order.iter().map(|&i| raw[i] * total / sum).collect();
    // absorb rounding so the declared total holds to the last bit we can get
    let resid = total - out.iter().sum::<f64>();
    out[0] += resid;
    out
}

fn vertex(id: usize, kind: VertexKind, valency: usize) -> VertexSpec {
    VertexSpec { id, kind, valency, ends: None }
}

fn build(name: &str, vertices: Vec<VertexSpec>, links: &[(usize, usize)], db: &[f64], total: f64, eta: f64, shifters: Vec<usize>) -> NetworkSpec {
    let lengths = incommensurate(links.len(), total);
    let edges = links
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| EdgeSpec {
            id: i + 1,
            endpoints: (a, b),
            optical_length: lengths[i],
            lumped_attenuation: db[i],
            per_length_loss: eta,
        })
        .collect();
    NetworkSpec {
        name: name.into(),
        vertices,
        edges,
        port_vertices: (1, 2),
        shifter_edges: shifters,
        total_optical_length: total,
        delta_max: 0.02,
        coax: Some(CoaxParams::RG402),
    }
}

/// Nine joints (1–9) and four circulators (10–13) on 19 edges, total 3.61 m.
/// Ports sit on joints 1 and 2, each with two edges plus the lead, two
/// edges apart through the 4-joint 9.
pub fn nine_vertex() -> NetworkSpec {
    use VertexKind::*;
    let mut vertices = vec![vertex(1, Port, 3), vertex(2, Port, 3)];
    for id in 3..=8 {
        vertices.push(vertex(id, Joint, 3));
    }
    vertices.push(vertex(9, Joint, 4));
    for id in 10..=13 {
        vertices.push(vertex(id, Circulator, 3));
    }
    let links = [
        (1, 9), (1, 12), (2, 4), (2, 9), (3, 10), (3, 11), (3, 12), (4, 6), (4, 11), (5, 6),
        (5, 8), (5, 13), (6, 7), (7, 8), (7, 9), (8, 10), (9, 11), (10, 13), (12, 13),
    ];
    build("nine-vertex", vertices, &links, &[0.0; 19], 3.61, NINE_VERTEX_LOSS, vec![9, 11, 16, 17])
}

/// Six joints (1–6) and four circulators (7–10) on 17 edges, total 6.62 m.
/// Ports sit on the two 6-joints 1 and 2, which share a direct edge carrying
/// 3 dB; fourteen further edges carry 1 dB.
pub fn hexagon() -> NetworkSpec {
    use VertexKind::*;
    let mut vertices = vec![vertex(1, Port, 6), vertex(2, Port, 6)];
    for id in 3..=6 {
        vertices.push(vertex(id, Joint, 3));
    }
    for id in 7..=10 {
        vertices.push(vertex(id, Circulator, 3));
    }
    let links = [
        (1, 2), (1, 3), (1, 4), (1, 7), (1, 8), (2, 5), (2, 6), (2, 9), (2, 10), (3, 7),
        (3, 9), (4, 8), (4, 10), (5, 7), (5, 10), (6, 8), (6, 9),
    ];
    let mut db = [1.0; 17];
    db[0] = 3.0;
    db[9] = 0.0;
    db[16] = 0.0;
    build("hexagon", vertices, &links, &db, 6.62, HEXAGON_LOSS, vec![2, 6, 12, 16])
}

pub fn network_preset(name: &str) -> crate::error::Result<NetworkSpec> {
    match name {
        "nine-vertex" => Ok(nine_vertex()),
        "hexagon" => Ok(hexagon()),
        other => Err(crate::error::Error::invalid(
            "network",
            format!("unknown network preset {other:?}; available: {}", NETWORK_PRESETS.join(", ")),
        )),
    }
}
