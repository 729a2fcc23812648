use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scattering_stats::TwoPort;

use super::solve::{two_port_s_with_diagnostics, CompiledNetwork, Realization, TwoPortSolve};

/// `n` realizations with phase-shifter offsets drawn uniform in
/// `[−δ_max, δ_max]` and shifted to zero sum. Realization `i` depends only on
/// `(seed, i)`.
pub fn generate_realizations(net: &Arc<CompiledNetwork>, n: usize, seed: u64) -> Result<Vec<Realization>> {
    let spec = &net.spec;
    if n == 0 {
        return Err(Error::invalid("realizations", "need at least one"));
    }
    let m = spec.shifter_edges.len();
    if m < 2 {
        return Err(Error::invalid(
            "shifter_edges",
            format!("length redistribution needs at least two shifter edges, got {m}"),
        ));
    }
    let dmax = spec.delta_max;
    let min_len = spec
        .shifter_edges
        .iter()
        .map(|id| spec.edges[spec.edge_index(*id).unwrap()].optical_length)
        .fold(f64::INFINITY, f64::min);
    // after projection an offset is bounded by 2δ_max(1 − 1/m)
    let bound = 2.0 * dmax * (1.0 - 1.0 / m as f64);
    if bound >= min_len {
        return Err(Error::invalid(
            "delta_max",
            format!("offsets up to {bound} m could make a {min_len} m shifter edge non-positive"),
        ));
    }
    (0..n as u64)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut d: Vec<f64> = (0..m)
                .map(|_| if dmax > 0.0 { rng.gen_range(-dmax..=dmax) } else { 0.0 })
                .collect();
            let mean = d.iter().sum::<f64>() / m as f64;
            for x in &mut d {
                *x -= mean;
            }
            // put the rounding residue on the largest entry so the sum is 0
            let resid: f64 = d.iter().sum();
            if let Some(j) = (0..m).max_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs())) {
                d[j] -= resid;
            }
            Ok(Realization {
                base: Arc::clone(net),
                id: i,
                length_deltas: d,
            })
        })
        .collect()
}

/// Evenly spaced wavenumbers; a single sample sits at `k_min`.
pub fn sweep_points(window: (f64, f64), samples: usize) -> Result<Vec<f64>> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid("window", format!("empty or invalid window ({lo}, {hi})")));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "need at least one"));
    }
    if samples == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect())
}

pub fn frequency_sweep(r: &Realization, window: (f64, f64), samples: usize) -> Result<Vec<TwoPort<f64>>> {
    Ok(frequency_sweep_with_diagnostics(r, window, samples)?.0)
}

/// As [`frequency_sweep`], also returning the solves that needed a pole
/// retry.
pub fn frequency_sweep_with_diagnostics(
    r: &Realization,
    window: (f64, f64),
    samples: usize,
) -> Result<(Vec<TwoPort<f64>>, Vec<TwoPortSolve>)> {
    let ks = sweep_points(window, samples)?;
    let mut out = Vec::with_capacity(ks.len());
    let mut jittered = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let (mut s, d) = two_port_s_with_diagnostics(r, k)?;
        s.tag.index = i as u64;
        if d.retries > 0 {
            jittered.push(d);
        }
        out.push(s);
    }
    Ok((out, jittered))
}

/// Sweeps every realization in parallel; output is in realization order.
pub fn ensemble_sweep(
    realizations: &[Realization],
    window: (f64, f64),
    samples: usize,
) -> Result<(Vec<TwoPort<f64>>, Vec<TwoPortSolve>)> {
    let parts = realizations
        .par_iter()
        .map(|r| frequency_sweep_with_diagnostics(r, window, samples))
        .collect::<Result<Vec<_>>>()?;
    let mut all = Vec::with_capacity(realizations.len() * samples);
    let mut diag = Vec::new();
    for (s, d) in parts {
        all.extend(s);
        diag.extend(d);
    }
    Ok((all, diag))
}
