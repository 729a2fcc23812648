use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scattering_stats::{SampleTag, Source, TwoPort};

use super::config::{AbsorptionMode, EnsembleConfig};
use super::coupling::{build, kappa_from_transmission, s_block, Couplings};
use super::hamiltonian::fill_hamiltonian;

/// Pilot draws use streams from here on, disjoint from production indices.
const PILOT_STREAM: u64 = 1 << 63;
/// Energy redraws allowed when a resolvent solve fails.
const MAX_REDRAWS: usize = 8;

/// Outcome of the closed-loop coupling calibration, per channel class
/// (antenna a, antenna b, parasitic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub target_t: [f64; 3],
    pub measured_t: [f64; 3],
    pub kappa: [f64; 3],
    pub iterations: usize,
    pub pilot_samples: usize,
    pub converged: bool,
}

/// A configured ensemble ready to draw from. Drawing sample `i` always yields
/// the same matrix, independent of thread count or of other draws.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub config: EnsembleConfig,
    pub couplings: Couplings,
    /// Imaginary energy shift `ε`; zero unless absorption is a uniform shift.
    pub shift: f64,
    pub calibration: Option<Calibration>,
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Ensemble {
    pub fn new(config: EnsembleConfig) -> Result<Self> {
        config.validate()?;
        let scale = config.scale();
        let with_parasitic = config.absorption == AbsorptionMode::Channels;
        let couplings = build(&config.channels, config.n_dim, scale.rho0, with_parasitic)?;
        let shift = match config.absorption {
            AbsorptionMode::Channels => 0.0,
            // γ_int = 2πΓ/Δ with Γ = 2ε and Δ = 1/(Nρ₀)
            AbsorptionMode::UniformShift => {
                config.channels.internal_gamma() / (4.0 * std::f64::consts::PI * scale.rho0 * config.n_dim as f64)
            }
        };
        let mut e = Self {
            config,
            couplings,
            shift,
            calibration: None,
        };
        if config.calibration.enabled {
            e.calibrate()?;
        }
        Ok(e)
    }

    /// Channel indices measured during calibration.
    fn probe_channels(&self) -> Vec<usize> {
        let total = self.couplings.channel_count();
        let probes = self.config.calibration.probe_channels.min(total - 2);
        (0..2 + probes).collect()
    }

    fn draw(&self, rng: &mut ChaCha8Rng, channels: &[usize], h: &mut Mat<c64>) -> Result<(f64, Mat<c64>)> {
        let e_max = self.config.e_max();
        let mut energy = if e_max > 0.0 { rng.gen_range(-e_max..=e_max) } else { 0.0 };
        fill_hamiltonian(h, self.config.beta, rng);
        let mut last = None;
        for _ in 0..MAX_REDRAWS {
            match s_block(h, &self.couplings, energy, self.shift, channels) {
                Ok(s) => return Ok((energy, s)),
                Err(e) => {
                    last = Some(e);
                    if e_max == 0.0 {
                        break;
                    }
                    energy = rng.gen_range(-e_max..=e_max);
                }
            }
        }
        Err(last.unwrap_or_else(|| Error::Singular("no energy draw succeeded".into())))
    }

    /// Sample `index` of the production stream.
    pub fn sample(&self, index: u64) -> Result<TwoPort<f64>> {
        let n = self.config.n_dim;
        let mut h = Mat::<c64>::zeros(n, n);
        let mut rng = stream_rng(self.config.seed, index);
        let (energy, s) = self.draw(&mut rng, &[0, 1], &mut h)?;
        Ok(TwoPort::new(
            [[s[(0, 0)], s[(0, 1)]], [s[(1, 0)], s[(1, 1)]]],
            energy,
            SampleTag {
                source: Source::Rmt,
                realization: index,
                index,
            },
        ))
    }

    /// Samples `range`, in index order.
    pub fn samples_in(&self, range: std::ops::Range<u64>) -> Result<Vec<TwoPort<f64>>> {
        range.into_par_iter().map(|i| self.sample(i)).collect()
    }

    pub fn samples(&self) -> Result<Vec<TwoPort<f64>>> {
        self.samples_in(0..self.config.n_samples as u64)
    }

    /// Mean diagonal `S_cc` per class on the pilot stream.
    fn pilot_means(&self, channels: &[usize]) -> Result<[c64; 3]> {
        let pilots = self.config.calibration.pilot_samples as u64;
        let n = self.config.n_dim;
        let sums = (0..pilots)
            .into_par_iter()
            .map(|i| {
                let mut h = Mat::<c64>::zeros(n, n);
                let mut rng = stream_rng(self.config.seed, PILOT_STREAM + i);
                let (_, s) = self.draw(&mut rng, channels, &mut h)?;
                let mut acc = [c64::new(0.0, 0.0); 3];
                acc[0] = s[(0, 0)];
                acc[1] = s[(1, 1)];
                for k in 2..channels.len() {
                    acc[2] += s[(k, k)];
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut mean = [c64::new(0.0, 0.0); 3];
        for a in &sums {
            for k in 0..3 {
                mean[k] += a[k];
            }
        }
        let probes = (channels.len() - 2).max(1) as f64;
        mean[0] /= pilots as f64;
        mean[1] /= pilots as f64;
        mean[2] /= pilots as f64 * probes;
        Ok(mean)
    }

    fn set_kappa(&mut self, class: usize, kappa: f64) {
        let rho0 = self.couplings.rho0;
        let amp = (kappa / (std::f64::consts::PI.powi(2) * rho0)).sqrt();
        match class {
            0 | 1 => self.couplings.amplitudes[class] = amp,
            _ => {
                for a in self.couplings.amplitudes.iter_mut().skip(2) {
                    *a = amp;
                }
            }
        }
    }

    /// Closed-loop correction of the coupling norms: measure `1 − |⟨S_cc⟩|²`
    /// on a pilot run and bisect `κ` per class until every class is within
    /// tolerance. The pilot reuses the same draws at every step.
    fn calibrate(&mut self) -> Result<()> {
        let cfg = self.config.calibration;
        let ch = self.config.channels;
        let has_parasitic = self.couplings.channel_count() > 2;
        let target = [ch.t_a, ch.t_b, if has_parasitic { ch.t_c } else { f64::NAN }];
        let classes = if has_parasitic { 3 } else { 2 };
        let mut kappa = [
            kappa_from_transmission(ch.t_a)?,
            kappa_from_transmission(ch.t_b)?,
            if has_parasitic { kappa_from_transmission(ch.t_c)? } else { f64::NAN },
        ];
        // bisection brackets in κ; T(κ) increases on (0, 1]
        let mut lo = [0.0; 3];
        let mut hi = [1.0; 3];
        let channels = self.probe_channels();
        let mut measured = [f64::NAN; 3];
        let mut iterations = 0;
        let mut converged = false;
        while iterations <= cfg.max_iterations {
            let mean = self.pilot_means(&channels)?;
            for k in 0..classes {
                measured[k] = 1.0 - mean[k].norm_sqr();
            }
            iterations += 1;
            let off: Vec<usize> = (0..classes)
                .filter(|&k| (measured[k] - target[k]).abs() > cfg.tolerance)
                .collect();
            if off.is_empty() {
                converged = true;
                break;
            }
            if iterations > cfg.max_iterations {
                break;
            }
            for &k in &off {
                if measured[k] < target[k] {
                    lo[k] = kappa[k];
                } else {
                    hi[k] = kappa[k];
                }
                kappa[k] = 0.5 * (lo[k] + hi[k]);
                self.set_kappa(k, kappa[k]);
            }
        }
        self.calibration = Some(Calibration {
            target_t: target,
            measured_t: measured,
            kappa,
            iterations,
            pilot_samples: cfg.pilot_samples,
            converged,
        });
        if !converged {
            return Err(Error::Singular(format!(
                "coupling calibration did not reach tolerance {}: measured T = {:?}, target {:?}",
                cfg.tolerance, measured, target
            )));
        }
        Ok(())
    }
}

/// Builds, calibrates and draws the whole ensemble.
pub fn sample_ensemble(config: &EnsembleConfig) -> Result<Vec<TwoPort<f64>>> {
    Ensemble::new(*config)?.samples()
}
