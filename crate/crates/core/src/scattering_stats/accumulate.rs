//! Moment accumulation with a fixed reduction tree, so results do not depend
//! on how the work is split across threads.

use num_complex::Complex64;
use rayon::prelude::*;

use super::matrix::TwoPort;

/// Leaf size of the reduction tree.
const CHUNK: usize = 1024;

/// First and second moments of the four S entries.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SMoments {
    pub count: usize,
    pub sum: [Complex64; 4],
    pub sum_abs2: [f64; 4],
}

impl SMoments {
    pub fn push(&mut self, s: &TwoPort<f64>) {
        let entries = [s.s[0][0], s.s[0][1], s.s[1][0], s.s[1][1]];
        for (k, v) in entries.iter().enumerate() {
            self.sum[k] += v;
            self.sum_abs2[k] += v.norm_sqr();
        }
        self.count += 1;
    }

    pub fn merge(mut self, other: &SMoments) -> SMoments {
        for k in 0..4 {
            self.sum[k] += other.sum[k];
            self.sum_abs2[k] += other.sum_abs2[k];
        }
        self.count += other.count;
        self
    }

    /// Mean of entry `k` in `aa, ab, ba, bb` order.
    pub fn mean(&self, k: usize) -> Complex64 {
        self.sum[k] / self.count as f64
    }

    /// `⟨|S|²⟩ − |⟨S⟩|²` for entry `k`.
    pub fn variance(&self, k: usize) -> f64 {
        let n = self.count as f64;
        (self.sum_abs2[k] / n - self.mean(k).norm_sqr()).max(0.0)
    }
}

/// Moments over all samples. Chunks are reduced pairwise in index order, so
/// serial and parallel evaluation agree bit for bit.
pub fn s_moments(samples: &[TwoPort<f64>]) -> SMoments {
    let leaves: Vec<SMoments> = samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut m = SMoments::default();
            for s in chunk {
                m.push(s);
            }
            m
        })
        .collect();
    tree_reduce(leaves)
}

fn tree_reduce(mut level: Vec<SMoments>) -> SMoments {
    if level.is_empty() {
        return SMoments::default();
    }
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|p| if p.len() == 2 { p[0].merge(&p[1]) } else { p[0] })
            .collect();
    }
    level[0]
}

pub fn mean_complex<I: IntoIterator<Item = Complex64>>(values: I) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        sum
    } else {
        sum / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering_stats::matrix::SampleTag;

    #[test]
    fn reduction_is_independent_of_worker_count() {
        let samples: Vec<TwoPort<f64>> = (0..5000)
            .map(|i| {
                let t = i as f64 * 0.37;
                let z = Complex64::from_polar(0.5, t);
                TwoPort::new([[z, z * 0.3], [z.conj(), -z]], t, SampleTag::default())
            })
            .collect();
        let tree = s_moments(&samples);
        let mut serial = SMoments::default();
        for s in &samples {
            serial.push(s);
        }
        for k in 0..4 {
            // summation order differs from the naive serial loop
            assert!((tree.mean(k) - serial.mean(k)).norm() < 1e-13);
            assert!((tree.variance(k) - serial.variance(k)).abs() < 1e-13);
        }
        // worker count does not change the result
        for threads in [1, 3] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            assert_eq!(tree, pool.install(|| s_moments(&samples)));
        }
    }
}
