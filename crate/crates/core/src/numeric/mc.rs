//! Plain Monte Carlo quadrature over a mapped unit hypercube.
//!
//! The sample budget is split into a fixed number of shards, each drawing from
//! its own substream ([`RngStream::shard`]). Within a shard the first
//! coordinate is stratified (sample `i` of `m` draws `u₀` from `[i/m, (i+1)/m)`).
//! Shard results are merged in shard order, so the estimate is bit-identical
//! for any thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::RngStream;

pub const DEFAULT_SHARDS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    /// One standard error of `value`, from the pooled sample variance. With
    /// the first coordinate stratified this is an upper bound.
    pub std_error: f64,
    pub samples: u64,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64,
        }
    }
}

/// Estimate `∫_D f` where `sampler` maps `u ∈ [0,1)^dimension` uniformly onto a
/// domain of measure `volume`.
pub fn mc_integrate<S, F>(
    dimension: usize,
    volume: f64,
    sampler: S,
    integrand: F,
    n_samples: u64,
    stream: RngStream,
) -> McEstimate
where
    S: Fn(&[f64]) -> Vec<f64> + Sync,
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert!(dimension > 0, "dimension must be positive");
    let shards = DEFAULT_SHARDS.min(n_samples.max(1) as usize);
    let base = n_samples / shards as u64;
    let extra = n_samples % shards as u64;

    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|k| {
            let m = base + u64::from((k as u64) < extra);
            let mut rng = stream.shard(k as u64).rng();
            let mut u = vec![0.0; dimension];
            let mut acc = Moments::default();
            for i in 0..m {
                u[0] = (i as f64 + rng.gen::<f64>()) / m as f64;
                for c in u.iter_mut().skip(1) {
                    *c = rng.gen();
                }
                let x = sampler(&u);
                acc.push(integrand(&x));
            }
            acc
        })
        .collect();

    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    McEstimate {
        value: volume * total.mean,
        std_error: volume * (var / total.n.max(1) as f64).sqrt(),
        samples: total.n,
    }
}
