//! Parallel ensemble drivers with deterministic merges.
//!
//! Every particle owns a stream derived from (seed, index), so sharding
//! the index range across threads changes nothing in the result: shards
//! are merged by summing counts.

use qlattice_core::dynamics::{walk, Propensity};
use qlattice_core::histogram::{EnsembleHistogram, SupportDomain};
use qlattice_core::qforce::{run_trained_particle, MomentumPrep, TrainedLatticeSpec};
use qlattice_core::rng::particle_stream;
use rand::Rng;
use rayon::prelude::*;

const PARTICLES_PER_SHARD: u64 = 1024;

fn shard_ranges(n_particles: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < n_particles {
        let end = (start + PARTICLES_PER_SHARD).min(n_particles);
        out.push((start, end));
        start = end;
    }
    out
}

fn run_sharded(
    n_particles: u64,
    template: &EnsembleHistogram,
    one: impl Fn(u64) -> i64 + Sync,
) -> EnsembleHistogram {
    let shards: Vec<EnsembleHistogram> = shard_ranges(n_particles)
        .into_par_iter()
        .map(|(start, end)| {
            let mut local = template.clone();
            for index in start..end {
                local.record(one(index));
            }
            local
        })
        .collect();
    let mut merged = template.clone();
    for shard in &shards {
        merged.merge(shard);
    }
    merged
}

/// Runs the free ensemble: each particle walks `n_steps` ticks from the
/// origin with its momentum drawn uniformly on [-1, 1] or fixed.
pub fn run_free_ensemble(
    n_particles: u64,
    n_steps: u64,
    seed: u64,
    momentum: MomentumPrep,
) -> EnsembleHistogram {
    let scenario = match momentum {
        MomentumPrep::Uniform => format!("free[p=uniform,nt={n_steps}]"),
        MomentumPrep::Fixed(p) => format!("free[p={p},nt={n_steps}]"),
    };
    let template = EnsembleHistogram::new(
        SupportDomain::Line {
            half_width: n_steps as i64,
        },
        n_steps,
        scenario,
        seed,
    );
    run_sharded(n_particles, &template, |index| {
        let mut rng = particle_stream(seed, index);
        let p = match momentum {
            MomentumPrep::Uniform => 2.0 * rng.gen::<f64>() - 1.0,
            MomentumPrep::Fixed(p) => p,
        };
        let prop = Propensity::from_momentum(p).expect("momentum validated by caller");
        walk(prop, n_steps, &mut rng).xi
    })
}

/// Parallel trained-lattice ensemble; bit-identical to
/// [`qlattice_core::qforce::run_trained`] for the same seed.
pub fn run_trained_ensemble(
    spec: &TrainedLatticeSpec,
    n_particles: u64,
    n_steps: u64,
    seed: u64,
) -> EnsembleHistogram {
    let sequential_template = qlattice_core::qforce::run_trained(spec, 0, n_steps, seed);
    run_sharded(n_particles, &sequential_template, |index| {
        let mut rng = particle_stream(seed, index);
        run_trained_particle(spec, n_steps, &mut rng)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use qlattice_core::oracle::SourceSet;

    #[test]
    fn free_ensemble_counts_every_particle() {
        let hist = run_free_ensemble(5000, 40, 9, MomentumPrep::Uniform);
        assert_eq!(hist.total(), 5000);
        let inside: u64 = hist.iter().map(|(_, c)| c).sum();
        assert_eq!(inside, 5000);
    }

    #[test]
    fn fixed_light_like_momentum_is_deterministic() {
        let hist = run_free_ensemble(200, 300, 1, MomentumPrep::Fixed(1.0));
        assert_eq!(hist.count(300), 200);
    }

    #[test]
    fn free_ensemble_moments_within_four_sigma() {
        let n_p = 50_000u64;
        let tau = 300u64;
        let p = 0.5;
        let hist = run_free_ensemble(n_p, tau, 4, MomentumPrep::Fixed(p));
        let mean: f64 = hist
            .iter()
            .map(|(s, c)| s as f64 * c as f64)
            .sum::<f64>()
            / n_p as f64;
        let var: f64 = hist
            .iter()
            .map(|(s, c)| (s as f64 - mean) * (s as f64 - mean) * c as f64)
            .sum::<f64>()
            / (n_p - 1) as f64;
        let b = (1.0 - p * p) / 2.0;
        let mean_sigma = (b * tau as f64 / n_p as f64).sqrt();
        assert!((mean - p * tau as f64).abs() < 4.0 * mean_sigma, "mean {mean}");
        let var_sigma = (2.0 / (n_p - 1) as f64).sqrt() * b * tau as f64;
        assert!((var - b * tau as f64).abs() < 4.0 * var_sigma, "var {var}");
    }

    #[test]
    fn parallel_matches_sequential_trained() {
        let spec = TrainedLatticeSpec::new(SourceSet::two_slit(2, 0.5).unwrap());
        let par = run_trained_ensemble(&spec, 3000, 60, 17);
        let seq = qlattice_core::qforce::run_trained(&spec, 3000, 60, 17);
        assert_eq!(par.total(), seq.total());
        for (site, count) in seq.iter() {
            assert_eq!(par.count(site), count, "site {site}");
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let run = || {
            run_free_ensemble(4000, 50, 23, MomentumPrep::Uniform)
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(run);
        assert_eq!(one, many);
    }
}
