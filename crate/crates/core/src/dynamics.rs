//! Single-particle stochastic dynamics: the transition law, step and
//! trajectory sampling, and the exact evolution of a position density.
//!
//! At every tick the particle moves up one site, rests, or moves down one
//! site with probabilities `a`, `b`, `c`. The whole law is a function of
//! the momentum propensity `p = a - c`, the expected step. The energy
//! propensity `e = a + c` (expected squared step) is fixed to
//! `e = (1 + p²)/2`, which pins
//!
//! ```text
//! a = ((1+p)/2)²,   b = (1-p²)/2,   c = ((1-p)/2)²
//! ```
//!
//! and in particular the identity `b² = 4ac` that makes the energy law at a
//! site independent of `p` (see [`crate::oracle`]).

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::{Error, Result};

/// Transition law of the three-valued step, derived from the momentum
/// propensity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propensity {
    p: f64,
    e: f64,
    a: f64,
    b: f64,
    c: f64,
}

impl Propensity {
    /// Builds the law from the momentum propensity `p ∈ [-1, 1]`.
    ///
    /// ```
    /// let law = qlattice_core::dynamics::Propensity::from_momentum(0.5).unwrap();
    /// assert_eq!((law.a(), law.b(), law.c()), (0.5625, 0.375, 0.0625));
    /// assert_eq!(law.b() * law.b(), 4.0 * law.a() * law.c());
    /// ```
    pub fn from_momentum(p: f64) -> Result<Self> {
        if p.is_nan() || p.abs() > 1.0 {
            return Err(Error::InvalidMomentum);
        }
        let up = (1.0 + p) / 2.0;
        let down = (1.0 - p) / 2.0;
        Ok(Propensity {
            p,
            e: (1.0 + p * p) / 2.0,
            a: up * up,
            b: (1.0 - p * p) / 2.0,
            c: down * down,
        })
    }

    /// Momentum propensity `p = a - c`.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Energy propensity `e = a + c = (1 + p²)/2`.
    pub fn e(&self) -> f64 {
        self.e
    }

    /// Probability of an upward step.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Probability of resting. Equals the step variance `e - p²`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Probability of a downward step.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Samples one step, consuming exactly one uniform draw, partitioned
    /// as `[0,a) → +1`, `[a,a+b) → 0`, `[a+b,1) → -1`.
    pub fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> Step {
        let u: f64 = rng.gen();
        if u < self.a {
            Step::Up
        } else if u < self.a + self.b {
            Step::Rest
        } else {
            Step::Down
        }
    }
}

/// One realization of the local velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Up,
    Rest,
    Down,
}

impl Step {
    /// The velocity value in {+1, 0, -1}.
    pub fn velocity(self) -> i64 {
        match self {
            Step::Up => 1,
            Step::Rest => 0,
            Step::Down => -1,
        }
    }
}

/// Accumulators of one sampled trajectory: position (summed velocity),
/// cumulated energy (summed squared velocity) and elapsed ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkRecord {
    pub xi: i64,
    pub sigma: u64,
    pub tau: u64,
}

/// Samples a trajectory of `n_steps` ticks from the origin.
pub fn walk<R: Rng + ?Sized>(prop: Propensity, n_steps: u64, rng: &mut R) -> WalkRecord {
    let mut xi = 0i64;
    let mut sigma = 0u64;
    for _ in 0..n_steps {
        let v = prop.sample_step(rng).velocity();
        xi += v;
        sigma += v.unsigned_abs();
    }
    WalkRecord {
        xi,
        sigma,
        tau: n_steps,
    }
}

/// A probability vector over a contiguous window of lattice sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    values: Vec<f64>,
    min_site: i64,
}

impl Density {
    /// Unit mass at the origin.
    pub fn delta_at_origin() -> Self {
        Density {
            values: vec![1.0],
            min_site: 0,
        }
    }

    /// Builds a density from a window of values starting at `min_site`.
    pub fn from_window(min_site: i64, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&v| v < 0.0) {
            return Err(Error::NegativeDensity);
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized);
        }
        Ok(Density { values, min_site })
    }

    /// Lowest site of the stored window.
    pub fn min_site(&self) -> i64 {
        self.min_site
    }

    /// Highest site of the stored window.
    pub fn max_site(&self) -> i64 {
        self.min_site + self.values.len() as i64 - 1
    }

    /// Probability at a site (zero outside the window).
    pub fn value(&self, xi: i64) -> f64 {
        if xi < self.min_site || xi > self.max_site() {
            return 0.0;
        }
        self.values[(xi - self.min_site) as usize]
    }

    /// Total mass.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Iterates `(site, probability)` over the window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.min_site + i as i64, v))
    }

    /// One application of the transition law:
    /// `ρ'(ξ) = a ρ(ξ-1) + b ρ(ξ) + c ρ(ξ+1)`.
    ///
    /// The window grows by one site on each side. Mass is conserved
    /// because each input entry is distributed over three outputs whose
    /// weights sum to one.
    pub fn evolve(&self, prop: Propensity) -> Density {
        let n = self.values.len();
        let mut out = vec![0.0f64; n + 2];
        for (i, slot) in out.iter_mut().enumerate() {
            let left = self.get_raw(i as i64 - 2);
            let mid = self.get_raw(i as i64 - 1);
            let right = self.get_raw(i as i64);
            // Operand order keeps the p <-> -p mirror bit-exact.
            *slot = (prop.a * left + prop.c * right) + prop.b * mid;
        }
        Density {
            values: out,
            min_site: self.min_site - 1,
        }
    }

    fn get_raw(&self, idx: i64) -> f64 {
        if idx < 0 || idx >= self.values.len() as i64 {
            0.0
        } else {
            self.values[idx as usize]
        }
    }
}

/// Checked form of [`Density::evolve`] validating the input vector first.
pub fn evolve_density(rho: &Density, prop: Propensity) -> Result<Density> {
    if rho.values.iter().any(|&v| v < 0.0) {
        return Err(Error::NegativeDensity);
    }
    if (rho.total() - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized);
    }
    Ok(rho.evolve(prop))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn propensity_reference_values() {
        let rest = Propensity::from_momentum(0.0).unwrap();
        assert_eq!(rest.a(), 0.25);
        assert_eq!(rest.b(), 0.5);
        assert_eq!(rest.c(), 0.25);
        assert_eq!(rest.e(), 0.5);

        let light = Propensity::from_momentum(1.0).unwrap();
        assert_eq!(light.a(), 1.0);
        assert_eq!(light.b(), 0.0);
        assert_eq!(light.c(), 0.0);

        let half = Propensity::from_momentum(0.5).unwrap();
        assert_eq!(half.a(), 0.5625);
        assert_eq!(half.b(), 0.375);
        assert_eq!(half.c(), 0.0625);
        // b² = 4ac
        assert_eq!(half.b() * half.b(), 0.140625);
        assert_eq!(4.0 * half.a() * half.c(), 0.140625);
    }

    #[test]
    fn propensity_invariants_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p: f64 = rng.gen_range(-1.0..=1.0);
            let prop = Propensity::from_momentum(p).unwrap();
            let sum = prop.a() + prop.b() + prop.c();
            assert!((sum - 1.0).abs() < 1e-15);
            assert!((prop.a() - prop.c() - p).abs() < 1e-15);
            assert!((prop.a() + prop.c() - prop.e()).abs() < 1e-15);
            assert!((prop.e() - (1.0 + p * p) / 2.0).abs() < 1e-15);
            assert!((prop.b() * prop.b() - 4.0 * prop.a() * prop.c()).abs() < 1e-15);
            for v in [prop.a(), prop.b(), prop.c()] {
                assert!((0.0..=1.0).contains(&v));
            }
        }
        assert!(Propensity::from_momentum(1.01).is_err());
        assert!(Propensity::from_momentum(f64::NAN).is_err());
    }

    #[test]
    fn sampling_consumes_exactly_one_draw() {
        let prop = Propensity::from_momentum(0.3).unwrap();
        let mut sampled = ChaCha8Rng::seed_from_u64(8);
        let mut reference = sampled.clone();
        for _ in 0..50 {
            prop.sample_step(&mut sampled);
            let _: f64 = reference.gen();
        }
        assert_eq!(sampled.gen::<u64>(), reference.gen::<u64>());
    }

    #[test]
    fn deterministic_steps_at_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let up = Propensity::from_momentum(1.0).unwrap();
        let down = Propensity::from_momentum(-1.0).unwrap();
        for _ in 0..200 {
            assert_eq!(up.sample_step(&mut rng), Step::Up);
            assert_eq!(down.sample_step(&mut rng), Step::Down);
        }
    }

    #[test]
    fn step_frequencies_within_four_sigma() {
        let prop = Propensity::from_momentum(0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 1_000_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..n {
            match prop.sample_step(&mut rng) {
                Step::Up => counts[0] += 1,
                Step::Rest => counts[1] += 1,
                Step::Down => counts[2] += 1,
            }
        }
        for (count, expected) in counts.iter().zip([0.25, 0.5, 0.25]) {
            let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
            let freq = *count as f64 / n as f64;
            assert!(
                (freq - expected).abs() < 4.0 * sigma,
                "freq {freq} vs {expected}"
            );
        }
    }

    #[test]
    fn light_like_walk_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rec = walk(Propensity::from_momentum(1.0).unwrap(), 300, &mut rng);
        assert_eq!(rec.xi, 300);
        assert_eq!(rec.sigma, 300);
        assert_eq!(rec.tau, 300);
    }

    #[test]
    fn walk_records_satisfy_path_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &p in &[-0.8, -0.3, 0.0, 0.4, 0.9] {
            let prop = Propensity::from_momentum(p).unwrap();
            for _ in 0..200 {
                let rec = walk(prop, 57, &mut rng);
                assert!(rec.xi.unsigned_abs() <= rec.sigma);
                assert!(rec.sigma <= rec.tau);
                assert_eq!((rec.sigma - rec.xi.unsigned_abs()) % 2, 0);
            }
        }
    }

    #[test]
    fn walk_moments_within_four_sigma() {
        // Endpoint mean p·tau, variance b·tau.
        let p = 0.5;
        let tau = 300u64;
        let n_walks = 50_000usize;
        let prop = Propensity::from_momentum(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let xs: Vec<f64> = (0..n_walks)
            .map(|_| walk(prop, tau, &mut rng).xi as f64)
            .collect();
        let mean: f64 = xs.iter().sum::<f64>() / n_walks as f64;
        let var: f64 =
            xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n_walks - 1) as f64;
        let b = prop.b();
        let mean_sigma = (b * tau as f64 / n_walks as f64).sqrt();
        assert!((mean - p * tau as f64).abs() < 4.0 * mean_sigma);
        // Var(sample variance) ≈ 2 var² / (n-1) for near-normal data.
        let var_sigma = (2.0 / (n_walks - 1) as f64).sqrt() * b * tau as f64;
        assert!((var - b * tau as f64).abs() < 4.0 * var_sigma, "var {var}");
    }

    #[test]
    fn two_step_rest_probability() {
        // Pr(xi = 0 after two ticks) = 2ac + b² = 3/8 at p = 0.
        let prop = Propensity::from_momentum(0.0).unwrap();
        let rho = Density::delta_at_origin().evolve(prop).evolve(prop);
        assert!((rho.value(0) - 0.375).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| walk(prop, 2, &mut rng).xi == 0)
            .count() as f64;
        let sigma = (0.375 * 0.625 / n as f64).sqrt();
        assert!((hits / n as f64 - 0.375).abs() < 4.0 * sigma);
    }

    #[test]
    fn single_evolution_from_delta() {
        let prop = Propensity::from_momentum(0.0).unwrap();
        let rho = Density::delta_at_origin().evolve(prop);
        assert_eq!(rho.value(-1), 0.25);
        assert_eq!(rho.value(0), 0.5);
        assert_eq!(rho.value(1), 0.25);
        assert_eq!(rho.min_site(), -1);
        assert_eq!(rho.max_site(), 1);
    }

    #[test]
    fn two_evolutions_match_hand_expansion() {
        for &p in &[-0.6, 0.0, 0.3, 0.9] {
            let prop = Propensity::from_momentum(p).unwrap();
            let (a, b, c) = (prop.a(), prop.b(), prop.c());
            let rho = Density::delta_at_origin().evolve(prop).evolve(prop);
            let expected = [
                (2, a * a),
                (1, 2.0 * a * b),
                (0, 2.0 * a * c + b * b),
                (-1, 2.0 * b * c),
                (-2, c * c),
            ];
            for (site, value) in expected {
                assert!((rho.value(site) - value).abs() < 1e-15, "site {site}");
            }
        }
    }

    #[test]
    fn evolution_conserves_mass() {
        let prop = Propensity::from_momentum(0.37).unwrap();
        let mut rho = Density::delta_at_origin();
        for _ in 0..200 {
            rho = rho.evolve(prop);
            assert!((rho.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror_symmetry_is_exact() {
        let plus = Propensity::from_momentum(0.41).unwrap();
        let minus = Propensity::from_momentum(-0.41).unwrap();
        let mut rho_p = Density::delta_at_origin();
        let mut rho_m = Density::delta_at_origin();
        for _ in 0..60 {
            rho_p = rho_p.evolve(plus);
            rho_m = rho_m.evolve(minus);
        }
        for (site, value) in rho_p.iter() {
            assert_eq!(value, rho_m.value(-site), "site {site}");
        }
    }

    #[test]
    fn event_horizon_mass() {
        let prop = Propensity::from_momentum(0.3).unwrap();
        let tau = 40;
        let mut rho = Density::delta_at_origin();
        for _ in 0..tau {
            rho = rho.evolve(prop);
        }
        let a_pow = prop.a().powi(tau);
        let c_pow = prop.c().powi(tau);
        assert!((rho.value(tau as i64) - a_pow).abs() <= 1e-12 * a_pow.max(1e-30));
        assert!((rho.value(-(tau as i64)) - c_pow).abs() <= 1e-12 * c_pow.max(1e-30));
    }

    #[test]
    fn invalid_density_inputs() {
        let prop = Propensity::from_momentum(0.0).unwrap();
        let bad = Density {
            values: vec![0.5, -0.1, 0.6],
            min_site: 0,
        };
        assert_eq!(evolve_density(&bad, prop), Err(Error::NegativeDensity));
        let unnormalized = Density {
            values: vec![0.5, 0.6],
            min_site: 0,
        };
        assert_eq!(evolve_density(&unnormalized, prop), Err(Error::NotNormalized));
        assert!(Density::from_window(0, vec![0.5, 0.5]).is_ok());
    }
}
