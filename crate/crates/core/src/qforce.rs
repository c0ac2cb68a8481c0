//! The interference mechanism: site registers, momentum-carrying tokens
//! ("bosons") exchanged between walkers and lattice sites, their two decay
//! laws, and the ensemble runners built on them.
//!
//! Each walker carries a spatial counter `λ` (its displacement since
//! emission). Each site keeps a register `μ` holding the counter of the
//! last visitor. When a visitor's counter differs from the register, the
//! two exchange: a boson pair keyed by `μ - λ` is created, the register
//! takes the visitor's counter (and, under [`SwapPolicy::EveryVisit`],
//! the counter takes the old register), the walker's new boson inherits
//! the momentum of the displaced site resident (zero if none), and the
//! fresh site resident stores the visitor's sample momentum `q = λ/τ`.
//!
//! Carried boson momenta decay by `(1 - 1/(2k))` per tick — after `k`
//! ticks the survival factor is `(2k)!/((k!)² 4^k)` — and the walker's
//! effective momentum is its base momentum minus the sum of carried
//! momenta. Site momenta decay by `(1 - (δq/ℓ)²)` at age `ℓ`, whose
//! infinite product converges to `q·sinc(δq) = sin(πδq)/(δπ)`.
//!
//! Two drivers exist: [`run_full`] plays the full mechanism with real
//! registers (sequential emissions share one mutable lattice), and
//! [`run_trained`] replaces register lookups by draws from their
//! steady-state statistics and initializes new carried bosons directly at
//! the sinc limit, which is how the stationary interference patterns are
//! sampled cheaply.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;

use crate::dynamics::Propensity;
use crate::error::{Error, Result};
use crate::histogram::{EnsembleHistogram, SupportDomain};
use crate::oracle::{SourceSet, PI};
use crate::rng::particle_stream;

/// Site-register difference `μ - λ` recorded when a boson pair is created.
/// Always nonzero: equal counters create nothing.
pub type BosonKey = i64;

/// A momentum token carried by a walker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleBoson {
    pub momentum: f64,
    /// Ticks since creation.
    pub age: u64,
}

/// A momentum token resident at a lattice site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteBoson {
    pub momentum: f64,
    /// `(μ - λ)·q` frozen at creation; drives the decay rate.
    pub w0_scaled: f64,
    /// Ticks since creation.
    pub age: u64,
}

/// One tick of carried-boson decay: `p ← p (1 - 1/(2k))` at new age `k`.
pub fn decay_particle_boson(boson: ParticleBoson) -> ParticleBoson {
    let age = boson.age + 1;
    ParticleBoson {
        momentum: boson.momentum * (1.0 - 1.0 / (2.0 * age as f64)),
        age,
    }
}

/// Transient resident momenta can blow up combinatorially before the decay
/// factors drop below one (ages younger than `|w0|`). Saturating far above
/// any physical momentum keeps the arithmetic finite without changing
/// behavior: anything this large pins the effective momentum at the clamp
/// either way.
const RESIDENT_SATURATION: f64 = 1e100;

/// One tick of resident-boson decay: `w ← w (1 - (w0/ℓ)²)` at new age `ℓ`.
pub fn decay_site_boson(boson: SiteBoson) -> SiteBoson {
    let age = boson.age + 1;
    let ratio = boson.w0_scaled / age as f64;
    SiteBoson {
        momentum: (boson.momentum * (1.0 - ratio * ratio))
            .clamp(-RESIDENT_SATURATION, RESIDENT_SATURATION),
        w0_scaled: boson.w0_scaled,
        age,
    }
}

/// Limit of the resident decay product: `sin(π δ q)/(δ π)`.
pub fn steady_state_momentum(q: f64, delta: u64) -> f64 {
    libm::sin(PI * delta as f64 * q) / (delta as f64 * PI)
}

/// Per-site memory: the register and the resident bosons, at most one per
/// key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SiteState {
    pub register: Option<i64>,
    pub residents: BTreeMap<BosonKey, SiteBoson>,
}

/// A walker subject to the exchange mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferingParticle {
    /// Current site (wrapped on a ring).
    pub position: i64,
    /// Spatial counter `λ`, never wrapped.
    pub counter: i64,
    /// Ticks since emission.
    pub tau: u64,
    /// Momentum imprinted at emission.
    pub base_momentum: f64,
    /// Carried bosons, at most one per key.
    pub carried: BTreeMap<BosonKey, ParticleBoson>,
}

impl InterferingParticle {
    pub fn new(position: i64, base_momentum: f64) -> Self {
        InterferingParticle {
            position,
            counter: 0,
            tau: 0,
            base_momentum,
            carried: BTreeMap::new(),
        }
    }

    /// Effective momentum: base minus the carried momenta, clamped into
    /// the valid propensity range.
    pub fn effective_momentum(&self) -> f64 {
        let carried: f64 = self.carried.values().map(|b| b.momentum).sum();
        (self.base_momentum - carried).clamp(-1.0, 1.0)
    }

    /// Sample momentum `q = λ/τ`; zero before the first tick.
    pub fn sample_momentum(&self) -> f64 {
        if self.tau == 0 {
            0.0
        } else {
            self.counter as f64 / self.tau as f64
        }
    }
}

/// When the walker's counter swaps with the site register.
///
/// Under `EndOfEmission` the counter survives the whole walk untouched
/// (the trailing swap acts on a walker about to be discarded, so it never
/// feeds back). `EveryVisit` swaps inside each exchange. On a ring only
/// `EndOfEmission` lets the counter accumulate windings — with per-visit
/// swaps every revisit resets the counter to a lap-old value and the
/// sample momentum collapses to zero instead of locking on the quantized
/// value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SwapPolicy {
    #[default]
    EndOfEmission,
    EveryVisit,
}

/// The register/counter exchange protocol run once per arrival at a site,
/// with the counter swap applied per visit.
///
/// A virgin site only memorizes the visitor's counter. Matching counters
/// exchange nothing. Differing counters create the boson pair keyed by
/// `μ - λ` (values taken before the swap), then swap register and
/// counter. At `τ = 0` the sample momentum is undefined and no bosons are
/// created.
pub fn visit(particle: &mut InterferingParticle, site: &mut SiteState) {
    visit_with_policy(particle, site, SwapPolicy::EveryVisit)
}

/// [`visit`] with an explicit counter-swap policy.
pub fn visit_with_policy(
    particle: &mut InterferingParticle,
    site: &mut SiteState,
    policy: SwapPolicy,
) {
    let lambda = particle.counter;
    match site.register {
        None => site.register = Some(lambda),
        Some(mu) if mu == lambda => {}
        Some(mu) => {
            if particle.tau == 0 {
                return;
            }
            let key: BosonKey = mu - lambda;
            let inherited = site
                .residents
                .get(&key)
                .map(|b| b.momentum)
                .unwrap_or(0.0);
            let q = lambda as f64 / particle.tau as f64;
            particle.carried.insert(
                key,
                ParticleBoson {
                    momentum: inherited,
                    age: 0,
                },
            );
            site.residents.insert(
                key,
                SiteBoson {
                    momentum: q,
                    w0_scaled: key as f64 * q,
                    age: 0,
                },
            );
            site.register = Some(lambda);
            if policy == SwapPolicy::EveryVisit {
                particle.counter = mu;
            }
        }
    }
}

/// The lattice memory: sparse map on the open line, dense array on a ring.
#[derive(Debug, Clone)]
pub struct Lattice {
    storage: Storage,
}

#[derive(Debug, Clone)]
enum Storage {
    Line(BTreeMap<i64, SiteState>),
    Ring(Vec<SiteState>),
}

/// One resident boson row of a lattice dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BosonDump {
    pub site: i64,
    pub key: BosonKey,
    pub momentum: f64,
    pub w0_scaled: f64,
    pub age: u64,
}

impl Lattice {
    pub fn new(ring: Option<u64>) -> Self {
        let storage = match ring {
            Some(ell) => Storage::Ring(alloc::vec![SiteState::default(); ell as usize]),
            None => Storage::Line(BTreeMap::new()),
        };
        Lattice { storage }
    }

    pub fn site_mut(&mut self, position: i64) -> &mut SiteState {
        match &mut self.storage {
            Storage::Line(map) => map.entry(position).or_default(),
            Storage::Ring(sites) => &mut sites[position as usize],
        }
    }

    pub fn register(&self, position: i64) -> Option<i64> {
        match &self.storage {
            Storage::Line(map) => map.get(&position).and_then(|s| s.register),
            Storage::Ring(sites) => sites.get(position as usize).and_then(|s| s.register),
        }
    }

    /// Ages every resident boson by one tick.
    pub fn decay_all(&mut self) {
        let decay_site = |site: &mut SiteState| {
            for boson in site.residents.values_mut() {
                *boson = decay_site_boson(*boson);
            }
        };
        match &mut self.storage {
            Storage::Line(map) => map.values_mut().for_each(decay_site),
            Storage::Ring(sites) => sites.iter_mut().for_each(decay_site),
        }
    }

    /// Flat view of every resident boson.
    pub fn boson_dump(&self) -> Vec<BosonDump> {
        let mut out = Vec::new();
        let mut push = |site: i64, state: &SiteState| {
            for (&key, boson) in &state.residents {
                out.push(BosonDump {
                    site,
                    key,
                    momentum: boson.momentum,
                    w0_scaled: boson.w0_scaled,
                    age: boson.age,
                });
            }
        };
        match &self.storage {
            Storage::Line(map) => {
                for (&site, state) in map {
                    push(site, state);
                }
            }
            Storage::Ring(sites) => {
                for (site, state) in sites.iter().enumerate() {
                    push(site as i64, state);
                }
            }
        }
        out
    }
}

/// How emission momenta are prepared.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentumPrep {
    /// `p` uniform on `[-1, 1]`, drawn per particle.
    Uniform,
    /// Every particle gets the same momentum.
    Fixed(f64),
}

/// A full-mechanism scenario: sources, momentum preparation, optional ring
/// wrapping, and the idle ticks between emissions (residents keep aging
/// during the gap).
#[derive(Debug, Clone, PartialEq)]
pub struct FullScenario {
    pub sources: SourceSet,
    pub momentum: MomentumPrep,
    pub ring: Option<u64>,
    pub emission_gap: u64,
    pub swap: SwapPolicy,
}

impl FullScenario {
    pub fn line(sources: SourceSet, momentum: MomentumPrep) -> Self {
        FullScenario {
            sources,
            momentum,
            ring: None,
            emission_gap: 0,
            swap: SwapPolicy::default(),
        }
    }

    pub fn ring(ell: u64, p: f64) -> Self {
        FullScenario {
            sources: SourceSet::single(),
            momentum: MomentumPrep::Fixed(p),
            ring: Some(ell),
            emission_gap: 0,
            swap: SwapPolicy::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let MomentumPrep::Fixed(p) = self.momentum {
            if p.is_nan() || p.abs() > 1.0 {
                return Err(Error::InvalidMomentum);
            }
        }
        if let Some(ell) = self.ring {
            if ell < 2 {
                return Err(Error::RingTooSmall);
            }
            for &pos in self.sources.positions() {
                if pos < 0 || pos as u64 >= ell {
                    return Err(Error::OutsideLightCone);
                }
            }
        }
        Ok(())
    }

    fn domain(&self, n_steps: u64) -> SupportDomain {
        match self.ring {
            Some(ell) => SupportDomain::Ring { ell },
            None => {
                let reach = self
                    .sources
                    .positions()
                    .iter()
                    .map(|p| p.unsigned_abs())
                    .max()
                    .unwrap_or(0);
                SupportDomain::Line {
                    half_width: (n_steps + reach) as i64,
                }
            }
        }
    }

    fn scenario_id(&self) -> String {
        match self.ring {
            Some(ell) => format!("full-ring[ell={ell}]"),
            None => format!("full[sources={}]", self.sources.len()),
        }
    }
}

/// Everything [`run_full`] produces: the histogram, the final lattice
/// memory, and each particle's final sample momentum.
#[derive(Debug, Clone)]
pub struct FullRunOutput {
    pub histogram: EnsembleHistogram,
    pub lattice: Lattice,
    pub sample_momenta: Vec<f64>,
}

/// Runs the full mechanism: `n_particles` strictly sequential emissions of
/// `n_steps` ticks each over one shared lattice.
pub fn run_full(
    scenario: &FullScenario,
    n_particles: u64,
    n_steps: u64,
    seed: u64,
) -> Result<EnsembleHistogram> {
    Ok(run_full_detailed(scenario, n_particles, n_steps, seed)?.histogram)
}

/// [`run_full`] keeping the lattice and per-particle sample momenta.
pub fn run_full_detailed(
    scenario: &FullScenario,
    n_particles: u64,
    n_steps: u64,
    seed: u64,
) -> Result<FullRunOutput> {
    scenario.validate()?;
    let mut lattice = Lattice::new(scenario.ring);
    let mut histogram = EnsembleHistogram::new(
        scenario.domain(n_steps),
        n_steps,
        scenario.scenario_id(),
        seed,
    );
    let mut sample_momenta = Vec::with_capacity(n_particles as usize);

    for index in 0..n_particles {
        let mut rng = particle_stream(seed, index);
        let source = if scenario.sources.len() > 1 {
            scenario.sources.sample(&mut rng)
        } else {
            0
        };
        let base = match scenario.momentum {
            MomentumPrep::Uniform => 2.0 * rng.gen::<f64>() - 1.0,
            MomentumPrep::Fixed(p) => p,
        };
        let mut particle =
            InterferingParticle::new(scenario.sources.positions()[source], base);

        for _ in 0..n_steps {
            particle.tau += 1;
            let prop = Propensity::from_momentum(particle.effective_momentum())
                .expect("clamped momentum is always valid");
            let v = prop.sample_step(&mut rng).velocity();
            particle.position = match scenario.ring {
                Some(ell) => (particle.position + v).rem_euclid(ell as i64),
                None => particle.position + v,
            };
            particle.counter += v;
            for boson in particle.carried.values_mut() {
                *boson = decay_particle_boson(*boson);
            }
            lattice.decay_all();
            let position = particle.position;
            visit_with_policy(&mut particle, lattice.site_mut(position), scenario.swap);
        }

        histogram.record(particle.position);
        sample_momenta.push(particle.sample_momentum());
        for _ in 0..scenario.emission_gap {
            lattice.decay_all();
        }
    }

    Ok(FullRunOutput {
        histogram,
        lattice,
        sample_momenta,
    })
}

/// A scenario whose lattice statistics are already stationary: register
/// encounters are drawn from the source statistics instead of being built
/// up by many emissions.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedLatticeSpec {
    pub sources: SourceSet,
    slots: Vec<PairSlot>,
}

/// One ordered (register class, walker class) boson slot with its
/// cumulative draw threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PairSlot {
    threshold: f64,
    register: usize,
    delta: u64,
}

impl TrainedLatticeSpec {
    pub fn new(sources: SourceSet) -> Self {
        // Ordered pairs (i, j), i ≠ j: the slot refreshes with probability
        // P_i P_j per tick, i.i.d. across ticks — matching-class
        // encounters (probability Σ P_i²) exchange nothing.
        let mut slots = Vec::new();
        let mut acc = 0.0;
        for i in 0..sources.len() {
            for j in 0..sources.len() {
                if i == j {
                    continue;
                }
                acc += sources.probs()[i] * sources.probs()[j];
                slots.push(PairSlot {
                    threshold: acc,
                    register: i,
                    delta: (sources.positions()[i] - sources.positions()[j]).unsigned_abs(),
                });
            }
        }
        TrainedLatticeSpec { sources, slots }
    }

    fn domain(&self, n_steps: u64) -> SupportDomain {
        let reach = self
            .sources
            .positions()
            .iter()
            .map(|p| p.unsigned_abs())
            .max()
            .unwrap_or(0);
        SupportDomain::Line {
            half_width: (n_steps + reach) as i64,
        }
    }
}

/// Walks one particle over the trained lattice and returns its arrival
/// site. Independent of every other particle, so ensembles may fan out
/// across threads; the histogram merge is a plain sum.
///
/// Per tick one draw decides which register encounter happened: slot
/// `(i, j)` with probability `P_i P_j`, nothing otherwise. A refreshed
/// slot gets a boson initialized directly at the steady-state momentum
/// `sin(πδq̃)/(δπ)`, where `q̃ = (ξ - x_i)/τ` is the drawn register's
/// sample momentum. Stationary slot averages then reproduce the
/// `2√(P_i P_j)` interference amplitudes.
pub fn run_trained_particle<R: Rng + ?Sized>(
    spec: &TrainedLatticeSpec,
    n_steps: u64,
    rng: &mut R,
) -> i64 {
    let positions = spec.sources.positions();
    let multi = spec.sources.len() > 1;
    let source = if multi { spec.sources.sample(rng) } else { 0 };
    let base = 2.0 * rng.gen::<f64>() - 1.0;

    let mut position = positions[source];
    let mut tau = 0u64;
    let mut carried: Vec<ParticleBoson> = alloc::vec![
        ParticleBoson {
            momentum: 0.0,
            age: 0,
        };
        spec.slots.len()
    ];

    for _ in 0..n_steps {
        tau += 1;
        let carried_sum: f64 = carried.iter().map(|b| b.momentum).sum();
        let p_t = (base - carried_sum).clamp(-1.0, 1.0);
        let prop = Propensity::from_momentum(p_t).expect("clamped momentum is always valid");
        position += prop.sample_step(rng).velocity();
        for boson in carried.iter_mut() {
            *boson = decay_particle_boson(*boson);
        }
        if multi {
            let u: f64 = rng.gen();
            if let Some(index) = spec
                .slots
                .iter()
                .position(|slot| u < slot.threshold)
            {
                let slot = spec.slots[index];
                let q_register = (position - positions[slot.register]) as f64 / tau as f64;
                carried[index] = ParticleBoson {
                    momentum: steady_state_momentum(q_register, slot.delta),
                    age: 0,
                };
            }
        }
    }
    position
}

/// Sequentially runs `n_particles` trained walkers. Bit-identical to any
/// sharded execution over the same seed.
///
/// ```
/// use qlattice_core::oracle::SourceSet;
/// use qlattice_core::qforce::{run_trained, TrainedLatticeSpec};
///
/// let spec = TrainedLatticeSpec::new(SourceSet::two_slit(2, 0.5).unwrap());
/// let hist = run_trained(&spec, 200, 50, 7);
/// assert_eq!(hist.total(), 200);
/// ```
pub fn run_trained(
    spec: &TrainedLatticeSpec,
    n_particles: u64,
    n_steps: u64,
    seed: u64,
) -> EnsembleHistogram {
    let mut histogram = EnsembleHistogram::new(
        spec.domain(n_steps),
        n_steps,
        format!("trained[sources={}]", spec.sources.len()),
        seed,
    );
    for index in 0..n_particles {
        let mut rng = particle_stream(seed, index);
        histogram.record(run_trained_particle(spec, n_steps, &mut rng));
    }
    histogram
}

/// Steady-state momentum drag on a ring of `ℓ` sites: the closed form of
/// the winding-class series `Σ_n 2 sin(πnℓq)/(πnℓ)`, a sawtooth
/// `(2/ℓ)(1/2 - frac(ℓq/2))` vanishing at the quantized momenta `2n/ℓ`.
///
/// Between two quantized values the drag makes the net drift
/// `p - q - F(q)` constant, so every walker is pulled to the jump at
/// `(2/ℓ)·round(pℓ/2)` exactly.
pub fn ring_steady_force(q: f64, ell: u64) -> f64 {
    let u = q * ell as f64 / 2.0;
    let frac = u - libm::floor(u);
    if frac == 0.0 {
        0.0
    } else {
        (2.0 / ell as f64) * (0.5 - frac)
    }
}

/// Trained ring ensemble with a common fixed momentum: every winding
/// class is taken at its steady-state statistics, so the carried momenta
/// sum to [`ring_steady_force`] of the walker's sample momentum. Returns
/// the wrapped arrival histogram and each particle's final sample
/// momentum `λ/τ`, which locks onto the quantized value
/// `(2/ℓ)·round(pℓ/2)`.
pub fn run_ring(
    ell: u64,
    p: f64,
    n_particles: u64,
    n_steps: u64,
    seed: u64,
) -> Result<(EnsembleHistogram, Vec<f64>)> {
    if ell < 2 {
        return Err(Error::RingTooSmall);
    }
    if p.is_nan() || p.abs() > 1.0 {
        return Err(Error::InvalidMomentum);
    }
    let mut histogram = EnsembleHistogram::new(
        SupportDomain::Ring { ell },
        n_steps,
        format!("ring[ell={ell},p={p}]"),
        seed,
    );
    let mut momenta = Vec::with_capacity(n_particles as usize);
    for index in 0..n_particles {
        let mut rng = particle_stream(seed, index);
        let mut position = 0i64;
        let mut counter = 0i64;
        let mut force = 0.0;
        let mut tau = 0u64;
        for _ in 0..n_steps {
            tau += 1;
            let p_t = (p - force).clamp(-1.0, 1.0);
            let prop =
                Propensity::from_momentum(p_t).expect("clamped momentum is always valid");
            let v = prop.sample_step(&mut rng).velocity();
            position = (position + v).rem_euclid(ell as i64);
            counter += v;
            force = ring_steady_force(counter as f64 / tau as f64, ell);
        }
        histogram.record(position);
        momenta.push(counter as f64 / n_steps as f64);
    }
    Ok((histogram, momenta))
}

/// Ring ensemble driven by the full register mechanism. The registers
/// store unwrapped counters, so revisits compare whole windings; the
/// resident force carries only the young first winding class, which locks
/// most walkers near the quantized momentum but leaves a tail in
/// neighboring winding basins.
pub fn run_ring_full(
    ell: u64,
    p: f64,
    n_particles: u64,
    n_steps: u64,
    seed: u64,
) -> Result<(EnsembleHistogram, Vec<f64>)> {
    let scenario = FullScenario::ring(ell, p);
    let output = run_full_detailed(&scenario, n_particles, n_steps, seed)?;
    Ok((output.histogram, output.sample_momenta))
}
