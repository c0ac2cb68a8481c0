//! Arrival-count histograms produced by ensemble runs.

use alloc::collections::BTreeMap;
use alloc::string::String;

/// The lattice region a histogram lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportDomain {
    /// Sites `[-half_width, half_width]` of the open line.
    Line { half_width: i64 },
    /// Sites `[0, ell)` of a ring.
    Ring { ell: u64 },
}

impl SupportDomain {
    pub fn contains(&self, site: i64) -> bool {
        match *self {
            SupportDomain::Line { half_width } => site.abs() <= half_width,
            SupportDomain::Ring { ell } => site >= 0 && (site as u64) < ell,
        }
    }

    /// Iterates every site of the domain in increasing order.
    pub fn sites(&self) -> impl Iterator<Item = i64> {
        match *self {
            SupportDomain::Line { half_width } => -half_width..=half_width,
            SupportDomain::Ring { ell } => 0..=(ell as i64 - 1),
        }
    }
}

/// Per-site arrival counts of an ensemble, with the run metadata needed to
/// reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleHistogram {
    counts: BTreeMap<i64, u64>,
    domain: SupportDomain,
    pub n_particles: u64,
    pub n_steps: u64,
    pub scenario: String,
    pub seed: u64,
}

impl EnsembleHistogram {
    pub fn new(
        domain: SupportDomain,
        n_steps: u64,
        scenario: String,
        seed: u64,
    ) -> Self {
        EnsembleHistogram {
            counts: BTreeMap::new(),
            domain,
            n_particles: 0,
            n_steps,
            scenario,
            seed,
        }
    }

    /// Records one arrival. Panics if the site is outside the domain,
    /// which would indicate a broken walker.
    pub fn record(&mut self, site: i64) {
        assert!(self.domain.contains(site), "arrival outside domain");
        *self.counts.entry(site).or_insert(0) += 1;
        self.n_particles += 1;
    }

    /// Merges the counts of another shard of the same run.
    pub fn merge(&mut self, other: &EnsembleHistogram) {
        assert_eq!(self.domain, other.domain);
        for (&site, &count) in &other.counts {
            *self.counts.entry(site).or_insert(0) += count;
        }
        self.n_particles += other.n_particles;
    }

    pub fn domain(&self) -> SupportDomain {
        self.domain
    }

    pub fn count(&self, site: i64) -> u64 {
        self.counts.get(&site).copied().unwrap_or(0)
    }

    /// Total number of recorded arrivals; always equals the number of
    /// particles run.
    pub fn total(&self) -> u64 {
        self.n_particles
    }

    /// Observed frequency at a site.
    pub fn frequency(&self, site: i64) -> f64 {
        if self.n_particles == 0 {
            return 0.0;
        }
        self.count(site) as f64 / self.n_particles as f64
    }

    /// Iterates occupied sites in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }
}
