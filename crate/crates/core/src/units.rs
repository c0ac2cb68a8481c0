//! Conversions between lattice units and physical units, the
//! uncertainty-product identity, and boost relations between inertial
//! frames.
//!
//! Space and time are discrete: positions are integer multiples of a
//! fundamental length `X` and times integer multiples of a fundamental
//! tick `T`. Requiring that the maximum speed (one site per tick) equals
//! the speed of light and that the velocity/position uncertainty product
//! `Δv·Δx = 2X²/T` reproduces the known quantum of action fixes both
//! scales for a given particle mass:
//!
//! ```text
//! X = h / (2 m c),    T = h / (2 m c²)
//! ```
//!
//! so that `X/T = c` and `m X²/T = h/2` (the 4π solid-angle divisor of the
//! three-dimensional relation collapses to 2 in one dimension). Twice `X`
//! is the Compton wavelength of the particle.

use crate::error::{Error, Result};

/// Physical constants, CODATA 2018 / SI 2019 exact values.
pub mod constants {
    /// Speed of light in vacuum, m/s (exact).
    pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
    /// Planck constant, J·s (exact).
    pub const PLANCK: f64 = 6.626_070_15e-34;
    /// Electron mass, kg.
    pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
}

/// Fundamental lattice scales for a particle of a given mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeScale {
    mass: f64,
    spatial_step: f64,
    temporal_step: f64,
}

impl LatticeScale {
    /// Derives the lattice scales from the particle mass:
    /// `X = h/(2mc)`, `T = h/(2mc²)`.
    pub fn from_mass(mass: f64) -> Result<Self> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(Error::NonPositiveMass);
        }
        let c = constants::SPEED_OF_LIGHT;
        let h = constants::PLANCK;
        let spatial_step = h / (2.0 * mass * c);
        Ok(LatticeScale {
            mass,
            spatial_step,
            temporal_step: spatial_step / c,
        })
    }

    /// Particle mass in kg.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Fundamental spatial step `X` in meters.
    pub fn spatial_step(&self) -> f64 {
        self.spatial_step
    }

    /// Fundamental time step `T` in seconds.
    pub fn temporal_step(&self) -> f64 {
        self.temporal_step
    }

    /// The invariant `m X²/T`, equal to `h/2` in one dimension.
    pub fn action_quantum(&self) -> f64 {
        self.mass * self.spatial_step * self.spatial_step / self.temporal_step
    }

    /// Velocity and position uncertainties after an observation lasting
    /// `n` ticks, in physical units: `Δv = c/n`, `Δx = 2nX`. Their product
    /// `2X²/T` does not depend on `n`.
    pub fn uncertainty_physical(&self, n: u64) -> Result<(f64, f64)> {
        let u = uncertainty_product(n)?;
        Ok((
            u.velocity * constants::SPEED_OF_LIGHT,
            u.position * self.spatial_step,
        ))
    }
}

/// Velocity/position uncertainty pair in lattice units (`c = 1`, `X = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyProduct {
    /// Velocity uncertainty `1/n` in units of `c`.
    pub velocity: f64,
    /// Position uncertainty `2n` in units of `X`.
    pub position: f64,
}

impl UncertaintyProduct {
    /// The product `Δv·Δx = 2` in units of `X²/T`, independent of `n`.
    pub fn product(&self) -> f64 {
        self.velocity * self.position
    }
}

/// Uncertainties of the sample velocity and of the position span after an
/// observation lasting `n` ticks.
pub fn uncertainty_product(n: u64) -> Result<UncertaintyProduct> {
    if n == 0 {
        return Err(Error::ZeroHorizon);
    }
    Ok(UncertaintyProduct {
        velocity: 1.0 / n as f64,
        position: 2.0 * n as f64,
    })
}

/// An inertial frame moving at velocity `beta = V/c` relative to the
/// fundamental lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    beta: f64,
}

impl Frame {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_nan() || beta.abs() >= 1.0 {
            return Err(Error::InvalidBeta);
        }
        Ok(Frame { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Relativistic composition of two boosts:
    /// `(β₁ + β₂) / (1 + β₁β₂)`.
    pub fn compose(&self, other: Frame) -> Result<Frame> {
        Frame::new((self.beta + other.beta) / (1.0 + self.beta * other.beta))
    }
}

/// Coordinates and walk parameters of an event seen from a boosted frame.
///
/// The transformed coordinates are reals; they are never rounded back to
/// lattice sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostedPoint {
    pub xi: f64,
    pub tau: f64,
    pub p: f64,
    pub b: f64,
}

/// Transforms the event `(xi, tau)` of a walk with momentum propensity `p`
/// into the frame moving at `beta`.
///
/// With `q = xi/tau` the deformation factor is
/// `(1 - pβ)² / ((1 - β²)(1 - qβ))`, applied to the classical
/// `(ξ - βτ, τ - βξ)` pair. The momentum transforms by the velocity
/// addition rule and the rest probability `b = (1 - p²)/2` accordingly.
/// The products `b'τ' = bτ` and
/// `ξ' - p'τ' = (ξ - pτ)(1 - pβ)/(1 - qβ)` hold identically.
pub fn lorentz_boost(xi: i64, tau: u64, p: f64, frame: Frame) -> Result<BoostedPoint> {
    if tau == 0 {
        return Err(Error::ZeroTau);
    }
    if p.is_nan() || p.abs() > 1.0 {
        return Err(Error::InvalidMomentum);
    }
    if xi.unsigned_abs() > tau {
        return Err(Error::OutsideLightCone);
    }
    let beta = frame.beta();
    let (xi, tau) = (xi as f64, tau as f64);
    let q = xi / tau;
    let factor = (1.0 - p * beta) * (1.0 - p * beta) / ((1.0 - beta * beta) * (1.0 - q * beta));
    let b = (1.0 - p * p) / 2.0;
    Ok(BoostedPoint {
        xi: factor * (xi - beta * tau),
        tau: factor * (tau - beta * xi),
        p: (p - beta) / (1.0 - beta * p),
        b: b * (1.0 - beta * beta) / ((1.0 - p * beta) * (1.0 - p * beta)),
    })
}
