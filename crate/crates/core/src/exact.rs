//! Exact brute-force oracles in arbitrary-precision rational arithmetic.
//!
//! Everything here exists to certify the closed forms of [`crate::oracle`]
//! with zero tolerance. Two independent enumeration backends are provided:
//! a literal walk over all `3^τ` step sequences (small `τ`, ground truth)
//! and composition counting over `(n_a, n_b, n_c)` move multiplicities
//! (reaches `τ = 100`). They must agree wherever both run.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::oracle::SitePoint;

/// Largest `τ` for the literal `3^τ` walk (531 441 paths at the cap).
pub const MAX_LITERAL_TAU: u64 = 12;
/// Largest `τ` for the composition-counting backend.
pub const MAX_COMPOSITION_TAU: u64 = 100;

/// Shorthand for a rational from a signed numerator and denominator.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rounds a rational to f64 (for cross-checks against the float oracle).
pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact binomial coefficient.
pub fn big_choose(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

/// The transition law evaluated in exact rational arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLaw {
    pub p: BigRational,
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub e: BigRational,
}

impl RationalLaw {
    pub fn from_momentum(p: &BigRational) -> Result<Self> {
        if p.abs() > BigRational::one() {
            return Err(Error::InvalidMomentum);
        }
        let one = BigRational::one();
        let two = ratio(2, 1);
        let up = (&one + p) / &two;
        let down = (&one - p) / &two;
        Ok(RationalLaw {
            p: p.clone(),
            a: &up * &up,
            b: (&one - p * p) / &two,
            c: &down * &down,
            e: (&one + p * p) / &two,
        })
    }
}

/// Closed-form position law
/// `C(2τ, τ+ξ) / 4^τ · (1+p)^{τ+ξ} (1-p)^{τ-ξ}` as an exact rational.
pub fn position_pmf_exact(xi: i64, tau: u64, p: &BigRational) -> Result<BigRational> {
    if tau == 0 {
        return Err(Error::ZeroTau);
    }
    if p.abs() > BigRational::one() {
        return Err(Error::InvalidMomentum);
    }
    if xi.unsigned_abs() > tau {
        return Ok(BigRational::zero());
    }
    let one = BigRational::one();
    let up = (tau as i64 + xi) as u64;
    let down = (tau as i64 - xi) as u64;
    let coeff = BigRational::new(big_choose(2 * tau, up), BigInt::from(4u8).pow(tau as u32));
    Ok(coeff * pow_rational(&(&one + p), up) * pow_rational(&(&one - p), down))
}

fn pow_rational(base: &BigRational, exp: u64) -> BigRational {
    let mut out = BigRational::one();
    let mut sq = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            out *= &sq;
        }
        sq = &sq * &sq;
        e >>= 1;
    }
    out
}

/// Support of the cumulated energy at a site: `|ξ|, |ξ|+2, …`.
pub fn site_energy_support(point: SitePoint) -> impl Iterator<Item = u64> {
    let lo = point.xi.unsigned_abs();
    let steps = (point.tau - lo) / 2;
    (0..=steps).map(move |k| lo + 2 * k)
}

/// Closed-form energy law at a site,
/// `2^{τ-σ} C(τ, (σ+|ξ|)/2) C(τ-(σ+|ξ|)/2, τ-σ) / C(2τ, τ+|ξ|)`,
/// independent of the momentum propensity.
pub fn site_energy_pmf_exact(sigma: u64, point: SitePoint) -> BigRational {
    let xi = point.xi.unsigned_abs();
    let tau = point.tau;
    if sigma < xi || sigma > tau || !(sigma - xi).is_multiple_of(2) {
        return BigRational::zero();
    }
    let half = (sigma + xi) / 2;
    let numer = BigInt::from(2u8).pow((tau - sigma) as u32)
        * big_choose(tau, half)
        * big_choose(tau - half, tau - sigma);
    BigRational::new(numer, big_choose(2 * tau, tau + xi))
}

/// Exact mean of the site energy law, `(ξ² + τ² - τ) / (2τ - 1)`.
pub fn site_energy_mean_exact(point: SitePoint) -> Result<BigRational> {
    if point.tau == 0 {
        return Err(Error::ZeroTau);
    }
    let xi = BigInt::from(point.xi);
    let tau = BigInt::from(point.tau);
    let num = &xi * &xi + &tau * &tau - &tau;
    Ok(BigRational::new(num, 2 * &tau - 1))
}

/// Exact variance of the site energy law,
/// `2 (ξ² - τ²)(ξ² - (τ-1)²) / ((2τ-1)² (2τ-3))`.
pub fn site_energy_variance_exact(point: SitePoint) -> Result<BigRational> {
    if point.tau < 2 {
        return Err(Error::TauTooSmallForVariance);
    }
    let xi2 = BigInt::from(point.xi) * BigInt::from(point.xi);
    let tau = BigInt::from(point.tau);
    let tm1 = &tau - 1;
    let num = 2 * (&xi2 - &tau * &tau) * (&xi2 - &tm1 * &tm1);
    let odd = 2 * &tau - BigInt::one();
    let den = &odd * &odd * (2 * &tau - 3);
    Ok(BigRational::new(num, den))
}

/// Exact uniform-ensemble probability, `1/(2τ+1)` at every site.
pub fn free_ensemble_probability_exact(tau: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2 * tau + 1))
}

/// Census of all `3^τ` step sequences, grouped by `(endpoint, rest count)`.
/// Everything else derives from this table.
fn literal_path_census(tau: u64) -> Result<BTreeMap<(i64, u64), u64>> {
    if tau > MAX_LITERAL_TAU {
        return Err(Error::EnumerationTooLarge);
    }
    let mut census: BTreeMap<(i64, u64), u64> = BTreeMap::new();
    let mut digits = vec![0u8; tau as usize];
    loop {
        let mut xi = 0i64;
        let mut rests = 0u64;
        for &d in &digits {
            match d {
                0 => xi += 1,
                1 => rests += 1,
                _ => xi -= 1,
            }
        }
        *census.entry((xi, rests)).or_insert(0) += 1;
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(census);
            }
            digits[i] += 1;
            if digits[i] < 3 {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn census_weight(law: &RationalLaw, tau: u64, xi: i64, rests: u64, count: u64) -> BigRational {
    // n_a - n_c = xi, n_a + n_c = tau - rests.
    let moving = tau - rests;
    let n_a = (moving as i64 + xi) as u64 / 2;
    let n_c = moving - n_a;
    BigRational::from(BigInt::from(count))
        * pow_rational(&law.a, n_a)
        * pow_rational(&law.b, rests)
        * pow_rational(&law.c, n_c)
}

/// Exhaustively walks all `3^τ` paths and returns the exact site
/// distribution.
pub fn enumerate_site_distribution(
    tau: u64,
    p: &BigRational,
) -> Result<BTreeMap<i64, BigRational>> {
    let law = RationalLaw::from_momentum(p)?;
    let census = literal_path_census(tau)?;
    let mut out: BTreeMap<i64, BigRational> = BTreeMap::new();
    for (&(xi, rests), &count) in &census {
        let w = census_weight(&law, tau, xi, rests, count);
        out.entry(xi)
            .and_modify(|v| *v += &w)
            .or_insert(w);
    }
    Ok(out)
}

/// Conditional law of the cumulated energy given arrival at a site, from
/// the literal path walk. Empty for unreachable sites.
pub fn enumerate_energy_at_site(
    point: SitePoint,
    p: &BigRational,
) -> Result<BTreeMap<u64, BigRational>> {
    let law = RationalLaw::from_momentum(p)?;
    let census = literal_path_census(point.tau)?;
    let mut by_sigma: BTreeMap<u64, BigRational> = BTreeMap::new();
    let mut total = BigRational::zero();
    for (&(xi, rests), &count) in &census {
        if xi != point.xi {
            continue;
        }
        let w = census_weight(&law, point.tau, xi, rests, count);
        total += &w;
        let sigma = point.tau - rests;
        by_sigma
            .entry(sigma)
            .and_modify(|v| *v += &w)
            .or_insert(w);
    }
    if total.is_zero() {
        return Ok(BTreeMap::new());
    }
    Ok(by_sigma
        .into_iter()
        .map(|(sigma, w)| (sigma, w / &total))
        .collect())
}

/// Downward-move counts compatible with reaching `xi` in `tau` ticks;
/// every count in the range keeps all binomial arguments nonnegative.
pub fn downward_move_range(xi: i64, tau: u64) -> RangeInclusive<u64> {
    let lo = (-xi).max(0) as u64;
    let hi = ((tau as i64 - xi) / 2) as u64;
    lo..=hi
}

/// Site distribution by composition counting:
/// `ρ(ξ) = Σ_{n_c} C(τ, n_c+ξ) C(τ-n_c-ξ, τ-2n_c-ξ) a^{n_a} b^{n_b} c^{n_c}`.
pub fn site_distribution_by_composition(
    tau: u64,
    p: &BigRational,
) -> Result<BTreeMap<i64, BigRational>> {
    if tau > MAX_COMPOSITION_TAU {
        return Err(Error::EnumerationTooLarge);
    }
    if tau == 0 {
        return Err(Error::ZeroTau);
    }
    let law = RationalLaw::from_momentum(p)?;
    let mut out = BTreeMap::new();
    for xi in -(tau as i64)..=(tau as i64) {
        let mut mass = BigRational::zero();
        for n_c in downward_move_range(xi, tau) {
            let n_a = (n_c as i64 + xi) as u64;
            let n_b = tau - n_a - n_c;
            let paths = big_choose(tau, n_a) * big_choose(tau - n_a, n_b);
            mass += BigRational::from(paths)
                * pow_rational(&law.a, n_a)
                * pow_rational(&law.b, n_b)
                * pow_rational(&law.c, n_c);
        }
        out.insert(xi, mass);
    }
    Ok(out)
}

/// Conditional energy law at a site by composition counting.
pub fn energy_at_site_by_composition(
    point: SitePoint,
    p: &BigRational,
) -> Result<BTreeMap<u64, BigRational>> {
    if point.tau > MAX_COMPOSITION_TAU {
        return Err(Error::EnumerationTooLarge);
    }
    let law = RationalLaw::from_momentum(p)?;
    let mut by_sigma: BTreeMap<u64, BigRational> = BTreeMap::new();
    let mut total = BigRational::zero();
    for n_c in downward_move_range(point.xi, point.tau) {
        let n_a = (n_c as i64 + point.xi) as u64;
        let n_b = point.tau - n_a - n_c;
        let paths = big_choose(point.tau, n_a) * big_choose(point.tau - n_a, n_b);
        let w = BigRational::from(paths)
            * pow_rational(&law.a, n_a)
            * pow_rational(&law.b, n_b)
            * pow_rational(&law.c, n_c);
        total += &w;
        by_sigma
            .entry(n_a + n_c)
            .and_modify(|v| *v += &w)
            .or_insert(w);
    }
    if total.is_zero() {
        return Ok(BTreeMap::new());
    }
    Ok(by_sigma
        .into_iter()
        .map(|(sigma, w)| (sigma, w / &total))
        .collect())
}

/// Averages the exact position law over the uniform momentum density via
/// Beta-function values:
/// `P(ξ) = C(2τ, τ+ξ) · (τ+ξ)! (τ-ξ)! / (2τ+1)!`, which collapses to
/// `1/(2τ+1)` for every site.
pub fn uniform_momentum_average(tau: u64) -> Result<BTreeMap<i64, BigRational>> {
    if tau == 0 {
        return Err(Error::ZeroTau);
    }
    if tau > MAX_COMPOSITION_TAU {
        return Err(Error::EnumerationTooLarge);
    }
    let mut out = BTreeMap::new();
    for xi in -(tau as i64)..=(tau as i64) {
        let up = (tau as i64 + xi) as u64;
        let down = (tau as i64 - xi) as u64;
        // Exact value of (1/2)∫ C(2τ,τ+ξ) 2^{-2τ} (1+p)^{τ+ξ}(1-p)^{τ-ξ} dp:
        // substituting z = (1+p)/2 yields the Beta integral B(τ+ξ+1, τ-ξ+1).
        let beta = BigRational::new(
            factorial(up) * factorial(down),
            factorial(2 * tau + 1),
        );
        out.insert(xi, BigRational::from(big_choose(2 * tau, up)) * beta);
    }
    Ok(out)
}

fn factorial(n: u64) -> BigInt {
    let mut out = BigInt::one();
    for i in 2..=n {
        out *= BigInt::from(i);
    }
    out
}

/// Closed-form first-return law,
/// `P(n) = 2 b^{2n} (n/3 - 4/9 + (13/9)(1/4)^n)`.
pub fn first_return_pmf_exact(n: u64, p: &BigRational) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::ZeroHorizon);
    }
    let law = RationalLaw::from_momentum(p)?;
    let b2n = pow_rational(&law.b, 2 * n);
    let quarter_n = pow_rational(&ratio(1, 4), n);
    let bracket = BigRational::new(BigInt::from(n), BigInt::from(3u8)) - ratio(4, 9)
        + ratio(13, 9) * quarter_n;
    Ok(ratio(2, 1) * b2n * bracket)
}

/// First-return probabilities `P(1)..P(max_n)` by exact dynamic
/// programming over paths that leave the origin at the first tick and
/// avoid it strictly before `2n`.
pub fn enumerate_first_returns(max_n: u64, p: &BigRational) -> Result<Vec<BigRational>> {
    let law = RationalLaw::from_momentum(p)?;
    if max_n == 0 {
        return Ok(Vec::new());
    }
    let horizon = (2 * max_n - 1) as usize;
    let width = 2 * horizon + 1;
    let off = horizon as i64;
    // alive[x + off] = mass at x after t ticks with no origin visit in 1..=t.
    let mut alive = vec![BigRational::zero(); width];
    alive[(1 + off) as usize] = law.a.clone();
    alive[(-1 + off) as usize] = law.c.clone();
    let mut out = Vec::with_capacity(max_n as usize);
    for t in 2..=(2 * max_n) {
        if t % 2 == 0 {
            let ret = &law.c * &alive[(1 + off) as usize] + &law.a * &alive[(-1 + off) as usize];
            out.push(ret);
        }
        let mut next = vec![BigRational::zero(); width];
        for x in -(t as i64)..=(t as i64) {
            if x == 0 || x.unsigned_abs() > horizon as u64 {
                continue;
            }
            let mut mass = &law.b * &alive[(x + off) as usize];
            if x - 1 != 0 && (x - 1).unsigned_abs() <= horizon as u64 {
                mass += &law.a * &alive[(x - 1 + off) as usize];
            }
            if x + 1 != 0 && (x + 1).unsigned_abs() <= horizon as u64 {
                mass += &law.c * &alive[(x + 1 + off) as usize];
            }
            next[(x + off) as usize] = mass;
        }
        alive = next;
    }
    Ok(out)
}

/// Literal-path cross-check of [`enumerate_first_returns`]; capped by the
/// `3^{2n}` path count.
pub fn enumerate_first_returns_literal(max_n: u64, p: &BigRational) -> Result<Vec<BigRational>> {
    if 2 * max_n > MAX_LITERAL_TAU {
        return Err(Error::EnumerationTooLarge);
    }
    let law = RationalLaw::from_momentum(p)?;
    let mut out = Vec::new();
    for n in 1..=max_n {
        let len = (2 * n) as usize;
        let mut total = BigRational::zero();
        let mut digits = vec![0u8; len];
        'paths: loop {
            let mut x = 0i64;
            let mut ok = true;
            for (t, &d) in digits.iter().enumerate() {
                x += match d {
                    0 => 1,
                    1 => 0,
                    _ => -1,
                };
                if x == 0 && t + 1 < len {
                    ok = false;
                    break;
                }
                if x != 0 && t + 1 == len {
                    ok = false;
                    break;
                }
            }
            if ok && digits[0] != 1 {
                let mut w = BigRational::one();
                for &d in &digits {
                    w *= match d {
                        0 => &law.a,
                        1 => &law.b,
                        _ => &law.c,
                    };
                }
                total += w;
            }
            let mut i = 0;
            loop {
                if i == len {
                    break 'paths;
                }
                digits[i] += 1;
                if digits[i] < 3 {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
        out.push(total);
    }
    Ok(out)
}
