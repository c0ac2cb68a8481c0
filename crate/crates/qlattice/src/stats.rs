//! Goodness-of-fit machinery: total-variation distance, pooled chi-square
//! tests, standardized residuals, correlation, and fringe-visibility fits.

use std::collections::BTreeMap;

use qlattice_core::histogram::EnsembleHistogram;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("expected probabilities must cover every site of the histogram domain")]
    SupportMismatch,
    #[error("expected probabilities sum to {0}, not 1 within 1e-6")]
    NotNormalized(f64),
    #[error("histogram is empty")]
    EmptyHistogram,
}

/// Acceptance thresholds applied by [`compare`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[derive(Default)]
pub struct CompareThresholds {
    /// Maximum admissible total-variation distance, if gated.
    pub tv: Option<f64>,
    /// Significance level below which the pooled chi-square rejects, if
    /// gated.
    pub chi_square_alpha: Option<f64>,
}


/// Result of comparing an empirical histogram against a probability law.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tv_distance: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
    pub max_std_residual: f64,
    /// How far the raw law was from summing to one over the window before
    /// normalization (see [`normalized_law`]).
    pub normalization_defect: f64,
    pub thresholds: CompareThresholds,
    pub pass: bool,
}

fn chi_square_p_value(dof: usize, stat: f64) -> f64 {
    if stat <= 0.0 {
        1.0
    } else {
        gamma_ur(dof as f64 / 2.0, stat / 2.0)
    }
}

/// Evaluates a raw law over every site of the histogram's domain and
/// normalizes it, returning the per-site probabilities and the
/// normalization defect of the raw law.
pub fn normalized_law(
    hist: &EnsembleHistogram,
    law: impl Fn(i64) -> f64,
) -> (BTreeMap<i64, f64>, f64) {
    let mut expected = BTreeMap::new();
    let mut total = 0.0;
    for site in hist.domain().sites() {
        let value = law(site).max(0.0);
        total += value;
        expected.insert(site, value);
    }
    for value in expected.values_mut() {
        *value /= total;
    }
    (expected, total - 1.0)
}

/// Compares empirical frequencies against expected probabilities over the
/// histogram's domain: total-variation distance, chi-square with bins
/// pooled until the expected count reaches 5, and the largest
/// standardized residual over unpooled bins.
pub fn compare(
    hist: &EnsembleHistogram,
    expected: &BTreeMap<i64, f64>,
    thresholds: CompareThresholds,
) -> Result<ComparisonReport, StatsError> {
    compare_with_defect(hist, expected, thresholds, 0.0)
}

/// [`compare`] recording the normalization defect of the raw law.
pub fn compare_with_defect(
    hist: &EnsembleHistogram,
    expected: &BTreeMap<i64, f64>,
    thresholds: CompareThresholds,
    normalization_defect: f64,
) -> Result<ComparisonReport, StatsError> {
    let n = hist.total();
    if n == 0 {
        return Err(StatsError::EmptyHistogram);
    }
    for site in hist.domain().sites() {
        if !expected.contains_key(&site) {
            return Err(StatsError::SupportMismatch);
        }
    }
    let law_total: f64 = expected.values().sum();
    if (law_total - 1.0).abs() > 1e-6 {
        return Err(StatsError::NotNormalized(law_total));
    }

    let n_f = n as f64;
    let mut tv = 0.0;
    let mut max_residual = 0.0f64;
    for (&site, &prob) in expected {
        let freq = hist.count(site) as f64 / n_f;
        tv += (freq - prob).abs();
        if prob > 0.0 && prob < 1.0 {
            let residual =
                (hist.count(site) as f64 - n_f * prob) / (n_f * prob * (1.0 - prob)).sqrt();
            max_residual = max_residual.max(residual.abs());
        }
    }
    tv *= 0.5;

    // Pool adjacent sites until each bin expects at least 5 counts.
    let mut pooled: Vec<(f64, f64)> = Vec::new(); // (observed, expected counts)
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    for (&site, &prob) in expected {
        acc_obs += hist.count(site) as f64;
        acc_exp += prob * n_f;
        if acc_exp >= 5.0 {
            pooled.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if acc_exp > 0.0 {
        if let Some(last) = pooled.last_mut() {
            last.0 += acc_obs;
            last.1 += acc_exp;
        } else {
            pooled.push((acc_obs, acc_exp));
        }
    }
    let chi_square: f64 = pooled
        .iter()
        .map(|&(obs, exp)| (obs - exp) * (obs - exp) / exp)
        .sum();
    let dof = pooled.len().saturating_sub(1).max(1);
    let p_value = chi_square_p_value(dof, chi_square);

    let tv_ok = thresholds.tv.is_none_or(|bound| tv <= bound);
    let chi_ok = thresholds
        .chi_square_alpha
        .is_none_or(|alpha| p_value >= alpha);
    let pass = tv_ok && chi_ok;
    Ok(ComparisonReport {
        tv_distance: tv,
        chi_square,
        dof,
        p_value,
        max_std_residual: max_residual,
        normalization_defect,
        thresholds,
        pass,
    })
}

/// Two-sample chi-square homogeneity statistic over pooled bins; returns
/// `(statistic, dof, p_value)`.
pub fn two_sample_chi_square(a: &EnsembleHistogram, b: &EnsembleHistogram) -> (f64, usize, f64) {
    let mut sites: Vec<i64> = a.iter().map(|(s, _)| s).collect();
    sites.extend(b.iter().map(|(s, _)| s));
    sites.sort_unstable();
    sites.dedup();

    let n_a = a.total() as f64;
    let n_b = b.total() as f64;
    // Pool until both expected counts reach 5.
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut acc_a, mut acc_b) = (0.0, 0.0);
    for &site in &sites {
        acc_a += a.count(site) as f64;
        acc_b += b.count(site) as f64;
        let pooled_rate = (acc_a + acc_b) / (n_a + n_b);
        if pooled_rate * n_a >= 5.0 && pooled_rate * n_b >= 5.0 {
            bins.push((acc_a, acc_b));
            acc_a = 0.0;
            acc_b = 0.0;
        }
    }
    if (acc_a > 0.0 || acc_b > 0.0) && !bins.is_empty() {
        let last = bins.last_mut().unwrap();
        last.0 += acc_a;
        last.1 += acc_b;
    }
    let mut stat = 0.0;
    for &(obs_a, obs_b) in &bins {
        let rate = (obs_a + obs_b) / (n_a + n_b);
        let (exp_a, exp_b) = (rate * n_a, rate * n_b);
        stat += (obs_a - exp_a) * (obs_a - exp_a) / exp_a;
        stat += (obs_b - exp_b) * (obs_b - exp_b) / exp_b;
    }
    let dof = bins.len().saturating_sub(1).max(1);
    (stat, dof, chi_square_p_value(dof, stat))
}

/// Sample Pearson correlation.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    num / (vx.sqrt() * vy.sqrt())
}

/// Least-squares fringe visibility: projects `2τ·ν(ξ) - 1` onto
/// `cos(πδξ/τ)` over the window `|ξ| ≤ window`.
pub fn fit_fringe_visibility(
    hist: &EnsembleHistogram,
    delta: u64,
    window: i64,
) -> f64 {
    let tau = hist.n_steps as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for xi in -window..=window {
        let c = (std::f64::consts::PI * delta as f64 * xi as f64 / tau).cos();
        num += (2.0 * tau * hist.frequency(xi) - 1.0) * c;
        den += c * c;
    }
    num / den
}

/// Sums histogram frequencies and law probabilities over fixed-width bins
/// covering `[lo, hi)`; returns parallel vectors of binned values.
pub fn pooled_frequencies(
    hist: &EnsembleHistogram,
    law: impl Fn(i64) -> f64,
    lo: i64,
    hi: i64,
    width: u64,
) -> (Vec<f64>, Vec<f64>) {
    let mut emp = Vec::new();
    let mut the = Vec::new();
    let mut xi = lo;
    while xi + width as i64 <= hi {
        let mut e = 0.0;
        let mut l = 0.0;
        for x in xi..xi + width as i64 {
            e += hist.frequency(x);
            l += law(x);
        }
        emp.push(e);
        the.push(l);
        xi += width as i64;
    }
    (emp, the)
}

/// Total-variation distance between two nonnegative vectors after
/// normalizing each to unit mass.
pub fn tv_between(a: &[f64], b: &[f64]) -> f64 {
    let ta: f64 = a.iter().sum();
    let tb: f64 = b.iter().sum();
    0.5 * a
        .iter()
        .zip(b)
        .map(|(x, y)| (x / ta - y / tb).abs())
        .sum::<f64>()
}
