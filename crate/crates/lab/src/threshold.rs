//! Threshold location: a monotone logistic fit to P(dismantlable | c) per
//! (d, n, domain) group, with a bootstrap confidence interval.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::sweep::TrialResult;

#[derive(Debug, thiserror::Error)]
pub enum ThresholdError {
    #[error(
        "group d={d} n={n} {domain}: observed probabilities [{lo}, {hi}] do not bracket \
         target {target}"
    )]
    NoBracketing {
        d: usize,
        n: usize,
        domain: String,
        lo: f64,
        hi: f64,
        target: f64,
    },
    #[error("no usable results: {0}")]
    NoData(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub d: usize,
    pub n: usize,
    pub domain: String,
    pub target: f64,
    pub c_hat: f64,
    pub ci: (f64, f64),
    /// Logistic slope 1/s; steepening with n is the empirical signature of a
    /// sharpening threshold.
    pub slope: f64,
    /// (c, successes, trials) actually used by the fit.
    pub cells: Vec<(f64, usize, usize)>,
}

/// Binomial negative log-likelihood of a logistic curve
/// p(c) = 1 / (1 + exp(-(c - mu)/s)).
fn nll(cells: &[(f64, usize, usize)], mu: f64, s: f64) -> f64 {
    let mut total = 0.0;
    for &(c, k, m) in cells {
        let z = ((c - mu) / s).clamp(-35.0, 35.0);
        let p = 1.0 / (1.0 + (-z).exp());
        let p = p.clamp(1e-12, 1.0 - 1e-12);
        total -= k as f64 * p.ln() + (m - k) as f64 * (1.0 - p).ln();
    }
    total
}

/// Maximum-likelihood logistic fit by coordinate descent with shrinking
/// steps. Returns (mu, s).
fn fit_logistic(cells: &[(f64, usize, usize)]) -> (f64, f64) {
    let cmin = cells.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let cmax = cells.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let range = (cmax - cmin).max(1e-6);
    // init mu at the first empirical crossing of 1/2
    let mut mu = cells
        .iter()
        .find(|&&(_, k, m)| 2 * k >= m)
        .map(|c| c.0)
        .unwrap_or((cmin + cmax) / 2.0);
    let mut s = range / 8.0;
    let s_floor = range * 1e-3;
    let mut best = nll(cells, mu, s);
    let mut step_mu = range / 4.0;
    let mut step_s = 0.5; // multiplicative on s
    for _ in 0..200 {
        let mut improved = false;
        for trial in [mu - step_mu, mu + step_mu] {
            let v = nll(cells, trial, s);
            if v < best {
                best = v;
                mu = trial;
                improved = true;
            }
        }
        for trial in [s * (1.0 - step_s), s * (1.0 + step_s)] {
            let trial = trial.max(s_floor);
            let v = nll(cells, mu, trial);
            if v < best {
                best = v;
                s = trial;
                improved = true;
            }
        }
        if !improved {
            step_mu *= 0.5;
            step_s *= 0.5;
            if step_mu < range * 1e-6 && step_s < 1e-6 {
                break;
            }
        }
    }
    (mu, s)
}

fn crossing(mu: f64, s: f64, target: f64) -> f64 {
    mu + s * (target / (1.0 - target)).ln()
}

/// Fits one logistic curve per (d, n, domain) group of the results and
/// reports where it crosses `target`, with a 200-resample bootstrap
/// percentile interval. Only trials with a recorded c and dismantling
/// verdict participate.
pub fn estimate_threshold(
    results: &[TrialResult],
    target: f64,
    bootstrap: usize,
    seed: u64,
) -> Result<Vec<ThresholdEstimate>, ThresholdError> {
    assert!(target > 0.0 && target < 1.0, "target must be in (0,1)");
    type Key = (usize, usize, String);
    let mut groups: BTreeMap<Key, BTreeMap<u64, (f64, usize, usize)>> = BTreeMap::new();
    for tr in results {
        let (Some(c), Some(dis)) = (tr.c, tr.dismantlable) else {
            continue;
        };
        let key = (tr.d, tr.n, tr.domain.clone());
        let cell = groups
            .entry(key)
            .or_default()
            .entry(c.to_bits())
            .or_insert((c, 0, 0));
        cell.2 += 1;
        if dis {
            cell.1 += 1;
        }
    }
    if groups.is_empty() {
        return Err(ThresholdError::NoData(
            "no trials with both a c value and a dismantling verdict".into(),
        ));
    }

    let mut out = Vec::new();
    for ((d, n, domain), cells) in groups {
        let mut cells: Vec<(f64, usize, usize)> = cells.into_values().collect();
        cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let phats: Vec<f64> = cells.iter().map(|&(_, k, m)| k as f64 / m as f64).collect();
        let lo = phats.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = phats.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo > target || hi < target {
            return Err(ThresholdError::NoBracketing {
                d,
                n,
                domain,
                lo,
                hi,
                target,
            });
        }
        let (mu, s) = fit_logistic(&cells);
        let c_hat = crossing(mu, s, target);

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).rotate_left(17));
        let mut boots = Vec::with_capacity(bootstrap);
        for _ in 0..bootstrap {
            let resampled: Vec<(f64, usize, usize)> = cells
                .iter()
                .map(|&(c, k, m)| {
                    let p = k as f64 / m as f64;
                    let mut k2 = 0;
                    for _ in 0..m {
                        if rng.gen_range(0.0..1.0) < p {
                            k2 += 1;
                        }
                    }
                    (c, k2, m)
                })
                .collect();
            let (bmu, bs) = fit_logistic(&resampled);
            boots.push(crossing(bmu, bs, target));
        }
        boots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ci = if boots.is_empty() {
            (c_hat, c_hat)
        } else {
            let lo_idx = ((boots.len() as f64) * 0.025) as usize;
            let hi_idx = (((boots.len() as f64) * 0.975) as usize).min(boots.len() - 1);
            (boots[lo_idx], boots[hi_idx])
        };

        out.push(ThresholdEstimate {
            d,
            n,
            domain,
            target,
            c_hat,
            ci,
            slope: 1.0 / s,
            cells,
        });
    }
    Ok(out)
}
