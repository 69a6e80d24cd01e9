//! Glicko-2 ratings.
//!
//! Ratings are kept on the display scale (1500 / 350) and converted to the
//! internal scale for each update.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCALE: f64 = 173.7178;
pub const DEFAULT_TAU: f64 = 0.5;
pub const EPSILON: f64 = 1e-6;
const MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatingState {
    pub mu: f64,
    pub phi: f64,
    pub sigma: f64,
    #[serde(default)]
    pub frozen: bool,
}

impl Default for RatingState {
    fn default() -> Self {
        RatingState {
            mu: 1500.0,
            phi: 350.0,
            sigma: 0.06,
            frozen: false,
        }
    }
}

impl RatingState {
    pub fn new(mu: f64, phi: f64, sigma: f64) -> Self {
        RatingState {
            mu,
            phi,
            sigma,
            frozen: false,
        }
    }

    pub fn frozen(mut self) -> Self {
        self.frozen = true;
        self
    }

    fn internal(&self) -> (f64, f64) {
        ((self.mu - 1500.0) / SCALE, self.phi / SCALE)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatingError {
    #[error("volatility iteration did not converge")]
    NoConvergence,
}

fn g(phi: f64) -> f64 {
    1.0 / (1.0 + 3.0 * phi * phi / (std::f64::consts::PI * std::f64::consts::PI)).sqrt()
}

fn e(mu: f64, mu_j: f64, phi_j: f64) -> f64 {
    1.0 / (1.0 + (-g(phi_j) * (mu - mu_j)).exp())
}

/// Probability that `player` beats `opp`.
pub fn expected_score(player: &RatingState, opp: &RatingState) -> f64 {
    let (mu, _) = player.internal();
    let (mu_j, phi_j) = opp.internal();
    e(mu, mu_j, phi_j)
}

/// One rating period for `player`. Frozen players come back unchanged.
pub fn update_period(
    player: &RatingState,
    results: &[(RatingState, f64)],
    tau: f64,
) -> Result<RatingState, RatingError> {
    if player.frozen {
        return Ok(*player);
    }
    let (mu, phi) = player.internal();
    let sigma = player.sigma;
    if results.is_empty() {
        let phi_star = (phi * phi + sigma * sigma).sqrt();
        return Ok(RatingState {
            phi: phi_star * SCALE,
            ..*player
        });
    }
    let mut v_inv = 0.0;
    let mut delta_sum = 0.0;
    for (opp, s) in results {
        let (mu_j, phi_j) = opp.internal();
        let gj = g(phi_j);
        let ej = e(mu, mu_j, phi_j);
        v_inv += gj * gj * ej * (1.0 - ej);
        delta_sum += gj * (s - ej);
    }
    let v = 1.0 / v_inv;
    let delta = v * delta_sum;

    let a = (sigma * sigma).ln();
    let f = |x: f64| {
        let ex = x.exp();
        let d = phi * phi + v + ex;
        ex * (delta * delta - phi * phi - v - ex) / (2.0 * d * d) - (x - a) / (tau * tau)
    };
    let mut big_a = a;
    let mut big_b = if delta * delta > phi * phi + v {
        (delta * delta - phi * phi - v).ln()
    } else {
        let mut k = 1.0;
        while f(a - k * tau) < 0.0 {
            k += 1.0;
            if k > MAX_ITERATIONS as f64 {
                return Err(RatingError::NoConvergence);
            }
        }
        a - k * tau
    };
    let mut fa = f(big_a);
    let mut fb = f(big_b);
    let mut iterations = 0;
    while (big_b - big_a).abs() > EPSILON {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(RatingError::NoConvergence);
        }
        let c = big_a + (big_a - big_b) * fa / (fb - fa);
        let fc = f(c);
        if fc * fb <= 0.0 {
            big_a = big_b;
            fa = fb;
        } else {
            fa /= 2.0;
        }
        big_b = c;
        fb = fc;
    }
    let sigma_new = (big_a / 2.0).exp();
    let phi_star = (phi * phi + sigma_new * sigma_new).sqrt();
    let phi_new = 1.0 / (1.0 / (phi_star * phi_star) + 1.0 / v).sqrt();
    let mu_new = mu + phi_new * phi_new * delta_sum;
    Ok(RatingState {
        mu: mu_new * SCALE + 1500.0,
        phi: phi_new * SCALE,
        sigma: sigma_new,
        frozen: false,
    })
}

/// Applies one period to every player simultaneously. `games` holds
/// `(a, b, score_of_a)` index triples; opponents are read at their
/// pre-period ratings.
pub fn rate_period(
    ratings: &[RatingState],
    games: &[(usize, usize, f64)],
    tau: f64,
) -> Result<Vec<RatingState>, RatingError> {
    let mut per: Vec<Vec<(RatingState, f64)>> = vec![Vec::new(); ratings.len()];
    for &(a, b, s) in games {
        per[a].push((ratings[b], s));
        per[b].push((ratings[a], 1.0 - s));
    }
    ratings
        .iter()
        .zip(&per)
        .map(|(r, res)| update_period(r, res, tau))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_ratings_are_even() {
        let a = RatingState::default();
        assert_eq!(expected_score(&a, &a), 0.5);
    }

    #[test]
    fn empty_period_inflates_deviation_only() {
        let p = RatingState::new(1600.0, 100.0, 0.06);
        let q = update_period(&p, &[], DEFAULT_TAU).unwrap();
        assert_eq!(q.mu, p.mu);
        let phi = 100.0 / SCALE;
        assert!((q.phi - (phi * phi + 0.06f64 * 0.06).sqrt() * SCALE).abs() < 1e-9);
    }

    #[test]
    fn frozen_never_moves() {
        let p = RatingState::new(1700.0, 50.0, 0.06).frozen();
        let q = update_period(&p, &[(RatingState::default(), 0.0)], DEFAULT_TAU).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn symmetric_players_stay_close() {
        let mut r = vec![RatingState::default(); 2];
        for _ in 0..2 {
            r = rate_period(&r, &[(0, 1, 1.0), (0, 1, 0.0)], DEFAULT_TAU).unwrap();
        }
        assert!((r[0].mu - r[1].mu).abs() < 1.0);
    }

    #[test]
    fn split_results_mirror_each_other() {
        let fresh = vec![RatingState::default(); 2];
        let a_first = rate_period(&fresh, &[(0, 1, 1.0)], DEFAULT_TAU).unwrap();
        let a_first = rate_period(&a_first, &[(0, 1, 0.0)], DEFAULT_TAU).unwrap();
        let b_first = rate_period(&fresh, &[(0, 1, 0.0)], DEFAULT_TAU).unwrap();
        let b_first = rate_period(&b_first, &[(0, 1, 1.0)], DEFAULT_TAU).unwrap();
        assert!((a_first[0].mu - b_first[1].mu).abs() < 1e-9);
        assert!((a_first[0].mu + a_first[1].mu - 3000.0).abs() < 1e-9);
    }

    fn rating() -> impl Strategy<Value = RatingState> {
        (1000.0..2000.0f64, 30.0..350.0f64, 0.03..0.1f64).prop_map(|(m, p, s)| RatingState::new(m, p, s))
    }

    proptest! {
        #[test]
        fn expected_scores_complement(a in rating(), b in rating()) {
            let b = RatingState { phi: a.phi, ..b };
            let sum = expected_score(&a, &b) + expected_score(&b, &a);
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn win_raises_and_loss_lowers(a in rating(), b in rating()) {
            let win = update_period(&a, &[(b, 1.0)], DEFAULT_TAU).unwrap();
            let loss = update_period(&a, &[(b, 0.0)], DEFAULT_TAU).unwrap();
            prop_assert!(win.mu >= a.mu);
            prop_assert!(loss.mu <= a.mu);
        }

        #[test]
        fn games_shrink_deviation(a in rating(), b in rating(), s in prop::sample::select(vec![0.0, 0.5, 1.0])) {
            let q = update_period(&a, &[(b, s)], DEFAULT_TAU).unwrap();
            let inflated = update_period(&a, &[], DEFAULT_TAU).unwrap();
            prop_assert!(q.phi < inflated.phi);
        }
    }
}
