mod common;

use common::{expected_oracle, glicko_oracle};
use duelkit::rating::{expected_score, rate_period, update_period, RatingState, DEFAULT_TAU};
use proptest::prelude::*;

#[test]
fn glickman_worked_example() {
    let games = [(1400.0, 30.0, 1.0), (1550.0, 100.0, 0.0), (1700.0, 300.0, 0.0)];
    let (mu, phi, sigma) = glicko_oracle(1500.0, 200.0, 0.06, &games, 0.5);
    // Published values for this example.
    assert!((mu - 1464.06).abs() < 0.05, "{mu}");
    assert!((phi - 151.52).abs() < 0.05, "{phi}");
    assert!((sigma - 0.05999).abs() < 1e-4, "{sigma}");
    let results: Vec<(RatingState, f64)> =
        games.iter().map(|&(r, rd, s)| (RatingState::new(r, rd, 0.06), s)).collect();
    let got = update_period(&RatingState::new(1500.0, 200.0, 0.06), &results, 0.5).unwrap();
    assert!((got.mu - mu).abs() < 0.05);
    assert!((got.phi - phi).abs() < 0.05);
    assert!((got.sigma - sigma).abs() < 1e-6);
}

#[test]
fn large_gap_expected_score() {
    let strong = RatingState::new(1500.0 + 617.0, 50.0, 0.06);
    let weak = RatingState::new(1500.0, 0.0, 0.06);
    let e = expected_score(&strong, &weak);
    assert!((e - 0.972).abs() <= 0.001, "{e}");
    assert!((e - expected_oracle(617.0, 0.0)).abs() < 1e-12);
}

fn state() -> impl Strategy<Value = RatingState> {
    (1000.0..2200.0f64, 30.0..350.0f64, 0.03..0.1f64).prop_map(|(m, p, s)| RatingState::new(m, p, s))
}

proptest! {
    #[test]
    fn update_matches_oracle(p in state(), opps in prop::collection::vec((state(), 0..3u8), 1..8)) {
        let results: Vec<(RatingState, f64)> = opps.iter().map(|(o, s)| (*o, *s as f64 / 2.0)).collect();
        let games: Vec<(f64, f64, f64)> = results.iter().map(|(o, s)| (o.mu, o.phi, *s)).collect();
        let (mu, phi, _) = glicko_oracle(p.mu, p.phi, p.sigma, &games, DEFAULT_TAU);
        let got = update_period(&p, &results, DEFAULT_TAU).unwrap();
        prop_assert!((got.mu - mu).abs() < 0.01, "{} vs {}", got.mu, mu);
        prop_assert!((got.phi - phi).abs() < 0.01);
    }

    #[test]
    fn expected_scores_are_complementary(a in state(), b in state()) {
        let x = expected_score(&a, &RatingState { phi: 0.0, ..b });
        let y = expected_score(&b, &RatingState { phi: 0.0, ..a });
        prop_assert!((x + y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn winning_never_lowers_rating(a in state(), b in state()) {
        let out = rate_period(&[a, b], &[(0, 1, 1.0)], DEFAULT_TAU).unwrap();
        prop_assert!(out[0].mu >= a.mu);
        prop_assert!(out[1].mu <= b.mu);
    }
}
