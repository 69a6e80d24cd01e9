use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::harness::{compute_invalid_rate, DecisionAccounting};
use crate::rating::RatingState;

use super::MatchRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRow {
    pub agent_id: String,
    pub mu: f64,
    pub phi: f64,
    pub sigma: f64,
    pub frozen: bool,
}

impl RatingRow {
    pub fn new(agent_id: &str, r: &RatingState) -> Self {
        RatingRow {
            agent_id: agent_id.to_string(),
            mu: r.mu,
            phi: r.phi,
            sigma: r.sigma,
            frozen: r.frozen,
        }
    }

    pub fn state(&self) -> RatingState {
        RatingState {
            mu: self.mu,
            phi: self.phi,
            sigma: self.sigma,
            frozen: self.frozen,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentMetrics {
    pub agent_id: String,
    pub games: u64,
    pub score: f64,
    /// Pooled `invalid_attempts / action_attempts` over all its games.
    pub invalid_rate: Option<f64>,
    pub mean_tool_calls: f64,
    pub mean_query_calls: f64,
    pub accounting: DecisionAccounting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ratings: Vec<RatingRow>,
    /// Row and column order of the matrices.
    pub agents: Vec<String>,
    /// `head_to_head[i][j]`: score of i against j per game, draws as 0.5.
    pub head_to_head: Vec<Vec<Option<f64>>>,
    pub pair_games: Vec<Vec<u64>>,
    pub per_agent: Vec<AgentMetrics>,
}

impl MetricsReport {
    pub fn populated_pairs(&self) -> usize {
        let n = self.agents.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.pair_games[i][j] > 0)
            .count()
    }
}

/// Head-to-head matrix, invalid rates and tool calls from `records`, next to
/// the rating table the tournament produced.
pub fn aggregate_metrics(agents: &[String], records: &[MatchRecord], ratings: Vec<RatingRow>) -> MetricsReport {
    let n = agents.len();
    let index = |id: &str| agents.iter().position(|a| a == id);
    let mut score = vec![vec![0.0; n]; n];
    let mut games = vec![vec![0u64; n]; n];
    let mut acct = vec![DecisionAccounting::default(); n];
    let mut totals = vec![(0u64, 0.0f64); n];
    for r in records {
        let seats = [index(&r.agents[0]), index(&r.agents[1])];
        for s in 0..2 {
            if let Some(i) = seats[s] {
                acct[i].merge(&r.accounting[s]);
                totals[i].0 += 1;
                totals[i].1 += r.scores[s];
            }
        }
        if let [Some(a), Some(b)] = seats {
            if a != b {
                score[a][b] += r.scores[0];
                score[b][a] += r.scores[1];
                games[a][b] += 1;
                games[b][a] += 1;
            }
        }
    }
    let head_to_head = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (games[i][j] > 0).then(|| score[i][j] / games[i][j] as f64))
                .collect()
        })
        .collect();
    let per_agent = (0..n)
        .map(|i| {
            let g = totals[i].0;
            let per_game = |x: u64| if g == 0 { 0.0 } else { x as f64 / g as f64 };
            AgentMetrics {
                agent_id: agents[i].clone(),
                games: g,
                score: totals[i].1,
                invalid_rate: compute_invalid_rate(&acct[i]),
                mean_tool_calls: per_game(acct[i].tool_calls),
                mean_query_calls: per_game(acct[i].query_calls),
                accounting: acct[i],
            }
        })
        .collect();
    MetricsReport {
        ratings,
        agents: agents.to_vec(),
        head_to_head,
        pair_games: games,
        per_agent,
    }
}

/// Plain-text tables, ratings sorted by mu.
pub fn render_report(m: &MetricsReport) -> String {
    let mut out = String::new();
    let mut order: Vec<usize> = (0..m.ratings.len()).collect();
    order.sort_by(|&a, &b| m.ratings[b].mu.total_cmp(&m.ratings[a].mu));
    let _ = writeln!(
        out,
        "{:<4} {:<24} {:>8} {:>7} {:>6} {:>8} {:>8} {:>10}",
        "rank", "agent", "mu", "phi", "games", "score", "invalid", "tools/game"
    );
    for (rank, &i) in order.iter().enumerate() {
        let r = &m.ratings[i];
        let a = m.per_agent.iter().find(|a| a.agent_id == r.agent_id);
        let frozen = if r.frozen { "*" } else { "" };
        let _ = writeln!(
            out,
            "{:<4} {:<24} {:>8.1} {:>7.1} {:>6} {:>8.1} {:>8} {:>10.1}",
            rank + 1,
            format!("{}{frozen}", r.agent_id),
            r.mu,
            r.phi,
            a.map_or(0, |a| a.games),
            a.map_or(0.0, |a| a.score),
            a.and_then(|a| a.invalid_rate).map_or("-".into(), |v| format!("{v:.4}")),
            a.map_or(0.0, |a| a.mean_tool_calls),
        );
    }
    let _ = writeln!(out, "\nhead-to-head (row score vs column)");
    let _ = write!(out, "{:<4}", "");
    for j in 0..m.agents.len() {
        let _ = write!(out, " {:>5}", j + 1);
    }
    let _ = writeln!(out);
    for (i, row) in m.head_to_head.iter().enumerate() {
        let _ = write!(out, "{:<4}", i + 1);
        for cell in row {
            match cell {
                Some(v) => {
                    let _ = write!(out, " {v:>5.2}");
                }
                None => {
                    let _ = write!(out, " {:>5}", "-");
                }
            }
        }
        let _ = writeln!(out, "  {}", m.agents[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::WinReason;

    fn rec(a: &str, b: &str, winner: Option<usize>) -> MatchRecord {
        let scores = match winner {
            Some(0) => [1.0, 0.0],
            Some(_) => [0.0, 1.0],
            None => [0.5, 0.5],
        };
        MatchRecord {
            game_id: "g".into(),
            period: 1,
            agents: [a.into(), b.into()],
            decks: ["d".into(), "d".into()],
            seed: 0,
            scores,
            winner,
            reason: WinReason::AllPrizes,
            accounting: [DecisionAccounting {
                decisions: 4,
                action_attempts: 5,
                invalid_attempts: 1,
                query_calls: 2,
                tool_calls: 7,
                fallbacks: 0,
            }; 2],
            turns: 10,
            final_hash: "0".into(),
            log_path: None,
        }
    }

    #[test]
    fn three_of_five() {
        let ids = vec!["i".to_string(), "j".to_string()];
        let recs = vec![
            rec("i", "j", Some(0)),
            rec("j", "i", Some(1)),
            rec("i", "j", Some(0)),
            rec("j", "i", Some(0)),
            rec("i", "j", Some(1)),
        ];
        let m = aggregate_metrics(&ids, &recs, vec![]);
        assert_eq!(m.head_to_head[0][1], Some(0.6));
        assert_eq!(m.head_to_head[1][0], Some(0.4));
        assert_eq!(m.head_to_head[0][0], None);
        assert_eq!(m.per_agent[0].invalid_rate, Some(0.2));
        assert_eq!(m.per_agent[0].mean_tool_calls, 7.0);
        assert_eq!(m.populated_pairs(), 1);
    }

    #[test]
    fn draws_count_half() {
        let ids = vec!["i".to_string(), "j".to_string()];
        let m = aggregate_metrics(&ids, &[rec("i", "j", None), rec("i", "j", Some(0))], vec![]);
        assert_eq!(m.head_to_head[0][1], Some(0.75));
        assert_eq!(m.head_to_head[1][0], Some(0.25));
    }

    #[test]
    fn report_lists_every_rating() {
        let ids = vec!["i".to_string(), "j".to_string()];
        let ratings = vec![
            RatingRow::new("i", &RatingState::default()),
            RatingRow::new("j", &RatingState::new(1600.0, 80.0, 0.06)),
        ];
        let text = render_report(&aggregate_metrics(&ids, &[rec("i", "j", Some(1))], ratings));
        let j = text.find(" j ").unwrap();
        let i = text.find(" i ").unwrap();
        assert!(j < i, "{text}");
    }
}
