use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One scheduled game. `seats[0]` moves first in the seat sense (player 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// 1-based pairing cycle; each cycle is one rating period.
    pub cycle: u32,
    /// Participant indices with `pair.0 < pair.1`.
    pub pair: (usize, usize),
    pub seats: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("round robin needs at least 2 participants, got {0}")]
    TooFewParticipants(usize),
    #[error("games per pair must be at least 1")]
    NoGames,
}

/// Every unordered pair once per cycle, in lexicographic order, for `m`
/// cycles. The lower index sits in seat 0 on odd cycles and seat 1 on even
/// ones, so a pair splits seats `ceil(m/2)` / `floor(m/2)`.
pub fn schedule_round_robin(n: usize, m: u32) -> Result<Vec<Assignment>, ScheduleError> {
    if n < 2 {
        return Err(ScheduleError::TooFewParticipants(n));
    }
    if m == 0 {
        return Err(ScheduleError::NoGames);
    }
    let mut out = Vec::with_capacity(n * (n - 1) / 2 * m as usize);
    for cycle in 1..=m {
        for i in 0..n {
            for j in i + 1..n {
                let seats = if cycle % 2 == 1 { [i, j] } else { [j, i] };
                out.push(Assignment {
                    cycle,
                    pair: (i, j),
                    seats,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn small_cases() {
        assert_eq!(schedule_round_robin(2, 1).unwrap().len(), 1);
        let s = schedule_round_robin(4, 3).unwrap();
        assert_eq!(s.len(), 18);
        let mut first_seat: HashMap<(usize, usize), [u32; 2]> = HashMap::new();
        for a in &s {
            let e = first_seat.entry(a.pair).or_default();
            e[usize::from(a.seats[0] != a.pair.0)] += 1;
        }
        assert_eq!(first_seat.len(), 6);
        assert!(first_seat.values().all(|c| *c == [2, 1]));
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(schedule_round_robin(1, 5), Err(ScheduleError::TooFewParticipants(1)));
        assert_eq!(schedule_round_robin(3, 0), Err(ScheduleError::NoGames));
    }

    #[test]
    fn cycles_are_contiguous() {
        let s = schedule_round_robin(5, 4).unwrap();
        let cycles: Vec<u32> = s.iter().map(|a| a.cycle).collect();
        let mut sorted = cycles.clone();
        sorted.sort();
        assert_eq!(cycles, sorted);
        assert!(s.chunks(10).all(|c| c.iter().all(|a| a.cycle == c[0].cycle)));
    }
}
