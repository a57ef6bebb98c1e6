//! Zielonka's recursive algorithm for max-parity games (even = system).

use super::attractor::attractor_in;
use super::SolveResult;
use crate::deadline::{Deadline, Timeout};
use crate::game::Player;
use crate::product::{ProdState, ProductGame, ProductKind};

struct Solver<'a> {
    pg: &'a ProductGame,
    colors: &'a [u32],
    deadline: &'a Deadline,
    /// Winner per state, filled in as subgames are decided.
    winner: Vec<Option<Player>>,
    /// Move of the winning owner, where the owner wins.
    choice: Vec<Option<ProdState>>,
    steps: u64,
}

fn parity_player(color: u32) -> Player {
    if color % 2 == 0 {
        Player::System
    } else {
        Player::Environment
    }
}

impl Solver<'_> {
    /// Solves the subgame `mask` (a trap for both players' escapes),
    /// recording winners and winning moves for every state in it.
    ///
    /// Recursion depth is bounded by the number of distinct colors: the
    /// inner call drops the top color, the second classical call is a loop.
    fn solve(&mut self, mut mask: Vec<bool>) -> Result<(), Timeout> {
        self.deadline.check()?;
        let n = self.pg.num_states();
        loop {
            let Some(d) = (0..n)
                .filter(|&u| mask[u])
                .map(|u| self.colors[u])
                .max()
            else {
                return Ok(());
            };
            self.steps += n as u64;
            let p = parity_player(d);
            let top: Vec<bool> = (0..n).map(|u| mask[u] && self.colors[u] == d).collect();
            let a = attractor_in(self.pg, &mask, &top, p);
            self.steps += a.steps;
            let rest: Vec<bool> = (0..n).map(|u| mask[u] && !a.set[u]).collect();
            self.solve(rest.clone())?;

            let opp_wins: Vec<bool> = (0..n)
                .map(|u| rest[u] && self.winner[u] == Some(p.opponent()))
                .collect();
            if !opp_wins.iter().any(|&b| b) {
                // p wins the whole subgame.
                for u in 0..n {
                    if !mask[u] {
                        continue;
                    }
                    self.winner[u] = Some(p);
                    let us = u as ProdState;
                    if self.pg.owner(us) != p {
                        self.choice[u] = None;
                    } else if top[u] {
                        self.choice[u] = self
                            .pg
                            .successors(us)
                            .iter()
                            .copied()
                            .find(|&w| mask[w as usize]);
                    } else if a.set[u] {
                        self.choice[u] = a.rank_decreasing_move(self.pg, &mask, us);
                    }
                }
                return Ok(());
            }
            let b = attractor_in(self.pg, &mask, &opp_wins, p.opponent());
            self.steps += b.steps;
            for u in 0..n {
                if !b.set[u] {
                    continue;
                }
                let us = u as ProdState;
                self.winner[u] = Some(p.opponent());
                if self.pg.owner(us) == p.opponent() {
                    if !opp_wins[u] {
                        self.choice[u] = b.rank_decreasing_move(self.pg, &mask, us);
                    }
                } else {
                    self.choice[u] = None;
                }
            }
            for u in 0..n {
                mask[u] &= !b.set[u];
            }
            self.deadline.check()?;
        }
    }
}

/// Solves a parity game with Zielonka's algorithm.
///
/// # Panics
/// If `pg` is a reachability game.
pub fn solve_parity(pg: &ProductGame, deadline: &Deadline) -> Result<SolveResult, Timeout> {
    let ProductKind::Parity { colors } = pg.kind() else {
        panic!("solve_parity on a reachability game");
    };
    let n = pg.num_states();
    let mut s = Solver {
        pg,
        colors,
        deadline,
        winner: vec![None; n],
        choice: vec![None; n],
        steps: 0,
    };
    s.solve(vec![true; n])?;
    let region_system: Vec<bool> = s
        .winner
        .iter()
        .map(|w| *w == Some(Player::System))
        .collect();
    let mut strategy_system = vec![None; n];
    let mut strategy_environment = vec![None; n];
    for u in 0..n {
        match (pg.owner(u as ProdState), region_system[u]) {
            (Player::System, true) => strategy_system[u] = s.choice[u],
            (Player::Environment, false) => strategy_environment[u] = s.choice[u],
            _ => {}
        }
    }
    Ok(SolveResult {
        winner_from_initial: if region_system[pg.initial() as usize] {
            Player::System
        } else {
            Player::Environment
        },
        region_system,
        strategy_system,
        strategy_environment,
        steps: s.steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity(owners: Vec<Player>, edges: &[(u32, u32)], colors: Vec<u32>) -> ProductGame {
        ProductGame::from_parts(owners, edges, 0, ProductKind::Parity { colors }).unwrap()
    }

    #[test]
    fn all_even_is_system_win() {
        let pg = parity(
            vec![Player::System, Player::Environment],
            &[(0, 1), (1, 0), (1, 1)],
            vec![0, 2],
        );
        let r = solve_parity(&pg, &Deadline::NONE).unwrap();
        assert_eq!(r.region_system, vec![true, true]);
        assert_eq!(r.strategy_system[0], Some(1));
    }

    #[test]
    fn odd_env_loop_is_unavoidable() {
        let pg = parity(
            vec![Player::System, Player::Environment],
            &[(0, 1), (1, 1), (1, 0)],
            vec![2, 3],
        );
        let r = solve_parity(&pg, &Deadline::NONE).unwrap();
        assert_eq!(r.winner_from_initial, Player::Environment);
        assert_eq!(r.region_system, vec![false, false]);
        assert!(r.strategy_environment[1].is_some());
    }

    #[test]
    fn system_escapes_odd_color() {
        // 0 (sys, color 1) can go to 1 (color 3, self-loop) or 2 (color 4).
        let pg = parity(
            vec![Player::System, Player::System, Player::System],
            &[(0, 1), (0, 2), (1, 1), (2, 2)],
            vec![1, 3, 4],
        );
        let r = solve_parity(&pg, &Deadline::NONE).unwrap();
        assert_eq!(r.region_system, vec![true, false, true]);
        assert_eq!(r.strategy_system[0], Some(2));
    }
}
