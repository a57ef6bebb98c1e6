//! Reachability and parity game solving, strategy extraction and play
//! simulation.

mod attractor;
mod strategy;
mod zielonka;

pub use attractor::{attractor, attractor_in, Attractor};
pub use strategy::{
    lift_strategy, simulate, FiniteMemoryStrategy, LiftError, MemState, SimulationError,
    StrategyFormatError,
};
pub use zielonka::solve_parity;

use crate::deadline::{Deadline, Timeout};
use crate::game::Player;
use crate::product::{ProdState, ProductGame, ProductKind};

/// Winning regions and memoryless winning strategies of both players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub winner_from_initial: Player,
    /// `true` for states won by the system; the complement is won by the
    /// environment.
    pub region_system: Vec<bool>,
    /// Defined exactly on system-owned states of the system region.
    pub strategy_system: Vec<Option<ProdState>>,
    /// Defined exactly on environment-owned states of the environment region.
    pub strategy_environment: Vec<Option<ProdState>>,
    /// Elementary solver operations (edge and state visits).
    pub steps: u64,
}

impl SolveResult {
    pub fn winner(&self, u: ProdState) -> Player {
        if self.region_system[u as usize] {
            Player::System
        } else {
            Player::Environment
        }
    }

    pub fn region(&self, player: Player) -> Vec<bool> {
        match player {
            Player::System => self.region_system.clone(),
            Player::Environment => self.region_system.iter().map(|w| !w).collect(),
        }
    }

    pub fn strategy(&self, player: Player) -> &[Option<ProdState>] {
        match player {
            Player::System => &self.strategy_system,
            Player::Environment => &self.strategy_environment,
        }
    }
}

/// Solves by winning-condition kind.
pub fn solve(pg: &ProductGame, deadline: &Deadline) -> Result<SolveResult, Timeout> {
    match pg.kind() {
        ProductKind::Reachability { .. } => Ok(solve_reachability(pg)),
        ProductKind::Parity { .. } => solve_parity(pg, deadline),
    }
}

/// Solves "reach the target and never enter the losing sink".
///
/// Target states of a product can only leave the target region towards the
/// losing sink (the comparator sink is absorbing and a fulfilled obligation
/// can only die), so the system wins exactly from the system attractor of
/// the targets that the environment cannot pull into the sink. Without a
/// losing sink this is plain reachability.
///
/// # Panics
/// If `pg` is a parity game.
pub fn solve_reachability(pg: &ProductGame) -> SolveResult {
    let ProductKind::Reachability { target } = pg.kind() else {
        panic!("solve_reachability on a parity game");
    };
    let n = pg.num_states();
    let all = vec![true; n];
    let mut steps = 0;
    let doom = pg.losing_sink().map(|sink| {
        let mut t = vec![false; n];
        t[sink as usize] = true;
        let a = attractor_in(pg, &all, &t, Player::Environment);
        steps += a.steps;
        a
    });
    let safe_target: Vec<bool> = (0..n)
        .map(|u| target[u] && !doom.as_ref().is_some_and(|d| d.set[u]))
        .collect();
    let attr = attractor_in(pg, &all, &safe_target, Player::System);
    steps += attr.steps;

    let mut strategy_system = vec![None; n];
    let mut strategy_environment = vec![None; n];
    for u in 0..n as ProdState {
        let ui = u as usize;
        steps += 1;
        match (pg.owner(u), attr.set[ui]) {
            (Player::System, true) => {
                strategy_system[ui] = if safe_target[ui] {
                    let succ = pg.successors(u);
                    succ.iter()
                        .copied()
                        .find(|&w| safe_target[w as usize])
                        .or_else(|| succ.iter().copied().find(|&w| attr.set[w as usize]))
                        .or_else(|| succ.first().copied())
                } else {
                    attr.rank_decreasing_move(pg, &all, u)
                };
            }
            (Player::Environment, false) => {
                strategy_environment[ui] = match &doom {
                    Some(d) if d.set[ui] && Some(u) != pg.losing_sink() => {
                        d.rank_decreasing_move(pg, &all, u)
                    }
                    _ => pg.successors(u).iter().copied().find(|&w| !attr.set[w as usize]),
                };
            }
            _ => {}
        }
    }
    SolveResult {
        winner_from_initial: if attr.set[pg.initial() as usize] {
            Player::System
        } else {
            Player::Environment
        },
        region_system: attr.set,
        strategy_system,
        strategy_environment,
        steps,
    }
}

/// Re-encodes a reachability game (without losing sink) as a parity game:
/// targets become absorbing with color 2, every other state gets color 1.
pub fn reachability_as_parity(pg: &ProductGame) -> ProductGame {
    let ProductKind::Reachability { target } = pg.kind() else {
        panic!("not a reachability game");
    };
    let n = pg.num_states();
    let mut edges = Vec::new();
    for u in 0..n as ProdState {
        if target[u as usize] {
            edges.push((u, u));
        } else {
            edges.extend(pg.successors(u).iter().map(|&w| (u, w)));
        }
    }
    let colors = target.iter().map(|&t| if t { 2 } else { 1 }).collect();
    let owners = (0..n as ProdState).map(|u| pg.owner(u)).collect();
    ProductGame::from_parts(owners, &edges, pg.initial(), ProductKind::Parity { colors })
        .expect("same structure")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reach(owners: Vec<Player>, edges: &[(u32, u32)], target: Vec<bool>) -> ProductGame {
        ProductGame::from_parts(owners, edges, 0, ProductKind::Reachability { target }).unwrap()
    }

    #[test]
    fn initial_in_target() {
        let pg = reach(vec![Player::Environment], &[(0, 0)], vec![true]);
        let r = solve_reachability(&pg);
        assert_eq!(r.winner_from_initial, Player::System);
        assert_eq!(r.strategy_environment, vec![None]);
    }

    #[test]
    fn environment_loops_away_from_target() {
        let pg = reach(
            vec![Player::Environment, Player::System],
            &[(0, 0), (0, 1), (1, 1)],
            vec![false, true],
        );
        let r = solve_reachability(&pg);
        assert_eq!(r.winner_from_initial, Player::Environment);
        assert_eq!(r.strategy_environment[0], Some(0));
        assert_eq!(r.region_system, vec![false, true]);
    }

    #[test]
    fn parity_encoding_agrees() {
        let pg = reach(
            vec![Player::System, Player::Environment, Player::System],
            &[(0, 1), (0, 0), (1, 2), (1, 0), (2, 2)],
            vec![false, false, true],
        );
        let r = solve_reachability(&pg);
        let p = solve_parity(&reachability_as_parity(&pg), &Deadline::NONE).unwrap();
        assert_eq!(r.region_system, p.region_system);
    }
}
