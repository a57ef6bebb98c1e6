use crate::game::Player;
use crate::product::{ProdState, ProductGame};

/// Result of an attractor computation restricted to a subgame.
#[derive(Clone, Debug)]
pub struct Attractor {
    pub set: Vec<bool>,
    /// Distance to the target in attractor layers (`0` on the target,
    /// `u32::MAX` outside the set).
    pub rank: Vec<u32>,
    /// Edge and state visits performed; bounded by `|V| + |E|` of the
    /// subgame plus the target size.
    pub steps: u64,
}

impl Attractor {
    /// Lowest-id successor inside `mask` with a smaller rank. Defined on
    /// states of the attractor outside the target.
    pub fn rank_decreasing_move(
        &self,
        pg: &ProductGame,
        mask: &[bool],
        u: ProdState,
    ) -> Option<ProdState> {
        let r = self.rank[u as usize];
        pg.successors(u)
            .iter()
            .copied()
            .find(|&w| mask[w as usize] && self.rank[w as usize] < r)
    }
}

/// States from which `player` can force a visit to `target` while staying in
/// `mask` (the subgame must be a trap-free restriction: every state of
/// `mask` keeps a successor in `mask`). Linear in the subgame size thanks to
/// per-state counters of successors not yet attracted.
pub fn attractor_in(
    pg: &ProductGame,
    mask: &[bool],
    target: &[bool],
    player: Player,
) -> Attractor {
    let n = pg.num_states();
    let mut set = vec![false; n];
    let mut rank = vec![u32::MAX; n];
    let mut remaining = vec![0u32; n];
    let mut steps = 0u64;
    let mut queue = std::collections::VecDeque::new();
    for u in 0..n {
        steps += 1;
        if mask[u] && target[u] {
            set[u] = true;
            rank[u] = 0;
            queue.push_back(u as ProdState);
        }
    }
    let mut counted = vec![false; n];
    while let Some(w) = queue.pop_front() {
        for &u in pg.predecessors(w) {
            steps += 1;
            let ui = u as usize;
            if !mask[ui] || set[ui] {
                continue;
            }
            if pg.owner(u) == player {
                set[ui] = true;
                rank[ui] = rank[w as usize] + 1;
                queue.push_back(u);
            } else {
                if !counted[ui] {
                    counted[ui] = true;
                    remaining[ui] = pg
                        .successors(u)
                        .iter()
                        .filter(|&&x| mask[x as usize])
                        .count() as u32;
                    steps += pg.successors(u).len() as u64;
                }
                remaining[ui] -= 1;
                if remaining[ui] == 0 {
                    set[ui] = true;
                    rank[ui] = rank[w as usize] + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    Attractor { set, rank, steps }
}

/// Attractor over the whole game.
pub fn attractor(pg: &ProductGame, target: &[bool], player: Player) -> Vec<bool> {
    let all = vec![true; pg.num_states()];
    attractor_in(pg, &all, target, player).set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::ProductKind;

    /// 0 (env) -> {1, 2}; 1 (sys) -> {3, 1}; 2 (env) -> {2, 3}; 3 target.
    fn diamond() -> ProductGame {
        let owners = vec![
            Player::Environment,
            Player::System,
            Player::Environment,
            Player::System,
        ];
        let edges = [(0, 1), (0, 2), (1, 3), (1, 1), (2, 2), (2, 3), (3, 3)];
        let target = vec![false, false, false, true];
        ProductGame::from_parts(owners, &edges, 0, ProductKind::Reachability { target }).unwrap()
    }

    #[test]
    fn diamond_by_hand() {
        let pg = diamond();
        let t = [false, false, false, true];
        assert_eq!(attractor(&pg, &t, Player::System), vec![false, true, false, true]);
        assert_eq!(
            attractor(&pg, &t, Player::Environment),
            vec![true, false, true, true]
        );
        let all = [true; 4];
        assert_eq!(attractor(&pg, &all, Player::System), vec![true; 4]);
    }

    #[test]
    fn ranks_decrease_along_moves() {
        let pg = diamond();
        let mask = [true; 4];
        let a = attractor_in(&pg, &mask, &[false, false, false, true], Player::System);
        assert_eq!(a.rank[1], 1);
        assert_eq!(a.rank_decreasing_move(&pg, &mask, 1), Some(3));
        assert!(a.steps as usize <= 2 * (pg.num_states() + pg.num_edges()));
    }
}
