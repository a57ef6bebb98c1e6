//! Random instance generators and brute-force oracles shared by the
//! integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use satisfice::ds::{LassoWord, Rational};
use satisfice::game::{Edge, Player, PropSet, QuantGame};
use satisfice::objective::{parse_fragment, FragmentFormula};
use satisfice::product::{ProductGame, ProductKind};
use satisfice::Lasso;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const PROPS: [&str; 4] = ["a", "b", "c", "e"];

fn player(rng: &mut ChaCha8Rng) -> Player {
    if rng.gen_bool(0.5) {
        Player::System
    } else {
        Player::Environment
    }
}

/// Random game with `n` states, 1 to 3 successors each and costs in
/// `[-mu, mu]`, labelled over the first `props` propositions of [`PROPS`].
pub fn random_game(rng: &mut ChaCha8Rng, n: usize, mu: i64, k: u32, props: usize) -> QuantGame {
    let owners = (0..n).map(|_| player(rng)).collect();
    let labels = (0..n)
        .map(|_| PropSet(rng.gen_range(0..1u64 << props)))
        .collect();
    let mut edges = Vec::new();
    let all: Vec<u32> = (0..n as u32).collect();
    for src in 0..n as u32 {
        let deg = rng.gen_range(1..=3.min(n));
        for &dst in all.choose_multiple(rng, deg) {
            edges.push(Edge {
                src,
                dst,
                cost: rng.gen_range(-mu..=mu),
            });
        }
    }
    let names = PROPS[..props].iter().map(|s| s.to_string()).collect();
    QuantGame::new(k, names, owners, labels, 0, edges).expect("well-formed random game")
}

fn literal(rng: &mut ChaCha8Rng, props: usize) -> String {
    let p = PROPS[rng.gen_range(0..props)];
    if rng.gen_bool(0.5) {
        format!("!{p}")
    } else {
        p.to_string()
    }
}

fn small_expr(rng: &mut ChaCha8Rng, props: usize) -> String {
    match rng.gen_range(0..4) {
        0 => format!("{} | {}", literal(rng, props), literal(rng, props)),
        1 => format!("{} & {}", literal(rng, props), literal(rng, props)),
        _ => literal(rng, props),
    }
}

/// Random formula with up to `max_safety` G-terms and `max_reach` F-terms
/// (at least one term overall).
pub fn random_fragment_text(
    rng: &mut ChaCha8Rng,
    props: usize,
    max_safety: usize,
    max_reach: usize,
) -> String {
    loop {
        let s = rng.gen_range(0..=max_safety);
        let r = rng.gen_range(0..=max_reach);
        if s + r == 0 {
            continue;
        }
        let mut terms = Vec::new();
        for _ in 0..s {
            terms.push(format!("G({})", small_expr(rng, props)));
        }
        for _ in 0..r {
            terms.push(format!("F({})", small_expr(rng, props)));
        }
        terms.shuffle(rng);
        return terms.join(" & ");
    }
}

pub fn random_fragment(rng: &mut ChaCha8Rng, props: usize) -> FragmentFormula {
    parse_fragment(&random_fragment_text(rng, props, 2, 2)).expect("generated formula parses")
}

pub fn random_int_lasso(rng: &mut ChaCha8Rng, mu: i64, max_prefix: usize, max_cycle: usize) -> Lasso<i64> {
    let p = rng.gen_range(0..=max_prefix);
    let c = rng.gen_range(1..=max_cycle);
    Lasso::new(
        (0..p).map(|_| rng.gen_range(-mu..=mu)).collect(),
        (0..c).map(|_| rng.gen_range(-mu..=mu)).collect(),
    )
}

/// Random rational lasso with entries `a/2^j`, `|a/2^j| <= bound`.
pub fn random_threshold(rng: &mut ChaCha8Rng, bound: i64) -> LassoWord {
    let entry = |rng: &mut ChaCha8Rng| {
        let den = 1i64 << rng.gen_range(0..3);
        Rational::new(rng.gen_range(-bound * den..=bound * den).into(), den.into())
    };
    let p = rng.gen_range(0..=2);
    let c = rng.gen_range(1..=2);
    let prefix = (0..p).map(|_| entry(rng)).collect();
    let cycle = (0..c).map(|_| entry(rng)).collect();
    Lasso::new(prefix, cycle)
}

/// Random product game over `n` states without a losing sink.
pub fn random_product(rng: &mut ChaCha8Rng, n: usize, parity_colors: Option<u32>) -> ProductGame {
    let owners: Vec<Player> = (0..n).map(|_| player(rng)).collect();
    let mut edges = Vec::new();
    let all: Vec<u32> = (0..n as u32).collect();
    for u in 0..n as u32 {
        let deg = rng.gen_range(1..=3.min(n));
        for &w in all.choose_multiple(rng, deg) {
            edges.push((u, w));
        }
    }
    let kind = match parity_colors {
        Some(c) => ProductKind::Parity {
            colors: (0..n).map(|_| rng.gen_range(0..c)).collect(),
        },
        None => ProductKind::Reachability {
            target: (0..n).map(|_| rng.gen_bool(0.25)).collect(),
        },
    };
    ProductGame::from_parts(owners, &edges, 0, kind).expect("well-formed random product")
}

/// Whether the play from `u` under the positional choice `pick` is won by
/// the system: it visits a target and never the losing sink, or its largest
/// recurring color is even.
fn system_wins_play(pg: &ProductGame, pick: &[u32], u: usize) -> bool {
    let n = pg.num_states();
    let mut seen = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut v = u;
    while seen[v] == usize::MAX {
        seen[v] = path.len();
        path.push(v);
        v = pick[v] as usize;
    }
    let cycle = &path[seen[v]..];
    match pg.kind() {
        ProductKind::Reachability { target } => {
            let sink = pg.losing_sink().map(|s| s as usize);
            let hits_sink = path.iter().any(|&x| Some(x) == sink);
            !hits_sink && path.iter().any(|&x| target[x])
        }
        ProductKind::Parity { colors } => cycle.iter().map(|&x| colors[x]).max().unwrap() % 2 == 0,
    }
}

/// Winner of every state by enumerating all pairs of positional strategies:
/// the system wins `u` iff some system choice beats every environment
/// choice. Feasible for games with a few thousand strategy pairs.
pub fn brute_force_winners(pg: &ProductGame) -> Vec<Player> {
    let n = pg.num_states();
    let sys_states: Vec<usize> = (0..n).filter(|&u| pg.owner(u as u32) == Player::System).collect();
    let env_states: Vec<usize> = (0..n).filter(|&u| pg.owner(u as u32) == Player::Environment).collect();
    let choices = |states: &[usize]| -> Vec<Vec<u32>> {
        let mut out = vec![vec![0u32; n]];
        for &u in states {
            let succ = pg.successors(u as u32);
            out = out
                .into_iter()
                .flat_map(|pick| {
                    succ.iter().map(move |&w| {
                        let mut p = pick.clone();
                        p[u] = w;
                        p
                    })
                })
                .collect();
        }
        out
    };
    let sys_choices = choices(&sys_states);
    let env_choices = choices(&env_states);
    let mut wins = vec![false; n];
    for s in &sys_choices {
        let mut beaten = vec![false; n];
        for e in &env_choices {
            let pick: Vec<u32> = (0..n)
                .map(|u| if pg.owner(u as u32) == Player::System { s[u] } else { e[u] })
                .collect();
            for (u, b) in beaten.iter_mut().enumerate() {
                if !*b && !system_wins_play(pg, &pick, u) {
                    *b = true;
                }
            }
        }
        for u in 0..n {
            wins[u] |= !beaten[u];
        }
    }
    wins.into_iter()
        .map(|w| if w { Player::System } else { Player::Environment })
        .collect()
}

/// Whether the positional choice `pick` of `player` wins every play from
/// every state of `region`, checked against all positional replies of the
/// opponent (enough for one-player reachability and parity games).
pub fn strategy_wins_region(pg: &ProductGame, player: Player, pick: &[Option<u32>], region: &[bool]) -> bool {
    let n = pg.num_states();
    let mut replies = vec![vec![0u32; n]];
    for u in 0..n {
        let succ = pg.successors(u as u32);
        if pg.owner(u as u32) == player {
            let w = pick[u].unwrap_or(succ[0]);
            replies.iter_mut().for_each(|r| r[u] = w);
            continue;
        }
        replies = replies
            .into_iter()
            .flat_map(|r| {
                succ.iter().map(move |&w| {
                    let mut r = r.clone();
                    r[u] = w;
                    r
                })
            })
            .collect();
    }
    replies.iter().all(|r| {
        (0..n)
            .filter(|&u| region[u])
            .all(|u| system_wins_play(pg, r, u) == (player == Player::System))
    })
}

/// Every lasso word over `{-mu..mu}` with the given prefix and cycle lengths.
pub fn all_words(mu: i64, max_prefix: usize, max_cycle: usize) -> Vec<Lasso<i64>> {
    let letters: Vec<i64> = (-mu..=mu).collect();
    let seqs = |len: usize| -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|s| {
                    letters.iter().map(move |&a| {
                        let mut t = s.clone();
                        t.push(a);
                        t
                    })
                })
                .collect();
        }
        out
    };
    let mut words = Vec::new();
    for p in 0..=max_prefix {
        for c in 1..=max_cycle {
            for prefix in seqs(p) {
                for cycle in seqs(c) {
                    words.push(Lasso::new(prefix.clone(), cycle));
                }
            }
        }
    }
    words
}
