//! End-to-end synthesis: comparator, product, solving and strategy lifting,
//! with per-phase timings collected in a [`RunRecord`].

use std::fmt;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::{GenError, Scenario};
use crate::deadline::Deadline;
use crate::ds::{Comparator, ComparatorError, DiscountParams, LassoWord, Relation};
use crate::game::{Player, QuantGame};
use crate::objective::{FragmentFormula, Objective, ObjectiveError, ParityAutomaton};
use crate::product::{full_product, reach_product, ProductError, ProductGame, ProductOrder};
use crate::solver::{lift_strategy, solve, FiniteMemoryStrategy, LiftError, SolveResult};

pub const EXIT_SYSTEM_WINS: i32 = 0;
pub const EXIT_ENVIRONMENT_WINS: i32 = 10;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INVALID_DATA: i32 = 65;
pub const EXIT_IO: i32 = 66;
pub const EXIT_TIMEOUT: i32 = 75;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Winner {
    System,
    Environment,
    Timeout,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::System => "SYSTEM",
            Winner::Environment => "ENVIRONMENT",
            Winner::Timeout => "TIMEOUT",
        })
    }
}

impl Winner {
    pub fn exit_code(self) -> i32 {
        match self {
            Winner::System => EXIT_SYSTEM_WINS,
            Winner::Environment => EXIT_ENVIRONMENT_WINS,
            Winner::Timeout => EXIT_TIMEOUT,
        }
    }
}

/// One CSV row. Column order is part of the output format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub game_states: usize,
    pub game_edges: usize,
    pub comparator_states: usize,
    pub objective_states: usize,
    pub product_states: usize,
    pub product_edges: usize,
    pub generate_ms: f64,
    pub comparator_ms: f64,
    pub product_ms: f64,
    pub solve_ms: f64,
    pub extract_ms: f64,
    pub winner: Winner,
    pub memory_bytes: usize,
}

pub const CSV_COLUMNS: [&str; 14] = [
    "instance",
    "game_states",
    "game_edges",
    "comparator_states",
    "objective_states",
    "product_states",
    "product_edges",
    "generate_ms",
    "comparator_ms",
    "product_ms",
    "solve_ms",
    "extract_ms",
    "winner",
    "memory_bytes",
];

impl RunRecord {
    fn new(instance: &str, game: &QuantGame) -> Self {
        RunRecord {
            instance: instance.to_string(),
            game_states: game.num_states(),
            game_edges: game.num_edges(),
            comparator_states: 0,
            objective_states: 1,
            product_states: 0,
            product_edges: 0,
            generate_ms: 0.0,
            comparator_ms: 0.0,
            product_ms: 0.0,
            solve_ms: 0.0,
            extract_ms: 0.0,
            winner: Winner::Timeout,
            memory_bytes: 0,
        }
    }

    pub fn total_ms(&self) -> f64 {
        self.generate_ms + self.comparator_ms + self.product_ms + self.solve_ms + self.extract_ms
    }
}

/// Writes records as CSV, with a header when `header` is set.
pub fn write_csv<W: Write>(out: W, records: &[RunRecord], header: bool) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(header).from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(text: &str) -> csv::Result<Vec<RunRecord>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

#[derive(Clone, Debug)]
pub enum ObjectiveSpec {
    /// Only the quantitative goal.
    None,
    Fragment(FragmentFormula),
    Parity(ParityAutomaton),
}

#[derive(Clone, Debug)]
pub struct SynthRequest {
    pub name: String,
    pub game: QuantGame,
    pub objective: ObjectiveSpec,
    pub p: u32,
    pub threshold: LassoWord,
    pub order: ProductOrder,
    pub deadline: Deadline,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("game: {0}")]
    InvalidGame(String),
    #[error("comparator: {0}")]
    Comparator(#[from] ComparatorError),
    #[error("objective: {0}")]
    Objective(#[from] ObjectiveError),
    #[error("product: {0}")]
    Product(ProductError),
    #[error("strategy: {0}")]
    Lift(#[from] LiftError),
    #[error("generator: {0}")]
    Generate(#[from] GenError),
}

pub struct SynthOutcome {
    pub record: RunRecord,
    pub comparator: Option<Comparator>,
    pub objective: Option<Objective>,
    pub product: Option<ProductGame>,
    pub solution: Option<SolveResult>,
    /// Winning strategy of the winner, lifted to the game.
    pub strategy: Option<FiniteMemoryStrategy>,
    /// The loser's strategy from its own winning region, used as the
    /// adversary when replaying the winner's strategy.
    pub counter_strategy: Option<FiniteMemoryStrategy>,
}

impl SynthOutcome {
    pub fn winner(&self) -> Winner {
        self.record.winner
    }

    /// What the emitted strategy guarantees.
    pub fn guarantee(&self) -> &'static str {
        let qualitative = self.objective.is_some();
        match (self.record.winner, qualitative) {
            (Winner::System, false) => "system strategy: every play has discounted sum >= v",
            (Winner::System, true) => {
                "system strategy: every play satisfies the objective and has discounted sum >= v"
            }
            (Winner::Environment, false) => {
                "environment strategy: every play has discounted sum < v + d*eps"
            }
            (Winner::Environment, true) => {
                "environment strategy: every play violates the objective or has discounted sum < v + d*eps"
            }
            (Winner::Timeout, _) => "no strategy: time budget exhausted",
        }
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Runs the full synthesis pipeline. A timeout is not an error: the outcome
/// reports `Winner::Timeout` with the sizes built so far.
pub fn synthesize(req: &SynthRequest) -> Result<SynthOutcome, SynthError> {
    let g = &req.game;
    let violations = g.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(SynthError::InvalidGame(list.join("; ")));
    }
    let mut record = RunRecord::new(&req.name, g);
    let mut outcome = SynthOutcome {
        record: record.clone(),
        comparator: None,
        objective: None,
        product: None,
        solution: None,
        strategy: None,
        counter_strategy: None,
    };

    let t = Instant::now();
    let params = DiscountParams::new(g.k(), req.p)?;
    let comparator = Comparator::new(g.mu(), params, Relation::Geq, req.threshold.clone())?;
    record.comparator_ms = ms(t);
    record.comparator_states = comparator.num_states();

    let objective = match &req.objective {
        ObjectiveSpec::None => None,
        ObjectiveSpec::Fragment(f) => Some(Objective::fragment(f, g.propositions())?),
        ObjectiveSpec::Parity(a) => Some(Objective::parity(a, g.propositions())?),
    };
    record.objective_states = objective.as_ref().map_or(1, Objective::num_states);

    let t = Instant::now();
    let built = match &objective {
        None => reach_product(g, &comparator, &req.deadline),
        Some(obj) => full_product(g, &comparator, obj, req.order, &req.deadline),
    };
    record.product_ms = ms(t);
    outcome.comparator = Some(comparator);
    outcome.objective = objective;
    let product = match built {
        Ok(p) => p,
        Err(ProductError::Timeout(_)) => {
            outcome.record = record;
            return Ok(outcome);
        }
        Err(e) => return Err(SynthError::Product(e)),
    };
    record.product_states = product.num_states();
    record.product_edges = product.num_edges();
    record.memory_bytes = product.heap_bytes();

    let t = Instant::now();
    let solved = solve(&product, &req.deadline);
    record.solve_ms = ms(t);
    let Ok(solution) = solved else {
        outcome.product = Some(product);
        outcome.record = record;
        return Ok(outcome);
    };

    let t = Instant::now();
    let winner = solution.winner_from_initial;
    let strategy = lift_strategy(&product, g, &solution, winner)?;
    let counter = lift_strategy(&product, g, &solution, winner.opponent())?;
    record.extract_ms = ms(t);
    record.winner = match winner {
        Player::System => Winner::System,
        Player::Environment => Winner::Environment,
    };
    outcome.record = record;
    outcome.product = Some(product);
    outcome.solution = Some(solution);
    outcome.strategy = Some(strategy);
    outcome.counter_strategy = Some(counter);
    Ok(outcome)
}

/// One benchmark instance: a generated scenario and the approximation `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchInstance {
    pub scenario: Scenario,
    pub p: u32,
}

impl BenchInstance {
    pub fn name(&self) -> String {
        format!("{}-e{}", self.scenario.name(), self.p)
    }
}

/// Generates and synthesizes one instance against threshold 0.
pub fn run_instance(inst: &BenchInstance, timeout_ms: Option<u64>) -> Result<RunRecord, SynthError> {
    let deadline = Deadline::from_millis(timeout_ms);
    let t = Instant::now();
    let (game, formula) = inst.scenario.generate()?;
    let generate_ms = ms(t);
    let req = SynthRequest {
        name: inst.name(),
        game,
        objective: ObjectiveSpec::Fragment(formula),
        p: inst.p,
        threshold: LassoWord::constant(num::zero()),
        order: ProductOrder::default(),
        deadline,
    };
    let mut record = synthesize(&req)?.record;
    record.generate_ms = generate_ms;
    Ok(record)
}

/// Runs instances on `workers` threads; records come back in input order.
pub fn run_sweep(
    instances: &[BenchInstance],
    workers: usize,
    timeout_ms: Option<u64>,
) -> Vec<Result<RunRecord, String>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunRecord, String>>>> =
        Mutex::new(vec![None; instances.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1).min(instances.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(inst) = instances.get(i) else { break };
                log::info!("running {}", inst.name());
                let r = run_instance(inst, timeout_ms).map_err(|e| e.to_string());
                results.lock().expect("no poisoned workers")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .expect("no poisoned workers")
        .into_iter()
        .map(|r| r.expect("every instance ran"))
        .collect()
}

/// Least-squares line `y = slope·x + intercept` and its `R²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Whitespace-separated plotting table: one row per record with the
/// product size, positive reward, `k`, `p` and total runtime.
pub fn plot_table(instances: &[BenchInstance], records: &[RunRecord]) -> String {
    let mut out = String::from("# instance product_states positive_reward k p total_ms winner\n");
    for (inst, r) in instances.iter().zip(records) {
        out.push_str(&format!(
            "{} {} {} {} {} {:.3} {}\n",
            r.instance,
            r.product_states,
            inst.scenario.positive_reward(),
            inst.scenario.k(),
            inst.p,
            r.total_ms(),
            r.winner
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_column_order() {
        let g = crate::bench::gen_grid(&crate::bench::GridConfig::new(4, 1, -1, 1))
            .unwrap()
            .0;
        let mut r = RunRecord::new("x", &g);
        r.winner = Winner::Environment;
        let mut buf = Vec::new();
        write_csv(&mut buf, &[r.clone()], true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(read_csv(&text).unwrap(), vec![r]);
    }

    #[test]
    fn fit_of_a_line_is_exact() {
        let f = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }
}
