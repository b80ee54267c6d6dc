//! Randomised local search and (1+1) EAs over permutations of the free layer.
//!
//! Every algorithm here is elitist: an offspring replaces the parent iff it has
//! no more crossings. Only strict improvements reset the stagnation counter.
//!
//! Two counters describe the work done:
//! - `evaluations`: candidate moves whose crossing change was computed;
//! - `delta_ops`: cross-table differences summed while doing so.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::crossings::{crossings_unchecked, exchange_delta, jump_delta, jump_scan_into, swap_delta};
use crate::{CrossTable, Error, Ordering, Result, Seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operator {
    /// Transpose two neighbouring positions.
    Swap,
    /// Transpose two arbitrary positions.
    Exchange,
    /// Move one vertex to another position, shifting those in between.
    Jump,
}

impl Operator {
    pub const ALL: [Operator; 3] = [Operator::Swap, Operator::Exchange, Operator::Jump];

    pub fn name(self) -> &'static str {
        match self {
            Operator::Swap => "swap",
            Operator::Exchange => "exchange",
            Operator::Jump => "jump",
        }
    }
}

/// How many elementary moves one generation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strength {
    /// Exactly one move (RLS).
    ConstantOne,
    /// `1 + Poisson(1)` moves (EA).
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MutationConfig {
    pub operator: Operator,
    pub strength: Strength,
}

impl MutationConfig {
    pub fn rls(operator: Operator) -> Self {
        Self {
            operator,
            strength: Strength::ConstantOne,
        }
    }

    pub fn ea(operator: Operator) -> Self {
        Self {
            operator,
            strength: Strength::Poisson,
        }
    }

    /// `rls-swap`, `ea-jump`, ...
    pub fn name(&self) -> String {
        let prefix = match self.strength {
            Strength::ConstantOne => "rls",
            Strength::Poisson => "ea",
        };
        format!("{prefix}-{}", self.operator.name())
    }
}

impl fmt::Display for MutationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for MutationConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (prefix, op) = s
            .split_once('-')
            .ok_or_else(|| Error::param(format!("unknown mutation config `{s}`")))?;
        let strength = match prefix {
            "rls" => Strength::ConstantOne,
            "ea" => Strength::Poisson,
            _ => return Err(Error::param(format!("unknown mutation config `{s}`"))),
        };
        let operator = Operator::ALL
            .into_iter()
            .find(|o| o.name() == op)
            .ok_or_else(|| Error::param(format!("unknown operator in `{s}`")))?;
        Ok(Self { operator, strength })
    }
}

/// Which acceptable jump a scanning generation performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanStrategy {
    /// The first acceptable jump found (JFIRLS).
    First,
    /// A uniformly random acceptable jump (JRIRLS).
    Random,
    /// A jump of minimum delta, ties broken uniformly (JSRLS).
    Best,
}

impl ScanStrategy {
    pub const ALL: [ScanStrategy; 3] = [ScanStrategy::First, ScanStrategy::Random, ScanStrategy::Best];

    pub fn name(self) -> &'static str {
        match self {
            ScanStrategy::First => "jfirls",
            ScanStrategy::Random => "jrirls",
            ScanStrategy::Best => "jsrls",
        }
    }
}

/// When a search stops. At least one of `stagnation_limit` and
/// `max_generations` is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    stagnation_limit: Option<u64>,
    max_generations: Option<u64>,
    target: Option<u64>,
}

impl StopRule {
    pub fn new(stagnation_limit: Option<u64>, max_generations: Option<u64>, target: Option<u64>) -> Result<Self> {
        if stagnation_limit.is_none() && max_generations.is_none() {
            return Err(Error::param("stop rule needs a stagnation limit or a generation cap"));
        }
        Ok(Self {
            stagnation_limit,
            max_generations,
            target,
        })
    }

    /// Stop after `⌈n2^exponent⌉` generations without strict improvement.
    pub fn stagnation(n2: usize, exponent: f64) -> Self {
        Self {
            stagnation_limit: Some(stagnation_generations(n2, exponent)),
            max_generations: None,
            target: None,
        }
    }

    pub fn generations(max: u64) -> Self {
        Self {
            stagnation_limit: None,
            max_generations: Some(max),
            target: None,
        }
    }

    pub fn with_max_generations(mut self, max: Option<u64>) -> Self {
        self.max_generations = max;
        self
    }

    pub fn with_target(mut self, target: Option<u64>) -> Self {
        self.target = target;
        self
    }

    pub fn stagnation_limit(&self) -> Option<u64> {
        self.stagnation_limit
    }

    pub fn max_generations(&self) -> Option<u64> {
        self.max_generations
    }

    pub fn target(&self) -> Option<u64> {
        self.target
    }

    fn done(&self, generation: u64, stagnant: u64, crossings: u64) -> bool {
        self.target.is_some_and(|t| crossings <= t)
            || self.stagnation_limit.is_some_and(|s| stagnant >= s)
            || self.max_generations.is_some_and(|m| generation >= m)
    }
}

/// `⌈n2^exponent⌉`.
pub fn stagnation_generations(n2: usize, exponent: f64) -> u64 {
    (n2 as f64).powf(exponent).ceil() as u64
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub algorithm: String,
    pub seed: Seed,
    /// `(generation, crossings)` at the start (generation 0) and after every
    /// strict improvement.
    pub improvements: Vec<(u64, u64)>,
    pub final_ordering: Ordering,
    pub final_crossings: u64,
    pub generations: u64,
    pub evaluations: u64,
    pub delta_ops: u64,
    /// Cross-table construction time, filled in by the harness.
    pub preprocess: Duration,
    pub search: Duration,
}

impl RunTrace {
    /// Trace of an algorithm that produces one ordering without generations.
    pub fn single(algorithm: impl Into<String>, seed: Seed, ord: Ordering, crossings: u64, search: Duration) -> Self {
        Self {
            algorithm: algorithm.into(),
            seed,
            improvements: vec![(0, crossings)],
            final_ordering: ord,
            final_crossings: crossings,
            generations: 0,
            evaluations: 0,
            delta_ops: 0,
            preprocess: Duration::ZERO,
            search,
        }
    }

    /// Best crossings after `generation` generations.
    pub fn best_at(&self, generation: u64) -> u64 {
        let k = self.improvements.partition_point(|&(g, _)| g <= generation);
        self.improvements[k.saturating_sub(1)].1
    }

    /// First generation at which the run had at most `crossings`.
    pub fn first_reaching(&self, crossings: u64) -> Option<u64> {
        self.improvements.iter().find(|&&(_, k)| k <= crossings).map(|&(g, _)| g)
    }

    /// Everything except wall-clock durations.
    pub fn same_outcome(&self, other: &RunTrace) -> bool {
        let strip = |t: &RunTrace| RunTrace {
            preprocess: Duration::ZERO,
            search: Duration::ZERO,
            ..t.clone()
        };
        strip(self) == strip(other)
    }
}

/// Number of moves for one generation.
pub fn sample_strength<R: Rng + ?Sized>(strength: Strength, rng: &mut R) -> u64 {
    match strength {
        Strength::ConstantOne => 1,
        Strength::Poisson => {
            let poisson = Poisson::new(1.0).expect("lambda = 1 is valid");
            1 + poisson.sample(rng) as u64
        }
    }
}

/// One elementary move, identified by positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Swap(usize),
    Exchange(usize, usize),
    Jump(usize, usize),
}

impl Move {
    /// Uniform random move of the given kind; `n2 >= 2`.
    pub fn sample<R: Rng + ?Sized>(operator: Operator, n2: usize, rng: &mut R) -> Move {
        match operator {
            Operator::Swap => Move::Swap(rng.random_range(0..n2 - 1)),
            Operator::Exchange => {
                let i = rng.random_range(0..n2);
                let mut j = rng.random_range(0..n2 - 1);
                if j >= i {
                    j += 1;
                }
                Move::Exchange(i.min(j), i.max(j))
            }
            Operator::Jump => Move::Jump(rng.random_range(0..n2), rng.random_range(0..n2)),
        }
    }

    /// Crossing change and the number of table differences it took.
    pub fn delta(self, table: &CrossTable, ord: &Ordering) -> (i64, u64) {
        match self {
            Move::Swap(i) => (swap_delta(table, ord, i), 1),
            Move::Exchange(i, j) => (exchange_delta(table, ord, i, j), (2 * (j - i) - 1) as u64),
            Move::Jump(i, j) => (jump_delta(table, ord, i, j), i.abs_diff(j) as u64),
        }
    }

    pub fn apply(self, ord: &mut Ordering) {
        match self {
            Move::Swap(i) => ord.exchange(i, i + 1),
            Move::Exchange(i, j) => ord.exchange(i, j),
            Move::Jump(i, j) => ord.jump(i, j),
        }
    }

    pub fn inverse(self) -> Move {
        match self {
            Move::Jump(i, j) => Move::Jump(j, i),
            m => m,
        }
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Counters {
    evaluations: u64,
    delta_ops: u64,
}

fn mutate_in_place<R: Rng + ?Sized>(
    ord: &mut Ordering,
    table: &CrossTable,
    operator: Operator,
    k: u64,
    rng: &mut R,
    applied: &mut Vec<Move>,
    counters: &mut Counters,
) -> i64 {
    applied.clear();
    if ord.len() < 2 {
        return 0;
    }
    let mut total = 0;
    for _ in 0..k {
        let mv = Move::sample(operator, ord.len(), rng);
        let (d, ops) = mv.delta(table, ord);
        counters.delta_ops += ops;
        total += d;
        mv.apply(ord);
        applied.push(mv);
    }
    total
}

/// Applies `k` uniformly random moves one after another and returns the new
/// ordering with its exact change in crossings.
pub fn mutate<R: Rng + ?Sized>(
    ord: &Ordering,
    table: &CrossTable,
    operator: Operator,
    k: u64,
    rng: &mut R,
) -> (Ordering, i64) {
    let mut out = ord.clone();
    let mut applied = Vec::new();
    let d = mutate_in_place(&mut out, table, operator, k, rng, &mut applied, &mut Counters::default());
    (out, d)
}

fn check_start(table: &CrossTable, start: &Ordering) -> Result<()> {
    if start.len() == table.n2() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "start ordering has {} vertices, table has {}",
            start.len(),
            table.n2()
        )))
    }
}

/// RLS or (1+1) EA from `start`.
///
/// Each generation samples `k`, applies `k` random moves to the current
/// ordering and keeps the result iff crossings did not increase; otherwise the
/// moves are undone in reverse.
pub fn run_search(
    table: &CrossTable,
    config: MutationConfig,
    stop: StopRule,
    seed: Seed,
    start: &Ordering,
) -> Result<RunTrace> {
    check_start(table, start)?;
    let clock = Instant::now();
    let mut rng = seed.rng();
    let mut ord = start.clone();
    let mut current = crossings_unchecked(table, &ord);
    let mut improvements = vec![(0, current)];
    let mut counters = Counters::default();
    let mut applied = Vec::new();
    let (mut generation, mut stagnant) = (0u64, 0u64);

    while !stop.done(generation, stagnant, current) {
        generation += 1;
        let k = sample_strength(config.strength, &mut rng);
        let d = mutate_in_place(&mut ord, table, config.operator, k, &mut rng, &mut applied, &mut counters);
        counters.evaluations += 1;
        if d <= 0 {
            current = current.checked_add_signed(d).expect("crossings stay non-negative");
            if d < 0 {
                stagnant = 0;
                improvements.push((generation, current));
                continue;
            }
        } else {
            for mv in applied.iter().rev() {
                mv.inverse().apply(&mut ord);
            }
        }
        stagnant += 1;
    }

    debug_assert_eq!(current, crossings_unchecked(table, &ord));
    Ok(RunTrace {
        algorithm: config.name(),
        seed,
        improvements,
        final_ordering: ord,
        final_crossings: current,
        generations: generation,
        evaluations: counters.evaluations,
        delta_ops: counters.delta_ops,
        preprocess: Duration::ZERO,
        search: clock.elapsed(),
    })
}

/// Scans the jump neighbourhood of the current ordering and returns the chosen
/// acceptable jump with its delta, if any.
struct Scanner {
    order: Vec<usize>,
    deltas: Vec<i64>,
    candidates: Vec<(usize, usize, i64)>,
}

impl Scanner {
    fn new(n2: usize) -> Self {
        Self {
            order: (0..n2).collect(),
            deltas: vec![0; n2],
            candidates: Vec::new(),
        }
    }

    fn pick<R: Rng + ?Sized>(
        &mut self,
        strategy: ScanStrategy,
        table: &CrossTable,
        ord: &Ordering,
        rng: &mut R,
        counters: &mut Counters,
    ) -> Option<(Move, i64)> {
        let n = ord.len();
        match strategy {
            ScanStrategy::First => {
                self.order.shuffle(rng);
                for &v in &self.order {
                    let i = ord.position(v);
                    if let Some((j, d)) = first_acceptable_from(table, ord, i, counters) {
                        return Some((Move::Jump(i, j), d));
                    }
                }
                None
            }
            ScanStrategy::Random | ScanStrategy::Best => {
                // Every target is examined, so the visiting order cannot change
                // which jump is chosen; no shuffle needed.
                self.candidates.clear();
                let mut best = i64::MAX;
                for i in 0..n {
                    jump_scan_into(table, ord, i, &mut self.deltas);
                    counters.delta_ops += (n - 1) as u64;
                    counters.evaluations += (n - 1) as u64;
                    for (j, &d) in self.deltas.iter().enumerate() {
                        if j == i || d > 0 {
                            continue;
                        }
                        if strategy == ScanStrategy::Best {
                            if d > best {
                                continue;
                            }
                            if d < best {
                                best = d;
                                self.candidates.clear();
                            }
                        }
                        self.candidates.push((i, j, d));
                    }
                }
                if self.candidates.is_empty() {
                    return None;
                }
                let (i, j, d) = self.candidates[rng.random_range(0..self.candidates.len())];
                Some((Move::Jump(i, j), d))
            }
        }
    }
}

/// Walks targets outward from `i`, alternating right and left, and returns
/// the first one with delta <= 0.
fn first_acceptable_from(table: &CrossTable, ord: &Ordering, i: usize, counters: &mut Counters) -> Option<(usize, i64)> {
    let n = ord.len();
    let u = ord.at(i);
    let (mut right, mut left) = (i + 1, i);
    let (mut acc_r, mut acc_l) = (0i64, 0i64);
    while right < n || left > 0 {
        if right < n {
            acc_r -= table.diff(u, ord.at(right));
            counters.delta_ops += 1;
            counters.evaluations += 1;
            if acc_r <= 0 {
                return Some((right, acc_r));
            }
            right += 1;
        }
        if left > 0 {
            left -= 1;
            acc_l += table.diff(u, ord.at(left));
            counters.delta_ops += 1;
            counters.evaluations += 1;
            if acc_l <= 0 {
                return Some((left, acc_l));
            }
        }
    }
    None
}

/// Jump RLS that scans for acceptable (non-worsening, non-identity) jumps each
/// generation instead of sampling one blindly.
pub fn run_scanning_rls(
    table: &CrossTable,
    strategy: ScanStrategy,
    stop: StopRule,
    seed: Seed,
    start: &Ordering,
) -> Result<RunTrace> {
    check_start(table, start)?;
    let clock = Instant::now();
    let mut rng = seed.rng();
    let mut ord = start.clone();
    let mut current = crossings_unchecked(table, &ord);
    let mut improvements = vec![(0, current)];
    let mut counters = Counters::default();
    let mut scanner = Scanner::new(ord.len());
    let (mut generation, mut stagnant) = (0u64, 0u64);

    while !stop.done(generation, stagnant, current) {
        generation += 1;
        match scanner.pick(strategy, table, &ord, &mut rng, &mut counters) {
            Some((mv, d)) => {
                mv.apply(&mut ord);
                current = current.checked_add_signed(d).expect("crossings stay non-negative");
                if d < 0 {
                    stagnant = 0;
                    improvements.push((generation, current));
                } else {
                    stagnant += 1;
                }
            }
            None => stagnant += 1,
        }
    }

    debug_assert_eq!(current, crossings_unchecked(table, &ord));
    Ok(RunTrace {
        algorithm: strategy.name().to_string(),
        seed,
        improvements,
        final_ordering: ord,
        final_crossings: current,
        generations: generation,
        evaluations: counters.evaluations,
        delta_ops: counters.delta_ops,
        preprocess: Duration::ZERO,
        search: clock.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossings::crossings_of;
    use crate::crossings::fixtures::{complete, e2};
    use crate::exact::exact_dp;
    use crate::instance::{generate_random, random_ordering};
    use proptest::prelude::*;

    #[test]
    fn constant_strength_is_one() {
        let mut rng = Seed(1).rng();
        assert!((0..1000).all(|_| sample_strength(Strength::ConstantOne, &mut rng) == 1));
    }

    #[test]
    fn poisson_strength_distribution() {
        let mut rng = Seed(3).rng();
        let n = 100_000;
        let ks: Vec<u64> = (0..n).map(|_| sample_strength(Strength::Poisson, &mut rng)).collect();
        assert!(ks.iter().all(|&k| k >= 1));
        let p1 = ks.iter().filter(|&&k| k == 1).count() as f64 / n as f64;
        let mean = ks.iter().sum::<u64>() as f64 / n as f64;
        assert!((p1 - (-1f64).exp()).abs() < 0.01, "P(k=1) = {p1}");
        assert!((mean - 2.0).abs() < 0.02, "mean = {mean}");
    }

    #[test]
    fn names_round_trip() {
        for op in Operator::ALL {
            for cfg in [MutationConfig::rls(op), MutationConfig::ea(op)] {
                assert_eq!(cfg.name().parse::<MutationConfig>().unwrap(), cfg);
            }
        }
        assert!("rls-hop".parse::<MutationConfig>().is_err());
        assert!("jump".parse::<MutationConfig>().is_err());
    }

    #[test]
    fn jump_move_on_e2() {
        let t = CrossTable::build(&e2());
        let mut ord = Ordering::identity(3);
        let (d, _) = Move::Jump(0, 2).delta(&t, &ord);
        Move::Jump(0, 2).apply(&mut ord);
        assert_eq!((ord.perm(), d), (&[1, 2, 0][..], -4));
    }

    #[test]
    fn moves_then_inverses_cancel() {
        let inst = generate_random(15, 12, 0.3, Seed(8)).unwrap();
        let t = CrossTable::build(&inst);
        let start = random_ordering(12, Seed(9));
        let mut rng = Seed(10).rng();
        for op in Operator::ALL {
            let mut ord = start.clone();
            let mut applied = Vec::new();
            let d = mutate_in_place(&mut ord, &t, op, 7, &mut rng, &mut applied, &mut Counters::default());
            let mut back = 0;
            for mv in applied.iter().rev() {
                let inv = mv.inverse();
                back += inv.delta(&t, &ord).0;
                inv.apply(&mut ord);
            }
            assert_eq!(ord, start);
            assert_eq!(d + back, 0);
        }
    }

    #[test]
    fn single_vertex_is_left_alone() {
        let t = CrossTable::build(&complete(3, 1));
        let mut rng = Seed(0).rng();
        for op in Operator::ALL {
            assert_eq!(mutate(&Ordering::identity(1), &t, op, 3, &mut rng), (Ordering::identity(1), 0));
        }
    }

    #[test]
    fn exchange_samples_cover_all_pairs_uniformly() {
        let mut rng = Seed(4).rng();
        let mut counts = std::collections::HashMap::new();
        let n = 60_000;
        for _ in 0..n {
            *counts.entry(Move::sample(Operator::Exchange, 4, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for c in counts.values() {
            assert!((*c as f64 / n as f64 - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn stop_rule_validation() {
        assert!(StopRule::new(None, None, Some(3)).is_err());
        assert!(StopRule::new(Some(0), None, None).is_ok());
        assert_eq!(stagnation_generations(100, 1.5), 1000);
        assert_eq!(stagnation_generations(3, 1.5), 6);
        assert_eq!(stagnation_generations(16, 1.5), 64);
    }

    #[test]
    fn zero_stagnation_returns_start() {
        let t = CrossTable::build(&e2());
        let stop = StopRule::new(Some(0), None, None).unwrap();
        let start = Ordering::identity(3);
        let tr = run_search(&t, MutationConfig::rls(Operator::Jump), stop, Seed(1), &start).unwrap();
        assert_eq!((tr.generations, &tr.final_ordering, tr.final_crossings), (0, &start, 5));
        let tr = run_scanning_rls(&t, ScanStrategy::Best, stop, Seed(1), &start).unwrap();
        assert_eq!(tr.generations, 0);
    }

    #[test]
    fn optimum_start_stays_optimal() {
        let inst = generate_random(10, 8, 0.4, Seed(2)).unwrap();
        let t = CrossTable::build(&inst);
        let (opt, ord) = exact_dp(&t).unwrap();
        for op in Operator::ALL {
            let tr = run_search(&t, MutationConfig::ea(op), StopRule::generations(500), Seed(5), &ord).unwrap();
            assert_eq!(tr.final_crossings, opt);
        }
    }

    #[test]
    fn jump_rls_solves_e2() {
        let t = CrossTable::build(&e2());
        for s in 0..20 {
            // with the default limit of 6 a run can stall one jump short
            let long = run_search(
                &t,
                MutationConfig::rls(Operator::Jump),
                StopRule::stagnation(3, 3.0),
                Seed(s),
                &Ordering::identity(3),
            )
            .unwrap();
            assert_eq!(long.final_crossings, 0, "seed {s}");
        }
    }

    #[test]
    fn best_scan_first_generation_on_e2() {
        let t = CrossTable::build(&e2());
        let start = Ordering::identity(3);
        let tr = run_scanning_rls(&t, ScanStrategy::Best, StopRule::generations(1), Seed(0), &start).unwrap();
        assert_eq!(tr.final_ordering.perm(), &[1, 2, 0]);
        assert_eq!(tr.improvements, vec![(0, 5), (1, 1)]);
        assert_eq!(tr.delta_ops, 6);
    }

    #[test]
    fn strict_local_optimum_counts_as_stagnation() {
        let t = CrossTable::build(&e2());
        let opt = Ordering::from_perm(vec![2, 1, 0]).unwrap();
        for s in ScanStrategy::ALL {
            let tr = run_scanning_rls(&t, s, StopRule::stagnation(3, 1.0), Seed(0), &opt).unwrap();
            assert_eq!((tr.generations, tr.final_crossings), (3, 0));
            assert_eq!(&tr.final_ordering, &opt);
        }
    }

    #[test]
    fn plateau_moves_are_taken() {
        let t = CrossTable::build(&complete(2, 2));
        let tr = run_scanning_rls(&t, ScanStrategy::Random, StopRule::generations(1), Seed(0), &Ordering::identity(2))
            .unwrap();
        assert_eq!(tr.final_ordering.perm(), &[1, 0]);
        assert_eq!(tr.final_crossings, 1);
    }

    #[test]
    fn target_stops_search() {
        let inst = generate_random(20, 20, 0.3, Seed(12)).unwrap();
        let t = CrossTable::build(&inst);
        let start = random_ordering(20, Seed(13));
        let k0 = crossings_of(&t, &start).unwrap();
        let stop = StopRule::generations(100_000).with_target(Some(k0 - 10));
        let tr = run_search(&t, MutationConfig::rls(Operator::Jump), stop, Seed(1), &start).unwrap();
        assert!(tr.final_crossings <= k0 - 10);
        assert_eq!(tr.first_reaching(k0 - 10), Some(tr.generations));
    }

    #[test]
    fn trace_lookup() {
        let mut tr = RunTrace::single("x", Seed(0), Ordering::identity(3), 10, Duration::ZERO);
        tr.improvements = vec![(0, 12), (1, 10), (5, 3)];
        assert_eq!([1, 2, 4, 8].map(|g| tr.best_at(g)), [10, 10, 10, 3]);
        assert_eq!(tr.best_at(0), 12);
        assert_eq!(tr.first_reaching(9), Some(5));
        assert_eq!(tr.first_reaching(2), None);
    }

    fn scan_case() -> impl Strategy<Value = (CrossTable, Ordering, u64)> {
        (2usize..30, 2usize..30, 0.05f64..0.6, any::<u64>()).prop_map(|(n1, n2, p, s)| {
            let t = CrossTable::build(&generate_random(n1, n2, p, Seed(s)).unwrap());
            (t, random_ordering(n2, Seed(s).child("start", 0)), s)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mutate_delta_is_exact((t, start, s) in scan_case(), k in 1u64..6) {
            let mut rng = Seed(s).rng();
            for op in Operator::ALL {
                let (out, d) = mutate(&start, &t, op, k, &mut rng);
                prop_assert_eq!(
                    crossings_of(&t, &out).unwrap() as i64 - crossings_of(&t, &start).unwrap() as i64, d);
            }
        }

        #[test]
        fn searches_are_elitist_and_reproducible((t, start, s) in scan_case()) {
            let n2 = t.n2();
            let stop = StopRule::stagnation(n2, 1.5).with_max_generations(Some(5_000));
            let mut traces = Vec::new();
            for op in Operator::ALL {
                traces.push(run_search(&t, MutationConfig::rls(op), stop, Seed(s), &start).unwrap());
                traces.push(run_search(&t, MutationConfig::ea(op), stop, Seed(s), &start).unwrap());
            }
            for strat in ScanStrategy::ALL {
                let tr = run_scanning_rls(&t, strat, stop, Seed(s), &start).unwrap();
                let cap = (n2 * n2) as u64 * tr.generations;
                prop_assert!(tr.delta_ops <= cap);
                traces.push(tr);
            }
            for tr in &traces {
                prop_assert!(tr.improvements.windows(2).all(|w| w[0].1 > w[1].1 && w[0].0 < w[1].0));
                prop_assert_eq!(tr.final_crossings, crossings_of(&t, &tr.final_ordering).unwrap());
                prop_assert_eq!(tr.improvements.last().unwrap().1, tr.final_crossings);
            }
            let again = run_scanning_rls(&t, ScanStrategy::Random, stop, Seed(s), &start).unwrap();
            prop_assert!(again.same_outcome(&traces[7]));
            let again = run_search(&t, MutationConfig::ea(Operator::Jump), stop, Seed(s), &start).unwrap();
            prop_assert!(again.same_outcome(&traces[5]));
        }

        #[test]
        fn best_gains_at_least_as_much_as_first((t, start, s) in scan_case()) {
            let one = StopRule::generations(1);
            let best = run_scanning_rls(&t, ScanStrategy::Best, one, Seed(s), &start).unwrap();
            let first = run_scanning_rls(&t, ScanStrategy::First, one, Seed(s), &start).unwrap();
            prop_assert!(best.final_crossings <= first.final_crossings);
        }

        #[test]
        fn best_scan_ends_in_jump_local_optimum(n1 in 2usize..12, n2 in 2usize..=7, p in 0.1f64..0.9, s in any::<u64>()) {
            let t = CrossTable::build(&generate_random(n1, n2, p, Seed(s)).unwrap());
            let start = random_ordering(n2, Seed(s ^ 3));
            let tr = run_scanning_rls(&t, ScanStrategy::Best, StopRule::stagnation(n2, 1.5), Seed(s), &start).unwrap();
            let k = tr.final_crossings;
            for i in 0..n2 {
                for j in 0..n2 {
                    let mut o = tr.final_ordering.clone();
                    o.jump(i, j);
                    prop_assert!(crossings_of(&t, &o).unwrap() >= k);
                }
            }
        }
    }
}
