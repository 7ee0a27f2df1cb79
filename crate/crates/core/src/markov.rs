//! A lazy random walk on `RPD(w)`: pick a uniform cross, then move up with
//! `M_ij` or down with the transpose-dual move, and measure how fast the
//! empirical distribution over many walks approaches uniform.
//!
//! Walks use ChaCha8 seeded from the run seed, one stream per walk index.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::oracle_budget;
use crate::moveop::{m_explicit, movable};
use crate::moves::enumerate_rpd_bounded;
use crate::perm::Permutation;
use crate::pipedream::{PipeDream, Tile};

#[derive(Clone, Debug, PartialEq)]
pub struct WalkConfig {
    pub w: Permutation,
    /// Probability of the upward branch.
    pub p: f64,
    pub steps: usize,
    pub walks: usize,
    pub seed: u64,
    /// Checkpoints before this step are not reported.
    pub burn_in: usize,
}

impl WalkConfig {
    pub fn new(w: Permutation) -> Self {
        WalkConfig {
            w,
            p: 0.5,
            steps: 200,
            walks: 10_000,
            seed: 42,
            burn_in: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidArgument(format!(
                "probability {} is outside [0,1]",
                self.p
            )));
        }
        if self.steps == 0 || self.walks == 0 {
            return Err(Error::InvalidArgument(
                "steps and walks must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Which branch a step took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Up(Tile),
    Down(Tile),
    /// The chosen move was undefined; the state is unchanged.
    StayUp(Tile),
    StayDown(Tile),
    /// No crosses to choose from.
    Idle,
}

/// `M_ji(Dᵗ)ᵗ`, when `(j,i)` is movable in the transpose.
pub fn inverse_move(d: &PipeDream, t: Tile) -> Option<PipeDream> {
    let dt = d.transpose();
    let s = t.transpose();
    if !movable(&dt, s) {
        return None;
    }
    m_explicit(&dt, s).ok().map(|x| x.transpose())
}

/// One step of the chain.
pub fn step<R: Rng + ?Sized>(d: &PipeDream, rng: &mut R, p: f64) -> (PipeDream, StepKind) {
    let crosses = d.crosses();
    if crosses.is_empty() {
        return (d.clone(), StepKind::Idle);
    }
    let t = crosses[rng.random_range(0..crosses.len())];
    if rng.random_bool(p) {
        if movable(d, t) {
            if let Ok(next) = m_explicit(d, t) {
                return (next, StepKind::Up(t));
            }
        }
        (d.clone(), StepKind::StayUp(t))
    } else {
        match inverse_move(d, t) {
            Some(next) => (next, StepKind::Down(t)),
            None => (d.clone(), StepKind::StayDown(t)),
        }
    }
}

/// The generator for walk number `walk` of a run.
pub fn walk_rng(seed: u64, walk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walk);
    rng
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub step: usize,
    pub tv_distance: f64,
    /// Distinct states seen by any walk up to this step.
    pub states_visited: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkReport {
    pub states: Vec<PipeDream>,
    pub rows: Vec<TraceRow>,
    /// Visits per state over all walks and steps, aligned with `states`.
    pub histogram: Vec<u64>,
    pub up_steps: u64,
    pub down_steps: u64,
    pub lazy_steps: u64,
}

impl WalkReport {
    pub fn final_tv(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.tv_distance)
    }

    pub fn all_visited(&self) -> bool {
        self.histogram.iter().all(|&c| c > 0)
    }

    /// `step,tv_distance,states_visited`, one row per checkpoint.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,tv_distance,states_visited\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{:.6},{}", r.step, r.tv_distance, r.states_visited);
        }
        out
    }
}

/// Total variation distance between the empirical distribution `counts`
/// (summing to `total`) and the uniform distribution on its support.
pub fn tv_to_uniform(counts: &[u64], total: u64) -> f64 {
    let m = counts.len() as f64;
    let total = total as f64;
    0.5 * counts
        .iter()
        .map(|&c| (c as f64 / total - 1.0 / m).abs())
        .sum::<f64>()
}

struct Walk {
    path: Vec<u32>,
    up: u64,
    down: u64,
    lazy: u64,
}

/// Runs `cfg.walks` independent walks from `D_bot(w)` in parallel and
/// reports the TV distance to uniform after every step.
pub fn run_walks(cfg: &WalkConfig) -> Result<WalkReport> {
    cfg.validate()?;
    let mut states = enumerate_rpd_bounded(&cfg.w, oracle_budget())?;
    states.sort();
    let index: HashMap<PipeDream, u32> = states
        .iter()
        .enumerate()
        .map(|(i, d)| (d.clone(), i as u32))
        .collect();
    let start = PipeDream::bottom(&cfg.w);

    let walks: Vec<Walk> = (0..cfg.walks as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = walk_rng(cfg.seed, k);
            let mut cur = start.clone();
            let mut walk = Walk {
                path: Vec::with_capacity(cfg.steps + 1),
                up: 0,
                down: 0,
                lazy: 0,
            };
            walk.path.push(index[&cur]);
            for _ in 0..cfg.steps {
                let (next, kind) = step(&cur, &mut rng, cfg.p);
                match kind {
                    StepKind::Up(_) => walk.up += 1,
                    StepKind::Down(_) => walk.down += 1,
                    _ => walk.lazy += 1,
                }
                let Some(&i) = index.get(&next) else {
                    return Err(Error::Internal(format!(
                        "walk left RPD({}):\n{next}",
                        cfg.w
                    )));
                };
                walk.path.push(i);
                cur = next;
            }
            Ok(walk)
        })
        .collect::<Result<_>>()?;

    let m = states.len();
    let mut histogram = vec![0u64; m];
    let mut seen = vec![false; m];
    let mut seen_count = 0;
    let mut rows = Vec::new();
    for s in 0..=cfg.steps {
        let mut counts = vec![0u64; m];
        for walk in &walks {
            let i = walk.path[s] as usize;
            counts[i] += 1;
            if !seen[i] {
                seen[i] = true;
                seen_count += 1;
            }
        }
        for (h, c) in histogram.iter_mut().zip(&counts) {
            *h += c;
        }
        if s >= cfg.burn_in {
            rows.push(TraceRow {
                step: s,
                tv_distance: tv_to_uniform(&counts, cfg.walks as u64),
                states_visited: seen_count,
            });
        }
    }
    Ok(WalkReport {
        states,
        rows,
        histogram,
        up_steps: walks.iter().map(|w| w.up).sum(),
        down_steps: walks.iter().map(|w| w.down).sum(),
        lazy_steps: walks.iter().map(|w| w.lazy).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::leq;
    use crate::moves::{cover_moves, enumerate_rpd};

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn identity_chain_is_constant() {
        let mut rng = walk_rng(1, 0);
        let d = PipeDream::empty(3);
        assert_eq!(step(&d, &mut rng, 0.5), (d.clone(), StepKind::Idle));
        let mut cfg = WalkConfig::new(Permutation::identity());
        cfg.walks = 10;
        cfg.steps = 5;
        let report = run_walks(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.tv_distance == 0.0));
    }

    #[test]
    fn moves_go_up_and_down() {
        for n in 1..=4 {
            for w in Permutation::all(n) {
                let bottom = PipeDream::bottom(&w);
                for d in enumerate_rpd(&w) {
                    for t in d.crosses() {
                        if let Some(lower) = inverse_move(&d, t) {
                            assert!(lower != d && leq(&lower, &d).unwrap());
                            assert!(lower.is_reduced() && lower.permutation() == w);
                        }
                        if movable(&d, t) {
                            let upper = m_explicit(&d, t).unwrap();
                            assert!(upper != d && leq(&d, &upper).unwrap());
                        }
                    }
                }
                assert!(bottom
                    .crosses()
                    .iter()
                    .all(|&t| inverse_move(&bottom, t).is_none()));
            }
        }
    }

    #[test]
    fn simple_edges_are_undone() {
        for n in 1..=4 {
            for w in Permutation::all(n) {
                for d in enumerate_rpd(&w) {
                    for lm in cover_moves(&d).into_iter().filter(|m| m.is_simple()) {
                        let up = m_explicit(&d, lm.pivot).unwrap();
                        assert_eq!(inverse_move(&up, lm.dest), Some(d.clone()));
                    }
                }
            }
        }
    }

    #[test]
    fn walks_are_reproducible() {
        let mut cfg = WalkConfig::new(p("1432"));
        cfg.walks = 500;
        cfg.steps = 50;
        let a = run_walks(&cfg).unwrap();
        let b = run_walks(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.all_visited());
        assert!(a
            .to_csv()
            .starts_with("step,tv_distance,states_visited\n0,"));
        cfg.seed = 7;
        assert_ne!(run_walks(&cfg).unwrap().to_csv(), a.to_csv());
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_to_uniform(&[1, 1], 2), 0.0);
        assert_eq!(tv_to_uniform(&[2, 0], 2), 0.5);
    }
}
