//! Exhaustive property sweeps over `RPD(w)` against the poset oracle.
//!
//! Each suite counts the individual checks it ran and the ones that failed.
//! Informational suites record readings of statements that are known to be
//! ambiguous; they never fail a run.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::lattice::{
    join, join_with_trace, leq_by_extremal, meet, principal_disagreement, PosetOracle,
};
use crate::moveop::{
    big_composition, check_commutations, m_explicit, m_prime, m_recursive, movable, path_of, v_set,
    MoveContext,
};
use crate::moves::{apply_ladder, cover_moves, ladder_movable};
use crate::perm::Permutation;
use crate::pipedream::{PipeDream, Tile};
use crate::tableau::{
    bot_tableau, from_tableau, ladder_crossers, left_bump_counts, tableau_after_ladder, tableau_of,
    top_tableau, Tableau,
};

/// Result of one property suite.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: u64,
    pub failures: u64,
    pub informational: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        SuiteResult {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn info(name: &str) -> Self {
        SuiteResult {
            informational: true,
            ..SuiteResult::new(name)
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.informational || self.failures == 0
    }

    fn absorb(&mut self, other: &SuiteResult) {
        self.checks += other.checks;
        self.failures += other.failures;
        if self.first_failure.is_none() {
            self.first_failure.clone_from(&other.first_failure);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    /// The permutation, or `S_n` for a merged sweep.
    pub scope: String,
    pub permutations: usize,
    pub elements: usize,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    /// Plain-text summary table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {} permutation(s), {} pipe dream(s)",
            self.scope, self.permutations, self.elements
        );
        let width = self
            .suites
            .iter()
            .map(|s| s.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let _ = writeln!(
            out,
            "{:<width$}  {:>10}  {:>8}  status",
            "suite", "checks", "failures"
        );
        for s in &self.suites {
            let status = match (s.informational, s.failures) {
                (true, _) => "INFO",
                (false, 0) => "PASS",
                _ => "FAIL",
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>10}  {:>8}  {status}",
                s.name, s.checks, s.failures
            );
        }
        for s in self.suites.iter().filter(|s| s.failures > 0) {
            if let Some(msg) = &s.first_failure {
                let tag = if s.informational {
                    "note"
                } else {
                    "first failure"
                };
                let _ = writeln!(out, "{} {tag}: {}", s.name, msg.replace('\n', " / "));
            }
        }
        out
    }

    fn merge(scope: String, reports: &[VerifyReport]) -> VerifyReport {
        let mut suites: Vec<SuiteResult> = Vec::new();
        for r in reports {
            for s in &r.suites {
                match suites.iter_mut().find(|x| x.name == s.name) {
                    Some(x) => x.absorb(s),
                    None => suites.push(s.clone()),
                }
            }
        }
        VerifyReport {
            scope,
            permutations: reports.iter().map(|r| r.permutations).sum(),
            elements: reports.iter().map(|r| r.elements).sum(),
            suites,
        }
    }
}

/// Which suites to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// `V_ij` enumeration is skipped above this grid size.
    pub max_n_minimality: usize,
    /// Triples sampled for associativity.
    pub triples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_n_minimality: 4,
            triples: 200,
        }
    }
}

/// Runs every suite on `RPD(w)`.
pub fn verify_permutation(w: &Permutation, opts: &VerifyOptions) -> Result<VerifyReport> {
    let oracle = PosetOracle::build(w)?;
    let mut suites = vec![
        lattice_suite(&oracle)?,
        axioms_suite(&oracle, opts.triples)?,
        m_operator_suite(&oracle),
    ];
    if w.n() <= opts.max_n_minimality {
        suites.push(minimality_suite(&oracle)?);
    }
    suites.extend([
        commutation_suite(&oracle),
        big_composition_suite(&oracle),
        comparability_suite(&oracle)?,
        join_tableau_suite(&oracle)?,
        reconstruction_suite(&oracle)?,
        tableau_dynamics_suite(&oracle)?,
        extremal_suite(&oracle)?,
    ]);
    suites.extend(top_row_suites(&oracle)?);
    suites.push(literal_ladder_rows_suite(&oracle)?);
    Ok(VerifyReport {
        scope: w.to_string(),
        permutations: 1,
        elements: oracle.len(),
        suites,
    })
}

/// Runs [`verify_permutation`] for every `w ∈ S_n` in parallel and merges
/// the tallies in lexicographic order of `w`.
pub fn verify_all(n: usize, opts: &VerifyOptions) -> Result<VerifyReport> {
    let perms: Vec<Permutation> = Permutation::all(n).collect();
    let reports: Vec<VerifyReport> = perms
        .par_iter()
        .map(|w| verify_permutation(w, opts))
        .collect::<Result<_>>()?;
    Ok(VerifyReport::merge(format!("S_{n}"), &reports))
}

fn pair_msg(a: &PipeDream, b: &PipeDream) -> String {
    format!("pair\n{a}\nand\n{b}")
}

fn lattice_suite(o: &PosetOracle) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("lattice");
    let w = o.permutation();
    let bottom = o.index_of(&PipeDream::bottom(w));
    let top = o.index_of(&PipeDream::top(w));
    s.check(
        o.minimal_elements() == bottom.into_iter().collect_vec(),
        || "D_bot is not the unique minimum".into(),
    );
    s.check(
        o.maximal_elements() == top.into_iter().collect_vec(),
        || "D_top is not the unique maximum".into(),
    );
    let xs = o.elements();
    for a in 0..o.len() {
        for b in a..o.len() {
            let oj = o.oracle_join(a, b);
            let om = o.oracle_meet(a, b);
            s.check(oj.is_ok() && om.is_ok(), || {
                format!("bounds not unique for {}", pair_msg(&xs[a], &xs[b]))
            });
            let j = join_with_trace(&xs[a], &xs[b])?;
            s.check(oj.as_ref().ok() == o.index_of(&j.result).as_ref(), || {
                format!("join differs from oracle for {}", pair_msg(&xs[a], &xs[b]))
            });
            s.check(j.steps.len() <= o.len(), || {
                format!(
                    "join took {} steps for {}",
                    j.steps.len(),
                    pair_msg(&xs[a], &xs[b])
                )
            });
            let m = meet(&xs[a], &xs[b])?;
            s.check(om.as_ref().ok() == o.index_of(&m).as_ref(), || {
                format!("meet differs from oracle for {}", pair_msg(&xs[a], &xs[b]))
            });
        }
    }
    Ok(s)
}

fn axioms_suite(o: &PosetOracle, triples: usize) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("lattice-axioms");
    let xs = o.elements();
    for (x, y) in xs.iter().cartesian_product(xs) {
        let j = join(x, y)?;
        let m = meet(x, y)?;
        s.check(j == join(y, x)? && m == meet(y, x)?, || {
            format!("not commutative on {}", pair_msg(x, y))
        });
        s.check(join(x, &m)? == *x && meet(x, &j)? == *x, || {
            format!("absorption fails on {}", pair_msg(x, y))
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..triples.min(xs.len().pow(3)) {
        let (a, b, c) = (
            &xs[rng.random_range(0..xs.len())],
            &xs[rng.random_range(0..xs.len())],
            &xs[rng.random_range(0..xs.len())],
        );
        s.check(join(&join(a, b)?, c)? == join(a, &join(b, c)?)?, || {
            "join is not associative".into()
        });
        s.check(meet(&meet(a, b)?, c)? == meet(a, &meet(b, c)?)?, || {
            "meet is not associative".into()
        });
    }
    Ok(s)
}

fn m_operator_suite(o: &PosetOracle) -> SuiteResult {
    let mut s = SuiteResult::new("m-operator");
    let w = o.permutation();
    for (a, d) in o.elements().iter().enumerate() {
        for t in d.crosses() {
            let ladder = ladder_movable(d, t);
            if !movable(d, t) {
                s.check(ladder.is_none(), || {
                    format!("{t} ladder movable but not movable in\n{d}")
                });
                continue;
            }
            let ctx = MoveContext::of(d, t).expect("movable");
            s.check(ctx.is_ladder_movable() == ladder.is_some(), || {
                format!("ladder criterion disagrees at {t} in\n{d}")
            });
            let e = m_explicit(d, t);
            let r = m_recursive(d, t);
            let p = m_prime(d, t);
            s.check(e.is_ok() && e == r && e == p, || {
                format!("three forms of M differ at {t} in\n{d}")
            });
            let Ok(e) = e else { continue };
            if let Some(lm) = ladder {
                s.check(apply_ladder(d, lm.pivot).as_ref() == Ok(&e), || {
                    format!("M is not the ladder move at {t} in\n{d}")
                });
            }
            let up = o.index_of(&e);
            s.check(
                e.is_reduced()
                    && e.permutation() == *w
                    && !e.is_cross(t)
                    && up.is_some_and(|b| b != a && o.leq(a, b)),
                || {
                    format!(
                        "M at {t} is not a strictly larger element with a bump there, from\n{d}"
                    )
                },
            );
            let ps = path_of(d, t).expect("movable");
            s.check(ps.corners.iter().all(|&c| !d.is_cross(c)), || {
                format!("path corner is a cross for {t} in\n{d}")
            });
            s.check(shape_exits_hold(d, &ps.shape, &ps.path, t), || {
                format!("a pipe leaves the shape of {t} through the wrong side in\n{d}")
            });
        }
    }
    s
}

// Horizontal crosses inside Shape \ Path leave through the left side of the
// shape, vertical ones through the bottom.
fn shape_exits_hold(d: &PipeDream, shape: &BTreeSet<Tile>, path: &[Tile], t: Tile) -> bool {
    let on_path: HashSet<Tile> = path.iter().copied().collect();
    let pipes = d.crossing_pipes();
    for (&tile, &(v, h)) in &pipes {
        if !shape.contains(&tile) || on_path.contains(&tile) {
            continue;
        }
        for (pipe, horizontal) in [(h, true), (v, false)] {
            let trace = d.trace_pipe(pipe);
            let pos = trace
                .visits
                .iter()
                .position(|x| x.tile == tile)
                .expect("pipe crosses here");
            let exit = trace.visits[pos..]
                .iter()
                .find(|x| !shape.contains(&x.tile));
            let ok = match (exit, horizontal) {
                (None, true) => t.col == 1,
                (None, false) => false,
                (Some(x), true) => x.tile.col + 1 == t.col,
                (Some(x), false) => x.tile.row == t.row + 1,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

fn minimality_suite(o: &PosetOracle) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("minimality");
    for d in o.elements() {
        for t in d.crosses() {
            let v = v_set(d, t)?;
            if !movable(d, t) {
                s.check(v.is_empty(), || {
                    format!("V_{t} is nonempty but {t} is not movable in\n{d}")
                });
                continue;
            }
            let m = m_explicit(d, t)?;
            let idx: Vec<usize> = v.iter().filter_map(|q| o.index_of(q)).collect();
            let minimal: Vec<usize> = idx
                .iter()
                .copied()
                .filter(|&q| !idx.iter().any(|&r| r != q && o.leq(r, q)))
                .collect();
            s.check(
                minimal == vec![o.index_of(&m).unwrap_or(usize::MAX)],
                || format!("M at {t} is not the unique minimum of V in\n{d}"),
            );
        }
    }
    Ok(s)
}

fn commutation_suite(o: &PosetOracle) -> SuiteResult {
    let mut s = SuiteResult::new("commutation");
    for d in o.elements() {
        for r in check_commutations(d) {
            s.check(r.holds, || {
                format!(
                    "{:?} fails for {} and {} in\n{d}",
                    r.rule, r.first, r.second
                )
            });
        }
    }
    s
}

fn big_composition_suite(o: &PosetOracle) -> SuiteResult {
    let mut s = SuiteResult::new("big-composition");
    for d in o.elements() {
        let mov: Vec<Tile> = d.crosses().into_iter().filter(|&t| movable(d, t)).collect();
        for size in 1..=3 {
            for set in mov.iter().copied().combinations(size) {
                if !set
                    .iter()
                    .tuple_combinations()
                    .all(|(a, b)| a.southwest_incomparable(*b))
                {
                    continue;
                }
                let expected = big_composition(d, &set);
                for order in set.iter().copied().permutations(size) {
                    let mut cur = Ok(d.clone());
                    for t in order {
                        cur = cur.and_then(|c| m_explicit(&c, t));
                    }
                    s.check(cur.is_ok() && cur == expected, || {
                        format!("composition at {set:?} depends on order in\n{d}")
                    });
                }
            }
        }
    }
    s
}

fn tableaux(o: &PosetOracle) -> Result<Vec<Tableau>> {
    o.elements().iter().map(tableau_of).collect()
}

fn comparability_suite(o: &PosetOracle) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("comparability");
    let ts = tableaux(o)?;
    let distinct: HashSet<&Tableau> = ts.iter().collect();
    s.check(distinct.len() == ts.len(), || {
        "two pipe dreams share a tableau".into()
    });
    let xs = o.elements();
    for a in 0..o.len() {
        for b in 0..o.len() {
            let by_tableau = ts[a].leq(&ts[b])?;
            s.check(by_tableau == o.leq(a, b), || {
                format!(
                    "tableau order disagrees with the lattice on {}",
                    pair_msg(&xs[a], &xs[b])
                )
            });
            if by_tableau && a != b {
                let p = principal_disagreement(&xs[a], &xs[b])?;
                s.check(xs[a].is_cross(p.tile), || {
                    format!(
                        "principal disagreement is a bump in the lower dream of {}",
                        pair_msg(&xs[a], &xs[b])
                    )
                });
            }
        }
    }
    Ok(s)
}

fn join_tableau_suite(o: &PosetOracle) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("join-tableau");
    let w = o.permutation();
    let b = left_bump_counts(w);
    let bot = bot_tableau(w);
    let xs = o.elements();
    let ts = tableaux(o)?;
    for a in 0..o.len() {
        for c in a..o.len() {
            let tj = tableau_of(&join(&xs[a], &xs[c])?)?;
            let tm = tableau_of(&meet(&xs[a], &xs[c])?)?;
            for (&(x, y), &t1) in ts[a].entries() {
                let t2 = ts[c].get(x, y).expect("same keys");
                let (j, m) = (tj.get(x, y).unwrap(), tm.get(x, y).unwrap());
                let bx = b[x - 1];
                let lo = bot.get(x, y).unwrap();
                s.check(j >= t1.max(t2) && m <= t1.min(t2), || {
                    format!(
                        "entry ({x},{y}) escapes its bounds for {}",
                        pair_msg(&xs[a], &xs[c])
                    )
                });
                s.check(!(t1 == bx || t2 == bx) || j == bx, || {
                    format!(
                        "join entry ({x},{y}) is not saturated for {}",
                        pair_msg(&xs[a], &xs[c])
                    )
                });
                s.check(!(t1 == lo || t2 == lo) || m == lo, || {
                    format!(
                        "meet entry ({x},{y}) is not at its floor for {}",
                        pair_msg(&xs[a], &xs[c])
                    )
                });
            }
            for x in 1..=w.n() {
                let has_top = |t: &Tableau| {
                    t.entries()
                        .iter()
                        .any(|(&(px, _), &v)| px == x && v == b[x - 1])
                };
                s.check(has_top(&tj) == (has_top(&ts[a]) || has_top(&ts[c])), || {
                    format!(
                        "column {x} saturation differs for {}",
                        pair_msg(&xs[a], &xs[c])
                    )
                });
            }
        }
    }
    Ok(s)
}

fn reconstruction_suite(o: &PosetOracle) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("reconstruction");
    for d in o.elements() {
        let back = from_tableau(&tableau_of(d)?);
        s.check(back.as_ref() == Ok(d), || {
            format!("tableau of\n{d}\ndoes not rebuild it: {back:?}")
        });
    }
    Ok(s)
}

fn tableau_dynamics_suite(o: &PosetOracle) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("tableau-dynamics");
    let w = o.permutation();
    s.check(bot_tableau(w) == tableau_of(&PipeDream::bottom(w))?, || {
        "D_bot formula fails".into()
    });
    s.check(top_tableau(w) == tableau_of(&PipeDream::top(w))?, || {
        "D_top formula fails".into()
    });
    let b = left_bump_counts(w);
    for d in o.elements() {
        let counts: Vec<usize> = (1..=w.n())
            .map(|x| d.trace_pipe(x).left_bumps.len())
            .collect();
        s.check(counts == b, || format!("left bump counts change in\n{d}"));
        let t = tableau_of(d)?;
        for lm in cover_moves(d) {
            let predicted = tableau_after_ladder(&t, d, lm.pivot)?;
            let actual = tableau_of(&apply_ladder(d, lm.pivot)?)?;
            s.check(predicted == actual, || {
                format!("ladder at {} mispredicted in\n{d}", lm.pivot)
            });
        }
    }
    Ok(s)
}

fn extremal_suite(o: &PosetOracle) -> Result<SuiteResult> {
    let mut s = SuiteResult::new("extremal");
    let xs = o.elements();
    for a in 0..o.len() {
        for b in 0..o.len() {
            s.check(leq_by_extremal(&xs[a], &xs[b])? == o.leq(a, b), || {
                format!("extremal test disagrees on {}", pair_msg(&xs[a], &xs[b]))
            });
        }
    }
    Ok(s)
}

fn row_crosses(d: &PipeDream) -> BTreeSet<usize> {
    d.crosses()
        .into_iter()
        .filter(|t| t.row == 1)
        .map(|t| t.col)
        .collect()
}

fn col_crosses(d: &PipeDream) -> BTreeSet<usize> {
    d.crosses()
        .into_iter()
        .filter(|t| t.col == 1)
        .map(|t| t.row)
        .collect()
}

/// The top-row statement for joins, its column-one dual for meets, and the
/// literal wording of the second clause (bumps of the meet's first column
/// against the union of crosses), which is informational.
fn top_row_suites(o: &PosetOracle) -> Result<[SuiteResult; 3]> {
    let mut row = SuiteResult::new("top-row");
    let mut col = SuiteResult::new("first-column-dual");
    let mut literal = SuiteResult::info("first-column-literal");
    let xs = o.elements();
    let n = o.permutation().n();
    for a in 0..o.len() {
        for b in a..o.len() {
            let (x, y) = (&xs[a], &xs[b]);
            let j = join(x, y)?;
            let m = meet(x, y)?;
            let union_row: BTreeSet<usize> =
                row_crosses(x).union(&row_crosses(y)).copied().collect();
            row.check(row_crosses(&j) == union_row, || {
                format!("top row of the join for {}", pair_msg(x, y))
            });
            let union_col: BTreeSet<usize> =
                col_crosses(x).union(&col_crosses(y)).copied().collect();
            col.check(col_crosses(&m) == union_col, || {
                format!("first column of the meet for {}", pair_msg(x, y))
            });
            let bumps: BTreeSet<usize> = (1..=n).filter(|&r| !m.get(r, 1)).collect();
            literal.check(bumps == union_col, || {
                "bumps in the first column of the meet are not the union of first-column crosses".into()
            });
        }
    }
    Ok([row, col, literal])
}

/// How often the ladder-move tableau update, read with rows `h-1..=i`,
/// would differ from the recomputed tableau.
fn literal_ladder_rows_suite(o: &PosetOracle) -> Result<SuiteResult> {
    let mut s = SuiteResult::info("tableau-rows-literal");
    for d in o.elements() {
        let t = tableau_of(d)?;
        for lm in cover_moves(d) {
            let h = lm.dest.row;
            let (x, ys) = ladder_crossers(d, lm.pivot, h.saturating_sub(1)..=lm.pivot.row)?;
            let mut entries: BTreeMap<(usize, usize), usize> = t.entries().clone();
            for y in ys {
                *entries.get_mut(&(x, y)).expect("crossing pipes are keys") += 1;
            }
            let literal = Tableau::new(t.permutation().clone(), entries)?;
            let actual = tableau_of(&apply_ladder(d, lm.pivot)?)?;
            s.check(literal == actual, || {
                format!("rows h-1..=i over-count at ladder {} in\n{d}", lm.pivot)
            });
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_s4_passes() {
        let report = verify_all(4, &VerifyOptions::default()).unwrap();
        assert!(report.passed(), "{}", report.table());
        assert_eq!(report.permutations, 24);
        assert!(report.suite("minimality").unwrap().checks > 0);
        assert!(report.table().contains("PASS"));
    }

    #[test]
    fn single_permutation() {
        let w: Permutation = "1432".parse().unwrap();
        let report = verify_permutation(&w, &VerifyOptions::default()).unwrap();
        assert!(report.passed(), "{}", report.table());
        assert_eq!(report.elements, 5);
    }
}
