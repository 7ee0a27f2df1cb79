//! Acceptance checks, one line per criterion.

use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pipedream_lattice::lattice::{join, join_with_trace, leq, leq_by_extremal, meet, PosetOracle};
use pipedream_lattice::markov::{run_walks, WalkConfig};
use pipedream_lattice::moveop::{
    check_commutations, m_explicit, m_prime, m_recursive, movable, v_set,
};
use pipedream_lattice::moves::{
    cover_moves, enumerate_by_subsets, enumerate_rpd, enumerate_rpd_bounded,
};
use pipedream_lattice::tableau::{
    bot_tableau, from_tableau, tableau_after_ladder, tableau_of, top_tableau,
};
use pipedream_lattice::verify::{verify_all, VerifyOptions, VerifyReport};
use pipedream_lattice::{Permutation, PipeDream, Tile};

struct Check {
    checks: u64,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn that(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn suites(&mut self, report: &VerifyReport, names: &[&str]) {
        for name in names {
            match report.suite(name) {
                Some(s) => {
                    self.checks += s.checks;
                    if s.failures > 0 {
                        self.failures.push(format!(
                            "{} suite on {}: {} failures, first: {}",
                            name,
                            report.scope,
                            s.failures,
                            s.first_failure.clone().unwrap_or_default()
                        ));
                    }
                }
                None => self
                    .failures
                    .push(format!("{name} suite missing on {}", report.scope)),
            }
        }
    }
}

fn p(s: &str) -> Permutation {
    s.parse().unwrap()
}

fn t(i: usize, j: usize) -> Tile {
    Tile::new(i, j)
}

fn pd(n: usize, crosses: &[(usize, usize)]) -> PipeDream {
    PipeDream::from_crosses(n, crosses.iter().copied()).unwrap()
}

fn text(rows: &[&str]) -> PipeDream {
    rows.join("\n").parse().unwrap()
}

fn s_n(n: usize) -> impl Iterator<Item = Permutation> {
    Permutation::all(n)
}

/// Join and meet against the poset oracle on every pair.
fn oracle_pairs(c: &mut Check, w: &Permutation) {
    let o = match PosetOracle::build(w) {
        Ok(o) => o,
        Err(e) => return c.that(false, || format!("oracle for {w}: {e}")),
    };
    let xs = o.elements();
    let m = o.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect();
    for (a, b) in pairs {
        let j = join(&xs[a], &xs[b]).ok().and_then(|d| o.index_of(&d));
        c.that(j.is_some() && j == o.oracle_join(a, b).ok(), || {
            format!("join of\n{}\nand\n{}\nin RPD({w})", xs[a], xs[b])
        });
        let mt = meet(&xs[a], &xs[b]).ok().and_then(|d| o.index_of(&d));
        c.that(mt.is_some() && mt == o.oracle_meet(a, b).ok(), || {
            format!("meet of\n{}\nand\n{}\nin RPD({w})", xs[a], xs[b])
        });
    }
}

fn criterion_1() -> Check {
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 2..=5 {
        for w in s_n(n) {
            let mut a = enumerate_rpd(&w);
            let mut b = enumerate_by_subsets(&w).unwrap();
            a.sort();
            b.sort();
            c.that(a == b, || {
                format!("RPD({w}) differs from the subset enumeration")
            });
            oracle_pairs(&mut c, &w);
        }
    }
    let all6: Vec<Permutation> = s_n(6).collect();
    let mut picked = 0;
    while picked < 25 {
        let w = &all6[rng.random_range(0..all6.len())];
        if enumerate_rpd_bounded(w, 50_000).is_err() {
            continue;
        }
        oracle_pairs(&mut c, w);
        picked += 1;
    }
    c
}

fn criterion_2() -> Check {
    let mut c = Check::new();
    let d1 = text(&["..+...", ".....", "+++.", "...", "+.", "."]);
    let d2 = text(&["...++.", ".+...", ".+..", "...", "+.", "."]);
    let after31 = text(&["..+...", ".+++.", "....", "...", "+.", "."]);
    let after32 = text(&["..+++.", "..+..", "....", "...", "+.", "."]);
    match join_with_trace(&d1, &d2) {
        Ok(trace) => {
            let tiles: Vec<Tile> = trace.steps.iter().map(|s| s.disagreement.tile).collect();
            c.that(tiles == [t(3, 1), t(3, 2), t(2, 2)], || {
                format!("steps {tiles:?}")
            });
            c.that(
                trace.steps.first().map(|s| &s.first) == Some(&after31),
                || "first step does not give M_31(D1)".into(),
            );
            c.that(
                trace.steps.get(1).map(|s| &s.second) == Some(&after32),
                || "second step does not give M_32(D2)".into(),
            );
            c.that(
                trace.result.to_string() == "..+++.\n..+..\n....\n...\n+.\n.",
                || format!("result\n{}", trace.result),
            );
        }
        Err(e) => c.that(false, || format!("join failed: {e}")),
    }
    c.that(join(&d2, &d1).ok() == Some(after32), || {
        "join is not symmetric".into()
    });
    c
}

fn criterion_3() -> Check {
    let mut c = Check::new();
    for n in 1..=5 {
        for w in s_n(n) {
            for d in enumerate_rpd(&w) {
                for x in d.crosses().into_iter().filter(|&x| movable(&d, x)) {
                    let e = m_explicit(&d, x);
                    c.that(
                        e.is_ok() && e == m_recursive(&d, x) && e == m_prime(&d, x),
                        || format!("forms of M differ at {x} in\n{d}"),
                    );
                }
            }
        }
    }
    c
}

fn criterion_4(s4: &VerifyReport) -> Check {
    let mut c = Check::new();
    c.suites(s4, &["minimality"]);
    let d = pd(6, &[(2, 2), (3, 1), (3, 2), (3, 3), (4, 1), (4, 2)]);
    c.that(d.permutation() == p("126543"), || {
        "example permutation".into()
    });
    match v_set(&d, t(3, 2)) {
        Ok(v) => {
            c.that(
                v.contains(&pd(6, &[(1, 3), (2, 3), (2, 4), (3, 1), (4, 1), (4, 2)])),
                || "member of V_32 missing".into(),
            );
            c.that(
                !v.contains(&pd(6, &[(1, 3), (1, 4), (2, 3), (2, 4), (3, 1), (4, 2)])),
                || "non-member found in V_32".into(),
            );
            let m = m_explicit(&d, t(3, 2)).unwrap();
            c.that(v.iter().all(|x| leq(&m, x).unwrap_or(false)), || {
                "M_32 is not the minimum of V_32".into()
            });
        }
        Err(e) => c.that(false, || format!("V_32: {e}")),
    }
    c
}

fn figure_dream() -> PipeDream {
    pd(6, &[(1, 1), (1, 2), (2, 2), (2, 4), (3, 2), (5, 1)])
}

fn criterion_5(s5: &VerifyReport) -> Check {
    let mut c = Check::new();
    c.suites(s5, &["comparability"]);
    for n in 1..=5 {
        for w in s_n(n) {
            let o = PosetOracle::build(&w).unwrap();
            let xs = o.elements();
            let ts: Vec<_> = xs.iter().map(|d| tableau_of(d).unwrap()).collect();
            for a in 0..xs.len() {
                for b in 0..xs.len() {
                    c.that(ts[a].leq(&ts[b]).unwrap() == o.leq(a, b), || {
                        format!("tableau order differs on\n{}\nand\n{}", xs[a], xs[b])
                    });
                }
            }
        }
    }
    let d = figure_dream();
    c.that(d.permutation() == p("314652"), || {
        "figure permutation".into()
    });
    c.that(tableau_of(&d).unwrap().get(5, 6) == Some(3), || {
        "T_D(5,6) is not 3".into()
    });
    c.that(top_tableau(&p("314652")).get(5, 6) == Some(4), || {
        "T_top(5,6) is not 4".into()
    });
    c
}

fn criterion_6(s5: &VerifyReport) -> Check {
    let mut c = Check::new();
    c.suites(s5, &["reconstruction"]);
    for d in enumerate_rpd(&p("314652")) {
        let back = tableau_of(&d).and_then(|tab| from_tableau(&tab));
        c.that(back.as_ref() == Ok(&d), || {
            format!("no round trip for\n{d}")
        });
    }
    c
}

fn criterion_7(s5: &VerifyReport) -> Check {
    let mut c = Check::new();
    c.suites(s5, &["commutation", "top-row", "first-column-dual"]);
    for n in 1..=5 {
        for w in s_n(n) {
            for d in enumerate_rpd(&w) {
                for r in check_commutations(&d) {
                    c.that(r.holds, || {
                        format!("{:?} at {} and {} in\n{d}", r.rule, r.first, r.second)
                    });
                }
            }
        }
    }
    c
}

fn criterion_8(s5: &VerifyReport) -> Check {
    let mut c = Check::new();
    c.suites(s5, &["tableau-dynamics"]);
    for n in 1..=5 {
        for w in s_n(n) {
            c.that(
                bot_tableau(&w) == tableau_of(&PipeDream::bottom(&w)).unwrap(),
                || format!("bottom tableau of {w}"),
            );
            for d in enumerate_rpd(&w) {
                let before = tableau_of(&d).unwrap();
                for lm in cover_moves(&d) {
                    let after = m_explicit(&d, lm.pivot).and_then(|e| tableau_of(&e));
                    let predicted = tableau_after_ladder(&before, &d, lm.pivot);
                    c.that(after.is_ok() && after.ok() == predicted.ok(), || {
                        format!("ladder at {} in\n{d}", lm.pivot)
                    });
                }
            }
        }
    }
    c
}

fn criterion_9(s5: &VerifyReport) -> Check {
    let mut c = Check::new();
    c.suites(s5, &["extremal"]);
    for n in 1..=5 {
        for w in s_n(n) {
            let xs = enumerate_rpd(&w);
            for a in &xs {
                for b in &xs {
                    c.that(leq_by_extremal(a, b).ok() == leq(a, b).ok(), || {
                        format!("extremal comparison of\n{a}\nand\n{b}")
                    });
                }
            }
        }
    }
    c
}

fn criterion_10() -> (Check, String) {
    let mut c = Check::new();
    let cfg = WalkConfig::new(p("1432"));
    let a = run_walks(&cfg);
    let b = run_walks(&cfg);
    let mut detail = String::new();
    match (a, b) {
        (Ok(a), Ok(b)) => {
            c.that(a.states.len() == 5, || format!("{} states", a.states.len()));
            c.that(a.all_visited(), || "not every state visited".into());
            c.that(a.to_csv() == b.to_csv(), || {
                "CSV differs between runs".into()
            });
            c.that(a.to_csv().lines().count() == cfg.steps + 2, || {
                "CSV row count".into()
            });
            c.that(a.final_tv() < 0.05, || format!("final TV {}", a.final_tv()));
            detail = format!(", final TV {:.4}", a.final_tv());
        }
        (Err(e), _) | (_, Err(e)) => c.that(false, || format!("walks failed: {e}")),
    }
    (c, detail)
}

fn report(n: usize, what: &str, c: &Check, extra: &str) -> bool {
    let ok = c.failures.is_empty();
    println!(
        "criterion {n}: {} {what} ({} checks{extra})",
        if ok { "PASS" } else { "FAIL" },
        c.checks
    );
    for f in c.failures.iter().take(3) {
        println!("    {}", f.replace('\n', " / "));
    }
    ok
}

fn main() -> ExitCode {
    let s4 = verify_all(4, &VerifyOptions::default()).expect("S_4 sweep");
    let s5 = verify_all(
        5,
        &VerifyOptions {
            max_n_minimality: 0,
            ..VerifyOptions::default()
        },
    )
    .expect("S_5 sweep");
    let (c10, tv) = criterion_10();
    let results = [
        report(
            1,
            "join and meet match the poset oracle",
            &criterion_1(),
            "",
        ),
        report(2, "worked join example", &criterion_2(), ""),
        report(3, "three forms of M agree", &criterion_3(), ""),
        report(4, "M_ij is the minimum of V_ij", &criterion_4(&s4), ""),
        report(
            5,
            "tableau order matches the lattice",
            &criterion_5(&s5),
            "",
        ),
        report(
            6,
            "pipe dreams rebuild from tableaux",
            &criterion_6(&s5),
            "",
        ),
        report(7, "commutation and boundary rows", &criterion_7(&s5), ""),
        report(
            8,
            "tableau dynamics under ladder moves",
            &criterion_8(&s5),
            "",
        ),
        report(
            9,
            "extremal comparison matches the order",
            &criterion_9(&s5),
            "",
        ),
        report(10, "random walk on RPD(1432)", &c10, &tv),
    ];
    if results.iter().all(|&r| r) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
