//! Generalized ladder and chute moves, the cover relation, and enumeration of
//! the reduced pipe dreams of a permutation.

use std::collections::{HashSet, VecDeque};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::pipedream::{PipeDream, Tile};

/// A ladder move: the cross at `pivot` trades places with the bump at `dest`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LadderTarget {
    pub pivot: Tile,
    pub dest: Tile,
}

impl LadderTarget {
    /// Simple ladder moves use two adjacent columns.
    pub fn is_simple(&self) -> bool {
        self.dest.col == self.pivot.col + 1
    }
}

fn require_cross(d: &PipeDream, t: Tile) -> Result<()> {
    if d.is_cross(t) {
        Ok(())
    } else {
        Err(Error::NotACross(t))
    }
}

/// Largest bump row above `t` in its column, if any.
pub fn h_of(d: &PipeDream, t: Tile) -> Result<Option<usize>> {
    require_cross(d, t)?;
    Ok((1..t.row).rev().find(|&r| !d.get(r, t.col)))
}

/// First bump column right of `t` in its row. Always exists because the
/// anti-diagonal tile of every row is a bump.
pub fn k_of(d: &PipeDream, t: Tile) -> Result<usize> {
    require_cross(d, t)?;
    Ok((t.col + 1..).find(|&c| !d.get(t.row, c)).unwrap())
}

/// The ladder move at `t`, if the rectangle between the cross and its
/// destination is all crosses apart from three bump corners.
pub fn ladder_movable(d: &PipeDream, t: Tile) -> Option<LadderTarget> {
    let h = h_of(d, t).ok()??;
    let k = k_of(d, t).ok()?;
    if d.get(h, k) {
        return None;
    }
    for r in h..=t.row {
        for c in t.col..=k {
            let corner = (r == h && c == t.col) || (r == t.row && c == k) || (r == h && c == k);
            if !corner && !d.get(r, c) {
                return None;
            }
        }
    }
    Some(LadderTarget {
        pivot: t,
        dest: Tile::new(h, k),
    })
}

pub fn apply_ladder(d: &PipeDream, t: Tile) -> Result<PipeDream> {
    require_cross(d, t)?;
    let target = ladder_movable(d, t).ok_or(Error::NotLadderMovable(t))?;
    Ok(swap(d, target))
}

fn swap(d: &PipeDream, target: LadderTarget) -> PipeDream {
    let mut out = d.clone();
    out.set(target.pivot, false);
    out.set(target.dest, true);
    out
}

/// The chute move landing a bump on `dest`: the ladder move it undoes.
/// Computed as the transpose of a ladder move on the transposed dream.
pub fn chute_target(d: &PipeDream, dest: Tile) -> Option<LadderTarget> {
    let lt = ladder_movable(&d.transpose(), dest.transpose())?;
    Some(LadderTarget {
        pivot: lt.dest.transpose(),
        dest,
    })
}

/// `C_hk`: moves the cross at `(h,k)` back down to the pivot it came from.
pub fn apply_chute(d: &PipeDream, dest: Tile) -> Result<PipeDream> {
    let target = chute_target(d, dest).ok_or(Error::NoChute(dest))?;
    let mut out = d.clone();
    out.set(target.dest, false);
    out.set(target.pivot, true);
    Ok(out)
}

/// Every ladder move available in `d`, pivots in row-major order.
pub fn cover_moves(d: &PipeDream) -> Vec<LadderTarget> {
    d.crosses()
        .into_iter()
        .filter_map(|t| ladder_movable(d, t))
        .collect()
}

/// Every chute move available in `d`, destinations in row-major order.
pub fn chute_moves(d: &PipeDream) -> Vec<LadderTarget> {
    d.crosses()
        .into_iter()
        .filter_map(|t| chute_target(d, t))
        .collect()
}

/// Pipe dreams covering `d`, deduplicated, in pivot order.
pub fn upper_covers(d: &PipeDream) -> Vec<PipeDream> {
    cover_moves(d)
        .into_iter()
        .map(|m| swap(d, m))
        .unique()
        .collect()
}

/// Breadth-first closure of `D_bot(w)` under ladder moves.
pub fn enumerate_rpd(w: &Permutation) -> Vec<PipeDream> {
    enumerate_rpd_bounded(w, usize::MAX).expect("unbounded enumeration")
}

/// As [`enumerate_rpd`], failing once more than `limit` elements are found.
pub fn enumerate_rpd_bounded(w: &Permutation, limit: usize) -> Result<Vec<PipeDream>> {
    bfs(PipeDream::bottom(w), limit, |_| true)
}

/// Closure of `D_bot(w)` under the two-column ladder moves only.
pub fn enumerate_rpd_simple(w: &Permutation) -> Vec<PipeDream> {
    bfs(PipeDream::bottom(w), usize::MAX, LadderTarget::is_simple).expect("unbounded")
}

fn bfs(
    start: PipeDream,
    limit: usize,
    keep: impl Fn(&LadderTarget) -> bool,
) -> Result<Vec<PipeDream>> {
    let mut seen = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(d) = queue.pop_front() {
        for m in cover_moves(&d).into_iter().filter(&keep) {
            let next = swap(&d, m);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
        order.push(d);
        if order.len() > limit {
            return Err(Error::BudgetExceeded { limit });
        }
    }
    Ok(order)
}

/// Independent enumeration: every `ℓ(w)`-subset of staircase tiles that
/// gives a reduced pipe dream for `w`. Restricted to `n <= 6`.
pub fn enumerate_by_subsets(w: &Permutation) -> Result<Vec<PipeDream>> {
    let n = w.n();
    let len = w.length();
    if n > 6 {
        return Err(Error::BudgetExceeded { limit: 1 << 15 });
    }
    let tiles: Vec<Tile> = (1..n)
        .flat_map(|i| (1..=n - i).map(move |j| Tile::new(i, j)))
        .collect();
    let mut out: Vec<PipeDream> = tiles
        .into_iter()
        .combinations(len)
        .map(|c| PipeDream::from_crosses(n, c).expect("staircase tiles"))
        .filter(|d| d.permutation() == *w && d.is_reduced())
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(n: usize, crosses: &[(usize, usize)]) -> PipeDream {
        PipeDream::from_crosses(n, crosses.iter().copied()).unwrap()
    }

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn t(i: usize, j: usize) -> Tile {
        Tile::new(i, j)
    }

    fn example_126543() -> PipeDream {
        pd(6, &[(2, 2), (3, 1), (3, 2), (3, 3), (4, 1), (4, 2)])
    }

    // Cross at (3,1) with a 3x5 rectangle of crosses above and to its right.
    fn wide_ladder() -> PipeDream {
        pd(
            7,
            &[
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 1),
                (2, 2),
                (2, 3),
                (2, 4),
                (2, 5),
                (3, 1),
                (3, 2),
                (3, 3),
                (3, 4),
            ],
        )
    }

    #[test]
    fn h_and_k_examples() {
        let d = example_126543();
        assert_eq!(d.permutation(), p("126543"));
        assert_eq!(h_of(&d, t(3, 2)), Ok(Some(1)));
        assert_eq!(k_of(&d, t(3, 2)), Ok(4));
        assert_eq!(h_of(&d, t(4, 2)), Ok(Some(1)));
        assert_eq!(h_of(&d, t(4, 1)), Ok(Some(2)));
        assert_eq!(h_of(&d, t(1, 1)), Err(Error::NotACross(t(1, 1))));
        let column = pd(4, &[(1, 1), (2, 1)]);
        assert_eq!(h_of(&column, t(2, 1)), Ok(None));
        assert_eq!(k_of(&column, t(2, 1)), Ok(2));
        let bot = PipeDream::bottom(&p("126453"));
        assert_eq!(k_of(&bot, t(3, 3)), Ok(4));
    }

    #[test]
    fn ladder_examples() {
        let d = example_126543();
        assert_eq!(ladder_movable(&d, t(3, 2)), None);
        let wide = wide_ladder();
        assert!(wide.is_reduced());
        let target = ladder_movable(&wide, t(3, 1)).unwrap();
        assert_eq!(target.dest, t(1, 5));
        let up = apply_ladder(&wide, t(3, 1)).unwrap();
        assert!(up.is_cross(t(1, 5)) && !up.is_cross(t(3, 1)));
        assert_eq!(up.permutation(), wide.permutation());
        assert!(up.is_reduced());
        assert_eq!(apply_chute(&up, t(1, 5)).unwrap(), wide);
        assert!(cover_moves(&PipeDream::empty(3)).is_empty());
        assert!(apply_ladder(&d, t(3, 2)).is_err());
        assert!(apply_chute(&PipeDream::empty(3), t(1, 1)).is_err());
    }

    #[test]
    fn d1_cover_moves() {
        let d1 = pd(6, &[(1, 3), (3, 1), (3, 2), (3, 3), (5, 1)]);
        let moves = cover_moves(&d1);
        assert_eq!(
            moves,
            vec![
                LadderTarget {
                    pivot: t(3, 3),
                    dest: t(2, 4)
                },
                LadderTarget {
                    pivot: t(5, 1),
                    dest: t(4, 2)
                }
            ]
        );
    }

    #[test]
    fn top_has_no_ladder_and_bottom_no_chute() {
        for n in 1..=5 {
            for w in Permutation::all(n) {
                assert!(cover_moves(&PipeDream::top(&w)).is_empty(), "{w}");
                assert!(chute_moves(&PipeDream::bottom(&w)).is_empty(), "{w}");
            }
        }
    }

    #[test]
    fn enumeration_matches_subset_oracle() {
        assert_eq!(
            enumerate_rpd(&Permutation::identity()),
            vec![PipeDream::empty(1)]
        );
        for n in 1..=5 {
            for w in Permutation::all(n) {
                if w.length() > 6 {
                    continue;
                }
                let mut bfs = enumerate_rpd(&w);
                bfs.sort();
                assert_eq!(bfs, enumerate_by_subsets(&w).unwrap(), "{w}");
            }
        }
        let rpd = enumerate_rpd(&p("1432"));
        assert_eq!(rpd.len(), 5);
    }

    #[test]
    fn worked_join_dreams_are_enumerated() {
        let all: HashSet<PipeDream> = enumerate_rpd(&p("126453")).into_iter().collect();
        for c in [
            &[(1, 3), (3, 1), (3, 2), (3, 3), (5, 1)][..],
            &[(1, 4), (1, 5), (2, 2), (3, 2), (5, 1)],
            &[(1, 3), (2, 2), (2, 3), (2, 4), (5, 1)],
            &[(1, 3), (1, 4), (1, 5), (2, 3), (5, 1)],
        ] {
            assert!(all.contains(&pd(6, c)));
        }
    }

    #[test]
    fn chute_round_trips_and_edge_duality() {
        for n in 1..=5 {
            for w in Permutation::all(n) {
                for d in enumerate_rpd(&w) {
                    for m in cover_moves(&d) {
                        let up = apply_ladder(&d, m.pivot).unwrap();
                        assert_eq!(chute_target(&up, m.dest), Some(m));
                        assert_eq!(apply_chute(&up, m.dest).unwrap(), d);
                        // the same edge read downwards in RPD(w^-1)
                        let t_up = up.transpose();
                        let t_d = d.transpose();
                        assert!(upper_covers(&t_up).contains(&t_d), "{w} {m:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn simple_moves_reach_everything() {
        for n in 1..=5 {
            for w in Permutation::all(n) {
                let mut a = enumerate_rpd(&w);
                let mut b = enumerate_rpd_simple(&w);
                a.sort();
                b.sort();
                assert_eq!(a, b, "{w}");
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let w = p("15432");
        assert!(enumerate_rpd_bounded(&w, 2).is_err());
        assert!(enumerate_rpd_bounded(&w, 1000).is_ok());
    }
}
