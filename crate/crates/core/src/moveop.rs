//! The composite move `M_ij`: turning a cross into a bump through the minimal
//! sequence of ladder moves northeast of it.
//!
//! [`m_explicit`] is the production form. It swaps tiles along the boundary
//! of a partition shape. [`m_recursive`] and [`m_prime`] are the row-first
//! and column-first recursions over ladder moves and serve as cross-checks.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::moves::{apply_ladder, cover_moves, h_of, k_of};
use crate::pipedream::{PipeDream, Tile};

// Recursion guard for the ladder-move recursions; far above anything a
// 64-column grid can need.
const MAX_RECURSION: usize = 1 << 16;

/// Geometry of a movable cross: `Rect = [h,i] x [j,k]` and the extreme bump
/// row and column inside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveContext {
    pub pivot: Tile,
    pub h: usize,
    pub k: usize,
    /// Largest row in `[h,i)` with a bump inside the rectangle.
    pub max_bump_row: usize,
    /// Smallest column in `(j,k]` with a bump inside the rectangle.
    pub min_bump_col: usize,
}

impl MoveContext {
    pub fn of(d: &PipeDream, t: Tile) -> Result<Self> {
        let h = h_of(d, t)?.ok_or(Error::NotMovable(t))?;
        let k = k_of(d, t)?;
        let (i, j) = (t.row, t.col);
        let max_bump_row = (h..i)
            .rev()
            .find(|&r| (j..=k).any(|c| !d.get(r, c)))
            .expect("(h,j) is a bump");
        let min_bump_col = (j + 1..=k)
            .find(|&c| (h..=i).any(|r| !d.get(r, c)))
            .expect("(i,k) is a bump");
        Ok(MoveContext {
            pivot: t,
            h,
            k,
            max_bump_row,
            min_bump_col,
        })
    }

    pub fn rect_contains(&self, t: Tile) -> bool {
        (self.h..=self.pivot.row).contains(&t.row) && (self.pivot.col..=self.k).contains(&t.col)
    }

    /// The ladder-movability criterion: `a = h` and `b = k`.
    pub fn is_ladder_movable(&self) -> bool {
        self.max_bump_row == self.h && self.min_bump_col == self.k
    }
}

/// A cross with some bump above it in its column.
pub fn movable(d: &PipeDream, t: Tile) -> bool {
    matches!(h_of(d, t), Ok(Some(_)))
}

/// `Path_ij` and the partition shape beneath it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathShape {
    pub context: MoveContext,
    /// From `(i,k)` to `(h,j)`.
    pub path: Vec<Tile>,
    pub corners: Vec<Tile>,
    pub shape: BTreeSet<Tile>,
    /// Rows of `[h,i]` in which the path meets a bump.
    pub bump_rows: BTreeSet<usize>,
    /// Columns of `[j,k]` in which the path meets a bump.
    pub bump_cols: BTreeSet<usize>,
}

impl PathShape {
    pub fn endpoints(&self) -> (Tile, Tile) {
        (self.path[0], *self.path.last().unwrap())
    }

    pub fn on_path(&self, t: Tile) -> bool {
        self.path.contains(&t)
    }

    /// Marked matrix of the rectangle: `P`/`p` for path bumps/crosses, `+` and
    /// `.` for the rest of the shape, lower case `x`/`o` outside the shape.
    pub fn render(&self, d: &PipeDream) -> String {
        let ctx = &self.context;
        let mut out = String::new();
        for r in ctx.h..=ctx.pivot.row {
            for c in ctx.pivot.col..=ctx.k {
                let t = Tile::new(r, c);
                let ch = match (self.on_path(t), self.shape.contains(&t), d.is_cross(t)) {
                    (true, _, false) => 'P',
                    (true, _, true) => 'p',
                    (false, true, true) => '+',
                    (false, true, false) => '.',
                    (false, false, true) => 'x',
                    (false, false, false) => 'o',
                };
                out.push(ch);
            }
            out.push('\n');
        }
        out
    }
}

/// Traces `Path_ij(D)`: up to the max bump row of the current pivot, then
/// left to the next bump, until column `j` is reached.
pub fn path_of(d: &PipeDream, t: Tile) -> Result<PathShape> {
    let ctx = MoveContext::of(d, t)?;
    let (h, j) = (ctx.h, t.col);
    let mut path = vec![Tile::new(t.row, ctx.k)];
    let (mut p, mut q) = (t.row, ctx.k);
    loop {
        let p2 = (h..p)
            .rev()
            .find(|&r| (j..=q).any(|c| !d.get(r, c)))
            .ok_or_else(|| Error::Internal(format!("path of {t} lost its bump row")))?;
        for r in (p2..p).rev() {
            path.push(Tile::new(r, q));
        }
        let q2 = (j..).find(|&c| !d.get(p2, c)).unwrap();
        for c in (q2..q).rev() {
            path.push(Tile::new(p2, c));
        }
        if q2 == j {
            break;
        }
        if q2 > q {
            return Err(Error::Internal(format!("path of {t} left its rectangle")));
        }
        (p, q) = (p2, q2);
    }
    let members: HashSet<Tile> = path.iter().copied().collect();
    let has = |r: usize, c: usize| r >= 1 && c >= 1 && members.contains(&Tile::new(r, c));
    let corners = path
        .iter()
        .copied()
        .filter(|x| {
            (has(x.row.wrapping_sub(1), x.col) && has(x.row, x.col + 1))
                || (has(x.row, x.col.wrapping_sub(1)) && has(x.row + 1, x.col))
        })
        .collect();
    let mut shape = BTreeSet::new();
    for r in h..=t.row {
        for c in j..=ctx.k {
            if (h..=r).any(|r2| members.contains(&Tile::new(r2, c))) {
                shape.insert(Tile::new(r, c));
            }
        }
    }
    let bumps = path.iter().filter(|x| !d.is_cross(**x));
    let bump_rows = bumps.clone().map(|x| x.row).collect();
    let bump_cols = bumps.map(|x| x.col).collect();
    Ok(PathShape {
        context: ctx,
        path,
        corners,
        shape,
        bump_rows,
        bump_cols,
    })
}

/// `M_ij(D)` from the path: bumps at `(r,j)` for bump rows, at `(i,c)` for
/// bump columns, and every other bump on the path becomes a cross.
pub fn m_explicit(d: &PipeDream, t: Tile) -> Result<PipeDream> {
    let ps = path_of(d, t)?;
    Ok(apply_path(d, &ps))
}

fn apply_path(d: &PipeDream, ps: &PathShape) -> PipeDream {
    let (i, j) = (ps.context.pivot.row, ps.context.pivot.col);
    let (start, end) = ps.endpoints();
    let mut out = d.clone();
    for &r in &ps.bump_rows {
        out.set(Tile::new(r, j), false);
    }
    for &c in &ps.bump_cols {
        out.set(Tile::new(i, c), false);
    }
    for &x in &ps.path {
        if x != start && x != end && !d.is_cross(x) {
            out.set(x, true);
        }
    }
    out
}

/// Alias for the production form of `M_ij`.
pub fn m(d: &PipeDream, t: Tile) -> Result<PipeDream> {
    m_explicit(d, t)
}

/// Row-first recursion: ladder move if possible, else clear `(a,j)` first,
/// else `(i,b)`.
pub fn m_recursive(d: &PipeDream, t: Tile) -> Result<PipeDream> {
    recurse(d, t, false, 0)
}

/// Column-first recursion: clears `(i,b)` before `(a,j)`.
pub fn m_prime(d: &PipeDream, t: Tile) -> Result<PipeDream> {
    recurse(d, t, true, 0)
}

fn recurse(d: &PipeDream, t: Tile, column_first: bool, depth: usize) -> Result<PipeDream> {
    if depth > MAX_RECURSION {
        return Err(Error::Internal(format!(
            "M recursion at {t} did not terminate"
        )));
    }
    let ctx = MoveContext::of(d, t)?;
    let (a, b) = (ctx.max_bump_row, ctx.min_bump_col);
    if ctx.is_ladder_movable() {
        return apply_ladder(d, t).map_err(|_| {
            Error::Internal(format!(
                "{t} meets the ladder criterion but has no ladder move"
            ))
        });
    }
    let first = if column_first {
        if b < ctx.k {
            Tile::new(t.row, b)
        } else {
            Tile::new(a, t.col)
        }
    } else if a > ctx.h {
        Tile::new(a, t.col)
    } else {
        Tile::new(t.row, b)
    };
    let step = recurse(d, first, column_first, depth + 1)?;
    recurse(&step, t, column_first, depth + 1)
}

/// States reachable from `d` by ladder moves pivoting weakly northeast of
/// `t`, restricted to those with a bump at `t`.
pub fn v_set(d: &PipeDream, t: Tile) -> Result<Vec<PipeDream>> {
    if !d.is_cross(t) {
        return Err(Error::NotACross(t));
    }
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    seen.insert(d.clone());
    queue.push_back(d.clone());
    while let Some(q) = queue.pop_front() {
        for lm in cover_moves(&q) {
            if !lm.pivot.is_northeast_of(t) {
                continue;
            }
            let next = apply_ladder(&q, lm.pivot)?;
            if seen.insert(next.clone()) {
                if !next.is_cross(t) {
                    out.push(next.clone());
                }
                queue.push_back(next);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Applies `M` at each tile of `s` in row-major order. The tiles must be
/// pairwise southwest-incomparable.
pub fn big_composition(d: &PipeDream, s: &[Tile]) -> Result<PipeDream> {
    for (x, a) in s.iter().enumerate() {
        for b in &s[x + 1..] {
            if !a.southwest_incomparable(*b) {
                return Err(Error::SouthwestComparable(*a, *b));
            }
        }
    }
    let mut order = s.to_vec();
    order.sort();
    let mut out = d.clone();
    for t in order {
        out = m_explicit(&out, t)?;
    }
    Ok(out)
}

/// Which commutation rule a record refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommutationRule {
    /// `M_ij M_pq = M_pq M_ij` for southwest-incomparable movable tiles.
    SouthwestIncomparable,
    /// `L_pq M_ij = M_ij L_pq` for a ladder-movable `(p,q)` below-right or
    /// left of `(i,j)`.
    LadderAndMove,
    /// `M` at tiles with disjoint shapes commute.
    DisjointShapes,
    /// `M` at a tile northeast of `(i,j)` and outside its shape commutes.
    NortheastOutsideShape,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationRecord {
    pub rule: CommutationRule,
    pub first: Tile,
    pub second: Tile,
    pub holds: bool,
}

fn both(
    d: &PipeDream,
    f: impl Fn(&PipeDream) -> Result<PipeDream>,
    g: impl Fn(&PipeDream) -> Result<PipeDream>,
) -> bool {
    let fg = g(d).and_then(|x| f(&x));
    let gf = f(d).and_then(|x| g(&x));
    matches!((fg, gf), (Ok(a), Ok(b)) if a == b)
}

/// Checks every applicable instance of the commutation rules in `d`.
pub fn check_commutations(d: &PipeDream) -> Vec<CommutationRecord> {
    let crosses = d.crosses();
    let movable_tiles: Vec<Tile> = crosses.iter().copied().filter(|&t| movable(d, t)).collect();
    let shapes: Vec<BTreeSet<Tile>> = movable_tiles
        .iter()
        .map(|&t| path_of(d, t).map(|p| p.shape).unwrap_or_default())
        .collect();
    let ladders = cover_moves(d);
    let mut out = Vec::new();
    for (x, &a) in movable_tiles.iter().enumerate() {
        for (y, &b) in movable_tiles.iter().enumerate() {
            if x == y {
                continue;
            }
            let commute = || both(d, |q| m_explicit(q, a), |q| m_explicit(q, b));
            let mut record = |rule| {
                out.push(CommutationRecord {
                    rule,
                    first: a,
                    second: b,
                    holds: commute(),
                })
            };
            if x < y && a.southwest_incomparable(b) {
                record(CommutationRule::SouthwestIncomparable);
            }
            if x < y && shapes[x].is_disjoint(&shapes[y]) {
                record(CommutationRule::DisjointShapes);
            }
            if b.is_northeast_of(a) && !shapes[x].contains(&b) {
                record(CommutationRule::NortheastOutsideShape);
            }
        }
        for lm in &ladders {
            let (p, q) = (lm.pivot.row, lm.pivot.col);
            let applies = (p > a.row && q >= a.col) || (p <= a.row && q < a.col);
            if applies {
                out.push(CommutationRecord {
                    rule: CommutationRule::LadderAndMove,
                    first: a,
                    second: lm.pivot,
                    holds: both(d, |r| m_explicit(r, a), |r| apply_ladder(r, lm.pivot)),
                });
            }
        }
    }
    out
}
