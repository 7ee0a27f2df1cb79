//! Pipe dream tableaux: fillings of the Rothe diagram that count left bumps
//! below each crossing, their coordinatewise order, and reconstruction of a
//! pipe dream from its tableau.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::moves::ladder_movable;
use crate::perm::Permutation;
use crate::pipedream::{PipeDream, Tile};

/// A filling keyed by the inversions `(x,y)` of `w⁻¹`; the entry for `(x,y)`
/// sits in diagram cell `(w⁻¹(y), x)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tableau {
    w: Permutation,
    entries: BTreeMap<(usize, usize), usize>,
}

impl Tableau {
    /// Checks that the key set is exactly `Inv(w⁻¹)` and entries are positive.
    pub fn new(w: Permutation, entries: BTreeMap<(usize, usize), usize>) -> Result<Self> {
        let keys: BTreeSet<(usize, usize)> = w.inverse().inversions().into_iter().collect();
        let given: BTreeSet<(usize, usize)> = entries.keys().copied().collect();
        if keys != given {
            let stray = given.symmetric_difference(&keys).next().copied().unwrap();
            return Err(Error::InvalidTableau {
                pipe: stray.0,
                stage: 0,
                reason: format!(
                    "key ({},{}) does not match the inversions of w⁻¹",
                    stray.0, stray.1
                ),
            });
        }
        if let Some((&(x, y), _)) = entries.iter().find(|(_, &t)| t == 0) {
            return Err(Error::InvalidTableau {
                pipe: x,
                stage: 0,
                reason: format!("entry ({x},{y}) must be positive"),
            });
        }
        Ok(Tableau { w, entries })
    }

    pub fn permutation(&self) -> &Permutation {
        &self.w
    }

    pub fn get(&self, x: usize, y: usize) -> Option<usize> {
        self.entries.get(&(x, y)).copied()
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.entries
    }

    /// Diagram cell holding the entry for `(x,y)`.
    pub fn cell(&self, x: usize, y: usize) -> Tile {
        Tile::new(self.w.inverse().apply(y), x)
    }

    /// Coordinatewise `<=`.
    pub fn leq(&self, other: &Tableau) -> Result<bool> {
        if self.w != other.w {
            return Err(Error::TableauMismatch);
        }
        Ok(self.entries.iter().all(|(k, &t)| t <= other.entries[k]))
    }

    /// `{"x,y": t}` with keys in numeric order.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .entries
            .iter()
            .map(|((x, y), t)| format!("\"{x},{y}\":{t}"))
            .collect();
        format!("{{{}}}", body.join(","))
    }

    pub fn from_json(w: &Permutation, s: &str) -> Result<Self> {
        let raw: BTreeMap<String, usize> = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut entries = BTreeMap::new();
        for (k, t) in raw {
            let key: Tile = k.parse()?;
            entries.insert((key.row, key.col), t);
        }
        Tableau::new(w.clone(), entries)
    }

    /// Parses either the JSON form or the grid printed by `Display`.
    pub fn parse(w: &Permutation, s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            return Tableau::from_json(w, s);
        }
        let mut entries = BTreeMap::new();
        for (r, line) in s.lines().filter(|l| !l.trim().is_empty()).enumerate() {
            for (c, tok) in line.split_whitespace().enumerate() {
                let (row, col) = (r + 1, c + 1);
                if tok == "." || tok == "•" {
                    continue;
                }
                let t: usize = tok.parse().map_err(|_| Error::Parse {
                    line: row,
                    column: col,
                    message: format!("unexpected token `{tok}`"),
                })?;
                if row > w.n() {
                    return Err(Error::Parse {
                        line: row,
                        column: col,
                        message: format!("row {row} is outside the diagram of {w}"),
                    });
                }
                entries.insert((col, w.apply(row)), t);
            }
        }
        Tableau::new(w.clone(), entries)
    }

    /// Sum of entries; every ladder move raises it.
    pub fn weight(&self) -> usize {
        self.entries.values().sum()
    }
}

/// The Rothe diagram with entries in its cells, `•` for the dots of `w` and
/// `.` elsewhere; columns are right-aligned.
impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.w.n();
        let mut grid = vec![vec![".".to_string(); n]; n];
        for i in 1..=n {
            grid[i - 1][self.w.apply(i) - 1] = "•".to_string();
        }
        for (&(x, y), t) in &self.entries {
            let c = self.cell(x, y);
            grid[c.row - 1][c.col - 1] = t.to_string();
        }
        let width = grid
            .iter()
            .flatten()
            .map(|s| s.chars().count())
            .max()
            .unwrap_or(1);
        for (r, row) in grid.iter().enumerate() {
            if r > 0 {
                f.write_str("\n")?;
            }
            let cells: Vec<String> = row
                .iter()
                .map(|s| format!("{}{s}", " ".repeat(width - s.chars().count())))
                .collect();
            f.write_str(&cells.join(" "))?;
        }
        Ok(())
    }
}

/// `B_x(w)`: left bumps of pipe `x`, read off `D_bot(w)`.
pub fn left_bump_count(w: &Permutation, x: usize) -> usize {
    PipeDream::bottom(w).trace_pipe(x).left_bumps.len()
}

/// `[B_1, …, B_n]`.
pub fn left_bump_counts(w: &Permutation) -> Vec<usize> {
    let d = PipeDream::bottom(w);
    (1..=w.n())
        .map(|x| d.trace_pipe(x).left_bumps.len())
        .collect()
}

/// `T(D)`: for each crossing of pipes `x < y`, the number of left bumps of
/// pipe `x` in rows strictly below the crossing.
pub fn tableau_of(d: &PipeDream) -> Result<Tableau> {
    if !d.is_reduced() {
        return Err(Error::NotReduced);
    }
    let traces = d.traces();
    let mut entries = BTreeMap::new();
    for (tile, (v, h)) in d.crossing_pipes() {
        if v > h {
            return Err(Error::Internal(format!(
                "larger pipe {v} is vertical at {tile}"
            )));
        }
        entries.insert((v, h), traces[v - 1].left_bumps_below(tile.row));
    }
    Tableau::new(d.permutation(), entries)
}

/// Closed form for `T(D_bot(w))`: `B_x − N_xy`.
pub fn bot_tableau(w: &Permutation) -> Tableau {
    let b = left_bump_counts(w);
    let inv = w.inverse();
    let entries = inv
        .inversions()
        .into_iter()
        .map(|(x, y)| {
            let cell = Tile::new(inv.apply(y), x);
            let nw = w
                .dots_northwest(cell)
                .expect("inversions of w⁻¹ index diagram cells");
            ((x, y), b[x - 1] - nw)
        })
        .collect();
    Tableau::new(w.clone(), entries).expect("keys are the inversions of w⁻¹")
}

/// Closed form for `T(D_top(w))`: every entry of column `x` is `B_x`.
pub fn top_tableau(w: &Permutation) -> Tableau {
    let b = left_bump_counts(w);
    let entries = w
        .inverse()
        .inversions()
        .into_iter()
        .map(|(x, y)| ((x, y), b[x - 1]))
        .collect();
    Tableau::new(w.clone(), entries).expect("keys are the inversions of w⁻¹")
}

/// Pipes crossing the pivot's vertical pipe `x` horizontally in the given
/// rows, together with `x`.
pub fn ladder_crossers(
    d: &PipeDream,
    pivot: Tile,
    rows: std::ops::RangeInclusive<usize>,
) -> Result<(usize, BTreeSet<usize>)> {
    let pipes = d.crossing_pipes();
    let &(x, _) = pipes.get(&pivot).ok_or(Error::NotACross(pivot))?;
    let ys = pipes
        .iter()
        .filter(|(t, (v, _))| *v == x && rows.contains(&t.row))
        .map(|(_, &(_, y))| y)
        .collect();
    Ok((x, ys))
}

/// `T(L_ij(D))` predicted from `T(D)`: the ladder move carries the vertical
/// crosses of pipe `x` in rows `h+1..=i` above its relocated left bump, so
/// exactly those entries gain one.
pub fn tableau_after_ladder(t: &Tableau, d: &PipeDream, pivot: Tile) -> Result<Tableau> {
    let lm = ladder_movable(d, pivot).ok_or(Error::NotLadderMovable(pivot))?;
    if d.permutation() != *t.permutation() {
        return Err(Error::TableauMismatch);
    }
    let (x, ys) = ladder_crossers(d, pivot, lm.dest.row + 1..=pivot.row)?;
    let mut entries = t.entries.clone();
    for y in ys {
        *entries.get_mut(&(x, y)).ok_or(Error::TableauMismatch)? += 1;
    }
    Tableau::new(t.w.clone(), entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Empty,
    Cross {
        vertical: usize,
        horizontal: Option<usize>,
    },
    // `nw`: pipe entering north and leaving west; `es`: entering east,
    // leaving south
    Bump {
        nw: Option<usize>,
        es: Option<usize>,
    },
}

struct Builder {
    n: usize,
    grid: Vec<Vec<Cell>>,
}

impl Builder {
    fn at(&mut self, r: usize, c: usize) -> Option<&mut Cell> {
        if r == 0 || c == 0 || r > self.n || c > self.n || r + c > self.n + 1 {
            return None;
        }
        Some(&mut self.grid[r - 1][c - 1])
    }
}

/// Rebuilds `D` from `T(D)` pipe by pipe: pipe `x` descends column `x` over
/// its vertical crosses with entry `B_x`, turns at its northmost left bump,
/// runs west over earlier pipes' vertical crosses until it meets a free
/// down bump or an empty tile, and repeats with the next smaller entry.
pub fn from_tableau(t: &Tableau) -> Result<PipeDream> {
    let w = t.permutation().clone();
    let n = w.n();
    let b = left_bump_counts(&w);
    let mut bld = Builder {
        n,
        grid: vec![vec![Cell::Empty; n]; n],
    };
    for x in 1..=n {
        let bx = b[x - 1];
        let fail = |stage: usize, reason: String| Error::InvalidTableau {
            pipe: x,
            stage,
            reason,
        };
        let mut count = vec![0usize; bx + 1];
        for (&(px, y), &v) in &t.entries {
            if px != x {
                continue;
            }
            if v > bx {
                return Err(fail(
                    v,
                    format!("entry ({x},{y}) = {v} exceeds B_{x} = {bx}"),
                ));
            }
            count[v] += 1;
        }

        let (mut r, mut c) = (1usize, x);
        let mut stage = bx;
        loop {
            for _ in 0..count[stage] {
                match bld.at(r, c) {
                    Some(cell @ Cell::Empty) => {
                        *cell = Cell::Cross {
                            vertical: x,
                            horizontal: None,
                        };
                    }
                    _ => {
                        return Err(fail(
                            stage,
                            format!("cannot place a vertical cross at ({r},{c})"),
                        ))
                    }
                }
                r += 1;
            }
            match bld.at(r, c) {
                Some(cell @ Cell::Empty) => {
                    *cell = Cell::Bump {
                        nw: Some(x),
                        es: None,
                    }
                }
                Some(Cell::Bump { nw: nw @ None, .. }) => *nw = Some(x),
                _ => {
                    return Err(fail(
                        stage,
                        format!("cannot place a left bump at ({r},{c})"),
                    ))
                }
            }
            // run west along row r
            c -= 1;
            loop {
                if c == 0 {
                    if stage != 1 {
                        return Err(fail(
                            stage,
                            format!("pipe leaves the grid at row {r} too early"),
                        ));
                    }
                    break;
                }
                match bld.at(r, c) {
                    Some(Cell::Cross {
                        vertical,
                        horizontal: h @ None,
                    }) if *vertical < x => {
                        *h = Some(x);
                        c -= 1;
                    }
                    Some(Cell::Bump { es: es @ None, .. }) => {
                        *es = Some(x);
                        break;
                    }
                    Some(cell @ Cell::Empty) => {
                        *cell = Cell::Bump {
                            nw: None,
                            es: Some(x),
                        };
                        break;
                    }
                    _ => return Err(fail(stage, format!("pipe is blocked at ({r},{c})"))),
                }
            }
            if c == 0 {
                if r != w.inverse().apply(x) {
                    return Err(fail(
                        stage,
                        format!("pipe exits at row {r}, not {}", w.inverse().apply(x)),
                    ));
                }
                break;
            }
            if stage == 1 {
                return Err(fail(
                    stage,
                    format!("pipe turns south at ({r},{c}) after its last left bump"),
                ));
            }
            stage -= 1;
            r += 1;
        }
    }

    let mut crosses = Vec::new();
    for r in 1..=n {
        for c in 1..=n + 1 - r {
            if let Cell::Cross {
                vertical,
                horizontal,
            } = bld.grid[r - 1][c - 1]
            {
                if horizontal.is_none() || r + c > n {
                    return Err(Error::InvalidTableau {
                        pipe: vertical,
                        stage: 0,
                        reason: format!("cross at ({r},{c}) is not completed"),
                    });
                }
                crosses.push(Tile::new(r, c));
            }
        }
    }
    let d = PipeDream::from_crosses(n, crosses)?;
    let invalid = |reason: String| Error::InvalidTableau {
        pipe: 0,
        stage: 0,
        reason,
    };
    if d.permutation() != w {
        return Err(invalid(format!(
            "reconstruction has permutation {}",
            d.permutation()
        )));
    }
    if tableau_of(&d)? != *t {
        return Err(invalid(
            "reconstruction does not reproduce the tableau".into(),
        ));
    }
    Ok(d)
}
