//! The pipe dream grid model.
//!
//! A pipe dream is a finite set of cross tiles in the positive quadrant (matrix
//! coordinates, 1-based); every other tile is a bump. Pipes enter along the top
//! boundary, pipe `x` at column `x`, and leave through the left boundary. A
//! [`PipeDream`] additionally carries a display size `n`: tiles `(i,j)` with
//! `i + j <= n + 1` are drawn, and crosses must satisfy `i + j <= n`, so the
//! anti-diagonal tile of every row is a bump.
//!
//! Equality, hashing and ordering only look at the cross set.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest supported grid size; rows are stored as 64-bit column masks.
pub const MAX_N: usize = 64;

/// A tile position `(row, col)`, 1-based. Orders row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    pub row: usize,
    pub col: usize,
}

impl Tile {
    pub const fn new(row: usize, col: usize) -> Self {
        Tile { row, col }
    }

    /// Weakly southwest: `row >= other.row` and `col <= other.col`.
    pub fn is_southwest_of(self, other: Tile) -> bool {
        self.row >= other.row && self.col <= other.col
    }

    pub fn is_northeast_of(self, other: Tile) -> bool {
        other.is_southwest_of(self)
    }

    /// Neither tile is southwest of the other.
    pub fn southwest_incomparable(self, other: Tile) -> bool {
        !self.is_southwest_of(other) && !other.is_southwest_of(self)
    }

    pub fn transpose(self) -> Tile {
        Tile::new(self.col, self.row)
    }
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

impl From<(usize, usize)> for Tile {
    fn from((row, col): (usize, usize)) -> Self {
        Tile::new(row, col)
    }
}

impl FromStr for Tile {
    type Err = Error;

    /// Parses `"i,j"` (parentheses optional).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            line: 1,
            column: 1,
            message: format!("expected a tile `i,j`, got `{s}`"),
        };
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = t.split_once(',').ok_or_else(bad)?;
        let row = a.trim().parse::<usize>().map_err(|_| bad())?;
        let col = b.trim().parse::<usize>().map_err(|_| bad())?;
        if row == 0 || col == 0 {
            return Err(bad());
        }
        Ok(Tile::new(row, col))
    }
}

impl Serialize for Tile {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.row)?;
        t.serialize_element(&self.col)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Tile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (row, col) = <(usize, usize)>::deserialize(deserializer)?;
        if row == 0 || col == 0 {
            return Err(de::Error::custom("tile coordinates are 1-based"));
        }
        Ok(Tile::new(row, col))
    }
}

/// A pipe dream: a set of cross tiles plus a display size.
#[derive(Clone, Debug)]
pub struct PipeDream {
    n: usize,
    // rows[i-1] has bit (j-1) set iff (i,j) is a cross
    rows: Vec<u64>,
}

impl PipeDream {
    /// The empty pipe dream of size `n`.
    pub fn empty(n: usize) -> Self {
        PipeDream {
            n: n.max(1),
            rows: vec![0; n.max(1)],
        }
    }

    pub fn from_crosses<I>(n: usize, crosses: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: Into<Tile>,
    {
        if n > MAX_N {
            return Err(Error::GridTooLarge(n));
        }
        let mut pd = PipeDream::empty(n);
        for t in crosses {
            let t = t.into();
            if t.row == 0 || t.col == 0 || t.row + t.col > pd.n {
                return Err(Error::Parse {
                    line: t.row,
                    column: t.col,
                    message: format!("cross {t} lies outside the size-{} staircase", pd.n),
                });
            }
            pd.rows[t.row - 1] |= 1 << (t.col - 1);
        }
        Ok(pd)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// A copy with a different display size. Fails if a cross would fall
    /// outside the new staircase.
    pub fn resized(&self, n: usize) -> Result<Self> {
        PipeDream::from_crosses(n, self.crosses())
    }

    pub fn is_cross(&self, t: Tile) -> bool {
        self.get(t.row, t.col)
    }

    /// `D(i,j) = +`. Out-of-range positions are bumps.
    pub fn get(&self, i: usize, j: usize) -> bool {
        i >= 1
            && (1..=64).contains(&j)
            && self.rows.get(i - 1).is_some_and(|r| r >> (j - 1) & 1 == 1)
    }

    pub(crate) fn set(&mut self, t: Tile, cross: bool) {
        debug_assert!(t.row >= 1 && t.col >= 1 && t.col <= 64);
        if t.row > self.rows.len() {
            self.rows.resize(t.row, 0);
        }
        let bit = 1u64 << (t.col - 1);
        if cross {
            self.rows[t.row - 1] |= bit;
        } else {
            self.rows[t.row - 1] &= !bit;
        }
        if cross && t.row + t.col > self.n {
            self.n = t.row + t.col;
            self.rows.resize(self.n, 0);
        }
    }

    /// Cross tiles in row-major order.
    pub fn crosses(&self) -> Vec<Tile> {
        let mut out = Vec::with_capacity(self.len());
        for (i, &r) in self.rows.iter().enumerate() {
            let mut bits = r;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                out.push(Tile::new(i + 1, j + 1));
                bits &= bits - 1;
            }
        }
        out
    }

    /// Number of crosses.
    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Column mask of row `i` (bit `j-1` for column `j`).
    pub fn row_mask(&self, i: usize) -> u64 {
        if i == 0 {
            return 0;
        }
        self.rows.get(i - 1).copied().unwrap_or(0)
    }

    fn significant_rows(&self) -> &[u64] {
        let end = self.rows.iter().rposition(|&r| r != 0).map_or(0, |p| p + 1);
        &self.rows[..end]
    }

    /// Crosses `{(j,i) : (i,j) ∈ D}`; the display size is kept.
    pub fn transpose(&self) -> PipeDream {
        let mut t = PipeDream::empty(self.n);
        for c in self.crosses() {
            t.rows[c.col - 1] |= 1 << (c.row - 1);
        }
        t
    }

    /// Follows pipe `x` from the top of column `x` to the left boundary.
    pub fn trace_pipe(&self, x: usize) -> PipeTrace {
        assert!(x >= 1, "pipes are labelled from 1");
        let mut visits = Vec::new();
        let (mut r, mut c) = (1usize, x);
        let mut entry = Entry::North;
        while c >= 1 {
            let tile = Tile::new(r, c);
            let cross = self.get(r, c);
            visits.push(Visit { tile, entry, cross });
            // cross: straight through; bump: north<->west, east<->south
            let heading_south = match (cross, entry) {
                (true, Entry::North) => true,
                (true, Entry::East) => false,
                (false, Entry::North) => false,
                (false, Entry::East) => true,
            };
            if heading_south {
                r += 1;
                entry = Entry::North;
            } else {
                c -= 1;
                entry = Entry::East;
            }
        }
        let left_bumps = visits
            .iter()
            .rev()
            .filter(|v| v.is_left_bump())
            .map(|v| v.tile)
            .collect();
        PipeTrace {
            pipe: x,
            exit_row: r,
            visits,
            left_bumps,
        }
    }

    /// Traces of pipes `1..=n`.
    pub fn traces(&self) -> Vec<PipeTrace> {
        (1..=self.n).map(|x| self.trace_pipe(x)).collect()
    }

    /// The permutation read down the left boundary.
    pub fn permutation(&self) -> Permutation {
        let mut w = vec![0; self.n];
        for x in 1..=self.n {
            let r = self.trace_pipe(x).exit_row;
            w[r - 1] = x;
        }
        Permutation::new(w).expect("pipes of a staircase pipe dream realize a bijection")
    }

    /// `|D| = ℓ(w)`; equivalently no two pipes cross twice.
    pub fn is_reduced(&self) -> bool {
        self.len() == self.permutation().length()
    }

    /// For every cross tile, the pair `(vertical pipe, horizontal pipe)`.
    pub fn crossing_pipes(&self) -> std::collections::HashMap<Tile, (usize, usize)> {
        let mut vertical = std::collections::HashMap::new();
        let mut horizontal = std::collections::HashMap::new();
        for tr in self.traces() {
            for v in &tr.visits {
                if v.cross {
                    match v.entry {
                        Entry::North => vertical.insert(v.tile, tr.pipe),
                        Entry::East => horizontal.insert(v.tile, tr.pipe),
                    };
                }
            }
        }
        vertical
            .into_iter()
            .map(|(t, x)| (t, (x, horizontal[&t])))
            .collect()
    }

    /// Crosses of each diagram row left-justified.
    pub fn bottom(w: &Permutation) -> PipeDream {
        let d = w.rothe_diagram();
        let mut pd = PipeDream::empty(w.n());
        for i in 1..=w.n() {
            let count = d.cells.iter().filter(|c| c.row == i).count();
            pd.rows[i - 1] = (1u64 << count) - 1;
        }
        pd
    }

    /// Crosses of each diagram column top-justified.
    pub fn top(w: &Permutation) -> PipeDream {
        let d = w.rothe_diagram();
        let mut pd = PipeDream::empty(w.n());
        for j in 1..=w.n() {
            let count = d.cells.iter().filter(|c| c.col == j).count();
            for i in 1..=count {
                pd.rows[i - 1] |= 1 << (j - 1);
            }
        }
        pd
    }

    /// JSON form `{"n":…,"crosses":[[i,j],…]}`, crosses row-major.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pipe dream serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Box-drawing picture of the pipes, three characters per tile side.
    /// Decorative only.
    pub fn render_unicode(&self) -> String {
        let n = self.n;
        let mut out = String::new();
        let width = n.to_string().len();
        out.push_str(&" ".repeat(width + 1));
        for x in 1..=n {
            out.push_str(&format!(" {:<2}", x % 100));
        }
        out.push('\n');
        for i in 1..=n {
            for sub in 0..3 {
                if sub == 1 {
                    let label = self.permutation().apply(i);
                    out.push_str(&format!("{label:>width$}━"));
                } else {
                    out.push_str(&" ".repeat(width + 1));
                }
                for j in 1..=n + 1 - i {
                    let glyph = if self.get(i, j) {
                        [" ┃ ", "━╋━", " ┃ "][sub]
                    } else {
                        ["╭╯ ", "╯ ╭", " ╭╯"][sub]
                    };
                    out.push_str(glyph);
                }
                out.push('\n');
            }
        }
        out
    }
}

impl PartialEq for PipeDream {
    fn eq(&self, other: &Self) -> bool {
        self.significant_rows() == other.significant_rows()
    }
}

impl Eq for PipeDream {}

impl Hash for PipeDream {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.significant_rows().hash(state);
    }
}

impl PartialOrd for PipeDream {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Arbitrary but deterministic total order on cross sets (row masks
/// lexicographically). Not the lattice order.
impl Ord for PipeDream {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.significant_rows().cmp(other.significant_rows())
    }
}

/// Staircase text: row `i` has `n + 1 - i` symbols, `+` for a cross and `.`
/// for a bump, rows separated by newlines.
impl fmt::Display for PipeDream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.n {
            if i > 1 {
                f.write_str("\n")?;
            }
            for j in 1..=self.n + 1 - i {
                f.write_str(if self.get(i, j) { "+" } else { "." })?;
            }
        }
        Ok(())
    }
}

impl FromStr for PipeDream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lines: Vec<&str> = s
            .strip_suffix('\n')
            .unwrap_or(s)
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .collect();
        let err = |line: usize, column: usize, message: String| Error::Parse {
            line,
            column,
            message,
        };
        let n = lines[0].chars().count();
        if n == 0 {
            return Err(err(1, 1, "empty pipe dream".into()));
        }
        if n > MAX_N {
            return Err(Error::GridTooLarge(n));
        }
        if lines.len() != n {
            return Err(err(
                lines.len().min(n + 1),
                1,
                format!(
                    "expected {n} rows for a size-{n} staircase, found {}",
                    lines.len()
                ),
            ));
        }
        let mut pd = PipeDream::empty(n);
        for (idx, line) in lines.iter().enumerate() {
            let i = idx + 1;
            let len = line.chars().count();
            if len != n + 1 - i {
                return Err(err(
                    i,
                    len.min(n + 1 - i) + 1,
                    format!("row {i} must have {} symbols, found {len}", n + 1 - i),
                ));
            }
            for (jdx, ch) in line.chars().enumerate() {
                let j = jdx + 1;
                match ch {
                    '.' => {}
                    '+' if i + j <= n => pd.rows[i - 1] |= 1 << (j - 1),
                    '+' => {
                        return Err(err(
                            i,
                            j,
                            "cross on the anti-diagonal, outside the staircase".into(),
                        ))
                    }
                    other => return Err(err(i, j, format!("illegal character `{other}`"))),
                }
            }
        }
        Ok(pd)
    }
}

#[derive(Serialize, Deserialize)]
struct PipeDreamJson {
    n: usize,
    crosses: Vec<Tile>,
}

impl Serialize for PipeDream {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PipeDreamJson {
            n: self.n,
            crosses: self.crosses(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PipeDream {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PipeDreamJson::deserialize(deserializer)?;
        PipeDream::from_crosses(raw.n, raw.crosses).map_err(de::Error::custom)
    }
}

/// Edge through which a pipe enters a tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    North,
    East,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Visit {
    pub tile: Tile,
    pub entry: Entry,
    pub cross: bool,
}

impl Visit {
    /// Cross entered from the north; the pipe is the smaller label there.
    pub fn is_vertical_cross(&self) -> bool {
        self.cross && self.entry == Entry::North
    }

    pub fn is_horizontal_cross(&self) -> bool {
        self.cross && self.entry == Entry::East
    }

    /// Bump entered from the north and left to the west.
    pub fn is_left_bump(&self) -> bool {
        !self.cross && self.entry == Entry::North
    }

    pub fn is_down_bump(&self) -> bool {
        !self.cross && self.entry == Entry::East
    }
}

/// The route of a single pipe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipeTrace {
    pub pipe: usize,
    pub visits: Vec<Visit>,
    /// Left bumps ordered south to north: `left_bumps[t-1]` is the t-th.
    pub left_bumps: Vec<Tile>,
    pub exit_row: usize,
}

impl PipeTrace {
    /// Number of left bumps strictly south of `row`.
    pub fn left_bumps_below(&self, row: usize) -> usize {
        self.left_bumps.iter().filter(|t| t.row > row).count()
    }
}
