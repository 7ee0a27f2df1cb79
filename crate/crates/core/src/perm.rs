//! Permutations in one-line notation, inversion sets and Rothe diagrams.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipedream::Tile;

/// A permutation of `[n]` in one-line notation, stored 1-based.
///
/// Trailing fixed points are trimmed on construction, so `[2,1,3]` and `[2,1]`
/// are the same value. The identity is stored as `[1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    oneline: Vec<usize>,
}

impl Permutation {
    pub fn new(mut oneline: Vec<usize>) -> Result<Self> {
        let n = oneline.len();
        let mut seen = vec![false; n + 1];
        for &v in &oneline {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} is outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!("value {v} repeats")));
            }
        }
        while oneline.len() > 1 && oneline[oneline.len() - 1] == oneline.len() {
            oneline.pop();
        }
        if oneline.is_empty() {
            oneline.push(1);
        }
        Ok(Permutation { oneline })
    }

    pub fn identity() -> Self {
        Permutation { oneline: vec![1] }
    }

    /// Every permutation of `[n]` in lexicographic order of one-line notation.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (1..=n)
            .permutations(n)
            .map(|v| Permutation::new(v).expect("itertools yields bijections"))
    }

    /// Size of the grid this permutation lives on (after trimming).
    pub fn n(&self) -> usize {
        self.oneline.len()
    }

    pub fn oneline(&self) -> &[usize] {
        &self.oneline
    }

    /// `w(i)`, extended by fixed points beyond `n`.
    pub fn apply(&self, i: usize) -> usize {
        assert!(i >= 1, "permutations are 1-based");
        self.oneline.get(i - 1).copied().unwrap_or(i)
    }

    pub fn is_identity(&self) -> bool {
        self.oneline == [1]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.oneline.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Permutation { oneline: inv }
    }

    /// Pairs `i < j` with `w(i) > w(j)`, in lexicographic order.
    pub fn inversions(&self) -> Vec<(usize, usize)> {
        let w = &self.oneline;
        let mut out = Vec::new();
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    /// Coxeter length `ℓ(w) = |Inv(w)|`.
    pub fn length(&self) -> usize {
        let w = &self.oneline;
        (0..w.len())
            .map(|i| w[i + 1..].iter().filter(|&&v| v < w[i]).count())
            .sum()
    }

    /// The Rothe diagram: cells `(i,j)` with `j < w(i)` and `i < w⁻¹(j)`.
    pub fn rothe_diagram(&self) -> Diagram {
        let n = self.n();
        let inv = self.inverse();
        let mut cells = BTreeSet::new();
        for i in 1..=n {
            for j in 1..self.apply(i) {
                if i < inv.apply(j) {
                    cells.insert(Tile::new(i, j));
                }
            }
        }
        Diagram {
            n,
            cells,
            dots: (1..=n).map(|i| Tile::new(i, self.apply(i))).collect(),
        }
    }

    /// Number of dots `(i, w(i))` weakly northwest of a diagram cell.
    ///
    /// No dot shares a row or column with a diagram cell on its northwest
    /// side, so the weak count equals the strict one.
    pub fn dots_northwest(&self, cell: Tile) -> Result<usize> {
        if !self.in_diagram(cell) {
            return Err(Error::NotADiagramCell(cell));
        }
        Ok((1..=cell.row)
            .filter(|&i| self.apply(i) <= cell.col)
            .count())
    }

    fn in_diagram(&self, cell: Tile) -> bool {
        cell.row >= 1
            && cell.col >= 1
            && cell.row <= self.n()
            && cell.col < self.apply(cell.row)
            && cell.row < self.inverse().apply(cell.col)
    }
}

impl Default for Permutation {
    fn default() -> Self {
        Permutation::identity()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for v in &self.oneline {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            write!(f, "{}", self.oneline.iter().join(","))
        }
    }
}

/// Accepts compact digit strings (`"314652"`, n ≤ 9) and comma-separated
/// lists (`"3,1,4,6,5,2"`). Whitespace around entries is ignored.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidPermutation("empty input".into()));
        }
        let values: Vec<usize> = if s.contains(',') {
            s.split(',')
                .map(|part| {
                    part.trim().parse::<usize>().map_err(|_| {
                        Error::InvalidPermutation(format!(
                            "`{}` is not a positive integer",
                            part.trim()
                        ))
                    })
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::InvalidPermutation(format!("`{c}` is not a digit")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::new(values)
    }
}

/// Rothe diagram of a permutation, together with its dots `(i, w(i))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagram {
    pub n: usize,
    pub cells: BTreeSet<Tile>,
    pub dots: Vec<Tile>,
}

impl Diagram {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagram serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn cells(v: &[(usize, usize)]) -> BTreeSet<Tile> {
        v.iter().map(|&(i, j)| Tile::new(i, j)).collect()
    }

    // Second description of the diagram: {(i, w(j)) : i < j, w(i) > w(j)}.
    fn diagram_via_inversions(w: &Permutation) -> BTreeSet<Tile> {
        w.inversions()
            .into_iter()
            .map(|(i, j)| Tile::new(i, w.apply(j)))
            .collect()
    }

    #[test]
    fn parse_forms_agree_and_trim() {
        assert_eq!(p("314652"), p("3,1,4,6,5,2"));
        assert_eq!(p("2,1,3").oneline(), &[2, 1]);
        assert_eq!(p("123"), Permutation::identity());
        assert_eq!(p("10,1,2,3,4,5,6,7,8,9").n(), 10);
        assert!("1,1".parse::<Permutation>().is_err());
        assert!("14a".parse::<Permutation>().is_err());
        assert!("".parse::<Permutation>().is_err());
        assert!("0,1".parse::<Permutation>().is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p("123").inverse(), p("123"));
        let w = p("314652");
        let v = w.inverse();
        assert_eq!(v, p("261354"));
        for i in 1..=w.n() {
            assert_eq!(v.apply(w.apply(i)), i);
        }
        assert_eq!(p("1432").inverse(), p("1432"));
    }

    #[test]
    fn inversion_examples() {
        assert!(p("123").inversions().is_empty());
        assert_eq!(
            p("126453").inversions(),
            vec![(3, 4), (3, 5), (3, 6), (4, 6), (5, 6)]
        );
        assert_eq!(p("1432").inversions(), vec![(2, 3), (2, 4), (3, 4)]);
        assert_eq!(p("126453").length(), 5);
    }

    #[test]
    fn rothe_diagram_examples() {
        assert_eq!(
            p("43152").rothe_diagram().cells,
            cells(&[(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (4, 2)])
        );
        assert!(Permutation::identity().rothe_diagram().cells.is_empty());
        let w = p("1432");
        let expected = cells(&[(2, 2), (2, 3), (3, 2)]);
        assert_eq!(w.rothe_diagram().cells, expected);
        assert_eq!(diagram_via_inversions(&w), expected);
    }

    #[test]
    fn diagram_properties_exhaustive() {
        for n in 1..=6 {
            for w in Permutation::all(n) {
                let d = w.rothe_diagram();
                assert_eq!(d.cells.len(), w.inversions().len(), "{w}");
                assert_eq!(d.cells, diagram_via_inversions(&w), "{w}");
                assert!(d.cells.iter().all(|c| !d.dots.contains(c)));
                assert_eq!(w.inverse().inverse(), w);
                // (x,y) ∈ Inv(w⁻¹) iff (w⁻¹(y), x) is a diagram cell.
                let winv = w.inverse();
                let keyed: BTreeSet<Tile> = winv
                    .inversions()
                    .into_iter()
                    .map(|(x, y)| Tile::new(winv.apply(y), x))
                    .collect();
                assert_eq!(keyed, d.cells, "{w}");
            }
        }
    }

    #[test]
    fn dots_northwest_examples() {
        assert_eq!(p("21").dots_northwest(Tile::new(1, 1)), Ok(0));
        assert_eq!(p("1432").dots_northwest(Tile::new(3, 2)), Ok(1));
        assert_eq!(p("314652").dots_northwest(Tile::new(4, 5)), Ok(3));
        assert_eq!(
            p("1432").dots_northwest(Tile::new(1, 1)),
            Err(Error::NotADiagramCell(Tile::new(1, 1)))
        );
    }

    #[test]
    fn weak_and_strict_northwest_agree() {
        for n in 1..=6 {
            for w in Permutation::all(n) {
                for cell in w.rothe_diagram().cells {
                    let strict = (1..cell.row).filter(|&i| w.apply(i) < cell.col).count();
                    assert_eq!(w.dots_northwest(cell).unwrap(), strict);
                }
            }
        }
    }

    #[test]
    fn diagram_json_shape() {
        let json = p("21").rothe_diagram().to_json();
        assert_eq!(json, r#"{"n":2,"cells":[[1,1]],"dots":[[1,2],[2,1]]}"#);
    }
}
