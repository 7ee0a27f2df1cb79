//! Join and meet on `RPD(w)`, comparability tests, and an explicit poset
//! oracle used as ground truth.

use std::collections::HashMap;
use std::fmt::Write as _;

use fixedbitset::FixedBitSet;
use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::moveop::{big_composition, m_explicit, movable};
use crate::moves::{enumerate_rpd_bounded, upper_covers};
use crate::perm::Permutation;
use crate::pipedream::{PipeDream, Tile};

/// Default element cap for [`PosetOracle::build`].
pub const DEFAULT_ORACLE_BUDGET: usize = 200_000;

/// Environment variable overriding [`DEFAULT_ORACLE_BUDGET`].
pub const ORACLE_BUDGET_ENV: &str = "RPD_ORACLE_BUDGET";

/// Which argument holds the cross at a disagreement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Disagreement {
    pub tile: Tile,
    pub side: Side,
}

/// Both dreams must be reduced for the same permutation.
pub fn common_permutation(d1: &PipeDream, d2: &PipeDream) -> Result<Permutation> {
    let (w1, w2) = (d1.permutation(), d2.permutation());
    if w1 != w2 {
        return Err(Error::PermutationMismatch(w1.to_string(), w2.to_string()));
    }
    if !d1.is_reduced() || !d2.is_reduced() {
        return Err(Error::NotReduced);
    }
    Ok(w1)
}

/// Tiles where the two dreams differ, row-major.
pub fn disagreements(d1: &PipeDream, d2: &PipeDream) -> Vec<Tile> {
    let rows = d1.n().max(d2.n());
    let mut out = Vec::new();
    for i in 1..=rows {
        let mut diff = d1.row_mask(i) ^ d2.row_mask(i);
        while diff != 0 {
            let j = diff.trailing_zeros() as usize + 1;
            out.push(Tile::new(i, j));
            diff &= diff - 1;
        }
    }
    out
}

fn side_at(d1: &PipeDream, t: Tile) -> Side {
    if d1.is_cross(t) {
        Side::First
    } else {
        Side::Second
    }
}

/// The differing tile with the largest row, then the smallest column.
pub fn principal_disagreement(d1: &PipeDream, d2: &PipeDream) -> Result<Disagreement> {
    common_permutation(d1, d2)?;
    principal(d1, d2).ok_or(Error::NoDisagreement)
}

fn principal(d1: &PipeDream, d2: &PipeDream) -> Option<Disagreement> {
    let rows = d1.n().max(d2.n());
    (1..=rows).rev().find_map(|i| {
        let diff = d1.row_mask(i) ^ d2.row_mask(i);
        (diff != 0).then(|| {
            let tile = Tile::new(i, diff.trailing_zeros() as usize + 1);
            Disagreement {
                tile,
                side: side_at(d1, tile),
            }
        })
    })
}

/// One step of the join recursion: the principal disagreement and the two
/// dreams after moving the side that held the cross.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinStep {
    pub disagreement: Disagreement,
    pub first: PipeDream,
    pub second: PipeDream,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinTrace {
    pub steps: Vec<JoinStep>,
    pub result: PipeDream,
}

// Every M step raises the sum of tableau entries, which lies between ℓ and
// ℓ·n, so neither side can move more than ℓ·n times.
fn step_guard(w: &Permutation) -> usize {
    2 * w.length() * w.n() + 1
}

/// Runs the join recursion and records every step.
pub fn join_with_trace(d1: &PipeDream, d2: &PipeDream) -> Result<JoinTrace> {
    let w = common_permutation(d1, d2)?;
    let guard = step_guard(&w);
    let (mut a, mut b) = (d1.clone(), d2.clone());
    let mut steps = Vec::new();
    while let Some(dis) = principal(&a, &b) {
        if steps.len() >= guard {
            return Err(Error::Internal(format!(
                "join did not terminate within {guard} steps"
            )));
        }
        let (upper, t) = match dis.side {
            Side::First => (&mut a, dis.tile),
            Side::Second => (&mut b, dis.tile),
        };
        upper_bump_check(upper, t)?;
        *upper = m_explicit(upper, t)?;
        steps.push(JoinStep {
            disagreement: dis,
            first: a.clone(),
            second: b.clone(),
        });
    }
    Ok(JoinTrace { steps, result: a })
}

/// The principal disagreement must be movable on the side holding the cross.
pub fn upper_bump_check(d: &PipeDream, t: Tile) -> Result<()> {
    if movable(d, t) {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "principal disagreement {t} is not movable"
        )))
    }
}

pub fn join(d1: &PipeDream, d2: &PipeDream) -> Result<PipeDream> {
    join_with_trace(d1, d2).map(|t| t.result)
}

/// `(D1ᵗ ∨ D2ᵗ)ᵗ`.
pub fn meet(d1: &PipeDream, d2: &PipeDream) -> Result<PipeDream> {
    join(&d1.transpose(), &d2.transpose()).map(|d| d.transpose())
}

/// `d1 <= d2` iff `d1 ∨ d2 = d2`.
pub fn leq(d1: &PipeDream, d2: &PipeDream) -> Result<bool> {
    Ok(join(d1, d2)? == *d2)
}

/// Disagreements with no other disagreement weakly southwest of them.
pub fn sw_extremal_disagreements(d1: &PipeDream, d2: &PipeDream) -> Vec<Tile> {
    let all = disagreements(d1, d2);
    all.iter()
        .copied()
        .filter(|&s| !all.iter().any(|&t| t != s && t.is_southwest_of(s)))
        .collect()
}

/// Comparability by repeatedly clearing the southwest-extremal
/// disagreements of `d1` at once.
pub fn leq_by_extremal(d1: &PipeDream, d2: &PipeDream) -> Result<bool> {
    let w = common_permutation(d1, d2)?;
    let guard = step_guard(&w);
    let mut cur = d1.clone();
    for _ in 0..guard {
        let s = sw_extremal_disagreements(&cur, d2);
        if s.is_empty() {
            return Ok(true);
        }
        if s.iter().any(|&t| !cur.is_cross(t) || !movable(&cur, t)) {
            return Ok(false);
        }
        cur = big_composition(&cur, &s)?;
    }
    Err(Error::Internal(format!(
        "extremal comparison did not terminate within {guard} rounds"
    )))
}

/// Explicit Hasse diagram of `RPD(w)` with up- and down-closures.
#[derive(Clone, Debug)]
pub struct PosetOracle {
    w: Permutation,
    elements: Vec<PipeDream>,
    index: HashMap<PipeDream, usize>,
    covers: Vec<Vec<usize>>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
}

/// Budget from the environment, falling back to the default.
pub fn oracle_budget() -> usize {
    std::env::var(ORACLE_BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_BUDGET)
}

impl PosetOracle {
    pub fn build(w: &Permutation) -> Result<Self> {
        Self::build_with_budget(w, oracle_budget())
    }

    pub fn build_with_budget(w: &Permutation, budget: usize) -> Result<Self> {
        let mut elements = enumerate_rpd_bounded(w, budget)?;
        elements.sort();
        let index: HashMap<PipeDream, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, d)| (d.clone(), i))
            .collect();
        let covers: Vec<Vec<usize>> = elements
            .iter()
            .map(|d| upper_covers(d).iter().map(|u| index[u]).collect())
            .collect();

        let mut g = DiGraph::<(), ()>::with_capacity(elements.len(), 0);
        let nodes: Vec<NodeIndex> = (0..elements.len()).map(|_| g.add_node(())).collect();
        for (a, cs) in covers.iter().enumerate() {
            for &c in cs {
                g.add_edge(nodes[a], nodes[c], ());
            }
        }
        let order =
            toposort(&g, None).map_err(|_| Error::Internal("cover graph has a cycle".into()))?;

        let m = elements.len();
        let mut up = vec![FixedBitSet::with_capacity(m); m];
        for &v in order.iter().rev() {
            let a = v.index();
            let mut set = FixedBitSet::with_capacity(m);
            set.insert(a);
            for &c in &covers[a] {
                set.union_with(&up[c]);
            }
            up[a] = set;
        }
        let mut down = vec![FixedBitSet::with_capacity(m); m];
        for (a, set) in up.iter().enumerate() {
            for b in set.ones() {
                down[b].insert(a);
            }
        }
        Ok(PosetOracle {
            w: w.clone(),
            elements,
            index,
            covers,
            up,
            down,
        })
    }

    pub fn permutation(&self) -> &Permutation {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PipeDream] {
        &self.elements
    }

    pub fn index_of(&self, d: &PipeDream) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn covers(&self, a: usize) -> &[usize] {
        &self.covers[a]
    }

    pub fn edge_count(&self) -> usize {
        self.covers.iter().map(Vec::len).sum()
    }

    /// Reachability: `a <= b`.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| self.down[a].count_ones(..) == 1)
            .collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| self.up[a].count_ones(..) == 1)
            .collect()
    }

    fn unique_extreme(
        &self,
        set: &FixedBitSet,
        below: &[FixedBitSet],
        what: &str,
    ) -> Result<usize> {
        let mut found = set
            .ones()
            .filter(|&x| below[x].intersection(set).count() == 1);
        match (found.next(), found.next()) {
            (Some(x), None) => Ok(x),
            (None, _) => Err(Error::Internal(format!("no {what} in RPD({})", self.w))),
            (Some(_), Some(_)) => Err(Error::Internal(format!(
                "{what} is not unique in RPD({})",
                self.w
            ))),
        }
    }

    /// The unique minimal common upper bound; an error if it is missing or
    /// not unique.
    pub fn oracle_join(&self, a: usize, b: usize) -> Result<usize> {
        let mut bounds = self.up[a].clone();
        bounds.intersect_with(&self.up[b]);
        self.unique_extreme(&bounds, &self.down, "minimal upper bound")
    }

    pub fn oracle_meet(&self, a: usize, b: usize) -> Result<usize> {
        let mut bounds = self.down[a].clone();
        bounds.intersect_with(&self.down[b]);
        self.unique_extreme(&bounds, &self.up, "maximal lower bound")
    }

    /// Hasse diagram in DOT, bottom element at the bottom.
    pub fn to_dot(&self) -> String {
        let bottom = PipeDream::bottom(&self.w);
        let top = PipeDream::top(&self.w);
        let ids: Vec<String> = self.elements.iter().map(node_id).collect();
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"RPD({})\" {{", self.w);
        out.push_str("  rankdir=BT;\n");
        out.push_str("  node [shape=box, fontname=\"monospace\"];\n");
        for (d, id) in self.elements.iter().zip(&ids) {
            let label = d.to_string().replace('\n', "\\n");
            let style = if *d == bottom && *d == top {
                ", style=filled, fillcolor=\"palegreen\""
            } else if *d == bottom {
                ", style=filled, fillcolor=\"lightblue\""
            } else if *d == top {
                ", style=filled, fillcolor=\"gold\""
            } else {
                ""
            };
            let _ = writeln!(out, "  \"{id}\" [label=\"{label}\"{style}];");
        }
        for (a, cs) in self.covers.iter().enumerate() {
            for &c in cs {
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", ids[a], ids[c]);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Stable node name: a prefix of the SHA-256 of the staircase text.
pub fn node_id(d: &PipeDream) -> String {
    let digest = Sha256::digest(d.to_string().as_bytes());
    hex::encode(&digest[..8])
}
