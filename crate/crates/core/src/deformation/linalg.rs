//! Exact sparse elimination on the coordinates `(degree, branch, slot)` of a
//! truncated numerator space.

use std::collections::{BTreeMap, HashMap};

use super::scalar::Q;

/// Which of the two vector-field components a coordinate belongs to: `dx`
/// and `dy` for plane modules, `dx` and `dp` for the fake module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    First,
    Second,
}

impl Slot {
    pub fn index(self) -> usize {
        match self {
            Slot::First => 0,
            Slot::Second => 1,
        }
    }

    pub fn from_index(i: usize) -> Slot {
        if i == 0 {
            Slot::First
        } else {
            Slot::Second
        }
    }
}

/// The coordinate `t_branch^degree` in the given slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Coord {
    pub branch: usize,
    pub slot: Slot,
    pub degree: u32,
}

impl Coord {
    /// Elimination order: lowest degree first, then branch, then slot.
    fn graded_key(&self) -> (u32, usize, Slot) {
        (self.degree, self.branch, self.slot)
    }

    /// Output order: slot, then branch, then degree.
    pub fn report_key(&self) -> (Slot, usize, u32) {
        (self.slot, self.branch, self.degree)
    }
}

pub(crate) type SparseRow = BTreeMap<usize, Q>;

/// Coordinates `floor <= degree <= n` for each branch and slot, indexed in
/// graded order.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    floors: Vec<[u32; 2]>,
    n: u32,
    coords: Vec<Coord>,
    index: HashMap<Coord, usize>,
}

impl Layout {
    pub(crate) fn new(floors: &[[u32; 2]], n: u32) -> Self {
        let mut coords = Vec::new();
        for (branch, f) in floors.iter().enumerate() {
            for slot in [Slot::First, Slot::Second] {
                for degree in f[slot.index()]..=n {
                    coords.push(Coord {
                        branch,
                        slot,
                        degree,
                    });
                }
            }
        }
        coords.sort_by_key(Coord::graded_key);
        let index = coords.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        Layout {
            floors: floors.to_vec(),
            n,
            coords,
            index,
        }
    }

    pub(crate) fn floors(&self) -> &[[u32; 2]] {
        &self.floors
    }

    pub(crate) fn n(&self) -> u32 {
        self.n
    }

    pub(crate) fn len(&self) -> usize {
        self.coords.len()
    }

    pub(crate) fn coord(&self, i: usize) -> Coord {
        self.coords[i]
    }

    pub(crate) fn index_of(&self, c: &Coord) -> Option<usize> {
        self.index.get(c).copied()
    }
}

/// Row space of a set of sparse rows, kept in reduced row-echelon form with
/// the pivot of each row at its lowest column.
#[derive(Clone, Debug, Default)]
pub(crate) struct Echelon {
    rows: BTreeMap<usize, SparseRow>,
    reduced: bool,
}

fn axpy(target: &mut SparseRow, factor: &Q, row: &SparseRow) {
    for (&c, v) in row {
        let delta = factor * v;
        match target.entry(c) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(delta);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get() + &delta;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }
}

impl Echelon {
    pub(crate) fn new() -> Self {
        Echelon {
            rows: BTreeMap::new(),
            reduced: true,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Adds `row` to the span; returns whether the rank grew.
    pub(crate) fn insert(&mut self, mut row: SparseRow) -> bool {
        while let Some((&c, lead)) = row.iter().next() {
            match self.rows.get(&c) {
                Some(pivot) => {
                    let factor = -lead;
                    axpy(&mut row, &factor, pivot);
                }
                None => {
                    let inv = lead.recip();
                    for v in row.values_mut() {
                        *v = &*v * &inv;
                    }
                    self.rows.insert(c, row);
                    self.reduced = false;
                    return true;
                }
            }
        }
        false
    }

    /// Clears every pivot column from every other row.
    pub(crate) fn reduce(&mut self) {
        if self.reduced {
            return;
        }
        let pivots: Vec<usize> = self.rows.keys().rev().copied().collect();
        for pc in pivots {
            // rows with larger pivots are already fully reduced
            let mut row = self.rows.remove(&pc).expect("pivot row");
            let later: Vec<usize> = row
                .keys()
                .copied()
                .filter(|c| *c != pc && self.rows.contains_key(c))
                .collect();
            for c in later {
                if let Some(v) = row.get(&c).cloned() {
                    axpy(&mut row, &-&v, &self.rows[&c]);
                }
            }
            self.rows.insert(pc, row);
        }
        self.reduced = true;
    }

    /// The unique representative of `row` modulo the span that has no entry
    /// in a pivot column.
    pub(crate) fn normal_form(&self, mut row: SparseRow) -> SparseRow {
        let mut out = SparseRow::new();
        while let Some((c, v)) = row.pop_first() {
            match self.rows.get(&c) {
                Some(pivot) => {
                    let mut tail = pivot.clone();
                    tail.remove(&c);
                    axpy(&mut row, &-&v, &tail);
                }
                None => {
                    out.insert(c, v);
                }
            }
        }
        out
    }

    /// The span projected onto the columns below `len`. When columns are
    /// graded so that the kept ones form a prefix, this is again reduced.
    pub(crate) fn truncated(&self, len: usize) -> Echelon {
        debug_assert!(self.reduced);
        let rows = self
            .rows
            .range(..len)
            .map(|(&c, row)| (c, row.range(..len).map(|(&k, v)| (k, v.clone())).collect()))
            .collect();
        Echelon {
            rows,
            reduced: true,
        }
    }

    /// Whether the unit vector at `col` lies in the span. Needs [`reduce`].
    pub(crate) fn contains_unit(&self, col: usize) -> bool {
        debug_assert!(self.reduced);
        self.rows
            .get(&col)
            .is_some_and(|r| r.len() == 1 && r[&col].is_one())
    }
}
