//! Rational interval exchange transformations.
//!
//! An [`Iet`] cuts `[0, total)` into half-open intervals of the given
//! lengths and lays them back down in a new order. With rational data every
//! breakpoint lies on the grid of `q` equal cells, `q` the least common
//! multiple of the breakpoint denominators after scaling by `total`, and the
//! exchange moves whole cells. [`compile`] produces that cell permutation so
//! all return-time questions reduce exactly to the finite model.

use num_traits::ToPrimitive;

use crate::dynamics::{System, Transformation};
use crate::error::{Error, Result};
use crate::measure::{FiniteMeasureSpace, PointSet};
use crate::rational::Rational;
use crate::recurrence::induced_map;

/// Largest grid a compilation may allocate.
pub const MAX_GRID_ORDER: usize = 1 << 24;

/// An interval exchange. `permutation[s]` is the index of the interval that
/// occupies slot `s` after the exchange, so `[1, 0]` swaps two intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iet {
    lengths: Vec<Rational>,
    permutation: Vec<usize>,
    total: Rational,
    starts: Vec<Rational>,
    offsets: Vec<Rational>,
}

impl Iet {
    pub fn new(lengths: Vec<Rational>, permutation: Vec<usize>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::BadParam(
                "an exchange needs at least one interval".into(),
            ));
        }
        if let Some((index, length)) = lengths.iter().enumerate().find(|(_, l)| !l.is_positive()) {
            return Err(Error::NonpositiveLength {
                index,
                length: length.clone(),
            });
        }
        let m = lengths.len();
        let mut seen = vec![false; m];
        if permutation.len() != m
            || permutation
                .iter()
                .any(|&i| i >= m || std::mem::replace(&mut seen[i], true))
        {
            return Err(Error::BadPermutation { size: m });
        }

        let mut starts = Vec::with_capacity(m);
        let mut total = Rational::zero();
        for length in &lengths {
            starts.push(total.clone());
            total += length;
        }
        let mut offsets = vec![Rational::zero(); m];
        let mut slot_start = Rational::zero();
        for &i in &permutation {
            offsets[i] = &slot_start - &starts[i];
            slot_start += &lengths[i];
        }
        Ok(Iet {
            lengths,
            permutation,
            total,
            starts,
            offsets,
        })
    }

    /// `x ↦ x + alpha (mod total)` as the exchange of `[0, total - alpha)`
    /// and `[total - alpha, total)`.
    pub fn rotation(alpha: &Rational, total: &Rational) -> Result<Self> {
        if !alpha.is_positive() || alpha >= total {
            return Err(Error::BadParam(format!(
                "rotation amount {alpha} must lie strictly between 0 and {total}"
            )));
        }
        Iet::new(vec![total - alpha, alpha.clone()], vec![1, 0])
    }

    /// Builds an exchange from intervals given by their lengths and
    /// translations, ordering the slots by image position.
    fn from_translations(lengths: Vec<Rational>, offsets: &[Rational]) -> Result<Self> {
        let mut starts = Vec::with_capacity(lengths.len());
        let mut at = Rational::zero();
        for length in &lengths {
            starts.push(at.clone());
            at += length;
        }
        let mut permutation: Vec<usize> = (0..lengths.len()).collect();
        permutation.sort_by(|&a, &b| (&starts[a] + &offsets[a]).cmp(&(&starts[b] + &offsets[b])));
        Iet::new(lengths, permutation)
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn total(&self) -> &Rational {
        &self.total
    }

    /// Left endpoints of the intervals, `0` first.
    pub fn breakpoints(&self) -> &[Rational] {
        &self.starts
    }

    /// Translation applied to each interval.
    pub fn translations(&self) -> &[Rational] {
        &self.offsets
    }

    fn interval_of(&self, x: &Rational) -> usize {
        self.starts.partition_point(|s| s <= x) - 1
    }

    pub fn apply(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() || x >= &self.total {
            return Err(Error::OutOfDomain {
                x: x.clone(),
                total: self.total.clone(),
            });
        }
        Ok(x + &self.offsets[self.interval_of(x)])
    }

    /// Merges neighbouring intervals that move by the same translation. Two
    /// exchanges define the same map exactly when their canonical forms are
    /// equal.
    pub fn canonical(&self) -> Iet {
        let mut lengths: Vec<Rational> = Vec::new();
        let mut offsets: Vec<Rational> = Vec::new();
        for (length, offset) in self.lengths.iter().zip(&self.offsets) {
            match (lengths.last_mut(), offsets.last()) {
                (Some(last), Some(prev)) if prev == offset => *last += length,
                _ => {
                    lengths.push(length.clone());
                    offsets.push(offset.clone());
                }
            }
        }
        Iet::from_translations(lengths, &offsets).expect("merging keeps a valid exchange")
    }
}

/// A finite union of half-open intervals `[a, b)`, sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSet {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalSet {
    /// Sorts the intervals and rejects empty, negative or overlapping ones.
    pub fn new(mut intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        for (start, end) in &intervals {
            let reason = if start.is_negative() {
                Some("starts below 0")
            } else if start >= end {
                Some("is empty")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(Error::BadInterval {
                    start: start.clone(),
                    end: end.clone(),
                    reason,
                });
            }
        }
        intervals.sort();
        if let Some(pair) = intervals.windows(2).find(|w| w[1].0 < w[0].1) {
            return Err(Error::BadInterval {
                start: pair[1].0.clone(),
                end: pair[1].1.clone(),
                reason: "overlaps the previous interval",
            });
        }
        Ok(IntervalSet { intervals })
    }

    pub fn empty() -> Self {
        IntervalSet {
            intervals: Vec::new(),
        }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total length.
    pub fn length(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|(a, b)| a <= x && x < b)
    }

    fn endpoints(&self) -> impl Iterator<Item = &Rational> {
        self.intervals.iter().flat_map(|(a, b)| [a, b])
    }
}

/// An exchange reduced to a permutation of `grid_order` equal cells; cell
/// `k` is `[k·total/q, (k+1)·total/q)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compilation {
    pub grid_order: usize,
    pub space: FiniteMeasureSpace,
    pub map: Transformation,
    total: Rational,
    cell_width: Rational,
}

impl Compilation {
    pub fn total(&self) -> &Rational {
        &self.total
    }

    pub fn cell_width(&self) -> &Rational {
        &self.cell_width
    }

    pub fn cell_interval(&self, k: usize) -> (Rational, Rational) {
        let start = self.cell_width.mul_count(k as u64);
        let end = &start + &self.cell_width;
        (start, end)
    }

    pub fn cell_midpoint(&self, k: usize) -> Rational {
        let (start, end) = self.cell_interval(k);
        (start + end) / Rational::from_integer(2)
    }

    /// Cell containing `x`, if `x ∈ [0, total)`.
    pub fn cell_of(&self, x: &Rational) -> Option<usize> {
        if x.is_negative() || x >= &self.total {
            return None;
        }
        let scaled = x / &self.cell_width;
        (scaled.numer() / scaled.denom()).to_usize()
    }

    pub fn system(&self) -> System {
        System {
            space: self.space.clone(),
            map: self.map.clone(),
        }
    }

    /// Maximal runs of adjacent cells, as intervals.
    pub fn cells_to_intervals(&self, cells: &PointSet) -> IntervalSet {
        let mut intervals: Vec<(Rational, Rational)> = Vec::new();
        let mut run: Option<(usize, usize)> = None;
        for k in cells.iter() {
            run = match run {
                Some((first, last)) if last + 1 == k => Some((first, k)),
                Some((first, last)) => {
                    intervals.push((self.cell_interval(first).0, self.cell_interval(last).1));
                    Some((k, k))
                }
                None => Some((k, k)),
            };
        }
        if let Some((first, last)) = run {
            intervals.push((self.cell_interval(first).0, self.cell_interval(last).1));
        }
        IntervalSet { intervals }
    }

    fn cells_of(&self, set: &IntervalSet) -> Result<PointSet> {
        let mut cells = Vec::new();
        for (a, b) in &set.intervals {
            if b > &self.total {
                return Err(Error::BadInterval {
                    start: a.clone(),
                    end: b.clone(),
                    reason: "extends past the end of the domain",
                });
            }
            cells.extend(self.grid_index(a)..self.grid_index(b));
        }
        PointSet::new(self.grid_order, cells)
    }

    /// `x / cell_width` for a grid point `x`.
    fn grid_index(&self, x: &Rational) -> usize {
        (x / &self.cell_width)
            .to_u64()
            .and_then(|k| usize::try_from(k).ok())
            .expect("grid points are whole multiples of the cell width")
    }
}

/// Compiles `iet` together with `sets` onto the coarsest common grid and
/// returns the cell permutation plus the cell image of each set.
pub fn compile(iet: &Iet, sets: &[IntervalSet]) -> Result<(Compilation, Vec<PointSet>)> {
    let scaled: Vec<Rational> = iet
        .starts
        .iter()
        .chain(sets.iter().flat_map(IntervalSet::endpoints))
        .map(|x| x / &iet.total)
        .collect();
    let grid_order = Rational::lcm_of_denominators(&scaled)
        .to_usize()
        .filter(|&q| q <= MAX_GRID_ORDER)
        .ok_or_else(|| Error::BadParam(format!("grid order exceeds {MAX_GRID_ORDER} cells")))?;
    let cell_width = &iet.total / &Rational::from_integer(grid_order as i64);
    let space = FiniteMeasureSpace::uniform(grid_order, &iet.total)?;

    let mut compilation = Compilation {
        grid_order,
        space,
        map: Transformation::identity(grid_order),
        total: iet.total.clone(),
        cell_width,
    };

    let mut forward = vec![0; grid_order];
    for (i, (start, length)) in iet.starts.iter().zip(&iet.lengths).enumerate() {
        let first = compilation.grid_index(start);
        let count = compilation.grid_index(length);
        let target = compilation.grid_index(&(start + &iet.offsets[i]));
        for j in 0..count {
            forward[first + j] = target + j;
        }
    }
    compilation.map = Transformation::new(&compilation.space, forward)?;

    let cells = sets
        .iter()
        .map(|set| compilation.cells_of(set))
        .collect::<Result<_>>()?;
    Ok((compilation, cells))
}

/// The first-return map of `iet` on `set`, re-coordinatized so that the
/// members of `set` are laid end to end on `[0, length(set))`. Cells that
/// are consecutive in `set` and move by the same displacement form one
/// interval of the result.
pub fn induced_iet(iet: &Iet, set: &IntervalSet) -> Result<Iet> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let (compilation, cells) = compile(iet, std::slice::from_ref(set))?;
    let induced = induced_map(&compilation.system(), &cells[0])?;

    let width = compilation.cell_width();
    let mut runs: Vec<(usize, i64)> = Vec::new();
    for (i, &j) in induced.map.forward().iter().enumerate() {
        let shift = j as i64 - i as i64;
        match runs.last_mut() {
            Some((count, last)) if *last == shift => *count += 1,
            _ => runs.push((1, shift)),
        }
    }
    let lengths = runs
        .iter()
        .map(|&(count, _)| width.mul_count(count as u64))
        .collect();
    let offsets: Vec<Rational> = runs
        .iter()
        .map(|&(_, shift)| {
            let magnitude = width.mul_count(shift.unsigned_abs());
            if shift < 0 {
                -magnitude
            } else {
                magnitude
            }
        })
        .collect();
    Iet::from_translations(lengths, &offsets)
}
