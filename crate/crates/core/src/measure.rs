//! Finite measure spaces and their subsets.
//!
//! A space is a finite set of points `0..size` with nonnegative rational
//! weights. Every subset is measurable, so a [`PointSet`] is just a sorted
//! list of indices together with the size of the space it belongs to.

use std::collections::HashMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A subset of a finite space, stored as strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    members: Vec<usize>,
    space_size: usize,
}

impl PointSet {
    /// Sorts and deduplicates `indices`; fails on an index outside the space.
    pub fn new<I>(space_size: usize, indices: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut members: Vec<usize> = indices.into_iter().collect();
        if let Some(&index) = members.iter().find(|&&i| i >= space_size) {
            return Err(Error::IndexOutOfRange {
                index,
                size: space_size,
            });
        }
        members.sort_unstable();
        members.dedup();
        Ok(PointSet {
            members,
            space_size,
        })
    }

    /// Builds from indices already known to be sorted, unique and in range.
    pub(crate) fn from_sorted(space_size: usize, members: Vec<usize>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.last().is_none_or(|&i| i < space_size));
        PointSet {
            members,
            space_size,
        }
    }

    /// Builds from a membership mask.
    pub(crate) fn from_mask(mask: &[bool]) -> Self {
        let members = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        PointSet {
            members,
            space_size: mask.len(),
        }
    }

    pub fn empty(space_size: usize) -> Self {
        PointSet {
            members: Vec::new(),
            space_size,
        }
    }

    pub fn full(space_size: usize) -> Self {
        PointSet {
            members: (0..space_size).collect(),
            space_size,
        }
    }

    pub fn space_size(&self) -> usize {
        self.space_size
    }

    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The characteristic function of the set.
    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    /// Position of `index` among the members, if present.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.members.binary_search(&index).ok()
    }

    pub(crate) fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.space_size];
        for &i in &self.members {
            mask[i] = true;
        }
        mask
    }

    pub fn check_size(&self, expected: usize) -> Result<()> {
        if self.space_size == expected {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected,
                found: self.space_size,
            })
        }
    }

    pub fn complement(&self) -> PointSet {
        let mut members = Vec::with_capacity(self.space_size - self.members.len());
        let mut present = self.members.iter().peekable();
        for i in 0..self.space_size {
            if present.peek() == Some(&&i) {
                present.next();
            } else {
                members.push(i);
            }
        }
        PointSet::from_sorted(self.space_size, members)
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.merge(other, true, true, true)
    }

    pub fn intersect(&self, other: &PointSet) -> Result<PointSet> {
        self.merge(other, false, false, true)
    }

    pub fn difference(&self, other: &PointSet) -> Result<PointSet> {
        self.merge(other, true, false, false)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.space_size == other.space_size && self.iter().all(|i| other.contains(i))
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.iter().all(|i| !other.contains(i))
    }

    /// Sorted merge keeping elements only in `self`, only in `other`, or in both
    /// according to the three flags.
    fn merge(
        &self,
        other: &PointSet,
        keep_left: bool,
        keep_right: bool,
        keep_both: bool,
    ) -> Result<PointSet> {
        other.check_size(self.space_size)?;
        let (a, b) = (&self.members, &other.members);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    if keep_left {
                        out.push(a[i]);
                    }
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    if keep_right {
                        out.push(b[j]);
                    }
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    if keep_both {
                        out.push(a[i]);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        if keep_left {
            out.extend_from_slice(&a[i..]);
        }
        if keep_right {
            out.extend_from_slice(&b[j..]);
        }
        Ok(PointSet::from_sorted(self.space_size, out))
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(serializer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Complement,
    Union,
    Intersect,
    Difference,
}

/// Applies `op` to `a` (and `b` for the binary operations).
pub fn set_algebra(op: SetOp, a: &PointSet, b: Option<&PointSet>) -> Result<PointSet> {
    let need_b = || b.ok_or_else(|| Error::BadParam(format!("{op:?} needs two operands")));
    match op {
        SetOp::Complement => match b {
            None => Ok(a.complement()),
            Some(_) => Err(Error::BadParam("complement takes one operand".into())),
        },
        SetOp::Union => a.union(need_b()?),
        SetOp::Intersect => a.intersect(need_b()?),
        SetOp::Difference => a.difference(need_b()?),
    }
}

/// A finite set of weighted points with the power set as its σ-algebra.
///
/// Points sharing a weight are grouped into classes so that the measure of a
/// set costs one rational multiply per class rather than one add per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMeasureSpace {
    weights: Vec<Rational>,
    class_of: Vec<usize>,
    class_weights: Vec<Rational>,
    total: Rational,
}

impl FiniteMeasureSpace {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        if let Some((index, weight)) = weights.iter().enumerate().find(|(_, w)| w.is_negative()) {
            return Err(Error::NegativeWeight {
                index,
                weight: weight.clone(),
            });
        }
        let mut lookup: HashMap<&Rational, usize> = HashMap::new();
        let mut class_weights = Vec::new();
        let class_of = weights
            .iter()
            .map(|w| {
                *lookup.entry(w).or_insert_with(|| {
                    class_weights.push(w.clone());
                    class_weights.len() - 1
                })
            })
            .collect();
        let total = weights.iter().sum();
        Ok(FiniteMeasureSpace {
            weights,
            class_of,
            class_weights,
            total,
        })
    }

    /// `size` points of weight `total / size` each.
    pub fn uniform(size: usize, total: &Rational) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptySpace);
        }
        let weight = total / &Rational::from_integer(size as i64);
        Self::new(vec![weight; size])
    }

    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &Rational {
        &self.weights[index]
    }

    pub fn total_measure(&self) -> &Rational {
        &self.total
    }

    /// Weighted sum `Σ counts[i] · weight(points[i])` computed per weight class.
    pub(crate) fn weighted_count<I>(&self, points: I) -> Rational
    where
        I: IntoIterator<Item = (usize, u64)>,
    {
        let mut per_class = vec![0u64; self.class_weights.len()];
        for (point, count) in points {
            per_class[self.class_of[point]] += count;
        }
        per_class
            .iter()
            .zip(&self.class_weights)
            .filter(|(&count, w)| count > 0 && !w.is_zero())
            .map(|(&count, w)| w.mul_count(count))
            .sum()
    }

    pub fn measure(&self, set: &PointSet) -> Result<Rational> {
        set.check_size(self.size())?;
        Ok(self.weighted_count(set.iter().map(|i| (i, 1))))
    }
}
