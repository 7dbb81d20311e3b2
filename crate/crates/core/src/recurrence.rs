//! First-return times and the return-time integral.
//!
//! For a set `E` and a point `x ∈ E`, the return time `n_E(x)` is the least
//! `n ≥ 1` with `Tⁿx ∈ E`. This module computes `∫_E n_E dμ` and the
//! measure of the invariant closure `I_E`, and exposes every intermediate
//! quantity linking the two: the series of complement measures, its
//! push-forward form, the disjoint decomposition of `⋃_{n≥0} TⁿE`, the
//! induced map and the tower over `E`.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::dynamics::{System, Transformation};
use crate::error::{Error, Result};
use crate::measure::PointSet;
use crate::rational::Rational;

/// `n_E(x)`. `Infinite` is part of the interface for general systems but is
/// never produced for a permutation, where every point is periodic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReturnTime {
    Finite(usize),
    Infinite,
}

impl ReturnTime {
    pub fn finite(self) -> Option<usize> {
        match self {
            ReturnTime::Finite(n) => Some(n),
            ReturnTime::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ReturnTime::Finite(_))
    }
}

impl Serialize for ReturnTime {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ReturnTime::Finite(n) => serializer.serialize_u64(*n as u64),
            ReturnTime::Infinite => serializer.serialize_str("infinite"),
        }
    }
}

/// `n_E` on the members of `E`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnTimeFunction {
    pub entries: BTreeMap<usize, ReturnTime>,
}

impl ReturnTimeFunction {
    pub fn get(&self, x: usize) -> Option<ReturnTime> {
        self.entries.get(&x).copied()
    }
}

/// Walks forward from `x` to the next member of `in_set`. Terminates for a
/// permutation because the walk comes back to `x` within one period.
fn first_return(map: &Transformation, in_set: &[bool], x: usize) -> (usize, usize) {
    let mut y = map.apply(x);
    let mut steps = 1;
    while !in_set[y] {
        y = map.apply(y);
        steps += 1;
    }
    (steps, y)
}

pub fn return_time(map: &Transformation, set: &PointSet, x: usize) -> Result<ReturnTime> {
    set.check_size(map.space_size())?;
    if !set.contains(x) {
        return Err(Error::NotInSet { index: x });
    }
    let (steps, _) = first_return(map, &set.mask(), x);
    Ok(ReturnTime::Finite(steps))
}

/// `n_E` for every member of `E`. Total work is linear in the size of the
/// cycles meeting `E`: the walks out of consecutive members of one cycle
/// cover disjoint arcs.
pub fn return_times(map: &Transformation, set: &PointSet) -> Result<ReturnTimeFunction> {
    set.check_size(map.space_size())?;
    let mask = set.mask();
    let entries = set
        .iter()
        .map(|x| (x, ReturnTime::Finite(first_return(map, &mask, x).0)))
        .collect();
    Ok(ReturnTimeFunction { entries })
}

/// `∫_E n_E dμ = Σ_{x∈E} n_E(x)·μ{x}`.
pub fn return_integral(system: &System, set: &PointSet) -> Result<Rational> {
    let times = return_times(&system.map, set)?;
    Ok(integrate(system, &times))
}

fn integrate(system: &System, times: &ReturnTimeFunction) -> Rational {
    system
        .space
        .weighted_count(times.entries.iter().map(|(&x, t)| {
            let n = t.finite().expect("permutation return times are finite");
            (x, n as u64)
        }))
}

/// Both sides of `∫_E n_E dμ = μ(I_E)`.
///
/// `equal` is the verdict. It is `true` for every valid system; a `false`
/// report means one of the two computations is wrong, and it is returned as
/// data rather than an error so callers can surface it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
    #[serde(rename = "invariant_closure")]
    pub rhs_set: PointSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_lhs: Option<Rational>,
}

impl VerificationReport {
    /// Assembles a report from the two sides; `total` is the measure of the
    /// whole space and is used only for `normalized_lhs`.
    pub fn new(lhs: Rational, rhs_set: PointSet, rhs: Rational, total: &Rational) -> Self {
        let equal = lhs == rhs;
        let normalized_lhs = lhs.checked_div(total);
        VerificationReport {
            lhs,
            rhs,
            equal,
            rhs_set,
            normalized_lhs,
        }
    }
}

pub fn kac_check(system: &System, set: &PointSet) -> Result<VerificationReport> {
    let lhs = return_integral(system, set)?;
    let rhs_set = system.map.invariant_closure(set)?;
    let rhs = system.measure(&rhs_set)?;
    Ok(VerificationReport::new(
        lhs,
        rhs_set,
        rhs,
        system.space.total_measure(),
    ))
}

/// Terms of the integrated expansion of `n_E`, indexed from `n = 1`:
///
/// * `terms_a[n-1] = μ((⋃_{ν=1}^n T^{-ν}E)ᶜ ∩ E)`
/// * `terms_b[n-1] = μ((⋃_{ν=0}^{n-1} T^νE)ᶜ ∩ TⁿE)`
/// * `partial_sums[n-1] = μ(E) + Σ_{k≤n} a_k`
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    #[serde(rename = "mu_E")]
    pub mu_e: Rational,
    pub terms_a: Vec<Rational>,
    pub terms_b: Vec<Rational>,
    pub partial_sums: Vec<Rational>,
}

/// Computes both term sequences by direct set construction up to `horizon`
/// (default: the size of the space, past which every term vanishes).
pub fn series_terms(
    system: &System,
    set: &PointSet,
    horizon: Option<usize>,
) -> Result<SeriesReport> {
    set.check_size(system.size())?;
    let map = &system.map;
    let horizon = horizon.unwrap_or(system.size());
    let mu_e = system.measure(set)?;

    let mut terms_a = Vec::with_capacity(horizon);
    let mut terms_b = Vec::with_capacity(horizon);
    let mut partial_sums = Vec::with_capacity(horizon);

    // ⋃_{ν=1}^n T^{-ν}E and its newest member T^{-n}E.
    let mut preimages = PointSet::empty(system.size());
    let mut preimage = set.clone();
    // ⋃_{ν=0}^{n-1} T^νE and T^nE.
    let mut forward_union = set.clone();
    let mut image = set.clone();
    let mut sum = mu_e.clone();

    for _ in 1..=horizon {
        preimage = map.iterate_set(&preimage, -1)?;
        preimages = preimages.union(&preimage)?;
        let a = system.measure(&set.difference(&preimages)?)?;

        image = map.iterate_set(&image, 1)?;
        let b = system.measure(&image.difference(&forward_union)?)?;
        forward_union = forward_union.union(&image)?;

        sum += &a;
        terms_a.push(a);
        terms_b.push(b);
        partial_sums.push(sum.clone());
    }
    Ok(SeriesReport {
        mu_e,
        terms_a,
        terms_b,
        partial_sums,
    })
}

/// `D₀ = E`, `Dₙ = (⋃_{ν<n} T^νE)ᶜ ∩ TⁿE`, stopping before the first empty
/// `Dₙ` with `n ≥ 1` (all later pieces are empty too). The pieces are
/// pairwise disjoint and their union is `I_E`.
pub fn disjoint_decomposition(map: &Transformation, set: &PointSet) -> Result<Vec<PointSet>> {
    set.check_size(map.space_size())?;
    let mut pieces = vec![set.clone()];
    let mut covered = set.clone();
    let mut image = set.clone();
    loop {
        image = map.iterate_set(&image, 1)?;
        let piece = image.difference(&covered)?;
        if piece.is_empty() {
            return Ok(pieces);
        }
        covered = covered.union(&piece)?;
        pieces.push(piece);
    }
}

/// The first-return map `x ↦ T^{n_E(x)}x` on `E`, as a system whose point
/// `i` is the `i`-th member of `E` with its original weight.
pub fn induced_map(system: &System, set: &PointSet) -> Result<System> {
    set.check_size(system.size())?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mask = set.mask();
    let weights = set.iter().map(|x| system.space.weight(x).clone()).collect();
    let forward = set
        .iter()
        .map(|x| {
            let (_, y) = first_return(&system.map, &mask, x);
            set.position(y).expect("first return lands in the set")
        })
        .collect();
    System::new(weights, forward)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerColumn {
    pub return_time: usize,
    /// `E_r = {x ∈ E : n_E(x) = r}`.
    pub base: PointSet,
    /// `T^k E_r` for `k = 0..r`.
    pub levels: Vec<PointSet>,
}

/// The tower over `E`: one column per distinct return time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Tower {
    pub columns: Vec<TowerColumn>,
}

impl Tower {
    pub fn levels(&self) -> impl Iterator<Item = &PointSet> {
        self.columns.iter().flat_map(|c| c.levels.iter())
    }
}

fn group_by_return_time(times: &ReturnTimeFunction, size: usize) -> BTreeMap<usize, PointSet> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&x, t) in &times.entries {
        let r = t.finite().expect("permutation return times are finite");
        groups.entry(r).or_default().push(x);
    }
    groups
        .into_iter()
        .map(|(r, members)| (r, PointSet::from_sorted(size, members)))
        .collect()
}

pub fn kakutani_tower(system: &System, set: &PointSet) -> Result<Tower> {
    set.check_size(system.size())?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let times = return_times(&system.map, set)?;
    let columns = group_by_return_time(&times, system.size())
        .into_iter()
        .map(|(return_time, base)| {
            let mut levels = Vec::with_capacity(return_time);
            let mut level = base.clone();
            for _ in 0..return_time {
                let next = system.map.iterate_set(&level, 1)?;
                levels.push(level);
                level = next;
            }
            Ok(TowerColumn {
                return_time,
                base,
                levels,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Tower { columns })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnMass {
    pub k: usize,
    pub mass: Rational,
}

/// `μ{x ∈ E : n_E(x) = k}` for each return time `k` that occurs, ascending.
pub fn return_time_distribution(system: &System, set: &PointSet) -> Result<Vec<ReturnMass>> {
    let times = return_times(&system.map, set)?;
    group_by_return_time(&times, system.size())
        .into_iter()
        .map(|(k, base)| {
            Ok(ReturnMass {
                k,
                mass: system.measure(&base)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoincareReport {
    pub all_return: bool,
    /// Positive-weight members of `E` that never return.
    pub exceptional: PointSet,
}

/// Points of `E` with infinite return time, ignoring null points.
///
/// On a finite permutation system every point is periodic, so this always
/// reports `all_return = true`. The check keeps the almost-everywhere
/// recurrence statement executable against the same interface a
/// general system would use.
pub fn poincare_check(system: &System, set: &PointSet) -> Result<PoincareReport> {
    let times = return_times(&system.map, set)?;
    let exceptional = PointSet::from_sorted(
        system.size(),
        times
            .entries
            .iter()
            .filter(|(&x, t)| !t.is_finite() && system.space.weight(x).is_positive())
            .map(|(&x, _)| x)
            .collect(),
    );
    Ok(PoincareReport {
        all_return: exceptional.is_empty(),
        exceptional,
    })
}
