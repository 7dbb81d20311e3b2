//! Invertible measure-preserving maps of a finite space.
//!
//! A [`Transformation`] is a permutation of `0..size` that carries every
//! point onto a point of exactly the same weight. Pointwise weight equality
//! gives `μ(TA) = μ(A) = μ(T⁻¹A)` for every subset `A`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measure::{FiniteMeasureSpace, PointSet};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transformation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Transformation {
    /// Validates `forward` as a weight-preserving permutation of `space`.
    pub fn new(space: &FiniteMeasureSpace, forward: Vec<usize>) -> Result<Self> {
        let size = space.size();
        if forward.len() != size {
            return Err(Error::LengthMismatch {
                expected: size,
                found: forward.len(),
            });
        }
        let mut inverse = vec![usize::MAX; size];
        for (i, &image) in forward.iter().enumerate() {
            if image >= size {
                return Err(Error::NotBijective {
                    reason: format!("image {image} of point {i} is out of range"),
                });
            }
            if inverse[image] != usize::MAX {
                return Err(Error::NotBijective {
                    reason: format!(
                        "point {image} is the image of both {} and {i}",
                        inverse[image]
                    ),
                });
            }
            inverse[image] = i;
        }
        for (i, &image) in forward.iter().enumerate() {
            if space.weight(i) != space.weight(image) {
                return Err(Error::NotMeasurePreserving {
                    index: i,
                    image,
                    weight: space.weight(i).clone(),
                    image_weight: space.weight(image).clone(),
                });
            }
        }
        Ok(Transformation { forward, inverse })
    }

    pub fn identity(size: usize) -> Self {
        Transformation {
            forward: (0..size).collect(),
            inverse: (0..size).collect(),
        }
    }

    pub fn space_size(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn apply(&self, x: usize) -> usize {
        self.forward[x]
    }

    pub fn apply_inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    /// `Tⁿx` for signed `n`.
    pub fn apply_n(&self, mut x: usize, n: i64) -> usize {
        let table = if n >= 0 { &self.forward } else { &self.inverse };
        for _ in 0..n.unsigned_abs() {
            x = table[x];
        }
        x
    }

    /// Image of `set` under `Tⁿ`; negative `n` iterates the inverse.
    pub fn iterate_set(&self, set: &PointSet, n: i64) -> Result<PointSet> {
        set.check_size(self.space_size())?;
        PointSet::new(self.space_size(), set.iter().map(|x| self.apply_n(x, n)))
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x < self.space_size() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: x,
                size: self.space_size(),
            })
        }
    }

    /// The cycle through `x`.
    pub fn orbit(&self, x: usize) -> Result<OrbitInfo> {
        self.check_point(x)?;
        let mut points = vec![x];
        let mut y = self.forward[x];
        while y != x {
            points.push(y);
            y = self.forward[y];
        }
        let period = points.len();
        Ok(OrbitInfo {
            points: PointSet::new(self.space_size(), points)?,
            period,
        })
    }

    /// Cycle decomposition; each cycle starts at its least point and cycles
    /// are listed by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        cycle_decomposition(&self.forward)
    }

    /// The smallest `T`-invariant set containing `set`: the union of the
    /// cycles that meet it.
    ///
    /// For a permutation of a finite set the forward union `⋃_{n≥0} TⁿE`
    /// and the two-sided union `⋃_{n∈ℤ} TⁿE` coincide, because `T⁻¹ = T^{p-1}`
    /// on a cycle of period `p`. For a general invertible measure-preserving
    /// map they agree only up to null sets; this crate only handles the
    /// finite case.
    pub fn invariant_closure(&self, set: &PointSet) -> Result<PointSet> {
        set.check_size(self.space_size())?;
        let mut mask = vec![false; self.space_size()];
        for start in set.iter() {
            let mut x = start;
            while !mask[x] {
                mask[x] = true;
                x = self.forward[x];
            }
        }
        Ok(PointSet::from_mask(&mask))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitInfo {
    pub points: PointSet,
    pub period: usize,
}

/// A finite measure space together with a validated transformation of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    pub space: FiniteMeasureSpace,
    pub map: Transformation,
}

impl System {
    pub fn new(weights: Vec<Rational>, forward: Vec<usize>) -> Result<Self> {
        let space = FiniteMeasureSpace::new(weights)?;
        let map = Transformation::new(&space, forward)?;
        Ok(System { space, map })
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub fn measure(&self, set: &PointSet) -> Result<Rational> {
        self.space.measure(set)
    }

    /// Exactly one cycle carries positive measure. A null space is not
    /// ergodic.
    pub fn is_ergodic(&self) -> bool {
        self.map
            .cycles()
            .iter()
            .filter(|cycle| cycle.iter().any(|&x| self.space.weight(x).is_positive()))
            .count()
            == 1
    }
}

/// Checks that `map` was built for `space`, then defers to
/// [`System::is_ergodic`].
pub fn is_ergodic(space: &FiniteMeasureSpace, map: &Transformation) -> Result<bool> {
    if map.space_size() != space.size() {
        return Err(Error::SpaceMismatch {
            expected: space.size(),
            found: map.space_size(),
        });
    }
    let system = System {
        space: space.clone(),
        map: map.clone(),
    };
    Ok(system.is_ergodic())
}

/// Stock test systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    /// `x ↦ x + 1 mod n` with `n` points of weight `total / n`.
    Cycle { n: usize, total: Rational },
    /// A uniformly random permutation of `n` points. Each cycle gets its own
    /// weight `p/q` with `q` uniform in `1..=max_denominator` and `p`
    /// uniform in `0..=q`.
    RandomPermutation {
        n: usize,
        seed: u64,
        max_denominator: u64,
    },
    /// The map `(i, j) ↦ (2i + j, i + j) mod q` on the `q × q` torus grid,
    /// cell `(i, j)` at index `i·q + j`, uniform weights `1/q²`.
    CatMap { q: usize },
}

impl Generator {
    pub fn generate(&self) -> Result<System> {
        match *self {
            Generator::Cycle { n, ref total } => {
                if n == 0 {
                    return Err(Error::BadParam("cycle length must be at least 1".into()));
                }
                if total.is_negative() {
                    return Err(Error::BadParam("total measure must be nonnegative".into()));
                }
                let space = FiniteMeasureSpace::uniform(n, total)?;
                let map = Transformation::new(&space, (0..n).map(|i| (i + 1) % n).collect())?;
                Ok(System { space, map })
            }
            Generator::RandomPermutation {
                n,
                seed,
                max_denominator,
            } => {
                if n == 0 {
                    return Err(Error::BadParam("size must be at least 1".into()));
                }
                if max_denominator == 0 {
                    return Err(Error::BadParam("max denominator must be at least 1".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut forward: Vec<usize> = (0..n).collect();
                forward.shuffle(&mut rng);
                let cycles = cycle_decomposition(&forward);
                let mut weights = vec![Rational::zero(); n];
                for cycle in cycles {
                    let q = rng.random_range(1..=max_denominator);
                    let p = rng.random_range(0..=q);
                    let weight = Rational::new(p as i64, q as i64);
                    for x in cycle {
                        weights[x] = weight.clone();
                    }
                }
                System::new(weights, forward)
            }
            Generator::CatMap { q } => {
                if q == 0 {
                    return Err(Error::BadParam("grid order must be at least 1".into()));
                }
                let forward = (0..q * q)
                    .map(|index| {
                        let (i, j) = (index / q, index % q);
                        ((2 * i + j) % q) * q + (i + j) % q
                    })
                    .collect();
                let space = FiniteMeasureSpace::uniform(q * q, &Rational::one())?;
                let map = Transformation::new(&space, forward)?;
                Ok(System { space, map })
            }
        }
    }
}

/// Cycles of a permutation given by its forward table.
fn cycle_decomposition(forward: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; forward.len()];
    let mut cycles = Vec::new();
    for start in 0..forward.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push(x);
            x = forward[x];
        }
        cycles.push(cycle);
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn set(size: usize, members: &[usize]) -> PointSet {
        PointSet::new(size, members.iter().copied()).unwrap()
    }

    fn cycle5() -> System {
        Generator::Cycle {
            n: 5,
            total: Rational::one(),
        }
        .generate()
        .unwrap()
    }

    #[test]
    fn make_transformation_examples() {
        let sys = cycle5();
        assert_eq!(sys.map.forward(), &[1, 2, 3, 4, 0]);
        assert_eq!(sys.map.inverse(), &[4, 0, 1, 2, 3]);

        let err = System::new(vec![r("1/2"), r("1/4"), r("1/4")], vec![1, 2, 0]).unwrap_err();
        assert!(matches!(
            err,
            Error::NotMeasurePreserving {
                index: 0,
                image: 1,
                ..
            }
        ));

        assert!(System::new(vec![r("1/4"), r("1/4"), r("1/2")], vec![1, 0, 2]).is_ok());

        let err = System::new(vec![r("1/3"); 3], vec![0, 0, 1]).unwrap_err();
        assert!(matches!(err, Error::NotBijective { .. }));
        assert!(err.to_string().starts_with("map is not a bijection"));
        assert!(matches!(
            System::new(vec![r("1/3"); 3], vec![0, 1, 3]),
            Err(Error::NotBijective { .. })
        ));
        assert!(matches!(
            System::new(vec![r("1/3"); 3], vec![0, 1]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn iterate_set_examples() {
        let t = cycle5().map;
        assert_eq!(t.iterate_set(&set(5, &[0]), 2).unwrap(), set(5, &[2]));
        assert_eq!(t.iterate_set(&set(5, &[0]), -1).unwrap(), set(5, &[4]));
        assert!(t.iterate_set(&PointSet::empty(5), 7).unwrap().is_empty());
        assert!(matches!(
            t.iterate_set(&PointSet::empty(3), 1),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn orbit_examples() {
        let t = cycle5().map;
        let orbit = t.orbit(0).unwrap();
        assert_eq!(orbit.points, PointSet::full(5));
        assert_eq!(orbit.period, 5);

        let id = Transformation::identity(4);
        assert_eq!(id.orbit(2).unwrap().points, set(4, &[2]));
        assert_eq!(id.orbit(2).unwrap().period, 1);

        let swap = System::new(vec![r("1/4"), r("1/4"), r("1/2")], vec![1, 0, 2]).unwrap();
        assert_eq!(swap.map.orbit(2).unwrap().points, set(3, &[2]));
        assert_eq!(swap.map.orbit(2).unwrap().period, 1);
        assert!(matches!(t.orbit(5), Err(Error::IndexOutOfRange { .. })));
    }

    /// Forward images until the union stops growing.
    fn closure_by_iteration(t: &Transformation, e: &PointSet) -> PointSet {
        let mut acc = e.clone();
        let mut image = e.clone();
        loop {
            image = t.iterate_set(&image, 1).unwrap();
            let next = acc.union(&image).unwrap();
            if next == acc {
                return acc;
            }
            acc = next;
        }
    }

    #[test]
    fn invariant_closure_examples() {
        let t = cycle5().map;
        assert_eq!(
            t.invariant_closure(&set(5, &[0, 2])).unwrap(),
            PointSet::full(5)
        );

        let two_cycles = System::new(vec![r("1/6"); 6], vec![1, 2, 0, 4, 5, 3]).unwrap();
        let e = set(6, &[0]);
        let expected = closure_by_iteration(&two_cycles.map, &e);
        assert_eq!(expected, set(6, &[0, 1, 2]));
        assert_eq!(two_cycles.map.invariant_closure(&e).unwrap(), expected);

        assert!(t.invariant_closure(&PointSet::empty(5)).unwrap().is_empty());
    }

    #[test]
    fn ergodicity_examples() {
        assert!(cycle5().is_ergodic());
        let id = System::new(vec![r("1/4"); 4], vec![0, 1, 2, 3]).unwrap();
        assert!(!id.is_ergodic());
        let null_fixed = System::new(vec![r("1/2"), r("1/2"), r("0")], vec![1, 0, 2]).unwrap();
        assert!(null_fixed.is_ergodic());
        let null_space = System::new(vec![r("0"); 2], vec![1, 0]).unwrap();
        assert!(!null_space.is_ergodic());
        assert!(matches!(
            is_ergodic(&id.space, &Transformation::identity(3)),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn generator_examples() {
        let sys = Generator::CatMap { q: 1 }.generate().unwrap();
        assert_eq!(sys.map.forward(), &[0]);

        // (2i + j, i + j) mod 2 on each cell, cell (i, j) at 2i + j.
        let cells = [(0, 0), (0, 1), (1, 0), (1, 1)];
        let oracle: Vec<usize> = cells
            .iter()
            .map(|&(i, j)| ((2 * i + j) % 2) * 2 + (i + j) % 2)
            .collect();
        let sys = Generator::CatMap { q: 2 }.generate().unwrap();
        assert_eq!(sys.map.forward(), oracle.as_slice());
        assert_eq!(sys.map.forward(), &[0, 3, 1, 2]);

        assert!(Generator::CatMap { q: 0 }.generate().is_err());
        assert!(Generator::Cycle {
            n: 0,
            total: Rational::one()
        }
        .generate()
        .is_err());

        let a = Generator::RandomPermutation {
            n: 50,
            seed: 9,
            max_denominator: 1000,
        };
        assert_eq!(a.generate().unwrap(), a.generate().unwrap());
    }

    proptest! {
        #[test]
        fn generated_systems_preserve_measure(n in 1usize..40, seed in any::<u64>(), mask in prop::collection::vec(any::<bool>(), 40)) {
            let sys = Generator::RandomPermutation { n, seed, max_denominator: 50 }.generate().unwrap();
            let a = PointSet::from_mask(&mask[..n]);
            let mu = sys.measure(&a).unwrap();
            for k in -(n as i64)..=(n as i64) {
                prop_assert_eq!(&sys.measure(&sys.map.iterate_set(&a, k).unwrap()).unwrap(), &mu);
            }
        }

        #[test]
        fn iteration_composes(n in 1usize..30, seed in any::<u64>(), a in -40i64..40, b in -40i64..40, mask in prop::collection::vec(any::<bool>(), 30)) {
            let sys = Generator::RandomPermutation { n, seed, max_denominator: 10 }.generate().unwrap();
            let e = PointSet::from_mask(&mask[..n]);
            let t = &sys.map;
            prop_assert_eq!(
                t.iterate_set(&e, a + b).unwrap(),
                t.iterate_set(&t.iterate_set(&e, a).unwrap(), b).unwrap()
            );
        }

        #[test]
        fn closure_is_minimal_invariant(n in 1usize..30, seed in any::<u64>(), mask in prop::collection::vec(any::<bool>(), 30)) {
            let sys = Generator::RandomPermutation { n, seed, max_denominator: 10 }.generate().unwrap();
            let e = PointSet::from_mask(&mask[..n]);
            let t = &sys.map;
            let closure = t.invariant_closure(&e).unwrap();
            prop_assert!(e.is_subset(&closure));
            prop_assert_eq!(&closure.union(&t.iterate_set(&closure, 1).unwrap()).unwrap(), &closure);
            prop_assert_eq!(&closure_by_iteration(t, &e), &closure);
            let mut orbits = PointSet::empty(n);
            let mut two_sided = PointSet::empty(n);
            for x in e.iter() {
                orbits = orbits.union(&t.orbit(x).unwrap().points).unwrap();
                for k in -(n as i64)..=(n as i64) {
                    two_sided = two_sided.union(&PointSet::new(n, [t.apply_n(x, k)]).unwrap()).unwrap();
                }
            }
            prop_assert_eq!(&orbits, &closure);
            prop_assert_eq!(&two_sided, &closure);
        }

        #[test]
        fn cycles_are_ergodic(n in 1usize..60) {
            let sys = Generator::Cycle { n, total: Rational::one() }.generate().unwrap();
            prop_assert!(sys.is_ergodic());
        }

        #[test]
        fn cat_map_is_a_measure_preserving_bijection(q in 1usize..20) {
            let sys = Generator::CatMap { q }.generate().unwrap();
            prop_assert_eq!(sys.size(), q * q);
            prop_assert_eq!(sys.space.total_measure(), &Rational::one());
        }
    }
}
