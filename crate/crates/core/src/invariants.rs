//! Orbit-type invariants read off a slice representative: the multiplicity
//! vector of the moment spectrum, the flag manifold it sweeps out, the fiber
//! of the orbit over that flag manifold, and the symplectic degeneracy.
//!
//! Finite coverings are ignored throughout; only dimensions and factor types
//! are reported.

use std::fmt;

use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::slice::{slice_matrix, CanonicalForm};
use crate::states::{LocalUnitary, ParticleCase, QuantumState};

/// Default relative gap below which probabilities are clustered together.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
/// Spectral gap used between distinct levels of stratum representatives.
pub const REPRESENTATIVE_GAP: f64 = 0.05;

/// Block sizes of equal entries in the sorted moment spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiplicityVector {
    pub d: Vec<usize>,
    /// The last block carries probability zero (rank-deficient `C`).
    pub degenerate: bool,
}

impl MultiplicityVector {
    pub fn n(&self) -> usize {
        self.d.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.d.len()
    }

    /// Blocks with nonzero probability.
    pub fn occupied(&self) -> &[usize] {
        if self.degenerate {
            &self.d[..self.d.len() - 1]
        } else {
            &self.d
        }
    }

    /// Check the block pattern is realizable for `case`.
    pub fn check(&self, case: ParticleCase) -> Result<()> {
        if self.d.is_empty() || self.d.contains(&0) {
            return Err(Error::InvalidStratum(format!("bad block sizes {:?}", self.d)));
        }
        if self.n() < 2 {
            return Err(Error::InvalidDimension(self.n()));
        }
        if self.degenerate && self.k() == 1 {
            return Err(Error::InvalidStratum(
                "a single zero block describes the zero state".into(),
            ));
        }
        if case == ParticleCase::Fermion {
            if self.occupied().iter().any(|d| d % 2 != 0) {
                return Err(Error::InvalidStratum(format!(
                    "fermion blocks must be even, got {:?}",
                    self.d
                )));
            }
            let last = *self.d.last().expect("nonempty");
            if self.degenerate && last % 2 != self.n() % 2 {
                return Err(Error::InvalidStratum(format!(
                    "fermion zero block {last} has the wrong parity for N = {}",
                    self.n()
                )));
            }
            if !self.degenerate && self.n() % 2 == 1 {
                return Err(Error::InvalidStratum(
                    "odd-N fermion states are always degenerate".into(),
                ));
            }
        }
        Ok(())
    }
}

impl fmt::Display for MultiplicityVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.d.iter().map(|d| d.to_string()).collect();
        write!(
            f,
            "({}){}",
            parts.join(","),
            if self.degenerate { " deg" } else { "" }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiberFactor {
    /// Torus of the given dimension.
    Torus(usize),
    /// `SU_m / SO_m`.
    SymSO(usize),
    /// `SU_m / USp_m`, `m` even.
    SymUSp(usize),
    /// The group manifold `SU_m`.
    GroupSU(usize),
}

impl FiberFactor {
    pub fn dim(self) -> usize {
        match self {
            FiberFactor::Torus(t) => t,
            // dim SU_m − dim SO_m
            FiberFactor::SymSO(m) => (m - 1) * (m + 2) / 2,
            // dim SU_m − dim USp_m
            FiberFactor::SymUSp(m) => (m - 2) * (m + 1) / 2,
            FiberFactor::GroupSU(m) => m * m - 1,
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            FiberFactor::Torus(_) => "torus",
            FiberFactor::SymSO(_) => "sym_so",
            FiberFactor::SymUSp(_) => "sym_usp",
            FiberFactor::GroupSU(_) => "group_su",
        }
    }

    /// The size parameter (`m`, or the torus dimension).
    pub fn m(self) -> usize {
        match self {
            FiberFactor::Torus(m)
            | FiberFactor::SymSO(m)
            | FiberFactor::SymUSp(m)
            | FiberFactor::GroupSU(m) => m,
        }
    }
}

impl fmt::Display for FiberFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FiberFactor::Torus(t) => write!(f, "T{t}"),
            FiberFactor::SymSO(m) => write!(f, "SU{m}/SO{m}"),
            FiberFactor::SymUSp(m) => write!(f, "SU{m}/USp{m}"),
            FiberFactor::GroupSU(m) => write!(f, "SU{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitInvariants {
    pub case: ParticleCase,
    pub multiplicity: MultiplicityVector,
    pub flag_dim_real: usize,
    pub fiber_factors: Vec<FiberFactor>,
    pub fiber_dim: usize,
    pub orbit_dim: usize,
    /// Degeneracy of the Fubini-Study form restricted to the orbit; equals
    /// the fiber dimension.
    pub degeneracy_d: usize,
}

impl OrbitInvariants {
    /// Assemble all dimension data for a stratum.
    pub fn for_stratum(case: ParticleCase, multiplicity: MultiplicityVector) -> Result<Self> {
        let fiber_factors = fiber_structure(&multiplicity, case)?;
        let flag_dim_real = flag_dimension(&multiplicity, case);
        let fiber_dim = fiber_factors.iter().map(|f| f.dim()).sum();
        Ok(OrbitInvariants {
            case,
            multiplicity,
            flag_dim_real,
            fiber_factors,
            fiber_dim,
            orbit_dim: flag_dim_real + fiber_dim,
            degeneracy_d: fiber_dim,
        })
    }

    /// Rank of the restricted symplectic form.
    pub fn symplectic_rank(&self) -> usize {
        self.orbit_dim - self.degeneracy_d
    }
}

/// Cluster a descending probability vector into blocks. Consecutive entries
/// closer than `cluster_tol · p_max` share a block; entries within that
/// distance of zero form the zero block.
pub fn multiplicity_vector(
    p: &[f64],
    case: ParticleCase,
    cluster_tol: f64,
) -> Result<MultiplicityVector> {
    let n = p.len();
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let pmax = p[0];
    if pmax <= 0.0 || !pmax.is_finite() {
        return Err(Error::ZeroState);
    }
    let eps = cluster_tol * pmax;
    if p.iter().any(|x| *x < -eps) || p.windows(2).any(|w| w[1] > w[0] + eps) {
        return Err(Error::UnsortedInput);
    }
    let zeros = p.iter().rev().take_while(|x| **x <= eps).count();
    let occupied = &p[..n - zeros];
    let mut d = Vec::new();
    let mut size = 0;
    for (i, x) in occupied.iter().enumerate() {
        size += 1;
        let boundary = occupied.get(i + 1).is_none_or(|next| x - next > eps);
        if boundary {
            d.push(size);
            size = 0;
        }
    }
    if zeros > 0 {
        d.push(zeros);
    }
    let mv = MultiplicityVector {
        d,
        degenerate: zeros > 0,
    };
    mv.check(case)?;
    Ok(mv)
}

/// Smallest probability gap separating the blocks of `mv` in `p` (including
/// the gap to zero of a nondegenerate last block): how far the state sits
/// from the nearest coarser stratum. `None` for `d = (N)`.
pub fn stratum_margin(p: &[f64], mv: &MultiplicityVector) -> Option<f64> {
    let mut gaps = Vec::new();
    let mut start = 0;
    for (i, size) in mv.d.iter().enumerate() {
        let end = start + size;
        if end < p.len() {
            gaps.push(p[end - 1] - p[end]);
        } else if !(mv.degenerate && i == mv.k() - 1) && mv.k() > 1 {
            gaps.push(p[end - 1]);
        }
        start = end;
    }
    gaps.into_iter().reduce(f64::min)
}

/// Real dimension of the coadjoint orbit `F(d_1, …, d_k)` (doubled for
/// distinguishable particles).
pub fn flag_dimension(mv: &MultiplicityVector, case: ParticleCase) -> usize {
    let n = mv.n();
    let base = n * n - mv.d.iter().map(|d| d * d).sum::<usize>();
    match case {
        ParticleCase::Distinguishable => 2 * base,
        _ => base,
    }
}

/// Torus and symmetric-space factors of the moment-map fiber.
pub fn fiber_structure(mv: &MultiplicityVector, case: ParticleCase) -> Result<Vec<FiberFactor>> {
    mv.check(case)?;
    let k = mv.k();
    let torus = if mv.degenerate { k - 2 } else { k - 1 };
    let factor = |m: usize| match case {
        ParticleCase::Boson => FiberFactor::SymSO(m),
        ParticleCase::Fermion => FiberFactor::SymUSp(m),
        ParticleCase::Distinguishable => FiberFactor::GroupSU(m),
    };
    let mut factors = vec![FiberFactor::Torus(torus)];
    factors.extend(mv.occupied().iter().map(|&m| factor(m)));
    Ok(factors)
}

/// Invariants of the orbit through a canonical form.
pub fn orbit_invariants(cf: &CanonicalForm, cluster_tol: f64) -> Result<OrbitInvariants> {
    let mv = multiplicity_vector(&cf.probabilities(), cf.case(), cluster_tol)?;
    OrbitInvariants::for_stratum(cf.case(), mv)
}

/// Every stratum for `(case, n)`, sorted by orbit dimension descending (ties
/// broken by multiplicity vector, nondegenerate first).
pub fn enumerate_strata(case: ParticleCase, n: usize) -> Result<Vec<OrbitInvariants>> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let mut strata = Vec::new();
    for d in compositions(n) {
        for degenerate in [false, true] {
            let mv = MultiplicityVector {
                d: d.clone(),
                degenerate,
            };
            if mv.check(case).is_ok() {
                strata.push(OrbitInvariants::for_stratum(case, mv)?);
            }
        }
    }
    strata.sort_by(|a, b| {
        b.orbit_dim
            .cmp(&a.orbit_dim)
            .then_with(|| a.multiplicity.d.cmp(&b.multiplicity.d))
            .then_with(|| a.multiplicity.degenerate.cmp(&b.multiplicity.degenerate))
    });
    Ok(strata)
}

/// All ordered compositions of `n`.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Probability level of each occupied block of a representative. Distinct
/// levels are spaced by [`REPRESENTATIVE_GAP`] when that fits, otherwise
/// equally from zero.
fn representative_levels(mv: &MultiplicityVector) -> Vec<f64> {
    let occ = mv.occupied();
    let k = occ.len();
    let weight_from_zero: usize = occ.iter().enumerate().map(|(i, d)| d * (k - i)).sum();
    let equal = 1.0 / weight_from_zero as f64;
    let spread: usize = occ.iter().enumerate().map(|(i, d)| d * (k - 1 - i)).sum();
    let mass: usize = occ.iter().sum();
    let base = (1.0 - REPRESENTATIVE_GAP * spread as f64) / mass as f64;
    if equal >= REPRESENTATIVE_GAP || base <= 0.0 {
        (0..k).map(|i| equal * (k - i) as f64).collect()
    } else {
        (0..k)
            .map(|i| base + REPRESENTATIVE_GAP * (k - 1 - i) as f64)
            .collect()
    }
}

/// Slice point of a stratum with well separated levels.
pub fn slice_representative(case: ParticleCase, mv: &MultiplicityVector) -> Result<QuantumState> {
    mv.check(case)?;
    let levels = representative_levels(mv);
    let mut lambdas = Vec::new();
    for (level, size) in levels.iter().zip(mv.occupied()) {
        let copies = if case == ParticleCase::Fermion { size / 2 } else { *size };
        lambdas.extend(std::iter::repeat_n(level.sqrt(), copies));
    }
    let c: CMatrix = slice_matrix(case, mv.n(), &lambdas);
    QuantumState::validate(&c, case, 1e-12)
}

/// A stratum representative moved off the slice by a random local unitary.
pub fn sampled_representative(
    case: ParticleCase,
    mv: &MultiplicityVector,
    seed: u64,
) -> Result<QuantumState> {
    let s = slice_representative(case, mv)?;
    let g = LocalUnitary::random(case, mv.n(), seed)?;
    s.act(&g)
}

/// Deterministic seed stream derived from a base seed.
pub fn derived_seed(base: u64, index: u64) -> u64 {
    use rand::Rng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.random()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slice::canonicalize;

    fn mv(d: &[usize], degenerate: bool) -> MultiplicityVector {
        MultiplicityVector {
            d: d.to_vec(),
            degenerate,
        }
    }

    #[test]
    fn symmetric_space_dimensions() {
        assert_eq!(FiberFactor::SymSO(1).dim(), 0);
        assert_eq!(FiberFactor::SymSO(2).dim(), 2);
        assert_eq!(FiberFactor::SymSO(3).dim(), 5);
        assert_eq!(FiberFactor::SymUSp(2).dim(), 0);
        assert_eq!(FiberFactor::SymUSp(4).dim(), 5);
        assert_eq!(FiberFactor::GroupSU(2).dim(), 3);
        for m in 1..8usize {
            assert_eq!(FiberFactor::SymSO(m).dim(), m * m - 1 - m * (m - 1) / 2);
        }
        for m in (2..10usize).step_by(2) {
            assert_eq!(FiberFactor::SymUSp(m).dim(), m * m - 1 - m * (m + 1) / 2);
        }
    }

    #[test]
    fn multiplicity_examples() {
        let b = ParticleCase::Boson;
        assert_eq!(multiplicity_vector(&[0.5, 0.3, 0.2], b, 1e-8).unwrap(), mv(&[1, 1, 1], false));
        assert_eq!(multiplicity_vector(&[0.5, 0.5, 0.0], b, 1e-8).unwrap(), mv(&[2, 1], true));
        let (p1, p2) = (0.3, 0.2);
        assert_eq!(
            multiplicity_vector(&[p1, p1, p2, p2, 0.0], ParticleCase::Fermion, 1e-8).unwrap(),
            mv(&[2, 2, 1], true)
        );
        assert_eq!(
            multiplicity_vector(&[0.5, 0.5, 0.0, 0.0, 0.0], ParticleCase::Fermion, 1e-8).unwrap(),
            mv(&[2, 3], true)
        );
        assert_eq!(multiplicity_vector(&[0.2, 0.5, 0.3], b, 1e-8), Err(Error::UnsortedInput));
        assert!(multiplicity_vector(&[0.4, 0.3, 0.3], ParticleCase::Fermion, 1e-8).is_err());
    }

    #[test]
    fn flag_dimension_examples() {
        assert_eq!(flag_dimension(&mv(&[4], false), ParticleCase::Boson), 0);
        assert_eq!(flag_dimension(&mv(&[1, 1], false), ParticleCase::Boson), 2);
        assert_eq!(flag_dimension(&mv(&[1, 1], false), ParticleCase::Distinguishable), 4);
    }

    #[test]
    fn fiber_examples() {
        let f = fiber_structure(&mv(&[2], false), ParticleCase::Boson).unwrap();
        assert_eq!(f, vec![FiberFactor::Torus(0), FiberFactor::SymSO(2)]);
        assert_eq!(f.iter().map(|x| x.dim()).sum::<usize>(), 2);

        for n in 1..=3usize {
            let f = fiber_structure(&mv(&vec![2; n], false), ParticleCase::Fermion).unwrap();
            assert_eq!(f[0], FiberFactor::Torus(n - 1));
            assert_eq!(f.iter().map(|x| x.dim()).sum::<usize>(), n - 1);
        }

        let f = fiber_structure(&mv(&[2], false), ParticleCase::Distinguishable).unwrap();
        assert_eq!(f, vec![FiberFactor::Torus(0), FiberFactor::GroupSU(2)]);

        assert!(matches!(
            fiber_structure(&mv(&[3], true), ParticleCase::Boson),
            Err(Error::InvalidStratum(_))
        ));
    }

    #[test]
    fn orbit_invariant_examples() {
        for n in 2..=5 {
            let mut e = CMatrix::zeros(n, n);
            e[(0, 0)] = 1.0.into();
            let cf = canonicalize(&QuantumState::validate(&e, ParticleCase::Boson, 1e-9).unwrap()).unwrap();
            let inv = orbit_invariants(&cf, DEFAULT_CLUSTER_TOL).unwrap();
            assert_eq!(inv.multiplicity, mv(&[1, n - 1], true));
            assert_eq!(inv.fiber_factors, vec![FiberFactor::Torus(0), FiberFactor::SymSO(1)]);
            assert_eq!(inv.degeneracy_d, 0);
        }

        let mut w = CMatrix::zeros(4, 4);
        w[(0, 1)] = 1.0.into();
        w[(1, 0)] = (-1.0).into();
        let cf = canonicalize(&QuantumState::validate(&w, ParticleCase::Fermion, 1e-9).unwrap()).unwrap();
        let inv = orbit_invariants(&cf, DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(inv.multiplicity, mv(&[2, 2], true));
        assert_eq!(inv.fiber_factors, vec![FiberFactor::Torus(0), FiberFactor::SymUSp(2)]);
        assert_eq!((inv.degeneracy_d, inv.orbit_dim, inv.flag_dim_real), (0, 8, 8));

        for n in 2..=6 {
            let generic = OrbitInvariants::for_stratum(ParticleCase::Boson, mv(&vec![1; n], false)).unwrap();
            assert_eq!(generic.degeneracy_d, n - 1);
            assert_eq!(generic.fiber_factors.len(), n + 1);
        }
    }

    #[test]
    fn small_strata_tables() {
        let summary = |case, n| -> Vec<(Vec<usize>, bool, usize)> {
            enumerate_strata(case, n)
                .unwrap()
                .into_iter()
                .map(|s| (s.multiplicity.d, s.multiplicity.degenerate, s.degeneracy_d))
                .collect()
        };
        assert_eq!(
            summary(ParticleCase::Boson, 2),
            vec![(vec![1, 1], false, 1), (vec![1, 1], true, 0), (vec![2], false, 2)]
        );
        assert_eq!(summary(ParticleCase::Fermion, 2), vec![(vec![2], false, 0)]);
        assert_eq!(
            summary(ParticleCase::Distinguishable, 2),
            vec![(vec![1, 1], false, 1), (vec![1, 1], true, 0), (vec![2], false, 3)]
        );
        assert_eq!(summary(ParticleCase::Fermion, 3), vec![(vec![2, 1], true, 0)]);
    }

    #[test]
    fn strata_invariants_hold() {
        for case in ParticleCase::ALL {
            for n in 2..=6 {
                let strata = enumerate_strata(case, n).unwrap();
                let max = strata.iter().map(|s| s.orbit_dim).max().unwrap();
                for s in &strata {
                    assert_eq!(s.orbit_dim - s.degeneracy_d, s.flag_dim_real);
                    assert_eq!(s.fiber_dim, s.fiber_factors.iter().map(|f| f.dim()).sum::<usize>());
                }
                let generic = strata
                    .iter()
                    .find(|s| {
                        let occ = s.multiplicity.occupied();
                        let minimal = if case == ParticleCase::Fermion { 2 } else { 1 };
                        occ.iter().all(|d| *d == minimal)
                            && (n % 2 == 1 && case == ParticleCase::Fermion) == s.multiplicity.degenerate
                            && (!s.multiplicity.degenerate || s.multiplicity.d.last() == Some(&1))
                    })
                    .unwrap();
                assert_eq!(generic.orbit_dim, max, "{case} {n}");
            }
        }
    }

    #[test]
    fn representatives_land_in_their_stratum() {
        for case in ParticleCase::ALL {
            for n in 2..=6 {
                for (i, s) in enumerate_strata(case, n).unwrap().iter().enumerate() {
                    let rep = sampled_representative(case, &s.multiplicity, i as u64).unwrap();
                    let cf = canonicalize(&rep).unwrap_or_else(|e| panic!("{case} {} {e}", s.multiplicity));
                    let p = cf.probabilities();
                    let inv = orbit_invariants(&cf, DEFAULT_CLUSTER_TOL).unwrap();
                    assert_eq!(inv.multiplicity, s.multiplicity, "{case} {n}");
                    let margin = stratum_margin(&p, &inv.multiplicity);
                    if let Some(m) = margin {
                        assert!(m > 0.04, "{case} {n} {} margin {m}", s.multiplicity);
                    }
                }
            }
        }
    }

    #[test]
    fn margin_examples() {
        assert_eq!(stratum_margin(&[1.0 / 3.0; 3], &mv(&[3], false)), None);
        let m = stratum_margin(&[0.5, 0.3, 0.2], &mv(&[1, 1, 1], false)).unwrap();
        assert!((m - 0.1).abs() < 1e-12);
        let m = stratum_margin(&[0.6, 0.4, 0.0], &mv(&[1, 1, 1], true)).unwrap();
        assert!((m - 0.2).abs() < 1e-12);
    }
}
