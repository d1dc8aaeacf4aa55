//! The orbit-seed construction.
//!
//! Inside the trace-zero set T0 of F_{q^3}* sits the norm-one transversal L0
//! (|L0| = q+1, and L0 * F_q^* = T0). For each x in L0 the norm profile W_x
//! — the 2q norms N(lambda + z) and their gamma-scaled inverses, with
//! z = x^q - x^{q^2} — takes every multiplicity in {1, 4}; the cube roots of
//! the multiplicity-4 values form the selector set L_x of size (q+1)/3, and
//! E, the union of x * L_x over x in L0,
//! is the seed set of size (q+1)^2/3 that drives everything downstream: the
//! multiset identity D1 + D2 = 3E + T0, and the Singer-orbit point set
//! M = union of O_(1,z) for z in E on the quadric, a tight set of parameter
//! x = (q+1)^2/3.

use crate::error::{Error, Result};
use crate::field::{Fe, FieldCtx, ONE, ZERO};
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

/// Multiset over field elements with u32 multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multiset {
    counts: HashMap<Fe, u32>,
}

impl Multiset {
    pub fn new() -> Self {
        Multiset { counts: HashMap::new() }
    }

    pub fn insert(&mut self, x: Fe) {
        self.insert_n(x, 1);
    }

    pub fn insert_n(&mut self, x: Fe, n: u32) {
        if n > 0 {
            *self.counts.entry(x).or_insert(0) += n;
        }
    }

    pub fn count(&self, x: Fe) -> u32 {
        self.counts.get(&x).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn support_len(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Fe, u32)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn merge(&mut self, other: &Multiset) {
        for (x, n) in other.iter() {
            self.insert_n(x, n);
        }
    }

    /// Every element of the multiset as a flat list (with repetition),
    /// sorted for determinism.
    pub fn elements(&self) -> Vec<Fe> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for (x, n) in self.iter() {
            out.extend(std::iter::repeat_n(x, n as usize));
        }
        out.sort_unstable();
        out
    }
}

impl FromIterator<Fe> for Multiset {
    fn from_iter<I: IntoIterator<Item = Fe>>(iter: I) -> Self {
        let mut ms = Multiset::new();
        for x in iter {
            ms.insert(x);
        }
        ms
    }
}

/// Canonical projective representative of a nonzero pair (xi, eta) in
/// F_{q^3} x F_{q^3}: scale by the subfield unit that makes the first
/// nonzero F_q-coordinate (xi's three, then eta's three) equal to 1. The
/// result is pivot-normalized exactly like the fixed PG(5,q) enumeration.
pub fn canonical_pair(ctx: &FieldCtx, pair: (Fe, Fe)) -> (Fe, Fe) {
    let (x, y) = pair;
    debug_assert!(!(x.is_zero() && y.is_zero()));
    let lead = |v: Fe| ctx.coords_over_fq(v).into_iter().find(|c| !c.is_zero());
    let pivot = lead(x).or_else(|| lead(y)).unwrap();
    if pivot == ONE {
        return pair;
    }
    let s = ctx.inv_nz(pivot);
    (ctx.mul(x, s), ctx.mul(y, s))
}

pub struct ConstructionModel {
    ctx: Arc<FieldCtx>,
    trace_zero: Vec<Fe>,
    norm_one: Vec<Fe>,
    singer: Vec<Fe>,
    /// (x, L_x) for each x in the norm-one transversal, selector sets sorted.
    selectors: Vec<(Fe, Vec<Fe>)>,
    orbit_seeds: Vec<Fe>,
    seed_set: HashSet<Fe>,
    beta: Fe,
    gamma: Fe,
    x_param: u32,
}

impl ConstructionModel {
    pub fn build(ctx: Arc<FieldCtx>) -> Result<Self> {
        let q = ctx.q();
        let trace_zero: Vec<Fe> = (1..ctx.q3())
            .map(Fe)
            .filter(|&x| ctx.trace_is_zero(x))
            .collect();
        debug_assert_eq!(trace_zero.len() as u32, q * q - 1);
        let norm_one: Vec<Fe> = trace_zero
            .iter()
            .copied()
            .filter(|&x| ctx.norm_rel(x) == ONE)
            .collect();
        debug_assert_eq!(norm_one.len() as u32, q + 1);
        let singer = ctx.singer_subgroup();

        // beta = -1/3 and gamma = beta^{-3} = -27; both collapse to 1 in
        // characteristic 2.
        let (beta, gamma) = if ctx.p() == 2 {
            (ONE, ONE)
        } else {
            let b = ctx.neg(ctx.inv_nz(ctx.scalar(3)));
            (b, ctx.pow_u(ctx.inv_nz(b), 3))
        };

        let mut model = ConstructionModel {
            ctx,
            trace_zero,
            norm_one,
            singer,
            selectors: Vec::new(),
            orbit_seeds: Vec::new(),
            seed_set: HashSet::new(),
            beta,
            gamma,
            x_param: (q + 1) * (q + 1) / 3,
        };

        let mut selectors = Vec::with_capacity(model.norm_one.len());
        for &x in &model.norm_one {
            let profile = model.norm_profile(x)?;
            let lx = model.selectors_from_profile(&profile)?;
            selectors.push((x, lx));
        }
        model.selectors = selectors;

        let mut seed_set = HashSet::new();
        for (x, lx) in &model.selectors {
            for &a in lx {
                let e = model.ctx.mul(*x, a);
                if !seed_set.insert(e) {
                    return Err(Error::ConstructionViolation(format!(
                        "seed {e:?} produced by two distinct transversal cosets"
                    )));
                }
                if !model.ctx.trace_is_zero(e) {
                    return Err(Error::ConstructionViolation(format!(
                        "seed {e:?} has nonzero relative trace"
                    )));
                }
            }
        }
        if seed_set.len() as u32 != model.x_param {
            return Err(Error::ConstructionViolation(format!(
                "expected {} seeds, found {}",
                model.x_param,
                seed_set.len()
            )));
        }
        let mut orbit_seeds: Vec<Fe> = seed_set.iter().copied().collect();
        orbit_seeds.sort_unstable();
        model.orbit_seeds = orbit_seeds;
        model.seed_set = seed_set;
        Ok(model)
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }
    /// T0: nonzero elements of relative trace zero, size q^2 - 1.
    pub fn trace_zero(&self) -> &[Fe] {
        &self.trace_zero
    }
    /// L0: the norm-one elements of T0, a transversal of the F_q^*-cosets.
    pub fn norm_one(&self) -> &[Fe] {
        &self.norm_one
    }
    /// The Singer subgroup of order q^2 + q + 1.
    pub fn singer(&self) -> &[Fe] {
        &self.singer
    }
    pub fn selectors(&self) -> &[(Fe, Vec<Fe>)] {
        &self.selectors
    }
    /// E, sorted: the orbit seeds, size (q+1)^2/3.
    pub fn orbit_seeds(&self) -> &[Fe] {
        &self.orbit_seeds
    }
    pub fn is_orbit_seed(&self, z: Fe) -> bool {
        self.seed_set.contains(&z)
    }
    pub fn beta(&self) -> Fe {
        self.beta
    }
    pub fn gamma(&self) -> Fe {
        self.gamma
    }
    pub fn x_param(&self) -> u32 {
        self.x_param
    }

    /// z = x^q - x^{q^2}; lies in T0 but outside F_q whenever x does.
    pub fn frob_diff(&self, x: Fe) -> Fe {
        let xq = self.ctx.frob(x);
        self.ctx.sub(xq, self.ctx.frob(xq))
    }

    /// The norm profile W_x: the multiset of norms N(lambda + z) together
    /// with gamma * N(lambda + z)^{-1}, lambda ranging over all of F_q.
    /// Size 2q; every multiplicity is 1 or 4.
    pub fn norm_profile(&self, x: Fe) -> Result<Multiset> {
        if !self.ctx.trace_is_zero(x) || x.is_zero() || self.ctx.norm_rel(x) != ONE {
            return Err(Error::DomainError(format!(
                "norm profile is defined for norm-one trace-zero elements, got {x:?}"
            )));
        }
        let z = self.frob_diff(x);
        let mut ms = Multiset::new();
        for lam in self.ctx.subfield_elems() {
            let n = self.ctx.norm_rel(self.ctx.add(lam, z));
            debug_assert!(!n.is_zero(), "lambda + z cannot vanish for z outside F_q");
            ms.insert(n);
            ms.insert(self.ctx.mul(self.gamma, self.ctx.inv_nz(n)));
        }
        Ok(ms)
    }

    /// Multiplicity of alpha in the norm profile of x, counted directly.
    pub fn profile_multiplicity(&self, x: Fe, alpha: Fe) -> Result<u32> {
        Ok(self.norm_profile(x)?.count(alpha))
    }

    /// L_x from a norm profile: cube roots of the multiplicity-4 values.
    fn selectors_from_profile(&self, profile: &Multiset) -> Result<Vec<Fe>> {
        let q = self.ctx.q();
        debug_assert_eq!(profile.total(), 2 * q as u64);
        let mut lx = Vec::new();
        for (alpha, mult) in profile.iter() {
            match mult {
                1 => {}
                4 => lx.push(self.ctx.cube_root(alpha)?),
                other => {
                    return Err(Error::ConstructionViolation(format!(
                        "norm profile multiplicity {other} at {alpha:?}; expected 1 or 4"
                    )))
                }
            }
        }
        if lx.len() as u32 != (q + 1) / 3 {
            return Err(Error::ConstructionViolation(format!(
                "selector set has size {}, expected {}",
                lx.len(),
                (q + 1) / 3
            )));
        }
        lx.sort_unstable();
        Ok(lx)
    }

    /// Singer hit counts (mu, mu') of z: how many lambda in F_q make
    /// (z^q - z^{q^2}) - lambda, respectively beta*(z^q - z^{q^2}) - lambda,
    /// land in the Singer subgroup.
    pub fn singer_hit_counts(&self, z: Fe) -> (u32, u32) {
        let zd = self.frob_diff(z);
        let zb = self.ctx.mul(self.beta, zd);
        let mut mu = 0;
        let mut mu_scaled = 0;
        for lam in self.ctx.subfield_elems() {
            if self.ctx.in_singer(self.ctx.sub(zd, lam)) {
                mu += 1;
            }
            if self.ctx.in_singer(self.ctx.sub(zb, lam)) {
                mu_scaled += 1;
            }
        }
        (mu, mu_scaled)
    }

    /// D1 = [x * N(lambda + z)^{1/3} : x in L0, lambda in F_q].
    pub fn cube_root_norm_multiset(&self) -> Multiset {
        self.norm_branch_multiset(|ctx, x, root| ctx.mul(x, root))
    }

    /// D2 = [beta^{-1} * x * N(lambda + z)^{-1/3} : x in L0, lambda in F_q].
    pub fn inv_cube_root_norm_multiset(&self) -> Multiset {
        let binv = self.ctx.inv_nz(self.beta);
        self.norm_branch_multiset(move |ctx, x, root| ctx.mul(binv, ctx.mul(x, ctx.inv_nz(root))))
    }

    /// D3 = beta * D2 = [x * N(lambda + z)^{-1/3} : x in L0, lambda in F_q].
    pub fn scaled_inv_cube_root_norm_multiset(&self) -> Multiset {
        self.norm_branch_multiset(|ctx, x, root| ctx.mul(x, ctx.inv_nz(root)))
    }

    fn norm_branch_multiset(&self, f: impl Fn(&FieldCtx, Fe, Fe) -> Fe) -> Multiset {
        let mut ms = Multiset::new();
        for &x in &self.norm_one {
            let z = self.frob_diff(x);
            for lam in self.ctx.subfield_elems() {
                let n = self.ctx.norm_rel(self.ctx.add(lam, z));
                let root = self.ctx.cube_root(n).expect("norms are nonzero subfield elements");
                ms.insert(f(&self.ctx, x, root));
            }
        }
        ms
    }

    /// The multiset identity D1 + D2 = 3E + T0, checked exactly.
    pub fn seed_identity_holds(&self) -> bool {
        let mut lhs = self.cube_root_norm_multiset();
        lhs.merge(&self.inv_cube_root_norm_multiset());
        let mut rhs = Multiset::new();
        for &e in &self.orbit_seeds {
            rhs.insert_n(e, 3);
        }
        for &t in &self.trace_zero {
            rhs.insert(t);
        }
        lhs == rhs
    }

    /// R = {lambda + (h^{q^2} - h^q) : lambda in F_q, h in L0}: a system of
    /// coset representatives for the F_q^*-cosets outside F_q^* (their
    /// discrete logs are pairwise distinct and nonzero mod N).
    pub fn outer_coset_reps(&self) -> Vec<Fe> {
        let mut out = Vec::with_capacity((self.ctx.q() * (self.ctx.q() + 1)) as usize);
        for &h in &self.norm_one {
            let d = self.ctx.neg(self.frob_diff(h));
            for lam in self.ctx.subfield_elems() {
                out.push(self.ctx.add(lam, d));
            }
        }
        out
    }

    /// B_u = {y^{q^2} u^q - y^q u^{q^2} : y in L0 \ {u}}, a subset of F_q*.
    pub fn cross_diff_set(&self, u: Fe) -> Vec<Fe> {
        let uq = self.ctx.frob(u);
        let uq2 = self.ctx.frob(uq);
        let mut set: Vec<Fe> = self
            .norm_one
            .iter()
            .copied()
            .filter(|&y| y != u)
            .map(|y| {
                let yq = self.ctx.frob(y);
                let yq2 = self.ctx.frob(yq);
                self.ctx.sub(self.ctx.mul(yq2, uq), self.ctx.mul(yq, uq2))
            })
            .collect();
        set.sort_unstable();
        set.dedup();
        set
    }
}

/// The constructed point set M on the quadric: the union of the Singer
/// orbits O_(1,z) over the seeds z in E, stored as canonical projective
/// pairs.
pub struct LineClassModel {
    points: Vec<(Fe, Fe)>,
    point_set: HashSet<(Fe, Fe)>,
    orbit_reps: Vec<Fe>,
    x_param: u32,
}

/// The Singer orbit O_(1,z) = {<(mu, mu^{-1} z)> : mu in the Singer
/// subgroup}, as canonical pairs. z = 0 gives O_(1,0).
pub fn build_orbit(ctx: &FieldCtx, z: Fe) -> Vec<(Fe, Fe)> {
    ctx.singer_subgroup()
        .into_iter()
        .map(|mu| canonical_pair(ctx, (mu, ctx.mul(ctx.inv_nz(mu), z))))
        .collect()
}

/// The one orbit not of the form O_(1,z): O_(0,1) = {<(0, mu)>}.
pub fn build_special_orbit(ctx: &FieldCtx) -> Vec<(Fe, Fe)> {
    ctx.singer_subgroup()
        .into_iter()
        .map(|mu| canonical_pair(ctx, (ZERO, mu)))
        .collect()
}

impl LineClassModel {
    pub fn build(model: &ConstructionModel) -> Result<Self> {
        let ctx = model.ctx();
        let mut points = Vec::with_capacity((model.x_param() * ctx.big_n()) as usize);
        let mut point_set = HashSet::with_capacity(points.capacity());
        for &z in model.orbit_seeds() {
            for pt in build_orbit(ctx, z) {
                if !point_set.insert(pt) {
                    return Err(Error::ConstructionViolation(format!(
                        "orbits of distinct seeds share the point {pt:?}"
                    )));
                }
                points.push(pt);
            }
        }
        points.sort_unstable();
        Ok(LineClassModel {
            points,
            point_set,
            orbit_reps: model.orbit_seeds().to_vec(),
            x_param: model.x_param(),
        })
    }

    /// Test hook: silently removes one point so checks must notice.
    #[cfg(test)]
    pub(crate) fn corrupt_for_tests(&mut self) {
        let p = self.points.pop().expect("nonempty");
        self.point_set.remove(&p);
    }

    /// Canonical pairs of the xN points, sorted.
    pub fn points(&self) -> &[(Fe, Fe)] {
        &self.points
    }
    pub fn orbit_reps(&self) -> &[Fe] {
        &self.orbit_reps
    }
    pub fn x_param(&self) -> u32 {
        self.x_param
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Membership of a projective point given by any nonzero pair.
    pub fn contains(&self, ctx: &FieldCtx, pair: (Fe, Fe)) -> bool {
        self.point_set.contains(&canonical_pair(ctx, pair))
    }

    /// Membership of an already-canonical pair (as produced by the fixed
    /// PG(5,q) enumeration); skips the normalization.
    pub fn contains_canonical(&self, pair: (Fe, Fe)) -> bool {
        self.point_set.contains(&pair)
    }

    /// D: every F_q^*-scaling of every point of M, as vectors of V;
    /// size x * (q^3 - 1).
    pub fn vectors(&self, ctx: &FieldCtx) -> Vec<(Fe, Fe)> {
        let mut out = Vec::with_capacity(self.points.len() * (ctx.q() as usize - 1));
        for &(x, y) in &self.points {
            for lam in ctx.subfield_units() {
                out.push((ctx.mul(lam, x), ctx.mul(lam, y)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(p: u32, n: u32) -> ConstructionModel {
        ConstructionModel::build(Arc::new(FieldCtx::new(p, n).unwrap())).unwrap()
    }

    #[test]
    fn set_sizes_match_the_small_cases() {
        for (p, n, t0, l0, c0, e) in [(2, 1, 3, 3, 7, 3), (5, 1, 24, 6, 31, 12), (2, 3, 63, 9, 73, 27)] {
            let m = model(p, n);
            assert_eq!(m.trace_zero().len(), t0);
            assert_eq!(m.norm_one().len(), l0);
            assert_eq!(m.singer().len(), c0);
            assert_eq!(m.orbit_seeds().len(), e);
            let q = m.ctx().q();
            for (_, lx) in m.selectors() {
                assert_eq!(lx.len() as u32, (q + 1) / 3);
            }
        }
    }

    #[test]
    fn norm_one_is_a_transversal_of_trace_zero() {
        let m = model(5, 1);
        let ctx = m.ctx();
        // no norm-one element is in F_q*, and L0 * F_q* covers T0 exactly once
        let mut seen = HashSet::new();
        for &x in m.norm_one() {
            assert!(!ctx.in_subfield(x));
            for lam in ctx.subfield_units() {
                assert!(seen.insert(ctx.mul(x, lam)));
            }
        }
        let t0: HashSet<Fe> = m.trace_zero().iter().copied().collect();
        assert_eq!(seen, t0);
    }

    #[test]
    fn smallest_case_degenerates_to_the_whole_trace_zero_set() {
        // over F_2 the relative norm is identically 1 on F_8^*, so L0 = T0,
        // every profile is [1,1,1,1], and E = T0
        let m = model(2, 1);
        assert_eq!(m.norm_one(), m.trace_zero());
        assert_eq!(m.orbit_seeds(), m.trace_zero());
        for &(x, ref lx) in m.selectors() {
            assert_eq!(lx.as_slice(), &[ONE]);
            let prof = m.norm_profile(x).unwrap();
            assert_eq!(prof.count(ONE), 4);
            assert_eq!(prof.support_len(), 1);
        }
    }

    #[test]
    fn norm_profiles_have_dichotomous_multiplicities() {
        for m in [model(5, 1), model(2, 3), model(11, 1)] {
            let q = m.ctx().q();
            for &x in m.norm_one() {
                let prof = m.norm_profile(x).unwrap();
                assert_eq!(prof.total(), 2 * q as u64);
                let mut quad = 0;
                for (_, mult) in prof.iter() {
                    assert!(mult == 1 || mult == 4, "q={q}, multiplicity {mult}");
                    if mult == 4 {
                        quad += 1;
                    }
                }
                assert_eq!(quad, (q + 1) / 3);
            }
        }
        // the profile is only defined on the norm-one transversal
        let m = model(5, 1);
        assert!(m.norm_profile(ONE).is_err());
    }

    #[test]
    fn frob_diff_lands_in_trace_zero_outside_the_subfield() {
        for m in [model(5, 1), model(2, 3)] {
            let ctx = m.ctx();
            for &x in m.norm_one() {
                let z = m.frob_diff(x);
                assert!(ctx.trace_is_zero(z) && !z.is_zero());
                assert!(!ctx.in_subfield(z));
                if ctx.p() == 2 {
                    // char 2: x^q + x^{q^2} = Tr(x) + x = x on the trace-zero set
                    assert_eq!(z, x);
                }
            }
        }
    }

    #[test]
    fn seed_identity_holds_exactly() {
        for m in [model(2, 1), model(5, 1), model(2, 3)] {
            let q = m.ctx().q() as u64;
            let d1 = m.cube_root_norm_multiset();
            let d2 = m.inv_cube_root_norm_multiset();
            assert_eq!(d1.total(), q * (q + 1));
            assert_eq!(d2.total(), q * (q + 1));
            assert!(m.seed_identity_holds());
        }
    }

    #[test]
    fn scaled_branch_multiset_is_beta_times_the_inverse_branch() {
        let m = model(5, 1);
        let ctx = m.ctx();
        let d2 = m.inv_cube_root_norm_multiset();
        let d3 = m.scaled_inv_cube_root_norm_multiset();
        let mut scaled = Multiset::new();
        for (x, n) in d2.iter() {
            scaled.insert_n(ctx.mul(m.beta(), x), n);
        }
        assert_eq!(scaled, d3);
    }

    #[test]
    fn seeds_are_frobenius_stable() {
        for m in [model(2, 1), model(5, 1), model(2, 3)] {
            let ctx = m.ctx();
            for &e in m.orbit_seeds() {
                assert!(m.is_orbit_seed(ctx.frob(e)));
            }
        }
    }

    #[test]
    fn subfield_scalings_of_seeds_cover_trace_zero() {
        // F_q^* . E = T0 as sets
        for m in [model(5, 1), model(2, 3)] {
            let ctx = m.ctx();
            let mut scaled = HashSet::new();
            for &e in m.orbit_seeds() {
                for lam in ctx.subfield_units() {
                    scaled.insert(ctx.mul(lam, e));
                }
            }
            let t0: HashSet<Fe> = m.trace_zero().iter().copied().collect();
            assert_eq!(scaled, t0);
        }
    }

    #[test]
    fn singer_hit_counts_sum_to_q_on_each_coset() {
        for m in [model(2, 1), model(5, 1), model(2, 3)] {
            let ctx = m.ctx();
            for &x0 in m.norm_one() {
                let total: u32 = ctx
                    .subfield_units()
                    .into_iter()
                    .map(|th| m.singer_hit_counts(ctx.mul(x0, th)).0)
                    .sum();
                assert_eq!(total, ctx.q());
            }
        }
        // q = 2: every trace-zero z has both counts equal to 2
        let m = model(2, 1);
        for &z in m.trace_zero() {
            assert_eq!(m.singer_hit_counts(z), (2, 2));
        }
    }

    #[test]
    fn outer_coset_reps_hit_every_nontrivial_coset_once() {
        for m in [model(2, 1), model(5, 1)] {
            let ctx = m.ctx();
            let reps = m.outer_coset_reps();
            let q = ctx.q();
            assert_eq!(reps.len() as u32, q * (q + 1));
            // coset of F_q^* = discrete log mod N; 0 is the coset of F_q^* itself
            let mut ids = HashSet::new();
            for &r in &reps {
                let id = r.dlog().expect("representatives are nonzero") % ctx.big_n();
                assert_ne!(id, 0, "representative {r:?} lies in F_q^*");
                assert!(ids.insert(id), "coset hit twice");
            }
            assert_eq!(ids.len() as u32, ctx.big_n() - 1);
        }
    }

    #[test]
    fn cross_diff_sets_multiply_onto_the_subfield_units() {
        let m = model(5, 1);
        let ctx = m.ctx();
        let units: HashSet<Fe> = ctx.subfield_units().into_iter().collect();
        for (i, &u) in m.norm_one().iter().enumerate() {
            let bu = m.cross_diff_set(u);
            assert_eq!(bu.len() as u32, 2 * (ctx.q() + 1) / 3 - 1);
            for &b in &bu {
                assert!(ctx.in_subfield(b) && !b.is_zero());
            }
            let lu = &m.selectors()[i].1;
            assert_eq!(m.selectors()[i].0, u);
            let mut prod = HashSet::new();
            for &b in &bu {
                for &c in lu {
                    prod.insert(ctx.mul(b, c));
                }
            }
            assert_eq!(prod, units);
        }
    }

    #[test]
    fn point_set_has_the_right_size_and_lies_on_the_quadric() {
        for (p, n, expect) in [(2, 1, 21), (5, 1, 372)] {
            let m = model(p, n);
            let ctx = m.ctx();
            let lc = LineClassModel::build(&m).unwrap();
            assert_eq!(lc.len(), expect);
            assert_eq!(lc.len() as u32, lc.x_param() * ctx.big_n());
            for &(x, y) in lc.points() {
                assert!(ctx.trace_is_zero(ctx.mul(x, y)));
            }
            assert_eq!(
                lc.vectors(ctx).len() as u32,
                lc.x_param() * (ctx.q3() - 1)
            );
        }
    }

    #[test]
    fn point_set_is_frobenius_stable() {
        let m = model(5, 1);
        let ctx = m.ctx();
        let lc = LineClassModel::build(&m).unwrap();
        for &(x, y) in lc.points() {
            assert!(lc.contains(ctx, (ctx.frob(x), ctx.frob(y))));
        }
    }

    #[test]
    fn orbits_are_semiregular_and_distinct_pairs_stay_distinct() {
        let ctx = Arc::new(FieldCtx::new(5, 1).unwrap());
        let orbit = build_orbit(&ctx, ZERO);
        assert_eq!(orbit.len() as u32, ctx.big_n());
        let set: HashSet<_> = orbit.iter().copied().collect();
        assert_eq!(set.len(), orbit.len());
        let special = build_special_orbit(&ctx);
        assert_eq!(
            special.iter().copied().collect::<HashSet<_>>().len() as u32,
            ctx.big_n()
        );
    }

    #[test]
    fn canonical_pair_is_idempotent_and_projective() {
        let ctx = FieldCtx::new(5, 1).unwrap();
        for j in (0..ctx.ord()).step_by(7) {
            let x = Fe(1 + j);
            let y = Fe(1 + (j * 11 + 5) % ctx.ord());
            let c = canonical_pair(&ctx, (x, y));
            assert_eq!(canonical_pair(&ctx, c), c);
            for lam in ctx.subfield_units() {
                let scaled = (ctx.mul(lam, x), ctx.mul(lam, y));
                assert_eq!(canonical_pair(&ctx, scaled), c);
            }
        }
    }
}
