//! The quadric model and the descent to line geometry.
//!
//! V = F_{q^3} x F_{q^3} carries the hyperbolic quadratic form
//! Q((x,y)) = Tr(xy) with polar form f((x,y),(a,b)) = Tr(bx + ay); its
//! singular projective points are the model for the Klein quadric. A
//! deterministic Witt decomposition gives a linear isometry onto the
//! standard Plücker quadric p01*p23 + p02*p31 + p03*p12, and inverting the
//! Plücker embedding turns quadric points into honest lines of PG(3,q),
//! where spreads live. Totally singular planes (the generators) are
//! enumerated directly for small q.

use crate::construction::canonical_pair;
use crate::error::{Error, Result};
use crate::field::{invert_matrix, Fe, FieldCtx, ONE, ZERO};
use rand::Rng;
use std::collections::{HashMap, HashSet};

pub type Pair = (Fe, Fe);

/// Q((x,y)) = Tr(xy).
#[inline]
pub fn eval_q(ctx: &FieldCtx, v: Pair) -> Fe {
    ctx.trace_rel(ctx.mul(v.0, v.1))
}

/// Polar form f((x,y),(a,b)) = Tr(bx + ay).
#[inline]
pub fn eval_f(ctx: &FieldCtx, u: Pair, v: Pair) -> Fe {
    ctx.trace_rel(ctx.add(ctx.mul(v.1, u.0), ctx.mul(v.0, u.1)))
}

#[inline]
pub fn f_is_zero(ctx: &FieldCtx, u: Pair, v: Pair) -> bool {
    ctx.trace_is_zero(ctx.add(ctx.mul(v.1, u.0), ctx.mul(v.0, u.1)))
}

#[inline]
pub fn is_singular(ctx: &FieldCtx, v: Pair) -> bool {
    ctx.trace_is_zero(ctx.mul(v.0, v.1))
}

/// Six F_q-coordinates of a vector of V: the (1, t, t^2)-coordinates of the
/// first component followed by the second's.
pub fn coords6(ctx: &FieldCtx, v: Pair) -> [Fe; 6] {
    let a = ctx.coords_over_fq(v.0);
    let b = ctx.coords_over_fq(v.1);
    [a[0], a[1], a[2], b[0], b[1], b[2]]
}

pub fn pair_from_coords6(ctx: &FieldCtx, c: &[Fe; 6]) -> Pair {
    (
        ctx.from_coords(&[c[0], c[1], c[2]]),
        ctx.from_coords(&[c[3], c[4], c[5]]),
    )
}

/// Number of points of PG(5,q): q^5 + q^4 + ... + 1.
pub fn pg5_point_count(q: u32) -> u64 {
    let q = q as u64;
    (q.pow(6) - 1) / (q - 1)
}

/// Point number `idx` of PG(5,q) in the fixed pivot enumeration: the first
/// nonzero coordinate is 1, earlier coordinates vanish, later ones run in
/// base-q order. This is exactly the canonical form used everywhere, so
/// equality of coordinate vectors is equality of points.
pub fn pg5_point(ctx: &FieldCtx, idx: u64) -> [Fe; 6] {
    let q = ctx.q() as u64;
    let mut c = [ZERO; 6];
    let mut rest = idx;
    let mut pivot = 0usize;
    loop {
        let block = q.pow(5 - pivot as u32);
        if rest < block {
            break;
        }
        rest -= block;
        pivot += 1;
    }
    c[pivot] = ONE;
    for slot in c.iter_mut().skip(pivot + 1) {
        *slot = ctx.subfield_nth((rest % q) as u32);
        rest /= q;
    }
    c
}

/// All singular projective points, as sorted canonical pairs;
/// there are (q^2 + 1)(q^2 + q + 1) of them.
pub fn enumerate_quadric_points(ctx: &FieldCtx) -> Vec<Pair> {
    let mut out = Vec::new();
    for idx in 0..pg5_point_count(ctx.q()) {
        let pt = pair_from_coords6(ctx, &pg5_point(ctx, idx));
        if is_singular(ctx, pt) {
            out.push(pt);
        }
    }
    out.sort_unstable();
    out
}

/// |P^perp ∩ M| for a point P given by any nonzero pair.
pub fn perp_count(ctx: &FieldCtx, p: Pair, points: &[Pair]) -> u32 {
    points.iter().filter(|&&m| f_is_zero(ctx, m, p)).count() as u32
}

// ---------------------------------------------------------------------------
// Linear algebra over the subfield (entries are F_q elements of the tower).
// ---------------------------------------------------------------------------

#[allow(clippy::needless_range_loop)] // split borrows across rows
pub(crate) fn rank_matrix(ctx: &FieldCtx, rows: &[Vec<Fe>]) -> usize {
    let mut m: Vec<Vec<Fe>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = ctx.inv_nz(m[rank][col]);
        for x in m[rank].iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col];
                for c in 0..ncols {
                    let s = ctx.mul(f, m[rank][c]);
                    m[r][c] = ctx.sub(m[r][c], s);
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// Witt decomposition and the Klein isometry.
// ---------------------------------------------------------------------------

/// Greedy Witt decomposition of (V, Q): returns (e1, f1, e2, f2, e3, f3)
/// with Q(ei) = Q(fi) = 0, f(ei, fj) = [i = j], f(ei, ej) = f(fi, fj) = 0.
/// Deterministic: each singular vector is the first one in the base-q
/// coefficient order over the current complement's basis.
pub fn hyperbolic_basis(ctx: &FieldCtx) -> Result<[Pair; 6]> {
    let t = ctx.t();
    let t2 = ctx.mul(t, t);
    let mut space: Vec<Pair> = vec![
        (ONE, ZERO),
        (t, ZERO),
        (t2, ZERO),
        (ZERO, ONE),
        (ZERO, t),
        (ZERO, t2),
    ];
    let mut out = Vec::with_capacity(6);
    let q = ctx.q() as u64;
    while !space.is_empty() {
        let k = space.len();
        // first singular nonzero combination in base-q coefficient order;
        // guaranteed within q^3 tries since every rank >= 3 form over F_q is
        // isotropic and the leftover space is hyperbolic anyway
        let mut e = None;
        for code in 1..q.pow(k as u32) {
            let mut v = (ZERO, ZERO);
            let mut c = code;
            for &b in &space {
                let lam = ctx.subfield_nth((c % q) as u32);
                c /= q;
                if !lam.is_zero() {
                    v = (ctx.add(v.0, ctx.mul(lam, b.0)), ctx.add(v.1, ctx.mul(lam, b.1)));
                }
            }
            if eval_q(ctx, v).is_zero() {
                e = Some(v);
                break;
            }
        }
        let e = e.ok_or_else(|| {
            Error::NondegeneracyViolation("no singular vector in a hyperbolic complement".into())
        })?;
        // partner: any v with f(e, v) != 0, normalized and made singular
        let v = space
            .iter()
            .copied()
            .find(|&v| !f_is_zero(ctx, e, v))
            .ok_or_else(|| {
                Error::NondegeneracyViolation("singular vector with trivial pairing (radical?)".into())
            })?;
        let inv = ctx.inv_nz(eval_f(ctx, e, v));
        let v = (ctx.mul(v.0, inv), ctx.mul(v.1, inv));
        // Q(v + c*e) = Q(v) + c f(v,e); kill the Q value
        let c = ctx.neg(eval_q(ctx, v));
        let f1 = (ctx.add(v.0, ctx.mul(c, e.0)), ctx.add(v.1, ctx.mul(c, e.1)));
        debug_assert!(eval_q(ctx, f1).is_zero());
        debug_assert_eq!(eval_f(ctx, e, f1), ONE);
        out.push(e);
        out.push(f1);
        // project the old basis into the perp of {e, f1} and rank-filter
        let mut next: Vec<Pair> = Vec::new();
        let mut coordrows: Vec<Vec<Fe>> = Vec::new();
        for &b in &space {
            let ce = ctx.neg(eval_f(ctx, b, f1));
            let cf = ctx.neg(eval_f(ctx, b, e));
            let w = (
                ctx.add(b.0, ctx.add(ctx.mul(ce, e.0), ctx.mul(cf, f1.0))),
                ctx.add(b.1, ctx.add(ctx.mul(ce, e.1), ctx.mul(cf, f1.1))),
            );
            if w == (ZERO, ZERO) {
                continue;
            }
            let mut candidate = coordrows.clone();
            candidate.push(coords6(ctx, w).to_vec());
            if rank_matrix(ctx, &candidate) > coordrows.len() {
                coordrows = candidate;
                next.push(w);
            }
        }
        if next.len() != k - 2 {
            return Err(Error::NondegeneracyViolation(format!(
                "complement dimension {} after splitting; expected {}",
                next.len(),
                k - 2
            )));
        }
        space = next;
    }
    let basis: [Pair; 6] = out.try_into().expect("three hyperbolic pairs");
    // Gram check: the polar form must be exactly the standard hyperbolic one
    for i in 0..6 {
        for j in 0..6 {
            let expect = if (i / 2 == j / 2) && (i != j) { ONE } else { ZERO };
            if eval_f(ctx, basis[i], basis[j]) != expect && i != j {
                return Err(Error::NondegeneracyViolation(
                    "Witt basis fails the Gram check".into(),
                ));
            }
        }
    }
    Ok(basis)
}

/// A line of PG(3,q): six Plücker coordinates in the order
/// (p01, p02, p03, p23, p31, p12), canonically scaled, plus two spanning
/// points (canonical 4-coordinate vectors).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PluckerLine {
    pub coords: [Fe; 6],
    pub span: ([Fe; 4], [Fe; 4]),
}

/// Scale a nonzero coordinate vector so its first nonzero entry is 1.
pub fn canonicalize_vec<const K: usize>(ctx: &FieldCtx, v: &[Fe; K]) -> [Fe; K] {
    let pivot = v.iter().copied().find(|c| !c.is_zero()).expect("nonzero vector");
    if pivot == ONE {
        return *v;
    }
    let s = ctx.inv_nz(pivot);
    std::array::from_fn(|i| ctx.mul(v[i], s))
}

/// Value of the Plücker quadric p01*p23 + p02*p31 + p03*p12.
pub fn plucker_quadric(ctx: &FieldCtx, c: &[Fe; 6]) -> Fe {
    let mut acc = ZERO;
    for i in 0..3 {
        acc = ctx.add(acc, ctx.mul(c[i], c[i + 3]));
    }
    acc
}

/// Polar pairing of the Plücker quadric; two lines of PG(3,q) meet exactly
/// when this vanishes on their coordinate vectors.
pub fn plucker_pairing(ctx: &FieldCtx, a: &[Fe; 6], b: &[Fe; 6]) -> Fe {
    let mut acc = ZERO;
    for i in 0..3 {
        acc = ctx.add(acc, ctx.add(ctx.mul(a[i], b[i + 3]), ctx.mul(a[i + 3], b[i])));
    }
    acc
}

/// Plücker coordinates of the line through two distinct points of PG(3,q).
pub fn line_from_points(ctx: &FieldCtx, x: &[Fe; 4], y: &[Fe; 4]) -> Result<PluckerLine> {
    let minor = |i: usize, j: usize| ctx.sub(ctx.mul(x[i], y[j]), ctx.mul(x[j], y[i]));
    let raw = [
        minor(0, 1),
        minor(0, 2),
        minor(0, 3),
        minor(2, 3),
        minor(3, 1),
        minor(1, 2),
    ];
    if raw.iter().all(|c| c.is_zero()) {
        return Err(Error::NotALine("the two points coincide".into()));
    }
    debug_assert!(plucker_quadric(ctx, &raw).is_zero());
    Ok(PluckerLine {
        coords: canonicalize_vec(ctx, &raw),
        span: (canonicalize_vec(ctx, x), canonicalize_vec(ctx, y)),
    })
}

/// Recover a spanning pair from Plücker coordinates. The antisymmetric
/// matrix with entries p_ij has rank 2 exactly for genuine lines, and its
/// rows lie in the line's span; the first two independent rows are used.
pub fn plucker_to_line(ctx: &FieldCtx, coords: &[Fe; 6]) -> Result<PluckerLine> {
    if !plucker_quadric(ctx, coords).is_zero() {
        return Err(Error::NotALine(
            "coordinates do not satisfy the Plücker relation".into(),
        ));
    }
    let [p01, p02, p03, p23, p31, p12] = *coords;
    let n = |x: Fe| ctx.neg(x);
    let m: [[Fe; 4]; 4] = [
        [ZERO, p01, p02, p03],
        [n(p01), ZERO, p12, n(p31)],
        [n(p02), n(p12), ZERO, p23],
        [n(p03), p31, n(p23), ZERO],
    ];
    let first = m
        .iter()
        .position(|row| row.iter().any(|c| !c.is_zero()))
        .ok_or_else(|| Error::NotALine("zero coordinate vector".into()))?;
    let second = (first + 1..4)
        .find(|&j| {
            let rows = vec![m[first].to_vec(), m[j].to_vec()];
            rank_matrix(ctx, &rows) == 2
        })
        .ok_or_else(|| Error::NotALine("coordinate matrix has rank below 2".into()))?;
    let line = line_from_points(ctx, &m[first], &m[second])?;
    debug_assert_eq!(line.coords, canonicalize_vec(ctx, coords));
    Ok(line)
}

/// The linear isometry from (V, Q) onto the Plücker quadric, fixed by
/// matching the Witt basis of V with the standard hyperbolic basis
/// (p01, p23), (p02, p31), (p03, p12).
pub struct KleinMap {
    basis: [Pair; 6],
    inv: Vec<Vec<Fe>>,
}

impl KleinMap {
    pub fn new(ctx: &FieldCtx) -> Result<KleinMap> {
        let basis = hyperbolic_basis(ctx)?;
        let cols: Vec<[Fe; 6]> = basis.iter().map(|&b| coords6(ctx, b)).collect();
        let h: Vec<Vec<Fe>> = (0..6).map(|r| (0..6).map(|c| cols[c][r]).collect()).collect();
        let inv = invert_matrix(ctx, &h)
            .ok_or_else(|| Error::NondegeneracyViolation("Witt basis is not a basis".into()))?;
        Ok(KleinMap { basis, inv })
    }

    /// The recorded hyperbolic basis of V, in the order e1,f1,e2,f2,e3,f3.
    pub fn witt_basis(&self) -> &[Pair; 6] {
        &self.basis
    }

    /// Plücker coordinates (canonical) of a singular point of (V, Q).
    pub fn to_plucker(&self, ctx: &FieldCtx, p: Pair) -> [Fe; 6] {
        let v = coords6(ctx, p);
        // coefficients with respect to the Witt basis, order e1,f1,e2,f2,e3,f3
        let mut c = [ZERO; 6];
        for (i, slot) in c.iter_mut().enumerate() {
            let mut acc = ZERO;
            for (j, &vj) in v.iter().enumerate() {
                acc = ctx.add(acc, ctx.mul(self.inv[i][j], vj));
            }
            *slot = acc;
        }
        // e-coefficients land on (p01, p02, p03), f-coefficients on their
        // partners (p23, p31, p12)
        let plucker = [c[0], c[2], c[4], c[1], c[3], c[5]];
        canonicalize_vec(ctx, &plucker)
    }

    /// The line of PG(3,q) corresponding to a singular point.
    pub fn line_of(&self, ctx: &FieldCtx, p: Pair) -> Result<PluckerLine> {
        plucker_to_line(ctx, &self.to_plucker(ctx, p))
    }
}

// ---------------------------------------------------------------------------
// Spreads of PG(3,q).
// ---------------------------------------------------------------------------

/// F_{q^2} presented as F_q[s] / (s^2 - u s - v) with the deterministically
/// first irreducible (u, v) in the fixed subfield order.
struct QuadExt {
    u: Fe,
    v: Fe,
}

impl QuadExt {
    fn new(ctx: &FieldCtx) -> QuadExt {
        for ui in 0..ctx.q() {
            for vi in 0..ctx.q() {
                let u = ctx.subfield_nth(ui);
                let v = ctx.subfield_nth(vi);
                // irreducible iff x^2 - u x - v has no root in F_q
                let has_root = ctx.subfield_elems().into_iter().any(|x| {
                    ctx.sub(ctx.sub(ctx.mul(x, x), ctx.mul(u, x)), v).is_zero()
                });
                if !has_root {
                    return QuadExt { u, v };
                }
            }
        }
        unreachable!("F_q always has a quadratic extension");
    }

    /// (a1 + b1 s)(a2 + b2 s) with s^2 = u s + v.
    fn mul(&self, ctx: &FieldCtx, x: (Fe, Fe), y: (Fe, Fe)) -> (Fe, Fe) {
        let (a1, b1) = x;
        let (a2, b2) = y;
        let bb = ctx.mul(b1, b2);
        (
            ctx.add(ctx.mul(a1, a2), ctx.mul(bb, self.v)),
            ctx.add(ctx.add(ctx.mul(a1, b2), ctx.mul(a2, b1)), ctx.mul(bb, self.u)),
        )
    }
}

pub struct SpreadModel {
    pub lines: Vec<PluckerLine>,
}

/// The regular spread: the F_{q^2}-lines of F_q^4 = F_{q^2}^2. Its q^2 + 1
/// members are the line at infinity {(0,0,*,*)} and, for each m in F_{q^2},
/// the span of (1, m) and (s, s m).
pub fn regular_spread(ctx: &FieldCtx) -> Result<SpreadModel> {
    let ext = QuadExt::new(ctx);
    let mut lines = Vec::with_capacity(ctx.q() as usize * ctx.q() as usize + 1);
    lines.push(line_from_points(
        ctx,
        &[ZERO, ZERO, ONE, ZERO],
        &[ZERO, ZERO, ZERO, ONE],
    )?);
    let s = (ZERO, ONE);
    for a in 0..ctx.q() {
        for b in 0..ctx.q() {
            let m = (ctx.subfield_nth(a), ctx.subfield_nth(b));
            let sm = ext.mul(ctx, s, m);
            lines.push(line_from_points(
                ctx,
                &[ONE, ZERO, m.0, m.1],
                &[ZERO, ONE, sm.0, sm.1],
            )?);
        }
    }
    Ok(SpreadModel { lines })
}

impl SpreadModel {
    /// A spread partitions the points: right count and pairwise skew.
    pub fn is_partition(&self, ctx: &FieldCtx) -> bool {
        let q = ctx.q();
        if self.lines.len() as u32 != q * q + 1 {
            return false;
        }
        for (i, a) in self.lines.iter().enumerate() {
            for b in &self.lines[i + 1..] {
                if plucker_pairing(ctx, &a.coords, &b.coords).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// Uniformly random invertible 4x4 matrix over F_q (rejection sampling).
pub fn random_projectivity(ctx: &FieldCtx, rng: &mut impl Rng) -> [[Fe; 4]; 4] {
    loop {
        let m: [[Fe; 4]; 4] =
            std::array::from_fn(|_| std::array::from_fn(|_| ctx.subfield_nth(rng.gen_range(0..ctx.q()))));
        let rows: Vec<Vec<Fe>> = m.iter().map(|r| r.to_vec()).collect();
        if rank_matrix(ctx, &rows) == 4 {
            return m;
        }
    }
}

pub fn apply_projectivity(ctx: &FieldCtx, m: &[[Fe; 4]; 4], spread: &SpreadModel) -> Result<SpreadModel> {
    let act = |x: &[Fe; 4]| -> [Fe; 4] {
        std::array::from_fn(|i| {
            let mut acc = ZERO;
            for j in 0..4 {
                acc = ctx.add(acc, ctx.mul(m[i][j], x[j]));
            }
            acc
        })
    };
    let lines = spread
        .lines
        .iter()
        .map(|l| line_from_points(ctx, &act(&l.span.0), &act(&l.span.1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpreadModel { lines })
}

// ---------------------------------------------------------------------------
// Generators (totally singular planes) for small q.
// ---------------------------------------------------------------------------

pub struct Generator {
    pub basis: [Pair; 3],
    /// Sorted indices into the accompanying quadric point list.
    pub point_ids: Vec<u32>,
    /// Equivalence class: a generator is equivalent to U1 = F_{q^3} x {0}
    /// exactly when it meets U1 in odd vector dimension.
    pub same_class_as_u1: bool,
}

pub struct GeneratorSet {
    pub quadric_points: Vec<Pair>,
    pub generators: Vec<Generator>,
}

/// Default guard for the plane enumeration; quartic growth beyond this.
pub const GENERATOR_GUARD_Q: u32 = 5;

/// All totally singular planes of (V, Q), tagged by equivalence class.
/// Refuses q beyond `max_q` (pass a bigger guard to override).
pub fn enumerate_generators(ctx: &FieldCtx, max_q: u32) -> Result<GeneratorSet> {
    if ctx.q() > max_q {
        return Err(Error::TooLarge(format!(
            "generator enumeration is guarded at q <= {max_q}, got q = {}",
            ctx.q()
        )));
    }
    let points = enumerate_quadric_points(ctx);
    let id_of: HashMap<Pair, u32> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i as u32))
        .collect();
    let subfield = ctx.subfield_elems();

    // totally singular lines: perp pairs of singular points, dedup by the
    // sorted id vector of the q + 1 points on the line
    let mut line_keys: HashSet<Vec<u32>> = HashSet::new();
    let mut lines: Vec<(Pair, Pair)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        for &r in &points[i + 1..] {
            if !f_is_zero(ctx, p, r) {
                continue;
            }
            let mut ids: Vec<u32> = subfield
                .iter()
                .map(|&lam| {
                    let v = (ctx.add(p.0, ctx.mul(lam, r.0)), ctx.add(p.1, ctx.mul(lam, r.1)));
                    id_of[&canonical_pair(ctx, v)]
                })
                .collect();
            ids.push(id_of[&r]);
            ids.sort_unstable();
            if line_keys.insert(ids) {
                lines.push((p, r));
            }
        }
    }

    // extend each line by a perp singular point off it; dedup planes the
    // same way
    let mut plane_keys: HashSet<Vec<u32>> = HashSet::new();
    let mut generators = Vec::new();
    for &(p, r) in &lines {
        for &s in &points {
            if !f_is_zero(ctx, p, s) || !f_is_zero(ctx, r, s) {
                continue;
            }
            let mut ids = Vec::with_capacity((ctx.q() * ctx.q() + ctx.q() + 1) as usize);
            let mut on_line = false;
            'combos: for &c1 in &subfield {
                for &c2 in &subfield {
                    // points with nonzero s-coefficient, plus the line itself below
                    let v = (
                        ctx.add(s.0, ctx.add(ctx.mul(c1, p.0), ctx.mul(c2, r.0))),
                        ctx.add(s.1, ctx.add(ctx.mul(c1, p.1), ctx.mul(c2, r.1))),
                    );
                    if v == (ZERO, ZERO) {
                        on_line = true;
                        break 'combos;
                    }
                    ids.push(id_of[&canonical_pair(ctx, v)]);
                }
            }
            if on_line {
                continue;
            }
            for &lam in &subfield {
                let v = (ctx.add(p.0, ctx.mul(lam, r.0)), ctx.add(p.1, ctx.mul(lam, r.1)));
                ids.push(id_of[&canonical_pair(ctx, v)]);
            }
            ids.push(id_of[&r]);
            ids.sort_unstable();
            debug_assert!(ids.windows(2).all(|w| w[0] != w[1]));
            if plane_keys.insert(ids.clone()) {
                let eta_rows: Vec<Vec<Fe>> = [p, r, s]
                    .iter()
                    .map(|&(_, y)| ctx.coords_over_fq(y).to_vec())
                    .collect();
                // dim(U ∩ U1) = 3 - rank of the second-component block;
                // odd intersection dimension means the class of U1
                let same_class_as_u1 = rank_matrix(ctx, &eta_rows).is_multiple_of(2);
                generators.push(Generator {
                    basis: [p, r, s],
                    point_ids: ids,
                    same_class_as_u1,
                });
            }
        }
    }
    Ok(GeneratorSet {
        quadric_points: points,
        generators,
    })
}
