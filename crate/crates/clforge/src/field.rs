//! Arithmetic in the tower F_p < F_q < F_{q^3}, for prime powers q = 2 (mod 3).
//!
//! The cubic extension F_{q^3} is realized as F_p[t]/(f) with f monic
//! irreducible of degree 3n (q = p^n), and every nonzero element is stored as
//! a discrete logarithm with respect to a fixed primitive element w. The
//! canonical index of an element is 0 for zero and 1 + log_w for everything
//! else, so equality is plain integer equality. Multiplication is index
//! arithmetic mod q^3 - 1, addition goes through a Zech logarithm table
//! (z(k) = log(1 + w^k)), and the relative trace is a precomputed table.
//!
//! The intermediate field F_q is the fixed field of x -> x^q: its nonzero
//! elements are exactly the powers w^(kN) with N = q^2 + q + 1, and the
//! Singer subgroup of order N is generated by w^(q-1). These two index
//! lattices are the backbone of the whole construction, via the unique
//! splitting j = N*i + (q-1)*l of exponents (gcd(N, q-1) = 1 because
//! 3 does not divide q - 1).

use crate::error::{Error, Result};
use std::fmt;

/// Default cap: refuse fields with q^3 > 2^24 unless the caller raises it.
pub const DEFAULT_MAX_FIELD_BITS: u32 = 24;

const SENT: u32 = u32::MAX;

/// Element of F_{q^3} (or of a subfield, which is a property, not a type):
/// canonical index 0 for zero, 1 + log_w otherwise.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub(crate) u32);

pub const ZERO: Fe = Fe(0);
pub const ONE: Fe = Fe(1);

impl Fe {
    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Discrete log base w, or None for zero.
    #[inline]
    pub fn dlog(self) -> Option<u32> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0 - 1)
        }
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "0")
        } else {
            write!(f, "w^{}", self.0 - 1)
        }
    }
}

/// Bundled defining polynomials: the lexicographically smallest primitive
/// polynomial of degree 3n over F_p, listed little-endian including the
/// leading 1. Primitivity makes w = t, so exports stay stable.
const BUNDLED_POLYS: &[(u32, u32, &[u32])] = &[
    (2, 1, &[1, 1, 0, 1]),
    (5, 1, &[2, 3, 0, 1]),
    (2, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
    (11, 1, &[4, 1, 0, 1]),
    (17, 1, &[3, 1, 0, 1]),
    (23, 1, &[3, 1, 0, 1]),
    (29, 1, &[11, 1, 0, 1]),
    (2, 5, &[1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
    (41, 1, &[6, 1, 0, 1]),
    (47, 1, &[4, 1, 0, 1]),
];

pub struct FieldCtx {
    p: u32,
    n: u32,
    q: u32,
    m: u32,
    q3: u32,
    ord: u32,
    big_n: u32,
    poly: Vec<u32>,
    w_pidx: u32,
    /// j -> polynomial index of w^j, length ord.
    antilog: Vec<u32>,
    /// polynomial index -> j, length q3; log[0] = SENT.
    log: Vec<u32>,
    /// k -> log(1 + w^k); SENT where 1 + w^k = 0.
    zech: Vec<u32>,
    /// log of -1 (0 in characteristic 2).
    neg_shift: u32,
    /// canonical index -> canonical index of the relative trace to F_q.
    trace_rel_tab: Vec<u32>,
    /// canonical index -> absolute trace to F_p, as an integer below p.
    abs_tr_tab: Vec<u8>,
    /// Dual basis of (1, t, t^2) for the trace form of F_{q^3}/F_q.
    dual_basis: [Fe; 3],
    t_elem: Fe,
    /// Inverse of 3 modulo q - 1: the cube root exponent for F_q*.
    cube_inv_exp: u32,
}

// ---------------------------------------------------------------------------
// Build-time polynomial arithmetic over F_p (little-endian coefficient vecs).
// Only used while constructing the tables; everything after that is O(1)
// index arithmetic.
// ---------------------------------------------------------------------------

fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], f: &[u32], p: u32) -> Vec<u32> {
    let m = f.len() - 1;
    let mut res = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            res[i + j] = (res[i + j] + ai as u64 * bj as u64) % p as u64;
        }
    }
    // reduce by the monic modulus
    for i in (m..res.len()).rev() {
        let c = res[i];
        if c == 0 {
            continue;
        }
        res[i] = 0;
        for k in 0..m {
            let sub = (c * f[k] as u64) % p as u64;
            res[i - m + k] = (res[i - m + k] + p as u64 - sub) % p as u64;
        }
    }
    let mut out: Vec<u32> = res[..m.min(res.len())].iter().map(|&x| x as u32).collect();
    if out.is_empty() {
        out.push(0);
    }
    poly_trim(&mut out);
    out
}

fn poly_powmod(base: &[u32], mut e: u64, f: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod(&result, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        e >>= 1;
    }
    result
}

fn poly_is_one(a: &[u32]) -> bool {
    a.len() == 1 && a[0] == 1
}

#[allow(clippy::needless_range_loop)]
fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let len = a.len().max(b.len());
    let mut out = vec![0u32; len];
    for i in 0..len {
        let ai = a.get(i).copied().unwrap_or(0);
        let bi = b.get(i).copied().unwrap_or(0);
        out[i] = (ai + p - bi) % p;
    }
    poly_trim(&mut out);
    out
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

#[allow(clippy::needless_range_loop)]
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db] as u64, p as u64) as u32;
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = (r[dr] as u64 * lead_inv as u64 % p as u64) as u32;
        if c != 0 {
            for k in 0..=db {
                let sub = (c as u64 * b[k] as u64) % p as u64;
                let idx = dr - db + k;
                r[idx] = ((r[idx] as u64 + p as u64 - sub) % p as u64) as u32;
            }
        }
        r.pop();
        poly_trim(&mut r);
    }
    if r.is_empty() {
        r.push(0);
    }
    poly_trim(&mut r);
    r
}

fn mod_inv(a: u64, m: u64) -> u64 {
    // extended Euclid; m need not be prime, a must be invertible
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    assert_eq!(r0, 1, "element not invertible");
    (((s0 % m as i128) + m as i128) % m as i128) as u64
}

fn is_prime_u32(x: u32) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= x as u64 {
        if x.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors_u64(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= x {
        if x.is_multiple_of(d) {
            out.push(d);
            while x.is_multiple_of(d) {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// Irreducibility over F_p via the distinct-degree criterion:
/// x^(p^m) = x mod f, and gcd(x^(p^(m/l)) - x, f) = 1 for prime l | m.
fn poly_is_irreducible(f: &[u32], p: u32) -> bool {
    let m = f.len() - 1;
    if m == 0 || f[m] != 1 {
        return false;
    }
    let x = vec![0, 1];
    let mut xp = x.clone();
    // xp = x^(p^i); frobenius ladder
    let mut powers = Vec::with_capacity(m);
    for _ in 0..m {
        xp = poly_powmod(&xp, p as u64, f, p);
        powers.push(xp.clone());
    }
    if powers[m - 1] != x {
        return false;
    }
    for l in prime_factors_u64(m as u64) {
        let idx = m / l as usize;
        let diff = poly_sub(&powers[idx - 1], &x, p);
        let g = poly_gcd(f, &diff, p);
        if !(g.len() == 1 && g[0] != 0) {
            return false;
        }
    }
    true
}

fn poly_x_is_primitive(f: &[u32], p: u32) -> bool {
    let m = (f.len() - 1) as u32;
    let order = (p as u64).pow(m) - 1;
    let x = vec![0, 1];
    prime_factors_u64(order)
        .into_iter()
        .all(|r| !poly_is_one(&poly_powmod(&x, order / r, f, p)))
}

/// Lexicographically smallest primitive polynomial of degree m over F_p,
/// ordering monic candidates by their non-leading coefficient vector read
/// as a base-p integer. This is the rule behind the bundled table.
pub fn smallest_primitive_poly(p: u32, m: u32) -> Vec<u32> {
    let total = (p as u64).pow(m);
    for k in 1..total {
        let mut coeffs = Vec::with_capacity(m as usize + 1);
        let mut kk = k;
        for _ in 0..m {
            coeffs.push((kk % p as u64) as u32);
            kk /= p as u64;
        }
        if coeffs[0] == 0 {
            continue; // constant term 0 means a root at 0
        }
        coeffs.push(1);
        if poly_is_irreducible(&coeffs, p) && poly_x_is_primitive(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("primitive polynomials exist for every degree");
}

fn pidx_of_poly(a: &[u32], p: u32) -> u32 {
    let mut idx = 0u64;
    for &c in a.iter().rev() {
        idx = idx * p as u64 + c as u64;
    }
    idx as u32
}

fn poly_of_pidx(mut idx: u32, p: u32) -> Vec<u32> {
    let mut out = Vec::new();
    if idx == 0 {
        return vec![0];
    }
    while idx > 0 {
        out.push(idx % p);
        idx /= p;
    }
    out
}

/// Digit-wise sum of two polynomial indices (coefficient vectors mod p).
fn pidx_add(a: u32, b: u32, p: u32) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    let mut out = 0u32;
    let mut mul = 1u32;
    let (mut a, mut b) = (a, b);
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * mul;
        a /= p;
        b /= p;
        mul *= p;
    }
    out
}

impl FieldCtx {
    /// Build the tower for q = p^n with the bundled (or searched) modulus.
    pub fn new(p: u32, n: u32) -> Result<FieldCtx> {
        Self::with_options(p, n, None, DEFAULT_MAX_FIELD_BITS)
    }

    pub fn with_options(
        p: u32,
        n: u32,
        poly_override: Option<&[u32]>,
        max_field_bits: u32,
    ) -> Result<FieldCtx> {
        if !is_prime_u32(p) {
            return Err(Error::UnsupportedParameter(format!("p = {p} is not prime")));
        }
        if n == 0 {
            return Err(Error::UnsupportedParameter("n must be positive".into()));
        }
        let m = 3 * n;
        let q_big = (p as u128).pow(n);
        let q3_big = (p as u128).pow(m);
        if q_big % 3 != 2 {
            return Err(Error::UnsupportedParameter(format!(
                "q = {p}^{n} = {q_big} is {} mod 3; the construction needs q = 2 (mod 3)",
                q_big % 3
            )));
        }
        let cap_bits = max_field_bits.min(31);
        if q3_big > 1u128 << cap_bits {
            return Err(Error::TooLarge(format!(
                "q^3 = {q3_big} exceeds 2^{cap_bits}; raise the cap to allow this"
            )));
        }
        let q = q_big as u32;
        let q3 = q3_big as u32;
        let ord = q3 - 1;
        let big_n = q * q + q + 1;
        debug_assert_eq!(ord % big_n, 0);
        debug_assert_eq!(ord / big_n, q - 1);

        let poly: Vec<u32> = match poly_override {
            Some(c) => {
                let mut c = c.to_vec();
                poly_trim(&mut c);
                if c.len() != m as usize + 1 {
                    return Err(Error::BadPolynomial(format!(
                        "degree {} but the tower needs degree {m}",
                        c.len() - 1
                    )));
                }
                if c[m as usize] != 1 {
                    return Err(Error::BadPolynomial("polynomial must be monic".into()));
                }
                if c.iter().any(|&x| x >= p) {
                    return Err(Error::BadPolynomial(format!("coefficients must lie below p = {p}")));
                }
                if !poly_is_irreducible(&c, p) {
                    return Err(Error::BadPolynomial("polynomial is reducible over F_p".into()));
                }
                c
            }
            None => BUNDLED_POLYS
                .iter()
                .find(|&&(bp, bn, _)| bp == p && bn == n)
                .map(|&(_, _, c)| c.to_vec())
                .unwrap_or_else(|| smallest_primitive_poly(p, m)),
        };

        // Primitive element: smallest polynomial index of full multiplicative
        // order. With the bundled primitive moduli this is always t itself.
        let ord_factors = prime_factors_u64(ord as u64);
        let mut w_pidx = 0u32;
        for cand in 2..q3 {
            let cp = poly_of_pidx(cand, p);
            let full = ord_factors
                .iter()
                .all(|&r| !poly_is_one(&poly_powmod(&cp, ord as u64 / r, &poly, p)));
            if full {
                w_pidx = cand;
                break;
            }
        }
        if w_pidx == 0 {
            return Err(Error::BadPolynomial("no primitive element found (reducible modulus?)".into()));
        }

        // Discrete log tables by iterating w^j.
        let w_poly = poly_of_pidx(w_pidx, p);
        let mut antilog = vec![0u32; ord as usize];
        let mut log = vec![SENT; q3 as usize];
        let mut cur = vec![1u32];
        for (j, slot) in antilog.iter_mut().enumerate() {
            let idx = pidx_of_poly(&cur, p);
            if idx == 0 || log[idx as usize] != SENT {
                return Err(Error::BadPolynomial(
                    "powers of the primitive element collide; modulus is unusable".into(),
                ));
            }
            *slot = idx;
            log[idx as usize] = j as u32;
            cur = poly_mulmod(&cur, &w_poly, &poly, p);
        }
        if !poly_is_one(&cur) {
            return Err(Error::BadPolynomial("primitive element order mismatch".into()));
        }

        let mut zech = vec![SENT; ord as usize];
        for k in 0..ord {
            let s = pidx_add(1, antilog[k as usize], p);
            zech[k as usize] = if s == 0 { SENT } else { log[s as usize] };
        }
        let neg_shift = if p == 2 { 0 } else { ord / 2 };

        let mut ctx = FieldCtx {
            p,
            n,
            q,
            m,
            q3,
            ord,
            big_n,
            poly,
            w_pidx,
            antilog,
            log,
            zech,
            neg_shift,
            trace_rel_tab: Vec::new(),
            abs_tr_tab: Vec::new(),
            dual_basis: [ZERO; 3],
            t_elem: ZERO,
            cube_inv_exp: mod_inv(3, (q - 1) as u64) as u32,
        };

        // Relative trace x + x^q + x^{q^2} and absolute trace tables.
        let mut trace_rel_tab = vec![0u32; q3 as usize];
        let mut abs_tr_tab = vec![0u8; q3 as usize];
        for j in 0..ord {
            let x = Fe(1 + j);
            let tr = ctx.add(ctx.add(x, ctx.frob(x)), ctx.frob(ctx.frob(x)));
            trace_rel_tab[(1 + j) as usize] = tr.0;
            let mut acc = ZERO;
            let mut e = x;
            for _ in 0..ctx.m {
                acc = ctx.add(acc, e);
                e = ctx.pow_u(e, p as u64);
            }
            let v = ctx.pidx(acc);
            debug_assert!(v < p, "absolute trace must land in F_p");
            abs_tr_tab[(1 + j) as usize] = v as u8;
        }
        ctx.trace_rel_tab = trace_rel_tab;
        ctx.abs_tr_tab = abs_tr_tab;
        for j in 0..ord {
            debug_assert!(ctx.in_subfield(Fe(ctx.trace_rel_tab[(1 + j) as usize])));
        }

        ctx.t_elem = ctx.fe_from_pidx(p);
        ctx.dual_basis = ctx.compute_dual_basis()?;
        Ok(ctx)
    }

    fn compute_dual_basis(&self) -> Result<[Fe; 3]> {
        // Gram matrix of the F_q-bilinear trace form on the basis (1, t, t^2);
        // the dual basis gives O(1) coordinate extraction.
        let t = self.t_elem;
        let mut pow = [ONE; 5];
        for i in 1..5 {
            pow[i] = self.mul(pow[i - 1], t);
        }
        let g: Vec<Vec<Fe>> = (0..3)
            .map(|i| (0..3).map(|j| self.trace_rel(pow[i + j])).collect())
            .collect();
        let ginv = invert_matrix(self, &g)
            .ok_or_else(|| Error::NondegeneracyViolation("trace form of F_{q^3}/F_q is degenerate".into()))?;
        let mut dual = [ZERO; 3];
        for (i, d) in dual.iter_mut().enumerate() {
            let mut acc = ZERO;
            for j in 0..3 {
                acc = self.add(acc, self.mul(ginv[i][j], pow[j]));
            }
            *d = acc;
        }
        for (i, &d) in dual.iter().enumerate() {
            for (j, &tp) in pow[..3].iter().enumerate() {
                let tr = self.trace_rel(self.mul(d, tp));
                let expect = if i == j { ONE } else { ZERO };
                debug_assert_eq!(tr, expect, "dual basis check failed");
            }
        }
        Ok(dual)
    }

    // -- parameters ---------------------------------------------------------

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }
    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }
    #[inline]
    pub fn q3(&self) -> u32 {
        self.q3
    }
    /// Order of the multiplicative group, q^3 - 1.
    #[inline]
    pub fn ord(&self) -> u32 {
        self.ord
    }
    /// N = q^2 + q + 1, the Singer subgroup order.
    #[inline]
    pub fn big_n(&self) -> u32 {
        self.big_n
    }
    pub fn modulus(&self) -> &[u32] {
        &self.poly
    }
    pub fn w_pidx(&self) -> u32 {
        self.w_pidx
    }
    #[inline]
    pub fn w(&self) -> Fe {
        Fe(2)
    }
    /// The polynomial-basis generator t as a field element.
    #[inline]
    pub fn t(&self) -> Fe {
        self.t_elem
    }

    // -- element construction and representation ----------------------------

    #[inline]
    pub fn from_w_pow(&self, j: u32) -> Fe {
        Fe(1 + j % self.ord)
    }

    /// Element with the given polynomial index (base-p digit vector).
    #[inline]
    pub fn fe_from_pidx(&self, pidx: u32) -> Fe {
        if pidx == 0 {
            ZERO
        } else {
            debug_assert!(self.log[pidx as usize] != SENT);
            Fe(1 + self.log[pidx as usize])
        }
    }

    /// Polynomial index (base-p digits of the coordinate vector over F_p).
    #[inline]
    pub fn pidx(&self, a: Fe) -> u32 {
        if a.0 == 0 {
            0
        } else {
            self.antilog[(a.0 - 1) as usize]
        }
    }

    /// Coefficients of the element over F_p in the polynomial basis.
    pub fn poly_coeffs(&self, a: Fe) -> Vec<u32> {
        let mut c = poly_of_pidx(self.pidx(a), self.p);
        c.resize(self.m as usize, 0);
        c
    }

    /// Small prime-field scalar k mod p as a field element.
    #[inline]
    pub fn scalar(&self, k: u32) -> Fe {
        self.fe_from_pidx(k % self.p)
    }

    // -- arithmetic ---------------------------------------------------------

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let i = a.0 - 1;
        let j = b.0 - 1;
        let d = if j >= i { j - i } else { self.ord - i + j };
        let z = self.zech[d as usize];
        if z == SENT {
            ZERO
        } else {
            let s = i + z;
            Fe(1 + if s >= self.ord { s - self.ord } else { s })
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a.0 == 0 || self.p == 2 {
            return a;
        }
        let s = a.0 - 1 + self.neg_shift;
        Fe(1 + if s >= self.ord { s - self.ord } else { s })
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return ZERO;
        }
        let s = a.0 - 1 + b.0 - 1;
        Fe(1 + if s >= self.ord { s - self.ord } else { s })
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.inv_nz(a))
    }

    #[inline]
    pub fn inv_nz(&self, a: Fe) -> Fe {
        debug_assert!(a.0 != 0);
        let j = a.0 - 1;
        Fe(1 + if j == 0 { 0 } else { self.ord - j })
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e for e >= 0 (0^0 = 1 by convention).
    pub fn pow_u(&self, a: Fe, e: u64) -> Fe {
        if a.0 == 0 {
            return if e == 0 { ONE } else { ZERO };
        }
        let j = (a.0 - 1) as u64;
        Fe(1 + ((j % self.ord as u64) * (e % self.ord as u64) % self.ord as u64) as u32)
    }

    /// a^e for any integer e; errors on 0 with negative exponent.
    pub fn pow_i(&self, a: Fe, e: i64) -> Result<Fe> {
        if a.0 == 0 {
            return if e > 0 {
                Ok(ZERO)
            } else if e == 0 {
                Ok(ONE)
            } else {
                Err(Error::DivisionByZero)
            };
        }
        let ord = self.ord as i128;
        let j = (a.0 - 1) as i128;
        let r = ((j * (e as i128 % ord)) % ord + ord) % ord;
        Ok(Fe(1 + r as u32))
    }

    // -- Frobenius, traces, norms -------------------------------------------

    /// x -> x^q, the relative Frobenius.
    #[inline]
    pub fn frob(&self, a: Fe) -> Fe {
        self.pow_u(a, self.q as u64)
    }

    /// x -> x^p, the absolute Frobenius.
    #[inline]
    pub fn frob_p(&self, a: Fe) -> Fe {
        self.pow_u(a, self.p as u64)
    }

    /// Relative trace x + x^q + x^{q^2} down to F_q (table lookup).
    #[inline]
    pub fn trace_rel(&self, a: Fe) -> Fe {
        Fe(self.trace_rel_tab[a.0 as usize])
    }

    #[inline]
    pub fn trace_is_zero(&self, a: Fe) -> bool {
        self.trace_rel_tab[a.0 as usize] == 0
    }

    /// Relative norm x^(1 + q + q^2) = x^N down to F_q.
    #[inline]
    pub fn norm_rel(&self, a: Fe) -> Fe {
        if a.0 == 0 {
            return ZERO;
        }
        let j = (a.0 - 1) as u64;
        Fe(1 + (j * self.big_n as u64 % self.ord as u64) as u32)
    }

    /// Absolute trace into F_p, returned as an integer below p.
    #[inline]
    pub fn abs_trace(&self, a: Fe) -> u32 {
        self.abs_tr_tab[a.0 as usize] as u32
    }

    /// Trace of a subfield element from F_q down to F_p.
    pub fn trace_q_to_p(&self, a: Fe) -> u32 {
        debug_assert!(self.in_subfield(a));
        let mut acc = ZERO;
        let mut e = a;
        for _ in 0..self.n {
            acc = self.add(acc, e);
            e = self.frob_p(e);
        }
        let v = self.pidx(acc);
        debug_assert!(v < self.p);
        v
    }

    // -- subfield and Singer subgroup ---------------------------------------

    /// Membership in F_q = fixed field of x -> x^q: index divisible by N.
    #[inline]
    pub fn in_subfield(&self, a: Fe) -> bool {
        a.0 == 0 || (a.0 - 1).is_multiple_of(self.big_n)
    }

    /// For x = w^(Nk) in F_q*, the exponent k below q - 1.
    #[inline]
    pub fn subfield_log(&self, a: Fe) -> Option<u32> {
        if a.0 == 0 || !(a.0 - 1).is_multiple_of(self.big_n) {
            None
        } else {
            Some((a.0 - 1) / self.big_n)
        }
    }

    /// The q - 1 nonzero subfield elements, as w^(Nk) for k ascending.
    pub fn subfield_units(&self) -> Vec<Fe> {
        (0..self.q - 1).map(|k| Fe(1 + k * self.big_n)).collect()
    }

    /// All q subfield elements, zero first.
    pub fn subfield_elems(&self) -> Vec<Fe> {
        let mut v = vec![ZERO];
        v.extend(self.subfield_units());
        v
    }

    /// Subfield element number i in the fixed enumeration (0 is zero).
    #[inline]
    pub fn subfield_nth(&self, i: u32) -> Fe {
        debug_assert!(i < self.q);
        if i == 0 {
            ZERO
        } else {
            Fe(1 + (i - 1) * self.big_n)
        }
    }

    /// Membership in the Singer subgroup of order N (generated by w^(q-1)).
    #[inline]
    pub fn in_singer(&self, a: Fe) -> bool {
        a.0 != 0 && (a.0 - 1).is_multiple_of(self.q - 1)
    }

    /// The Singer subgroup, as w^((q-1)k) for k ascending.
    pub fn singer_subgroup(&self) -> Vec<Fe> {
        (0..self.big_n).map(|k| Fe(1 + k * (self.q - 1))).collect()
    }

    /// Squares of F_q*: even powers of the subfield generator w^N.
    #[inline]
    pub fn is_subfield_square(&self, a: Fe) -> bool {
        match self.subfield_log(a) {
            Some(k) => self.p == 2 || k % 2 == 0,
            None => false,
        }
    }

    /// Cube root in F_q: y^e with 3e = 1 (mod q-1). Cubing is a bijection on
    /// F_q* exactly because 3 does not divide q - 1.
    pub fn cube_root(&self, y: Fe) -> Result<Fe> {
        if y.0 == 0 {
            return Err(Error::DomainError("cube root of zero not defined here".into()));
        }
        let k = self
            .subfield_log(y)
            .ok_or_else(|| Error::DomainError("cube root requested outside F_q*".into()))?;
        let e = (k as u64 * self.cube_inv_exp as u64 % (self.q - 1) as u64) as u32;
        Ok(Fe(1 + e * self.big_n))
    }

    /// Unique splitting of the exponent of x = w^j as j = N*i + (q-1)*l
    /// (mod q^3 - 1) with 0 <= i < q-1 and 0 <= l < N. The first part is the
    /// subfield direction (w^(Ni) in F_q*), the second the Singer direction.
    pub fn decompose_exponent(&self, x: Fe) -> Result<(u32, u32)> {
        if x.0 == 0 {
            return Err(Error::DomainError("cannot decompose the zero element".into()));
        }
        let j = (x.0 - 1) as u64;
        let qm1 = (self.q - 1) as u64;
        let nn = self.big_n as u64;
        let i = j % qm1 * mod_inv(nn % qm1, qm1) % qm1;
        let l = j % nn * mod_inv(qm1 % nn, nn) % nn;
        debug_assert_eq!((nn * i + qm1 * l) % self.ord as u64, j);
        Ok((i as u32, l as u32))
    }

    // -- coordinates of F_{q^3} over F_q ------------------------------------

    /// Coordinates over the basis (1, t, t^2) of F_{q^3}/F_q, extracted via
    /// the dual basis of the trace form.
    #[inline]
    pub fn coords_over_fq(&self, x: Fe) -> [Fe; 3] {
        [
            self.trace_rel(self.mul(x, self.dual_basis[0])),
            self.trace_rel(self.mul(x, self.dual_basis[1])),
            self.trace_rel(self.mul(x, self.dual_basis[2])),
        ]
    }

    #[inline]
    pub fn from_coords(&self, c: &[Fe; 3]) -> Fe {
        let t = self.t_elem;
        self.add(self.add(c[0], self.mul(c[1], t)), self.mul(c[2], self.mul(t, t)))
    }
}

/// Gaussian inverse of a small square matrix over F_q (entries must be
/// subfield elements). Returns None when singular.
#[allow(clippy::needless_range_loop)] // split borrows across rows
pub(crate) fn invert_matrix(ctx: &FieldCtx, a: &[Vec<Fe>]) -> Option<Vec<Vec<Fe>>> {
    let k = a.len();
    let mut aug: Vec<Vec<Fe>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { ONE } else { ZERO }));
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, piv);
        let inv = ctx.inv_nz(aug[col][col]);
        for x in aug[col].iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        for r in 0..k {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col];
                for c in 0..2 * k {
                    let s = ctx.mul(f, aug[col][c]);
                    aug[r][c] = ctx.sub(aug[r][c], s);
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[k..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f8() -> FieldCtx {
        FieldCtx::new(2, 1).unwrap()
    }
    fn f125() -> FieldCtx {
        FieldCtx::new(5, 1).unwrap()
    }

    #[test]
    fn rejects_parameters_outside_the_family() {
        // q = 4 is 1 mod 3, q = 3 is 0 mod 3, p = 4 is not prime
        assert!(matches!(FieldCtx::new(2, 2), Err(Error::UnsupportedParameter(_))));
        assert!(matches!(FieldCtx::new(3, 1), Err(Error::UnsupportedParameter(_))));
        assert!(matches!(FieldCtx::new(4, 1), Err(Error::UnsupportedParameter(_))));
    }

    #[test]
    fn memory_cap_is_enforced() {
        assert!(matches!(
            FieldCtx::with_options(47, 1, None, 10),
            Err(Error::TooLarge(_))
        ));
        assert!(FieldCtx::with_options(47, 1, None, 17).is_ok());
    }

    #[test]
    fn bad_polynomials_are_rejected() {
        // t^3 + 1 = (t + 1)(t^2 + t + 1) over F_2
        assert!(matches!(
            FieldCtx::with_options(2, 1, Some(&[1, 0, 0, 1]), 24),
            Err(Error::BadPolynomial(_))
        ));
        // wrong degree
        assert!(matches!(
            FieldCtx::with_options(2, 1, Some(&[1, 1, 1]), 24),
            Err(Error::BadPolynomial(_))
        ));
        // non-monic
        assert!(matches!(
            FieldCtx::with_options(5, 1, Some(&[2, 3, 0, 2]), 24),
            Err(Error::BadPolynomial(_))
        ));
    }

    #[test]
    fn f8_multiplication_matches_hand_reduction() {
        // with t^3 + t + 1: t * t^2 = t^3 = t + 1, polynomial index 3
        let ctx = FieldCtx::with_options(2, 1, Some(&[1, 1, 0, 1]), 24).unwrap();
        let t = ctx.t();
        let t2 = ctx.mul(t, t);
        assert_eq!(ctx.pidx(ctx.mul(t, t2)), 3);
    }

    #[test]
    fn f5_inverse_table() {
        let ctx = f125();
        let two = ctx.scalar(2);
        let three = ctx.scalar(3);
        assert_eq!(ctx.inv(two).unwrap(), three);
        assert!(matches!(ctx.inv(ZERO), Err(Error::DivisionByZero)));
    }

    #[test]
    fn every_unit_has_full_order_divisor() {
        let ctx = f125();
        for j in 0..ctx.ord() {
            let x = ctx.from_w_pow(j);
            assert_eq!(ctx.pow_u(x, ctx.ord() as u64), ONE);
        }
    }

    #[test]
    fn addition_matches_polynomial_digit_addition() {
        // Independent route: add coefficient vectors digit-wise mod p.
        for ctx in [f8(), f125(), FieldCtx::new(2, 3).unwrap()] {
            let step = if ctx.q3() > 600 { 7 } else { 1 };
            for ai in (0..ctx.q3()).step_by(step) {
                for bi in (0..ctx.q3()).step_by(step * 3 + 1) {
                    let a = ctx.fe_from_pidx(ai);
                    let b = ctx.fe_from_pidx(bi);
                    let expect = pidx_add(ai, bi, ctx.p());
                    assert_eq!(ctx.pidx(ctx.add(a, b)), expect);
                }
            }
        }
    }

    #[test]
    fn negation_and_subtraction() {
        let ctx = f125();
        for j in 0..ctx.ord() {
            let x = ctx.from_w_pow(j);
            assert_eq!(ctx.add(x, ctx.neg(x)), ZERO);
            assert_eq!(ctx.sub(x, x), ZERO);
        }
    }

    #[test]
    fn trace_of_t_vanishes_in_f8_with_trinomial_modulus() {
        // t^4 = t^2 + t, so t + t^2 + t^4 = 0 with modulus t^3 + t + 1.
        let ctx = FieldCtx::with_options(2, 1, Some(&[1, 1, 0, 1]), 24).unwrap();
        assert_eq!(ctx.trace_rel(ctx.t()), ZERO);
    }

    #[test]
    fn trace_lands_in_subfield_and_is_fq_linear() {
        for ctx in [f8(), f125(), FieldCtx::new(2, 3).unwrap()] {
            for j in 0..ctx.ord() {
                let x = Fe(1 + j);
                let tr = ctx.trace_rel(x);
                assert!(ctx.in_subfield(tr));
                assert_eq!(ctx.trace_rel(ctx.frob(x)), tr);
            }
            // additivity and F_q-homogeneity on a grid
            let units = ctx.subfield_units();
            for j in (0..ctx.ord()).step_by(11) {
                let x = Fe(1 + j);
                let y = Fe(1 + (j * 7 + 3) % ctx.ord());
                assert_eq!(
                    ctx.trace_rel(ctx.add(x, y)),
                    ctx.add(ctx.trace_rel(x), ctx.trace_rel(y))
                );
                let lam = units[(j as usize) % units.len()];
                assert_eq!(ctx.trace_rel(ctx.mul(lam, x)), ctx.mul(lam, ctx.trace_rel(x)));
            }
        }
    }

    #[test]
    fn norm_is_multiplicative_and_lands_in_subfield() {
        let ctx = f125();
        for j in (0..ctx.ord()).step_by(5) {
            let x = Fe(1 + j);
            let y = Fe(1 + (j * 3 + 1) % ctx.ord());
            assert!(ctx.in_subfield(ctx.norm_rel(x)));
            assert_eq!(ctx.norm_rel(ctx.mul(x, y)), ctx.mul(ctx.norm_rel(x), ctx.norm_rel(y)));
            assert_eq!(ctx.norm_rel(ctx.frob(x)), ctx.norm_rel(x));
        }
    }

    #[test]
    fn subfield_is_the_frobenius_fixed_field() {
        for ctx in [f8(), FieldCtx::new(2, 3).unwrap()] {
            let mut count = 0;
            for pidx in 0..ctx.q3() {
                let x = ctx.fe_from_pidx(pidx);
                let fixed = ctx.frob(x) == x;
                assert_eq!(fixed, ctx.in_subfield(x));
                if fixed {
                    count += 1;
                }
            }
            assert_eq!(count, ctx.q());
        }
    }

    #[test]
    fn cube_root_inverts_cubing_on_subfield_units() {
        for ctx in [f8(), f125(), FieldCtx::new(2, 3).unwrap(), FieldCtx::new(11, 1).unwrap()] {
            for u in ctx.subfield_units() {
                let r = ctx.cube_root(u).unwrap();
                assert!(ctx.in_subfield(r));
                assert_eq!(ctx.pow_u(r, 3), u);
                assert_eq!(ctx.cube_root(ctx.pow_u(u, 3)).unwrap(), u);
            }
        }
        let ctx = f8();
        assert!(ctx.cube_root(ZERO).is_err());
        assert!(ctx.cube_root(ctx.w()).is_err()); // w generates F_8, not F_2
    }

    #[test]
    fn exponent_decomposition_is_a_bijection() {
        let ctx = f125();
        let mut seen = std::collections::HashSet::new();
        for j in 0..ctx.ord() {
            let x = Fe(1 + j);
            let (i, l) = ctx.decompose_exponent(x).unwrap();
            assert!(i < ctx.q() - 1 && l < ctx.big_n());
            assert!(seen.insert((i, l)));
        }
        assert_eq!(seen.len(), ctx.ord() as usize);
        // the identity decomposes trivially; Singer elements have i = 0
        assert_eq!(ctx.decompose_exponent(ONE).unwrap(), (0, 0));
        for s in ctx.singer_subgroup() {
            assert_eq!(ctx.decompose_exponent(s).unwrap().0, 0);
        }
        for u in ctx.subfield_units() {
            assert_eq!(ctx.decompose_exponent(u).unwrap().1, 0);
        }
    }

    #[test]
    fn singer_subgroup_has_order_big_n() {
        let ctx = f125();
        assert_eq!(ctx.big_n(), 31);
        let c0 = ctx.singer_subgroup();
        assert_eq!(c0.len(), 31);
        for &x in &c0 {
            assert!(ctx.in_singer(x));
            assert_eq!(ctx.pow_u(x, 31), ONE);
        }
    }

    #[test]
    fn coordinates_over_fq_roundtrip() {
        for ctx in [f8(), f125(), FieldCtx::new(2, 3).unwrap()] {
            for pidx in 0..ctx.q3() {
                let x = ctx.fe_from_pidx(pidx);
                let c = ctx.coords_over_fq(x);
                assert!(c.iter().all(|&ci| ctx.in_subfield(ci)));
                assert_eq!(ctx.from_coords(&c), x);
            }
        }
    }

    #[test]
    fn bundled_moduli_match_the_search_rule() {
        for &(p, n, poly) in BUNDLED_POLYS {
            if (p as u64).pow(3 * n) > 1 << 16 {
                continue; // keep the unit test quick; big ones are spot-checked below
            }
            assert_eq!(smallest_primitive_poly(p, 3 * n), poly, "p={p} n={n}");
        }
        // the two large binary fields: verify irreducible + primitive directly
        for &(p, n, poly) in BUNDLED_POLYS {
            assert!(poly_is_irreducible(poly, p), "p={p} n={n}");
            assert!(poly_x_is_primitive(poly, p), "p={p} n={n}");
        }
    }

    #[test]
    fn primitive_element_is_t_for_bundled_moduli() {
        for (p, n) in [(2, 1), (5, 1), (2, 3), (11, 1)] {
            let ctx = FieldCtx::new(p, n).unwrap();
            assert_eq!(ctx.w(), ctx.t());
        }
    }

    #[test]
    fn imprimitive_override_still_builds_a_consistent_table() {
        // t^3 + t + 1 over F_5 is irreducible but t has order < 124, so the
        // generator search must move past t.
        let ctx = FieldCtx::with_options(5, 1, Some(&[1, 1, 0, 1]), 24).unwrap();
        assert_ne!(ctx.w(), ctx.t());
        let mut seen = std::collections::HashSet::new();
        for j in 0..ctx.ord() {
            assert!(seen.insert(ctx.pidx(Fe(1 + j))));
        }
        for u in ctx.subfield_units() {
            assert_eq!(ctx.pow_u(ctx.cube_root(u).unwrap(), 3), u);
        }
    }

    #[test]
    fn absolute_trace_agrees_with_tower_composition() {
        // Tr to F_p factors through the relative trace: for subfield x,
        // Tr_{q^3/p}(x) = Tr_{q/p}(3x).
        for ctx in [f125(), FieldCtx::new(2, 3).unwrap()] {
            for x in ctx.subfield_elems() {
                let three_x = ctx.mul(ctx.scalar(3), x);
                assert_eq!(ctx.abs_trace(x), ctx.trace_q_to_p(three_x));
            }
        }
    }
}
