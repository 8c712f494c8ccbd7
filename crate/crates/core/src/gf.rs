//! Arithmetic in the tower `F_p ⊂ F_q ⊂ F_{q^2}` with `q = p^k`.
//!
//! The big field is realized once as `F_p[w]/(f)` with `f` the
//! lexicographically smallest monic irreducible polynomial of degree `2k`.
//! An element is stored as the base-`p` integer `c_0 + c_1 p + ... `
//! of its coordinate vector, which makes it a dense table index. Products,
//! inverses and sums go through discrete logarithm and Zech logarithm tables
//! built against a fixed primitive element `g`.
//!
//! `F_q` is the fixed field of the `q`-power Frobenius; its nonzero elements
//! are exactly the powers `g^(jd)` with `d = q + 1`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default bound on `q^2`; the three lookup tables cost 12 bytes per element.
pub const DEFAULT_SIZE_CAP: u64 = 4_000_000;

const NO_LOG: u32 = u32::MAX;

/// An element of `F_{q^2}`, stored as the base-`p` encoding of its
/// coordinates with respect to the power basis `1, w, ..., w^(2k-1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 1;
    }
    true
}

/// Distinct prime factors, ascending.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Number of positive divisors.
pub fn divisor_count(n: u64) -> u64 {
    (1..=n).filter(|e| n.is_multiple_of(*e)).count() as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

// Dense polynomials over F_p, low degree first, used only while the field
// tables do not exist yet.
mod fp_poly {
    use super::pow_mod;

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = pow_mod(m[dm], p - 2, p);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top] * lead_inv % p;
            if c != 0 {
                for (i, &mi) in m.iter().enumerate() {
                    let j = top - dm + i;
                    r[j] = (r[j] + p - c * mi % p) % p;
                }
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        rem(&prod, m, p)
    }

    pub fn pow_mod_poly(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, m, p);
            }
            b = mul_mod(&b, &b, m, p);
            e >>= 1;
        }
        result
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        x
    }

    /// Rabin's irreducibility test for a monic polynomial of degree `n`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = f.len() - 1;
        let x = vec![0, 1];
        // h[i] = x^(p^i) mod f
        let mut h = vec![rem(&x, f, p)];
        for i in 0..n {
            let next = pow_mod_poly(&h[i], p as u128, f, p);
            h.push(next);
        }
        if !sub(&h[n], &rem(&x, f, p), p).is_empty() {
            return false;
        }
        for r in super::prime_factors(n as u64) {
            let g = gcd(&sub(&h[n / r as usize], &x, p), f, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

/// The field tower together with its lookup tables. Immutable once built.
pub struct FieldCtx {
    p: u32,
    k: u32,
    q: u64,
    d: u64,
    degree: usize,
    modulus: Vec<u32>,
    generator: FqElem,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .field("generator", &self.coeffs(self.generator))
            .finish()
    }
}

/// Builds `F_{q^2}` for `q = p^k` with the default size cap.
pub fn make_field(p: u64, k: u32) -> Result<FieldCtx> {
    FieldCtx::with_cap(p, k, DEFAULT_SIZE_CAP)
}

impl FieldCtx {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        Self::with_cap(p, k, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < 5 {
            return Err(Error::SmallCharacteristic(p));
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let size = (p as u128).checked_pow(2 * k).unwrap_or(u128::MAX);
        if size > cap as u128 || size >= u32::MAX as u128 {
            return Err(Error::SizeCapExceeded { size, cap });
        }
        let size = size as u64;
        let q = p.pow(k);
        let degree = 2 * k as usize;
        let modulus = smallest_irreducible(p, degree);
        let order = size - 1;
        let factors = prime_factors(order);

        let generator = (1..size)
            .find(|&enc| {
                let digits = decode(enc, p, degree);
                factors.iter().all(|&r| {
                    let pw = fp_poly::pow_mod_poly(&digits, (order / r) as u128, &modulus, p);
                    pw != [1]
                })
            })
            .expect("a finite field has a primitive element");

        let gen_digits = decode(generator, p, degree);
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![NO_LOG; size as usize];
        let mut cur = vec![1u64];
        for m in 0..order {
            let enc = encode(&cur, p);
            debug_assert_eq!(log[enc as usize], NO_LOG, "generator is not primitive");
            exp.push(enc as u32);
            log[enc as usize] = m as u32;
            cur = fp_poly::mul_mod(&cur, &gen_digits, &modulus, p);
        }

        let p32 = p as u32;
        let zech = exp
            .iter()
            .map(|&enc| {
                // adding 1 only touches the constant coordinate
                let plus_one = if enc % p32 == p32 - 1 { enc - (p32 - 1) } else { enc + 1 };
                log[plus_one as usize]
            })
            .collect();

        Ok(FieldCtx {
            p: p as u32,
            k,
            q,
            d: q + 1,
            degree,
            modulus: modulus.iter().map(|&c| c as u32).collect(),
            generator: FqElem(generator as u32),
            exp,
            log,
            zech,
        })
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `d = q + 1`.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// `q^2`.
    pub fn size(&self) -> u64 {
        self.exp.len() as u64 + 1
    }

    /// `q^2 - 1`, the order of the multiplicative group.
    pub fn group_order(&self) -> u64 {
        self.exp.len() as u64
    }

    /// Degree `2k` of `F_{q^2}` over `F_p`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Monic modulus, low degree first (length `2k + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FqElem {
        self.generator
    }

    pub fn elem_from_index(&self, index: u32) -> Option<FqElem> {
        ((index as u64) < self.size()).then_some(FqElem(index))
    }

    /// Element with the given coordinates; missing trailing coordinates are 0.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FqElem> {
        if coeffs.len() > self.degree {
            return Err(Error::BadCoordinates(format!(
                "expected at most {} coordinates, got {}",
                self.degree,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p as u64) {
            return Err(Error::BadCoordinates(format!(
                "coordinate {c} is not reduced mod {}",
                self.p
            )));
        }
        Ok(FqElem(encode(coeffs, self.p as u64) as u32))
    }

    pub fn coeffs(&self, x: FqElem) -> Vec<u64> {
        decode(x.0 as u64, self.p as u64, self.degree)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p as i64) as u32)
    }

    /// The integer `n` when `x` lies in the prime field.
    pub fn as_prime_field_int(&self, x: FqElem) -> Option<u64> {
        (x.0 < self.p).then_some(x.0 as u64)
    }

    /// Iterates over all `q^2` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.size() as u32).map(FqElem)
    }

    pub fn dlog(&self, x: FqElem) -> Option<u64> {
        match self.log[x.0 as usize] {
            NO_LOG => None,
            l => Some(l as u64),
        }
    }

    /// `g^m` for any integer exponent `m`.
    pub fn pow_g(&self, m: i64) -> FqElem {
        let n = self.group_order() as i64;
        FqElem(self.exp[m.rem_euclid(n) as usize])
    }

    /// Discrete log of `g^m + 1`, or `None` when `g^m = -1`.
    pub fn zech_log(&self, m: u64) -> Option<u64> {
        match self.zech[(m % self.group_order()) as usize] {
            NO_LOG => None,
            l => Some(l as u64),
        }
    }

    pub fn add(&self, x: FqElem, y: FqElem) -> FqElem {
        match (self.dlog(x), self.dlog(y)) {
            (None, _) => y,
            (_, None) => x,
            (Some(lx), Some(ly)) => {
                let n = self.group_order();
                match self.zech_log((ly + n - lx) % n) {
                    None => FqElem::ZERO,
                    Some(z) => FqElem(self.exp[((lx + z) % n) as usize]),
                }
            }
        }
    }

    pub fn neg(&self, x: FqElem) -> FqElem {
        match self.dlog(x) {
            None => x,
            Some(l) => FqElem(self.exp[((l + self.group_order() / 2) % self.group_order()) as usize]),
        }
    }

    pub fn sub(&self, x: FqElem, y: FqElem) -> FqElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FqElem, y: FqElem) -> FqElem {
        match (self.dlog(x), self.dlog(y)) {
            (Some(lx), Some(ly)) => FqElem(self.exp[((lx + ly) % self.group_order()) as usize]),
            _ => FqElem::ZERO,
        }
    }

    pub fn inv(&self, x: FqElem) -> Option<FqElem> {
        let l = self.dlog(x)?;
        let n = self.group_order();
        Some(FqElem(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, x: FqElem, y: FqElem) -> Option<FqElem> {
        Some(self.mul(x, self.inv(y)?))
    }

    /// `x^e` with the convention `0^0 = 1`.
    pub fn pow(&self, x: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        match self.dlog(x) {
            None => FqElem::ZERO,
            Some(l) => {
                let n = self.group_order() as u128;
                FqElem(self.exp[((l as u128 * e as u128) % n) as usize])
            }
        }
    }

    /// The `q`-power Frobenius `x ↦ x^q`.
    pub fn frobenius(&self, x: FqElem) -> FqElem {
        self.pow(x, self.q)
    }

    pub fn is_in_fq(&self, x: FqElem) -> bool {
        self.frobenius(x) == x
    }

    /// Relative trace `x + x^q` down to `F_q`.
    pub fn trace(&self, x: FqElem) -> FqElem {
        self.add(x, self.frobenius(x))
    }

    /// Membership in `μ_d`, i.e. `x^d = 1`.
    pub fn in_mu_d(&self, x: FqElem) -> Result<bool> {
        if x.is_zero() {
            return Err(Error::ZeroElement("d-th root test"));
        }
        Ok(self.pow(x, self.d) == FqElem::ONE)
    }

    /// The fixed generator `g_d = g^(q-1)` of `μ_d`; it plays the role of `ζ_d`.
    pub fn mu_d_generator(&self) -> FqElem {
        self.pow_g(self.q as i64 - 1)
    }

    /// `e` with `x = g_d^e`, for `x ∈ μ_d`.
    pub fn mu_d_exponent(&self, x: FqElem) -> Result<u64> {
        let l = self.dlog(x).ok_or(Error::ZeroElement("μ_d exponent"))?;
        if l % (self.q - 1) != 0 {
            return Err(Error::NotInMuD);
        }
        Ok(l / (self.q - 1))
    }

    /// Exponent of `χ^i(x)` as a power of `ζ_d`, or `None` for `x = 0`.
    ///
    /// `χ(x)` is defined through `x^(q-1) = g_d^e`, so `χ(x) = ζ_d^(dlog(x) mod d)`.
    pub fn chi_exp(&self, x: FqElem, i: u64) -> Option<u64> {
        let l = self.dlog(x)?;
        Some(((l % self.d) * (i % self.d)) % self.d)
    }

    /// `g^((q^2 - 1)/m)`, an element of exact order `m`.
    pub fn primitive_root_of_unity(&self, m: u64) -> Result<FqElem> {
        let n = self.group_order();
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::NotADivisor { m, order: n });
        }
        Ok(self.pow_g((n / m) as i64))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, x: FqElem) -> Option<u64> {
        let l = self.dlog(x)?;
        Some(self.group_order() / gcd(l, self.group_order()))
    }

    /// Elements of `F_q`: zero first, then ascending discrete log.
    pub fn fq_elements(&self) -> Vec<FqElem> {
        std::iter::once(FqElem::ZERO)
            .chain((0..self.q - 1).map(|j| self.pow_g((j * self.d) as i64)))
            .collect()
    }

    /// Quadratic residue test inside `F_q` (`0` is not counted as a square).
    pub fn is_square_in_fq(&self, c: FqElem) -> Result<bool> {
        if !self.is_in_fq(c) {
            return Err(Error::NotInSubfield);
        }
        Ok(match self.dlog(c) {
            None => false,
            Some(l) => (l / self.d).is_multiple_of(2),
        })
    }

    /// A square root in `F_{q^2}` when one exists (either root).
    pub fn sqrt(&self, x: FqElem) -> Option<FqElem> {
        match self.dlog(x) {
            None => Some(FqElem::ZERO),
            Some(l) if l % 2 == 0 => Some(self.pow_g((l / 2) as i64)),
            Some(_) => None,
        }
    }

    /// All `(a, b)` with `a ∈ F_q`, `b ∉ F_q` and `a^2 + 1 = b^2`, ordered by
    /// `dlog(a)` then `dlog(b)`.
    pub fn find_ab_pairs(&self) -> Vec<(FqElem, FqElem)> {
        let mut out = Vec::new();
        for a in self.fq_elements() {
            let c = self.add(self.mul(a, a), FqElem::ONE);
            if c.is_zero() || self.is_square_in_fq(c).expect("a^2 + 1 lies in F_q") {
                continue;
            }
            let b = self.sqrt(c).expect("F_q elements are squares in F_{q^2}");
            let mut roots = [b, self.neg(b)];
            roots.sort_by_key(|&r| self.dlog(r));
            for b in roots {
                out.push((a, b));
            }
        }
        out.sort_by_key(|&(a, b)| (self.dlog(a), self.dlog(b)));
        out
    }

    /// Signed representative in `(-p/2, p/2]` for prime-field elements.
    pub fn signed_int(&self, x: FqElem) -> Option<i64> {
        let v = self.as_prime_field_int(x)? as i64;
        let p = self.p as i64;
        Some(if v > p / 2 { v - p } else { v })
    }

    /// Human-readable form: a signed integer for prime-field elements, else a
    /// polynomial in `w`.
    pub fn format_elem(&self, x: FqElem) -> String {
        if let Some(v) = self.signed_int(x) {
            return v.to_string();
        }
        let p = self.p as i64;
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs(x).iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let c = c as i64;
            let c = if c > p / 2 { c - p } else { c };
            let mono = match i {
                0 => String::new(),
                1 => "w".to_string(),
                _ => format!("w^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                (-1, _) => format!("-{mono}"),
                _ => format!("{c}*{mono}"),
            });
        }
        let s = terms.join(" + ").replace("+ -", "- ");
        if terms.len() > 1 {
            format!("({s})")
        } else {
            s
        }
    }
}

fn encode(digits: &[u64], p: u64) -> u64 {
    digits.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn decode(mut enc: u64, p: u64, n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(enc % p);
        enc /= p;
    }
    fp_poly::trim(&mut out);
    out
}

/// Lexicographically smallest monic irreducible polynomial of degree `n`
/// over `F_p`, comparing coefficient vectors from the constant term upward.
fn smallest_irreducible(p: u64, n: usize) -> Vec<u64> {
    let total = p.pow(n as u32);
    for v in 0..total {
        // the constant term is the most significant digit of the counter
        let mut coeffs = vec![0u64; n + 1];
        let mut rest = v;
        for i in (0..n).rev() {
            coeffs[i] = rest % p;
            rest /= p;
        }
        coeffs[n] = 1;
        if coeffs[0] == 0 {
            continue;
        }
        if fp_poly::is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
