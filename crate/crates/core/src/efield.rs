//! The function field `F_{q^2}(t)`, finite extensions of it, the curve
//! `E_d: y^2 + xy - t^d y = x^3`, and the point `φ_*(L)` obtained by summing the
//! three conjugates of the point a line defines over a cubic extension.

use std::fmt::Debug;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermat::Line;
use crate::gf::{FieldCtx, FqElem};

/// A field given by a context object; elements carry no context of their own.
pub trait Field {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero (or, in a quotient ring that is not a field, a zero divisor).
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    #[allow(clippy::wrong_self_convention)]
    fn from_int(&self, n: i64) -> Self::Elem {
        let mut acc = self.zero();
        for _ in 0..n.unsigned_abs() {
            acc = self.add(&acc, &self.one());
        }
        if n < 0 {
            self.neg(&acc)
        } else {
            acc
        }
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// Dense univariate polynomials over a [`Field`], low degree first, no trailing zeros.
pub mod poly {
    use super::Field;

    pub fn trim<F: Field>(f: &F, v: &mut Vec<F::Elem>) {
        while v.last().is_some_and(|c| f.is_zero(c)) {
            v.pop();
        }
    }

    pub fn degree<E>(v: &[E]) -> Option<usize> {
        v.len().checked_sub(1)
    }

    pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let n = a.len().max(b.len());
        let z = f.zero();
        let mut out: Vec<F::Elem> = (0..n)
            .map(|i| f.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        trim(f, &mut out);
        out
    }

    pub fn neg<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
        a.iter().map(|c| f.neg(c)).collect()
    }

    pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        add(f, a, &neg(f, b))
    }

    pub fn scale<F: Field>(f: &F, a: &[F::Elem], k: &F::Elem) -> Vec<F::Elem> {
        let mut out: Vec<F::Elem> = a.iter().map(|c| f.mul(c, k)).collect();
        trim(f, &mut out);
        out
    }

    pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(x, y));
            }
        }
        trim(f, &mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
        let db = b.len().checked_sub(1).expect("division by the zero polynomial");
        let lead_inv = f.inv(&b[db]).expect("leading coefficient is nonzero");
        let mut rem = a.to_vec();
        trim(f, &mut rem);
        if rem.len() <= db {
            return (Vec::new(), rem);
        }
        let mut quot = vec![f.zero(); rem.len() - db];
        for top in (db..rem.len()).rev() {
            if f.is_zero(&rem[top]) {
                continue;
            }
            let c = f.mul(&rem[top], &lead_inv);
            for (i, bc) in b.iter().enumerate() {
                rem[top - db + i] = f.sub(&rem[top - db + i], &f.mul(&c, bc));
            }
            quot[top - db] = c;
        }
        rem.truncate(db);
        trim(f, &mut rem);
        trim(f, &mut quot);
        (quot, rem)
    }

    pub fn monic<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
        match a.last() {
            None => Vec::new(),
            Some(l) => scale(f, a, &f.inv(l).expect("nonzero leading coefficient")),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        trim(f, &mut x);
        trim(f, &mut y);
        while !y.is_empty() {
            let (_, r) = divrem(f, &x, &y);
            x = y;
            y = r;
        }
        monic(f, &x)
    }

    /// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
    pub fn inv_mod<F: Field>(f: &F, a: &[F::Elem], m: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let (_, a) = divrem(f, a, m);
        let (mut r0, mut r1) = (m.to_vec(), a);
        let (mut s0, mut s1): (Vec<F::Elem>, Vec<F::Elem>) = (Vec::new(), vec![f.one()]);
        while !r1.is_empty() {
            let (q, r) = divrem(f, &r0, &r1);
            let s = sub(f, &s0, &mul(f, &q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.len() != 1 {
            return None;
        }
        let k = f.inv(&r0[0])?;
        let (_, inv) = divrem(f, &scale(f, &s0, &k), m);
        Some(inv)
    }

    pub fn eval<F: Field>(f: &F, a: &[F::Elem], x: &F::Elem) -> F::Elem {
        a.iter().rev().fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    pub fn derivative<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
        let mut out: Vec<F::Elem> = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| f.mul(&f.from_int(i as i64), c))
            .collect();
        trim(f, &mut out);
        out
    }
}

/// `F_{q^2}` as a [`Field`].
#[derive(Clone, Copy, Debug)]
pub struct Fq2<'a> {
    pub ctx: &'a FieldCtx,
}

impl Field for Fq2<'_> {
    type Elem = FqElem;

    fn zero(&self) -> FqElem {
        FqElem::ZERO
    }
    fn one(&self) -> FqElem {
        FqElem::ONE
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.ctx.add(*a, *b)
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        self.ctx.neg(*a)
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        self.ctx.mul(*a, *b)
    }
    fn inv(&self, a: &FqElem) -> Option<FqElem> {
        self.ctx.inv(*a)
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.is_zero()
    }
    fn from_int(&self, n: i64) -> FqElem {
        self.ctx.from_int(n)
    }
}

/// A polynomial in `t` over `F_{q^2}`.
pub type Poly = Vec<FqElem>;

/// `num/den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn num(&self) -> &[FqElem] {
        &self.num
    }

    pub fn den(&self) -> &[FqElem] {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }
}

/// `F_{q^2}(t)`.
#[derive(Clone, Copy, Debug)]
pub struct RatFuncField<'a> {
    pub base: Fq2<'a>,
}

impl<'a> RatFuncField<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Self {
        RatFuncField { base: Fq2 { ctx } }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.base.ctx
    }

    /// Canonical form of `num/den`; `den` must be nonzero.
    pub fn make(&self, num: &[FqElem], den: &[FqElem]) -> RatFunc {
        let f = &self.base;
        let mut num = num.to_vec();
        let mut den = den.to_vec();
        poly::trim(f, &mut num);
        poly::trim(f, &mut den);
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return RatFunc {
                num,
                den: vec![FqElem::ONE],
            };
        }
        let g = poly::gcd(f, &num, &den);
        if g.len() > 1 {
            num = poly::divrem(f, &num, &g).0;
            den = poly::divrem(f, &den, &g).0;
        }
        let l = f.inv(den.last().expect("nonzero")).expect("nonzero");
        RatFunc {
            num: poly::scale(f, &num, &l),
            den: poly::scale(f, &den, &l),
        }
    }

    pub fn poly(&self, p: &[FqElem]) -> RatFunc {
        self.make(p, &[FqElem::ONE])
    }

    pub fn constant(&self, c: FqElem) -> RatFunc {
        self.poly(&[c])
    }

    /// `t`.
    pub fn t(&self) -> RatFunc {
        self.poly(&[FqElem::ZERO, FqElem::ONE])
    }

    /// Builds `num/den` from signed integer coefficients, low degree first.
    pub fn from_signed(&self, num: &[i64], den: &[i64]) -> RatFunc {
        let ctx = self.ctx();
        let conv = |v: &[i64]| v.iter().map(|&c| ctx.from_int(c)).collect::<Vec<_>>();
        self.make(&conv(num), &conv(den))
    }

    /// `f(t) ↦ f(ζt)`.
    pub fn scale_variable(&self, r: &RatFunc, zeta: FqElem) -> RatFunc {
        let ctx = self.ctx();
        let sub = |p: &[FqElem]| -> Poly {
            p.iter()
                .enumerate()
                .map(|(i, &c)| ctx.mul(c, ctx.pow(zeta, i as u64)))
                .collect()
        };
        self.make(&sub(&r.num), &sub(&r.den))
    }

    /// A square root in `F_{q^2}(t)`, if one exists.
    pub fn sqrt(&self, r: &RatFunc) -> Option<RatFunc> {
        let n = poly_sqrt(self.ctx(), &r.num)?;
        let d = poly_sqrt(self.ctx(), &r.den)?;
        Some(self.make(&n, &d))
    }

    /// Signed-representative rendering, highest degree first.
    pub fn format(&self, r: &RatFunc) -> String {
        let n = format_poly(self.ctx(), &r.num);
        if r.is_polynomial() {
            n
        } else {
            format!("({n})/({})", format_poly(self.ctx(), &r.den))
        }
    }
}

impl Field for RatFuncField<'_> {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc {
            num: Vec::new(),
            den: vec![FqElem::ONE],
        }
    }
    fn one(&self) -> RatFunc {
        RatFunc {
            num: vec![FqElem::ONE],
            den: vec![FqElem::ONE],
        }
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let f = &self.base;
        if a.num.is_empty() {
            return b.clone();
        }
        if b.num.is_empty() {
            return a.clone();
        }
        if a.den == b.den {
            return self.make(&poly::add(f, &a.num, &b.num), &a.den);
        }
        let num = poly::add(f, &poly::mul(f, &a.num, &b.den), &poly::mul(f, &b.num, &a.den));
        self.make(&num, &poly::mul(f, &a.den, &b.den))
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        RatFunc {
            num: poly::neg(&self.base, &a.num),
            den: a.den.clone(),
        }
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        let f = &self.base;
        if a.num.is_empty() || b.num.is_empty() {
            return self.zero();
        }
        self.make(&poly::mul(f, &a.num, &b.num), &poly::mul(f, &a.den, &b.den))
    }
    fn inv(&self, a: &RatFunc) -> Option<RatFunc> {
        if a.num.is_empty() {
            return None;
        }
        Some(self.make(&a.den, &a.num))
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.num.is_empty()
    }
    fn from_int(&self, n: i64) -> RatFunc {
        self.constant(self.base.ctx.from_int(n))
    }
}

/// Square root of a polynomial over `F_{q^2}`, by matching coefficients from the top.
pub fn poly_sqrt(ctx: &FieldCtx, p: &[FqElem]) -> Option<Poly> {
    let f = Fq2 { ctx };
    if p.is_empty() {
        return Some(Vec::new());
    }
    let n = p.len() - 1;
    if !n.is_multiple_of(2) {
        return None;
    }
    let h = n / 2;
    let lead = ctx.sqrt(p[n])?;
    let two_lead_inv = ctx.inv(ctx.add(lead, lead))?;
    let mut r = vec![FqElem::ZERO; h + 1];
    r[h] = lead;
    for k in 1..=h {
        // coefficient of t^(n-k) in r^2 must match p
        let mut acc = FqElem::ZERO;
        for i in 1..k {
            acc = ctx.add(acc, ctx.mul(r[h - i], r[h - (k - i)]));
        }
        r[h - k] = ctx.mul(ctx.sub(p[n - k], acc), two_lead_inv);
    }
    (poly::mul(&f, &r, &r) == p).then_some(r)
}

fn format_poly(ctx: &FieldCtx, p: &[FqElem]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, &c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mut coef = ctx.format_elem(c);
        let negative = coef.starts_with('-');
        if negative {
            coef.remove(0);
        }
        let mono = match i {
            0 => String::new(),
            1 => "t".into(),
            _ => format!("t^{i}"),
        };
        let term = match (coef.as_str(), i) {
            (_, 0) => coef.clone(),
            ("1", _) => mono,
            _ => format!("{coef}*{mono}"),
        };
        if out.is_empty() {
            out = if negative { format!("-{term}") } else { term };
        } else {
            out.push_str(if negative { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    out
}

/// `F[s]/(m(s))` for a monic `m`; elements are coefficient vectors of length `deg m`.
#[derive(Clone, Debug)]
pub struct SimpleExt<F: Field> {
    pub base: F,
    modulus: Vec<F::Elem>,
}

impl<F: Field> SimpleExt<F> {
    pub fn new(base: F, modulus: Vec<F::Elem>) -> Self {
        assert!(modulus.len() >= 2, "extension modulus must have positive degree");
        assert!(
            *modulus.last().unwrap() == base.one(),
            "extension modulus must be monic"
        );
        SimpleExt { base, modulus }
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[F::Elem] {
        &self.modulus
    }

    fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let (_, mut r) = poly::divrem(&self.base, v, &self.modulus);
        r.resize(self.degree(), self.base.zero());
        r
    }

    pub fn embed(&self, x: &F::Elem) -> Vec<F::Elem> {
        self.reduce(std::slice::from_ref(x))
    }

    /// The class of `s`.
    pub fn generator(&self) -> Vec<F::Elem> {
        self.reduce(&[self.base.zero(), self.base.one()])
    }

    /// The base-field value of `x`, if it has no component along `s, s^2, ...`.
    pub fn descend(&self, x: &[F::Elem]) -> Option<F::Elem> {
        x[1..].iter().all(|c| self.base.is_zero(c)).then(|| x[0].clone())
    }
}

impl<F: Field> Field for SimpleExt<F> {
    type Elem = Vec<F::Elem>;

    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.degree()]
    }
    fn one(&self) -> Self::Elem {
        self.embed(&self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut a = a.clone();
        let mut b = b.clone();
        poly::trim(&self.base, &mut a);
        poly::trim(&self.base, &mut b);
        self.reduce(&poly::mul(&self.base, &a, &b))
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let mut a = a.clone();
        poly::trim(&self.base, &mut a);
        if a.is_empty() {
            return None;
        }
        poly::inv_mod(&self.base, &a, &self.modulus).map(|v| self.reduce(&v))
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }
    fn from_int(&self, n: i64) -> Self::Elem {
        self.embed(&self.base.from_int(n))
    }
}

/// A point of `E_d` over some extension of `F_{q^2}(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvePoint<E> {
    Infinity,
    Affine { x: E, y: E },
}

/// `y^2 + a1 xy + a3 y = x^3` with `a1 = 1`, `a3 = -t^d`, over a field `F`.
#[derive(Clone, Debug)]
pub struct Curve<F: Field> {
    pub field: F,
    /// `t^d` in `F`.
    pub td: F::Elem,
}

impl<F: Field> Curve<F> {
    pub fn new(field: F, td: F::Elem) -> Self {
        Curve { field, td }
    }

    pub fn contains(&self, p: &CurvePoint<F::Elem>) -> bool {
        match p {
            CurvePoint::Infinity => true,
            CurvePoint::Affine { x, y } => self.field.is_zero(&self.equation(x, y)),
        }
    }

    /// `y^2 + xy - t^d y - x^3`.
    pub fn equation(&self, x: &F::Elem, y: &F::Elem) -> F::Elem {
        let f = &self.field;
        let lhs = f.add(&f.mul(y, y), &f.mul(x, y));
        let lhs = f.sub(&lhs, &f.mul(&self.td, y));
        f.sub(&lhs, &f.mul(&f.mul(x, x), x))
    }

    /// `-(x, y) = (x, -y - x + t^d)`.
    pub fn neg(&self, p: &CurvePoint<F::Elem>) -> CurvePoint<F::Elem> {
        match p {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => {
                let f = &self.field;
                CurvePoint::Affine {
                    x: x.clone(),
                    y: f.add(&f.sub(&f.neg(y), x), &self.td),
                }
            }
        }
    }

    pub fn add(&self, p: &CurvePoint<F::Elem>, q: &CurvePoint<F::Elem>) -> Result<CurvePoint<F::Elem>> {
        if !self.contains(p) || !self.contains(q) {
            return Err(Error::NotOnCurve);
        }
        Ok(self.add_unchecked(p, q))
    }

    fn add_unchecked(&self, p: &CurvePoint<F::Elem>, q: &CurvePoint<F::Elem>) -> CurvePoint<F::Elem> {
        let f = &self.field;
        let (x1, y1, x2, y2) = match (p, q) {
            (CurvePoint::Infinity, _) => return q.clone(),
            (_, CurvePoint::Infinity) => return p.clone(),
            (CurvePoint::Affine { x: x1, y: y1 }, CurvePoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 != x2 {
            let inv = f.inv(&f.sub(x2, x1)).expect("x2 - x1 is a unit");
            f.mul(&f.sub(y2, y1), &inv)
        } else {
            // same x: either q = -p or q = p
            let denom = f.sub(&f.add(&f.add(y1, y1), x1), &self.td);
            if y1 != y2 || f.is_zero(&denom) {
                return CurvePoint::Infinity;
            }
            let three_x2 = f.mul(&f.from_int(3), &f.mul(x1, x1));
            f.mul(&f.sub(&three_x2, y1), &f.inv(&denom).expect("denominator is a unit"))
        };
        let nu = f.sub(y1, &f.mul(&lambda, x1));
        let x3 = f.sub(&f.sub(&f.add(&f.mul(&lambda, &lambda), &lambda), x1), x2);
        let y3 = f.add(&f.sub(&f.neg(&f.mul(&f.add(&lambda, &f.one()), &x3)), &nu), &self.td);
        CurvePoint::Affine { x: x3, y: y3 }
    }

    pub fn sum(&self, points: &[CurvePoint<F::Elem>]) -> Result<CurvePoint<F::Elem>> {
        points.iter().try_fold(CurvePoint::Infinity, |acc, p| self.add(&acc, p))
    }
}

/// `E_d` over `F_{q^2}(t)`.
pub fn base_curve(ctx: &FieldCtx) -> Curve<RatFuncField<'_>> {
    let r = RatFuncField::new(ctx);
    let td = r.pow(&r.t(), ctx.d());
    Curve::new(r, td)
}

/// A linear form `c0 + c1 s` in the line parameter.
pub type Linear = [FqElem; 2];

/// A parametrized line `s ↦ [x0(s) : x1(s) : x2(s) : 1]` with linear coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parametrization {
    pub x: [Linear; 3],
}

impl Parametrization {
    /// `[s : αs + β : -α - βs : 1]`.
    pub fn of_line(ctx: &FieldCtx, line: &Line) -> Self {
        let (a, b) = (line.alpha(), line.beta());
        Parametrization {
            x: [[FqElem::ZERO, FqElem::ONE], [b, a], [ctx.neg(a), ctx.neg(b)]],
        }
    }

    /// Multiplies coordinate `j` by `t_j` for a torus element `[t0 : t1 : t2 : 1]`.
    pub fn scaled(&self, ctx: &FieldCtx, t: [FqElem; 3]) -> Self {
        let mut x = self.x;
        for (j, tj) in t.iter().enumerate() {
            x[j] = [ctx.mul(x[j][0], *tj), ctx.mul(x[j][1], *tj)];
        }
        Parametrization { x }
    }

    /// `x0 x1 x2` as a polynomial in `s`.
    pub fn product(&self, ctx: &FieldCtx) -> Poly {
        let f = Fq2 { ctx };
        let p = poly::mul(&f, &self.x[0], &self.x[1]);
        poly::mul(&f, &p, &self.x[2])
    }
}

/// The monic cubic `m(s)` over `F_{q^2}(t)` whose roots `s` satisfy `x0 x1 x2 = t`.
pub fn cubic_modulus(r: &RatFuncField<'_>, param: &Parametrization) -> Result<Vec<RatFunc>> {
    let ctx = r.ctx();
    let c = param.product(ctx);
    if c.len() != 4 {
        return Err(Error::InvalidLine(
            "x0 x1 x2 must have degree 3 in the parameter".into(),
        ));
    }
    let lead_inv = ctx.inv(c[3]).expect("nonzero leading coefficient");
    let mut m: Vec<RatFunc> = c.iter().map(|&ci| r.constant(ctx.mul(ci, lead_inv))).collect();
    m[0] = r.sub(&m[0], &r.poly(&[FqElem::ZERO, lead_inv]));
    Ok(m)
}

/// Discriminant of a monic cubic `s^3 + A s^2 + B s + C`.
pub fn cubic_discriminant<F: Field>(f: &F, m: &[F::Elem]) -> F::Elem {
    let (a, b, c) = (&m[2], &m[1], &m[0]);
    let n = |k: i64| f.from_int(k);
    let ab = f.mul(a, b);
    let t1 = f.mul(&ab, &ab);
    let t2 = f.mul(&n(-4), &f.pow(b, 3));
    let t3 = f.mul(&n(-4), &f.mul(&f.pow(a, 3), c));
    let t4 = f.mul(&n(-27), &f.mul(c, c));
    let t5 = f.mul(&n(18), &f.mul(&ab, c));
    [t2, t3, t4, t5].iter().fold(t1, |acc, t| f.add(&acc, t))
}

/// Whether the monic cubic `m` (coefficients in `F_{q^2}[t]`) has no root in
/// `F_{q^2}(t)`. A root is a polynomial dividing `m(0)`, so it is a constant
/// multiple of a monic divisor of `m(0)`; `m(0)` has degree at most 1 here.
pub fn cubic_is_irreducible(r: &RatFuncField<'_>, m: &[RatFunc]) -> Result<bool> {
    let ctx = r.ctx();
    let c0 = &m[0];
    if !m.iter().all(|c| c.is_polynomial()) || c0.num.len() > 2 {
        return Err(Error::Precondition(
            "expected a cubic with constant term of degree ≤ 1 in t".into(),
        ));
    }
    let mut divisors = vec![r.one()];
    if c0.num.len() == 2 {
        divisors.push(r.poly(&poly::monic(&r.base, &c0.num)));
    }
    for dvs in &divisors {
        for k in ctx.elements() {
            let root = r.mul(dvs, &r.constant(k));
            if r.is_zero(&poly::eval(r, m, &root)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn conjugate_point<F: Field>(
    f: &F,
    param: &Parametrization,
    root: &F::Elem,
    d: u64,
    lift: impl Fn(FqElem) -> F::Elem,
) -> CurvePoint<F::Elem> {
    let lin = |l: &Linear| f.add(&lift(l[0]), &f.mul(&lift(l[1]), root));
    let x0d = f.pow(&lin(&param.x[0]), d);
    let x2d = f.pow(&lin(&param.x[2]), d);
    let x = f.neg(&f.mul(&x0d, &x2d));
    let y = f.neg(&f.mul(&f.mul(&x0d, &x0d), &x2d));
    CurvePoint::Affine { x, y }
}

/// Where the conjugate points were computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SplittingField {
    /// The discriminant is a square: the cubic splits over `F_{q^2}(t)[s]/(m)`.
    Cubic,
    /// A further quadratic extension was needed.
    Sextic,
}

/// Output of [`construct_point`] together with facts checked along the way.
#[derive(Clone, Debug)]
pub struct ConstructedPoint {
    pub point: CurvePoint<RatFunc>,
    pub splitting: SplittingField,
    pub modulus: Vec<RatFunc>,
    pub discriminant: RatFunc,
}

fn descend2<F: Field>(k2: &SimpleExt<SimpleExt<F>>, v: &[Vec<F::Elem>]) -> Option<F::Elem> {
    k2.base.descend(&k2.descend(v)?)
}

fn check_conjugates<F: Field>(curve: &Curve<F>, pts: &[CurvePoint<F::Elem>]) -> Result<()> {
    if pts.iter().all(|p| curve.contains(p)) {
        Ok(())
    } else {
        Err(Error::Internal("a conjugate point is off the curve".into()))
    }
}

/// Sums the conjugates of the point defined by `param` over the splitting
/// field of its cubic and descends the result to `F_{q^2}(t)`.
pub fn construct_point_from_param(ctx: &FieldCtx, param: &Parametrization) -> Result<ConstructedPoint> {
    let r = RatFuncField::new(ctx);
    let d = ctx.d();
    let m = cubic_modulus(&r, param)?;
    if !cubic_is_irreducible(&r, &m)? {
        return Err(Error::InvalidLine("the cubic m(s) is reducible over F_{q^2}(t)".into()));
    }
    let disc = cubic_discriminant(&r, &m);
    let k1 = SimpleExt::new(r, m.clone());
    let s = k1.generator();
    let a_plus_s = k1.add(&k1.embed(&m[2]), &s);
    // m(X) = (X - s)(X^2 + (A + s)X + (B + As + s^2))
    let cofactor_const = k1.add(&k1.embed(&m[1]), &k1.mul(&a_plus_s, &s));
    let disc2 = k1.sub(&k1.mul(&a_plus_s, &a_plus_s), &k1.mul(&k1.from_int(4), &cofactor_const));
    let half = ctx.inv(ctx.from_int(2)).expect("p is odd");

    let (point, splitting) = if let Some(delta) = r.sqrt(&disc) {
        // sqrt(disc2) = δ / m'(s)
        let mp = poly::eval(&k1, &poly::derivative(&k1, &k1_coeffs(&k1, &m)), &s);
        let root = k1.mul(
            &k1.embed(&delta),
            &k1.inv(&mp).ok_or_else(|| Error::Internal("m'(s) = 0".into()))?,
        );
        if k1.mul(&root, &root) != disc2 {
            return Err(Error::Internal(
                "δ/m'(s) is not a square root of the cofactor discriminant".into(),
            ));
        }
        let h = k1.embed(&r.constant(half));
        let r2 = k1.mul(&k1.sub(&root, &a_plus_s), &h);
        let r3 = k1.mul(&k1.sub(&k1.neg(&root), &a_plus_s), &h);
        let curve = Curve::new(k1.clone(), k1.embed(&r.pow(&r.t(), d)));
        let lift = |c: FqElem| k1.embed(&r.constant(c));
        let pts: Vec<_> = [s.clone(), r2, r3]
            .iter()
            .map(|x| conjugate_point(&k1, param, x, d, lift))
            .collect();
        check_conjugates(&curve, &pts)?;
        let total = curve.sum(&pts)?;
        let point = match total {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: k1
                    .descend(&x)
                    .ok_or_else(|| Error::Internal("x does not descend".into()))?,
                y: k1
                    .descend(&y)
                    .ok_or_else(|| Error::Internal("y does not descend".into()))?,
            },
        };
        (point, SplittingField::Cubic)
    } else {
        let k2 = SimpleExt::new(k1.clone(), vec![k1.neg(&disc2), k1.zero(), k1.one()]);
        let w = k2.generator();
        let h = k2.embed(&k1.embed(&r.constant(half)));
        let aps = k2.embed(&a_plus_s);
        let r1 = k2.embed(&s);
        let r2 = k2.mul(&k2.sub(&w, &aps), &h);
        let r3 = k2.mul(&k2.sub(&k2.neg(&w), &aps), &h);
        let curve = Curve::new(k2.clone(), k2.embed(&k1.embed(&r.pow(&r.t(), d))));
        let lift = |c: FqElem| k2.embed(&k1.embed(&r.constant(c)));
        let pts: Vec<_> = [r1, r2, r3]
            .iter()
            .map(|x| conjugate_point(&k2, param, x, d, lift))
            .collect();
        check_conjugates(&curve, &pts)?;
        let total = curve.sum(&pts)?;
        let point = match total {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { x, y } => CurvePoint::Affine {
                x: descend2(&k2, &x).ok_or_else(|| Error::Internal("x does not descend".into()))?,
                y: descend2(&k2, &y).ok_or_else(|| Error::Internal("y does not descend".into()))?,
            },
        };
        (point, SplittingField::Sextic)
    };

    if !base_curve(ctx).contains(&point) {
        return Err(Error::Internal("descended point is off the curve".into()));
    }
    Ok(ConstructedPoint {
        point,
        splitting,
        modulus: m,
        discriminant: disc,
    })
}

fn k1_coeffs<'a>(k1: &SimpleExt<RatFuncField<'a>>, m: &[RatFunc]) -> Vec<Vec<RatFunc>> {
    m.iter().map(|c| k1.embed(c)).collect()
}

/// `φ_*(L)`.
pub fn construct_point(ctx: &FieldCtx, line: &Line) -> Result<ConstructedPoint> {
    construct_point_from_param(ctx, &Parametrization::of_line(ctx, line))
}

/// The image of `P` under `t ↦ ζt`.
pub fn mu_d_translate(ctx: &FieldCtx, p: &CurvePoint<RatFunc>, zeta: FqElem) -> Result<CurvePoint<RatFunc>> {
    if zeta.is_zero() || !ctx.in_mu_d(zeta)? {
        return Err(Error::NotInMuD);
    }
    let r = RatFuncField::new(ctx);
    Ok(match p {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine { x, y } => CurvePoint::Affine {
            x: r.scale_variable(x, zeta),
            y: r.scale_variable(y, zeta),
        },
    })
}

/// JSON form of a rational function: coefficient coordinate vectors, low degree first.
#[derive(Clone, Debug, Serialize)]
pub struct RatFuncJson {
    pub num: Vec<Vec<u64>>,
    pub den: Vec<Vec<u64>>,
}

impl RatFuncJson {
    pub fn new(ctx: &FieldCtx, r: &RatFunc) -> Self {
        let conv = |p: &[FqElem]| p.iter().map(|&c| ctx.coeffs(c)).collect();
        RatFuncJson {
            num: conv(&r.num),
            den: conv(&r.den),
        }
    }
}

/// JSON form of a point; both coordinates absent for the point at infinity.
#[derive(Clone, Debug, Serialize)]
pub struct PointJson {
    pub infinity: bool,
    pub x: Option<RatFuncJson>,
    pub y: Option<RatFuncJson>,
}

impl PointJson {
    pub fn new(ctx: &FieldCtx, p: &CurvePoint<RatFunc>) -> Self {
        match p {
            CurvePoint::Infinity => PointJson {
                infinity: true,
                x: None,
                y: None,
            },
            CurvePoint::Affine { x, y } => PointJson {
                infinity: false,
                x: Some(RatFuncJson::new(ctx, x)),
                y: Some(RatFuncJson::new(ctx, y)),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    #[test]
    fn ratfunc_canonical_form() {
        let f = make_field(7, 1).unwrap();
        let r = RatFuncField::new(&f);
        // (t^2 - 1)/(2t - 2) = (t + 1)/2
        let x = r.from_signed(&[-1, 0, 1], &[-2, 2]);
        assert_eq!(x, r.from_signed(&[1, 1], &[2]));
        assert_eq!(x.den, vec![FqElem::ONE]);
        let y = r.from_signed(&[3], &[0, 1]);
        let sum = r.add(&x, &y);
        assert_eq!(r.sub(&sum, &y), x);
        assert_eq!(r.mul(&y, &r.inv(&y).unwrap()), r.one());
        assert!(r.inv(&r.zero()).is_none());
    }

    #[test]
    fn poly_sqrt_examples() {
        let f = make_field(7, 1).unwrap();
        let r = RatFuncField::new(&f);
        let p = r.from_signed(&[1, 2, 3], &[1]);
        let sq = r.mul(&p, &p);
        let root = poly_sqrt(&f, &sq.num).unwrap();
        assert!(root == p.num || root == poly::neg(&r.base, &p.num));
        assert!(poly_sqrt(&f, &r.t().num).is_none());
        assert!(r.sqrt(&r.from_signed(&[0, 0, 3], &[1])).is_some()); // 3 is a square in F_49
    }

    #[test]
    fn extension_inverse() {
        let f = make_field(5, 1).unwrap();
        let r = RatFuncField::new(&f);
        let line = Line::all(&f)[0];
        let m = cubic_modulus(&r, &Parametrization::of_line(&f, &line)).unwrap();
        let k1 = SimpleExt::new(r, m);
        let s = k1.generator();
        let x = k1.add(&s, &k1.mul(&s, &s));
        let xi = k1.inv(&x).unwrap();
        assert_eq!(k1.mul(&x, &xi), k1.one());
    }

    #[test]
    fn group_law_identities() {
        let f = make_field(7, 1).unwrap();
        let curve = base_curve(&f);
        let b = f.from_coeffs(&[0, 2]).unwrap();
        let line = Line::new(&f, f.from_int(3), b).unwrap();
        let p = construct_point(&f, &line).unwrap().point;
        assert_eq!(curve.add(&p, &CurvePoint::Infinity).unwrap(), p);
        assert_eq!(curve.add(&p, &curve.neg(&p)).unwrap(), CurvePoint::Infinity);
        let g = f.mu_d_generator();
        let q = mu_d_translate(&f, &p, g).unwrap();
        let s = mu_d_translate(&f, &p, f.pow(g, 3)).unwrap();
        let left = curve.add(&curve.add(&p, &q).unwrap(), &s).unwrap();
        let right = curve.add(&p, &curve.add(&q, &s).unwrap()).unwrap();
        assert_eq!(left, right);
        assert!(curve.contains(&left));
        let two_p = curve.add(&p, &p).unwrap();
        assert_eq!(curve.add(&two_p, &curve.neg(&p)).unwrap(), p);
        let bad = CurvePoint::Affine {
            x: curve.field.one(),
            y: curve.field.one(),
        };
        assert_eq!(curve.add(&p, &bad), Err(Error::NotOnCurve));
    }

    #[test]
    fn translates_stay_on_curve() {
        let f = make_field(7, 1).unwrap();
        let curve = base_curve(&f);
        let line = Line::all(&f)[0];
        let p = construct_point(&f, &line).unwrap().point;
        let g = f.mu_d_generator();
        for e in 0..f.d() {
            assert!(curve.contains(&mu_d_translate(&f, &p, f.pow(g, e)).unwrap()));
        }
        assert_eq!(mu_d_translate(&f, &p, FqElem::ONE).unwrap(), p);
        assert_eq!(
            mu_d_translate(&f, &CurvePoint::Infinity, g).unwrap(),
            CurvePoint::Infinity
        );
        assert_eq!(mu_d_translate(&f, &p, f.from_int(3)), Err(Error::NotInMuD));
    }

    #[test]
    fn vieta_on_the_cubic() {
        let f = make_field(7, 1).unwrap();
        let r = RatFuncField::new(&f);
        for line in Line::all(&f) {
            let param = Parametrization::of_line(&f, &line);
            let m = cubic_modulus(&r, &param).unwrap();
            assert!(cubic_is_irreducible(&r, &m).unwrap());
            // m(0) = -t/lead(x0 x1 x2), so the root product is t/lead
            let lead = param.product(&f)[3];
            assert_eq!(r.neg(&m[0]), r.poly(&[FqElem::ZERO, f.inv(lead).unwrap()]));
        }
    }

    #[test]
    fn reducible_cubic_detected() {
        let f = make_field(7, 1).unwrap();
        let r = RatFuncField::new(&f);
        // s^3 - 1 has the root 1
        let m = vec![r.from_int(-1), r.zero(), r.zero(), r.one()];
        assert!(!cubic_is_irreducible(&r, &m).unwrap());
    }

    #[test]
    fn discriminant_of_split_cubic() {
        let f = make_field(7, 1).unwrap();
        let r = RatFuncField::new(&f);
        // (s - 1)(s - 2)(s - 4) = s^3 - 7s^2 + 14s - 8: discriminant ((1-2)(1-4)(2-4))^2 = 36
        let m = vec![r.from_int(-8), r.from_int(14), r.from_int(-7), r.one()];
        assert_eq!(cubic_discriminant(&r, &m), r.from_int(36));
    }

    #[test]
    fn formatting() {
        let f = make_field(7, 1).unwrap();
        let r = RatFuncField::new(&f);
        let x = r.from_signed(&[2, 0, -3], &[1, 1]);
        assert_eq!(r.format(&x), "(-3*t^2 + 2)/(t + 1)");
        assert_eq!(r.format(&r.zero()), "0");
    }

    /// The printed example point at `q = 7`, coefficients highest degree first.
    pub(crate) fn example_point(r: &RatFuncField<'_>) -> CurvePoint<RatFunc> {
        let rev = |v: &[i64]| v.iter().rev().copied().collect::<Vec<_>>();
        let px_num = [-2, -2, 3, 1, 0, 1, 0, -1, 0, 2, -1, -3, 3, 2, 2];
        let px_den = [-2, 2, 3, 3, 1, -3, -2, -1, -1];
        let py_num = [1, 1, -1, 2, 0, -1, 2, 2, -3, 0, 2, 1, 2, -2, -1, 1, 0, 2, -2, 1, 0, -1];
        let py_den = [1, 2, -1, 2, 3, 0, 1, 0, -1, 2, -1, -2, 1];
        let x = r.from_signed(&rev(&px_num), &rev(&px_den));
        let y = r.neg(&r.from_signed(&rev(&py_num), &rev(&py_den)));
        CurvePoint::Affine { x, y }
    }

    #[test]
    fn reproduces_printed_example() {
        let f = make_field(7, 1).unwrap();
        let r = RatFuncField::new(&f);
        let expected = example_point(&r);
        assert!(base_curve(&f).contains(&expected));
        for b in [f.from_coeffs(&[0, 2]).unwrap(), f.from_coeffs(&[0, 5]).unwrap()] {
            let line = Line::new(&f, f.from_int(3), b).unwrap();
            assert_eq!(construct_point(&f, &line).unwrap().point, expected);
        }
        if let CurvePoint::Affine { x, y } = expected {
            assert_eq!((x.num.len() - 1, x.den.len() - 1), (14, 8));
            assert_eq!((y.num.len() - 1, y.den.len() - 1), (21, 12));
        }
    }

    #[test]
    fn te_translates_of_the_line_give_the_same_point() {
        let f = make_field(5, 1).unwrap();
        let g = f.mu_d_generator();
        let d = f.d();
        for line in Line::all(&f) {
            let param = Parametrization::of_line(&f, &line);
            let p = construct_point_from_param(&f, &param).unwrap().point;
            for (e0, e1) in [(1, 2), (3, 5), (0, 4)] {
                let e2 = (2 * d - e0 - e1) % d;
                let t = [f.pow(g, e0), f.pow(g, e1), f.pow(g, e2)];
                let moved = construct_point_from_param(&f, &param.scaled(&f, t)).unwrap().point;
                assert_eq!(moved, p);
            }
        }
    }
}
