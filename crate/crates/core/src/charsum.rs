//! Character sums `S_{c,î} = Σ_{x ∈ F_{q^2}} χ(x^{i0} (x+1)^{i1} (x+c)^{i2})`
//! and the identities, orbits and surveys built on them.

use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cyc::CycElt;
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FqElem};

/// A character of `T = μ_d^4/μ_d` written as `(i0, i1, i2, i3)` mod `d` with
/// `Σ i_j ≡ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentTuple {
    entries: [u64; 4],
    d: u64,
}

impl ExponentTuple {
    pub fn new(i0: u64, i1: u64, i2: u64, i3: u64, d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidTuple(format!("modulus d = {d} is too small")));
        }
        let entries = [i0 % d, i1 % d, i2 % d, i3 % d];
        if entries.iter().sum::<u64>() % d != 0 {
            return Err(Error::InvalidTuple(format!(
                "({i0}, {i1}, {i2}, {i3}) does not sum to 0 mod {d}"
            )));
        }
        Ok(ExponentTuple { entries, d })
    }

    /// Completes `(i0, i1, i2)` with `i3 = -(i0 + i1 + i2)`.
    pub fn from_three(i0: u64, i1: u64, i2: u64, d: u64) -> Self {
        let s = (i0 % d + i1 % d + i2 % d) % d;
        ExponentTuple {
            entries: [i0 % d, i1 % d, i2 % d, (d - s) % d],
            d,
        }
    }

    /// `(i, i, i, d - 3i)`.
    pub fn w_type(i: u64, d: u64) -> Self {
        Self::from_three(i, i, i, d)
    }

    pub fn trivial(d: u64) -> Self {
        ExponentTuple { entries: [0; 4], d }
    }

    pub fn entries(&self) -> [u64; 4] {
        self.entries
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_trivial(&self) -> bool {
        self.entries == [0; 4]
    }

    pub fn all_nonzero(&self) -> bool {
        self.entries.iter().all(|&i| i != 0)
    }

    pub fn is_w_type(&self) -> bool {
        self.entries[0] == self.entries[1] && self.entries[1] == self.entries[2]
    }

    /// The common entry `i` of a w-type tuple.
    pub fn w_index(&self) -> Option<u64> {
        self.is_w_type().then_some(self.entries[0])
    }

    /// `k · î`.
    pub fn scale(&self, k: u64) -> Self {
        let e = self.entries;
        let d = self.d;
        ExponentTuple {
            entries: e.map(|i| (i * (k % d)) % d),
            d,
        }
    }
}

impl fmt::Display for ExponentTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, e] = self.entries;
        write!(f, "({a},{b},{c},{e})")
    }
}

impl Serialize for ExponentTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

/// One evaluated sum `S_{c,î}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SumRecord {
    pub c: FqElem,
    pub tuple: ExponentTuple,
    pub value: CycElt,
    pub as_integer: Option<i64>,
}

impl SumRecord {
    pub fn hits_upper(&self, q: u64) -> bool {
        self.as_integer == Some(2 * q as i64)
    }

    pub fn hits_lower(&self, q: u64) -> bool {
        self.as_integer == Some(-2 * q as i64)
    }
}

/// `Σ_{x ∈ F_{q^2}} χ(Π_j (x + r_j)^{e_j})` for arbitrary shifts `r_j`.
///
/// Factors whose exponent is `0 mod d` are dropped; any other vanishing factor
/// makes the term `χ(0) = 0`. Uses `χ(x + r) = χ(r) χ(x/r + 1)` so that each
/// factor costs one Zech-log lookup.
pub fn character_sum(ctx: &FieldCtx, factors: &[(FqElem, u64)]) -> CycElt {
    let d = ctx.d();
    let n = ctx.group_order();
    let active: Vec<(Option<u64>, u64)> = factors
        .iter()
        .filter(|(_, e)| e % d != 0)
        .map(|&(r, e)| (ctx.dlog(r), e % d))
        .collect();

    let mut counts = vec![0i64; d as usize];
    // x = 0
    let at_zero: Option<u64> = active
        .iter()
        .try_fold(0u64, |acc, &(lr, e)| lr.map(|l| acc + (l % d) * e));
    if let Some(t) = at_zero {
        counts[(t % d) as usize] += 1;
    }
    // x = g^m
    'outer: for m in 0..n {
        let mut total = 0u64;
        for &(lr, e) in &active {
            let v = match lr {
                None => m % d,
                Some(l) => match ctx.zech_log((m + n - l) % n) {
                    None => continue 'outer,
                    Some(z) => (l + z) % d,
                },
            };
            total += v * e;
        }
        counts[(total % d) as usize] += 1;
    }
    CycElt::from_counts(counts)
}

fn sum_value(ctx: &FieldCtx, c: FqElem, t: &ExponentTuple) -> CycElt {
    let [i0, i1, i2, _] = t.entries();
    character_sum(ctx, &[(FqElem::ZERO, i0), (FqElem::ONE, i1), (c, i2)])
}

fn check_tuple(ctx: &FieldCtx, t: &ExponentTuple) -> Result<()> {
    if t.d() != ctx.d() {
        return Err(Error::InvalidTuple(format!(
            "tuple is mod {}, field has d = {}",
            t.d(),
            ctx.d()
        )));
    }
    Ok(())
}

/// `S_{c,î}` for `c ∈ F_q`.
pub fn sum_s(ctx: &FieldCtx, c: FqElem, t: &ExponentTuple) -> Result<SumRecord> {
    if !ctx.is_in_fq(c) {
        return Err(Error::NotInSubfield);
    }
    check_tuple(ctx, t)?;
    let value = sum_value(ctx, c, t);
    let as_integer = value.as_integer();
    Ok(SumRecord {
        c,
        tuple: *t,
        value,
        as_integer,
    })
}

/// Outcome of checking `Σ_x χ(f(x))` over separable monic quadratics over `F_q`.
#[derive(Clone, Debug, Serialize)]
pub struct QuadraticReport {
    pub q: u64,
    pub order: u64,
    pub expected: i64,
    pub split_checked: usize,
    pub irreducible_checked: usize,
    pub passed: usize,
    pub failed: usize,
}

impl QuadraticReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.passed == self.split_checked + self.irreducible_checked
    }
}

fn check_order(ctx: &FieldCtx, order: u64, min: u64) -> Result<u64> {
    let d = ctx.d();
    if order < min || !d.is_multiple_of(order) {
        return Err(Error::InvalidOrder { order, d });
    }
    Ok(d / order)
}

/// Checks the quadratic identity for the character `χ^(d/order)` of exact
/// order `order`: every separable monic `f ∈ F_q[x]` of degree 2 gives `q`
/// (order > 2) or `-1` (order 2).
pub fn quadratic_identity_check(ctx: &FieldCtx, order: u64) -> Result<QuadraticReport> {
    let k = check_order(ctx, order, 2)?;
    let expected = if order > 2 { ctx.q() as i64 } else { -1 };
    let fq = ctx.fq_elements();
    let two_inv = ctx.inv(ctx.from_int(2)).expect("p >= 5");
    let four = ctx.from_int(4);

    let polys: Vec<(FqElem, FqElem)> = fq.iter().flat_map(|&u| fq.iter().map(move |&v| (u, v))).collect();
    let results: Vec<(bool, bool)> = polys
        .par_iter()
        .filter_map(|&(u, v)| {
            let disc = ctx.sub(ctx.mul(u, u), ctx.mul(four, v));
            if disc.is_zero() {
                return None;
            }
            let split = ctx.is_square_in_fq(disc).expect("disc lies in F_q");
            let s = ctx.sqrt(disc).expect("F_q elements are squares in F_{q^2}");
            // x^2 + ux + v = (x - r1)(x - r2)
            let r1 = ctx.mul(ctx.sub(s, u), two_inv);
            let r2 = ctx.mul(ctx.sub(ctx.neg(s), u), two_inv);
            let value = character_sum(ctx, &[(ctx.neg(r1), k), (ctx.neg(r2), k)]);
            Some((split, value.equals_integer(expected)))
        })
        .collect();

    let split_checked = results.iter().filter(|r| r.0).count();
    let passed = results.iter().filter(|r| r.1).count();
    Ok(QuadraticReport {
        q: ctx.q(),
        order,
        expected,
        split_checked,
        irreducible_checked: results.len() - split_checked,
        passed,
        failed: results.len() - passed,
    })
}

/// `Σ_{c ∈ F_q} S_{c,î}`.
pub fn sum_over_c(ctx: &FieldCtx, t: &ExponentTuple) -> Result<CycElt> {
    check_tuple(ctx, t)?;
    if !t.all_nonzero() {
        return Err(Error::InvalidTuple(format!("{t} has a zero entry")));
    }
    let d = ctx.d();
    Ok(ctx
        .fq_elements()
        .par_iter()
        .map(|&c| sum_value(ctx, c, t))
        .reduce(|| CycElt::zero(d), |a, b| &a + &b))
}

/// Closed form of `Σ_c S_{c,î}`: `q(q-3)` unless `i0 + i1 ≡ 0`, then `(q-1)^2`.
pub fn sum_over_c_closed_form(q: u64, t: &ExponentTuple) -> i64 {
    let [i0, i1, _, _] = t.entries();
    let q = q as i64;
    if (i0 + i1) % t.d() != 0 {
        q * (q - 3)
    } else {
        (q - 1) * (q - 1)
    }
}

/// Closed forms of the Jacobi-sum endpoints `(S_0, S_1)`.
pub fn endpoint_closed_forms(q: u64, t: &ExponentTuple) -> (i64, i64) {
    let [i0, i1, i2, _] = t.entries();
    let d = t.d();
    let pick = |s: u64| if !s.is_multiple_of(d) { q as i64 } else { -1 };
    (pick(i0 + i2), pick(i1 + i2))
}

/// The images `c, c⁻¹, 1-c, 1-c⁻¹, (1-c)⁻¹, (1-c⁻¹)⁻¹`, in that order.
pub fn orbit_images(ctx: &FieldCtx, c: FqElem) -> Result<[FqElem; 6]> {
    if !ctx.is_in_fq(c) {
        return Err(Error::NotInSubfield);
    }
    if c.is_zero() || c == FqElem::ONE {
        return Err(Error::Precondition("orbit needs c ∉ {0, 1}".into()));
    }
    let inv = |x| ctx.inv(x).expect("nonzero by the c ∉ {0,1} precondition");
    let one_minus = |x| ctx.sub(FqElem::ONE, x);
    let ci = inv(c);
    Ok([
        c,
        ci,
        one_minus(c),
        one_minus(ci),
        inv(one_minus(c)),
        inv(one_minus(ci)),
    ])
}

/// The orbit of `c` under the six-element group generated by `c ↦ c⁻¹` and
/// `c ↦ 1 - c`, deduplicated and sorted by discrete log.
pub fn orbit(ctx: &FieldCtx, c: FqElem) -> Result<Vec<FqElem>> {
    let mut out = orbit_images(ctx, c)?.to_vec();
    out.sort_by_key(|&x| ctx.dlog(x));
    out.dedup();
    Ok(out)
}

/// `c ∈ F_q` is admissible when `c = b^2` for a line datum `(a, b)`;
/// equivalently `c` is a non-square and `c - 1` a nonzero square in `F_q`.
pub fn is_admissible(ctx: &FieldCtx, c: FqElem) -> Result<bool> {
    let cm1 = ctx.sub(c, FqElem::ONE);
    Ok(!c.is_zero() && !ctx.is_square_in_fq(c)? && ctx.is_square_in_fq(cm1)?)
}

/// All admissible values, ascending discrete log.
pub fn admissible_values(ctx: &FieldCtx) -> Vec<FqElem> {
    let mut out: Vec<FqElem> = ctx.find_ab_pairs().iter().map(|&(_, b)| ctx.mul(b, b)).collect();
    out.sort_by_key(|&c| ctx.dlog(c));
    out.dedup();
    out
}

/// Result of sweeping `S_c = Σ χ(x(x+1)(x+c))` over all `c ∈ F_q`.
#[derive(Clone, Debug)]
pub struct Survey {
    pub q: u64,
    pub order: u64,
    pub tuple: ExponentTuple,
    pub values: Vec<SumRecord>,
    /// `c` with `S_c = 2q`.
    pub hits: Vec<FqElem>,
    /// `c` with `S_c = -2q`.
    pub misses_sign: Vec<FqElem>,
}

impl Survey {
    pub fn n(&self) -> u64 {
        self.hits.len() as u64
    }

    /// `N ≤ (3q - 9)/4`.
    pub fn bound_holds(&self) -> bool {
        4 * self.n() as i64 <= 3 * self.q as i64 - 9
    }
}

/// Sweeps `c ∈ F_q` with `χ` of exact order `order`, realized as the base
/// character raised to `d/order`.
pub fn survey_n(ctx: &FieldCtx, order: u64) -> Result<Survey> {
    let k = check_order(ctx, order, 3)?;
    let tuple = ExponentTuple::w_type(k, ctx.d());
    let values: Vec<SumRecord> = ctx
        .fq_elements()
        .par_iter()
        .map(|&c| sum_s(ctx, c, &tuple))
        .collect::<Result<_>>()?;
    let q = ctx.q();
    let hits = values.iter().filter(|r| r.hits_upper(q)).map(|r| r.c).collect();
    let misses_sign = values.iter().filter(|r| r.hits_lower(q)).map(|r| r.c).collect();
    Ok(Survey {
        q,
        order,
        tuple,
        values,
        hits,
        misses_sign,
    })
}

/// `c` is a primitive 6th root of unity.
fn is_primitive_sixth_root(ctx: &FieldCtx, c: FqElem) -> bool {
    ctx.order_of(c) == Some(6)
}

/// Checks `S_{c,î} ≡ 1 mod 3 Z[ζ_d]` for `q ≡ 7 mod 12`, `c` a primitive 6th
/// root of unity and `î = (i,i,i,d-3i)` with `i ≠ 0`.
pub fn mod3_test(ctx: &FieldCtx, c: FqElem, t: &ExponentTuple) -> Result<bool> {
    if ctx.q() % 12 != 7 {
        return Err(Error::Precondition(format!("q = {} is not 7 mod 12", ctx.q())));
    }
    if !is_primitive_sixth_root(ctx, c) {
        return Err(Error::Precondition("c must be a primitive 6th root of unity".into()));
    }
    if !t.is_w_type() || t.is_trivial() {
        return Err(Error::Precondition(format!("{t} is not a nontrivial (i,i,i,*) tuple")));
    }
    Ok(sum_s(ctx, c, t)?.value.congruent_to_integer(1, 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    /// Direct evaluation of the polynomial followed by χ, no Zech tables.
    fn brute_sum(ctx: &FieldCtx, c: FqElem, t: &ExponentTuple) -> CycElt {
        let [i0, i1, i2, _] = t.entries();
        let mut s = CycElt::zero(ctx.d());
        for x in ctx.elements() {
            let f = ctx.mul(
                ctx.mul(ctx.pow(x, i0), ctx.pow(ctx.add(x, FqElem::ONE), i1)),
                ctx.pow(ctx.add(x, c), i2),
            );
            s.accumulate(ctx.chi_exp(f, 1));
        }
        s
    }

    #[test]
    fn tuple_validation() {
        assert!(ExponentTuple::new(1, 1, 1, 5, 8).is_ok());
        assert!(ExponentTuple::new(1, 1, 1, 4, 8).is_err());
        let w = ExponentTuple::w_type(3, 8);
        assert_eq!(w.entries(), [3, 3, 3, 7]);
        assert!(w.is_w_type() && w.all_nonzero());
        assert_eq!(ExponentTuple::from_three(1, 7, 1, 8).entries(), [1, 7, 1, 7]);
        assert!(!ExponentTuple::w_type(4, 12).all_nonzero());
        assert_eq!(w.scale(3).entries(), [1, 1, 1, 5]);
    }

    #[test]
    fn jacobi_endpoint_examples_q7() {
        let f = make_field(7, 1).unwrap();
        let t = ExponentTuple::new(1, 1, 1, 5, 8).unwrap();
        assert!(sum_s(&f, FqElem::ZERO, &t).unwrap().value.equals_integer(7));
        let t = ExponentTuple::new(1, 1, 7, 7, 8).unwrap();
        assert!(sum_s(&f, FqElem::ZERO, &t).unwrap().value.equals_integer(-1));
        for i in 1..8 {
            let t = ExponentTuple::w_type(i, 8);
            let expect = if i == 4 { -1 } else { 7 };
            assert!(
                sum_s(&f, FqElem::ONE, &t).unwrap().value.equals_integer(expect),
                "i = {i}"
            );
        }
    }

    #[test]
    fn sum_rejects_c_outside_fq() {
        let f = make_field(7, 1).unwrap();
        let w = f.from_coeffs(&[0, 1]).unwrap();
        let t = ExponentTuple::w_type(1, 8);
        assert_eq!(sum_s(&f, w, &t).unwrap_err(), Error::NotInSubfield);
        let wrong_d = ExponentTuple::w_type(1, 6);
        assert!(sum_s(&f, FqElem::ONE, &wrong_d).is_err());
    }

    #[test]
    fn fast_sum_matches_brute_force() {
        for (p, k) in [(5, 1), (7, 1), (5, 2)] {
            let f = make_field(p, k).unwrap();
            let d = f.d();
            for c in f.fq_elements() {
                for (i0, i1, i2) in [(1, 1, 1), (1, 2, 3), (d - 1, 1, 2), (2, d - 2, 0), (0, 3, 1)] {
                    let t = ExponentTuple::from_three(i0, i1, i2, d);
                    assert_eq!(sum_s(&f, c, &t).unwrap().value, brute_sum(&f, c, &t), "q={} {t}", f.q());
                }
            }
        }
    }

    #[test]
    fn quadratic_identity_examples() {
        let f = make_field(7, 1).unwrap();
        let r = quadratic_identity_check(&f, 8).unwrap();
        assert!(r.all_passed());
        assert_eq!(r.expected, 7);
        assert_eq!((r.split_checked, r.irreducible_checked), (21, 21));
        let r = quadratic_identity_check(&f, 2).unwrap();
        assert!(r.all_passed());
        assert_eq!(r.expected, -1);
        // the single polynomial x(x+1)
        assert!(character_sum(&f, &[(FqElem::ZERO, 1), (FqElem::ONE, 1)]).equals_integer(7));
        assert!(character_sum(&f, &[(FqElem::ZERO, 4), (FqElem::ONE, 4)]).equals_integer(-1));
        let f = make_field(13, 1).unwrap();
        assert!(character_sum(&f, &[(FqElem::ZERO, 2), (f.from_int(3), 2)]).equals_integer(13));
        assert!(quadratic_identity_check(&f, 3).is_err());
    }

    #[test]
    fn sum_over_c_examples() {
        let f = make_field(7, 1).unwrap();
        let t = ExponentTuple::new(1, 1, 1, 5, 8).unwrap();
        assert!(sum_over_c(&f, &t).unwrap().equals_integer(28));
        let t = ExponentTuple::from_three(1, 7, 2, 8);
        assert!(sum_over_c(&f, &t).unwrap().equals_integer(36));
        let f = make_field(5, 1).unwrap();
        let t = ExponentTuple::new(1, 1, 1, 3, 6).unwrap();
        assert!(sum_over_c(&f, &t).unwrap().equals_integer(10));
        assert!(sum_over_c(&f, &ExponentTuple::from_three(1, 0, 2, 6)).is_err());
    }

    #[test]
    fn orbit_examples() {
        let f = make_field(13, 1).unwrap();
        let o = orbit(&f, f.from_int(2)).unwrap();
        let mut ints: Vec<u64> = o.iter().map(|&x| f.as_prime_field_int(x).unwrap()).collect();
        ints.sort();
        assert_eq!(ints, vec![2, 7, 12]);
        assert_eq!(orbit(&f, f.from_int(5)).unwrap().len(), 6);
        assert!(orbit(&f, FqElem::ONE).is_err());
        assert!(orbit(&f, FqElem::ZERO).is_err());
    }

    #[test]
    fn admissible_examples() {
        let f = make_field(13, 1).unwrap();
        let mut adm: Vec<u64> = admissible_values(&f)
            .iter()
            .map(|&c| f.as_prime_field_int(c).unwrap())
            .collect();
        adm.sort();
        assert_eq!(adm, vec![2, 5, 11]);
        for c in f.fq_elements() {
            assert_eq!(is_admissible(&f, c).unwrap(), admissible_values(&f).contains(&c));
        }
        let f = make_field(5, 1).unwrap();
        assert_eq!(admissible_values(&f).len(), 1);
    }

    #[test]
    fn survey_q7_order4() {
        let f = make_field(7, 1).unwrap();
        let s = survey_n(&f, 4).unwrap();
        assert_eq!(s.n(), 3);
        let ints = |v: &[FqElem]| {
            let mut v: Vec<u64> = v.iter().map(|&c| f.as_prime_field_int(c).unwrap()).collect();
            v.sort();
            v
        };
        assert_eq!(ints(&s.hits), vec![2, 4, 6]);
        assert_eq!(ints(&s.misses_sign), vec![3, 5]);
        assert!(s.bound_holds());
        let s8 = survey_n(&f, 8).unwrap();
        assert!(s8.bound_holds());
        assert!(survey_n(&f, 2).is_err());
        assert!(survey_n(&f, 3).is_err());
    }

    #[test]
    fn mod3_examples_q7() {
        let f = make_field(7, 1).unwrap();
        for c in [3, 5] {
            for i in 1..8 {
                let t = ExponentTuple::w_type(i, 8);
                assert!(mod3_test(&f, f.from_int(c), &t).unwrap());
                assert!(!sum_s(&f, f.from_int(c), &t).unwrap().hits_upper(7));
            }
        }
        assert!(mod3_test(&f, f.from_int(2), &ExponentTuple::w_type(1, 8)).is_err());
        let f = make_field(13, 1).unwrap();
        assert!(mod3_test(&f, f.from_int(4), &ExponentTuple::w_type(1, 14)).is_err());
    }

    #[test]
    fn mod3_fixed_point_identity() {
        for p in [7u64, 19, 31] {
            let f = make_field(p, 1).unwrap();
            for eta in f.fq_elements().into_iter().filter(|&c| is_primitive_sixth_root(&f, c)) {
                let one_plus = f.add(FqElem::ONE, eta);
                let u = f.neg(f.div(eta, one_plus).unwrap());
                let image = f.neg(f.mul(eta, f.add(u, FqElem::ONE)));
                assert_eq!(u, image);
            }
        }
    }
}
