//! Exact arithmetic in `Z[ζ_d]`.
//!
//! A [`CycElt`] keeps the group-ring coefficients of `ζ_d^0, ..., ζ_d^(d-1)`
//! and derives its canonical form, the remainder modulo `Φ_d(x)`, on demand.
//! Galois automorphisms act on the group-ring vector by permuting indices.

use std::collections::HashMap;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::gf::gcd;

/// `Φ_d(x)` with integer coefficients, low degree first.
///
/// Computed from `x^d - 1 = Π_{e | d} Φ_e(x)` by exact division.
pub fn cyclotomic_poly(d: usize) -> Vec<i64> {
    phi(d).as_ref().clone()
}

fn phi(d: usize) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&d) {
        return v.clone();
    }
    assert!(d >= 1, "Φ_0 is undefined");
    // x^d - 1
    let mut num = vec![0i64; d + 1];
    num[0] = -1;
    num[d] = 1;
    for e in (1..d).filter(|e| d.is_multiple_of(*e)) {
        num = exact_div_monic(&num, &phi(e));
    }
    let v = Arc::new(num);
    cache.lock().unwrap().insert(d, v.clone());
    v
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for top in (dn..num.len()).rev() {
        let c = rem[top];
        quot[top - dn] = c;
        if c != 0 {
            for (i, &b) in den.iter().enumerate() {
                rem[top - dn + i] -= c * b;
            }
        }
    }
    debug_assert!(
        rem.iter().all(|&r| r == 0),
        "division by a cyclotomic factor must be exact"
    );
    quot
}

/// An element of `Z[ζ_d]`.
#[derive(Clone, Debug)]
pub struct CycElt {
    d: usize,
    counts: Vec<i64>,
    canon: OnceLock<Vec<i64>>,
}

impl CycElt {
    pub fn zero(d: u64) -> Self {
        Self::from_counts(vec![0; d as usize])
    }

    pub fn integer(d: u64, m: i64) -> Self {
        let mut s = Self::zero(d);
        s.counts[0] = m;
        s
    }

    /// `ζ_d^e`.
    pub fn zeta_pow(d: u64, e: u64) -> Self {
        let mut s = Self::zero(d);
        s.counts[(e % d) as usize] = 1;
        s
    }

    pub fn from_counts(counts: Vec<i64>) -> Self {
        assert!(!counts.is_empty(), "d must be positive");
        CycElt {
            d: counts.len(),
            counts,
            canon: OnceLock::new(),
        }
    }

    pub fn d(&self) -> u64 {
        self.d as u64
    }

    /// Group-ring coefficients; index `j` multiplies `ζ_d^j`.
    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// Adds `ζ_d^e`; `None` stands for `χ(0) = 0` and adds nothing.
    pub fn accumulate(&mut self, e: Option<u64>) {
        if let Some(e) = e {
            self.add_term(e, 1);
        }
    }

    /// Adds `mult · ζ_d^e`.
    pub fn add_term(&mut self, e: u64, mult: i64) {
        if mult == 0 {
            return;
        }
        self.counts[(e % self.d as u64) as usize] += mult;
        self.canon = OnceLock::new();
    }

    /// Remainder of `Σ counts[j] x^j` modulo `Φ_d`, length `φ(d)`.
    pub fn canon(&self) -> &[i64] {
        self.canon.get_or_init(|| {
            let phi = phi(self.d);
            let deg = phi.len() - 1;
            let mut acc: Vec<i128> = self.counts.iter().map(|&c| c as i128).collect();
            for top in (deg..self.d).rev() {
                let c = acc[top];
                if c != 0 {
                    for (i, &b) in phi.iter().enumerate() {
                        acc[top - deg + i] -= c * b as i128;
                    }
                }
            }
            acc.truncate(deg);
            acc.into_iter()
                .map(|c| i64::try_from(c).expect("cyclotomic coefficient overflow"))
                .collect()
        })
    }

    /// The integer this element equals, if it is rational.
    pub fn as_integer(&self) -> Option<i64> {
        let c = self.canon();
        c[1..].iter().all(|&x| x == 0).then(|| c[0])
    }

    pub fn equals_integer(&self, m: i64) -> bool {
        self.as_integer() == Some(m)
    }

    /// Applies `ζ_d ↦ ζ_d^u`.
    pub fn galois_apply(&self, u: u64) -> Result<Self> {
        let d = self.d as u64;
        if gcd(u % d, d) != 1 {
            return Err(Error::NotAUnit { u, d });
        }
        Ok(self.permute(u))
    }

    fn permute(&self, u: u64) -> Self {
        let d = self.d as u64;
        let mut out = vec![0i64; self.d];
        for (j, &c) in self.counts.iter().enumerate() {
            out[((j as u64 * u) % d) as usize] += c;
        }
        Self::from_counts(out)
    }

    /// Complex conjugation, `ζ_d ↦ ζ_d^(-1)`.
    pub fn conjugate(&self) -> Self {
        self.permute(self.d as u64 - 1)
    }

    pub fn is_real(&self) -> bool {
        self.conjugate() == *self
    }

    /// Canonical coefficients reduced into `[0, m)`. The element is congruent
    /// to the integer `r` modulo `m Z[ζ_d]` iff this is `[r mod m, 0, ...]`.
    pub fn mod_ideal_class(&self, m: u64) -> Vec<i64> {
        assert!(m >= 2, "modulus must be at least 2");
        self.canon().iter().map(|&c| c.rem_euclid(m as i64)).collect()
    }

    /// Whether this element is `≡ r (mod m Z[ζ_d])`.
    pub fn congruent_to_integer(&self, r: i64, m: u64) -> bool {
        let class = self.mod_ideal_class(m);
        class[0] == r.rem_euclid(m as i64) && class[1..].iter().all(|&c| c == 0)
    }

    fn check_same_ring(&self, other: &Self) {
        assert_eq!(self.d, other.d, "mixing elements of different cyclotomic rings");
    }
}

impl PartialEq for CycElt {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.canon() == other.canon()
    }
}

impl Eq for CycElt {}

impl AddAssign<&CycElt> for CycElt {
    fn add_assign(&mut self, rhs: &CycElt) {
        self.check_same_ring(rhs);
        for (a, b) in self.counts.iter_mut().zip(&rhs.counts) {
            *a += b;
        }
        self.canon = OnceLock::new();
    }
}

impl Add<&CycElt> for &CycElt {
    type Output = CycElt;

    fn add(self, rhs: &CycElt) -> CycElt {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Neg for &CycElt {
    type Output = CycElt;

    fn neg(self) -> CycElt {
        CycElt::from_counts(self.counts.iter().map(|c| -c).collect())
    }
}

impl Sub<&CycElt> for &CycElt {
    type Output = CycElt;

    fn sub(self, rhs: &CycElt) -> CycElt {
        self + &(-rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(14), vec![1, -1, 1, -1, 1, -1, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
    }

    #[test]
    fn phi_14_by_hand_division() {
        // (x^14 - 1) / ((x - 1)(x + 1)(x^6 + ... + 1))
        let mut num = vec![0i64; 15];
        num[0] = -1;
        num[14] = 1;
        let num = exact_div_monic(&num, &[-1, 1]);
        let num = exact_div_monic(&num, &[1, 1]);
        let num = exact_div_monic(&num, &[1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(num, cyclotomic_poly(14));
    }

    #[test]
    fn degree_is_totient() {
        for d in 1..80usize {
            let totient = (1..=d).filter(|&j| gcd(j as u64, d as u64) == 1).count();
            assert_eq!(cyclotomic_poly(d).len() - 1, totient, "d = {d}");
        }
    }

    #[test]
    fn accumulate_examples() {
        let mut s = CycElt::zero(8);
        s.accumulate(None);
        assert!(s.equals_integer(0));
        for e in 0..8 {
            s.accumulate(Some(e));
        }
        assert!(s.equals_integer(0));
        let mut t = CycElt::zero(8);
        for _ in 0..5 {
            t.accumulate(Some(0));
        }
        assert!(t.equals_integer(5));
        assert!(!CycElt::zeta_pow(8, 1).equals_integer(1));
    }

    #[test]
    fn galois_examples() {
        let z = CycElt::zeta_pow(8, 1);
        assert_eq!(z.galois_apply(1).unwrap(), z);
        assert_eq!(CycElt::integer(8, 14).galois_apply(3).unwrap(), CycElt::integer(8, 14));
        assert_eq!(z.galois_apply(7).unwrap(), CycElt::zeta_pow(8, 7));
        assert!(z.galois_apply(2).is_err());
    }

    #[test]
    fn realness() {
        assert!(CycElt::integer(8, -3).is_real());
        assert!(!CycElt::zeta_pow(8, 1).is_real());
        let s = &CycElt::zeta_pow(8, 1) + &CycElt::zeta_pow(8, 7);
        assert!(s.is_real());
    }

    #[test]
    fn ideal_classes() {
        let mut s = CycElt::integer(8, 1);
        s.add_term(1, 3);
        assert!(s.congruent_to_integer(1, 3));
        assert_eq!(s.mod_ideal_class(3), vec![1, 0, 0, 0]);
        // 2q with q = 7
        assert!(CycElt::integer(8, 14).congruent_to_integer(2, 3));
        assert!(CycElt::zero(8).congruent_to_integer(0, 3));
    }

    #[test]
    fn equality_is_canonical() {
        // 1 + ζ + ... + ζ^(d-1) = 0 in every ring
        let s = CycElt::from_counts(vec![1; 12]);
        assert_eq!(s, CycElt::zero(12));
        // ζ_4^2 = -1
        assert_eq!(CycElt::zeta_pow(4, 2), CycElt::integer(4, -1));
    }

    #[test]
    fn sub_and_neg() {
        let a = CycElt::integer(6, 5);
        let b = CycElt::zeta_pow(6, 2);
        let diff = &(&a - &b) + &b;
        assert_eq!(diff, a);
    }
}
