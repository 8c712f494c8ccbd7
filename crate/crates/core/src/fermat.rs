//! Lines `L_{a,b}: [u:v] ↦ [u : v : au+bv : av+bu]` on the Fermat surface, their
//! intersections with torus translates, and the inner products of their
//! character projections.

use std::collections::HashSet;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::charsum::{sum_s, ExponentTuple};
use crate::cyc::CycElt;
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FqElem};

/// A line datum `(a, b)` with `a ∈ F_q`, `b ∉ F_q`, `a^2 + 1 = b^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Line {
    a: FqElem,
    b: FqElem,
    alpha: FqElem,
    beta: FqElem,
}

impl Line {
    pub fn new(ctx: &FieldCtx, a: FqElem, b: FqElem) -> Result<Self> {
        if !ctx.is_in_fq(a) {
            return Err(Error::InvalidLine("a must lie in F_q".into()));
        }
        if ctx.is_in_fq(b) {
            return Err(Error::InvalidLine("b must not lie in F_q".into()));
        }
        if ctx.add(ctx.mul(a, a), FqElem::ONE) != ctx.mul(b, b) {
            return Err(Error::InvalidLine("a^2 + 1 != b^2".into()));
        }
        // a = 0 would force b^2 = 1, i.e. b ∈ F_q, which is already excluded.
        let beta = ctx.inv(a).ok_or_else(|| Error::InvalidLine("a = 0".into()))?;
        let alpha = ctx.neg(ctx.mul(beta, b));
        Ok(Line { a, b, alpha, beta })
    }

    /// Every valid line over `F_{q^2}`, in the order of [`FieldCtx::find_ab_pairs`].
    pub fn all(ctx: &FieldCtx) -> Vec<Line> {
        ctx.find_ab_pairs()
            .into_iter()
            .map(|(a, b)| Line::new(ctx, a, b).expect("find_ab_pairs yields valid data"))
            .collect()
    }

    /// The line with `b` a primitive 12th root of unity and `a = b^2`, for
    /// `q ≡ 7 mod 12`. Among the four candidates for `b` the one with the smallest
    /// encoding is used.
    pub fn thm1(ctx: &FieldCtx) -> Result<Self> {
        if ctx.q() % 12 != 7 {
            return Err(Error::Precondition(format!("q = {} is not 7 mod 12", ctx.q())));
        }
        let z = ctx.primitive_root_of_unity(12)?;
        let b = [1u64, 5, 7, 11]
            .map(|j| ctx.pow(z, j))
            .into_iter()
            .min()
            .expect("nonempty");
        Line::new(ctx, ctx.mul(b, b), b)
    }

    pub fn a(&self) -> FqElem {
        self.a
    }

    pub fn b(&self) -> FqElem {
        self.b
    }

    /// `α = -b/a`.
    pub fn alpha(&self) -> FqElem {
        self.alpha
    }

    /// `β = 1/a`.
    pub fn beta(&self) -> FqElem {
        self.beta
    }

    /// `b^2`, the value of `c` whose character sum governs this line.
    pub fn c(&self, ctx: &FieldCtx) -> FqElem {
        ctx.mul(self.b, self.b)
    }

    /// The image of `[u:v]`.
    pub fn point(&self, ctx: &FieldCtx, u: FqElem, v: FqElem) -> [FqElem; 4] {
        let (a, b) = (self.a, self.b);
        [
            u,
            v,
            ctx.add(ctx.mul(a, u), ctx.mul(b, v)),
            ctx.add(ctx.mul(a, v), ctx.mul(b, u)),
        ]
    }

    /// Whether `x` satisfies the two linear equations cutting out the line.
    pub fn contains(&self, ctx: &FieldCtx, x: &[FqElem; 4]) -> bool {
        let (a, b) = (self.a, self.b);
        x[2] == ctx.add(ctx.mul(a, x[0]), ctx.mul(b, x[1])) && x[3] == ctx.add(ctx.mul(a, x[1]), ctx.mul(b, x[0]))
    }
}

/// An element `[t0 : t1 : t2 : 1]` of `T = μ_d^4/μ_d`, stored as the exponents
/// of `t0, t1, t2` with respect to `g_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusElt {
    pub e: [u64; 3],
}

impl TorusElt {
    pub fn identity() -> Self {
        TorusElt { e: [0; 3] }
    }

    /// Normalizes `[g_d^e0 : g_d^e1 : g_d^e2 : g_d^e3]` to `t3 = 1`.
    pub fn from_exponents(e: [u64; 4], d: u64) -> Self {
        let sub = |x: u64| (x % d + d - e[3] % d) % d;
        TorusElt {
            e: [sub(e[0]), sub(e[1]), sub(e[2])],
        }
    }

    pub fn inverse(&self, d: u64) -> Self {
        TorusElt {
            e: self.e.map(|x| (d - x) % d),
        }
    }

    /// Coordinates in `F_{q^2}`, `t3 = 1` last.
    pub fn coords(&self, ctx: &FieldCtx) -> [FqElem; 4] {
        let g = ctx.mu_d_generator();
        [
            ctx.pow(g, self.e[0]),
            ctx.pow(g, self.e[1]),
            ctx.pow(g, self.e[2]),
            FqElem::ONE,
        ]
    }

    /// `t0 t1 t2 = t3^3`.
    pub fn in_te(&self, d: u64) -> bool {
        self.e.iter().sum::<u64>() % d == 0
    }

    /// `λ^{-1}(t)` as a power of `ζ_d`.
    pub fn character_inverse_exp(&self, t: &ExponentTuple) -> u64 {
        let d = t.d();
        let i = t.entries();
        let s: u64 = (0..3).map(|j| (i[j] * self.e[j]) % d).sum::<u64>() % d;
        (d - s) % d
    }

    /// All `d^3` elements.
    pub fn all(d: u64) -> impl Iterator<Item = TorusElt> {
        (0..d).flat_map(move |a| (0..d).flat_map(move |b| (0..d).map(move |c| TorusElt { e: [a, b, c] })))
    }
}

/// `I_L`: the translates `t ≠ 1` for which `tL` meets `L`.
#[derive(Clone, Debug)]
pub struct IntersectionSet {
    /// Elements with a representative having exactly three coordinates `1`.
    pub three_entry: Vec<TorusElt>,
    /// `(γ, t_γ)` for `tr(γ) ≠ 0`, in encoding order of `γ`.
    pub gamma_indexed: Vec<(FqElem, TorusElt)>,
}

impl IntersectionSet {
    pub fn len(&self) -> usize {
        self.three_entry.len() + self.gamma_indexed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &TorusElt> {
        self.three_entry.iter().chain(self.gamma_indexed.iter().map(|(_, t)| t))
    }

    pub fn contains(&self, t: &TorusElt) -> bool {
        self.iter().any(|s| s == t)
    }
}

/// The `4(d-1)` torus elements with exactly three coordinates equal to `1`.
pub fn three_entry_elements(d: u64) -> Vec<TorusElt> {
    let mut out = Vec::with_capacity(4 * (d as usize - 1));
    for pos in 0..4 {
        for e in 1..d {
            let mut ex = [0u64; 4];
            ex[pos] = e;
            out.push(TorusElt::from_exponents(ex, d));
        }
    }
    out
}

/// `t_γ` from `t_γ^{-1} = [-γ^{q-1} : 1 : -(aγ+b)^{q-1} : (a+bγ)^{q-1}]`.
///
/// For `x ≠ 0`, `x^{q-1} = g_d^{dlog x}` and `-1 = g_d^{d/2}`.
pub fn t_gamma(ctx: &FieldCtx, line: &Line, gamma: FqElem) -> Result<TorusElt> {
    let d = ctx.d();
    let half = d / 2;
    let log = |x: FqElem| {
        ctx.dlog(x)
            .map(|l| l % d)
            .ok_or(Error::Precondition("tr(γ) must be nonzero".into()))
    };
    let f0 = half + log(gamma)?;
    let f2 = half + log(ctx.add(ctx.mul(line.a, gamma), line.b))?;
    let f3 = log(ctx.add(line.a, ctx.mul(line.b, gamma)))?;
    Ok(TorusElt::from_exponents([f0, 0, f2, f3], d).inverse(d))
}

/// Enumerates `I_L` and checks that no element repeats.
pub fn build_intersections(ctx: &FieldCtx, line: &Line) -> Result<IntersectionSet> {
    let d = ctx.d();
    let three_entry = three_entry_elements(d);
    let gamma_indexed: Vec<(FqElem, TorusElt)> = ctx
        .elements()
        .filter(|&g| !ctx.trace(g).is_zero())
        .map(|g| t_gamma(ctx, line, g).map(|t| (g, t)))
        .collect::<Result<_>>()?;

    let set = IntersectionSet {
        three_entry,
        gamma_indexed,
    };
    let mut seen = HashSet::with_capacity(set.len());
    for t in set.iter() {
        if *t == TorusElt::identity() || !seen.insert(*t) {
            return Err(Error::Internal(format!(
                "repeated or trivial translate {:?} in I_L",
                t.e
            )));
        }
    }
    let q = ctx.q() as usize;
    if set.three_entry.len() != 4 * (d as usize - 1) || set.gamma_indexed.len() != q * q - q {
        return Err(Error::Internal("I_L has the wrong cardinality".into()));
    }
    Ok(set)
}

/// How `L` and `tL` meet, found by scanning `P^1(F_{q^2})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Meeting {
    /// `t = 1`.
    SameLine,
    Disjoint,
    /// `L(u:v) = tL(u:v)`: the common point has the same parameter on both lines.
    SameParameter([FqElem; 2]),
    /// `L(p) = tL(p')` with `p ≠ p'`; parameters normalized with last nonzero entry `1`.
    DistinctParameters {
        on_l: [FqElem; 2],
        on_tl: [FqElem; 2],
    },
}

fn normalize_param(ctx: &FieldCtx, u: FqElem, v: FqElem) -> [FqElem; 2] {
    match ctx.inv(v) {
        Some(vi) => [ctx.mul(u, vi), FqElem::ONE],
        None => [FqElem::ONE, FqElem::ZERO],
    }
}

/// Brute-force intersection of `L` with `tL`. Each point `P = L(u:v)` is pulled
/// back by `t^{-1}`; if the result lies on `L`, its first two coordinates are its
/// parameter on `L`, hence the parameter of `P` on `tL`.
pub fn geometric_intersection_oracle(ctx: &FieldCtx, line: &Line, t: &TorusElt) -> Meeting {
    if *t == TorusElt::identity() {
        return Meeting::SameLine;
    }
    let ti = t.inverse(ctx.d()).coords(ctx);
    let params = std::iter::once([FqElem::ONE, FqElem::ZERO]).chain(ctx.elements().map(|u| [u, FqElem::ONE]));
    let mut found = None;
    for [u, v] in params {
        let p = line.point(ctx, u, v);
        let pulled = [0, 1, 2, 3].map(|j| ctx.mul(ti[j], p[j]));
        if line.contains(ctx, &pulled) {
            assert!(found.is_none(), "distinct lines meet at most once");
            let on_tl = normalize_param(ctx, pulled[0], pulled[1]);
            found = Some(if on_tl == [u, v] {
                Meeting::SameParameter([u, v])
            } else {
                Meeting::DistinctParameters { on_l: [u, v], on_tl }
            });
        }
    }
    found.unwrap_or(Meeting::Disjoint)
}

/// The `w`-type characters: the trivial tuple and `(i,i,i,d-3i)` with
/// `i, 3i ≢ 0 mod d`.
pub fn w_tuples(d: u64) -> Vec<ExponentTuple> {
    std::iter::once(ExponentTuple::trivial(d))
        .chain(
            (1..d)
                .filter(|&i| (3 * i) % d != 0)
                .map(|i| ExponentTuple::w_type(i, d)),
        )
        .collect()
}

/// `Σ_{t ∈ S} λ^{-1}(t)` over any collection of torus elements.
pub fn character_inverse_sum<'a>(d: u64, t: &ExponentTuple, elems: impl Iterator<Item = &'a TorusElt>) -> CycElt {
    let mut counts = vec![0i64; d as usize];
    for s in elems {
        counts[s.character_inverse_exp(t) as usize] += 1;
    }
    CycElt::from_counts(counts)
}

/// `d^3 ⟨L_λ, L_λ⟩ = 2 - d + Σ_{t ∈ I_L} λ^{-1}(t)` as an element of `Z[ζ_d]`.
pub fn scaled_inner_product_direct(ctx: &FieldCtx, set: &IntersectionSet, t: &ExponentTuple) -> CycElt {
    let d = ctx.d();
    let mut total = character_inverse_sum(d, t, set.iter());
    total.add_term(0, 2 - d as i64);
    total
}

/// `⟨L_λ, L_λ⟩ = scaled / d^3` with `scaled ∈ Z[ζ_d]`. The value is real but
/// need not be rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProduct {
    pub scaled: CycElt,
    pub denominator: i64,
}

impl InnerProduct {
    fn new(ctx: &FieldCtx, scaled: CycElt) -> Self {
        InnerProduct {
            scaled,
            denominator: (ctx.d() as i64).pow(3),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.scaled.canon().iter().all(|&c| c == 0)
    }

    pub fn as_rational(&self) -> Result<Ratio<i64>> {
        let n = self
            .scaled
            .as_integer()
            .ok_or_else(|| Error::NotRational(format!("canonical form {:?}", self.scaled.canon())))?;
        Ok(Ratio::new(n, self.denominator))
    }
}

/// `⟨L_λ, L_λ⟩` from the intersection set.
pub fn inner_product_direct(ctx: &FieldCtx, line: &Line, t: &ExponentTuple) -> Result<InnerProduct> {
    if t.d() != ctx.d() {
        return Err(Error::InvalidTuple(format!(
            "tuple is mod {}, field has d = {}",
            t.d(),
            ctx.d()
        )));
    }
    let set = build_intersections(ctx, line)?;
    Ok(InnerProduct::new(ctx, scaled_inner_product_direct(ctx, &set, t)))
}

/// `⟨L_λ, L_λ⟩ = (-2q + S_{b^2, î}) / d^3` for tuples with nonzero entries.
pub fn inner_product_via_charsum(ctx: &FieldCtx, line: &Line, t: &ExponentTuple) -> Result<InnerProduct> {
    if !t.all_nonzero() {
        return Err(Error::InvalidTuple(format!("{t} has a zero entry")));
    }
    let mut scaled = sum_s(ctx, line.c(ctx), t)?.value;
    scaled.add_term(0, -2 * ctx.q() as i64);
    Ok(InnerProduct::new(ctx, scaled))
}

/// `Σ_{t ∈ I_L^0} λ^{-1}(t)`; equals `-4` for tuples with nonzero entries.
pub fn three_entry_character_sum(d: u64, t: &ExponentTuple) -> CycElt {
    character_inverse_sum(d, t, three_entry_elements(d).iter())
}

/// One row of certificate-support output.
#[derive(Clone, Debug, Serialize)]
pub struct InnerProductRow {
    pub q: u64,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub tuple: ExponentTuple,
    pub s: Vec<i64>,
    /// Canonical form of `d^3 ⟨v_λ, v_λ⟩`.
    pub inner_product_scaled: Vec<i64>,
    pub inner_product_den: i64,
    pub nonzero: bool,
}

/// Inner products of every line against every nontrivial `w`-type tuple.
pub fn inner_product_rows(ctx: &FieldCtx) -> Result<Vec<InnerProductRow>> {
    let tuples: Vec<ExponentTuple> = w_tuples(ctx.d()).into_iter().filter(|t| t.all_nonzero()).collect();
    let lines = Line::all(ctx);
    let jobs: Vec<(Line, ExponentTuple)> = lines
        .iter()
        .flat_map(|l| tuples.iter().map(move |t| (*l, *t)))
        .collect();
    jobs.par_iter()
        .map(|(line, t)| {
            let rec = sum_s(ctx, line.c(ctx), t)?;
            let ip = inner_product_via_charsum(ctx, line, t)?;
            Ok(InnerProductRow {
                q: ctx.q(),
                a: ctx.coeffs(line.a),
                b: ctx.coeffs(line.b),
                tuple: *t,
                s: rec.value.canon().to_vec(),
                inner_product_scaled: ip.scaled.canon().to_vec(),
                inner_product_den: ip.denominator,
                nonzero: !ip.is_zero(),
            })
        })
        .collect()
}
