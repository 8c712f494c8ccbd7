use std::sync::OnceLock;

use fermatlines::charsum::{orbit_images, sum_s};
use fermatlines::efield::{poly, Field, RatFuncField};
use fermatlines::fermat::{inner_product_direct, inner_product_via_charsum, w_tuples};
use fermatlines::{make_field, CycElt, ExponentTuple, FieldCtx, FqElem, Line};
use proptest::prelude::*;

fn f7() -> &'static FieldCtx {
    static F: OnceLock<FieldCtx> = OnceLock::new();
    F.get_or_init(|| make_field(7, 1).unwrap())
}

fn f11() -> &'static FieldCtx {
    static F: OnceLock<FieldCtx> = OnceLock::new();
    F.get_or_init(|| make_field(11, 1).unwrap())
}

fn f13() -> &'static FieldCtx {
    static F: OnceLock<FieldCtx> = OnceLock::new();
    F.get_or_init(|| make_field(13, 1).unwrap())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn cyc(d: u64) -> impl Strategy<Value = CycElt> {
    proptest::collection::vec(-5i64..=5, d as usize).prop_map(CycElt::from_counts)
}

fn unit(d: u64) -> impl Strategy<Value = u64> {
    (1..d).prop_filter("unit", move |&u| gcd(u, d) == 1)
}

/// `c ∈ F_q \ {0, 1}` given as an integer.
fn generic_c(p: u64) -> impl Strategy<Value = i64> {
    2..p as i64
}

fn elem(ctx: &'static FieldCtx) -> impl Strategy<Value = FqElem> {
    (0..ctx.size() as u32).prop_map(move |i| ctx.elem_from_index(i).unwrap())
}

fn poly_strategy(ctx: &'static FieldCtx, max_len: usize) -> impl Strategy<Value = Vec<FqElem>> {
    proptest::collection::vec(elem(ctx), 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn galois_action_composes(x in cyc(14), u in unit(14), v in unit(14)) {
        let lhs = x.galois_apply(u).unwrap().galois_apply(v).unwrap();
        prop_assert_eq!(lhs, x.galois_apply(u * v % 14).unwrap());
    }

    #[test]
    fn accumulation_order_is_irrelevant(mut exps in proptest::collection::vec(0u64..12, 0..40), seed in any::<u64>()) {
        let mut a = CycElt::zero(12);
        for &e in &exps {
            a.accumulate(Some(e));
        }
        let n = exps.len().max(1);
        exps.rotate_left(seed as usize % n);
        exps.reverse();
        let mut b = CycElt::zero(12);
        for &e in &exps {
            b.accumulate(Some(e));
        }
        prop_assert_eq!(a, b);
    }

    #[test]
    fn sums_for_w_characters_are_real_and_bounded(c in generic_c(13), i in 1u64..14) {
        let f = f13();
        let t = ExponentTuple::w_type(i, 14);
        let s = sum_s(f, f.from_int(c), &t).unwrap();
        prop_assert!(s.value.is_real());
        if let Some(v) = s.as_integer {
            prop_assert!(v.abs() <= 26);
        }
    }

    #[test]
    fn sums_are_galois_equivariant(c in generic_c(13), i in 1u64..14, j in 1u64..14, k in unit(14)) {
        let f = f13();
        let t = ExponentTuple::from_three(i, j, (i + j) % 14, 14);
        let c = f.from_int(c);
        let lhs = sum_s(f, c, &t.scale(k)).unwrap().value;
        prop_assert_eq!(lhs, sum_s(f, c, &t).unwrap().value.galois_apply(k).unwrap());
    }

    #[test]
    fn sums_are_constant_on_orbits(c in generic_c(13), idx in 0usize..12) {
        let f = f13();
        let t = w_tuples(14)[idx];
        let c = f.from_int(c);
        let base = sum_s(f, c, &t).unwrap().value;
        for img in orbit_images(f, c).unwrap() {
            prop_assert_eq!(&sum_s(f, img, &t).unwrap().value, &base);
        }
    }

    #[test]
    fn rational_functions_stay_canonical(
        a in poly_strategy(f7(), 5),
        b in poly_strategy(f7(), 4),
        c in poly_strategy(f7(), 4),
    ) {
        let r = RatFuncField::new(f7());
        let base = &r.base;
        prop_assume!(b.iter().any(|x| !x.is_zero()));
        let x = r.make(&a, &b);
        let y = r.make(&c, &b);
        for z in [&x, &y, &r.add(&x, &y), &r.mul(&x, &y)] {
            prop_assert_eq!(*z.den.last().unwrap(), FqElem::ONE);
            if z.num.is_empty() {
                prop_assert_eq!(&z.den, &vec![FqElem::ONE]);
            } else {
                prop_assert_eq!(poly::degree(&poly::gcd(base, &z.num, &z.den)), Some(0));
            }
        }
        prop_assert_eq!(r.sub(&r.add(&x, &y), &y), x.clone());
        if !r.is_zero(&y) {
            prop_assert_eq!(r.mul(&r.mul(&x, &y), &r.inv(&y).unwrap()), x);
        }
    }

    #[test]
    fn inner_product_routes_agree(line_idx in any::<prop::sample::Index>(), idx in 0usize..10) {
        let f = f11();
        let lines = Line::all(f);
        let line = line_idx.get(&lines);
        let tuples: Vec<ExponentTuple> = w_tuples(12).into_iter().filter(|t| t.all_nonzero()).collect();
        let t = tuples[idx % tuples.len()];
        let direct = inner_product_direct(f, line, &t).unwrap();
        prop_assert_eq!(direct, inner_product_via_charsum(f, line, &t).unwrap());
    }
}
