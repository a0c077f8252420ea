mod common;

use std::sync::Arc;

use proptest::prelude::*;
use reflectix::demo;
use reflectix::desc::{conap, repr, resolve_synonyms, view_desc, ConKind, Constructor, Desc, ProductShape};
use reflectix::error::Error;
use reflectix::generics::{equal, show};
use reflectix::typerep::TypeRep;
use reflectix::value::Value;
use reflectix::views::{conlist, conlist_conap, spine, sumprod, SpValue, SumProd};

/// First constructor whose projection accepts `v`, found by trying each.
fn linear_scan(cs: &[Arc<Constructor>], v: &Value) -> Option<(String, Vec<Value>)> {
    cs.iter().find_map(|c| c.proj(v).map(|a| (c.name.clone(), a)))
}

fn top_iso(t: &TypeRep) -> reflectix::views::SpIso {
    match sumprod(t).expect("sumprod") {
        SumProd::Iso(_, iso) => iso,
        other => panic!("{t} has no top-level iso: {other:?}"),
    }
}

fn count_alternatives(sp: &SumProd) -> usize {
    match sp {
        SumProd::Sum(a, b) => count_alternatives(a) + count_alternatives(b),
        SumProd::Iso(s, _) => count_alternatives(s),
        SumProd::Empty => 0,
        _ => 1,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn conap_agrees_with_linear_scan(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let s = common::algebraic_sample(&mut r, 4);
        let app = conap(&s.ty, &s.value).unwrap();
        let (name, args) = linear_scan(&conlist(&s.ty), &s.value).expect("some constructor accepts the value");
        prop_assert_eq!(&app.con.name, &name);
        prop_assert_eq!(&app.args, &args);
        prop_assert_eq!(app.rebuild().unwrap(), s.value.clone());
        let via_list = conlist_conap(&conlist(&s.ty), &s.value).unwrap();
        prop_assert!(via_list.con.same_as(&app.con));
    }

    #[test]
    fn sumprod_iso_round_trips(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let s = common::algebraic_sample(&mut r, 4);
        let iso = top_iso(&s.ty);
        let sv = iso.fwd(&s.value).unwrap();
        prop_assert_eq!(iso.bck(&sv).unwrap(), s.value);
    }

    #[test]
    fn spine_rebuilds_the_value(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let s = common::algebraic_sample(&mut r, 4);
        let sp = spine(&s.ty, &s.value).unwrap();
        prop_assert_eq!(sp.rebuild().unwrap(), s.value.clone());
        let con = sp.head().constructor().clone();
        let tys: Vec<TypeRep> = sp.args().into_iter().map(|(t, _)| t).collect();
        let want: Vec<TypeRep> = con.fields.iter().map(|f| f.ty.clone()).collect();
        prop_assert_eq!(tys, want);
        prop_assert_eq!(sp.head().meta.arity, con.arity());
    }

    #[test]
    fn nested_products_round_trip(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let n = (seed % 5) as usize;
        let tys: Vec<TypeRep> = (0..n).map(|_| TypeRep::int()).collect();
        let vals: Vec<Value> = (0..n).map(|_| Value::Int(common::small_int(&mut r))).collect();
        let shape = ProductShape(tys);
        let nested = shape.nest(&vals).unwrap();
        prop_assert_eq!(shape.unnest(&nested), Some(vals));
    }
}

#[test]
fn tags_follow_declaration_order() {
    demo::init();
    for t in [demo::expr_ty(), demo::btree(TypeRep::int()), TypeRep::list(TypeRep::int()), TypeRep::bool()] {
        let Desc::Variant(v) = view_desc(&t) else { panic!("{t} is a variant") };
        let (mut c, mut n) = (0, 0);
        for con in v.con_list() {
            match con.kind {
                ConKind::Constant(i) => {
                    assert_eq!(i, c);
                    assert!(v.cst_get(c as usize).unwrap().same_as(con));
                    c += 1;
                }
                ConKind::NonConstant(i) => {
                    assert_eq!(i, n);
                    assert!(v.ncst_get(n as usize).unwrap().same_as(con));
                    n += 1;
                }
                k => panic!("unexpected {k:?}"),
            }
        }
        assert_eq!((c as usize, n as usize), (v.cst_len(), v.ncst_len()));
        assert!(v.cst_get(v.cst_len()).is_err());
        assert!(v.ncst_get(v.ncst_len()).is_err());
    }
}

#[test]
fn sumprod_has_one_alternative_per_constructor() {
    demo::init();
    for (t, n) in [
        (demo::expr_ty(), 6),
        (demo::btree(TypeRep::int()), 2),
        (TypeRep::option(TypeRep::int()), 2),
        (demo::rose(TypeRep::int()), 1),
    ] {
        assert_eq!(count_alternatives(&sumprod(&t).unwrap()), n, "{t}");
    }
    assert!(matches!(sumprod(&TypeRep::int()).unwrap(), SumProd::Base(_)));
    assert!(sumprod(&TypeRep::fun(TypeRep::int(), TypeRep::int())).is_err());
}

#[test]
fn constants_map_to_the_unit_alternative() {
    let t = TypeRep::option(TypeRep::int());
    let iso = top_iso(&t);
    assert_eq!(iso.fwd(&Value::none()).unwrap(), SpValue::Left(Box::new(SpValue::Unit)));
}

#[test]
fn nat_representation_is_a_retraction() {
    demo::init();
    let rp = repr(&demo::nat()).unwrap();
    let mut r = common::rng(5);
    for _ in 0..1000 {
        let x = Value::Int(rand::Rng::random_range(&mut r, 0..i64::MAX));
        let back = rp.from_repr(&rp.to_repr(&x));
        assert_eq!(back, Some(x));
    }
    for bad in [-1, -7, i64::MIN] {
        assert_eq!(rp.from_repr(&Value::Int(bad)), None);
    }
    assert!(matches!(repr(&TypeRep::int()), Err(Error::NoRepresentation(_))));
}

#[test]
fn synonyms_are_transparent() {
    demo::init();
    let (t, d) = resolve_synonyms(&demo::nat_internal());
    assert_eq!(t, TypeRep::int());
    assert_eq!(d.category(), "scalar");
    let v = Value::Int(12);
    assert_eq!(show(&demo::nat_internal(), &v).unwrap(), show(&TypeRep::int(), &v).unwrap());
    assert!(equal(&demo::nat_internal(), &v, &Value::Int(12)).unwrap());
    assert_eq!(view_desc(&demo::nat()).category(), "abstract");
}

#[test]
fn extensible_constructors_keep_identity() {
    demo::init();
    let shapes = demo::shapes();
    let circle = demo::shape_value("Demo.Circle", vec![Value::Float(1.0)]);
    let app = shapes.ext_conap(&circle).unwrap();
    assert_eq!(app.con.name, "Demo.Circle");
    // A value carrying the name but no identity is only accepted once reinstated.
    let Value::Ext(e) = &circle else { panic!() };
    let orphan = Value::Ext(Arc::new(reflectix::value::ExtValue {
        name: e.name.clone(),
        identity: None,
        fields: e.fields.clone(),
    }));
    assert!(matches!(shapes.ext_conap(&orphan), Err(Error::UnknownConstructor(_))));
    assert_eq!(shapes.reinstate(&orphan).unwrap(), circle);
    assert!(shapes.add_con("Demo.Circle", vec![]).is_err());
}

#[test]
fn record_fields_respect_mutability() {
    demo::init();
    let Desc::Record(rd) = view_desc(&demo::point()) else { panic!("Point is a record") };
    let mut p = Value::tuple(vec![Value::Int(1), Value::Int(2)]);
    rd.fields().find("y").unwrap().set(&mut p, Value::Int(9)).unwrap();
    assert_eq!(p, Value::tuple(vec![Value::Int(1), Value::Int(9)]));
    assert!(rd.fields().find("x").unwrap().set(&mut p, Value::Int(0)).is_err());
}
