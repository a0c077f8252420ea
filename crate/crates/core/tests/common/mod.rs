//! Random generators shared by the integration tests.
#![allow(dead_code)]

pub mod golden;
pub mod laws;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use reflectix::demo::{self, expr};
use reflectix::typerep::TypeRep;
use reflectix::value::Value;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn ints(xs: &[i64]) -> Value {
    Value::list(xs.iter().map(|&i| Value::Int(i)))
}

pub fn small_int(r: &mut StdRng) -> i64 {
    r.random_range(-20..=20)
}

pub fn ident(r: &mut StdRng) -> String {
    const NAMES: [&str; 6] = ["x", "y", "z", "a1", "tmp_2", "B"];
    NAMES[r.random_range(0..NAMES.len())].to_string()
}

pub fn short_string(r: &mut StdRng) -> String {
    let n = r.random_range(0..4);
    (0..n).map(|_| r.random_range(b'a'..=b'e') as char).collect()
}

pub fn int_list(r: &mut StdRng, max_len: usize) -> Value {
    let n = r.random_range(0..=max_len);
    Value::list((0..n).map(|_| Value::Int(small_int(r))))
}

pub fn btree(r: &mut StdRng, depth: usize) -> Value {
    if depth == 0 || r.random_bool(0.3) {
        demo::empty()
    } else {
        let l = btree(r, depth - 1);
        let x = Value::Int(small_int(r));
        let rr = btree(r, depth - 1);
        demo::node(l, x, rr)
    }
}

pub fn rose(r: &mut StdRng, depth: usize) -> Value {
    let label = Value::string(&short_string(r));
    let n = if depth == 0 { 0 } else { r.random_range(0..3) };
    let kids = (0..n).map(|_| rose(r, depth - 1)).collect();
    demo::rose_node(label, kids)
}

pub fn expr_value(r: &mut StdRng, depth: usize) -> Value {
    let k = if depth == 0 { r.random_range(0..2) } else { r.random_range(0..6) };
    match k {
        0 => expr::cst(small_int(r)),
        1 => expr::var(&ident(r)),
        2 => expr::neg(expr_value(r, depth - 1)),
        3 => expr::add(expr_value(r, depth - 1), expr_value(r, depth - 1)),
        4 => expr::sub(expr_value(r, depth - 1), expr_value(r, depth - 1)),
        _ => {
            let n = ident(r);
            expr::let_(&n, expr_value(r, depth - 1), expr_value(r, depth - 1))
        }
    }
}

/// A value with its type, drawn from the algebraic demo types.
pub struct Sample {
    pub ty: TypeRep,
    pub value: Value,
}

pub fn algebraic_sample(r: &mut StdRng, depth: usize) -> Sample {
    demo::init();
    match r.random_range(0..5) {
        0 => Sample {
            ty: TypeRep::list(TypeRep::int()),
            value: int_list(r, depth),
        },
        1 => Sample {
            ty: TypeRep::pair(TypeRep::int(), TypeRep::string()),
            value: Value::pair(Value::Int(small_int(r)), Value::string(&short_string(r))),
        },
        2 => Sample {
            ty: demo::btree(TypeRep::int()),
            value: btree(r, depth),
        },
        3 => Sample {
            ty: demo::rose(TypeRep::string()),
            value: rose(r, depth),
        },
        _ => Sample {
            ty: demo::expr_ty(),
            value: expr_value(r, depth),
        },
    }
}

/// Ground types built from the standard heads.
pub fn typerep(r: &mut StdRng, depth: usize) -> TypeRep {
    let leaf = depth == 0 || r.random_bool(0.35);
    if leaf {
        return match r.random_range(0..4) {
            0 => TypeRep::int(),
            1 => TypeRep::string(),
            2 => TypeRep::bool(),
            _ => TypeRep::float(),
        };
    }
    match r.random_range(0..5) {
        0 => TypeRep::list(typerep(r, depth - 1)),
        1 => TypeRep::option(typerep(r, depth - 1)),
        2 => TypeRep::array(typerep(r, depth - 1)),
        3 => TypeRep::pair(typerep(r, depth - 1), typerep(r, depth - 1)),
        _ => TypeRep::fun(typerep(r, depth - 1), typerep(r, depth - 1)),
    }
}

/// Registered types with a serializable descriptor.
pub fn serializable_types() -> Vec<TypeRep> {
    demo::init();
    vec![
        TypeRep::int(),
        TypeRep::string(),
        TypeRep::float(),
        TypeRep::bool(),
        TypeRep::list(TypeRep::int()),
        TypeRep::option(TypeRep::string()),
        TypeRep::pair(TypeRep::int(), TypeRep::list(TypeRep::bool())),
        TypeRep::array(TypeRep::float()),
        demo::btree(TypeRep::int()),
        demo::rose(TypeRep::string()),
        demo::expr_ty(),
        demo::nat(),
        demo::nat_internal(),
        demo::shape(),
        demo::point(),
        TypeRep::list(demo::nat()),
        demo::btree(demo::shape()),
    ]
}

/// A random value of `t`, for any type in [`serializable_types`] and the
/// types reachable from them.
pub fn value_of(r: &mut StdRng, t: &TypeRep, depth: usize) -> Value {
    let name = t.head().name().to_string();
    let d1 = depth.saturating_sub(1);
    match name.as_str() {
        "Int" => Value::Int(r.random_range(i64::MIN..=i64::MAX) >> r.random_range(0..64)),
        "Float" => Value::Float(r.random_range(-1e6..1e6)),
        "String" => Value::string(&short_string(r)),
        "Bool" => Value::bool(r.random_bool(0.5)),
        "Unit" => Value::unit(),
        "List" => {
            let n = if depth == 0 { 0 } else { r.random_range(0..4) };
            Value::list((0..n).map(|_| value_of(r, t.arg(0), d1)))
        }
        "Option" => {
            if depth == 0 || r.random_bool(0.3) {
                Value::none()
            } else {
                Value::some(value_of(r, t.arg(0), d1))
            }
        }
        "Array" => {
            let n = if depth == 0 { 0 } else { r.random_range(0..4) };
            Value::tuple((0..n).map(|_| value_of(r, t.arg(0), d1)).collect())
        }
        "Pair" => Value::pair(value_of(r, t.arg(0), d1), value_of(r, t.arg(1), d1)),
        "Btree" => {
            if depth == 0 || r.random_bool(0.3) {
                demo::empty()
            } else {
                let l = value_of(r, t, d1);
                let x = value_of(r, t.arg(0), d1);
                let rr = value_of(r, t, d1);
                demo::node(l, x, rr)
            }
        }
        "Rose" => {
            let label = value_of(r, t.arg(0), d1);
            let n = if depth == 0 { 0 } else { r.random_range(0..3) };
            let kids = (0..n).map(|_| value_of(r, t, d1)).collect();
            demo::rose_node(label, kids)
        }
        "Expr" => expr_value(r, depth),
        "Nat" | "NatInternal" => Value::Int(r.random_range(0..1000)),
        "Shape" => match r.random_range(0..3) {
            0 => demo::shape_value("Demo.Circle", vec![Value::Float(r.random_range(0.0..10.0))]),
            1 => demo::shape_value(
                "Demo.Rect",
                vec![Value::Float(r.random_range(0.0..10.0)), Value::Float(r.random_range(0.0..10.0))],
            ),
            _ => demo::shape_value("Demo.Label", vec![Value::string(&short_string(r))]),
        },
        "Point" => Value::tuple(vec![Value::Int(small_int(r)), Value::Int(small_int(r))]),
        other => panic!("no generator for {other}"),
    }
}
