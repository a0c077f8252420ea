//! Example types used by the tests, the acceptance suite and the command
//! line tool: binary trees, rose trees, the expression language, a natural
//! number abstract type, an extensible shape type, a polymorphically
//! recursive tree and a record with a mutable field.

pub mod expr;

use std::sync::{Arc, OnceLock};

use crate::desc::{
    self, con, register_abstract, register_record, register_synonym, register_variant, ExtensibleDesc, RecordDesc,
    Representation, VariantDesc,
};
use crate::typerep::{Head, TypeRep};
use crate::value::Value;

pub const MODULE: &str = "Demo";

struct Heads {
    btree: Head,
    rose: Head,
    expr: Head,
    nat: Head,
    nat_internal: Head,
    shape: Head,
    poly: Head,
    point: Head,
    shapes: Arc<ExtensibleDesc>,
}

static HEADS: OnceLock<Heads> = OnceLock::new();

fn heads() -> &'static Heads {
    HEADS.get_or_init(register_all)
}

/// Registers every demo type. Safe to call repeatedly.
pub fn init() {
    heads();
}

fn fail<T>(e: crate::Error) -> T {
    panic!("demo registration failed: {e}")
}

fn register_all() -> Heads {
    let btree = register_variant(MODULE, "Btree", 1, |args| {
        let this = TypeRep::unchecked(heads_btree(), args.to_vec());
        VariantDesc::new(
            "btree",
            &[MODULE],
            vec![con("Empty", vec![]), con("Node", vec![this.clone(), args[0].clone(), this])],
        )
    })
    .unwrap_or_else(fail);
    let rose = register_record(MODULE, "Rose", 1, |args| {
        let this = TypeRep::unchecked(heads_rose(), args.to_vec());
        RecordDesc::new(
            "rose",
            &[MODULE],
            vec![("label", args[0].clone(), false), ("children", TypeRep::list(this), false)],
        )
    })
    .unwrap_or_else(fail);
    let expr = register_variant(MODULE, "Expr", 0, |_| {
        let e = TypeRep::unchecked(heads_expr(), vec![]);
        VariantDesc::new(
            "expr",
            &[MODULE],
            vec![
                con("Cst", vec![TypeRep::int()]),
                con("Neg", vec![e.clone()]),
                con("Add", vec![e.clone(), e.clone()]),
                con("Sub", vec![e.clone(), e.clone()]),
                con("Var", vec![TypeRep::string()]),
                con("Let", vec![TypeRep::string(), e.clone(), e]),
            ],
        )
    })
    .unwrap_or_else(fail);
    let nat = register_abstract(
        MODULE,
        "Nat",
        0,
        Some(Box::new(|_| {
            Representation::new(TypeRep::int(), Value::clone, |r| match r {
                Value::Int(i) if *i >= 0 => Some(Value::Int(*i)),
                _ => None,
            })
        })),
    )
    .unwrap_or_else(fail);
    let nat_internal = register_synonym("Demo.Nat", "NatInternal", 0, |_| TypeRep::int()).unwrap_or_else(fail);
    let (shape, shapes) = desc::register_extensible(MODULE, "Shape").unwrap_or_else(fail);
    shapes.add_con("Demo.Circle", vec![TypeRep::float()]).unwrap_or_else(fail);
    shapes
        .add_con("Demo.Rect", vec![TypeRep::float(), TypeRep::float()])
        .unwrap_or_else(fail);
    shapes.add_con("Demo.Label", vec![TypeRep::string()]).unwrap_or_else(fail);
    let poly = register_variant(MODULE, "PolyT", 1, |args| {
        let this = TypeRep::unchecked(heads_poly(), args.to_vec());
        let doubled = TypeRep::unchecked(heads_poly(), vec![TypeRep::pair(args[0].clone(), args[0].clone())]);
        VariantDesc::new(
            "t",
            &[MODULE],
            vec![con("Leaf", vec![TypeRep::int()]), con("Node", vec![this, doubled])],
        )
    })
    .unwrap_or_else(fail);
    let point = register_record(MODULE, "Point", 0, |_| {
        RecordDesc::new("point", &[MODULE], vec![("x", TypeRep::int(), false), ("y", TypeRep::int(), true)])
    })
    .unwrap_or_else(fail);
    Heads {
        btree,
        rose,
        expr,
        nat,
        nat_internal,
        shape,
        poly,
        point,
        shapes,
    }
}

// Builders run after registration, so the heads can be looked up by name.
fn demo_head(name: &str) -> Head {
    crate::typerep::lookup_head(&format!("{MODULE}.{name}")).expect("demo head declared")
}

fn heads_btree() -> Head {
    demo_head("Btree")
}

fn heads_rose() -> Head {
    demo_head("Rose")
}

fn heads_expr() -> Head {
    demo_head("Expr")
}

fn heads_poly() -> Head {
    demo_head("PolyT")
}

pub fn btree(elem: TypeRep) -> TypeRep {
    TypeRep::unchecked(heads().btree.clone(), vec![elem])
}

pub fn rose(label: TypeRep) -> TypeRep {
    TypeRep::unchecked(heads().rose.clone(), vec![label])
}

pub fn expr_ty() -> TypeRep {
    TypeRep::unchecked(heads().expr.clone(), vec![])
}

/// The abstract natural numbers, represented by non-negative integers.
pub fn nat() -> TypeRep {
    TypeRep::unchecked(heads().nat.clone(), vec![])
}

/// The same naturals seen from inside their module: a synonym of `Int`.
pub fn nat_internal() -> TypeRep {
    TypeRep::unchecked(heads().nat_internal.clone(), vec![])
}

pub fn shape() -> TypeRep {
    TypeRep::unchecked(heads().shape.clone(), vec![])
}

pub fn shapes() -> &'static Arc<ExtensibleDesc> {
    &heads().shapes
}

pub fn poly(elem: TypeRep) -> TypeRep {
    TypeRep::unchecked(heads().poly.clone(), vec![elem])
}

pub fn point() -> TypeRep {
    TypeRep::unchecked(heads().point.clone(), vec![])
}

pub fn empty() -> Value {
    Value::Int(0)
}

pub fn node(l: Value, x: Value, r: Value) -> Value {
    Value::block(0, vec![l, x, r])
}

pub fn rose_node(label: Value, children: Vec<Value>) -> Value {
    Value::tuple(vec![label, Value::list(children)])
}

/// A shape value built by the named registered constructor.
pub fn shape_value(name: &str, args: Vec<Value>) -> Value {
    shapes()
        .lookup(name)
        .expect("registered shape constructor")
        .embed(args)
        .expect("shape arity")
}
