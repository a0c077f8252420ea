//! The library's dynamic value model.
//!
//! Values mirror a tagged runtime representation: immediates, tagged blocks
//! of fields, floats, strings, extensible-constructor cells and functions.
//! Constant constructors are immediates holding their index among the
//! constant constructors; non-constant constructors are blocks whose tag is
//! their index among the non-constant ones. Records and tuples are blocks of
//! tag 0. Blocks are reference counted so that sharing between parts of a
//! value is observable by the serializer.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;

/// Identity of a registered extensible constructor.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ConId(pub(crate) u64);

#[derive(Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Str(Arc<str>),
    Block(Arc<Block>),
    Ext(Arc<ExtValue>),
    Fun(Func),
}

#[derive(Clone, PartialEq, Debug)]
pub struct Block {
    pub tag: u32,
    pub fields: Vec<Value>,
}

/// A value built by a constructor of an extensible type. `identity` is
/// `None` until the cell has been resolved against a registry.
#[derive(Clone, PartialEq, Debug)]
pub struct ExtValue {
    pub name: Arc<str>,
    pub identity: Option<ConId>,
    pub fields: Vec<Value>,
}

#[derive(Clone)]
pub struct Func(FuncBody);

type FuncBody = Arc<dyn Fn(&Value) -> Result<Value> + Send + Sync>;

impl Func {
    pub fn new(f: impl Fn(&Value) -> Value + Send + Sync + 'static) -> Self {
        Func(Arc::new(move |v| Ok(f(v))))
    }

    pub fn try_new(f: impl Fn(&Value) -> Result<Value> + Send + Sync + 'static) -> Self {
        Func(Arc::new(f))
    }

    pub fn call(&self, v: &Value) -> Result<Value> {
        (self.0)(v)
    }

    pub fn identity() -> Self {
        Func::new(Value::clone)
    }

    pub fn ptr_eq(&self, other: &Func) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Value {
    pub fn unit() -> Value {
        Value::Int(0)
    }

    pub fn bool(b: bool) -> Value {
        Value::Int(b as i64)
    }

    pub fn string(s: &str) -> Value {
        Value::Str(s.into())
    }

    pub fn block(tag: u32, fields: Vec<Value>) -> Value {
        Value::Block(Arc::new(Block { tag, fields }))
    }

    pub fn tuple(fields: Vec<Value>) -> Value {
        Value::block(0, fields)
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::block(0, vec![a, b])
    }

    pub fn none() -> Value {
        Value::Int(0)
    }

    pub fn some(v: Value) -> Value {
        Value::block(0, vec![v])
    }

    pub fn fun(f: impl Fn(&Value) -> Value + Send + Sync + 'static) -> Value {
        Value::Fun(Func::new(f))
    }

    pub fn nil() -> Value {
        Value::Int(0)
    }

    pub fn cons(head: Value, tail: Value) -> Value {
        Value::block(0, vec![head, tail])
    }

    /// Builds a list value from its elements.
    pub fn list(items: impl IntoIterator<Item = Value>) -> Value {
        let items: Vec<Value> = items.into_iter().collect();
        items
            .into_iter()
            .rev()
            .fold(Value::nil(), |tail, head| Value::cons(head, tail))
    }

    /// Elements of a list value, or `None` when the value is not list-shaped.
    pub fn to_vec(&self) -> Option<Vec<Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Int(0) => return Some(out),
                Value::Block(b) if b.tag == 0 && b.fields.len() == 2 => {
                    out.push(b.fields[0].clone());
                    cur = &b.fields[1];
                }
                _ => return None,
            }
        }
    }

    /// Option payload: `Some(Some(v))` for a present value, `Some(None)` for
    /// the empty option.
    pub fn to_option(&self) -> Option<Option<Value>> {
        match self {
            Value::Int(0) => Some(None),
            Value::Block(b) if b.tag == 0 && b.fields.len() == 1 => Some(Some(b.fields[0].clone())),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_block(&self) -> Option<&Block> {
        match self {
            Value::Block(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_fun(&self) -> Option<&Func> {
        match self {
            Value::Fun(f) => Some(f),
            _ => None,
        }
    }

    /// `true` when both values are the same heap cell.
    pub fn same_cell(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Block(a), Value::Block(b)) => Arc::ptr_eq(a, b),
            (Value::Ext(a), Value::Ext(b)) => Arc::ptr_eq(a, b),
            (Value::Str(a), Value::Str(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// Structural equality on the runtime shape; functions compare by identity
/// and floats by bit pattern.
impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a.to_bits() == b.to_bits(),
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Block(a), Value::Block(b)) => Arc::ptr_eq(a, b) || a == b,
            (Value::Ext(a), Value::Ext(b)) => Arc::ptr_eq(a, b) || a == b,
            (Value::Fun(a), Value::Fun(b)) => a.ptr_eq(b),
            _ => false,
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::Block(b) => {
                write!(f, "#{}", b.tag)?;
                f.debug_list().entries(&b.fields).finish()
            }
            Value::Ext(e) => {
                write!(f, "{}", e.name)?;
                f.debug_list().entries(&e.fields).finish()
            }
            Value::Fun(_) => f.write_str("<fun>"),
        }
    }
}

impl From<i64> for Value {
    fn from(i: i64) -> Self {
        Value::Int(i)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::string(s)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}
