//! The low-level generic view.
//!
//! Every registered type has a [`Desc`] describing its category: variant,
//! record, product, array-like, extensible, synonym, abstract, opaque or
//! scalar. Descriptors are registered through the `register_*` functions,
//! which declare the head constructor and store a builder that receives the
//! argument representations of each instance, so a parametric type such as
//! `List(a)` is described once for every `a`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, LazyLock, RwLock};

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::extfun::ExtFun;
use crate::typerep::{declare_type, EqualityWitness, Head, TypePattern, TypeRep, STDLIB};
use crate::value::{ConId, ExtValue, Value};

/// A constructor argument or record field.
#[derive(Clone, Debug)]
pub struct Field {
    pub name: String,
    pub ty: TypeRep,
    pub mutable: bool,
    index: usize,
}

impl Field {
    pub fn index(&self) -> usize {
        self.index
    }

    /// In-place update of this field in a record value.
    pub fn set(&self, target: &mut Value, v: Value) -> Result<()> {
        if !self.mutable {
            return Err(Error::MalformedValue(format!("field `{}` is immutable", self.name)));
        }
        match target {
            Value::Block(b) if self.index < b.fields.len() => {
                Arc::make_mut(b).fields[self.index] = v;
                Ok(())
            }
            _ => Err(Error::MalformedValue(format!(
                "no field `{}` in {target:?}",
                self.name
            ))),
        }
    }
}

/// Ordered fields of a constructor or record.
#[derive(Clone, Debug, Default)]
pub struct FieldList(Vec<Field>);

impl FieldList {
    pub fn new(fields: impl IntoIterator<Item = (String, TypeRep, bool)>) -> Self {
        FieldList(
            fields
                .into_iter()
                .enumerate()
                .map(|(index, (name, ty, mutable))| Field {
                    name,
                    ty,
                    mutable,
                    index,
                })
                .collect(),
        )
    }

    /// Unnamed immutable fields, as used by constructor arguments.
    pub fn positional(tys: impl IntoIterator<Item = TypeRep>) -> Self {
        FieldList::new(tys.into_iter().map(|t| (String::new(), t, false)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Field> {
        self.0.iter()
    }

    pub fn get(&self, i: usize) -> Option<&Field> {
        self.0.get(i)
    }

    pub fn find(&self, name: &str) -> Option<&Field> {
        self.0.iter().find(|f| f.name == name)
    }

    pub fn shape(&self) -> ProductShape {
        ProductShape(self.0.iter().map(|f| f.ty.clone()).collect())
    }
}

/// Component types of a product. Products of values are exchanged either as
/// flat vectors or as right-nested pairs ending in unit.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ProductShape(pub Vec<TypeRep>);

impl ProductShape {
    pub fn components(&self) -> &[TypeRep] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(a, (b, (c, ())))` from `[a, b, c]`.
    pub fn nest(&self, values: &[Value]) -> Result<Value> {
        if values.len() != self.0.len() {
            return Err(Error::ArityMismatch {
                what: "product".into(),
                expected: self.0.len(),
                found: values.len(),
            });
        }
        Ok(values
            .iter()
            .rev()
            .fold(Value::unit(), |acc, v| Value::pair(v.clone(), acc)))
    }

    /// Inverse of [`nest`](Self::nest).
    pub fn unnest(&self, nested: &Value) -> Option<Vec<Value>> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut cur = nested;
        for _ in 0..self.0.len() {
            let b = cur.as_block().filter(|b| b.tag == 0 && b.fields.len() == 2)?;
            out.push(b.fields[0].clone());
            cur = &b.fields[1];
        }
        (*cur == Value::unit()).then_some(out)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ConKind {
    /// Immediate holding the index among constant constructors.
    Constant(u32),
    /// Block whose tag is the index among non-constant constructors.
    NonConstant(u32),
    /// Tag-0 block: the single constructor of a record or tuple.
    Tuple,
    Ext(ConId),
}

/// A constructor with its embedding and projection.
#[derive(Clone, Debug)]
pub struct Constructor {
    pub name: String,
    pub fields: FieldList,
    pub kind: ConKind,
    pub type_name: String,
    pub module_path: Vec<String>,
}

impl Constructor {
    pub fn arity(&self) -> usize {
        self.fields.len()
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, ConKind::Constant(_))
    }

    pub fn tag(&self) -> Option<u32> {
        match self.kind {
            ConKind::Constant(t) | ConKind::NonConstant(t) => Some(t),
            ConKind::Tuple => Some(0),
            ConKind::Ext(_) => None,
        }
    }

    pub fn shape(&self) -> ProductShape {
        self.fields.shape()
    }

    /// Applies the constructor to its arguments.
    pub fn embed(&self, args: Vec<Value>) -> Result<Value> {
        if args.len() != self.arity() {
            return Err(Error::ArityMismatch {
                what: self.name.clone(),
                expected: self.arity(),
                found: args.len(),
            });
        }
        Ok(match self.kind {
            ConKind::Constant(t) => Value::Int(t as i64),
            ConKind::NonConstant(t) => Value::block(t, args),
            ConKind::Tuple => Value::tuple(args),
            ConKind::Ext(id) => Value::Ext(Arc::new(ExtValue {
                name: self.name.as_str().into(),
                identity: Some(id),
                fields: args,
            })),
        })
    }

    /// Arguments of `v` when it was built by this constructor.
    pub fn proj(&self, v: &Value) -> Option<Vec<Value>> {
        match (self.kind, v) {
            (ConKind::Constant(t), Value::Int(i)) if *i == t as i64 => Some(vec![]),
            (ConKind::NonConstant(t), Value::Block(b)) if b.tag == t && b.fields.len() == self.arity() => {
                Some(b.fields.clone())
            }
            (ConKind::Tuple, Value::Block(b)) if b.tag == 0 && b.fields.len() == self.arity() => {
                Some(b.fields.clone())
            }
            (ConKind::Ext(id), Value::Ext(e))
                if e.identity == Some(id) && *e.name == *self.name && e.fields.len() == self.arity() =>
            {
                Some(e.fields.clone())
            }
            _ => None,
        }
    }

    /// `true` when both describe the same constructor of the same type.
    pub fn same_as(&self, other: &Constructor) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.type_name == other.type_name
            && self.module_path == other.module_path
    }
}

/// A constructor together with the arguments it was applied to.
#[derive(Clone, Debug)]
pub struct ConApp {
    pub con: Arc<Constructor>,
    pub args: Vec<Value>,
}

impl ConApp {
    /// Arguments as right-nested pairs.
    pub fn nested_args(&self) -> Value {
        self.con
            .shape()
            .nest(&self.args)
            .expect("conap arguments match the constructor arity")
    }

    pub fn rebuild(&self) -> Result<Value> {
        self.con.embed(self.args.clone())
    }
}

/// Constructor declaration used to build a [`VariantDesc`].
pub struct ConDecl {
    pub name: String,
    pub fields: Vec<(String, TypeRep)>,
}

/// Positional constructor declaration.
pub fn con(name: &str, args: Vec<TypeRep>) -> ConDecl {
    ConDecl {
        name: name.to_string(),
        fields: args.into_iter().map(|t| (String::new(), t)).collect(),
    }
}

#[derive(Debug)]
pub struct VariantDesc {
    pub name: String,
    pub module_path: Vec<String>,
    cons: Vec<Arc<Constructor>>,
    cst: Vec<Arc<Constructor>>,
    ncst: Vec<Arc<Constructor>>,
}

impl VariantDesc {
    /// Assigns tags in declaration order, separately for constant and
    /// non-constant constructors.
    pub fn new(name: &str, module_path: &[&str], decls: Vec<ConDecl>) -> Self {
        let module_path: Vec<String> = module_path.iter().map(|s| s.to_string()).collect();
        let (mut cst, mut ncst, mut cons) = (vec![], vec![], vec![]);
        for d in decls {
            let kind = if d.fields.is_empty() {
                ConKind::Constant(cst.len() as u32)
            } else {
                ConKind::NonConstant(ncst.len() as u32)
            };
            let c = Arc::new(Constructor {
                name: d.name,
                fields: FieldList::new(d.fields.into_iter().map(|(n, t)| (n, t, false))),
                kind,
                type_name: name.to_string(),
                module_path: module_path.clone(),
            });
            if c.is_constant() {
                cst.push(c.clone());
            } else {
                ncst.push(c.clone());
            }
            cons.push(c);
        }
        VariantDesc {
            name: name.to_string(),
            module_path,
            cons,
            cst,
            ncst,
        }
    }

    pub fn cst(&self) -> &[Arc<Constructor>] {
        &self.cst
    }

    pub fn ncst(&self) -> &[Arc<Constructor>] {
        &self.ncst
    }

    pub fn cst_len(&self) -> usize {
        self.cst.len()
    }

    pub fn ncst_len(&self) -> usize {
        self.ncst.len()
    }

    pub fn cst_get(&self, i: usize) -> Result<&Arc<Constructor>> {
        self.cst.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.cst.len(),
        })
    }

    pub fn ncst_get(&self, i: usize) -> Result<&Arc<Constructor>> {
        self.ncst.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.ncst.len(),
        })
    }

    /// All constructors in declaration order.
    pub fn con_list(&self) -> &[Arc<Constructor>] {
        &self.cons
    }

    pub fn find(&self, name: &str) -> Option<&Arc<Constructor>> {
        self.cons.iter().find(|c| c.name == name)
    }

    /// Splits a value into constructor and arguments by tag lookup.
    pub fn conap(&self, x: &Value) -> Result<ConApp> {
        let malformed = || Error::MalformedValue(format!("{x:?} is not a value of variant {}", self.name));
        match x {
            Value::Int(i) => {
                let con = usize::try_from(*i).ok().and_then(|i| self.cst.get(i)).ok_or_else(malformed)?;
                Ok(ConApp {
                    con: con.clone(),
                    args: vec![],
                })
            }
            Value::Block(b) => {
                let con = self.ncst.get(b.tag as usize).ok_or_else(malformed)?;
                if con.arity() != b.fields.len() {
                    return Err(malformed());
                }
                Ok(ConApp {
                    con: con.clone(),
                    args: b.fields.clone(),
                })
            }
            _ => Err(malformed()),
        }
    }
}

#[derive(Debug)]
pub struct RecordDesc {
    pub name: String,
    pub module_path: Vec<String>,
    con: Arc<Constructor>,
}

impl RecordDesc {
    /// `fields` are `(name, type, mutable)` triples in declaration order.
    pub fn new(name: &str, module_path: &[&str], fields: Vec<(&str, TypeRep, bool)>) -> Self {
        let module_path: Vec<String> = module_path.iter().map(|s| s.to_string()).collect();
        let con = Arc::new(Constructor {
            name: name.to_string(),
            fields: FieldList::new(fields.into_iter().map(|(n, t, m)| (n.to_string(), t, m))),
            kind: ConKind::Tuple,
            type_name: name.to_string(),
            module_path: module_path.clone(),
        });
        RecordDesc {
            name: name.to_string(),
            module_path,
            con,
        }
    }

    pub fn fields(&self) -> &FieldList {
        &self.con.fields
    }

    pub fn constructor(&self) -> &Arc<Constructor> {
        &self.con
    }

    pub fn conap(&self, x: &Value) -> Result<ConApp> {
        let args = self
            .con
            .proj(x)
            .ok_or_else(|| Error::MalformedValue(format!("{x:?} is not a {} record", self.name)))?;
        Ok(ConApp {
            con: self.con.clone(),
            args,
        })
    }
}

/// An anonymous tuple type.
#[derive(Debug)]
pub struct ProductDesc {
    shape: ProductShape,
    con: Arc<Constructor>,
}

impl ProductDesc {
    pub fn new(components: Vec<TypeRep>) -> Self {
        let name = format!("({})", ",".repeat(components.len().saturating_sub(1)));
        let con = Arc::new(Constructor {
            name: name.clone(),
            fields: FieldList::positional(components.iter().cloned()),
            kind: ConKind::Tuple,
            type_name: name,
            module_path: vec![STDLIB.to_string()],
        });
        ProductDesc {
            shape: ProductShape(components),
            con,
        }
    }

    pub fn shape(&self) -> &ProductShape {
        &self.shape
    }

    pub fn constructor(&self) -> &Arc<Constructor> {
        &self.con
    }

    /// Tuple value to right-nested pairs.
    pub fn fwd(&self, x: &Value) -> Result<Value> {
        let args = self
            .con
            .proj(x)
            .ok_or_else(|| Error::MalformedValue(format!("{x:?} is not a {}-tuple", self.shape.len())))?;
        self.shape.nest(&args)
    }

    /// Right-nested pairs to tuple value.
    pub fn bck(&self, nested: &Value) -> Result<Value> {
        let args = self
            .shape
            .unnest(nested)
            .ok_or_else(|| Error::MalformedValue(format!("{nested:?} is not a nested product")))?;
        self.con.embed(args)
    }
}

static NEXT_CON_ID: AtomicU64 = AtomicU64::new(1);

/// An open variant whose constructors are registered at run time.
pub struct ExtensibleDesc {
    pub name: String,
    pub module_path: Vec<String>,
    pub ty: TypeRep,
    cons: RwLock<IndexMap<String, Arc<Constructor>>>,
}

impl fmt::Debug for ExtensibleDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensibleDesc")
            .field("name", &self.name)
            .field("constructors", &self.cons.read().unwrap().keys().collect::<Vec<_>>())
            .finish()
    }
}

impl ExtensibleDesc {
    pub fn create(name: &str, module_path: &[&str], ty: TypeRep) -> Self {
        ExtensibleDesc {
            name: name.to_string(),
            module_path: module_path.iter().map(|s| s.to_string()).collect(),
            ty,
            cons: RwLock::new(IndexMap::new()),
        }
    }

    /// Registers a constructor under its fully-qualified name.
    pub fn add_con(&self, qualified_name: &str, args: Vec<TypeRep>) -> Result<Arc<Constructor>> {
        let mut cons = self.cons.write().unwrap();
        if cons.contains_key(qualified_name) {
            return Err(Error::DuplicateConstructor(qualified_name.to_string()));
        }
        let c = Arc::new(Constructor {
            name: qualified_name.to_string(),
            fields: FieldList::positional(args),
            kind: ConKind::Ext(ConId(NEXT_CON_ID.fetch_add(1, Ordering::Relaxed))),
            type_name: self.name.clone(),
            module_path: self.module_path.clone(),
        });
        cons.insert(qualified_name.to_string(), c.clone());
        Ok(c)
    }

    /// Constructors in registration order.
    pub fn ext_con_list(&self) -> Vec<Arc<Constructor>> {
        self.cons.read().unwrap().values().cloned().collect()
    }

    pub fn lookup(&self, qualified_name: &str) -> Option<Arc<Constructor>> {
        self.cons.read().unwrap().get(qualified_name).cloned()
    }

    /// Requires the value's constructor identity to be the registered one.
    pub fn ext_conap(&self, x: &Value) -> Result<ConApp> {
        let Value::Ext(e) = x else {
            return Err(Error::MalformedValue(format!("{x:?} is not an extensible value")));
        };
        let con = self
            .lookup(&e.name)
            .filter(|c| c.kind == ConKind::Ext(e.identity.unwrap_or(ConId(0))))
            .ok_or_else(|| Error::UnknownConstructor(e.name.to_string()))?;
        let args = con
            .proj(x)
            .ok_or_else(|| Error::MalformedValue(format!("{x:?} has the wrong arity for {}", con.name)))?;
        Ok(ConApp { con, args })
    }

    /// Rebinds the constructor identity of `x` to the registered constructor
    /// with the same name.
    pub fn reinstate(&self, x: &Value) -> Result<Value> {
        let Value::Ext(e) = x else {
            return Err(Error::MalformedValue(format!("{x:?} is not an extensible value")));
        };
        let con = self
            .lookup(&e.name)
            .ok_or_else(|| Error::UnknownConstructor(e.name.to_string()))?;
        let ConKind::Ext(id) = con.kind else { unreachable!() };
        Ok(Value::Ext(Arc::new(ExtValue {
            name: e.name.clone(),
            identity: Some(id),
            fields: e.fields.clone(),
        })))
    }
}

/// Public representation of an abstract type.
#[derive(Clone)]
pub struct Representation {
    pub repr_ty: TypeRep,
    pub to_repr: ToReprFn,
    pub from_repr: FromReprFn,
}

pub type ToReprFn = Arc<dyn Fn(&Value) -> Value + Send + Sync>;
pub type FromReprFn = Arc<dyn Fn(&Value) -> Option<Value> + Send + Sync>;

/// Builds the representation of an abstract type from its arguments.
pub type ReprBuilder = Box<dyn Fn(&[TypeRep]) -> Representation + Send + Sync>;

impl Representation {
    pub fn new(
        repr_ty: TypeRep,
        to_repr: impl Fn(&Value) -> Value + Send + Sync + 'static,
        from_repr: impl Fn(&Value) -> Option<Value> + Send + Sync + 'static,
    ) -> Self {
        Representation {
            repr_ty,
            to_repr: Arc::new(to_repr),
            from_repr: Arc::new(from_repr),
        }
    }

    pub fn to_repr(&self, x: &Value) -> Value {
        (self.to_repr)(x)
    }

    pub fn from_repr(&self, r: &Value) -> Option<Value> {
        (self.from_repr)(r)
    }
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Representation({})", self.repr_ty)
    }
}

/// Operations shared by array-like containers.
#[derive(Clone, Copy)]
pub struct ArrayOps {
    pub length: fn(&Value) -> Option<usize>,
    pub get: fn(&Value, usize) -> Option<Value>,
    pub set: fn(&mut Value, usize, Value) -> bool,
    pub init: fn(usize, &mut dyn FnMut(usize) -> Value) -> Value,
    pub max_length: usize,
}

impl fmt::Debug for ArrayOps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ArrayOps(max_length = {})", self.max_length)
    }
}

/// Arrays stored as tag-0 blocks of their elements.
pub const BLOCK_ARRAY: ArrayOps = ArrayOps {
    length: |v| v.as_block().filter(|b| b.tag == 0).map(|b| b.fields.len()),
    get: |v, i| v.as_block().and_then(|b| b.fields.get(i).cloned()),
    set: |v, i, x| match v {
        Value::Block(b) if i < b.fields.len() => {
            Arc::make_mut(b).fields[i] = x;
            true
        }
        _ => false,
    },
    init: |n, f| Value::tuple((0..n).map(f).collect()),
    max_length: u32::MAX as usize,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scalar {
    Int,
    Float,
    String,
}

#[derive(Clone, Debug)]
pub enum Desc {
    Scalar(Scalar),
    Variant(Arc<VariantDesc>),
    Record(Arc<RecordDesc>),
    Product(Arc<ProductDesc>),
    ArrayLike { elem: TypeRep, ops: ArrayOps },
    Extensible(Arc<ExtensibleDesc>),
    Synonym { target: TypeRep, eq: EqualityWitness },
    Abstract { name: String, module_path: Vec<String> },
    Opaque {
        name: String,
        module_path: Vec<String>,
        identifier: String,
    },
    NoDesc,
}

impl Desc {
    pub fn category(&self) -> &'static str {
        match self {
            Desc::Scalar(_) => "scalar",
            Desc::Variant(_) => "variant",
            Desc::Record(_) => "record",
            Desc::Product(_) => "product",
            Desc::ArrayLike { .. } => "array",
            Desc::Extensible(_) => "extensible",
            Desc::Synonym { .. } => "synonym",
            Desc::Abstract { .. } => "abstract",
            Desc::Opaque { .. } => "opaque",
            Desc::NoDesc => "none",
        }
    }
}

struct DescRegistry {
    descs: ExtFun<(), Desc>,
    heads: RwLock<HashSet<Head>>,
    reprs: ExtFun<(), Representation>,
    cache: RwLock<HashMap<TypeRep, Desc>>,
}

impl DescRegistry {
    fn register(&self, head: Head, build: impl Fn(&TypeRep) -> Desc + Send + Sync + 'static) -> Result<Head> {
        if !self.heads.write().unwrap().insert(head.clone()) {
            return Err(Error::DuplicateDescriptor(head.qualified()));
        }
        let arity = head.arity().unwrap_or(0);
        self.descs.extend(
            TypePattern::Con(head.clone(), vec![TypePattern::Any; arity]),
            move |t, ()| build(t),
        );
        Ok(head)
    }

    fn builtin(&self, name: &str, build: impl Fn(&TypeRep) -> Desc + Send + Sync + 'static) {
        self.register(Head::builtin(name), build).expect("builtin registered once");
    }
}

static REGISTRY: LazyLock<DescRegistry> = LazyLock::new(|| {
    let reg = DescRegistry {
        descs: ExtFun::create("desc"),
        heads: RwLock::new(HashSet::new()),
        reprs: ExtFun::create("repr"),
        cache: RwLock::new(HashMap::new()),
    };
    reg.builtin("Int", |_| Desc::Scalar(Scalar::Int));
    reg.builtin("Float", |_| Desc::Scalar(Scalar::Float));
    reg.builtin("String", |_| Desc::Scalar(Scalar::String));
    let bool_desc = Arc::new(VariantDesc::new(
        "bool",
        &[STDLIB],
        vec![con("false", vec![]), con("true", vec![])],
    ));
    reg.builtin("Bool", move |_| Desc::Variant(bool_desc.clone()));
    let unit_desc = Arc::new(VariantDesc::new("unit", &[STDLIB], vec![con("()", vec![])]));
    reg.builtin("Unit", move |_| Desc::Variant(unit_desc.clone()));
    reg.builtin("List", |t| {
        Desc::Variant(Arc::new(VariantDesc::new(
            "list",
            &[STDLIB],
            vec![con("[]", vec![]), con("::", vec![t.arg(0).clone(), t.clone()])],
        )))
    });
    reg.builtin("Option", |t| {
        Desc::Variant(Arc::new(VariantDesc::new(
            "option",
            &[STDLIB],
            vec![con("None", vec![]), con("Some", vec![t.arg(0).clone()])],
        )))
    });
    reg.builtin("Array", |t| Desc::ArrayLike {
        elem: t.arg(0).clone(),
        ops: BLOCK_ARRAY,
    });
    reg.builtin("Pair", |t| Desc::Product(Arc::new(ProductDesc::new(t.args().to_vec()))));
    reg
});

/// Descriptor of `t`; `NoDesc` for functions and unregistered types.
pub fn view_desc(t: &TypeRep) -> Desc {
    if t.is_var() {
        return Desc::NoDesc;
    }
    if let Some(d) = REGISTRY.cache.read().unwrap().get(t) {
        return d.clone();
    }
    match REGISTRY.descs.apply(t, ()) {
        Ok(d) => {
            REGISTRY.cache.write().unwrap().insert(t.clone(), d.clone());
            d
        }
        Err(_) => Desc::NoDesc,
    }
}

/// Registers a descriptor builder for a new type constructor.
pub fn register_desc(
    module_path: &str,
    name: &str,
    arity: usize,
    build: impl Fn(&[TypeRep]) -> Desc + Send + Sync + 'static,
) -> Result<Head> {
    let head = declare_type(module_path, name, arity)?;
    REGISTRY.register(head, move |t| build(t.args()))
}

pub fn register_variant(
    module_path: &str,
    name: &str,
    arity: usize,
    build: impl Fn(&[TypeRep]) -> VariantDesc + Send + Sync + 'static,
) -> Result<Head> {
    register_desc(module_path, name, arity, move |args| Desc::Variant(Arc::new(build(args))))
}

pub fn register_record(
    module_path: &str,
    name: &str,
    arity: usize,
    build: impl Fn(&[TypeRep]) -> RecordDesc + Send + Sync + 'static,
) -> Result<Head> {
    register_desc(module_path, name, arity, move |args| Desc::Record(Arc::new(build(args))))
}

pub fn register_synonym(
    module_path: &str,
    name: &str,
    arity: usize,
    target: impl Fn(&[TypeRep]) -> TypeRep + Send + Sync + 'static,
) -> Result<Head> {
    let head = declare_type(module_path, name, arity)?;
    let h = head.clone();
    REGISTRY.register(head, move |t| {
        let target = target(t.args());
        debug_assert_eq!(t.head(), &h);
        Desc::Synonym {
            eq: EqualityWitness::declared(t.clone(), target.clone()),
            target,
        }
    })
}

/// Registers an abstract type, optionally with its public representation.
pub fn register_abstract(
    module_path: &str,
    name: &str,
    arity: usize,
    repr: Option<ReprBuilder>,
) -> Result<Head> {
    let head = declare_type(module_path, name, arity)?;
    let desc_name = name.to_string();
    let path: Vec<String> = module_path.split('.').map(str::to_string).collect();
    let head = REGISTRY.register(head, move |_| Desc::Abstract {
        name: desc_name.clone(),
        module_path: path.clone(),
    })?;
    if let Some(repr) = repr {
        register_repr(&head, repr);
    }
    Ok(head)
}

/// Registers an opaque (custom) type identified by `identifier`.
pub fn register_opaque(
    module_path: &str,
    name: &str,
    identifier: &str,
    repr: Option<ReprBuilder>,
) -> Result<Head> {
    let head = declare_type(module_path, name, 0)?;
    let (desc_name, identifier) = (name.to_string(), identifier.to_string());
    let path: Vec<String> = module_path.split('.').map(str::to_string).collect();
    let head = REGISTRY.register(head, move |_| Desc::Opaque {
        name: desc_name.clone(),
        module_path: path.clone(),
        identifier: identifier.clone(),
    })?;
    if let Some(repr) = repr {
        register_repr(&head, repr);
    }
    Ok(head)
}

/// Registers an extensible type; the same registry backs every view of it.
pub fn register_extensible(module_path: &str, name: &str) -> Result<(Head, Arc<ExtensibleDesc>)> {
    let head = declare_type(module_path, name, 0)?;
    let path: Vec<&str> = module_path.split('.').collect();
    let ext = Arc::new(ExtensibleDesc::create(
        name,
        &path,
        TypeRep::unchecked(head.clone(), vec![]),
    ));
    let shared = ext.clone();
    let head = REGISTRY.register(head, move |_| Desc::Extensible(shared.clone()))?;
    Ok((head, ext))
}

fn register_repr(head: &Head, build: ReprBuilder) {
    let arity = head.arity().unwrap_or(0);
    REGISTRY.reprs.extend(
        TypePattern::Con(head.clone(), vec![TypePattern::Any; arity]),
        move |t, ()| build(t.args()),
    );
}

/// Public representation of an abstract or opaque type.
pub fn repr(t: &TypeRep) -> Result<Representation> {
    REGISTRY
        .reprs
        .apply(t, ())
        .map_err(|_| Error::NoRepresentation(t.to_string()))
}

/// Follows synonyms until a non-synonym descriptor is reached.
pub fn resolve_synonyms(t: &TypeRep) -> (TypeRep, Desc) {
    let mut t = t.clone();
    let mut seen = HashSet::new();
    loop {
        match view_desc(&t) {
            Desc::Synonym { target, .. } if seen.insert(t.clone()) => t = target,
            Desc::Synonym { .. } => return (t, Desc::NoDesc),
            d => return (t, d),
        }
    }
}

/// Constant-time deconstruction for any descriptor with constructors.
pub fn conap(t: &TypeRep, x: &Value) -> Result<ConApp> {
    match resolve_synonyms(t).1 {
        Desc::Variant(v) => v.conap(x),
        Desc::Record(r) => r.conap(x),
        Desc::Product(p) => {
            let args = p
                .constructor()
                .proj(x)
                .ok_or_else(|| Error::ill_typed(t, format!("{x:?} is not a tuple")))?;
            Ok(ConApp {
                con: p.constructor().clone(),
                args,
            })
        }
        Desc::Extensible(e) => e.ext_conap(x),
        _ => Err(Error::NoView(t.to_string())),
    }
}
