//! High-level views derived from descriptors: sum of products, spine and
//! list of constructors.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use crate::desc::{self, ConApp, ConKind, Constructor, Desc};
use crate::error::{Error, Result};
use crate::typerep::TypeRep;
use crate::value::Value;

/// Structure of a type as nested binary sums and products.
#[derive(Clone)]
pub enum SumProd {
    Empty,
    Sum(Box<SumProd>, Box<SumProd>),
    Unit,
    Prod(Box<SumProd>, Box<SumProd>),
    Iso(Box<SumProd>, SpIso),
    Con(String, Box<SumProd>),
    FieldTag(String, Box<SumProd>),
    Base(TypeRep),
    /// A position whose structure is obtained by viewing its type again.
    Delay(TypeRep),
}

/// Values of a [`SumProd`] structure. `Leaf` sits at `Base` and `Delay`
/// positions; `Con` and `FieldTag` are transparent.
#[derive(Clone, PartialEq, Debug)]
pub enum SpValue {
    Left(Box<SpValue>),
    Right(Box<SpValue>),
    Unit,
    Pair(Box<SpValue>, Box<SpValue>),
    Leaf(Value),
}

type FwdFn = Arc<dyn Fn(&Value) -> Result<SpValue> + Send + Sync>;
type BckFn = Arc<dyn Fn(&SpValue) -> Result<Value> + Send + Sync>;

/// Bijection between a type's values and its structure's values.
#[derive(Clone)]
pub struct SpIso {
    fwd: FwdFn,
    bck: BckFn,
}

impl SpIso {
    pub fn fwd(&self, x: &Value) -> Result<SpValue> {
        (self.fwd)(x)
    }

    pub fn bck(&self, s: &SpValue) -> Result<Value> {
        (self.bck)(s)
    }
}

impl fmt::Debug for SumProd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumProd::Empty => f.write_str("Empty"),
            SumProd::Sum(a, b) => write!(f, "Sum({a:?}, {b:?})"),
            SumProd::Unit => f.write_str("Unit"),
            SumProd::Prod(a, b) => write!(f, "Prod({a:?}, {b:?})"),
            SumProd::Iso(a, _) => write!(f, "Iso({a:?})"),
            SumProd::Con(n, a) => write!(f, "Con({n:?}, {a:?})"),
            SumProd::FieldTag(n, a) => write!(f, "FieldTag({n:?}, {a:?})"),
            SumProd::Base(t) => write!(f, "Base({t})"),
            SumProd::Delay(t) => write!(f, "Delay({t})"),
        }
    }
}

/// Equality of the structure, ignoring isomorphism functions.
impl PartialEq for SumProd {
    fn eq(&self, other: &Self) -> bool {
        use SumProd::*;
        match (self, other) {
            (Empty, Empty) | (Unit, Unit) => true,
            (Sum(a, b), Sum(c, d)) | (Prod(a, b), Prod(c, d)) => a == c && b == d,
            (Iso(a, _), Iso(b, _)) => a == b,
            (Con(n, a), Con(m, b)) | (FieldTag(n, a), FieldTag(m, b)) => n == m && a == b,
            (Base(s), Base(t)) | (Delay(s), Delay(t)) => s == t,
            _ => false,
        }
    }
}

fn prod_of(fields: impl DoubleEndedIterator<Item = SumProd>) -> SumProd {
    fields.rev().fold(SumProd::Unit, |acc, f| SumProd::Prod(Box::new(f), Box::new(acc)))
}

fn con_structure(c: &Constructor, tagged: bool) -> SumProd {
    prod_of(c.fields.iter().map(|f| {
        let d = SumProd::Delay(f.ty.clone());
        if tagged {
            SumProd::FieldTag(f.name.clone(), Box::new(d))
        } else {
            d
        }
    }))
}

fn sum_of(mut alts: Vec<SumProd>) -> SumProd {
    match alts.len() {
        0 => SumProd::Empty,
        1 => alts.pop().unwrap(),
        _ => {
            let last = alts.pop().unwrap();
            alts.into_iter()
                .rev()
                .fold(last, |acc, a| SumProd::Sum(Box::new(a), Box::new(acc)))
        }
    }
}

fn leaves(args: &[Value]) -> SpValue {
    args.iter().rev().fold(SpValue::Unit, |acc, v| {
        SpValue::Pair(Box::new(SpValue::Leaf(v.clone())), Box::new(acc))
    })
}

fn unleaves(s: &SpValue, n: usize) -> Result<Vec<Value>> {
    let mut out = Vec::with_capacity(n);
    let mut cur = s;
    for _ in 0..n {
        match cur {
            SpValue::Pair(l, r) => match &**l {
                SpValue::Leaf(v) => {
                    out.push(v.clone());
                    cur = r;
                }
                _ => return Err(Error::MalformedValue("expected a leaf".into())),
            },
            _ => return Err(Error::MalformedValue("product too short".into())),
        }
    }
    match cur {
        SpValue::Unit => Ok(out),
        _ => Err(Error::MalformedValue("product too long".into())),
    }
}

fn inject(i: usize, n: usize, payload: SpValue) -> SpValue {
    let inner = if i + 1 < n {
        SpValue::Left(Box::new(payload))
    } else {
        payload
    };
    (0..i).fold(inner, |acc, _| SpValue::Right(Box::new(acc)))
}

fn project(s: &SpValue, n: usize) -> Result<(usize, &SpValue)> {
    let mut cur = s;
    for i in 0..n {
        if i + 1 == n {
            return Ok((i, cur));
        }
        match cur {
            SpValue::Left(x) => return Ok((i, x)),
            SpValue::Right(x) => cur = x,
            _ => return Err(Error::MalformedValue("expected an injection".into())),
        }
    }
    Err(Error::MalformedValue("empty sum has no values".into()))
}

/// Iso over a fixed list of alternatives, each given by its constructor.
fn alternatives_iso(t: &TypeRep, cons: Vec<Arc<Constructor>>) -> SpIso {
    let n = cons.len();
    let ty = t.clone();
    let fwd_cons = cons.clone();
    SpIso {
        fwd: Arc::new(move |x| {
            let app = desc::conap(&ty, x)?;
            let i = fwd_cons
                .iter()
                .position(|c| c.same_as(&app.con))
                .ok_or(Error::NoMatchingConstructor)?;
            Ok(inject(i, n, leaves(&app.args)))
        }),
        bck: Arc::new(move |s| {
            let (i, payload) = project(s, n)?;
            let c = &cons[i];
            c.embed(unleaves(payload, c.arity())?)
        }),
    }
}

static SUMPROD_CACHE: LazyLock<RwLock<HashMap<TypeRep, SumProd>>> = LazyLock::new(Default::default);

/// Sum-of-products view of `t`.
pub fn sumprod(t: &TypeRep) -> Result<SumProd> {
    if let Some(sp) = SUMPROD_CACHE.read().unwrap().get(t) {
        return Ok(sp.clone());
    }
    let (resolved, d) = desc::resolve_synonyms(t);
    let (sp, cacheable) = match d {
        Desc::NoDesc => return Err(Error::NoView(t.to_string())),
        Desc::Scalar(_) | Desc::ArrayLike { .. } | Desc::Abstract { .. } | Desc::Opaque { .. } => {
            (SumProd::Base(resolved), true)
        }
        Desc::Synonym { .. } => unreachable!("synonyms are resolved"),
        Desc::Variant(v) => {
            let alts = v
                .con_list()
                .iter()
                .map(|c| SumProd::Con(c.name.clone(), Box::new(con_structure(c, false))))
                .collect();
            let iso = alternatives_iso(&resolved, v.con_list().to_vec());
            (SumProd::Iso(Box::new(sum_of(alts)), iso), true)
        }
        Desc::Extensible(e) => {
            let cons = e.ext_con_list();
            let alts = cons
                .iter()
                .map(|c| SumProd::Con(c.name.clone(), Box::new(con_structure(c, false))))
                .collect();
            let iso = alternatives_iso(&resolved, cons);
            // Constructors may still be added, so the view is rebuilt on demand.
            (SumProd::Iso(Box::new(sum_of(alts)), iso), false)
        }
        Desc::Record(r) => {
            let c = r.constructor();
            let body = SumProd::Con(c.name.clone(), Box::new(con_structure(c, true)));
            (SumProd::Iso(Box::new(body), alternatives_iso(&resolved, vec![c.clone()])), true)
        }
        Desc::Product(p) => {
            let c = p.constructor();
            (
                SumProd::Iso(Box::new(con_structure(c, false)), alternatives_iso(&resolved, vec![c.clone()])),
                true,
            )
        }
    };
    if cacheable {
        SUMPROD_CACHE.write().unwrap().insert(t.clone(), sp.clone());
    }
    Ok(sp)
}

/// Identifies a constructor of a declared type.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConMeta {
    pub con_name: String,
    pub variant_name: String,
    pub module_path: Vec<String>,
    pub arity: usize,
    pub tag: Option<u32>,
    pub constant: bool,
}

impl ConMeta {
    pub fn of(c: &Constructor) -> Self {
        ConMeta {
            con_name: c.name.clone(),
            variant_name: c.type_name.clone(),
            module_path: c.module_path.clone(),
            arity: c.arity(),
            tag: c.tag(),
            constant: matches!(c.kind, ConKind::Constant(_)),
        }
    }
}

/// A constructor awaiting its arguments.
#[derive(Clone, Debug)]
pub struct ConNode {
    pub meta: ConMeta,
    con: Arc<Constructor>,
}

impl ConNode {
    pub fn constructor(&self) -> &Arc<Constructor> {
        &self.con
    }
}

impl PartialEq for ConNode {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta
    }
}

/// A typed value seen as a constructor applied to its arguments.
#[derive(Clone, Debug, PartialEq)]
pub enum Spine {
    Con(ConNode),
    App(Box<Spine>, TypeRep, Value),
}

impl Spine {
    /// Arguments with their types, in application order.
    pub fn args(&self) -> Vec<(TypeRep, Value)> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Spine::App(f, t, v) = cur {
            out.push((t.clone(), v.clone()));
            cur = f;
        }
        out.reverse();
        out
    }

    pub fn head(&self) -> &ConNode {
        let mut cur = self;
        loop {
            match cur {
                Spine::Con(c) => return c,
                Spine::App(f, _, _) => cur = f,
            }
        }
    }

    /// Applies the constructor to the arguments left to right.
    pub fn rebuild(&self) -> Result<Value> {
        let args = self.args().into_iter().map(|(_, v)| v).collect();
        self.head().con.embed(args)
    }
}

pub fn spine(t: &TypeRep, v: &Value) -> Result<Spine> {
    let ConApp { con, args } = desc::conap(t, v)?;
    let node = Spine::Con(ConNode {
        meta: ConMeta::of(&con),
        con: con.clone(),
    });
    Ok(con
        .fields
        .iter()
        .zip(args)
        .fold(node, |acc, (f, a)| Spine::App(Box::new(acc), f.ty.clone(), a)))
}

/// Every type seen as a variant; base types have no constructors.
pub fn conlist(t: &TypeRep) -> Vec<Arc<Constructor>> {
    match desc::resolve_synonyms(t).1 {
        Desc::Variant(v) => v.con_list().to_vec(),
        Desc::Record(r) => vec![r.constructor().clone()],
        Desc::Product(p) => vec![p.constructor().clone()],
        Desc::Extensible(e) => e.ext_con_list(),
        _ => vec![],
    }
}

/// First constructor in `cs` whose projection accepts `v`.
pub fn conlist_conap(cs: &[Arc<Constructor>], v: &Value) -> Result<ConApp> {
    cs.iter()
        .find_map(|c| {
            c.proj(v).map(|args| ConApp {
                con: c.clone(),
                args,
            })
        })
        .ok_or(Error::NoMatchingConstructor)
}
