//! Multi-type traversals. Every constructor argument is a child, whatever
//! its type, and a [`Plate`] supplies the transformation for each type.

use std::fmt;
use std::sync::Arc;

use crate::desc::ProductShape;
use crate::effects::{
    app_of_mon, const_applicative, identity_applicative, lift_a2, run_const, run_identity, Applicative, Brand,
    Effectful, Monad, Monoid,
};
use crate::error::{Error, Result};
use crate::generics::grow;
use crate::typerep::{ty_equal, Dyn, TypeRep};
use crate::value::{Func, Value};
use crate::views;

/// Depth beyond which family traversals give up.
pub const MAX_DEPTH: usize = 100_000;

type RebuildFn = Arc<dyn Fn(Vec<Value>) -> Result<Value> + Send + Sync>;

/// All children of a value, with their types, and the rebuilding function.
#[derive(Clone)]
pub struct Scrapped {
    pub shape: ProductShape,
    pub values: Vec<Value>,
    rebuild: RebuildFn,
}

impl Scrapped {
    pub fn rebuild(&self, values: Vec<Value>) -> Result<Value> {
        (self.rebuild)(values)
    }

    /// Children as right-nested pairs.
    pub fn product(&self) -> Value {
        self.shape.nest(&self.values).expect("values match the shape")
    }
}

pub fn scrap_m(t: &TypeRep, v: &Value) -> Result<Scrapped> {
    let cs = views::conlist(t);
    if cs.is_empty() {
        let v = v.clone();
        return Ok(Scrapped {
            shape: ProductShape::default(),
            values: vec![],
            rebuild: Arc::new(move |xs| {
                if xs.is_empty() {
                    Ok(v.clone())
                } else {
                    Err(Error::ArityMismatch {
                        what: "children".into(),
                        expected: 0,
                        found: xs.len(),
                    })
                }
            }),
        });
    }
    let app = views::conlist_conap(&cs, v)?;
    let con = app.con.clone();
    Ok(Scrapped {
        shape: app.con.shape(),
        values: app.args,
        rebuild: Arc::new(move |xs| con.embed(xs)),
    })
}

type PlateFn = Arc<dyn Fn(&TypeRep, Value) -> Result<Effectful> + Send + Sync>;

/// A type-indexed effectful transformation.
#[derive(Clone)]
pub struct Plate {
    pub brand: Brand,
    f: PlateFn,
}

impl fmt::Debug for Plate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Plate[{}]", self.brand)
    }
}

impl Plate {
    pub fn new(brand: Brand, f: impl Fn(&TypeRep, Value) -> Result<Effectful> + Send + Sync + 'static) -> Self {
        Plate { brand, f: Arc::new(f) }
    }

    /// `pure` at every type.
    pub fn pure(a: &Applicative) -> Self {
        let a = a.clone();
        Plate::new(a.brand.clone(), move |_, v| Ok(a.pure(v)))
    }

    /// Uses `f` at type `t` and this plate elsewhere.
    pub fn with_case(
        self,
        t: &TypeRep,
        f: impl Fn(Value) -> Result<Effectful> + Send + Sync + 'static,
    ) -> Self {
        let t = t.clone();
        let brand = self.brand.clone();
        Plate::new(brand, move |ty, v| {
            if ty_equal(ty, &t).is_some() {
                f(v)
            } else {
                self.apply(ty, v)
            }
        })
    }

    pub fn apply(&self, t: &TypeRep, v: Value) -> Result<Effectful> {
        let r = (self.f)(t, v)?;
        if r.brand() != &self.brand {
            return Err(Error::BrandMismatch {
                expected: self.brand.to_string(),
                found: r.brand().to_string(),
            });
        }
        Ok(r)
    }
}

type IdFn = Arc<dyn Fn(&TypeRep, Value) -> Result<Value> + Send + Sync>;

/// A plate in the identity effect: a plain type-indexed map.
#[derive(Clone)]
pub struct IdPlate(IdFn);

impl IdPlate {
    pub fn new(f: impl Fn(&TypeRep, Value) -> Result<Value> + Send + Sync + 'static) -> Self {
        IdPlate(Arc::new(f))
    }

    pub fn identity() -> Self {
        IdPlate::new(|_, v| Ok(v))
    }

    pub fn apply(&self, t: &TypeRep, v: Value) -> Result<Value> {
        (self.0)(t, v)
    }

    pub fn to_plate(&self) -> Plate {
        let f = self.0.clone();
        let a = identity_applicative();
        Plate::new(Brand::Identity, move |t, v| Ok(a.pure(f(t, v)?)))
    }

    pub fn of_plate(p: Plate) -> Self {
        IdPlate::new(move |t, v| run_identity(&p.apply(t, v)?))
    }
}

type ConstFn = Arc<dyn Fn(&TypeRep, &Value) -> Result<Value> + Send + Sync>;

/// A plate in a constant effect: a type-indexed query into a monoid.
#[derive(Clone)]
pub struct ConstPlate {
    monoid: Monoid,
    f: ConstFn,
}

impl ConstPlate {
    pub fn new(monoid: &Monoid, f: impl Fn(&TypeRep, &Value) -> Result<Value> + Send + Sync + 'static) -> Self {
        ConstPlate {
            monoid: monoid.clone(),
            f: Arc::new(f),
        }
    }

    pub fn monoid(&self) -> &Monoid {
        &self.monoid
    }

    pub fn apply(&self, t: &TypeRep, v: &Value) -> Result<Value> {
        (self.f)(t, v)
    }

    pub fn to_plate(&self) -> Plate {
        let (f, m) = (self.f.clone(), self.monoid.clone());
        Plate::new(Brand::Const(m.name.clone()), move |t, v| {
            Ok(crate::effects::const_effect(&m, f(t, &v)?))
        })
    }

    pub fn of_plate(monoid: &Monoid, p: Plate) -> Self {
        ConstPlate::new(monoid, move |t, v| run_const(&p.apply(t, v.clone())?))
    }
}

/// Applies `p` to every child, left to right, then rebuilds.
pub fn traverse_children_p(a: &Applicative, p: &Plate) -> Plate {
    let (a, p) = (a.clone(), p.clone());
    Plate::new(a.brand.clone(), move |t, v| traverse_children_with(&a, &p, t, &v))
}

fn traverse_children_with(a: &Applicative, p: &Plate, t: &TypeRep, v: &Value) -> Result<Effectful> {
    let s = scrap_m(t, v)?;
    let effects = s
        .shape
        .components()
        .iter()
        .zip(&s.values)
        .map(|(ty, x)| p.apply(ty, x.clone()))
        .collect::<Result<Vec<_>>>()?;
    let pair: crate::effects::Binary = Arc::new(|x, y| Ok(Value::pair(x, y)));
    let product = effects
        .into_iter()
        .rev()
        .try_fold(a.pure(Value::unit()), |acc, e| lift_a2(a, pair.clone(), e, acc))?;
    let rebuild = Func::try_new(move |nested| {
        let xs = s
            .shape
            .unnest(nested)
            .ok_or_else(|| Error::MalformedValue("product traversal lost its shape".into()))?;
        s.rebuild(xs)
    });
    crate::effects::fun_of_app(a).fmap(rebuild, product)
}

pub fn map_children_p(p: &IdPlate) -> IdPlate {
    IdPlate::of_plate(traverse_children_p(&identity_applicative(), &p.to_plate()))
}

/// Combines the results of `p` on every child; `empty` for leaves.
pub fn fold_children_p(m: &Monoid, p: &ConstPlate) -> ConstPlate {
    ConstPlate::of_plate(m, traverse_children_p(&const_applicative(m), &p.to_plate()))
}

/// Post-order: children's families first, then `p` at the node.
pub fn traverse_family_p(m: &Monad, p: &Plate) -> Plate {
    let (m, p) = (m.clone(), p.clone());
    Plate::new(m.brand.clone(), move |t, v| family_go(&m, &p, t, v, 0))
}

fn family_go(m: &Monad, p: &Plate, t: &TypeRep, v: Value, depth: usize) -> Result<Effectful> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthExceeded(MAX_DEPTH));
    }
    grow(|| {
        let (m2, p2) = (m.clone(), p.clone());
        let below = Plate::new(m.brand.clone(), move |ty, x| family_go(&m2, &p2, ty, x, depth + 1));
        let inner = traverse_children_with(&app_of_mon(m), &below, t, &v)?;
        let (p3, t3) = (p.clone(), t.clone());
        m.bind_fn(inner, move |x| p3.apply(&t3, x))
    })
}

pub fn map_family_p(p: &IdPlate) -> IdPlate {
    IdPlate::of_plate(traverse_family_p(&crate::effects::identity_monad(), &p.to_plate()))
}

fn fold_family(m: &Monoid, p: &ConstPlate, t: &TypeRep, v: &Value, node_first: bool, depth: usize) -> Result<Value> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthExceeded(MAX_DEPTH));
    }
    grow(|| {
        let s = scrap_m(t, v)?;
        let mut below = m.empty.clone();
        for (ty, x) in s.shape.components().iter().zip(&s.values) {
            below = m.combine(&below, &fold_family(m, p, ty, x, node_first, depth + 1)?);
        }
        let here = p.apply(t, v)?;
        Ok(if node_first {
            m.combine(&here, &below)
        } else {
            m.combine(&below, &here)
        })
    })
}

/// Folds over the whole family; the node's own result comes after its
/// descendants'.
pub fn pre_fold_p(m: &Monoid, p: &ConstPlate) -> ConstPlate {
    let (m2, p) = (m.clone(), p.clone());
    ConstPlate::new(m, move |t, v| fold_family(&m2, &p, t, v, false, 0))
}

/// Folds over the whole family; the node's own result comes before its
/// descendants', so a singleton-list plate yields preorder.
pub fn post_fold_p(m: &Monoid, p: &ConstPlate) -> ConstPlate {
    let (m2, p) = (m.clone(), p.clone());
    ConstPlate::new(m, move |t, v| fold_family(&m2, &p, t, v, true, 0))
}

type ParaStep = Arc<dyn Fn(&TypeRep, &Value, Vec<Value>) -> Result<Value> + Send + Sync>;

/// Paramorphism over all children. `step` sees each node with its
/// children's results in shape order.
pub fn para_p(m: &Monoid, step: ParaStep) -> ConstPlate {
    fn go(step: &ParaStep, t: &TypeRep, v: &Value, depth: usize) -> Result<Value> {
        if depth > MAX_DEPTH {
            return Err(Error::DepthExceeded(MAX_DEPTH));
        }
        grow(|| {
            let s = scrap_m(t, v)?;
            let rs = s
                .shape
                .components()
                .iter()
                .zip(&s.values)
                .map(|(ty, x)| go(step, ty, x, depth + 1))
                .collect::<Result<Vec<_>>>()?;
            step(t, v, rs)
        })
    }
    ConstPlate::new(m, move |t, v| go(&step, t, v, 0))
}

pub fn children_dyn(t: &TypeRep, v: &Value) -> Result<Vec<Dyn>> {
    let s = scrap_m(t, v)?;
    Ok(s.shape
        .components()
        .iter()
        .zip(s.values)
        .map(|(ty, x)| Dyn::new(ty.clone(), x))
        .collect())
}

/// The value and all its descendants of every type, in preorder.
pub fn family_dyn(t: &TypeRep, v: &Value) -> Result<Vec<Dyn>> {
    let mut out = Vec::new();
    let mut stack = vec![(Dyn::new(t.clone(), v.clone()), 0usize)];
    while let Some((d, depth)) = stack.pop() {
        if depth > MAX_DEPTH {
            return Err(Error::DepthExceeded(MAX_DEPTH));
        }
        let cs = children_dyn(&d.rep, &d.value)?;
        stack.extend(cs.into_iter().rev().map(|c| (c, depth + 1)));
        out.push(d);
    }
    Ok(out)
}

type RunFn = Arc<dyn Fn(&OpenRec) -> Plate + Send + Sync>;

/// An open-recursive plate builder; [`OpenRec::tie`] closes the knot.
#[derive(Clone)]
pub struct OpenRec {
    run: RunFn,
}

impl OpenRec {
    pub fn new(run: impl Fn(&OpenRec) -> Plate + Send + Sync + 'static) -> Self {
        OpenRec { run: Arc::new(run) }
    }

    pub fn run(&self, r: &OpenRec) -> Plate {
        (self.run)(r)
    }

    pub fn tie(&self) -> Plate {
        self.run(self)
    }

    /// Handles type `t` with `f`, which receives the tied recursion.
    pub fn override_type(
        self,
        t: &TypeRep,
        f: impl Fn(&OpenRec, Value) -> Result<Effectful> + Send + Sync + 'static,
    ) -> Self {
        let t = t.clone();
        let f = Arc::new(f);
        OpenRec::new(move |r| {
            let base = self.run(r);
            let (t, f, r) = (t.clone(), f.clone(), r.clone());
            Plate::new(base.brand.clone(), move |ty, v| {
                if ty_equal(ty, &t).is_some() {
                    f(&r, v)
                } else {
                    base.apply(ty, v)
                }
            })
        })
    }
}

/// Continues the recursion below every node.
pub fn default_openrec(a: &Applicative) -> OpenRec {
    let a = a.clone();
    OpenRec::new(move |r| {
        let r = r.clone();
        // The recursive plate is built only when a child is reached.
        let lazy = Plate::new(a.brand.clone(), move |t, v| r.tie().apply(t, v));
        traverse_children_p(&a, &lazy)
    })
}
