//! Effect dictionaries over brand-tagged computations.
//!
//! An [`Effectful`] pairs a [`Brand`] with a closed computation. Dictionaries
//! are records of operations; running a computation under a different brand
//! is reported as [`Error::BrandMismatch`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generics::grow;
use crate::typerep::TypeRep;
use crate::value::{Func, Value};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Brand {
    Identity,
    /// Constant functor accumulating into the named monoid.
    Const(String),
    Reader(TypeRep),
    State(TypeRep),
    Io,
}

impl fmt::Display for Brand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Brand::Identity => f.write_str("identity"),
            Brand::Const(m) => write!(f, "const({m})"),
            Brand::Reader(t) => write!(f, "reader({t})"),
            Brand::State(t) => write!(f, "state({t})"),
            Brand::Io => f.write_str("io"),
        }
    }
}

type ReaderFn = Arc<dyn Fn(&Value) -> Result<Value> + Send + Sync>;
type StateFn = Arc<dyn Fn(Value) -> Result<(Value, Value)> + Send + Sync>;
type IoFn = Arc<dyn Fn() -> Result<Value> + Send + Sync>;

#[derive(Clone)]
enum Comp {
    Pure(Value),
    Const(Value),
    Reader(ReaderFn),
    State(StateFn),
    Io(IoFn),
}

#[derive(Clone)]
pub struct Effectful {
    brand: Brand,
    comp: Comp,
}

impl fmt::Debug for Effectful {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.comp {
            Comp::Pure(v) => write!(f, "Effectful[{}]({v:?})", self.brand),
            Comp::Const(v) => write!(f, "Effectful[{}]({v:?})", self.brand),
            _ => write!(f, "Effectful[{}](..)", self.brand),
        }
    }
}

impl Effectful {
    pub fn brand(&self) -> &Brand {
        &self.brand
    }

    fn expect(&self, brand: &Brand) -> Result<()> {
        if &self.brand == brand {
            Ok(())
        } else {
            Err(Error::BrandMismatch {
                expected: brand.to_string(),
                found: self.brand.to_string(),
            })
        }
    }
}

/// Continuation passed to `bind`.
pub type Kleisli = Arc<dyn Fn(Value) -> Result<Effectful> + Send + Sync>;
pub type Binary = Arc<dyn Fn(Value, Value) -> Result<Value> + Send + Sync>;

type FmapFn = Arc<dyn Fn(Func, Effectful) -> Result<Effectful> + Send + Sync>;
type PureFn = Arc<dyn Fn(Value) -> Effectful + Send + Sync>;
type ApplyFn = Arc<dyn Fn(Effectful, Effectful) -> Result<Effectful> + Send + Sync>;
type BindFn = Arc<dyn Fn(Effectful, Kleisli) -> Result<Effectful> + Send + Sync>;

#[derive(Clone)]
pub struct Functorial {
    pub brand: Brand,
    fmap: FmapFn,
}

impl Functorial {
    pub fn fmap(&self, f: Func, x: Effectful) -> Result<Effectful> {
        x.expect(&self.brand)?;
        (self.fmap)(f, x)
    }
}

#[derive(Clone)]
pub struct Applicative {
    pub brand: Brand,
    pure: PureFn,
    apply: ApplyFn,
}

impl Applicative {
    pub fn pure(&self, v: Value) -> Effectful {
        (self.pure)(v)
    }

    /// `f` must carry a function payload.
    pub fn apply(&self, f: Effectful, x: Effectful) -> Result<Effectful> {
        f.expect(&self.brand)?;
        x.expect(&self.brand)?;
        (self.apply)(f, x)
    }
}

#[derive(Clone)]
pub struct Monad {
    pub brand: Brand,
    ret: PureFn,
    bind: BindFn,
}

impl Monad {
    pub fn ret(&self, v: Value) -> Effectful {
        (self.ret)(v)
    }

    pub fn bind(&self, m: Effectful, k: Kleisli) -> Result<Effectful> {
        m.expect(&self.brand)?;
        (self.bind)(m, k)
    }

    pub fn bind_fn(
        &self,
        m: Effectful,
        k: impl Fn(Value) -> Result<Effectful> + Send + Sync + 'static,
    ) -> Result<Effectful> {
        self.bind(m, Arc::new(k))
    }
}

#[derive(Clone)]
pub struct Monoid {
    pub name: String,
    pub empty: Value,
    combine: CombineFn,
}

type CombineFn = Arc<dyn Fn(&Value, &Value) -> Value + Send + Sync>;

impl Monoid {
    pub fn new(
        name: &str,
        empty: Value,
        combine: impl Fn(&Value, &Value) -> Value + Send + Sync + 'static,
    ) -> Self {
        Monoid {
            name: name.to_string(),
            empty,
            combine: Arc::new(combine),
        }
    }

    pub fn combine(&self, a: &Value, b: &Value) -> Value {
        (self.combine)(a, b)
    }

    pub fn concat(&self, xs: impl IntoIterator<Item = Value>) -> Value {
        xs.into_iter().fold(self.empty.clone(), |acc, x| self.combine(&acc, &x))
    }
}

/// Lists under concatenation.
pub fn list_monoid() -> Monoid {
    Monoid::new("list", Value::nil(), |a, b| {
        let mut items = a.to_vec().unwrap_or_default();
        items.extend(b.to_vec().unwrap_or_default());
        Value::list(items)
    })
}

/// Integers under addition.
pub fn sum_monoid() -> Monoid {
    Monoid::new("sum", Value::Int(0), |a, b| {
        Value::Int(a.as_int().unwrap_or(0).wrapping_add(b.as_int().unwrap_or(0)))
    })
}

fn mismatch(expected: &Brand, found: &Effectful) -> Error {
    Error::BrandMismatch {
        expected: expected.to_string(),
        found: found.brand.to_string(),
    }
}

fn as_func(v: &Value) -> Result<Func> {
    v.as_fun()
        .cloned()
        .ok_or_else(|| Error::ill_typed("Fun(_, _)", format!("{v:?}")))
}

/// Interprets `m` in a reader environment.
fn eval_reader(brand: &Brand, m: &Effectful, env: &Value) -> Result<Value> {
    match &m.comp {
        Comp::Reader(f) if &m.brand == brand => grow(|| f(env)),
        _ => Err(mismatch(brand, m)),
    }
}

fn eval_state(brand: &Brand, m: &Effectful, s: Value) -> Result<(Value, Value)> {
    match &m.comp {
        Comp::State(f) if &m.brand == brand => grow(|| f(s)),
        _ => Err(mismatch(brand, m)),
    }
}

fn eval_io(m: &Effectful) -> Result<Value> {
    match &m.comp {
        Comp::Io(f) if m.brand == Brand::Io => grow(|| f()),
        _ => Err(mismatch(&Brand::Io, m)),
    }
}

pub fn identity_monad() -> Monad {
    let brand = Brand::Identity;
    Monad {
        brand: brand.clone(),
        ret: Arc::new(|v| Effectful {
            brand: Brand::Identity,
            comp: Comp::Pure(v),
        }),
        bind: Arc::new(move |m, k| match m.comp {
            Comp::Pure(v) => {
                let r = k(v)?;
                r.expect(&brand)?;
                Ok(r)
            }
            _ => Err(mismatch(&brand, &m)),
        }),
    }
}

pub fn identity_functor() -> Functorial {
    Functorial {
        brand: Brand::Identity,
        fmap: Arc::new(|f, x| match x.comp {
            Comp::Pure(v) => Ok(Effectful {
                brand: Brand::Identity,
                comp: Comp::Pure(f.call(&v)?),
            }),
            _ => Err(mismatch(&Brand::Identity, &x)),
        }),
    }
}

pub fn identity_applicative() -> Applicative {
    app_of_mon(&identity_monad())
}

pub fn run_identity(m: &Effectful) -> Result<Value> {
    match &m.comp {
        Comp::Pure(v) if m.brand == Brand::Identity => Ok(v.clone()),
        _ => Err(mismatch(&Brand::Identity, m)),
    }
}

/// Constant applicative: effects are monoid values combined left to right
/// and the payload is discarded.
pub fn const_applicative(m: &Monoid) -> Applicative {
    let brand = Brand::Const(m.name.clone());
    let (b1, b2) = (brand.clone(), brand.clone());
    let empty = m.empty.clone();
    let monoid = m.clone();
    Applicative {
        brand,
        pure: Arc::new(move |_| Effectful {
            brand: b1.clone(),
            comp: Comp::Const(empty.clone()),
        }),
        apply: Arc::new(move |f, x| match (&f.comp, &x.comp) {
            (Comp::Const(a), Comp::Const(b)) => Ok(Effectful {
                brand: b2.clone(),
                comp: Comp::Const(monoid.combine(a, b)),
            }),
            _ => Err(mismatch(&b2, &x)),
        }),
    }
}

pub fn const_functor(m: &Monoid) -> Functorial {
    let brand = Brand::Const(m.name.clone());
    Functorial {
        brand,
        fmap: Arc::new(|_, x| Ok(x)),
    }
}

/// A constant effect carrying `log`.
pub fn const_effect(m: &Monoid, log: Value) -> Effectful {
    Effectful {
        brand: Brand::Const(m.name.clone()),
        comp: Comp::Const(log),
    }
}

pub fn run_const(m: &Effectful) -> Result<Value> {
    match &m.comp {
        Comp::Const(v) => Ok(v.clone()),
        _ => Err(Error::BrandMismatch {
            expected: "const".into(),
            found: m.brand.to_string(),
        }),
    }
}

pub fn reader_monad(env: &TypeRep) -> Monad {
    let brand = Brand::Reader(env.clone());
    let (b1, b2) = (brand.clone(), brand.clone());
    Monad {
        brand,
        ret: Arc::new(move |v| Effectful {
            brand: b1.clone(),
            comp: Comp::Reader(Arc::new(move |_| Ok(v.clone()))),
        }),
        bind: Arc::new(move |m, k| {
            let b = b2.clone();
            Ok(Effectful {
                brand: b2.clone(),
                comp: Comp::Reader(Arc::new(move |env| {
                    let a = eval_reader(&b, &m, env)?;
                    eval_reader(&b, &k(a)?, env)
                })),
            })
        }),
    }
}

pub fn reader_functor(env: &TypeRep) -> Functorial {
    let brand = Brand::Reader(env.clone());
    let b = brand.clone();
    Functorial {
        brand,
        fmap: Arc::new(move |f, x| {
            let inner = b.clone();
            Ok(Effectful {
                brand: b.clone(),
                comp: Comp::Reader(Arc::new(move |env| f.call(&eval_reader(&inner, &x, env)?))),
            })
        }),
    }
}

/// Returns the environment.
pub fn ask(env: &TypeRep) -> Effectful {
    Effectful {
        brand: Brand::Reader(env.clone()),
        comp: Comp::Reader(Arc::new(|e| Ok(e.clone()))),
    }
}

/// Runs `r` in the environment transformed by `modify`.
pub fn local(modify: Func, r: Effectful) -> Result<Effectful> {
    let Brand::Reader(_) = &r.brand else {
        return Err(Error::BrandMismatch {
            expected: "reader".into(),
            found: r.brand.to_string(),
        });
    };
    let brand = r.brand.clone();
    let b = brand.clone();
    Ok(Effectful {
        brand,
        comp: Comp::Reader(Arc::new(move |env| eval_reader(&b, &r, &modify.call(env)?))),
    })
}

pub fn run_reader(r: &Effectful, env: &Value) -> Result<Value> {
    match &r.brand {
        Brand::Reader(_) => eval_reader(&r.brand, r, env),
        _ => Err(Error::BrandMismatch {
            expected: "reader".into(),
            found: r.brand.to_string(),
        }),
    }
}

pub fn state_monad(state: &TypeRep) -> Monad {
    let brand = Brand::State(state.clone());
    let (b1, b2) = (brand.clone(), brand.clone());
    Monad {
        brand,
        ret: Arc::new(move |v| Effectful {
            brand: b1.clone(),
            comp: Comp::State(Arc::new(move |s| Ok((v.clone(), s)))),
        }),
        bind: Arc::new(move |m, k| {
            let b = b2.clone();
            Ok(Effectful {
                brand: b2.clone(),
                comp: Comp::State(Arc::new(move |s| {
                    let (a, s1) = eval_state(&b, &m, s)?;
                    eval_state(&b, &k(a)?, s1)
                })),
            })
        }),
    }
}

pub fn state_functor(state: &TypeRep) -> Functorial {
    let brand = Brand::State(state.clone());
    let b = brand.clone();
    Functorial {
        brand,
        fmap: Arc::new(move |f, x| {
            let inner = b.clone();
            Ok(Effectful {
                brand: b.clone(),
                comp: Comp::State(Arc::new(move |s| {
                    let (a, s1) = eval_state(&inner, &x, s)?;
                    Ok((f.call(&a)?, s1))
                })),
            })
        }),
    }
}

pub fn get(state: &TypeRep) -> Effectful {
    Effectful {
        brand: Brand::State(state.clone()),
        comp: Comp::State(Arc::new(|s| Ok((s.clone(), s)))),
    }
}

pub fn put(state: &TypeRep, new: Value) -> Effectful {
    Effectful {
        brand: Brand::State(state.clone()),
        comp: Comp::State(Arc::new(move |_| Ok((Value::unit(), new.clone())))),
    }
}

/// Final payload and state.
pub fn run_state(m: &Effectful, s0: Value) -> Result<(Value, Value)> {
    match &m.brand {
        Brand::State(_) => eval_state(&m.brand, m, s0),
        _ => Err(Error::BrandMismatch {
            expected: "state".into(),
            found: m.brand.to_string(),
        }),
    }
}

pub fn io_monad() -> Monad {
    Monad {
        brand: Brand::Io,
        ret: Arc::new(|v| Effectful {
            brand: Brand::Io,
            comp: Comp::Io(Arc::new(move || Ok(v.clone()))),
        }),
        bind: Arc::new(|m, k| {
            Ok(Effectful {
                brand: Brand::Io,
                comp: Comp::Io(Arc::new(move || eval_io(&k(eval_io(&m)?)?))),
            })
        }),
    }
}

pub fn io_functor() -> Functorial {
    Functorial {
        brand: Brand::Io,
        fmap: Arc::new(|f, x| {
            Ok(Effectful {
                brand: Brand::Io,
                comp: Comp::Io(Arc::new(move || f.call(&eval_io(&x)?))),
            })
        }),
    }
}

/// Suspends `thunk` until [`run_io`] forces it.
pub fn embed_io(thunk: impl Fn() -> Result<Value> + Send + Sync + 'static) -> Effectful {
    Effectful {
        brand: Brand::Io,
        comp: Comp::Io(Arc::new(thunk)),
    }
}

pub fn run_io(m: &Effectful) -> Result<Value> {
    eval_io(m)
}

/// `fmap f x = apply (pure f) x`.
pub fn fun_of_app(a: &Applicative) -> Functorial {
    let app = a.clone();
    Functorial {
        brand: a.brand.clone(),
        fmap: Arc::new(move |f, x| app.apply(app.pure(Value::Fun(f)), x)),
    }
}

/// `fmap f x = bind x (return . f)`.
pub fn fun_of_mon(m: &Monad) -> Functorial {
    let mon = m.clone();
    Functorial {
        brand: m.brand.clone(),
        fmap: Arc::new(move |f, x| {
            let ret = mon.ret.clone();
            mon.bind(x, Arc::new(move |v| Ok(ret(f.call(&v)?))))
        }),
    }
}

/// `pure = return`, `apply mf mx = mf >>= \f -> mx >>= \x -> return (f x)`.
pub fn app_of_mon(m: &Monad) -> Applicative {
    let mon = m.clone();
    Applicative {
        brand: m.brand.clone(),
        pure: m.ret.clone(),
        apply: Arc::new(move |mf, mx| {
            let inner = mon.clone();
            mon.bind(
                mf,
                Arc::new(move |f| {
                    let f = as_func(&f)?;
                    let ret = inner.ret.clone();
                    inner.bind(mx.clone(), Arc::new(move |x| Ok(ret(f.call(&x)?))))
                }),
            )
        }),
    }
}

/// Runs `x` then `y` and combines their payloads with `f`.
pub fn lift_a2(a: &Applicative, f: Binary, x: Effectful, y: Effectful) -> Result<Effectful> {
    let curried = Value::Fun(Func::new(move |u| {
        let (f, u) = (f.clone(), u.clone());
        Value::Fun(Func::try_new(move |w| f(u.clone(), w.clone())))
    }));
    let partial = a.apply(a.pure(curried), x)?;
    a.apply(partial, y)
}

fn cons_fn() -> Binary {
    Arc::new(|h, t| Ok(Value::cons(h, t)))
}

/// Applies `f` to every element, sequencing the effects left to right.
pub fn traverse_list(
    a: &Applicative,
    f: &dyn Fn(Value) -> Result<Effectful>,
    xs: Vec<Value>,
) -> Result<Effectful> {
    let effects = xs.into_iter().map(f).collect::<Result<Vec<_>>>()?;
    sequence_list(a, effects)
}

pub fn sequence_list(a: &Applicative, effects: Vec<Effectful>) -> Result<Effectful> {
    effects
        .into_iter()
        .rev()
        .try_fold(a.pure(Value::nil()), |acc, e| lift_a2(a, cons_fn(), e, acc))
}

pub fn traverse_m(
    m: &Monad,
    f: &dyn Fn(Value) -> Result<Effectful>,
    xs: Vec<Value>,
) -> Result<Effectful> {
    traverse_list(&app_of_mon(m), f, xs)
}

pub fn sequence_m(m: &Monad, effects: Vec<Effectful>) -> Result<Effectful> {
    sequence_list(&app_of_mon(m), effects)
}
