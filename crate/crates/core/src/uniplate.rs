//! Single-type traversals. The children of a value are the constructor
//! arguments whose type is the value's own type.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::effects::{app_of_mon, traverse_list, Applicative, Effectful, Kleisli, Monad};
use crate::error::{Error, Result};
use crate::generics::grow;
use crate::typerep::{ty_equal, TypeRep};
use crate::value::{Func, Value};
use crate::views;

/// Rule firings allowed to a rewrite before it gives up.
pub const DEFAULT_FUEL: u64 = 1_000_000;

type RebuildFn = Arc<dyn Fn(Vec<Value>) -> Result<Value> + Send + Sync>;

/// Same-typed children of a value and a function putting new ones back.
#[derive(Clone)]
pub struct Scrap {
    pub children: Vec<Value>,
    rebuild: RebuildFn,
}

impl Scrap {
    /// Fails with `ArityMismatch` unless given exactly as many values as
    /// there are children.
    pub fn rebuild(&self, children: Vec<Value>) -> Result<Value> {
        (self.rebuild)(children)
    }
}

pub fn scrap(t: &TypeRep, v: &Value) -> Result<Scrap> {
    let cs = views::conlist(t);
    if cs.is_empty() {
        let v = v.clone();
        return Ok(Scrap {
            children: vec![],
            rebuild: Arc::new(move |cs| {
                if cs.is_empty() {
                    Ok(v.clone())
                } else {
                    Err(Error::ArityMismatch {
                        what: "children".into(),
                        expected: 0,
                        found: cs.len(),
                    })
                }
            }),
        });
    }
    let app = views::conlist_conap(&cs, v)?;
    let positions: Vec<usize> = app
        .con
        .fields
        .iter()
        .filter(|f| ty_equal(&f.ty, t).is_some())
        .map(|f| f.index())
        .collect();
    let children = positions.iter().map(|&i| app.args[i].clone()).collect();
    Ok(Scrap {
        children,
        rebuild: Arc::new(move |new| {
            if new.len() != positions.len() {
                return Err(Error::ArityMismatch {
                    what: "children".into(),
                    expected: positions.len(),
                    found: new.len(),
                });
            }
            let mut args = app.args.clone();
            for (&i, c) in positions.iter().zip(new) {
                args[i] = c;
            }
            app.con.embed(args)
        }),
    })
}

pub fn children(t: &TypeRep, v: &Value) -> Result<Vec<Value>> {
    Ok(scrap(t, v)?.children)
}

pub fn replace_children(t: &TypeRep, v: &Value, cs: Vec<Value>) -> Result<Value> {
    scrap(t, v)?.rebuild(cs)
}

/// The value and all its descendants, in preorder.
pub fn family(t: &TypeRep, v: &Value) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    let mut stack = vec![v.clone()];
    while let Some(x) = stack.pop() {
        stack.extend(children(t, &x)?.into_iter().rev());
        out.push(x);
    }
    Ok(out)
}

/// Bottom-up fold where each step sees the node and its children's results.
pub fn para<R>(t: &TypeRep, step: &dyn Fn(&Value, Vec<R>) -> R, v: &Value) -> Result<R> {
    grow(|| {
        let rs = children(t, v)?
            .iter()
            .map(|c| para(t, step, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(step(v, rs))
    })
}

pub fn map_children(t: &TypeRep, f: &dyn Fn(Value) -> Value, v: &Value) -> Result<Value> {
    try_map_children(t, &|x| Ok(f(x)), v)
}

pub fn try_map_children(t: &TypeRep, f: &dyn Fn(Value) -> Result<Value>, v: &Value) -> Result<Value> {
    let s = scrap(t, v)?;
    let new = s.children.iter().cloned().map(f).collect::<Result<Vec<_>>>()?;
    s.rebuild(new)
}

/// Applies `f` to every node after the node's children have been mapped.
pub fn map_family(t: &TypeRep, f: &dyn Fn(Value) -> Value, v: &Value) -> Result<Value> {
    try_map_family(t, &|x| Ok(f(x)), v)
}

pub fn try_map_family(t: &TypeRep, f: &dyn Fn(Value) -> Result<Value>, v: &Value) -> Result<Value> {
    grow(|| f(try_map_children(t, &|c| try_map_family(t, f, &c), v)?))
}

/// Rewrites until `rule` applies nowhere in the result.
pub fn reduce_family(t: &TypeRep, rule: &dyn Fn(&Value) -> Option<Value>, v: &Value) -> Result<Value> {
    reduce_family_with_fuel(t, rule, v, DEFAULT_FUEL)
}

pub fn reduce_family_with_fuel(
    t: &TypeRep,
    rule: &dyn Fn(&Value) -> Option<Value>,
    v: &Value,
    fuel: u64,
) -> Result<Value> {
    fn go(t: &TypeRep, rule: &dyn Fn(&Value) -> Option<Value>, v: &Value, left: &mut u64, fuel: u64) -> Result<Value> {
        grow(|| {
            let s = scrap(t, v)?;
            let mut new = Vec::with_capacity(s.children.len());
            for c in &s.children {
                new.push(go(t, rule, c, left, fuel)?);
            }
            let x = s.rebuild(new)?;
            match rule(&x) {
                None => Ok(x),
                Some(y) => {
                    if *left == 0 {
                        return Err(Error::FuelExhausted(fuel));
                    }
                    *left -= 1;
                    go(t, rule, &y, left, fuel)
                }
            }
        })
    }
    let mut left = fuel;
    go(t, rule, v, &mut left, fuel)
}

/// Applies an effectful function to each child and rebuilds inside the effect.
pub fn traverse_children(
    a: &Applicative,
    t: &TypeRep,
    f: &dyn Fn(Value) -> Result<Effectful>,
    v: &Value,
) -> Result<Effectful> {
    let s = scrap(t, v)?;
    let effects = traverse_list(a, f, s.children.clone())?;
    let rebuild = Func::try_new(move |l| {
        let cs = l
            .to_vec()
            .ok_or_else(|| Error::MalformedValue("traversal did not produce a list".into()))?;
        s.rebuild(cs)
    });
    crate::effects::fun_of_app(a).fmap(rebuild, effects)
}

/// Monadic bottom-up map.
pub fn traverse_family(m: &Monad, t: &TypeRep, f: Kleisli, v: &Value) -> Result<Effectful> {
    grow(|| {
        let a = app_of_mon(m);
        let inner = traverse_children(&a, t, &|c| traverse_family(m, t, f.clone(), &c), v)?;
        m.bind(inner, f.clone())
    })
}

/// Monadic rewrite to normal form. `rule` returns an effect whose payload is
/// an option value.
pub fn mreduce_family(m: &Monad, t: &TypeRep, rule: Kleisli, v: &Value) -> Result<Effectful> {
    mreduce_family_with_fuel(m, t, rule, v, DEFAULT_FUEL)
}

pub fn mreduce_family_with_fuel(
    m: &Monad,
    t: &TypeRep,
    rule: Kleisli,
    v: &Value,
    fuel: u64,
) -> Result<Effectful> {
    struct Env {
        m: Monad,
        t: TypeRep,
        rule: Kleisli,
        left: AtomicU64,
        fuel: u64,
    }

    fn rewrite(env: &Arc<Env>, v: &Value) -> Result<Effectful> {
        grow(|| {
            let a = app_of_mon(&env.m);
            let inner = traverse_children(&a, &env.t, &|c| rewrite(env, &c), v)?;
            let e = env.clone();
            env.m.bind_fn(inner, move |x| step(&e, x))
        })
    }

    fn step(env: &Arc<Env>, x: Value) -> Result<Effectful> {
        let e = env.clone();
        let fired = (env.rule)(x.clone())?;
        env.m.bind_fn(fired, move |o| match o.to_option() {
            Some(None) => Ok(e.m.ret(x.clone())),
            Some(Some(y)) => {
                let ok = e
                    .left
                    .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |n| n.checked_sub(1))
                    .is_ok();
                if !ok {
                    return Err(Error::FuelExhausted(e.fuel));
                }
                rewrite(&e, &y)
            }
            None => Err(Error::MalformedValue(format!("rule returned {o:?}, not an option"))),
        })
    }

    let env = Arc::new(Env {
        m: m.clone(),
        t: t.clone(),
        rule,
        left: AtomicU64::new(fuel),
        fuel,
    });
    rewrite(&env, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effects::{identity_monad, run_identity};

    fn li() -> TypeRep {
        TypeRep::list(TypeRep::int())
    }

    fn ints(xs: &[i64]) -> Value {
        Value::list(xs.iter().map(|&i| Value::Int(i)))
    }

    #[test]
    fn list_scrap() {
        let s = scrap(&li(), &ints(&[1, 2])).unwrap();
        assert_eq!(s.children, vec![ints(&[2])]);
        assert_eq!(s.rebuild(vec![ints(&[9])]).unwrap(), ints(&[1, 9]));
        assert!(matches!(s.rebuild(vec![]), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn scalar_scrap_is_constant() {
        let s = scrap(&TypeRep::int(), &Value::Int(4)).unwrap();
        assert!(s.children.is_empty());
        assert_eq!(s.rebuild(vec![]).unwrap(), Value::Int(4));
    }

    #[test]
    fn family_of_list() {
        let f = family(&li(), &ints(&[1, 2])).unwrap();
        assert_eq!(f, vec![ints(&[1, 2]), ints(&[2]), ints(&[])]);
    }

    #[test]
    fn height_via_para() {
        let h = |v: &Value| para(&li(), &|_, rs: Vec<i64>| rs.into_iter().map(|r| r + 1).max().unwrap_or(0), v);
        assert_eq!(h(&ints(&[])).unwrap(), 0);
        assert_eq!(h(&ints(&[5, 6])).unwrap(), 2);
    }

    #[test]
    fn fuel_is_enforced() {
        let grow_forever = |v: &Value| Some(Value::cons(Value::Int(0), v.clone()));
        assert!(matches!(
            reduce_family_with_fuel(&TypeRep::list(TypeRep::int()), &grow_forever, &ints(&[]), 50),
            Err(Error::FuelExhausted(50))
        ));
    }

    #[test]
    fn identity_traversal_matches_map() {
        let m = identity_monad();
        let inc: Kleisli = Arc::new(|v: Value| {
            let out = match v.to_vec() {
                Some(xs) if !xs.is_empty() => {
                    let mut xs = xs;
                    xs[0] = Value::Int(xs[0].as_int().unwrap() + 1);
                    Value::list(xs)
                }
                _ => v,
            };
            Ok(identity_monad().ret(out))
        });
        let r = traverse_family(&m, &li(), inc, &ints(&[1, 2, 3])).unwrap();
        let direct = map_family(
            &li(),
            &|v| match v.to_vec() {
                Some(mut xs) if !xs.is_empty() => {
                    xs[0] = Value::Int(xs[0].as_int().unwrap() + 1);
                    Value::list(xs)
                }
                _ => v,
            },
            &ints(&[1, 2, 3]),
        )
        .unwrap();
        assert_eq!(run_identity(&r).unwrap(), direct);
    }
}
