//! Functor, applicative and monad laws, checked by running both sides.

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;
use reflectix::effects::{
    self, ask, const_applicative, const_effect, const_functor, fun_of_mon, get, identity_applicative,
    identity_functor, identity_monad, list_monoid, local, put, reader_monad, run_const, run_identity, run_reader,
    run_state, state_monad, Applicative, Effectful, Functorial, Kleisli, Monad,
};
use reflectix::typerep::TypeRep;
use reflectix::value::{Func, Value};

type Observe = Box<dyn Fn(&Effectful) -> Value>;
type Sampler = Box<dyn Fn(&mut StdRng) -> Effectful>;
type KleisliSampler = Box<dyn Fn(&mut StdRng) -> Kleisli>;

/// One effect interpretation under test.
pub struct Subject {
    pub name: &'static str,
    functor: Functorial,
    app: Applicative,
    monad: Option<Monad>,
    observe: Observe,
    sample: Sampler,
    kleisli: KleisliSampler,
}

fn int(v: &Value) -> i64 {
    v.as_int().expect("int payload")
}

fn adder(k: i64) -> Func {
    Func::new(move |v| Value::Int(int(v).wrapping_add(k)))
}

fn scaler(k: i64) -> Func {
    Func::new(move |v| Value::Int(int(v).wrapping_mul(k)))
}

fn int_fn(r: &mut StdRng) -> Func {
    let k = r.random_range(-5..=5);
    if r.random_bool(0.5) {
        adder(k)
    } else {
        scaler(k)
    }
}

fn unwrap(e: reflectix::Result<Effectful>) -> Effectful {
    e.expect("effect construction")
}

pub fn identity() -> Subject {
    Subject {
        name: "identity",
        functor: identity_functor(),
        app: identity_applicative(),
        monad: Some(identity_monad()),
        observe: Box::new(|e| run_identity(e).expect("identity run")),
        sample: Box::new(|r| identity_monad().ret(Value::Int(r.random_range(-100..=100)))),
        kleisli: Box::new(|r| {
            let (c, d) = (r.random_range(-4..=4), r.random_range(-4..=4));
            Arc::new(move |a| Ok(identity_monad().ret(Value::Int(int(&a) * c + d))))
        }),
    }
}

pub fn const_list() -> Subject {
    let m = list_monoid();
    let sample_monoid = m.clone();
    Subject {
        name: "const(list)",
        functor: const_functor(&m),
        app: const_applicative(&m),
        monad: None,
        observe: Box::new(|e| run_const(e).expect("const run")),
        sample: Box::new(move |r| {
            let n = r.random_range(0..4);
            let log = Value::list((0..n).map(|_| Value::Int(r.random_range(0..10))));
            const_effect(&sample_monoid, log)
        }),
        kleisli: Box::new(|_| unreachable!("const has no monad")),
    }
}

fn env_ty() -> TypeRep {
    TypeRep::int()
}

pub fn reader() -> Subject {
    let m = reader_monad(&env_ty());
    Subject {
        name: "reader",
        functor: fun_of_mon(&m),
        app: effects::app_of_mon(&m),
        monad: Some(m),
        observe: Box::new(|e| {
            Value::list([-3, 0, 1, 5, 42].map(|env| run_reader(e, &Value::Int(env)).expect("reader run")))
        }),
        sample: Box::new(|r| {
            let m = reader_monad(&env_ty());
            let f = fun_of_mon(&m);
            match r.random_range(0..3) {
                0 => m.ret(Value::Int(r.random_range(-50..=50))),
                1 => unwrap(f.fmap(int_fn(r), ask(&env_ty()))),
                _ => unwrap(local(scaler(2), unwrap(f.fmap(int_fn(r), ask(&env_ty()))))),
            }
        }),
        kleisli: Box::new(|r| {
            let c = r.random_range(-3..=3);
            Arc::new(move |a| {
                let a = int(&a);
                fun_of_mon(&reader_monad(&env_ty())).fmap(Func::new(move |e| Value::Int(a + int(e) * c)), ask(&env_ty()))
            })
        }),
    }
}

fn state_ty() -> TypeRep {
    TypeRep::int()
}

/// `get >>= \s -> put (s + k) >> return (s * c)`
fn bump(k: i64, c: i64) -> Effectful {
    let m = state_monad(&state_ty());
    let m2 = m.clone();
    unwrap(m.bind_fn(get(&state_ty()), move |s| {
        let s = int(&s);
        let m3 = m2.clone();
        m2.bind_fn(put(&state_ty(), Value::Int(s + k)), move |_| Ok(m3.ret(Value::Int(s * c))))
    }))
}

pub fn state() -> Subject {
    let m = state_monad(&state_ty());
    Subject {
        name: "state",
        functor: fun_of_mon(&m),
        app: effects::app_of_mon(&m),
        monad: Some(m),
        observe: Box::new(|e| {
            Value::list([-2, 0, 3, 10].map(|s0| {
                let (v, s) = run_state(e, Value::Int(s0)).expect("state run");
                Value::pair(v, s)
            }))
        }),
        sample: Box::new(|r| match r.random_range(0..3) {
            0 => state_monad(&state_ty()).ret(Value::Int(r.random_range(-50..=50))),
            1 => get(&state_ty()),
            _ => bump(r.random_range(-3..=3), r.random_range(-3..=3)),
        }),
        kleisli: Box::new(|r| {
            let c = r.random_range(-3..=3);
            Arc::new(move |a| Ok(bump(int(&a), c)))
        }),
    }
}

pub fn all() -> Vec<Subject> {
    vec![identity(), const_list(), reader(), state()]
}

impl Subject {
    fn same(&self, law: &str, lhs: &Effectful, rhs: &Effectful) -> Result<(), String> {
        let (l, r) = ((self.observe)(lhs), (self.observe)(rhs));
        if l == r {
            Ok(())
        } else {
            Err(format!("{}: {law} failed: {l:?} vs {r:?}", self.name))
        }
    }

    /// Checks every applicable law on one random draw.
    pub fn check(&self, r: &mut StdRng) -> Result<(), String> {
        let e = |x: reflectix::Result<Effectful>| x.map_err(|err| format!("{}: {err}", self.name));
        let x = (self.sample)(r);
        let (f, g) = (int_fn(r), int_fn(r));

        self.same("fmap id", &e(self.functor.fmap(Func::identity(), x.clone()))?, &x)?;
        let (f2, g2) = (f.clone(), g.clone());
        let composed = Func::try_new(move |v| g2.call(&f2.call(v)?));
        let lhs = e(self.functor.fmap(composed, x.clone()))?;
        let rhs = e(self.functor.fmap(g.clone(), e(self.functor.fmap(f.clone(), x.clone()))?))?;
        self.same("fmap composition", &lhs, &rhs)?;

        let id = self.app.pure(Value::fun(|v| v.clone()));
        self.same("applicative identity", &e(self.app.apply(id, x.clone()))?, &x)?;
        let v = Value::Int(r.random_range(-20..=20));
        let f3 = f.clone();
        let pf = self.app.pure(Value::fun(move |v| f3.call(v).expect("pure function")));
        let lhs = e(self.app.apply(pf, self.app.pure(v.clone())))?;
        let rhs = self.app.pure(f.call(&v).map_err(|err| err.to_string())?);
        self.same("homomorphism", &lhs, &rhs)?;

        let Some(m) = &self.monad else {
            return Ok(());
        };
        let (k, h) = ((self.kleisli)(r), (self.kleisli)(r));
        let a = Value::Int(r.random_range(-20..=20));
        self.same("left identity", &e(m.bind(m.ret(a.clone()), k.clone()))?, &e(k(a))?)?;
        let m2 = m.clone();
        let ret: Kleisli = Arc::new(move |v| Ok(m2.ret(v)));
        self.same("right identity", &e(m.bind(x.clone(), ret))?, &x)?;
        let lhs = e(m.bind(e(m.bind(x.clone(), k.clone()))?, h.clone()))?;
        let (m3, k2, h2) = (m.clone(), k.clone(), h.clone());
        let rhs = e(m.bind(x, Arc::new(move |v| m3.bind(k2(v)?, h2.clone()))))?;
        self.same("associativity", &lhs, &rhs)
    }
}
