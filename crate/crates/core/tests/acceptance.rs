//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rand::Rng;
use reflectix::demo::{self, expr};
use reflectix::error::Error;
use reflectix::extfun::ExtFun;
use reflectix::generics::{children_conlist, children_sumprod, children_spine, equal};
use reflectix::safeser::{
    check_compat, check_compat_pattern, check_compat_scc_pattern, decode_graph, deserialize, encode_graph,
    serialize, ConvertState, ValueGraph, ValueNode,
};
use reflectix::typerep::{TypePattern, TypeRep};
use reflectix::uniplate;
use reflectix::value::Value;

use common::golden::{fixture_path, fixtures};

const VIEW_LIMIT: Duration = Duration::from_secs(10);
const UNIPLATE_LIMIT: Duration = Duration::from_secs(10);
const PASSES_LIMIT: Duration = Duration::from_secs(1);
const DISPATCH_LIMIT: Duration = Duration::from_secs(1);
const EFFECTS_LIMIT: Duration = Duration::from_secs(5);
const SAFETY_LIMIT: Duration = Duration::from_secs(30);
const CYCLE_LIMIT: Duration = Duration::from_secs(1);

const VIEW_SAMPLES: usize = 1000;
const MAX_DEPTH: usize = 5;
const DISPATCH_PERMUTATIONS: usize = 100;
const EFFECT_SAMPLES: usize = 200;
const RANDOM_BLOBS: usize = 10_000;
const TYPES_PER_BLOB: usize = 10;
const EXPR_ROUNDTRIPS: usize = 1000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(limit: Duration, started: Instant, detail: String) -> Outcome {
    let took = started.elapsed();
    if took <= limit {
        Ok(format!("{detail}; {:.3}s of {}s", took.as_secs_f64(), limit.as_secs()))
    } else {
        Err(format!("{detail}; took {:.3}s, limit {}s", took.as_secs_f64(), limit.as_secs()))
    }
}

fn fail<T: std::fmt::Debug>(what: &str, x: T) -> String {
    format!("{what}: {x:?}")
}

/// Children computed from the known layout of each demo type.
fn oracle_children(t: &TypeRep, v: &Value) -> Vec<Value> {
    match t.head().name() {
        "List" => match v.as_block() {
            Some(b) => vec![b.fields[1].clone()],
            None => vec![],
        },
        "Btree" => match v.as_block() {
            Some(b) => vec![b.fields[0].clone(), b.fields[2].clone()],
            None => vec![],
        },
        "Expr" => match expr::view(v).expect("expr value") {
            expr::E::Neg(a) => vec![a.clone()],
            expr::E::Add(a, b) | expr::E::Sub(a, b) | expr::E::Let(_, a, b) => vec![a.clone(), b.clone()],
            _ => vec![],
        },
        _ => vec![],
    }
}

fn view_coherence() -> Outcome {
    let started = Instant::now();
    let mut r = common::rng(1);
    let mut per_type: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..VIEW_SAMPLES {
        let s = common::algebraic_sample(&mut r, MAX_DEPTH);
        let sp = children_sumprod(&s.ty, &s.value).map_err(|e| fail("sumprod", e))?;
        let spine = children_spine(&s.ty, &s.value).map_err(|e| fail("spine", e))?;
        let cl = children_conlist(&s.ty, &s.value).map_err(|e| fail("conlist", e))?;
        let oracle = oracle_children(&s.ty, &s.value);
        if sp != spine || spine != cl || cl != oracle {
            return Err(format!("views disagree at {} on {:?}", s.ty, s.value));
        }
        *per_type.entry(s.ty.head().name().to_string()).or_default() += 1;
    }
    within(VIEW_LIMIT, started, format!("{VIEW_SAMPLES} values agree {per_type:?}"))
}

fn uniplate_laws() -> Outcome {
    let started = Instant::now();
    let mut r = common::rng(2);
    for _ in 0..VIEW_SAMPLES {
        let s = common::algebraic_sample(&mut r, MAX_DEPTH);
        let (t, v) = (&s.ty, &s.value);
        let cs = uniplate::children(t, v).map_err(|e| fail("children", e))?;
        let back = uniplate::replace_children(t, v, cs.clone()).map_err(|e| fail("replace", e))?;
        if !equal(t, &back, v).map_err(|e| fail("equal", e))? {
            return Err(format!("replace_children changed {v:?}"));
        }
        if uniplate::map_family(t, &|x| x, v).map_err(|e| fail("map_family", e))? != *v {
            return Err(format!("map_family id changed {v:?}"));
        }
        let len = uniplate::family(t, v).map_err(|e| fail("family", e))?.len();
        let mut expected = 1;
        for c in &cs {
            expected += uniplate::family(t, c).map_err(|e| fail("family", e))?.len();
        }
        if len != expected {
            return Err(format!("family length {len} != {expected} for {v:?}"));
        }
    }
    let li = TypeRep::list(TypeRep::int());
    let f = |v: Value| match v.to_vec().as_deref() {
        Some([]) => common::ints(&[100]),
        Some([h, rest @ ..]) => Value::list(std::iter::once(Value::Int(h.as_int().unwrap() * 2)).chain(rest.iter().cloned())),
        _ => v,
    };
    for xs in [[1, 2, 3], [0, -4, 9], [7, 7, 7]] {
        let [x, y, z] = xs.map(Value::Int);
        let literal = f(Value::cons(x, f(Value::cons(y, f(Value::cons(z, f(Value::nil())))))));
        let mapped = uniplate::map_family(&li, &f, &common::ints(&xs)).map_err(|e| fail("map_family", e))?;
        if literal != mapped {
            return Err(format!("list law: {mapped:?} != {literal:?}"));
        }
        if uniplate::map_family(&li, &|v| v, &common::ints(&xs)).unwrap() != common::ints(&xs) {
            return Err("list law with identity".into());
        }
    }
    within(UNIPLATE_LIMIT, started, format!("{VIEW_SAMPLES} values, list law on 3-lists"))
}

fn reference_passes() -> Outcome {
    use expr::{add, cst, let_, neg, sub, var};
    let started = Instant::now();
    let check = |name: &str, got: Value, want: Value| {
        if got == want {
            Ok(())
        } else {
            Err(format!("{name}: {got:?} != {want:?}"))
        }
    };
    let simplified = expr::simplify(&neg(neg(cst(1)))).map_err(|e| fail("simplify", e))?;
    check("simplify", simplified, cst(1))?;
    let nested = expr::simplify(&add(neg(neg(var("x"))), neg(neg(neg(cst(2)))))).unwrap();
    check("simplify nested", nested, add(var("x"), neg(cst(2))))?;
    check("const_fold", expr::const_fold(&add(cst(1), cst(2))).unwrap(), cst(3))?;
    let start = sub(var("x"), neg(var("y")));
    let normal = expr::simplify_more(&start, uniplate::DEFAULT_FUEL).map_err(|e| fail("simplify_more", e))?;
    check("simplify_more", normal.clone(), add(var("x"), var("y")))?;
    let redexes = uniplate::family(&demo::expr_ty(), &normal)
        .unwrap()
        .iter()
        .filter(|x| expr::simplify_more_rule(x).is_some())
        .count();
    if redexes != 0 {
        return Err(format!("{redexes} redexes remain after simplify_more"));
    }
    let (abstracted, counter) = expr::abstract_(&add(cst(1), cst(2))).map_err(|e| fail("abstract", e))?;
    check("abstract", abstracted, add(var("x0"), var("x1")))?;
    if counter != 2 {
        return Err(format!("abstract counter {counter}, expected 2"));
    }
    let fv = expr::free_vars(&let_("y", cst(1), add(var("y"), var("z")))).unwrap();
    if fv != ["z"] {
        return Err(format!("free_vars {fv:?}"));
    }
    within(
        PASSES_LIMIT,
        started,
        "simplify, const_fold, simplify_more (0 redexes), abstract (counter 2), free_vars".into(),
    )
}

fn dispatch_permutations() -> Outcome {
    let started = Instant::now();
    let pat = |s: &str| TypePattern::parse(s).expect("pattern");
    let labels = ["Pair(Int, Int)", "Pair(Int, _)", "Pair(_, Int)", "Pair(_, _)"];
    let probes = [
        (TypeRep::pair(TypeRep::int(), TypeRep::int()), "Pair(Int, Int)"),
        (TypeRep::pair(TypeRep::int(), TypeRep::string()), "Pair(Int, _)"),
        (TypeRep::pair(TypeRep::string(), TypeRep::int()), "Pair(_, Int)"),
        (TypeRep::pair(TypeRep::string(), TypeRep::string()), "Pair(_, _)"),
    ];
    let mut r = common::rng(4);
    let mut order: Vec<usize> = (0..labels.len()).collect();
    for i in 0..DISPATCH_PERMUTATIONS {
        for k in (1..order.len()).rev() {
            order.swap(k, r.random_range(0..=k));
        }
        let f: ExtFun<(), String> = ExtFun::create("label");
        for &j in &order {
            let label = labels[j].to_string();
            f.extend(pat(labels[j]), move |_, ()| label.clone());
        }
        for (ty, want) in &probes {
            let got = f.apply(ty, ()).map_err(|e| fail("apply", e))?;
            if got != *want {
                return Err(format!("permutation {i} {order:?}: {ty} dispatched to {got}, expected {want}"));
            }
        }
    }
    within(DISPATCH_LIMIT, started, format!("{DISPATCH_PERMUTATIONS} permutations, 4 probes each"))
}

fn effect_laws() -> Outcome {
    let started = Instant::now();
    let mut r = common::rng(5);
    let subjects = common::laws::all();
    for s in &subjects {
        for _ in 0..EFFECT_SAMPLES {
            s.check(&mut r)?;
        }
    }
    let names: Vec<_> = subjects.iter().map(|s| s.name).collect();
    within(EFFECTS_LIMIT, started, format!("{EFFECT_SAMPLES} draws each for {names:?}"))
}

fn error_kind(e: &Error) -> String {
    format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("?").to_string()
}

fn serialization_safety() -> Outcome {
    let started = Instant::now();
    let mut r = common::rng(6);
    let types = common::serializable_types();
    let mut seeds = Vec::new();
    for t in &types {
        for _ in 0..4 {
            let v = common::value_of(&mut r, t, 4);
            seeds.push(serialize(t, &v).map_err(|e| fail("serialize seed", e))?);
        }
    }
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    let mut crashes = 0;
    let mut accepted = 0;
    for i in 0..RANDOM_BLOBS {
        let blob: Vec<u8> = if i % 2 == 0 {
            let n = r.random_range(0..64);
            let mut b: Vec<u8> = (0..n).map(|_| r.random()).collect();
            if r.random_bool(0.5) && b.len() >= 4 {
                b[..4].copy_from_slice(reflectix::safeser::MAGIC);
            }
            b
        } else {
            let mut b = seeds[r.random_range(0..seeds.len())].clone();
            for _ in 0..r.random_range(1..4) {
                let at = r.random_range(0..b.len());
                b[at] = r.random();
            }
            if r.random_bool(0.2) {
                b.truncate(r.random_range(0..b.len()));
            }
            b
        };
        for _ in 0..TYPES_PER_BLOB {
            let t = &types[r.random_range(0..types.len())];
            match catch_unwind(AssertUnwindSafe(|| deserialize(t, &blob))) {
                Ok(Ok(_)) => accepted += 1,
                Ok(Err(e)) => *kinds.entry(error_kind(&e)).or_default() += 1,
                Err(_) => crashes += 1,
            }
        }
    }
    if crashes > 0 {
        return Err(format!("{crashes} panics while deserializing random bytes"));
    }
    for _ in 0..EXPR_ROUNDTRIPS {
        let e = common::expr_value(&mut r, 6);
        let t = demo::expr_ty();
        let back = deserialize(&t, &serialize(&t, &e).map_err(|x| fail("serialize", x))?)
            .map_err(|x| fail("deserialize", x))?;
        if !equal(&t, &back, &e).unwrap() {
            return Err(format!("roundtrip changed {e:?}"));
        }
    }
    let minus_one = encode_graph(&ValueGraph::new(vec![ValueNode::Imm(-1)], 0).unwrap()).unwrap();
    match deserialize(&demo::nat(), &minus_one) {
        Err(Error::RepresentationRejected { .. }) => {}
        other => return Err(format!("Nat accepted Imm -1: {other:?}")),
    }
    within(
        SAFETY_LIMIT,
        started,
        format!(
            "{} decodes, 0 panics, {accepted} accepted, errors {kinds:?}; {EXPR_ROUNDTRIPS} expr roundtrips; Nat rejects -1",
            RANDOM_BLOBS * TYPES_PER_BLOB
        ),
    )
}

fn cyclic_termination() -> Outcome {
    let started = Instant::now();
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let run = || -> Result<String, String> {
            let g = decode_graph(&std::fs::read(fixture_path("poly_cycle.gvg")).map_err(|e| e.to_string())?)
                .map_err(|e| fail("decode", e))?;
            let mut report = vec![];
            let mut st = ConvertState::new();
            check_compat(&demo::poly(TypeRep::int()), &g, g.root(), &mut st).map_err(|e| fail("PolyT(Int)", e))?;
            for n in st.seen_nodes() {
                let (u, bound) = (st.updates(n), st.first_pattern_size(n).unwrap());
                if u > bound {
                    return Err(format!("node #{n}: {u} updates > {bound}"));
                }
                report.push(format!("#{n}:{u}/{bound}"));
            }
            let general = TypePattern::parse("Demo.PolyT(_)").unwrap();
            let mut st = ConvertState::new();
            check_compat_pattern(&general, &g, g.root(), &mut st).map_err(|e| fail("PolyT(_)", e))?;
            if st.visits(g.root()) != 1 {
                return Err(format!("root visited {} times at PolyT(_)", st.visits(g.root())));
            }
            check_compat_scc_pattern(&general, &g, g.root(), &mut ConvertState::new()).map_err(|e| fail("scc", e))?;
            Ok(format!("updates/bound {}", report.join(" ")))
        };
        let _ = tx.send(run());
    });
    match rx.recv_timeout(CYCLE_LIMIT) {
        Ok(res) => within(CYCLE_LIMIT, started, res?),
        Err(_) => Err(format!("check_compat did not finish within {}s", CYCLE_LIMIT.as_secs())),
    }
}

fn golden_files() -> Outcome {
    let mut names = vec![];
    for (name, expected) in fixtures() {
        let bytes = std::fs::read(fixture_path(name)).map_err(|e| format!("{name}: {e}"))?;
        let decoded = decode_graph(&bytes).map_err(|e| fail(name, e))?;
        if decoded != expected {
            return Err(format!("{name}: decoded {decoded:?}"));
        }
        if encode_graph(&expected).unwrap() != bytes {
            return Err(format!("{name}: encoding differs from the file"));
        }
        if encode_graph(&decoded).unwrap() != bytes {
            return Err(format!("{name}: encode(decode(b)) != b"));
        }
        names.push(name);
    }
    let shape = demo::shape_value("Demo.Circle", vec![Value::Float(2.5)]);
    let from_values = [
        ("int_list.gvg", TypeRep::list(TypeRep::int()), common::ints(&[1, 2])),
        ("imm0.gvg", TypeRep::list(TypeRep::int()), common::ints(&[])),
        (
            "mixed.gvg",
            TypeRep::pair(TypeRep::float(), TypeRep::pair(TypeRep::string(), demo::shape())),
            Value::pair(Value::Float(1.5), Value::pair(Value::string("héllo"), shape)),
        ),
    ];
    for (name, t, v) in from_values {
        let bytes = std::fs::read(fixture_path(name)).unwrap();
        if serialize(&t, &v).map_err(|e| fail(name, e))? != bytes {
            return Err(format!("{name}: serialize({t}) differs from the file"));
        }
    }
    Ok(format!("{} fixtures byte-exact {names:?}", names.len()))
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_reflectix");
    let dir = std::env::temp_dir().join(format!("reflectix-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let run = |args: &[&str]| -> Result<(i32, String), String> {
        let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
        Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).trim().to_string()))
    };
    let cases = [
        ("const-fold", "(add (cst 1) (cst 2))", "(cst 3)"),
        ("simplify", "(neg (neg (var x)))", "(var x)"),
        ("free-vars", "(let y (cst 1) (add (var y) (var z)))", "z"),
    ];
    for (i, (pass, src, want)) in cases.iter().enumerate() {
        let file = dir.join(format!("case{i}.ex"));
        std::fs::write(&file, src).map_err(|e| e.to_string())?;
        let (code, out) = run(&["demo-expr", "--pass", pass, file.to_str().unwrap()])?;
        if code != 0 || out != *want {
            return Err(format!("demo-expr --pass {pass}: exit {code}, output {out:?}, expected {want:?}"));
        }
    }
    let blob = fixture_path("int_list.gvg");
    let blob = blob.to_str().unwrap();
    let (ok, _) = run(&["validate", "--type", "List(Int)", blob])?;
    let (bad, _) = run(&["validate", "--type", "List(String)", blob])?;
    let _ = std::fs::remove_dir_all(&dir);
    if (ok, bad) != (0, 3) {
        return Err(format!("validate exits {ok} and {bad}, expected 0 and 3"));
    }
    Ok("3 demo-expr examples exact; validate List(Int) -> 0, List(String) -> 3".into())
}

fn main() {
    demo::init();
    let criteria: [Criterion; 9] = [
        ("view coherence", view_coherence),
        ("uniplate laws", uniplate_laws),
        ("reference pass outputs", reference_passes),
        ("extensible dispatch", dispatch_permutations),
        ("effect laws", effect_laws),
        ("serialization safety", serialization_safety),
        ("cyclic termination", cyclic_termination),
        ("wire golden files", golden_files),
        ("cli contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
