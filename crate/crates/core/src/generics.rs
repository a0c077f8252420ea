//! Generic functions defined once over the views: `show`, `equal` and the
//! per-view `children` implementations.

use std::sync::LazyLock;

use crate::desc::{self, Desc, Scalar};
use crate::error::{Error, Result};
use crate::extfun::ExtFun;
use crate::typerep::{coerce, TypePattern, TypeRep};
use crate::value::Value;
use crate::views::{self, SpValue, SumProd};

const RED_ZONE: usize = 64 * 1024;
const STACK_CHUNK: usize = 1024 * 1024;

pub(crate) fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(RED_ZONE, STACK_CHUNK, f)
}

static SHOW: LazyLock<ExtFun<Value, Result<String>>> = LazyLock::new(|| {
    let f = ExtFun::create("show");
    let p = |s: &str| TypePattern::parse(s).expect("valid pattern");
    f.extend(p("Int"), |_, v| match v {
        Value::Int(i) => Ok(i.to_string()),
        v => Err(Error::ill_typed("Int", format!("{v:?}"))),
    });
    f.extend(p("Float"), |_, v| match v {
        Value::Float(x) => Ok(format!("{x:?}")),
        v => Err(Error::ill_typed("Float", format!("{v:?}"))),
    });
    f.extend(p("String"), |_, v| match v {
        Value::Str(s) => Ok(format!("{s:?}")),
        v => Err(Error::ill_typed("String", format!("{v:?}"))),
    });
    f.extend(p("List(_)"), |t, v| {
        let items = v.to_vec().ok_or_else(|| Error::ill_typed(t, format!("{v:?}")))?;
        let shown = items
            .into_iter()
            .map(|x| show(t.arg(0), &x))
            .collect::<Result<Vec<_>>>()?;
        Ok(format!("[{}]", shown.join("; ")))
    });
    f.extend(p("Pair(_, _)"), |t, v| {
        let b = v
            .as_block()
            .filter(|b| b.fields.len() == 2)
            .ok_or_else(|| Error::ill_typed(t, format!("{v:?}")))?;
        Ok(format!("({}, {})", show(t.arg(0), &b.fields[0])?, show(t.arg(1), &b.fields[1])?))
    });
    f.extend(p("Fun(_, _)"), |_, _| Ok("<fun>".to_string()));
    f.extend(TypePattern::Any, |t, v| show_generic(t, &v));
    f
});

/// The extensible `show` function; callers may add cases for their types.
pub fn show_fn() -> &'static ExtFun<Value, Result<String>> {
    &SHOW
}

pub fn show(t: &TypeRep, v: &Value) -> Result<String> {
    grow(|| SHOW.apply(t, v.clone()))?
}

fn show_generic(t: &TypeRep, v: &Value) -> Result<String> {
    let (resolved, d) = desc::resolve_synonyms(t);
    match d {
        Desc::Synonym { .. } => unreachable!(),
        Desc::NoDesc => Err(Error::NotSupported {
            function: "show".into(),
            ty: t.to_string(),
        }),
        Desc::Scalar(_) => show(&resolved, v),
        Desc::Variant(_) | Desc::Extensible(_) | Desc::Product(_) => {
            let app = desc::conap(&resolved, v)?;
            let args = app
                .con
                .fields
                .iter()
                .zip(&app.args)
                .map(|(f, a)| show(&f.ty, a))
                .collect::<Result<Vec<_>>>()?;
            Ok(match (matches!(d, Desc::Product(_)), args.is_empty()) {
                (true, _) => format!("({})", args.join(", ")),
                (false, true) => app.con.name.clone(),
                (false, false) => format!("{} ({})", app.con.name, args.join(", ")),
            })
        }
        Desc::Record(r) => {
            let app = r.conap(v)?;
            let fields = r
                .fields()
                .iter()
                .zip(&app.args)
                .map(|(f, a)| Ok(format!("{} = {}", f.name, show(&f.ty, a)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(format!("{{{}}}", fields.join("; ")))
        }
        Desc::ArrayLike { elem, ops } => {
            let n = (ops.length)(v).ok_or_else(|| Error::ill_typed(t, format!("{v:?}")))?;
            let items = (0..n)
                .map(|i| show(&elem, &(ops.get)(v, i).expect("index below length")))
                .collect::<Result<Vec<_>>>()?;
            Ok(format!("[|{}|]", items.join("; ")))
        }
        Desc::Abstract { ref name, .. } | Desc::Opaque { ref name, .. } => {
            let r = desc::repr(&resolved)?;
            Ok(format!("{name}({})", show(&r.repr_ty, &r.to_repr(v))?))
        }
    }
}

/// Structural equality through the sum-of-products view.
pub fn equal(t: &TypeRep, x: &Value, y: &Value) -> Result<bool> {
    grow(|| {
        let sp = views::sumprod(t).map_err(|_| Error::NotSupported {
            function: "equal".into(),
            ty: t.to_string(),
        })?;
        match &sp {
            SumProd::Base(b) => equal_base(b, x, y),
            SumProd::Iso(inner, iso) => equal_sp(inner, &iso.fwd(x)?, &iso.fwd(y)?),
            _ => equal_sp(&sp, &SpValue::Leaf(x.clone()), &SpValue::Leaf(y.clone())),
        }
    })
}

fn equal_sp(sp: &SumProd, x: &SpValue, y: &SpValue) -> Result<bool> {
    match (sp, x, y) {
        (SumProd::Empty | SumProd::Unit, _, _) => Ok(true),
        (SumProd::Sum(l, _), SpValue::Left(a), SpValue::Left(b)) => equal_sp(l, a, b),
        (SumProd::Sum(_, r), SpValue::Right(a), SpValue::Right(b)) => equal_sp(r, a, b),
        (SumProd::Sum(..), _, _) => Ok(false),
        (SumProd::Prod(l, r), SpValue::Pair(a1, a2), SpValue::Pair(b1, b2)) => {
            Ok(equal_sp(l, a1, b1)? && equal_sp(r, a2, b2)?)
        }
        (SumProd::Con(_, s) | SumProd::FieldTag(_, s), _, _) => equal_sp(s, x, y),
        (SumProd::Iso(s, iso), _, _) => equal_sp(s, &iso.fwd(&leaf(x)?)?, &iso.fwd(&leaf(y)?)?),
        (SumProd::Base(t), SpValue::Leaf(a), SpValue::Leaf(b)) => equal_base(t, a, b),
        (SumProd::Delay(t), SpValue::Leaf(a), SpValue::Leaf(b)) => equal(t, a, b),
        _ => Err(Error::MalformedValue("value does not fit its structure".into())),
    }
}

fn leaf(s: &SpValue) -> Result<Value> {
    match s {
        SpValue::Leaf(v) => Ok(v.clone()),
        _ => Err(Error::MalformedValue("expected a leaf".into())),
    }
}

fn equal_base(t: &TypeRep, x: &Value, y: &Value) -> Result<bool> {
    match desc::resolve_synonyms(t) {
        (_, Desc::Scalar(Scalar::Float)) => match (x, y) {
            (Value::Float(a), Value::Float(b)) => Ok(a.to_bits() == b.to_bits() || a == b),
            _ => Err(Error::ill_typed(t, "expected floats")),
        },
        (_, Desc::Scalar(_)) => Ok(x == y),
        (_, Desc::ArrayLike { elem, ops }) => {
            let (n, m) = ((ops.length)(x), (ops.length)(y));
            let (Some(n), Some(m)) = (n, m) else {
                return Err(Error::ill_typed(t, "expected arrays"));
            };
            if n != m {
                return Ok(false);
            }
            for i in 0..n {
                let (a, b) = ((ops.get)(x, i).unwrap(), (ops.get)(y, i).unwrap());
                if !equal(&elem, &a, &b)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (r, Desc::Abstract { .. } | Desc::Opaque { .. }) => match desc::repr(&r) {
            Ok(rep) => equal(&rep.repr_ty, &rep.to_repr(x), &rep.to_repr(y)),
            Err(_) => Ok(x == y),
        },
        _ => Err(Error::NotSupported {
            function: "equal".into(),
            ty: t.to_string(),
        }),
    }
}

/// Structural equality through the list-of-constructors view.
pub fn equal_conlist(t: &TypeRep, x: &Value, y: &Value) -> Result<bool> {
    grow(|| {
        let cs = views::conlist(t);
        if cs.is_empty() {
            return equal_base(t, x, y);
        }
        let a = views::conlist_conap(&cs, x)?;
        let b = views::conlist_conap(&cs, y)?;
        if !a.con.same_as(&b.con) {
            return Ok(false);
        }
        for ((f, u), v) in a.con.fields.iter().zip(&a.args).zip(&b.args) {
            if !equal_conlist(&f.ty, u, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

/// `[v]` when `candidate_ty` is the parent type, `[]` otherwise.
pub fn child(parent_ty: &TypeRep, candidate_ty: &TypeRep, v: &Value) -> Vec<Value> {
    coerce(candidate_ty, parent_ty, v.clone()).into_iter().collect()
}

fn no_children(t: &TypeRep) -> Result<Vec<Value>> {
    match desc::resolve_synonyms(t).1 {
        Desc::NoDesc => Err(Error::NotSupported {
            function: "children".into(),
            ty: t.to_string(),
        }),
        _ => Ok(vec![]),
    }
}

/// Same-typed immediate substructures, found at `Delay` positions.
pub fn children_sumprod(t: &TypeRep, v: &Value) -> Result<Vec<Value>> {
    fn walk(parent: &TypeRep, sp: &SumProd, s: &SpValue, out: &mut Vec<Value>) -> Result<()> {
        match (sp, s) {
            (SumProd::Sum(l, _), SpValue::Left(x)) => walk(parent, l, x, out),
            (SumProd::Sum(_, r), SpValue::Right(x)) => walk(parent, r, x, out),
            (SumProd::Prod(l, r), SpValue::Pair(a, b)) => {
                walk(parent, l, a, out)?;
                walk(parent, r, b, out)
            }
            (SumProd::Con(_, x) | SumProd::FieldTag(_, x), _) => walk(parent, x, s, out),
            (SumProd::Delay(t), SpValue::Leaf(x)) => {
                out.extend(child(parent, t, x));
                Ok(())
            }
            (SumProd::Unit | SumProd::Base(_), _) => Ok(()),
            _ => Err(Error::MalformedValue("value does not fit its structure".into())),
        }
    }
    let sp = views::sumprod(t).map_err(|_| Error::NotSupported {
        function: "children".into(),
        ty: t.to_string(),
    })?;
    let mut out = vec![];
    if let SumProd::Iso(inner, iso) = &sp {
        walk(t, inner, &iso.fwd(v)?, &mut out)?;
    }
    Ok(out)
}

/// Same-typed immediate substructures, found among the spine arguments.
pub fn children_spine(t: &TypeRep, v: &Value) -> Result<Vec<Value>> {
    if views::conlist(t).is_empty() {
        return no_children(t);
    }
    let s = views::spine(t, v)?;
    Ok(s.args().iter().flat_map(|(ty, a)| child(t, ty, a)).collect())
}

/// Same-typed immediate substructures, found among the constructor arguments.
pub fn children_conlist(t: &TypeRep, v: &Value) -> Result<Vec<Value>> {
    let cs = views::conlist(t);
    if cs.is_empty() {
        return no_children(t);
    }
    let app = views::conlist_conap(&cs, v)?;
    Ok(app
        .con
        .fields
        .iter()
        .zip(&app.args)
        .flat_map(|(f, a)| child(t, &f.ty, a))
        .collect())
}
