//! The expression language: constructors, an s-expression syntax and the
//! example passes built on the traversal libraries.
//!
//! ```text
//! expr ::= (cst INT) | (neg expr) | (add expr expr) | (sub expr expr)
//!        | (var IDENT) | (let IDENT expr expr)
//! ```

use std::collections::HashMap;
use std::sync::Arc;

use super::expr_ty;
use crate::effects::{self, ask, local, reader_monad, run_reader, run_state, state_monad, Effectful};
use crate::error::{Error, Result};
use crate::typerep::TypeRep;
use crate::uniplate;
use crate::value::{Func, Value};

const CST: u32 = 0;
const NEG: u32 = 1;
const ADD: u32 = 2;
const SUB: u32 = 3;
const VAR: u32 = 4;
const LET: u32 = 5;

pub fn cst(i: i64) -> Value {
    Value::block(CST, vec![Value::Int(i)])
}

pub fn neg(e: Value) -> Value {
    Value::block(NEG, vec![e])
}

pub fn add(a: Value, b: Value) -> Value {
    Value::block(ADD, vec![a, b])
}

pub fn sub(a: Value, b: Value) -> Value {
    Value::block(SUB, vec![a, b])
}

pub fn var(n: &str) -> Value {
    Value::block(VAR, vec![Value::string(n)])
}

pub fn let_(n: &str, def: Value, body: Value) -> Value {
    Value::block(LET, vec![Value::string(n), def, body])
}

/// A borrowed, pattern-matchable view of an expression value.
#[derive(Debug, PartialEq)]
pub enum E<'a> {
    Cst(i64),
    Neg(&'a Value),
    Add(&'a Value, &'a Value),
    Sub(&'a Value, &'a Value),
    Var(&'a str),
    Let(&'a str, &'a Value, &'a Value),
}

pub fn view(v: &Value) -> Result<E<'_>> {
    let bad = || Error::ill_typed("Expr", format!("{v:?}"));
    let b = v.as_block().ok_or_else(bad)?;
    let f = &b.fields;
    let s = |i: usize| f[i].as_str().ok_or_else(bad);
    Ok(match (b.tag, f.len()) {
        (CST, 1) => E::Cst(f[0].as_int().ok_or_else(bad)?),
        (NEG, 1) => E::Neg(&f[0]),
        (ADD, 2) => E::Add(&f[0], &f[1]),
        (SUB, 2) => E::Sub(&f[0], &f[1]),
        (VAR, 1) => E::Var(s(0)?),
        (LET, 3) => E::Let(s(0)?, &f[1], &f[2]),
        _ => return Err(bad()),
    })
}

/// Renders an expression in the s-expression syntax.
pub fn print(v: &Value) -> Result<String> {
    let mut out = String::new();
    write(v, &mut out)?;
    Ok(out)
}

fn write(v: &Value, out: &mut String) -> Result<()> {
    crate::generics::grow(|| {
        match view(v)? {
            E::Cst(i) => out.push_str(&format!("(cst {i})")),
            E::Var(n) => out.push_str(&format!("(var {n})")),
            E::Neg(e) => {
                out.push_str("(neg ");
                write(e, out)?;
                out.push(')');
            }
            E::Add(a, b) | E::Sub(a, b) => {
                out.push_str(if matches!(view(v)?, E::Add(..)) { "(add " } else { "(sub " });
                write(a, out)?;
                out.push(' ');
                write(b, out)?;
                out.push(')');
            }
            E::Let(n, a, b) => {
                out.push_str(&format!("(let {n} "));
                write(a, out)?;
                out.push(' ');
                write(b, out)?;
                out.push(')');
            }
        }
        Ok(())
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Next token with its starting position.
    fn next_token(&mut self) -> Option<(Tok, usize, usize)> {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let tok = match self.bump()? {
            '(' => Tok::Open,
            ')' => Tok::Close,
            c => {
                let mut s = c.to_string();
                while self.chars.peek().is_some_and(|c| !c.is_whitespace() && *c != '(' && *c != ')') {
                    s.push(self.bump().unwrap());
                }
                Tok::Atom(s)
            }
        };
        Some((tok, line, col))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<(Tok, usize, usize)>>,
}

impl Parser<'_> {
    fn peek(&mut self) -> Option<&(Tok, usize, usize)> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token());
        }
        self.peeked.as_ref().unwrap().as_ref()
    }

    fn next(&mut self) -> Option<(Tok, usize, usize)> {
        match self.peeked.take() {
            Some(t) => t,
            None => self.lexer.next_token(),
        }
    }

    fn error_here(&mut self, reason: impl Into<String>) -> Error {
        let (line, col) = match self.peek() {
            Some((_, l, c)) => (*l, *c),
            None => (self.lexer.line, self.lexer.col),
        };
        Error::Parse {
            line,
            col,
            reason: reason.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.peek() {
            Some((t, _, _)) if *t == want => {
                self.next();
                Ok(())
            }
            Some((t, _, _)) => {
                let msg = format!("expected {want:?}, found {t:?}");
                Err(self.error_here(msg))
            }
            None => Err(self.error_here(format!("expected {want:?}, found end of input"))),
        }
    }

    fn atom(&mut self, what: &str) -> Result<(String, usize, usize)> {
        match self.peek() {
            Some((Tok::Atom(_), _, _)) => match self.next() {
                Some((Tok::Atom(s), l, c)) => Ok((s, l, c)),
                _ => unreachable!(),
            },
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        let (s, line, col) = self.atom("an identifier")?;
        let mut chars = s.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if ok {
            Ok(s)
        } else {
            Err(Error::Parse {
                line,
                col,
                reason: format!("invalid identifier `{s}`"),
            })
        }
    }

    fn expr(&mut self) -> Result<Value> {
        crate::generics::grow(|| {
            self.expect(Tok::Open)?;
            let (kw, line, col) = self.atom("a constructor keyword")?;
            let e = match kw.as_str() {
                "cst" => {
                    let (n, l, c) = self.atom("an integer")?;
                    let i = n.parse::<i64>().map_err(|_| Error::Parse {
                        line: l,
                        col: c,
                        reason: format!("invalid integer `{n}`"),
                    })?;
                    cst(i)
                }
                "neg" => neg(self.expr()?),
                "add" => add(self.expr()?, self.expr()?),
                "sub" => sub(self.expr()?, self.expr()?),
                "var" => var(&self.ident()?),
                "let" => {
                    let n = self.ident()?;
                    let_(&n, self.expr()?, self.expr()?)
                }
                _ => {
                    return Err(Error::Parse {
                        line,
                        col,
                        reason: format!("unknown constructor `{kw}`"),
                    })
                }
            };
            self.expect(Tok::Close)?;
            Ok(e)
        })
    }
}

/// Parses one expression; trailing input is an error.
pub fn parse(text: &str) -> Result<Value> {
    let mut p = Parser {
        lexer: Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        },
        peeked: None,
    };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error_here("trailing input"));
    }
    Ok(e)
}

/// Removes double negations bottom-up.
pub fn simplify(e: &Value) -> Result<Value> {
    uniplate::try_map_family(
        &expr_ty(),
        &|x| {
            Ok(match view(&x)? {
                E::Neg(inner) => match view(inner)? {
                    E::Neg(y) => y.clone(),
                    _ => x.clone(),
                },
                _ => x,
            })
        },
        e,
    )
}

/// Evaluates sub-expressions made only of constants.
pub fn const_fold(e: &Value) -> Result<Value> {
    uniplate::try_map_family(
        &expr_ty(),
        &|x| {
            let folded = match view(&x)? {
                E::Add(a, b) => match (view(a)?, view(b)?) {
                    (E::Cst(i), E::Cst(j)) => Some(cst(i.wrapping_add(j))),
                    _ => None,
                },
                E::Sub(a, b) => match (view(a)?, view(b)?) {
                    (E::Cst(i), E::Cst(j)) => Some(cst(i.wrapping_sub(j))),
                    _ => None,
                },
                E::Neg(a) => match view(a)? {
                    E::Cst(i) => Some(cst(i.wrapping_neg())),
                    _ => None,
                },
                _ => None,
            };
            Ok(folded.unwrap_or(x))
        },
        e,
    )
}

/// One step of the `simplify_more` rewrite system.
pub fn simplify_more_rule(x: &Value) -> Option<Value> {
    match view(x).ok()? {
        E::Neg(inner) => match view(inner).ok()? {
            E::Neg(y) => Some(y.clone()),
            _ => None,
        },
        E::Sub(a, b) => Some(add(a.clone(), neg(b.clone()))),
        _ => None,
    }
}

/// Rewrites double negation and subtraction to normal form.
pub fn simplify_more(e: &Value, fuel: u64) -> Result<Value> {
    uniplate::reduce_family_with_fuel(&expr_ty(), &simplify_more_rule, e, fuel)
}

fn incr() -> Effectful {
    let t = TypeRep::int();
    let st = state_monad(&t);
    let m = st.clone();
    st.bind_fn(effects::get(&t), move |i| {
        let n = i.as_int().unwrap_or(0);
        let ret = m.ret(i);
        m.bind_fn(effects::put(&TypeRep::int(), Value::Int(n + 1)), move |_| Ok(ret.clone()))
    })
    .expect("state brands agree")
}

/// The stateful traversal replacing constants by fresh variables.
pub fn abstract_state(e: &Value) -> Result<Effectful> {
    let st = state_monad(&TypeRep::int());
    let step_monad = st.clone();
    uniplate::traverse_family(
        &st,
        &expr_ty(),
        Arc::new(move |x: Value| match view(&x)? {
            E::Cst(_) => effects::fun_of_mon(&step_monad).fmap(
                Func::new(|i| var(&format!("x{}", i.as_int().unwrap_or(0)))),
                incr(),
            ),
            _ => Ok(step_monad.ret(x.clone())),
        }),
        e,
    )
}

/// Replaces every constant by `x0`, `x1`, ... bottom-up, left to right.
/// Returns the new expression and the final counter.
pub fn abstract_(e: &Value) -> Result<(Value, i64)> {
    let (v, s) = run_state(&abstract_state(e)?, Value::Int(0))?;
    Ok((v, s.as_int().unwrap_or(0)))
}

fn scope_ty() -> TypeRep {
    TypeRep::list(TypeRep::string())
}

/// Free variables under the reader monad. The scope extension of a `Let`
/// covers all of its children, including the bound definition.
pub fn free_vars_scoped(e: &Value) -> Result<Effectful> {
    let reader = reader_monad(&scope_ty());
    uniplate::para(
        &expr_ty(),
        &|x: &Value, rs: Vec<Result<Effectful>>| -> Result<Effectful> {
            let rs = rs.into_iter().collect::<Result<Vec<_>>>()?;
            let concat = Func::new(|ls| {
                Value::list(ls.to_vec().unwrap_or_default().iter().flat_map(|l| l.to_vec().unwrap_or_default()))
            });
            let r = effects::fun_of_mon(&reader).fmap(concat, effects::sequence_m(&reader, rs)?)?;
            match view(x)? {
                E::Var(n) => {
                    let n = n.to_string();
                    let ret = reader.clone();
                    let in_scope = effects::fun_of_mon(&reader).fmap(
                        Func::new({
                            let n = n.clone();
                            move |ns| Value::bool(ns.to_vec().unwrap_or_default().iter().any(|s| s.as_str() == Some(&n)))
                        }),
                        ask(&scope_ty()),
                    )?;
                    reader.bind_fn(in_scope, move |b| {
                        Ok(ret.ret(if b.as_int() == Some(1) {
                            Value::nil()
                        } else {
                            Value::list([Value::string(&n)])
                        }))
                    })
                }
                E::Let(n, _, _) => {
                    let n = Value::string(n);
                    local(Func::new(move |ns| Value::cons(n.clone(), ns.clone())), r)
                }
                _ => Ok(r),
            }
        },
        e,
    )?
}

pub fn free_vars(e: &Value) -> Result<Vec<String>> {
    let out = run_reader(&free_vars_scoped(e)?, &Value::nil())?;
    Ok(out
        .to_vec()
        .unwrap_or_default()
        .iter()
        .filter_map(|s| s.as_str().map(str::to_string))
        .collect())
}

/// Every constant, in preorder.
pub fn constants(e: &Value) -> Result<Vec<i64>> {
    let mut out = vec![];
    for x in uniplate::family(&expr_ty(), e)? {
        if let E::Cst(k) = view(&x)? {
            out.push(k);
        }
    }
    Ok(out)
}

/// Zero for leaves, one more than the highest child otherwise.
pub fn height(e: &Value) -> Result<u64> {
    uniplate::para(&expr_ty(), &|_, rs: Vec<u64>| rs.into_iter().map(|h| h + 1).max().unwrap_or(0), e)
}

/// Not capture-avoiding: bindings only shadow the
/// environment inside the body of a `Let`.
pub fn subst(env: &HashMap<String, Value>, e: &Value) -> Result<Value> {
    crate::generics::grow(|| match view(e)? {
        E::Let(n, x, y) => {
            let mut inner = env.clone();
            inner.remove(n);
            Ok(let_(n, subst(env, x)?, subst(&inner, y)?))
        }
        E::Var(n) if env.contains_key(n) => Ok(env[n].clone()),
        _ => uniplate::try_map_children(&expr_ty(), &|c| subst(env, &c), e),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        let src = "(let y (cst -1) (add (var y) (sub (neg (var z)) (cst 2))))";
        let e = parse(src).unwrap();
        assert_eq!(print(&e).unwrap(), src);
        assert_eq!(parse(" ( cst\n 3 ) ").unwrap(), cst(3));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse("(add (cst 1)\n  (mul 2))") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 4)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(cst x)"), Err(Error::Parse { line: 1, col: 6, .. })));
        assert!(matches!(parse("(var 1x)"), Err(Error::Parse { .. })));
        assert!(matches!(parse("(cst 1) extra"), Err(Error::Parse { .. })));
        assert!(matches!(parse("(neg"), Err(Error::Parse { .. })));
    }

    #[test]
    fn published_pass_outputs() {
        assert_eq!(simplify(&neg(neg(cst(1)))).unwrap(), cst(1));
        assert_eq!(const_fold(&add(cst(1), cst(2))).unwrap(), cst(3));
        assert_eq!(
            simplify_more(&sub(var("x"), neg(var("y"))), 100).unwrap(),
            add(var("x"), var("y"))
        );
        assert_eq!(
            abstract_(&add(cst(1), cst(2))).unwrap(),
            (add(var("x0"), var("x1")), 2)
        );
        let e = let_("y", cst(1), add(var("y"), var("z")));
        assert_eq!(free_vars(&e).unwrap(), vec!["z".to_string()]);
        assert_eq!(constants(&add(cst(1), neg(cst(2)))).unwrap(), vec![1, 2]);
        assert_eq!(height(&cst(1)).unwrap(), 0);
        assert_eq!(height(&add(cst(1), neg(cst(2)))).unwrap(), 2);
    }

    #[test]
    fn free_vars_scope_covers_the_definition() {
        let e = let_("x", var("x"), var("x"));
        assert!(free_vars(&e).unwrap().is_empty());
    }

    #[test]
    fn substitution_respects_shadowing() {
        let env = HashMap::from([("x".to_string(), cst(7))]);
        let e = add(var("x"), let_("x", var("x"), var("x")));
        assert_eq!(
            subst(&env, &e).unwrap(),
            add(cst(7), let_("x", cst(7), var("x")))
        );
    }
}
