//! Value-level type representations.
//!
//! A [`TypeRep`] is a ground type term: a nominal head constructor applied to
//! a fixed number of argument representations. Heads are declared once in a
//! process-wide constructor table which fixes their arity. [`TypePattern`]
//! extends the ground terms with the wildcard [`TypePattern::Any`] and is used
//! for dispatch keys and for the anti-unification performed by the
//! deserialization checker.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::{Error, Result};
use crate::value::Value;

/// Module path under which the built-in heads are declared.
pub const STDLIB: &str = "Stdlib";
const VAR_MODULE: &str = "%var";

/// Nominal identity of a type constructor.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Head {
    name: Arc<str>,
    module_path: Arc<str>,
}

impl Head {
    fn new(module_path: &str, name: &str) -> Self {
        Head {
            name: name.into(),
            module_path: module_path.into(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn module_path(&self) -> &str {
        &self.module_path
    }

    /// Fully qualified `Module.Path.Name`.
    pub fn qualified(&self) -> String {
        if self.module_path.is_empty() {
            self.name.to_string()
        } else {
            format!("{}.{}", self.module_path, self.name)
        }
    }

    pub fn is_var(&self) -> bool {
        &*self.module_path == VAR_MODULE
    }

    /// Registered arity, `None` for heads that were never declared.
    pub fn arity(&self) -> Option<usize> {
        if self.is_var() {
            return Some(0);
        }
        TABLE.read().unwrap().arities.get(self).copied()
    }

    pub(crate) fn builtin(name: &str) -> Self {
        Head::new(STDLIB, name)
    }
}

impl Ord for Head {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then_with(|| self.module_path.cmp(&other.module_path))
    }
}

impl PartialOrd for Head {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.qualified())
    }
}

impl fmt::Display for Head {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Default)]
struct TypeTable {
    arities: HashMap<Head, usize>,
    by_name: HashMap<Arc<str>, Vec<Head>>,
}

impl TypeTable {
    fn insert(&mut self, head: Head, arity: usize) {
        self.by_name
            .entry(head.name.clone())
            .or_default()
            .push(head.clone());
        self.arities.insert(head, arity);
    }
}

static TABLE: LazyLock<RwLock<TypeTable>> = LazyLock::new(|| {
    let mut table = TypeTable::default();
    for (name, arity) in [
        ("Int", 0),
        ("Float", 0),
        ("String", 0),
        ("Bool", 0),
        ("Unit", 0),
        ("List", 1),
        ("Option", 1),
        ("Array", 1),
        ("Pair", 2),
        ("Fun", 2),
    ] {
        table.insert(Head::builtin(name), arity);
    }
    RwLock::new(table)
});

/// Declares a type constructor. Declaring the same head again with the same
/// arity returns the existing head.
pub fn declare_type(module_path: &str, name: &str, arity: usize) -> Result<Head> {
    let head = Head::new(module_path, name);
    let mut table = TABLE.write().unwrap();
    match table.arities.get(&head) {
        Some(&known) if known == arity => Ok(head),
        Some(&known) => Err(Error::ArityMismatch {
            what: head.qualified(),
            expected: known,
            found: arity,
        }),
        None => {
            table.insert(head.clone(), arity);
            Ok(head)
        }
    }
}

/// Resolves a head by its bare or qualified name.
pub fn lookup_head(name: &str) -> Result<Head> {
    let table = TABLE.read().unwrap();
    let (module, bare) = match name.rsplit_once('.') {
        Some((m, b)) => (Some(m), b),
        None => (None, name),
    };
    let candidates = table.by_name.get(bare).map(Vec::as_slice).unwrap_or(&[]);
    let mut found = candidates
        .iter()
        .filter(|h| module.is_none_or(|m| &*h.module_path == m));
    match (found.next(), found.next()) {
        (Some(h), None) => Ok(h.clone()),
        (Some(_), Some(_)) => Err(Error::UnknownType(format!("{name} (ambiguous)"))),
        (None, _) => Err(Error::UnknownType(name.to_string())),
    }
}

/// A ground type term.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TypeRep(Arc<RepNode>);

#[derive(PartialEq, Eq, Hash)]
struct RepNode {
    head: Head,
    args: Box<[TypeRep]>,
}

impl TypeRep {
    /// Applies a declared head to its arguments, checking the arity.
    pub fn new(head: Head, args: Vec<TypeRep>) -> Result<Self> {
        let expected = head
            .arity()
            .ok_or_else(|| Error::UnknownType(head.qualified()))?;
        if expected != args.len() {
            return Err(Error::ArityMismatch {
                what: head.qualified(),
                expected,
                found: args.len(),
            });
        }
        Ok(Self::unchecked(head, args))
    }

    pub(crate) fn unchecked(head: Head, args: Vec<TypeRep>) -> Self {
        TypeRep(Arc::new(RepNode {
            head,
            args: args.into_boxed_slice(),
        }))
    }

    pub fn head(&self) -> &Head {
        &self.0.head
    }

    pub fn args(&self) -> &[TypeRep] {
        &self.0.args
    }

    pub fn arg(&self, i: usize) -> &TypeRep {
        &self.0.args[i]
    }

    pub fn is_head(&self, name: &str) -> bool {
        self.head().module_path() == STDLIB && self.head().name() == name
    }

    /// Number of constructor nodes in the term.
    pub fn size(&self) -> usize {
        1 + self.args().iter().map(TypeRep::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(TypeRep::depth).max().unwrap_or(0)
    }

    pub fn int() -> Self {
        Self::unchecked(Head::builtin("Int"), vec![])
    }

    pub fn float() -> Self {
        Self::unchecked(Head::builtin("Float"), vec![])
    }

    pub fn string() -> Self {
        Self::unchecked(Head::builtin("String"), vec![])
    }

    pub fn bool() -> Self {
        Self::unchecked(Head::builtin("Bool"), vec![])
    }

    pub fn unit() -> Self {
        Self::unchecked(Head::builtin("Unit"), vec![])
    }

    pub fn list(elem: TypeRep) -> Self {
        Self::unchecked(Head::builtin("List"), vec![elem])
    }

    pub fn option(elem: TypeRep) -> Self {
        Self::unchecked(Head::builtin("Option"), vec![elem])
    }

    pub fn array(elem: TypeRep) -> Self {
        Self::unchecked(Head::builtin("Array"), vec![elem])
    }

    pub fn pair(a: TypeRep, b: TypeRep) -> Self {
        Self::unchecked(Head::builtin("Pair"), vec![a, b])
    }

    pub fn fun(a: TypeRep, b: TypeRep) -> Self {
        Self::unchecked(Head::builtin("Fun"), vec![a, b])
    }

    /// Placeholder standing for an unknown type; only produced when a
    /// pattern is instantiated for descriptor lookup.
    pub(crate) fn var(index: usize) -> Self {
        Self::unchecked(Head::new(VAR_MODULE, &format!("'{index}")), vec![])
    }

    pub fn is_var(&self) -> bool {
        self.head().is_var()
    }

    /// Parses the `Head(arg, ...)` rendering against the constructor table.
    pub fn parse(text: &str) -> Result<Self> {
        let pattern = Parser::new(text, false).parse_all()?;
        pattern.to_rep().ok_or_else(|| Error::TypeSyntax {
            offset: 0,
            reason: "wildcard not allowed in a type".into(),
        })
    }
}

impl fmt::Display for TypeRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head())?;
        write_args(f, self.args())
    }
}

impl fmt::Debug for TypeRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn write_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, args: &[T]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

/// A type term that may contain the wildcard `Any`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum TypePattern {
    Any,
    Con(Head, Vec<TypePattern>),
}

impl TypePattern {
    pub fn con(head: Head, args: Vec<TypePattern>) -> Self {
        TypePattern::Con(head, args)
    }

    /// The pattern with the given head and every argument widened to `Any`.
    pub fn head_key(&self) -> TypePattern {
        match self {
            TypePattern::Any => TypePattern::Any,
            TypePattern::Con(h, args) => {
                TypePattern::Con(h.clone(), vec![TypePattern::Any; args.len()])
            }
        }
    }

    pub fn head(&self) -> Option<&Head> {
        match self {
            TypePattern::Any => None,
            TypePattern::Con(h, _) => Some(h),
        }
    }

    pub fn is_any(&self) -> bool {
        matches!(self, TypePattern::Any)
    }

    /// Number of non-wildcard nodes.
    pub fn size(&self) -> usize {
        match self {
            TypePattern::Any => 0,
            TypePattern::Con(_, args) => 1 + args.iter().map(TypePattern::size).sum::<usize>(),
        }
    }

    /// The ground type, if the pattern contains no wildcard.
    pub fn to_rep(&self) -> Option<TypeRep> {
        match self {
            TypePattern::Any => None,
            TypePattern::Con(h, args) => {
                let args = args.iter().map(TypePattern::to_rep).collect::<Option<Vec<_>>>()?;
                Some(TypeRep::unchecked(h.clone(), args))
            }
        }
    }

    /// Replaces every wildcard by a distinct placeholder variable.
    pub(crate) fn instantiate(&self) -> TypeRep {
        fn go(p: &TypePattern, next: &mut usize) -> TypeRep {
            match p {
                TypePattern::Any => {
                    *next += 1;
                    TypeRep::var(*next - 1)
                }
                TypePattern::Con(h, args) => {
                    TypeRep::unchecked(h.clone(), args.iter().map(|a| go(a, next)).collect())
                }
            }
        }
        go(self, &mut 0)
    }

    /// Inverse of [`instantiate`](Self::instantiate): placeholders become `Any`.
    pub(crate) fn generalize(rep: &TypeRep) -> TypePattern {
        if rep.is_var() {
            TypePattern::Any
        } else {
            TypePattern::Con(
                rep.head().clone(),
                rep.args().iter().map(TypePattern::generalize).collect(),
            )
        }
    }

    /// Parses the rendering used by [`Display`](fmt::Display); `_` is the
    /// wildcard.
    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text, true).parse_all()
    }
}

impl From<&TypeRep> for TypePattern {
    fn from(rep: &TypeRep) -> Self {
        TypePattern::Con(
            rep.head().clone(),
            rep.args().iter().map(TypePattern::from).collect(),
        )
    }
}

impl From<TypeRep> for TypePattern {
    fn from(rep: TypeRep) -> Self {
        TypePattern::from(&rep)
    }
}

impl fmt::Display for TypePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypePattern::Any => f.write_str("_"),
            TypePattern::Con(h, args) => {
                write!(f, "{h}")?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Debug for TypePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Evidence that two representations denote the same type.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EqualityWitness {
    left: TypeRep,
    right: TypeRep,
}

impl EqualityWitness {
    /// Evidence for a declared synonym; the descriptor registry is the only
    /// other place allowed to relate two distinct heads.
    pub(crate) fn declared(left: TypeRep, right: TypeRep) -> Self {
        EqualityWitness { left, right }
    }

    pub fn left(&self) -> &TypeRep {
        &self.left
    }

    pub fn right(&self) -> &TypeRep {
        &self.right
    }

    pub fn symmetric(&self) -> EqualityWitness {
        EqualityWitness {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }
}

/// Decides structural equality, descending through every type argument.
pub fn ty_equal(a: &TypeRep, b: &TypeRep) -> Option<EqualityWitness> {
    fn same(a: &TypeRep, b: &TypeRep) -> bool {
        if Arc::ptr_eq(&a.0, &b.0) {
            return true;
        }
        a.head() == b.head()
            && a.args().len() == b.args().len()
            && a.args().iter().zip(b.args()).all(|(x, y)| same(x, y))
    }
    same(a, b).then(|| EqualityWitness {
        left: a.clone(),
        right: b.clone(),
    })
}

/// Retags a payload from `from` to `to` when the two types are equal.
pub fn coerce(from: &TypeRep, to: &TypeRep, value: Value) -> Option<Value> {
    ty_equal(from, to).map(|_| value)
}

/// A value paired with its own type representation.
#[derive(Clone, Debug)]
pub struct Dyn {
    pub rep: TypeRep,
    pub value: Value,
}

impl Dyn {
    pub fn new(rep: TypeRep, value: Value) -> Self {
        Dyn { rep, value }
    }

    pub fn coerce(&self, to: &TypeRep) -> Option<Value> {
        coerce(&self.rep, to, self.value.clone())
    }
}

impl PartialEq for Dyn {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep && self.value == other.value
    }
}

/// `true` when `ty` is an instance of `pattern`.
pub fn matches(pattern: &TypePattern, ty: &TypeRep) -> bool {
    match pattern {
        TypePattern::Any => true,
        TypePattern::Con(h, args) => {
            h == ty.head()
                && args.len() == ty.args().len()
                && args.iter().zip(ty.args()).all(|(p, t)| matches(p, t))
        }
    }
}

/// Outcome of [`compare_specificity`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Specificity {
    MoreSpecific,
    MoreGeneral,
    Equal,
    Incomparable,
}

/// Lexicographic specificity order: `Any` is more general than any concrete
/// head, equal heads are compared argument by argument and the first
/// non-equal argument decides; distinct heads are incomparable.
pub fn compare_specificity(p: &TypePattern, q: &TypePattern) -> Specificity {
    match (p, q) {
        (TypePattern::Any, TypePattern::Any) => Specificity::Equal,
        (TypePattern::Any, _) => Specificity::MoreGeneral,
        (_, TypePattern::Any) => Specificity::MoreSpecific,
        (TypePattern::Con(h1, a1), TypePattern::Con(h2, a2)) => {
            if h1 != h2 || a1.len() != a2.len() {
                return Specificity::Incomparable;
            }
            a1.iter()
                .zip(a2)
                .map(|(x, y)| compare_specificity(x, y))
                .find(|s| *s != Specificity::Equal)
                .unwrap_or(Specificity::Equal)
        }
    }
}

/// Total order used to sort dispatch buckets: agrees with
/// [`compare_specificity`] whenever that is not `Incomparable`, and breaks
/// incomparable heads by name. `Less` means "tried first".
pub fn dispatch_order(p: &TypePattern, q: &TypePattern) -> Ordering {
    match (p, q) {
        (TypePattern::Any, TypePattern::Any) => Ordering::Equal,
        (TypePattern::Any, _) => Ordering::Greater,
        (_, TypePattern::Any) => Ordering::Less,
        (TypePattern::Con(h1, a1), TypePattern::Con(h2, a2)) => h1
            .cmp(h2)
            .then(a1.len().cmp(&a2.len()))
            .then_with(|| {
                a1.iter()
                    .zip(a2)
                    .map(|(x, y)| dispatch_order(x, y))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
    }
}

/// Least general pattern that both arguments are instances of.
pub fn anti_unify(a: &TypePattern, b: &TypePattern) -> TypePattern {
    match (a, b) {
        (TypePattern::Con(h1, a1), TypePattern::Con(h2, a2)) if h1 == h2 && a1.len() == a2.len() => {
            TypePattern::Con(
                h1.clone(),
                a1.iter().zip(a2).map(|(x, y)| anti_unify(x, y)).collect(),
            )
        }
        _ => TypePattern::Any,
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    allow_wildcard: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, allow_wildcard: bool) -> Self {
        Parser {
            text,
            pos: 0,
            allow_wildcard,
        }
    }

    fn error(&self, reason: impl Into<String>) -> Error {
        Error::TypeSyntax {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.text[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<TypePattern> {
        let p = self.parse_term()?;
        self.skip_ws();
        if self.pos != self.text.len() {
            return Err(self.error("trailing input"));
        }
        Ok(p)
    }

    fn parse_term(&mut self) -> Result<TypePattern> {
        self.skip_ws();
        let rest = &self.text[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '\''))
            .unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected a type name"));
        }
        let name = &rest[..len];
        let start = self.pos;
        self.pos += len;
        if name == "_" {
            if !self.allow_wildcard {
                return Err(Error::TypeSyntax {
                    offset: start,
                    reason: "wildcard not allowed in a type".into(),
                });
            }
            return Ok(TypePattern::Any);
        }
        let head = lookup_head(name)?;
        let mut args = Vec::new();
        if self.eat('(') {
            loop {
                args.push(self.parse_term()?);
                if self.eat(',') {
                    continue;
                }
                if self.eat(')') {
                    break;
                }
                return Err(self.error("expected `,` or `)`"));
            }
        }
        let arity = head.arity().unwrap_or(0);
        if arity != args.len() {
            return Err(Error::ArityMismatch {
                what: head.qualified(),
                expected: arity,
                found: args.len(),
            });
        }
        Ok(TypePattern::Con(head, args))
    }
}
