use std::collections::HashMap;

use super::graph::{graph_of_value, materialize_with, ValueGraph, ValueNode};
use crate::desc::{repr, resolve_synonyms, ConKind, Desc, Representation, Scalar};
use crate::error::{Error, Result};
use crate::generics::grow;
use crate::typerep::{anti_unify, TypePattern, TypeRep};
use crate::value::ConId;

/// Which way abstract values are converted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Replace abstract values by their public representation.
    To,
    /// Rebuild abstract values from their public representation.
    From,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Check,
    Convert(Direction),
}

/// A node together with how many abstract layers have been peeled off it.
pub(crate) type Key = (u32, u32);

/// Bookkeeping for one conversion or check. Not shared between calls.
#[derive(Default, Debug)]
pub struct ConvertState {
    visited: HashMap<Key, TypePattern>,
    first_size: HashMap<Key, usize>,
    updates: HashMap<Key, usize>,
    memo: HashMap<(Key, TypePattern), u32>,
    visits: HashMap<Key, usize>,
    pub(crate) ext_ids: HashMap<String, ConId>,
}

impl ConvertState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Times the node was descended into.
    pub fn visits(&self, node: u32) -> usize {
        self.visits.get(&(node, 0)).copied().unwrap_or(0)
    }

    pub fn total_visits(&self) -> usize {
        self.visits.values().sum()
    }

    /// Times the node's pattern was generalized after its first visit.
    pub fn updates(&self, node: u32) -> usize {
        self.updates.get(&(node, 0)).copied().unwrap_or(0)
    }

    pub fn first_pattern_size(&self, node: u32) -> Option<usize> {
        self.first_size.get(&(node, 0)).copied()
    }

    /// Most general pattern the node has been checked at.
    pub fn pattern(&self, node: u32) -> Option<&TypePattern> {
        self.visited.get(&(node, 0))
    }

    /// Every node checked at least once, in index order.
    pub fn seen_nodes(&self) -> Vec<u32> {
        let mut ns: Vec<u32> = self.visited.keys().filter(|k| k.1 == 0).map(|k| k.0).collect();
        ns.sort_unstable();
        ns
    }

    /// Records that `key` is now expected at `p`. Returns the pattern to
    /// check at, or `None` when an earlier check already covers `p`.
    pub(crate) fn generalize(&mut self, key: Key, p: &TypePattern) -> Option<TypePattern> {
        match self.visited.get(&key) {
            None => {
                self.visited.insert(key, p.clone());
                self.first_size.insert(key, p.size());
                Some(p.clone())
            }
            Some(q) => {
                let g = anti_unify(q, p);
                if &g == q {
                    return None;
                }
                let n = self.updates.entry(key).or_insert(0);
                *n += 1;
                let bound = self.first_size[&key];
                assert!(
                    *n <= bound,
                    "node #{} generalized {n} times from a pattern of size {bound}",
                    key.0
                );
                self.visited.insert(key, g.clone());
                Some(g)
            }
        }
    }

    pub(crate) fn count_visit(&mut self, key: Key) {
        *self.visits.entry(key).or_insert(0) += 1;
    }
}

/// What checking one node at one pattern requires next.
pub(crate) enum Step {
    /// Nothing below this node is constrained.
    Leaf,
    /// The node's edges, each at its own pattern.
    Fields(Vec<TypePattern>),
    /// The node must be checked again at the representation pattern.
    Repr(Representation, TypePattern),
}

fn field_patterns<'a>(tys: impl Iterator<Item = &'a TypeRep>) -> Vec<TypePattern> {
    tys.map(TypePattern::generalize).collect()
}

/// Checks the top of `node` against `p` and says how to continue.
pub(crate) fn expand(
    p: &TypePattern,
    node: &ValueNode,
    path: &str,
    ext_ids: &mut HashMap<String, ConId>,
) -> Result<Step> {
    if p.is_any() {
        return Ok(Step::Leaf);
    }
    let incompatible = || Error::Incompatible {
        path: path.to_string(),
        expected: p.to_string(),
        found: node.kind(),
    };
    let (t, d) = resolve_synonyms(&p.instantiate());
    let step = match (d, node) {
        (Desc::Scalar(Scalar::Int), ValueNode::Imm(_)) => Step::Leaf,
        (Desc::Scalar(Scalar::Float), ValueNode::Float(_)) => Step::Leaf,
        (Desc::Scalar(Scalar::String), ValueNode::Bytes(b)) if std::str::from_utf8(b).is_ok() => Step::Leaf,
        (Desc::Variant(v), ValueNode::Imm(i)) if (0..v.cst_len() as i64).contains(i) => Step::Leaf,
        (Desc::Variant(v), ValueNode::Block { tag, fields }) => match v.ncst_get(*tag as usize) {
            Ok(c) if c.arity() == fields.len() => Step::Fields(field_patterns(c.fields.iter().map(|f| &f.ty))),
            _ => return Err(incompatible()),
        },
        (Desc::Record(r), ValueNode::Block { tag: 0, fields }) if fields.len() == r.fields().len() => {
            Step::Fields(field_patterns(r.fields().iter().map(|f| &f.ty)))
        }
        (Desc::Product(pd), ValueNode::Block { tag: 0, fields }) if fields.len() == pd.shape().len() => {
            Step::Fields(field_patterns(pd.shape().components().iter()))
        }
        (Desc::ArrayLike { elem, .. }, ValueNode::Block { tag: 0, fields }) => {
            Step::Fields(vec![TypePattern::generalize(&elem); fields.len()])
        }
        (Desc::Extensible(e), ValueNode::ExtCon { name, fields }) => {
            let c = e
                .lookup(name)
                .ok_or_else(|| Error::UnknownConstructor(name.clone()))?;
            if c.arity() != fields.len() {
                return Err(incompatible());
            }
            if let ConKind::Ext(id) = c.kind {
                ext_ids.insert(name.clone(), id);
            }
            Step::Fields(field_patterns(c.fields.iter().map(|f| &f.ty)))
        }
        (Desc::Abstract { .. } | Desc::Opaque { .. }, _) => {
            let r = repr(&t).map_err(|_| Error::NoDescriptor(p.to_string()))?;
            let rp = TypePattern::generalize(&r.repr_ty);
            Step::Repr(r, rp)
        }
        (Desc::NoDesc | Desc::Synonym { .. }, _) => return Err(Error::NoDescriptor(p.to_string())),
        _ => return Err(incompatible()),
    };
    Ok(step)
}

enum Slot {
    Pending,
    Node(ValueNode),
    Indirect(u32),
}

/// Output graph under construction. Slots are reserved before their
/// contents are known so that cycles can refer to them.
struct Builder {
    slots: Vec<Slot>,
}

impl Builder {
    fn reserve(&mut self) -> u32 {
        self.slots.push(Slot::Pending);
        (self.slots.len() - 1) as u32
    }

    fn fill(&mut self, i: u32, s: Slot) {
        self.slots[i as usize] = s;
    }

    fn append(&mut self, g: &ValueGraph) -> u32 {
        let base = self.slots.len() as u32;
        for n in g.nodes() {
            let refs = n.refs().iter().map(|r| r + base).collect();
            self.slots.push(Slot::Node(n.with_refs(refs)));
        }
        base + g.root()
    }

    fn resolve(&self, mut i: u32) -> Result<u32> {
        for _ in 0..=self.slots.len() {
            match self.slots[i as usize] {
                Slot::Indirect(j) => i = j,
                _ => return Ok(i),
            }
        }
        Err(Error::CyclicValue(i))
    }

    fn node(&self, i: u32) -> Result<&ValueNode> {
        match &self.slots[self.resolve(i)? as usize] {
            Slot::Node(n) => Ok(n),
            _ => Err(Error::CyclicValue(i)),
        }
    }

    /// Removes indirections and renumbers reachable nodes in preorder.
    fn finish(&self, root: u32) -> Result<ValueGraph> {
        let mut fresh: HashMap<u32, u32> = HashMap::new();
        let mut order = Vec::new();
        let mut stack = vec![self.resolve(root)?];
        while let Some(i) = stack.pop() {
            if fresh.contains_key(&i) {
                continue;
            }
            fresh.insert(i, order.len() as u32);
            order.push(i);
            for &r in self.node(i)?.refs().iter().rev() {
                stack.push(self.resolve(r)?);
            }
        }
        let nodes = order
            .iter()
            .map(|&i| {
                let n = self.node(i)?;
                let refs = n
                    .refs()
                    .iter()
                    .map(|&r| Ok(fresh[&self.resolve(r)?]))
                    .collect::<Result<Vec<_>>>()?;
                Ok(n.with_refs(refs))
            })
            .collect::<Result<Vec<_>>>()?;
        ValueGraph::new(nodes, 0)
    }
}

struct Converter<'a> {
    mode: Mode,
    g: &'a ValueGraph,
    st: &'a mut ConvertState,
    out: &'a mut Builder,
}

impl Converter<'_> {
    fn visit(&mut self, p: &TypePattern, key: Key, path: &str) -> Result<u32> {
        grow(|| {
            if p.is_any() && self.mode == Mode::Check {
                return Ok(0);
            }
            let p = match self.st.generalize(key, p) {
                Some(p) => p,
                None => {
                    let q = self.st.visited[&key].clone();
                    return Ok(self.st.memo[&(key, q)]);
                }
            };
            self.st.count_visit(key);
            let slot = match self.mode {
                Mode::Check => 0,
                Mode::Convert(_) => self.out.reserve(),
            };
            self.st.memo.insert((key, p.clone()), slot);
            let node = self.g.node(key.0);
            let step = if p.is_any() {
                Step::Fields(vec![TypePattern::Any; node.refs().len()])
            } else {
                expand(&p, node, path, &mut self.st.ext_ids)?
            };
            match step {
                Step::Leaf => self.emit(slot, Slot::Node(node.clone())),
                Step::Fields(ps) => {
                    let mut refs = Vec::with_capacity(ps.len());
                    for (i, (&r, cp)) in node.refs().iter().zip(&ps).enumerate() {
                        refs.push(self.visit(cp, (r, 0), &format!("{path}.{i}"))?);
                    }
                    self.emit(slot, Slot::Node(node.with_refs(refs)));
                }
                Step::Repr(r, rp) => {
                    let inner = (key.0, key.1 + 1);
                    match self.mode {
                        Mode::Check => {
                            self.visit(&rp, inner, path)?;
                        }
                        Mode::Convert(Direction::To) => {
                            let v = materialize_with(&|i| Ok(self.g.node(i)), key.0, &HashMap::new())?;
                            let tmp = graph_of_value(&r.to_repr(&v))?;
                            let mut st = ConvertState::new();
                            let mut sub = Converter {
                                mode: self.mode,
                                g: &tmp,
                                st: &mut st,
                                out: self.out,
                            };
                            let idx = sub.visit(&rp, (tmp.root(), 0), path)?;
                            self.emit(slot, Slot::Indirect(idx));
                        }
                        Mode::Convert(Direction::From) => {
                            let idx = self.visit(&rp, inner, path)?;
                            let out = &*self.out;
                            let v = materialize_with(&|i| out.node(i), idx, &self.st.ext_ids)?;
                            let back = r.from_repr(&v).ok_or_else(|| Error::RepresentationRejected {
                                path: path.to_string(),
                            })?;
                            let root = self.out.append(&graph_of_value(&back)?);
                            self.emit(slot, Slot::Indirect(root));
                        }
                    }
                }
            }
            Ok(slot)
        })
    }

    fn emit(&mut self, slot: u32, s: Slot) {
        if self.mode != Mode::Check {
            self.out.fill(slot, s);
        }
    }
}

pub(crate) fn ensure_node(g: &ValueGraph, n: u32) -> Result<()> {
    if (n as usize) < g.len() {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            index: n as usize,
            len: g.len(),
        })
    }
}

fn run(mode: Mode, p: &TypePattern, g: &ValueGraph, n: u32, st: &mut ConvertState) -> Result<Option<ValueGraph>> {
    ensure_node(g, n)?;
    let mut out = Builder { slots: Vec::new() };
    let mut c = Converter {
        mode,
        g,
        st,
        out: &mut out,
    };
    let root = c.visit(p, (n, 0), "$")?;
    match mode {
        Mode::Check => Ok(None),
        Mode::Convert(_) => Ok(Some(out.finish(root)?)),
    }
}

/// Checks the subgraph at `n` against `t` while converting abstract values
/// in direction `d`. The result is a new graph rooted at the converted node.
pub fn convert(d: Direction, t: &TypeRep, g: &ValueGraph, n: u32, st: &mut ConvertState) -> Result<ValueGraph> {
    convert_pattern(d, &TypePattern::from(t), g, n, st)
}

pub fn convert_pattern(
    d: Direction,
    p: &TypePattern,
    g: &ValueGraph,
    n: u32,
    st: &mut ConvertState,
) -> Result<ValueGraph> {
    Ok(run(Mode::Convert(d), p, g, n, st)?.expect("conversion produces a graph"))
}

/// Validates the subgraph at `n` against `t` without building anything.
pub fn check_compat(t: &TypeRep, g: &ValueGraph, n: u32, st: &mut ConvertState) -> Result<()> {
    check_compat_pattern(&TypePattern::from(t), g, n, st)
}

/// As [`check_compat`]; wildcard positions accept any subgraph.
pub fn check_compat_pattern(p: &TypePattern, g: &ValueGraph, n: u32, st: &mut ConvertState) -> Result<()> {
    run(Mode::Check, p, g, n, st).map(|_| ())
}

