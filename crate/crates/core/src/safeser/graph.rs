use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generics::grow;
use crate::value::{ConId, ExtValue, Value};

/// One vertex of a value graph. Edges are indices into the owning graph.
#[derive(Clone, Debug)]
pub enum ValueNode {
    Imm(i64),
    Block { tag: u32, fields: Vec<u32> },
    Bytes(Vec<u8>),
    Float(f64),
    ExtCon { name: String, fields: Vec<u32> },
}

impl PartialEq for ValueNode {
    fn eq(&self, other: &Self) -> bool {
        use ValueNode::*;
        match (self, other) {
            (Imm(a), Imm(b)) => a == b,
            (Block { tag: t1, fields: f1 }, Block { tag: t2, fields: f2 }) => t1 == t2 && f1 == f2,
            (Bytes(a), Bytes(b)) => a == b,
            (Float(a), Float(b)) => a.to_bits() == b.to_bits(),
            (ExtCon { name: n1, fields: f1 }, ExtCon { name: n2, fields: f2 }) => n1 == n2 && f1 == f2,
            _ => false,
        }
    }
}

impl ValueNode {
    pub fn refs(&self) -> &[u32] {
        match self {
            ValueNode::Block { fields, .. } | ValueNode::ExtCon { fields, .. } => fields,
            _ => &[],
        }
    }

    /// The same node with its edges replaced.
    pub fn with_refs(&self, refs: Vec<u32>) -> ValueNode {
        match self {
            ValueNode::Block { tag, .. } => ValueNode::Block { tag: *tag, fields: refs },
            ValueNode::ExtCon { name, .. } => ValueNode::ExtCon {
                name: name.clone(),
                fields: refs,
            },
            n => n.clone(),
        }
    }

    /// Short description used in error messages.
    pub fn kind(&self) -> String {
        match self {
            ValueNode::Imm(i) => format!("Imm {i}"),
            ValueNode::Block { tag, fields } => format!("Block(tag {tag}, arity {})", fields.len()),
            ValueNode::Bytes(b) => format!("Bytes(length {})", b.len()),
            ValueNode::Float(_) => "Float".into(),
            ValueNode::ExtCon { name, fields } => format!("ExtCon({name}, arity {})", fields.len()),
        }
    }
}

impl fmt::Display for ValueNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let refs = |r: &[u32]| r.iter().map(|i| format!("#{i}")).collect::<Vec<_>>().join(" ");
        match self {
            ValueNode::Imm(i) => write!(f, "Imm {i}"),
            ValueNode::Block { tag, fields } => write!(f, "Block {tag} [{}]", refs(fields)),
            ValueNode::Bytes(b) => write!(f, "Bytes {:?}", String::from_utf8_lossy(b)),
            ValueNode::Float(x) => write!(f, "Float {x:?}"),
            ValueNode::ExtCon { name, fields } => write!(f, "ExtCon {name} [{}]", refs(fields)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueGraph {
    nodes: Vec<ValueNode>,
    root: u32,
}

impl ValueGraph {
    /// Fails unless the root and every edge are in range.
    pub fn new(nodes: Vec<ValueNode>, root: u32) -> Result<Self> {
        let len = nodes.len();
        let in_range = |i: u32| (i as usize) < len;
        if !in_range(root) {
            return Err(Error::MalformedValue(format!("root #{root} out of range ({len} nodes)")));
        }
        for (i, n) in nodes.iter().enumerate() {
            if let Some(bad) = n.refs().iter().find(|&&r| !in_range(r)) {
                return Err(Error::MalformedValue(format!("node #{i} refers to missing node #{bad}")));
            }
        }
        Ok(ValueGraph { nodes, root })
    }

    pub fn nodes(&self) -> &[ValueNode] {
        &self.nodes
    }

    pub fn node(&self, i: u32) -> &ValueNode {
        &self.nodes[i as usize]
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same graph rooted elsewhere.
    pub fn with_root(&self, root: u32) -> Result<Self> {
        ValueGraph::new(self.nodes.clone(), root)
    }

    /// One line per node followed by the root.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            out.push_str(&format!("#{i} {n}\n"));
        }
        out.push_str(&format!("root #{}\n", self.root));
        out
    }

    /// Renumbers the nodes reachable from the root in preorder, dropping the
    /// rest. This is the numbering `graph_of_value` produces.
    pub fn canonical(&self) -> ValueGraph {
        let mut fresh: HashMap<u32, u32> = HashMap::new();
        let mut order = Vec::new();
        let mut stack = vec![self.root];
        while let Some(i) = stack.pop() {
            if fresh.contains_key(&i) {
                continue;
            }
            fresh.insert(i, order.len() as u32);
            order.push(i);
            stack.extend(self.node(i).refs().iter().rev());
        }
        let nodes = order
            .iter()
            .map(|&i| {
                let n = self.node(i);
                n.with_refs(n.refs().iter().map(|r| fresh[r]).collect())
            })
            .collect();
        ValueGraph { nodes, root: 0 }
    }
}

fn cell_key(v: &Value) -> Option<usize> {
    match v {
        Value::Block(b) => Some(Arc::as_ptr(b) as usize),
        Value::Ext(e) => Some(Arc::as_ptr(e) as usize),
        Value::Str(s) => Some(Arc::as_ptr(s) as *const u8 as usize),
        _ => None,
    }
}

/// The graph of a value in preorder, root first. Physically shared cells
/// become shared nodes; immediates and floats are never shared.
pub fn graph_of_value(v: &Value) -> Result<ValueGraph> {
    struct Builder {
        nodes: Vec<Option<ValueNode>>,
        seen: HashMap<usize, u32>,
    }

    fn go(b: &mut Builder, v: &Value) -> Result<u32> {
        grow(|| {
            let key = cell_key(v);
            if let Some(i) = key.and_then(|k| b.seen.get(&k)) {
                return Ok(*i);
            }
            let id = b.nodes.len() as u32;
            b.nodes.push(None);
            if let Some(k) = key {
                b.seen.insert(k, id);
            }
            let node = match v {
                Value::Int(i) => ValueNode::Imm(*i),
                Value::Float(x) => ValueNode::Float(*x),
                Value::Str(s) => ValueNode::Bytes(s.as_bytes().to_vec()),
                Value::Block(blk) => ValueNode::Block {
                    tag: blk.tag,
                    fields: blk.fields.iter().map(|f| go(b, f)).collect::<Result<_>>()?,
                },
                Value::Ext(e) => ValueNode::ExtCon {
                    name: e.name.to_string(),
                    fields: e.fields.iter().map(|f| go(b, f)).collect::<Result<_>>()?,
                },
                Value::Fun(_) => return Err(Error::NoDescriptor("function value".into())),
            };
            b.nodes[id as usize] = Some(node);
            Ok(id)
        })
    }

    let mut b = Builder {
        nodes: Vec::new(),
        seen: HashMap::new(),
    };
    let root = go(&mut b, v)?;
    Ok(ValueGraph {
        nodes: b.nodes.into_iter().map(|n| n.expect("every reserved node is filled")).collect(),
        root,
    })
}

/// Rebuilds a value from graph nodes reachable from `root`. `node_at` maps
/// an index to its node; `ext_ids` gives identities to extensible
/// constructors by name. Cycles cannot be represented and are reported.
pub(crate) fn materialize_with<'a>(
    node_at: &dyn Fn(u32) -> Result<&'a ValueNode>,
    root: u32,
    ext_ids: &HashMap<String, ConId>,
) -> Result<Value> {
    struct Ctx<'c, 'a> {
        node_at: &'c dyn Fn(u32) -> Result<&'a ValueNode>,
        ext_ids: &'c HashMap<String, ConId>,
        done: HashMap<u32, Value>,
        active: HashSet<u32>,
    }

    fn go(c: &mut Ctx<'_, '_>, i: u32) -> Result<Value> {
        grow(|| {
            if let Some(v) = c.done.get(&i) {
                return Ok(v.clone());
            }
            if !c.active.insert(i) {
                return Err(Error::CyclicValue(i));
            }
            let node = (c.node_at)(i)?;
            let mut fields = |refs: &[u32]| refs.iter().map(|&r| go(c, r)).collect::<Result<Vec<_>>>();
            let v = match node {
                ValueNode::Imm(k) => Value::Int(*k),
                ValueNode::Float(x) => Value::Float(*x),
                ValueNode::Bytes(b) => Value::Str(
                    std::str::from_utf8(b)
                        .map_err(|_| Error::MalformedValue(format!("node #{i} is not valid UTF-8")))?
                        .into(),
                ),
                ValueNode::Block { tag, fields: refs } => Value::block(*tag, fields(refs)?),
                ValueNode::ExtCon { name, fields: refs } => {
                    let fields = fields(refs)?;
                    Value::Ext(Arc::new(ExtValue {
                        name: name.as_str().into(),
                        identity: c.ext_ids.get(name).copied(),
                        fields,
                    }))
                }
            };
            c.active.remove(&i);
            c.done.insert(i, v.clone());
            Ok(v)
        })
    }

    let mut c = Ctx {
        node_at,
        ext_ids,
        done: HashMap::new(),
        active: HashSet::new(),
    };
    go(&mut c, root)
}

/// The value rooted at the graph's root. Extensible constructors keep no
/// identity unless resolved through `ext_ids`.
pub fn materialize(g: &ValueGraph, ext_ids: &HashMap<String, ConId>) -> Result<Value> {
    materialize_with(&|i| Ok(g.node(i)), g.root, ext_ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_graph_is_preorder() {
        let g = graph_of_value(&Value::list([Value::Int(1), Value::Int(2)])).unwrap();
        assert_eq!(
            g.nodes(),
            &[
                ValueNode::Block { tag: 0, fields: vec![1, 2] },
                ValueNode::Imm(1),
                ValueNode::Block { tag: 0, fields: vec![3, 4] },
                ValueNode::Imm(2),
                ValueNode::Imm(0),
            ]
        );
        assert_eq!(g.canonical(), g);
    }

    #[test]
    fn shared_cells_become_shared_nodes() {
        let shared = Value::tuple(vec![Value::Int(1)]);
        let g = graph_of_value(&Value::pair(shared.clone(), shared)).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.node(0).refs(), &[1, 1]);
    }

    #[test]
    fn materialize_rejects_cycles() {
        let g = ValueGraph::new(vec![ValueNode::Block { tag: 0, fields: vec![0] }], 0).unwrap();
        assert_eq!(materialize(&g, &HashMap::new()), Err(Error::CyclicValue(0)));
    }

    #[test]
    fn out_of_range_edges_are_rejected() {
        assert!(ValueGraph::new(vec![ValueNode::Block { tag: 0, fields: vec![3] }], 0).is_err());
        assert!(ValueGraph::new(vec![ValueNode::Imm(0)], 1).is_err());
    }
}
