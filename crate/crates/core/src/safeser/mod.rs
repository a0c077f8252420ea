//! Type-safe serialization. Values are flattened to graphs of immediates and
//! blocks, converted against a type (checking compatibility and replacing
//! abstract values by their public representation), then encoded.
//! Deserialization runs the same conversion in the other direction, so bytes
//! read at the wrong type produce an error instead of an ill-typed value.

mod convert;
mod graph;
mod order;
mod wire;

pub use convert::{check_compat, check_compat_pattern, convert, convert_pattern, ConvertState, Direction};
pub use graph::{graph_of_value, materialize, ValueGraph, ValueNode};
pub use order::{
    check_compat_scc, check_compat_scc_pattern, check_compat_topo, check_compat_topo_pattern, topological_order,
};
pub use wire::{decode_graph, encode_graph, MAGIC};

use crate::desc::{resolve_synonyms, Desc};
use crate::error::{Error, Result};
use crate::typerep::TypeRep;
use crate::value::Value;

pub fn serialize(t: &TypeRep, v: &Value) -> Result<Vec<u8>> {
    if matches!(resolve_synonyms(t).1, Desc::NoDesc) {
        return Err(Error::NoDescriptor(t.to_string()));
    }
    let g = graph_of_value(v)?;
    let out = convert(Direction::To, t, &g, g.root(), &mut ConvertState::new())?;
    encode_graph(&out)
}

pub fn deserialize(t: &TypeRep, bytes: &[u8]) -> Result<Value> {
    let g = decode_graph(bytes)?;
    let mut st = ConvertState::new();
    let out = convert(Direction::From, t, &g, g.root(), &mut st)?;
    materialize(&out, &st.ext_ids)
}

/// Decodes and checks without building a value.
pub fn validate(t: &TypeRep, bytes: &[u8]) -> Result<ValueGraph> {
    let g = decode_graph(bytes)?;
    check_compat(t, &g, g.root(), &mut ConvertState::new())?;
    Ok(g)
}
