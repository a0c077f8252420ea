//! The binary encoding of value graphs. All integers are little-endian.
//!
//! ```text
//! "GVG1" root:u32 count:u32 node*
//! node ::= 0 i64
//!        | 1 tag:u32 arity:u32 ref:u32*
//!        | 2 len:u32 byte*
//!        | 3 f64
//!        | 4 len:u16 utf8* arity:u32 ref:u32*
//! ```

use super::graph::{ValueGraph, ValueNode};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GVG1";

const IMM: u8 = 0;
const BLOCK: u8 = 1;
const BYTES: u8 = 2;
const FLOAT: u8 = 3;
const EXT_CON: u8 = 4;

/// Smallest encoded node, used to bound the declared node count.
const MIN_NODE_LEN: usize = 5;

pub fn encode_graph(g: &ValueGraph) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&g.root().to_le_bytes());
    out.extend_from_slice(&len_u32(g.len(), "node count")?.to_le_bytes());
    let refs = |out: &mut Vec<u8>, fields: &[u32]| -> Result<()> {
        out.extend_from_slice(&len_u32(fields.len(), "arity")?.to_le_bytes());
        for f in fields {
            out.extend_from_slice(&f.to_le_bytes());
        }
        Ok(())
    };
    for n in g.nodes() {
        match n {
            ValueNode::Imm(i) => {
                out.push(IMM);
                out.extend_from_slice(&i.to_le_bytes());
            }
            ValueNode::Block { tag, fields } => {
                out.push(BLOCK);
                out.extend_from_slice(&tag.to_le_bytes());
                refs(&mut out, fields)?;
            }
            ValueNode::Bytes(b) => {
                out.push(BYTES);
                out.extend_from_slice(&len_u32(b.len(), "byte string")?.to_le_bytes());
                out.extend_from_slice(b);
            }
            ValueNode::Float(x) => {
                out.push(FLOAT);
                out.extend_from_slice(&x.to_le_bytes());
            }
            ValueNode::ExtCon { name, fields } => {
                out.push(EXT_CON);
                let len = u16::try_from(name.len())
                    .map_err(|_| Error::MalformedValue(format!("constructor name of {} bytes", name.len())))?;
                out.extend_from_slice(&len.to_le_bytes());
                out.extend_from_slice(name.as_bytes());
                refs(&mut out, fields)?;
            }
        }
    }
    Ok(out)
}

fn len_u32(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::MalformedValue(format!("{what} {n} does not fit in 32 bits")))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn fail(&self, offset: usize, reason: impl Into<String>) -> Error {
        Error::MalformedBytes {
            offset,
            reason: reason.into(),
        }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(self.fail(self.pos, format!("truncated {what}")));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<[u8; 8]> {
        Ok(self.take(8, what)?.try_into().unwrap())
    }

    fn refs(&mut self, count: u32) -> Result<Vec<u32>> {
        let arity = self.u32("arity")? as usize;
        if arity > (self.bytes.len() - self.pos) / 4 {
            return Err(self.fail(self.pos - 4, format!("arity {arity} exceeds the remaining input")));
        }
        (0..arity)
            .map(|_| {
                let at = self.pos;
                let r = self.u32("reference")?;
                if r >= count {
                    return Err(self.fail(at, format!("reference #{r} out of range ({count} nodes)")));
                }
                Ok(r)
            })
            .collect()
    }
}

pub fn decode_graph(bytes: &[u8]) -> Result<ValueGraph> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(r.fail(0, "bad magic"));
    }
    let root = r.u32("root")?;
    let count_at = r.pos;
    let count = r.u32("node count")?;
    if count as usize > (bytes.len() - r.pos) / MIN_NODE_LEN {
        return Err(r.fail(count_at, format!("node count {count} exceeds the remaining input")));
    }
    if root >= count {
        return Err(r.fail(4, format!("root #{root} out of range ({count} nodes)")));
    }
    let mut nodes = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let at = r.pos;
        let node = match r.u8("node kind")? {
            IMM => ValueNode::Imm(i64::from_le_bytes(r.u64("immediate")?)),
            BLOCK => {
                let tag = r.u32("tag")?;
                ValueNode::Block {
                    tag,
                    fields: r.refs(count)?,
                }
            }
            BYTES => {
                let len = r.u32("length")? as usize;
                ValueNode::Bytes(r.take(len, "byte string")?.to_vec())
            }
            FLOAT => ValueNode::Float(f64::from_le_bytes(r.u64("float")?)),
            EXT_CON => {
                let len = r.u16("name length")? as usize;
                let name_at = r.pos;
                let name = std::str::from_utf8(r.take(len, "constructor name")?)
                    .map_err(|_| r.fail(name_at, "constructor name is not UTF-8"))?
                    .to_string();
                ValueNode::ExtCon {
                    name,
                    fields: r.refs(count)?,
                }
            }
            k => return Err(r.fail(at, format!("unknown node kind {k}"))),
        };
        nodes.push(node);
    }
    if r.pos != bytes.len() {
        return Err(r.fail(r.pos, "trailing bytes"));
    }
    ValueGraph::new(nodes, root).map_err(|e| r.fail(0, e.to_string()))
}
