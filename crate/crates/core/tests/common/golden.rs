//! The checked-in wire fixtures and the graphs they must decode to.

use std::path::PathBuf;

use reflectix::safeser::{ValueGraph, ValueNode};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn block(tag: u32, fields: &[u32]) -> ValueNode {
    ValueNode::Block {
        tag,
        fields: fields.to_vec(),
    }
}

/// Fixture file names with their expected graphs.
pub fn fixtures() -> Vec<(&'static str, ValueGraph)> {
    let g = |nodes| ValueGraph::new(nodes, 0).expect("valid fixture graph");
    vec![
        ("imm0.gvg", g(vec![ValueNode::Imm(0)])),
        (
            "int_list.gvg",
            g(vec![
                block(0, &[1, 2]),
                ValueNode::Imm(1),
                block(0, &[3, 4]),
                ValueNode::Imm(2),
                ValueNode::Imm(0),
            ]),
        ),
        (
            "shared_pair.gvg",
            g(vec![block(0, &[1, 1]), block(0, &[2]), ValueNode::Imm(7)]),
        ),
        (
            "poly_cycle.gvg",
            g(vec![block(1, &[1, 0]), block(0, &[2]), ValueNode::Imm(0)]),
        ),
        (
            "mixed.gvg",
            g(vec![
                block(0, &[1, 2]),
                ValueNode::Float(1.5),
                block(0, &[3, 4]),
                ValueNode::Bytes("héllo".as_bytes().to_vec()),
                ValueNode::ExtCon {
                    name: "Demo.Circle".into(),
                    fields: vec![5],
                },
                ValueNode::Float(2.5),
            ]),
        ),
    ]
}
