//! Compatibility checks that gather every expected pattern of a node
//! before visiting it. `check_compat_topo` handles acyclic graphs;
//! `check_compat_scc` runs the fixed-point iteration inside each strongly
//! connected component and the topological strategy between components.

use std::collections::{HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::convert::{ensure_node, expand, ConvertState, Step};
use super::graph::ValueGraph;
use crate::error::{Error, Result};
use crate::typerep::{anti_unify, TypePattern, TypeRep};

/// Abstract representations nested deeper than this are rejected.
const MAX_REPR_DEPTH: usize = 64;

/// Edges of `n` with the pattern each must satisfy, peeling abstract layers.
fn shallow(
    p: &TypePattern,
    g: &ValueGraph,
    n: u32,
    path: &str,
    st: &mut ConvertState,
) -> Result<Vec<(u32, TypePattern)>> {
    let node = g.node(n);
    let mut p = p.clone();
    for _ in 0..MAX_REPR_DEPTH {
        match expand(&p, node, path, &mut st.ext_ids)? {
            Step::Leaf => return Ok(vec![]),
            Step::Fields(ps) => return Ok(node.refs().iter().copied().zip(ps).collect()),
            Step::Repr(_, rp) => p = rp,
        }
    }
    Err(Error::DepthExceeded(MAX_REPR_DEPTH))
}

fn reachable(g: &ValueGraph, n: u32) -> Vec<u32> {
    let mut seen = HashSet::new();
    let mut out = vec![];
    let mut stack = vec![n];
    while let Some(i) = stack.pop() {
        if seen.insert(i) {
            out.push(i);
            stack.extend(g.node(i).refs().iter().rev());
        }
    }
    out
}

/// Reachable nodes with every node before its successors. Fails with
/// `CyclicValue` on a node that lies on a cycle.
pub fn topological_order(g: &ValueGraph, n: u32) -> Result<Vec<u32>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<u32, Mark> = HashMap::new();
    let mut post = vec![];
    let mut stack = vec![(n, 0usize)];
    marks.insert(n, Mark::Open);
    while let Some(&mut (i, ref mut next)) = stack.last_mut() {
        let refs = g.node(i).refs();
        if *next < refs.len() {
            let c = refs[*next];
            *next += 1;
            match marks.get(&c) {
                None => {
                    marks.insert(c, Mark::Open);
                    stack.push((c, 0));
                }
                Some(Mark::Open) => return Err(Error::CyclicValue(c)),
                Some(Mark::Done) => {}
            }
        } else {
            marks.insert(i, Mark::Done);
            post.push(i);
            stack.pop();
        }
    }
    post.reverse();
    Ok(post)
}

struct Expected {
    pats: HashMap<u32, TypePattern>,
    paths: HashMap<u32, String>,
}

impl Expected {
    fn new(n: u32, p: &TypePattern) -> Self {
        Expected {
            pats: HashMap::from([(n, p.clone())]),
            paths: HashMap::from([(n, "$".to_string())]),
        }
    }

    fn add(&mut self, c: u32, p: TypePattern, path: String) {
        let merged = match self.pats.get(&c) {
            Some(q) => anti_unify(q, &p),
            None => p,
        };
        self.pats.insert(c, merged);
        self.paths.entry(c).or_insert(path);
    }
}

/// Visits each node once, at the anti-unifier of all its expected patterns.
pub fn check_compat_topo(t: &TypeRep, g: &ValueGraph, n: u32, st: &mut ConvertState) -> Result<()> {
    check_compat_topo_pattern(&TypePattern::from(t), g, n, st)
}

pub fn check_compat_topo_pattern(p: &TypePattern, g: &ValueGraph, n: u32, st: &mut ConvertState) -> Result<()> {
    ensure_node(g, n)?;
    let order = topological_order(g, n)?;
    let mut exp = Expected::new(n, p);
    for i in order {
        let Some(pat) = exp.pats.get(&i).cloned() else {
            continue;
        };
        if pat.is_any() {
            continue;
        }
        st.generalize((i, 0), &pat);
        st.count_visit((i, 0));
        let path = exp.paths[&i].clone();
        for (k, (c, cp)) in shallow(&pat, g, i, &path, st)?.into_iter().enumerate() {
            exp.add(c, cp, format!("{path}.{k}"));
        }
    }
    Ok(())
}

/// Handles cyclic graphs: components are processed in topological order and
/// each one is iterated until the patterns of its nodes stop generalizing.
pub fn check_compat_scc(t: &TypeRep, g: &ValueGraph, n: u32, st: &mut ConvertState) -> Result<()> {
    check_compat_scc_pattern(&TypePattern::from(t), g, n, st)
}

pub fn check_compat_scc_pattern(p: &TypePattern, g: &ValueGraph, n: u32, st: &mut ConvertState) -> Result<()> {
    ensure_node(g, n)?;
    let nodes = reachable(g, n);
    let mut pg: DiGraph<u32, ()> = DiGraph::new();
    let index: HashMap<u32, NodeIndex> = nodes.iter().map(|&i| (i, pg.add_node(i))).collect();
    for &i in &nodes {
        for r in g.node(i).refs() {
            pg.add_edge(index[&i], index[r], ());
        }
    }
    let mut exp = Expected::new(n, p);
    // tarjan_scc yields components sinks first.
    for comp in tarjan_scc(&pg).into_iter().rev() {
        let members: HashSet<u32> = comp.iter().map(|&ix| pg[ix]).collect();
        let mut work: Vec<u32> = comp.iter().map(|&ix| pg[ix]).filter(|i| exp.pats.contains_key(i)).collect();
        work.sort_unstable();
        while let Some(i) = work.pop() {
            let pat = exp.pats[&i].clone();
            if pat.is_any() {
                continue;
            }
            // Already checked at something at least as general.
            if st.generalize((i, 0), &pat).is_none() {
                continue;
            }
            st.count_visit((i, 0));
            let path = exp.paths[&i].clone();
            for (k, (c, cp)) in shallow(&pat, g, i, &path, st)?.into_iter().enumerate() {
                let before = exp.pats.get(&c).cloned();
                exp.add(c, cp, format!("{path}.{k}"));
                if members.contains(&c) && before.as_ref() != exp.pats.get(&c) && !work.contains(&c) {
                    work.push(c);
                }
            }
        }
    }
    Ok(())
}
