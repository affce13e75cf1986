use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::diagram::{Diagram, Node, Port};

/// A diagram in canonical labeled form with its standard orientation.
/// Equality, ordering and hashing go through `code`, which is a complete
/// invariant of the unoriented colored graph.
#[derive(Clone)]
pub struct Canon(Arc<CanonInner>);

struct CanonInner {
    code: Vec<u32>,
    diagram: Diagram,
    as_symmetric: bool,
}

impl Canon {
    pub fn diagram(&self) -> &Diagram {
        &self.0.diagram
    }
    pub fn code(&self) -> &[u32] {
        &self.0.code
    }
    /// Some automorphism reverses an odd number of cyclic orders, so 2J = 0.
    pub fn as_symmetric(&self) -> bool {
        self.0.as_symmetric
    }
    pub fn is_connected(&self) -> bool {
        self.0.code.first().copied().unwrap_or(0) <= 1
    }
}

impl PartialEq for Canon {
    fn eq(&self, o: &Canon) -> bool {
        self.0.code == o.0.code
    }
}
impl Eq for Canon {}
impl Hash for Canon {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.code.hash(h)
    }
}
impl PartialOrd for Canon {
    fn partial_cmp(&self, o: &Canon) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Canon {
    fn cmp(&self, o: &Canon) -> Ordering {
        self.0.code.cmp(&o.0.code)
    }
}
impl fmt::Debug for Canon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::parse::serialize_diagram(self.diagram()))
    }
}

fn kind_code(n: Node) -> u32 {
    match n {
        Node::Tri => 0,
        Node::Leg(c) => 1 + c.code(),
    }
}

struct Labeling {
    code: Vec<u32>,
    /// Optimal orderings (node lists), one per optimal leaf of the search.
    leaves: Vec<Vec<u32>>,
}

/// Canonical labeling of a connected diagram, ignoring orientation.
fn label_connected(d: &Diagram) -> Labeling {
    let n = d.len();
    let adj: Vec<Vec<usize>> = (0..n as u32)
        .map(|v| d.neighbors(v).into_iter().map(|u| u as usize).collect())
        .collect();
    let kinds: Vec<u32> = (0..n as u32).map(|v| kind_code(d.node(v))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| kinds[v]);
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for v in order {
        match cells.last_mut() {
            Some(c) if kinds[c[0]] == kinds[v] => c.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut best = Labeling { code: Vec::new(), leaves: Vec::new() };
    search(&adj, &kinds, cells, &mut best);
    best
}

fn refine(adj: &[Vec<usize>], cells: &mut Vec<Vec<usize>>) {
    let n = adj.len();
    let mut cell_of = vec![0usize; n];
    loop {
        for (i, c) in cells.iter().enumerate() {
            for &v in c {
                cell_of[v] = i;
            }
        }
        let mut changed = false;
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
        for c in cells.iter() {
            if c.len() == 1 {
                next.push(c.clone());
                continue;
            }
            let mut sigs: Vec<(Vec<usize>, usize)> = c
                .iter()
                .map(|&v| {
                    let mut s: Vec<usize> = adj[v].iter().map(|&u| cell_of[u]).collect();
                    s.sort_unstable();
                    (s, v)
                })
                .collect();
            sigs.sort();
            let start = next.len();
            for (i, (s, v)) in sigs.iter().enumerate() {
                if i > 0 && *s == sigs[i - 1].0 {
                    next.last_mut().unwrap().push(*v);
                } else {
                    next.push(vec![*v]);
                }
            }
            if next.len() - start > 1 {
                changed = true;
            }
        }
        *cells = next;
        if !changed {
            return;
        }
    }
}

fn search(adj: &[Vec<usize>], kinds: &[u32], mut cells: Vec<Vec<usize>>, best: &mut Labeling) {
    refine(adj, &mut cells);
    let target = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() > 1)
        .min_by_key(|(i, c)| (c.len(), *i))
        .map(|(i, _)| i);
    match target {
        None => {
            let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
            let code = leaf_code(adj, kinds, &order);
            let order: Vec<u32> = order.into_iter().map(|v| v as u32).collect();
            match code.cmp(&best.code) {
                Ordering::Less if !best.leaves.is_empty() => {
                    best.code = code;
                    best.leaves = vec![order];
                }
                _ if best.leaves.is_empty() => {
                    best.code = code;
                    best.leaves = vec![order];
                }
                Ordering::Equal => best.leaves.push(order),
                _ => {}
            }
        }
        Some(t) => {
            for k in 0..cells[t].len() {
                let mut c2 = cells.clone();
                let v = c2[t].remove(k);
                c2.insert(t, vec![v]);
                search(adj, kinds, c2, best);
            }
        }
    }
}

fn leaf_code(adj: &[Vec<usize>], kinds: &[u32], order: &[usize]) -> Vec<u32> {
    let n = order.len();
    let mut pos = vec![0u32; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i as u32;
    }
    let mut code = Vec::with_capacity(1 + 4 * n);
    code.push(n as u32);
    code.extend(order.iter().map(|&v| kinds[v]));
    for &v in order {
        let mut nb: Vec<u32> = adj[v].iter().map(|&u| pos[u]).collect();
        nb.sort_unstable();
        code.extend(nb);
    }
    code
}

/// Sort key of each port of tri node `v` under a node ordering: the position
/// of the far end, ties between parallel edges broken by an edge id shared by
/// both ends.
fn port_keys(d: &Diagram, pos: &[u32], v: u32) -> [(u32, u32); 3] {
    let ps = d.ports(v);
    [0u8, 1, 2].map(|s| {
        let me = Port::new(v, s);
        let q = ps[s as usize];
        let eid = std::cmp::min((me.node, me.slot), (q.node, q.slot));
        (pos[q.node as usize], 3 * eid.0 + eid.1 as u32)
    })
}

fn parity3(k: &[(u32, u32); 3]) -> i8 {
    let mut inv = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if k[i] > k[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn positions(order: &[u32]) -> Vec<u32> {
    let mut pos = vec![0u32; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i as u32;
    }
    pos
}

fn leaf_sign(d: &Diagram, order: &[u32]) -> i8 {
    let pos = positions(order);
    d.tri_nodes().map(|v| parity3(&port_keys(d, &pos, v))).product()
}

fn build_canonical(d: &Diagram, order: &[u32]) -> Diagram {
    let pos = positions(order);
    let mut out = Diagram::new();
    // new port for each old port
    let mut newport = vec![[Port::NONE; 3]; d.len()];
    for &v in order {
        let nv = match d.node(v) {
            Node::Tri => out.add_tri(),
            Node::Leg(c) => out.add_leg(c),
        };
        if d.is_tri(v) {
            let keys = port_keys(d, &pos, v);
            let mut idx = [0u8, 1, 2];
            idx.sort_by_key(|&s| keys[s as usize]);
            for (ns, &s) in idx.iter().enumerate() {
                newport[v as usize][s as usize] = Port::new(nv, ns as u8);
            }
        } else {
            newport[v as usize][0] = Port::leg(nv);
        }
    }
    for (p, q) in d.edges() {
        out.connect(newport[p.node as usize][p.slot as usize], newport[q.node as usize][q.slot as usize]);
    }
    out
}

/// Canonical form of a connected diagram (self-loops allowed) and the sign of
/// `d` relative to the canonical orientation.
fn canon_connected(d: &Diagram) -> (Vec<u32>, Diagram, i8, bool) {
    let lab = label_connected(d);
    let first = &lab.leaves[0];
    let sign = leaf_sign(d, first);
    let sym = lab.leaves[1..].iter().any(|o| leaf_sign(d, o) != sign);
    let cd = build_canonical(d, first);
    (lab.code, cd, if sym { 1 } else { sign }, sym)
}

/// Canonicalizes `d`. Returns `None` when `d` has a self-loop (it is zero).
/// Otherwise `d = sign * canon` modulo AS.
pub fn canonicalize(d: &Diagram) -> Option<(Canon, i8)> {
    if d.has_self_loop() {
        return None;
    }
    Some(canonicalize_any(d))
}

/// Like `canonicalize` but accepts self-loops; the sign is then meaningless.
pub fn canonicalize_any(d: &Diagram) -> (Canon, i8) {
    let comps = d.components();
    if comps.len() == 1 {
        let (code, diagram, sign, as_symmetric) = canon_connected(d);
        let mut full = vec![1];
        full.extend(code);
        return (Canon(Arc::new(CanonInner { code: full, diagram, as_symmetric })), sign);
    }
    let mut parts: Vec<(Vec<u32>, Diagram, i8, bool)> =
        comps.iter().map(|c| canon_connected(&d.subdiagram(c))).collect();
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut code = vec![parts.len() as u32];
    let mut diagram = Diagram::new();
    let mut sign = 1;
    let mut sym = false;
    for (c, cd, s, y) in parts {
        code.extend(c);
        diagram.append(&cd);
        sign *= s;
        sym |= y;
    }
    if sym {
        sign = 1;
    }
    (Canon(Arc::new(CanonInner { code, diagram, as_symmetric: sym })), sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::Color;

    fn c(s: &str) -> Color {
        s.parse().unwrap()
    }

    #[test]
    fn idempotent_and_as_sign() {
        let d = Diagram::theta(&[c("1+"), c("2+")], &[c("1+")], &[c("1-")]);
        let (k, s) = canonicalize(&d).unwrap();
        let (k2, s2) = canonicalize(k.diagram()).unwrap();
        assert_eq!(k, k2);
        assert_eq!(s2, 1);
        for v in d.tri_nodes().collect::<Vec<_>>() {
            let mut r = d.clone();
            r.reverse(v);
            let (kr, sr) = canonicalize(&r).unwrap();
            assert_eq!(kr, k);
            assert_eq!(sr, -s);
        }
    }

    #[test]
    fn one_loop_rotation_and_reflection() {
        let a = Diagram::one_loop(&[c("1+"), c("2+"), c("3+")]);
        let b = Diagram::one_loop(&[c("2+"), c("3+"), c("1+")]);
        let r = Diagram::one_loop(&[c("3+"), c("2+"), c("1+")]);
        let (ka, sa) = canonicalize(&a).unwrap();
        let (kb, sb) = canonicalize(&b).unwrap();
        let (kr, sr) = canonicalize(&r).unwrap();
        assert_eq!(ka, kb);
        assert_eq!(sa, sb);
        // reflecting a 3-vertex wheel reverses three orders
        assert_eq!(ka, kr);
        assert_eq!(sa, -sr);
    }

    #[test]
    fn symmetric_examples() {
        // Y with two equal legs: swapping them reverses one vertex
        let y = Diagram::tree(&[c("1+"), c("1+"), c("2+")]);
        assert!(canonicalize(&y).unwrap().0.as_symmetric());
        let y3 = Diagram::tree(&[c("1+"), c("2+"), c("3+")]);
        assert!(!canonicalize(&y3).unwrap().0.as_symmetric());
        let th = Diagram::theta(&[], &[], &[]);
        assert!(!canonicalize(&th).unwrap().0.as_symmetric());
        let oaa = Diagram::one_loop(&[c("1+"), c("1+")]);
        assert!(!canonicalize(&oaa).unwrap().0.as_symmetric());
        let oaaa = Diagram::one_loop(&[c("1+"), c("1+"), c("1+")]);
        assert!(canonicalize(&oaaa).unwrap().0.as_symmetric());
    }

    #[test]
    fn self_loop_is_zero() {
        assert!(canonicalize(&Diagram::one_loop(&[c("1+")])).is_none());
    }
}
