use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::color::Color;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub node: u32,
    pub slot: u8,
}

impl Port {
    pub const NONE: Port = Port { node: u32::MAX, slot: 0 };

    pub fn new(node: u32, slot: u8) -> Port {
        Port { node, slot }
    }
    pub fn leg(node: u32) -> Port {
        Port { node, slot: 0 }
    }
    pub fn is_none(self) -> bool {
        self.node == u32::MAX
    }
    fn id(self) -> u32 {
        3 * self.node + self.slot as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Tri,
    Leg(Color),
}

/// Uni-trivalent graph stored as nodes with ports. A trivalent node's ports
/// 0, 1, 2 are its half-edges in cyclic order; a leg uses port 0 only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Diagram {
    nodes: Vec<Node>,
    links: Vec<[Port; 3]>,
}

impl Diagram {
    pub fn new() -> Diagram {
        Diagram::default()
    }

    pub fn add_tri(&mut self) -> u32 {
        self.nodes.push(Node::Tri);
        self.links.push([Port::NONE; 3]);
        (self.nodes.len() - 1) as u32
    }

    pub fn add_leg(&mut self, c: Color) -> u32 {
        self.nodes.push(Node::Leg(c));
        self.links.push([Port::NONE; 3]);
        (self.nodes.len() - 1) as u32
    }

    pub fn connect(&mut self, p: Port, q: Port) {
        self.links[p.node as usize][p.slot as usize] = q;
        self.links[q.node as usize][q.slot as usize] = p;
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn node(&self, v: u32) -> Node {
        self.nodes[v as usize]
    }
    pub fn is_tri(&self, v: u32) -> bool {
        self.nodes[v as usize] == Node::Tri
    }
    pub fn color(&self, v: u32) -> Option<Color> {
        match self.nodes[v as usize] {
            Node::Leg(c) => Some(c),
            Node::Tri => None,
        }
    }
    pub fn set_color(&mut self, v: u32, c: Color) {
        assert!(!self.is_tri(v));
        self.nodes[v as usize] = Node::Leg(c);
    }
    pub fn degree(&self, v: u32) -> usize {
        if self.is_tri(v) {
            3
        } else {
            1
        }
    }
    pub fn other(&self, p: Port) -> Port {
        self.links[p.node as usize][p.slot as usize]
    }
    /// The port a leg is attached to.
    pub fn leg_port(&self, leg: u32) -> Port {
        self.other(Port::leg(leg))
    }
    pub fn ports(&self, v: u32) -> [Port; 3] {
        self.links[v as usize]
    }

    pub fn tri_nodes(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&v| self.is_tri(v))
    }
    pub fn legs(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&v| !self.is_tri(v))
    }
    pub fn i_deg(&self) -> usize {
        self.tri_nodes().count()
    }
    pub fn n_legs(&self) -> usize {
        self.legs().count()
    }
    pub fn n_edges(&self) -> usize {
        (3 * self.i_deg() + self.n_legs()) / 2
    }
    /// Half the number of vertices.
    pub fn deg(&self) -> usize {
        self.len() / 2
    }
    pub fn leg_colors(&self) -> Vec<Color> {
        let mut v: Vec<Color> = self.legs().filter_map(|l| self.color(l)).collect();
        v.sort();
        v
    }

    /// Every edge once, as (smaller port, larger port).
    pub fn edges(&self) -> Vec<(Port, Port)> {
        let mut out = Vec::new();
        for v in 0..self.len() as u32 {
            for s in 0..self.degree(v) as u8 {
                let p = Port::new(v, s);
                let q = self.other(p);
                if p < q {
                    out.push((p, q));
                }
            }
        }
        out
    }

    pub fn internal_edges(&self) -> Vec<(Port, Port)> {
        self.edges()
            .into_iter()
            .filter(|(p, q)| self.is_tri(p.node) && self.is_tri(q.node) && p.node != q.node)
            .collect()
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges().iter().any(|(p, q)| p.node == q.node)
    }

    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        (0..self.degree(v)).map(|s| self.links[v as usize][s].node).collect()
    }

    /// Connected components as sorted node lists, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut stack = vec![s as u32];
            seen[s] = true;
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for u in self.neighbors(v) {
                    if !seen[u as usize] {
                        seen[u as usize] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// First Betti number by the Euler formula.
    pub fn b1(&self) -> usize {
        self.n_edges() + self.components().len() - self.len()
    }

    /// First Betti number as the number of non-tree edges of a spanning forest.
    pub fn b1_spanning(&self) -> usize {
        let mut uf: Vec<usize> = (0..self.len()).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let n = uf[y];
                uf[y] = r;
                y = n;
            }
            r
        }
        let mut extra = 0;
        for (p, q) in self.edges() {
            let a = find(&mut uf, p.node as usize);
            let b = find(&mut uf, q.node as usize);
            if a == b {
                extra += 1;
            } else {
                uf[a] = b;
            }
        }
        extra
    }

    /// Reverses the cyclic order at a trivalent vertex.
    pub fn reverse(&mut self, v: u32) {
        assert!(self.is_tri(v));
        let p1 = self.links[v as usize][1];
        let p2 = self.links[v as usize][2];
        if p1.node == v || p2.node == v {
            // self-loop: swap the slots consistently
            let mut ports = self.links[v as usize];
            ports.swap(1, 2);
            for p in ports.iter_mut() {
                if p.node == v && p.slot != 0 {
                    p.slot = 3 - p.slot;
                }
            }
            self.links[v as usize] = ports;
            return;
        }
        self.connect(Port::new(v, 1), p2);
        self.connect(Port::new(v, 2), p1);
    }

    /// Rotates the cyclic order at `v` so that `slot` becomes slot 0.
    pub fn rotate_to(&mut self, v: u32, slot: u8) {
        for _ in 0..slot {
            let ps = self.links[v as usize];
            let new = [ps[1], ps[2], ps[0]];
            let mut fixed = new;
            for p in fixed.iter_mut() {
                if p.node == v {
                    p.slot = (p.slot + 2) % 3;
                }
            }
            self.links[v as usize] = fixed;
            for (s, p) in fixed.iter().enumerate() {
                if p.node != v && !p.is_none() {
                    self.links[p.node as usize][p.slot as usize] = Port::new(v, s as u8);
                }
            }
        }
    }

    /// Keeps the nodes marked in `keep`; every kept port must point to a kept node.
    pub fn restrict(&self, keep: &[bool]) -> Diagram {
        let mut map = vec![u32::MAX; self.len()];
        let mut out = Diagram::new();
        for v in 0..self.len() {
            if keep[v] {
                map[v] = out.nodes.len() as u32;
                out.nodes.push(self.nodes[v]);
                out.links.push([Port::NONE; 3]);
            }
        }
        for v in 0..self.len() {
            if !keep[v] {
                continue;
            }
            for s in 0..self.degree(v as u32) {
                let p = self.links[v][s];
                assert!(keep[p.node as usize], "restrict cuts an edge");
                out.links[map[v] as usize][s] = Port::new(map[p.node as usize], p.slot);
            }
        }
        out
    }

    pub fn subdiagram(&self, nodes: &[u32]) -> Diagram {
        let mut keep = vec![false; self.len()];
        for &v in nodes {
            keep[v as usize] = true;
        }
        self.restrict(&keep)
    }

    /// Appends a copy of `other`; returns the node offset.
    pub fn append(&mut self, other: &Diagram) -> u32 {
        let off = self.nodes.len() as u32;
        self.nodes.extend_from_slice(&other.nodes);
        for l in &other.links {
            let mut l = *l;
            for p in l.iter_mut() {
                if !p.is_none() {
                    p.node += off;
                }
            }
            self.links.push(l);
        }
        off
    }

    pub fn disjoint_union(&self, other: &Diagram) -> Diagram {
        let mut d = self.clone();
        d.append(other);
        d
    }

    pub fn map_colors(&self, f: impl Fn(Color) -> Color) -> Diagram {
        let mut d = self.clone();
        for n in d.nodes.iter_mut() {
            if let Node::Leg(c) = n {
                *c = f(*c);
            }
        }
        d
    }

    /// Inserts a new trivalent vertex on the edge at `p` carrying a new leg of
    /// color `c`. The new vertex reads (p-side, leg, far side) counterclockwise.
    pub fn add_leg_on_edge(&mut self, p: Port, c: Color) -> (u32, u32) {
        let q = self.other(p);
        let w = self.add_tri();
        let l = self.add_leg(c);
        self.connect(Port::new(w, 0), p);
        self.connect(Port::new(w, 1), Port::leg(l));
        self.connect(Port::new(w, 2), q);
        (w, l)
    }

    /// Removes the listed nodes (their ports must be rewired away first or
    /// point only into the removed set).
    pub fn remove_nodes(&self, gone: &[u32]) -> Diagram {
        let mut keep = vec![true; self.len()];
        for &v in gone {
            keep[v as usize] = false;
        }
        self.restrict(&keep)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for v in 0..self.len() as u32 {
            for s in 0..self.degree(v) as u8 {
                let p = Port::new(v, s);
                let q = self.other(p);
                if q.is_none() || q.node as usize >= self.len() || q.slot as usize >= self.degree(q.node) {
                    return Err(Error::Malformed(format!("dangling half-edge at node {v}")));
                }
                if q == p || self.other(q) != p {
                    return Err(Error::Malformed(format!("inconsistent pairing at node {v}")));
                }
            }
        }
        Ok(())
    }

    // ---- standard shapes -------------------------------------------------

    pub fn strut(a: Color, b: Color) -> Diagram {
        let mut d = Diagram::new();
        let x = d.add_leg(a);
        let y = d.add_leg(b);
        d.connect(Port::leg(x), Port::leg(y));
        d
    }

    /// One-loop diagram with legs in clockwise order around the circle; each
    /// vertex reads (leg, previous, next) counterclockwise.
    pub fn one_loop(colors: &[Color]) -> Diagram {
        let n = colors.len();
        assert!(n >= 1);
        let mut d = Diagram::new();
        let vs: Vec<u32> = (0..n).map(|_| d.add_tri()).collect();
        for (i, &c) in colors.iter().enumerate() {
            let l = d.add_leg(c);
            d.connect(Port::new(vs[i], 0), Port::leg(l));
        }
        for i in 0..n {
            let j = (i + 1) % n;
            d.connect(Port::new(vs[i], 2), Port::new(vs[j], 1));
        }
        d
    }

    /// Caterpillar tree: first and last legs at the ends of a horizontal spine,
    /// the others pointing up, left to right.
    pub fn tree(colors: &[Color]) -> Diagram {
        let n = colors.len();
        assert!(n >= 3);
        let mut d = Diagram::new();
        let vs: Vec<u32> = (0..n - 2).map(|_| d.add_tri()).collect();
        let legs: Vec<u32> = colors.iter().map(|&c| d.add_leg(c)).collect();
        // vertex reads (right, up, left)
        for (i, &v) in vs.iter().enumerate() {
            d.connect(Port::new(v, 1), Port::leg(legs[i + 1]));
            if i + 1 < vs.len() {
                d.connect(Port::new(v, 0), Port::new(vs[i + 1], 2));
            }
        }
        d.connect(Port::new(vs[0], 2), Port::leg(legs[0]));
        d.connect(Port::new(*vs.last().unwrap(), 0), Port::leg(legs[n - 1]));
        d
    }

    /// Theta graph with legs on the top arc, middle band and bottom arc, each
    /// listed left to right.
    pub fn theta(top: &[Color], mid: &[Color], bot: &[Color]) -> Diagram {
        let mut d = Diagram::new();
        let x = d.add_tri();
        let y = d.add_tri();
        // x reads (mid, top, bottom); y reads (top, mid, bottom)
        let bands: [(&[Color], Port, Port, bool); 3] = [
            (top, Port::new(x, 1), Port::new(y, 0), true),
            (mid, Port::new(x, 0), Port::new(y, 1), false),
            (bot, Port::new(x, 2), Port::new(y, 2), true),
        ];
        for (k, (cols, start, end, arc)) in bands.into_iter().enumerate() {
            let mut prev = start;
            for &c in cols {
                let v = d.add_tri();
                let l = d.add_leg(c);
                let (leg_slot, back, fwd) = match (arc, k) {
                    // top arc: (leg, toward x, toward y)
                    (true, 0) => (0, 1, 2),
                    // bottom arc: (leg, toward y, toward x)
                    (true, _) => (0, 2, 1),
                    // middle band: (toward y, leg, toward x)
                    (false, _) => (1, 2, 0),
                };
                d.connect(Port::new(v, leg_slot), Port::leg(l));
                d.connect(prev, Port::new(v, back));
                prev = Port::new(v, fwd);
            }
            d.connect(prev, end);
        }
        d
    }

    // ---- JSON ------------------------------------------------------------

    pub fn to_json(&self) -> DiagramJson {
        let mut tri = Vec::new();
        let mut uni = Vec::new();
        for v in 0..self.len() as u32 {
            match self.node(v) {
                Node::Tri => tri.push([0, 1, 2].map(|s| Port::new(v, s).id() as i64)),
                Node::Leg(c) => uni.push((Port::leg(v).id() as i64, c)),
            }
        }
        let edges = self.edges().into_iter().map(|(p, q)| [p.id() as i64, q.id() as i64]).collect();
        DiagramJson { tri, uni, edges }
    }

    pub fn from_json(j: &DiagramJson) -> Result<Diagram, Error> {
        let mut d = Diagram::new();
        let mut where_: HashMap<i64, Port> = HashMap::new();
        let mut claim = |h: i64, p: Port| -> Result<(), Error> {
            if where_.insert(h, p).is_some() {
                return Err(Error::Malformed(format!("half-edge {h} used twice")));
            }
            Ok(())
        };
        for t in &j.tri {
            let v = d.add_tri();
            for (s, &h) in t.iter().enumerate() {
                claim(h, Port::new(v, s as u8))?;
            }
        }
        for (h, c) in &j.uni {
            let v = d.add_leg(*c);
            claim(*h, Port::leg(v))?;
        }
        if where_.len() % 2 == 1 {
            return Err(Error::Malformed("odd half-edge count".into()));
        }
        let mut paired: BTreeMap<i64, i64> = BTreeMap::new();
        for [a, b] in &j.edges {
            for h in [a, b] {
                if !where_.contains_key(h) {
                    return Err(Error::Malformed(format!("unknown half-edge {h}")));
                }
                if paired.insert(*h, 0).is_some() {
                    return Err(Error::Malformed(format!("half-edge {h} paired twice")));
                }
            }
            if a == b {
                return Err(Error::Malformed(format!("half-edge {a} paired with itself")));
            }
            d.connect(where_[a], where_[b]);
        }
        if paired.len() != where_.len() {
            return Err(Error::Malformed("unpaired half-edge".into()));
        }
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub tri: Vec<[i64; 3]>,
    pub uni: Vec<(i64, Color)>,
    pub edges: Vec<[i64; 2]>,
}
