//! Euler tour forest over a splay tree keyed by implicit position.
//!
//! Each connected component is one circular tour stored as a sequence:
//! vertex loop nodes and two arc nodes per tree edge. Link and cut are
//! sequence splits and joins; connectivity is a root comparison.

use std::collections::HashMap;

use crate::graph::{EdgeId, VertexId};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    Loop(VertexId),
    Arc(EdgeId),
}

#[derive(Debug, Clone)]
struct Node {
    parent: u32,
    left: u32,
    right: u32,
    // Number of loop nodes in this subtree.
    loops: u32,
    kind: NodeKind,
}

#[derive(Debug, Clone, Default)]
pub struct EulerForest {
    nodes: Vec<Node>,
    free: Vec<u32>,
    loop_node: HashMap<VertexId, u32>,
    arc_nodes: HashMap<EdgeId, (u32, u32)>,
}

impl EulerForest {
    pub fn new() -> Self {
        Self::default()
    }

    fn alloc(&mut self, kind: NodeKind) -> u32 {
        let node = Node {
            parent: NIL,
            left: NIL,
            right: NIL,
            loops: matches!(kind, NodeKind::Loop(_)) as u32,
            kind,
        };
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = node;
            i
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn release(&mut self, x: u32) {
        self.free.push(x);
    }

    fn loops_of(&self, x: u32) -> u32 {
        if x == NIL {
            0
        } else {
            self.nodes[x as usize].loops
        }
    }

    fn update(&mut self, x: u32) {
        let (l, r) = (self.nodes[x as usize].left, self.nodes[x as usize].right);
        let own = matches!(self.nodes[x as usize].kind, NodeKind::Loop(_)) as u32;
        self.nodes[x as usize].loops = self.loops_of(l) + self.loops_of(r) + own;
    }

    fn rotate(&mut self, x: u32) {
        let p = self.nodes[x as usize].parent;
        let g = self.nodes[p as usize].parent;
        let x_is_left = self.nodes[p as usize].left == x;
        let mid = if x_is_left {
            self.nodes[x as usize].right
        } else {
            self.nodes[x as usize].left
        };
        if x_is_left {
            self.nodes[p as usize].left = mid;
            self.nodes[x as usize].right = p;
        } else {
            self.nodes[p as usize].right = mid;
            self.nodes[x as usize].left = p;
        }
        if mid != NIL {
            self.nodes[mid as usize].parent = p;
        }
        self.nodes[p as usize].parent = x;
        self.nodes[x as usize].parent = g;
        if g != NIL {
            if self.nodes[g as usize].left == p {
                self.nodes[g as usize].left = x;
            } else {
                self.nodes[g as usize].right = x;
            }
        }
        self.update(p);
        self.update(x);
    }

    fn splay(&mut self, x: u32) {
        loop {
            let p = self.nodes[x as usize].parent;
            if p == NIL {
                return;
            }
            let g = self.nodes[p as usize].parent;
            if g == NIL {
                self.rotate(x);
                return;
            }
            let zig_zig =
                (self.nodes[p as usize].left == x) == (self.nodes[g as usize].left == p);
            if zig_zig {
                self.rotate(p);
                self.rotate(x);
            } else {
                self.rotate(x);
                self.rotate(x);
            }
        }
    }

    /// Splay `x` and return it as the root of its sequence.
    fn root(&mut self, x: u32) -> u32 {
        self.splay(x);
        x
    }

    fn rightmost(&mut self, mut x: u32) -> u32 {
        while self.nodes[x as usize].right != NIL {
            x = self.nodes[x as usize].right;
        }
        self.splay(x);
        x
    }

    /// Join two sequences; either may be NIL.
    fn join(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        let r = self.rightmost(a);
        self.nodes[r as usize].right = b;
        self.nodes[b as usize].parent = r;
        self.update(r);
        r
    }

    /// Detach the part strictly before `x`; returns it (possibly NIL).
    /// Afterwards `x` is the root and heads its sequence.
    fn split_before(&mut self, x: u32) -> u32 {
        self.splay(x);
        let l = self.nodes[x as usize].left;
        if l != NIL {
            self.nodes[x as usize].left = NIL;
            self.nodes[l as usize].parent = NIL;
            self.update(x);
        }
        l
    }

    /// Detach the part strictly after `x`; returns it (possibly NIL).
    fn split_after(&mut self, x: u32) -> u32 {
        self.splay(x);
        let r = self.nodes[x as usize].right;
        if r != NIL {
            self.nodes[x as usize].right = NIL;
            self.nodes[r as usize].parent = NIL;
            self.update(x);
        }
        r
    }

    fn loop_of(&mut self, v: VertexId) -> u32 {
        if let Some(&x) = self.loop_node.get(&v) {
            return x;
        }
        let x = self.alloc(NodeKind::Loop(v));
        self.loop_node.insert(v, x);
        x
    }

    /// Rotate the tour of `v`'s component so it starts at `v`'s loop node.
    fn reroot(&mut self, v: VertexId) -> u32 {
        let x = self.loop_of(v);
        let before = self.split_before(x);
        self.join(x, before);
        self.root(x)
    }

    pub fn connected(&mut self, u: VertexId, v: VertexId) -> bool {
        if u == v {
            return true;
        }
        let (xu, xv) = match (self.loop_node.get(&u), self.loop_node.get(&v)) {
            (Some(&a), Some(&b)) => (a, b),
            // A vertex with no loop node is isolated at this level.
            _ => return false,
        };
        self.splay(xu);
        self.splay(xv);
        self.nodes[xu as usize].parent != NIL || xu == xv
    }

    /// Link components of `u` and `v` with the tree edge `id`.
    /// The endpoints must be in different components.
    pub fn link(&mut self, id: EdgeId, u: VertexId, v: VertexId) {
        debug_assert!(!self.connected(u, v));
        let a = self.alloc(NodeKind::Arc(id));
        let b = self.alloc(NodeKind::Arc(id));
        self.arc_nodes.insert(id, (a, b));
        let tu = self.reroot(u);
        let tv = self.reroot(v);
        let t = self.join(tu, a);
        let t = self.join(t, tv);
        self.join(t, b);
    }

    /// Remove the tree edge `id`, splitting its component in two.
    pub fn cut(&mut self, id: EdgeId) {
        let (a, b) = self.arc_nodes.remove(&id).expect("cut of unknown arc");
        let (first, second) = self.order(a, b);
        let prefix = self.split_before(first);
        let tail = self.split_after(second);
        // Sequence is now prefix | [first .. second] | tail. The strict
        // interior of [first .. second] is the split-off component's tour.
        self.split_after(first);
        self.split_before(second);
        self.join(prefix, tail);
        self.release(first);
        self.release(second);
    }

    /// Order two nodes of one sequence by position.
    fn order(&mut self, a: u32, b: u32) -> (u32, u32) {
        self.splay(a);
        self.splay(b);
        // b is the root and a is in its subtree; find which side.
        let mut x = a;
        loop {
            let p = self.nodes[x as usize].parent;
            if p == b {
                break;
            }
            x = p;
        }
        if self.nodes[b as usize].left == x {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Number of vertices in `v`'s component at this level.
    pub fn component_size(&mut self, v: VertexId) -> usize {
        match self.loop_node.get(&v) {
            None => 1,
            Some(&x) => {
                self.splay(x);
                self.nodes[x as usize].loops as usize
            }
        }
    }

    /// Vertices and tree-edge ids of `v`'s component.
    pub fn component(&mut self, v: VertexId) -> (Vec<VertexId>, Vec<EdgeId>) {
        let mut verts = Vec::new();
        let mut arcs = Vec::new();
        match self.loop_node.get(&v) {
            None => verts.push(v),
            Some(&x) => {
                self.splay(x);
                let mut stack = vec![x];
                while let Some(y) = stack.pop() {
                    let node = &self.nodes[y as usize];
                    match node.kind {
                        NodeKind::Loop(w) => verts.push(w),
                        NodeKind::Arc(id) => arcs.push(id),
                    }
                    if node.left != NIL {
                        stack.push(node.left);
                    }
                    if node.right != NIL {
                        stack.push(node.right);
                    }
                }
                arcs.sort_unstable();
                arcs.dedup();
            }
        }
        (verts, arcs)
    }

    pub fn has_edge(&self, id: EdgeId) -> bool {
        self.arc_nodes.contains_key(&id)
    }

    pub fn edge_count(&self) -> usize {
        self.arc_nodes.len()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.arc_nodes.keys().copied()
    }
}
