//! Syntax-tree genotype over the join symbol `J` and signed terminals.
//!
//! Trees are stored as a flat preorder sequence of nodes. Every internal node
//! is a binary join, so a subtree always occupies a contiguous slice and the
//! left-to-right leaf order is simply the order in which leaves appear in the
//! vector. The three edit primitives used by HVL-Prime (substitute, insert,
//! delete) are implemented as in-place splices on that vector.
//!
//! Positions are addressed in two canonical enumerations:
//!
//! * leaf positions `0..leaf_count()` in left-to-right (inorder) order;
//! * node positions `0..complexity()` in inorder order. In a full binary tree
//!   inorder alternates leaf, join, leaf, ..., so node position `2i` is leaf
//!   `i` and node position `2i + 1` is the join separating leaves `i` and
//!   `i + 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::TreeError;

/// A positive variable `x_i` or its complement `~x_i`. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Terminal {
    index: u32,
    negated: bool,
}

impl Terminal {
    pub fn positive(index: u32) -> Self {
        assert!(index >= 1, "terminal indices are 1-based");
        Self { index, negated: false }
    }

    pub fn negated(index: u32) -> Self {
        assert!(index >= 1, "terminal indices are 1-based");
        Self { index, negated: true }
    }

    pub fn new(index: u32, negated: bool) -> Self {
        if negated {
            Self::negated(index)
        } else {
            Self::positive(index)
        }
    }

    /// Decodes `code` in `0..2n` as an element of `{x_1, ~x_1, ..., x_n, ~x_n}`.
    pub fn from_code(code: u32) -> Self {
        Self::new(code / 2 + 1, code % 2 == 1)
    }

    pub fn index(self) -> u32 {
        self.index
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn is_positive(self) -> bool {
        !self.negated
    }

    pub fn complement(self) -> Self {
        Self { index: self.index, negated: !self.negated }
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~x{}", self.index)
        } else {
            write!(f, "x{}", self.index)
        }
    }
}

impl FromStr for Terminal {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (negated, rest) = match s.strip_prefix('~') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let digits = rest
            .strip_prefix('x')
            .ok_or_else(|| TreeError::Parse(format!("bad terminal `{s}`")))?;
        let index: u32 = digits
            .parse()
            .map_err(|_| TreeError::Parse(format!("bad terminal index in `{s}`")))?;
        if index == 0 {
            return Err(TreeError::Parse(format!("terminal index must be >= 1 in `{s}`")));
        }
        Ok(Terminal::new(index, negated))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Join,
    Leaf(Terminal),
}

/// Which side of the new join the inserted terminal goes to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChildOrder {
    NewLeft,
    NewRight,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SyntaxTree {
    nodes: Vec<Node>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub leaf_count: usize,
    pub expressed_count: usize,
    pub complexity: usize,
}

impl SyntaxTree {
    pub fn empty() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn leaf(t: Terminal) -> Self {
        Self { nodes: vec![Node::Leaf(t)] }
    }

    pub fn join(left: SyntaxTree, right: SyntaxTree) -> Result<Self, TreeError> {
        if left.is_empty() || right.is_empty() {
            return Err(TreeError::EmptyOperand);
        }
        let mut nodes = Vec::with_capacity(1 + left.nodes.len() + right.nodes.len());
        nodes.push(Node::Join);
        nodes.extend(left.nodes);
        nodes.extend(right.nodes);
        Ok(Self { nodes })
    }

    /// Builds a tree from raw preorder nodes, rejecting malformed input.
    pub fn from_preorder(nodes: Vec<Node>) -> Result<Self, TreeError> {
        let tree = Self { nodes };
        if tree.is_well_formed() {
            Ok(tree)
        } else {
            Err(TreeError::Malformed)
        }
    }

    pub fn preorder(&self) -> &[Node] {
        &self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total number of nodes, internal and leaves.
    pub fn complexity(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        // 2L - 1 nodes for L >= 1 leaves.
        (self.nodes.len() + 1) / 2
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> impl Iterator<Item = Terminal> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf(t) => Some(*t),
            Node::Join => None,
        })
    }

    pub fn inorder_leaves(&self) -> Vec<Terminal> {
        self.leaves().collect()
    }

    /// Checks the arity-2 invariant: the preorder sequence encodes exactly one
    /// complete binary tree (or nothing).
    pub fn is_well_formed(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut open: usize = 1;
        for (i, node) in self.nodes.iter().enumerate() {
            if open == 0 {
                return false;
            }
            match node {
                Node::Join => open += 1,
                Node::Leaf(_) => {
                    open -= 1;
                    if open == 0 && i + 1 != self.nodes.len() {
                        return false;
                    }
                }
            }
        }
        open == 0
    }

    pub fn max_index(&self) -> u32 {
        self.leaves().map(Terminal::index).max().unwrap_or(0)
    }

    fn leaf_preorder_index(&self, leaf_position: usize) -> Result<usize, TreeError> {
        let count = self.leaf_count();
        if self.is_empty() {
            return Err(TreeError::EmptyTree);
        }
        if leaf_position >= count {
            return Err(TreeError::LeafOutOfRange { position: leaf_position, leaf_count: count });
        }
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n, Node::Leaf(_)))
            .nth(leaf_position)
            .map(|(i, _)| i)
            .ok_or(TreeError::Malformed)
    }

    /// Maps an inorder node position to the node's preorder index.
    fn node_preorder_index(&self, node_position: usize) -> Result<usize, TreeError> {
        let count = self.complexity();
        if node_position >= count {
            return Err(TreeError::NodeOutOfRange { position: node_position, node_count: count });
        }
        if node_position % 2 == 0 {
            return self.leaf_preorder_index(node_position / 2);
        }
        // Joins waiting for their left subtree to finish; when it does, the
        // join receives the next inorder number.
        let mut pending: Vec<(usize, bool)> = Vec::new();
        let mut inorder = 0usize;
        for (p, node) in self.nodes.iter().enumerate() {
            match node {
                Node::Join => pending.push((p, false)),
                Node::Leaf(_) => {
                    inorder += 1;
                    while let Some(top) = pending.last_mut() {
                        if top.1 {
                            pending.pop();
                        } else {
                            top.1 = true;
                            if inorder == node_position {
                                return Ok(top.0);
                            }
                            inorder += 1;
                            break;
                        }
                    }
                }
            }
        }
        Err(TreeError::Malformed)
    }

    /// One past the last preorder index of the subtree rooted at `start`.
    fn subtree_end(&self, start: usize) -> usize {
        let mut open = 1usize;
        let mut q = start;
        while open > 0 {
            match self.nodes[q] {
                Node::Join => open += 1,
                Node::Leaf(_) => open -= 1,
            }
            q += 1;
        }
        q
    }

    fn parent_of(&self, target: usize) -> Option<usize> {
        let mut stack: Vec<(usize, u8)> = Vec::new();
        for (p, node) in self.nodes.iter().enumerate().take(target + 1) {
            let parent = stack.last().map(|s| s.0);
            if p == target {
                return parent;
            }
            if let Some(top) = stack.last_mut() {
                top.1 -= 1;
                if top.1 == 0 {
                    stack.pop();
                }
            }
            if matches!(node, Node::Join) {
                stack.push((p, 2));
            }
        }
        None
    }

    pub fn leaf_at(&self, leaf_position: usize) -> Result<Terminal, TreeError> {
        let q = self.leaf_preorder_index(leaf_position)?;
        match self.nodes[q] {
            Node::Leaf(t) => Ok(t),
            Node::Join => Err(TreeError::Malformed),
        }
    }

    /// Replaces the terminal of the leaf at `leaf_position`. Shape is unchanged.
    pub fn substitute_leaf(&mut self, leaf_position: usize, terminal: Terminal) -> Result<(), TreeError> {
        let q = self.leaf_preorder_index(leaf_position)?;
        self.nodes[q] = Node::Leaf(terminal);
        Ok(())
    }

    /// Replaces the node at inorder `node_position` by a join whose children
    /// are the new leaf and the old node. On the empty tree the position is
    /// ignored and the result is a single leaf.
    pub fn insert_at(
        &mut self,
        node_position: usize,
        terminal: Terminal,
        order: ChildOrder,
    ) -> Result<(), TreeError> {
        if self.is_empty() {
            self.nodes.push(Node::Leaf(terminal));
            return Ok(());
        }
        let p = self.node_preorder_index(node_position)?;
        match order {
            ChildOrder::NewLeft => {
                self.nodes.splice(p..p, [Node::Join, Node::Leaf(terminal)]);
            }
            ChildOrder::NewRight => {
                let end = self.subtree_end(p);
                self.nodes.insert(end, Node::Leaf(terminal));
                self.nodes.insert(p, Node::Join);
            }
        }
        Ok(())
    }

    /// Removes the leaf at `leaf_position` together with its parent join; the
    /// sibling takes the parent's place. Deleting the only leaf empties the tree.
    pub fn delete_leaf(&mut self, leaf_position: usize) -> Result<(), TreeError> {
        let q = self.leaf_preorder_index(leaf_position)?;
        if self.nodes.len() == 1 {
            self.nodes.clear();
            return Ok(());
        }
        let p = self.parent_of(q).ok_or(TreeError::Malformed)?;
        if q == p + 1 {
            self.nodes.drain(p..=q);
        } else {
            self.nodes.remove(q);
            self.nodes.remove(p);
        }
        Ok(())
    }

    /// Builds a left-leaning comb whose leaves are `leaves` in order.
    pub fn from_leaves(leaves: &[Terminal]) -> Self {
        let mut nodes = Vec::with_capacity(leaves.len() * 2);
        if let Some((first, rest)) = leaves.split_first() {
            nodes.extend(std::iter::repeat(Node::Join).take(rest.len()));
            nodes.push(Node::Leaf(*first));
            nodes.extend(rest.iter().map(|t| Node::Leaf(*t)));
        }
        Self { nodes }
    }
}

impl fmt::Display for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nodes.is_empty() {
            return f.write_str("()");
        }
        // Each open join tracks how many children it has printed.
        let mut stack: Vec<u8> = Vec::new();
        for node in &self.nodes {
            if let Some(top) = stack.last_mut() {
                *top += 1;
                f.write_str(" ")?;
            }
            match node {
                Node::Join => {
                    f.write_str("(J")?;
                    stack.push(0);
                }
                Node::Leaf(t) => {
                    write!(f, "{t}")?;
                    while stack.last() == Some(&2) {
                        stack.pop();
                        f.write_str(")")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for SyntaxTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let spaced = s.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        if tokens == ["(", ")"] {
            return Ok(SyntaxTree::empty());
        }
        let mut nodes = Vec::new();
        let mut pos = 0;
        parse_node(&tokens, &mut pos, &mut nodes)?;
        if pos != tokens.len() {
            return Err(TreeError::Parse(format!("trailing input after tree in `{s}`")));
        }
        SyntaxTree::from_preorder(nodes)
    }
}

fn parse_node(tokens: &[&str], pos: &mut usize, out: &mut Vec<Node>) -> Result<(), TreeError> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| TreeError::Parse("unexpected end of input".into()))?;
    *pos += 1;
    if *tok == "(" {
        match tokens.get(*pos) {
            Some(&"J") => *pos += 1,
            other => {
                return Err(TreeError::Parse(format!("expected `J` after `(`, found {other:?}")))
            }
        }
        out.push(Node::Join);
        parse_node(tokens, pos, out)?;
        parse_node(tokens, pos, out)?;
        match tokens.get(*pos) {
            Some(&")") => *pos += 1,
            other => return Err(TreeError::Parse(format!("expected `)`, found {other:?}"))),
        }
        Ok(())
    } else {
        out.push(Node::Leaf(tok.parse()?));
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn x(i: u32) -> Terminal {
        Terminal::positive(i)
    }

    pub(crate) fn nx(i: u32) -> Terminal {
        Terminal::negated(i)
    }

    /// Leaf sequence of the worked n = 6 example tree.
    pub(crate) fn example_leaves() -> Vec<Terminal> {
        vec![x(1), nx(4), x(2), nx(1), nx(3), nx(6), x(4), x(3), nx(5), x(3)]
    }

    pub(crate) fn example_tree() -> SyntaxTree {
        "(J (J (J x1 ~x4) (J x2 ~x1)) (J (J ~x3 (J ~x6 x4)) (J x3 (J ~x5 x3))))"
            .parse()
            .unwrap()
    }

    #[test]
    fn example_tree_leaves_and_complexity() {
        let t = example_tree();
        assert_eq!(t.inorder_leaves(), example_leaves());
        assert_eq!(t.complexity(), 19);
        assert_eq!(t.leaf_count(), 10);
    }

    #[test]
    fn empty_and_single_leaf() {
        let e = SyntaxTree::empty();
        assert!(e.inorder_leaves().is_empty());
        assert_eq!(e.complexity(), 0);
        let l = SyntaxTree::leaf(x(3));
        assert_eq!(l.inorder_leaves(), vec![x(3)]);
        assert_eq!(l.complexity(), 1);
    }

    #[test]
    fn substitute_cases() {
        let mut t = SyntaxTree::leaf(x(1));
        t.substitute_leaf(0, nx(2)).unwrap();
        assert_eq!(t, SyntaxTree::leaf(nx(2)));

        let base = example_tree();
        for pos in 0..base.leaf_count() {
            let mut t = base.clone();
            t.substitute_leaf(pos, x(5)).unwrap();
            assert_eq!(t.complexity(), 19);
            let same = base.leaf_at(pos).unwrap();
            let mut u = base.clone();
            u.substitute_leaf(pos, same).unwrap();
            assert_eq!(u, base);
        }
    }

    #[test]
    fn substitute_errors() {
        let mut e = SyntaxTree::empty();
        assert_eq!(e.substitute_leaf(0, x(1)), Err(TreeError::EmptyTree));
        let mut t = SyntaxTree::leaf(x(1));
        assert!(matches!(t.substitute_leaf(1, x(1)), Err(TreeError::LeafOutOfRange { .. })));
    }

    #[test]
    fn insert_cases() {
        let mut e = SyntaxTree::empty();
        e.insert_at(17, x(1), ChildOrder::NewRight).unwrap();
        assert_eq!(e, SyntaxTree::leaf(x(1)));

        let mut t = SyntaxTree::leaf(x(1));
        t.insert_at(0, x(2), ChildOrder::NewLeft).unwrap();
        assert_eq!(t.inorder_leaves(), vec![x(2), x(1)]);
        assert_eq!(t.complexity(), 3);
        assert_eq!(t.to_string(), "(J x2 x1)");

        let base = example_tree();
        for pos in 0..base.complexity() {
            for order in [ChildOrder::NewLeft, ChildOrder::NewRight] {
                let mut t = base.clone();
                t.insert_at(pos, x(6), order).unwrap();
                assert_eq!(t.complexity(), 21);
                assert!(t.is_well_formed());
            }
        }
        let mut t = base.clone();
        assert!(matches!(
            t.insert_at(19, x(1), ChildOrder::NewLeft),
            Err(TreeError::NodeOutOfRange { .. })
        ));
    }

    #[test]
    fn insert_at_internal_node_wraps_its_leaf_range() {
        // (J (J x1 x2) x3): inorder nodes are x1, J_inner, x2, J_root, x3.
        let base: SyntaxTree = "(J (J x1 x2) x3)".parse().unwrap();
        let mut t = base.clone();
        t.insert_at(1, x(9), ChildOrder::NewRight).unwrap();
        assert_eq!(t.to_string(), "(J (J (J x1 x2) x9) x3)");
        let mut t = base.clone();
        t.insert_at(3, x(9), ChildOrder::NewLeft).unwrap();
        assert_eq!(t.to_string(), "(J x9 (J (J x1 x2) x3))");
        let mut t = base;
        t.insert_at(4, x(9), ChildOrder::NewLeft).unwrap();
        assert_eq!(t.to_string(), "(J (J x1 x2) (J x9 x3))");
    }

    #[test]
    fn delete_cases() {
        let mut t = SyntaxTree::leaf(x(1));
        t.delete_leaf(0).unwrap();
        assert!(t.is_empty());

        let mut t: SyntaxTree = "(J x1 x2)".parse().unwrap();
        t.delete_leaf(1).unwrap();
        assert_eq!(t, SyntaxTree::leaf(x(1)));

        let base = example_tree();
        for pos in 0..base.leaf_count() {
            let mut t = base.clone();
            t.delete_leaf(pos).unwrap();
            assert_eq!(t.complexity(), 17);
            assert!(t.is_well_formed());
            let mut expect = example_leaves();
            expect.remove(pos);
            assert_eq!(t.inorder_leaves(), expect);
        }
        let mut e = SyntaxTree::empty();
        assert_eq!(e.delete_leaf(0), Err(TreeError::EmptyTree));
    }

    #[test]
    fn delete_right_child_keeps_left_sibling_subtree() {
        let mut t: SyntaxTree = "(J (J x1 (J x2 x3)) x4)".parse().unwrap();
        t.delete_leaf(3).unwrap();
        assert_eq!(t.to_string(), "(J x1 (J x2 x3))");
        let mut t: SyntaxTree = "(J x5 x1)".parse().unwrap();
        t.delete_leaf(0).unwrap();
        assert_eq!(t.to_string(), "x1");
    }

    #[test]
    fn display_round_trip() {
        for s in ["()", "x1", "~x4", "(J (J x1 ~x4) x2)", "(J x1 (J ~x2 (J x3 x4)))"] {
            let t: SyntaxTree = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert_eq!(example_tree().to_string().parse::<SyntaxTree>().unwrap(), example_tree());
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["(J x1)", "(K x1 x2)", "x0", "y1", "(J x1 x2) x3", ""] {
            assert!(s.parse::<SyntaxTree>().is_err(), "{s}");
        }
    }

    #[test]
    fn from_leaves_builds_comb() {
        let leaves = example_leaves();
        let t = SyntaxTree::from_leaves(&leaves);
        assert!(t.is_well_formed());
        assert_eq!(t.inorder_leaves(), leaves);
        assert_eq!(t.complexity(), 19);
        assert!(SyntaxTree::from_leaves(&[]).is_empty());
    }

    #[test]
    fn malformed_preorder_rejected() {
        assert!(SyntaxTree::from_preorder(vec![Node::Join, Node::Leaf(x(1))]).is_err());
        assert!(SyntaxTree::from_preorder(vec![Node::Leaf(x(1)), Node::Leaf(x(2))]).is_err());
        assert!(SyntaxTree::from_preorder(vec![Node::Join, Node::Leaf(x(1)), Node::Leaf(x(2))]).is_ok());
    }
}
