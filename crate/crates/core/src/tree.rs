use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{VertexId, Weight};

/// A tree rooted at `root` with arcs directed away from it, stored as a
/// parent map. Each entry also records the weight of the arc into the child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arborescence {
    root: VertexId,
    parent: BTreeMap<VertexId, (VertexId, Weight)>,
}

impl Arborescence {
    pub fn new(root: VertexId) -> Self {
        Arborescence {
            root,
            parent: BTreeMap::new(),
        }
    }

    /// Builds the union of root paths to `targets` by following `parent_of`
    /// upward from each target. `parent_of` must describe a tree toward `root`.
    pub fn from_parent_paths<F>(root: VertexId, targets: &[VertexId], parent_of: F) -> Self
    where
        F: Fn(VertexId) -> Option<(VertexId, Weight)>,
    {
        let mut tree = Arborescence::new(root);
        for &t in targets {
            let mut v = t;
            while v != root && !tree.parent.contains_key(&v) {
                let (p, w) = parent_of(v).expect("target has no path to the root");
                tree.parent.insert(v, (p, w));
                v = p;
            }
        }
        tree
    }

    /// Rebuilds a tree from a raw parent map without any checks. Used by file
    /// parsing and negative tests; run [`Arborescence::structure_defect`] before
    /// trusting the result.
    pub fn from_parent_map(root: VertexId, parent: BTreeMap<VertexId, (VertexId, Weight)>) -> Self {
        Arborescence { root, parent }
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v == self.root || self.parent.contains_key(&v)
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent.get(&v).map(|&(p, _)| p)
    }

    pub fn parent_edge(&self, v: VertexId) -> Option<(VertexId, Weight)> {
        self.parent.get(&v).copied()
    }

    /// Adds the arc `parent -> child`. Returns false (and changes nothing) if
    /// `child` is already in the tree or `parent` is not.
    pub fn attach(&mut self, parent: VertexId, child: VertexId, weight: Weight) -> bool {
        if self.contains(child) || !self.contains(parent) {
            return false;
        }
        self.parent.insert(child, (parent, weight));
        true
    }

    /// Number of vertices, root included.
    pub fn len(&self) -> usize {
        self.parent.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All vertices in ascending id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        let root = self.root;
        let below = self.parent.keys().copied().take_while(move |&v| v < root);
        let above = self.parent.keys().copied().skip_while(move |&v| v < root);
        below.chain(std::iter::once(root)).chain(above)
    }

    /// Arcs as `(parent, child, weight)`, ordered by child.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, Weight)> + '_ {
        self.parent.iter().map(|(&c, &(p, w))| (p, c, w))
    }

    /// Tree vertices that are neither the root nor accepted by `is_terminal`.
    pub fn non_terminals<'a, F>(&'a self, is_terminal: F) -> impl Iterator<Item = VertexId> + 'a
    where
        F: Fn(VertexId) -> bool + 'a,
    {
        self.parent.keys().copied().filter(move |&v| !is_terminal(v))
    }

    pub fn nt_count<F>(&self, is_terminal: F) -> usize
    where
        F: Fn(VertexId) -> bool,
    {
        self.non_terminals(is_terminal).count()
    }

    /// Vertices from root to `v`, inclusive. `None` if `v` is absent or the
    /// parent chain does not reach the root.
    pub fn path_from_root(&self, v: VertexId) -> Option<Vec<VertexId>> {
        if !self.contains(v) {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.root {
            if path.len() > self.len() {
                return None;
            }
            cur = self.parent(cur)?;
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }

    /// Total arc weight on the root path to `v`.
    pub fn path_weight(&self, v: VertexId) -> Option<u64> {
        let path = self.path_from_root(v)?;
        Some(path[1..].iter().map(|c| self.parent[c].1).sum())
    }

    /// Number of arcs on the root path to `v`.
    pub fn depth(&self, v: VertexId) -> Option<usize> {
        self.path_from_root(v).map(|p| p.len() - 1)
    }

    /// Drops every vertex whose subtree contains no vertex accepted by `keep`.
    pub fn prune<F>(&mut self, keep: F)
    where
        F: Fn(VertexId) -> bool,
    {
        let mut needed: BTreeSet<VertexId> = BTreeSet::new();
        for &v in self.parent.keys() {
            if !keep(v) {
                continue;
            }
            let mut cur = v;
            while cur != self.root && needed.insert(cur) {
                match self.parent(cur) {
                    Some(p) => cur = p,
                    None => break,
                }
            }
        }
        self.parent.retain(|v, _| needed.contains(v));
    }

    /// Reports the first structural problem: a parent outside the tree, an arc
    /// into the root, or a parent cycle that never reaches the root.
    pub fn structure_defect(&self) -> Option<StructureDefect> {
        if self.parent.contains_key(&self.root) {
            return Some(StructureDefect::RootHasParent);
        }
        for (&child, &(p, _)) in &self.parent {
            if !self.contains(p) {
                return Some(StructureDefect::DanglingParent { child, parent: p });
            }
        }
        // Every chain must reach the root in fewer than len() steps.
        let mut settled: BTreeSet<VertexId> = BTreeSet::new();
        for &v in self.parent.keys() {
            let mut chain = Vec::new();
            let mut cur = v;
            while cur != self.root && !settled.contains(&cur) {
                if chain.len() > self.parent.len() {
                    return Some(StructureDefect::Cycle(v));
                }
                chain.push(cur);
                cur = self.parent[&cur].0;
            }
            settled.extend(chain);
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureDefect {
    RootHasParent,
    DanglingParent { child: VertexId, parent: VertexId },
    Cycle(VertexId),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Arborescence {
        // 0 -> 1 -> 2, 0 -> 3
        let mut t = Arborescence::new(0);
        assert!(t.attach(0, 1, 2));
        assert!(t.attach(1, 2, 3));
        assert!(t.attach(0, 3, 1));
        t
    }

    #[test]
    fn attach_rejects_duplicates_and_orphans() {
        let mut t = sample();
        assert!(!t.attach(3, 2, 1));
        assert!(!t.attach(9, 8, 1));
        assert!(!t.attach(1, 0, 1));
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn paths_and_weights() {
        let t = sample();
        assert_eq!(t.path_from_root(2), Some(vec![0, 1, 2]));
        assert_eq!(t.path_weight(2), Some(5));
        assert_eq!(t.depth(3), Some(1));
        assert_eq!(t.path_from_root(7), None);
    }

    #[test]
    fn vertices_are_sorted_with_any_root() {
        let mut t = Arborescence::new(5);
        t.attach(5, 2, 1);
        t.attach(5, 9, 1);
        assert_eq!(t.vertices().collect::<Vec<_>>(), vec![2, 5, 9]);
    }

    #[test]
    fn prune_keeps_only_paths_to_kept_vertices() {
        let mut t = sample();
        t.prune(|v| v == 2);
        assert_eq!(t.vertices().collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn nt_count_excludes_root_and_terminals() {
        let t = sample();
        assert_eq!(t.nt_count(|v| v == 2 || v == 3), 1);
        assert_eq!(t.nt_count(|_| false), 3);
    }

    #[test]
    fn structure_defects_are_detected() {
        assert_eq!(sample().structure_defect(), None);

        let mut cyc = BTreeMap::new();
        cyc.insert(1, (2, 1));
        cyc.insert(2, (1, 1));
        assert!(matches!(
            Arborescence::from_parent_map(0, cyc).structure_defect(),
            Some(StructureDefect::Cycle(_))
        ));

        let mut dangling = BTreeMap::new();
        dangling.insert(1, (4, 1));
        assert_eq!(
            Arborescence::from_parent_map(0, dangling).structure_defect(),
            Some(StructureDefect::DanglingParent { child: 1, parent: 4 })
        );

        let mut rooted = BTreeMap::new();
        rooted.insert(0, (1, 1));
        rooted.insert(1, (0, 1));
        assert_eq!(
            Arborescence::from_parent_map(0, rooted).structure_defect(),
            Some(StructureDefect::RootHasParent)
        );
    }
}
