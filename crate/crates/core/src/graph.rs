//! Directed graphs on `0..n`: strong components, periods and cyclic classes.

use num_integer::Integer;
use std::collections::VecDeque;

/// Adjacency lists with sorted, deduplicated successors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    adj: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            adj[a].push(b);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        Self { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, l)| l.iter().map(move |&b| (a, b)))
    }

    /// Strong components in reverse topological order (sinks first), each
    /// sorted; computed by an iterative Tarjan pass.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut out = Vec::new();
        let mut counter = 0;
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call = vec![(root, 0usize)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut it)) = call.last_mut() {
                if let Some(&w) = self.adj[v].get(*it) {
                    *it += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
        out
    }

    /// Strongly connected and nonempty.
    pub fn is_strongly_connected(&self) -> bool {
        !self.is_empty() && self.sccs().len() == 1
    }

    /// Components with no edge leaving them, sorted by smallest vertex.
    pub fn terminal_sccs(&self) -> Vec<Vec<usize>> {
        let comps = self.sccs();
        let mut id = vec![0; self.len()];
        for (c, comp) in comps.iter().enumerate() {
            for &v in comp {
                id[v] = c;
            }
        }
        let mut out: Vec<Vec<usize>> = comps
            .iter()
            .enumerate()
            .filter(|(c, comp)| comp.iter().all(|&v| self.adj[v].iter().all(|&w| id[w] == *c)))
            .map(|(_, comp)| comp.clone())
            .collect();
        out.sort();
        out
    }

    /// Whether `comp` carries a cycle: more than one vertex or a loop.
    pub fn has_cycle_within(&self, comp: &[usize]) -> bool {
        comp.len() > 1 || self.adj[comp[0]].contains(&comp[0])
    }

    /// Period and cyclic classes of a strongly connected graph. Class `k`
    /// holds the vertices at BFS depth `k` modulo the period from vertex 0;
    /// every edge goes from class `k` to class `k + 1`.
    pub fn cyclic_classes(&self) -> Option<(usize, Vec<Vec<usize>>)> {
        if !self.is_strongly_connected() || !self.has_cycle_within(&(0..self.len()).collect::<Vec<_>>()) {
            return None;
        }
        let n = self.len();
        let mut depth = vec![usize::MAX; n];
        depth[0] = 0;
        let mut q = VecDeque::from([0]);
        while let Some(v) = q.pop_front() {
            for &w in &self.adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    q.push_back(w);
                }
            }
        }
        let mut g = 0usize;
        for (a, b) in self.edges() {
            g = g.gcd(&((depth[a] + 1).abs_diff(depth[b])));
        }
        let mut classes = vec![Vec::new(); g];
        for v in 0..n {
            classes[depth[v] % g].push(v);
        }
        Some((g, classes))
    }

    /// Subgraph induced on `keep` (sorted), renumbered in that order.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        let edges: Vec<(usize, usize)> = keep
            .iter()
            .flat_map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(|&&w| pos[w] != usize::MAX)
                    .map(move |&w| (v, w))
            })
            .map(|(v, w)| (pos[v], pos[w]))
            .collect();
        Self::new(keep.len(), edges)
    }
}
