use std::ops::Range;

use super::Formula;

/// One variable occurrence, shared by both message directions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub clause: usize,
    pub var: usize,
    /// Sign of the variable in the clause.
    pub positive: bool,
}

/// Bipartite clause/variable adjacency.
///
/// Edge ids are dense in `0..L`, ordered by clause and then by position in the
/// clause. Per-variable edge lists are ordered by clause index.
#[derive(Clone, Debug)]
pub struct FactorGraph {
    num_vars: usize,
    edges: Vec<Edge>,
    clause_offsets: Vec<usize>,
    var_offsets: Vec<usize>,
    var_edge_ids: Vec<usize>,
}

impl FactorGraph {
    pub fn new(f: &Formula) -> Self {
        let mut edges = Vec::with_capacity(f.num_literals());
        let mut clause_offsets = Vec::with_capacity(f.num_clauses() + 1);
        clause_offsets.push(0);
        let mut degree = vec![0usize; f.num_vars()];
        for (ci, clause) in f.clauses().iter().enumerate() {
            for lit in clause {
                edges.push(Edge { clause: ci, var: lit.var(), positive: lit.is_positive() });
                degree[lit.var()] += 1;
            }
            clause_offsets.push(edges.len());
        }
        let mut var_offsets = Vec::with_capacity(f.num_vars() + 1);
        var_offsets.push(0);
        for d in &degree {
            var_offsets.push(var_offsets.last().unwrap() + d);
        }
        let mut fill = var_offsets[..f.num_vars()].to_vec();
        let mut var_edge_ids = vec![0; edges.len()];
        for (e, edge) in edges.iter().enumerate() {
            var_edge_ids[fill[edge.var]] = e;
            fill[edge.var] += 1;
        }
        FactorGraph { num_vars: f.num_vars(), edges, clause_offsets, var_offsets, var_edge_ids }
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn num_clauses(&self) -> usize {
        self.clause_offsets.len() - 1
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge ids of clause `a`, i.e. V(a).
    #[inline]
    pub fn clause_edges(&self, a: usize) -> Range<usize> {
        self.clause_offsets[a]..self.clause_offsets[a + 1]
    }

    /// Edge ids incident to variable `x`, i.e. C(x).
    #[inline]
    pub fn var_edges(&self, x: usize) -> &[usize] {
        &self.var_edge_ids[self.var_offsets[x]..self.var_offsets[x + 1]]
    }

    pub fn var_degree(&self, x: usize) -> usize {
        self.var_offsets[x + 1] - self.var_offsets[x]
    }

    /// C(x) as `(clause, positive)` pairs.
    pub fn clauses_of(&self, x: usize) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.var_edges(x).iter().map(|&e| (self.edges[e].clause, self.edges[e].positive))
    }

    /// C_a^s(x) for edge (a, x): other clauses where x has the same sign.
    pub fn same_sign_clauses(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let Edge { clause, var, positive } = self.edges[e];
        self.clauses_of(var).filter(move |&(b, s)| b != clause && s == positive).map(|(b, _)| b)
    }

    /// C_a^u(x) for edge (a, x): clauses where x has the opposite sign.
    pub fn opposite_sign_clauses(&self, e: usize) -> impl Iterator<Item = usize> + '_ {
        let Edge { var, positive, .. } = self.edges[e];
        self.clauses_of(var).filter(move |&(_, s)| s != positive).map(|(b, _)| b)
    }

    /// True iff the graph has no cycle.
    pub fn is_forest(&self) -> bool {
        // union-find over variables (0..n) and clauses (n..n+m)
        let mut parent: Vec<usize> = (0..self.num_vars + self.num_clauses()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for e in &self.edges {
            let a = find(&mut parent, e.var);
            let b = find(&mut parent, self.num_vars + e.clause);
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }
}
