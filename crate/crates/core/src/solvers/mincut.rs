//! Minimum s-t cut with parametric arc costs, via Dinic's max-flow algorithm
//! on capacities represented as exact linear forms.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Encoding, ProblemInstance, SolutionRecord};
use crate::solvers::linear::{self, Coeffs, Scalarization, ScaledRows};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub a: u64,
    pub b: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutGraph {
    pub vertices: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<Arc>,
}

impl CutGraph {
    pub(crate) fn validate(&self, k: usize) -> Result<()> {
        let n = self.vertices;
        if self.source >= n || self.sink >= n {
            return Err(Error::Schema("source or sink out of range".into()));
        }
        if self.source == self.sink {
            return Err(Error::InvalidArgument("source and sink must differ".into()));
        }
        for (r, arc) in self.arcs.iter().enumerate() {
            if arc.tail >= n || arc.head >= n {
                return Err(Error::Schema(format!("arc {r} has an endpoint out of range")));
            }
            if arc.b.len() != k {
                return Err(Error::Schema(format!("arc {r} has {} parametric costs, expected {k}", arc.b.len())));
            }
        }
        Ok(())
    }

    /// Arcs leaving the given source side, which must be sorted, contain the
    /// source and exclude the sink.
    pub fn cut_arcs(&self, source_side: &[usize]) -> Result<Vec<usize>> {
        if source_side.windows(2).any(|w| w[0] >= w[1]) || source_side.last().is_some_and(|v| *v >= self.vertices) {
            return Err(Error::Schema("source side must be sorted, distinct and in range".into()));
        }
        let mut inside = vec![false; self.vertices];
        for v in source_side {
            inside[*v] = true;
        }
        if !inside[self.source] || inside[self.sink] {
            return Err(Error::InvalidArgument("source side must contain the source and not the sink".into()));
        }
        Ok(self
            .arcs
            .iter()
            .enumerate()
            .filter(|(_, r)| inside[r.tail] && !inside[r.head])
            .map(|(i, _)| i)
            .collect())
    }
}

struct Network<'a> {
    sig: &'a Scalarization,
    head: Vec<usize>,
    adj: Vec<Vec<usize>>,
    cap: Vec<Coeffs>,
    flow: Vec<Coeffs>,
}

impl Network<'_> {
    /// Residual capacity of half-edge `e` (forward `2r`, backward `2r + 1`).
    fn residual(&self, e: usize) -> Coeffs {
        let r = e / 2;
        if e.is_multiple_of(2) {
            linear::sub(&self.cap[r], &self.flow[r])
        } else {
            self.flow[r].clone()
        }
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if level[v].is_none() && self.sig.is_positive(&self.residual(e)) {
                    level[v] = Some(level[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        level
    }

    /// Finds one augmenting path in the level graph and returns its
    /// half-edges and bottleneck.
    fn augmenting_path(
        &self,
        u: usize,
        t: usize,
        level: &[Option<usize>],
        next: &mut [usize],
        path: &mut Vec<usize>,
    ) -> Option<Coeffs> {
        if u == t {
            return None;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let v = self.head[e];
            let res = self.residual(e);
            if level[v] == level[u].map(|l| l + 1) && self.sig.is_positive(&res) {
                path.push(e);
                if v == t {
                    return Some(res);
                }
                if let Some(rest) = self.augmenting_path(v, t, level, next, path) {
                    let bottleneck = if self.sig.compare(&res, &rest).is_lt() { res } else { rest };
                    return Some(bottleneck);
                }
                path.pop();
            }
            next[u] += 1;
        }
        None
    }

    fn push(&mut self, path: &[usize], amount: &[i128]) {
        for &e in path {
            let r = e / 2;
            if e % 2 == 0 {
                linear::add_assign(&mut self.flow[r], amount);
            } else {
                linear::sub_assign(&mut self.flow[r], amount);
            }
        }
    }

    fn max_flow(&mut self, s: usize, t: usize) {
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return;
            }
            let mut next = vec![0; self.adj.len()];
            let mut path = Vec::new();
            while let Some(amount) = self.augmenting_path(s, t, &level, &mut next, &mut path) {
                let path_taken = std::mem::take(&mut path);
                self.push(&path_taken, &amount);
            }
        }
    }
}

/// Source side (vertices reachable in the final residual network) of a
/// minimum cut under the weight carried by `sig`.
pub fn min_cut_source_side(graph: &CutGraph, rows: &ScaledRows, sig: &Scalarization) -> Vec<usize> {
    let n = graph.vertices;
    let width = sig.weight().len();
    let mut head = Vec::with_capacity(2 * graph.arcs.len());
    let mut adj = vec![Vec::new(); n];
    for (r, arc) in graph.arcs.iter().enumerate() {
        head.push(arc.head);
        head.push(arc.tail);
        if arc.tail != arc.head {
            adj[arc.tail].push(2 * r);
            adj[arc.head].push(2 * r + 1);
        }
    }
    let mut net = Network {
        sig,
        head,
        adj,
        cap: rows.rows.clone(),
        flow: vec![linear::zeros(width); graph.arcs.len()],
    };
    net.max_flow(graph.source, graph.sink);
    let level = net.levels(graph.source);
    (0..n).filter(|v| level[*v].is_some()).collect()
}

pub fn solve(instance: &ProblemInstance, graph: &CutGraph, sig: &Scalarization) -> SolutionRecord {
    let rows = instance.scaled_rows().expect("cut instances carry cost rows");
    let side = min_cut_source_side(graph, rows, sig);
    let arcs = graph.cut_arcs(&side).expect("residual source side is a valid cut");
    let f = rows.sum_rational(arcs, instance.k() + 1);
    SolutionRecord { encoding: Encoding::Cut { source_side: side }, f }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ParameterVector, Payload, Sense};
    use crate::rational::q;

    fn path_graph() -> ProblemInstance {
        let g = CutGraph {
            vertices: 3,
            source: 0,
            sink: 2,
            arcs: vec![Arc { tail: 0, head: 1, a: 3, b: vec![0] }, Arc { tail: 1, head: 2, a: 1, b: vec![1] }],
        };
        ProblemInstance::new(Sense::Minimize, 1, Payload::Mincut(g), None).unwrap()
    }

    fn solve_at(inst: &ProblemInstance, l: i64) -> (Vec<usize>, crate::rational::Q) {
        let Payload::Mincut(g) = inst.payload() else { unreachable!() };
        let lambda = ParameterVector(vec![q(l)]);
        let sig = Scalarization::from_offsets(&lambda.0, &inst.lambda_min().0);
        let x = solve(inst, g, &sig);
        let v = inst.evaluate(&x, &lambda).unwrap();
        let Encoding::Cut { source_side } = x.encoding else { unreachable!() };
        (source_side, v)
    }

    #[test]
    fn path_cut_examples() {
        let inst = path_graph();
        assert_eq!(inst.lambda_min().0, vec![q(-1)]);
        assert_eq!(solve_at(&inst, 1), (vec![0, 1], q(2)));
        assert_eq!(solve_at(&inst, 3), (vec![0], q(3)));
        assert_eq!(solve_at(&inst, -1).1, q(0));
    }

    #[test]
    fn parallel_and_back_arcs() {
        let g = CutGraph {
            vertices: 4,
            source: 0,
            sink: 3,
            arcs: vec![
                Arc { tail: 0, head: 1, a: 2, b: vec![] },
                Arc { tail: 0, head: 1, a: 2, b: vec![] },
                Arc { tail: 0, head: 2, a: 3, b: vec![] },
                Arc { tail: 1, head: 2, a: 5, b: vec![] },
                Arc { tail: 2, head: 1, a: 1, b: vec![] },
                Arc { tail: 1, head: 3, a: 3, b: vec![] },
                Arc { tail: 2, head: 3, a: 4, b: vec![] },
                Arc { tail: 3, head: 3, a: 9, b: vec![] },
            ],
        };
        let rows = ScaledRows::from_rows(
            &g.arcs.iter().map(|r| vec![q(r.a as i64)]).collect::<Vec<_>>(),
        );
        let sig = Scalarization::new(&[q(1)]);
        let side = min_cut_source_side(&g, &rows, &sig);
        let value: u64 = g.cut_arcs(&side).unwrap().iter().map(|r| g.arcs[*r].a).sum();
        assert_eq!(value, 7);
    }
}
