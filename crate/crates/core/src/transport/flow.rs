//! Max-weight transportation by successive shortest paths.
//!
//! Sources `i` with supplies `a_i`, sinks `j` with demands `b_j`, and an arc
//! `i → j` of unbounded capacity and weight `w_ij` for every allowed pair.
//! Forbidden pairs simply have no arc.

const EPS: f64 = 1e-15;

#[derive(Clone, Debug)]
pub(crate) struct FlowSolution {
    /// `(source, sink, flow)` for arcs carrying flow.
    pub flows: Vec<(usize, usize, f64)>,
    pub shipped: f64,
    /// Dual prices with `u_i + v_j ≥ w_ij` on allowed arcs.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

struct Arc {
    to: usize,
    cap: f64,
    cost: f64,
}

struct Graph {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    fn new(n: usize) -> Self {
        Self {
            arcs: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, from: usize, to: usize, cap: f64, cost: f64) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap, cost });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc {
            to: from,
            cap: 0.0,
            cost: -cost,
        });
    }

    /// Bellman–Ford (queue based) distances from the given starting set;
    /// returns distances and the arc used to reach each node.
    fn shortest(&self, starts: &[usize]) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![None; n];
        let mut queued = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        for &s in starts {
            dist[s] = 0.0;
            queued[s] = true;
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            queued[x] = false;
            for &a in &self.adj[x] {
                let arc = &self.arcs[a];
                if arc.cap <= EPS {
                    continue;
                }
                let nd = dist[x] + arc.cost;
                if nd < dist[arc.to] - 1e-14 * (1.0 + nd.abs()) {
                    dist[arc.to] = nd;
                    via[arc.to] = Some(a);
                    if !queued[arc.to] {
                        queued[arc.to] = true;
                        queue.push_back(arc.to);
                    }
                }
            }
        }
        (dist, via)
    }
}

/// Maximizes `Σ π_ij w_ij` subject to the supplies and demands, shipping as
/// much mass as the allowed arcs permit.
pub(crate) fn max_weight_transport(supply: &[f64], demand: &[f64], weight: &[Vec<Option<f64>>]) -> FlowSolution {
    let (m, n) = (supply.len(), demand.len());
    let src = m + n;
    let sink = src + 1;
    let mut g = Graph::new(m + n + 2);
    for (i, &a) in supply.iter().enumerate() {
        g.add(src, i, a, 0.0);
    }
    for (j, &b) in demand.iter().enumerate() {
        g.add(m + j, sink, b, 0.0);
    }
    let mut pair_arcs = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if let Some(w) = weight[i][j] {
                pair_arcs.push((i, j, g.arcs.len()));
                g.add(i, m + j, f64::INFINITY, -w);
            }
        }
    }

    let total: f64 = supply.iter().sum::<f64>().min(demand.iter().sum());
    let mut shipped = 0.0;
    while shipped < total - 1e-14 {
        let (dist, via) = g.shortest(&[src]);
        if !dist[sink].is_finite() {
            break;
        }
        let mut push = f64::INFINITY;
        let mut node = sink;
        while let Some(a) = via[node] {
            push = push.min(g.arcs[a].cap);
            node = g.arcs[a ^ 1].to;
        }
        if push <= EPS {
            break;
        }
        let mut node = sink;
        while let Some(a) = via[node] {
            g.arcs[a].cap -= push;
            g.arcs[a ^ 1].cap += push;
            node = g.arcs[a ^ 1].to;
        }
        shipped += push;
    }

    let flows = pair_arcs
        .iter()
        .filter_map(|&(i, j, a)| {
            let f = g.arcs[a ^ 1].cap;
            (f > EPS).then_some((i, j, f))
        })
        .collect();

    // Potentials on the residual bipartite graph from a virtual root give
    // u_i = d_i, v_j = −d_j with u_i + v_j ≥ w_ij on every allowed arc.
    let mut residual = Graph::new(m + n + 1);
    let root = m + n;
    for x in 0..m + n {
        residual.add(root, x, 1.0, 0.0);
    }
    for &(i, j, a) in &pair_arcs {
        let w = -g.arcs[a].cost;
        residual.add(i, m + j, 1.0, -w);
        if g.arcs[a ^ 1].cap > EPS {
            residual.add(m + j, i, 1.0, w);
        }
    }
    let (d, _) = residual.shortest(&[root]);
    FlowSolution {
        flows,
        shipped,
        u: d[..m].to_vec(),
        v: d[m..m + n].iter().map(|x| -x).collect(),
    }
}
