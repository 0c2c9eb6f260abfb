//! Exact bipartite transportation solver: successive shortest paths with
//! Johnson node potentials. Costs are metric distances (nonnegative), so
//! Dijkstra applies throughout and reduced costs stay nonnegative.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::metric::OrdF64;
use crate::tol;

struct Arc {
    to: usize,
    residual: f64,
    cost: f64,
}

/// Residual network with paired forward/backward arcs (arc `k ^ 1` is the
/// reverse of arc `k`).
struct Network {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Self { arcs: Vec::new(), out: vec![Vec::new(); nodes] }
    }

    fn add(&mut self, from: usize, to: usize, capacity: f64, cost: f64) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, residual: capacity, cost });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, residual: 0.0, cost: -cost });
    }
}

/// Result of a transportation solve between positive supply and demand
/// vectors of equal total mass.
pub struct TransportSolution {
    /// Optimal cost.
    pub value: f64,
    /// Shipments `(supply index, demand index, mass)` with positive mass.
    pub shipments: Vec<(usize, usize, f64)>,
    /// Final node potentials on supply nodes (shortest-path accumulations).
    pub supply_potential: Vec<f64>,
    /// Final node potentials on demand nodes.
    pub demand_potential: Vec<f64>,
}

/// Solves `min sum nu_ij c(i, j)` over couplings `nu >= 0` with the given
/// marginals. `supply` and `demand` must be strictly positive with equal
/// totals (up to `tol::FLOW_FEASIBILITY_REL`); total imbalance beyond that is
/// a caller bug and panics in debug builds.
pub fn solve_transport(
    supply: &[f64],
    demand: &[f64],
    cost: impl Fn(usize, usize) -> f64,
) -> TransportSolution {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return TransportSolution {
            value: 0.0,
            shipments: Vec::new(),
            supply_potential: Vec::new(),
            demand_potential: Vec::new(),
        };
    }
    let total: f64 = supply.iter().sum();
    debug_assert!(
        (total - demand.iter().sum::<f64>()).abs()
            <= tol::FLOW_FEASIBILITY_REL * (1.0 + total.abs()),
        "unbalanced transportation instance"
    );

    // Node layout: source = 0, supplies 1..=m, demands m+1..=m+n, sink last.
    let source = 0usize;
    let sink = m + n + 1;
    let nodes = m + n + 2;
    let mut net = Network::new(nodes);
    for (i, &a) in supply.iter().enumerate() {
        net.add(source, 1 + i, a, 0.0);
    }
    for i in 0..m {
        for j in 0..n {
            net.add(1 + i, 1 + m + j, f64::INFINITY, cost(i, j));
        }
    }
    for (j, &b) in demand.iter().enumerate() {
        net.add(1 + m + j, sink, b, 0.0);
    }

    let snap = tol::FLOW_SNAP_REL * (1.0 + total);
    let mut potential = vec![0.0f64; nodes];
    let mut dist = vec![f64::INFINITY; nodes];
    let mut prev_arc = vec![usize::MAX; nodes];
    let mut value = 0.0f64;

    loop {
        // Dijkstra over reduced costs. Ties resolve by heap order on
        // (distance, node index), which is deterministic.
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        let mut done = vec![false; nodes];
        let mut heap: BinaryHeap<(Reverse<OrdF64>, usize)> = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push((Reverse(OrdF64(0.0)), source));
        while let Some((Reverse(OrdF64(d)), u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &k in &net.out[u] {
                let arc = &net.arcs[k];
                if arc.residual <= snap {
                    continue;
                }
                // Reduced costs are >= 0 up to roundoff; clamp the dust.
                let rc = (arc.cost + potential[u] - potential[arc.to]).max(0.0);
                let nd = d + rc;
                if nd < dist[arc.to] {
                    dist[arc.to] = nd;
                    prev_arc[arc.to] = k;
                    heap.push((Reverse(OrdF64(nd)), arc.to));
                }
            }
        }
        if !dist[sink].is_finite() {
            break; // all demand satisfied (or no usable supply remains)
        }
        for v in 0..nodes {
            if dist[v].is_finite() {
                potential[v] += dist[v];
            } else {
                potential[v] += dist[sink];
            }
        }
        // Bottleneck along the augmenting path, then push.
        let mut delta = f64::INFINITY;
        let mut v = sink;
        while v != source {
            let k = prev_arc[v];
            delta = delta.min(net.arcs[k].residual);
            v = net.arcs[k ^ 1].to;
        }
        let mut v = sink;
        while v != source {
            let k = prev_arc[v];
            value += delta * net.arcs[k].cost;
            net.arcs[k].residual -= delta;
            if net.arcs[k].residual <= snap {
                net.arcs[k].residual = 0.0;
            }
            net.arcs[k ^ 1].residual += delta;
            v = net.arcs[k ^ 1].to;
        }
    }

    // Middle arcs appear after the m supply arcs, in (i, j) row-major order;
    // the backward arc of pair k holds the shipped mass.
    let mut shipments = Vec::new();
    for i in 0..m {
        for j in 0..n {
            let k = 2 * (m + i * n + j) + 1;
            let mass = net.arcs[k].residual;
            if mass > snap {
                shipments.push((i, j, mass));
            }
        }
    }
    TransportSolution {
        value,
        shipments,
        supply_potential: (0..m).map(|i| potential[1 + i]).collect(),
        demand_potential: (0..n).map(|j| potential[1 + m + j]).collect(),
    }
}
