use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{flow_cost, FlowNetwork, FlowResult};
use crate::error::McfError;

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (dist, node)
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Residual arcs: `2k` is arc `k` forward, `2k + 1` its reverse.
struct Residual {
    head: Vec<usize>,
    cost: Vec<f64>,
    cap: Vec<u64>,
    /// CSR adjacency of residual arc ids per node.
    start: Vec<usize>,
    adj: Vec<usize>,
}

impl Residual {
    fn new(net: &FlowNetwork) -> Self {
        let m = net.arcs.len();
        let mut head = vec![0; 2 * m];
        let mut cost = vec![0.0; 2 * m];
        let mut cap = vec![0; 2 * m];
        let mut degree = vec![0usize; net.node_count + 1];
        for (k, a) in net.arcs.iter().enumerate() {
            head[2 * k] = a.to;
            head[2 * k + 1] = a.from;
            cost[2 * k] = a.cost;
            cost[2 * k + 1] = -a.cost;
            cap[2 * k] = a.capacity.effective(net.required_flow);
            degree[a.from] += 1;
            degree[a.to] += 1;
        }
        let mut start = vec![0; net.node_count + 1];
        for v in 0..net.node_count {
            start[v + 1] = start[v] + degree[v];
        }
        let mut fill = start.clone();
        let mut adj = vec![0; 2 * m];
        for (k, a) in net.arcs.iter().enumerate() {
            adj[fill[a.from]] = 2 * k;
            fill[a.from] += 1;
            adj[fill[a.to]] = 2 * k + 1;
            fill[a.to] += 1;
        }
        Self {
            head,
            cost,
            cap,
            start,
            adj,
        }
    }

    fn out(&self, v: usize) -> &[usize] {
        &self.adj[self.start[v]..self.start[v + 1]]
    }
}

/// DAG shortest distances from the source over arcs with positive capacity.
/// Unreachable nodes get potential 0; they never carry flow.
fn initial_potentials(net: &FlowNetwork, order: &[usize], res: &Residual) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; net.node_count];
    dist[net.source] = 0.0;
    for &v in order {
        if dist[v].is_infinite() {
            continue;
        }
        for &r in res.out(v) {
            if r % 2 == 0 && res.cap[r] > 0 {
                let w = res.head[r];
                let nd = dist[v] + res.cost[r];
                if nd < dist[w] {
                    dist[w] = nd;
                }
            }
        }
    }
    dist.iter()
        .map(|&d| if d.is_finite() { d } else { 0.0 })
        .collect()
}

pub(super) fn solve(net: &FlowNetwork, order: &[usize]) -> Result<FlowResult, McfError> {
    let n = net.node_count;
    let mut res = Residual::new(net);
    let mut potential = initial_potentials(net, order, &res);
    let mut remaining = net.required_flow;

    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();

    while remaining > 0 {
        dist.fill(f64::INFINITY);
        pred.fill(usize::MAX);
        done.fill(false);
        dist[net.source] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            node: net.source,
        });
        while let Some(HeapEntry { dist: d, node: v }) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &r in res.out(v) {
                if res.cap[r] == 0 {
                    continue;
                }
                let w = res.head[r];
                if done[w] {
                    continue;
                }
                // clamp round-off in reduced costs
                let reduced = (res.cost[r] + potential[v] - potential[w]).max(0.0);
                let nd = d + reduced;
                if nd < dist[w] {
                    dist[w] = nd;
                    pred[w] = r;
                    heap.push(HeapEntry { dist: nd, node: w });
                }
            }
        }

        let to_sink = dist[net.sink];
        if to_sink.is_infinite() {
            return Err(McfError::Infeasible {
                required: net.required_flow,
                achieved: net.required_flow - remaining,
            });
        }
        for v in 0..n {
            potential[v] += dist[v].min(to_sink);
        }

        let mut push = remaining;
        let mut v = net.sink;
        while v != net.source {
            let r = pred[v];
            push = push.min(res.cap[r]);
            v = res.head[r ^ 1];
        }
        let mut v = net.sink;
        while v != net.source {
            let r = pred[v];
            res.cap[r] -= push;
            res.cap[r ^ 1] += push;
            v = res.head[r ^ 1];
        }
        remaining -= push;
    }

    // flow on arc k is the capacity accumulated on its reverse
    let flow: Vec<u64> = (0..net.arcs.len()).map(|k| res.cap[2 * k + 1]).collect();
    let total_cost = flow_cost(net, &flow);
    Ok(FlowResult { flow, total_cost })
}
