//! Primal network simplex with block-search pivoting over a strongly
//! feasible spanning tree stored as parent/thread lists.
//!
//! The starting tree routes all flow along cheapest uncapacitated paths to
//! the sink when the network allows it. Otherwise an artificial root joins
//! every node, and artificial arcs carry the supplies at the start, priced
//! out by a cost larger than any simple path.

use super::{flow_cost, Capacity, FlowNetwork, FlowResult};
use crate::error::McfError;

const UPPER: i8 = -1;
const TREE: i8 = 0;
const LOWER: i8 = 1;

const UP: i64 = 1;
const DOWN: i64 = -1;

const NONE: usize = usize::MAX;
const INF: i64 = i64::MAX / 4;

/// Potentials are rebuilt from the tree this often to keep round-off from
/// accumulating.
const REFRESH_PIVOTS: usize = 512;

struct Simplex {
    arc_count: usize,
    root: usize,
    source: Vec<usize>,
    target: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<f64>,
    flow: Vec<i64>,
    state: Vec<i8>,

    parent: Vec<usize>,
    pred: Vec<usize>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    pred_dir: Vec<i64>,
    pi: Vec<f64>,
    dirty_revs: Vec<usize>,

    block_size: usize,
    next_arc: usize,
    eps: f64,

    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: i64,
}

impl Simplex {
    fn new(net: &FlowNetwork, order: &[usize]) -> Self {
        let n = net.node_count;
        let m = net.arcs.len();
        let all = m + n;

        let mut source = vec![0; all];
        let mut target = vec![0; all];
        let mut cap = vec![INF; all];
        let mut cost = vec![0.0; all];
        let mut abs_sum = 0.0;
        let mut abs_max: f64 = 0.0;
        for (k, a) in net.arcs.iter().enumerate() {
            source[k] = a.from;
            target[k] = a.to;
            if let Capacity::Finite(c) = a.capacity {
                cap[k] = c.min(net.required_flow) as i64;
            }
            cost[k] = a.cost;
            abs_sum += a.cost.abs();
            abs_max = abs_max.max(a.cost.abs());
        }
        // exceeds the cost of any simple path
        let art_cost = 1.0 + abs_sum.min((abs_max + 1.0) * n as f64);

        let mut s = Self {
            arc_count: m,
            root: n,
            source,
            target,
            cap,
            cost,
            flow: vec![0; all],
            state: vec![LOWER; all],
            parent: vec![NONE; n + 1],
            pred: vec![NONE; n + 1],
            thread: vec![0; n + 1],
            rev_thread: vec![0; n + 1],
            succ_num: vec![1; n + 1],
            last_succ: vec![0; n + 1],
            pred_dir: vec![UP; n + 1],
            pi: vec![0.0; n + 1],
            dirty_revs: Vec::new(),
            block_size: ((m as f64).sqrt().ceil() as usize).max(10),
            next_arc: 0,
            eps: 1e-12 * art_cost,
            in_arc: NONE,
            join: NONE,
            u_in: NONE,
            v_in: NONE,
            u_out: NONE,
            delta: 0,
        };
        if !s.init_crash(net, order) {
            s.init_artificial(net, art_cost);
        }
        s
    }

    /// Star tree around the root; artificial arcs carry the supplies.
    fn init_artificial(&mut self, net: &FlowNetwork, art_cost: f64) {
        let n = net.node_count;
        let m = self.arc_count;
        let root = self.root;
        let h = net.required_flow as i64;
        let mut supply = vec![0i64; n];
        supply[net.source] = h;
        supply[net.sink] = -h;

        self.flow.iter_mut().for_each(|f| *f = 0);
        self.state[..m].iter_mut().for_each(|s| *s = LOWER);
        self.parent[root] = NONE;
        self.pred[root] = NONE;
        self.thread[root] = 0;
        self.rev_thread[0] = root;
        self.succ_num[root] = n + 1;
        self.last_succ[root] = root - 1;
        self.pi[root] = 0.0;
        for u in 0..n {
            let e = m + u;
            self.parent[u] = root;
            self.pred[u] = e;
            self.thread[u] = u + 1;
            self.rev_thread[u + 1] = u;
            self.succ_num[u] = 1;
            self.last_succ[u] = u;
            self.cap[e] = INF;
            self.state[e] = TREE;
            if supply[u] >= 0 {
                self.pred_dir[u] = UP;
                self.pi[u] = 0.0;
                self.source[e] = u;
                self.target[e] = root;
                self.flow[e] = supply[u];
                self.cost[e] = 0.0;
            } else {
                self.pred_dir[u] = DOWN;
                self.pi[u] = art_cost;
                self.source[e] = root;
                self.target[e] = u;
                self.flow[e] = -supply[u];
                self.cost[e] = art_cost;
            }
        }
    }

    /// Feasible starting tree: every node forwards its flow along its
    /// cheapest uncapacitated route to the sink, and the source fills its
    /// arcs in order. Fails when some flow cannot be placed at a bound or
    /// on such a route.
    fn init_crash(&mut self, net: &FlowNetwork, order: &[usize]) -> bool {
        let n = net.node_count;
        let m = self.arc_count;
        let root = self.root;
        let out = net.out_arcs();

        let mut to_sink = vec![f64::INFINITY; n];
        let mut next = vec![NONE; n];
        to_sink[net.sink] = 0.0;
        for &u in order.iter().rev() {
            if u == net.sink {
                continue;
            }
            for &k in &out[u] {
                let w = self.target[k];
                if self.cap[k] >= INF && to_sink[w].is_finite() {
                    let d = self.cost[k] + to_sink[w];
                    if d < to_sink[u] {
                        to_sink[u] = d;
                        next[u] = k;
                    }
                }
            }
        }
        next[net.source] = NONE;
        next[net.sink] = NONE;

        let mut inflow = vec![0i64; n];
        let mut remaining = net.required_flow as i64;
        for &k in &out[net.source] {
            if remaining == 0 {
                break;
            }
            let c = self.cap[k];
            if c == 0 {
                continue;
            }
            let w = self.target[k];
            if c > remaining || w == net.source || (w != net.sink && next[w] == NONE) {
                return false;
            }
            self.flow[k] = c;
            inflow[w] += c;
            remaining -= c;
        }
        if remaining > 0 {
            return false;
        }
        for &u in order {
            if inflow[u] > 0 && u != net.sink {
                let k = next[u];
                if k == NONE {
                    return false;
                }
                self.flow[k] += inflow[u];
                inflow[self.target[k]] += inflow[u];
            }
        }

        for k in 0..m {
            self.state[k] = if self.flow[k] == 0 { LOWER } else { UPPER };
        }
        let mut children = vec![Vec::new(); n + 1];
        for u in 0..n {
            let e = m + u;
            self.source[e] = u;
            self.target[e] = root;
            self.cost[e] = 0.0;
            self.cap[e] = INF;
            self.flow[e] = 0;
            self.pred_dir[u] = UP;
            let k = next[u];
            if k == NONE {
                self.parent[u] = root;
                self.pred[u] = e;
                self.state[e] = TREE;
            } else {
                self.parent[u] = self.target[k];
                self.pred[u] = k;
                self.state[k] = TREE;
                self.state[e] = LOWER;
            }
            children[self.parent[u]].push(u);
        }
        self.parent[root] = NONE;
        self.pred[root] = NONE;

        // preorder thread from the root
        let mut preorder = Vec::with_capacity(n + 1);
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            preorder.push(u);
            stack.extend(children[u].iter().rev());
        }
        for w in 0..=n {
            let u = preorder[w];
            let t = preorder[(w + 1) % (n + 1)];
            self.thread[u] = t;
            self.rev_thread[t] = u;
        }
        for &u in preorder.iter().rev() {
            self.succ_num[u] = 1 + children[u].iter().map(|&c| self.succ_num[c]).sum::<usize>();
            self.last_succ[u] = match children[u].last() {
                Some(&c) => self.last_succ[c],
                None => u,
            };
        }
        self.refresh_potentials();
        true
    }

    fn reduced(&self, e: usize) -> f64 {
        f64::from(self.state[e])
            * (self.cost[e] + self.pi[self.source[e]] - self.pi[self.target[e]])
    }

    /// Most negative reduced cost within the first block that has one.
    fn find_entering_arc(&mut self) -> bool {
        let m = self.arc_count;
        if m == 0 {
            return false;
        }
        let mut best = -self.eps;
        let mut found = NONE;
        let mut count = self.block_size;
        let mut e = self.next_arc;
        for _ in 0..m {
            let c = self.reduced(e);
            if c < best {
                best = c;
                found = e;
            }
            e += 1;
            if e == m {
                e = 0;
            }
            count -= 1;
            if count == 0 {
                if found != NONE {
                    break;
                }
                count = self.block_size;
            }
        }
        if found == NONE {
            return false;
        }
        self.in_arc = found;
        self.next_arc = e;
        true
    }

    fn find_join_node(&mut self) {
        let mut u = self.source[self.in_arc];
        let mut v = self.target[self.in_arc];
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    /// Returns whether a tree arc leaves (otherwise the entering arc only
    /// switches bounds).
    fn find_leaving_arc(&mut self) -> bool {
        let e_in = self.in_arc;
        let (first, second) = if self.state[e_in] == LOWER {
            (self.source[e_in], self.target[e_in])
        } else {
            (self.target[e_in], self.source[e_in])
        };
        self.delta = self.cap[e_in];
        let mut result = 0;

        let mut u = first;
        while u != self.join {
            let e = self.pred[u];
            let mut d = self.flow[e];
            if self.pred_dir[u] == DOWN {
                d = if self.cap[e] >= INF {
                    INF
                } else {
                    self.cap[e] - d
                };
            }
            if d < self.delta {
                self.delta = d;
                self.u_out = u;
                result = 1;
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            let e = self.pred[u];
            let mut d = self.flow[e];
            if self.pred_dir[u] == UP {
                d = if self.cap[e] >= INF {
                    INF
                } else {
                    self.cap[e] - d
                };
            }
            if d <= self.delta {
                self.delta = d;
                self.u_out = u;
                result = 2;
            }
            u = self.parent[u];
        }

        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self, change: bool) {
        let e_in = self.in_arc;
        if self.delta > 0 {
            let val = i64::from(self.state[e_in]) * self.delta;
            self.flow[e_in] += val;
            let mut u = self.source[e_in];
            while u != self.join {
                self.flow[self.pred[u]] -= self.pred_dir[u] * val;
                u = self.parent[u];
            }
            let mut u = self.target[e_in];
            while u != self.join {
                self.flow[self.pred[u]] += self.pred_dir[u] * val;
                u = self.parent[u];
            }
        }
        if change {
            self.state[e_in] = TREE;
            let out = self.pred[self.u_out];
            self.state[out] = if self.flow[out] == 0 { LOWER } else { UPPER };
        } else {
            self.state[e_in] = -self.state[e_in];
        }
    }

    fn update_tree_structure(&mut self) {
        let (u_in, v_in, u_out, join) = (self.u_in, self.v_in, self.u_out, self.join);
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = self.in_arc;
            self.pred_dir[u_in] = if u_in == self.source[self.in_arc] {
                UP
            } else {
                DOWN
            };

            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };

            // re-hang the stem between u_in and u_out
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for i in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[i];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc = tmp_sc + self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = self.in_arc;
            self.pred_dir[u_in] = if u_in == self.source[self.in_arc] {
                UP
            } else {
                DOWN
            };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in {
            join
        } else {
            NONE
        };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    /// Shifts the potentials of the re-hung subtree.
    fn update_potential(&mut self) {
        let sigma = self.pi[self.v_in]
            - self.pi[self.u_in]
            - self.pred_dir[self.u_in] as f64 * self.cost[self.in_arc];
        let end = self.thread[self.last_succ[self.u_in]];
        let mut u = self.u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    /// Recomputes every potential from the root along the thread order.
    fn refresh_potentials(&mut self) {
        self.pi[self.root] = 0.0;
        let mut u = self.thread[self.root];
        while u != self.root {
            let p = self.parent[u];
            let e = self.pred[u];
            self.pi[u] = self.pi[p] + self.pred_dir[u] as f64 * -self.cost[e];
            u = self.thread[u];
        }
    }

    fn run(&mut self) -> Result<(), McfError> {
        let mut pivots = 0usize;
        loop {
            if !self.find_entering_arc() {
                self.refresh_potentials();
                if !self.find_entering_arc() {
                    break;
                }
            }
            self.find_join_node();
            let change = self.find_leaving_arc();
            if self.delta >= INF {
                return Err(McfError::InconsistentFlow(
                    "negative cycle of unbounded capacity".into(),
                ));
            }
            self.change_flow(change);
            if change {
                self.update_tree_structure();
                self.update_potential();
            }
            pivots += 1;
            if pivots % REFRESH_PIVOTS == 0 {
                self.refresh_potentials();
            }
        }
        Ok(())
    }
}

pub(super) fn solve(net: &FlowNetwork, order: &[usize]) -> Result<FlowResult, McfError> {
    let mut s = Simplex::new(net, order);
    s.run()?;
    let m = net.arcs.len();
    let unrouted = s.flow[m + net.sink];
    if s.flow[m..].iter().any(|&f| f > 0) {
        return Err(McfError::Infeasible {
            required: net.required_flow,
            achieved: net.required_flow - unrouted.max(0) as u64,
        });
    }
    let flow: Vec<u64> = s.flow[..m].iter().map(|&f| f as u64).collect();
    let total_cost = flow_cost(net, &flow);
    Ok(FlowResult { flow, total_cost })
}
