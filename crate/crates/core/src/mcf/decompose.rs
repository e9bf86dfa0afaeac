use super::{check_flow, FlowNetwork, FlowResult};
use crate::error::McfError;

/// Splits an integral flow into `required_flow` unit source-to-sink paths,
/// each given as a list of arc indices.
///
/// Paths are peeled greedily: every step follows the lowest-index outgoing
/// arc that still carries flow, so the output is deterministic and paths
/// come out in lexicographic order of their arc sequences.
pub fn decompose_paths(
    network: &FlowNetwork,
    result: &FlowResult,
) -> Result<Vec<Vec<usize>>, McfError> {
    check_flow(network, result)?;
    let out = network.out_arcs();
    let mut left = result.flow.clone();
    // first out-arc index per node that may still carry flow
    let mut cursor = vec![0usize; network.node_count];
    let mut paths = Vec::with_capacity(network.required_flow as usize);

    for _ in 0..network.required_flow {
        let mut path = Vec::new();
        let mut v = network.source;
        while v != network.sink {
            let arcs = &out[v];
            while cursor[v] < arcs.len() && left[arcs[cursor[v]]] == 0 {
                cursor[v] += 1;
            }
            let Some(&k) = arcs.get(cursor[v]) else {
                return Err(McfError::InconsistentFlow(format!(
                    "flow stops at node {v} before reaching the sink"
                )));
            };
            left[k] -= 1;
            path.push(k);
            v = network.arcs[k].to;
            if path.len() > network.arcs.len() {
                return Err(McfError::InconsistentFlow("flow contains a cycle".into()));
            }
        }
        paths.push(path);
    }
    if let Some(k) = left.iter().position(|&h| h > 0) {
        return Err(McfError::InconsistentFlow(format!(
            "arc {k} keeps flow after peeling every path"
        )));
    }
    Ok(paths)
}
