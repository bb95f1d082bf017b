//! Exhaustive enumeration of simple source-to-sink paths.

use super::{GameError, GameInstance};

pub const DEFAULT_PATH_CAP: usize = 10_000;

/// All simple paths for `player`, in lexicographic edge-id-sequence order,
/// capped at [`DEFAULT_PATH_CAP`].
pub fn enumerate_paths(
    instance: &GameInstance,
    player: usize,
) -> Result<Vec<Vec<usize>>, GameError> {
    enumerate_paths_with_cap(instance, player, DEFAULT_PATH_CAP)
}

/// As [`enumerate_paths`], but with an explicit cap on the number of paths.
pub fn enumerate_paths_with_cap(
    instance: &GameInstance,
    player: usize,
    cap: usize,
) -> Result<Vec<Vec<usize>>, GameError> {
    let graph = instance.graph();
    let (source, sink) = instance.terminals(player);
    // Pruning by reachability keeps the search from wandering into dead ends.
    let reaches_sink = graph.reaches(sink);

    let mut paths = Vec::new();
    if source == sink {
        paths.push(Vec::new());
        return Ok(paths);
    }

    let mut on_path = vec![false; graph.node_count()];
    on_path[source] = true;
    let mut current: Vec<usize> = Vec::new();
    // Stack of iterators realized as (node, next out-edge position).
    let mut frames: Vec<(usize, usize)> = vec![(source, 0)];

    while let Some(&mut (node, ref mut pos)) = frames.last_mut() {
        let out = graph.out_edges(node);
        if *pos >= out.len() {
            frames.pop();
            on_path[node] = false;
            current.pop();
            continue;
        }
        let e = out[*pos];
        *pos += 1;
        let next = graph.edge(e).to;
        if on_path[next] || !reaches_sink[next] {
            continue;
        }
        if next == sink {
            if paths.len() == cap {
                return Err(GameError::PathCapExceeded { player, cap });
            }
            let mut path = current.clone();
            path.push(e);
            paths.push(path);
            continue;
        }
        on_path[next] = true;
        current.push(e);
        frames.push((next, 0));
    }
    Ok(paths)
}
