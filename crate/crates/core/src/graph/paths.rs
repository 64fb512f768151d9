use std::collections::VecDeque;

use super::{ExecutionGraph, GraphError, Interaction};

/// Minimum-edge-count path from `from` to `to`. Among equally short paths,
/// each hop takes the edge with the smallest execution order.
pub fn shortest_path(
    graph: &ExecutionGraph,
    from: usize,
    to: usize,
) -> Result<Vec<Interaction>, GraphError> {
    let n = graph.vertices.len();
    for v in [from, to] {
        if v >= n {
            return Err(GraphError::UnknownVertex(v));
        }
    }
    if from == to {
        return Ok(Vec::new());
    }
    // distances to `to` over reversed edges
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &graph.edges {
        if let Some(t) = e.target {
            incoming[t].push(e.source);
        }
    }
    let mut dist_to = vec![usize::MAX; n];
    dist_to[to] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(v) = queue.pop_front() {
        for &u in &incoming[v] {
            if dist_to[u] == usize::MAX {
                dist_to[u] = dist_to[v] + 1;
                queue.push_back(u);
            }
        }
    }
    if dist_to[from] == usize::MAX {
        return Err(GraphError::NoPath { from, to });
    }
    let mut path = Vec::with_capacity(dist_to[from]);
    let mut cur = from;
    while cur != to {
        let next = graph
            .out_edges(cur)
            .into_iter()
            .find(|e| {
                e.target
                    .is_some_and(|t| dist_to[t].checked_add(1) == Some(dist_to[cur]))
            })
            .expect("a vertex on a shortest path has a next hop");
        cur = next.target.unwrap_or(cur);
        path.push(next.clone());
    }
    Ok(path)
}

/// Every vertex within `depth` levels of `from` with its minimal distance,
/// ordered by distance and then by the execution order of the edges that
/// reached it.
pub fn neighborhood(graph: &ExecutionGraph, from: usize, depth: usize) -> Vec<(usize, usize)> {
    if from >= graph.vertices.len() {
        return Vec::new();
    }
    let mut dist = vec![usize::MAX; graph.vertices.len()];
    dist[from] = 0;
    let mut out = vec![(from, 0)];
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if dist[v] == depth {
            continue;
        }
        for e in graph.out_edges(v) {
            let Some(t) = e.target else { continue };
            if dist[t] == usize::MAX {
                dist[t] = dist[v] + 1;
                out.push((t, dist[t]));
                queue.push_back(t);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appsim::{AppModel, EventKind, ScreenSize};
    use crate::graph::systematic_explore;

    /// A graph with `n` numbered vertices (0 is the start vertex) and the
    /// given edges, inserted in order.
    pub(crate) fn synthetic(n: usize, edges: &[(usize, usize)]) -> ExecutionGraph {
        let mut g = ExecutionGraph::new("synthetic", ScreenSize::default());
        for i in 1..n {
            let mut screen = crate::appsim::launcher_screen(ScreenSize::default());
            screen.name = format!("S{i}");
            screen.root.bounds.width = i as i32;
            g.ensure_vertex(&screen);
        }
        for (k, &(a, b)) in edges.iter().enumerate() {
            g.edges.push(Interaction {
                source: a,
                target: Some(b),
                event: EventKind::Tap,
                component: Some(format!("c{k}")),
                input: None,
                input_class: None,
                exec_order: k as u64,
            });
        }
        g.next_order = edges.len() as u64;
        g
    }

    #[test]
    fn trivial_paths() {
        let g = synthetic(4, &[(1, 2), (2, 3)]);
        assert_eq!(shortest_path(&g, 2, 2).unwrap(), vec![]);
        let p = shortest_path(&g, 1, 3).unwrap();
        assert_eq!(
            p.iter()
                .map(|e| (e.source, e.target.unwrap()))
                .collect::<Vec<_>>(),
            [(1, 2), (2, 3)]
        );
        assert_eq!(
            shortest_path(&g, 3, 1),
            Err(GraphError::NoPath { from: 3, to: 1 })
        );
        assert_eq!(shortest_path(&g, 1, 9), Err(GraphError::UnknownVertex(9)));
    }

    #[test]
    fn ties_take_earliest_edge() {
        let g = synthetic(5, &[(1, 3), (1, 2), (3, 4), (2, 4)]);
        let p = shortest_path(&g, 1, 4).unwrap();
        assert_eq!(p[0].target, Some(3));
    }

    #[test]
    fn dead_end_branches_are_skipped() {
        let g = synthetic(5, &[(1, 4), (1, 2), (2, 3)]);
        let p = shortest_path(&g, 1, 3).unwrap();
        assert_eq!(
            p.iter().map(|e| e.target.unwrap()).collect::<Vec<_>>(),
            [2, 3]
        );
    }

    #[test]
    fn neighborhood_depths() {
        let chain: Vec<(usize, usize)> = (1..10).map(|i| (i, i + 1)).collect();
        let g = synthetic(11, &chain);
        assert_eq!(neighborhood(&g, 1, 0), vec![(1, 0)]);
        let six = neighborhood(&g, 1, 6);
        assert_eq!(six.len(), 7);
        assert_eq!(six.last(), Some(&(7, 6)));
    }

    #[test]
    fn fixture_main_neighborhood() {
        let m = AppModel::from_json(include_str!("../../fixtures/expensedroid.app.json")).unwrap();
        let g = ExecutionGraph::build(m.app_name(), m.screen_size(), &systematic_explore(&m, 200));
        let main = g.vertex_for(m.screen("Main").unwrap()).unwrap();
        let names: Vec<(String, usize)> = neighborhood(&g, main, 2)
            .into_iter()
            .map(|(v, d)| (g.vertices[v].screen.name.clone(), d))
            .collect();
        let expected = [
            ("Main", 0),
            ("MainMenu", 1),
            ("Statistics", 1),
            ("CreateEntry", 1),
            ("Settings", 2),
            ("About", 2),
            ("CategoryPicker", 2),
            ("MainWithEntry", 2),
        ];
        assert_eq!(
            names,
            expected
                .iter()
                .map(|(n, d)| (n.to_string(), *d))
                .collect::<Vec<_>>()
        );
    }
}
