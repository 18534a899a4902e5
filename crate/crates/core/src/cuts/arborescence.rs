//! Minimum-weight spanning arborescence (Chu-Liu/Edmonds).

/// Weight of a minimum arborescence rooted at `root` spanning all `n`
/// nodes, or `None` if some node cannot be reached.
pub fn min_arborescence(n: usize, root: usize, edges: &[(usize, usize, i64)]) -> Option<i64> {
    let mut n = n;
    let mut root = root;
    let mut edges: Vec<(usize, usize, i64)> = edges.iter().copied().filter(|&(u, v, _)| u != v).collect();
    let mut total = 0i64;
    loop {
        let mut best_in = vec![i64::MAX; n];
        let mut pre = vec![usize::MAX; n];
        for &(u, v, w) in &edges {
            if v != root && w < best_in[v] {
                best_in[v] = w;
                pre[v] = u;
            }
        }
        if (0..n).any(|v| v != root && best_in[v] == i64::MAX) {
            return None;
        }
        best_in[root] = 0;
        let mut id = vec![usize::MAX; n];
        let mut mark = vec![usize::MAX; n];
        let mut count = 0;
        for v in 0..n {
            total += best_in[v];
            let mut x = v;
            while mark[x] != v && id[x] == usize::MAX && x != root {
                mark[x] = v;
                x = pre[x];
            }
            if x != root && id[x] == usize::MAX {
                // x lies on a new cycle
                let mut y = pre[x];
                while y != x {
                    id[y] = count;
                    y = pre[y];
                }
                id[x] = count;
                count += 1;
            }
        }
        if count == 0 {
            return Some(total);
        }
        for v in 0..n {
            if id[v] == usize::MAX {
                id[v] = count;
                count += 1;
            }
        }
        edges = edges
            .iter()
            .filter(|&&(u, v, _)| id[u] != id[v])
            .map(|&(u, v, w)| (id[u], id[v], w - best_in[v]))
            .collect();
        n = count;
        root = id[root];
    }
}
