// Column/symbol bipartite matching for growing a Latin rectangle by one row.

/// For every column, the symbols not yet used in that column, ascending.
pub(super) fn free_symbols(rows: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|c| {
            let used = rows.iter().fold(0u64, |m, row| m | 1 << row[c]);
            (0..n).filter(|&s| used & (1 << s) == 0).collect()
        })
        .collect()
}

/// Kuhn's augmenting-path matching. `adj[c]` lists the symbols column `c` may
/// take, in preference order; columns are matched in `col_order`.
/// Returns `row[c] = symbol` when a perfect matching exists.
pub(super) fn perfect_matching(adj: &[Vec<usize>], col_order: &[usize], n: usize) -> Option<Vec<usize>> {
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for &c in col_order {
        let mut visited = vec![false; n];
        if !augment(c, adj, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut row = vec![0; n];
    for (s, c) in owner.iter().enumerate() {
        row[(*c)?] = s;
    }
    Some(row)
}

fn augment(c: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], visited: &mut [bool]) -> bool {
    for &s in &adj[c] {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let free = match owner[s] {
            None => true,
            Some(other) => augment(other, adj, owner, visited),
        };
        if free {
            owner[s] = Some(c);
            return true;
        }
    }
    false
}
