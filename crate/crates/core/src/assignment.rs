//! Rectangular minimum-cost assignment (Hungarian method with potentials).

/// Minimum-cost assignment for a `rows x cols` cost matrix in row-major order.
///
/// Returns, for every row, the assigned column. Requires `rows <= cols`; every
/// row is assigned. Runs in `O(rows^2 * cols)`.
pub fn min_cost_assignment(costs: &[f64], rows: usize, cols: usize) -> Vec<usize> {
    assert!(rows <= cols, "assignment needs rows <= cols");
    assert_eq!(costs.len(), rows * cols);
    if rows == 0 {
        return Vec::new();
    }
    let cost = |r: usize, c: usize| costs[r * cols + c];

    // 1-based indices; column 0 is a virtual column holding the row being inserted.
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];

    for row in 1..=rows {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0;
            for c in 1..=cols {
                if used[c] {
                    continue;
                }
                let reduced = cost(r0 - 1, c - 1) - u[r0] - v[c];
                if reduced < minv[c] {
                    minv[c] = reduced;
                    way[c] = col0;
                }
                if minv[c] < delta {
                    delta = minv[c];
                    col1 = c;
                }
            }
            for c in 0..=cols {
                if used[c] {
                    u[owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assigned = vec![usize::MAX; rows];
    for c in 1..=cols {
        if owner[c] != 0 {
            assigned[owner[c] - 1] = c - 1;
        }
    }
    assigned
}
