//! Marching-squares extraction of a level set from a scalar grid. Used for
//! the Lyapunov level curve in phase portraits; output is deterministic for
//! a fixed grid.

/// Scalar field sampled on the tensor grid `xs × ys`; `values[i][j]`
/// corresponds to `(xs[i], ys[j])`. Cells with any non-finite corner are
/// skipped.
pub struct Grid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

type Seg = ((f64, f64), (f64, f64));

/// Extract the iso-curve `value = level` as a set of polylines.
pub fn contour_polylines(grid: &Grid, level: f64) -> Vec<Vec<(f64, f64)>> {
    let mut segs: Vec<Seg> = Vec::new();
    for i in 0..grid.xs.len().saturating_sub(1) {
        for j in 0..grid.ys.len().saturating_sub(1) {
            cell_segments(grid, i, j, level, &mut segs);
        }
    }
    chain_segments(segs)
}

fn interp(a: f64, b: f64, va: f64, vb: f64, level: f64) -> f64 {
    if (vb - va).abs() < f64::MIN_POSITIVE {
        0.5 * (a + b)
    } else {
        a + (b - a) * (level - va) / (vb - va)
    }
}

fn cell_segments(grid: &Grid, i: usize, j: usize, level: f64, out: &mut Vec<Seg>) {
    let (x0, x1) = (grid.xs[i], grid.xs[i + 1]);
    let (y0, y1) = (grid.ys[j], grid.ys[j + 1]);
    // Corners counterclockwise from bottom-left.
    let v = [
        grid.values[i][j],
        grid.values[i + 1][j],
        grid.values[i + 1][j + 1],
        grid.values[i][j + 1],
    ];
    if v.iter().any(|t| !t.is_finite()) {
        return;
    }
    let mut case = 0usize;
    for (k, val) in v.iter().enumerate() {
        if *val > level {
            case |= 1 << k;
        }
    }
    if case == 0 || case == 15 {
        return;
    }

    // Edge midpoints by linear interpolation: bottom, right, top, left.
    let bottom = (interp(x0, x1, v[0], v[1], level), y0);
    let right = (x1, interp(y0, y1, v[1], v[2], level));
    let top = (interp(x0, x1, v[3], v[2], level), y1);
    let left = (x0, interp(y0, y1, v[0], v[3], level));

    let mut push = |a: (f64, f64), b: (f64, f64)| out.push((a, b));
    match case {
        1 | 14 => push(left, bottom),
        2 | 13 => push(bottom, right),
        3 | 12 => push(left, right),
        4 | 11 => push(right, top),
        6 | 9 => push(bottom, top),
        7 | 8 => push(left, top),
        5 | 10 => {
            // Saddle cell: disambiguate by the centre value.
            let centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
            let flip = (centre > level) == (case == 5);
            if flip {
                push(left, top);
                push(bottom, right);
            } else {
                push(left, bottom);
                push(right, top);
            }
        }
        _ => unreachable!(),
    }
}

/// Join segments into polylines by matching endpoints exactly (bitwise):
/// marching squares computes shared cell-edge crossings identically from
/// both sides, so exact keys suffice and keep the output deterministic.
fn chain_segments(segs: Vec<Seg>) -> Vec<Vec<(f64, f64)>> {
    use std::collections::BTreeMap;
    let key = |p: (f64, f64)| (p.0.to_bits(), p.1.to_bits());

    let mut adjacency: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (idx, (a, b)) in segs.iter().enumerate() {
        adjacency.entry(key(*a)).or_default().push(idx);
        adjacency.entry(key(*b)).or_default().push(idx);
    }

    let mut used = vec![false; segs.len()];
    let mut polylines = Vec::new();
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b) = segs[start];
        let mut line = vec![a, b];

        // Extend forward from the tail, then backward from the head.
        for dir in 0..2 {
            loop {
                let tip = if dir == 0 { *line.last().unwrap() } else { line[0] };
                let Some(cands) = adjacency.get(&key(tip)) else { break };
                let Some(&next) = cands.iter().find(|&&i| !used[i]) else { break };
                used[next] = true;
                let (na, nb) = segs[next];
                let other = if key(na) == key(tip) { nb } else { na };
                if dir == 0 {
                    line.push(other);
                } else {
                    line.insert(0, other);
                }
            }
        }
        polylines.push(line);
    }
    polylines
}
