use super::ExactMatrix;

/// Rank by complex floating-point elimination with partial pivoting.
///
/// Independent of the exact path; entries below `tol` (relative to the largest
/// entry) count as zero.
pub fn float_rank(m: &ExactMatrix, tol: f64) -> usize {
    let mut a: Vec<Vec<(f64, f64)>> = m.to_f64();
    let rows = m.rows();
    let cols = m.cols();
    let abs = |z: (f64, f64)| z.0.hypot(z.1);
    let scale = a.iter().flatten().map(|&z| abs(z)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let cutoff = tol * scale.max(1.0);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (best, best_abs) = (rank..rows)
            .map(|r| (r, abs(a[r][col])))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= cutoff {
            continue;
        }
        a.swap(rank, best);
        let p = a[rank][col];
        let pn = p.0 * p.0 + p.1 * p.1;
        for r in rank + 1..rows {
            let x = a[r][col];
            // f = x / p
            let f = ((x.0 * p.0 + x.1 * p.1) / pn, (x.1 * p.0 - x.0 * p.1) / pn);
            for c in col..cols {
                let y = a[rank][c];
                a[r][c].0 -= f.0 * y.0 - f.1 * y.1;
                a[r][c].1 -= f.0 * y.1 + f.1 * y.0;
            }
        }
        rank += 1;
    }
    rank
}
