//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! Columns of the basis are indexed by basis position, rows by constraint.
//! `ftran` maps a row-indexed vector `a` to the position-indexed solution of
//! `B x = a`; `btran` maps a position-indexed `c` to the row-indexed solution
//! of `B^T y = c`.

use crate::error::LpError;

/// Entries below this magnitude are not accepted as pivots.
const SINGULAR_TOL: f64 = 1e-11;
/// Threshold for partial pivoting within a column.
const THRESHOLD: f64 = 0.01;
/// Columns examined per Markowitz search.
const SEARCH_COLUMNS: usize = 4;

#[derive(Debug, Clone)]
struct Eta {
    r: usize,
    pivot: f64,
    /// Nonzeros of the entering column off the pivot position.
    entries: Vec<(usize, f64)>,
}

#[derive(Debug, Clone)]
pub(super) struct Factor {
    m: usize,
    piv_row: Vec<usize>,
    piv_col: Vec<usize>,
    diag: Vec<f64>,
    l_start: Vec<usize>,
    l_entries: Vec<(usize, f64)>,
    u_start: Vec<usize>,
    u_entries: Vec<(usize, f64)>,
    etas: Vec<Eta>,
}

impl Factor {
    pub(super) fn identity(m: usize) -> Self {
        Factor {
            m,
            piv_row: (0..m).collect(),
            piv_col: (0..m).collect(),
            diag: vec![1.0; m],
            l_start: vec![0; m + 1],
            l_entries: Vec::new(),
            u_start: vec![0; m + 1],
            u_entries: Vec::new(),
            etas: Vec::new(),
        }
    }

    /// Factors the matrix whose column `c` is `columns[c]` as `(row, value)`
    /// pairs with distinct rows.
    pub(super) fn new(m: usize, columns: &[Vec<(usize, f64)>]) -> Result<Self, LpError> {
        debug_assert_eq!(columns.len(), m);
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (c, col) in columns.iter().enumerate() {
            for &(i, v) in col {
                if v != 0.0 {
                    rows[i].push((c, v));
                    col_rows[c].push(i);
                }
            }
        }
        let mut col_count: Vec<usize> = col_rows.iter().map(Vec::len).collect();
        let mut row_active = vec![true; m];
        let mut col_active = vec![true; m];
        let mut slot = vec![usize::MAX; m];

        let mut f = Factor {
            m,
            piv_row: Vec::with_capacity(m),
            piv_col: Vec::with_capacity(m),
            diag: Vec::with_capacity(m),
            l_start: vec![0],
            l_entries: Vec::new(),
            u_start: vec![0],
            u_entries: Vec::new(),
            etas: Vec::new(),
        };

        let mut col_single: Vec<usize> = (0..m).filter(|&q| col_count[q] == 1).collect();
        let mut row_single: Vec<usize> = (0..m).filter(|&i| rows[i].len() == 1).collect();
        for _ in 0..m {
            let (p, q) = match pick_singleton(&rows, &col_rows, &col_count, &row_active, &col_active, &mut col_single, &mut row_single) {
                Some(pq) => pq,
                None => choose_pivot(&rows, &col_rows, &col_count, &row_active, &col_active)?,
            };
            let v = rows[p].iter().find(|e| e.0 == q).expect("pivot entry").1;
            let pivot_row = std::mem::take(&mut rows[p]);
            row_active[p] = false;
            col_active[q] = false;
            for &(j, _) in &pivot_row {
                col_count[j] -= 1;
                if col_count[j] == 1 && col_active[j] {
                    col_single.push(j);
                }
            }
            for k in 0..col_rows[q].len() {
                let i = col_rows[q][k];
                if !row_active[i] {
                    continue;
                }
                let Some(pos) = rows[i].iter().position(|e| e.0 == q) else {
                    continue;
                };
                let l = rows[i][pos].1 / v;
                rows[i].swap_remove(pos);
                col_count[q] -= 1;
                f.l_entries.push((i, l));
                for (idx, &(j, _)) in rows[i].iter().enumerate() {
                    slot[j] = idx;
                }
                for &(j, u) in &pivot_row {
                    if j == q {
                        continue;
                    }
                    if slot[j] != usize::MAX {
                        rows[i][slot[j]].1 -= l * u;
                    } else {
                        rows[i].push((j, -l * u));
                        col_rows[j].push(i);
                        col_count[j] += 1;
                    }
                }
                for &(j, _) in &rows[i] {
                    slot[j] = usize::MAX;
                }
                if rows[i].len() == 1 {
                    row_single.push(i);
                }
            }
            f.piv_row.push(p);
            f.piv_col.push(q);
            f.diag.push(v);
            f.l_start.push(f.l_entries.len());
            f.u_entries.extend(pivot_row.into_iter().filter(|e| e.0 != q && e.1 != 0.0));
            f.u_start.push(f.u_entries.len());
        }
        Ok(f)
    }

    pub(super) fn num_etas(&self) -> usize {
        self.etas.len()
    }

    /// Records the replacement of basis position `r` by a column whose
    /// `ftran` image is `alpha`.
    pub(super) fn update(&mut self, r: usize, alpha: &[f64]) {
        let entries = alpha.iter().enumerate().filter(|&(i, &a)| i != r && a != 0.0).map(|(i, &a)| (i, a)).collect();
        self.etas.push(Eta { r, pivot: alpha[r], entries });
    }

    pub(super) fn ftran(&self, a: &mut [f64]) {
        let m = self.m;
        for k in 0..m {
            let v = a[self.piv_row[k]];
            if v != 0.0 {
                for &(i, l) in &self.l_entries[self.l_start[k]..self.l_start[k + 1]] {
                    a[i] -= l * v;
                }
            }
        }
        let mut x = vec![0.0; m];
        for k in (0..m).rev() {
            let mut s = a[self.piv_row[k]];
            for &(j, u) in &self.u_entries[self.u_start[k]..self.u_start[k + 1]] {
                s -= u * x[j];
            }
            x[self.piv_col[k]] = s / self.diag[k];
        }
        for eta in &self.etas {
            let xr = x[eta.r] / eta.pivot;
            if xr != 0.0 {
                for &(i, a) in &eta.entries {
                    x[i] -= a * xr;
                }
            }
            x[eta.r] = xr;
        }
        a.copy_from_slice(&x);
    }

    pub(super) fn btran(&self, c: &mut [f64]) {
        let m = self.m;
        for eta in self.etas.iter().rev() {
            let s: f64 = eta.entries.iter().map(|&(i, a)| a * c[i]).sum();
            c[eta.r] = (c[eta.r] - s) / eta.pivot;
        }
        let mut y = vec![0.0; m];
        for k in 0..m {
            let z = c[self.piv_col[k]] / self.diag[k];
            y[self.piv_row[k]] = z;
            if z != 0.0 {
                for &(j, u) in &self.u_entries[self.u_start[k]..self.u_start[k + 1]] {
                    c[j] -= u * z;
                }
            }
        }
        for k in (0..m).rev() {
            let s: f64 = self.l_entries[self.l_start[k]..self.l_start[k + 1]].iter().map(|&(i, l)| l * y[i]).sum();
            y[self.piv_row[k]] -= s;
        }
        c.copy_from_slice(&y);
    }
}

/// Pops a still-valid column or row singleton, if any.
fn pick_singleton(
    rows: &[Vec<(usize, f64)>],
    col_rows: &[Vec<usize>],
    col_count: &[usize],
    row_active: &[bool],
    col_active: &[bool],
    col_single: &mut Vec<usize>,
    row_single: &mut Vec<usize>,
) -> Option<(usize, usize)> {
    while let Some(q) = col_single.pop() {
        if !col_active[q] || col_count[q] != 1 {
            continue;
        }
        let hit = col_rows[q].iter().filter(|&&i| row_active[i]).find_map(|&i| rows[i].iter().find(|e| e.0 == q).map(|e| (i, e.1)));
        if let Some((i, v)) = hit {
            if v.abs() > SINGULAR_TOL {
                return Some((i, q));
            }
        }
    }
    while let Some(i) = row_single.pop() {
        if row_active[i] && rows[i].len() == 1 && col_active[rows[i][0].0] && rows[i][0].1.abs() > SINGULAR_TOL {
            return Some((i, rows[i][0].0));
        }
    }
    None
}

/// The sparsest column with its shortest acceptable row.
fn choose_pivot(
    rows: &[Vec<(usize, f64)>],
    col_rows: &[Vec<usize>],
    col_count: &[usize],
    row_active: &[bool],
    col_active: &[bool],
) -> Result<(usize, usize), LpError> {
    let entries = |q: usize| {
        col_rows[q].iter().filter(|&&i| row_active[i]).filter_map(move |&i| rows[i].iter().find(|e| e.0 == q).map(|e| (i, e.1)))
    };
    let min_count = (0..col_active.len()).filter(|&q| col_active[q]).map(|q| col_count[q]).min().expect("an active column remains");
    let mut best: Option<(usize, usize, usize)> = None;
    let mut examined = 0;
    for q in (0..col_active.len()).filter(|&q| col_active[q] && col_count[q] == min_count) {
        let max = entries(q).map(|e| e.1.abs()).fold(0.0, f64::max);
        if max <= SINGULAR_TOL {
            continue;
        }
        for (i, v) in entries(q) {
            if v.abs() >= THRESHOLD * max && v.abs() > SINGULAR_TOL {
                let cost = (rows[i].len() - 1) * (col_count[q] - 1);
                if best.is_none_or(|b| cost < b.0) {
                    best = Some((cost, i, q));
                }
            }
        }
        examined += 1;
        if examined >= SEARCH_COLUMNS {
            break;
        }
    }
    if best.is_none() {
        // Every minimum-count column is numerically empty; fall back to any column.
        for q in (0..col_active.len()).filter(|&q| col_active[q]) {
            let max = entries(q).map(|e| e.1.abs()).fold(0.0, f64::max);
            if let Some((i, _)) = entries(q).find(|e| e.1.abs() >= THRESHOLD * max && e.1.abs() > SINGULAR_TOL) {
                best = Some((0, i, q));
                break;
            }
        }
    }
    best.map(|(_, i, q)| (i, q)).ok_or_else(|| LpError::Numerical("singular basis during factorization".into()))
}
