//! Test-side reference implementations shared by several integration tests.
#![allow(dead_code)]

use covering_salesman::lp::{LpModel, LpRow, Relation};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// Inverts a square matrix by Gauss-Jordan elimination; `None` when singular.
fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let t = a.len();
    let mut inv: Vec<Vec<f64>> = (0..t).map(|i| (0..t).map(|j| (i == j) as u8 as f64).collect()).collect();
    for col in 0..t {
        let piv = (col..t).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..t {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..t {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for j in 0..t {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

fn subsets(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), out);
}

/// Optimum of a box-bounded LP by enumerating every basic solution: choose a
/// set T of tight rows and as many basic columns, fix the remaining columns at
/// a bound, solve, and keep the feasible points. Equality rows are not forced
/// into T, so dependent or empty equalities cannot hide a vertex. Returns
/// `None` when no basic solution is feasible.
pub fn enumerate_lp_optimum(model: &LpModel) -> Option<f64> {
    let n = model.var_count();
    let rows = model.rows();
    let dense: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![0.0; n];
            for &(j, c) in &r.coefs {
                v[j] += c;
            }
            v
        })
        .collect();
    let (lo, hi) = (model.lower(), model.upper());
    let obj = model.objective();
    let mut best: Option<f64> = None;

    for t in 0..=rows.len().min(n) {
        let mut row_sets = Vec::new();
        subsets(rows.len(), t, &mut row_sets);
        let mut col_sets = Vec::new();
        subsets(n, t, &mut col_sets);
        for tight in &row_sets {
            for basic in &col_sets {
                let mat: Vec<Vec<f64>> = tight.iter().map(|&r| basic.iter().map(|&j| dense[r][j]).collect()).collect();
                let Some(inv) = invert(mat) else { continue };
                let nonbasic: Vec<usize> = (0..n).filter(|j| !basic.contains(j)).collect();
                let mut x = vec![0.0; n];
                for assign in 0u32..(1 << nonbasic.len()) {
                    for (bit, &j) in nonbasic.iter().enumerate() {
                        x[j] = if assign & (1 << bit) != 0 { hi[j] } else { lo[j] };
                    }
                    let rhs: Vec<f64> = tight
                        .iter()
                        .map(|&r| rows[r].rhs - nonbasic.iter().map(|&j| dense[r][j] * x[j]).sum::<f64>())
                        .collect();
                    let mut ok = true;
                    for (a, &j) in basic.iter().enumerate() {
                        let v: f64 = (0..t).map(|b| inv[a][b] * rhs[b]).sum();
                        if v < lo[j] - TOL || v > hi[j] + TOL {
                            ok = false;
                            break;
                        }
                        x[j] = v;
                    }
                    if !ok || rows.iter().any(|r| r.infeasibility(&x) > 1e-7) {
                        continue;
                    }
                    let value: f64 = obj.iter().zip(&x).map(|(c, v)| c * v).sum();
                    if best.map_or(true, |b| value < b) {
                        best = Some(value);
                    }
                }
            }
        }
    }
    best
}

/// Random box-bounded LP with `vars` columns and `rows` rows, built around a
/// random interior point so that most instances are feasible.
pub fn random_lp(seed: u64, vars: usize, rows: usize) -> LpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objective: Vec<f64> = (0..vars).map(|_| rng.gen_range(-5..=5) as f64).collect();
    let mut model = LpModel::new(objective);
    let anchor: Vec<f64> = (0..vars).map(|_| rng.gen_range(0..=4) as f64 / 4.0).collect();
    let mut out = Vec::new();
    for _ in 0..rows {
        let mut coefs = Vec::new();
        for j in 0..vars {
            if rng.gen_bool(0.6) {
                coefs.push((j, rng.gen_range(-3..=3) as f64));
            }
        }
        let at: f64 = coefs.iter().map(|&(j, c)| c * anchor[j]).sum();
        let roll: f64 = rng.gen();
        let row = if roll < 0.1 {
            LpRow::new(coefs, Relation::Eq, at)
        } else if roll < 0.55 {
            LpRow::new(coefs, Relation::Le, at + rng.gen_range(0..=4) as f64 / 4.0)
        } else if roll < 0.95 {
            LpRow::new(coefs, Relation::Ge, at - rng.gen_range(0..=4) as f64 / 4.0)
        } else {
            LpRow::new(coefs, Relation::Ge, rng.gen_range(-2..=6) as f64)
        };
        out.push(row);
    }
    model.add_rows(out).unwrap();
    model
}
