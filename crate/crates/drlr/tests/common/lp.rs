//! Dense-LP oracle for the certified risk bounds, built from the transport
//! side of the problem: each sample may send mass toward the error
//! half-space (cost per unit mass: distance to the decision boundary) or
//! through a label flip (cost kappa plus any remaining distance). Strong
//! LP duality makes these values equal the analytic one-dimensional
//! reductions, so a tiny self-written simplex provides an independent
//! check of them.

use drlr::Kappa;

const LP_EPS: f64 = 1e-9;

/// min c.x subject to rows[i].x <= rhs[i], x >= 0, by a dense two-phase
/// tableau simplex with Bland's rule. Oracle-sized problems only; panics
/// on infeasible or unbounded input rather than recovering.
pub fn simplex_min(c: &[f64], rows_in: &[Vec<f64>], rhs_in: &[f64]) -> f64 {
    let m = rows_in.len();
    let n = c.len();
    let n_art = rhs_in.iter().filter(|v| **v < 0.0).count();
    let total = n + m + n_art;
    let mut tab: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs = vec![0.0; m];
    let mut basis = vec![0usize; m];
    let mut next_art = n + m;
    for i in 0..m {
        let mut row = vec![0.0; total];
        let sign = if rhs_in[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            row[j] = sign * rows_in[i][j];
        }
        row[n + i] = sign;
        rhs[i] = sign * rhs_in[i];
        if sign < 0.0 {
            row[next_art] = 1.0;
            basis[i] = next_art;
            next_art += 1;
        } else {
            basis[i] = n + i;
        }
        tab.push(row);
    }

    if n_art > 0 {
        let mut c1 = vec![0.0; total];
        for v in c1.iter_mut().skip(n + m) {
            *v = 1.0;
        }
        let v1 = run(&mut tab, &mut rhs, &mut basis, &c1, total);
        assert!(
            v1.abs() <= 1e-7,
            "oracle LP infeasible (phase-1 value {v1})"
        );
        // pivot leftover zero-level artificials onto real columns where
        // possible; rows where none exists are redundant and stay inert
        for i in 0..m {
            if basis[i] >= n + m {
                if let Some(j) = (0..n + m).find(|&j| tab[i][j].abs() > LP_EPS) {
                    pivot(&mut tab, &mut rhs, &mut basis, i, j);
                }
            }
        }
    }

    let mut c2 = vec![0.0; total];
    c2[..n].copy_from_slice(c);
    run(&mut tab, &mut rhs, &mut basis, &c2, n + m)
}

fn run(
    tab: &mut [Vec<f64>],
    rhs: &mut [f64],
    basis: &mut [usize],
    cost: &[f64],
    allowed: usize,
) -> f64 {
    let m = tab.len();
    for _ in 0..200_000 {
        // reduced costs priced through the current basis
        let mut entering = None;
        for j in 0..allowed {
            if basis.contains(&j) {
                continue;
            }
            let mut d = cost[j];
            for i in 0..m {
                d -= cost[basis[i]] * tab[i][j];
            }
            if d < -LP_EPS {
                entering = Some(j);
                break; // Bland: smallest improving index
            }
        }
        let Some(j) = entering else {
            return (0..m).map(|i| cost[basis[i]] * rhs[i]).sum();
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if tab[i][j] > LP_EPS {
                let ratio = rhs[i] / tab[i][j];
                let better = ratio < best - LP_EPS
                    || (ratio < best + LP_EPS && leave.is_some_and(|l| basis[i] < basis[l]));
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(i) = leave else {
            panic!("oracle LP unbounded");
        };
        pivot(tab, rhs, basis, i, j);
    }
    panic!("oracle simplex failed to terminate");
}

fn pivot(tab: &mut [Vec<f64>], rhs: &mut [f64], basis: &mut [usize], row: usize, col: usize) {
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    rhs[row] /= p;
    for i in 0..tab.len() {
        if i == row {
            continue;
        }
        let f = tab[i][col];
        if f == 0.0 {
            continue;
        }
        for j in 0..tab[i].len() {
            tab[i][j] -= f * tab[row][j];
        }
        rhs[i] -= f * rhs[row];
    }
    basis[row] = col;
}

fn ind(p: bool) -> f64 {
    if p {
        1.0
    } else {
        0.0
    }
}

/// Transport-LP value of the worst-case risk sup P[y<beta,x> <= 0] at
/// margins m_i = y_i<beta,x_i> and b = dual_norm(beta) > 0: per sample,
/// alpha_i is the mass fraction moved to the error half-space (distance
/// max(m_i,0)/b) and gamma_i the fraction label-flipped then moved
/// (kappa + max(-m_i,0)/b). Mass balance alpha+gamma <= 1 per atom, total
/// cost <= epsilon.
pub fn lp_worst_risk(margins: &[f64], b: f64, epsilon: f64, kappa: Kappa) -> f64 {
    assert!(b > 0.0);
    let n = margins.len();
    let nf = n as f64;
    let emp = margins.iter().filter(|m| **m <= 0.0).count() as f64 / nf;
    let with_flip = matches!(kappa, Kappa::Finite(_));
    let nv = if with_flip { 2 * n } else { n };

    let mut c = vec![0.0; nv];
    let mut budget_row = vec![0.0; nv];
    for (i, &m) in margins.iter().enumerate() {
        c[i] = -(ind(m > 0.0)) / nf;
        budget_row[i] = m.max(0.0) / b / nf;
        if with_flip {
            let k = kappa.as_f64();
            c[n + i] = -(ind(-m <= 0.0) - ind(m <= 0.0)) / nf;
            budget_row[n + i] = (k + (-m).max(0.0) / b) / nf;
        }
    }
    let mut rows = Vec::with_capacity(n + 1);
    let mut rhs = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut r = vec![0.0; nv];
        r[i] = 1.0;
        if with_flip {
            r[n + i] = 1.0;
        }
        rows.push(r);
        rhs.push(1.0);
    }
    rows.push(budget_row);
    rhs.push(epsilon);
    emp - simplex_min(&c, &rows, &rhs)
}

/// Transport-LP value of the best-case risk inf P[y<beta,x> < 0]: mass of
/// misclassified atoms moved to the boundary (margin 0 is not an error
/// under the strict inequality) or label-flipped.
pub fn lp_best_risk(margins: &[f64], b: f64, epsilon: f64, kappa: Kappa) -> f64 {
    assert!(b > 0.0);
    let n = margins.len();
    let nf = n as f64;
    let emp = margins.iter().filter(|m| **m < 0.0).count() as f64 / nf;
    let with_flip = matches!(kappa, Kappa::Finite(_));
    let nv = if with_flip { 2 * n } else { n };

    let mut c = vec![0.0; nv];
    let mut budget_row = vec![0.0; nv];
    for (i, &m) in margins.iter().enumerate() {
        c[i] = -(ind(m < 0.0)) / nf;
        budget_row[i] = (-m).max(0.0) / b / nf;
        if with_flip {
            let k = kappa.as_f64();
            c[n + i] = -(ind(m < 0.0) - ind(-m < 0.0)) / nf;
            budget_row[n + i] = (k + m.max(0.0) / b) / nf;
        }
    }
    let mut rows = Vec::with_capacity(n + 1);
    let mut rhs = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut r = vec![0.0; nv];
        r[i] = 1.0;
        if with_flip {
            r[n + i] = 1.0;
        }
        rows.push(r);
        rhs.push(1.0);
    }
    rows.push(budget_row);
    rhs.push(epsilon);
    emp + simplex_min(&c, &rows, &rhs)
}
