//! Damped Gauss-Newton (Levenberg-Marquardt) minimizer for small dense
//! nonlinear least-squares problems, with forward-difference Jacobians.

/// Solver controls. Defaults suit problems with a handful of parameters.
#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Relative drop in squared-residual cost that counts as converged.
    pub cost_tolerance: f64,
    /// Relative step size that counts as converged.
    pub step_tolerance: f64,
    pub initial_damping: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            cost_tolerance: 1e-10,
            step_tolerance: 1e-12,
            initial_damping: 1e-3,
        }
    }
}

/// State at the solver's final iterate.
#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    /// Row-major m x n Jacobian at the final iterate.
    pub jacobian: Vec<Vec<f64>>,
    /// Sum of squared residuals.
    pub cost: f64,
    pub n_iterations: usize,
    pub converged: bool,
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn jacobian_fd<F>(f: &F, x: &[f64], r0: &[f64]) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let m = r0.len();
    let n = x.len();
    let mut jac = vec![vec![0.0; n]; m];
    let mut xh = x.to_vec();
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        xh[j] = x[j] + h;
        let rh = f(&xh);
        xh[j] = x[j];
        for i in 0..m {
            jac[i][j] = (rh[i] - r0[i]) / h;
        }
    }
    jac
}

/// Solves a·x = b in place by Gaussian elimination with partial pivoting.
/// Returns None when the pivot collapses.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Inverts a small symmetric positive matrix by Gauss-Jordan elimination.
pub fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut work: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut ext = row.clone();
            ext.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            ext
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| work[i][col].abs().partial_cmp(&work[j][col].abs()).unwrap())?;
        if work[pivot][col].abs() < 1e-300 {
            return None;
        }
        work.swap(col, pivot);
        let scale = work[col][col];
        for v in &mut work[col] {
            *v /= scale;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = work[row][col];
            if factor != 0.0 {
                for k in 0..2 * n {
                    let base = work[col][k];
                    work[row][k] -= factor * base;
                }
            }
        }
    }
    Some(work.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Normal-equation matrices JᵀJ and Jᵀr.
fn normal_system(jac: &[Vec<f64>], r: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = jac.first().map_or(0, |row| row.len());
    let mut jtj = vec![vec![0.0; n]; n];
    let mut jtr = vec![0.0; n];
    for (row, &ri) in jac.iter().zip(r) {
        for j in 0..n {
            jtr[j] += row[j] * ri;
            for k in j..n {
                jtj[j][k] += row[j] * row[k];
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            jtj[j][k] = jtj[k][j];
        }
    }
    (jtj, jtr)
}

/// Minimizes the sum of squares of `f` starting from `x0`.
pub fn minimize<F>(f: F, x0: &[f64], opts: &LmOptions) -> LmOutcome
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = x0.to_vec();
    let mut r = f(&x);
    let mut cost = sum_sq(&r);
    let mut lambda = opts.initial_damping;
    let mut jac = jacobian_fd(&f, &x, &r);
    let mut converged = false;
    let mut iterations = 0;
    'outer: for _ in 0..opts.max_iterations {
        iterations += 1;
        let (jtj, jtr) = normal_system(&jac, &r);
        loop {
            let mut damped = jtj.clone();
            for (j, row) in damped.iter_mut().enumerate() {
                row[j] += lambda * jtj[j][j].max(1e-30);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let step = match solve_linear(damped, rhs) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    if lambda > 1e14 {
                        break 'outer;
                    }
                    continue;
                }
            };
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, d)| a + d).collect();
            let r_trial = f(&trial);
            let cost_trial = sum_sq(&r_trial);
            let rel_step = step
                .iter()
                .zip(&x)
                .map(|(d, v)| d.abs() / v.abs().max(1.0))
                .fold(0.0, f64::max);
            if cost_trial.is_finite() && cost_trial < cost {
                let rel_drop = (cost - cost_trial) / cost.max(1e-300);
                x = trial;
                r = r_trial;
                cost = cost_trial;
                lambda = (lambda / 10.0).max(1e-14);
                jac = jacobian_fd(&f, &x, &r);
                if rel_drop < opts.cost_tolerance || rel_step < opts.step_tolerance || cost < 1e-300
                {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            // A sub-tolerance step that still cannot improve the cost means
            // the iterate already sits at a minimum.
            if rel_step < opts.step_tolerance {
                converged = true;
                break 'outer;
            }
            lambda *= 10.0;
            if lambda > 1e14 {
                break 'outer;
            }
        }
    }
    LmOutcome {
        x,
        jacobian: jac,
        cost,
        n_iterations: iterations,
        converged,
    }
}

/// Parameter covariance from the final Jacobian: scale·(JᵀJ)⁻¹ with
/// scale = SSR/(m-n) for unweighted residuals, or 1 when residuals were
/// already whitened by measurement uncertainties.
pub fn covariance(jacobian: &[Vec<f64>], ssr: f64, whitened: bool) -> Option<Vec<Vec<f64>>> {
    let m = jacobian.len();
    let n = jacobian.first().map_or(0, |row| row.len());
    let (jtj, _) = normal_system(jacobian, &vec![0.0; m]);
    let inv = invert(&jtj)?;
    let scale = if whitened {
        1.0
    } else if m > n {
        ssr / (m - n) as f64
    } else {
        0.0
    };
    Some(
        inv.into_iter()
            .map(|row| row.into_iter().map(|v| v * scale).collect())
            .collect(),
    )
}

/// Ordinary least squares y ≈ design·β via the normal equations, with
/// columns rescaled to unit maximum for conditioning.
/// Returns (β, (AᵀA)⁻¹, ssr).
pub fn linear_lstsq(design: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, Vec<Vec<f64>>, f64)> {
    let n = design.first()?.len();
    let mut scale = vec![0.0f64; n];
    for row in design {
        for (s, v) in scale.iter_mut().zip(row) {
            *s = s.max(v.abs());
        }
    }
    if scale.iter().any(|&s| s == 0.0) {
        return None;
    }
    let mut ata = vec![vec![0.0; n]; n];
    let mut aty = vec![0.0; n];
    for (row, &yi) in design.iter().zip(y) {
        for j in 0..n {
            let aj = row[j] / scale[j];
            aty[j] += aj * yi;
            for k in j..n {
                ata[j][k] += aj * row[k] / scale[k];
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            ata[j][k] = ata[k][j];
        }
    }
    let inv_scaled = invert(&ata)?;
    let beta: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|k| inv_scaled[j][k] * aty[k]).sum::<f64>() / scale[j])
        .collect();
    let inv: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|k| inv_scaled[j][k] / (scale[j] * scale[k]))
                .collect()
        })
        .collect();
    let ssr = design
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let fit: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (yi - fit).powi(2)
        })
        .sum();
    Some((beta, inv, ssr))
}
