//! Nelder–Mead simplex minimization.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    Tolerance,
    Budget,
}

/// Result of a simplex run: best point, best value, evaluations used, stop reason and
/// the best value after each iteration (non-increasing).
#[derive(Clone, Debug)]
pub struct SimplexRun {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub stop: Stop,
    pub history: Vec<(Vec<f64>, f64)>,
}

/// Minimize `f` from `x0` with initial step `step`, at most `budget` evaluations.
/// Stops when the spread of simplex values falls below `ftol` (absolute).
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: f64, budget: usize, ftol: f64) -> SimplexRun {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut history = vec![best_of(&simplex)];
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let stop = loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() <= ftol {
            break Stop::Tolerance;
        }
        if evals + 2 > budget {
            break Stop::Budget;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = along(alpha);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(gamma);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best.iter().zip(&item.0).map(|(b, x)| b + sigma * (x - b)).collect();
                    let v = eval(&x, &mut evals);
                    *item = (x, v);
                }
            }
        }
        history.push(best_of(&simplex));
    };
    let (x, fv) = best_of(&simplex);
    SimplexRun { x, f: fv, evals, stop, history }
}

fn best_of(simplex: &[(Vec<f64>, f64)]) -> (Vec<f64>, f64) {
    simplex
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(x, v)| (x.clone(), *v))
        .unwrap_or((Vec::new(), f64::INFINITY))
}
