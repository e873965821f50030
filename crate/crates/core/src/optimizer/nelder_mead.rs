//! Nelder-Mead simplex search (minimization) with restarts from the best
//! vertex until the evaluation budget runs out or a restart stops helping.

#[derive(Clone, Copy, Debug)]
pub struct NmOptions {
    pub max_evals: usize,
    pub initial_step: f64,
    /// Converged when the spread of simplex values falls below this.
    pub ftol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self { max_evals: 2000, initial_step: 1.0, ftol: 1e-11 }
    }
}

#[derive(Clone, Debug)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn minimize(f: &mut impl FnMut(&[f64]) -> f64, x0: &[f64], opts: NmOptions) -> NmResult {
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(f(x))
    };
    let mut best = NmResult { x: x0.to_vec(), f: eval(x0, &mut evals), evals: 0 };
    if x0.is_empty() {
        best.evals = evals;
        return best;
    }
    let mut step = opts.initial_step;
    while evals < opts.max_evals {
        let before = best.f;
        let (x, fx) = run(&mut eval, &best.x, best.f, step, opts, &mut evals);
        if fx < best.f {
            best.x = x;
            best.f = fx;
        }
        if before - best.f <= opts.ftol {
            break;
        }
        step *= 0.5;
    }
    best.evals = evals;
    best
}

fn run(
    eval: &mut impl FnMut(&[f64], &mut usize) -> f64,
    x0: &[f64],
    f0: f64,
    step: f64,
    opts: NmOptions,
    evals: &mut usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&x, evals);
        simplex.push((x, fx));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    while *evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[n].1 - simplex[0].1).abs() <= opts.ftol {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (w - c)).collect() };
        let xr = along(-alpha);
        let fr = eval(&xr, evals);
        if fr < simplex[0].1 {
            let xe = along(-alpha * gamma);
            let fe = eval(&xe, evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(-rho);
                let fc = eval(&xc, evals);
                (xc, fc)
            } else {
                let xc = along(rho);
                let fc = eval(&xc, evals);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.0 = best.iter().zip(&v.0).map(|(b, x)| b + sigma * (x - b)).collect();
                    v.1 = eval(&v.0, evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(&mut f, &[-1.2, 1.0], NmOptions { max_evals: 5000, ..Default::default() });
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn respects_budget_and_nan() {
        let mut calls = 0;
        let mut f = |x: &[f64]| {
            calls += 1;
            if x[0] > 0.5 {
                f64::NAN
            } else {
                (x[0] + 1.0).powi(2)
            }
        };
        let r = minimize(&mut f, &[0.0], NmOptions { max_evals: 50, ..Default::default() });
        assert!(r.evals <= 50 + 2);
        assert!(r.f.is_finite());
    }

    #[test]
    fn empty_parameter_vector_evaluates_once() {
        let r = minimize(&mut |_: &[f64]| 3.0, &[], NmOptions::default());
        assert_eq!((r.f, r.evals), (3.0, 1));
    }
}
