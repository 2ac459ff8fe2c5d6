//! Bounded Nelder-Mead simplex search.

/// Minimises `f` inside the box `[lo, hi]` starting from `start`, spending at
/// most `budget` evaluations. Points are projected onto the box before every
/// evaluation. Returns the best point and value seen.
pub fn nelder_mead<F>(mut f: F, start: &[f64], lo: &[f64], hi: &[f64], step: f64, budget: usize) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let project = |x: &mut Vec<f64>| {
        for ((v, &l), &h) in x.iter_mut().zip(lo).zip(hi) {
            *v = v.clamp(l, h);
        }
    };
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

    let mut x0 = start.to_vec();
    project(&mut x0);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(&x0, &mut evals);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        // step towards the interior when the start sits on the upper face
        x[i] = if x[i] + step <= hi[i] { x[i] + step } else { x[i] - step };
        project(&mut x);
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = simplex
            .iter()
            .skip(1)
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread < 1e-9 || (worst - best).abs() <= 1e-12 * (1.0 + best.abs()) && spread < 1e-6 {
            break;
        }

        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect();
            project(&mut x);
            x
        };

        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                // shrink towards the best vertex
                let x_best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&x_best) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *v = eval(x, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}
