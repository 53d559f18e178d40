//! Derivative-free Nelder-Mead simplex descent.
//!
//! Small and self-contained: the fitting layer only ever minimizes smooth
//! sum-of-squares objectives over at most a handful of parameters, so the
//! classic reflect/expand/contract/shrink scheme with a relative function
//! spread stopping rule is all that is needed.

/// Outcome of one simplex descent.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`, with per-dimension initial simplex
/// offsets `scale`. Stops when the spread of vertex values falls below
/// `ftol_rel` relative to their magnitude or below the absolute floor
/// `ftol_abs` (callers minimizing a sum of squares pass a floor scaled by
/// the data's total variance, so exact fits terminate), or after
/// `max_iters` iterations.
pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    scale: &[f64],
    max_iters: usize,
    ftol_rel: f64,
    ftol_abs: f64,
) -> SimplexResult {
    let n = x0.len();
    assert!(n >= 1, "need at least one parameter");
    assert_eq!(scale.len(), n);

    // vertices and values
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    xs.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += scale[i];
        xs.push(v);
    }
    let mut fs: Vec<f64> = xs.iter().map(|x| sanitize(f(x))).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        iterations += 1;

        // order best..worst
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| fs[a].total_cmp(&fs[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        let spread = fs[worst] - fs[best];
        if spread <= ftol_rel * (fs[best].abs() + fs[worst].abs()) * 0.5 + ftol_abs {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; n];
        for (i, x) in xs.iter().enumerate() {
            if i == worst {
                continue;
            }
            for d in 0..n {
                centroid[d] += x[d];
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let lerp = |from: &[f64], coeff: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(from)
                .map(|(&c, &x)| c + coeff * (c - x))
                .collect()
        };

        let reflected = lerp(&xs[worst], alpha);
        let fr = sanitize(f(&reflected));

        if fr < fs[best] {
            let expanded = lerp(&xs[worst], gamma);
            let fe = sanitize(f(&expanded));
            if fe < fr {
                xs[worst] = expanded;
                fs[worst] = fe;
            } else {
                xs[worst] = reflected;
                fs[worst] = fr;
            }
        } else if fr < fs[second_worst] {
            xs[worst] = reflected;
            fs[worst] = fr;
        } else {
            // contraction: outside when the reflection at least beat the
            // worst vertex, inside otherwise
            let contracted = if fr < fs[worst] {
                lerp(&xs[worst], rho)
            } else {
                lerp(&xs[worst], -rho)
            };
            let fc = sanitize(f(&contracted));
            if fc < fs[worst].min(fr) {
                xs[worst] = contracted;
                fs[worst] = fc;
            } else {
                // shrink everything toward the best vertex
                let best_x = xs[best].clone();
                for (i, x) in xs.iter_mut().enumerate() {
                    if i == best {
                        continue;
                    }
                    for d in 0..n {
                        x[d] = best_x[d] + sigma * (x[d] - best_x[d]);
                    }
                    fs[i] = sanitize(f(x));
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if fs[i] < fs[best] {
            best = i;
        }
    }
    SimplexResult {
        x: xs[best].clone(),
        fx: fs[best],
        iterations,
        converged,
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn minimizes_quadratic_bowl() {
        let mut f = |x: &[f64]| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.5).powi(2);
        let r = nelder_mead(&mut f, &[0.0, 0.0], &[0.5, 0.5], 2000, 1e-15, 1e-30);
        assert!(r.converged);
        assert_relative_eq!(r.x[0], 3.0, epsilon = 1e-6);
        assert_relative_eq!(r.x[1], -1.5, epsilon = 1e-6);
    }

    #[test]
    fn minimizes_rosenbrock() {
        let mut f =
            |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = nelder_mead(&mut f, &[-1.2, 1.0], &[0.5, 0.5], 5000, 1e-16, 1e-30);
        assert!(r.fx < 1e-12, "fx={}", r.fx);
    }

    #[test]
    fn handles_one_dimension() {
        let mut f = |x: &[f64]| (x[0] - 7.0).powi(2);
        let r = nelder_mead(&mut f, &[0.0], &[1.0], 1000, 1e-15, 1e-30);
        assert_relative_eq!(r.x[0], 7.0, epsilon = 1e-6);
    }

    #[test]
    fn respects_iteration_cap() {
        let mut f = |x: &[f64]| x[0] * x[0];
        let r = nelder_mead(&mut f, &[100.0], &[1.0], 3, 1e-300, 0.0);
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
