//! Nelder-Mead simplex minimizer with standard coefficients.

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `start`. The initial simplex offsets coordinate `i`
/// by `steps[i]`. Stops when the spread of vertex values drops to
/// `tolerance` or after `max_iterations` iterations. Non-finite values are
/// treated as `+inf`.
pub(crate) fn minimize<F>(
    f: &mut F,
    start: &[f64],
    steps: &[f64],
    max_iterations: usize,
    tolerance: f64,
) -> Outcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), eval(start)));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += steps[i];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];

    loop {
        // Stable sort keeps ties in insertion order.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if best.is_finite() && worst - best <= tolerance {
            converged = true;
            break;
        }
        if iterations >= max_iterations || best == f64::INFINITY {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            centroid.iter_mut().zip(x).for_each(|(c, xi)| *c += xi);
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let along = |coef: f64, out: &mut [f64], worst: &[f64]| {
            for j in 0..n {
                out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
            }
        };

        along(REFLECT, &mut trial, &simplex[n].0);
        let reflected = trial.clone();
        let fr = eval(&reflected);

        if fr < best {
            along(EXPAND, &mut trial, &simplex[n].0);
            let fe = eval(&trial);
            simplex[n] = if fe < fr {
                (trial.clone(), fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        if fr < worst {
            along(CONTRACT, &mut trial, &simplex[n].0);
            let fc = eval(&trial);
            if fc <= fr {
                simplex[n] = (trial.clone(), fc);
                continue;
            }
        } else {
            along(-CONTRACT, &mut trial, &simplex[n].0);
            let fc = eval(&trial);
            if fc < worst {
                simplex[n] = (trial.clone(), fc);
                continue;
            }
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (v, a) in vertex.0.iter_mut().zip(&anchor) {
                *v = a + SHRINK * (*v - a);
            }
            vertex.1 = eval(&vertex.0);
        }
    }

    let (point, value) = simplex.swap_remove(0);
    Outcome {
        point,
        value,
        iterations,
        converged,
    }
}
