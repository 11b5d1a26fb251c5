//! Derivative-free minimization (Nelder–Mead simplex).

use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex.
    pub step: f64,
    /// Stop when the best value improved by less than this over `patience`
    /// iterations.
    pub min_improvement: f64,
    pub patience: usize,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            step: 0.5,
            min_improvement: 1e-9,
            patience: 50,
            max_iterations: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub evaluations: usize,
    /// False when the iteration cap was hit before the stall criterion.
    pub converged: bool,
}

/// Minimizes `f` from `x0` with the standard reflection/expansion/
/// contraction/shrink coefficients `(1, 2, 1/2, 1/2)`.
pub fn nelder_mead<T: Real>(f: impl Fn(&[T]) -> T, x0: &[T], opts: &NelderMeadOptions) -> Minimum<T> {
    let dim = x0.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[T]| {
        evaluations += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            T::max_value().expect("bounded scalar")
        }
    };
    if dim == 0 {
        let value = eval(x0);
        return Minimum {
            x: Vec::new(),
            value,
            iterations: 0,
            evaluations,
            converged: true,
        };
    }
    let step = lit::<T>(opts.step);
    let mut simplex: Vec<Vec<T>> = vec![x0.to_vec()];
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<T> = simplex.iter().map(|v| eval(v)).collect();
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let mut history: Vec<T> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        history.push(values[0]);
        if history.len() > opts.patience {
            let old = history[history.len() - 1 - opts.patience];
            if old - values[0] < lit::<T>(opts.min_improvement) {
                converged = true;
                break;
            }
        }

        let centroid: Vec<T> = (0..dim)
            .map(|k| simplex[..dim].iter().fold(T::zero(), |s, v| s + v[k]) / lit::<T>(dim as f64))
            .collect();
        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&simplex[dim])
                .map(|(&c, &w)| c + t * (c - w))
                .collect()
        };
        let xr = along(T::one());
        let fr = eval(&xr);
        if fr < values[0] {
            let xe = along(two);
            let fe = eval(&xe);
            if fe < fr {
                simplex[dim] = xe;
                values[dim] = fe;
            } else {
                simplex[dim] = xr;
                values[dim] = fr;
            }
            continue;
        }
        if fr < values[dim - 1] {
            simplex[dim] = xr;
            values[dim] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[dim] {
            let x = along(half);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(-half);
            let v = eval(&x);
            (x, v)
        };
        if fc < values[dim].min(fr) {
            simplex[dim] = xc;
            values[dim] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=dim {
            simplex[i] = best.iter().zip(&simplex[i]).map(|(&b, &v)| b + half * (v - b)).collect();
            values[i] = eval(&simplex[i]);
        }
    }
    let (ibest, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("non-empty simplex");
    Minimum {
        x: simplex[ibest].clone(),
        value: values[ibest],
        iterations,
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            min_improvement: 1e-14,
            patience: 200,
            ..Default::default()
        };
        let m = nelder_mead(f, &[-1.2, 1.0], &opts);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
    }

    #[test]
    fn nonsmooth_max() {
        let f = |x: &[f64]| (x[0] - 1.0).abs().max((x[1] + 2.0).abs()) + 0.5;
        let m = nelder_mead(f, &[0.0, 0.0], &NelderMeadOptions::default());
        assert!((m.value - 0.5).abs() < 1e-6, "{}", m.value);
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| x[0].abs();
        let m = nelder_mead(f, &[0.0], &NelderMeadOptions::default());
        assert_eq!(m.value, 0.0);
    }
}
