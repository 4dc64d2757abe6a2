//! Derivative-free minimization.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Stop once every vertex is within this distance of the best one...
    pub tol_x: f64,
    /// ...and the function values span less than this.
    pub tol_f: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iter: 20_000, tol_x: 1e-9, tol_f: 1e-12, initial_step: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0`, restarting once from the optimum to guard
/// against premature collapse of the simplex.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    let first = run(&f, x0, opts);
    let second = run(&f, &first.x, opts);
    let iterations = first.iterations + second.iterations;
    if second.f <= first.f {
        NelderMeadResult { iterations, ..second }
    } else {
        NelderMeadResult { iterations, ..first }
    }
}

fn run<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult {
    let d = x0.len();
    if d == 0 {
        return NelderMeadResult { x: vec![], f: f(&[]), iterations: 0, converged: true };
    }
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut idx: Vec<usize> = (0..=d).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        values = idx.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter < opts.tol_x && (values[d] - values[0]).abs() < opts.tol_f {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|v| v[j]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[d]).map(|(c, w)| c + t * (w - c)).collect() };

        let reflected = along(-1.0);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
            continue;
        }
        if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[d] {
            let c = along(-0.5);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = along(0.5);
            let fc = eval(&c);
            (c, fc)
        };
        if fc < values[d].min(fr) {
            simplex[d] = contracted;
            values[d] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=d {
            simplex[i] = best.iter().zip(&simplex[i]).map(|(b, v)| b + 0.5 * (v - b)).collect();
            values[i] = eval(&simplex[i]);
        }
    }
    let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("non-empty simplex");
    NelderMeadResult { x: simplex[best].clone(), f: values[best], iterations, converged }
}

/// `samples` points in `[-half_width, half_width]^dim`, one per stratum in
/// every coordinate.
pub fn latin_hypercube(samples: usize, dim: usize, half_width: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; dim]; samples];
    for j in 0..dim {
        let mut strata: Vec<usize> = (0..samples).collect();
        strata.shuffle(&mut rng);
        for (i, s) in strata.into_iter().enumerate() {
            let u: f64 = rng.gen();
            points[i][j] = -half_width + 2.0 * half_width * (s as f64 + u) / samples as f64;
        }
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(f, &[-1.2, 1.0], &NelderMeadOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r);
    }

    #[test]
    fn quadratic_in_five_dimensions() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - i as f64).powi(2)).sum::<f64>();
        let r = minimize(f, &[0.0; 5], &NelderMeadOptions::default());
        for (i, v) in r.x.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn latin_hypercube_stratifies_each_coordinate() {
        let pts = latin_hypercube(16, 3, 4.0, 9);
        for j in 0..3 {
            let mut strata: Vec<usize> = pts.iter().map(|p| ((p[j] + 4.0) / 8.0 * 16.0).floor() as usize).collect();
            strata.sort();
            assert_eq!(strata, (0..16).collect::<Vec<_>>());
        }
        assert_eq!(pts, latin_hypercube(16, 3, 4.0, 9));
    }
}
