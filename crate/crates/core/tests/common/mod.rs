//! Independent oracles shared by the integration suites. Nothing here calls
//! into the solver or the adjoint gradient.

#![allow(dead_code)]

use ampc::cftoc::{cost, CftocProblem, InputBounds, Weights};
use ampc::model::{Input, ProxyParams, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Central differences of the cost with respect to the flattened inputs.
pub fn finite_difference_gradient(prob: &CftocProblem, u: &[Input], h: f64) -> Vec<f64> {
    let mut z: Vec<f64> = u.iter().flat_map(|u| [u.thrust, u.moment]).collect();
    let eval = |z: &[f64]| {
        let seq: Vec<Input> = z.chunks(2).map(|c| Input::new(c[0], c[1])).collect();
        cost(prob, &seq).unwrap()
    };
    (0..z.len())
        .map(|i| {
            let orig = z[i];
            z[i] = orig + h;
            let plus = eval(&z);
            z[i] = orig - h;
            let minus = eval(&z);
            z[i] = orig;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

/// Exhaustive minimum of a two-step problem over a grid with `points` values
/// per input axis, spanning the box. Uses its own rollout and cost.
pub fn grid_minimum_two_step(prob: &CftocProblem, points: usize) -> (f64, [Input; 2]) {
    assert_eq!(prob.horizon, 2);
    let axis = |[lo, hi]: [f64; 2]| -> Vec<f64> {
        (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect()
    };
    let rs = axis(prob.bounds.thrust);
    let ms = axis(prob.bounds.moment);
    let th = prob.theta;
    let dt = prob.dt;
    let w = prob.weights;
    let step = |x: [f64; 5], r: f64, m: f64| -> [f64; 5] {
        [
            x[0] + x[3] * x[2].cos() * dt,
            x[1] + x[3] * x[2].sin() * dt,
            x[2] + x[4] * dt,
            th.alpha_v * x[3] + th.beta_v * r,
            th.alpha_w * x[4] + th.beta_w * m,
        ]
    };
    let reference = prob.x_ref.to_array();
    let err = |x: [f64; 5]| -> [f64; 5] {
        let mut e = [0.0; 5];
        for i in 0..5 {
            e[i] = x[i] - reference[i];
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        e[2] -= two_pi * (e[2] / two_pi).round();
        e
    };
    let quad = |wt: &[f64; 5], e: [f64; 5]| 0.5 * (0..5).map(|i| wt[i] * e[i] * e[i]).sum::<f64>();
    let x0 = prob.x0.to_array();

    let mut best = (f64::INFINITY, [Input::ZERO; 2]);
    for &r0 in &rs {
        for &m0 in &ms {
            let x1 = step(x0, r0, m0);
            let j1 = quad(&w.q, err(x1)) + 0.5 * (w.r[0] * r0 * r0 + w.r[1] * m0 * m0);
            for &r1 in &rs {
                for &m1 in &ms {
                    let x2 = step(x1, r1, m1);
                    let e2 = err(x2);
                    let j = j1
                        + quad(&w.q, e2)
                        + 0.5 * (w.r[0] * r1 * r1 + w.r[1] * m1 * m1)
                        + quad(&w.p, e2);
                    if j < best.0 {
                        best = (j, [Input::new(r0, m0), Input::new(r1, m1)]);
                    }
                }
            }
        }
    }
    best
}

/// Batch least squares with a Gaussian-style prior, solved from the 2x2
/// normal equations `(P0^-1 + sum phi phi') theta = P0^-1 theta0 + sum phi y`.
/// With `prior_gain = None` this is the plain least-squares solution.
pub fn batch_least_squares(data: &[([f64; 2], f64)], prior: Option<([f64; 2], f64)>) -> [f64; 2] {
    let (mut a, mut b) = ([[0.0; 2]; 2], [0.0; 2]);
    if let Some((theta0, gamma)) = prior {
        a[0][0] = 1.0 / gamma;
        a[1][1] = 1.0 / gamma;
        b = [theta0[0] / gamma, theta0[1] / gamma];
    }
    for (phi, y) in data {
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] += phi[i] * phi[j];
            }
            b[i] += phi[i] * y;
        }
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        (a[1][1] * b[0] - a[0][1] * b[1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ]
}

pub fn random_problem(rng: &mut ChaCha8Rng, horizon: usize) -> (CftocProblem, Vec<Input>) {
    let pi = std::f64::consts::PI;
    let state = |r: &mut ChaCha8Rng| {
        State::new(
            r.random_range(-2.0..2.0),
            r.random_range(-2.0..2.0),
            r.random_range(-pi..pi),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        )
    };
    let x0 = state(rng);
    let x_ref = state(rng);
    let mut weights = Weights::default();
    for w in weights
        .q
        .iter_mut()
        .chain(weights.r.iter_mut())
        .chain(weights.p.iter_mut())
    {
        *w = rng.random_range(0.1..2.0);
    }
    let theta = ProxyParams::new(
        rng.random_range(0.8..1.0),
        rng.random_range(0.01..0.6),
        rng.random_range(0.8..1.0),
        rng.random_range(0.01..0.6),
    );
    let prob = CftocProblem {
        x0,
        x_ref,
        horizon,
        weights,
        bounds: InputBounds::default(),
        theta,
        dt: rng.random_range(0.05..0.2),
    };
    let u = (0..horizon)
        .map(|_| Input::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
        .collect();
    (prob, u)
}

pub fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let scale: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    diff / scale.max(1e-12)
}
