//! Independent reference implementations used as test oracles, plus the
//! drivers that compare library results against them. The oracles
//! themselves never call into the library's numerical code.
#![allow(dead_code)]

use std::cell::RefCell;

use ndarray::{Array1, Array2};
use sessc_core::clustering::{
    update_centers, update_cluster_labels, update_memberships, update_weights, ClusteringConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal))
}

/// Rows drawn uniformly then normalised; every entry is at least `floor`
/// before normalisation.
pub fn simplex_rows(rng: &mut ChaCha8Rng, rows: usize, cols: usize, floor: f64) -> Array2<f64> {
    let mut a = Array2::from_shape_fn((rows, cols), |_| floor + rng.random::<f64>());
    for mut r in a.rows_mut() {
        let s = r.sum();
        r /= s;
    }
    a
}

pub fn onehot(labels: &[usize], n_classes: usize) -> Array2<f64> {
    let mut y = Array2::zeros((labels.len(), n_classes));
    for (i, &c) in labels.iter().enumerate() {
        y[[i, c]] = 1.0;
    }
    y
}

pub fn column_means(x: &Array2<f64>) -> Array1<f64> {
    let n = x.nrows() as f64;
    Array1::from_shape_fn(x.ncols(), |d| x.column(d).sum() / n)
}

/// Full state of the clustering objective.
#[derive(Debug, Clone)]
pub struct State {
    pub x: Array2<f64>,
    pub y: Array2<f64>,
    pub u: Array2<f64>,
    pub v: Array2<f64>,
    pub w: Array2<f64>,
    pub z: Array2<f64>,
    pub v0: Array1<f64>,
    pub m: f64,
    pub gamma: f64,
    pub eta: f64,
    pub beta: f64,
}

/// The clustering objective written out term by term with plain loops:
///
/// `sum_{n,r} U^m sum_d W (x - v)^2 + gamma sum W ln W
///  - eta sum_r (sum_n U^m) sum_d W (v - v0)^2
///  + beta sum_{n,r} U^m (-sum_c Y ln Z)`.
pub fn objective(s: &State) -> f64 {
    let (n, d) = s.x.dim();
    let r = s.v.nrows();
    let c = s.y.ncols();
    let mut j = 0.0;
    for k in 0..r {
        let mut mass = 0.0;
        for i in 0..n {
            let um = s.u[[i, k]].powf(s.m);
            mass += um;
            let mut dist = 0.0;
            for f in 0..d {
                dist += s.w[[k, f]] * (s.x[[i, f]] - s.v[[k, f]]).powi(2);
            }
            let mut loss = 0.0;
            for l in 0..c {
                if s.y[[i, l]] != 0.0 {
                    loss -= s.y[[i, l]] * s.z[[k, l]].ln();
                }
            }
            j += um * dist + s.beta * um * loss;
        }
        let mut sep = 0.0;
        for f in 0..d {
            let w = s.w[[k, f]];
            if w > 0.0 {
                j += s.gamma * w * w.ln();
            }
            sep += w * (s.v[[k, f]] - s.v0[f]).powi(2);
        }
        j -= s.eta * mass * sep;
    }
    j
}

/// Central finite difference of `f` at `t`, with a step that never crosses
/// zero for positive `t`.
pub fn derivative(f: impl Fn(f64) -> f64, t: f64, step: f64) -> f64 {
    let h = if t > 0.0 { step.min(t / 4.0) } else { step };
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Minimises a separable convex function `sum_i phi_i(t_i)` over the
/// probability simplex, given only the derivatives `phi_i'`.
///
/// Solves the KKT conditions `phi_i'(t_i) = mu` (or `t_i = 0` when
/// `phi_i'(0+) >= mu`) by nested bisection: inner on each `t_i`, outer on
/// the multiplier `mu`. Entries below `1e-12` are reported as zero.
pub fn minimize_on_simplex(n: usize, grad: impl Fn(usize, f64) -> f64) -> Vec<f64> {
    let solve_one = |i: usize, mu: f64| -> f64 {
        if grad(i, 1e-12) >= mu {
            return 0.0;
        }
        if grad(i, 1.0) <= mu {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            if hi - lo < 1e-16 {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if grad(i, mid) < mu {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let total = |mu: f64| (0..n).map(|i| solve_one(i, mu)).sum::<f64>();
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while total(lo) > 1.0 {
        lo *= 2.0;
    }
    while total(hi) < 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo < 1e-14 * (1.0 + mid.abs()) {
            break;
        }
        if total(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    let mut t: Vec<f64> = (0..n).map(|i| solve_one(i, mu)).collect();
    let s: f64 = t.iter().sum();
    t.iter_mut().for_each(|v| *v /= s);
    t
}

/// Plain fuzzy c-means from fixed initial centers: alternate the membership
/// and center formulas until the centers move less than `tol` (max norm).
pub fn reference_fcm(
    x: &Array2<f64>,
    init: &Array2<f64>,
    m: f64,
    tol: f64,
    max_iter: usize,
) -> (Array2<f64>, Array2<f64>) {
    let (n, d) = x.dim();
    let r = init.nrows();
    let mut v = init.clone();
    let mut u = Array2::zeros((n, r));
    for _ in 0..max_iter {
        for i in 0..n {
            let dist: Vec<f64> = (0..r)
                .map(|k| (0..d).map(|f| (x[[i, f]] - v[[k, f]]).powi(2)).sum())
                .collect();
            for k in 0..r {
                let mut denom = 0.0;
                for l in 0..r {
                    denom += (dist[k] / dist[l]).powf(1.0 / (m - 1.0));
                }
                u[[i, k]] = 1.0 / denom;
            }
        }
        let mut next = Array2::<f64>::zeros((r, d));
        for k in 0..r {
            let mut mass = 0.0;
            for i in 0..n {
                let um = f64::powf(u[[i, k]], m);
                mass += um;
                for f in 0..d {
                    next[[k, f]] += um * x[[i, f]];
                }
            }
            for f in 0..d {
                next[[k, f]] /= mass;
            }
        }
        let shift = (&next - &v).iter().fold(0.0f64, |a, b: &f64| a.max(b.abs()));
        v = next;
        if shift < tol {
            break;
        }
    }
    (u, v)
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut aug = Array2::zeros((n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            aug[[i, j]] = a[[i, j]];
        }
        aug[[i, n + i]] = 1.0;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| aug[[p, col]].abs().total_cmp(&aug[[q, col]].abs()))
            .unwrap();
        for j in 0..2 * n {
            aug.swap([col, j], [pivot, j]);
        }
        let p = aug[[col, col]];
        for j in 0..2 * n {
            aug[[col, j]] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = aug[[i, col]];
                for j in 0..2 * n {
                    aug[[i, j]] -= f * aug[[col, j]];
                }
            }
        }
    }
    Array2::from_shape_fn((n, n), |(i, j)| aug[[i, n + j]])
}

/// `(X^T X + lambda I)^{-1} X^T Y` through an explicit inverse.
pub fn ridge_oracle(x: &Array2<f64>, y: &Array2<f64>, lambda: f64) -> Array2<f64> {
    let mut gram = x.t().dot(x);
    for i in 0..gram.nrows() {
        gram[[i, i]] += lambda;
    }
    inverse(&gram).dot(&x.t().dot(y))
}

pub fn max_abs_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b).fold(0.0f64, |acc, (p, q)| acc.max((p - q).abs()))
}

/// Membership dissimilarities `||x - v||_w^2 - eta ||v - v0||_w^2 - beta Y ln Z`.
pub fn dissimilarities(s: &State) -> Array2<f64> {
    let (n, d) = s.x.dim();
    let r = s.v.nrows();
    Array2::from_shape_fn((n, r), |(i, k)| {
        let mut out = 0.0;
        for f in 0..d {
            out += s.w[[k, f]] * (s.x[[i, f]] - s.v[[k, f]]).powi(2);
            out -= s.eta * s.w[[k, f]] * (s.v[[k, f]] - s.v0[f]).powi(2);
        }
        for l in 0..s.y.ncols() {
            if s.y[[i, l]] != 0.0 {
                out -= s.beta * s.y[[i, l]] * s.z[[k, l]].ln();
            }
        }
        out
    })
}

/// A random small instance (N <= 8, D <= 3, R <= 3, C <= 3) whose
/// membership dissimilarities are all positive.
pub fn random_state(seed: u64) -> State {
    let mut g = rng(seed);
    let m = [1.1, 2.0, 3.0][(seed % 3) as usize];
    loop {
        let n = g.random_range(3..=8);
        let d = g.random_range(1..=3);
        let r = g.random_range(2..=3);
        let c = g.random_range(2..=3);
        let x = normal_matrix(&mut g, n, d);
        let labels: Vec<usize> = (0..n).map(|i| if i < c { i } else { g.random_range(0..c) }).collect();
        let s = State {
            v0: column_means(&x),
            y: onehot(&labels, c),
            u: simplex_rows(&mut g, n, r, 0.05),
            v: normal_matrix(&mut g, r, d),
            w: simplex_rows(&mut g, r, d, 0.05),
            z: simplex_rows(&mut g, r, c, 0.05),
            x,
            m,
            gamma: g.random_range(0.5..5.0),
            eta: g.random_range(0.0..0.3),
            beta: g.random_range(0.1..2.0),
        };
        if dissimilarities(&s).iter().all(|&v| v > 1e-3) {
            return s;
        }
    }
}

pub fn sessc_config(s: &State) -> ClusteringConfig {
    ClusteringConfig::sessc(s.v.nrows(), s.m, s.gamma, s.eta, s.beta)
}

/// Largest deviation of each closed-form block update from the oracle.
#[derive(Debug, Clone, Copy)]
pub struct UpdateErrors {
    pub u: f64,
    /// Max-norm of the finite-difference gradient in V at the V update.
    pub v_grad: f64,
    pub w: f64,
    pub z: f64,
}

impl UpdateErrors {
    pub fn max(&self) -> f64 {
        self.u.max(self.v_grad).max(self.w).max(self.z)
    }
}

/// Row-wise simplex oracle for the block selected by `entry`.
fn block_oracle(
    s: &State,
    rows: usize,
    cols: usize,
    entry: fn(&mut State, usize, usize) -> &mut f64,
) -> Array2<f64> {
    let cell = RefCell::new(s.clone());
    let mut out = Array2::zeros((rows, cols));
    for i in 0..rows {
        let row = minimize_on_simplex(cols, |k, t| {
            let f = |tt: f64| {
                let mut st = cell.borrow_mut();
                *entry(&mut st, i, k) = tt;
                objective(&st)
            };
            derivative(f, t, 1e-5)
        });
        for (k, v) in row.into_iter().enumerate() {
            out[[i, k]] = v;
        }
    }
    out
}

pub fn update_errors(seed: u64) -> UpdateErrors {
    let s = random_state(seed);
    let cfg = sessc_config(&s);
    let (n, r, d, c) = (s.x.nrows(), s.v.nrows(), s.x.ncols(), s.y.ncols());

    let u = update_memberships(
        s.x.view(),
        s.y.view(),
        s.v.view(),
        s.w.view(),
        s.z.view(),
        s.v0.view(),
        &cfg,
    )
    .unwrap();
    let u_oracle = block_oracle(&s, n, r, |st, i, k| &mut st.u[[i, k]]);

    let v = update_centers(s.x.view(), s.u.view(), s.v0.view(), s.v.view(), &cfg);
    let mut at_v = s.clone();
    at_v.v = v;
    let cell = RefCell::new(at_v);
    let mut v_grad = 0.0f64;
    for k in 0..r {
        for f in 0..d {
            let base = cell.borrow().v[[k, f]];
            let h = 1e-5;
            let eval = |t: f64| {
                let mut st = cell.borrow_mut();
                st.v[[k, f]] = t;
                objective(&st)
            };
            let g = (eval(base + h) - eval(base - h)) / (2.0 * h);
            eval(base);
            v_grad = v_grad.max(g.abs());
        }
    }

    let w = update_weights(s.x.view(), s.u.view(), s.v.view(), s.v0.view(), &cfg).unwrap();
    let w_oracle = block_oracle(&s, r, d, |st, k, f| &mut st.w[[k, f]]);

    let z = update_cluster_labels(s.y.view(), s.u.view(), &cfg);
    let z_oracle = block_oracle(&s, r, c, |st, k, l| &mut st.z[[k, l]]);

    UpdateErrors {
        u: max_abs_diff(&u, &u_oracle),
        v_grad,
        w: max_abs_diff(&w, &w_oracle),
        z: max_abs_diff(&z, &z_oracle),
    }
}
