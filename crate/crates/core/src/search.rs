//! Numerical search for nonzero solutions of the Hopf equations on `(𝔽_q, +)`.
//!
//! The linear conditions `φ(0) = 0`, `φ(g) = φ(-g)`, `Σφ = 0` are built into
//! the parameterization `φ = B x` with `B` an orthonormal basis of the
//! feasible subspace, so `‖φ‖ = ‖x‖`. Levenberg–Marquardt then drives the
//! residuals
//!
//! ```text
//! F(g) = φ(g)² + (φ*φ)(g) - θ φ(g),   g ≠ 0 (one g per pair {g, -g}),
//! ‖x‖² - 1
//! ```
//!
//! to zero over `(x, θ)`. The `g = 0` equation holds identically on the
//! feasible subspace.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::sync::Arc;

use crate::characters::{additive_group, MultChar};
use crate::error::{Error, Result};
use crate::finite_field::FieldTable;
use crate::group_ring::{hopf_verify, phi_to_matrix, FinAbelianGroup, GroupFunction};
use crate::matrix::verify_basic;

/// Starts evaluated together before checking for a success.
const BATCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// One coordinate per pair `{g, -g}`.
    Direct,
    /// Real and imaginary parts of the even nontrivial multiplicative characters.
    CharacterBasis,
}

impl SearchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::Direct => "direct",
            SearchMode::CharacterBasis => "chars",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub q: u64,
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub residual_target: f64,
    pub mode: SearchMode,
    /// Character-basis mode only: keep just the characters of these orders.
    pub char_orders: Option<Vec<u64>>,
}

impl SearchConfig {
    pub fn new(q: u64) -> Self {
        Self {
            q,
            starts: 200,
            seed: 0,
            max_iters: 500,
            residual_target: 1e-10,
            mode: SearchMode::Direct,
            char_orders: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub q: u64,
    pub mode: SearchMode,
    pub best_phi: GroupFunction<f64>,
    pub best_theta: f64,
    /// Largest absolute residual of the Hopf equations at `best_phi`.
    pub residual: f64,
    pub succeeded: bool,
    /// Clusters of nearly equal values of `φ` on `𝔽_q^×`, by increasing value.
    pub distinct_value_histogram: Vec<(f64, usize)>,
    /// Index of the reported start plus one on success, all starts otherwise.
    pub starts_used: usize,
    pub hat_theta: f64,
}

impl SearchResult {
    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "mode": self.mode.as_str(),
            "succeeded": self.succeeded,
            "message": if self.succeeded { "solution found" } else { "no solution found" },
            "residual": self.residual,
            "theta": self.best_theta,
            "hat_theta": self.hat_theta,
            "starts_used": self.starts_used,
            "phi": self.best_phi.values(),
            "histogram": self
                .distinct_value_histogram
                .iter()
                .map(|(v, c)| json!({ "value": v, "count": c }))
                .collect::<Vec<_>>(),
        })
    }
}

/// Orthonormal columns spanning the symmetric, zero-sum functions vanishing at 0.
struct Basis {
    group: FinAbelianGroup,
    /// `q × d`.
    b: DMatrix<f64>,
    /// One element per pair `{g, -g}`, `g ≠ 0`.
    representatives: Vec<usize>,
}

fn pairs(group: &FinAbelianGroup) -> Vec<Vec<usize>> {
    let n = group.order();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for g in 1..n {
        if seen[g] {
            continue;
        }
        let h = group.neg(g);
        seen[g] = true;
        seen[h] = true;
        out.push(if h == g { vec![g] } else { vec![g, h] });
    }
    out
}

/// Modified Gram–Schmidt over the columns of `cols`, dropping dependent ones.
fn orthonormalize(cols: Vec<DVector<f64>>, against: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = against.to_vec();
    let fixed = basis.len();
    for mut v in cols {
        for _ in 0..2 {
            for u in &basis {
                let c = u.dot(&v);
                v -= u * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
    }
    basis.split_off(fixed)
}

fn direct_basis(group: FinAbelianGroup) -> Basis {
    let ps = pairs(&group);
    let m = ps.len();
    let weights = DVector::from_iterator(m, ps.iter().map(|p| (p.len() as f64).sqrt()));
    let unit = weights.normalize();
    let std: Vec<DVector<f64>> = (0..m).map(|j| DVector::from_fn(m, |i, _| (i == j) as u8 as f64)).collect();
    let q_cols = orthonormalize(std, &[unit]);
    let n = group.order();
    let mut b = DMatrix::zeros(n, q_cols.len());
    for (c, col) in q_cols.iter().enumerate() {
        for (j, p) in ps.iter().enumerate() {
            let v = col[j] / (p.len() as f64).sqrt();
            for &g in p {
                b[(g, c)] = v;
            }
        }
    }
    Basis {
        representatives: ps.iter().map(|p| p[0]).collect(),
        group,
        b,
    }
}

fn character_basis(field: &Arc<FieldTable>, orders: Option<&[u64]>) -> Basis {
    let group = additive_group(field);
    let minus_one = field.minus_one_index();
    let n = group.order();
    let scale = (2.0 / (n as f64 - 1.0)).sqrt();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for alpha in MultChar::all(field) {
        let even = alpha.exponent_at(minus_one) == Some(0);
        let wanted = orders.is_none_or(|o| o.contains(&alpha.order()));
        let conj_step = alpha.conj().exponent_step();
        if alpha.is_trivial() || !even || !wanted || conj_step < alpha.exponent_step() {
            continue;
        }
        let table = alpha.table();
        if conj_step == alpha.exponent_step() {
            cols.push(DVector::from_fn(n, |g, _| table[g].re / (n as f64 - 1.0).sqrt()));
        } else {
            cols.push(DVector::from_fn(n, |g, _| table[g].re * scale));
            cols.push(DVector::from_fn(n, |g, _| table[g].im * scale));
        }
    }
    let d = cols.len();
    let b = DMatrix::from_fn(n, d, |g, c| cols[c][g]);
    Basis {
        representatives: pairs(&group).iter().map(|p| p[0]).collect(),
        group,
        b,
    }
}

/// Residual vector and Jacobian at `(x, θ)`.
fn residuals(basis: &Basis, x: &DVector<f64>, theta: f64, with_jacobian: bool) -> (DVector<f64>, Option<DMatrix<f64>>) {
    let g = &basis.group;
    let n = g.order();
    let phi = &basis.b * x;
    let reps = &basis.representatives;
    let rows = reps.len() + 1;
    let mut r = DVector::zeros(rows);
    for (row, &a) in reps.iter().enumerate() {
        let mut conv = 0.0;
        for h in 0..n {
            conv += phi[h] * phi[g.sub(a, h)];
        }
        r[row] = phi[a] * phi[a] + conv - theta * phi[a];
    }
    r[reps.len()] = x.norm_squared() - 1.0;
    if !with_jacobian {
        return (r, None);
    }
    let d = x.len();
    // dF(a)/dφ(u) = 2φ(a)δ_{a,u} + 2φ(a-u) - θδ_{a,u}.
    let mut dphi = DMatrix::zeros(reps.len(), n);
    for (row, &a) in reps.iter().enumerate() {
        for u in 0..n {
            dphi[(row, u)] = 2.0 * phi[g.sub(a, u)];
        }
        dphi[(row, a)] += 2.0 * phi[a] - theta;
    }
    let jx = dphi * &basis.b;
    let mut jac = DMatrix::zeros(rows, d + 1);
    jac.view_mut((0, 0), (reps.len(), d)).copy_from(&jx);
    for (row, &a) in reps.iter().enumerate() {
        jac[(row, d)] = -phi[a];
    }
    for c in 0..d {
        jac[(reps.len(), c)] = 2.0 * x[c];
    }
    (r, Some(jac))
}

fn best_theta(basis: &Basis, x: &DVector<f64>) -> f64 {
    let (r0, _) = residuals(basis, x, 0.0, false);
    let phi = &basis.b * x;
    let (mut num, mut den) = (0.0, 0.0);
    for (row, &a) in basis.representatives.iter().enumerate() {
        num += r0[row] * phi[a];
        den += phi[a] * phi[a];
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// One Levenberg–Marquardt run; returns the final `(x, θ)`.
fn levenberg_marquardt(basis: &Basis, mut x: DVector<f64>, max_iters: usize, target: f64) -> (DVector<f64>, f64) {
    let mut theta = best_theta(basis, &x);
    let mut lambda = 1e-3;
    let d = x.len();
    let (mut r, mut jac) = residuals(basis, &x, theta, true);
    let mut cost = r.norm_squared();
    for _ in 0..max_iters {
        if r.amax() < target * 1e-2 {
            break;
        }
        let j = jac.as_ref().expect("jacobian requested");
        let jtj = j.transpose() * j;
        let g = j.transpose() * &r;
        let mut improved = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for i in 0..=d {
                a[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&g));
            let x_new = &x + step.rows(0, d);
            let theta_new = theta + step[d];
            let (r_new, _) = residuals(basis, &x_new, theta_new, false);
            let cost_new = r_new.norm_squared();
            if cost_new < cost {
                x = x_new;
                theta = theta_new;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
        let (r_next, jac_next) = residuals(basis, &x, theta, true);
        r = r_next;
        jac = jac_next;
        cost = r.norm_squared();
    }
    (x, theta)
}

struct Attempt {
    phi: GroupFunction<f64>,
    theta: f64,
    residual: f64,
    verified: bool,
    hat_theta: f64,
}

fn finish_start(basis: &Basis, x: &DVector<f64>, fitted_theta: f64, target: f64) -> Attempt {
    let g = &basis.group;
    let norm = x.norm();
    let raw = if norm > 0.0 { &basis.b * (x / norm) } else { &basis.b * x };
    let mut values: Vec<f64> = (0..g.order())
        .map(|a| 0.5 * (raw[a] + raw[g.neg(a)]))
        .collect();
    values[0] = 0.0;
    let phi = GroupFunction::new(g.clone(), values).expect("group-sized vector");
    let check = 10.0 * target;
    let rep = hopf_verify(&phi, check);
    let matrix_ok = phi_to_matrix(&phi)
        .and_then(|s| verify_basic(&s, check))
        .map(|r| r.is_solution)
        .unwrap_or(false);
    let nonzero = phi.norm_sq() > 0.5;
    Attempt {
        theta: rep.theta.unwrap_or(fitted_theta),
        residual: rep.max_residual,
        verified: rep.is_solution && matrix_ok && nonzero && rep.max_residual < target,
        hat_theta: rep.hat_theta,
        phi,
    }
}

fn validate(cfg: &SearchConfig) -> Result<Arc<FieldTable>> {
    if cfg.q < 4 {
        return Err(Error::InvalidParameter(format!("search needs q ≥ 4, got {}", cfg.q)));
    }
    let field = Arc::new(FieldTable::new(cfg.q)?);
    if cfg.starts == 0 {
        return Err(Error::InvalidParameter("at least one start is required".into()));
    }
    if !(cfg.residual_target > 0.0) {
        return Err(Error::InvalidParameter("residual target must be positive".into()));
    }
    Ok(field)
}

/// Clusters sorted values closer than `1e-6` and counts them.
pub fn value_histogram(values: &[f64]) -> Vec<(f64, usize)> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut anchor = f64::NAN;
    for x in v {
        match out.last_mut() {
            Some((_, c)) if (x - anchor).abs() <= 1e-6 => *c += 1,
            _ => {
                anchor = x;
                out.push((x, 1));
            }
        }
    }
    out
}

/// Multi-start search in the mode given by `cfg.mode`.
///
/// Starts are processed in fixed-size batches; the first verified start in
/// index order wins. Without a success the smallest residual is reported,
/// ties going to the lower start index.
pub fn search_hopf(cfg: &SearchConfig) -> Result<SearchResult> {
    let field = validate(cfg)?;
    let basis = match cfg.mode {
        SearchMode::Direct => direct_basis(additive_group(&field)),
        SearchMode::CharacterBasis => character_basis(&field, cfg.char_orders.as_deref()),
    };
    let d = basis.b.ncols();
    if d == 0 {
        return Err(Error::InvalidParameter(
            "no even nontrivial characters of the requested orders".into(),
        ));
    }
    log::info!(
        "search q = {} mode = {} dim = {d} starts = {} seed = {}",
        cfg.q,
        cfg.mode.as_str(),
        cfg.starts,
        cfg.seed
    );

    let run = |i: usize| -> Attempt {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        let x0 = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
        let x0 = if x0.norm() > 0.0 { x0.normalize() } else { x0 };
        let (x, theta) = levenberg_marquardt(&basis, x0, cfg.max_iters, cfg.residual_target);
        finish_start(&basis, &x, theta, cfg.residual_target)
    };

    let mut best: Option<(usize, Attempt)> = None;
    let mut winner = None;
    'batches: for batch in (0..cfg.starts).step_by(BATCH) {
        let end = (batch + BATCH).min(cfg.starts);
        let attempts: Vec<Attempt> = (batch..end).into_par_iter().map(run).collect();
        for (offset, a) in attempts.into_iter().enumerate() {
            let i = batch + offset;
            if a.verified {
                winner = Some((i, a));
                break 'batches;
            }
            let better = best
                .as_ref()
                .is_none_or(|(_, b)| a.residual < b.residual || b.residual.is_nan());
            if better {
                best = Some((i, a));
            }
        }
    }

    let (starts_used, attempt, succeeded) = match (winner, best) {
        (Some((i, a)), _) => (i + 1, a, true),
        (None, Some((_, a))) => (cfg.starts, a, false),
        (None, None) => unreachable!("validated configs run at least one start"),
    };
    log::info!(
        "search q = {}: {} after {starts_used} starts, residual {:e}",
        cfg.q,
        if succeeded { "solution found" } else { "no solution found" },
        attempt.residual
    );
    Ok(SearchResult {
        q: cfg.q,
        mode: cfg.mode,
        distinct_value_histogram: value_histogram(&attempt.phi.values()[1..]),
        best_theta: attempt.theta,
        residual: attempt.residual,
        succeeded,
        starts_used,
        hat_theta: attempt.hat_theta,
        best_phi: attempt.phi,
    })
}

/// [`search_hopf`] forced into character-basis mode.
pub fn search_character_basis(cfg: &SearchConfig) -> Result<SearchResult> {
    let mut cfg = cfg.clone();
    cfg.mode = SearchMode::CharacterBasis;
    search_hopf(&cfg)
}
