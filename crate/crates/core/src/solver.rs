//! P1 finite-element solver for the anisotropic p-torsion problem
//! `-div(F^{p-1}(grad u) F_xi(grad u)) = 1`, `u = 0` on the boundary,
//! by direct minimization of the regularized energy
//! `J(u) = Int F_delta(grad u)^p / p - Int u` with
//! `F_delta(g) = sqrt(F(g)^2 + delta^2)`.
//!
//! The energy is convex, so damped Newton with an Armijo line search
//! converges globally; continuation in p handles exponents far from 2.

use serde::Serialize;

use crate::anisotropy::{Norm, NormKind};
use crate::error::{Error, Result};
use crate::geom::{self, Mat2, Vec2};
use crate::mesh::Mesh;

#[derive(Debug, Clone)]
pub struct SolverOpts {
    /// relative first-order optimality target
    pub tol: f64,
    /// regularization delta as a fraction of the gradient scale
    pub delta_rel: f64,
    /// absolute delta override
    pub delta_abs: Option<f64>,
    /// Newton iteration budget per continuation step
    pub max_iters: usize,
    /// walk the exponent from 2 to p in steps of 0.5 in 1/(p-1)
    pub continuation: bool,
}

impl Default for SolverOpts {
    fn default() -> Self {
        SolverOpts {
            tol: 1e-9,
            delta_rel: 1e-8,
            delta_abs: None,
            max_iters: 200,
            continuation: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub newton_iters: usize,
    pub continuation_steps: usize,
    pub final_energy: f64,
    /// max over interior nodes of |dJ/du_i| / m_i
    pub optimality: f64,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct TorsionSolution {
    pub mesh: Mesh,
    pub norm_name: String,
    pub p: f64,
    /// dual exponent p/(p-1)
    pub q: f64,
    /// nodal values, zero on boundary nodes
    pub u: Vec<f64>,
    /// Int u
    pub t_from_u: f64,
    /// Int F(grad u)^p
    pub t_from_grad: f64,
    /// max nodal value
    pub m: f64,
    /// best Sobolev constant T^{p-1}
    pub sigma: f64,
    pub diagnostics: Diagnostics,
}

// ---------------------------------------------------------------------------
// sparse linear algebra: CSR, incomplete Cholesky, preconditioned CG

pub(crate) struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl Csr {
    fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Csr {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = 0.0;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                col.push(c);
                val.push(v);
            }
            row_ptr.push(col.len());
        }
        Csr { n, row_ptr, col, val }
    }

    fn mul(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.val[k] * x[self.col[k]];
            }
            y[i] = s;
        }
    }

    fn diag(&self, i: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col[k] == i {
                return self.val[k];
            }
        }
        0.0
    }
}

/// Zero-fill incomplete Cholesky factor, lower triangular including the
/// diagonal, on the sparsity pattern of `a`. `shift` scales the diagonal
/// by (1 + shift) to recover from breakdown.
struct Ic0 {
    row_ptr: Vec<usize>,
    col: Vec<usize>,
    val: Vec<f64>,
}

impl Ic0 {
    fn factor(a: &Csr, shift: f64) -> Option<Ic0> {
        let n = a.n;
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                if a.col[k] <= i {
                    col.push(a.col[k]);
                    let mut v = a.val[k];
                    if a.col[k] == i {
                        v *= 1.0 + shift;
                    }
                    val.push(v);
                }
            }
            row_ptr.push(col.len());
        }
        // left-looking factorization restricted to the pattern
        for i in 0..n {
            let (ri0, ri1) = (row_ptr[i], row_ptr[i + 1]);
            for kk in ri0..ri1 {
                let j = col[kk];
                // dot of rows i and j over columns < j
                let mut s = val[kk];
                let (rj0, rj1) = (row_ptr[j], row_ptr[j + 1]);
                let (mut a_ptr, mut b_ptr) = (ri0, rj0);
                while a_ptr < kk && b_ptr < rj1 && col[b_ptr] < j {
                    match col[a_ptr].cmp(&col[b_ptr]) {
                        std::cmp::Ordering::Less => a_ptr += 1,
                        std::cmp::Ordering::Greater => b_ptr += 1,
                        std::cmp::Ordering::Equal => {
                            s -= val[a_ptr] * val[b_ptr];
                            a_ptr += 1;
                            b_ptr += 1;
                        }
                    }
                }
                if j == i {
                    if s <= 0.0 {
                        return None;
                    }
                    val[kk] = s.sqrt();
                } else {
                    let djj = val[rj1 - 1]; // diagonal is the last entry of row j
                    val[kk] = s / djj;
                }
            }
        }
        Some(Ic0 { row_ptr, col, val })
    }

    /// Solves L L^T z = r.
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let n = self.row_ptr.len() - 1;
        z.copy_from_slice(r);
        for i in 0..n {
            let (r0, r1) = (self.row_ptr[i], self.row_ptr[i + 1]);
            let mut s = z[i];
            for k in r0..r1 - 1 {
                s -= self.val[k] * z[self.col[k]];
            }
            z[i] = s / self.val[r1 - 1];
        }
        for i in (0..n).rev() {
            let (r0, r1) = (self.row_ptr[i], self.row_ptr[i + 1]);
            z[i] /= self.val[r1 - 1];
            let zi = z[i];
            for k in r0..r1 - 1 {
                z[self.col[k]] -= self.val[k] * zi;
            }
        }
    }
}

/// Preconditioned conjugate gradients; returns the iteration count.
fn pcg(a: &Csr, b: &[f64], x: &mut [f64], rel_tol: f64, max_iters: usize) -> Result<usize> {
    let n = a.n;
    let ic = {
        let mut shift = 0.0;
        loop {
            if let Some(f) = Ic0::factor(a, shift) {
                break f;
            }
            shift = if shift == 0.0 { 1e-8 } else { shift * 100.0 };
            if shift > 1.0 {
                return Err(Error::NoConvergence(
                    "incomplete Cholesky breakdown".into(),
                ));
            }
        }
    };
    let mut r = vec![0.0; n];
    a.mul(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut z = vec![0.0; n];
    ic.apply(&r, &mut z);
    let mut p: Vec<f64> = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; n];
    for it in 0..max_iters {
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= rel_tol * b_norm {
            return Ok(it);
        }
        a.mul(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::NoConvergence("CG lost positive definiteness".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        ic.apply(&r, &mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence(format!(
        "CG stalled after {max_iters} iterations"
    )))
}

// ---------------------------------------------------------------------------
// P1 finite-element space

pub(crate) struct FemSpace {
    /// gradients of the three barycentric basis functions per triangle
    pub grads: Vec<[Vec2; 3]>,
    pub areas: Vec<f64>,
    /// lumped mass: sum of adjacent triangle areas / 3
    pub mass: Vec<f64>,
    /// interior node index for each mesh node, or usize::MAX on the boundary
    pub dof: Vec<usize>,
    /// mesh node of each interior dof
    pub nodes_of_dof: Vec<usize>,
}

impl FemSpace {
    pub fn new(mesh: &Mesh) -> FemSpace {
        let nt = mesh.tri_count();
        let nn = mesh.node_count();
        let mut grads = Vec::with_capacity(nt);
        let mut areas = Vec::with_capacity(nt);
        let mut mass = vec![0.0; nn];
        for t in 0..nt {
            let [i, j, k] = mesh.triangles[t];
            let (a, b, c) = (mesh.nodes[i], mesh.nodes[j], mesh.nodes[k]);
            let area = mesh.tri_area(t);
            let inv = 1.0 / (2.0 * area);
            grads.push([
                [(b[1] - c[1]) * inv, (c[0] - b[0]) * inv],
                [(c[1] - a[1]) * inv, (a[0] - c[0]) * inv],
                [(a[1] - b[1]) * inv, (b[0] - a[0]) * inv],
            ]);
            areas.push(area);
            for v in [i, j, k] {
                mass[v] += area / 3.0;
            }
        }
        let mut dof = vec![usize::MAX; nn];
        let mut nodes_of_dof = Vec::new();
        for i in 0..nn {
            if !mesh.boundary[i] {
                dof[i] = nodes_of_dof.len();
                nodes_of_dof.push(i);
            }
        }
        FemSpace {
            grads,
            areas,
            mass,
            dof,
            nodes_of_dof,
        }
    }

    pub fn gradient(&self, mesh: &Mesh, u: &[f64], t: usize) -> Vec2 {
        let [i, j, k] = mesh.triangles[t];
        let g = &self.grads[t];
        [
            u[i] * g[0][0] + u[j] * g[1][0] + u[k] * g[2][0],
            u[i] * g[0][1] + u[j] * g[1][1] + u[k] * g[2][1],
        ]
    }
}

/// Gradient of the P1 interpolant of `u` on triangle `t`.
pub fn p1_gradient(mesh: &Mesh, u: &[f64], t: usize) -> Vec2 {
    let [i, j, k] = mesh.triangles[t];
    let (a, b, c) = (mesh.nodes[i], mesh.nodes[j], mesh.nodes[k]);
    let inv = 1.0 / (2.0 * mesh.tri_area(t));
    [
        (u[i] * (b[1] - c[1]) + u[j] * (c[1] - a[1]) + u[k] * (a[1] - b[1])) * inv,
        (u[i] * (c[0] - b[0]) + u[j] * (a[0] - c[0]) + u[k] * (b[0] - a[0])) * inv,
    ]
}

// ---------------------------------------------------------------------------
// regularized integrand G(g) = F_delta(g)^p / p

fn g_value(norm: &Norm, p: f64, delta: f64, g: Vec2) -> f64 {
    let f = norm.eval(g);
    (f * f + delta * delta).sqrt().powf(p) / p
}

fn g_grad(norm: &Norm, p: f64, delta: f64, g: Vec2) -> Vec2 {
    let f = norm.eval(g);
    if f < 1e-300 {
        return [0.0, 0.0];
    }
    let fd = (f * f + delta * delta).sqrt();
    geom::scale(norm.grad_raw(g), fd.powf(p - 2.0) * f)
}

fn g_hess(norm: &Norm, p: f64, delta: f64, g: Vec2) -> Mat2 {
    let f = norm.eval(g);
    let fd = (f * f + delta * delta).sqrt();
    if f < 1e-300 {
        // exact value is direction dependent at g = 0; any SPD surrogate keeps
        // Newton well defined there
        let c = fd.powf(p - 2.0) * norm.a_lower() * norm.a_lower();
        return [[c, 0.0], [0.0, c]];
    }
    let df = norm.grad_raw(g);
    let hf = norm.hess_raw(g);
    let c1 = (p - 1.0) * fd.powf(p - 2.0) * (f / fd) * (f / fd)
        + fd.powf(p - 1.0) * delta * delta / (fd * fd * fd);
    let c2 = fd.powf(p - 1.0) * (f / fd);
    let mut h = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] = c1 * df[i] * df[j] + c2 * hf[i][j];
        }
    }
    h
}

/// Quadratic form matching the norm at p = 2: `F(g)^2 ~ g^T Q g` exactly for
/// euclidean/quadratic kinds, and with the same axis values for weighted-lr.
fn surrogate_q(norm: &Norm) -> Mat2 {
    match norm.kind() {
        NormKind::Euclidean => [[1.0, 0.0], [0.0, 1.0]],
        NormKind::Quadratic { q } => *q,
        NormKind::WeightedLr { r, w } => [
            [w[0].powf(2.0 / r), 0.0],
            [0.0, w[1].powf(2.0 / r)],
        ],
        NormKind::Rotated { base, rot } => {
            let qb = surrogate_q(base);
            geom::mat_mul(&geom::mat_transpose(rot), &geom::mat_mul(&qb, rot))
        }
    }
}

// ---------------------------------------------------------------------------

struct EnergyEval {
    value: f64,
    /// gradient over interior dofs
    grad: Vec<f64>,
    /// max |grad_i| / m_i
    optimality: f64,
}

fn eval_energy(
    mesh: &Mesh,
    fem: &FemSpace,
    norm: &Norm,
    p: f64,
    delta: f64,
    u: &[f64],
    with_grad: bool,
) -> EnergyEval {
    let mut value = 0.0;
    let mut grad = vec![0.0; fem.nodes_of_dof.len()];
    for t in 0..mesh.tri_count() {
        let g = fem.gradient(mesh, u, t);
        let a = fem.areas[t];
        value += a * g_value(norm, p, delta, g);
        if with_grad {
            let dg = g_grad(norm, p, delta, g);
            let [i, j, k] = mesh.triangles[t];
            for (loc, v) in [i, j, k].into_iter().enumerate() {
                let d = fem.dof[v];
                if d != usize::MAX {
                    grad[d] += a * geom::dot(dg, fem.grads[t][loc]);
                }
            }
        }
    }
    let mut optimality = 0.0f64;
    for (d, &v) in fem.nodes_of_dof.iter().enumerate() {
        value -= fem.mass[v] * u[v];
        if with_grad {
            grad[d] -= fem.mass[v];
            optimality = optimality.max(grad[d].abs() / fem.mass[v]);
        }
    }
    EnergyEval {
        value,
        grad,
        optimality,
    }
}

fn assemble_hessian(
    mesh: &Mesh,
    fem: &FemSpace,
    norm: &Norm,
    p: f64,
    delta: f64,
    u: &[f64],
) -> Csr {
    let n = fem.nodes_of_dof.len();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(8); n];
    for t in 0..mesh.tri_count() {
        let g = fem.gradient(mesh, u, t);
        let h = g_hess(norm, p, delta, g);
        let a = fem.areas[t];
        let tri = mesh.triangles[t];
        for li in 0..3 {
            let di = fem.dof[tri[li]];
            if di == usize::MAX {
                continue;
            }
            let hgi = geom::mat_vec(&h, fem.grads[t][li]);
            for lj in 0..3 {
                let dj = fem.dof[tri[lj]];
                if dj == usize::MAX {
                    continue;
                }
                rows[di].push((dj, a * geom::dot(hgi, fem.grads[t][lj])));
            }
        }
    }
    Csr::from_rows(rows)
}

/// One linear solve of the quadratic surrogate problem; used as the initial
/// Newton iterate (exact discrete solution when p = 2 and the norm is
/// euclidean or quadratic).
fn initial_iterate(mesh: &Mesh, fem: &FemSpace, norm: &Norm) -> Result<Vec<f64>> {
    let q = surrogate_q(norm);
    let n = fem.nodes_of_dof.len();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::with_capacity(8); n];
    for t in 0..mesh.tri_count() {
        let a = fem.areas[t];
        let tri = mesh.triangles[t];
        for li in 0..3 {
            let di = fem.dof[tri[li]];
            if di == usize::MAX {
                continue;
            }
            let qgi = geom::mat_vec(&q, fem.grads[t][li]);
            for lj in 0..3 {
                let dj = fem.dof[tri[lj]];
                if dj == usize::MAX {
                    continue;
                }
                rows[di].push((dj, a * geom::dot(qgi, fem.grads[t][lj])));
            }
        }
    }
    let k = Csr::from_rows(rows);
    let b: Vec<f64> = fem.nodes_of_dof.iter().map(|&v| fem.mass[v]).collect();
    let mut x = vec![0.0; n];
    pcg(&k, &b, &mut x, 1e-12, 20 * n + 200)?;
    let mut u = vec![0.0; mesh.node_count()];
    for (d, &v) in fem.nodes_of_dof.iter().enumerate() {
        u[v] = x[d];
    }
    Ok(u)
}

fn newton(
    mesh: &Mesh,
    fem: &FemSpace,
    norm: &Norm,
    p: f64,
    delta: f64,
    tol: f64,
    max_iters: usize,
    u: &mut Vec<f64>,
) -> Result<(usize, f64, f64)> {
    let n = fem.nodes_of_dof.len();
    let mut trial = u.clone();
    for it in 0..max_iters {
        let e = eval_energy(mesh, fem, norm, p, delta, u, true);
        if std::env::var("TORSION_DEBUG").is_ok() {
            eprintln!("newton p={p} delta={delta:.3e} it={it} J={:.12e} opt={:.3e}", e.value, e.optimality);
        }
        if e.optimality <= tol {
            return Ok((it, e.value, e.optimality));
        }
        let h = assemble_hessian(mesh, fem, norm, p, delta, u);
        let mut d = vec![0.0; n];
        let rhs: Vec<f64> = e.grad.iter().map(|v| -v).collect();
        // an inexact Newton direction is fine as long as it is a descent
        // direction, so CG stalls are tolerated
        let cg = pcg(&h, &rhs, &mut d, 1e-8, 10 * n + 200);
        if std::env::var("TORSION_DEBUG").is_ok() {
            let dn = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            eprintln!("  cg={:?} |d|={dn:.3e}", cg.map_err(|e| e.to_string()));
        }
        let mut descent_dot: f64 = e.grad.iter().zip(&d).map(|(a, b)| a * b).sum();
        if !(descent_dot < 0.0) {
            // steepest descent fallback, scaled by the inverse diagonal
            for i in 0..n {
                let dia = h.diag(i).max(1e-300);
                d[i] = rhs[i] / dia;
            }
            descent_dot = e.grad.iter().zip(&d).map(|(a, b)| a * b).sum();
        }
        // Armijo backtracking; once the predicted decrease falls below the
        // rounding floor of the energy the comparison is meaningless, so the
        // last digits are driven by gradient-norm decrease instead
        let noise = 64.0 * f64::EPSILON * (e.value.abs() + 1.0);
        let grad_mode = -descent_dot <= noise;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            trial.copy_from_slice(u);
            for (dd, &v) in fem.nodes_of_dof.iter().enumerate() {
                trial[v] += step * d[dd];
            }
            let et = eval_energy(mesh, fem, norm, p, delta, &trial, grad_mode);
            let ok = if grad_mode {
                et.optimality < e.optimality
            } else {
                et.value <= e.value + 1e-4 * step * descent_dot
            };
            if ok {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence(format!(
                "line search failed at iteration {it}, optimality {:.3e}",
                e.optimality
            )));
        }
        std::mem::swap(u, &mut trial);
    }
    let e = eval_energy(mesh, fem, norm, p, delta, u, true);
    if e.optimality <= tol {
        return Ok((max_iters, e.value, e.optimality));
    }
    Err(Error::NoConvergence(format!(
        "Newton budget of {max_iters} exhausted, optimality {:.3e}",
        e.optimality
    )))
}

pub fn solve_torsion(
    mesh: &Mesh,
    norm: &Norm,
    p: f64,
    opts: &SolverOpts,
) -> Result<TorsionSolution> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::BadParameter(format!(
            "torsion exponent must be in (1,inf), got {p}"
        )));
    }
    if norm.dim() != 2 {
        return Err(Error::UnsupportedDimension(norm.dim()));
    }
    if let NormKind::WeightedLr { r, .. } = flat_kind(norm) {
        if *r < 2.0 {
            return Err(Error::BadParameter(format!(
                "weighted-lr norms need r >= 2 for a bounded Hessian, got r={r}"
            )));
        }
    }
    let fem = FemSpace::new(mesh);
    if fem.nodes_of_dof.is_empty() {
        return Err(Error::DegenerateInput("mesh has no interior nodes".into()));
    }

    let mut u = initial_iterate(mesh, &fem, norm)?;

    // delta from the gradient scale of the p=2 surrogate solution
    let gscale = (0..mesh.tri_count())
        .map(|t| norm.eval(fem.gradient(mesh, &u, t)))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let delta = opts.delta_abs.unwrap_or(opts.delta_rel * gscale);

    // continuation in s = 1/(p-1), from the p=2 start at s=1
    let s_target = 1.0 / (p - 1.0);
    let mut path = Vec::new();
    if opts.continuation {
        let mut s = 1.0;
        let dir = if s_target > s { 1.0 } else { -1.0 };
        while (s_target - s) * dir > 0.5 {
            s += 0.5 * dir;
            path.push(1.0 + 1.0 / s);
        }
    }
    path.push(p);

    let mut iters = 0usize;
    let mut energy = 0.0;
    let mut optimality = 0.0;
    let mut steps = path.len();
    // for p < 2 the Hessian scales like delta^{p-2} where the gradient
    // degenerates, so walk the exponent at a milder delta first and then
    // sharpen delta at the final p
    let delta_start = if p < 2.0 {
        (1e-4 * gscale).max(delta)
    } else {
        delta
    };
    let loose = opts.tol.max(1e-7);
    let n_path = path.len();
    for (k, pk) in path.into_iter().enumerate() {
        let last = k + 1 == n_path && delta_start == delta;
        let tol_k = if last { opts.tol } else { loose };
        let (it, en, op) =
            newton(mesh, &fem, norm, pk, delta_start, tol_k, opts.max_iters, &mut u)?;
        iters += it;
        energy = en;
        optimality = op;
    }
    let mut dcur = delta_start;
    while dcur > delta * (1.0 + 1e-9) {
        dcur = (0.1 * dcur).max(delta);
        let tol_k = if dcur <= delta * (1.0 + 1e-9) { opts.tol } else { loose };
        let (it, en, op) = newton(mesh, &fem, norm, p, dcur, tol_k, opts.max_iters, &mut u)?;
        iters += it;
        energy = en;
        optimality = op;
        steps += 1;
    }

    let t_from_u: f64 = fem
        .nodes_of_dof
        .iter()
        .map(|&v| fem.mass[v] * u[v])
        .sum();
    let t_from_grad: f64 = (0..mesh.tri_count())
        .map(|t| fem.areas[t] * norm.eval(fem.gradient(mesh, &u, t)).powf(p))
        .sum();
    let m = u.iter().cloned().fold(0.0f64, f64::max);
    Ok(TorsionSolution {
        mesh: mesh.clone(),
        norm_name: norm.name().to_string(),
        p,
        q: p / (p - 1.0),
        u,
        t_from_u,
        t_from_grad,
        m,
        sigma: t_from_u.powf(p - 1.0),
        diagnostics: Diagnostics {
            newton_iters: iters,
            continuation_steps: steps,
            final_energy: energy,
            optimality,
            delta,
        },
    })
}

fn flat_kind(norm: &Norm) -> &NormKind {
    match norm.kind() {
        NormKind::Rotated { base, .. } => flat_kind(base),
        k => k,
    }
}

/// Exact torsion function of the Wulff shape W_R centered at the origin:
/// `u_W(x) = (R^q - F°(x)^q) / (q N^{q-1})`.
pub fn exact_wulff_solution(norm: &Norm, r: f64, p: f64, x: Vec2) -> Result<f64> {
    if !(p > 1.0) || !(r > 0.0) {
        return Err(Error::BadParameter(format!(
            "wulff solution needs p > 1 and R > 0, got p={p}, R={r}"
        )));
    }
    let n = norm.dim() as f64;
    let q = p / (p - 1.0);
    let fo = norm.polar().eval(x);
    if fo > r * (1.0 + 1e-12) {
        return Err(Error::OutsideBody);
    }
    Ok((r.powf(q) - fo.min(r).powf(q)) / (q * n.powf(q - 1.0)))
}

/// Exact rigidity of the Wulff shape: `T_p(W_R) = |W_R| R^q / (N^{q-1}(N+q))`.
pub fn exact_wulff_rigidity(norm: &Norm, r: f64, p: f64, wulff_area: f64) -> Result<f64> {
    if !(p > 1.0) || !(r > 0.0) || !(wulff_area > 0.0) {
        return Err(Error::BadParameter(format!(
            "wulff rigidity needs p > 1, R > 0 and positive area, got p={p}, R={r}, |W|={wulff_area}"
        )));
    }
    let n = norm.dim() as f64;
    let q = p / (p - 1.0);
    Ok(wulff_area * r.powf(q) / (n.powf(q - 1.0) * (n + q)))
}

/// Rayleigh-quotient lower bound `[(Int |psi|)^p / Int F(grad psi)^p]^{1/(p-1)}`
/// for T_p. Boundary nodal values are forced to zero so the test function is
/// admissible; the torsion solution maximizes this quotient.
pub fn rayleigh_lower_bound(mesh: &Mesh, norm: &Norm, p: f64, psi: &[f64]) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::BadParameter(format!("need p > 1, got {p}")));
    }
    if psi.len() != mesh.node_count() {
        return Err(Error::BadParameter(
            "test function length must match the node count".into(),
        ));
    }
    let v: Vec<f64> = psi
        .iter()
        .zip(&mesh.boundary)
        .map(|(x, b)| if *b { 0.0 } else { *x })
        .collect();
    let fem = FemSpace::new(mesh);
    let num: f64 = (0..mesh.node_count()).map(|i| fem.mass[i] * v[i].abs()).sum();
    let den: f64 = (0..mesh.tri_count())
        .map(|t| fem.areas[t] * norm.eval(fem.gradient(mesh, &v, t)).powf(p))
        .sum();
    if num <= 0.0 || den <= 0.0 {
        return Err(Error::DegenerateInput(
            "test function vanishes or has zero gradient energy".into(),
        ));
    }
    Ok((num.powf(p) / den).powf(1.0 / (p - 1.0)))
}

/// Weak-form residual of the regularized flux: max over interior hat
/// functions of |Int F_d^{p-2} F <F_xi(grad u), grad phi_i> - Int phi_i|
/// normalized by Int phi_i.
pub fn residual_check(sol: &TorsionSolution, norm: &Norm) -> f64 {
    let mesh = &sol.mesh;
    let fem = FemSpace::new(mesh);
    let delta = sol.diagnostics.delta;
    let mut r = vec![0.0; fem.nodes_of_dof.len()];
    for t in 0..mesh.tri_count() {
        let g = fem.gradient(mesh, &sol.u, t);
        let flux = g_grad(norm, sol.p, delta, g);
        let tri = mesh.triangles[t];
        for loc in 0..3 {
            let d = fem.dof[tri[loc]];
            if d != usize::MAX {
                r[d] += fem.areas[t] * geom::dot(flux, fem.grads[t][loc]);
            }
        }
    }
    let mut worst = 0.0f64;
    for (d, &v) in fem.nodes_of_dof.iter().enumerate() {
        worst = worst.max((r[d] - fem.mass[v]).abs() / fem.mass[v]);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::{rotate_norm, wulff_shape, Norm};
    use crate::convex::ConvexBody;
    use crate::mesh::triangulate;

    fn disk_mesh(h: f64) -> Mesh {
        let w = wulff_shape(&Norm::euclidean(), 1.0, [0.0, 0.0], 720).unwrap();
        triangulate(&w, h).unwrap()
    }

    #[test]
    fn disk_p2_matches_closed_form() {
        let mesh = disk_mesh(0.03);
        let norm = Norm::euclidean();
        let sol = solve_torsion(&mesh, &norm, 2.0, &SolverOpts::default()).unwrap();
        let t_exact = std::f64::consts::PI / 8.0;
        assert!(
            (sol.t_from_u - t_exact).abs() < 0.01 * t_exact,
            "T = {}, exact {}",
            sol.t_from_u,
            t_exact
        );
        assert!((sol.m - 0.25).abs() < 0.01 * 0.25, "M = {}", sol.m);
        assert!((sol.t_from_u - sol.t_from_grad).abs() <= 0.02 * sol.t_from_u);
        // conforming discretization: the discrete rigidity is a lower bound
        assert!(sol.t_from_u <= t_exact);
        // nonnegativity and boundary conditions
        for (i, &v) in sol.u.iter().enumerate() {
            assert!(v >= -1e-10);
            if mesh.boundary[i] {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn quadratic_wulff_p3_matches_closed_form() {
        let q = Norm::quadratic([[1.0, 0.0], [0.0, 4.0]]).unwrap();
        let w = wulff_shape(&q, 1.0, [0.0, 0.0], 720).unwrap();
        let mesh = triangulate(&w, 0.04).unwrap();
        let sol = solve_torsion(&mesh, &q, 3.0, &SolverOpts::default()).unwrap();
        let t_exact = exact_wulff_rigidity(&q, 1.0, 3.0, w.area()).unwrap();
        assert!(
            (sol.t_from_u - t_exact).abs() < 0.02 * t_exact,
            "T = {}, exact {}",
            sol.t_from_u,
            t_exact
        );
    }

    #[test]
    fn exact_wulff_values() {
        let e = Norm::euclidean();
        assert!((exact_wulff_solution(&e, 1.0, 2.0, [0.0, 0.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!(
            (exact_wulff_solution(&e, 1.0, 2.0, [0.5, 0.0]).unwrap() - 0.1875).abs() < 1e-15
        );
        assert!(exact_wulff_solution(&e, 1.0, 2.0, [1.0, 0.0]).unwrap().abs() < 1e-15);
        assert!(matches!(
            exact_wulff_solution(&e, 1.0, 2.0, [1.5, 0.0]),
            Err(Error::OutsideBody)
        ));
        let pi = std::f64::consts::PI;
        assert!((exact_wulff_rigidity(&e, 1.0, 2.0, pi).unwrap() - pi / 8.0).abs() < 1e-15);
        let q = Norm::quadratic([[1.0, 0.0], [0.0, 4.0]]).unwrap();
        assert!((exact_wulff_rigidity(&q, 1.0, 2.0, 2.0 * pi).unwrap() - pi / 4.0).abs() < 1e-14);
        // scaling law T_p(tW) = t^{N+q} T_p(W)
        let t = 1.7f64;
        let base = exact_wulff_rigidity(&e, 1.0, 3.0, pi).unwrap();
        let scaled = exact_wulff_rigidity(&e, t, 3.0, t * t * pi).unwrap();
        assert!((scaled / base - t.powf(2.0 + 1.5)).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_bound_properties() {
        let mesh = disk_mesh(0.05);
        let norm = Norm::euclidean();
        let sol = solve_torsion(&mesh, &norm, 2.0, &SolverOpts::default()).unwrap();
        // the solution maximizes the quotient
        let rq = rayleigh_lower_bound(&mesh, &norm, 2.0, &sol.u).unwrap();
        assert!((rq - sol.t_from_u).abs() < 1e-6 * sol.t_from_u, "rq={rq}");
        // exact solution sampled on the mesh stays within 1% of pi/8
        let psi: Vec<f64> = mesh
            .nodes
            .iter()
            .map(|&x| exact_wulff_solution(&norm, 1.0, 2.0, x).unwrap_or(0.0))
            .collect();
        let rq2 = rayleigh_lower_bound(&mesh, &norm, 2.0, &psi).unwrap();
        let t_exact = std::f64::consts::PI / 8.0;
        assert!((rq2 - t_exact).abs() < 0.01 * t_exact, "rq2={rq2}");
        assert!(rq2 <= sol.t_from_u * (1.0 + 1e-12));
        // 0-homogeneity in psi
        let psi7: Vec<f64> = psi.iter().map(|v| 7.0 * v).collect();
        let rq7 = rayleigh_lower_bound(&mesh, &norm, 2.0, &psi7).unwrap();
        assert!((rq7 - rq2).abs() < 1e-12 * rq2);
        // degenerate input
        let zeros = vec![0.0; mesh.node_count()];
        assert!(rayleigh_lower_bound(&mesh, &norm, 2.0, &zeros).is_err());
    }

    #[test]
    fn residual_detects_non_solutions() {
        let mesh = disk_mesh(0.06);
        let norm = Norm::euclidean();
        let mut sol = solve_torsion(&mesh, &norm, 2.0, &SolverOpts::default()).unwrap();
        assert!(residual_check(&sol, &norm) <= 1e-6);
        for v in &mut sol.u {
            *v *= 1.1;
        }
        assert!(residual_check(&sol, &norm) > 1e-3);
        for v in &mut sol.u {
            *v = 0.0;
        }
        let r = residual_check(&sol, &norm);
        assert!((r - 1.0).abs() < 1e-12, "zero field residual {r}");
    }

    #[test]
    fn scaling_laws() {
        let body = ConvexBody::from_vertices(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
            .unwrap();
        let big = body.scale([2.0, 2.0]);
        let norm = Norm::euclidean();
        let p = 3.0;
        let q = p / (p - 1.0);
        let s1 = solve_torsion(&triangulate(&body, 0.05).unwrap(), &norm, p, &SolverOpts::default())
            .unwrap();
        let s2 = solve_torsion(&triangulate(&big, 0.1).unwrap(), &norm, p, &SolverOpts::default())
            .unwrap();
        let t_ratio = s2.t_from_u / s1.t_from_u;
        let m_ratio = s2.m / s1.m;
        assert!((t_ratio / 2f64.powf(2.0 + q) - 1.0).abs() < 0.01, "t ratio {t_ratio}");
        assert!((m_ratio / 2f64.powf(q) - 1.0).abs() < 0.01, "m ratio {m_ratio}");
    }

    #[test]
    fn domain_monotonicity() {
        let small = ConvexBody::from_vertices(&[[0.1, 0.1], [0.9, 0.1], [0.9, 0.9], [0.1, 0.9]])
            .unwrap();
        let large = ConvexBody::from_vertices(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
            .unwrap();
        let norm = Norm::euclidean();
        let s1 = solve_torsion(&triangulate(&small, 0.05).unwrap(), &norm, 2.0, &SolverOpts::default())
            .unwrap();
        let s2 = solve_torsion(&triangulate(&large, 0.05).unwrap(), &norm, 2.0, &SolverOpts::default())
            .unwrap();
        assert!(s1.t_from_u <= s2.t_from_u * 1.02);
        assert!(s1.m <= s2.m * 1.02);
    }

    #[test]
    fn refinement_increases_discrete_rigidity() {
        let mesh = disk_mesh(0.15);
        let fine = mesh.refine();
        let norm = Norm::euclidean();
        let s1 = solve_torsion(&mesh, &norm, 2.0, &SolverOpts::default()).unwrap();
        let s2 = solve_torsion(&fine, &norm, 2.0, &SolverOpts::default()).unwrap();
        assert!(s2.t_from_u >= s1.t_from_u - 1e-12);
    }

    #[test]
    fn rotation_invariance() {
        // T_{p,F}(Omega) = T_{p,F_{A^T}}(A Omega)
        let norm = Norm::weighted_lr(4.0, [1.0, 2.0]).unwrap();
        let body = ConvexBody::from_vertices(&[[-1.0, -0.5], [1.0, -0.5], [1.0, 0.5], [-1.0, 0.5]])
            .unwrap();
        let angle = 0.7f64;
        let a = crate::geom::rotation(angle);
        let rotated_body = ConvexBody::from_vertices(
            &body
                .vertices()
                .iter()
                .map(|&v| crate::geom::mat_vec(&a, v))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let norm_at = rotate_norm(&norm, crate::geom::mat_transpose(&a)).unwrap();
        let s1 = solve_torsion(&triangulate(&body, 0.05).unwrap(), &norm, 2.0, &SolverOpts::default())
            .unwrap();
        let s2 = solve_torsion(
            &triangulate(&rotated_body, 0.05).unwrap(),
            &norm_at,
            2.0,
            &SolverOpts::default(),
        )
        .unwrap();
        assert!(
            (s1.t_from_u - s2.t_from_u).abs() < 0.01 * s1.t_from_u,
            "{} vs {}",
            s1.t_from_u,
            s2.t_from_u
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        let mesh = disk_mesh(0.2);
        let norm = Norm::euclidean();
        assert!(solve_torsion(&mesh, &norm, 1.0, &SolverOpts::default()).is_err());
        assert!(solve_torsion(&mesh, &norm, 0.5, &SolverOpts::default()).is_err());
        let lr = Norm::weighted_lr(1.5, [1.0, 1.0]).unwrap();
        assert!(solve_torsion(&mesh, &lr, 2.0, &SolverOpts::default()).is_err());
    }

    #[test]
    fn p_far_from_two_converges() {
        let mesh = disk_mesh(0.08);
        let norm = Norm::euclidean();
        for p in [1.2, 6.0] {
            let sol = solve_torsion(&mesh, &norm, p, &SolverOpts::default())
                .unwrap_or_else(|e| panic!("p={p}: {e}"));
            let t_exact = exact_wulff_rigidity(&norm, 1.0, p, std::f64::consts::PI).unwrap();
            assert!(
                (sol.t_from_u - t_exact).abs() < 0.05 * t_exact,
                "p={p}: T={} exact={}",
                sol.t_from_u,
                t_exact
            );
            assert!(sol.diagnostics.optimality <= 1e-9);
        }
    }

    #[test]
    fn delta_insensitivity() {
        let mesh = disk_mesh(0.08);
        let norm = Norm::euclidean();
        let mut opts = SolverOpts::default();
        let s1 = solve_torsion(&mesh, &norm, 3.0, &opts).unwrap();
        opts.delta_rel /= 2.0;
        let s2 = solve_torsion(&mesh, &norm, 3.0, &opts).unwrap();
        assert!((s1.t_from_u - s2.t_from_u).abs() <= 1e-3 * s1.t_from_u);
    }
}
