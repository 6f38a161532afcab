//! Experiment driver: limit sequences, the bound matrix and convergence
//! studies, with CSV/JSON emission for the CLI.
//!
//! Thin bodies (aspect ratio above ~3) are solved on a diagonally rescaled
//! copy: with S = diag(s) and the transformed norm F_S(xi) = F(S^{-T} xi),
//! the torsion function satisfies u(x) = v(S^{-1}x), T_p(Omega) = det S *
//! T_p'(S^{-1}Omega) and M(Omega) = M'. This keeps node counts bounded on
//! degenerating rectangles and triangles while solving the exact problem.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::anisotropy::{wulff_shape, Norm};
use crate::convex::{
    anisotropic_inradius, make_henrot_triangle, make_thinning_rectangle, random_hull, ConvexBody,
};
use crate::error::{Error, Result};
use crate::estimates::{
    check_max_principle, gauge_lower_bound, max_torsion_bounds, p_function_field, phi_psi,
    saint_venant_check, EstimateReport, MaxBoundsRecord, SaintVenantRecord,
};
use crate::mesh::{structured_rectangle, triangulate, Mesh};
use crate::solver::{
    exact_wulff_rigidity, rayleigh_lower_bound, solve_torsion, SolverOpts, TorsionSolution,
};

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub norm_spec: String,
    pub p_list: Vec<f64>,
    /// rectangle half-thicknesses for the thinning sequence
    pub eps_list: Vec<f64>,
    /// rectangle half-length
    pub rect_a: f64,
    /// triangle parameters for the thinning sequence
    pub a_list: Vec<f64>,
    pub h: f64,
    /// refinement levels for the convergence study
    pub levels: usize,
    /// relative/absolute slack for bound checks
    pub tol: f64,
    pub seed: u64,
    /// cells across the short side of structured rectangle meshes
    pub nx: usize,
    pub out_dir: Option<PathBuf>,
    /// optional overrides for the nonlinear solver
    pub delta_rel: Option<f64>,
    pub max_iters: Option<usize>,
    pub continuation: Option<bool>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            norm_spec: "euclidean".into(),
            p_list: vec![2.0],
            eps_list: vec![0.2, 0.1, 0.05, 0.02],
            rect_a: 1.0,
            a_list: vec![0.3, 0.15, 0.05],
            h: 0.03,
            levels: 2,
            tol: 2e-2,
            seed: 42,
            nx: 16,
            out_dir: None,
            delta_rel: None,
            max_iters: None,
            continuation: None,
        }
    }
}

impl ExperimentConfig {
    /// Loads a plain `key=value` config file; `#` starts a comment.
    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        let text = fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("config line {}: expected key=value", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num(key: &str, v: &str) -> Result<f64> {
            v.parse()
                .map_err(|e| Error::Parse(format!("config key {key}: {e}")))
        }
        fn list(key: &str, v: &str) -> Result<Vec<f64>> {
            v.split(',')
                .map(|s| num(key, s.trim()))
                .collect::<Result<Vec<f64>>>()
        }
        match key {
            "norm" => self.norm_spec = value.to_string(),
            "p" => self.p_list = list(key, value)?,
            "eps" => self.eps_list = list(key, value)?,
            "rect-a" => self.rect_a = num(key, value)?,
            "a" => self.a_list = list(key, value)?,
            "h" => self.h = num(key, value)?,
            "levels" => {
                self.levels = value
                    .parse()
                    .map_err(|e| Error::Parse(format!("config key levels: {e}")))?
            }
            "tol" => self.tol = num(key, value)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|e| Error::Parse(format!("config key seed: {e}")))?
            }
            "nx" => {
                self.nx = value
                    .parse()
                    .map_err(|e| Error::Parse(format!("config key nx: {e}")))?
            }
            "out" => self.out_dir = Some(PathBuf::from(value)),
            "delta" => self.delta_rel = Some(num(key, value)?),
            "max-iters" => {
                self.max_iters = Some(
                    value
                        .parse()
                        .map_err(|e| Error::Parse(format!("config key max-iters: {e}")))?,
                )
            }
            "continuation" => {
                self.continuation = Some(match value {
                    "on" => true,
                    "off" => false,
                    other => {
                        return Err(Error::Parse(format!(
                            "config key continuation: expected on|off, got `{other}`"
                        )))
                    }
                })
            }
            other => {
                return Err(Error::Parse(format!("unknown config key `{other}`")));
            }
        }
        Ok(())
    }

    /// Fail-fast validation of everything the operations will assume.
    pub fn validate(&self) -> Result<Norm> {
        let norm = Norm::parse(&self.norm_spec)?;
        for &p in &self.p_list {
            if !(p > 1.0) || !p.is_finite() {
                return Err(Error::BadParameter(format!("p must be in (1,inf), got {p}")));
            }
        }
        if !(self.h > 0.0) {
            return Err(Error::BadParameter(format!("h must be positive, got {}", self.h)));
        }
        for &e in &self.eps_list {
            if !(e > 0.0 && e < self.rect_a) {
                return Err(Error::BadParameter(format!(
                    "eps values must be in (0, rect-a), got {e}"
                )));
            }
        }
        for w in self.eps_list.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::BadParameter("eps list must be decreasing".into()));
            }
        }
        for &a in &self.a_list {
            if !(a > 0.0 && a < std::f64::consts::FRAC_1_SQRT_2) {
                return Err(Error::BadParameter(format!(
                    "triangle parameters must be in (0, 1/sqrt 2), got {a}"
                )));
            }
        }
        Ok(norm)
    }

    pub fn solver_opts(&self) -> SolverOpts {
        let mut opts = SolverOpts::default();
        if let Some(d) = self.delta_rel {
            opts.delta_rel = d;
        }
        if let Some(n) = self.max_iters {
            opts.max_iters = n;
        }
        if let Some(c) = self.continuation {
            opts.continuation = c;
        }
        opts
    }
}

/// Solves the torsion problem on a body, rescaling thin bodies first.
/// The returned solution is expressed in physical coordinates.
pub fn solve_on_body(
    body: &ConvexBody,
    norm: &Norm,
    p: f64,
    h: f64,
    opts: &SolverOpts,
) -> Result<TorsionSolution> {
    let (lo, hi) = body.bounding_box();
    let half = [(hi[0] - lo[0]) / 2.0, (hi[1] - lo[1]) / 2.0];
    let aspect = half[0] / half[1];
    if (aspect > 8.0 || aspect < 1.0 / 8.0) && norm.scaled(half).is_some() {
        let scaled_body = body.scale([1.0 / half[0], 1.0 / half[1]]);
        let scaled_norm = norm.scaled(half).expect("checked above");
        let mesh = triangulate(&scaled_body, h)?;
        let sol = solve_torsion(&mesh, &scaled_norm, p, opts)?;
        Ok(unscale_solution(sol, half, norm))
    } else {
        let mesh = triangulate(body, h)?;
        solve_torsion(&mesh, norm, p, opts)
    }
}

/// Maps a solution computed on S^{-1}Omega with the transformed norm back to
/// physical coordinates: nodes scale by S, nodal values are unchanged, and
/// integrals pick up det S.
fn unscale_solution(sol: TorsionSolution, s: [f64; 2], norm: &Norm) -> TorsionSolution {
    let det = s[0] * s[1];
    let mesh = Mesh {
        nodes: sol
            .mesh
            .nodes
            .iter()
            .map(|&x| [x[0] * s[0], x[1] * s[1]])
            .collect(),
        triangles: sol.mesh.triangles.clone(),
        boundary: sol.mesh.boundary.clone(),
        h: sol.mesh.h * s[0].max(s[1]),
    };
    let t = sol.t_from_u * det;
    TorsionSolution {
        mesh,
        norm_name: norm.name().to_string(),
        p: sol.p,
        q: sol.q,
        u: sol.u,
        t_from_u: t,
        t_from_grad: sol.t_from_grad * det,
        m: sol.m,
        sigma: t.powf(sol.p - 1.0),
        diagnostics: sol.diagnostics,
    }
}

// ---------------------------------------------------------------------------
// rectangle limit

#[derive(Debug, Clone, Serialize)]
pub struct RectRow {
    pub eps: f64,
    pub t: f64,
    pub r_f: f64,
    pub psi: f64,
    /// 1/(q+1) - psi, positive and decreasing along the sequence
    pub deficit: f64,
    pub status: String,
}

/// Thinning rectangles `]-eps,eps[ x ]-a,a[`: Psi increases to 1/(q+1).
pub fn run_rectangle_limit(cfg: &ExperimentConfig) -> Result<Vec<RectRow>> {
    let norm = cfg.validate()?;
    let p = cfg.p_list[0];
    let q = p / (p - 1.0);
    let opts = cfg.solver_opts();
    let mut rows = Vec::new();
    for &eps in &cfg.eps_list {
        let body = make_thinning_rectangle(eps, cfg.rect_a)?;
        let (r_f, _) = anisotropic_inradius(&body, &norm);
        let row = (|| -> Result<RectRow> {
            let mesh = structured_rectangle(eps, cfg.rect_a, cfg.nx)?;
            let sol = solve_torsion(&mesh, &norm, p, &opts)?;
            let psi = sol.t_from_u / (body.area() * r_f.powf(q));
            Ok(RectRow {
                eps,
                t: sol.t_from_u,
                r_f,
                psi,
                deficit: 1.0 / (q + 1.0) - psi,
                status: "ok".into(),
            })
        })();
        rows.push(row.unwrap_or_else(|e| RectRow {
            eps,
            t: f64::NAN,
            r_f,
            psi: f64::NAN,
            deficit: f64::NAN,
            status: format!("error: {e}"),
        }));
    }
    if let Some(dir) = &cfg.out_dir {
        write_csv(
            &dir.join("rect_limit.csv"),
            "# rectangle limit v1: psi -> 1/(q+1) as eps -> 0",
            &["eps", "t", "r_f", "psi", "deficit", "status"],
            rows.iter().map(|r| {
                vec![
                    fnum(r.eps),
                    fnum(r.t),
                    fnum(r.r_f),
                    fnum(r.psi),
                    fnum(r.deficit),
                    r.status.clone(),
                ]
            }),
        )?;
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// triangle limit

#[derive(Debug, Clone, Serialize)]
pub struct TriangleRow {
    pub a: f64,
    pub phi: f64,
    pub t: f64,
    pub m: f64,
    /// Euclidean inradius of the triangle
    pub r: f64,
    /// maximum of the torsion function of the tangent ellipse, a^2(1-a^2)/2
    pub m_ellipse: f64,
    /// sandwich ratio R^2 / (2 M(E_a)), approaches 1 from above
    pub ratio: f64,
    pub status: String,
}

/// Thinning isosceles triangles with tangent inner ellipses: Phi decreases
/// to 1/3. Euclidean norm, p = 2.
pub fn run_triangle_limit(cfg: &ExperimentConfig) -> Result<Vec<TriangleRow>> {
    let norm = cfg.validate()?;
    if !matches!(norm.kind(), crate::anisotropy::NormKind::Euclidean) {
        return Err(Error::BadParameter(
            "the triangle limit is a euclidean, p=2 experiment".into(),
        ));
    }
    let p = 2.0;
    let opts = cfg.solver_opts();
    let mut rows = Vec::new();
    for &a in &cfg.a_list {
        let ht = make_henrot_triangle(a)?;
        let (r, _) = anisotropic_inradius(&ht.triangle, &norm);
        let m_ellipse = a * a * (1.0 - a * a) / 2.0;
        let ratio = r * r / (2.0 * m_ellipse);
        let row = (|| -> Result<TriangleRow> {
            let sol = solve_on_body(&ht.triangle, &norm, p, cfg.h, &opts)?;
            let phi = sol.t_from_u / (ht.triangle.area() * sol.m);
            Ok(TriangleRow {
                a,
                phi,
                t: sol.t_from_u,
                m: sol.m,
                r,
                m_ellipse,
                ratio,
                status: "ok".into(),
            })
        })();
        rows.push(row.unwrap_or_else(|e| TriangleRow {
            a,
            phi: f64::NAN,
            t: f64::NAN,
            m: f64::NAN,
            r,
            m_ellipse,
            ratio,
            status: format!("error: {e}"),
        }));
    }
    if let Some(dir) = &cfg.out_dir {
        write_csv(
            &dir.join("triangle_limit.csv"),
            "# triangle limit v1: phi -> 1/3 as a -> 0",
            &["a", "phi", "t", "m", "r", "m_ellipse", "ratio", "status"],
            rows.iter().map(|r| {
                vec![
                    fnum(r.a),
                    fnum(r.phi),
                    fnum(r.t),
                    fnum(r.m),
                    fnum(r.r),
                    fnum(r.m_ellipse),
                    fnum(r.ratio),
                    r.status.clone(),
                ]
            }),
        )?;
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// bound matrix

#[derive(Debug, Clone, Serialize)]
pub struct MatrixRow {
    pub shape: String,
    pub norm: String,
    pub p: f64,
    pub status: String,
    pub report: Option<EstimateReport>,
    pub max_bounds: Option<MaxBoundsRecord>,
    /// max of the P-function field relative to M
    pub p_max_rel: f64,
    pub gauge_lb: f64,
    /// Rayleigh value of the discrete solution, same quadrature as gauge_lb
    pub rayleigh_t: f64,
    pub saint_venant: Option<SaintVenantRecord>,
    /// Wulff rows only: lower-bound equalities within 1%
    pub wulff_equalities: Option<bool>,
    pub pass: bool,
}

fn matrix_norms() -> Vec<Norm> {
    vec![
        Norm::euclidean(),
        Norm::quadratic([[1.0, 0.0], [0.0, 4.0]]).expect("spd"),
        Norm::weighted_lr(4.0, [1.0, 1.0]).expect("valid"),
    ]
}

fn matrix_shapes(norm: &Norm, seed: u64) -> Result<Vec<(String, ConvexBody)>> {
    Ok(vec![
        ("wulff".into(), wulff_shape(norm, 1.0, [0.0, 0.0], 256)?),
        (
            "square".into(),
            ConvexBody::from_vertices(&[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])?,
        ),
        // thin in x to match the structured mesh orientation
        ("rect4".into(), make_thinning_rectangle(0.25, 1.0)?),
        (format!("hull12-{seed}"), random_hull(12, seed)?),
        ("henrot0.5".into(), make_henrot_triangle(0.5)?.triangle),
    ])
}

fn evaluate_matrix_row(
    shape: &str,
    body: &ConvexBody,
    norm: &Norm,
    p: f64,
    cfg: &ExperimentConfig,
) -> Result<MatrixRow> {
    let opts = cfg.solver_opts();
    // the rectangle gets the boundary-graded structured mesh: the P-function
    // is near its extremal value 0 all along the long edges, which needs
    // better cross-wise resolution than an isotropic triangulation gives
    let sol = if shape == "rect4" {
        let nx = (1.0 / cfg.h).ceil() as usize;
        let mesh = structured_rectangle(0.25, 1.0, nx.max(8))?;
        solve_torsion(&mesh, norm, p, &opts)?
    } else {
        solve_on_body(body, norm, p, cfg.h, &opts)?
    };
    let (r_f, _) = anisotropic_inradius(body, norm);
    let report = phi_psi(&sol, shape, body.area(), r_f, cfg.tol);
    let bounds = max_torsion_bounds(&sol, r_f, cfg.tol);
    let field = p_function_field(&sol, norm);
    let principle = check_max_principle(&field, sol.m, 5e-3);
    let gauge_lb = gauge_lower_bound(body, norm, p, &sol.mesh)?;
    let rayleigh_t = rayleigh_lower_bound(&sol.mesh, norm, p, &sol.u)?;
    let sv = saint_venant_check(&sol, norm, body, 1e-2)?;
    let stability_ok = sv.stability.as_ref().map(|s| s.pass).unwrap_or(true);

    let wulff_equalities = if shape == "wulff" {
        let psi_eq = (report.psi - report.psi_lower).abs() <= 0.01 * report.psi_lower;
        let m_eq = (bounds.m - bounds.lower).abs() <= 0.01 * bounds.lower;
        let gauge_eq = (gauge_lb - rayleigh_t).abs() <= 0.01 * rayleigh_t;
        Some(psi_eq && m_eq && gauge_eq)
    } else {
        None
    };

    let pass = report.pass
        && bounds.pass
        && principle.pass
        && gauge_lb <= rayleigh_t
        && sv.pass
        && stability_ok
        && wulff_equalities.unwrap_or(true);
    Ok(MatrixRow {
        shape: shape.to_string(),
        norm: norm.name().to_string(),
        p,
        status: "ok".into(),
        report: Some(report),
        max_bounds: Some(bounds),
        p_max_rel: field.max_value / sol.m,
        gauge_lb,
        rayleigh_t,
        saint_venant: Some(sv),
        wulff_equalities,
        pass,
    })
}

/// Full cross product {shapes} x {norms} x {p}. Returns all rows and whether
/// every margin passed; per-row errors are recorded and do not stop the run.
pub fn run_bound_matrix(cfg: &ExperimentConfig) -> Result<(Vec<MatrixRow>, bool)> {
    let mut rows = Vec::new();
    for norm in matrix_norms() {
        for (shape, body) in matrix_shapes(&norm, cfg.seed)? {
            for &p in &cfg.p_list {
                let row = evaluate_matrix_row(&shape, &body, &norm, p, cfg).unwrap_or_else(|e| {
                    MatrixRow {
                        shape: shape.clone(),
                        norm: norm.name().to_string(),
                        p,
                        status: format!("error: {e}"),
                        report: None,
                        max_bounds: None,
                        p_max_rel: f64::NAN,
                        gauge_lb: f64::NAN,
                        rayleigh_t: f64::NAN,
                        saint_venant: None,
                        wulff_equalities: None,
                        pass: false,
                    }
                });
                rows.push(row);
            }
        }
    }
    let all_pass = rows.iter().all(|r| r.pass);
    if let Some(dir) = &cfg.out_dir {
        write_csv(
            &dir.join("bound_matrix.csv"),
            "# bound matrix v1: phi/psi/M bounds, P-function, gauge and Saint-Venant checks",
            &[
                "shape", "norm", "p", "t", "m", "r_f", "area", "phi", "psi", "p_max_rel",
                "gauge_lb", "rayleigh_t", "sv_gap", "pass", "status",
            ],
            rows.iter().map(|r| {
                let (t, m, r_f, area, phi, psi) = r
                    .report
                    .as_ref()
                    .map(|x| (x.t_from_u, x.m, x.r_f, x.area, x.phi, x.psi))
                    .unwrap_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN));
                let gap = r.saint_venant.as_ref().map(|s| s.gap).unwrap_or(f64::NAN);
                vec![
                    r.shape.clone(),
                    r.norm.clone(),
                    fnum(r.p),
                    fnum(t),
                    fnum(m),
                    fnum(r_f),
                    fnum(area),
                    fnum(phi),
                    fnum(psi),
                    fnum(r.p_max_rel),
                    fnum(r.gauge_lb),
                    fnum(r.rayleigh_t),
                    fnum(gap),
                    r.pass.to_string(),
                    r.status.clone(),
                ]
            }),
        )?;
        let min_phi_margin = rows
            .iter()
            .filter_map(|r| r.report.as_ref())
            .map(|x| (x.phi - x.phi_lower).min(x.phi_upper - x.phi))
            .fold(f64::INFINITY, f64::min);
        let min_psi_margin = rows
            .iter()
            .filter_map(|r| r.report.as_ref())
            .map(|x| (x.psi - x.psi_lower).min(x.psi_upper - x.psi))
            .fold(f64::INFINITY, f64::min);
        let max_p_rel = rows
            .iter()
            .map(|r| r.p_max_rel)
            .fold(f64::NEG_INFINITY, f64::max);
        let summary = json!({
            "rows": rows.len(),
            "all_pass": all_pass,
            "seed": cfg.seed,
            "h": cfg.h,
            "min_phi_margin": min_phi_margin,
            "min_psi_margin": min_psi_margin,
            "max_p_function_rel": max_p_rel,
        });
        fs::write(
            dir.join("bound_matrix_summary.json"),
            serde_json::to_string_pretty(&summary).expect("serializable") + "\n",
        )?;
    }
    Ok((rows, all_pass))
}

// ---------------------------------------------------------------------------
// convergence study

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub t: f64,
    pub rel_error: f64,
    /// empirical order vs the previous level; NaN on the first row
    pub order: f64,
}

/// Solves on a Wulff mesh at h, h/2, ... via nested refinement and compares
/// against the closed-form rigidity. The discrete values must increase.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    let norm = cfg.validate()?;
    let p = cfg.p_list[0];
    let w = wulff_shape(&norm, 1.0, [0.0, 0.0], 720)?;
    let t_exact = exact_wulff_rigidity(&norm, 1.0, p, w.area())?;
    let opts = cfg.solver_opts();
    let mut mesh = triangulate(&w, cfg.h)?;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for level in 0..=cfg.levels {
        let sol = solve_torsion(&mesh, &norm, p, &opts)?;
        let rel_error = (t_exact - sol.t_from_u).abs() / t_exact;
        let order = rows
            .last()
            .map(|prev| (prev.rel_error / rel_error).log2())
            .unwrap_or(f64::NAN);
        if let (Some(prev), Some(dir)) = (rows.last(), &cfg.out_dir) {
            let _ = prev; // solutions are exported per level below
            let _ = dir;
        }
        if let Some(dir) = &cfg.out_dir {
            write_solution(&dir.join(format!("solution_l{level}.txt")), &sol)?;
        }
        rows.push(ConvergenceRow {
            h: mesh.h,
            t: sol.t_from_u,
            rel_error,
            order,
        });
        if level < cfg.levels {
            mesh = mesh.refine();
        }
    }
    if let Some(dir) = &cfg.out_dir {
        write_csv(
            &dir.join("convergence.csv"),
            "# convergence v1: discrete rigidity vs closed form on Wulff meshes",
            &["h", "t", "rel_error", "order"],
            rows.iter()
                .map(|r| vec![fnum(r.h), fnum(r.t), fnum(r.rel_error), fnum(r.order)]),
        )?;
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// output plumbing

fn fnum(v: f64) -> String {
    format!("{v:.12e}")
}

/// Quotes a CSV field when it contains a delimiter or quote.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn write_csv<I>(path: &Path, comment: &str, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    writeln!(f, "{comment}")?;
    writeln!(f, "{}", header.join(","))?;
    for row in rows {
        let quoted: Vec<String> = row.iter().map(|s| csv_field(s)).collect();
        writeln!(f, "{}", quoted.join(","))?;
    }
    Ok(())
}

/// Plain-text nodal table `x y u` plus a JSON summary record alongside it.
pub fn write_solution(path: &Path, sol: &TorsionSolution) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut f = fs::File::create(path)?;
    for (node, u) in sol.mesh.nodes.iter().zip(&sol.u) {
        writeln!(f, "{:.12e} {:.12e} {:.12e}", node[0], node[1], u)?;
    }
    let summary = json!({
        "norm": sol.norm_name,
        "p": sol.p,
        "q": sol.q,
        "t_from_u": sol.t_from_u,
        "t_from_grad": sol.t_from_grad,
        "m": sol.m,
        "sigma": sol.sigma,
        "diagnostics": sol.diagnostics,
    });
    fs::write(
        path.with_extension("json"),
        serde_json::to_string_pretty(&summary).expect("serializable") + "\n",
    )?;
    Ok(())
}
