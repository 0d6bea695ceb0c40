//! Primal-dual interior-point method for small cone programs
//!
//! ```text
//! minimize    c^T x
//! subject to  G x + s = h,   s in K
//! ```
//!
//! where `K` is a product of nonnegative orthants and second-order cones.
//! Each iteration uses Nesterov-Todd scaling and a Mehrotra predictor-corrector
//! step on the normal equations `G^T W^{-2} G dx = r`, factored once per
//! iteration. Products with `G` use its row sparsity, and the factorization
//! eliminates variables that appear in disjoint rows (see [`Plan`]).
//! Starting points need not be feasible.

use nalgebra::{DMatrix, DVector};

use super::cones::{self, BlockScaling, Cone, Scaling};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpmSettings {
    pub max_iter: usize,
    /// Relative primal and dual residual tolerance for full convergence.
    pub feas_tol: f64,
    /// Absolute duality gap tolerance for full convergence.
    pub gap_tol: f64,
    /// Looser tolerance accepted when progress stalls before full convergence.
    pub reduced_tol: f64,
}

impl Default for IpmSettings {
    fn default() -> Self {
        Self {
            max_iter: 200,
            feas_tol: 1e-9,
            gap_tol: 1e-9,
            reduced_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConeProgram {
    pub c: Vec<f64>,
    /// Constraint matrix with one row per cone coordinate.
    pub g: DMatrix<f64>,
    pub h: Vec<f64>,
    pub cones: Vec<Cone>,
}

impl ConeProgram {
    fn validate(&self) -> Result<()> {
        let rows: usize = self.cones.iter().map(Cone::dim).sum();
        if self.g.nrows() != rows || self.h.len() != rows || self.g.ncols() != self.c.len() {
            return Err(Error::Solver(format!(
                "inconsistent program: G is {}x{}, |h| = {}, |c| = {}, cone rows = {rows}",
                self.g.nrows(),
                self.g.ncols(),
                self.h.len(),
                self.c.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpmStatus {
    Optimal,
    /// Stopped within `reduced_tol` but not `feas_tol`/`gap_tol`.
    ReducedAccuracy,
}

#[derive(Debug, Clone)]
pub struct IpmSolution {
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub z: Vec<f64>,
    pub status: IpmStatus,
    pub iterations: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `G` stored by rows as `(column, value)` lists.
struct SparseRows {
    rows: Vec<Vec<(usize, f64)>>,
    ncols: usize,
}

impl SparseRows {
    fn new(g: &DMatrix<f64>) -> Self {
        let rows = (0..g.nrows())
            .map(|i| {
                (0..g.ncols())
                    .filter_map(|j| (g[(i, j)] != 0.0).then_some((j, g[(i, j)])))
                    .collect()
            })
            .collect();
        Self {
            rows,
            ncols: g.ncols(),
        }
    }

    fn mul(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&(j, v)| v * x[j]).sum())
            .collect()
    }

    fn tr_mul(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ncols];
        for (r, &yi) in self.rows.iter().zip(y) {
            if yi != 0.0 {
                for &(j, v) in r {
                    out[j] += v * yi;
                }
            }
        }
        out
    }

    /// `G^T diag(weights) G` restricted to the given row range, added to `out`.
    fn add_weighted_gram(&self, range: std::ops::Range<usize>, weight: impl Fn(usize) -> f64, out: &mut DMatrix<f64>) {
        for i in range {
            let w = weight(i);
            let r = &self.rows[i];
            for &(a, va) in r {
                let wa = w * va;
                for &(b, vb) in r {
                    out[(a, b)] += wa * vb;
                }
            }
        }
    }
}

/// Elimination plan for the normal equations, fixed per program.
///
/// Rows of the orthant with many nonzeros are "dense"; they enter as a
/// low-rank Woodbury correction. Among the remaining rows, a set of
/// variables that never share a row is eliminated through a diagonal Schur
/// complement, so only the kept variables need a dense factorization.
struct Plan {
    dense_rows: Vec<usize>,
    is_dense: Vec<bool>,
    elim: Vec<usize>,
    keep: Vec<usize>,
    /// Per cone, the dense restriction of a second-order block.
    soc: Vec<Option<SocBlock>>,
}

struct SocBlock {
    cols: Vec<usize>,
    gk: DMatrix<f64>,
    /// `G_k^T J G_k` with `J = diag(1, -1, ..., -1)`.
    gjg: DMatrix<f64>,
}

impl SocBlock {
    fn new(g: &SparseRows, off: usize, q: usize) -> Self {
        let mut cols: Vec<usize> = g.rows[off..off + q]
            .iter()
            .flat_map(|r| r.iter().map(|&(j, _)| j))
            .collect();
        cols.sort_unstable();
        cols.dedup();
        let mut gk = DMatrix::<f64>::zeros(q, cols.len());
        for i in 0..q {
            for &(j, v) in &g.rows[off + i] {
                let jj = cols.binary_search(&j).expect("column collected above");
                gk[(i, jj)] = v;
            }
        }
        let mut jg = gk.clone();
        jg.rows_mut(1, q - 1).neg_mut();
        let gjg = gk.tr_mul(&jg);
        Self { cols, gk, gjg }
    }
}

impl Plan {
    fn new(g: &SparseRows, cones_: &[Cone]) -> Self {
        let n = g.ncols;
        let nrows = g.rows.len();
        let mut is_dense = vec![false; nrows];
        let mut in_soc = vec![false; n];
        for (c, off) in cones::blocks(cones_) {
            for i in off..off + c.dim() {
                match c {
                    Cone::NonNeg(_) => is_dense[i] = n > 4 && 2 * g.rows[i].len() > n,
                    Cone::Soc(_) => g.rows[i].iter().for_each(|&(j, _)| in_soc[j] = true),
                }
            }
        }
        let dense_rows: Vec<usize> = (0..nrows).filter(|&i| is_dense[i]).collect();

        let mut var_rows: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, r) in g.rows.iter().enumerate() {
            if !is_dense[i] {
                r.iter().for_each(|&(j, _)| var_rows[j].push(i));
            }
        }
        // Greedy: variables in fewer rows first, each row may host one
        // eliminated variable.
        let mut order: Vec<usize> = (0..n).filter(|&j| !in_soc[j] && !var_rows[j].is_empty()).collect();
        order.sort_by_key(|&j| (var_rows[j].len(), j));
        let mut row_taken = vec![false; nrows];
        let mut eliminated = vec![false; n];
        for j in order {
            if var_rows[j].iter().all(|&i| !row_taken[i]) {
                var_rows[j].iter().for_each(|&i| row_taken[i] = true);
                eliminated[j] = true;
            }
        }
        let elim: Vec<usize> = (0..n).filter(|&j| eliminated[j]).collect();
        let keep: Vec<usize> = (0..n).filter(|&j| !eliminated[j]).collect();
        let soc = cones::blocks(cones_)
            .map(|(c, off)| matches!(c, Cone::Soc(_)).then(|| SocBlock::new(g, off, c.dim())))
            .collect();
        Self {
            dense_rows,
            is_dense,
            elim,
            keep,
            soc,
        }
    }
}

/// Factored normal matrix `G^T W^{-2} G` for one scaling.
struct Kkt<'a> {
    g: &'a SparseRows,
    plan: &'a Plan,
    scaling: Scaling,
    /// Diagonal of the eliminated block.
    diag: Vec<f64>,
    /// Coupling of each eliminated variable to kept variables, `(keep position, value)`.
    coupling: Vec<Vec<(usize, f64)>>,
    reduced: nalgebra::linalg::Cholesky<f64, nalgebra::Dyn>,
    /// `M0^{-1} G_d^T` for the dense rows and the factored capacitance matrix.
    woodbury: Option<Woodbury>,
}

type Woodbury = (DMatrix<f64>, DMatrix<f64>, nalgebra::linalg::Cholesky<f64, nalgebra::Dyn>);

impl<'a> Kkt<'a> {
    fn new(g: &'a SparseRows, plan: &'a Plan, cones_: &[Cone], scaling: Scaling) -> Result<Self> {
        let n = g.ncols;
        let mut m0 = DMatrix::<f64>::zeros(n, n);
        let mut dense_weights = Vec::with_capacity(plan.dense_rows.len());
        for (k, (cone, off)) in cones::blocks(cones_).enumerate() {
            match scaling.block(k) {
                BlockScaling::NonNeg(d) => {
                    for i in off..off + cone.dim() {
                        let w = 1.0 / (d[i - off] * d[i - off]);
                        if plan.is_dense[i] {
                            dense_weights.push(w);
                        } else {
                            g.add_weighted_gram(i..i + 1, |_| w, &mut m0);
                        }
                    }
                }
                BlockScaling::Soc { beta, w } => {
                    // W^{-2} = (2 (J w)(J w)^T - J) / beta^2, so the block is
                    // a rank-one term minus the precomputed G_k^T J G_k.
                    let soc = plan.soc[k].as_ref().expect("plan covers every cone");
                    let jw: Vec<f64> = w
                        .iter()
                        .enumerate()
                        .map(|(i, v)| if i == 0 { *v } else { -*v })
                        .collect();
                    let p = soc.gk.tr_mul(&DVector::from_vec(jw));
                    let inv_b2 = 1.0 / (beta * beta);
                    for (aa, &a) in soc.cols.iter().enumerate() {
                        for (bb, &b) in soc.cols.iter().enumerate() {
                            m0[(a, b)] += inv_b2 * (2.0 * p[aa] * p[bb] - soc.gjg[(aa, bb)]);
                        }
                    }
                }
            }
        }

        let nk = plan.keep.len();
        let mut reduced = DMatrix::<f64>::zeros(nk, nk);
        for (p, &a) in plan.keep.iter().enumerate() {
            for (q, &b) in plan.keep.iter().enumerate() {
                reduced[(p, q)] = m0[(a, b)];
            }
        }
        let mut diag = Vec::with_capacity(plan.elim.len());
        let mut coupling = Vec::with_capacity(plan.elim.len());
        for &e in &plan.elim {
            let d = m0[(e, e)];
            if !(d > 0.0) {
                return Err(Error::Solver("eliminated pivot is not positive".into()));
            }
            let col: Vec<(usize, f64)> = plan
                .keep
                .iter()
                .enumerate()
                .filter_map(|(p, &a)| (m0[(a, e)] != 0.0).then_some((p, m0[(a, e)])))
                .collect();
            for &(p, vp) in &col {
                for &(q, vq) in &col {
                    reduced[(p, q)] -= vp * vq / d;
                }
            }
            diag.push(d);
            coupling.push(col);
        }
        let reduced = factor_with_regularization(&reduced)?;
        let mut kkt = Self {
            g,
            plan,
            scaling,
            diag,
            coupling,
            reduced,
            woodbury: None,
        };

        if !plan.dense_rows.is_empty() {
            let k = plan.dense_rows.len();
            let mut z = DMatrix::<f64>::zeros(n, k);
            let mut gd = DMatrix::<f64>::zeros(k, n);
            for (c, &i) in plan.dense_rows.iter().enumerate() {
                let mut row = vec![0.0; n];
                g.rows[i].iter().for_each(|&(j, v)| row[j] = v);
                gd.row_mut(c).copy_from_slice(&row);
                z.column_mut(c).copy_from_slice(&kkt.solve_base(&row));
            }
            let mut cap = &gd * &z;
            for (c, w) in dense_weights.iter().enumerate() {
                cap[(c, c)] += 1.0 / w;
            }
            let cap = factor_with_regularization(&cap)?;
            kkt.woodbury = Some((z, gd, cap));
        }
        Ok(kkt)
    }

    /// Solves with the normal matrix minus its dense rows.
    fn solve_base(&self, r: &[f64]) -> Vec<f64> {
        let plan = self.plan;
        let mut rk = DVector::from_iterator(plan.keep.len(), plan.keep.iter().map(|&a| r[a]));
        for (idx, &e) in plan.elim.iter().enumerate() {
            let scale = r[e] / self.diag[idx];
            for &(p, v) in &self.coupling[idx] {
                rk[p] -= v * scale;
            }
        }
        let xk = self.reduced.solve(&rk);
        let mut x = vec![0.0; self.g.ncols];
        for (p, &a) in plan.keep.iter().enumerate() {
            x[a] = xk[p];
        }
        for (idx, &e) in plan.elim.iter().enumerate() {
            let cross: f64 = self.coupling[idx].iter().map(|&(p, v)| v * xk[p]).sum();
            x[e] = (r[e] - cross) / self.diag[idx];
        }
        x
    }

    fn solve_normal(&self, r: &[f64]) -> Vec<f64> {
        let mut x = self.solve_base(r);
        if let Some((z, gd, cap)) = &self.woodbury {
            let t = gd * DVector::from_column_slice(&x);
            let c = cap.solve(&t);
            let corr = z * c;
            for j in 0..x.len() {
                x[j] -= corr[j];
            }
        }
        x
    }

    /// Solves the linearized system for the target complementarity `rc`.
    /// Returns `(dx, ds, dz)`.
    fn solve(
        &self,
        rx: &[f64],
        rz: &[f64],
        lambda: &[f64],
        rc: &[f64],
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let cones = self.scaling.cones();
        let g = self.g;
        let rows = rz.len();
        let mut quot = vec![0.0; rows];
        cones::divide(cones, lambda, rc, &mut quot);
        let mut t = vec![0.0; rows];
        self.scaling.apply(&quot, &mut t, false);
        for i in 0..rows {
            t[i] += rz[i];
        }
        let gt_wt = g.tr_mul(&self.apply_winv_sq(&t));
        let rhs: Vec<f64> = (0..rx.len()).map(|j| -rx[j] - gt_wt[j]).collect();
        let mut dx = self.solve_normal(&rhs);
        let mut gdx = g.mul(&dx);
        let mut dz = self.apply_winv_sq(&(0..rows).map(|i| gdx[i] + t[i]).collect::<Vec<_>>());
        // Refine against the dual equation G^T dz = -rx as actually evaluated;
        // near the boundary W^{-2} is badly scaled and one solve loses the
        // dual residual.
        for _ in 0..3 {
            let gtdz = g.tr_mul(&dz);
            let err: Vec<f64> = (0..rx.len()).map(|j| -rx[j] - gtdz[j]).collect();
            if inf_norm(&err) <= 1e-15 * (1.0 + inf_norm(rx)) {
                break;
            }
            let delta = self.solve_normal(&err);
            let gdelta = g.mul(&delta);
            let dzc = self.apply_winv_sq(&gdelta);
            for j in 0..dx.len() {
                dx[j] += delta[j];
            }
            for i in 0..rows {
                gdx[i] += gdelta[i];
                dz[i] += dzc[i];
            }
        }
        let ds: Vec<f64> = (0..rows).map(|i| -rz[i] - gdx[i]).collect();
        (dx, ds, dz)
    }

    fn apply_winv_sq(&self, v: &[f64]) -> Vec<f64> {
        let mut a = vec![0.0; v.len()];
        let mut b = vec![0.0; v.len()];
        self.scaling.apply(v, &mut a, true);
        self.scaling.apply(&a, &mut b, true);
        b
    }
}

fn factor_with_regularization(
    m: &DMatrix<f64>,
) -> Result<nalgebra::linalg::Cholesky<f64, nalgebra::Dyn>> {
    if let Some(f) = nalgebra::linalg::Cholesky::new(m.clone()) {
        return Ok(f);
    }
    let scale = m.diagonal().amax().max(1.0);
    let n = m.nrows();
    let mut delta = 1e-13 * scale;
    for _ in 0..6 {
        let reg = m + DMatrix::identity(n, n) * delta;
        if let Some(f) = nalgebra::linalg::Cholesky::new(reg) {
            return Ok(f);
        }
        delta *= 100.0;
    }
    Err(Error::Solver("normal equations are not positive definite".into()))
}

struct Iterate {
    x: Vec<f64>,
    s: Vec<f64>,
    z: Vec<f64>,
}

struct Residuals {
    rx: Vec<f64>,
    rz: Vec<f64>,
    pres: f64,
    dres: f64,
    gap: f64,
    pobj: f64,
    dobj: f64,
}

fn residuals(prog: &ConeProgram, g: &SparseRows, it: &Iterate) -> Residuals {
    let gx = g.mul(&it.x);
    let gz = g.tr_mul(&it.z);
    let rz: Vec<f64> = (0..prog.h.len())
        .map(|i| gx[i] + it.s[i] - prog.h[i])
        .collect();
    let rx: Vec<f64> = (0..prog.c.len()).map(|j| gz[j] + prog.c[j]).collect();
    Residuals {
        pres: inf_norm(&rz) / (1.0 + inf_norm(&prog.h)),
        dres: inf_norm(&rx) / (1.0 + inf_norm(&prog.c)),
        gap: dot(&it.s, &it.z),
        pobj: dot(&prog.c, &it.x),
        dobj: -dot(&prog.h, &it.z),
        rx,
        rz,
    }
}

/// Least-squares start: `x` minimizes `||G x - h||`, `z` is the minimum-norm
/// dual satisfying `G^T z + c = 0`; both slacks are shifted into the cone.
fn initial_point(prog: &ConeProgram, g: &SparseRows, plan: &Plan) -> Result<Iterate> {
    let rows = prog.h.len();
    let mut e = vec![0.0; rows];
    cones::identity(&prog.cones, &mut e);
    // With s = z = e the scaling is the identity and the normal matrix is G^T G.
    let kkt = Kkt::new(g, plan, &prog.cones, Scaling::new(&prog.cones, &e, &e))?;
    let x = kkt.solve_normal(&g.tr_mul(&prog.h));
    let gx = g.mul(&x);
    let mut s: Vec<f64> = (0..rows).map(|i| prog.h[i] - gx[i]).collect();
    let y = kkt.solve_normal(&prog.c);
    let mut z: Vec<f64> = g.mul(&y).iter().map(|v| -v).collect();

    for v in [&mut s, &mut z] {
        let alpha = cones::boundary_offset(&prog.cones, v);
        if alpha >= -1e-8 {
            let shift = 1.0 + alpha.max(0.0);
            for i in 0..rows {
                v[i] += shift * e[i];
            }
        }
    }
    Ok(Iterate {
        x,
        s,
        z,
    })
}

pub fn solve(prog: &ConeProgram, settings: &IpmSettings) -> Result<IpmSolution> {
    prog.validate()?;
    let cones = &prog.cones;
    let rows = prog.h.len();
    let nu = cones::degree(cones) as f64;
    let g = SparseRows::new(&prog.g);
    let plan = Plan::new(&g, cones);
    let mut it = initial_point(prog, &g, &plan)?;
    let mut e = vec![0.0; rows];
    cones::identity(cones, &mut e);

    let mut stalls = 0;
    let mut best: Option<(f64, IpmSolution)> = None;
    for iter in 0..=settings.max_iter {
        let r = residuals(prog, &g, &it);
        let gap_measure = r.gap.max((r.pobj - r.dobj).abs());
        let snapshot = |status| IpmSolution {
            x: it.x.clone(),
            s: it.s.clone(),
            z: it.z.clone(),
            status,
            iterations: iter,
            primal_objective: r.pobj,
            dual_objective: r.dobj,
            primal_residual: r.pres,
            dual_residual: r.dres,
            gap: r.gap,
        };
        if r.pres <= settings.feas_tol && r.dres <= settings.feas_tol && gap_measure <= settings.gap_tol {
            return Ok(snapshot(IpmStatus::Optimal));
        }
        let merit = (r.pres / settings.feas_tol)
            .max(r.dres / settings.feas_tol)
            .max(gap_measure / settings.gap_tol);
        if best.as_ref().is_none_or(|(m, _)| merit < *m) {
            best = Some((merit, snapshot(IpmStatus::ReducedAccuracy)));
        }
        let best_merit = best.as_ref().map_or(f64::INFINITY, |(m, _)| *m);
        // Once close to optimal, round-off can push the iterates away again.
        let degrading = best_merit < 1e4 && merit > 100.0 * best_merit;
        if iter == settings.max_iter || stalls >= 3 || degrading {
            let (_, sol) = best.expect("at least one iterate was recorded");
            let close = sol.primal_residual <= settings.reduced_tol
                && sol.dual_residual <= settings.reduced_tol
                && sol.gap.max((sol.primal_objective - sol.dual_objective).abs())
                    <= settings.reduced_tol;
            if close {
                return Ok(sol);
            }
            return Err(Error::Solver(format!(
                "no convergence after {iter} iterations (pres {:.2e}, dres {:.2e}, gap {:.2e})",
                sol.primal_residual, sol.dual_residual, sol.gap
            )));
        }

        let scaling = Scaling::new(cones, &it.s, &it.z);
        let mut lambda = vec![0.0; rows];
        scaling.apply(&it.z, &mut lambda, false);
        let kkt = match Kkt::new(&g, &plan, cones, scaling) {
            Ok(k) => k,
            Err(_) => {
                stalls = 3;
                continue;
            }
        };
        let mu = r.gap / nu;

        // Affine-scaling predictor.
        let mut ll = vec![0.0; rows];
        cones::product(cones, &lambda, &lambda, &mut ll);
        let rc_aff: Vec<f64> = ll.iter().map(|v| -v).collect();
        let (_, ds_a, dz_a) = kkt.solve(&r.rx, &r.rz, &lambda, &rc_aff);
        let alpha_aff = cones::max_step(cones, &it.s, &ds_a)
            .min(cones::max_step(cones, &it.z, &dz_a))
            .min(1.0);
        let s_next: Vec<f64> = (0..rows).map(|i| it.s[i] + alpha_aff * ds_a[i]).collect();
        let z_next: Vec<f64> = (0..rows).map(|i| it.z[i] + alpha_aff * dz_a[i]).collect();
        let rho = (dot(&s_next, &z_next) / r.gap).clamp(0.0, 1.0);
        let sigma = rho.powi(3);

        // Corrector with the second-order term (W^{-1} ds_a) o (W dz_a).
        let mut sa = vec![0.0; rows];
        let mut za = vec![0.0; rows];
        kkt.scaling.apply(&ds_a, &mut sa, true);
        kkt.scaling.apply(&dz_a, &mut za, false);
        let mut cross = vec![0.0; rows];
        cones::product(cones, &sa, &za, &mut cross);
        let rc: Vec<f64> = (0..rows)
            .map(|i| -ll[i] - cross[i] + sigma * mu * e[i])
            .collect();
        let (dx, ds, dz) = kkt.solve(&r.rx, &r.rz, &lambda, &rc);
        let alpha_max = cones::max_step(cones, &it.s, &ds).min(cones::max_step(cones, &it.z, &dz));
        let alpha = (0.99 * alpha_max).min(1.0);
        if !(alpha > 1e-10) || dx.iter().any(|v| !v.is_finite()) {
            stalls += 1;
            continue;
        }
        stalls = 0;
        for j in 0..it.x.len() {
            it.x[j] += alpha * dx[j];
        }
        for i in 0..rows {
            it.s[i] += alpha * ds[i];
            it.z[i] += alpha * dz[i];
        }
    }
    unreachable!("loop returns on the final iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // maximize x1 + 2 x2 s.t. x1 + x2 <= 1, x >= 0, optimum at (0, 1).
        let prog = ConeProgram {
            c: vec![-1.0, -2.0],
            g: DMatrix::from_row_slice(3, 2, &[1.0, 1.0, -1.0, 0.0, 0.0, -1.0]),
            h: vec![1.0, 0.0, 0.0],
            cones: vec![Cone::NonNeg(3)],
        };
        let sol = solve(&prog, &IpmSettings::default()).unwrap();
        assert_eq!(sol.status, IpmStatus::Optimal);
        assert!(sol.x[0].abs() < 1e-7 && (sol.x[1] - 1.0).abs() < 1e-7, "{:?}", sol.x);
        assert!((sol.primal_objective + 2.0).abs() < 1e-8);
    }

    #[test]
    fn distance_to_half_plane() {
        // minimize t s.t. ||x - (1, 2)|| <= t and x1 + x2 <= 0. The distance
        // from (1, 2) to the half plane is 3 / sqrt 2 at x = (-0.5, 0.5).
        let prog = ConeProgram {
            c: vec![0.0, 0.0, 1.0],
            g: DMatrix::from_row_slice(
                4,
                3,
                &[
                    1.0, 1.0, 0.0, //
                    0.0, 0.0, -1.0, //
                    -1.0, 0.0, 0.0, //
                    0.0, -1.0, 0.0,
                ],
            ),
            h: vec![0.0, 0.0, -1.0, -2.0],
            cones: vec![Cone::NonNeg(1), Cone::Soc(3)],
        };
        let sol = solve(&prog, &IpmSettings::default()).unwrap();
        let expected = 3.0 / 2f64.sqrt();
        assert!((sol.primal_objective - expected).abs() < 1e-7, "{sol:?}");
        assert!((sol.x[0] + 0.5).abs() < 1e-6 && (sol.x[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn inconsistent_dimensions_are_rejected() {
        let prog = ConeProgram {
            c: vec![1.0],
            g: DMatrix::zeros(2, 1),
            h: vec![0.0],
            cones: vec![Cone::NonNeg(2)],
        };
        assert!(matches!(
            solve(&prog, &IpmSettings::default()),
            Err(Error::Solver(_))
        ));
    }
}
