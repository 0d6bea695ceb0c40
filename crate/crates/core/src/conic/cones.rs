//! Algebra for products of nonnegative orthants and second-order cones.
//!
//! Vectors are stacked cone by cone in the order of [`Cone`] entries. A
//! second-order cone block `(x0, x1)` requires `x0 >= ||x1||_2`.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    NonNeg(usize),
    Soc(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::NonNeg(n) | Cone::Soc(n) => n,
        }
    }

    /// Barrier degree: one per orthant coordinate, one per Lorentz cone.
    pub fn degree(&self) -> usize {
        match *self {
            Cone::NonNeg(n) => n,
            Cone::Soc(_) => 1,
        }
    }
}

/// Iterates `(cone, offset)` pairs.
pub(crate) fn blocks(cones: &[Cone]) -> impl Iterator<Item = (Cone, usize)> + '_ {
    cones.iter().scan(0usize, |off, &c| {
        let start = *off;
        *off += c.dim();
        Some((c, start))
    })
}

pub(crate) fn degree(cones: &[Cone]) -> usize {
    cones.iter().map(Cone::degree).sum()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `x0^2 - ||x1||^2`, factored to limit cancellation.
fn soc_det(x: &[f64]) -> f64 {
    let n1 = norm(&x[1..]);
    (x[0] - n1) * (x[0] + n1)
}

/// Writes the identity element `e` of the cone product.
pub(crate) fn identity(cones: &[Cone], out: &mut [f64]) {
    for (c, off) in blocks(cones) {
        let blk = &mut out[off..off + c.dim()];
        match c {
            Cone::NonNeg(_) => blk.fill(1.0),
            Cone::Soc(_) => {
                blk.fill(0.0);
                blk[0] = 1.0;
            }
        }
    }
}

/// Jordan product `u o v`.
pub(crate) fn product(cones: &[Cone], u: &[f64], v: &[f64], out: &mut [f64]) {
    for (c, off) in blocks(cones) {
        let r = off..off + c.dim();
        let (u, v, o) = (&u[r.clone()], &v[r.clone()], &mut out[r]);
        match c {
            Cone::NonNeg(_) => {
                for i in 0..u.len() {
                    o[i] = u[i] * v[i];
                }
            }
            Cone::Soc(_) => {
                o[0] = dot(u, v);
                for i in 1..u.len() {
                    o[i] = u[0] * v[i] + v[0] * u[i];
                }
            }
        }
    }
}

/// Solves `lambda o y = a` for `y`.
pub(crate) fn divide(cones: &[Cone], lambda: &[f64], a: &[f64], out: &mut [f64]) {
    for (c, off) in blocks(cones) {
        let r = off..off + c.dim();
        let (l, a, y) = (&lambda[r.clone()], &a[r.clone()], &mut out[r]);
        match c {
            Cone::NonNeg(_) => {
                for i in 0..l.len() {
                    y[i] = a[i] / l[i];
                }
            }
            Cone::Soc(_) => {
                let det = soc_det(l);
                let y0 = (l[0] * a[0] - dot(&l[1..], &a[1..])) / det;
                y[0] = y0;
                for i in 1..l.len() {
                    y[i] = (a[i] - y0 * l[i]) / l[0];
                }
            }
        }
    }
}

/// Largest `alpha` with `x + alpha dx` in the cone product (may be infinite).
/// `x` must be strictly interior.
pub(crate) fn max_step(cones: &[Cone], x: &[f64], dx: &[f64]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (c, off) in blocks(cones) {
        let r = off..off + c.dim();
        let (x, d) = (&x[r.clone()], &dx[r]);
        match c {
            Cone::NonNeg(_) => {
                for i in 0..x.len() {
                    if d[i] < 0.0 {
                        alpha = alpha.min(-x[i] / d[i]);
                    }
                }
            }
            Cone::Soc(_) => {
                // Map x to the identity with the hyperbolic reflection that
                // preserves the cone; then e + a rho stays inside while
                // a (||rho1|| - rho0) <= 1.
                let sd = soc_det(x).sqrt();
                let xb: Vec<f64> = x.iter().map(|v| v / sd).collect();
                let x1d = dot(&xb[1..], &d[1..]);
                let rho0 = (xb[0] * d[0] - x1d) / sd;
                let coef = x1d / (1.0 + xb[0]) - d[0];
                let rho1: Vec<f64> = (1..x.len())
                    .map(|i| (d[i] + coef * xb[i]) / sd)
                    .collect();
                let t = norm(&rho1) - rho0;
                if t > 0.0 {
                    alpha = alpha.min(1.0 / t);
                }
            }
        }
    }
    alpha
}

/// Smallest `alpha` such that `x + alpha e` lies in the closed cone product.
pub(crate) fn boundary_offset(cones: &[Cone], x: &[f64]) -> f64 {
    let mut alpha = f64::NEG_INFINITY;
    for (c, off) in blocks(cones) {
        let x = &x[off..off + c.dim()];
        let a = match c {
            Cone::NonNeg(_) => x.iter().map(|v| -v).fold(f64::NEG_INFINITY, f64::max),
            Cone::Soc(_) => norm(&x[1..]) - x[0],
        };
        alpha = alpha.max(a);
    }
    alpha
}

/// Nesterov-Todd scaling `W` with `W z = W^{-1} s =: lambda`.
#[derive(Debug, Clone)]
pub(crate) enum BlockScaling {
    /// `W = diag(d)` with `d = sqrt(s / z)`.
    NonNeg(Vec<f64>),
    /// `W = beta * [[w0, w1^T], [w1, I + w1 w1^T / (1 + w0)]]` with
    /// `w0^2 - ||w1||^2 = 1`.
    Soc { beta: f64, w: Vec<f64> },
}

#[derive(Debug, Clone)]
pub(crate) struct Scaling {
    cones: Vec<Cone>,
    blocks: Vec<BlockScaling>,
}

impl Scaling {
    pub(crate) fn new(cones: &[Cone], s: &[f64], z: &[f64]) -> Self {
        let blocks = blocks(cones)
            .map(|(c, off)| {
                let r = off..off + c.dim();
                let (s, z) = (&s[r.clone()], &z[r]);
                match c {
                    Cone::NonNeg(_) => BlockScaling::NonNeg(
                        s.iter().zip(z).map(|(s, z)| (s / z).sqrt()).collect(),
                    ),
                    Cone::Soc(_) => {
                        let (sd, zd) = (soc_det(s).sqrt(), soc_det(z).sqrt());
                        let sb: Vec<f64> = s.iter().map(|v| v / sd).collect();
                        let zb: Vec<f64> = z.iter().map(|v| v / zd).collect();
                        let gamma = ((1.0 + dot(&sb, &zb)) / 2.0).sqrt();
                        let mut w: Vec<f64> = sb
                            .iter()
                            .zip(&zb)
                            .map(|(s, z)| (s - z) / (2.0 * gamma))
                            .collect();
                        w[0] = (sb[0] + zb[0]) / (2.0 * gamma);
                        BlockScaling::Soc {
                            beta: (sd / zd).sqrt(),
                            w,
                        }
                    }
                }
            })
            .collect();
        Self {
            cones: cones.to_vec(),
            blocks,
        }
    }

    pub(crate) fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub(crate) fn block(&self, k: usize) -> &BlockScaling {
        &self.blocks[k]
    }

    /// `out = W v` (`inverse = false`) or `out = W^{-1} v`.
    pub(crate) fn apply(&self, v: &[f64], out: &mut [f64], inverse: bool) {
        for ((c, off), blk) in blocks(&self.cones).zip(&self.blocks) {
            let r = off..off + c.dim();
            apply_block(blk, &v[r.clone()], &mut out[r], inverse);
        }
    }
}

pub(crate) fn apply_block(blk: &BlockScaling, v: &[f64], out: &mut [f64], inverse: bool) {
    match blk {
        BlockScaling::NonNeg(d) => {
            for i in 0..v.len() {
                out[i] = if inverse { v[i] / d[i] } else { v[i] * d[i] };
            }
        }
        BlockScaling::Soc { beta, w } => {
            let sign = if inverse { -1.0 } else { 1.0 };
            let scale = if inverse { 1.0 / beta } else { *beta };
            let w1v1 = dot(&w[1..], &v[1..]);
            let coef = sign * v[0] + w1v1 / (1.0 + w[0]);
            out[0] = scale * (w[0] * v[0] + sign * w1v1);
            for i in 1..v.len() {
                out[i] = scale * (v[i] + coef * w[i]);
            }
        }
    }
}
