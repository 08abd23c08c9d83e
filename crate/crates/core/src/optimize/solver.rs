//! Exponentiated-gradient (mirror) descent over products of density matrices.
//!
//! Each block `X_b` lives on its own spectraplex. A step is
//! `X_b ← 2^{log X_b − η(G_b − c_b I)} / tr(·)` with a backtracking line search.
//! Gradients are central finite differences along an orthonormal basis of
//! traceless Hermitian directions, so perturbed points keep unit trace.
//!
//! Termination uses the first-order residual
//! `‖√X (G − c) √X‖_F + (c − λ_min(G))₊`, `c = tr(XG)`, summed over blocks,
//! which vanishes exactly at minimizers of a convex objective.

use alloc::vec;
use alloc::vec::Vec;

use crate::operator::{eigh, exp2_hermitian, re, trace_re, CMatrix, C64};
use crate::{Error, Result};

/// Tolerances of the descent.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Residual below which a point is accepted as stationary.
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Central-difference step.
    pub fd_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-7,
            max_iter: 4000,
            fd_step: 1e-5,
        }
    }
}

/// Orthonormal (Hilbert–Schmidt) basis of a real subspace of traceless
/// Hermitian matrices.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    elems: Vec<CMatrix>,
}

impl HermitianBasis {
    /// All traceless Hermitian `d × d` matrices.
    pub fn traceless(d: usize) -> Self {
        let mut span = Vec::with_capacity(d * d);
        for j in 0..d {
            for k in 0..d {
                let mut m = CMatrix::zeros(d, d);
                if j == k {
                    m[(j, j)] = re(1.0);
                } else if j < k {
                    m[(j, k)] = re(1.0);
                    m[(k, j)] = re(1.0);
                } else {
                    m[(j, k)] = C64::new(0.0, 1.0);
                    m[(k, j)] = C64::new(0.0, -1.0);
                }
                span.push(m);
            }
        }
        Self::from_spanning(d, span)
    }

    /// Orthonormalizes the traceless parts of the given Hermitian matrices.
    pub fn from_spanning(d: usize, span: Vec<CMatrix>) -> Self {
        let mut elems: Vec<CMatrix> = Vec::new();
        let id = CMatrix::identity(d, d);
        for m in span {
            let mut v = &m - &id * re(trace_re(&m) / d as f64);
            for e in &elems {
                let c = inner(e, &v);
                v -= e * re(c);
            }
            let n = libm::sqrt(inner(&v, &v));
            if n > 1e-9 {
                elems.push(v * re(1.0 / n));
            }
        }
        Self { dim: d, elems }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Spans all traceless Hermitian matrices.
    pub fn is_full(&self) -> bool {
        self.elems.len() + 1 == self.dim * self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elems
    }

    /// Orthogonal projection onto the span.
    pub fn project(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for e in &self.elems {
            out += e * re(inner(e, m));
        }
        out
    }
}

/// `Re tr(a† b)`.
fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// An objective over a product of density-matrix blocks.
pub trait BlockObjective {
    /// Value at a point; `+∞` marks infeasible points.
    fn value(&mut self, x: &[CMatrix]) -> Result<f64>;

    /// Gradient projected on the bases. The default uses central differences.
    fn gradient(&mut self, x: &[CMatrix], bases: &[HermitianBasis], steps: &[f64]) -> Result<Vec<CMatrix>> {
        finite_difference_gradient(self, x, bases, steps)
    }
}

impl<F: FnMut(&[CMatrix]) -> f64> BlockObjective for F {
    fn value(&mut self, x: &[CMatrix]) -> Result<f64> {
        Ok(self(x))
    }
}

/// Central-difference gradient of `obj.value` along each basis element.
pub fn finite_difference_gradient<O: BlockObjective + ?Sized>(
    obj: &mut O,
    x: &[CMatrix],
    bases: &[HermitianBasis],
    steps: &[f64],
) -> Result<Vec<CMatrix>> {
    let mut point: Vec<CMatrix> = x.to_vec();
    let mut grads = Vec::with_capacity(x.len());
    for (b, basis) in bases.iter().enumerate() {
        let h = steps[b];
        let mut g = CMatrix::zeros(basis.dim(), basis.dim());
        for e in basis.elements() {
            point[b] = &x[b] + e * re(h);
            let fp = obj.value(&point)?;
            point[b] = &x[b] - e * re(h);
            let fm = obj.value(&point)?;
            g += e * re((fp - fm) / (2.0 * h));
        }
        point[b] = x[b].clone();
        grads.push(g);
    }
    Ok(grads)
}

/// Output of [`minimize_blocks`].
#[derive(Clone, Debug)]
pub struct Solution {
    pub blocks: Vec<CMatrix>,
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

struct BlockGeometry {
    log: CMatrix,
    sqrt: CMatrix,
    min_eig: f64,
}

fn geometry(x: &CMatrix) -> BlockGeometry {
    let e = eigh(x);
    let floor = 1e-300;
    BlockGeometry {
        log: e.reconstruct(|v| libm::log2(v.max(floor))),
        sqrt: e.reconstruct(|v| libm::sqrt(v.max(0.0))),
        min_eig: e.min_value(),
    }
}

fn kkt_residual(x_sqrt: &CMatrix, x: &CMatrix, g: &CMatrix) -> (f64, f64) {
    let c = crate::operator::trace_product(x, g).re;
    let d = g - CMatrix::identity(g.nrows(), g.nrows()) * re(c);
    let s = x_sqrt * &d * x_sqrt;
    let gmin = crate::operator::eigvalsh(g).first().copied().unwrap_or(0.0);
    (s.norm() + (c - gmin).max(0.0), c)
}

/// Pulls a starting point slightly into the interior.
pub(crate) fn interior(x: &CMatrix, weight: f64) -> CMatrix {
    let d = x.nrows();
    let m = x * re(1.0 - weight) + CMatrix::identity(d, d) * re(weight / d as f64);
    crate::operator::normalize_psd(&m)
}

struct Probe {
    geo: Vec<BlockGeometry>,
    grads: Vec<CMatrix>,
}

fn probe<O: BlockObjective + ?Sized>(
    obj: &mut O,
    x: &[CMatrix],
    bases: &[HermitianBasis],
    opts: &SolverOptions,
) -> Result<Probe> {
    let geo: Vec<BlockGeometry> = x.iter().map(geometry).collect();
    let steps: Vec<f64> = geo
        .iter()
        .map(|g| opts.fd_step.min(0.25 * g.min_eig).max(1e-12))
        .collect();
    let grads = obj
        .gradient(x, bases, &steps)?
        .into_iter()
        .zip(bases)
        .map(|(g, b)| if b.is_full() { g } else { b.project(&g) })
        .collect();
    Ok(Probe { geo, grads })
}

/// Sufficient-decrease fraction of the line search.
const ARMIJO: f64 = 0.1;

/// `g - tr(x g)·1`: the same pairing with differences of states, with less cancellation.
fn centered(g: &[CMatrix], x: &[CMatrix]) -> Vec<CMatrix> {
    g.iter()
        .zip(x)
        .map(|(g, x)| g - CMatrix::identity(g.nrows(), g.nrows()) * re(crate::operator::trace_product(x, g).re))
        .collect()
}

fn pairing(g: &[CMatrix], a: &[CMatrix], b: &[CMatrix]) -> f64 {
    g.iter()
        .zip(a.iter().zip(b))
        .map(|(g, (a, b))| crate::operator::trace_product(g, &(a - b)).re)
        .sum()
}

/// Minimizes `obj` over the product of spectraplexes, starting from `init`.
///
/// Steps are accepted by an Armijo test on values. Once the predicted
/// decrease drops to the roundoff level of the values, the test switches to
/// the slope at the candidate, which for convex objectives bounds the value
/// change without cancellation.
pub fn minimize_blocks<O: BlockObjective + ?Sized>(
    obj: &mut O,
    init: Vec<CMatrix>,
    bases: &[HermitianBasis],
    opts: &SolverOptions,
) -> Result<Solution> {
    let nb = init.len();
    let mut x: Vec<CMatrix> = init.iter().map(|m| interior(m, 1e-12)).collect();
    let mut f = obj.value(&x)?;
    if !f.is_finite() {
        return Err(Error::InvalidParameter("starting point is infeasible".into()));
    }
    let mut eta: Option<f64> = None;
    let mut residual = f64::INFINITY;
    let mut done = 0;
    let mut current = probe(obj, &x, bases, opts)?;
    for it in 0..=opts.max_iter {
        done = it;
        let mut dirs = Vec::with_capacity(nb);
        residual = 0.0;
        for b in 0..nb {
            let (r, c) = kkt_residual(&current.geo[b].sqrt, &x[b], &current.grads[b]);
            residual += r;
            let d = current.grads[b].nrows();
            dirs.push(&current.grads[b] - CMatrix::identity(d, d) * re(c));
        }
        if residual <= opts.grad_tol {
            return Ok(Solution {
                blocks: x,
                value: f,
                iterations: it,
                residual,
            });
        }
        if it == opts.max_iter {
            break;
        }
        let scale = dirs
            .iter()
            .map(crate::operator::hermitian_norm)
            .fold(0.0, f64::max)
            .max(1e-300);
        let mut step = eta.unwrap_or(1.0 / scale);
        let mut accepted = None;
        for _ in 0..80 {
            let cand: Vec<CMatrix> = (0..nb)
                .map(|b| {
                    let h = &current.geo[b].log - &dirs[b] * re(step);
                    crate::operator::normalize_psd(&exp2_hermitian(&h))
                })
                .collect();
            let dec = pairing(&dirs, &x, &cand);
            let fc = obj.value(&cand)?;
            if fc.is_finite() && dec > 0.0 {
                if dec > 1e-10 * (1.0 + f.abs()) {
                    if fc <= f - ARMIJO * dec {
                        accepted = Some((cand, fc, None));
                        break;
                    }
                } else {
                    let next = probe(obj, &cand, bases, opts)?;
                    let slope = pairing(&centered(&next.grads, &cand), &cand, &x);
                    if slope <= -ARMIJO * dec {
                        accepted = Some((cand, fc, Some(next)));
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        let Some((cand, fc, next)) = accepted else {
            break;
        };
        x = cand;
        f = fc;
        current = match next {
            Some(p) => p,
            None => probe(obj, &x, bases, opts)?,
        };
        eta = Some(step * 2.0);
    }
    Err(Error::NotConverged {
        iterations: done,
        residual,
        best_value: f,
    })
}

/// Single-block convenience wrapper.
pub fn minimize<O: BlockObjective + ?Sized>(
    obj: &mut O,
    init: CMatrix,
    basis: &HermitianBasis,
    opts: &SolverOptions,
) -> Result<Solution> {
    minimize_blocks(obj, vec![init], core::slice::from_ref(basis), opts)
}

/// Golden-section maximization of a concave function on `[a, b]`.
///
/// Returns `(argmax, max)` among all evaluated points, endpoints included.
pub fn golden_section_max<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let (mut lo, mut hi) = (a, b);
    let mut best = (a, f(a)?);
    let fb = f(b)?;
    if fb > best.1 {
        best = (b, fb);
    }
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    Ok(best)
}
