//! Seeded random instances: Ginibre states, Haar unitaries, random channels.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::{normalize_psd, re, CMatrix, CVector, QuantumChannel, C64};

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// A Hermitian matrix with Gaussian entries.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, d);
    (&g + g.adjoint()) * re(0.5)
}

/// Full-rank Ginibre density matrix.
pub fn density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, d);
    normalize_psd(&(&g * g.adjoint()))
}

/// Ginibre density matrix of rank at most `rank`.
pub fn density_of_rank<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, rank);
    normalize_psd(&(&g * g.adjoint()))
}

/// Random probability vector (normalized exponential weights).
pub fn probabilities<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..d)
        .map(|_| -libm::log(1.0 - rng.gen::<f64>()) + 1e-3)
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

pub fn diagonal_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let p = probabilities(rng, d);
    CMatrix::from_diagonal(&CVector::from_iterator(d, p.into_iter().map(re)))
}

/// Haar-random unitary (QR of a Ginibre matrix with phase fix).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = gaussian_matrix(rng, d, d);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { re(1.0) };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Random unit vector.
pub fn pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    let g = gaussian_matrix(rng, d, 1);
    let n = g.norm();
    CVector::from_iterator(d, g.iter().map(|z| z / n))
}

/// Density matrix whose spectrum has repeated eigenvalues.
pub fn degenerate_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let levels = rng.gen_range(1..=d.max(1));
    let vals: Vec<f64> = (0..levels).map(|_| rng.gen::<f64>() + 0.05).collect();
    let diag: Vec<C64> = (0..d).map(|i| re(vals[i % levels])).collect();
    let u = unitary(rng, d);
    let m = &u * CMatrix::from_diagonal(&CVector::from_vec(diag)) * u.adjoint();
    normalize_psd(&m)
}

/// Random channel from a Haar isometry `A' → B ⊗ E`, `|E| = kraus_count`.
pub fn channel<R: Rng + ?Sized>(
    rng: &mut R,
    kraus_count: usize,
    input_dim: usize,
    output_dim: usize,
) -> QuantumChannel {
    let big = kraus_count * output_dim;
    assert!(big >= input_dim, "isometry needs kraus_count * output_dim >= input_dim");
    let u = unitary(rng, big);
    let v = u.columns(0, input_dim).into_owned();
    let kraus = (0..kraus_count)
        .map(|k| v.rows(k * output_dim, output_dim).into_owned())
        .collect();
    QuantumChannel::new(kraus).expect("isometry slices form a channel")
}
