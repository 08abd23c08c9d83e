//! Fréchet derivatives of spectral functions (Daleckii–Krein formula).

use crate::operator::{CMatrix, Eigensystem};

/// `Df(X)[W] = U (Γ ∘ U†WU) U†` with `Γ_ij = f^{[1]}(x_i, x_j)`.
///
/// The map is self-adjoint for the Hilbert–Schmidt inner product, so this is
/// also the gradient of `X ↦ tr(W f(X))`.
pub(crate) fn frechet(eig: &Eigensystem, w: &CMatrix, divided: impl Fn(f64, f64) -> f64) -> CMatrix {
    let u = &eig.vectors;
    let mut m = u.adjoint() * w * u;
    let d = eig.dim();
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] *= divided(eig.values[i], eig.values[j]);
        }
    }
    u * m * u.adjoint()
}

/// First divided difference of `x ↦ x^p` on positive reals.
pub(crate) fn power_divided(p: f64) -> impl Fn(f64, f64) -> f64 {
    move |a, b| {
        let (a, b) = (a.max(1e-300), b.max(1e-300));
        let x = (a - b) / b;
        if x.abs() < 1e-10 {
            p * libm::pow(b, p - 1.0)
        } else {
            libm::pow(b, p - 1.0) * libm::expm1(p * libm::log1p(x)) / x
        }
    }
}

/// First divided difference of `log₂` on positive reals.
pub(crate) fn log2_divided(a: f64, b: f64) -> f64 {
    let (a, b) = (a.max(1e-300), b.max(1e-300));
    let x = (a - b) / b;
    if x.abs() < 1e-10 {
        1.0 / (b * core::f64::consts::LN_2)
    } else {
        libm::log1p(x) / (x * b * core::f64::consts::LN_2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{eigh, max_abs, psd_log2, psd_power, re};
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random::density(&mut rng, 4);
        let e = random::hermitian(&mut rng, 4);
        let h = 1e-6;
        let eig = eigh(&x);
        for p in [-0.4, 0.5, 2.5] {
            let fd = (psd_power(&(&x + &e * re(h)), p) - psd_power(&(&x - &e * re(h)), p)) * re(0.5 / h);
            let an = frechet(&eig, &e, power_divided(p));
            assert!(max_abs(&(fd - an)) < 1e-6, "p = {p}");
        }
        let fd = (psd_log2(&(&x + &e * re(h))) - psd_log2(&(&x - &e * re(h)))) * re(0.5 / h);
        let an = frechet(&eig, &e, log2_divided);
        assert!(max_abs(&(fd - an)) < 1e-6);
    }

    #[test]
    fn divided_differences_are_continuous() {
        let f = power_divided(0.3);
        assert!((f(0.5, 0.5) - f(0.5 + 1e-9, 0.5)).abs() < 1e-8);
        assert!((log2_divided(0.2, 0.2) - log2_divided(0.2 + 1e-9, 0.2)).abs() < 1e-7);
    }
}
