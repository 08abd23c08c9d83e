use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::spectral::{max_abs, min_eigenvalue, re, CMatrix, C64};
use super::state::{DensityOperator, PureState};
use super::tensor::{check_dims, embed};
use crate::{Error, Result};

/// Tolerance on `Σ K†K = I` and on the Choi matrix being PSD.
pub const KRAUS_TOL: f64 = 1e-9;

/// `Σ_x e^{2πixz/d} |x+y mod d⟩⟨x|`.
pub(crate) fn shift_phase(d: usize, y: usize, z: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for x in 0..d {
        let theta = 2.0 * core::f64::consts::PI * ((x * z) % d) as f64 / d as f64;
        m[((x + y) % d, x)] = C64::new(libm::cos(theta), libm::sin(theta));
    }
    m
}

/// A CPTP map from `A'` (input) to `B` (output) in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    input_dim: usize,
    output_dim: usize,
    kraus: Vec<CMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidChannel("no Kraus operators".into()));
        };
        let (dout, din) = first.shape();
        if din == 0 || dout == 0 {
            return Err(Error::InvalidChannel("empty Kraus operator".into()));
        }
        if kraus.iter().any(|k| k.shape() != (dout, din)) {
            return Err(Error::InvalidChannel("Kraus operators differ in shape".into()));
        }
        let mut sum = CMatrix::zeros(din, din);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        let dev = max_abs(&(sum - CMatrix::identity(din, din)));
        if dev > KRAUS_TOL {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators are not trace preserving (deviation {dev:e})"
            )));
        }
        let ch = Self {
            input_dim: din,
            output_dim: dout,
            kraus,
        };
        let lmin = min_eigenvalue(&ch.choi_matrix());
        if lmin < -KRAUS_TOL {
            return Err(Error::InvalidChannel(format!(
                "Choi matrix has eigenvalue {lmin:e}"
            )));
        }
        Ok(ch)
    }

    pub(crate) fn new_unchecked(kraus: Vec<CMatrix>) -> Self {
        let (dout, din) = kraus[0].shape();
        Self {
            input_dim: din,
            output_dim: dout,
            kraus,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self::new_unchecked(vec![CMatrix::identity(d, d)])
    }

    /// `ρ ↦ (1-p)ρ + p I/d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        let d2 = (d * d) as f64;
        if !(0.0..=1.0 + 1.0 / (d2 - 1.0)).contains(&p) || d == 0 {
            return Err(Error::InvalidParameter(format!(
                "depolarizing parameter {p} outside the CPTP range"
            )));
        }
        let mut kraus = vec![CMatrix::identity(d, d) * re(libm::sqrt(1.0 - p + p / d2))];
        for y in 0..d {
            for z in 0..d {
                if y == 0 && z == 0 {
                    continue;
                }
                kraus.push(shift_phase(d, y, z) * re(libm::sqrt(p / d2)));
            }
        }
        Self::new(kraus)
    }

    /// `ρ ↦ (1-p)ρ + p Δ(ρ)` with `Δ` the computational-basis dephasing.
    pub fn dephasing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || d == 0 {
            return Err(Error::InvalidParameter(format!(
                "dephasing parameter {p} outside [0, 1]"
            )));
        }
        let mut kraus = vec![CMatrix::identity(d, d) * re(libm::sqrt(1.0 - p))];
        for k in 0..d {
            let mut m = CMatrix::zeros(d, d);
            m[(k, k)] = re(libm::sqrt(p));
            kraus.push(m);
        }
        Self::new(kraus)
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "damping parameter {gamma} outside [0, 1]"
            )));
        }
        let z = re(0.0);
        let k0 = CMatrix::from_row_slice(2, 2, &[re(1.0), z, z, re(libm::sqrt(1.0 - gamma))]);
        let k1 = CMatrix::from_row_slice(2, 2, &[z, re(libm::sqrt(gamma)), z, z]);
        Self::new(vec![k0, k1])
    }

    /// Measure-and-prepare channel of a classical transition matrix,
    /// `w[x][y] = W(y|x)`.
    pub fn classical(w: &[Vec<f64>]) -> Result<Self> {
        let din = w.len();
        let dout = w.first().map_or(0, Vec::len);
        let mut kraus = Vec::new();
        for (x, row) in w.iter().enumerate() {
            if row.len() != dout {
                return Err(Error::InvalidChannel("ragged transition matrix".into()));
            }
            for (y, &p) in row.iter().enumerate() {
                if p < 0.0 {
                    return Err(Error::Probability(p));
                }
                if p > 0.0 {
                    let mut k = CMatrix::zeros(dout, din);
                    k[(y, x)] = re(libm::sqrt(p));
                    kraus.push(k);
                }
            }
        }
        Self::new(kraus)
    }

    /// Replaces every input by `I/d`.
    pub fn completely_depolarizing(d: usize) -> Self {
        Self::depolarizing(d, 1.0).expect("p = 1 is valid")
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `Σ K m K†` on a raw matrix of the input dimension.
    pub fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.output_dim, self.output_dim);
        for k in &self.kraus {
            out += k * m * k.adjoint();
        }
        out
    }

    /// Unnormalized Choi matrix `Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)`.
    pub fn choi_matrix(&self) -> CMatrix {
        let d = self.input_dim;
        let mut v = CMatrix::zeros(d * d, 1);
        for x in 0..d {
            v[(x * d + x, 0)] = re(1.0);
        }
        self.apply_to_second(&(&v * v.adjoint()), d)
    }

    /// `(id_A ⊗ N)(Φ)` with `A` first.
    pub fn choi_state(&self) -> DensityOperator {
        let phi = PureState::maximally_entangled(self.input_dim).density();
        let m = self.apply_to_second(phi.matrix(), self.input_dim);
        DensityOperator::new_unchecked(m, &[self.input_dim, self.output_dim])
    }

    /// `(id ⊗ N)` on a matrix over `A ⊗ A'` with `|A| = left`.
    pub(crate) fn apply_to_second(&self, m: &CMatrix, left: usize) -> CMatrix {
        let mut out = CMatrix::zeros(left * self.output_dim, left * self.output_dim);
        for k in &self.kraus {
            let big = embed(k, left, 1);
            out += &big * m * big.adjoint();
        }
        out
    }

    /// Applies the channel to one subsystem of `rho`.
    pub fn apply(&self, rho: &DensityOperator, acting_on: usize) -> Result<DensityOperator> {
        self.apply_on_range(rho, acting_on, 1)
    }

    /// Applies the channel to the contiguous subsystems `start..start+len`,
    /// whose joint dimension must equal the channel input dimension. The
    /// output replaces them by a single system.
    pub fn apply_on_range(
        &self,
        rho: &DensityOperator,
        start: usize,
        len: usize,
    ) -> Result<DensityOperator> {
        let dims = rho.dims();
        if len == 0 || start + len > dims.len() {
            return Err(Error::Shape(format!(
                "subsystems {start}..{} out of range for dims {dims:?}",
                start + len
            )));
        }
        let din: usize = dims[start..start + len].iter().product();
        if din != self.input_dim {
            return Err(Error::Shape(format!(
                "channel input dim {} does not match subsystem dim {din}",
                self.input_dim
            )));
        }
        let left: usize = dims[..start].iter().product();
        let right: usize = dims[start + len..].iter().product();
        let dout = left * self.output_dim * right;
        let mut out = CMatrix::zeros(dout, dout);
        for k in &self.kraus {
            let big = embed(k, left, right);
            out += &big * rho.matrix() * big.adjoint();
        }
        let mut new_dims: Vec<usize> = dims[..start].to_vec();
        new_dims.push(self.output_dim);
        new_dims.extend_from_slice(&dims[start + len..]);
        check_dims(dout, &new_dims)?;
        Ok(DensityOperator::new_unchecked(
            (&out + out.adjoint()) * re(0.5),
            &new_dims,
        ))
    }

    /// `N₂ ∘ N₁` where `self = N₁`.
    pub fn then(&self, next: &QuantumChannel) -> Result<QuantumChannel> {
        if next.input_dim != self.output_dim {
            return Err(Error::Shape("channel composition dims differ".into()));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Ok(Self::new_unchecked(kraus))
    }

    pub fn tensor(&self, other: &QuantumChannel) -> QuantumChannel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        Self::new_unchecked(kraus)
    }

    pub fn tensor_power(&self, n: usize) -> QuantumChannel {
        let mut out = QuantumChannel::identity(1);
        for _ in 0..n {
            out = out.tensor(self);
        }
        out
    }
}

/// Applies `channel` to one subsystem.
pub fn apply_channel(
    channel: &QuantumChannel,
    rho: &DensityOperator,
    acting_on: usize,
) -> Result<DensityOperator> {
    channel.apply(rho, acting_on)
}
