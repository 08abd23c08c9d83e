//! Desk-scale entanglement-assisted codes: Heisenberg–Weyl encodings on shared
//! block-maximally-entangled states, square-root-measurement decoding and
//! exact success probabilities.
//!
//! Signal states and decoders act on `(B̃_1 B_1) ⊗ ⋯ ⊗ (B̃_n B_n)`, where `B̃`
//! is the receiver's share of the entangled state and `B` the channel output.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator::{
    eigh, max_abs, re, shift_phase, tensor_product, trace_product, CMatrix, DensityOperator, PureState,
    QuantumChannel, StateEnsemble, C64,
};
use crate::{Error, Result};

/// Largest decoder dimension `(|B̃||B|)^n`.
pub const CODE_MAX_DIM: usize = 1 << 12;
/// Tolerance for a shared state being maximally entangled on orthogonal blocks.
pub const BLOCK_TOL: f64 = 1e-8;

/// Index `(y, z)` of `V_{y,z} = Σ_x e^{2πixz/d} |x+y mod d⟩⟨x|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HeisenbergWeylIndex {
    pub d: usize,
    pub y: usize,
    pub z: usize,
}

impl HeisenbergWeylIndex {
    pub fn new(d: usize, y: usize, z: usize) -> Result<Self> {
        if d == 0 || y >= d || z >= d {
            return Err(Error::InvalidParameter(format!("Heisenberg–Weyl index ({y}, {z}) invalid for d = {d}")));
        }
        Ok(Self { d, y, z })
    }

    /// The `k`-th of the `d²` indices, with `y` varying slowest.
    pub fn from_flat(d: usize, k: usize) -> Self {
        Self { d, y: k / d, z: k % d }
    }
}

/// `V_{y,z}`.
pub fn heisenberg_weyl(idx: HeisenbergWeylIndex) -> CMatrix {
    shift_phase(idx.d, idx.y, idx.z)
}

/// One block `|Ψ^t⟩ = k^{-1/2} Σ_x |a_x⟩|b_x⟩` of the shared state.
#[derive(Clone, Debug)]
pub struct EntangledBlock {
    pub weight: f64,
    /// Columns `a_x` on the receiver share `B̃`.
    pub receiver_basis: CMatrix,
    /// Columns `b_x` on the sender share `Ã`.
    pub sender_basis: CMatrix,
}

impl EntangledBlock {
    pub fn dim(&self) -> usize {
        self.receiver_basis.ncols()
    }

    fn vector(&self) -> crate::CVector {
        let k = self.dim();
        let mut v = crate::CVector::zeros(self.receiver_basis.nrows() * self.sender_basis.nrows());
        for x in 0..k {
            v += crate::operator::tensor_vectors(
                &self.receiver_basis.column(x).into_owned(),
                &self.sender_basis.column(x).into_owned(),
            );
        }
        v * re(1.0 / libm::sqrt(k as f64))
    }
}

/// The single-copy shared state `Σ_t q(t) Ψ^t` on `B̃ ⊗ Ã`.
#[derive(Clone, Debug)]
pub struct SharedState {
    pub blocks: Vec<EntangledBlock>,
    pub receiver_dim: usize,
    pub sender_dim: usize,
}

impl SharedState {
    /// `Φ` on `ℂ^d ⊗ ℂ^d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let id = CMatrix::identity(d, d);
        Self {
            blocks: vec![EntangledBlock {
                weight: 1.0,
                receiver_basis: id.clone(),
                sender_basis: id,
            }],
            receiver_dim: d,
            sender_dim: d,
        }
    }

    /// Reads the blocks off an ensemble of pure states, each maximally
    /// entangled on its support, with mutually orthogonal supports on both sides.
    pub fn from_ensemble(ens: &StateEnsemble) -> Result<Self> {
        let items = ens.items();
        let (dr, ds) = match *items[0].1.dims() {
            [a, b] => (a, b),
            ref other => return Err(Error::Shape(format!("expected bipartite states, got dims {other:?}"))),
        };
        let mut blocks: Vec<EntangledBlock> = Vec::new();
        for (t, (q, rho)) in items.iter().enumerate() {
            if *q == 0.0 {
                continue;
            }
            let e = eigh(rho.matrix());
            if e.rank() != 1 {
                return Err(Error::InvalidParameter(format!("ensemble member {t} is not pure")));
            }
            let top = e.vectors.column(e.values.len() - 1).into_owned();
            let m = CMatrix::from_fn(dr, ds, |i, j| top[i * ds + j]);
            let svd = m.svd(true, true);
            let u = svd.u.expect("requested");
            let vt = svd.v_t.expect("requested");
            let keep: Vec<usize> = (0..svd.singular_values.len())
                .filter(|&x| svd.singular_values[x] > BLOCK_TOL)
                .collect();
            let k = keep.len() as f64;
            if keep.iter().any(|&x| (svd.singular_values[x] * svd.singular_values[x] * k - 1.0).abs() > BLOCK_TOL) {
                return Err(Error::InvalidParameter(format!(
                    "ensemble member {t} is not maximally entangled on its support"
                )));
            }
            let a = CMatrix::from_fn(dr, keep.len(), |i, c| u[(i, keep[c])]);
            let b = CMatrix::from_fn(ds, keep.len(), |i, c| vt[(keep[c], i)]);
            for other in &blocks {
                let overlap = max_abs(&(other.receiver_basis.adjoint() * &a))
                    .max(max_abs(&(other.sender_basis.adjoint() * &b)));
                if overlap > BLOCK_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "ensemble member {t} overlaps an earlier block"
                    )));
                }
            }
            blocks.push(EntangledBlock {
                weight: *q,
                receiver_basis: a,
                sender_basis: b,
            });
        }
        Ok(Self {
            blocks,
            receiver_dim: dr,
            sender_dim: ds,
        })
    }

    /// `Σ_t q(t) Ψ^t` on `B̃ ⊗ Ã`.
    pub fn density(&self) -> CMatrix {
        let d = self.receiver_dim * self.sender_dim;
        let mut out = CMatrix::zeros(d, d);
        for b in &self.blocks {
            let v = b.vector();
            out += &v * v.adjoint() * re(b.weight);
        }
        out
    }

    /// Number of block Heisenberg–Weyl operators `⊕_t V^t`, `Π_t k_t²`.
    pub fn group_size(&self) -> usize {
        self.blocks.iter().map(|b| b.dim() * b.dim()).product()
    }

    fn indices(&self, g: usize) -> Vec<HeisenbergWeylIndex> {
        let mut rem = g;
        self.blocks
            .iter()
            .map(|b| {
                let k = b.dim();
                let idx = HeisenbergWeylIndex::from_flat(k, rem % (k * k));
                rem /= k * k;
                idx
            })
            .collect()
    }

    /// `⊕_t V^t` on the receiver share, identity off the blocks.
    pub fn receiver_unitary(&self, g: usize) -> CMatrix {
        let mut u = CMatrix::identity(self.receiver_dim, self.receiver_dim);
        for (b, idx) in self.blocks.iter().zip(self.indices(g)) {
            let a = &b.receiver_basis;
            u += a * (heisenberg_weyl(idx) - CMatrix::identity(idx.d, idx.d)) * a.adjoint();
        }
        u
    }

    /// `⊕_t (V^t)^T` on the sender share, transposed in the basis paired with the receiver's.
    pub fn sender_unitary(&self, g: usize) -> CMatrix {
        let mut u = CMatrix::identity(self.sender_dim, self.sender_dim);
        for (b, idx) in self.blocks.iter().zip(self.indices(g)) {
            let s = &b.sender_basis;
            u += s * (heisenberg_weyl(idx).transpose() - CMatrix::identity(idx.d, idx.d)) * s.adjoint();
        }
        u
    }
}

/// Where the message unitary is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingSide {
    /// `(U_m)^T` on the sender share before the channel (the physical code).
    Sender,
    /// `U_m` on the receiver share after the channel (the equivalent form).
    Receiver,
}

/// How codewords are drawn from the block Heisenberg–Weyl group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CodebookSampling {
    /// Each copy of each codeword independently uniform.
    #[default]
    Independent,
    /// Distinct codewords, uniform among subsets of size `M`.
    WithoutReplacement,
}

/// Per-copy signal factors `ω_g` for every group element `g`.
fn copy_signals(channel: &QuantumChannel, shared: &SharedState, side: EncodingSide) -> Result<Vec<CMatrix>> {
    if channel.input_dim() != shared.sender_dim {
        return Err(Error::Shape(format!(
            "channel input dim {} differs from the sender share dim {}",
            channel.input_dim(),
            shared.sender_dim
        )));
    }
    let rho = shared.density();
    let dr = shared.receiver_dim;
    let db = channel.output_dim();
    let base = channel.apply_to_second(&rho, dr);
    (0..shared.group_size())
        .map(|g| {
            Ok(match side {
                EncodingSide::Receiver => {
                    let u = tensor_product(&shared.receiver_unitary(g), &CMatrix::identity(db, db));
                    &u * &base * u.adjoint()
                }
                EncodingSide::Sender => {
                    let u = tensor_product(&CMatrix::identity(dr, dr), &shared.sender_unitary(g));
                    channel.apply_to_second(&(&u * &rho * u.adjoint()), dr)
                }
            })
        })
        .collect()
}

/// `X ↦ (1 ⊗ op ⊗ 1) X` with `op` on leg `leg` of `n` legs of dimension `d`.
fn apply_on_leg(x: &CMatrix, op: &CMatrix, leg: usize, d: usize, n: usize) -> CMatrix {
    let post = d.pow((n - leg - 1) as u32);
    let pre = d.pow(leg as u32);
    let rows = x.nrows();
    let mut out = CMatrix::zeros(rows, x.ncols());
    let entries: Vec<(usize, usize, C64)> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, op[(i, j)]))
        .filter(|&(_, _, c)| c != C64::new(0.0, 0.0))
        .collect();
    for (src_col, dst_col) in x.as_slice().chunks_exact(rows).zip(out.as_mut_slice().chunks_exact_mut(rows)) {
        for p in 0..pre {
            for &(i, j, c) in &entries {
                let dst = &mut dst_col[(p * d + i) * post..(p * d + i + 1) * post];
                let src = &src_col[(p * d + j) * post..(p * d + j + 1) * post];
                for (o, v) in dst.iter_mut().zip(src) {
                    *o += c * v;
                }
            }
        }
    }
    out
}

fn kron_all(factors: &[&CMatrix]) -> CMatrix {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = out.kronecker(*f);
    }
    out
}

/// An entanglement-assisted code for `N^{⊗n}` with a square-root-measurement decoder.
///
/// The decoder is stored as `S^{-1/2}` (pseudo-inverse on the support of
/// `S = Σ_m ρ_m`) together with the signal factors, and `Λ^m = S^{-1/2} ρ_m S^{-1/2}`
/// is formed on demand. `Σ_m Λ^m` is the support projector of `S`; its
/// complement is the discard outcome.
#[derive(Clone, Debug)]
pub struct EACode {
    pub n: usize,
    /// Number of messages `M`.
    pub size: usize,
    /// Messages `0..active` carry Heisenberg–Weyl codewords and decoder elements;
    /// the rest are padding with identity encoding and `Λ^m = 0`.
    pub active: usize,
    pub shared: SharedState,
    /// Group element per copy, per active message.
    pub codewords: Vec<Vec<usize>>,
    pub seed: u64,
    pub sampling: CodebookSampling,
    /// Non-fatal notes such as `M` exceeding the decoder dimension.
    pub warnings: Vec<String>,
    leg_dim: usize,
    design_signals: Vec<CMatrix>,
    inv_sqrt: CMatrix,
}

/// `M = ⌊2^{nR}⌋`, at least 1.
pub fn message_count(n: usize, rate: f64) -> Result<usize> {
    let m = libm::floor(libm::exp2(n as f64 * rate));
    if !(m.is_finite() && m < 1e15) {
        return Err(Error::SizeLimit(format!("2^(nR) = {m} messages")));
    }
    Ok((m as usize).max(1))
}

/// Random Heisenberg–Weyl code of size `⌊2^{nR}⌋` for `N^{⊗n}` with decoder designed for `N`.
pub fn build_ea_code(
    channel: &QuantumChannel,
    n: usize,
    shared: &SharedState,
    rate: f64,
    seed: u64,
    sampling: CodebookSampling,
) -> Result<EACode> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(Error::InvalidParameter(format!("rate must be nonnegative, got {rate}")));
    }
    let leg_dim = shared.receiver_dim * channel.output_dim();
    let dim = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(leg_dim).filter(|&d| d <= CODE_MAX_DIM));
    let Some(dim) = dim else {
        return Err(Error::SizeLimit(format!("decoder dimension {leg_dim}^{n} exceeds {CODE_MAX_DIM}")));
    };
    let size = message_count(n, rate)?;
    let g = shared.group_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codewords: Vec<Vec<usize>> = match sampling {
        CodebookSampling::Independent => (0..size).map(|_| (0..n).map(|_| rng.gen_range(0..g)).collect()).collect(),
        CodebookSampling::WithoutReplacement => {
            let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(g));
            match total {
                Some(total) if size <= total => rand::seq::index::sample(&mut rng, total, size)
                    .into_iter()
                    .map(|mut w| {
                        (0..n)
                            .map(|_| {
                                let x = w % g;
                                w /= g;
                                x
                            })
                            .collect()
                    })
                    .collect(),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "{size} distinct codewords requested from a group of size {g}^{n}"
                    )))
                }
            }
        }
    };
    let mut warnings = Vec::new();
    if size > dim {
        warnings.push(format!("{size} messages exceed the decoder dimension {dim}"));
    }
    let design_signals = copy_signals(channel, shared, EncodingSide::Receiver)?;
    let mut s = CMatrix::zeros(dim, dim);
    for word in &codewords {
        let factors: Vec<&CMatrix> = word.iter().map(|&g| &design_signals[g]).collect();
        s += kron_all(&factors);
    }
    let e = eigh(&s);
    let inv_sqrt = e.support_function(|v| 1.0 / libm::sqrt(v));
    Ok(EACode {
        n,
        size,
        active: size,
        shared: shared.clone(),
        codewords,
        seed,
        sampling,
        warnings,
        leg_dim,
        design_signals,
        inv_sqrt,
    })
}

impl EACode {
    /// Decoder dimension `(|B̃||B|)^n`.
    pub fn decoder_dim(&self) -> usize {
        self.inv_sqrt.nrows()
    }

    /// `(U_m)^T` on `Ã^n` (sender) or `U_m` on `B̃^n` (receiver); identity for padding messages.
    pub fn encoder_unitary(&self, m: usize, side: EncodingSide) -> Result<CMatrix> {
        if m >= self.size {
            return Err(Error::InvalidParameter(format!("message {m} out of range {}", self.size)));
        }
        let locals: Vec<CMatrix> = (0..self.n)
            .map(|i| {
                let g = if m < self.active { self.codewords[m][i] } else { 0 };
                match side {
                    EncodingSide::Sender => self.shared.sender_unitary(g),
                    EncodingSide::Receiver => self.shared.receiver_unitary(g),
                }
            })
            .collect();
        let refs: Vec<&CMatrix> = locals.iter().collect();
        Ok(kron_all(&refs))
    }

    /// `Λ^m` on `(B̃B)^n`.
    pub fn decoder_element(&self, m: usize) -> Result<CMatrix> {
        if m >= self.size {
            return Err(Error::InvalidParameter(format!("message {m} out of range {}", self.size)));
        }
        let d = self.decoder_dim();
        if m >= self.active {
            return Ok(CMatrix::zeros(d, d));
        }
        let factors: Vec<&CMatrix> = self.codewords[m].iter().map(|&g| &self.design_signals[g]).collect();
        Ok(&self.inv_sqrt * kron_all(&factors) * &self.inv_sqrt)
    }

    /// Extends the code to `size` messages; the new ones use identity encoding and `Λ^m = 0`.
    pub fn pad_to(&self, size: usize) -> Result<Self> {
        if size < self.size {
            return Err(Error::InvalidParameter(format!("cannot pad {} messages down to {size}", self.size)));
        }
        let mut out = self.clone();
        out.size = size;
        Ok(out)
    }
}

/// `P_s = (1/M) Σ_m tr[N^{⊗n}∘ℰ^m(ρ) Λ^m]`, evaluated exactly.
pub fn success_probability(channel: &QuantumChannel, code: &EACode, side: EncodingSide) -> Result<f64> {
    if channel.output_dim() * code.shared.receiver_dim != code.leg_dim {
        return Err(Error::Shape(format!(
            "channel output dim {} does not match the code",
            channel.output_dim()
        )));
    }
    let signals = copy_signals(channel, &code.shared, side)?;
    let (d, n) = (code.leg_dim, code.n);
    let mut total = 0.0;
    for word in &code.codewords[..code.active] {
        let mut y = code.inv_sqrt.clone();
        for (i, &g) in word.iter().enumerate() {
            y = apply_on_leg(&y, &signals[g], i, d, n);
        }
        total += trace_product(&y, &y).re;
    }
    Ok((total / code.size as f64).clamp(0.0, 1.0))
}

/// A quantum code: encoder `M ⊗ Ã → A`, decoder `B ⊗ B̃ → M`, shared state on `Ã ⊗ B̃`.
#[derive(Clone, Debug)]
pub struct QuantumCode {
    pub message_dim: usize,
    pub encoder: QuantumChannel,
    pub decoder: QuantumChannel,
    /// On `Ã ⊗ B̃`.
    pub shared: DensityOperator,
}

impl QuantumCode {
    /// Identity encoding and decoding with no shared entanglement.
    pub fn trivial(d: usize) -> Self {
        Self {
            message_dim: d,
            encoder: QuantumChannel::identity(d),
            decoder: QuantumChannel::identity(d),
            shared: DensityOperator::maximally_mixed(1),
        }
    }
}

/// `P_f = F(𝒟∘𝒩∘ℰ(Ψ_{M'M} ⊗ ρ_{ÃB̃}), Ψ_{M'M})` with `F(ρ, σ) = ‖√ρ√σ‖₁`.
pub fn entanglement_fidelity(channel: &QuantumChannel, code: &QuantumCode) -> Result<f64> {
    let dm = code.message_dim;
    let [da, db] = match *code.shared.dims() {
        [a, b] => [a, b],
        [a] if a == 1 => [1, 1],
        ref other => return Err(Error::Shape(format!("shared state dims {other:?} are not bipartite"))),
    };
    if code.encoder.input_dim() != dm * da || code.encoder.output_dim() != channel.input_dim() {
        return Err(Error::Shape("encoder dims do not match".into()));
    }
    if code.decoder.input_dim() != channel.output_dim() * db || code.decoder.output_dim() != dm {
        return Err(Error::Shape("decoder dims do not match".into()));
    }
    let psi = PureState::maximally_entangled(dm).density();
    let start = psi.tensor(&DensityOperator::new_unchecked(code.shared.matrix().clone(), &[da, db]));
    let encoded = code.encoder.apply_on_range(&start, 1, 2)?;
    let sent = channel.apply(&encoded, 1)?;
    let out = code.decoder.apply_on_range(&sent, 1, 2)?;
    let overlap = trace_product(psi.matrix(), out.matrix()).re;
    Ok(libm::sqrt(overlap.max(0.0)).min(1.0))
}

/// Success probability at one blocklength.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationPoint {
    pub n: usize,
    pub messages: usize,
    pub success_probability: f64,
    /// `-(1/n) log P_s`, infinite when `P_s = 0`.
    pub exponent: f64,
}

/// Least-squares fit of `-log P_s` against `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
    /// Blocklengths dropped because `P_s = 0`.
    pub dropped: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    pub rate: f64,
    pub seed: u64,
    pub points: Vec<SimulationPoint>,
}

/// Builds and evaluates one code per blocklength, seeding blocklength `n` with `seed + n`.
pub fn simulate(
    channel: &QuantumChannel,
    shared: &SharedState,
    rate: f64,
    blocklengths: &[usize],
    seed: u64,
    sampling: CodebookSampling,
) -> Result<SimulationResult> {
    let points = blocklengths
        .iter()
        .map(|&n| {
            let code = build_ea_code(channel, n, shared, rate, seed.wrapping_add(n as u64), sampling)?;
            let p = success_probability(channel, &code, EncodingSide::Sender)?;
            Ok(SimulationPoint {
                n,
                messages: code.size,
                success_probability: p,
                exponent: 0.0 - libm::log2(p) / n as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationResult { rate, seed, points })
}

/// Slope of `-log₂ P_s` against `n` over the points with `P_s > 0`; needs at least 3 of them.
pub fn empirical_exponent(result: &SimulationResult) -> Result<ExponentFit> {
    let mut dropped = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in &result.points {
        if p.success_probability > 0.0 {
            xs.push(p.n as f64);
            ys.push(-libm::log2(p.success_probability));
        } else {
            dropped.push(p.n);
        }
    }
    if xs.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "need at least 3 blocklengths with positive success probability, got {}",
            xs.len()
        )));
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("blocklengths must not all be equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| { let e = y - intercept - slope * x; e * e }).sum();
    Ok(ExponentFit {
        slope,
        intercept,
        residual: libm::sqrt(rss / k),
        dropped,
    })
}

/// `2 log(n+1) |A|² / n`, the finite-blocklength allowance in the converse check.
pub fn converse_slack(n: usize, input_dim: usize) -> f64 {
    2.0 * libm::log2((n + 1) as f64) * (input_dim * input_dim) as f64 / n as f64
}
