//! Channel, state and grid specifications given on the command line.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use scexp_core::{CMatrix, DensityOperator, HermitianOperator, QuantumChannel, C64};
use serde::Deserialize;

/// A complex matrix written as rows of `[re, im]` pairs.
type JsonMatrix = Vec<Vec<[f64; 2]>>;

/// A channel file: either Kraus operators or a preset.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    /// Free-form label, not interpreted.
    #[serde(default)]
    #[allow(dead_code)]
    pub name: Option<String>,
    #[serde(default)]
    pub input_dim: Option<usize>,
    #[serde(default)]
    pub output_dim: Option<usize>,
    #[serde(default)]
    pub kraus: Option<Vec<JsonMatrix>>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub param: Option<f64>,
    #[serde(default)]
    pub dim: Option<usize>,
}

/// A state or operator file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    pub matrix: JsonMatrix,
}

fn to_matrix(m: &JsonMatrix, what: &str) -> Result<CMatrix> {
    let rows = m.len();
    if rows == 0 {
        bail!("{what}: empty matrix");
    }
    let cols = m[0].len();
    if let Some((i, r)) = m.iter().enumerate().find(|(_, r)| r.len() != cols) {
        bail!("{what}: row {i} has {} entries, row 0 has {cols}", r.len());
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| C64::new(m[i][j][0], m[i][j][1])))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("{}:{}:{}: {e}", path.display(), e.line(), e.column()))
}

fn preset(kind: &str, param: Option<f64>, dim: Option<usize>) -> Result<QuantumChannel> {
    let need = |what: &str| param.ok_or_else(|| anyhow!("preset {kind} needs a {what}"));
    let d = dim.unwrap_or(2);
    let ch = match kind {
        "identity" => QuantumChannel::identity(param.map_or(Ok(d), |p| as_dim(p))?),
        "depolarizing" => QuantumChannel::depolarizing(d, need("probability")?)?,
        "dephasing" => QuantumChannel::dephasing(d, need("probability")?)?,
        "amplitude-damping" => {
            if d != 2 {
                bail!("amplitude-damping is a qubit channel");
            }
            QuantumChannel::amplitude_damping(need("damping")?)?
        }
        "completely-depolarizing" => QuantumChannel::completely_depolarizing(param.map_or(Ok(d), |p| as_dim(p))?),
        _ => bail!(
            "unknown preset {kind:?}; expected identity, depolarizing, dephasing, amplitude-damping or completely-depolarizing"
        ),
    };
    Ok(ch)
}

fn as_dim(x: f64) -> Result<usize> {
    if x >= 1.0 && x.fract() == 0.0 && x <= 64.0 {
        Ok(x as usize)
    } else {
        bail!("dimension must be a positive integer, got {x}")
    }
}

/// `preset:<kind>[:<param>[:<dim>]]` or a JSON channel file.
///
/// Depolarizing is `ρ ↦ (1-p)ρ + p I/d`; `identity` takes its dimension as the parameter.
pub fn parse_channel(arg: &str) -> Result<QuantumChannel> {
    if let Some(rest) = arg.strip_prefix("preset:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() > 3 {
            bail!("channel preset {arg:?}: expected preset:<kind>[:<param>[:<dim>]]");
        }
        let param = parts.get(1).map(|s| s.parse::<f64>()).transpose().with_context(|| format!("channel preset {arg:?}: parameter"))?;
        let dim = parts.get(2).map(|s| s.parse::<usize>()).transpose().with_context(|| format!("channel preset {arg:?}: dimension"))?;
        return preset(parts[0], param, dim).with_context(|| format!("channel preset {arg:?}"));
    }
    let path = Path::new(arg);
    let spec: ChannelSpec = read_json(path)?;
    channel_from_spec(&spec).with_context(|| format!("channel file {}", path.display()))
}

pub fn channel_from_spec(spec: &ChannelSpec) -> Result<QuantumChannel> {
    let ch = match (&spec.kraus, &spec.preset) {
        (Some(_), Some(_)) => bail!("give either kraus or preset, not both"),
        (None, None) => bail!("missing kraus or preset"),
        (None, Some(kind)) => preset(kind, spec.param, spec.dim)?,
        (Some(kraus), None) => {
            let ks = kraus
                .iter()
                .enumerate()
                .map(|(k, m)| to_matrix(m, &format!("kraus[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            QuantumChannel::new(ks)?
        }
    };
    if let Some(d) = spec.input_dim {
        if d != ch.input_dim() {
            bail!("input_dim {d} does not match the Kraus operators ({})", ch.input_dim());
        }
    }
    if let Some(d) = spec.output_dim {
        if d != ch.output_dim() {
            bail!("output_dim {d} does not match the Kraus operators ({})", ch.output_dim());
        }
    }
    Ok(ch)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("{what}: cannot parse {x:?}")))
        .collect()
}

/// `diag:p1,p2,...`, `mixed:<d>`, `basis:<d>:<k>` or a JSON matrix file.
fn parse_operator(arg: &str) -> Result<(CMatrix, Option<Vec<usize>>)> {
    if let Some(rest) = arg.strip_prefix("diag:") {
        let p = parse_list(rest, "diagonal")?;
        return Ok((HermitianOperator::from_real_diagonal(&p).into_matrix(), None));
    }
    if let Some(rest) = arg.strip_prefix("mixed:") {
        let d: usize = rest.parse().with_context(|| format!("mixed state {arg:?}"))?;
        return Ok((DensityOperator::maximally_mixed(d).matrix().clone(), None));
    }
    if let Some(rest) = arg.strip_prefix("basis:") {
        let (d, k) = rest.split_once(':').ok_or_else(|| anyhow!("basis state {arg:?}: expected basis:<d>:<k>"))?;
        let d: usize = d.parse().with_context(|| format!("basis state {arg:?}"))?;
        let k: usize = k.parse().with_context(|| format!("basis state {arg:?}"))?;
        if k >= d {
            bail!("basis state {arg:?}: index out of range");
        }
        return Ok((DensityOperator::basis_state(d, k).matrix().clone(), None));
    }
    let path = Path::new(arg);
    let spec: MatrixSpec = read_json(path)?;
    let m = to_matrix(&spec.matrix, &path.display().to_string())?;
    Ok((m, spec.dims))
}

pub fn parse_state(arg: &str) -> Result<DensityOperator> {
    let (m, dims) = parse_operator(arg)?;
    let rho = match dims {
        Some(dims) => DensityOperator::new(m, &dims)?,
        None => DensityOperator::from_matrix(m)?,
    };
    Ok(rho)
}

pub fn parse_positive(arg: &str) -> Result<HermitianOperator> {
    let (m, _) = parse_operator(arg)?;
    let h = HermitianOperator::new(m)?;
    if !h.is_psd() {
        bail!("{arg}: operator is not positive semidefinite");
    }
    Ok(h)
}

/// `a,b,c` or an inclusive `start:stop:step` grid.
pub fn parse_grid(arg: &str) -> Result<Vec<f64>> {
    let values = if arg.contains(':') {
        let parts = parse_list(&arg.replace(':', ","), "grid")?;
        let [start, stop, step] = parts[..] else {
            bail!("grid {arg:?}: expected start:stop:step");
        };
        if !(step > 0.0) || !(stop >= start) {
            bail!("grid {arg:?}: need step > 0 and stop >= start");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            bail!("grid {arg:?}: {count} points");
        }
        (0..count).map(|k| start + k as f64 * step).collect()
    } else {
        parse_list(arg, "list")?
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        bail!("grid {arg:?} must be nonempty and finite");
    }
    Ok(values)
}

/// `1,2,5` or an inclusive range `1:5`.
pub fn parse_blocklengths(arg: &str) -> Result<Vec<usize>> {
    let ns: Vec<usize> = if let Some((a, b)) = arg.split_once(':') {
        let a: usize = a.trim().parse().with_context(|| format!("blocklengths {arg:?}"))?;
        let b: usize = b.trim().parse().with_context(|| format!("blocklengths {arg:?}"))?;
        (a..=b).collect()
    } else {
        arg.split(',')
            .map(|x| x.trim().parse().with_context(|| format!("blocklengths: cannot parse {x:?}")))
            .collect::<Result<_>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        bail!("blocklengths {arg:?} must be nonempty and positive");
    }
    Ok(ns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1,2.5,3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("a").is_err());
        assert_eq!(parse_blocklengths("1:3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_blocklengths("2,4").unwrap(), vec![2, 4]);
        assert!(parse_blocklengths("0,1").is_err());
    }

    #[test]
    fn presets() {
        assert_eq!(parse_channel("preset:identity:3").unwrap().input_dim(), 3);
        assert_eq!(parse_channel("preset:depolarizing:0.1").unwrap().output_dim(), 2);
        assert_eq!(parse_channel("preset:dephasing:0.2:3").unwrap().input_dim(), 3);
        assert!(parse_channel("preset:amplitude-damping:0.3").is_ok());
        assert!(parse_channel("preset:depolarizing").is_err());
        assert!(parse_channel("preset:nope:1").is_err());
    }

    #[test]
    fn kraus_spec() {
        let spec: ChannelSpec = serde_json::from_str(
            r#"{"name":"flip","input_dim":2,"output_dim":2,
                "kraus":[[[[0.8,0],[0,0]],[[0,0],[0.8,0]]],[[[0,0],[0.6,0]],[[0.6,0],[0,0]]]]}"#,
        )
        .unwrap();
        let ch = channel_from_spec(&spec).unwrap();
        assert_eq!(ch.kraus().len(), 2);
        let bad: ChannelSpec = serde_json::from_str(r#"{"kraus":[[[[1,0],[0,0]],[[0,0],[0.5,0]]]]}"#).unwrap();
        assert!(channel_from_spec(&bad).is_err());
        assert!(serde_json::from_str::<ChannelSpec>(r#"{"kraus": 3}"#).is_err());
    }

    #[test]
    fn states() {
        let rho = parse_state("diag:0.5,0.5").unwrap();
        assert_eq!(rho.dim(), 2);
        assert!(parse_state("diag:0.5,0.6").is_err());
        assert_eq!(parse_state("basis:3:2").unwrap().dim(), 3);
        assert!(parse_positive("diag:1,-1").is_err());
    }
}
