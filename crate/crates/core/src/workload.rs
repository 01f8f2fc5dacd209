// SPDX-License-Identifier: Apache-2.0

//! DNN layer descriptions, layer classification, tensor volumes, and
//! workload file ingestion.
//!
//! Dimension names follow the usual convolution loop nest: `n` batch, `k`
//! output channels, `c` input channels, `y`/`x` input height/width and
//! `r`/`s` filter height/width.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayerKind {
    Conv2D,
    FullyConnected,
    UpConv,
    Residual,
}

impl LayerKind {
    pub const ALL: [LayerKind; 4] = [
        LayerKind::Conv2D,
        LayerKind::FullyConnected,
        LayerKind::UpConv,
        LayerKind::Residual,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Conv2D => "Conv2D",
            LayerKind::FullyConnected => "FullyConnected",
            LayerKind::UpConv => "UpConv",
            LayerKind::Residual => "Residual",
        }
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        LayerKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown layer kind `{s}` (expected Conv2D, FullyConnected, UpConv or Residual)"))
    }
}

/// One DNN layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub name: String,
    pub kind: LayerKind,
    pub n: u64,
    pub k: u64,
    pub c: u64,
    pub y: u64,
    pub x: u64,
    pub r: u64,
    pub s: u64,
    pub stride: u64,
    #[serde(default)]
    pub padding: u64,
    #[serde(default = "default_bytes_per_element")]
    pub bytes_per_element: u64,
}

fn default_bytes_per_element() -> u64 {
    1
}

impl LayerSpec {
    /// A stride-1, unpadded convolution with 1-byte operands.
    #[allow(clippy::too_many_arguments)]
    pub fn conv(name: impl Into<String>, n: u64, k: u64, c: u64, y: u64, x: u64, r: u64, s: u64) -> Self {
        LayerSpec {
            name: name.into(),
            kind: LayerKind::Conv2D,
            n,
            k,
            c,
            y,
            x,
            r,
            s,
            stride: 1,
            padding: 0,
            bytes_per_element: 1,
        }
    }

    pub fn fully_connected(name: impl Into<String>, n: u64, k: u64, c: u64) -> Self {
        LayerSpec {
            kind: LayerKind::FullyConnected,
            ..LayerSpec::conv(name, n, k, c, 1, 1, 1, 1)
        }
    }

    pub fn residual(name: impl Into<String>, n: u64, c: u64, y: u64, x: u64) -> Self {
        LayerSpec {
            kind: LayerKind::Residual,
            ..LayerSpec::conv(name, n, c, c, y, x, 1, 1)
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn upconv(
        name: impl Into<String>,
        n: u64,
        k: u64,
        c: u64,
        y: u64,
        x: u64,
        r: u64,
        s: u64,
        factor: u64,
    ) -> Self {
        LayerSpec {
            kind: LayerKind::UpConv,
            stride: factor,
            ..LayerSpec::conv(name, n, k, c, y, x, r, s)
        }
    }

    pub fn with_stride(mut self, stride: u64) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_padding(mut self, padding: u64) -> Self {
        self.padding = padding;
        self
    }

    /// Checks the structural invariants of the layer kind.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: &str| {
            Err(ModelError::Validation {
                layer: self.name.clone(),
                reason: reason.to_owned(),
            })
        };
        let dims = [
            ("n", self.n),
            ("k", self.k),
            ("c", self.c),
            ("y", self.y),
            ("x", self.x),
            ("r", self.r),
            ("s", self.s),
            ("stride", self.stride),
            ("bytes_per_element", self.bytes_per_element),
        ];
        if let Some((field, _)) = dims.iter().find(|(_, v)| *v == 0) {
            return fail(&format!("{field} must be at least 1"));
        }
        match self.kind {
            LayerKind::FullyConnected => {
                if self.y != 1 || self.x != 1 || self.r != 1 || self.s != 1 || self.stride != 1 {
                    return fail("FullyConnected requires y = x = r = s = 1 and stride = 1");
                }
            }
            LayerKind::Residual => {
                if self.k != self.c || self.r != 1 || self.s != 1 || self.stride != 1 {
                    return fail("Residual requires k = c, r = s = 1 and stride = 1");
                }
            }
            LayerKind::Conv2D => {
                if self.y + 2 * self.padding < self.r || self.x + 2 * self.padding < self.s {
                    return fail("filter larger than padded input");
                }
            }
            LayerKind::UpConv => {}
        }
        Ok(())
    }
}

/// Coarse layer categories used to group results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LayerClass {
    HighRes,
    LowRes,
    Residual,
    FullyConnected,
    UpConv,
}

impl LayerClass {
    pub const ALL: [LayerClass; 5] = [
        LayerClass::HighRes,
        LayerClass::LowRes,
        LayerClass::Residual,
        LayerClass::FullyConnected,
        LayerClass::UpConv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LayerClass::HighRes => "HighRes",
            LayerClass::LowRes => "LowRes",
            LayerClass::Residual => "Residual",
            LayerClass::FullyConnected => "FullyConnected",
            LayerClass::UpConv => "UpConv",
        }
    }
}

impl fmt::Display for LayerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayerClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        LayerClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown layer class `{s}`"))
    }
}

/// Convolutions with fewer channels than input columns are high-resolution.
pub fn classify_layer(layer: &LayerSpec) -> LayerClass {
    match layer.kind {
        LayerKind::Residual => LayerClass::Residual,
        LayerKind::FullyConnected => LayerClass::FullyConnected,
        LayerKind::UpConv => LayerClass::UpConv,
        LayerKind::Conv2D if layer.c < layer.x => LayerClass::HighRes,
        LayerKind::Conv2D => LayerClass::LowRes,
    }
}

/// Byte and operation counts of one layer.
///
/// `input2_bytes` is only nonzero for residual layers, which read two
/// activation tensors; `elementwise_ops` likewise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TensorVolumes {
    pub input_bytes: u64,
    pub input2_bytes: u64,
    pub filter_bytes: u64,
    pub output_bytes: u64,
    pub macs: u64,
    pub elementwise_ops: u64,
    pub out_y: u64,
    pub out_x: u64,
}

fn mul(what: &'static str, factors: &[u64]) -> Result<u64> {
    factors
        .iter()
        .try_fold(1u64, |acc, &f| acc.checked_mul(f))
        .ok_or(ModelError::Overflow(what))
}

/// Output extent of a strided, padded window along one axis.
pub(crate) fn conv_out_dim(input: u64, padding: u64, filter: u64, stride: u64) -> u64 {
    (input + 2 * padding - filter) / stride + 1
}

pub fn tensor_volumes(layer: &LayerSpec) -> Result<TensorVolumes> {
    let l = layer;
    let b = l.bytes_per_element;
    let (out_y, out_x) = output_plane(l);
    let v = match l.kind {
        LayerKind::Residual => {
            let act = mul("input_bytes", &[l.n, l.c, l.y, l.x, b])?;
            TensorVolumes {
                input_bytes: act,
                input2_bytes: act,
                filter_bytes: 0,
                output_bytes: act,
                macs: 0,
                elementwise_ops: mul("elementwise_ops", &[l.n, l.c, l.y, l.x])?,
                out_y,
                out_x,
            }
        }
        _ => TensorVolumes {
            input_bytes: mul("input_bytes", &[l.n, l.c, l.y, l.x, b])?,
            input2_bytes: 0,
            filter_bytes: mul("filter_bytes", &[l.k, l.c, l.r, l.s, b])?,
            output_bytes: mul("output_bytes", &[l.n, l.k, out_y, out_x, b])?,
            macs: mul("macs", &[l.n, l.k, l.c, out_y, out_x, l.r, l.s])?,
            elementwise_ops: 0,
            out_y,
            out_x,
        },
    };
    Ok(v)
}

/// Output activation height and width.
pub fn output_plane(layer: &LayerSpec) -> (u64, u64) {
    match layer.kind {
        LayerKind::Conv2D => (
            conv_out_dim(layer.y, layer.padding, layer.r, layer.stride),
            conv_out_dim(layer.x, layer.padding, layer.s, layer.stride),
        ),
        LayerKind::UpConv => (layer.y * layer.stride, layer.x * layer.stride),
        LayerKind::FullyConnected => (1, 1),
        LayerKind::Residual => (layer.y, layer.x),
    }
}

#[derive(Debug, Deserialize)]
struct CsvRow {
    name: String,
    kind: String,
    n: u64,
    k: u64,
    c: u64,
    y: u64,
    x: u64,
    r: u64,
    s: u64,
    stride: u64,
    #[serde(default)]
    padding: u64,
    #[serde(default = "default_bytes_per_element")]
    bytes_per_element: u64,
}

impl CsvRow {
    fn into_layer(self) -> std::result::Result<LayerSpec, String> {
        Ok(LayerSpec {
            kind: self.kind.parse()?,
            name: self.name,
            n: self.n,
            k: self.k,
            c: self.c,
            y: self.y,
            x: self.x,
            r: self.r,
            s: self.s,
            stride: self.stride,
            padding: self.padding,
            bytes_per_element: self.bytes_per_element,
        })
    }
}

/// Parses a workload in CSV form. Lines starting with `#` are comments.
pub fn parse_workload_csv(text: &str) -> Result<Vec<LayerSpec>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |e: csv::Error| ModelError::Parse {
        line: e.position().map_or(0, |p| p.line()),
        reason: match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            _ => e.to_string(),
        },
    };
    let headers = reader.headers().map_err(parse_err)?.clone();
    let mut record = csv::StringRecord::new();
    let mut layers = Vec::new();
    while reader.read_record(&mut record).map_err(parse_err)? {
        let line = record.position().map_or(0, |p| p.line());
        let row: CsvRow = record.deserialize(Some(&headers)).map_err(|e| ModelError::Parse {
            line,
            reason: match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
                _ => e.to_string(),
            },
        })?;
        let layer = row.into_layer().map_err(|reason| ModelError::Parse { line, reason })?;
        layer.validate()?;
        layers.push(layer);
    }
    Ok(layers)
}

pub fn parse_workload_json(text: &str) -> Result<Vec<LayerSpec>> {
    let layers: Vec<LayerSpec> = serde_json::from_str(text).map_err(|e| ModelError::Parse {
        line: e.line() as u64,
        reason: e.to_string(),
    })?;
    for layer in &layers {
        layer.validate()?;
    }
    Ok(layers)
}

/// Loads a `.csv` or `.json` workload file, preserving layer order.
pub fn load_workload(path: impl AsRef<Path>) -> Result<Vec<LayerSpec>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.to_owned(),
        source,
    })?;
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("json") => parse_workload_json(&text),
        Some("csv") => parse_workload_csv(&text),
        other => Err(ModelError::config(format!(
            "unsupported workload extension {:?} for {} (expected .csv or .json)",
            other.unwrap_or(""),
            path.display()
        ))),
    }
}
