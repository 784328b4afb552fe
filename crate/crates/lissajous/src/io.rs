//! Field dumps, state records and checksums.
//!
//! A field dump is a data file plus a JSON sidecar at `<data>.json`. The
//! data file is either CSV with header `x,y,re_psi,im_psi,rho,jx,jy` or a
//! little-endian binary table with the same seven columns. Rows run over
//! `x` fastest, then `y`. CSV numbers are written in the shortest form
//! that parses back to the same double, so both modes round-trip exactly.

use crate::error::{Error, Result};
use lissajous_core::fields::{FieldGrid, WaveField};
use lissajous_core::states::{FockCoefficient, LissajousState, OscillatorParams, Provenance};
use lissajous_core::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str = "x,y,re_psi,im_psi,rho,jx,jy";
const BINARY_MAGIC: &[u8; 8] = b"LSJFLD01";
const COLUMNS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Bin,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Bin => "bin",
        }
    }
}

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl From<&FieldGrid> for GridMeta {
    fn from(g: &FieldGrid) -> Self {
        Self {
            x_min: g.x_min,
            x_max: g.x_max,
            y_min: g.y_min,
            y_max: g.y_max,
            nx: g.nx,
            ny: g.ny,
        }
    }
}

impl GridMeta {
    pub fn grid(&self) -> Result<FieldGrid> {
        Ok(FieldGrid::new(self.x_min, self.x_max, self.y_min, self.y_max, self.nx, self.ny)?)
    }
}

/// Where a dumped field came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMeta {
    pub provenance: String,
    pub p: u32,
    pub q: u32,
    pub n: u32,
    pub omega0: f64,
    pub energy: f64,
    /// Time of a semiclassical snapshot.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
}

impl From<&LissajousState> for StateMeta {
    fn from(s: &LissajousState) -> Self {
        Self {
            provenance: s.provenance.as_str().to_string(),
            p: s.params.p,
            q: s.params.q,
            n: s.n,
            omega0: s.params.omega0,
            energy: s.energy,
            t: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: Format,
    pub columns: Vec<String>,
    pub grid: GridMeta,
    pub resolved: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub state: Option<StateMeta>,
    pub sha256: String,
}

/// The seven stored columns of a field, without the gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub grid: FieldGrid,
    pub psi: Vec<Complex64>,
    pub rho: Vec<f64>,
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
    pub resolved: bool,
}

impl From<&WaveField> for FieldDump {
    fn from(f: &WaveField) -> Self {
        Self {
            grid: f.grid,
            psi: f.psi.clone(),
            rho: f.rho.clone(),
            jx: f.jx.clone(),
            jy: f.jy.clone(),
            resolved: f.resolved,
        }
    }
}

impl FieldDump {
    /// Bitwise equality, so that `-0.0` and `0.0` differ and NaNs compare.
    pub fn same_bits(&self, other: &Self) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        let cbits = |v: &[Complex64]| v.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>();
        self.grid == other.grid
            && cbits(&self.psi) == cbits(&other.psi)
            && bits(&self.rho) == bits(&other.rho)
            && bits(&self.jx) == bits(&other.jx)
            && bits(&self.jy) == bits(&other.jy)
    }
}

pub fn sidecar_path(data: &Path) -> PathBuf {
    let mut name = data.as_os_str().to_os_string();
    name.push(".json");
    PathBuf::from(name)
}

fn row(g: &FieldGrid, f: &FieldDump, k: usize) -> [f64; COLUMNS] {
    let (i, j) = (k % g.nx, k / g.nx);
    [g.x(i), g.y(j), f.psi[k].re, f.psi[k].im, f.rho[k], f.jx[k], f.jy[k]]
}

/// Serialized data-file bytes of `field` in `format`.
pub fn encode(field: &FieldDump, format: Format) -> Vec<u8> {
    let g = &field.grid;
    match format {
        Format::Csv => {
            let mut s = String::with_capacity(g.len() * 140);
            s.push_str(CSV_HEADER);
            s.push('\n');
            for k in 0..g.len() {
                for (c, v) in row(g, field, k).iter().enumerate() {
                    if c > 0 {
                        s.push(',');
                    }
                    write!(s, "{v:e}").unwrap();
                }
                s.push('\n');
            }
            s.into_bytes()
        }
        Format::Bin => {
            let mut out = Vec::with_capacity(24 + g.len() * COLUMNS * 8);
            out.extend_from_slice(BINARY_MAGIC);
            out.extend_from_slice(&(g.nx as u64).to_le_bytes());
            out.extend_from_slice(&(g.ny as u64).to_le_bytes());
            for k in 0..g.len() {
                for v in row(g, field, k) {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
            out
        }
    }
}

/// Writes the data file and its sidecar. Returns the sidecar.
pub fn write_field(path: &Path, field: &WaveField, format: Format, state: Option<StateMeta>) -> Result<Sidecar> {
    let dump = FieldDump::from(field);
    let bytes = encode(&dump, format);
    fs::write(path, &bytes).map_err(Error::io(path))?;
    let sidecar = Sidecar {
        format,
        columns: CSV_HEADER.split(',').map(str::to_string).collect(),
        grid: GridMeta::from(&field.grid),
        resolved: field.resolved,
        state,
        sha256: sha256_hex(&bytes),
    };
    let side = sidecar_path(path);
    fs::write(&side, to_json(&sidecar)?).map_err(Error::io(&side))?;
    Ok(sidecar)
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

pub fn read_sidecar(data: &Path) -> Result<Sidecar> {
    let side = sidecar_path(data);
    let text = fs::read(&side).map_err(Error::io(&side))?;
    Ok(serde_json::from_slice(&text)?)
}

/// Reads a dump written by [`write_field`], expecting `format`. The data is
/// parsed against the sidecar grid first and the checksum checked last, so
/// a truncated file reports its missing rows.
pub fn read_field(path: &Path, format: Format) -> Result<FieldDump> {
    let sidecar = read_sidecar(path)?;
    if sidecar.format != format {
        return Err(Error::FormatMismatch {
            expected: format.name(),
            found: sidecar.format.name(),
        });
    }
    let bytes = fs::read(path).map_err(Error::io(path))?;
    let grid = sidecar.grid.grid()?;
    let mut dump = decode(&bytes, &grid, format)?;
    dump.resolved = sidecar.resolved;
    if sha256_hex(&bytes) != sidecar.sha256 {
        return Err(Error::ChecksumMismatch(path.to_path_buf()));
    }
    Ok(dump)
}

/// Parses data-file bytes for `grid`, without any sidecar.
pub fn decode(bytes: &[u8], grid: &FieldGrid, format: Format) -> Result<FieldDump> {
    let is_binary = bytes.starts_with(BINARY_MAGIC);
    match (format, is_binary) {
        (Format::Csv, true) => Err(Error::FormatMismatch { expected: "csv", found: "bin" }),
        (Format::Bin, false) => {
            let found = if bytes.starts_with(CSV_HEADER.as_bytes()) { "csv" } else { "unknown" };
            Err(Error::FormatMismatch { expected: "bin", found })
        }
        (Format::Csv, false) => decode_csv(bytes, grid),
        (Format::Bin, true) => decode_bin(bytes, grid),
    }
}

fn empty_dump(grid: &FieldGrid) -> FieldDump {
    let n = grid.len();
    FieldDump {
        grid: *grid,
        psi: Vec::with_capacity(n),
        rho: Vec::with_capacity(n),
        jx: Vec::with_capacity(n),
        jy: Vec::with_capacity(n),
        resolved: true,
    }
}

fn push_row(dump: &mut FieldDump, k: usize, v: &[f64; COLUMNS], line: usize) -> Result<()> {
    let g = dump.grid;
    let (i, j) = (k % g.nx, k / g.nx);
    if v[0].to_bits() != g.x(i).to_bits() || v[1].to_bits() != g.y(j).to_bits() {
        return Err(Error::BadValue {
            line,
            message: format!("coordinates ({}, {}) are not node ({i}, {j})", v[0], v[1]),
        });
    }
    dump.psi.push(Complex64::new(v[2], v[3]));
    dump.rho.push(v[4]);
    dump.jx.push(v[5]);
    dump.jy.push(v[6]);
    Ok(())
}

fn decode_csv(bytes: &[u8], grid: &FieldGrid) -> Result<FieldDump> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::MalformedHeader("data is not UTF-8 text".into()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        Some(h) => return Err(Error::MalformedHeader(format!("expected {CSV_HEADER:?}, found {h:?}"))),
        None => return Err(Error::MalformedHeader("empty file".into())),
    }
    let expected = grid.len();
    let mut dump = empty_dump(grid);
    let mut k = 0;
    for (offset, line) in lines.enumerate() {
        let lineno = offset + 2;
        if line.is_empty() {
            continue;
        }
        if k == expected {
            return Err(Error::DimensionMismatch { expected, found: k + 1 });
        }
        let mut v = [0.0; COLUMNS];
        let mut fields = line.split(',');
        for slot in v.iter_mut() {
            let f = fields.next().ok_or_else(|| Error::BadValue {
                line: lineno,
                message: "too few columns".into(),
            })?;
            *slot = f.parse().map_err(|_| Error::BadValue {
                line: lineno,
                message: format!("not a number: {f:?}"),
            })?;
        }
        if fields.next().is_some() {
            return Err(Error::BadValue {
                line: lineno,
                message: "too many columns".into(),
            });
        }
        push_row(&mut dump, k, &v, lineno)?;
        k += 1;
    }
    if k != expected {
        return Err(Error::DimensionMismatch { expected, found: k });
    }
    Ok(dump)
}

fn decode_bin(bytes: &[u8], grid: &FieldGrid) -> Result<FieldDump> {
    let head = BINARY_MAGIC.len() + 16;
    if bytes.len() < head {
        return Err(Error::MalformedHeader("binary header truncated".into()));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap()) as usize;
    let (nx, ny) = (word(8), word(16));
    if (nx, ny) != (grid.nx, grid.ny) {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: nx.saturating_mul(ny),
        });
    }
    let body = &bytes[head..];
    let stride = COLUMNS * 8;
    if body.len() != grid.len() * stride {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: body.len() / stride,
        });
    }
    let mut dump = empty_dump(grid);
    for (k, chunk) in body.chunks_exact(stride).enumerate() {
        let mut v = [0.0; COLUMNS];
        for (c, slot) in v.iter_mut().enumerate() {
            *slot = f64::from_le_bytes(chunk[c * 8..c * 8 + 8].try_into().unwrap());
        }
        push_row(&mut dump, k, &v, k + 1)?;
    }
    Ok(dump)
}

/// JSON form of a [`LissajousState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub p: u32,
    pub q: u32,
    pub omega0: f64,
    pub n: u32,
    pub energy: f64,
    pub provenance: String,
    pub coefficients: Vec<CoefficientRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub nx: u32,
    pub ny: u32,
    pub re: f64,
    pub im: f64,
}

impl From<&LissajousState> for StateRecord {
    fn from(s: &LissajousState) -> Self {
        Self {
            p: s.params.p,
            q: s.params.q,
            omega0: s.params.omega0,
            n: s.n,
            energy: s.energy,
            provenance: s.provenance.as_str().to_string(),
            coefficients: s
                .coeffs
                .iter()
                .map(|f| CoefficientRecord {
                    nx: f.nx,
                    ny: f.ny,
                    re: f.c.re,
                    im: f.c.im,
                })
                .collect(),
        }
    }
}

impl StateRecord {
    pub fn to_state(&self) -> Result<LissajousState> {
        let params = OscillatorParams::new(self.p, self.q, self.omega0)?;
        let provenance = Provenance::parse(&self.provenance).ok_or_else(|| Error::BadValue {
            line: 0,
            message: format!("unknown provenance {:?}", self.provenance),
        })?;
        Ok(LissajousState {
            params,
            n: self.n,
            coeffs: self
                .coefficients
                .iter()
                .map(|c| FockCoefficient {
                    nx: c.nx,
                    ny: c.ny,
                    c: Complex64::new(c.re, c.im),
                })
                .collect(),
            energy: self.energy,
            provenance,
        })
    }
}

pub fn write_state(path: &Path, state: &LissajousState) -> Result<()> {
    fs::write(path, to_json(&StateRecord::from(state))?).map_err(Error::io(path))
}

pub fn read_state(path: &Path) -> Result<LissajousState> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    serde_json::from_slice::<StateRecord>(&bytes)?.to_state()
}
