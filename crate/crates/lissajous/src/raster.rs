//! Binary PPM (P6) heatmaps and the vector-field CSV.
//!
//! Values are mapped linearly from `[min, max]` onto `[0, 1]` (a constant
//! field maps to 0) and coloured by piecewise-linear interpolation of
//! [`COLORMAP`], nine evenly spaced stops running dark purple, blue, teal,
//! green, yellow. Channels are rounded to the nearest integer. The first
//! image row is the largest `y`, so the picture has `y` pointing up.

use crate::error::{Error, Result};
use crate::io::sha256_hex;
use lissajous_core::fields::{FieldGrid, WaveField};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub const COLORMAP: [[u8; 3]; 9] = [
    [0x44, 0x01, 0x54],
    [0x47, 0x2d, 0x7b],
    [0x3b, 0x52, 0x8b],
    [0x2c, 0x72, 0x8e],
    [0x21, 0x91, 0x8c],
    [0x28, 0xae, 0x80],
    [0x5e, 0xc9, 0x62],
    [0xad, 0xdc, 0x30],
    [0xfd, 0xe7, 0x25],
];

/// Colour of `t ∈ [0, 1]`.
pub fn color(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (COLORMAP.len() - 1) as f64;
    let k = (t.floor() as usize).min(COLORMAP.len() - 2);
    let f = t - k as f64;
    let (a, b) = (COLORMAP[k], COLORMAP[k + 1]);
    std::array::from_fn(|c| (a[c] as f64 + f * (b[c] as f64 - a[c] as f64)).round() as u8)
}

/// P6 bytes of a row-major `nx × ny` scalar field with `values[0]` at
/// `(x_min, y_min)`.
pub fn encode_ppm(values: &[f64], nx: usize, ny: usize) -> Result<Vec<u8>> {
    if values.len() != nx * ny {
        return Err(Error::DimensionMismatch {
            expected: nx * ny,
            found: values.len(),
        });
    }
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(k));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut out = format!("P6\n{nx} {ny}\n255\n").into_bytes();
    out.reserve(3 * values.len());
    for j in (0..ny).rev() {
        for v in &values[j * nx..(j + 1) * nx] {
            let t = if span > 0.0 { (v - lo) / span } else { 0.0 };
            out.extend_from_slice(&color(t));
        }
    }
    Ok(out)
}

/// Writes a heatmap; returns the checksum of the bytes written.
pub fn write_raster(path: &Path, values: &[f64], grid: &FieldGrid) -> Result<String> {
    let bytes = encode_ppm(values, grid.nx, grid.ny)?;
    fs::write(path, &bytes).map_err(Error::io(path))?;
    Ok(sha256_hex(&bytes))
}

pub fn current_magnitude(field: &WaveField) -> Vec<f64> {
    field.jx.iter().zip(&field.jy).map(|(a, b)| a.hypot(*b)).collect()
}

/// `x,y,jx,jy` at every `stride`-th node in each direction.
pub fn quiver_csv(field: &WaveField, stride: usize) -> String {
    let g = &field.grid;
    let stride = stride.max(1);
    let mut s = String::from("x,y,jx,jy\n");
    for j in (0..g.ny).step_by(stride) {
        for i in (0..g.nx).step_by(stride) {
            let k = g.index(i, j);
            writeln!(s, "{:e},{:e},{:e},{:e}", g.x(i), g.y(j), field.jx[k], field.jy[k]).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_of_the_colormap() {
        assert_eq!(color(0.0), COLORMAP[0]);
        assert_eq!(color(1.0), COLORMAP[8]);
        assert_eq!(color(0.5), COLORMAP[4]);
    }

    #[test]
    fn constant_field_is_uniform() {
        let bytes = encode_ppm(&[3.0; 12], 4, 3).unwrap();
        let header = b"P6\n4 3\n255\n";
        assert!(bytes.starts_with(header));
        let body = &bytes[header.len()..];
        assert_eq!(body.len(), 36);
        assert!(body.chunks(3).all(|px| px == COLORMAP[0]));
    }

    #[test]
    fn top_row_is_largest_y() {
        // Increasing with row index j, so the top image row is the maximum.
        let v: Vec<f64> = (0..6).map(|k| (k / 2) as f64).collect();
        let bytes = encode_ppm(&v, 2, 3).unwrap();
        let body = &bytes[b"P6\n2 3\n255\n".len()..];
        assert_eq!(&body[..3], &COLORMAP[8]);
        assert_eq!(&body[body.len() - 3..], &COLORMAP[0]);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(encode_ppm(&[0.0, f64::NAN], 2, 1), Err(Error::NonFinite(1))));
        assert!(encode_ppm(&[0.0; 3], 2, 1).is_err());
    }
}
