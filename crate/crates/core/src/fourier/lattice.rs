use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::CompensatedSum;

/// Largest number of lattice points a field may hold.
pub const POINT_BUDGET: usize = 1 << 25;

const MAGIC: &[u8; 4] = b"JVLF";
const FORMAT_VERSION: u32 = 1;
const LAYOUT_ROW_MAJOR: u8 = 0;

/// Number of points of `Z_side^dims`, or an error past [`POINT_BUDGET`].
pub fn lattice_points(dims: usize, side: usize) -> Result<usize> {
    if dims == 0 || side == 0 {
        return Err(invalid!("lattice needs positive dimension and side, got d={dims}, M={side}"));
    }
    let mut n: usize = 1;
    for _ in 0..dims {
        n = n
            .checked_mul(side)
            .filter(|&n| n <= POINT_BUDGET)
            .ok_or_else(|| invalid!("lattice Z_{side}^{dims} exceeds the budget of {POINT_BUDGET} points"))?;
    }
    Ok(n)
}

/// Frequency in `[-1/2, 1/2)` of DFT index `m` on a cycle of length `side`.
pub fn dft_frequency(m: usize, side: usize) -> f64 {
    let half = side.div_ceil(2);
    if m < half {
        m as f64 / side as f64
    } else {
        m as f64 / side as f64 - 1.0
    }
}

/// Complex values on the periodic lattice `Z_M^d`, stored row-major (the last
/// coordinate varies fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField {
    dims: usize,
    side: usize,
    values: Vec<Complex64>,
}

impl LatticeField {
    pub fn new(dims: usize, side: usize, values: Vec<Complex64>) -> Result<Self> {
        let n = lattice_points(dims, side)?;
        if values.len() != n {
            return Err(invalid!("expected {n} values for Z_{side}^{dims}, got {}", values.len()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid!("lattice values must be finite"));
        }
        Ok(Self { dims, side, values })
    }

    pub fn from_real(dims: usize, side: usize, values: &[f64]) -> Result<Self> {
        Self::new(dims, side, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dims: usize, side: usize) -> Result<Self> {
        Self::constant(dims, side, Complex64::new(0.0, 0.0))
    }

    pub fn constant(dims: usize, side: usize, value: Complex64) -> Result<Self> {
        let n = lattice_points(dims, side)?;
        Self::new(dims, side, vec![value; n])
    }

    /// Unit mass at the origin.
    pub fn delta(dims: usize, side: usize) -> Result<Self> {
        let mut f = Self::zeros(dims, side)?;
        f.values[0] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    /// Field with `value(coords)` at each lattice point.
    pub fn from_fn<F: FnMut(&[usize]) -> Complex64>(dims: usize, side: usize, mut value: F) -> Result<Self> {
        let n = lattice_points(dims, side)?;
        let mut coords = vec![0usize; dims];
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(value(&coords));
            increment(&mut coords, side);
        }
        Self::new(dims, side, values)
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Flat index of a coordinate tuple (each coordinate reduced mod `M`).
    pub fn index_of(&self, coords: &[isize]) -> usize {
        let m = self.side as isize;
        coords
            .iter()
            .fold(0usize, |acc, &c| acc * self.side + c.rem_euclid(m) as usize)
    }

    pub fn coords_of(&self, mut index: usize) -> Vec<usize> {
        let mut c = vec![0; self.dims];
        for slot in c.iter_mut().rev() {
            *slot = index % self.side;
            index /= self.side;
        }
        c
    }

    pub fn mean(&self) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for v in &self.values {
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.value(), im.value()) / self.values.len() as f64
    }

    /// `g(x) = f(x - shift)`.
    pub fn translate(&self, shift: &[isize]) -> Result<Self> {
        if shift.len() != self.dims {
            return Err(invalid!("shift has {} coordinates, field has {}", shift.len(), self.dims));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        let mut coords = vec![0usize; self.dims];
        let mut src = vec![0isize; self.dims];
        for slot in out.iter_mut() {
            for ((s, &c), &h) in src.iter_mut().zip(&coords).zip(shift) {
                *s = c as isize - h;
            }
            *slot = self.values[self.index_of(&src)];
            increment(&mut coords, self.side);
        }
        Ok(Self {
            dims: self.dims,
            side: self.side,
            values: out,
        })
    }

    pub fn max_abs_diff(&self, other: &LatticeField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Unnormalised forward DFT, `F(k) = sum_x f(x) e^(-2 pi i k.x / M)`.
    pub fn dft(&self) -> LatticeField {
        let mut out = self.clone();
        transform_in_place(&mut out.values, self.dims, self.side, false);
        out
    }

    /// Inverse DFT including the `M^-d` normalisation.
    pub fn idft(&self) -> LatticeField {
        let mut out = self.clone();
        transform_in_place(&mut out.values, self.dims, self.side, true);
        let scale = 1.0 / out.values.len() as f64;
        out.values.iter_mut().for_each(|v| *v *= scale);
        out
    }

    /// The frequency point in `[-1/2, 1/2)^d` attached to DFT index `index`.
    pub fn frequency_of(&self, index: usize) -> Vec<f64> {
        self.coords_of(index)
            .into_iter()
            .map(|m| dft_frequency(m, self.side))
            .collect()
    }

    /// Binary encoding: magic `JVLF`, format version (u32), layout byte,
    /// `d` (u32), `M` (u32), then `M^d` little-endian `(f32, f32)` pairs.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(17 + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(LAYOUT_ROW_MAJOR);
        out.extend_from_slice(&(self.dims as u32).to_le_bytes());
        out.extend_from_slice(&(self.side as u32).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&(v.re as f32).to_le_bytes());
            out.extend_from_slice(&(v.im as f32).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let parse = |msg: &str| Error::Parse(format!("lattice field: {msg}"));
        if bytes.len() < 17 || &bytes[..4] != MAGIC {
            return Err(parse("missing header"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        if u32_at(4) != FORMAT_VERSION {
            return Err(parse("unsupported format version"));
        }
        if bytes[8] != LAYOUT_ROW_MAJOR {
            return Err(parse("unsupported layout"));
        }
        let dims = u32_at(9) as usize;
        let side = u32_at(13) as usize;
        let n = lattice_points(dims, side)?;
        let body = &bytes[17..];
        if body.len() != 8 * n {
            return Err(parse("payload length does not match header"));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| {
                let re = f32::from_le_bytes(c[..4].try_into().unwrap());
                let im = f32::from_le_bytes(c[4..].try_into().unwrap());
                Complex64::new(re as f64, im as f64)
            })
            .collect();
        Self::new(dims, side, values)
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("lattice field serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    dims: usize,
    side: usize,
    layout: String,
    values: Vec<[f64; 2]>,
}

impl Serialize for LatticeField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawField {
            dims: self.dims,
            side: self.side,
            layout: "row-major".into(),
            values: self.values.iter().map(|v| [v.re, v.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawField::deserialize(d)?;
        if raw.layout != "row-major" {
            return Err(serde::de::Error::custom(format!("unsupported layout {}", raw.layout)));
        }
        let values = raw.values.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        LatticeField::new(raw.dims, raw.side, values).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn increment(coords: &mut [usize], side: usize) {
    for c in coords.iter_mut().rev() {
        *c += 1;
        if *c < side {
            return;
        }
        *c = 0;
    }
}

/// In-place multidimensional DFT over a row-major buffer.
pub(crate) fn transform_in_place(values: &mut [Complex64], dims: usize, side: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(side)
    } else {
        planner.plan_fft_forward(side)
    };
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); side];
    for axis in 0..dims {
        let stride = side.pow((dims - 1 - axis) as u32);
        if stride == 1 {
            for chunk in values.chunks_exact_mut(side) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * side;
        for outer in values.chunks_exact_mut(block) {
            for inner in 0..stride {
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = outer[i * stride + inner];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    outer[i * stride + inner] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(dims: usize, side: usize) -> LatticeField {
        LatticeField::from_fn(dims, side, |c| {
            let s: usize = c.iter().enumerate().map(|(i, &x)| (i + 1) * x * x).sum();
            Complex64::new((s as f64).sin(), (s as f64 * 0.3).cos())
        })
        .unwrap()
    }

    #[test]
    fn dft_round_trip() {
        for (d, m) in [(1, 7), (2, 8), (3, 5)] {
            let f = sample(d, m);
            let back = f.dft().idft();
            assert!(back.max_abs_diff(&f) < 1e-12 * f.max_abs().max(1.0));
        }
    }

    #[test]
    fn dft_matches_direct_sum() {
        let f = sample(2, 4);
        let g = f.dft();
        for k in 0..16 {
            let kc = f.coords_of(k);
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..16 {
                let xc = f.coords_of(x);
                let phase = -2.0 * std::f64::consts::PI * (kc[0] * xc[0] + kc[1] * xc[1]) as f64 / 4.0;
                acc += f.values()[x] * Complex64::from_polar(1.0, phase);
            }
            assert!((acc - g.values()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn frequencies_cover_half_open_cube() {
        let f: Vec<f64> = (0..4).map(|m| dft_frequency(m, 4)).collect();
        assert_eq!(f, vec![0.0, 0.25, -0.5, -0.25]);
        let f: Vec<f64> = (0..3).map(|m| dft_frequency(m, 3)).collect();
        assert!((f[2] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn budget_and_shape_checks() {
        assert!(lattice_points(26, 2).is_err());
        assert!(lattice_points(0, 4).is_err());
        assert!(LatticeField::new(2, 3, vec![Complex64::new(0.0, 0.0); 8]).is_err());
        assert!(LatticeField::from_real(1, 2, &[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn binary_and_json_round_trip() {
        let f = sample(2, 3);
        let g = LatticeField::from_bytes(&f.to_bytes()).unwrap();
        assert!(g.max_abs_diff(&f) < 1e-6);
        let h = LatticeField::from_json(&f.to_json()).unwrap();
        assert_eq!(h, f);
        assert!(LatticeField::from_bytes(b"nope").is_err());
        let text = r#"{"dims":1,"side":2,"layout":"column-major","values":[[0,0],[1,0]]}"#;
        assert!(LatticeField::from_json(text).is_err());
    }

    #[test]
    fn translate_moves_delta() {
        let d = LatticeField::delta(2, 5).unwrap();
        let t = d.translate(&[1, -2]).unwrap();
        assert_eq!(t.values()[t.index_of(&[1, 3])], Complex64::new(1.0, 0.0));
        assert!((t.mean() - d.mean()).norm() < 1e-15);
    }
}
