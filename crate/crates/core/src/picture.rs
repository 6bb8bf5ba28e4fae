//! Pictures `c : [0,1]² → C` acted on by fractal homeomorphisms, `c ↦ c ∘ h`.
//!
//! Rasters are binary PGM (P5) or PPM (P6) with maximal value 255. Warps use
//! nearest-neighbor pull-back, so every output color is an input color.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::ifs::MaskedSystem;
use crate::transform::fractal_transform;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// 1 for gray, 3 for RGB.
    pub channels: usize,
    /// Row-major, `channels` bytes per pixel.
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<u8>) -> Result<Raster> {
        if channels != 1 && channels != 3 {
            return Err(Error::Dimension(format!("{channels} channels, expected 1 or 3")));
        }
        if pixels.len() != width * height * channels {
            return Err(Error::Dimension(format!("{} bytes for {width}x{height}x{channels}", pixels.len())));
        }
        Ok(Raster { width, height, channels, pixels })
    }

    /// RGB test card: red grows with the column, green with the row, blue is constant.
    pub fn gradient(width: usize, height: usize) -> Raster {
        let scale = |i: usize, n: usize| if n <= 1 { 0 } else { (i * 255 / (n - 1)) as u8 };
        let mut pixels = Vec::with_capacity(width * height * 3);
        for j in 0..height {
            for i in 0..width {
                pixels.extend_from_slice(&[scale(i, width), scale(j, height), 128]);
            }
        }
        Raster { width, height, channels: 3, pixels }
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn pixel(&self, i: usize, j: usize) -> &[u8] {
        let at = (j * self.width + i) * self.channels;
        &self.pixels[at..at + self.channels]
    }

    pub fn read_pnm<R: BufRead>(mut r: R) -> Result<Raster> {
        let magic = header_token(&mut r)?;
        let channels = match magic.as_str() {
            "P5" => 1,
            "P6" => 3,
            m => return Err(Error::Parse(format!("unsupported magic {m:?}, expected P5 or P6"))),
        };
        let mut field = |name: &str| -> Result<usize> {
            let tok = header_token(&mut r)?;
            tok.parse().map_err(|_| Error::Parse(format!("bad {name} {tok:?}")))
        };
        let width = field("width")?;
        let height = field("height")?;
        let maxval = field("maximal value")?;
        if maxval != 255 {
            return Err(Error::Parse(format!("maximal value {maxval}, only 255 is supported")));
        }
        let mut pixels = vec![0; width * height * channels];
        r.read_exact(&mut pixels).map_err(|e| Error::Parse(format!("truncated raster data: {e}")))?;
        Raster::new(width, height, channels, pixels)
    }

    pub fn write_pnm<W: Write>(&self, mut w: W) -> Result<()> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        write!(w, "{magic}\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)?;
        Ok(())
    }

    pub fn to_pnm_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_pnm(&mut out).expect("writing to memory");
        out
    }
}

/// Next header token, skipping whitespace and `#` comments; consumes exactly one
/// whitespace byte after the token.
fn header_token<R: BufRead>(r: &mut R) -> Result<String> {
    let mut tok = String::new();
    let mut byte = [0u8; 1];
    loop {
        if r.read(&mut byte)? == 0 {
            if tok.is_empty() {
                return Err(Error::Parse("unexpected end of header".into()));
            }
            return Ok(tok);
        }
        let c = byte[0];
        if c == b'#' && tok.is_empty() {
            let mut line = Vec::new();
            r.read_until(b'\n', &mut line)?;
        } else if c.is_ascii_whitespace() {
            if !tok.is_empty() {
                return Ok(tok);
            }
        } else {
            tok.push(c as char);
        }
    }
}

/// Source index for each of `len` output samples: `round(mid h(i / (len - 1)) · (len - 1))`.
pub fn displacement_table(len: usize, f: &MaskedSystem, g: &MaskedSystem, depth: usize) -> Result<Vec<usize>> {
    if len == 0 {
        return Err(Error::Dimension("empty axis".into()));
    }
    if len == 1 {
        fractal_transform(f, g, &Rational::from_integer(0.into()), depth)?;
        return Ok(vec![0]);
    }
    let n = (len - 1) as i64;
    (0..len)
        .map(|i| {
            let x = Rational::new((i as i64).into(), n.into());
            let scaled = fractal_transform(f, g, &x, depth)?.mid() * Rational::from_integer(n.into());
            Ok(round_half_up(&scaled).min(len - 1))
        })
        .collect()
}

fn round_half_up(x: &Rational) -> usize {
    let two = BigInt::from(2);
    let twice = x.numer() * &two + x.denom();
    let den = x.denom() * &two;
    twice.div_floor(&den).to_usize().unwrap_or(0)
}

/// `output[i] = samples[nearest(h(i / (len - 1)))]`.
pub fn warp_1d<T: Clone>(samples: &[T], f: &MaskedSystem, g: &MaskedSystem, depth: usize) -> Result<Vec<T>> {
    let table = displacement_table(samples.len(), f, g, depth)?;
    Ok(table.into_iter().map(|k| samples[k].clone()).collect())
}

/// Pulls `img` back through `h_x × h_y`; the y axis is left alone when `y` is `None`.
pub fn warp_image(
    img: &Raster,
    x: (&MaskedSystem, &MaskedSystem),
    y: Option<(&MaskedSystem, &MaskedSystem)>,
    depth: usize,
) -> Result<Raster> {
    if img.is_empty() {
        return Err(Error::Dimension(format!("{}x{} raster", img.width, img.height)));
    }
    let cols = displacement_table(img.width, x.0, x.1, depth)?;
    let rows = match y {
        Some((fy, gy)) => displacement_table(img.height, fy, gy, depth)?,
        None => (0..img.height).collect(),
    };
    let mut pixels = Vec::with_capacity(img.pixels.len());
    for &sj in &rows {
        for &si in &cols {
            pixels.extend_from_slice(img.pixel(si, sj));
        }
    }
    Raster::new(img.width, img.height, img.channels, pixels)
}
