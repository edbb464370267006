//! Tensor and image serialization.
//!
//! Three formats, auto-detected by magic bytes on read and chosen by
//! extension on write:
//!
//! - `FMAP`: the bit-exact tensor container. Layout: 4-byte magic `FMAP`,
//!   u32-le version (1), u32-le C, H, W, then C*H*W IEEE-754 f64-le values in
//!   channel-major, row-major order. File length is exactly `20 + 8*C*H*W`.
//! - PNG: 8-bit grayscale or RGB.
//! - PPM: binary `P6`, maxval 255.
//!
//! Images load as tensors with values in [0, 255]. Writing an image clamps to
//! [0, 255] and rounds half-to-even, so integer-valued in-gamut tensors round
//! trip exactly.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use fst_core::tensor::FeatureMap;
use thiserror::Error;

pub const FMAP_MAGIC: [u8; 4] = *b"FMAP";
pub const FMAP_VERSION: u32 = 1;
const FMAP_HEADER_LEN: usize = 20;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt file: {0}")]
    CorruptFile(String),
    #[error("bad magic: not an FMAP file")]
    BadMagic,
    #[error("unsupported FMAP version {0}")]
    BadVersion(u32),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
}

pub type IoResult<T> = Result<T, IoError>;

// ---------------------------------------------------------------- FMAP

pub fn read_fmap(path: &Path) -> IoResult<FeatureMap> {
    let bytes = fs::read(path)?;
    decode_fmap(&bytes)
}

pub fn decode_fmap(bytes: &[u8]) -> IoResult<FeatureMap> {
    if bytes.len() < 4 || bytes[..4] != FMAP_MAGIC {
        return Err(IoError::BadMagic);
    }
    if bytes.len() < FMAP_HEADER_LEN {
        return Err(IoError::SizeMismatch(format!(
            "file holds {} bytes, header needs {FMAP_HEADER_LEN}",
            bytes.len()
        )));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let version = word(4);
    if version != FMAP_VERSION {
        return Err(IoError::BadVersion(version));
    }
    let (c, h, w) = (word(8) as usize, word(12) as usize, word(16) as usize);
    if c == 0 || h == 0 || w == 0 {
        return Err(IoError::CorruptFile(format!("zero dimension {c}x{h}x{w}")));
    }
    let count = c
        .checked_mul(h)
        .and_then(|n| n.checked_mul(w))
        .ok_or_else(|| IoError::CorruptFile("dimension overflow".into()))?;
    let expected = FMAP_HEADER_LEN + 8 * count;
    if bytes.len() != expected {
        return Err(IoError::SizeMismatch(format!(
            "file holds {} bytes, {c}x{h}x{w} needs {expected}",
            bytes.len()
        )));
    }
    let data: Vec<f64> = bytes[FMAP_HEADER_LEN..]
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    FeatureMap::new(c, h, w, data)
        .map_err(|e| IoError::CorruptFile(format!("invalid payload: {e}")))
}

pub fn write_fmap(f: &FeatureMap, path: &Path) -> IoResult<()> {
    fs::write(path, encode_fmap(f))?;
    Ok(())
}

pub fn encode_fmap(f: &FeatureMap) -> Vec<u8> {
    let (c, h, w) = f.shape();
    let mut bytes = Vec::with_capacity(FMAP_HEADER_LEN + 8 * f.data().len());
    bytes.extend_from_slice(&FMAP_MAGIC);
    bytes.extend_from_slice(&FMAP_VERSION.to_le_bytes());
    for dim in [c, h, w] {
        bytes.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    for v in f.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    bytes
}

// ---------------------------------------------------------------- images

fn quantize(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round_ties_even() as u8
}

/// Interleaved 8-bit samples -> channel-major tensor.
fn deinterleave(samples: &[u8], channels: usize, height: usize, width: usize) -> FeatureMap {
    let plane = height * width;
    let mut data = vec![0.0; channels * plane];
    for i in 0..plane {
        for k in 0..channels {
            data[k * plane + i] = samples[i * channels + k] as f64;
        }
    }
    FeatureMap::new(channels, height, width, data).expect("8-bit samples are finite")
}

fn interleave(f: &FeatureMap) -> Vec<u8> {
    let (c, _, _) = f.shape();
    let plane = f.plane_len();
    let mut out = vec![0u8; c * plane];
    for i in 0..plane {
        for k in 0..c {
            out[i * c + k] = quantize(f.channel(k)[i]);
        }
    }
    out
}

pub fn read_png(path: &Path) -> IoResult<FeatureMap> {
    let file = fs::File::open(path)?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder
        .read_info()
        .map_err(|e| IoError::CorruptFile(format!("png: {e}")))?;
    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| IoError::CorruptFile(format!("png: {e}")))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(IoError::UnsupportedFormat(format!(
            "png bit depth {:?}, only 8-bit is supported",
            info.bit_depth
        )));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let samples = &buf[..info.buffer_size()];
    let tensor = match info.color_type {
        png::ColorType::Grayscale => deinterleave(samples, 1, h, w),
        png::ColorType::Rgb => deinterleave(samples, 3, h, w),
        // alpha is dropped; stylization is defined on color planes
        png::ColorType::GrayscaleAlpha => {
            let opaque: Vec<u8> = samples.chunks_exact(2).map(|px| px[0]).collect();
            deinterleave(&opaque, 1, h, w)
        }
        png::ColorType::Rgba => {
            let opaque: Vec<u8> = samples
                .chunks_exact(4)
                .flat_map(|px| [px[0], px[1], px[2]])
                .collect();
            deinterleave(&opaque, 3, h, w)
        }
        other => {
            return Err(IoError::UnsupportedFormat(format!(
                "png color type {other:?}"
            )))
        }
    };
    Ok(tensor)
}

pub fn write_png(f: &FeatureMap, path: &Path) -> IoResult<()> {
    let (c, h, w) = f.shape();
    let color = match c {
        1 => png::ColorType::Grayscale,
        3 => png::ColorType::Rgb,
        _ => {
            return Err(IoError::UnsupportedFormat(format!(
                "png output needs 1 or 3 channels, got {c}"
            )))
        }
    };
    let file = fs::File::create(path)?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), w as u32, h as u32);
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder
        .write_header()
        .map_err(|e| IoError::CorruptFile(format!("png: {e}")))?;
    writer
        .write_image_data(&interleave(f))
        .map_err(|e| IoError::CorruptFile(format!("png: {e}")))?;
    Ok(())
}

pub fn read_ppm(path: &Path) -> IoResult<FeatureMap> {
    let bytes = fs::read(path)?;
    decode_ppm(&bytes)
}

fn decode_ppm(bytes: &[u8]) -> IoResult<FeatureMap> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(IoError::UnsupportedFormat(
            "only binary PPM (P6) is supported".into(),
        ));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        // skip whitespace and # comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(IoError::CorruptFile("ppm header truncated".into())),
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(IoError::CorruptFile("ppm header: expected integer".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| IoError::CorruptFile("ppm header: bad integer".into()))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(IoError::UnsupportedFormat(format!(
            "ppm maxval {maxval}, only 255 is supported"
        )));
    }
    if width == 0 || height == 0 {
        return Err(IoError::CorruptFile("ppm with zero dimension".into()));
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes
        .get(pos)
        .map(|b| b.is_ascii_whitespace())
        .unwrap_or(false)
    {
        return Err(IoError::CorruptFile("ppm raster separator missing".into()));
    }
    pos += 1;
    let expected = width * height * 3;
    let raster = &bytes[pos..];
    if raster.len() != expected {
        return Err(IoError::SizeMismatch(format!(
            "ppm raster holds {} bytes, {width}x{height} needs {expected}",
            raster.len()
        )));
    }
    Ok(deinterleave(raster, 3, height, width))
}

pub fn write_ppm(f: &FeatureMap, path: &Path) -> IoResult<()> {
    let (c, h, w) = f.shape();
    let rgb = match c {
        3 => f.clone(),
        1 => {
            // replicate gray into the three PPM planes
            let mut data = Vec::with_capacity(3 * f.plane_len());
            for _ in 0..3 {
                data.extend_from_slice(f.channel(0));
            }
            FeatureMap::new(3, h, w, data).expect("copy of finite data")
        }
        _ => {
            return Err(IoError::UnsupportedFormat(format!(
                "ppm output needs 1 or 3 channels, got {c}"
            )))
        }
    };
    let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
    bytes.extend_from_slice(&interleave(&rgb));
    fs::write(path, bytes)?;
    Ok(())
}

// ------------------------------------------------------------- dispatch

/// Reads any supported input, detected by magic bytes.
pub fn read_input(path: &Path) -> IoResult<FeatureMap> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(&FMAP_MAGIC) {
        return decode_fmap(&bytes);
    }
    if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        return read_png(path);
    }
    if bytes.starts_with(b"P6") {
        return decode_ppm(&bytes);
    }
    Err(IoError::UnsupportedFormat(format!(
        "{}: not an FMAP, PNG or PPM (P6) file",
        path.display()
    )))
}

/// Writes a tensor to the format implied by the output extension:
/// `.fmap` is bit-exact, `.png` / `.ppm` quantize to 8 bits.
pub fn write_output(f: &FeatureMap, path: &Path) -> IoResult<()> {
    match path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .as_deref()
    {
        Some("fmap") => write_fmap(f, path),
        Some("png") => write_png(f, path),
        Some("ppm") => write_ppm(f, path),
        other => Err(IoError::UnsupportedFormat(format!(
            "output extension {other:?}; use .fmap, .png or .ppm"
        ))),
    }
}
