//! Grayscale image container and binary PGM/PPM I/O.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported format: magic {0:?}")]
    UnsupportedFormat(String),
    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),
    #[error("unsupported maxval {0} (must be 1..=255)")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("invalid dimensions {width}x{height} for {len} pixels")]
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },
}

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(ImageError::InvalidDimensions {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// An image filled with a single intensity.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut img = Self::filled(width, height, 0);
        for y in 0..height {
            for x in 0..width {
                img.data[y * width + x] = f(x, y);
            }
        }
        img
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }

    /// Pixel at signed coordinates; `None` outside the image.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> Option<u8> {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            None
        } else {
            Some(self.data[y as usize * self.width + x as usize])
        }
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }
}

/// Splits a netpbm header into its whitespace-separated tokens, skipping
/// `#` comments. Returns the tokens and the offset of the byte that follows
/// the single whitespace character terminating the last token.
fn header_tokens(bytes: &[u8], count: usize) -> Result<(Vec<String>, usize), ImageError> {
    let mut tokens = Vec::with_capacity(count);
    let mut pos = 0;
    while tokens.len() < count {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        if pos >= bytes.len() {
            return Err(ImageError::MalformedHeader("unexpected end of header"));
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        let token = std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| ImageError::MalformedHeader("non-ascii header"))?;
        tokens.push(token.to_owned());
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(ImageError::MalformedHeader("missing whitespace after maxval"));
    }
    Ok((tokens, pos + 1))
}

struct Netpbm<'a> {
    width: usize,
    height: usize,
    channels: usize,
    payload: &'a [u8],
}

fn parse_netpbm(bytes: &[u8]) -> Result<Netpbm<'_>, ImageError> {
    if bytes.len() < 2 {
        return Err(ImageError::MalformedHeader("file too short"));
    }
    let magic = &bytes[..2];
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        _ => {
            return Err(ImageError::UnsupportedFormat(
                String::from_utf8_lossy(magic).into_owned(),
            ))
        }
    };
    let (tokens, offset) = header_tokens(&bytes[2..], 3)?;
    let parse = |s: &str, what: &'static str| {
        s.parse::<u32>().map_err(|_| ImageError::MalformedHeader(what))
    };
    let width = parse(&tokens[0], "bad width")? as usize;
    let height = parse(&tokens[1], "bad height")? as usize;
    let maxval = parse(&tokens[2], "bad maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader("zero dimension"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(ImageError::UnsupportedMaxval(maxval));
    }
    let payload = &bytes[2 + offset..];
    let expected = width * height * channels;
    if payload.len() < expected {
        return Err(ImageError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    Ok(Netpbm {
        width,
        height,
        channels,
        payload: &payload[..expected],
    })
}

/// Decodes a binary PGM (`P5`) byte buffer.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let pnm = parse_netpbm(bytes)?;
    if pnm.channels != 1 {
        return Err(ImageError::UnsupportedFormat("P6".into()));
    }
    GrayImage::new(pnm.width, pnm.height, pnm.payload.to_vec())
}

/// Loads a binary PGM file. Pixel values are returned unscaled.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage, ImageError> {
    decode_pgm(&fs::read(path)?)
}

pub fn encode_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.data);
    out
}

/// Writes a binary PGM with maxval 255.
pub fn save_pgm(image: &GrayImage, path: impl AsRef<Path>) -> Result<(), ImageError> {
    let mut file = fs::File::create(path)?;
    file.write_all(&encode_pgm(image))?;
    Ok(())
}

/// Loads a binary PPM (`P6`) and converts it to luma with integer BT.601
/// weights (299, 587, 114) / 1000, rounding to nearest.
pub fn load_ppm_as_luma(path: impl AsRef<Path>) -> Result<GrayImage, ImageError> {
    let bytes = fs::read(path)?;
    let pnm = parse_netpbm(&bytes)?;
    if pnm.channels != 3 {
        return Err(ImageError::UnsupportedFormat("P5".into()));
    }
    let data = pnm
        .payload
        .chunks_exact(3)
        .map(|rgb| {
            let y = 299 * rgb[0] as u32 + 587 * rgb[1] as u32 + 114 * rgb[2] as u32;
            ((y + 500) / 1000) as u8
        })
        .collect();
    GrayImage::new(pnm.width, pnm.height, data)
}

/// Loads either a PGM or a PPM (converted to luma), by magic number.
pub fn load_any(path: impl AsRef<Path>) -> Result<GrayImage, ImageError> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    if bytes.starts_with(b"P6") {
        load_ppm_as_luma(path)
    } else {
        decode_pgm(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decodes_small_p5() {
        let bytes = b"P5\n2 2\n255\n\x00\xff\x80\x07";
        let img = decode_pgm(bytes).unwrap();
        assert_eq!(img, GrayImage::new(2, 2, vec![0, 255, 128, 7]).unwrap());
    }

    #[test]
    fn header_comments_are_skipped() {
        let bytes = b"P5 # comment\n2 # w\n1\n255\n\x01\x02";
        assert_eq!(decode_pgm(bytes).unwrap().data(), &[1, 2]);
    }

    #[test]
    fn rejects_p6_as_pgm() {
        let err = decode_pgm(b"P6\n1 1\n255\n\x00\x00\x00").unwrap_err();
        assert!(err.to_string().contains("unsupported format"), "{err}");
    }

    #[test]
    fn distinct_decode_errors() {
        assert!(matches!(
            decode_pgm(b"P5\n2 x\n255\n"),
            Err(ImageError::MalformedHeader(_))
        ));
        assert!(matches!(
            decode_pgm(b"P5\n2 2\n255\n\x00"),
            Err(ImageError::Truncated { expected: 4, found: 1 })
        ));
        assert!(matches!(
            decode_pgm(b"P5\n1 1\n65535\n\x00\x00"),
            Err(ImageError::UnsupportedMaxval(65535))
        ));
    }

    #[test]
    fn one_pixel_file_layout() {
        let img = GrayImage::new(1, 1, vec![42]).unwrap();
        let bytes = encode_pgm(&img);
        assert_eq!(bytes, b"P5\n1 1\n255\n*");
        assert_eq!(bytes.len(), 12);
        assert_eq!(decode_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn save_load_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        let img = GrayImage::from_fn(64, 64, |x, y| ((x * 31 + y * 17) % 256) as u8);
        save_pgm(&img, &path).unwrap();
        assert_eq!(load_pgm(&path).unwrap(), img);
    }

    #[test]
    fn save_to_missing_directory_fails() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("a.pgm");
        let img = GrayImage::filled(1, 1, 0);
        assert!(matches!(save_pgm(&img, path), Err(ImageError::Io(_))));
    }

    #[test]
    fn ppm_luma_conversion() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.ppm");
        fs::write(&path, b"P6\n2 1\n255\n\xff\x00\x00\x10\x20\x30").unwrap();
        let img = load_ppm_as_luma(&path).unwrap();
        // 299*255/1000 = 76.245; (299*16 + 587*32 + 114*48)/1000 = 29.028
        assert_eq!(img.data(), &[76, 29]);
        assert_eq!(load_any(&path).unwrap(), img);
    }

    #[test]
    fn invalid_dimensions_rejected() {
        assert!(GrayImage::new(0, 1, vec![]).is_err());
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
    }

    proptest! {
        #[test]
        fn encode_decode_identity(w in 1usize..40, h in 1usize..40, seed in any::<u64>()) {
            let mut s = seed;
            let img = GrayImage::from_fn(w, h, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 56) as u8
            });
            prop_assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
        }
    }
}
