//! Netpbm graymap (P2/P5) and raw little-endian u32 image files.

use std::fs;
use std::path::Path;

use super::Image2D;
use crate::error::{Error, Result};

fn parse_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

/// Smallest bit depth able to hold `maxval`.
fn bits_for(maxval: u32) -> u32 {
    (32 - maxval.leading_zeros()).max(1)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.buf.len() {
            match self.buf[self.pos] {
                b'#' => {
                    while self.pos < self.buf.len() && self.buf[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.buf.len() && self.buf[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.buf.len() {
                parse_err(start, format!("unexpected end of file reading {what}"))
            } else {
                parse_err(start, format!("expected {what}, found byte {:#04x}", self.buf[start]))
            });
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(start, format!("{what} out of range")))
    }
}

/// Parses a P2 (ASCII) or P5 (binary) graymap from memory.
pub fn parse_pgm(buf: &[u8]) -> Result<Image2D> {
    if buf.len() < 2 || buf[0] != b'P' || !(buf[1] == b'2' || buf[1] == b'5') {
        return Err(parse_err(0, "not a P2/P5 graymap"));
    }
    let binary = buf[1] == b'5';
    let mut cur = Cursor { buf, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    cur.skip_ws_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(parse_err(maxval_at, format!("maxval {maxval} outside [1, 65535]")));
    }
    if width == 0 || height == 0 {
        return Err(parse_err(2, format!("empty image {width}x{height}")));
    }
    let n = width * height;
    let mut values = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if cur.pos >= buf.len() || !buf[cur.pos].is_ascii_whitespace() {
            return Err(parse_err(cur.pos, "missing whitespace after maxval"));
        }
        let data_start = cur.pos + 1;
        let sample = if maxval > 255 { 2 } else { 1 };
        let need = n * sample;
        let have = buf.len().saturating_sub(data_start);
        if have < need {
            return Err(parse_err(buf.len(), format!("truncated raster: expected {need} bytes, found {have}")));
        }
        let data = &buf[data_start..data_start + need];
        if sample == 1 {
            values.extend(data.iter().map(|&b| b as u32));
        } else {
            values.extend(data.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as u32));
        }
    } else {
        for _ in 0..n {
            let at = cur.pos;
            let v = cur.number("sample")?;
            if v > maxval {
                return Err(parse_err(at, format!("sample {v} exceeds maxval {maxval}")));
            }
            values.push(v);
        }
    }
    if let Some(p) = values.iter().position(|&v| v > maxval) {
        return Err(parse_err(0, format!("sample {} at pixel {p} exceeds maxval {maxval}", values[p])));
    }
    Image2D::new(width, height, bits_for(maxval), values)
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image2D> {
    parse_pgm(&fs::read(path)?)
}

/// Encodes `img` as a binary P5 graymap with `maxval = 2^bit_depth - 1`.
pub fn encode_pgm(img: &Image2D) -> Result<Vec<u8>> {
    if img.bit_depth() > 16 {
        return Err(Error::Unsupported(format!(
            "PGM holds at most 16 bits, image has {}; use the raw format",
            img.bit_depth()
        )));
    }
    let maxval = super::max_value(img.bit_depth());
    let mut out = format!("P5\n{} {}\n{}\n", img.width(), img.height(), maxval).into_bytes();
    if maxval > 255 {
        out.reserve(img.len() * 2);
        for &v in img.values() {
            out.extend_from_slice(&(v as u16).to_be_bytes());
        }
    } else {
        out.extend(img.values().iter().map(|&v| v as u8));
    }
    Ok(out)
}

pub fn save_pgm(img: &Image2D, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pgm(img)?)?;
    Ok(())
}

/// Raw dump: `width:u32, height:u32, bit_depth:u32`, then the values, all
/// little-endian.
pub fn encode_raw(img: &Image2D) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * img.len());
    out.extend_from_slice(&(img.width() as u32).to_le_bytes());
    out.extend_from_slice(&(img.height() as u32).to_le_bytes());
    out.extend_from_slice(&img.bit_depth().to_le_bytes());
    for &v in img.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn parse_raw(buf: &[u8]) -> Result<Image2D> {
    if buf.len() < 12 {
        return Err(parse_err(buf.len(), "truncated raw header"));
    }
    let word = |i: usize| u32::from_le_bytes([buf[i], buf[i + 1], buf[i + 2], buf[i + 3]]);
    let (width, height, bits) = (word(0) as usize, word(4) as usize, word(8));
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| parse_err(0, "raw dimensions overflow"))?;
    if buf.len() - 12 != need {
        return Err(parse_err(buf.len(), format!("raw payload is {} bytes, expected {need}", buf.len() - 12)));
    }
    let values = buf[12..].chunks_exact(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
    Image2D::new(width, height, bits, values)
}

pub fn save_raw(img: &Image2D, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_raw(img))?;
    Ok(())
}

pub fn load_raw(path: impl AsRef<Path>) -> Result<Image2D> {
    parse_raw(&fs::read(path)?)
}

/// Loads a PGM or raw image, picking the format from the magic bytes.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image2D> {
    let buf = fs::read(path)?;
    if buf.len() >= 2 && buf[0] == b'P' && (buf[1] == b'2' || buf[1] == b'5') {
        parse_pgm(&buf)
    } else {
        parse_raw(&buf)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ascii_pgm() {
        let im = parse_pgm(b"P2 2 2 255\n1 2 4 3\n").unwrap();
        assert_eq!(im, Image2D::new(2, 2, 8, vec![1, 2, 4, 3]).unwrap());
    }

    #[test]
    fn ascii_pgm_with_comments() {
        let im = parse_pgm(b"P2\n# made by hand\n3 1\n# max\n15\n0 7 15\n").unwrap();
        assert_eq!(im.bit_depth(), 4);
        assert_eq!(im.values(), &[0, 7, 15]);
    }

    #[test]
    fn binary_16bit_is_big_endian() {
        let mut buf = b"P5\n2 1\n65535\n".to_vec();
        buf.extend_from_slice(&[0x01, 0x02, 0xff, 0x00]);
        let im = parse_pgm(&buf).unwrap();
        assert_eq!(im.bit_depth(), 16);
        assert_eq!(im.values(), &[0x0102, 0xff00]);
    }

    #[test]
    fn malformed_headers_report_offsets() {
        match parse_pgm(b"P2 2 x 255") {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_pgm(b"P6 1 1 255\n\0"), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(parse_pgm(b"P2 1 1 70000 3"), Err(Error::Parse { offset: 7, .. })));
        assert!(matches!(parse_pgm(b"P2 2 1 255 3"), Err(Error::Parse { .. })));
        assert!(matches!(parse_pgm(b"P2 1 1 9 10"), Err(Error::Parse { .. })));
    }

    #[test]
    fn truncated_binary_payload() {
        match parse_pgm(b"P5 2 2 255\n\x01\x02\x03") {
            Err(Error::Parse { offset, message }) => {
                assert_eq!(offset, 14);
                assert!(message.contains("truncated"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn pgm_refuses_wide_images() {
        let im = Image2D::new(1, 1, 20, vec![5]).unwrap();
        assert!(matches!(encode_pgm(&im), Err(Error::Unsupported(_))));
    }

    #[test]
    fn raw_rejects_bad_lengths() {
        let im = Image2D::new(2, 1, 20, vec![5, 1 << 19]).unwrap();
        let mut buf = encode_raw(&im);
        buf.pop();
        assert!(matches!(parse_raw(&buf), Err(Error::Parse { .. })));
        assert!(matches!(parse_raw(&buf[..5]), Err(Error::Parse { .. })));
    }

    fn image_strategy(max_bits: u32) -> impl Strategy<Value = Image2D> {
        (1usize..12, 1usize..12, 1..=max_bits).prop_flat_map(|(w, h, bits)| {
            proptest::collection::vec(0..=crate::image::max_value(bits), w * h)
                .prop_map(move |v| Image2D::new(w, h, bits, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn pgm_round_trip(im in image_strategy(16)) {
            let back = parse_pgm(&encode_pgm(&im).unwrap()).unwrap();
            prop_assert_eq!(back, im);
        }

        #[test]
        fn raw_round_trip(im in image_strategy(32)) {
            prop_assert_eq!(parse_raw(&encode_raw(&im)).unwrap(), im);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let im = Image2D::new(3, 2, 12, vec![0, 4095, 7, 8, 9, 10]).unwrap();
        let pgm = dir.path().join("a.pgm");
        save_pgm(&im, &pgm).unwrap();
        assert_eq!(load_image(&pgm).unwrap(), im);
        let raw = dir.path().join("a.raw");
        save_raw(&im, &raw).unwrap();
        assert_eq!(load_image(&raw).unwrap(), im);
    }
}
