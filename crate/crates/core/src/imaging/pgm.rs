//! Binary graymap (`P5`) codec, maxval 255.

use super::{FrameSpec, GrayImage, ImagingError};

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.pixels().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.pixels());
    out
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, ImagingError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImagingError::MalformedHeader(format!("bad {what}")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, ImagingError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(ImagingError::MalformedHeader("missing P5 magic".into()));
    }
    let mut r = HeaderReader { bytes, pos: 2 };
    let width = r.number("width")?;
    let height = r.number("height")?;
    let maxval = r.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(ImagingError::MalformedHeader(format!("unsupported maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(r.pos) {
        Some(b) if b.is_ascii_whitespace() => r.pos += 1,
        _ => return Err(ImagingError::MalformedHeader("missing raster separator".into())),
    }
    let spec = FrameSpec::new(width, height)
        .map_err(|_| ImagingError::MalformedHeader(format!("empty image {width}x{height}")))?;
    let need = spec.payload_bytes();
    let raster = &bytes[r.pos..];
    if raster.len() < need {
        return Err(ImagingError::TruncatedPayload { expected: need, got: raster.len() });
    }
    GrayImage::new(spec, raster[..need].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tiny_image_layout() {
        let img = GrayImage::new(FrameSpec { width: 2, height: 2 }, vec![0, 255, 17, 34]).unwrap();
        let bytes = encode_pgm(&img);
        let mut expected = b"P5\n2 2\n255\n".to_vec();
        expected.extend_from_slice(&[0, 255, 17, 34]);
        assert_eq!(bytes, expected);
        assert_eq!(decode_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn truncated_payload() {
        let mut bytes = b"P5\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        assert_eq!(
            decode_pgm(&bytes),
            Err(ImagingError::TruncatedPayload { expected: 6, got: 4 })
        );
    }

    #[test]
    fn malformed_headers() {
        assert!(matches!(decode_pgm(b"P2\n1 1\n255\n\0"), Err(ImagingError::MalformedHeader(_))));
        assert!(matches!(decode_pgm(b"P5\nx 1\n255\n\0"), Err(ImagingError::MalformedHeader(_))));
        assert!(matches!(decode_pgm(b"P5\n1 1\n65535\n\0\0"), Err(ImagingError::MalformedHeader(_))));
        assert!(matches!(decode_pgm(b"P5\n0 0\n255\n"), Err(ImagingError::MalformedHeader(_))));
    }

    #[test]
    fn comments_in_header() {
        let img = decode_pgm(b"P5 # made by hand\n1 # width\n 1\n255\n\x07").unwrap();
        assert_eq!(img.pixels(), &[7]);
    }

    proptest! {
        #[test]
        fn qvga_round_trip(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut px = vec![0u8; FrameSpec::QVGA.payload_bytes()];
            rng.fill(px.as_mut_slice());
            let img = GrayImage::new(FrameSpec::QVGA, px).unwrap();
            prop_assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
        }
    }
}
