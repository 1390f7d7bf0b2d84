use serde::{Deserialize, Serialize};

use super::ImagingError;

/// Frame geometry. Pixels are always 8-bit monochrome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameSpec {
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FramePreset {
    Qqvga,
    Qvga,
}

impl FramePreset {
    pub fn spec(self) -> FrameSpec {
        match self {
            FramePreset::Qqvga => FrameSpec::QQVGA,
            FramePreset::Qvga => FrameSpec::QVGA,
        }
    }
}

impl std::str::FromStr for FramePreset {
    type Err = ImagingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qqvga" => Ok(FramePreset::Qqvga),
            "qvga" => Ok(FramePreset::Qvga),
            other => Err(ImagingError::InvalidSpec(format!("unknown preset {other:?}"))),
        }
    }
}

impl FrameSpec {
    pub const BIT_DEPTH: u32 = 8;
    pub const QQVGA: FrameSpec = FrameSpec { width: 162, height: 119 };
    pub const QVGA: FrameSpec = FrameSpec { width: 324, height: 239 };

    pub fn new(width: usize, height: usize) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::InvalidSpec(format!("empty frame {width}x{height}")));
        }
        Ok(FrameSpec { width, height })
    }

    pub fn payload_bytes(&self) -> usize {
        self.width * self.height
    }
}

/// Row-major 8-bit image with the origin at the top-left corner.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    spec: FrameSpec,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GrayImage({}x{})", self.spec.width, self.spec.height)
    }
}

impl GrayImage {
    pub fn new(spec: FrameSpec, pixels: Vec<u8>) -> Result<Self, ImagingError> {
        let spec = FrameSpec::new(spec.width, spec.height)?;
        if pixels.len() != spec.payload_bytes() {
            return Err(ImagingError::InvalidSpec(format!(
                "buffer holds {} bytes, frame needs {}",
                pixels.len(),
                spec.payload_bytes()
            )));
        }
        Ok(GrayImage { spec, pixels })
    }

    pub fn filled(spec: FrameSpec, value: u8) -> Self {
        GrayImage { spec, pixels: vec![value; spec.payload_bytes()] }
    }

    pub fn from_fn(spec: FrameSpec, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(spec.payload_bytes());
        for y in 0..spec.height {
            for x in 0..spec.width {
                pixels.push(f(x, y));
            }
        }
        GrayImage { spec, pixels }
    }

    pub fn spec(&self) -> FrameSpec {
        self.spec
    }

    pub fn width(&self) -> usize {
        self.spec.width
    }

    pub fn height(&self) -> usize {
        self.spec.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.spec.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        let w = self.spec.width;
        self.pixels[y * w + x] = v;
    }

    pub fn row(&self, y: usize) -> &[u8] {
        let w = self.spec.width;
        &self.pixels[y * w..(y + 1) * w]
    }

    pub fn flipped_horizontal(&self) -> GrayImage {
        let w = self.spec.width;
        GrayImage::from_fn(self.spec, |x, y| self.get(w - 1 - x, y))
    }

    /// Rotates 90° clockwise.
    pub fn rotated_cw(&self) -> GrayImage {
        let (w, h) = (self.spec.width, self.spec.height);
        let spec = FrameSpec { width: h, height: w };
        GrayImage::from_fn(spec, |x, y| self.get(y, h - 1 - x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_payload_sizes() {
        assert_eq!(FrameSpec::QQVGA.payload_bytes(), 19_278);
        assert_eq!(FrameSpec::QVGA.payload_bytes(), 77_436);
        assert_eq!("QVGA".parse::<FramePreset>().unwrap().spec(), FrameSpec::QVGA);
    }

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(FrameSpec::new(0, 0).is_err());
        assert!(GrayImage::new(FrameSpec { width: 2, height: 2 }, vec![0; 3]).is_err());
    }

    #[test]
    fn rotation_four_times_is_identity() {
        let img = GrayImage::from_fn(FrameSpec { width: 5, height: 3 }, |x, y| (x * 10 + y) as u8);
        let r = img.rotated_cw();
        assert_eq!(r.spec(), FrameSpec { width: 3, height: 5 });
        assert_eq!(r.get(2, 0), img.get(0, 0));
        assert_eq!(r.rotated_cw().rotated_cw().rotated_cw(), img);
    }
}
