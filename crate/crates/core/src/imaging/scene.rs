use serde::{Deserialize, Serialize};

use super::ImagingError;

/// Gray level used for the midline test object. No pattern produces it.
pub const OBJECT_VALUE: u8 = 255;

const LIGHT: u8 = 215;
const DARK: u8 = 30;

/// Surface texture of a planar scene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Pattern {
    /// Alternating squares; one cell is centered on the midline.
    Checkerboard { cell_cm: f64 },
    /// Lines of blocky pseudo-glyphs, deterministic for a seed.
    Text {
        #[serde(default = "default_text_seed")]
        seed: u64,
    },
    Flat { value: u8 },
}

fn default_text_seed() -> u64 {
    7
}

/// A fronto-parallel plane at `depth_cm` in front of the eyes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarScene {
    pub pattern: Pattern,
    pub depth_cm: f64,
    /// Width and height of the textured region, centered on the frontal axis.
    pub extent_cm: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_width_cm: Option<f64>,
}

impl PlanarScene {
    pub fn new(pattern: Pattern, depth_cm: f64, extent_cm: [f64; 2]) -> Result<Self, ImagingError> {
        let scene = PlanarScene { pattern, depth_cm, extent_cm, object_width_cm: None };
        scene.validate()?;
        Ok(scene)
    }

    pub fn with_object(mut self, width_cm: f64) -> Self {
        self.object_width_cm = Some(width_cm);
        self
    }

    pub fn validate(&self) -> Result<(), ImagingError> {
        if !(self.depth_cm > 0.0 && self.depth_cm.is_finite()) {
            return Err(ImagingError::InvalidScene("depth must be positive".into()));
        }
        if !(self.extent_cm[0] > 0.0 && self.extent_cm[1] > 0.0) {
            return Err(ImagingError::InvalidScene("extent must be positive".into()));
        }
        if let Pattern::Checkerboard { cell_cm } = self.pattern {
            if !(cell_cm > 0.0) {
                return Err(ImagingError::InvalidScene("checker cell must be positive".into()));
            }
        }
        if let Some(w) = self.object_width_cm {
            if !(w > 0.0) {
                return Err(ImagingError::InvalidScene("object width must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ImagingError> {
        let scene: PlanarScene =
            serde_json::from_str(text).map_err(|e| ImagingError::InvalidScene(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    /// Gray level at plane coordinates `(x, y)` in cm, `x` to the right and
    /// `y` downward from the frontal axis.
    pub fn sample(&self, x: f64, y: f64) -> u8 {
        if x.abs() > self.extent_cm[0] / 2.0 || y.abs() > self.extent_cm[1] / 2.0 {
            return 0;
        }
        if let Some(w) = self.object_width_cm {
            if x.abs() <= w / 2.0 {
                return OBJECT_VALUE;
            }
        }
        self.pattern.sample(x, y)
    }
}

impl Pattern {
    pub fn sample(&self, x: f64, y: f64) -> u8 {
        match *self {
            Pattern::Flat { value } => value,
            Pattern::Checkerboard { cell_cm } => {
                let i = (x / cell_cm + 0.5).floor() as i64;
                let j = (y / cell_cm + 0.5).floor() as i64;
                if (i + j).rem_euclid(2) == 0 {
                    LIGHT
                } else {
                    DARK
                }
            }
            Pattern::Text { seed } => text_sample(seed, x, y),
        }
    }
}

const GLYPH_CELL_CM: f64 = 0.6;
const GLYPH_COLS: i64 = 3;
const GLYPH_ROWS: i64 = 5;
const GLYPH_ADVANCE_CM: f64 = GLYPH_CELL_CM * (GLYPH_COLS as f64 + 1.0);
const LINE_PITCH_CM: f64 = GLYPH_CELL_CM * (GLYPH_ROWS as f64 + 2.0);

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn text_sample(seed: u64, x: f64, y: f64) -> u8 {
    let line = (y / LINE_PITCH_CM).floor() as i64;
    let glyph = (x / GLYPH_ADVANCE_CM).floor() as i64;
    let gx = ((x - glyph as f64 * GLYPH_ADVANCE_CM) / GLYPH_CELL_CM).floor() as i64;
    let gy = ((y - line as f64 * LINE_PITCH_CM) / GLYPH_CELL_CM).floor() as i64;
    if !(0..GLYPH_COLS).contains(&gx) || !(0..GLYPH_ROWS).contains(&gy) {
        return LIGHT;
    }
    let h = mix(seed ^ mix((line as u64).wrapping_mul(0x1000_0001) ^ (glyph as u64).rotate_left(32)));
    // roughly one glyph in six is a word gap
    if h % 6 == 0 {
        return LIGHT;
    }
    let bit = (gy * GLYPH_COLS + gx) as u32;
    if (h >> (8 + bit)) & 1 == 1 {
        DARK
    } else {
        LIGHT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkerboard_is_mirror_symmetric() {
        let p = Pattern::Checkerboard { cell_cm: 2.0 };
        for i in 0..200 {
            let x = 0.137 * i as f64;
            assert_eq!(p.sample(x, 0.3), p.sample(-x, 0.3));
        }
    }

    #[test]
    fn outside_extent_is_black_and_object_overrides() {
        let s = PlanarScene::new(Pattern::Flat { value: 90 }, 30.0, [10.0, 10.0]).unwrap().with_object(2.0);
        assert_eq!(s.sample(6.0, 0.0), 0);
        assert_eq!(s.sample(0.5, 0.0), OBJECT_VALUE);
        assert_eq!(s.sample(3.0, 0.0), 90);
    }

    #[test]
    fn scene_json_contract() {
        let s = PlanarScene::from_json(
            r#"{"pattern":{"kind":"checkerboard","cell_cm":2.5},"depth_cm":36.8,"extent_cm":[120,80],"object_width_cm":5}"#,
        )
        .unwrap();
        assert_eq!(s.pattern, Pattern::Checkerboard { cell_cm: 2.5 });
        assert_eq!(s.object_width_cm, Some(5.0));
        assert!(PlanarScene::from_json(r#"{"pattern":{"kind":"flat","value":1},"depth_cm":-1,"extent_cm":[1,1]}"#).is_err());
        let t = PlanarScene::from_json(r#"{"pattern":{"kind":"text"},"depth_cm":40,"extent_cm":[1,1]}"#).unwrap();
        assert_eq!(t.pattern, Pattern::Text { seed: 7 });
    }

    #[test]
    fn text_has_both_tones() {
        let p = Pattern::Text { seed: 3 };
        let samples: Vec<u8> = (0..400).map(|i| p.sample(i as f64 * 0.31, (i / 20) as f64 * 0.7)).collect();
        assert!(samples.contains(&DARK) && samples.contains(&LIGHT));
    }
}
