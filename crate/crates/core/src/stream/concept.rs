use std::f64::consts::PI;

use super::StreamError;
use crate::Label;

const CIRCLE_CENTER: (f64, f64) = (0.4, 0.5);
const CIRCLE_RADIUS: f64 = 0.2;
const SEA_THRESHOLD: f64 = 7.0;
const SEA_SCALE: f64 = 10.0;

/// Two-dimensional synthetic concepts on the unit square.
///
/// Points exactly on a decision boundary are positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Concept {
    /// Positive inside the circle centred at (0.4, 0.5) with radius 0.2.
    Circle,
    /// Positive below `sin(x1)` on the original `[0, 2pi] x [-1, 1]` scale.
    Sine,
    /// Positive when `x1 + x2 <= 7` on the original `[0, 10]^2` scale.
    Sea,
}

impl Concept {
    pub const ALL: [Concept; 3] = [Concept::Circle, Concept::Sine, Concept::Sea];

    pub fn name(self) -> &'static str {
        match self {
            Concept::Circle => "circle",
            Concept::Sine => "sine",
            Concept::Sea => "sea",
        }
    }

    /// Noiseless label of `x`; `flipped` swaps the concept (every label inverts).
    pub fn classify(self, x: &[f64], flipped: bool) -> Result<Label, StreamError> {
        if x.len() != 2 || !x.iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(StreamError::OutOfDomain { x: x.to_vec() });
        }
        let positive = self.is_positive(x[0], x[1]);
        Ok(Label::from_positive(positive != flipped))
    }

    /// Boundary test on rescaled coordinates, domain already checked.
    pub(crate) fn is_positive(self, x1: f64, x2: f64) -> bool {
        match self {
            Concept::Circle => {
                let dx = x1 - CIRCLE_CENTER.0;
                let dy = x2 - CIRCLE_CENTER.1;
                dx * dx + dy * dy <= CIRCLE_RADIUS * CIRCLE_RADIUS
            }
            Concept::Sine => {
                let angle = x1 * 2.0 * PI;
                let height = x2 * 2.0 - 1.0;
                height <= angle.sin()
            }
            Concept::Sea => SEA_SCALE * x1 + SEA_SCALE * x2 <= SEA_THRESHOLD,
        }
    }
}
