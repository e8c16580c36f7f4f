use crate::Label;

/// Time-decayed class sizes: `s_k <- theta * s_k + (1 - theta) * [y = k]`.
///
/// From a zero start, `s_p + s_n = 1 - theta^t` after `t` updates.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSizeTracker {
    theta: f64,
    positive: f64,
    negative: f64,
    steps: u64,
}

impl ClassSizeTracker {
    pub fn new(theta: f64) -> Self {
        assert!(
            theta > 0.0 && theta < 1.0,
            "decay factor {theta} outside (0, 1)"
        );
        ClassSizeTracker {
            theta,
            positive: 0.0,
            negative: 0.0,
            steps: 0,
        }
    }

    /// A tracker resumed from known sizes, with its step counter at zero.
    pub fn with_sizes(theta: f64, positive: f64, negative: f64) -> Self {
        ClassSizeTracker {
            positive,
            negative,
            ..ClassSizeTracker::new(theta)
        }
    }

    pub fn update(&mut self, y: Label) {
        let (hit_p, hit_n) = match y {
            Label::Positive => (1.0, 0.0),
            Label::Negative => (0.0, 1.0),
        };
        self.positive = self.theta * self.positive + hit_p * (1.0 - self.theta);
        self.negative = self.theta * self.negative + hit_n * (1.0 - self.theta);
        self.steps += 1;
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn positive(&self) -> f64 {
        self.positive
    }

    pub fn negative(&self) -> f64 {
        self.negative
    }

    pub fn size(&self, label: Label) -> f64 {
        match label {
            Label::Positive => self.positive,
            Label::Negative => self.negative,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// The strictly smaller class, or `None` on a tie.
    pub fn minority(&self) -> Option<Label> {
        if self.positive < self.negative {
            Some(Label::Positive)
        } else if self.negative < self.positive {
            Some(Label::Negative)
        } else {
            None
        }
    }
}
