use std::fmt;

/// Binary class label. `Positive` is the minority class by convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn from_bit(bit: u8) -> Option<Label> {
        match bit {
            0 => Some(Label::Negative),
            1 => Some(Label::Positive),
            _ => None,
        }
    }

    pub fn from_positive(positive: bool) -> Label {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Label::Negative => 0,
            Label::Positive => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.bit())
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// One element of a stream: a feature vector in `[0, 1]^d` and its label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub x: Vec<f64>,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: Vec<f64>, y: Label) -> Self {
        LabeledExample { x, y }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_round_trip() {
        for label in [Label::Negative, Label::Positive] {
            assert_eq!(Label::from_bit(label.bit()), Some(label));
            assert_eq!(label.flipped().flipped(), label);
        }
        assert_eq!(Label::from_bit(2), None);
    }
}
