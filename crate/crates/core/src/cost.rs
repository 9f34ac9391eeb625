use serde::{Deserialize, Serialize};

/// Integer cost count that saturates instead of overflowing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cost {
    pub value: u64,
    pub saturated: bool,
}

impl Cost {
    pub const ZERO: Cost = Cost {
        value: 0,
        saturated: false,
    };

    pub fn exact(value: u64) -> Self {
        Self {
            value,
            saturated: false,
        }
    }

    pub fn plus(self, other: u64) -> Self {
        match self.value.checked_add(other) {
            Some(value) => Self {
                value,
                saturated: self.saturated,
            },
            None => Self {
                value: u64::MAX,
                saturated: true,
            },
        }
    }

    pub fn times(self, other: u64) -> Self {
        match self.value.checked_mul(other) {
            Some(value) => Self {
                value,
                saturated: self.saturated,
            },
            None => Self {
                value: u64::MAX,
                saturated: true,
            },
        }
    }
}

pub(crate) fn product(factors: impl IntoIterator<Item = u64>) -> Cost {
    factors.into_iter().fold(Cost::exact(1), Cost::times)
}

pub(crate) fn pair_mul(a: u64, b: u64) -> Cost {
    Cost::exact(a).times(b)
}

pub(crate) fn sum(terms: impl IntoIterator<Item = Cost>) -> Cost {
    terms.into_iter().fold(Cost::ZERO, |acc, c| {
        let next = acc.plus(c.value);
        Cost {
            saturated: next.saturated || c.saturated,
            ..next
        }
    })
}
