//! Coarse-grained classes c_α: the path average x̄ = (x_initial + x_final)/2
//! falls in the half-open interval Δ_α = (x̄_α − δ/2, x̄_α + δ/2].

use crate::model::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalId(pub i64);

/// Boundary between intervals k−1 and k. Both neighbours read the same
/// value, so the intervals tile the line with no gaps or overlaps in floating point.
fn boundary(k: i64, p: &Partition) -> f64 {
    p.origin + (k as f64 - 0.5) * p.width
}

/// `(low, high]` of Δ_α.
pub fn interval_bounds(alpha: i64, p: &Partition) -> (f64, f64) {
    (boundary(alpha, p), boundary(alpha + 1, p))
}

/// The top-hat e_Δα(x̄).
pub fn indicator(xbar: f64, alpha: i64, p: &Partition) -> bool {
    let (low, high) = interval_bounds(alpha, p);
    low < xbar && xbar <= high
}

/// The unique α with `indicator(xbar, α, p)`.
pub fn interval_index(xbar: f64, p: &Partition) -> i64 {
    let mut alpha = ((xbar - p.origin) / p.width).round() as i64;
    // rounding can land one interval off at representable boundaries
    loop {
        let (low, high) = interval_bounds(alpha, p);
        if xbar <= low {
            alpha -= 1;
        } else if xbar > high {
            alpha += 1;
        } else {
            return alpha;
        }
    }
}

impl IntervalId {
    pub fn of(xbar: f64, p: &Partition) -> Self {
        IntervalId(interval_index(xbar, p))
    }

    pub fn bounds(self, p: &Partition) -> (f64, f64) {
        interval_bounds(self.0, p)
    }
}
