//! Error function and a few constants shared by the closed forms.

pub const SQRT_PI: f64 = 1.772_453_850_905_516_f64;
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_5_f64;
/// √(π/2)
pub const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_3_f64;
/// √(2/π)
pub const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4_f64;

/// Error function, accurate to about one ulp over the whole real line.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
