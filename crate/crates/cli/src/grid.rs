use histories_core::Error;

/// Inclusive grid `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn parse(s: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("grid must be start:stop:step, got '{s}'"));
        let [a, b, h] = parts.as_slice() else { return Err(bad()) };
        let num = |v: &str| v.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad);
        let grid = Grid { start: num(a)?, stop: num(b)?, step: num(h)? };
        if grid.step <= 0.0 {
            return Err(Error::Config(format!("grid step must be positive, got {}", grid.step)));
        }
        if grid.stop < grid.start {
            return Err(Error::Config(format!("grid stop {} is below start {}", grid.stop, grid.start)));
        }
        Ok(grid)
    }

    /// Points `start + i·step` up to `stop`, tolerating rounding in the count.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}
