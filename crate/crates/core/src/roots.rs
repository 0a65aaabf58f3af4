//! Safeguarded Newton iteration for strictly increasing scalar functions.

/// Iteration cap for every monotone solve in the crate.
pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    /// Relative 1e-15 on x; the absolute floor only matters at zero.
    pub const POINT: Tolerance = Tolerance {
        abs: 1e-300,
        rel: 1e-15,
    };
}

/// Finds the root of a strictly increasing `f` inside `[lo, hi]`.
///
/// `f` returns the value and derivative. Newton steps that leave the current
/// bracket, or come from a non-positive derivative, are replaced by bisection.
pub fn solve_increasing<F>(f: F, mut lo: f64, mut hi: f64, start: f64, tol: Tolerance) -> Result<f64, String>
where
    F: Fn(f64) -> (f64, f64),
{
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(format!("invalid bracket [{lo}, {hi}]"));
    }
    let mut x = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..MAX_ITERATIONS {
        let (v, dv) = f(x);
        if !v.is_finite() {
            return Err(format!("non-finite residual at {x}"));
        }
        if v == 0.0 {
            return Ok(x);
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / dv;
        let next = if dv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        if step <= tol.abs + tol.rel * next.abs() || next == x {
            return Ok(next);
        }
        if hi - lo <= tol.abs + tol.rel * hi.abs().max(lo.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        x = next;
    }
    Err(format!("no convergence within {MAX_ITERATIONS} iterations"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = solve_increasing(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1.0, Tolerance::POINT).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-15);
    }

    #[test]
    fn bisection_fallback_on_flat_start() {
        // Derivative vanishes at the start point.
        let r = solve_increasing(
            |x| (x * x * x, 3.0 * x * x),
            -1.0,
            2.0,
            0.5,
            Tolerance { abs: 1e-14, rel: 1e-15 },
        )
        .unwrap();
        assert!(r.abs() < 1e-5);
    }

    #[test]
    fn tiny_root_relative_accuracy() {
        let target = 3.7e-40;
        let r = solve_increasing(
            |x| (2.0 * x + x * x - 2.0 * target, 2.0 + 2.0 * x),
            0.0,
            1.0,
            1e-40,
            Tolerance::POINT,
        )
        .unwrap();
        assert!((r / target - 1.0).abs() < 1e-14);
    }
}
