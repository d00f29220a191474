//! Frequency- and parameter-grid helpers.

/// Log-spaced grid of `count` points covering `[center/span, center·span]`
/// with `center` included exactly. `count` is rounded up to the next odd
/// number so the midpoint lands on `center`.
pub fn log_grid_about(center: f64, span: f64, count: usize) -> Vec<f64> {
    assert!(center > 0.0 && span > 1.0, "need center > 0 and span > 1");
    let n = if count < 3 {
        3
    } else if count.is_multiple_of(2) {
        count + 1
    } else {
        count
    };
    let half = (n - 1) / 2;
    let step = span.ln() / half as f64;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| center * ((i as f64 - half as f64) * step).exp())
        .collect();
    grid[half] = center;
    grid
}

/// Default budget grid: three decades on either side of the mechanical
/// resonance, 201 points, Ω_m exact at the midpoint.
pub fn default_budget_grid(omega_m: f64) -> Vec<f64> {
    log_grid_about(omega_m, 1e3, 201)
}

/// Linearly spaced grid on `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && hi > lo);
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                lo + i as f64 * step
            }
        })
        .collect()
}

/// Log-spaced grid on `[lo, hi]` inclusive.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && hi > lo && lo > 0.0);
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                hi
            } else {
                (a + i as f64 * step).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_is_exact() {
        let g = log_grid_about(2.0 * std::f64::consts::PI * 78e6, 1e3, 200);
        assert_eq!(g.len(), 201);
        assert_eq!(g[100], 2.0 * std::f64::consts::PI * 78e6);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[0] - g[100] / 1e3).abs() / g[0] < 1e-12);
        assert!((g[200] - g[100] * 1e3).abs() / g[200] < 1e-12);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let g = linspace(0.2, 0.8, 7);
        assert_eq!(g[0], 0.2);
        assert_eq!(g[6], 0.8);
        assert_eq!(g.len(), 7);
    }

    #[test]
    fn logspace_hits_endpoints() {
        let g = logspace(1.0, 100.0, 3);
        assert_eq!(g[0], 1.0);
        assert!((g[1] - 10.0).abs() < 1e-12);
        assert_eq!(g[2], 100.0);
    }
}
