//! Smooth cutoff functions shared by the partitions and the amplitudes.

/// C-infinity step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial low-frequency cutoff: 1 on `r <= 1`, 0 on `r >= 2`.
pub fn low_cut(r: f64) -> f64 {
    1.0 - smooth_step(r - 1.0)
}

/// Annular cutoff `low_cut(r) - low_cut(2r)`, supported in `1/2 <= r <= 2`.
pub fn annulus(r: f64) -> f64 {
    low_cut(r) - low_cut(2.0 * r)
}

/// Compact bump on `[0, 1)`, equal to 1 at 0.
pub fn bump(t: f64) -> f64 {
    let t = t.abs();
    if t >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `<xi> = (1 + |xi|^2)^{1/2}`.
pub fn japanese(xi: &[f64]) -> f64 {
    (1.0 + xi.iter().map(|c| c * c).sum::<f64>()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_is_monotone_and_symmetric() {
        let mut prev = 0.0;
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let s = smooth_step(t);
            assert!(s >= prev);
            assert!((s + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
            prev = s;
        }
    }

    #[test]
    fn annulus_support() {
        assert_eq!(annulus(0.49), 0.0);
        assert_eq!(annulus(2.01), 0.0);
        assert_eq!(annulus(1.0), 1.0);
    }
}
