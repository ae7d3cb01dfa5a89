//! Independent numeric oracles for the acceptance suite.

/// Euler-Maclaurin evaluation of the Riemann zeta function for s > 1.
/// With M = 1000 the dropped correction terms are far below 1e-10.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0);
    let m = 1000.0f64;
    let partial: f64 = (1..1000).map(|n| (n as f64).powf(-s)).sum();
    let tail = m.powf(1.0 - s) / (s - 1.0);
    let half = 0.5 * m.powf(-s);
    let d1 = s * m.powf(-s - 1.0) / 12.0;
    let d3 = s * (s + 1.0) * (s + 2.0) * m.powf(-s - 3.0) / 720.0;
    partial + tail + half + d1 - d3
}

/// zeta'(s) by the same method applied to g(x) = ln(x) x^{-s};
/// zeta'(s) = -sum ln(n) n^{-s}.
pub fn zeta_prime(s: f64) -> f64 {
    assert!(s > 1.0);
    let m = 1000.0f64;
    let lm = m.ln();
    let partial: f64 = (2..1000)
        .map(|n| (n as f64).ln() * (n as f64).powf(-s))
        .sum();
    let integral = m.powf(1.0 - s) * (lm / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0)));
    let half = 0.5 * lm * m.powf(-s);
    let g1 = m.powf(-s - 1.0) * (1.0 - s * lm);
    let g3 = m.powf(-s - 3.0)
        * (-s * (s + 1.0) * (s + 2.0) * lm + (s + 2.0) * (2.0 * s + 1.0) + s * (s + 1.0));
    -(partial + integral + half - g1 / 12.0 + g3 / 720.0)
}

#[allow(dead_code)]
pub fn check_oracle_consistency() {
    // zeta(2) = pi^2/6; zeta'(2) is a known constant
    let pi = std::f64::consts::PI;
    assert!((zeta(2.0) - pi * pi / 6.0).abs() < 1e-10);
    assert!((zeta_prime(2.0) - (-0.937_548_254_315_843_7)).abs() < 1e-9);
}
