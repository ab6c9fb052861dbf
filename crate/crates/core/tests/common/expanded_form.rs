//! Literal transcription of the expanded conditioned-evolution formulas for
//! `D1+(t)` and `D1-(t)`, kept term by term. Only used to check the
//! generic matrix-exponential solution; it divides by `G` and `χ2`, so callers
//! must stay away from `G = 0` and coalescing eigenvalues.

use num_complex::Complex64 as C64;

pub struct ExpandedBlock {
    pub f: C64,
    pub h: C64,
    pub g: f64,
}

pub fn evolve(b: &ExpandedBlock, y: f64, d0: C64, dp0: C64, dm0: C64, t: f64) -> (C64, C64) {
    let (f, h) = (b.f, b.h);
    let g = C64::new(b.g, 0.0);
    let chi1 = (f + h) / 2.0;
    let chi2 = ((f - h) * (f - h) + 4.0 * g * g).sqrt() / 2.0;
    let l1 = chi1 + chi2;
    let l2 = chi1 - chi2;
    let b1 = f - l1;
    let b2 = f - l2;
    let phi = f * h - g * g;
    let e1 = (l1 * t).exp();
    let e2 = (l2 * t).exp();
    let src = y * d0 / (2.0 * chi2 * phi * std::f64::consts::SQRT_2);
    let drive = y / std::f64::consts::SQRT_2;

    let plus = (b2 / (2.0 * chi2) * dp0 + g / (2.0 * chi2) * dm0
        + src * (-h * b2 + g * g - g * b2 + g * f))
        * e1
        + (-b1 / (2.0 * chi2) * dp0 - g / (2.0 * chi2) * dm0
            + src * (h * b1 - g * g + g * b1 - g * f))
            * e2
        + (h + g) / phi * drive * d0;

    let minus = (-b1 / (2.0 * chi2) * dm0 - b1 * b2 / (2.0 * g * chi2) * dp0
        + src * (h / g * b1 * b2 - g * b1 + b1 * b2 - b1 * f))
        * e1
        + (b2 / (2.0 * chi2) * dm0 + b1 * b2 / (2.0 * g * chi2) * dp0
            + src * (-h / g * b1 * b2 + g * b2 - b1 * b2 + b2 * f))
            * e2
        - (f + g) / phi * drive * d0;

    (plus, minus)
}
