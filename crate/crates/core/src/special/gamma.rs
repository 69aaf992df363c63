use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(
            "ln_gamma",
            format!("argument must be positive and finite, got {x}"),
        ));
    }
    Ok(ln_gamma_unchecked(x))
}

/// `ln_gamma` without the argument check; callers guarantee x > 0.
pub fn ln_gamma_unchecked(x: f64) -> f64 {
    if x == x.floor() && x <= 171.0 {
        return ln_factorial(x as usize - 1);
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return lanczos(x + 1.0) - x.ln();
    }
    lanczos(x)
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

fn ln_factorial(n: usize) -> f64 {
    use std::sync::OnceLock;
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut fact = 1.0f64;
        let mut out = Vec::with_capacity(171);
        out.push(0.0);
        for k in 1..=170 {
            fact *= k as f64;
            out.push(fact.ln());
        }
        out
    });
    table[n]
}

/// Gamma function for x > 0 (overflows to infinity above ~171.6).
pub fn gamma(x: f64) -> Result<f64> {
    Ok(ln_gamma(x)?.exp())
}
