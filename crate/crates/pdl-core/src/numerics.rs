//! Shared numerical kernels: confluence-stable exponential quotients,
//! globally adaptive Gauss-Kronrod quadrature, and a bisection root finder.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

/// `(exp(z) - 1)/z`, continuous through `z = 0` where it equals 1.
///
/// Used to evaluate differences of exponentials without cancellation when two
/// decay rates (or a rate and a detuning) become degenerate.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        // Taylor sum z^k/(k+1)!; 16 terms keep the truncation below 1e-19
        // over the whole disk |z| < 0.5.
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for k in 0..16 {
            sum += term;
            term = term * z / (k as f64 + 2.0);
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `(exp(z) - 1 - z)/z²`, continuous through `z = 0` where it equals 1/2.
pub fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(0.5, 0.0);
        for k in 0..16 {
            sum += term;
            term = term * z / (k as f64 + 3.0);
        }
        sum
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// `(exp(-a·t) - exp(-b·t)) / (b - a)`, stable as `b → a` (limit `t·e^{-a t}`).
pub fn exp_diff_ratio(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    (-a * t).exp() * t * phi1((a - b) * t)
}

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK QK15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub subdivisions: usize,
}

/// Quadrature failed to reach the requested tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadError {
    pub requested: f64,
    pub achieved: f64,
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "quadrature did not converge: achieved absolute error {:e}, requested {:e}",
            self.achieved, self.requested
        )
    }
}

fn kronrod_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let fsum = f(center - dx) + f(center + dx);
        kronrod += fsum * WGK[i];
        if i % 2 == 1 {
            gauss += fsum * WG[i / 2];
        }
    }
    kronrod *= half;
    gauss *= half;
    // The Gauss/Kronrod difference is a conservative bound on the Kronrod
    // error for smooth integrands.
    (kronrod, (kronrod - gauss).norm())
}

/// Globally adaptive integration of a complex-valued integrand over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// error falls below `max(abs_tol, rel_tol·|I|)` or `max_subdiv` panels have
/// been used.
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> Result<QuadResult, QuadError> {
    struct Panel {
        a: f64,
        b: f64,
        value: Complex64,
        error: f64,
    }

    let (v0, e0) = kronrod_panel(&f, a, b);
    let mut panels = Vec::with_capacity(64);
    panels.push(Panel {
        a,
        b,
        value: v0,
        error: e0,
    });

    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if err <= target {
            return Ok(QuadResult {
                value: total,
                abs_error: err,
                subdivisions: panels.len(),
            });
        }
        if panels.len() >= max_subdiv {
            return Err(QuadError {
                requested: target,
                achieved: err,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // Interval width exhausted by floating point; keep whatever we have.
            let total: Complex64 = panels.iter().map(|p| p.value).sum();
            return Err(QuadError {
                requested: abs_tol.max(rel_tol * total.norm()),
                achieved: err,
            });
        }
        let (vl, el) = kronrod_panel(&f, pa, mid);
        let (vr, er) = kronrod_panel(&f, mid, pb);
        panels[worst] = Panel {
            a: pa,
            b: mid,
            value: vl,
            error: el,
        };
        panels.push(Panel {
            a: mid,
            b: pb,
            value: vr,
            error: er,
        });
    }
}

/// Real-valued convenience wrapper around [`integrate`].
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> Result<(f64, f64), QuadError> {
    let r = integrate(
        |t| Complex64::new(f(t), 0.0),
        a,
        b,
        rel_tol,
        abs_tol,
        max_subdiv,
    )?;
    Ok((r.value.re, r.abs_error))
}

/// Bisection root finder on `[lo, hi]`; requires a sign change.
///
/// Returns the midpoint of the final bracket once its width drops below
/// `tol`, or `None` when the endpoints do not bracket a root.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
