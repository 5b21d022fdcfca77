//! Bessel functions of the first kind for real order `0 ≤ ν ≤ 50` and `0 ≤ x ≤ 1000`.
//!
//! Small arguments (`x ≤ max(12, ν)`) use the power series summed in
//! double-double arithmetic, which absorbs the cancellation between terms.
//! Larger arguments use Miller's backward recurrence normalized by the
//! Neumann-type sum `(x/2)^ν₀ = Σ (ν₀ + 2k) Γ(ν₀ + k)/k! J_{ν₀+2k}(x)`.

use super::OracleError;
#[allow(unused_imports)]
use num_traits::Float;

pub const MAX_ORDER: f64 = 50.0;
pub const MAX_ARG: f64 = 1000.0;

/// `J_ν(x)` and its first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselValue {
    pub j: f64,
    pub dj: f64,
    pub d2j: f64,
}

fn check(nu: f64, x: f64) -> Result<(), OracleError> {
    if !(0.0..=MAX_ORDER).contains(&nu) || !(0.0..=MAX_ARG).contains(&x) {
        return Err(OracleError::BesselRange { nu, x });
    }
    Ok(())
}

pub fn bessel_j(nu: f64, x: f64) -> Result<f64, OracleError> {
    Ok(bessel_j_all(nu, x)?.j)
}

/// Value, first and second derivative.
pub fn bessel_j_all(nu: f64, x: f64) -> Result<BesselValue, OracleError> {
    check(nu, x)?;
    if x == 0.0 {
        return Ok(at_origin(nu));
    }
    if x <= series_limit(nu) {
        Ok(series(nu, x))
    } else {
        let (j, j1) = miller(nu, x);
        let dj = nu / x * j - j1;
        let d2j = -dj / x - (1.0 - nu * nu / (x * x)) * j;
        Ok(BesselValue { j, dj, d2j })
    }
}

fn series_limit(nu: f64) -> f64 {
    nu.max(12.0)
}

fn at_origin(nu: f64) -> BesselValue {
    let j = if nu == 0.0 { 1.0 } else { 0.0 };
    let dj = if nu == 1.0 {
        0.5
    } else if nu > 0.0 && nu < 1.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let d2j = if nu == 0.0 {
        -0.5
    } else if nu == 2.0 {
        0.25
    } else if nu > 0.0 && nu < 1.0 {
        f64::NEG_INFINITY
    } else if nu > 1.0 && nu < 2.0 {
        f64::INFINITY
    } else {
        0.0
    };
    BesselValue { j, dj, d2j }
}

/// Power-series evaluation (any `x`, accurate for moderate `x`).
pub fn bessel_j_series(nu: f64, x: f64) -> Result<BesselValue, OracleError> {
    check(nu, x)?;
    if x == 0.0 {
        return Ok(at_origin(nu));
    }
    Ok(series(nu, x))
}

/// Backward-recurrence evaluation; returns `(J_ν(x), J_{ν+1}(x))`.
pub fn bessel_j_recurrence(nu: f64, x: f64) -> Result<(f64, f64), OracleError> {
    check(nu, x)?;
    if x == 0.0 {
        return Ok((at_origin(nu).j, 0.0));
    }
    Ok(miller(nu, x))
}

fn series(nu: f64, x: f64) -> BesselValue {
    // J = P Σ t_k, t_k = (−q)^k / (k! (ν+1)_k), q = (x/2)², P = (x/2)^ν / Γ(ν+1).
    let half = 0.5 * x;
    let q = Dd::from(half).mul(Dd::from(half));
    let mut t = Dd::ONE;
    let mut s0 = Dd::ONE;
    let mut s1 = Dd::from(nu);
    let mut s2 = Dd::from(nu).mul(Dd::from(nu - 1.0));
    let mut k = 0u32;
    loop {
        k += 1;
        let kf = k as f64;
        let denom = Dd::from(kf).mul(Dd::two_sum(nu, kf));
        t = t.mul(q).div(denom).neg();
        let a = Dd::two_sum(nu, 2.0 * kf);
        let a1 = Dd::two_sum(nu, 2.0 * kf - 1.0);
        s0 = s0.add(t);
        s1 = s1.add(t.mul(a));
        s2 = s2.add(t.mul(a).mul(a1));
        let scale = s0.hi.abs().max(s1.hi.abs()).max(s2.hi.abs()).max(1e-300);
        if kf * kf > q.hi && t.hi.abs() * (2.0 * kf + nu) * (2.0 * kf + nu) < 1e-33 * scale {
            break;
        }
        if k > 2000 {
            break;
        }
    }
    let p = half.powf(nu) / gamma(nu + 1.0);
    BesselValue {
        j: p * s0.to_f64(),
        dj: p * s1.to_f64() / x,
        d2j: p * s2.to_f64() / (x * x),
    }
}

fn miller(nu: f64, x: f64) -> (f64, f64) {
    let n = nu.floor() as usize;
    let nu0 = nu - n as f64;
    let top = (n as f64).max(x);
    let mut big = (top + 20.0 + 6.0 * top.cbrt() + (40.0 * top).sqrt()) as usize;
    big += big % 2;
    // f_{k+1}, f_k, with f_big = tiny and f_{big+1} = 0.
    let mut f_next = 0.0;
    let mut f = 1e-300;
    let mut at_n = 0.0;
    let mut at_n1 = 0.0;
    // Normalization sum Σ_k (ν₀ + 2k) c_k f_{2k}, c_k = Γ(ν₀+k)/k! (c₀·ν₀ → Γ(1+ν₀)).
    // The weights are accumulated from the top down, so track them via ratios.
    let mut weighted = 0.0;
    let kmax = big / 2;
    let mut c = gamma_ratio_coeff(nu0, kmax);
    for idx in (0..=big).rev() {
        if idx == n {
            at_n = f;
        }
        if idx == n + 1 {
            at_n1 = f;
        }
        if idx % 2 == 0 {
            let k = idx / 2;
            if k == 0 {
                weighted += gamma(1.0 + nu0) * f;
            } else {
                weighted += (nu0 + 2.0 * k as f64) * c * f;
                // c_{k-1} = c_k · k / (ν₀ + k − 1)
                if k > 1 {
                    c = c * k as f64 / (nu0 + k as f64 - 1.0);
                }
            }
        }
        if idx == 0 {
            break;
        }
        let f_prev = 2.0 * (nu0 + idx as f64) / x * f - f_next;
        f_next = f;
        f = f_prev;
        if f.abs() > 1e250 {
            f *= 1e-250;
            f_next *= 1e-250;
            weighted *= 1e-250;
            at_n *= 1e-250;
            at_n1 *= 1e-250;
        }
    }
    let norm = (0.5 * x).powf(nu0) / weighted;
    (at_n * norm, at_n1 * norm)
}

/// `c_k = Γ(ν₀ + k) / k!` computed upward from `c₁ = Γ(1 + ν₀)`.
fn gamma_ratio_coeff(nu0: f64, k: usize) -> f64 {
    let mut c = gamma(1.0 + nu0);
    for j in 1..k.max(1) {
        c *= (nu0 + j as f64) / (j as f64 + 1.0);
    }
    c
}

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

/// `ln Γ(z)` for `z > 0`.
pub fn ln_gamma(z: f64) -> f64 {
    if z < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        let pi = core::f64::consts::PI;
        return (pi / (pi * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    0.5 * (2.0 * core::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `Γ(z)` for `z > 0`, reduced to `[1, 2)` by exact-ish products.
pub fn gamma(z: f64) -> f64 {
    if z > 171.0 {
        return f64::INFINITY;
    }
    let mut z = z;
    let mut scale = 1.0;
    while z >= 2.0 {
        z -= 1.0;
        scale *= z;
    }
    while z < 1.0 {
        scale /= z;
        z += 1.0;
    }
    scale * ln_gamma(z).exp()
}

/// `m`-th positive zero of `J_ν`, bracketed by scanning and polished by Newton.
pub fn bessel_zero(nu: f64, m: usize) -> Result<f64, OracleError> {
    if !(0.0..=MAX_ORDER).contains(&nu) || m == 0 || m > 100 {
        return Err(OracleError::BesselZeroRange { nu, m });
    }
    let mut count = 0;
    let step = 0.5;
    let mut a = nu.max(1e-3);
    let mut fa = bessel_j(nu, a)?;
    while a < MAX_ARG - step {
        let b = a + step;
        let fb = bessel_j(nu, b)?;
        if fa == 0.0 || fa.signum() != fb.signum() {
            count += 1;
            if count == m {
                return polish(nu, a, b, fa);
            }
        }
        a = b;
        fa = fb;
    }
    Err(OracleError::BracketFailure { nu, m })
}

fn polish(nu: f64, mut a: f64, mut b: f64, fa: f64) -> Result<f64, OracleError> {
    let sa = fa.signum();
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if bessel_j(nu, mid)?.signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-6 {
            break;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..20 {
        let v = bessel_j_all(nu, x)?;
        let dx = v.j / v.dj;
        x -= dx;
        if dx.abs() < 1e-15 * x {
            break;
        }
    }
    Ok(x)
}

/// Double-double number `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn split(a: f64) -> (f64, f64) {
        let t = 134_217_729.0 * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        let (ah, al) = Self::split(a);
        let (bh, bl) = Self::split(b);
        let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
        Dd { hi: p, lo: err }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let s = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Self::two_prod(self.hi, o.hi);
        Self::quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Dd::from(q1)).neg());
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::from(q2)).neg());
        let q3 = r.hi / o.hi;
        Self::quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn half_order(x: f64) -> (f64, f64) {
        let s = (2.0 / (PI * x)).sqrt();
        (s * x.sin(), s * (x.sin() / x - x.cos()))
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(1.0) - 1.0).abs() < 1e-15);
        assert!((ln_gamma(51.0) - 148.477_766_951_773_02).abs() < 1e-11);
    }

    #[test]
    fn origin_values() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        for nu in [0.5, 1.0, 2.0 / 3.0, 7.0] {
            assert_eq!(bessel_j(nu, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[0.01, 0.3, 1.0, 4.0, 11.9, 12.5, 30.0, 99.0, 500.0, 999.0] {
            let (j12, j32) = half_order(x);
            let a = bessel_j(0.5, x).unwrap();
            let b = bessel_j(1.5, x).unwrap();
            let env = (j12 * j12 + j32 * j32).sqrt();
            assert!((a - j12).abs() <= 1e-13 * env, "J_1/2({x}) = {a} vs {j12}");
            assert!((b - j32).abs() <= 1e-13 * env, "J_3/2({x}) = {b} vs {j32}");
        }
    }

    #[test]
    fn reference_value() {
        let v = bessel_j(0.0, 10.0).unwrap();
        assert!((v + 0.245_935_764_451_348_3).abs() < 1e-15);
    }

    #[test]
    fn derivatives_satisfy_the_ode() {
        for nu in [0.0, 2.0 / 3.0, 1.0, 2.5, 4.0, 12.3, 40.0] {
            for x in [0.2, 3.0, 11.0, 13.0, 45.0, 200.0] {
                let v = bessel_j_all(nu, x).unwrap();
                let res = x * x * v.d2j + x * v.dj + (x * x - nu * nu) * v.j;
                let scale = x * x * (v.j.abs() + v.dj.abs() + v.d2j.abs()) + nu * nu * v.j.abs();
                assert!(res.abs() <= 1e-12 * scale.max(1e-300), "ν={nu} x={x}");
                let h = 1e-5 * x.min(1.0);
                let fd = (bessel_j(nu, x + h).unwrap() - bessel_j(nu, x - h).unwrap()) / (2.0 * h);
                assert!(
                    (fd - v.dj).abs() <= 1e-7 * (v.dj.abs() + v.j.abs() + 1e-12),
                    "ν={nu} x={x}: {fd} vs {}",
                    v.dj
                );
            }
        }
    }

    #[test]
    fn series_and_recurrence_agree_on_overlap() {
        for nu in [0.0, 0.25, 2.0 / 3.0, 1.0, 4.0 / 3.0, 2.0, 3.5, 8.0, 20.0, 49.0] {
            let mut x = 5.0;
            while x <= 20.0 {
                let s = bessel_j_series(nu, x).unwrap();
                let s1 = bessel_j_series(nu + 1.0, x).unwrap();
                let (r, r1) = bessel_j_recurrence(nu, x).unwrap();
                let env = (s.j * s.j + s1.j * s1.j).sqrt();
                assert!((s.j - r).abs() <= 1e-12 * env, "ν={nu} x={x}: {} vs {r}", s.j);
                assert!((s1.j - r1).abs() <= 1e-12 * env);
                x += 0.37;
            }
        }
    }

    /// Independent zero oracle: plain series for `J_ν`, bisection.
    fn bisect_zero(nu: f64, mut a: f64, mut b: f64) -> f64 {
        let f = |x: f64| {
            let mut t = (0.5 * x).powf(nu) / gamma(nu + 1.0);
            let mut s = t;
            for k in 1..80 {
                t *= -0.25 * x * x / (k as f64 * (nu + k as f64));
                s += t;
            }
            s
        };
        let fa = f(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m).signum() == fa.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn zeros() {
        let j01 = bessel_zero(0.0, 1).unwrap();
        assert!((j01 - bisect_zero(0.0, 2.0, 3.0)).abs() < 1e-13);
        assert!((j01 - 2.404_825_557_695_773).abs() < 1e-13);
        assert!(bessel_j(0.0, 2.404_825_557_695_773).unwrap().abs() <= 1e-12);
        let j21 = bessel_zero(2.0, 1).unwrap();
        assert!((j21 - bisect_zero(2.0, 5.0, 5.5)).abs() < 1e-13);
        assert!((j21 - 5.135_622_301_840_683).abs() < 1e-13);
        for nu in [0.0, 2.0 / 3.0, 2.0, 17.5] {
            let mut prev = 0.0;
            for m in [1, 2, 3, 10, 40, 100] {
                let z = bessel_zero(nu, m).unwrap();
                assert!(z > prev);
                assert!(bessel_j(nu, z).unwrap().abs() <= 1e-11);
                prev = z;
            }
        }
        assert!(bessel_zero(0.0, 0).is_err());
    }

    #[test]
    fn range_errors() {
        assert!(bessel_j(51.0, 1.0).is_err());
        assert!(bessel_j(1.0, 1001.0).is_err());
        assert!(bessel_j(-1.0, 1.0).is_err());
    }
}
