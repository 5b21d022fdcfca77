//! One-dimensional and triangle quadrature rules.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule computed by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

const GK15_XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * GK15_WK[7];
    let mut gauss = fc * GK15_WG[3];
    for j in 0..7 {
        let x = h * GK15_XK[j];
        let s = f(c - x) + f(c + x);
        kronrod += GK15_WK[j] * s;
        if j % 2 == 1 {
            gauss += GK15_WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration to an absolute tolerance.
pub fn adaptive(a: f64, b: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut stack: Vec<(f64, f64, f64, u32)> = Vec::new();
    let (v, e) = gk15(a, b, &mut f);
    let mut total = 0.0;
    stack.push((a, b, v, 0));
    let _ = e;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (l, el) = gk15(lo, mid, &mut f);
        let (r, er) = gk15(mid, hi, &mut f);
        let err = (l + r - whole).abs().max(el + er);
        let local_tol = tol * (hi - lo) / (b - a).abs();
        if err <= local_tol.max(f64::EPSILON * (l + r).abs()) || depth >= 48 {
            total += l + r;
        } else {
            stack.push((lo, mid, l, depth + 1));
            stack.push((mid, hi, r, depth + 1));
        }
    }
    total
}

/// Quadrature rule on the reference triangle in barycentric coordinates.
/// Weights sum to 1 (multiply by the triangle area).
#[derive(Clone, Copy, Debug)]
pub struct TriangleRule {
    pub points: &'static [[f64; 3]],
    pub weights: &'static [f64],
    pub degree: u32,
}

const THIRD: f64 = 1.0 / 3.0;

/// Edge-midpoint rule, exact for degree 2.
pub const TRI_DEGREE2: TriangleRule = TriangleRule {
    points: &[[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
    weights: &[THIRD, THIRD, THIRD],
    degree: 2,
};

const D4_A: f64 = 0.445_948_490_915_965;
const D4_B: f64 = 0.091_576_213_509_771;
const D4_WA: f64 = 0.223_381_589_678_011;
const D4_WB: f64 = 0.109_951_743_655_322;

/// Six-point rule, exact for degree 4.
pub const TRI_DEGREE4: TriangleRule = TriangleRule {
    points: &[
        [D4_A, D4_A, 1.0 - 2.0 * D4_A],
        [D4_A, 1.0 - 2.0 * D4_A, D4_A],
        [1.0 - 2.0 * D4_A, D4_A, D4_A],
        [D4_B, D4_B, 1.0 - 2.0 * D4_B],
        [D4_B, 1.0 - 2.0 * D4_B, D4_B],
        [1.0 - 2.0 * D4_B, D4_B, D4_B],
    ],
    weights: &[D4_WA, D4_WA, D4_WA, D4_WB, D4_WB, D4_WB],
    degree: 4,
};

const D5_A: f64 = 0.470_142_064_105_115;
const D5_B: f64 = 0.101_286_507_323_456;
const D5_WA: f64 = 0.132_394_152_788_506;
const D5_WB: f64 = 0.125_939_180_544_827;

/// Seven-point rule, exact for degree 5.
pub const TRI_DEGREE5: TriangleRule = TriangleRule {
    points: &[
        [THIRD, THIRD, THIRD],
        [D5_A, D5_A, 1.0 - 2.0 * D5_A],
        [D5_A, 1.0 - 2.0 * D5_A, D5_A],
        [1.0 - 2.0 * D5_A, D5_A, D5_A],
        [D5_B, D5_B, 1.0 - 2.0 * D5_B],
        [D5_B, 1.0 - 2.0 * D5_B, D5_B],
        [1.0 - 2.0 * D5_B, D5_B, D5_B],
    ],
    weights: &[0.225, D5_WA, D5_WA, D5_WA, D5_WB, D5_WB, D5_WB],
    degree: 5,
};
