//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! Used by the special functions (contour and branch-cut integrals), the
//! subordination formula and the Wright-density normalization checks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss 7-point weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Sum of |Kronrod − Gauss| over the final partition.
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Single 15-point Kronrod panel with its embedded 7-point Gauss estimate.
/// Returns (kronrod, |kronrod − gauss|).
pub fn kronrod_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptively integrates `f` over `[a, b]`, splitting first at every point of
/// `breaks` that lies strictly inside the interval.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> QuadResult {
    let mut cuts: Vec<f64> = vec![a];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&p| p > a && p < b && p.is_finite())
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let (value, error) = kronrod_panel(&mut f, w[0], w[1]);
        evaluations += 15;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    loop {
        let (total, err): (f64, f64) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        let target = opts.abs_tol.max(opts.rel_tol * total.abs());
        if err <= target || heap.len() >= opts.max_intervals {
            return QuadResult {
                value: total,
                error: err,
                evaluations,
                converged: err <= target,
            };
        }
        let worst = heap.pop().expect("partition is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval can no longer be split in floating point
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            continue;
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod_panel(&mut f, lo, hi);
            evaluations += 15;
            heap.push(Segment {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}

/// Composite fixed-order rule: `panels` equal Kronrod panels on `[a, b]`.
pub fn composite_kronrod<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + width * p as f64;
            kronrod_panel(&mut f, lo, lo + width).0
        })
        .sum()
}

/// Abscissae and weights of the 15-point Kronrod rule mapped to `[a, b]`.
pub fn kronrod_nodes(a: f64, b: f64) -> Vec<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = Vec::with_capacity(15);
    for (&x, &w) in XGK.iter().zip(WGK.iter()).take(7) {
        out.push((center - half * x, w * half));
        out.push((center + half * x, w * half));
    }
    out.push((center, WGK[7] * half));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact_on_one_panel() {
        let (v, _) = kronrod_panel(&mut |x: f64| x.powi(20), -1.0, 1.0);
        assert!((v - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let r = integrate(
            |x: f64| x.sqrt().recip(),
            0.0,
            1.0,
            &[],
            QuadOptions::default(),
        );
        assert!(r.converged, "{r:?}");
        assert!((r.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn sharp_peak_with_breakpoint() {
        let eps = 1e-4;
        let f = |x: f64| eps / ((x - 0.3).powi(2) + eps * eps);
        let r = integrate(f, 0.0, 1.0, &[0.3], QuadOptions::default());
        let exact = (0.7 / eps).atan() + (0.3 / eps).atan();
        assert!((r.value - exact).abs() < 1e-10, "{} vs {}", r.value, exact);
    }

    #[test]
    fn node_table_integrates_cosine() {
        let s: f64 = kronrod_nodes(0.0, 1.0)
            .iter()
            .map(|&(x, w)| w * x.cos())
            .sum();
        assert!((s - 1f64.sin()).abs() < 1e-15);
    }
}
