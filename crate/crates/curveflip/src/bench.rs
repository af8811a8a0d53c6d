//! Benchmark harness for the slope family on the once-punctured torus:
//! flips-only move counts grow linearly in the slope, the accelerated
//! engine's flip-twist metric length polylogarithmically.

use std::time::Instant;

use num::traits::One;

use crate::coords::{MultiCurve, Weight};
use crate::error::Result;
use crate::simplify::{simplify_accelerated, simplify_flips_only, SimplifyConfig};
use crate::surface::{surfaces, Triangulation};

/// The slope-`2^j` instance: weights `(k, 1, k+1)` on the standard torus.
pub fn slope_instance(log2_k: u32) -> (Triangulation, MultiCurve) {
    let tri = surfaces::once_punctured_torus();
    let k: Weight = Weight::one() << log2_k;
    let curve =
        MultiCurve::new(&tri, vec![k.clone(), Weight::one(), k + 1u32]).unwrap();
    (tri, curve)
}

#[derive(Clone, Debug)]
pub struct SlopeRow {
    pub log2_k: u32,
    /// Flips-only move count, when run (skipped above `flips_log2_max`).
    pub flips_moves: Option<u64>,
    pub flips_ms: Option<f64>,
    /// Accelerated flip-twist metric length.
    pub accel_metric: u64,
    pub accel_ms: f64,
}

/// Run the slope family for `log2 k = 4 ..= log2_max`, timing each engine
/// over `samples` repetitions and keeping the best time.
pub fn bench_slope(log2_max: u32, samples: u32, flips_log2_max: u32) -> Result<Vec<SlopeRow>> {
    let cfg = SimplifyConfig::default();
    let mut rows = Vec::new();
    for j in 4..=log2_max {
        let (tri, curve) = slope_instance(j);
        let mut flips_moves = None;
        let mut flips_ms = None;
        if j <= flips_log2_max {
            let mut best_ms = f64::INFINITY;
            for _ in 0..samples.max(1) {
                let t0 = Instant::now();
                let out = simplify_flips_only(&tri, &curve, &cfg)?;
                best_ms = best_ms.min(t0.elapsed().as_secs_f64() * 1e3);
                flips_moves = Some(out.log.len() as u64);
            }
            flips_ms = Some(best_ms);
        }
        let mut accel_metric = 0;
        let mut accel_ms = f64::INFINITY;
        for _ in 0..samples.max(1) {
            let t0 = Instant::now();
            let out = simplify_accelerated(&tri, &curve, &cfg)?;
            accel_ms = accel_ms.min(t0.elapsed().as_secs_f64() * 1e3);
            accel_metric = out.log.metric_length();
        }
        rows.push(SlopeRow { log2_k: j, flips_moves, flips_ms, accel_metric, accel_ms });
    }
    Ok(rows)
}

pub fn to_csv(rows: &[SlopeRow]) -> String {
    let mut out = String::from("log2_k,flips_moves,accel_metric,flips_ms,accel_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:.3}\n",
            r.log2_k,
            r.flips_moves.map(|v| v.to_string()).unwrap_or_default(),
            r.accel_metric,
            r.flips_ms.map(|v| format!("{v:.3}")).unwrap_or_default(),
            r.accel_ms,
        ));
    }
    out
}

/// Least-squares fit of `y = a + b x + c x^2`; returns `(a, b, c, r_squared)`.
pub fn fit_quadratic(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    assert!(xs.len() == ys.len() && xs.len() >= 3);
    let n = xs.len() as f64;
    let (mut sx, mut sx2, mut sx3, mut sx4) = (0.0, 0.0, 0.0, 0.0);
    let (mut sy, mut sxy, mut sx2y) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let x2 = x * x;
        sx += x;
        sx2 += x2;
        sx3 += x2 * x;
        sx4 += x2 * x2;
        sy += y;
        sxy += x * y;
        sx2y += x2 * y;
    }
    // Normal equations, solved by Cramer's rule.
    let m = [[n, sx, sx2], [sx, sx2, sx3], [sx2, sx3, sx4]];
    let rhs = [sy, sxy, sx2y];
    let det3 = |m: &[[f64; 3]; 3]| -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&m);
    let col = |i: usize| -> f64 {
        let mut mm = m;
        for r in 0..3 {
            mm[r][i] = rhs[r];
        }
        det3(&mm) / d
    };
    let (a, b, c) = (col(0), col(1), col(2));
    let mean = sy / n;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let fit = a + b * x + c * x * x;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean) * (y - mean);
    }
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (a, b, c, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_fit_recovers_coefficients() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 + 0.5 * x + 0.25 * x * x).collect();
        let (a, b, c, r2) = fit_quadratic(&xs, &ys);
        assert!((a - 3.0).abs() < 1e-9);
        assert!((b - 0.5).abs() < 1e-9);
        assert!((c - 0.25).abs() < 1e-9);
        assert!(r2 > 0.999999);
    }

    #[test]
    fn small_bench_rows_have_expected_shape() {
        let rows = bench_slope(6, 1, 6).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            let k = 1u64 << r.log2_k;
            let moves = r.flips_moves.unwrap();
            assert!(moves >= k * 4 / 5 && moves <= k * 6 / 5);
            assert!(r.accel_metric <= 5 * (r.log2_k as u64) * (r.log2_k as u64) + 40);
        }
        let csv = to_csv(&rows);
        assert!(csv.lines().count() == 4);
        assert!(csv.starts_with("log2_k,"));
    }
}
