//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! nonzero if any criterion fails.
//!
//! The Bonn reproduction runs only when `BONN_DATA_DIR` points at a directory
//! holding the five sets (`A`..`E` or `Z`, `O`, `N`, `F`, `S`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use stationplot::eval::ProblemSpec;
use stationplot::geometry::{circularity, hull_area, orient2d, quickhull2d, quickhull3d, Point2, Point3};
use stationplot::pipeline::{self, InputFormat, PipelineConfig, ProblemEntry};
use stationplot::stats::special::{chi2_cdf, f_cdf};
use stationplot::stats::{anova_oneway, kruskal_wallis};
use stationplot::svm::{KernelSpec, SmoParams, SvmModel};
use stationplot::timeseries::difference_series;
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn within(elapsed: Duration, limit_s: u64, what: Outcome) -> Outcome {
    match what {
        Outcome::Pass(d) if elapsed.as_secs_f64() > limit_s as f64 => {
            Outcome::Fail(format!("{d}; took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64()))
        }
        other => other,
    }
}

// ---------------------------------------------------------------- geometry

/// Hull vertices by exhaustive half-plane tests: `p_i → p_j` is a
/// counter-clockwise hull edge when no point lies strictly right of it and
/// collinear points stay inside the segment.
fn brute_hull(pts: &[Point2]) -> Vec<Point2> {
    let mut verts: Vec<Point2> = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if pts[i] == pts[j] {
                continue;
            }
            let (a, b) = (pts[i], pts[j]);
            let d = b - a;
            let ok = pts.iter().all(|&p| {
                let o = orient2d(a, b, p);
                if o > 0.0 {
                    return true;
                }
                if o < 0.0 {
                    return false;
                }
                let t = (p - a).dot(d) / d.dot(d);
                (0.0..=1.0).contains(&t)
            });
            if ok {
                for v in [a, b] {
                    if !verts.contains(&v) {
                        verts.push(v);
                    }
                }
            }
        }
    }
    // counter-clockwise around the centroid
    let (cx, cy) = verts.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
    let c = Point2::new(cx / verts.len() as f64, cy / verts.len() as f64);
    verts.sort_by(|p, q| (p.y - c.y).atan2(p.x - c.x).total_cmp(&(q.y - c.y).atan2(q.x - c.x)));
    verts
}

fn fan_area(v: &[Point2]) -> f64 {
    (1..v.len() - 1)
        .map(|i| 0.5 * (v[i] - v[0]).cross(v[i + 1] - v[0]).abs())
        .sum()
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, grid: bool) -> Vec<Point2> {
    loop {
        let pts: Vec<Point2> = if grid {
            // small integer lattice: exact collinearities and duplicates
            (0..n)
                .map(|_| Point2::new(rng.random_range(-6..=6) as f64, rng.random_range(-6..=6) as f64))
                .collect()
        } else {
            let (sx, sy) = (rng.random_range(0.1..100.0), rng.random_range(0.1..100.0));
            (0..n)
                .map(|_| Point2::new(rng.random_range(-sx..sx), rng.random_range(-sy..sy)))
                .collect()
        };
        // need a full-dimensional cloud
        if pts.iter().any(|&p| orient2d(pts[0], pts[1], p) != 0.0) && pts[0] != pts[1] {
            return pts;
        }
    }
}

fn criterion_geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_area = 0.0f64;
    for k in 0..1000 {
        let n = rng.random_range(3..=100);
        let pts = random_cloud(&mut rng, n, k % 4 == 3);
        let hull = match quickhull2d(&pts) {
            Ok(h) => h,
            Err(e) => return Outcome::Fail(format!("cloud {k}: {e}")),
        };
        let brute = brute_hull(&pts);
        let mut got = hull.vertices().to_vec();
        let mut want = brute.clone();
        got.sort_by(|a, b| a.lex_cmp(b));
        want.sort_by(|a, b| a.lex_cmp(b));
        if got != want {
            return Outcome::Fail(format!(
                "cloud {k}: {} hull vertices, brute force {}",
                got.len(),
                want.len()
            ));
        }
        let fan = fan_area(&brute);
        worst_area = worst_area.max((hull_area(&hull) - fan).abs() / fan);
    }
    if worst_area > 1e-12 {
        return Outcome::Fail(format!("area relative error {worst_area:e}"));
    }

    let mut worst_vol = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(8..=40);
        let pts: Vec<Point3> = (0..n)
            .map(|_| {
                Point3::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                )
            })
            .collect();
        let hull = match quickhull3d(&pts) {
            Ok(h) => h,
            Err(e) => return Outcome::Fail(format!("3D hull: {e}")),
        };
        let planes = supporting_planes(&pts);
        let lo = pts
            .iter()
            .fold([f64::INFINITY; 3], |m, p| [m[0].min(p.x), m[1].min(p.y), m[2].min(p.z)]);
        let hi = pts.iter().fold([f64::NEG_INFINITY; 3], |m, p| {
            [m[0].max(p.x), m[1].max(p.y), m[2].max(p.z)]
        });
        let samples = 1_000_000;
        let mut inside = 0usize;
        for _ in 0..samples {
            let q = Point3::new(
                rng.random_range(lo[0]..hi[0]),
                rng.random_range(lo[1]..hi[1]),
                rng.random_range(lo[2]..hi[2]),
            );
            if planes.iter().all(|(nrm, off)| nrm.dot(q) <= *off) {
                inside += 1;
            }
        }
        let box_vol = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
        let mc = box_vol * inside as f64 / samples as f64;
        worst_vol = worst_vol.max((hull.volume() - mc).abs() / mc);
    }
    check(
        worst_vol <= 0.02,
        format!("1000 planar hulls exact, area rel err {worst_area:.1e}, volume rel err {worst_vol:.2e}"),
    )
}

/// Planes through point triples with every point on one side (outward normal).
fn supporting_planes(pts: &[Point3]) -> Vec<(Point3, f64)> {
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                let n = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
                let off = n.dot(pts[i]);
                let s: Vec<f64> = pts.iter().map(|p| n.dot(*p) - off).collect();
                if s.iter().all(|&v| v <= 1e-12) {
                    out.push((n, off));
                } else if s.iter().all(|&v| v >= -1e-12) {
                    out.push((n * -1.0, -off));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- differencing

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn criterion_differencing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for s in 0..500 {
        let len = rng.random_range(10..400);
        let x: Vec<f64> = (0..len).map(|_| rng.random_range(-100.0..100.0)).collect();
        let y: Vec<f64> = (0..len).map(|_| rng.random_range(-100.0..100.0)).collect();
        let (a, b) = (rng.random_range(0..4), rng.random_range(0..4));
        let scale = x.iter().chain(&y).fold(0.0f64, |m, v| m.max(v.abs()));

        // Δᵃ∘Δᵇ = Δᵃ⁺ᵇ
        let lhs = difference_series(&difference_series(&x, b).unwrap(), a).unwrap();
        let rhs = difference_series(&x, a + b).unwrap();
        let tol = 1e-12 * scale * 2f64.powi((a + b) as i32);
        if lhs.len() != rhs.len() || lhs.iter().zip(&rhs).any(|(p, q)| (p - q).abs() > tol) {
            return Outcome::Fail(format!("signal {s}: composition a={a} b={b}"));
        }
        // closed form Σ (−1)^(n−k) C(n,k) x(t+k)
        let n = a + b;
        for (t, v) in rhs.iter().enumerate() {
            let want: f64 = (0..=n)
                .map(|k| if (n - k) % 2 == 0 { 1.0 } else { -1.0 } * binomial(n, k) * x[t + k])
                .sum();
            if (v - want).abs() > tol {
                return Outcome::Fail(format!("signal {s}: binomial form at t={t}"));
            }
        }
        // linearity
        let (alpha, beta) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| alpha * p + beta * q).collect();
        let dm = difference_series(&mix, n).unwrap();
        let (dx, dy) = (difference_series(&x, n).unwrap(), difference_series(&y, n).unwrap());
        for i in 0..dm.len() {
            if (dm[i] - (alpha * dx[i] + beta * dy[i])).abs() > 8.0 * tol {
                return Outcome::Fail(format!("signal {s}: linearity order {n}"));
            }
        }
        // degree-d polynomial: Δᵈ is d!·c_d, Δᵈ⁺¹ vanishes
        let d = s % 5;
        let c: Vec<f64> = (0..=d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let p: Vec<f64> = (0..len)
            .map(|t| c.iter().enumerate().map(|(j, cj)| cj * (t as f64).powi(j as i32)).sum())
            .collect();
        let pscale = p.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let fact: f64 = (1..=d).map(|i| i as f64).product();
        let dd = difference_series(&p, d).unwrap();
        let dd1 = difference_series(&p, d + 1).unwrap();
        let ptol = 1e-13 * pscale * 2f64.powi(d as i32 + 1);
        if dd.iter().any(|v| (v - fact * c[d]).abs() > ptol) || dd1.iter().any(|v| v.abs() > ptol) {
            return Outcome::Fail(format!("signal {s}: degree {d} polynomial not annihilated"));
        }
    }
    Outcome::Pass("500 signals: composition, binomial form, linearity, polynomial annihilation".into())
}

// ---------------------------------------------------------------- circularity

fn criterion_circularity() -> Outcome {
    let mut worst = 0.0f64;
    for n in 3..=64 {
        let pts: Vec<Point2> = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64 + 0.1;
                Point2::new(3.0 * t.cos() + 1.0, 3.0 * t.sin() - 2.0)
            })
            .collect();
        let hull = match quickhull2d(&pts) {
            Ok(h) => h,
            Err(e) => return Outcome::Fail(format!("{n}-gon: {e}")),
        };
        if hull.vertices().len() != n {
            return Outcome::Fail(format!("{n}-gon hull has {} vertices", hull.vertices().len()));
        }
        let got = circularity(hull.area(), hull.perimeter()).unwrap();
        let x = PI / n as f64;
        worst = worst.max((got - x / x.tan()).abs());
    }
    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)].map(|(x, y)| Point2::new(x, y));
    let sq = quickhull2d(&square).unwrap();
    let sq_err = (circularity(sq.area(), sq.perimeter()).unwrap() - PI / 4.0).abs();
    check(
        worst <= 1e-9 && sq_err <= 1e-12,
        format!("n-gons 3..64 max error {worst:.1e}, unit square error {sq_err:.1e}"),
    )
}

// ---------------------------------------------------------------- statistics

/// Adaptive Simpson on [a, b].
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

/// ∫₀ˣ density, substituting t = u² to tame the x^(k/2−1) singularity.
fn cdf_by_quadrature(log_density: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let g = |u: f64| {
        if u == 0.0 {
            0.0
        } else {
            2.0 * u * log_density(u * u).exp()
        }
    };
    let r = x.sqrt();
    // split to keep each panel smooth
    let cuts = 16;
    (0..cuts)
        .map(|i| simpson(&g, r * i as f64 / cuts as f64, r * (i + 1) as f64 / cuts as f64, 1e-14))
        .sum()
}

fn f_log_density(d1: f64, d2: f64) -> impl Fn(f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let lb = ln_gamma(d1 / 2.0) + ln_gamma(d2 / 2.0) - ln_gamma((d1 + d2) / 2.0);
    move |t: f64| {
        0.5 * d1 * (d1 / d2).ln() + (0.5 * d1 - 1.0) * t.ln() - 0.5 * (d1 + d2) * (1.0 + d1 * t / d2).ln() - lb
    }
}

fn chi2_log_density(k: f64) -> impl Fn(f64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let norm = 0.5 * k * 2f64.ln() + ln_gamma(k / 2.0);
    move |t: f64| (0.5 * k - 1.0) * t.ln() - 0.5 * t - norm
}

/// Plain textbook one-way ANOVA with statrs for the tail.
fn reference_anova(groups: &[Vec<f64>]) -> (f64, f64) {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let k = groups.len() as f64;
    let grand = all.iter().sum::<f64>() / n;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    let f = (ssb / (k - 1.0)) / (ssw / (n - k));
    let p = 1.0 - FisherSnedecor::new(k - 1.0, n - k).unwrap().cdf(f);
    (f, p)
}

/// Kruskal-Wallis by explicit pairwise rank counting.
fn reference_kruskal(groups: &[Vec<f64>]) -> (f64, f64) {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let rank = |v: f64| {
        let less = all.iter().filter(|&&w| w < v).count() as f64;
        let equal = all.iter().filter(|&&w| w == v).count() as f64;
        less + (equal + 1.0) / 2.0
    };
    let mut h = 0.0;
    for g in groups {
        let r: f64 = g.iter().map(|&v| rank(v)).sum();
        h += r * r / g.len() as f64;
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);
    let mut seen: Vec<f64> = Vec::new();
    let mut ties = 0.0;
    for &v in &all {
        if !seen.contains(&v) {
            seen.push(v);
            let t = all.iter().filter(|&&w| w == v).count() as f64;
            ties += t * t * t - t;
        }
    }
    h /= 1.0 - ties / (n * n * n - n);
    let p = 1.0 - ChiSquared::new(groups.len() as f64 - 1.0).unwrap().cdf(h);
    (h, p)
}

fn criterion_statistics() -> Outcome {
    let d1s = [1.0, 2.0, 3.0, 4.5, 10.0];
    let d2s = [2.0, 5.0, 12.0, 30.0, 100.0];
    let xs = [0.05, 0.4, 1.0, 2.5, 7.0];
    let mut worst_cdf = 0.0f64;
    let mut pairs = 0;
    for (i, &d1) in d1s.iter().enumerate() {
        for (j, &d2) in d2s.iter().enumerate() {
            for &x in &[xs[(i + j) % 5], xs[(i + 2 * j + 3) % 5]] {
                let q = cdf_by_quadrature(&f_log_density(d1, d2), x);
                worst_cdf = worst_cdf.max((f_cdf(x, d1, d2).unwrap() - q).abs());
                pairs += 1;
            }
        }
    }
    for &k in &[1.0, 2.0, 3.0, 5.0, 7.5, 10.0, 20.0, 50.0, 1.5, 4.0] {
        for &m in &[0.1, 0.5, 1.0, 1.5, 3.0] {
            let x = k * m;
            let q = cdf_by_quadrature(&chi2_log_density(k), x);
            worst_cdf = worst_cdf.max((chi2_cdf(x, k).unwrap() - q).abs());
            pairs += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_p = 0.0f64;
    let mut worst_stat = 0.0f64;
    for t in 0..50 {
        let shift = rng.random_range(0.0..1.5);
        let sizes = [rng.random_range(5..40), rng.random_range(5..40)];
        let normal = Normal::new(0.0, 1.0).unwrap();
        let groups: Vec<Vec<f64>> = sizes
            .iter()
            .enumerate()
            .map(|(g, &n)| {
                (0..n)
                    .map(|_| {
                        let v = normal.sample(&mut rng) + shift * g as f64;
                        // every third problem on a coarse grid to force ties
                        if t % 3 == 0 {
                            (v * 2.0).round() / 2.0
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect();
        let a = anova_oneway(&groups).unwrap();
        let (f, pf) = reference_anova(&groups);
        let k = kruskal_wallis(&groups).unwrap();
        let (h, ph) = reference_kruskal(&groups);
        worst_p = worst_p.max((a.p_value - pf).abs()).max((k.p_value - ph).abs());
        worst_stat = worst_stat
            .max((a.f_statistic - f).abs() / f.max(1e-300))
            .max((k.h_statistic - h).abs() / h.max(1e-300));
    }
    check(
        worst_cdf <= 1e-9 && worst_p <= 1e-8 && worst_stat <= 1e-10,
        format!(
            "{pairs} cdf points max error {worst_cdf:.1e}; 50 problems p error {worst_p:.1e}, statistic rel error {worst_stat:.1e}"
        ),
    )
}

// ---------------------------------------------------------------- svm

fn dual_feasible(m: &SvmModel) -> bool {
    let scale = m.alphas.iter().sum::<f64>().max(1.0);
    m.alphas.iter().all(|&a| a >= 0.0 && a <= m.c + 1e-12) && m.dual_balance().abs() <= 1e-10 * scale
}

fn criterion_svm() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let params = SmoParams::default();
    let mut models = 0;

    // separable blobs, linear
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (c, l) in [(-3.0, -1i8), (3.0, 1)] {
        for _ in 0..50 {
            rows.push(vec![c + rng.random_range(-1.0..1.0), c + rng.random_range(-1.0..1.0)]);
            labels.push(l);
        }
    }
    let lin = SvmModel::fit(&rows, &labels, KernelSpec::Linear, &params).unwrap();
    if lin.predict_rows(&rows).unwrap() != labels {
        return Outcome::Fail("linear model misclassifies separable blobs".into());
    }
    let w = lin.linear_weights().unwrap();
    let mut worst_dv = 0.0f64;
    for r in rows.iter().chain(&[vec![0.3, -7.0], vec![10.0, 10.0]]) {
        let z = lin.scaler.apply(r).unwrap();
        let explicit: f64 = w.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() + lin.bias;
        worst_dv = worst_dv.max((lin.decision_value(r).unwrap() - explicit).abs());
    }

    // jittered XOR, rbf σ = 2
    let mut xrows = Vec::new();
    let mut xlabels = Vec::new();
    for _ in 0..10 {
        for (x, y, l) in [(1.0, 1.0, 1i8), (-1.0, -1.0, 1), (1.0, -1.0, -1), (-1.0, 1.0, -1)] {
            xrows.push(vec![x + rng.random_range(-0.1..0.1), y + rng.random_range(-0.1..0.1)]);
            xlabels.push(l);
        }
    }
    let rbf = SvmModel::fit(&xrows, &xlabels, KernelSpec::rbf(2.0), &params).unwrap();
    if rbf.predict_rows(&xrows).unwrap() != xlabels {
        return Outcome::Fail("rbf model misclassifies jittered XOR".into());
    }

    // feasibility over every kernel on noisy problems too
    let mut all = vec![lin, rbf];
    for seed in 0..10 {
        let mut r = ChaCha8Rng::seed_from_u64(100 + seed);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| r.random_range(-2.0..2.0)).collect())
            .collect();
        let labels: Vec<i8> = rows
            .iter()
            .map(|x| {
                if x[0] + 0.5 * x[1] + r.random_range(-1.0..1.0) > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        for k in KernelSpec::standard_set() {
            all.push(SvmModel::fit(&rows, &labels, k, &params).unwrap());
        }
    }
    for m in &all {
        if m.converged() {
            models += 1;
            if !dual_feasible(m) {
                return Outcome::Fail(format!("{} model violates dual feasibility", m.kernel));
            }
        }
    }
    check(
        worst_dv <= 1e-9 && models == all.len(),
        format!(
            "{models}/{} models converged and feasible; linear decision error {worst_dv:.1e}",
            all.len()
        ),
    )
}

// ---------------------------------------------------------------- pipeline

fn write_record(path: &Path, samples: &[f64]) {
    let text: String = samples.iter().map(|v| format!("{v}\n")).collect();
    fs::write(path, text).unwrap();
}

/// White noise and random walks, 100 records each of 4097 samples.
fn surrogate_data(root: &Path) -> BTreeMap<String, PathBuf> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut data = BTreeMap::new();
    for class in ["noise", "walk"] {
        let dir = root.join(class);
        fs::create_dir_all(&dir).unwrap();
        for r in 0..100 {
            let steps: Vec<f64> = (0..4097).map(|_| rng.sample(StandardNormal)).collect();
            let samples = if class == "walk" {
                steps
                    .iter()
                    .scan(0.0, |acc, s| {
                        *acc += s;
                        Some(*acc)
                    })
                    .collect()
            } else {
                steps
            };
            write_record(&dir.join(format!("{class}{r:03}.csv")), &samples);
        }
        data.insert(class.to_string(), dir);
    }
    data
}

fn surrogate_problem() -> ProblemEntry {
    ProblemEntry::Custom(ProblemSpec::new("noise-vs-walk", &["noise"], &["walk"]))
}

fn criterion_surrogate(root: &Path) -> Outcome {
    let config = PipelineConfig {
        data: surrogate_data(&root.join("data")),
        input_format: InputFormat::Csv,
        problems: vec![surrogate_problem()],
        kernels: vec!["linear".into()],
        output: root.join("out"),
        ..PipelineConfig::default()
    };
    let summary = match pipeline::run_pipeline(&config) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let best = &summary.best[0];
    check(
        best.accuracy_mean >= 95.0,
        format!(
            "linear kernel, best n = {}: {:.2} ± {:.2} % over 100 runs",
            best.order, best.accuracy_mean, best.accuracy_std
        ),
    )
}

fn outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let files = [pipeline::FEATURES_DIR, pipeline::REPORTS_DIR, pipeline::STATS_DIR]
        .iter()
        .flat_map(|sub| fs::read_dir(dir.join(sub)).unwrap())
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("csv" | "json")));
    for p in files {
        out.insert(
            p.strip_prefix(dir).unwrap().display().to_string(),
            fs::read(&p).unwrap(),
        );
    }
    out
}

fn criterion_determinism(root: &Path) -> Outcome {
    let data = root.join("data");
    let config = serde_json::json!({
        "data": { "noise": data.join("noise"), "walk": data.join("walk") },
        "input_format": "csv",
        "problems": [{ "name": "noise-vs-walk", "negative": ["noise"], "positive": ["walk"] }],
        "runs": 30,
        "plot": false,
        "seed": 11,
    });
    let cfg_path = root.join("config.json");
    fs::write(&cfg_path, config.to_string()).unwrap();
    let mut results = Vec::new();
    for (i, threads) in [1, 8, 8].iter().enumerate() {
        let out = root.join(format!("run{i}"));
        let status = Command::new(env!("CARGO_BIN_EXE_stationplot"))
            .args(["pipeline", "--config"])
            .arg(&cfg_path)
            .args(["--threads", &threads.to_string(), "--output"])
            .arg(&out)
            .output()
            .unwrap();
        if !status.status.success() {
            return Outcome::Fail(format!("pipeline failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        results.push(outputs(&out));
    }
    let files = results[0].len();
    check(
        files > 0 && results.iter().all(|r| *r == results[0]),
        format!("{files} feature/report/stats files identical across 1, 8 and 8 threads"),
    )
}

fn bonn_dirs(root: &Path) -> Option<BTreeMap<String, PathBuf>> {
    let names = [("A", "Z"), ("B", "O"), ("C", "N"), ("D", "F"), ("E", "S")];
    let mut out = BTreeMap::new();
    for (set, alt) in names {
        let dir = [set, alt, &set.to_lowercase(), &alt.to_lowercase()]
            .iter()
            .map(|n| root.join(n))
            .find(|p| p.is_dir())?;
        out.insert(set.to_string(), dir);
    }
    Some(out)
}

fn criterion_bonn(tmp: &Path) -> Outcome {
    let Some(root) = std::env::var_os("BONN_DATA_DIR") else {
        return Outcome::Skip("BONN_DATA_DIR not set; point it at the Bonn sets to run the reproduction".into());
    };
    let Some(data) = bonn_dirs(Path::new(&root)) else {
        return Outcome::Skip(format!(
            "{}: expected subdirectories A..E or Z, O, N, F, S",
            Path::new(&root).display()
        ));
    };
    let config = PipelineConfig {
        data,
        output: tmp.to_path_buf(),
        ..PipelineConfig::default()
    };
    let summary = match pipeline::run_pipeline(&config) {
        Ok(s) => s,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let best = |name: &str| summary.best.iter().find(|b| b.problem == name).cloned();
    let (Some(ae), Some(abcde)) = (best("a-vs-e"), best("abcd-vs-e")) else {
        return Outcome::Fail("pipeline did not evaluate both problems".into());
    };
    // p-values at the best A-vs-E order
    let table = fs::read_to_string(
        tmp.join(pipeline::STATS_DIR)
            .join(format!("significance_n{}.csv", ae.order)),
    )
    .unwrap();
    let header: Vec<&str> = table.lines().next().unwrap().split(',').collect();
    let cols: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("a-vs-e_"))
        .map(|(i, _)| i)
        .collect();
    let worst_p = table
        .lines()
        .skip(1)
        .flat_map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            cols.iter()
                .map(move |&c| f[c].parse::<f64>().unwrap())
                .collect::<Vec<_>>()
        })
        .fold(0.0f64, f64::max);
    check(
        ae.accuracy_mean >= 97.0 && abcde.accuracy_mean >= 95.0 && worst_p <= 1e-4,
        format!(
            "A vs E {:.2} ± {:.2} % ({}, n = {}); ABCD vs E {:.2} ± {:.2} % ({}, n = {}); largest A-vs-E p {worst_p:.2e}",
            ae.accuracy_mean, ae.accuracy_std, ae.kernel, ae.order, abcde.accuracy_mean, abcde.accuracy_std, abcde.kernel, abcde.order
        ),
    )
}

fn main() {
    // libtest-style arguments (filters, --nocapture) are accepted and ignored
    let tmp = tempfile::tempdir().unwrap();
    let surrogate = tmp.path().join("surrogate");
    let bonn = tmp.path().join("bonn");

    type Criterion<'a> = (&'a str, u64, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("geometry oracles", 30, Box::new(criterion_geometry)),
        ("differencing algebra", 5, Box::new(criterion_differencing)),
        ("circularity analytics", 5, Box::new(criterion_circularity)),
        ("statistics oracles", 10, Box::new(criterion_statistics)),
        ("svm suite", 10, Box::new(criterion_svm)),
        ("bonn reproduction", 600, Box::new(|| criterion_bonn(&bonn))),
        ("synthetic surrogate", 120, Box::new(|| criterion_surrogate(&surrogate))),
        ("determinism", 120, Box::new(|| criterion_determinism(&surrogate))),
    ];

    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let outcome = within(start.elapsed(), *limit, outcome);
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {} {tag} {name} ({secs:.2} s): {detail}", i + 1);
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
