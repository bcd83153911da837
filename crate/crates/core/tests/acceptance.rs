//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robin_eit_core::bie::{self, BieDiscretization, DEFAULT_CURVE_NODES, DEFAULT_DISC_NODES};
use robin_eit_core::contour::level_set;
use robin_eit_core::factorization::{apply_noise, indicator, w_field, FilterSpec};
use robin_eit_core::field::{extract_peaks, jaccard};
use robin_eit_core::linalg::{hermitian_part_eigenvalues, relative_asymmetry, spectral_norm};
use robin_eit_core::music::{self, ResponseMatrix, DEFAULT_RANK_THRESHOLD};
use robin_eit_core::noise::hadamard_noise;
use robin_eit_core::series::{self, SeriesCoefficients};
use robin_eit_core::{
    BoundaryGrid, Complex64, CurrentGapMatrix, FourierBasisSet, InclusionGeometry, Point, RobinCoefficient,
    SamplingGrid, SmallDiscs, TrigProfile,
};

type Outcome = (bool, String);
/// Name, check and wall-clock budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, f64);

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    // least-squares slope of ln y against ln x
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn music_run(centers: &[Point]) -> (ResponseMatrix, Vec<Point>) {
    let grid = BoundaryGrid::default();
    let gamma = RobinCoefficient::constant(1.0).unwrap();
    let discs = SmallDiscs::unit_discs(centers, 0.01).unwrap();
    let basis = FourierBasisSet::music(20);
    let clean = bie::assemble_born_operator(&discs, &gamma, &basis, &grid, DEFAULT_DISC_NODES).unwrap();
    let noisy = hadamard_noise(clean.matrix(), 0.01, 1).unwrap();
    let data = clean.with_matrix(noisy).unwrap();
    let f = music::assemble_f(&data, DEFAULT_RANK_THRESHOLD).unwrap();
    let field = music::w_music(&f, &SamplingGrid::default()).unwrap();
    let peaks = extract_peaks(&field, Some(centers.len())).into_iter().map(|p| p.point).collect();
    (f, peaks)
}

/// Largest distance from a true center to its nearest peak.
fn peak_error(centers: &[Point], peaks: &[Point]) -> f64 {
    if peaks.len() < centers.len() {
        return f64::INFINITY;
    }
    centers
        .iter()
        .map(|c| peaks.iter().map(|p| p.distance(*c)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn music_example(centers: &[Point], tol: f64) -> Outcome {
    let (f, peaks) = music_run(centers);
    let err = peak_error(centers, &peaks);
    let listed: Vec<String> = peaks.iter().map(|p| format!("({:.4}, {:.4})", p.x, p.y)).collect();
    (err <= tol, format!("peaks {} rank {} max error {err:.4} (tol {tol})", listed.join(" "), f.rank()))
}

fn criterion1() -> Outcome {
    music_example(&[Point::new(-0.25, -0.25), Point::new(0.25, 0.25)], 0.05)
}

fn criterion2() -> Outcome {
    music_example(&[Point::new(-0.25, 0.25), Point::new(-0.25, -0.25)], 0.06)
}

fn synthetic_utut(centers: &[Point], weights: &[f64], order: usize) -> DMatrix<Complex64> {
    let u = DMatrix::from_fn(order + 1, centers.len(), |m, j| {
        Complex64::new(centers[j].x, centers[j].y).powu(m as u32)
    });
    let t = DMatrix::from_diagonal(&DVector::from_iterator(weights.len(), weights.iter().map(|&w| Complex64::new(w, 0.0))));
    &u * t * u.transpose()
}

fn criterion3() -> Outcome {
    let ex1 = music_run(&[Point::new(-0.25, -0.25), Point::new(0.25, 0.25)]).0.rank();
    let ex2 = music_run(&[Point::new(-0.25, 0.25), Point::new(-0.25, -0.25)]).0.rank();
    // two well-separated components with comparable strength
    let centers = [Point::new(0.8, 0.0), Point::new(-0.8, 0.0)];
    let f = ResponseMatrix::new(synthetic_utut(&centers, &[1.0, 1.0], 20), DEFAULT_RANK_THRESHOLD).unwrap();
    let taus: Vec<f64> = (0..=40).map(|k| 10f64.powf(-10.0 + 9.69 * k as f64 / 40.0)).collect();
    let synthetic_ok = taus.iter().all(|&t| f.detect_rank(t) == 2);
    let s = f.singular_values();
    (
        ex1 == 2 && ex2 == 2 && synthetic_ok,
        format!("example ranks {ex1}, {ex2}; synthetic σ₂/σ₁ = {:.3}, σ₃/σ₁ = {:.1e}, rank 2 over τ ∈ [1e-10, 0.49]: {synthetic_ok}", s[1] / s[0], s[2] / s[0]),
    )
}

fn criterion4() -> Outcome {
    let grid = BoundaryGrid::default();
    let gamma = RobinCoefficient::constant(1.0).unwrap();
    let geometry = InclusionGeometry::concentric_disc(0.5).unwrap();
    let basis = FourierBasisSet::symmetric(31);
    let disc = BieDiscretization::new(&geometry, &gamma, DEFAULT_CURVE_NODES).unwrap();
    let a_bie = disc.assemble(&basis, &grid).unwrap().to_nodal().unwrap();
    let a_series = series::assemble_series_operator(&grid, &SeriesCoefficients::new(0.5, 1.0, 31).unwrap()).unwrap();
    let op_err = spectral_norm(&(a_bie.matrix() - a_series.matrix())) / spectral_norm(a_series.matrix());

    let mut mode_err: f64 = 0.0;
    for n in -10..=10i32 {
        if n == 0 {
            continue;
        }
        let exact = series::current_gap_eigenvalue(n, 0.5, 1.0).unwrap();
        let gap = disc.current_gap(n, &grid).unwrap();
        // projection of the response onto e^{inθ}
        let coef: Complex64 = grid
            .angles()
            .zip(gap.iter())
            .map(|(t, v)| v * Complex64::from_polar(1.0, -(n as f64) * t))
            .sum::<Complex64>()
            / grid.len() as f64;
        mode_err = mode_err.max((coef - exact).norm() / exact.abs());
    }
    (
        op_err <= 1e-6 && mode_err <= 1e-8,
        format!("operator relative error {op_err:.2e} (tol 1e-6), worst mode relative error {mode_err:.2e} (tol 1e-8)"),
    )
}

fn criterion5() -> Outcome {
    let orders: Vec<usize> = (2..=8).collect();
    let rows = series::truncation_error_report(0.5, 1.0, &orders, series::DEFAULT_REFERENCE_ORDER).unwrap();
    let ns: Vec<f64> = rows.iter().map(|r| r.order as f64).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.error.ln()).collect();
    // slope of ln error against N (not log-log)
    let n = ns.len() as f64;
    let (mx, my) = (ns.iter().sum::<f64>() / n, errs.iter().sum::<f64>() / n);
    let s = ns.iter().zip(&errs).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / ns.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let target = 2.0 * 0.5f64.ln();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio()).collect();
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    (
        ((s - target) / target).abs() <= 0.15 && spread <= 5.0,
        format!("slope {s:.4} vs {target:.4} (±15%), error/bound spread {spread:.3} (≤ 5)"),
    )
}

fn criterion6() -> Outcome {
    let gamma = RobinCoefficient::constant(1.0).unwrap();
    let base = SmallDiscs::unit_discs(&[Point::new(0.3, 0.0)], 0.02).unwrap();
    let scales = [0.02, 0.04, 0.08];
    let rows = bie::asymptotic_scaling_report(
        &base,
        &gamma,
        &scales,
        &FourierBasisSet::music(20),
        &BoundaryGrid::default(),
        DEFAULT_DISC_NODES,
    )
    .unwrap();
    let born: Vec<f64> = rows.iter().map(|r| r.born).collect();
    let diff: Vec<f64> = rows.iter().map(|r| r.full_minus_born).collect();
    let (s1, s2) = (slope(&scales, &born), slope(&scales, &diff));
    (
        (s1 - 1.0).abs() <= 0.15 && (s2 - 2.0).abs() <= 0.25,
        format!("‖born‖ slope {s1:.4} (1 ± 0.15), ‖full − born‖ slope {s2:.4} (2 ± 0.25); ‖full − born‖ = {:.3?}", diff),
    )
}

fn circle_field(radius: f64, delta: f64, spec: FilterSpec, seed: u64) -> robin_eit_core::field::IndicatorField {
    let grid = BoundaryGrid::default();
    let a = series::assemble_series_operator(&grid, &SeriesCoefficients::new(radius, 1.0, 10).unwrap()).unwrap();
    w_field(&apply_noise(&a, delta, seed).unwrap(), &spec, &SamplingGrid::default()).unwrap()
}

fn criterion7() -> Outcome {
    let f3 = circle_field(0.5, 0.05, FilterSpec::SpectralCutoff { alpha: 1e-7 }, 1);
    let c3 = level_set(&f3, 0.1).unwrap();
    let (m3, s3) = (c3.mean_radius(Point::ORIGIN), c3.radial_std(Point::ORIGIN));
    let f4 = circle_field(0.25, 0.02, FilterSpec::Tikhonov { alpha: 1e-7 }, 1);
    let c4 = level_set(&f4, 0.2).unwrap();
    let m4 = c4.mean_radius(Point::ORIGIN);
    let ok = !c3.is_empty() && !c4.is_empty() && (m3 - 0.5).abs() <= 0.075 && s3 <= 0.1 && (m4 - 0.25).abs() <= 0.05;
    (ok, format!("ρ = 0.5: mean radius {m3:.4}, radial std {s3:.4}; ρ = 0.25: mean radius {m4:.4}"))
}

fn general_system(profile: TrigProfile, delta: f64) -> robin_eit_core::factorization::NoisySystem {
    let geometry = InclusionGeometry::star_shaped(profile).unwrap();
    let a = bie::assemble_bie_operator(
        &geometry,
        &RobinCoefficient::reciprocal_exp_cos(),
        &FourierBasisSet::symmetric(30),
        &BoundaryGrid::default(),
        DEFAULT_CURVE_NODES,
    )
    .unwrap();
    apply_noise(&a, delta, 1).unwrap()
}

fn criterion8() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, profile, delta) in [("acorn", TrigProfile::acorn(), 0.02), ("star", TrigProfile::star(), 0.08)] {
        let sys = general_system(profile, delta);
        let grid = SamplingGrid::default();
        let tik = w_field(&sys, &FilterSpec::Tikhonov { alpha: 1e-5 }, &grid).unwrap();
        let lw = w_field(&sys, &FilterSpec::Landweber { alpha: 1e-5, beta: None }, &grid).unwrap();
        let j = jaccard(&tik.superlevel_mask(0.2), &lw.superlevel_mask(0.2));
        ok &= j >= 0.8;
        parts.push(format!("{name} Jaccard {j:.3}"));
    }
    (ok, format!("{} (≥ 0.8)", parts.join(", ")))
}

fn criterion9() -> Outcome {
    let grid = BoundaryGrid::default();
    let series_op = series::assemble_series_operator(&grid, &SeriesCoefficients::new(0.5, 1.0, 31).unwrap()).unwrap();
    let acorn = bie::assemble_bie_operator(
        &InclusionGeometry::star_shaped(TrigProfile::acorn()).unwrap(),
        &RobinCoefficient::reciprocal_exp_cos(),
        &FourierBasisSet::symmetric(30),
        &grid,
        DEFAULT_CURVE_NODES,
    )
    .unwrap()
    .to_nodal()
    .unwrap();
    let min_eig = [&series_op, &acorn]
        .iter()
        .map(|a: &&CurrentGapMatrix| {
            // scale-free check on the quadratic form
            let m = a.matrix();
            hermitian_part_eigenvalues(m)[0] / spectral_norm(m)
        })
        .fold(f64::INFINITY, f64::min);

    let centers = [Point::new(-0.25, -0.25), Point::new(0.25, 0.25)];
    let discs = SmallDiscs::unit_discs(&centers, 0.01).unwrap();
    let born = bie::assemble_born_operator(
        &discs,
        &RobinCoefficient::constant(1.0).unwrap(),
        &FourierBasisSet::music(20),
        &grid,
        DEFAULT_DISC_NODES,
    )
    .unwrap();
    let f = music::assemble_f_matrix(&born).unwrap();
    let asym = relative_asymmetry(&f).max(relative_asymmetry(acorn.matrix()));

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let (r, c) = (rng.random_range(2..30), rng.random_range(2..30));
        let a = DMatrix::from_fn(r, c, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let delta = rng.random_range(0.0..0.5);
        let noisy = hadamard_noise(&a, delta, trial).unwrap();
        worst = worst.max(spectral_norm(&(noisy - &a)) / (delta * spectral_norm(&a)));
    }
    (
        min_eig >= -1e-10 && asym <= 1e-8 && worst <= 1.0 + 1e-12,
        format!("min eigenvalue of symmetric part / ‖A‖ {min_eig:.2e}, asymmetry {asym:.2e}, worst noise ratio ‖A^δ−A‖/(δ‖A‖) {worst:.4}"),
    )
}

fn criterion10() -> Outcome {
    let centers = [Point::new(-0.25, -0.25), Point::new(0.25, 0.25)];
    let f = ResponseMatrix::new(synthetic_utut(&centers, &[1.0, 1.0], 20), DEFAULT_RANK_THRESHOLD)
        .unwrap()
        .with_rank(2)
        .unwrap();
    let at_centers = centers
        .iter()
        .map(|&c| f.noise_projection_sq(&music::probe_phi(c, 20).unwrap()).sqrt())
        .fold(0.0, f64::max);
    let far = [Point::new(0.5, -0.5), Point::new(-0.6, 0.1), Point::new(0.0, 0.7)];
    let at_far = far
        .iter()
        .map(|&p| f.noise_projection_sq(&music::probe_phi(p, 20).unwrap()).sqrt())
        .fold(f64::INFINITY, f64::min);

    let grid = BoundaryGrid::default();
    let a = series::assemble_series_operator(&grid, &SeriesCoefficients::new(0.5, 1.0, 31).unwrap()).unwrap();
    let sys = apply_noise(&a, 0.0, 0).unwrap();
    let spec = FilterSpec::Tikhonov { alpha: 1e-7 };
    let inside = indicator(&sys, &spec, Point::ORIGIN).unwrap();
    let outside = indicator(&sys, &spec, Point::new(0.6, 0.0)).unwrap();
    let ratio = outside / inside;
    (
        at_centers <= 1e-8 && at_far >= 1e-3 && ratio >= 10.0,
        format!("‖Pφ‖ at centers {at_centers:.2e}, at far points ≥ {at_far:.2e}; indicator ratio outside/center {ratio:.3e}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("MUSIC example 1 peaks", criterion1, 30.0),
        ("MUSIC example 2 peaks", criterion2, 30.0),
        ("rank detection", criterion3, f64::INFINITY),
        ("BIE vs series oracle", criterion4, f64::INFINITY),
        ("truncation convergence", criterion5, 5.0),
        ("asymptotic scaling", criterion6, 60.0),
        ("circular factorization contours", criterion7, f64::INFINITY),
        ("filter insensitivity", criterion8, f64::INFINITY),
        ("operator invariants", criterion9, f64::INFINITY),
        ("range dichotomy", criterion10, f64::INFINITY),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        let secs = start.elapsed().as_secs_f64();
        let ok = ok && secs < *budget;
        if !ok {
            failures += 1;
        }
        println!("{} [{:>2}] {name}: {detail} [{secs:.2} s]", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
