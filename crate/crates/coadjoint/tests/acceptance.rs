//! Acceptance criteria AC1–AC8, one line each. AC8 is reported but never fails the run.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use coadjoint::characters::GaussianDensity;
use coadjoint::cli::{preset, run, ExperimentConfig, LambdaSpec, Verdict, VerificationReport};
use coadjoint::contour::{build_contour, fourier_transform_suite, pfaffian, ContourQuadrature, ImaginaryUnit, SigmaCChoice};
use coadjoint::matrix::{trace_form, CMat};
use coadjoint::orbits::{good_range_check, integrality_check, OrbitalParameter};
use coadjoint::polarize::{construct_maximally_real, criterion, enumerate_polarizations, Polarization};
use coadjoint::quadrature::{gauss_hermite, tensor};
use coadjoint::realforms::{catalog, GroupCatalogEntry, GroupLabel};
use coadjoint::rootdata::{GaussQ, Weight};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn q(s: &str) -> GaussQ {
    s.parse().unwrap()
}

fn with_lambda(name: &str, lambda: LambdaSpec) -> ExperimentConfig {
    ExperimentConfig { lambda, ..preset(name).unwrap() }
}

fn run_ok(c: &ExperimentConfig) -> Result<VerificationReport, String> {
    run(c).map_err(|e| e.to_string())
}

fn ac1() -> Result<Outcome, String> {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for name in ["torus-u1", "torus-rx"] {
        let r = run_ok(&preset(name).unwrap())?;
        worst = worst.max(r.max_abs_discrepancy());
        ok &= r.rows.len() == 10 && r.verdict == Verdict::Pass;
    }
    let elapsed = t.elapsed();
    ok &= worst <= 1e-12 && elapsed < Duration::from_secs(1);
    Ok(Outcome { passed: ok, detail: format!("max |Δ| {worst:.2e}, {:.2}s", elapsed.as_secs_f64()) })
}

fn ac2() -> Result<Outcome, String> {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in 2..=5 {
        let r = run_ok(&with_lambda("su2-kirillov", LambdaSpec::SimplePairings(vec![GaussQ::int(n)])))?;
        worst = worst.max(r.max_rel_discrepancy());
        ok &= r.rows.len() == 10 && r.verdict == Verdict::Pass;
    }
    let elapsed = t.elapsed();
    ok &= worst <= 1e-6 && elapsed <= Duration::from_secs(60);
    Ok(Outcome { passed: ok, detail: format!("max rel {worst:.2e}, {:.1}s", elapsed.as_secs_f64()) })
}

fn ac3() -> Result<Outcome, String> {
    let t = Instant::now();
    let r = run_ok(&preset("u2-central").unwrap())?;
    let elapsed = t.elapsed();
    let fiber_is_sphere = r.contours.first().is_some_and(|d| d.real_dim == 2);
    let worst = r.max_rel_discrepancy();
    let ok = r.verdict == Verdict::Pass && worst <= 1e-5 && fiber_is_sphere && elapsed <= Duration::from_secs(120);
    Ok(Outcome { passed: ok, detail: format!("max rel {worst:.2e}, {:.1}s", elapsed.as_secs_f64()) })
}

fn ac4() -> Result<Outcome, String> {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in ["1", "-1", "2", "-2"] {
        let t = Instant::now();
        let r = run_ok(&with_lambda("sl2r-discrete-plus", LambdaSpec::SimplePairings(vec![q(n)])))?;
        let elapsed = t.elapsed();
        let tol = r.config.tolerance;
        let quad_ok = r.rows.iter().all(|row| row.lhs_error < tol / 2.0 * row.rhs.re.hypot(row.rhs.im));
        let worst = r.max_rel_discrepancy();
        ok &= r.verdict == Verdict::Pass && worst <= 1e-3 && quad_ok && elapsed <= Duration::from_secs(600);
        parts.push(format!("⟨λ,α∨⟩={n}: rel {worst:.1e} {:.1}s", elapsed.as_secs_f64()));
    }
    Ok(Outcome { passed: ok, detail: parts.join("; ") })
}

fn ac5() -> Result<Outcome, String> {
    let mut parts = Vec::new();
    let mut ok = true;
    for nu in ["1i", "2i"] {
        let t = Instant::now();
        let r = run_ok(&with_lambda("sl2r-principal", LambdaSpec::SimplePairings(vec![q(nu)])))?;
        let elapsed = t.elapsed();
        let labels = |l: &str, rr: &str| r.rows.iter().filter(|x| x.lhs_label == l && x.rhs_label == rr).count();
        // direct vs θ, factored vs θ and direct vs factored
        let complete = labels("<F[C],μ>", "<θ,μ>") == 10 && labels("<F[C~],μ>", "<θ,μ>") == 10 && labels("<F[C~],μ>", "<F[C],μ>") == 10;
        let worst = r.max_rel_discrepancy();
        ok &= complete && r.verdict == Verdict::Pass && worst <= 1e-3 && elapsed <= Duration::from_secs(600);
        parts.push(format!("ν={}: rel {worst:.1e} {:.1}s", nu.trim_end_matches('i'), elapsed.as_secs_f64()));
    }
    Ok(Outcome { passed: ok, detail: parts.join("; ") })
}

fn ac6() -> Result<Outcome, String> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, tol) in [("su2-sigma-c", 1e-6), ("sl2r-sigma-c", 1e-3)] {
        let r = run_ok(&preset(name).unwrap())?;
        let within = r.rows.iter().all(|x| x.abs_discrepancy <= tol * x.rhs.re.hypot(x.rhs.im) + x.lhs_error + x.rhs_error);
        ok &= within && r.verdict == Verdict::Pass && r.config.tolerance == tol;
        parts.push(format!("{name}: max |Δ| {:.1e}", r.max_abs_discrepancy()));
    }
    Ok(Outcome { passed: ok, detail: parts.join("; ") })
}

fn try_param(e: &GroupCatalogEntry, cartan: &str, pairings: &[&str]) -> Option<OrbitalParameter> {
    let v: Vec<GaussQ> = pairings.iter().map(|s| q(s)).collect();
    let lam = e.root_datum.weight_with_simple_pairings(&v).ok()?;
    OrbitalParameter::new(e, e.cartan_index(cartan)?, lam).ok()
}

fn param(e: &GroupCatalogEntry, cartan: &str, pairings: &[&str]) -> OrbitalParameter {
    try_param(e, cartan, pairings).unwrap_or_else(|| panic!("{} {cartan} {pairings:?}", e.label))
}

fn rank(vs: &[CMat]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let n = vs[0].len();
    let m = nalgebra::DMatrix::from_fn(n, vs.len(), |r, k| vs[k][r]);
    m.svd(false, false).singular_values.iter().filter(|s| **s > 1e-9).count()
}

/// dim(σ(q) ∩ q) from the matrix model: 2 dim q − dim(q + σ(q)).
fn sigma_dim(e: &GroupCatalogEntry, p: &OrbitalParameter, pol: &Polarization) -> usize {
    let h = p.cartan_data(e);
    let mut qv: Vec<CMat> = h.coweights.clone();
    qv.extend(pol.levi_roots.iter().chain(&pol.nilradical_roots).map(|&a| h.root_vectors[a].clone()));
    let both: Vec<CMat> = qv.iter().cloned().chain(qv.iter().map(|x| e.sigma.apply(x))).collect();
    2 * qv.len() - rank(&both)
}

fn ac7() -> Result<Outcome, String> {
    let mut failures = Vec::new();

    // maximal reality: criterion ⇔ σ-intersection dimension is maximal among admissible polarizations
    let su2 = catalog(GroupLabel::Su2).unwrap();
    let sl2r = catalog(GroupLabel::Sl2R).unwrap();
    let su3 = catalog(GroupLabel::Su3).unwrap();
    let u2 = catalog(GroupLabel::U2).unwrap();
    let sl2c = catalog(GroupLabel::Sl2CAsReal).unwrap();
    let mut params: Vec<(&GroupCatalogEntry, OrbitalParameter)> = vec![
        (&su2, param(&su2, "compact", &["3"])),
        (&sl2r, param(&sl2r, "compact", &["2"])),
        (&sl2r, param(&sl2r, "split", &["2i"])),
        (&sl2r, param(&sl2r, "split", &["1/2i"])),
        (&su3, param(&su3, "compact", &["1", "2"])),
        (&su3, param(&su3, "compact", &["0", "5/2"])),
        (&u2, OrbitalParameter::new(&u2, 0, Weight::from_ints(&[2, 0])).unwrap()),
        (&u2, OrbitalParameter::new(&u2, 0, Weight::from_ints(&[1, 1])).unwrap()),
    ];
    // imaginary on the fundamental Cartan of sl2C exactly when the second pairing is −conj of the first
    for pairings in [["1+1i", "-1+1i"], ["1i", "1i"], ["1", "-1"], ["2i", "2i"]] {
        params.push((&sl2c, param(&sl2c, "fundamental", &pairings)));
    }
    let mut compared = 0;
    for (e, p) in &params {
        let all = enumerate_polarizations(e, p);
        let admissible: Vec<&Polarization> = all.iter().filter(|x| x.flags.admissible).collect();
        let best = admissible.iter().map(|x| sigma_dim(e, p, x)).max().unwrap_or(0);
        for x in admissible {
            compared += 1;
            let by_dim = sigma_dim(e, p, x) == best;
            if by_dim != criterion(e, p, &x.nilradical_roots) || by_dim != x.flags.maximally_real {
                failures.push(format!("maximal reality on {} {:?}", e.label, x.nilradical_roots));
            }
        }
    }

    // good range and integrality against hand-checked fixtures
    let fixtures: [(&GroupCatalogEntry, &str, &[&str], bool, bool); 9] = [
        (&su2, "compact", &["3"], true, true),
        (&su2, "compact", &["-2"], true, true),
        (&su3, "compact", &["0", "1/2"], false, true),
        (&su2, "compact", &["3/2"], true, false),
        (&sl2r, "compact", &["1"], true, true),
        (&sl2r, "compact", &["1/2"], true, false),
        (&su3, "compact", &["0", "5/2"], true, true),
        (&su3, "compact", &["0", "3"], true, false),
        (&su3, "compact", &["1", "1"], true, true),
    ];
    for (e, cartan, pairings, good, integral) in fixtures {
        let mut p = param(e, cartan, pairings);
        let pol = construct_maximally_real(e, &p).map_err(|x| x.to_string())?;
        if good_range_check(e, &p, &pol).verdict != good || integrality_check(e, &mut p, &pol) != integral {
            failures.push(format!("fixture {} {pairings:?}", e.label));
        }
    }

    // coherence: catalog families pass, corrupted controls fail
    for name in ["su2-coherence", "sl2r-coherence"] {
        let r = run_ok(&preset(name).unwrap())?;
        if r.verdict != Verdict::Pass {
            failures.push(format!("{name}: {:?}", r.checks));
        }
    }

    // Pf² = det on random skew matrices
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut pf_worst: f64 = 0.0;
    for half in 1..=5 {
        for _ in 0..20 {
            let n = 2 * half;
            let mut a = CMat::zeros(n, n);
            for i in 0..n {
                for j in i + 1..n {
                    let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    a[(i, j)] = v;
                    a[(j, i)] = -v;
                }
            }
            let (p, d) = (pfaffian(&a), a.determinant());
            pf_worst = pf_worst.max((p * p - d).norm() / d.norm().max(1e-300));
        }
    }
    if pf_worst > 1e-8 {
        failures.push(format!("Pf² vs det {pf_worst:.1e}"));
    }

    // closed-form Gaussian Fourier transform against a Gauss–Hermite oracle
    let grid = tensor(&vec![gauss_hermite(40); 3]);
    let mut ft_worst: f64 = 0.0;
    for mu in GaussianDensity::suite(3, 5, 3, 1.0, (0.4, 0.9)) {
        let xi = su2.from_complex_coords(&[Complex64::new(0.4, 0.7), Complex64::new(-0.2, 0.3), Complex64::new(0.5, -0.6)]);
        let closed = mu.fourier(&su2, &xi);
        let numeric: Complex64 = grid
            .iter()
            .map(|(y, w)| {
                let x: Vec<f64> = y.iter().zip(&mu.center).map(|(t, c)| c + std::f64::consts::SQRT_2 * mu.width * t).collect();
                trace_form(&xi, &su2.from_coords(&x)).exp() * *w
            })
            .sum::<Complex64>()
            / std::f64::consts::PI.powf(1.5);
        ft_worst = ft_worst.max((closed - numeric).norm() / closed.norm());
    }
    if ft_worst > 1e-8 {
        failures.push(format!("Gaussian FT {ft_worst:.1e}"));
    }

    // √−1 convention swap
    let mut swap_worst: f64 = 0.0;
    for (e, cartan, pairings) in [(&su2, "compact", &["3"][..]), (&sl2r, "compact", &["2"][..])] {
        let p = param(e, cartan, pairings);
        let pol = construct_maximally_real(e, &p).map_err(|x| x.to_string())?;
        let c = build_contour(e, &p, &pol, &SigmaCChoice::Default).map_err(|x| x.to_string())?;
        let mus = GaussianDensity::suite(3, 3, 5, 1.0, (0.5, 1.0));
        let quad = ContourQuadrature { order: 16, ..Default::default() };
        let a = fourier_transform_suite(e, &c, &mus, &quad).map_err(|x| x.to_string())?;
        let b = fourier_transform_suite(e, &c, &mus, &ContourQuadrature { imaginary_unit: ImaginaryUnit::Minus, ..quad }).map_err(|x| x.to_string())?;
        for (x, y) in a.iter().zip(&b) {
            swap_worst = swap_worst.max((x.estimate.value - y.estimate.value).norm() / x.estimate.value.norm());
        }
    }
    if swap_worst > 1e-13 {
        failures.push(format!("√−1 swap {swap_worst:.1e}"));
    }

    let detail = format!("{compared} polarizations, Pf {pf_worst:.0e}, FT {ft_worst:.0e}, swap {swap_worst:.0e}");
    Ok(Outcome { passed: failures.is_empty(), detail: if failures.is_empty() { detail } else { format!("{detail}; failed: {}", failures.join(", ")) } })
}

fn ac8() -> Result<Outcome, String> {
    let t = Instant::now();
    let c = preset("su3-levi").unwrap();
    let r = run_ok(&c)?;
    let elapsed = t.elapsed();
    let worst = r.max_rel_discrepancy();
    let ok = c.quadrature.mc_samples >= 10_000_000 && worst <= 5e-2 && r.verdict == Verdict::Pass && elapsed <= Duration::from_secs(3600);
    Ok(Outcome { passed: ok, detail: format!("max rel {worst:.2e}, {:.0}s", elapsed.as_secs_f64()) })
}

fn main() -> ExitCode {
    let skip_stretch = std::env::var_os("COADJOINT_SKIP_AC8").is_some();
    let criteria: [(&str, fn() -> Result<Outcome, String>, bool); 8] = [
        ("AC1 torus exactness", ac1, true),
        ("AC2 Kirillov on su2", ac2, true),
        ("AC3 u2 central fiber", ac3, true),
        ("AC4 sl2R discrete series", ac4, true),
        ("AC5 sl2R principal series", ac5, true),
        ("AC6 σc independence", ac6, true),
        ("AC7 property suites", ac7, true),
        ("AC8 su3 Levi u(2), stretch", ac8, false),
    ];
    let mut failed = false;
    for (name, f, required) in criteria {
        if !required && skip_stretch {
            println!("SKIP {name}");
            continue;
        }
        let (passed, detail) = match f() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
        failed |= required && !passed;
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
