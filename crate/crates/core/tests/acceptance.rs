//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//!     cargo test -p pointer-lab --test acceptance

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pointer_lab::compton::{self, ComptonConfig};
use pointer_lab::mirror::{self, MirrorExperimentConfig};
use pointer_lab::packets::{self, GaussianPacket};
use pointer_lab::qcore::{self, Branch, TwoBranchState};
use pointer_lab::ssb::{self, Regime};
use pointer_lab::Constants;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn compton_formula() -> Outcome {
    let si = Constants::SI;
    let back = compton::compton_shift(4.8e-12, PI, &si).map_err(|e| e.to_string())?;
    let side = compton::compton_shift(4.8e-12, PI / 2.0, &si).map_err(|e| e.to_string())?;
    ensure(rel(back, 4.8e-12) <= 1e-6, format!("shift(pi) = {back:e}"))?;
    ensure(rel(side, 2.4e-12) <= 1e-6, format!("shift(pi/2) = {side:e}"))?;
    Ok(format!("shift(pi) = {back:e} m, shift(pi/2) = {side:e} m"))
}

fn parameter_solver() -> Outcome {
    let si = Constants::SI;
    let max = compton::solve_max_parameters(0.01, &si).map_err(|e| e.to_string())?;
    ensure(max.lambda_max == 4.8e-12, format!("lambda_max = {:e}", max.lambda_max))?;
    let shift = compton::compton_shift(max.lambda_max, max.phi_max, &si).map_err(|e| e.to_string())?;
    let err = rel(shift, 0.01 * max.lambda_max);
    ensure(err <= 1e-12, format!("round trip off by {err:e}"))?;
    Ok(format!(
        "lambda_max = {:e} m, phi_max = {:.6} rad ({:.3} deg), round trip {err:.1e}",
        max.lambda_max,
        max.phi_max,
        max.phi_max.to_degrees()
    ))
}

/// ρ_S = Tr_P |ψ⟩⟨ψ| for ψ = c1|0⟩|g1⟩ + c2|1⟩|g2⟩ written out in C²⊗C², with
/// the pointers g1 = (1, 0), g2 = (z, √(1-|z|²)) so that ⟨g1|g2⟩ = z.
fn partial_trace_oracle(c1: Complex64, c2: Complex64, z: Complex64) -> [[Complex64; 2]; 2] {
    let g1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let g2 = [z, Complex64::new((1.0 - z.norm_sqr()).max(0.0).sqrt(), 0.0)];
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    for k in 0..2 {
        psi[k] = c1 * g1[k];
        psi[2 + k] = c2 * g2[k];
    }
    let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    let mut full = [[Complex64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            full[i][j] = psi[i] * psi[j].conj() / norm;
        }
    }
    let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in rho.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..2).map(|k| full[2 * i + k][2 * j + k]).sum();
        }
    }
    rho
}

fn reduced_state_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = GaussianPacket::new(0.0, 0.0, 1.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for draw in 0..1000 {
        let c1 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let c2 = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let z = Complex64::from_polar(rng.random_range(0.0..=1.0f64), rng.random_range(0.0..2.0 * PI));
        let state = TwoBranchState::new(Branch::new(c1, "one", g), Branch::new(c2, "two", g))
            .map_err(|e| format!("draw {draw}: {e}"))?;
        let rho = qcore::reduce_pointer(&state, z).map_err(|e| format!("draw {draw}: {e}"))?;
        let oracle = partial_trace_oracle(c1, c2, z);
        let ours = [
            [Complex64::new(rho.rho11(), 0.0), rho.rho12()],
            [rho.rho12().conj(), Complex64::new(rho.rho22(), 0.0)],
        ];
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((ours[i][j] - oracle[i][j]).norm());
            }
        }
        let trace = rho.rho11() + rho.rho22();
        let det = rho.rho11() * rho.rho22() - rho.rho12().norm_sqr();
        ensure((trace - 1.0).abs() <= 1e-9, format!("draw {draw}: trace {trace}"))?;
        ensure(
            (oracle[0][1] - oracle[1][0].conj()).norm() <= 1e-12,
            format!("draw {draw}: oracle not Hermitian"),
        )?;
        ensure(
            rho.rho11() >= 0.0 && rho.rho22() >= 0.0 && det >= -1e-12,
            format!("draw {draw}: not PSD (det {det:e})"),
        )?;
    }
    ensure(worst <= 1e-9, format!("max elementwise deviation {worst:e}"))?;
    Ok(format!("1000 draws, max deviation from 4x4 partial trace {worst:.1e}"))
}

fn born_statistics() -> Outcome {
    let nat = Constants::natural();
    let g1 = GaussianPacket::new(0.0, 0.0, 1.0, 1.0).unwrap();
    let g2 = GaussianPacket::new(8.0, 0.0, 1.0, 1.0).unwrap();
    let mut report = Vec::new();
    for (p1, lo, hi) in [(0.5, 0.495, 0.505), (0.3, 0.3 - 0.0044, 0.3 + 0.0044)] {
        let state = TwoBranchState::new(
            Branch::new(Complex64::new(f64::sqrt(p1), 0.0), "one", g1),
            Branch::new(Complex64::new(f64::sqrt(1.0 - p1), 0.0), "two", g2),
        )
        .map_err(|e| e.to_string())?;
        let stats = ssb::run_ensemble(&state, 100_000, 1.0, 42, &nat).map_err(|e| e.to_string())?;
        ensure(stats.regime == Regime::Broken, format!("p1 = {p1}: regime {}", stats.regime))?;
        let f = stats.fraction1.ok_or("no collapse recorded")?;
        ensure((lo..=hi).contains(&f), format!("p1 = {p1}: fraction1 {f} outside [{lo}, {hi}]"))?;
        report.push(format!("p1 = {p1}: fraction1 = {f}"));
    }
    Ok(format!("N = 1e5, seed 42; {}", report.join("; ")))
}

/// Trapezoid-rule ⟨x⟩ and Δx of c1 ψ1 + c2 ψ2 built from the textbook
/// Gaussian packet (2πσ²)^(-1/4) exp(-(x-x₀)²/4σ² + ip₀(x-x₀)) with ħ = 1.
fn quadrature_moments(c1: Complex64, a: (f64, f64, f64), c2: Complex64, b: (f64, f64, f64)) -> (f64, f64) {
    let psi = |(x0, p0, s): (f64, f64, f64), x: f64| {
        let d = x - x0;
        Complex64::from_polar((2.0 * PI * s * s).powf(-0.25) * (-d * d / (4.0 * s * s)).exp(), p0 * d)
    };
    let lo = a.0.min(b.0) - 14.0 * a.2.max(b.2);
    let hi = a.0.max(b.0) + 14.0 * a.2.max(b.2);
    let n = ((hi - lo) / (a.2.min(b.2) / 40.0)).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for i in 0..=n {
        let x = lo + h * i as f64;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        let d = (c1 * psi(a, x) + c2 * psi(b, x)).norm_sqr() * w;
        m0 += d;
        m1 += d * x;
        m2 += d * x * x;
    }
    let mean = m1 / m0;
    (mean, (m2 / m0 - mean * mean).sqrt())
}

fn gaussian_moments() -> Outcome {
    let nat = Constants::natural();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for draw in 0..1000 {
        let pa = (rng.random_range(0.5..6.0), rng.random_range(-2.0..2.0), rng.random_range(0.3..1.5));
        let pb = (rng.random_range(0.5..6.0), rng.random_range(-2.0..2.0), rng.random_range(0.3..1.5));
        let c1 = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..2.0 * PI));
        let c2 = Complex64::from_polar(rng.random_range(0.2..1.0), rng.random_range(0.0..2.0 * PI));
        let g1 = GaussianPacket::new(pa.0, pa.1, pa.2, 1.0).unwrap();
        let g2 = GaussianPacket::new(pb.0, pb.1, pb.2, 1.0).unwrap();
        let m = packets::superposition_moments(c1, &g1, c2, &g2, &nat).map_err(|e| format!("draw {draw}: {e}"))?;
        let (mean, std) = quadrature_moments(c1, pa, c2, pb);
        let err = rel(m.mean_x, mean).max(rel(m.std_x, std)).max(rel(m.stability_ratio, mean.abs() / std));
        ensure(err <= 1e-8, format!("draw {draw}: relative deviation {err:e}"))?;
        worst = worst.max(err);
    }
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    let far = GaussianPacket::new(2.0, 0.0, 1e-3, 1.0).unwrap();
    let near = GaussianPacket::new(1.0, 0.0, 1e-3, 1.0).unwrap();
    let ratio = packets::superposition_moments(h, &far, h, &near, &nat)
        .map_err(|e| e.to_string())?
        .stability_ratio;
    ensure(rel(ratio, 3.0) <= 0.01, format!("x1 = 2 x2 stability ratio {ratio}"))?;
    Ok(format!(
        "1000 draws, max relative deviation {worst:.1e}; x1 = 2 x2 ratio {ratio:.6}"
    ))
}

fn decoherence_crossover() -> Outcome {
    let si = Constants::SI;
    let lambda = compton::solve_max_parameters(0.01, &si).map_err(|e| e.to_string())?.lambda_max;
    let grid: Vec<f64> = (0..=360).map(|i| PI * i as f64 / 360.0).collect();
    let records = compton::sweep(&ComptonConfig::new(lambda, 0.0), &grid, 2000, 42).map_err(|e| e.to_string())?;
    for w in records.windows(2) {
        ensure(
            w[1].visibility <= w[0].visibility,
            format!("visibility rises at phi = {}", w[1].phi_rad),
        )?;
        ensure(w[1].f_mix >= w[0].f_mix, format!("f_mix falls at phi = {}", w[1].phi_rad))?;
    }
    let mut low = 0;
    let mut high = 0;
    for r in &records {
        if r.ratio <= 0.01 {
            low += 1;
            ensure(r.f_mix == 0.0, format!("f_mix {} at ratio {}", r.f_mix, r.ratio))?;
        }
        if r.ratio >= 0.5 {
            high += 1;
            ensure(r.f_mix == 1.0, format!("f_mix {} at ratio {}", r.f_mix, r.ratio))?;
        }
    }
    ensure(low > 0 && high > 0, "grid misses one of the bands")?;
    Ok(format!(
        "{} angles, {low} at ratio <= 0.01, {high} at ratio >= 0.5, visibility {:.3} -> {:.3e}",
        records.len(),
        records[0].visibility,
        records[records.len() - 1].visibility
    ))
}

fn uncertainty_product() -> Outcome {
    let si = Constants::SI;
    let lambda = compton::solve_max_parameters(0.01, &si).map_err(|e| e.to_string())?.lambda_max;
    let product = compton::uncertainty_product(&ComptonConfig::new(lambda, PI)).map_err(|e| e.to_string())?;
    let in_h = product / si.planck;
    ensure((1.0..=2.0).contains(&in_h), format!("product {in_h} h"))?;
    Ok(format!("dl * dp = {in_h:.6} h"))
}

fn mirror_realism() -> Outcome {
    let si = Constants::SI;
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    let mut points = 0;
    let mut largest: f64 = 0.0;
    for mass in [1e-6, 1e-3, 1.0] {
        for temperature in [4.0, 300.0] {
            let sigma = mirror::thermal_sigma(mass, temperature, &si).map_err(|e| e.to_string())?;
            for wavelength in [1e-12, 1e-9, 5e-7, 1e-5] {
                let p = si.planck / wavelength;
                let cfg = MirrorExperimentConfig {
                    photon_momentum: p,
                    momentum_transfer: 2.0 * p,
                    a: h,
                    b: h,
                    mirror_mass: mass,
                    mirror_sigma_x: sigma,
                    interaction_time: 1e-9,
                    constants: si,
                };
                let grid: Vec<f64> = (0..=20).map(|i| 2.0 * p * i as f64 / 20.0).collect();
                for pt in mirror::regime_scan(&cfg, &grid, 1.0).map_err(|e| e.to_string())? {
                    points += 1;
                    largest = largest.max(pt.dp_kgms * sigma / si.hbar);
                    ensure(
                        pt.regime == Regime::Superposition,
                        format!("m = {mass}, lambda = {wavelength}: {} at dp = {}", pt.regime, pt.dp_kgms),
                    )?;
                }
            }
        }
    }
    Ok(format!("{points} scan points all superposition, largest dp*sigma/hbar {largest:.1e}"))
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pointer-lab"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), format!("{args:?} exited with {}", out.status))?;
    Ok((out.stdout, out.stderr))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("run.conf");
    std::fs::write(
        &config,
        "seed = 42\ncompton.wavelength_m = 4.8e-12\nsweep.phi_start_rad = 0\nsweep.phi_stop_rad = 3.141592653589793\n\
         sweep.phi_steps = 9\nsweep.n_ensemble = 5000\nensemble.trials = 20000\nmirror.dp_grid_kgms = 0, 1e-27, 1e-25\n",
    )
    .map_err(|e| e.to_string())?;
    let config = config.to_str().ok_or("non-UTF-8 temp path")?;
    let mut checked = 0;
    for sub in ["sweep", "compton", "mirror", "ensemble"] {
        for format in ["csv", "jsonl"] {
            let base = ["--config", config, "--format", format];
            let a = run_cli(&[&[sub], &base[..]].concat())?;
            let b = run_cli(&[&[sub], &base[..]].concat())?;
            ensure(a == b, format!("{sub} {format}: stdout differs between runs"))?;
            let files: Vec<_> = ["a", "b"]
                .iter()
                .map(|tag| dir.path().join(format!("{sub}-{format}-{tag}.out")))
                .collect();
            for f in &files {
                run_cli(&[&[sub], &base[..], &["--out", f.to_str().unwrap()]].concat())?;
            }
            let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
            ensure(read(&files[0])? == read(&files[1])?, format!("{sub} {format}: output files differ"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} subcommand/format pairs byte-identical on stdout and --out"))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("compton formula", compton_formula),
        ("parameter solver", parameter_solver),
        ("reduced-state algebra", reduced_state_algebra),
        ("born statistics", born_statistics),
        ("gaussian moment oracle", gaussian_moments),
        ("decoherence crossover", decoherence_crossover),
        ("uncertainty product", uncertainty_product),
        ("mirror regime realism", mirror_realism),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
