use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;

use super::config::{Experiment, ExperimentConfig};
use super::manifest::{describe, Check, OutputFile, StageTime};
use super::table::{f, Table};
use crate::cgo::{cgo_solve, make_probe, Branch};
use crate::dn::{
    assemble_dn, assemble_dn_derivative, dn_gap_norm, smoothing_index, BoundaryGram, MatrixFreeDn,
};
use crate::field::{
    build_grid, export_field, lattice, sample_potential, write_block, BoundaryField, Grid3,
};
use crate::forward::{
    assemble, eigendecompose, loglog_slope, weyl_fit, DiscreteOperator, DENSE_LIMIT,
};
use crate::inverse::{reconstruct, stability_experiment};
use crate::spectral::{
    boundary_spectral_data, large_mu_gap, s_limit_check, series_dn, series_tail, tail_slope,
};
use crate::{LabError, Result};

/// Registry entry for `lab list`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub keys: &'static str,
    pub runtime: &'static str,
    pub summary: &'static str,
}

pub fn list_experiments() -> Vec<ExperimentInfo> {
    Experiment::ALL
        .iter()
        .map(|e| {
            let (keys, runtime, summary) = match e {
                Experiment::Forward => (
                    "n, potential, [forward] modes, weyl",
                    "~20 s at N=16 (full), ~80 s at N=32 (200 modes)",
                    "eigenpairs and Weyl slope",
                ),
                Experiment::Dn => (
                    "n ≤ 24, potential, reference, [dn] lambda",
                    "< 1 s at N=8",
                    "dense DN matrices, gap norm, smoothing index",
                ),
                Experiment::CgoDecay => (
                    "n, potential, [cgo] k, h",
                    "~1 s at N=32",
                    "CGO remainder norms across h",
                ),
                Experiment::Reconstruct => (
                    "n, potential, reference, [reconstruct] radius, rho",
                    "~3 s at N=32",
                    "data-only Fourier reconstruction",
                ),
                Experiment::Stability => (
                    "n ≤ 24, potential, reference, [stability] amplitudes, sigma",
                    "~1 s at N=8",
                    "gap norm vs potential distance",
                ),
                Experiment::BorgLevinson => (
                    "n ≤ 16, potential, [borg_levinson] lambda, orders, mu",
                    "~1 s at N=8, ~30 s at N=16",
                    "spectral series and large-μ decay",
                ),
                Experiment::SLimit => (
                    "n, potential, reference, [s_limit] xi, k",
                    "< 1 s at N=32",
                    "scattering functional Fourier limit",
                ),
            };
            ExperimentInfo {
                name: e.name(),
                keys,
                runtime,
                summary,
            }
        })
        .collect()
}

pub(crate) struct Recorder {
    pub dir: PathBuf,
    pub stages: Vec<StageTime>,
    pub outputs: Vec<OutputFile>,
    pub checks: Vec<Check>,
}

impl Recorder {
    pub fn new(dir: &Path) -> Self {
        Recorder {
            dir: dir.to_path_buf(),
            stages: Vec::new(),
            outputs: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn stage<T>(&mut self, name: &str, body: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let r = body(self).map_err(|e| match e {
            e @ LabError::Stage { .. } => e,
            e => e.in_stage(name),
        });
        self.stages.push(StageTime {
            stage: name.to_string(),
            seconds: t.elapsed().as_secs_f64(),
        });
        r
    }

    fn table(&mut self, name: &str, t: &Table) -> Result<()> {
        t.write(&self.dir.join(name))?;
        self.outputs.push(describe(&self.dir, name)?);
        Ok(())
    }

    fn block(&mut self, name: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        write(&self.dir.join(name))?;
        self.outputs.push(describe(&self.dir, name)?);
        let side = Path::new(name).with_extension("json");
        self.outputs
            .push(describe(&self.dir, side.to_str().unwrap())?);
        Ok(())
    }

    fn check(&mut self, name: &str, value: f64, threshold: &str, passed: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            value,
            threshold: threshold.to_string(),
            passed,
        });
    }
}

fn operator(
    spec: &crate::field::PotentialSpec,
    grid: &Arc<Grid3>,
) -> Result<Arc<DiscreteOperator>> {
    let v = sample_potential(spec, grid)?;
    Ok(Arc::new(assemble(&v, grid)?))
}

fn random_boundary(grid: &Arc<Grid3>, rng: &mut ChaCha8Rng) -> BoundaryField {
    BoundaryField::from_fn(grid, |_| C64::new(StandardNormal.sample(rng), 0.0))
}

fn strictly_decreasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[1] < w[0])
}

pub(crate) fn execute(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let grid = rec.stage("grid", |_| build_grid(cfg.n))?;
    match cfg.experiment {
        Experiment::Forward => forward(cfg, &grid, rec),
        Experiment::Dn => dn(cfg, &grid, rec),
        Experiment::CgoDecay => cgo_decay(cfg, &grid, rec),
        Experiment::Reconstruct => reconstruction(cfg, &grid, rec),
        Experiment::Stability => stability(cfg, rec),
        Experiment::BorgLevinson => borg_levinson(cfg, &grid, rec),
        Experiment::SLimit => s_limit(cfg, &grid, rec),
    }
}

fn forward(cfg: &ExperimentConfig, grid: &Arc<Grid3>, rec: &mut Recorder) -> Result<()> {
    let op = rec.stage("assemble", |_| operator(&cfg.potential, grid))?;
    let params = cfg.forward.clone();
    let ni = grid.interior_count();
    let m = params
        .as_ref()
        .and_then(|p| p.modes)
        .unwrap_or(if ni <= DENSE_LIMIT { ni } else { 200 })
        .min(ni);
    let spec = rec.stage("eigen", |_| eigendecompose(&op, m))?;
    rec.stage("write", |rec| {
        let mut t = Table::new(&["k", "lambda"]);
        for (k, l) in spec.eigenvalues().iter().enumerate() {
            t.push(vec![(k + 1).to_string(), f(*l)]);
        }
        rec.table("spectral.csv", &t)?;
        let shown = spec.len().min(4);
        let mut vals = Vec::with_capacity(shown * grid.node_count());
        for k in 0..shown {
            vals.extend_from_slice(spec.field(k).values());
        }
        rec.block("eigenfields.bin", |p| {
            write_block(p, &vals, json!({ "n": grid.n(), "fields": shown, "eigenvalues": &spec.eigenvalues()[..shown] }))
        })
    })?;
    let res = spec.max_residual(&op);
    rec.check("eigen residual", res, "<= 1e-8", res <= 1e-8);
    if let Some([lo, hi]) = params.and_then(|p| p.weyl) {
        let s = weyl_fit(&spec, lo, hi)?;
        rec.check("weyl slope", s, "2/3 ± 0.15", (s - 2.0 / 3.0).abs() <= 0.15);
    }
    Ok(())
}

fn dn(cfg: &ExperimentConfig, grid: &Arc<Grid3>, rec: &mut Recorder) -> Result<()> {
    let l = cfg.dn.as_ref().map_or([0.0, 0.0], |d| d.lambda);
    let lam = C64::new(l[0], l[1]);
    let a = rec.stage("assemble", |_| operator(&cfg.potential, grid))?;
    let b = rec.stage("assemble reference", |_| operator(&cfg.reference, grid))?;
    let da = rec.stage("dn", |_| assemble_dn(&a, lam))?;
    let db = rec.stage("dn reference", |_| assemble_dn(&b, lam))?;
    let aleph = rec.stage("gap", |_| dn_gap_norm(&da, &db))?;
    let smooth = rec.stage("smoothing", |_| smoothing_index(&da, &db))?;
    rec.stage("write", |rec| {
        let nb = grid.boundary_count();
        let m = da.matrix();
        let vals: Vec<C64> = (0..nb).flat_map(|i| (0..nb).map(move |j| m[(i, j)])).collect();
        let gram = BoundaryGram::of(grid)?;
        let gsum: f64 = (0..nb).map(|i| gram.gram()[(i, i)]).sum();
        rec.block("dn.bin", |p| {
            write_block(
                p,
                &vals,
                json!({ "n": grid.n(), "lambda": [lam.re, lam.im], "rows": nb, "layout": "row-major",
                        "potential": da.fingerprint(), "gram_trace": format!("{gsum:e}") }),
            )
        })?;
        let mut t = Table::new(&["quantity", "value"]);
        t.push(vec!["symmetry_defect".into(), f(da.symmetry_defect())]);
        t.push(vec!["gap_norm".into(), f(aleph)]);
        t.push(vec!["exponent_single".into(), f(smooth.exponent_single)]);
        t.push(vec!["exponent_difference".into(), f(smooth.exponent_difference)]);
        t.push(vec!["smoothing_gap".into(), f(smooth.gap)]);
        rec.table("dn.csv", &t)
    })?;
    if lam.im == 0.0 {
        let d = da.symmetry_defect();
        rec.check("symmetry defect", d, "<= 1e-10", d <= 1e-10);
    }
    Ok(())
}

fn cgo_decay(cfg: &ExperimentConfig, grid: &Arc<Grid3>, rec: &mut Recorder) -> Result<()> {
    let p = cfg
        .cgo
        .clone()
        .ok_or_else(|| LabError::Config("missing [cgo]".into()))?;
    let op = rec.stage("assemble", |_| operator(&cfg.potential, grid))?;
    let k2: f64 = p.k.iter().map(|x| x * x).sum();
    let mut t = Table::new(&[
        "k1",
        "k2",
        "k3",
        "rho",
        "h",
        "v_l2",
        "v_h1_scl",
        "residual",
        "iterations",
    ]);
    let (mut hs, mut vs) = (Vec::new(), Vec::new());
    let mut worst: f64 = 0.0;
    for &h in &p.h {
        let rho = (1.0 / (h * h) - k2 / 4.0).sqrt();
        let sol = rec.stage(&format!("cgo h={h}"), |_| {
            cgo_solve(&op, &make_probe(p.k, rho)?, Branch::FORWARD)
        })?;
        t.push(vec![
            f(p.k[0]),
            f(p.k[1]),
            f(p.k[2]),
            f(rho),
            f(sol.probe.h),
            f(sol.v_l2),
            f(sol.v_h1_scl),
            f(sol.residual),
            sol.iterations.to_string(),
        ]);
        hs.push(sol.probe.h);
        vs.push(sol.v_l2);
        worst = worst.max(sol.residual);
    }
    rec.stage("write", |rec| rec.table("cgo.csv", &t))?;
    rec.check("interior residual", worst, "<= 1e-8", worst <= 1e-8);
    if hs.len() >= 3 && vs.iter().all(|&v| v > 0.0) {
        let s = loglog_slope(&hs, &vs);
        rec.check("remainder slope", s, "[0.7, 1.3]", (0.7..=1.3).contains(&s));
    }
    Ok(())
}

fn reconstruction(cfg: &ExperimentConfig, grid: &Arc<Grid3>, rec: &mut Recorder) -> Result<()> {
    let p = cfg
        .reconstruct
        .clone()
        .ok_or_else(|| LabError::Config("missing [reconstruct]".into()))?;
    let a = rec.stage("assemble", |_| operator(&cfg.potential, grid))?;
    let b = rec.stage("assemble reference", |_| operator(&cfg.reference, grid))?;
    let zero = C64::new(0.0, 0.0);
    let da = MatrixFreeDn::new(a, zero)?;
    let db = MatrixFreeDn::new(b, zero)?;
    let ks = lattice(p.radius);
    let r = rec.stage("reconstruct", |_| reconstruct(&da, &db, p.rho, &ks))?;
    let err = r.band_error()?;
    rec.stage("write", |rec| {
        let mut t = Table::new(&[
            "k1", "k2", "k3", "re_est", "im_est", "re_true", "im_true", "rho", "h",
        ]);
        for e in &r.modes {
            t.push(vec![
                f(e.k[0]),
                f(e.k[1]),
                f(e.k[2]),
                f(e.estimate.re),
                f(e.estimate.im),
                f(e.truth.re),
                f(e.truth.im),
                f(e.rho),
                f(e.h),
            ]);
        }
        rec.table("modes.csv", &t)?;
        rec.block("reconstruction.bin", |path| {
            export_field(
                &r.field,
                path,
                json!({ "radius": p.radius, "modes": ks.len() }),
            )
        })
    })?;
    rec.check(
        "band-limited error",
        err,
        &format!("<= {}", p.max_error),
        err <= p.max_error,
    );
    Ok(())
}

fn stability(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = cfg
        .stability
        .clone()
        .ok_or_else(|| LabError::Config("missing [stability]".into()))?;
    let pairs: Vec<_> = p
        .amplitudes
        .iter()
        .map(|&c| (cfg.reference.clone(), cfg.potential.scaled(c)))
        .collect();
    let reports = rec.stage("stability", |_| {
        stability_experiment(&pairs, p.sigma, cfg.n)
    })?;
    rec.stage("write", |rec| {
        let mut t = Table::new(&[
            "pair",
            "amplitude",
            "fingerprint_a",
            "fingerprint_b",
            "aleph",
            "l2_difference",
            "beta",
            "cutoff",
            "psi",
            "c_fit",
        ]);
        for (i, (r, c)) in reports.iter().zip(&p.amplitudes).enumerate() {
            t.push(vec![
                i.to_string(),
                f(*c),
                r.fingerprints.0.clone(),
                r.fingerprints.1.clone(),
                f(r.aleph),
                f(r.l2_difference),
                f(r.beta),
                r.cutoff.map_or(String::new(), f),
                f(r.psi),
                f(r.c_fit),
            ]);
        }
        rec.table("stability.csv", &t)
    })?;
    let ok = reports.iter().all(|r| r.satisfied());
    rec.check(
        "fitted-C inequality",
        reports.first().map_or(0.0, |r| r.c_fit),
        "all pairs",
        ok,
    );
    let alephs: Vec<f64> = reports.iter().map(|r| r.aleph).collect();
    let inc = alephs.windows(2).all(|w| w[1] > w[0]);
    rec.check(
        "gap increasing along family",
        alephs.len() as f64,
        "strict",
        inc,
    );
    Ok(())
}

fn borg_levinson(cfg: &ExperimentConfig, grid: &Arc<Grid3>, rec: &mut Recorder) -> Result<()> {
    let p = cfg
        .borg_levinson
        .clone()
        .ok_or_else(|| LabError::Config("missing [borg_levinson]".into()))?;
    let op = rec.stage("assemble", |_| operator(&cfg.potential, grid))?;
    let spec = rec.stage("eigen", |_| eigendecompose(&op, grid.interior_count()))?;
    let bsd = rec.stage("boundary spectral data", |_| {
        boundary_spectral_data(&spec, &op)
    })?;
    let growth = bsd.growth_exponent();
    rec.stage("write spectral", |rec| {
        let mut t = Table::new(&["k", "lambda", "psi_norm"]);
        for (k, (l, n)) in bsd.eigenvalues().iter().zip(bsd.norms()).enumerate() {
            t.push(vec![(k + 1).to_string(), f(*l), f(*n)]);
        }
        rec.table("spectral.csv", &t)
    })?;
    rec.check("trace growth exponent", growth, "<= 1.1", growth <= 1.1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lam = C64::new(p.lambda, 0.0);
    let mut t = Table::new(&["m", "lambda", "sample", "residual"]);
    let mut worst: f64 = 0.0;
    for &m in &p.orders {
        let oracle = rec.stage(&format!("dense derivative m={m}"), |_| {
            assemble_dn_derivative(&op, lam, m)
        })?;
        for s in 0..p.samples {
            let fb = random_boundary(grid, &mut rng);
            let series = series_dn(&op, &bsd, p.lambda, m, &fb)?;
            let nb = grid.boundary_count();
            let direct: Vec<C64> = (0..nb)
                .map(|i| (0..nb).map(|j| oracle[(i, j)] * fb.values()[j]).sum())
                .collect();
            let direct = BoundaryField::new(grid, direct)?;
            let r = series.sub(&direct)?.l2() / direct.l2().max(f64::MIN_POSITIVE);
            worst = worst.max(r);
            t.push(vec![m.to_string(), f(p.lambda), s.to_string(), f(r)]);
        }
    }
    rec.stage("write series", |rec| rec.table("series_check.csv", &t))?;
    rec.check("series residual", worst, "<= 1e-8", worst <= 1e-8);

    if let Some(&m) = p.orders.iter().filter(|&&m| m >= 2).max() {
        let cut: Vec<usize> = (0..)
            .map(|i| 20usize << i)
            .take_while(|&k| 2 * k <= bsd.len())
            .collect();
        if cut.len() >= 3 {
            let fb = random_boundary(grid, &mut rng);
            let tail = rec.stage("tail", |_| series_tail(&bsd, p.lambda, m, &fb, &cut))?;
            let s = tail_slope(&tail);
            let target = -2.0 * (m as f64 - 1.0) / 3.0;
            let mut tt = Table::new(&["m", "cutoff", "tail"]);
            for pt in &tail {
                tt.push(vec![m.to_string(), pt.k.to_string(), f(pt.tail)]);
            }
            rec.stage("write tail", |rec| rec.table("series_tail.csv", &tt))?;
            rec.check(
                "tail slope",
                s,
                &format!("{target:.3} ± 0.3"),
                (s - target).abs() <= 0.3,
            );
        }
    }

    if !p.mu.is_empty() {
        let zero = rec.stage("assemble reference", |_| operator(&cfg.reference, grid))?;
        let gaps = rec.stage("large mu", |_| large_mu_gap(&op, &zero, &p.mu))?;
        let mut t = Table::new(&["mu", "gap"]);
        for (mu, g) in &gaps {
            t.push(vec![f(*mu), f(*g)]);
        }
        rec.stage("write mu", |rec| rec.table("mu_gap.csv", &t))?;
        let g: Vec<f64> = gaps.iter().map(|x| x.1).collect();
        rec.check(
            "large-mu gap decreasing",
            g.len() as f64,
            "strict",
            strictly_decreasing(&g),
        );
        if g.len() >= 2 && g.iter().all(|&x| x > 0.0) {
            let mus: Vec<f64> = gaps.iter().map(|x| x.0).collect();
            let e = -loglog_slope(&mus, &g);
            rec.check("large-mu decay exponent", e, ">= 0.15", e >= 0.15);
        }
    }
    Ok(())
}

fn s_limit(cfg: &ExperimentConfig, grid: &Arc<Grid3>, rec: &mut Recorder) -> Result<()> {
    let p = cfg
        .s_limit
        .clone()
        .ok_or_else(|| LabError::Config("missing [s_limit]".into()))?;
    let a = rec.stage("assemble", |_| operator(&cfg.potential, grid))?;
    let b = rec.stage("assemble reference", |_| operator(&cfg.reference, grid))?;
    let pts = rec.stage("s-limit", |_| s_limit_check(&a, &b, p.xi, &p.k))?;
    let target = pts[0].target.norm();
    let rel: Vec<f64> = pts
        .iter()
        .map(|q| q.gap() / target.max(f64::MIN_POSITIVE))
        .collect();
    rec.stage("write", |rec| {
        let mut t = Table::new(&[
            "k",
            "re_difference",
            "im_difference",
            "re_target",
            "im_target",
            "relative_gap",
        ]);
        for (q, r) in pts.iter().zip(&rel) {
            t.push(vec![
                f(q.k),
                f(q.difference.re),
                f(q.difference.im),
                f(q.target.re),
                f(q.target.im),
                f(*r),
            ]);
        }
        rec.table("s_limit.csv", &t)
    })?;
    if target > 0.0 {
        rec.check(
            "s-limit gap decreasing",
            rel.len() as f64,
            "strict",
            strictly_decreasing(&rel),
        );
        let last = *rel.last().unwrap();
        rec.check(
            "s-limit final gap",
            last,
            &format!("<= {}", p.max_gap),
            last <= p.max_gap,
        );
    }
    Ok(())
}
