//! Verification suites behind the command-line tool. Each runner returns a
//! [`SuiteReport`] plus optional CSV side files; construction and usage
//! problems come back as errors.

use nalgebra::DVector;

use crate::clifford::{ComplexStructure, ComplexTag, Construction, CLIFFORD_TOL};
use crate::error::{Error, Result};
use crate::hopf::{self, AlphaStats, HopfContext};
use crate::polyfam::{FamilyDescriptor, FamilyKind, IsoPolynomial};
use crate::report::{Detail, SuiteReport};
use crate::riccati::{self, JacobiSpectrum, RiccatiFamily};
use crate::sampling;
use crate::spherelevel::{self, EPS_FOCAL};
use crate::symmat::{Spectrum, CLUSTER_TOL};

pub const CM_TOL: f64 = 1e-8;
pub const HIDDEN_TOL: f64 = 1e-8;
pub const OMEGA_TOL: f64 = 1e-9;
pub const ALPHA_TOL: f64 = 1e-7;
pub const HOPF_FRAME_TOL: f64 = 1e-7;
pub const PHI_MOMENT_TOL: f64 = 1e-8;
pub const RECURRENCE_TOL: f64 = 1e-4;
pub const RHOBAR_PATH_TOL: f64 = 1e-7;
pub const EXACT_TOL: f64 = 1e-12;
pub const RICCATI_NUMERIC_TOL: f64 = 1e-8;
pub const RICCATI_RECURRENCE_TOL: f64 = 1e-9;
pub const RICCATI_MEAN_TOL: f64 = 1e-10;
pub const PROPAGATION_TOL: f64 = 1e-8;
pub const MOMENT_RECOVERY_TOL: f64 = 1e-6;
/// Witnessed spread of `alpha` on `F = 0` when `Omega_F` reaches `+-128`.
pub const ALPHA_MIN_RANGE: f64 = 3.0;

/// Largest `n` for which curvatures are recovered from power sums.
const MOMENT_RECOVERY_MAX_N: usize = 8;
/// Runge–Kutta steps per unit time in the numeric comparison.
const RK4_STEPS_PER_UNIT: f64 = 20_000.0;
const RICCATI_I_MAX: usize = 6;
const RECURRENCE_K_MAX: usize = 6;
const RECURRENCE_LEVELS: usize = 20;
/// Sample points stay off the focal varieties by this margin in `|F|`.
const REGULAR_BOUND: f64 = 0.9;
/// Separates the stream used for auxiliary samples from the main one.
const AUX_STREAM: u64 = 1 << 32;

#[derive(Clone, Debug)]
pub struct CsvFile {
    /// Appended to the user prefix, e.g. `alpha.csv`.
    pub suffix: &'static str,
    pub content: String,
}

#[derive(Clone, Debug)]
pub struct SuiteOutput {
    pub report: SuiteReport,
    pub csv: Vec<CsvFile>,
}

impl SuiteOutput {
    fn new(report: SuiteReport) -> Self {
        Self { report, csv: Vec::new() }
    }
}

fn describe(report: &mut SuiteReport, d: &FamilyDescriptor) {
    let family = match (d.family, d.construction) {
        (FamilyKind::Cartan, _) => "cartan",
        (FamilyKind::Fkm, Some(Construction::OzekiTakeuchi)) => "ot",
        (FamilyKind::Fkm, _) => "fkm",
    };
    report.param("family", family).param("m", d.m);
    if let Some(r) = d.r {
        report.param("r", r);
    }
}

/// Sphere point scaled to a norm in `[0.5, 2)`, so homogeneity matters.
fn ambient_point(seed: u64, index: u64, dim: usize) -> DVector<f64> {
    let mut rng = sampling::stream(seed, index);
    let x = sampling::sphere_point(&mut rng, dim);
    x * sampling::uniform(&mut rng, 0.5, 2.0)
}

/// First sphere point of the stream `(seed, index)` with `|F| <= REGULAR_BOUND`.
fn regular_sample(p: &IsoPolynomial, seed: u64, index: u64) -> Result<DVector<f64>> {
    let mut rng = sampling::stream(seed, index);
    for _ in 0..10_000 {
        let x = sampling::sphere_point(&mut rng, p.ambient_dim());
        if p.eval(&x)?.abs() <= REGULAR_BOUND {
            return Ok(x);
        }
    }
    Err(Error::Projection(format!("no sphere point with |F| <= {REGULAR_BOUND}")))
}

/// `20` levels evenly spread over `(-0.9, 0.9)`.
pub fn recurrence_levels() -> Vec<f64> {
    let step = 2.0 * spherelevel::T_LIMIT / RECURRENCE_LEVELS as f64;
    (0..RECURRENCE_LEVELS)
        .map(|i| -spherelevel::T_LIMIT + step * (i as f64 + 0.5))
        .collect()
}

/// Cartan–Münzner residuals in `R^(dim)`, transnormal residuals on the sphere.
pub fn cmd_verify_cm(d: &FamilyDescriptor, samples: usize, seed: u64, tol: Option<f64>) -> Result<SuiteOutput> {
    let p = IsoPolynomial::from_descriptor(d)?;
    let tol = tol.unwrap_or(CM_TOL);
    let mut report = SuiteReport::new("verify-cm", seed, samples);
    describe(&mut report, d);
    report.param("tol", tol);

    if let Some(sys) = p.clifford() {
        report.push(Detail::new(
            "clifford-relations",
            sys.verify().max_residual(),
            CLIFFORD_TOL,
            "A_p A_q + A_q A_p = 2 delta_pq I, A_p symmetric",
        ));
    }
    let g = p.g() as i32;
    let (mut grad, mut lap, mut dual) = (0.0f64, 0.0f64, 0.0f64);
    let (mut tb, mut ta) = (0.0f64, 0.0f64);
    let mut on_sphere = 0usize;
    for i in 0..samples as u64 {
        let x = ambient_point(seed, i, p.ambient_dim());
        let r = x.norm();
        let (r1, r2) = p.cm_residuals(&x)?;
        grad = grad.max(r1.abs() / r.powi(2 * g - 2));
        lap = lap.max(r2.abs() / r.powi(g - 2));
        dual = dual.max((p.eval(&x)? - p.eval_monomial(&x)?).abs() / r.powi(g));
        let y = &x / r;
        if p.eval(&y)?.abs() < 1.0 - EPS_FOCAL {
            let (b, a) = spherelevel::transnormal_residuals(&p, &y)?;
            tb = tb.max(b.abs());
            ta = ta.max(a.abs());
            on_sphere += 1;
        }
    }
    report.push(Detail::new("cm-gradient", grad, tol, "|DF|^2 = g^2 |x|^(2g-2)"));
    report.push(Detail::new("cm-laplacian", lap, tol, "tr D^2F = (g^2/2)(m2 - m1) |x|^(g-2)"));
    report.push(Detail::new("closed-vs-monomial", dual, tol, "closed form = monomial expansion"));
    report.push(Detail::new("transnormal-gradient", tb, tol, "|grad f|^2 = g^2 (1 - f^2) on the sphere"));
    report.push(Detail::new(
        "transnormal-laplacian",
        ta,
        tol,
        "Delta f = (g^2/2)(m2 - m1) - g(n + g) f on the sphere",
    ));
    report.stat("sphere_samples", on_sphere as f64);
    Ok(SuiteOutput::new(report))
}

/// `Delta_k F` for Cartan's `m = 1` cubic, `k <= 5`.
fn cartan1_delta(k: usize, f: f64, r: f64) -> Option<f64> {
    Some(match k {
        1 => 0.0,
        2 => -63.0 * r * r,
        3 => -54.0 * f,
        4 => 972.0 * r.powi(4),
        5 => 1944.0 * r * r * f,
        _ => return None,
    })
}

/// Higher-order identities: `Delta_k F = sigma_k(D^2F)` for the
/// Cartan m = 1 cubic, `rho_k(D^2F)` closed forms for `k` in `{2, 3, 4}`.
pub fn cmd_verify_hidden(
    d: &FamilyDescriptor,
    ks: &[usize],
    samples: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<SuiteOutput> {
    let p = IsoPolynomial::from_descriptor(d)?;
    let tol = tol.unwrap_or(HIDDEN_TOL);
    let cartan1 = d.family == FamilyKind::Cartan && d.m == 1;
    for &k in ks {
        if k == 0 || k > p.ambient_dim() {
            return Err(Error::range(
                "k",
                format!("Delta_k needs 1 <= k <= {}, got {k}", p.ambient_dim()),
            ));
        }
        if !(k <= 4 || cartan1 && k <= 5) {
            return Err(Error::Unsupported(format!("no closed identity for k = {k} in this family")));
        }
    }
    let mut report = SuiteReport::new("verify-hidden", seed, samples);
    describe(&mut report, d);
    report.param(
        "k",
        ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","),
    );
    report.param("tol", tol);

    let points: Vec<DVector<f64>> = (0..samples as u64)
        .map(|i| ambient_point(seed, i, p.ambient_dim()))
        .collect();
    let g = p.g() as i32;
    let (m1, m2) = p.multiplicities();
    for &k in ks {
        let degree = k as i32 * (g - 2);
        if cartan1 {
            let mut worst = 0.0f64;
            for x in &points {
                let expected = cartan1_delta(k, p.eval(x)?, x.norm()).expect("k checked above");
                worst = worst.max((p.delta_k(x, k)? - expected).abs() / x.norm().powi(degree));
            }
            let identity = match k {
                1 => "Delta_1 F = 0",
                2 => "Delta_2 F = -63 |x|^2",
                3 => "Delta_3 F = -54 F",
                4 => "Delta_4 F = 972 |x|^4",
                _ => "Delta_5 F = 1944 |x|^2 F",
            };
            report.push(Detail::new(format!("delta-{k}"), worst, tol, identity));
        } else if k == 1 {
            let gf = g as f64;
            let mut worst = 0.0f64;
            for x in &points {
                let expected = gf * gf / 2.0 * (m2 as f64 - m1 as f64) * x.norm().powi(g - 2);
                worst = worst.max((p.delta_k(x, 1)? - expected).abs() / x.norm().powi(degree));
            }
            report.push(Detail::new("delta-1", worst, tol, "Delta_1 F = (g^2/2)(m2 - m1) |x|^(g-2)"));
        }
        if (2..=4).contains(&k) {
            let mut worst = 0.0f64;
            for x in &points {
                worst = worst.max(p.hidden_rho_residual(x, k)?.abs() / x.norm().powi(degree));
            }
            report.push(Detail::new(
                format!("rho-{k}"),
                worst,
                tol,
                format!("tr (D^2F)^{k} as a polynomial in F and |x|"),
            ));
        }
    }
    Ok(SuiteOutput::new(report))
}

/// Samples `alpha` on each level and checks the Hopf-side identities.
pub fn cmd_alpha_scan(
    d: &FamilyDescriptor,
    tag: ComplexTag,
    levels: &[f64],
    samples: usize,
    seed: u64,
) -> Result<SuiteOutput> {
    let p = IsoPolynomial::from_descriptor(d)?;
    let j = ComplexStructure::build(tag, p.ambient_dim())?;
    let ctx = HopfContext::new(p, j)?;
    let p = ctx.poly();
    let mut report = SuiteReport::new("alpha-scan", seed, samples);
    describe(&mut report, d);
    report.param("J", tag_name(tag));
    report.param(
        "levels",
        levels.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
    );

    let constant = p.clifford().is_some_and(|s| s.m() == 1);
    let mut csv = String::from("index,t,alpha,omega,l\n");
    let mut two_paths = 0.0f64;
    for &t in levels {
        let scan = hopf::alpha_scan(&ctx, t, samples, seed)?;
        for s in &scan {
            two_paths = two_paths.max((s.alpha - s.alpha_geometric).abs());
        }
        csv.push_str(hopf::alpha_scan_csv(&scan).split_once('\n').map_or("", |(_, rows)| rows));
        let values: Vec<f64> = scan.iter().map(|s| s.alpha).collect();
        let Some(stats) = AlphaStats::from_values(&values) else {
            continue;
        };
        for (key, v) in [("min", stats.min), ("max", stats.max), ("mean", stats.mean), ("std", stats.std)] {
            report.stat(format!("alpha[{t}].{key}"), v);
        }
        if constant {
            report.push(Detail::new(
                format!("alpha-constant[{t}]"),
                stats.std,
                ALPHA_TOL,
                "std of alpha over the level vanishes for m = 1",
            ));
        }
        if t == 0.0 && hopf::witness_points(p).is_some() {
            report.push(Detail::new(
                "alpha-range[0]",
                (ALPHA_MIN_RANGE - (stats.max - stats.min)).max(0.0),
                0.0,
                "max - min of alpha on F = 0 reaches 3",
            ));
        }
    }
    report.push(Detail::new(
        "alpha-two-paths",
        two_paths,
        ALPHA_TOL,
        "alpha from Omega_F = S(J nu, J nu)",
    ));

    if let Some([z, zc]) = hopf::witness_points(p) {
        report.push(Detail::new(
            "omega-witness-z",
            (hopf::omega_direct(&ctx, &z)? - 128.0).abs(),
            OMEGA_TOL,
            "Omega_F(z) = 128",
        ));
        report.push(Detail::new(
            "omega-witness-z-check",
            (hopf::omega_direct(&ctx, &zc)? + 128.0).abs(),
            OMEGA_TOL,
            "Omega_F(z-check) = -128",
        ));
    }

    let mut omega_closed: Option<f64> = None;
    let (mut frame, mut moments, mut path) = (0.0f64, 0.0f64, 0.0f64);
    let mut gaps = 0usize;
    for i in 0..samples as u64 {
        let x = regular_sample(p, seed, AUX_STREAM + i)?;
        match hopf::omega_closed_form(&ctx, &x) {
            Ok((_, closed)) => {
                let direct = hopf::omega_direct(&ctx, &x)?;
                let r = (closed - direct).abs() / direct.abs().max(1.0);
                omega_closed = Some(omega_closed.unwrap_or(0.0).max(r));
            }
            Err(Error::Unsupported(_)) => {}
            Err(e) => return Err(e),
        }
        let blocks = hopf::hopf_blocks(&ctx, &x)?;
        let r = &blocks.residuals;
        let worst = [r.vertical, r.vertical_diagonal, r.link, r.off_block, r.alpha_entry]
            .into_iter()
            .chain(r.sigma)
            .fold(0.0, f64::max);
        frame = frame.max(worst);
        match hopf::phi_decomposition(&ctx, &x) {
            Ok(dec) => {
                moments = dec.moment_residuals().into_iter().fold(moments, f64::max);
                path = path.max(dec.path_difference);
            }
            Err(Error::SpectralGap { .. }) => gaps += 1,
            Err(e) => return Err(e),
        }
    }
    if let Some(r) = omega_closed {
        report.push(Detail::new("omega-closed-form", r, OMEGA_TOL, "closed-form Omega_F = DF^T J D^2F J DF"));
    }
    report.push(Detail::new(
        "hopf-frame",
        frame,
        HOPF_FRAME_TOL,
        "S(Jx) = -J nu and sigma_1..3 of S against the reduced block",
    ));
    report.push(Detail::new(
        "phi-moments",
        moments,
        PHI_MOMENT_TOL,
        "sum phi^2 = 1, sum lambda phi^2 = 0, sum lambda^2 phi^2 = 1, sum lambda^3 phi^2 = alpha",
    ));
    report.push(Detail::new("phi-two-paths", path, ALPHA_TOL, "eigenvector weights = moment solve"));
    report.stat("spectral_gap_skips", gaps as f64);

    let mut out = SuiteOutput::new(report);
    out.csv.push(CsvFile {
        suffix: "alpha.csv",
        content: csv,
    });
    Ok(out)
}

fn tag_name(tag: ComplexTag) -> &'static str {
    match tag {
        ComplexTag::BlockStandard => "block",
        ComplexTag::RightMultI => "right-i",
        ComplexTag::LeftMultI => "left-i",
        ComplexTag::Custom => "custom",
    }
}

/// Evolves principal curvatures over `[t0, t1]` and checks the recurrences.
/// A time inside the blow-up band aborts the run after writing the
/// trajectory up to that time.
pub fn cmd_riccati(kappas: &[f64], mult: Option<usize>, mu0: &[f64], t0: f64, t1: f64, steps: usize) -> Result<SuiteOutput> {
    let n = mu0.len();
    let jacobi = match kappas.len() {
        1 => JacobiSpectrum::space_form(kappas[0], n)?,
        2 => JacobiSpectrum::rank_one(kappas[0], kappas[1], n, mult.unwrap_or(1))?,
        k if k == n => JacobiSpectrum::general(kappas.to_vec())?,
        k => {
            return Err(Error::range(
                "kappa",
                format!("give 1, 2 or n = {n} values, got {k}"),
            ))
        }
    };
    let fam = RiccatiFamily::new(jacobi, mu0.to_vec())?;
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let mut report = SuiteReport::new("riccati", 0, steps + 1);
    report
        .param("kappa", join(kappas))
        .param("mu0", join(mu0))
        .param("t0", t0)
        .param("t1", t1)
        .param("steps", steps);
    if let Some(m) = mult {
        report.param("mult", m);
    }
    // Unbounded sides are omitted; JSON has no infinity.
    for (key, v) in [("domain.lo", fam.domain.0), ("domain.hi", fam.domain.1)] {
        if v.is_finite() {
            report.stat(key, v);
        }
    }

    let ts = riccati::time_grid(t0, t1, steps);
    let (csv, err) = riccati::trajectory_csv(&fam, &ts, n);
    let mut out = SuiteOutput::new(report);
    out.csv.push(CsvFile {
        suffix: "trajectory.csv",
        content: csv,
    });
    if let Some(e) = err {
        out.report.fail_with(&e);
        return Ok(out);
    }
    let report = &mut out.report;

    let mut numeric = 0.0f64;
    for &t in &ts {
        let rk_steps = (t.abs() * RK4_STEPS_PER_UNIT).ceil() as usize;
        let a = fam.evolve_numeric(t, rk_steps.max(1))?;
        let b = fam.evolve_closed(t)?;
        for (x, y) in a.iter().zip(&b) {
            numeric = numeric.max((x - y).abs() / y.abs().max(1.0));
        }
    }
    report.push(Detail::new(
        "numeric-vs-closed",
        numeric,
        RICCATI_NUMERIC_TOL,
        "RK4 solution of mu' = mu^2 + kappa = closed form",
    ));
    report.push(Detail::new(
        "power-sum-recurrence",
        riccati::check_power_sum_recurrence(&fam, &ts, RICCATI_I_MAX)?,
        RICCATI_RECURRENCE_TOL,
        "Q_(i+1) = Q_i'/i - Gamma_(i-1,1)",
    ));
    report.push(Detail::new(
        "mixed-moment-recurrence",
        riccati::check_mixed_moment_recurrence(&fam, &ts, RICCATI_I_MAX)?,
        RICCATI_RECURRENCE_TOL,
        "Gamma_(i+1,1) = (Gamma_i1' - sum_j tr(S^j R S^(i-1-j) R)) / i",
    ));
    report.push(Detail::new(
        "mean-curvature",
        riccati::check_mean_curvature_riccati(&fam, &ts)?,
        RICCATI_MEAN_TOL,
        "H' = |S|^2 + tr R",
    ));
    if matches!(fam.jacobi.structure, riccati::JacobiStructure::RankOne { .. }) {
        report.push(Detail::new(
            "block-split",
            riccati::check_phi_psi(&fam, &ts, RICCATI_I_MAX)?,
            RICCATI_MEAN_TOL,
            "Phi_i' = i(Phi_(i+1) + kappa_1 Phi_(i-1)), Psi likewise with kappa_2",
        ));
    }
    let mut propagation = 0.0f64;
    let mut q5 = true;
    for &t in &ts {
        let rep = riccati::propagate_power_sums(&fam, t)?;
        propagation = propagation.max(rep.max_discrepancy);
        q5 &= rep.q5_chain.is_some();
    }
    report.push(Detail::new(
        "propagation",
        propagation,
        PROPAGATION_TOL,
        if q5 {
            "Gamma_11, Q_4, Q_5 from Q_1..Q_3 = direct power sums"
        } else {
            "Gamma_11, Q_4 from Q_1..Q_3 = direct power sums"
        },
    ));
    if n <= MOMENT_RECOVERY_MAX_N {
        let mut worst = 0.0f64;
        for &t in &ts {
            let rec = riccati::moment_to_spectrum_evolution(&fam, t)?;
            let direct = Spectrum::new(fam.evolve_closed(t)?);
            worst = worst.max(rec.max_abs_diff(&direct).unwrap_or(f64::INFINITY));
        }
        report.push(Detail::new(
            "moment-recovery",
            worst,
            MOMENT_RECOVERY_TOL,
            "curvatures recovered from Q_1..Q_n = evolved curvatures",
        ));
    }
    Ok(out)
}

/// Shape spectra on one level against the cotangent prediction, plus the
/// power-sum recurrences across levels.
pub fn cmd_spectrum(d: &FamilyDescriptor, level: f64, samples: usize, seed: u64) -> Result<SuiteOutput> {
    let p = IsoPolynomial::from_descriptor(d)?;
    let (g, (m1, m2)) = (p.g(), p.multiplicities());
    let mut report = SuiteReport::new("spectrum", seed, samples);
    describe(&mut report, d);
    report.param("level", level);

    let mut worst = 0.0f64;
    let mut flips = 0usize;
    for i in 0..samples as u64 {
        let x = regular_sample(&p, seed, i)?;
        let y = spherelevel::level_project(&p, &x, level)?.point;
        let frame = spherelevel::frame_at(&p, &y)?;
        let rep = spherelevel::munzner_check(&frame, g, m1, m2)?;
        flips += rep.orientation_flipped as usize;
        worst = worst.max(rep.max_diff.unwrap_or(f64::INFINITY));
    }
    report.push(Detail::new(
        "munzner-spectrum",
        worst,
        CLUSTER_TOL,
        "principal curvatures = cot(tau + (i-1) pi/g), multiplicities m1, m2 alternating",
    ));
    report.stat("orientation_flips", flips as f64);

    let ts = recurrence_levels();
    let q = spherelevel::qk_recurrence_check(g, m1, m2, &ts, RECURRENCE_K_MAX)?;
    report.push(Detail::new(
        "qk-recurrence",
        q.recurrence.max_rel,
        RECURRENCE_TOL,
        "Q_(k+1) = (g/k) sqrt(1-t^2) Q_k' - Q_(k-1)",
    ));
    report.push(Detail::new("q1-closed", q.q1_closed, EXACT_TOL, "Q_1 closed form"));
    report.push(Detail::new("q0", q.q0, EXACT_TOL, "Q_0 = n"));
    let rb = spherelevel::rhobar_recurrence_check(&p, &ts, RECURRENCE_K_MAX)?;
    report.push(Detail::new("rhobar-odd", rb.odd.max_rel, RECURRENCE_TOL, "rhobar recurrence, odd k"));
    report.push(Detail::new("rhobar-even", rb.even.max_rel, RECURRENCE_TOL, "rhobar recurrence, even k"));
    report.push(Detail::new(
        "rhobar-direct",
        rb.path_agreement,
        RHOBAR_PATH_TOL,
        "rhobar_k = tr (D^2F)^k on the level",
    ));
    report.push(Detail::new("rhobar-0", rb.initial_values.0, EXACT_TOL, "rhobar_0 = n + 2"));
    report.push(Detail::new("rhobar-1", rb.initial_values.1, EXACT_TOL, "rhobar_1 = (g^2/2)(m2 - m1)"));

    let mut out = SuiteOutput::new(report);
    out.csv.push(CsvFile {
        suffix: "recurrence.csv",
        content: spherelevel::recurrence_table_csv(g, m1, m2, &ts, RECURRENCE_K_MAX),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fkm(m: usize, r: usize) -> FamilyDescriptor {
        FamilyDescriptor {
            family: FamilyKind::Fkm,
            m,
            r: Some(r),
            construction: None,
        }
    }

    fn cartan(m: usize) -> FamilyDescriptor {
        FamilyDescriptor {
            family: FamilyKind::Cartan,
            m,
            r: None,
            construction: None,
        }
    }

    #[test]
    fn verify_cm_passes() {
        for d in [cartan(1), cartan(2), fkm(2, 4)] {
            let out = cmd_verify_cm(&d, 50, 3, None).unwrap();
            assert!(out.report.pass, "{:?}", out.report);
        }
        let err = cmd_verify_cm(&fkm(2, 3), 10, 3, None).unwrap_err();
        assert!(matches!(err, Error::Construction(ref s) if s.contains("r - m - 1")));
    }

    #[test]
    fn verify_hidden() {
        let out = cmd_verify_hidden(&cartan(1), &[1, 2, 3, 4, 5], 30, 1, None).unwrap();
        assert!(out.report.pass, "{:?}", out.report);
        let out = cmd_verify_hidden(&fkm(2, 4), &[2, 3], 30, 1, None).unwrap();
        assert!(out.report.pass, "{:?}", out.report);
        assert!(matches!(
            cmd_verify_hidden(&cartan(1), &[9], 3, 1, None),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn riccati_blow_up_keeps_partial_csv() {
        let out = cmd_riccati(&[0.0], None, &[1.0, 0.5], 0.0, 2.0, 4).unwrap();
        assert_eq!(out.report.exit_code(), 2);
        assert_eq!(out.csv[0].content.lines().count(), 3);
        let out = cmd_riccati(&[1.0, 4.0], Some(1), &[0.3, -0.2, 0.1, 0.5], -0.3, 0.3, 6).unwrap();
        assert!(out.report.pass, "{:?}", out.report);
    }
}
