use std::path::Path;
use std::str::FromStr;

use serde_json::json;

use crate::diagnostics::Check;
use crate::exactring::{rat, BaseElement, BaseRing};
use crate::poisson::{build_structure, curvature, jacobi_check, PoissonError, PoissonStructure};
use crate::solver::{quantize, solve_r, FedosovConnection, SolverError};
use crate::verifier::{
    agreement_check, all_monomials, associativity_check, first_order_check, jacobi_order2_check,
    unit_check, FaultyStar, FedosovStar, MoyalStar, Sampler, StarProduct, VerifierError,
};
use crate::weyl::{WeylElement, WeylSpace};

use super::config::{JobConfig, ModeName};
use super::report::{is_undetermined, ConnectionSummary, Report, Residual, StarJson, Timer};
use super::CliError;

/// Flags shared by all commands.
#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Overrides `hbar_order`.
    pub order: Option<u32>,
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// `r`, `alpha`, `beta`, `b`, `psi` or `tau:<expr>`.
    pub dump: Vec<String>,
    pub timing: bool,
    /// Adds a non-cocycle perturbation at this ħ order to the star product under test.
    pub inject_fault: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Assoc,
    Identities,
    Moyal,
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "all" => Ok(Suite::All),
            "assoc" => Ok(Suite::Assoc),
            "identities" => Ok(Suite::Identities),
            "moyal" => Ok(Suite::Moyal),
            other => Err(CliError::Parse(format!("unknown suite '{other}'"))),
        }
    }
}

const GUARD_ATTEMPTS: u32 = 3;

impl From<PoissonError> for CliError {
    fn from(e: PoissonError) -> Self {
        match e {
            PoissonError::Identity(c) if is_undetermined(&c) => CliError::Undetermined(c),
            PoissonError::Identity(c) => CliError::Invariant(c),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Identity(c) if is_undetermined(&c) => CliError::Undetermined(c),
            SolverError::Identity(c) => CliError::Invariant(c),
            e @ SolverError::NonContracting { .. } => {
                CliError::Invariant(Check::fail("contraction", e.to_string()))
            }
            e @ SolverError::Truncation { .. } => CliError::Validation(e.to_string()),
        }
    }
}

impl From<VerifierError> for CliError {
    fn from(e: VerifierError) -> Self {
        match e {
            VerifierError::Solver(s) => s.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

struct Job<'a> {
    config: &'a JobConfig,
    opts: &'a Options,
    n_hbar: u32,
    dmax: u32,
}

impl<'a> Job<'a> {
    fn new(config: &'a JobConfig, opts: &'a Options) -> Self {
        let n_hbar = opts.order.unwrap_or(config.hbar_order);
        Job {
            config,
            opts,
            n_hbar,
            dmax: config.default_weyl_degree(n_hbar),
        }
    }

    fn names(&self) -> &[String] {
        &self.config.variables
    }

    fn render(&self, e: &BaseElement) -> String {
        match self.config.horizon() {
            Some(h) => e.truncate(h).render(self.names()),
            None => e.render(self.names()),
        }
    }

    fn render_weyl(&self, w: &WeylElement) -> String {
        match self.config.horizon() {
            Some(h) => w.map_base(|c| c.truncate(h)).render(self.names()),
            None => w.render(self.names()),
        }
    }

    /// Runs `attempt` with growing jet guards until nothing is undetermined.
    fn with_guard<T>(
        &self,
        report: &mut Report,
        mut attempt: impl FnMut(&mut Report, BaseRing) -> Result<T, CliError>,
    ) -> Result<T, CliError> {
        if self.config.horizon().is_none() {
            return attempt(report, self.config.ring(0));
        }
        let step = self.dmax + 2;
        let (mut guard, tries) = match self.config.jet_guard {
            Some(g) => (g, 1),
            None => (step, GUARD_ATTEMPTS),
        };
        for i in 1..=tries {
            report.reset_results();
            report.jet_guard = Some(guard);
            match attempt(report, self.config.ring(guard)) {
                Err(CliError::Undetermined(_)) if i < tries => guard += step,
                other => return other,
            }
        }
        unreachable!("the last attempt returns")
    }

    /// Skewness, Jacobi identity and frame construction.
    fn validate(&self, report: &mut Report, ring: BaseRing) -> Result<PoissonStructure, CliError> {
        let horizon = self.config.horizon();
        let pi = self.config.poisson_matrix(ring)?;
        let input = self.config.structure_input(ring)?;
        let defects = pi.skew_defects();
        if !defects.is_empty() {
            let list: Vec<String> = defects
                .iter()
                .map(|(i, j)| format!("({},{})", i + 1, j + 1))
                .collect();
            report.checks.push(Check::fail(
                "Poisson matrix skew-symmetric",
                list.join(", "),
            ));
            return Err(CliError::Validation(
                "Poisson matrix is not skew-symmetric".into(),
            ));
        }
        report
            .checks
            .push(Check::pass("Poisson matrix skew-symmetric"));
        let jacobi = jacobi_check(&pi, horizon)?;
        for r in &jacobi.residuals {
            let [i, j, k] = r.indices;
            report.residuals.push(Residual {
                check: "Jacobi identity".into(),
                at: format!("({i},{j},{k})"),
                value: self.render(&r.value),
            });
        }
        if !jacobi.pass {
            let listed: Vec<String> = report
                .residuals
                .iter()
                .map(|r| format!("{} {}", r.at, r.value))
                .collect();
            report
                .checks
                .push(Check::fail("Jacobi identity", listed.join("; ")));
            return Err(CliError::Validation("Jacobi identity fails".into()));
        }
        report.checks.push(Check::pass("Jacobi identity"));
        let frame = match self.config.mode {
            ModeName::SymplecticCoordinates => "Poisson matrix invertible",
            ModeName::ExplicitBasis => "explicit frame data consistent",
        };
        match build_structure(input, horizon) {
            Ok(p) => {
                report.checks.push(Check::pass(frame));
                Ok(p)
            }
            Err(e) => {
                report.checks.push(Check::fail(frame, e.to_string()));
                Err(e.into())
            }
        }
    }

    fn connect(
        &self,
        report: &mut Report,
        p: &PoissonStructure,
        dmax: u32,
        timer: &mut Timer,
    ) -> Result<FedosovConnection, CliError> {
        let space = WeylSpace::new(p.n, dmax, p.ring());
        let curv = timer.time("curvature", || curvature(p, space))?;
        let fc = timer.time("solve", || solve_r(p, &curv, space, self.n_hbar))?;
        report.checks.extend(curv.checks.iter().cloned());
        report.checks.extend(fc.checks.iter().cloned());
        report.connection = Some(ConnectionSummary {
            hbar_order: self.n_hbar,
            weyl_degree: dmax,
            iterations: fc.iterations,
            r_terms: fc.r.num_terms(),
        });
        Ok(fc)
    }

    /// The connection at Weyl degree `D_max + 2`, in a ring two degrees deeper.
    fn refined(&self, ring: BaseRing, timer: &mut Timer) -> Result<FedosovConnection, CliError> {
        let ring = match ring.order() {
            Some(w) => BaseRing::jet(ring.nvars, w + 2),
            None => ring,
        };
        let p = build_structure(self.config.structure_input(ring)?, self.config.horizon())?;
        self.connect(&mut Report::new("refine"), &p, self.dmax + 2, timer)
    }

    fn rendered(&self, series: &[BaseElement]) -> Vec<String> {
        series.iter().map(|c| self.render(c)).collect()
    }

    fn check_dump_targets(&self) -> Result<(), CliError> {
        for target in &self.opts.dump {
            let known = matches!(target.as_str(), "r" | "alpha" | "beta" | "b" | "psi")
                || target.starts_with("tau:");
            if !known {
                return Err(CliError::Parse(format!("unknown dump target '{target}'")));
            }
            if let Some(expr) = target.strip_prefix("tau:") {
                self.config.parse(expr, self.config.ring(0))?;
            }
        }
        Ok(())
    }

    fn dump(&self, report: &mut Report, fc: &FedosovConnection) -> Result<(), CliError> {
        for target in &self.opts.dump {
            let value = match target.as_str() {
                "r" => self.render_weyl(&fc.r),
                "alpha" => self.render_weyl(&fc.curv.alpha),
                "beta" => self.render_weyl(&fc.curv.beta),
                "b" => self.render_weyl(&fc.curv.b),
                "psi" => self.render_weyl(&fc.curv.psi),
                other => {
                    let expr = other.strip_prefix("tau:").unwrap_or(other);
                    let a = self.config.parse(expr, fc.space.ring)?;
                    self.render_weyl(&quantize(&a, fc)?)
                }
            };
            report.dump.insert(target.clone(), value);
        }
        Ok(())
    }
}

fn start(command: &str, config: &JobConfig) -> Report {
    let mut report = Report::new(command);
    report.config = Some(config.clone());
    report
}

fn load_then(command: &str, path: &Path, run: impl FnOnce(&JobConfig) -> Report) -> Report {
    match JobConfig::load(path) {
        Ok(config) => run(&config),
        Err(e) => Report::new(command).finish(Err(e)),
    }
}

/// Parsing, skewness, Jacobi identity and invertibility.
pub fn validate(config: &JobConfig, opts: &Options) -> Report {
    let job = Job::new(config, opts);
    let mut timer = Timer::new(opts.timing);
    let mut report = start("validate", config);
    let outcome = job.with_guard(&mut report, |report, ring| {
        timer
            .time("validate", || job.validate(report, ring))
            .map(|_| ())
    });
    report.timing = timer.finish();
    report.finish(outcome)
}

/// Builds and verifies the flat connection; writes it to `out` when given.
pub fn quantize_job(config: &JobConfig, out: Option<&Path>, opts: &Options) -> Report {
    let job = Job::new(config, opts);
    let mut timer = Timer::new(opts.timing);
    let mut report = start("quantize", config);
    let outcome = job.check_dump_targets().and_then(|()| {
        job.with_guard(&mut report, |report, ring| {
            let p = job.validate(report, ring)?;
            let fc = job.connect(report, &p, job.dmax, &mut timer)?;
            job.dump(report, &fc)?;
            if let Some(path) = out {
                let artifact = json!({
                    "hbar_order": fc.n_hbar,
                    "weyl_degree": fc.dmax(),
                    "jet_guard": report.jet_guard,
                    "iterations": fc.iterations,
                    "r": job.render_weyl(&fc.r),
                    "alpha": job.render_weyl(&fc.curv.alpha),
                    "beta": job.render_weyl(&fc.curv.beta),
                    "b": job.render_weyl(&fc.curv.b),
                    "psi": job.render_weyl(&fc.curv.psi),
                    "checks": report.checks,
                });
                let text = serde_json::to_string_pretty(&artifact).expect("artifact serializes");
                std::fs::write(path, text + "\n")
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        })
    });
    report.timing = timer.finish();
    report.finish(outcome)
}

fn truncated(series: &[BaseElement], horizon: Option<u32>) -> Vec<BaseElement> {
    match horizon {
        Some(h) => series.iter().map(|c| c.truncate(h)).collect(),
        None => series.to_vec(),
    }
}

/// `a ∗ b` through `ħ^N`, with a stability re-run at Weyl degree `D_max + 2`.
pub fn star_job(config: &JobConfig, a: &str, b: &str, opts: &Options) -> Report {
    let job = Job::new(config, opts);
    let mut timer = Timer::new(opts.timing);
    let mut report = start("star", config);
    let parsed = job.check_dump_targets().and_then(|()| {
        Ok((
            config.parse(a, config.ring(0))?,
            config.parse(b, config.ring(0))?,
        ))
    });
    let outcome = parsed.and_then(|_| {
        job.with_guard(&mut report, |report, ring| {
            let (ea, eb) = (config.parse(a, ring)?, config.parse(b, ring)?);
            let p = job.validate(report, ring)?;
            let fc = job.connect(report, &p, job.dmax, &mut timer)?;
            job.dump(report, &fc)?;
            let star = FedosovStar::new(&fc);
            let coeffs = timer.time("star", || star.star(&ea, &eb))?;
            let horizon = config.horizon();
            let f0 = &coeffs[0] - &(&ea * &eb);
            report.checks.push(Check::from_zero(
                "F_0 = a·b",
                &f0.check_zero(horizon),
                || job.render(&f0),
            ));

            let refined = job.refined(ring, &mut timer)?;
            let (ra, rb) = (
                config.parse(a, refined.space.ring)?,
                config.parse(b, refined.space.ring)?,
            );
            let again = timer.time("stability", || FedosovStar::new(&refined).star(&ra, &rb))?;
            let name = format!("truncation stability at Weyl degree {}", job.dmax + 2);
            let (shown, again) = (job.rendered(&coeffs), job.rendered(&again));
            report.checks.push(if shown == again {
                Check::pass(name)
            } else {
                Check::fail(name, format!("refined coefficients [{}]", again.join(", ")))
            });
            report.star = Some(StarJson {
                a: job.render(&ea),
                b: job.render(&eb),
                f: shown,
            });
            undetermined(report)
        })
    });
    report.timing = timer.finish();
    report.finish(outcome)
}

fn undetermined(report: &Report) -> Result<(), CliError> {
    match report.checks.iter().find(|c| is_undetermined(c)) {
        Some(c) => Err(CliError::Undetermined(c.clone())),
        None => Ok(()),
    }
}

const ASSOC_TRIPLES: usize = 10;
const ASSOC_DEGREE: u32 = 3;
const PAIRS: usize = 20;
const PAIR_DEGREE: u32 = 3;
const JACOBI_TRIPLES: usize = 5;
const UNIT_SAMPLES: usize = 10;
const STABILITY_PAIRS: usize = 3;
const MOYAL_DEGREE: u32 = 4;

fn run_suites<S: StarProduct>(
    job: &Job,
    report: &mut Report,
    star: &S,
    fc: &FedosovConnection,
    suite: Suite,
    seed: u64,
    timer: &mut Timer,
) -> Result<(), CliError> {
    let ring = fc.space.ring;
    let p = &fc.structure;
    let horizon = job.config.horizon();
    if matches!(suite, Suite::All | Suite::Assoc) {
        let triples = Sampler::new(seed, ring).triples(ASSOC_TRIPLES, ASSOC_DEGREE);
        let assoc = timer.time("associativity", || associativity_check(star, &triples))?;
        let name = format!("associativity through order {}", assoc.order);
        report
            .checks
            .push(match assoc.orders.iter().find(|o| !o.pass) {
                None => Check::pass(name),
                Some(o) => Check::fail(
                    name,
                    format!(
                        "first failure at order {}: {}",
                        o.order,
                        o.failure.clone().unwrap_or_default()
                    ),
                ),
            });
        report.associativity = Some(assoc);
    }
    if matches!(suite, Suite::All | Suite::Identities) {
        let pairs = Sampler::new(seed.wrapping_add(1), ring).pairs(PAIRS, PAIR_DEGREE);
        let triples = Sampler::new(seed.wrapping_add(2), ring).triples(JACOBI_TRIPLES, 2);
        let mut units = Sampler::new(seed.wrapping_add(3), ring);
        let units: Vec<BaseElement> = (0..UNIT_SAMPLES)
            .map(|_| units.polynomial(PAIR_DEGREE))
            .collect();
        timer.time("identities", || -> Result<(), CliError> {
            report.checks.push(first_order_check(star, &p.pi, &pairs)?);
            report.checks.push(jacobi_order2_check(star, &triples)?);
            report.checks.push(unit_check(star, &units)?);
            let c = ring.constant(rat(-5, 2));
            let mut failures = Vec::new();
            for (t, b) in units.iter().enumerate().take(5) {
                let left = truncated(&star.star(&c, b)?, horizon);
                let right = truncated(&star.star(b, &c)?, horizon);
                let mut want = vec![ring.zero(); left.len()];
                want[0] = (&c * b).truncate(horizon.unwrap_or(u32::MAX));
                if left != right || truncated(&want, horizon) != left {
                    failures.push(format!("sample {t}"));
                }
            }
            report.checks.push(if failures.is_empty() {
                Check::pass("constants are central")
            } else {
                Check::fail("constants are central", failures.join(", "))
            });
            Ok(())
        })?;
        let refined = job.refined(ring, timer)?;
        let samples = Sampler::new(seed.wrapping_add(4), ring).pairs(STABILITY_PAIRS, PAIR_DEGREE);
        let deeper = Sampler::new(seed.wrapping_add(4), refined.space.ring)
            .pairs(STABILITY_PAIRS, PAIR_DEGREE);
        let refined = FedosovStar::new(&refined);
        let mut failures = Vec::new();
        timer.time("stability", || -> Result<(), CliError> {
            for (t, ((a, b), (ra, rb))) in samples.iter().zip(&deeper).enumerate() {
                let coarse = job.rendered(&FedosovStar::new(fc).star(a, b)?);
                if coarse != job.rendered(&refined.star(ra, rb)?) {
                    failures.push(format!("pair {t}"));
                }
            }
            Ok(())
        })?;
        let name = format!("truncation stability at Weyl degree {}", fc.dmax() + 2);
        report.checks.push(if failures.is_empty() {
            Check::pass(name)
        } else {
            Check::fail(name, failures.join(", "))
        });
    }
    if matches!(suite, Suite::All | Suite::Moyal) {
        let constant = (0..p.m).all(|i| (0..p.m).all(|j| p.pi.get(i, j).is_constant()));
        if constant {
            let oracle = MoyalStar::new(p.pi.clone(), star.order())?;
            let mons = all_monomials(ring, MOYAL_DEGREE);
            let pairs: Vec<(BaseElement, BaseElement)> = mons
                .iter()
                .flat_map(|a| mons.iter().map(move |b| (a.clone(), b.clone())))
                .collect();
            report.checks.push(timer.time("moyal", || {
                agreement_check("Moyal agreement", star, &oracle, &pairs)
            })?);
        } else if suite == Suite::Moyal {
            report.checks.push(Check::fail(
                "Moyal agreement",
                "Poisson matrix is not constant",
            ));
        }
    }
    Ok(())
}

/// Runs the named verification suites against the computed star product.
pub fn check_job(config: &JobConfig, suite: Suite, opts: &Options) -> Report {
    let job = Job::new(config, opts);
    let mut timer = Timer::new(opts.timing);
    let mut report = start("check", config);
    let seed = opts.seed.unwrap_or(config.seed);
    report.seed = Some(seed);
    let outcome = job.check_dump_targets().and_then(|()| {
        job.with_guard(&mut report, |report, ring| {
            let p = job.validate(report, ring)?;
            let fc = job.connect(report, &p, job.dmax, &mut timer)?;
            job.dump(report, &fc)?;
            let base = FedosovStar::new(&fc);
            match opts.inject_fault {
                Some(k) => run_suites(
                    &job,
                    report,
                    &FaultyStar::new(base, k),
                    &fc,
                    suite,
                    seed,
                    &mut timer,
                )?,
                None => run_suites(&job, report, &base, &fc, suite, seed, &mut timer)?,
            }
            undetermined(report)
        })
    });
    report.timing = timer.finish();
    report.finish(outcome)
}

pub fn cmd_validate(path: &Path, opts: &Options) -> (i32, Report) {
    let r = load_then("validate", path, |c| validate(c, opts));
    (r.exit_code, r)
}

pub fn cmd_quantize(path: &Path, out: Option<&Path>, opts: &Options) -> (i32, Report) {
    let r = load_then("quantize", path, |c| quantize_job(c, out, opts));
    (r.exit_code, r)
}

pub fn cmd_star(path: &Path, a: &str, b: &str, opts: &Options) -> (i32, Report) {
    let r = load_then("star", path, |c| star_job(c, a, b, opts));
    (r.exit_code, r)
}

pub fn cmd_check(path: &Path, suite: Suite, opts: &Options) -> (i32, Report) {
    let r = load_then("check", path, |c| check_job(c, suite, opts));
    (r.exit_code, r)
}
