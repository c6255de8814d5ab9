//! Command implementations for the `qiso` binary. Each command returns a
//! [`RunReport`]; the binary only parses flags and prints.

pub mod report;
pub mod verify;

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};

use qiso::counting::{
    layer_bound_audit, partition_audit, qbinom, theorem_bound, Regime, PARTITION_AUDIT_RANGE,
};
use qiso::gf::FieldSpec;
use qiso::matching::{build_gk, perfect_matching, regularity_check};
use qiso::metric::delta;
use qiso::search::{construct_f1, construct_f2, run_search, verify_family, Mode, SearchConfig};
use qiso::subspace::{parse_family, Vector, DEFAULT_CAP};

pub use report::{Outcome, RunReport, Sidecar};
pub use verify::Suite;

/// Settings shared by every command.
#[derive(Clone, Copy, Debug)]
pub struct Common {
    pub cap: u64,
    pub workers: usize,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            cap: DEFAULT_CAP,
            workers: 1,
        }
    }
}

/// Runs `f` on a pool of `common.workers` threads and stamps timing.
fn run(common: Common, f: impl FnOnce() -> Result<RunReport> + Send) -> Result<RunReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.workers.max(1))
        .build()
        .context("building thread pool")?;
    let start = Instant::now();
    let mut report = pool.install(f)?;
    report.runtime_ms = start.elapsed().as_millis() as u64;
    report.sidecar.workers = common.workers;
    Ok(report)
}

fn regime_outcome(regime: Regime) -> Outcome {
    if regime == Regime::Gap {
        Outcome::Exploratory
    } else {
        Outcome::Pass
    }
}

/// Gaussian binomials [n, k]_q for 0 <= k <= n <= nmax as CSV.
pub fn cmd_table(q: u32, nmax: usize, common: Common) -> Result<RunReport> {
    run(common, || {
        FieldSpec::new(q)?;
        if nmax > 1000 {
            bail!("--nmax {nmax} is too large (at most 1000)");
        }
        let mut r = RunReport::new("table");
        r.param("q", q).param("nmax", nmax);
        let mut csv = String::from("n");
        for k in 0..=nmax {
            csv.push_str(&format!(",k{k}"));
        }
        csv.push('\n');
        for n in 0..=nmax {
            csv.push_str(&n.to_string());
            for k in 0..=nmax {
                csv.push(',');
                csv.push_str(&qbinom(n, k, q as u64).to_string());
            }
            csv.push('\n');
        }
        r.value("rows", nmax + 1);
        r.output = Some(csv);
        Ok(r)
    })
}

pub fn cmd_verify(q: u32, n: usize, suite: Suite, common: Common) -> Result<RunReport> {
    run(common, || {
        let mut r = RunReport::new("verify");
        r.param("q", q).param("n", n).param("suite", suite.name()).param("cap", common.cap);
        for s in suite.expand() {
            let out = verify::run_suite(s, q, n, common.cap)?;
            for (k, v) in out.counts {
                r.value(&format!("{}.{k}", s.name()), v);
            }
            for v in out.violations {
                r.violation(format!("{}: {v}", s.name()));
            }
        }
        r.settle(Outcome::Pass);
        Ok(r)
    })
}

pub fn cmd_bound(q: u32, n: usize, d: usize, common: Common) -> Result<RunReport> {
    run(common, || {
        FieldSpec::new(q)?;
        let tb = theorem_bound(n, d, q as u64);
        let mut r = RunReport::new("bound");
        r.param("q", q).param("n", n).param("d", d);
        r.value("bound", &tb.value);
        r.regime = Some(tb.regime.label().into());
        r.settle(regime_outcome(tb.regime));
        Ok(r)
    })
}

pub fn cmd_audit(q: u32, n: usize, d: usize, common: Common) -> Result<RunReport> {
    run(common, || {
        FieldSpec::new(q)?;
        let audit = layer_bound_audit(n, d, q as u64)?;
        let mut r = RunReport::new("audit");
        r.param("q", q).param("n", n).param("d", d);
        r.regime = Some(audit.regime.label().into());
        r.value("t", audit.t).value("theorem_bound", &audit.theorem_bound);
        for (name, v) in &audit.values {
            r.value(name, v);
        }
        for (k, b) in &audit.layer_bounds {
            r.value(&format!("slice_bound.{k:02}"), b);
        }
        for c in &audit.checks {
            r.value(&format!("check.{}", c.name), c.holds);
            if let Some(m) = &c.margin {
                r.value(&format!("margin.{}", c.name), m);
            }
            if !c.holds {
                r.violation(c.name.clone());
            }
        }
        let partitions = partition_audit(PARTITION_AUDIT_RANGE);
        let last = partitions.last().expect("nonempty range");
        r.value(&format!("partition.p{}", last.k), &last.p);
        let all_hold = partitions.iter().all(|row| row.holds);
        r.value("partition.holds", all_hold);
        if !all_hold {
            r.violation("p(k) <= (3/2)^k");
        }
        r.settle(Outcome::Pass);
        Ok(r)
    })
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub q: u32,
    pub n: usize,
    pub d: usize,
    pub mode: Mode,
    pub node_budget: Option<u64>,
    pub time_budget: Option<f64>,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: Option<u64>,
    pub resume: bool,
    pub seed_family: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub stop: Option<Arc<AtomicBool>>,
}

impl SearchOptions {
    pub fn new(q: u32, n: usize, d: usize, mode: Mode) -> Self {
        SearchOptions {
            q,
            n,
            d,
            mode,
            node_budget: None,
            time_budget: None,
            checkpoint: None,
            checkpoint_interval: None,
            resume: false,
            seed_family: None,
            out: None,
            stop: None,
        }
    }
}

pub fn cmd_search(opts: &SearchOptions, common: Common) -> Result<RunReport> {
    run(common, || {
        let mut cfg = SearchConfig::new(opts.q, opts.n, opts.d);
        cfg.mode = opts.mode;
        cfg.cap = common.cap;
        cfg.workers = common.workers.max(1);
        cfg.resume = opts.resume;
        cfg.checkpoint = opts.checkpoint.clone();
        cfg.stop = opts.stop.clone();
        if let Some(b) = opts.node_budget {
            cfg.node_budget = b;
        }
        if let Some(i) = opts.checkpoint_interval {
            cfg.checkpoint_interval = i;
        }
        if let Some(t) = opts.time_budget {
            if !(t > 0.0 && t.is_finite()) {
                bail!("--time-budget must be a positive number of seconds");
            }
            cfg.time_budget = Some(Duration::from_secs_f64(t));
        }
        let mut r = RunReport::new("search");
        r.param("q", opts.q).param("n", opts.n).param("d", opts.d);
        r.param("mode", if opts.mode == Mode::Exact { "exact" } else { "greedy" });
        if let Some(b) = opts.node_budget {
            r.param("node_budget", b);
        }
        if let Some(t) = opts.time_budget {
            r.param("time_budget", t);
        }
        if let Some(path) = &opts.seed_family {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let (spec, fam) = parse_family(&text).with_context(|| format!("parsing {}", path.display()))?;
            if spec.q() as u32 != opts.q {
                bail!("seed family is over GF({}), not GF({})", spec.q(), opts.q);
            }
            cfg.seed = Some(fam);
            r.param("seed_family", path.display());
        }
        if let Some(path) = &opts.checkpoint {
            r.param("checkpoint", path.display());
            r.artifacts.push(path.display().to_string());
        }
        let res = run_search(&cfg)?;
        let spec = FieldSpec::new(opts.q)?;
        let check = verify_family(&spec, &res.family, opts.d);
        r.regime = Some(res.regime.label().into());
        r.value("best_size", res.best_size)
            .value("optimal", res.optimal)
            .value("nodes", res.nodes)
            .value("upper_bound", res.upper_bound)
            .value("theorem_bound", &res.theorem_bound)
            .value("windows", res.windows)
            .value("diameter", check.diameter);
        if let Some(s) = res.stopped {
            r.value("stopped", format!("{s:?}"));
        }
        if !check.pass {
            for v in &check.violations {
                r.violation(v.clone());
            }
        }
        let matches_bound = res.theorem_bound == res.best_size.into();
        r.value("matches_bound", matches_bound);
        if res.optimal && res.regime.is_covered() && !matches_bound {
            r.violation("proved maximum differs from theorem bound");
        }
        let text = res.family.to_file_string();
        if let Some(path) = &opts.out {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            r.artifacts.push(path.display().to_string());
        }
        r.output = Some(text);
        let ok = if res.optimal && res.regime != Regime::Gap {
            Outcome::Pass
        } else {
            Outcome::Exploratory
        };
        r.settle(ok);
        Ok(r)
    })
}

/// F1 for even d, F2 for odd d, with its verification report.
pub fn cmd_construct(
    q: u32,
    n: usize,
    d: usize,
    x: Option<&str>,
    out: Option<&PathBuf>,
    common: Common,
) -> Result<RunReport> {
    run(common, || {
        let spec = FieldSpec::new(q)?;
        let t = d / 2;
        let mut r = RunReport::new("construct");
        r.param("q", q).param("n", n).param("d", d);
        let fam = if d.is_multiple_of(2) {
            r.value("construction", "F1");
            construct_f1(&spec, n, t, common.cap)?
        } else {
            let x = match x {
                Some(text) => Vector::parse(&spec, text)?,
                None if n > 0 => Vector::unit(n, 0),
                None => bail!("odd d needs n >= 1"),
            };
            r.param("x", &x);
            r.value("construction", "F2");
            construct_f2(&spec, n, t, &x, common.cap)?
        };
        let check = verify_family(&spec, &fam, d);
        r.regime = Some(check.regime.label().into());
        r.value("size", check.size)
            .value("diameter", check.diameter)
            .value("theorem_bound", &check.theorem_bound)
            .value("tight", check.tight);
        for v in &check.violations {
            r.violation(v.clone());
        }
        let text = fam.to_file_string();
        if let Some(path) = out {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            r.artifacts.push(path.display().to_string());
        }
        r.output = Some(text);
        r.settle(regime_outcome(check.regime));
        Ok(r)
    })
}

/// Perfect matching of G_k, one "A ; B" line per pair.
pub fn cmd_matching(q: u32, n: usize, k: usize, common: Common) -> Result<RunReport> {
    run(common, || {
        let spec = FieldSpec::new(q)?;
        let g = build_gk(&spec, n, k, common.cap)?;
        let mut r = RunReport::new("matching");
        r.param("q", q).param("n", n).param("k", k);
        let degree = qiso::counting::qpow(q as u64, k * (n - k));
        r.value("left", g.left.len()).value("right", g.right.len()).value("degree", &degree);
        if !regularity_check(&g, &degree) {
            r.violation(format!("G_{k} is not {degree}-regular"));
        }
        let pairs = perfect_matching(&g)?;
        r.value("matched", pairs.len());
        if pairs.len() != g.left.len() {
            r.violation("matching is not perfect");
        }
        let mut text = String::new();
        for &(i, j) in &pairs {
            if delta(&spec, &g.left[i], &g.right[j])? != n {
                r.violation(format!("pair ({}, {}) not at distance n", g.left[i], g.right[j]));
            }
            text.push_str(&format!("{} ; {}\n", g.left[i], g.right[j]));
        }
        r.output = Some(text);
        r.settle(Outcome::Pass);
        Ok(r)
    })
}
