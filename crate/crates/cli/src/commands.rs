//! One function per subcommand. Each validates its parameters before any
//! computation, then fills a report builder.

use cantor_scaling::branch::{BranchMap, BranchSystem, Smoothness};
use cantor_scaling::ratio::{
    comparability, holder_exponent, log_length_residual, rho_s, Metric, PairSampler, TailPolicy,
};
use cantor_scaling::realization::{realize, DEFAULT_TAIL_DEPTH};
use cantor_scaling::smoothness::{
    conjugacy_smoothness, exponent_levels, family_levels, lemma_check, refutation_probe, violation_probe,
    whitney_check, ConjugacyOptions, ConstraintSet, ExponentFit, ExponentOptions, LemmaPair, PairFamily, Verdict,
    WhitneyOptions,
};
use cantor_scaling::symbolic::{lcp, rho_delta, Word};
use serde_json::json;

use crate::config::{check_eps, check_example, check_order, RunConfig, Source};
use crate::report::{num, Builder, Table};
use crate::CliError;

/// Largest number of rows `ratios` will enumerate.
pub const MAX_RATIO_ROWS: usize = 2_000_000;

/// Simplex sums must equal 1 to this accuracy.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Log-length identity residual allowed at any depth.
pub const LOG_IDENTITY_TOL: f64 = 1e-9;

/// Realized node ratios must reproduce `S` to this accuracy.
pub const ROUND_TRIP_TOL: f64 = 1e-12;

/// Allowed shortfall of the conjugacy decay exponent below `k + ε - 1`.
pub const CONJUGACY_SLACK: f64 = 0.2;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn word_count(d: usize, depth: usize) -> Option<usize> {
    d.checked_pow(depth as u32)
}

fn encode(w: &Word, d: usize) -> String {
    w.encode(d)
}

pub fn ratios(cfg: &RunConfig, src: &Source, b: &mut Builder) -> Result<(), CliError> {
    let d = src.d();
    let depth = cfg.params.depth;
    let rows = word_count(d, depth)
        .filter(|&n| n <= MAX_RATIO_ROWS)
        .ok_or_else(|| invalid(format!("depth {depth} with d = {d} exceeds {MAX_RATIO_ROWS} rows")))?;
    let s = src.as_scaling();
    let mut header = vec!["word".to_string()];
    for i in 1..=d {
        header.push(format!("child_{i}"));
        if i < d {
            header.push(format!("gap_{i}"));
        }
    }
    header.extend(["sum".into(), "log_identity_residual".into()]);
    let mut table = Table {
        name: "ratios".into(),
        header,
        rows: Vec::with_capacity(rows),
    };
    let (mut max_sum_err, mut min_entry, mut max_residual) = (0.0f64, f64::INFINITY, 0.0f64);
    for w in Word::all_of_length(depth, d) {
        let r = s.ratio(&w)?;
        let err = (r.sum() - 1.0).abs();
        max_sum_err = max_sum_err.max(err);
        min_entry = r.coords().fold(min_entry, f64::min);
        let residual = match src.system() {
            Some(sys) => {
                let x = log_length_residual(sys, &w)?;
                max_residual = max_residual.max(x);
                num(x)
            }
            None => String::new(),
        };
        let mut row = vec![encode(&w, d)];
        row.extend(r.interleaved().into_iter().map(num));
        row.push(num(r.sum()));
        row.push(residual);
        table.push(row);
    }
    b.set("d", d);
    b.set("depth", depth);
    b.set("rows", rows);
    b.set("max_sum_error", max_sum_err);
    b.set("min_entry", min_entry);
    b.check(
        "simplex",
        max_sum_err <= SIMPLEX_TOL && min_entry > 0.0,
        format!("max |sum - 1| = {max_sum_err:e}, min entry = {min_entry:e}"),
    );
    if src.system().is_some() {
        b.set("max_log_identity_residual", max_residual);
        b.check(
            "log_length_identity",
            max_residual <= LOG_IDENTITY_TOL,
            format!("max residual {max_residual:e} against {LOG_IDENTITY_TOL:e}"),
        );
    }
    b.tables.push(table);
    Ok(())
}

/// Node count of a realized tree of depth `n`, refused beyond [`MAX_RATIO_ROWS`].
fn tree_records(d: usize, n: usize) -> Result<usize, CliError> {
    (0..=n)
        .try_fold(0usize, |acc, m| word_count(d, m).and_then(|c| acc.checked_add(c)))
        .filter(|&c| c <= MAX_RATIO_ROWS)
        .ok_or_else(|| invalid(format!("depth {n} with d = {d} exceeds {MAX_RATIO_ROWS} records")))
}

pub fn realize_cmd(cfg: &RunConfig, src: &Source, b: &mut Builder) -> Result<(), CliError> {
    let d = src.d();
    let n = cfg.params.depth;
    let tail = cfg.tail(d)?;
    let tail2 = cfg.tail2(d)?;
    let expected = tree_records(d, n)?;
    let s = src.as_scaling();
    let tree = realize(s, &tail, n)?;
    let mut worst = 0.0f64;
    for m in 0..n {
        for (w, _) in tree.level(m)? {
            let want = s.ratio_with_tail(&w, &tail, DEFAULT_TAIL_DEPTH)?;
            worst = worst.max(tree.node_ratio(&w)?.distance(&want));
        }
    }
    b.set("d", d);
    b.set("depth", n);
    b.set("tail", tail.encode(d));
    b.set("records", tree.len());
    b.set("round_trip_error", worst);
    b.check(
        "record_count",
        tree.len() == expected,
        format!("{} records, expected {expected}", tree.len()),
    );
    b.check(
        "round_trip",
        worst <= ROUND_TRIP_TOL,
        format!("max distance between realized and prescribed ratios {worst:e}"),
    );
    if tail2 != tail {
        let other = realize(s, &tail2, n)?;
        let mut table = Table::new("tail_sensitivity", &["level", "max_abs_log_length_difference"]);
        let mut diffs = Vec::new();
        for m in 0..=n {
            let mut x = 0.0f64;
            for (w, h) in tree.level(m)? {
                x = x.max((h.log_len - other.hull(&w)?.log_len).abs());
            }
            table.push(vec![m.to_string(), num(x)]);
            diffs.push(x);
        }
        b.set("tail2", tail2.encode(d));
        b.set("tail_sensitivity", diffs);
        b.tables.push(table);
    }
    b.files.push(("tree.tsv".into(), tree.to_text()));
    Ok(())
}

fn sampler(cfg: &RunConfig) -> Result<PairSampler, CliError> {
    if cfg.params.max_lcp < 2 {
        return Err(invalid("params.max_lcp must be >= 2"));
    }
    Ok(PairSampler {
        seed: cfg.seed,
        min_lcp: 1,
        max_lcp: cfg.params.max_lcp,
        pairs_per_level: cfg.params.pairs_per_level,
        ..PairSampler::default()
    })
}

pub fn metric(cfg: &RunConfig, src: &Source, b: &mut Builder) -> Result<(), CliError> {
    let d = src.d();
    let delta = match cfg.metric()? {
        Metric::RhoDelta(x) => x,
        Metric::RhoS(_) => 1.0,
    };
    let sampler = sampler(cfg)?;
    let s = src.as_scaling();
    let policy = TailPolicy::default();
    let pairs = sampler.sample(d)?;
    let mut table = Table::new("metric_pairs", &["word_a", "word_b", "lcp_len", "rho_s", "rho_delta"]);
    let (mut symmetric, mut in_range) = (true, true);
    let mut values = Vec::with_capacity(pairs.len());
    for p in &pairs {
        let ab = rho_s(s, &p.a, &p.b, &policy)?;
        let ba = rho_s(s, &p.b, &p.a, &policy)?;
        let rd = rho_delta(delta, &p.a, &p.b, Some(policy.lcp_bound))?;
        symmetric &= ab == ba;
        in_range &= ab > 0.0 && ab <= 1.0;
        values.push(rd);
        table.push(vec![p.a.encode(d), p.b.encode(d), p.lcp.to_string(), num(ab), num(rd)]);
    }
    // Ultrametric inequality on consecutive sampled triples.
    let mut ultra = true;
    for t in pairs.windows(3) {
        let r = |x: &_, y: &_| rho_delta(delta, x, y, Some(policy.lcp_bound));
        let (ac, ab, bc) = (r(&t[0].a, &t[2].a)?, r(&t[0].a, &t[1].a)?, r(&t[1].a, &t[2].a)?);
        ultra &= ac <= ab.max(bc);
    }
    b.set("pairs", pairs.len());
    b.set("delta", delta);
    b.set("ratio_norm", "max");
    b.check(
        "rho_s_symmetric",
        symmetric,
        "rho_s(a, b) == rho_s(b, a) on every sampled pair",
    );
    b.check(
        "rho_s_range",
        in_range,
        "0 < rho_s <= 1 on pairs with a finite common prefix",
    );
    b.check(
        "rho_delta_ultrametric",
        ultra,
        "rho_delta(a, c) <= max(rho_delta(a, b), rho_delta(b, c))",
    );
    if s.cylinder_log_length(&Word::empty()).is_some() {
        let prefixes: Vec<Word> = pairs
            .iter()
            .map(|p| lcp(&p.a, &p.b, Some(policy.lcp_bound)))
            .map(|l| l.map(|l| l.word))
            .collect::<Result<_, _>>()?;
        let band = comparability(s, &prefixes, &policy)?;
        b.set("comparability", band);
        b.check(
            "comparability_finite",
            band.k.is_finite(),
            format!("|I_c| / rho_S(c) within [{:e}, {:e}]", band.min_ratio, band.max_ratio),
        );
    }
    b.tables.push(table);
    Ok(())
}

pub fn holder(cfg: &RunConfig, src: &Source, b: &mut Builder) -> Result<(), CliError> {
    let metric = cfg.metric()?;
    let sampler = sampler(cfg)?;
    let p = &cfg.params;
    let est = holder_exponent(src.as_scaling(), &metric, &sampler)?;
    let mut table = Table::new("holder_pairs", &["word_a", "word_b", "lcp_len", "metric", "delta_s"]);
    for r in &est.records {
        table.push(vec![
            r.word_a.clone(),
            r.word_b.clone(),
            r.lcp_len.to_string(),
            num(r.metric),
            num(r.delta_s),
        ]);
    }
    b.set("metric", &p.metric);
    b.set("ratio_norm", "max");
    b.set("constant", est.constant);
    b.set("exponent", est.exponent.is_finite().then_some(est.exponent));
    b.set("log_constant", est.log_constant);
    b.set("r_squared", est.r_squared);
    b.set("pairs_used", est.pairs_used);
    b.set("levels", &est.levels);
    if src.as_scaling().is_constant() {
        b.check(
            "constant_flag",
            est.constant,
            "constant scaling reports the constant flag",
        );
    }
    if let Some(want) = p.expect_exponent {
        let ok = (est.exponent - want).abs() <= p.exponent_tolerance && est.r_squared >= p.min_r_squared;
        b.check(
            "holder_exponent",
            ok,
            format!(
                "exponent {:.4} vs {want} ± {}, r² {:.4} (min {})",
                est.exponent, p.exponent_tolerance, est.r_squared, p.min_r_squared
            ),
        );
    }
    b.tables.push(table);
    Ok(())
}

fn constraints(text: &str) -> Result<ConstraintSet, CliError> {
    match text {
        "outer" => Ok(ConstraintSet::Outer),
        "inner" => Ok(ConstraintSet::Inner),
        "combined" => Ok(ConstraintSet::Combined),
        other => Err(invalid(format!(
            "constraints must be outer, inner or combined, got '{other}'"
        ))),
    }
}

/// First level probed for refutation.
pub const PROBE_FROM: usize = 4;

pub fn exponent(cfg: &RunConfig, src: &Source, b: &mut Builder) -> Result<(), CliError> {
    let d = src.d();
    let p = &cfg.params;
    let k = cfg.k()?;
    let eps = cfg.eps()?;
    check_order(k, d)?;
    let eps1 = p.eps1.unwrap_or(eps + 0.3);
    if !(eps1 > 0.0) {
        return Err(invalid(format!("eps1 must be positive, got {eps1}")));
    }
    if p.j0 == 0 || p.j0 as usize > d || p.symbol == 0 || p.symbol as usize > d {
        return Err(invalid(format!("j0 and symbol must lie in 1..={d}")));
    }
    if p.n_min > p.n_max {
        return Err(invalid(format!("empty level range {}..={}", p.n_min, p.n_max)));
    }
    let opts = ExponentOptions {
        j0: p.j0,
        constraints: constraints(&p.constraints)?,
        ..ExponentOptions::default()
    };
    let family = PairFamily::ConstantPrefix {
        symbol: p.symbol,
        tail: cfg.tail(d)?,
    };
    let rows = family_levels(src.as_scaling(), k, &family, p.n_min..=p.n_max, &opts)?;
    let levels = exponent_levels(&rows, &opts);
    let mut table = Table::new(
        "exponent_levels",
        &["n", "log_rho_s", "outer", "inner", "combined", "noise", "excluded"],
    );
    for ((n, r), l) in rows.iter().zip(&levels) {
        table.push(vec![
            n.to_string(),
            num(r.log_rho),
            num(r.outer.value),
            num(r.inner.value),
            num(r.combined.value),
            num(l.noise),
            l.excluded.to_string(),
        ]);
    }
    b.tables.push(table);
    b.set("k", k);
    b.set("eps", eps);
    b.set("constraints", opts.constraints);
    let expect = p.expect_exponent.or(cfg.system_order().map(|_| k as f64 - 1.0 + eps));
    match ExponentFit::from_levels(levels) {
        Ok(fit) => {
            let used: Vec<usize> = fit.levels.iter().filter(|l| !l.excluded).map(|l| l.n).collect();
            b.set("slope", fit.slope);
            b.set("intercept", fit.intercept);
            b.set("r_squared", fit.r_squared);
            b.set("levels_used", &used);
            if let Some(want) = expect {
                b.check(
                    "exponent",
                    (fit.slope - want).abs() <= p.exponent_tolerance && fit.r_squared >= p.min_r_squared,
                    format!(
                        "slope {:.4} vs {want} ± {}, r² {:.4} (min {}), levels {used:?}",
                        fit.slope, p.exponent_tolerance, fit.r_squared, p.min_r_squared
                    ),
                );
            }
        }
        Err(e) => {
            b.set("slope", None::<f64>);
            b.set("fit_status", e.to_string());
            if let Some(want) = expect {
                b.check("exponent", false, format!("no fit ({e}); expected slope {want}"));
            }
        }
    }
    let probed: Vec<_> = rows
        .into_iter()
        .filter(|(n, _)| *n >= PROBE_FROM.max(p.n_min))
        .collect();
    if probed.len() >= 2 {
        let probe = refutation_probe(&probed, k, eps1, opts.constraints)?;
        let mut t = Table::new("refutation_probe", &["n", "ratio"]);
        for (n, r) in &probe.ratios {
            t.push(vec![n.to_string(), num(*r)]);
        }
        b.tables.push(t);
        if expect.is_some() && eps1 > eps {
            b.check(
                "refutation",
                probe.verdict == Verdict::Refuted,
                format!(
                    "eps1 = {eps1}: monotone {}, growth {:.3} (need >= 3)",
                    probe.monotone, probe.growth
                ),
            );
        }
        b.set("probe", probe);
    }
    Ok(())
}

fn need_system<'a>(src: &'a Source, command: &str) -> Result<&'a BranchSystem, CliError> {
    src.system().ok_or_else(|| {
        invalid(format!(
            "{command} needs a [system]: it evaluates derivatives of the forward map"
        ))
    })
}

pub fn whitney(cfg: &RunConfig, src: &Source, b: &mut Builder) -> Result<(), CliError> {
    let sys = need_system(src, "whitney")?;
    let p = &cfg.params;
    let k = cfg.k()?;
    let eps = cfg.eps()?;
    if k == 0 {
        return Err(invalid("k >= 1 required"));
    }
    if let Smoothness::Finite { k: sk, .. } = sys.smoothness() {
        if k > sk {
            return Err(invalid(format!(
                "k = {k} exceeds the smoothness order {sk} of the system"
            )));
        }
    }
    let [lo, hi] = p.levels[..] else {
        return Err(invalid("params.levels must be [first, last]"));
    };
    if lo == 0 || lo > hi {
        return Err(invalid(format!(
            "levels must satisfy 1 <= first <= last, got [{lo}, {hi}]"
        )));
    }
    let opts = WhitneyOptions {
        levels: lo..=hi,
        sample_count: p.samples,
        seed: cfg.seed,
        ..WhitneyOptions::default()
    };
    let r = whitney_check(sys, k, eps, &opts)?;
    let mut t = Table::new("whitney_levels", &["l", "level", "log_distance", "log_remainder"]);
    for o in &r.orders {
        for l in &o.levels {
            t.push(vec![
                o.l.to_string(),
                l.level.to_string(),
                num(l.log_distance),
                num(l.log_remainder),
            ]);
        }
    }
    b.tables.push(t);
    for o in &r.orders {
        let detail = match o.exponent {
            Some(e) => format!("exponent {e:.4} vs target {} - {}", o.target, r.tolerance),
            None if o.exact => "all remainders at rounding level".to_string(),
            None => "fewer than 2 levels above rounding".to_string(),
        };
        b.check(&format!("remainder_order_{}", o.l), o.pass, detail);
    }
    if sys.is_affine() {
        b.check("exact_case", r.exact_case, "affine systems have vanishing remainders");
    }
    b.set("k", k);
    b.set("eps", eps);
    b.set("exact_case", r.exact_case);
    b.set("pairs_used", r.pairs_used);
    b.set(
        "orders",
        r.orders
            .iter()
            .map(|o| json!({"l": o.l, "target": o.target, "exponent": o.exponent, "r_squared": o.r_squared, "exact": o.exact, "pass": o.pass}))
            .collect::<Vec<_>>(),
    );
    b.set("reconstruction", &r.reconstruction);
    Ok(())
}

pub fn conjugacy(cfg: &RunConfig, src: &Source, b: &mut Builder) -> Result<(), CliError> {
    let d = src.d();
    let p = &cfg.params;
    let k = cfg.k()?;
    let eps = cfg.eps()?;
    check_order(k, d)?;
    if p.refinement == 0 || p.depth <= p.refinement {
        return Err(invalid(format!(
            "depth must exceed refinement >= 1 (depth {}, refinement {})",
            p.depth, p.refinement
        )));
    }
    tree_records(d, p.depth)?;
    let (tail, tail2) = (cfg.tail(d)?, cfg.tail2(d)?);
    let opts = ConjugacyOptions {
        refinement: p.refinement,
        root_tolerance: p.root_tolerance.unwrap_or(ConjugacyOptions::default().root_tolerance),
        ..ConjugacyOptions::default()
    };
    let s = src.as_scaling();
    let t1 = realize(s, &tail, p.depth)?;
    let t2 = realize(s, &tail2, p.depth)?;
    let r = conjugacy_smoothness(&t1, &t2, k, 1..=p.depth - p.refinement, &opts)?;
    let mut t = Table::new(
        "conjugacy_levels",
        &["n", "log_length", "variation", "noise", "excluded", "worst_node"],
    );
    for (l, w) in r.levels.iter().zip(&r.worst_nodes) {
        t.push(vec![
            l.n.to_string(),
            num(l.log_scale),
            num(l.variation),
            num(l.noise),
            l.excluded.to_string(),
            w.clone(),
        ]);
    }
    b.tables.push(t);
    let target = k as f64 + eps - 1.0;
    b.set("k", k);
    b.set("eps", eps);
    b.set("tails", [tail.encode(d), tail2.encode(d)]);
    b.set("exact", r.exact);
    b.set("slope", r.fit.as_ref().map(|f| f.slope));
    b.set("r_squared", r.fit.as_ref().map(|f| f.r_squared));
    let (ok, detail) = match &r.fit {
        None => (true, "bounds vanish at rounding level on every level".to_string()),
        Some(f) => (
            f.slope >= target - CONJUGACY_SLACK,
            format!("decay exponent {:.4} vs {target} - {CONJUGACY_SLACK}", f.slope),
        ),
    };
    b.check("conjugacy_decay", ok, detail);
    Ok(())
}

pub fn lemma(cfg: &RunConfig, src: Option<&Source>, b: &mut Builder) -> Result<(), CliError> {
    let p = &cfg.params;
    let d = p.d.or(src.map(Source::d)).unwrap_or(3);
    if p.k_max == 0 || p.k_max >= 2 * d {
        return Err(invalid(format!(
            "k < 2d required: interpolation at 2d points controls orders below 2d (k_max = {}, d = {d})",
            p.k_max
        )));
    }
    if p.pairs == 0 || p.grid < 2 {
        return Err(invalid("params.pairs >= 1 and params.grid >= 2 required"));
    }
    let pairs: Vec<LemmaPair> = LemmaPair::suite(cfg.seed, d, p.pairs)
        .into_iter()
        .map(|q| q.scaled(p.eta_scale))
        .collect();
    let mut t = Table::new(
        "lemma",
        &["pair", "k", "t", "sup_difference", "m", "margin", "holds", "holds_2m"],
    );
    let (mut fail_m, mut fail_2m, mut checks) = (0usize, 0usize, 0usize);
    let mut min_margin = f64::INFINITY;
    for (i, pair) in pairs.iter().enumerate() {
        for k in 1..=p.k_max {
            let r = lemma_check(pair, k, p.grid)?;
            checks += 1;
            fail_m += usize::from(!r.holds);
            fail_2m += usize::from(!r.holds_2m);
            for o in &r.orders {
                min_margin = min_margin.min(o.margin);
                t.push(vec![
                    i.to_string(),
                    k.to_string(),
                    o.t.to_string(),
                    num(o.sup_difference),
                    num(r.m),
                    num(o.margin),
                    o.holds.to_string(),
                    o.holds_2m.to_string(),
                ]);
            }
        }
    }
    b.tables.push(t);
    let probe = violation_probe(pairs[0].a1.clone(), 1e-2, p.grid)?;
    b.set("d", d);
    b.set("pairs", p.pairs);
    b.set("checks", checks);
    b.set("failures_m", fail_m);
    b.set("failures_2m", fail_2m);
    b.set("min_margin", min_margin);
    b.set(
        "violation_probe",
        json!({"k": probe.k, "hypothesis_holds": probe.hypothesis_holds, "holds": probe.holds, "m": probe.m}),
    );
    b.check(
        "bound_m",
        fail_m == 0,
        format!("{fail_m} of {checks} (pair, k) checks exceed M"),
    );
    b.check(
        "bound_2m",
        fail_2m == 0,
        format!("{fail_2m} of {checks} (pair, k) checks exceed 2M"),
    );
    Ok(())
}

pub fn gen_example(cfg: &RunConfig, b: &mut Builder) -> Result<(), CliError> {
    let (d, k, eps) = match cfg.system_order() {
        Some((k, eps)) => match &cfg.system {
            Some(crate::config::SystemSpec::PowerExample { d, .. }) => (*d, k, eps),
            _ => unreachable!("system_order comes from the example system"),
        },
        None => (
            cfg.params
                .d
                .ok_or_else(|| invalid("gen-example needs params.d or a power_example system"))?,
            cfg.k()?,
            cfg.params.eps.ok_or_else(|| invalid("gen-example needs params.eps"))?,
        ),
    };
    check_example(d, k, eps)?;
    check_eps(eps)?;
    let sys = BranchSystem::power_example(d, k, eps)?;
    let mut onto = 0.0f64;
    let mut min_slope = f64::INFINITY;
    let mut domains = Vec::new();
    for br in sys.branches() {
        onto = onto.max(br.forward(br.lo).abs()).max((br.forward(br.hi) - 1.0).abs());
        min_slope = min_slope.min(br.min_forward_derivative());
        domains.push([br.lo, br.hi]);
    }
    let scale = match &sys.branches()[0].map {
        BranchMap::Power { scale, .. } => *scale,
        _ => unreachable!("the first branch is the power branch"),
    };
    b.set("d", d);
    b.set("k", k);
    b.set("eps", eps);
    b.set("scale", scale);
    b.set("domains", domains);
    b.set("predicted_exponent", k as f64 - 1.0 + eps);
    b.check(
        "domains_onto_unit",
        onto <= 1e-14,
        format!("max endpoint error {onto:e}"),
    );
    b.check(
        "expanding",
        min_slope > 1.0,
        format!("min forward derivative {min_slope}"),
    );
    b.files.push((
        "example.toml".into(),
        format!("[system]\nkind = \"power_example\"\nd = {d}\nk = {k}\neps = {eps}\n"),
    ));
    Ok(())
}
