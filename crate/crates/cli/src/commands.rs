use std::path::Path;

use peelkit_core::construction::{self, BuildConfig};
use peelkit_core::defense;
use peelkit_core::format::{Meta, PointSetFile};
use peelkit_core::peeling::{self, PeelConfig};
use peelkit_core::verify::{self, Suite};
use peelkit_core::{bounds, scalar, Error, Point};
use serde_json::{json, Value};

use crate::report::{enclosure, Failure, Outcome};
use crate::{plot, GenerateKind};

type Run = Result<Outcome, Failure>;

pub const STATE_BUDGET_VAR: &str = "PEELKIT_STATE_BUDGET";

pub fn peel_config() -> Result<PeelConfig, Error> {
    let mut cfg = PeelConfig::default();
    if let Ok(raw) = std::env::var(STATE_BUDGET_VAR) {
        cfg.state_budget = raw.trim().parse().map_err(|_| {
            Error::InvalidArgument(format!("{STATE_BUDGET_VAR} must be a positive integer, got {raw:?}"))
        })?;
    }
    Ok(cfg)
}

fn point_json(p: &Point) -> Value {
    Value::from(p.coords().iter().map(scalar::to_string).collect::<Vec<_>>())
}

pub fn count(input: &Path, naive: bool, enumerate: Option<usize>, cfg: &PeelConfig) -> Run {
    let ps = PointSetFile::read(input)?.to_set()?;
    let report = peeling::peel_count(&ps, cfg)?;
    let mut out = Outcome::new();
    out.put("points", ps.len());
    out.put("dim", ps.dim());
    out.put("count", report.count.to_string());
    out.put("visited_states", report.visited_states);
    if naive {
        let oracle = peeling::peel_count_naive(&ps, cfg)?;
        let agree = oracle == report.count;
        out.put("naive_count", oracle.to_string());
        out.put("naive_agreement", agree);
        out.verified &= agree;
    }
    if let Some(k) = enumerate {
        let seqs = peeling::peel_enumerate(&ps, k)?;
        out.put("sequences", seqs.into_iter().map(|s| json!(s)).collect::<Vec<_>>());
    }
    Ok(out)
}

fn parse_point(text: &str, dim: usize) -> Result<Point, Error> {
    let coords = text.split(',').map(|t| scalar::parse(t.trim())).collect::<Result<Vec<_>, _>>()?;
    if coords.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: coords.len() });
    }
    Ok(Point::new(coords))
}

pub fn depth(input: &Path, origin: Option<&str>, oracle: bool) -> Run {
    let ps = PointSetFile::read(input)?.to_set()?;
    let p = match origin {
        Some(text) => parse_point(text, ps.dim())?,
        None => Point::origin(ps.dim()),
    };
    let report = defense::open_halfspace_depth(&ps, &p)?;
    let mut out = Outcome::new();
    out.put("point", point_json(&p));
    out.put("depth", report.depth);
    out.put("witness", point_json(&report.witness));
    out.verified &= report.verify(&ps, &p);
    if oracle {
        let slow = defense::depth_oracle(&ps, &p, defense::DEFAULT_ORACLE_LIMIT)?;
        out.put("oracle_depth", slow);
        out.put("oracle_agreement", slow == report.depth);
        out.verified &= slow == report.depth;
    }
    Ok(out)
}

pub fn generate(
    kind: GenerateKind,
    d: usize,
    m: usize,
    n: Option<usize>,
    seed: u64,
    path: &Path,
    cfg: &PeelConfig,
) -> Run {
    let mut out = Outcome::new();
    let meta =
        |kind: &str| Meta { kind: Some(kind.into()), d: Some(d), m: Some(m), n, seed: Some(seed), ..Meta::default() };
    let file = match kind {
        GenerateKind::Gale => {
            let g = defense::gale_set(d, m)?;
            let depth = defense::open_halfspace_depth(&g, &Point::origin(d))?.depth;
            if depth != m {
                return Err(Failure::Verification(format!("depth {depth}, expected {m}")));
            }
            out.put("depth", depth);
            PointSetFile::from_set(&g, meta("gale"))
        }
        GenerateKind::BaseSet => {
            let b = defense::base_set(d, m, cfg)?;
            out.put("hull_cap", defense::hull_cap(d, m));
            out.put("scaling_radii", b.scaling_radii.iter().map(scalar::to_string).collect::<Vec<_>>());
            PointSetFile::from_set(&b.points, meta("base-set"))
        }
        GenerateKind::Construction => {
            let n = n.ok_or_else(|| Failure::Input("construction needs --n".into()))?;
            let build = BuildConfig { peel: *cfg, ..BuildConfig::default() };
            let c = construction::build_sn(d, m, n, &build)?;
            out.put("partition", json!(c.tree.child_sizes));
            out.put("squash_exponent", c.exponent);
            out.put("certified_up_to", c.certified_up_to);
            if let Some(cert) = &c.certificate {
                out.put("count", cert.count.to_string());
                out.put("product_bound", cert.product_bound.to_string());
                out.put("max_active_blocks", cert.max_active_blocks);
                out.put("active_cap", cert.active_cap);
                if let Some(e) = &cert.closed_form_bound {
                    out.put("closed_form_bound", enclosure(e));
                }
            } else {
                out.put("note", format!("certified up to n = {}; larger n reuses its parameters", c.certified_up_to));
            }
            PointSetFile::from_set(&c.points, meta("construction")).with_tree(c.tree)
        }
    };
    file.write(path)?;
    out.put("points", file.points.len());
    out.put("out", path.display().to_string());
    out.put("certified", true);
    Ok(out)
}

pub fn bounds(d: usize, m: Option<usize>, n: Option<usize>, precision: u32) -> Run {
    let r = bounds::bound_report(d, m, n, precision)?;
    let mut out = Outcome::new();
    out.put("d", r.d);
    out.put("m", r.m);
    out.put("defense_number", r.defense_number);
    out.put("growth_base", enclosure(&r.growth_base));
    out.put("constant_c", enclosure(&r.constant_c));
    if let Some(e) = &r.bound_value {
        out.put("n", n.expect("bound needs n"));
        out.put("bound_value", enclosure(e));
    }
    out.put("optimal_m", r.optimal_m);
    out.put("optimal_growth_base", enclosure(&r.optimal_growth_base));
    out.put("theorem1_m", r.theorem1_m);
    out.put("exponent_slack", enclosure(&r.corollary_epsilon));
    Ok(out)
}

pub fn verify(suite: &str, seed: u64, cfg: &PeelConfig) -> Run {
    let suite: Suite = suite.parse()?;
    let r = verify::run(suite, seed, cfg);
    let mut out = Outcome::new();
    out.put("suite", suite.to_string());
    out.put("seed", seed);
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            let mut v = json!({
                "suite": c.suite.to_string(),
                "check": c.name,
                "passed": c.passed,
                "detail": c.detail,
            });
            if let Some(replay) = &c.replay {
                v["replay"] = Value::String(replay.clone());
            }
            v
        })
        .collect();
    out.put("checks", checks);
    out.put("note", r.notes.join("; "));
    out.verified = r.passed();
    Ok(out)
}

pub fn plot(input: &Path, path: &Path, axes: &str) -> Run {
    let file = PointSetFile::read(input)?;
    let ps = file.to_set()?;
    let axes = plot::parse_axes(axes, ps.dim())?;
    let svg = plot::render(&ps, axes);
    std::fs::write(path, svg).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut out = Outcome::new();
    out.put("points", ps.len());
    out.put("axes", json!([axes.0, axes.1]));
    out.put("out", path.display().to_string());
    Ok(out)
}
