use crate::config::{geometric, CommandKind, ConstantSource, OutputFormat, RunConfig};
use crate::report::{open, write_rows};
use anyhow::{anyhow, bail, Context, Result};
use laplace_bounds::bounds::{
    bracket_e_g, bracket_i, cubic_remainder_lhs, integrability_residual, mcw_reference,
    theorem1_constants, theorem2_constants, thresholds, Binding, Bracket, GConstants, GData,
    RelaxationParams, TheoremOneConstants,
};
use laplace_bounds::oracle::{empirical_error, OracleMethod};
use laplace_bounds::problems::{
    dixon_k1_closed_form, dixon_leading, dixon_sum_exact, dixon2_published_constants,
    parse_selector, Exponent, Problem,
};
use laplace_bounds::LocalExpansion;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// A problem plus the amplitude data, which JSON problems may carry
/// without an evaluator.
pub struct Target {
    pub problem: Problem,
    pub gdata: Option<GData>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProblemFile {
    Wrapped {
        name: Option<String>,
        local: LocalExpansion,
        #[serde(default)]
        gdata: Option<GData>,
    },
    Bare(LocalExpansion),
}

pub fn resolve_problem(spec: &str) -> Result<Target> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {spec}"))?;
        let file: ProblemFile = serde_json::from_str(&text).with_context(|| format!("parsing {spec}"))?;
        let (name, local, gdata) = match file {
            ProblemFile::Wrapped { name, local, gdata } => (name.unwrap_or_else(|| spec.to_string()), local, gdata),
            ProblemFile::Bare(local) => (spec.to_string(), local, None),
        };
        if let Some(g) = &gdata {
            g.validate(local.dim())?;
        }
        return Ok(Target {
            problem: Problem::from_local(name, local)?,
            gdata,
        });
    }
    let problem = parse_selector(spec)?;
    let gdata = problem.amplitude.as_ref().map(|a| a.data.clone());
    Ok(Target { problem, gdata })
}

/// `K₁` as printed for the Dixon problems, for side-by-side reporting.
fn k1_published(problem: &Problem) -> Option<f64> {
    match problem.exponent {
        Some(Exponent::Dixon { d }) => Some(dixon_k1_closed_form(d)),
        Some(Exponent::Dixon2Transformed) => Some(dixon2_published_constants().k_1),
        _ => None,
    }
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ConstantsRow {
    problem: String,
    d: usize,
    scale: f64,
    a: f64,
    x_a: f64,
    alpha: f64,
    lambda_min: f64,
    det_hessian: f64,
    D: f64,
    C: f64,
    xi: f64,
    K_alpha1: f64,
    K_alpha2: f64,
    K_1: f64,
    K_l: f64,
    K_u: f64,
    n0: f64,
    n2: f64,
    binding: Binding,
    /// Coefficients of the bracket in the user's `n`.
    K_alpha1_per_n: f64,
    K_1_per_n: f64,
    K_alpha2_per_n: f64,
    K_u_per_n: f64,
    K_l_per_n: f64,
    K_1_published: Option<f64>,
    K_2: Option<f64>,
    K_3: Option<f64>,
    K_alpha3: Option<f64>,
    K_4: Option<f64>,
    K_alpha5: Option<f64>,
    K_alpha6: Option<f64>,
    K_ul: Option<f64>,
    n4: Option<f64>,
}

#[derive(Serialize)]
struct ThresholdRow {
    problem: String,
    scale: f64,
    a: f64,
    x_a: f64,
    /// `max(1, s·n1)`, the floor of every search.
    lower_limit: f64,
    n0: f64,
    n2: f64,
    n_cubic: f64,
    n4: Option<f64>,
    binding: Binding,
    /// `n0 / s`, the first certified value of the user's `n`.
    n0_per_n: f64,
    integrability_residual_at_n0: f64,
    cubic_lhs_at_n0: f64,
}

#[derive(Serialize)]
struct BracketRow {
    problem: String,
    kind: &'static str,
    n: f64,
    leading: f64,
    rel_lo: f64,
    rel_hi: f64,
    abs_lo: f64,
    abs_hi: f64,
    valid: bool,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct VerifyRow {
    problem: String,
    kind: &'static str,
    n: f64,
    leading: f64,
    rel_lo: f64,
    rel_hi: f64,
    abs_lo: f64,
    abs_hi: f64,
    valid: bool,
    I_oracle: f64,
    E: f64,
    method: OracleMethod,
    contained: bool,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct DixonRow {
    n: u32,
    S_exact: String,
    log_leading: f64,
    E: f64,
    rel_lo: f64,
    rel_hi: f64,
    contained: bool,
    K1_theorem: f64,
    K1_published: Option<f64>,
}

#[derive(Serialize)]
struct McwRow {
    n: f64,
    mcw_radius: f64,
    our_lo: f64,
    our_hi: f64,
    our_radius: f64,
    mcw_larger: bool,
}

struct Context_ {
    target: Target,
    relax: RelaxationParams,
    consts: TheoremOneConstants,
    gconsts: Option<GConstants>,
}

fn prepare(cfg: &RunConfig, default_problem: Option<&str>) -> Result<Context_> {
    let spec = cfg
        .problem
        .as_deref()
        .or(default_problem)
        .ok_or_else(|| anyhow!("--problem is required for this command"))?;
    let target = resolve_problem(spec)?;
    let relax = match cfg.relax_a {
        Some(a) => RelaxationParams::new(a)?,
        None => RelaxationParams::base(),
    };
    let consts = theorem1_constants(&target.problem.local, relax)?;
    let gconsts = match &target.gdata {
        Some(g) => Some(theorem2_constants(&target.problem.local, g, &consts)?),
        None => None,
    };
    Ok(Context_ {
        target,
        relax,
        consts,
        gconsts,
    })
}

impl Context_ {
    fn bracket(&self, n: f64) -> (&'static str, Bracket) {
        match &self.gconsts {
            Some(g) => ("E_g", bracket_e_g(n, &self.consts, g)),
            None => ("I", bracket_i(n, &self.consts)),
        }
    }

    /// First certified value of the user's `n`.
    fn first_n(&self) -> f64 {
        let big = self.gconsts.as_ref().map_or(self.consts.n0, |g| g.n4);
        big / self.consts.scale
    }

    fn n_values(&self, cfg: &RunConfig) -> Result<Vec<f64>> {
        match &cfg.n_list {
            Some(list) => list.resolve(),
            None => {
                // integers keep the exact-sum oracle route available
                let lo = self.first_n().ceil();
                let mut ns: Vec<f64> = geometric(lo, 100.0 * lo, 20).into_iter().map(f64::ceil).collect();
                ns.dedup();
                Ok(ns)
            }
        }
    }

    fn name(&self) -> String {
        self.target.problem.name.clone()
    }
}

fn published_or_theorem(cfg: &RunConfig, ctx: &Context_) -> Result<TheoremOneConstants> {
    let default = match ctx.target.problem.exponent {
        Some(Exponent::Dixon2Transformed) => ConstantSource::Published,
        _ => ConstantSource::Theorem,
    };
    match cfg.constants.unwrap_or(default) {
        ConstantSource::Theorem => Ok(ctx.consts.clone()),
        ConstantSource::Published => {
            if ctx.target.problem.exponent != Some(Exponent::Dixon2Transformed) {
                bail!("published constants exist only for the dixon2 problem");
            }
            Ok(dixon2_published_constants())
        }
    }
}

fn integer_ns(values: &[f64]) -> Result<Vec<u32>> {
    values
        .iter()
        .map(|&n| {
            if n >= 1.0 && n.fract() == 0.0 && n <= u32::MAX as f64 {
                Ok(n as u32)
            } else {
                Err(anyhow!("this table needs positive integer n, got {n}"))
            }
        })
        .collect()
}

/// Runs one command. `Ok(false)` means a certified bracket missed its
/// oracle value.
pub fn run(cfg: &RunConfig) -> Result<bool> {
    let command = cfg.command.ok_or_else(|| anyhow!("no command given"))?;
    let format = cfg.output.unwrap_or(OutputFormat::Json);
    let out = cfg.out_path.as_deref();
    let up = |v: f64| if cfg.ceil { v.ceil() } else { v };
    match command {
        CommandKind::Local => {
            let ctx = prepare(cfg, None)?;
            let mut w = open(out)?;
            writeln!(w, "{}", ctx.target.problem.local.to_json_string())?;
            w.flush()?;
        }
        CommandKind::Constants => {
            let ctx = prepare(cfg, None)?;
            let k = &ctx.consts;
            let p = k.per_n();
            let g = ctx.gconsts.as_ref();
            let row = ConstantsRow {
                problem: ctx.name(),
                d: k.d,
                scale: k.scale,
                a: ctx.relax.a,
                x_a: ctx.relax.x_a,
                alpha: k.alpha,
                lambda_min: k.lambda_min,
                det_hessian: k.det_hessian,
                D: k.d_const,
                C: k.c,
                xi: k.xi,
                K_alpha1: k.k_alpha1,
                K_alpha2: k.k_alpha2,
                K_1: k.k_1,
                K_l: k.k_l,
                K_u: k.k_u,
                n0: up(k.n0),
                n2: up(k.n2),
                binding: k.binding,
                K_alpha1_per_n: p.k_alpha1,
                K_1_per_n: p.k_1,
                K_alpha2_per_n: p.k_alpha2,
                K_u_per_n: p.k_u,
                K_l_per_n: p.k_l,
                K_1_published: k1_published(&ctx.target.problem),
                K_2: g.map(|g| g.k_2),
                K_3: g.map(|g| g.k_3),
                K_alpha3: g.map(|g| g.k_alpha3),
                K_4: g.map(|g| g.k_4),
                K_alpha5: g.map(|g| g.k_alpha5),
                K_alpha6: g.map(|g| g.k_alpha6),
                K_ul: g.map(|g| g.k_ul),
                n4: g.map(|g| up(g.n4)),
            };
            write_rows(&[row], format, out)?;
        }
        CommandKind::Threshold => {
            let ctx = prepare(cfg, None)?;
            let local = &ctx.target.problem.local;
            let th = thresholds(local, ctx.relax)?;
            let row = ThresholdRow {
                problem: ctx.name(),
                scale: local.scale,
                a: ctx.relax.a,
                x_a: ctx.relax.x_a,
                lower_limit: (local.scale * local.n1).max(1.0),
                n0: up(th.n0),
                n2: up(th.n2),
                n_cubic: up(th.n_cubic),
                n4: ctx.gconsts.as_ref().map(|g| up(g.n4)),
                binding: th.binding,
                n0_per_n: up(th.n0 / local.scale),
                integrability_residual_at_n0: integrability_residual(local, th.n0),
                cubic_lhs_at_n0: cubic_remainder_lhs(local, th.n0),
            };
            write_rows(&[row], format, out)?;
        }
        CommandKind::Bracket => {
            let ctx = prepare(cfg, None)?;
            let rows: Vec<_> = ctx
                .n_values(cfg)?
                .into_iter()
                .map(|n| {
                    let (kind, b) = ctx.bracket(n);
                    BracketRow {
                        problem: ctx.name(),
                        kind,
                        n: b.n,
                        leading: b.leading,
                        rel_lo: b.rel_lo,
                        rel_hi: b.rel_hi,
                        abs_lo: b.abs_lo,
                        abs_hi: b.abs_hi,
                        valid: b.valid,
                    }
                })
                .collect();
            write_rows(&rows, format, out)?;
        }
        CommandKind::Verify => {
            let ctx = prepare(cfg, None)?;
            let mut rows = Vec::new();
            let mut all_ok = true;
            for n in ctx.n_values(cfg)? {
                let (kind, b) = ctx.bracket(n);
                let e = empirical_error(&ctx.target.problem, n)?;
                let contained = b.contains_relative(e.E);
                // misses below the threshold are not violations
                all_ok &= contained || !b.valid;
                rows.push(VerifyRow {
                    problem: ctx.name(),
                    kind,
                    n: b.n,
                    leading: b.leading,
                    rel_lo: b.rel_lo,
                    rel_hi: b.rel_hi,
                    abs_lo: b.abs_lo,
                    abs_hi: b.abs_hi,
                    valid: b.valid,
                    I_oracle: e.I_oracle,
                    E: e.E,
                    method: e.method,
                    contained,
                });
            }
            write_rows(&rows, format, out)?;
            return Ok(all_ok);
        }
        CommandKind::Dixon => {
            let ctx = prepare(cfg, Some("dixon2"))?;
            let p = &ctx.target.problem;
            let d = match p.exponent {
                Some(Exponent::Dixon { d }) => d,
                Some(Exponent::Dixon2Transformed) => 2,
                _ => bail!("the dixon table needs a dixon or dixon2 problem"),
            };
            let c = published_or_theorem(cfg, &ctx)?;
            let ns = match &cfg.n_list {
                Some(list) => integer_ns(&list.resolve()?)?,
                None => vec![1, 2, 5, 10, 100],
            };
            let mut rows = Vec::new();
            for n in ns {
                let e = empirical_error(p, n as f64)?;
                let b = bracket_i(n as f64, &c);
                rows.push(DixonRow {
                    n,
                    S_exact: dixon_sum_exact(d as u32 + 1, n).to_string(),
                    log_leading: dixon_leading(d, n),
                    E: e.E,
                    rel_lo: b.rel_lo,
                    rel_hi: b.rel_hi,
                    contained: b.contains_relative(e.E),
                    K1_theorem: ctx.consts.k_1,
                    K1_published: k1_published(p),
                });
            }
            write_rows(&rows, format, out)?;
        }
        CommandKind::CompareMcw => {
            let ctx = prepare(cfg, Some("dixon2"))?;
            let c = published_or_theorem(cfg, &ctx)?;
            let ns = match &cfg.n_list {
                Some(list) => list.resolve()?,
                None => vec![1.0, 2.0, 5.0, 10.0, 100.0],
            };
            let rows: Vec<_> = ns
                .into_iter()
                .map(|n| {
                    let b = bracket_i(n, &c);
                    let m = mcw_reference(n);
                    McwRow {
                        n,
                        mcw_radius: m,
                        our_lo: b.rel_lo,
                        our_hi: b.rel_hi,
                        our_radius: b.radius(),
                        mcw_larger: m > b.radius(),
                    }
                })
                .collect();
            write_rows(&rows, format, out)?;
        }
    }
    Ok(true)
}
