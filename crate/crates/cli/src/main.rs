use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use vcsp::algebra::{find_fracpol_with, rigid_core_with, verify_fracpol_with, OpClass, Operation};
use vcsp::blp::{blp_value_with, solve_vcsp_with};
use vcsp::exactlp::verify_outcome;
use vcsp::exec::{Caps, Config, Exec};
use vcsp::feasibility::{one_infty_minimize_with, solve_csp, Backtracking};
use vcsp::lifting::{block_witnesses, check_block_finite, lift_instance};
use vcsp::model::{evaluate, feas_language, format_rational, int, Assignment, Instance, Language};
use vcsp::opgraph::{
    build_graph, generators_from_symmetric, min_max_generators, verify_gen_fracpol_with,
    verify_generators_strong,
};
use vcsp::oracle::brute_opt_with;
use vcsp::{tuple, Error};
use vcsp_cli::format::{
    labels, parse_assignment, parse_instance, parse_language, print_instance, print_language,
};
use vcsp_cli::report::Report;

#[derive(Parser)]
#[command(
    name = "vcsp",
    version,
    about = "Exact valued constraint satisfaction solver and analysis toolkit"
)]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Upper bound on worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Inputs {
    /// Language file.
    lang: PathBuf,
    /// Instance file.
    inst: PathBuf,
}

#[derive(clap::Args, Default)]
struct Outputs {
    /// Write the produced language here.
    #[arg(long)]
    lang_out: Option<PathBuf>,
    /// Write the produced instance here.
    #[arg(long)]
    inst_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an assignment.
    Eval {
        #[command(flatten)]
        io: Inputs,
        /// Labels, one per variable.
        #[arg(required = true, num_args = 1..)]
        labels: Vec<String>,
    },
    /// Exhaustive optimum and every optimal assignment.
    Opt {
        #[command(flatten)]
        io: Inputs,
    },
    /// Feasibility of the instance.
    Feas {
        #[command(flatten)]
        io: Inputs,
    },
    /// The (1,inf)-minimal instance.
    Minimize {
        #[command(flatten)]
        io: Inputs,
        #[command(flatten)]
        out: Outputs,
    },
    /// Basic LP relaxation value (of the minimal instance unless --raw).
    Blp {
        #[command(flatten)]
        io: Inputs,
        #[arg(long)]
        raw: bool,
    },
    /// Minimize, solve the relaxation and self-reduce to an assignment.
    Solve {
        #[command(flatten)]
        io: Inputs,
    },
    /// Search for a fractional polymorphism of a given arity and class.
    Analyze {
        lang: PathBuf,
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value = "cyclic")]
        class: OpClass,
        /// Operation table (space-separated labels) whose weight is maximized.
        #[arg(long)]
        target: Option<String>,
    },
    /// Rigid core of a language.
    Core {
        lang: PathBuf,
        #[arg(long)]
        lang_out: Option<PathBuf>,
    },
    /// Block-finite lifting of an instance.
    Lift {
        #[command(flatten)]
        io: Inputs,
        #[command(flatten)]
        out: Outputs,
    },
    /// Graph of generalized operations, its sinks and stationary weights.
    Opgraph {
        lang: PathBuf,
        /// Arity m of the generalized operations; generators come from a
        /// symmetric fractional polymorphism of arity m - 1.
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Use the min/max generators instead (m = 2).
        #[arg(long)]
        min_max: bool,
        /// Print the full graph.
        #[arg(long)]
        dump: bool,
        /// Support-expansion rounds towards the sink nodes.
        #[arg(long, default_value_t = 4)]
        rounds: usize,
    },
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Certification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::CapExceeded { .. }) => 3,
            Failure::Core(Error::Hypothesis(_)) | Failure::Certification(_) => 4,
            Failure::Core(_) | Failure::Io(..) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(p, e) => format!("{}: {e}", p.display()),
            Failure::Certification(m) => format!("certification failed: {m}"),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx {
    cfg: Config,
    report: Report,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> std::result::Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Io(path.to_path_buf(), e))?;
        self.report.input(path.display().to_string(), &bytes);
        String::from_utf8(bytes).map_err(|e| {
            Failure::Core(Error::Parse {
                line: 1,
                column: 1,
                message: format!("{}: not UTF-8: {e}", path.display()),
            })
        })
    }

    fn language(&mut self, path: &Path) -> std::result::Result<Language, Failure> {
        let text = self.read(path)?;
        parse_language(&text).map_err(|e| in_file(path, e))
    }

    fn inputs(&mut self, io: &Inputs) -> std::result::Result<(Language, Instance), Failure> {
        let lang = self.language(&io.lang)?;
        let text = self.read(&io.inst)?;
        let inst = parse_instance(&text, Some(&lang)).map_err(|e| in_file(&io.inst, e))?;
        Ok((lang, inst))
    }
}

fn in_file(path: &Path, e: Error) -> Failure {
    match e {
        Error::Parse {
            line,
            column,
            message,
        } => Failure::Core(Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        }),
        other => Failure::Core(other),
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Outcome {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| Failure::Io(p.clone(), e))?;
    }
    Ok(())
}

fn text_lines(s: &str) -> Vec<String> {
    s.lines().map(str::to_string).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = match Caps::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: VCSP_CAPS: {e}");
            return ExitCode::from(2);
        }
    };
    let exec = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        Some(1) => Exec::Sequential,
        Some(n) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("error: cannot size the thread pool: {e}");
                return ExitCode::from(2);
            }
            Exec::Parallel
        }
        None => Exec::Parallel,
    };
    let name = command_name(&cli.command);
    let mut ctx = Ctx {
        cfg: Config { caps, exec },
        report: Report::new(name),
    };
    let start = Instant::now();
    let outcome = run(&mut ctx, &cli.command);
    ctx.report.elapsed = Some(start.elapsed());
    match outcome {
        Ok(()) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&ctx.report.to_json()).expect("json")
                );
            } else {
                print!("{}", ctx.report.render_text());
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval { .. } => "eval",
        Command::Opt { .. } => "opt",
        Command::Feas { .. } => "feas",
        Command::Minimize { .. } => "minimize",
        Command::Blp { .. } => "blp",
        Command::Solve { .. } => "solve",
        Command::Analyze { .. } => "analyze",
        Command::Core { .. } => "core",
        Command::Lift { .. } => "lift",
        Command::Opgraph { .. } => "opgraph",
    }
}

fn run(ctx: &mut Ctx, command: &Command) -> Outcome {
    match command {
        Command::Eval { io, labels: raw } => {
            let (lang, inst) = ctx.inputs(io)?;
            let x = parse_assignment(&raw.join(" "), lang.domain_size())?;
            let value = evaluate(&lang, &inst, &Assignment(x.clone()))?;
            ctx.report
                .text("assignment", labels(&x))
                .text("value", value);
        }
        Command::Opt { io } => {
            let (lang, inst) = ctx.inputs(io)?;
            let opt = brute_opt_with(&lang, &inst, &ctx.cfg)?;
            ctx.report
                .text("value", &opt.value)
                .text("optimal_assignments", opt.argmin.len())
                .lines("argmin", opt.argmin.iter().map(|a| labels(&a.0)));
        }
        Command::Feas { io } => {
            let (lang, inst) = ctx.inputs(io)?;
            match solve_csp(&feas_language(&lang), &inst)? {
                Some(a) => {
                    if !evaluate(&lang, &inst, &a)?.is_finite() {
                        return Err(Failure::Certification(
                            "reported solution is infeasible".into(),
                        ));
                    }
                    ctx.report
                        .text("feasible", true)
                        .text("assignment", labels(&a.0));
                }
                None => {
                    ctx.report.text("feasible", false);
                }
            }
        }
        Command::Minimize { io, out } => {
            let (lang, inst) = ctx.inputs(io)?;
            let min = one_infty_minimize_with(&Backtracking, &lang, &inst, &ctx.cfg)?;
            let lang_text = print_language(&min.lang);
            let inst_text = print_instance(&min.inst);
            write_out(&out.lang_out, &lang_text)?;
            write_out(&out.inst_out, &inst_text)?;
            ctx.report
                .text("feasible", min.supported.first_empty().is_none())
                .lines(
                    "supported",
                    min.supported
                        .0
                        .iter()
                        .enumerate()
                        .map(|(v, ls)| format!("{v}: {}", labels(ls))),
                )
                .lines("language", text_lines(&lang_text))
                .lines("instance", text_lines(&inst_text));
        }
        Command::Blp { io, raw } => {
            let (lang, inst) = ctx.inputs(io)?;
            let (l, i) = if *raw {
                (lang, inst)
            } else {
                let min = one_infty_minimize_with(&Backtracking, &lang, &inst, &ctx.cfg)?;
                (min.lang, min.inst)
            };
            let res = blp_value_with(&l, &i, &ctx.cfg)?;
            if !verify_outcome(&res.lp, &res.outcome) {
                return Err(Failure::Certification(
                    "LP outcome failed verification".into(),
                ));
            }
            if let Some(sol) = &res.solution {
                if !sol.verify(&l, &i) {
                    return Err(Failure::Certification(
                        "BLP solution failed verification".into(),
                    ));
                }
            }
            ctx.report
                .text("program", if *raw { "raw" } else { "minimal" })
                .text("value", &res.value);
            if let Some(sol) = &res.solution {
                ctx.report.lines(
                    "alpha",
                    sol.alpha.iter().enumerate().map(|(v, a)| {
                        let ws: Vec<String> = a.iter().map(format_rational).collect();
                        format!("{v}: {}", ws.join(" "))
                    }),
                );
            }
        }
        Command::Solve { io } => {
            let (lang, inst) = ctx.inputs(io)?;
            let sol = solve_vcsp_with(&lang, &inst, &ctx.cfg)?;
            if sol.certified {
                let ok = match &sol.assignment {
                    Some(a) => evaluate(&lang, &inst, a)? == sol.value,
                    None => sol.value.is_infinite(),
                };
                if !ok {
                    return Err(Failure::Certification(
                        "certified assignment does not evaluate to the reported value".into(),
                    ));
                }
            }
            ctx.report.text("value", &sol.value).text(
                "assignment",
                sol.assignment
                    .as_ref()
                    .map_or_else(|| "none".to_string(), |a| labels(&a.0)),
            );
            ctx.report.text("certified", sol.certified);
            if !sol.diagnostics.is_empty() {
                ctx.report.lines("diagnostics", sol.diagnostics.clone());
            }
        }
        Command::Analyze {
            lang,
            arity,
            class,
            target,
        } => {
            let lang = ctx.language(lang)?;
            let target = match target {
                None => None,
                Some(t) => Some(Operation::new(
                    lang.domain_size(),
                    *arity,
                    parse_assignment(t, lang.domain_size())?,
                )?),
            };
            let rep = find_fracpol_with(&lang, *arity, *class, target.as_ref(), &ctx.cfg)?;
            if !rep.outcome_verified() {
                return Err(Failure::Certification(
                    "LP outcome failed verification".into(),
                ));
            }
            ctx.report
                .text("arity", arity)
                .text("class", class)
                .text("candidates", rep.candidates.len());
            match (&rep.fracop, rep.certificate()) {
                (Some(omega), _) => {
                    if !verify_fracpol_with(omega, &lang, &ctx.cfg) {
                        return Err(Failure::Certification(
                            "found operation fails the inequality".into(),
                        ));
                    }
                    ctx.report
                        .text("result", "found")
                        .lines("fracop", text_lines(&omega.to_string()));
                    if let Some(t) = &target {
                        ctx.report
                            .text("target_weight", format_rational(&omega.weight(t)));
                    }
                }
                (None, Some(farkas)) => {
                    ctx.report
                        .text("result", "none")
                        .text(
                            "certificate",
                            farkas
                                .iter()
                                .map(format_rational)
                                .collect::<Vec<_>>()
                                .join(" "),
                        )
                        .text("certificate_verified", true);
                }
                (None, None) => {
                    return Err(Failure::Certification(
                        "no operation and no certificate".into(),
                    ))
                }
            }
        }
        Command::Core { lang, lang_out } => {
            let lang = ctx.language(lang)?;
            let core = rigid_core_with(&lang, &ctx.cfg)?;
            let text = print_language(&core.lang);
            write_out(lang_out, &text)?;
            ctx.report
                .text("subdomain", labels(&core.subdomain))
                .text("map", &core.map)
                .lines("members", core.members.iter().map(ToString::to_string))
                .lines("language", text_lines(&text));
        }
        Command::Lift { io, out } => {
            let (lang, inst) = ctx.inputs(io)?;
            let min = one_infty_minimize_with(&Backtracking, &lang, &inst, &ctx.cfg)?;
            if let Some(v) = min.supported.first_empty() {
                ctx.report.text("feasible", false).text("empty_variable", v);
                return Ok(());
            }
            let lifted = lift_instance(&lang, &inst, &min.supported)?;
            let witnesses = block_witnesses(&lang, &inst, &lifted.domain)?;
            let check = check_block_finite(&lifted.lang, lifted.domain.blocks(), &witnesses)?;
            let lang_text = print_language(&lifted.lang);
            let inst_text = print_instance(&lifted.inst);
            write_out(&out.lang_out, &lang_text)?;
            write_out(&out.inst_out, &inst_text)?;
            ctx.report
                .text("feasible", true)
                .text("lifted_domain", lifted.domain.size())
                .text("block_finite", check.holds());
            if !check.failures.is_empty() {
                ctx.report
                    .lines("block_finite_failures", check.failures.clone());
            }
            ctx.report
                .lines("dom_map", text_lines(&lifted.domain.to_text()))
                .lines("language", text_lines(&lang_text))
                .lines("instance", text_lines(&inst_text));
        }
        Command::Opgraph {
            lang,
            arity,
            min_max,
            dump,
            rounds,
        } => {
            let lang = ctx.language(lang)?;
            opgraph(ctx, &lang, *arity, *min_max, *dump, *rounds)?;
        }
    }
    Ok(())
}

fn opgraph(
    ctx: &mut Ctx,
    lang: &Language,
    m: usize,
    min_max: bool,
    dump: bool,
    rounds: usize,
) -> Outcome {
    let k = lang.domain_size();
    let gens = if min_max {
        if m != 2 {
            return Err(Error::Invalid("min/max generators have arity 2".into()).into());
        }
        min_max_generators(k)?
    } else {
        if m < 2 {
            return Err(Error::Invalid("generalized operations need arity >= 2".into()).into());
        }
        let rep = find_fracpol_with(lang, m - 1, OpClass::Symmetric, None, &ctx.cfg)?;
        match rep.fracop {
            Some(omega) => generators_from_symmetric(&omega)?,
            None => {
                ctx.report.text("result", "none").text(
                    "reason",
                    format!("no symmetric fractional polymorphism of arity {}", m - 1),
                );
                return Ok(());
            }
        }
    };
    let general = verify_gen_fracpol_with(&gens, lang, &ctx.cfg);
    let strong = verify_generators_strong(&gens, lang);
    let graph = build_graph(&gens, ctx.cfg.caps.graph_nodes)?;
    let sinks = graph.sink_nodes();
    let st = graph.stationary_lambda()?;
    if !verify_outcome(&st.lp, &st.outcome)
        || !graph
            .stationarity_residual(&st)
            .iter()
            .all(|r| *r == int(0))
    {
        return Err(Failure::Certification(
            "stationary weights have a nonzero residual".into(),
        ));
    }
    ctx.report
        .text("result", "built")
        .text("arity", m)
        .lines("generators", text_lines(&gens.to_string()))
        .text("generators_verified", general)
        .text("generators_strong", strong)
        .text("nodes", graph.len())
        .text("components", graph.components().len())
        .text("sink_nodes", labels(&sinks))
        .text("closure", graph.check_closure())
        .text("fixed_points_n1", graph.check_fixed_points(1)?)
        .lines(
            "lambda",
            st.nodes
                .iter()
                .zip(&st.lambda)
                .map(|(g, l)| format!("{g}: {}", format_rational(l))),
        )
        .text("residual", "0");

    if general {
        let cols = tuple::count_u128(k, m);
        let mut plateau = Vec::new();
        for f in lang.functions() {
            let size = cols
                .saturating_pow(f.arity() as u32)
                .saturating_mul(sinks.len() as u128);
            if size > ctx.cfg.caps.brute_evals {
                plateau.push(format!("{}: skipped ({size} labelings)", f.name()));
                continue;
            }
            let flat = graph.check_plateau(f)?;
            let balanced = if strong {
                graph.check_lambda_balanced(&st, f)?.map(|_| "balanced")
            } else {
                Some("")
            };
            plateau.push(match (flat, balanced) {
                (Some(n), Some(b)) => format!(
                    "{}: ok ({n} labelings){}",
                    f.name(),
                    if b.is_empty() { "" } else { ", rows balanced" }
                ),
                (None, _) => format!("{}: plateau violated", f.name()),
                (_, None) => format!("{}: rows unbalanced", f.name()),
            });
        }
        ctx.report.lines("plateau", plateau);
    }

    let target = sinks.iter().copied().collect();
    let ex = graph.expand_support(&target, rounds)?;
    if general
        && !ex
            .trace
            .iter()
            .all(|r| verify_gen_fracpol_with(r, lang, &ctx.cfg))
    {
        return Err(Failure::Certification(
            "a support-expansion step fails the inequality".into(),
        ));
    }
    ctx.report
        .text("expansion_steps", ex.trace.len() - 1)
        .text("expansion_growth_steps", ex.growth_steps)
        .text("expansion_residual", format_rational(&ex.residual));
    if dump {
        ctx.report.lines("graph", text_lines(&graph.to_text()));
    }
    Ok(())
}
