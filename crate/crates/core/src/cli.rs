//! Command-line front end.
//!
//! Every artifact starts with the seed that produced it: a `# seed=<n>`
//! line in text and CSV output, a `seed` field in JSON output.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::excursion::{assign_signs, sample_brownian_excursion};
use crate::experiments::{
    discrete_moment_identity_check, extracted_tree_uniformity, lambda_estimate,
    leaf_uniformity_stat, occ_distribution, permuton_grid, sign_balance_test, task_rng,
    ExperimentReport, LambdaConfig, OccConfig, ShapeConfig,
};
use crate::moments::{expectation_lambda, joint_moment_with_budget, DEFAULT_PAIR_BUDGET};
use crate::perm::{occ_exact, occ_sample, Permutation};
use crate::rational::{format_fraction, to_f64, Rational};
use crate::sampler::{sample_schroder_tree, sample_separable};
use crate::tree::{decomposition_tree, SchroderTree, Sign, SignedTree};

/// Exit status for runtime errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit status for malformed command lines.
pub const EXIT_USAGE: i32 = 2;
/// Exit status when a moment computation exceeds its pair budget.
pub const EXIT_BUDGET: i32 = 3;

/// Separable permutations, Schröder trees, excursions and pattern moments.
#[derive(Debug, Parser)]
#[command(name = "permuton", version)]
pub struct RunConfig {
    /// Random seed; drawn from system entropy when absent.
    #[arg(long, global = true, env = "PERMUTON_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for experiments; defaults to all available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Uniform random separable permutation.
    SamplePerm {
        #[arg(long)]
        n: usize,
    },
    /// Uniform random Schröder tree, optionally with alternating signs.
    SampleTree {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        signed: bool,
    },
    /// Density of a pattern in a permutation, exact or sampled.
    Occ {
        #[arg(long)]
        pattern: String,
        /// Target permutation, or `@path` to read one from a file.
        #[arg(long)]
        perm: String,
        /// Estimate from this many random subsets instead of counting.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Signed decomposition tree of a separable permutation.
    Decompose {
        /// Permutation, or `@path` to read one from a file.
        #[arg(long)]
        perm: String,
    },
    /// Exact limit expectation of a pattern density.
    Expectation {
        #[arg(long)]
        pattern: String,
    },
    /// Exact limit moment of a pattern density.
    Moment {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
        budget: u128,
    },
    /// Exact joint limit moment of several pattern densities.
    Joint {
        /// Comma-separated patterns.
        #[arg(long, value_delimiter = ',')]
        patterns: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
        budget: u128,
    },
    /// Monte Carlo law of the limit density on signed Brownian excursions.
    LambdaEstimate {
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 500)]
        excursions: usize,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long, default_value_t = 10_000)]
        points: u64,
    },
    /// Pattern densities in random separable permutations.
    OccDist {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        perms: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Law of the shape spanned by random leaves of a random tree.
    TreeUniformity {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        shape: ShapeArgs,
    },
    /// Law of the signs spanned by random leaves, given their shape.
    SignBalance {
        /// Binary target shape such as `((L L) L)`.
        #[arg(long)]
        shape: String,
        #[command(flatten)]
        args: ShapeArgs,
    },
    /// Distance between the leaf distribution of random trees and the uniform law.
    LeafStat {
        /// Comma-separated tree sizes.
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000, 10_000])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Check of the product identity for pattern densities on all separable
    /// permutations of the given sizes.
    Identity {
        #[arg(long, value_delimiter = ',')]
        patterns: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values_t = [5usize, 6, 7, 8])]
        sizes: Vec<usize>,
    },
    /// Cell masses of the permuton of a permutation.
    Permuton {
        /// Permutation, or `@path`; a random separable one of size `--n` when absent.
        #[arg(long)]
        perm: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 10)]
        resolution: usize,
    },
    /// Discretized Brownian excursion with random signs on its minima.
    Excursion {
        #[arg(long, default_value_t = 1024)]
        grid: usize,
    },
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub subsets_per_tree: usize,
}

impl ShapeArgs {
    fn config(&self, seed: u64) -> ShapeConfig {
        ShapeConfig {
            n: self.n,
            trials: self.trials,
            subsets_per_tree: self.subsets_per_tree,
            seed,
        }
    }
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        _ => EXIT_ERROR,
    }
}

/// Reads a permutation in any format this tool prints: one line of values,
/// `index,value` CSV rows, or a JSON object with a `permutation` array.
/// Lines starting with `#` are ignored.
pub fn parse_permutation_text(text: &str) -> Result<Permutation> {
    let body: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let joined = body.join("\n");
    if joined.starts_with('{') {
        let v: serde_json::Value =
            serde_json::from_str(&joined).map_err(|e| Error::Parse(e.to_string()))?;
        let values = v["permutation"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing permutation array".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| Error::Parse("permutation values must be integers".into()))
            })
            .collect::<Result<Vec<u32>>>()?;
        return Permutation::new(values);
    }
    if body.first() == Some(&"index,value") {
        let values = body[1..]
            .iter()
            .map(|row| {
                row.split(',')
                    .nth(1)
                    .and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad row `{row}`")))
            })
            .collect::<Result<Vec<u32>>>()?;
        return Permutation::new(values);
    }
    match body.as_slice() {
        [line] => Permutation::parse_pattern(line),
        _ => Err(Error::Parse("expected a single permutation".into())),
    }
}

fn read_permutation(arg: &str) -> Result<Permutation> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidArgument(format!("{path}: {e}")))?;
            parse_permutation_text(&text)
        }
        None => Permutation::parse_pattern(arg),
    }
}

fn seed_line(seed: u64) -> String {
    format!("# seed={seed}\n")
}

fn fraction_line(q: &Rational) -> String {
    format!("{} {}", format_fraction(q), to_f64(q))
}

fn render_fraction(name: &str, q: &Rational, format: Format, extra: serde_json::Value) -> String {
    match format {
        Format::Text => fraction_line(q) + "\n",
        Format::Csv => format!("name,exact,value\n{name},{},{}\n", format_fraction(q), to_f64(q)),
        Format::Json => {
            let mut v = json!({ "exact": format_fraction(q), "value": to_f64(q) });
            if let (Some(obj), serde_json::Value::Object(more)) = (v.as_object_mut(), extra) {
                obj.extend(more);
            }
            format!("{v}\n")
        }
    }
}

fn render_permutation(p: &Permutation, seed: u64, format: Format) -> String {
    match format {
        Format::Text => format!("{}{p}\n", seed_line(seed)),
        Format::Csv => {
            let mut s = seed_line(seed) + "index,value\n";
            for (i, v) in p.values().iter().enumerate() {
                let _ = writeln!(s, "{},{v}", i + 1);
            }
            s
        }
        Format::Json => format!("{}\n", json!({ "seed": seed, "permutation": p.values() })),
    }
}

fn render_tree(
    tree: &SchroderTree,
    signs: Option<&[Option<Sign>]>,
    text: &str,
    seed: Option<u64>,
    format: Format,
) -> String {
    let header = seed.map(seed_line).unwrap_or_default();
    match format {
        Format::Text => format!("{header}{text}\n"),
        Format::Csv => {
            let mut s = header + "vertex,arity,sign\n";
            for (v, a) in tree.arities().iter().enumerate() {
                let sign = signs
                    .and_then(|x| x[v])
                    .map(|x| x.as_char().to_string())
                    .unwrap_or_default();
                let _ = writeln!(s, "{v},{a},{sign}");
            }
            s
        }
        Format::Json => {
            let mut v = json!({ "tree": text, "arities": tree.arities() });
            if let Some(seed) = seed {
                v["seed"] = json!(seed);
            }
            format!("{v}\n")
        }
    }
}

/// CSV header of raw experiment samples.
pub const SAMPLES_HEADER: &str = "index,value";
/// CSV header of experiment estimates.
pub const ESTIMATES_HEADER: &str = "name,value,std_error,reference";

fn render_report(report: &ExperimentReport, samples: Option<&[f64]>, format: Format) -> String {
    let seed = report.params.get("seed").and_then(|v| v.as_u64());
    let header = seed.map(seed_line).unwrap_or_default();
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => {
            let mut s = header;
            match samples {
                Some(xs) => {
                    s += SAMPLES_HEADER;
                    s.push('\n');
                    for (i, x) in xs.iter().enumerate() {
                        let _ = writeln!(s, "{i},{x}");
                    }
                }
                None => {
                    s += ESTIMATES_HEADER;
                    s.push('\n');
                    for e in &report.estimates {
                        let _ = writeln!(
                            s,
                            "\"{}\",{},{},{}",
                            e.name,
                            e.value,
                            e.std_error.map(|x| x.to_string()).unwrap_or_default(),
                            e.reference.as_ref().map(|r| r.exact.clone()).unwrap_or_default()
                        );
                    }
                }
            }
            s
        }
        Format::Text => {
            let mut s = header;
            let _ = writeln!(s, "experiment: {}", report.experiment);
            for (k, v) in &report.params {
                let _ = writeln!(s, "  {k} = {v}");
            }
            for e in &report.estimates {
                let _ = write!(s, "{}: {:.6}", e.name, e.value);
                if let Some(se) = e.std_error {
                    let _ = write!(s, " (se {se:.6})");
                }
                if let Some(r) = &e.reference {
                    let _ = write!(s, " [reference {} = {:.6}]", r.exact, r.value);
                }
                s.push('\n');
            }
            for c in &report.checks {
                let verdict = if c.passed { "pass" } else { "FAIL" };
                let _ = write!(s, "{verdict} {}: {}", c.name, c.detail);
                if let Some(p) = c.p_value {
                    let _ = write!(s, " (p = {p:.4})");
                }
                s.push('\n');
            }
            for n in &report.notes {
                let _ = writeln!(s, "note: {n}");
            }
            let _ = writeln!(s, "passed: {}", report.passed);
            s
        }
    }
}

fn patterns(list: &[String]) -> Result<Vec<Permutation>> {
    list.iter().map(|p| Permutation::parse_pattern(p)).collect()
}

/// Runs one command and returns the bytes to write.
pub fn dispatch(cfg: &RunConfig) -> Result<String> {
    let seed = cfg.seed.unwrap_or_else(rand::random);
    let format = cfg.format;
    let mut rng = task_rng(seed, 0);
    Ok(match &cfg.command {
        Command::SamplePerm { n } => {
            render_permutation(&sample_separable(*n, &mut rng)?, seed, format)
        }
        Command::SampleTree { n, signed } => {
            let t = sample_schroder_tree(*n, &mut rng)?;
            if *signed {
                let root = if rand::Rng::random::<bool>(&mut rng) {
                    Sign::Plus
                } else {
                    Sign::Minus
                };
                let st = SignedTree::alternating(t, root);
                render_tree(st.tree(), Some(st.signs()), &st.to_string(), Some(seed), format)
            } else {
                render_tree(&t, None, &t.to_string(), Some(seed), format)
            }
        }
        Command::Occ {
            pattern,
            perm,
            trials,
        } => {
            let (pi, sigma) = (Permutation::parse_pattern(pattern)?, read_permutation(perm)?);
            match trials {
                None => render_fraction("occ", &occ_exact(&pi, &sigma), format, json!({})),
                Some(t) => {
                    let x = occ_sample(&pi, &sigma, *t, &mut rng)?;
                    match format {
                        Format::Text => format!("{}{x}\n", seed_line(seed)),
                        Format::Csv => format!("{}name,value\nocc,{x}\n", seed_line(seed)),
                        Format::Json => format!("{}\n", json!({ "seed": seed, "value": x })),
                    }
                }
            }
        }
        Command::Decompose { perm } => {
            let sigma = read_permutation(perm)?;
            let st = decomposition_tree(&sigma)?;
            render_tree(st.tree(), Some(st.signs()), &st.to_string(), None, format)
        }
        Command::Expectation { pattern } => {
            let q = expectation_lambda(&Permutation::parse_pattern(pattern)?);
            render_fraction("expectation", &q, format, json!({ "pattern": pattern }))
        }
        Command::Moment {
            pattern,
            order,
            budget,
        } => {
            let p = Permutation::parse_pattern(pattern)?;
            let q = if *order == 0 {
                Rational::from_integer(1.into())
            } else {
                joint_moment_with_budget(&vec![p; *order], *budget)?
            };
            render_fraction(
                "moment",
                &q,
                format,
                json!({ "pattern": pattern, "order": order }),
            )
        }
        Command::Joint {
            patterns: list,
            budget,
        } => {
            let q = joint_moment_with_budget(&patterns(list)?, *budget)?;
            render_fraction("joint", &q, format, json!({ "patterns": list }))
        }
        Command::LambdaEstimate {
            pattern,
            excursions,
            grid,
            points,
        } => {
            let cfg = LambdaConfig {
                excursions: *excursions,
                grid: *grid,
                points_per_excursion: *points,
                seed,
                ..LambdaConfig::default()
            };
            let e = lambda_estimate(&Permutation::parse_pattern(pattern)?, &cfg)?;
            render_report(&e.report, Some(&e.samples()), format)
        }
        Command::OccDist {
            pattern,
            n,
            perms,
            trials,
        } => {
            let cfg = OccConfig {
                n: *n,
                perms: *perms,
                occ_trials: *trials,
                seed,
                ..OccConfig::default()
            };
            let d = occ_distribution(&Permutation::parse_pattern(pattern)?, &cfg)?;
            render_report(&d.report, Some(&d.samples), format)
        }
        Command::TreeUniformity { k, shape } => {
            render_report(&extracted_tree_uniformity(*k, &shape.config(seed))?, None, format)
        }
        Command::SignBalance { shape, args } => {
            let t0: SchroderTree = shape.parse()?;
            render_report(&sign_balance_test(&t0, &args.config(seed))?, None, format)
        }
        Command::LeafStat { sizes, trials } => {
            render_report(&leaf_uniformity_stat(sizes, *trials, seed)?, None, format)
        }
        Command::Identity {
            patterns: list,
            sizes,
        } => render_report(
            &discrete_moment_identity_check(&patterns(list)?, sizes)?,
            None,
            format,
        ),
        Command::Permuton {
            perm,
            n,
            resolution,
        } => {
            let (sigma, random) = match (perm, n) {
                (Some(p), _) => (read_permutation(p)?, false),
                (None, Some(n)) => (sample_separable(*n, &mut rng)?, true),
                (None, None) => {
                    return Err(Error::InvalidArgument("give --perm or --n".into()))
                }
            };
            let g = permuton_grid(&sigma, *resolution)?;
            let header = if random { seed_line(seed) } else { String::new() };
            match format {
                Format::Json => {
                    let mut v = json!({
                        "resolution": g.resolution,
                        "denominator": g.denominator,
                        "numerators": g.numerators,
                    });
                    if random {
                        v["seed"] = json!(seed);
                    }
                    format!("{v}\n")
                }
                _ => {
                    let mut s = header;
                    for row in g.densities() {
                        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                        let sep = if format == Format::Csv { "," } else { " " };
                        s += &cells.join(sep);
                        s.push('\n');
                    }
                    s
                }
            }
        }
        Command::Excursion { grid } => {
            let f = sample_brownian_excursion(*grid, &mut rng)?;
            let s = assign_signs(f, &mut rng);
            let values = s.excursion().values();
            let sign_text =
                |i: usize| s.sign_at(i).map(|x| x.as_char().to_string()).unwrap_or_default();
            match format {
                Format::Json => {
                    let signs: Vec<String> = (0..values.len()).map(sign_text).collect();
                    format!(
                        "{}\n",
                        json!({ "seed": seed, "grid": grid, "values": values, "signs": signs })
                    )
                }
                _ => {
                    let mut out = seed_line(seed) + "index,value,sign\n";
                    for (i, v) in values.iter().enumerate() {
                        let _ = writeln!(out, "{i},{v},{}", sign_text(i));
                    }
                    out
                }
            }
        }
    })
}

/// Parses `args`, runs the command and writes its output; returns the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    }
    let out = match dispatch(&cfg) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, out),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(out.as_bytes())
        }
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cfg(args: &[&str]) -> Result<String> {
        let mut full = vec!["permuton"];
        full.extend_from_slice(args);
        dispatch(&RunConfig::try_parse_from(full).unwrap())
    }

    #[test]
    fn exact_outputs() {
        assert_eq!(run_cfg(&["expectation", "--pattern", "132"]).unwrap(), "1/8 0.125\n");
        let joint = run_cfg(&["joint", "--patterns", "12,123"]).unwrap();
        assert!(joint.starts_with("43/280 "));
        let m = run_cfg(&["moment", "--pattern", "12", "--order", "2"]).unwrap();
        assert!(m.starts_with("17/60 "));
    }

    #[test]
    fn decompose_rejects_non_separable() {
        let e = run_cfg(&["decompose", "--perm", "2 4 1 3"]).unwrap_err();
        assert!(e.to_string().contains("not separable"));
        assert_eq!(exit_code(&e), EXIT_ERROR);
    }

    #[test]
    fn budget_has_its_own_code() {
        let e = run_cfg(&["moment", "--pattern", "12", "--order", "4", "--budget", "10"])
            .unwrap_err();
        assert_eq!(exit_code(&e), EXIT_BUDGET);
    }

    #[test]
    fn permutation_formats_round_trip() {
        for format in ["text", "csv", "json"] {
            let out = run_cfg(&["sample-perm", "--n", "12", "--seed", "5", "--format", format])
                .unwrap();
            assert!(out.contains('5'));
            let p = parse_permutation_text(&out).unwrap();
            assert_eq!(p.size(), 12);
            let text = run_cfg(&["sample-perm", "--n", "12", "--seed", "5"]).unwrap();
            assert_eq!(p, parse_permutation_text(&text).unwrap());
        }
    }

    #[test]
    fn tree_text_round_trips() {
        let out = run_cfg(&["sample-tree", "--n", "9", "--signed", "--seed", "2"]).unwrap();
        let line = out.lines().nth(1).unwrap();
        let t: SignedTree = line.parse().unwrap();
        assert_eq!(t.to_string(), line);
        assert!(t.is_alternating());
    }

    #[test]
    fn seeded_output_is_reproducible() {
        let a = run_cfg(&["excursion", "--grid", "64", "--seed", "8", "--format", "csv"]).unwrap();
        let b = run_cfg(&["excursion", "--grid", "64", "--seed", "8", "--format", "csv"]).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("# seed=8\nindex,value,sign\n"));
    }

    #[test]
    fn permuton_matrix() {
        let out = run_cfg(&["permuton", "--perm", "12", "--resolution", "2", "--format", "csv"])
            .unwrap();
        assert_eq!(out, "0.5,0\n0,0.5\n");
    }
}
