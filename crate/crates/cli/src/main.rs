use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use subseed::automata::{aho_corasick, minimize, DEFAULT_FRAGMENT_BUDGET};
use subseed::design::{
    self, automaton_stats, best_seeds, BoundaryRule, Counting, GlyphCount, SeedSearchSpec,
    Weighting,
};
use subseed::oracle::{brute_language_membership, brute_sensitivity, DEFAULT_ENUMERATION_BUDGET};
use subseed::seed_automaton::{build_seed_dfa, TransitionTables};
use subseed::sensitivity::{sensitivity, sensitivity_with_target, SensitivityResult};
use subseed::transducer::{self, load_model, parse_bernoulli_spec, train_counts, NtInit, TrainKind};
use subseed::{Dfa, Error, ErrorClass, ProbabilityTransducer, SeedAlphabet, SubsetSeed};

#[derive(Parser)]
#[command(name = "subseed", version, about = "Subset seed automata and sensitivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ModelArgs {
    /// builtin:dt1, builtin:dt2, builtin:nt, bernoulli:1=0.7,h=0.2,0=0.1, or a model file
    #[arg(long)]
    model: String,
    /// Initial state convention of the nt model
    #[arg(long, default_value = "stationary")]
    nt_init: NtInit,
}

#[derive(clap::Args)]
struct AlphabetArg {
    /// Preset name (dna3, binary) or seed alphabet file
    #[arg(long, default_value = "dna3")]
    alphabet: String,
}

#[derive(Subcommand)]
enum Command {
    /// Sensitivity of one seed
    Sensitivity {
        #[arg(long)]
        seed: String,
        #[command(flatten)]
        alphabet: AlphabetArg,
        #[command(flatten)]
        model: ModelArgs,
        /// Target alignment length
        #[arg(long)]
        length: Option<usize>,
        /// Target DFA file (finite language) instead of a length
        #[arg(long, conflicts_with = "length")]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        precision: usize,
        /// Tab-separated output with a header line
        #[arg(long)]
        tsv: bool,
    },
    /// Rank every seed of a family by sensitivity
    Design {
        /// Number of '#'
        #[arg(long)]
        weight: usize,
        /// Glyph counts, e.g. '@=2' or '@=2,_=*' ('*' = free)
        #[arg(long, default_value = "")]
        glyphs: String,
        #[arg(long)]
        span_min: Option<usize>,
        #[arg(long)]
        span_max: usize,
        #[arg(long, value_enum, default_value_t = Boundary::HashEnds)]
        boundary: Boundary,
        #[command(flatten)]
        alphabet: AlphabetArg,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 10)]
        top: usize,
        /// Worker threads (default: all cores)
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value_t = 4)]
        precision: usize,
    },
    /// Average automaton sizes over a seed family
    Stats {
        #[arg(long, value_enum)]
        family: Family,
        /// Number of '#'
        #[arg(long)]
        weight: usize,
        /// Number of '@' (subset family)
        #[arg(long, default_value_t = 2)]
        jokers: usize,
        #[arg(long)]
        span_max: usize,
        #[arg(long, value_enum, default_value_t = Boundary::HashEnds)]
        boundary: Boundary,
        #[arg(long)]
        jobs: Option<usize>,
        /// Also list every seed
        #[arg(long)]
        per_seed: bool,
    },
    /// Estimate model parameters from alignment words (one per line)
    Train {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// Build and export one seed automaton
    Automaton {
        #[arg(long)]
        seed: String,
        #[arg(long, value_enum, default_value_t = AutomatonKind::Subset)]
        kind: AutomatonKind,
        #[arg(long, value_enum, default_value_t = Emit::Dot)]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// Brute-force reference values
    Oracle {
        #[arg(long)]
        seed: String,
        #[command(flatten)]
        alphabet: AlphabetArg,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        length: usize,
        /// List the hit words instead of the sensitivity
        #[arg(long)]
        words: bool,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u128,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Boundary {
    HashEnds,
    SolidEnds,
    Free,
}

impl From<Boundary> for BoundaryRule {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::HashEnds => BoundaryRule::HashEnds,
            Boundary::SolidEnds => BoundaryRule::SolidEnds,
            Boundary::Free => BoundaryRule::Free,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Spaced,
    Subset,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Bernoulli,
    Dt1,
    Dt2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AutomatonKind {
    Subset,
    Aho,
    Minimized,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dot,
    Text,
    /// Transition tables of the subset construction
    Tables,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Data => 2,
                ErrorClass::Resource => 3,
            })
        }
    }
}

fn run(command: Command) -> subseed::Result<()> {
    match command {
        Command::Sensitivity {
            seed,
            alphabet,
            model,
            length,
            target,
            precision,
            tsv,
        } => {
            let sa = seed_alphabet(&alphabet.alphabet)?;
            let seed = SubsetSeed::parse(&seed, &sa)?;
            let g = model_from(&model, &sa)?;
            let r = match (length, target) {
                (Some(n), None) => sensitivity(&seed, &g, n)?,
                (None, Some(path)) => {
                    let t = Dfa::from_text(&read(&path)?, Some(sa.alignment()))?;
                    sensitivity_with_target(&seed, &g, &t)?
                }
                _ => {
                    return Err(Error::InvalidArgument(
                        "give exactly one of --length and --target".into(),
                    ))
                }
            };
            print_result(&seed.text(), &r, precision, tsv);
            Ok(())
        }
        Command::Design {
            weight,
            glyphs,
            span_min,
            span_max,
            boundary,
            alphabet,
            model,
            length,
            top,
            jobs,
            precision,
        } => {
            let sa = seed_alphabet(&alphabet.alphabet)?;
            let g = model_from(&model, &sa)?;
            let mut spec = SeedSearchSpec::new(sa, weight, span_max);
            for (glyph, count) in parse_glyph_counts(&glyphs)? {
                spec = spec.with_count(glyph, count);
            }
            if let Some(s) = span_min {
                spec.span_min = s;
            }
            spec.boundary = boundary.into();
            spec.top_k = top;
            let total = design::count_seeds(&spec)?;
            eprintln!("evaluating {total} seeds");
            let ranked = best_seeds(&spec, &g, length, jobs)?;
            println!("rank\tseed\tsensitivity");
            for (i, r) in ranked.iter().enumerate() {
                println!("{}\t{}\t{:.*}", i + 1, r.seed, precision, r.result.sensitivity);
            }
            Ok(())
        }
        Command::Stats {
            family,
            weight,
            jokers,
            span_max,
            boundary,
            jobs,
            per_seed,
        } => {
            let spec = match family {
                Family::Spaced => SeedSearchSpec::new(SeedAlphabet::binary(), weight, span_max),
                Family::Subset => SeedSearchSpec::new(SeedAlphabet::dna3(), weight, span_max)
                    .with_count('@', GlyphCount::Exact(jokers)),
            };
            let spec = SeedSearchSpec {
                boundary: boundary.into(),
                ..spec
            };
            let stats = automaton_stats(&spec, jobs)?;
            for s in &stats.skipped {
                eprintln!("warning: skipped {}: {}", s.seed, s.reason);
            }
            println!("seeds\t{}", stats.per_seed.len());
            println!("spans\t{}..{}", spec.span_min, spec.span_max);
            println!("counting\tweighting\taho_corasick\tdelta\tsubset\tdelta\tminimized");
            for (counting, cname) in [(Counting::AllStates, "all"), (Counting::NonFinal, "non_final")] {
                for (weighting, wname) in [(Weighting::PerSeed, "per_seed"), (Weighting::PerSpan, "per_span")] {
                    if let Some(a) = stats.average(counting, weighting) {
                        let (dac, ds) = a.ratios();
                        println!(
                            "{cname}\t{wname}\t{:.2}\t{dac:.2}\t{:.2}\t{ds:.2}\t{:.2}",
                            a.aho_corasick, a.subset, a.minimized
                        );
                    }
                }
            }
            if per_seed {
                println!();
                println!("seed\tspan\taho_corasick\tsubset\tminimized");
                for s in &stats.per_seed {
                    println!(
                        "{}\t{}\t{}\t{}\t{}",
                        s.seed, s.span, s.aho_corasick, s.subset, s.minimized
                    );
                }
            }
            Ok(())
        }
        Command::Train {
            kind,
            input,
            out,
            alphabet,
        } => {
            let sa = seed_alphabet(&alphabet.alphabet)?;
            let a = sa.alignment();
            let text = read(&input)?;
            let words = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| a.parse_word(l))
                .collect::<subseed::Result<Vec<_>>>()?;
            let kind = match kind {
                Kind::Bernoulli => TrainKind::Bernoulli,
                Kind::Dt1 => TrainKind::Dt1,
                Kind::Dt2 => TrainKind::Dt2,
            };
            let trained = train_counts(kind, &words, a)?;
            for w in &trained.warnings {
                eprintln!("warning: {w}");
            }
            emit(out.as_deref(), &trained.to_text(a))
        }
        Command::Automaton {
            seed,
            kind,
            emit: what,
            out,
            alphabet,
        } => {
            let sa = seed_alphabet(&alphabet.alphabet)?;
            let seed = SubsetSeed::parse(&seed, &sa)?;
            let name = seed.text();
            let (text, states, transitions) = if what == Emit::Tables {
                let t = TransitionTables::new(&seed);
                (t.dump(sa.alignment().symbols()), None, None)
            } else {
                let built = build_seed_dfa(&seed)?;
                let dfa = match kind {
                    AutomatonKind::Subset => built.dfa().clone(),
                    AutomatonKind::Aho => aho_corasick(&seed, DEFAULT_FRAGMENT_BUDGET)?,
                    AutomatonKind::Minimized => minimize(built.dfa()),
                };
                let text = match (what, kind) {
                    (Emit::Dot, AutomatonKind::Subset) => built.to_dot(&name),
                    (Emit::Dot, _) => dfa.to_dot(&name),
                    _ => dfa.to_text(),
                };
                (text, Some(dfa.num_states()), Some(dfa.num_transitions()))
            };
            emit(out.as_deref(), &text)?;
            if let (Some(s), Some(t)) = (states, transitions) {
                let line = format!("states {s}\ntransitions {t}");
                if out.is_some() {
                    println!("{line}");
                } else {
                    eprintln!("{line}");
                }
            }
            Ok(())
        }
        Command::Oracle {
            seed,
            alphabet,
            model,
            length,
            words,
            budget,
        } => {
            let sa = seed_alphabet(&alphabet.alphabet)?;
            let seed = SubsetSeed::parse(&seed, &sa)?;
            if words {
                for w in brute_language_membership(&seed, length, budget)? {
                    println!("{}", sa.alignment().render(&w));
                }
            } else {
                let g = model_from(&model, &sa)?;
                println!("{}", brute_sensitivity(&seed, &g, length, budget)?);
            }
            Ok(())
        }
    }
}

fn print_result(seed: &str, r: &SensitivityResult, precision: usize, tsv: bool) {
    if tsv {
        println!("seed\tnumerator\tdenominator\tsensitivity");
        println!(
            "{seed}\t{:.*}\t{:.*}\t{:.*}",
            precision, r.numerator, precision, r.denominator, precision, r.sensitivity
        );
    } else {
        println!("numerator   {:.*}", precision, r.numerator);
        println!("denominator {:.*}", precision, r.denominator);
        println!("sensitivity {:.*}", precision, r.sensitivity);
    }
}

fn seed_alphabet(name: &str) -> subseed::Result<SeedAlphabet> {
    match SeedAlphabet::preset(name) {
        Some(a) => Ok(a),
        None if Path::new(name).exists() => SeedAlphabet::parse_config(&read(Path::new(name))?),
        None => Err(Error::InvalidArgument(format!(
            "'{name}' is neither a preset (dna3, binary) nor a file"
        ))),
    }
}

fn model_from(args: &ModelArgs, sa: &SeedAlphabet) -> subseed::Result<ProbabilityTransducer> {
    let a = sa.alignment();
    if let Some(name) = args.model.strip_prefix("builtin:") {
        transducer::builtin(name, a, args.nt_init)
    } else if let Some(spec) = args.model.strip_prefix("bernoulli:") {
        transducer::bernoulli(a, &parse_bernoulli_spec(spec, a)?)
    } else {
        load_model(&read(Path::new(&args.model))?, a, args.nt_init)
    }
}

fn parse_glyph_counts(text: &str) -> subseed::Result<Vec<(char, GlyphCount)>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|part| {
            let bad = || Error::InvalidArgument(format!("bad glyph count '{part}'"));
            let (g, c) = part.split_once('=').ok_or_else(bad)?;
            let mut chars = g.trim().chars();
            let glyph = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(bad()),
            };
            let count = match c.trim() {
                "*" => GlyphCount::Free,
                n => GlyphCount::Exact(n.parse().map_err(|_| bad())?),
            };
            Ok((glyph, count))
        })
        .collect()
}

fn read(path: &Path) -> subseed::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> subseed::Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
