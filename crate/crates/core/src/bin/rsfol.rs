use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rsfol::eval::{bench_compare, evaluate, BenchQuery};
use rsfol::fixtures;
use rsfol::fol::{clause_groups, complexity_counts, normalize, parse_query, ConjunctiveQuery};
use rsfol::geometry::PredicateContext;
use rsfol::inference::{hypothesis_count, score_query, Scene, DEFAULT_FLOOR, DEFAULT_NAIVE_BUDGET};
use rsfol::retrieval::{
    explain, flooded_area_m2, load_corpus, parse_query_file, retrieve, Corpus, GroundTruth, RankedRun, RetrieveOptions,
};
use rsfol::translate::{offline_translate, translate, HttpChatClient, OfflineClient, TranslatorConfig};
use rsfol::vocab::{VocabProfile, Vocabulary};

#[derive(Parser)]
#[command(name = "rsfol", version, about = "Retrieve remote-sensing scenes with first-order-logic queries")]
struct Cli {
    /// Object vocabulary.
    #[arg(long, global = true, default_value = "dota")]
    vocab_profile: VocabProfile,
    /// Minimum detection confidence for candidates.
    #[arg(long, global = true, default_value_t = DEFAULT_FLOOR)]
    floor: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of a FOL expression or a supported sentence.
    Parse {
        input: String,
        /// Only accept FOL syntax.
        #[arg(long)]
        fol: bool,
    },
    /// Translate a sentence to FOL through a chat backend.
    Translate {
        query: String,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Score one query against one scene of a corpus.
    Score {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        image: String,
        #[arg(long)]
        query: String,
        /// Parse the query as FOL instead of translating it offline.
        #[arg(long)]
        fol: bool,
    },
    /// Rank a corpus for every query of a query file.
    Retrieve {
        #[arg(long)]
        corpus: PathBuf,
        /// Lines of `id<TAB>level<TAB>query`.
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        fol: bool,
        #[arg(long, default_value_t = 10)]
        topk: usize,
        /// Scoring threads; defaults to the number of CPUs.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explain one image of a saved run.
    Explain {
        #[arg(long)]
        corpus: PathBuf,
        /// Output of `retrieve`.
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        query_id: String,
        #[arg(long)]
        image: String,
    },
    /// Compute retrieval metrics for saved runs.
    Eval {
        #[arg(long)]
        runs: PathBuf,
        /// JSON map of query id to relevant image ids.
        #[arg(long)]
        ground_truth: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
        ks: Vec<usize>,
        /// Number of image-uncertainty bins.
        #[arg(long, default_value_t = 2)]
        bins: usize,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Time factorized against naive scoring.
    Bench {
        /// Corpus to use; defaults to generated fixtures.
        #[arg(long, requires = "queries")]
        corpus: Option<PathBuf>,
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        fol: bool,
        /// Seed for the generated random scenes.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_NAIVE_BUDGET)]
        budget: u128,
    },
    /// Flooded area in square meters per scene.
    FloodArea {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "road_flooded")]
        label: String,
    },
    /// Write a generated corpus as JSON.
    Fixture {
        kind: FixtureKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scene count for `random`.
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureKind {
    Planes,
    Hundred,
    Flood,
    Random,
}

#[derive(Args)]
struct BackendArgs {
    /// Use the built-in pattern translator instead of a remote model.
    #[arg(long)]
    offline: bool,
    #[arg(long, default_value_t = TranslatorConfig::default().endpoint)]
    endpoint: String,
    #[arg(long, default_value_t = TranslatorConfig::default().model)]
    model: String,
    /// Environment variable holding the API key.
    #[arg(long, default_value_t = TranslatorConfig::default().api_key_env)]
    api_key_env: String,
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0.7)]
    temperature: f64,
    /// Per-request timeout in seconds.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn resolve_query(text: &str, fol: bool, v: &Vocabulary) -> Result<ConjunctiveQuery> {
    if fol {
        Ok(normalize(&parse_query(text)?, v)?)
    } else {
        Ok(offline_translate(text, v)?)
    }
}

fn read_runs(path: &Path) -> Result<Vec<RankedRun>> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing runs in {}", path.display()))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let vocab = Vocabulary::profile(cli.vocab_profile);
    let ctx = PredicateContext::default();
    if !(0.0..=1.0).contains(&cli.floor) {
        bail!("--floor must lie in [0, 1]");
    }
    match cli.command {
        Command::Parse { input, fol } => {
            let q = match parse_query(&input) {
                Ok(q) => normalize(&q, &vocab)?,
                Err(e) if fol => return Err(e.into()),
                Err(_) => offline_translate(&input, &vocab)?,
            };
            #[derive(Serialize)]
            struct Parsed {
                canonical: String,
                groups: Vec<Vec<String>>,
                complexity: rsfol::fol::ComplexityCounts,
            }
            print_json(&Parsed {
                canonical: q.render(),
                groups: clause_groups(&q).iter().map(|g| g.variables.iter().map(|v| v.to_string()).collect()).collect(),
                complexity: complexity_counts(&q),
            })
        }
        Command::Translate { query, backend } => {
            let config = TranslatorConfig {
                endpoint: backend.endpoint,
                model: backend.model,
                api_key_env: backend.api_key_env,
                samples: backend.samples,
                temperature: backend.temperature,
                timeout: Duration::from_secs(backend.timeout),
            };
            let result = if backend.offline {
                translate(&query, &OfflineClient::new(vocab.clone()), &config, &vocab)?
            } else {
                translate(&query, &HttpChatClient::new(&config), &config, &vocab)?
            };
            print_json(&result)
        }
        Command::Score { corpus, image, query, fol } => {
            let corpus = load_corpus(&corpus, &vocab)?;
            let scene = corpus.get(&image).with_context(|| format!("image `{image}` not in corpus"))?;
            let q = resolve_query(&query, fol, &vocab)?;
            #[derive(Serialize)]
            struct Scored {
                query: String,
                #[serde(flatten)]
                scored: rsfol::inference::ScoredImage,
                hypotheses: rsfol::inference::HypothesisCount,
            }
            print_json(&Scored {
                query: q.render(),
                scored: score_query(&q, scene, &ctx, cli.floor)?,
                hypotheses: hypothesis_count(&q, scene, cli.floor),
            })
        }
        Command::Retrieve { corpus, queries, fol, topk, workers, out } => {
            let corpus = load_corpus(&corpus, &vocab)?;
            let specs = parse_query_file(&read(&queries)?)?;
            let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.unwrap_or(0)).build()?;
            let opts = RetrieveOptions { k: topk, floor: cli.floor, ctx, parallel: true };
            let mut runs = Vec::with_capacity(specs.len());
            for spec in &specs {
                let q = resolve_query(&spec.text, fol, &vocab).with_context(|| format!("query `{}`", spec.id))?;
                let mut run = pool.install(|| retrieve(&spec.id, &q, &corpus, &opts))?;
                run.level = Some(spec.level);
                runs.push(run);
            }
            let text = serde_json::to_string_pretty(&runs)?;
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Explain { corpus, runs, query_id, image } => {
            let corpus = load_corpus(&corpus, &vocab)?;
            let runs = read_runs(&runs)?;
            let run = runs.iter().find(|r| r.query_id == query_id).with_context(|| format!("no run for `{query_id}`"))?;
            print_json(&explain(run, &corpus, &image)?)
        }
        Command::Eval { runs, ground_truth, queries, corpus, ks, bins, csv } => {
            let corpus = load_corpus(&corpus, &vocab)?;
            let runs = read_runs(&runs)?;
            let specs = parse_query_file(&read(&queries)?)?;
            let gt = GroundTruth::from_json_str(&read(&ground_truth)?, &specs)?;
            let report = evaluate(&runs, &gt, &corpus, &ks, bins)?;
            if let Some(path) = csv {
                fs::write(&path, report.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
            print_json(&report)
        }
        Command::Bench { corpus, queries, fol, seed, budget } => {
            let (corpus, bench_queries) = match (corpus, queries) {
                (Some(c), Some(q)) => {
                    let corpus = load_corpus(&c, &vocab)?;
                    let qs = parse_query_file(&read(&q)?)?
                        .into_iter()
                        .map(|s| Ok(BenchQuery { query: resolve_query(&s.text, fol, &vocab)?, id: s.id, level: s.level }))
                        .collect::<Result<Vec<_>>>()?;
                    (corpus, qs)
                }
                _ => default_bench(seed)?,
            };
            print_json(&bench_compare(&corpus, &bench_queries, &ctx, cli.floor, budget)?)
        }
        Command::FloodArea { corpus, label } => {
            let corpus = load_corpus(&corpus, &vocab)?;
            let areas = corpus
                .scenes()
                .iter()
                .map(|s| Ok((s.image_id.clone(), flooded_area_m2(s, &label)?)))
                .collect::<Result<std::collections::BTreeMap<_, _>>>()?;
            print_json(&areas)
        }
        Command::Fixture { kind, seed, count } => {
            let corpus = match kind {
                FixtureKind::Planes => Corpus::from_scenes(vec![fixtures::plane_scene()])?,
                FixtureKind::Hundred => Corpus::from_scenes(vec![fixtures::hypothesis_scene()])?,
                FixtureKind::Flood => fixtures::flood_corpus(),
                FixtureKind::Random => {
                    let scenes: Vec<Scene> = fixtures::random_instances(seed, count).into_iter().map(|(s, _)| s).collect();
                    Corpus::from_scenes(scenes)?
                }
            };
            println!("{}", corpus.to_json());
            Ok(())
        }
    }
}

/// Level-tagged queries over the plane scene, the 100-detection scene and a
/// few random scenes.
fn default_bench(seed: u64) -> Result<(Corpus, Vec<BenchQuery>)> {
    let mut scenes = vec![fixtures::plane_scene(), fixtures::hypothesis_scene()];
    scenes.extend(fixtures::random_instances(seed, 5).into_iter().map(|(s, _)| s));
    let v = Vocabulary::dota();
    let texts = [
        (1, "plane(a)"),
        (2, "plane(a) AND plane(b) AND left_of(a, b)"),
        (3, "ship(a) AND ship(b) AND car(c) AND is_close(a, b) AND left_of(b, c)"),
        (4, "car(a) AND car(b) AND car(c) AND truck(d) AND is_close(a, b) AND is_close(b, c) AND left_of(c, d)"),
    ];
    let mut queries: Vec<BenchQuery> = texts
        .iter()
        .enumerate()
        .map(|(i, (level, t))| Ok(BenchQuery { id: format!("b{}", i + 1), level: *level, query: normalize(&parse_query(t)?, &v)? }))
        .collect::<Result<_>>()?;
    queries.push(BenchQuery { id: "b5".into(), level: 5, query: fixtures::hypothesis_query() });
    Ok((Corpus::from_scenes(scenes)?, queries))
}
