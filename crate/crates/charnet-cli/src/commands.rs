//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::Path;

use charnet::corpus::{self, Corpus, OccurrenceUnit};
use charnet::dynamics::{self, AttachmentKind};
use charnet::fitting::{self, TailSide};
use charnet::gender;
use charnet::graph::{
    self, arc_graph, build_bipartite, build_graph, filter_graph, read_edge_list, CharacterGraph,
    FilterSpec,
};
use charnet::metrics;
use charnet::nullmodels::{self, SmallWorldFactors};
use charnet::robustness::{attack, AttackStrategy};
use charnet::typology::{classify_arc, TypologyThresholds};

use crate::output::{
    fmt_f64, fmt_opt, model_row, print_artifact, summary_row, Sink, MODEL_COLUMNS, SUMMARY_COLUMNS,
};
use crate::{Cli, CliError, Command, OutputFormat};

fn filter_spec(cli: &Cli) -> FilterSpec {
    FilterSpec {
        min_occurrences: cli.occ_min,
        min_degree: cli.deg_min,
        keep_giant_only: cli.giant_only,
        sequential_degree: cli.seq_degree,
    }
}

fn load_corpus(cli: &Cli) -> Result<Corpus, CliError> {
    if !cli.input.is_dir() {
        return Err(CliError::Input(format!(
            "input directory `{}` does not exist",
            cli.input.display()
        )));
    }
    Ok(corpus::parse_corpus(&cli.input)?)
}

fn parse_window(cli: &Cli, scene_count: usize) -> Result<(usize, usize), CliError> {
    match &cli.window {
        None => {
            let t1 = scene_count;
            Ok((t1 / 2, t1))
        }
        Some(spec) => {
            let (a, b) = spec.split_once(':').ok_or_else(|| {
                CliError::Input(format!("--window expects T0:T1, found `{spec}`"))
            })?;
            let t0 = a
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad window start `{a}`")))?;
            let t1 = b
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad window end `{b}`")))?;
            Ok((t0, t1))
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate => validate(&cli),
        Command::Extract => extract(&cli),
        Command::Filter => filter(&cli),
        Command::Stats { edgelist } => stats(&cli, edgelist.as_deref()),
        Command::Fit { bootstrap } => fit(&cli, *bootstrap),
        Command::Null => null_models(&cli),
        Command::Dynamics { sample_every } => dynamics_cmd(&cli, *sample_every),
        Command::Attack {
            strategy,
            max_fraction,
            step,
        } => attack_cmd(&cli, strategy.as_deref(), *max_fraction, *step),
        Command::Gender => gender_cmd(&cli),
        Command::Typology => typology_cmd(&cli),
        Command::Report => report(&cli),
        Command::Import {
            from,
            mapping,
            builtin_arcs,
        } => import(&cli, from, mapping, *builtin_arcs),
    }
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    println!(
        "corpus `{}`: {} characters, {} volumes, {} scenes, {} arcs",
        corpus.name(),
        corpus.characters().len(),
        corpus.volumes().len(),
        corpus.scenes().len(),
        corpus.arcs().len(),
    );
    println!(
        "{} pages, {} panels across all volumes",
        corpus.total_pages(),
        corpus.total_panels()
    );
    let counts = corpus.occurrence_counts(OccurrenceUnit::Scene);
    let isolated = counts.values().filter(|&&c| c == 0).count();
    if isolated > 0 {
        println!("note: {isolated} characters never appear in any scene");
    }
    if let Ok(tau) = corpus.scene_size_length_correlation() {
        println!("scene length vs participant count: tau = {tau:.4}");
    }
    println!("validation passed");
    Ok(())
}

fn extract(cli: &Cli) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "extract")?;
    let g = build_graph(&corpus, None);
    let edges = sink.path("edges.tsv");
    graph::write_edge_list(&g, &edges, sink.header_lines())?;
    print_artifact(&edges);
    let vertices = sink.path("vertices.tsv");
    graph::write_vertex_table(&g, &vertices, sink.header_lines())?;
    print_artifact(&vertices);
    println!("extracted graph: n={}, m={}", g.vertex_count(), g.edge_count());
    Ok(())
}

fn filter(cli: &Cli) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "filter")?;
    let (g, report) = filter_graph(&corpus, &filter_spec(cli));
    let edges = sink.path("filtered_edges.tsv");
    graph::write_edge_list(&g, &edges, sink.header_lines())?;
    print_artifact(&edges);
    let vertices = sink.path("filtered_vertices.tsv");
    graph::write_vertex_table(&g, &vertices, sink.header_lines())?;
    print_artifact(&vertices);
    match cli.format {
        OutputFormat::Json => {
            print_artifact(&sink.write_json("filter_report.json", &report)?);
        }
        OutputFormat::Csv => {
            let ct = report.cross_tab;
            let rows = vec![
                format!("low_degree_low_occ,{}", ct.low_degree_low_occ),
                format!("low_degree_high_occ,{}", ct.low_degree_high_occ),
                format!("high_degree_low_occ,{}", ct.high_degree_low_occ),
                format!("high_degree_high_occ,{}", ct.high_degree_high_occ),
                format!("kept_before_component,{}", report.kept_before_component),
                format!("named_kept,{}", report.named_kept),
                format!("giant_size,{}", report.giant_size),
                format!("final_vertices,{}", report.final_vertices),
                format!("final_edges,{}", report.final_edges),
            ];
            print_artifact(&sink.write_csv("filter_report.csv", "quantity,value", &rows)?);
        }
    }
    println!(
        "filtered graph: n={}, m={} (kept {} of {} characters)",
        g.vertex_count(),
        g.edge_count(),
        report.kept_before_component,
        corpus.characters().len()
    );
    Ok(())
}

fn write_stats_for(
    sink: &Sink,
    cli: &Cli,
    label: &str,
    g: &CharacterGraph,
) -> Result<(), CliError> {
    let summary = metrics::topo_summary(g)?;
    let rows = vec![summary_row(label, &summary)];
    print_artifact(&sink.write_csv(&format!("summary_{label}.csv"), SUMMARY_COLUMNS, &rows)?);
    if cli.format == OutputFormat::Json {
        print_artifact(&sink.write_json(&format!("summary_{label}.json"), &summary)?);
    }

    let table = metrics::centralities(g)?;
    let rows: Vec<String> = table
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.id,
                r.degree,
                r.strength,
                fmt_f64(r.eigenvector),
                fmt_f64(r.betweenness),
                fmt_f64(r.closeness),
                r.degree_rank,
                r.strength_rank,
                r.eigenvector_rank,
                r.betweenness_rank,
                r.closeness_rank,
            )
        })
        .collect();
    print_artifact(&sink.write_csv(
        &format!("centralities_{label}.csv"),
        "id,degree,strength,eigenvector,betweenness,closeness,degree_rank,strength_rank,eigenvector_rank,betweenness_rank,closeness_rank",
        &rows,
    )?);

    let knn = metrics::knn_function(g);
    let rows: Vec<String> = knn
        .iter()
        .map(|(k, v)| format!("{k},{}", fmt_f64(*v)))
        .collect();
    print_artifact(&sink.write_csv(&format!("knn_{label}.csv"), "degree,mean_neighbor_degree", &rows)?);

    let ck = metrics::ck_function(g);
    let rows: Vec<String> = ck
        .iter()
        .map(|(k, v)| format!("{k},{}", fmt_f64(*v)))
        .collect();
    print_artifact(&sink.write_csv(&format!("ck_{label}.csv"), "degree,mean_transitivity", &rows)?);
    Ok(())
}

fn stats(cli: &Cli, edgelist: Option<&Path>) -> Result<(), CliError> {
    let sink = Sink::new(cli, "stats")?;
    match edgelist {
        Some(path) => {
            if !path.is_file() {
                return Err(CliError::Input(format!(
                    "edge list `{}` does not exist",
                    path.display()
                )));
            }
            let g = read_edge_list(path)?;
            write_stats_for(&sink, cli, "edgelist", &g)?;
        }
        None => {
            let corpus = load_corpus(cli)?;
            let unfiltered = build_graph(&corpus, None);
            write_stats_for(&sink, cli, "unfiltered", &unfiltered)?;
            let (filtered, _) = filter_graph(&corpus, &filter_spec(cli));
            if !filtered.is_empty() {
                write_stats_for(&sink, cli, "filtered", &filtered)?;
            }
        }
    }
    Ok(())
}

fn fit(cli: &Cli, bootstrap: usize) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "fit")?;
    let unfiltered = build_graph(&corpus, None);
    let (filtered, _) = filter_graph(&corpus, &filter_spec(cli));

    let mut fits = BTreeMap::new();
    let seed = cli.seed;
    let mut record = |name: &str, samples: &[u64]| {
        let entry = match fitting::fit_power_law(samples) {
            Ok(fit) => {
                let lognormal = fitting::fit_lognormal_tail(samples, fit.xmin).ok();
                let p_value = (bootstrap > 0)
                    .then(|| fitting::bootstrap_p_value(samples, &fit, bootstrap, seed).ok())
                    .flatten();
                serde_json::json!({
                    "distribution": "power-law",
                    "alpha": fit.alpha,
                    "xmin": fit.xmin,
                    "ks": fit.ks,
                    "n_tail": fit.n_tail,
                    "p_value": p_value,
                    "lognormal_alternative": lognormal,
                })
            }
            Err(e) => serde_json::json!({ "error": e.to_string() }),
        };
        fits.insert(name.to_string(), entry);
    };

    let unfiltered_degrees: Vec<u64> =
        unfiltered.degree_sequence().iter().map(|&d| d as u64).collect();
    record("degrees_unfiltered", &unfiltered_degrees);
    if !filtered.is_empty() {
        let filtered_degrees: Vec<u64> =
            filtered.degree_sequence().iter().map(|&d| d as u64).collect();
        record("degrees_filtered", &filtered_degrees);
    }
    let scene_counts: Vec<u64> = corpus
        .occurrence_counts(OccurrenceUnit::Scene)
        .into_values()
        .filter(|&c| c > 0)
        .collect();
    record("scene_counts", &scene_counts);
    print_artifact(&sink.write_json("fits.json", &fits)?);

    // scaling-function tails
    let mut scaling = BTreeMap::new();
    for (name, curve) in [
        ("knn_unfiltered", metrics::knn_function(&unfiltered)),
        ("ck_unfiltered", metrics::ck_function(&unfiltered)),
    ] {
        let points: Vec<(f64, f64)> = curve.into_iter().map(|(k, v)| (k as f64, v)).collect();
        let entry = match fitting::fit_power_tail(&points, TailSide::UpperTail) {
            Ok(fit) => serde_json::json!({
                "exponent": fit.exponent,
                "cut": fit.cut,
                "r2": fit.r2,
                "points": fit.n_used,
            }),
            Err(e) => serde_json::json!({ "error": e.to_string() }),
        };
        scaling.insert(name.to_string(), entry);
    }
    print_artifact(&sink.write_json("scaling_tails.json", &scaling)?);

    // plot-ready complementary cumulative distributions
    for (file, samples) in [
        ("ccdf_degrees_unfiltered.csv", &unfiltered_degrees),
        ("ccdf_scene_counts.csv", &scene_counts),
    ] {
        let pairs = fitting::ccdf(samples)?;
        let rows: Vec<String> = pairs
            .iter()
            .map(|(v, p)| format!("{v},{}", fmt_f64(*p)))
            .collect();
        print_artifact(&sink.write_csv(file, "value,ccdf", &rows)?);
    }
    Ok(())
}

fn null_models(cli: &Cli) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "null")?;
    let mut rows = Vec::new();
    let mut verdicts = BTreeMap::new();
    let unfiltered = build_graph(&corpus, None);
    let (filtered, _) = filter_graph(&corpus, &filter_spec(cli));
    for (label, g, seed_slot) in [("unfiltered", &unfiltered, 1u64), ("filtered", &filtered, 2u64)] {
        if g.is_empty() {
            continue;
        }
        let (char_degrees, scene_sizes) = bipartite_sequences(&corpus, g);
        let report = nullmodels::smallworld_verdict(
            g,
            cli.replicates,
            charnet::stats::derive_seed(cli.seed, seed_slot),
            Some((&char_degrees, &scene_sizes)),
            SmallWorldFactors::default(),
        )?;
        rows.push(model_row(label, "observed", &report.observed.to_stats()));
        if let Some(bip) = &report.bipartite {
            rows.push(model_row(label, "bipartite", &bip.mean));
        }
        rows.push(model_row(label, "uniform", &report.erdos_renyi.mean));
        rows.push(model_row(label, "configuration", &report.configuration.mean));
        if let Some(lattice) = &report.lattice {
            rows.push(model_row(label, "lattice", &lattice.to_stats()));
        }
        println!(
            "{label}: small-world = {} (distance {}, transitivity {}, lattice {})",
            report.small_world, report.short_distance, report.high_transitivity, report.far_from_lattice
        );
        if let Some(expected) = report.bipartite_expected_mean_degree {
            println!("{label}: bipartite expected mean degree {expected:.2}");
        }
        verdicts.insert(label.to_string(), report);
    }
    print_artifact(&sink.write_csv("nullmodels.csv", MODEL_COLUMNS, &rows)?);
    print_artifact(&sink.write_json("smallworld.json", &verdicts)?);
    Ok(())
}

fn bipartite_sequences(corpus: &Corpus, g: &CharacterGraph) -> (Vec<u32>, Vec<u32>) {
    let members: std::collections::HashSet<&str> =
        (0..g.vertex_count()).map(|v| g.id(v)).collect();
    let mut char_degrees: BTreeMap<&str, u32> = members.iter().map(|&id| (id, 0)).collect();
    let mut scene_sizes = Vec::new();
    for scene in corpus.scenes() {
        let present: Vec<&str> = scene
            .distinct_participants()
            .into_iter()
            .filter(|p| members.contains(p))
            .collect();
        if present.is_empty() {
            continue;
        }
        scene_sizes.push(present.len() as u32);
        for p in present {
            *char_degrees.get_mut(p).unwrap() += 1;
        }
    }
    (char_degrees.into_values().collect(), scene_sizes)
}

fn dynamics_cmd(cli: &Cli, sample_every: usize) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "dynamics")?;
    let series = dynamics::growth_series(&corpus, sample_every)?;
    let rows: Vec<String> = series
        .samples
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{}",
                s.scene_index,
                s.vertices,
                s.edges,
                fmt_opt(s.giant_mean_distance)
            )
        })
        .collect();
    print_artifact(&sink.write_csv(
        "growth.csv",
        "scene_index,vertices,edges,giant_mean_distance",
        &rows,
    )?);
    match fitting::fit_log_growth(&series.distance_points()) {
        Ok(fit) => println!(
            "distance growth: {:.4} + {:.4} ln n (r2 {:.4})",
            fit.intercept, fit.slope, fit.r2
        ),
        Err(e) => println!("distance growth fit unavailable: {e}"),
    }

    let (t0, t1) = parse_window(cli, corpus.scenes().len())?;
    let mut window_meta = BTreeMap::new();
    window_meta.insert("t0".to_string(), t0);
    window_meta.insert("t1".to_string(), t1);
    print_artifact(&sink.write_json("attachment_window.json", &window_meta)?);
    for kind in [AttachmentKind::All, AttachmentKind::External, AttachmentKind::Internal] {
        match dynamics::attachment_curve(&corpus, kind, t0, t1) {
            Ok(curve) => {
                let rates: BTreeMap<u64, f64> = curve.rates.iter().copied().collect();
                let rows: Vec<String> = curve
                    .cumulative
                    .iter()
                    .map(|&(k, kappa)| format!("{k},{},{}", fmt_f64(rates[&k]), fmt_f64(kappa)))
                    .collect();
                print_artifact(&sink.write_csv(
                    &format!("attachment_{}.csv", kind.label()),
                    "abscissa,rate,cumulative",
                    &rows,
                )?);
                let points: Vec<(f64, f64)> = curve
                    .cumulative
                    .iter()
                    .map(|&(k, v)| (k as f64, v))
                    .collect();
                match fitting::fit_power_tail(&points, TailSide::LowerTail) {
                    Ok(fit) => println!(
                        "attachment ({}): cumulative-rate exponent {:.3} (r2 {:.3})",
                        kind.label(),
                        fit.exponent,
                        fit.r2
                    ),
                    Err(e) => println!("attachment ({}): fit unavailable: {e}", kind.label()),
                }
            }
            Err(e) => println!("attachment ({}): {e}", kind.label()),
        }
    }
    Ok(())
}

fn attack_cmd(
    cli: &Cli,
    strategy: Option<&str>,
    max_fraction: f64,
    step: f64,
) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "attack")?;
    let strategies: Vec<AttackStrategy> = match strategy {
        Some(name) => vec![AttackStrategy::parse(name).ok_or_else(|| {
            CliError::Input(format!(
                "unknown strategy `{name}` (random|degree|eigenvector|betweenness|closeness)"
            ))
        })?],
        None => vec![
            AttackStrategy::Random,
            AttackStrategy::Degree,
            AttackStrategy::Eigenvector,
            AttackStrategy::Betweenness,
            AttackStrategy::Closeness,
        ],
    };
    let unfiltered = build_graph(&corpus, None);
    let (filtered, _) = filter_graph(&corpus, &filter_spec(cli));
    for (label, g) in [("unfiltered", &unfiltered), ("filtered", &filtered)] {
        if g.is_empty() {
            continue;
        }
        for &s in &strategies {
            let result = attack(
                g,
                s,
                max_fraction,
                step,
                cli.replicates as u32,
                cli.seed,
                cli.recompute,
            )?;
            let rows: Vec<String> = result
                .curve
                .iter()
                .map(|&(f, giant)| format!("{},{}", fmt_f64(f), fmt_f64(giant)))
                .collect();
            let extra = vec![format!(
                "strategy: {} network: {label} trials: {} seed: {} recompute: {}",
                s.label(),
                result.trials,
                result.seed,
                result.recomputed
            )];
            print_artifact(&sink.write_csv_with(
                &format!("attack_{label}_{}.csv", s.label()),
                &extra,
                "fraction_removed,giant_fraction",
                &rows,
            )?);
        }
    }
    Ok(())
}

fn gender_cmd(cli: &Cli) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "gender")?;
    let unfiltered = build_graph(&corpus, None);
    let (filtered, _) = filter_graph(&corpus, &filter_spec(cli));

    let mut report = BTreeMap::new();
    report.insert(
        "corpus_proportions".to_string(),
        serde_json::to_value(gender::corpus_sex_proportions(&corpus)).unwrap(),
    );
    for (label, g) in [("unfiltered", &unfiltered), ("filtered", &filtered)] {
        if g.is_empty() {
            continue;
        }
        let mut section = BTreeMap::new();
        section.insert(
            "proportions".to_string(),
            serde_json::to_value(gender::sex_proportions(g)).unwrap(),
        );
        section.insert(
            "edge_census".to_string(),
            serde_json::to_value(gender::edge_sex_census(g)).unwrap(),
        );
        section.insert(
            "triangle_census".to_string(),
            serde_json::to_value(gender::triangle_census(g)).unwrap(),
        );
        section.insert(
            "volume_ratios".to_string(),
            serde_json::to_value(gender::gender_ratio(g)).unwrap(),
        );
        let female = g.induced_subgraph(|c| c.sex == charnet::corpus::Sex::Female);
        let male = g.induced_subgraph(|c| c.sex == charnet::corpus::Sex::Male);
        section.insert(
            "induced_densities".to_string(),
            serde_json::json!({
                "female": female.density(),
                "male": male.density(),
            }),
        );
        match gender::sex_assortativity(g) {
            Ok(r) => {
                section.insert("sex_assortativity".to_string(), serde_json::json!(r));
            }
            Err(e) => {
                section.insert(
                    "sex_assortativity".to_string(),
                    serde_json::json!({ "error": e.to_string() }),
                );
            }
        }
        match gender::centrality_sex_tests(g, 10_000, cli.seed) {
            Ok(t) => {
                section.insert("significance".to_string(), serde_json::to_value(t).unwrap());
            }
            Err(e) => {
                section.insert(
                    "significance".to_string(),
                    serde_json::json!({ "error": e.to_string() }),
                );
            }
        }
        report.insert(label.to_string(), serde_json::to_value(section).unwrap());
    }
    let bechdel = gender::bechdel_candidates(&corpus);
    report.insert(
        "scene_stages".to_string(),
        serde_json::json!({
            "all_female_scenes": bechdel.stage1,
            "two_or_more_women": bechdel.stage2,
            "two_or_more_named_women": bechdel.stage3,
        }),
    );
    print_artifact(&sink.write_json("gender.json", &report)?);
    let rows: Vec<String> = bechdel.worklist.iter().map(|id| id.to_string()).collect();
    print_artifact(&sink.write_csv("bechdel_worklist.csv", "scene_id", &rows)?);
    Ok(())
}

fn typology_cmd(cli: &Cli) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "typology")?;
    if corpus.arcs().is_empty() {
        return Err(CliError::Input(
            "corpus has no arcs.tsv; typology needs narrative arcs".to_string(),
        ));
    }
    let spec = filter_spec(cli);
    let thresholds = TypologyThresholds::default();
    let mut rows = Vec::new();
    let mut agree = 0usize;
    let mut labeled = 0usize;
    for arc in corpus.arcs().values() {
        let reference = arc
            .reference_type
            .map(|t| t.token().to_string())
            .unwrap_or_else(|| "unlabeled".to_string());
        let line = match arc_graph(&corpus, &arc.id, Some(&spec)) {
            Ok(g) => match classify_arc(&g, &thresholds) {
                Ok(report) => {
                    if let Some(label) = arc.reference_type {
                        labeled += 1;
                        if report.arc_type.matches_reference(label) {
                            agree += 1;
                        }
                    }
                    let f = &report.features;
                    format!(
                        "{},{},{},{},{},{},{},{},{}",
                        arc.id,
                        g.vertex_count(),
                        report.arc_type.label(),
                        reference,
                        fmt_f64(f.degree_centralization),
                        fmt_f64(f.top_betweenness_share),
                        fmt_f64(f.top5_density),
                        fmt_f64(f.gateway_fraction),
                        fmt_f64(f.second_to_top_degree),
                    )
                }
                Err(e) => format!("{},0,error:{e},{reference},,,,,", arc.id),
            },
            Err(e) => format!("{},0,error:{e},{reference},,,,,", arc.id),
        };
        rows.push(line);
    }
    print_artifact(&sink.write_csv(
        "typology.csv",
        "arc,n,predicted,reference,centralization,top_betweenness_share,top5_density,gateway_fraction,second_to_top_degree",
        &rows,
    )?);
    if labeled > 0 {
        println!(
            "typology agreement: {agree}/{labeled} labeled arcs ({:.0}%)",
            100.0 * agree as f64 / labeled as f64
        );
    }
    Ok(())
}

fn report(cli: &Cli) -> Result<(), CliError> {
    let corpus = load_corpus(cli)?;
    let sink = Sink::new(cli, "report")?;

    // topology table for both networks
    let unfiltered = build_graph(&corpus, None);
    let (filtered, filter_report) = filter_graph(&corpus, &filter_spec(cli));
    let mut rows = vec![summary_row("unfiltered", &metrics::topo_summary(&unfiltered)?)];
    if !filtered.is_empty() {
        rows.push(summary_row("filtered", &metrics::topo_summary(&filtered)?));
    }
    print_artifact(&sink.write_csv("summary.csv", SUMMARY_COLUMNS, &rows)?);
    print_artifact(&sink.write_json("filter_report.json", &filter_report)?);

    // bipartite handshake note
    let bipartite = build_bipartite(&corpus);
    println!(
        "bipartite graph: {} characters, {} scenes, {} memberships",
        bipartite.character_ids().len(),
        bipartite.scene_ids().len(),
        bipartite.membership_count()
    );

    stats(cli, None)?;
    fit(cli, 0)?;
    null_models(cli)?;
    dynamics_cmd(cli, 25)?;
    attack_cmd(cli, None, 0.95, 0.05)?;
    gender_cmd(cli)?;
    if !corpus.arcs().is_empty() {
        typology_cmd(cli)?;
    }
    println!("report complete: artifacts in {}", cli.out.display());
    Ok(())
}

fn import(cli: &Cli, from: &Path, mapping: &Path, builtin_arcs: bool) -> Result<(), CliError> {
    if !from.is_dir() {
        return Err(CliError::Input(format!(
            "source directory `{}` does not exist",
            from.display()
        )));
    }
    let mapping_text = std::fs::read_to_string(mapping).map_err(|e| {
        CliError::Input(format!("cannot read mapping `{}`: {e}", mapping.display()))
    })?;
    let spec: corpus::ImportSpec = serde_json::from_str(&mapping_text)
        .map_err(|e| CliError::Input(format!("bad mapping `{}`: {e}", mapping.display())))?;
    let mut imported = corpus::import_corpus(from, &spec)?;
    if builtin_arcs {
        imported = imported.with_arcs(corpus::builtin_thorgal_arcs())?;
    }
    std::fs::create_dir_all(&cli.out)?;
    corpus::write_corpus(&imported, &cli.out)?;
    println!(
        "imported {} characters, {} volumes, {} scenes into {}",
        imported.characters().len(),
        imported.volumes().len(),
        imported.scenes().len(),
        cli.out.display()
    );
    Ok(())
}
