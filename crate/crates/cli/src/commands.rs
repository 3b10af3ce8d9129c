use std::collections::HashSet;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use hyperembed::evaluate::{truth_coords_for, write_histogram_csv};
use hyperembed::geometry::internal_links_for_degree;
use hyperembed::prediction::{group_centers, read_groups};
use hyperembed::textio::fmt_float;
use hyperembed::{
    align_angles, empirical_connection_probability, gr_stats_among, load_edge_list, log_loss,
    log_loss_random_baseline, parse_node_list, predict, read_truth, EmbedConfig, Embedder,
    Embedding, EvalReport, Graph, Method, ModelParams, Quadrature,
};
use log::{info, warn};
use serde::Serialize;

use crate::args::{EmbedArgs, EvalArgs, GenerateArgs, ModelArgs, PredictArgs};
use crate::config::{overlay, ConfigFile};
use crate::error::CliError;
use crate::output::{Manifest, Staged};

pub struct Context {
    pub seed: u64,
    pub threads: usize,
    pub out_dir: PathBuf,
    pub config: ConfigFile,
}

#[derive(Serialize)]
struct Effective<A: Serialize, B: Serialize> {
    model: A,
    options: B,
}

fn required<T: Clone>(value: &Option<T>, flag: &str) -> Result<T, CliError> {
    value
        .clone()
        .ok_or_else(|| CliError::Usage(format!("missing required --{flag}")))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

fn load_graph(path: &Path, nodes: Option<&Path>) -> Result<Graph, CliError> {
    let (mut g, report) = load_edge_list(path)?;
    if report.self_loops > 0 || report.duplicate_edges > 0 {
        warn!(
            "{}: dropped {} self-loops and {} duplicate edges",
            path.display(),
            report.self_loops,
            report.duplicate_edges
        );
    }
    if let Some(nodes) = nodes {
        let labels = parse_node_list(open(nodes)?)?;
        let added = g.add_isolated(labels.iter().map(String::as_str));
        info!("{}: {added} isolated nodes", nodes.display());
    }
    Ok(g)
}

fn load_embedding(path: &Path) -> Result<Embedding, CliError> {
    Ok(Embedding::read(open(path)?, None)?)
}

/// Fills model defaults; `average_degree` enables the estimate of `L`.
fn resolve_model(
    model: &mut ModelArgs,
    size: usize,
    average_degree: Option<f64>,
) -> Result<ModelParams, CliError> {
    let m = *model.m.get_or_insert(1.5);
    let l = match (model.l, average_degree) {
        (Some(l), _) => l,
        (None, Some(k)) => internal_links_for_degree(k, m),
        (None, None) => 2.5,
    };
    model.l = Some(l);
    let gamma = *model.gamma.get_or_insert(2.1);
    let temperature = *model.temperature.get_or_insert(0.4);
    let zeta = *model.zeta.get_or_insert(1.0);
    Ok(ModelParams::from_gamma(
        m,
        l,
        gamma,
        temperature,
        zeta,
        size,
    )?)
}

fn finish<C: Serialize>(
    ctx: &Context,
    command: &'static str,
    mut staged: Staged,
    config: C,
) -> Result<(), CliError> {
    let outputs = staged.names();
    Manifest::new(command, ctx.seed, ctx.threads, outputs, config).stage(&mut staged)?;
    for path in staged.commit()? {
        info!("wrote {}", path.display());
    }
    Ok(())
}

pub fn generate(ctx: &Context, model: &ModelArgs, args: &GenerateArgs) -> Result<(), CliError> {
    let mut model = overlay(model, ctx.config.model.as_ref(), "model")?;
    let args = overlay(args, ctx.config.generate.as_ref(), "generate")?;
    let size = required(&args.size, "t")?;
    let params = resolve_model(&mut model, size, None)?;
    let net = hyperembed::generate(&params, ctx.seed)?;
    println!(
        "generated {} nodes, {} edges, average degree {:.3}",
        net.graph.node_count(),
        net.graph.edge_count(),
        net.graph.average_degree()
    );
    let mut staged = Staged::new(&ctx.out_dir);
    staged.render("edges.txt", |b| net.graph.write_edge_list(b))?;
    staged.render("nodes.txt", |b| net.graph.write_node_list(b))?;
    staged.render("truth.txt", |b| net.write_truth(b))?;
    finish(
        ctx,
        "generate",
        staged,
        Effective {
            model,
            options: args,
        },
    )
}

pub fn embed(ctx: &Context, model: &ModelArgs, args: &EmbedArgs) -> Result<(), CliError> {
    let mut model = overlay(model, ctx.config.model.as_ref(), "model")?;
    let mut args = overlay(args, ctx.config.embed.as_ref(), "embed")?;
    let input = required(&args.input, "input")?;
    let g = load_graph(&input, args.nodes.as_deref())?;
    let params = resolve_model(&mut model, g.node_count(), Some(g.average_degree()))?;
    let mut cfg = EmbedConfig::new(params);
    cfg.method = *args.method.get_or_insert(Method::Hybrid);
    cfg.fast = *args.fast.get_or_insert(false);
    cfg.window_c = *args.window_c.get_or_insert(cfg.window_c);
    cfg.k_speedup = *args.k_speedup.get_or_insert(cfg.k_speedup);
    cfg.correction_degrees = args
        .correction_degrees
        .get_or_insert_with(|| cfg.correction_degrees.clone())
        .clone();
    if !*args.corrections.get_or_insert(true) {
        cfg.correction_degrees.clear();
    }
    cfg.correction_repeats = args.correction_repeats;
    cfg.theta1 = *args.theta1.get_or_insert(PI);
    let points = *args.quadrature_points.get_or_insert(cfg.quadrature.points);
    cfg.quadrature = Quadrature::new(points).map_err(|e| CliError::Usage(e.to_string()))?;
    let embedder = Embedder::new(&g, cfg)?;
    println!(
        "method {}; switch index {}",
        embedder.log().method,
        embedder.log().switch_index
    );
    std::io::stdout()
        .flush()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let (embedding, log) = embedder.finish();
    for c in &log.corrections {
        println!(
            "correction step for degree >= {} at time {}: {} sweeps, {} moves",
            c.threshold, c.time, c.sweeps, c.moved
        );
    }
    for d in &log.skipped_thresholds {
        println!("no node has degree >= {d}; correction step skipped");
    }
    println!("wall time {:.3} s", log.wall_seconds);
    let mut staged = Staged::new(&ctx.out_dir);
    staged.render("coords.txt", |b| embedding.write(b))?;
    let log_text = toml::to_string(&log).map_err(|e| CliError::Internal(e.to_string()))?;
    staged.add("embed_log.toml", log_text.into_bytes());
    finish(
        ctx,
        "embed",
        staged,
        Effective {
            model,
            options: args,
        },
    )
}

fn check_node_sets(g: &Graph, e: &Embedding) -> Result<(), CliError> {
    let labels: HashSet<&str> = g.labels().iter().map(String::as_str).collect();
    if let Some(extra) = e.nodes.iter().find(|n| !labels.contains(n.label.as_str())) {
        return Err(CliError::Usage(format!(
            "node {} has coordinates but is not in the edge list",
            extra.label
        )));
    }
    Ok(())
}

pub fn eval(ctx: &Context, args: &EvalArgs) -> Result<(), CliError> {
    let mut args = overlay(args, ctx.config.eval.as_ref(), "eval")?;
    let g = load_graph(&required(&args.edges, "edges")?, args.nodes.as_deref())?;
    let e = load_embedding(&required(&args.coords, "coords")?)?;
    check_node_sets(&g, &e)?;
    let coords = e.coords_for(&g)?;
    let p = e.params;
    let trials = *args.ll_trials.get_or_insert(10);
    let bin_width = *args.bin_width.get_or_insert(0.5);
    if !(bin_width > 0.0) {
        return Err(CliError::Usage(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    let gr_pairs = *args.gr_pairs.get_or_insert(10_000);
    if gr_pairs == 0 || trials == 0 {
        return Err(CliError::Usage(
            "--gr-pairs and --ll-trials must be at least 1".into(),
        ));
    }
    let gr_nodes: Vec<usize> = if *args.gr_giant.get_or_insert(false) {
        g.largest_component()
    } else {
        (0..g.node_count()).collect()
    };
    let truth = match &args.truth {
        Some(path) => Some(read_truth(open(path)?)?),
        None => None,
    };
    let mut staged = Staged::new(&ctx.out_dir);
    let (ll_real, angle_err) = match &truth {
        Some(truth) => {
            let real = truth_coords_for(&g, truth, &p)?;
            let inferred: Vec<f64> = coords.iter().map(|c| c.theta).collect();
            let actual: Vec<f64> = real.iter().map(|c| c.theta).collect();
            let alignment = align_angles(&inferred, &actual);
            staged.render("angle_errors.csv", |b| {
                writeln!(b, "label,error")?;
                for (v, err) in alignment.errors.iter().enumerate() {
                    writeln!(b, "{},{}", g.label(v), fmt_float(*err))?;
                }
                Ok(())
            })?;
            (Some(log_loss(&g, &real, &p)?), Some(alignment.summary()))
        }
        None => (None, None),
    };
    let ll_inf = log_loss(&g, &coords, &p)?;
    let ll_rand = log_loss_random_baseline(&g, &coords, &p, trials, ctx.seed)?;
    let report = EvalReport {
        ll_inf,
        ll_rand,
        ll_real,
        r_ll_log: ll_rand - ll_inf,
        hist: empirical_connection_probability(&g, &coords, p.zeta, bin_width),
        gr: gr_stats_among(&g, &coords, p.zeta, &gr_nodes, gr_pairs, ctx.seed),
        angle_err,
    };
    report
        .write(std::io::stdout().lock())
        .map_err(|e| CliError::Io(e.to_string()))?;
    staged.render("eval_report.txt", |b| report.write(b))?;
    staged.render("conn_prob.csv", |b| write_histogram_csv(&report.hist, b))?;
    finish(ctx, "eval", staged, args)
}

pub fn predict_cmd(ctx: &Context, args: &PredictArgs) -> Result<(), CliError> {
    let mut args = overlay(args, ctx.config.predict.as_ref(), "predict")?;
    let base = load_graph(&required(&args.base, "base")?, args.nodes.as_deref())?;
    let future = load_graph(&required(&args.future, "future")?, None)?;
    let e = load_embedding(&required(&args.coords, "coords")?)?;
    check_node_sets(&base, &e)?;
    let bin_width = *args.bin_width.get_or_insert(0.5);
    if !(bin_width > 0.0) {
        return Err(CliError::Usage(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    let report = predict(&base, &future, &e, args.low_degree, bin_width)?;
    args.low_degree = Some(report.low_degree_threshold);
    if report.missing_base_nodes > 0 {
        warn!(
            "{} base nodes are absent from the future snapshot",
            report.missing_base_nodes
        );
    }
    if report.new_node_links > 0 {
        info!(
            "ignored {} future links touching new nodes",
            report.new_node_links
        );
    }
    for r in &report.rows {
        let auc = r
            .auc
            .map_or_else(|| "undefined".to_string(), |a| format!("{a:.6}"));
        println!(
            "{:<10} {:<10} auc {auc} ({} positives, {} negatives)",
            r.method, r.subset, r.positives, r.negatives
        );
    }
    let mut staged = Staged::new(&ctx.out_dir);
    staged.render("auc.csv", |b| report.write_auc_csv(b))?;
    staged.render("future_curve.csv", |b| {
        write_histogram_csv(&report.curve, b)
    })?;
    staged.render("prediction.txt", |b| {
        writeln!(
            b,
            "low_degree_threshold = {}",
            fmt_float(report.low_degree_threshold)
        )?;
        writeln!(b, "missing_base_nodes = {}", report.missing_base_nodes)?;
        writeln!(b, "new_node_links = {}", report.new_node_links)
    })?;
    if let Some(path) = &args.groups {
        let groups = read_groups(open(path)?)?;
        let centers = group_centers(&e, &groups);
        let straddling = centers.iter().filter(|c| c.2.straddles_wrap).count();
        if straddling > 0 {
            warn!(
                "{straddling} groups straddle angle 0; their linear centers of mass are unreliable"
            );
        }
        staged.render("group_centers.csv", |b| {
            writeln!(b, "group,members,theta_cm,straddles_wrap")?;
            for (name, n, c) in &centers {
                writeln!(b, "{name},{n},{},{}", fmt_float(c.theta), c.straddles_wrap)?;
            }
            Ok(())
        })?;
    }
    finish(ctx, "predict", staged, args)
}
