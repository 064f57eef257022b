use std::fmt::Write as _;
use std::path::Path;

use canvdw::ap::{build_ap_hypergraph, count_aps_in_interval, enumerate_aps};
use canvdw::colouring::count_coloured_aps;
use canvdw::cycles::{
    check_cycle_span, for_each_minimal_cycle, girth, has_girth_at_least, HypergraphCycle,
};
use canvdw::decider::{is_alpha_k_rb, is_alpha_k_sz, is_can_k_vdw, is_r_k_vdw};
use canvdw::rainbow::{build_rainbow_hypergraph, verify_degree_bounds};
use canvdw::random_lab::{
    band_name, curve_csv, curve_point, estimate_probability, scaling_experiment,
    search_sparse_canvdw, threshold_bisect, Band, BisectConfig, CurvePoint, Property,
    ScalingConfig, TrialPlan,
};
use canvdw::{Budget, Certificate, Colouring, DecisionResult, GroundSet, Ratio, Verdict};
use serde_json::{json, Value};

use crate::ingest::{parse_colouring, parse_list, parse_ratio, parse_set};
use crate::record::{read_manifest, sha256_hex};
use crate::{
    run_recorded, CliError, Command, DecideProperty, LabProperty, Outcome, PropertyParams,
};

fn budget(limit: Option<u64>) -> Budget {
    limit.map_or(Budget::unlimited(), Budget::nodes)
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(v).expect("JSON value serializes");
    bytes.push(b'\n');
    bytes
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Holds => 0,
        Verdict::Fails => 1,
        Verdict::BudgetExhausted => 2,
    }
}

fn required<T: Copy>(value: Option<T>, flag: &str, property: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::usage(format!("--{flag} is required for {property}")))
}

fn alpha_of(params: &PropertyParams, property: &str) -> Result<Ratio, CliError> {
    let text = params
        .alpha
        .as_deref()
        .ok_or_else(|| CliError::usage(format!("--alpha is required for {property}")))?;
    parse_ratio(text)
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Decide {
            set,
            property,
            params,
            budget: b,
        } => decide(&parse_set(set)?, *property, params, budget(*b)),
        Command::Count {
            n,
            set,
            k,
            colouring,
        } => count(*n, set.as_deref(), *k, colouring.as_deref()),
        Command::Girth {
            set,
            k,
            enumerate,
            lmax,
            list_limit,
            budget: b,
        } => girth_cmd(
            &parse_set(set)?,
            *k,
            *enumerate,
            *lmax,
            *list_limit,
            budget(*b),
        ),
        Command::Threshold {
            n,
            property,
            params,
            g,
            m,
            trials,
            seed,
            resolution,
            target,
            grid,
            budget: b,
            early_stop,
        } => {
            let property = lab_property(*property, params, *g, *m)?;
            let cfg = BisectConfig {
                n: *n,
                property,
                trials: *trials,
                seed: *seed,
                target: *target,
                resolution: *resolution,
                node_budget: budget(*b),
                early_stop_batch: *early_stop,
            };
            match grid {
                Some(grid) => threshold_grid(&cfg, &parse_list(grid, "probability")?),
                None => threshold(&cfg),
            }
        }
        Command::Scaling {
            k,
            ns,
            trials,
            seed,
            resolution,
            budget: b,
            early_stop,
        } => scaling(&ScalingConfig {
            k: *k,
            n_list: parse_list(ns, "n")?,
            trials: *trials,
            seed: *seed,
            resolution: *resolution,
            node_budget: budget(*b),
            early_stop_batch: *early_stop,
        }),
        Command::Search {
            k,
            g,
            n,
            p,
            attempts,
            seed,
            budget: b,
        } => search(*k, *g, *n, *p, *attempts, *seed, budget(*b)),
        Command::Rainbow { n, k, r, adjacency } => rainbow(*n, *k, *r, *adjacency),
        Command::Replay { manifest } => replay(manifest),
    }
}

fn decide(
    set: &GroundSet,
    property: DecideProperty,
    params: &PropertyParams,
    budget: Budget,
) -> Result<Outcome, CliError> {
    let k = params.k;
    let (name, res): (&str, DecisionResult) = match property {
        DecideProperty::Canvdw => ("canvdw", is_can_k_vdw(set, k, budget)?),
        DecideProperty::Rkvdw => (
            "rkvdw",
            is_r_k_vdw(set, required(params.r, "r", "rkvdw")?, k, budget)?,
        ),
        DecideProperty::Alpharb => (
            "alpharb",
            is_alpha_k_rb(set, alpha_of(params, "alpharb")?, k, budget)?,
        ),
        DecideProperty::Alphasz => (
            "alphasz",
            is_alpha_k_sz(set, alpha_of(params, "alphasz")?, k, budget)?,
        ),
    };
    let mut header = json!({ "property": name, "k": k, "set": set.elements() });
    if let Some(r) = params
        .r
        .filter(|_| matches!(property, DecideProperty::Rkvdw))
    {
        header["r"] = json!(r);
    }
    if matches!(property, DecideProperty::Alpharb | DecideProperty::Alphasz) {
        header["alpha"] = json!(params
            .alpha
            .as_deref()
            .map(|a| parse_ratio(a).map(|r| r.to_string()))
            .transpose()?);
    }
    let certificate = res.certificate.as_ref().map(|c| {
        let mut cert = header.clone();
        match c {
            Certificate::Colouring(chi) => cert["colouring"] = json!(chi.assignment()),
            Certificate::Subset(b) => cert["subset"] = json!(b.elements()),
        }
        cert
    });
    let mut out = header.clone();
    out["verdict"] = json!(res.verdict);
    out["nodes"] = json!(res.nodes_explored);
    if let Some(c) = &res.certificate {
        out["certificate"] = match c {
            Certificate::Colouring(chi) => json!({ "colouring": chi.assignment() }),
            Certificate::Subset(b) => json!({ "subset": b.elements() }),
        };
    }
    let mut artifacts = Vec::new();
    if let Some(cert) = &certificate {
        artifacts.push(("certificate.json".to_string(), pretty(cert)));
    }
    Ok(Outcome {
        exit: verdict_exit(res.verdict),
        stdout: json_line(&out),
        artifacts,
        details: json!({ "result": out, "decider_ms": res.elapsed.as_secs_f64() * 1e3 }),
    })
}

fn count(
    n: Option<u32>,
    set: Option<&str>,
    k: u32,
    colouring: Option<&str>,
) -> Result<Outcome, CliError> {
    let colouring = colouring.map(parse_colouring).transpose()?;
    let domain = match (n, set) {
        (Some(n), _) => Some(GroundSet::interval(n)),
        (None, Some(s)) => Some(parse_set(s)?),
        (None, None) => None,
    };
    let out = match colouring {
        Some(c) => {
            let domain = domain.or(c.set).ok_or_else(|| {
                CliError::usage("--n or --set is required unless the colouring file names its set")
            })?;
            let chi = Colouring::from_rgs(domain.clone(), c.assignment)
                .map_err(|e| CliError::ingest(format!("colouring rejected: {e}")))?;
            let counts = count_coloured_aps(&domain, &chi, k)?;
            json!({ "mono": counts.mono, "rainbow": counts.rainbow, "neither": counts.neither })
        }
        None => {
            let aps = match (n, domain) {
                (Some(n), _) => count_aps_in_interval(n, k)?,
                (None, Some(d)) => enumerate_aps(&d, k)?.len() as u64,
                (None, None) => return Err(CliError::usage("--n or --set is required")),
            };
            json!({ "aps": aps })
        }
    };
    Ok(Outcome {
        exit: 0,
        stdout: json_line(&out),
        artifacts: Vec::new(),
        details: out,
    })
}

fn girth_cmd(
    set: &GroundSet,
    k: u32,
    enumerate: bool,
    lmax: u32,
    list_limit: usize,
    budget: Budget,
) -> Result<Outcome, CliError> {
    let h = build_ap_hypergraph(set, k)?;
    let g = girth(&h);
    if !enumerate {
        return Ok(Outcome {
            exit: 0,
            stdout: format!("{g}\n"),
            artifacts: Vec::new(),
            details: json!({ "girth": g }),
        });
    }
    let labels = h.vertices();
    let label_edge = |e: u32| -> Vec<u32> {
        h.edges()[e as usize]
            .iter()
            .map(|&v| labels[v as usize])
            .collect()
    };
    let cycle_json = |c: &HypergraphCycle| {
        json!({
            "length": c.len(),
            "edges": c.edges.iter().map(|&e| label_edge(e)).collect::<Vec<_>>(),
            "linking_vertices": c.linking_vertices.iter().map(|&v| labels[v as usize]).collect::<Vec<_>>(),
            "span": c.span(&h).len(),
        })
    };
    let mut total = 0u64;
    let mut counts = vec![0u64; lmax as usize + 1];
    let mut listed: Vec<HypergraphCycle> = Vec::new();
    let mut failures: Vec<Value> = Vec::new();
    for_each_minimal_cycle(&h, lmax, budget, |c| {
        total += 1;
        counts[c.len()] += 1;
        if listed.len() < list_limit {
            listed.push(c.clone());
        }
        if c.len() >= 3 {
            let check = check_cycle_span(&h, c);
            if !check.pass() {
                failures.push(json!({ "cycle": cycle_json(c), "check": check }));
            }
        }
    })?;
    listed.sort_by_key(|c| (c.len(), c.sorted_edges()));
    let counts_by_length: Vec<(usize, u64)> = (2..counts.len())
        .filter(|&l| counts[l] > 0)
        .map(|l| (l, counts[l]))
        .collect();
    let spans = if lmax >= 3 {
        json!({
            "expected": format!("(k-1)*l = {}*l", k - 1),
            "checked": total - counts[2],
            "all_pass": failures.is_empty(),
            "failures": failures,
        })
    } else {
        Value::Null
    };
    let out = json!({
        "girth": g,
        "k": k,
        "lmax": lmax,
        "total": total,
        "truncated": total > listed.len() as u64,
        "cycles": listed.iter().map(cycle_json).collect::<Vec<_>>(),
        "span_check": spans,
    });
    let summary = json!({
        "girth": g,
        "cycles": total,
        "counts_by_length": counts_by_length,
        "span_check": spans,
    });
    Ok(Outcome {
        exit: 0,
        stdout: json_line(&summary),
        artifacts: vec![("cycles.json".to_string(), pretty(&out))],
        details: summary,
    })
}

fn lab_property(
    kind: LabProperty,
    params: &PropertyParams,
    g: Option<u32>,
    m: Option<usize>,
) -> Result<Property, CliError> {
    let k = params.k;
    Ok(match kind {
        LabProperty::Canvdw => Property::CanVdw { k },
        LabProperty::Rkvdw => Property::RkVdw {
            r: required(params.r, "r", "rkvdw")?,
            k,
        },
        LabProperty::Alpharb => Property::AlphaRb {
            alpha: alpha_of(params, "alpharb")?,
            k,
        },
        LabProperty::Alphasz => Property::AlphaSz {
            alpha: alpha_of(params, "alphasz")?,
            k,
        },
        LabProperty::Girth => Property::GirthAtLeast {
            g: required(g, "g", "girth")?,
            k,
        },
        LabProperty::Size => Property::SizeAtLeast {
            m: required(m, "m", "size")?,
        },
    })
}

fn plan_at(cfg: &BisectConfig, p: f64) -> TrialPlan {
    TrialPlan {
        n: cfg.n,
        p,
        trials: cfg.trials,
        seed: cfg.seed,
        property: cfg.property,
        node_budget: cfg.node_budget,
    }
}

fn curve(cfg: &BisectConfig, ps: &[f64]) -> Result<(Vec<CurvePoint>, u64), CliError> {
    let mut exhausted = 0;
    let mut points = Vec::new();
    for &p in ps {
        let plan = plan_at(cfg, p);
        let out = estimate_probability(&plan)?;
        exhausted += out.budget_exhausted;
        points.push(curve_point(&plan, &out));
    }
    Ok((points, exhausted))
}

fn threshold_grid(cfg: &BisectConfig, ps: &[f64]) -> Result<Outcome, CliError> {
    let (points, exhausted) = curve(cfg, ps)?;
    let out = json!({
        "property": cfg.property.to_string(),
        "n": cfg.n,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "budget_exhausted": exhausted,
        "curve": points,
    });
    Ok(Outcome {
        exit: 0,
        stdout: json_line(&out),
        artifacts: vec![("out.csv".to_string(), curve_csv(&points).into_bytes())],
        details: json!({ "config": cfg, "result": out }),
    })
}

fn threshold(cfg: &BisectConfig) -> Result<Outcome, CliError> {
    match threshold_bisect(cfg) {
        Ok(t) => {
            let points: Vec<CurvePoint> = t
                .probes
                .iter()
                .map(|q| CurvePoint {
                    n: cfg.n,
                    p: q.p,
                    estimate: q.estimate,
                    ci_lo: q.ci_lo,
                    ci_hi: q.ci_hi,
                })
                .collect();
            let out = json!({
                "property": cfg.property.to_string(),
                "n": cfg.n,
                "trials": cfg.trials,
                "seed": cfg.seed,
                "target": cfg.target,
                "p_lo": t.p_lo,
                "p_hi": t.p_hi,
                "p_star": t.p_star(),
                "at_lo": t.at_lo,
                "at_hi": t.at_hi,
            });
            eprintln!("p* = {:.6} in [{:.6}, {:.6}]", t.p_star(), t.p_lo, t.p_hi);
            Ok(Outcome {
                exit: 0,
                stdout: json_line(&out),
                artifacts: vec![("out.csv".to_string(), curve_csv(&points).into_bytes())],
                details: json!({ "config": cfg, "result": out }),
            })
        }
        Err(e @ canvdw::Error::NoCrossing { .. }) => {
            // The endpoints are still informative; report them and exit 3.
            let (points, _) = curve(cfg, &[0.0, 1.0])?;
            let out = json!({
                "property": cfg.property.to_string(),
                "n": cfg.n,
                "trials": cfg.trials,
                "seed": cfg.seed,
                "target": cfg.target,
                "crossing": null,
                "diagnostic": e.to_string(),
                "curve": points,
            });
            eprintln!("no crossing: {e}");
            Ok(Outcome {
                exit: 3,
                stdout: json_line(&out),
                artifacts: vec![("out.csv".to_string(), curve_csv(&points).into_bytes())],
                details: json!({ "config": cfg, "result": out }),
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Normalized-threshold spread at or below this is reported as consistent
/// with `n^{-1/(k-1)}` scaling.
const SCALING_FACTOR: f64 = 2.0;

fn scaling(cfg: &ScalingConfig) -> Result<Outcome, CliError> {
    let table = scaling_experiment(cfg)?;
    let mut rows = Vec::new();
    let mut human = String::from("n      band         p*         normalized\n");
    for row in &table.rows {
        let mut entry = json!({ "n": row.n });
        for band in Band::ALL {
            entry[band_name(band)] = json!({
                "p_star": row.p_star(band),
                "normalized": row.normalized(band, cfg.k),
            });
            let _ = writeln!(
                human,
                "{:<6} {:<12} {:<10.6} {:.6}",
                row.n,
                band_name(band),
                row.p_star(band),
                row.normalized(band, cfg.k)
            );
        }
        rows.push(entry);
    }
    let mut spread = json!({});
    let mut within = true;
    for band in Band::ALL {
        let s = table.spread(band);
        within &= s <= SCALING_FACTOR;
        spread[band_name(band)] = json!(s);
    }
    eprint!("{human}");
    let out = json!({
        "k": cfg.k,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "rows": rows,
        "spread": spread,
        "factor": SCALING_FACTOR,
        "within_factor": within,
    });
    Ok(Outcome {
        exit: 0,
        stdout: json_line(&out),
        artifacts: vec![("out.csv".to_string(), table.to_csv().into_bytes())],
        details: json!({ "config": cfg, "result": out }),
    })
}

fn search(
    k: u32,
    g: u32,
    n: u32,
    p: f64,
    attempts: u64,
    seed: u64,
    budget: Budget,
) -> Result<Outcome, CliError> {
    let res = search_sparse_canvdw(k, g, n, p, attempts, seed, budget)?;
    let mut log = String::from("attempt,size,girth_ok,canvdw,nodes\n");
    for a in &res.attempts {
        let verdict = a.canvdw.map_or("skipped".to_string(), |v| {
            serde_json::to_value(v)
                .unwrap()
                .as_str()
                .unwrap()
                .to_string()
        });
        let _ = writeln!(
            log,
            "{},{},{},{},{}",
            a.attempt, a.size, a.girth_ok, verdict, a.nodes
        );
    }
    let mut artifacts = vec![("out.csv".to_string(), log.into_bytes())];
    let out = match &res.found {
        Some(set) => {
            // Re-check the witness with fresh decider calls.
            let girth_ok = has_girth_at_least(&build_ap_hypergraph(set, k)?, g)?;
            let canvdw = is_can_k_vdw(set, k, Budget::unlimited())?.holds();
            let witness: String = set.elements().iter().map(|x| format!("{x}\n")).collect();
            artifacts.push(("witness.txt".to_string(), witness.into_bytes()));
            json!({
                "status": "found",
                "found": set.elements(),
                "attempts": res.attempts.len(),
                "validation": { "can_k_vdw": canvdw, "girth_at_least": girth_ok },
            })
        }
        None => json!({ "status": "none-found", "found": null, "attempts": res.attempts.len() }),
    };
    Ok(Outcome {
        exit: 0,
        stdout: json_line(&out),
        artifacts,
        details: json!({ "k": k, "g": g, "n": n, "p": p, "seed": seed, "result": out }),
    })
}

fn rainbow(n: u32, k: u32, r: u32, adjacency: bool) -> Result<Outcome, CliError> {
    let graph = build_rainbow_hypergraph(n, k, r)?;
    let report = verify_degree_bounds(&graph)?;
    let out = json!({
        "n": n,
        "k": k,
        "r": r,
        "vertices": report.vertices,
        "edges": report.edges,
        "edge_lower_bound": report.edge_lower_bound,
        "vertex_degree_bound": report.vertex_degree_bound,
        "pair_degree_bound": report.pair_degree_bound,
        "all_pass": report.all_pass(),
    });
    let mut artifacts = vec![("out.csv".to_string(), report.to_csv().into_bytes())];
    if adjacency {
        let bytes = serde_json::to_vec(graph.hypergraph()).expect("hypergraph serializes");
        artifacts.push(("adjacency.json".to_string(), bytes));
    }
    Ok(Outcome {
        exit: 0,
        stdout: json_line(&out),
        artifacts,
        details: out,
    })
}

pub fn replay(manifest: &Path) -> Result<Outcome, CliError> {
    let recorded = read_manifest(manifest)?;
    let fresh = run_recorded(&recorded.args)?;
    let mut mismatched = Vec::new();
    if sha256_hex(fresh.stdout.as_bytes()) != recorded.stdout_sha256 {
        mismatched.push("stdout".to_string());
    }
    if i32::from(fresh.exit) != recorded.exit_code {
        mismatched.push("exit_code".to_string());
    }
    let fresh_names: Vec<&str> = fresh.artifacts.iter().map(|(n, _)| n.as_str()).collect();
    for a in &recorded.artifacts {
        match fresh.artifacts.iter().find(|(n, _)| *n == a.name) {
            Some((_, bytes)) if sha256_hex(bytes) == a.sha256 => {}
            _ => mismatched.push(a.name.clone()),
        }
    }
    for name in fresh_names {
        if !recorded.artifacts.iter().any(|a| a.name == name) {
            mismatched.push(name.to_string());
        }
    }
    let out = json!({
        "command": recorded.command,
        "args": recorded.args,
        "reproduced": mismatched.is_empty(),
        "mismatched": mismatched,
    });
    Ok(Outcome {
        exit: if mismatched.is_empty() { 0 } else { 4 },
        stdout: json_line(&out),
        artifacts: Vec::new(),
        details: out,
    })
}
