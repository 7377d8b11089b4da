use std::fmt::Write as _;
use std::path::Path;

use chabauty_lab::chabauty::{convergence_csv, convergence_table, distance_up_to, first_disagreement, ConvergenceRow};
use chabauty_lab::dynamics::{
    folner_demo, multi_transitivity_move, nonisolation_witness, MoveOutcome, TransitivityTask,
};
use chabauty_lab::schreier::{fiber_diameters, qi_to_line_probe, SchreierGraph};
use chabauty_lab::zd::{enumerate_by_index, WitnessNode};
use chabauty_lab::{Budget, FreeSub, Index, StallingsGraph, Subgroup, SubgroupSpec, Word};
use chabauty_lab_battery::{run as run_criterion, DEFAULT_SEED};
use serde::Serialize;
use serde_json::json;

use crate::output::{Artifacts, Provenance};
use crate::{Cli, CliError, Command};

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let budget = cli.budget()?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Stallings { spec, words, with, complete } => {
            stallings(cli, budget, spec, words, with.as_deref(), *complete)?.emit(out)?;
        }
        Command::Chabauty { first, second } => chabauty(cli, budget, first, second)?.emit(out)?,
        Command::Zd { enumerate, spec, depth } => {
            zd(cli, budget, enumerate.as_deref(), spec.as_deref(), *depth)?.emit(out)?
        }
        Command::Schreier { spec, fibers, line } => schreier(cli, budget, spec, fibers.as_deref(), *line)?.emit(out)?,
        Command::Witness { spec } => witness(cli, budget, spec)?.emit(out)?,
        Command::Transit { task } => {
            let (artifacts, code) = transit(budget, task)?;
            artifacts.emit(out)?;
            return Ok(code);
        }
        Command::Folner { index } => folner(budget, *index)?.emit(out)?,
        Command::Suite { only } => {
            let (artifacts, code) = suite(cli, budget, only)?;
            artifacts.emit(out)?;
            return Ok(code);
        }
        Command::Report { csv } => report(budget, csv)?.emit(out)?,
    }
    Ok(0)
}

fn load(prov: &mut Provenance, path: &Path) -> Result<SubgroupSpec, CliError> {
    let text = prov.read(path)?;
    SubgroupSpec::parse(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_free(prov: &mut Provenance, path: &Path) -> Result<FreeSub, CliError> {
    Ok(load(prov, path)?.into_free()?)
}

fn load_graph(prov: &mut Provenance, path: &Path) -> Result<StallingsGraph, CliError> {
    match load_free(prov, path)? {
        FreeSub::Graph(g) => Ok(g),
        FreeSub::Hom(_) => Err(CliError::input(format!("{}: expected a finitely generated subgroup", path.display()))),
    }
}

#[derive(Serialize)]
struct GraphSummary {
    generators: Vec<Word>,
    rank: usize,
    index: Index,
    vertices: usize,
    edges: usize,
    covering: bool,
    shortest_nontrivial: Option<Word>,
}

fn summarize(g: &StallingsGraph) -> GraphSummary {
    GraphSummary {
        generators: g.generators(),
        rank: g.rank(),
        index: g.index(),
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        covering: g.is_covering(),
        shortest_nontrivial: g.shortest_nontrivial_element(),
    }
}

fn summary_lines(name: &str, s: &GraphSummary) -> String {
    let gens: Vec<String> = s.generators.iter().map(|w| format!("`{w}`")).collect();
    format!(
        "- {name}: rank {}, index {}, {} vertices, {} edges, generators {}\n",
        s.rank,
        s.index,
        s.vertices,
        s.edges,
        if gens.is_empty() { "none".to_string() } else { gens.join(", ") }
    )
}

fn stallings(
    cli: &Cli,
    budget: Budget,
    spec: &Path,
    words: &[String],
    with: Option<&Path>,
    complete: bool,
) -> Result<Artifacts, CliError> {
    let mut prov = Provenance::new("stallings", budget);
    let h = load_graph(&mut prov, spec)?;
    let other = with.map(|p| load_graph(&mut prov, p)).transpose()?;
    let mut memberships = Vec::new();
    for s in words {
        let w: Word = s.parse()?;
        memberships.push(json!({"word": w, "member": h.checked_contains(&w)?}));
    }
    let summary = summarize(&h);
    let mut md = summary_lines("H", &summary);
    let mut result = json!({"subgroup": summary, "memberships": memberships});
    if let Some(k) = &other {
        let meet = summarize(&h.intersect_with_budget(k, &budget)?);
        let join = summarize(&h.join(k));
        md += &summary_lines("H ∩ K", &meet);
        md += &summary_lines("⟨H, K⟩", &join);
        result["intersection"] = json!(meet);
        result["join"] = json!(join);
    }
    if complete {
        let radius = cli.radius.unwrap_or(4);
        prov.radius = Some(radius);
        let c = summarize(&h.hall_completion(radius, &budget)?);
        md += &summary_lines(&format!("completion agreeing on B({radius})"), &c);
        result["completion"] = json!(c);
    }
    let mut a = Artifacts::new(prov);
    a.json("stallings.json", &result)?;
    a.dot("stallings.dot", &h.to_dot());
    a.markdown("stallings.md", "Stallings graph", &md);
    Ok(a)
}

fn chabauty(cli: &Cli, budget: Budget, first: &Path, second: &Path) -> Result<Artifacts, CliError> {
    let radius = cli.radius.unwrap_or(8);
    let mut prov = Provenance::new("chabauty", budget);
    prov.radius = Some(radius);
    let a = load(&mut prov, first)?;
    let b = load(&mut prov, second)?;
    let result = match (a, b) {
        (SubgroupSpec::Lattice(h), SubgroupSpec::Lattice(k)) => {
            let witness = first_disagreement(&h, &k, radius, &budget)?;
            let distance = distance_up_to(&h, &k, radius, &budget)?;
            json!({"radius": radius, "distance": distance, "witness": witness,
                   "witness_in_first": witness.as_ref().map(|x| h.contains(x))})
        }
        (SubgroupSpec::Lattice(_), _) | (_, SubgroupSpec::Lattice(_)) => {
            return Err(CliError::input("cannot compare a lattice subgroup with a subgroup of a free group"));
        }
        (a, b) => {
            let (h, k) = (a.into_free()?, b.into_free()?);
            let witness = first_disagreement(&h, &k, radius, &budget)?;
            let distance = distance_up_to(&h, &k, radius, &budget)?;
            json!({"radius": radius, "distance": distance, "witness": witness,
                   "witness_in_first": witness.as_ref().map(|x| h.contains(x))})
        }
    };
    let mut md = format!("Distance on the ball of radius {radius}: {}\n", distance_text(&result["distance"]));
    if !result["witness"].is_null() {
        let _ = writeln!(md, "\nFirst disagreement: `{}`", result["witness"].as_str().unwrap_or_default());
    }
    let mut a = Artifacts::new(prov);
    a.json("chabauty.json", &result)?;
    a.markdown("chabauty.md", "Chabauty distance", &md);
    Ok(a)
}

fn distance_text(v: &serde_json::Value) -> String {
    let e = v["exponent"].as_u64().unwrap_or_default();
    match v["kind"].as_str() {
        Some("exact") => format!("exactly 2^-{e}"),
        _ => format!("at most 2^-{e}"),
    }
}

fn zd(
    cli: &Cli,
    budget: Budget,
    enumerate: Option<&[u64]>,
    spec: Option<&Path>,
    depth: Option<usize>,
) -> Result<Artifacts, CliError> {
    if let Some(&[d, n]) = enumerate {
        let prov = Provenance::new(&format!("zd --enumerate {d} {n}"), budget);
        let subgroups = enumerate_by_index(d as usize, n)?;
        let mut counts = String::from("index,count\n");
        for i in 1..=n {
            let c = subgroups.iter().filter(|h| h.index() == Index::Finite(i)).count();
            let _ = writeln!(counts, "{i},{c}");
        }
        let mut list = String::from("index,basis\n");
        for h in &subgroups {
            let rows: Vec<String> =
                h.basis().iter().map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")).collect();
            let _ = writeln!(list, "{},{}", h.index(), rows.join(";"));
        }
        let mut a = Artifacts::new(prov);
        a.csv("counts.csv", &counts);
        a.csv("subgroups.csv", &list);
        return Ok(a);
    }
    let spec = spec.ok_or_else(|| CliError::input("zd needs --enumerate D N or a lattice subgroup spec"))?;
    let radius = cli.radius.unwrap_or(8);
    let mut prov = Provenance::new("zd", budget);
    prov.radius = Some(radius);
    let SubgroupSpec::Lattice(h) = load(&mut prov, spec)? else {
        return Err(CliError::input(format!("{}: expected a lattice subgroup", spec.display())));
    };
    let depth = depth.unwrap_or(h.dim() - h.rank());
    let tree = h.witness_chain(depth, radius, &budget)?;
    let mut csv = String::from("path,depth,basis,direction,terms,certified_at\n");
    chain_rows(&tree, "root", 0, &mut csv);
    let result = json!({
        "basis": h.basis(),
        "rank": h.rank(),
        "index": h.index(),
        "cb_erasing_rank": h.cb_erasing_rank(),
        "chain_depth": tree.depth(),
        "chain_nodes": tree.node_count(),
        "radius": radius,
        "certified_at": tree.certified_at,
    });
    let md = format!(
        "Rank {}, index {}, erasing rank {}. Witness chain of depth {} with {} nodes, certified on every radius up to {radius}.\n",
        h.rank(),
        h.index(),
        h.cb_erasing_rank(),
        tree.depth(),
        tree.node_count()
    );
    let mut a = Artifacts::new(prov);
    a.json("zd.json", &result)?;
    a.csv("chain.csv", &csv);
    a.markdown("zd.md", "Lattice subgroup", &md);
    Ok(a)
}

fn vector_text(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn chain_rows(node: &WitnessNode, path: &str, depth: usize, csv: &mut String) {
    let basis: Vec<String> = node.subgroup.basis().iter().map(|r| vector_text(r)).collect();
    let direction = node.direction.as_deref().map(vector_text).unwrap_or_default();
    let certified: Vec<String> = node.certified_at.iter().map(usize::to_string).collect();
    let _ =
        writeln!(csv, "{path},{depth},{},{direction},{},{}", basis.join(";"), node.children.len(), certified.join(" "));
    for (i, c) in node.children.iter().enumerate() {
        chain_rows(c, &format!("{path}.{}", i + 1), depth + 1, csv);
    }
}

fn schreier(cli: &Cli, budget: Budget, spec: &Path, fibers: Option<&Path>, line: bool) -> Result<Artifacts, CliError> {
    let radius = cli.radius.unwrap_or(8);
    let mut prov = Provenance::new("schreier", budget);
    prov.radius = Some(radius);
    let h = load_free(&mut prov, spec)?;
    let k = fibers.map(|p| load_free(&mut prov, p)).transpose()?;
    let graph = SchreierGraph::build(&h, radius, &budget)?;
    let cut = radius / 2;
    let ends = if cut < radius { Some(graph.ends_estimate(cut)?) } else { None };
    let mut result = json!({
        "radius": radius,
        "vertices": graph.vertex_count(),
        "sphere_sizes": graph.sphere_sizes(),
        "frontier": graph.frontier().len(),
        "ends_cut_radius": cut,
        "ends_estimate": ends,
    });
    let mut md = format!(
        "Ball of radius {radius}: {} cosets, {} on the frontier, ends estimate {} at cut radius {cut}.\n",
        graph.vertex_count(),
        graph.frontier().len(),
        ends.map_or("n/a".to_string(), |e| e.to_string())
    );
    let mut extra = Vec::new();
    if let Some(k) = &k {
        let report = fiber_diameters(&h, k, radius, &budget)?;
        let _ = writeln!(
            md,
            "\n{} fibers met; largest diameter {}.",
            report.fibers.len(),
            report.fibers.iter().map(|f| f.diameter).max().unwrap_or(0)
        );
        result["fibers"] = json!(report);
    }
    if line {
        let probe = qi_to_line_probe(&h, radius, &budget)?;
        let _ = writeln!(md, "\nLine screen: consistent with {:?}.", probe.consistent_with);
        extra.push(("ends.csv", probe.ends_csv()));
        result["line"] = json!(probe);
    }
    let mut a = Artifacts::new(prov);
    a.json("schreier.json", &result)?;
    a.dot("schreier.dot", &graph.to_dot());
    a.csv("growth.csv", &graph.growth_csv());
    for (name, body) in extra {
        a.csv(name, &body);
    }
    a.markdown("schreier.md", "Schreier graph", &md);
    Ok(a)
}

fn table_markdown(rows: &[ConvergenceRow]) -> String {
    let mut md = String::from("| n | distance | nontrivial |\n|---|---|---|\n");
    for r in rows {
        let _ = writeln!(md, "| {} | {} | {} |", r.n, r.distance, r.nontrivial);
    }
    md
}

fn witness(cli: &Cli, budget: Budget, spec: &Path) -> Result<Artifacts, CliError> {
    let radius = cli.radius.unwrap_or(8);
    let mut prov = Provenance::new("witness", budget);
    prov.radius = Some(radius);
    let (result, rows) = match load(&mut prov, spec)? {
        SubgroupSpec::Free(h) => {
            if h.index().is_finite() {
                return Err(CliError::verified_failure("isolated", "subgroups of finite index are isolated"));
            }
            let steps = nonisolation_witness(&h, radius, &budget)?;
            let seq: Vec<StallingsGraph> = steps.iter().map(|s| s.subgroup.clone()).collect();
            let rows = convergence_table(&seq, &h, radius, &budget)?;
            (json!({"limit": h.generators(), "steps": steps, "table": rows}), rows)
        }
        SubgroupSpec::Lattice(h) => {
            let seq = h.witness_sequence()?;
            let terms = seq.terms_until_stable(radius, 3, &budget)?;
            let rows = convergence_table(&terms, &h, radius, &budget)?;
            (json!({"limit": h.basis(), "terms": terms, "table": rows}), rows)
        }
        SubgroupSpec::Hom(_) => return Err(CliError::input("witness needs generators or a lattice basis")),
    };
    let mut a = Artifacts::new(prov);
    a.csv("convergence.csv", &convergence_csv(&rows));
    a.json("witness.json", &result)?;
    a.markdown("witness.md", "Convergence table", &table_markdown(&rows));
    Ok(a)
}

fn transit(budget: Budget, path: &Path) -> Result<(Artifacts, u8), CliError> {
    let mut prov = Provenance::new("transit", budget);
    let text = prov.read(path)?;
    let task: TransitivityTask =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let outcome = multi_transitivity_move(&task, &budget)?;
    let md = match &outcome {
        MoveOutcome::Certificate(c) => {
            let mut md = format!(
                "Certificate: conjugator `{}` = `{}`^-{} moves all {} pairs.\n\n| pair | join | in V_i | in V_r+i | index |\n|---|---|---|---|---|\n",
                c.conjugator,
                c.base,
                c.exponent,
                c.pairs.len()
            );
            for (i, p) in c.pairs.iter().enumerate() {
                let _ = writeln!(md, "| {} | {:?} | {} | {} | {} |", i + 1, p.join, p.in_source, p.in_target, p.index);
            }
            let _ = writeln!(md, "\nRe-verification: {}", if c.verify(&task) { "passed" } else { "FAILED" });
            md
        }
        MoveOutcome::Obstruction(o) => format!(
            "Obstruction in pair {}: the normal core of ⟨I⟩ (index {}) together with the target's required elements contains `{}`, which the target excludes. No conjugator exists.\n",
            o.pair + 1,
            o.normal_core.index(),
            o.forced
        ),
        MoveOutcome::Exhausted(e) => format!(
            "Search exhausted: {} conjugators up to length {} and exponent {} tried.\n",
            e.candidates, e.max_length, e.max_exponent
        ),
    };
    let code = outcome.exit_code() as u8;
    let mut a = Artifacts::new(prov);
    a.json("transit.json", &outcome)?;
    a.markdown("transit.md", "Transitivity move", &md);
    Ok((a, code))
}

fn folner(budget: Budget, index: Option<u64>) -> Result<Artifacts, CliError> {
    let indices: Vec<u64> = index.map_or_else(|| (2..=5).collect(), |i| vec![i]);
    let reports = indices.iter().map(|&i| folner_demo(i, &budget)).collect::<Result<Vec<_>, _>>()?;
    let mut md =
        String::from("| i | k | &#124;B&#124; | worst ratio | tolerance | within |\n|---|---|---|---|---|---|\n");
    for (i, r) in indices.iter().zip(&reports) {
        let worst = r.ratios.iter().map(|x| x.ratio).max().unwrap_or_default();
        let _ = writeln!(md, "| {i} | `{}` | {} | {worst} | {} | {} |", r.k, r.set_size, r.tolerance, r.all_within);
    }
    let mut a = Artifacts::new(Provenance::new("folner", budget));
    a.json("folner.json", &reports)?;
    a.markdown("folner.md", "Følner transfer", &md);
    Ok(a)
}

fn suite(cli: &Cli, budget: Budget, only: &[u8]) -> Result<(Artifacts, u8), CliError> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let ids: Vec<u8> = if only.is_empty() { (1..=10).collect() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=10).contains(&i)) {
        return Err(CliError::input(format!("no criterion {bad}; criteria are numbered 1 to 10")));
    }
    let results: Vec<_> = ids.iter().map(|&id| run_criterion(id, seed)).collect();
    let mut md = String::from("| # | criterion | verdict | detail |\n|---|---|---|---|\n");
    for r in &results {
        let verdict = if r.passed { "pass" } else { "FAIL" };
        let _ = writeln!(md, "| {} | {} | {verdict} | {} |", r.id, r.name, r.detail.replace('|', "/"));
    }
    let mut prov = Provenance::new("suite", budget);
    prov.seed = Some(seed);
    let code = if results.iter().all(|r| r.passed) { 0 } else { 4 };
    // Timings vary between runs and stay out of the report.
    let stable: Vec<_> =
        results.iter().map(|r| json!({"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail})).collect();
    let mut a = Artifacts::new(prov);
    a.markdown("suite.md", "Acceptance matrix", &md);
    a.json("suite.json", &stable)?;
    Ok((a, code))
}

fn report(budget: Budget, path: &Path) -> Result<Artifacts, CliError> {
    let mut prov = Provenance::new("report", budget);
    let text = prov.read(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| CliError::input("empty CSV"))?;
    if header.trim() != "n,distance_exponent,exact,nontrivial" {
        return Err(CliError::input(format!("unexpected CSV header `{header}`")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || CliError::input(format!("row {}: `{line}`", i + 1));
        let [n, e, exact, nontrivial] = cells[..] else { return Err(bad()) };
        rows.push((
            n.parse::<usize>().map_err(|_| bad())?,
            e.parse::<usize>().map_err(|_| bad())?,
            exact.parse::<bool>().map_err(|_| bad())?,
            nontrivial.parse::<bool>().map_err(|_| bad())?,
        ));
    }
    let all_nontrivial = rows.iter().all(|r| r.3);
    let exponents: Vec<usize> = rows.iter().map(|r| r.1).collect();
    let monotone = exponents.windows(2).all(|p| p[0] <= p[1]);
    let last = rows.last().map(|r| (r.1, r.2));
    let result = json!({
        "rows": rows.len(),
        "all_nontrivial": all_nontrivial,
        "exponents_nondecreasing": monotone,
        "last_exponent": last.map(|l| l.0),
        "last_exact": last.map(|l| l.1),
    });
    let md = format!(
        "{} rows; every term nontrivial: {all_nontrivial}; distance exponents non-decreasing: {monotone}; last exponent: {}.\n",
        rows.len(),
        last.map_or("n/a".to_string(), |(e, exact)| if exact { e.to_string() } else { format!(">= {e}") })
    );
    let mut a = Artifacts::new(prov);
    a.markdown("report.md", "Convergence report", &md);
    a.json("report.json", &result)?;
    Ok(a)
}
