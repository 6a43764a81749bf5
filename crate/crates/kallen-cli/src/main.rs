//! Command-line front end for the level-zero character engine.
//!
//! Subcommands: `rootsys` | `qbg` | `eqb` | `kset` | `qls` | `macdonald` |
//! `gch` | `verify`. Flags can also be supplied through a TOML config file
//! (`--config`); explicit flags win. Output is deterministic — byte-identical
//! across runs and across `--jobs` values.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error.

use clap::{Args, Parser, Subcommand};
use kallen::affine::{self, AffineElt};
use kallen::cartan::{RootSystem, Series, Weight, WeylGroup};
use kallen::characters::{
    gch_K, gch_K_direct, gch_Kbar, gch_V, macdonald_E_inf, verify_identity, EMethod, GradedChar,
    GroupAlgebraElt, IdentityName, IdentityReport,
};
use kallen::paths;
use kallen::qbg::{self, EqbMethod, Qbg};
use rayon::prelude::*;
use serde_json::json;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "kallen",
    about = "Quantum Bruhat graph, LS path, and level-zero graded character calculator",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print root-system data: Cartan matrix, positive roots, highest root.
    Rootsys(RootsysArgs),
    /// Build and export the (parabolic) quantum Bruhat graph.
    Qbg(QbgArgs),
    /// Compute the set EQB(w) over the full Weyl group.
    Eqb(EqbArgs),
    /// Parametrize the semi-infinite cells K^J_w; optionally test
    /// membership or verify the partition property over a box.
    Kset(KsetArgs),
    /// Enumerate quantum LS paths of a given shape.
    Qls(QlsArgs),
    /// Specialized nonsymmetric Macdonald polynomial E_{w lambda}(q, oo).
    Macdonald(MacdonaldArgs),
    /// Graded characters of van der Kallen and Demazure modules.
    Gch(GchArgs),
    /// Run identity-verification sweeps; exits 1 on any failure.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Root-system type, e.g. A2, B3, G2 (or a bare letter plus --rank).
    #[arg(long = "type", value_name = "TYPE")]
    r#type: Option<String>,
    /// Rank, when --type is a bare series letter.
    #[arg(long)]
    rank: Option<usize>,
    /// Parabolic set J as 1-based indices ("1,3"; "" for empty). Defaults
    /// to the zero set of --lambda when a shape is given, else empty.
    #[arg(long = "J", value_name = "INDICES")]
    j: Option<String>,
    /// Output format: text or json (qbg also accepts dot).
    #[arg(long)]
    format: Option<String>,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML config file with keys mirroring the long flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for sweeps. The output does not depend on this.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RootsysArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct QbgArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dominant shape, comma-separated fundamental coordinates (sets J).
    #[arg(long)]
    lambda: Option<String>,
}

#[derive(Args)]
struct EqbArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Element w as a reduced word ("s1 s2 s1", "e").
    #[arg(long)]
    w: Option<String>,
    /// Algorithm: label_increasing | recursive | brute.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args)]
struct KsetArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dominant shape, comma-separated fundamental coordinates (sets J).
    #[arg(long)]
    lambda: Option<String>,
    /// Cell index w in W^J, as a reduced word.
    #[arg(long)]
    w: Option<String>,
    /// Affine element "s1 s2 | (1, 0)" to test for membership in K^J_w.
    #[arg(long)]
    x: Option<String>,
    /// Verify the partition property over translations in [0, BOX]^free.
    #[arg(long = "box", value_name = "BOX")]
    box_bound: Option<i64>,
}

#[derive(Args)]
struct QlsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dominant shape, comma-separated fundamental coordinates.
    #[arg(long)]
    lambda: Option<String>,
    /// Restrict to paths with final direction in floor(EQB(ceil(w))), and
    /// report degrees at w lambda instead of tail degrees.
    #[arg(long)]
    w: Option<String>,
}

#[derive(Args)]
struct MacdonaldArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dominant shape, comma-separated fundamental coordinates.
    #[arg(long)]
    lambda: Option<String>,
    /// Element of W^J as a reduced word, or "all" (default).
    #[arg(long)]
    w: Option<String>,
    /// Algorithm: qls | recursion.
    #[arg(long)]
    method: Option<String>,
}

#[derive(Args)]
struct GchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dominant shape, comma-separated fundamental coordinates.
    #[arg(long)]
    lambda: Option<String>,
    /// Element of W^J as a reduced word, or "all" (default).
    #[arg(long)]
    w: Option<String>,
    /// Which character: K | Kbar | V | direct.
    #[arg(long)]
    kind: Option<String>,
    /// Truncation depth N for --kind direct (default 6).
    #[arg(long)]
    trunc: Option<i64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dominant shape; omit to sweep shapes (see --help for the default).
    #[arg(long)]
    lambda: Option<String>,
    /// Identity to check: all | dem1 | rec1 | co_recursion | lemma_F |
    /// moebius | D_idempotent | T_property.
    #[arg(long)]
    suite: Option<String>,
    /// Seed for the randomized operator-law tests.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Rootsys(a) => cmd_rootsys(a),
        Cmd::Qbg(a) => cmd_qbg(a),
        Cmd::Eqb(a) => cmd_eqb(a),
        Cmd::Kset(a) => cmd_kset(a),
        Cmd::Qls(a) => cmd_qls(a),
        Cmd::Macdonald(a) => cmd_macdonald(a),
        Cmd::Gch(a) => cmd_gch(a),
        Cmd::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {}", msg);
            std::process::exit(2);
        }
    }
}

// ---------------------------------------------------------------------
// Configuration resolution
// ---------------------------------------------------------------------

/// Flag values merged over an optional TOML table; flags win.
struct Ctx {
    table: toml::Table,
}

impl Ctx {
    fn load(path: Option<&PathBuf>) -> Result<Ctx, String> {
        let table = match path {
            None => toml::Table::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {}", p.display(), e))?;
                text.parse::<toml::Table>()
                    .map_err(|e| format!("invalid TOML in {}: {}", p.display(), e))?
            }
        };
        Ok(Ctx { table })
    }

    fn str_of(&self, key: &str, flag: &Option<String>) -> Option<String> {
        flag.clone().or_else(|| {
            self.table.get(key).map(|v| match v {
                toml::Value::String(s) => s.clone(),
                other => other.to_string(),
            })
        })
    }

    fn u64_of(&self, key: &str, flag: Option<u64>) -> Result<Option<u64>, String> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .str_of(key, &None)
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .map_err(|_| format!("config key '{}' is not an integer", key))
                })
                .transpose(),
        }
    }

    fn i64_of(&self, key: &str, flag: Option<i64>) -> Result<Option<i64>, String> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .str_of(key, &None)
                .map(|s| {
                    s.trim()
                        .parse::<i64>()
                        .map_err(|_| format!("config key '{}' is not an integer", key))
                })
                .transpose(),
        }
    }

    fn usize_of(&self, key: &str, flag: Option<usize>) -> Result<Option<usize>, String> {
        Ok(self.u64_of(key, flag.map(|v| v as u64))?.map(|v| v as usize))
    }
}

/// Common settings after config merging.
struct Base {
    ctx: Ctx,
    format: String,
    out: Option<PathBuf>,
    jobs: usize,
}

fn resolve_base(common: &CommonArgs, default_format: &str, formats: &[&str]) -> Result<Base, String> {
    let ctx = Ctx::load(common.config.as_ref())?;
    let format = ctx
        .str_of("format", &common.format)
        .unwrap_or_else(|| default_format.to_string());
    if !formats.contains(&format.as_str()) {
        return Err(format!(
            "unsupported format '{}' (expected one of: {})",
            format,
            formats.join(", ")
        ));
    }
    let out = common
        .out
        .clone()
        .or_else(|| ctx.str_of("out", &None).map(PathBuf::from));
    let jobs = ctx.usize_of("jobs", common.jobs)?.unwrap_or(1);
    if jobs == 0 {
        return Err("--jobs must be at least 1".to_string());
    }
    Ok(Base { ctx, format, out, jobs })
}

fn resolve_type(base: &Base, common: &CommonArgs) -> Result<(Series, usize), String> {
    let raw = base
        .ctx
        .str_of("type", &common.r#type)
        .ok_or("missing --type (e.g. --type A2)")?;
    let trimmed = raw.trim();
    let digit_at = trimmed.find(|c: char| c.is_ascii_digit());
    let (letter, digits) = match digit_at {
        Some(p) => trimmed.split_at(p),
        None => (trimmed, ""),
    };
    let series = Series::parse(letter).map_err(|e| e.to_string())?;
    let rank = if digits.is_empty() {
        base.ctx
            .usize_of("rank", common.rank)?
            .ok_or("missing rank: use --type A2 or --type A --rank 2")?
    } else {
        digits
            .parse::<usize>()
            .map_err(|_| format!("bad rank in type '{}'", raw))?
    };
    Ok((series, rank))
}

fn build_group(series: Series, rank: usize) -> Result<Arc<WeylGroup>, String> {
    let rs = RootSystem::build(series, rank).map_err(|e| e.to_string())?;
    Ok(Arc::new(WeylGroup::new(rs)))
}

fn parse_int_list(s: &str) -> Result<Vec<i64>, String> {
    let cleaned: String = s
        .chars()
        .map(|c| if "[]()".contains(c) { ' ' } else { c })
        .collect();
    cleaned
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| format!("bad integer '{}'", t)))
        .collect()
}

fn resolve_lambda(base: &Base, flag: &Option<String>, rank: usize) -> Result<Weight, String> {
    let raw = base
        .ctx
        .str_of("lambda", flag)
        .ok_or("missing --lambda (e.g. --lambda 1,0)")?;
    let coords = parse_int_list(&raw)?;
    if coords.len() != rank {
        return Err(format!(
            "lambda has {} coordinates but the rank is {}",
            coords.len(),
            rank
        ));
    }
    if coords.iter().any(|&c| c < 0) {
        return Err("lambda must be dominant (nonnegative coordinates)".to_string());
    }
    Ok(Weight(coords))
}

/// `J` from the flag/config (1-based indices) or the zero set of `lambda`.
/// When both are present they must agree — the path and character
/// operations are defined for `J = { i : <lambda, alpha_i^vee> = 0 }`.
fn resolve_j(
    base: &Base,
    common: &CommonArgs,
    lambda: Option<&Weight>,
    rs: &RootSystem,
) -> Result<Vec<usize>, String> {
    let from_lambda = lambda.map(|lam| rs.j_of(lam).map_err(|e| e.to_string())).transpose()?;
    match base.ctx.str_of("J", &common.j).or_else(|| base.ctx.str_of("j", &common.j)) {
        None => Ok(from_lambda.unwrap_or_default()),
        Some(raw) => {
            let mut j: Vec<usize> = parse_int_list(&raw)?
                .into_iter()
                .map(|v| {
                    if v < 1 || v as usize > rs.rank() {
                        Err(format!("J index {} out of range 1..={}", v, rs.rank()))
                    } else {
                        Ok(v as usize - 1)
                    }
                })
                .collect::<Result<_, _>>()?;
            j.sort_unstable();
            j.dedup();
            if let Some(jl) = from_lambda {
                if jl != j {
                    return Err(
                        "J conflicts with lambda: J must be the zero set of lambda".to_string()
                    );
                }
            }
            Ok(j)
        }
    }
}

fn resolve_w(base: &Base, flag: &Option<String>) -> Option<String> {
    base.ctx.str_of("w", flag)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, content)
            .map_err(|e| format!("cannot write {}: {}", p.display(), e)),
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

fn type_label(series: Series, rank: usize) -> String {
    format!("{}{}", series, rank)
}

// ---------------------------------------------------------------------
// Text rendering (weights in the fundamental basis, q-powers as q^k)
// ---------------------------------------------------------------------

fn render_weight(mu: &[i64]) -> String {
    let mut out = String::new();
    for (i, &a) in mu.iter().enumerate() {
        if a == 0 {
            continue;
        }
        if out.is_empty() {
            if a < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if a < 0 { " - " } else { " + " });
        }
        if a.abs() != 1 {
            out.push_str(&format!("{} ", a.abs()));
        }
        out.push_str(&format!("w{}", i + 1));
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

fn render_poly(f: &GroupAlgebraElt) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, mu, c) in f.terms_sorted() {
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0 { " - " } else { " + " });
        }
        if c.abs() != 1 {
            out.push_str(&format!("{} ", c.abs()));
        }
        if k != 0 {
            out.push_str(&format!("q^{} ", k));
        }
        out.push_str(&format!("e^({})", render_weight(&mu)));
    }
    out
}

fn render_gch(g: &GradedChar) -> String {
    if g.denom.is_empty() {
        render_poly(&g.num)
    } else {
        let denom: String = g
            .denom
            .iter()
            .map(|r| format!("(1 - q^-{})", r))
            .collect();
        format!("({}) / {}", render_poly(&g.num), denom)
    }
}

// ---------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------

fn cmd_rootsys(args: RootsysArgs) -> Result<i32, String> {
    let base = resolve_base(&args.common, "text", &["text", "json"])?;
    let (series, rank) = resolve_type(&base, &args.common)?;
    let wg = build_group(series, rank)?;
    let rs = wg.root_system();
    let order = wg.elements().count();
    let content = if base.format == "json" {
        let cartan: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| rs.cartan(i, j)).collect())
            .collect();
        let v = json!({
            "type": type_label(series, rank),
            "rank": rank,
            "order": order,
            "coxeter_number": rs.coxeter_number(),
            "cartan": cartan,
            "positive_roots": rs.positive_roots().iter().map(|r| r.coords()).collect::<Vec<_>>(),
            "positive_coroots": rs.positive_coroots().iter().map(|c| c.coords()).collect::<Vec<_>>(),
            "theta": rs.theta().coords(),
        });
        format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
    } else {
        let mut s = String::new();
        s.push_str(&format!("type: {}\n", type_label(series, rank)));
        s.push_str(&format!("rank: {}\n", rank));
        s.push_str(&format!("order: {}\n", order));
        s.push_str(&format!("coxeter_number: {}\n", rs.coxeter_number()));
        s.push_str("cartan:\n");
        for i in 0..rank {
            let row: Vec<i64> = (0..rank).map(|j| rs.cartan(i, j)).collect();
            s.push_str(&format!("  {:?}\n", row));
        }
        s.push_str(&format!(
            "positive_roots: {}\n",
            rs.num_positive_roots()
        ));
        for r in rs.positive_roots() {
            s.push_str(&format!("  {:?}\n", r.coords()));
        }
        s.push_str(&format!("theta: {:?}\n", rs.theta().coords()));
        s
    };
    emit(&base.out, &content)?;
    Ok(0)
}

fn cmd_qbg(args: QbgArgs) -> Result<i32, String> {
    let base = resolve_base(&args.common, "json", &["text", "json", "dot"])?;
    let (series, rank) = resolve_type(&base, &args.common)?;
    let wg = build_group(series, rank)?;
    let lambda = match base.ctx.str_of("lambda", &args.lambda) {
        Some(_) => Some(resolve_lambda(&base, &args.lambda, rank)?),
        None => None,
    };
    let j = resolve_j(&base, &args.common, lambda.as_ref(), wg.root_system())?;
    let graph = Qbg::build(wg.clone(), &j);
    let content = match base.format.as_str() {
        "json" => format!("{}\n", serde_json::to_string_pretty(&graph.to_json()).unwrap()),
        "dot" => graph.to_dot(),
        _ => {
            let rs = wg.root_system();
            let mut s = String::new();
            s.push_str(&format!(
                "type: {}  J: {:?}\n",
                type_label(series, rank),
                j.iter().map(|&i| i + 1).collect::<Vec<_>>()
            ));
            s.push_str(&format!(
                "vertices: {}\nedges: {}\n",
                graph.vertices().len(),
                graph.edges().len()
            ));
            for e in graph.edges() {
                s.push_str(&format!(
                    "{} -> {}  label={:?} kind={}\n",
                    wg.word_string(graph.vertices()[e.src]),
                    wg.word_string(graph.vertices()[e.dst]),
                    rs.positive_roots()[e.label].coords(),
                    match e.kind {
                        qbg::EdgeKind::Bruhat => "bruhat",
                        qbg::EdgeKind::Quantum => "quantum",
                    }
                ));
            }
            s
        }
    };
    emit(&base.out, &content)?;
    Ok(0)
}

fn cmd_eqb(args: EqbArgs) -> Result<i32, String> {
    let base = resolve_base(&args.common, "text", &["text", "json"])?;
    let (series, rank) = resolve_type(&base, &args.common)?;
    let wg = build_group(series, rank)?;
    let w_text = resolve_w(&base, &args.w).ok_or("missing --w")?;
    let w = wg.parse_word(&w_text).map_err(|e| e.to_string())?;
    let method_text = base
        .ctx
        .str_of("method", &args.method)
        .unwrap_or_else(|| "label_increasing".to_string());
    let method = EqbMethod::parse(&method_text)
        .ok_or_else(|| format!("unknown EQB method '{}'", method_text))?;
    let full = Qbg::build(wg.clone(), &[]);
    let elements = qbg::eqb(&full, w, method);
    let content = if base.format == "json" {
        let v = json!({
            "type": type_label(series, rank),
            "w": wg.word_string(w),
            "method": method_text,
            "elements": elements.iter().map(|&u| wg.word_string(u)).collect::<Vec<_>>(),
        });
        format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
    } else {
        let mut s = String::new();
        for &u in &elements {
            s.push_str(&format!("{}\n", wg.word_string(u)));
        }
        s
    };
    emit(&base.out, &content)?;
    Ok(0)
}

fn cmd_kset(args: KsetArgs) -> Result<i32, String> {
    let base = resolve_base(&args.common, "text", &["text", "json"])?;
    let (series, rank) = resolve_type(&base, &args.common)?;
    let wg = build_group(series, rank)?;
    let lambda = match base.ctx.str_of("lambda", &args.lambda) {
        Some(_) => Some(resolve_lambda(&base, &args.lambda, rank)?),
        None => None,
    };
    let j = resolve_j(&base, &args.common, lambda.as_ref(), wg.root_system())?;
    let par = Qbg::build(wg.clone(), &j);
    let full = Qbg::build(wg.clone(), &[]);
    let w_text = resolve_w(&base, &args.w).ok_or("missing --w")?;
    let w = wg.parse_word(&w_text).map_err(|e| e.to_string())?;
    if !wg.is_min_rep(w, &j) {
        return Err(format!(
            "w = {} is not a minimal coset representative for J",
            wg.word_string(w)
        ));
    }
    let param = qbg::k_parametrize(&par, &full, w);

    let x = base
        .ctx
        .str_of("x", &args.x)
        .map(|t| AffineElt::parse(&wg, &t).map_err(|e| e.to_string()))
        .transpose()?;
    if let Some(ref xe) = x {
        if !affine::is_min_in_coset_af(&wg, &j, xe) {
            return Err(format!(
                "x = {} does not lie in (W^J)_af",
                xe.to_text(&wg)
            ));
        }
    }
    let membership = x.as_ref().map(|xe| qbg::k_membership_with(&par, &param, xe));

    let box_bound = base.ctx.i64_of("box", args.box_bound)?;
    let partition = box_bound
        .map(|b| {
            if b < 0 {
                Err("--box must be nonnegative".to_string())
            } else {
                Ok(qbg::check_partition(&par, &full, w, b))
            }
        })
        .transpose()?;
    let violated = partition
        .as_ref()
        .map(|r| !r.violations.is_empty())
        .unwrap_or(false);

    let content = if base.format == "json" {
        let v = json!({
            "type": type_label(series, rank),
            "J": j.iter().map(|&i| i + 1).collect::<Vec<_>>(),
            "w": wg.word_string(w),
            "free": param.free.iter().map(|&i| i + 1).collect::<Vec<_>>(),
            "cells": param.reps.iter().zip(&param.weights).map(|(&u, wt)| json!({
                "u": wg.word_string(u),
                "shift": wt.coords(),
            })).collect::<Vec<_>>(),
            "membership": x.as_ref().map(|xe| json!({
                "x": xe.to_text(&wg),
                "member": membership.unwrap(),
            })),
            "partition": partition.as_ref().map(|r| json!({
                "checked": r.checked,
                "violations": r.violations.iter().map(|v| json!({
                    "x": v.x.to_text(&wg),
                    "above": v.above,
                    "cells": v.cells.iter().map(|&c| wg.word_string(c)).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })),
        });
        format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
    } else {
        let mut s = String::new();
        s.push_str(&format!(
            "w: {}\nfree: {:?}\n",
            wg.word_string(w),
            param.free.iter().map(|&i| i + 1).collect::<Vec<_>>()
        ));
        for (&u, wt) in param.reps.iter().zip(&param.weights) {
            s.push_str(&format!(
                "u={}  shift={:?}\n",
                wg.word_string(u),
                wt.coords()
            ));
        }
        if let Some(ref xe) = x {
            s.push_str(&format!(
                "x={}  member={}\n",
                xe.to_text(&wg),
                membership.unwrap()
            ));
        }
        if let Some(ref r) = partition {
            s.push_str(&format!(
                "checked: {}\nviolations: {}\n",
                r.checked,
                r.violations.len()
            ));
            for v in &r.violations {
                s.push_str(&format!(
                    "violation: x={}  above={}  cells={:?}\n",
                    v.x.to_text(&wg),
                    v.above,
                    v.cells.iter().map(|&c| wg.word_string(c)).collect::<Vec<_>>()
                ));
            }
        }
        s
    };
    emit(&base.out, &content)?;
    Ok(if violated { 1 } else { 0 })
}

fn cmd_qls(args: QlsArgs) -> Result<i32, String> {
    let base = resolve_base(&args.common, "text", &["text", "json"])?;
    let (series, rank) = resolve_type(&base, &args.common)?;
    let wg = build_group(series, rank)?;
    let lambda = resolve_lambda(&base, &args.lambda, rank)?;
    let j = resolve_j(&base, &args.common, Some(&lambda), wg.root_system())?;
    let par = Qbg::build(wg.clone(), &j);
    let full = Qbg::build(wg.clone(), &[]);
    let set = paths::qls_enumerate(&par, &lambda);
    let (set, at): (Vec<paths::QlsPath>, Option<kallen::cartan::WeylElt>) =
        match resolve_w(&base, &args.w) {
            None => (set, None),
            Some(wt) => {
                let w = wg.parse_word(&wt).map_err(|e| e.to_string())?;
                if !wg.is_min_rep(w, &j) {
                    return Err(format!(
                        "w = {} is not a minimal coset representative for J",
                        wg.word_string(w)
                    ));
                }
                (paths::qls_filter_winf(&par, &full, &set, w), Some(w))
            }
        };
    let rows: Vec<(paths::QlsPath, Weight, i64)> = set
        .into_iter()
        .map(|eta| {
            let wt = paths::qls_wt(&wg, &eta, &lambda);
            let deg = match at {
                Some(w) => paths::deg_at(&par, &eta, w, &lambda),
                None => paths::deg(&par, &eta, &lambda),
            };
            (eta, wt, deg)
        })
        .collect();
    let content = if base.format == "json" {
        let items: Vec<serde_json::Value> = rows
            .iter()
            .map(|(eta, wt, deg)| {
                let mut v = eta.to_json(&wg);
                v["wt"] = json!(wt.coords());
                v["deg"] = json!(deg);
                v
            })
            .collect();
        format!("{}\n", serde_json::to_string_pretty(&json!(items)).unwrap())
    } else {
        let mut s = String::new();
        for (eta, wt, deg) in &rows {
            s.push_str(&format!(
                "{}  wt={}  deg={}\n",
                eta.text(&wg),
                render_weight(wt.coords()),
                deg
            ));
        }
        s.push_str(&format!("paths: {}\n", rows.len()));
        s
    };
    emit(&base.out, &content)?;
    Ok(0)
}

/// Resolve `--w` into the list of elements to process: a single parsed
/// word, or all of `W^J` for "all"/absent.
fn sweep_w(
    wg: &WeylGroup,
    par: &Qbg,
    j: &[usize],
    w_text: Option<String>,
) -> Result<Vec<kallen::cartan::WeylElt>, String> {
    match w_text.as_deref() {
        None | Some("all") => Ok(par.vertices().to_vec()),
        Some(t) => {
            let w = wg.parse_word(t).map_err(|e| e.to_string())?;
            if !wg.is_min_rep(w, j) {
                return Err(format!(
                    "w = {} is not a minimal coset representative for J",
                    wg.word_string(w)
                ));
            }
            Ok(vec![w])
        }
    }
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| e.to_string())
}

fn cmd_macdonald(args: MacdonaldArgs) -> Result<i32, String> {
    let base = resolve_base(&args.common, "text", &["text", "json"])?;
    let (series, rank) = resolve_type(&base, &args.common)?;
    let wg = build_group(series, rank)?;
    let lambda = resolve_lambda(&base, &args.lambda, rank)?;
    let j = resolve_j(&base, &args.common, Some(&lambda), wg.root_system())?;
    let par = Qbg::build(wg.clone(), &j);
    let full = Qbg::build(wg.clone(), &[]);
    let method_text = base
        .ctx
        .str_of("method", &args.method)
        .unwrap_or_else(|| "qls".to_string());
    let method = EMethod::parse(&method_text)
        .ok_or_else(|| format!("unknown method '{}' (use qls or recursion)", method_text))?;
    let w_text = resolve_w(&base, &args.w);
    let single = !matches!(w_text.as_deref(), None | Some("all"));
    let ws = sweep_w(&wg, &par, &j, w_text)?;
    let pool = thread_pool(base.jobs)?;
    let polys: Vec<GroupAlgebraElt> = pool.install(|| {
        ws.par_iter()
            .map(|&w| macdonald_E_inf(&par, &full, &lambda, w, method))
            .collect()
    });
    let content = if base.format == "json" {
        let items: Vec<serde_json::Value> = ws
            .iter()
            .zip(&polys)
            .map(|(&w, poly)| {
                json!({
                    "type": type_label(series, rank),
                    "lambda": lambda.coords(),
                    "w": wg.word_string(w),
                    "method": method_text,
                    "terms": poly.to_json(),
                })
            })
            .collect();
        let v = if single {
            items.into_iter().next().unwrap()
        } else {
            json!(items)
        };
        format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
    } else if single {
        format!("{}\n", render_poly(&polys[0]))
    } else {
        let mut s = String::new();
        for (&w, poly) in ws.iter().zip(&polys) {
            s.push_str(&format!("w={}: {}\n", wg.word_string(w), render_poly(poly)));
        }
        s
    };
    emit(&base.out, &content)?;
    Ok(0)
}

enum GchKind {
    K,
    Kbar,
    V,
    Direct,
}

fn cmd_gch(args: GchArgs) -> Result<i32, String> {
    let base = resolve_base(&args.common, "text", &["text", "json"])?;
    let (series, rank) = resolve_type(&base, &args.common)?;
    let wg = build_group(series, rank)?;
    let lambda = resolve_lambda(&base, &args.lambda, rank)?;
    let j = resolve_j(&base, &args.common, Some(&lambda), wg.root_system())?;
    let par = Qbg::build(wg.clone(), &j);
    let full = Qbg::build(wg.clone(), &[]);
    let kind_text = base
        .ctx
        .str_of("kind", &args.kind)
        .unwrap_or_else(|| "K".to_string());
    let kind = match kind_text.as_str() {
        "K" => GchKind::K,
        "Kbar" | "kbar" => GchKind::Kbar,
        "V" => GchKind::V,
        "direct" => GchKind::Direct,
        other => return Err(format!("unknown gch kind '{}' (use K, Kbar, V, direct)", other)),
    };
    let trunc = base.ctx.i64_of("trunc", args.trunc)?.unwrap_or(6);
    if trunc < 0 {
        return Err("--trunc must be nonnegative".to_string());
    }
    let w_text = resolve_w(&base, &args.w);
    let single = !matches!(w_text.as_deref(), None | Some("all"));
    let ws = sweep_w(&wg, &par, &j, w_text)?;
    let pool = thread_pool(base.jobs)?;

    enum GchValue {
        Char(GradedChar),
        Poly(GroupAlgebraElt),
    }
    let results: Vec<GchValue> = pool.install(|| {
        ws.par_iter()
            .map(|&w| match kind {
                GchKind::K => GchValue::Char(gch_K(&par, &full, &lambda, w)),
                GchKind::V => GchValue::Char(gch_V(&par, &full, &lambda, w)),
                GchKind::Kbar => GchValue::Poly(gch_Kbar(&par, &full, &lambda, w)),
                GchKind::Direct => GchValue::Poly(gch_K_direct(&par, &full, &lambda, w, trunc)),
            })
            .collect()
    });

    let render_one = |r: &GchValue| -> String {
        match r {
            GchValue::Char(g) => render_gch(g),
            GchValue::Poly(p) => render_poly(p),
        }
    };
    let json_one = |w: &kallen::cartan::WeylElt, r: &GchValue| -> serde_json::Value {
        let body = match r {
            GchValue::Char(g) => g.to_json(),
            GchValue::Poly(p) => json!({ "terms": p.to_json() }),
        };
        json!({
            "type": type_label(series, rank),
            "lambda": lambda.coords(),
            "w": wg.word_string(*w),
            "kind": kind_text,
            "value": body,
        })
    };

    let content = if base.format == "json" {
        let items: Vec<serde_json::Value> = ws
            .iter()
            .zip(&results)
            .map(|(w, r)| json_one(w, r))
            .collect();
        let v = if single {
            items.into_iter().next().unwrap()
        } else {
            json!(items)
        };
        format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
    } else if single {
        format!("{}\n", render_one(&results[0]))
    } else {
        let mut s = String::new();
        for (&w, r) in ws.iter().zip(&results) {
            s.push_str(&format!("w={}: {}\n", wg.word_string(w), render_one(r)));
        }
        s
    };
    emit(&base.out, &content)?;
    Ok(0)
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

struct SweepTask {
    label: String,
    series: Series,
    rank: usize,
    lambda: Vec<i64>,
    name: IdentityName,
}

/// Nonzero dominant shapes for the default sweep: every coordinate at
/// most 2.
fn sweep_lambdas(rank: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; rank];
    loop {
        if cur.iter().any(|&c| c > 0) {
            out.push(cur.clone());
        }
        let mut pos = rank;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] <= 2 {
                break;
            }
            cur[pos] = 0;
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, String> {
    let base = resolve_base(&args.common, "text", &["text", "json"])?;
    let seed = base.ctx.u64_of("seed", args.seed)?.unwrap_or(0);
    let suite_text = base
        .ctx
        .str_of("suite", &args.suite)
        .unwrap_or_else(|| "all".to_string());
    let names: Vec<IdentityName> = if suite_text == "all" {
        IdentityName::all().to_vec()
    } else {
        vec![IdentityName::parse(&suite_text)
            .ok_or_else(|| format!("unknown identity '{}'", suite_text))?]
    };

    // Shapes to sweep: explicit type (and optional lambda), or defaults.
    let mut shapes: Vec<(Series, usize, Vec<i64>)> = Vec::new();
    let has_type = base.ctx.str_of("type", &args.common.r#type).is_some();
    if has_type {
        let (series, rank) = resolve_type(&base, &args.common)?;
        build_group(series, rank)?; // validate early
        match base.ctx.str_of("lambda", &args.lambda) {
            Some(_) => {
                let lam = resolve_lambda(&base, &args.lambda, rank)?;
                shapes.push((series, rank, lam.coords().to_vec()));
            }
            None => {
                for lam in sweep_lambdas(rank) {
                    shapes.push((series, rank, lam));
                }
            }
        }
    } else {
        for (series, rank) in [
            (Series::A, 1),
            (Series::A, 2),
            (Series::B, 2),
            (Series::A, 3),
            (Series::G, 2),
        ] {
            for lam in sweep_lambdas(rank) {
                shapes.push((series, rank, lam));
            }
        }
    }

    let tasks: Vec<SweepTask> = shapes
        .iter()
        .flat_map(|(series, rank, lam)| {
            let coords: Vec<String> = lam.iter().map(|c| c.to_string()).collect();
            let label = format!("{} lambda={}", type_label(*series, *rank), coords.join(","));
            names.iter().map(move |&name| SweepTask {
                label: label.clone(),
                series: *series,
                rank: *rank,
                lambda: lam.clone(),
                name,
            })
        })
        .collect();

    let pool = thread_pool(base.jobs)?;
    let reports: Vec<(String, IdentityReport)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                let wg = Arc::new(WeylGroup::new(
                    RootSystem::build(t.series, t.rank).expect("validated type"),
                ));
                let lam = Weight(t.lambda.clone());
                let j = wg.root_system().j_of(&lam).expect("dominant shape");
                let par = Qbg::build(wg.clone(), &j);
                let full = Qbg::build(wg.clone(), &[]);
                (t.label.clone(), verify_identity(t.name, &par, &full, &lam, seed))
            })
            .collect()
    });

    let failed: usize = reports.iter().filter(|(_, r)| !r.passed()).count();
    let content = if base.format == "json" {
        let items: Vec<serde_json::Value> = reports
            .iter()
            .map(|(label, r)| {
                json!({
                    "case": label,
                    "identity": r.name,
                    "status": if r.passed() { "ok" } else { "fail" },
                    "cases": r.cases,
                    "failures": r.failures.iter().map(|f| json!({
                        "case": f.case,
                        "lhs": f.lhs,
                        "rhs": f.rhs,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        format!("{}\n", serde_json::to_string_pretty(&json!(items)).unwrap())
    } else {
        let mut s = String::new();
        for (label, r) in &reports {
            if r.passed() {
                s.push_str(&format!("ok    {} {} (cases={})\n", label, r.name, r.cases));
            } else {
                s.push_str(&format!(
                    "FAIL  {} {} (cases={}, failures={})\n",
                    label,
                    r.name,
                    r.cases,
                    r.failures.len()
                ));
                for f in &r.failures {
                    s.push_str(&format!("      {}: {} != {}\n", f.case, f.lhs, f.rhs));
                }
            }
        }
        s.push_str(&format!(
            "{}: {}/{} identity sweeps passed\n",
            if failed == 0 { "ok" } else { "FAIL" },
            reports.len() - failed,
            reports.len()
        ));
        s
    };
    emit(&base.out, &content)?;
    Ok(if failed == 0 { 0 } else { 1 })
}
