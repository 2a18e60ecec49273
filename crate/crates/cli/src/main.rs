//! Command-line surface for the invariants library.
//!
//! Exit codes: 0 success, 1 mathematical failure (violated invariant or an
//! undetermined leading term), 2 input error.

use clap::{Parser, Subcommand};
use hnnkit::alexander::{alexander_norm, alexander_polynomial};
use hnnkit::group_ring::fox_matrix;
use hnnkit::hnn::{Character, GroupContext};
use hnnkit::l2::{bns_components, check_inequalities, l2_polytope, thurston_width, PieceKind};
use hnnkit::novikov::bns_membership_f2;
use hnnkit::polytopes::VirtualPolytope;
use hnnkit::selftest;
use hnnkit::upg::{upg_sigma, upg_torsion_polytope, Certificate};
use hnnkit::words::Endomorphism;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hnnkit",
    about = "Exact invariants of descending HNN extensions of free groups",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Scan height for Novikov leading-term searches (scaled level units).
    #[arg(long, global = true, default_value_t = 64)]
    max_height: i64,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 12345)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Fox matrix of the endomorphism.
    FoxMatrix { endo: PathBuf },
    /// Print the free part of the abelianization of G.
    Abelianize { endo: PathBuf },
    /// Alexander polynomial, Newton polytope, and norm evaluations.
    Alexander {
        endo: PathBuf,
        /// Optional character at which to evaluate the Alexander norm.
        #[arg(long)]
        phi: Option<String>,
    },
    /// Decide whether [-phi] lies in Sigma(G) (G = F_2 *_g).
    BnsTest {
        endo: PathBuf,
        #[arg(long)]
        phi: String,
    },
    /// Certified decomposition of the character circle by membership.
    BnsComponents { endo: PathBuf },
    /// The seminorm of the torsion polytope at a character.
    ThurstonNorm {
        endo: PathBuf,
        #[arg(long)]
        phi: String,
    },
    /// Reconstruct the torsion polytope from support samples.
    L2Polytope { endo: PathBuf },
    /// Evaluate the closed-form recursion for a certified automorphism.
    UpgPolytope { endo: PathBuf, cert: PathBuf },
    /// Sigma membership through the certified hyperplane description.
    UpgSigma {
        endo: PathBuf,
        cert: PathBuf,
        #[arg(long)]
        phi: String,
    },
    /// Check the Alexander-vs-torsion norm inequality on random samples.
    VerifyInequalities {
        /// Check a specific endomorphism instead of random ones.
        endo: Option<PathBuf>,
        /// Directions per endomorphism.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Number of random endomorphisms when no file is given.
        #[arg(long, default_value_t = 20)]
        endos: usize,
    },
    /// Run the full verification suite.
    Selftest,
}

enum CmdError {
    Input(String),
    Math(String),
}

impl CmdError {
    fn code(&self) -> u8 {
        match self {
            CmdError::Input(_) => 2,
            CmdError::Math(_) => 1,
        }
    }
    fn kind(&self) -> &'static str {
        match self {
            CmdError::Input(_) => "input",
            CmdError::Math(_) => "math",
        }
    }
    fn message(&self) -> &str {
        match self {
            CmdError::Input(m) | CmdError::Math(m) => m,
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> CmdError {
    CmdError::Input(e.to_string())
}

fn math_err<E: std::fmt::Display>(e: E) -> CmdError {
    CmdError::Math(e.to_string())
}

fn load_context(path: &PathBuf) -> Result<GroupContext, CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("{}: {}", path.display(), e)))?;
    let endo = Endomorphism::parse(&text).map_err(input_err)?;
    GroupContext::new(endo).map_err(input_err)
}

fn parse_phi(text: &str, ctx: &GroupContext) -> Result<Character, CmdError> {
    Character::parse(text, ctx).map_err(input_err)
}

fn polytope_json(ctx: &GroupContext, p: &VirtualPolytope) -> serde_json::Value {
    p.to_json(&ctx.ab().basis_labels)
}

fn run(cli: &Cli) -> Result<serde_json::Value, CmdError> {
    match &cli.command {
        Command::FoxMatrix { endo } => {
            let ctx = load_context(endo)?;
            let fox = fox_matrix(ctx.endo());
            let entries: Vec<Vec<String>> = fox
                .entries
                .iter()
                .map(|row| row.iter().map(|e| format!("{:?}", e)).collect())
                .collect();
            if !cli.json {
                for row in &entries {
                    println!("[ {} ]", row.join(" | "));
                }
            }
            Ok(json!({ "rank": ctx.rank(), "entries": entries }))
        }
        Command::Abelianize { endo } => {
            let ctx = load_context(endo)?;
            let ab = ctx.ab();
            let images: Vec<(String, Vec<i64>)> = (1..=ctx.rank())
                .map(|k| {
                    (
                        hnnkit::words::letter_char(k as i8).to_string(),
                        ab.gen_image(k).to_vec(),
                    )
                })
                .collect();
            if !cli.json {
                println!("b1(G) = {}", ab.rank);
                println!("basis: ({})", ab.basis_labels.join(", "));
                for (name, img) in &images {
                    println!("p0({}) = {:?}", name, img);
                }
                if !ab.torsion.is_empty() {
                    println!("torsion invariant factors: {:?}", ab.torsion);
                }
            }
            Ok(json!({
                "b1": ab.rank,
                "basis": ab.basis_labels,
                "images": images.iter().map(|(n, i)| json!({"gen": n, "coords": i})).collect::<Vec<_>>(),
                "torsion": ab.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            }))
        }
        Command::Alexander { endo, phi } => {
            let ctx = load_context(endo)?;
            let res = alexander_polynomial(&ctx).map_err(math_err)?;
            let delta_text = res.delta.display(&ctx.ab().basis_labels);
            let newton = polytope_json(&ctx, &res.polytope);
            let norm = match phi {
                Some(text) => {
                    let phi = parse_phi(text, &ctx)?;
                    Some(alexander_norm(&res, &phi).to_string())
                }
                None => None,
            };
            if !cli.json {
                println!("delta = {}", delta_text);
                println!("newton = {}", newton);
                if let Some(n) = &norm {
                    println!("alexander norm at phi: {}", n);
                }
            }
            Ok(json!({
                "delta": delta_text,
                "b1": ctx.b1(),
                "newton": newton,
                "norm": norm,
            }))
        }
        Command::BnsTest { endo, phi } => {
            let ctx = load_context(endo)?;
            if ctx.rank() != 2 {
                return Err(CmdError::Input(
                    "bns-test requires an endomorphism of the rank-two free group".into(),
                ));
            }
            let phi = parse_phi(phi, &ctx)?;
            let rep = bns_membership_f2(&ctx, &phi).map_err(math_err)?;
            let verdict = if rep.member { "in" } else { "out" };
            let chart = rep.chart.as_ref().map(|c| {
                json!({
                    "basis": [c.basis.0.to_string(), c.basis.1.to_string()],
                    "conjugator": c.conj.to_string(),
                    "t_prime": c.t_prime.to_string(),
                })
            });
            if !cli.json {
                println!("[-phi] in Sigma(G): {}", verdict);
                if let Some(kind) = &rep.exceptional {
                    println!("exceptional ray: {:?}", kind);
                }
                if let Some(c) = rep.chart.as_ref() {
                    println!(
                        "chart: basis ({}, {}), conjugator {}, t' = {}",
                        c.basis.0,
                        c.basis.1,
                        if c.conj.is_identity() { "1".into() } else { c.conj.to_string() },
                        c.t_prime
                    );
                }
                if let Some(e) = &rep.test_element {
                    println!("E = {:?}", e);
                }
                if let Some(m) = &rep.mu {
                    println!("mu_phi(E) = {:?} at level {}", m, rep.mu_level.unwrap());
                }
            }
            Ok(json!({
                "membership": verdict,
                "exceptional": rep.exceptional.map(|e| format!("{:?}", e)),
                "chart": chart,
                "test_element": rep.test_element.map(|e| format!("{:?}", e)),
                "mu": rep.mu.map(|m| format!("{:?}", m)),
                "mu_level": rep.mu_level,
            }))
        }
        Command::BnsComponents { endo } => {
            let ctx = load_context(endo)?;
            if ctx.rank() != 2 {
                return Err(CmdError::Input(
                    "bns-components requires an endomorphism of the rank-two free group".into(),
                ));
            }
            let report = bns_components(&ctx).map_err(math_err)?;
            if !cli.json {
                println!(
                    "plane: ({}, {})",
                    report.plane_labels.0, report.plane_labels.1
                );
                for piece in &report.pieces {
                    match piece.kind {
                        PieceKind::Ray { dir } => println!(
                            "  ray {:?}: {}",
                            dir,
                            if piece.member { "in" } else { "out" }
                        ),
                        PieceKind::Arc { from, to, .. } => println!(
                            "  arc {:?} -> {:?}: {}",
                            from,
                            to,
                            if piece.member { "in" } else { "out" }
                        ),
                    }
                }
                println!("components of Sigma on this circle: {}", report.components);
            }
            Ok(report.to_json())
        }
        Command::ThurstonNorm { endo, phi } => {
            let ctx = load_context(endo)?;
            let phi = parse_phi(phi, &ctx)?;
            let width = thurston_width(&ctx, &phi, cli.max_height).map_err(math_err)?;
            if !cli.json {
                println!("thurston norm = {}", width);
            }
            Ok(json!({
                "phi": phi.display_on_generators(ctx.ab()),
                "norm": width.to_string(),
            }))
        }
        Command::L2Polytope { endo } => {
            let ctx = load_context(endo)?;
            let res = l2_polytope(&ctx, cli.max_height, cli.seed);
            let samples: Vec<serde_json::Value> = res
                .samples
                .iter()
                .map(|s| {
                    json!({
                        "phi": s.phi.coords,
                        "level": s.level,
                        "witnesses": s.witnesses,
                        "determinate": s.determinate,
                    })
                })
                .collect();
            let polytope = res.virtual_polytope().map(|p| polytope_json(&ctx, &p));
            if !cli.json {
                match &polytope {
                    Some(p) if res.verified => println!("polytope = {}", p),
                    Some(p) => println!("UNVERIFIED candidate = {}", p),
                    None => println!("reconstruction failed; raw samples attached"),
                }
                println!("verified: {}", res.verified);
            }
            let out = json!({
                "verified": res.verified,
                "polytope": polytope,
                "samples": samples,
                "failures": res.failures,
            });
            if res.verified {
                Ok(out)
            } else {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&out).unwrap());
                }
                Err(CmdError::Math("torsion polytope reconstruction not verified".into()))
            }
        }
        Command::UpgPolytope { endo, cert } => {
            let ctx = load_context(endo)?;
            let cert_text = std::fs::read_to_string(cert)
                .map_err(|e| CmdError::Input(format!("{}: {}", cert.display(), e)))?;
            let cert = Certificate::parse(&cert_text, ctx.rank()).map_err(input_err)?;
            let data = upg_torsion_polytope(&ctx, &cert).map_err(math_err)?;
            let poly = polytope_json(&ctx, &VirtualPolytope::from_polytope(data.polytope.clone()));
            let t_list: Vec<String> = data.t_list.iter().map(|t| t.to_string()).collect();
            if !cli.json {
                println!("stable letters: {}", t_list.join(", "));
                println!("polytope = {}", poly);
                println!("(valid for every quotient level k, including k = infinity)");
            }
            Ok(json!({ "t_list": t_list, "polytope": poly }))
        }
        Command::UpgSigma { endo, cert, phi } => {
            let ctx = load_context(endo)?;
            let cert_text = std::fs::read_to_string(cert)
                .map_err(|e| CmdError::Input(format!("{}: {}", cert.display(), e)))?;
            let cert = Certificate::parse(&cert_text, ctx.rank()).map_err(input_err)?;
            let phi = parse_phi(phi, &ctx)?;
            let sig = upg_sigma(&ctx, &cert, &phi).map_err(math_err)?;
            if !cli.json {
                println!("[phi] in Sigma(G): {}", if sig.member { "in" } else { "out" });
                println!("excluded hyperplanes (normal vectors in H):");
                for h in &sig.hyperplanes {
                    println!("  {:?}", h);
                }
            }
            Ok(json!({
                "phi": phi.display_on_generators(ctx.ab()),
                "membership": if sig.member { "in" } else { "out" },
                "hyperplanes": sig.hyperplanes,
                "face_is_point": sig.face_is_point,
            }))
        }
        Command::VerifyInequalities { endo, samples, endos } => {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cli.seed);
            let mut reports = Vec::new();
            let mut total_violations = 0usize;
            let mut total_undetermined = 0usize;
            let contexts: Vec<GroupContext> = match endo {
                Some(path) => vec![load_context(path)?],
                None => (0..*endos)
                    .map(|_| {
                        GroupContext::new(hnnkit::l2::random_injective_endo(&mut rng, 2, 5))
                            .expect("folding-verified endomorphism")
                    })
                    .collect(),
            };
            for ctx in &contexts {
                let dirs: Vec<Character> = (0..*samples)
                    .map(|_| hnnkit::l2::random_direction(&mut rng, ctx.b1()))
                    .collect();
                let report = check_inequalities(ctx, &dirs, cli.max_height);
                total_violations += report.violations;
                total_undetermined += report.undetermined;
                if !cli.json {
                    println!(
                        "endo (b1 = {}): {} checks, {} violations, {} undetermined{}",
                        report.b1,
                        report.checks.len(),
                        report.violations,
                        report.undetermined,
                        match report.fibred_equality {
                            Some(true) => ", fibred equality verified",
                            Some(false) => ", FIBRED EQUALITY FAILED",
                            None => "",
                        }
                    );
                }
                if report.fibred_equality == Some(false) {
                    total_violations += 1;
                }
                reports.push(json!({
                    "endo": ctx.endo().display(),
                    "b1": report.b1,
                    "checks": report.checks.len(),
                    "violations": report.violations,
                    "undetermined": report.undetermined,
                    "fibred_equality": report.fibred_equality,
                }));
            }
            let out = json!({
                "reports": reports,
                "violations": total_violations,
                "undetermined": total_undetermined,
            });
            if total_violations > 0 {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&out).unwrap());
                }
                return Err(CmdError::Math(format!(
                    "{} inequality violation(s)",
                    total_violations
                )));
            }
            Ok(out)
        }
        Command::Selftest => {
            let results = selftest::run_all(cli.seed);
            let mut all_passed = true;
            for r in &results {
                if !cli.json {
                    println!("{}", r.line());
                }
                all_passed &= r.passed;
            }
            let out = json!({
                "passed": all_passed,
                "checks": results
                    .iter()
                    .map(|r| json!({
                        "name": r.name,
                        "passed": r.passed,
                        "elapsed_s": r.elapsed.as_secs_f64(),
                        "details": r.details,
                    }))
                    .collect::<Vec<_>>(),
            });
            if all_passed {
                Ok(out)
            } else {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&out).unwrap());
                }
                Err(CmdError::Math("selftest failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(value) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            if cli.json {
                let obj = json!({ "error": { "kind": err.kind(), "message": err.message() } });
                println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            } else {
                eprintln!("error ({}): {}", err.kind(), err.message());
            }
            ExitCode::from(err.code())
        }
    }
}
