use std::error::Error;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use mk3_core::arith::perfect_square;
use mk3_core::brauer::{bm_verdict, survey_counts, BmVerdict};
use mk3_core::counting::{count_points, CheckpointConfig, CountJob};
use mk3_core::forms::TriprojPoint;
use mk3_core::galois_h1::{sigma_pic_u, sigma_pic_w_case_s, sigma_pic_w_case_sprime, InvolutionModule};
use mk3_core::lattice::{
    builtin_gram_s, builtin_gram_sprime, closure_filter, half_class_scan, s_basis_symmetries, sprime_basis_symmetries,
    sublattice_index, GramLattice, HalfClassVerdict,
};
use mk3_core::matrix::IntMatrix;
use mk3_core::padic::{adelic_verdict, LocalVerdict};
use mk3_core::rational::orbit::{family_hypothesis, fiber_point_at_infinity, orbit_explore, orbit_explore_family};
use mk3_core::rational::{integral_points_complete, seed_point, weierstrass_to_fiber};
use mk3_core::rational::integral::enumeration_bound;
use mk3_core::zeta::{picard_bound, quotient_traces, AlgebraicPart, TraceData};

use crate::output::Report;
use crate::{usage_error, FormInput, LatticeName, ModuleName};

type Outcome = Result<Report, Box<dyn Error>>;

/// Fibers between checkpoint writes when --resume is given.
const CLI_CHECKPOINT_FIBERS: u64 = 1 << 24;

/// Measured wall time of the reduced count at p = 7, n = 5 on one core.
const SECONDS_AT_Q_16807: f64 = 5.0;

fn form_json(input: &FormInput) -> Value {
    let mut v = json!({ "coeffs": input.form });
    if let Some(f) = &input.family {
        v["family"] = json!(f);
    }
    v
}

pub fn smooth(input: &FormInput, p: u64) -> Outcome {
    let smooth = input.form.is_smooth_mod_p(p)?;
    Ok(Report::json("smooth", json!({ "form": form_json(input), "p": p, "smooth": smooth }), !smooth))
}

pub fn nondegen(input: &FormInput) -> Outcome {
    let nondegenerate = input.form.is_nondegenerate();
    let mut body = json!({ "form": form_json(input), "nondegenerate": nondegenerate });
    if let Some(f) = &input.family {
        body["family_hypothesis"] = json!(family_hypothesis(f));
    }
    Ok(Report::json("nondegen", body, !nondegenerate))
}

pub fn count(
    input: &FormInput,
    p: u64,
    n: usize,
    threads: Option<usize>,
    resume: Option<std::path::PathBuf>,
    reduction: bool,
    slow: bool,
) -> Outcome {
    if n >= 6 && !slow {
        let q = (p as f64).powi(n as i32);
        let est = SECONDS_AT_Q_16807 * (q / 16807.0).powi(2);
        usage_error(&format!(
            "counting over F_{{{p}^{n}}} is estimated at about {} on one core; pass --slow to run it",
            human_duration(est)
        ));
    }
    let mut job = CountJob::new(input.form.clone(), p, n).with_symmetry_reduction(reduction);
    if let Some(t) = threads {
        job = job.with_threads(t);
    }
    if let Some(path) = resume {
        job.checkpoint = Some(CheckpointConfig { path, resume: true, every_fibers: CLI_CHECKPOINT_FIBERS });
    }
    let total = count_points(&job)?;
    Ok(Report::json("count", json!({ "form": form_json(input), "p": p, "n": n, "N": total }), false))
}

fn human_duration(seconds: f64) -> String {
    match seconds {
        s if s < 120.0 => format!("{s:.0} seconds"),
        s if s < 7200.0 => format!("{:.0} minutes", s / 60.0),
        s if s < 172_800.0 => format!("{:.1} hours", s / 3600.0),
        s => format!("{:.1} days", s / 86_400.0),
    }
}

fn trace_data(counts: Option<&Path>, p: Option<u64>) -> Result<TraceData, Box<dyn Error>> {
    let Some(path) = counts else {
        if p.is_some_and(|p| p != 7) {
            usage_error("--p other than 7 needs --counts");
        }
        return Ok(TraceData::published());
    };
    let text = std::fs::read_to_string(path)?;
    let (file_p, counts) = TraceData::parse_counts(&text)?;
    let p = match (p, file_p) {
        (Some(a), Some(b)) if a != b => usage_error(&format!("--p {a} disagrees with p = {b} in the counts file")),
        (a, b) => a.or(b).unwrap_or(7),
    };
    Ok(TraceData::new(p, counts, AlgebraicPart::REFERENCE)?)
}

pub fn zeta(counts: Option<&Path>, p: Option<u64>, bound_only: bool) -> Outcome {
    let data = trace_data(counts, p)?;
    let pb = picard_bound(&data)?;
    if bound_only {
        return Ok(Report::json("picard-bound", json!({ "p": data.p, "picard_bound": pb }), false));
    }
    let traces: Vec<String> = quotient_traces(&data).iter().map(BigRational::to_string).collect();
    let body = json!({
        "p": data.p,
        "counts": data.counts.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "algebraic": data.algebraic,
        "transcendental_traces": traces,
        "charpoly": pb.charpoly,
        "unit_roots": pb.unit_roots,
    });
    Ok(Report::json("zeta", body, false))
}

pub fn lattice(builtin: Option<LatticeName>, gram: Option<&Path>) -> Outcome {
    let (lattice, generators, index) = match (builtin, gram) {
        (Some(LatticeName::S), _) => (builtin_gram_s(), Some(s_basis_symmetries()), None),
        (Some(LatticeName::Sprime), _) => {
            let sp = builtin_gram_sprime();
            let index = sublattice_index(&builtin_gram_s().det(), &sp.det())?;
            (sp, Some(sprime_basis_symmetries()), Some(index))
        }
        (None, Some(path)) => (GramLattice::parse(&std::fs::read_to_string(path)?, true)?, None, None),
        (None, None) => usage_error("one of --builtin or --gram is required"),
    };
    let scan = half_class_scan(&lattice)?;
    let admissible = scan.iter().filter(|r| r.verdict == HalfClassVerdict::Admissible).count();
    let mut body = json!({
        "names": lattice.names,
        "gram": lattice.gram,
        "rank": lattice.rank(),
        "det": lattice.det().to_string(),
        "half_classes": scan,
        "admissible": admissible,
    });
    if let Some(gens) = generators {
        let mats: Vec<IntMatrix> = gens.into_iter().map(|(_, m)| m).collect();
        let closure = closure_filter(&lattice, &mats, &scan);
        body["surviving_after_symmetry"] = json!(closure.iter().filter(|c| !c.excluded).count());
        body["closure"] = json!(closure);
    }
    if let Some(i) = index {
        body["index_in_S"] = json!(i.to_string());
    }
    Ok(Report::json("lattice", body, false))
}

fn parse_matrix(text: &str) -> Result<IntMatrix, Box<dyn Error>> {
    let rows = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect())
        .collect::<Result<Vec<Vec<BigInt>>, _>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err("matrix rows must be non-empty and of equal length".into());
    }
    Ok(IntMatrix::from_rows(&rows))
}

pub fn h1(builtin: Option<ModuleName>, matrix: Option<&Path>) -> Outcome {
    let (name, module) = match (builtin, matrix) {
        (Some(ModuleName::CaseS), _) => ("caseS".to_string(), sigma_pic_w_case_s()),
        (Some(ModuleName::CaseSprime), _) => ("caseSprime".to_string(), sigma_pic_w_case_sprime()),
        (Some(ModuleName::PicU), _) => ("picU".to_string(), sigma_pic_u()),
        (None, Some(path)) => (path.display().to_string(), InvolutionModule::new(parse_matrix(&std::fs::read_to_string(path)?)?)?),
        (None, None) => usage_error("one of --builtin or --matrix is required"),
    };
    let group: Vec<String> = module.h1().iter().map(ToString::to_string).collect();
    let body = json!({ "module": name, "rank": module.rank(), "sigma": module.sigma(), "group": group });
    Ok(Report::json("h1", body, false))
}

pub fn local(k: &BigInt) -> Outcome {
    let bundle = adelic_verdict(k);
    let negative = bundle.verdict != LocalVerdict::Exists;
    Ok(Report::json("local", json!(bundle), negative))
}

pub fn bm(ell: &BigInt) -> Outcome {
    let verdict = bm_verdict(ell);
    let negative = matches!(verdict, BmVerdict::HypothesesUnmet { .. });
    let mut body = json!(verdict);
    body["ell"] = json!(ell.to_string());
    Ok(Report::json("bm", body, negative))
}

pub fn ec(ell: &BigInt, shift: &BigInt, n: i64) -> Outcome {
    let (curve, seed) = seed_point(ell)?;
    let mut multiples = Vec::new();
    for i in 1..=n {
        let pt = curve.multiple(i, &seed)?;
        let fiber = match weierstrass_to_fiber(&curve, &pt, shift) {
            Ok((x, y)) => json!({ "x": x.to_string(), "y": y.to_string() }),
            Err(e) => json!({ "exceptional": e.to_string() }),
        };
        multiples.push(json!({ "multiple": i, "point": pt, "fiber": fiber }));
    }
    let body = json!({
        "ell": ell.to_string(),
        "shift": shift.to_string(),
        "curve": curve,
        "seed": seed,
        "infinite_order": curve.infinite_order_certificate(&seed)?,
        "multiples": multiples,
    });
    Ok(Report::json("ec", body, false))
}

fn point_json(pt: &TriprojPoint<BigRational>) -> Value {
    json!(pt.pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>())
}

pub fn orbit(input: &FormInput, ell: &BigInt, height_bound: &BigInt, steps: usize) -> Outcome {
    let shift = match &input.family {
        Some(f) => f.shift.clone(),
        None => perfect_square(&-&input.form.b).ok_or("b is not minus a square, so the form has no fiber shift A")?,
    };
    let (curve, p) = seed_point(ell)?;
    let (x, y) = weierstrass_to_fiber(&curve, &p, &shift)?;
    let seed = fiber_point_at_infinity(x, y);
    let (state, stats) = match &input.family {
        Some(f) => orbit_explore_family(f, &seed, height_bound, steps)?,
        None => orbit_explore(&input.form, &seed, height_bound, steps)?,
    };
    let body = json!({
        "form": form_json(input),
        "ell": ell.to_string(),
        "height_bound": height_bound.to_string(),
        "seed": point_json(&seed),
        "stats": stats,
        "points": state.points.iter().map(point_json).collect::<Vec<_>>(),
    });
    Ok(Report::json("orbit", body, false))
}

pub fn integral(input: &FormInput) -> Outcome {
    let set = integral_points_complete(&input.form)?;
    let points: Vec<Vec<String>> = set.points.iter().map(|p| p.iter().map(ToString::to_string).collect()).collect();
    let body = json!({
        "form": form_json(input),
        "finite": set.is_finite(),
        "points": points,
        "families": set.families,
        "max_coordinate": set.max_coordinate().to_string(),
        "enumeration_bound": enumeration_bound(&input.form).to_string(),
    });
    Ok(Report::json("integral", body, false))
}

pub fn survey(bounds: &[u64], modulus: u64) -> Outcome {
    if modulus == 0 {
        usage_error("--modulus must be at least 1");
    }
    let mut csv = String::from("M,count_local,count_obstructed\n");
    for &m in bounds {
        let row = survey_counts(m, modulus);
        csv.push_str(&format!("{},{},{}\n", row.bound, row.count_local, row.count_obstructed));
    }
    Ok(Report::csv(csv))
}
