use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use halfstep::cellspace::{parse_sheaf, sections, sections_c, verdier_dual, SheafComplex, StratPoset};
use halfstep::dz::{dual, minimal_model, CutParam, Flavor, Side};
use halfstep::intlin::FgAbGroup;
use halfstep::perv::{rp3_cone_battery, truncate, verify_tstructure, BatteryLine, Profile, Structure, VerifyReport};
use serde::Serialize;

use crate::io::{self, ComplexDoc, Object, Space};
use crate::CliError;

/// A finished command: text for stdout and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

type Groups = BTreeMap<i64, FgAbGroup>;

pub fn structure_name(st: Structure) -> &'static str {
    match st {
        Structure::Sd => "sd",
        Structure::Ks => "ks",
    }
}

pub fn flavor_name(f: Flavor) -> &'static str {
    match f {
        Flavor::LeGt => "le-gt",
        Flavor::LtGe => "lt-ge",
    }
}

/// The space and sheaf a command acts on, and whether it was read as a module complex.
pub struct Target {
    pub space: Space,
    pub k: SheafComplex,
    pub module: bool,
}

/// `--sheaf` is a file if one exists at that path, else an expression on `--space`.
pub fn target(space: Option<&str>, sheaf: Option<&str>) -> Result<Target, CliError> {
    let cwd = PathBuf::from(".");
    let given = space.map(|s| Space::resolve(s, &cwd)).transpose()?;
    match sheaf {
        Some(path) if Path::new(path).is_file() => {
            let obj = io::load_object(Path::new(path))?;
            let module = matches!(obj, Object::Module(_));
            let (own, k) = obj.as_sheaf();
            if let Some(g) = &given {
                if !module && *g.poset != *own.poset {
                    return Err(CliError::Input(format!("{path}: base `{}` differs from --space `{}`", own.name, g.name)));
                }
            }
            Ok(Target { space: own, k, module })
        }
        _ => {
            let space = given.ok_or_else(|| CliError::Input("--space is required unless --sheaf names a file".into()))?;
            let k = parse_sheaf(&space.poset, sheaf.unwrap_or("constant")).map_err(|e| CliError::Input(e.to_string()))?;
            Ok(Target { space, k, module: false })
        }
    }
}

#[derive(Serialize)]
struct Witness {
    cell: String,
    dim: usize,
    probe: &'static str,
    degree: i64,
}

#[derive(Serialize)]
struct SideReport {
    side: &'static str,
    member: bool,
    witnesses: Vec<Witness>,
}

fn side_report(base: &StratPoset, p: &Profile, c: CutParam, st: Structure, side: Side, strict: bool) -> SideReport {
    let witnesses: Vec<Witness> = p
        .witnesses(c, st, side, strict)
        .into_iter()
        .map(|w| Witness {
            cell: base.id(w.cell).to_string(),
            dim: base.dim(w.cell),
            probe: if side == Side::Le { "stalk" } else { "costalk" },
            degree: w.degree,
        })
        .collect();
    let name = match (side, strict) {
        (Side::Le, false) => "le",
        (Side::Le, true) => "lt",
        (Side::Ge, false) => "ge",
        (Side::Ge, true) => "gt",
    };
    SideReport { side: name, member: witnesses.is_empty(), witnesses }
}

#[derive(Serialize)]
struct MembershipReport {
    command: &'static str,
    space: String,
    cut: CutParam,
    structure: &'static str,
    sides: Vec<SideReport>,
}

pub fn membership(t: &Target, c: CutParam, st: Structure, sides: &[Side]) -> Outcome {
    let p = Profile::of(&t.k);
    let sides: Vec<SideReport> = sides.iter().map(|&s| side_report(t.k.base(), &p, c, st, s, false)).collect();
    let ok = sides.iter().all(|s| s.member);
    let r = MembershipReport { command: "membership", space: t.space.name.clone(), cut: c, structure: structure_name(st), sides };
    Outcome { text: io::to_json(&r), ok }
}

/// Nonzero stalk cohomology by cell id.
fn stalks(k: &SheafComplex) -> BTreeMap<String, Groups> {
    let base = k.base();
    k.stalk_cohomology()
        .into_iter()
        .enumerate()
        .filter(|(_, h)| !h.is_empty())
        .map(|(s, h)| (base.id(s).to_string(), h))
        .collect()
}

#[derive(Serialize)]
struct Triangle {
    ok: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct TruncateReport {
    command: &'static str,
    space: String,
    cut: CutParam,
    flavor: &'static str,
    structure: &'static str,
    lower: SideReport,
    upper: SideReport,
    triangle: Triangle,
    lower_stalks: BTreeMap<String, Groups>,
    upper_stalks: BTreeMap<String, Groups>,
    files: Vec<String>,
}

pub fn truncate_cmd(t: &Target, c: CutParam, flavor: Flavor, st: Structure, out: Option<&Path>) -> Result<Outcome, CliError> {
    let tri = truncate(&t.k, c, flavor, st);
    let base = t.k.base();
    let lower = side_report(base, &Profile::of(&tri.lower), c, st, Side::Le, flavor == Flavor::LtGe);
    let upper = side_report(base, &Profile::of(&tri.upper), c, st, Side::Ge, flavor == Flavor::LeGt);
    let check = tri.verify();
    let triangle = Triangle { ok: check.is_ok(), error: check.err() };
    let mut files = Vec::new();
    if let Some(dir) = out {
        for (name, k) in [("lower.json", &tri.lower), ("upper.json", &tri.upper)] {
            let p = dir.join(name);
            // Acyclic parts are written as the zero sheaf.
            let k = if k.is_stalkwise_acyclic() { SheafComplex::zero(base.clone()) } else { k.clone() };
            io::save_object(&p, &t.space, &k, t.module)?;
            files.push(p.display().to_string());
        }
    }
    let ok = lower.member && upper.member && triangle.ok;
    let r = TruncateReport {
        command: "truncate",
        space: t.space.name.clone(),
        cut: c,
        flavor: flavor_name(flavor),
        structure: structure_name(st),
        lower_stalks: stalks(&tri.lower),
        upper_stalks: stalks(&tri.upper),
        lower,
        upper,
        triangle,
        files,
    };
    let text = io::to_json(&r);
    if let Some(dir) = out {
        io::write(&dir.join("triangle.json"), &text)?;
    }
    Ok(Outcome { text, ok })
}

#[derive(Serialize)]
struct DualReport {
    command: &'static str,
    space: String,
    stalks: BTreeMap<String, Groups>,
    biduality: bool,
}

pub fn dual_cmd(t: &Target, out: Option<&Path>) -> Result<Outcome, CliError> {
    let d = if t.module {
        let x = dual(t.k.complex());
        io::Object::Module(x).as_sheaf().1
    } else {
        verdier_dual(&t.k)
    };
    let dd = if t.module { io::Object::Module(dual(d.complex())).as_sheaf().1 } else { verdier_dual(&d) };
    let biduality = dd.stalk_cohomology() == t.k.stalk_cohomology();
    if let Some(p) = out {
        io::save_object(p, &t.space, &d, t.module)?;
    }
    let r = DualReport { command: "dual", space: t.space.name.clone(), stalks: stalks(&d), biduality };
    Ok(Outcome { text: io::to_json(&r), ok: biduality })
}

#[derive(Serialize)]
struct SectionsReport {
    command: &'static str,
    space: String,
    over: String,
    sections: Groups,
    #[serde(skip_serializing_if = "Option::is_none")]
    compact: Option<Groups>,
}

/// `all`, `star:CELL` (the open star) or `minus:CELL` (the complement of the closure).
fn region(t: &Target, over: &str) -> Result<Vec<bool>, CliError> {
    let base = t.k.base();
    let cell = |id: &str| base.cell(id).map_err(|e| CliError::Input(format!("--over {over}: {e}")));
    if over == "all" {
        return Ok(vec![true; base.len()]);
    }
    if let Some(id) = over.strip_prefix("star:") {
        return Ok(base.mask(&base.star(cell(id)?)));
    }
    if let Some(id) = over.strip_prefix("minus:") {
        let s = cell(id)?;
        return Ok(base.mask(&base.closure(s)).iter().map(|&z| !z).collect());
    }
    Err(CliError::Input(format!("--over `{over}`: expected all, star:CELL or minus:CELL")))
}

pub fn sections_cmd(t: &Target, over: &str, out: Option<&Path>) -> Result<Outcome, CliError> {
    let mask = region(t, over)?;
    let rg = sections(&t.k, &mask).map_err(|e| CliError::Input(e.to_string()))?;
    let rg = minimal_model(&rg).complex;
    let compact = if over == "all" {
        Some(sections_c(&t.k, &mask).map_err(|e| CliError::Input(e.to_string()))?.cohomology_all())
    } else {
        None
    };
    if let Some(p) = out {
        io::write(p, &io::to_json(&ComplexDoc::of(&rg)))?;
    }
    let r = SectionsReport { command: "sections", space: t.space.name.clone(), over: over.to_string(), sections: rg.cohomology_all(), compact };
    Ok(Outcome { text: io::to_json(&r), ok: true })
}

pub fn verify_cmd(space: &Space, samples: usize, seed: u64, grid: &[CutParam]) -> Outcome {
    let r: VerifyReport = verify_tstructure(&space.poset, samples, seed, grid);
    Outcome { text: io::to_json(&r), ok: r.passed() }
}

pub fn example_cmd(name: &str) -> Result<(Outcome, Vec<BatteryLine>), CliError> {
    if name != "rp3-cone" {
        return Err(CliError::Input(format!("unknown example `{name}`; available: rp3-cone")));
    }
    let lines = rp3_cone_battery();
    let mut text = String::new();
    for l in &lines {
        let mark = if l.ok { "ok  " } else { "FAIL" };
        text.push_str(&format!("{mark} {}: expected {}, computed {}\n", l.name, l.expected, l.computed));
    }
    let bad = lines.iter().filter(|l| !l.ok).count();
    text.push_str(&format!("{} of {} match\n", lines.len() - bad, lines.len()));
    Ok((Outcome { text, ok: bad == 0 }, lines))
}

/// `lo:hi:step` with exact rationals, e.g. `-3:3:1/4`.
pub fn parse_grid(s: &str) -> Result<Vec<CutParam>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || CliError::Input(format!("--grid `{s}`: expected lo:hi:step with a positive step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let p = |x: &str| x.parse::<CutParam>().map_err(|_| bad());
    let (lo, hi, step) = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
    if step <= CutParam::int(0) {
        return Err(bad());
    }
    Ok(CutParam::grid(lo, hi, step))
}
