//! JSON documents for spaces, module complexes and sheaf complexes.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use halfstep::cellspace::{builtin, resolve, PosetSpec, SheafComplex, StratPoset, ValueSheaf};
use halfstep::dz::{ChainMap, FreeComplex};
use halfstep::intlin::IntMatrix;
use halfstep::Int;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

type Rows = Vec<Vec<Int>>;

/// `{"lo":int,"ranks":[int],"diffs":[[[int]]]}`; `diffs[k]` maps degree `lo + k` to `lo + k + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub lo: i64,
    pub ranks: Vec<usize>,
    #[serde(default)]
    pub diffs: Vec<Rows>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub cell: String,
}

/// `{"base":name,"lo":int,"generators":[[{"cell":id}]],"diffs":[[[int]]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafDoc {
    pub base: String,
    #[serde(default)]
    pub lo: i64,
    pub generators: Vec<Vec<Generator>>,
    #[serde(default)]
    pub diffs: Vec<Rows>,
}

/// Restriction along a cover, with matrices from degree `lo` upward.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub face: String,
    pub coface: String,
    #[serde(default)]
    pub lo: i64,
    pub mats: Vec<Rows>,
}

/// Value form: a complex on every open star and restriction maps along covers.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueDoc {
    pub base: String,
    pub values: BTreeMap<String, ComplexDoc>,
    #[serde(default)]
    pub maps: Vec<MapDoc>,
}

fn matrix(rows: &Rows, r: usize, c: usize, what: &str) -> Result<IntMatrix, CliError> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(CliError::Input(format!("{what}: expected a {r}×{c} matrix")));
    }
    Ok(IntMatrix::from_nested(rows, c).expect("shape checked"))
}

impl ComplexDoc {
    pub fn of(x: &FreeComplex) -> ComplexDoc {
        ComplexDoc { lo: x.lo(), ranks: x.ranks().to_vec(), diffs: x.diffs().iter().map(IntMatrix::to_nested).collect() }
    }

    pub fn build(&self) -> Result<FreeComplex, CliError> {
        let n = self.ranks.len();
        if self.diffs.len() != n.saturating_sub(1) {
            return Err(CliError::Input(format!("{n} degrees need {} differentials", n.saturating_sub(1))));
        }
        let mut diffs = Vec::new();
        for (k, d) in self.diffs.iter().enumerate() {
            let what = format!("differential in degree {}", self.lo + k as i64);
            diffs.push(matrix(d, self.ranks[k + 1], self.ranks[k], &what)?);
        }
        FreeComplex::new(self.lo, self.ranks.clone(), diffs).map_err(|e| CliError::Input(e.to_string()))
    }
}

/// A space: a built-in name or a file, with the reference written into sheaf documents.
#[derive(Clone, Debug)]
pub struct Space {
    pub name: String,
    pub poset: Arc<StratPoset>,
    /// Present when the space came from a file.
    pub spec: Option<PosetSpec>,
}

impl Space {
    pub fn point() -> Space {
        Space::builtin("point").expect("built-in")
    }

    fn builtin(name: &str) -> Option<Space> {
        let x = builtin::by_name(name)?;
        Some(Space { name: name.to_string(), poset: Arc::new(x.face_poset()), spec: None })
    }

    /// Resolves a reference: a built-in name, else a path relative to `dir`.
    pub fn resolve(reference: &str, dir: &Path) -> Result<Space, CliError> {
        if let Some(s) = Space::builtin(reference) {
            return Ok(s);
        }
        let mut path = dir.join(reference);
        if !path.exists() && path.extension().is_none() {
            path.set_extension("json");
        }
        if !path.exists() {
            let names = builtin::NAMES.join(", ");
            return Err(CliError::Input(format!("space `{reference}` is neither a built-in ({names}) nor a file")));
        }
        let text = read(&path)?;
        let spec: PosetSpec = parse(&text, &path)?;
        let poset = StratPoset::from_spec(&spec).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(Space { name: reference.to_string(), poset: Arc::new(poset), spec: Some(spec) })
    }
}

/// What a `--sheaf` document holds.
#[derive(Clone, Debug)]
pub enum Object {
    /// A complex of abelian groups, handled as a sheaf on a point.
    Module(FreeComplex),
    Sheaf(Space, SheafComplex),
}

impl Object {
    /// The object as a sheaf complex with its space.
    pub fn as_sheaf(&self) -> (Space, SheafComplex) {
        match self {
            Object::Module(x) => {
                let p = Space::point();
                let cells = x.degrees().map(|i| (i, vec![0; x.rank(i)])).collect();
                let k = SheafComplex::new(p.poset.clone(), x.clone(), cells).expect("point sheaf");
                (p, k)
            }
            Object::Sheaf(s, k) => (s.clone(), k.clone()),
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Parses with serde locations, prefixed by the path.
pub fn parse<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn cell(base: &StratPoset, id: &str, path: &Path) -> Result<usize, CliError> {
    base.cell(id).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Loads a module complex, a sheaf document, or a value-form sheaf document.
pub fn load_object(path: &Path) -> Result<Object, CliError> {
    let text = read(path)?;
    let v: serde_json::Value = parse(&text, path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let has = |k: &str| v.get(k).is_some();
    if has("values") {
        let doc: ValueDoc = parse(&text, path)?;
        load_values(&doc, &dir, path)
    } else if has("generators") {
        let doc: SheafDoc = parse(&text, path)?;
        let space = Space::resolve(&doc.base, &dir)?;
        let k = sheaf_from_doc(&doc, &space.poset, path)?;
        Ok(Object::Sheaf(space, k))
    } else if has("ranks") {
        let doc: ComplexDoc = parse(&text, path)?;
        Ok(Object::Module(doc.build().map_err(|e| e.within(path))?))
    } else {
        Err(CliError::Input(format!("{}: expected a module complex, a sheaf, or a value-form sheaf", path.display())))
    }
}

pub fn sheaf_from_doc(doc: &SheafDoc, base: &Arc<StratPoset>, path: &Path) -> Result<SheafComplex, CliError> {
    let ranks: Vec<usize> = doc.generators.iter().map(Vec::len).collect();
    let cx = ComplexDoc { lo: doc.lo, ranks, diffs: doc.diffs.clone() }.build().map_err(|e| e.within(path))?;
    let mut cells = BTreeMap::new();
    for (k, gens) in doc.generators.iter().enumerate() {
        let ids = gens.iter().map(|g| cell(base, &g.cell, path)).collect::<Result<Vec<_>, _>>()?;
        cells.insert(doc.lo + k as i64, ids);
    }
    SheafComplex::new(base.clone(), cx, cells).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_values(doc: &ValueDoc, dir: &Path, path: &Path) -> Result<Object, CliError> {
    let space = Space::resolve(&doc.base, dir)?;
    let base = &space.poset;
    let mut values = vec![FreeComplex::zero(); base.len()];
    for (id, c) in &doc.values {
        values[cell(base, id, path)?] = c.build().map_err(|e| e.within(path))?;
    }
    let mut maps = HashMap::new();
    for m in &doc.maps {
        let (s, t) = (cell(base, &m.face, path)?, cell(base, &m.coface, path)?);
        let (src, dst) = (&values[s], &values[t]);
        let mut mats = BTreeMap::new();
        for (k, rows) in m.mats.iter().enumerate() {
            let i = m.lo + k as i64;
            let what = format!("restriction {} → {} in degree {i}", m.face, m.coface);
            mats.insert(i, matrix(rows, dst.rank(i), src.rank(i), &what).map_err(|e| e.within(path))?);
        }
        let f = ChainMap::new(src.clone(), dst.clone(), mats).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        maps.insert((s, t), f);
    }
    let v = ValueSheaf::new(base.clone(), values, maps).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(Object::Sheaf(space.clone(), resolve(&v).complex))
}

pub fn sheaf_doc(k: &SheafComplex, base_ref: &str) -> SheafDoc {
    let cx = k.complex();
    let base = k.base();
    let generators = cx
        .degrees()
        .map(|i| k.cells(i).iter().map(|&s| Generator { cell: base.id(s).to_string() }).collect())
        .collect();
    SheafDoc { base: base_ref.to_string(), lo: cx.lo(), generators, diffs: cx.diffs().iter().map(IntMatrix::to_nested).collect() }
}

/// Canonical pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        }
    }
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes `obj` in the form it was read: module complexes stay module complexes.
/// Sheaves on a file-defined space get a copy of the space next to them.
pub fn save_object(path: &Path, space: &Space, k: &SheafComplex, as_module: bool) -> Result<(), CliError> {
    if as_module {
        return write(path, &to_json(&ComplexDoc::of(k.complex())));
    }
    let base_ref = match &space.spec {
        None => space.name.clone(),
        Some(spec) => {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let name = format!("{stem}.space.json");
            let target: PathBuf = path.with_file_name(&name);
            write(&target, &to_json(spec))?;
            name
        }
    };
    write(path, &to_json(&sheaf_doc(k, &base_ref)))
}
