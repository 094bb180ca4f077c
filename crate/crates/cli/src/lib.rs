//! Command-line front end: reads curve documents, runs the library
//! operations and prints text or JSON.

pub mod document;
mod render;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use legendrian::contact::{
    apply_contact_map, contact_check, lift_plane_automorphism, make_paraboloidal, ContactError,
    ContactMap,
};
use legendrian::deformation::{
    compute_module_with, emit_family, ModuleError, ModuleOptions, ModulePreset,
};
use legendrian::germ::{
    classify_germ, conormal, fake_conormal, fake_projection, family_conormal, family_fake_conormal,
    plane_projection, AnyGerm, DeformationFamily, FamilyKind, GermError,
};
use serde_json::{json, Value};
use thiserror::Error;

use document::{parse_document, parse_poly, parse_rational, Document};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {message}")]
    Document { location: String, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Computation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 2 for bad input, 3 when a computation fails, 4 for bugs.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Computation(_) => 3,
            CliError::Internal(_) => 4,
            _ => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Json { .. } | CliError::Document { .. } => "parse",
            CliError::Invariant(_) => "invariant",
            CliError::Computation(_) => "computation",
            CliError::Internal(_) => "internal",
        }
    }

    /// `{"error": {...}}`
    pub fn to_json(&self) -> Value {
        let mut e = json!({
            "code": self.exit_code(),
            "kind": self.kind(),
            "message": self.to_string(),
        });
        match self {
            CliError::Json { line, column, .. } => {
                e["line"] = json!(line);
                e["column"] = json!(column);
            }
            CliError::Document { location, .. } => e["location"] = json!(location),
            _ => {}
        }
        json!({ "error": e })
    }
}

impl From<GermError> for CliError {
    fn from(e: GermError) -> Self {
        match e {
            GermError::ConormalUndefined { .. } | GermError::Series(_) => {
                CliError::Computation(e.to_string())
            }
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<ModuleError> for CliError {
    fn from(e: ModuleError) -> Self {
        match e {
            ModuleError::NotGenericPosition { .. } | ModuleError::BranchMismatch { .. } => {
                CliError::Invariant(e.to_string())
            }
            ModuleError::Germ(g) => g.into(),
            _ => CliError::Computation(e.to_string()),
        }
    }
}

impl From<ContactError> for CliError {
    fn from(e: ContactError) -> Self {
        match e {
            ContactError::NotSymplectic(_)
            | ContactError::NotAutomorphism(_)
            | ContactError::ChartLost(_)
            | ContactError::Arity { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Computation(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Projection {
    Plane,
    Fake,
}

#[derive(Debug, Parser)]
#[command(
    name = "legendrian",
    version,
    about = "Conormals, contact maps and deformation modules of curve germs"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Truncation order for documents that do not set one.
    #[arg(long, default_value_t = 128, global = true)]
    pub trunc: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position of each branch relative to the fiber.
    Classify { file: PathBuf },
    /// Conormal of a plane germ or family.
    Conormal { file: PathBuf },
    /// Plane or fake projection of a Legendrian germ or family.
    Project {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Projection::Plane)]
        kind: Projection,
    },
    /// Fake conormal of a fake germ or family.
    FakeConormal { file: PathBuf },
    /// Applies a contact map to the Legendrian germ and checks the contact factor.
    Transform {
        file: PathBuf,
        /// `paraboloidal A B C D`, `legendre` or `lift FILE`.
        #[arg(long, num_args = 1..=5, required = true, allow_hyphen_values = true, value_name = "MAP")]
        map: Vec<String>,
        /// Jet degree for lifted maps and the contact check.
        #[arg(long, default_value_t = 8)]
        degree: u32,
    },
    /// Basis of a deformation module.
    Module {
        file: PathBuf,
        #[arg(long)]
        preset: ModulePreset,
        #[arg(long)]
        max_order: Option<u32>,
    },
    /// The deformation family carried by a module basis.
    Family {
        file: PathBuf,
        #[arg(long)]
        preset: ModulePreset,
        #[arg(long)]
        max_order: Option<u32>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path, trunc: u32) -> Result<Document, CliError> {
    parse_document(&read(path)?, trunc)
}

fn load_germ(path: &Path, trunc: u32) -> Result<AnyGerm, CliError> {
    match load(path, trunc)? {
        Document::Germ(g) => Ok(g),
        Document::Family { .. } => Err(CliError::Usage(format!(
            "{}: this command needs a germ, not a family",
            path.display()
        ))),
    }
}

fn wrong_kind(what: &str, found: &str) -> CliError {
    CliError::Usage(format!("{what}, found a {found} document"))
}

fn options(max_order: Option<u32>) -> ModuleOptions {
    let mut o = ModuleOptions::default();
    if let Some(m) = max_order {
        o.max_order = m;
    }
    o
}

/// Keeps the coordinates at `keep` of every branch.
fn project_family(
    f: &DeformationFamily,
    kind: FamilyKind,
    keep: [usize; 2],
) -> Result<DeformationFamily, CliError> {
    let branches = f
        .branches()
        .iter()
        .map(|b| keep.iter().map(|&i| b[i].clone()).collect())
        .collect();
    Ok(DeformationFamily::new(kind, f.param_count(), branches)?)
}

fn contact_map(args: &[String], degree: u32) -> Result<ContactMap, CliError> {
    match args {
        [kind] if kind == "legendre" => Ok(ContactMap::legendre()),
        [kind, a, b, c, d] if kind == "paraboloidal" => {
            let [a, b, c, d] = [a, b, c, d].map(|s| parse_rational(s));
            Ok(make_paraboloidal(&a?, &b?, &c?, &d?)?)
        }
        [kind, file] if kind == "lift" => {
            let path = Path::new(file);
            let root: Value = serde_json::from_str(&read(path)?).map_err(|e| CliError::Json {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
            let component = |name: &str| {
                let v = root.get(name).ok_or_else(|| CliError::Document {
                    location: format!("/{name}"),
                    message: "missing polynomial".into(),
                })?;
                parse_poly(v, 2, &format!("/{name}"))
            };
            Ok(lift_plane_automorphism(
                &component("a")?,
                &component("b")?,
                degree,
            )?)
        }
        _ => Err(CliError::Usage(
            "--map expects `paraboloidal A B C D`, `legendre` or `lift FILE`".into(),
        )),
    }
}

/// The output of a command, rendered in both formats.
pub struct Report {
    pub text: String,
    pub json: Value,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("values serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn document_report(d: &Document) -> Report {
    Report {
        text: render::document_text(d),
        json: document::document_to_json(d),
    }
}

/// Runs one command.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let trunc = cli.trunc;
    match &cli.command {
        Command::Classify { file } => {
            let g = load_germ(file, trunc)?;
            let classes = classify_germ(&g.to_plane())?;
            Ok(render::classify(&classes))
        }
        Command::Conormal { file } => {
            let out = match load(file, trunc)? {
                Document::Germ(AnyGerm::Plane(z)) => {
                    Document::Germ(AnyGerm::Legendrian(conormal(&z)?))
                }
                Document::Family { family, params } if family.kind() == FamilyKind::Plane => {
                    Document::Family {
                        family: family_conormal(&family)?,
                        params,
                    }
                }
                d => {
                    return Err(wrong_kind(
                        "conormal needs a plane germ or family",
                        kind_of(&d),
                    ))
                }
            };
            Ok(document_report(&out))
        }
        Command::FakeConormal { file } => {
            let out = match load(file, trunc)? {
                Document::Germ(AnyGerm::Fake(s)) => {
                    Document::Germ(AnyGerm::Legendrian(fake_conormal(&s)))
                }
                Document::Family { family, params } if family.kind() == FamilyKind::Fake => {
                    Document::Family {
                        family: family_fake_conormal(&family)?,
                        params,
                    }
                }
                d => {
                    return Err(wrong_kind(
                        "fake-conormal needs a fake germ or family",
                        kind_of(&d),
                    ))
                }
            };
            Ok(document_report(&out))
        }
        Command::Project { file, kind } => {
            let out = match (load(file, trunc)?, kind) {
                (Document::Germ(AnyGerm::Legendrian(l)), Projection::Plane) => {
                    Document::Germ(AnyGerm::Plane(plane_projection(&l)))
                }
                (Document::Germ(AnyGerm::Legendrian(l)), Projection::Fake) => {
                    Document::Germ(AnyGerm::Fake(fake_projection(&l)))
                }
                (Document::Family { family, params }, k)
                    if family.kind() == FamilyKind::Legendrian =>
                {
                    let family = match k {
                        Projection::Plane => project_family(&family, FamilyKind::Plane, [0, 1])?,
                        Projection::Fake => project_family(&family, FamilyKind::Fake, [0, 2])?,
                    };
                    Document::Family { family, params }
                }
                (d, _) => {
                    return Err(wrong_kind(
                        "project needs a Legendrian germ or family",
                        kind_of(&d),
                    ))
                }
            };
            Ok(document_report(&out))
        }
        Command::Transform { file, map, degree } => {
            let chi = contact_map(map, *degree)?;
            let l = load_germ(file, trunc)?.to_legendrian()?;
            let factor = contact_check(&chi, *degree)?;
            let image = AnyGerm::Legendrian(apply_contact_map(&chi, &l)?);
            Ok(render::transform(&image, &factor))
        }
        Command::Module {
            file,
            preset,
            max_order,
        } => {
            let g = load_germ(file, trunc)?;
            let basis = compute_module_with(*preset, &g, &options(*max_order))?;
            Ok(render::module(&basis))
        }
        Command::Family {
            file,
            preset,
            max_order,
        } => {
            let g = load_germ(file, trunc)?;
            let basis = compute_module_with(*preset, &g, &options(*max_order))?;
            let family = emit_family(&basis, &g)?;
            let params = family.param_names();
            Ok(document_report(&Document::Family { family, params }))
        }
    }
}

fn kind_of(d: &Document) -> &'static str {
    match d {
        Document::Germ(g) => g.kind_name(),
        Document::Family { family, .. } => match family.kind() {
            FamilyKind::Plane => "plane family",
            FamilyKind::Legendrian => "legendrian family",
            FamilyKind::Fake => "fake family",
        },
    }
}
