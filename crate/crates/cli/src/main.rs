//! `rookcong`: enumerate rook monoids, report their Green structure and
//! ideals, and check congruence families against the full lattice.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rookcong::congruence::{congruence_lattice, FiniteMonoid, Partition};
use rookcong::counterexample::counterexample;
use rookcong::families::{predicted_congruences, verify_classification, ClassificationReport};
use rookcong::green::{
    class_count_formulas, class_counts, compare_with_formulas, enumerate_ideals, green_partition, j_covers, j_order,
    ClassCounts, Comparison, CountFormulas, GreenData,
};
use rookcong::{Budget, Error, Family, MonoidUniverse};
use serde::Serialize;

const EXIT_OTHER: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "rookcong", version, about = "Orthogonal and symplectic rook monoids: structure and congruences")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the parallel phases (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Lift every size limit.
    #[arg(long, global = true)]
    force_budget: bool,

    /// Largest universe to enumerate.
    #[arg(long, global = true, env = "RCL_BUDGET_ELEMENTS")]
    max_elements: Option<usize>,

    /// Largest universe whose congruence lattice is computed.
    #[arg(long, global = true)]
    lattice_limit: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the elements of a monoid.
    Elements(Target),
    /// Green's relations, class counts and the closed-form comparison.
    Green(Target),
    /// Every ideal (absorbing down-set of J-classes).
    Ideals(Target),
    /// Congruence families and the congruence lattice.
    Congruences {
        #[command(subcommand)]
        action: CongruenceAction,
    },
    /// The conjugation example showing OR_n is not closed under S_n-conjugation.
    Counterexample {
        #[arg(long, default_value_t = 8)]
        n: usize,
    },
    /// Every place where enumeration disagrees with the closed forms, the ideal list or the families.
    Erratum {
        #[arg(long, value_enum, default_value_t = FamilyArg::Or)]
        family: FamilyArg,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
enum CongruenceAction {
    /// The predicted congruences, deduplicated.
    Predict(Target),
    /// The full congruence lattice.
    Enumerate(Target),
    /// Compare predictions with the lattice; exit 3 if a prediction is missing.
    Verify(Target),
}

#[derive(Args, Debug, Clone, Copy)]
struct Target {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    n: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    R,
    Sr,
    Or,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::R => Family::R,
            FamilyArg::Sr => Family::SR,
            FamilyArg::Or => Family::OR,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Dot,
    Text,
}

enum Failure {
    Lib(Error),
    Usage(String),
    /// The command ran but found a predicted congruence missing.
    Missing(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<String, Failure>;

fn budget(cli: &Cli) -> Budget {
    let mut b = if cli.force_budget { Budget::unlimited() } else { Budget::default() };
    if let Some(x) = cli.max_elements {
        b.max_elements = x;
    }
    if let Some(x) = cli.lattice_limit {
        b.lattice_elements = x;
    }
    b
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn unsupported(format: Format, command: &str) -> Failure {
    Failure::Usage(format!("--format {format:?} is not available for `{command}`").to_lowercase())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_OTHER) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_OTHER);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_OTHER);
        }
    }
    let result = run(&cli);
    let (text, code) = match result {
        Ok(text) => (Some(text), ExitCode::SUCCESS),
        Err(Failure::Missing(text)) => (Some(text), ExitCode::from(EXIT_INVARIANT)),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            (None, ExitCode::from(EXIT_OTHER))
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Budget { .. } => EXIT_BUDGET,
                Error::Invariant(_) => EXIT_INVARIANT,
                _ => EXIT_OTHER,
            };
            (None, ExitCode::from(code))
        }
    };
    if let Some(text) = text {
        let written = match &cli.out {
            Some(path) => std::fs::write(path, &text),
            None => std::io::stdout().write_all(text.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_OTHER);
        }
    }
    code
}

fn run(cli: &Cli) -> Outcome {
    let b = budget(cli);
    match &cli.command {
        Command::Elements(t) => elements(cli.format, &universe(t, &b)?),
        Command::Green(t) => green(cli.format, &universe(t, &b)?),
        Command::Ideals(t) => ideals(cli.format, &universe(t, &b)?),
        Command::Congruences { action } => match action {
            CongruenceAction::Predict(t) => predict(cli.format, &universe(t, &b)?, &b),
            CongruenceAction::Enumerate(t) => enumerate(cli.format, &universe(t, &b)?, &b),
            CongruenceAction::Verify(t) => verify(cli.format, &universe(t, &b)?, &b),
        },
        Command::Counterexample { n } => conjugation(cli.format, *n),
        Command::Erratum { family, n } => erratum(cli.format, &universe(&Target { family: *family, n: *n }, &b)?, &b),
    }
}

fn universe(t: &Target, b: &Budget) -> Result<MonoidUniverse, Failure> {
    Ok(MonoidUniverse::enumerate_with(t.family.into(), t.n, b)?)
}

fn name(u: &MonoidUniverse) -> String {
    format!("{}_{}", u.family(), u.degree())
}

#[derive(Serialize)]
struct ElementsJson<'a> {
    family: Family,
    n: usize,
    size: usize,
    strata: Vec<usize>,
    elements: &'a [rookcong::PartialInjection],
}

fn elements(format: Format, u: &MonoidUniverse) -> Outcome {
    let strata = u.rank_strata();
    match format {
        Format::Json => Ok(json(&ElementsJson {
            family: u.family(),
            n: u.degree(),
            size: u.size(),
            strata,
            elements: u.elements(),
        })),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{}: {} elements", name(u), u.size()).unwrap();
            let by_rank: Vec<String> = strata
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(k, c)| format!("rank {k}: {c}"))
                .collect();
            writeln!(s, "{}", by_rank.join(", ")).unwrap();
            for (i, e) in u.elements().iter().enumerate() {
                writeln!(s, "{i:>6}  {}", e.two_line()).unwrap();
            }
            Ok(s)
        }
        Format::Dot => Err(unsupported(format, "elements")),
    }
}

#[derive(Serialize)]
struct Classes {
    #[serde(rename = "L")]
    l: Vec<Vec<usize>>,
    #[serde(rename = "R")]
    r: Vec<Vec<usize>>,
    #[serde(rename = "H")]
    h: Vec<Vec<usize>>,
    #[serde(rename = "J")]
    j: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct GreenJson {
    family: Family,
    n: usize,
    classes: Classes,
    counts: ClassCounts,
    formulas: Option<CountFormulas>,
    comparisons: Vec<Comparison>,
    discrepancies: Vec<Comparison>,
}

fn comparisons(u: &MonoidUniverse, g: &GreenData) -> Result<Vec<Comparison>, Failure> {
    if u.family() == Family::OR {
        Ok(compare_with_formulas(u, g)?)
    } else {
        Ok(Vec::new())
    }
}

fn green(format: Format, u: &MonoidUniverse) -> Outcome {
    let g = green_partition(u);
    let counts = class_counts(&g);
    let cmp = comparisons(u, &g)?;
    let discrepancies: Vec<Comparison> = cmp.iter().filter(|c| !c.agrees).cloned().collect();
    match format {
        Format::Json => {
            let formulas = match u.family() {
                Family::OR => Some(class_count_formulas(u.half_degree())?),
                _ => None,
            };
            Ok(json(&GreenJson {
                family: u.family(),
                n: u.degree(),
                classes: Classes {
                    l: g.l.classes(),
                    r: g.r.classes(),
                    h: g.h.classes(),
                    j: g.j.classes(),
                },
                counts,
                formulas,
                comparisons: cmp,
                discrepancies,
            }))
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{}: {} elements", name(u), u.size()).unwrap();
            writeln!(
                s,
                "classes: L {}  R {}  H {}  J {}  D {}",
                counts.l, counts.r, counts.h, counts.j, counts.d
            )
            .unwrap();
            let mut js: Vec<_> = g.j_classes.iter().collect();
            js.sort_by_key(|c| c.key);
            for c in js {
                let t = c.key.mtype.map(|t| format!(" type {t:?}")).unwrap_or_default();
                writeln!(s, "J-class rank {}{t}: {} elements, e.g. {}", c.key.rank, c.size, u.element(c.representative).two_line()).unwrap();
            }
            for c in &cmp {
                let at = c.rank.map(|r| format!(" (rank {r})")).unwrap_or_default();
                let mark = if c.agrees { "ok" } else { "DISCREPANCY" };
                writeln!(s, "{mark:>11}  {}{at}: formula {}, observed {:?}", c.quantity, c.formula, c.observed).unwrap();
            }
            Ok(s)
        }
        Format::Dot => {
            let le = j_order(u, &g);
            let mut s = format!("digraph \"{}\" {{\n  rankdir=BT;\n", name(u));
            for (i, c) in g.j_classes.iter().enumerate() {
                let t = c.key.mtype.map(|t| format!(" {t:?}")).unwrap_or_default();
                writeln!(s, "  j{i} [label=\"rank {}{t}\\n{} elements\"];", c.key.rank, c.size).unwrap();
            }
            for (a, b) in j_covers(&le) {
                writeln!(s, "  j{a} -> j{b};").unwrap();
            }
            s.push_str("}\n");
            Ok(s)
        }
    }
}

fn ideals(format: Format, u: &MonoidUniverse) -> Outcome {
    let g = green_partition(u);
    let list = enumerate_ideals(u, &g)?;
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct IdealsJson<'a> {
                family: Family,
                n: usize,
                ideals: &'a [rookcong::green::IdealDescriptor],
            }
            Ok(json(&IdealsJson {
                family: u.family(),
                n: u.degree(),
                ideals: &list,
            }))
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{}: {} ideals", name(u), list.len()).unwrap();
            for d in &list {
                let note = if d.listed { "" } else { "  (not among the listed ideals)" };
                writeln!(s, "{:>16}  {} elements, absorbing: {}{note}", d.kind.to_string(), d.members.len(), d.absorbing).unwrap();
            }
            Ok(s)
        }
        Format::Dot => Err(unsupported(format, "ideals")),
    }
}

#[derive(Serialize)]
struct PartitionEntry {
    index: usize,
    num_classes: usize,
    classes: Vec<Vec<usize>>,
}

fn predict(format: Format, u: &MonoidUniverse, b: &Budget) -> Outcome {
    let preds = predicted_congruences(u, b)?;
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Entry<'a> {
                specs: &'a [rookcong::families::FamilySpec],
                num_classes: usize,
                classes: Vec<Vec<usize>>,
            }
            #[derive(Serialize)]
            struct PredictJson<'a> {
                family: Family,
                n: usize,
                predicted: Vec<Entry<'a>>,
            }
            Ok(json(&PredictJson {
                family: u.family(),
                n: u.degree(),
                predicted: preds
                    .iter()
                    .map(|p| Entry {
                        specs: &p.specs,
                        num_classes: p.partition.num_classes(),
                        classes: p.partition.classes(),
                    })
                    .collect(),
            }))
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{}: {} predicted congruences", name(u), preds.len()).unwrap();
            for p in &preds {
                let specs: Vec<String> = p.specs.iter().map(ToString::to_string).collect();
                writeln!(s, "{:>6} classes  {}", p.partition.num_classes(), specs.join(" = ")).unwrap();
            }
            Ok(s)
        }
        Format::Dot => Err(unsupported(format, "congruences predict")),
    }
}

fn hasse(lattice: &[Partition]) -> Vec<(usize, usize)> {
    let below = |a: usize, b: usize| a != b && lattice[a].refines(&lattice[b]);
    let mut covers = Vec::new();
    for a in 0..lattice.len() {
        for b in 0..lattice.len() {
            if below(a, b) && !(0..lattice.len()).any(|c| below(a, c) && below(c, b)) {
                covers.push((a, b));
            }
        }
    }
    covers
}

fn enumerate(format: Format, u: &MonoidUniverse, b: &Budget) -> Outcome {
    let lattice = congruence_lattice(u, b.lattice_elements)?;
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct LatticeJson {
                family: Family,
                n: usize,
                size: usize,
                congruences: Vec<PartitionEntry>,
            }
            Ok(json(&LatticeJson {
                family: u.family(),
                n: u.degree(),
                size: lattice.len(),
                congruences: lattice
                    .iter()
                    .enumerate()
                    .map(|(index, p)| PartitionEntry {
                        index,
                        num_classes: p.num_classes(),
                        classes: p.classes(),
                    })
                    .collect(),
            }))
        }
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{}: {} congruences", name(u), lattice.len()).unwrap();
            for (i, p) in lattice.iter().enumerate() {
                writeln!(s, "{i:>4}  {:>6} classes, zero class of size {}", p.num_classes(), p.class_of(0).len()).unwrap();
            }
            Ok(s)
        }
        Format::Dot => {
            let mut s = format!("digraph \"Con {}\" {{\n  rankdir=BT;\n", name(u));
            for (i, p) in lattice.iter().enumerate() {
                writeln!(s, "  c{i} [label=\"{i}: {} classes\"];", p.num_classes()).unwrap();
            }
            for (a, b) in hasse(&lattice) {
                writeln!(s, "  c{a} -> c{b};").unwrap();
            }
            s.push_str("}\n");
            Ok(s)
        }
    }
}

fn verify_text(u: &MonoidUniverse, r: &ClassificationReport) -> String {
    let mut s = String::new();
    writeln!(s, "{}: {} congruences in the lattice", name(u), r.lattice_size).unwrap();
    writeln!(s, "matched: {}", r.matched.len()).unwrap();
    for m in &r.matched {
        let specs: Vec<String> = m.specs.iter().map(ToString::to_string).collect();
        writeln!(s, "  #{:<4} {}", m.lattice_index, specs.join(" = ")).unwrap();
    }
    writeln!(s, "predicted but not found: {}", r.predicted_not_found.len()).unwrap();
    for p in &r.predicted_not_found {
        writeln!(s, "  {p}").unwrap();
    }
    writeln!(s, "found but not predicted: {}", r.found_not_predicted.len()).unwrap();
    for x in &r.found_not_predicted {
        let units: Vec<String> = x
            .unit_classes
            .iter()
            .map(|c| {
                let e: Vec<String> = c.iter().map(|&i| u.element(i).image_word().iter().map(ToString::to_string).collect::<String>()).collect();
                format!("{{{}}}", e.join(","))
            })
            .collect();
        let tags = if x.tags.is_empty() { String::new() } else { format!("  [{}]", x.tags.join("; ")) };
        writeln!(
            s,
            "  #{:<4} {} classes, zero class {}, unit classes {}{tags}",
            x.lattice_index,
            x.classes.len(),
            x.zero_class_kind,
            units.join(" ")
        )
        .unwrap();
    }
    for n in &r.notes {
        writeln!(s, "note: {n}").unwrap();
    }
    s
}

fn verify(format: Format, u: &MonoidUniverse, b: &Budget) -> Outcome {
    let report = verify_classification(u, b)?;
    let text = match format {
        Format::Json => json(&report),
        Format::Text => verify_text(u, &report),
        Format::Dot => return Err(unsupported(format, "congruences verify")),
    };
    if report.containment_holds() {
        Ok(text)
    } else {
        Err(Failure::Missing(text))
    }
}

fn conjugation(format: Format, n: usize) -> Outcome {
    let c = counterexample(n)?;
    match format {
        Format::Json => Ok(json(&c)),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "n = {}", c.n).unwrap();
            writeln!(s, "sigma     = {}   in OR_{n}: {}", c.sigma.two_line(), c.sigma_in_or).unwrap();
            writeln!(s, "s         = {}   in W: {}", c.s.two_line(), c.s_in_w).unwrap();
            writeln!(s, "s^-1 sigma s = {}   in SR_{n}: {}", c.conjugate.two_line(), c.conjugate_in_sr).unwrap();
            if let Some(i) = c.first_violation {
                let t = rookcong::rook::theta(n, i)?;
                let lhs = c.conjugate.apply(t);
                let rhs = c.conjugate.apply(i).map(|x| rookcong::rook::theta(n, x)).transpose()?;
                let show = |x: Option<usize>| x.map_or("undefined".to_string(), |v| v.to_string());
                writeln!(s, "x(theta({i})) = {} but theta(x({i})) = {}", show(lhs), show(rhs)).unwrap();
                writeln!(s, "membership violated at i = {i}").unwrap();
            }
            Ok(s)
        }
        Format::Dot => Err(unsupported(format, "counterexample")),
    }
}

#[derive(Serialize)]
struct ErratumJson {
    family: Family,
    n: usize,
    size: usize,
    formula_discrepancies: Vec<Comparison>,
    unlisted_ideals: Vec<String>,
    unpredicted_congruences: Option<usize>,
    lattice_skipped: Option<String>,
}

fn erratum(format: Format, u: &MonoidUniverse, b: &Budget) -> Outcome {
    let g = green_partition(u);
    let formula_discrepancies: Vec<Comparison> = comparisons(u, &g)?.into_iter().filter(|c| !c.agrees).collect();
    let unlisted_ideals: Vec<String> = enumerate_ideals(u, &g)?
        .into_iter()
        .filter(|d| !d.listed)
        .map(|d| format!("{} ({} elements)", d.kind, d.members.len()))
        .collect();
    let (unpredicted, skipped, report) = if u.family() == Family::R {
        (None, Some("no families are predicted for R_n".to_string()), None)
    } else {
        match verify_classification(u, b) {
            Ok(r) => (Some(r.found_not_predicted.len()), None, Some(r)),
            Err(Error::Budget { .. }) if u.size() > b.lattice_elements => {
                (None, Some(format!("lattice not computed: {} elements exceed the lattice limit", u.size())), None)
            }
            Err(e) => return Err(e.into()),
        }
    };
    let out = ErratumJson {
        family: u.family(),
        n: u.degree(),
        size: u.size(),
        formula_discrepancies,
        unlisted_ideals,
        unpredicted_congruences: unpredicted,
        lattice_skipped: skipped,
    };
    match format {
        Format::Json => Ok(json(&out)),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "{}: {} elements", name(u), out.size).unwrap();
            for c in &out.formula_discrepancies {
                let at = c.rank.map(|r| format!(" at rank {r}")).unwrap_or_default();
                writeln!(s, "closed form disagrees: {}{at}: printed {}, observed {:?}", c.quantity, c.formula, c.observed).unwrap();
            }
            for i in &out.unlisted_ideals {
                writeln!(s, "ideal missing from the listed ideals: {i}").unwrap();
            }
            if let Some(r) = &report {
                writeln!(s, "congruences not covered by any family: {}", r.found_not_predicted.len()).unwrap();
                for x in &r.found_not_predicted {
                    writeln!(s, "  #{} zero class {} {}", x.lattice_index, x.zero_class_kind, x.tags.join("; ")).unwrap();
                }
            }
            if let Some(msg) = &out.lattice_skipped {
                writeln!(s, "{msg}").unwrap();
            }
            Ok(s)
        }
        Format::Dot => Err(unsupported(format, "erratum")),
    }
}
