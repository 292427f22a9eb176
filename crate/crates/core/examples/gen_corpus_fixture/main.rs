//! Builds the full-corpus fixture under `fixtures/full_corpus/`.
//!
//! The 177 cited books come from `appendix.tsv` together with their LCC
//! subclass, chapter tags and high-degree subject headings. Everything else
//! (per-book heading counts, low-degree headings, spelling variants, removed
//! strings and domain codings) is derived here so that the published counts
//! hold exactly. Run with `cargo run -p biblionet-core --example gen_corpus_fixture`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use biblionet::crosswalk::{parse_lcc, CrosswalkTable};
use biblionet::digest::child_seed;
use biblionet::graph::graphml::from_graphml;
use biblionet::graph::louvain::{louvain, louvain_with_restarts};
use biblionet::headings::facets::heading_key;
use biblionet::headings::MergeMap;
use biblionet::pipeline::stages::FILTERED_GRAPHML;
use biblionet::{run_pipeline, PipelineConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use unicode_normalization::UnicodeNormalization;

const APPENDIX: &str = include_str!("appendix.tsv");
const DUPLICATE_KEY: &str = "hodgson1993b";

/// (subclass, books, per-book unique headings); "" is the no-LCC row.
const SUBCLASS_TARGETS: &[(&str, usize, usize)] = &[
    ("B", 2, 12),
    ("BF", 2, 12),
    ("BC", 1, 7),
    ("BD", 1, 4),
    ("BJ", 1, 1),
    ("HM", 18, 155),
    ("HB", 15, 75),
    ("H", 9, 52),
    ("HD", 8, 68),
    ("HC", 4, 30),
    ("HV", 3, 21),
    ("HQ", 2, 8),
    ("HA", 2, 6),
    ("HF", 1, 9),
    ("HG", 1, 5),
    ("JN", 1, 10),
    ("LC", 2, 25),
    ("Q", 38, 253),
    ("QH", 15, 141),
    ("QA", 13, 98),
    ("QC", 7, 50),
    ("QP", 2, 13),
    ("QD", 1, 4),
    ("QL", 1, 4),
    ("RC", 1, 12),
    ("RA", 1, 11),
    ("T", 5, 42),
    ("TK", 4, 65),
    ("TA", 1, 14),
    ("UG", 1, 8),
    ("Z", 7, 56),
    ("ZA", 1, 7),
    ("", 6, 27),
];

const FIXED_UNIQUE: &[(&str, usize)] = &[("newman2006", 34), ("borner2010", 4)];
const FIXED_EXTRA: &[(&str, usize)] = &[("newman2006", 3), ("borner2010", 0)];

const ALONGSIDE_TOTAL: usize = 158;

/// Degree histogram of the 656 low-degree headings: (degree, count).
const LOW_DEGREES: &[(usize, usize)] = &[(5, 9), (4, 12), (3, 40), (2, 112), (1, 483)];

/// Worked-example headings: (book, canonical, string in the catalog).
const SPECIALS: &[(&str, &str, &str)] = &[
    ("edelsteinkeshet1988", "Biology – Mathematical models", "Biology – Mathematical models"),
    ("murray1989", "Biology – Mathematical models", "Biology – Mathematical models"),
    ("brauer2001", "Biology – Mathematical models", "Biology / Mathematical model"),
    ("maguire2003", "Alcoholism and crime", "Alcoholism and crime"),
    ("budd2003", "Alcoholism and crime", "Alcoholism and crime – Wales – Cardiff"),
    ("smith1776", "Economic history", "Economic history"),
    ("sollner2001", "Economic history", "Economic history"),
    ("wallerstein1974", "Economic history", "Economic history – 16th century"),
    ("nicolis1977", "Biophysics", "Biophysics"),
    ("ebeling1990", "Biophysics", "Biophysics/Biomedical Physics"),
    ("sun2002", "Comprehension", "Comprehension"),
    ("mcclelland1987", "Comprehension", "Comprehension (Theory of knowledge)"),
    ("hayashi1998", "Classification of sciences", "Classification of sciences"),
    ("borner2010", "Classification of sciences", "Classification of sciences – Atlases"),
    ("borner2010", "Science – Atlases", "Science – Atlases"),
    ("borner2010", "Communication in science – Data processing", "Communication in science – Data processing"),
    ("borner2010", "Digital mapping", "Digital mapping"),
    ("neumann1966", "Gödel's theorem", "Gödel's theorem"),
    ("greiner1989", "Schrödinger equation", "Schrödinger equation"),
];

/// High-degree headings carried by a variant string instead of the display form.
const HIGH_REPLACEMENTS: &[(&str, &str, &str)] = &[
    ("bak1996", "System theory", "Systems theory"),
    ("amann1999", "Game theory", "Games, Theory of"),
    ("smith1972", "Evolution", "Evolution (Biology)"),
    ("okubo1980", "Mathematical models", "Mathematical models."),
    ("wellman1988", "Social networks", "SOCIAL NETWORKS"),
    ("wagner2008", "Science – Social aspects", "Science -- Social aspects"),
    ("romer1996", "Economics", "Economics – Textbooks"),
];

const FORCED_ALONGSIDE: &[(&str, &str)] = &[("edelsteinkeshet1988", "Biology – Mathematical models – Textbooks")];

/// Strings removed by X1 (merge map), X2 (place only) and X3 (personal name).
const REMOVED: &[(&str, &str)] = &[
    ("fladung2007", "Electronic books"),
    ("heath2011", "Internet resources"),
    ("nrc2005", "Online books"),
    ("bellis2009", "Electronic resources"),
    ("luke2010", "Computer files"),
    ("huberman2001", "Web sites"),
    ("gardiner1983", "CD-ROMs"),
    ("price1961", "Microforms"),
    ("ziman2000", "Large type books"),
    ("moed2004", "Electronic information resources"),
    ("nonaka1995", "Japan"),
    ("floodpage2003", "Great Britain"),
    ("hornbostel1997", "Germany"),
    ("cole1973", "United States"),
    ("foray2004", "France"),
    ("leydesdorff1995", "Netherlands"),
    ("putnam1993", "Italy"),
    ("sorcan2008", "Slovenia"),
    ("maguire2003", "England"),
    ("budd2003", "Wales"),
    ("egghe2005", "Lotka"),
    ("lotka1956", "Lotka, Alfred J., 1880-1949"),
    ("campbell1974", "Popper, Karl R. (Karl Raimund), 1902-1994"),
    ("cronin2000", "Garfield, Eugene"),
    ("smith1776", "Smith, Adam, 1723-1790"),
    ("luhmann1990", "Luhmann, Niklas, 1927-1998"),
    ("neumann1966", "Neumann, John von, 1903-1957"),
    ("reboiras2002", "Llull, Ramon, 1232-1316"),
    ("elkana1978", "Merton, Robert K. (Robert King), 1910-2003"),
    ("price1963", "Price, Derek J. de Solla (Derek John de Solla), 1922-1983"),
];

const MATERIALITY: &[&str] = &[
    "Internet resources",
    "Online books",
    "Electronic resources",
    "Computer files",
    "Web sites",
    "CD-ROMs",
    "Microforms",
    "Large type books",
    "Electronic information resources",
];

const EXTRA_MERGES: &[(&str, &str)] =
    &[("Systems theory", "System theory"), ("Games, Theory of", "Game theory"), ("Evolution (Biology)", "Evolution")];

/// Books with a second English edition; the padded string duplicates one
/// of the book's headings once trimmed and NFC-normalized.
const PADDED: &[(&str, Pad)] = &[
    ("kuhn1962", Pad::Trailing),
    ("price1963", Pad::Leading),
    ("merton1973", Pad::Trailing),
    ("popper1959", Pad::Trailing),
    ("wasserman1994", Pad::Leading),
    ("barabasi2002", Pad::Trailing),
    ("greiner1989", Pad::Nfd("Schrödinger equation")),
    ("neumann1966", Pad::Nfd("Gödel's theorem")),
];

enum Pad {
    Leading,
    Trailing,
    Nfd(&'static str),
}

const GERMAN_EDITIONS: &[(&str, &[&str])] = &[
    ("amann1999", &["Spieltheorie", "Evolution"]),
    ("berg2005", &["Nachhaltige Entwicklung", "Vernetzung"]),
    ("ebeling1990", &["Evolution", "Physik"]),
    ("havemann2009", &["Bibliometrie"]),
    ("hornbostel1997", &["Wissenschaftsindikatoren", "Forschungsevaluation"]),
    ("luhmann1990", &["Wissenschaftssoziologie"]),
    ("schlee2004", &["Spieltheorie"]),
    ("sollner2001", &["Wirtschaftswissenschaften – Geschichte"]),
    ("neumann1932", &["Quantenmechanik"]),
];

/// (primary, secondary) codes of the hand-coded headings.
const CODINGS: &[(&str, u8, Option<u8>)] = &[
    ("Science", 0, None),
    ("Science – Social aspects", 0, Some(10)),
    ("Science – Philosophy", 0, Some(8)),
    ("Social networks", 6, Some(10)),
    ("Mathematical models", 9, None),
    ("Game theory", 10, Some(9)),
    ("Evolution", 1, None),
    ("Economics", 10, None),
    ("Mathematics", 9, None),
    ("Social sciences", 10, None),
    ("Communication", 10, Some(8)),
    ("System theory", 9, Some(10)),
    ("Innovation", 10, Some(6)),
    ("Bibliometrics", 6, Some(10)),
    ("Internet", 6, None),
    ("Philosophy", 8, None),
    ("Knowledge, Sociology of", 10, Some(8)),
    ("Sociology", 10, None),
    ("Computer simulation", 6, Some(9)),
    ("Biology – Mathematical models", 1, Some(9)),
    ("Alcoholism and crime", 2, Some(10)),
    ("Economic history", 10, Some(8)),
    ("Biophysics", 1, Some(9)),
    ("Comprehension", 7, Some(8)),
    ("Classification of sciences", 0, Some(9)),
    ("Science – Atlases", 0, None),
    ("Communication in science – Data processing", 0, Some(6)),
    ("Digital mapping", 6, None),
    ("Gödel's theorem", 9, None),
    ("Schrödinger equation", 9, None),
];

/// Row `p`: single-coded count, then (secondary, count) cells.
type CrossRow = (u8, usize, &'static [(u8, usize)]);

const CROSSTAB: &[CrossRow] = &[
    (0, 17, &[(1, 1), (6, 1), (8, 2), (9, 6), (10, 15)]),
    (1, 23, &[(0, 2), (2, 3), (4, 3), (8, 4), (9, 13), (10, 3)]),
    (2, 3, &[(1, 4), (9, 2), (10, 4)]),
    (3, 5, &[(6, 1), (8, 2), (9, 5), (10, 6)]),
    (4, 6, &[(1, 1), (3, 2), (9, 3)]),
    (5, 0, &[(1, 3), (10, 2)]),
    (6, 56, &[(0, 3), (3, 6), (8, 1), (9, 23), (10, 29)]),
    (7, 9, &[(0, 1), (1, 7), (6, 1), (8, 5), (9, 2), (10, 24)]),
    (8, 10, &[(0, 2), (1, 1), (6, 3), (9, 1), (10, 15)]),
    (9, 61, &[(0, 2), (1, 4), (2, 1), (3, 7), (4, 2), (6, 14), (8, 1), (10, 10)]),
    (10, 127, &[(0, 5), (1, 5), (6, 23), (7, 1), (8, 50), (9, 21)]),
];

const FORMS: &[&str] = &[
    "Abstracts",
    "Atlases",
    "Bibliography",
    "Biography",
    "Case studies",
    "Catalogs",
    "Collected works",
    "Congresses",
    "Databases",
    "Dictionaries",
    "Directories",
    "Early works to 1800",
    "Encyclopedias",
    "Exhibitions",
    "Guidebooks",
    "Handbooks, manuals, etc.",
    "Handbooks",
    "Indexes",
    "Juvenile literature",
    "Maps",
    "Periodicals",
    "Pictorial works",
    "Popular works",
    "Problems, exercises, etc.",
    "Sources",
    "Textbooks",
];

const PLACES: &[&str] = &[
    "Africa",
    "Asia",
    "Australia",
    "Canada",
    "Cardiff",
    "China",
    "England",
    "Europe",
    "France",
    "Germany",
    "Great Britain",
    "India",
    "Ireland",
    "Italy",
    "Japan",
    "Latin America",
    "London",
    "Netherlands",
    "Russia",
    "Scotland",
    "Slovenia",
    "Soviet Union",
    "Sweden",
    "United States",
    "Wales",
];

const NAMES: &[&str] = &["Lotka", "Garfield"];

const PERIODS: &[&str] = &["20th century", "19th century", "21st century", "1945-", "1900-1999", "To 1800"];

const SUBDIVISIONS: &[&str] = &[
    "Mathematical models",
    "Research",
    "Methodology",
    "History",
    "Philosophy",
    "Social aspects",
    "Computer simulation",
    "Statistical methods",
    "Data processing",
    "Economic aspects",
    "Study and teaching",
    "Evaluation",
    "Forecasting",
    "Political aspects",
    "Measurement",
    "Simulation methods",
    "Moral and ethical aspects",
    "Psychological aspects",
    "Management",
];

const POOL_SOC: &[&str] = &[
    "Social structure",
    "Social change",
    "Social psychology",
    "Social interaction",
    "Social groups",
    "Social mobility",
    "Social stratification",
    "Social capital",
    "Social values",
    "Social choice",
    "Organizational behavior",
    "Organizational change",
    "Industrial organization",
    "Labor economics",
    "Economic development",
    "Economic policy",
    "Monetary policy",
    "Money",
    "Finance",
    "Financial institutions",
    "Decision making",
    "Rational choice theory",
    "Public policy",
    "Crime",
    "Violence",
    "Alcoholism",
    "Family",
    "Adolescence",
    "Parent and teenager",
    "Interpersonal relations",
    "Group identity",
    "Education, Higher",
    "Universities and colleges",
    "Political culture",
    "Democracy",
    "Civil society",
    "Knowledge management",
    "Technological innovations",
    "Diffusion of innovations",
    "Entrepreneurship",
    "Econometrics",
    "Microeconomics",
    "Macroeconomics",
    "Economic growth",
    "Capitalism",
    "Division of labor",
    "Collective behavior",
    "Community organization",
    "Consumer behavior",
    "Business networks",
    "Strategic alliances (Business)",
    "Competition",
    "Welfare economics",
    "Human capital",
    "Income distribution",
];

const POOL_SCI: &[&str] = &[
    "Research",
    "Scientists",
    "Communication in science",
    "Science and state",
    "Science indicators",
    "Discoveries in science",
    "Technology",
    "Learning and scholarship",
    "Intellectual life",
    "Creative ability in science",
    "Women in science",
    "Peer review",
    "Interdisciplinary research",
    "Research teams",
    "Self-organizing systems",
    "Complexity (Philosophy)",
    "Sustainable development",
    "Science policy",
    "Technology and state",
    "Research institutes",
    "Inventions",
    "Paradigms (Social sciences)",
    "Cooperation",
    "Artificial intelligence",
    "Cognitive science",
    "Statistical decision",
    "System analysis",
    "Information society",
    "Knowledge economy",
    "Research and development",
];

const POOL_BIO: &[&str] = &[
    "Ecology",
    "Population biology",
    "Animal ecology",
    "Ecosystem",
    "Epidemiology",
    "Epidemics",
    "Communicable diseases",
    "Biomathematics",
    "Population dynamics",
    "Natural selection",
    "Adaptation (Biology)",
    "Genetics",
    "Animal populations",
    "Predation (Biology)",
    "Competition (Biology)",
    "Biodiversity",
    "Neurosciences",
    "Neurophysiology",
    "Cognitive neuroscience",
    "Brain",
    "Neural networks (Neurobiology)",
    "Health",
    "Wounds and injuries",
    "Morphogenesis",
    "Pattern formation (Biological systems)",
    "Sociobiology",
    "Life (Biology)",
    "Biological models",
];

const POOL_MATH: &[&str] = &[
    "Stochastic processes",
    "Probabilities",
    "Graph theory",
    "Graph drawing",
    "Nonlinear theories",
    "Dynamics",
    "Statistical physics",
    "Quantum theory",
    "Thermodynamics",
    "Statistical mechanics",
    "Differential equations",
    "Fokker-Planck equation",
    "Markov processes",
    "Mathematical optimization",
    "Multiple criteria decision making",
    "Dynamic programming",
    "Heuristic programming",
    "Algorithms",
    "Computer networks",
    "World Wide Web",
    "Traffic flow",
    "Granular materials",
    "Chaotic behavior in systems",
    "Fractals",
    "Self-organized criticality",
    "Critical phenomena (Physics)",
    "Cellular automata",
    "Computational complexity",
    "Combinatorial analysis",
    "Patents",
    "Engineering",
    "Operations research",
    "Semantic Web",
    "Information networks",
    "Oscillations",
    "Chemical kinetics",
    "Mathematical statistics",
    "Distribution (Probability theory)",
    "Military art and science",
];

const POOL_INFO: &[&str] = &[
    "Citation analysis",
    "Information science",
    "Scholarly publishing",
    "Scholarly electronic publishing",
    "Bibliographical citations",
    "Information retrieval",
    "Libraries",
    "Library science",
    "Documentation",
    "Scientific literature",
    "Informetrics",
    "Scientometrics",
    "Knowledge representation (Information theory)",
    "Information visualization",
    "Citation indexes",
];

const POOL_HUM: &[&str] = &[
    "Ethics",
    "Knowledge, Theory of",
    "Cognition",
    "Logic",
    "Psychology",
    "Thought and thinking",
    "Reasoning",
    "Mind and body",
    "Consciousness",
    "Concepts",
    "Rationalism",
    "Metaphysics",
    "Truth",
    "Human behavior",
    "Motivation (Psychology)",
    "Learning, Psychology of",
    "Connectionism",
];

/// Removed references: (key, type, year, author, title, catalog languages).
/// An empty language list means no catalog record.
type RemovedRef = (&'static str, &'static str, i32, &'static str, &'static str, &'static [&'static str]);

const REMOVED_REFS: &[RemovedRef] = &[
    ("blondel2008", "article", 2008, "Blondel, V. D. and Guillaume, J.-L. and Lambiotte, R. and Lefebvre, E.", "Fast unfolding of communities in large networks", &[]),
    ("newman2004", "article", 2004, "Newman, M. E. J. and Girvan, M.", "Finding and evaluating community structure in networks", &[]),
    ("boyack2005", "article", 2005, "Boyack, K. W. and Klavans, R. and Börner, K.", "Mapping the backbone of science", &[]),
    ("sci2team2009", "electronic_handbook", 2009, "{Sci2 Team}", "Science of Science (Sci2) Tool user manual", &[]),
    ("nwbteam2006", "book", 2006, "{NWB Team}", "Network Workbench tool user manual", &[]),
    ("batagelj2011", "book", 2011, "Batagelj, V. and Mrvar, A.", "Pajek: Program for analysis and visualization of large networks. Reference manual", &[]),
    ("borgatti2002", "book", 2002, "Borgatti, S. P. and Everett, M. G. and Freeman, L. C.", "UCINET for Windows: Software for social network analysis", &[]),
    ("issi2007", "inproceedings", 2007, "Torres-Salinas, D. and Moed, H. F.", "Proceedings of ISSI 2007: 11th International Conference of the International Society for Scientometrics and Informetrics", &[]),
    ("issi2009", "inproceedings", 2009, "Larsen, B. and Leta, J.", "Proceedings of ISSI 2009: 12th International Conference of the International Society for Scientometrics and Informetrics", &[]),
    ("issi2011", "inproceedings", 2011, "Noyons, E. and Ngulube, P. and Leta, J.", "Proceedings of ISSI 2011: 13th International Conference of the International Society for Scientometrics and Informetrics", &[]),
    ("sti2008", "inproceedings", 2008, "Noyons, E.", "Proceedings of the 10th International Conference on Science and Technology Indicators", &[]),
    ("eccs2007", "inproceedings", 2007, "Bourgine, P.", "Proceedings of the European Conference on Complex Systems", &[]),
    ("essa2009", "inproceedings", 2009, "Squazzoni, F.", "Proceedings of the 6th Conference of the European Social Simulation Association", &[]),
    ("iccs2006", "inproceedings", 2006, "Alexandrov, V. N.", "Computational Science: Proceedings of the International Conference on Computational Science", &[]),
    ("wsc2005", "inproceedings", 2005, "Kuhl, M. E. and Steiger, N. M.", "Proceedings of the 2005 Winter Simulation Conference", &[]),
    ("jcdl2004", "inproceedings", 2004, "Chen, H. and Wactlar, H.", "Proceedings of the 4th ACM/IEEE-CS Joint Conference on Digital Libraries", &[]),
    ("parthey2000", "inproceedings", 2000, "Parthey, H. and Spur, G.", "Organisationsformen der Wissenschaft: Tagungsband", &["ger"]),
    ("weingart1976", "incollection", 1976, "Weingart, P.", "Wissensproduktion und soziale Struktur", &["ger"]),
    ("callon1989", "incollection", 1989, "Callon, M.", "La science et ses réseaux: Genèse et circulation des faits scientifiques", &["fre"]),
    ("mayntz1988", "incollection", 1988, "Mayntz, R.", "Differenzierung und Verselbständigung: Zur Entwicklung gesellschaftlicher Teilsysteme", &["ger", "fre"]),
];

struct Entry {
    key: String,
    ty: String,
    year: i32,
    role: String,
    names: String,
    title: String,
    lcc: String,
    chapters: String,
    high: Vec<String>,
}

fn parse_appendix() -> Vec<Entry> {
    APPENDIX
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            assert_eq!(f.len(), 9, "bad appendix row {l:?}");
            Entry {
                key: f[0].into(),
                ty: f[1].into(),
                year: f[2].parse().expect("year"),
                role: f[3].into(),
                names: f[4].into(),
                title: f[5].into(),
                lcc: f[6].into(),
                chapters: f[7].into(),
                high: f[8].split(';').filter(|s| !s.is_empty()).map(String::from).collect(),
            }
        })
        .collect()
}

fn hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

/// Largest-remainder split of `total` by `weights`, respecting `caps`.
fn apportion(total: usize, weights: &[f64], caps: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize; weights.len()];
    let mut left = total;
    loop {
        let open: Vec<usize> = (0..weights.len()).filter(|&i| out[i] < caps[i] && weights[i] > 0.0).collect();
        if left == 0 || open.is_empty() {
            break;
        }
        let wsum: f64 = open.iter().map(|&i| weights[i]).sum();
        let shares: Vec<f64> = open.iter().map(|&i| left as f64 * weights[i] / wsum).collect();
        let mut given = 0;
        for (j, &i) in open.iter().enumerate() {
            let n = (shares[j].floor() as usize).min(caps[i] - out[i]);
            out[i] += n;
            given += n;
        }
        if given == 0 {
            let mut order: Vec<usize> = (0..open.len()).collect();
            order.sort_by(|&a, &b| {
                let fa = shares[a] - shares[a].floor();
                let fb = shares[b] - shares[b].floor();
                fb.partial_cmp(&fa).unwrap().then(open[a].cmp(&open[b]))
            });
            for j in order.into_iter().take(left) {
                out[open[j]] += 1;
                given += 1;
            }
        }
        left -= given;
    }
    assert_eq!(left, 0, "apportion could not place {left} units");
    out
}

fn group(sub: &str) -> &'static str {
    match sub {
        "" | "Q" => "sci",
        s if s.starts_with('B') => "hum",
        s if s.starts_with('H') || s.starts_with('J') || s.starts_with('L') => "soc",
        "QH" | "QL" | "QP" => "bio",
        s if s.starts_with('R') => "bio",
        s if s.starts_with('Z') => "info",
        _ => "math",
    }
}

struct NamePools {
    pools: BTreeMap<&'static str, Vec<String>>,
    cursor: BTreeMap<&'static str, usize>,
}

impl NamePools {
    fn new(rng: &mut ChaCha8Rng) -> Self {
        let mut pools = BTreeMap::new();
        for (g, mains) in [
            ("soc", POOL_SOC),
            ("sci", POOL_SCI),
            ("bio", POOL_BIO),
            ("math", POOL_MATH),
            ("info", POOL_INFO),
            ("hum", POOL_HUM),
        ] {
            let mut singles: Vec<String> = mains.iter().map(|s| s.to_string()).collect();
            singles.shuffle(rng);
            let mut combos: Vec<String> =
                mains.iter().flat_map(|m| SUBDIVISIONS.iter().map(move |s| format!("{m} – {s}"))).collect();
            combos.shuffle(rng);
            let mut all = Vec::new();
            let mut c = combos.into_iter();
            for s in singles {
                all.push(s);
                all.extend(c.by_ref().take(2));
            }
            all.extend(c);
            pools.insert(g, all);
        }
        NamePools { pools, cursor: BTreeMap::new() }
    }

    fn next(&mut self, g: &'static str, used: &mut HashSet<String>) -> String {
        let order = [g, "sci", "soc", "math", "bio", "info", "hum"];
        for g in order {
            let pool = &self.pools[g];
            let cur = self.cursor.entry(g).or_default();
            while *cur < pool.len() {
                let name = &pool[*cur];
                *cur += 1;
                if used.insert(heading_key(name)) {
                    return name.clone();
                }
            }
        }
        panic!("name pools exhausted");
    }
}

struct BookPlan {
    /// (canonical, string) in catalog order.
    headings: Vec<(String, String)>,
    removed: Vec<String>,
    alongside: Vec<String>,
}

/// Spelling and facet variants of `p`, grouped by family.
fn variant_families(p: &str) -> [Vec<String>; 4] {
    let forms = FORMS.iter().map(|f| format!("{p} – {f}")).collect();
    let places = PLACES.iter().map(|pl| format!("{p} – {pl}")).collect();
    let periods = PERIODS.iter().map(|t| format!("{p} – {t}")).collect();
    let mut misc = vec![format!("{p}."), p.to_uppercase()];
    if p.contains(" – ") {
        misc.push(p.replace(" – ", " -- "));
        misc.push(p.replace(" – ", "--"));
    }
    misc.extend(["England", "United States", "Europe"].iter().map(|pl| format!("{p} – {pl} – 20th century")));
    [forms, places, periods, misc]
}

fn shelf_number(sub: &str, key: &str, year: i32) -> String {
    let h = hash(key);
    let cutter = key.chars().next().unwrap().to_ascii_uppercase();
    format!(
        "{sub}{}{} .{cutter}{} {year}",
        20 + h % 960,
        if h.is_multiple_of(3) { format!(".{}", h % 9 + 1) } else { String::new() },
        h % 89 + 11
    )
}

fn bib_escape(s: &str) -> String {
    s.replace('&', "\\&")
}

fn main() {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/full_corpus"));
    fs::create_dir_all(&root).expect("create fixture dir");
    let mut rng = ChaCha8Rng::seed_from_u64(2015);

    let entries = parse_appendix();
    let kept: Vec<&Entry> = entries.iter().filter(|e| e.key != DUPLICATE_KEY).collect();
    assert_eq!(kept.len(), 177);
    let idx: HashMap<&str, usize> = kept.iter().enumerate().map(|(i, e)| (e.key.as_str(), i)).collect();
    let at = |k: &str| *idx.get(k).unwrap_or_else(|| panic!("unknown book {k}"));
    let n = kept.len();

    // Required canonical headings and removed strings per book.
    let mut required: Vec<Vec<(String, String)>> =
        kept.iter().map(|e| e.high.iter().map(|h| (h.clone(), h.clone())).collect()).collect();
    for &(book, canon, string) in HIGH_REPLACEMENTS {
        let slot = required[at(book)].iter_mut().find(|(c, _)| c == canon).expect("replacement on a held heading");
        slot.1 = string.to_string();
    }
    for &(book, canon, string) in SPECIALS {
        required[at(book)].push((canon.to_string(), string.to_string()));
    }
    let mut removed: Vec<Vec<String>> = vec![Vec::new(); n];
    for &(book, s) in REMOVED {
        removed[at(book)].push(s.to_string());
    }
    let mut forced: Vec<Vec<String>> = vec![Vec::new(); n];
    for &(book, s) in FORCED_ALONGSIDE {
        forced[at(book)].push(s.to_string());
    }

    // Per-book unique heading counts d, split within each subclass.
    let fixed_d: HashMap<&str, usize> = FIXED_UNIQUE.iter().copied().collect();
    let mut d = vec![0usize; n];
    for &(sub, books, total) in SUBCLASS_TARGETS {
        let members: Vec<usize> = (0..n).filter(|&i| kept[i].lcc == sub).collect();
        assert_eq!(members.len(), books, "subclass {sub:?}");
        let base: Vec<usize> = members
            .iter()
            .map(|&i| {
                let min = (required[i].len() + removed[i].len() + forced[i].len()).max(1);
                match fixed_d.get(kept[i].key.as_str()) {
                    Some(&f) => {
                        assert!(f >= min, "{} fixed below minimum", kept[i].key);
                        f
                    }
                    None => min,
                }
            })
            .collect();
        let base_sum: usize = base.iter().sum();
        assert!(base_sum <= total, "subclass {sub:?} minimum {base_sum} exceeds {total}");
        let weights: Vec<f64> = members
            .iter()
            .map(|&i| {
                if fixed_d.contains_key(kept[i].key.as_str()) {
                    0.0
                } else {
                    3.0 + 1.5 * kept[i].high.len() as f64 + (hash(&kept[i].key) % 5) as f64
                }
            })
            .collect();
        let caps = vec![usize::MAX / 2; members.len()];
        let extra = apportion(total - base_sum, &weights, &caps);
        for (j, &i) in members.iter().enumerate() {
            d[i] = base[j] + extra[j];
        }
    }
    assert_eq!(d.iter().sum::<usize>(), 1305);

    // Extra strings per book: removed strings plus alongside variants.
    let fixed_e: HashMap<&str, usize> = FIXED_EXTRA.iter().copied().collect();
    let mut along = vec![0usize; n];
    let mut caps = vec![0usize; n];
    let mut weights = vec![0.0; n];
    let mut fixed_total = 0;
    for i in 0..n {
        let floor = forced[i].len();
        match fixed_e.get(kept[i].key.as_str()) {
            Some(&e) => {
                along[i] = e - removed[i].len();
                fixed_total += along[i];
            }
            None => {
                along[i] = floor;
                fixed_total += floor;
                caps[i] = d[i] - removed[i].len() - required[i].len().max(1) - floor;
                weights[i] = d[i] as f64;
            }
        }
    }
    let more = apportion(ALONGSIDE_TOTAL - fixed_total, &weights, &caps);
    for i in 0..n {
        along[i] += more[i];
    }
    let c: Vec<usize> = (0..n).map(|i| d[i] - removed[i].len() - along[i]).collect();
    assert_eq!(c.iter().sum::<usize>(), 1117);
    assert_eq!(*c.iter().max().unwrap(), 31);
    assert_eq!(c.iter().filter(|&&x| x == 31).count(), 1);
    assert_eq!(*c.iter().min().unwrap(), 1);

    // Low-degree headings placed greedily into remaining capacity.
    let mut used_keys: HashSet<String> = HashSet::new();
    for e in &kept {
        for h in &e.high {
            used_keys.insert(heading_key(h));
        }
    }
    let merge_map = build_merge_map();
    for e in merge_map.entries() {
        used_keys.insert(heading_key(&e.pattern));
        if let Some(t) = &e.target {
            used_keys.insert(heading_key(t));
        }
    }
    let mut special_degree: BTreeMap<&str, usize> = BTreeMap::new();
    for &(_, canon, _) in SPECIALS {
        used_keys.insert(heading_key(canon));
        *special_degree.entry(canon).or_default() += 1;
    }
    let mut want: BTreeMap<usize, usize> = LOW_DEGREES.iter().copied().collect();
    for k in special_degree.values() {
        *want.get_mut(k).expect("special degree in histogram") -= 1;
    }
    let mut cap: Vec<usize> = (0..n).map(|i| c[i] - required[i].len()).collect();
    let mut pools = NamePools::new(&mut rng);
    let mut generic: Vec<Vec<String>> = vec![Vec::new(); n];
    for (&k, &count) in want.iter().rev() {
        for _ in 0..count {
            let anchor = (0..n).max_by_key(|&i| (cap[i], std::cmp::Reverse(hash(&kept[i].key) % 1000))).unwrap();
            assert!(cap[anchor] > 0, "no capacity left for degree {k}");
            let g = group(&kept[anchor].lcc);
            let mut others: Vec<usize> = (0..n).filter(|&i| i != anchor && cap[i] > 0).collect();
            others.sort_by_key(|&i| (group(&kept[i].lcc) != g, std::cmp::Reverse(cap[i]), i));
            let chosen: Vec<usize> = std::iter::once(anchor).chain(others.into_iter().take(k - 1)).collect();
            assert_eq!(chosen.len(), k, "not enough books for degree {k}");
            let name = pools.next(g, &mut used_keys);
            for i in chosen {
                cap[i] -= 1;
                generic[i].push(name.clone());
            }
        }
    }
    assert!(cap.iter().all(|&x| x == 0));

    // Assemble per-book catalog strings.
    let pinned = "Science – Atlases";
    let mut used_strings: HashSet<String> = HashSet::new();
    let mut plans: Vec<BookPlan> = Vec::with_capacity(n);
    for i in 0..n {
        let mut headings = required[i].clone();
        headings.extend(generic[i].iter().map(|g| (g.clone(), g.clone())));
        for (_, s) in &headings {
            used_strings.insert(s.clone());
        }
        plans.push(BookPlan { headings, removed: removed[i].clone(), alongside: forced[i].clone() });
    }
    for f in FORCED_ALONGSIDE {
        used_strings.insert(f.1.to_string());
    }
    let mut family_counter = 0usize;
    for i in 0..n {
        let targets: Vec<String> =
            plans[i].headings.iter().filter(|(c, s)| c == s && c != pinned).map(|(c, _)| c.clone()).collect();
        let need = along[i] - plans[i].alongside.len();
        assert!(need == 0 || !targets.is_empty(), "{} has no variant targets", kept[i].key);
        for j in 0..need {
            let p = &targets[(j + hash(&kept[i].key) as usize) % targets.len()];
            let fams = variant_families(p);
            let mut picked = None;
            for t in 0..4 {
                let fam = &fams[(family_counter + t) % 4];
                let start = (hash(p) as usize + j) % fam.len();
                for s in fam.iter().cycle().skip(start).take(fam.len()) {
                    if !used_keys.contains(&heading_key(s)) || heading_key(s) == heading_key(p) {
                        if !used_keys.contains(&heading_key(s)) && merge_map.get(&heading_key(s)).is_some() {
                            continue;
                        }
                        if used_strings.insert(s.clone()) {
                            picked = Some(s.clone());
                            break;
                        }
                    }
                }
                if picked.is_some() {
                    break;
                }
            }
            family_counter += 1;
            plans[i].alongside.push(picked.unwrap_or_else(|| panic!("no variant left for {p}")));
        }
    }

    write_files(&root, &entries, &kept, &plans, &merge_map, &mut rng);
    write_golden(&root);

    let unique: BTreeSet<String> = plans
        .iter()
        .flat_map(|p| {
            p.headings
                .iter()
                .map(|(_, s)| s.clone())
                .chain(p.removed.iter().cloned())
                .chain(p.alongside.iter().cloned())
        })
        .collect();
    let canon: BTreeSet<&String> = plans.iter().flat_map(|p| p.headings.iter().map(|(c, _)| c)).collect();
    println!(
        "wrote {}: {} books, {} unique strings, {} canonical headings",
        root.display(),
        n,
        unique.len(),
        canon.len()
    );
}

const GOLDEN_SEEDS: u64 = 200;

/// Runs the pipeline on the fresh fixture and pins the Louvain result at the
/// configured seed, plus the Q range over seeds `0..GOLDEN_SEEDS`.
fn write_golden(root: &Path) {
    let tmp = tempfile::tempdir().expect("tempdir");
    let mut cfg = PipelineConfig::load(&root.join("pipeline.toml")).expect("fixture config");
    cfg.paths.out_dir = Some(tmp.path().to_path_buf());
    run_pipeline(&cfg).expect("pipeline runs on the fixture");
    let text = fs::read_to_string(tmp.path().join(FILTERED_GRAPHML)).unwrap();
    let g = from_graphml(&text).unwrap().to_weighted(false);
    let gamma = cfg.params.gamma;
    let pinned = louvain_with_restarts(&g, gamma, child_seed(cfg.params.seed, "detect"), cfg.params.restarts).unwrap();
    let qs: Vec<f64> = (0..GOLDEN_SEEDS).map(|s| louvain(&g, gamma, s).unwrap().modularity_q).collect();
    let lo = qs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = qs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let golden = json!({
        "graph": FILTERED_GRAPHML,
        "gamma": gamma,
        "seed": cfg.params.seed,
        "restarts": cfg.params.restarts,
        "q": pinned.modularity_q,
        "communities": pinned.community_count(),
        "sizes": pinned.sizes(),
        "band": { "seeds": GOLDEN_SEEDS, "q_min": lo, "q_max": hi },
    });
    fs::create_dir_all(root.join("golden")).unwrap();
    fs::write(root.join("golden/louvain.json"), serde_json::to_string_pretty(&golden).unwrap() + "\n").unwrap();
    println!(
        "golden Q {:.12} ({} communities), band [{lo:.6}, {hi:.6}]",
        pinned.modularity_q,
        pinned.community_count()
    );
}

fn build_merge_map() -> MergeMap {
    let mut entries = MergeMap::defaults().entries().to_vec();
    for m in MATERIALITY {
        entries.push(biblionet::headings::MergeEntry::remove(
            m,
            biblionet::headings::Rule::X1Materiality,
            "describes the medium",
        ));
    }
    for (p, t) in EXTRA_MERGES {
        entries.push(biblionet::headings::MergeEntry::combine(
            p,
            t,
            biblionet::headings::Rule::R5Topical,
            "topical grouping",
        ));
    }
    MergeMap::new(entries).expect("fixture merge map is valid")
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    w.write_record(header).unwrap();
    for r in rows {
        w.write_record(&r).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

fn write_files(
    root: &Path,
    entries: &[Entry],
    kept: &[&Entry],
    plans: &[BookPlan],
    merge_map: &MergeMap,
    rng: &mut ChaCha8Rng,
) {
    let plan_of: HashMap<&str, &BookPlan> = kept.iter().zip(plans).map(|(e, p)| (e.key.as_str(), p)).collect();

    // books.bib: appendix order, then the removed references.
    let mut bib = String::new();
    for e in entries {
        let role = if e.role == "editor" { "editor" } else { "author" };
        bib.push_str(&format!(
            "@{}{{{},\n  {role} = {{{}}},\n  title = {{{}}},\n  year = {{{}}},\n  chapters = {{{}}}\n}}\n\n",
            e.ty,
            e.key,
            bib_escape(&e.names),
            bib_escape(&e.title),
            e.year,
            e.chapters
        ));
    }
    for (i, &(key, ty, year, author, title, _)) in REMOVED_REFS.iter().enumerate() {
        bib.push_str(&format!(
            "@{ty}{{{key},\n  author = {{{}}},\n  title = {{{}}},\n  year = {{{year}}},\n  chapters = {{{}}}\n}}\n\n",
            bib_escape(author),
            bib_escape(title),
            i % 8 + 1
        ));
    }
    fs::write(root.join("books.bib"), bib.trim_end().to_string() + "\n").unwrap();

    // catalog.jsonl
    let padded: HashMap<&str, &Pad> = PADDED.iter().map(|(k, p)| (*k, p)).collect();
    let german: HashMap<&str, &[&str]> = GERMAN_EDITIONS.iter().copied().collect();
    let mut lines = Vec::new();
    for e in entries {
        let source = if e.key == DUPLICATE_KEY { "hodgson1993" } else { e.key.as_str() };
        let plan = plan_of[source];
        let mut strings: Vec<String> = plan
            .headings
            .iter()
            .map(|(_, s)| s.clone())
            .chain(plan.removed.iter().cloned())
            .chain(plan.alongside.iter().cloned())
            .collect();
        strings.shuffle(rng);
        let lcc = (!e.lcc.is_empty()).then(|| shelf_number(&e.lcc, &e.key, e.year));
        lines.push(json!({
            "book_id": e.key,
            "edition_id": format!("{}-e1", e.key),
            "subject_headings": strings,
            "lcc": lcc,
            "heading_language": "eng",
        }));
        if let Some(pad) = padded.get(e.key.as_str()) {
            let target = match pad {
                Pad::Nfd(s) => s.to_string(),
                _ => plan.headings.iter().find(|(c, s)| c == s).map(|(_, s)| s.clone()).unwrap(),
            };
            let second: Vec<String> = strings
                .iter()
                .map(|s| {
                    if *s != target {
                        return s.clone();
                    }
                    match pad {
                        Pad::Leading => format!(" {s}"),
                        Pad::Trailing => format!("{s} "),
                        Pad::Nfd(_) => s.nfd().collect(),
                    }
                })
                .collect();
            assert!(second.iter().any(|s| !strings.contains(s)), "{}: padding missed", e.key);
            lines.push(json!({
                "book_id": e.key,
                "edition_id": format!("{}-e2", e.key),
                "subject_headings": second,
                "heading_language": null,
            }));
        }
        if let Some(hs) = german.get(e.key.as_str()) {
            lines.push(json!({
                "book_id": e.key,
                "edition_id": format!("{}-de", e.key),
                "subject_headings": hs,
                "heading_language": "ger",
            }));
        }
    }
    for &(key, _, _, _, title, langs) in REMOVED_REFS {
        for (j, lang) in langs.iter().enumerate() {
            lines.push(json!({
                "book_id": key,
                "edition_id": format!("{key}-{lang}{j}"),
                "subject_headings": [title.split(':').next().unwrap().trim()],
                "heading_language": lang,
            }));
        }
    }
    let jsonl: String = lines.iter().map(|l| serde_json::to_string(l).unwrap() + "\n").collect();
    fs::write(root.join("catalog.jsonl"), jsonl).unwrap();

    // merge_map.csv
    let mm = csv_text(
        &["pattern", "action", "target", "rule", "note"],
        merge_map.entries().iter().map(|e| {
            vec![
                e.pattern.clone(),
                match e.action {
                    biblionet::headings::MergeAction::CombineInto => "combine_into".into(),
                    biblionet::headings::MergeAction::Remove => "remove".into(),
                },
                e.target.clone().unwrap_or_default(),
                e.rule.name().to_string(),
                e.note.clone(),
            ]
        }),
    );
    fs::write(root.join("merge_map.csv"), mm).unwrap();

    // Term lists.
    let list = |xs: &[&str]| xs.iter().map(|s| format!("{s}\n")).collect::<String>();
    fs::write(root.join("forms.txt"), list(FORMS)).unwrap();
    fs::write(root.join("gazetteer.txt"), list(PLACES)).unwrap();
    fs::write(root.join("names.txt"), list(NAMES)).unwrap();

    // crosswalk.csv from the built-in table.
    let xwalk = CrosswalkTable::default();
    let mut rows = Vec::new();
    for (letters, code) in xwalk.entries() {
        rows.push(vec![letters.clone(), code.to_string()]);
    }
    fs::write(root.join("crosswalk.csv"), csv_text(&["class_letters", "code"], rows)).unwrap();

    // codebook.csv: hand codings first, then quota-driven codes.
    let mut quota: BTreeMap<(u8, Option<u8>), usize> = BTreeMap::new();
    for &(p, single, cells) in CROSSTAB {
        quota.insert((p, None), single);
        for &(s, k) in cells {
            quota.insert((p, Some(s)), k);
        }
    }
    let mut coded: BTreeMap<String, (u8, Option<u8>)> = BTreeMap::new();
    for &(h, p, s) in CODINGS {
        let q = quota.get_mut(&(p, s)).unwrap_or_else(|| panic!("no cell for {h}"));
        assert!(*q > 0, "cell ({p},{s:?}) exhausted by {h}");
        *q -= 1;
        coded.insert(h.to_string(), (p, s));
    }
    let mut anchors: BTreeMap<String, usize> = BTreeMap::new();
    for (i, p) in plans.iter().enumerate() {
        for (c, _) in &p.headings {
            anchors.entry(c.clone()).or_insert(i);
        }
    }
    let mut order: Vec<(&String, &usize)> = anchors.iter().collect();
    order.sort_by_key(|(h, _)| hash(h));
    for (h, &i) in order {
        if coded.contains_key(h) {
            continue;
        }
        let preferred = match kept[i].lcc.as_str() {
            "" => 0,
            sub => xwalk.lookup(&parse_lcc(sub).unwrap().class_letters).map_or(0, |d| d.code()),
        };
        let row_left = |r: u8, q: &BTreeMap<(u8, Option<u8>), usize>| -> usize {
            q.iter().filter(|((p, _), _)| *p == r).map(|(_, v)| *v).sum()
        };
        let row = if row_left(preferred, &quota) > 0 {
            preferred
        } else {
            (0..11u8).max_by_key(|&r| (row_left(r, &quota), std::cmp::Reverse(r))).unwrap()
        };
        let cell = *quota
            .iter()
            .filter(|((p, _), v)| *p == row && **v > 0)
            .max_by_key(|(k, v)| (**v, std::cmp::Reverse(**k)))
            .map(|(k, _)| k)
            .expect("row has quota");
        *quota.get_mut(&cell).unwrap() -= 1;
        coded.insert(h.clone(), cell);
    }
    assert!(quota.values().all(|&v| v == 0), "cross-tab quota left: {quota:?}");
    let cb = csv_text(
        &["heading", "primary", "secondary", "note"],
        coded.iter().map(|(h, (p, s))| {
            vec![h.clone(), p.to_string(), s.map(|s| s.to_string()).unwrap_or_default(), String::new()]
        }),
    );
    fs::write(root.join("codebook.csv"), cb).unwrap();

    let toml = "\
[paths]
bibtex = \"books.bib\"
catalog = \"catalog.jsonl\"
codebook = \"codebook.csv\"
merge_map = \"merge_map.csv\"
crosswalk = \"crosswalk.csv\"
forms = \"forms.txt\"
places = \"gazetteer.txt\"
names = \"names.txt\"

[params]
degree_gt = 5
gamma = 0.9
seed = 42
bin_width = 5
layout_iterations = 500
restarts = 1
slice_max_year = 1990
";
    fs::write(root.join("pipeline.toml"), toml).unwrap();
}
