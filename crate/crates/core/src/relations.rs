//! Functional relations among weight triples and the symbolic census of YBE components.
//!
//! Leg 0 carries the R-matrix weights at `λ1 − λ2`, legs 1 and 2 the two L-operators at
//! `λ1` and `λ2`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::weights::{WeightName, WeightSet};
use crate::C64;

/// One weight at one leg of a triple product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeightSlot {
    pub name: WeightName,
    pub leg: u8,
}

impl fmt::Display for WeightSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.name.symbol(), self.leg)
    }
}

/// Relation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Group {
    TwoTerm,
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
    G8,
    FiveTerm,
    Branching,
}

impl Group {
    fn parse(s: &str) -> Option<Group> {
        Some(match s {
            "TwoTerm" => Group::TwoTerm,
            "G1" => Group::G1,
            "G2" => Group::G2,
            "G3" => Group::G3,
            "G4" => Group::G4,
            "G5" => Group::G5,
            "G6" => Group::G6,
            "G7" => Group::G7,
            "G8" => Group::G8,
            "FiveTerm" => Group::FiveTerm,
            "Branching" => Group::Branching,
            _ => return None,
        })
    }

    pub fn is_three_term(self) -> bool {
        matches!(self, Group::G1 | Group::G2 | Group::G3)
    }
}

/// Integer polynomial in Ψ, lowest power first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PsiPoly(pub Vec<i64>);

impl PsiPoly {
    pub fn eval(&self, psi: C64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, &k| acc * psi + k as f64)
    }

    fn scaled(&self, s: i64) -> PsiPoly {
        PsiPoly(self.0.iter().map(|k| k * s).collect())
    }
}

/// A signed triple product with a Ψ-polynomial prefactor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: PsiPoly,
    pub factors: [WeightSlot; 3],
}

/// A named linear relation among triple products.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalRelation {
    pub id: String,
    pub group: Group,
    pub terms: Vec<Term>,
}

impl FunctionalRelation {
    fn monomial(&self, t: &Term, w: [&WeightSet; 3]) -> C64 {
        t.factors.iter().map(|s| w[s.leg as usize].get(s.name)).product()
    }

    /// Unnormalized value of the relation.
    pub fn evaluate(&self, w: [&WeightSet; 3], psi: C64) -> C64 {
        self.terms.iter().map(|t| t.coeff.eval(psi) * self.monomial(t, w)).sum()
    }

    /// Largest triple-product magnitude in the relation.
    pub fn scale(&self, w: [&WeightSet; 3]) -> f64 {
        self.terms.iter().map(|t| self.monomial(t, w).norm()).fold(0.0, f64::max)
    }

    /// `|evaluate| / scale`.
    pub fn residual(&self, w: [&WeightSet; 3], psi: C64) -> f64 {
        let s = self.scale(w);
        let v = self.evaluate(w, psi).norm();
        if s > 0.0 {
            v / s
        } else {
            v
        }
    }

    /// Image under `+ ↔ −` on every slot name.
    pub fn charge_conjugate(&self) -> FunctionalRelation {
        FunctionalRelation {
            id: self.id.clone(),
            group: self.group,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.clone(),
                    factors: t.factors.map(|s| WeightSlot { name: s.name.charge_conjugate(), leg: s.leg }),
                })
                .collect(),
        }
    }
}

const CATALOG_SRC: &str = include_str!("catalog.txt");

/// Every cataloged relation with ± variants expanded into separate entries.
pub fn catalog() -> &'static [FunctionalRelation] {
    static CATALOG: OnceLock<Vec<FunctionalRelation>> = OnceLock::new();
    CATALOG.get_or_init(|| parse_catalog(CATALOG_SRC).expect("embedded catalog is well formed"))
}

/// Relation by id.
pub fn relation(id: &str) -> Option<&'static FunctionalRelation> {
    catalog().iter().find(|r| r.id == id)
}

/// Parse the line-oriented catalog format.
///
/// Each line reads `id group pm|one : term ; term ...`, a term being a coefficient
/// (`+`, `-`, optionally followed by `P`, `P2` or `P2m1`) and three slots `name[sign]leg`.
/// The sign letter `s` follows the variant, `o` is opposite, `+` and `-` are fixed.
pub fn parse_catalog(src: &str) -> Result<Vec<FunctionalRelation>, String> {
    let mut out = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| format!("line {}: {m}", lineno + 1);
        let (head, body) = line.split_once(':').ok_or_else(|| err("missing ':'"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        let [id, group, expand] = head[..] else { return Err(err("header needs id, group, expansion")) };
        let group = Group::parse(group).ok_or_else(|| err("unknown group"))?;
        let variants: &[(bool, &str)] = match expand {
            "pm" => &[(true, "+"), (false, "-")],
            "one" => &[(true, "")],
            _ => return Err(err("expansion must be pm or one")),
        };
        for &(plus, suffix) in variants {
            let mut terms = Vec::new();
            for t in body.split(';') {
                let toks: Vec<&str> = t.split_whitespace().collect();
                if toks.len() != 4 {
                    return Err(err("term needs a coefficient and three slots"));
                }
                let coeff = parse_coeff(toks[0]).ok_or_else(|| err("bad coefficient"))?;
                let mut factors = [WeightSlot { name: WeightName::APlus, leg: 0 }; 3];
                for (k, tok) in toks[1..].iter().enumerate() {
                    factors[k] = parse_slot(tok, plus).ok_or_else(|| err(&format!("bad slot '{tok}'")))?;
                }
                terms.push(Term { coeff, factors });
            }
            out.push(FunctionalRelation { id: format!("{id}{suffix}"), group, terms });
        }
    }
    Ok(out)
}

fn parse_coeff(tok: &str) -> Option<PsiPoly> {
    let (sign, rest) = match tok.split_at(1) {
        ("+", r) => (1, r),
        ("-", r) => (-1, r),
        _ => return None,
    };
    let p = match rest {
        "" => vec![1],
        "P" => vec![0, 1],
        "P2" => vec![0, 0, 1],
        "P2m1" => vec![-1, 0, 1],
        _ => return None,
    };
    Some(PsiPoly(p).scaled(sign))
}

fn parse_slot(tok: &str, plus: bool) -> Option<WeightSlot> {
    let leg = tok.chars().last()?.to_digit(10)? as u8;
    if leg > 2 {
        return None;
    }
    let stem = &tok[..tok.len() - 1];
    let (base, sign) = match stem.chars().last()? {
        's' => (&stem[..stem.len() - 1], Some(plus)),
        'o' => (&stem[..stem.len() - 1], Some(!plus)),
        '+' => (&stem[..stem.len() - 1], Some(true)),
        '-' => (&stem[..stem.len() - 1], Some(false)),
        _ => (stem, None),
    };
    use WeightName::*;
    let name = match (base, sign) {
        ("a", Some(p)) => if p { APlus } else { AMinus },
        ("b", Some(p)) => if p { BPlus } else { BMinus },
        ("c", Some(p)) => if p { CPlus } else { CMinus },
        ("ct", Some(p)) => if p { CTildePlus } else { CTildeMinus },
        ("d", None) => D,
        ("dt", None) => DTilde,
        ("f", None) => F,
        ("g", None) => G,
        ("h", None) => H,
        ("ht", None) => HTilde,
        _ => return None,
    };
    Some(WeightSlot { name, leg })
}

/// Normalized residual of every cataloged relation on a weight triple.
pub fn evaluate_relations(w0: &WeightSet, w1: &WeightSet, w2: &WeightSet, psi: C64) -> BTreeMap<String, f64> {
    catalog().iter().map(|r| (r.id.clone(), r.residual([w0, w1, w2], psi))).collect()
}

/// Nonzero entries of a symbolic L-operator: weight name and indices `(a, b, c, d)` of
/// `e_ab ⊗ e_cd`, with states numbered from zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotAlgebra {
    pub states: usize,
    pub entries: Vec<(WeightName, [usize; 4])>,
}

impl SlotAlgebra {
    /// The PT-invariant nineteen-vertex ansatz with independent `c̃±` and `d̃`.
    pub fn pt_invariant() -> SlotAlgebra {
        use WeightName::*;
        let e = vec![
            (APlus, [0, 0, 0, 0]),
            (BPlus, [0, 0, 1, 1]),
            (BPlus, [1, 1, 0, 0]),
            (F, [0, 0, 2, 2]),
            (F, [2, 2, 0, 0]),
            (BMinus, [1, 1, 2, 2]),
            (BMinus, [2, 2, 1, 1]),
            (G, [1, 1, 1, 1]),
            (AMinus, [2, 2, 2, 2]),
            (H, [0, 2, 2, 0]),
            (HTilde, [2, 0, 0, 2]),
            (CPlus, [0, 1, 1, 0]),
            (CTildePlus, [1, 0, 0, 1]),
            (CMinus, [1, 2, 2, 1]),
            (CTildeMinus, [2, 1, 1, 2]),
            (D, [0, 1, 2, 1]),
            (D, [1, 2, 1, 0]),
            (DTilde, [1, 0, 1, 2]),
            (DTilde, [2, 1, 0, 1]),
        ];
        SlotAlgebra { states: 3, entries: e }
    }

    /// Two-state ansatz with weights `a`, `b`, `c`, `c̃`.
    pub fn six_vertex() -> SlotAlgebra {
        use WeightName::*;
        let e = vec![
            (APlus, [0, 0, 0, 0]),
            (APlus, [1, 1, 1, 1]),
            (BPlus, [0, 0, 1, 1]),
            (BPlus, [1, 1, 0, 0]),
            (CPlus, [0, 1, 1, 0]),
            (CTildePlus, [1, 0, 0, 1]),
        ];
        SlotAlgebra { states: 2, entries: e }
    }

    /// The same ansatz with the listed weights set to zero.
    pub fn without(mut self, names: &[WeightName]) -> SlotAlgebra {
        self.entries.retain(|(n, _)| !names.contains(n));
        self
    }
}

/// Product of three slot names indexed by leg, with a Ψ exponent.
pub type Monomial = ([WeightName; 3], u8);

/// Integer-coefficient polynomial in triple products.
pub type SlotPoly = BTreeMap<Monomial, i64>;

type SparseSym = HashMap<usize, Vec<(usize, WeightName)>>;

fn lift(alg: &SlotAlgebra, pair: (usize, usize)) -> SparseSym {
    let q = alg.states;
    let spectator = 3 - pair.0 - pair.1;
    let mut out: SparseSym = HashMap::new();
    for &(name, [a, b, c, d]) in &alg.entries {
        for s in 0..q {
            let mut r = [0; 3];
            let mut col = [0; 3];
            r[pair.0] = a;
            col[pair.0] = b;
            r[pair.1] = c;
            col[pair.1] = d;
            r[spectator] = s;
            col[spectator] = s;
            let flat = |v: [usize; 3]| (v[0] * q + v[1]) * q + v[2];
            out.entry(flat(r)).or_default().push((flat(col), name));
        }
    }
    out
}

/// Symbolic components of `R12 L13 L23 − L23 L13 R12`, keyed by `(row, col)` of the
/// `q³ × q³` tensor; identically vanishing components are dropped.
pub fn ybe_components(alg: &SlotAlgebra) -> BTreeMap<(usize, usize), SlotPoly> {
    let r12 = lift(alg, (0, 1));
    let l13 = lift(alg, (0, 2));
    let l23 = lift(alg, (1, 2));
    let mut acc: HashMap<(usize, usize), HashMap<[WeightName; 3], i64>> = HashMap::new();
    let legs_of = |order: [usize; 3], n: [WeightName; 3]| {
        let mut m = [WeightName::APlus; 3];
        for k in 0..3 {
            m[order[k]] = n[k];
        }
        m
    };
    let chains: [(&SparseSym, &SparseSym, &SparseSym, [usize; 3], i64); 2] =
        [(&r12, &l13, &l23, [0, 1, 2], 1), (&l23, &l13, &r12, [2, 1, 0], -1)];
    for (x, y, z, order, sign) in chains {
        for (&r, xs) in x {
            for &(m1, n1) in xs {
                let Some(ys) = y.get(&m1) else { continue };
                for &(m2, n2) in ys {
                    let Some(zs) = z.get(&m2) else { continue };
                    for &(col, n3) in zs {
                        let key = legs_of(order, [n1, n2, n3]);
                        *acc.entry((r, col)).or_default().entry(key).or_default() += sign;
                    }
                }
            }
        }
    }
    acc.into_iter()
        .filter_map(|(k, p)| {
            let p: SlotPoly = p.into_iter().filter(|&(_, c)| c != 0).map(|(m, c)| ((m, 0), c)).collect();
            (!p.is_empty()).then_some((k, p))
        })
        .collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Canonical representative up to an overall nonzero scalar: primitive integer
/// coefficients with the smallest monomial positive.
pub fn canonical(p: &SlotPoly) -> Vec<(Monomial, i64)> {
    let g = p.values().fold(0, |g, &c| gcd(g, c)).max(1);
    let s = p.values().next().map_or(1, |&c| c.signum());
    p.iter().map(|(&m, &c)| (m, c / g * s)).collect()
}

/// Replace `c̃± → c±` and `d̃ → Ψ d`, then divide out the lowest common power of Ψ.
pub fn gauge_reduce(p: &SlotPoly) -> SlotPoly {
    let mut out: SlotPoly = BTreeMap::new();
    for (&(names, k), &c) in p {
        let mut psi = k;
        let names = names.map(|n| match n {
            WeightName::CTildePlus => WeightName::CPlus,
            WeightName::CTildeMinus => WeightName::CMinus,
            WeightName::DTilde => {
                psi += 1;
                WeightName::D
            }
            other => other,
        });
        *out.entry((names, psi)).or_default() += c;
    }
    out.retain(|_, c| *c != 0);
    let low = out.keys().map(|m| m.1).min().unwrap_or(0);
    out.into_iter().map(|((n, k), c)| ((n, k - low), c)).collect()
}

/// Polynomial form of a cataloged relation.
pub fn relation_poly(r: &FunctionalRelation) -> SlotPoly {
    let mut out: SlotPoly = BTreeMap::new();
    for t in &r.terms {
        let mut names = [WeightName::APlus; 3];
        for s in &t.factors {
            names[s.leg as usize] = s.name;
        }
        for (k, &c) in t.coeff.0.iter().enumerate() {
            if c != 0 {
                *out.entry((names, k as u8)).or_default() += c;
            }
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Component counts bucketed by number of distinct triple products.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub counts: BTreeMap<usize, usize>,
    pub total: usize,
    /// Nonvanishing scalar components before merging.
    pub components: usize,
    /// Counts after `c̃ = c`, `d̃ = Ψd` and identification up to powers of Ψ.
    pub consolidated: BTreeMap<usize, usize>,
}

/// Distinct census equations, keyed by canonical form.
pub fn census_equations(alg: &SlotAlgebra) -> BTreeSet<Vec<(Monomial, i64)>> {
    ybe_components(alg).values().map(canonical).collect()
}

/// Gauge-consolidated census equations.
pub fn consolidated_equations(alg: &SlotAlgebra) -> BTreeSet<Vec<(Monomial, i64)>> {
    ybe_components(alg)
        .values()
        .map(gauge_reduce)
        .filter(|p| !p.is_empty())
        .map(|p| canonical(&p))
        .collect()
}

fn bucket<'a>(eqs: impl Iterator<Item = &'a Vec<(Monomial, i64)>>) -> BTreeMap<usize, usize> {
    let mut counts = BTreeMap::new();
    for e in eqs {
        *counts.entry(e.len()).or_default() += 1;
    }
    counts
}

/// Expand the YBE componentwise and count distinct equations by number of triple products.
pub fn ybe_census(alg: &SlotAlgebra) -> CensusReport {
    let comps = ybe_components(alg);
    let distinct: BTreeSet<_> = comps.values().map(canonical).collect();
    let consolidated: BTreeSet<_> =
        comps.values().map(gauge_reduce).filter(|p| !p.is_empty()).map(|p| canonical(&p)).collect();
    let counts = bucket(distinct.iter());
    CensusReport {
        total: counts.values().sum(),
        counts,
        components: comps.len(),
        consolidated: bucket(consolidated.iter()),
    }
}

/// One term of a census equation: integer coefficient, weight per leg and Ψ power.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusTerm {
    pub coefficient: i64,
    pub legs: [WeightName; 3],
    pub psi_power: u8,
}

/// A distinct census equation `Σ terms = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub terms: Vec<CensusTerm>,
}

/// Distinct census equations in serializable form.
pub fn census_entries(alg: &SlotAlgebra) -> Vec<CensusEntry> {
    census_equations(alg)
        .into_iter()
        .map(|eq| CensusEntry {
            terms: eq
                .into_iter()
                .map(|((legs, psi_power), coefficient)| CensusTerm { coefficient, legs, psi_power })
                .collect(),
        })
        .collect()
}

/// Correspondence between the catalog and the gauge-consolidated census.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogMatch {
    /// Relations that become identically zero under the gauge.
    pub trivial: Vec<String>,
    /// Catalog relations with no census counterpart.
    pub unmatched_relations: Vec<String>,
    /// Consolidated census equations with no catalog counterpart.
    pub unmatched_equations: usize,
    pub matched_equations: usize,
}

pub fn match_catalog_to_census() -> CatalogMatch {
    let census = consolidated_equations(&SlotAlgebra::pt_invariant());
    let mut hit = BTreeSet::new();
    let mut trivial = Vec::new();
    let mut unmatched = Vec::new();
    for r in catalog() {
        let p = gauge_reduce(&relation_poly(r));
        if p.is_empty() {
            trivial.push(r.id.clone());
            continue;
        }
        let key = canonical(&p);
        if census.contains(&key) {
            hit.insert(key);
        } else {
            unmatched.push(r.id.clone());
        }
    }
    CatalogMatch {
        trivial,
        unmatched_relations: unmatched,
        unmatched_equations: census.len() - hit.len(),
        matched_equations: hit.len(),
    }
}
