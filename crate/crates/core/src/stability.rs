//! Central charges, global phases and slopes, and checks of slicing axioms
//! and Harder-Narasimhan filtrations on finite toy categories given as data.
//!
//! Phases come in two units. An assigned slicing phase φ is in Bridgeland
//! units, Z = m·e^{iπφ}. A global phase is an angle in radians in
//! (πα, π(α+1)].

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planes::C64;

/// Tolerance for phase comparisons and ray tests.
pub const PHASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StabilityError {
    #[error("central charge vanishes on {0:?}")]
    ZeroCharge(Vec<i64>),
    #[error("alpha = {0} is not admissible: a class lies on the excluded ray")]
    Inadmissible(f64),
    #[error("class {0:?} has phase outside the half-plane (πα, π(α+1)]")]
    OutsideHalfPlane(Vec<i64>),
    #[error("slope undefined: phase sits on the boundary πα + π")]
    SlopeBoundary,
    #[error("malformed category: {0}")]
    Malformed(String),
    #[error("no consistent filtration for {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CentralCharge {
    /// Z of each lattice generator, as [re, im].
    pub periods: Vec<[f64; 2]>,
}

impl CentralCharge {
    pub fn new(periods: &[C64]) -> Self {
        CentralCharge { periods: periods.iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn rank(&self) -> usize {
        self.periods.len()
    }

    pub fn eval(&self, class: &[i64]) -> C64 {
        self.periods.iter().zip(class).map(|(p, c)| C64::new(p[0], p[1]) * (*c as f64)).sum()
    }
}

/// Is arg z ≡ θ (mod 2π) with z ≠ 0?
fn on_ray(z: C64, theta: f64) -> bool {
    if z.norm() == 0.0 {
        return false;
    }
    let rotated = z * C64::from_polar(1.0, -theta);
    rotated.re > 0.0 && rotated.im.abs() <= PHASE_TOL * z.norm()
}

/// True iff no Z(c) lies on the open ray e^{iπα}(0, ∞).
pub fn admissible_alpha(charge: &CentralCharge, classes: &[Vec<i64>], alpha: f64) -> bool {
    classes.iter().all(|c| !on_ray(charge.eval(c), PI * alpha))
}

/// The argument of Z(class) in (πα, π(α+1)]. The closing endpoint is kept
/// so that classes on the opposite ray, which admissibility does not exclude,
/// still get a phase.
pub fn global_phase(charge: &CentralCharge, class: &[i64], alpha: f64) -> Result<f64, StabilityError> {
    let z = charge.eval(class);
    if z.norm() == 0.0 {
        return Err(StabilityError::ZeroCharge(class.to_vec()));
    }
    if on_ray(z, PI * alpha) {
        return Err(StabilityError::Inadmissible(alpha));
    }
    // rotate so that the admissible half-plane is the upper one
    let w = z * C64::from_polar(1.0, -PI * alpha);
    let mut arg = w.arg();
    if on_ray(z, PI * (alpha + 1.0)) {
        arg = PI;
    }
    if !(arg > 0.0 && arg <= PI) {
        return Err(StabilityError::OutsideHalfPlane(class.to_vec()));
    }
    Ok(arg + PI * alpha)
}

/// μ = (−cos πα ReZ − sin πα ImZ)/(−sin πα ReZ + cos πα ImZ).
pub fn slope(charge: &CentralCharge, class: &[i64], alpha: f64) -> Result<f64, StabilityError> {
    let z = charge.eval(class);
    let (s, c) = (PI * alpha).sin_cos();
    let num = -c * z.re - s * z.im;
    let den = -s * z.re + c * z.im;
    if den.abs() <= PHASE_TOL * z.norm() {
        return Err(StabilityError::SlopeBoundary);
    }
    Ok(num / den)
}

/// Phase recovered from the slope on the principal branch.
pub fn phase_from_slope(mu: f64, alpha: f64) -> f64 {
    mu.atan() + PI * alpha + PI / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyObject {
    pub name: String,
    pub class: Vec<i64>,
    /// Assigned slicing phase, Bridgeland units; None if not semistable.
    #[serde(default)]
    pub phase: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftEntry {
    pub object: String,
    pub by: i64,
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomEntry {
    pub from: String,
    pub to: String,
}

/// A distinguished triangle sub → object → quotient → sub[1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Triangle {
    pub sub: String,
    pub object: String,
    pub quotient: String,
}

/// A listed filtration of `object` with the given factors, top first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationEntry {
    pub object: String,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyCategory {
    pub rank: usize,
    pub objects: Vec<ToyObject>,
    #[serde(default)]
    pub shifts: Vec<ShiftEntry>,
    /// Pairs with nonzero degree-zero Hom.
    #[serde(default)]
    pub homs: Vec<HomEntry>,
    #[serde(default)]
    pub triangles: Vec<Triangle>,
    #[serde(default)]
    pub filtrations: Vec<FiltrationEntry>,
}

impl ToyCategory {
    fn index(&self) -> BTreeMap<&str, &ToyObject> {
        self.objects.iter().map(|o| (o.name.as_str(), o)).collect()
    }

    pub fn object(&self, name: &str) -> Option<&ToyObject> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn classes(&self) -> Vec<Vec<i64>> {
        self.objects.iter().map(|o| o.class.clone()).collect()
    }

    /// Structural checks: names resolve, ranks agree, shifts act on classes
    /// by (−1)^n and triangles are additive.
    pub fn validate(&self) -> Result<(), StabilityError> {
        let bad = |s: String| Err(StabilityError::Malformed(s));
        let idx = self.index();
        if idx.len() != self.objects.len() {
            return bad("duplicate object names".into());
        }
        for o in &self.objects {
            if o.class.len() != self.rank {
                return bad(format!("{} has a class of rank {}", o.name, o.class.len()));
            }
        }
        let get = |n: &str| idx.get(n).copied().ok_or_else(|| StabilityError::Malformed(format!("unknown object {n}")));
        for s in &self.shifts {
            let (a, b) = (get(&s.object)?, get(&s.result)?);
            let sign = if s.by.rem_euclid(2) == 0 { 1 } else { -1 };
            if a.class.iter().zip(&b.class).any(|(x, y)| sign * x != *y) {
                return bad(format!("{}[{}] = {} breaks the class sign rule", s.object, s.by, s.result));
            }
        }
        for h in &self.homs {
            get(&h.from)?;
            get(&h.to)?;
        }
        for t in &self.triangles {
            let (a, b, c) = (get(&t.sub)?, get(&t.object)?, get(&t.quotient)?);
            if (0..self.rank).any(|i| a.class[i] + c.class[i] != b.class[i]) {
                return bad(format!("triangle {} → {} → {} is not additive", t.sub, t.object, t.quotient));
            }
        }
        for f in &self.filtrations {
            get(&f.object)?;
            for n in &f.factors {
                get(n)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// Z of a semistable object lies on the ray of its phase.
    ChargeCompatible,
    /// P(φ + 1) = P(φ)[1].
    ShiftCompatible,
    /// No Hom from a higher to a strictly lower phase.
    HomVanishing,
    /// Every object has a filtration with strictly decreasing phases.
    Filtration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub witnesses: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn failed_axioms(&self) -> BTreeSet<Axiom> {
        self.violations.iter().map(|v| v.axiom).collect()
    }
}

pub fn check_axioms(cat: &ToyCategory, charge: &CentralCharge) -> Result<AxiomReport, StabilityError> {
    cat.validate()?;
    if charge.rank() != cat.rank {
        return Err(StabilityError::Malformed(format!("charge has rank {}, category {}", charge.rank(), cat.rank)));
    }
    let idx = cat.index();
    let mut out = Vec::new();
    for o in &cat.objects {
        if let Some(phi) = o.phase {
            let z = charge.eval(&o.class);
            if !on_ray(z, PI * phi) {
                out.push(Violation {
                    axiom: Axiom::ChargeCompatible,
                    witnesses: vec![o.name.clone()],
                    detail: format!("Z = {z} is not on the ray of phase {phi}"),
                });
            }
        }
    }
    for s in &cat.shifts {
        let (a, b) = (idx[s.object.as_str()], idx[s.result.as_str()]);
        let ok = match (a.phase, b.phase) {
            (Some(p), Some(q)) => (q - p - s.by as f64).abs() <= PHASE_TOL,
            (None, None) => true,
            _ => false,
        };
        if !ok {
            out.push(Violation {
                axiom: Axiom::ShiftCompatible,
                witnesses: vec![s.object.clone(), s.result.clone()],
                detail: format!("phases {:?} and {:?} differ from a shift by {}", a.phase, b.phase, s.by),
            });
        }
    }
    for h in &cat.homs {
        if let (Some(p), Some(q)) = (idx[h.from.as_str()].phase, idx[h.to.as_str()].phase) {
            if p > q + PHASE_TOL {
                out.push(Violation {
                    axiom: Axiom::HomVanishing,
                    witnesses: vec![h.from.clone(), h.to.clone()],
                    detail: format!("Hom({}, {}) ≠ 0 with phases {p} > {q}", h.from, h.to),
                });
            }
        }
    }
    for o in &cat.objects {
        if o.phase.is_some() {
            continue;
        }
        let listed: Vec<&FiltrationEntry> = cat.filtrations.iter().filter(|f| f.object == o.name).collect();
        let good = listed.iter().any(|f| {
            let phases: Option<Vec<f64>> = f.factors.iter().map(|n| idx[n.as_str()].phase).collect();
            let Some(phases) = phases else { return false };
            let decreasing = phases.windows(2).all(|w| w[0] > w[1] + PHASE_TOL);
            let sum: Vec<i64> = (0..cat.rank).map(|i| f.factors.iter().map(|n| idx[n.as_str()].class[i]).sum()).collect();
            !phases.is_empty() && decreasing && sum == o.class
        });
        if !good {
            out.push(Violation {
                axiom: Axiom::Filtration,
                witnesses: vec![o.name.clone()],
                detail: "no listed filtration with semistable factors of strictly decreasing phase".into(),
            });
        }
    }
    Ok(AxiomReport { violations: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semistability {
    Stable,
    Semistable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemistabilityReport {
    pub verdict: Semistability,
    pub witness: Option<Triangle>,
}

fn phase_of(cat: &ToyCategory, charge: &CentralCharge, name: &str, alpha: f64) -> Result<f64, StabilityError> {
    let o = cat.object(name).ok_or_else(|| StabilityError::Malformed(format!("unknown object {name}")))?;
    global_phase(charge, &o.class, alpha)
}

/// Scans the listed triangles with `object` in the middle.
pub fn semistability_test(cat: &ToyCategory, charge: &CentralCharge, object: &str, alpha: f64) -> Result<SemistabilityReport, StabilityError> {
    let mut tie = None;
    for t in cat.triangles.iter().filter(|t| t.object == object) {
        let p1 = phase_of(cat, charge, &t.sub, alpha)?;
        let p2 = phase_of(cat, charge, &t.quotient, alpha)?;
        if p1 > p2 + PHASE_TOL {
            return Ok(SemistabilityReport { verdict: Semistability::Unstable, witness: Some(t.clone()) });
        }
        if (p1 - p2).abs() <= PHASE_TOL && tie.is_none() {
            tie = Some(t.clone());
        }
    }
    Ok(match tie {
        Some(t) => SemistabilityReport { verdict: Semistability::Semistable, witness: Some(t) },
        None => SemistabilityReport { verdict: Semistability::Stable, witness: None },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HnFactor {
    pub factor: String,
    pub class: Vec<i64>,
    /// Global phase in radians.
    pub phase: f64,
}

fn class_norm(c: &[i64]) -> i64 {
    c.iter().map(|v| v * v).sum()
}

/// Greedy filtration: split off the subobject of largest phase (largest
/// class on ties) and recurse on the quotient.
pub fn hn_filtration(cat: &ToyCategory, charge: &CentralCharge, object: &str, alpha: f64) -> Result<Vec<HnFactor>, StabilityError> {
    cat.validate()?;
    let mut out: Vec<HnFactor> = Vec::new();
    let mut current = object.to_string();
    for _ in 0..=cat.objects.len() {
        let me = cat.object(&current).ok_or_else(|| StabilityError::Malformed(format!("unknown object {current}")))?;
        let own = global_phase(charge, &me.class, alpha)?;
        let mut best: Option<(f64, i64, &Triangle)> = None;
        for t in cat.triangles.iter().filter(|t| t.object == current) {
            let sub = cat.object(&t.sub).expect("validated");
            let p = global_phase(charge, &sub.class, alpha)?;
            let n = class_norm(&sub.class);
            let better = match best {
                None => true,
                Some((bp, bn, _)) => p > bp + PHASE_TOL || ((p - bp).abs() <= PHASE_TOL && n > bn),
            };
            if better {
                best = Some((p, n, t));
            }
        }
        match best {
            Some((p, _, t)) if p > own + PHASE_TOL => {
                let sub = cat.object(&t.sub).expect("validated");
                out.push(HnFactor { factor: t.sub.clone(), class: sub.class.clone(), phase: p });
                current = t.quotient.clone();
            }
            _ => {
                out.push(HnFactor { factor: current.clone(), class: me.class.clone(), phase: own });
                if out.windows(2).any(|w| w[0].phase <= w[1].phase + PHASE_TOL) {
                    return Err(StabilityError::Inconsistent(object.into()));
                }
                return Ok(out);
            }
        }
    }
    Err(StabilityError::Inconsistent(object.into()))
}

fn is_semistable(cat: &ToyCategory, charge: &CentralCharge, name: &str, alpha: f64) -> Result<bool, StabilityError> {
    Ok(semistability_test(cat, charge, name, alpha)?.verdict != Semistability::Unstable)
}

/// Every filtration by listed triangles whose factors are semistable with
/// strictly decreasing phases.
pub fn hn_enumerate(cat: &ToyCategory, charge: &CentralCharge, object: &str, alpha: f64) -> Result<Vec<Vec<HnFactor>>, StabilityError> {
    fn go(
        cat: &ToyCategory,
        charge: &CentralCharge,
        name: &str,
        alpha: f64,
        prefix: &mut Vec<HnFactor>,
        out: &mut Vec<Vec<HnFactor>>,
    ) -> Result<(), StabilityError> {
        let me = cat.object(name).expect("validated");
        let bound = prefix.last().map(|f| f.phase);
        let below = |p: f64| bound.map_or(true, |b| p < b - PHASE_TOL);
        // stop here: the remainder is the last factor
        let own = global_phase(charge, &me.class, alpha)?;
        if below(own) && is_semistable(cat, charge, name, alpha)? {
            let mut chain = prefix.clone();
            chain.push(HnFactor { factor: name.into(), class: me.class.clone(), phase: own });
            out.push(chain);
        }
        for t in cat.triangles.iter().filter(|t| t.object == name) {
            let sub = cat.object(&t.sub).expect("validated");
            let p = global_phase(charge, &sub.class, alpha)?;
            if below(p) && is_semistable(cat, charge, &t.sub, alpha)? {
                prefix.push(HnFactor { factor: t.sub.clone(), class: sub.class.clone(), phase: p });
                go(cat, charge, &t.quotient, alpha, prefix, out)?;
                prefix.pop();
            }
        }
        Ok(())
    }
    cat.validate()?;
    if cat.object(object).is_none() {
        return Err(StabilityError::Malformed(format!("unknown object {object}")));
    }
    let mut out = Vec::new();
    go(cat, charge, object, alpha, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// All segments of a word over atoms, as a toy abelian category: the
/// segment w has subobjects its proper suffixes u, with quotient the
/// complementary prefix v (w = v·u).
pub fn uniserial_category(word: &[usize], atoms: usize) -> ToyCategory {
    let n = word.len();
    let name = |i: usize, j: usize| -> String { word[i..j].iter().map(|a| char::from(b'a' + *a as u8)).collect::<String>() + &format!("@{i}") };
    let mut objects = Vec::new();
    let mut seen = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..=n {
            let mut class = vec![0i64; atoms];
            for a in &word[i..j] {
                class[*a] += 1;
            }
            let nm = name(i, j);
            if seen.insert(nm.clone()) {
                objects.push(ToyObject { name: nm, class, phase: None });
            }
        }
    }
    let mut triangles = Vec::new();
    let mut homs = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..=n {
            for k in i + 1..j {
                triangles.push(Triangle { sub: name(k, j), object: name(i, j), quotient: name(i, k) });
                homs.insert(HomEntry { from: name(k, j), to: name(i, j) });
                homs.insert(HomEntry { from: name(i, j), to: name(i, k) });
            }
        }
    }
    ToyCategory { rank: atoms, objects, shifts: Vec::new(), homs: homs.into_iter().collect(), triangles, filtrations: Vec::new() }
}

/// Random toy category with at most six objects (a word of length ≤ 3 over
/// ≤ 3 atoms) and a charge in the open upper half-plane on every atom.
pub fn random_toy<R: Rng>(rng: &mut R) -> (ToyCategory, CentralCharge) {
    let atoms = rng.gen_range(1..=3);
    let len = rng.gen_range(1..=3);
    let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..atoms)).collect();
    let periods: Vec<C64> = (0..atoms)
        .map(|_| C64::from_polar(rng.gen_range(0.2..2.0), rng.gen_range(0.05..PI - 0.05)))
        .collect();
    (uniserial_category(&word, atoms), CentralCharge::new(&periods))
}

/// A consistent slicing in rank 2 with Z(e₁) = i and Z(e₂) = 1 + i: the
/// semistable objects A (phase 1/2), B (phase 1/4) and A[1], plus an
/// unstable C = A + B filtered by (A, B).
pub fn example_slicing() -> (ToyCategory, CentralCharge) {
    let obj = |n: &str, c: [i64; 2], p: Option<f64>| ToyObject { name: n.into(), class: c.to_vec(), phase: p };
    let cat = ToyCategory {
        rank: 2,
        objects: vec![obj("A", [1, 0], Some(0.5)), obj("B", [0, 1], Some(0.25)), obj("A[1]", [-1, 0], Some(1.5)), obj("C", [1, 1], None)],
        shifts: vec![ShiftEntry { object: "A".into(), by: 1, result: "A[1]".into() }],
        homs: vec![HomEntry { from: "B".into(), to: "A".into() }],
        triangles: vec![Triangle { sub: "A".into(), object: "C".into(), quotient: "B".into() }],
        filtrations: vec![FiltrationEntry { object: "C".into(), factors: vec!["A".into(), "B".into()] }],
    };
    (cat, CentralCharge { periods: vec![[0.0, 1.0], [1.0, 1.0]] })
}

/// The example slicing with exactly one axiom broken.
pub fn example_mutant(axiom: Axiom) -> (ToyCategory, CentralCharge) {
    let (mut cat, z) = example_slicing();
    match axiom {
        Axiom::ChargeCompatible => cat.objects[1].phase = Some(0.3),
        Axiom::ShiftCompatible => cat.objects[2].phase = Some(-0.5),
        Axiom::HomVanishing => cat.homs.push(HomEntry { from: "A".into(), to: "B".into() }),
        Axiom::Filtration => cat.filtrations[0].factors.reverse(),
    }
    (cat, z)
}
