//! Exact embeddability checks for a triad of experiments `U`, `V`, `W`.
//!
//! A triad is Kolmogorovian if one probability measure on the eight atoms
//! of `{U,U^c} × {V,V^c} × {W,W^c}` reproduces its marginals and, through
//! Bayes' formula, its conditionals. The check runs an exact rational
//! simplex; infeasible triads come with a Farkas certificate and, when one
//! exists among single rows and pairwise differences, a contradictory pair
//! of bounds on a single atom.

mod hilbert;
mod lp;
mod rational;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use hilbert::{check_hilbert2d, hilbert_witness, HilbertVerdict, HilbertWitness};
pub use rational::{common_denominator, parse_rational, rational_from_f64, render, render_decimal, render_over, to_f64};

use crate::error::{Error, Result};
use lp::LpOutcome;

pub type Rational = num_rational::BigRational;

pub const ATOMS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    U,
    V,
    W,
}

impl Event {
    pub const ALL: [Event; 3] = [Event::U, Event::V, Event::W];

    fn bit(self) -> usize {
        match self {
            Event::U => 4,
            Event::V => 2,
            Event::W => 1,
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Event::U => "U",
            Event::V => "V",
            Event::W => "W",
        }
    }
}

/// An event or its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub event: Event,
    pub negated: bool,
}

impl Literal {
    pub const fn of(event: Event) -> Self {
        Literal { event, negated: false }
    }

    pub const fn not(event: Event) -> Self {
        Literal { event, negated: true }
    }

    /// Atom `i` lies in `U` iff bit 2 is set, in `V` iff bit 1, in `W` iff bit 0.
    pub fn contains_atom(&self, atom: usize) -> bool {
        (atom & self.event.bit() != 0) != self.negated
    }

    /// Accepts `"U"`, `"not U"`, `"U^c"`, `"U'"` and `"¬U"`, case-insensitively.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        let lower = s.to_ascii_lowercase();
        let (negated, name) = if let Some(rest) = lower.strip_prefix("not ") {
            (true, rest.trim().into())
        } else if let Some(rest) = s.strip_prefix('¬') {
            (true, rest.trim().to_ascii_lowercase())
        } else if let Some(rest) = lower.strip_suffix("^c").or_else(|| lower.strip_suffix('\'')) {
            (true, rest.trim().into())
        } else {
            (false, lower.clone())
        };
        let event = match name.as_str() {
            "u" => Event::U,
            "v" => Event::V,
            "w" => Event::W,
            _ => return Err(Error::Parse(format!("unknown event {text:?}; expected U, V or W"))),
        };
        Ok(Literal { event, negated })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.event.name(), if self.negated { "^c" } else { "" })
    }
}

/// Name of atom `i`, e.g. `"U^c∩V∩W"`.
pub fn atom_label(atom: usize) -> String {
    let parts: Vec<String> = Event::ALL
        .iter()
        .map(|&e| format!("{}", Literal { event: e, negated: atom & e.bit() == 0 }))
        .collect();
    parts.join("∩")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDatum {
    pub event: Literal,
    pub given: Literal,
    pub p: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriadData {
    marginals: [Rational; 3],
    conditionals: Vec<ConditionalDatum>,
    tolerance: Rational,
}

fn check_probability(what: &str, p: &Rational) -> Result<()> {
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::Domain(format!("{what} = {p} is not in [0,1]")));
    }
    Ok(())
}

impl TriadData {
    /// `marginals` are `ν(U)`, `ν(V)`, `ν(W)`.
    pub fn new(marginals: [Rational; 3], conditionals: Vec<ConditionalDatum>) -> Result<Self> {
        for (e, m) in Event::ALL.iter().zip(&marginals) {
            check_probability(&format!("marginal {}", e.name()), m)?;
        }
        for c in &conditionals {
            check_probability(&format!("P({}|{})", c.event, c.given), &c.p)?;
        }
        Ok(TriadData { marginals, conditionals, tolerance: Rational::zero() })
    }

    /// The three conditionals `P(V|W)`, `P(U|W)`, `P(U^c|V)`.
    pub fn standard(marginals: [Rational; 3], v_given_w: Rational, u_given_w: Rational, not_u_given_v: Rational) -> Result<Self> {
        Self::new(
            marginals,
            vec![
                ConditionalDatum { event: Literal::of(Event::V), given: Literal::of(Event::W), p: v_given_w },
                ConditionalDatum { event: Literal::of(Event::U), given: Literal::of(Event::W), p: u_given_w },
                ConditionalDatum { event: Literal::not(Event::U), given: Literal::of(Event::V), p: not_u_given_v },
            ],
        )
    }

    /// Standard triad induced by a joint distribution over the atoms.
    pub fn from_joint(joint: &[Rational; ATOMS]) -> Result<Self> {
        if joint.iter().any(|p| p.is_negative()) || joint.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::Domain("joint must be nonnegative and sum to 1".into()));
        }
        let mass = |l: &[Literal]| -> Rational {
            (0..ATOMS).filter(|&a| l.iter().all(|x| x.contains_atom(a))).map(|a| joint[a].clone()).sum()
        };
        let cond = |e: Literal, g: Literal| -> Result<Rational> {
            let mg = mass(&[g]);
            if mg.is_zero() {
                return Err(Error::Domain(format!("conditioning event {g} has zero mass")));
            }
            Ok(mass(&[e, g]) / mg)
        };
        let (u, v, w) = (Literal::of(Event::U), Literal::of(Event::V), Literal::of(Event::W));
        Self::standard(
            [mass(&[u]), mass(&[v]), mass(&[w])],
            cond(v, w)?,
            cond(u, w)?,
            cond(Literal::not(Event::U), v)?,
        )
    }

    /// Allows every constraint row to be off by at most `tolerance`.
    pub fn with_tolerance(mut self, tolerance: Rational) -> Result<Self> {
        if tolerance.is_negative() {
            return Err(Error::Domain("tolerance must be nonnegative".into()));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn marginal(&self, e: Event) -> &Rational {
        &self.marginals[e.index()]
    }

    pub fn conditionals(&self) -> &[ConditionalDatum] {
        &self.conditionals
    }

    pub fn tolerance(&self) -> &Rational {
        &self.tolerance
    }

    fn literal_mass(&self, l: Literal) -> Rational {
        let m = self.marginal(l.event).clone();
        if l.negated {
            Rational::one() - m
        } else {
            m
        }
    }
}

/// `coeffs · atoms ∈ [rhs − slack, rhs + slack]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRow {
    pub label: String,
    pub coeffs: [Rational; ATOMS],
    pub rhs: Rational,
    pub slack: Rational,
}

impl LinearRow {
    fn indicator(label: String, pred: impl Fn(usize) -> bool, rhs: Rational, slack: Rational) -> Self {
        let coeffs = core::array::from_fn(|a| if pred(a) { Rational::one() } else { Rational::zero() });
        LinearRow { label, coeffs, rhs, slack }
    }

    pub fn evaluate(&self, atoms: &[Rational; ATOMS]) -> Rational {
        self.coeffs.iter().zip(atoms).map(|(c, x)| c * x).sum()
    }

    pub fn is_satisfied_by(&self, atoms: &[Rational; ATOMS]) -> bool {
        (self.evaluate(atoms) - &self.rhs).abs() <= self.slack
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    /// Conditional rows first, then marginals, then total mass.
    pub rows: Vec<LinearRow>,
    conditional_rows: usize,
}

impl ConstraintSet {
    pub fn conditional_rows(&self) -> &[LinearRow] {
        &self.rows[..self.conditional_rows]
    }

    /// Nonnegativity plus every row.
    pub fn is_satisfied_by(&self, atoms: &[Rational; ATOMS]) -> bool {
        atoms.iter().all(|x| !x.is_negative()) && self.rows.iter().all(|r| r.is_satisfied_by(atoms))
    }

    /// Common denominator of the right-hand sides, used for display.
    pub fn display_scale(&self) -> BigInt {
        common_denominator(self.rows.iter().map(|r| &r.rhs))
    }
}

/// Bayes' formula turns `P(E|G) = p` into `ν(E∩G) = p·ν(G)`.
pub fn joint_constraints(t: &TriadData) -> ConstraintSet {
    let mut rows = Vec::new();
    for c in &t.conditionals {
        let (e, g) = (c.event, c.given);
        rows.push(LinearRow::indicator(
            format!("ν({e}∩{g})"),
            |a| e.contains_atom(a) && g.contains_atom(a),
            &c.p * t.literal_mass(g),
            t.tolerance.clone(),
        ));
    }
    let conditional_rows = rows.len();
    for e in Event::ALL {
        let l = Literal::of(e);
        rows.push(LinearRow::indicator(format!("ν({l})"), |a| l.contains_atom(a), t.marginal(e).clone(), t.tolerance.clone()));
    }
    rows.push(LinearRow::indicator("ν(Ω)".into(), |_| true, Rational::one(), Rational::zero()));
    ConstraintSet { rows, conditional_rows }
}

/// Signed combination of constraint rows, as `(coefficient, row index)`.
pub type Combination = Vec<(i32, usize)>;

#[derive(Debug, Clone, PartialEq)]
pub struct AtomBound {
    pub atom: usize,
    pub lower: Rational,
    pub upper: Rational,
    pub lower_from: Combination,
    pub upper_from: Combination,
}

impl AtomBound {
    pub fn atom_label(&self) -> String {
        atom_label(self.atom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// Contradictory bounds `lower > upper` on one atom, if found.
    pub bound: Option<AtomBound>,
    /// One multiplier per constraint row with `yᵀA ≤ 0` and `yᵀb − Σ|y|·slack > 0`.
    pub farkas: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KolmogorovVerdict {
    Feasible { witness: [Rational; ATOMS] },
    Infeasible { certificate: Certificate },
}

impl KolmogorovVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, KolmogorovVerdict::Feasible { .. })
    }
}

fn combine(set: &ConstraintSet, comb: &[(i32, usize)]) -> ([Rational; ATOMS], Rational, Rational) {
    let mut coeffs: [Rational; ATOMS] = core::array::from_fn(|_| Rational::zero());
    let mut rhs = Rational::zero();
    let mut slack = Rational::zero();
    for &(k, i) in comb {
        let k = Rational::from_integer(k.into());
        let row = &set.rows[i];
        for (c, rc) in coeffs.iter_mut().zip(&row.coeffs) {
            *c += &k * rc;
        }
        rhs += &k * &row.rhs;
        slack += k.abs() * &row.slack;
    }
    (coeffs, rhs, slack)
}

/// Bounds on `atom` implied by a combination and nonnegativity of the other atoms.
fn implied_bounds(set: &ConstraintSet, comb: &[(i32, usize)], atom: usize) -> (Option<Rational>, Option<Rational>) {
    let (coeffs, rhs, slack) = combine(set, comb);
    let ca = &coeffs[atom];
    if ca.is_zero() {
        return (None, None);
    }
    let others = || coeffs.iter().enumerate().filter(move |&(i, _)| i != atom).map(|(_, c)| c);
    let (c, lo, hi) = if ca.is_positive() {
        (ca.clone(), &rhs - &slack, &rhs + &slack)
    } else {
        (-ca, -&rhs - &slack, -&rhs + &slack)
    };
    let sign = if ca.is_positive() { Rational::one() } else { -Rational::one() };
    let lower = others().all(|o| !(o * &sign).is_positive()).then(|| lo / &c);
    let upper = others().all(|o| !(o * &sign).is_negative()).then(|| hi / &c);
    (lower, upper)
}

impl AtomBound {
    /// Recomputes both bounds from the inputs and confirms they contradict.
    pub fn verify(&self, set: &ConstraintSet) -> bool {
        let (lower, _) = implied_bounds(set, &self.lower_from, self.atom);
        let (_, upper) = implied_bounds(set, &self.upper_from, self.atom);
        lower.as_ref() == Some(&self.lower) && upper.as_ref() == Some(&self.upper) && self.lower > self.upper
    }
}

impl Certificate {
    pub fn verify(&self, set: &ConstraintSet) -> bool {
        if self.farkas.len() != set.rows.len() {
            return false;
        }
        let columns_ok = (0..ATOMS).all(|a| {
            let s: Rational = self.farkas.iter().zip(&set.rows).map(|(y, r)| y * &r.coeffs[a]).sum();
            !s.is_positive()
        });
        let gap: Rational = self.farkas.iter().zip(&set.rows).map(|(y, r)| y * &r.rhs - y.abs() * &r.slack).sum();
        columns_ok && gap.is_positive() && self.bound.as_ref().is_none_or(|b| b.verify(set))
    }
}

/// Searches single rows, then ordered pairwise differences `row_i − row_j`,
/// over the rows in `pool`, for the widest contradictory bound pair.
fn search_bounds(set: &ConstraintSet, pool: &[usize]) -> Option<AtomBound> {
    let mut combos: Vec<Combination> = pool.iter().map(|&i| vec![(1, i)]).collect();
    for &i in pool {
        for &j in pool {
            if i != j {
                combos.push(vec![(1, i), (-1, j)]);
            }
        }
    }
    struct Best {
        lower: Option<(Rational, usize)>,
        upper: Option<(Rational, usize)>,
    }
    let mut best: Vec<Best> = (0..ATOMS).map(|_| Best { lower: None, upper: None }).collect();
    for (k, comb) in combos.iter().enumerate() {
        for (atom, slot) in best.iter_mut().enumerate() {
            let (lo, hi) = implied_bounds(set, comb, atom);
            if let Some(lo) = lo {
                if slot.lower.as_ref().is_none_or(|(v, _)| lo > *v) {
                    slot.lower = Some((lo, k));
                }
            }
            if let Some(hi) = hi {
                if slot.upper.as_ref().is_none_or(|(v, _)| hi < *v) {
                    slot.upper = Some((hi, k));
                }
            }
        }
    }
    let mut chosen: Option<(Rational, usize, usize)> = None;
    for (atom, slot) in best.iter().enumerate() {
        if let (Some((lo, lk)), Some((hi, _))) = (&slot.lower, &slot.upper) {
            let gap = lo - hi;
            if !gap.is_positive() {
                continue;
            }
            let better = match &chosen {
                None => true,
                Some((g, _, k)) => gap > *g || (gap == *g && lk < k),
            };
            if better {
                chosen = Some((gap, atom, *lk));
            }
        }
    }
    let (_, atom, _) = chosen?;
    let (lower, lk) = best[atom].lower.clone()?;
    let (upper, uk) = best[atom].upper.clone()?;
    Some(AtomBound { atom, lower, upper, lower_from: combos[lk].clone(), upper_from: combos[uk].clone() })
}

/// Exact feasibility of the eight-atom problem.
///
/// Feasible verdicts carry the witness that maximizes the smallest atom, so
/// symmetric inputs get symmetric witnesses.
pub fn check_kolmogorov(t: &TriadData) -> KolmogorovVerdict {
    let set = joint_constraints(t);
    let m = set.rows.len();
    // Columns: y_0..y_7 (atom minus floor), floor, then per slack row p, q, s, s'.
    let slack_rows: Vec<usize> = (0..m).filter(|&i| set.rows[i].slack.is_positive()).collect();
    let n = ATOMS + 1 + 4 * slack_rows.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, row) in set.rows.iter().enumerate() {
        let mut r = vec![Rational::zero(); n];
        r[..ATOMS].clone_from_slice(&row.coeffs);
        r[ATOMS] = row.coeffs.iter().sum();
        if let Some(k) = slack_rows.iter().position(|&s| s == i) {
            r[ATOMS + 1 + 4 * k] = Rational::one();
            r[ATOMS + 2 + 4 * k] = -Rational::one();
        }
        a.push(r);
        b.push(row.rhs.clone());
    }
    for (k, &i) in slack_rows.iter().enumerate() {
        for off in 0..2 {
            let mut r = vec![Rational::zero(); n];
            r[ATOMS + 1 + 4 * k + off] = Rational::one();
            r[ATOMS + 3 + 4 * k + off] = Rational::one();
            a.push(r);
            b.push(set.rows[i].slack.clone());
        }
    }
    let mut c = vec![Rational::zero(); n];
    c[ATOMS] = Rational::one();
    match lp::maximize(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => {
            let witness = core::array::from_fn(|i| &x[i] + &x[ATOMS]);
            KolmogorovVerdict::Feasible { witness }
        }
        LpOutcome::Infeasible { farkas } => {
            let farkas = farkas[..m].to_vec();
            let conditional: Vec<usize> = (0..set.conditional_rows).collect();
            let all: Vec<usize> = (0..m).collect();
            let bound = search_bounds(&set, &conditional).or_else(|| search_bounds(&set, &all));
            KolmogorovVerdict::Infeasible { certificate: Certificate { bound, farkas } }
        }
        LpOutcome::Unbounded => unreachable!("total-mass row bounds every column"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Kolmogorovian,
    Hilbertian2d,
    Both,
    Neither,
}

impl Class {
    pub fn as_str(self) -> &'static str {
        match self {
            Class::Kolmogorovian => "kolmogorovian",
            Class::Hilbertian2d => "hilbertian-2d",
            Class::Both => "both",
            Class::Neither => "neither",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: Class,
    pub kolmogorov: KolmogorovVerdict,
    pub hilbert: HilbertVerdict,
}

pub fn classify(t: &TriadData, gamma2: &Rational) -> Result<Classification> {
    let kolmogorov = check_kolmogorov(t);
    let hilbert = check_hilbert2d(gamma2)?;
    let class = match (kolmogorov.is_feasible(), hilbert.feasible) {
        (true, true) => Class::Both,
        (true, false) => Class::Kolmogorovian,
        (false, true) => Class::Hilbertian2d,
        (false, false) => Class::Neither,
    };
    Ok(Classification { class, kolmogorov, hilbert })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn flagship_triad() -> TriadData {
        let p = |s| parse_rational(s).unwrap();
        TriadData::standard([p("0.5"), p("0.5"), p("0.5")], p("0.78"), p("0.22"), p("0.22")).unwrap()
    }

    #[test]
    fn atom_labels() {
        assert_eq!(atom_label(7), "U∩V∩W");
        assert_eq!(atom_label(3), "U^c∩V∩W");
        assert_eq!(atom_label(0), "U^c∩V^c∩W^c");
    }

    #[test]
    fn literal_parsing() {
        assert_eq!(Literal::parse("not U").unwrap(), Literal::not(Event::U));
        assert_eq!(Literal::parse("v^c").unwrap(), Literal::not(Event::V));
        assert_eq!(Literal::parse("¬W").unwrap(), Literal::not(Event::W));
        assert_eq!(Literal::parse(" w ").unwrap(), Literal::of(Event::W));
        assert!(Literal::parse("X").is_err());
    }

    #[test]
    fn flagship_rows() {
        let set = joint_constraints(&flagship_triad());
        let rhs: Vec<_> = set.conditional_rows().iter().map(|r| r.rhs.clone()).collect();
        assert_eq!(rhs, vec![q(39, 100), q(11, 100), q(11, 100)]);
        assert_eq!(set.rows.len(), 7);
    }

    #[test]
    fn flagship_certificate() {
        let t = flagship_triad();
        let set = joint_constraints(&t);
        let KolmogorovVerdict::Infeasible { certificate } = check_kolmogorov(&t) else { panic!("feasible") };
        assert!(certificate.verify(&set));
        let b = certificate.bound.unwrap();
        assert_eq!(b.atom_label(), "U^c∩V∩W");
        let scale = set.display_scale();
        assert_eq!(render_over(&b.lower, &scale), "28/100");
        assert_eq!(render_over(&b.upper, &scale), "11/100");
        assert_eq!(b.lower_from, vec![(1, 0), (-1, 1)]);
    }

    #[test]
    fn independence_is_uniform() {
        let h = q(1, 2);
        let t = TriadData::standard([h.clone(), h.clone(), h.clone()], h.clone(), h.clone(), h).unwrap();
        let KolmogorovVerdict::Feasible { witness } = check_kolmogorov(&t) else { panic!() };
        assert!(witness.iter().all(|w| *w == q(1, 8)));
    }

    #[test]
    fn joint_round_trip() {
        let joint = [q(1, 5), q(1, 20), q(3, 20), q(1, 5), q(1, 10), q(1, 10), q(1, 10), q(1, 10)];
        let t = TriadData::from_joint(&joint).unwrap();
        let set = joint_constraints(&t);
        assert!(set.is_satisfied_by(&joint));
        let KolmogorovVerdict::Feasible { witness } = check_kolmogorov(&t) else { panic!() };
        assert!(set.is_satisfied_by(&witness));
    }

    #[test]
    fn tolerance_rescues_near_misses() {
        let p = |s| parse_rational(s).unwrap();
        // ν(U^c∩V∩W) ≥ 0.39 − 0.11 but ≤ 0.28 − 1e-9: infeasible by a hair.
        let t = TriadData::standard([p("0.5"), p("0.5"), p("0.5")], p("0.78"), p("0.22"), p("0.559999998")).unwrap();
        assert!(!check_kolmogorov(&t).is_feasible());
        let t = t.with_tolerance(p("1e-8")).unwrap();
        assert!(check_kolmogorov(&t).is_feasible());
    }

    #[test]
    fn classification() {
        let c = classify(&flagship_triad(), &q(78, 100)).unwrap();
        assert_eq!(c.class, Class::Neither);
        let h = q(1, 2);
        let t = TriadData::standard([h.clone(), h.clone(), h.clone()], h.clone(), h.clone(), h.clone()).unwrap();
        assert_eq!(classify(&t, &h).unwrap().class, Class::Both);
    }

    #[test]
    fn rejects_bad_probabilities() {
        let h = q(1, 2);
        assert!(TriadData::standard([h.clone(), h.clone(), q(3, 2)], h.clone(), h.clone(), h).is_err());
    }
}
