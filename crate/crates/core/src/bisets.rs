//! (D,D)-biset shapes of invariant bases.

use std::collections::HashSet;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Vector;
use crate::error::{Error, Result};
use crate::fusion::FusionSystem;
use crate::groups::{Injection, PermGroup, TwistedClasses, TwistedDiagonal};
use crate::linalg::Subspace;
use crate::salgebra::InteriorAlgebra;

const BASIS_RESTARTS: usize = 40;
const VECTOR_TRIES: usize = 200;

/// Multiplicities of transitive bisets (D×D)/Δ(φ,P), indexed by twisted-diagonal class.
#[derive(Clone, Debug)]
pub struct BisetShape {
    pub classes: Arc<TwistedClasses>,
    pub mult: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ShapeEntry {
    pub orbit: String,
    pub multiplicity: u64,
}

impl PartialEq for BisetShape {
    fn eq(&self, other: &Self) -> bool {
        self.classes.d == other.classes.d && self.mult == other.mult
    }
}

impl BisetShape {
    pub fn d_order(&self) -> u64 {
        self.classes.d.order() as u64
    }

    /// |Ω| = Σ m_R·[D×D : R].
    pub fn total_size(&self) -> u64 {
        let dd = self.d_order() * self.d_order();
        self.mult.iter().enumerate().map(|(c, &m)| m * dd / self.classes.order_of_class(c) as u64).sum()
    }

    /// |Ω^T| through the table of marks.
    pub fn fixed_count_class(&self, t: usize) -> u64 {
        self.mult.iter().enumerate().map(|(r, &m)| m * self.classes.marks[t][r]).sum()
    }

    pub fn fixed_count(&self, t: &TwistedDiagonal) -> u64 {
        self.fixed_count_class(self.classes.class_of(t))
    }

    pub fn multiplicity_of(&self, t: &TwistedDiagonal) -> u64 {
        self.mult[self.classes.class_of(t)]
    }

    pub fn entries(&self, g: &PermGroup) -> Vec<ShapeEntry> {
        self.mult
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(c, &m)| ShapeEntry { orbit: self.classes.descriptor(g, c), multiplicity: m })
            .collect()
    }

    /// Inverse of [`BisetShape::entries`].
    pub fn from_entries(g: &PermGroup, classes: Arc<TwistedClasses>, entries: &[ShapeEntry]) -> Result<Self> {
        let names: Vec<String> = (0..classes.len()).map(|c| classes.descriptor(g, c)).collect();
        let mut mult = vec![0u64; classes.len()];
        for e in entries {
            let c = names.iter().position(|n| *n == e.orbit).ok_or_else(|| Error::BadShape(format!("unknown orbit {:?}", e.orbit)))?;
            if mult[c] != 0 || e.multiplicity == 0 {
                return Err(Error::BadShape(format!("orbit {:?} repeated or with multiplicity 0", e.orbit)));
            }
            mult[c] = e.multiplicity;
        }
        Ok(BisetShape { classes, mult })
    }

    /// Parse the JSON list form used in reports.
    pub fn from_json(g: &PermGroup, classes: Arc<TwistedClasses>, text: &str) -> Result<Self> {
        let entries: Vec<ShapeEntry> = serde_json::from_str(text).map_err(|e| Error::Input(format!("shape document: {e}")))?;
        Self::from_entries(g, classes, &entries)
    }

    /// Shape with the given Brauer-quotient dimensions, by back-substitution.
    pub fn from_fixed_counts(classes: Arc<TwistedClasses>, dims: &[u64]) -> Result<Self> {
        let n = classes.len();
        let mut mult = vec![0u64; n];
        for t in 0..n {
            let mut rest = dims[t] as i128;
            for r in 0..t {
                rest -= classes.marks[t][r] as i128 * mult[r] as i128;
            }
            let diag = classes.marks[t][t] as i128;
            if rest < 0 || rest % diag != 0 {
                return Err(Error::BadShape(format!("class {t} would need multiplicity {rest}/{diag}")));
            }
            mult[t] = (rest / diag) as u64;
        }
        Ok(BisetShape { classes, mult })
    }
}

/// Shape of an invariant basis of A, read off the Brauer quotients.
pub fn shape_from_brauer_dims(a: &InteriorAlgebra, classes: Arc<TwistedClasses>) -> Result<BisetShape> {
    a.check_bifree()?;
    let dims: Vec<u64> = classes.reps.iter().map(|t| a.brauer_dim(t) as u64).collect();
    BisetShape::from_fixed_counts(classes, &dims)
}

pub fn opposite_shape(s: &BisetShape) -> BisetShape {
    let mut mult = vec![0u64; s.mult.len()];
    for (c, &m) in s.mult.iter().enumerate() {
        mult[s.classes.opposite_class(c)] += m;
    }
    BisetShape { classes: s.classes.clone(), mult }
}

/// One (D×D)-orbit of an invariant basis.
#[derive(Clone, Debug)]
pub struct BasisOrbit {
    pub class: usize,
    pub stabilizer: TwistedDiagonal,
    /// Indices into `InvariantBasis::vectors`; the first is the representative.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub vectors: Vec<Vector>,
    pub orbits: Vec<BasisOrbit>,
}

impl InvariantBasis {
    /// |^φY^P| counted element by element.
    pub fn fixed_count(&self, a: &InteriorAlgebra, t: &TwistedDiagonal) -> usize {
        let gens = a.group.generating_set(&t.domain_group());
        self.vectors.iter().filter(|y| gens.iter().all(|&p| a.biact(t.apply(p).unwrap(), p, y) == **y)).count()
    }

    pub fn shape(&self, classes: Arc<TwistedClasses>) -> BisetShape {
        let mut mult = vec![0u64; classes.len()];
        for o in &self.orbits {
            mult[o.class] += 1;
        }
        BisetShape { classes, mult }
    }

    /// Checks that the vectors form a basis permuted by the biaction.
    pub fn verify(&self, a: &InteriorAlgebra) -> Result<()> {
        let f = &a.alg.field;
        if self.vectors.len() != a.dim() || Subspace::from_vectors(f, a.dim(), &self.vectors).dim() != a.dim() {
            return Err(Error::Internal("invariant basis is not a basis".into()));
        }
        let set: HashSet<&Vector> = self.vectors.iter().collect();
        for &x in &a.group.generating_set(&a.d) {
            for y in &self.vectors {
                if !set.contains(&a.biact(x, 0, y)) || !set.contains(&a.biact(0, x, y)) {
                    return Err(Error::Internal("basis is not stable under the biaction".into()));
                }
            }
        }
        Ok(())
    }
}

/// All images of v under D×D, or None if the stabilizer is larger than `expected`.
pub fn biact_orbit(a: &InteriorAlgebra, v: &[crate::field::Fe], expected: usize) -> Option<Vec<Vector>> {
    let mut seen: HashSet<Vector> = HashSet::new();
    let mut out = vec![];
    for &x in &a.d.elems {
        for &y in &a.d.elems {
            let w = a.biact(x, y, v);
            if seen.insert(w.clone()) {
                out.push(w);
                if out.len() > expected {
                    return None;
                }
            }
        }
    }
    (out.len() == expected).then_some(out)
}

fn fixed_by(a: &InteriorAlgebra, t: &TwistedDiagonal, gens: &[usize], y: &[crate::field::Fe]) -> bool {
    gens.iter().all(|&p| a.biact(t.apply(p).unwrap(), p, y) == y)
}

/// Greedy top-down construction of a basis with the given shape.
pub fn explicit_invariant_basis(a: &InteriorAlgebra, shape: &BisetShape, rng: &mut ChaCha8Rng) -> Result<InvariantBasis> {
    let f = &a.alg.field;
    let classes = &shape.classes;
    let dd = a.d.order() * a.d.order();
    for _ in 0..BASIS_RESTARTS {
        let mut basis = InvariantBasis { vectors: vec![], orbits: vec![] };
        let mut stuck = false;
        'classes: for (c, &m) in shape.mult.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let t = &classes.reps[c];
            let gens = a.group.generating_set(&t.domain_group());
            let fixed = a.fixed_subspace(t);
            let bq = a.brauer_quotient(t);
            let orbit_len = dd / t.domain.len();
            for _ in 0..m {
                let consumed: Vec<Vector> =
                    basis.vectors.iter().filter(|y| fixed_by(a, t, &gens, y)).map(|y| bq.project(&a.alg, y).expect("fixed")).collect();
                let consumed = Subspace::from_vectors(f, bq.dim(), &consumed);
                let mut placed = false;
                for _ in 0..VECTOR_TRIES {
                    let v = a.alg.random_in(&fixed, rng);
                    let im = bq.project(&a.alg, &v).expect("fixed");
                    if consumed.contains(f, &im) {
                        continue;
                    }
                    let Some(orbit) = biact_orbit(a, &v, orbit_len) else { continue };
                    let mut trial = basis.vectors.clone();
                    trial.extend(orbit.iter().cloned());
                    if Subspace::from_vectors(f, a.dim(), &trial).dim() != trial.len() {
                        continue;
                    }
                    let start = basis.vectors.len();
                    basis.vectors = trial;
                    basis.orbits.push(BasisOrbit { class: c, stabilizer: t.clone(), members: (start..start + orbit_len).collect() });
                    placed = true;
                    break;
                }
                if !placed {
                    stuck = true;
                    break 'classes;
                }
            }
        }
        if !stuck && basis.vectors.len() == a.dim() {
            basis.verify(a)?;
            return Ok(basis);
        }
    }
    Err(Error::Exhausted("explicit invariant basis: restart budget used up".into()))
}

/// Verdicts on the five defining conditions of an F-characteristic biset.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CharacteristicReport {
    pub bifree: bool,
    pub symmetric: bool,
    pub generated: bool,
    pub stable: bool,
    pub sylow: bool,
    pub witnesses: Vec<String>,
}

impl CharacteristicReport {
    pub fn all(&self) -> bool {
        self.bifree && self.symmetric && self.generated && self.stable && self.sylow
    }
}

pub fn characteristic_report(g: &PermGroup, s: &BisetShape, fus: &FusionSystem) -> Result<CharacteristicReport> {
    if fus.s != s.classes.d {
        return Err(Error::Input("fusion system lives on a different group".into()));
    }
    let mut witnesses = vec![];
    let symmetric = *s == opposite_shape(s);
    if !symmetric {
        witnesses.push("shape differs from its opposite".to_string());
    }
    let mut generated = true;
    for (c, &m) in s.mult.iter().enumerate() {
        if m > 0 && !fus.contains(&s.classes.reps[c]) {
            generated = false;
            witnesses.push(format!("orbit {} is not a fusion morphism", s.classes.descriptor(g, c)));
        }
    }
    let mut stable = true;
    for phi in fus.maps() {
        let here = s.fixed_count(phi);
        let dp = s.fixed_count(&Injection::identity(&phi.domain_group()));
        let dq = s.fixed_count(&Injection::identity(&phi.image_group()));
        if here != dp || here != dq {
            stable = false;
            witnesses.push(format!("fixed counts {here}/{dp}/{dq} differ for {}", s.classes.descriptor(g, s.classes.class_of(phi))));
        }
    }
    let index = s.total_size() / s.d_order();
    let p = fus.prime();
    let sylow = !index.is_multiple_of(p);
    if !sylow {
        witnesses.push(format!("|Omega|/|D| = {index} is divisible by {p}"));
    }
    Ok(CharacteristicReport { bifree: true, symmetric, generated, stable, sylow, witnesses })
}
