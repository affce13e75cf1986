use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonicalize, canonicalize_any, Canon};
use crate::color::Color;
use crate::diagram::{Diagram, DiagramJson};
use crate::ihx::ihx_relation;
use crate::linalg::{cokernel_structure, IntMatrix};
use crate::lincomb::{LinComb, Q};
use crate::Error;

/// A graded piece of connected diagrams: i-deg `n`, first Betti number `l`
/// and leg colors `colors` (sorted multiset).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorSpec {
    pub n: usize,
    pub l: usize,
    pub colors: Vec<Color>,
}

impl SectorSpec {
    pub fn new(n: usize, l: usize, mut colors: Vec<Color>) -> Result<SectorSpec, Error> {
        colors.sort();
        let legs = n as i64 - 2 * l as i64 + 2;
        if legs != colors.len() as i64 {
            return Err(Error::Invalid(format!(
                "infeasible sector: i-deg {n} and loop number {l} need {legs} legs, got {}",
                colors.len()
            )));
        }
        Ok(SectorSpec { n, l, colors })
    }

    /// The sector of a connected diagram.
    pub fn of(d: &Diagram) -> SectorSpec {
        SectorSpec { n: d.i_deg(), l: d.b1(), colors: d.leg_colors() }
    }

    /// Multiplicities in decreasing order, e.g. [3, 1] for {a, a, a, b}.
    pub fn pattern(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.counts().into_iter().map(|(_, k)| k).collect();
        m.sort_by(|a, b| b.cmp(a));
        m
    }

    fn counts(&self) -> Vec<(Color, usize)> {
        let mut out: Vec<(Color, usize)> = Vec::new();
        for &c in &self.colors {
            match out.last_mut() {
                Some((d, k)) if *d == c => *k += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }

    /// Bijection from this sector's colors to standard colors 1+, 2+, …
    /// assigned by decreasing multiplicity.
    fn standardizer(&self) -> BTreeMap<Color, Color> {
        let mut cs = self.counts();
        cs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        cs.into_iter().enumerate().map(|(i, (c, _))| (c, Color::plus(i as u32 + 1))).collect()
    }

    fn standard(&self) -> SectorSpec {
        let m = self.standardizer();
        let colors = self.colors.iter().map(|c| m[c]).collect();
        SectorSpec::new(self.n, self.l, colors).unwrap()
    }

    pub fn pattern_name(&self) -> String {
        let p: Vec<String> = self.pattern().iter().map(|k| k.to_string()).collect();
        if p.is_empty() {
            "none".into()
        } else {
            p.join("-")
        }
    }
}

type Memo = Mutex<HashMap<(usize, usize, Vec<Color>), Arc<Vec<Canon>>>>;

fn memo() -> &'static Memo {
    static M: OnceLock<Memo> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

fn base_ideg(l: usize) -> usize {
    match l {
        0 => 0,
        1 => 1,
        _ => 2 * l - 2,
    }
}

/// All connected uni-trivalent graphs of the sector, self-loops included, as
/// canonical classes ignoring orientation. Built by inserting legs on edges.
fn all_graphs(n: usize, l: usize, colors: &[Color]) -> Arc<Vec<Canon>> {
    let key = (n, l, colors.to_vec());
    if let Some(x) = memo().lock().unwrap().get(&key) {
        return x.clone();
    }
    let legs = n as i64 - 2 * l as i64 + 2;
    let mut found: BTreeSet<Canon> = BTreeSet::new();
    if legs != colors.len() as i64 || n < base_ideg(l) {
        // empty
    } else if l == 0 && n == 0 {
        found.insert(canonicalize_any(&Diagram::strut(colors[0], colors[1])).0);
    } else if l == 1 && n == 1 {
        found.insert(canonicalize_any(&Diagram::one_loop(colors)).0);
    } else if l >= 2 && n == base_ideg(l) {
        let x = Color::PLACEHOLDER;
        let open = all_graphs(n, l - 1, &[x, x]);
        let closed: Vec<Canon> = open
            .par_iter()
            .filter_map(|k| {
                let d = k.diagram();
                let ls: Vec<u32> = d.legs().collect();
                let (p, q) = (d.leg_port(ls[0]), d.leg_port(ls[1]));
                if p.node == ls[1] {
                    return None;
                }
                let mut e = d.clone();
                e.connect(p, q);
                Some(canonicalize_any(&e.remove_nodes(&ls)).0)
            })
            .collect();
        found.extend(closed);
    } else {
        let mut jobs: Vec<(Canon, Color)> = Vec::new();
        let mut distinct: Vec<Color> = colors.to_vec();
        distinct.dedup();
        for &c in &distinct {
            let mut sub = colors.to_vec();
            let i = sub.iter().position(|&x| x == c).unwrap();
            sub.remove(i);
            for k in all_graphs(n - 1, l, &sub).iter() {
                jobs.push((k.clone(), c));
            }
        }
        let made: Vec<Vec<Canon>> = jobs
            .par_iter()
            .map(|(k, c)| {
                let d = k.diagram();
                d.edges()
                    .into_iter()
                    .map(|(p, _)| {
                        let mut e = d.clone();
                        e.add_leg_on_edge(p, *c);
                        canonicalize_any(&e).0
                    })
                    .collect()
            })
            .collect();
        for v in made {
            found.extend(v);
        }
    }
    let out = Arc::new(found.into_iter().collect::<Vec<_>>());
    memo().lock().unwrap().insert(key, out.clone());
    out
}

/// Isomorphism classes of connected self-loop-free diagrams in the sector,
/// sorted by canonical code.
pub fn enumerate_generators(spec: &SectorSpec) -> Vec<Canon> {
    all_graphs(spec.n, spec.l, &spec.colors)
        .iter()
        .filter(|k| !k.diagram().has_self_loop())
        .map(|k| canonicalize(k.diagram()).unwrap().0)
        .collect()
}

pub type SparseRow = Vec<(usize, BigInt)>;

#[derive(Clone, Debug)]
pub struct Presentation {
    pub spec: SectorSpec,
    pub generators: Vec<Canon>,
    pub relations: Vec<SparseRow>,
}

impl Presentation {
    pub fn matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.relations.len(), self.generators.len());
        for (i, r) in self.relations.iter().enumerate() {
            for (j, v) in r {
                m[(i, *j)] = v.clone();
            }
        }
        m
    }
}

fn normalize_row(mut r: SparseRow) -> Option<SparseRow> {
    r.retain(|(_, v)| !v.is_zero());
    r.sort_by_key(|(j, _)| *j);
    if r.is_empty() {
        return None;
    }
    if r[0].1.is_negative() {
        for (_, v) in r.iter_mut() {
            *v = -&*v;
        }
    }
    Some(r)
}

fn to_row(x: &LinComb<BigInt>, index: &HashMap<Canon, usize>) -> SparseRow {
    x.iter().map(|(k, v)| (*index.get(k).expect("relation leaves its sector"), v.clone())).collect()
}

pub fn build_presentation(spec: &SectorSpec) -> Presentation {
    let generators = enumerate_generators(spec);
    let index: HashMap<Canon, usize> = generators.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let per_gen: Vec<Vec<SparseRow>> = generators
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let d = g.diagram();
            let mut rows: Vec<SparseRow> =
                d.internal_edges().into_iter().map(|e| to_row(&ihx_relation(d, e), &index)).collect();
            if g.as_symmetric() {
                rows.push(vec![(i, BigInt::from(2))]);
            }
            rows
        })
        .collect();
    let mut seen = HashSet::new();
    let mut relations = Vec::new();
    for r in per_gen.into_iter().flatten().filter_map(normalize_row) {
        if seen.insert(r.clone()) {
            relations.push(r);
        }
    }
    Presentation { spec: spec.clone(), generators, relations }
}

/// Unit-pivot sparse elimination. Returns the eliminations (pivot column,
/// pivot row) in order and the remaining rows.
fn eliminate(ncols: usize, rows: Vec<SparseRow>) -> (Vec<(usize, SparseRow)>, Vec<SparseRow>) {
    // small entries in i64; rows that would overflow are left for the dense phase
    let mut rs: Vec<Option<Vec<(usize, i64)>>> = Vec::with_capacity(rows.len());
    let mut big: Vec<SparseRow> = Vec::new();
    for r in rows {
        let small: Option<Vec<(usize, i64)>> = r.iter().map(|(j, v)| v.to_i64().map(|x| (*j, x))).collect();
        match small {
            Some(s) => rs.push(Some(s)),
            None => big.push(r),
        }
    }
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (i, r) in rs.iter().enumerate() {
        for (j, _) in r.as_ref().unwrap() {
            col_rows[*j].insert(i);
        }
    }
    let mut elims: Vec<(usize, SparseRow)> = Vec::new();
    let mut blocked = vec![false; rs.len()];
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rs.iter().enumerate() {
            let Some(r) = r else { continue };
            if blocked[i] {
                continue;
            }
            for (j, v) in r {
                if v.abs() == 1 {
                    let cost = (r.len() - 1) * (col_rows[*j].len() - 1);
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, i, *j));
                    }
                }
            }
            if best.is_some_and(|b| b.0 == 0) {
                break;
            }
        }
        let Some((_, pi, pc)) = best else { break };
        let prow = rs[pi].take().unwrap();
        for (j, _) in &prow {
            col_rows[*j].remove(&pi);
        }
        let pv = prow.iter().find(|(j, _)| *j == pc).unwrap().1;
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for ti in targets {
            let row = rs[ti].as_ref().unwrap();
            let a = row.iter().find(|(j, _)| *j == pc).unwrap().1;
            // row -= (a / pv) * prow
            let k = a * pv;
            match axpy(row, &prow, -k) {
                Some(new) => {
                    for (j, _) in row {
                        col_rows[*j].remove(&ti);
                    }
                    for (j, _) in &new {
                        col_rows[*j].insert(ti);
                    }
                    rs[ti] = if new.is_empty() { None } else { Some(new) };
                }
                None => {
                    // overflow: promote this row to the dense phase
                    let old = rs[ti].take().unwrap();
                    for (j, _) in &old {
                        col_rows[*j].remove(&ti);
                    }
                    let mut wide: SparseRow = old.iter().map(|(j, v)| (*j, BigInt::from(*v))).collect();
                    wide = big_axpy(&wide, &prow, &BigInt::from(-k));
                    blocked[ti] = true;
                    big.push(wide);
                }
            }
        }
        // big rows must also lose the pivot column
        for b in big.iter_mut() {
            if let Some(a) = b.iter().find(|(j, _)| *j == pc).map(|x| x.1.clone()) {
                *b = big_axpy(b, &prow, &(-a * pv));
            }
        }
        elims.push((pc, prow.iter().map(|(j, v)| (*j, BigInt::from(*v))).collect()));
    }
    let mut rest: Vec<SparseRow> =
        rs.into_iter().flatten().map(|r| r.into_iter().map(|(j, v)| (j, BigInt::from(v))).collect()).collect();
    rest.extend(big);
    (elims, rest)
}

fn axpy(x: &[(usize, i64)], y: &[(usize, i64)], k: i64) -> Option<Vec<(usize, i64)>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut a, mut b) = (0, 0);
    while a < x.len() || b < y.len() {
        let ja = x.get(a).map_or(usize::MAX, |e| e.0);
        let jb = y.get(b).map_or(usize::MAX, |e| e.0);
        if ja < jb {
            out.push(x[a]);
            a += 1;
        } else if jb < ja {
            out.push((jb, y[b].1.checked_mul(k)?));
            b += 1;
        } else {
            let v = x[a].1.checked_add(y[b].1.checked_mul(k)?)?;
            if v != 0 {
                out.push((ja, v));
            }
            a += 1;
            b += 1;
        }
    }
    if out.iter().any(|(_, v)| v.abs() > (1 << 40)) {
        return None;
    }
    Some(out)
}

fn big_axpy(x: &SparseRow, y: &[(usize, i64)], k: &BigInt) -> SparseRow {
    let mut m: BTreeMap<usize, BigInt> = x.iter().cloned().collect();
    for (j, v) in y {
        *m.entry(*j).or_insert_with(BigInt::zero) += k * BigInt::from(*v);
    }
    m.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

/// Abelian-group structure of a sector with the data needed to reduce
/// arbitrary combinations.
#[derive(Clone, Debug)]
pub struct ModuleStructure {
    pub spec: SectorSpec,
    pub generators: Vec<Canon>,
    index: HashMap<Canon, usize>,
    /// Generator j is eliminated by the relation row: x ≡ x − (x_j / r_j)·r.
    elims: Vec<(usize, SparseRow)>,
    /// Generators surviving elimination; SNF coordinates refer to these.
    residual: Vec<usize>,
    /// Invariant factor per coordinate: 0 free, 1 trivial, >1 torsion.
    pub factors: Vec<BigInt>,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl ModuleStructure {
    pub fn from_presentation(p: &Presentation) -> ModuleStructure {
        let ng = p.generators.len();
        let (elims, rest) = eliminate(ng, p.relations.iter().cloned().filter_map(normalize_row).collect());
        let mut gone = vec![false; ng];
        for (c, _) in &elims {
            gone[*c] = true;
        }
        let residual: Vec<usize> = (0..ng).filter(|&j| !gone[j]).collect();
        let pos: HashMap<usize, usize> = residual.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let mut seen = HashSet::new();
        let mut dense = Vec::new();
        for r in rest.into_iter().filter_map(normalize_row) {
            if seen.insert(r.clone()) {
                let mut row = vec![BigInt::zero(); residual.len()];
                for (j, v) in r {
                    row[pos[&j]] = v;
                }
                dense.push(row);
            }
        }
        let m = IntMatrix::with_cols(residual.len(), dense);
        let ck = cokernel_structure(&m);
        ModuleStructure {
            spec: p.spec.clone(),
            index: p.generators.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect(),
            generators: p.generators.clone(),
            elims,
            residual,
            factors: ck.factors,
            v: ck.v,
            v_inv: ck.v_inv,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|f| f.is_zero()).count()
    }

    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|f| **f > BigInt::one()).cloned().collect()
    }

    pub fn residual_len(&self) -> usize {
        self.residual.len()
    }

    /// Coefficient vector over the generators.
    pub fn vector(&self, x: &LinComb<Q>) -> Result<Vec<Q>, Error> {
        let mut out = vec![Q::zero(); self.generators.len()];
        for (k, r) in x.iter() {
            let i = self.index.get(k).ok_or_else(|| {
                Error::Invalid(format!("diagram outside sector {:?}: {:?}", self.spec, k))
            })?;
            out[*i] += r;
        }
        Ok(out)
    }

    /// Coordinates in the invariant-factor basis; coordinate j is meaningful
    /// modulo `factors[j]`.
    pub fn coords_of_vector(&self, mut x: Vec<Q>) -> Vec<Q> {
        for (c, row) in &self.elims {
            if x[*c].is_zero() {
                continue;
            }
            let pv = &row.iter().find(|(j, _)| j == c).unwrap().1;
            let k = &x[*c] / Q::from_integer(pv.clone());
            for (j, v) in row {
                x[*j] -= &k * Q::from_integer(v.clone());
            }
        }
        let res: Vec<&Q> = self.residual.iter().map(|&j| &x[j]).collect();
        (0..self.residual.len())
            .map(|c| {
                let mut s = Q::zero();
                for (i, xi) in res.iter().enumerate() {
                    let vij = &self.v[(i, c)];
                    if !xi.is_zero() && !vij.is_zero() {
                        s += *xi * Q::from_integer(vij.clone());
                    }
                }
                s
            })
            .collect()
    }

    pub fn coords(&self, x: &LinComb<Q>) -> Result<Vec<Q>, Error> {
        Ok(self.coords_of_vector(self.vector(x)?))
    }

    /// Coordinates on the free summand only.
    pub fn free_coords(&self, x: &LinComb<Q>) -> Result<Vec<Q>, Error> {
        let c = self.coords(x)?;
        Ok(c.into_iter().zip(&self.factors).filter(|(_, f)| f.is_zero()).map(|(c, _)| c).collect())
    }

    /// Whether an integral combination vanishes in the module.
    pub fn is_zero(&self, x: &LinComb<Q>) -> Result<bool, Error> {
        Ok(self.vanishes(&self.coords(x)?))
    }

    /// Whether an integral combination vanishes. Unlike the rational route
    /// this keeps AS-symmetric terms, whose class is 2-torsion.
    pub fn is_zero_int(&self, x: &LinComb<BigInt>) -> Result<bool, Error> {
        let mut v = vec![Q::zero(); self.generators.len()];
        for (k, r) in x.iter() {
            let i = self.index.get(k).ok_or_else(|| {
                Error::Invalid(format!("diagram outside sector {:?}: {:?}", self.spec, k))
            })?;
            v[*i] += Q::from_integer(r.clone());
        }
        Ok(self.vanishes(&self.coords_of_vector(v)))
    }

    fn vanishes(&self, c: &[Q]) -> bool {
        c.iter().zip(&self.factors).all(|(c, f)| {
            if f.is_zero() {
                c.is_zero()
            } else {
                c.is_integer() && c.to_integer().is_multiple_of(f)
            }
        })
    }

    /// Whether x ⊗ 1 vanishes in the module ⊗ ℚ/mℤ.
    pub fn is_zero_tensor(&self, x: &LinComb<Q>, m: &Q) -> Result<bool, Error> {
        Ok(self.free_coords(x)?.iter().all(|c| (c / m).is_integer()))
    }

    /// Whether x vanishes in the module ⊗ ℚ.
    pub fn is_zero_rational(&self, x: &LinComb<Q>) -> Result<bool, Error> {
        Ok(self.free_coords(x)?.iter().all(|c| c.is_zero()))
    }

    /// Generator combination representing basis coordinate j.
    pub fn basis_element(&self, j: usize) -> LinComb<BigInt> {
        let mut out = LinComb::new();
        for (i, &g) in self.residual.iter().enumerate() {
            let v = &self.v_inv[(j, i)];
            if !v.is_zero() {
                out.add_term(self.generators[g].clone(), v);
            }
        }
        out
    }

    /// Basis elements of the nontrivial summands with their orders (0 = free).
    pub fn basis(&self) -> Vec<(BigInt, LinComb<BigInt>)> {
        (0..self.factors.len())
            .filter(|&j| !self.factors[j].is_one())
            .map(|j| (self.factors[j].clone(), self.basis_element(j)))
            .collect()
    }

    /// Transports the structure along a bijection of colors.
    fn relabel(&self, spec: SectorSpec, f: &BTreeMap<Color, Color>) -> ModuleStructure {
        let mut signs = Vec::with_capacity(self.generators.len());
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let (k, s) = canonicalize(&g.diagram().map_colors(|c| f[&c])).unwrap();
            gens.push(k);
            signs.push(BigInt::from(s));
        }
        let elims = self
            .elims
            .iter()
            .map(|(c, r)| (*c, r.iter().map(|(j, v)| (*j, v * &signs[*j])).collect()))
            .collect();
        let mut v = self.v.clone();
        let mut v_inv = self.v_inv.clone();
        for (i, &g) in self.residual.iter().enumerate() {
            for c in 0..v.cols() {
                v[(i, c)] = &v[(i, c)] * &signs[g];
            }
            for r in 0..v_inv.rows() {
                v_inv[(r, i)] = &v_inv[(r, i)] * &signs[g];
            }
        }
        ModuleStructure {
            spec,
            index: gens.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect(),
            generators: gens,
            elims,
            residual: self.residual.clone(),
            factors: self.factors.clone(),
            v,
            v_inv,
        }
    }

    fn to_file(&self) -> ModuleFile {
        ModuleFile {
            spec: self.spec.clone(),
            generators: self.generators.iter().map(|g| g.diagram().to_json()).collect(),
            elims: self.elims.iter().map(|(c, r)| (*c, r.iter().map(|(j, v)| (*j, v.to_string())).collect())).collect(),
            residual: self.residual.clone(),
            factors: self.factors.iter().map(|f| f.to_string()).collect(),
            v: self.v.clone(),
            v_inv: self.v_inv.clone(),
        }
    }

    fn from_file(f: ModuleFile) -> Result<ModuleStructure, Error> {
        let bad = |e: String| Error::Invalid(format!("corrupt cache file: {e}"));
        let mut generators = Vec::new();
        for j in &f.generators {
            let d = Diagram::from_json(j)?;
            let (k, s) = canonicalize(&d).ok_or_else(|| bad("self-loop generator".into()))?;
            if s != 1 {
                return Err(bad("generator not in canonical form".into()));
            }
            generators.push(k);
        }
        let num = |s: &String| s.parse::<BigInt>().map_err(|e| bad(e.to_string()));
        let mut elims = Vec::new();
        for (c, r) in &f.elims {
            let row: Result<SparseRow, Error> = r.iter().map(|(j, v)| Ok((*j, num(v)?))).collect();
            elims.push((*c, row?));
        }
        let factors: Result<Vec<BigInt>, Error> = f.factors.iter().map(num).collect();
        Ok(ModuleStructure {
            spec: f.spec,
            index: generators.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect(),
            generators,
            elims,
            residual: f.residual,
            factors: factors?,
            v: f.v,
            v_inv: f.v_inv,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleFile {
    spec: SectorSpec,
    generators: Vec<DiagramJson>,
    elims: Vec<(usize, Vec<(usize, String)>)>,
    residual: Vec<usize>,
    factors: Vec<String>,
    v: IntMatrix,
    v_inv: IntMatrix,
}

pub fn structure(spec: &SectorSpec) -> ModuleStructure {
    ModuleStructure::from_presentation(&build_presentation(spec))
}

/// Sector structures computed once per color pattern, optionally persisted.
pub struct ModuleCache {
    dir: Option<PathBuf>,
    mem: Mutex<HashMap<SectorSpec, Arc<ModuleStructure>>>,
}

impl ModuleCache {
    pub fn new(dir: Option<PathBuf>) -> ModuleCache {
        ModuleCache { dir, mem: Mutex::new(HashMap::new()) }
    }

    /// In-memory cache shared by the whole process.
    pub fn global() -> &'static ModuleCache {
        static C: OnceLock<ModuleCache> = OnceLock::new();
        C.get_or_init(|| ModuleCache::new(None))
    }

    fn file(dir: &Path, spec: &SectorSpec) -> PathBuf {
        dir.join(format!("sector_{}_{}_{}.json", spec.n, spec.l, spec.pattern_name()))
    }

    fn standard_module(&self, std: &SectorSpec) -> Result<Arc<ModuleStructure>, Error> {
        if let Some(m) = self.mem.lock().unwrap().get(std) {
            return Ok(m.clone());
        }
        let mut loaded = None;
        if let Some(dir) = &self.dir {
            let path = Self::file(dir, std);
            if path.exists() {
                let text = fs::read_to_string(&path)?;
                let f: ModuleFile =
                    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("corrupt cache file: {e}")))?;
                if f.spec == *std {
                    loaded = Some(ModuleStructure::from_file(f)?);
                }
            }
        }
        let m = match loaded {
            Some(m) => m,
            None => {
                let m = structure(std);
                if let Some(dir) = &self.dir {
                    fs::create_dir_all(dir)?;
                    let path = Self::file(dir, std);
                    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
                    fs::write(&tmp, serde_json::to_string(&m.to_file()).unwrap())?;
                    fs::rename(&tmp, &path)?;
                }
                m
            }
        };
        let m = Arc::new(m);
        self.mem.lock().unwrap().insert(std.clone(), m.clone());
        Ok(m)
    }

    pub fn get(&self, spec: &SectorSpec) -> Result<Arc<ModuleStructure>, Error> {
        if let Some(m) = self.mem.lock().unwrap().get(spec) {
            return Ok(m.clone());
        }
        let std = spec.standard();
        let base = self.standard_module(&std)?;
        if std == *spec {
            return Ok(base);
        }
        let back: BTreeMap<Color, Color> = spec.standardizer().into_iter().map(|(a, b)| (b, a)).collect();
        let m = Arc::new(base.relabel(spec.clone(), &back));
        self.mem.lock().unwrap().insert(spec.clone(), m.clone());
        Ok(m)
    }
}

/// Splits a combination of connected diagrams by sector.
pub fn split_by_sector<R: crate::Coeff>(x: &LinComb<R>) -> BTreeMap<SectorSpec, LinComb<R>> {
    let mut out: BTreeMap<SectorSpec, LinComb<R>> = BTreeMap::new();
    for (k, r) in x.iter() {
        out.entry(SectorSpec::of(k.diagram())).or_default().add_term(k.clone(), r);
    }
    out
}

/// Whether every sector component of x (connected diagrams only) vanishes in
/// the module ⊗ ℚ/mℤ.
pub fn is_zero_tensor_all(cache: &ModuleCache, x: &LinComb<Q>, m: &Q) -> Result<bool, Error> {
    for (spec, part) in split_by_sector(x) {
        if !part.iter().next().unwrap().0.is_connected() {
            return Err(Error::Invalid("disconnected diagram in module reduction".into()));
        }
        if !cache.get(&spec)?.is_zero_tensor(&part, m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether x vanishes in ⊗ℚ of the connected modules.
pub fn is_zero_rational_all(cache: &ModuleCache, x: &LinComb<Q>) -> Result<bool, Error> {
    for (spec, part) in split_by_sector(x) {
        if !cache.get(&spec)?.is_zero_rational(&part)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the spine (legs removed, degree-2 vertices smoothed) is a simple graph.
pub fn has_simple_spine(d: &Diagram) -> bool {
    // repeatedly strip legs; a vertex left with one edge becomes a leg
    let mut adj: Vec<Vec<u32>> = (0..d.len() as u32).map(|v| d.neighbors(v)).collect();
    let mut alive: Vec<bool> = vec![true; d.len()];
    loop {
        let mut changed = false;
        for v in 0..d.len() {
            if alive[v] && adj[v].len() <= 1 {
                alive[v] = false;
                changed = true;
                for u in std::mem::take(&mut adj[v]) {
                    if let Some(p) = adj[u as usize].iter().position(|&w| w == v as u32) {
                        adj[u as usize].remove(p);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    // smooth degree-2 vertices
    loop {
        let Some(v) = (0..d.len()).find(|&v| alive[v] && adj[v].len() == 2) else { break };
        let (a, b) = (adj[v][0], adj[v][1]);
        if a == v as u32 {
            return false;
        }
        alive[v] = false;
        adj[v].clear();
        let pa = adj[a as usize].iter().position(|&w| w == v as u32).unwrap();
        adj[a as usize][pa] = b;
        let pb = adj[b as usize].iter().position(|&w| w == v as u32).unwrap();
        adj[b as usize][pb] = a;
    }
    for v in 0..d.len() {
        if !alive[v] {
            continue;
        }
        let mut nb = adj[v].clone();
        if nb.contains(&(v as u32)) {
            return false;
        }
        nb.sort();
        if nb.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Color {
        Color::plus(1)
    }
    fn b() -> Color {
        Color::plus(2)
    }

    #[test]
    fn y_graph_sector() {
        let spec = SectorSpec::new(1, 0, vec![a(), a(), b()]).unwrap();
        let g = enumerate_generators(&spec);
        assert_eq!(g.len(), 1);
        let m = structure(&spec);
        assert_eq!((m.free_rank(), m.torsion()), (0, vec![BigInt::from(2)]));
    }

    #[test]
    fn infeasible() {
        assert!(SectorSpec::new(2, 0, vec![a()]).is_err());
    }

    #[test]
    fn one_loop_two_legs() {
        let spec = SectorSpec::new(2, 1, vec![a(), b()]).unwrap();
        let g = enumerate_generators(&spec);
        assert_eq!(g.len(), 1);
    }
}
