//! Relation quotients.
//!
//! A block is the span of legged diagrams of one degree on one skeleton with fixed leg counts
//! on the star-like components. Relations never change those counts (link relations are fed
//! from the block with one more leg), so each block is reduced on its own. Vacuum components
//! factor off: a diagram's coordinates are the tensor product of the coordinates of its
//! legged part and of its vacuum part.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_bigint::{BigInt, Sign as BigSign};
use num_traits::One;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::coeff::{Coeff, Q};
use crate::diagram::relations::block_relations;
use crate::diagram::{canonicalize, enumerate_classes, star_count_vectors, vacuum_classes, Diagram, Sign, Signature};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};

pub const FORMAT_VERSION: u32 = 1;
/// Bumped whenever enumeration order or relation generation changes.
pub const RELGEN_VERSION: &str = "classes-vertices-first/ihx-jacobi/stu-stem/link-inner-edge-leg-zero-params/2";
pub const HARD_CAP: usize = 6;
pub const DEFAULT_CUTOFF: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockKey {
    pub sig: Arc<Signature>,
    pub degree: usize,
    /// leg count per component; zero for intervals and circles
    pub counts: Vec<usize>,
}

impl BlockKey {
    pub fn vacuum(degree: usize) -> Self {
        BlockKey { sig: Arc::new(Signature::empty()), degree, counts: Vec::new() }
    }

    fn is_vacuum(&self) -> bool {
        self.sig.is_empty() && self.degree > 0
    }

    pub fn describe(&self) -> String {
        format!("{} degree {} legs {:?}", self.sig, self.degree, self.counts)
    }

    fn cache_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{}|{}|{:?}|{}|{}", self.sig, self.degree, self.counts, FORMAT_VERSION, RELGEN_VERSION));
        hex::encode(&h.finalize()[..16])
    }
}

#[derive(Debug)]
pub struct BlockQuotient {
    pub key: BlockKey,
    columns: Vec<Diagram>,
    index: HashMap<Diagram, usize>,
    echelon: Echelon,
    basis: Vec<usize>,
    pub relations: usize,
}

impl BlockQuotient {
    pub fn build(key: BlockKey) -> Result<Self> {
        let (classes, relations) = if key.is_vacuum() {
            let classes = vacuum_classes(key.degree);
            let mut rels = Vec::new();
            for c in &classes {
                crate::diagram::relations::local_relations(&c.diagram, &mut rels);
            }
            (classes, rels)
        } else {
            let classes = enumerate_classes(&key.sig, key.degree, &key.counts);
            let rels = block_relations(&key.sig, key.degree, &key.counts, &classes);
            (classes, rels)
        };
        let columns: Vec<Diagram> = classes.into_iter().filter(|c| !c.zero).map(|c| c.diagram).collect();
        let index: HashMap<Diagram, usize> = columns.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
        let mut echelon = Echelon::new(columns.len());
        let n_rel = relations.len();
        for r in relations {
            let mut row: Vec<(usize, BigInt)> = Vec::with_capacity(r.element.len());
            for (d, c) in r.element.terms() {
                let i = *index.get(d).ok_or_else(|| {
                    Error::Consistency(format!("{} relation term outside the enumerated block {}", r.kind.name(), key.describe()))
                })?;
                if !c.denom().is_one() {
                    return Err(Error::Consistency("relation with fractional coefficient".into()));
                }
                row.push((i, c.numer().clone()));
            }
            row.sort_by_key(|e| e.0);
            echelon.insert(row);
        }
        let basis = echelon.free_columns();
        log::debug!("built block {}: {} columns, rank {}", key.describe(), columns.len(), echelon.rank());
        Ok(BlockQuotient { key, columns, index, echelon, basis, relations: n_rel })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    pub fn basis(&self) -> impl Iterator<Item = &Diagram> {
        self.basis.iter().map(|&i| &self.columns[i])
    }

    pub fn column(&self, i: usize) -> &Diagram {
        &self.columns[i]
    }

    /// Reduces canonical diagrams (sign +1) of this block; keys of the result are column
    /// indices of basis diagrams.
    pub fn reduce<'a>(&self, terms: impl IntoIterator<Item = (&'a Diagram, Q)>) -> Result<BTreeMap<usize, Q>> {
        let mut v = Vec::new();
        for (d, x) in terms {
            let i = *self.index.get(d).ok_or_else(|| {
                Error::Consistency(format!("diagram missing from block {}: {}", self.key.describe(), d.to_json_string()))
            })?;
            v.push((i, x));
        }
        Ok(self.echelon.reduce(v))
    }

    fn save(&self, dir: &std::path::Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.wkq", self.key.cache_hash()));
        let tmp = dir.join(format!("{}.wkq.tmp{}", self.key.cache_hash(), std::process::id()));
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        let header = json!({
            "format": FORMAT_VERSION,
            "relgen": RELGEN_VERSION,
            "sig": self.key.sig.to_string(),
            "degree": self.key.degree,
            "counts": self.key.counts,
            "columns": self.columns.len(),
            "rank": self.echelon.rank(),
            "relations": self.relations,
        });
        writeln!(f, "{header}")?;
        let cols: Vec<Value> = self.columns.iter().map(Diagram::to_json).collect();
        writeln!(f, "{}", Value::Array(cols))?;
        for (_, row) in self.echelon.rows() {
            f.write_u32::<LittleEndian>(row.len() as u32)?;
            for (c, x) in row {
                let (sign, bytes) = x.to_bytes_le();
                f.write_u32::<LittleEndian>(*c as u32)?;
                f.write_u8(if sign == BigSign::Minus { 1 } else { 0 })?;
                f.write_u32::<LittleEndian>(bytes.len() as u32)?;
                f.write_all(&bytes)?;
            }
        }
        f.flush()?;
        drop(f);
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    fn load(key: &BlockKey, dir: &std::path::Path) -> Result<Option<Self>> {
        let path = dir.join(format!("{}.wkq", key.cache_hash()));
        if !path.exists() {
            return Ok(None);
        }
        let mut r = BufReader::new(fs::File::open(&path)?);
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: Value = serde_json::from_str(&line)?;
        let cache_err = |m: &str| Error::Cache(format!("{}: {m}", path.display()));
        if header["format"] != json!(FORMAT_VERSION)
            || header["relgen"] != json!(RELGEN_VERSION)
            || header["sig"] != json!(key.sig.to_string())
            || header["degree"] != json!(key.degree)
            || header["counts"] != json!(key.counts)
        {
            return Err(cache_err("header does not match the requested block"));
        }
        line.clear();
        r.read_line(&mut line)?;
        let cols: Value = serde_json::from_str(&line)?;
        let mut columns = Vec::new();
        for c in cols.as_array().ok_or_else(|| cache_err("bad column list"))? {
            let d = Diagram::from_json(c)?.embed(&key.sig)?;
            columns.push(d);
        }
        let rank = header["rank"].as_u64().ok_or_else(|| cache_err("bad rank"))? as usize;
        let mut rows = Vec::with_capacity(rank);
        for _ in 0..rank {
            let n = r.read_u32::<LittleEndian>()? as usize;
            let mut row: SparseRow = Vec::with_capacity(n);
            for _ in 0..n {
                let c = r.read_u32::<LittleEndian>()? as usize;
                let neg = r.read_u8()? == 1;
                let len = r.read_u32::<LittleEndian>()? as usize;
                let mut bytes = vec![0u8; len];
                r.read_exact(&mut bytes)?;
                let sign = if neg { BigSign::Minus } else { BigSign::Plus };
                row.push((c, BigInt::from_bytes_le(sign, &bytes)));
            }
            rows.push(row);
        }
        let index: HashMap<Diagram, usize> = columns.iter().enumerate().map(|(i, d)| (d.clone(), i)).collect();
        if index.len() != columns.len() {
            return Err(cache_err("duplicate columns"));
        }
        let echelon = Echelon::from_rows(columns.len(), rows);
        let basis = echelon.free_columns();
        let relations = header["relations"].as_u64().unwrap_or(0) as usize;
        Ok(Some(BlockQuotient { key: key.clone(), columns, index, echelon, basis, relations }))
    }
}

/// A coordinate: the vacuum basis diagram (with its free loops) and the legged basis diagram.
pub type CoordKey = (usize, Diagram, Diagram);

/// Coordinates of an element, keyed by (degree, vacuum basis diagram, legged basis diagram).
pub type Coordinates<C> = BTreeMap<CoordKey, C>;

#[derive(Clone, Debug)]
pub struct EqualityCheck<C: Coeff> {
    pub equal: bool,
    pub failing_degree: Option<usize>,
    pub witness: Vec<(Diagram, C)>,
}

impl<C: Coeff> EqualityCheck<C> {
    pub fn witness_json(&self) -> Value {
        Value::Array(
            self.witness
                .iter()
                .map(|(d, c)| json!({"diagram": d.to_json(), "coeff": c.to_json()}))
                .collect(),
        )
    }
}

/// Lazily builds and caches block quotients and reduces elements to coordinates.
pub struct Reducer {
    cutoff: usize,
    cache_dir: Option<PathBuf>,
    blocks: Mutex<HashMap<BlockKey, Arc<BlockQuotient>>>,
    loaded: Mutex<Vec<String>>,
    cache_hits: AtomicUsize,
}

impl Reducer {
    pub fn new(cutoff: usize, cache_dir: Option<PathBuf>) -> Result<Self> {
        if cutoff > HARD_CAP {
            return Err(Error::DegreeCutoff { requested: cutoff, cutoff: HARD_CAP });
        }
        Ok(Reducer {
            cutoff,
            cache_dir,
            blocks: Mutex::new(HashMap::new()),
            loaded: Mutex::new(Vec::new()),
            cache_hits: AtomicUsize::new(0),
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Blocks that were used, with their sizes, sorted.
    pub fn block_log(&self) -> Vec<String> {
        let mut v = self.loaded.lock().expect("lock").clone();
        v.sort();
        v
    }

    /// Number of blocks read from the disk cache.
    pub fn cache_hits(&self) -> usize {
        self.cache_hits.load(Ordering::Relaxed)
    }

    pub fn block(&self, key: &BlockKey) -> Result<Arc<BlockQuotient>> {
        if key.degree > self.cutoff {
            return Err(Error::DegreeCutoff { requested: key.degree, cutoff: self.cutoff });
        }
        if let Some(b) = self.blocks.lock().expect("lock").get(key) {
            return Ok(b.clone());
        }
        let mut source = "built";
        let mut block = None;
        if let Some(dir) = &self.cache_dir {
            match BlockQuotient::load(key, dir) {
                Ok(Some(b)) => {
                    block = Some(b);
                    source = "cache";
                    self.cache_hits.fetch_add(1, Ordering::Relaxed);
                }
                Ok(None) => {}
                Err(e) => log::warn!("ignoring cache entry for {}: {e}", key.describe()),
            }
        }
        let block = match block {
            Some(b) => b,
            None => {
                let b = BlockQuotient::build(key.clone())?;
                if let Some(dir) = &self.cache_dir {
                    if let Err(e) = b.save(dir) {
                        log::warn!("could not write cache entry for {}: {e}", key.describe());
                    }
                }
                b
            }
        };
        let block = Arc::new(block);
        let mut map = self.blocks.lock().expect("lock");
        let entry = map.entry(key.clone()).or_insert_with(|| block.clone()).clone();
        log::debug!("block {} from {source}", key.describe());
        self.loaded.lock().expect("lock").push(format!(
            "{} dim {} ({} columns, {} relations)",
            key.describe(),
            entry.dim(),
            entry.num_columns(),
            entry.relations
        ));
        Ok(entry)
    }

    pub(crate) fn legged_key(d: &Diagram) -> BlockKey {
        let counts = d
            .sig()
            .comps()
            .iter()
            .enumerate()
            .map(|(i, c)| if c.kind.is_star() { d.attach(i).len() } else { 0 })
            .collect();
        BlockKey { sig: d.sig().clone(), degree: d.degree(), counts }
    }

    /// Coordinates of a single canonical diagram.
    pub fn diagram_coordinates(&self, d: &Diagram) -> Result<Vec<(CoordKey, Q)>> {
        let (legged, vacuum) = d.split_vacuum();
        let cl = canonicalize(&legged);
        let loops = vacuum.loops();
        let cv = canonicalize(&vacuum.with_loops(0));
        let sign = cl.sign.mul(cv.sign);
        if sign == Sign::Zero {
            return Ok(Vec::new());
        }
        let s = Q::from_integer(BigInt::from(sign.to_i64()));
        let lb = self.block(&Self::legged_key(&cl.diagram))?;
        let lc = lb.reduce([(&cl.diagram, Q::from_integer(BigInt::from(1)))])?;
        let vdeg = cv.diagram.degree();
        let vc: Vec<(Diagram, Q)> = if vdeg == 0 {
            vec![(cv.diagram.with_loops(loops), Q::from_integer(BigInt::from(1)))]
        } else {
            let vb = self.block(&BlockKey::vacuum(vdeg))?;
            vb.reduce([(&cv.diagram, Q::from_integer(BigInt::from(1)))])?
                .into_iter()
                .map(|(i, x)| (vb.column(i).with_loops(loops), x))
                .collect()
        };
        let mut out = Vec::new();
        for (i, x) in &lc {
            for (v, y) in &vc {
                out.push(((d.degree(), v.clone(), lb.column(*i).clone()), &s * x * y));
            }
        }
        Ok(out)
    }

    pub fn coordinates<C: Coeff>(&self, e: &Element<C>) -> Result<Coordinates<C>> {
        let mut out: Coordinates<C> = BTreeMap::new();
        for (d, c) in e.terms() {
            for (k, x) in self.diagram_coordinates(d)? {
                let add = c.scale(&x);
                let slot = out.entry(k.clone()).or_insert_with(C::zero);
                let sum = slot.clone() + add;
                if sum.is_zero() {
                    out.remove(&k);
                } else {
                    *slot = sum;
                }
            }
        }
        Ok(out)
    }

    /// The element spanned by basis diagrams with the given coordinates.
    pub fn from_coordinates<C: Coeff>(sig: &Arc<Signature>, coords: &Coordinates<C>) -> Result<Element<C>> {
        let mut e = Element::zero(sig.clone());
        for ((_, v, l), c) in coords {
            e.add_diagram(&l.union(&v.embed(&Arc::new(Signature::empty()))?)?.embed(sig)?, c.clone());
        }
        Ok(e)
    }

    /// Coordinates of `a - b` through `max_degree`, grouped by degree; each entry is the
    /// nonzero difference in that degree as a list of basis terms.
    pub fn differences<C: Coeff>(
        &self,
        a: &Element<C>,
        b: &Element<C>,
        max_degree: usize,
    ) -> Result<BTreeMap<usize, Vec<(Diagram, C)>>> {
        if a.sig() != b.sig() {
            return Err(Error::Signature(format!("comparing elements on {} and {}", a.sig(), b.sig())));
        }
        let diff = (a - b).filter(|d| d.degree() <= max_degree);
        let mut out: BTreeMap<usize, Vec<(Diagram, C)>> = BTreeMap::new();
        for ((deg, v, l), c) in self.coordinates(&diff)? {
            let joined = l.union(&v)?;
            out.entry(deg).or_default().push((canonicalize(&joined).diagram, c));
        }
        Ok(out)
    }

    /// Checks `a == b` modulo relations in every degree up to `max_degree`.
    pub fn equal_mod_relations<C: Coeff>(&self, a: &Element<C>, b: &Element<C>, max_degree: usize) -> Result<EqualityCheck<C>> {
        let diffs = self.differences(a, b, max_degree)?;
        match diffs.into_iter().next() {
            None => Ok(EqualityCheck { equal: true, failing_degree: None, witness: Vec::new() }),
            Some((deg, witness)) => Ok(EqualityCheck { equal: false, failing_degree: Some(deg), witness }),
        }
    }

    /// Dimension of the legged quotient of one degree on `sig` (summed over leg counts).
    pub fn legged_dimension(&self, sig: &Signature, degree: usize) -> Result<usize> {
        let sig = Arc::new(sig.clone());
        let mut total = 0;
        for counts in star_count_vectors(&sig, degree) {
            total += self.block(&BlockKey { sig: sig.clone(), degree, counts })?.dim();
        }
        Ok(total)
    }

    /// Dimension of the vacuum quotient of one degree (free loops excluded).
    pub fn vacuum_dimension(&self, degree: usize) -> Result<usize> {
        if degree == 0 {
            return Ok(1);
        }
        Ok(self.block(&BlockKey::vacuum(degree))?.dim())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::qi;
    use crate::diagram::{chords, strut, wheel, SkeletonKind};

    #[test]
    fn low_dimensions() {
        let r = Reducer::new(4, None).unwrap();
        let x = Signature::star("x");
        let z = Signature::single(SkeletonKind::Interval, "z");
        assert_eq!(r.legged_dimension(&x, 0).unwrap(), 1);
        assert_eq!(r.legged_dimension(&x, 1).unwrap(), 1);
        for n in 0..=4 {
            assert_eq!(r.legged_dimension(&x, n).unwrap(), r.legged_dimension(&z, n).unwrap(), "degree {n}");
        }
    }

    #[test]
    fn wheel_survives_and_chords_commute() {
        let r = Reducer::new(4, None).unwrap();
        let w: Element = Element::from_diagram(&wheel("x", 2));
        let zero = Element::zero(w.sig().clone());
        let chk = r.equal_mod_relations(&w, &zero, 2).unwrap();
        assert!(!chk.equal);
        assert_eq!(chk.failing_degree, Some(2));
        let s: Element = Element::from_diagram(&strut("x"));
        assert!(r.equal_mod_relations(&s, &s, 2).unwrap().equal);
        let c2: Element = Element::from_diagram(&chords(SkeletonKind::Interval, "z", 2));
        assert!(!r.coordinates(&c2).unwrap().is_empty());
        let _ = qi(0);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let key = BlockKey { sig: Arc::new(Signature::single(SkeletonKind::Interval, "z")), degree: 3, counts: vec![0] };
        let built = BlockQuotient::build(key.clone()).unwrap();
        built.save(dir.path()).unwrap();
        let loaded = BlockQuotient::load(&key, dir.path()).unwrap().unwrap();
        assert_eq!(loaded.dim(), built.dim());
        assert_eq!(loaded.columns, built.columns);
        let r = Reducer::new(4, Some(dir.path().to_path_buf())).unwrap();
        r.block(&key).unwrap();
        assert_eq!(r.cache_hits(), 1);
    }
}
