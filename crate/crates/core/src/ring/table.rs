//! Necklace traces written in the generators.

use std::cmp::Reverse;
use std::io::{BufRead, Write};
use std::path::Path;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::necklace::{Bidegree, Necklace};
use crate::ring::generators::GeneratorSet;
use crate::ring::poly::{GenPoly, MonomialOrder};

/// `Tr(v)` as a generator polynomial for every processed necklace `v`.
/// Entries of degree at least 12 (n = 4) are normal forms modulo the
/// mined ideal, so they are unique only in that sense.
#[derive(Clone, Debug)]
pub struct ExpressionTable {
    n: usize,
    entries: FxHashMap<Necklace, GenPoly>,
    /// Every necklace of total degree `<= frontier` has an entry.
    frontier: u32,
}

impl ExpressionTable {
    pub fn new(n: usize) -> Self {
        ExpressionTable {
            n,
            entries: FxHashMap::default(),
            frontier: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn frontier(&self) -> u32 {
        self.frontier
    }

    pub fn set_frontier(&mut self, d: u32) {
        self.frontier = d;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, v: &Necklace) -> Option<&GenPoly> {
        self.entries.get(v)
    }

    pub fn insert(&mut self, v: Necklace, p: GenPoly) {
        self.entries.insert(v, p);
    }

    /// Entries by ascending degree, then descending `r`, then descending
    /// necklace.
    pub fn sorted(&self) -> Vec<(Necklace, &GenPoly)> {
        let mut v: Vec<_> = self.entries.iter().map(|(k, p)| (*k, p)).collect();
        v.sort_by_key(|(k, _)| (k.len(), Reverse(k.bidegree().r), Reverse(*k)));
        v
    }

    pub fn in_bidegree(&self, b: Bidegree) -> Vec<(Necklace, &GenPoly)> {
        self.sorted()
            .into_iter()
            .filter(|(k, _)| k.bidegree() == b)
            .collect()
    }

    /// Text form: header, one `# key=value ...` config line, then
    /// `<necklace> = <polynomial>` per entry.
    pub fn write_to(&self, out: &mut impl Write, config: &str, order: &MonomialOrder) -> Result<()> {
        writeln!(out, "# expr-table v1 n={}", self.n)?;
        writeln!(out, "# frontier={} {config}", self.frontier)?;
        for (v, p) in self.sorted() {
            writeln!(out, "{v} = {}", p.render(order))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path, config: &str, order: &MonomialOrder) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut f, config, order)?;
        f.flush()?;
        Ok(())
    }

    pub fn read_from(input: impl BufRead, path: &str, gens: &GeneratorSet) -> Result<Self> {
        let fmt_err = |line: usize, reason: String| Error::Format {
            path: path.to_string(),
            line,
            reason,
        };
        let mut table: Option<ExpressionTable> = None;
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if idx == 0 {
                let n = line
                    .strip_prefix("# expr-table v1 n=")
                    .and_then(|s| s.trim().parse::<usize>().ok())
                    .ok_or_else(|| fmt_err(1, "missing `# expr-table v1 n=<n>` header".into()))?;
                if n != gens.n() {
                    return Err(fmt_err(1, format!("table is for n={n}, expected {}", gens.n())));
                }
                table = Some(ExpressionTable::new(n));
                continue;
            }
            let t = table.as_mut().expect("header read");
            if let Some(rest) = line.strip_prefix("# frontier=") {
                let d = rest.split_whitespace().next().unwrap_or("");
                t.frontier = d.parse().map_err(|_| fmt_err(line_no, "bad frontier".into()))?;
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once(" = ")
                .ok_or_else(|| fmt_err(line_no, "expected `<necklace> = <polynomial>`".into()))?;
            let v = Necklace::parse(lhs.trim()).map_err(|e| fmt_err(line_no, e.to_string()))?;
            let p = GenPoly::parse(rhs, gens.len()).map_err(|e| fmt_err(line_no, e.to_string()))?;
            t.entries.insert(v, p);
        }
        table.ok_or_else(|| fmt_err(0, "empty file".into()))
    }

    pub fn load(path: &Path, gens: &GeneratorSet) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        ExpressionTable::read_from(f, &path.display().to_string(), gens)
    }
}
