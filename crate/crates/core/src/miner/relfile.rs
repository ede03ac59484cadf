//! Text formats for mined relations and mining logs.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::miner::ideal::{Relation, RelationIdeal, Source};
use crate::miner::{BidegreeLog, DegreeLog, MineOutput};
use crate::necklace::Bidegree;
use crate::ring::{GenPoly, GeneratorSet, MonomialOrder};

/// Header fields of a relation file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationHeader {
    pub n: usize,
    pub max_degree: u32,
    pub seed: u64,
    /// Set for images of relations under a variety map.
    pub target: Option<String>,
}

impl RelationHeader {
    pub fn render(&self) -> String {
        let mut s = format!("# relations v1 n={} max_degree={} seed={}", self.n, self.max_degree, self.seed);
        if let Some(t) = &self.target {
            s.push_str(&format!(" target={t}"));
        }
        s
    }
}

pub fn write_relations(
    out: &mut impl Write,
    header: &RelationHeader,
    relations: &[Relation],
    order: &MonomialOrder,
) -> Result<()> {
    writeln!(out, "{}", header.render())?;
    for r in relations {
        writeln!(out, "({},{}): {}", r.bidegree.r, r.bidegree.s, r.poly.render(order))?;
    }
    Ok(())
}

pub fn save_relations(path: &Path, out: &MineOutput) -> Result<()> {
    let header = RelationHeader {
        n: out.n,
        max_degree: out.max_degree,
        seed: out.config.seed,
        target: None,
    };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_relations(&mut f, &header, out.ideal.relations(), &out.order())?;
    f.flush()?;
    Ok(())
}

fn parse_bidegree(s: &str) -> Option<Bidegree> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let (r, t) = inner.split_once(',')?;
    Some(Bidegree::new(r.trim().parse().ok()?, t.trim().parse().ok()?))
}

pub fn read_relations(input: impl BufRead, path: &str, gens: &GeneratorSet) -> Result<(RelationHeader, RelationIdeal)> {
    let err = |line: usize, reason: String| Error::Format {
        path: path.to_string(),
        line,
        reason,
    };
    let mut lines = input.lines();
    let first = lines.next().transpose()?.ok_or_else(|| err(1, "empty file".into()))?;
    let rest = first
        .strip_prefix("# relations v1")
        .ok_or_else(|| err(1, "missing `# relations v1` header".into()))?;
    let mut n = None;
    let mut max_degree = None;
    let mut seed = None;
    let mut target = None;
    for field in rest.split_whitespace() {
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| err(1, format!("bad header field {field:?}")))?;
        let bad = || err(1, format!("bad value in {field:?}"));
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(|_| bad())?),
            "max_degree" => max_degree = Some(v.parse::<u32>().map_err(|_| bad())?),
            "seed" => seed = Some(v.parse::<u64>().map_err(|_| bad())?),
            "target" => target = Some(v.to_string()),
            _ => return Err(err(1, format!("unknown header field {k:?}"))),
        }
    }
    let header = RelationHeader {
        n: n.ok_or_else(|| err(1, "header lacks n".into()))?,
        max_degree: max_degree.ok_or_else(|| err(1, "header lacks max_degree".into()))?,
        seed: seed.ok_or_else(|| err(1, "header lacks seed".into()))?,
        target,
    };
    if header.n != gens.n() {
        return Err(err(1, format!("relations are for n={}, expected {}", header.n, gens.n())));
    }
    let mut ideal = RelationIdeal::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let line_no = idx + 2;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (b, poly) = line
            .split_once(": ")
            .ok_or_else(|| err(line_no, "expected `(r,s): <polynomial>`".into()))?;
        let bidegree = parse_bidegree(b.trim()).ok_or_else(|| err(line_no, format!("bad bidegree {b:?}")))?;
        let poly = GenPoly::parse(poly, gens.len()).map_err(|e| err(line_no, e.to_string()))?;
        if header.target.is_none() && poly.bidegree(gens) != Some(bidegree) {
            return Err(err(line_no, format!("polynomial is not homogeneous of bidegree {bidegree}")));
        }
        ideal.push(Relation {
            bidegree,
            poly,
            source: Source::File,
        });
    }
    Ok((header, ideal))
}

pub fn load_relations(path: &Path, gens: &GeneratorSet) -> Result<(RelationHeader, RelationIdeal)> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_relations(f, &path.display().to_string(), gens)
}

pub fn bidegree_log_line(l: &BidegreeLog) -> String {
    let mut s = format!(
        "bidegree {} necklaces={} unknowns={} monomials={} equations={} rank={} kernel={} inherited={} new={} unfilled={}",
        l.bidegree,
        l.necklaces,
        l.unknowns,
        l.monomials,
        l.equations,
        l.rank,
        l.kernel_dim,
        l.inherited,
        l.new_relations,
        l.unfilled
    );
    if let Some(src) = &l.closed_by {
        s.push_str(&format!(" closed_by={src}"));
    }
    if let Some(b) = l.mirror_of {
        s.push_str(&format!(" mirror_of={b}"));
    }
    if let Some(e) = l.special_essential {
        s.push_str(&format!(" special_essential={e}"));
    }
    s
}

pub fn degree_log_line(d: &DegreeLog) -> String {
    format!(
        "degree {} free={} series={} ideal={} relations={} deficit={}",
        d.degree,
        d.free,
        d.series,
        d.ideal_dim,
        d.relations,
        d.deficit()
    )
}

/// Bidegree lines of each degree followed by its summary line.
pub fn write_log(out: &mut impl Write, output: &MineOutput) -> Result<()> {
    for d in &output.degrees {
        for l in output.log.iter().filter(|l| l.bidegree.total() == d.degree) {
            writeln!(out, "{}", bidegree_log_line(l))?;
        }
        writeln!(out, "{}", degree_log_line(d))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{generator_set, OrderKind};

    #[test]
    fn roundtrip() {
        let gens = generator_set(4).unwrap();
        let order = MonomialOrder::new(OrderKind::Grevlex, &gens);
        let rel = Relation {
            bidegree: Bidegree::new(4, 4),
            poly: GenPoly::parse("a15^2 - 2*a11*a13", 32).unwrap(),
            source: Source::File,
        };
        let header = RelationHeader {
            n: 4,
            max_degree: 13,
            seed: 7,
            target: None,
        };
        let mut buf = Vec::new();
        write_relations(&mut buf, &header, &[rel.clone()], &order).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# relations v1 n=4 max_degree=13 seed=7\n(4,4): "));
        let (h, ideal) = read_relations(&buf[..], "mem", &gens).unwrap();
        assert_eq!(h, header);
        assert_eq!(ideal.relations(), &[rel]);
        let bad = b"# relations v1 n=4 max_degree=13 seed=7\n(4,3): a15^2\n";
        assert!(read_relations(&bad[..], "mem", &gens).is_err());
    }
}
