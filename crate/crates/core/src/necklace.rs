//! Two-letter words, necklaces and their textual grammar.
//!
//! A word of length at most [`MAX_LEN`] is packed into a `u64`, first letter
//! in the most significant used bit, with the first letter of the alphabet
//! stored as `1`. Comparing `(len, bits)` is then exactly the deg-lex order
//! with `A > B`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};

pub const MAX_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// Rendered `B` or `Y`. Smaller than [`Letter::First`].
    Second,
    /// Rendered `A` or `X`.
    First,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::First => Letter::Second,
            Letter::Second => Letter::First,
        }
    }

    fn bit(self) -> u64 {
        match self {
            Letter::First => 1,
            Letter::Second => 0,
        }
    }
}

/// Which pair of symbols names the two letters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// `A`, `B`: traceless matrices.
    #[default]
    Traceless,
    /// `X`, `Y`: generic matrices.
    Generic,
}

impl Alphabet {
    pub fn symbol(self, l: Letter) -> char {
        match (self, l) {
            (Alphabet::Traceless, Letter::First) => 'A',
            (Alphabet::Traceless, Letter::Second) => 'B',
            (Alphabet::Generic, Letter::First) => 'X',
            (Alphabet::Generic, Letter::Second) => 'Y',
        }
    }

    fn letter(c: char) -> Option<(Alphabet, Letter)> {
        match c {
            'A' => Some((Alphabet::Traceless, Letter::First)),
            'B' => Some((Alphabet::Traceless, Letter::Second)),
            'X' => Some((Alphabet::Generic, Letter::First)),
            'Y' => Some((Alphabet::Generic, Letter::Second)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub r: u32,
    pub s: u32,
}

impl Bidegree {
    pub const fn new(r: u32, s: u32) -> Self {
        Bidegree { r, s }
    }

    pub fn total(self) -> u32 {
        self.r + self.s
    }

    pub fn swap(self) -> Self {
        Bidegree::new(self.s, self.r)
    }

    /// `self - other` when every component stays nonnegative.
    pub fn checked_sub(self, other: Bidegree) -> Option<Bidegree> {
        Some(Bidegree::new(
            self.r.checked_sub(other.r)?,
            self.s.checked_sub(other.s)?,
        ))
    }
}

impl Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.r + o.r, self.s + o.s)
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

/// A finite word. Field order makes the derived `Ord` deg-lex.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: u8,
    bits: u64,
}

fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, bits: 0 };

    pub fn letter_word(l: Letter) -> Word {
        Word {
            len: 1,
            bits: l.bit(),
        }
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut w = Word::EMPTY;
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn push(&mut self, l: Letter) {
        assert!((self.len as usize) < MAX_LEN, "word longer than {MAX_LEN}");
        self.bits = (self.bits << 1) | l.bit();
        self.len += 1;
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn letter(self, i: usize) -> Letter {
        debug_assert!(i < self.len());
        if (self.bits >> (self.len() - 1 - i)) & 1 == 1 {
            Letter::First
        } else {
            Letter::Second
        }
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..self.len()).map(move |i| self.letter(i))
    }

    pub fn bidegree(self) -> Bidegree {
        let r = self.bits.count_ones();
        Bidegree::new(r, self.len as u32 - r)
    }

    pub fn concat(self, o: Word) -> Word {
        let len = self.len() + o.len();
        assert!(len <= MAX_LEN, "word longer than {MAX_LEN}");
        let hi = if o.len == 0 {
            self.bits
        } else if o.len() >= 64 {
            0
        } else {
            self.bits << o.len
        };
        Word {
            len: len as u8,
            bits: hi | o.bits,
        }
    }

    pub fn pow(self, k: usize) -> Word {
        (0..k).fold(Word::EMPTY, |acc, _| acc.concat(self))
    }

    /// The rotation starting at letter `k`.
    pub fn rotate(self, k: usize) -> Word {
        let n = self.len();
        if n == 0 {
            return self;
        }
        let k = k % n;
        if k == 0 {
            return self;
        }
        let bits = ((self.bits << k) | (self.bits >> (n - k))) & mask(n);
        Word { len: self.len, bits }
    }

    /// Letters `start..end`.
    pub fn slice(self, start: usize, end: usize) -> Word {
        debug_assert!(start <= end && end <= self.len());
        let len = end - start;
        if len == 0 {
            return Word::EMPTY;
        }
        Word {
            len: len as u8,
            bits: (self.bits >> (self.len() - end)) & mask(len),
        }
    }

    /// The letters after position `i` followed by those before it: the
    /// cyclic remainder once letter `i` is removed.
    pub fn remainder(self, i: usize) -> Word {
        self.slice(i + 1, self.len()).concat(self.slice(0, i))
    }

    pub fn swap_letters(self) -> Word {
        Word {
            len: self.len,
            bits: !self.bits & mask(self.len()),
        }
    }

    pub fn render(self, alphabet: Alphabet) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.len() {
            let l = self.letter(i);
            let mut j = i + 1;
            while j < self.len() && self.letter(j) == l {
                j += 1;
            }
            out.push(alphabet.symbol(l));
            if j - i > 1 {
                out.push('^');
                out.push_str(&(j - i).to_string());
            }
            i = j;
        }
        out
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.render(Alphabet::Traceless))
    }
}

/// A cyclic class of words, stored as its maximal rotation.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Necklace(Word);

impl Necklace {
    pub const EMPTY: Necklace = Necklace(Word::EMPTY);

    pub fn word(self) -> Word {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.len()
    }

    pub fn is_empty(self) -> bool {
        self.0.is_empty()
    }

    pub fn bidegree(self) -> Bidegree {
        self.0.bidegree()
    }

    pub fn swap_letters(self) -> Necklace {
        canonicalize(self.0.swap_letters())
    }

    pub fn render(self, alphabet: Alphabet) -> String {
        self.0.render(alphabet)
    }

    /// Parse and canonicalize.
    pub fn parse(text: &str) -> Result<Necklace> {
        Ok(canonicalize(parse_word(text)?.0))
    }
}

impl fmt::Display for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&self.render(Alphabet::Traceless))
        }
    }
}

impl fmt::Debug for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Necklace({self})")
    }
}

pub fn canonicalize(w: Word) -> Necklace {
    let mut best = w;
    for k in 1..w.len() {
        let r = w.rotate(k);
        if r.bits > best.bits {
            best = r;
        }
    }
    Necklace(best)
}

pub fn is_chn(v: Necklace, n: usize) -> bool {
    ch_decompositions(v.word(), n).next().is_some()
}

/// All `(u, rotation)` with `rotation = u^n · tail`, in scan order.
fn ch_decompositions(w: Word, n: usize) -> impl Iterator<Item = (usize, Word)> {
    let len = w.len();
    let max_p = if n == 0 { 0 } else { len / n };
    (1..=max_p).flat_map(move |p| {
        (0..len).filter_map(move |k| {
            let rot = w.rotate(k);
            let u = rot.slice(0, p);
            let run = (1..n).all(|c| rot.slice(c * p, (c + 1) * p) == u);
            run.then_some((p, rot))
        })
    })
}

/// A rotation of `v` written as `u^n · tail`. Among all valid splits the
/// shortest `u` wins, then the greatest `u`, then the greatest rotation.
pub fn find_ch_decomposition(v: Necklace, n: usize) -> Option<(Word, Word)> {
    let mut best: Option<(usize, Word, Word)> = None;
    for (p, rot) in ch_decompositions(v.word(), n) {
        let u = rot.slice(0, p);
        let better = match &best {
            None => true,
            Some((bp, bu, brot)) => {
                if p != *bp {
                    // scan is by increasing p; the first p seen wins
                    false
                } else {
                    (u, rot) > (*bu, *brot)
                }
            }
        };
        if better {
            best = Some((p, u, rot));
        }
    }
    best.map(|(p, u, rot)| (u, rot.slice(n * p, rot.len())))
}

/// Every valid `(u, tail)` split of `v`, for confluence checks.
pub fn all_ch_decompositions(v: Necklace, n: usize) -> Vec<(Word, Word)> {
    let mut out: Vec<(Word, Word)> = ch_decompositions(v.word(), n)
        .map(|(p, rot)| (rot.slice(0, p), rot.slice(n * p, rot.len())))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// All necklaces of the given content, strictly descending.
pub fn enumerate_necklaces(b: Bidegree) -> Vec<Necklace> {
    let len = b.total() as usize;
    assert!(len <= MAX_LEN, "word longer than {MAX_LEN}");
    if len == 0 {
        return vec![Necklace::EMPTY];
    }
    let mut set = BTreeSet::new();
    if b.r == 0 {
        set.insert(canonicalize(Word { len: len as u8, bits: 0 }));
    } else {
        // Gosper's hack over all `len`-bit words with `r` ones.
        let mut x: u64 = mask(b.r as usize);
        let limit = mask(len);
        loop {
            let w = Word {
                len: len as u8,
                bits: x,
            };
            let c = canonicalize(w);
            if c.word() == w {
                set.insert(c);
            }
            if b.s == 0 {
                break;
            }
            let low = x & x.wrapping_neg();
            let Some(ripple) = x.checked_add(low) else {
                break;
            };
            if ripple > limit {
                break;
            }
            x = ripple | (((x ^ ripple) >> 2) / low);
            if x > limit {
                break;
            }
        }
    }
    set.into_iter().rev().collect()
}

/// Parse the word grammar: items `L` or `L^k`, `k ≥ 1`, whitespace ignored.
/// Returns the word and the alphabet it was written in.
pub fn parse_word(text: &str) -> Result<(Word, Alphabet)> {
    let err = |reason: &str| Error::parse("word", text, reason);
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut alphabet: Option<Alphabet> = None;
    let mut w = Word::EMPTY;
    let mut i = 0;
    while i < chars.len() {
        let (a, l) = Alphabet::letter(chars[i])
            .ok_or_else(|| err(&format!("unknown letter {:?}", chars[i])))?;
        if alphabet.is_some_and(|x| x != a) {
            return Err(err("mixed alphabets"));
        }
        alphabet = Some(a);
        i += 1;
        let mut count = 1usize;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(err("missing exponent after '^'"));
            }
            let digits: String = chars[start..i].iter().collect();
            count = digits.parse().map_err(|_| err("exponent too large"))?;
            if count == 0 {
                return Err(err("zero exponent"));
            }
        }
        if w.len() + count > MAX_LEN {
            return Err(err(&format!("longer than {MAX_LEN} letters")));
        }
        for _ in 0..count {
            w.push(l);
        }
    }
    Ok((w, alphabet.unwrap_or_default()))
}
