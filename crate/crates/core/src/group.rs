//! Concrete finite groups with canonical byte encodings.
//!
//! Supported kinds:
//!
//! | spec              | group                 | order  |
//! |-------------------|-----------------------|--------|
//! | `zmod:n`          | integers mod n        | n      |
//! | `xor:n`           | n-bit strings, XOR    | 2ⁿ     |
//! | `sym:m`           | permutations of m pts | m!     |
//! | `dihedral:m`      | symmetries of m-gon   | 2m     |
//! | `prod:(A,B)`      | direct product        | ‖A‖‖B‖ |
//!
//! An [`Element`] is just its canonical encoding, so equality, hashing and
//! ordering are byte comparisons. Encodings are fixed-width per group:
//! residues and bit strings are big-endian, permutations are image tuples
//! (one byte per point, 0-based), dihedral elements are `(rotation, flip)`
//! with the element meaning ρ^rotation·σ^flip, and products are the two
//! component encodings, each behind a `u16` length prefix.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::coins::Coins;
use crate::error::{Error, Result};

/// Largest group that [`Group::elements`] will materialize.
pub const ENUMERATION_CAP: u128 = 1 << 20;

const MAX_SYM_POINTS: usize = 34;
const MAX_XOR_BITS: u32 = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(SmallVec<[u8; 24]>);

impl Element {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    fn from_slice(bytes: &[u8]) -> Self {
        Element(SmallVec::from_slice(bytes))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element(")?;
        for b in self.0.iter() {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone)]
pub struct Group(Arc<Inner>);

struct Inner {
    kind: Kind,
    order: u128,
    width: usize,
    spec: String,
}

enum Kind {
    Zmod { n: u128 },
    Xor { bits: u32 },
    Sym { points: usize },
    Dihedral { m: u128 },
    Prod(Group, Group),
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Group {}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.0.spec)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.spec)
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Group::parse(s)
    }
}

fn byte_width(max_value: u128) -> usize {
    let bits = 128 - max_value.leading_zeros() as usize;
    bits.div_ceil(8).max(1)
}

fn read_be(bytes: &[u8]) -> u128 {
    bytes.iter().fold(0u128, |acc, &b| (acc << 8) | b as u128)
}

fn write_be(out: &mut SmallVec<[u8; 24]>, value: u128, width: usize) {
    let raw = value.to_be_bytes();
    out.extend_from_slice(&raw[16 - width..]);
}

fn factorial(m: usize) -> Option<u128> {
    (1..=m as u128).try_fold(1u128, |acc, i| acc.checked_mul(i))
}

impl Group {
    fn build(kind: Kind, order: u128, width: usize, spec: String) -> Group {
        Group(Arc::new(Inner {
            kind,
            order,
            width,
            spec,
        }))
    }

    pub fn zmod(n: u64) -> Result<Group> {
        if n < 2 {
            return Err(Error::Parse {
                token: n.to_string(),
            });
        }
        let n = n as u128;
        Ok(Group::build(
            Kind::Zmod { n },
            n,
            byte_width(n - 1),
            format!("zmod:{n}"),
        ))
    }

    pub fn xor(bits: u32) -> Result<Group> {
        if bits < 2 {
            return Err(Error::Parse {
                token: bits.to_string(),
            });
        }
        if bits > MAX_XOR_BITS {
            return Err(Error::Capacity {
                what: "xor bit length".into(),
                size: bits as u128,
                limit: MAX_XOR_BITS as u128,
            });
        }
        Ok(Group::build(
            Kind::Xor { bits },
            1u128 << bits,
            (bits as usize).div_ceil(8),
            format!("xor:{bits}"),
        ))
    }

    pub fn sym(points: usize) -> Result<Group> {
        if points < 2 {
            return Err(Error::Parse {
                token: points.to_string(),
            });
        }
        if points > MAX_SYM_POINTS {
            return Err(Error::Capacity {
                what: "symmetric group degree".into(),
                size: points as u128,
                limit: MAX_SYM_POINTS as u128,
            });
        }
        let order = factorial(points).expect("degree bounded above");
        Ok(Group::build(
            Kind::Sym { points },
            order,
            points,
            format!("sym:{points}"),
        ))
    }

    pub fn dihedral(m: u64) -> Result<Group> {
        if m < 2 {
            return Err(Error::Parse {
                token: m.to_string(),
            });
        }
        let m = m as u128;
        Ok(Group::build(
            Kind::Dihedral { m },
            2 * m,
            byte_width(m - 1) + 1,
            format!("dihedral:{m}"),
        ))
    }

    pub fn product(a: &Group, b: &Group) -> Result<Group> {
        let order = a.order().checked_mul(b.order()).ok_or(Error::Capacity {
            what: "product order".into(),
            size: u128::MAX,
            limit: u128::MAX,
        })?;
        if a.width() > u16::MAX as usize || b.width() > u16::MAX as usize {
            return Err(Error::Capacity {
                what: "component encoding width".into(),
                size: a.width().max(b.width()) as u128,
                limit: u16::MAX as u128,
            });
        }
        Ok(Group::build(
            Kind::Prod(a.clone(), b.clone()),
            order,
            4 + a.width() + b.width(),
            format!("prod:({},{})", a.spec(), b.spec()),
        ))
    }

    /// `G × G`, the domain of the Feistel constructions.
    pub fn square(&self) -> Result<Group> {
        Group::product(self, self)
    }

    pub fn parse(spec: &str) -> Result<Group> {
        let mut parser = Parser { src: spec, pos: 0 };
        let group = parser.spec()?;
        if parser.pos != spec.len() {
            return Err(Error::Parse {
                token: spec[parser.pos..].to_string(),
            });
        }
        Ok(group)
    }

    pub fn order(&self) -> u128 {
        self.0.order
    }

    pub fn spec(&self) -> &str {
        &self.0.spec
    }

    /// Encoded size in bytes of every element.
    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn kind_name(&self) -> &'static str {
        match self.0.kind {
            Kind::Zmod { .. } => "zmod",
            Kind::Xor { .. } => "xor",
            Kind::Sym { .. } => "sym",
            Kind::Dihedral { .. } => "dihedral",
            Kind::Prod(..) => "prod",
        }
    }

    pub fn is_abelian(&self) -> bool {
        match &self.0.kind {
            Kind::Zmod { .. } | Kind::Xor { .. } => true,
            Kind::Sym { points } => *points <= 2,
            Kind::Dihedral { m } => *m <= 2,
            Kind::Prod(a, b) => a.is_abelian() && b.is_abelian(),
        }
    }

    /// Components of a product group.
    pub fn factors(&self) -> Option<(&Group, &Group)> {
        match &self.0.kind {
            Kind::Prod(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn identity(&self) -> Element {
        let mut out = SmallVec::new();
        self.write_identity(&mut out);
        Element(out)
    }

    fn write_identity(&self, out: &mut SmallVec<[u8; 24]>) {
        match &self.0.kind {
            Kind::Zmod { .. } | Kind::Xor { .. } | Kind::Dihedral { .. } => {
                out.extend(std::iter::repeat_n(0u8, self.width()))
            }
            Kind::Sym { points } => out.extend((0..*points).map(|i| i as u8)),
            Kind::Prod(a, b) => {
                out.extend_from_slice(&(a.width() as u16).to_be_bytes());
                a.write_identity(out);
                out.extend_from_slice(&(b.width() as u16).to_be_bytes());
                b.write_identity(out);
            }
        }
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.check_bytes(a.as_bytes()).is_ok()
    }

    pub fn validate(&self, a: &Element) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::domain(self))
        }
    }

    fn check_bytes(&self, bytes: &[u8]) -> std::result::Result<(), String> {
        if bytes.len() != self.width() {
            return Err(format!(
                "expected {} bytes, found {}",
                self.width(),
                bytes.len()
            ));
        }
        match &self.0.kind {
            Kind::Zmod { n } => {
                if read_be(bytes) >= *n {
                    return Err("residue out of range".into());
                }
            }
            Kind::Xor { bits } => {
                let spare = (self.width() * 8) as u32 - bits;
                if spare > 0 && bytes[0] >> (8 - spare) != 0 {
                    return Err("bits set above the group width".into());
                }
            }
            Kind::Sym { points } => {
                let mut seen = [false; 256];
                for &b in bytes {
                    if b as usize >= *points || seen[b as usize] {
                        return Err("image tuple is not a permutation".into());
                    }
                    seen[b as usize] = true;
                }
            }
            Kind::Dihedral { m } => {
                let (rot, flip) = bytes.split_at(self.width() - 1);
                if read_be(rot) >= *m {
                    return Err("rotation out of range".into());
                }
                if flip[0] > 1 {
                    return Err("reflection bit must be 0 or 1".into());
                }
            }
            Kind::Prod(a, b) => {
                let (ea, eb) = split_product(bytes, a.width(), b.width())?;
                a.check_bytes(ea)?;
                b.check_bytes(eb)?;
            }
        }
        Ok(())
    }

    pub fn encode(&self, a: &Element) -> Result<Vec<u8>> {
        self.validate(a)?;
        Ok(a.as_bytes().to_vec())
    }

    /// Inverse of [`Group::encode`]; rejects anything that is not a
    /// canonical encoding.
    pub fn decode(&self, bytes: &[u8]) -> Result<Element> {
        self.check_bytes(bytes).map_err(|reason| Error::Codec {
            group: self.spec().to_string(),
            reason,
        })?;
        Ok(Element::from_slice(bytes))
    }

    pub fn op(&self, a: &Element, b: &Element) -> Result<Element> {
        self.validate(a)?;
        self.validate(b)?;
        let mut out = SmallVec::new();
        self.write_op(a.as_bytes(), b.as_bytes(), &mut out);
        Ok(Element(out))
    }

    fn write_op(&self, a: &[u8], b: &[u8], out: &mut SmallVec<[u8; 24]>) {
        match &self.0.kind {
            Kind::Zmod { n } => {
                let s = (read_be(a) + read_be(b)) % n;
                write_be(out, s, self.width());
            }
            Kind::Xor { .. } => out.extend(a.iter().zip(b).map(|(x, y)| x ^ y)),
            // (a·b)(i) = a(b(i)): apply b first.
            Kind::Sym { .. } => out.extend(b.iter().map(|&i| a[i as usize])),
            Kind::Dihedral { m } => {
                let w = self.width() - 1;
                let (ra, sa) = (read_be(&a[..w]), a[w]);
                let (rb, sb) = (read_be(&b[..w]), b[w]);
                // ρ^ra σ^sa ρ^rb σ^sb = ρ^(ra ± rb) σ^(sa ⊕ sb)
                let r = if sa == 0 {
                    (ra + rb) % m
                } else {
                    (ra + m - rb) % m
                };
                write_be(out, r, w);
                out.push(sa ^ sb);
            }
            Kind::Prod(ga, gb) => {
                let (a1, a2) = split_product(a, ga.width(), gb.width()).expect("validated");
                let (b1, b2) = split_product(b, ga.width(), gb.width()).expect("validated");
                out.extend_from_slice(&(ga.width() as u16).to_be_bytes());
                ga.write_op(a1, b1, out);
                out.extend_from_slice(&(gb.width() as u16).to_be_bytes());
                gb.write_op(a2, b2, out);
            }
        }
    }

    pub fn inv(&self, a: &Element) -> Result<Element> {
        self.validate(a)?;
        let mut out = SmallVec::new();
        self.write_inv(a.as_bytes(), &mut out);
        Ok(Element(out))
    }

    fn write_inv(&self, a: &[u8], out: &mut SmallVec<[u8; 24]>) {
        match &self.0.kind {
            Kind::Zmod { n } => write_be(out, (n - read_be(a)) % n, self.width()),
            Kind::Xor { .. } => out.extend_from_slice(a),
            Kind::Sym { points } => {
                let start = out.len();
                out.extend(std::iter::repeat_n(0u8, *points));
                for (i, &img) in a.iter().enumerate() {
                    out[start + img as usize] = i as u8;
                }
            }
            Kind::Dihedral { m } => {
                let w = self.width() - 1;
                let (r, s) = (read_be(&a[..w]), a[w]);
                // reflections are involutions
                let r = if s == 0 { (m - r) % m } else { r };
                write_be(out, r, w);
                out.push(s);
            }
            Kind::Prod(ga, gb) => {
                let (a1, a2) = split_product(a, ga.width(), gb.width()).expect("validated");
                out.extend_from_slice(&(ga.width() as u16).to_be_bytes());
                ga.write_inv(a1, out);
                out.extend_from_slice(&(gb.width() as u16).to_be_bytes());
                gb.write_inv(a2, out);
            }
        }
    }

    /// `a · b⁻¹`
    pub fn div(&self, a: &Element, b: &Element) -> Result<Element> {
        self.op(a, &self.inv(b)?)
    }

    /// Element at position `index` of the canonical order, which is
    /// ascending order of encodings.
    pub fn element_at(&self, index: u128) -> Result<Element> {
        if index >= self.order() {
            return Err(Error::Precondition(format!(
                "index {index} out of range for {}",
                self.spec()
            )));
        }
        let mut out = SmallVec::new();
        self.write_element_at(index, &mut out);
        Ok(Element(out))
    }

    fn write_element_at(&self, index: u128, out: &mut SmallVec<[u8; 24]>) {
        match &self.0.kind {
            Kind::Zmod { .. } | Kind::Xor { .. } => write_be(out, index, self.width()),
            Kind::Sym { points } => {
                // Lehmer code, most significant digit first
                let mut pool: Vec<u8> = (0..*points as u8).collect();
                let mut rest = index;
                for pos in 0..*points {
                    let radix = factorial(points - 1 - pos).expect("bounded");
                    let digit = (rest / radix) as usize;
                    rest %= radix;
                    out.push(pool.remove(digit));
                }
            }
            Kind::Dihedral { .. } => {
                write_be(out, index / 2, self.width() - 1);
                out.push((index % 2) as u8);
            }
            Kind::Prod(a, b) => {
                out.extend_from_slice(&(a.width() as u16).to_be_bytes());
                a.write_element_at(index / b.order(), out);
                out.extend_from_slice(&(b.width() as u16).to_be_bytes());
                b.write_element_at(index % b.order(), out);
            }
        }
    }

    /// Position of `a` in the canonical order.
    pub fn index_of(&self, a: &Element) -> Result<u128> {
        self.validate(a)?;
        Ok(self.index_of_bytes(a.as_bytes()))
    }

    fn index_of_bytes(&self, a: &[u8]) -> u128 {
        match &self.0.kind {
            Kind::Zmod { .. } | Kind::Xor { .. } => read_be(a),
            Kind::Sym { points } => {
                let mut index = 0u128;
                for pos in 0..*points {
                    let smaller_later = a[pos + 1..].iter().filter(|&&x| x < a[pos]).count();
                    index += smaller_later as u128 * factorial(points - 1 - pos).expect("bounded");
                }
                index
            }
            Kind::Dihedral { .. } => {
                let w = self.width() - 1;
                read_be(&a[..w]) * 2 + a[w] as u128
            }
            Kind::Prod(ga, gb) => {
                let (a1, a2) = split_product(a, ga.width(), gb.width()).expect("validated");
                ga.index_of_bytes(a1) * gb.order() + gb.index_of_bytes(a2)
            }
        }
    }

    /// Uniform element: a uniform index in `0..|G|` mapped through the
    /// canonical ranking.
    pub fn sample(&self, coins: &mut dyn Coins) -> Result<Element> {
        let index = coins.below(self.order())?;
        self.element_at(index)
    }

    /// Uniform element other than the identity.
    pub fn sample_non_identity(&self, coins: &mut dyn Coins) -> Result<Element> {
        let id = self.identity();
        loop {
            let e = self.sample(coins)?;
            if e != id {
                return Ok(e);
            }
            coins.discard(false)?;
        }
    }

    /// `count` distinct uniform elements (Floyd's subset sampling).
    pub fn sample_distinct(&self, count: u128, coins: &mut dyn Coins) -> Result<Vec<Element>> {
        let n = self.order();
        if count > n {
            return Err(Error::Precondition(format!(
                "cannot draw {count} distinct elements from a group of order {n}"
            )));
        }
        let mut chosen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(count as usize);
        for j in (n - count)..n {
            let t = coins.below(j + 1)?;
            let pick = if chosen.insert(t) {
                t
            } else {
                chosen.insert(j);
                j
            };
            out.push(self.element_at(pick)?);
        }
        Ok(out)
    }

    /// All elements in canonical order. Errors above [`ENUMERATION_CAP`].
    pub fn elements(&self) -> Result<Vec<Element>> {
        if self.order() > ENUMERATION_CAP {
            return Err(Error::Capacity {
                what: format!("order of {}", self.spec()),
                size: self.order(),
                limit: ENUMERATION_CAP,
            });
        }
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }

    /// Residue or bit string from an integer (`zmod`, `xor` only).
    pub fn from_int(&self, value: u128) -> Result<Element> {
        match &self.0.kind {
            Kind::Zmod { .. } | Kind::Xor { .. } if value < self.order() => {
                self.element_at(value)
            }
            _ => Err(Error::domain(self)),
        }
    }

    /// Integer value of a `zmod` or `xor` element.
    pub fn to_int(&self, a: &Element) -> Result<u128> {
        match &self.0.kind {
            Kind::Zmod { .. } | Kind::Xor { .. } => self.index_of(a),
            _ => Err(Error::domain(self)),
        }
    }

    /// Permutation from its 0-based image tuple (`sym` only).
    pub fn permutation(&self, images: &[usize]) -> Result<Element> {
        match &self.0.kind {
            Kind::Sym { .. } => {
                let bytes: Vec<u8> = images
                    .iter()
                    .map(|&i| u8::try_from(i).map_err(|_| Error::domain(self)))
                    .collect::<Result<_>>()?;
                self.decode(&bytes).map_err(|_| Error::domain(self))
            }
            _ => Err(Error::domain(self)),
        }
    }

    /// Permutation from disjoint cycles written with 1-based points,
    /// e.g. `&[&[1, 2, 3]]` for (1 2 3).
    pub fn cycles(&self, cycles: &[&[usize]]) -> Result<Element> {
        let points = match &self.0.kind {
            Kind::Sym { points } => *points,
            _ => return Err(Error::domain(self)),
        };
        let mut images: Vec<usize> = (0..points).collect();
        for cycle in cycles {
            for (i, &p) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                if p == 0 || p > points || next == 0 || next > points {
                    return Err(Error::domain(self));
                }
                images[p - 1] = next - 1;
            }
        }
        self.permutation(&images)
    }

    /// ρ^rotation σ^flip (`dihedral` only).
    pub fn dihedral_element(&self, rotation: u128, flip: bool) -> Result<Element> {
        match &self.0.kind {
            Kind::Dihedral { m } if rotation < *m => self.element_at(rotation * 2 + flip as u128),
            _ => Err(Error::domain(self)),
        }
    }

    /// Packs two component elements (`prod` only).
    pub fn pair(&self, a: &Element, b: &Element) -> Result<Element> {
        let (ga, gb) = self.factors().ok_or_else(|| Error::domain(self))?;
        ga.validate(a)?;
        gb.validate(b)?;
        let mut out = SmallVec::new();
        out.extend_from_slice(&(ga.width() as u16).to_be_bytes());
        out.extend_from_slice(a.as_bytes());
        out.extend_from_slice(&(gb.width() as u16).to_be_bytes());
        out.extend_from_slice(b.as_bytes());
        Ok(Element(out))
    }

    /// Splits a product element into its components.
    pub fn unpair(&self, e: &Element) -> Result<(Element, Element)> {
        let (ga, gb) = self.factors().ok_or_else(|| Error::domain(self))?;
        self.validate(e)?;
        let (a, b) = split_product(e.as_bytes(), ga.width(), gb.width()).expect("validated");
        Ok((Element::from_slice(a), Element::from_slice(b)))
    }

    /// Human-readable rendering for reports.
    pub fn format(&self, a: &Element) -> String {
        if !self.contains(a) {
            return format!("{a:?}");
        }
        self.format_bytes(a.as_bytes())
    }

    fn format_bytes(&self, a: &[u8]) -> String {
        match &self.0.kind {
            Kind::Zmod { .. } => read_be(a).to_string(),
            Kind::Xor { bits } => format!("{:#0w$x}", read_be(a), w = (*bits as usize).div_ceil(4) + 2),
            Kind::Sym { .. } => {
                let imgs: Vec<String> = a.iter().map(|i| i.to_string()).collect();
                format!("[{}]", imgs.join(" "))
            }
            Kind::Dihedral { .. } => {
                let w = self.width() - 1;
                format!("r{}s{}", read_be(&a[..w]), a[w])
            }
            Kind::Prod(ga, gb) => {
                let (a1, a2) = split_product(a, ga.width(), gb.width()).expect("validated");
                format!("({},{})", ga.format_bytes(a1), gb.format_bytes(a2))
            }
        }
    }
}

fn split_product(
    bytes: &[u8],
    wa: usize,
    wb: usize,
) -> std::result::Result<(&[u8], &[u8]), String> {
    if bytes.len() != 4 + wa + wb {
        return Err("wrong product length".into());
    }
    let la = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
    if la != wa {
        return Err("first component length prefix mismatch".into());
    }
    let rest = &bytes[2..];
    let (a, rest) = rest.split_at(wa);
    let lb = u16::from_be_bytes([rest[0], rest[1]]) as usize;
    if lb != wb {
        return Err("second component length prefix mismatch".into());
    }
    Ok((a, &rest[2..]))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn error_here(&self) -> Error {
        let token: String = self
            .rest()
            .chars()
            .take_while(|c| !matches!(c, ',' | ')'))
            .collect();
        let token = if token.is_empty() {
            self.rest().chars().next().map(String::from).unwrap_or_else(|| "<end of input>".into())
        } else {
            token
        };
        Error::Parse { token }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error_here())
        }
    }

    fn word(&mut self) -> &str {
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        let w = &self.src[self.pos..self.pos + len];
        self.pos += len;
        w
    }

    fn number(&mut self) -> Result<u64> {
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error_here());
        }
        let text = &self.src[self.pos..self.pos + len];
        let value: u64 = text.parse().map_err(|_| Error::Parse {
            token: text.to_string(),
        })?;
        if value < 2 {
            return Err(Error::Parse {
                token: text.to_string(),
            });
        }
        self.pos += len;
        Ok(value)
    }

    fn spec(&mut self) -> Result<Group> {
        let start = self.pos;
        let kind = self.word().to_string();
        match kind.as_str() {
            "zmod" | "xor" | "sym" | "dihedral" | "prod" => {}
            "" => return Err(self.error_here()),
            other => {
                self.pos = start;
                return Err(Error::UnsupportedKind(other.to_string()));
            }
        }
        self.expect(':')?;
        match kind.as_str() {
            "prod" => {
                self.expect('(')?;
                let a = self.spec()?;
                self.expect(',')?;
                let b = self.spec()?;
                self.expect(')')?;
                Group::product(&a, &b)
            }
            _ => {
                let n = self.number()?;
                match kind.as_str() {
                    "zmod" => Group::zmod(n),
                    "xor" => Group::xor(u32::try_from(n).unwrap_or(u32::MAX)),
                    "sym" => Group::sym(usize::try_from(n).unwrap_or(usize::MAX)),
                    _ => Group::dihedral(n),
                }
            }
        }
    }
}
