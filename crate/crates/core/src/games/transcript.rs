//! Query transcripts of the Ψ setting and the bad events defined on them.

use crate::error::Result;
use crate::feistel::FeistelPair;
use crate::group::{Element, Group};
use crate::oracle::Direction;

/// One cipher query-answer pair, stored input side first: a backward
/// query for `y` answered with `x` is recorded as `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CipherPair {
    pub direction: Direction,
    pub x: FeistelPair,
    pub y: FeistelPair,
}

/// `(T_P, T_f, T_g)` in query order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transcript {
    pub cipher: Vec<CipherPair>,
    pub f_pairs: Vec<(Element, Element)>,
    pub g_pairs: Vec<(Element, Element)>,
}

impl Transcript {
    pub fn qc(&self) -> usize {
        self.cipher.len()
    }

    /// False iff two cipher pairs share an input but not the output, or an
    /// output but not the input.
    pub fn is_consistent(&self) -> bool {
        for (i, a) in self.cipher.iter().enumerate() {
            for b in &self.cipher[i + 1..] {
                if (a.x == b.x) != (a.y == b.y) {
                    return false;
                }
            }
        }
        true
    }
}

/// Free-function form of [`Transcript::is_consistent`].
pub fn check_consistency(tr: &Transcript) -> bool {
    tr.is_consistent()
}

/// `BadG(k)`: some cipher query feeds `g` a point also queried to the `g`
/// oracle, in the first round (`x^R·k^R = x''`) or the last
/// (`y^L·(k^L)⁻¹ = x''`).
pub fn detect_badg(group: &Group, tr: &Transcript, key: &FeistelPair) -> Result<bool> {
    if tr.g_pairs.is_empty() {
        return Ok(false);
    }
    let kl_inv = group.inv(&key.left)?;
    for c in &tr.cipher {
        let first = group.op(&c.x.right, &key.right)?;
        let last = group.op(&c.y.left, &kl_inv)?;
        if tr.g_pairs.iter().any(|(x, _)| *x == first || *x == last) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The two inputs `f` receives inside the cipher for each query:
/// `X = x^L·k^L·g(x^R·k^R)` and `Y = y^R·(k^R)⁻¹·g(y^L·(k^L)⁻¹)⁻¹`.
pub fn internal_values(
    group: &Group,
    tr: &Transcript,
    key: &FeistelPair,
    g: &mut dyn FnMut(&Element) -> Result<Element>,
) -> Result<Vec<(Element, Element)>> {
    let kl_inv = group.inv(&key.left)?;
    let kr_inv = group.inv(&key.right)?;
    tr.cipher
        .iter()
        .map(|c| {
            let gx = g(&group.op(&c.x.right, &key.right)?)?;
            let big_x = group.op(&group.op(&c.x.left, &key.left)?, &gx)?;
            let gy = g(&group.op(&c.y.left, &kl_inv)?)?;
            let big_y = group.div(&group.op(&c.y.right, &kr_inv)?, &gy)?;
            Ok((big_x, big_y))
        })
        .collect()
}

/// `Bad(k, g)`: two of the points `f` sees inside the cipher coincide
/// (B1–B3), or one coincides with an `f`-oracle query (B4, B5). `g` is
/// evaluated on every point the check needs.
pub fn detect_bad(
    group: &Group,
    tr: &Transcript,
    key: &FeistelPair,
    g: &mut dyn FnMut(&Element) -> Result<Element>,
) -> Result<bool> {
    let vals = internal_values(group, tr, key, g)?;
    let n = vals.len();
    for i in 0..n {
        for j in i + 1..n {
            if vals[i].0 == vals[j].0 || vals[i].1 == vals[j].1 {
                return Ok(true);
            }
        }
        for j in 0..n {
            if vals[i].0 == vals[j].1 {
                return Ok(true);
            }
        }
        if tr
            .f_pairs
            .iter()
            .any(|(x, _)| *x == vals[i].0 || *x == vals[i].1)
        {
            return Ok(true);
        }
    }
    Ok(false)
}
