use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::rng;

/// Lexicographic enumeration is used up to this length.
pub const LEXICODE_MAX_LEN: usize = 20;
/// Upper limit on code size in lexicographic mode.
pub const LEXICODE_MAX_WORDS: usize = 4096;
/// Largest `⌈2^{m/16}⌉` the randomized mode will attempt.
pub const RANDOM_MAX_WORDS: usize = 1 << 16;

/// Words in `{-1, +1}^m`, stored as bit blocks (bit set ⇔ entry `-1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SignCodeRepr", try_from = "SignCodeRepr")]
pub struct SignCode {
    m: usize,
    words: Vec<Vec<u64>>,
    min_l1: usize,
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct SignCodeRepr {
    m: usize,
    min_l1: usize,
    seed: Option<u64>,
    words: Vec<Vec<i8>>,
}

impl From<SignCode> for SignCodeRepr {
    fn from(c: SignCode) -> Self {
        let words = (0..c.len()).map(|i| c.signs(i)).collect();
        Self {
            m: c.m,
            min_l1: c.min_l1,
            seed: c.seed,
            words,
        }
    }
}

impl TryFrom<SignCodeRepr> for SignCode {
    type Error = Error;

    fn try_from(r: SignCodeRepr) -> Result<Self> {
        let words = r
            .words
            .iter()
            .map(|w| {
                if w.len() != r.m || w.iter().any(|&s| s != 1 && s != -1) {
                    return Err(Error::Parameter(format!("code word is not in {{-1,+1}}^{}", r.m)));
                }
                Ok(pack(w.iter().map(|&s| s < 0), r.m))
            })
            .collect::<Result<Vec<_>>>()?;
        let code = SignCode::certify(r.m, words, r.seed);
        if code.min_l1 < r.min_l1 {
            return Err(Error::Parameter(format!(
                "recorded minimum distance {} exceeds the audited {}",
                r.min_l1, code.min_l1
            )));
        }
        Ok(code)
    }
}

fn blocks(m: usize) -> usize {
    m.div_ceil(64)
}

fn pack(bits: impl Iterator<Item = bool>, m: usize) -> Vec<u64> {
    let mut out = vec![0u64; blocks(m)];
    for (i, b) in bits.enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

fn hamming(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum()
}

impl SignCode {
    /// Build from raw words, recomputing the minimum distance exhaustively.
    fn certify(m: usize, words: Vec<Vec<u64>>, seed: Option<u64>) -> Self {
        let mut min_h = usize::MAX;
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                min_h = min_h.min(hamming(&words[i], &words[j]));
            }
        }
        let min_l1 = if words.len() < 2 { 0 } else { 2 * min_h };
        Self { m, words, min_l1, seed }
    }

    pub fn from_signs(words: &[Vec<i8>]) -> Result<Self> {
        let m = words.first().map_or(0, |w| w.len());
        SignCode::try_from(SignCodeRepr {
            m,
            min_l1: 0,
            seed: None,
            words: words.to_vec(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Audited minimum pairwise ℓ1 distance (twice the Hamming distance).
    pub fn min_l1(&self) -> usize {
        self.min_l1
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn sign(&self, word: usize, k: usize) -> i8 {
        if self.words[word][k / 64] >> (k % 64) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self, word: usize) -> Vec<i8> {
        (0..self.m).map(|k| self.sign(word, k)).collect()
    }

    /// `Σ_k |ε_k − ε'_k|`.
    pub fn l1(&self, i: usize, j: usize) -> usize {
        2 * hamming(&self.words[i], &self.words[j])
    }

    /// `⌈2^{m/16}⌉`.
    pub fn required_size(m: usize) -> f64 {
        2f64.powf(m as f64 / 16.0).ceil()
    }
}

/// Greedy Gilbert–Varshamov code of length `m` with pairwise ℓ1 distance at
/// least `min_l1_target` and at least `⌈2^{m/16}⌉` words.
///
/// Lengths up to [`LEXICODE_MAX_LEN`] use the lexicographic greedy code
/// (deterministic; `seed` is ignored). Longer codes draw words from a
/// ChaCha stream seeded with `seed` until the required size is reached.
pub fn gv_code(m: usize, min_l1_target: f64, seed: u64) -> Result<SignCode> {
    if m == 0 {
        return Err(Error::Parameter("code length must be >= 1".into()));
    }
    let min_h = (min_l1_target / 2.0).ceil().max(1.0) as usize;
    let need = SignCode::required_size(m);
    let code = if m <= LEXICODE_MAX_LEN {
        let mut words: Vec<u64> = Vec::new();
        for w in 0u64..1 << m {
            if words.len() >= LEXICODE_MAX_WORDS {
                break;
            }
            if words.iter().all(|&x| ((x ^ w).count_ones() as usize) >= min_h) {
                words.push(w);
            }
        }
        SignCode::certify(m, words.into_iter().map(|w| vec![w]).collect(), None)
    } else {
        if need > RANDOM_MAX_WORDS as f64 {
            return Err(Error::Size(format!(
                "a code of length {m} needs {need:e} words, beyond the limit of {RANDOM_MAX_WORDS}"
            )));
        }
        let need = need as usize;
        let mut r = rng(seed);
        let mut words: Vec<Vec<u64>> = Vec::with_capacity(need);
        let max_attempts = 1000 * need + 10_000;
        let mut attempts = 0;
        while words.len() < need && attempts < max_attempts {
            attempts += 1;
            let w = pack((0..m).map(|_| r.gen::<bool>()), m);
            if words.iter().all(|x| hamming(x, &w) >= min_h) {
                words.push(w);
            }
        }
        SignCode::certify(m, words, Some(seed))
    };
    if (code.len() as f64) < need || (code.len() >= 2 && (code.min_l1 as f64) < min_l1_target) {
        return Err(Error::Construction(format!(
            "code of length {m} has {} words at distance {}; need {need} at {min_l1_target} (retry with another seed)",
            code.len(),
            code.min_l1
        )));
    }
    Ok(code)
}
