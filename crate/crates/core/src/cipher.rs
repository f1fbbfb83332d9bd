//! Additive stream cipher over a small alphabet, keyed either by explicit
//! keys, a seeded PRNG, or samples of a (synchronized) chaotic trajectory.
//!
//! ```text
//! c_i = (p_i + k_i) mod m
//! p_i = (c_i - k_i) mod m
//! ```
//!
//! Only `k_i mod m` matters. The scheme is a Vigenère-style teaching cipher
//! and makes no security claims.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

/// Scale applied to `|z|` before flooring it into a key.
pub const DEFAULT_KEY_SCALE: f64 = 1e6;

/// Upper bound (exclusive) of keys drawn from the seeded PRNG.
const PRNG_KEY_BOUND: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Codec {
    /// Digits 0-9 -> 0-9, `a`..`y` -> 11..35, `z` -> 10.
    Paper36,
    /// Digits 0-9 -> 0-9, `a`..`z` -> 10..35.
    Base36,
    /// 7-bit ASCII, code = byte value, m = 128.
    Ascii128,
}

impl Codec {
    pub const ALL: [Codec; 3] = [Codec::Paper36, Codec::Base36, Codec::Ascii128];

    pub fn name(self) -> &'static str {
        match self {
            Codec::Paper36 => "paper36",
            Codec::Base36 => "base36",
            Codec::Ascii128 => "ascii128",
        }
    }

    pub fn modulus(self) -> u64 {
        match self {
            Codec::Paper36 | Codec::Base36 => 36,
            Codec::Ascii128 => 128,
        }
    }

    pub fn encode(self, c: char) -> Option<u64> {
        match self {
            Codec::Ascii128 => c.is_ascii().then_some(c as u64),
            Codec::Base36 => c.to_digit(36).filter(|_| !c.is_ascii_uppercase()).map(u64::from),
            Codec::Paper36 => match c {
                '0'..='9' => Some(c as u64 - '0' as u64),
                'z' => Some(10),
                'a'..='y' => Some(c as u64 - 'a' as u64 + 11),
                _ => None,
            },
        }
    }

    pub fn decode(self, code: u64) -> Option<char> {
        match self {
            Codec::Ascii128 => (code < 128).then(|| code as u8 as char),
            Codec::Base36 => (code < 36)
                .then(|| char::from_digit(code as u32, 36))
                .flatten(),
            Codec::Paper36 => match code {
                0..=9 => char::from_digit(code as u32, 10),
                10 => Some('z'),
                11..=35 => Some((b'a' + (code - 11) as u8) as char),
                _ => None,
            },
        }
    }

    /// Every symbol the codec can represent.
    pub fn symbols(self) -> Vec<char> {
        (0..self.modulus()).filter_map(|c| self.decode(c)).collect()
    }

    pub fn default_normalization(self) -> Normalization {
        match self {
            Codec::Paper36 | Codec::Base36 => Normalization::AlnumLowercase,
            Codec::Ascii128 => Normalization::Verbatim,
        }
    }
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Codec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Codec::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown codec {s:?} (expected paper36, base36 or ascii128)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Lowercase, then drop everything that is not alphanumeric
    /// ("Hello Oscar" -> "hellooscar").
    AlnumLowercase,
    Verbatim,
}

impl Normalization {
    pub fn apply(self, text: &str) -> String {
        match self {
            Normalization::AlnumLowercase => text
                .chars()
                .flat_map(char::to_lowercase)
                .filter(|c| c.is_alphanumeric())
                .collect(),
            Normalization::Verbatim => text.to_string(),
        }
    }
}

/// `k_i = floor(|z[t0 + i]| * scale)` for `i = 1..=count`.
pub fn derive_keys_from_trajectory(
    z: &[f64],
    t0_index: usize,
    count: usize,
    scale: f64,
) -> Result<Vec<u64>> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("key scale must be positive, got {scale}")));
    }
    if t0_index + count >= z.len() {
        return Err(Error::Domain(format!(
            "series of {} samples is too short for {count} keys after index {t0_index}",
            z.len()
        )));
    }
    z[t0_index + 1..=t0_index + count]
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let scaled = (v.abs() * scale).floor();
            if !scaled.is_finite() || scaled >= u64::MAX as f64 {
                Err(Error::Domain(format!(
                    "sample {} ({v}) cannot be turned into a key",
                    t0_index + 1 + i
                )))
            } else {
                Ok(scaled as u64)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum KeySource {
    Explicit(Vec<u64>),
    SeededPrng(u64),
    /// Keys from samples after `t0_index` of a trajectory component.
    Trajectory {
        z: Vec<f64>,
        t0_index: usize,
        scale: f64,
    },
}

impl KeySource {
    /// The first `count` keys. Deterministic for a given source.
    pub fn keys(&self, count: usize) -> Result<Vec<u64>> {
        match self {
            KeySource::Explicit(keys) => {
                if keys.len() < count {
                    return Err(Error::KeyExhausted {
                        needed: count,
                        available: keys.len(),
                    });
                }
                Ok(keys[..count].to_vec())
            }
            KeySource::SeededPrng(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..count).map(|_| rng.gen_range(0..PRNG_KEY_BOUND)).collect())
            }
            KeySource::Trajectory { z, t0_index, scale } => {
                let available = z.len().saturating_sub(t0_index + 1);
                if count > available {
                    return Err(Error::KeyExhausted {
                        needed: count,
                        available,
                    });
                }
                derive_keys_from_trajectory(z, *t0_index, count, *scale)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CipherSession {
    pub codec: Codec,
    pub keys: KeySource,
    pub normalization: Normalization,
}

impl CipherSession {
    /// Session with the codec's default normalization.
    pub fn new(codec: Codec, keys: KeySource) -> Self {
        Self {
            codec,
            keys,
            normalization: codec.default_normalization(),
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn normalize(&self, text: &str) -> String {
        self.normalization.apply(text)
    }

    pub fn encrypt(&self, plaintext: &str) -> Result<Vec<u64>> {
        let normalized = self.normalize(plaintext);
        let codes = normalized
            .chars()
            .enumerate()
            .map(|(position, symbol)| {
                self.codec.encode(symbol).ok_or(Error::Encoding {
                    symbol,
                    position,
                    codec: self.codec.name(),
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        let keys = self.keys.keys(codes.len())?;
        let m = self.codec.modulus();
        Ok(codes
            .iter()
            .zip(&keys)
            .map(|(p, k)| (p + k % m) % m)
            .collect())
    }

    pub fn decrypt(&self, ciphertext: &[u64]) -> Result<String> {
        let m = self.codec.modulus();
        if let Some((position, &code)) = ciphertext.iter().enumerate().find(|(_, c)| **c >= m) {
            return Err(Error::Decoding {
                code,
                position,
                modulus: m,
            });
        }
        let keys = self.keys.keys(ciphertext.len())?;
        Ok(ciphertext
            .iter()
            .zip(&keys)
            .map(|(c, k)| {
                let p = (c + m - k % m) % m;
                self.codec.decode(p).expect("every residue decodes")
            })
            .collect())
    }
}

/// Comparison of the keys two parties derive from their own trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyAgreementReport {
    pub count: usize,
    /// Zero-based key positions whose residues differ.
    pub mismatched: Vec<usize>,
    /// Smallest `dist(sender_scaled, integer grid) - |sender_scaled - receiver_scaled|`.
    /// Negative values mean the floors may disagree.
    pub min_margin: f64,
}

impl KeyAgreementReport {
    pub fn passes(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Quantization-margin check between sender and receiver key material.
pub fn key_agreement(
    sender_z: &[f64],
    receiver_z: &[f64],
    t0_index: usize,
    count: usize,
    scale: f64,
    modulus: u64,
) -> Result<KeyAgreementReport> {
    let ks = derive_keys_from_trajectory(sender_z, t0_index, count, scale)?;
    let kr = derive_keys_from_trajectory(receiver_z, t0_index, count, scale)?;
    let mismatched = ks
        .iter()
        .zip(&kr)
        .enumerate()
        .filter(|(_, (a, b))| *a % modulus != *b % modulus)
        .map(|(i, _)| i)
        .collect();
    let min_margin = (1..=count)
        .map(|i| {
            let s = sender_z[t0_index + i].abs() * scale;
            let r = receiver_z[t0_index + i].abs() * scale;
            let frac = s - s.floor();
            frac.min(1.0 - frac) - (s - r).abs()
        })
        .fold(f64::INFINITY, f64::min);
    Ok(KeyAgreementReport {
        count,
        mismatched,
        min_margin,
    })
}

/// One message sent over a trajectory-keyed channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub ciphertext: Vec<u64>,
    /// `None` when the key check failed; the receiver refuses to decode
    /// rather than emit corrupted text.
    pub recovered: Option<String>,
    pub agreement: KeyAgreementReport,
}

/// Encrypts `message` with keys from `sender_z` and decrypts it with keys
/// from `receiver_z`, both taken after `t0_index`.
pub fn transmit(
    codec: Codec,
    message: &str,
    sender_z: &[f64],
    receiver_z: &[f64],
    t0_index: usize,
    scale: f64,
) -> Result<Transmission> {
    let source = |z: &[f64]| KeySource::Trajectory {
        z: z.to_vec(),
        t0_index,
        scale,
    };
    let sender = CipherSession::new(codec, source(sender_z));
    let receiver = CipherSession::new(codec, source(receiver_z));
    let ciphertext = sender.encrypt(message)?;
    let agreement = key_agreement(
        sender_z,
        receiver_z,
        t0_index,
        ciphertext.len(),
        scale,
        codec.modulus(),
    )?;
    let recovered = if agreement.passes() {
        Some(receiver.decrypt(&ciphertext)?)
    } else {
        None
    };
    Ok(Transmission {
        ciphertext,
        recovered,
        agreement,
    })
}
