//! Monte Carlo run of the cryptosystem: Alice encrypts a uniform bit under a
//! key drawn from `d`, Bob decrypts with the key, and Eve measures the
//! ciphertext along a fixed axis. The channel is noiseless.

use rayon::prelude::*;

use crate::bloch::{fidelity, PureQubit};
use crate::codes::QubitCode;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sources::{KeyDistribution, KeySampler};

pub const STATS_CSV_HEADER: &str = "trials,eve_correct,estimated_p,std_error";

const TRIAL_CHUNK: u64 = 8192;
const DECRYPT_TOL: f64 = 1e-9;

fn key_state(code: &QubitCode, k: usize) -> Result<&PureQubit> {
    code.state(k).ok_or_else(|| Error::domain(format!("key {k} out of range for {} keys", code.len())))
}

/// Bit 0 ↦ `|ψ_k⟩`, bit 1 ↦ its antipode.
pub fn encrypt(code: &QubitCode, k: usize, bit: u8) -> Result<PureQubit> {
    let s = key_state(code, k)?;
    match bit {
        0 => Ok(*s),
        1 => Ok(s.antipode()),
        b => Err(Error::domain(format!("plaintext bit must be 0 or 1, got {b}"))),
    }
}

/// Projective measurement in the key's basis.
pub fn decrypt(code: &QubitCode, k: usize, state: &PureQubit) -> Result<u8> {
    let s = key_state(code, k)?;
    let overlap = s.bloch().dot(state.bloch());
    if (overlap - 1.0).abs() <= DECRYPT_TOL {
        Ok(0)
    } else if (overlap + 1.0).abs() <= DECRYPT_TOL {
        Ok(1)
    } else {
        Err(Error::Integrity(format!("ciphertext is not a valid encryption under key {k} (overlap {overlap})")))
    }
}

/// Two-outcome measurement along `axis`; outcome 0 with probability
/// `F(state, axis)`.
pub fn eve_guess(state: &PureQubit, axis: &PureQubit, rng: &mut RngStream) -> u8 {
    if rng.uniform() < fidelity(state, axis) {
        0
    } else {
        1
    }
}

/// Exact success probability of measuring along `axis`:
/// `Σ_k d_k F(ψ_k, axis)` (both plaintexts contribute the same term).
pub fn analytic_success(code: &QubitCode, d: &KeyDistribution, axis: &PureQubit) -> Result<f64> {
    if code.len() != d.len() {
        return Err(Error::SizeMismatch { expected: code.len(), actual: d.len() });
    }
    Ok(d.probs().iter().zip(code.states()).map(|(w, s)| w * fidelity(s, axis)).sum())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TranscriptStats {
    pub trials: u64,
    pub bob_correct: u64,
    pub eve_correct: u64,
    pub estimated_p: f64,
    pub std_error: f64,
}

impl TranscriptStats {
    fn from_counts(trials: u64, bob_correct: u64, eve_correct: u64) -> Self {
        let p = eve_correct as f64 / trials as f64;
        TranscriptStats {
            trials,
            bob_correct,
            eve_correct,
            estimated_p: p,
            std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.trials, self.eve_correct, self.estimated_p, self.std_error)
    }
}

pub fn run_protocol(
    code: &QubitCode,
    d: &KeyDistribution,
    axis: &PureQubit,
    trials: u64,
    rng: &RngStream,
) -> Result<TranscriptStats> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    if code.len() != d.len() {
        return Err(Error::SizeMismatch { expected: code.len(), actual: d.len() });
    }
    let sampler = KeySampler::new(d);
    let base = rng.split(0);
    let chunks = trials.div_ceil(TRIAL_CHUNK);
    let (bob, eve) = (0..chunks)
        .into_par_iter()
        .map(|ci| -> Result<(u64, u64)> {
            let mut stream = base.split(ci);
            let count = TRIAL_CHUNK.min(trials - ci * TRIAL_CHUNK);
            let (mut bob, mut eve) = (0u64, 0u64);
            for _ in 0..count {
                let bit = stream.bit();
                let k = sampler.sample(&mut stream);
                let ciphertext = encrypt(code, k, bit)?;
                if decrypt(code, k, &ciphertext)? == bit {
                    bob += 1;
                }
                if eve_guess(&ciphertext, axis, &mut stream) == bit {
                    eve += 1;
                }
            }
            Ok((bob, eve))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(TranscriptStats::from_counts(trials, bob, eve))
}
