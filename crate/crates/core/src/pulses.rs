//! Piecewise-constant control sequences along `x` and the reference
//! sequences used for comparison: the zero pulse, `2π` and `π` pulses, CORPSE
//! for the identity and for NOT, short CORPSE, and CPMG blocks.
//!
//! All constructors use `a_max = 1`, so dimensionless time `t' = a_max·t`
//! coincides with `t`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Default control bound.
pub const A_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub amplitude: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PulseDocument")]
pub struct PulseSequence {
    segments: Vec<Segment>,
    a_max: f64,
}

#[derive(Deserialize)]
struct PulseDocument {
    segments: Vec<Segment>,
    #[serde(default = "default_a_max")]
    a_max: f64,
}

fn default_a_max() -> f64 {
    A_MAX
}

impl TryFrom<PulseDocument> for PulseSequence {
    type Error = Error;

    fn try_from(doc: PulseDocument) -> Result<Self> {
        PulseSequence::with_bound(doc.segments, doc.a_max)
    }
}

impl PulseSequence {
    /// Validated sequence with bound `a_max = 1`.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        Self::with_bound(segments, A_MAX)
    }

    pub fn with_bound(segments: Vec<Segment>, a_max: f64) -> Result<Self> {
        if !(a_max > 0.0 && a_max.is_finite()) {
            return Err(Error::InvalidPulse(format!("amplitude bound {a_max}")));
        }
        for (i, s) in segments.iter().enumerate() {
            if !s.amplitude.is_finite() || s.amplitude.abs() > a_max {
                return Err(Error::InvalidPulse(format!(
                    "segment {i}: amplitude {} outside [-{a_max}, {a_max}]",
                    s.amplitude
                )));
            }
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::InvalidPulse(format!(
                    "segment {i}: duration {} is not positive",
                    s.duration
                )));
            }
        }
        Ok(Self { segments, a_max })
    }

    /// `(amplitude, duration)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(amplitude, duration)| Segment {
                    amplitude,
                    duration,
                })
                .collect(),
        )
    }

    /// `n` equal segments spanning `total` with the given amplitudes.
    pub fn uniform(amplitudes: &[f64], total: f64, a_max: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidPulse("no amplitudes".into()));
        }
        let dt = total / amplitudes.len() as f64;
        Self::with_bound(
            amplitudes
                .iter()
                .map(|&amplitude| Segment {
                    amplitude,
                    duration: dt,
                })
                .collect(),
            a_max,
        )
    }

    /// Zero-duration sequence.
    pub fn empty() -> Self {
        Self {
            segments: Vec::new(),
            a_max: A_MAX,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.amplitude).collect()
    }

    /// Cumulative segment end times.
    pub fn boundaries(&self) -> Vec<f64> {
        self.segments
            .iter()
            .scan(0.0, |t, s| {
                *t += s.duration;
                Some(*t)
            })
            .collect()
    }

    /// Common segment duration, if all segments have the same length up to a
    /// relative `1e-12`.
    pub fn uniform_step(&self) -> Option<f64> {
        let first = self.segments.first()?.duration;
        self.segments
            .iter()
            .all(|s| (s.duration - first).abs() <= 1e-12 * first)
            .then_some(first)
    }

    /// Amplitudes on `n` equal segments spanning the same duration.
    ///
    /// Fails unless every boundary of `self` lies on the new grid (to a
    /// relative `1e-9`), so the result describes the same control exactly.
    pub fn resample_uniform(&self, n: usize) -> Result<Vec<f64>> {
        if n == 0 || self.is_empty() {
            return Err(Error::InvalidArgument("resampling needs segments".into()));
        }
        let total = self.duration();
        let step = total / n as f64;
        let mut out = Vec::with_capacity(n);
        let mut start = 0.0;
        for s in &self.segments {
            let end = start + s.duration;
            let cells = (end / step).round();
            if (cells * step - end).abs() > 1e-9 * total {
                return Err(Error::InvalidArgument(format!(
                    "boundary {end} is not a multiple of {step}"
                )));
            }
            while (out.len() as f64) < cells {
                out.push(s.amplitude);
            }
            start = end;
        }
        Ok(out)
    }

    /// Concatenation; the result keeps the larger of the two bounds.
    pub fn then(&self, other: &PulseSequence) -> PulseSequence {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        PulseSequence {
            segments,
            a_max: self.a_max.max(other.a_max),
        }
    }

    pub fn repeat(&self, n: usize) -> Result<PulseSequence> {
        if n == 0 {
            return Err(Error::InvalidArgument("repeat count must be at least 1".into()));
        }
        Ok(PulseSequence {
            segments: self.segments.repeat(n),
            a_max: self.a_max,
        })
    }

    /// Short human-readable descriptor.
    pub fn describe(&self) -> String {
        format!("{} segments, T={}", self.len(), self.duration())
    }

    /// CSV with header `t_start,t_end,amplitude`, one row per segment.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t_start", "t_end", "amplitude"])
            .map_err(csv_err)?;
        let mut t = 0.0;
        for s in &self.segments {
            let end = t + s.duration;
            w.write_record([t.to_string(), end.to_string(), s.amplitude.to_string()])
                .map_err(csv_err)?;
            t = end;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut segments = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::InvalidPulse(format!("missing column {i}")))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidPulse(e.to_string()))
            };
            let (start, end, amplitude) = (field(0)?, field(1)?, field(2)?);
            segments.push(Segment {
                amplitude,
                duration: end - start,
            });
        }
        Self::new(segments)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidPulse(e.to_string())
}

fn seq(pairs: &[(f64, f64)]) -> PulseSequence {
    PulseSequence::from_pairs(pairs).expect("reference sequence is valid")
}

/// No control for duration `total`.
pub fn zero_pulse(total: f64) -> Result<PulseSequence> {
    PulseSequence::from_pairs(&[(0.0, total)])
}

pub fn two_pi_pulse() -> PulseSequence {
    seq(&[(A_MAX, 2.0 * PI)])
}

pub fn pi_pulse() -> PulseSequence {
    seq(&[(A_MAX, PI)])
}

/// CORPSE identity: `+π, −2π, +π` rotations, total `4π`.
pub fn corpse_identity() -> PulseSequence {
    seq(&[(A_MAX, PI), (-A_MAX, 2.0 * PI), (A_MAX, PI)])
}

/// CORPSE NOT: boundaries at `t' = π/3, 2π, 13π/3`.
pub fn corpse_not() -> PulseSequence {
    seq(&[
        (A_MAX, PI / 3.0),
        (-A_MAX, 5.0 * PI / 3.0),
        (A_MAX, 7.0 * PI / 3.0),
    ])
}

/// Short CORPSE NOT: boundaries at `t' = π/3, 2π, 7π/3`.
pub fn short_corpse_not() -> PulseSequence {
    seq(&[
        (-A_MAX, PI / 3.0),
        (A_MAX, 5.0 * PI / 3.0),
        (-A_MAX, PI / 3.0),
    ])
}

/// One CPMG block `[π/2 | gap t_p | π | gap t_p | π/2]`, duration `2π + 2t_p`.
pub fn cpmg_block(gap: f64) -> Result<PulseSequence> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::InvalidArgument(format!("CPMG gap {gap}")));
    }
    PulseSequence::from_pairs(&[
        (A_MAX, PI / 2.0),
        (0.0, gap),
        (A_MAX, PI),
        (0.0, gap),
        (A_MAX, PI / 2.0),
    ])
}

pub fn repeat(sequence: &PulseSequence, n: usize) -> Result<PulseSequence> {
    sequence.repeat(n)
}

/// `n_segments` equal segments with amplitudes i.i.d. uniform on
/// `[−max_amp, max_amp]`.
pub fn uniform_random_pulse(
    total: f64,
    n_segments: usize,
    seed: u64,
    max_amp: f64,
) -> Result<PulseSequence> {
    if n_segments == 0 {
        return Err(Error::InvalidArgument("need at least one segment".into()));
    }
    if !(0.0..=A_MAX).contains(&max_amp) {
        return Err(Error::InvalidArgument(format!(
            "max_amp {max_amp} outside [0, {A_MAX}]"
        )));
    }
    let mut rng = seed::rng(seed);
    let amps: Vec<f64> = (0..n_segments)
        .map(|_| {
            if max_amp == 0.0 {
                0.0
            } else {
                rng.random_range(-max_amp..=max_amp)
            }
        })
        .collect();
    PulseSequence::uniform(&amps, total, A_MAX)
}
