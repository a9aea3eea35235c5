//! Generation parameters: the acoustic intervals each attribute level
//! maps to.

use serde::{Deserialize, Serialize};
use spam_core::{EnergyLevel, Gender, PitchLevel, SpeedLevel};

use crate::DatagenError;

/// A closed numeric interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

/// F0 intervals per pitch level for one gender.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchRanges {
    pub low: Interval,
    pub normal: Interval,
    pub high: Interval,
}

impl PitchRanges {
    fn get(&self, level: PitchLevel) -> Interval {
        match level {
            PitchLevel::Low => self.low,
            PitchLevel::Normal => self.normal,
            PitchLevel::High => self.high,
        }
    }

    fn all(&self) -> [Interval; 3] {
        [self.low, self.normal, self.high]
    }
}

/// Speaking-rate intervals (phonemes per second) per speed level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRanges {
    pub slow: Interval,
    pub normal: Interval,
    pub fast: Interval,
}

impl RateRanges {
    pub fn get(&self, level: SpeedLevel) -> Interval {
        match level {
            SpeedLevel::Slow => self.slow,
            SpeedLevel::Normal => self.normal,
            SpeedLevel::Fast => self.fast,
        }
    }

    fn all(&self) -> [Interval; 3] {
        [self.slow, self.normal, self.fast]
    }
}

/// Peak-amplitude intervals per energy level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRanges {
    pub low: Interval,
    pub normal: Interval,
    pub high: Interval,
}

impl AmplitudeRanges {
    pub fn get(&self, level: EnergyLevel) -> Interval {
        match level {
            EnergyLevel::Low => self.low,
            EnergyLevel::Normal => self.normal,
            EnergyLevel::High => self.high,
        }
    }

    fn all(&self) -> [Interval; 3] {
        [self.low, self.normal, self.high]
    }
}

/// Everything the corpus generator needs: item count, seed, and the
/// interval each attribute level realizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationSpec {
    pub n_items: usize,
    pub seed: u64,
    pub f0_ranges_hz_male: PitchRanges,
    pub f0_ranges_hz_female: PitchRanges,
    pub rate_ranges_pps: RateRanges,
    pub amplitude_ranges: AmplitudeRanges,
    pub duration_range_s: Interval,
}

impl Default for GenerationSpec {
    fn default() -> Self {
        GenerationSpec {
            n_items: 540,
            seed: 7,
            f0_ranges_hz_male: PitchRanges {
                low: Interval::new(80.0, 110.0),
                normal: Interval::new(110.0, 150.0),
                high: Interval::new(150.0, 200.0),
            },
            f0_ranges_hz_female: PitchRanges {
                low: Interval::new(150.0, 200.0),
                normal: Interval::new(200.0, 260.0),
                high: Interval::new(260.0, 350.0),
            },
            rate_ranges_pps: RateRanges {
                slow: Interval::new(2.0, 4.0),
                normal: Interval::new(4.0, 7.0),
                fast: Interval::new(7.0, 11.0),
            },
            amplitude_ranges: AmplitudeRanges {
                low: Interval::new(0.05, 0.1),
                normal: Interval::new(0.15, 0.3),
                high: Interval::new(0.4, 0.8),
            },
            duration_range_s: Interval::new(1.0, 3.0),
        }
    }
}

impl GenerationSpec {
    /// F0 interval for a (gender, pitch level) pair.
    pub fn f0_range(&self, gender: Gender, pitch: PitchLevel) -> Interval {
        match gender {
            Gender::Male => self.f0_ranges_hz_male.get(pitch),
            Gender::Female => self.f0_ranges_hz_female.get(pitch),
        }
    }

    /// Checks interval sanity: non-empty, non-overlapping across levels
    /// of the same attribute, F0 within [60, 400] Hz, positive rates and
    /// amplitudes within (0, 1].
    pub fn validate(&self) -> Result<(), DatagenError> {
        let named: [(&str, [Interval; 3]); 4] = [
            ("f0_ranges_hz_male", self.f0_ranges_hz_male.all()),
            ("f0_ranges_hz_female", self.f0_ranges_hz_female.all()),
            ("rate_ranges_pps", self.rate_ranges_pps.all()),
            ("amplitude_ranges", self.amplitude_ranges.all()),
        ];
        for (name, intervals) in &named {
            for iv in intervals {
                if !(iv.lo < iv.hi) {
                    return Err(DatagenError::BadSpec {
                        reason: format!("{name}: empty interval [{}, {}]", iv.lo, iv.hi),
                    });
                }
            }
            for i in 0..3 {
                for j in (i + 1)..3 {
                    if intervals[i].overlaps(&intervals[j]) {
                        return Err(DatagenError::BadSpec {
                            reason: format!("{name}: levels {i} and {j} overlap"),
                        });
                    }
                }
            }
        }
        for ranges in [&self.f0_ranges_hz_male, &self.f0_ranges_hz_female] {
            for iv in ranges.all() {
                if iv.lo < 60.0 || iv.hi > 400.0 {
                    return Err(DatagenError::BadSpec {
                        reason: format!("F0 interval [{}, {}] outside [60, 400] Hz", iv.lo, iv.hi),
                    });
                }
            }
        }
        for iv in self.rate_ranges_pps.all() {
            if iv.lo <= 0.0 {
                return Err(DatagenError::BadSpec {
                    reason: "rates must be positive".to_string(),
                });
            }
        }
        for iv in self.amplitude_ranges.all() {
            if iv.lo <= 0.0 || iv.hi > 1.0 {
                return Err(DatagenError::BadSpec {
                    reason: "amplitudes must lie in (0, 1]".to_string(),
                });
            }
        }
        if !(self.duration_range_s.lo > 0.0 && self.duration_range_s.lo < self.duration_range_s.hi)
        {
            return Err(DatagenError::BadSpec {
                reason: "duration range must be positive and non-empty".to_string(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_is_valid() {
        GenerationSpec::default().validate().unwrap();
    }

    #[test]
    fn overlapping_levels_are_rejected() {
        let mut spec = GenerationSpec::default();
        spec.rate_ranges_pps.normal = Interval::new(3.0, 8.0);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn f0_outside_bounds_is_rejected() {
        let mut spec = GenerationSpec::default();
        spec.f0_ranges_hz_female.high = Interval::new(260.0, 450.0);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn spec_roundtrips_through_json() {
        let spec = GenerationSpec::default();
        let json = serde_json::to_string_pretty(&spec).unwrap();
        let back: GenerationSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut value = serde_json::to_value(GenerationSpec::default()).unwrap();
        value["surprise"] = serde_json::json!(1);
        assert!(serde_json::from_value::<GenerationSpec>(value).is_err());
    }
}
