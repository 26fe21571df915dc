//! Gray-mapped QAM constellation with hard-decision demapping.

use num_complex::Complex64;

use crate::error::{Result, ZakOtfsError};

/// A unit-average-energy constellation with an attached bit labeling.
#[derive(Debug, Clone)]
pub struct Constellation {
    points: Vec<Complex64>,
    bits_per_symbol: usize,
}

impl Constellation {
    /// Gray-mapped 4-QAM with unit average symbol energy. Bits `(b0, b1)`
    /// map to `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`, so the in-phase and
    /// quadrature bits are independent and geometric neighbors differ in
    /// exactly one bit.
    pub fn qam4() -> Self {
        let r = 1.0 / 2f64.sqrt();
        let points = (0..4)
            .map(|i| {
                let b0 = (i >> 1) & 1;
                let b1 = i & 1;
                Complex64::new(
                    (1.0 - 2.0 * b0 as f64) * r,
                    (1.0 - 2.0 * b1 as f64) * r,
                )
            })
            .collect();
        Self {
            points,
            bits_per_symbol: 2,
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Maps a bit string (one bit per byte, values 0/1) to symbols.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        if bits.len() % self.bits_per_symbol != 0 {
            return Err(ZakOtfsError::DimensionMismatch {
                expected: format!("multiple of {}", self.bits_per_symbol),
                got: format!("{}", bits.len()),
            });
        }
        Ok(bits
            .chunks(self.bits_per_symbol)
            .map(|chunk| {
                let mut idx = 0usize;
                for &b in chunk {
                    idx = (idx << 1) | (b as usize & 1);
                }
                self.points[idx]
            })
            .collect())
    }

    /// Nearest-point hard decision; ties resolve to the lowest index.
    pub fn decide(&self, x: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (x - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Expands symbol indices back to bits; exact inverse of `map_bits`.
    pub fn demap(&self, indices: &[usize]) -> Vec<u8> {
        let mut bits = Vec::with_capacity(indices.len() * self.bits_per_symbol);
        for &idx in indices {
            for pos in (0..self.bits_per_symbol).rev() {
                bits.push(((idx >> pos) & 1) as u8);
            }
        }
        bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_demap_round_trip_exhaustive() {
        let c = Constellation::qam4();
        for pattern in 0..16u8 {
            let bits: Vec<u8> = (0..4).rev().map(|i| (pattern >> i) & 1).collect();
            let syms = c.map_bits(&bits).unwrap();
            let idx: Vec<usize> = syms.iter().map(|&s| c.decide(s)).collect();
            assert_eq!(c.demap(&idx), bits);
        }
    }

    #[test]
    fn unit_average_energy() {
        let c = Constellation::qam4();
        let e: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / c.len() as f64;
        assert!((e - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gray_neighbors_differ_in_one_bit() {
        let c = Constellation::qam4();
        let min_d = {
            let mut d = f64::INFINITY;
            for i in 0..c.len() {
                for j in 0..i {
                    d = d.min((c.points()[i] - c.points()[j]).norm());
                }
            }
            d
        };
        for i in 0..c.len() {
            for j in 0..i {
                if ((c.points()[i] - c.points()[j]).norm() - min_d).abs() < 1e-12 {
                    assert_eq!((i ^ j).count_ones(), 1, "neighbors {i},{j}");
                }
            }
        }
    }

    #[test]
    fn tie_breaks_to_lowest_index() {
        let c = Constellation::qam4();
        // The origin is equidistant from all four points.
        assert_eq!(c.decide(Complex64::new(0.0, 0.0)), 0);
    }

    #[test]
    fn rejects_odd_bit_count() {
        let c = Constellation::qam4();
        assert!(c.map_bits(&[1, 0, 1]).is_err());
    }
}
