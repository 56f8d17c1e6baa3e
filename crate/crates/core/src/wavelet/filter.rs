//! Daubechies low-pass / high-pass filter pairs.
//!
//! Coefficients are the minimum-phase Daubechies filters with `order`
//! vanishing moments, produced once by spectral factorization in extended
//! precision and embedded here. They are stored with index `j = 1 - m ..= m`
//! so that the scaling function is supported on `[1 - m, m]`.

use crate::error::{Error, Result};

const DB2: [f64; 4] = [
    0.48296291314453414337,
    0.83651630373780790558,
    0.22414386804201338103,
    -0.12940952255126038117,
];

const DB4: [f64; 8] = [
    0.23037781330889650086,
    0.71484657055291564709,
    0.63088076792985890788,
    -0.027983769416859854211,
    -0.18703481171909308408,
    0.030841381835560763627,
    0.032883011666885199735,
    -0.010597401785069032105,
];

const DB8: [f64; 16] = [
    0.054415842243104009955,
    0.31287159091429997066,
    0.67563073629728980681,
    0.58535468365420671277,
    -0.015829105256349305667,
    -0.28401554296154692652,
    0.00047248457391328277036,
    0.12874742662047845886,
    -0.01736930100180754617,
    -0.044088253930794751507,
    0.013981027917398281649,
    0.0087460940474057767164,
    -0.0048703529934515743104,
    -0.0003917403733769470463,
    0.00067544940645056936637,
    -0.00011747678412476953373,
];

/// Default family order (16 coefficients).
pub const DEFAULT_ORDER: usize = 8;

/// Orders with embedded coefficient tables.
pub const SUPPORTED_ORDERS: [usize; 3] = [2, 4, 8];

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    order: usize,
    h: Vec<f64>,
    g: Vec<f64>,
}

impl WaveletFilter {
    /// Number of vanishing moments `m`; the filter has `2m` taps.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Lowest filter index, `1 - m`.
    pub fn first_index(&self) -> i64 {
        1 - self.order as i64
    }

    /// Highest filter index, `m`.
    pub fn last_index(&self) -> i64 {
        self.order as i64
    }

    /// Low-pass taps ordered from `first_index()` to `last_index()`.
    pub fn low_pass(&self) -> &[f64] {
        &self.h
    }

    /// High-pass taps ordered from `first_index()` to `last_index()`.
    pub fn high_pass(&self) -> &[f64] {
        &self.g
    }

    /// `h_j`, zero outside the filter support.
    pub fn h(&self, j: i64) -> f64 {
        self.tap(&self.h, j)
    }

    /// `g_j = (-1)^j h_{1-j}`, zero outside the filter support.
    pub fn g(&self, j: i64) -> f64 {
        self.tap(&self.g, j)
    }

    fn tap(&self, taps: &[f64], j: i64) -> f64 {
        let k = j - self.first_index();
        if k < 0 || k as usize >= taps.len() {
            0.0
        } else {
            taps[k as usize]
        }
    }

    /// Indices `j` over which the taps are defined.
    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.first_index()..=self.last_index()
    }
}

pub fn build_filter(order: usize) -> Result<WaveletFilter> {
    let h: Vec<f64> = match order {
        2 => DB2.to_vec(),
        4 => DB4.to_vec(),
        8 => DB8.to_vec(),
        other => return Err(Error::UnsupportedFilterOrder(other)),
    };
    let first = 1 - order as i64;
    let g = (first..=order as i64)
        .map(|j| {
            let src = 1 - j - first;
            let sign = if j.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * h[src as usize]
        })
        .collect();
    Ok(WaveletFilter { order, h, g })
}
