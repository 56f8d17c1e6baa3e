//! Dual-resolution grids and orbitals expanded on them.
//!
//! Every grid index carries a scaling function `phi(x/h' - i) phi(y/h' - j) phi(z/h' - k)`.
//! Indices in the fine region additionally carry the seven tensor-product
//! wavelets, which lifts the local resolution from `h'` to `h = h'/2`. Basis
//! functions are scaled by `h'^{-3/2}` so the whole set is orthonormal and
//! orbital overlaps reduce to coefficient dot products.

use std::fmt::Write as _;

use super::cascade::DyadicFunctionTable;
use crate::error::{Error, Result};

/// Which of the seven wavelet products uses `psi` along x, y, z.
///
/// Bit 0 selects x, bit 1 y, bit 2 z; component `v` (1-based) is the bit
/// pattern `v`, so `v = 1` is `psi(x) phi(y) phi(z)` and `v = 7` is `psi psi psi`.
pub const WAVELET_COMPONENTS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Coarse,
    Fine,
    Outside,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualGrid {
    order: usize,
    coarse_spacing: f64,
    extents: [usize; 3],
    fine: Vec<[usize; 3]>,
    fine_slot: Vec<u32>,
}

const NOT_FINE: u32 = u32::MAX;

impl DualGrid {
    /// A grid of `extents` points at spacing `coarse_spacing` with the listed
    /// indices promoted to the fine region. Fine indices are deduplicated and sorted.
    pub fn new(
        order: usize,
        coarse_spacing: f64,
        extents: [usize; 3],
        fine_indices: impl IntoIterator<Item = [usize; 3]>,
    ) -> Result<Self> {
        if !(coarse_spacing > 0.0 && coarse_spacing.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "coarse spacing must be positive, got {coarse_spacing}"
            )));
        }
        if extents.iter().any(|&n| n == 0) {
            return Err(Error::InvalidGrid("empty extent".into()));
        }
        let mut fine: Vec<[usize; 3]> = fine_indices.into_iter().collect();
        for idx in &fine {
            if (0..3).any(|d| idx[d] >= extents[d]) {
                return Err(Error::InvalidGrid(format!(
                    "fine index {idx:?} outside extents {extents:?}"
                )));
            }
        }
        fine.sort_unstable();
        fine.dedup();
        let mut fine_slot = vec![NOT_FINE; extents.iter().product()];
        let mut grid = DualGrid {
            order,
            coarse_spacing,
            extents,
            fine: Vec::new(),
            fine_slot: Vec::new(),
        };
        for (slot, idx) in fine.iter().enumerate() {
            fine_slot[grid.linear(*idx)] = slot as u32;
        }
        grid.fine = fine;
        grid.fine_slot = fine_slot;
        Ok(grid)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coarse_spacing(&self) -> f64 {
        self.coarse_spacing
    }

    /// Effective resolution inside the fine region.
    pub fn fine_spacing(&self) -> f64 {
        self.coarse_spacing / 2.0
    }

    pub fn extents(&self) -> [usize; 3] {
        self.extents
    }

    pub fn n_points(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn fine_indices(&self) -> &[[usize; 3]] {
        &self.fine
    }

    pub fn classify(&self, idx: [i64; 3]) -> Region {
        if (0..3).any(|d| idx[d] < 0 || idx[d] as usize >= self.extents[d]) {
            return Region::Outside;
        }
        let u = [idx[0] as usize, idx[1] as usize, idx[2] as usize];
        if self.fine_slot[self.linear(u)] == NOT_FINE {
            Region::Coarse
        } else {
            Region::Fine
        }
    }

    fn linear(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.extents[1] + idx[1]) * self.extents[2] + idx[2]
    }

    fn fine_slot(&self, idx: [usize; 3]) -> Option<usize> {
        match self.fine_slot[self.linear(idx)] {
            NOT_FINE => None,
            s => Some(s as usize),
        }
    }

    /// Union of basis supports along dimension `d`, in length units.
    pub fn domain(&self, d: usize) -> (f64, f64) {
        let m = self.order as f64;
        let h = self.coarse_spacing;
        ((1.0 - m) * h, (self.extents[d] as f64 - 1.0 + m) * h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletMO {
    grid: DualGrid,
    scaling: Vec<f64>,
    wavelet: Vec<[f64; WAVELET_COMPONENTS]>,
}

/// Value returned by point synthesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Synthesis {
    pub value: f64,
    /// The point lay outside the computational domain; `value` is zero.
    pub outside: bool,
}

impl WaveletMO {
    pub fn zeros(grid: DualGrid) -> Self {
        let n = grid.n_points();
        let nf = grid.fine.len();
        WaveletMO {
            grid,
            scaling: vec![0.0; n],
            wavelet: vec![[0.0; WAVELET_COMPONENTS]; nf],
        }
    }

    pub fn grid(&self) -> &DualGrid {
        &self.grid
    }

    pub fn scaling(&self, idx: [usize; 3]) -> f64 {
        self.scaling[self.grid.linear(idx)]
    }

    pub fn set_scaling(&mut self, idx: [usize; 3], value: f64) -> Result<()> {
        if (0..3).any(|d| idx[d] >= self.grid.extents[d]) {
            return Err(Error::InvalidGrid(format!("index {idx:?} outside grid")));
        }
        let k = self.grid.linear(idx);
        self.scaling[k] = value;
        Ok(())
    }

    /// Wavelet coefficient `D^v` (v in 1..=7); zero outside the fine region.
    pub fn wavelet(&self, idx: [usize; 3], v: usize) -> f64 {
        match self.grid.fine_slot(idx) {
            Some(s) if (1..=WAVELET_COMPONENTS).contains(&v) => self.wavelet[s][v - 1],
            _ => 0.0,
        }
    }

    pub fn set_wavelet(&mut self, idx: [usize; 3], v: usize, value: f64) -> Result<()> {
        if !(1..=WAVELET_COMPONENTS).contains(&v) {
            return Err(Error::InvalidGrid(format!("wavelet component {v} not in 1..=7")));
        }
        if (0..3).any(|d| idx[d] >= self.grid.extents[d]) {
            return Err(Error::InvalidGrid(format!("index {idx:?} outside grid")));
        }
        let slot = self.grid.fine_slot(idx).ok_or_else(|| {
            Error::InvalidGrid(format!("wavelet coefficient at non-fine index {idx:?}"))
        })?;
        self.wavelet[slot][v - 1] = value;
        Ok(())
    }

    pub fn scaling_coefficients(&self) -> &[f64] {
        &self.scaling
    }

    /// Wavelet coefficients in the order of `grid().fine_indices()`.
    pub fn wavelet_coefficients(&self) -> &[[f64; WAVELET_COMPONENTS]] {
        &self.wavelet
    }

    pub fn norm_squared(&self) -> f64 {
        let s: f64 = self.scaling.iter().map(|c| c * c).sum();
        let d: f64 = self.wavelet.iter().flatten().map(|c| c * c).sum();
        s + d
    }

    pub fn normalize(&mut self) {
        let n = self.norm_squared().sqrt();
        if n > 0.0 {
            self.scaling.iter_mut().for_each(|c| *c /= n);
            self.wavelet.iter_mut().flatten().for_each(|c| *c /= n);
        }
    }

    /// Evaluate the orbital at `point`.
    pub fn synthesize(&self, table: &DyadicFunctionTable, point: [f64; 3]) -> Result<Synthesis> {
        if table.filter().order() != self.grid.order {
            return Err(Error::IncompatibleGrids);
        }
        for (d, &x) in point.iter().enumerate() {
            let (lo, hi) = self.grid.domain(d);
            if !(x >= lo && x <= hi) {
                log::warn!("synthesis point {point:?} outside the computational domain");
                return Ok(Synthesis {
                    value: 0.0,
                    outside: true,
                });
            }
        }
        let h = self.grid.coarse_spacing;
        let m = self.grid.order as i64;
        let u = [point[0] / h, point[1] / h, point[2] / h];
        // Candidate indices along each axis: u - i inside (1 - m, m).
        let mut axes: [Vec<(usize, f64, f64)>; 3] = Default::default();
        for d in 0..3 {
            let lo = (u[d] - m as f64).floor() as i64;
            let hi = (u[d] + m as f64).ceil() as i64;
            for i in lo.max(0)..=hi.min(self.grid.extents[d] as i64 - 1) {
                let t = u[d] - i as f64;
                let (p, q) = (table.phi(t), table.psi(t));
                if p != 0.0 || q != 0.0 {
                    axes[d].push((i as usize, p, q));
                }
            }
        }
        let mut value = 0.0;
        for &(i, px, qx) in &axes[0] {
            for &(j, py, qy) in &axes[1] {
                for &(k, pz, qz) in &axes[2] {
                    let idx = [i, j, k];
                    value += self.scaling(idx) * px * py * pz;
                    if let Some(slot) = self.grid.fine_slot(idx) {
                        let d = &self.wavelet[slot];
                        for (v, coeff) in d.iter().enumerate() {
                            if *coeff == 0.0 {
                                continue;
                            }
                            let bits = v + 1;
                            let fx = if bits & 1 != 0 { qx } else { px };
                            let fy = if bits & 2 != 0 { qy } else { py };
                            let fz = if bits & 4 != 0 { qz } else { pz };
                            value += coeff * fx * fy * fz;
                        }
                    }
                }
            }
        }
        Ok(Synthesis {
            value: value * h.powf(-1.5),
            outside: false,
        })
    }

    /// Serialize as the whitespace-delimited orbital text format.
    pub fn to_text(&self) -> String {
        let g = &self.grid;
        let mut out = String::new();
        let _ = writeln!(out, "wavelet-mo 1");
        let _ = writeln!(out, "order {}", g.order);
        let _ = writeln!(out, "coarse_spacing {:e}", g.coarse_spacing);
        let _ = writeln!(out, "fine_spacing {:e}", g.fine_spacing());
        let _ = writeln!(out, "extents {} {} {}", g.extents[0], g.extents[1], g.extents[2]);
        for f in &g.fine {
            let _ = writeln!(out, "F {} {} {}", f[0], f[1], f[2]);
        }
        for i in 0..g.extents[0] {
            for j in 0..g.extents[1] {
                for k in 0..g.extents[2] {
                    let c = self.scaling([i, j, k]);
                    if c != 0.0 {
                        let _ = writeln!(out, "S {i} {j} {k} {c:e}");
                    }
                }
            }
        }
        for (f, d) in g.fine.iter().zip(&self.wavelet) {
            for (v, c) in d.iter().enumerate() {
                if *c != 0.0 {
                    let _ = writeln!(out, "D {} {} {} {} {c:e}", f[0], f[1], f[2], v + 1);
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut order = None;
        let mut spacing = None;
        let mut extents = None;
        let mut fine = Vec::new();
        let mut records = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let toks: Vec<&str> = raw.split_whitespace().collect();
            let Some(&head) = toks.first() else { continue };
            let perr = |msg: &str| Error::Parse {
                line,
                msg: msg.to_string(),
            };
            let num = |s: &str| s.parse::<f64>().map_err(|_| perr(&format!("bad number {s:?}")));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| perr(&format!("bad index {s:?}")));
            match head {
                "wavelet-mo" => {}
                "order" => order = Some(idx(toks.get(1).ok_or_else(|| perr("missing order"))?)?),
                "coarse_spacing" => {
                    spacing = Some(num(toks.get(1).ok_or_else(|| perr("missing spacing"))?)?)
                }
                "fine_spacing" => {}
                "extents" if toks.len() == 4 => {
                    extents = Some([idx(toks[1])?, idx(toks[2])?, idx(toks[3])?])
                }
                "F" if toks.len() == 4 => fine.push([idx(toks[1])?, idx(toks[2])?, idx(toks[3])?]),
                "S" if toks.len() == 5 => records.push((
                    line,
                    [idx(toks[1])?, idx(toks[2])?, idx(toks[3])?],
                    0,
                    num(toks[4])?,
                )),
                "D" if toks.len() == 6 => records.push((
                    line,
                    [idx(toks[1])?, idx(toks[2])?, idx(toks[3])?],
                    idx(toks[4])?,
                    num(toks[5])?,
                )),
                _ => return Err(perr(&format!("unrecognized record {raw:?}"))),
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing header field {what}"),
        };
        let grid = DualGrid::new(
            order.ok_or_else(|| missing("order"))?,
            spacing.ok_or_else(|| missing("coarse_spacing"))?,
            extents.ok_or_else(|| missing("extents"))?,
            fine,
        )?;
        let mut mo = WaveletMO::zeros(grid);
        for (line, idx, v, value) in records {
            let res = if v == 0 {
                mo.set_scaling(idx, value)
            } else {
                mo.set_wavelet(idx, v, value)
            };
            res.map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        }
        Ok(mo)
    }
}

/// Overlap of two orbitals on the same grid.
pub fn mo_inner_product(a: &WaveletMO, b: &WaveletMO) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::IncompatibleGrids);
    }
    let s: f64 = a.scaling.iter().zip(&b.scaling).map(|(x, y)| x * y).sum();
    let d: f64 = a
        .wavelet
        .iter()
        .flatten()
        .zip(b.wavelet.iter().flatten())
        .map(|(x, y)| x * y)
        .sum();
    Ok(s + d)
}

/// Free-function form of [`WaveletMO::synthesize`].
pub fn synthesize_mo(
    mo: &WaveletMO,
    table: &DyadicFunctionTable,
    point: [f64; 3],
) -> Result<Synthesis> {
    mo.synthesize(table, point)
}
