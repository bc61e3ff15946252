//! Samplers for `W = (A, B) ∈ C²`.
//!
//! `sample_invariant` draws from any invariant measure by sampling the four
//! hyperspherical coordinates independently: `|W|` by inverting its CDF,
//! `ψ = arcsin √u` (CDF `sin²ψ`), and `φ`, `θ` uniform. `sample_gaussian_direct`
//! draws four independent N(0, 1) reals and is used to cross-check the
//! Gaussian profile along a separate path.
//!
//! # Random streams
//!
//! Draws come from ChaCha20 ([`GENERATOR`]). A batch of `n` points is cut
//! into chunks of [`CHUNK_SIZE`]; chunk `k` uses the generator seeded with
//! the batch seed and set to stream `k` (see [`substream`]). The output is
//! therefore a function of `(seed, n)` alone, whatever the number of worker
//! threads.

use std::f64::consts::TAU;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::coords::{CartesianPoint, HopfPoint};
use crate::fmt17;
use crate::measure::InvariantMeasure;

/// Name and version of the random stream; part of the batch format.
pub const GENERATOR: &str = "chacha20-substream-v1";

/// Points per sub-stream.
pub const CHUNK_SIZE: usize = 1 << 16;

pub const GAUSSIAN_DIRECT_ID: &str = "gaussian-direct";

/// Generator for chunk `index` of the batch seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub points: Vec<CartesianPoint>,
    pub seed: u64,
    pub profile_id: String,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with header `x,y,u,v`, 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(out);
        write_csv_header(&mut out)?;
        write_csv_rows(&mut out, &self.points)?;
        out.flush()
    }
}

pub fn write_csv_header<W: Write>(out: &mut W) -> std::io::Result<()> {
    writeln!(out, "x,y,u,v")
}

pub fn write_csv_rows<W: Write>(out: &mut W, points: &[CartesianPoint]) -> std::io::Result<()> {
    for p in points {
        writeln!(out, "{},{},{},{}", fmt17(p.x), fmt17(p.y), fmt17(p.u), fmt17(p.v))?;
    }
    Ok(())
}

pub fn write_json_rows<W: Write>(out: &mut W, points: &[CartesianPoint]) -> std::io::Result<()> {
    for p in points {
        writeln!(
            out,
            "{{\"x\":{},\"y\":{},\"u\":{},\"v\":{}}}",
            fmt17(p.x),
            fmt17(p.y),
            fmt17(p.u),
            fmt17(p.v)
        )?;
    }
    Ok(())
}

fn chunk_lengths(n: usize) -> impl Iterator<Item = (u64, usize)> {
    let chunks = n.div_ceil(CHUNK_SIZE);
    (0..chunks).map(move |k| (k as u64, CHUNK_SIZE.min(n - k * CHUNK_SIZE)))
}

/// One draw from `m` using four uniforms.
pub fn draw_invariant<R: Rng + ?Sized>(m: &InvariantMeasure, rng: &mut R) -> CartesianPoint {
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let u3: f64 = rng.random();
        let u4: f64 = rng.random();
        let l = m.profile().abs_quantile(u1);
        if l <= 0.0 {
            continue;
        }
        let psi = u2.sqrt().asin();
        let h = HopfPoint::new(l, psi, TAU * u3, TAU * u4).expect("sampled coordinates are in range");
        return h.to_cartesian();
    }
}

/// One draw of four independent standard normals.
pub fn draw_gaussian<R: Rng + ?Sized>(rng: &mut R) -> CartesianPoint {
    loop {
        let p = CartesianPoint::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if !p.is_origin() {
            return p;
        }
    }
}

fn invariant_chunk(m: &InvariantMeasure, seed: u64, index: u64, len: usize) -> Vec<CartesianPoint> {
    let mut rng = substream(seed, index);
    (0..len).map(|_| draw_invariant(m, &mut rng)).collect()
}

fn gaussian_chunk(seed: u64, index: u64, len: usize) -> Vec<CartesianPoint> {
    let mut rng = substream(seed, index);
    (0..len).map(|_| draw_gaussian(&mut rng)).collect()
}

/// `n` i.i.d. draws from `m`, generated in parallel over sub-streams.
pub fn sample_invariant(m: &InvariantMeasure, n: usize, seed: u64) -> SampleBatch {
    let chunks: Vec<(u64, usize)> = chunk_lengths(n).collect();
    let parts: Vec<Vec<CartesianPoint>> =
        chunks.par_iter().map(|&(k, len)| invariant_chunk(m, seed, k, len)).collect();
    SampleBatch { points: parts.concat(), seed, profile_id: m.profile().profile().to_string() }
}

/// Same draws as [`sample_invariant`], produced one chunk at a time.
pub fn invariant_chunks(m: &InvariantMeasure, n: usize, seed: u64) -> impl Iterator<Item = Vec<CartesianPoint>> + '_ {
    chunk_lengths(n).map(move |(k, len)| invariant_chunk(m, seed, k, len))
}

/// `n` points with four independent N(0, 1) coordinates.
pub fn sample_gaussian_direct(n: usize, seed: u64) -> SampleBatch {
    let chunks: Vec<(u64, usize)> = chunk_lengths(n).collect();
    let parts: Vec<Vec<CartesianPoint>> =
        chunks.par_iter().map(|&(k, len)| gaussian_chunk(seed, k, len)).collect();
    SampleBatch { points: parts.concat(), seed, profile_id: GAUSSIAN_DIRECT_ID.to_string() }
}

pub fn gaussian_chunks(n: usize, seed: u64) -> impl Iterator<Item = Vec<CartesianPoint>> {
    chunk_lengths(n).map(move |(k, len)| gaussian_chunk(seed, k, len))
}
