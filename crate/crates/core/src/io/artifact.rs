//! Binary artifact formats. All integers are little-endian.
//!
//! Every file is `magic[4] | version: u8 | payload | sha256[32]`, where the
//! trailing digest covers everything before it and doubles as the artifact's
//! fingerprint. Payloads, version 1:
//!
//! `SNNM` model:
//! `n_inputs u32 | n_neurons u32 | v_th v_reset v_rest leak_factor dt: f32 |
//! refractory_steps u32 | eta_pre eta_post mu trace_decay_pre
//! trace_decay_post wgh_max: f32 | inhibition_strength f32 | training_seed u64 |
//! weights u8[n_inputs * n_neurons] (row-major, input-major) |
//! labels u8[n_neurons] (0xff = unassigned)`
//!
//! `SNFM` fault map:
//! `rows u32 | cols u32 | bits_per_weight u8 | granularity u8 | fault_rate f64 |
//! seed u64 | n_runs u32 | runs (len u32, stuck0 u8, stuck1 u8)[n_runs] |
//! neuron op masks u8[cols]`. Runs cover the row-major synapse masks.
//! Op-mask bit k marks operation k of (increase, leak, reset, spike generation).
//!
//! `SNMP` mapping plan:
//! `strategy u8 | fault map fingerprint [32] | rows u32 | cols u32 |
//! n_inputs u32 | n_neurons u32 | n_excluded u32 | excluded u32[n_excluded] |
//! (pass u32, col u32)[n_neurons] | n_runs u32 | runs (len u32, rotation u8)[n_runs]`

use std::fmt;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fam::{MappingPlan, Placement, Rotation, Strategy};
use crate::fault::{CellFaultMask, CrossbarGeometry, FaultMap, NeuronGranularity, OpMask, BITS_PER_WEIGHT};
use crate::snn::{LifParams, SnnModel, StdpParams, WeightCode};

const VERSION: u8 = 1;
const MODEL_MAGIC: &[u8; 4] = b"SNNM";
const FAULT_MAP_MAGIC: &[u8; 4] = b"SNFM";
const PLAN_MAGIC: &[u8; 4] = b"SNMP";
const UNASSIGNED: u8 = 0xff;

/// SHA-256 content digest of an artifact.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    pub fn of(bytes: &[u8]) -> Self {
        Fingerprint(Sha256::digest(bytes).into())
    }

    /// First 16 hex digits, for logs and report columns.
    pub fn short(&self) -> String {
        self.to_string()[..16].to_string()
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", self.short())
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn new(magic: &[u8; 4]) -> Self {
        let mut buf = magic.to_vec();
        buf.push(VERSION);
        Writer(buf)
    }
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: usize) {
        self.0.extend_from_slice(&(v as u32).to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f32(&mut self, v: f32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn bytes(&mut self, v: &[u8]) {
        self.0.extend_from_slice(v);
    }
    fn finish(mut self) -> Vec<u8> {
        let digest = Fingerprint::of(&self.0);
        self.0.extend_from_slice(&digest.0);
        self.0
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    /// Checks magic, version and digest; positions after the version byte.
    fn open(bytes: &'a [u8], magic: &[u8; 4], what: &str) -> Result<Self> {
        if bytes.len() < 4 + 1 + 32 {
            return Err(Error::Format(format!("{what}: file too short")));
        }
        if &bytes[..4] != magic {
            return Err(Error::Format(format!("{what}: wrong magic {:?}", &bytes[..4])));
        }
        if bytes[4] != VERSION {
            return Err(Error::Format(format!("{what}: unsupported version {}", bytes[4])));
        }
        let (body, digest) = bytes.split_at(bytes.len() - 32);
        if Fingerprint::of(body).0 != digest {
            return Err(Error::Format(format!("{what}: checksum mismatch")));
        }
        Ok(Reader { buf: body, pos: 5 })
    }
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Format("unexpected end of artifact".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn done(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Format(format!(
                "{} trailing bytes in artifact",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn trailer(bytes: &[u8]) -> Fingerprint {
    Fingerprint(bytes[bytes.len() - 32..].try_into().unwrap())
}

pub fn encode_model(model: &SnnModel) -> Vec<u8> {
    let mut w = Writer::new(MODEL_MAGIC);
    w.u32(model.n_inputs());
    w.u32(model.n_neurons());
    let l = &model.lif;
    for v in [l.v_th, l.v_reset, l.v_rest, l.leak_factor, l.dt] {
        w.f32(v);
    }
    w.u32(l.refractory_steps as usize);
    let s = &model.stdp;
    for v in [s.eta_pre, s.eta_post, s.mu, s.trace_decay_pre, s.trace_decay_post, s.wgh_max] {
        w.f32(v);
    }
    w.f32(model.inhibition_strength);
    w.u64(model.training_seed);
    w.bytes(&model.weights().iter().map(|c| c.0).collect::<Vec<_>>());
    for label in &model.neuron_labels {
        w.u8(label.unwrap_or(UNASSIGNED));
    }
    w.finish()
}

pub fn decode_model(bytes: &[u8]) -> Result<SnnModel> {
    let mut r = Reader::open(bytes, MODEL_MAGIC, "model")?;
    let n_inputs = r.u32()?;
    let n_neurons = r.u32()?;
    let lif = LifParams {
        v_th: r.f32()?,
        v_reset: r.f32()?,
        v_rest: r.f32()?,
        leak_factor: r.f32()?,
        dt: r.f32()?,
        refractory_steps: r.u32()? as u32,
    };
    let stdp = StdpParams {
        eta_pre: r.f32()?,
        eta_post: r.f32()?,
        mu: r.f32()?,
        trace_decay_pre: r.f32()?,
        trace_decay_post: r.f32()?,
        wgh_max: r.f32()?,
    };
    let inhibition = r.f32()?;
    let seed = r.u64()?;
    let weights = r
        .take(n_inputs.checked_mul(n_neurons).ok_or_else(|| Error::Format("model too large".into()))?)?
        .iter()
        .map(|&b| WeightCode(b))
        .collect();
    let labels = r
        .take(n_neurons)?
        .iter()
        .map(|&b| match b {
            UNASSIGNED => Ok(None),
            l if (l as usize) < crate::snn::N_CLASSES => Ok(Some(l)),
            l => Err(Error::Format(format!("neuron label {l} out of range"))),
        })
        .collect::<Result<Vec<_>>>()?;
    r.done()?;
    let mut model = SnnModel::new(n_inputs, n_neurons, weights, lif, stdp, inhibition)?;
    model.neuron_labels = labels;
    model.training_seed = seed;
    Ok(model)
}

pub fn model_fingerprint(model: &SnnModel) -> Fingerprint {
    trailer(&encode_model(model))
}

pub fn encode_fault_map(map: &FaultMap) -> Vec<u8> {
    let g = map.geometry();
    let mut w = Writer::new(FAULT_MAP_MAGIC);
    w.u32(g.rows);
    w.u32(g.cols);
    w.u8(BITS_PER_WEIGHT);
    w.u8(map.granularity() as u8);
    w.f64(map.fault_rate());
    w.u64(map.seed());
    let runs = run_lengths(map.cell_masks());
    w.u32(runs.len());
    for (len, m) in runs {
        w.u32(len);
        w.u8(m.stuck0());
        w.u8(m.stuck1());
    }
    w.bytes(&map.neuron_ops().iter().map(|m| m.bits()).collect::<Vec<_>>());
    w.finish()
}

pub fn decode_fault_map(bytes: &[u8]) -> Result<FaultMap> {
    let mut r = Reader::open(bytes, FAULT_MAP_MAGIC, "fault map")?;
    let geometry = CrossbarGeometry::new(r.u32()?, r.u32()?)?;
    if r.u8()? != BITS_PER_WEIGHT {
        return Err(Error::Format("fault map: only 8-bit weights are supported".into()));
    }
    let granularity = match r.u8()? {
        0 => NeuronGranularity::PerNeuron,
        1 => NeuronGranularity::PerOperation,
        g => return Err(Error::Format(format!("fault map: unknown granularity {g}"))),
    };
    let rate = r.f64()?;
    let seed = r.u64()?;
    let n_runs = r.u32()?;
    let mut masks = Vec::with_capacity(geometry.synapses());
    for _ in 0..n_runs {
        let len = r.u32()?;
        let mask = CellFaultMask::new(r.u8()?, r.u8()?)?;
        if masks.len() + len > geometry.synapses() {
            return Err(Error::Format("fault map: mask runs overflow the crossbar".into()));
        }
        masks.extend(std::iter::repeat_n(mask, len));
    }
    let ops = r
        .take(geometry.cols)?
        .iter()
        .map(|&b| OpMask::from_bits(b))
        .collect::<Result<Vec<_>>>()?;
    r.done()?;
    FaultMap::from_parts(geometry, granularity, rate, seed, masks, ops)
}

impl FaultMap {
    /// Digest of the map's serialized form; plans record it to detect reuse
    /// against a different chip.
    pub fn fingerprint(&self) -> Fingerprint {
        trailer(&encode_fault_map(self))
    }
}

impl SnnModel {
    pub fn fingerprint(&self) -> Fingerprint {
        model_fingerprint(self)
    }
}

pub fn encode_plan(plan: &MappingPlan) -> Vec<u8> {
    let g = plan.geometry();
    let mut w = Writer::new(PLAN_MAGIC);
    w.u8(plan.strategy() as u8);
    w.bytes(&plan.fault_map_fingerprint().0);
    w.u32(g.rows);
    w.u32(g.cols);
    w.u32(plan.n_inputs());
    w.u32(plan.n_neurons());
    w.u32(plan.excluded().len());
    for &c in plan.excluded() {
        w.u32(c);
    }
    for p in plan.assignment() {
        w.u32(p.pass);
        w.u32(p.col);
    }
    let runs = run_lengths(plan.rotations());
    w.u32(runs.len());
    for (len, rot) in runs {
        w.u32(len);
        w.u8(rot.get());
    }
    w.finish()
}

pub fn decode_plan(bytes: &[u8]) -> Result<MappingPlan> {
    let mut r = Reader::open(bytes, PLAN_MAGIC, "plan")?;
    let strategy = Strategy::from_u8(r.u8()?)?;
    let fingerprint = Fingerprint(r.take(32)?.try_into().unwrap());
    let geometry = CrossbarGeometry::new(r.u32()?, r.u32()?)?;
    let n_inputs = r.u32()?;
    let n_neurons = r.u32()?;
    let n_excluded = r.u32()?;
    let excluded = (0..n_excluded).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let assignment = (0..n_neurons)
        .map(|_| Ok(Placement { pass: r.u32()?, col: r.u32()? }))
        .collect::<Result<Vec<_>>>()?;
    let n_runs = r.u32()?;
    let mut rotations = Vec::with_capacity(geometry.synapses());
    for _ in 0..n_runs {
        let len = r.u32()?;
        let rot = Rotation::new(r.u8()?).map_err(|e| Error::Format(e.to_string()))?;
        if rotations.len() + len > geometry.synapses() {
            return Err(Error::Format("plan: rotation runs overflow the crossbar".into()));
        }
        rotations.extend(std::iter::repeat_n(rot, len));
    }
    r.done()?;
    MappingPlan::from_parts(strategy, geometry, n_inputs, n_neurons, excluded, assignment, rotations, fingerprint)
}

fn run_lengths<T: Copy + PartialEq>(items: &[T]) -> Vec<(usize, T)> {
    let mut runs: Vec<(usize, T)> = Vec::new();
    for &item in items {
        match runs.last_mut() {
            Some((len, last)) if *last == item => *len += 1,
            _ => runs.push((1, item)),
        }
    }
    runs
}

pub fn save_model(model: &SnnModel, path: impl AsRef<Path>) -> Result<Fingerprint> {
    let bytes = encode_model(model);
    fs::write(path, &bytes)?;
    Ok(trailer(&bytes))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SnnModel> {
    decode_model(&fs::read(path)?)
}

pub fn save_fault_map(map: &FaultMap, path: impl AsRef<Path>) -> Result<Fingerprint> {
    let bytes = encode_fault_map(map);
    fs::write(path, &bytes)?;
    Ok(trailer(&bytes))
}

pub fn load_fault_map(path: impl AsRef<Path>) -> Result<FaultMap> {
    decode_fault_map(&fs::read(path)?)
}

pub fn save_plan(plan: &MappingPlan, path: impl AsRef<Path>) -> Result<Fingerprint> {
    let bytes = encode_plan(plan);
    fs::write(path, &bytes)?;
    Ok(trailer(&bytes))
}

/// Loads a plan and checks that it was built for `fault_map`.
pub fn load_plan(path: impl AsRef<Path>, fault_map: &FaultMap) -> Result<MappingPlan> {
    let plan = decode_plan(&fs::read(path)?)?;
    plan.check_against(fault_map)?;
    Ok(plan)
}

/// Human-readable listing of every faulty location.
pub fn dump_fault_map(map: &FaultMap) -> String {
    let g = map.geometry();
    let mut out = String::new();
    let _ = writeln!(out, "# fault map {}", map.fingerprint());
    let _ = writeln!(
        out,
        "# geometry {}x{} bits {} granularity {}",
        g.rows,
        g.cols,
        BITS_PER_WEIGHT,
        match map.granularity() {
            NeuronGranularity::PerNeuron => "per_neuron",
            NeuronGranularity::PerOperation => "per_operation",
        }
    );
    let _ = writeln!(
        out,
        "# rate {} seed {} faults {} / {} locations ({} stuck bits, {} neuron ops)",
        map.fault_rate(),
        map.seed(),
        map.fault_count(),
        map.total_locations(),
        map.stuck_bit_count(),
        map.faulty_neuron_op_count()
    );
    for row in 0..g.rows {
        for col in 0..g.cols {
            let m = map.mask(row, col);
            if !m.is_clean() {
                let _ = writeln!(
                    out,
                    "cell {row} {col} stuck0={:08b} stuck1={:08b}",
                    m.stuck0(),
                    m.stuck1()
                );
            }
        }
    }
    for col in 0..g.cols {
        let ops = map.neuron_ops()[col];
        if ops != OpMask::NONE {
            let _ = writeln!(out, "neuron {col} {} ops={:04b}", map.neuron_tag(col), ops.bits());
        }
    }
    out
}
