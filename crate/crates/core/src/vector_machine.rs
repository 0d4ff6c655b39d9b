//! Abstract vector execution model.
//!
//! A [`VectorContext`] does no arithmetic of its own. Kernels compute their
//! results on ordinary slices and report every instruction they would issue
//! on a vector core here; the context turns that instruction trace into a
//! deterministic cycle count.
//!
//! Cost model (throughput only, no chaining or stalls):
//!
//! | instruction        | cycles (vl > 0)                                       |
//! |--------------------|-------------------------------------------------------|
//! | `set_vl`           | 1 (scalar)                                            |
//! | arithmetic         | `overhead + ceil(vl / lanes)`                         |
//! | unit-stride memory | `overhead + ceil(vl / lanes)`                         |
//! | strided memory     | `overhead + strided_factor * ceil(vl / lanes)`        |
//! | reduction          | `overhead + ceil(vl / lanes) + ceil(log2(lanes))`     |
//! | scalar             | 1 per instruction                                     |
//!
//! Vector instructions with `vl == 0` cost nothing and are not counted.

use thiserror::Error;

/// Element width. Only 64-bit elements are modelled.
pub const SEW_BITS: u32 = 64;

/// VLEN values swept by the benchmark presets.
pub const PRESET_VLENS: [u32; 4] = [512, 1024, 2048, 4096];

/// Lane counts swept by the benchmark presets.
pub const PRESET_LANES: [u32; 4] = [2, 4, 8, 16];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("invalid vector configuration: {0}")]
    InvalidConfig(String),
    #[error("vl {vl} exceeds vlmax {vlmax}")]
    VlExceedsVlmax { vl: usize, vlmax: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    /// Fused multiply-accumulate (any sign variant).
    Macc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemKind {
    LoadUnit,
    StoreUnit,
    LoadStrided,
    StoreStrided,
}

impl MemKind {
    pub fn is_strided(self) -> bool {
        matches!(self, MemKind::LoadStrided | MemKind::StoreStrided)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VectorConfig {
    pub vlen_bits: u32,
    pub lanes: u32,
    pub sew_bits: u32,
    pub issue_overhead_cycles: u64,
    pub strided_mem_factor: u64,
}

impl VectorConfig {
    /// Config with default overheads (1 issue cycle, strided factor 2).
    pub fn new(vlen_bits: u32, lanes: u32) -> Result<Self, MachineError> {
        Self::with_costs(vlen_bits, lanes, 1, 2)
    }

    pub fn with_costs(
        vlen_bits: u32,
        lanes: u32,
        issue_overhead_cycles: u64,
        strided_mem_factor: u64,
    ) -> Result<Self, MachineError> {
        let cfg = Self { vlen_bits, lanes, sew_bits: SEW_BITS, issue_overhead_cycles, strided_mem_factor };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), MachineError> {
        let bad = |msg: String| Err(MachineError::InvalidConfig(msg));
        if self.sew_bits != SEW_BITS {
            return bad(format!("sew_bits must be {SEW_BITS}, got {}", self.sew_bits));
        }
        if self.vlen_bits < self.sew_bits
            || !self.vlen_bits.is_multiple_of(self.sew_bits)
            || !(self.vlen_bits / self.sew_bits).is_power_of_two()
        {
            return bad(format!("vlen_bits {} must be a power-of-two multiple of {}", self.vlen_bits, self.sew_bits));
        }
        if !self.lanes.is_power_of_two() {
            return bad(format!("lanes {} must be a power of two >= 1", self.lanes));
        }
        if self.lanes > self.vlmax() as u32 {
            return bad(format!("lanes {} exceeds vlen_bits/sew_bits = {}", self.lanes, self.vlmax()));
        }
        if self.strided_mem_factor == 0 {
            return bad("strided_mem_factor must be >= 1".into());
        }
        Ok(())
    }

    pub fn vlmax(&self) -> usize {
        (self.vlen_bits / self.sew_bits) as usize
    }

    fn lane_cycles(&self, vl: usize) -> u64 {
        vl.div_ceil(self.lanes as usize) as u64
    }

    fn tree_depth(&self) -> u64 {
        u64::from(self.lanes.trailing_zeros())
    }
}

/// Accumulated counters for one kernel run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CycleLedger {
    pub total_cycles: u64,
    pub vector_instructions: u64,
    pub scalar_instructions: u64,
    pub vector_element_ops: u64,
}

impl CycleLedger {
    /// Counter-wise difference `self − earlier`.
    pub fn since(&self, earlier: &CycleLedger) -> CycleLedger {
        CycleLedger {
            total_cycles: self.total_cycles - earlier.total_cycles,
            vector_instructions: self.vector_instructions - earlier.vector_instructions,
            scalar_instructions: self.scalar_instructions - earlier.scalar_instructions,
            vector_element_ops: self.vector_element_ops - earlier.vector_element_ops,
        }
    }
}

#[derive(Debug, Clone)]
pub struct VectorContext {
    config: VectorConfig,
    ledger: CycleLedger,
    vlmax: usize,
}

impl VectorContext {
    pub fn new(config: VectorConfig) -> Result<Self, MachineError> {
        config.validate()?;
        Ok(Self { vlmax: config.vlmax(), config, ledger: CycleLedger::default() })
    }

    pub fn config(&self) -> &VectorConfig {
        &self.config
    }

    pub fn vlmax(&self) -> usize {
        self.vlmax
    }

    /// Copy of the current counters.
    pub fn snapshot(&self) -> CycleLedger {
        self.ledger
    }

    /// Grants `min(requested, vlmax)` elements for the next strip.
    pub fn set_vl(&mut self, requested: usize) -> usize {
        self.scalar_op(1);
        requested.min(self.vlmax)
    }

    pub fn vec_arith(&mut self, _kind: ArithKind, vl: usize) -> Result<u64, MachineError> {
        self.check_vl(vl)?;
        let cost = self.config.issue_overhead_cycles + self.config.lane_cycles(vl);
        Ok(self.charge_vector(vl, cost))
    }

    pub fn vec_mem(&mut self, kind: MemKind, vl: usize) -> Result<u64, MachineError> {
        self.check_vl(vl)?;
        let beats = self.config.lane_cycles(vl);
        let beats = if kind.is_strided() { self.config.strided_mem_factor * beats } else { beats };
        Ok(self.charge_vector(vl, self.config.issue_overhead_cycles + beats))
    }

    /// Reduction of `vl` elements to one scalar: lane-parallel partial sums
    /// followed by a `log2(lanes)` combine tree.
    pub fn vec_reduce(&mut self, vl: usize) -> Result<u64, MachineError> {
        self.check_vl(vl)?;
        let cost = self.config.issue_overhead_cycles + self.config.lane_cycles(vl) + self.config.tree_depth();
        Ok(self.charge_vector(vl, cost))
    }

    pub fn scalar_op(&mut self, n: u64) -> u64 {
        self.ledger.total_cycles += n;
        self.ledger.scalar_instructions += n;
        n
    }

    fn check_vl(&self, vl: usize) -> Result<(), MachineError> {
        if vl > self.vlmax {
            return Err(MachineError::VlExceedsVlmax { vl, vlmax: self.vlmax });
        }
        Ok(())
    }

    fn charge_vector(&mut self, vl: usize, cost: u64) -> u64 {
        if vl == 0 {
            return 0;
        }
        self.ledger.total_cycles += cost;
        self.ledger.vector_instructions += 1;
        self.ledger.vector_element_ops += vl as u64;
        cost
    }
}

/// Strip-mines `n` elements: calls `body(ctx, offset, vl)` once per strip.
pub fn strip_mine<E>(
    ctx: &mut VectorContext,
    n: usize,
    mut body: impl FnMut(&mut VectorContext, usize, usize) -> Result<(), E>,
) -> Result<(), E> {
    let mut offset = 0;
    while offset < n {
        let vl = ctx.set_vl(n - offset);
        body(ctx, offset, vl)?;
        offset += vl;
    }
    Ok(())
}

/// All (VLEN, lanes) preset pairs that form a valid configuration.
pub fn preset_configs() -> Vec<VectorConfig> {
    PRESET_VLENS.iter().flat_map(|&v| PRESET_LANES.iter().filter_map(move |&l| VectorConfig::new(v, l).ok())).collect()
}
