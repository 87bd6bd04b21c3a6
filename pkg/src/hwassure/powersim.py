"""Switching-activity simulation: toggle counts as a power-trace proxy.

Gate-level circuits are simulated cycle by cycle under uniform random
stimulus; the per-cycle toggle count (number of nets changing value,
primary inputs included) stands in for dynamic power. An encryption
subsystem combines the AES core's register toggles with any number of
noise circuits running alongside it; per-component counts add up to the
subsystem sample, so profiles decompose exactly into their blocks.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .aes import CYCLES_PER_ENCRYPTION, aes128_encrypt_batch
from .bundled import load_bench_ref
from .netlist import Circuit, batch_evaluate

PER_ENCRYPTION = "per-encryption"
PER_CYCLE = "per-cycle"
GRANULARITIES = (PER_ENCRYPTION, PER_CYCLE)

AES_BLOCK_NAME = "aes"


@dataclass(frozen=True)
class ToggleTrace:
    per_cycle: Tuple[int, ...]
    per_block: Dict[str, Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if any(c < 0 for c in self.per_cycle):
            raise ValueError("toggle counts cannot be negative")

    @property
    def total(self) -> int:
        return sum(self.per_cycle)


@dataclass(frozen=True)
class SwitchingProfile:
    samples: Tuple[int, ...]
    key_hex: str
    granularity: str

    def __post_init__(self):
        if not self.samples:
            raise ValueError("a profile needs at least one sample")
        if any(s < 0 for s in self.samples):
            raise ValueError("toggle samples cannot be negative")
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"granularity must be one of {GRANULARITIES}")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.samples, dtype=np.int64)


@dataclass(frozen=True)
class SubsystemConfig:
    noise_ips: Tuple[Tuple[Circuit, int], ...] = ()
    aes_core: bool = True
    cycles_per_encryption: int = CYCLES_PER_ENCRYPTION
    scheduler: Optional[Tuple[Tuple[int, ...], ...]] = None

    def __post_init__(self):
        if self.aes_core and self.cycles_per_encryption != CYCLES_PER_ENCRYPTION:
            raise ValueError(
                f"the AES core takes {CYCLES_PER_ENCRYPTION} cycles per encryption"
            )
        if not self.aes_core and not self.noise_ips:
            raise ValueError("subsystem has no components")
        if self.scheduler is not None:
            rows = len(self.scheduler)
            if rows != len(self.noise_ips):
                raise ValueError("scheduler needs one activity row per noise circuit")
            for row in self.scheduler:
                if len(row) != self.cycles_per_encryption:
                    raise ValueError("scheduler rows must cover every cycle")
                if any(v not in (0, 1) for v in row):
                    raise ValueError("scheduler entries are 0 or 1")

    def scheduler_mask(self) -> np.ndarray:
        if self.scheduler is None:
            return np.ones((len(self.noise_ips), self.cycles_per_encryption), dtype=np.int64)
        return np.asarray(self.scheduler, dtype=np.int64)


def simulate_circuit_toggles(
    circuit: Circuit,
    stimulus_seed: int,
    cycles: int,
    stimulus: Optional[Callable[[int], Mapping[str, int]]] = None,
) -> ToggleTrace:
    """Continuous simulation from the all-zero reset state.

    Each cycle applies a fresh uniform random vector to the primary
    inputs (``stimulus`` overrides chosen inputs per cycle), steps the
    flip-flops once, and counts every net whose value changed. The random
    stream is consumed per cycle in primary-input order, so traces are
    reproducible per seed.
    """
    if cycles < 1:
        raise ValueError("need at least one cycle")
    rng = np.random.default_rng(stimulus_seed)
    nets = list(circuit.nets())
    prev = {n: 0 for n in nets}
    state = {ff.output: np.zeros(1, dtype=np.uint8) for ff in circuit.flip_flops}
    per_cycle = []
    for t in range(cycles):
        override = stimulus(t) if stimulus is not None else {}
        pis = {}
        for pi in circuit.primary_inputs:
            if pi in override:
                pis[pi] = np.full(1, int(override[pi]) & 1, dtype=np.uint8)
            else:
                pis[pi] = rng.integers(0, 2, size=1, dtype=np.uint8)
        vals, state = batch_evaluate(circuit, pis, state, all_nets=True)
        per_cycle.append(sum(int(int(vals[n][0]) != prev[n]) for n in nets))
        prev = {n: int(vals[n][0]) for n in nets}
    return ToggleTrace(tuple(per_cycle))


def windowed_toggle_samples(
    circuit: Circuit,
    stimulus_seed: int,
    windows: int,
    cycles_per_window: int = CYCLES_PER_ENCRYPTION,
) -> np.ndarray:
    """Per-window toggle matrix, shape (windows, cycles_per_window).

    Every window is an independent run from the all-zero reset state, so
    samples are identically distributed; windows simulate in parallel
    lanes. The random stream is consumed per cycle in primary-input
    order with one draw of ``windows`` bits per input.
    """
    if windows < 1 or cycles_per_window < 1:
        raise ValueError("need at least one window and one cycle")
    rng = np.random.default_rng(stimulus_seed)
    nets = list(circuit.nets())
    prev = {n: np.zeros(windows, dtype=np.uint8) for n in nets}
    state = {ff.output: np.zeros(windows, dtype=np.uint8) for ff in circuit.flip_flops}
    out = np.zeros((windows, cycles_per_window), dtype=np.int64)
    for t in range(cycles_per_window):
        pis = {
            pi: rng.integers(0, 2, size=windows, dtype=np.uint8)
            for pi in circuit.primary_inputs
        }
        vals, state = batch_evaluate(circuit, pis, state, all_nets=True)
        acc = np.zeros(windows, dtype=np.int64)
        for n in nets:
            acc += vals[n] != prev[n]
        out[:, t] = acc
        prev = vals
    return out


def generate_plaintexts(seed: int, count: int) -> np.ndarray:
    """Deterministic uniform random 16-byte blocks, shape (count, 16)."""
    if count < 1:
        raise ValueError("need at least one plaintext")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 256, size=(count, 16), dtype=np.uint8)


def _unique_block_names(config: SubsystemConfig) -> List[str]:
    names: List[str] = []
    seen: Dict[str, int] = {}
    for circ, _ in config.noise_ips:
        base = circ.name
        seen[base] = seen.get(base, 0) + 1
        names.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
    return names


def simulate_subsystem(
    config: SubsystemConfig,
    key: bytes,
    plaintexts: Sequence[bytes],
    granularity: str = PER_ENCRYPTION,
) -> Tuple[SwitchingProfile, Dict[str, SwitchingProfile]]:
    """Collect the subsystem profile and its per-block decomposition.

    The subsystem sample is, by construction, the sum of the block
    samples at every cycle: the AES core's register toggles plus each
    noise circuit's toggles wherever the scheduler marks it active.
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"granularity must be one of {GRANULARITIES}")
    n = len(plaintexts)
    if n == 0:
        raise ValueError("need at least one plaintext")
    cyc = config.cycles_per_encryption
    mats: List[Tuple[str, np.ndarray]] = []
    if config.aes_core:
        _, aes_toggles = aes128_encrypt_batch(key, plaintexts)
        mats.append((AES_BLOCK_NAME, aes_toggles))
    mask = config.scheduler_mask()
    for i, ((circ, seed), name) in enumerate(zip(config.noise_ips, _unique_block_names(config))):
        mats.append((name, windowed_toggle_samples(circ, seed, n, cyc) * mask[i]))

    total = np.zeros((n, cyc), dtype=np.int64)
    for _, mat in mats:
        total += mat

    def to_profile(mat: np.ndarray) -> SwitchingProfile:
        samples = mat.sum(axis=1) if granularity == PER_ENCRYPTION else mat.reshape(-1)
        return SwitchingProfile(tuple(int(s) for s in samples), key.hex(), granularity)

    return to_profile(total), {name: to_profile(mat) for name, mat in mats}


def profiles_to_csv(
    subsystem: SwitchingProfile, blocks: Mapping[str, SwitchingProfile]
) -> str:
    """One row per sample: the subsystem count then each block's share."""
    names = list(blocks)
    header = ",".join(["subsystem"] + names)
    n = len(subsystem.samples)
    for name in names:
        if len(blocks[name].samples) != n:
            raise ValueError("block profiles must align with the subsystem profile")
    lines = [header]
    for i in range(n):
        row = [str(subsystem.samples[i])] + [str(blocks[m].samples[i]) for m in names]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def load_subsystem_config(
    payload: Mapping[str, object], base_dir: str = "."
) -> Tuple[SubsystemConfig, str]:
    """Build a config from its declarative form.

    Shape: {"aes": {"enabled": bool}, "noise_ips": [{"bench": ref, "seed": n}, ...],
    "granularity": "per-encryption" | "per-cycle", "scheduler": [[...], ...]}.
    Bench references are 'pkg:NAME' or paths relative to ``base_dir``.
    """
    aes_enabled = bool(payload.get("aes", {}).get("enabled", True))
    ips = []
    for entry in payload.get("noise_ips", []):
        ref = str(entry["bench"])
        if not ref.startswith("pkg:") and not os.path.isabs(ref):
            ref = os.path.join(base_dir, ref)
        ips.append((load_bench_ref(ref), int(entry.get("seed", 0))))
    scheduler = payload.get("scheduler")
    if scheduler is not None:
        scheduler = tuple(tuple(int(v) for v in row) for row in scheduler)
    granularity = str(payload.get("granularity", PER_ENCRYPTION))
    config = SubsystemConfig(
        noise_ips=tuple(ips), aes_core=aes_enabled, scheduler=scheduler
    )
    return config, granularity


def load_subsystem_config_file(path: str) -> Tuple[SubsystemConfig, str]:
    with open(path) as fh:
        payload = json.load(fh)
    return load_subsystem_config(payload, base_dir=os.path.dirname(os.path.abspath(path)))
