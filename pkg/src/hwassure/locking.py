"""Random XOR/XNOR logic locking and piracy-resilience metrics.

A key gate is spliced onto a gate-output net: the original driver is
renamed and the key gate re-drives the old net name, so every reader
(and the output list) picks up the keyed value. An XOR gate is used for
a key bit of 0 and an XNOR for a key bit of 1, so the correct key makes
every key gate transparent and the locked circuit collapses back to the
original function.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .netlist import (
    Circuit,
    Gate,
    NetlistError,
    batch_evaluate,
    evaluate,
    index_input_matrix,
)

KEY_INPUT_PREFIX = "keyinput"


@dataclass(frozen=True)
class LockingKey:
    bits: Tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) < 1:
            raise ValueError("key must have at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("key bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    def as_string(self) -> str:
        return "".join(str(b) for b in self.bits)

    @staticmethod
    def from_string(text: str) -> "LockingKey":
        return LockingKey(tuple(int(ch) for ch in text.strip()))

    @staticmethod
    def from_int(value: int, width: int) -> "LockingKey":
        return LockingKey(tuple((value >> i) & 1 for i in range(width)))


@dataclass(frozen=True)
class LockedCircuit:
    core: Circuit
    key_inputs: Tuple[str, ...]
    correct_key: LockingKey
    lock_sites: Optional[Tuple[Tuple[str, str], ...]] = None  # (net, key gate kind)

    def __post_init__(self):
        if len(self.key_inputs) != len(self.correct_key):
            raise ValueError("key width does not match the number of key inputs")
        if self.lock_sites is not None and len(self.lock_sites) != len(self.key_inputs):
            raise ValueError("one lock site per key input expected")
        pi = set(self.core.primary_inputs)
        for k in self.key_inputs:
            if k not in pi:
                raise ValueError(f"key input {k!r} is not a primary input of the core")

    @property
    def key_length(self) -> int:
        return len(self.key_inputs)

    def functional_inputs(self) -> Tuple[str, ...]:
        keys = set(self.key_inputs)
        return tuple(pi for pi in self.core.primary_inputs if pi not in keys)


def insert_random_locking(circuit: Circuit, key_length: int, seed: int) -> LockedCircuit:
    """Insert ``key_length`` XOR/XNOR key gates on distinct gate-output nets.

    Site selection, key bits, and therefore gate kinds are all drawn from
    ``seed``. Primary-input nets are never locked.
    """
    lockable = [g.output for g in circuit.gates]
    if key_length < 1:
        raise ValueError("key_length must be >= 1")
    if key_length > len(lockable):
        raise ValueError(
            f"cannot place {key_length} key gates on {len(lockable)} lockable nets"
        )
    rng = random.Random(seed)
    sites = rng.sample(lockable, key_length)
    bits = tuple(rng.randrange(2) for _ in range(key_length))

    taken = {g.output for g in circuit.gates} | set(circuit.primary_inputs)
    renamed: Dict[str, str] = {}
    for i, net in enumerate(sites):
        pre = f"{net}$raw{i}"
        while pre in taken:
            pre += "_"
        renamed[net] = pre
        taken.add(pre)

    specs: List[Tuple[str, str, Sequence[str]]] = []
    for g in circuit.gates:
        out = renamed.get(g.output, g.output)
        specs.append((out, g.kind, g.inputs))
    key_names = []
    site_records = []
    for i, net in enumerate(sites):
        kname = f"{KEY_INPUT_PREFIX}{i}"
        if kname in taken:
            raise NetlistError(f"net name {kname!r} already in use; cannot lock")
        kind = "XOR" if bits[i] == 0 else "XNOR"
        specs.append((net, kind, (renamed[net], kname)))
        key_names.append(kname)
        site_records.append((net, kind))

    gates = [Gate(i, kind, tuple(ins), out) for i, (out, kind, ins) in enumerate(specs)]
    core = Circuit(
        circuit.name + f"_enc{key_length}",
        gates,
        tuple(circuit.primary_inputs) + tuple(key_names),
        circuit.primary_outputs,
    )
    return LockedCircuit(core, tuple(key_names), LockingKey(bits), tuple(site_records))


def key_assignment(locked: LockedCircuit, key: LockingKey) -> Dict[str, int]:
    if len(key) != locked.key_length:
        raise ValueError(f"expected a {locked.key_length}-bit key, got {len(key)} bits")
    return dict(zip(locked.key_inputs, key.bits))


def evaluate_locked(
    locked: LockedCircuit,
    key: LockingKey,
    inputs: Mapping[str, int],
    state: Optional[Mapping[str, int]] = None,
) -> Tuple[Dict[str, int], Dict[str, int]]:
    merged = dict(inputs)
    merged.update(key_assignment(locked, key))
    return evaluate(locked.core, merged, state)


# -- piracy metrics ------------------------------------------------------------
#
# All three metrics treat the circuit combinationally, so they require a
# DFF-free core (frame a sequential design first).

_CHUNK = 1 << 16


def _require_combinational(locked: LockedCircuit) -> None:
    if not locked.core.is_combinational:
        raise NetlistError("piracy metrics are defined on combinational cores; frame first")


def _outputs_matrix(circuit: Circuit, assignments: Mapping[str, np.ndarray]) -> np.ndarray:
    outs, _ = batch_evaluate(circuit, assignments)
    return np.stack([outs[po] for po in circuit.primary_outputs])


def _key_to_int(key: LockingKey) -> int:
    return sum(b << i for i, b in enumerate(key.bits))


def _wrong_keys(rng: random.Random, locked: LockedCircuit, count: int) -> List[LockingKey]:
    k = locked.key_length
    correct = _key_to_int(locked.correct_key)
    keys = []
    for _ in range(count):
        while True:
            v = rng.randrange(1 << k)
            if v != correct:
                break
        keys.append(LockingKey.from_int(v, k))
    return keys


def compute_output_corruptibility(
    locked: LockedCircuit,
    mode: str = "exhaustive",
    n_inputs: int = 1000,
    n_keys: int = 32,
    seed: int = 0,
) -> float:
    """Fraction of (input pattern, wrong key) pairs whose output word differs
    from the original circuit's."""
    _require_combinational(locked)
    fins = locked.functional_inputs()
    k = locked.key_length
    if mode == "exhaustive":
        if len(fins) + k > 24:
            raise ValueError("exhaustive corruptibility limited to numPI + k <= 24")
        total_inputs = 1 << len(fins)
        corrupted = 0
        total_pairs = 0
        correct = locked.correct_key
        for base in range(0, total_inputs, _CHUNK):
            lanes = min(_CHUNK, total_inputs - base)
            fin_mat = index_input_matrix(fins, lanes, offset=base)
            ref_assign = dict(fin_mat)
            for name, bit in key_assignment(locked, correct).items():
                ref_assign[name] = np.full(lanes, bit, dtype=np.uint8)
            ref = _outputs_matrix(locked.core, ref_assign)
            for kv in range(1 << k):
                key = LockingKey.from_int(kv, k)
                if key.bits == correct.bits:
                    continue
                assign = dict(fin_mat)
                for name, bit in key_assignment(locked, key).items():
                    assign[name] = np.full(lanes, bit, dtype=np.uint8)
                got = _outputs_matrix(locked.core, assign)
                corrupted += int(np.any(got != ref, axis=0).sum())
                total_pairs += lanes
        return corrupted / total_pairs
    if mode == "sampled":
        rng = random.Random(seed)
        nprng = np.random.default_rng(seed)
        fin_mat = {
            n: nprng.integers(0, 2, n_inputs, dtype=np.uint8) for n in fins
        }
        ref_assign = dict(fin_mat)
        for name, bit in key_assignment(locked, locked.correct_key).items():
            ref_assign[name] = np.full(n_inputs, bit, dtype=np.uint8)
        ref = _outputs_matrix(locked.core, ref_assign)
        corrupted = 0
        for key in _wrong_keys(rng, locked, n_keys):
            assign = dict(fin_mat)
            for name, bit in key_assignment(locked, key).items():
                assign[name] = np.full(n_inputs, bit, dtype=np.uint8)
            got = _outputs_matrix(locked.core, assign)
            corrupted += int(np.any(got != ref, axis=0).sum())
        return corrupted / (n_inputs * n_keys)
    raise ValueError(f"unknown mode {mode!r}")


def compute_ker(locked: LockedCircuit, key: LockingKey) -> float:
    """Key execution rate: fraction of input minterms the given key corrupts."""
    _require_combinational(locked)
    fins = locked.functional_inputs()
    if len(fins) > 22:
        raise ValueError("KER enumeration limited to 22 functional inputs")
    total = 1 << len(fins)
    corrupted = 0
    for base in range(0, total, _CHUNK):
        lanes = min(_CHUNK, total - base)
        fin_mat = index_input_matrix(fins, lanes, offset=base)
        ref_assign = dict(fin_mat)
        got_assign = dict(fin_mat)
        for name, bit in key_assignment(locked, locked.correct_key).items():
            ref_assign[name] = np.full(lanes, bit, dtype=np.uint8)
        for name, bit in key_assignment(locked, key).items():
            got_assign[name] = np.full(lanes, bit, dtype=np.uint8)
        ref = _outputs_matrix(locked.core, ref_assign)
        got = _outputs_matrix(locked.core, got_assign)
        corrupted += int(np.any(got != ref, axis=0).sum())
    return corrupted / total


def compute_ier(locked: LockedCircuit, minterm: Mapping[str, int]) -> float:
    """Incorrect execution rate of one minterm over all 2^k - 1 wrong keys."""
    _require_combinational(locked)
    fins = locked.functional_inputs()
    k = locked.key_length
    if k > 22:
        raise ValueError("IER enumeration limited to 22 key bits")
    lanes = 1 << k
    assign = {
        n: np.full(lanes, int(minterm[n]) & 1, dtype=np.uint8) for n in fins
    }
    assign.update(index_input_matrix(locked.key_inputs, lanes))
    got = _outputs_matrix(locked.core, assign)
    correct_lane = _key_to_int(locked.correct_key)
    ref = got[:, correct_lane : correct_lane + 1]
    diff = np.any(got != ref, axis=0)
    diff[correct_lane] = False
    return int(diff.sum()) / (lanes - 1)


# -- serialization -------------------------------------------------------------


def save_locked(locked: LockedCircuit, bench_path: str, key_path: Optional[str] = None) -> str:
    """Write the locked core as bench text plus a sidecar key file."""
    from .netlist import save_bench

    save_bench(locked.core, bench_path)
    if key_path is None:
        key_path = bench_path + ".key"
    with open(key_path, "w", encoding="utf-8") as fh:
        fh.write(locked.correct_key.as_string() + "\n")
    return key_path


def load_locked(bench_path: str, key_path: Optional[str] = None) -> LockedCircuit:
    """Rebuild a LockedCircuit from bench text and its sidecar key.

    Key inputs are recognized by name. Lock sites are not recoverable from
    the serialized form and are left unset.
    """
    from .netlist import load_bench

    core = load_bench(bench_path)
    if key_path is None:
        key_path = bench_path + ".key"
    with open(key_path, "r", encoding="utf-8") as fh:
        key = LockingKey.from_string(fh.read())
    key_names = sorted(
        (pi for pi in core.primary_inputs if pi.startswith(KEY_INPUT_PREFIX)),
        key=lambda n: int(n[len(KEY_INPUT_PREFIX):]),
    )
    return LockedCircuit(core, tuple(key_names), key, None)
