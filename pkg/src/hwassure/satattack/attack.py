"""Oracle-guided SAT attack on locked combinational models.

The attack builds a miter of two key-differentiated copies of the locked
circuit that share every functional input. While the miter is satisfiable
there exists a distinguishing input pattern (DIP): some pair of keys that
disagree on it. Each DIP is resolved against the oracle and both key
copies are constrained to reproduce the oracle's response, pruning every
key inconsistent with the observation. When no DIP remains, any key
satisfying the accumulated constraints is I/O-equivalent to the oracle,
and one is extracted with a final solver call.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..locking import LockedCircuit, LockingKey, insert_random_locking, key_assignment
from ..netlist import Circuit, NetlistError, batch_evaluate, evaluate, index_input_matrix
from ..platform_model import ScanTopology, compose_platform_frame, frame
from .cnf import CnfFormula, tseitin_encode, to_dimacs
from .solver import CdclSolver, DimacsSolver, SolverBudgetExceeded


class CircuitOracle:
    """Black-box oracle backed by an unlocked circuit at the same interface."""

    def __init__(self, circuit: Circuit):
        if not circuit.is_combinational:
            raise NetlistError("oracle circuit must be combinational; compose the platform first")
        self.circuit = circuit

    @property
    def input_names(self) -> Tuple[str, ...]:
        return self.circuit.primary_inputs

    @property
    def output_names(self) -> Tuple[str, ...]:
        return self.circuit.primary_outputs

    def query(self, inputs: Mapping[str, int]) -> Dict[str, int]:
        out, _ = evaluate(self.circuit, inputs)
        return out


@dataclass
class AttackResult:
    recovered_key: Optional[LockingKey]
    iterations: int
    elapsed_seconds: float
    status: str  # "success" or "timeout"
    dip_trace: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = field(default_factory=list)
    verified: Optional[bool] = None

    @property
    def dips(self) -> List[Tuple[int, ...]]:
        return [dip for dip, _ in self.dip_trace]


class _BuiltinBackend:
    """Incremental clause store on the bundled CDCL solver."""

    def __init__(self):
        self.solver = CdclSolver()
        self.nvars = 0

    def new_var(self) -> int:
        self.nvars += 1
        self.solver.ensure_vars(self.nvars)
        return self.nvars

    def add_clause(self, lits: Sequence[int]) -> None:
        self.solver.add_clause(lits)

    def solve(self, assumptions: Sequence[int], time_budget_s: Optional[float]):
        if self.solver.solve(assumptions, time_budget_s=time_budget_s):
            return self.solver.model
        return None


class _DimacsBackend:
    """Non-incremental adapter: replays the clause list per call."""

    def __init__(self, path: str):
        self.external = DimacsSolver(path)
        self.nvars = 0
        self.clauses: List[Tuple[int, ...]] = []

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def add_clause(self, lits: Sequence[int]) -> None:
        self.clauses.append(tuple(lits))

    def solve(self, assumptions: Sequence[int], time_budget_s: Optional[float]):
        self.external.timeout_s = time_budget_s
        return self.external.solve(CnfFormula(self.nvars, list(self.clauses)), assumptions)


def _make_backend(solver: str):
    if solver == "builtin":
        return _BuiltinBackend()
    if solver.startswith("dimacs:"):
        return _DimacsBackend(solver[len("dimacs:"):])
    raise ValueError(f"unknown solver spec {solver!r}")


def sat_attack(
    locked: LockedCircuit,
    oracle: CircuitOracle,
    time_limit_s: float = 3600.0,
    max_iterations: Optional[int] = None,
    solver: str = "builtin",
    verify: bool = True,
    verify_samples: int = 10000,
    verify_exhaustive_limit: int = 16,
    verify_seed: int = 0,
) -> AttackResult:
    """Recover a functionally correct key from a locked model and an oracle."""
    core = locked.core
    if not core.is_combinational:
        raise NetlistError("attack model must be combinational; compose the platform first")
    shared = locked.functional_inputs()
    outputs = tuple(dict.fromkeys(core.primary_outputs))
    if tuple(sorted(oracle.input_names)) != tuple(sorted(shared)):
        raise ValueError("oracle inputs do not match the model's functional inputs")

    started = time.monotonic()
    deadline = started + time_limit_s

    base = tseitin_encode(core)
    nbase = base.num_variables
    shared_vars = {base.net_to_var[n] for n in shared}
    backend = _make_backend(solver)
    for _ in range(nbase):
        backend.new_var()

    def remap_block(bound: Dict[int, int]) -> List[int]:
        """Fresh variable block for one circuit copy; ``bound`` pins nets."""
        m = [0] * (nbase + 1)
        for v in range(1, nbase + 1):
            m[v] = bound.get(v) or backend.new_var()
        return m

    def add_copy(mapping: Sequence[int]) -> None:
        for clause in base.clauses:
            backend.add_clause([mapping[l] if l > 0 else -mapping[-l] for l in clause])

    # copy A is the identity block
    ident = list(range(nbase + 1))
    add_copy(ident)
    # copy B shares functional inputs, gets fresh everything else
    map_b = remap_block({v: v for v in shared_vars})
    add_copy(map_b)

    key_vars_a = [base.net_to_var[k] for k in locked.key_inputs]
    key_vars_b = [map_b[v] for v in key_vars_a]

    # difference detector: diff var per output, OR'd into one assumption literal
    diff_lits = []
    for net in outputs:
        a, b = base.net_to_var[net], map_b[base.net_to_var[net]]
        d = backend.new_var()
        backend.add_clause([-d, a, b])
        backend.add_clause([-d, -a, -b])
        diff_lits.append(d)
    miter_lit = backend.new_var()
    backend.add_clause([-miter_lit] + diff_lits)

    shared_var_list = [base.net_to_var[n] for n in shared]
    out_var_list = [base.net_to_var[n] for n in outputs]
    dip_trace: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []

    def budget() -> float:
        return deadline - time.monotonic()

    def timed_out_result() -> AttackResult:
        return AttackResult(
            recovered_key=None,
            iterations=len(dip_trace),
            elapsed_seconds=time.monotonic() - started,
            status="timeout",
            dip_trace=dip_trace,
        )

    while True:
        remaining = budget()
        if remaining <= 0:
            return timed_out_result()
        if max_iterations is not None and len(dip_trace) >= max_iterations:
            return timed_out_result()
        try:
            model = backend.solve([miter_lit], time_budget_s=remaining)
        except SolverBudgetExceeded:
            return timed_out_result()
        if model is None:
            break
        dip_bits = tuple(int(model[v]) for v in shared_var_list)
        response = oracle.query(dict(zip(shared, dip_bits)))
        out_bits = tuple(int(response[n]) for n in outputs)
        dip_trace.append((dip_bits, out_bits))

        # pin each key copy to reproduce the oracle on this DIP
        for key_vars in (key_vars_a, key_vars_b):
            pinned = dict(zip(key_vars_a, key_vars))
            block = remap_block(pinned)
            add_copy(block)
            for v, bit in zip(shared_var_list, dip_bits):
                backend.add_clause([block[v] if bit else -block[v]])
            for v, bit in zip(out_var_list, out_bits):
                backend.add_clause([block[v] if bit else -block[v]])

    remaining = budget()
    if remaining <= 0:
        return timed_out_result()
    try:
        model = backend.solve([], time_budget_s=remaining)
    except SolverBudgetExceeded:
        return timed_out_result()
    if model is None:
        raise RuntimeError("key extraction is unsatisfiable; attack bookkeeping is broken")
    key = LockingKey(tuple(int(model[v]) for v in key_vars_a))
    result = AttackResult(
        recovered_key=key,
        iterations=len(dip_trace),
        elapsed_seconds=time.monotonic() - started,
        status="success",
        dip_trace=dip_trace,
    )
    if verify:
        result.verified = verify_recovered_key(
            locked,
            key,
            oracle.circuit,
            samples=verify_samples,
            exhaustive_limit=verify_exhaustive_limit,
            seed=verify_seed,
        )
    return result


def verify_recovered_key(
    locked: LockedCircuit,
    key: LockingKey,
    oracle_circuit: Circuit,
    samples: int = 10000,
    exhaustive_limit: int = 16,
    seed: int = 0,
) -> bool:
    """I/O equivalence of the keyed model against the oracle circuit.

    Exhaustive when the functional input count is small enough, otherwise
    a fixed-seed random sample; zero mismatches required either way.
    """
    shared = locked.functional_inputs()
    outputs = tuple(dict.fromkeys(oracle_circuit.primary_outputs))
    key_bits = key_assignment(locked, key)

    def check(fin_mat: Dict[str, np.ndarray], lanes: int) -> bool:
        assign = dict(fin_mat)
        for name, bit in key_bits.items():
            assign[name] = np.full(lanes, bit, dtype=np.uint8)
        got, _ = batch_evaluate(locked.core, assign)
        ref, _ = batch_evaluate(oracle_circuit, fin_mat)
        return all(bool(np.array_equal(got[o], ref[o])) for o in outputs)

    if len(shared) <= exhaustive_limit:
        total = 1 << len(shared)
        chunk = 1 << 14
        for b in range(0, total, chunk):
            lanes = min(chunk, total - b)
            if not check(index_input_matrix(shared, lanes, offset=b), lanes):
                return False
        return True
    rng = np.random.default_rng(seed)
    mat = {n: rng.integers(0, 2, samples, dtype=np.uint8) for n in shared}
    return check(mat, samples)


def build_platform_instance(
    circuit: Circuit,
    key_length: int,
    cr: int,
    seed: int,
    external_channels: int = 1,
) -> Tuple[LockedCircuit, CircuitOracle, Optional[ScanTopology]]:
    """Lock a design and compose the matching attack-model/oracle pair.

    Sequential designs are framed and wrapped in the scan codec at the
    requested compression ratio; the oracle is the unlocked design under
    the identical topology, so both sides expose the same scan-port
    interface. Combinational designs need no scan path and pass through
    unchanged regardless of ``cr``.
    """
    locked = insert_random_locking(circuit, key_length, seed=seed)
    if circuit.flip_flops:
        topology = ScanTopology.for_ff_count(len(circuit.flip_flops), cr, external_channels)
        model_core = compose_platform_frame(frame(locked.core), topology)
        oracle_circuit = compose_platform_frame(frame(circuit), topology)
    else:
        topology = None
        model_core = locked.core
        oracle_circuit = circuit
    model = LockedCircuit(model_core, locked.key_inputs, locked.correct_key)
    return model, CircuitOracle(oracle_circuit), topology


def attack_report(
    result: AttackResult, design: str, key_length: int, cr: int, seed: Optional[int] = None
) -> Dict[str, object]:
    """JSON-ready record; wall-clock time sits in its own field so the rest
    of the record is byte-stable across runs."""
    rec: Dict[str, object] = {
        "design": design,
        "key_length": key_length,
        "cr": cr,
        "iterations": result.iterations,
        "status": result.status,
        "recovered_key": result.recovered_key.as_string() if result.recovered_key else None,
        "verified": result.verified,
        "elapsed_s": round(result.elapsed_seconds, 6),
    }
    if seed is not None:
        rec["seed"] = seed
    return rec
