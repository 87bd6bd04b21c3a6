"""Tseitin CNF encoding of combinational circuits and DIMACS I/O.

Variables are positive integers; literals follow the DIMACS sign
convention. Encoding a circuit assigns one variable per net (primary
inputs first, then gate outputs in gate order); gates with more than two
XOR/XNOR inputs introduce auxiliary chain variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from ..netlist import Circuit, NetlistError

Clause = Tuple[int, ...]


@dataclass
class CnfFormula:
    num_variables: int
    clauses: List[Clause] = field(default_factory=list)
    net_to_var: Dict[str, int] = field(default_factory=dict)

    def add(self, *lits: int) -> None:
        self.clauses.append(tuple(lits))

    def new_var(self) -> int:
        self.num_variables += 1
        return self.num_variables


def _encode_gate(f: CnfFormula, kind: str, out: int, ins: Sequence[int]) -> None:
    if kind == "AND":
        for x in ins:
            f.add(-out, x)
        f.add(out, *[-x for x in ins])
    elif kind == "NAND":
        for x in ins:
            f.add(out, x)
        f.add(-out, *[-x for x in ins])
    elif kind == "OR":
        for x in ins:
            f.add(out, -x)
        f.add(-out, *ins)
    elif kind == "NOR":
        for x in ins:
            f.add(-out, -x)
        f.add(out, *ins)
    elif kind in ("XOR", "XNOR"):
        acc = ins[0]
        for x in ins[1:-1]:
            t = f.new_var()
            _encode_xor2(f, t, acc, x, invert=False)
            acc = t
        _encode_xor2(f, out, acc, ins[-1], invert=(kind == "XNOR"))
    elif kind == "NOT":
        f.add(-out, -ins[0])
        f.add(out, ins[0])
    elif kind == "BUF":
        f.add(-out, ins[0])
        f.add(out, -ins[0])
    else:
        raise NetlistError(f"cannot encode gate kind {kind!r}")


def _encode_xor2(f: CnfFormula, y: int, a: int, b: int, invert: bool) -> None:
    if invert:
        y = -y
    f.add(-y, a, b)
    f.add(-y, -a, -b)
    f.add(y, -a, b)
    f.add(y, a, -b)


def tseitin_encode(circuit: Circuit) -> CnfFormula:
    """Encode a combinational circuit; net_to_var covers every net."""
    if not circuit.is_combinational:
        raise NetlistError("cannot encode sequential circuits; frame first")
    f = CnfFormula(num_variables=0)
    for net in circuit.nets():
        f.num_variables += 1
        f.net_to_var[net] = f.num_variables
    for g in circuit.gates:
        _encode_gate(f, g.kind, f.net_to_var[g.output], [f.net_to_var[n] for n in g.inputs])
    return f


def to_dimacs(formula: CnfFormula, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {formula.num_variables} {len(formula.clauses)}")
    for clause in formula.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = 0
    declared = None
    clauses: List[Clause] = []
    pending: List[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars, declared = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
                num_vars = max(num_vars, abs(lit))
    if pending:
        clauses.append(tuple(pending))
    if declared is not None and declared != len(clauses):
        raise ValueError(f"DIMACS declares {declared} clauses, found {len(clauses)}")
    return CnfFormula(num_variables=num_vars, clauses=clauses)
