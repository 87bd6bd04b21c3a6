"""Incremental CDCL SAT solver.

Small but complete: two-watched-literal propagation, first-UIP clause
learning, VSIDS-style activities with phase saving, Luby restarts, and
solving under assumptions so the attack loop can reuse one solver while
clauses accrue. Everything is deterministic: ties break on variable
index and no randomness is used.

Literals use the DIMACS convention externally (+v / -v); internally a
literal is encoded as 2*v (positive) or 2*v+1 (negative).
"""

from __future__ import annotations

import os
import subprocess
import tempfile
import time
from heapq import heappop, heappush
from typing import Iterable, List, Optional, Sequence

from .cnf import CnfFormula, to_dimacs

_UNDEF = 2


class SolverBudgetExceeded(Exception):
    """Raised when a conflict or wall-clock budget runs out mid-solve."""


def _luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class CdclSolver:
    def __init__(self):
        self.nvars = 0
        self.clauses: List[List[int]] = []
        self.learnts: List[List[int]] = []
        self.watches: List[List[List[int]]] = [[], []]
        self.assigns = bytearray([_UNDEF])
        self.level = [0]
        self.reason: List[Optional[List[int]]] = [None]
        self.polarity = bytearray([0])
        self.activity = [0.0]
        self.seen = bytearray([0])
        self.heap: List[tuple] = []
        self.var_inc = 1.0
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0
        self.ok = True
        self.model: Optional[List[Optional[bool]]] = None
        self.max_learnts = 8000
        self.conflicts_total = 0

    # -- variables -----------------------------------------------------------

    def new_var(self) -> int:
        self.nvars += 1
        self.assigns.append(_UNDEF)
        self.level.append(0)
        self.reason.append(None)
        self.polarity.append(0)
        self.activity.append(0.0)
        self.seen.append(0)
        self.watches.append([])
        self.watches.append([])
        heappush(self.heap, (0.0, self.nvars))
        return self.nvars

    def ensure_vars(self, n: int) -> None:
        while self.nvars < n:
            self.new_var()

    # -- clause management -----------------------------------------------------

    def add_clause(self, lits: Iterable[int]) -> bool:
        """Add a clause (external literals); returns False if the formula
        became trivially unsatisfiable. Must be called at decision level 0."""
        if self.trail_lim:
            raise RuntimeError("add_clause requires decision level 0")
        if not self.ok:
            return False
        enc = {}
        out: List[int] = []
        for l in lits:
            v = abs(l)
            if v == 0:
                raise ValueError("0 is not a literal")
            self.ensure_vars(v)
            e = (v << 1) | (l < 0)
            if (e ^ 1) in enc:
                return True  # tautology
            if e in enc:
                continue
            enc[e] = True
            a = self.assigns[v]
            if a != _UNDEF:
                val = a ^ (e & 1)
                if val:
                    return True  # satisfied at level 0
                continue  # false at level 0: drop the literal
            out.append(e)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._enqueue(out[0], None)
            return True
        self.clauses.append(out)
        self.watches[out[0]].append(out)
        self.watches[out[1]].append(out)
        return True

    def add_formula(self, formula: CnfFormula) -> None:
        self.ensure_vars(formula.num_variables)
        for clause in formula.clauses:
            self.add_clause(clause)

    # -- assignment ------------------------------------------------------------

    def _enqueue(self, e: int, reason: Optional[List[int]]) -> None:
        v = e >> 1
        self.assigns[v] = (e & 1) ^ 1
        self.polarity[v] = self.assigns[v]
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(e)

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        heap = self.heap
        activity = self.activity
        for k in range(len(self.trail) - 1, lim - 1, -1):
            v = self.trail[k] >> 1
            self.assigns[v] = _UNDEF
            self.reason[v] = None
            heappush(heap, (-activity[v], v))
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = lim

    # -- propagation -------------------------------------------------------------

    def _propagate(self) -> Optional[List[int]]:
        assigns = self.assigns
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            falsified = p ^ 1
            ws = watches[falsified]
            if not ws:
                continue
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == falsified:
                    c[0] = c[1]
                    c[1] = falsified
                first = c[0]
                a0 = assigns[first >> 1]
                if a0 != _UNDEF and (a0 ^ (first & 1)) == 1:
                    ws[j] = c
                    j += 1
                    continue
                moved = False
                for k in range(2, len(c)):
                    lk = c[k]
                    ak = assigns[lk >> 1]
                    if ak == _UNDEF or (ak ^ (lk & 1)) == 1:
                        c[1] = lk
                        c[k] = falsified
                        watches[lk].append(c)
                        moved = True
                        break
                if moved:
                    continue
                ws[j] = c
                j += 1
                if a0 != _UNDEF:
                    # first is false too: conflict
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    return c
                self._enqueue(first, c)
            del ws[j:]
        return None

    # -- learning ---------------------------------------------------------------

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            for i in range(1, self.nvars + 1):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[v2], v2) for v2 in range(1, self.nvars + 1)
                         if self.assigns[v2] == _UNDEF]
            self.heap.sort()
        else:
            heappush(self.heap, (-act, v))

    def _analyze(self, confl: List[int]) -> tuple:
        learnt = [0]
        seen = self.seen
        level = self.level
        cur_level = len(self.trail_lim)
        path = 0
        p = -1
        index = len(self.trail) - 1
        cleared = []
        while True:
            start = 0 if p == -1 else 1
            for k in range(start, len(confl)):
                q = confl[k]
                v = q >> 1
                lv = level[v]
                if not seen[v] and lv > 0:
                    seen[v] = 1
                    cleared.append(v)
                    self._bump(v)
                    if lv >= cur_level:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[index] >> 1]:
                index -= 1
            p = self.trail[index]
            v = p >> 1
            confl = self.reason[v]
            seen[v] = 0
            path -= 1
            index -= 1
            if path <= 0:
                break
        learnt[0] = p ^ 1
        for v in cleared:
            seen[v] = 0
        if len(learnt) == 1:
            back = 0
        else:
            # move the highest-level remaining literal to the watch slot
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = level[learnt[1] >> 1]
        self.var_inc /= 0.95
        return learnt, back

    def _reduce_db(self) -> None:
        """Drop the longest half of the learnt clauses and rebuild watches."""
        keep: List[List[int]] = []
        candidates: List[List[int]] = []
        for c in self.learnts:
            v0 = c[0] >> 1
            if len(c) <= 2 or self.reason[v0] is c:
                keep.append(c)
            else:
                candidates.append(c)
        candidates.sort(key=len)
        cut = len(candidates) // 2
        keep.extend(candidates[:cut])
        self.learnts = keep
        for ws in self.watches:
            ws.clear()
        for c in self.clauses:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)
        for c in self.learnts:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)
        self.qhead = 0
        self.max_learnts = int(self.max_learnts * 1.3)

    # -- search -------------------------------------------------------------------

    def _pick_branch(self) -> Optional[int]:
        heap = self.heap
        assigns = self.assigns
        while heap:
            _, v = heappop(heap)
            if assigns[v] == _UNDEF:
                return v
        for v in range(1, self.nvars + 1):
            if assigns[v] == _UNDEF:
                return v
        return None

    def solve(
        self,
        assumptions: Sequence[int] = (),
        max_conflicts: Optional[int] = None,
        time_budget_s: Optional[float] = None,
    ) -> bool:
        """Solve under assumptions. True: self.model holds an assignment.
        False: unsatisfiable under the assumptions (self.model is None)."""
        self.model = None
        self._cancel_until(0)
        if not self.ok:
            return False
        assumps = [(abs(l) << 1) | (l < 0) for l in assumptions]
        for l in assumptions:
            self.ensure_vars(abs(l))
        conflicts_here = 0
        restart_num = 1
        restart_limit = 100 * _luby(restart_num)
        since_restart = 0
        deadline = time.monotonic() + time_budget_s if time_budget_s else None

        while True:
            confl = self._propagate()
            if confl is not None:
                conflicts_here += 1
                self.conflicts_total += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self._enqueue(learnt[0], learnt)
                if max_conflicts is not None and conflicts_here >= max_conflicts:
                    self._cancel_until(0)
                    raise SolverBudgetExceeded(f"conflict budget {max_conflicts} exhausted")
                if deadline is not None and conflicts_here % 256 == 0:
                    if time.monotonic() > deadline:
                        self._cancel_until(0)
                        raise SolverBudgetExceeded("time budget exhausted")
                if since_restart >= restart_limit:
                    restart_num += 1
                    restart_limit = 100 * _luby(restart_num)
                    since_restart = 0
                    self._cancel_until(0)
                continue

            if len(self.learnts) > self.max_learnts:
                self._cancel_until(0)
                self._reduce_db()
                continue

            lvl = len(self.trail_lim)
            if lvl < len(assumps):
                a = assumps[lvl]
                v = a >> 1
                st = self.assigns[v]
                if st != _UNDEF:
                    if st ^ (a & 1):
                        self.trail_lim.append(len(self.trail))
                        continue
                    self._cancel_until(0)
                    return False
                self.trail_lim.append(len(self.trail))
                self._enqueue(a, None)
                continue

            v = self._pick_branch()
            if v is None:
                self.model = [None] + [
                    self.assigns[i] == 1 if self.assigns[i] != _UNDEF else False
                    for i in range(1, self.nvars + 1)
                ]
                self._cancel_until(0)
                return True
            self.trail_lim.append(len(self.trail))
            self._enqueue((v << 1) | (self.polarity[v] ^ 1), None)


def solve(
    formula: CnfFormula,
    assumptions: Sequence[int] = (),
    solver: str = "builtin",
    max_conflicts: Optional[int] = None,
    time_budget_s: Optional[float] = None,
) -> Optional[List[Optional[bool]]]:
    """One-shot satisfiability check.

    Returns a model indexed by variable (entry 0 unused) or None when
    unsatisfiable. ``solver`` is 'builtin' or 'dimacs:<path>' to shell out
    to an external DIMACS solver binary.
    """
    if solver == "builtin":
        s = CdclSolver()
        s.add_formula(formula)
        if s.solve(assumptions, max_conflicts=max_conflicts, time_budget_s=time_budget_s):
            return s.model
        return None
    if solver.startswith("dimacs:"):
        return DimacsSolver(solver[len("dimacs:"):]).solve(formula, assumptions)
    raise ValueError(f"unknown solver spec {solver!r}")


class DimacsSolver:
    """Adapter for an external solver speaking the SAT-competition format."""

    def __init__(self, path: str, timeout_s: Optional[float] = None):
        self.path = path
        self.timeout_s = timeout_s

    def solve(
        self, formula: CnfFormula, assumptions: Sequence[int] = ()
    ) -> Optional[List[Optional[bool]]]:
        work = CnfFormula(formula.num_variables, list(formula.clauses))
        for l in assumptions:
            work.clauses.append((l,))
            work.num_variables = max(work.num_variables, abs(l))
        with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
            fh.write(to_dimacs(work))
            path = fh.name
        try:
            proc = subprocess.run(
                [self.path, path],
                capture_output=True,
                text=True,
                timeout=self.timeout_s,
            )
        except subprocess.TimeoutExpired as exc:
            raise SolverBudgetExceeded("external solver hit the time budget") from exc
        finally:
            os.unlink(path)
        out = proc.stdout
        if "s UNSATISFIABLE" in out or proc.returncode == 20:
            return None
        if "s SATISFIABLE" not in out and proc.returncode != 10:
            raise RuntimeError(
                f"external solver gave no verdict (rc={proc.returncode}): {out[:200]}"
            )
        model: List[Optional[bool]] = [None] + [False] * work.num_variables
        for line in out.splitlines():
            if line.startswith("v ") or line.startswith("v\t"):
                for tok in line[1:].split():
                    lit = int(tok)
                    if lit == 0:
                        continue
                    if abs(lit) <= work.num_variables:
                        model[abs(lit)] = lit > 0
        return model
