"""CDCL satisfiability solving with resolution proof logging.

``solve`` returns one of three verdicts: ``sat`` with a complete point over
all variables, ``unsat`` with an explicit resolution proof, or ``budget``
when a conflict cap or deadline is hit.  Proofs list the input clauses
(assumptions appended as unit clauses) followed by resolution steps; parent
references are input clause ids ``0..len(inputs)-1`` or earlier step ids
``len(inputs)+k``.  Each learned clause contributes the resolution chain of
its conflict analysis, and a conflict at decision level zero closes the
chain to the empty clause.  By default the returned proof is trimmed to the
cone of the empty clause.

The decision phase is pluggable: the default policy always proposes false,
the randomized one draws a random phase for every tenth decision from a
seeded generator, so identical inputs and seeds reproduce identical runs.
"""

from __future__ import annotations

import heapq
import random
import time
from dataclasses import dataclass

from .cnf import Clause, Cnf

SAT = "sat"
UNSAT = "unsat"
BUDGET = "budget"


@dataclass(frozen=True)
class Point:
    """Complete assignment; ``values[i]`` is the value of variable ``i + 1``."""

    values: tuple[int, ...]

    def value(self, var: int) -> int:
        return self.values[var - 1]

    def lit_value(self, lit: int) -> int:
        value = self.values[abs(lit) - 1]
        return value if lit > 0 else 1 - value

    def flip(self, var: int) -> "Point":
        vals = list(self.values)
        vals[var - 1] ^= 1
        return Point(tuple(vals))

    def satisfies_clause(self, clause: Clause) -> bool:
        return any(self.lit_value(l) for l in clause)

    def falsifies_clause(self, clause: Clause) -> bool:
        return not any(self.lit_value(l) for l in clause)

    def satisfies(self, f: Cnf) -> bool:
        return all(self.satisfies_clause(c) for c in f.clauses)


@dataclass(frozen=True)
class ResolutionStep:
    resolvent: Clause
    pivot: int
    parents: tuple[int, int]


@dataclass(frozen=True)
class ResolutionProof:
    """Resolution derivation of the empty clause from the input clauses.

    With no steps, some input clause is itself empty.  Assumption literals
    appear as unit clauses at the tail of ``input_clauses``.
    """

    input_clauses: tuple[Clause, ...]
    steps: tuple[ResolutionStep, ...]
    assumptions: tuple[int, ...] = ()

    @property
    def num_inputs(self) -> int:
        return len(self.input_clauses)

    def clause_of(self, ref: int) -> Clause:
        if ref < len(self.input_clauses):
            return self.input_clauses[ref]
        return self.steps[ref - len(self.input_clauses)].resolvent


@dataclass
class SatResult:
    status: str
    point: Point | None = None
    proof: ResolutionProof | None = None
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0


def resolve(c1: Clause, c2: Clause, var: int) -> Clause:
    """Resolvent of two clauses on ``var``; raises if the pair is not resolvable."""
    if var in c1 and -var in c2:
        pos, neg = c1, c2
    elif -var in c1 and var in c2:
        pos, neg = c2, c1
    else:
        raise ValueError(f"clauses are not resolvable on variable {var}")
    merged: dict[int, int] = {}
    for lit in pos + neg:
        v = abs(lit)
        if v == var:
            continue
        prev = merged.get(v)
        if prev is None:
            merged[v] = lit
        elif prev != lit:
            raise ValueError(f"resolvent is tautological on variable {v}")
    return tuple(sorted(merged.values(), key=abs))


def proof_defect(f: Cnf, proof: ResolutionProof) -> str | None:
    """First problem with the proof, or None when it is valid for ``f``."""
    n_formula = len(f.clauses)
    if len(proof.input_clauses) != n_formula + len(proof.assumptions):
        return "input clause count does not match formula plus assumptions"
    for i, clause in enumerate(f.clauses):
        if proof.input_clauses[i] != clause:
            return f"input clause {i} differs from the formula"
    for k, a in enumerate(proof.assumptions):
        if proof.input_clauses[n_formula + k] != (a,):
            return f"assumption clause {k} is not the unit ({a})"
    n_inputs = proof.num_inputs
    for k, step in enumerate(proof.steps):
        p1, p2 = step.parents
        for p in (p1, p2):
            if not 0 <= p < n_inputs + k:
                return f"step {k}: parent {p} does not precede the step"
        try:
            resolvent = resolve(proof.clause_of(p1), proof.clause_of(p2), step.pivot)
        except ValueError as e:
            return f"step {k}: {e}"
        if resolvent != step.resolvent:
            return f"step {k}: recorded resolvent does not match the resolution"
    if proof.steps:
        if proof.steps[-1].resolvent != ():
            return "final step does not derive the empty clause"
    elif () not in proof.input_clauses:
        return "no steps and no empty input clause"
    return None


def check_proof(f: Cnf, proof: ResolutionProof) -> bool:
    return proof_defect(f, proof) is None


def format_proof(proof: ResolutionProof) -> str:
    """One line per step: ``sid <pivot> <parent> <parent> : <lits> 0``."""
    lines = []
    for k, step in enumerate(proof.steps):
        sid = proof.num_inputs + k
        lits = " ".join(str(l) for l in step.resolvent)
        body = f"{lits} 0" if step.resolvent else "0"
        lines.append(f"{sid} {step.pivot} {step.parents[0]} {step.parents[1]} : {body}")
    return "\n".join(lines) + ("\n" if lines else "")


class PhasePolicy:
    """Decision-phase hook; the default always proposes false."""

    def decide_phase(self, var: int) -> bool:
        return False


class RandomizedPhasePolicy(PhasePolicy):
    """Chooses a random phase for every ``every``-th decision it sees.

    The counter spans all solver calls sharing this policy instance, so one
    engine run draws from a single seeded stream.
    """

    def __init__(self, seed: int = 0, every: int = 10):
        self._rng = random.Random(seed)
        self._every = every
        self._count = 0

    def decide_phase(self, var: int) -> bool:
        self._count += 1
        if self._count % self._every == 0:
            return self._rng.random() < 0.5
        return False


def _widx(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


_RESCALE_LIMIT = 1e100
_ACTIVITY_DECAY = 0.95
_RESTART_BASE = 128


def _luby(i: int) -> int:
    # Luby restart sequence for i >= 1: 1 1 2 1 1 2 4 ...
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    if (1 << k) - 1 == i:
        return 1 << (k - 1)
    return _luby(i - (1 << (k - 1)) + 1)


class _Solver:
    def __init__(self, num_vars, clauses, policy, log_proof, max_conflicts, deadline):
        self.n = num_vars
        self.policy = policy
        self.log_proof = log_proof
        self.max_conflicts = max_conflicts
        self.deadline = deadline

        self.input_clauses = tuple(clauses)
        self.num_inputs = len(clauses)
        self.clauses: list[list[int]] = []
        self.refs: list[int] = []  # proof reference per stored clause
        self.steps: list[ResolutionStep] = []

        n = num_vars
        self.values = [-1] * (n + 1)
        self.levels = [0] * (n + 1)
        self.reasons = [-1] * (n + 1)
        self.pos = [0] * (n + 1)
        self.watches: list[list[int]] = [[] for _ in range(2 * n + 2)]
        self.trail: list[int] = []
        self.lim: list[int] = []
        self.qhead = 0
        self.activity = [0.0] * (n + 1)
        self.inc = 1.0
        self.heap = [(0.0, v) for v in range(1, n + 1)]

        self.conflicts = 0
        self.decisions = 0
        self.props = 0

        self.empty_input: int | None = None
        self.units: list[int] = []
        for idx, clause in enumerate(clauses):
            stored = list(clause)
            self.clauses.append(stored)
            self.refs.append(idx)
            if not stored:
                if self.empty_input is None:
                    self.empty_input = idx
            elif len(stored) == 1:
                self.units.append(idx)
            else:
                self.watches[_widx(stored[0])].append(idx)
                self.watches[_widx(stored[1])].append(idx)

    # -- assignment bookkeeping ------------------------------------------

    def assign(self, lit: int, reason: int) -> None:
        var = abs(lit)
        self.values[var] = 1 if lit > 0 else 0
        self.levels[var] = len(self.lim)
        self.reasons[var] = reason
        self.pos[var] = len(self.trail)
        self.trail.append(lit)

    def backtrack(self, level: int) -> None:
        keep = self.lim[level]
        heap = self.heap
        for k in range(len(self.trail) - 1, keep - 1, -1):
            var = abs(self.trail[k])
            self.values[var] = -1
            self.reasons[var] = -1
            heapq.heappush(heap, (-self.activity[var], var))
        del self.trail[keep:]
        del self.lim[level:]
        self.qhead = len(self.trail)

    def bump(self, var: int) -> None:
        self.activity[var] += self.inc
        if self.activity[var] > _RESCALE_LIMIT:
            scale = 1.0 / _RESCALE_LIMIT
            for v in range(1, self.n + 1):
                self.activity[v] *= scale
            self.inc *= scale
            self.heap = [(-self.activity[v], v) for v in range(1, self.n + 1) if self.values[v] < 0]
            heapq.heapify(self.heap)
        elif self.values[var] < 0:
            heapq.heappush(self.heap, (-self.activity[var], var))

    # -- search ----------------------------------------------------------

    def propagate(self) -> int:
        values = self.values
        clauses = self.clauses
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            self.props += 1
            falsified = -lit
            widx = _widx(falsified)
            watch_list = self.watches[widx]
            kept: list[int] = []
            j = 0
            total = len(watch_list)
            while j < total:
                ci = watch_list[j]
                j += 1
                cl = clauses[ci]
                if cl[0] == falsified:
                    cl[0], cl[1] = cl[1], cl[0]
                w0 = cl[0]
                v0 = w0 if w0 > 0 else -w0
                val0 = values[v0]
                if val0 >= 0 and val0 == (1 if w0 > 0 else 0):
                    kept.append(ci)
                    continue
                moved = False
                for k in range(2, len(cl)):
                    lk = cl[k]
                    vk = lk if lk > 0 else -lk
                    valk = values[vk]
                    if valk < 0 or valk == (1 if lk > 0 else 0):
                        cl[1], cl[k] = cl[k], cl[1]
                        self.watches[_widx(cl[1])].append(ci)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(ci)
                if val0 < 0:
                    self.assign(w0, ci)
                else:
                    kept.extend(watch_list[j:])
                    self.watches[widx] = kept
                    return ci
            self.watches[widx] = kept
        return -1

    def decide(self) -> bool:
        heap = self.heap
        while heap:
            neg_act, var = heapq.heappop(heap)
            if self.values[var] >= 0 or -neg_act != self.activity[var]:
                continue
            self.decisions += 1
            self.lim.append(len(self.trail))
            phase = self.policy.decide_phase(var)
            self.assign(var if phase else -var, -1)
            return True
        return False

    # -- proof recording ---------------------------------------------------

    def _record(self, resolvent_set, pivot: int, ref_a: int, ref_b: int) -> int:
        sid = self.num_inputs + len(self.steps)
        resolvent = tuple(sorted(resolvent_set, key=abs))
        self.steps.append(ResolutionStep(resolvent, pivot, (ref_a, ref_b)))
        return sid

    def analyze(self, confl: int) -> tuple[list[int], int, int, bool]:
        """1-UIP conflict analysis.

        Returns (learned lits, backtrack level, proof ref, resolved flag);
        the first literal is asserting.  The learned clause is derived by
        resolving the conflict clause with the reasons of its deepest
        current-level literals; each resolution is logged as a proof step.
        When no resolution was needed the conflict clause itself is the
        learned clause and ``resolved`` is False.
        """
        level = len(self.lim)
        res = set(self.clauses[confl])
        ref = self.refs[confl]
        resolved = False
        for lit in res:
            self.bump(abs(lit))
        pos = self.pos
        levels = self.levels
        while True:
            at_level = [l for l in res if levels[abs(l)] == level]
            if len(at_level) <= 1:
                break
            piv_lit = max(at_level, key=lambda l: pos[abs(l)])
            pivot = abs(piv_lit)
            reason_idx = self.reasons[pivot]
            reason = self.clauses[reason_idx]
            res.discard(piv_lit)
            for lit in reason:
                if lit != -piv_lit and lit not in res:
                    res.add(lit)
                    self.bump(abs(lit))
            resolved = True
            if self.log_proof:
                ref = self._record(res, pivot, ref, self.refs[reason_idx])
        asserting = max(res, key=lambda l: pos[abs(l)])
        others = [l for l in res if l != asserting]
        others.sort(key=lambda l: -levels[abs(l)])
        bt = levels[abs(others[0])] if others else 0
        return [asserting] + others, bt, ref, resolved

    def finalize_unsat(self, confl: int) -> None:
        """Resolve a level-zero conflict down the trail to the empty clause."""
        res = set(self.clauses[confl])
        ref = self.refs[confl]
        pos = self.pos
        while res:
            piv_lit = max(res, key=lambda l: pos[abs(l)])
            pivot = abs(piv_lit)
            reason_idx = self.reasons[pivot]
            reason = self.clauses[reason_idx]
            res.discard(piv_lit)
            for lit in reason:
                if lit != -piv_lit:
                    res.add(lit)
            if self.log_proof:
                ref = self._record(res, pivot, ref, self.refs[reason_idx])

    def learn(self, lits: list[int], ref: int, existing: int | None) -> int:
        if existing is not None:
            return existing
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.refs.append(ref)
        if len(lits) >= 2:
            self.watches[_widx(lits[0])].append(ci)
            self.watches[_widx(lits[1])].append(ci)
        return ci

    # -- driving loop ------------------------------------------------------

    def run(self) -> SatResult:
        if self.empty_input is not None:
            return self._unsat()
        for idx in self.units:
            lit = self.clauses[idx][0]
            var = abs(lit)
            val = self.values[var]
            if val < 0:
                self.assign(lit, idx)
            elif val != (1 if lit > 0 else 0):
                self.finalize_unsat(idx)
                return self._unsat()

        restart_round = 1
        next_restart = self.conflicts + _RESTART_BASE * _luby(restart_round)
        while True:
            confl = self.propagate()
            if confl >= 0:
                self.conflicts += 1
                if not self.lim:
                    self.finalize_unsat(confl)
                    return self._unsat()
                if self.max_conflicts is not None and self.conflicts >= self.max_conflicts:
                    return SatResult(BUDGET, conflicts=self.conflicts,
                                     decisions=self.decisions, propagations=self.props)
                if self.deadline is not None and self.conflicts % 32 == 0 \
                        and time.monotonic() > self.deadline:
                    return SatResult(BUDGET, conflicts=self.conflicts,
                                     decisions=self.decisions, propagations=self.props)
                lits, bt, ref, resolved = self.analyze(confl)
                existing = None if resolved else confl
                self.backtrack(bt)
                ci = self.learn(lits, ref, existing)
                self.assign(lits[0], ci)
                self.inc /= _ACTIVITY_DECAY
                if self.conflicts >= next_restart and self.lim:
                    self.backtrack(0)
                    restart_round += 1
                    next_restart = self.conflicts + _RESTART_BASE * _luby(restart_round)
            else:
                if len(self.trail) == self.n:
                    point = Point(tuple(self.values[1:]))
                    return SatResult(SAT, point=point, conflicts=self.conflicts,
                                     decisions=self.decisions, propagations=self.props)
                if not self.decide():
                    # Stale-heap fallback; every unassigned variable is pushed
                    # back on backtrack, so this should not trigger.
                    for var in range(1, self.n + 1):
                        if self.values[var] < 0:
                            heapq.heappush(self.heap, (-self.activity[var], var))
                    if not self.decide():
                        raise RuntimeError("internal: no decision variable available")

    def _unsat(self) -> SatResult:
        return SatResult(UNSAT, conflicts=self.conflicts,
                         decisions=self.decisions, propagations=self.props)


def _trim_steps(num_inputs: int, steps: list[ResolutionStep]) -> tuple[ResolutionStep, ...]:
    """Cone of the final (empty-clause) step, ids remapped."""
    if not steps:
        return ()
    keep = set()
    stack = [len(steps) - 1]
    while stack:
        k = stack.pop()
        if k in keep:
            continue
        keep.add(k)
        for p in steps[k].parents:
            if p >= num_inputs:
                stack.append(p - num_inputs)
    order = sorted(keep)
    remap = {old: num_inputs + new for new, old in enumerate(order)}
    trimmed = []
    for old in order:
        step = steps[old]
        parents = tuple(p if p < num_inputs else remap[p - num_inputs] for p in step.parents)
        trimmed.append(ResolutionStep(step.resolvent, step.pivot, parents))
    return tuple(trimmed)


def solve(f: Cnf, assumptions=(), policy: PhasePolicy | None = None, *,
          log_proof: bool = True, trim: bool = True,
          max_conflicts: int | None = None, deadline: float | None = None) -> SatResult:
    """Solve ``f`` under the given assumption literals.

    Assumptions are injected as unit input clauses, so an unsatisfiability
    proof is a proof of ``f`` plus those units.  A sat verdict is checked
    against every clause before it is returned; an unsat proof is validated
    with ``check_proof``.
    """
    policy = policy or PhasePolicy()
    clauses = list(f.clauses)
    for a in assumptions:
        if a == 0 or abs(a) > f.num_vars:
            raise ValueError(f"assumption literal {a} is out of range")
        clauses.append((a,))
    solver = _Solver(f.num_vars, clauses, policy, log_proof, max_conflicts, deadline)
    result = solver.run()
    if result.status == SAT:
        point = result.point
        for clause in clauses:
            if not point.satisfies_clause(clause):
                raise RuntimeError("internal: sat verdict does not satisfy the formula")
    elif result.status == UNSAT and log_proof:
        steps = _trim_steps(solver.num_inputs, solver.steps) if trim else tuple(solver.steps)
        proof = ResolutionProof(solver.input_clauses, steps, tuple(assumptions))
        defect = proof_defect(f, proof)
        if defect is not None:
            raise RuntimeError(f"internal: invalid resolution proof: {defect}")
        result.proof = proof
    return result
