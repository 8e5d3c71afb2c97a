"""Encoding resolution proofs by sets of boundary points.

A point is a v-boundary point of a formula when it falsifies the formula
and every falsified clause contains variable v.  For a resolution step with
resolvent C and pivot v, a candidate is found by satisfying the relaxation
(F minus the clauses containing v) plus the negation of C: such a point can
only falsify clauses containing v, and it falsifies C, so together with its
v-flip it makes the step legal.  The flip is kept implicit.

Pivots on substituted present-state variables cannot occur here (the step
formula carries no such variables), so the re-pinning of state pivots to the
current state degenerates to a no-op; the skip counter is still reported.
Candidates whose boundary property fails verification are discarded and
counted rather than returned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .cnf import Cnf, Clause, VarMap
from .sat import BUDGET, SAT, PhasePolicy, Point, ResolutionProof, solve

log = logging.getLogger(__name__)

DEFAULT_POINT_CONFLICT_CAP = 10_000


@dataclass(frozen=True)
class BoundaryPoint:
    point: Point
    pivot: int


@dataclass
class PointEncoding:
    """Deduplicated boundary points with the steps they legalize.

    ``points`` maps each materialized point to the ids of the proof steps it
    (together with its implicit pivot flip) legalizes; ``flip_pivots`` marks
    which flips are implied.  Counters describe the encoding pass.
    """

    points: dict[Point, set[int]] = field(default_factory=dict)
    flip_pivots: dict[Point, set[int]] = field(default_factory=dict)
    steps_seen: int = 0
    sat_calls: int = 0
    discarded: int = 0
    state_pivots_skipped: int = 0
    budget_hits: int = 0

    def add(self, bp: BoundaryPoint, step_id: int) -> bool:
        new = bp.point not in self.points
        self.points.setdefault(bp.point, set()).add(step_id)
        self.flip_pivots.setdefault(bp.point, set()).add(bp.pivot)
        return new

    def effective_points(self) -> set[Point]:
        """Materialized points plus all implied pivot flips."""
        pts = set(self.points)
        for p, pivots in self.flip_pivots.items():
            for v in pivots:
                pts.add(p.flip(v))
        return pts


def is_boundary_point(f: Cnf, p: Point, pivot: int) -> bool:
    """Def check: p falsifies f and every falsified clause contains pivot."""
    falsified = 0
    for clause in f.clauses:
        if p.falsifies_clause(clause):
            falsified += 1
            if not any(abs(l) == pivot for l in clause):
                return False
    return falsified > 0


def enc_clause(f: Cnf, c: Clause, pivot: int, curr_state, vm: VarMap, *,
               policy: PhasePolicy | None = None,
               max_conflicts: int = DEFAULT_POINT_CONFLICT_CAP,
               stats: PointEncoding | None = None) -> BoundaryPoint | None:
    """A pivot-boundary point of ``f`` falsifying the resolvent ``c``, if any.

    Solves the relaxation described in the module docstring.  Returns None
    when the relaxation is unsatisfiable, the conflict budget is exhausted,
    or the verified boundary property does not hold for the candidate.
    """
    relaxed = [cl for cl in f.clauses if not any(abs(l) == pivot for l in cl)]
    relaxed.extend((-l,) for l in c)
    g = Cnf(relaxed, f.num_vars, f.var_roles)
    result = solve(g, policy=policy, log_proof=False, max_conflicts=max_conflicts)
    if stats is not None:
        stats.sat_calls += 1
    if result.status == BUDGET:
        log.warning("boundary point search hit the conflict cap (pivot %d)", pivot)
        if stats is not None:
            stats.budget_hits += 1
        return None
    if result.status != SAT:
        return None
    p = result.point
    pinned = vm.present_state_bit(pivot)
    if pinned is not None and p.value(pivot) != pinned:
        p = p.flip(pivot)
    if not p.falsifies_clause(c):
        raise RuntimeError("internal: relaxation model does not falsify the resolvent")
    if not is_boundary_point(f, p, pivot):
        if stats is not None:
            stats.discarded += 1
        return None
    return BoundaryPoint(p, pivot)


def enc_resolutions(f: Cnf, proof: ResolutionProof, curr_state, vm: VarMap,
                    on_point=None, *, policy: PhasePolicy | None = None,
                    max_conflicts: int = DEFAULT_POINT_CONFLICT_CAP) -> PointEncoding:
    """Walk the proof in step order, collecting one boundary point per step.

    ``on_point`` is invoked once per fresh (deduplicated) point; steps whose
    relaxation is unsatisfiable are skipped silently, and state-variable
    pivots would be skipped and counted (none exist under substitution).
    """
    enc = PointEncoding()
    for step_id, step in enumerate(proof.steps):
        enc.steps_seen += 1
        if vm.present_state_bit(step.pivot) is not None:
            # Unreachable with the substituted encoding; mirrors the partial
            # encoding that leaves state-variable resolutions unlegalized.
            enc.state_pivots_skipped += 1
            continue
        bp = enc_clause(f, step.resolvent, step.pivot, curr_state, vm,
                        policy=policy, max_conflicts=max_conflicts, stats=enc)
        if bp is None:
            continue
        if enc.add(bp, step_id) and on_point is not None:
            on_point(bp)
    if enc.state_pivots_skipped:
        log.info("skipped %d state-variable pivots", enc.state_pivots_skipped)
    return enc


def is_legal_resolution(enc: PointEncoding, c1: Clause, c2: Clause, pivot: int) -> bool:
    """Whether the encoding witnesses resolving ``c1`` and ``c2`` on ``pivot``.

    True iff two points of the encoding (implied flips included) falsify the
    respective parents and differ exactly in the pivot variable.
    """
    pts = enc.effective_points()
    falsify_c1 = [p for p in pts if p.falsifies_clause(c1)]
    if not falsify_c1:
        return False
    falsify_c2 = {p for p in pts if p.falsifies_clause(c2)}
    for p in falsify_c1:
        if p.flip(pivot) in falsify_c2:
            return True
    return False


def project_tests(enc: PointEncoding, vm: VarMap) -> set:
    """Deduplicated input projections of the encoding's points."""
    return {vm.decode_inputs(p) for p in enc.effective_points()}
