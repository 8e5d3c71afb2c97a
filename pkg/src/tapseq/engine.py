"""The main exploration loop.

Reachable states are discovered by proving, per visited state, that no
one-step successor violates the property, then mining the proof's boundary
points for (state, input) pairs; simulating those inputs yields successor
states that are reachable by construction.  A satisfiable check instead
hands over a bad successor and the parent chain reconstructs the trace.

The run ends with a bug (validated counterexample), convergence (no active
states left before a bug was found; nothing is proved by this), or an
exhausted state/time budget.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass

from .aiger import AigModel, InputVector, State, eval_bad, initial_state, simulate_step
from .cnf import VarMap, encode_bad_check, encode_step_formula
from .proofenc import BoundaryPoint, enc_resolutions
from .sat import BUDGET, SAT, PhasePolicy, RandomizedPhasePolicy, solve

BUG = "bug"
CONVERGED = "converged"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class Counterexample:
    """Trace from the reset state to a state made bad by ``final_bad_input``."""

    states: tuple[State, ...]
    inputs: tuple[InputVector, ...]
    final_bad_input: InputVector


@dataclass
class EngineStats:
    states: int = 0
    states_processed: int = 0
    frames: int = 0
    sat_calls: int = 0
    proof_steps: int = 0
    boundary_points: int = 0
    discarded_points: int = 0
    skipped_state_pivots: int = 0
    point_budget_hits: int = 0


@dataclass
class Verdict:
    kind: str
    counterexample: Counterexample | None = None
    stats: object = None
    reason: str | None = None


@dataclass
class StateRecord:
    state: State
    frame: int
    parent: State | None
    input_from_parent: InputVector | None


class StateStore:
    """Visited states with parent links, plus the active worklist.

    A state enters ``all_states`` at most once; children sit one frame after
    their parent.  The worklist pops FIFO for breadth-first order (child
    frames are parent+1, so popped frames never decrease) or LIFO for
    depth-first.
    """

    def __init__(self, model: AigModel, init: State):
        self.model = model
        self.all_states: dict[State, StateRecord] = {
            init: StateRecord(init, 0, None, None)
        }
        self.act_states: deque[State] = deque([init])

    def __len__(self) -> int:
        return len(self.all_states)

    def pop(self, order: str) -> State:
        return self.act_states.popleft() if order == "bfs" else self.act_states.pop()

    def add(self, state: State, parent: State, inp: InputVector) -> bool:
        if state in self.all_states:
            return False
        frame = self.all_states[parent].frame + 1
        self.all_states[state] = StateRecord(state, frame, parent, inp)
        self.act_states.append(state)
        return True


@dataclass
class EngineConfig:
    max_states: int = 40_000
    time_limit_s: float = 180.0
    order: str = "bfs"  # or "dfs"
    randomize: bool = False
    seed: int = 0
    trim_proofs: bool = True
    point_conflict_cap: int = 10_000


def make_policy(cfg: EngineConfig) -> PhasePolicy:
    return RandomizedPhasePolicy(cfg.seed) if cfg.randomize else PhasePolicy()


def update_states(store: StateStore, bp: BoundaryPoint, vm: VarMap,
                  curr: State, m: AigModel) -> bool:
    """Decode (state, input) from a boundary point and record the successor.

    The present state of the point is the substituted current state by
    construction; the transition function then gives the successor, which is
    inserted with its parent link when unseen.
    """
    if vm.curr_bits != curr:
        raise RuntimeError("internal: boundary point does not belong to the current state")
    inp = vm.decode_inputs(bp.point)
    successor = simulate_step(m, curr, inp)
    return store.add(successor, curr, inp)


def reconstruct_trace(store: StateStore, bad_state: State,
                      final_input: InputVector) -> Counterexample:
    """Walk parent links back to the reset state, validating every hop."""
    m = store.model
    record = store.all_states.get(bad_state)
    if record is None:
        raise RuntimeError("internal: bad state missing from the store")
    states = [bad_state]
    inputs: list[InputVector] = []
    while record.parent is not None:
        states.append(record.parent)
        inputs.append(record.input_from_parent)
        record = store.all_states[record.parent]
    states.reverse()
    inputs.reverse()
    if states[0] != initial_state(m):
        raise RuntimeError("internal: parent chain does not reach the reset state")
    for i, inp in enumerate(inputs):
        if simulate_step(m, states[i], inp) != states[i + 1]:
            raise RuntimeError("internal: parent chain fails simulation")
    if eval_bad(m, states[-1], final_input) != 1:
        raise RuntimeError("internal: final state is not bad under the recorded input")
    return Counterexample(tuple(states), tuple(inputs), final_input)


def run_tapseq(m: AigModel, cfg: EngineConfig | None = None, *,
               on_pop=None, dump_cnf=None, dump_points=None,
               dump_proof=None) -> Verdict:
    """Explore states extracted from one-step safety proofs until a verdict.

    ``on_pop(state, frame)``, ``dump_cnf(index, cnf)``,
    ``dump_points(index, boundary_point, step_id)`` and
    ``dump_proof(index, proof)`` are optional observation hooks.
    """
    cfg = cfg or EngineConfig()
    if cfg.max_states < 1:
        raise ValueError("max_states must be at least 1")
    stats = EngineStats()
    policy = make_policy(cfg)
    deadline = time.monotonic() + cfg.time_limit_s

    init = initial_state(m)
    f0, vm0 = encode_bad_check(m, init)
    stats.sat_calls += 1
    first = solve(f0, policy=policy, log_proof=False)
    if first.status == SAT:
        witness_input = vm0.decode_inputs(first.point)
        stats.states = 1
        cex = Counterexample((init,), (), witness_input)
        if eval_bad(m, init, witness_input) != 1:
            raise RuntimeError("internal: initial bad check decoded a non-bad input")
        return Verdict(BUG, cex, stats)

    store = StateStore(m, init)
    index = 0
    while store.act_states:
        stats.states = len(store)
        if len(store) > cfg.max_states:
            return Verdict(BUDGET_EXHAUSTED, None, stats, reason="states")
        if time.monotonic() > deadline:
            return Verdict(BUDGET_EXHAUSTED, None, stats, reason="time")
        curr = store.pop(cfg.order)
        record = store.all_states[curr]
        stats.states_processed += 1
        stats.frames = max(stats.frames, record.frame)
        if on_pop is not None:
            on_pop(curr, record.frame)

        f, vm = encode_step_formula(m, curr)
        if dump_cnf is not None:
            dump_cnf(index, f)
        stats.sat_calls += 1
        result = solve(f, policy=policy, log_proof=True, trim=cfg.trim_proofs,
                       deadline=deadline)
        if result.status == BUDGET:
            return Verdict(BUDGET_EXHAUSTED, None, stats, reason="time")
        if result.status == SAT:
            bad_next, inp = vm.decode_next(result.point), vm.decode_inputs(result.point)
            final_input = vm.decode_bad_inputs(result.point)
            if simulate_step(m, curr, inp) != bad_next:
                raise RuntimeError("internal: satisfying point disagrees with simulation")
            store.add(bad_next, curr, inp)
            stats.states = len(store)
            return Verdict(BUG, reconstruct_trace(store, bad_next, final_input), stats)

        if dump_proof is not None:
            dump_proof(index, result.proof)

        def on_point(bp, _index=index):
            if dump_points is not None:
                dump_points(_index, bp, None)
            update_states(store, bp, vm, curr, m)

        enc = enc_resolutions(f, result.proof, curr, vm, on_point,
                              policy=policy, max_conflicts=cfg.point_conflict_cap)
        stats.proof_steps += enc.steps_seen
        stats.sat_calls += enc.sat_calls
        stats.boundary_points += len(enc.points)
        stats.discarded_points += enc.discarded
        stats.skipped_state_pivots += enc.state_pivots_skipped
        stats.point_budget_hits += enc.budget_hits
        index += 1

    stats.states = len(store)
    return Verdict(CONVERGED, None, stats)


@dataclass(frozen=True)
class OracleResult:
    status: str  # "reachable" | "unreachable" | "inconclusive"
    depth: int | None
    states_explored: int
    counterexample: Counterexample | None = None


def explicit_oracle(m: AigModel, max_states: int = 1 << 20,
                    max_input_bits: int = 12) -> OracleResult:
    """Ground-truth breadth-first reachability by input enumeration.

    Visits states in frame order, checking at each state whether some input
    assignment raises the property literal; the first hit is at minimal
    depth.  Only practical for small circuits; wider input vectors than
    ``max_input_bits`` or more states than ``max_states`` give up with an
    inconclusive result.
    """
    if m.num_inputs > max_input_bits:
        return OracleResult("inconclusive", None, 0)
    all_inputs = [
        tuple((k >> i) & 1 for i in range(m.num_inputs))
        for k in range(1 << m.num_inputs)
    ]
    init = initial_state(m)
    store = StateStore(m, init)
    queue = store.act_states
    while queue:
        s = queue.popleft()
        depth = store.all_states[s].frame
        for x in all_inputs:
            if eval_bad(m, s, x):
                return OracleResult("reachable", depth, len(store),
                                    reconstruct_trace(store, s, x))
        for x in all_inputs:
            store.add(simulate_step(m, s, x), s, x)
            if len(store) > max_states:
                return OracleResult("inconclusive", None, len(store))
    return OracleResult("unreachable", None, len(store))
