"""Baseline bug hunters: random walk and bounded model checking.

The random walk restarts from the reset state whenever a walk reaches its
length cap, sampling one input vector per step from a single seeded stream.
The property is checked on the current state under the sampled input (no
satisfiability call), which can under-detect input-dependent properties
relative to the engine's existential check; see the README.

BMC unrolls the transition relation depth by depth from zero, so the first
satisfiable depth is the minimal counterexample depth.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .aiger import AigModel, eval_bad, initial_state, simulate_step
from .cnf import encode_bmc
from .engine import BUDGET_EXHAUSTED, BUG, Counterexample, Verdict
from .sat import BUDGET, SAT, solve


@dataclass
class RandConfig:
    max_tries: int = 10_000
    max_length: int = 100
    seed: int = 0
    time_limit_s: float | None = None


@dataclass
class RandStats:
    steps: int = 0
    tries: int = 0
    states: int = 0


def run_rand(m: AigModel, cfg: RandConfig | None = None) -> Verdict:
    """Random walks from the reset state; one transition per step.

    Exhausting the budget takes exactly ``max_tries * max_length`` steps.
    """
    cfg = cfg or RandConfig()
    if cfg.max_tries < 1 or cfg.max_length < 1:
        raise ValueError("max_tries and max_length must be positive")
    rng = random.Random(cfg.seed)
    n_in = m.num_inputs
    init = initial_state(m)
    stats = RandStats()
    deadline = None
    if cfg.time_limit_s is not None:
        deadline = time.monotonic() + cfg.time_limit_s
    for _ in range(cfg.max_tries):
        stats.tries += 1
        curr = init
        states = [init]
        inputs = []
        for _ in range(cfg.max_length):
            x = tuple(rng.randrange(2) for _ in range(n_in))
            if eval_bad(m, curr, x):
                cex = Counterexample(tuple(states), tuple(inputs), x)
                return Verdict(BUG, cex, stats)
            curr = simulate_step(m, curr, x)
            stats.steps += 1
            states.append(curr)
            inputs.append(x)
        if deadline is not None and time.monotonic() > deadline:
            return Verdict(BUDGET_EXHAUSTED, None, stats, reason="time")
    return Verdict(BUDGET_EXHAUSTED, None, stats, reason="tries")


@dataclass
class BmcConfig:
    max_depth: int = 100
    conflict_cap: int | None = None  # per-depth
    time_limit_s: float | None = None


@dataclass
class BmcStats:
    depth: int | None = None
    refuted_depth: int = -1
    sat_calls: int = 0


def run_bmc(m: AigModel, cfg: BmcConfig | None = None) -> Verdict:
    """Check bad at depth 0, 1, ... until satisfiable or out of budget."""
    cfg = cfg or BmcConfig()
    if cfg.max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    init = initial_state(m)
    stats = BmcStats()
    deadline = None
    if cfg.time_limit_s is not None:
        deadline = time.monotonic() + cfg.time_limit_s
    for depth in range(cfg.max_depth + 1):
        f, input_frames = encode_bmc(m, depth, init)
        stats.sat_calls += 1
        result = solve(f, log_proof=False, max_conflicts=cfg.conflict_cap,
                       deadline=deadline)
        if result.status == BUDGET:
            return Verdict(BUDGET_EXHAUSTED, None, stats, reason="solver budget")
        if result.status == SAT:
            point = result.point
            frames = [tuple(point.value(v) for v in xs) for xs in input_frames]
            states = [init]
            for x in frames[:-1]:
                states.append(simulate_step(m, states[-1], x))
            final_input = frames[-1]
            if eval_bad(m, states[-1], final_input) != 1:
                raise RuntimeError("internal: unrolled model does not replay to a bad state")
            stats.depth = depth
            cex = Counterexample(tuple(states), tuple(frames[:-1]), final_input)
            return Verdict(BUG, cex, stats)
        stats.refuted_depth = depth
        if deadline is not None and time.monotonic() > deadline:
            return Verdict(BUDGET_EXHAUSTED, None, stats, reason="time")
    return Verdict(BUDGET_EXHAUSTED, None, stats, reason="depth")
