"""Clausal encodings of one-step circuit behavior.

Literals are DIMACS-style nonzero ints (+v / -v over variables >= 1), in a
namespace separate from AIGER literals; a ``VarMap`` mediates.  The step
formula for a state ``s`` substitutes the present-state bits as constants
(satisfied clauses dropped, falsified literals removed by folding), so the
formula ranges over next-state variables, transition inputs, a second input
copy feeding the property cone at the next state, and Tseitin internals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .aiger import AigModel, InputVector, State

Clause = tuple[int, ...]

ROLE_NEXT = "next-state"
ROLE_INPUT = "input"
ROLE_BAD_INPUT = "bad-check-input"
ROLE_INTERNAL = "internal"


def make_clause(lits) -> Clause:
    """Canonical clause: sorted by variable, duplicates merged, no tautologies."""
    by_var: dict[int, int] = {}
    for lit in lits:
        if lit == 0:
            raise ValueError("literal 0 is not allowed")
        var = abs(lit)
        prev = by_var.get(var)
        if prev is None:
            by_var[var] = lit
        elif prev != lit:
            raise ValueError(f"clause has opposite literals of variable {var}")
    return tuple(sorted(by_var.values(), key=abs))


@dataclass
class Cnf:
    clauses: list[Clause]
    num_vars: int
    var_roles: dict[int, str]


@dataclass(frozen=True)
class VarMap:
    """Bijections between circuit structure and CNF variables.

    Present-state bits are substituted constants, recorded in ``curr_bits``;
    there are no present-state CNF variables.
    """

    curr_bits: State
    next_vars: tuple[int, ...]
    input_vars: tuple[int, ...]
    bad_input_vars: tuple[int, ...]

    def decode_next(self, p) -> State:
        return tuple(p.value(v) for v in self.next_vars)

    def decode_inputs(self, p) -> InputVector:
        return tuple(p.value(v) for v in self.input_vars)

    def decode_bad_inputs(self, p) -> InputVector:
        return tuple(p.value(v) for v in self.bad_input_vars)

    def present_state_bit(self, var: int) -> int | None:
        """Substituted value of a present-state CNF variable, or None.

        Present-state variables never reach the CNF in this encoding, so
        this is always None; proof encoding consults it before deciding
        whether a pivot needs to be pinned to the current state.
        """
        return None


def decode_model(p, vm: VarMap) -> tuple[State, InputVector]:
    """Project a complete point onto (next state, transition inputs)."""
    need = max(vm.next_vars + vm.input_vars, default=0)
    if len(p.values) < need:
        raise ValueError("point does not assign all mapped variables")
    return vm.decode_next(p), vm.decode_inputs(p)


# Folded gate values: a CNF literal (int) or one of the constants "0"/"1".
_CONSTS = ("0", "1")


def _negate(val):
    if isinstance(val, str):
        return "1" if val == "0" else "0"
    return -val


class _Builder:
    def __init__(self):
        self.clauses: list[Clause] = []
        self.num_vars = 0
        self.var_roles: dict[int, str] = {}

    def new_var(self, role: str) -> int:
        self.num_vars += 1
        self.var_roles[self.num_vars] = role
        return self.num_vars

    def add(self, lits) -> None:
        self.clauses.append(make_clause(lits))

    def add_empty(self) -> None:
        self.clauses.append(())

    def finish(self) -> Cnf:
        return Cnf(self.clauses, self.num_vars, self.var_roles)


class _Frame:
    """Encodes the combinational cone of one time frame.

    ``leaves`` maps AIGER variables of inputs and latches to folded values
    for this frame; gate values are cached, and-gates get the usual
    three-clause Tseitin definition unless constant folding removes them.
    """

    def __init__(self, builder: _Builder, gate_table: dict[int, tuple[int, int]], leaves):
        self.builder = builder
        self.gate_table = gate_table
        self.cache: dict[int, object] = {0: "0"}
        self.cache.update(leaves)

    def lit(self, aiger_lit: int):
        val = self._var(aiger_lit >> 1)
        return _negate(val) if aiger_lit & 1 else val

    def _var(self, var: int):
        cached = self.cache.get(var)
        if cached is not None:
            return cached
        stack = [var]
        while stack:
            v = stack[-1]
            if v in self.cache:
                stack.pop()
                continue
            rhs0, rhs1 = self.gate_table[v]
            pending = [w >> 1 for w in (rhs0, rhs1) if (w >> 1) not in self.cache]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            self.cache[v] = self._and(self.lit(rhs0), self.lit(rhs1))
        return self.cache[var]

    def _and(self, a, b):
        if a == "0" or b == "0":
            return "0"
        if a == "1":
            return b
        if b == "1":
            return a
        if a == b:
            return a
        if a == -b:
            return "0"
        g = self.builder.new_var(ROLE_INTERNAL)
        self.builder.add((-g, a))
        self.builder.add((-g, b))
        self.builder.add((g, -a, -b))
        return g


def _gate_table(m: AigModel) -> dict[int, tuple[int, int]]:
    return {lhs >> 1: (rhs0, rhs1) for lhs, rhs0, rhs1 in m.and_gates}


def _assert_lit(builder: _Builder, val) -> None:
    # Asserting a constant-0 value yields the empty clause: legitimately
    # unsatisfiable, not an error.
    if val == "0":
        builder.add_empty()
    elif val != "1":
        builder.add((val,))


def encode_step_formula(m: AigModel, s: State) -> tuple[Cnf, VarMap]:
    """Formula satisfiable iff some one-step successor of ``s`` can be bad.

    Structure: Tseitin of the transition functions with the present state
    substituted by the constant bits of ``s``, next-state variables tied to
    the encoded next functions, and the property cone re-encoded at the next
    state over a fresh copy of the inputs, asserted true.
    """
    if len(s) != m.num_latches:
        raise ValueError(f"state width {len(s)} != {m.num_latches} latches")
    b = _Builder()
    table = _gate_table(m)
    next_vars = tuple(b.new_var(ROLE_NEXT) for _ in m.latches)
    input_vars = tuple(b.new_var(ROLE_INPUT) for _ in m.inputs)
    bad_input_vars = tuple(b.new_var(ROLE_BAD_INPUT) for _ in m.inputs)

    leaves = {lit >> 1: input_vars[k] for k, lit in enumerate(m.inputs)}
    leaves.update({la.lit >> 1: _CONSTS[s[k]] for k, la in enumerate(m.latches)})
    frame = _Frame(b, table, leaves)
    for k, la in enumerate(m.latches):
        val = frame.lit(la.next)
        nv = next_vars[k]
        if isinstance(val, str):
            b.add((nv,) if val == "1" else (-nv,))
        else:
            b.add((-nv, val))
            b.add((nv, -val))

    bad_leaves = {lit >> 1: bad_input_vars[k] for k, lit in enumerate(m.inputs)}
    bad_leaves.update({la.lit >> 1: next_vars[k] for k, la in enumerate(m.latches)})
    bad_frame = _Frame(b, table, bad_leaves)
    _assert_lit(b, bad_frame.lit(m.bad))

    return b.finish(), VarMap(tuple(s), next_vars, input_vars, bad_input_vars)


def encode_bad_check(m: AigModel, s: State) -> tuple[Cnf, VarMap]:
    """Formula satisfiable iff some input assignment makes ``s`` bad."""
    if len(s) != m.num_latches:
        raise ValueError(f"state width {len(s)} != {m.num_latches} latches")
    b = _Builder()
    input_vars = tuple(b.new_var(ROLE_INPUT) for _ in m.inputs)
    leaves = {lit >> 1: input_vars[k] for k, lit in enumerate(m.inputs)}
    leaves.update({la.lit >> 1: _CONSTS[s[k]] for k, la in enumerate(m.latches)})
    frame = _Frame(b, _gate_table(m), leaves)
    _assert_lit(b, frame.lit(m.bad))
    return b.finish(), VarMap(tuple(s), (), input_vars, ())


def encode_bmc(m: AigModel, depth: int, init: State) -> tuple[Cnf, list[tuple[int, ...]]]:
    """Unrolled formula: bad holds ``depth`` transitions after ``init``.

    Returns the formula and one tuple of input variables per frame
    (frames 0..depth-1 drive transitions, frame depth feeds the property
    cone).  Latch values are folded through the frames; no explicit state
    variables are introduced.
    """
    b = _Builder()
    table = _gate_table(m)
    input_frames: list[tuple[int, ...]] = []
    state_vals: list[object] = [_CONSTS[bit] for bit in init]
    for _ in range(depth):
        xs = tuple(b.new_var(ROLE_INPUT) for _ in m.inputs)
        input_frames.append(xs)
        leaves = {lit >> 1: xs[k] for k, lit in enumerate(m.inputs)}
        leaves.update({la.lit >> 1: state_vals[k] for k, la in enumerate(m.latches)})
        frame = _Frame(b, table, leaves)
        state_vals = [frame.lit(la.next) for la in m.latches]
    xs = tuple(b.new_var(ROLE_INPUT) for _ in m.inputs)
    input_frames.append(xs)
    leaves = {lit >> 1: xs[k] for k, lit in enumerate(m.inputs)}
    leaves.update({la.lit >> 1: state_vals[k] for k, la in enumerate(m.latches)})
    frame = _Frame(b, table, leaves)
    _assert_lit(b, frame.lit(m.bad))
    return b.finish(), input_frames


def to_dimacs(f: Cnf, comments=()) -> str:
    """Standard DIMACS text: ``p cnf V C`` then one 0-terminated clause per line."""
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    for clause in f.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0" if clause else "0")
    return "\n".join(lines) + "\n"
