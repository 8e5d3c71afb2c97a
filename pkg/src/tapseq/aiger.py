"""AIGER circuit files: parsing, printing, and bit-level simulation.

Handles versions 1.0 and 1.9 in both the ASCII ("aag") and binary ("aig")
encodings, including the delta-compressed and-gate section of the binary
format.  Literals follow the AIGER convention: variable index ``lit >> 1``,
negation flag ``lit & 1``, and literals 0/1 denote constant false/true.

The property literal (``bad``) is selected from the bad-state section when
one is present, falling back to the outputs; index 0 unless the caller
selects another property.  Invariant-constraint, justice and fairness
sections are rejected, as are uninitialized latches (reset to themselves):
the algorithms here assume a single, fully determined initial state.

States and input vectors are plain tuples of 0/1 ints, one bit per latch
(respectively input) in declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass

State = tuple[int, ...]
InputVector = tuple[int, ...]


class AigerError(Exception):
    """Malformed AIGER content; carries the byte offset of the bad field."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte {offset})"
        super().__init__(message)
        self.offset = offset


class UnsupportedModelError(Exception):
    """Well-formed AIGER that uses features this tool does not handle."""


@dataclass(frozen=True)
class Latch:
    lit: int
    next: int
    reset: int  # 0 or 1; uninitialized latches are rejected at parse time


@dataclass(frozen=True)
class AigModel:
    """Immutable and-inverter graph with latches and one selected property.

    ``gate_order`` is a topological evaluation order (indices into
    ``and_gates``); the parser guarantees the gate graph is acyclic and that
    every referenced variable is defined.
    """

    max_var: int
    inputs: tuple[int, ...]
    latches: tuple[Latch, ...]
    outputs: tuple[int, ...]
    bads: tuple[int, ...]
    and_gates: tuple[tuple[int, int, int], ...]
    property_index: int
    bad: int
    gate_order: tuple[int, ...]

    @property
    def num_inputs(self) -> int:
        return len(self.inputs)

    @property
    def num_latches(self) -> int:
        return len(self.latches)

    @property
    def num_properties(self) -> int:
        return len(self.bads) if self.bads else len(self.outputs)


class _Reader:
    """Byte cursor over raw file content, tracking offsets for errors."""

    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def line(self, what: str) -> str:
        if self.pos >= len(self.data):
            raise AigerError(f"unexpected end of file reading {what}", self.pos)
        nl = self.data.find(b"\n", self.pos)
        if nl < 0:
            nl = len(self.data)
        text = self.data[self.pos:nl].decode("latin-1")
        self.pos = nl + 1
        return text

    def byte(self, what: str) -> int:
        if self.pos >= len(self.data):
            raise AigerError(f"unexpected end of file reading {what}", self.pos)
        b = self.data[self.pos]
        self.pos += 1
        return b


def _uint(token: str, what: str, offset: int) -> int:
    if not token.isdigit():
        raise AigerError(f"{what}: expected unsigned integer, got {token!r}", offset)
    return int(token)


def _delta(r: _Reader, what: str) -> int:
    # LEB128-style: 7 bits per byte, high bit marks continuation.
    start = r.pos
    value = 0
    shift = 0
    while True:
        b = r.byte(what)
        value |= (b & 0x7F) << shift
        if not b & 0x80:
            return value
        shift += 7
        if shift > 35:
            raise AigerError(f"{what}: delta encoding does not terminate", start)


def parse_aiger(data: bytes, property_index: int = 0) -> AigModel:
    """Parse ASCII or binary AIGER into a validated model.

    Latches without an explicit reset default to 0.  The bad literal is
    ``bads[property_index]`` when a bad-state section exists, otherwise
    ``outputs[property_index]``.
    """
    r = _Reader(data)
    hdr_off = r.pos
    fields = r.line("header").split()
    if len(fields) < 6 or len(fields) > 10 or fields[0] not in ("aag", "aig"):
        raise AigerError("malformed header: expected 'aag'/'aig' plus 5 to 9 counts", hdr_off)
    counts = [_uint(tok, "header count", hdr_off) for tok in fields[1:]]
    counts += [0] * (9 - len(counts))
    max_var, n_in, n_latch, n_out, n_and, n_bad, n_constr, n_just, n_fair = counts
    if n_constr:
        raise UnsupportedModelError("invariant constraint sections are not supported")
    if n_just or n_fair:
        raise UnsupportedModelError("justice/fairness sections are not supported")
    binary = fields[0] == "aig"
    if binary and max_var < n_in + n_latch + n_and:
        raise AigerError("malformed header: binary format requires contiguous variables", hdr_off)
    max_lit = 2 * max_var + 1

    def check_lit(lit: int, what: str, offset: int) -> int:
        if lit > max_lit:
            raise AigerError(f"{what} literal {lit} out of range (max {max_lit})", offset)
        return lit

    defined: dict[int, str] = {}  # var -> "input" | "latch" | "and"

    def define(var: int, kind: str, offset: int) -> None:
        if var in defined or var == 0:
            raise AigerError(f"variable {var} defined twice", offset)
        defined[var] = kind

    inputs = []
    if binary:
        inputs = [2 * (k + 1) for k in range(n_in)]
        for lit in inputs:
            define(lit >> 1, "input", hdr_off)
    else:
        for _ in range(n_in):
            off = r.pos
            lit = check_lit(_uint(r.line("input").strip(), "input", off), "input", off)
            if lit < 2 or lit & 1:
                raise AigerError(f"input literal {lit} must be even and positive", off)
            define(lit >> 1, "input", off)
            inputs.append(lit)

    latches = []
    referenced: list[tuple[int, int]] = []  # (literal, offset) to resolve after all defs
    for k in range(n_latch):
        off = r.pos
        parts = r.line("latch").split()
        if binary:
            if not 1 <= len(parts) <= 2:
                raise AigerError("latch line: expected next literal and optional reset", off)
            lit = 2 * (n_in + k + 1)
            nxt = check_lit(_uint(parts[0], "latch next", off), "latch next", off)
            reset_tok = parts[1] if len(parts) == 2 else "0"
        else:
            if not 2 <= len(parts) <= 3:
                raise AigerError("latch line: expected literal, next, optional reset", off)
            lit = check_lit(_uint(parts[0], "latch", off), "latch", off)
            if lit < 2 or lit & 1:
                raise AigerError(f"latch literal {lit} must be even and positive", off)
            nxt = check_lit(_uint(parts[1], "latch next", off), "latch next", off)
            reset_tok = parts[2] if len(parts) == 3 else "0"
        reset = _uint(reset_tok, "latch reset", off)
        if reset == lit:
            raise UnsupportedModelError(
                f"latch {lit} is uninitialized (reset to itself); a single reset state is required"
            )
        if reset not in (0, 1):
            raise AigerError(f"latch reset must be 0, 1 or the latch literal, got {reset}", off)
        define(lit >> 1, "latch", off)
        referenced.append((nxt, off))
        latches.append(Latch(lit, nxt, reset))

    outputs = []
    for _ in range(n_out):
        off = r.pos
        lit = check_lit(_uint(r.line("output").strip(), "output", off), "output", off)
        referenced.append((lit, off))
        outputs.append(lit)

    bads = []
    for _ in range(n_bad):
        off = r.pos
        lit = check_lit(_uint(r.line("bad state").strip(), "bad state", off), "bad state", off)
        referenced.append((lit, off))
        bads.append(lit)

    and_gates = []
    if binary:
        for k in range(n_and):
            off = r.pos
            lhs = 2 * (n_in + n_latch + k + 1)
            delta0 = _delta(r, "and gate delta")
            delta1 = _delta(r, "and gate delta")
            rhs0 = lhs - delta0
            rhs1 = rhs0 - delta1
            if delta0 == 0 or rhs1 < 0:
                raise AigerError(
                    f"non-monotone delta encoding for gate {lhs} (rhs0={rhs0}, rhs1={rhs1})", off
                )
            define(lhs >> 1, "and", off)
            referenced.append((rhs0, off))
            referenced.append((rhs1, off))
            and_gates.append((lhs, rhs0, rhs1))
    else:
        for _ in range(n_and):
            off = r.pos
            parts = r.line("and gate").split()
            if len(parts) != 3:
                raise AigerError("and gate line: expected three literals", off)
            lhs = check_lit(_uint(parts[0], "and gate", off), "and gate", off)
            if lhs < 2 or lhs & 1:
                raise AigerError(f"and gate literal {lhs} must be even and positive", off)
            rhs0 = check_lit(_uint(parts[1], "and gate operand", off), "and gate operand", off)
            rhs1 = check_lit(_uint(parts[2], "and gate operand", off), "and gate operand", off)
            define(lhs >> 1, "and", off)
            referenced.append((rhs0, off))
            referenced.append((rhs1, off))
            and_gates.append((lhs, rhs0, rhs1))
    # Symbol table and comments are ignored.

    for lit, off in referenced:
        var = lit >> 1
        if var and var not in defined:
            raise AigerError(f"undefined variable {var}", off)

    gate_order = _topological_order(and_gates)

    props = bads if bads else outputs
    if not props:
        raise AigerError("circuit declares no outputs and no bad-state properties", len(data))
    if not 0 <= property_index < len(props):
        raise ValueError(
            f"property index {property_index} out of range (circuit has {len(props)})"
        )

    return AigModel(
        max_var=max_var,
        inputs=tuple(inputs),
        latches=tuple(latches),
        outputs=tuple(outputs),
        bads=tuple(bads),
        and_gates=tuple(and_gates),
        property_index=property_index,
        bad=props[property_index],
        gate_order=gate_order,
    )


def _topological_order(and_gates) -> tuple[int, ...]:
    """Evaluation order for the gates; rejects combinational cycles."""
    index_of = {g[0] >> 1: i for i, g in enumerate(and_gates)}
    order: list[int] = []
    mark = [0] * len(and_gates)  # 0 new, 1 on stack, 2 done
    for start in range(len(and_gates)):
        if mark[start]:
            continue
        stack = [start]
        while stack:
            i = stack[-1]
            if mark[i] == 2:
                stack.pop()
                continue
            mark[i] = 1
            _, rhs0, rhs1 = and_gates[i]
            pending = False
            for rhs in (rhs0, rhs1):
                j = index_of.get(rhs >> 1)
                if j is None or mark[j] == 2:
                    continue
                if mark[j] == 1:
                    raise AigerError(f"combinational cycle through and gate {and_gates[j][0]}")
                stack.append(j)
                pending = True
            if not pending:
                mark[i] = 2
                order.append(i)
                stack.pop()
    return tuple(order)


def write_ascii(m: AigModel) -> str:
    """Print a model in canonical ASCII AIGER; parses back to an equal model."""
    header = f"aag {m.max_var} {m.num_inputs} {m.num_latches} {len(m.outputs)} {len(m.and_gates)}"
    if m.bads:
        header += f" {len(m.bads)}"
    lines = [header]
    lines.extend(str(lit) for lit in m.inputs)
    for la in m.latches:
        lines.append(f"{la.lit} {la.next}" + (f" {la.reset}" if la.reset else ""))
    lines.extend(str(lit) for lit in m.outputs)
    lines.extend(str(lit) for lit in m.bads)
    lines.extend(f"{lhs} {rhs0} {rhs1}" for lhs, rhs0, rhs1 in m.and_gates)
    return "\n".join(lines) + "\n"


def _check_widths(m: AigModel, s: State, x: InputVector) -> None:
    if len(s) != m.num_latches:
        raise ValueError(f"state width {len(s)} != {m.num_latches} latches")
    if len(x) != m.num_inputs:
        raise ValueError(f"input width {len(x)} != {m.num_inputs} inputs")


def _eval_vars(m: AigModel, s: State, x: InputVector) -> list[int]:
    val = [0] * (m.max_var + 1)
    for k, lit in enumerate(m.inputs):
        val[lit >> 1] = x[k]
    for k, la in enumerate(m.latches):
        val[la.lit >> 1] = s[k]
    gates = m.and_gates
    for gi in m.gate_order:
        lhs, rhs0, rhs1 = gates[gi]
        val[lhs >> 1] = (val[rhs0 >> 1] ^ (rhs0 & 1)) & (val[rhs1 >> 1] ^ (rhs1 & 1))
    return val


def simulate_step(m: AigModel, s: State, x: InputVector) -> State:
    """Next latch state reached from ``s`` under input assignment ``x``."""
    _check_widths(m, s, x)
    val = _eval_vars(m, s, x)
    return tuple(val[la.next >> 1] ^ (la.next & 1) for la in m.latches)


def eval_bad(m: AigModel, s: State, x: InputVector) -> int:
    """Value of the selected property literal under ``(s, x)``."""
    _check_widths(m, s, x)
    val = _eval_vars(m, s, x)
    return val[m.bad >> 1] ^ (m.bad & 1)


def initial_state(m: AigModel) -> State:
    """The unique reset state, assembled from the latch reset values."""
    for la in m.latches:
        if la.reset not in (0, 1):  # unreachable after parsing; kept as a guard
            raise UnsupportedModelError(f"latch {la.lit} has no constant reset value")
    return tuple(la.reset for la in m.latches)
