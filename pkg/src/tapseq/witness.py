"""Counterexample witnesses in the textual AIGER format.

Layout: a ``1`` status line, the property (``b<i>``, or ``o<i>`` when the
circuit only declares outputs), one line of latch reset bits, one line of
input bits per frame, and a closing ``.``.  The final frame's inputs are the
ones that raise the property literal on the final state.  Validation replays
the inputs by simulation from the reset state.
"""

from __future__ import annotations

from .aiger import AigModel, eval_bad, initial_state, parse_aiger, simulate_step
from .engine import Counterexample


def format_witness(cex: Counterexample, m: AigModel) -> str:
    prop = "b" if m.bads else "o"
    lines = ["1", f"{prop}{m.property_index}"]
    lines.append("".join(str(b) for b in cex.states[0]))
    for x in cex.inputs:
        lines.append("".join(str(b) for b in x))
    lines.append("".join(str(b) for b in cex.final_bad_input))
    lines.append(".")
    return "\n".join(lines) + "\n"


def _parse_bits(line: str, width: int, what: str) -> tuple[int, ...]:
    if len(line) != width or any(ch not in "01" for ch in line):
        raise ValueError(f"{what}: expected {width} bits, got {line!r}")
    return tuple(int(ch) for ch in line)


def validate_witness_text(m: AigModel, text: str) -> tuple[bool, str | None]:
    """Replay a witness against a model; (ok, diagnostic-if-not)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    try:
        if not lines or lines[0] != "1":
            return False, "witness does not start with a '1' status line"
        if len(lines) < 2 or not lines[1] or lines[1][0] not in "bo" \
                or not lines[1][1:].isdigit():
            return False, "missing property line (expected b<i> or o<i>)"
        index = int(lines[1][1:])
        if index != m.property_index:
            return False, (f"witness is for property {lines[1]}, model checks "
                           f"index {m.property_index}")
        if len(lines) < 3:
            return False, "missing initial state line"
        state = _parse_bits(lines[2], m.num_latches, "initial state")
        if state != initial_state(m):
            return False, "initial state differs from the latch reset values"
        frames = []
        pos = 3
        while pos < len(lines) and lines[pos] != ".":
            frames.append(_parse_bits(lines[pos], m.num_inputs, f"frame {pos - 3}"))
            pos += 1
        if pos >= len(lines):
            return False, "witness is not terminated by a '.' line"
        if not frames:
            return False, "witness has no input frames"
    except ValueError as e:
        return False, str(e)
    for x in frames[:-1]:
        state = simulate_step(m, state, x)
    if eval_bad(m, state, frames[-1]) != 1:
        return False, "property does not fire at the final frame"
    return True, None


def validate_witness(model_path: str, witness_path: str) -> tuple[bool, str | None]:
    """File-level validation; the property index is taken from the witness."""
    with open(witness_path, "r") as fh:
        text = fh.read()
    lines = text.split("\n")
    index = 0
    if len(lines) >= 2 and lines[1] and lines[1][0] in "bo" and lines[1][1:].isdigit():
        index = int(lines[1][1:])
    with open(model_path, "rb") as fh:
        data = fh.read()
    try:
        m = parse_aiger(data, property_index=index)
    except ValueError as e:
        return False, str(e)
    return validate_witness_text(m, text)
