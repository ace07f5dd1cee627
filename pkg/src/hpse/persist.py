"""Result documents, raw digit files and ladder checkpoints.

Digit files hold nothing but sign, digits, a decimal point and newlines,
wrapped at 100 digits per line (counting digits only), so reference digit
blocks land at predictable lines and files diff cleanly.

Checkpoints are versioned key/value text with exact-roundtrip decimal
endpoints; a resumed ladder is bit-identical to an uninterrupted one because
stages always exchange endpoints through the same strings.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass

from .eigensolver import EigResult
from .potential import PotentialSpec

__all__ = [
    "SCHEMA_VERSION",
    "digit_file_text",
    "write_digit_file",
    "result_document",
    "potential_hash",
    "save_checkpoint",
    "load_checkpoint",
    "CheckpointError",
]

SCHEMA_VERSION = 1
TOOL_VERSION = "0.1.0"
WRAP = 100


class CheckpointError(ValueError):
    pass


# ---------------------------------------------------------------------------
# digit files
# ---------------------------------------------------------------------------

def _split_number(text: str) -> tuple[str, str, int]:
    """Decimal string -> (sign, digits, exp10) with value = 0.digits * 10^exp10."""
    m = re.match(r"^([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?$", text.strip())
    if not m or (not m.group(2) and not m.group(3)):
        raise ValueError(f"not a decimal literal: {text!r}")
    sign = "-" if m.group(1) == "-" else ""
    intpart = m.group(2) or ""
    frac = m.group(3) or ""
    e = int(m.group(4) or 0)
    digits = intpart + frac
    exp10 = len(intpart) + e
    stripped = digits.lstrip("0")
    exp10 -= len(digits) - len(stripped)
    return sign, stripped if stripped else "0", exp10 if stripped else 0


def digit_file_text(epsilon: str) -> str:
    """Plain positional expansion wrapped at 100 digits per line."""
    sign, digits, exp10 = _split_number(epsilon)
    if exp10 <= 0:
        all_digits = "0" + "0" * (-exp10) + digits
        point_after = 1
    else:
        if exp10 >= len(digits):
            all_digits = digits + "0" * (exp10 - len(digits))
            point_after = len(all_digits)
        else:
            all_digits = digits
            point_after = exp10
    lines = []
    pos = 0
    while pos < len(all_digits):
        chunk = all_digits[pos:pos + WRAP]
        if pos < point_after <= pos + len(chunk):
            cut = point_after - pos
            chunk = chunk[:cut] + ("." if point_after < len(all_digits) else "") + chunk[cut:]
        lines.append(chunk)
        pos += WRAP
    lines[0] = sign + lines[0]
    return "\n".join(lines) + "\n"


def write_digit_file(path, epsilon: str) -> None:
    with open(path, "w") as fh:
        fh.write(digit_file_text(epsilon))


# ---------------------------------------------------------------------------
# result documents
# ---------------------------------------------------------------------------

def result_document(pot: PotentialSpec, res: EigResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "potential": {"M": pot.M, "s": pot.s, "v": list(pot.v)},
        "epsilon": res.epsilon,
        "index": res.index.n,
        "parity": res.index.sigma,
        "digits_requested": res.digits_requested,
        "digits_certified": res.digits_certified,
        "bc": res.bc,
        "plan": {
            "eval_x": res.plan.eval_x,
            "working_digits": res.plan.working_digits,
            "delta_d_est": res.plan.delta_d_est,
            "pest_at_x": res.plan.pest_at_x,
            "n_terms_est": res.plan.n_terms_est,
            "margin_digits": res.plan.margin_digits,
        },
        "telemetry": [
            {
                "working_digits": t.working_digits,
                "n_terms": t.n_terms,
                "delta_d_observed": t.delta_d_observed,
                "wall_ms": t.wall_ms,
                "eps_sample": t.eps_sample,
            }
            for t in res.telemetry
        ],
    }


# ---------------------------------------------------------------------------
# checkpoints
# ---------------------------------------------------------------------------

def potential_hash(pot: PotentialSpec, n: int, P: int, bc: str, eval_x: str) -> str:
    key = f"M={pot.M};s={pot.s};v={','.join(pot.v)};n={n};P={P};bc={bc};x={eval_x}"
    return hashlib.sha256(key.encode()).hexdigest()


def save_checkpoint(path, pot: PotentialSpec, n: int, P: int, bc: str,
                    eval_x: str, stage: int, lo: str, hi: str) -> None:
    body = "\n".join([
        f"schema_version = {SCHEMA_VERSION}",
        f"potential_hash = {potential_hash(pot, n, P, bc, eval_x)}",
        f"n = {n}",
        f"digits_requested = {P}",
        f"bc = {bc}",
        f"eval_x = {eval_x}",
        f"stage = {stage}",
        f'lo = "{lo}"',
        f'hi = "{hi}"',
    ]) + "\n"
    with open(path, "w") as fh:
        fh.write(body)


def load_checkpoint(path, pot: PotentialSpec, n: int, P: int, bc: str,
                    eval_x: str) -> tuple[int, str, str]:
    kv = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            kv[key.strip()] = val.strip().strip('"')
    if int(kv.get("schema_version", -1)) != SCHEMA_VERSION:
        raise CheckpointError(f"unsupported checkpoint schema: {kv.get('schema_version')}")
    expect = potential_hash(pot, n, P, bc, eval_x)
    if kv.get("potential_hash") != expect:
        raise CheckpointError("checkpoint does not match this potential/run configuration")
    return int(kv["stage"]), kv["lo"], kv["hi"]


def json_dump(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
