"""JSON set files: ``{"p": int, "n": int, "elements": [[...], ...]}``."""

from __future__ import annotations

import json
from typing import Any

from .errors import UsageError
from .group import GroupSpec
from .setops import GroupSet


class SetFileError(UsageError):
    """Malformed set file; the message names the offending field."""


def parse_setfile(data: Any, source: str = "<input>") -> GroupSet:
    if not isinstance(data, dict):
        raise SetFileError(f"{source}: top level must be an object with keys p, n, elements")
    for key in ("p", "n", "elements"):
        if key not in data:
            raise SetFileError(f"{source}: missing field '{key}'")
    p, n, elements = data["p"], data["n"], data["elements"]
    for key, val in (("p", p), ("n", n)):
        if not isinstance(val, int) or isinstance(val, bool):
            raise SetFileError(f"{source}: field '{key}' must be an integer, got {val!r}")
    try:
        spec = GroupSpec(p, n)
    except UsageError as exc:
        raise SetFileError(f"{source}: {exc}") from None
    if not isinstance(elements, list):
        raise SetFileError(f"{source}: field 'elements' must be a list")
    seen = {}
    for pos, pt in enumerate(elements):
        where = f"{source}: elements[{pos}]"
        if not isinstance(pt, list) or len(pt) != n:
            raise SetFileError(f"{where}: expected a list of {n} integers, got {pt!r}")
        for j, c in enumerate(pt):
            if not isinstance(c, int) or isinstance(c, bool) or not 0 <= c < p:
                raise SetFileError(f"{where}[{j}]: coordinate {c!r} is not in [0, {p})")
        idx = spec.encode(pt)
        if idx in seen:
            raise SetFileError(f"{where}: duplicate of elements[{seen[idx]}]")
        seen[idx] = pos
    return GroupSet.from_indices(spec, seen)


def load_setfile(path: str) -> GroupSet:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SetFileError(f"{path}: cannot read file ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SetFileError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_setfile(data, path)


def setfile_dict(A: GroupSet) -> dict:
    return {"p": A.spec.p, "n": A.spec.n, "elements": [list(c) for c in A.coords()]}


def dumps_setfile(A: GroupSet) -> str:
    """Canonical serialisation: elements sorted by index, one compact line each."""
    rows = ",\n".join("    " + json.dumps(list(c)) for c in A.coords())
    body = f"[\n{rows}\n  ]" if rows else "[]"
    return f'{{\n  "p": {A.spec.p},\n  "n": {A.spec.n},\n  "elements": {body}\n}}\n'


def save_setfile(A: GroupSet, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_setfile(A))
