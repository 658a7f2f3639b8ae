"""JSON operator files.

Layout::

    {
      "dim": 2,
      "objects": [
        {"name": "rho",  "role": "state",     "operator": M},
        {"name": "path", "role": "pvm",       "operators": [M, M], "values": [1, -1]},
        {"name": "dev",  "role": "povm",      "operators": [M, M, M], "labels": ["D1", "D2", "abs"]},
        {"name": "R",    "role": "bivariate", "grid": [[M, M], [M, M]]},
        {"name": "X",                         "operator": M}
      ]
    }

where each matrix ``M`` is a row-major list of rows and each entry is a
``[re, im]`` pair. ``role`` is optional (default: a plain Hermitian
operator); ``values`` and ``labels`` are optional.
"""

import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exceptions import QmeasError, ValidationError
from .linalg import as_density, as_hermitian
from .nonideality import ValuedObservable
from .povm import BivariatePovm, Povm, Pvm

ROLES = ("operator", "state", "povm", "pvm", "bivariate")


class ParseError(QmeasError):
    """Malformed operator file; the message starts with the offending JSON path."""


@dataclass
class FileObject:
    name: str
    role: str
    data: np.ndarray
    values: Optional[List[float]] = None
    labels: Optional[List[str]] = None


@dataclass
class OperatorFile:
    dim: int
    objects: List[FileObject] = field(default_factory=list)

    def by_role(self, role):
        return [o for o in self.objects if o.role == role]


def _parse_matrix(m, dim, where):
    if not isinstance(m, list) or len(m) != dim:
        raise ParseError(f"{where}: expected {dim} rows")
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(m):
        if not isinstance(row, list) or len(row) != dim:
            raise ParseError(f"{where}[{i}]: expected {dim} entries")
        for j, z in enumerate(row):
            if (
                not isinstance(z, list)
                or len(z) != 2
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in z)
            ):
                raise ParseError(f"{where}[{i}][{j}]: expected a [re, im] pair of numbers")
            out[i, j] = complex(z[0], z[1])
    return out


def _parse_list(seq, dim, where):
    if not isinstance(seq, list) or not seq:
        raise ParseError(f"{where}: expected a non-empty list of matrices")
    return np.stack([_parse_matrix(m, dim, f"{where}[{k}]") for k, m in enumerate(seq)])


def parse_operator_file(doc):
    """Parse a decoded JSON document into an `OperatorFile` (structure only, no physics checks)."""
    if not isinstance(doc, dict):
        raise ParseError("$: expected an object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError("$.dim: expected a positive integer")
    objs = doc.get("objects")
    if not isinstance(objs, list):
        raise ParseError("$.objects: expected a list")
    out = OperatorFile(dim)
    names = set()
    for k, o in enumerate(objs):
        where = f"$.objects[{k}]"
        if not isinstance(o, dict):
            raise ParseError(f"{where}: expected an object")
        name = o.get("name", f"object{k}")
        if not isinstance(name, str):
            raise ParseError(f"{where}.name: expected a string")
        if name in names:
            raise ParseError(f"{where}.name: duplicate name {name!r}")
        names.add(name)
        role = o.get("role", "operator")
        if role not in ROLES:
            raise ParseError(f"{where}.role: unknown role {role!r}")
        if role in ("operator", "state"):
            data = _parse_matrix(o.get("operator"), dim, f"{where}.operator")
        elif role == "bivariate":
            grid = o.get("grid")
            if not isinstance(grid, list) or not grid:
                raise ParseError(f"{where}.grid: expected a non-empty list of rows")
            rows = [_parse_list(r, dim, f"{where}.grid[{m}]") for m, r in enumerate(grid)]
            if len({len(r) for r in rows}) != 1:
                raise ParseError(f"{where}.grid: rows have different lengths")
            data = np.stack(rows)
        else:
            data = _parse_list(o.get("operators"), dim, f"{where}.operators")
        values = o.get("values")
        if values is not None:
            if (
                role != "pvm"
                or not isinstance(values, list)
                or len(values) != len(data)
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values)
            ):
                raise ParseError(f"{where}.values: expected {len(data)} numbers on a pvm")
            values = [float(v) for v in values]
        labels = o.get("labels")
        if labels is not None and (not isinstance(labels, list) or len(labels) != len(data)):
            raise ParseError(f"{where}.labels: expected {len(data)} strings")
        out.objects.append(FileObject(name, role, data, values, labels))
    return out


def load_operator_file(path):
    """Read and parse an operator file. Raises `OSError` or `ParseError`."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return parse_operator_file(doc)


def build(obj):
    """Validate a `FileObject` into its library type.

    state -> density matrix, povm -> `Povm`, pvm -> `ValuedObservable`
    (values default to ``0..K-1``), bivariate -> `BivariatePovm`,
    operator -> Hermitian matrix. Raises `ValidationError`.
    """
    try:
        if obj.role == "state":
            return as_density(obj.data, obj.name)
        if obj.role == "operator":
            return as_hermitian(obj.data, obj.name)
        if obj.role == "povm":
            return Povm(obj.data, obj.labels)
        if obj.role == "pvm":
            values = obj.values if obj.values is not None else range(len(obj.data))
            return ValuedObservable(Pvm(obj.data, obj.labels), list(values))
        return BivariatePovm(obj.data)
    except ValidationError as exc:
        raise ValidationError(f"{obj.name}: {exc}") from exc


def encode_matrix(m):
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def state_entry(name, rho):
    return {"name": name, "role": "state", "operator": encode_matrix(rho)}


def operator_entry(name, op):
    return {"name": name, "role": "operator", "operator": encode_matrix(op)}


def povm_entry(name, povm, role="povm"):
    entry = {"name": name, "role": role, "operators": [encode_matrix(e) for e in povm.effects]}
    if povm.labels is not None:
        entry["labels"] = list(povm.labels)
    return entry


def observable_entry(name, obs):
    entry = povm_entry(name, obs.pvm, role="pvm")
    entry["values"] = [float(v) for v in obs.values]
    return entry


def bivariate_entry(name, biv):
    return {
        "name": name,
        "role": "bivariate",
        "grid": [[encode_matrix(e) for e in row] for row in biv.grid],
    }


def dump_operator_file(path, dim, entries):
    """Write entries built by the ``*_entry`` helpers as an operator file."""
    doc = {"dim": int(dim), "objects": list(entries)}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
