"""JSON formats for systems and reports.

System files carry either a dense realization
``{"n": int, "A": [[...]], "b": [...], "c": [...]}`` or a pole-residue form
``{"poles": [...], "residues": [...]}`` where complex entries are written as
``[re, im]`` pairs.  Readers reject dimension mismatches with a message that
names the offending field.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .systems import PoleResidueForm, StateSpaceSystem


def encode_value(x):
    """Recursively convert numpy containers/scalars to JSON-dumpable values.

    Complex values with nonzero imaginary part become ``[re, im]`` pairs;
    purely real values are emitted as plain floats.
    """
    if isinstance(x, dict):
        return {k: encode_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode_value(v) for v in x]
    if isinstance(x, np.ndarray):
        return [encode_value(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        z = complex(x)
        return float(z.real) if z.imag == 0.0 else [float(z.real), float(z.imag)]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def dump_json(data, path: str | Path | None = None) -> str:
    """Serialize deterministically (sorted keys, fixed separators)."""
    text = json.dumps(encode_value(data), sort_keys=True, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _parse_complex(entry, field: str) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise ValueError(f'field "{field}": entries must be numbers or [re, im] pairs')


def parse_system(obj, source: str = "system") -> StateSpaceSystem:
    """Build a system from a decoded JSON object (either file schema)."""
    if not isinstance(obj, dict):
        raise ValueError(f"{source}: expected a JSON object at the top level")
    if "poles" in obj or "residues" in obj:
        for field in ("poles", "residues"):
            if field not in obj:
                raise ValueError(f'field "{field}": missing')
            if not isinstance(obj[field], list):
                raise ValueError(f'field "{field}": expected a list')
        poles = [_parse_complex(p, "poles") for p in obj["poles"]]
        residues = [_parse_complex(r, "residues") for r in obj["residues"]]
        if len(poles) != len(residues):
            raise ValueError(
                f'field "residues": expected length {len(poles)}, got {len(residues)}'
            )
        return PoleResidueForm(np.array(poles), np.array(residues)).to_system()

    for field in ("A", "b", "c"):
        if field not in obj:
            raise ValueError(f'field "{field}": missing')
    a = obj["A"]
    if not isinstance(a, list) or not all(isinstance(row, list) for row in a):
        raise ValueError('field "A": expected a list of rows')
    n = int(obj.get("n", len(a)))
    if len(a) != n:
        raise ValueError(f'field "A": expected {n} rows, got {len(a)}')
    for i, row in enumerate(a):
        if len(row) != n:
            raise ValueError(f'field "A": row {i} has length {len(row)}, expected {n}')
    for field in ("b", "c"):
        if not isinstance(obj[field], list) or len(obj[field]) != n:
            got = len(obj[field]) if isinstance(obj[field], list) else type(obj[field]).__name__
            raise ValueError(f'field "{field}": expected length {n}, got {got}')
    return StateSpaceSystem(np.array(a, dtype=float), np.array(obj["b"], dtype=float),
                            np.array(obj["c"], dtype=float))


def system_to_dict(sys: StateSpaceSystem) -> dict:
    return {
        "n": sys.n,
        "A": encode_value(sys.a),
        "b": encode_value(sys.b),
        "c": encode_value(sys.c),
    }


def load_system(path: str | Path) -> StateSpaceSystem:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        obj = json.load(fh)
    return parse_system(obj, source=str(path))


def save_system(sys: StateSpaceSystem, path: str | Path) -> None:
    dump_json(system_to_dict(sys), path)
