"""File formats: complex JSON, graph edge lists, eigenvalue and matrix CSV."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .complex import Complex, ComplexError, Graph, whitney_complex

__all__ = ["complex_to_json", "complex_from_json", "read_complex", "read_edge_list", "write_spectrum_csv", "read_spectrum_csv", "write_matrix_csv"]


def complex_to_json(c: Complex) -> dict:
    return {"simplices": [list(x) for x in c.simplices]}


def complex_from_json(data: dict, close: bool = False) -> Complex:
    if not isinstance(data, dict) or "simplices" not in data:
        raise ComplexError('complex JSON needs a "simplices" list')
    simplices = data["simplices"]
    if not isinstance(simplices, list) or not all(isinstance(x, list) for x in simplices):
        raise ComplexError('"simplices" must be a list of integer lists')
    return Complex.from_simplices(simplices, close=close)


def read_edge_list(path: str | Path) -> Graph:
    """Whitespace-separated ``u v`` pairs; ``#`` starts a comment. Ids are relabelled densely."""
    pairs = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").split()
        if len(fields) == 1:
            pairs.append((int(fields[0]),))
        elif len(fields) == 2:
            pairs.append((int(fields[0]), int(fields[1])))
        else:
            raise ComplexError(f"bad edge line: {line!r}")
    ids = sorted({v for p in pairs for v in p})
    pos = {v: i for i, v in enumerate(ids)}
    return Graph.from_edges(len(ids), [(pos[p[0]], pos[p[1]]) for p in pairs if len(p) == 2])


def read_complex(path: str | Path, close: bool = False) -> Complex:
    """Complex JSON (``.json``) or an edge list, taken as its Whitney complex."""
    path = Path(path)
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ComplexError(f"malformed JSON in {path}: {exc}") from exc
        return complex_from_json(data, close=close)
    return whitney_complex(read_edge_list(path))


def write_spectrum_csv(path: str | Path, values: np.ndarray) -> None:
    """One eigenvalue per line, ascending, with round-trip precision."""
    Path(path).write_text("".join(f"{float(v)!r}\n" for v in np.sort(values)))


def read_spectrum_csv(path: str | Path) -> np.ndarray:
    return np.array([float(x) for x in Path(path).read_text().split()])


def write_matrix_csv(path: str | Path, M: np.ndarray) -> None:
    Path(path).write_text("".join(",".join(repr(float(v)) for v in row) + "\n" for row in M))
