"""On-disk formats: edge lists, clustering JSON and ratings files."""
from __future__ import annotations

import json
import os
from collections.abc import Iterator

import numpy as np

from .errors import InvalidInputError
from .graph import Clustering, SignedBipartiteGraph, from_edge_list

__all__ = [
    "write_edge_list",
    "read_edge_list",
    "write_clustering",
    "read_clustering",
    "clustering_to_dict",
    "clustering_from_dict",
    "iter_ratings",
]


def write_edge_list(g: SignedBipartiteGraph, path) -> None:
    """Header ``m<TAB>n`` then one ``u<TAB>v<TAB>w`` line per nonzero entry."""
    rows, cols = np.nonzero(g.weights)
    signs = g.weights[rows, cols]
    lines = [f"{g.m}\t{g.n}\n"]
    lines.extend(
        f"{u}\t{v}\t{'+1' if s > 0 else '-1'}\n" for u, v, s in zip(rows.tolist(), cols.tolist(), signs.tolist())
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(lines)


def _parse_edge_lines(fh) -> Iterator[tuple[int, int, int]]:
    for lineno, line in enumerate(fh, start=2):
        line = line.strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise InvalidInputError(f"line {lineno}: expected 'u<TAB>v<TAB>w', got {line!r}")
        try:
            yield int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise InvalidInputError(f"line {lineno}: non-integer field in {line!r}") from exc


def read_edge_list(path) -> SignedBipartiteGraph:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split("\t")
        if len(header) != 2:
            raise InvalidInputError(f"{path}: header must be 'm<TAB>n'")
        try:
            m, n = int(header[0]), int(header[1])
        except ValueError as exc:
            raise InvalidInputError(f"{path}: header must hold two integers") from exc
        return from_edge_list(m, n, _parse_edge_lines(fh))


def clustering_to_dict(c: Clustering) -> dict:
    return {"k": c.k, "labels_u": c.labels_u.tolist(), "labels_v": c.labels_v.tolist()}


def clustering_from_dict(d: dict) -> Clustering:
    try:
        return Clustering(d["labels_u"], d["labels_v"], d["k"])
    except KeyError as exc:
        raise InvalidInputError(f"clustering JSON lacks field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise InvalidInputError(f"clustering JSON must be an object, got {type(d).__name__}") from exc


def write_clustering(c: Clustering, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(clustering_to_dict(c), fh)
        fh.write("\n")


def read_clustering(path) -> Clustering:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: invalid JSON ({exc})") from exc
    return clustering_from_dict(data)


def iter_ratings(path, delimiter: str = ",", skip_header: bool = False) -> Iterator[tuple[str, str, str]]:
    """Yield ``(user, item, rating)`` string triples; extra columns are dropped.

    ``delimiter`` may be any literal separator, e.g. ``","``, ``"::"`` or a tab.
    Ratings are converted (and validated) by :func:`bccbil.graph.from_ratings`.
    """
    with open(os.fspath(path), encoding="utf-8") as fh:
        if skip_header:
            fh.readline()
        for lineno, line in enumerate(fh, start=2 if skip_header else 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            parts = line.split(delimiter)
            if len(parts) < 3:
                raise InvalidInputError(f"line {lineno}: expected at least 3 fields, got {line!r}")
            yield parts[0].strip(), parts[1].strip(), parts[2].strip()
