"""Reading and writing the line-oriented ``trinet`` text format.

::

    trinet <n_a> <n_b>
    #A
    0 1
    #B
    #C
    0 0
    #LABELS-A
    0 alice

Blank lines and lines starting with ``%`` are ignored.
"""
from __future__ import annotations

import hashlib
import io
import logging
import os

import numpy as np

from .network import NodeIndexError, TrinetError, TripleNetwork

log = logging.getLogger(__name__)

_SECTIONS = {"#A", "#B", "#C", "#LABELS-A", "#LABELS-B"}


class TrinetParseError(TrinetError, ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def load_triple_network(source, name: str = "<stream>") -> TripleNetwork:
    """Parse a trinet byte stream (or path) into a :class:`TripleNetwork`."""
    if isinstance(source, (str, os.PathLike)):
        name = str(source)
        with open(source, "rb") as fh:
            return load_triple_network(fh, name)
    if isinstance(source, bytes):
        source = io.BytesIO(source)

    n_a = n_b = None
    section = None
    edges = {"#A": [], "#B": [], "#C": []}
    labels = {"#LABELS-A": {}, "#LABELS-B": {}}
    for lineno, raw in enumerate(source, start=1):
        try:
            line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        except UnicodeDecodeError as exc:
            raise TrinetParseError(lineno, f"invalid UTF-8: {exc}") from None
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("trinet"):
            if n_a is not None:
                raise TrinetParseError(lineno, "duplicate header")
            parts = line.split()
            if len(parts) != 3:
                raise TrinetParseError(lineno, "header must be 'trinet <n_a> <n_b>'")
            try:
                n_a, n_b = int(parts[1]), int(parts[2])
            except ValueError:
                raise TrinetParseError(lineno, "node counts must be integers") from None
            if n_a < 0 or n_b < 0:
                raise TrinetParseError(lineno, "node counts must be non-negative")
            continue
        if n_a is None:
            raise TrinetParseError(lineno, "missing 'trinet' header")
        if line.startswith("#"):
            if line not in _SECTIONS:
                raise TrinetParseError(lineno, f"unknown section {line!r}")
            section = line
            continue
        if section is None:
            raise TrinetParseError(lineno, "data before any section")
        if section in labels:
            parts = line.split(None, 1)
            node = _int(parts[0], lineno)
            limit = n_a if section == "#LABELS-A" else n_b
            if not 0 <= node < limit:
                raise NodeIndexError(f"line {lineno}: label id {node} out of range [0, {limit})")
            labels[section][node] = parts[1].strip() if len(parts) > 1 else ""
            continue
        parts = line.split()
        if len(parts) != 2:
            raise TrinetParseError(lineno, f"expected '<u> <v>', got {line!r}")
        u, v = _int(parts[0], lineno), _int(parts[1], lineno)
        lim_u = n_b if section == "#B" else n_a
        lim_v = n_a if section == "#A" else n_b
        if not (0 <= u < lim_u and 0 <= v < lim_v):
            raise NodeIndexError(f"line {lineno}: edge ({u}, {v}) out of range in section {section}")
        edges[section].append((u, v))
    if n_a is None:
        raise TrinetParseError(0, "empty input (no 'trinet' header)")

    net = TripleNetwork(
        n_a, n_b, edges["#A"], edges["#B"], edges["#C"],
        labels_a=labels["#LABELS-A"] or None,
        labels_b=labels["#LABELS-B"] or None,
    )
    if net.n_dropped:
        log.warning("%s: dropped %d duplicate or self-loop edge lines", name, net.n_dropped)
    return net


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise TrinetParseError(lineno, f"not an integer: {tok!r}") from None


def dumps(net: TripleNetwork) -> bytes:
    """Serialize canonically; equal networks give identical bytes."""
    out = io.StringIO()
    out.write(f"trinet {net.n_a} {net.n_b}\n")
    for sec in ("A", "B", "C"):
        out.write(f"#{sec}\n")
        e = net.edge_array(sec)
        if len(e):
            np.savetxt(out, e, fmt="%d")
    for sec, labels in (("A", net.labels_a), ("B", net.labels_b)):
        if labels is not None:
            out.write(f"#LABELS-{sec}\n")
            for i, lab in enumerate(labels):
                out.write(f"{i} {lab}\n")
    return out.getvalue().encode("utf-8")


def write_triple_network(net: TripleNetwork, dest) -> str:
    """Write ``net`` to a path or binary stream; returns the sha256 checksum."""
    data = dumps(net)
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "wb") as fh:
            fh.write(data)
    else:
        dest.write(data)
    return hashlib.sha256(data).hexdigest()


def checksum(net: TripleNetwork) -> str:
    return hashlib.sha256(dumps(net)).hexdigest()
