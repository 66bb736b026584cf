"""On-disk formats: chain JSON files and plain-text path files.

Chain JSON: {"d": int, "P": [[...], ...], "pi": [...]} with "pi" optional.
Path text: '#' comment lines, an optional "d=<int>" declaration on the first
non-comment line, then one 0-based state index per line; without the
declaration the state count is inferred as max(1 + max state, 2).
"""

from __future__ import annotations

import json

import numpy as np

from .chains import ChainSpec, SamplePath, validate_chain
from .errors import MixcertError, PathTooShortError
from .serialize import dumps


class FormatError(MixcertError):
    """Malformed chain or path file."""


def chain_to_dict(chain: ChainSpec) -> dict:
    doc = {"d": chain.d, "P": chain.P}
    if chain.pi_known is not None:
        doc["pi"] = chain.pi_known
    return doc


def save_chain(chain: ChainSpec, filename: str) -> None:
    with open(filename, "w") as fh:
        fh.write(dumps(chain_to_dict(chain)))
        fh.write("\n")


def load_chain(filename: str) -> ChainSpec:
    with open(filename) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{filename}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "P" not in doc:
        raise FormatError(f"{filename}: expected an object with a 'P' matrix")
    P = doc["P"]
    if "d" in doc and len(P) != doc["d"]:
        raise FormatError(f"{filename}: 'd' disagrees with the matrix size")
    return validate_chain(P, pi_known=doc.get("pi"))


def save_path(path: SamplePath, filename: str) -> None:
    with open(filename, "w") as fh:
        fh.write(f"d={path.d}\n")
        fh.write("\n".join(str(int(s)) for s in path.states))
        fh.write("\n")


def load_path(filename: str) -> SamplePath:
    d_declared = None
    states: list[int] = []
    with open(filename) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("d=") and d_declared is None and not states:
                try:
                    d_declared = int(line[2:])
                except ValueError as exc:
                    raise FormatError(f"{filename}:{lineno}: bad state-count declaration") from exc
                continue
            try:
                states.append(int(line))
            except ValueError as exc:
                raise FormatError(f"{filename}:{lineno}: expected an integer state") from exc
    if len(states) < 2:
        raise PathTooShortError(f"{filename}: fewer than two observations")
    arr = np.asarray(states, dtype=np.int64)
    d = d_declared if d_declared is not None else max(int(arr.max()) + 1, 2)
    try:
        return SamplePath(d=d, states=arr)
    except PathTooShortError:
        raise
    except MixcertError as exc:
        raise FormatError(f"{filename}: {exc}") from exc
