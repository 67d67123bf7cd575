"""Free-format MPS dump of an LpProblem for cross-checking with external solvers."""

import logging
import re
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np
import scipy.sparse as sp

from app.core.errors import IoError
from app.core.lp import LpProblem

logger = logging.getLogger(__name__)

_UNSAFE = re.compile(r"[^A-Za-z0-9_.\[\]-]")


def _safe(name: str) -> str:
    return _UNSAFE.sub("_", name)


def _unique(names: Iterable[str], taken: Iterable[str] = ()) -> List[str]:
    """Sanitize names; a sanitized name already in use gets a numeric suffix."""
    used = set(taken)
    out = []
    for name in names:
        base = candidate = _safe(name)
        n = 1
        while candidate in used:
            n += 1
            candidate = f"{base}_{n}"
        used.add(candidate)
        out.append(candidate)
    return out


def mps_text(lp: LpProblem) -> str:
    """Render lp as free MPS (names may be long, no spaces)."""
    eq_names, ub_names = lp.row_names()
    rows = _unique((*eq_names, *ub_names), taken=("COST",))
    cols = _unique(lp.var_names())
    lines: List[str] = [f"NAME {_safe(lp.name)}", "ROWS", " N COST"]
    lines += [f" E {r}" for r in rows[: lp.num_eq]]
    lines += [f" L {r}" for r in rows[lp.num_eq:]]

    a = sp.csc_matrix(sp.vstack([lp.a_eq, lp.a_ub])) if rows else sp.csc_matrix((0, lp.num_vars))
    lines.append("COLUMNS")
    for j, name in enumerate(cols):
        if lp.objective[j] != 0:
            lines.append(f"    {name} COST {lp.objective[j]:.17g}")
        for k in range(a.indptr[j], a.indptr[j + 1]):
            lines.append(f"    {name} {rows[a.indices[k]]} {a.data[k]:.17g}")

    lines.append("RHS")
    rhs = np.concatenate([lp.b_eq, lp.b_ub])
    for i in np.flatnonzero(rhs):
        lines.append(f"    RHS {rows[i]} {rhs[i]:.17g}")

    lines.append("BOUNDS")
    for j, name in enumerate(cols):
        lo, hi = lp.lower[j], lp.upper[j]
        if np.isneginf(lo) and np.isposinf(hi):
            lines.append(f" FR BND {name}")
            continue
        if np.isneginf(lo):
            lines.append(f" MI BND {name}")
        elif lo != 0:
            lines.append(f" LO BND {name} {lo:.17g}")
        if np.isfinite(hi):
            lines.append(f" UP BND {name} {hi:.17g}")
    lines.append("ENDATA")
    return "\n".join(lines) + "\n"


def write_mps(lp: LpProblem, path: Union[str, Path]) -> Path:
    """Write lp to path in free MPS format.

    Raises:
        IoError: If the file cannot be written
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(mps_text(lp), encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    logger.info("[WRITE] MPS dump of %s -> %s", lp.name, path)
    return path
