"""Catalogs of pc presentations with lazily computed invariants."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

from . import subgroups as sg
from .pcp import (
    InconsistentPresentationError,
    PcGroup,
    PcpSyntaxError,
    parse_catalog,
)

BUNDLED = "bundled"


class CatalogError(ValueError):
    pass


def _log(G: PcGroup, size: int) -> int:
    return round(math.log(size, G.p)) if size > 1 else 0


@dataclass(frozen=True)
class Invariants:
    d: int
    omega1_log: int
    agemo_index_log: int
    powerful: bool
    potent: bool
    p_central: bool
    omega1_elementary_abelian: bool
    p_series: tuple[int, ...]
    gamma_series: tuple[int, ...]

    def as_dict(self) -> dict:
        return {
            "d": self.d,
            "omega1_log": self.omega1_log,
            "agemo_index_log": self.agemo_index_log,
            "powerful": self.powerful,
            "potent": self.potent,
            "p_central": self.p_central,
            "omega1_elementary_abelian": self.omega1_elementary_abelian,
            "p_series_indices": list(self.p_series),
            "gamma_series_indices": list(self.gamma_series),
        }


def compute_invariants(G: PcGroup) -> Invariants:
    om = sg.omega1(G)
    return Invariants(
        d=sg.min_generators(G),
        omega1_log=om.log_order,
        agemo_index_log=G.n - sg.agemo(G).log_order,
        powerful=sg.is_powerful(G),
        potent=sg.is_potent(G),
        p_central=sg.is_p_central(G),
        omega1_elementary_abelian=sg.is_elementary_abelian(om),
        p_series=sg.lower_central_p_series(G).indices,
        gamma_series=sg.lower_central_series(G).indices,
    )


class CatalogEntry:
    def __init__(self, group: PcGroup, source: str = "", coverage: str = "unknown"):
        self.group = group
        self.source = source
        self.coverage = coverage

    @property
    def name(self) -> str:
        return self.group.name

    @cached_property
    def invariants(self) -> Invariants:
        return compute_invariants(self.group)

    def __repr__(self):
        return f"CatalogEntry({self.name!r}, order={self.group.p}^{self.group.n})"


def _coverage(text: str) -> str:
    """A file declares ``# coverage: complete`` or ``# coverage: partial``."""
    for line in text.splitlines():
        m = re.match(r"#\s*coverage:\s*(\w+)", line.strip())
        if m:
            return m.group(1)
    return "unknown"


def _load_text(text: str, source: str) -> list[CatalogEntry]:
    cov = _coverage(text)
    try:
        presentations = parse_catalog(text)
    except PcpSyntaxError as exc:
        raise CatalogError(f"{source}: {exc}") from exc
    out = []
    for pres in presentations:
        try:
            G = PcGroup(pres)
        except InconsistentPresentationError as exc:
            raise CatalogError(f"{source}: {exc}") from exc
        if len(list(G.enumerate_elements())) != pres.p**pres.n:
            raise CatalogError(f"{source}: {pres.name} has wrong order")
        out.append(CatalogEntry(G, source, cov))
    return out


def bundled_files() -> list[Path]:
    root = resources.files("pcgroups") / "data" / "catalog"
    return sorted(Path(str(f)) for f in root.iterdir() if f.name.endswith(".pcp"))


def load_catalog(path: str | Path = BUNDLED) -> list[CatalogEntry]:
    """Load every ``.pcp`` file of a directory (or a single file)."""
    if str(path) == BUNDLED:
        files = bundled_files()
    else:
        path = Path(path)
        files = sorted(path.glob("*.pcp")) if path.is_dir() else [path]
    entries = []
    for f in files:
        entries.extend(_load_text(f.read_text(encoding="utf-8"), f.name))
    names = Counter(e.name for e in entries)
    dup = [n for n, c in names.items() if c > 1]
    if dup:
        raise CatalogError(f"duplicate group names: {dup}")
    return entries


def find_group(name_or_path: str) -> PcGroup:
    """A bundled group by name, or the single group in a ``.pcp`` file."""
    p = Path(name_or_path)
    if p.suffix == ".pcp" and p.exists():
        entries = load_catalog(p)
        if len(entries) != 1:
            raise CatalogError(f"{p} holds {len(entries)} groups, expected 1")
        return entries[0].group
    for e in load_catalog(BUNDLED):
        if e.name == name_or_path:
            return e.group
    raise CatalogError(f"no bundled group named {name_or_path!r}")


# ---------------------------------------------------------------- isomorphism invariants


def _class_count(G: PcGroup) -> int:
    seen = set()
    classes = 0
    for x in G.enumerate_elements():
        if x in seen:
            continue
        classes += 1
        orbit = {x}
        frontier = [x]
        while frontier:
            y = frontier.pop()
            for g in G.gens:
                z = G.conjugate(y, g)
                if z not in orbit:
                    orbit.add(z)
                    frontier.append(z)
        seen |= orbit
    return classes


def invariant_signature(G: PcGroup) -> tuple:
    """Isomorphism invariants; distinct signatures prove non-isomorphism."""
    elems = list(G.enumerate_elements())
    orders = Counter(G.element_order(x) for x in elems)
    Z = sg.center(G)
    z_orders = Counter(G.element_order(x) for x in Z.elements())
    derived = []
    H = sg.whole_group(G)
    while H.log_order:
        D = sg.derived_subgroup(H)
        derived.append(D.log_order)
        if D == H:
            break
        H = D
    D = sg.derived_subgroup(G)
    return (
        G.p,
        G.n,
        tuple(sorted(orders.items())),
        tuple(sorted(z_orders.items())),
        sg.lower_central_series(G).orders,
        tuple(derived),
        sg.frattini(G).log_order,
        sg.omega1(G).log_order,
        sg.agemo(G).log_order,
        _class_count(G),
        tuple(sorted(Counter(G.element_order(x) for x in D.elements()).items())),
    )
