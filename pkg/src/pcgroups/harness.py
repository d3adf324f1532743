"""Evidence harness for the d(G) = log_p |Omega_1(G)| characterisation of
powerful p-groups, and the invariant suite over catalogs and towers."""

from __future__ import annotations

import csv
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from . import subgroups as sg
from . import towers as tw
from .catalog import CatalogEntry, compute_invariants
from .limits import BudgetExceeded, EnumerationCapExceeded, current_cap, enumeration_cap
from .pcp import PcGroup, format_pcp

SCHEMA_HARNESS = "pcgroups.harness/1"
SCHEMA_SUITE = "pcgroups.suite/1"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_CRITICAL = 3

HALL_EXHAUSTIVE_MAX_ORDER = 125
HALL_SAMPLE = 2000
NORMAL_SCAN_MAX_N = 5


def _log(G: PcGroup, size: int) -> int:
    return round(math.log(size, G.p)) if size > 1 else 0


# ---------------------------------------------------------------- question harness


@dataclass(frozen=True)
class QuestionVerdict:
    group: str
    p: int
    n: int
    lhs: int  # d(G)
    rhs: int  # log_p |Omega_1(G)|
    powerful: bool
    direction_forward_ok: bool
    direction_backward_witness: bool
    omega1_elementary_abelian: bool

    @property
    def critical(self) -> bool:
        return self.direction_backward_witness


def question_verdict(G: PcGroup) -> QuestionVerdict:
    inv = compute_invariants(G)
    equal = inv.d == inv.omega1_log
    return QuestionVerdict(
        group=G.name,
        p=G.p,
        n=G.n,
        lhs=inv.d,
        rhs=inv.omega1_log,
        powerful=inv.powerful,
        direction_forward_ok=(not inv.powerful) or equal,
        direction_backward_witness=equal and not inv.powerful,
        omega1_elementary_abelian=inv.omega1_elementary_abelian,
    )


@dataclass
class HarnessResult:
    verdicts: list[QuestionVerdict]
    skipped: list[str]
    coverage: dict

    @property
    def critical(self) -> list[QuestionVerdict]:
        return [v for v in self.verdicts if v.critical]

    @property
    def forward_failures(self) -> list[QuestionVerdict]:
        return [v for v in self.verdicts if not v.direction_forward_ok]

    @property
    def exit_code(self) -> int:
        if self.critical:
            return EXIT_CRITICAL
        if self.forward_failures:
            return EXIT_FAILURE
        return EXIT_OK

    def summary(self) -> dict:
        return {
            "entries": len(self.verdicts) + len(self.skipped),
            "checked": len(self.verdicts),
            "skipped_p2": len(self.skipped),
            "powerful": sum(v.powerful for v in self.verdicts),
            "equality": sum(v.lhs == v.rhs for v in self.verdicts),
            "forward_ok": sum(v.direction_forward_ok for v in self.verdicts),
            "backward_witnesses": len(self.critical),
            "omega1_elementary_abelian": sum(v.omega1_elementary_abelian for v in self.verdicts),
        }

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_HARNESS,
            "coverage": self.coverage,
            "summary": self.summary(),
            "skipped": sorted(self.skipped),
            "verdicts": [asdict(v) for v in self.verdicts],
        }


def coverage(entries: list[CatalogEntry]) -> dict:
    """Orders present, with the catalog's own completeness claims; no extrapolation."""
    by_order: dict[str, dict] = {}
    for e in entries:
        key = f"{e.group.p}^{e.group.n}"
        slot = by_order.setdefault(key, {"groups": 0, "complete": True})
        slot["groups"] += 1
        slot["complete"] = slot["complete"] and e.coverage == "complete"
    return dict(sorted(by_order.items()))


def _verdict_worker(args):
    pres, cap = args
    with enumeration_cap(cap):
        return question_verdict(PcGroup(pres))


def run_question_harness(entries: list[CatalogEntry], jobs: int = 1) -> HarnessResult:
    todo = [e for e in entries if e.group.p >= 3]
    skipped = [e.name for e in entries if e.group.p < 3]
    cap = current_cap()
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            verdicts = list(ex.map(_verdict_worker, [(e.group.presentation, cap) for e in todo]))
    else:
        verdicts = [question_verdict(e.group) for e in todo]
    verdicts.sort(key=lambda v: v.group)
    return HarnessResult(verdicts, skipped, coverage(entries))


def write_reproducer(G: PcGroup, verdict: QuestionVerdict, directory: Path) -> Path:
    """Presentation plus invariants for a backward-direction witness."""
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"counterexample-{G.name}.pcp"
    lines = [
        "# CRITICAL: d(G) = log_p |Omega_1(G)| but G is not powerful",
        f"# verdict: {json.dumps(asdict(verdict), sort_keys=True)}",
        format_pcp(G.presentation),
    ]
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def render_critical(v: QuestionVerdict) -> str:
    bar = "!" * 72
    return (
        f"{bar}\nCRITICAL: backward-direction counterexample candidate {v.group}\n"
        f"  p={v.p} order=p^{v.n} d(G)={v.lhs} log_p|Omega_1(G)|={v.rhs} powerful=False\n{bar}"
    )


# ---------------------------------------------------------------- invariant suite


@dataclass(frozen=True)
class Row:
    group: str
    check: str
    status: str  # pass, fail, expected-negative, skipped
    detail: dict

    def as_dict(self) -> dict:
        return {"group": self.group, "check": self.check, "status": self.status, "detail": self.detail}


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _normal_subgroups(G: PcGroup):
    return [H for H in sg.all_subgroups(G) if H.is_normal]


def group_rows(G: PcGroup) -> list[Row]:
    """All per-group suite rows."""
    name = G.name
    rows: list[Row] = []
    if G.p < 3:
        for check in ("laffey", "wilson", "ma07", "potent-equality", "hall", "d-profile"):
            rows.append(Row(name, check, "skipped", {"reason": "p = 2"}))
        return rows
    inv = compute_invariants(G)
    index_p = inv.agemo_index_log
    om = inv.omega1_log

    rows.append(Row(name, "laffey", _status(inv.d <= om), {"d": inv.d, "omega1_log": om}))

    if inv.powerful:
        rows.append(Row(name, "wilson", _status(index_p == om),
                        {"agemo_index_log": index_p, "omega1_log": om}))
    else:
        rows.append(Row(name, "wilson", "skipped", {"reason": "not powerful"}))

    if inv.p_central:
        rows.append(Row(name, "ma07", _status(index_p <= om),
                        {"agemo_index_log": index_p, "omega1_log": om}))
    else:
        rows.append(Row(name, "ma07", "skipped", {"reason": "not p-central"}))

    rows.append(_potent_row(G, inv.potent, inv.powerful))

    if G.order <= HALL_EXHAUSTIVE_MAX_ORDER:
        rep = sg.hall_congruence_check(G)
    else:
        rep = sg.hall_congruence_check(G, trials=HALL_SAMPLE, seed=0)
    rows.append(Row(name, "hall", _status(rep.ok),
                    {"pairs": rep.pairs_checked, "exhaustive": rep.exhaustive,
                     "violations": len(rep.violations)}))

    if inv.powerful:
        prof = sg.d_profile(G)
        rows.append(Row(name, "d-profile", _status(prof.non_increasing),
                        {"p_series_indices": list(prof.d)}))
    else:
        rows.append(Row(name, "d-profile", "skipped", {"reason": "not powerful"}))

    fresh = compute_invariants(G)
    rows.append(Row(name, "recompute", _status(fresh == inv), {}))
    return rows


def _potent_row(G: PcGroup, potent: bool, powerful: bool) -> Row:
    detail: dict = {}
    if G.p == 3:
        detail["note"] = "for p = 3 potent means gamma_2 <= G^3, i.e. powerful"
        if potent != powerful:
            return Row(G.name, "potent-equality", "fail", {**detail, "potent": potent, "powerful": powerful})
    if not potent:
        return Row(G.name, "potent-equality", "skipped", {**detail, "reason": "not potent"})
    if G.n > NORMAL_SCAN_MAX_N:
        return Row(G.name, "potent-equality", "skipped", {**detail, "reason": "order too large"})
    bad = []
    normals = _normal_subgroups(G)
    for N in normals:
        if N.log_order - sg.agemo(N).log_order != sg.omega1(N).log_order:
            bad.append(list(N.igs))
    detail.update({"normal_subgroups": len(normals), "violations": len(bad)})
    return Row(G.name, "potent-equality", _status(not bad), detail)


def tower_rows(spec: tw.TowerSpec) -> list[Row]:
    checks = tw.CHECKS
    rows = []
    for r in tw.run_checks(spec, checks):
        detail = dict(r.detail)
        if r.tower != spec.format():
            detail["at"] = r.tower
        rows.append(Row(spec.format(), r.check, r.status, detail))
    return rows


def _suite_worker(item):
    kind, payload, cap = item
    with enumeration_cap(cap):
        try:
            if kind == "group":
                return [r.as_dict() for r in group_rows(PcGroup(payload))]
            return [r.as_dict() for r in tower_rows(payload)]
        except (BudgetExceeded, EnumerationCapExceeded) as exc:
            name = payload.name if kind == "group" else payload.format()
            return [Row(name, "budget", "skipped", {"reason": str(exc)}).as_dict()]


@dataclass
class SuiteResult:
    rows: list[dict]
    coverage: dict

    @property
    def counts(self) -> dict:
        return dict(sorted(Counter(r["status"] for r in self.rows).items()))

    @property
    def exit_code(self) -> int:
        return EXIT_FAILURE if any(r["status"] == "fail" for r in self.rows) else EXIT_OK

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_SUITE,
            "coverage": self.coverage,
            "summary": self.counts,
            "quotient_convention": tw.QUOTIENT_NOTE,
            "rows": self.rows,
        }


def run_invariant_suite(entries: list[CatalogEntry], towers: list[tw.TowerSpec] = (),
                        jobs: int = 1) -> SuiteResult:
    cap = current_cap()
    items = [("group", e.group.presentation, cap) for e in entries]
    items += [("tower", t, cap) for t in towers]
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(jobs) as ex:
            chunks = list(ex.map(_suite_worker, items))
    else:
        chunks = [_suite_worker(it) for it in items]
    rows = [r for chunk in chunks for r in chunk]
    # merge order is fixed regardless of scheduling
    rows.sort(key=lambda r: (r["group"], r["check"], json.dumps(r["detail"], sort_keys=True)))
    return SuiteResult(rows, coverage(entries))


def load_tower_file(path: str | Path) -> list[tw.TowerSpec]:
    specs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            specs.append(tw.TowerSpec.parse(line))
        except tw.TowerSpecError as exc:
            raise tw.TowerSpecError(f"{path}:{lineno}: {exc}") from None
    return specs


# ---------------------------------------------------------------- output


def dumps(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def rows_to_csv(rows: list[dict], columns=("group", "check", "status")) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*columns, "detail"])
    for r in rows:
        w.writerow([*(r[c] for c in columns), json.dumps(r.get("detail", {}), sort_keys=True)])
    return buf.getvalue()


def verdicts_to_csv(result: HarnessResult) -> str:
    buf = io.StringIO()
    fields = list(QuestionVerdict.__dataclass_fields__)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for v in result.verdicts:
        w.writerow([getattr(v, f) for f in fields])
    return buf.getvalue()
