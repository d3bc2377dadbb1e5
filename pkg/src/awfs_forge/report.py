"""Verification reports shared by the validator, the lemma runner and the CLI.

A report is a list of check records, each tagged with the construction it
exercises (its anchor), plus a summary.  Records are sorted by id so that
the JSON output does not depend on evaluation order.
"""

from __future__ import annotations

import json
import traceback
from collections.abc import Callable
from dataclasses import dataclass, field

from .errors import CapExceeded, ForgeError, LawViolation

SCHEMA = 1

# anchor label -> what it refers to
ANCHORS = {
    "def:awfs": "algebraic weak factorization system: factorization, Σ, Π, unit and counit",
    "def:map-l-map-r": "L-maps and R-maps as (co)algebras",
    "fact:lifting": "L-maps lift functorially against R-maps",
    "fact:r-closure": "R-maps are closed under composition and pullback",
    "def:fibred-awfs": "fibred awfs, stable under reindexing",
    "def:cocylinder": "functorial cocylinder",
    "def:relative-cocylinder": "relative cocylinder over a base",
    "def:leibniz": "Leibniz face and boundary maps",
    "axioms-1": "structure functors on Leibniz maps of R-maps",
    "lem:left-to-deformation": "L-maps between fibrant objects are deformation retracts",
    "lem:restrict-right": "global R-maps restrict to slices",
    "lem:sigma-preserves-left": "slice L-maps are global L-maps",
    "lem:right-across-left": "R-structures transported across an L-map",
    "lem:heterogenize-right": "slice R-maps between fibrant objects are global R-maps",
    "thm:stable-factorization": "global structures on the slice factorization",
    "cor:stable-diagonal": "stable functorial diagonal factorization",
    "def:stability": "diagonal factorizations preserved by pullback",
    "prop:strongly-fibred-pullback": "L-maps of a strongly fibred awfs are closed under pullback",
    "prop:pre-ams-right": "a pre-ams casts trivial-fibration structures to fibration structures",
    "lem:axioms2-to-1": "Leibniz structures from a pre-ams",
    "plumbing": "finite groupoid engine and oracles",
}

PASS, FAIL, SKIP = "pass", "fail", "skip"


def jsonable(x):
    """Best-effort JSON form of a witness: containers become lists, the rest strings."""
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((jsonable(v) for v in x), key=repr)
    return repr(x)


@dataclass(frozen=True)
class CheckRecord:
    id: str
    anchor: str
    status: str
    witness: object = None

    def __post_init__(self):
        if self.anchor not in ANCHORS:
            raise ValueError(f"unknown anchor {self.anchor!r}")

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def as_dict(self) -> dict:
        out = {"id": self.id, "anchor": self.anchor, "status": self.status}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        return out


def failure_witness(exc: BaseException) -> dict:
    w: dict = {"error": type(exc).__name__}
    if isinstance(exc, LawViolation):
        w["law"] = exc.law
        w["at"] = exc.witness
    else:
        w["message"] = str(exc)
    if not isinstance(exc, ForgeError):
        # an unexpected crash: keep the innermost frame for debugging
        tb = traceback.extract_tb(exc.__traceback__)
        if tb:
            last = tb[-1]
            w["where"] = f"{last.filename.rsplit('/', 1)[-1]}:{last.lineno}"
    return w


@dataclass
class Report:
    command: str
    instance: str | None = None
    corpus: dict | None = None
    records: list[CheckRecord] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def add(self, cid: str, anchor: str, status: str, witness=None) -> None:
        self.records.append(CheckRecord(cid, anchor, status, witness))

    def check(self, cid: str, anchor: str, fn: Callable, *args, **kwargs):
        """Run ``fn`` and record the outcome; returns its value or ``None`` on failure.

        A falsy return value other than ``None`` counts as a failure.  Cap
        overruns are recorded as skips, never as failures.
        """
        try:
            value = fn(*args, **kwargs)
        except CapExceeded as exc:
            self.add(cid, anchor, SKIP, {"error": "CapExceeded", "message": str(exc)})
            return None
        except Exception as exc:  # noqa: BLE001 - every failure becomes a record
            self.add(cid, anchor, FAIL, failure_witness(exc))
            return None
        if value is False:
            self.add(cid, anchor, FAIL, {"error": "check returned false"})
            return None
        self.add(cid, anchor, PASS)
        return value

    def merge(self, other: "Report") -> None:
        self.records.extend(other.records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.sorted_records() if r.status == FAIL]

    def sorted_records(self) -> list[CheckRecord]:
        return sorted(self.records, key=lambda r: r.id)

    def counts(self) -> dict:
        c = {PASS: 0, FAIL: 0, SKIP: 0}
        for r in self.records:
            c[r.status] += 1
        c["total"] = len(self.records)
        return c

    @property
    def exit_status(self) -> int:
        return 0 if not self.failures else 1

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "instance": self.instance,
            "corpus": self.corpus,
            "summary": self.counts(),
            "exit_status": self.exit_status,
            **({"extra": jsonable(self.extra)} if self.extra else {}),
            "records": [r.as_dict() for r in self.sorted_records()],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent, sort_keys=False)

    def summary_line(self) -> str:
        c = self.counts()
        return f"{self.command}: {c[PASS]} passed, {c[FAIL]} failed, {c[SKIP]} skipped"
