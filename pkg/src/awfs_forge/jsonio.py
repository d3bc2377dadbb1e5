"""JSON reading and writing of finite groupoids and functors.

Groupoid files look like::

    {"objects": [0, 1], "arrows": [{"id": 0, "src": 0, "tgt": 0}, ...],
     "compose": [[g, f, gf], ...], "id": {"0": 0, ...}, "inv": {"0": 0, ...}}

and functor files like ``{"obj": {"0": 0}, "arr": {"0": 0}}``.  A functor
file may also carry its domain and codomain inline under ``"dom"`` and
``"cod"``, either as groupoid objects or as fixture names (``"IVL"``).
Ids are integers; JSON object keys are their decimal strings.  Every
structural problem raises :class:`MalformedInput`.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import FunctorError, MalformedInput
from .gpd import (
    BZ2,
    D2,
    IVL,
    ONE,
    FinGroupoid,
    GroupoidMap,
    check_functor,
    groupoid_from_tables,
    validate_groupoid,
)

FIXTURES = {"ONE": ONE, "IVL": IVL, "BZ2": BZ2, "D2": D2}


def _int(v, what: str) -> int:
    if isinstance(v, bool):
        raise MalformedInput(f"{what}: expected an integer id, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v)
        except ValueError:
            pass
    raise MalformedInput(f"{what}: expected an integer id, got {v!r}")


def _field(d: dict, key: str, kind: type):
    if not isinstance(d, dict):
        raise MalformedInput(f"expected a JSON object, got {type(d).__name__}")
    if key not in d:
        raise MalformedInput(f"missing field {key!r}")
    v = d[key]
    if not isinstance(v, kind):
        raise MalformedInput(f"field {key!r} should be a {kind.__name__}")
    return v


def groupoid_from_json(d, name: str | None = None) -> FinGroupoid:
    """Parse and validate a groupoid; law violations are malformed input too."""
    if isinstance(d, str):
        if d not in FIXTURES:
            raise MalformedInput(f"unknown fixture {d!r}")
        return FIXTURES[d]
    objects = [_int(x, "objects") for x in _field(d, "objects", list)]
    if len(set(objects)) != len(objects):
        raise MalformedInput("repeated object id")
    ends = {}
    for a in _field(d, "arrows", list):
        if not isinstance(a, dict):
            raise MalformedInput("arrow entries must be objects")
        i = _int(a.get("id"), "arrow id")
        if i in ends:
            raise MalformedInput(f"repeated arrow id {i}")
        ends[i] = (_int(a.get("src"), "arrow src"), _int(a.get("tgt"), "arrow tgt"))
    compose = {}
    for row in _field(d, "compose", list):
        if not isinstance(row, list) or len(row) != 3:
            raise MalformedInput("compose rows must be [g, f, gf]")
        g, f, gf = (_int(v, "compose") for v in row)
        if compose.setdefault((g, f), gf) != gf:
            raise MalformedInput(f"compose ({g}, {f}) given twice")
    ident = {_int(k, "id"): _int(v, "id") for k, v in _field(d, "id", dict).items()}
    inv = {_int(k, "inv"): _int(v, "inv") for k, v in _field(d, "inv", dict).items()}
    G = groupoid_from_tables(objects, ends, compose, ident, inv, name=name or d.get("name"))
    bad = validate_groupoid(G)  # dangling ids raise MalformedInput here
    if bad:
        v = bad[0]
        raise MalformedInput(f"groupoid law {v.law} fails at {v.witness!r}")
    return G


def functor_from_json(d, dom: FinGroupoid, cod: FinGroupoid) -> GroupoidMap:
    """Parse a functor between given groupoids and check that it is one."""
    obj = {_int(k, "obj"): _int(v, "obj") for k, v in _field(d, "obj", dict).items()}
    arr = {_int(k, "arr"): _int(v, "arr") for k, v in _field(d, "arr", dict).items()}
    if set(obj) != set(dom.objects):
        raise MalformedInput("functor object table does not cover the domain")
    if set(arr) != set(dom.arrows):
        raise MalformedInput("functor arrow table does not cover the domain")
    F = GroupoidMap(dom, cod, obj, arr)
    try:
        F.check_incidence()
    except FunctorError as exc:
        raise MalformedInput(str(exc)) from exc
    bad = check_functor(F)
    if bad:
        raise MalformedInput(f"not a functor: {bad[0].law} at {bad[0].witness!r}")
    return F


def map_from_json(d, dom: FinGroupoid | None = None, cod: FinGroupoid | None = None) -> GroupoidMap:
    """A functor whose ends come from the arguments or from inline ``dom``/``cod``.

    A missing codomain defaults to ``ONE`` and a map into a one-arrow
    groupoid may omit its tables; a missing domain is an error.
    """
    if not isinstance(d, dict):
        raise MalformedInput("a map file must be a JSON object")
    if dom is None:
        if "dom" not in d:
            raise MalformedInput("map has no domain: give it inline as 'dom'")
        dom = groupoid_from_json(d["dom"])
    if cod is None:
        cod = groupoid_from_json(d["cod"]) if "cod" in d else ONE
    if "obj" not in d and len(cod.arrows) == 1:
        # the unique map to a point may be left implicit
        (c,), (e,) = cod.objects, cod.arrows
        return GroupoidMap(dom, cod, {x: c for x in dom.objects}, {a: e for a in dom.arrows})
    return functor_from_json(d, dom, cod)


def load_json(path: str | Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


# -- output ------------------------------------------------------------------


def labelling(G: FinGroupoid) -> tuple[dict, dict]:
    """Integer ids for the objects and arrows of ``G``, in enumeration order."""
    return {x: i for i, x in enumerate(G.objects)}, {a: i for i, a in enumerate(G.arrows)}


def groupoid_to_json(G: FinGroupoid, labels: tuple[dict, dict] | None = None, names: bool = False) -> dict:
    """Serialize ``G`` with integer ids; ``names`` keeps the original labels as strings."""
    lo, la = labels or labelling(G)
    out = {
        "objects": [lo[x] for x in G.objects],
        "arrows": [{"id": la[a], "src": lo[G.src(a)], "tgt": lo[G.tgt(a)]} for a in G.arrows],
        "compose": [[la[g], la[f], la[G.comp(g, f)]] for f in G.arrows for g in G.out(G.tgt(f))],
        "id": {str(lo[x]): la[G.ident(x)] for x in G.objects},
        "inv": {str(la[a]): la[G.inv(a)] for a in G.arrows},
    }
    if names:
        out["object_names"] = {str(lo[x]): repr(x) for x in G.objects}
    return out


def functor_to_json(F: GroupoidMap, dom_labels: tuple[dict, dict], cod_labels: tuple[dict, dict]) -> dict:
    (do, da), (co, ca) = dom_labels, cod_labels
    return {
        "obj": {str(do[x]): co[F.obj[x]] for x in F.dom.objects},
        "arr": {str(da[a]): ca[F.arr[a]] for a in F.dom.arrows},
    }
