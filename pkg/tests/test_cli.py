import json

import pytest
from hypothesis import given
from strategies import functors, groupoids

from awfs_forge.cli import main
from awfs_forge.errors import MalformedInput
from awfs_forge.gpd import BZ2, IVL, ONE
from awfs_forge.jsonio import (
    functor_from_json,
    functor_to_json,
    groupoid_from_json,
    groupoid_to_json,
    labelling,
    load_json,
    map_from_json,
)

# -- JSON round trips ----------------------------------------------------------


@given(groupoids())
def test_groupoid_round_trip(G):
    H = groupoid_from_json(json.loads(json.dumps(groupoid_to_json(G))))
    assert (len(H.objects), len(H.arrows)) == (len(G.objects), len(G.arrows))
    assert H.signature() == groupoid_from_json(groupoid_to_json(H)).signature()


@given(functors())
def test_functor_round_trip(F):
    ld, lc = labelling(F.dom), labelling(F.cod)
    D = groupoid_from_json(groupoid_to_json(F.dom, ld))
    C = groupoid_from_json(groupoid_to_json(F.cod, lc))
    G = functor_from_json(json.loads(json.dumps(functor_to_json(F, ld, lc))), D, C)
    for a in F.dom.arrows:
        assert G.arr[ld[1][a]] == lc[1][F.arr[a]]


def test_fixture_names_and_the_implicit_bang():
    f = map_from_json({"dom": "IVL"})
    assert f.cod is ONE and set(f.obj.values()) == {0}
    assert groupoid_from_json("BZ2") is BZ2


def test_fixture_round_trip_is_exact():
    # IVL is already labelled 0..n, so nothing is renamed
    G = groupoid_from_json(groupoid_to_json(IVL))
    assert G.signature() == IVL.signature()


BAD_GROUPOIDS = [
    "NOPE",
    [1, 2],
    {"objects": [0, 0], "arrows": [], "compose": [], "id": {}, "inv": {}},
    {"objects": [0], "arrows": [{"id": 0, "src": 0, "tgt": 9}], "compose": [[0, 0, 0]], "id": {"0": 0}, "inv": {"0": 0}},
    {"objects": [0], "arrows": [{"id": 0, "src": 0, "tgt": 0}], "compose": [], "id": {"0": 0}, "inv": {"0": 0}},
    {"objects": [True], "arrows": [], "compose": [], "id": {}, "inv": {}},
    {"objects": [0], "arrows": [{"id": 0, "src": 0, "tgt": 0}], "compose": [[0, 0]], "id": {"0": 0}, "inv": {"0": 0}},
]


@pytest.mark.parametrize("d", BAD_GROUPOIDS)
def test_malformed_groupoids(d):
    with pytest.raises(MalformedInput):
        groupoid_from_json(d)


def test_malformed_functors():
    with pytest.raises(MalformedInput):
        map_from_json({"cod": "IVL"})  # no domain
    with pytest.raises(MalformedInput):
        map_from_json({"dom": "IVL", "cod": "BZ2", "obj": {"0": 0}, "arr": {}})  # partial
    with pytest.raises(MalformedInput):
        # sends u: 0 -> 1 to an arrow 1 -> 0
        u, ui = [a for a in IVL.arrows if IVL.src(a) != IVL.tgt(a)]
        if IVL.src(u) != 0:
            u, ui = ui, u
        map_from_json(
            {"dom": "IVL", "cod": "IVL", "obj": {"0": 0, "1": 1}, "arr": {str(a): (ui if a == u else a) for a in IVL.arrows}}
        )


def test_load_json_errors(tmp_path):
    with pytest.raises(MalformedInput):
        load_json(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(MalformedInput):
        load_json(p)


# -- the command line ----------------------------------------------------------


def write(tmp_path, name, d):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return str(p)


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_factor_diagonal_of_ivl(tmp_path, capsys):
    m = write(tmp_path, "ivl.json", {"dom": "IVL", "cod": "ONE"})
    code, out, err = run(capsys, ["factor-diagonal", "--instance", "groupoid", "--map", m])
    assert code == 0
    d = json.loads(out)
    assert d["schema"] == 1 and d["exit_status"] == 0
    assert d["extra"]["counts"]["P_objects"] == 8
    P = groupoid_from_json(d["extra"]["P"])
    XX = groupoid_from_json(d["extra"]["XxX"])
    p = functor_from_json(d["extra"]["p"], P, XX)
    assert {p.obj[x] for x in P.objects} == set(XX.objects)
    assert "passed" in err


def test_factor_diagonal_without_r_structure(tmp_path, capsys):
    u = next(a for a in IVL.arrows if IVL.src(a) != IVL.tgt(a))
    d0 = {"dom": "ONE", "cod": "IVL", "obj": {"0": IVL.src(u)}, "arr": {"0": IVL.ident(IVL.src(u))}}
    code, out, _ = run(capsys, ["factor-diagonal", "--instance", "groupoid", "--map", write(tmp_path, "d0.json", d0)])
    assert code == 1
    rec = json.loads(out)["records"][0]
    assert rec["witness"]["law"] == "no-R-structure"


def test_base_file_supplies_the_codomain(tmp_path, capsys):
    base = write(tmp_path, "base.json", groupoid_to_json(ONE))
    m = write(tmp_path, "bz2.json", {"dom": "BZ2"})
    code, _, _ = run(capsys, ["factor-diagonal", "--instance", "degenerate", "--map", m, "--base", base])
    assert code == 0


@pytest.mark.parametrize("instance", ["groupoid", "degenerate"])
def test_check_stability(tmp_path, capsys, instance):
    m = write(tmp_path, "bz2.json", {"dom": "BZ2"})
    s = write(tmp_path, "sigma.json", {"dom": "IVL"})
    out = tmp_path / "report.json"
    code, stdout, _ = run(
        capsys, ["check-stability", "--instance", instance, "--map", m, "--reindex", s, "--out", str(out)]
    )
    assert code == 0 and stdout == ""
    d = json.loads(out.read_text())
    ids = {r["id"] for r in d["records"]}
    assert {"stability.P-square", "stability.diagonal-square"} <= ids
    assert ("stability.literal" in ids) == (instance == "degenerate")


def test_malformed_inputs_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    code, out, err = run(capsys, ["factor-diagonal", "--instance", "groupoid", "--map", str(bad)])
    assert code == 2
    assert json.loads(out)["error"]["type"] == "MalformedInput"
    assert "malformed" in err
    m = write(tmp_path, "m.json", {"dom": "IVL", "cod": "BZ2", "obj": {"0": 0}, "arr": {}})
    assert run(capsys, ["factor-diagonal", "--instance", "groupoid", "--map", m])[0] == 2
    s = write(tmp_path, "s.json", {"dom": "IVL", "cod": "BZ2"})
    m = write(tmp_path, "ok.json", {"dom": "IVL"})
    assert run(capsys, ["check-stability", "--instance", "groupoid", "--map", m, "--reindex", s])[0] == 2


def test_mutation_only_for_the_groupoid_instance(capsys):
    code, out, _ = run(capsys, ["validate", "--instance", "degenerate", "--mutate", "reverse_pi", "--n", "1"])
    assert code == 2


def test_bad_cap_environment(monkeypatch, capsys):
    monkeypatch.setenv("AWFS_FORGE_CAP", "lots")
    assert run(capsys, ["oracle-compare", "--n", "1"])[0] == 2


def test_validate_degenerate(capsys):
    code, out, err = run(capsys, ["validate", "--instance", "degenerate", "--seed", "1", "--n", "20"])
    assert code == 0
    d = json.loads(out)
    assert d["summary"]["fail"] == 0 and d["corpus"]["seed"] == 1
    assert err.startswith("validate:")


def test_validate_catches_the_planted_bug(capsys):
    code, out, err = run(capsys, ["validate", "--instance", "groupoid", "--seed", "42", "--n", "8", "--mutate", "reverse_pi"])
    assert code == 1
    assert json.loads(out)["extra"]["mutation"] == "reverse_pi"
    assert "FAIL awfs." in err


def test_reports_are_deterministic(capsys):
    argv = ["validate", "--instance", "groupoid", "--seed", "5", "--n", "3"]
    a = run(capsys, argv)
    b = run(capsys, argv)
    assert a == b


@pytest.mark.parametrize(
    "argv",
    [
        ["oracle-compare", "--n", "5"],
        ["lemmas", "--instance", "degenerate", "--n", "2"],
        ["preams", "--n", "3"],
    ],
)
def test_small_runs_are_clean(capsys, argv):
    code, out, _ = run(capsys, argv)
    assert code == 0
    assert json.loads(out)["summary"]["fail"] == 0


def test_unknown_subcommand_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
