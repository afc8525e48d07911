"""File formats, digests, round trips, and the command line."""

import json

import pytest

from braidfold.automaton import build_automaton
from braidfold.cli import main
from braidfold.io import (
    FormatError,
    apply_annotations,
    automaton_from_json,
    automaton_to_json,
    digest_of,
    packaged_annotations,
    read_automaton,
    write_automaton,
    write_json,
)
from braidfold.tracks import NAMED_STRATA


def build(name):
    punctures, stratum = NAMED_STRATA[name]
    return build_automaton(stratum, punctures)


def test_automaton_round_trip(tmp_path):
    auto = build("two-trigon")
    path = tmp_path / "a.json"
    doc = write_automaton(auto, str(path))
    loaded = read_automaton(str(path))
    assert loaded.codes == auto.codes
    assert [a.key() for a in loaded.arrows] == [a.key() for a in auto.arrows]
    assert automaton_to_json(loaded)["digest"] == doc["digest"]


def test_digest_deterministic_and_tamper_evident(tmp_path):
    auto = build("one-trigon")
    d1 = automaton_to_json(auto)["digest"]
    d2 = automaton_to_json(build("one-trigon"))["digest"]
    assert d1 == d2
    doc = automaton_to_json(auto)
    doc["arrows"][0]["rule"] = [2, 1]
    with pytest.raises(FormatError):
        automaton_from_json(doc)


def test_digest_ignores_environment():
    doc = automaton_to_json(build("one-trigon"))
    base = digest_of(doc)
    doc["environment"]["tool_version"] = "something-else"
    assert digest_of(doc) == base


def test_bad_perm_rejected(tmp_path):
    doc = automaton_to_json(build("one-trigon"))
    doc["arrows"][0]["perm"] = [1, 1, 2, 3]
    doc["digest"] = digest_of(doc)
    with pytest.raises(FormatError):
        automaton_from_json(doc)


def test_annotations_stale_entry_rejected():
    auto = build("one-trigon")
    overlay = {
        "kind": "annotations",
        "arrows": [
            {"source": 0, "target": 0, "perm": [1, 2, 3, 4], "rule": [4, 4],
             "braid_word": [1]},
        ],
    }
    with pytest.raises(FormatError):
        apply_annotations(auto, overlay)


def test_packaged_annotations_exist():
    for name in ("boundary-3prong", "two-trigon", "one-trigon", "four-prong"):
        assert packaged_annotations(name) is not None
    assert packaged_annotations("no-such-stratum") is None


def test_cli_gen_search_certify_verify(tmp_path, capsys):
    auto_path = str(tmp_path / "auto.json")
    assert main(["gen", "--punctures", "5", "--stratum", "two-trigon",
                 "-o", auto_path]) == 0
    out = capsys.readouterr().out
    assert "9 vertices" in out

    rec_path = str(tmp_path / "rec.json")
    assert main(["search", auto_path, "--lambda", "2.02", "--maxnorm", "72",
                 "-o", rec_path]) == 0
    out = capsys.readouterr().out
    assert "candidates: 1" in out
    rec = json.loads(open(rec_path).read())
    assert rec["digest"] == digest_of(rec)
    assert len(rec["candidates"]) == 1

    cert_path = str(tmp_path / "cert.json")
    assert main(["certify", "--braid-index", "4", "-o", cert_path]) == 0
    capsys.readouterr()
    assert main(["verify", cert_path]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out


def test_cli_gen_validation_errors(tmp_path, capsys):
    code = main(["gen", "--punctures", "4", "--stratum", "two-trigon",
                 "-o", str(tmp_path / "x.json")])
    assert code == 2
    code = main(["gen", "--punctures", "5", "--stratum", "nope",
                 "-o", str(tmp_path / "x.json")])
    assert code == 2
    assert not (tmp_path / "x.json").exists()  # domain error writes no file


def test_cli_search_compact_format(tmp_path, capsys):
    auto_path = str(tmp_path / "auto.json")
    main(["gen", "--punctures", "4", "--stratum", "one-trigon", "-o", auto_path])
    rec_path = str(tmp_path / "rec.json")
    assert main(["search", auto_path, "--lambda", "2.3", "--format", "compact",
                 "-o", rec_path]) == 0
    text = open(rec_path).read()
    assert text.count("\n") == 1 and json.loads(text)["kind"] == "stratum-record"


def test_cli_certify_domain_error(capsys):
    assert main(["certify", "--braid-index", "9"]) == 2


def test_cli_resource_abort(tmp_path, capsys):
    auto_path = str(tmp_path / "auto.json")
    main(["gen", "--punctures", "5", "--stratum", "two-trigon", "-o", auto_path])
    capsys.readouterr()
    code = main(["search", auto_path, "--lambda", "2.02",
                 "--max-expansions", "2000"])
    assert code == 3
    assert "ABORT" in capsys.readouterr().err


def test_cli_verify_catches_corruption(tmp_path, capsys):
    cert_path = str(tmp_path / "cert.json")
    assert main(["certify", "--braid-index", "4", "-o", cert_path]) == 0
    capsys.readouterr()
    doc = json.loads(open(cert_path).read())

    # perturb one candidate's matrix entry: named in the report
    bad = json.loads(json.dumps(doc))
    bad["strata"][0]["candidates"][0]["matrix"][0] += 1
    bad["strata"][0]["candidates"][0]["char_poly"][0] += 1
    bad["digest"] = digest_of(bad)
    bad_path = str(tmp_path / "bad.json")
    write_json(bad, bad_path)
    assert main(["verify", bad_path]) == 5
    err = capsys.readouterr().err
    assert "candidate 0" in err

    # an interval that no longer contains a root of the polynomial
    bad2 = json.loads(json.dumps(doc))
    bad2["strata"][0]["candidates"][0]["dilatation"] = ["3/2", "3/2"]
    bad2["digest"] = digest_of(bad2)
    bad2_path = str(tmp_path / "bad2.json")
    write_json(bad2, bad2_path)
    assert main(["verify", bad2_path]) == 5
    err = capsys.readouterr().err
    assert "interval" in err or "root" in err

    # digest tampering alone is also caught
    bad3 = json.loads(json.dumps(doc))
    bad3["punctures"] = 6
    bad3_path = str(tmp_path / "bad3.json")
    write_json(bad3, bad3_path)
    assert main(["verify", bad3_path]) == 5


def test_search_result_digest_reproducible(tmp_path):
    auto = build("one-trigon")
    from braidfold.io import search_result_to_json
    from braidfold.search import search

    doc1 = search_result_to_json(search(auto, "2.3", threads=1), automaton_to_json(auto))
    doc2 = search_result_to_json(search(auto, "2.3", threads=4), automaton_to_json(auto))
    assert doc1["digest"] == doc2["digest"]
