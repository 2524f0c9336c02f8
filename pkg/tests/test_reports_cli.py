import json
from fractions import Fraction

import numpy as np
import pytest

from primecover import reports
from primecover.cli import ConfigError, RunConfig, ceil_power, config_from_args, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_canonical_and_dumps():
    row = {"b": Fraction(3, 8), "a": np.int64(4), "c": 0.1 + 0.2, "d": (np.bool_(True), None)}
    assert reports.dumps(row) == '{"a":4,"b":{"den":8,"num":3},"c":0.3,"d":[true,null]}'
    csv = reports.to_csv([{"q": 5, "w": [1, 2]}, {"q": 7}], ["q", "w"])
    assert csv == 'q,w\n5,"[1,2]"\n7,\n'


def test_config_round_trip(tmp_path):
    cfg = RunConfig(kind="t1", q_lo=11, q_hi=40, exponent=Fraction(3, 2), indices=(2, 3), squarefree=True)
    again = RunConfig.from_text(cfg.to_text())
    assert again == cfg
    path = tmp_path / "run.cfg"
    path.write_text("# sample\nkind = p2\nq-lo=13\nq_hi=13\n")
    got = config_from_args(["audit", "--config", str(path), "--q-hi", "20"])
    assert (got.kind, got.q_lo, got.q_hi) == ("p2", 13, 20)
    with pytest.raises(ConfigError):
        RunConfig.from_text("nonsense=1\n")
    with pytest.raises(ConfigError):
        RunConfig.from_text("k=three\n")


def test_ceil_power_exact():
    assert ceil_power(50, Fraction(3, 2)) == 354
    assert ceil_power(64, Fraction(3, 2)) == 512
    assert ceil_power(100, Fraction(1, 2)) == 10


def test_exit_codes(capsys):
    assert run(["table", "--ell-max", "29"], capsys)[0] == 0
    code, out, _ = run(["audit", "--kind", "cover", "--q-lo", "5", "--q-hi", "5", "--k", "3", "--y", "3"], capsys)
    assert code == 1 and json.loads(out)["uncovered"] == [1, 4]
    assert run(["audit", "--bogus"], capsys)[0] == 3
    assert run(["audit", "--kind", "cover", "--k", "5"], capsys)[0] == 3
    assert run(["table", "--ell-max", "100"], capsys)[0] == 2


def test_table_small_ranges(capsys):
    code, out, _ = run(["table", "--ell-max", "4"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 1
    code, out, _ = run(["table", "--ell-max", "5"], capsys)
    assert out.strip().splitlines()[1].startswith("5,")
    code, out, _ = run(["table", "--ell-max", "29"], capsys)
    rows = dict(line.split(",", 1) for line in out.strip().splitlines()[1:])
    assert rows["20"].strip('"') == "6,7" and rows["29"].strip('"') == "8,10" and rows["23"] == "8"


def test_cover_audit_rows(capsys):
    code, out, _ = run(["audit", "--kind", "cover", "--q-lo", "50", "--q-hi", "60", "--k", "3",
                        "--exponent", "3/2"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 11
    assert [json.loads(l)["q"] for l in lines] == list(range(50, 61))
    assert all(json.loads(l)["verdict"] == "covered" for l in lines)


def test_convolution_and_trouble_audits(capsys):
    code, out, _ = run(["audit", "--kind", "convolution", "--q-lo", "5", "--q-hi", "5", "--indices", "2",
                        "--y", "3"], capsys)
    (line,) = out.strip().splitlines()
    assert code == 0 and json.loads(line)["verdict"] == "identity_ok"
    code, out, _ = run(["audit", "--kind", "trouble-indices", "--eta", "11/32", "--y0", "32"], capsys)
    rep = json.loads(out)
    assert code == 0
    flagged = {(d["Y"], d["kind"]) for d in rep["discrepancies"]}
    assert (5, "computed_not_in_published_list") in flagged
    assert (14, "published_table_omits_row") in flagged
    assert (32, "published_list_not_strictly_feasible") in flagged
    assert (26, "gcd_condition_does_not_exclude") in flagged


@pytest.mark.parametrize("kind,extra", [
    ("cover", ["--k", "4", "--exponent", "3/2"]),
    ("t1", ["--primes-only"]),
    ("p2", []),
    ("density", ["--exponent", "3/2"]),
])
def test_parallel_output_identical(kind, extra, tmp_path, capsys):
    base = ["audit", "--kind", kind, "--q-lo", "40", "--q-hi", "90"] + extra
    texts = []
    for jobs in ("1", "4", "1"):
        path = tmp_path / f"{kind}-{jobs}-{len(texts)}.jsonl"
        main(base + ["--jobs", jobs, "--out", str(path)])
        texts.append(path.read_bytes())
    capsys.readouterr()
    assert texts[0] == texts[1] == texts[2] and texts[0]
