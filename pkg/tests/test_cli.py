import csv
import json
from pathlib import Path

import numpy as np
import pytest

from gltsym.cli import fmt, main
from gltsym.config import (
    ConstraintViolation,
    InvalidValue,
    MatrixFormatError,
    MissingKey,
    import_matrix,
    load_config,
)

ROOT = Path(__file__).resolve().parents[1]

SMALL = """\
[problem]
family = fd-diffusion
a = 2*sin(x)+cos(2*x)

[sizes]
n = 100, 400
m = 100, 400
l = 2, 3

[truth]
a = diffusion_coefficient
f = laplacian

[tables]
figure_size = 100
figure_order = 3

[qcurve]
n = 64

[counterexample]
n = 100, 400

[output]
commands = extract, tables, compare, weyl, qcurve, counterexample
"""


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_diffusion_config_is_valid():
    cfg = load_config(ROOT / "scripts" / "configs" / "diffusion.ini")
    assert cfg.family == "fd-diffusion"
    assert cfg.n == [400, 1600, 3600, 6400]
    assert cfg.m == [100, 400, 700, 1000]
    assert cfg.l == [3, 5, 7, 10, 15]
    assert cfg.a.text == "diffusion_coefficient"


def test_large_order_rejected(tmp_path):
    text = SMALL.replace("m = 100, 400", "m = 100").replace("l = 2, 3", "l = 100")
    with pytest.raises(ConstraintViolation) as info:
        load_config(write(tmp_path, text))
    assert info.value.line == 8
    assert "line 8" in str(info.value)


def test_missing_key_has_line(tmp_path):
    text = SMALL.replace("family = fd-diffusion\n", "")
    with pytest.raises(MissingKey) as info:
        load_config(write(tmp_path, text))
    assert info.value.line == 1


@pytest.mark.parametrize("old, new, line", [
    ("n = 100, 400", "n = 100, four", 6),
    ("family = fd-diffusion", "family = spline", 2),
    ("a = 2*sin(x)+cos(2*x)", "a = 2*sin(x", 3),
    ("[tables]", "[tables]\nbogus = 1", 15),
])
def test_invalid_values_have_lines(tmp_path, old, new, line):
    with pytest.raises(InvalidValue) as info:
        load_config(write(tmp_path, SMALL.replace(old, new)))
    assert info.value.line == line


def test_small_sizes_rejected(tmp_path):
    with pytest.raises(ConstraintViolation):
        load_config(write(tmp_path, SMALL.replace("n = 100, 400", "n = 2, 400")))


def test_import_matrix_formats(tmp_path):
    p = write(tmp_path, "2\n1,0\n0,1\n", "eye.txt")
    np.testing.assert_array_equal(import_matrix(p), np.eye(2))
    p = write(tmp_path, "2\n1+2i,0\n0,-1.5\n", "c.txt")
    assert import_matrix(p)[0, 0] == 1 + 2j
    p = write(tmp_path, "3\n1,0,0\n0,1\n0,0,1\n", "ragged.txt")
    with pytest.raises(MatrixFormatError, match="row 2"):
        import_matrix(p)
    p = write(tmp_path, "2\n1,x\n0,1\n", "bad.txt")
    with pytest.raises(MatrixFormatError, match="row 1, column 2"):
        import_matrix(p)


def test_import_family(tmp_path):
    rng = np.random.default_rng(3)
    n = 36
    a = rng.standard_normal((n, n))
    a = a + a.T
    (tmp_path / "mat.txt").write_text(f"{n}\n" + "\n".join(",".join(repr(float(v)) for v in row) for row in a) + "\n")
    cfg_text = "[problem]\nfamily = import\nmatrix = mat.txt\n\n[sizes]\nl = 2\n\n[output]\ncommands = extract\n"
    cfg = load_config(write(tmp_path, cfg_text))
    assert cfg.n == [n] and cfg.m == [n]
    out = tmp_path / "out"
    assert main(["extract", "--config", str(tmp_path / "run.ini"), "--out", str(out)]) == 0
    rows = read_csv(out / "coefficients.csv")
    assert rows[0] == ["m", "j", "k", "re", "im"]
    assert len(rows) == 1 + 25


def test_run_all_commands_and_determinism(tmp_path):
    cfg = write(tmp_path, SMALL)
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["run", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(cfg), "--out", str(out2), "--threads", "2"]) == 0
    names = sorted(p.name for p in out1.iterdir())
    assert names == sorted(["coefficients.csv", "table1.csv", "table2.csv", "table3.csv", "figure1.csv",
                            "weyl.csv", "qcurve.csv", "counterexample.csv", "manifest.json"])
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name
    for name in names:
        if name.endswith(".csv"):
            raw = (out1 / name).read_bytes()
            assert b"\r" not in raw and raw.endswith(b"\n")
            rows = read_csv(out1 / name)
            assert len({len(r) for r in rows}) == 1, name
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["version"] == "0.1.0"
    assert manifest["config"]["n"] == [100, 400]
    t2 = read_csv(out1 / "table2.csv")
    assert t2[0] == ["l", "100", "400"]
    # l = 3 is not feasible at m = 100 (isqrt(100) = 10 > 3 is fine, so both orders exist)
    assert all(v != "nan" for row in t2[1:] for v in row)


def test_toeplitz_extract(tmp_path):
    text = ("[problem]\nfamily = toeplitz\nf = fourier: 0:2, 1:-1, -1:-1\n\n"
            "[sizes]\nn = 400\nm = 400\nl = 2\n\n[estimator]\nnodes = right\nnormalization = trace\n\n"
            "[output]\ncommands = extract\n")
    out = tmp_path / "out"
    assert main(["extract", "--config", str(write(tmp_path, text)), "--out", str(out)]) == 0
    rows = read_csv(out / "coefficients.csv")[1:]
    vals = {(int(r[1]), int(r[2])): complex(float(r[3]), float(r[4])) for r in rows}
    assert vals[0, 0] == pytest.approx(2, abs=1e-12)
    assert vals[0, 1] == pytest.approx(-0.95, abs=1e-12)  # m (p - 1) / n = 20 * 19 / 400
    assert all(abs(v) < 1e-12 for (j, _), v in vals.items() if j != 0)


def test_counterexample_command(tmp_path):
    out = tmp_path / "out"
    assert main(["counterexample", "--config", str(write(tmp_path, SMALL)), "--out", str(out)]) == 0
    rows = read_csv(out / "counterexample.csv")
    assert rows[0] == ["n", "gnorm_lt", "gnorm_lt_squared"]
    assert float(rows[2][2]) > float(rows[1][2])


def test_exit_codes(tmp_path):
    assert main(["extract", "--config", str(tmp_path / "missing.ini")]) == 4
    bad = write(tmp_path, SMALL.replace("l = 2, 3", "l = 50"))
    assert main(["extract", "--config", str(bad)]) == 2
    no_truth = SMALL.replace("[truth]\na = diffusion_coefficient\nf = laplacian\n", "")
    no_truth = no_truth.replace("extract, tables, ", "extract, ")
    assert main(["tables", "--config", str(write(tmp_path, no_truth, "nt.ini"))]) == 2
    singular = SMALL.replace("a = 2*sin(x)+cos(2*x)", "a = 1/(x-0.5)")
    out = tmp_path / "sing"
    assert main(["extract", "--config", str(write(tmp_path, singular, "s.ini")), "--out", str(out)]) == 3
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["extract", "--config", str(write(tmp_path, SMALL, "ok.ini")), "--out", str(blocker)]) == 4


def test_fmt():
    assert fmt(3) == "3"
    assert fmt(0.123456789) == "0.123457"
    assert fmt(float("nan")) == "nan"
    assert fmt(-0.0) == "0"
    assert fmt(np.float64(1e-20)) == "1e-20"
