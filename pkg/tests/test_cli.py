import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from fractal_fft.cli import (
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_SEARCH_EXHAUSTED,
    EXIT_VALIDATION,
    EXIT_VERIFICATION,
    main,
)
from fractal_fft.formats import format_signal, parse_config, read_signal

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def cfg(name):
    return CONFIGS / f"{name}.json"


def point_column(text):
    lines = text.splitlines()
    assert lines[0] == "index\tdigits\texact\tapprox"
    return [line.split("\t")[2] for line in lines[1:] if not line.startswith("#")]


def test_points_dyadic_spatial_reverse():
    code, text = run("points", "--config", cfg("dyadic"), "--level", 2, "--kind", "spatial", "--ordering", "reverse")
    assert code == EXIT_OK
    assert point_column(text) == ["0/1", "1/4", "1/2", "3/4"]
    assert text.splitlines()[2].split("\t")[1] == "1,0"


def test_points_dyadic_frequency():
    code, text = run("points", "--config", cfg("dyadic"), "--level", 2, "--kind", "frequency")
    assert point_column(text) == ["0/1", "1/1", "2/1", "3/1"]


def test_points_quarter_cantor_frequency():
    _, text = run("points", "--config", cfg("quarter_cantor"), "--level", 2, "--kind", "frequency")
    assert point_column(text) == ["0/1", "1/1", "4/1", "5/1"]


def test_points_two_dimensional():
    _, text = run("points", "--config", cfg("sierpinski"), "--level", 1)
    assert point_column(text) == ["0/1 0/1", "1/2 0/1", "0/1 1/2"]


def test_points_size_cap(capsys):
    code, _ = run("points", "--config", cfg("dyadic"), "--level", 21)
    assert code == EXIT_RESOURCE
    assert "size cap" in capsys.readouterr().err


def write(path, values):
    path.write_text(format_signal(values))
    return path


def test_forward_inverse_round_trip(tmp_path, rng):
    v = rng.standard_normal(1024) + 1j * rng.standard_normal(1024)
    sig = write(tmp_path / "v.txt", v)
    code, text = run("forward", "--config", cfg("dyadic"), "--level", 10, "--signal", sig, "--out", tmp_path / "w.txt")
    assert code == EXIT_OK and "operations:" in text and "wall_time_s:" in text
    code, text = run("inverse", "--config", cfg("dyadic"), "--level", 10,
                     "--signal", tmp_path / "w.txt", "--out", tmp_path / "back.txt")
    assert code == EXIT_OK
    residual = float(text.split("residual:")[1].split()[0])
    assert residual < 1e-8
    assert np.max(np.abs(read_signal(tmp_path / "back.txt") - v)) < 1e-8


def test_forward_delta(tmp_path):
    sig = write(tmp_path / "delta.txt", np.eye(9)[0])
    run("forward", "--config", cfg("sierpinski"), "--level", 2, "--signal", sig, "--out", tmp_path / "o.txt")
    assert np.allclose(read_signal(tmp_path / "o.txt"), np.ones(9))


@pytest.mark.parametrize("command", ["forward", "inverse"])
@pytest.mark.parametrize("ordering", ["obverse", "reverse"])
def test_dense_oracle_flag(tmp_path, rng, command, ordering):
    sig = write(tmp_path / "v.txt", rng.standard_normal(32) + 0j)
    code, text = run(command, "--config", cfg("middle_third"), "--level", 5, "--ordering", ordering,
                     "--signal", sig, "--out", tmp_path / "o.txt", "--oracle", "dense")
    assert code == EXIT_OK
    assert float(text.split("dense_max_deviation:")[1].split()[0]) < 1e-9


def test_output_file_round_trips_bit_identically(tmp_path, rng):
    sig = write(tmp_path / "v.txt", rng.standard_normal(8) + 1j * rng.standard_normal(8))
    run("forward", "--config", cfg("quarter_cantor"), "--level", 3, "--signal", sig, "--out", tmp_path / "o.txt")
    text = (tmp_path / "o.txt").read_text()
    assert format_signal(read_signal(tmp_path / "o.txt")) == text


def test_transform_length_mismatch(tmp_path, capsys):
    sig = write(tmp_path / "v.txt", np.ones(5))
    code, _ = run("forward", "--config", cfg("dyadic"), "--level", 2, "--signal", sig, "--out", tmp_path / "o")
    assert code == EXIT_VALIDATION
    assert "expected K**N = 4" in capsys.readouterr().err


def test_missing_signal_file(tmp_path):
    code, _ = run("forward", "--config", cfg("dyadic"), "--level", 2,
                  "--signal", tmp_path / "nope.txt", "--out", tmp_path / "o")
    assert code == EXIT_VALIDATION


def test_bad_config_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(cfg("dyadic").read_text().replace('"K": 2', '"K": "two"'))
    code, _ = run("points", "--config", bad, "--level", 1)
    assert code == EXIT_VALIDATION
    assert "bad.json:3" in capsys.readouterr().err


@pytest.mark.parametrize("name", ["dyadic", "quarter_cantor"])
def test_verify_passes(name):
    code, text = run("verify", "--config", cfg(name), "--level", 5)
    assert code == EXIT_OK and text.rstrip().endswith("PASS")
    assert ("M*M - K^N I" in text) == (name in ("dyadic", "quarter_cantor"))


def test_verify_invertible_fixture():
    code, text = run("verify", "--config", cfg("sierpinski"), "--level", 3)
    assert code == EXIT_OK and "M*M" not in text


def test_verify_singular():
    code, text = run("verify", "--config", cfg("singular"), "--level", 3)
    assert code == EXIT_VALIDATION
    assert text.startswith("FAIL") and "M₁ singular" in text


def test_verify_cap():
    code, _ = run("verify", "--config", cfg("dyadic"), "--level", 13)
    assert code == EXIT_RESOURCE


def test_bench_csv():
    code, text = run("bench", "--config", cfg("dyadic"), "--levels", "1:6")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "N,measured,bound,ratio,dense_ops"
    rows = [list(map(float, line.split(","))) for line in lines[1:]]
    assert [r[2] for r in rows[:3]] == [6, 28, 88]
    assert all(r[1] <= r[2] for r in rows)
    assert rows[1][4] == 4 * 4 + 4 * 3


def test_search_invertible(tmp_path):
    out = tmp_path / "found.json"
    code, text = run("search", "--config", cfg("middle_third_nofreq"), "--target", "invertible", "--out", out)
    assert code == EXIT_OK
    found = parse_config(out.read_text())
    assert found.c == ((0,), (1,))
    found.to_system()


def test_search_hadamard_quarter_cantor():
    code, text = run("search", "--config", cfg("quarter_cantor_nofreq"), "--target", "hadamard")
    assert code == EXIT_OK
    data = json.loads(text)
    assert data["c"] == [[0], [1]] and data["m1_class"] == "hadamard"


def test_search_exhausted(capsys):
    code, _ = run("search", "--config", cfg("middle_third_nofreq"), "--target", "hadamard", "--bound", 50)
    assert code == EXIT_SEARCH_EXHAUSTED
    err = capsys.readouterr().err
    assert "exhausted" in err and "[-50, 50]" in err
    assert EXIT_SEARCH_EXHAUSTED not in (EXIT_OK, EXIT_VALIDATION, EXIT_VERIFICATION, EXIT_RESOURCE)


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fractal_fft.cli", "bench", "--config", str(cfg("dyadic")), "--levels", "2:2"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.splitlines()[1].split(",")[2] == "28"


def test_deterministic_output(tmp_path):
    a = run("bench", "--config", cfg("sierpinski"), "--levels", "1:3")[1]
    b = run("bench", "--config", cfg("sierpinski"), "--levels", "1:3")[1]
    assert a == b
