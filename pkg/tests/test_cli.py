import socket
import threading
import time

import pytest
import uvicorn

from weakmodel.cli import run
from weakmodel.service import app

from conftest import DESCRIPTORS


def d(name):
    return str(DESCRIPTORS / f"{name}.yaml")


def test_compare_writes_csv_and_manifest(tmp_path, capsys):
    assert run(["compare", d("cubefree_not_squarefree_p23"), "--out", str(tmp_path)]) == 0
    csv = (tmp_path / "compare.csv").read_text().splitlines()
    assert csv[0] == ("n,kind,frequency-or-lag,empirical_re,empirical_im,theoretical_re,"
                      "theoretical_im,abs_error,tolerance,pass")
    assert all(line.endswith(",true") for line in csv[1:])
    man = (tmp_path / "manifest.yaml").read_text()
    assert "sha256" in man and "1e-12" in man and "compare.csv" in man


def test_outputs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["diffract", d("period_extinction"), "--out", str(out)]) == 0
    assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()
    assert (a / "manifest.yaml").read_bytes() == (b / "manifest.yaml").read_bytes()


def test_validate_failure_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text((DESCRIPTORS / "cubefree_not_squarefree_p23.yaml").read_text()
                   .replace("default: CUBEFREE", "default: TMP")
                   .replace("default: SQUAREFREE_IN", "default: CUBEFREE")
                   .replace("default: TMP", "default: SQUAREFREE_IN"))
    assert run(["validate", str(bad)]) == 2
    assert "inner_window" in capsys.readouterr().err


def test_usage_errors_exit_1():
    assert run(["density"]) == 1
    assert run(["density", d("fibonacci"), "--bogus"]) == 1
    assert run(["density", d("fibonacci"), "--lags", "a:b"]) == 1
    assert run(["nosuchcommand"]) == 1


def test_failed_verdict_exit_3(tmp_path):
    # a short raw (non-wrapped) run judged at the exact tolerance must fail
    desc = tmp_path / "tight.yaml"
    desc.write_text((DESCRIPTORS / "accidental_extinction.yaml").read_text()
                    .replace("wraparound: true", "wraparound: false\ntolerance: 1.0e-12")
                    .replace("n_schedule: [16]", "n_schedule: [13]"))
    assert run(["genericity", str(desc)]) == 3
    assert run(["density", str(desc)]) == 0


def test_stdout_csv(capsys):
    assert run(["autocorr", d("accidental_extinction"), "--lags", "0:2,8"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5 and lines[1].startswith("16,GENERIC_2_G,0,")


def test_generate_files(tmp_path):
    assert run(["generate", d("accidental_extinction"), "--n", "6", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "points_n6.txt").read_text().splitlines()[0] == "-4 4"


def test_periods_and_fourier_bohr(capsys):
    assert run(["periods", d("accidental_extinction")]) == 0
    assert "order: 2" in capsys.readouterr().out
    assert run(["fourier-bohr", d("accidental_extinction"), "--probes", "0.7071"]) == 0


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_against_running_server(capsys):
    port = _free_port()
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="error"))
    t = threading.Thread(target=server.run, daemon=True)
    t.start()
    try:
        for _ in range(100):
            if server.started:
                break
            time.sleep(0.05)
        url = f"http://127.0.0.1:{port}"
        assert run(["--url", url, "validate", d("fibonacci")]) == 0
        assert "euclidean" in capsys.readouterr().out
        assert run(["--url", url, "density", d("accidental_extinction"), "--n", "13"]) == 1
    finally:
        server.should_exit = True
        t.join(timeout=5)


def test_unreachable_server():
    assert run(["--url", f"http://127.0.0.1:{_free_port()}", "validate", d("fibonacci")]) == 1
