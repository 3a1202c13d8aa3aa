import json

import pytest

from rbo import wire
from rbo.cli import CSV_COLUMNS, main


@pytest.fixture
def cycle_file(tmp_path):
    keys = tmp_path / "keys.txt"
    keys.write_text("\n".join(str(10 * (i + 1)) for i in range(8)) + "\n")
    out = tmp_path / "c.rboc"
    assert main(["build", str(keys), str(out)]) == 0
    return out


def _split(stdout):
    lines = stdout.splitlines()
    assert lines[0].startswith("# ")
    return lines[1:-1], json.loads(lines[-1])


def test_build_pads_three_keys(tmp_path, capsys):
    keys = tmp_path / "k.txt"
    keys.write_text("30\n10\n\n20\n")
    out = tmp_path / "c.bin"
    assert main(["build", str(keys), str(out)]) == 0
    c = wire.decode_cycle(out.read_bytes())
    assert c.k == 2 and c.sorted_keys == (10, 20, 30, 30)


def test_build_single_key(tmp_path):
    keys = tmp_path / "k.txt"
    keys.write_text("7\n")
    out = tmp_path / "c.bin"
    assert main(["build", str(keys), str(out)]) == 0
    assert wire.decode_cycle(out.read_bytes()).k == 0


@pytest.mark.parametrize("content", ["", "\n\n", "12\nabc\n", "-4\n"])
def test_build_rejects_bad_key_files(tmp_path, capsys, content):
    keys = tmp_path / "k.txt"
    keys.write_text(content)
    assert main(["build", str(keys), str(tmp_path / "o")]) == 2
    if not content.strip():
        assert "no keys" in capsys.readouterr().err


def test_build_missing_file(tmp_path):
    assert main(["build", str(tmp_path / "missing"), str(tmp_path / "o")]) == 2


def test_simulate_worked_example(cycle_file, capsys):
    rc = main(["simulate", str(cycle_file), "--lo", "35", "--hi", "45", "--start", "0",
               "--p", "1.0", "--trials", "1"])
    assert rc == 0
    rows, agg = _split(capsys.readouterr().out)
    assert rows[0] == ",".join(CSV_COLUMNS)
    row = dict(zip(CSV_COLUMNS, rows[1].split(",")))
    assert (row["tau"], row["en_tau"], row["hits"]) == ("6", "4", "1")
    assert agg["verdicts"]["total"] == "PASS"
    assert agg["metadata"]["generator"] == "splitmix64-counter"


@pytest.mark.parametrize("flags", [["--p", "0"], ["--p", "1.5"], ["--trials", "0"], ["--start", "8"], ["--lo", "5", "--hi", "4"]])
def test_simulate_flag_validation(cycle_file, flags):
    base = {"--lo": "1", "--hi": "2"}
    for name, value in zip(flags[::2], flags[1::2]):
        base[name] = value
    argv = ["simulate", str(cycle_file)] + [x for kv in base.items() for x in kv]
    assert main(argv) == 2


def test_simulate_unknown_flag_is_usage_error(cycle_file):
    with pytest.raises(SystemExit) as e:
        main(["simulate", str(cycle_file), "--lo", "1", "--hi", "2", "--bogus"])
    assert e.value.code == 2


def test_simulate_json_format(cycle_file, capsys):
    assert main(["simulate", str(cycle_file), "--lo", "100", "--hi", "200", "--format", "json",
                 "--p", "0.5", "--seed", "3", "--trials", "5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["rows"]) == 5 and doc["metadata"]["seed"] == 3
    assert doc["aggregate"]["empty_query"] is True


def test_simulate_seed_from_environment(cycle_file, capsys, monkeypatch):
    monkeypatch.setenv("RBO_SEED", "41")
    main(["simulate", str(cycle_file), "--lo", "100", "--hi", "200", "--p", "0.5", "--trials", "2"])
    rows, agg = _split(capsys.readouterr().out)
    assert rows[1].split(",")[3] == "41" and agg["metadata"]["seed"] == 41
    monkeypatch.setenv("RBO_SEED", "x")
    assert main(["simulate", str(cycle_file), "--lo", "1", "--hi", "2"]) == 2


def test_simulate_threads_keep_row_order(cycle_file, capsys):
    argv = ["simulate", str(cycle_file), "--lo", "35", "--hi", "55", "--p", "0.6",
            "--seed", "8", "--trials", "30"]
    main(argv)
    one, _ = _split(capsys.readouterr().out)
    main(argv + ["--threads", "2"])
    two, _ = _split(capsys.readouterr().out)
    assert one == two


def test_simulate_rejects_corrupt_cycle_file(tmp_path):
    bad = tmp_path / "bad"
    bad.write_bytes(b"XXXX")
    assert main(["simulate", str(bad), "--lo", "1", "--hi", "2"]) == 2


@pytest.mark.parametrize("argv, want", [
    (["--k", "3", "--t", "5", "--r1", "0", "--r2", "7"], "6"),
    (["--k", "3", "--t", "0", "--r1", "1", "--r2", "1"], "4"),
    (["--k", "5", "--t", "12", "--r1", "20", "--r2", "21"], "21"),
    (["--k", "5", "--t", "12", "--r1", "6", "--r2", "6", "--oracle"], "12"),
])
def test_nsi_command(capsys, argv, want):
    assert main(["nsi"] + argv) == 0
    assert capsys.readouterr().out.strip() == want


def test_nsi_command_rejects_bad_range():
    assert main(["nsi", "--k", "3", "--t", "0", "--r1", "5", "--r2", "4"]) == 2


def test_verify_trivial(capsys):
    assert main(["verify", "--k-max", "0"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 5


def test_verify_up_to_k4(capsys):
    assert main(["verify", "--k-max", "4"]) == 0
    out = capsys.readouterr().out
    assert "max en(tau)=7 (bound 9)" in out


def test_verify_reports_injected_fault(capsys, monkeypatch):
    import rbo.sim

    # broadcasting in sorted order instead of bit-reversed order
    monkeypatch.setattr(rbo.sim, "reverse_bits", lambda x, k: x)
    assert main(["verify", "--k-max", "3"]) == 1
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("FAIL energy-bounds"))
    assert "witness=(" in line


def test_verify_rejects_large_k():
    assert main(["verify", "--k-max", "9"]) == 2
