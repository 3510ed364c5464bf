import json
import subprocess
import sys

from cantorstab import DepthSchedule, build_conjugator, parse_point, verify_certificate
from cantorstab import serialize


def run_cli(*args, env=None):
    return subprocess.run(
        [sys.executable, "-m", "cantorstab.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


# -- classify -----------------------------------------------------------------


def test_classify_singular():
    proc = run_cli("classify", "--family", "grigorchuk", "--point", "(1)")
    assert proc.returncode == 0 and "SINGULAR" in proc.stdout


def test_classify_regular():
    proc = run_cli("classify", "--family", "grigorchuk", "--point", "(0)")
    assert proc.returncode == 0 and "REGULAR" in proc.stdout


def test_classify_odometer():
    proc = run_cli("classify", "--family", "odometer-full", "--point", "01(10)")
    assert proc.returncode == 0 and "REGULAR" in proc.stdout


def test_classify_no_rule():
    proc = run_cli("classify", "--family", "prefix-v", "--point", "(0)")
    assert proc.returncode == 0 and "NO_RULE" in proc.stdout


def test_classify_parse_error_exit_2():
    proc = run_cli("classify", "--family", "grigorchuk", "--point", "zzz")
    assert proc.returncode == 2


def test_classify_with_germ_evidence():
    proc = run_cli(
        "classify", "--family", "grigorchuk", "--point", "(1)",
        "--germs", "--maxlen", "3", "--format", "json",
    )
    assert proc.returncode == 0
    body = json.loads(proc.stdout)["canonical"]
    assert body["class"] == "singular"
    assert body["germs"]["lower_bound"] >= 4


# -- conjugate / verify round trip ----------------------------------------------


def test_conjugate_verify_round_trip(tmp_path):
    cert_path = tmp_path / "cert.json"
    proc = run_cli(
        "conjugate", "--family", "grigorchuk",
        "--x", "(0)", "--y", "(01)", "--depth", "8", "--out", str(cert_path),
    )
    assert proc.returncode == 0, proc.stderr
    proc = run_cli(
        "verify", "--family", "grigorchuk", "--cert", str(cert_path), "--samples", "5",
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr


def test_conjugate_odometer_full(tmp_path):
    cert_path = tmp_path / "odo.json"
    proc = run_cli(
        "conjugate", "--family", "odometer-full",
        "--x", "(0)", "--y", "(1)", "--depth", "6", "--out", str(cert_path),
    )
    assert proc.returncode == 0
    proc = run_cli("verify", "--family", "odometer-full", "--cert", str(cert_path))
    assert proc.returncode == 0


def test_conjugate_identity_points(tmp_path):
    cert_path = tmp_path / "id.json"
    proc = run_cli(
        "conjugate", "--family", "odometer-full",
        "--x", "(0)", "--y", "(0)", "--depth", "3", "--out", str(cert_path),
    )
    assert proc.returncode == 0
    envelope = json.loads(cert_path.read_text())
    assert envelope["schema"] == serialize.SCHEMA_CERTIFICATE


def test_verify_corrupted_certificate_exit_1(tmp_path):
    cert_path = tmp_path / "cert.json"
    run_cli(
        "conjugate", "--family", "grigorchuk",
        "--x", "(0)", "--y", "(01)", "--depth", "5", "--out", str(cert_path),
    )
    envelope = json.loads(cert_path.read_text())
    envelope["canonical"]["stages"][3]["g"]["word"] += "*a"
    cert_path.write_text(json.dumps(envelope))
    proc = run_cli("verify", "--family", "grigorchuk", "--cert", str(cert_path))
    assert proc.returncode == 1
    assert "FAIL" in proc.stdout


def test_verify_schema_error_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "nope", "canonical": {}}')
    proc = run_cli("verify", "--family", "grigorchuk", "--cert", str(bad))
    assert proc.returncode == 2


def test_conjugate_search_failure_exit_3(tmp_path):
    # the bare single-generator family has empty proper rigid stabilisers
    family_path = tmp_path / "bare.json"
    family_path.write_text(json.dumps({
        "type": "table", "name": "bare", "alphabet": 2,
        "generators": {"t": [["", 1]]},
    }))
    proc = run_cli(
        "conjugate", "--family", str(family_path),
        "--x", "(0)", "--y", "(1)", "--depth", "3",
    )
    assert proc.returncode == 3, proc.stderr


# -- orbit / rist / germs ---------------------------------------------------------


def test_orbit_reaches_32():
    proc = run_cli("orbit", "--family", "grigorchuk", "--seed", "00000", "--depth", "5")
    assert proc.returncode == 0 and "32 cylinders" in proc.stdout


def test_rist_nonempty():
    proc = run_cli("rist", "--family", "grigorchuk", "--cylinder", "1", "--maxlen", "6")
    assert proc.returncode == 0
    assert "0 elements" not in proc.stdout


def test_germs_at_least_four_classes():
    proc = run_cli(
        "germs", "--family", "grigorchuk", "--point", "(1)", "--maxlen", "4",
        "--format", "json",
    )
    assert proc.returncode == 0
    body = json.loads(proc.stdout)["canonical"]
    assert body["lower_bound"] >= 4


# -- determinism -------------------------------------------------------------------


def test_byte_identical_output(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        proc = run_cli(
            "conjugate", "--family", "grigorchuk",
            "--x", "(0)", "--y", "(01)", "--depth", "6", "--out", str(path),
        )
        assert proc.returncode == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_budget_scale_env(tmp_path):
    import os

    env = dict(os.environ, CANTORSTAB_BUDGET_SCALE="2.0")
    proc = run_cli("classify", "--family", "grigorchuk", "--point", "(0)", env=env)
    assert proc.returncode == 0


# -- serialization round trip -------------------------------------------------------


def test_certificate_json_round_trip(grig):
    cert = build_conjugator(
        grig, parse_point("(0)"), parse_point("(01)"), DepthSchedule.unit_steps(6)
    )
    obj = serialize.certificate_to_obj(cert)
    text = serialize.canonical_dumps(obj)
    restored = serialize.certificate_from_obj(json.loads(text), grig)
    assert restored.x == cert.x and restored.y == cert.y
    assert len(restored.stages) == len(cert.stages)
    for a, b in zip(cert.stages, restored.stages):
        assert a.u == b.u and a.v == b.v
        assert a.g.act_word(a.u.prefix) == b.g.act_word(b.u.prefix)
    assert verify_certificate(restored).ok


def test_custom_wreath_family_file(tmp_path):
    family_path = tmp_path / "odo.json"
    family_path.write_text(json.dumps({
        "type": "wreath", "name": "odo-wreath", "alphabet": 2,
        "generators": {"t": {"perm": [1, 0], "sections": [None, "t"]}},
        "public": ["t"],
    }))
    proc = run_cli("orbit", "--family", str(family_path), "--seed", "00", "--depth", "2")
    assert proc.returncode == 0 and "4 cylinders" in proc.stdout


def test_orbit_strict_budget_exit_4():
    proc = run_cli(
        "orbit", "--family", "grigorchuk", "--seed", "00000", "--depth", "5",
        "--maxlen", "2", "--strict",
    )
    assert proc.returncode == 4


def test_rist_oracle_flag():
    proc = run_cli(
        "rist", "--family", "grigorchuk", "--cylinder", "01", "--oracle",
        "--format", "json",
    )
    assert proc.returncode == 0
    body = json.loads(proc.stdout)["canonical"]
    assert body["count"] == 3


def test_conjugate_beyond_capacity_exit_3_with_partial(tmp_path):
    cert_path = tmp_path / "deep.json"
    proc = run_cli(
        "conjugate", "--family", "odometer-full",
        "--x", "(0)", "--y", "(1)", "--depth", "7", "--out", str(cert_path),
    )
    assert proc.returncode == 3
    assert "capacity" in proc.stderr
    envelope = json.loads(cert_path.read_text())
    assert len(envelope["canonical"]["stages"]) == 7
