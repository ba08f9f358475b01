import json
import math

import _orbitspec as m


def test_cli_roundtrip():
    code, out, err = m.run(["value-set", "--poly", "n^2", "--prime", "7"])
    assert code == 0
    assert err == ""
    report = json.loads(out)
    assert report["command"] == "value-set"
    assert report["results"]["residues"] == [0, 1, 2, 4]
    assert all(c["status"] == "pass" for c in report["checks"])


def test_cli_usage_error():
    code, out, err = m.run(["value-set", "--poly", "n^2"])
    assert code == 1
    assert "usage error" in err


def test_value_set():
    assert m.value_set("n^2", 7) == [0, 1, 2, 4]
    assert len(m.value_set("n^2", 35)) == 12


def test_psi_gauss():
    assert abs(m.psi("n^2", 3) - 3 ** -0.5) < 1e-9
    assert m.psi("n", 5) < 1e-12


def test_hua_threshold():
    assert m.hua_threshold("n^2", 0.5, 50) == 8


def test_invariant_factors():
    assert m.invariant_factors([[2, 4], [6, 8]]) == [2, 4]


def test_complexity_bound():
    assert m.complexity_bound("n; 2*n^2") == 2


def test_spectral_atoms():
    atoms = m.spectral_atoms([4], [0])
    assert len(atoms) == 4
    assert abs(sum(mass for _, mass in atoms) - 0.25) < 1e-12
    assert math.isclose(dict((pt[0], mass) for pt, mass in atoms)["0/1"], 1 / 16)


def test_errors_translate():
    try:
        m.value_set("2n^2", 7)
    except ValueError:
        pass
    else:
        raise AssertionError("malformed polynomial must raise ValueError")
