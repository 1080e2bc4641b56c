import json
import os
import subprocess

import pytest

import firlock


def test_wire_through_filter():
    nl = firlock.gen_filter([1], form="direct", ibw=8)
    for x in (0, 1, -1, 127, -128):
        assert nl.evaluate([x]) == [x]


def test_golden_convolution():
    assert firlock.golden_convolution([1, 2, 3], [1, 0, 0, 4]) == [1, 2, 3, 4]


def test_obfuscated_cavm_matches_plain_block_under_secret():
    d = firlock.obfuscate([57, 81], v=3, arch="sa", ibw=4)
    ref = firlock.plain_block([57, 81], ibw=4)
    assert d.netlist.key_count == 3
    for x1 in range(-8, 8):
        for x2 in range(-8, 8):
            assert d.netlist.evaluate([x1, x2], d.secret_key) == [57 * x1 + 81 * x2]
    assert firlock.verify_key(d.netlist, d.secret_key, ref)


def test_bench_round_trip():
    d = firlock.obfuscate([23, -41, 77, 6], v=8, form="folded", ibw=6, seed=3)
    nl = firlock.parse_bench(d.netlist.to_bench())
    assert nl.name == d.netlist.name
    assert nl.evaluate([-5, 2], d.secret_key) == d.netlist.evaluate([-5, 2], d.secret_key)
    assert "module" in nl.to_verilog()


def test_query_attack_proves_obfuscated_tmcm():
    d = firlock.obfuscate([23, -41, 77, 6], v=8, form="folded", ibw=6, seed=3)
    rep = firlock.query_attack(d.netlist, d.secret_key, timeout_ms=60000)
    assert rep.proven_count == 8
    assert rep.key == d.secret_key
    assert rep.outcome == "key-found"
    assert json.loads(rep.to_json())["proven"] == 8


def test_sat_attack_iteration_law():
    plain = firlock.parse_bench(firlock.cli(["export", "--design", _adder_bench()])[1])
    locked = firlock.lock_point(plain, w=4, cv=0, seed=2)
    rep = firlock.sat_attack(locked.netlist, locked.secret_key)
    assert rep.iterations == 15
    assert rep.outcome == "key-found"


def test_hybrid_resists_query_attack():
    d = firlock.hybridize(firlock.obfuscate([57, 81], v=3, ibw=4), w=4)
    assert d.netlist.key_count == 7
    rep = firlock.query_attack(d.netlist, d.secret_key, timeout_ms=60000)
    assert rep.proven_count == 0


def test_zpfr_endpoints():
    omega, amp = firlock.zpfr([1, 2, 1], grid=2)
    assert omega == pytest.approx([0.0, 3.141592653589793])
    assert amp == pytest.approx([4.0, 0.0])


def test_errors_raise():
    with pytest.raises(firlock.FirlockError):
        firlock.obfuscate([57, 81], v=3, arch="bogus")
    with pytest.raises(firlock.FirlockError):
        firlock.lock_point(firlock.gen_filter([3]), w=0)


def test_cli_in_process_and_binary(tmp_path):
    code, out, err = firlock.cli(["obfuscate", "--coeffs", "[57,81]", "--v", "3", "--out", str(tmp_path / "o")])
    assert code == 0 and err == ""
    manifest = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert manifest["command"] == "obfuscate"
    code, _, err = firlock.cli(["obfuscate", "--coeffs", "[57,81]", "--arch", "bogus", "--out", str(tmp_path / "x")])
    assert code == 2 and err.count("\n") == 1

    binary = os.environ.get("FIRLOCK_CLI")
    if not binary:
        pytest.skip("FIRLOCK_CLI not set")
    r = subprocess.run([binary, "verify", "--design", str(tmp_path / "o" / "design.bench"),
                        "--keymap", str(tmp_path / "o" / "keymap.json"), "--coeffs", "[57,81]", "--block", "cavm"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["equivalent"] is True


_ADDER = None


def _adder_bench():
    global _ADDER
    if _ADDER is None:
        import tempfile
        path = os.path.join(tempfile.mkdtemp(), "adder.bench")
        lines = ["# adder4"]
        lines += [f"INPUT(A[{i}])" for i in range(4)] + [f"INPUT(B[{i}])" for i in range(4)]
        lines += [f"OUTPUT(S[{i}])" for i in range(5)]
        lines.append("c0 = CONST0()")
        carry = "c0"
        for i in range(4):
            lines.append(f"p{i} = XOR(A[{i}], B[{i}])")
            lines.append(f"S[{i}] = XOR(p{i}, {carry})")
            lines.append(f"g{i} = AND(A[{i}], B[{i}])")
            lines.append(f"t{i} = AND(p{i}, {carry})")
            lines.append(f"c{i + 1} = OR(g{i}, t{i})")
            carry = f"c{i + 1}"
        lines.append(f"S[4] = BUFF({carry})")
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")
        _ADDER = path
    return _ADDER
