"""Smoke test for the chabauty_lab extension module.

    pip install --no-build-isolation -e crates/py
    python3 python/smoke_test.py
"""

import json
from fractions import Fraction
from pathlib import Path

import chabauty_lab as cl

DEMOS = Path(__file__).resolve().parent.parent / "demos"


def main():
    assert cl.reduce_word("abBA") == ""
    assert cl.multiply("ab", "Ba") == "aa"
    assert cl.inverse("ab") == "BA"

    h = cl.FreeSubgroup(2, ["a", "bab"])
    assert h.contains("bab") and "a" in h and "b" not in h
    assert h.index() is None and h.rank == 2

    e = cl.FreeSubgroup(2, ["a", "bb", "bab"])
    assert e.index() == 2 and e.rank == 3
    assert h.join(e) == e
    assert e.intersect(h) == h
    assert e.conjugate("b") == e
    assert e.normal_core() == e
    assert "digraph" in e.to_dot()

    c = h.hall_completion(3)
    assert c.index() is not None and all(c.contains(g) for g in h.generators())
    assert cl.FreeSubgroup.from_json(h.to_json()) == h

    a = cl.FreeSubgroup(2, ["a"])
    assert a.first_difference(h) == "bab"
    assert cl.distance(a, h, 8) == ("exact", 3)

    steps = cl.nonisolation_witness(a, 5)
    assert len(steps) == 5
    for n, s in enumerate(steps, 1):
        kind, exponent = cl.distance(s, a, n + 2)
        assert s != a and exponent > n

    lat = cl.Lattice(2, [[2, 0], [0, 3]])
    assert lat.index() == 6 and lat.basis() == [[2, 0], [0, 3]]
    assert lat.contains([4, -3]) and not lat.contains([1, 0])
    line = cl.Lattice(3, [[1, 1, 0]])
    assert line.cb_erasing_rank() == 3 and line.witness_chain_depth(2, 8) == 2
    counts = {}
    for sub in cl.enumerate_by_index(2, 6):
        counts[sub.index()] = counts.get(sub.index(), 0) + 1
    assert counts == {n: sum(d for d in range(1, n + 1) if n % d == 0) for n in range(1, 7)}

    code, outcome = cl.transitivity_move((DEMOS / "paired_clopen.json").read_text())
    assert code == 0 and "certificate" in json.loads(outcome)
    code, outcome = cl.transitivity_move((DEMOS / "negative_control.json").read_text())
    assert code == 4 and json.loads(outcome)["obstruction"]["forced"] == "b"

    assert json.loads(cl.folner_demo(3))["all_within"]
    assert cl.schreier_ends((DEMOS / "kernel_to_z.json").read_text(), 12, 2) == 2
    assert cl.intermediate_bound(2, 1) == 2 ** 5
    assert cl.qi_constants(1, 1) == (Fraction(7), Fraction(14))
    assert cl.qi_constants(2, 1) == (Fraction(34), Fraction(68))

    try:
        cl.FreeSubgroup(2, ["c"])
    except ValueError:
        pass
    else:
        raise AssertionError("letter outside the rank was accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
