"""Smoke test for the abfold_py extension module."""

import json
import math

import abfold_py as ab


def main():
    labels = ab.builtin_labels()
    assert len(labels) == 23 and labels[0] == "1BXP"

    aaa = ab.Sequence("AAA")
    assert len(aaa) == 3 and aaa.dimension == 1
    assert abs(aaa.energy([0.0]) - (-0.4375)) < 1e-12

    seq = ab.Sequence.builtin("1BXP")
    label, angles, energy = next(s for s in ab.published_solutions() if s[0] == "1BXP")
    got = -seq.energy(angles)
    assert abs(got - energy) < 1e-2, got
    assert abs(-seq.energy(ab.mirror(angles)) - got) < 1e-9

    pos = seq.positions(angles)
    mirrored = seq.positions(ab.mirror(angles))
    assert ab.superposed_rmsd(pos, pos) < 1e-12
    assert ab.superposed_rmsd(pos, mirrored) > 0.1

    run = ab.optimize(ab.Sequence.builtin("F13"), nse=20000, seed=1)
    assert run.nse == 20000 and run.energy > 0
    assert abs(-ab.Sequence.builtin("F13").energy(run.angles) - run.energy) < 1e-9

    records, summary = ab.experiment(seq, 3, nse=5000, seed=2)
    records, summary = json.loads(records), json.loads(summary)
    assert len(records) == 3 and summary["runs"] == 3

    a, b = ab.fit_exponential([(l, 2 * 3.0**l) for l in range(7, 10)])
    assert math.isclose(a, 2) and math.isclose(b, 3)

    subs = [str(s) for s in ab.Sequence.builtin("1CB3").subsequences(2)]
    assert subs == ["BABBBAABBAAA", "BABBBAABBAA"]

    try:
        ab.Sequence.builtin("nope")
    except KeyError:
        pass
    else:
        raise AssertionError("unknown label accepted")

    print("abfold_py smoke test passed")


if __name__ == "__main__":
    main()
