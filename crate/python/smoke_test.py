"""Smoke test for the pysymcube extension.

Build and install first:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pysymcube-*.whl
"""

import itertools
import json
import math
import tempfile
from pathlib import Path

import pysymcube as sc


def iso_classes(n):
    """Number of graphs on n vertices up to isomorphism, by brute force."""
    pairs = list(itertools.combinations(range(n), 2))
    perms = list(itertools.permutations(range(n)))
    seen = set()
    for bits in range(1 << len(pairs)):
        edges = [p for i, p in enumerate(pairs) if bits >> i & 1]
        seen.add(min(tuple(sorted(tuple(sorted((q[u], q[v]))) for u, v in edges)) for q in perms))
    return len(seen)


def main():
    for n in range(1, 6):
        got = sc.run_pipeline("all-graphs", n, cutoff=8, workers=2).model_count
        assert got == iso_classes(n), (n, got)

    c5 = sc.run_pipeline("triangle-free", 5, k=3, cuber="march", cutoff=10)
    assert c5.model_count == 1 and c5.complete

    enc = sc.encode("diameter2", 5, m=6)
    ef = enc.prerun(conflicts=5)
    assert sc.EnrichedFormula.parse(ef.dimacs()).num_blocked == ef.num_blocked
    cubes = ef.cube(enc, cuber="cdcl", cutoff=3)
    assert sc.CubeList.parse_icnf(cubes.icnf()).cubes() == cubes.cubes()
    report = ef.conquer(enc, cubes, workers=2)
    assert report.graph6() == enc.solve_all()
    assert len(report.graph6()) == 1 and sc.is_canonical(report.graph6()[0])

    csv = report.histogram_csv([1.0, 2.0]).splitlines()
    assert csv[0] == "bucket_lo_min,bucket_hi_min,total_time_s,cube_count"
    assert sum(int(r.split(",")[3]) for r in csv[1:]) == len(report.conflicts())
    assert json.loads(report.to_json())["model_count"] == 1

    assert math.isclose(sc.score("march", 2, 3), 11.0)
    assert sc.score("default", 3, 5) == 3 + 1e-9 * 8
    assert sorted(map(tuple, sc.enumerate_dimacs("p cnf 2 1\n1 2 0\n"))) == [(-1, 2), (1, -2), (1, 2)]

    with tempfile.TemporaryDirectory() as d:
        sc.run_pipeline_toml(f'problem = "triangle-free"\nn = 6\nk = 3\ncuber = "la-all"\ncutoff = 30\noutput_dir = "{d}"\n')
        assert (Path(d) / "triangle-free-n6-k3.models").read_text()

    try:
        sc.run_pipeline("diameter2", 4)
    except ValueError as e:
        assert "needs m" in str(e)
    else:
        raise AssertionError("missing m accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
