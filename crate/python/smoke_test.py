"""Smoke test for the `biharm` extension module.

Build first:
    cargo build --release -p biharm-py --features extension-module
then run:
    python3 python/smoke_test.py [path/to/libbiharm.so]
"""

import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def locate_library():
    if len(sys.argv) > 1:
        return sys.argv[1]
    for profile in ("release", "debug"):
        for name in ("libbiharm.so", "libbiharm.dylib", "biharm.dll"):
            path = os.path.join(ROOT, "target", profile, name)
            if os.path.exists(path):
                return path
    sys.exit("extension not built; run: cargo build --release -p biharm-py --features extension-module")


def load():
    lib = locate_library()
    tmp = tempfile.mkdtemp()
    suffix = ".pyd" if lib.endswith(".dll") else ".so"
    shutil.copy(lib, os.path.join(tmp, "biharm" + suffix))
    sys.path.insert(0, tmp)
    import biharm

    return biharm


def main():
    biharm = load()

    w = biharm.lambert_w(-1 / (2 * math.sqrt(math.e)), "minus-one")
    assert abs(w - (-1.7564312086261695)) < 1e-12, w
    assert abs(biharm.lambert_w(1.0) - 0.5671432904097838) < 1e-14

    level = biharm.nonuniqueness_level()
    assert abs(level.r_star - 0.533543) < 1e-6
    assert abs(level.iota - 0.112814) < 1e-6
    assert abs(biharm.annulus_energy(level.iota, level.r_star) - math.pi) < 1e-8

    m = biharm.minimize_energy(0.1)
    assert m.branch == "two-phase"
    assert abs(m.nodal_radius - 0.582373) < 1e-5 and abs(m.energy - 2.93062) < 1e-4
    assert biharm.minimize_energy(0.3).nodal_radius is None

    sol = biharm.RadialSolution.minimizer(0.1)
    assert abs(sol.value(1.0) - 0.1) < 1e-12
    assert abs(sol.value(sol.nodal_radius)) < 1e-12
    assert sol.laplacian(0.5) > 0
    try:
        sol.value(1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("radius outside [0, 1] accepted")

    for u0, r, e, r_pub, e_pub in biharm.reproduce_table():
        assert abs(r - r_pub) <= 1e-5 and abs(e - e_pub) <= 1e-4, (u0, r, e)

    grid = biharm.solve_radial(0.05, 1001)
    assert grid.converged and len(grid.nodal_radii) == 1
    assert abs(grid.nodal_radii[0] - biharm.minimize_energy(0.05).nodal_radius) < 1e-3
    assert len(grid.r) == len(grid.u) == 1001

    ok, report = biharm.run_suite("structural")
    assert ok and '"checks"' in report

    print("biharm smoke test passed: R* = %.6f, iota = %.6f" % (level.r_star, level.iota))


if __name__ == "__main__":
    main()
