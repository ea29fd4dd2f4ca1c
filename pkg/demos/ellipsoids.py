"""Outer approximation of projected ellipsoid intersections.

Solves the lifted problem for the two fixtures, translates the solution
back, verifies both sides on 2000 directions and writes the polytope of
y-images as JSON and (in 2-D and 3-D) OFF into ``demos/out``.
Run with ``python3 demos/ellipsoids.py``.
"""
import os
import time

from convproj import fixtures, solve_mocp, verify_cp_solution, verify_mocp_solution
from convproj.geometry import Polyhedron, export_json, export_off
from convproj.reductions import translate_mocp_to_cp_solution

OUT = os.path.join(os.path.dirname(__file__), "out")


def run(name, spec, eps, p=2.0):
    t0 = time.perf_counter()
    res = solve_mocp(spec, eps, p)
    mo = verify_mocp_solution(spec, res.solution, n_directions=2000)
    cp_sol = translate_mocp_to_cp_solution(res.solution)
    cp = verify_cp_solution(spec, cp_sol, n_directions=2000)
    poly = Polyhedron.from_vrep(cp_sol.images)
    stem = os.path.join(OUT, f"{name}_{eps:g}")
    export_json(poly, stem + ".json")
    if spec.m in (2, 3):
        export_off(poly.vertices, stem + ".off")
    print(f"{name} eps={eps:g}: {len(cp_sol)} points, {len(poly.vertices)} vertices, "
          f"iterations {res.iterations}, mocp {'pass' if mo.passed else 'FAIL'}, "
          f"cp eps {cp_sol.epsilon:.4f} {'pass' if cp.passed else 'FAIL'}, "
          f"{time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    for eps in (0.1, 0.05, 0.01):
        run("ellipse3d", fixtures.ellipse3d(), eps)
    run("ellipse4d", fixtures.ellipse4d(), 0.01)
