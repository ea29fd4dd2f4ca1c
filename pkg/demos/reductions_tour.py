"""Round trip through the reductions on the worked instances.

Prints the multiplier table, lifts the quarter disc, translates a CP
solution forward and back, classifies boundedness of a set with a
recession direction and turns a vector problem into a projection.
Run with ``python3 demos/reductions_tour.py``.
"""
import math

from convproj import classify_boundedness, cp_to_mocp, cvop_to_cp, fixtures
from convproj.cli import multiplier_table
from convproj.core import cp_solution
from convproj.reductions import translate_cp_to_mocp_solution, translate_mocp_to_cp_solution

if __name__ == "__main__":
    print(multiplier_table(range(1, 5), [1.0, 2.0, math.inf]))

    spec = fixtures.quarter_ball(2)
    _, lift = cp_to_mocp(spec)
    print("objective matrix of the lift:\n", lift.P)

    sol = cp_solution(spec, fixtures.quarter_ball_solution_points(2), 0.3, 2.0)
    up = translate_cp_to_mocp_solution(sol)
    down = translate_mocp_to_cp_solution(up)
    print(f"cp eps {sol.epsilon} -> mocp eps {up.epsilon:.6f} -> cp eps {down.epsilon:.6f}")

    print("disc plus ray:", classify_boundedness(fixtures.disc_plus_ray()))

    cvop = fixtures.disc_identity_cvop()
    cp = cvop_to_cp(cvop)
    print(f"vector problem on the disc becomes a projection with n={cp.n}, m={cp.m}")
