"""Regenerate the problem files and sample solutions shipped in convproj/data."""
import math
import os

import numpy as np

from convproj import fixtures
from convproj.core import MOCP, SolutionSet, cp_solution
from convproj.problemfile import cp_to_dict, dump

DATA = os.path.join(os.path.dirname(fixtures.__file__), "data")

PROBLEMS = {
    "ex52": (fixtures.quarter_ball(2), {"p": 2, "epsilon": 0.3}),
    "ex53": (fixtures.segment(2), {"p": 2, "epsilon": 2.0}),
    "ellipse3d": (fixtures.ellipse3d(), {"p": 2, "epsilon": 0.01}),
    "ellipse4d": (fixtures.ellipse4d(), {"p": 2, "epsilon": 0.01}),
    "ex35": (fixtures.disc_plus_ray(), {"p": 2, "epsilon": 0.05}),
    "disjoint": (fixtures.disjoint_balls(), {"p": 2, "epsilon": 0.1}),
}


def main():
    for name, (spec, opts) in PROBLEMS.items():
        dump(cp_to_dict(spec, opts), os.path.join(DATA, f"{name}.json"))
    # triangle conv{0, e1, e2} for the quarter disc at its minimal CP tolerance
    q = fixtures.quarter_ball(2)
    tri = cp_solution(q, fixtures.quarter_ball_solution_points(2),
                      fixtures.quarter_ball_cp_tolerance(2, 2.0), 2.0)
    dump(tri.to_dict(), os.path.join(DATA, "ex52.sol"))
    # the origin alone solves the lifted segment problem at tolerance sqrt(3)
    z = np.zeros((1, 3))
    mo = SolutionSet(z, z[:, 1:], math.sqrt(3.0), 2.0, kind=MOCP, minimizers_guaranteed=True)
    dump(mo.to_dict(), os.path.join(DATA, "ex53.sol"))
    print("wrote", sorted(os.listdir(DATA)))


if __name__ == "__main__":
    main()
