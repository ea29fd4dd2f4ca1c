"""Tightness of the tolerance multipliers on two small sets.

The quarter disc attains kappa when a CP solution is lifted to the
multi-objective problem; the segment attains kappa_bar in the other
direction.  Run with ``python3 demos/tightness.py``.
"""
import math

import numpy as np

from convproj import fixtures, kappa_over, kappa_under
from convproj.core import MOCP, SolutionSet, cp_solution
from convproj.reductions import translate_cp_to_mocp_solution, translate_mocp_to_cp_solution
from convproj.verify import minimal_cp_tolerance, minimal_mocp_tolerance


def quarter_disc(p):
    spec = fixtures.quarter_ball(2)
    pts = fixtures.quarter_ball_solution_points(2)
    cp = cp_solution(spec, pts, 1.0, p)
    e_cp = minimal_cp_tolerance(spec, cp, n_directions=500)
    e_mo = minimal_mocp_tolerance(spec, translate_cp_to_mocp_solution(cp), n_directions=500)
    print(f"quarter disc p={p}: cp eps {e_cp:.6f}, mocp eps {e_mo:.6f}, "
          f"ratio {e_mo / e_cp:.6f}, kappa {kappa_under(2, p):.6f}")


def segment(m, p):
    spec = fixtures.segment(m)
    z = np.r_[0.0, np.zeros(m)][None, :]
    mo = SolutionSet(z, z[:, 1:], 1.0, p, kind=MOCP)
    e_mo = minimal_mocp_tolerance(spec, mo, n_directions=500)
    cp = translate_mocp_to_cp_solution(mo)
    e_cp = minimal_cp_tolerance(spec, cp, n_directions=500)
    print(f"segment m={m} p={p}: mocp eps {e_mo:.6f}, cp eps {e_cp:.6f}, "
          f"ratio {e_cp / e_mo:.6f}, kappa_bar {kappa_over(m, p):.6f}")


if __name__ == "__main__":
    for p in (2.0, math.inf):
        quarter_disc(p)
    for m in (2, 3):
        segment(m, 2.0)
