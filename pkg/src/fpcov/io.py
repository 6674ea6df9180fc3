"""Trajectory CSV files: header ``t,y,p,u,fz_accum,J_accum``, 17 significant digits."""

import csv

import numpy as np

from .model import Trajectory

COLUMNS = ("t", "y", "p", "u", "fz_accum", "J_accum")


def _fmt(x):
    return f"{x:.17g}"


def write_trajectory_csv(traj, path):
    cols = (traj.times, traj.y, traj.p, traj.u, traj.fz_accum, traj.objective_accum)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in zip(*cols):
            w.writerow([_fmt(float(v)) for v in row])


def read_trajectory_csv(path, z_used=None):
    """Read a file written by :func:`write_trajectory_csv`.

    The file does not carry ``z_used``; it defaults to the last ``y`` entry.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise ValueError(f"unexpected CSV header {header}; expected {list(COLUMNS)}")
        rows = np.array([[float(v) for v in r] for r in reader if r])
    if rows.size == 0:
        raise ValueError("trajectory CSV has no rows")
    t, y, p, u, fz, J = rows.T
    return Trajectory(t, y, p, u, fz, J, float(y[-1]) if z_used is None else z_used)
