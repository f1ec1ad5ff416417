"""CSV snapshots, JSON reports and gnuplot scripts."""

import json
from pathlib import Path

import numpy as np

from .mesh import project_exact
from .sediment_laws import signed_bedload_rate

CSV_COLUMNS = ("x", "h", "u", "z_b", "eta", "q_b")


def _fmt(v):
    return format(float(v), ".17g")


def snapshot_rows(snap, law):
    u = snap.u
    q_b = np.where(snap.h > 0, signed_bedload_rate(law, u), 0.0)
    return np.column_stack((snap.mesh.centers, snap.h, u, snap.z_b, snap.eta, q_b))


def write_csv(path, snap, law):
    """Write one row per cell: ``x,h,u,z_b,eta,q_b`` with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(CSV_COLUMNS)]
    lines += [",".join(_fmt(v) for v in row) for row in snapshot_rows(snap, law)]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(CSV_COLUMNS)}


def exact_csv_name(t):
    return f"exact_t{_fmt(t)}.csv"


def dump_exact(cfg, times, out_dir):
    """Write the exact solution on the config mesh at each time in ``times``.

    Returns the written paths, in ``times`` order.
    """
    cfg.validate()
    sol = cfg.build_solution()
    mesh = cfg.build_mesh()
    out_dir = Path(out_dir)
    paths = []
    for t in times:
        snap = project_exact(mesh, sol, float(t))
        paths.append(write_csv(out_dir / exact_csv_name(t), snap, sol.law))
    return paths


def write_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


GNUPLOT_TEMPLATE = """\
# columns: 1=x 2=h 3=u 4=z_b 5=eta 6=q_b
set datafile separator ','
set key autotitle columnhead
set terminal pngcairo size 1200,480
set output '{png}'
set multiplot layout 1,2
set xlabel 'x [m]'
set title 'water height and topography at t = {t}'
plot '{exact}' using 1:5 with lines lw 2 title 'h+z_b exact', \\
     '{exact}' using 1:4 with lines lw 2 title 'z_b exact', \\
     '{num}' using 1:5 every {every} with points pt 6 title 'h+z_b {scheme}', \\
     '{num}' using 1:4 every {every} with points pt 4 title 'z_b {scheme}'
set title 'velocity at t = {t}'
plot '{exact}' using 1:3 with lines lw 2 title 'u exact', \\
     '{num}' using 1:3 every {every} with points pt 6 title 'u {scheme}'
unset multiplot
"""


def write_gnuplot(path, numerical_csv, exact_csv, t, scheme, J):
    path = Path(path)
    text = GNUPLOT_TEMPLATE.format(
        png=path.with_suffix(".png").name,
        exact=Path(exact_csv).name,
        num=Path(numerical_csv).name,
        t=_fmt(t),
        scheme=scheme,
        every=max(1, J // 50),
    )
    path.write_text(text)
    return path
