"""Reading and writing run artifacts (CSV series, manifest, summary)."""

import csv
import json
from pathlib import Path

import numpy as np

from .dynamics import ControlField, bloch_coordinates
from .errors import ValidationError


def fmt(x):
    """17 significant digits, enough to round-trip a double."""
    return f"{x:.17g}"


def csv_text(header, rows, run_id):
    lines = [f"# run_id: {run_id}", ",".join(header)]
    lines.extend(",".join(fmt(v) if isinstance(v, float) else str(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def control_rows(control):
    """Rows ``(t_q, u_1..u_M)`` with ``t_q = q*T/Q`` the right end of slice ``q``."""
    t = control.times()[1:]
    return [(float(tq), *map(float, u)) for tq, u in zip(t, control.values)]


def control_csv(control, run_id):
    header = ["t"] + [f"u{m + 1}" for m in range(control.n_controls)]
    return csv_text(header, control_rows(control), run_id)


def read_control(path, n_slices=None, n_controls=None, T=None):
    """Load a control written by :func:`control_csv`.

    The horizon is taken from the last time stamp. Optional arguments are
    checked against the file's shape.
    """
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise ValidationError(f"cannot read control file {path}: {exc.strerror}") from None
    if len(rows) < 2 or rows[0][0].strip() != "t":
        raise ValidationError(f"{path}: expected a header row starting with 't'")
    if any(len(r) != len(rows[0]) for r in rows):
        raise ValidationError(f"{path}: ragged rows")
    try:
        values = np.array(rows[1:], dtype=float)
    except ValueError:
        raise ValidationError(f"{path}: non-numeric entries") from None
    t, u = values[:, 0], values[:, 1:]
    if u.shape[1] < 1:
        raise ValidationError(f"{path}: no control columns")
    if n_slices is not None and u.shape[0] != n_slices:
        raise ValidationError(f"{path}: {u.shape[0]} slices, expected {n_slices}")
    if n_controls is not None and u.shape[1] != n_controls:
        raise ValidationError(f"{path}: {u.shape[1]} control channels, expected {n_controls}")
    horizon = float(t[-1])
    if T is not None and not np.isclose(horizon, T, rtol=1e-12, atol=0):
        raise ValidationError(f"{path}: horizon {horizon} does not match T = {T}")
    expected_t = np.arange(1, len(t) + 1) * (horizon / len(t))
    if not np.allclose(t, expected_t, rtol=1e-12, atol=1e-12):
        raise ValidationError(f"{path}: time column is not an equally spaced grid ending at T")
    return ControlField(T if T is not None else horizon, u)


def convergence_csv(log, run_id):
    return csv_text(["iter", "J_N"], [(k, float(j)) for k, j in log], run_id)


def fidelities_csv(report, run_id):
    rows = [(float(w), float(th), float(f)) for (w, th), f in zip(report.members, report.fidelities)]
    return csv_text(["omega", "theta", "fidelity"], rows, run_id)


def trajectory_csv(times, states, run_id, bloch):
    """Bloch components (two-level) or real/imaginary amplitudes per time."""
    if bloch:
        header = ["t", "x", "y", "z"]
        rows = [(float(t), *bloch_coordinates(psi)) for t, psi in zip(times, states)]
    else:
        d = states.shape[1]
        header = ["t"] + [f"{part}{k + 1}" for k in range(d) for part in ("re", "im")]
        rows = [
            (float(t), *(float(v) for c in psi for v in (c.real, c.imag)))
            for t, psi in zip(times, states)
        ]
    return csv_text(header, rows, run_id)


def summary_json(report, run_id, **extra):
    payload = {
        "run_id": run_id,
        "count": report.count,
        "mean": report.mean,
        "min": report.min,
        "max": report.max,
        "seed": report.seed,
    }
    payload.update(extra)
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def manifest_text(config, command, **results):
    lines = [
        f"run_id = {config.run_id}",
        f"command = {command}",
        "# resolved configuration",
        config.to_text().rstrip("\n"),
    ]
    if results:
        lines.append("# results")
        lines.extend(f"{k} = {fmt(v) if isinstance(v, float) else v}" for k, v in results.items())
    return "\n".join(lines) + "\n"


def write_outputs(out_dir, files):
    """Write ``{name: text}`` into ``out_dir`` (created if missing)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_text(text)
    return [out_dir / name for name in files]
