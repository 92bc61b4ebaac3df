"""Standalone matplotlib scripts that render the CSV outputs."""

from __future__ import annotations

from pathlib import Path

from .errors import UnknownColumns
from .output import read_csv_columns

REQUIRED_COLUMNS = {
    "spectrum": ("k", "T2", "R2"),
    "fluorescence": ("dk", "dp", "B_R"),
    "wavefunction": ("x", "re_psi", "im_psi", "abs2"),
    "g2trace": ("tau", "g2"),
    "g2map": ("E_half", "theta0", "ln_g2_0", "flag"),
    "eigen": ("subspace", "index", "re", "im"),
}

_HEADER = '''"""Render {csv} ({kind})."""
import matplotlib.pyplot as plt
import numpy as np

with open({csv!r}, encoding="utf-8") as fh:
    rows = [line for line in fh if not line.startswith("#")]
data = np.genfromtxt(rows, delimiter=",", names=True)
fig, ax = plt.subplots(figsize=(6, 4))
'''

_BODIES = {
    "spectrum": '''ax.plot(data["k"], data["T2"], "r--", label="|T|^2")
ax.plot(data["k"], data["R2"], "b-", label="|R|^2")
ax.set_xlabel("delta_k / Gamma")
ax.legend()
''',
    "fluorescence": '''dk = np.unique(data["dk"])
dp = np.unique(data["dp"])
z = data["B_R"].reshape(len(dk), len(dp))
mesh = ax.pcolormesh(dk, dp, z.T, shading="auto")
fig.colorbar(mesh, ax=ax, label="B_R")
ax.set_xlabel("Delta_k / Gamma")
ax.set_ylabel("Delta_p / Gamma")
''',
    "wavefunction": '''ax.plot(data["x"], data["abs2"], "k-", label="|psi|^2")
ax.plot(data["x"], data["re_psi"], "b:", label="Re psi")
ax.plot(data["x"], data["im_psi"], "r:", label="Im psi")
ax.set_xlabel("x Gamma")
ax.legend()
''',
    "g2trace": '''ax.plot(data["tau"], data["g2"], "k-")
ax.set_xlabel("tau Gamma")
ax.set_ylabel("g2(tau)")
''',
    "g2map": '''e = np.unique(data["E_half"])
t = np.unique(data["theta0"])
z = data["ln_g2_0"].reshape(len(e), len(t))
mesh = ax.pcolormesh(t / np.pi, e, z, shading="auto", cmap="RdBu_r")
fig.colorbar(mesh, ax=ax, label="ln g2(0)")
ax.contour(t / np.pi, e, z, levels=[0.0], colors="k")
ax.set_xlabel("theta0 / pi")
ax.set_ylabel("E/2 - omega_c")
''',
    "eigen": '''ax.scatter(data["re"], data["im"], c=data["subspace"])
ax.axhline(0, color="0.7", lw=0.5)
ax.set_xlabel("Re eigenvalue")
ax.set_ylabel("Im eigenvalue")
''',
}


def emit_plot_script(csv: str | Path, kind: str) -> Path:
    """Write ``<csv>.plot.py`` next to the CSV and return its path.

    Raises:
        UnknownColumns: the CSV header lacks the columns ``kind`` needs.
    """
    if kind not in REQUIRED_COLUMNS:
        raise UnknownColumns(f"no plot template for kind {kind!r}")
    csv = Path(csv)
    present = set(read_csv_columns(csv))
    missing = [c for c in REQUIRED_COLUMNS[kind] if c not in present]
    if missing:
        raise UnknownColumns(f"{csv} lacks columns {missing} for a {kind} plot")
    script = csv.with_name(csv.name + ".plot.py")
    text = _HEADER.format(csv=csv.name, kind=kind) + _BODIES[kind]
    text += f'fig.tight_layout()\nfig.savefig({csv.name + ".png"!r}, dpi=150)\n'
    script.write_text(text, encoding="utf-8")
    return script
