"""Figure rendering for the CLI report path.

Pure presentation: each function takes the same rows the CLI writes to
CSV and renders a PNG next to it.  matplotlib is imported lazily with
the Agg backend forced, so headless environments never need a display.
"""

from __future__ import annotations

import math


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def save_curve_figure(path: str, n: int, model_name: str, rows) -> str:
    """Plot per-search cost against pile size and mark the minimum.

    ``rows`` are (m, f_exact, f_list, f_pile, f_cleanup, f_approx)
    tuples; exact or approx entries may be None when not requested.
    """
    plt = _pyplot()
    ms = [r[0] for r in rows]
    exact = [r[1] for r in rows]
    approx = [r[5] for r in rows]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    if any(v is not None for v in exact):
        ax.plot(ms, exact, "o-", ms=3.5, lw=1.0, label="exact")
        i = min(range(len(ms)), key=lambda k: (exact[k], ms[k]))
        ax.plot([ms[i]], [exact[i]], "k*", ms=11,
                label=f"exact min at m={ms[i]}")
    if any(v is not None for v in approx):
        ax.plot(ms, approx, "s--", ms=3, lw=1.0, label="approximation")
        i = min(range(len(ms)), key=lambda k: (approx[k], ms[k]))
        ax.plot([ms[i]], [approx[i]], "rv", ms=8,
                label=f"approx min at m={ms[i]}")
    ax.set_xlabel("pile size at cleanup, m")
    ax.set_ylabel("expected cost per search")
    ax.set_title(f"n = {n}, model {model_name}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def save_optimum_figure(path: str, model_name: str, rows) -> str:
    """Step-plot optimal pile sizes against n.

    ``rows`` are (n, m_opt, m_opt_approx) tuples; the approx column may
    be None for models without an approximation.
    """
    plt = _pyplot()
    ns = [r[0] for r in rows]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.step(ns, [r[1] for r in rows], where="mid", lw=1.2, label="exact optimum")
    if any(r[2] is not None for r in rows):
        ax.step(ns, [r[2] for r in rows], where="mid", lw=1.2, ls="--",
                label="approx optimum")
    ref = [3.0 * (1.0 + 1.0 / n) * math.log2(n + 1) - 3.0 for n in ns]
    ax.plot(ns, ref, lw=0.8, alpha=0.6, label="3 b(n) reference")
    ax.set_xlabel("number of objects, n")
    ax.set_ylabel("optimal pile size")
    ax.set_title(f"model {model_name}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
