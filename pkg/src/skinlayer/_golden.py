"""Reader for the bundled golden display tables and the matching recursion output."""
import ast
from importlib import resources

import numpy as np

from .blprofiles import SurfaceSymbolAlgebra, run_recursion, trace_Ek_cross_n

DISPLAYS = ("sol_k0_E", "sol_k0_H", "solnorm_k1", "HT_k1", "ET_k1", "HT_k2", "ET_k2",
            "traceET_k1", "traceET_k2", "traceET_k3")


def read_table(name):
    """Parse one table: ``(case, traces, components)``.

    ``case`` holds the algebra parameters from the header, ``traces`` the
    boundary data and ``components`` one coefficient list per component.
    """
    text = resources.files("skinlayer").joinpath("data", "golden", f"{name}.txt").read_text()
    case, traces, comps, cur = {}, [], [], None
    for line in text.splitlines():
        if line.startswith("# case:"):
            for item in line[len("# case:"):].split(","):
                key, val = item.split("=")
                case[key.strip()] = float(val)
        elif line.startswith("# traces:"):
            traces = [[complex(ast.literal_eval(z)) for z in t.split()]
                      for t in line[len("# traces:"):].split(";")]
        elif line.startswith("[component"):
            cur = []
            comps.append(cur)
        elif line.strip() and not line.startswith("#"):
            re, im = map(float, line.split())
            cur.append(complex(re, im))
    return case, traces, comps


def computed_tables(case, traces):
    """Tables produced by the recursion for a golden case, keyed like ``DISPLAYS``."""
    alg = SurfaceSymbolAlgebra.plane_wave(case["c1"], case["c2"], case["xi1"], case["xi2"],
                                          omega=case["omega"], eps_r=case["eps_r"])
    st = run_recursion(alg, traces, 2)
    X = alg.X

    def tang(c):
        return [list(c[0]), list(c[1])]

    out = {
        "sol_k0_E": tang(st.E_hat[0].coefficients),
        "sol_k0_H": tang(st.H[0].coefficients),
        "solnorm_k1": [list(st.E_hat[1].coefficients[2]), list(st.H[1].coefficients[2])],
        "HT_k1": tang(st.H[1].coefficients),
        "ET_k1": tang(X @ st.E_hat[1].coefficients),
        "HT_k2": tang(st.H[2].coefficients),
        "ET_k2": tang(X @ st.E_hat[2].coefficients),
    }
    for ell in (1, 2, 3):
        tr = trace_Ek_cross_n(st, ell)
        out[f"traceET_k{ell}"] = [[tr[0]], [tr[1]]]
    return out


def table_deviation(actual, expected) -> float:
    """Max coefficient-wise deviation, zero-padding the shorter polynomial."""
    if len(actual) != len(expected):
        return float("inf")
    worst = 0.0
    for a, e in zip(actual, expected):
        m = max(len(a), len(e))
        a = np.pad(np.asarray(a, complex), (0, m - len(a)))
        e = np.pad(np.asarray(e, complex), (0, m - len(e)))
        worst = max(worst, float(np.max(np.abs(a - e), initial=0.0)))
    return worst


def golden_deviations():
    """Per-display max deviation of the recursion from the bundled tables."""
    result = {}
    for name in DISPLAYS:
        case, traces, expected = read_table(name)
        result[name] = table_deviation(computed_tables(case, traces)[name], expected)
    return result
