"""Deterministic text/CSV/JSON emission shared by the CLI and tests.

All numeric output is fixed at 6 significant digits so repeated runs with
identical inputs produce byte-identical files.
"""

import json
import math

import numpy as np


def fmt(x):
    """Format one number at 6 significant digits ('nan' for missing)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.6g}"


def round6(x):
    """Round to 6 significant digits (for JSON payloads)."""
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(fmt(x))


def write_csv(path, header, rows):
    """Write rows of already-formatted strings with a fixed newline."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def series_csv_rows(values, name="y"):
    return [name], [[fmt(v)] for v in np.asarray(values, dtype=float)]


def acf_csv_rows(report):
    rows = [[str(int(lag)), fmt(val), fmt(report.band)] for lag, val in zip(report.lags, report.values)]
    return ["lag", "value", "band"], rows


def hill_csv_rows(report):
    rows = [[str(int(k)), fmt(a)] for k, a in zip(report.k_values, report.alpha_hat)]
    return ["k", "alpha_hat"], rows


def fit_report_text(fit, n_obs):
    """Aligned fit report with standard errors in parentheses."""
    names = fit.orders.param_names()
    label_w = 11
    lines = [f"estimator: {fit.estimator_kind}"]
    est_line = " ".join(f"{fmt(v):>13}" for v in fit.theta_hat.theta)
    se_line = " ".join(f"{'(' + fmt(v) + ')':>13}" for v in fit.std_errors)
    hdr_line = " ".join(f"{nm:>13}" for nm in names)
    lines.append(" " * label_w + hdr_line)
    lines.append(f"{'estimate':<{label_w}}" + est_line)
    lines.append(f"{'std err':<{label_w}}" + se_line)
    lines.append(f"objective  {fmt(fit.objective_value)}")
    lines.append(f"g0         {fmt(fit.g0)}")
    lines.append(f"eta2       {fmt(fit.eta2)}")
    lines.append(f"converged  {str(fit.converged).lower()}")
    lines.append(f"iterations {fit.iterations}")
    lines.append(f"n          {n_obs}")
    return "\n".join(lines) + "\n"


def fit_report_json(fit, n_obs):
    names = fit.orders.param_names()
    payload = {
        "estimator": fit.estimator_kind,
        "n": int(n_obs),
        "converged": bool(fit.converged),
        "iterations": int(fit.iterations),
        "objective": round6(fit.objective_value),
        "g0": round6(fit.g0),
        "eta2": round6(fit.eta2),
        "estimates": {nm: round6(v) for nm, v in zip(names, fit.theta_hat.theta)},
        "std_errors": {nm: round6(v) for nm, v in zip(names, fit.std_errors)},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def mc_table_csv_rows(table):
    header = ["estimator", "parameter", "truth", "bias", "sd", "ad", "successes", "failures"]
    theta0 = table.scenario.theta0.theta
    rows = []
    for kind in table.scenario.estimators:
        for j, nm in enumerate(table.param_names):
            rows.append(
                [
                    kind,
                    nm,
                    fmt(theta0[j]),
                    fmt(table.bias[kind][j]),
                    fmt(table.sd[kind][j]),
                    fmt(table.ad[kind][j]),
                    str(table.successes[kind]),
                    str(table.failures[kind]),
                ]
            )
    return header, rows


def mc_table_text(table):
    sc = table.scenario
    lines = [
        f"scenario   {sc.name}",
        f"n          {sc.n}",
        f"reps       {sc.replications}",
        f"seed       {sc.seed}",
        f"theta0     {' '.join(fmt(v) for v in sc.theta0.theta)}",
        f"dist       {sc.dist.kind} ({sc.dist.standardization})",
        "",
    ]
    name_w = max(len(nm) for nm in table.param_names) + 2
    for kind in sc.estimators:
        lines.append(f"[{kind}]  successes={table.successes[kind]} failures={table.failures[kind]}")
        hdr = " " * 6 + "".join(f"{nm:>12}" for nm in table.param_names)
        lines.append(hdr)
        for label, block in (("bias", table.bias), ("sd", table.sd), ("ad", table.ad)):
            lines.append(f"{label:<6}" + "".join(f"{fmt(v):>12}" for v in block[kind]))
        lines.append("")
    return "\n".join(lines)


def mc_replications_csv_rows(table):
    names = table.param_names
    header = ["replication", "estimator", "converged"]
    header += names + [f"se_{nm}" for nm in names]
    rows = []
    for rec in table.records:
        for kind in table.scenario.estimators:
            row = [str(rec.index), kind, str(rec.converged[kind]).lower()]
            row += [fmt(v) for v in rec.estimates[kind]]
            row += [fmt(v) for v in rec.std_errors[kind]]
            rows.append(row)
    return header, rows
