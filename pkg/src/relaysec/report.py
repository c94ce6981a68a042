"""CSV schema v1 and number formatting shared by the CLI commands."""

from __future__ import annotations

import csv
import io
import math

SCHEMA_VERSION = 1

PARAM_COLUMNS = (
    "protocol", "n", "m", "gamma_r", "gamma_e", "tau", "alpha", "a", "b", "r0",
    "eps_t", "eps_s", "trials", "seed",
)
BOUND_COLUMNS = ("tx_bound_raw", "tx_bound", "sec_bound_raw", "sec_bound")
ESTIMATE_COLUMNS = ("tx_phat", "tx_ci_lo", "tx_ci_hi", "sec_phat", "sec_ci_lo", "sec_ci_hi")
COLUMNS_V1 = PARAM_COLUMNS + BOUND_COLUMNS + ESTIMATE_COLUMNS

VALIDATION_COLUMNS = COLUMNS_V1 + ("tx_slack", "sec_slack", "tx_pass", "sec_pass", "pass")


def fmt(v) -> str:
    """9 significant digits, '.' decimal point; ints and strings verbatim; None -> empty cell."""
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    out = format(v, ".9g")
    return "0" if out == "-0" else out


def render(rows, columns=COLUMNS_V1) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def param_row(cfg, trials=None, seed=None) -> dict:
    vals = cfg.values()
    row = {k: vals.get(k) for k in PARAM_COLUMNS}
    row["trials"] = trials
    row["seed"] = seed
    return row


def bound_cells(tx, sec) -> dict:
    return {
        "tx_bound_raw": tx.raw, "tx_bound": tx.clamped,
        "sec_bound_raw": sec.raw, "sec_bound": sec.clamped,
    }


def estimate_cells(tx, sec) -> dict:
    return {
        "tx_phat": tx.p_hat, "tx_ci_lo": tx.ci_low, "tx_ci_hi": tx.ci_high,
        "sec_phat": sec.p_hat, "sec_ci_lo": sec.ci_low, "sec_ci_hi": sec.ci_high,
    }
