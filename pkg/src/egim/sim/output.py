"""CSV and SVG emission for sweep results."""
from __future__ import annotations

import csv
import math
from pathlib import Path

from .config import CODED
from .sweep import PointResult, SweepResult

COLUMNS = ("scheme", "channel", "policy", "snr_db", "frames", "symbols", "bits",
           "symbol_errors", "bit_errors", "ser", "ber")


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(float(x))


def _results(result) -> list[SweepResult]:
    return [result] if isinstance(result, SweepResult) else list(result)


def emit_csv(result, path) -> Path:
    """Write one row per SNR point; accepts a SweepResult or a list of them."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(COLUMNS)
            for res in _results(result):
                for p in res.points:
                    w.writerow([res.scheme, res.channel, res.policy, repr(float(p.snr_db)),
                                p.frames, p.symbols, p.bits, p.symbol_errors, p.bit_errors,
                                _fmt(p.ser), _fmt(p.ber)])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def read_csv(path) -> list[SweepResult]:
    """Group rows back into results by (scheme, channel, policy, kind)."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise OSError(f"cannot read CSV {path}: {exc}") from exc
    groups: dict[tuple, SweepResult] = {}
    for row in rows:
        kind = "theory" if int(row["symbols"]) == 0 else "sim"
        key = (row["scheme"], row["channel"], row["policy"], kind)
        if key not in groups:
            label = f"{row['scheme']}-theory" if kind == "theory" else path.stem
            groups[key] = SweepResult(row["scheme"], row["channel"], row["policy"], [],
                                      label=label, kind=kind)
        groups[key].points.append(PointResult(
            float(row["snr_db"]), int(row["frames"]), int(row["symbols"]), int(row["bits"]),
            int(row["symbol_errors"]), int(row["bit_errors"]),
            ser=float(row["ser"]) if row["ser"] else float("nan"),
            ber=float(row["ber"]) if row["ber"] else float("nan"),
        ))
    return list(groups.values())


def emit_plot(results, path, metric: str | None = None) -> list[str]:
    """Overlay curves on a log-y SVG; returns the series labels drawn.

    Simulated results are drawn as markers, theory as lines. The metric
    defaults to BER when every result is a coded scheme, SER otherwise.
    No file is written for an empty result list.
    """
    results = _results(results)
    if not results:
        return []
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if metric is None:
        metric = "ber" if all(r.scheme in CODED for r in results) else "ser"
    fig, ax = plt.subplots(figsize=(6, 4.5))
    labels = []
    for res in results:
        y = getattr(res, metric)
        keep = y > 0
        label = res.label or f"{res.scheme}-{res.kind}"
        style = dict(linestyle="-") if res.kind == "theory" else dict(linestyle="--", marker="o")
        ax.semilogy(res.snr_db[keep], y[keep], label=label, **style)
        labels.append(label)
    ax.set_xlabel("Eb/N0 (dB)" if metric == "ber" and all(r.scheme in CODED for r in results)
                  else "average SNR per subcarrier (dB)")
    ax.set_ylabel(metric.upper())
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg")
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return labels
