"""Machine-readable outputs: CSV with a comment header, JSON with the
resolved configuration embedded.  Floats are written with 17 significant
digits so files round-trip losslessly.
"""

import json

from . import __version__


def format_float(x):
    return f"{x:.17g}"


def config_lines(config):
    lines = [f"# psglab {__version__}"]
    for key, value in config.items():
        lines.append(f"# {key} = {value}")
    return lines


def write_csv(path, header, rows, config):
    """Write rows of floats under a '#'-commented resolved-config block."""
    out = config_lines(config)
    out.append(",".join(header))
    for row in rows:
        out.append(",".join(format_float(v) for v in row))
    text = "\n".join(out) + "\n"
    if path == "-":
        print(text, end="")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def write_json(path, payload, config):
    """Write a JSON document whose leading keys are version and config."""
    doc = {"version": __version__, "config": dict(config)}
    doc.update(payload)
    text = json.dumps(doc, indent=2, sort_keys=False, allow_nan=True)
    if path == "-":
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
