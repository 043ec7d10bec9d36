import json
import os

from vortex_lie.filament import circle, ellipse, perturbed_circle
from vortex_lie.validation import UNIT_RADIUS

CURVES = {
    "circle": lambda n: circle(UNIT_RADIUS, n),
    "ellipse": lambda n: ellipse(0.18, 0.14, n),
    "perturbed": lambda n: perturbed_circle(UNIT_RADIUS, 3, 0.01, n),
}


def save(results, path):
    if not path:
        return
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump([r.to_dict() for r in results], fh, indent=2)
    print(f"wrote {path}")
