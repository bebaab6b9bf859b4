"""Named run configurations reproducing the standard worked cases."""

from __future__ import annotations

from dataclasses import dataclass

from .config import RunConfig
from .errors import InputError


@dataclass(frozen=True)
class Preset:
    command: str
    parameters: dict
    reproduces: str


PRESETS: dict[str, Preset] = {
    "string-1d": Preset(
        "flat-spectrum",
        {"g": [[2.0]], "p": 1, "q": 0, "box_radius": 3, "lambda_min": -50.0, "lambda_max": 1.0},
        "circle of length 2: eigenvalues -4 pi^2 m^2 / g^2 (shorter string, higher pitch)",
    ),
    "null-directions": Preset(
        "flat-spectrum",
        {"g": [[1.0, 0.0], [0.0, 1.0]], "p": 1, "q": 1, "box_radius": 10, "lambda_min": -1e-6, "lambda_max": 1e-6},
        "R^{1,1}/Z^2: zero eigenvalue carried by every null vector m1 = +-m2",
    ),
    "flat-unstable": Preset(
        "stability-scan",
        {
            "g0": [[1.0, 0.0], [0.0, 1.0]], "p": 1, "q": 1, "radius": 0.01, "samples": 100,
            "box_radius": 8, "lambda_min": -500.0, "lambda_max": 500.0, "match_tol": 1e-6,
        },
        "flat tori: only the zero eigenvalue survives every small deformation",
    ),
    "oppenheim-irrational": Preset(
        "oppenheim-scan",
        {
            "g": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0 ** -0.25]], "p": 2, "q": 1,
            "box_radii": [10, 20, 40, 60], "lambda_min": -50.0, "lambda_max": 50.0,
        },
        "deformed form diag(1, 1, -sqrt 2): not proportional to an integer form, values dense",
    ),
    "oppenheim-rational": Preset(
        "oppenheim-scan",
        {
            "g": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], "p": 2, "q": 1,
            "box_radii": [10, 20, 40, 60], "lambda_min": -50.0, "lambda_max": 50.0,
        },
        "standard lattice in R^{2,1}: integer form, spectrum discrete with gaps 4 pi^2",
    ),
    "ads3-standard": Preset(
        "sharpness",
        {"presentation": "standard", "translation": 2.0, "word_radius": 6, "muH": [[1.0, 1.0]], "c_prime": 0.0},
        "rank-2 Schottky group in SL(2,R) x {e} against the diagonal ray: C = 1/sqrt 2",
    ),
    "ads3-properness": Preset(
        "properness",
        {"muL": [[1.0, 0.0]], "muH": [[1.0, 1.0]], "probe_count": 64},
        "SL(2,R) x {e} acts properly on AdS^3: distinct rays meet only at 0",
    ),
    "equal-rays": Preset(
        "properness",
        {"muL": [[1.0, 1.0]], "muH": [[1.0, 1.0]], "probe_count": 64},
        "L = H: the cones share the diagonal ray, the action is not proper",
    ),
    "calabi-markus": Preset(
        "properness",
        {"muL": [[1.0, 0.0]], "muH": [[1.0, 0.0], [0.0, 1.0]], "probe_count": 64},
        "equal real ranks: mu(H) fills the chamber, nothing infinite acts properly",
    ),
    "ads3-orbits": Preset(
        "orbit-count",
        {"presentation": "standard", "translation": 2.0, "word_radius": 8,
         "radii": [float(r) for r in range(1, 17)], "complete_only": True},
        "orbit growth N(R) <= A exp(R / C) for the standard group",
    ),
    "ads3-stability": Preset(
        "ads3-stable",
        {"presentation": "standard", "translation": 2.0, "perturbation_scale": 1e-3,
         "samples": 20, "word_radius": 6, "l_max": 60},
        "stable eigenvalues l(l-2) shared by small deformations of the standard group",
    ),
    "poincare-standard": Preset(
        "poincare",
        {"presentation": "standard", "translation": 2.0, "decay_rate": 4.242640687119285,
         "schedule": [1, 2, 3, 4, 5, 6]},
        "partial sums of the orbit series with decay 3/C",
    ),
}


def preset(name: str, seed: int = 0, output_path: str = ".") -> RunConfig:
    """Fully populated run configuration for a registered preset."""
    try:
        entry = PRESETS[name]
    except KeyError:
        raise InputError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None
    return RunConfig(entry.command, dict(entry.parameters), seed, output_path)
