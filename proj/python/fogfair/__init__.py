"""Group-fairness auditing for wearable freezing-of-gait detectors.

Thin wrapper over the compiled ``_fogfair`` extension. The extension sits
inside this package in wheel installs and on ``PYTHONPATH`` next to it in
in-tree builds; both layouts are accepted.
"""

try:
    from ._fogfair import (  # type: ignore[attr-defined]
        FogfairError,
        __version__,
        attribute_names,
        compute_fairness,
        four_fifths_verdict,
        generate_synth_dataset,
        run_audit,
        wilcoxon_one_sided,
    )
except ImportError:
    from _fogfair import (  # type: ignore[no-redef]
        FogfairError,
        __version__,
        attribute_names,
        compute_fairness,
        four_fifths_verdict,
        generate_synth_dataset,
        run_audit,
        wilcoxon_one_sided,
    )

__all__ = [
    "FogfairError",
    "__version__",
    "attribute_names",
    "compute_fairness",
    "four_fifths_verdict",
    "generate_synth_dataset",
    "run_audit",
    "wilcoxon_one_sided",
]
