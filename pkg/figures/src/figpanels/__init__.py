"""Declarative figure panels over chiralchain CSV outputs.

This package never computes physics: it reads the simulator's CSV tables
(documented, stable schemas), validates them against a panel specification,
and renders deterministic images. Any schema mismatch fails loudly with the
offending file and column named.
"""

__version__ = "0.1.0"

from .panels import PanelSpec, PanelSchemaError, load_panel_spec, render_panel

__all__ = [
    "__version__",
    "PanelSpec",
    "PanelSchemaError",
    "load_panel_spec",
    "render_panel",
]
