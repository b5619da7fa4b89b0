"""Figure renderers for darwin-mbl results tables; no physics recomputed."""

__version__ = "0.1.0"

from .render import (
    render_collapse,
    render_disorder_sweeps,
    render_fixed_initial,
    render_lambda_sweep,
    render_mobility_edge,
    render_redundancy_plateau,
)
from .tables import EmptyTableError, MissingColumnError, TableError, read_table
