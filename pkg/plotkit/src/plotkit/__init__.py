"""Offline figure generation for optimizer CSV logs."""

from .figures import (
    FigureSpec,
    SchemaError,
    plot_pareto,
    plot_trajectory,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "SchemaError",
    "plot_pareto",
    "plot_trajectory",
    "render",
]
