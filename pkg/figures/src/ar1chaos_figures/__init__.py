from .render import (
    histogram_overlay,
    main,
    normal_density,
    read_columns,
    render,
    save,
)

__all__ = [
    "histogram_overlay",
    "main",
    "normal_density",
    "read_columns",
    "render",
    "save",
]

__version__ = "0.1.0"
