"""Ext over the Steenrod algebra, Adams charts, and F2-synthetic extensions."""

from .chart import Chart, load_chart, parse_chart, validate_chart
from .f2linalg import F2Matrix, kernel_basis, rank, rref, solve
from .render import RenderStyle, render_svg
from .resolution import Resolution, resolve
from .steenrod import MilnorElement, Sq
from .synthetic import bigraded_group, group_for_chart, translate

__version__ = "0.1.0"
