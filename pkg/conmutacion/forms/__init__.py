"""Formularios de validación (reexportación compatible con `from conmutacion.forms import ...`)."""

from .escenario import parse_scenario, scenario_to_toml, signal_to_toml

__all__ = [
    'parse_scenario',
    'scenario_to_toml',
    'signal_to_toml',
]
