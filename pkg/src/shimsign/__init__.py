"""Sign patterns of half-integral weight coefficients through the Shimura lift."""

__version__ = "0.1.0"

from .characters import DirichletCharacter, character_group, parse_label, principal
from .halfint import HalfIntegralForm, eigencheck, load_form, save_form
from .qseries import delta, tau_table
from .shimura import LiftedForm, bt, delta_lift, invert_lift, lift, normalized_eigenvalues, synth_hecke_form

__all__ = [
    "DirichletCharacter",
    "HalfIntegralForm",
    "LiftedForm",
    "__version__",
    "bt",
    "character_group",
    "delta",
    "delta_lift",
    "eigencheck",
    "invert_lift",
    "lift",
    "load_form",
    "normalized_eigenvalues",
    "parse_label",
    "principal",
    "save_form",
    "synth_hecke_form",
    "tau_table",
]
