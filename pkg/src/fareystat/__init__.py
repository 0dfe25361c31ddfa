"""Fine-scale statistics of multidimensional Farey sequences."""
from .farey import FareyPoint, FareySequence, enumerate_farey, count_in_translate
from .geometry import ConeSpec, count_lattice_in_cone
from .report import VerificationReport
from .sets import TestSet, parse_set
from .statistics import CountDistribution, point_statistic, void_statistic

__version__ = "0.1.0"

__all__ = [
    "ConeSpec", "CountDistribution", "FareyPoint", "FareySequence", "TestSet",
    "VerificationReport", "count_in_translate", "count_lattice_in_cone",
    "enumerate_farey", "parse_set", "point_statistic", "void_statistic",
]
