"""Numerical toolkit for free probability: pairings, Wigner chaos, Stein bounds."""
from .combinatorics import catalan, crossing_number, enumerate_pair_partitions, noncrossing_respecting_pairings
from .kernels import Kernel, contract, inner, rank_one, unit_vector
from .spd import SpdCovariance, ou_covariance, spd_analyze
from .stein import BoundReport, bound_report, gamma_discrepancy_sq, lemma8_rhs, m_of_f, psi
from .wigner import WignerVector, family_moment, fourth_moment_identity, wigner_joint_moment

__version__ = "0.1.0"
