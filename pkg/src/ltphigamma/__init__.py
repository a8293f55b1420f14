"""Explicit (phi, Gamma)-modules for tame mod p representations of a p-adic field.

Lubin-Tate endomorphisms, p-adic powers of 1-units, the modules attached to
ind(omega_{nf}^h) (x) omega_f^s (x) mu_lambda and checks of their identities.
"""

from .errors import LTError, PrecisionExhausted
from .ffield import GF, FFElem, FiniteField, embed
from .lubin_tate import FrobeniusSeries, fbar, gamma_series, lt_multiplication, reduce_mod_pi
from .padic import LocalFieldSpec, PiadicInteger
from .phigamma import (
    PhiGammaModule,
    base_change,
    check_cocycle,
    check_commutation,
    check_det_identity,
    construct_char,
    construct_ind,
    construct_twisted,
    det_module,
)
from .reps import RepClass, canonical_h, enumerate_classes, is_isomorphic, is_q_primitive, orbit
from .series import TSeries
from .tame_ext import InertiaElem, TameRing, build_vj, check_inertia_eigen, check_phi_fixed, unramified_descent
from .unit_exp import PExponent, one_unit_pow

__version__ = "0.1.0"
