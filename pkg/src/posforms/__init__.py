"""Positivity of real (p,p)-forms on C^n: weak, Hermitian and strong cones."""

from .exterior import (Form, Frame, conjugate, contract, is_real, phi_basis, pullback,
                       restrict_to_hyperplane, rho_extend, volume_coefficient, volume_form, wedge)
from .quadratic import eigen, form_from_matrix, gram_matrix, hermitian_positivity, is_psd
from .decomposability import PlueckerPoint, factorize_2form, is_decomposable, sample_decomposable
from .verdicts import PositivityVerdict, Status
from .weak import (WeakConfig, minimize_on_pluecker, omega_family, omega_family_verdict,
                   screen, weak_verdict)
from .strong import (certify_strong_by_duality, nnls_decompose, pair, pairing_functional,
                     refute_strong, strong_verdict)

__version__ = "0.1.0"
