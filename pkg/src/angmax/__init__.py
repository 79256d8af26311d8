"""Angular maximal functions of the Poisson, Stieltjes and Laplace transforms.

Closed-form transforms of simple functions on the half-line, the angular
maximal operators built from them, the radius-dependent splitting of the
Poisson kernel, and seeded experiment runners that measure the associated
norm inequalities.
"""

__version__ = "0.1.0"

from .func_model import *  # noqa: F401,F403
from .func_model import __all__ as _fm_all
from .quadrature import QuadratureError, quad, quad_batch, quad_semi_infinite
from .transforms import *  # noqa: F401,F403
from .transforms import __all__ as _tr_all
from .maximal import *  # noqa: F401,F403
from .maximal import __all__ as _mx_all
from .kernel_split import *  # noqa: F401,F403
from .kernel_split import __all__ as _ks_all

__all__ = (["__version__", "QuadratureError", "quad", "quad_batch", "quad_semi_infinite"]
           + list(_fm_all) + list(_tr_all) + list(_mx_all) + list(_ks_all))
