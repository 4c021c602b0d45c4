"""Invariant multi-curves of fibred quadratic (and Möbius-composed) dynamics over circle rotations."""
from .core import (DEFAULT_ALPHA, DEFAULT_ESCAPE_RADIUS, AffineFamily, CircleLoop, FibredMap,
                   MobiusFamily, Orbit, Parabolic2Loop, SampledLoop, cover_angles, iterate,
                   loop_value, wrap)
from .cycles import (LAMBDA0, CycleTrack, aberth_roots, build_rational_3curve, lambda_to_c,
                     periodic_points, track_cycle, track_to_multicurve)
from .errors import *  # noqa: F401,F403
from .mobius import INF, MobiusMap, mobius_through
from .multicurve import (Covering, LiftedMap, MultiCurve, UnfoldingCurve, detect_jumping_integer,
                         invariance_residual, jumping_residuals, lagrange_invariant_map, lift_map,
                         project, segment, unfold)
from .multiplier import (LinearizationData, MultiplierReport, TubeEstimate, birkhoff_linearize,
                         classify, is_attracted, multiplier, tube_radius)
from .quadratic import (NormalizationData, StaticTwoCurve, affine_lagrange, build_static_two_curve,
                        canonical_two_curve, fixed_points, normalization, post_compose_tau0,
                        tau1_period2)

__version__ = "0.1.0"
