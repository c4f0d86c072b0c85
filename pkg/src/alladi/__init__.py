"""Partial sums of -mu(a)/N(a) over ideals whose smallest prime factor lies
in a prescribed set of primes, and the tooling around them."""
from .arith import CompensatedSum, kronecker, li, mobius, primes_upto, sieve_spf
from .elliptic import Curve, batch_traces, theta_angle, trace_of_frobenius
from .errors import (AlladiError, CheckFailure, ConfigError, DomainError,
                     ExcludedPrimeError, PrecisionError, ResourceError)
from .numfield import (IdealFactorization, NumberField, PrimeIdeal,
                       enumerate_ideals, ideal_count, ideal_stats, load_field,
                       parse_field, primes_above, residue_cK, smooth_count)
from .primesets import PrimeSet, density, parse_set, sato_tate_measure
from .sums import (SumTrace, density_diagnostics, duality_sweep,
                   mu_indicator_sum, partial_sum, q_sum, verify_duality)

__all__ = [n for n in dir() if not n.startswith("_")]
