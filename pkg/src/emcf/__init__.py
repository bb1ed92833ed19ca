"""Certified continued-fraction scanning for a power-sum Diophantine bound.

The pipeline: enclose log 2 in an exact rational interval (logcomp),
extract the partial quotients every value of the interval shares
(cfengine), walk convergent denominators of (log 2)/(2N) through parity,
quotient-size, coprimality, and divisibility gates (scanner, arithmetic),
and turn an accepted index into a lower bound m > q_j/2.  Around that
sit the asymptotic solver for the continuous problem (asymptotics),
Sylvester-sequence factor-count bounds (omega), a disk cache for the two
large artifacts (cache), and named self-checks (verify) behind the
`emcf` command (cli).
"""

from .arithmetic import (
    DivisibilityConstants,
    PrimeProfile,
    divisibility_constants,
    fermat_order,
    is_primitive_root_3,
    prime_set,
    primes_up_to,
    power_sum_oracle,
    staudt_fraction,
)
from .asymptotics import (
    GeneralizedCoeffs,
    RealRoot,
    SeriesPolynomial,
    asymp_fit,
    c_coeffs,
    cft_inequality,
    compute_fm,
    delange_residual,
    expansion_coefficients,
    expansion_k,
    g_poly,
    sandwich_bounds,
    sandwich_check,
    solve_k,
    sum_powers_ratio,
)
from .cache import ArtifactCache, CacheCorruptionError, default_cache_dir
from .cfengine import (
    ConvergentTracker,
    EmptyCertificationError,
    PartialQuotients,
    cf_certified,
    cf_fast,
    cf_quadratic,
    read_cf_file,
    reconstruct_exact,
    stream_convergents,
    write_cf_file,
)
from .logcomp import (
    DigitBudgetError,
    RationalInterval,
    compute_log2,
    compute_log_ratio,
    interval_digit_string,
    read_digit_file,
    scale_interval,
    write_digit_file,
)
from .omega import (
    SylvesterLog,
    min_omega_from_bound,
    reciprocal_sum_check,
    sylvester_exact,
    sylvester_log10,
)
from .scanner import (
    ConditionReport,
    ScanConfig,
    ScanResult,
    TableRow,
    bound_from_row,
    bound_mantissa_exponent,
    check_conditions,
    run_scan,
)
from .verify import REFERENCE_ROWS, CheckResult, run_checks

__version__ = "0.1.0"
