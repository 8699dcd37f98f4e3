"""Exact symmetric means of continued-fraction digits.

The package certifies continued-fraction digits from decimal enclosures,
evaluates elementary symmetric means S(alpha, n, k)^{1/k} exactly at scale,
computes the metric constants governing their almost-sure behavior, derives
closed forms for periodic sequences, and runs Monte-Carlo experiments with
coupled proxy digit streams. See the `macsym` command line tool.
"""

from .cfdigits import (AlphaSpec, DecimalInterval, DigitRule, DigitSeq,
                       PeriodicCF, PrecisionExhausted, Rational,
                       RationalTerminated, SurdValue, extract_digits,
                       parse_alpha, surd_value)
from .constants import (ConstantValue, gauss_kuzmin_pmf, holder_kp,
                        khinchin_k0, limsup_upper_bound,
                        limsup_upper_bound_baby)
from .periodic import (FValue, PeriodicSeq, f_periodic, holder_half_limit,
                       hyp2f1_terminating, legendre_p, scaled_legendre,
                       three_scaled, xd_sequence)
from .proxysim import (CoupledStream, ProxyExperimentReport, band_experiment,
                       binomial_tail_check, coupled_digit_stream,
                       heavy_tail_block_experiment)
from .symmeans import (CeilPolicy, MeanReport, MultiplicityTable, binom_root,
                       binom_root_limit, esp_multiplicity, esp_prefix,
                       inverse_mean_report, maclaurin_chain, mean_report,
                       niculescu_check)

__version__ = "0.1.0"
