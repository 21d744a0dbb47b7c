"""One-switch discount functions: discounted utility, switch points and impatience."""

from oneswitch.core import (
    DatedSequence,
    DomainError,
    Lottery,
    PowerUtility,
    PreferenceModel,
    delay,
    make_sequence,
)
from oneswitch.discount import (
    Exponential,
    Hyperbolic,
    Impatience,
    LinearTimesExponential,
    SumOfExponentials,
    classify_impatience,
    validate,
)
from oneswitch.du import delta, switch_closed_form, switch_numeric, utility

__version__ = "0.1.0"
