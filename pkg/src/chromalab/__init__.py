"""Random-graph laboratory for chromatic-number concentration studies.

Submodules:

* ``asymptotics`` — exact-arithmetic evaluation of the independence-
  number and chromatic-number formulas, the first-moment gap, the
  planted-set expectation bound, and the non-concentration ledger.
* ``poisson`` — total-variation machinery and the shifted tail-mass
  certificate for Poisson laws.
* ``graphcore`` — dense bitset graphs: fair-coin sampling, independent
  k-set counting, exact independence and chromatic numbers.
* ``coupling`` — the conditioned pair (H, H') with planted independent
  a-sets and its empirical verification.
* ``lab`` — CLI, experiments, and reproducibility manifests.
"""

from .errors import BudgetExhausted, DomainError, HypothesisViolated

__version__ = "0.1.0"

__all__ = ["BudgetExhausted", "DomainError", "HypothesisViolated", "__version__"]
