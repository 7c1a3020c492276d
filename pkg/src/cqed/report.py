"""Strong-coupling classification."""

import logging

from src.cqed.schemas import StrongCouplingReport
from src.model.schemas import CavityQedParams

logger = logging.getLogger(__name__)


def strong_coupling_report(params: CavityQedParams) -> StrongCouplingReport:
    """Classify a parameter set against the strong-coupling criteria.

    Three independent tests are reported: single-photon saturation (n0 < 1),
    single-atom cooperativity (N0 < 1) and the bad-cavity condition g²/κ > γ.

    Args:
        params: Validated rate set

    Returns:
        Report with the three booleans and the raw numbers behind them

    Example:
        >>> params = CavityQedParams(g=1.0, kappa=1.0, gamma=1.0, gamma_h=1.0)
        >>> strong_coupling_report(params).params.N0
        2.0
    """
    g_squared_over_kappa = params.g**2 / params.kappa
    report = StrongCouplingReport(
        params=params,
        n0_below_one=params.n0 < 1.0,
        N0_below_one=params.N0 < 1.0,
        bad_cavity=g_squared_over_kappa > params.gamma,
        g_squared_over_kappa=g_squared_over_kappa,
        gamma=params.gamma,
    )
    logger.info(
        f"Strong coupling: n0={params.n0:.4g} (<1: {report.n0_below_one}), "
        f"N0={params.N0:.4g} (<1: {report.N0_below_one}), "
        f"g^2/kappa={g_squared_over_kappa:.4g} vs gamma={params.gamma:.4g}"
    )
    return report
