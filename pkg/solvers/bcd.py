"""Block coordinate ascent over (alpha, beta, positions, powers) and the fixed-ULA baseline."""

import logging
from dataclasses import replace

import numpy as np

from models import BcdOptions, BcdResult, PinchLayout, PowerAlloc, SystemParams, UserSet
from solvers import fp
from solvers.channel import effective_channels
from solvers.position import PositionObjectiveContext, search_positions
from solvers.rates import sum_rate

logger = logging.getLogger(__name__)


def initial_powers(users: UserSet) -> PowerAlloc:
    return PowerAlloc(p=np.full(users.M, users.p_max))


def optimize(params: SystemParams, users: UserSet, layout0: PinchLayout, opts: BcdOptions) -> BcdResult:
    """Run BCD passes until the relative sum-rate gain drops below `opts.tol`.

    One pass: alpha, beta (closed form), positions (coordinate ascent, when
    enabled), powers (closed form). trace[0] is the rate of the starting point;
    every later entry is the true sum-rate after a full pass.
    """
    users.check_region(params)
    layout0.check_region(params)
    layout = layout0
    p = initial_powers(users)
    G = effective_channels(params, layout, users)
    rate = sum_rate(G, p, params.sigma2, opts.mode).sum_rate_nats
    trace = [rate]
    surrogate = []
    evaluations = 0
    converged = False
    iterations = 0

    for iterations in range(1, opts.max_iters + 1):
        aux = fp.update_aux(G, p, params.sigma2, opts.mode)
        if opts.optimize_positions_flag:
            ctx = PositionObjectiveContext.build(params, users, aux, p, opts.mode)
            layout, used = search_positions(ctx, layout, opts.gd)
            evaluations += used
            G = effective_channels(params, layout, users)
        p = fp.update_powers(G, aux.alpha, aux.beta, users.p_max, opts.mode)
        surrogate.append(fp.surrogate_f2(aux.alpha, aux.beta, G, p, params.sigma2, opts.mode))

        previous, rate = rate, sum_rate(G, p, params.sigma2, opts.mode).sum_rate_nats
        trace.append(rate)
        logger.debug("bcd %s iter %d: R=%.12g nats", opts.mode.value, iterations, rate)
        if abs(rate - previous) / max(previous, 1e-12) < opts.tol:
            converged = True
            break

    if not converged:
        logger.warning("bcd %s stopped after %d iterations without reaching tol=%g",
                       opts.mode.value, iterations, opts.tol)
    return BcdResult(
        layout=layout,
        p=p,
        trace=np.array(trace),
        iterations=iterations,
        converged=converged,
        mode=opts.mode,
        surrogate_trace=np.array(surrogate),
        objective_evaluations=evaluations,
    )


def ula_layout(params: SystemParams, N: int) -> PinchLayout:
    """Conventional array at x = 0 on the waveguide y-grid, without in-guide phase."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return PinchLayout(x_p=np.zeros(N), guided=False)


def optimize_baseline(params: SystemParams, users: UserSet, N: int, opts: BcdOptions) -> BcdResult:
    """Power-only BCD on the fixed ULA."""
    return optimize(params, users, ula_layout(params, N), replace(opts, optimize_positions_flag=False))
