"""Randomised law harness.

Each law takes a ``CaseSampler`` and returns the largest residual it saw for
that case. ``run_law`` runs a law over a seeded case stream, ``run_all`` runs
the whole catalogue.
"""

import asyncio
import logging
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from bayeslens.categories.markov import (
    Morphism,
    as_equal,
    as_equal_residual,
    compose,
    compose_all,
    copy,
    delete,
    identity,
    joint_residual,
    joint_state,
    marginals,
    residual,
    swap,
    tensor,
    tensor_objects,
    unit_object,
)
from bayeslens.core.config import settings
from bayeslens.core.errors import BayesLensError, UnknownLaw
from bayeslens.models.report import CaseFailure, LawReport, ShrunkFailure
from bayeslens.services.case_generator import CaseGen, CaseSampler
from bayeslens.services.lens_service import (
    compose_chart,
    compose_lens,
    copy_inverse_iso,
    identity_lens,
    left_projection,
    oplax_gamma,
    section_s,
    section_t,
    tensor_lens,
)
from bayeslens.services.support_service import (
    bayes_invert,
    inversion_context,
    restrict,
    support_of,
    to_ordinary,
    to_supported,
)

logger = logging.getLogger(__name__)

Law = Callable[[CaseSampler], float]


def _asymmetry(h: Morphism) -> float:
    """Covariance asymmetry in units of machine epsilon; 0 for finite maps."""
    if h.kind != "gaussian" or h.Sigma.size == 0:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(h.Sigma))))
    gap = float(np.max(np.abs(h.Sigma - h.Sigma.T)))
    return gap / (np.finfo(float).eps * scale)


def law_comonoid(s: CaseSampler) -> float:
    x, y = s.obj(), s.obj()
    dup, ident = copy(x), identity(x)
    return max(
        residual(compose(dup, tensor(delete(x), ident)), ident),
        residual(compose(dup, tensor(ident, delete(x))), ident),
        residual(compose(dup, tensor(dup, ident)), compose(dup, tensor(ident, dup))),
        residual(compose(dup, swap(x, x)), dup),
        residual(compose(swap(x, y), swap(y, x)), identity(tensor_objects(x, y))),
    )


def law_bayes_joint(s: CaseSampler) -> float:
    x, y = s.obj(), s.obj()
    f = s.morphism(x, y)
    worst = 0.0
    for pi in s.priors(x):
        h = bayes_invert(f, pi)
        reversed_joint = compose_all(compose(pi, f), copy(y), tensor(identity(y), h), swap(y, x))
        worst = max(worst, residual(joint_state(f, pi), reversed_joint), _asymmetry(h))
    return worst


def law_inverse_uniqueness(s: CaseSampler) -> float:
    x, y = s.obj(), s.obj()
    f = s.morphism(x, y)
    worst = 0.0
    for pi in s.priors(x):
        ctx = inversion_context(f, pi)
        h = bayes_invert(f, pi)
        other = s.agreeing(h, compose(pi, f))
        worst = max(worst, residual(to_supported(h, ctx), to_supported(other, ctx)))
    return worst


def law_bijection_psi(s: CaseSampler) -> float:
    x, y = s.obj(), s.obj()
    f = s.morphism(x, y)
    worst = 0.0
    for pi in s.priors(x):
        ctx = inversion_context(f, pi)
        pushforward = compose(pi, f)
        h = s.agreeing(bayes_invert(f, pi), pushforward)
        g = to_supported(h, ctx)
        worst = max(
            worst,
            residual(to_supported(to_ordinary(g, ctx), ctx), g),
            as_equal_residual(to_ordinary(g, ctx), h, pushforward),
        )
    return worst


def law_support_representability(s: CaseSampler) -> float:
    x, y = s.obj(), s.obj()
    tol = s.instance.default_tolerance
    disagreements = 0
    worst = 0.0
    for pi in s.priors(x):
        support = support_of(pi)
        f = s.morphism(x, y)
        for g in (s.agreeing(f, pi), s.morphism(x, y)):
            by_section = residual(compose(support.section, f), compose(support.section, g)) <= tol
            by_joint = joint_residual(f, g, pi) <= tol
            disagreements += int(by_section != by_joint) + int(by_section != as_equal(f, g, pi, tol))
        worst = max(worst, residual(compose(support.section, support.retraction), identity(support.carrier)))
    return disagreements + worst


def law_section_retraction(s: CaseSampler) -> float:
    x = s.obj()
    worst = 0.0
    for pi in s.priors(x):
        support = support_of(pi)
        worst = max(
            worst,
            residual(compose(support.section, support.retraction), identity(support.carrier)),
            as_equal_residual(compose(support.retraction, support.section), identity(x), pi),
        )
    return worst


def law_restrict_functorial(s: CaseSampler) -> float:
    x, y, z = s.obj(), s.obj(), s.obj()
    f, g = s.morphism(x, y), s.morphism(y, z)
    worst = 0.0
    for pi in s.priors(x):
        chained = compose(restrict(f, pi), restrict(g, compose(pi, f)))
        worst = max(
            worst,
            residual(chained, restrict(compose(f, g), pi)),
            residual(restrict(identity(x), pi), identity(support_of(pi).carrier)),
        )
    return worst


def law_s_functorial(s: CaseSampler) -> float:
    x, y, z = s.obj(), s.obj(), s.obj()
    f, g = s.morphism(x, y), s.morphism(y, z)
    chained = compose_lens(section_s(f), section_s(g))
    direct = section_s(compose(f, g))
    unit = section_s(identity(x))
    worst = residual(chained.fwd, direct.fwd)
    for pi in s.priors(x):
        worst = max(
            worst,
            residual(chained.at(pi), direct.at(pi)),
            residual(unit.at(pi), identity(support_of(pi).carrier)),
        )
    return worst


def law_t_functorial(s: CaseSampler) -> float:
    x, y, z = s.obj(), s.obj(), s.obj()
    f, g = s.morphism(x, y), s.morphism(y, z)
    chained = compose_chart(section_t(f), section_t(g))
    direct = section_t(compose(f, g))
    unit = section_t(identity(x))
    worst = residual(chained.fwd, direct.fwd)
    for pi in s.priors(x):
        worst = max(
            worst,
            residual(chained.at(pi), direct.at(pi)),
            residual(unit.at(pi), identity(support_of(pi).carrier)),
        )
    return worst


def law_gamma_natural(s: CaseSampler) -> float:
    x, y, x2, y2 = s.obj(), s.obj(), s.obj(), s.obj()
    f, g = s.morphism(x, x2), s.morphism(y, y2)
    both = tensor(f, g)
    worst = 0.0
    for pi in s.priors(tensor_objects(x, y)):
        pi_left, pi_right = marginals(pi, (x, y))
        gamma_first = compose(oplax_gamma(x, y, pi), tensor(restrict(f, pi_left), restrict(g, pi_right)))
        restrict_first = compose(restrict(both, pi), oplax_gamma(x2, y2, compose(pi, both)))
        worst = max(worst, residual(gamma_first, restrict_first))
    return worst


def law_gamma_assoc(s: CaseSampler) -> float:
    x, y, z = s.obj(), s.obj(), s.obj()
    xy, yz = tensor_objects(x, y), tensor_objects(y, z)
    worst = 0.0
    for pi in s.priors(tensor_objects(xy, z)):
        pi_xy, pi_z = marginals(pi, (xy, z))
        pi_x, pi_yz = marginals(pi, (x, yz))
        left_first = compose(
            oplax_gamma(xy, z, pi),
            tensor(oplax_gamma(x, y, pi_xy), identity(support_of(pi_z).carrier)),
        )
        right_first = compose(
            oplax_gamma(x, yz, pi),
            tensor(identity(support_of(pi_x).carrier), oplax_gamma(y, z, pi_yz)),
        )
        worst = max(worst, residual(left_first, right_first))
    return worst


def law_gamma_unitor(s: CaseSampler) -> float:
    x = s.obj()
    unit = unit_object(s.kind)
    worst = 0.0
    for pi in s.priors(x):
        ident = identity(support_of(pi).carrier)
        worst = max(
            worst,
            residual(oplax_gamma(unit, x, pi), ident),
            residual(oplax_gamma(x, unit, pi), ident),
        )
    return worst


def law_copy_inverse(s: CaseSampler) -> float:
    x = s.obj()
    dup, project = copy(x), left_projection(x)
    worst = 0.0
    for pi in s.priors(x):
        copy_sharp, left_sharp = copy_inverse_iso(pi)
        support = support_of(pi)
        doubled = compose(pi, dup)
        joint_support = support_of(doubled)
        worst = max(
            worst,
            residual(compose(left_sharp, copy_sharp), identity(support.carrier)),
            residual(compose(copy_sharp, left_sharp), identity(joint_support.carrier)),
            residual(compose(copy_sharp, support.section), compose(joint_support.section, project)),
            residual(compose(left_sharp, joint_support.section), compose(support.section, dup)),
            as_equal_residual(compose(project, dup), identity(tensor_objects(x, x)), doubled),
        )
    return worst


def law_marginal_natural(s: CaseSampler) -> float:
    x, y, x2, y2 = s.obj(), s.obj(), s.obj(), s.obj()
    f, g = s.morphism(x, x2), s.morphism(y, y2)
    unit = unit_object(s.kind)
    worst = residual(compose(f, delete(x2)), delete(x))
    for pi in s.priors(tensor_objects(x, y)):
        pi_left, pi_right = marginals(pi, (x, y))
        pushed_left, pushed_right = marginals(compose(pi, tensor(f, g)), (x2, y2))
        worst = max(
            worst,
            residual(pushed_left, compose(pi_left, f)),
            residual(pushed_right, compose(pi_right, g)),
            residual(marginals(pi_left, (unit, x))[1], pi_left),
            residual(marginals(pi_left, (x, unit))[0], pi_left),
        )

    z = s.obj()
    xy, yz = tensor_objects(x, y), tensor_objects(y, z)
    rho = s.state(tensor_objects(xy, z))
    rho_xy, rho_z = marginals(rho, (xy, z))
    rho_x, rho_y = marginals(rho_xy, (x, y))
    other_x, rho_yz = marginals(rho, (x, yz))
    other_y, other_z = marginals(rho_yz, (y, z))
    return max(worst, residual(rho_x, other_x), residual(rho_y, other_y), residual(rho_z, other_z))


def law_lens_assoc(s: CaseSampler) -> float:
    w, x, y, z = s.obj(), s.obj(), s.obj(), s.obj()
    a, b, c = section_s(s.morphism(w, x)), section_s(s.morphism(x, y)), section_s(s.morphism(y, z))
    left = compose_lens(compose_lens(a, b), c)
    right = compose_lens(a, compose_lens(b, c))
    unit_left = compose_lens(identity_lens(a.source), a)
    unit_right = compose_lens(a, identity_lens(a.target))
    worst = 0.0
    for pi in s.priors(w):
        expected = a.at(pi)
        worst = max(
            worst,
            residual(left.at(pi), right.at(pi)),
            residual(unit_left.at(pi), expected),
            residual(unit_right.at(pi), expected),
        )

    x1, x2, y1, y2, z1, z2 = (s.obj() for _ in range(6))
    l1, l2 = section_s(s.morphism(x1, y1)), section_s(s.morphism(x2, y2))
    l3, l4 = section_s(s.morphism(y1, z1)), section_s(s.morphism(y2, z2))
    parallel_first = compose_lens(tensor_lens(l1, l2), tensor_lens(l3, l4))
    serial_first = tensor_lens(compose_lens(l1, l3), compose_lens(l2, l4))
    for _ in range(s.priors_per_case):
        pi = s.product_state(x1, x2)
        worst = max(worst, residual(parallel_first.at(pi), serial_first.at(pi)))
    return worst


def law_as_equal_base_change_forward(s: CaseSampler) -> float:
    x, y, z = s.obj(), s.obj(), s.obj()
    f, u = s.morphism(x, y), s.morphism(y, z)
    worst = 0.0
    for pi in s.priors(x):
        v = s.agreeing(u, compose(pi, f))
        worst = max(worst, as_equal_residual(compose(f, u), compose(f, v), pi))
    return worst


LAWS: Dict[str, Law] = {
    "comonoid": law_comonoid,
    "bayes-joint": law_bayes_joint,
    "inverse-uniqueness": law_inverse_uniqueness,
    "bijection-psi": law_bijection_psi,
    "support-representability": law_support_representability,
    "section-retraction": law_section_retraction,
    "restrict-functorial": law_restrict_functorial,
    "S-functorial": law_s_functorial,
    "T-functorial": law_t_functorial,
    "gamma-natural": law_gamma_natural,
    "gamma-assoc": law_gamma_assoc,
    "gamma-unitor": law_gamma_unitor,
    "copy-inverse": law_copy_inverse,
    "marginal-natural": law_marginal_natural,
    "lens-assoc": law_lens_assoc,
    "as-equal-base-change-forward": law_as_equal_base_change_forward,
}

EXACT_LAWS = {"comonoid"}

# lens-assoc evaluates nested composites at every prior
PRIOR_BUDGET = {"lens-assoc": 4}


def law_tolerance(name: str, instance_mix: str) -> float:
    """Tolerance for a law; mixed runs use the looser instance tolerance."""
    if name in EXACT_LAWS:
        return 0.0
    if instance_mix == "finite":
        return settings.TOLERANCE
    return max(settings.TOLERANCE, settings.GAUSS_TOLERANCE)


def get_law(name: str) -> Law:
    if name not in LAWS:
        raise UnknownLaw(f"unknown law '{name}'; known laws: {', '.join(LAWS)}")
    return LAWS[name]


def run_case(
    law: Law,
    gen: CaseGen,
    case_index: int,
    attempt: int = 0,
    max_dim: Optional[int] = None,
) -> Tuple[float, Optional[str]]:
    """
    Run one case of a law.

    Returns:
        (residual, error). Errors raised inside the case become an infinite
        residual with the error message.
    """
    sampler = gen.sampler(case_index, attempt, max_dim)
    try:
        value = float(law(sampler))
    except (BayesLensError, ValueError, np.linalg.LinAlgError) as e:
        return float("inf"), f"{type(e).__name__}: {e}"
    if np.isnan(value):
        return float("inf"), "residual is NaN"
    return value, None


def shrink_failure(law: Law, gen: CaseGen, case_index: int, tol: float) -> Optional[ShrunkFailure]:
    """
    Re-run a failing case with dimensions reduced toward 2.

    Returns:
        The failing run with the smallest max_dim found within
        SHRINK_ATTEMPTS attempts.
    """
    residual_value, error = run_case(law, gen, case_index)
    best = ShrunkFailure(
        seed=gen.seed, case_index=case_index, attempt=0, max_dim=gen.max_dim,
        residual=residual_value, error=error,
    )
    dims = list(range(gen.max_dim, 1, -1))
    budget = settings.SHRINK_ATTEMPTS
    for attempt in range(1, budget + 1):
        max_dim = dims[min(len(dims) - 1, attempt * len(dims) // budget)]
        if max_dim >= best.max_dim and best.max_dim > 2:
            continue
        residual_value, error = run_case(law, gen, case_index, attempt, max_dim)
        if residual_value > tol and max_dim < best.max_dim:
            best = ShrunkFailure(
                seed=gen.seed, case_index=case_index, attempt=attempt, max_dim=max_dim,
                residual=residual_value, error=error,
            )
        if best.max_dim == 2:
            break
    logger.warning(
        f"Shrunk failure: case {best.case_index}, attempt {best.attempt}, max_dim {best.max_dim}, "
        f"residual {best.residual}"
    )
    return best


async def run_law_async(name: str, gen: Optional[CaseGen] = None, tol: Optional[float] = None) -> LawReport:
    """
    Run one law over a case stream, cases concurrently.

    Args:
        name: Law identifier from the catalogue.
        gen: Case stream parameters; defaults from settings.
        tol: Override of the law's tolerance.

    Returns:
        LawReport with failures ordered by case index.

    Raises:
        UnknownLaw: name is not in the catalogue.
    """
    law = get_law(name)
    gen = CaseGen() if gen is None else gen
    if name in PRIOR_BUDGET and gen.priors_per_case > PRIOR_BUDGET[name]:
        gen = gen.model_copy(update={"priors_per_case": PRIOR_BUDGET[name]})
    tol = law_tolerance(name, gen.instance_mix) if tol is None else tol
    semaphore = asyncio.Semaphore(settings.LAW_WORKERS)

    async def one(case_index: int) -> Tuple[float, Optional[str]]:
        async with semaphore:
            return await asyncio.to_thread(run_case, law, gen, case_index)

    logger.info(f"Running law {name} on {gen.cases} {gen.instance_mix} cases (seed {gen.seed})")
    results = await asyncio.gather(*(one(i) for i in range(gen.cases)))

    failures = [
        CaseFailure(case_index=i, residual=value, error=error)
        for i, (value, error) in enumerate(results)
        if value > tol
    ]
    max_residual = max(value for value, _ in results)
    smallest = None
    if failures:
        logger.warning(f"Law {name} failed on {len(failures)} of {gen.cases} cases, max residual {max_residual}")
        smallest = await asyncio.to_thread(shrink_failure, law, gen, failures[0].case_index, tol)

    return LawReport(
        law=name,
        instance=gen.instance_mix,
        cases_run=gen.cases,
        failures=failures,
        max_residual=max_residual,
        tolerance=tol,
        passed=not failures,
        smallest_failure=smallest,
    )


async def run_all_async(
    gen: Optional[CaseGen] = None,
    tol: Optional[float] = None,
    names: Optional[List[str]] = None,
) -> List[LawReport]:
    """Run the catalogue (or the named laws) in catalogue order."""
    names = list(LAWS) if names is None else names
    for name in names:
        get_law(name)
    return [await run_law_async(name, gen, tol) for name in names]


def run_law(name: str, gen: Optional[CaseGen] = None, tol: Optional[float] = None) -> LawReport:
    return asyncio.run(run_law_async(name, gen, tol))


def run_all(
    gen: Optional[CaseGen] = None,
    tol: Optional[float] = None,
    names: Optional[List[str]] = None,
) -> List[LawReport]:
    return asyncio.run(run_all_async(gen, tol, names))
