"""
Sensing-optimal mixed strategies built from the tangent set of a budget.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import jax

from isac_drt.constants import MEAN_RESOURCE_TOL, WEIGHT_SUM_TOL
from isac_drt.isac_drt import Config
from isac_drt.tradeoff.envelope import EnvelopeResult, TangentCase, tangent_set
from isac_drt.tradeoff.exceptions import InconsistentEnvelopeError
from isac_drt.tradeoff.front import FrontPoint, FrontSample

logger = logging.getLogger()


@dataclass(slots=True, frozen=True)
class DesignWeight:
    design_id: Hashable
    weight: float


@dataclass(slots=True, frozen=True)
class Atom:
    """
    One resource level of a mixed strategy

    Attributes
    ----------
    weight: float
        Probability of the resource level
    xi: float
        Resource level
    designs: Tuple[DesignWeight, ...]
        Conditional distribution over the designs spending xi
    covariance: Optional[jax.Array]
        Transmit covariance realizing the atom, if the designs are covariances
    """

    weight: float
    xi: float
    designs: Tuple[DesignWeight, ...]
    covariance: Optional[jax.Array] = field(default=None, compare=False)


@dataclass(slots=True, frozen=True)
class MixedStrategy:
    """
    Finite distribution over resource levels and designs.

    Weights are validated on construction. The mean resource constraint is not,
    so that a faulty strategy can be built and then rejected by `verify_kkt`.
    """

    atoms: Tuple[Atom, ...]
    budget: float

    def __post_init__(self) -> None:
        if len(self.atoms) == 0:
            raise ValueError("Mixed strategy needs at least one atom")
        for atom in self.atoms:
            if atom.weight < -WEIGHT_SUM_TOL:
                raise ValueError(f"Negative atom weight {atom.weight}")
            if len(atom.designs) == 0:
                raise ValueError(f"Atom at {atom.xi} carries no designs")
            cond = sum(d.weight for d in atom.designs)
            if abs(cond - 1.0) > WEIGHT_SUM_TOL * len(atom.designs):
                raise ValueError(
                    f"Conditional weights of atom at {atom.xi} sum to {cond}"
                )
        total = sum(atom.weight for atom in self.atoms)
        if abs(total - 1.0) > WEIGHT_SUM_TOL * len(self.atoms):
            raise ValueError(f"Atom weights sum to {total}")

    @property
    def mean_resource(self) -> float:
        return sum(atom.weight * atom.xi for atom in self.atoms)

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    def design_probabilities(self) -> Dict[Hashable, float]:
        """
        Marginal probability of every design in the support
        """
        probs: Dict[Hashable, float] = {}
        for atom in self.atoms:
            for design in atom.designs:
                probs[design.design_id] = (
                    probs.get(design.design_id, 0.0) + atom.weight * design.weight
                )
        return {k: v for k, v in probs.items() if v > 0.0}

    def records(self) -> List[Dict[str, object]]:
        rows: List[Dict[str, object]] = []
        for index, atom in enumerate(self.atoms):
            for design in atom.designs:
                rows.append(
                    {
                        "atom": index,
                        "weight": atom.weight,
                        "xi": atom.xi,
                        "design_id": design.design_id,
                        "conditional_weight": design.weight,
                    }
                )
        return rows


ConditionalRule = Callable[[FrontPoint], Sequence[DesignWeight]]


def uniform_designs(point: FrontPoint) -> Tuple[DesignWeight, ...]:
    weight = 1.0 / len(point.designs)
    return tuple(DesignWeight(d, weight) for d in point.designs)


def _check_consistency(env: EnvelopeResult, front: FrontSample) -> None:
    for contact in env.contacts:
        try:
            point = front.point_at(contact.xi)
        except ValueError as err:
            raise InconsistentEnvelopeError(
                f"Envelope contact at {contact.xi} is not a front point"
            ) from err
        if abs(point.g - contact.g) > Config().contact_tol * max(1.0, abs(point.g)):
            raise InconsistentEnvelopeError(
                f"Envelope contact at {contact.xi} has value {contact.g}, "
                f"front has {point.g}"
            )


def build_mixture(
    env: EnvelopeResult,
    front: FrontSample,
    C: float,
    conditional: Optional[ConditionalRule] = None,
) -> MixedStrategy:
    """
    Builds the optimal mixed strategy for the budget C.

    A budget on a contact or beyond the last contact yields a single atom. A
    budget inside a segment time-shares its endpoint contacts xi1 < xi2 with
    weights (xi2 - C)/(xi2 - xi1) and (C - xi1)/(xi2 - xi1), so the mean
    resource equals C.

    Parameters
    ----------
    env: EnvelopeResult
        Envelope of the front
    front: FrontSample
        Front the envelope was computed from
    C: float
        Resource budget
    conditional: Optional[ConditionalRule]
        Distribution over the designs of a contact, uniform by default

    Returns
    -------
    MixedStrategy
        Optimal mixture

    Raises
    ------
    InconsistentEnvelopeError
        If the envelope does not belong to the front
    InfeasibleBudgetError
        If C lies below the smallest sampled cost
    """
    _check_consistency(env, front)
    rule = conditional if conditional is not None else uniform_designs
    tangent = tangent_set(env, C)

    if tangent.case is TangentCase.BRACKETED:
        xi1, xi2 = tangent.xis
        p1 = (xi2 - C) / (xi2 - xi1)
        p2 = (C - xi1) / (xi2 - xi1)
        points = (front.point_at(xi1), front.point_at(xi2))
        atoms = tuple(
            Atom(w, p.xi, tuple(rule(p))) for w, p in zip((p1, p2), points)
        )
    else:
        point = front.point_at(tangent.xis[0])
        atoms = (Atom(1.0, point.xi, tuple(rule(point))),)

    mix = MixedStrategy(atoms, C)
    if mix.mean_resource > C + MEAN_RESOURCE_TOL * max(1.0, abs(C)):
        logger.warning(
            "Mixture mean resource %s exceeds the budget %s", mix.mean_resource, C
        )
    logger.info(
        "Built %s mixture with atoms at %s and weights %s",
        tangent.case.value[0],
        [a.xi for a in atoms],
        [a.weight for a in atoms],
    )
    return mix


def expected_performance(mix: MixedStrategy, front: FrontSample) -> float:
    """
    Expected front value sum_i w_i g(xi_i) of a mixture

    Raises
    ------
    OffFrontAtomError
        If an atom does not sit on a front point
    """
    return sum(atom.weight * front.value_at(atom.xi) for atom in mix.atoms)


def perturb_mixture(
    mix: MixedStrategy,
    front: FrontSample,
    atom_index: int,
    new_xi: float,
    conditional: Optional[ConditionalRule] = None,
) -> MixedStrategy:
    """
    Moves one atom to another point of the front and keeps all weights
    """
    rule = conditional if conditional is not None else uniform_designs
    point = front.point_at(new_xi)
    atoms = list(mix.atoms)
    atoms[atom_index] = Atom(
        atoms[atom_index].weight, point.xi, tuple(rule(point))
    )
    return replace(mix, atoms=tuple(atoms))


def swap_weights(mix: MixedStrategy) -> MixedStrategy:
    """
    Exchanges the weights of a two-atom mixture. The result keeps the atom
    locations but no longer meets the mean resource constraint.
    """
    if mix.n_atoms != 2:
        raise ValueError("Weights can only be swapped on a two-atom mixture")
    first, second = mix.atoms
    atoms = (replace(first, weight=second.weight), replace(second, weight=first.weight))
    return replace(mix, atoms=atoms)
