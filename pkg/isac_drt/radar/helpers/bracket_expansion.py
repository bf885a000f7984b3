import logging
from typing import Callable, Tuple

from isac_drt.radar.exceptions import TangentBracketError

logger = logging.getLogger()


class BracketExpansion:
    """
    Finds an upper end of a root bracket for a scalar function

    It works in the following way:
    1.) It starts from the lower end `lo`, where the function has a known sign
    2.) Evaluates the function at the current upper end guess
    3.) If the sign differs from the sign at `lo`, the bracket is returned
    4.) If not, the upper end is moved geometrically away from `lo` and the
        process runs again until the upper end passes `limit`
    """

    def __init__(
        self,
        func: Callable[[float], float],
        lo: float,
        hi: float,
        limit: float,
        factor: float = 2.0,
    ) -> None:
        if not hi > lo:
            raise ValueError("Upper bracket guess has to exceed the lower end")
        if factor <= 1.0:
            raise ValueError("Expansion factor has to exceed one")
        self.func = func
        self.lo = lo
        self.hi = hi
        self.limit = limit
        self.factor = factor

    def compute_bracket(self) -> Tuple[float, float]:
        """
        Expands the bracket until the function changes sign.

        Returns
        -------
        Tuple[float, float]
            Bracket (lo, hi) with func(lo) and func(hi) of opposite sign

        Raises
        ------
        TangentBracketError
            If the upper end passes the limit without a sign change
        """
        f_lo = self.func(self.lo)
        while True:
            f_hi = self.func(self.hi)
            logger.debug("Bracket [%s, %s] values %s, %s", self.lo, self.hi, f_lo, f_hi)
            if f_lo * f_hi <= 0.0:
                return self.lo, self.hi
            self._increase_upper()

    def _increase_upper(self) -> None:
        width = (self.hi - self.lo) * self.factor
        if self.lo + width > self.limit:
            raise TangentBracketError()
        self.hi = self.lo + width
