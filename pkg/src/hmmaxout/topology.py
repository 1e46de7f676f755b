"""Left-to-right region topology shared by the segmentation HMMs."""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HmmTopology:
    """Alternating regions, each a Bakis chain of ``states_per_region`` states.

    Within a region a state may loop or advance by one. Any state of a region
    may exit to the first state of the other region class, so a region can be
    as short as one frame. Paths start in the first state of region class 0
    and must end inside region class 0.
    """

    regions: tuple = ("character", "inter-character")
    states_per_region: int = 4

    def __post_init__(self):
        if len(self.regions) != 2:
            raise ValueError("topology alternates exactly two region classes")
        if self.states_per_region < 1:
            raise ValueError("need at least one state per region")

    @classmethod
    def line(cls, states_per_region=4):
        return cls(("word", "inter-word"), states_per_region)

    @property
    def n_states(self):
        return len(self.regions) * self.states_per_region

    def region_of(self, state):
        return int(state) // self.states_per_region

    def state(self, region, position):
        return region * self.states_per_region + position

    def permitted(self):
        """Boolean ``(S, S)`` mask of allowed transitions."""
        S, k = self.n_states, self.states_per_region
        m = np.zeros((S, S), dtype=bool)
        for q in range(S):
            r, j = divmod(q, k)
            m[q, q] = True
            if j + 1 < k:
                m[q, q + 1] = True
            m[q, self.state(1 - r, 0)] = True
        return m

    def initial(self):
        p = np.zeros(self.n_states)
        p[0] = 1.0
        return p

    def final_mask(self):
        return np.array([self.region_of(q) == 0 for q in range(self.n_states)])
