import abc
from typing import Optional


class Runnable(abc.ABC):
    """Object that performs work when the configuration is executed.

    ``run`` returns True when every property check of the run passed.
    """

    @abc.abstractmethod
    def run(self, out_dir: Optional[str] = None, seed: Optional[int] = None) -> bool:
        pass
