from typing import Optional, Tuple

ID = Optional[str]
# first and last cell of a grid interval, both included
Interval = Tuple[int, int]
