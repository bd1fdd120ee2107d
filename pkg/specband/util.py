def ceil_div(a: int, b: int) -> int:
    """
    Ceiling of an integer quotient.

    Args:
        a: The dividend.
        b: The divisor, positive.

    Returns:
        The smallest integer not below a / b.
    """

    return -((-a) // b)


def flatten(lst: list[list]) -> list:
    """
    Flatten a two-dimensional list.

    Args:
        lst: The list to be flattened.

    Returns:
        The flattened list.
    """

    return [item for sublist in lst for item in sublist]


def delta(n: int, m: int) -> int:
    return 1 if n == m else 0
