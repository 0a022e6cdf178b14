import inflect as i

_inflect = i.engine()


def inflect(text: str) -> str:
    """
    Render inflect's no()/plural() markup inside a message.

    >>> inflect("found no('characteristic value', 1)")
    'found 1 characteristic value'
    >>> inflect("no('violation', 3) in run config")
    '3 violations in run config'
    """

    return _inflect.inflect(text)  # type: ignore


def count(noun: str, n: int) -> str:
    """
    Shorthand for ``inflect(f"no('{noun}', {n})")``.

    >>> count("root", 2)
    '2 roots'
    >>> count("node", 0)
    'no nodes'
    """

    return inflect(f"no('{noun}', {n})")
