import argparse
import math


def exponent(arg):
    """Used by argparse when the argument is an exponent, ``inf`` allowed."""
    if arg.strip().lower() in ('inf', 'infinity'):
        return math.inf
    try:
        return float(arg)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f'invalid exponent `{arg}\' (choose a real number or inf)'
        )


def list_of_exponents(arg):
    """Used by argparse when the argument should be a comma-separated list of
    exponents."""
    values = [x for x in arg.split(',') if x.strip() != '']
    if len(values) == 0:
        raise argparse.ArgumentTypeError('invalid choice (empty list of exponents)')
    return [exponent(x) for x in values]


def list_of_ints(arg, min=1, max=math.inf):
    """Used by argparse when the argument should be a list of positive ints."""
    values = arg.split(",")
    if min <= len(values) <= max:
        try:
            ints = list(map(int, values))
            if all(i >= 1 for i in ints):
                return ints
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(
        "invalid choice (choose a comma-separated list of positive ints)"
    )


def positive_int(arg):
    try:
        value = int(arg)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError(f'invalid choice `{arg}\' (positive int)')
    return value
